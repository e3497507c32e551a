//! Noncommutative polynomials over the rationals, reduction, S-polynomials
//! and Buchberger completion.

use crate::automata::{build_monomial_acceptor, finite_language, Regex};
use crate::presentations::{lenlex, occurs_at, parse_exponent_word, CompletionBudget};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use thiserror::Error;

pub type Monomial = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("cannot parse term `{0}`")]
    Term(String),
    #[error("negative exponent in `{0}`")]
    Exponent(String),
    #[error("budget exhausted with {} polynomials after {passes} passes", partial.len())]
    Budget { partial: Vec<NcPoly>, passes: usize },
}

/// A neat polynomial: terms sorted descending by length-lex, no zero
/// coefficients, no repeated monomials.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct NcPoly {
    terms: Vec<(BigRational, Monomial)>,
}

fn desc(a: &Monomial, b: &Monomial) -> Ordering {
    lenlex(b, a)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl NcPoly {
    pub fn zero() -> NcPoly {
        NcPoly::default()
    }

    pub fn monomial(c: BigRational, m: Monomial) -> NcPoly {
        NcPoly::neaten(vec![(c, m)])
    }

    /// Adds like terms, drops zeros and sorts.
    pub fn neaten(terms: Vec<(BigRational, Monomial)>) -> NcPoly {
        let mut acc: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        for (c, m) in terms {
            *acc.entry(m).or_insert_with(BigRational::zero) += c;
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(m, c)| (c, m)).collect();
        terms.sort_by(|a, b| desc(&a.1, &b.1));
        NcPoly { terms }
    }

    pub fn terms(&self) -> &[(BigRational, Monomial)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.1)
    }

    pub fn lead_coeff(&self) -> Option<&BigRational> {
        self.terms.first().map(|t| &t.0)
    }

    pub fn make_monic(&self) -> NcPoly {
        match self.lead_coeff() {
            None => self.clone(),
            Some(c) => {
                let c = c.clone();
                NcPoly { terms: self.terms.iter().map(|(k, m)| (k / &c, m.clone())).collect() }
            }
        }
    }

    pub fn add(&self, q: &NcPoly) -> NcPoly {
        NcPoly::neaten(self.terms.iter().chain(q.terms.iter()).cloned().collect())
    }

    pub fn sub(&self, q: &NcPoly) -> NcPoly {
        self.add(&q.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> NcPoly {
        NcPoly::neaten(self.terms.iter().map(|(k, m)| (k * c, m.clone())).collect())
    }

    /// `c · u · self · v`.
    pub fn mul_term(&self, c: &BigRational, u: &[usize], v: &[usize]) -> NcPoly {
        NcPoly::neaten(
            self.terms
                .iter()
                .map(|(k, m)| {
                    let mut w = u.to_vec();
                    w.extend_from_slice(m);
                    w.extend_from_slice(v);
                    (k * c, w)
                })
                .collect(),
        )
    }

    pub fn mul(&self, q: &NcPoly) -> NcPoly {
        let mut out = Vec::new();
        for (a, m) in &self.terms {
            for (b, n) in &q.terms {
                let mut w = m.clone();
                w.extend_from_slice(n);
                out.push((a * b, w));
            }
        }
        NcPoly::neaten(out)
    }

    /// Parses `e1*e2*e1 - 2/9 e1*e2 + 3`; generator names may also be
    /// juxtaposed and carry `^k`.
    pub fn parse<S: AsRef<str>>(text: &str, names: &[S]) -> Result<NcPoly, PolyError> {
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for ch in text.chars() {
            if (ch == '+' || ch == '-') && !cur.trim().is_empty() {
                pieces.push((neg, std::mem::take(&mut cur)));
                neg = ch == '-';
            } else if ch == '+' || ch == '-' {
                if ch == '-' {
                    neg = !neg;
                }
            } else {
                cur.push(ch);
            }
        }
        if !cur.trim().is_empty() {
            pieces.push((neg, cur));
        }
        let mut terms = Vec::new();
        for (neg, piece) in pieces {
            let t = piece.trim();
            let digits = t.char_indices().take_while(|&(_, c)| c.is_ascii_digit() || c == '/').count();
            let (num, rest) = t.split_at(digits);
            let mut c = if num.is_empty() {
                BigRational::one()
            } else if let Some((p, q)) = num.split_once('/') {
                let p: BigInt = p.parse().map_err(|_| PolyError::Term(t.into()))?;
                let q: BigInt = q.parse().map_err(|_| PolyError::Term(t.into()))?;
                if q.is_zero() {
                    return Err(PolyError::Term(t.into()));
                }
                BigRational::new(p, q)
            } else {
                BigRational::from_integer(num.parse().map_err(|_| PolyError::Term(t.into()))?)
            };
            if neg {
                c = -c;
            }
            let rest = rest.trim().trim_start_matches('*').trim();
            let mut m = Vec::new();
            if !rest.is_empty() && rest != "1" {
                let syll = parse_exponent_word(rest, names).map_err(|_| PolyError::Term(t.into()))?;
                for (g, e) in syll {
                    if e < 0 {
                        return Err(PolyError::Exponent(t.into()));
                    }
                    m.extend(std::iter::repeat(g).take(e as usize));
                }
            }
            terms.push((c, m));
        }
        Ok(NcPoly::neaten(terms))
    }

    pub fn text<S: AsRef<str>>(&self, names: &[S]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (c, m)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            let a = c.abs();
            let mono = monomial_text(m, names);
            if m.is_empty() {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{a} {mono}"));
            }
        }
        out
    }
}

pub fn monomial_text<S: AsRef<str>>(m: &[usize], names: &[S]) -> String {
    if m.is_empty() {
        return "1".into();
    }
    m.iter().map(|&g| names[g].as_ref()).collect::<Vec<_>>().join("*")
}

/// One reduction step `p ↦ p − c·u·f·v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub coeff: BigRational,
    pub left: Monomial,
    pub basis: usize,
    pub right: Monomial,
}

fn find_reducer(m: &[usize], basis: &[NcPoly]) -> Option<(usize, usize)> {
    for (j, f) in basis.iter().enumerate() {
        let l = f.lead_monomial()?;
        if l.len() <= m.len() {
            if let Some(i) = (0..=m.len() - l.len()).find(|&i| occurs_at(m, l, i)) {
                return Some((j, i));
            }
        }
    }
    None
}

fn step_at(p: &NcPoly, t: usize, j: usize, i: usize, basis: &[NcPoly]) -> (NcPoly, TraceStep) {
    let (c, m) = &p.terms[t];
    let f = &basis[j];
    let l = f.lead_monomial().unwrap();
    let c = c / f.lead_coeff().unwrap();
    let (u, v) = (m[..i].to_vec(), m[i + l.len()..].to_vec());
    let next = p.sub(&f.mul_term(&c, &u, &v));
    (next, TraceStep { coeff: c, left: u, basis: j, right: v })
}

/// Reduces the largest reducible term first, using the first basis element
/// whose leading monomial occurs, at its leftmost occurrence.
pub fn reduce_poly_trace(p: &NcPoly, basis: &[NcPoly]) -> (NcPoly, Vec<TraceStep>) {
    let basis: Vec<NcPoly> = basis.iter().filter(|f| !f.is_zero()).cloned().collect();
    let mut p = p.clone();
    let mut trace = Vec::new();
    loop {
        let hit = p.terms.iter().enumerate().find_map(|(t, (_, m))| find_reducer(m, &basis).map(|(j, i)| (t, j, i)));
        match hit {
            None => return (p, trace),
            Some((t, j, i)) => {
                let (next, step) = step_at(&p, t, j, i, &basis);
                p = next;
                trace.push(step);
            }
        }
    }
}

pub fn reduce_poly(p: &NcPoly, basis: &[NcPoly]) -> NcPoly {
    reduce_poly_trace(p, basis).0
}

/// Reduction choosing term, basis element and occurrence at random.
pub fn reduce_poly_random<R: Rng>(p: &NcPoly, basis: &[NcPoly], rng: &mut R) -> NcPoly {
    let basis: Vec<NcPoly> = basis.iter().filter(|f| !f.is_zero()).cloned().collect();
    let mut p = p.clone();
    loop {
        let mut redexes = Vec::new();
        for (t, (_, m)) in p.terms.iter().enumerate() {
            for (j, f) in basis.iter().enumerate() {
                let l = f.lead_monomial().unwrap();
                if l.len() <= m.len() {
                    redexes.extend((0..=m.len() - l.len()).filter(|&i| occurs_at(m, l, i)).map(|i| (t, j, i)));
                }
            }
        }
        match redexes.choose(rng) {
            None => return p,
            Some(&(t, j, i)) => p = step_at(&p, t, j, i, &basis).0,
        }
    }
}

/// `Σ c·u·f·v` over a trace; equals `p − reduce_poly(p)`.
pub fn replay(trace: &[TraceStep], basis: &[NcPoly]) -> NcPoly {
    let basis: Vec<&NcPoly> = basis.iter().filter(|f| !f.is_zero()).collect();
    trace.iter().fold(NcPoly::zero(), |acc, s| acc.add(&basis[s.basis].mul_term(&s.coeff, &s.left, &s.right)))
}

/// Overlap S-polynomials between the leading monomials of `p` and `q`, in
/// both orders. With `same`, `p` and `q` are one polynomial.
fn overlaps(p: &NcPoly, q: &NcPoly, same: bool) -> Vec<NcPoly> {
    let mut out = Vec::new();
    let (Some(lp), Some(lq)) = (p.lead_monomial(), q.lead_monomial()) else {
        return out;
    };
    let one = BigRational::one();
    let mut contain = |big: &NcPoly, lb: &Monomial, small: &NcPoly, ls: &Monomial| {
        if ls.len() <= lb.len() {
            for i in 0..=lb.len() - ls.len() {
                if occurs_at(lb, ls, i) && !(same && ls.len() == lb.len()) {
                    out.push(big.sub(&small.mul_term(&one, &lb[..i], &lb[i + ls.len()..])));
                }
            }
        }
    };
    contain(p, lp, q, lq);
    if !same {
        contain(q, lq, p, lp);
    }
    let mut boundary = |f: &NcPoly, lf: &Monomial, g: &NcPoly, lg: &Monomial| {
        for k in 1..lf.len().min(lg.len()) {
            if lf[lf.len() - k..] == lg[..k] {
                out.push(f.mul_term(&one, &[], &lg[k..]).sub(&g.mul_term(&one, &lf[..lf.len() - k], &[])));
            }
        }
    };
    boundary(p, lp, q, lq);
    if !same {
        boundary(q, lq, p, lp);
    }
    out
}

/// S-polynomials of two monic polynomials; equal inputs count as one.
pub fn s_polynomials(p: &NcPoly, q: &NcPoly) -> Vec<NcPoly> {
    overlaps(p, q, p == q)
}

fn all_s_polynomials(basis: &[NcPoly]) -> Vec<NcPoly> {
    let mut out = Vec::new();
    for i in 0..basis.len() {
        for j in i..basis.len() {
            out.extend(overlaps(&basis[i], &basis[j], i == j));
        }
    }
    out
}

/// Removes polynomials reducible to zero by the others and reduces the rest.
pub fn interreduce_polys(polys: &[NcPoly]) -> Vec<NcPoly> {
    let mut basis: Vec<NcPoly> = polys.iter().filter(|p| !p.is_zero()).map(NcPoly::make_monic).collect();
    basis.sort_by(|a, b| lenlex(a.lead_monomial().unwrap(), b.lead_monomial().unwrap()));
    basis.dedup();
    loop {
        let mut changed = false;
        let mut i = 0;
        while i < basis.len() {
            let others: Vec<NcPoly> = basis.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, p)| p.clone()).collect();
            let r = reduce_poly(&basis[i], &others).make_monic();
            if r.is_zero() {
                basis.remove(i);
                changed = true;
                continue;
            }
            if r != basis[i] {
                basis[i] = r;
                changed = true;
            }
            i += 1;
        }
        if !changed {
            break;
        }
    }
    basis.sort_by(|a, b| lenlex(a.lead_monomial().unwrap(), b.lead_monomial().unwrap()));
    basis
}

pub fn buchberger(polys: &[NcPoly], budget: CompletionBudget) -> Result<Vec<NcPoly>, PolyError> {
    let mut basis = interreduce_polys(polys);
    for pass in 0..budget.max_passes {
        let mut added = false;
        let mut current = basis.clone();
        for s in all_s_polynomials(&basis) {
            let r = reduce_poly(&s, &current);
            if !r.is_zero() {
                current.push(r.make_monic());
                added = true;
                if current.len() > budget.max_rules {
                    return Err(PolyError::Budget { partial: current, passes: pass + 1 });
                }
            }
        }
        basis = interreduce_polys(&current);
        if !added {
            return Ok(basis);
        }
    }
    Err(PolyError::Budget { partial: basis, passes: budget.max_passes })
}

pub fn is_groebner(basis: &[NcPoly]) -> bool {
    all_s_polynomials(basis).iter().all(|s| reduce_poly(s, basis).is_zero())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Dimension {
    Finite(Vec<Monomial>),
    Infinite(Regex),
}

/// Irreducible monomials of a Gröbner basis, counted by their acceptor.
pub fn algebra_dimension<S: AsRef<str>>(basis: &[NcPoly], names: &[S]) -> Dimension {
    let leads: Vec<Monomial> = basis.iter().filter_map(|p| p.lead_monomial().cloned()).collect();
    let letters: Vec<String> = names.iter().map(|n| n.as_ref().to_string()).collect();
    let (dfa, regex) = build_monomial_acceptor(&leads, &letters);
    match finite_language(&dfa) {
        Some(mut words) => {
            words.sort_by(|a, b| lenlex(a, b));
            Dimension::Finite(words)
        }
        None => Dimension::Infinite(regex),
    }
}

// ---------------------------------------------------------------------------
// Reduction machine

/// The edges leaving an irreducible monomial `m` under letter `e`:
/// the terms of the normal form of `m·e`.
pub fn machine_edges(m: &[usize], e: usize, basis: &[NcPoly]) -> NcPoly {
    let mut w = m.to_vec();
    w.push(e);
    reduce_poly(&NcPoly::monomial(BigRational::one(), w), basis)
}

/// Runs the marked-graph machine: each term starts as a token at `1` with
/// its letters still to read; a randomly chosen token reads one letter and
/// splits along the edges. Returns the final marking.
pub fn run_machine<R: Rng>(p: &NcPoly, basis: &[NcPoly], rng: &mut R) -> NcPoly {
    let mut tokens: Vec<(BigRational, Monomial, Vec<usize>)> =
        p.terms.iter().map(|(c, m)| (c.clone(), Vec::new(), m.clone())).collect();
    let mut done = Vec::new();
    while !tokens.is_empty() {
        let k = rng.gen_range(0..tokens.len());
        let (c, at, rest) = tokens.swap_remove(k);
        if rest.is_empty() {
            done.push((c, at));
            continue;
        }
        for (d, n) in machine_edges(&at, rest[0], basis).terms {
            tokens.push((&c * &d, n, rest[1..].to_vec()));
        }
    }
    NcPoly::neaten(done)
}
