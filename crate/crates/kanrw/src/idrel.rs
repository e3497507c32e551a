//! Identities among relations: Y-sequences over a free crossed module,
//! rewriting systems carrying witnesses (EIRS), and generators of the
//! module of identities obtained from a Cayley graph.

use crate::machines::{build_cayley, CayleyError, CayleyGraph, InverseMode};
use crate::presentations::{
    critical_pairs, lenlex, occurs_at, word_text, CompletionBudget, GroupPresentation, OverlapKind, Rule,
};
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdrelError {
    #[error("unknown relator {0}")]
    UnknownRelator(usize),
    #[error("relator `{0}` is empty")]
    EmptyRelator(String),
    #[error("relations without labels cannot carry witnesses")]
    UnlabelledRelation,
    #[error("sequence is not an identity")]
    NotIdentity,
    #[error("completion budget exhausted after {passes} passes with {} rules", partial.len())]
    Budget { partial: Vec<EirsRule>, passes: usize },
    #[error(transparent)]
    Cayley(#[from] CayleyError),
}

/// A free-group word as `(generator, ±1)` letters, kept freely reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
pub struct FGWord(pub Vec<(usize, i8)>);

impl FGWord {
    pub fn id() -> FGWord {
        FGWord(Vec::new())
    }

    pub fn new(letters: Vec<(usize, i8)>) -> FGWord {
        free_reduce(&FGWord(letters))
    }

    pub fn from_syllables(s: &[(usize, i64)]) -> FGWord {
        let mut out = Vec::new();
        for &(g, e) in s {
            let sign = if e < 0 { -1 } else { 1 };
            out.extend(std::iter::repeat((g, sign)).take(e.unsigned_abs() as usize));
        }
        FGWord::new(out)
    }

    pub fn is_id(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> FGWord {
        FGWord(self.0.iter().rev().map(|&(g, e)| (g, -e)).collect())
    }

    pub fn mul(&self, other: &FGWord) -> FGWord {
        let mut out = self.0.clone();
        for &l in &other.0 {
            match out.last() {
                Some(&(g, e)) if g == l.0 && e == -l.1 => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        FGWord(out)
    }

    pub fn text<S: AsRef<str>>(&self, names: &[S]) -> String {
        if self.0.is_empty() {
            return "id".into();
        }
        let mut out = String::new();
        let mut i = 0;
        while i < self.0.len() {
            let mut j = i;
            while j < self.0.len() && self.0[j] == self.0[i] {
                j += 1;
            }
            let (g, e) = self.0[i];
            let k = (j - i) as i64 * e as i64;
            out.push_str(names[g].as_ref());
            if k != 1 {
                out.push_str(&format!("^{k}"));
            }
            i = j;
        }
        out
    }
}

pub fn free_reduce(w: &FGWord) -> FGWord {
    FGWord::id().mul(w)
}

/// `(ρ, u)^ε`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct YTerm {
    pub rel: usize,
    pub sign: i8,
    pub conj: FGWord,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct YSeq(pub Vec<YTerm>);

impl YSeq {
    pub fn empty() -> YSeq {
        YSeq(Vec::new())
    }

    pub fn single(rel: usize, sign: i8, conj: FGWord) -> YSeq {
        YSeq(vec![YTerm { rel, sign, conj }])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &YSeq) -> YSeq {
        YSeq(self.0.iter().chain(other.0.iter()).cloned().collect())
    }

    pub fn invert(&self) -> YSeq {
        YSeq(self.0.iter().rev().map(|t| YTerm { rel: t.rel, sign: -t.sign, conj: t.conj.clone() }).collect())
    }

    /// Right action: every conjugator `u` becomes `u·v`.
    pub fn act(&self, v: &FGWord) -> YSeq {
        YSeq(self.0.iter().map(|t| YTerm { rel: t.rel, sign: t.sign, conj: t.conj.mul(v) }).collect())
    }

    pub fn text<S: AsRef<str>, T: AsRef<str>>(&self, relators: &[S], gens: &[T]) -> String {
        if self.0.is_empty() {
            return "id".into();
        }
        self.0
            .iter()
            .map(|t| {
                let sign = if t.sign < 0 { "^-1" } else { "" };
                if t.conj.is_id() {
                    format!("{}{sign}", relators[t.rel].as_ref())
                } else {
                    format!("{}{sign}[{}]", relators[t.rel].as_ref(), t.conj.text(gens))
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Relators of a group presentation as free-group words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relators {
    pub labels: Vec<String>,
    pub words: Vec<FGWord>,
}

impl Relators {
    pub fn of(gp: &GroupPresentation) -> Relators {
        Relators {
            labels: gp.relators.iter().map(|(l, _)| l.clone()).collect(),
            words: gp.relators.iter().map(|(_, w)| to_fg(gp, w)).collect(),
        }
    }
}

/// Maps a monoid word to the free group.
pub fn to_fg(gp: &GroupPresentation, w: &[usize]) -> FGWord {
    FGWord::new(w.iter().map(|&l| gp.letter_fg[l]).collect())
}

/// `δ((ρ,u)^ε) = u⁻¹ w(ρ)^ε u`, multiplied along the sequence.
pub fn boundary(a: &YSeq, rels: &Relators) -> Result<FGWord, IdrelError> {
    let mut out = FGWord::id();
    for t in &a.0 {
        let w = rels.words.get(t.rel).ok_or(IdrelError::UnknownRelator(t.rel))?;
        let w = if t.sign < 0 { w.inverse() } else { w.clone() };
        out = out.mul(&t.conj.inverse()).mul(&w).mul(&t.conj);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Rewriting with witnesses

/// `(l, c, r)` with `l = δ(c)·r` in the free group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EirsRule {
    pub lhs: Vec<usize>,
    pub witness: YSeq,
    pub rhs: Vec<usize>,
}

impl EirsRule {
    pub fn holds(&self, gp: &GroupPresentation, rels: &Relators) -> bool {
        boundary(&self.witness, rels).map(|d| d.mul(&to_fg(gp, &self.rhs)) == to_fg(gp, &self.lhs)).unwrap_or(false)
    }

    fn pair(&self) -> Rule<usize> {
        (self.lhs.clone(), self.rhs.clone())
    }
}

pub fn pairs(eirs: &[EirsRule]) -> Vec<Rule<usize>> {
    eirs.iter().map(EirsRule::pair).collect()
}

/// One rule `(w(ρ), (ρ,+,id), id)` per relator, plus the free
/// cancellation rules of any formal inverse letters with empty witnesses.
pub fn initial_eirs(gp: &GroupPresentation) -> Result<Vec<EirsRule>, IdrelError> {
    let mut out = Vec::new();
    for (l, r) in &gp.rules {
        let labelled = r.is_empty() && gp.relators.iter().any(|(_, w)| w == l);
        if !labelled && to_fg(gp, l) != to_fg(gp, r) {
            return Err(IdrelError::UnlabelledRelation);
        }
    }
    for (k, (label, w)) in gp.relators.iter().enumerate() {
        if w.is_empty() {
            return Err(IdrelError::EmptyRelator(label.clone()));
        }
        out.push(EirsRule { lhs: w.clone(), witness: YSeq::single(k, 1, FGWord::id()), rhs: Vec::new() });
    }
    for (l, r) in &gp.rules {
        if to_fg(gp, l) == to_fg(gp, r) && l != r {
            out.push(EirsRule { lhs: l.clone(), witness: YSeq::empty(), rhs: r.clone() });
        }
    }
    Ok(out)
}

fn find_redex(w: &[usize], rules: &[EirsRule], skip: Option<usize>) -> Option<(usize, usize)> {
    for p in 0..w.len() {
        for (i, r) in rules.iter().enumerate() {
            if Some(i) != skip && !r.lhs.is_empty() && occurs_at(w, &r.lhs, p) {
                return Some((i, p));
            }
        }
    }
    None
}

fn reduce2_inner(gp: &GroupPresentation, w: &[usize], rules: &[EirsRule], skip: Option<usize>) -> (YSeq, Vec<usize>) {
    let mut c = YSeq::empty();
    let mut w = w.to_vec();
    while let Some((i, p)) = find_redex(&w, rules, skip) {
        let r = &rules[i];
        let u = to_fg(gp, &w[..p]);
        c = c.concat(&r.witness.act(&u.inverse()));
        let mut next = w[..p].to_vec();
        next.extend_from_slice(&r.rhs);
        next.extend_from_slice(&w[p + r.lhs.len()..]);
        w = next;
    }
    (c, w)
}

/// Leftmost reduction returning `(c, z)` with `w = δ(c)·z`.
pub fn reduce_word2(gp: &GroupPresentation, w: &[usize], eirs: &[EirsRule]) -> (YSeq, Vec<usize>) {
    reduce2_inner(gp, w, eirs, None)
}

/// Orients `z1 = δ(c)·z2` into a rule, or `None` if the sides are equal.
fn orient2(z1: Vec<usize>, c: YSeq, z2: Vec<usize>) -> Option<EirsRule> {
    match lenlex(&z1, &z2) {
        Ordering::Equal => None,
        Ordering::Greater => Some(EirsRule { lhs: z1, witness: c, rhs: z2 }),
        Ordering::Less => Some(EirsRule { lhs: z2, witness: c.invert(), rhs: z1 }),
    }
}

pub fn interreduce2(gp: &GroupPresentation, rules: Vec<EirsRule>) -> Vec<EirsRule> {
    let mut rs: Vec<EirsRule> = Vec::new();
    for r in rules {
        if let Some(o) = orient2(r.lhs, r.witness, r.rhs) {
            if !rs.iter().any(|x| x.pair() == o.pair()) {
                rs.push(o);
            }
        }
    }
    loop {
        let mut changed = false;
        let mut i = 0;
        while i < rs.len() {
            let (dl, l) = reduce2_inner(gp, &rs[i].lhs, &rs, Some(i));
            if l != rs[i].lhs {
                // lhs = δ(dl)·l and lhs = δ(c)·rhs = δ(c·dr)·r
                let (dr, r) = reduce2_inner(gp, &rs[i].rhs, &rs, Some(i));
                let c = dl.invert().concat(&rs[i].witness).concat(&dr);
                rs.remove(i);
                if let Some(o) = orient2(l, c, r) {
                    rs.push(o);
                }
                changed = true;
                continue;
            }
            let (dr, r) = reduce2_inner(gp, &rs[i].rhs, &rs, Some(i));
            if r != rs[i].rhs {
                rs[i].witness = rs[i].witness.concat(&dr);
                rs[i].rhs = r;
                changed = true;
            }
            i += 1;
        }
        if !changed {
            break;
        }
    }
    rs.sort_by(|a, b| lenlex(&a.lhs, &b.lhs).then_with(|| lenlex(&a.rhs, &b.rhs)));
    rs.dedup_by(|a, b| a.pair() == b.pair());
    rs
}

/// Knuth-Bendix completion carrying witnesses through every overlap.
pub fn kb2(gp: &GroupPresentation, eirs: Vec<EirsRule>, budget: CompletionBudget) -> Result<Vec<EirsRule>, IdrelError> {
    let mut rules = interreduce2(gp, eirs);
    for pass in 0..budget.max_passes {
        let cps = critical_pairs(&pairs(&rules));
        let base = rules.len();
        for cp in cps {
            let (i, j) = cp.rules;
            // term = u1 l1 v1 = u2 l2 v2, with rule i at 0
            let u2 = to_fg(gp, &cp.term[..cp.offset]);
            let e1 = rules[i].witness.clone();
            let e2 = rules[j].witness.act(&u2.inverse());
            debug_assert!(cp.kind == OverlapKind::Containment || cp.kind == OverlapKind::Boundary);
            let (d1, z1) = reduce_word2(gp, &cp.left, &rules);
            let (d2, z2) = reduce_word2(gp, &cp.right, &rules);
            // δ(e1 d1) z1 = δ(e2 d2) z2
            let c = d1.invert().concat(&e1.invert()).concat(&e2).concat(&d2);
            if let Some(o) = orient2(z1, c, z2) {
                rules.push(o);
                if rules.len() > budget.max_rules {
                    return Err(IdrelError::Budget { partial: interreduce2(gp, rules), passes: pass + 1 });
                }
            }
        }
        if rules.len() == base {
            return Ok(rules);
        }
        rules = interreduce2(gp, rules);
    }
    Err(IdrelError::Budget { partial: rules, passes: budget.max_passes })
}

// ---------------------------------------------------------------------------
// Contracting homotopy and identities

/// Everything needed to produce identities for a finite group.
#[derive(Debug, Clone)]
pub struct IdrelContext {
    pub gp: GroupPresentation,
    pub rels: Relators,
    pub eirs: Vec<EirsRule>,
    pub cayley: CayleyGraph,
    /// `N(g)` as a free-group word, per Cayley vertex.
    pub normal: Vec<FGWord>,
}

impl IdrelContext {
    pub fn new(gp: &GroupPresentation, budget: CompletionBudget, limit: usize) -> Result<IdrelContext, IdrelError> {
        let eirs = kb2(gp, initial_eirs(gp)?, budget)?;
        let cayley = build_cayley(&gp.letters, &pairs(&eirs), limit)?;
        let normal = cayley.labels.iter().map(|w| to_fg(gp, w)).collect();
        Ok(IdrelContext { gp: gp.clone(), rels: Relators::of(gp), eirs, cayley, normal })
    }

    pub fn order(&self) -> usize {
        self.cayley.len()
    }

    /// θ(u) as a Cayley vertex.
    pub fn theta(&self, u: &FGWord) -> usize {
        self.theta_from(0, u)
    }

    pub fn theta_from(&self, v: usize, u: &FGWord) -> usize {
        let syll: Vec<(usize, i64)> = u.0.iter().map(|&(g, e)| (g, e as i64)).collect();
        let mut v = v;
        for (g, e) in syll {
            v = self.cayley.step(v, g, e, InverseMode::Backwards).expect("letters are generators");
        }
        v
    }

    pub fn h0(&self, g: usize) -> FGWord {
        self.normal[g].inverse()
    }

    /// Witness `c` with `δ(c) = N(g)·x·N(g·x)⁻¹`; empty on tree edges.
    pub fn h1(&self, g: usize, x: usize) -> YSeq {
        let mut w = self.cayley.labels[g].clone();
        w.push(x);
        reduce_word2(&self.gp, &w, &self.eirs).0
    }

    /// The separation identity for vertex `g` and relator `r`.
    pub fn sep(&self, g: usize, r: usize) -> YSeq {
        let mut walk = YSeq::empty();
        let mut v = g;
        for &(x, e) in &self.rels.words[r].0 {
            if e > 0 {
                walk = walk.concat(&self.h1(v, x));
                v = self.cayley.next[v][x];
            } else {
                let u = self.cayley.step(v, x, -1, InverseMode::Backwards).expect("finite group");
                walk = walk.concat(&self.h1(u, x).invert());
                v = u;
            }
        }
        debug_assert_eq!(v, g);
        walk.invert().concat(&YSeq::single(r, 1, self.normal[g].inverse()))
    }

    pub fn generate_identities(&self) -> Vec<IdentityRecord> {
        let mut out = Vec::new();
        for g in 0..self.order() {
            for r in 0..self.rels.words.len() {
                out.push(IdentityRecord { vertex: g, relator: r, sequence: self.sep(g, r) });
            }
        }
        out
    }

    pub fn alpha(&self, a: &YSeq) -> GroupRingVector {
        let mut v = GroupRingVector::default();
        for t in &a.0 {
            v.add(t.rel, self.theta(&t.conj), t.sign as i64);
        }
        v
    }

    /// Pairs off terms with equal relator, equal θ-image and opposite sign.
    pub fn primary_identity_check(&self, a: &YSeq) -> Result<bool, IdrelError> {
        if !boundary(a, &self.rels)?.is_id() {
            return Err(IdrelError::NotIdentity);
        }
        let mut open: BTreeMap<(usize, usize), Vec<i8>> = BTreeMap::new();
        for t in &a.0 {
            let slot = open.entry((t.rel, self.theta(&t.conj))).or_default();
            if let Some(pos) = slot.iter().position(|&s| s == -t.sign) {
                slot.swap_remove(pos);
            } else {
                slot.push(t.sign);
            }
        }
        Ok(open.values().all(Vec::is_empty))
    }

    pub fn record(&self) -> IdRelRecord {
        let gens = &self.gp.generators;
        let idents: Vec<YSeq> = self.generate_identities().into_iter().map(|r| r.sequence).collect();
        let is_ids = idents.iter().all(|s| boundary(s, &self.rels).is_ok_and(|b| b.is_id()));
        IdRelRecord {
            free: gens.clone(),
            rels: self.rels.labels.iter().zip(&self.rels.words).map(|(l, w)| (l.clone(), w.text(gens))).collect(),
            el_f: (0..self.order()).map(|g| self.cayley.label_text(g)).collect(),
            k: self
                .eirs
                .iter()
                .map(|r| (word_text(&self.gp.letters, &r.lhs), word_text(&self.gp.letters, &r.rhs)))
                .collect(),
            idents: idents
                .iter()
                .map(|s| {
                    s.0.iter()
                        .map(|t| {
                            let l = &self.rels.labels[t.rel];
                            let rel = if t.sign < 0 { format!("{l}^-1") } else { l.clone() };
                            (rel, t.conj.text(gens))
                        })
                        .collect()
                })
                .collect(),
            is_ids_record: is_ids,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityRecord {
    pub vertex: usize,
    pub relator: usize,
    pub sequence: YSeq,
}

/// Serialized summary of an identity computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdRelRecord {
    pub free: Vec<String>,
    pub rels: Vec<(String, String)>,
    #[serde(rename = "elF")]
    pub el_f: Vec<String>,
    #[serde(rename = "K")]
    pub k: Vec<(String, String)>,
    pub idents: Vec<Vec<(String, String)>>,
    #[serde(rename = "isIdsRecord")]
    pub is_ids_record: bool,
}

/// An element of ℤG[R]: per relator, integer coefficients on group elements.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct GroupRingVector(pub BTreeMap<usize, BTreeMap<usize, i64>>);

impl GroupRingVector {
    pub fn add(&mut self, rel: usize, g: usize, k: i64) {
        let comp = self.0.entry(rel).or_default();
        let c = comp.entry(g).or_insert(0);
        *c += k;
        if *c == 0 {
            comp.remove(&g);
        }
        if comp.is_empty() {
            self.0.remove(&rel);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Right multiplication by θ(v).
    pub fn act(&self, ctx: &IdrelContext, v: &FGWord) -> GroupRingVector {
        let mut out = GroupRingVector::default();
        for (&r, comp) in &self.0 {
            for (&g, &k) in comp {
                out.add(r, ctx.theta_from(g, v), k);
            }
        }
        out
    }
}

/// All single Peiffer moves: `y⁻z⁺y⁺ → (z^{δy})⁺`, `y⁺z⁻y⁻ → (z^{δy})⁻`,
/// and cancellation of `y⁻y⁺`, `y⁺y⁻`.
pub fn peiffer_steps(a: &YSeq, rels: &Relators) -> Vec<YSeq> {
    let mut out = Vec::new();
    let v = &a.0;
    for i in 0..v.len() {
        if i + 1 < v.len() && v[i].rel == v[i + 1].rel && v[i].conj == v[i + 1].conj && v[i].sign == -v[i + 1].sign {
            let mut w = v[..i].to_vec();
            w.extend_from_slice(&v[i + 2..]);
            out.push(YSeq(w));
        }
        if i + 2 < v.len() {
            let (y, z, y2) = (&v[i], &v[i + 1], &v[i + 2]);
            if y.rel == y2.rel && y.conj == y2.conj && y.sign == -y2.sign && z.sign == y2.sign {
                let d = boundary(&YSeq(vec![y2.clone()]), rels).expect("known relator");
                let mut w = v[..i].to_vec();
                w.push(YTerm { rel: z.rel, sign: z.sign, conj: z.conj.mul(&d) });
                w.extend_from_slice(&v[i + 3..]);
                out.push(YSeq(w));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_reduction() {
        assert!(FGWord::new(vec![(0, 1), (0, -1)]).is_id());
        assert_eq!(FGWord::new(vec![(0, 1), (1, 1), (1, -1), (0, 1)]), FGWord(vec![(0, 1), (0, 1)]));
    }

    #[test]
    fn invert_reverses_and_flips() {
        let a = YSeq(vec![
            YTerm { rel: 0, sign: 1, conj: FGWord::id() },
            YTerm { rel: 1, sign: -1, conj: FGWord(vec![(0, 1)]) },
        ]);
        let b = YSeq(vec![
            YTerm { rel: 1, sign: 1, conj: FGWord(vec![(0, 1)]) },
            YTerm { rel: 0, sign: -1, conj: FGWord::id() },
        ]);
        assert_eq!(a.invert(), b);
        assert_eq!(a.concat(&YSeq::empty()), a);
    }

    #[test]
    fn fg_text() {
        let w = FGWord::from_syllables(&[(0, -2), (1, 1)]);
        assert_eq!(w.text(&["x", "y"]), "x^-2y");
    }
}
