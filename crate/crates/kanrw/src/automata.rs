//! Acceptors for irreducible terms and monomials, determinization,
//! completion, complement, and regular expressions via Arden's rule.

use crate::kan::{is_t_rule, KanPresentation, MixedRewriteSystem, Sym};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("complement needs a complete automaton")]
    Incomplete,
    #[error("regex parse error at byte {0}: {1}")]
    Parse(usize, String),
    #[error("identity in a loop coefficient")]
    IdentityLoop,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Nfa {
    pub states: Vec<String>,
    pub letters: Vec<String>,
    pub initial: BTreeSet<usize>,
    /// `delta[state][letter]` is a set of states.
    pub delta: Vec<Vec<BTreeSet<usize>>>,
    pub terminal: BTreeSet<usize>,
    /// A terminal sink; subsets containing it collapse to it.
    pub absorbing: Option<usize>,
}

impl Nfa {
    pub fn step(&self, set: &BTreeSet<usize>, letter: usize) -> BTreeSet<usize> {
        let mut out: BTreeSet<usize> = set.iter().flat_map(|&s| self.delta[s][letter].iter().copied()).collect();
        if let Some(d) = self.absorbing {
            if out.contains(&d) {
                out = BTreeSet::from([d]);
            }
        }
        out
    }

    pub fn accepts(&self, w: &[usize]) -> bool {
        let mut set = self.initial.clone();
        for &a in w {
            set = self.step(&set, a);
        }
        set.iter().any(|s| self.terminal.contains(s))
    }

    /// Each transition rendered as a sorted label list, or the sink label.
    pub fn table(&self) -> BTreeMap<String, BTreeMap<String, String>> {
        let mut out = BTreeMap::new();
        for (s, row) in self.delta.iter().enumerate() {
            let mut r = BTreeMap::new();
            for (a, set) in row.iter().enumerate() {
                let text = match self.absorbing {
                    Some(d) if set.contains(&d) => self.states[d].clone(),
                    _ => {
                        let mut names: Vec<&str> = set.iter().map(|&t| self.states[t].as_str()).collect();
                        names.sort();
                        names.join(",")
                    }
                };
                r.insert(self.letters[a].clone(), text);
            }
            out.insert(self.states[s].clone(), r);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dfa {
    pub states: Vec<String>,
    pub letters: Vec<String>,
    pub initial: usize,
    pub delta: Vec<Vec<Option<usize>>>,
    pub terminal: Vec<bool>,
    /// The NFA states each state stands for, when built by subset construction.
    pub subsets: Vec<BTreeSet<usize>>,
}

impl Dfa {
    pub fn run(&self, w: &[usize]) -> Option<usize> {
        w.iter().try_fold(self.initial, |s, &a| self.delta[s][a])
    }

    pub fn accepts(&self, w: &[usize]) -> bool {
        self.run(w).is_some_and(|s| self.terminal[s])
    }

    pub fn is_complete(&self) -> bool {
        self.delta.iter().all(|row| row.iter().all(Option::is_some))
    }

    /// States from which some terminal state is reachable.
    pub fn live(&self) -> Vec<bool> {
        let mut live = self.terminal.clone();
        loop {
            let mut changed = false;
            for s in 0..self.states.len() {
                if !live[s] && self.delta[s].iter().flatten().any(|&t| live[t]) {
                    live[s] = true;
                    changed = true;
                }
            }
            if !changed {
                return live;
            }
        }
    }
}

/// Subset construction, exploring letters in alphabet order breadth first.
pub fn determinize(nfa: &Nfa) -> Dfa {
    let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::new();
    let mut subsets = vec![nfa.initial.clone()];
    index.insert(nfa.initial.clone(), 0);
    let mut delta: Vec<Vec<Option<usize>>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let mut row = vec![None; nfa.letters.len()];
        for (a, slot) in row.iter_mut().enumerate() {
            let t = nfa.step(&subsets[s], a);
            if t.is_empty() {
                continue;
            }
            let id = *index.entry(t.clone()).or_insert_with(|| {
                subsets.push(t);
                queue.push_back(subsets.len() - 1);
                subsets.len() - 1
            });
            *slot = Some(id);
        }
        if delta.len() <= s {
            delta.resize(s + 1, Vec::new());
        }
        delta[s] = row;
    }
    let states = subsets
        .iter()
        .map(|set| format!("{{{}}}", set.iter().map(|&q| nfa.states[q].as_str()).collect::<Vec<_>>().join(",")))
        .collect();
    let terminal = subsets.iter().map(|set| set.iter().any(|q| nfa.terminal.contains(q))).collect();
    Dfa { states, letters: nfa.letters.clone(), initial: 0, delta, terminal, subsets }
}

/// Adds a non-terminal dump state when some transition is missing.
pub fn complete_dfa(dfa: &Dfa) -> Dfa {
    if dfa.is_complete() {
        return dfa.clone();
    }
    let mut out = dfa.clone();
    let dump = out.states.len();
    out.states.push("dump".into());
    out.terminal.push(false);
    out.subsets.push(BTreeSet::new());
    out.delta.push(vec![Some(dump); out.letters.len()]);
    for row in out.delta.iter_mut() {
        for t in row.iter_mut() {
            t.get_or_insert(dump);
        }
    }
    out
}

pub fn complement_dfa(dfa: &Dfa) -> Result<Dfa, AutomatonError> {
    if !dfa.is_complete() {
        return Err(AutomatonError::Incomplete);
    }
    let mut out = dfa.clone();
    out.terminal.iter_mut().for_each(|t| *t = !*t);
    Ok(out)
}

/// Repeatedly merges states with equal terminality and equal rows.
/// `class` keeps states with different labels apart.
pub fn glue(dfa: &Dfa, class: &[Option<usize>]) -> (Dfa, Vec<Option<usize>>) {
    let mut rep: Vec<usize> = (0..dfa.states.len()).collect();
    loop {
        let mut seen: HashMap<(bool, Option<usize>, Vec<Option<usize>>), usize> = HashMap::new();
        let mut next = rep.clone();
        for s in 0..dfa.states.len() {
            if rep[s] != s {
                continue;
            }
            let row = dfa.delta[s].iter().map(|t| t.map(|t| rep[t])).collect();
            let key = (dfa.terminal[s], class[s], row);
            let r = *seen.entry(key).or_insert(s);
            next[s] = r;
        }
        for s in 0..dfa.states.len() {
            next[s] = next[rep[s]];
        }
        if next == rep {
            break;
        }
        rep = next;
    }
    let kept: Vec<usize> = (0..dfa.states.len()).filter(|&s| rep[s] == s).collect();
    let new_id: HashMap<usize, usize> = kept.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let out = Dfa {
        states: kept.iter().map(|&s| dfa.states[s].clone()).collect(),
        letters: dfa.letters.clone(),
        initial: new_id[&rep[dfa.initial]],
        delta: kept.iter().map(|&s| dfa.delta[s].iter().map(|t| t.map(|t| new_id[&rep[t]])).collect()).collect(),
        terminal: kept.iter().map(|&s| dfa.terminal[s]).collect(),
        subsets: kept.iter().map(|&s| dfa.subsets[s].clone()).collect(),
    };
    (out, kept.iter().map(|&s| class[s]).collect())
}

// ---------------------------------------------------------------------------
// Regular expressions

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum Regex {
    Empty,
    Id,
    Letter(usize),
    Concat(Vec<Regex>),
    Union(Vec<Regex>),
    Star(Box<Regex>),
}

impl Regex {
    pub fn concat(parts: impl IntoIterator<Item = Regex>) -> Regex {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Regex::Empty => return Regex::Empty,
                Regex::Id => {}
                Regex::Concat(v) => out.extend(v),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Regex::Id,
            1 => out.pop().unwrap(),
            _ => Regex::Concat(out),
        }
    }

    pub fn union(parts: impl IntoIterator<Item = Regex>) -> Regex {
        let mut out: Vec<Regex> = Vec::new();
        for p in parts {
            let items = match p {
                Regex::Empty => vec![],
                Regex::Union(v) => v,
                other => vec![other],
            };
            for i in items {
                if !out.contains(&i) {
                    out.push(i);
                }
            }
        }
        // id is redundant beside a star
        if out.iter().any(|r| matches!(r, Regex::Star(_))) {
            out.retain(|r| *r != Regex::Id);
        }
        match out.len() {
            0 => Regex::Empty,
            1 => out.pop().unwrap(),
            _ => Regex::Union(out),
        }
    }

    pub fn star(r: Regex) -> Regex {
        match r {
            Regex::Empty | Regex::Id => Regex::Id,
            Regex::Star(_) => r,
            other => Regex::Star(Box::new(other)),
        }
    }

    pub fn text<S: AsRef<str>>(&self, names: &[S]) -> String {
        match self {
            Regex::Empty => "∅".into(),
            Regex::Id => "id".into(),
            Regex::Letter(a) => names[*a].as_ref().to_string(),
            Regex::Concat(v) => v
                .iter()
                .map(|r| match r {
                    Regex::Union(_) => format!("({})", r.text(names)),
                    _ => r.text(names),
                })
                .collect(),
            Regex::Union(v) => v.iter().map(|r| r.text(names)).collect::<Vec<_>>().join("+"),
            Regex::Star(r) => match **r {
                Regex::Letter(_) => format!("{}*", r.text(names)),
                _ => format!("({})*", r.text(names)),
            },
        }
    }

    /// True when the language is infinite.
    pub fn has_star(&self) -> bool {
        match self {
            Regex::Star(_) => true,
            Regex::Concat(v) | Regex::Union(v) => v.iter().any(Regex::has_star),
            _ => false,
        }
    }

    /// Parses `+`, `*`, juxtaposition, parentheses, `^k` powers, `id`
    /// and `∅`; a `|` separator is ignored. Letter names match greedily.
    pub fn parse<S: AsRef<str>>(text: &str, names: &[S]) -> Result<Regex, AutomatonError> {
        let mut p = Parser { s: text, pos: 0, names: names.iter().map(|n| n.as_ref().to_string()).collect() };
        let r = p.union()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(AutomatonError::Parse(p.pos, "trailing input".into()));
        }
        Ok(r)
    }
}

struct Parser<'a> {
    s: &'a str,
    pos: usize,
    names: Vec<String>,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.s[self.pos..].chars().next() {
            if c.is_whitespace() || c == '|' {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.s[self.pos..].chars().next()
    }

    fn union(&mut self) -> Result<Regex, AutomatonError> {
        let mut parts = vec![self.concat()?];
        while self.peek() == Some('+') {
            self.pos += 1;
            parts.push(self.concat()?);
        }
        Ok(Regex::union(parts))
    }

    fn concat(&mut self) -> Result<Regex, AutomatonError> {
        let mut parts = Vec::new();
        while let Some(c) = self.peek() {
            if c == '+' || c == ')' {
                break;
            }
            parts.push(self.postfix()?);
        }
        if parts.is_empty() {
            return Err(AutomatonError::Parse(self.pos, "empty term".into()));
        }
        Ok(Regex::concat(parts))
    }

    fn postfix(&mut self) -> Result<Regex, AutomatonError> {
        let mut r = self.atom()?;
        loop {
            match self.s[self.pos..].chars().next() {
                Some('*') => {
                    self.pos += 1;
                    r = Regex::star(r);
                }
                Some('^') => {
                    self.pos += 1;
                    if self.s[self.pos..].starts_with('*') {
                        self.pos += 1;
                        r = Regex::star(r);
                        continue;
                    }
                    let digits: String = self.s[self.pos..].chars().take_while(|c| c.is_ascii_digit()).collect();
                    let k: usize = digits.parse().map_err(|_| AutomatonError::Parse(self.pos, "bad power".into()))?;
                    self.pos += digits.len();
                    r = Regex::concat(std::iter::repeat(r).take(k));
                }
                _ => return Ok(r),
            }
        }
    }

    fn atom(&mut self) -> Result<Regex, AutomatonError> {
        let rest = &self.s[self.pos..];
        if rest.starts_with('(') {
            self.pos += 1;
            let r = self.union()?;
            if self.peek() != Some(')') {
                return Err(AutomatonError::Parse(self.pos, "expected `)`".into()));
            }
            self.pos += 1;
            return Ok(r);
        }
        let best = self
            .names
            .iter()
            .enumerate()
            .filter(|(_, n)| !n.is_empty() && rest.starts_with(n.as_str()))
            .max_by_key(|(_, n)| n.len());
        if let Some((i, n)) = best {
            self.pos += n.len();
            return Ok(Regex::Letter(i));
        }
        for (kw, r) in [("id", Regex::Id), ("∅", Regex::Empty), ("1", Regex::Id)] {
            if rest.starts_with(kw) {
                self.pos += kw.len();
                return Ok(r);
            }
        }
        Err(AutomatonError::Parse(self.pos, "unknown token".into()))
    }
}

/// Thompson automaton of a regex.
#[derive(Debug, Clone)]
pub struct CompiledRegex {
    eps: Vec<Vec<usize>>,
    edges: Vec<Vec<(usize, usize)>>,
    start: usize,
    accept: usize,
    live: Vec<bool>,
}

impl CompiledRegex {
    pub fn new(r: &Regex) -> CompiledRegex {
        let mut c = CompiledRegex { eps: Vec::new(), edges: Vec::new(), start: 0, accept: 0, live: Vec::new() };
        let (s, f) = c.build(r);
        c.start = s;
        c.accept = f;
        let n = c.eps.len();
        let mut live = vec![false; n];
        live[f] = true;
        loop {
            let mut changed = false;
            for q in 0..n {
                if !live[q] && (c.eps[q].iter().any(|&t| live[t]) || c.edges[q].iter().any(|&(_, t)| live[t])) {
                    live[q] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        c.live = live;
        c
    }

    fn node(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.edges.push(Vec::new());
        self.eps.len() - 1
    }

    fn build(&mut self, r: &Regex) -> (usize, usize) {
        let s = self.node();
        let f = self.node();
        match r {
            Regex::Empty => {}
            Regex::Id => self.eps[s].push(f),
            Regex::Letter(a) => self.edges[s].push((*a, f)),
            Regex::Concat(v) => {
                let mut cur = s;
                for part in v {
                    let (ps, pf) = self.build(part);
                    self.eps[cur].push(ps);
                    cur = pf;
                }
                self.eps[cur].push(f);
            }
            Regex::Union(v) => {
                for part in v {
                    let (ps, pf) = self.build(part);
                    self.eps[s].push(ps);
                    self.eps[pf].push(f);
                }
            }
            Regex::Star(inner) => {
                let (ps, pf) = self.build(inner);
                self.eps[s].push(ps);
                self.eps[s].push(f);
                self.eps[pf].push(ps);
                self.eps[pf].push(f);
            }
        }
        (s, f)
    }

    fn closure(&self, mut set: BTreeSet<usize>) -> BTreeSet<usize> {
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &t in &self.eps[q] {
                if set.insert(t) {
                    stack.push(t);
                }
            }
        }
        set.retain(|&q| self.live[q]);
        set
    }
}

/// A deterministic view of an automaton, for word-by-word comparison.
pub trait Recognizer {
    type State: Clone;
    fn start(&self) -> Self::State;
    fn step(&self, s: &Self::State, letter: usize) -> Self::State;
    fn accepting(&self, s: &Self::State) -> bool;
    /// True only if no extension can be accepted.
    fn dead(&self, s: &Self::State) -> bool;
}

impl Recognizer for CompiledRegex {
    type State = BTreeSet<usize>;
    fn start(&self) -> Self::State {
        self.closure(BTreeSet::from([self.start]))
    }
    fn step(&self, s: &Self::State, letter: usize) -> Self::State {
        let next = s
            .iter()
            .flat_map(|&q| self.edges[q].iter().filter(move |(a, _)| *a == letter).map(|&(_, t)| t))
            .collect();
        self.closure(next)
    }
    fn accepting(&self, s: &Self::State) -> bool {
        s.contains(&self.accept)
    }
    fn dead(&self, s: &Self::State) -> bool {
        s.is_empty()
    }
}

/// A DFA paired with its live-state table.
pub struct DfaRecognizer<'a> {
    pub dfa: &'a Dfa,
    live: Vec<bool>,
}

impl<'a> DfaRecognizer<'a> {
    pub fn new(dfa: &'a Dfa) -> Self {
        DfaRecognizer { live: dfa.live(), dfa }
    }
}

impl Recognizer for DfaRecognizer<'_> {
    type State = Option<usize>;
    fn start(&self) -> Self::State {
        Some(self.dfa.initial)
    }
    fn step(&self, s: &Self::State, letter: usize) -> Self::State {
        s.and_then(|s| self.dfa.delta[s][letter])
    }
    fn accepting(&self, s: &Self::State) -> bool {
        s.is_some_and(|s| self.dfa.terminal[s])
    }
    fn dead(&self, s: &Self::State) -> bool {
        s.map_or(true, |s| !self.live[s])
    }
}

pub fn regex_membership(r: &Regex, w: &[usize]) -> bool {
    let c = CompiledRegex::new(r);
    let mut s = c.start();
    for &a in w {
        s = c.step(&s, a);
    }
    c.accepting(&s)
}

/// Checks every word of length at most `max_len` over `letters` letters,
/// skipping only subtrees where both machines are dead. Returns the first
/// word on which they disagree, and the number of words decided explicitly.
pub fn first_disagreement<A: Recognizer, B: Recognizer>(
    a: &A,
    b: &B,
    letters: usize,
    max_len: usize,
) -> (Option<Vec<usize>>, usize) {
    let mut checked = 0usize;
    let mut stack = vec![(Vec::new(), a.start(), b.start())];
    while let Some((w, sa, sb)) = stack.pop() {
        checked += 1;
        if a.accepting(&sa) != b.accepting(&sb) {
            return (Some(w), checked);
        }
        if w.len() == max_len || (a.dead(&sa) && b.dead(&sb)) {
            continue;
        }
        for l in (0..letters).rev() {
            let mut v = w.clone();
            v.push(l);
            stack.push((v, a.step(&sa, l), b.step(&sb, l)));
        }
    }
    (None, checked)
}

/// Solves `X_i = Σ A_ij X_j + E_i` for the DFA with the given terminal
/// states, eliminating from the highest index down with Arden's rule.
pub fn solve_arden(dfa: &Dfa, terminal: &[bool]) -> Result<Regex, AutomatonError> {
    let probe = Dfa { terminal: terminal.to_vec(), ..dfa.clone() };
    let live = probe.live();
    let n = dfa.states.len();
    let mut coeff: Vec<BTreeMap<usize, Regex>> = vec![BTreeMap::new(); n];
    let mut constant: Vec<Regex> = vec![Regex::Empty; n];
    for s in 0..n {
        if !live[s] {
            continue;
        }
        let mut by_target: BTreeMap<usize, Vec<Regex>> = BTreeMap::new();
        for (a, t) in dfa.delta[s].iter().enumerate() {
            if let Some(t) = *t {
                if live[t] {
                    by_target.entry(t).or_default().push(Regex::Letter(a));
                }
            }
        }
        coeff[s] = by_target.into_iter().map(|(t, v)| (t, Regex::union(v))).collect();
        if terminal[s] {
            constant[s] = Regex::Id;
        }
    }
    if !live[dfa.initial] {
        return Ok(Regex::Empty);
    }
    let order = bfs_order(dfa, &live);
    let pos: HashMap<usize, usize> = order.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    for k in (0..order.len()).rev() {
        let sk = order[k];
        let own = coeff[sk].remove(&sk);
        if own.as_ref() == Some(&Regex::Id) {
            return Err(AutomatonError::IdentityLoop);
        }
        let loop_star = own.map_or(Regex::Id, Regex::star);
        let rest: Vec<(usize, Regex)> =
            std::mem::take(&mut coeff[sk]).into_iter().map(|(j, c)| (j, Regex::concat([loop_star.clone(), c]))).collect();
        let ck = Regex::concat([loop_star, constant[sk].clone()]);
        coeff[sk] = rest.iter().cloned().collect();
        constant[sk] = ck.clone();
        for &si in order.iter().take(k) {
            if let Some(c) = coeff[si].remove(&sk) {
                for (j, cj) in &rest {
                    let add = Regex::concat([c.clone(), cj.clone()]);
                    let e = coeff[si].entry(*j).or_insert(Regex::Empty);
                    *e = Regex::union([e.clone(), add]);
                }
                constant[si] = Regex::union([constant[si].clone(), Regex::concat([c, ck.clone()])]);
            }
        }
        debug_assert!(coeff[sk].keys().all(|j| pos[j] < k));
    }
    Ok(constant[dfa.initial].clone())
}

fn bfs_order(dfa: &Dfa, live: &[bool]) -> Vec<usize> {
    let mut order = vec![dfa.initial];
    let mut seen = HashSet::from([dfa.initial]);
    let mut i = 0;
    while i < order.len() {
        for t in dfa.delta[order[i]].iter().flatten() {
            if live[*t] && seen.insert(*t) {
                order.push(*t);
            }
        }
        i += 1;
    }
    order
}

// ---------------------------------------------------------------------------
// Kan acceptors

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum NState {
    Start,
    Object(usize),
    Tag(usize),
    TPrefix(Vec<Sym>),
    PPrefix(Vec<usize>),
    Dump,
}

/// The reducibility automaton with the τ-class of each state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducibilityNfa {
    pub nfa: Nfa,
    pub class: Vec<Option<usize>>,
}

pub fn letter_of(pres: &KanPresentation, s: Sym) -> usize {
    match s {
        Sym::Tag(x) => x,
        Sym::Arr(b) => pres.elements.len() + b,
    }
}

pub fn sym_of(pres: &KanPresentation, letter: usize) -> Sym {
    if letter < pres.elements.len() {
        Sym::Tag(letter)
    } else {
        Sym::Arr(letter - pres.elements.len())
    }
}

/// Accepts the words that are not irreducible tagged terms: ill-typed
/// strings and strings containing a rule lhs.
pub fn build_reducibility_nfa(pres: &KanPresentation, r: &MixedRewriteSystem) -> ReducibilityNfa {
    let d = &pres.delta;
    let lhs: HashSet<Vec<Sym>> = r.rules.iter().map(|(l, _)| l.clone()).collect();
    let mut t_prefixes: BTreeSet<Vec<Sym>> = BTreeSet::new();
    let mut p_prefixes: BTreeSet<Vec<usize>> = BTreeSet::new();
    for rule in &r.rules {
        let l = &rule.0;
        if is_t_rule(rule) {
            for k in 2..l.len() {
                t_prefixes.insert(l[..k].to_vec());
            }
        } else {
            let arrows: Vec<usize> = l.iter().map(|s| if let Sym::Arr(b) = s { *b } else { unreachable!() }).collect();
            for k in 1..arrows.len() {
                p_prefixes.insert(arrows[..k].to_vec());
            }
        }
    }
    let mut states = vec![NState::Start];
    states.extend((0..d.objects.len()).map(NState::Object));
    states.extend((0..pres.elements.len()).map(NState::Tag));
    states.extend(t_prefixes.iter().cloned().map(NState::TPrefix));
    states.extend(p_prefixes.iter().cloned().map(NState::PPrefix));
    states.push(NState::Dump);
    let id: HashMap<NState, usize> = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let dump = id[&NState::Dump];
    let alphabet = pres.alphabet();
    let p_lhs = |w: &[usize]| lhs.contains(&w.iter().map(|&b| Sym::Arr(b)).collect::<Vec<_>>());

    let object_step = |o: usize, b: usize| -> BTreeSet<usize> {
        if d.arrows[b].src != o || p_lhs(&[b]) {
            return BTreeSet::from([dump]);
        }
        let mut out = BTreeSet::from([id[&NState::Object(d.arrows[b].tgt)]]);
        if p_prefixes.contains(&vec![b]) {
            out.insert(id[&NState::PPrefix(vec![b])]);
        }
        out
    };
    let tagged_step = |prefix: &[Sym], tau: usize, b: usize| -> BTreeSet<usize> {
        let mut ext = prefix.to_vec();
        ext.push(Sym::Arr(b));
        if d.arrows[b].src != tau || lhs.contains(&ext) {
            return BTreeSet::from([dump]);
        }
        let mut out = object_step(tau, b);
        if t_prefixes.contains(&ext) {
            out.insert(id[&NState::TPrefix(ext)]);
        }
        out
    };

    let mut delta = Vec::new();
    let mut class = Vec::new();
    for s in &states {
        let row: Vec<BTreeSet<usize>> = alphabet
            .iter()
            .map(|&a| match (s, a) {
                (NState::Start, Sym::Tag(x)) => {
                    if lhs.contains(&vec![Sym::Tag(x)]) {
                        BTreeSet::from([dump])
                    } else {
                        BTreeSet::from([id[&NState::Tag(x)]])
                    }
                }
                (NState::Object(o), Sym::Arr(b)) => object_step(*o, b),
                (NState::Tag(x), Sym::Arr(b)) => tagged_step(&[Sym::Tag(*x)], pres.tag_object(*x), b),
                (NState::TPrefix(p), Sym::Arr(b)) => {
                    let tau = match p.last() {
                        Some(Sym::Arr(c)) => d.arrows[*c].tgt,
                        _ => unreachable!(),
                    };
                    tagged_step(p, tau, b)
                }
                (NState::PPrefix(p), Sym::Arr(b)) => {
                    let mut ext = p.clone();
                    ext.push(b);
                    if d.arrows[*p.last().unwrap()].tgt != d.arrows[b].src || p_lhs(&ext) {
                        BTreeSet::from([dump])
                    } else {
                        let mut out = BTreeSet::from([id[&NState::Object(d.arrows[b].tgt)]]);
                        if p_prefixes.contains(&ext) {
                            out.insert(id[&NState::PPrefix(ext)]);
                        }
                        out
                    }
                }
                _ => BTreeSet::from([dump]),
            })
            .collect();
        delta.push(row);
        class.push(match s {
            NState::Start | NState::Dump => None,
            NState::Object(o) => Some(*o),
            NState::Tag(x) => Some(pres.tag_object(*x)),
            NState::TPrefix(p) => match p.last() {
                Some(Sym::Arr(c)) => Some(d.arrows[*c].tgt),
                _ => None,
            },
            NState::PPrefix(p) => Some(d.arrows[*p.last().unwrap()].tgt),
        });
    }
    let label = |s: &NState| match s {
        NState::Start => "s0".to_string(),
        NState::Object(o) => d.objects[*o].clone(),
        NState::Tag(x) => pres.elements[*x].clone(),
        NState::TPrefix(p) => pres.sym_text(p),
        NState::PPrefix(p) => p.iter().map(|&b| d.arrows[b].label.as_str()).collect(),
        NState::Dump => "D".to_string(),
    };
    let nfa = Nfa {
        states: states.iter().map(label).collect(),
        letters: pres.letter_names(),
        initial: BTreeSet::from([0]),
        delta,
        terminal: BTreeSet::from([0, dump]),
        absorbing: Some(dump),
    };
    ReducibilityNfa { nfa, class }
}

/// Deterministic acceptor of irreducible terms with per-state τ-classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KanAcceptor {
    pub dfa: Dfa,
    pub class: Vec<Option<usize>>,
}

pub fn irreducible_acceptor(pres: &KanPresentation, r: &MixedRewriteSystem) -> KanAcceptor {
    let red = build_reducibility_nfa(pres, r);
    let dfa = determinize(&red.nfa);
    let class = dfa
        .subsets
        .iter()
        .map(|set| {
            let mut cs = set.iter().filter_map(|&q| red.class[q]);
            let first = cs.next();
            debug_assert!(cs.all(|c| Some(c) == first));
            first
        })
        .collect();
    let dfa = complement_dfa(&complete_dfa(&dfa)).expect("completed");
    KanAcceptor { dfa, class }
}

/// Regular expression for the irreducible terms with τ = `b`.
pub fn regex_for_object(acc: &KanAcceptor, b: usize) -> Result<Regex, AutomatonError> {
    let terminal: Vec<bool> = (0..acc.dfa.states.len()).map(|s| acc.dfa.terminal[s] && acc.class[s] == Some(b)).collect();
    solve_arden(&acc.dfa, &terminal)
}

// ---------------------------------------------------------------------------
// Monomial acceptors

/// DFA of words with no factor in `monomials`, and a regex for them.
pub fn build_monomial_acceptor(monomials: &[Vec<usize>], letters: &[String]) -> (Dfa, Regex) {
    let pats: HashSet<&[usize]> = monomials.iter().map(Vec::as_slice).collect();
    let mut prefixes: BTreeSet<Vec<usize>> = BTreeSet::new();
    for m in monomials {
        for k in 1..m.len() {
            prefixes.insert(m[..k].to_vec());
        }
    }
    let mut names = vec!["root".to_string()];
    let mut id: HashMap<Vec<usize>, usize> = HashMap::new();
    for p in &prefixes {
        id.insert(p.clone(), names.len());
        names.push(p.iter().map(|&a| letters[a].as_str()).collect());
    }
    let dump = names.len();
    names.push("D".into());
    let step = |p: &[usize], a: usize, from_root: bool| -> BTreeSet<usize> {
        let mut ext = p.to_vec();
        ext.push(a);
        let mut out = BTreeSet::new();
        if from_root {
            out.insert(0);
        }
        if pats.contains(ext.as_slice()) {
            out.insert(dump);
        } else if let Some(&q) = id.get(&ext) {
            out.insert(q);
        }
        out
    };
    let mut delta = vec![(0..letters.len()).map(|a| step(&[], a, true)).collect::<Vec<_>>()];
    for p in &prefixes {
        delta.push((0..letters.len()).map(|a| step(p, a, false)).collect());
    }
    delta.push(vec![BTreeSet::from([dump]); letters.len()]);
    let initial = if pats.contains(&[][..]) { BTreeSet::from([dump]) } else { BTreeSet::from([0]) };
    let nfa = Nfa {
        states: names,
        letters: letters.to_vec(),
        initial,
        delta,
        terminal: BTreeSet::from([dump]),
        absorbing: Some(dump),
    };
    let dfa = complement_dfa(&complete_dfa(&determinize(&nfa))).expect("completed");
    let regex = solve_arden(&dfa, &dfa.terminal).expect("no identity loops");
    (dfa, regex)
}

/// Words accepted by a DFA, or `None` if the language is infinite.
pub fn finite_language(dfa: &Dfa) -> Option<Vec<Vec<usize>>> {
    let live = dfa.live();
    // a cycle through live states means infinitely many words
    let n = dfa.states.len();
    let mut colour = vec![0u8; n];
    fn cyclic(s: usize, dfa: &Dfa, live: &[bool], colour: &mut [u8]) -> bool {
        colour[s] = 1;
        for t in dfa.delta[s].iter().flatten() {
            if !live[*t] {
                continue;
            }
            if colour[*t] == 1 || (colour[*t] == 0 && cyclic(*t, dfa, live, colour)) {
                return true;
            }
        }
        colour[s] = 2;
        false
    }
    if live[dfa.initial] && cyclic(dfa.initial, dfa, &live, &mut colour) {
        return None;
    }
    let mut out = Vec::new();
    let mut queue = VecDeque::from([(Vec::new(), dfa.initial)]);
    while let Some((w, s)) = queue.pop_front() {
        if !live[s] {
            continue;
        }
        if dfa.terminal[s] {
            out.push(w.clone());
        }
        for (a, t) in dfa.delta[s].iter().enumerate() {
            if let Some(t) = t {
                let mut v = w.clone();
                v.push(a);
                queue.push_back((v, *t));
            }
        }
    }
    Some(out)
}

impl fmt::Display for Dfa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, row) in self.delta.iter().enumerate() {
            write!(f, "{}{}:", s, if self.terminal[s] { "*" } else { "" })?;
            for (a, t) in row.iter().enumerate() {
                if let Some(t) = t {
                    write!(f, " {}->{}", self.letters[a], t)?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
