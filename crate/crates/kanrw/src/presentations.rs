//! Graphs, typed path words, length-lex order, plain two-sided rewriting and
//! Knuth-Bendix completion for category, monoid and group presentations.
//!
//! The rewriting engine is generic over the letter type so the same code
//! drives path rewriting here and tagged-term rewriting in [`crate::kan`].

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("duplicate symbol `{0}`")]
    Duplicate(String),
    #[error("relation {index}: {reason}")]
    IllTyped { index: usize, reason: String },
    #[error("path is not composable at position {0}")]
    NotComposable(usize),
    #[error("identity path needs an `at` object")]
    MissingAt,
    #[error("inverse letter `{0}` used without inverse generators")]
    NoInverse(String),
    #[error("cannot parse `{0}`")]
    Syntax(String),
}

/// Budget for completion procedures, which need not terminate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionBudget {
    pub max_rules: usize,
    pub max_passes: usize,
}

impl Default for CompletionBudget {
    fn default() -> Self {
        CompletionBudget { max_rules: 10_000, max_passes: 100 }
    }
}

/// An oriented rewrite rule on words, `lhs -> rhs`.
pub type Rule<S> = (Vec<S>, Vec<S>);

/// Length-lex: longer is greater, then letterwise.
pub fn lenlex<S: Ord>(a: &[S], b: &[S]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Orders a pair so the larger side is the left side. `None` when equal.
pub fn orient<S: Ord>(a: Vec<S>, b: Vec<S>) -> Option<Rule<S>> {
    match lenlex(&a, &b) {
        Ordering::Greater => Some((a, b)),
        Ordering::Less => Some((b, a)),
        Ordering::Equal => None,
    }
}

pub fn occurs_at<S: Eq>(w: &[S], pat: &[S], i: usize) -> bool {
    i + pat.len() <= w.len() && &w[i..i + pat.len()] == pat
}

pub fn find_factor<S: Eq>(w: &[S], pat: &[S]) -> Option<usize> {
    if pat.len() > w.len() {
        return None;
    }
    (0..=w.len() - pat.len()).find(|&i| occurs_at(w, pat, i))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

fn find_redex<S: Eq>(
    w: &[S],
    rules: &[Rule<S>],
    skip: Option<usize>,
    strategy: Strategy,
) -> Option<(usize, usize)> {
    let positions: Box<dyn Iterator<Item = usize>> = match strategy {
        Strategy::Leftmost => Box::new(0..w.len()),
        Strategy::Rightmost => Box::new((0..w.len()).rev()),
    };
    for i in positions {
        for (k, (l, _)) in rules.iter().enumerate() {
            if Some(k) != skip && !l.is_empty() && occurs_at(w, l, i) {
                return Some((i, k));
            }
        }
    }
    None
}

fn reduce_inner<S: Eq + Clone>(
    w: &[S],
    rules: &[Rule<S>],
    skip: Option<usize>,
    strategy: Strategy,
) -> Vec<S> {
    let mut w = w.to_vec();
    while let Some((i, k)) = find_redex(&w, rules, skip, strategy) {
        let (l, r) = &rules[k];
        w.splice(i..i + l.len(), r.iter().cloned());
    }
    w
}

/// Reduces as far as possible, always rewriting the leftmost redex.
pub fn reduce_word<S: Eq + Clone>(w: &[S], rules: &[Rule<S>]) -> Vec<S> {
    reduce_inner(w, rules, None, Strategy::Leftmost)
}

pub fn reduce_with<S: Eq + Clone>(w: &[S], rules: &[Rule<S>], strategy: Strategy) -> Vec<S> {
    reduce_inner(w, rules, None, strategy)
}

pub fn is_reducible<S: Eq>(w: &[S], rules: &[Rule<S>]) -> bool {
    rules.iter().any(|(l, _)| !l.is_empty() && find_factor(w, l).is_some())
}

/// Every word reachable from `w` by one rule application.
pub fn one_step_reducts<S: Eq + Clone>(w: &[S], rules: &[Rule<S>]) -> Vec<Vec<S>> {
    let mut out = Vec::new();
    for (l, r) in rules {
        if l.len() > w.len() || l.is_empty() {
            continue;
        }
        for i in 0..=w.len() - l.len() {
            if occurs_at(w, l, i) {
                let mut v = w[..i].to_vec();
                v.extend(r.iter().cloned());
                v.extend_from_slice(&w[i + l.len()..]);
                out.push(v);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OverlapKind {
    /// The second lhs is a factor of the first.
    Containment,
    /// A proper suffix of the first lhs is a prefix of the second.
    Boundary,
}

/// A critical term with its two single-step reducts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalPair<S> {
    pub term: Vec<S>,
    pub left: Vec<S>,
    pub right: Vec<S>,
    pub rules: (usize, usize),
    pub offset: usize,
    pub kind: OverlapKind,
}

/// All overlaps between rule left sides, in rule-index then offset order.
pub fn critical_pairs<S: Eq + Clone>(rules: &[Rule<S>]) -> Vec<CriticalPair<S>> {
    let mut out = Vec::new();
    for (i, (l1, r1)) in rules.iter().enumerate() {
        for (j, (l2, r2)) in rules.iter().enumerate() {
            if l1.is_empty() || l2.is_empty() {
                continue;
            }
            if i != j && l2.len() <= l1.len() {
                for k in 0..=l1.len() - l2.len() {
                    if occurs_at(l1, l2, k) {
                        let mut right = l1[..k].to_vec();
                        right.extend(r2.iter().cloned());
                        right.extend_from_slice(&l1[k + l2.len()..]);
                        out.push(CriticalPair {
                            term: l1.clone(),
                            left: r1.clone(),
                            right,
                            rules: (i, j),
                            offset: k,
                            kind: OverlapKind::Containment,
                        });
                    }
                }
            }
            let max = l1.len().min(l2.len());
            for len in 1..max {
                let k = l1.len() - len;
                if l1[k..] == l2[..len] {
                    let mut term = l1.clone();
                    term.extend_from_slice(&l2[len..]);
                    let mut left = r1.clone();
                    left.extend_from_slice(&l2[len..]);
                    let mut right = l1[..k].to_vec();
                    right.extend(r2.iter().cloned());
                    out.push(CriticalPair {
                        term,
                        left,
                        right,
                        rules: (i, j),
                        offset: k,
                        kind: OverlapKind::Boundary,
                    });
                }
            }
        }
    }
    out
}

pub fn sort_rules<S: Ord>(rules: &mut Vec<Rule<S>>) {
    rules.sort_by(|a, b| lenlex(&a.0, &b.0).then_with(|| lenlex(&a.1, &b.1)));
    rules.dedup();
}

/// Interreduces until no side of any rule is reducible by the other rules.
pub fn interreduce<S: Ord + Clone>(rules: Vec<Rule<S>>) -> Vec<Rule<S>> {
    let mut rs: Vec<Rule<S>> = Vec::new();
    for (l, r) in rules {
        if let Some(o) = orient(l, r) {
            if !rs.contains(&o) {
                rs.push(o);
            }
        }
    }
    loop {
        let mut changed = false;
        let mut i = 0;
        while i < rs.len() {
            let l = reduce_inner(&rs[i].0, &rs, Some(i), Strategy::Leftmost);
            if l != rs[i].0 {
                let r = reduce_inner(&rs[i].1, &rs, Some(i), Strategy::Leftmost);
                rs.remove(i);
                if let Some(o) = orient(l, r) {
                    rs.push(o);
                }
                changed = true;
                continue;
            }
            let r = reduce_inner(&rs[i].1, &rs, Some(i), Strategy::Leftmost);
            if r != rs[i].1 {
                rs[i].1 = r;
                changed = true;
            }
            i += 1;
        }
        if !changed {
            break;
        }
    }
    sort_rules(&mut rs);
    rs
}

/// Result of a completion run that ran out of budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incomplete<S> {
    pub rules: Vec<Rule<S>>,
    pub passes: usize,
}

/// Knuth-Bendix completion with respect to length-lex.
pub fn complete<S: Ord + Clone>(
    rules: Vec<Rule<S>>,
    budget: CompletionBudget,
) -> Result<Vec<Rule<S>>, Incomplete<S>> {
    let mut rules = interreduce(rules);
    for pass in 0..budget.max_passes {
        let pairs = critical_pairs(&rules);
        let base = rules.len();
        for cp in pairs {
            let a = reduce_word(&cp.left, &rules);
            let b = reduce_word(&cp.right, &rules);
            if let Some(o) = orient(a, b) {
                rules.push(o);
                if rules.len() > budget.max_rules {
                    return Err(Incomplete { rules: interreduce(rules), passes: pass + 1 });
                }
            }
        }
        if rules.len() == base {
            return Ok(rules);
        }
        rules = interreduce(rules);
    }
    Err(Incomplete { rules, passes: budget.max_passes })
}

/// True when every critical pair has a common reduct.
pub fn is_locally_confluent<S: Eq + Clone>(rules: &[Rule<S>]) -> bool {
    critical_pairs(rules)
        .iter()
        .all(|cp| reduce_word(&cp.left, rules) == reduce_word(&cp.right, rules))
}

/// Renders a word, collapsing runs into powers: `a^2b`.
pub fn word_text<S: AsRef<str>>(names: &[S], w: &[usize]) -> String {
    if w.is_empty() {
        return "id".to_string();
    }
    let mut out = String::new();
    let mut i = 0;
    while i < w.len() {
        let mut j = i;
        while j < w.len() && w[j] == w[i] {
            j += 1;
        }
        out.push_str(names[w[i]].as_ref());
        if j - i > 1 {
            out.push_str(&format!("^{}", j - i));
        }
        i = j;
    }
    out
}

/// Parses `aba^3b^-1` into syllables `(generator, exponent)`. Names match
/// greedily; `id` and whitespace are skipped.
pub fn parse_exponent_word<S: AsRef<str>>(text: &str, names: &[S]) -> Result<Vec<(usize, i64)>, PresentationError> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        if let Some(r) = rest.strip_prefix("id") {
            if !names.iter().any(|n| rest.starts_with(n.as_ref()) && n.as_ref().len() > 2) {
                rest = r.trim_start();
                continue;
            }
        }
        let (i, n) = names
            .iter()
            .enumerate()
            .filter(|(_, n)| !n.as_ref().is_empty() && rest.starts_with(n.as_ref()))
            .max_by_key(|(_, n)| n.as_ref().len())
            .ok_or_else(|| PresentationError::Syntax(rest.to_string()))?;
        rest = &rest[n.as_ref().len()..];
        let mut e = 1i64;
        if let Some(r) = rest.strip_prefix('^') {
            let len = r.char_indices().take_while(|&(k, c)| c.is_ascii_digit() || (k == 0 && c == '-')).count();
            e = r[..len].parse().map_err(|_| PresentationError::Syntax(text.to_string()))?;
            rest = &r[len..];
        }
        out.push((i, e));
        rest = rest.trim_start_matches(|c: char| c.is_whitespace() || c == '*' || c == '.');
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Typed layer

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Arrow {
    pub label: String,
    pub src: usize,
    pub tgt: usize,
}

/// A directed graph; arrow declaration order is the generator order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Graph {
    pub objects: Vec<String>,
    pub arrows: Vec<Arrow>,
    #[serde(skip)]
    object_index: HashMap<String, usize>,
    #[serde(skip)]
    arrow_index: HashMap<String, usize>,
}

impl Graph {
    pub fn new<O, A>(objects: O, arrows: A) -> Result<Graph, PresentationError>
    where
        O: IntoIterator,
        O::Item: Into<String>,
        A: IntoIterator<Item = (String, String, String)>,
    {
        let objects: Vec<String> = objects.into_iter().map(Into::into).collect();
        let mut object_index = HashMap::new();
        for (i, o) in objects.iter().enumerate() {
            if object_index.insert(o.clone(), i).is_some() {
                return Err(PresentationError::Duplicate(o.clone()));
            }
        }
        let mut g = Graph { objects, arrows: Vec::new(), object_index, arrow_index: HashMap::new() };
        for (label, src, tgt) in arrows {
            let s = g.object(&src)?;
            let t = g.object(&tgt)?;
            if g.arrow_index.insert(label.clone(), g.arrows.len()).is_some() {
                return Err(PresentationError::Duplicate(label));
            }
            g.arrows.push(Arrow { label, src: s, tgt: t });
        }
        Ok(g)
    }

    /// One object `*` with the given loops.
    pub fn one_object<S: AsRef<str>>(labels: &[S]) -> Graph {
        Graph::new(
            ["*"],
            labels.iter().map(|l| (l.as_ref().to_string(), "*".to_string(), "*".to_string())),
        )
        .expect("loop labels must be distinct")
    }

    pub fn object(&self, name: &str) -> Result<usize, PresentationError> {
        self.object_index
            .get(name)
            .copied()
            .ok_or_else(|| PresentationError::UnknownObject(name.to_string()))
    }

    pub fn arrow(&self, label: &str) -> Result<usize, PresentationError> {
        self.arrow_index
            .get(label)
            .copied()
            .ok_or_else(|| PresentationError::UnknownArrow(label.to_string()))
    }

    pub fn labels(&self) -> Vec<&str> {
        self.arrows.iter().map(|a| a.label.as_str()).collect()
    }

    pub fn arrows_from(&self, object: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.arrows.len()).filter(move |&i| self.arrows[i].src == object)
    }

    /// Index of the first non-composable junction, if any.
    pub fn composable_until(&self, w: &[usize]) -> Option<usize> {
        w.windows(2).position(|p| self.arrows[p[0]].tgt != self.arrows[p[1]].src).map(|i| i + 1)
    }

    pub fn word(&self, labels: &[impl AsRef<str>]) -> Result<Vec<usize>, PresentationError> {
        labels.iter().map(|l| self.arrow(l.as_ref())).collect()
    }

    /// Builds a typed path; `at` is required only for the identity path.
    pub fn path(
        &self,
        labels: &[impl AsRef<str>],
        at: Option<&str>,
    ) -> Result<PathWord, PresentationError> {
        let arrows = self.word(labels)?;
        if let Some(i) = self.composable_until(&arrows) {
            return Err(PresentationError::NotComposable(i));
        }
        let source = match (arrows.first(), at) {
            (Some(&a), _) => self.arrows[a].src,
            (None, Some(o)) => self.object(o)?,
            (None, None) => return Err(PresentationError::MissingAt),
        };
        Ok(PathWord { source, arrows })
    }

    pub fn text(&self, w: &[usize]) -> String {
        word_text(&self.labels(), w)
    }
}

/// A path in the free category; the empty path is the identity at `source`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PathWord {
    pub source: usize,
    pub arrows: Vec<usize>,
}

impl PathWord {
    pub fn identity(source: usize) -> PathWord {
        PathWord { source, arrows: Vec::new() }
    }

    pub fn target(&self, g: &Graph) -> usize {
        self.arrows.last().map_or(self.source, |&a| g.arrows[a].tgt)
    }

    pub fn is_well_typed(&self, g: &Graph) -> bool {
        self.arrows.iter().all(|&a| a < g.arrows.len())
            && g.composable_until(&self.arrows).is_none()
            && self.arrows.first().map_or(self.source < g.objects.len(), |&a| g.arrows[a].src == self.source)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathRule {
    pub lhs: PathWord,
    pub rhs: PathWord,
}

impl PathRule {
    pub fn text(&self, g: &Graph) -> String {
        format!("{} -> {}", g.text(&self.lhs.arrows), g.text(&self.rhs.arrows))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryPresentation {
    pub graph: Graph,
    pub relations: Vec<PathRule>,
}

impl CategoryPresentation {
    pub fn new(graph: Graph, relations: Vec<PathRule>) -> Result<Self, PresentationError> {
        for (index, r) in relations.iter().enumerate() {
            if !r.lhs.is_well_typed(&graph) || !r.rhs.is_well_typed(&graph) {
                return Err(PresentationError::IllTyped { index, reason: "not a path".into() });
            }
            if r.lhs.source != r.rhs.source || r.lhs.target(&graph) != r.rhs.target(&graph) {
                return Err(PresentationError::IllTyped {
                    index,
                    reason: "sides differ in source or target".into(),
                });
            }
        }
        Ok(CategoryPresentation { graph, relations })
    }

    /// Monoid presentation on one object.
    pub fn monoid<S: AsRef<str>>(generators: &[S], rules: &[(Vec<usize>, Vec<usize>)]) -> Self {
        let graph = Graph::one_object(generators);
        let relations = rules
            .iter()
            .map(|(l, r)| PathRule {
                lhs: PathWord { source: 0, arrows: l.clone() },
                rhs: PathWord { source: 0, arrows: r.clone() },
            })
            .collect();
        CategoryPresentation { graph, relations }
    }

    pub fn word_rules(&self) -> Vec<Rule<usize>> {
        self.relations.iter().map(|r| (r.lhs.arrows.clone(), r.rhs.arrows.clone())).collect()
    }
}

pub fn lenlex_compare(p: &PathWord, q: &PathWord, g: &Graph) -> Result<Ordering, PresentationError> {
    for w in [p, q] {
        if let Some(&a) = w.arrows.iter().find(|&&a| a >= g.arrows.len()) {
            return Err(PresentationError::UnknownArrow(format!("#{a}")));
        }
    }
    Ok(lenlex(&p.arrows, &q.arrows))
}

pub fn reduce_path(p: &PathWord, rules: &[PathRule], g: &Graph) -> Result<PathWord, PresentationError> {
    if !p.is_well_typed(g) {
        return Err(PresentationError::NotComposable(g.composable_until(&p.arrows).unwrap_or(0)));
    }
    let word_rules: Vec<Rule<usize>> =
        rules.iter().map(|r| (r.lhs.arrows.clone(), r.rhs.arrows.clone())).collect();
    Ok(PathWord { source: p.source, arrows: reduce_word(&p.arrows, &word_rules) })
}

fn typed_rules(g: &Graph, rules: &[Rule<usize>], fallback: &HashMap<Vec<usize>, usize>) -> Vec<PathRule> {
    rules
        .iter()
        .map(|(l, r)| {
            let source = l.first().map_or_else(|| fallback.get(l).copied().unwrap_or(0), |&a| g.arrows[a].src);
            PathRule {
                lhs: PathWord { source, arrows: l.clone() },
                rhs: PathWord { source, arrows: r.clone() },
            }
        })
        .collect()
}

/// Outcome of completing a category presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletedPresentation {
    pub graph: Graph,
    pub rules: Vec<PathRule>,
}

impl CompletedPresentation {
    pub fn word_rules(&self) -> Vec<Rule<usize>> {
        self.rules.iter().map(|r| (r.lhs.arrows.clone(), r.rhs.arrows.clone())).collect()
    }

    pub fn reduce(&self, w: &[usize]) -> Vec<usize> {
        reduce_word(w, &self.word_rules())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("completion budget exhausted with {} rules", partial.rules.len())]
pub struct BudgetExhausted {
    pub partial: CompletedPresentation,
}

pub fn complete_presentation(
    pres: &CategoryPresentation,
    budget: CompletionBudget,
) -> Result<CompletedPresentation, BudgetExhausted> {
    let none = HashMap::new();
    match complete(pres.word_rules(), budget) {
        Ok(rules) => Ok(CompletedPresentation { graph: pres.graph.clone(), rules: typed_rules(&pres.graph, &rules, &none) }),
        Err(inc) => Err(BudgetExhausted {
            partial: CompletedPresentation { graph: pres.graph.clone(), rules: typed_rules(&pres.graph, &inc.rules, &none) },
        }),
    }
}

pub fn normalize_system(rules: &[PathRule], g: &Graph) -> Vec<PathRule> {
    let words: Vec<Rule<usize>> = rules.iter().map(|r| (r.lhs.arrows.clone(), r.rhs.arrows.clone())).collect();
    let none = HashMap::new();
    typed_rules(g, &interreduce(words), &none)
}

/// Normal forms of a category, grouped by (source, target).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Census {
    pub elements: Vec<PathWord>,
    pub by_hom: BTreeMap<(usize, usize), Vec<PathWord>>,
}

impl Census {
    fn push(&mut self, p: PathWord, g: &Graph) {
        self.by_hom.entry((p.source, p.target(g))).or_default().push(p.clone());
        self.elements.push(p);
    }

    pub fn identities(&self) -> usize {
        self.elements.iter().filter(|p| p.arrows.is_empty()).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("enumeration limit {limit} exceeded")]
pub struct Overflow {
    pub limit: usize,
    pub partial: Census,
}

/// Length-stratified enumeration of irreducible paths.
pub fn enumerate_elements(
    g: &Graph,
    rules: &[Rule<usize>],
    limit: usize,
) -> Result<Census, Overflow> {
    let mut census = Census::default();
    let mut block: Vec<PathWord> = Vec::new();
    for o in 0..g.objects.len() {
        let p = PathWord::identity(o);
        if census.elements.len() == limit {
            return Err(Overflow { limit, partial: census });
        }
        census.push(p.clone(), g);
        block.push(p);
    }
    while !block.is_empty() {
        let mut next = Vec::new();
        for p in &block {
            for b in g.arrows_from(p.target(g)) {
                let mut w = p.arrows.clone();
                w.push(b);
                if is_reducible(&w, rules) {
                    continue;
                }
                if census.elements.len() == limit {
                    return Err(Overflow { limit, partial: census });
                }
                let q = PathWord { source: p.source, arrows: w };
                census.push(q.clone(), g);
                next.push(q);
            }
        }
        block = next;
    }
    Ok(census)
}

// ---------------------------------------------------------------------------
// JSON-facing input

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowInput {
    pub label: String,
    pub src: String,
    pub tgt: String,
}

/// A relation given either as a pair of label arrays or with an explicit
/// `at` object for identity sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RelationInput {
    Pair(Vec<String>, Vec<String>),
    Typed {
        lhs: Vec<String>,
        rhs: Vec<String>,
        #[serde(default)]
        at: Option<String>,
    },
}

impl RelationInput {
    pub fn to_rule(&self, g: &Graph, index: usize) -> Result<PathRule, PresentationError> {
        let (l, r, at) = match self {
            RelationInput::Pair(l, r) => (l, r, None),
            RelationInput::Typed { lhs, rhs, at } => (lhs, rhs, at.as_deref()),
        };
        let ill = |e: PresentationError| PresentationError::IllTyped { index, reason: e.to_string() };
        let lw = g.word(l)?;
        let rw = g.word(r)?;
        let src_of = |w: &[usize]| w.first().map(|&a| g.arrows[a].src);
        let at = match at {
            Some(o) => Some(o.to_string()),
            None => src_of(&lw).or(src_of(&rw)).map(|o| g.objects[o].clone()),
        };
        let lhs = g.path(l, at.as_deref()).map_err(ill)?;
        let rhs = g.path(r, at.as_deref()).map_err(ill)?;
        Ok(PathRule { lhs, rhs })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationInput {
    pub objects: Vec<String>,
    pub arrows: Vec<ArrowInput>,
    #[serde(default)]
    pub relations: Vec<RelationInput>,
}

impl PresentationInput {
    pub fn build(&self) -> Result<CategoryPresentation, PresentationError> {
        let g = Graph::new(
            self.objects.iter().cloned(),
            self.arrows.iter().map(|a| (a.label.clone(), a.src.clone(), a.tgt.clone())),
        )?;
        let rels = self
            .relations
            .iter()
            .enumerate()
            .map(|(i, r)| r.to_rule(&g, i))
            .collect::<Result<Vec<_>, _>>()?;
        CategoryPresentation::new(g, rels)
    }
}

// ---------------------------------------------------------------------------
// Groups as monoid presentations

/// A relator with its label, as written by the user (letters may be inverses).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelatorInput {
    pub label: String,
    pub word: Vec<String>,
}

/// Group or monoid input. Letters are generator names, or `g^-1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupInput {
    pub generators: Vec<String>,
    #[serde(default)]
    pub relations: Vec<(Vec<String>, Vec<String>)>,
    #[serde(default)]
    pub relators: Vec<RelatorInput>,
    /// `g -> n` replaces `g^-1` by `g^(n-1)`.
    #[serde(default)]
    pub inverse_powers: BTreeMap<String, usize>,
    /// Adds formal inverse letters with the free cancellation rules.
    #[serde(default)]
    pub formal_inverses: bool,
}

/// The monoid encoding of a group presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPresentation {
    pub generators: Vec<String>,
    /// Monoid letters; each maps to a free-group letter `(generator, ±1)`.
    pub letters: Vec<String>,
    pub letter_fg: Vec<(usize, i8)>,
    pub relators: Vec<(String, Vec<usize>)>,
    pub rules: Vec<Rule<usize>>,
}

impl GroupPresentation {
    pub fn from_input(input: &GroupInput) -> Result<Self, PresentationError> {
        let gens = input.generators.clone();
        let mut seen = HashMap::new();
        for (i, g) in gens.iter().enumerate() {
            if seen.insert(g.clone(), i).is_some() {
                return Err(PresentationError::Duplicate(g.clone()));
            }
        }
        let mut letters = gens.clone();
        let mut letter_fg: Vec<(usize, i8)> = (0..gens.len()).map(|i| (i, 1)).collect();
        let mut rules = Vec::new();
        if input.formal_inverses {
            for (i, g) in gens.iter().enumerate() {
                letters.push(format!("{g}^-1"));
                letter_fg.push((i, -1));
                let inv = gens.len() + i;
                rules.push((vec![i, inv], vec![]));
                rules.push((vec![inv, i], vec![]));
            }
        }
        for g in input.inverse_powers.keys() {
            if !seen.contains_key(g) {
                return Err(PresentationError::UnknownArrow(g.clone()));
            }
        }
        let encode = |w: &[String]| -> Result<Vec<usize>, PresentationError> {
            let mut out = Vec::new();
            for t in w {
                if let Some(&i) = seen.get(t) {
                    out.push(i);
                } else if let Some(base) = t.strip_suffix("^-1") {
                    let i = *seen.get(base).ok_or_else(|| PresentationError::UnknownArrow(t.clone()))?;
                    if input.formal_inverses {
                        out.push(gens.len() + i);
                    } else if let Some(&n) = input.inverse_powers.get(base) {
                        out.extend(std::iter::repeat(i).take(n.saturating_sub(1)));
                    } else {
                        return Err(PresentationError::NoInverse(t.clone()));
                    }
                } else {
                    return Err(PresentationError::UnknownArrow(t.clone()));
                }
            }
            Ok(out)
        };
        for (l, r) in &input.relations {
            rules.push((encode(l)?, encode(r)?));
        }
        let mut relators = Vec::new();
        let mut labels = HashMap::new();
        for rel in &input.relators {
            if labels.insert(rel.label.clone(), ()).is_some() {
                return Err(PresentationError::Duplicate(rel.label.clone()));
            }
            let w = encode(&rel.word)?;
            rules.push((w.clone(), vec![]));
            relators.push((rel.label.clone(), w));
        }
        Ok(GroupPresentation { generators: gens, letters, letter_fg, relators, rules })
    }

    pub fn category(&self) -> CategoryPresentation {
        CategoryPresentation::monoid(&self.letters, &self.rules)
    }

    pub fn text(&self, w: &[usize]) -> String {
        word_text(&self.letters, w)
    }
}

impl fmt::Display for PathWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:?}", self.source, self.arrows)
    }
}
