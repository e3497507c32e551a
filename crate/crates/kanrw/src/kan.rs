//! Kan extensions of category actions by rewriting on tagged terms.
//!
//! A tagged term `x|b1..bn` is encoded as the list `[x, b1, .., bn]` over
//! [`Sym`]. With tags ordered before arrows, length-lex on these lists is
//! exactly the term order: length, then tag, then arrows letterwise. T-rules
//! then only ever match at position 0 (tags occur nowhere else) and P-rules
//! match any arrow factor, so the mixed system is plain string rewriting on
//! the encoding and completion reuses [`crate::presentations`].

use crate::presentations::{
    self, critical_pairs, interreduce, is_reducible, reduce_word, ArrowInput, CompletionBudget,
    Graph, GroupPresentation, OverlapKind, PresentationError, RelationInput, Rule,
};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Sym {
    Tag(usize),
    Arr(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KanError {
    #[error("{list}[{index}]: {reason}")]
    Invalid { list: &'static str, index: usize, reason: String },
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error("ill-typed term")]
    IllTyped,
    #[error("composition needs a finite first extension")]
    NotFinite,
}

fn invalid(list: &'static str, index: usize, reason: impl Into<String>) -> KanError {
    KanError::Invalid { list, index, reason: reason.into() }
}

/// Raw input record with the nine lists of a Kan presentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KanInput {
    #[serde(rename = "objects_A")]
    pub objects_a: Vec<String>,
    #[serde(rename = "arrows_A")]
    pub arrows_a: Vec<(String, String)>,
    #[serde(rename = "objects_B")]
    pub objects_b: Vec<String>,
    #[serde(rename = "arrows_B")]
    pub arrows_b: Vec<ArrowInput>,
    #[serde(rename = "relations_B", default)]
    pub relations_b: Vec<RelationInput>,
    #[serde(rename = "F_objects")]
    pub f_objects: Vec<String>,
    #[serde(rename = "F_arrows")]
    pub f_arrows: Vec<Vec<String>>,
    #[serde(rename = "X_objects")]
    pub x_objects: Vec<Vec<String>>,
    #[serde(rename = "X_arrows")]
    pub x_arrows: Vec<Vec<String>>,
}

/// A validated presentation `kan<Γ|Δ|RelB|X|F>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KanPresentation {
    pub gamma: Graph,
    pub delta: Graph,
    pub rel_b: Vec<Rule<usize>>,
    pub f_obj: Vec<usize>,
    pub f_arr: Vec<Vec<usize>>,
    /// All elements of the disjoint union of the sets XA, in declaration order.
    pub elements: Vec<String>,
    pub element_object: Vec<usize>,
    pub x_objects: Vec<Vec<usize>>,
    /// Per Γ-arrow, the image of each element of X(src a), aligned with `x_objects`.
    pub x_arrows: Vec<Vec<usize>>,
}

impl KanPresentation {
    pub fn validate(raw: &KanInput) -> Result<KanPresentation, KanError> {
        let gamma = Graph::new(
            raw.objects_a.iter().cloned(),
            raw.arrows_a
                .iter()
                .enumerate()
                .map(|(i, (s, t))| (format!("a{}", i + 1), s.clone(), t.clone())),
        )
        .map_err(|e| invalid("arrows_A", 0, e.to_string()))?;
        let delta = Graph::new(
            raw.objects_b.iter().cloned(),
            raw.arrows_b.iter().map(|a| (a.label.clone(), a.src.clone(), a.tgt.clone())),
        )
        .map_err(|e| invalid("arrows_B", 0, e.to_string()))?;
        let mut rel_b = Vec::new();
        for (i, r) in raw.relations_b.iter().enumerate() {
            let pr = r.to_rule(&delta, i).map_err(|e| invalid("relations_B", i, e.to_string()))?;
            if pr.lhs.target(&delta) != pr.rhs.target(&delta) {
                return Err(invalid("relations_B", i, "sides have different targets"));
            }
            rel_b.push((pr.lhs.arrows, pr.rhs.arrows));
        }
        if raw.f_objects.len() != gamma.objects.len() {
            return Err(invalid("F_objects", raw.f_objects.len(), "one entry per object of A"));
        }
        let f_obj = raw
            .f_objects
            .iter()
            .enumerate()
            .map(|(i, o)| delta.object(o).map_err(|e| invalid("F_objects", i, e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        if raw.f_arrows.len() != gamma.arrows.len() {
            return Err(invalid("F_arrows", raw.f_arrows.len(), "one entry per arrow of A"));
        }
        let mut f_arr = Vec::new();
        for (i, p) in raw.f_arrows.iter().enumerate() {
            let w = delta.word(p).map_err(|e| invalid("F_arrows", i, e.to_string()))?;
            if let Some(k) = delta.composable_until(&w) {
                return Err(invalid("F_arrows", i, format!("not composable at {k}")));
            }
            let a = &gamma.arrows[i];
            let src = w.first().map_or(f_obj[a.src], |&b| delta.arrows[b].src);
            let tgt = w.last().map_or(f_obj[a.src], |&b| delta.arrows[b].tgt);
            if src != f_obj[a.src] || tgt != f_obj[a.tgt] {
                return Err(invalid("F_arrows", i, "path does not match F on source and target"));
            }
            f_arr.push(w);
        }
        if raw.x_objects.len() != gamma.objects.len() {
            return Err(invalid("X_objects", raw.x_objects.len(), "one set per object of A"));
        }
        let mut elements = Vec::new();
        let mut element_object = Vec::new();
        let mut index = HashMap::new();
        let mut x_objects = Vec::new();
        for (o, set) in raw.x_objects.iter().enumerate() {
            let mut ids = Vec::new();
            for x in set {
                if index.contains_key(x) || delta.arrow(x).is_ok() {
                    return Err(invalid("X_objects", o, format!("duplicate symbol `{x}`")));
                }
                index.insert(x.clone(), elements.len());
                ids.push(elements.len());
                elements.push(x.clone());
                element_object.push(o);
            }
            x_objects.push(ids);
        }
        if raw.x_arrows.len() != gamma.arrows.len() {
            return Err(invalid("X_arrows", raw.x_arrows.len(), "one row per arrow of A"));
        }
        let mut x_arrows = Vec::new();
        for (i, row) in raw.x_arrows.iter().enumerate() {
            let a = &gamma.arrows[i];
            if row.len() != x_objects[a.src].len() {
                return Err(invalid("X_arrows", i, "row length differs from X(src a)"));
            }
            let mut imgs = Vec::new();
            for y in row {
                match index.get(y) {
                    Some(&k) if element_object[k] == a.tgt => imgs.push(k),
                    _ => return Err(invalid("X_arrows", i, format!("`{y}` is not in X(tgt a)"))),
                }
            }
            x_arrows.push(imgs);
        }
        Ok(KanPresentation { gamma, delta, rel_b, f_obj, f_arr, elements, element_object, x_objects, x_arrows })
    }

    pub fn tag_object(&self, x: usize) -> usize {
        self.f_obj[self.element_object[x]]
    }

    pub fn term(&self, tag: &str, path: &[&str]) -> Result<TaggedTerm, KanError> {
        let tag = self
            .elements
            .iter()
            .position(|e| e == tag)
            .ok_or_else(|| invalid("X_objects", 0, format!("unknown element `{tag}`")))?;
        let path = self.delta.word(path)?;
        let t = TaggedTerm { tag, path };
        if !t.is_well_typed(self) {
            return Err(KanError::IllTyped);
        }
        Ok(t)
    }

    pub fn term_text(&self, t: &TaggedTerm) -> String {
        format!("{}|{}", self.elements[t.tag], self.delta.text(&t.path))
    }

    pub fn sym_text(&self, w: &[Sym]) -> String {
        match decode(w) {
            Some(Encoded::Term(t)) => self.term_text(&t),
            Some(Encoded::Path(p)) => self.delta.text(&p),
            None => format!("{w:?}"),
        }
    }

    pub fn rule_text(&self, r: &Rule<Sym>) -> String {
        format!("{} -> {}", self.sym_text(&r.0), self.sym_text(&r.1))
    }

    /// Letters of the acceptor alphabet: tags first, then arrows.
    pub fn alphabet(&self) -> Vec<Sym> {
        (0..self.elements.len()).map(Sym::Tag).chain((0..self.delta.arrows.len()).map(Sym::Arr)).collect()
    }

    pub fn letter_names(&self) -> Vec<String> {
        self.elements.iter().cloned().chain(self.delta.arrows.iter().map(|a| a.label.clone())).collect()
    }

    /// The tagged term spelled by a word over the alphabet, if any.
    pub fn parse_word(&self, w: &[Sym]) -> Option<TaggedTerm> {
        match decode(w)? {
            Encoded::Term(t) if t.is_well_typed(self) => Some(t),
            _ => None,
        }
    }
}

/// An element `x|p` of the P-set of tagged terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TaggedTerm {
    pub tag: usize,
    pub path: Vec<usize>,
}

impl TaggedTerm {
    pub fn encode(&self) -> Vec<Sym> {
        std::iter::once(Sym::Tag(self.tag)).chain(self.path.iter().map(|&b| Sym::Arr(b))).collect()
    }

    pub fn is_well_typed(&self, pres: &KanPresentation) -> bool {
        let d = &pres.delta;
        self.tag < pres.elements.len()
            && self.path.iter().all(|&b| b < d.arrows.len())
            && self.path.first().map_or(true, |&b| d.arrows[b].src == pres.tag_object(self.tag))
            && d.composable_until(&self.path).is_none()
    }

    /// τ: the target object of the term.
    pub fn tau(&self, pres: &KanPresentation) -> usize {
        self.path.last().map_or(pres.tag_object(self.tag), |&b| pres.delta.arrows[b].tgt)
    }

    pub fn then(&self, b: usize) -> TaggedTerm {
        let mut path = self.path.clone();
        path.push(b);
        TaggedTerm { tag: self.tag, path }
    }
}

pub enum Encoded {
    Term(TaggedTerm),
    Path(Vec<usize>),
}

pub fn decode(w: &[Sym]) -> Option<Encoded> {
    let arrows = |s: &[Sym]| -> Option<Vec<usize>> {
        s.iter().map(|x| if let Sym::Arr(b) = x { Some(*b) } else { None }).collect()
    };
    match w.first() {
        Some(Sym::Tag(x)) => Some(Encoded::Term(TaggedTerm { tag: *x, path: arrows(&w[1..])? })),
        _ => Some(Encoded::Path(arrows(w)?)),
    }
}

/// A rule is a T-rule when its lhs starts with a tag.
pub fn is_t_rule(r: &Rule<Sym>) -> bool {
    matches!(r.0.first(), Some(Sym::Tag(_)))
}

/// The pair `(R_T, R_P)` stored as one list of encoded rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedRewriteSystem {
    pub rules: Vec<Rule<Sym>>,
}

impl MixedRewriteSystem {
    pub fn t_rules(&self) -> Vec<(TaggedTerm, TaggedTerm)> {
        self.rules
            .iter()
            .filter_map(|(l, r)| match (decode(l)?, decode(r)?) {
                (Encoded::Term(a), Encoded::Term(b)) => Some((a, b)),
                _ => None,
            })
            .collect()
    }

    pub fn p_rules(&self) -> Vec<Rule<usize>> {
        self.rules
            .iter()
            .filter_map(|(l, r)| match (decode(l)?, decode(r)?) {
                (Encoded::Path(a), Encoded::Path(b)) => Some((a, b)),
                _ => None,
            })
            .collect()
    }

    /// Rules with equal sides, such as trivial ε-rules `x|Fa -> x|id`
    /// with `Fa` empty, carry no information and are dropped.
    pub fn oriented(&self) -> MixedRewriteSystem {
        MixedRewriteSystem {
            rules: self.rules.iter().filter_map(|(l, r)| presentations::orient(l.clone(), r.clone())).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// ε-rules `x|Fa -> x·a|id` for every arrow and element, then RelB.
pub fn initial_rules(pres: &KanPresentation) -> MixedRewriteSystem {
    let mut rules = Vec::new();
    for (a, imgs) in pres.x_arrows.iter().enumerate() {
        let src = pres.gamma.arrows[a].src;
        for (k, &x) in pres.x_objects[src].iter().enumerate() {
            let lhs = TaggedTerm { tag: x, path: pres.f_arr[a].clone() };
            let rhs = TaggedTerm { tag: imgs[k], path: Vec::new() };
            rules.push((lhs.encode(), rhs.encode()));
        }
    }
    for (l, r) in &pres.rel_b {
        rules.push((l.iter().map(|&b| Sym::Arr(b)).collect(), r.iter().map(|&b| Sym::Arr(b)).collect()));
    }
    MixedRewriteSystem { rules }
}

pub fn reduce_term(t: &TaggedTerm, r: &MixedRewriteSystem, pres: &KanPresentation) -> Result<TaggedTerm, KanError> {
    if !t.is_well_typed(pres) {
        return Err(KanError::IllTyped);
    }
    match decode(&reduce_word(&t.encode(), &r.rules)) {
        Some(Encoded::Term(t)) => Ok(t),
        _ => Err(KanError::IllTyped),
    }
}

/// Overlap types (i)-(v) for mixed systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum MixedOverlap {
    /// T-rule lhs contains another T-rule lhs.
    TT,
    /// P-rule factor of a P-rule.
    PPContain,
    /// P-rule suffix meets P-rule prefix.
    PPBoundary,
    /// T-rule suffix meets P-rule prefix.
    TPBoundary,
    /// P-rule factor of a T-rule path.
    TPContain,
}

impl MixedOverlap {
    pub fn roman(self) -> &'static str {
        match self {
            MixedOverlap::TT => "i",
            MixedOverlap::PPContain => "ii",
            MixedOverlap::PPBoundary => "iii",
            MixedOverlap::TPBoundary => "iv",
            MixedOverlap::TPContain => "v",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KanCriticalPair {
    pub term: Vec<Sym>,
    pub left: Vec<Sym>,
    pub right: Vec<Sym>,
    pub kind: MixedOverlap,
}

pub fn find_overlaps(r: &MixedRewriteSystem) -> Vec<KanCriticalPair> {
    critical_pairs(&r.rules)
        .into_iter()
        .map(|cp| {
            let outer_t = is_t_rule(&r.rules[cp.rules.0]);
            let inner_t = is_t_rule(&r.rules[cp.rules.1]);
            let kind = match (cp.kind, outer_t, inner_t) {
                (OverlapKind::Containment, true, true) => MixedOverlap::TT,
                (OverlapKind::Containment, true, false) => MixedOverlap::TPContain,
                (OverlapKind::Containment, false, _) => MixedOverlap::PPContain,
                (OverlapKind::Boundary, true, _) => MixedOverlap::TPBoundary,
                (OverlapKind::Boundary, false, _) => MixedOverlap::PPBoundary,
            };
            KanCriticalPair { term: cp.term, left: cp.left, right: cp.right, kind }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("completion budget exhausted after {passes} passes ({} rules)", partial.len())]
pub struct KanBudgetExhausted {
    pub partial: MixedRewriteSystem,
    pub passes: usize,
}

pub fn complete_kan(r: &MixedRewriteSystem, budget: CompletionBudget) -> Result<MixedRewriteSystem, KanBudgetExhausted> {
    presentations::complete(r.rules.clone(), budget)
        .map(|rules| MixedRewriteSystem { rules: sort_mixed(rules) })
        .map_err(|inc| KanBudgetExhausted { partial: MixedRewriteSystem { rules: sort_mixed(inc.rules) }, passes: inc.passes })
}

/// T-rules first, each group in length-lex order of the lhs.
fn sort_mixed(mut rules: Vec<Rule<Sym>>) -> Vec<Rule<Sym>> {
    presentations::sort_rules(&mut rules);
    rules.sort_by_key(|r| !is_t_rule(r));
    rules
}

pub fn normalize_mixed(r: &MixedRewriteSystem) -> MixedRewriteSystem {
    MixedRewriteSystem { rules: sort_mixed(interreduce(r.rules.clone())) }
}

/// Census of irreducible tagged terms with the action and ε.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KanResult {
    pub terms: Vec<TaggedTerm>,
    /// Term indices grouped by τ.
    pub by_object: BTreeMap<usize, Vec<usize>>,
    /// `(term, arrow) -> term` for every composable arrow.
    pub action: BTreeMap<(usize, usize), usize>,
    /// Element of XA to its normal form `x|id` reduct.
    pub epsilon: Vec<usize>,
}

impl KanResult {
    pub fn index_of(&self, t: &TaggedTerm) -> Option<usize> {
        self.terms.iter().position(|u| u == t)
    }

    pub fn size_of(&self, object: usize) -> usize {
        self.by_object.get(&object).map_or(0, Vec::len)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("enumeration limit {limit} exceeded")]
pub struct KanOverflow {
    pub limit: usize,
    pub rules: MixedRewriteSystem,
    pub partial: Vec<TaggedTerm>,
}

pub fn enumerate_kan(r: &MixedRewriteSystem, pres: &KanPresentation, limit: usize) -> Result<KanResult, KanOverflow> {
    let overflow = |terms: &Vec<TaggedTerm>| KanOverflow { limit, rules: r.clone(), partial: terms.clone() };
    let mut terms: Vec<TaggedTerm> = Vec::new();
    let mut block = Vec::new();
    for x in 0..pres.elements.len() {
        let t = TaggedTerm { tag: x, path: Vec::new() };
        if !is_reducible(&t.encode(), &r.rules) {
            if terms.len() == limit {
                return Err(overflow(&terms));
            }
            terms.push(t.clone());
            block.push(t);
        }
    }
    while !block.is_empty() {
        let mut next = Vec::new();
        for t in &block {
            for b in pres.delta.arrows_from(t.tau(pres)) {
                let u = t.then(b);
                if is_reducible(&u.encode(), &r.rules) {
                    continue;
                }
                if terms.len() == limit {
                    return Err(overflow(&terms));
                }
                terms.push(u.clone());
                next.push(u);
            }
        }
        block = next;
    }
    let index: HashMap<TaggedTerm, usize> = terms.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let lookup = |t: &TaggedTerm| -> usize {
        let n = reduce_term(t, r, pres).expect("well-typed");
        index[&n]
    };
    let mut by_object: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut action = BTreeMap::new();
    for (i, t) in terms.iter().enumerate() {
        by_object.entry(t.tau(pres)).or_default().push(i);
        for b in pres.delta.arrows_from(t.tau(pres)) {
            action.insert((i, b), lookup(&t.then(b)));
        }
    }
    let epsilon = (0..pres.elements.len()).map(|x| lookup(&TaggedTerm { tag: x, path: Vec::new() })).collect();
    Ok(KanResult { terms, by_object, action, epsilon })
}

// ---------------------------------------------------------------------------
// Special cases

/// Data for the classical problems expressible as Kan extensions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpecialCase {
    /// Right cosets of the subgroup generated by `subgroup` words.
    Coset { group: presentations::GroupInput, subgroup: Vec<Vec<String>>, tag: Option<String> },
    /// Classes of the right congruence generated by the word pairs.
    Congruence { monoid: presentations::GroupInput, pairs: Vec<(Vec<String>, Vec<String>)> },
    /// Orbits of a group given by generator actions on points.
    Orbit { points: Vec<String>, actions: BTreeMap<String, Vec<String>> },
    /// Conjugacy classes of a finite group.
    Conjugacy { group: presentations::GroupInput },
    /// Classes of the equivalence relation generated by the pairs.
    Equivalence { points: Vec<String>, pairs: Vec<(String, String)> },
    /// Colimit of a diagram of finite sets.
    Colimit { sets: Vec<(String, Vec<String>)>, maps: Vec<ColimitMap> },
    /// Action of B induced along a morphism F: A -> B from an action of A.
    InducedAction {
        points: Vec<String>,
        actions: BTreeMap<String, Vec<String>>,
        target: presentations::GroupInput,
        images: BTreeMap<String, Vec<String>>,
    },
    /// Normal forms of a monoid.
    MonoidNormalForms { monoid: presentations::GroupInput },
    /// Normal forms of the arrows of a category.
    CategoryNormalForms { category: presentations::PresentationInput },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColimitMap {
    pub src: String,
    pub tgt: String,
    pub table: Vec<String>,
}

fn one_object_delta(letters: &[String], rules: &[Rule<usize>]) -> (Vec<String>, Vec<ArrowInput>, Vec<RelationInput>) {
    let arrows = letters
        .iter()
        .map(|l| ArrowInput { label: l.clone(), src: "*".into(), tgt: "*".into() })
        .collect();
    let names = |w: &[usize]| w.iter().map(|&i| letters[i].clone()).collect::<Vec<_>>();
    let rels = rules
        .iter()
        .map(|(l, r)| RelationInput::Typed { lhs: names(l), rhs: names(r), at: Some("*".into()) })
        .collect();
    (vec!["*".into()], arrows, rels)
}

fn expand(group: &GroupPresentation, w: &[String]) -> Result<Vec<String>, KanError> {
    let mut out = Vec::new();
    for t in w {
        if group.letters.contains(t) {
            out.push(t.clone());
        } else {
            return Err(KanError::Presentation(PresentationError::UnknownArrow(t.clone())));
        }
    }
    Ok(out)
}

/// Completes a finite group and returns its presentation, rules and elements.
pub fn finite_group(
    input: &presentations::GroupInput,
    budget: CompletionBudget,
    limit: usize,
) -> Result<(GroupPresentation, Vec<Rule<usize>>, Vec<Vec<usize>>), KanError> {
    let gp = GroupPresentation::from_input(input)?;
    let rules = presentations::complete(gp.rules.clone(), budget)
        .map_err(|_| invalid("group", 0, "completion budget exhausted"))?;
    let g = Graph::one_object(&gp.letters);
    let census = presentations::enumerate_elements(&g, &rules, limit)
        .map_err(|_| invalid("group", 0, "group is not finite within the limit"))?;
    let elems = census.elements.into_iter().map(|p| p.arrows).collect();
    Ok((gp, rules, elems))
}

impl SpecialCase {
    pub fn build(&self) -> Result<KanPresentation, KanError> {
        KanPresentation::validate(&self.input()?)
    }

    pub fn input(&self) -> Result<KanInput, KanError> {
        match self {
            SpecialCase::Coset { group, subgroup, tag } => {
                let gp = GroupPresentation::from_input(group)?;
                let (ob, arr, rel) = one_object_delta(&gp.letters, &gp.rules);
                let f_arrows = subgroup.iter().map(|w| expand(&gp, w)).collect::<Result<Vec<_>, _>>()?;
                let h = tag.clone().unwrap_or_else(|| "H".into());
                Ok(KanInput {
                    objects_a: vec!["A".into()],
                    arrows_a: vec![("A".into(), "A".into()); subgroup.len()],
                    objects_b: ob,
                    arrows_b: arr,
                    relations_b: rel,
                    f_objects: vec!["*".into()],
                    f_arrows,
                    x_objects: vec![vec![h.clone()]],
                    x_arrows: vec![vec![h]; subgroup.len()],
                })
            }
            SpecialCase::Congruence { monoid, pairs } => {
                let gp = GroupPresentation::from_input(monoid)?;
                let (ob, arr, rel) = one_object_delta(&gp.letters, &gp.rules);
                let mut objects_a = vec!["A0".to_string()];
                let mut arrows_a = Vec::new();
                let mut f_arrows = Vec::new();
                let mut x_objects = vec![vec!["x".to_string()]];
                let mut x_arrows = Vec::new();
                for (i, (u, v)) in pairs.iter().enumerate() {
                    let o = format!("A{}", i + 1);
                    objects_a.push(o.clone());
                    x_objects.push(vec![format!("y{}", i + 1)]);
                    for w in [u, v] {
                        arrows_a.push(("A0".to_string(), o.clone()));
                        f_arrows.push(expand(&gp, w)?);
                        x_arrows.push(vec![format!("y{}", i + 1)]);
                    }
                }
                Ok(KanInput {
                    f_objects: vec!["*".into(); objects_a.len()],
                    objects_a,
                    arrows_a,
                    objects_b: ob,
                    arrows_b: arr,
                    relations_b: rel,
                    f_arrows,
                    x_objects,
                    x_arrows,
                })
            }
            SpecialCase::Orbit { points, actions } => Ok(trivial_delta(
                vec!["A".into()],
                actions.keys().map(|_| ("A".to_string(), "A".to_string())).collect(),
                vec![points.clone()],
                actions.values().cloned().collect(),
            )),
            SpecialCase::Conjugacy { group } => {
                let (gp, rules, elems) = finite_group(group, CompletionBudget::default(), 100_000)?;
                let names: Vec<String> = elems.iter().map(|w| gp.text(w)).collect();
                let index: HashMap<Vec<usize>, usize> = elems.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
                let inverse = |g: usize| -> usize {
                    let w = &elems[g];
                    (0..elems.len())
                        .find(|&h| {
                            let mut v = w.clone();
                            v.extend(&elems[h]);
                            reduce_word(&v, &rules).is_empty()
                        })
                        .expect("finite group element has an inverse")
                };
                let mut actions = Vec::new();
                for gen in 0..gp.letters.len() {
                    let a = index[&reduce_word(&[gen], &rules)];
                    let ainv = inverse(a);
                    let row = (0..elems.len())
                        .map(|x| {
                            let mut v = elems[ainv].clone();
                            v.extend(&elems[x]);
                            v.extend(&elems[a]);
                            names[index[&reduce_word(&v, &rules)]].clone()
                        })
                        .collect();
                    actions.push(row);
                }
                Ok(trivial_delta(
                    vec!["A".into()],
                    vec![("A".into(), "A".into()); gp.letters.len()],
                    vec![names],
                    actions,
                ))
            }
            SpecialCase::Equivalence { points, pairs } => {
                let objects: Vec<String> = points.iter().map(|p| format!("[{p}]")).collect();
                let arrows = pairs.iter().map(|(a, b)| (format!("[{a}]"), format!("[{b}]"))).collect();
                let xs = points.iter().map(|p| vec![p.clone()]).collect();
                let xa = pairs.iter().map(|(_, b)| vec![b.clone()]).collect();
                Ok(trivial_delta(objects, arrows, xs, xa))
            }
            SpecialCase::Colimit { sets, maps } => {
                let objects = sets.iter().map(|(n, _)| n.clone()).collect();
                let arrows = maps.iter().map(|m| (m.src.clone(), m.tgt.clone())).collect();
                let xs = sets.iter().map(|(_, e)| e.clone()).collect();
                let xa = maps.iter().map(|m| m.table.clone()).collect();
                Ok(trivial_delta(objects, arrows, xs, xa))
            }
            SpecialCase::InducedAction { points, actions, target, images } => {
                let gp = GroupPresentation::from_input(target)?;
                let (ob, arr, rel) = one_object_delta(&gp.letters, &gp.rules);
                let mut f_arrows = Vec::new();
                for k in actions.keys() {
                    let w = images.get(k).ok_or_else(|| invalid("images", 0, format!("no image for `{k}`")))?;
                    f_arrows.push(expand(&gp, w)?);
                }
                Ok(KanInput {
                    objects_a: vec!["A".into()],
                    arrows_a: vec![("A".into(), "A".into()); actions.len()],
                    objects_b: ob,
                    arrows_b: arr,
                    relations_b: rel,
                    f_objects: vec!["*".into()],
                    f_arrows,
                    x_objects: vec![points.clone()],
                    x_arrows: actions.values().cloned().collect(),
                })
            }
            SpecialCase::MonoidNormalForms { monoid } => {
                let gp = GroupPresentation::from_input(monoid)?;
                let (ob, arr, rel) = one_object_delta(&gp.letters, &gp.rules);
                Ok(KanInput {
                    objects_a: vec!["A".into()],
                    arrows_a: vec![],
                    objects_b: ob,
                    arrows_b: arr,
                    relations_b: rel,
                    f_objects: vec!["*".into()],
                    f_arrows: vec![],
                    x_objects: vec![vec!["e".into()]],
                    x_arrows: vec![],
                })
            }
            SpecialCase::CategoryNormalForms { category } => Ok(KanInput {
                objects_a: category.objects.clone(),
                arrows_a: vec![],
                objects_b: category.objects.clone(),
                arrows_b: category.arrows.clone(),
                relations_b: category.relations.clone(),
                f_objects: category.objects.clone(),
                f_arrows: vec![],
                x_objects: category.objects.iter().map(|o| vec![format!("[{o}]")]).collect(),
                x_arrows: vec![],
            }),
        }
    }
}

/// Kan input over the trivial one-object category with the null functor.
fn trivial_delta(
    objects_a: Vec<String>,
    arrows_a: Vec<(String, String)>,
    x_objects: Vec<Vec<String>>,
    x_arrows: Vec<Vec<String>>,
) -> KanInput {
    KanInput {
        f_objects: vec!["*".into(); objects_a.len()],
        f_arrows: vec![vec![]; arrows_a.len()],
        objects_a,
        arrows_a,
        objects_b: vec!["*".into()],
        arrows_b: vec![],
        relations_b: vec![],
        x_objects,
        x_arrows,
    }
}

/// Second stage of an iterated extension: `kan<Δ|Λ|RelC|K|G>`.
pub fn compose_kan(
    first_pres: &KanPresentation,
    first: &KanResult,
    lambda: &Graph,
    rel_c: &[Rule<usize>],
    g_obj: &[usize],
    g_arr: &[Vec<usize>],
) -> Result<KanPresentation, KanError> {
    let delta = &first_pres.delta;
    let names: Vec<String> = first.terms.iter().map(|t| first_pres.term_text(t)).collect();
    let raw = KanInput {
        objects_a: delta.objects.clone(),
        arrows_a: delta
            .arrows
            .iter()
            .map(|a| (delta.objects[a.src].clone(), delta.objects[a.tgt].clone()))
            .collect(),
        objects_b: lambda.objects.clone(),
        arrows_b: lambda
            .arrows
            .iter()
            .map(|a| ArrowInput {
                label: a.label.clone(),
                src: lambda.objects[a.src].clone(),
                tgt: lambda.objects[a.tgt].clone(),
            })
            .collect(),
        relations_b: rel_c
            .iter()
            .map(|(l, r)| {
                let n = |w: &[usize]| w.iter().map(|&i| lambda.arrows[i].label.clone()).collect::<Vec<_>>();
                let at = l.first().map(|&a| lambda.objects[lambda.arrows[a].src].clone());
                RelationInput::Typed { lhs: n(l), rhs: n(r), at }
            })
            .collect(),
        f_objects: g_obj.iter().map(|&o| lambda.objects[o].clone()).collect(),
        f_arrows: g_arr.iter().map(|w| w.iter().map(|&i| lambda.arrows[i].label.clone()).collect()).collect(),
        x_objects: (0..delta.objects.len())
            .map(|o| first.by_object.get(&o).map_or(vec![], |ts| ts.iter().map(|&t| names[t].clone()).collect()))
            .collect(),
        x_arrows: (0..delta.arrows.len())
            .map(|b| {
                let src = delta.arrows[b].src;
                first
                    .by_object
                    .get(&src)
                    .map_or(vec![], |ts| ts.iter().map(|&t| names[first.action[&(t, b)]].clone()).collect())
            })
            .collect(),
    };
    KanPresentation::validate(&raw)
}

/// `F` followed by `G` as paths of Λ, for the one-stage comparison.
pub fn compose_functor(first_pres: &KanPresentation, g_obj: &[usize], g_arr: &[Vec<usize>]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let f_obj = first_pres.f_obj.iter().map(|&o| g_obj[o]).collect();
    let f_arr = first_pres.f_arr.iter().map(|p| p.iter().flat_map(|&b| g_arr[b].iter().copied()).collect()).collect();
    (f_obj, f_arr)
}

/// Replaces Δ, RelB and F of a presentation, keeping Γ and X.
pub fn with_functor(
    pres: &KanPresentation,
    lambda: &Graph,
    rel_c: &[Rule<usize>],
    f_obj: Vec<usize>,
    f_arr: Vec<Vec<usize>>,
) -> KanPresentation {
    KanPresentation { delta: lambda.clone(), rel_b: rel_c.to_vec(), f_obj, f_arr, ..pres.clone() }
}

/// Deduplicated set of rule texts, for set comparisons in reports.
pub fn rule_texts(pres: &KanPresentation, r: &MixedRewriteSystem) -> HashSet<String> {
    r.rules.iter().map(|x| pres.rule_text(x)).collect()
}
