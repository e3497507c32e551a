//! Reduction machines with output: Moore machines for finite Kan
//! extensions and Cayley-graph machines for finite groups.

use crate::kan::{enumerate_kan, KanOverflow, KanPresentation, MixedRewriteSystem, Sym, TaggedTerm};
use crate::presentations::{reduce_word, word_text, Rule};
use serde::Serialize;
use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use thiserror::Error;

pub const START: usize = 0;
pub const DUMP: usize = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MooreMachine {
    pub states: Vec<String>,
    pub letters: Vec<String>,
    /// Total transition table, `delta[state][letter]`.
    pub delta: Vec<Vec<usize>>,
    /// `None` is the output 0 of the start and dump states.
    pub output: Vec<Option<TaggedTerm>>,
}

pub fn build_moore(pres: &KanPresentation, r: &MixedRewriteSystem, limit: usize) -> Result<MooreMachine, KanOverflow> {
    let census = enumerate_kan(r, pres, limit)?;
    let n_tags = pres.elements.len();
    let letters = pres.letter_names();
    let mut states = vec!["s0".to_string(), "d".to_string()];
    states.extend(census.terms.iter().map(|t| pres.term_text(t)));
    let mut output = vec![None, None];
    output.extend(census.terms.iter().cloned().map(Some));
    let mut delta = vec![vec![DUMP; letters.len()]; states.len()];
    for x in 0..n_tags {
        delta[START][x] = 2 + census.epsilon[x];
    }
    for (&(t, b), &u) in &census.action {
        delta[2 + t][n_tags + b] = 2 + u;
    }
    Ok(MooreMachine { states, letters, delta, output })
}

impl MooreMachine {
    pub fn run_word(&self, letters: &[usize]) -> Option<&TaggedTerm> {
        let s = letters.iter().fold(START, |s, &a| self.delta[s][a]);
        self.output[s].as_ref()
    }

    /// The normal form of `t`, or `None` when `t` is not a term.
    pub fn run(&self, pres: &KanPresentation, t: &TaggedTerm) -> Option<&TaggedTerm> {
        let w: Vec<usize> = t
            .encode()
            .into_iter()
            .map(|s| match s {
                Sym::Tag(x) => x,
                Sym::Arr(b) => pres.elements.len() + b,
            })
            .collect();
        self.run_word(&w)
    }

    /// Transitions other than those into the dump state.
    pub fn nontrivial(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (s, row) in self.delta.iter().enumerate() {
            for (a, &t) in row.iter().enumerate() {
                if t != DUMP {
                    out.push((s, a, t));
                }
            }
        }
        out
    }

    pub fn dot(&self) -> String {
        let mut out = String::from("digraph moore {\n  rankdir=LR;\n");
        for (s, name) in self.states.iter().enumerate() {
            if s != DUMP {
                let _ = writeln!(out, "  n{s} [label=\"{name}\"];");
            }
        }
        for (s, a, t) in self.nontrivial() {
            let _ = writeln!(out, "  n{s} -> n{t} [label=\"{}\"];", self.letters[a]);
        }
        out.push_str("}\n");
        out
    }
}

// ---------------------------------------------------------------------------
// Cayley graphs

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CayleyError {
    #[error("group has more than {0} elements")]
    Overflow(usize),
    #[error("unknown letter {0}")]
    UnknownLetter(usize),
    #[error("no edge into vertex {vertex} labelled {letter}")]
    NoInverse { vertex: usize, letter: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CayleyEdge {
    pub src: usize,
    pub letter: usize,
    pub tgt: usize,
    pub tree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CayleyGraph {
    pub letters: Vec<String>,
    /// Normal forms, in the order the vertices were reached.
    pub labels: Vec<Vec<usize>>,
    pub edges: Vec<CayleyEdge>,
    /// `next[v][x]` is the target of the edge `[v, x]`.
    pub next: Vec<Vec<usize>>,
}

/// How inverse letters are handled by [`cayley_normal_form`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InverseMode {
    /// Traverse the unique in-edge with the letter backwards.
    #[default]
    Backwards,
    /// Replace `x^-1` by `x^(k-1)` where `k` is the order of `x`.
    Power,
}

/// Grows the tree breadth first from `id`, taking letters in order; an edge
/// is a tree edge when its target is new.
pub fn build_cayley<S: AsRef<str>>(letters: &[S], rules: &[Rule<usize>], limit: usize) -> Result<CayleyGraph, CayleyError> {
    let mut labels: Vec<Vec<usize>> = vec![Vec::new()];
    let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(Vec::new(), 0)]);
    let mut edges = Vec::new();
    let mut next = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let mut row = Vec::new();
        for x in 0..letters.len() {
            let mut w = labels[v].clone();
            w.push(x);
            let w = reduce_word(&w, rules);
            let (t, fresh) = match index.get(&w) {
                Some(&t) => (t, false),
                None => {
                    if labels.len() == limit {
                        return Err(CayleyError::Overflow(limit));
                    }
                    labels.push(w.clone());
                    index.insert(w, labels.len() - 1);
                    queue.push_back(labels.len() - 1);
                    (labels.len() - 1, true)
                }
            };
            edges.push(CayleyEdge { src: v, letter: x, tgt: t, tree: fresh });
            row.push(t);
        }
        if next.len() <= v {
            next.resize(v + 1, Vec::new());
        }
        next[v] = row;
    }
    Ok(CayleyGraph { letters: letters.iter().map(|s| s.as_ref().to_string()).collect(), labels, edges, next })
}

impl CayleyGraph {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label_text(&self, v: usize) -> String {
        word_text(&self.letters, &self.labels[v])
    }

    pub fn vertex_of(&self, label: &[usize]) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn tree_edges(&self) -> impl Iterator<Item = &CayleyEdge> {
        self.edges.iter().filter(|e| e.tree)
    }

    /// Order of the element represented by a letter.
    pub fn letter_order(&self, x: usize) -> usize {
        let mut v = self.next[0][x];
        let mut k = 1;
        while v != 0 {
            v = self.next[v][x];
            k += 1;
        }
        k
    }

    pub fn step(&self, v: usize, x: usize, sign: i64, mode: InverseMode) -> Result<usize, CayleyError> {
        if x >= self.letters.len() {
            return Err(CayleyError::UnknownLetter(x));
        }
        if sign >= 0 {
            return Ok(self.next[v][x]);
        }
        match mode {
            InverseMode::Backwards => {
                (0..self.len()).find(|&u| self.next[u][x] == v).ok_or(CayleyError::NoInverse { vertex: v, letter: x })
            }
            InverseMode::Power => {
                let k = self.letter_order(x);
                Ok((1..k).fold(v, |u, _| self.next[u][x]))
            }
        }
    }

    pub fn dot(&self) -> String {
        let mut out = String::from("digraph cayley {\n");
        for v in 0..self.len() {
            let _ = writeln!(out, "  n{v} [label=\"{}\"];", self.label_text(v));
        }
        for e in &self.edges {
            let style = if e.tree { "bold" } else { "dashed" };
            let _ = writeln!(out, "  n{} -> n{} [label=\"{}\", style={style}];", e.src, e.tgt, self.letters[e.letter]);
        }
        out.push_str("}\n");
        out
    }
}

/// Walks from `id`; syllables are `(letter, exponent)`.
pub fn cayley_normal_form(g: &CayleyGraph, w: &[(usize, i64)], mode: InverseMode) -> Result<usize, CayleyError> {
    let mut v = 0;
    for &(x, e) in w {
        for _ in 0..e.unsigned_abs() {
            v = g.step(v, x, e.signum(), mode)?;
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_group_has_one_vertex() {
        let g = build_cayley(&["a"], &[(vec![0], vec![])], 10).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(cayley_normal_form(&g, &[], InverseMode::Backwards), Ok(0));
        assert_eq!(g.tree_edges().count(), 0);
    }

    #[test]
    fn cyclic_inverse_modes_agree() {
        let g = build_cayley(&["a"], &[(vec![0; 5], vec![])], 10).unwrap();
        for e in -7..7 {
            let a = cayley_normal_form(&g, &[(0, e)], InverseMode::Backwards).unwrap();
            let b = cayley_normal_form(&g, &[(0, e)], InverseMode::Power).unwrap();
            assert_eq!(a, b);
            assert_eq!(g.labels[a].len() as i64, e.rem_euclid(5));
        }
    }
}
