#![allow(dead_code)]

use kanrw::kan::{KanInput, KanPresentation, MixedRewriteSystem, SpecialCase, Sym};
use kanrw::presentations::{GroupInput, GroupPresentation, PresentationInput};
use serde::de::DeserializeOwned;
use std::collections::BTreeSet;
use std::path::PathBuf;

pub type NamedRule = (Vec<String>, Vec<String>);

pub fn input_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../inputs").join(name)
}

pub fn read<T: DeserializeOwned>(name: &str) -> T {
    let text = std::fs::read_to_string(input_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn kan(name: &str) -> KanPresentation {
    KanPresentation::validate(&read::<KanInput>(name)).unwrap()
}

pub fn special(name: &str) -> KanPresentation {
    read::<SpecialCase>(name).build().unwrap()
}

pub fn group(name: &str) -> GroupPresentation {
    GroupPresentation::from_input(&read::<GroupInput>(name)).unwrap()
}

pub fn category(name: &str) -> kanrw::presentations::CategoryPresentation {
    read::<PresentationInput>(name).build().unwrap()
}

/// Parses a GAP-style rule list `[ [ x1*b1, y1 ], [ b^4, IdWord ] ]` into
/// pairs of letter-name lists, expanding powers.
pub fn gap_rules(text: &str) -> Vec<NamedRule> {
    let body: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let body = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')).expect("outer brackets");
    let mut out = Vec::new();
    for chunk in body.split("],") {
        let chunk = chunk.trim_start_matches(',').trim_start_matches('[').trim_end_matches(']');
        if chunk.is_empty() {
            continue;
        }
        let (l, r) = chunk.split_once(',').expect("pair");
        out.push((gap_word(l), gap_word(r)));
    }
    out
}

pub fn gap_word(w: &str) -> Vec<String> {
    if w == "IdWord" {
        return Vec::new();
    }
    let mut out = Vec::new();
    for f in w.split('*') {
        match f.split_once('^') {
            Some((n, k)) => {
                let k: usize = k.parse().expect("power");
                out.extend(std::iter::repeat(n.to_string()).take(k));
            }
            None => out.push(f.to_string()),
        }
    }
    out
}

pub fn named(names: &[String], w: &[usize]) -> Vec<String> {
    w.iter().map(|&i| names[i].clone()).collect()
}

pub fn sym_names(pres: &KanPresentation, w: &[Sym]) -> Vec<String> {
    w.iter()
        .map(|s| match *s {
            Sym::Tag(x) => pres.elements[x].clone(),
            Sym::Arr(b) => pres.delta.arrows[b].label.clone(),
        })
        .collect()
}

pub fn kan_rule_set(pres: &KanPresentation, r: &MixedRewriteSystem) -> BTreeSet<NamedRule> {
    r.rules.iter().map(|(l, rr)| (sym_names(pres, l), sym_names(pres, rr))).collect()
}

/// All words over `n` letters of length at most `max_len`, shortest first.
pub fn all_words(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for a in 0..n {
                let mut v: Vec<usize> = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}
