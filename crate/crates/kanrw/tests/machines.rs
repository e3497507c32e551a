mod common;

use common::*;
use kanrw::kan::*;
use kanrw::machines::*;
use kanrw::presentations::{complete, reduce_word, CompletionBudget, Rule};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use std::collections::{BTreeSet, HashMap};

fn moore_example() -> (KanPresentation, MixedRewriteSystem, MooreMachine) {
    let p = kan("moore_example.json");
    let r = complete_kan(&initial_rules(&p), CompletionBudget::default()).unwrap();
    let m = build_moore(&p, &r, 1000).unwrap();
    (p, r, m)
}

fn group_graph(name: &str) -> (Vec<String>, Vec<Rule<usize>>, CayleyGraph) {
    let gp = group(name);
    let rules = complete(gp.rules.clone(), CompletionBudget::default()).unwrap();
    let g = build_cayley(&gp.letters, &rules, 1000).unwrap();
    (gp.letters.clone(), rules, g)
}

fn label_set(g: &CayleyGraph) -> BTreeSet<String> {
    (0..g.len()).map(|v| g.label_text(v)).collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[test]
fn moore_states_and_outputs() {
    let (p, _, m) = moore_example();
    assert_eq!(m.states.len(), 16);
    assert_eq!(m.output[START], None);
    assert_eq!(m.output[DUMP], None);
    let outputs: BTreeSet<String> = m.output.iter().flatten().map(|t| p.term_text(t)).collect();
    let listed = set(&[
        "x1|id", "x2|id", "x3|id", "y1|id", "y2|id", "x1|b1", "x2|b1", "x3|b1", "x1|b1b2", "x2|b1b2",
        "x3|b1b2", "x1|b1b2b5", "x2|b1b2b5", "x3|b1b2b5",
    ]);
    assert_eq!(outputs, listed);
    assert!(m.delta.iter().all(|row| row.len() == m.letters.len()));
    assert!(m.delta[DUMP].iter().all(|&t| t == DUMP));
}

#[test]
fn moore_transitions() {
    let (p, r, m) = moore_example();
    let l = |n: &str| m.letters.iter().position(|x| x == n).unwrap();
    let s = |n: &str| m.states.iter().position(|x| x == n).unwrap();
    // the transitions of the worked example that are consistent with its own X
    let listed = [
        ("s0", "x1", "x1|id"), ("s0", "x2", "x2|id"), ("s0", "x3", "x3|id"), ("s0", "y1", "y1|id"),
        ("s0", "y2", "y2|id"), ("x1|id", "b1", "x1|b1"), ("x2|id", "b1", "x2|b1"), ("x1|b1", "b2", "x1|b1b2"),
        ("x1|b1", "b4", "y1|id"), ("x2|b1", "b2", "x2|b1b2"), ("x2|b1", "b4", "y2|id"), ("x3|b1", "b2", "x3|b1b2"),
        ("x3|b1", "b4", "y2|id"), ("x1|b1b2", "b5", "x1|b1b2b5"),
    ];
    for (a, x, b) in listed {
        assert_eq!(m.delta[s(a)][l(x)], s(b), "{a} -{x}->");
    }
    assert_eq!(m.nontrivial().len(), 26);
    // every class transition is reduction of the extended representative
    for (st, a, t) in m.nontrivial() {
        if st == START {
            continue;
        }
        let rep = m.output[st].clone().unwrap();
        let b = a - p.elements.len();
        assert_eq!(m.output[t].as_ref(), Some(&reduce_term(&rep.then(b), &r, &p).unwrap()));
    }
    let t = p.term("x1", &["b1", "b4"]).unwrap();
    assert_eq!(p.term_text(m.run(&p, &t).unwrap()), "y1|id");
}

#[test]
fn moore_rejects_ill_typed() {
    let (p, _, m) = moore_example();
    let b = |n: &str| p.delta.arrow(n).unwrap();
    assert_eq!(m.run(&p, &TaggedTerm { tag: 0, path: vec![b("b2")] }), None);
    assert_eq!(m.run(&p, &TaggedTerm { tag: 0, path: vec![b("b1"), b("b3")] }), None);
    assert_eq!(m.run_word(&[]), None);
    assert_eq!(m.run_word(&[0, 1]), None);
    assert_eq!(m.run_word(&[p.elements.len()]), None);
}

#[test]
fn moore_agrees_with_reduction() {
    let (p, r, m) = moore_example();
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let n = p.letter_names().len();
    let mut typed = 0;
    for _ in 0..500 {
        let tag = rng.gen_range(0..p.elements.len());
        let len = rng.gen_range(0..9);
        let mut t = TaggedTerm { tag, path: vec![] };
        for _ in 0..len {
            let out: Vec<usize> = p.delta.arrows_from(t.tau(&p)).collect();
            if out.is_empty() {
                break;
            }
            t = t.then(out[rng.gen_range(0..out.len())]);
        }
        assert_eq!(m.run(&p, &t), Some(&reduce_term(&t, &r, &p).unwrap()));
        typed += 1;
    }
    assert_eq!(typed, 500);
    // arbitrary letter strings: output exactly when the string is a term
    for _ in 0..500 {
        let w: Vec<usize> = (0..rng.gen_range(0..7)).map(|_| rng.gen_range(0..n)).collect();
        let syms: Vec<Sym> = w
            .iter()
            .map(|&l| if l < p.elements.len() { Sym::Tag(l) } else { Sym::Arr(l - p.elements.len()) })
            .collect();
        match p.parse_word(&syms) {
            Some(t) => assert_eq!(m.run_word(&w), Some(&reduce_term(&t, &r, &p).unwrap())),
            None => assert_eq!(m.run_word(&w), None),
        }
    }
}

#[test]
fn trivial_presentation_machine() {
    let case = SpecialCase::Colimit { sets: vec![("S".into(), vec!["u".into(), "v".into()])], maps: vec![] };
    let p = case.build().unwrap();
    let r = initial_rules(&p);
    let m = build_moore(&p, &r, 10).unwrap();
    assert_eq!(m.states, ["s0", "d", "u|id", "v|id"]);
    let p = kan("kan_example.json");
    let r = complete_kan(&initial_rules(&p), CompletionBudget::default()).unwrap();
    assert!(build_moore(&p, &r, 50).is_err());
}

#[test]
fn cayley_labels() {
    let (_, _, s3) = group_graph("s3.json");
    assert_eq!(label_set(&s3), set(&["id", "x", "y", "x^2", "xy", "yx"]));
    let (_, _, d8) = group_graph("d8.json");
    assert_eq!(label_set(&d8), set(&["id", "a", "b", "a^2", "ab", "ba", "a^3", "a^2b"]));
    assert_eq!(d8.label_text(0), "id");
}

#[test]
fn d8_tree_as_drawn() {
    let (_, _, g) = group_graph("d8.json");
    let tree: BTreeSet<(String, String, String)> = g
        .tree_edges()
        .map(|e| (g.label_text(e.src), g.letters[e.letter].clone(), g.label_text(e.tgt)))
        .collect();
    let drawn: BTreeSet<(String, String, String)> = [
        ("id", "a", "a"), ("id", "b", "b"), ("a", "a", "a^2"), ("a", "b", "ab"),
        ("b", "a", "ba"), ("a^2", "a", "a^3"), ("a^2", "b", "a^2b"),
    ]
    .iter()
    .map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string()))
    .collect();
    assert_eq!(tree, drawn);
    // the remaining drawn edges
    let v = |l: &str| (0..g.len()).find(|&v| g.label_text(v) == l).unwrap();
    let a = 0;
    for (src, tgt) in [("a^3", "id"), ("ba", "a^2b"), ("a^2b", "ab"), ("ab", "b")] {
        assert_eq!(g.next[v(src)][a], v(tgt));
    }
}

#[test]
fn d8_normal_form_of_worked_word() {
    let (_, _, g) = group_graph("d8.json");
    let w = [(0, 1), (1, 1), (0, 3), (1, 1)];
    for mode in [InverseMode::Backwards, InverseMode::Power] {
        let v = cayley_normal_form(&g, &w, mode).unwrap();
        assert_eq!(g.label_text(v), "a^2");
    }
    assert_eq!(cayley_normal_form(&g, &[], InverseMode::Backwards), Ok(0));
    assert_eq!(cayley_normal_form(&g, &[(5, 1)], InverseMode::Backwards), Err(CayleyError::UnknownLetter(5)));
}

/// Breadth-first over all positive words: the first word to reach each
/// element is its lenlex-least representative.
fn least_words(letters: usize, rules: &[Rule<usize>], max_len: usize) -> HashMap<Vec<usize>, Vec<usize>> {
    let mut out = HashMap::new();
    for w in all_words(letters, max_len) {
        out.entry(reduce_word(&w, rules)).or_insert(w);
    }
    out
}

#[test]
fn cayley_structure() {
    for name in ["s3.json", "d8.json", "q8.json"] {
        let (letters, rules, g) = group_graph(name);
        assert!(g.len() <= 12);
        assert_eq!(g.tree_edges().count(), g.len() - 1, "{name}");
        // spanning: every vertex reached from id by tree edges
        let mut seen = vec![false; g.len()];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            for e in g.tree_edges().filter(|e| e.src == v) {
                assert!(!seen[e.tgt]);
                seen[e.tgt] = true;
                stack.push(e.tgt);
            }
        }
        assert!(seen.iter().all(|&s| s));
        // labels are lenlex-least representatives
        let least = least_words(letters.len(), &rules, 7);
        assert_eq!(least.len(), g.len());
        for v in 0..g.len() {
            assert_eq!(least[&reduce_word(&g.labels[v], &rules)], g.labels[v], "{name}: {}", g.label_text(v));
        }
        // agreement with rewriting on positive words
        for w in all_words(letters.len(), 5) {
            let syl: Vec<(usize, i64)> = w.iter().map(|&x| (x, 1)).collect();
            let v = cayley_normal_form(&g, &syl, InverseMode::Backwards).unwrap();
            assert_eq!(g.labels[v], reduce_word(&w, &rules));
        }
    }
}

#[test]
fn trivial_group() {
    let g = build_cayley(&["a", "b"], &[(vec![0], vec![]), (vec![1], vec![])], 5).unwrap();
    assert_eq!(g.len(), 1);
    assert_eq!(label_set(&g), set(&["id"]));
    assert!(matches!(build_cayley(&["a"], &[], 5), Err(CayleyError::Overflow(5))));
}

fn syllables() -> impl Strategy<Value = Vec<(usize, i64)>> {
    prop::collection::vec((0usize..2, -4i64..5), 0..8)
}

proptest! {
    #[test]
    fn walk_invariance(w1 in syllables(), w2 in syllables()) {
        let (_, _, g) = group_graph("d8.json");
        for mode in [InverseMode::Backwards, InverseMode::Power] {
            let n1 = cayley_normal_form(&g, &w1, mode).unwrap();
            let mut whole = w1.clone();
            whole.extend(&w2);
            let mut via: Vec<(usize, i64)> = g.labels[n1].iter().map(|&x| (x, 1)).collect();
            via.extend(&w2);
            prop_assert_eq!(cayley_normal_form(&g, &whole, mode).unwrap(), cayley_normal_form(&g, &via, mode).unwrap());
        }
        let a = cayley_normal_form(&g, &w1, InverseMode::Backwards).unwrap();
        let b = cayley_normal_form(&g, &w1, InverseMode::Power).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn inverse_words_cancel(w in syllables()) {
        let (_, _, g) = group_graph("s3.json");
        let mut both = w.clone();
        both.extend(w.iter().rev().map(|&(x, e)| (x, -e)));
        prop_assert_eq!(cayley_normal_form(&g, &both, InverseMode::Backwards).unwrap(), 0);
    }
}
