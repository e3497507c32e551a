mod common;

use common::*;
use kanrw::presentations::*;
use proptest::prelude::*;
use kanrw::presentations::Strategy as Side;
use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};

fn coset_group() -> GroupPresentation {
    let case: serde_json::Value = read("coset_c2.json");
    GroupPresentation::from_input(&serde_json::from_value(case["group"].clone()).unwrap()).unwrap()
}

#[test]
fn lenlex_on_paths() {
    let g = Graph::one_object(&["a", "b"]);
    let p = |s: &[&str]| g.path(s, Some("*")).unwrap();
    assert_eq!(lenlex_compare(&p(&["a", "a"]), &p(&["b"]), &g), Ok(Ordering::Greater));
    assert_eq!(lenlex_compare(&p(&["a"]), &p(&["a"]), &g), Ok(Ordering::Equal));
    assert_eq!(lenlex_compare(&p(&["a", "b"]), &p(&["a", "a"]), &g), Ok(Ordering::Greater));
    assert!(g.word(&["c"]).is_err());
}

#[test]
fn reduce_path_under_listed_group_rules() {
    let g = Graph::one_object(&["a", "b", "c"]);
    let listed = gap_rules(
        "[ [ a^2*b, b*a ], [ a^2*c, c*a ], [ a*b^2, b^2 ], [ a*b*c, c*b ], [ a*c*b, c*b ], [ b*a^2, b*a ],
           [ b*a*b, b^2 ], [ b*a*c, c*b ], [ b^2*a, b^2 ], [ b*c*a, c*b ], [ b*c*b, b^2*c ], [ c*a*b, c*b ],
           [ c*b*a, c*b ], [ c*b^2, b^2*c ], [ c*b*c, b^2 ], [ c^2*b, b^2 ], [ b^4, b^2 ], [ b^3*c, c*b ],
           [ b^2*c^2, b^3 ], [ b*c^2*a, b^2 ], [ c*a*c*a, b ], [ c^2*a^2, b*a ], [ c^3*a, c*b ], [ c*a*c^2*a, c*b ] ]",
    );
    let rules: Vec<PathRule> = listed
        .iter()
        .map(|(l, r)| PathRule { lhs: g.path(l, Some("*")).unwrap(), rhs: g.path(r, Some("*")).unwrap() })
        .collect();
    let b = |n: usize| g.path(&vec!["b"; n], Some("*")).unwrap();
    assert_eq!(reduce_path(&b(4), &rules, &g).unwrap(), b(2));
    assert_eq!(reduce_path(&b(5), &rules, &g).unwrap(), b(3));
    let free = g.path(&["a", "c", "a"], Some("*")).unwrap();
    assert_eq!(reduce_path(&free, &[], &g).unwrap(), free);
}

#[test]
fn coset_group_completion_agrees_on_powers_of_b() {
    let gp = coset_group();
    let rules = complete(gp.rules.clone(), CompletionBudget::default()).unwrap();
    assert!(is_locally_confluent(&rules));
    assert_eq!(reduce_word(&[1, 1, 1, 1], &rules), vec![1, 1]);
    // a^n and c^n stay irreducible, so the group is infinite
    for n in 1..12 {
        assert_eq!(reduce_word(&vec![0; n], &rules), vec![0; n]);
        assert_eq!(reduce_word(&vec![2; n], &rules), vec![2; n]);
    }
}

#[test]
fn s3_groupoid_completes_to_36_rules() {
    let pres = category("s3_groupoid.json");
    assert_eq!(pres.relations.len(), 18);
    let done = complete_presentation(&pres, CompletionBudget::default()).unwrap();
    assert_eq!(done.rules.len(), 36);
    let census = enumerate_elements(&done.graph, &done.word_rules(), 1000).unwrap();
    assert_eq!(census.identities(), 6);
    assert_eq!(census.elements.len() - census.identities(), 30);
    for r in &done.rules {
        assert!(r.lhs.is_well_typed(&done.graph) && r.rhs.is_well_typed(&done.graph));
        assert_eq!(r.lhs.target(&done.graph), r.rhs.target(&done.graph));
    }
}

#[test]
fn complete_category_is_unchanged() {
    let pres = category("category_example.json");
    let done = complete_presentation(&pres, CompletionBudget::default()).unwrap();
    let before: HashSet<_> = pres.word_rules().into_iter().collect();
    let after: HashSet<_> = done.word_rules().into_iter().collect();
    assert_eq!(before, after);
}

#[test]
fn normalize_examples() {
    let g = Graph::one_object(&["a", "b"]);
    let r = |l: &[&str], rr: &[&str]| PathRule { lhs: g.path(l, Some("*")).unwrap(), rhs: g.path(rr, Some("*")).unwrap() };
    let dup = vec![r(&["a"], &["b"]), r(&["a"], &["b"])];
    assert_eq!(normalize_system(&dup, &g).len(), 1);
    let done = vec![r(&["b", "a"], &["a", "b"]), r(&["a", "a"], &[])];
    let again = normalize_system(&done, &g);
    let set = |rs: &[PathRule]| rs.iter().map(|x| (x.lhs.arrows.clone(), x.rhs.arrows.clone())).collect::<HashSet<_>>();
    assert_eq!(set(&again), set(&done));
}

#[test]
fn enumeration_edge_cases() {
    let g = Graph::new(["P".to_string(), "Q".to_string()], Vec::<(String, String, String)>::new()).unwrap();
    let c = enumerate_elements(&g, &[], 10).unwrap();
    assert_eq!(c.elements.len(), 2);
    assert_eq!(c.identities(), 2);
    let g = Graph::one_object(&["a"]);
    let err = enumerate_elements(&g, &[], 10).unwrap_err();
    let lens: Vec<usize> = err.partial.elements.iter().map(|p| p.arrows.len()).collect();
    assert_eq!(lens, (0..10).collect::<Vec<_>>());
}

#[test]
fn budget_exhaustion_is_reported() {
    // x y x = y x y does not complete under length-lex with x < y
    let pres = CategoryPresentation::monoid(&["x", "y"], &[(vec![1, 0, 1], vec![0, 1, 0])]);
    let err = complete_presentation(&pres, CompletionBudget { max_rules: 50, max_passes: 4 }).unwrap_err();
    assert!(!err.partial.rules.is_empty());
}

#[test]
fn group_input_errors() {
    let mut input = GroupInput { generators: vec!["a".into(), "a".into()], ..Default::default() };
    assert!(matches!(GroupPresentation::from_input(&input), Err(PresentationError::Duplicate(_))));
    input.generators = vec!["a".into()];
    input.relators = vec![RelatorInput { label: "r".into(), word: vec!["a^-1".into()] }];
    assert!(matches!(GroupPresentation::from_input(&input), Err(PresentationError::NoInverse(_))));
    input.formal_inverses = true;
    let gp = GroupPresentation::from_input(&input).unwrap();
    assert_eq!(gp.letters, vec!["a", "a^-1"]);
}

#[test]
fn exponent_words_parse() {
    let names = ["a", "b"];
    assert_eq!(parse_exponent_word("aba^3b", &names).unwrap(), vec![(0, 1), (1, 1), (0, 3), (1, 1)]);
    assert_eq!(parse_exponent_word("a^-2 * b", &names).unwrap(), vec![(0, -2), (1, 1)]);
    assert_eq!(parse_exponent_word("id", &names).unwrap(), vec![]);
    assert!(parse_exponent_word("ac", &names).is_err());
}

// ---------------------------------------------------------------------------
// properties

/// Whether `u` and `v` are connected by at most `depth` uses of the
/// relations in either direction, through words of length at most `cap`.
fn joinable(u: &[usize], v: &[usize], rels: &[Rule<usize>], depth: usize, cap: usize) -> bool {
    let both: Vec<Rule<usize>> = rels.iter().flat_map(|(l, r)| [(l.clone(), r.clone()), (r.clone(), l.clone())]).collect();
    // every replacement of an occurrence of one side by the other, including
    // insertion of a side that is empty
    let neighbours = |w: &[usize]| -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for (l, r) in &both {
            for i in 0..=w.len() {
                if i + l.len() <= w.len() && w[i..i + l.len()] == l[..] {
                    let mut v = w[..i].to_vec();
                    v.extend_from_slice(r);
                    v.extend_from_slice(&w[i + l.len()..]);
                    out.push(v);
                }
            }
        }
        out
    };
    let mut seen = HashSet::from([u.to_vec()]);
    let mut queue = VecDeque::from([(u.to_vec(), 0)]);
    while let Some((w, d)) = queue.pop_front() {
        if w == v {
            return true;
        }
        if d == depth {
            continue;
        }
        for n in neighbours(&w) {
            if n.len() <= cap && seen.insert(n.clone()) {
                queue.push_back((n, d + 1));
            }
        }
    }
    false
}

fn desk_systems() -> Vec<(Vec<Rule<usize>>, usize)> {
    let s3 = group("s3.json");
    let d8 = group("d8.json");
    let q8 = group("q8.json");
    vec![(s3.rules, 2), (d8.rules, 2), (q8.rules, 2)]
}

#[test]
fn completed_rules_follow_from_the_originals() {
    for (orig, _) in desk_systems() {
        let done = complete(orig.clone(), CompletionBudget::default()).unwrap();
        for (l, r) in &orig {
            assert_eq!(reduce_word(l, &done), reduce_word(r, &done));
        }
        for (l, r) in &done {
            let cap = orig.iter().map(|(a, _)| a.len()).max().unwrap() + l.len() + 2;
            assert!(joinable(l, r, &orig, 14, cap), "{l:?} -> {r:?}");
        }
    }
}

fn small_system() -> impl proptest::strategy::Strategy<Value = Vec<Rule<usize>>> {
    let word = prop::collection::vec(0usize..2, 0..4);
    prop::collection::vec((word.clone(), word), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn completion_orients_and_is_confluent(rules in small_system()) {
        if let Ok(done) = complete(rules, CompletionBudget { max_rules: 40, max_passes: 8 }) {
            for (l, r) in &done {
                prop_assert_eq!(lenlex(l, r), Ordering::Greater);
            }
            prop_assert!(is_locally_confluent(&done));
        }
    }

    #[test]
    fn strategies_agree_after_completion(rules in small_system(), words in prop::collection::vec(prop::collection::vec(0usize..2, 0..12), 50)) {
        if let Ok(done) = complete(rules, CompletionBudget { max_rules: 40, max_passes: 8 }) {
            for w in &words {
                prop_assert_eq!(reduce_with(w, &done, Side::Leftmost), reduce_with(w, &done, Side::Rightmost));
            }
        }
    }

    #[test]
    fn groupoid_reduction_keeps_type(seed in prop::collection::vec(0usize..12, 1..20)) {
        let pres = category("s3_groupoid.json");
        let done = complete_presentation(&pres, CompletionBudget::default()).unwrap();
        let g = &done.graph;
        // walk the graph, choosing among outgoing arrows by the seed
        let mut p = PathWord::identity(seed[0] % g.objects.len());
        for &s in &seed[1..] {
            let outs: Vec<usize> = g.arrows_from(p.target(g)).collect();
            p.arrows.push(outs[s % outs.len()]);
        }
        let n = reduce_path(&p, &done.rules, g).unwrap();
        prop_assert_eq!(n.source, p.source);
        prop_assert_eq!(n.target(g), p.target(g));
        prop_assert!(!is_reducible(&n.arrows, &done.word_rules()));
    }
}

/// Whether `v` arises from `u` by replacing one occurrence of a side of a
/// relation by the other side.
fn one_move(u: &[usize], v: &[usize], rels: &[Rule<usize>]) -> bool {
    rels.iter().flat_map(|(l, r)| [(l, r), (r, l)]).any(|(l, r)| {
        (0..=u.len()).any(|i| {
            i + l.len() <= u.len() && u[i..i + l.len()] == l[..] && {
                let mut w = u[..i].to_vec();
                w.extend_from_slice(r);
                w.extend_from_slice(&u[i + l.len()..]);
                w == v
            }
        })
    })
}

#[test]
fn coset_group_has_b_cubed_equal_b_squared() {
    let gp = coset_group();
    let chain = "bbb bcacab bcacacaca bcabca bccccba bccccaab bcccaacab bccaacacab bccaabb bccbab cacaccbab \
                 caaacccbab caaaabcab caabacab cbaacab cbcaab ccacacaab ccabab ccaaabb ccaaacacab ccacaacab \
                 cbacab caabcab caacacacab ccaacacab cccaacab ccccaab ccccba cabca cacacaca bcaca bb";
    let words: Vec<Vec<usize>> = chain.split_whitespace().map(|w| w.bytes().map(|c| (c - b'a') as usize).collect()).collect();
    for pair in words.windows(2) {
        assert!(one_move(&pair[0], &pair[1], &gp.rules), "{:?} => {:?}", pair[0], pair[1]);
    }
    let rules = complete(gp.rules.clone(), CompletionBudget::default()).unwrap();
    assert_eq!(rules.len(), 23);
    assert!(rules.contains(&(vec![1, 1, 1], vec![1, 1])));
}
