use preslab::logic::{Formula, Quantifier, Term, Vocabulary};
use preslab::syntax::{parse_formula, parse_structures, print_formula, print_structure_file};
use proptest::prelude::*;

fn vocab() -> Vocabulary {
    Vocabulary::new(
        "test",
        [("E".to_string(), 2), ("P".to_string(), 1), ("R".to_string(), 3)],
        ["c0".to_string()],
    )
    .unwrap()
}

fn term() -> impl Strategy<Value = Term> {
    prop_oneof![
        4 => prop::sample::select(vec!["x", "y", "z", "x1"]).prop_map(Term::var),
        1 => Just(Term::constant("c0")),
    ]
}

fn atom() -> impl Strategy<Value = Formula> {
    prop_oneof![
        (term(), term()).prop_map(|(a, b)| Formula::atom("E", [a, b])),
        term().prop_map(|a| Formula::atom("P", [a])),
        (term(), term(), term()).prop_map(|(a, b, c)| Formula::atom("R", [a, b, c])),
        (term(), term()).prop_map(|(a, b)| Formula::eq(a, b)),
    ]
}

fn formula() -> impl Strategy<Value = Formula> {
    atom().prop_recursive(6, 64, 2, |inner| {
        let var = prop::sample::select(vec!["x", "y", "z", "x1"]);
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
            (var.clone(), inner.clone()).prop_map(|(v, f)| Formula::forall(v, f)),
            (var, inner).prop_map(|(v, f)| Formula::exists(v, f)),
        ]
    })
}

fn depth(f: &Formula) -> usize {
    match f {
        Formula::Atom(..) | Formula::Eq(..) => 0,
        Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => 1 + depth(g),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            1 + depth(a).max(depth(b))
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn print_then_parse_is_identity(f in formula()) {
        prop_assume!(depth(&f) <= 6);
        let text = print_formula(&f);
        let back = parse_formula(&text, &vocab());
        prop_assert_eq!(back.as_ref(), Ok(&f), "printed as {}", text);
    }

    #[test]
    fn binding_removes_the_variable(f in formula(), v in prop::sample::select(vec!["x", "y", "z"])) {
        for q in [Quantifier::Forall, Quantifier::Exists] {
            let mut expected = f.free_variables();
            expected.remove(v);
            prop_assert_eq!(Formula::quantified(q, v, f.clone()).free_variables(), expected);
        }
    }

    #[test]
    fn garbage_yields_spanned_errors(text in "[ -~\n]{0,40}") {
        if let Err(e) = parse_formula(&text, &vocab()) {
            prop_assert!(e.span.start <= e.span.end && e.span.end <= text.len(), "{:?} for {:?}", e.span, text);
        }
        if let Err(e) = parse_structures(&text) {
            prop_assert!(e.span.end <= text.len());
        }
    }

    #[test]
    fn mutated_formula_text_never_panics(f in formula(), cut in 0usize..200) {
        let text = print_formula(&f);
        let cut = cut.min(text.len());
        let prefix = &text[..cut];
        if let Err(e) = parse_formula(prefix, &vocab()) {
            prop_assert!(e.span.end <= prefix.len());
        }
    }
}

#[test]
fn structure_files_round_trip() {
    let text = "vocab g { relation E/2; relation P/1; constant c0; }\n\
                structure A : g { universe = { b, a, c }; E = { (a,b), (c,c) }; P = { a, (c) }; c0 = b; }\n\
                structure B : g { universe = { u }; E = { }; P = { }; c0 = u; }";
    let (v, ss) = parse_structures(text).unwrap();
    let printed = print_structure_file(&v, &ss);
    let (v2, ss2) = parse_structures(&printed).unwrap();
    assert_eq!(v, v2);
    assert_eq!(ss, ss2);
    assert_eq!(print_structure_file(&v2, &ss2), printed);
}
