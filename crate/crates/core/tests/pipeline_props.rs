//! End-to-end properties of the German and Russian fixture grammars.

mod common;

use std::collections::BTreeSet;
use std::sync::OnceLock;

use common::{fixture, german::german_number, goldens};
use lexfst::pipeline::GrammarSet;
use lexfst::{enumerate_paths, Fst, Label, Weight};
use proptest::prelude::*;

/// Path length cap for enumerating fixture lattices.
const MAX_ARCS: usize = 400;

fn german() -> &'static GrammarSet {
    static G: OnceLock<GrammarSet> = OnceLock::new();
    G.get_or_init(|| GrammarSet::load(&fixture("de/de.manifest")).unwrap())
}

fn russian() -> &'static GrammarSet {
    static G: OnceLock<GrammarSet> = OnceLock::new();
    G.get_or_init(|| GrammarSet::load(&fixture("ru/ru.manifest")).unwrap())
}

fn check_goldens(g: &GrammarSet, name: &str) {
    let cases = goldens(name);
    assert!(!cases.is_empty());
    for case in cases {
        let a = g.analyze_text(&case.text).unwrap();
        assert_eq!(
            format!("{}\t{}", a.lexical_string(), a.weight()),
            case.analysis,
            "{}",
            case.text
        );
        assert_eq!(a.phoneme_string(), case.phonemes, "{}", case.text);
    }
}

#[test]
fn german_goldens() {
    check_goldens(german(), "de.txt");
}

#[test]
fn russian_goldens() {
    check_goldens(russian(), "ru.txt");
}

fn labels(g: &GrammarSet, text: &str) -> Vec<Label> {
    text.chars()
        .map(|c| g.table.get(&c.to_string()).unwrap())
        .collect()
}

type Pairs = BTreeSet<(Vec<Label>, Vec<Label>)>;

/// Input/output pairs of `f`, with `drop` removed from the output side.
fn pairs(f: &Fst, drop: Option<Label>) -> Pairs {
    enumerate_paths(f, MAX_ARCS)
        .iter()
        .map(|p| {
            let mut out = p.output();
            out.retain(|&l| Some(l) != drop);
            (p.input(), out)
        })
        .collect()
}

/// Lattice and filtered lattice read exactly the text, the filter keeps a
/// subset of the readings (up to rescued `*` marks), and the selected
/// reading is the cheapest survivor.
fn check_lattice(g: &GrammarSet, text: &str) {
    let lattice = g.analyze(text).unwrap();
    let filtered = g.disambiguate(&lattice).unwrap();
    let input = labels(g, text);
    let star = g.table.get("*");
    let raw = pairs(&lattice, star);
    let kept = pairs(&filtered, None);
    assert!(!kept.is_empty(), "{text}");
    assert!(raw.iter().all(|(i, _)| *i == input), "{text}");
    assert!(kept.is_subset(&raw), "{text}");

    let cheapest = enumerate_paths(&filtered, MAX_ARCS)
        .iter()
        .fold(Weight::zero(), |m, p| m.plus(p.weight));
    let chosen = g.select(&filtered).unwrap();
    assert!(chosen.weight.approx_eq(cheapest, 1e-9), "{text}");
    let chosen_pair = (chosen.input(), chosen.output());
    assert!(kept.contains(&chosen_pair), "{text}");
    assert!(!star.is_some_and(|s| chosen_pair.1.contains(&s)), "{text}");
}

#[test]
fn lattices_of_golden_texts() {
    for case in goldens("de.txt") {
        check_lattice(german(), &case.text);
    }
    for case in goldens("ru.txt") {
        check_lattice(russian(), &case.text);
    }
}

/// Form of процент after a cardinal ending in `n`.
fn percent_form(n: u32) -> &'static str {
    match (n % 100, n % 10) {
        (11..=14, _) => "процентов",
        (_, 1) => "процент",
        (_, 2..=4) => "процента",
        _ => "процентов",
    }
}

fn spelled_words(a: &lexfst::pipeline::Analysis) -> Vec<String> {
    a.mma_string()
        .replace('\'', "")
        .split("{##}")
        .map(String::from)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn german_numbers_match_oracle(n in 0u32..10_000) {
        let a = german().analyze_text(&n.to_string()).unwrap();
        prop_assert_eq!(a.lexical_string(), german_number(n));
    }

    #[test]
    fn german_number_lattices(n in 0u32..10_000) {
        check_lattice(german(), &n.to_string());
    }

    #[test]
    fn russian_percent_agrees_with_number(n in 1u32..1000) {
        let a = russian().analyze_text(&format!("{n}%")).unwrap();
        let words = spelled_words(&a);
        prop_assert_eq!(words.last().map(String::as_str), Some(percent_form(n)));
        let lexical = a.lexical_string();
        prop_assert!(!lexical.contains("{adj}"), "{}", lexical);
    }

    #[test]
    fn russian_percent_adjective_before_noun(n in 1u32..1000) {
        let a = russian().analyze_text(&format!("{n}% скидка")).unwrap();
        let lexical = a.lexical_string();
        prop_assert!(lexical.contains("проц'ентн{adj}{fem}{sg}{nom}"), "{}", lexical);
        prop_assert!(lexical.ends_with("ск'идк{noun}{fem}{inan}{sg}{nom}"), "{}", lexical);
    }

    #[test]
    fn analysis_is_deterministic(n in 1u32..1000) {
        let text = format!("с {n}% скидкой");
        let once = russian().analyze_text(&text).unwrap();
        let twice = russian().analyze_text(&text).unwrap();
        prop_assert_eq!(once.lexical, twice.lexical);
        prop_assert_eq!(once.phonemes, twice.phonemes);
        prop_assert_eq!(once.path.weight, twice.path.weight);
    }
}
