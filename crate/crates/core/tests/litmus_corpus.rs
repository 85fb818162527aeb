use std::path::{Path, PathBuf};

use wmm_core::litmus::{corpus_files, load_litmus, parse_litmus, print_litmus, run_test, Quantifier, RunOptions, Verdict};
use wmm_core::{Backend, State, Variable};

fn corpus() -> Vec<PathBuf> {
    corpus_files(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")).unwrap()
}

#[test]
fn corpus_is_large_enough() {
    assert!(corpus().len() >= 20);
}

#[test]
fn printing_then_parsing_is_identity() {
    for f in corpus() {
        let t = load_litmus(&f).unwrap();
        let printed = print_litmus(&t);
        assert_eq!(parse_litmus(&printed).unwrap(), t, "{}", f.display());
    }
}

#[test]
fn witnesses_satisfy_the_condition() {
    for f in corpus() {
        let t = load_litmus(&f).unwrap();
        let r = run_test(&t, &RunOptions::default());
        match (t.quantifier, r.verdict) {
            (Quantifier::Exists, Some(Verdict::Allowed)) => {
                let w = r.witness.expect("allowed exists test has a witness");
                let s: State = t
                    .variables()
                    .into_iter()
                    .map(|v: Variable| {
                        let value = w[&v.qualified()];
                        (v, value)
                    })
                    .collect();
                assert_ne!(t.condition.eval(&s), 0, "{}", t.name);
            }
            _ => assert!(r.witness.is_none(), "{}", t.name),
        }
    }
}

#[test]
fn verdicts_do_not_depend_on_the_backend() {
    for f in corpus() {
        let t = load_litmus(&f).unwrap();
        let verdicts: Vec<_> = Backend::ALL
            .into_iter()
            .filter(|b| b.supports(t.model))
            .map(|backend| run_test(&t, &RunOptions { backend, ..Default::default() }).verdict)
            .collect();
        assert!(verdicts.len() >= 2, "{}", t.name);
        assert!(verdicts.windows(2).all(|w| w[0] == w[1]), "{}: {verdicts:?}", t.name);
    }
}
