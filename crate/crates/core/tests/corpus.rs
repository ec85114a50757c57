mod common;

use mvsl::oracle::{differential_run_source, ALL_ENGINES};
use mvsl::{ExecOptions, RunOptions};

fn all_options() -> Vec<RunOptions> {
    let mut v = Vec::new();
    for move_opt in [true, false] {
        for cow in [true, false] {
            v.push(RunOptions {
                move_opt,
                exec: ExecOptions {
                    cow,
                    check_refcounts: true,
                },
            });
        }
    }
    v
}

#[test]
fn corpus_matches_expected_under_every_configuration() {
    let cases = common::corpus();
    assert!(cases.len() >= 20);
    let mut failures = Vec::new();
    for case in &cases {
        for opts in all_options() {
            if let Err(m) = common::matches(case, opts) {
                failures.push(m);
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn accepted_corpus_programs_pass_differentially() {
    for case in common::corpus().iter().filter(|c| c.exit != 1) {
        let r = differential_run_source(&case.source, &ALL_ENGINES).unwrap();
        assert!(r.passed(), "{}: {}", case.name, r.to_json());
        assert!(r.leak_free(), "{}: {}", case.name, r.to_json());
    }
}
