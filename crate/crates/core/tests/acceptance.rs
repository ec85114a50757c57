//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use mvsl::frontend::pretty_print;
use mvsl::oracle::{
    differential_run, differential_run_source, generate_copy_then_mutate, generate_program,
    DiffReport, GenConfig, ALL_ENGINES,
};
use mvsl::runtime::{serialize_array_layout, ByteOrder};
use mvsl::{run_source, Error, ErrorCode, ExecOptions, RunOptions, RuntimeStats, TrapKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn opts(move_opt: bool, cow: bool) -> RunOptions {
    RunOptions {
        move_opt,
        exec: ExecOptions {
            cow,
            check_refcounts: true,
        },
    }
}

fn run(src: &str, o: RunOptions) -> Result<(String, RuntimeStats), String> {
    run_source(src, o)
        .map(|x| (x.output, x.stats))
        .map_err(|e| e.render(src))
}

fn corpus_source(name: &str) -> String {
    std::fs::read_to_string(common::corpus_dir().join(format!("{name}.mvs"))).unwrap()
}

fn criterion_1() -> Outcome {
    let cases = common::corpus();
    for name in [
        "copy",
        "copy_observe",
        "swap",
        "let_mutation",
        "let_array_mutation",
        "recursive_struct",
    ] {
        let case = cases.iter().find(|c| c.name == name).ok_or(format!("missing {name}"))?;
        common::matches(case, RunOptions::default())?;
    }
    // The immutability listings mark their offending line with a comment.
    for name in ["let_mutation", "let_array_mutation"] {
        let src = corpus_source(name);
        let marked = src.lines().position(|l| l.contains("<- type error")).unwrap() + 1;
        match mvsl::check_source(&src) {
            Err(Error::Type(e)) if e.code == ErrorCode::ImmutableTarget => {
                let line = src[..e.span.start].matches('\n').count() + 1;
                ensure(line == marked, || format!("{name}: error on line {line}, marked {marked}"))?;
            }
            other => return Err(format!("{name}: {:?}", other.err())),
        }
    }
    for case in &cases {
        common::matches(case, RunOptions::default())?;
    }
    Ok(format!("{} corpus programs exact", cases.len()))
}

fn criterion_2() -> Outcome {
    let l = serialize_array_layout(&[42, 1337], 2, ByteOrder::Little).map_err(|e| e.to_string())?;
    let got = (l.r, l.n, l.k, l.payload.clone());
    ensure(got == (1, 2, 4, vec![42, 0, 57, 5]), || format!("got {got:?}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for width in [1usize, 2, 4, 8] {
        let bits = 8 * width as u32;
        for _ in 0..100 {
            let len = rng.gen_range(0..16);
            let elems: Vec<i64> = (0..len)
                .map(|_| {
                    if bits == 64 {
                        rng.gen()
                    } else {
                        rng.gen_range(-(1i64 << (bits - 1))..(1i64 << (bits - 1)))
                    }
                })
                .collect();
            let mut le = Vec::new();
            for v in &elems {
                for i in 0..width {
                    le.push(((v >> (8 * i)) & 0xff) as u8);
                }
            }
            let be: Vec<u8> = le.chunks(width).flat_map(|c| c.iter().rev().copied()).collect();
            for (order, bytes) in [(ByteOrder::Little, &le), (ByteOrder::Big, &be)] {
                let l = serialize_array_layout(&elems, width, order).map_err(|e| e.to_string())?;
                ensure(l.n == len && l.k == len * width as u64 && &l.payload == bytes, || {
                    format!("width {width} {order:?} {elems:?}: {:?}", l.payload)
                })?;
            }
        }
    }
    Ok("[42, 1337] -> (1, 2, 4, [42, 0, 57, 5]); 400 random arrays".into())
}

fn criterion_3() -> Outcome {
    let src = corpus_source("copy_elide");
    let (_, on) = run(&src, opts(true, true))?;
    let (_, off) = run(&src, opts(false, true))?;
    ensure(on.deep_copies == 0 && on.moves >= 2, || format!("optimized {}", on.to_json()))?;
    ensure(off.deep_copies >= 2, || format!("unoptimized {}", off.to_json()))?;
    Ok(format!(
        "optimized deep_copies={} moves={}; unoptimized deep_copies={}",
        on.deep_copies, on.moves, off.deep_copies
    ))
}

fn criterion_4() -> Outcome {
    let taken = corpus_source("cow_taken");
    let not_taken = corpus_source("cow_not_taken");
    let (out_n, n) = run(&not_taken, opts(true, true))?;
    let (out_t, t) = run(&taken, opts(true, true))?;
    ensure(n.cow_copies == 0 && n.retains == 1, || format!("not taken {}", n.to_json()))?;
    ensure(t.cow_copies == 1, || format!("taken {}", t.to_json()))?;
    for (src, out) in [(&not_taken, &out_n), (&taken, &out_t)] {
        let (o, s) = run(src, opts(true, false))?;
        ensure(s.deep_copies >= 1 && &o == out, || format!("--no-cow {o} {}", s.to_json()))?;
    }
    Ok(format!(
        "not taken cow_copies=0 retains=1; taken cow_copies={}",
        t.cow_copies
    ))
}

/// Differential reports shared by criteria 5 and 6.
fn reports() -> Result<Vec<(String, DiffReport)>, String> {
    let mut out = Vec::new();
    for case in common::corpus().iter().filter(|c| c.exit != 1) {
        let r = differential_run_source(&case.source, &ALL_ENGINES).map_err(|e| e.to_string())?;
        out.push((case.name.clone(), r));
    }
    for seed in 0..1000 {
        let p = generate_program(&GenConfig::new(seed, 50));
        let r = differential_run(&p, &ALL_ENGINES)
            .map_err(|e| format!("seed {seed} rejected: {e}\n{}", pretty_print(&p)))?;
        out.push((format!("seed {seed}"), r));
    }
    Ok(out)
}

fn criterion_5(reports: &[(String, DiffReport)]) -> Outcome {
    let failed: Vec<&str> = reports
        .iter()
        .filter(|(_, r)| !r.passed())
        .map(|(n, _)| n.as_str())
        .collect();
    ensure(failed.is_empty(), || format!("FAIL on {failed:?}"))?;
    Ok(format!("{} programs PASS under 4 VM configurations", reports.len()))
}

fn criterion_6(reports: &[(String, DiffReport)]) -> Outcome {
    let mut runs = 0;
    for (name, r) in reports {
        for t in r.results.iter().filter(|t| t.trap.is_none()) {
            if let Some(s) = t.stats {
                runs += 1;
                ensure(s.allocs == s.frees && s.retains == s.releases, || {
                    format!("{name} {}: {}", t.config, s.to_json())
                })?;
            }
        }
    }
    Ok(format!("{runs} non-trapping runs balanced"))
}

fn criterion_7() -> Outcome {
    match mvsl::check_source(&corpus_source("overlap_static")) {
        Err(Error::Type(e)) if e.code == ErrorCode::OverlappingInout => {}
        other => return Err(format!("static overlap: {:?}", other.err())),
    }
    let cases = common::corpus();
    let same = cases.iter().find(|c| c.name == "overlap_same_index").unwrap();
    let distinct = cases.iter().find(|c| c.name == "overlap_distinct_index").unwrap();
    for o in [opts(true, true), opts(false, false)] {
        match run_source(&same.source, o) {
            Err(Error::Trap(t)) if t.kind == TrapKind::OverlapViolation => {}
            other => return Err(format!("i == j: {:?}", other.err())),
        }
        let (code, _) = common::outcome(same, o);
        ensure(code == 2, || format!("i == j exit {code}"))?;
        common::matches(distinct, o)?;
    }
    Ok("static OverlappingInout; i == j traps (exit 2); i != j succeeds".into())
}

fn criterion_8() -> Outcome {
    for seed in 0..200 {
        let (prog, base) = generate_copy_then_mutate(&GenConfig::new(seed, 40));
        let expected = differential_run(&base, &ALL_ENGINES[..1]).map_err(|e| e.to_string())?;
        let r = differential_run(&prog, &ALL_ENGINES).map_err(|e| e.to_string())?;
        let want = expected.results[0].output.as_deref();
        let ok = r.passed() && r.results.iter().all(|t| t.output.as_deref() == want);
        ensure(ok, || format!("seed {seed}: {}", r.to_json()))?;
    }
    Ok("200 copy-then-mutate programs leave the original unchanged".into())
}

fn main() -> ExitCode {
    let start = Instant::now();
    let shared = reports();
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "corpus fidelity", criterion_1()),
        (2, "layout", criterion_2()),
        (3, "move elision", criterion_3()),
        (4, "copy-on-write", criterion_4()),
        (5, "oracle equivalence", shared.as_ref().map_err(Clone::clone).and_then(|r| criterion_5(r))),
        (6, "leak freedom", shared.as_ref().map_err(Clone::clone).and_then(|r| criterion_6(r))),
        (7, "exclusivity", criterion_7()),
        (8, "value independence", criterion_8()),
    ];
    let mut failed = 0;
    for (n, name, r) in &results {
        match r {
            Ok(detail) => println!("criterion {n} ({name}): PASS  {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL  {why}");
            }
        }
    }
    println!(
        "{}/{} criteria passed in {:.1}s",
        results.len() - failed,
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
