use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use mvsl::oracle::{differential_run_source, interpret_eager, ALL_ENGINES};
use mvsl::{check_program, compile, execute, parse, ExecOptions};
use mvsl_bench::{cow_array, generated, CLOSURES};

fn largest(programs: Vec<String>) -> String {
    programs.into_iter().max_by_key(String::len).unwrap()
}

fn stages(c: &mut Criterion) {
    let programs = [
        ("cow_array", cow_array(1000)),
        ("closures", CLOSURES.to_string()),
        ("generated", largest(generated(32, 400))),
    ];
    for (name, src) in &programs {
        let mut g = c.benchmark_group(*name);
        let ast = parse(src).unwrap();
        let typed = check_program(&ast).unwrap();
        let ir = compile(&typed, true);
        g.bench_function("parse", |b| b.iter(|| parse(black_box(src)).unwrap()));
        g.bench_function("check", |b| b.iter(|| check_program(black_box(&ast)).unwrap()));
        g.bench_function("lower+optimize", |b| b.iter(|| compile(black_box(&typed), true)));
        for cow in [true, false] {
            let opts = ExecOptions {
                cow,
                check_refcounts: false,
            };
            let label = if cow { "execute" } else { "execute-no-cow" };
            g.bench_function(label, |b| b.iter(|| execute(black_box(&ir), opts).unwrap()));
        }
        g.bench_function("oracle", |b| b.iter(|| interpret_eager(black_box(&typed)).unwrap()));
        g.finish();
    }
}

fn differential(c: &mut Criterion) {
    let programs = generated(50, 50);
    c.bench_function("differential/50 generated", |b| {
        b.iter(|| {
            for p in &programs {
                assert!(differential_run_source(p, &ALL_ENGINES).unwrap().passed());
            }
        })
    });
}

criterion_group!(benches, stages, differential);
criterion_main!(benches);
