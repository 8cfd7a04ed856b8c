use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use reslab::inverse::invert;
use reslab::oracle::bound_state_estimates;
use reslab::sample::instance_family;
use reslab::states::all_states;
use reslab::{Background, Candidate, GlmOptions, JostData, Perturbation, Tolerances};

fn worked() -> (Background, Perturbation) {
    let bg = Background::new(vec![2.0, 0.5], vec![0.0, 0.0]).unwrap();
    (bg, Perturbation::new(vec![1.0], vec![0.0]))
}

fn generic() -> (Background, Perturbation) {
    let inst = instance_family(7, 12).swap_remove(11);
    (inst.background, inst.perturbation)
}

fn pipeline(c: &mut Criterion) {
    let t = Tolerances::default();
    for (name, (bg, pert)) in [("worked", worked()), ("generic", generic())] {
        let jost = JostData::new(&bg, &pert).unwrap();
        let k = jost.constants();
        let cand = Candidate {
            pair: jost.pair(),
            c1: k.c1,
            c2: k.c2,
        };
        c.bench_function(&format!("{name}/jost"), |b| {
            b.iter(|| JostData::new(black_box(&bg), black_box(&pert)).unwrap())
        });
        c.bench_function(&format!("{name}/states"), |b| {
            b.iter(|| all_states(black_box(&jost), &t).unwrap())
        });
        c.bench_function(&format!("{name}/invert"), |b| {
            b.iter(|| invert(&bg, black_box(&cand), &t, &GlmOptions::default()).unwrap())
        });
        c.bench_function(&format!("{name}/finite_section_500"), |b| {
            b.iter(|| bound_state_estimates(&bg, black_box(&pert), 500, 1e-8).unwrap())
        });
    }
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
