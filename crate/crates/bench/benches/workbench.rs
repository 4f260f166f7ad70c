//! Benchmarks for the three hot paths: exponential construction in the
//! sheaf topos, proof checking, and the bounded countermodel search.

use criterion::{criterion_group, criterion_main, Criterion};

use tlw_core::deduction::{check_proof, default_fuzz_theory, random_derivation};
use tlw_core::finspace::FinSpace;
use tlw_core::semantics::{search_countermodel, Flavor, SearchBounds};
use tlw_core::sheaf::{exponential, Sheaf};
use tlw_core::syntax::{parse_term, parse_theory, Context, Mode};

fn bench_exponential(c: &mut Criterion) {
    let base = FinSpace::from_subbasis(
        &["a", "b", "c"],
        &[vec!["a"], vec!["a", "b"]],
    )
    .unwrap();
    let f = Sheaf::constant(base.clone(), 3);
    let g = Sheaf::constant(base, 2);
    c.bench_function("exponential F^G, constant 3^2 over a 3-chain", |b| {
        b.iter(|| exponential(&f, &g).unwrap())
    });
}

fn bench_proof_checking(c: &mut Criterion) {
    let thy = default_fuzz_theory(Mode::HolClassical);
    let trees: Vec<_> = (0..32).map(|i| random_derivation(i, 6, &thy)).collect();
    c.bench_function("check 32 random depth-6 derivations", |b| {
        b.iter(|| {
            for t in &trees {
                assert!(check_proof(t, &thy).is_valid());
            }
        })
    });
}

fn bench_countermodel(c: &mut Criterion) {
    let thy = parse_theory("% mode lambda\nrel p : ();").unwrap();
    let sigma = parse_term("p() \\/ ~p()", &thy.signature, &Context::empty()).unwrap();
    let bounds = SearchBounds {
        max_points: 2,
        max_stalk: 2,
    };
    c.bench_function("countermodel for excluded middle (omega, 2 points)", |b| {
        b.iter(|| {
            search_countermodel(&thy, &sigma, Flavor::OmegaIntuitionistic, bounds)
                .unwrap()
                .unwrap()
        })
    });
}

criterion_group!(benches, bench_exponential, bench_proof_checking, bench_countermodel);
criterion_main!(benches);
