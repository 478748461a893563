//! Property suites: algebraic laws on random inputs, structural invariants
//! over exhaustive small ranges, and determinism under thread-count
//! variation.

use proptest::prelude::*;

use ghscheme::construct::build_scheme;
use ghscheme::field::{character, FieldSpec};
use ghscheme::fusion::fuse;
use ghscheme::latin::{build_latin, one_factorization};
use ghscheme::matrix::{IntMatrix, ScaledMatrix};
use ghscheme::pipeline::{certify_full, sample_permutation};

fn square(n: usize, data: &[i64]) -> IntMatrix {
    IntMatrix::from_fn(n, n, |r, c| data[(r * n + c) % data.len()])
}

proptest! {
    #[test]
    fn field_axioms_random_m4(a in 0u32..16, b in 0u32..16, c in 0u32..16) {
        let spec = FieldSpec::new(4).unwrap();
        let (a, b, c) = (
            spec.element(a).unwrap(),
            spec.element(b).unwrap(),
            spec.element(c).unwrap(),
        );
        prop_assert_eq!(spec.add(a, b), spec.add(b, a));
        prop_assert_eq!(spec.mul(a, b), spec.mul(b, a));
        prop_assert_eq!(spec.mul(spec.mul(a, b), c), spec.mul(a, spec.mul(b, c)));
        prop_assert_eq!(
            spec.mul(a, spec.add(b, c)),
            spec.add(spec.mul(a, b), spec.mul(a, c))
        );
    }

    #[test]
    fn character_orthogonality(m in 1u32..=4, b in 0u32..16, c in 0u32..16) {
        let spec = FieldSpec::new(m).unwrap();
        let q = spec.q() as u32;
        let (b, c) = (b % q, c % q);
        let total: i64 = (0..q)
            .map(|a| {
                let a = spec.element(a).unwrap();
                character(spec.element(b).unwrap(), a) * character(spec.element(c).unwrap(), a)
            })
            .sum();
        prop_assert_eq!(total, if b == c { q as i64 } else { 0 });
    }

    #[test]
    fn kron_mixed_product(
        a in proptest::collection::vec(-7i64..=7, 9),
        b in proptest::collection::vec(-7i64..=7, 9),
        c in proptest::collection::vec(-7i64..=7, 9),
        d in proptest::collection::vec(-7i64..=7, 9),
    ) {
        let (a, b, c, d) = (square(3, &a), square(3, &b), square(3, &c), square(3, &d));
        let lhs = a.kron(&b).unwrap().matmul(&c.kron(&d).unwrap()).unwrap();
        let rhs = a.matmul(&c).unwrap().kron(&b.matmul(&d).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn one_factorization_covers_every_edge(half in 1usize..=9) {
        let n = 2 * half;
        let rounds = one_factorization(n).unwrap();
        prop_assert_eq!(rounds.len(), n - 1);
        let mut seen = vec![false; n * n];
        for matching in &rounds {
            for &(u, v) in matching {
                let key = u.min(v) * n + u.max(v);
                prop_assert!(!seen[key], "edge repeated");
                seen[key] = true;
            }
        }
        prop_assert_eq!(seen.iter().filter(|&&s| s).count(), n * (n - 1) / 2);
    }

    #[test]
    fn matmul_deterministic_across_thread_counts(
        n in 1usize..=48,
        data in proptest::collection::vec(-100i64..=100, 64),
    ) {
        let a = square(n, &data);
        let b = square(n, &data[32..]);
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let single = pool1.install(|| a.matmul(&b).unwrap());
        let multi = pool4.install(|| a.matmul(&b).unwrap());
        prop_assert_eq!(single, multi);
    }

    #[test]
    fn dense_text_round_trip(
        rows in 1usize..=6,
        cols in 1usize..=6,
        den in 1i64..=100,
        data in proptest::collection::vec(-1000i64..=1000, 36),
    ) {
        let num = IntMatrix::from_fn(rows, cols, |r, c| data[(r * cols + c) % data.len()]);
        let m = ScaledMatrix::new(num, den).unwrap();
        prop_assert_eq!(ScaledMatrix::from_dense_text(&m.to_dense_text()).unwrap(), m);
    }

    #[test]
    fn coo_round_trip(
        rows in 1usize..=8,
        cols in 1usize..=8,
        bits in proptest::collection::vec(0i64..=1, 64),
    ) {
        let m = IntMatrix::from_fn(rows, cols, |r, c| bits[(r * cols + c) % bits.len()]);
        prop_assert_eq!(IntMatrix::from_coo_text(&m.to_coo_text().unwrap()).unwrap(), m);
    }
}

/// Latin invariants hold for all supported m, including under relabeling.
#[test]
fn latin_invariants_all_m() {
    for m in 1..=4 {
        let spec = FieldSpec::new(m).unwrap();
        build_latin(&spec).unwrap().validate().unwrap();
    }
}

/// The full certification report is byte-identical across thread counts.
#[test]
fn certification_deterministic_across_thread_counts() {
    let spec = FieldSpec::new(1).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let arts = certify_full(&spec, &Default::default()).unwrap();
            serde_json::to_string(&arts.report.checks).unwrap()
        })
    };
    assert_eq!(run(1), run(4));
}

/// Every sampled sigma at m = 3 fuses into a valid commutative strongly
/// regular decomposition; fuse() is fatal on any violation.
#[test]
fn sampled_sigma_fusions_m3() {
    let spec = FieldSpec::new(3).unwrap();
    let scheme = build_scheme(&spec).unwrap();
    for i in 0..100u64 {
        let sigma = sample_permutation(spec.q(), 0x00D1_CE00 + i);
        fuse(&scheme, &sigma).unwrap();
    }
}
