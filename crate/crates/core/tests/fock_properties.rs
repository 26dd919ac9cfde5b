use fockport_core::fock::{
    deformed_displacement, displacement_element, displacement_matrix, Cutoff, DeformationFn, DisplacementVariant,
};
use fockport_core::special::{laguerre, ln_factorial};
use fockport_core::Complex64;
use proptest::prelude::*;

fn deformation() -> impl Strategy<Value = DeformationFn> {
    prop_oneof![
        Just(DeformationFn::Identity),
        Just(DeformationFn::SqrtN),
        Just(DeformationFn::InvSqrtN),
        (0.1f64..1.5).prop_map(DeformationFn::InvPow),
    ]
}

fn variant() -> impl Strategy<Value = DisplacementVariant> {
    prop_oneof![Just(DisplacementVariant::Prime), Just(DisplacementVariant::DoublePrime)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn deformed_columns_renormalize(f in deformation(), v in variant(), re in -1.5f64..1.5, im in -1.5f64..1.5, n in 0usize..6) {
        let cut = Cutoff::with_nmax(30).unwrap();
        let d = deformed_displacement(Complex64::new(re, im), &f, v, &cut).unwrap();
        let col: Vec<Complex64> = (0..cut.dim()).map(|m| d.get(m, n)).collect();
        prop_assert!(col.iter().all(|c| c.re.is_finite() && c.im.is_finite()));
        let norm = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(norm > 0.0);
        let unit = col.iter().map(|c| (c / norm).norm_sqr()).sum::<f64>();
        prop_assert!((unit - 1.0).abs() < 1e-14);
    }

    #[test]
    fn displacement_is_unitary_on_the_low_block(r in 0.0f64..3.0, th in 0.0f64..6.3, nmax in 60usize..80) {
        let alpha = Complex64::from_polar(r, th);
        let cut = Cutoff::with_nmax(nmax).unwrap();
        let d = displacement_matrix(alpha, &cut);
        let dd = d.adjoint().matmul(&d).unwrap();
        // what the truncation drops from column n
        let tail: Vec<f64> = (0..=nmax - 20)
            .map(|n| (nmax + 1..nmax + 200).map(|m| displacement_element(m, n, alpha).norm_sqr()).sum())
            .collect();
        let big = displacement_matrix(alpha, &Cutoff::with_nmax(nmax + 200).unwrap());
        let full = big.adjoint().matmul(&big).unwrap();
        for i in 0..=nmax - 20 {
            for j in 0..=nmax - 20 {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((full.get(i, j) - want).norm() < 1e-10, "{} {} {}", i, j, full.get(i, j));
                let bound = 1e-10 + (tail[i] * tail[j]).sqrt();
                prop_assert!((dd.get(i, j) - want).norm() <= bound, "{} {} {}", i, j, dd.get(i, j));
            }
        }
    }

    #[test]
    fn laguerre_recurrence_residual(n in 1usize..50, k in 0i64..=10, x in 0.0f64..25.0) {
        let (lm, l0, lp) = (laguerre(n - 1, k, x), laguerre(n, k, x), laguerre(n + 1, k, x));
        let nf = n as f64;
        let kf = k as f64;
        let res = (nf + 1.0) * lp - (2.0 * nf + kf + 1.0 - x) * l0 + (nf + kf) * lm;
        prop_assert!(res.abs() <= 1e-10 * l0.abs().max(1.0), "{}", res);
    }

    #[test]
    fn factorial_ratios_stay_finite(m in 0usize..=170, n in 0usize..=170) {
        let r = (0.5 * (ln_factorial(n) - ln_factorial(m))).exp();
        prop_assert!(r.is_finite() && r > 0.0);
        let e = displacement_element(m, n, Complex64::new(0.7, -0.4));
        prop_assert!(e.re.is_finite() && e.im.is_finite());
        prop_assert!(e.norm() <= 1.0 + 1e-12);
    }
}
