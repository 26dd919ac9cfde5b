use fockport_core::charfun::InputSpec;
use fockport_core::fock::{Cutoff, DeformationFn};
use fockport_core::teleport::{fidelity_quadrature, SeriesKernel};
use fockport_core::{beam_split, make_single_mode, Complex64, Operation, ResourceSpec};
use proptest::prelude::*;
use std::sync::OnceLock;

fn coherent_kernel() -> &'static SeriesKernel {
    static K: OnceLock<SeriesKernel> = OnceLock::new();
    K.get_or_init(|| SeriesKernel::coherent(61))
}

fn squeezed_kernel() -> &'static SeriesKernel {
    static K: OnceLock<SeriesKernel> = OnceLock::new();
    K.get_or_init(|| SeriesKernel::squeezed(1.0, 0.0, 61))
}

fn deformation() -> impl Strategy<Value = DeformationFn> {
    prop_oneof![Just(DeformationFn::Identity), Just(DeformationFn::SqrtN), Just(DeformationFn::InvSqrtN)]
}

fn operation() -> impl Strategy<Value = Operation> {
    prop_oneof![Just(Operation::Add), Just(Operation::Subtract)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn fidelity_is_amplitude_free_and_bounded(n in 0usize..3, k in 0usize..3, op in operation(), a in 0.2f64..1.5, f in deformation()) {
        let spec = ResourceSpec::new(n, k, op, Complex64::new(a, 0.0)).with_deformation(f);
        let s = match make_single_mode(&spec, &Cutoff::with_nmax(40).unwrap()) {
            Ok(s) => s,
            Err(_) => return Ok(()),
        };
        let st = beam_split(&s);
        let mut vals = Vec::new();
        for a0 in [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 1.0), Complex64::new(2.0, 0.0)] {
            vals.push(fidelity_quadrature(&InputSpec::coherent(a0), &st).unwrap().value);
        }
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(hi - lo <= 1e-8, "{:?}", vals);
        prop_assert!((0.0..=1.0).contains(&lo) && hi <= 1.0);
        let series = coherent_kernel().evaluate(s.coeffs()).unwrap();
        prop_assert!((series - vals[0]).abs() < 1e-6);
        let sq_series = squeezed_kernel().evaluate(s.coeffs()).unwrap();
        let sq_quad = fidelity_quadrature(&InputSpec::squeezed(1.0, 0.0), &st).unwrap().value;
        prop_assert!((sq_series - sq_quad).abs() < 1e-6);
        prop_assert!((0.0..=1.0).contains(&sq_series));
    }
}
