use fockport::exchange::{read_csv, read_json, write_csv, write_json, ExchangeState};
use fockport_core::{beam_split, make_single_mode, Complex64, Cutoff, DeformationFn, Operation, ResourceSpec};
use proptest::prelude::*;

fn amplitudes(s: &ExchangeState) -> Vec<Complex64> {
    match s {
        ExchangeState::Single(s) => s.coeffs().to_vec(),
        ExchangeState::Two(s) => s.coeffs().to_vec(),
    }
}

fn meta(s: &ExchangeState) -> (usize, f64, f64) {
    match s {
        ExchangeState::Single(s) => (s.cutoff().nmax(), s.cutoff().tail_tol(), s.tail_mass()),
        ExchangeState::Two(s) => (s.cutoff().nmax(), s.cutoff().tail_tol(), s.tail_mass()),
    }
}

fn assert_close(a: &ExchangeState, b: &ExchangeState) -> Result<(), TestCaseError> {
    prop_assert_eq!(meta(a), meta(b));
    let (x, y) = (amplitudes(a), amplitudes(b));
    prop_assert_eq!(x.len(), y.len());
    for (p, q) in x.iter().zip(&y) {
        prop_assert!((p - q).norm() <= 1e-15 * p.norm(), "{} vs {}", p, q);
    }
    prop_assert_eq!(matches!(a, ExchangeState::Two(_)), matches!(b, ExchangeState::Two(_)));
    Ok(())
}

fn operation() -> impl Strategy<Value = Operation> {
    prop_oneof![Just(Operation::Add), Just(Operation::Subtract)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn json_and_csv_preserve_amplitudes(
        n in 0usize..3, k in 1usize..3, op in operation(), re in -1.5f64..1.5, im in -1.5f64..1.5,
        sqrt_n in any::<bool>(), two in any::<bool>()
    ) {
        let f = if sqrt_n { DeformationFn::SqrtN } else { DeformationFn::Identity };
        let spec = ResourceSpec::new(n, k, op, Complex64::new(re, im)).with_deformation(f);
        let single = make_single_mode(&spec, &Cutoff::with_nmax(45).unwrap()).unwrap();
        let state = if two { ExchangeState::Two(beam_split(&single)) } else { ExchangeState::Single(single) };

        let mut json = Vec::new();
        write_json(&state, &mut json).unwrap();
        let back = read_json(std::str::from_utf8(&json).unwrap()).unwrap();
        assert_close(&state, &back)?;

        let mut csv = Vec::new();
        write_csv(&state, &mut csv).unwrap();
        let back = read_csv(csv.as_slice()).unwrap();
        assert_close(&state, &back)?;
    }
}
