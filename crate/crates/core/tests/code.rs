mod common;

use proptest::prelude::*;
use qac_core::linalg::rank;
use qac_core::multipoly::footprint;
use qac_core::qac_code::{dim_footprint, monomial_rows};
use qac_core::{generator_matrix, CodeSpec, Elem};

#[test]
fn dimension_grows_then_stalls() {
    for spec in common::sweep() {
        let dt = spec.d_tilde();
        let kappas: Vec<usize> = (0..=dt + 2).map(|d| dim_footprint(&spec.with_d(d))).collect();
        assert!(kappas.windows(2).all(|w| w[0] <= w[1]), "{}", common::label(&spec));
        assert!(kappas[dt as usize..].iter().all(|&k| k == kappas[dt as usize]));
    }
}

#[test]
fn subcode_of_cartesian_code() {
    for spec in common::sweep() {
        for d in 1..=spec.d_tilde() {
            let sp = spec.with_d(d);
            let ambient = monomial_rows(sp.grid(), &footprint(sp.grid(), d, None).unwrap());
            let base = rank(sp.field(), &ambient);
            let mut stacked = ambient.clone();
            stacked.extend(generator_matrix(&sp).rows().iter().cloned());
            assert_eq!(rank(sp.field(), &stacked), base, "{}", common::label(&sp));
        }
    }
}

fn spec_and_two_messages() -> impl Strategy<Value = (CodeSpec, Vec<Elem>, Vec<Elem>)> {
    prop::sample::select(common::sweep()).prop_flat_map(|spec| {
        let q = spec.field().order();
        let k = dim_footprint(&spec);
        let msg = proptest::collection::vec((0..q).prop_map(Elem::from_raw), k);
        (Just(spec), msg.clone(), msg)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encoding_is_linear((spec, u, v) in spec_and_two_messages()) {
        let f = spec.field();
        let g = generator_matrix(&spec);
        let sum: Vec<Elem> = u.iter().zip(&v).map(|(&a, &b)| f.add(a, b)).collect();
        let cu = g.encode(&u).unwrap();
        let cv = g.encode(&v).unwrap();
        let expected: Vec<Elem> = cu.symbols.iter().zip(&cv.symbols).map(|(&a, &b)| f.add(a, b)).collect();
        prop_assert_eq!(g.encode(&sum).unwrap().symbols, expected);
        // the codeword is the evaluation of the message polynomial
        let p = g.message_polynomial(&u).unwrap();
        prop_assert_eq!(p.evaluate_on_grid(spec.grid()).unwrap(), cu.symbols);
    }
}
