use proptest::prelude::*;
use qac_core::multipoly::{footprint, reduce};
use qac_core::qac_code::cartesian_dimension;
use qac_core::{Elem, EvaluationGrid, FiniteField, Monomial, Polynomial};

fn grids() -> Vec<EvaluationGrid> {
    [
        ("3", &[1u32, 1][..]),
        ("2^2", &[1, 2]),
        ("2^2", &[1, 1, 2]),
        ("5", &[1, 1]),
        ("3^2", &[1, 2]),
    ]
    .iter()
    .map(|&(spec, degrees)| {
        let f = FiniteField::from_spec(spec).unwrap();
        EvaluationGrid::from_subfield_degrees(&f, degrees).unwrap()
    })
    .collect()
}

fn monomial(nvars: usize) -> impl Strategy<Value = Monomial> {
    proptest::collection::vec(0u32..6, nvars).prop_map(Monomial::new)
}

fn poly_on(grid: EvaluationGrid) -> impl Strategy<Value = (EvaluationGrid, Polynomial)> {
    let n = grid.nvars();
    let q = grid.field().order();
    proptest::collection::vec((proptest::collection::vec(0u32..12, n), 0..q), 0..8).prop_map(move |terms| {
        let f = Polynomial::from_terms(
            grid.field(),
            n,
            terms.into_iter().map(|(e, c)| (Monomial::new(e), Elem::from_raw(c))),
        )
        .unwrap();
        (grid.clone(), f)
    })
}

fn any_poly() -> impl Strategy<Value = (EvaluationGrid, Polynomial)> {
    prop::sample::select(grids()).prop_flat_map(poly_on)
}

proptest! {
    #[test]
    fn graded_lex_is_a_monomial_order(a in monomial(3), b in monomial(3), c in monomial(3)) {
        let one = Monomial::one(3);
        prop_assert!(one <= a);
        if a <= b && b <= a {
            prop_assert_eq!(&a, &b);
        }
        if a <= b && b <= c {
            prop_assert!(a <= c);
        }
        if a < b {
            prop_assert!(c.mul(&a) < c.mul(&b));
        }
    }

    #[test]
    fn reduction_is_idempotent((grid, f) in any_poly()) {
        let once = reduce(&f, &grid).unwrap();
        prop_assert_eq!(reduce(&once, &grid).unwrap(), once.clone());
        for (m, _) in once.terms() {
            for (i, &e) in m.exponents().iter().enumerate() {
                prop_assert!((e as usize) < grid.factor(i).len());
            }
        }
    }

    #[test]
    fn reduction_keeps_evaluations((grid, f) in any_poly()) {
        let g = reduce(&f, &grid).unwrap();
        for p in grid.points() {
            prop_assert_eq!(f.evaluate(&p).unwrap(), g.evaluate(&p).unwrap());
        }
        prop_assert_eq!(f.evaluate_on_grid(&grid).unwrap(), g.evaluate_on_grid(&grid).unwrap());
    }
}

#[test]
fn footprint_size_matches_cartesian_dimension() {
    for grid in grids() {
        let sizes = grid.sizes();
        let top: u32 = sizes.iter().map(|&k| k as u32 - 1).sum();
        for d in 0..=top + 1 {
            let fp = footprint(&grid, d, None).unwrap();
            assert_eq!(fp.len() as u64, cartesian_dimension(&sizes, d), "sizes {sizes:?} d {d}");
        }
    }
}
