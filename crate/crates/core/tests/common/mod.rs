#![allow(dead_code)]

use qac_core::{CodeSpec, EvaluationGrid, FiniteField};

/// Subfield-chain grids used by the sweep suites: (ambient field, subfield degrees).
pub const GRIDS: &[(&str, &[u32])] = &[
    ("2", &[1, 1]),
    ("2", &[1, 1, 1]),
    ("3", &[1, 1]),
    ("3", &[1, 1, 1]),
    ("2^2", &[1, 1]),
    ("2^2", &[1, 2]),
    ("2^2", &[2, 2]),
    ("2^2", &[1, 1, 1]),
    ("2^2", &[1, 1, 2]),
    ("2^2", &[1, 2, 2]),
    ("2^2", &[2, 2, 2]),
    ("5", &[1, 1]),
    ("5", &[1, 1, 1]),
    ("7", &[1, 1]),
];

/// Every (grid, s, delta) with `2 <= delta <= d_s`, at `d = d_tilde`.
pub fn sweep() -> Vec<CodeSpec> {
    let mut out = Vec::new();
    for &(field, degrees) in GRIDS {
        let f = FiniteField::from_spec(field).unwrap();
        let grid = EvaluationGrid::from_subfield_degrees(&f, degrees).unwrap();
        let sizes = grid.sizes();
        for s in 1..=sizes.len() {
            for delta in 2..=sizes[s - 1] as u32 {
                let spec = CodeSpec::new(grid.clone(), 0, delta, s).unwrap();
                out.push(spec.with_d(spec.d_tilde()));
            }
        }
    }
    out
}

pub fn label(spec: &CodeSpec) -> String {
    format!(
        "{} sizes={:?} s={} delta={} d={}",
        spec.field(),
        spec.sizes(),
        spec.s(),
        spec.delta(),
        spec.d()
    )
}

pub fn q_pow(q: u32, e: usize) -> Option<u64> {
    u32::try_from(e).ok().and_then(|e| (q as u64).checked_pow(e))
}
