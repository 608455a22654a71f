//! Minimum distance of quasi affine cartesian codes.
//!
//! Every order `1 <= d < sum (d_i - 1)` is written uniquely as
//! `d = sum_{i<=k} (d_i - 1) + l` with `0 < l <= d_{k+1} - 1`, and all the
//! closed forms below are driven by `(k, l)`. The cartesian code `C_X(d)` has
//! minimum distance `(d_{k+1} - l) prod_{i>=k+2} d_i`, which lower-bounds the
//! subcode; the Singleton-like bound for `(r, delta)` locality caps it from
//! above. [`exact_distance`] certifies the exact value when a construction is
//! available and falls back to exhaustive search or bounds otherwise.
//!
//! Factor sizes are expected in ascending order; [`CodeSpec`] enforces it.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finite_field::Elem;
use crate::multipoly::{EvaluationGrid, Monomial, Polynomial};
use crate::qac_code::{dim_footprint, generator_matrix, hamming_weight, CodeError, CodeSpec, GeneratorMatrix};

/// Default cap on the number of messages enumerated by brute force.
pub const DEFAULT_BUDGET: u64 = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DistanceError {
    #[error("order {d} is outside the decomposable range 1..={max}")]
    DegreeOutOfRange { d: u32, max: u32 },
    #[error("factor sizes {0:?} must be ascending")]
    UnsortedSizes(Vec<usize>),
    #[error("neither minimum-distance condition holds")]
    ConditionsNotMet,
    #[error("exhaustive search needs {q}^{kappa} codewords, budget is {budget}")]
    SearchSpaceTooLarge { q: u32, kappa: usize, budget: u64 },
    #[error("the code has dimension 0")]
    EmptyCode,
    #[error("no exact distance in report")]
    ExactUnknown,
    #[error("witness check failed: {0}")]
    WitnessRejected(String),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// `d = sum_{i<=k} (d_i - 1) + ell`; `k` counts the saturated factors.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DegreeDecomposition {
    pub k: usize,
    pub ell: u32,
}

fn check_sorted(sizes: &[usize]) -> Result<(), DistanceError> {
    if sizes.windows(2).any(|w| w[0] > w[1]) {
        Err(DistanceError::UnsortedSizes(sizes.to_vec()))
    } else {
        Ok(())
    }
}

pub fn decompose_degree(sizes: &[usize], d: u32) -> Result<DegreeDecomposition, DistanceError> {
    check_sorted(sizes)?;
    let max: u32 = sizes.iter().map(|&k| k as u32 - 1).sum();
    if d == 0 || d > max {
        return Err(DistanceError::DegreeOutOfRange { d, max });
    }
    let mut k = 0;
    let mut rest = d;
    while rest > sizes[k] as u32 - 1 {
        rest -= sizes[k] as u32 - 1;
        k += 1;
    }
    Ok(DegreeDecomposition { k, ell: rest })
}

/// `W^(1)(C_X(d))`; `d = 0` gives the length.
pub fn w1_cartesian(sizes: &[usize], d: u32) -> Result<u64, DistanceError> {
    if d == 0 {
        check_sorted(sizes)?;
        return Ok(sizes.iter().map(|&k| k as u64).product());
    }
    let DegreeDecomposition { k, ell } = decompose_degree(sizes, d)?;
    let tail: u64 = sizes[k + 1..].iter().map(|&x| x as u64).product();
    Ok((sizes[k] as u64 - ell as u64) * tail)
}

/// `m - kappa - (ceil(kappa / r) - 1)(delta - 1) + 1`.
pub fn prakash_upper(m: u64, kappa: u64, r: u32, delta: u32) -> i64 {
    let groups = kappa.div_ceil(r as u64) as i64;
    m as i64 - kappa as i64 - (groups - 1) * (delta as i64 - 1) + 1
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct Conditions {
    /// `k + 2 <= n` and `d_{k+2} <= d_s`.
    pub cond_i: bool,
    /// `d_s <= d_{k+1}` and `0 <= d_s - (d_{k+1} - ell) < r`.
    pub cond_ii: bool,
}

impl Conditions {
    pub fn any(self) -> bool {
        self.cond_i || self.cond_ii
    }
}

/// `d_s - (d_{k+1} - ell)`, which may be negative.
fn s_excess(spec: &CodeSpec, dec: DegreeDecomposition) -> i64 {
    let sizes = spec.sizes();
    sizes[spec.s() - 1] as i64 - (sizes[dec.k] as i64 - dec.ell as i64)
}

pub fn check_conditions(spec: &CodeSpec, dec: DegreeDecomposition) -> Conditions {
    let sizes = spec.sizes();
    let n = sizes.len();
    let ds = sizes[spec.s() - 1];
    let cond_i = dec.k + 2 <= n && sizes[dec.k + 1] <= ds;
    let excess = s_excess(spec, dec);
    let cond_ii = ds <= sizes[dec.k] && excess >= 0 && excess < spec.r() as i64;
    Conditions { cond_i, cond_ii }
}

// prod_{a in K[1..]} (X_var - a): nonzero only at the first element of K.
fn all_but_first(spec: &CodeSpec, var: usize, factor: usize) -> Polynomial {
    let g = spec.grid();
    Polynomial::root_product(g.field(), g.nvars(), var, &g.factor(factor)[1..])
}

fn first_roots(spec: &CodeSpec, var: usize, count: usize) -> Polynomial {
    let g = spec.grid();
    Polynomial::root_product(g.field(), g.nvars(), var, &g.factor(var)[..count])
}

fn product(spec: &CodeSpec, parts: impl IntoIterator<Item = Polynomial>) -> Polynomial {
    let g = spec.grid();
    parts
        .into_iter()
        .fold(Polynomial::constant(g.field(), g.nvars(), Elem::ONE), |acc, p| {
            acc.mul(&p).expect("same ring")
        })
}

/// True when `f` has degree `<= d` and `X_s`-degree `< r`.
pub fn in_quasi_space(spec: &CodeSpec, f: &Polynomial) -> bool {
    f.nvars() == spec.n()
        && f.degree().is_none_or(|deg| deg <= spec.effective_d())
        && f.degree_in(spec.s() - 1) < spec.r()
}

/// Hamming weight of `Psi(f)`.
pub fn weight_of(grid: &EvaluationGrid, f: &Polynomial) -> usize {
    hamming_weight(&f.evaluate_on_grid(grid).expect("polynomial matches grid"))
}

fn certify(spec: &CodeSpec, f: Polynomial, expected: u64) -> Result<Polynomial, DistanceError> {
    if !in_quasi_space(spec, &f) {
        return Err(DistanceError::WitnessRejected(format!("{f} is not in P_d")));
    }
    let w = weight_of(spec.grid(), &f) as u64;
    if w != expected {
        return Err(DistanceError::WitnessRejected(format!(
            "weight {w}, expected {expected}"
        )));
    }
    Ok(f)
}

/// A polynomial in `P^(delta,s)_d` whose codeword has weight
/// `W^(1)(C_X(d))`, following the construction for whichever condition
/// holds (condition (i) first). Roots are taken from the start of each
/// factor in encoding order.
pub fn witness_min_weight(spec: &CodeSpec, dec: DegreeDecomposition) -> Result<Polynomial, DistanceError> {
    let conds = check_conditions(spec, dec);
    let sizes = spec.sizes();
    let s = spec.s() - 1;
    let k = dec.k;
    let ell = dec.ell as usize;
    let f = if conds.cond_i {
        // variables 0..k carry the construction; if s is among them it is
        // swapped for variable k + 1, which has the same size
        let role = |j: usize| if j == s { k + 1 } else { j };
        let mut parts: Vec<Polynomial> = (0..k).map(|j| all_but_first(spec, role(j), role(j))).collect();
        parts.push(first_roots(spec, role(k), ell));
        product(spec, parts)
    } else if conds.cond_ii {
        let excess = s_excess(spec, dec) as usize;
        let mut parts: Vec<Polynomial> = (0..=k).filter(|&i| i != s).map(|i| all_but_first(spec, i, i)).collect();
        parts.push(first_roots(spec, s, excess));
        product(spec, parts)
    } else {
        return Err(DistanceError::ConditionsNotMet);
    };
    let expected = w1_cartesian(&sizes, spec.effective_d())?;
    certify(spec, f, expected)
}

/// Weight-`delta` (at `d_tilde`) or weight-`delta + 1` (at `d_tilde - 1`,
/// needs `r >= 2`) codeword supported on a single repair group.
fn witness_optimal(spec: &CodeSpec, drop: u32) -> Result<Polynomial, DistanceError> {
    let s = spec.s() - 1;
    let roots = (spec.r() - 1 - drop) as usize;
    let mut parts: Vec<Polynomial> = (0..spec.n())
        .filter(|&i| i != s)
        .map(|i| all_but_first(spec, i, i))
        .collect();
    parts.push(first_roots(spec, s, roots));
    certify(spec, product(spec, parts), (spec.delta() + drop) as u64)
}

/// `prod_{i<=k, i!=s} (X_i^{d_i-1} - 1) prod_{h<r} (X_s - beta_h)`, times
/// `X_{k+2}` when `n > k + 1`. Needs subfield factors.
fn witness_second_weight(
    spec: &CodeSpec,
    dec: DegreeDecomposition,
    expected: u64,
) -> Result<Polynomial, DistanceError> {
    let g = spec.grid();
    let f = g.field();
    let n = g.nvars();
    let s = spec.s() - 1;
    let sizes = spec.sizes();
    let mut parts: Vec<Polynomial> = (0..=dec.k)
        .filter(|&i| i != s)
        .map(|i| {
            Polynomial::from_terms(
                f,
                n,
                [
                    (Monomial::var(n, i, sizes[i] as u32 - 1), Elem::ONE),
                    (Monomial::one(n), f.neg(Elem::ONE)),
                ],
            )
            .expect("well-formed binomial")
        })
        .collect();
    parts.push(first_roots(spec, s, spec.r() as usize - 1));
    if dec.k + 1 < n {
        parts.push(Polynomial::term(f, Monomial::var(n, dec.k + 1, 1), Elem::ONE));
    }
    certify(spec, product(spec, parts), expected)
}

/// Next-to-minimal weight of `C_X(d)` where a known formula applies.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SecondWeightResult {
    pub value: u64,
    /// 1..=4; 0 when no case applies.
    pub case_id: u8,
    pub applicable: bool,
}

impl SecondWeightResult {
    const NONE: SecondWeightResult = SecondWeightResult {
        value: 0,
        case_id: 0,
        applicable: false,
    };
}

pub fn w2_cartesian(grid: &EvaluationGrid, d: u32) -> Result<SecondWeightResult, DistanceError> {
    let sizes = grid.sizes();
    let n = sizes.len();
    let DegreeDecomposition { k, ell } = decompose_degree(&sizes, d)?;
    let ell = ell as u64;
    let dk1 = sizes[k] as u64;
    let found = |value, case_id| {
        Ok(SecondWeightResult {
            value,
            case_id,
            applicable: true,
        })
    };
    if n == k + 1 {
        return found(sizes[n - 1] as u64 - ell + 1, 1);
    }
    let dk2 = sizes[k + 1] as u64;
    let tail: u64 = sizes[k + 2..].iter().map(|&x| x as u64).product();
    let d1_ok = sizes[0] >= 3;
    if d1_ok && ((ell == 1 && dk1 < dk2) || ell >= 2) {
        return found((dk1 - ell + 1) * (dk2 - 1) * tail, 2);
    }
    let q = grid.field().order() as usize;
    if q >= 4 && sizes.iter().all(|&x| x == q) && ell == 1 {
        return found((q as u64).pow((n - k) as u32), 3);
    }
    if d1_ok && dk1 == dk2 && ell == 1 {
        return found((dk1 * dk1 - 1) * tail, 4);
    }
    Ok(SecondWeightResult::NONE)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Condition (i) or (ii) holds; exact equals the cartesian distance.
    ConditionsHold,
    /// Both conditions fail on a subfield chain with `d_s - (d_{k+1} - l) = r`;
    /// exact equals the cartesian second weight.
    LastResultW2,
    BruteForce,
    /// `d = d_tilde` or `d = d_tilde - 1`.
    OptimalCorollary,
    BoundsOnly,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::ConditionsHold => "conditions_hold",
            Method::LastResultW2 => "last_result_w2",
            Method::BruteForce => "brute_force",
            Method::OptimalCorollary => "optimal_corollary",
            Method::BoundsOnly => "bounds_only",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceReport {
    /// Best justified lower bound; `W^(1)(C_X(d))` unless a stronger one is known.
    pub lower: u64,
    pub upper: i64,
    pub exact: Option<u64>,
    pub method: Method,
    pub witness: Option<Polynomial>,
    pub conditions: Conditions,
    pub decomposition: DegreeDecomposition,
    /// `W^(1)(C_X(d))`.
    pub cartesian: u64,
    pub second_weight: Option<SecondWeightResult>,
    pub kappa: usize,
}

pub fn exact_distance(spec: &CodeSpec) -> Result<DistanceReport, DistanceError> {
    exact_distance_with_budget(spec, DEFAULT_BUDGET)
}

pub fn exact_distance_with_budget(spec: &CodeSpec, budget: u64) -> Result<DistanceReport, DistanceError> {
    let d = spec.effective_d();
    let d_tilde = spec.d_tilde();
    if d == 0 {
        return Err(DistanceError::DegreeOutOfRange { d, max: d_tilde });
    }
    let sizes = spec.sizes();
    let kappa = dim_footprint(spec);
    let r = spec.r();
    let delta = spec.delta();
    let upper = prakash_upper(spec.m() as u64, kappa as u64, r, delta);
    let dec = decompose_degree(&sizes, d)?;
    let cartesian = w1_cartesian(&sizes, d)?;
    let conditions = check_conditions(spec, dec);
    let report = |lower, exact, method, witness, second_weight| DistanceReport {
        lower,
        upper,
        exact,
        method,
        witness,
        conditions,
        decomposition: dec,
        cartesian,
        second_weight,
        kappa,
    };

    // The `d_tilde - 1` value `delta + 1` relies on ceil(kappa / r) = kappa / r + 1,
    // which fails for r = 1; those specs fall through to the other paths.
    if d == d_tilde || (d + 1 == d_tilde && r >= 2) {
        let drop = d_tilde - d;
        let w = witness_optimal(spec, drop)?;
        return Ok(report(
            cartesian,
            Some((delta + drop) as u64),
            Method::OptimalCorollary,
            Some(w),
            None,
        ));
    }
    if conditions.any() {
        let w = witness_min_weight(spec, dec)?;
        return Ok(report(
            cartesian,
            Some(cartesian),
            Method::ConditionsHold,
            Some(w),
            None,
        ));
    }

    let n = sizes.len();
    let chain = spec.grid().is_subfield_chain();
    if chain && s_excess(spec, dec) == r as i64 && (n == dec.k + 1 || sizes[0] >= 3) {
        let w2 = w2_cartesian(spec.grid(), d)?;
        let value = if n == dec.k + 1 {
            sizes[n - 1] as u64 - dec.ell as u64 + 1
        } else {
            let tail: u64 = sizes[dec.k + 2..].iter().map(|&x| x as u64).product();
            (sizes[dec.k] as u64 - dec.ell as u64 + 1) * (sizes[dec.k + 1] as u64 - 1) * tail
        };
        let w = witness_second_weight(spec, dec, value)?;
        return Ok(report(cartesian, Some(value), Method::LastResultW2, Some(w), Some(w2)));
    }

    // Both conditions fail. On a subfield chain that forces w > v, so the
    // cartesian second weight (or v + 1 when no formula applies) is a bound.
    let (lower, second_weight) = if chain {
        let w2 = w2_cartesian(spec.grid(), d)?;
        let lower = if w2.applicable {
            w2.value.max(cartesian)
        } else {
            cartesian + 1
        };
        (lower, Some(w2))
    } else {
        (cartesian, None)
    };

    if search_space_fits(spec.field().order(), kappa, budget) {
        let g = generator_matrix(spec);
        let exact = brute_force_distance(&g, budget)?;
        return Ok(report(lower, Some(exact), Method::BruteForce, None, second_weight));
    }
    Ok(report(lower, None, Method::BoundsOnly, None, second_weight))
}

fn search_space_fits(q: u32, kappa: usize, budget: u64) -> bool {
    u32::try_from(kappa)
        .ok()
        .and_then(|k| (q as u64).checked_pow(k))
        .is_some_and(|total| total <= budget)
}

/// Minimum weight over all nonzero messages, by exhaustive enumeration.
///
/// The message space is split on its leading digits into independent blocks;
/// within a block the codeword is updated incrementally one digit at a time.
pub fn brute_force_distance(matrix: &GeneratorMatrix, budget: u64) -> Result<u64, DistanceError> {
    let kappa = matrix.kappa();
    if kappa == 0 {
        return Err(DistanceError::EmptyCode);
    }
    let field = matrix.spec().field();
    let q = field.order();
    if !search_space_fits(q, kappa, budget) {
        return Err(DistanceError::SearchSpaceTooLarge { q, kappa, budget });
    }
    let rows = matrix.rows();
    let m = matrix.len();
    let q64 = q as u64;

    // leading digits that select a block
    let mut prefix_len = 0;
    let mut blocks = 1u64;
    while prefix_len < kappa && blocks < 256 {
        blocks *= q64;
        prefix_len += 1;
    }
    let suffix_len = kappa - prefix_len;
    let steps = q64.pow(suffix_len as u32);
    // step[v] = (v + 1 mod q) - v
    let step: Vec<Elem> = (0..q)
        .map(|v| field.sub(Elem::from_raw((v + 1) % q), Elem::from_raw(v)))
        .collect();

    let best = AtomicU64::new(u64::MAX);
    (0..blocks).into_par_iter().for_each(|block| {
        let mut word = vec![Elem::ZERO; m];
        let mut b = block;
        let mut prefix_zero = true;
        for row in rows[..prefix_len].iter().rev() {
            let c = Elem::from_raw((b % q64) as u32);
            b /= q64;
            if !c.is_zero() {
                prefix_zero = false;
                for (w, &g) in word.iter_mut().zip(row) {
                    *w = field.add(*w, field.mul(c, g));
                }
            }
        }
        let mut digits = vec![0u32; suffix_len];
        for i in 0..steps {
            if i > 0 || !prefix_zero {
                let bound = best.load(Ordering::Relaxed);
                let mut wt = 0u64;
                for w in &word {
                    if !w.is_zero() {
                        wt += 1;
                        if wt >= bound {
                            break;
                        }
                    }
                }
                if wt < bound {
                    best.fetch_min(wt, Ordering::Relaxed);
                }
            }
            // odometer over suffix digits, last digit fastest
            for j in (0..suffix_len).rev() {
                let v = digits[j];
                let c = step[v as usize];
                for (w, &g) in word.iter_mut().zip(&rows[prefix_len + j]) {
                    *w = field.add(*w, field.mul(c, g));
                }
                digits[j] = (v + 1) % q;
                if digits[j] != 0 {
                    break;
                }
            }
        }
    });
    Ok(best.into_inner())
}

pub fn is_optimal(report: &DistanceReport) -> Result<bool, DistanceError> {
    let exact = report.exact.ok_or(DistanceError::ExactUnknown)?;
    Ok(exact as i64 == report.upper)
}

/// Flat summary of a code and its distance report, as emitted by the CLI.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeAnalysis {
    pub m: usize,
    pub kappa: usize,
    pub r: u32,
    pub d_tilde: u32,
    pub d: u32,
    pub effective_d: u32,
    pub delta: u32,
    pub s: usize,
    /// Minimum distance of the ambient cartesian code.
    pub v: u64,
    pub lower: u64,
    pub upper: i64,
    pub exact: Option<u64>,
    pub method: Method,
    pub optimal: Option<bool>,
    pub cond_i: bool,
    pub cond_ii: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CodeAnalysis {
    pub fn new(spec: &CodeSpec, report: &DistanceReport) -> Self {
        CodeAnalysis {
            m: spec.m(),
            kappa: report.kappa,
            r: spec.r(),
            d_tilde: spec.d_tilde(),
            d: spec.d(),
            effective_d: spec.effective_d(),
            delta: spec.delta(),
            s: spec.s(),
            v: report.cartesian,
            lower: report.lower,
            upper: report.upper,
            exact: report.exact,
            method: report.method,
            optimal: is_optimal(report).ok(),
            cond_i: report.conditions.cond_i,
            cond_ii: report.conditions.cond_ii,
            witness: report.witness.as_ref().map(ToString::to_string),
        }
    }
}
