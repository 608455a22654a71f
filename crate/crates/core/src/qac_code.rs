//! Affine cartesian codes `C_X(d)` and their quasi affine subcodes
//! `D^(delta,s)_X(d)`: parameters, dimensions and encoding.
//!
//! Message coordinate `j` is the coefficient of the `j`-th footprint
//! monomial in ascending graded-lex order; that ordering is part of the wire
//! contract of [`GeneratorMatrix::encode`].

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finite_field::{Elem, FieldError, FiniteField};
use crate::linalg;
use crate::multipoly::{footprint, EvaluationGrid, Locality, Monomial, PolyError, Polynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("invalid locality: delta = {delta} but |K_{s}| = {size} (need 2 <= delta <= |K_s|)")]
    InvalidLocality { delta: u32, s: usize, size: usize },
    #[error("coordinate s = {s} is out of range 1..={n}")]
    BadCoordinate { s: usize, n: usize },
    #[error("factor {index} has {size} elements, at least 2 are required")]
    GridTooSmall { index: usize, size: usize },
    #[error("a code needs at least 2 factors, got {0}")]
    TooFewFactors(usize),
    #[error(
        "factor sizes {sizes:?} are not ascending; reorder the factors as {permutation:?} (and renumber s accordingly)"
    )]
    UnsortedFactors { sizes: Vec<usize>, permutation: Vec<usize> },
    #[error("expected {expected} symbols, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid code descriptor: {0}")]
    Descriptor(String),
    #[error(transparent)]
    Poly(PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl From<PolyError> for CodeError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::GridTooSmall { index, size } => CodeError::GridTooSmall { index, size },
            PolyError::InvalidLocality { delta, s, size } => CodeError::InvalidLocality { delta, s, size },
            PolyError::BadCoordinate { s, n } => CodeError::BadCoordinate { s, n },
            PolyError::Field(f) => CodeError::Field(f),
            other => CodeError::Poly(other),
        }
    }
}

/// Parameters of `D^(delta,s)_X(d)` with the derived quantities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeSpec {
    grid: EvaluationGrid,
    d: u32,
    delta: u32,
    s: usize,
    r: u32,
    d_tilde: u32,
    m: usize,
}

impl CodeSpec {
    /// `s` is 1-based. Factor sizes must be ascending.
    pub fn new(grid: EvaluationGrid, d: u32, delta: u32, s: usize) -> Result<Self, CodeError> {
        let sizes = grid.sizes();
        let n = sizes.len();
        if n < 2 {
            return Err(CodeError::TooFewFactors(n));
        }
        if let Some((i, &size)) = sizes.iter().enumerate().find(|(_, &k)| k < 2) {
            return Err(CodeError::GridTooSmall { index: i + 1, size });
        }
        if s == 0 || s > n {
            return Err(CodeError::BadCoordinate { s, n });
        }
        if sizes.windows(2).any(|w| w[0] > w[1]) {
            let mut permutation: Vec<usize> = (1..=n).collect();
            permutation.sort_by_key(|&i| sizes[i - 1]);
            return Err(CodeError::UnsortedFactors { sizes, permutation });
        }
        let ds = sizes[s - 1] as u32;
        if delta < 2 || delta > ds {
            return Err(CodeError::InvalidLocality {
                delta,
                s,
                size: ds as usize,
            });
        }
        let r = ds - delta + 1;
        let others: u32 = sizes
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != s - 1)
            .map(|(_, &k)| k as u32 - 1)
            .sum();
        let d_tilde = others + ds - delta;
        let m = grid.len();
        Ok(CodeSpec {
            grid,
            d,
            delta,
            s,
            r,
            d_tilde,
            m,
        })
    }

    pub fn grid(&self) -> &EvaluationGrid {
        &self.grid
    }

    pub fn field(&self) -> &FiniteField {
        self.grid.field()
    }

    /// The order as requested, possibly above `d_tilde`.
    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }

    /// 1-based locality coordinate.
    pub fn s(&self) -> usize {
        self.s
    }

    /// Locality `r = d_s - delta + 1`.
    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn d_tilde(&self) -> u32 {
        self.d_tilde
    }

    /// Code length.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.grid.nvars()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.grid.sizes()
    }

    /// `d_s`.
    pub fn group_size(&self) -> usize {
        self.grid.factor(self.s - 1).len()
    }

    /// Orders above `d_tilde` give the same code as `d_tilde`.
    pub fn effective_d(&self) -> u32 {
        self.d.min(self.d_tilde)
    }

    /// Set when `d > d_tilde` and the order was normalized down.
    pub fn exceeds_d_tilde(&self) -> bool {
        self.d > self.d_tilde
    }

    pub fn locality(&self) -> Locality {
        Locality {
            delta: self.delta,
            s: self.s,
        }
    }

    /// Same grid and locality at another order.
    pub fn with_d(&self, d: u32) -> Self {
        CodeSpec { d, ..self.clone() }
    }
}

/// Textual code description shared by the CLI and scenario files.
///
/// `factors[i]` is the subfield degree `t_i` of factor `i + 1`, so the factor
/// is the subfield of order `p^{t_i}`. Entries of `factor_elems` (keyed by
/// 1-based factor index) override that with explicit element encodings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeDescriptor {
    pub field: String,
    #[serde(default)]
    pub factors: Vec<u32>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub factor_elems: BTreeMap<usize, Vec<u32>>,
    pub d: u32,
    pub delta: u32,
    pub s: usize,
}

impl CodeDescriptor {
    pub fn grid(&self) -> Result<EvaluationGrid, CodeError> {
        let field = FiniteField::from_spec(&self.field)?;
        let n = self
            .factors
            .len()
            .max(self.factor_elems.keys().copied().max().unwrap_or(0));
        if let Some(&bad) = self.factor_elems.keys().find(|&&i| i == 0) {
            return Err(CodeError::Descriptor(format!("factor index {bad} must be 1-based")));
        }
        let mut factors = Vec::with_capacity(n);
        for i in 1..=n {
            let k = match self.factor_elems.get(&i) {
                Some(encodings) => encodings
                    .iter()
                    .map(|&x| field.element(x as u64))
                    .collect::<Result<Vec<_>, _>>()?,
                None => match self.factors.get(i - 1) {
                    Some(&t) => field.subfield_elements(t)?,
                    None => return Err(CodeError::Descriptor(format!("factor {i} is not specified"))),
                },
            };
            factors.push(k);
        }
        Ok(EvaluationGrid::new(&field, factors)?)
    }

    pub fn build(&self) -> Result<CodeSpec, CodeError> {
        CodeSpec::new(self.grid()?, self.d, self.delta, self.s)
    }
}

/// Parses `i:e1,e2,...` (1-based factor index followed by element encodings).
pub fn parse_factor_elems(text: &str) -> Result<(usize, Vec<u32>), CodeError> {
    let bad = || CodeError::Descriptor(format!("expected `i:e1,e2,...`, got `{text}`"));
    let (i, rest) = text.split_once(':').ok_or_else(bad)?;
    let i = i.trim().parse().map_err(|_| bad())?;
    let elems = rest
        .split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|_| bad()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((i, elems))
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `dim C_X(d)` for factor sizes `sizes`, by inclusion–exclusion over the
/// bounds `a_i < d_i`.
pub fn cartesian_dimension(sizes: &[usize], d: u32) -> u64 {
    let n = sizes.len();
    let full: u64 = sizes.iter().map(|&k| k as u64 - 1).sum();
    if d as u64 >= full {
        return sizes.iter().map(|&k| k as u64).product();
    }
    let mut total: i128 = 0;
    for subset in 0u32..(1 << n) {
        let removed: u64 = (0..n).filter(|i| subset & (1 << i) != 0).map(|i| sizes[i] as u64).sum();
        if removed > d as u64 {
            continue;
        }
        let rest = d as u64 - removed;
        // C(n + rest, rest) monomials of degree <= rest in n variables
        let term = binomial(n as u64 + rest, n as u64) as i128;
        if subset.count_ones() % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total as u64
}

pub fn dim_cartesian(grid: &EvaluationGrid, d: u32) -> u64 {
    cartesian_dimension(&grid.sizes(), d)
}

/// `kappa` by counting the constrained footprint.
pub fn dim_footprint(spec: &CodeSpec) -> usize {
    footprint(spec.grid(), spec.effective_d(), Some(spec.locality()))
        .expect("spec parameters are validated")
        .len()
}

/// `kappa` from cartesian dimensions: equal to `dim C_X(d)` below `r`,
/// `dim C_X(d) - sum_{i=0}^{delta-2} dim C_{X_s}(d - r - i)` up to
/// `d_tilde`, and `r * prod_{i != s} d_i` from `d_tilde` on.
pub fn dim_formula(spec: &CodeSpec) -> u64 {
    let sizes = spec.sizes();
    let s = spec.s() - 1;
    let d = spec.d();
    let r = spec.r();
    let others: Vec<usize> = sizes
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != s)
        .map(|(_, &k)| k)
        .collect();
    if d >= spec.d_tilde() {
        return r as u64 * others.iter().map(|&k| k as u64).product::<u64>();
    }
    let full = cartesian_dimension(&sizes, d);
    if d < r {
        return full;
    }
    let removed: u64 = (0..=spec.delta() - 2)
        .filter(|&i| d >= r + i)
        .map(|i| cartesian_dimension(&others, d - r - i))
        .sum();
    full - removed
}

/// Evaluations of the footprint basis; row `j` is `Psi` of basis monomial `j`.
#[derive(Clone, Debug)]
pub struct GeneratorMatrix {
    spec: CodeSpec,
    basis: Vec<Monomial>,
    rows: Vec<Vec<Elem>>,
}

// Skip the debug rank check when elimination would cost more than this.
const DEBUG_RANK_CHECK_LIMIT: usize = 1 << 26;

impl GeneratorMatrix {
    pub fn new(spec: &CodeSpec) -> Self {
        let basis =
            footprint(spec.grid(), spec.effective_d(), Some(spec.locality())).expect("spec parameters are validated");
        let rows = monomial_rows(spec.grid(), &basis);
        let g = GeneratorMatrix {
            spec: spec.clone(),
            basis,
            rows,
        };
        if cfg!(debug_assertions) && g.kappa() * g.kappa() * g.len() <= DEBUG_RANK_CHECK_LIMIT {
            debug_assert_eq!(g.rank(), g.kappa(), "footprint rows must be independent");
        }
        g
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn rows(&self) -> &[Vec<Elem>] {
        &self.rows
    }

    /// Dimension `kappa`.
    pub fn kappa(&self) -> usize {
        self.basis.len()
    }

    /// Code length `m`.
    pub fn len(&self) -> usize {
        self.spec.m()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn rank(&self) -> usize {
        linalg::rank(self.spec.field(), &self.rows)
    }

    pub fn encode(&self, message: &[Elem]) -> Result<Codeword, CodeError> {
        if message.len() != self.kappa() {
            return Err(CodeError::LengthMismatch {
                expected: self.kappa(),
                found: message.len(),
            });
        }
        let f = self.spec.field();
        let mut symbols = vec![Elem::ZERO; self.len()];
        for (&c, row) in message.iter().zip(&self.rows) {
            if c.is_zero() {
                continue;
            }
            for (s, &g) in symbols.iter_mut().zip(row) {
                *s = f.add(*s, f.mul(c, g));
            }
        }
        Ok(Codeword { symbols })
    }

    /// `sum_j message_j * basis_j`.
    pub fn message_polynomial(&self, message: &[Elem]) -> Result<Polynomial, CodeError> {
        if message.len() != self.kappa() {
            return Err(CodeError::LengthMismatch {
                expected: self.kappa(),
                found: message.len(),
            });
        }
        let terms = self.basis.iter().cloned().zip(message.iter().copied());
        Ok(Polynomial::from_terms(self.spec.field(), self.spec.n(), terms)?)
    }
}

pub fn generator_matrix(spec: &CodeSpec) -> GeneratorMatrix {
    GeneratorMatrix::new(spec)
}

/// `Psi(M)` for each monomial, computed row-parallel.
pub fn monomial_rows(grid: &EvaluationGrid, monomials: &[Monomial]) -> Vec<Vec<Elem>> {
    let f = grid.field();
    let n = grid.nvars();
    let powers: Vec<Vec<Vec<Elem>>> = (0..n)
        .map(|i| {
            let top = monomials.iter().map(|m| m.exponents()[i]).max().unwrap_or(0) as u64;
            grid.factor(i)
                .iter()
                .map(|&x| (0..=top).map(|e| f.pow(x, e)).collect())
                .collect()
        })
        .collect();
    monomials
        .par_iter()
        .map(|mono| {
            let exps = mono.exponents();
            let mut row = Vec::with_capacity(grid.len());
            grid.for_each_point(|_, idx| {
                let v = (0..n).fold(Elem::ONE, |v, i| f.mul(v, powers[i][idx[i]][exps[i] as usize]));
                row.push(v);
            });
            row
        })
        .collect()
}

/// A word of length `m`, indexed by canonical point order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Codeword {
    pub symbols: Vec<Elem>,
}

impl Codeword {
    pub fn new(symbols: Vec<Elem>) -> Self {
        Codeword { symbols }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn weight(&self) -> usize {
        hamming_weight(&self.symbols)
    }

    /// Comma-separated encodings.
    pub fn parse(field: &FiniteField, text: &str) -> Result<Self, CodeError> {
        Ok(Codeword {
            symbols: parse_elements(field, text)?,
        })
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", join_elements(&self.symbols))
    }
}

pub fn hamming_weight(symbols: &[Elem]) -> usize {
    symbols.iter().filter(|s| !s.is_zero()).count()
}

pub fn join_elements(symbols: &[Elem]) -> String {
    symbols.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

pub fn parse_elements(field: &FiniteField, text: &str) -> Result<Vec<Elem>, CodeError> {
    let t = text.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    t.split(',')
        .map(|x| {
            let v: u64 = x
                .trim()
                .parse()
                .map_err(|_| CodeError::Descriptor(format!("bad element `{}`", x.trim())))?;
            Ok(field.element(v)?)
        })
        .collect()
}
