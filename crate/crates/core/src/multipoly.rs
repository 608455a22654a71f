//! Sparse multivariate polynomials, evaluation grids and footprints.
//!
//! Monomials are ordered graded-lexicographically with `X_1` the most
//! significant variable (`X_n < ... < X_1`). The vanishing ideal of a grid
//! `K_1 x ... x K_n` is generated by the univariate products
//! `f_i = prod_{a in K_i} (X_i - a)`; their leading monomials `X_i^{d_i}` are
//! pairwise coprime, so they already form a Gröbner basis and reduction is
//! plain division by them.
//!
//! Text format: terms joined by `+`, each term `c*X1^a1*X2^a2...` with the
//! coefficient given as an element encoding, zero exponents omitted, unit
//! coefficients and `^1` optional. Whitespace is ignored when parsing.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::finite_field::{Elem, FieldError, FiniteField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("expected {expected} variables, found {found}")]
    VariableCountMismatch { expected: usize, found: usize },
    #[error("point has {found} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operands are defined over different fields")]
    MixedFields,
    #[error("invalid locality: delta = {delta} with |K_{s}| = {size} (need delta >= 2 and |K_s| - delta + 1 >= 1)")]
    InvalidLocality { delta: u32, s: usize, size: usize },
    #[error("coordinate {s} is out of range 1..={n}")]
    BadCoordinate { s: usize, n: usize },
    #[error("factor {index} has {size} elements, at least 2 are required")]
    GridTooSmall { index: usize, size: usize },
    #[error("factor {index} repeats element {element}")]
    DuplicateElement { index: usize, element: u32 },
    #[error("a grid needs at least one factor")]
    EmptyGrid,
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Exponent vector `(a_1, ..., a_n)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    /// `X_var` with a 0-based variable index.
    pub fn var(nvars: usize, var: usize, exponent: u32) -> Self {
        let mut e = vec![0; nvars];
        e[var] = exponent;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if a == 1 {
                write!(f, "X{}", i + 1)?;
            } else {
                write!(f, "X{}^{}", i + 1, a)?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// A polynomial over a finite field with no zero coefficients stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial {
    field: FiniteField,
    nvars: usize,
    terms: BTreeMap<Monomial, Elem>,
}

impl Polynomial {
    pub fn zero(field: &FiniteField, nvars: usize) -> Self {
        Polynomial {
            field: field.clone(),
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &FiniteField, nvars: usize, c: Elem) -> Self {
        Self::term(field, Monomial::one(nvars), c)
    }

    pub fn term(field: &FiniteField, monomial: Monomial, c: Elem) -> Self {
        let nvars = monomial.nvars();
        let mut p = Self::zero(field, nvars);
        p.add_term(monomial, c);
        p
    }

    pub fn from_terms(
        field: &FiniteField,
        nvars: usize,
        terms: impl IntoIterator<Item = (Monomial, Elem)>,
    ) -> Result<Self, PolyError> {
        let mut p = Self::zero(field, nvars);
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(PolyError::VariableCountMismatch {
                    expected: nvars,
                    found: m.nvars(),
                });
            }
            if !field.contains(c) {
                return Err(FieldError::EncodingOutOfRange {
                    value: c.encoding() as u64,
                    q: field.order(),
                }
                .into());
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// `prod_t (X_var - roots[t])`, `var` 0-based.
    pub fn root_product(field: &FiniteField, nvars: usize, var: usize, roots: &[Elem]) -> Self {
        let mut p = Self::constant(field, nvars, Elem::ONE);
        for &r in roots {
            let lin = Self::from_terms(
                field,
                nvars,
                [
                    (Monomial::var(nvars, var, 1), Elem::ONE),
                    (Monomial::one(nvars), field.neg(r)),
                ],
            )
            .expect("well-formed linear factor");
            p = p.mul(&lin).expect("same ring");
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Elem) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = self.field.add(*o.get(), c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, Elem)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: &Monomial) -> Elem {
        self.terms.get(m).copied().unwrap_or(Elem::ZERO)
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.keys().next_back()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Degree in a 0-based variable; 0 for the zero polynomial.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    fn compatible(&self, other: &Self) -> Result<(), PolyError> {
        if self.field != other.field {
            return Err(PolyError::MixedFields);
        }
        if self.nvars != other.nvars {
            return Err(PolyError::VariableCountMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(self.field.neg(Elem::ONE))
    }

    pub fn scale(&self, c: Elem) -> Self {
        let mut out = Self::zero(&self.field, self.nvars);
        for (m, &a) in &self.terms {
            out.add_term(m.clone(), self.field.mul(a, c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.compatible(other)?;
        let mut out = Self::zero(&self.field, self.nvars);
        for (m1, &c1) in &self.terms {
            for (m2, &c2) in &other.terms {
                out.add_term(m1.mul(m2), self.field.mul(c1, c2));
            }
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[Elem]) -> Result<Elem, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        let f = &self.field;
        let mut acc = Elem::ZERO;
        for (m, &c) in &self.terms {
            let v =
                m.0.iter()
                    .zip(point)
                    .fold(c, |v, (&a, &x)| f.mul(v, f.pow(x, a as u64)));
            acc = f.add(acc, v);
        }
        Ok(acc)
    }

    /// `Psi(f)`: values at every grid point in canonical order.
    pub fn evaluate_on_grid(&self, grid: &EvaluationGrid) -> Result<Vec<Elem>, PolyError> {
        grid.check_polynomial(self)?;
        let f = &self.field;
        let n = self.nvars;
        // powers[i][idx][e] = K_i[idx]^e
        let powers: Vec<Vec<Vec<Elem>>> = (0..n)
            .map(|i| {
                let top = self.degree_in(i) as u64;
                grid.factor(i)
                    .iter()
                    .map(|&x| (0..=top).map(|e| f.pow(x, e)).collect())
                    .collect()
            })
            .collect();
        let terms: Vec<(&[u32], Elem)> = self.terms.iter().map(|(m, &c)| (m.exponents(), c)).collect();
        let mut out = Vec::with_capacity(grid.len());
        grid.for_each_point(|_, idx| {
            let mut acc = Elem::ZERO;
            for &(exps, c) in &terms {
                let mut v = c;
                for i in 0..n {
                    let a = exps[i];
                    if a != 0 {
                        v = f.mul(v, powers[i][idx[i]][a as usize]);
                    }
                }
                acc = f.add(acc, v);
            }
            out.push(acc);
        });
        Ok(out)
    }

    /// Parses the text format described in the module docs.
    pub fn parse(field: &FiniteField, nvars: usize, text: &str) -> Result<Self, PolyError> {
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = Self::zero(field, nvars);
        if cleaned.is_empty() {
            return Ok(p);
        }
        let bad = |why: &str| PolyError::Parse(format!("{why} in `{text}`"));
        for term in cleaned.split('+') {
            if term.is_empty() {
                return Err(bad("empty term"));
            }
            let mut coeff = Elem::ONE;
            let mut exps = vec![0u32; nvars];
            for factor in term.split('*') {
                if let Some(rest) = factor.strip_prefix(['X', 'x']) {
                    let (var, exp) = match rest.split_once('^') {
                        Some((v, e)) => (v, e.parse::<u32>().map_err(|_| bad("bad exponent"))?),
                        None => (rest, 1),
                    };
                    let var: usize = var.parse().map_err(|_| bad("bad variable index"))?;
                    if var == 0 || var > nvars {
                        return Err(bad("variable index out of range"));
                    }
                    exps[var - 1] += exp;
                } else {
                    let c: u64 = factor.parse().map_err(|_| bad("bad coefficient"))?;
                    coeff = field.mul(coeff, field.element(c)?);
                }
            }
            p.add_term(Monomial(exps), coeff);
        }
        Ok(p)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let constant = m.degree() == 0;
            match (*c == Elem::ONE, constant) {
                (true, false) => write!(f, "{m}")?,
                (_, true) => write!(f, "{c}")?,
                (false, false) => write!(f, "{c}*{m}")?,
            }
        }
        Ok(())
    }
}

/// Locality parameters `(delta, s)` with `s` 1-based.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Locality {
    pub delta: u32,
    pub s: usize,
}

/// `K_1 x ... x K_n` inside one ambient field.
///
/// Each factor is stored sorted by encoding. Points are enumerated as an
/// odometer over index tuples, last coordinate fastest.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EvaluationGrid {
    field: FiniteField,
    factors: Vec<Vec<Elem>>,
    strides: Vec<usize>,
}

impl EvaluationGrid {
    pub fn new(field: &FiniteField, factors: Vec<Vec<Elem>>) -> Result<Self, PolyError> {
        if factors.is_empty() {
            return Err(PolyError::EmptyGrid);
        }
        let mut sorted = Vec::with_capacity(factors.len());
        for (i, mut k) in factors.into_iter().enumerate() {
            for &x in &k {
                if !field.contains(x) {
                    return Err(FieldError::EncodingOutOfRange {
                        value: x.encoding() as u64,
                        q: field.order(),
                    }
                    .into());
                }
            }
            k.sort();
            if let Some(w) = k.windows(2).find(|w| w[0] == w[1]) {
                return Err(PolyError::DuplicateElement {
                    index: i + 1,
                    element: w[0].encoding(),
                });
            }
            if k.len() < 2 {
                return Err(PolyError::GridTooSmall {
                    index: i + 1,
                    size: k.len(),
                });
            }
            sorted.push(k);
        }
        let mut strides = vec![1usize; sorted.len()];
        for i in (0..sorted.len() - 1).rev() {
            strides[i] = strides[i + 1] * sorted[i + 1].len();
        }
        Ok(EvaluationGrid {
            field: field.clone(),
            factors: sorted,
            strides,
        })
    }

    /// Factor `i` is the subfield of order `p^{degrees[i]}`.
    pub fn from_subfield_degrees(field: &FiniteField, degrees: &[u32]) -> Result<Self, PolyError> {
        let factors = degrees
            .iter()
            .map(|&t| field.subfield_elements(t))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(field, factors)
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.factors.len()
    }

    /// Factor `i`, 0-based.
    pub fn factor(&self, i: usize) -> &[Elem] {
        &self.factors[i]
    }

    pub fn factors(&self) -> &[Vec<Elem>] {
        &self.factors
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.factors.iter().map(Vec::len).collect()
    }

    /// Number of points `m`.
    pub fn len(&self) -> usize {
        self.strides[0] * self.factors[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Position stride of variable `i` in canonical order.
    pub fn stride(&self, i: usize) -> usize {
        self.strides[i]
    }

    pub fn point_indices(&self, position: usize) -> Vec<usize> {
        self.factors
            .iter()
            .zip(&self.strides)
            .map(|(k, &st)| (position / st) % k.len())
            .collect()
    }

    pub fn position_of(&self, indices: &[usize]) -> usize {
        indices.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn point(&self, position: usize) -> Vec<Elem> {
        self.point_indices(position)
            .into_iter()
            .enumerate()
            .map(|(i, idx)| self.factors[i][idx])
            .collect()
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<Elem>> + '_ {
        (0..self.len()).map(|j| self.point(j))
    }

    /// Calls `visit(position, indices)` for every point in canonical order.
    pub fn for_each_point(&self, mut visit: impl FnMut(usize, &[usize])) {
        let n = self.nvars();
        let mut idx = vec![0usize; n];
        for pos in 0..self.len() {
            visit(pos, &idx);
            for i in (0..n).rev() {
                idx[i] += 1;
                if idx[i] < self.factors[i].len() {
                    break;
                }
                idx[i] = 0;
            }
        }
    }

    /// The grid with factor `i` (0-based) removed.
    pub fn without_factor(&self, i: usize) -> Result<Self, PolyError> {
        let mut factors = self.factors.clone();
        factors.remove(i);
        Self::new(&self.field, factors)
    }

    /// True when every factor is a subfield and `K_1 ⊂ K_2 ⊂ ... ⊂ K_n`.
    pub fn is_subfield_chain(&self) -> bool {
        let p = self.field.characteristic() as usize;
        let mut prev_t: Option<u32> = None;
        for k in &self.factors {
            let mut size = k.len();
            let mut t = 0u32;
            while size > 1 && size % p == 0 {
                size /= p;
                t += 1;
            }
            if size != 1 || !self.field.degree().is_multiple_of(t) {
                return false;
            }
            match self.field.subfield_elements(t) {
                Ok(sub) if sub == *k => {}
                _ => return false,
            }
            if let Some(pt) = prev_t {
                if !t.is_multiple_of(pt) {
                    return false;
                }
            }
            prev_t = Some(t);
        }
        true
    }

    pub(crate) fn check_polynomial(&self, f: &Polynomial) -> Result<(), PolyError> {
        if f.field() != &self.field {
            return Err(PolyError::MixedFields);
        }
        if f.nvars() != self.nvars() {
            return Err(PolyError::VariableCountMismatch {
                expected: self.nvars(),
                found: f.nvars(),
            });
        }
        Ok(())
    }
}

/// `f_i = prod_{a in K_i} (X_i - a)` for each factor.
pub fn vanishing_basis(grid: &EvaluationGrid) -> Vec<Polynomial> {
    let n = grid.nvars();
    (0..n)
        .map(|i| Polynomial::root_product(grid.field(), n, i, grid.factor(i)))
        .collect()
}

/// Remainder of `f` on division by the vanishing basis, dividing by `f_1`
/// first. No monomial of the result is divisible by any `X_i^{d_i}`.
pub fn reduce(f: &Polynomial, grid: &EvaluationGrid) -> Result<Polynomial, PolyError> {
    grid.check_polynomial(f)?;
    let field = grid.field();
    let mut out = f.clone();
    for (i, fi) in vanishing_basis(grid).iter().enumerate() {
        let di = grid.factor(i).len() as u32;
        // X_i^{d_i} = -(lower terms of f_i) modulo the ideal
        let tail: Vec<(u32, Elem)> = fi
            .terms()
            .filter(|(m, _)| m.0[i] < di)
            .map(|(m, c)| (m.0[i], field.neg(c)))
            .collect();
        while let Some(m) = out.terms.keys().rev().find(|m| m.0[i] >= di).cloned() {
            let c = out.terms.remove(&m).expect("key just found");
            for &(j, t) in &tail {
                let mut e = m.0.clone();
                e[i] = e[i] - di + j;
                out.add_term(Monomial(e), field.mul(c, t));
            }
        }
    }
    Ok(out)
}

/// Footprint monomials `X^a` with `a_i < d_i`, total degree `<= d` and, when
/// constrained, `a_s < d_s - delta + 1`; ascending graded-lex order.
pub fn footprint(grid: &EvaluationGrid, d: u32, constraint: Option<Locality>) -> Result<Vec<Monomial>, PolyError> {
    let sizes = grid.sizes();
    let mut bounds: Vec<u32> = sizes.iter().map(|&k| k as u32 - 1).collect();
    if let Some(Locality { delta, s }) = constraint {
        if s == 0 || s > sizes.len() {
            return Err(PolyError::BadCoordinate { s, n: sizes.len() });
        }
        let ds = sizes[s - 1];
        if delta < 2 || delta as usize > ds {
            return Err(PolyError::InvalidLocality { delta, s, size: ds });
        }
        bounds[s - 1] = (ds as u32) - delta;
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; sizes.len()];
    fn rec(i: usize, budget: u32, bounds: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == bounds.len() {
            out.push(Monomial(cur.clone()));
            return;
        }
        for a in 0..=bounds[i].min(budget) {
            cur[i] = a;
            rec(i + 1, budget - a, bounds, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, d, &bounds, &mut cur, &mut out);
    out.sort();
    Ok(out)
}
