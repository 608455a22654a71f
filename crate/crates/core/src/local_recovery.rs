//! Local repair of erased symbols.
//!
//! Fixing every coordinate except `s` gives a line of `d_s` positions. On such
//! a line a codeword is the evaluation of a univariate polynomial of degree
//! `< r` on `K_s`, so any `r` surviving symbols of the line determine the
//! rest. Positions are 0-based indices in grid order.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finite_field::{Elem, FiniteField};
use crate::linalg::lagrange_eval;
use crate::qac_code::{generator_matrix, hamming_weight, parse_elements, CodeError, CodeSpec, Codeword};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RecoveryError {
    #[error("position {pos} is outside a code of length {len}")]
    PositionOutOfRange { pos: usize, len: usize },
    #[error("word has length {found}, code has length {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("group {group} has {survivors} survivors, repair needs {needed}")]
    InsufficientSurvivors {
        group: usize,
        survivors: usize,
        needed: usize,
    },
    #[error("position {0} is not erased")]
    PositionNotErased(usize),
    #[error("position {pos} is erased or not in repair group {group}")]
    UnusableSurvivor { pos: usize, group: usize },
    #[error("checking locality needs {q}^{r} local words, budget is {budget}")]
    SearchSpaceTooLarge { q: u32, r: u32, budget: u64 },
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// The positions sharing all coordinates but `s` with a given position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairGroup {
    /// Index of the line, counting lines in grid order with coordinate `s` dropped.
    pub index: usize,
    /// Positions ordered by their `s` coordinate.
    pub members: Vec<usize>,
    /// `s` coordinate of each member.
    pub s_coordinates: Vec<Elem>,
}

impl RepairGroup {
    fn slot(&self, pos: usize) -> Option<usize> {
        self.members.iter().position(|&p| p == pos)
    }
}

pub fn repair_group(spec: &CodeSpec, pos: usize) -> Result<RepairGroup, RecoveryError> {
    let grid = spec.grid();
    if pos >= grid.len() {
        return Err(RecoveryError::PositionOutOfRange { pos, len: grid.len() });
    }
    let s = spec.s() - 1;
    let mut idx = grid.point_indices(pos);
    let sizes = grid.sizes();
    let index = idx
        .iter()
        .zip(&sizes)
        .enumerate()
        .filter(|&(i, _)| i != s)
        .fold(0, |acc, (_, (&j, &size))| acc * size + j);
    let members = (0..sizes[s])
        .map(|j| {
            idx[s] = j;
            grid.position_of(&idx)
        })
        .collect();
    Ok(RepairGroup {
        index,
        members,
        s_coordinates: grid.factor(s).to_vec(),
    })
}

/// Every repair group, in index order.
pub fn repair_groups(spec: &CodeSpec) -> Vec<RepairGroup> {
    let stride = spec.grid().stride(spec.s() - 1);
    let size = spec.group_size();
    // first member of each line: s coordinate 0
    (0..spec.m())
        .filter(|pos| (pos / stride).is_multiple_of(size))
        .map(|pos| repair_group(spec, pos).expect("position in range"))
        .collect()
}

/// A received word with some symbols missing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErasedCodeword {
    symbols: Vec<Elem>,
    erased: Vec<bool>,
}

impl ErasedCodeword {
    pub fn new(word: &Codeword, erased: &[usize]) -> Result<Self, RecoveryError> {
        let len = word.len();
        let mut mask = vec![false; len];
        let mut symbols = word.symbols.clone();
        for &pos in erased {
            if pos >= len {
                return Err(RecoveryError::PositionOutOfRange { pos, len });
            }
            mask[pos] = true;
            symbols[pos] = Elem::ZERO;
        }
        Ok(ErasedCodeword { symbols, erased: mask })
    }

    /// Comma-separated encodings with `?` for an erasure.
    pub fn parse(field: &FiniteField, text: &str) -> Result<Self, RecoveryError> {
        let mut symbols = Vec::new();
        let mut erased = Vec::new();
        for tok in text.split(',').map(str::trim) {
            if tok == "?" {
                symbols.push(Elem::ZERO);
                erased.push(true);
            } else {
                symbols.extend(parse_elements(field, tok)?);
                erased.push(false);
            }
        }
        Ok(ErasedCodeword { symbols, erased })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn is_erased(&self, pos: usize) -> bool {
        self.erased[pos]
    }

    pub fn erased_positions(&self) -> Vec<usize> {
        (0..self.len()).filter(|&p| self.erased[p]).collect()
    }

    /// The symbol at `pos`, or `None` if erased.
    pub fn get(&self, pos: usize) -> Option<Elem> {
        (!self.erased[pos]).then_some(self.symbols[pos])
    }

    pub fn mask(&self) -> &[bool] {
        &self.erased
    }
}

impl fmt::Display for ErasedCodeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for pos in 0..self.len() {
            if pos > 0 {
                f.write_str(",")?;
            }
            match self.get(pos) {
                Some(e) => write!(f, "{e}")?,
                None => f.write_str("?")?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recovery {
    pub position: usize,
    pub value: Elem,
    /// Survivors read, in the order used.
    pub read: Vec<usize>,
}

fn check_len(spec: &CodeSpec, word: &ErasedCodeword) -> Result<(), RecoveryError> {
    if word.len() != spec.m() {
        return Err(RecoveryError::LengthMismatch {
            expected: spec.m(),
            found: word.len(),
        });
    }
    Ok(())
}

fn interpolate(spec: &CodeSpec, group: &RepairGroup, word: &ErasedCodeword, pos: usize, read: &[usize]) -> Elem {
    let xs: Vec<Elem> = read
        .iter()
        .map(|&p| group.s_coordinates[group.slot(p).unwrap()])
        .collect();
    let ys: Vec<Elem> = read.iter().map(|&p| word.symbols[p]).collect();
    let x = group.s_coordinates[group.slot(pos).unwrap()];
    lagrange_eval(spec.field(), &xs, &ys, x)
}

/// Repairs `pos` from the first `r` surviving members of its group.
pub fn recover_symbol(spec: &CodeSpec, word: &ErasedCodeword, pos: usize) -> Result<Recovery, RecoveryError> {
    check_len(spec, word)?;
    let group = repair_group(spec, pos)?;
    if !word.is_erased(pos) {
        return Err(RecoveryError::PositionNotErased(pos));
    }
    let survivors: Vec<usize> = group.members.iter().copied().filter(|&p| !word.is_erased(p)).collect();
    let needed = spec.r() as usize;
    if survivors.len() < needed {
        return Err(RecoveryError::InsufficientSurvivors {
            group: group.index,
            survivors: survivors.len(),
            needed,
        });
    }
    let read = survivors[..needed].to_vec();
    let value = interpolate(spec, &group, word, pos, &read);
    Ok(Recovery {
        position: pos,
        value,
        read,
    })
}

/// Repairs `pos` from the first `r` of the given survivors, which must be
/// unerased members of the same group.
pub fn recover_symbol_with(
    spec: &CodeSpec,
    word: &ErasedCodeword,
    pos: usize,
    survivors: &[usize],
) -> Result<Recovery, RecoveryError> {
    check_len(spec, word)?;
    let group = repair_group(spec, pos)?;
    if !word.is_erased(pos) {
        return Err(RecoveryError::PositionNotErased(pos));
    }
    let needed = spec.r() as usize;
    let mut read: Vec<usize> = Vec::with_capacity(needed);
    for &p in survivors {
        if p >= word.len() || word.is_erased(p) || group.slot(p).is_none() {
            return Err(RecoveryError::UnusableSurvivor {
                pos: p,
                group: group.index,
            });
        }
        if !read.contains(&p) && read.len() < needed {
            read.push(p);
        }
    }
    if read.len() < needed {
        return Err(RecoveryError::InsufficientSurvivors {
            group: group.index,
            survivors: read.len(),
            needed,
        });
    }
    let value = interpolate(spec, &group, word, pos, &read);
    Ok(Recovery {
        position: pos,
        value,
        read,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveryStats {
    pub erased: usize,
    pub repaired: usize,
    pub symbols_read: usize,
}

/// Repairs every erasure locally. Fails on the first group left with fewer
/// than `r` survivors.
pub fn recover_all(spec: &CodeSpec, word: &ErasedCodeword) -> Result<(Codeword, RecoveryStats), RecoveryError> {
    check_len(spec, word)?;
    let erased = word.erased_positions();
    let mut out = word.symbols.clone();
    let mut stats = RecoveryStats {
        erased: erased.len(),
        ..Default::default()
    };
    for &pos in &erased {
        let rec = recover_symbol(spec, word, pos)?;
        out[pos] = rec.value;
        stats.repaired += 1;
        stats.symbols_read += rec.read.len();
    }
    Ok((Codeword::new(out), stats))
}

/// True when every group touched by the mask keeps at least `r` survivors.
pub fn is_recoverable(spec: &CodeSpec, erased: &[bool]) -> bool {
    let r = spec.r() as usize;
    repair_groups(spec)
        .iter()
        .all(|g| g.members.iter().filter(|&&p| !erased[p]).count() >= r)
}

/// Checks the `(r, delta)` locality of the code directly: every generator
/// row restricted to every group is interpolated by `r` of its values, and
/// the local code of degree `< r` polynomials on `K_s` has distance `delta`.
pub fn verify_locality(spec: &CodeSpec, budget: u64) -> Result<bool, RecoveryError> {
    let field = spec.field();
    let q = field.order();
    let r = spec.r();
    let local_words = (q as u64).checked_pow(r).filter(|&t| t <= budget);
    let Some(local_words) = local_words else {
        return Err(RecoveryError::SearchSpaceTooLarge { q, r, budget });
    };

    let xs = spec.grid().factor(spec.s() - 1);
    let ru = r as usize;
    for coeffs in 1..local_words {
        let mut c = coeffs;
        let poly: Vec<Elem> = (0..ru)
            .map(|_| {
                let e = Elem::from_raw((c % q as u64) as u32);
                c /= q as u64;
                e
            })
            .collect();
        let values: Vec<Elem> = xs
            .iter()
            .map(|&x| {
                poly.iter()
                    .rev()
                    .fold(Elem::ZERO, |acc, &a| field.add(field.mul(acc, x), a))
            })
            .collect();
        if (hamming_weight(&values) as u32) < spec.delta() {
            return Ok(false);
        }
    }

    let g = generator_matrix(spec);
    for group in repair_groups(spec) {
        let nodes = &group.s_coordinates[..ru];
        for row in g.rows() {
            let ys: Vec<Elem> = group.members[..ru].iter().map(|&p| row[p]).collect();
            for (slot, &p) in group.members.iter().enumerate().skip(ru) {
                if lagrange_eval(field, nodes, &ys, group.s_coordinates[slot]) != row[p] {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
