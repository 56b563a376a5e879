//! Exact counts side by side with their spectral approximations.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::classical::classical_approx;
use crate::comb::{comb_approx, comb_eigen, COMB_WINDOWS};
use crate::exact::{euler_exact, ExactError};
use crate::graph::{comb, grid2, BipartiteGraph, GraphError};
use crate::grid2::{grid2_approx, grid2_eigen, GRID2_WINDOWS};
use crate::ode::OdeError;
use crate::series::SciFloat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `P₂ □_{0} P_m`.
    Comb,
    /// `P₂ □ P_m`.
    Grid2,
    /// `P_m`, approximated by the closed-form spectrum.
    Path,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Comb, Family::Grid2, Family::Path];

    pub fn graph(self, m: usize) -> Result<BipartiteGraph, GraphError> {
        match self {
            Family::Comb => comb(m),
            Family::Grid2 => grid2(m),
            Family::Path => BipartiteGraph::path(m),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Comb => "comb",
            Family::Grid2 => "grid2",
            Family::Path => "path",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown family `{0}` (expected comb, grid2 or path)")]
pub struct UnknownFamily(pub String);

impl FromStr for Family {
    type Err = UnknownFamily;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "comb" => Ok(Family::Comb),
            "grid2" => Ok(Family::Grid2),
            "path" => Ok(Family::Path),
            other => Err(UnknownFamily(other.to_string())),
        }
    }
}

/// Relative error allowed at `m`; `m = 1` is reported but not judged.
pub fn threshold(m: usize) -> Option<f64> {
    match m {
        0 | 1 => None,
        2 | 3 => Some(2e-3),
        4..=7 => Some(1e-4),
        _ => Some(1e-6),
    }
}

#[derive(Debug, Error)]
pub enum CompareError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error("found {found} of {requested} eigenvalues")]
    Incomplete { found: usize, requested: usize },
    #[error("between 1 and {max} spectral terms are supported, got {got}")]
    Terms { got: usize, max: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub m: usize,
    #[serde(serialize_with = "as_decimal")]
    pub exact: BigUint,
    pub approx: SciFloat,
    pub rel_err: f64,
    pub threshold: Option<f64>,
}

impl CompareRow {
    pub fn passes(&self) -> bool {
        self.threshold.is_none_or(|t| self.rel_err <= t)
    }
}

fn as_decimal<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

/// Exact counts for `m = 1..=m_max`, computed in parallel.
pub fn exact_counts(family: Family, m_max: usize) -> Result<Vec<BigUint>, CompareError> {
    (1..=m_max)
        .into_par_iter()
        .map(|m| Ok(euler_exact(&family.graph(m)?)?))
        .collect()
}

/// Approximations `a(m)` from `terms` spectral terms, for `m = 1..=m_max`.
pub fn approximations(
    family: Family,
    m_max: usize,
    terms: usize,
    steps_per_unit: usize,
) -> Result<Vec<SciFloat>, CompareError> {
    let ms = 1..=m_max;
    match family {
        Family::Comb => {
            check_terms(terms, COMB_WINDOWS.len())?;
            let spec = comb_eigen(&COMB_WINDOWS[..terms], terms, steps_per_unit)?;
            if !spec.is_complete() {
                return Err(CompareError::Incomplete {
                    found: spec.pairs.len(),
                    requested: terms,
                });
            }
            Ok(ms.map(|m| comb_approx(&spec.pairs, m)).collect())
        }
        Family::Grid2 => {
            check_terms(terms, GRID2_WINDOWS.len())?;
            let spec = grid2_eigen(&GRID2_WINDOWS[..terms], terms, steps_per_unit)?;
            if !spec.is_complete() {
                return Err(CompareError::Incomplete {
                    found: spec.pairs.len(),
                    requested: terms,
                });
            }
            Ok(ms.map(|m| grid2_approx(&spec.pairs, m)).collect())
        }
        Family::Path => {
            check_terms(terms, usize::MAX)?;
            Ok(ms.map(|m| classical_approx(m, terms)).collect())
        }
    }
}

fn check_terms(terms: usize, max: usize) -> Result<(), CompareError> {
    if terms == 0 || terms > max {
        return Err(CompareError::Terms { got: terms, max });
    }
    Ok(())
}

/// One row per `m = 1..=m_max`.
pub fn compare_rows(
    family: Family,
    m_max: usize,
    terms: usize,
    steps_per_unit: usize,
) -> Result<Vec<CompareRow>, CompareError> {
    let approx = approximations(family, m_max, terms, steps_per_unit)?;
    let exact = exact_counts(family, m_max)?;
    Ok(exact
        .into_iter()
        .zip(approx)
        .enumerate()
        .map(|(i, (exact, approx))| CompareRow {
            m: i + 1,
            rel_err: approx.rel_err(&exact),
            exact,
            approx,
            threshold: threshold(i + 1),
        })
        .collect())
}
