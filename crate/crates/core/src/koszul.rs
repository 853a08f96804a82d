//! Koszul-dual quadratic data and the series identity `G(t)·G^!(−t) = 1`.
//!
//! `V*` is identified with `V` through the Gram matrix, so the dual relation
//! space `R^⊥` lives in the same coordinates as `R`. The dual series is
//! always computed from `R^⊥` by graded kernels, never from the identity.

use serde::{Deserialize, Serialize};

use crate::check::{CheckReport, Witness};
use crate::error::Result;
use crate::exactla::{Guard, RationalMatrix, Subspace};
use crate::hilbert::{series_for_projector, SeriesCoeffs};
use crate::statmodel::{internal_projectors, RelationSet, StatModel};

pub const KOSZUL_SINGLE: &str = "koszul_single_mode";
pub const KOSZUL_FULL: &str = "koszul_full";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualData {
    pub r_perp: Subspace,
    pub dual_projector: RationalMatrix,
}

/// `R^⊥ = {φ : ⟨φ, r⟩ = 0 ∀ r ∈ R}` under `gram`, with its orthogonal
/// projector.
pub fn dual_relations(r: &Subspace, gram: &RationalMatrix) -> Result<DualData> {
    let r_perp = r.annihilator(gram)?;
    let dual_projector = r_perp.orthogonal_projector(gram)?;
    Ok(DualData {
        r_perp,
        dual_projector,
    })
}

pub fn dual_series(dd: &DualData, base_dim: usize, n_max: usize, guard: &Guard) -> Result<SeriesCoeffs> {
    series_for_projector(&dd.dual_projector, base_dim, n_max, guard)
}

/// Coefficients of `G(t)·G^!(−t)` through degree `n_max` (or the shorter
/// series).
pub fn koszul_product(g: &SeriesCoeffs, g_dual: &SeriesCoeffs, n_max: usize) -> Vec<i64> {
    let top = n_max
        .min(g.coeffs.len().saturating_sub(1))
        .min(g_dual.coeffs.len().saturating_sub(1));
    if g.coeffs.is_empty() || g_dual.coeffs.is_empty() {
        return Vec::new();
    }
    (0..=top)
        .map(|n| {
            (0..=n)
                .map(|i| {
                    let term = g.coeffs[i] as i64 * g_dual.coeffs[n - i] as i64;
                    if (n - i) % 2 == 0 {
                        term
                    } else {
                        -term
                    }
                })
                .sum()
        })
        .collect()
}

pub fn check_koszul_identity(
    name: &str,
    g: &SeriesCoeffs,
    g_dual: &SeriesCoeffs,
    n_max: usize,
) -> CheckReport {
    let product = koszul_product(g, g_dual, n_max);
    let top = product.len().saturating_sub(1);
    let bad = product
        .iter()
        .enumerate()
        .find(|&(n, &c)| c != i64::from(n == 0));
    match bad {
        None => CheckReport::pass(
            name,
            format!("G(t)·G!(−t) ≡ 1 mod t^{}: G = {:?}, G! = {:?}", top + 1, g.coeffs, g_dual.coeffs),
        ),
        Some((degree, &observed)) => CheckReport::fail(
            name,
            Witness::Coefficient {
                degree,
                observed,
                expected: i64::from(degree == 0),
            },
            format!(
                "coefficient of t^{degree} in G(t)·G!(−t) is {observed}; product {product:?}, G = {:?}, G! = {:?}",
                g.coeffs, g_dual.coeffs
            ),
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualPair {
    pub series: SeriesCoeffs,
    pub dual: SeriesCoeffs,
    pub relation_dim: usize,
    pub dual_relation_dim: usize,
    pub check: CheckReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KoszulReport {
    pub single: DualPair,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full: Option<DualPair>,
    /// PBW-implies-Koszul violations.
    pub alarms: Vec<String>,
}

impl KoszulReport {
    pub fn checks(&self) -> Vec<&CheckReport> {
        let mut v = vec![&self.single.check];
        if let Some(f) = &self.full {
            v.push(&f.check);
        }
        v
    }
}

fn dual_pair(
    name: &str,
    projector: &RationalMatrix,
    r: &Subspace,
    gram: &RationalMatrix,
    base: usize,
    n_max: usize,
    guard: &Guard,
) -> Result<DualPair> {
    let series = series_for_projector(projector, base, n_max, guard)?;
    let dd = dual_relations(r, gram)?;
    let dual = dual_series(&dd, base, n_max, guard)?;
    let check = check_koszul_identity(name, &series, &dual, n_max);
    Ok(DualPair {
        series,
        dual,
        relation_dim: r.dim(),
        dual_relation_dim: dd.r_perp.dim(),
        check,
    })
}

/// Single-mode duality always; the full algebra too when `include_full`.
/// `pbw_passed` feeds the cross-module alarm.
pub fn koszul_report(
    model: &StatModel,
    rs: &RelationSet,
    n_max: usize,
    include_full: bool,
    pbw_passed: Option<bool>,
    guard: &Guard,
) -> Result<KoszulReport> {
    let (sym, _) = internal_projectors(model)?;
    let single = dual_pair(
        KOSZUL_SINGLE,
        &sym,
        model.w_sym(),
        &model.internal_gram(),
        model.k_dim(),
        n_max,
        guard,
    )?;
    let full = if include_full {
        Some(dual_pair(
            KOSZUL_FULL,
            rs.p_gen(),
            rs.r_gen(),
            &model.pair_gram(),
            model.gen_dim(),
            n_max,
            guard,
        )?)
    } else {
        None
    };
    let mut alarms = Vec::new();
    if pbw_passed == Some(true) {
        let pairs = std::iter::once(&single).chain(full.as_ref());
        for p in pairs {
            if !p.check.passed {
                alarms.push(format!(
                    "PBW cubic criterion passes but {} fails: {}",
                    p.check.name, p.check.details
                ));
            }
        }
    }
    Ok(KoszulReport {
        single,
        full,
        alarms,
    })
}
