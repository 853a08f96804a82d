//! Pass/fail outcomes with replayable witnesses.

use serde::{Deserialize, Serialize};

use crate::exactla::Rational;

/// Where a vector witness lives: a Fock level and the operator indices
/// that select the identity being checked. Tensor checks leave both empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Locus {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub indices: Vec<usize>,
}

impl Locus {
    pub fn at_level(level: usize, indices: Vec<usize>) -> Self {
        Locus {
            level: Some(level),
            indices,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A basis input on which the two sides differ, and `lhs − rhs` there.
    Vector {
        #[serde(with = "crate::ratser::vec")]
        input: Vec<Rational>,
        #[serde(with = "crate::ratser::vec")]
        difference: Vec<Rational>,
        #[serde(default)]
        locus: Locus,
    },
    /// A degree where two counts disagree.
    Degree {
        degree: usize,
        observed: usize,
        expected: usize,
    },
    /// A series coefficient that differs from the required value.
    Coefficient {
        degree: usize,
        observed: i64,
        expected: i64,
    },
    /// A word with two different normal forms.
    Word {
        word: Vec<usize>,
        #[serde(with = "crate::ratser::vec")]
        left: Vec<Rational>,
        #[serde(with = "crate::ratser::vec")]
        right: Vec<Rational>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    /// The exact residual is the zero matrix (or the counts agree).
    pub residual_norm_zero: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub details: String,
}

impl CheckReport {
    pub fn pass(name: impl Into<String>, details: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            passed: true,
            residual_norm_zero: true,
            witness: None,
            details: details.into(),
        }
    }

    pub fn fail(name: impl Into<String>, witness: Witness, details: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            passed: false,
            residual_norm_zero: false,
            witness: Some(witness),
            details: details.into(),
        }
    }
}

/// Short text listing the nonzero entries of a residual vector.
pub fn describe_residual(v: &[Rational], limit: usize) -> String {
    let nz: Vec<String> = v
        .iter()
        .enumerate()
        .filter(|(_, x)| !num_traits::Zero::is_zero(*x))
        .map(|(i, x)| format!("[{i}]={x}"))
        .collect();
    let shown = nz.iter().take(limit).cloned().collect::<Vec<_>>().join(", ");
    if nz.len() > limit {
        format!("{} nonzero entries: {shown}, ...", nz.len())
    } else {
        format!("{} nonzero entries: {shown}", nz.len())
    }
}
