//! Re-evaluates the witnesses stored in a report.
//!
//! Vector witnesses are replayed by applying the identity under test to the
//! stored input and comparing with the stored difference; word witnesses by
//! reducing the word both ways. Count and coefficient witnesses are replayed
//! by recomputing the quantities they compare.

use serde::{Deserialize, Serialize};

use crate::braid::{
    build_admissible, braid_difference, cubic_normal_form, pbw_cubic_check, GLOBAL_YB, INTERNAL_YB_EXT,
    INTERNAL_YB_SYM, PBW_CONFLUENCE, PBW_REDUCTION_BRAID,
};
use crate::check::{CheckReport, Witness};
use crate::error::{Error, Result};
use crate::exactla::{unit_vector, Guard, LocalOperator, Rational};
use crate::fock::{build_fock, FockRealization};
use crate::modelfile::ModelFile;
use crate::report::{classification_block, hilbert_block, Report, SeriesMode};
use crate::koszul::koszul_report;
use crate::statmodel::{assemble_pgen, internal_projectors, RelationSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayEntry {
    pub section: String,
    pub check: String,
    pub reproduced: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayOutcome {
    pub entries: Vec<ReplayEntry>,
}

impl ReplayOutcome {
    pub fn all_reproduced(&self) -> bool {
        self.entries.iter().all(|e| e.reproduced)
    }
}

struct Ctx<'a> {
    file: ModelFile,
    rs: RelationSet,
    guard: Guard,
    report: &'a Report,
    fock: Option<FockRealization>,
}

impl Ctx<'_> {
    fn fock(&mut self) -> Result<&FockRealization> {
        if self.fock.is_none() {
            let n = self.report.fock.as_ref().map_or(self.report.degree, |f| f.n_max);
            self.fock = Some(build_fock(&self.file.model, &self.rs, n, &self.guard)?);
        }
        Ok(self.fock.as_ref().expect("just built"))
    }
}

/// Replays every witness in `report`. `guard_dim` overrides the guard the
/// report was produced with.
pub fn replay_report(report: &Report, guard_dim: Option<usize>) -> Result<ReplayOutcome> {
    let text = serde_json::to_string(&report.model).map_err(|e| Error::Replay(e.to_string()))?;
    let file = ModelFile::parse_str(&text)?;
    let guard = Guard::new(guard_dim.unwrap_or(report.guard_dim));
    let rs = assemble_pgen(&file.model)?;
    let mut ctx = Ctx {
        file,
        rs,
        guard,
        report,
        fock: None,
    };
    let mut entries = Vec::new();
    for (section, check) in report.checks() {
        let Some(w) = &check.witness else { continue };
        let (reproduced, detail) = replay_one(&mut ctx, section, check, w)?;
        entries.push(ReplayEntry {
            section: section.to_string(),
            check: check.name.clone(),
            reproduced,
            detail,
        });
    }
    Ok(ReplayOutcome { entries })
}

fn compare_vec(got: &[Rational], want: &[Rational]) -> (bool, String) {
    if got == want {
        (true, format!("residual reproduced ({} entries)", got.len()))
    } else {
        let at = got.iter().zip(want).position(|(a, b)| a != b);
        let detail = match at {
            Some(i) => format!("entry {i}: recomputed {} vs stored {}", got[i], want[i]),
            None => format!("length {} vs stored {}", got.len(), want.len()),
        };
        (false, detail)
    }
}

fn compare_witness(name: &str, recomputed: Option<&CheckReport>, stored: &Witness) -> (bool, String) {
    match recomputed {
        Some(c) if c.witness.as_ref() == Some(stored) => (true, "recomputed witness is identical".into()),
        Some(c) => (false, format!("recomputed `{name}` gives {:?}", c.witness)),
        None => (false, format!("check `{name}` not produced on recomputation")),
    }
}

fn replay_one(ctx: &mut Ctx, section: &str, check: &CheckReport, w: &Witness) -> Result<(bool, String)> {
    let model = &ctx.file.model;
    let name = check.name.as_str();
    match (section, w) {
        ("braid", Witness::Vector { input, difference, .. }) => {
            let (p, base) = match name {
                GLOBAL_YB => (ctx.rs.p_gen().clone(), model.gen_dim()),
                INTERNAL_YB_SYM => (internal_projectors(model)?.0, model.k_dim()),
                INTERNAL_YB_EXT => (internal_projectors(model)?.1, model.k_dim()),
                PBW_REDUCTION_BRAID => (build_admissible(model, &ctx.rs).reduction, model.gen_dim()),
                _ => return Err(Error::Replay(format!("unknown braid check `{name}`"))),
            };
            let dim = ctx.guard.check_power(base, 3)?;
            if input.len() != dim {
                return Err(Error::Replay(format!("`{name}` input has length {}, expected {dim}", input.len())));
            }
            let op = LocalOperator::new(&p, base, 2)?;
            Ok(compare_vec(&braid_difference(&op, input), difference))
        }
        ("braid", Witness::Word { word, left, right }) if name == PBW_CONFLUENCE => {
            let n = model.gen_dim();
            if word.len() != 3 || word.iter().any(|&x| x >= n) {
                return Err(Error::Replay(format!("bad cubic word {word:?}")));
            }
            let pi = LocalOperator::new(&build_admissible(model, &ctx.rs).reduction, n, 2)?;
            let x = unit_vector(n * n * n, (word[0] * n + word[1]) * n + word[2]);
            let l = cubic_normal_form(&pi, &x, 0);
            let r = cubic_normal_form(&pi, &x, 1);
            let ok = &l == left && &r == right && l != r;
            Ok((ok, format!("normal forms {} and differ: {}", if ok { "reproduced" } else { "changed" }, l != r)))
        }
        ("braid", _) => {
            let pbw = pbw_cubic_check(model, &ctx.rs, &ctx.guard)?;
            let found = pbw.checks().into_iter().find(|c| c.name == name);
            Ok(compare_witness(name, found, w))
        }
        ("hilbert", _) => {
            let mode = ctx.report.hilbert.as_ref().map_or(SeriesMode::Both, |h| h.mode);
            let h = hilbert_block(model, &ctx.rs, ctx.report.degree, mode, &ctx.guard)?;
            Ok(compare_witness(name, h.checks.iter().find(|c| c.name == name), w))
        }
        ("classification", _) => {
            let c = classification_block(model, ctx.report.degree, &ctx.guard)?;
            Ok(compare_witness(name, c.checks.iter().find(|c| c.name == name), w))
        }
        ("koszul", _) => {
            let full = ctx.report.koszul.as_ref().is_some_and(|k| k.full.is_some());
            let k = koszul_report(model, &ctx.rs, ctx.report.degree, full, None, &ctx.guard)?;
            Ok(compare_witness(name, k.checks().into_iter().find(|c| c.name == name), w))
        }
        ("fock", Witness::Vector { input, difference, locus }) => {
            let ex = ctx.file.exchange.clone();
            let fock = ctx.fock()?;
            let got = if name == "exchange_component_adjointness" {
                let ex = ex.ok_or_else(|| Error::Replay("exchange_component_adjointness witness without exchange data".into()))?;
                fock.component_residual(&ex)?.data().to_vec()
            } else {
                fock.replay(name, locus, input, ex.as_ref())?
            };
            Ok(compare_vec(&got, difference))
        }
        ("fock", _) => {
            let fock = ctx.fock()?;
            let c = fock.check_gram_positive();
            Ok(compare_witness(name, (c.name == name).then_some(&c), w))
        }
        _ => Err(Error::Replay(format!("no replay rule for `{section}.{name}`"))),
    }
}
