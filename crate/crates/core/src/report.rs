//! Versioned JSON reports aggregating every module's checks.
//!
//! Everything except the `timing` block is a pure function of the model file
//! and the run options, so two runs serialize to identical bytes once timing
//! is removed.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::braid::{braid_summary, pbw_cubic_check, BraidSummary};
use crate::check::{CheckReport, Witness};
use crate::classify::{classify, Classification};
use crate::error::Result;
use crate::exactla::{Guard, RationalMatrix};
use crate::fock::{build_fock, fock_report, FockReport};
use crate::hilbert::{
    factorization_report, full_series, graded_kernel, single_mode_projector, single_mode_series, SeriesCoeffs,
};
use crate::koszul::{koszul_report, KoszulReport};
use crate::modelfile::ModelFile;
use crate::statmodel::{assemble_pgen, RelationSet, StatModel};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Validate,
    Yb,
    Hilbert,
    Classify,
    Koszul,
    Fock,
    ReportAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Yb => "yb",
            Command::Hilbert => "hilbert",
            Command::Classify => "classify",
            Command::Koszul => "koszul",
            Command::Fock => "fock",
            Command::ReportAll => "report-all",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesMode {
    Single,
    Full,
    #[default]
    Both,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Truncation degree; the model's `n_max` when absent.
    pub degree: Option<usize>,
    pub mode: SeriesMode,
    pub guard_dim: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankBlock {
    pub sym: usize,
    pub ext: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Validation {
    pub d: usize,
    pub k_dim: usize,
    pub gen_dim: usize,
    pub ambient: usize,
    pub w_sym_dim: usize,
    pub w_ext_dim: usize,
    pub rank: RankBlock,
    pub checks: Vec<CheckReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertBlock {
    pub mode: SeriesMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub single: Option<SeriesCoeffs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full: Option<SeriesCoeffs>,
    pub checks: Vec<CheckReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationBlock {
    pub max_fit_degree: usize,
    pub classification: Classification,
    pub checks: Vec<CheckReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub checks: usize,
    pub passed: usize,
    pub failed: Vec<String>,
    pub all_passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionTime {
    pub section: String,
    pub micros: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub sections: Vec<SectionTime>,
    pub total_micros: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: Command,
    /// Canonical echo of the input file.
    pub model: serde_json::Value,
    pub degree: usize,
    pub guard_dim: usize,
    pub validation: Validation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub braid: Option<BraidSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hilbert: Option<HilbertBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassificationBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub koszul: Option<KoszulReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fock: Option<FockReport>,
    pub alarms: Vec<String>,
    pub summary: Summary,
    pub timing: Timing,
}

impl Report {
    /// Every check in report order, labelled by section.
    pub fn checks(&self) -> Vec<(&'static str, &CheckReport)> {
        let mut out: Vec<(&'static str, &CheckReport)> = Vec::new();
        out.extend(self.validation.checks.iter().map(|c| ("validation", c)));
        if let Some(b) = &self.braid {
            out.extend(b.checks().into_iter().map(|c| ("braid", c)));
        }
        if let Some(h) = &self.hilbert {
            out.extend(h.checks.iter().map(|c| ("hilbert", c)));
        }
        if let Some(c) = &self.classification {
            out.extend(c.checks.iter().map(|x| ("classification", x)));
        }
        if let Some(k) = &self.koszul {
            out.extend(k.checks().into_iter().map(|c| ("koszul", c)));
        }
        if let Some(f) = &self.fock {
            out.extend(f.checks.iter().map(|c| ("fock", c)));
        }
        out
    }

    pub fn all_passed(&self) -> bool {
        self.summary.all_passed
    }

    /// 0 when every check passes, 1 on any mathematical failure.
    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    /// Report serialized without the timing block.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timing");
        }
        serde_json::to_string_pretty(&v).expect("report serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

struct Clock {
    start: Instant,
    sections: Vec<SectionTime>,
}

impl Clock {
    fn new() -> Self {
        Clock {
            start: Instant::now(),
            sections: Vec::new(),
        }
    }

    fn time<T>(&mut self, section: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.sections.push(SectionTime {
            section: section.to_string(),
            micros: t.elapsed().as_micros() as u64,
        });
        out
    }

    fn finish(self) -> Timing {
        Timing {
            total_micros: self.start.elapsed().as_micros() as u64,
            sections: self.sections,
        }
    }
}

pub fn validation(model: &StatModel, rs: &RelationSet) -> Validation {
    let d = model.d();
    let sym = d * (d + 1) / 2 * model.w_sym().dim();
    let ext = d * (d - 1) / 2 * model.w_ext().dim();
    // assemble_pgen already refuses non-projectors and rank mismatches, so
    // reaching here means both hold; the checks record it.
    let checks = vec![
        CheckReport::pass(
            "pgen_projector",
            format!("P_gen is idempotent and self-adjoint on {} dimensions", rs.ambient()),
        ),
        CheckReport::pass(
            "pgen_rank",
            format!("rank(P_gen) = {} = {sym} (sym) + {ext} (ext)", rs.rank()),
        ),
    ];
    Validation {
        d,
        k_dim: model.k_dim(),
        gen_dim: model.gen_dim(),
        ambient: rs.ambient(),
        w_sym_dim: model.w_sym().dim(),
        w_ext_dim: model.w_ext().dim(),
        rank: RankBlock {
            sym,
            ext,
            total: rs.rank(),
        },
        checks,
    }
}

/// Explicitly recomputes `W_{m+1}` by the stacked kernel when the series
/// stops at `m` and degree `m + 1` fits the guard.
pub fn termination_check(
    name: &str,
    series: &SeriesCoeffs,
    projector: &RationalMatrix,
    base: usize,
    guard: &Guard,
) -> Result<Option<CheckReport>> {
    let Some(m) = series.terminated_at else {
        return Ok(None);
    };
    let next = m + 1;
    let dim = base.checked_pow(next as u32);
    if dim.is_none_or(|d| d > guard.max_ambient) {
        return Ok(Some(CheckReport::pass(
            name,
            format!("terminates at degree {m}; W_{next} ⊆ W_{m} ⊗ V = 0 (explicit recomputation skipped: degree {next} exceeds the guard)"),
        )));
    }
    let direct = graded_kernel(projector, base, next, guard)?.space.dim();
    Ok(Some(if direct == 0 {
        CheckReport::pass(
            name,
            format!("terminates at degree {m}; direct kernel at degree {next} is 0"),
        )
    } else {
        CheckReport::fail(
            name,
            Witness::Degree {
                degree: next,
                observed: direct,
                expected: 0,
            },
            format!("series vanishes at degree {m} but the direct kernel at degree {next} has dimension {direct}"),
        )
    }))
}

pub fn hilbert_block(
    model: &StatModel,
    rs: &RelationSet,
    degree: usize,
    mode: SeriesMode,
    guard: &Guard,
) -> Result<HilbertBlock> {
    let want_single = mode != SeriesMode::Full;
    let want_full = mode != SeriesMode::Single;
    let mut checks = Vec::new();
    let single = if want_single {
        let s = single_mode_series(model, degree, guard)?;
        let p = single_mode_projector(model)?;
        checks.extend(termination_check("termination_single", &s, &p, model.k_dim(), guard)?);
        Some(s)
    } else {
        None
    };
    let full = if want_full {
        let f = full_series(model, rs, degree, guard)?;
        checks.extend(termination_check("termination_full", &f, rs.p_gen(), model.gen_dim(), guard)?);
        Some(f)
    } else {
        None
    };
    if let (Some(s), Some(f)) = (&single, &full) {
        checks.push(factorization_report(f, s, model.d()));
    }
    Ok(HilbertBlock {
        mode,
        single,
        full,
        checks,
    })
}

pub fn classification_block(model: &StatModel, degree: usize, guard: &Guard) -> Result<ClassificationBlock> {
    let series = single_mode_series(model, degree, guard)?;
    let max_fit_degree = degree / 2;
    let classification = classify(&series, max_fit_degree)?;
    let mut checks = Vec::new();
    if let Some(cert) = &classification.certificate {
        let name = "classification_certificate";
        checks.push(if classification.replay() {
            CheckReport::pass(
                name,
                format!(
                    "{} roots of {} certified in ({}, {}]",
                    cert.roots_in_interval, cert.polynomial, cert.lo, cert.hi
                ),
            )
        } else {
            CheckReport::fail(
                name,
                Witness::Degree {
                    degree: cert.degree,
                    observed: cert.roots_in_interval,
                    expected: cert.degree,
                },
                "root certificate does not replay",
            )
        });
    }
    Ok(ClassificationBlock {
        max_fit_degree,
        classification,
        checks,
    })
}

fn summarize(report: &Report) -> Summary {
    let checks = report.checks();
    let failed: Vec<String> = checks
        .iter()
        .filter(|(_, c)| !c.passed)
        .map(|(s, c)| format!("{s}.{}", c.name))
        .collect();
    Summary {
        checks: checks.len(),
        passed: checks.len() - failed.len(),
        all_passed: failed.is_empty(),
        failed,
    }
}

/// Runs `command` on a parsed model file.
pub fn run(file: &ModelFile, command: Command, opts: &RunOptions) -> Result<Report> {
    let mut clock = Clock::new();
    let guard = file.guard(opts.guard_dim);
    let model = &file.model;
    let degree = opts.degree.unwrap_or(model.n_max());
    let rs = clock.time("assemble", || assemble_pgen(model))?;
    let validation = validation(model, &rs);

    let all = command == Command::ReportAll;
    let mut report = Report {
        schema_version: REPORT_SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        command,
        model: file.to_value(),
        degree,
        guard_dim: guard.max_ambient,
        validation,
        braid: None,
        hilbert: None,
        classification: None,
        koszul: None,
        fock: None,
        alarms: Vec::new(),
        summary: Summary {
            checks: 0,
            passed: 0,
            failed: Vec::new(),
            all_passed: true,
        },
        timing: Timing::default(),
    };

    if all || command == Command::Yb {
        report.braid = Some(clock.time("braid", || braid_summary(model, &rs, &guard))?);
    }
    if all || command == Command::Hilbert {
        let mode = if all { SeriesMode::Both } else { opts.mode };
        report.hilbert = Some(clock.time("hilbert", || hilbert_block(model, &rs, degree, mode, &guard))?);
    }
    if all || command == Command::Classify {
        report.classification = Some(clock.time("classify", || classification_block(model, degree, &guard))?);
    }
    if all || command == Command::Koszul {
        let pbw = match &report.braid {
            Some(b) => b.pbw.passed(),
            None => clock.time("pbw", || pbw_cubic_check(model, &rs, &guard))?.passed(),
        };
        report.koszul = Some(clock.time("koszul", || koszul_report(model, &rs, degree, true, Some(pbw), &guard))?);
    }
    if all || command == Command::Fock {
        let fock = clock.time("fock_build", || build_fock(model, &rs, degree, &guard))?;
        report.fock = Some(clock.time("fock_checks", || fock_report(&fock, file.exchange.as_ref()))?);
    }

    if let Some(b) = &report.braid {
        report.alarms.extend(b.alarms.iter().cloned());
    }
    if let Some(k) = &report.koszul {
        report.alarms.extend(k.alarms.iter().cloned());
    }
    report.summary = summarize(&report);
    report.timing = clock.finish();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelfile::preset_files;

    fn file(stem: &str) -> ModelFile {
        preset_files()
            .unwrap()
            .into_iter()
            .find(|(s, _)| s == stem)
            .unwrap()
            .1
    }

    #[test]
    fn validate_rank_block() {
        let r = run(&file("boson.d2"), Command::Validate, &RunOptions::default()).unwrap();
        assert_eq!(r.validation.rank, RankBlock { sym: 0, ext: 1, total: 1 });
        assert_eq!(r.exit_code(), 0);
        let r = run(&file("example_sec5.d1"), Command::Validate, &RunOptions::default()).unwrap();
        assert_eq!(r.validation.w_sym_dim, 8);
    }

    #[test]
    fn hilbert_modes_and_termination() {
        let opts = RunOptions {
            degree: Some(4),
            mode: SeriesMode::Single,
            guard_dim: None,
        };
        let r = run(&file("example_sec5.d1"), Command::Hilbert, &opts).unwrap();
        let h = r.hilbert.unwrap();
        assert_eq!(h.single.as_ref().unwrap().coeffs, vec![1, 3, 1, 0, 0]);
        assert!(h.full.is_none());
        assert_eq!(h.checks[0].name, "termination_single");
        assert!(h.checks[0].details.contains("direct kernel at degree 4 is 0"));
        assert!(r.summary.all_passed);
    }

    #[test]
    fn yb_on_sec5_fails_with_witness() {
        let r = run(&file("example_sec5.d1"), Command::Yb, &RunOptions::default()).unwrap();
        assert_eq!(r.exit_code(), 1);
        let b = r.braid.as_ref().unwrap();
        assert!(matches!(b.global.witness, Some(Witness::Vector { .. })));
        assert!(r.summary.failed.contains(&"braid.global_yb".to_string()));
    }

    #[test]
    fn classify_boson() {
        let opts = RunOptions {
            degree: Some(8),
            ..Default::default()
        };
        let r = run(&file("boson.d1"), Command::Classify, &opts).unwrap();
        let c = r.classification.unwrap();
        assert_eq!(c.classification.signature_text, "[1,-1]_+");
        assert!(r.summary.all_passed);
    }

    #[test]
    fn deterministic_modulo_timing() {
        let f = file("fermion.d2");
        let opts = RunOptions {
            degree: Some(3),
            ..Default::default()
        };
        let a = run(&f, Command::ReportAll, &opts).unwrap();
        let b = run(&f, Command::ReportAll, &opts).unwrap();
        assert_eq!(a.deterministic_json(), b.deterministic_json());
        let back: Report = serde_json::from_str(&a.to_json_pretty()).unwrap();
        assert_eq!(back.deterministic_json(), a.deterministic_json());
    }
}
