//! Braid (Yang–Baxter) identities and the cubic PBW criterion.
//!
//! Two families of checks are reported side by side. The projector form
//! `P₁₂P₂₃P₁₂ = P₂₃P₁₂P₂₃` is evaluated for `P_gen` on `H^⊗3` and for the
//! internal projectors on `K^⊗3`. The rewriting form uses the degree-two
//! reduction map `π` built from a generator order; it must satisfy the same
//! braid identity, and the admissible cubic monomials must span a space of
//! the same dimension as `W_3`.

use serde::{Deserialize, Serialize};

use num_traits::{One, Zero};

use crate::check::{describe_residual, CheckReport, Locus, Witness};
use crate::error::Result;
use crate::exactla::{rref, unit_vector, Guard, LocalOperator, Rational, RationalMatrix};
use crate::hilbert::series_for_projector;
use crate::statmodel::{internal_projectors, RelationSet, StatModel};

pub const GLOBAL_YB: &str = "global_yb";
pub const INTERNAL_YB_SYM: &str = "internal_yb_sym";
pub const INTERNAL_YB_EXT: &str = "internal_yb_ext";
pub const PBW_REDUCTION_BRAID: &str = "pbw_reduction_braid";
pub const PBW_CUBIC_COUNT: &str = "pbw_cubic_count";
pub const PBW_CONFLUENCE: &str = "pbw_confluence";

/// `(P₁₂P₂₃P₁₂ − P₂₃P₁₂P₂₃) x` for `x ∈ base^⊗3`.
pub fn braid_difference(op: &LocalOperator, x: &[Rational]) -> Vec<Rational> {
    let a = |v: &[Rational]| op.apply(3, 0, v);
    let b = |v: &[Rational]| op.apply(3, 1, v);
    let lhs = a(&b(&a(x)));
    let rhs = b(&a(&b(x)));
    lhs.iter().zip(&rhs).map(|(l, r)| l - r).collect()
}

/// Full residual matrix `P₁₂P₂₃P₁₂ − P₂₃P₁₂P₂₃` on `base^⊗3`.
pub fn braid_residual(p: &RationalMatrix, base: usize, guard: &Guard) -> Result<RationalMatrix> {
    let dim = guard.check_power(base, 3)?;
    let op = LocalOperator::new(p, base, 2)?;
    let mut out = RationalMatrix::zeros(dim, dim);
    for j in 0..dim {
        for (i, x) in braid_difference(&op, &unit_vector(dim, j)).into_iter().enumerate() {
            out[(i, j)] = x;
        }
    }
    Ok(out)
}

/// Braid check for a two-slot operator with a basis-vector witness.
pub fn braid_check(
    name: &str,
    p: &RationalMatrix,
    base: usize,
    guard: &Guard,
) -> Result<CheckReport> {
    let dim = guard.check_power(base, 3)?;
    let op = LocalOperator::new(p, base, 2)?;
    let mut failing = 0usize;
    let mut first: Option<(Vec<Rational>, Vec<Rational>)> = None;
    for j in 0..dim {
        let input = unit_vector(dim, j);
        let diff = braid_difference(&op, &input);
        if diff.iter().any(|x| !x.is_zero()) {
            failing += 1;
            first.get_or_insert((input, diff));
        }
    }
    Ok(match first {
        None => CheckReport::pass(name, format!("braid identity holds exactly on {dim} basis vectors")),
        Some((input, difference)) => {
            let col = input.iter().position(|x| !x.is_zero()).unwrap_or(0);
            let details = format!(
                "braid identity fails on {failing} of {dim} basis vectors; first at e_{col}: {}",
                describe_residual(&difference, 8)
            );
            CheckReport::fail(
                name,
                Witness::Vector {
                    input,
                    difference,
                    locus: Locus::default(),
                },
                details,
            )
        }
    })
}

pub fn check_global_yb(model: &StatModel, rs: &RelationSet, guard: &Guard) -> Result<CheckReport> {
    braid_check(GLOBAL_YB, rs.p_gen(), model.gen_dim(), guard)
}

/// Braid checks for `P^K_sym` and `P^K_ext` on `K^⊗3`.
pub fn check_internal_braids(model: &StatModel, guard: &Guard) -> Result<(CheckReport, CheckReport)> {
    let (sym, ext) = internal_projectors(model)?;
    Ok((
        braid_check(INTERNAL_YB_SYM, &sym, model.k_dim(), guard)?,
        braid_check(INTERNAL_YB_EXT, &ext, model.k_dim(), guard)?,
    ))
}

/// Admissible monomials for a generator order, with the reduction map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleSets {
    pub gens: usize,
    pub s2: Vec<(usize, usize)>,
    pub s3: Vec<(usize, usize, usize)>,
    /// `π` on `H⊗H`: fixes admissible monomials, sends every other monomial
    /// to its normal form.
    pub reduction: RationalMatrix,
}

fn rank_of(order: &[usize]) -> Vec<usize> {
    let mut rank = vec![0; order.len()];
    for (pos, &x) in order.iter().enumerate() {
        rank[x] = pos;
    }
    rank
}

/// Eliminates the relation basis against monomials sorted from largest to
/// smallest; pivot monomials are the leading ones, the rest are admissible.
pub fn build_admissible(model: &StatModel, rs: &RelationSet) -> AdmissibleSets {
    let n = model.gen_dim();
    let rank = rank_of(model.order());
    let key = |m: usize| (rank[m / n], rank[m % n]);
    let mut desc: Vec<usize> = (0..n * n).collect();
    desc.sort_by_key(|&m| std::cmp::Reverse(key(m)));

    let basis = rs.r_gen().basis();
    let permuted = RationalMatrix::from_fn(basis.rows(), n * n, |r, c| basis[(r, desc[c])].clone());
    let (reduced, pivots) = rref(&permuted);

    let mut is_lead = vec![false; n * n];
    let mut reduction = RationalMatrix::zeros(n * n, n * n);
    for (row, &p) in pivots.iter().enumerate() {
        let lead = desc[p];
        is_lead[lead] = true;
        for c in p + 1..n * n {
            let x = &reduced[(row, c)];
            if !x.is_zero() {
                reduction[(desc[c], lead)] = -x;
            }
        }
    }
    let mut s2: Vec<(usize, usize)> = Vec::new();
    for m in 0..n * n {
        if !is_lead[m] {
            reduction[(m, m)] = Rational::one();
            s2.push((m / n, m % n));
        }
    }
    s2.sort_by_key(|&(a, b)| (rank[a], rank[b]));
    let mut s3 = Vec::new();
    for &(a, b) in &s2 {
        for &(b2, c) in &s2 {
            if b == b2 {
                s3.push((a, b, c));
            }
        }
    }
    s3.sort_by_key(|&(a, b, c)| (rank[a], rank[b], rank[c]));
    AdmissibleSets {
        gens: n,
        s2,
        s3,
        reduction,
    }
}

/// Reduces `x ∈ H^⊗3` by applying `π` alternately at positions (1,2) and
/// (2,3), starting at `first`, until neither changes it.
pub fn cubic_normal_form(pi: &LocalOperator, x: &[Rational], first: usize) -> Vec<Rational> {
    let mut cur = x.to_vec();
    let mut pos = first;
    let mut stable = 0;
    // each step rewrites a word into strictly smaller words, so this ends
    while stable < 2 {
        let next = pi.apply(3, pos, &cur);
        if next == cur {
            stable += 1;
        } else {
            stable = 0;
            cur = next;
        }
        pos = 1 - pos;
    }
    cur
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PbwReport {
    pub s2_size: usize,
    pub s3_size: usize,
    pub w3_dim: usize,
    /// `|S^(3)| = dim W_3`.
    pub count: CheckReport,
    /// `π₁₂π₂₃π₁₂ = π₂₃π₁₂π₂₃`.
    pub braid: CheckReport,
    /// Every cubic word has one normal form regardless of reduction order.
    pub confluence: CheckReport,
}

impl PbwReport {
    pub fn passed(&self) -> bool {
        self.count.passed && self.braid.passed
    }

    pub fn checks(&self) -> [&CheckReport; 3] {
        [&self.count, &self.braid, &self.confluence]
    }
}

pub fn word_label(word: &[usize], model: &StatModel) -> String {
    word.iter()
        .map(|&x| {
            if model.d() == 1 {
                format!("X_{}", x + 1)
            } else {
                format!("X_{}{}", x / model.k_dim() + 1, x % model.k_dim() + 1)
            }
        })
        .collect()
}

pub fn pbw_cubic_check(model: &StatModel, rs: &RelationSet, guard: &Guard) -> Result<PbwReport> {
    let n = model.gen_dim();
    let sets = build_admissible(model, rs);
    let w3_dim = series_for_projector(rs.p_gen(), n, 3, guard)?.coeffs[3];

    let count = if sets.s3.len() == w3_dim {
        CheckReport::pass(
            PBW_CUBIC_COUNT,
            format!("|S(3)| = dim W_3 = {w3_dim}"),
        )
    } else {
        CheckReport::fail(
            PBW_CUBIC_COUNT,
            Witness::Degree {
                degree: 3,
                observed: w3_dim,
                expected: sets.s3.len(),
            },
            format!("|S(3)| = {} but dim W_3 = {w3_dim}", sets.s3.len()),
        )
    };

    let braid = braid_check(PBW_REDUCTION_BRAID, &sets.reduction, n, guard)?;

    let pi = LocalOperator::new(&sets.reduction, n, 2)?;
    let rank = rank_of(model.order());
    let mut words: Vec<[usize; 3]> = (0..n * n * n).map(|w| [w / (n * n), (w / n) % n, w % n]).collect();
    words.sort_by_key(|w| (rank[w[0]], rank[w[1]], rank[w[2]]));
    let mut confluence = None;
    for w in words {
        let x = unit_vector(n * n * n, (w[0] * n + w[1]) * n + w[2]);
        let left = cubic_normal_form(&pi, &x, 0);
        let right = cubic_normal_form(&pi, &x, 1);
        if left != right {
            let details = format!(
                "word {} reduces to [{}] starting at positions 1-2 and to [{}] starting at positions 2-3",
                word_label(&w, model),
                describe_residual(&left, 6),
                describe_residual(&right, 6)
            );
            confluence = Some(CheckReport::fail(
                PBW_CONFLUENCE,
                Witness::Word {
                    word: w.to_vec(),
                    left,
                    right,
                },
                details,
            ));
            break;
        }
    }
    let confluence = confluence.unwrap_or_else(|| {
        CheckReport::pass(PBW_CONFLUENCE, format!("all {} cubic words reduce uniquely", n * n * n))
    });

    Ok(PbwReport {
        s2_size: sets.s2.len(),
        s3_size: sets.s3.len(),
        w3_dim,
        count,
        braid,
        confluence,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraidSummary {
    pub global: CheckReport,
    pub internal_sym: CheckReport,
    pub internal_ext: CheckReport,
    pub pbw: PbwReport,
    /// Cross-check violations between the projector and rewriting forms.
    pub alarms: Vec<String>,
}

impl BraidSummary {
    pub fn checks(&self) -> Vec<&CheckReport> {
        let mut v = vec![&self.global, &self.internal_sym, &self.internal_ext];
        v.extend(self.pbw.checks());
        v
    }
}

pub fn braid_summary(model: &StatModel, rs: &RelationSet, guard: &Guard) -> Result<BraidSummary> {
    let global = check_global_yb(model, rs, guard)?;
    let (internal_sym, internal_ext) = check_internal_braids(model, guard)?;
    let pbw = pbw_cubic_check(model, rs, guard)?;
    let mut alarms = Vec::new();
    let internal = internal_sym.passed && internal_ext.passed;
    if global.passed != internal {
        alarms.push(format!(
            "decoupling: global braid {} but internal braids {}",
            verdict(global.passed),
            verdict(internal)
        ));
    }
    if global.passed != pbw.passed() {
        alarms.push(format!(
            "projector braid {} but PBW cubic criterion {}",
            verdict(global.passed),
            verdict(pbw.passed())
        ));
    }
    Ok(BraidSummary {
        global,
        internal_sym,
        internal_ext,
        pbw,
        alarms,
    })
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "passes"
    } else {
        "fails"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{int, kron, rat, Subspace};
    use crate::statmodel::{assemble_pgen, preset, sec5_h};

    fn setup(name: &str, d: usize) -> (StatModel, RelationSet) {
        let model = preset(name, d).unwrap();
        let rs = assemble_pgen(&model).unwrap();
        (model, rs)
    }

    #[test]
    fn boson_and_fermion_rewriting_and_internal_checks_pass() {
        let g = Guard::default();
        for (name, d) in [("boson", 2), ("fermion", 2), ("boson", 3), ("fermion", 3)] {
            let (model, rs) = setup(name, d);
            let s = braid_summary(&model, &rs, &g).unwrap();
            for c in [&s.internal_sym, &s.internal_ext, &s.pbw.count, &s.pbw.braid, &s.pbw.confluence] {
                assert!(c.passed, "{name} d={d}: {} {}", c.name, c.details);
            }
        }
        for name in ["boson", "fermion"] {
            let (model, rs) = setup(name, 1);
            let s = braid_summary(&model, &rs, &g).unwrap();
            assert!(s.checks().iter().all(|c| c.passed));
            assert!(s.alarms.is_empty());
        }
    }

    // For an orthogonal (anti)symmetrizer P = (1 ∓ S)/2 the transposition
    // braid relation gives P₁₂P₂₃P₁₂ − P₂₃P₁₂P₂₃ = (P₁₂ − P₂₃)/4, nonzero as
    // soon as dim H ≥ 2.
    #[test]
    fn projector_braid_for_symmetrizers_follows_transposition_oracle() {
        let g = Guard::default();
        for (name, d) in [("boson", 2), ("fermion", 2), ("boson", 3), ("fermion", 3)] {
            let (model, rs) = setup(name, d);
            let p = rs.p_gen();
            let id = RationalMatrix::identity(d);
            let oracle = kron(p, &id).sub(&kron(&id, p)).scale(&rat(1, 4));
            assert_eq!(braid_residual(p, d, &g).unwrap(), oracle);
            let s = braid_summary(&model, &rs, &g).unwrap();
            assert!(!s.global.passed);
            assert_eq!(s.alarms.len(), 2, "{:?}", s.alarms);
        }
    }

    #[test]
    fn full_internal_space_passes() {
        let model = StatModel::new(
            1,
            2,
            RationalMatrix::identity(2),
            Subspace::full(4),
            Subspace::zero(4),
            None,
            3,
        )
        .unwrap();
        let (sym, ext) = check_internal_braids(&model, &Guard::default()).unwrap();
        assert!(sym.passed && ext.passed);
    }

    #[test]
    fn admissible_sets_examples() {
        let (model, rs) = setup("fermion", 2);
        let a = build_admissible(&model, &rs);
        assert_eq!(a.s2, vec![(0, 1)]);
        // X2X1 → −X1X2, X1X1 → 0, X2X2 → 0
        assert_eq!(a.reduction.column(2), vec![int(0), int(-1), int(0), int(0)]);
        assert!(a.reduction.column(0).iter().all(Zero::is_zero));
        assert!(a.reduction.column(3).iter().all(Zero::is_zero));

        let (model, rs) = setup("boson", 2);
        let a = build_admissible(&model, &rs);
        assert_eq!(a.s2, vec![(0, 0), (0, 1), (1, 1)]);
        assert_eq!(a.reduction.column(2), vec![int(0), int(1), int(0), int(0)]);

        let (model, rs) = setup("example_sec5", 1);
        let a = build_admissible(&model, &rs);
        assert_eq!(a.s2, vec![(0, 0)]);
        let e11 = unit_vector(9, 0);
        assert_eq!(a.reduction.column(4), e11); // X2X2 → X1X1
        assert_eq!(a.reduction.column(8), e11); // X3X3 → X1X1
        for (a_, b_) in [(0, 1), (1, 0), (0, 2), (2, 1)] {
            assert!(a.reduction.column(a_ * 3 + b_).iter().all(Zero::is_zero));
        }
        assert_eq!(a.s2.len(), 9 - rs.rank());
    }

    #[test]
    fn reduction_map_is_idempotent() {
        for (name, d) in [("boson", 2), ("fermion", 3), ("example_sec5", 2)] {
            let (model, rs) = setup(name, d);
            let a = build_admissible(&model, &rs);
            assert_eq!(a.reduction.mul(&a.reduction), a.reduction);
            let n = model.gen_dim();
            for &(x, y) in &a.s2 {
                let m = x * n + y;
                assert_eq!(a.reduction.column(m), unit_vector(n * n, m));
            }
            // π kills exactly R_gen: π r = 0 for relation vectors
            for v in rs.r_gen().vectors() {
                assert!(a.reduction.mul_vec(&v).iter().all(Zero::is_zero));
            }
        }
    }

    #[test]
    fn reversed_order_changes_admissible_set() {
        let fermion = preset("fermion", 2).unwrap();
        let model = StatModel::new(
            2,
            1,
            fermion.g().clone(),
            fermion.w_sym().clone(),
            fermion.w_ext().clone(),
            Some(vec![1, 0]),
            3,
        )
        .unwrap();
        let rs = assemble_pgen(&model).unwrap();
        assert_eq!(build_admissible(&model, &rs).s2, vec![(1, 0)]);
    }

    // Temperley–Lieb oracle: with Q = hhᵀ/3, Q₁₂Q₂₃Q₁₂ = Q₁₂/9, so the
    // internal residual of I − Q is (Q₂₃ − Q₁₂)/9.
    #[test]
    fn sec5_internal_residual_matches_temperley_lieb() {
        let g = Guard::default();
        let model = preset("example_sec5", 2).unwrap();
        let (sym, _) = internal_projectors(&model).unwrap();
        let h = sec5_h();
        let q = RationalMatrix::outer(&h, &h).scale(&rat(1, 3));
        let i3 = RationalMatrix::identity(3);
        let q12 = kron(&q, &i3);
        let q23 = kron(&i3, &q);
        let oracle = q23.sub(&q12).scale(&rat(1, 9));
        assert_eq!(braid_residual(&sym, 3, &g).unwrap(), oracle);

        let (sym_report, ext_report) = check_internal_braids(&model, &g).unwrap();
        assert!(!sym_report.passed);
        assert!(ext_report.passed);
    }

    #[test]
    fn sec5_global_fails_with_replayable_witness() {
        let g = Guard::default();
        let (model, rs) = setup("example_sec5", 2);
        let r = check_global_yb(&model, &rs, &g).unwrap();
        assert!(!r.passed);
        let Some(Witness::Vector { input, difference, .. }) = &r.witness else {
            panic!("expected vector witness");
        };
        let op = LocalOperator::new(rs.p_gen(), 6, 2).unwrap();
        assert_eq!(&braid_difference(&op, input), difference);
        assert!(difference.iter().any(|x| !x.is_zero()));
    }

    #[test]
    fn sec5_single_mode_pbw_counterexample() {
        let g = Guard::default();
        let (model, rs) = setup("example_sec5", 1);
        let p = pbw_cubic_check(&model, &rs, &g).unwrap();
        assert_eq!((p.s3_size, p.w3_dim), (1, 0));
        assert!(!p.count.passed);
        assert!(!p.braid.passed);
        let Some(Witness::Word { word, left, right }) = &p.confluence.witness else {
            panic!("expected a word witness");
        };
        assert_eq!(word, &vec![0, 1, 1]);
        assert_eq!(word_label(word, &model), "X_1X_2X_2");
        assert!(left.iter().all(Zero::is_zero));
        assert_eq!(right, &unit_vector(27, 0));
    }

    // Brute force over all 27 cubic monomials: enumerate both reduction
    // orders by explicit pair rewriting on words.
    #[test]
    fn sec5_normal_forms_by_word_rewriting() {
        // X_aX_b → 0 (a ≠ b), X_bX_b → X_1X_1 (b > 1), X_1X_1 kept
        fn rewrite(a: usize, b: usize) -> Option<Option<(usize, usize)>> {
            if a != b {
                Some(None)
            } else if a > 0 {
                Some(Some((0, 0)))
            } else {
                None
            }
        }
        fn nf(mut w: [usize; 3], mut pos: usize) -> Option<[usize; 3]> {
            let mut idle = 0;
            while idle < 2 {
                match rewrite(w[pos], w[pos + 1]) {
                    None => idle += 1,
                    Some(None) => return None,
                    Some(Some((x, y))) => {
                        w[pos] = x;
                        w[pos + 1] = y;
                        idle = 0;
                    }
                }
                pos = 1 - pos;
            }
            Some(w)
        }
        let (model, rs) = setup("example_sec5", 1);
        let pi = LocalOperator::new(&build_admissible(&model, &rs).reduction, 3, 2).unwrap();
        for idx in 0..27 {
            let w = [idx / 9, (idx / 3) % 3, idx % 3];
            let x = unit_vector(27, idx);
            for start in [0, 1] {
                let expected = match nf(w, start) {
                    None => vec![int(0); 27],
                    Some(v) => unit_vector(27, v[0] * 9 + v[1] * 3 + v[2]),
                };
                assert_eq!(cubic_normal_form(&pi, &x, start), expected, "word {w:?} start {start}");
            }
        }
    }
}
