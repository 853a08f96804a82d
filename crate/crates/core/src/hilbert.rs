//! Graded dimensions of quadratic quotients.
//!
//! For a relation projector `P` on `V⊗V` that is orthogonal for the product
//! form, the degree-n component of `T(V)/⟨im P⟩` is realised as
//! `W_n = ∩_k ker(id^{⊗k} ⊗ P ⊗ id^{⊗(n−k−2)})`, the orthogonal complement of
//! the ideal component. Its dimension is the series coefficient `g_n`.

use serde::{Deserialize, Serialize};

use crate::check::{CheckReport, Witness};
use crate::error::Result;
use crate::exactla::{kernel, kron_vec, unit_vector, Guard, LocalOperator, RationalMatrix, Subspace};
use crate::statmodel::{internal_projectors, RelationSet, StatModel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesCoeffs {
    pub coeffs: Vec<usize>,
    /// Degree `m` with `coeffs[m] = 0`; every higher coefficient vanishes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminated_at: Option<usize>,
}

impl SeriesCoeffs {
    /// Wraps raw coefficients, recording the first zero as the termination
    /// degree.
    pub fn from_coeffs(coeffs: Vec<usize>) -> Self {
        let terminated_at = coeffs.iter().position(|&c| c == 0);
        SeriesCoeffs {
            coeffs,
            terminated_at,
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Coefficients of `self^power`, truncated to the same degree.
    pub fn power(&self, power: usize) -> Vec<usize> {
        let n = self.coeffs.len();
        let mut acc = vec![0usize; n];
        if n == 0 {
            return acc;
        }
        acc[0] = 1;
        for _ in 0..power {
            let mut next = vec![0usize; n];
            for (i, a) in acc.iter().enumerate() {
                if *a == 0 {
                    continue;
                }
                for (j, c) in self.coeffs.iter().enumerate().take(n - i) {
                    next[i + j] += a * c;
                }
            }
            acc = next;
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedKernel {
    pub degree: usize,
    pub space: Subspace,
}

fn trivial_level(base: usize, n: usize) -> Option<GradedKernel> {
    match n {
        0 => Some(GradedKernel {
            degree: 0,
            space: Subspace::full(1),
        }),
        1 => Some(GradedKernel {
            degree: 1,
            space: Subspace::full(base),
        }),
        _ => None,
    }
}

/// `W_n` by stacking all `n − 1` shifted projectors and taking one kernel.
pub fn graded_kernel(
    projector: &RationalMatrix,
    base: usize,
    n: usize,
    guard: &Guard,
) -> Result<GradedKernel> {
    let dim = guard.check_power(base, n)?;
    if let Some(level) = trivial_level(base, n) {
        return Ok(level);
    }
    let local = LocalOperator::new(projector, base, 2)?;
    let mut stacked = RationalMatrix::zeros(0, dim);
    for pos in 0..n - 1 {
        stacked = stacked.vstack(&local.lifted(n, pos))?;
    }
    Ok(GradedKernel {
        degree: n,
        space: kernel(&stacked),
    })
}

/// `W_{n}` from `W_{n−1}`: only the last shifted projector is new, so the
/// search runs inside `W_{n−1} ⊗ V`.
fn next_level(prev: &Subspace, local: &LocalOperator, n: usize) -> Result<Subspace> {
    let base = local.base();
    let dim = prev.ambient_dim() * base;
    let candidates: Vec<_> = prev
        .vectors()
        .iter()
        .flat_map(|w| (0..base).map(move |a| kron_vec(w, &unit_vector(base, a))))
        .collect();
    if candidates.is_empty() {
        return Ok(Subspace::zero(dim));
    }
    let images: Vec<_> = candidates
        .iter()
        .map(|c| local.apply(n, n - 2, c))
        .collect();
    // columns are images; kernel gives the combinations that vanish
    let image_matrix = RationalMatrix::from_rows(dim, images)?.transpose();
    let combos = kernel(&image_matrix);
    let vectors = combos
        .vectors()
        .into_iter()
        .map(|lambda| {
            let mut v = vec![num_traits::Zero::zero(); dim];
            for (l, c) in lambda.iter().zip(&candidates) {
                if num_traits::Zero::is_zero(l) {
                    continue;
                }
                for (acc, x) in v.iter_mut().zip(c) {
                    *acc += l * x;
                }
            }
            v
        })
        .collect();
    Subspace::from_vectors(dim, vectors)
}

/// `W_0, …, W_n_max` by the incremental schedule. Stops allocating once a
/// level vanishes; the remaining levels are reported as zero subspaces of
/// nominal ambient dimension without being materialised.
pub fn graded_kernels(
    projector: &RationalMatrix,
    base: usize,
    n_max: usize,
    guard: &Guard,
) -> Result<Vec<GradedKernel>> {
    let local = LocalOperator::new(projector, base, 2)?;
    let mut levels = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if let Some(level) = trivial_level(base, n) {
            guard.check_power(base, n)?;
            levels.push(level);
            continue;
        }
        let prev: &GradedKernel = levels.last().expect("levels 0 and 1 precede");
        if prev.space.dim() == 0 {
            let nominal = base.checked_pow(n as u32).unwrap_or(0);
            levels.push(GradedKernel {
                degree: n,
                space: Subspace::zero(nominal),
            });
            continue;
        }
        guard.check_power(base, n)?;
        let space = next_level(&prev.space, &local, n)?;
        levels.push(GradedKernel { degree: n, space });
    }
    Ok(levels)
}

pub fn series_for_projector(
    projector: &RationalMatrix,
    base: usize,
    n_max: usize,
    guard: &Guard,
) -> Result<SeriesCoeffs> {
    let levels = graded_kernels(projector, base, n_max, guard)?;
    Ok(SeriesCoeffs::from_coeffs(
        levels.iter().map(|l| l.space.dim()).collect(),
    ))
}

/// Relation projector of one external mode: the `g⊗g`-orthogonal
/// projector onto `W_sym`.
pub fn single_mode_projector(model: &StatModel) -> Result<RationalMatrix> {
    Ok(internal_projectors(model)?.0)
}

pub fn single_mode_series(model: &StatModel, n_max: usize, guard: &Guard) -> Result<SeriesCoeffs> {
    series_for_projector(&single_mode_projector(model)?, model.k_dim(), n_max, guard)
}

pub fn full_series(
    model: &StatModel,
    rs: &RelationSet,
    n_max: usize,
    guard: &Guard,
) -> Result<SeriesCoeffs> {
    series_for_projector(rs.p_gen(), model.gen_dim(), n_max, guard)
}

/// Compares `H_F` with `G^d` term by term.
pub fn check_factorization(
    model: &StatModel,
    rs: &RelationSet,
    n_max: usize,
    guard: &Guard,
) -> Result<CheckReport> {
    let single = single_mode_series(model, n_max, guard)?;
    let full = full_series(model, rs, n_max, guard)?;
    Ok(factorization_report(&full, &single, model.d()))
}

pub fn factorization_report(full: &SeriesCoeffs, single: &SeriesCoeffs, d: usize) -> CheckReport {
    let power = single.power(d);
    let name = "factorization";
    match full.coeffs.iter().zip(&power).position(|(a, b)| a != b) {
        None => CheckReport::pass(
            name,
            format!("H_F = G^{d} through degree {}: {:?}", full.degree(), full.coeffs),
        ),
        Some(degree) => CheckReport::fail(
            name,
            Witness::Degree {
                degree,
                observed: full.coeffs[degree],
                expected: power[degree],
            },
            format!(
                "first mismatch at degree {degree}: full series gives {} but G^{d} gives {} (full {:?}, G^{d} {:?})",
                full.coeffs[degree], power[degree], full.coeffs, power
            ),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statmodel::{assemble_pgen, preset};

    fn single(name: &str, n: usize) -> SeriesCoeffs {
        single_mode_series(&preset(name, 1).unwrap(), n, &Guard::default()).unwrap()
    }

    fn full(name: &str, d: usize, n: usize) -> SeriesCoeffs {
        let model = preset(name, d).unwrap();
        let rs = assemble_pgen(&model).unwrap();
        full_series(&model, &rs, n, &Guard::default()).unwrap()
    }

    #[test]
    fn graded_kernel_examples() {
        let g = Guard::default();
        let one = RationalMatrix::identity(1);
        assert_eq!(graded_kernel(&one, 1, 1, &g).unwrap().space.dim(), 1);
        assert_eq!(graded_kernel(&one, 1, 2, &g).unwrap().space.dim(), 0);
        let zero = RationalMatrix::zeros(1, 1);
        for n in 0..5 {
            assert_eq!(graded_kernel(&zero, 1, n, &g).unwrap().space.dim(), 1);
        }
        let sec5 = single_mode_projector(&preset("example_sec5", 1).unwrap()).unwrap();
        let w2 = graded_kernel(&sec5, 3, 2, &g).unwrap();
        assert_eq!(w2.space.dim(), 1);
        assert!(w2.space.contains(&crate::statmodel::sec5_h()));
        assert_eq!(graded_kernel(&sec5, 3, 3, &g).unwrap().space.dim(), 0);
    }

    #[test]
    fn single_mode_examples() {
        assert_eq!(single("boson", 6).coeffs, vec![1; 7]);
        assert_eq!(single("boson", 6).terminated_at, None);
        let f = single("fermion", 5);
        assert_eq!(f.coeffs, vec![1, 1, 0, 0, 0, 0]);
        assert_eq!(f.terminated_at, Some(2));
        let s = single("example_sec5", 5);
        assert_eq!(s.coeffs, vec![1, 3, 1, 0, 0, 0]);
        assert_eq!(s.terminated_at, Some(3));
    }

    #[test]
    fn full_series_examples() {
        assert_eq!(full("fermion", 2, 4).coeffs, vec![1, 2, 1, 0, 0]);
        assert_eq!(full("boson", 2, 4).coeffs, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn factorization_examples() {
        let g = Guard::default();
        let boson = preset("boson", 3).unwrap();
        let rs = assemble_pgen(&boson).unwrap();
        let r = check_factorization(&boson, &rs, 5, &g).unwrap();
        assert!(r.passed, "{}", r.details);
        assert_eq!(full("boson", 3, 5).coeffs, vec![1, 3, 6, 10, 15, 21]);

        let fermion = preset("fermion", 2).unwrap();
        let rs = assemble_pgen(&fermion).unwrap();
        assert!(check_factorization(&fermion, &rs, 4, &g).unwrap().passed);

        // W_ext = 0: rank(P_gen) = 24, so degree 2 has 36 − 24 = 12 survivors.
        let sec5 = preset("example_sec5", 2).unwrap();
        let rs = assemble_pgen(&sec5).unwrap();
        let r = check_factorization(&sec5, &rs, 2, &g).unwrap();
        assert!(!r.passed);
        assert_eq!(
            r.witness,
            Some(Witness::Degree {
                degree: 2,
                observed: 12,
                expected: 11
            })
        );
    }

    #[test]
    fn incremental_matches_direct() {
        let g = Guard::default();
        let mut cases: Vec<(RationalMatrix, usize)> = Vec::new();
        for (name, d) in [("boson", 2), ("fermion", 2), ("boson", 3)] {
            let model = preset(name, d).unwrap();
            cases.push((assemble_pgen(&model).unwrap().p_gen().clone(), model.gen_dim()));
        }
        cases.push((
            single_mode_projector(&preset("example_sec5", 1).unwrap()).unwrap(),
            3,
        ));
        for (p, base) in cases {
            let inc = graded_kernels(&p, base, 4, &g).unwrap();
            for n in 0..=4 {
                let direct = graded_kernel(&p, base, n, &g).unwrap();
                assert_eq!(direct, inc[n]);
            }
        }
    }

    #[test]
    fn termination_is_sound() {
        // one level past the first zero, computed directly
        let g = Guard::default();
        let p = single_mode_projector(&preset("example_sec5", 1).unwrap()).unwrap();
        assert_eq!(graded_kernel(&p, 3, 4, &g).unwrap().space.dim(), 0);
        let p = assemble_pgen(&preset("fermion", 2).unwrap()).unwrap();
        assert_eq!(graded_kernel(p.p_gen(), 2, 4, &g).unwrap().space.dim(), 0);
    }

    #[test]
    fn guard_is_enforced() {
        let model = preset("example_sec5", 2).unwrap();
        let rs = assemble_pgen(&model).unwrap();
        let tiny = Guard::new(100);
        assert!(full_series(&model, &rs, 3, &tiny).is_err());
    }

    #[test]
    fn power_of_series() {
        let s = SeriesCoeffs::from_coeffs(vec![1, 3, 1, 0, 0]);
        assert_eq!(s.power(2), vec![1, 6, 11, 6, 1]);
        assert_eq!(s.power(0), vec![1, 0, 0, 0, 0]);
    }
}
