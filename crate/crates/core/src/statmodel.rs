//! Statistics species and their quadratic relation data.
//!
//! A species is fixed by the number of external modes `d`, an internal space
//! `K` of dimension `k_dim` with a symmetric positive definite form `g`, and two
//! internal subspaces `W_sym, W_ext ⊆ K⊗K`. The relation subspace is
//!
//! ```text
//! R_gen = Sym²(Q^d) ⊗ W_sym  ⊕  ∧²(Q^d) ⊗ W_ext
//! ```
//!
//! Generators are `X_{iα} = e_i ⊗ f_α` with flat index `i * k_dim + α`.
//! Degree-two vectors use the `X_{iα} ⊗ X_{jβ}` coordinates, flat index
//! `(i * k_dim + α) * (d * k_dim) + (j * k_dim + β)`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactla::{
    int, is_positive_definite, is_projector, kron, Rational, RationalMatrix, Subspace,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatModel {
    d: usize,
    k_dim: usize,
    g: RationalMatrix,
    w_sym: Subspace,
    w_ext: Subspace,
    /// Generator flat indices listed from smallest to largest.
    order: Vec<usize>,
    n_max: usize,
}

impl StatModel {
    pub fn new(
        d: usize,
        k_dim: usize,
        g: RationalMatrix,
        w_sym: Subspace,
        w_ext: Subspace,
        order: Option<Vec<usize>>,
        n_max: usize,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidModel("d must be at least 1".into()));
        }
        if k_dim == 0 {
            return Err(Error::InvalidModel("k_dim must be at least 1".into()));
        }
        if n_max < 2 {
            return Err(Error::InvalidModel(format!("n_max must be at least 2, got {n_max}")));
        }
        validate_form(&g, k_dim)?;
        for (name, w) in [("w_sym", &w_sym), ("w_ext", &w_ext)] {
            if w.ambient_dim() != k_dim * k_dim {
                return Err(Error::InvalidModel(format!(
                    "{name} lives in dimension {}, expected k_dim² = {}",
                    w.ambient_dim(),
                    k_dim * k_dim
                )));
            }
        }
        let gens = d * k_dim;
        let order = match order {
            Some(order) => {
                let mut seen = vec![false; gens];
                if order.len() != gens {
                    return Err(Error::InvalidModel(format!(
                        "order lists {} generators, expected {gens}",
                        order.len()
                    )));
                }
                for &x in &order {
                    if x >= gens || std::mem::replace(&mut seen[x], true) {
                        return Err(Error::InvalidModel(format!(
                            "order is not a permutation of 0..{gens}: bad entry {x}"
                        )));
                    }
                }
                order
            }
            None => (0..gens).collect(),
        };
        Ok(StatModel {
            d,
            k_dim,
            g,
            w_sym,
            w_ext,
            order,
            n_max,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k_dim(&self) -> usize {
        self.k_dim
    }

    /// Number of generators `d * k_dim`.
    pub fn gen_dim(&self) -> usize {
        self.d * self.k_dim
    }

    pub fn g(&self) -> &RationalMatrix {
        &self.g
    }

    pub fn w_sym(&self) -> &Subspace {
        &self.w_sym
    }

    pub fn w_ext(&self) -> &Subspace {
        &self.w_ext
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn is_lex_order(&self) -> bool {
        self.order.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn with_n_max(mut self, n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::InvalidModel(format!("n_max must be at least 2, got {n_max}")));
        }
        self.n_max = n_max;
        Ok(self)
    }

    pub fn with_w_ext(self, w_ext: Subspace) -> Result<Self> {
        StatModel::new(
            self.d,
            self.k_dim,
            self.g,
            self.w_sym,
            w_ext,
            Some(self.order),
            self.n_max,
        )
    }

    /// The `d = 1` restriction, where only `W_sym` contributes.
    pub fn single_mode(&self) -> StatModel {
        let order = single_mode_order(&self.order, self.k_dim);
        StatModel {
            d: 1,
            k_dim: self.k_dim,
            g: self.g.clone(),
            w_sym: self.w_sym.clone(),
            w_ext: self.w_ext.clone(),
            order,
            n_max: self.n_max,
        }
    }

    /// `g ⊗ g` on `K⊗K`.
    pub fn internal_gram(&self) -> RationalMatrix {
        kron(&self.g, &self.g)
    }

    /// `δ ⊗ g` on `H = Q^d ⊗ K`.
    pub fn generator_gram(&self) -> RationalMatrix {
        kron(&RationalMatrix::identity(self.d), &self.g)
    }

    /// Product form on `H⊗H`.
    pub fn pair_gram(&self) -> RationalMatrix {
        let h = self.generator_gram();
        kron(&h, &h)
    }

    /// Entries `g^{βα}` of the inverse form.
    pub fn inverse_form(&self) -> RationalMatrix {
        self.g.inverse().expect("validated form is invertible")
    }
}

// Order of the first mode's generators, read off the full order.
fn single_mode_order(order: &[usize], k_dim: usize) -> Vec<usize> {
    order.iter().copied().filter(|&x| x < k_dim).collect()
}

/// Checks that `g` is `k_dim × k_dim`, symmetric, and positive definite.
pub fn validate_form(g: &RationalMatrix, k_dim: usize) -> Result<()> {
    if g.rows() != k_dim || g.cols() != k_dim {
        return Err(Error::InvalidModel(format!(
            "g is {}x{}, expected {k_dim}x{k_dim}",
            g.rows(),
            g.cols()
        )));
    }
    for i in 0..k_dim {
        for j in 0..i {
            if g[(i, j)] != g[(j, i)] {
                return Err(Error::InvalidModel(format!(
                    "g is not symmetric: g[{j}][{i}] = {} but g[{i}][{j}] = {}",
                    g[(j, i)],
                    g[(i, j)]
                )));
            }
        }
    }
    if !is_positive_definite(g) {
        return Err(Error::InvalidModel(
            "g is not positive definite (a leading principal minor is <= 0)".into(),
        ));
    }
    Ok(())
}

/// Image of a declared projector, after checking it is a projector that is
/// self-adjoint for `gram`.
pub fn subspace_from_projector(p: &RationalMatrix, gram: &RationalMatrix) -> Result<Subspace> {
    if p.rows() != gram.rows() || !p.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "projector is {}x{}, expected {}x{}",
            p.rows(),
            p.cols(),
            gram.rows(),
            gram.rows()
        )));
    }
    if !is_projector(p, gram) {
        return Err(Error::InvalidModel(
            "declared projector is not idempotent and self-adjoint for g⊗g".into(),
        ));
    }
    Ok(Subspace::image(p))
}

/// The flip `a ⊗ b ↦ b ⊗ a` on `Q^n ⊗ Q^n`.
pub fn swap_matrix(n: usize) -> RationalMatrix {
    let mut s = RationalMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            s[(j * n + i, i * n + j)] = Rational::one();
        }
    }
    s
}

/// `(P_sym, P_ext) = ((I + SWAP)/2, (I − SWAP)/2)` on `Q^d ⊗ Q^d`.
pub fn external_projectors(d: usize) -> (RationalMatrix, RationalMatrix) {
    let id = RationalMatrix::identity(d * d);
    let swap = swap_matrix(d);
    let half = crate::exactla::rat(1, 2);
    (id.add(&swap).scale(&half), id.sub(&swap).scale(&half))
}

/// `g⊗g`-orthogonal projectors onto `W_sym` and `W_ext`.
pub fn internal_projectors(model: &StatModel) -> Result<(RationalMatrix, RationalMatrix)> {
    let gram = model.internal_gram();
    Ok((
        model.w_sym.orthogonal_projector(&gram)?,
        model.w_ext.orthogonal_projector(&gram)?,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationSet {
    ambient: usize,
    p_gen: RationalMatrix,
    p_gen_perp: RationalMatrix,
    r_gen: Subspace,
}

impl RelationSet {
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn p_gen(&self) -> &RationalMatrix {
        &self.p_gen
    }

    pub fn p_gen_perp(&self) -> &RationalMatrix {
        &self.p_gen_perp
    }

    pub fn r_gen(&self) -> &Subspace {
        &self.r_gen
    }

    pub fn rank(&self) -> usize {
        self.r_gen.dim()
    }
}

/// Expected rank of `P_gen`: `d(d+1)/2 · dim W_sym + d(d−1)/2 · dim W_ext`.
pub fn expected_rank(model: &StatModel) -> usize {
    let d = model.d;
    d * (d + 1) / 2 * model.w_sym.dim() + d * (d - 1) / 2 * model.w_ext.dim()
}

/// Assembles `P_gen = P_sym ⊗ P^K_sym + P_ext ⊗ P^K_ext` in generator order.
pub fn assemble_pgen(model: &StatModel) -> Result<RelationSet> {
    let (d, k) = (model.d, model.k_dim);
    let (ext_sym, ext_ext) = external_projectors(d);
    let (int_sym, int_ext) = internal_projectors(model)?;
    // (E⊗E)⊗(K⊗K) block order: index ((i d + j) k² + (α k + β))
    let block = kron(&ext_sym, &int_sym).add(&kron(&ext_ext, &int_ext));

    let n = d * k;
    let ambient = n * n;
    let mut to_gen = vec![0usize; ambient];
    for i in 0..d {
        for j in 0..d {
            for a in 0..k {
                for b in 0..k {
                    let old = (i * d + j) * k * k + a * k + b;
                    to_gen[old] = (i * k + a) * n + (j * k + b);
                }
            }
        }
    }
    let mut p_gen = RationalMatrix::zeros(ambient, ambient);
    for r in 0..ambient {
        for c in 0..ambient {
            let x = &block[(r, c)];
            if !x.is_zero() {
                p_gen[(to_gen[r], to_gen[c])] = x.clone();
            }
        }
    }

    let gram = model.pair_gram();
    if !is_projector(&p_gen, &gram) {
        return Err(Error::InvalidModel(
            "assembled P_gen is not a self-adjoint projector".into(),
        ));
    }
    let r_gen = Subspace::image(&p_gen);
    let expected = expected_rank(model);
    if r_gen.dim() != expected {
        return Err(Error::InvalidModel(format!(
            "rank(P_gen) = {} but the sector count gives {expected}",
            r_gen.dim()
        )));
    }
    let p_gen_perp = RationalMatrix::identity(ambient).sub(&p_gen);
    Ok(RelationSet {
        ambient,
        p_gen,
        p_gen_perp,
        r_gen,
    })
}

/// `r^{αβ}_{ij} = P_gen(X_{iα} ⊗ X_{jβ})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationVector {
    pub i: usize,
    pub j: usize,
    pub alpha: usize,
    pub beta: usize,
    pub coeffs: Vec<Rational>,
}

pub fn relation_vectors(rs: &RelationSet, model: &StatModel) -> Vec<RelationVector> {
    let (d, k) = (model.d, model.k_dim);
    let n = d * k;
    let mut out = Vec::with_capacity(rs.ambient);
    for i in 0..d {
        for j in 0..d {
            for alpha in 0..k {
                for beta in 0..k {
                    let col = (i * k + alpha) * n + (j * k + beta);
                    out.push(RelationVector {
                        i,
                        j,
                        alpha,
                        beta,
                        coeffs: rs.p_gen.column(col),
                    });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Boson,
    Fermion,
    ExampleSec5,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Boson, Preset::Fermion, Preset::ExampleSec5];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Boson => "boson",
            Preset::Fermion => "fermion",
            Preset::ExampleSec5 => "example_sec5",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| Error::UnknownPreset(name.to_string()))
    }

    pub fn default_d(self) -> usize {
        match self {
            Preset::Boson | Preset::Fermion => 1,
            Preset::ExampleSec5 => 2,
        }
    }
}

/// `h = k_1⊗k_1 + k_2⊗k_2 + k_3⊗k_3`, unnormalized.
pub fn sec5_h() -> Vec<Rational> {
    let mut h = vec![Rational::zero(); 9];
    for a in 0..3 {
        h[a * 3 + a] = int(1);
    }
    h
}

/// Builds a preset species with `d` external modes.
///
/// `example_sec5` takes `W_ext = 0`; use [`StatModel::with_w_ext`] to complete it.
pub fn preset(name: &str, d: usize) -> Result<StatModel> {
    match Preset::parse(name)? {
        Preset::Boson => StatModel::new(
            d,
            1,
            RationalMatrix::identity(1),
            Subspace::zero(1),
            Subspace::full(1),
            None,
            6,
        ),
        Preset::Fermion => StatModel::new(
            d,
            1,
            RationalMatrix::identity(1),
            Subspace::full(1),
            Subspace::zero(1),
            None,
            6,
        ),
        Preset::ExampleSec5 => {
            let line = Subspace::from_vectors(9, vec![sec5_h()])?;
            let h_perp = line.annihilator(&RationalMatrix::identity(9))?;
            StatModel::new(
                d,
                3,
                RationalMatrix::identity(3),
                h_perp,
                Subspace::zero(9),
                None,
                4,
            )
        }
    }
}
