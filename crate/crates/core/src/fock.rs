//! Truncated Fock space realised inside the tensor algebra.
//!
//! Level `n` is the graded kernel `W_n ⊂ H^⊗n` of `P_gen`, the orthogonal
//! complement of the ideal component, so the quotient class of a tensor is
//! represented by its Gram-orthogonal projection. Creation is
//! multiply-and-project; annihilation is the adjoint for the level inner
//! products. The level inner product is `n!` times the restricted product
//! form: the weighting leaves every projection unchanged and is what makes
//! the symmetric and antisymmetric presets reproduce CCR and CAR.
//!
//! Every operator identity is written as a list of weighted operator words
//! and evaluated level by level, so a failing check and its replay share one
//! code path.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use num_traits::{One, Zero};

use crate::check::{describe_residual, CheckReport, Locus, Witness};
use crate::error::{Error, Result};
use crate::exactla::{int, is_positive_definite, unit_vector, Guard, LocalOperator, Rational, RationalMatrix, Subspace};
use crate::hilbert::graded_kernels;
use crate::ratser;
use crate::statmodel::{RelationSet, StatModel};

/// Rank-4 tensor over `K`, stored flat with index `((a·k + b)·k + c)·k + e`
/// for `T^{ab}_{ce}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tensor4 {
    k: usize,
    data: Vec<Rational>,
}

impl Tensor4 {
    pub fn new(k: usize, data: Vec<Rational>) -> Result<Self> {
        if data.len() != k.pow(4) {
            return Err(Error::DimensionMismatch(format!(
                "exchange tensor has {} entries, expected k^4 = {}",
                data.len(),
                k.pow(4)
            )));
        }
        Ok(Tensor4 { k, data })
    }

    pub fn from_fn(k: usize, f: impl Fn(usize, usize, usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(k.pow(4));
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    for e in 0..k {
                        data.push(f(a, b, c, e));
                    }
                }
            }
        }
        Tensor4 { k, data }
    }

    /// Accepts a flat list whose length must be a fourth power.
    pub fn from_flat(data: Vec<Rational>) -> Result<Self> {
        let k = (1..=data.len()).find(|k| k.pow(4) >= data.len()).unwrap_or(0);
        Tensor4::new(k, data)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, a: usize, b: usize, c: usize, e: usize) -> &Rational {
        let k = self.k;
        &self.data[((a * k + b) * k + c) * k + e]
    }

    pub fn data(&self) -> &[Rational] {
        &self.data
    }
}

impl Serialize for Tensor4 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ratser::vec::serialize(&self.data, s)
    }
}

impl<'de> Deserialize<'de> for Tensor4 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let data = ratser::vec::deserialize(d)?;
        Tensor4::from_flat(data).map_err(serde::de::Error::custom)
    }
}

fn delta(a: usize, b: usize) -> Rational {
    if a == b {
        Rational::one()
    } else {
        Rational::zero()
    }
}

/// Bracket coefficients `A, B` and exchange tensors `C, S, R`, all indexed
/// upper-pair first: `A^{ηλ}_{αβ}`, `C^{γδ}_{αβ}`, `S^{γδ}_{σα}`, `R^{γδ}_{βσ}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExchangeData {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Tensor4>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Tensor4>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Tensor4>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Tensor4>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Tensor4>,
}

impl ExchangeData {
    /// CCR: commutator bracket, plain swaps for `C, S, R`.
    pub fn bosonic(k: usize) -> Self {
        Self::standard(k, Rational::one())
    }

    /// CAR: anticommutator bracket, signed swaps.
    pub fn fermionic(k: usize) -> Self {
        Self::standard(k, -Rational::one())
    }

    fn standard(k: usize, sign: Rational) -> Self {
        let same = Tensor4::from_fn(k, |e, l, a, b| delta(e, a) * delta(l, b));
        let zero = Tensor4::from_fn(k, |_, _, _, _| Rational::zero());
        let swap = Tensor4::from_fn(k, |g, d, a, b| &sign * delta(g, b) * delta(d, a));
        let (a, b) = if sign.is_one() { (zero, same) } else { (same, zero) };
        ExchangeData {
            a: Some(a),
            b: Some(b),
            c: Some(swap.clone()),
            s: Some(swap.clone()),
            r: Some(swap),
        }
    }

    fn check_k(&self, k: usize) -> Result<()> {
        for (name, t) in [("A", &self.a), ("B", &self.b), ("C", &self.c), ("S", &self.s), ("R", &self.r)] {
            if let Some(t) = t {
                if t.k != k {
                    return Err(Error::DimensionMismatch(format!(
                        "exchange tensor {name} is over a {}-dimensional space, model has k_dim = {k}",
                        t.k
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockLevel {
    pub degree: usize,
    /// Canonical basis of `W_n` (rows).
    pub space: Subspace,
    /// `n!` times the restricted product form.
    pub gram: RationalMatrix,
    plain_inverse: RationalMatrix,
    // rows: basis vectors mapped by the product form, B·G^{⊗n}
    paired_basis: RationalMatrix,
}

impl FockLevel {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorMatrix {
    pub from_level: usize,
    pub to_level: usize,
    pub matrix: RationalMatrix,
}

#[derive(Debug, Clone)]
pub struct FockRealization {
    d: usize,
    k: usize,
    n_max: usize,
    g: RationalMatrix,
    g_inv: RationalMatrix,
    levels: Vec<FockLevel>,
    // [n][gen]: level n → n+1, n < N
    creators: Vec<Vec<RationalMatrix>>,
    // [n][gen]: level n → n−1, 1 ≤ n ≤ N (index 0 unused)
    annihilators: Vec<Vec<RationalMatrix>>,
    // [i][j][n]
    gl: Vec<Vec<Vec<RationalMatrix>>>,
    relations: Vec<Vec<Rational>>,
}

fn factorial(n: usize) -> Rational {
    (1..=n).fold(Rational::one(), |acc, m| acc * int(m as i64))
}

pub fn build_fock(model: &StatModel, rs: &RelationSet, n_max: usize, guard: &Guard) -> Result<FockRealization> {
    let gens = model.gen_dim();
    let kernels = graded_kernels(rs.p_gen(), gens, n_max, guard)?;
    let form = LocalOperator::new(&model.generator_gram(), gens, 1)?;
    let mut levels = Vec::with_capacity(n_max + 1);
    for gk in kernels {
        let n = gk.degree;
        let dim = gk.space.dim();
        let (paired_basis, plain) = if dim == 0 {
            (RationalMatrix::zeros(0, 0), RationalMatrix::zeros(0, 0))
        } else {
            let rows: Vec<Vec<Rational>> = gk
                .space
                .vectors()
                .into_iter()
                .map(|mut v| {
                    for pos in 0..n {
                        v = form.apply(n, pos, &v);
                    }
                    v
                })
                .collect();
            let paired = RationalMatrix::from_rows(gk.space.ambient_dim(), rows)?;
            let plain = paired.mul(&gk.space.basis().transpose());
            (paired, plain)
        };
        let plain_inverse = if dim == 0 { plain.clone() } else { plain.inverse()? };
        levels.push(FockLevel {
            degree: n,
            gram: plain.scale(&factorial(n)),
            plain_inverse,
            paired_basis,
            space: gk.space,
        });
    }

    let mut creators = Vec::with_capacity(n_max);
    for n in 0..n_max {
        let (src, dst) = (&levels[n], &levels[n + 1]);
        let width = src.space.ambient_dim();
        let mut per_gen = Vec::with_capacity(gens);
        for gen in 0..gens {
            let mut m = RationalMatrix::zeros(dst.dim(), src.dim());
            if dst.dim() > 0 {
                for (col, v) in src.space.vectors().iter().enumerate() {
                    // B·M·(e_gen ⊗ v)
                    let y: Vec<Rational> = (0..dst.dim())
                        .map(|r| {
                            let row = &dst.paired_basis.row(r)[gen * width..(gen + 1) * width];
                            row.iter()
                                .zip(v)
                                .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                                .map(|(a, b)| a * b)
                                .sum()
                        })
                        .collect();
                    for (r, c) in dst.plain_inverse.mul_vec(&y).into_iter().enumerate() {
                        m[(r, col)] = c;
                    }
                }
            }
            per_gen.push(m);
        }
        creators.push(per_gen);
    }

    let mut annihilators = vec![Vec::new()];
    for n in 1..=n_max {
        let (lower, upper) = (&levels[n - 1], &levels[n]);
        let scale = int(n as i64);
        let per_gen = (0..gens)
            .map(|gen| {
                lower
                    .plain_inverse
                    .mul(&creators[n - 1][gen].transpose())
                    .mul(&upper.gram.scale(&(Rational::one() / factorial(n))))
                    .scale(&scale)
            })
            .collect();
        annihilators.push(per_gen);
    }

    let g_inv = model.inverse_form();
    let k = model.k_dim();
    let d = model.d();
    let mut gl = vec![vec![Vec::with_capacity(n_max + 1); d]; d];
    for (i, row) in gl.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            slot.push(RationalMatrix::zeros(levels[0].dim(), levels[0].dim()));
            for n in 1..=n_max {
                let dim = levels[n].dim();
                let mut acc = RationalMatrix::zeros(dim, dim);
                for a in 0..k {
                    for b in 0..k {
                        let w = &g_inv[(b, a)];
                        if w.is_zero() {
                            continue;
                        }
                        let term = creators[n - 1][i * k + a].mul(&annihilators[n][j * k + b]);
                        acc = acc.add(&term.scale(w));
                    }
                }
                slot.push(acc);
            }
        }
    }

    Ok(FockRealization {
        d,
        k,
        n_max,
        g: model.g().clone(),
        g_inv,
        levels,
        creators,
        annihilators,
        gl,
        relations: rs.r_gen().vectors(),
    })
}

/// One factor of an operator word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Create(usize),
    Annihilate(usize),
    Gl(usize, usize),
}

impl Op {
    fn shift(self) -> isize {
        match self {
            Op::Create(_) => 1,
            Op::Annihilate(_) => -1,
            Op::Gl(..) => 0,
        }
    }
}

/// `coeff · w₁ w₂ … w_m` (applied right to left); an empty word is the
/// identity.
pub type Term = (Rational, Vec<Op>);

impl FockRealization {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k_dim(&self) -> usize {
        self.k
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn levels(&self) -> &[FockLevel] {
        &self.levels
    }

    pub fn dims(&self) -> Vec<usize> {
        self.levels.iter().map(FockLevel::dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.dims().iter().sum()
    }

    fn gen(&self, i: usize, alpha: usize) -> Result<usize> {
        if i >= self.d || alpha >= self.k {
            return Err(Error::DimensionMismatch(format!(
                "generator ({i}, {alpha}) outside d = {}, k_dim = {}",
                self.d, self.k
            )));
        }
        Ok(i * self.k + alpha)
    }

    /// `X†_{iα}`: level `n` → `n + 1`, for `n < N`.
    pub fn creation_matrix(&self, i: usize, alpha: usize, n: usize) -> Result<OperatorMatrix> {
        let gen = self.gen(i, alpha)?;
        if n >= self.n_max {
            return Err(Error::LevelOutOfRange {
                level: n,
                max: self.n_max.saturating_sub(1),
            });
        }
        Ok(OperatorMatrix {
            from_level: n,
            to_level: n + 1,
            matrix: self.creators[n][gen].clone(),
        })
    }

    /// `X_{iα}`: level `n` → `n − 1`, for `1 ≤ n ≤ N`.
    pub fn annihilation_matrix(&self, i: usize, alpha: usize, n: usize) -> Result<OperatorMatrix> {
        let gen = self.gen(i, alpha)?;
        if n == 0 || n > self.n_max {
            return Err(Error::LevelOutOfRange {
                level: n,
                max: self.n_max,
            });
        }
        Ok(OperatorMatrix {
            from_level: n,
            to_level: n - 1,
            matrix: self.annihilators[n][gen].clone(),
        })
    }

    /// `J_{ij}` on each level `0..=N`.
    pub fn gld_generator(&self, i: usize, j: usize) -> Result<Vec<OperatorMatrix>> {
        if i >= self.d || j >= self.d {
            return Err(Error::DimensionMismatch(format!("J_({i},{j}) outside d = {}", self.d)));
        }
        Ok(self.gl[i][j]
            .iter()
            .enumerate()
            .map(|(n, m)| OperatorMatrix {
                from_level: n,
                to_level: n,
                matrix: m.clone(),
            })
            .collect())
    }

    pub fn gld_generators(&self) -> Vec<((usize, usize), Vec<OperatorMatrix>)> {
        let mut out = Vec::new();
        for i in 0..self.d {
            for j in 0..self.d {
                out.push(((i, j), self.gld_generator(i, j).expect("indices in range")));
            }
        }
        out
    }

    /// Matrix of a weighted sum of words on level `n`. A word that passes
    /// below level 0 contributes zero; one that leaves the truncation is an
    /// error.
    pub fn eval(&self, terms: &[Term], n: usize) -> Result<RationalMatrix> {
        let target = terms
            .first()
            .map(|(_, w)| n as isize + w.iter().map(|o| o.shift()).sum::<isize>())
            .unwrap_or(n as isize);
        if target < 0 || target as usize > self.n_max || n > self.n_max {
            return Err(Error::LevelOutOfRange {
                level: target.max(0) as usize,
                max: self.n_max,
            });
        }
        let target = target as usize;
        let mut acc = RationalMatrix::zeros(self.levels[target].dim(), self.levels[n].dim());
        for (coeff, word) in terms {
            if coeff.is_zero() {
                continue;
            }
            let shift: isize = word.iter().map(|o| o.shift()).sum();
            if n as isize + shift != target as isize {
                return Err(Error::DimensionMismatch("terms of an identity change level differently".into()));
            }
            if let Some(m) = self.word(word, n)? {
                acc = acc.add(&m.scale(coeff));
            }
        }
        Ok(acc)
    }

    fn word(&self, word: &[Op], n: usize) -> Result<Option<RationalMatrix>> {
        let mut level = n;
        let mut acc = RationalMatrix::identity(self.levels[n].dim());
        for op in word.iter().rev() {
            let m = match *op {
                Op::Create(g) => {
                    if level >= self.n_max {
                        return Err(Error::LevelOutOfRange {
                            level: level + 1,
                            max: self.n_max,
                        });
                    }
                    level += 1;
                    &self.creators[level - 1][g]
                }
                Op::Annihilate(g) => {
                    if level == 0 {
                        return Ok(None);
                    }
                    level -= 1;
                    &self.annihilators[level + 1][g]
                }
                Op::Gl(i, j) => &self.gl[i][j][level],
            };
            acc = m.mul(&acc);
        }
        Ok(Some(acc))
    }
}

/// Operator identities checked on the truncated Fock space. Each has a
/// level window where every word stays inside the truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    /// `⟨0|X_{iα}X†_{jβ}|0⟩ = g_{αβ}δ_{ij}`.
    VacuumTwoPoint,
    /// `G_{n−1}·X_{iα} = (X†_{iα})ᵀ·G_n`.
    Adjointness,
    BracketCreators,
    BracketAnnihilators,
    BracketMixed,
    /// `[J_{ij}, X†_{kσ}] = δ_{jk} X†_{iσ}`.
    GlCreators,
    /// `[J_{ij}, X_{kσ}] = −δ_{ik} X_{jσ}`.
    GlAnnihilators,
    /// `[J_{ij}, J_{kl}] = δ_{jk} J_{il} − δ_{il} J_{kj}`.
    GlCommutators,
    /// `Σ_m J_{mm} = n·1` on level `n`.
    NumberIsDegree,
    /// `[N̂, J_{ij}] = 0`.
    NumberCommutes,
    /// `[N̂, X†_{iα}] = X†_{iα}`.
    NumberRaises,
    /// `Σ c·X†X† = 0` for each relation vector.
    QuadraticKill,
    /// `X_{iα}X†_{jβ} = Σ C^{γδ}_{αβ} X†_{jγ}X_{iδ} + g_{αβ}δ_{ij}`.
    ExchangeC,
    /// `X†_{kσ}X†_{iα} = Σ S^{γδ}_{σα} X†_{iγ}X†_{kδ}`.
    ExchangeS,
    /// `X_{jβ}X_{kσ} = Σ R^{γδ}_{βσ} X_{kγ}X_{jδ}`.
    ExchangeR,
}

impl Identity {
    pub const ALL: [Identity; 15] = [
        Identity::VacuumTwoPoint,
        Identity::Adjointness,
        Identity::BracketCreators,
        Identity::BracketAnnihilators,
        Identity::BracketMixed,
        Identity::GlCreators,
        Identity::GlAnnihilators,
        Identity::GlCommutators,
        Identity::NumberIsDegree,
        Identity::NumberCommutes,
        Identity::NumberRaises,
        Identity::QuadraticKill,
        Identity::ExchangeC,
        Identity::ExchangeS,
        Identity::ExchangeR,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::VacuumTwoPoint => "vacuum_two_point",
            Identity::Adjointness => "adjointness",
            Identity::BracketCreators => "ab_bracket_creators",
            Identity::BracketAnnihilators => "ab_bracket_annihilators",
            Identity::BracketMixed => "ab_bracket_mixed",
            Identity::GlCreators => "gld_action_creators",
            Identity::GlAnnihilators => "gld_action_annihilators",
            Identity::GlCommutators => "gld_commutators",
            Identity::NumberIsDegree => "number_operator_degree",
            Identity::NumberCommutes => "number_operator_commutes",
            Identity::NumberRaises => "number_operator_raises",
            Identity::QuadraticKill => "quadratic_relations_kill",
            Identity::ExchangeC => "exchange_c",
            Identity::ExchangeS => "exchange_s",
            Identity::ExchangeR => "exchange_r",
        }
    }

    pub fn from_name(name: &str) -> Option<Identity> {
        Identity::ALL.into_iter().find(|i| i.name() == name)
    }

    /// Source levels on which the identity is evaluated.
    pub fn window(self, n_max: usize) -> Vec<usize> {
        // levels 0..=N−k, empty when N < k
        let below = |k: usize| if n_max >= k { (0..=n_max - k).collect() } else { Vec::new() };
        match self {
            Identity::VacuumTwoPoint => below(1).into_iter().take(1).collect(),
            Identity::Adjointness | Identity::GlAnnihilators => (1..=n_max).collect(),
            Identity::BracketCreators | Identity::QuadraticKill | Identity::ExchangeS => below(2),
            Identity::BracketAnnihilators | Identity::ExchangeR => (2..=n_max).collect(),
            Identity::BracketMixed | Identity::GlCreators | Identity::NumberRaises | Identity::ExchangeC => below(1),
            Identity::GlCommutators | Identity::NumberIsDegree | Identity::NumberCommutes => (0..=n_max).collect(),
        }
    }

    fn index_ranges(self, fock: &FockRealization) -> Vec<usize> {
        let (d, k) = (fock.d, fock.k);
        match self {
            Identity::VacuumTwoPoint
            | Identity::BracketCreators
            | Identity::BracketAnnihilators
            | Identity::BracketMixed
            | Identity::ExchangeC
            | Identity::ExchangeS
            | Identity::ExchangeR => vec![d, k, d, k],
            Identity::Adjointness | Identity::NumberRaises => vec![d, k],
            Identity::GlCreators | Identity::GlAnnihilators => vec![d, d, d, k],
            Identity::GlCommutators => vec![d, d, d, d],
            Identity::NumberIsDegree => vec![],
            Identity::NumberCommutes => vec![d, d],
            Identity::QuadraticKill => vec![fock.relations.len()],
        }
    }

    /// Every index tuple, in lexicographic order.
    pub fn indices(self, fock: &FockRealization) -> Vec<Vec<usize>> {
        let ranges = self.index_ranges(fock);
        let mut out = vec![Vec::new()];
        for r in ranges {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..r).map(move |x| {
                        let mut p = prefix.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        out
    }

    fn needs(self) -> &'static [char] {
        match self {
            Identity::BracketCreators | Identity::BracketAnnihilators | Identity::BracketMixed => &['A', 'B'],
            Identity::ExchangeC => &['C'],
            Identity::ExchangeS => &['S'],
            Identity::ExchangeR => &['R'],
            _ => &[],
        }
    }

    /// `lhs − rhs` on level `n` for one index tuple.
    pub fn residual(
        self,
        fock: &FockRealization,
        ex: Option<&ExchangeData>,
        n: usize,
        idx: &[usize],
    ) -> Result<RationalMatrix> {
        let expected = self.index_ranges(fock);
        if idx.len() != expected.len() || idx.iter().zip(&expected).any(|(i, r)| i >= r) {
            return Err(Error::DimensionMismatch(format!(
                "{}: indices {idx:?} outside ranges {expected:?}",
                self.name()
            )));
        }
        if self == Identity::Adjointness {
            if n == 0 || n > fock.n_max {
                return Err(Error::LevelOutOfRange {
                    level: n,
                    max: fock.n_max,
                });
            }
            let gen = idx[0] * fock.k + idx[1];
            let lhs = fock.levels[n - 1].gram.mul(&fock.annihilators[n][gen]);
            let rhs = fock.creators[n - 1][gen].transpose().mul(&fock.levels[n].gram);
            return Ok(lhs.sub(&rhs));
        }
        fock.eval(&self.terms(fock, ex, n, idx)?, n)
    }

    fn terms(self, fock: &FockRealization, ex: Option<&ExchangeData>, n: usize, idx: &[usize]) -> Result<Vec<Term>> {
        let k = fock.k;
        let one = Rational::one;
        let tensor = |c: char| -> Result<&Tensor4> {
            let t = ex.and_then(|e| match c {
                'A' => e.a.as_ref(),
                'B' => e.b.as_ref(),
                'C' => e.c.as_ref(),
                'S' => e.s.as_ref(),
                _ => e.r.as_ref(),
            });
            t.ok_or_else(|| Error::MissingExchange(format!("{} needs tensor {c}", self.name())))
        };
        let cr = |i: usize, a: usize| Op::Create(i * k + a);
        let an = |i: usize, a: usize| Op::Annihilate(i * k + a);
        let gd = |i: usize, j: usize, a: usize, b: usize| -> Rational {
            if i == j {
                fock.g[(a, b)].clone()
            } else {
                Rational::zero()
            }
        };
        let mut t: Vec<Term> = Vec::new();
        match self {
            Identity::VacuumTwoPoint => {
                let (i, a, j, b) = (idx[0], idx[1], idx[2], idx[3]);
                t.push((one(), vec![an(i, a), cr(j, b)]));
                t.push((-gd(i, j, a, b), vec![]));
            }
            Identity::Adjointness => unreachable!("evaluated directly"),
            Identity::BracketCreators | Identity::BracketAnnihilators | Identity::BracketMixed => {
                let (ta, tb) = (tensor('A')?, tensor('B')?);
                let (i, a, j, b) = (idx[0], idx[1], idx[2], idx[3]);
                for e in 0..k {
                    for l in 0..k {
                        let (p, q) = match self {
                            Identity::BracketCreators => (cr(i, e), cr(j, l)),
                            Identity::BracketAnnihilators => (an(i, e), an(j, l)),
                            _ => (an(i, e), cr(j, l)),
                        };
                        let (ca, cb) = (ta.get(e, l, a, b), tb.get(e, l, a, b));
                        t.push((ca + cb, vec![p, q]));
                        t.push((ca - cb, vec![q, p]));
                    }
                }
                if self == Identity::BracketMixed {
                    t.push((-gd(i, j, a, b), vec![]));
                }
            }
            Identity::GlCreators | Identity::GlAnnihilators => {
                let (i, j, kk, s) = (idx[0], idx[1], idx[2], idx[3]);
                let x = if self == Identity::GlCreators { cr(kk, s) } else { an(kk, s) };
                t.push((one(), vec![Op::Gl(i, j), x]));
                t.push((-one(), vec![x, Op::Gl(i, j)]));
                if self == Identity::GlCreators && j == kk {
                    t.push((-one(), vec![cr(i, s)]));
                }
                if self == Identity::GlAnnihilators && i == kk {
                    t.push((one(), vec![an(j, s)]));
                }
            }
            Identity::GlCommutators => {
                let (i, j, kk, l) = (idx[0], idx[1], idx[2], idx[3]);
                t.push((one(), vec![Op::Gl(i, j), Op::Gl(kk, l)]));
                t.push((-one(), vec![Op::Gl(kk, l), Op::Gl(i, j)]));
                if j == kk {
                    t.push((-one(), vec![Op::Gl(i, l)]));
                }
                if i == l {
                    t.push((one(), vec![Op::Gl(kk, j)]));
                }
            }
            Identity::NumberIsDegree => {
                for m in 0..fock.d {
                    t.push((one(), vec![Op::Gl(m, m)]));
                }
                t.push((-int(n as i64), vec![]));
            }
            Identity::NumberCommutes => {
                let (i, j) = (idx[0], idx[1]);
                for m in 0..fock.d {
                    t.push((one(), vec![Op::Gl(m, m), Op::Gl(i, j)]));
                    t.push((-one(), vec![Op::Gl(i, j), Op::Gl(m, m)]));
                }
            }
            Identity::NumberRaises => {
                let x = cr(idx[0], idx[1]);
                for m in 0..fock.d {
                    t.push((one(), vec![Op::Gl(m, m), x]));
                    t.push((-one(), vec![x, Op::Gl(m, m)]));
                }
                t.push((-one(), vec![x]));
            }
            Identity::QuadraticKill => {
                let r = &fock.relations[idx[0]];
                let gens = fock.d * k;
                for (flat, c) in r.iter().enumerate() {
                    if !c.is_zero() {
                        t.push((c.clone(), vec![Op::Create(flat / gens), Op::Create(flat % gens)]));
                    }
                }
            }
            Identity::ExchangeC => {
                let tc = tensor('C')?;
                let (i, a, j, b) = (idx[0], idx[1], idx[2], idx[3]);
                t.push((one(), vec![an(i, a), cr(j, b)]));
                for g in 0..k {
                    for dd in 0..k {
                        t.push((-tc.get(g, dd, a, b), vec![cr(j, g), an(i, dd)]));
                    }
                }
                t.push((-gd(i, j, a, b), vec![]));
            }
            Identity::ExchangeS => {
                let ts = tensor('S')?;
                let (kk, s, i, a) = (idx[0], idx[1], idx[2], idx[3]);
                t.push((one(), vec![cr(kk, s), cr(i, a)]));
                for g in 0..k {
                    for dd in 0..k {
                        t.push((-ts.get(g, dd, s, a), vec![cr(i, g), cr(kk, dd)]));
                    }
                }
            }
            Identity::ExchangeR => {
                let tr = tensor('R')?;
                let (j, b, kk, s) = (idx[0], idx[1], idx[2], idx[3]);
                t.push((one(), vec![an(j, b), an(kk, s)]));
                for g in 0..k {
                    for dd in 0..k {
                        t.push((-tr.get(g, dd, b, s), vec![an(kk, g), an(j, dd)]));
                    }
                }
            }
        }
        Ok(t)
    }
}

impl FockRealization {
    /// Evaluates `identity` on its whole window and every index tuple.
    pub fn check(&self, identity: Identity, ex: Option<&ExchangeData>) -> Result<CheckReport> {
        if let Some(ex) = ex {
            ex.check_k(self.k)?;
        }
        for c in identity.needs() {
            let present = ex.is_some_and(|e| match c {
                'A' => e.a.is_some(),
                'B' => e.b.is_some(),
                'C' => e.c.is_some(),
                'S' => e.s.is_some(),
                _ => e.r.is_some(),
            });
            if !present {
                return Err(Error::MissingExchange(format!("{} needs tensor {c}", identity.name())));
            }
        }
        let window = identity.window(self.n_max);
        let indices = identity.indices(self);
        let mut evaluated = 0usize;
        let mut failures = 0usize;
        let mut first: Option<(usize, Vec<usize>, usize, Vec<Rational>)> = None;
        for &n in &window {
            for idx in &indices {
                let res = identity.residual(self, ex, n, idx)?;
                evaluated += 1;
                if res.is_zero() {
                    continue;
                }
                failures += 1;
                if first.is_none() {
                    let col = (0..res.cols())
                        .find(|&c| res.column(c).iter().any(|x| !x.is_zero()))
                        .expect("nonzero residual has a nonzero column");
                    first = Some((n, idx.clone(), col, res.column(col)));
                }
            }
        }
        let window_text = match (window.first(), window.last()) {
            (Some(a), Some(b)) => format!("levels {a}..={b}"),
            _ => "no levels (truncation too small)".to_string(),
        };
        Ok(match first {
            None => CheckReport::pass(
                identity.name(),
                format!("holds exactly on {window_text}, {evaluated} level/index cases"),
            ),
            Some((n, idx, col, difference)) => {
                let details = format!(
                    "fails in {failures} of {evaluated} level/index cases on {window_text}; first at level {n}, indices {idx:?}, basis vector {col}: {}",
                    describe_residual(&difference, 6)
                );
                CheckReport::fail(
                    identity.name(),
                    Witness::Vector {
                        input: unit_vector(self.levels[n].dim(), col),
                        difference,
                        locus: Locus::at_level(n, idx),
                    },
                    details,
                )
            }
        })
    }

    /// Re-evaluates a stored vector witness.
    pub fn replay(
        &self,
        name: &str,
        locus: &Locus,
        input: &[Rational],
        ex: Option<&ExchangeData>,
    ) -> Result<Vec<Rational>> {
        let identity = Identity::from_name(name).ok_or_else(|| Error::Replay(format!("unknown Fock identity `{name}`")))?;
        let n = locus
            .level
            .ok_or_else(|| Error::Replay(format!("witness for `{name}` has no level")))?;
        if n > self.n_max {
            return Err(Error::LevelOutOfRange {
                level: n,
                max: self.n_max,
            });
        }
        let res = identity.residual(self, ex, n, &locus.indices)?;
        if res.cols() != input.len() {
            return Err(Error::Replay(format!(
                "witness input has length {}, level {n} has dimension {}",
                input.len(),
                res.cols()
            )));
        }
        Ok(res.mul_vec(input))
    }

    pub fn check_gram_positive(&self) -> CheckReport {
        let name = "level_gram_positive";
        for level in &self.levels {
            if level.dim() > 0 && !is_positive_definite(&level.gram) {
                return CheckReport::fail(
                    name,
                    Witness::Degree {
                        degree: level.degree,
                        observed: level.gram.rank(),
                        expected: level.dim(),
                    },
                    format!("level {} Gram is not positive definite", level.degree),
                );
            }
        }
        CheckReport::pass(name, format!("all level Grams positive definite, dims {:?}", self.dims()))
    }

    /// The `d·k × d·k` matrix `⟨0|X_{iα}X†_{jβ}|0⟩`.
    pub fn two_point_matrix(&self) -> Result<RationalMatrix> {
        let gens = self.d * self.k;
        let mut m = RationalMatrix::zeros(gens, gens);
        for a in 0..gens {
            for b in 0..gens {
                let v = self.eval(&[(Rational::one(), vec![Op::Annihilate(a), Op::Create(b)])], 0)?;
                m[(a, b)] = v[(0, 0)].clone();
            }
        }
        Ok(m)
    }

    /// Component adjointness of the exchange tensors,
    /// `Σ_β g^{βα} C^{γδ}_{βσ} = Σ_η S^{γα}_{ση} g_{δη}`, as a residual
    /// indexed `[γ][δ][α][σ]`.
    pub fn component_residual(&self, ex: &ExchangeData) -> Result<Tensor4> {
        let (c, s) = match (&ex.c, &ex.s) {
            (Some(c), Some(s)) => (c, s),
            _ => return Err(Error::MissingExchange("exchange_component_adjointness needs tensors C and S".into())),
        };
        ex.check_k(self.k)?;
        let k = self.k;
        Ok(Tensor4::from_fn(k, |g, dd, a, sg| {
            let lhs: Rational = (0..k).map(|b| &self.g_inv[(b, a)] * c.get(g, dd, b, sg)).sum();
            let rhs: Rational = (0..k).map(|e| s.get(g, a, sg, e) * &self.g[(dd, e)]).sum();
            lhs - rhs
        }))
    }

    pub fn check_component_adjointness(&self, ex: &ExchangeData) -> Result<CheckReport> {
        let res = self.component_residual(ex)?;
        let name = "exchange_component_adjointness";
        Ok(match res.data.iter().position(|x| !x.is_zero()) {
            None => CheckReport::pass(name, "C and S satisfy the component adjointness identity"),
            Some(pos) => CheckReport::fail(
                name,
                Witness::Vector {
                    input: unit_vector(res.data.len(), pos),
                    difference: res.data.clone(),
                    locus: Locus::default(),
                },
                format!(
                    "component identity fails at [γ,δ,α,σ] flat index {pos}: {}",
                    describe_residual(&res.data, 6)
                ),
            ),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockReport {
    pub n_max: usize,
    pub dims: Vec<usize>,
    pub total_dim: usize,
    /// Row-major `d·k × d·k`.
    #[serde(with = "ratser::vec")]
    pub two_point: Vec<Rational>,
    pub checks: Vec<CheckReport>,
    /// Checks that need exchange tensors the input did not supply.
    pub skipped: Vec<String>,
}

/// Runs every check the supplied data allows.
pub fn fock_report(fock: &FockRealization, ex: Option<&ExchangeData>) -> Result<FockReport> {
    let mut checks = vec![fock.check_gram_positive()];
    let mut skipped = Vec::new();
    for identity in Identity::ALL {
        match fock.check(identity, ex) {
            Ok(r) => checks.push(r),
            Err(Error::MissingExchange(why)) => skipped.push(why),
            Err(e) => return Err(e),
        }
    }
    match ex.map(|e| fock.check_component_adjointness(e)) {
        Some(Ok(r)) => checks.push(r),
        Some(Err(Error::MissingExchange(why))) => skipped.push(why),
        Some(Err(e)) => return Err(e),
        None => skipped.push("exchange_component_adjointness needs tensors C and S".into()),
    }
    let tp = fock.two_point_matrix()?;
    Ok(FockReport {
        n_max: fock.n_max,
        dims: fock.dims(),
        total_dim: fock.total_dim(),
        two_point: tp.entries().to_vec(),
        checks,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rat;
    use crate::statmodel::{assemble_pgen, preset, sec5_h};

    fn fock(name: &str, d: usize, n: usize) -> FockRealization {
        let model = preset(name, d).unwrap();
        let rs = assemble_pgen(&model).unwrap();
        build_fock(&model, &rs, n, &Guard::default()).unwrap()
    }

    #[test]
    fn level_dims() {
        assert_eq!(fock("boson", 1, 3).dims(), vec![1, 1, 1, 1]);
        assert_eq!(fock("fermion", 2, 3).dims(), vec![1, 2, 1, 0]);
        assert_eq!(fock("boson", 2, 3).dims(), vec![1, 2, 3, 4]);
        assert_eq!(fock("example_sec5", 1, 3).dims(), vec![1, 3, 1, 0]);
    }

    #[test]
    fn boson_creation_is_unit_and_annihilation_counts() {
        let f = fock("boson", 1, 4);
        for n in 0..4 {
            assert_eq!(f.creation_matrix(0, 0, n).unwrap().matrix, RationalMatrix::from_i64(&[&[1]]));
            let a = f.annihilation_matrix(0, 0, n + 1).unwrap();
            assert_eq!(a.matrix[(0, 0)], int(n as i64 + 1));
        }
        assert!(matches!(f.creation_matrix(0, 0, 4), Err(Error::LevelOutOfRange { .. })));
        assert!(matches!(f.annihilation_matrix(0, 0, 0), Err(Error::LevelOutOfRange { .. })));
    }

    #[test]
    fn fermion_creation_signs() {
        let f = fock("fermion", 2, 2);
        // level 1 basis e_1, e_2; level 2 basis (e_12 − e_21) normalised to leading 1
        let w2 = f.levels()[2].space.vectors()[0].clone();
        assert_eq!(w2, vec![int(0), int(1), int(-1), int(0)]);
        let c1 = f.creation_matrix(0, 0, 1).unwrap().matrix;
        let c2 = f.creation_matrix(1, 0, 1).unwrap().matrix;
        assert_eq!(c1[(0, 0)], int(0));
        assert_eq!(c1[(0, 1)], rat(1, 2));
        assert_eq!(c2[(0, 0)], rat(-1, 2));
        // a_1 kills the X_2 state
        assert!(f.annihilation_matrix(0, 0, 1).unwrap().matrix.column(1).iter().all(Zero::is_zero));
    }

    #[test]
    fn level_one_annihilation_reproduces_form() {
        let f = fock("example_sec5", 2, 2);
        for i in 0..2 {
            for a in 0..3 {
                let m = f.annihilation_matrix(i, a, 1).unwrap().matrix;
                for col in 0..6 {
                    let expected = if col == i * 3 + a { int(1) } else { int(0) };
                    assert_eq!(m[(0, col)], expected);
                }
            }
        }
        assert_eq!(f.two_point_matrix().unwrap(), RationalMatrix::identity(6));
    }

    #[test]
    fn sec5_creation_projects_onto_h() {
        let f = fock("example_sec5", 1, 2);
        let w2 = &f.levels()[2].space;
        assert_eq!(w2.dim(), 1);
        let basis = w2.vectors()[0].clone();
        assert_eq!(basis, sec5_h());
        let c = f.creation_matrix(0, 0, 1).unwrap().matrix;
        assert_eq!(c.row(0), &[rat(1, 3), int(0), int(0)]);
    }

    #[test]
    fn presets_pass_all_identities() {
        for (name, d, n, ex) in [
            ("boson", 1, 5, ExchangeData::bosonic(1)),
            ("boson", 2, 4, ExchangeData::bosonic(1)),
            ("fermion", 2, 3, ExchangeData::fermionic(1)),
            ("fermion", 3, 3, ExchangeData::fermionic(1)),
        ] {
            let f = fock(name, d, n);
            let r = fock_report(&f, Some(&ex)).unwrap();
            for c in &r.checks {
                assert!(c.passed, "{name} d={d}: {} — {}", c.name, c.details);
            }
            assert!(r.skipped.is_empty());
        }
    }

    #[test]
    fn wrong_statistics_fail_mixed_bracket_at_level_one() {
        let f = fock("boson", 1, 3);
        let wrong = ExchangeData::fermionic(1);
        let r = f.check(Identity::BracketMixed, Some(&wrong)).unwrap();
        assert!(!r.passed);
        let Some(Witness::Vector { input, difference, locus }) = &r.witness else {
            panic!("expected a vector witness");
        };
        assert_eq!(locus.level, Some(1));
        assert_eq!(&f.replay(&r.name, locus, input, Some(&wrong)).unwrap(), difference);
    }

    #[test]
    fn missing_tensors_are_reported() {
        let f = fock("boson", 1, 2);
        assert!(matches!(f.check(Identity::BracketMixed, None), Err(Error::MissingExchange(_))));
        let r = fock_report(&f, None).unwrap();
        assert_eq!(r.skipped.len(), 7);
    }

    #[test]
    fn windows_follow_truncation() {
        assert_eq!(Identity::BracketCreators.window(4), vec![0, 1, 2]);
        assert_eq!(Identity::BracketAnnihilators.window(4), vec![2, 3, 4]);
        assert_eq!(Identity::BracketMixed.window(4), vec![0, 1, 2, 3]);
        assert_eq!(Identity::GlAnnihilators.window(4), vec![1, 2, 3, 4]);
        assert_eq!(Identity::VacuumTwoPoint.window(4), vec![0]);
        assert!(Identity::BracketCreators.window(1).is_empty());
        for i in Identity::ALL {
            assert_eq!(Identity::from_name(i.name()), Some(i));
        }
    }

    #[test]
    fn number_operator_counts_mode_occupation() {
        let f = fock("boson", 2, 3);
        // level 2 basis: symmetric tensors; J_11 eigenvalues 2,1,0
        let j11 = &f.gld_generator(0, 0).unwrap()[2].matrix;
        assert_eq!(j11.trace(), int(3));
        let f = fock("fermion", 2, 2);
        let j11 = &f.gld_generator(0, 0).unwrap()[1].matrix;
        assert_eq!(j11, &RationalMatrix::from_i64(&[&[1, 0], &[0, 0]]));
    }
}
