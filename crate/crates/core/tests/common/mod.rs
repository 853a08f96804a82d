#![allow(dead_code)]

use num_traits::{One, Zero};

use transtat::exactla::{kron, kron_vec, rat, unit_vector, Rational, RationalMatrix, Subspace};
use transtat::statmodel::StatModel;

/// Relation space built straight from the sector description, without the
/// projector assembly: `(e_i⊗e_j ± e_j⊗e_i) ⊗ w` rearranged into
/// `X_{iα}⊗X_{jβ}` coordinates.
pub fn relation_space(model: &StatModel) -> Subspace {
    let (d, k) = (model.d(), model.k_dim());
    let n = d * k;
    let mut vs = Vec::new();
    for i in 0..d {
        for j in i..d {
            for (sign, w_space) in [(1i64, model.w_sym()), (-1, model.w_ext())] {
                if sign < 0 && i == j {
                    continue;
                }
                for w in w_space.vectors() {
                    let mut v = vec![Rational::zero(); n * n];
                    for a in 0..k {
                        for b in 0..k {
                            let c = &w[a * k + b];
                            if c.is_zero() {
                                continue;
                            }
                            v[(i * k + a) * n + (j * k + b)] += c;
                            v[(j * k + a) * n + (i * k + b)] += c * Rational::from_integer(sign.into());
                        }
                    }
                    vs.push(v);
                }
            }
        }
    }
    Subspace::from_vectors(n * n, vs).unwrap()
}

/// `dim T(V)_n / I_n` with `I_n = Σ_k V^{⊗k} ⊗ R ⊗ V^{⊗(n−k−2)}`, by
/// spanning the ideal component explicitly.
pub fn ideal_sum_dims(r: &Subspace, base: usize, n_max: usize) -> Vec<usize> {
    let mut dims = Vec::new();
    for n in 0..=n_max {
        let total = base.pow(n as u32);
        if n < 2 {
            dims.push(total);
            continue;
        }
        let mut spanning = Vec::new();
        for left in 0..=n - 2 {
            let right = n - 2 - left;
            for rv in r.vectors() {
                for l in 0..base.pow(left as u32) {
                    let lv = unit_vector(base.pow(left as u32), l);
                    let lr = kron_vec(&lv, &rv);
                    for q in 0..base.pow(right as u32) {
                        spanning.push(kron_vec(&lr, &unit_vector(base.pow(right as u32), q)));
                    }
                }
            }
        }
        let ideal = Subspace::from_vectors(total, spanning).unwrap();
        dims.push(total - ideal.dim());
    }
    dims
}

pub fn binomial(n: u64, k: u64) -> usize {
    if k > n {
        return 0;
    }
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc as usize
}

/// `h = Σ_a k_a⊗k_a` on `Q^3 ⊗ Q^3`.
pub fn h_vector() -> Vec<Rational> {
    (0..9).map(|i| if i % 4 == 0 { Rational::one() } else { Rational::zero() }).collect()
}

/// Rank-one projector `hhᵀ/3` lifted to slots `(pos, pos+1)` of `K^{⊗3}`.
pub fn q_lift(pos: usize) -> RationalMatrix {
    let h = h_vector();
    let q = RationalMatrix::outer(&h, &h).scale(&rat(1, 3));
    let id = RationalMatrix::identity(3);
    if pos == 0 {
        kron(&q, &id)
    } else {
        kron(&id, &q)
    }
}

pub fn two_sector_vector(a: usize, b: usize, sign: i64) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); 9];
    v[a * 3 + b] += Rational::one();
    v[b * 3 + a] += Rational::from_integer(sign.into());
    v
}
