//! Transfermionic / transbosonic classification of a single-mode series.
//!
//! A terminating series `G = Q_−` qualifies when every root of `Q_−` is real
//! and negative; an infinite one qualifies when `1/G` is a polynomial `Q_+`
//! with `Q_+(0) = 1` and only real positive roots. Roots are counted with
//! Sturm sequences over exact rationals, so irrational roots need no
//! special treatment. Signatures are the coefficient lists of the certifying
//! polynomial, constant term first.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactla::{kernel, Rational, RationalMatrix};
use crate::hilbert::SeriesCoeffs;
use crate::ratser;

pub const SIGNATURE_CONVENTION: &str =
    "signature lists the coefficients of the certifying polynomial, constant term first";

/// Integer polynomial, constant term first, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + Rational::from_integer(c.clone()))
    }

    fn to_rational(&self) -> Vec<Rational> {
        self.coeffs.iter().map(|c| Rational::from_integer(c.clone())).collect()
    }

    /// Primitive integer multiple of a rational polynomial with positive
    /// leading coefficient.
    fn primitive(p: &[Rational]) -> Self {
        let lcm = p
            .iter()
            .fold(BigInt::one(), |acc, c| num_integer::lcm(acc, c.denom().clone()));
        let ints: Vec<BigInt> = p.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| num_integer::gcd(acc, c.clone()));
        if g.is_zero() {
            return IntPoly::default();
        }
        let sign = if ints.iter().rev().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        IntPoly::new(ints.into_iter().map(|c| c / &g * &sign).collect())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(ToString::to_string).collect()
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_strings().join(","))
    }
}

impl Serialize for IntPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| s.trim().parse::<BigInt>().map_err(serde::de::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(IntPoly::new)
    }
}

// ---- rational polynomial helpers (constant term first, trimmed) ----

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn derivative(p: &[Rational]) -> Vec<Rational> {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
            .collect(),
    )
}

fn rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = trim(a.to_vec());
    let lead = b.last().expect("nonzero divisor").clone();
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let factor = r.last().unwrap() / &lead;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &factor * c;
        }
        r.pop();
        r = trim(r);
    }
    r
}

fn div_exact(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = trim(a.to_vec());
    let lead = b.last().expect("nonzero divisor").clone();
    let mut q = vec![Rational::zero(); r.len().saturating_sub(b.len()) + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let factor = r.last().unwrap() / &lead;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &factor * c;
        }
        q[shift] = factor;
        r.pop();
        r = trim(r);
    }
    trim(q)
}

fn gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

fn eval_rat(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

fn sturm_sequence(p: &[Rational]) -> Vec<Vec<Rational>> {
    let mut seq = vec![trim(p.to_vec())];
    let d = derivative(p);
    if d.is_empty() {
        return seq;
    }
    seq.push(d);
    loop {
        let n = seq.len();
        let r = rem(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    seq
}

fn sign_changes(seq: &[Vec<Rational>], x: &Rational) -> usize {
    let signs: Vec<bool> = seq
        .iter()
        .map(|p| eval_rat(p, x))
        .filter(|v| !v.is_zero())
        .map(|v| v.is_positive())
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn square_free(p: &[Rational]) -> Vec<Rational> {
    let g = gcd(p, &derivative(p));
    if g.len() <= 1 {
        trim(p.to_vec())
    } else {
        div_exact(p, &g)
    }
}

fn check_interval(p: &IntPoly, lo: &Rational, hi: &Rational) -> Result<()> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if lo >= hi {
        return Err(Error::InvalidInterval(format!("need lo < hi, got ({lo}, {hi}]")));
    }
    Ok(())
}

/// Number of distinct real roots of `p` in `(lo, hi]`.
pub fn sturm_real_root_count(p: &IntPoly, lo: &Rational, hi: &Rational) -> Result<usize> {
    check_interval(p, lo, hi)?;
    let seq = sturm_sequence(&square_free(&p.to_rational()));
    Ok(sign_changes(&seq, lo) - sign_changes(&seq, hi))
}

/// One level of the multiplicity tower `p, gcd(p,p′), …`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SturmLevel {
    /// Square-free part of this level's polynomial, as a primitive integer
    /// polynomial.
    pub square_free: IntPoly,
    pub changes_lo: usize,
    pub changes_hi: usize,
}

/// Root count with multiplicity, with the sign-variation data that
/// produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootCertificate {
    pub polynomial: IntPoly,
    #[serde(with = "ratstr")]
    pub lo: Rational,
    #[serde(with = "ratstr")]
    pub hi: Rational,
    pub levels: Vec<SturmLevel>,
    pub roots_in_interval: usize,
    pub degree: usize,
}

mod ratstr {
    use super::*;
    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        ratser::to_string(r).serialize(s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        ratser::parse(&String::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl RootCertificate {
    /// Counts roots of `p` in `(lo, hi]` with multiplicity: a root of
    /// multiplicity `m` is a simple root of the square-free parts of the
    /// first `m` members of `p, gcd(p,p′), gcd(that, its derivative), …`.
    pub fn compute(p: &IntPoly, lo: &Rational, hi: &Rational) -> Result<Self> {
        check_interval(p, lo, hi)?;
        let mut levels = Vec::new();
        let mut cur = p.to_rational();
        while cur.len() > 1 {
            let sf = square_free(&cur);
            let seq = sturm_sequence(&sf);
            levels.push(SturmLevel {
                square_free: IntPoly::primitive(&sf),
                changes_lo: sign_changes(&seq, lo),
                changes_hi: sign_changes(&seq, hi),
            });
            cur = gcd(&cur, &derivative(&cur));
        }
        let roots_in_interval = levels.iter().map(|l| l.changes_lo - l.changes_hi).sum();
        Ok(RootCertificate {
            polynomial: p.clone(),
            lo: lo.clone(),
            hi: hi.clone(),
            levels,
            roots_in_interval,
            degree: p.degree().unwrap_or(0),
        })
    }

    pub fn all_roots_inside(&self) -> bool {
        self.roots_in_interval == self.degree
    }

    /// Recomputes the certificate from its polynomial and interval.
    pub fn replay(&self) -> bool {
        RootCertificate::compute(&self.polynomial, &self.lo, &self.hi).as_ref() == Ok(self)
    }
}

/// Cauchy bound: every root `z` satisfies `|z| < 1 + max |q_i / q_n|`.
pub fn cauchy_bound(p: &IntPoly) -> Rational {
    let lead = Rational::from_integer(p.coeffs.last().cloned().unwrap_or_else(BigInt::one));
    let max = p.coeffs[..p.coeffs.len().saturating_sub(1)]
        .iter()
        .map(|c| (Rational::from_integer(c.clone()) / &lead).abs())
        .max()
        .unwrap_or_else(Rational::zero);
    Rational::one() + max
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Transfermionic,
    Transbosonic,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub kind: Kind,
    /// `Q_−` or `Q_+`; empty when indeterminate.
    pub signature: IntPoly,
    /// e.g. `[1,3,1]_-`.
    pub signature_text: String,
    pub convention: String,
    pub series: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<RootCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl Classification {
    fn indeterminate(series: &SeriesCoeffs, reason: String) -> Self {
        Classification {
            kind: Kind::Indeterminate,
            signature: IntPoly::default(),
            signature_text: "indeterminate".into(),
            convention: SIGNATURE_CONVENTION.into(),
            series: series.coeffs.clone(),
            certificate: None,
            reason: Some(reason),
        }
    }

    /// Re-derives the certificate and the algebraic identity it rests on.
    pub fn replay(&self) -> bool {
        let Some(cert) = &self.certificate else {
            return self.kind == Kind::Indeterminate;
        };
        if !cert.replay() || !cert.all_roots_inside() || cert.polynomial != self.signature {
            return false;
        }
        let g: Vec<BigInt> = self.series.iter().map(|&c| BigInt::from(c)).collect();
        match self.kind {
            Kind::Transfermionic => {
                let n = self.signature.coeffs.len();
                g.len() > n
                    && g[..n] == self.signature.coeffs[..]
                    && g[n..].iter().all(Zero::is_zero)
                    && cert.hi.is_zero()
            }
            Kind::Transbosonic => {
                let prod = mul_trunc(&self.signature.coeffs, &g, g.len());
                prod.first().is_some_and(One::is_one)
                    && prod[1..].iter().all(Zero::is_zero)
                    && cert.lo.is_zero()
            }
            Kind::Indeterminate => false,
        }
    }
}

fn mul_trunc(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients of `1/G` up to the length of `G`; requires `G(0) = 1`.
pub fn series_inverse(g: &[BigInt]) -> Option<Vec<BigInt>> {
    if !g.first().is_some_and(One::is_one) {
        return None;
    }
    let mut inv = vec![BigInt::zero(); g.len()];
    inv[0] = BigInt::one();
    for n in 1..g.len() {
        let s: BigInt = (1..=n).map(|k| &g[k] * &inv[n - k]).sum();
        inv[n] = -s;
    }
    Some(inv)
}

pub fn classify(series: &SeriesCoeffs, max_fit_degree: usize) -> Result<Classification> {
    let coeffs: Vec<BigInt> = series.coeffs.iter().map(|&c| BigInt::from(c)).collect();
    if let Some(t) = series.terminated_at {
        return Ok(classify_terminating(series, IntPoly::new(coeffs[..t].to_vec())));
    }
    let needed = 2 * max_fit_degree + 1;
    if coeffs.len() < needed {
        return Err(Error::InsufficientCoefficients {
            needed,
            have: coeffs.len(),
        });
    }
    let Some(inv) = series_inverse(&coeffs) else {
        return Ok(Classification::indeterminate(series, "G(0) ≠ 1, so Q_+(0) = 1 is impossible".into()));
    };
    let q = IntPoly::new(inv.clone());
    let deg = q.degree().unwrap_or(0);
    if deg > max_fit_degree {
        return Ok(Classification::indeterminate(
            series,
            format!(
                "series does not terminate through degree {} and no polynomial Q_+ of degree ≤ {max_fit_degree} satisfies Q_+·G ≡ 1 mod t^{}",
                series.degree(),
                coeffs.len()
            ),
        ));
    }
    let hi = cauchy_bound(&q);
    let cert = RootCertificate::compute(&q, &Rational::zero(), &hi)?;
    if !cert.all_roots_inside() {
        return Ok(Classification::indeterminate(
            series,
            format!(
                "Q_+ = {q} has only {} of {deg} roots in (0, {hi}]",
                cert.roots_in_interval
            ),
        ));
    }
    Ok(Classification {
        kind: Kind::Transbosonic,
        signature_text: format!("{q}_+"),
        signature: q,
        convention: SIGNATURE_CONVENTION.into(),
        series: series.coeffs.clone(),
        certificate: Some(cert),
        reason: None,
    })
}

fn classify_terminating(series: &SeriesCoeffs, q: IntPoly) -> Classification {
    // dimensions are nonnegative and nonzero before the termination degree
    if q.coeffs.iter().any(|c| !c.is_positive()) {
        return Classification::indeterminate(series, format!("Q_− = {q} has a non-positive coefficient"));
    }
    let deg = q.degree().unwrap_or(0);
    let b = cauchy_bound(&q);
    let cert = RootCertificate::compute(&q, &-b.clone(), &Rational::zero())
        .expect("nonzero polynomial on a proper interval");
    if !cert.all_roots_inside() {
        return Classification::indeterminate(
            series,
            format!("Q_− = {q} has only {} of {deg} roots in (−{b}, 0]", cert.roots_in_interval),
        );
    }
    Classification {
        kind: Kind::Transfermionic,
        signature_text: format!("{q}_-"),
        signature: q,
        convention: SIGNATURE_CONVENTION.into(),
        series: series.coeffs.clone(),
        certificate: Some(cert),
        reason: None,
    }
}

/// A rational function `P/Q` with `Q(0) = 1` matching the series exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalFit {
    #[serde(with = "ratser::vec")]
    pub numerator: Vec<Rational>,
    #[serde(with = "ratser::vec")]
    pub denominator: Vec<Rational>,
    /// Highest degree at which `P ≡ Q·G` was confirmed.
    pub verified_to: usize,
}

/// Smallest-degree `P/Q` (by `deg P + deg Q`, then `deg Q`) with
/// `P ≡ Q·G mod t^{N+1}`, each degree at most `max_degree`. At least one
/// coefficient beyond the ones used to solve must confirm the fit.
pub fn rational_fit(series: &SeriesCoeffs, max_degree: usize) -> Option<RationalFit> {
    let g: Vec<Rational> = series
        .coeffs
        .iter()
        .map(|&c| Rational::from_integer(BigInt::from(c)))
        .collect();
    let n = g.len().checked_sub(1)?;
    let at = |k: isize| if k < 0 { Rational::zero() } else { g[k as usize].clone() };
    for total in 0..=2 * max_degree {
        for q_deg in 0..=total.min(max_degree) {
            let p_deg = total - q_deg;
            if p_deg > max_degree || p_deg + q_deg >= n {
                continue;
            }
            let rows: Vec<Vec<Rational>> = (p_deg + 1..=n)
                .map(|k| (0..=q_deg).map(|j| at(k as isize - j as isize)).collect())
                .collect();
            let m = RationalMatrix::from_rows(q_deg + 1, rows).ok()?;
            let ker = kernel(&m);
            let Some(v) = ker.vectors().into_iter().find(|v| !v[0].is_zero()) else {
                continue;
            };
            let q: Vec<Rational> = v.iter().map(|c| c / &v[0]).collect();
            let numerator = trim(
                (0..=p_deg)
                    .map(|k| (0..=q_deg.min(k)).map(|j| &q[j] * at((k - j) as isize)).sum())
                    .collect(),
            );
            return Some(RationalFit {
                numerator,
                denominator: trim(q),
                verified_to: n,
            });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{int, rat};

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn sturm_examples() {
        assert_eq!(sturm_real_root_count(&p(&[1, 1]), &int(-2), &int(0)).unwrap(), 1);
        assert_eq!(sturm_real_root_count(&p(&[1, 3, 1]), &int(-10), &int(0)).unwrap(), 2);
        assert_eq!(sturm_real_root_count(&p(&[1, 1, 1]), &int(-10), &int(10)).unwrap(), 0);
        assert_eq!(sturm_real_root_count(&p(&[]), &int(0), &int(1)), Err(Error::ZeroPolynomial));
        assert!(matches!(
            sturm_real_root_count(&p(&[1, 1]), &int(1), &int(0)),
            Err(Error::InvalidInterval(_))
        ));
    }

    #[test]
    fn endpoint_roots_follow_half_open_convention() {
        // roots −1 and 1
        let q = p(&[-1, 0, 1]);
        assert_eq!(sturm_real_root_count(&q, &int(-1), &int(1)).unwrap(), 1);
        assert_eq!(sturm_real_root_count(&q, &int(-2), &int(-1)).unwrap(), 1);
        assert_eq!(sturm_real_root_count(&q, &rat(-1, 2), &rat(1, 2)).unwrap(), 0);
    }

    #[test]
    fn multiplicity_tower() {
        // (1+t)^3 (1-2t)
        let q = p(&[1, 1, -3, -5, -2]);
        assert_eq!(sturm_real_root_count(&q, &int(-5), &int(5)).unwrap(), 2);
        let c = RootCertificate::compute(&q, &int(-5), &int(0)).unwrap();
        assert_eq!(c.roots_in_interval, 3);
        assert_eq!(c.levels.len(), 3);
        assert!(c.replay());
    }

    #[test]
    fn classification_examples() {
        let f = classify(&SeriesCoeffs::from_coeffs(vec![1, 1, 0, 0, 0, 0, 0]), 3).unwrap();
        assert_eq!(f.kind, Kind::Transfermionic);
        assert_eq!(f.signature_text, "[1,1]_-");

        let b = classify(&SeriesCoeffs::from_coeffs(vec![1; 7]), 3).unwrap();
        assert_eq!(b.kind, Kind::Transbosonic);
        assert_eq!(b.signature, p(&[1, -1]));
        assert_eq!(b.signature_text, "[1,-1]_+");

        let s = classify(&SeriesCoeffs::from_coeffs(vec![1, 3, 1, 0, 0]), 2).unwrap();
        assert_eq!(s.signature_text, "[1,3,1]_-");
        for c in [&f, &b, &s] {
            assert!(c.replay(), "{c:?}");
        }
    }

    #[test]
    fn indeterminate_cases_name_the_failure() {
        // 1 + t + t² has complex roots
        let c = classify(&SeriesCoeffs::from_coeffs(vec![1, 1, 1, 0]), 2).unwrap();
        assert_eq!(c.kind, Kind::Indeterminate);
        assert!(c.reason.unwrap().contains("0 of 2"));
        // Catalan numbers: not the inverse of any polynomial
        let catalan = classify(&SeriesCoeffs::from_coeffs(vec![1, 1, 2, 5, 14, 42, 132]), 3).unwrap();
        assert_eq!(catalan.kind, Kind::Indeterminate);
        // 1/(1 − t − t²): Q_+ = 1 − t − t² has a negative root
        let fib = classify(&SeriesCoeffs::from_coeffs(vec![1, 1, 2, 3, 5, 8, 13]), 3).unwrap();
        assert_eq!(fib.kind, Kind::Indeterminate);
        assert!(fib.reason.unwrap().contains("1 of 2"));
        assert_eq!(
            classify(&SeriesCoeffs::from_coeffs(vec![1, 2, 3]), 3),
            Err(Error::InsufficientCoefficients { needed: 7, have: 3 })
        );
    }

    #[test]
    fn transbosonic_with_irrational_roots() {
        // 1/(1 − 3t + t²): roots (3 ± √5)/2 > 0
        let mut g = vec![1u64, 3];
        for i in 2..9 {
            g.push(3 * g[i - 1] - g[i - 2]);
        }
        let c = classify(&SeriesCoeffs::from_coeffs(g.iter().map(|&x| x as usize).collect()), 4).unwrap();
        assert_eq!(c.signature_text, "[1,-3,1]_+");
        assert!(c.replay());
    }

    #[test]
    fn tampered_certificate_fails_replay() {
        let mut c = classify(&SeriesCoeffs::from_coeffs(vec![1, 3, 1, 0]), 2).unwrap();
        c.certificate.as_mut().unwrap().levels[0].changes_lo += 1;
        assert!(!c.replay());
        let mut c = classify(&SeriesCoeffs::from_coeffs(vec![1; 7]), 3).unwrap();
        c.series[4] = 2;
        assert!(!c.replay());
    }

    #[test]
    fn rational_fit_recovers_ratio() {
        // (1 + t)/(1 − t) = 1 + 2t + 2t² + …
        let s = SeriesCoeffs::from_coeffs(vec![1, 2, 2, 2, 2, 2]);
        let fit = rational_fit(&s, 2).unwrap();
        assert_eq!(fit.numerator, vec![int(1), int(1)]);
        assert_eq!(fit.denominator, vec![int(1), int(-1)]);
        assert_eq!(classify(&s, 2).unwrap().kind, Kind::Indeterminate);
        let fermion = rational_fit(&SeriesCoeffs::from_coeffs(vec![1, 3, 3, 1, 0, 0]), 3).unwrap();
        assert_eq!(fermion.denominator, vec![int(1)]);
    }

    #[test]
    fn signature_serializes_as_strings() {
        let c = classify(&SeriesCoeffs::from_coeffs(vec![1; 7]), 3).unwrap();
        let json = serde_json::to_value(&c).unwrap();
        assert_eq!(json["signature"], serde_json::json!(["1", "-1"]));
        assert_eq!(json["kind"], "transbosonic");
        let back: Classification = serde_json::from_value(json).unwrap();
        assert_eq!(back, c);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // products of (1 + r t) with positive integer r
            #[test]
            fn real_negative_products_are_transfermionic(rs in prop::collection::vec(1i64..6, 1..4)) {
                let mut q = vec![BigInt::one()];
                for r in &rs {
                    let mut next = vec![BigInt::zero(); q.len() + 1];
                    for (i, c) in q.iter().enumerate() {
                        next[i] += c;
                        next[i + 1] += c * r;
                    }
                    q = next;
                }
                let mut coeffs: Vec<usize> = q.iter().map(|c| c.to_string().parse().unwrap()).collect();
                coeffs.push(0);
                let c = classify(&SeriesCoeffs::from_coeffs(coeffs), 4).unwrap();
                prop_assert_eq!(c.kind, Kind::Transfermionic);
                prop_assert_eq!(c.signature.coeffs(), &q[..]);
                prop_assert!(c.replay());
            }

            // 1/∏(1 − r t): stable as the series grows
            #[test]
            fn inverse_products_are_transbosonic(rs in prop::collection::vec(1i64..4, 1..3), extra in 0usize..4) {
                let mut q = vec![BigInt::one()];
                for r in &rs {
                    let mut next = vec![BigInt::zero(); q.len() + 1];
                    for (i, c) in q.iter().enumerate() {
                        next[i] += c;
                        next[i + 1] -= c * r;
                    }
                    q = next;
                }
                let len = 2 * rs.len() + 1 + extra;
                let mut padded = q.clone();
                padded.resize(len, BigInt::zero());
                let g = series_inverse(&padded).unwrap();
                let coeffs: Vec<usize> = g.iter().map(|c| c.to_string().parse().unwrap()).collect();
                let c = classify(&SeriesCoeffs::from_coeffs(coeffs), rs.len()).unwrap();
                prop_assert_eq!(c.kind, Kind::Transbosonic);
                prop_assert_eq!(c.signature.coeffs(), &q[..]);
                prop_assert!(c.replay());
            }
        }
    }
}
