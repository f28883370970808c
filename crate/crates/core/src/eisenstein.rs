//! Exact q-expansions of the level-N Eisenstein series `E^{(k)}_{a,b}`,
//! their constant terms, and the right action of `GL₂(ℤ/Nℤ)` on the index
//! pair `(a, b)`.
//!
//! For `k ≠ 2` the expansion is
//!
//! ```text
//! E^{(k)}_{a,b} = a₀ + Σ_{m,n≥1, m≡a (N)} ζ_N^{bn} n^{k−1} q^{mn/N}
//!                    + (−1)^k Σ_{m,n≥1, m≡−a (N)} ζ_N^{−bn} n^{k−1} q^{mn/N}
//! ```
//!
//! and for `k = 2` only the holomorphic combination
//! `Ẽ^{(2)}_{a,b} = E^{(2)}_{a,b} − E^{(2)}_{0,0}` is exposed, whose
//! expansion carries the extra `−2 Σ n q^{mn}` term.
//!
//! Constant terms follow the classical closed forms: writing
//! `z = ζ_N^b`, weight 1 has `a₀ = 1/2 − ã/N` for `a ≠ 0` and
//! `a₀ = (1/2)(1+z)/(1−z)` for `a = 0, b ≠ 0`; higher weights iterate the
//! operator `θ = z·d/dz` on `(z+1)/(z−1)` (so that
//! `a₀ = −θ^{k−1}[(z+1)/(z−1)]/2` at `z = ζ_N^b`), with `−B_k/k` at
//! `(a,b) = (0,0)` for even `k ≥ 4`.  Every formula is gated by the
//! numerical modularity oracle in the verification suites.

use std::collections::HashMap;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith;
use crate::cyclotomic::CycNumber;
use crate::modmatrix::{MatModN, MatZ};
use crate::qseries::QExpansion;
use crate::{CoreError, Result};

/// Index data of a single Eisenstein series `E^{(k)}_{a,b}` at level N.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EisIndex {
    pub level: u64,
    pub a: u64,
    pub b: u64,
    pub weight: u32,
    /// Only meaningful (and required) for weight 2: the holomorphic
    /// combination `Ẽ^{(2)}_{a,b}`.
    pub tilde: bool,
}

impl EisIndex {
    pub fn new(level: u64, a: u64, b: u64, weight: u32) -> Result<EisIndex> {
        if weight == 0 {
            return Err(CoreError::BadInput("Eisenstein weight must be >= 1".into()));
        }
        if weight == 2 {
            return Err(CoreError::BadInput(
                "weight 2 is only exposed in tilde form; use new_tilde".into(),
            ));
        }
        Ok(EisIndex {
            level,
            a: a % level,
            b: b % level,
            weight,
            tilde: false,
        })
    }

    pub fn new_tilde(level: u64, a: u64, b: u64) -> EisIndex {
        EisIndex {
            level,
            a: a % level,
            b: b % level,
            weight: 2,
            tilde: true,
        }
    }

    /// The right action `(a, b) ↦ (a, b)·γ` for γ with unit determinant.
    pub fn slash(&self, gamma: &MatModN) -> EisIndex {
        assert_eq!(gamma.n, self.level);
        let n = self.level as u128;
        let a = ((self.a as u128 * gamma.a as u128 + self.b as u128 * gamma.c as u128) % n) as u64;
        let b = ((self.a as u128 * gamma.b as u128 + self.b as u128 * gamma.d as u128) % n) as u64;
        EisIndex {
            level: self.level,
            a,
            b,
            weight: self.weight,
            tilde: self.tilde,
        }
    }
}

/// Bernoulli number B_k (B_1 = −1/2 convention).
pub fn bernoulli(k: u32) -> BigRational {
    let mut b: Vec<BigRational> = Vec::with_capacity(k as usize + 1);
    for m in 0..=k as usize {
        // B_m = -(1/(m+1)) * Σ_{j<m} C(m+1, j) B_j
        let mut acc = BigRational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += bj * BigRational::from_integer(binomial(m as u64 + 1, j as u64));
        }
        let bm = if m == 0 {
            BigRational::one()
        } else {
            -acc / BigRational::from_integer(BigInt::from(m as u64 + 1))
        };
        b.push(bm);
    }
    b[k as usize].clone()
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// θ^{k−1} applied to (z+1)/(z−1), returned as (P, j) with the value
/// P(z)/(z−1)^j.  θ = z d/dz maps P/(z−1)^j to (z P'(z)(z−1) − j z P)/(z−1)^{j+1}.
fn theta_iterate(k: u32) -> (Vec<BigInt>, u32) {
    let mut p: Vec<BigInt> = vec![BigInt::one(), BigInt::one()]; // z + 1
    let mut j = 1u32;
    for _ in 1..k {
        // derivative
        let dp: Vec<BigInt> = p
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i as u64))
            .collect();
        // z * dp * (z - 1)
        let mut t1 = vec![BigInt::zero(); dp.len() + 2];
        for (i, c) in dp.iter().enumerate() {
            t1[i + 2] += c;
            t1[i + 1] -= c;
        }
        // - j * z * p
        for (i, c) in p.iter().enumerate() {
            t1[i + 1] -= c * BigInt::from(j as u64);
        }
        while t1.len() > 1 && t1.last().map(|c| c.is_zero()).unwrap_or(false) {
            t1.pop();
        }
        p = t1;
        j += 1;
    }
    (p, j)
}

fn eval_int_poly_at(p: &[BigInt], z: &CycNumber) -> CycNumber {
    let mut acc = CycNumber::zero(z.modulus());
    for c in p.iter().rev() {
        acc = acc.mul(z);
        if !c.is_zero() {
            acc = acc.add(&CycNumber::from_rational(BigRational::from(c.clone())).rebase(z.modulus()).unwrap());
        }
    }
    acc
}

/// Exact constant term `a₀` of the (tilde-normalized for weight 2) series.
pub fn eis_constant_term(idx: &EisIndex) -> Result<CycNumber> {
    check_index(idx)?;
    let n = idx.level;
    let k = idx.weight;
    if idx.tilde {
        // a₀(Ẽ) = a₀(E_{a,b}) − a₀(E_{0,0}) with a₀(E_{0,0}) = −B₂/2 = −1/12
        if idx.a == 0 && idx.b == 0 {
            return Ok(CycNumber::zero(n));
        }
        let base = if idx.a != 0 {
            CycNumber::zero(n)
        } else {
            // z/(z−1)²
            let z = CycNumber::root_of_unity(n, idx.b as i64);
            let den = z.sub(&CycNumber::one(n));
            z.div(&den.mul(&den))?
        };
        let twelfth = CycNumber::from_rational(BigRational::new(1.into(), 12.into()))
            .rebase(n)
            .unwrap();
        return Ok(base.add(&twelfth));
    }
    if idx.a == 0 && idx.b == 0 {
        return Ok(if k % 2 == 1 {
            CycNumber::zero(n)
        } else {
            // −B_k / k
            CycNumber::from_rational(
                -bernoulli(k) / BigRational::from_integer(BigInt::from(k as u64)),
            )
            .rebase(n)
            .unwrap()
        });
    }
    if idx.a != 0 {
        if k == 1 {
            // 1/2 − ã/N for the representative 0 < ã < N
            return Ok(CycNumber::from_rational(
                BigRational::new(1.into(), 2.into())
                    - BigRational::new(BigInt::from(idx.a), BigInt::from(n)),
            )
            .rebase(n)
            .unwrap());
        }
        return Ok(CycNumber::zero(n));
    }
    // a = 0, b ≠ 0: −(1/2) θ^{k−1}[(z+1)/(z−1)] at z = ζ_N^b
    let z = CycNumber::root_of_unity(n, idx.b as i64);
    let (p, j) = theta_iterate(k);
    let num = eval_int_poly_at(&p, &z);
    let mut den = CycNumber::one(n);
    let zm1 = z.sub(&CycNumber::one(n));
    for _ in 0..j {
        den = den.mul(&zm1);
    }
    Ok(num
        .div(&den)?
        .scale(&BigRational::new((-1).into(), 2.into())))
}

fn check_index(idx: &EisIndex) -> Result<()> {
    if idx.weight == 0 {
        return Err(CoreError::BadInput("weight must be >= 1".into()));
    }
    if idx.weight == 2 && !idx.tilde {
        return Err(CoreError::BadInput(
            "weight-2 series are only exposed in tilde form".into(),
        ));
    }
    if idx.tilde && idx.weight != 2 {
        return Err(CoreError::BadInput("tilde only applies to weight 2".into()));
    }
    Ok(())
}

/// The q-expansion of `E^{(k)}_{a,b}` (or `Ẽ^{(2)}_{a,b}`) at width N to
/// the requested precision (coefficient count in `q^{1/N}`).
pub fn eis_expansion(idx: &EisIndex, prec: usize) -> Result<QExpansion> {
    check_index(idx)?;
    if prec < 1 {
        return Err(CoreError::PrecisionTooLow { given: prec, required: 1 });
    }
    let n = idx.level;
    let k = idx.weight;
    // accumulate integer multiples of ζ_N^e per coefficient
    let mut grid: Vec<Vec<i128>> = vec![Vec::new(); prec];
    let mut bump = |t: usize, e: u64, v: i128| {
        let row = &mut grid[t];
        if row.is_empty() {
            row.resize(n as usize, 0);
        }
        row[e as usize] += v;
    };
    let a_res = idx.a % n;
    let sign = if k % 2 == 0 { 1i128 } else { -1i128 };
    // first sum: m ≡ a, coefficient ζ^{bn} n^{k−1} at index mn
    let mut m = if a_res == 0 { n } else { a_res };
    while (m as usize) < prec {
        let mut t = m as usize;
        let mut nn = 1u64;
        while t < prec {
            bump(t, idx.b * nn % n, pow_i128(nn, k - 1));
            nn += 1;
            t += m as usize;
        }
        m += n;
    }
    // second sum: m ≡ −a, coefficient (−1)^k ζ^{−bn} n^{k−1}
    let neg_a = (n - a_res) % n;
    let mut m = if neg_a == 0 { n } else { neg_a };
    while (m as usize) < prec {
        let mut t = m as usize;
        let mut nn = 1u64;
        while t < prec {
            bump(t, (n - idx.b * nn % n) % n, sign * pow_i128(nn, k - 1));
            nn += 1;
            t += m as usize;
        }
        m += n;
    }
    if idx.tilde {
        if idx.a == 0 && idx.b == 0 {
            return Ok(QExpansion::zero(n, n, prec));
        }
        // −2 Σ_{m,n≥1} n q^{mn}: index N·mn in width N
        let mut mn = 1usize;
        while mn * (n as usize) < prec {
            let mut nn = 1u64;
            while nn as usize <= mn {
                if mn % nn as usize == 0 {
                    bump(mn * n as usize, 0, -2 * nn as i128);
                }
                nn += 1;
            }
            mn += 1;
        }
    }
    let mut coeffs = Vec::with_capacity(prec);
    coeffs.push(eis_constant_term(idx)?.rebase(n).unwrap());
    for row in grid.into_iter().skip(1) {
        if row.is_empty() || row.iter().all(|&v| v == 0) {
            coeffs.push(CycNumber::zero(n));
        } else {
            let poly: Vec<BigRational> = row
                .into_iter()
                .map(|v| BigRational::from(BigInt::from(v)))
                .collect();
            coeffs.push(CycNumber::from_poly(n, poly));
        }
    }
    Ok(QExpansion::from_coeffs(n, n, coeffs))
}

fn pow_i128(base: u64, exp: u32) -> i128 {
    let mut acc = 1i128;
    for _ in 0..exp {
        acc *= base as i128;
    }
    acc
}

// ---------------------------------------------------------------------------
// Monomials
// ---------------------------------------------------------------------------

/// A formal product of Eisenstein generators at level N, stored as a
/// canonically sorted multiset of index pairs.
///
/// For N ≥ 3 the generators are the weight-1 series `E^{(1)}_{a,b}`; for
/// N = 2 (where all weight-1 series vanish identically) they are the
/// weight-2 series `Ẽ^{(2)}_{a,b}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EisMonomial {
    level: u64,
    factors: Vec<(u64, u64)>,
}

impl EisMonomial {
    pub fn new(level: u64, mut factors: Vec<(u64, u64)>) -> EisMonomial {
        assert!(level >= 2);
        for f in factors.iter_mut() {
            f.0 %= level;
            f.1 %= level;
        }
        factors.sort_unstable();
        EisMonomial { level, factors }
    }

    pub fn one(level: u64) -> EisMonomial {
        EisMonomial {
            level,
            factors: Vec::new(),
        }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn factors(&self) -> &[(u64, u64)] {
        &self.factors
    }

    /// Weight of one generator at this level.
    pub fn generator_weight(level: u64) -> u32 {
        if level == 2 {
            2
        } else {
            1
        }
    }

    /// Total weight of the monomial.
    pub fn weight(&self) -> u32 {
        self.factors.len() as u32 * Self::generator_weight(self.level)
    }

    /// Extends the monomial by one generator.
    pub fn times(&self, a: u64, b: u64) -> EisMonomial {
        let mut factors = self.factors.clone();
        factors.push((a % self.level, b % self.level));
        EisMonomial::new(self.level, factors)
    }

    /// Index action `(aᵢ, bᵢ) ↦ (aᵢ, bᵢ)·γ` on every factor.
    pub fn slash(&self, gamma: &MatModN) -> EisMonomial {
        assert_eq!(gamma.n, self.level);
        let n = self.level as u128;
        let factors = self
            .factors
            .iter()
            .map(|&(a, b)| {
                (
                    ((a as u128 * gamma.a as u128 + b as u128 * gamma.c as u128) % n) as u64,
                    ((a as u128 * gamma.b as u128 + b as u128 * gamma.d as u128) % n) as u64,
                )
            })
            .collect();
        EisMonomial::new(self.level, factors)
    }

    fn factor_index(&self, a: u64, b: u64) -> EisIndex {
        if self.level == 2 {
            EisIndex::new_tilde(2, a, b)
        } else {
            EisIndex::new(self.level, a, b, 1).expect("weight-1 generator")
        }
    }
}

/// Shared expansion cache for monomials, keyed by the canonical factor
/// multiset; entries hold the largest precision computed so far.
#[derive(Default)]
pub struct MonomialCache {
    map: RwLock<HashMap<EisMonomial, QExpansion>>,
}

impl MonomialCache {
    pub fn new() -> MonomialCache {
        MonomialCache::default()
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Expansion of a monomial to the requested precision, computed as the
    /// product of the factor expansions and cached.
    pub fn expansion(&self, mon: &EisMonomial, prec: usize) -> Result<QExpansion> {
        if let Some(hit) = self.map.read().unwrap().get(mon) {
            if hit.prec() >= prec {
                return Ok(hit.truncate(prec));
            }
        }
        let n = mon.level;
        let exp = if mon.factors.is_empty() {
            let mut one = QExpansion::zero(n, n, prec);
            one = one.add(&QExpansion::from_coeffs(
                n,
                n,
                {
                    let mut v = vec![CycNumber::zero(n); prec];
                    v[0] = CycNumber::one(n);
                    v
                },
            ))?;
            one
        } else if mon.factors.len() == 1 {
            let (a, b) = mon.factors[0];
            eis_expansion(&mon.factor_index(a, b), prec)?
        } else {
            // peel one factor; the rest is itself a cached monomial
            let (a, b) = *mon.factors.last().unwrap();
            let rest = EisMonomial::new(n, mon.factors[..mon.factors.len() - 1].to_vec());
            let left = self.expansion(&rest, prec)?;
            let right = eis_expansion(&mon.factor_index(a, b), prec)?;
            left.mul(&right)?
        };
        let mut w = self.map.write().unwrap();
        let entry = w.entry(mon.clone()).or_insert_with(|| exp.clone());
        if entry.prec() < exp.prec() {
            *entry = exp.clone();
        }
        Ok(exp)
    }
}

/// Picks a precision large enough that the numeric tail at `Im τ ≥ im_min`
/// stays below `eps`, with a generous polynomial allowance for coefficient
/// growth.  Used by the numerical modularity oracle.
pub fn prec_for_numeric(level: u64, weight: u32, im_min: f64, eps: f64) -> usize {
    let r = (-2.0 * std::f64::consts::PI * im_min / level as f64).exp();
    let mut p = 200 * level as usize;
    loop {
        let pf = p as f64;
        let bound = pf.powi(weight as i32 + 2) * r.powf(pf) / (1.0 - r);
        if bound < eps || p > 4_000_000 {
            return p;
        }
        p *= 2;
    }
}

/// |lhs − rhs| for the modularity identity
/// `E_{(a,b)γ}(τ) = (cτ+d)^{−k} E_{a,b}(γτ)` at a sample point; the
/// expansions are evaluated numerically at the given precision.
pub fn modularity_defect(idx: &EisIndex, gamma: &MatZ, tau: Complex64, prec: usize) -> Result<f64> {
    assert!(gamma.is_sl2());
    let n = idx.level;
    let slashed = idx.slash(&gamma.reduce_mod(n));
    let lhs_series = eis_expansion(&slashed, prec)?;
    let rhs_series = eis_expansion(idx, prec)?;
    let (lhs, tail_l) = lhs_series.eval_numeric(tau, prec)?;
    let denom = Complex64::new(gamma.c as f64, 0.0) * tau + Complex64::new(gamma.d as f64, 0.0);
    let gtau = (Complex64::new(gamma.a as f64, 0.0) * tau + Complex64::new(gamma.b as f64, 0.0)) / denom;
    let (rv, tail_r) = rhs_series.eval_numeric(gtau, prec)?;
    let rhs = rv * denom.powi(-(idx.weight as i32));
    let defect = (lhs - rhs).norm();
    // report the defect only when the tails are under control
    if tail_l > 1e-12 || tail_r > 1e-12 {
        return Err(CoreError::PrecisionTooLow {
            given: prec,
            required: prec * 2,
        });
    }
    Ok(defect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::units;

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(2), BigRational::new(1.into(), 6.into()));
        assert_eq!(bernoulli(4), BigRational::new((-1).into(), 30.into()));
        assert_eq!(bernoulli(3), BigRational::zero());
        assert_eq!(bernoulli(12), BigRational::new((-691).into(), 2730.into()));
    }

    #[test]
    fn odd_weight_zero_index_vanishes() {
        for k in [1u32, 3, 5] {
            let idx = EisIndex::new(5, 0, 0, k).unwrap();
            let e = eis_expansion(&idx, 60).unwrap();
            assert!(e.is_zero(), "k = {k}");
        }
    }

    #[test]
    fn weight2_requires_tilde() {
        assert!(EisIndex::new(5, 1, 0, 2).is_err());
        let idx = EisIndex::new_tilde(5, 1, 0);
        assert!(eis_expansion(&idx, 30).is_ok());
    }

    #[test]
    fn n2_relation_tilde_sum_is_zero() {
        let prec = 120;
        let e10 = eis_expansion(&EisIndex::new_tilde(2, 1, 0), prec).unwrap();
        let e01 = eis_expansion(&EisIndex::new_tilde(2, 0, 1), prec).unwrap();
        let e11 = eis_expansion(&EisIndex::new_tilde(2, 1, 1), prec).unwrap();
        let sum = e10.add(&e01).unwrap().add(&e11).unwrap();
        assert!(sum.is_zero());
    }

    #[test]
    fn n5_weight1_against_direct_double_sum() {
        // (a,b) = (1,0): q^(1/5) has coefficient 1 (m=n=1); at q^(4/5) the
        // m ≡ −1 sum contributes (−1)·1 against +1 from (m,n) = (1,4)
        let idx = EisIndex::new(5, 1, 0, 1).unwrap();
        let prec = 40;
        let e = eis_expansion(&idx, prec).unwrap();
        assert_eq!(e.coeff(1), &CycNumber::one(5));
        assert_eq!(e.coeff(4), &CycNumber::zero(5));
        // a₀ = 1/2 − 1/5 = 3/10
        assert_eq!(
            e.coeff(0).as_rational().unwrap(),
            BigRational::new(3.into(), 10.into())
        );
        // independent oracle: literal loops over the two double sums
        for (a, b) in [(1u64, 0u64), (0, 2), (3, 4)] {
            let idx = EisIndex::new(5, a, b, 1).unwrap();
            let e = eis_expansion(&idx, prec).unwrap();
            for t in 1..prec {
                let mut want = CycNumber::zero(5);
                for m in 1..=t {
                    if t % m != 0 {
                        continue;
                    }
                    let nn = (t / m) as i64;
                    if m as u64 % 5 == a {
                        want = want.add(&CycNumber::root_of_unity(5, b as i64 * nn));
                    }
                    if m as u64 % 5 == (5 - a) % 5 {
                        want = want.sub(&CycNumber::root_of_unity(5, -(b as i64) * nn));
                    }
                }
                assert_eq!(e.coeff(t), &want, "(a,b)=({a},{b}) t={t}");
            }
        }
    }

    #[test]
    fn constant_term_weight1_a0() {
        // a = 0, b ≠ 0: (1/2)(1+z)/(1−z)
        let idx = EisIndex::new(5, 0, 2, 1).unwrap();
        let a0 = eis_constant_term(&idx).unwrap();
        let z = CycNumber::root_of_unity(5, 2);
        let want = CycNumber::one(5)
            .add(&z)
            .div(&CycNumber::one(5).sub(&z))
            .unwrap()
            .scale(&BigRational::new(1.into(), 2.into()));
        assert_eq!(a0, want);
    }

    #[test]
    fn constant_term_even_weight_zero_index() {
        // E^{(4)}_{0,0} has a₀ = −B₄/4 = 1/120, and 2σ₃ above
        let idx = EisIndex::new(1, 0, 0, 4).unwrap();
        let e = eis_expansion(&idx, 8).unwrap();
        assert_eq!(
            e.coeff(0).as_rational().unwrap(),
            BigRational::new(1.into(), 120.into())
        );
        assert_eq!(e.coeff(1).as_rational().unwrap(), BigRational::from_integer(2.into()));
        assert_eq!(e.coeff(2).as_rational().unwrap(), BigRational::from_integer(18.into()));
        assert_eq!(e.coeff(3).as_rational().unwrap(), BigRational::from_integer(56.into()));
    }

    #[test]
    fn negation_symmetry() {
        // E_{−a,−b} = (−1)^k E_{a,b}
        for n in [3u64, 5, 7] {
            for k in [1u32, 3] {
                for a in 0..n {
                    for b in 0..n {
                        let idx = EisIndex::new(n, a, b, k).unwrap();
                        let neg = EisIndex::new(n, (n - a) % n, (n - b) % n, k).unwrap();
                        let e1 = eis_expansion(&idx, 25).unwrap();
                        let e2 = eis_expansion(&neg, 25).unwrap();
                        let want = if k % 2 == 0 { e1.clone() } else { e1.neg() };
                        assert_eq!(e2, want, "N={n} k={k} a={a} b={b}");
                    }
                }
            }
        }
    }

    #[test]
    fn index_slash_examples() {
        let idx = EisIndex::new(7, 2, 3, 1).unwrap();
        let id = MatModN::new(7, 1, 0, 0, 1);
        assert_eq!(idx.slash(&id), idx);
        // diag(1, λ): (a, b) ↦ (a, λb)
        let d3 = MatModN::diag_lambda(7, 3);
        let s = idx.slash(&d3);
        assert_eq!((s.a, s.b), (2, 2)); // 3*3 = 9 ≡ 2
        // S: (a, b) ↦ (b, −a)
        let sm = MatZ::S.reduce_mod(7);
        let s = idx.slash(&sm);
        assert_eq!((s.a, s.b), (3, 5));
    }

    #[test]
    fn galois_slash_compatibility_small_levels() {
        // (E|g)^σ = E^σ|g_λ at expansion level, E^σ = E_{a,λb}
        for n in 2..=5u64 {
            let prec = 40 * n as usize;
            let weights: Vec<(u32, bool)> = if n == 2 {
                vec![(2, true)]
            } else {
                vec![(1, false), (3, false), (2, true)]
            };
            for &(k, tilde) in &weights {
                for a in 0..n {
                    for b in 0..n {
                        let idx = if tilde {
                            EisIndex::new_tilde(n, a, b)
                        } else {
                            EisIndex::new(n, a, b, k).unwrap()
                        };
                        for g in [MatZ::S, MatZ::T] {
                            for lam in units(n) {
                                let gm = g.reduce_mod(n);
                                let lhs = eis_expansion(&idx.slash(&gm), prec)
                                    .unwrap()
                                    .apply_galois(lam)
                                    .unwrap();
                                let sigma_idx = EisIndex {
                                    b: idx.b * lam % n,
                                    ..idx
                                };
                                let lam_inv = arith::inv_mod(lam, n).unwrap();
                                let g_lam = MatModN::new(
                                    n,
                                    gm.a,
                                    gm.b * lam % n,
                                    gm.c * lam_inv % n,
                                    gm.d,
                                );
                                let rhs = eis_expansion(&sigma_idx.slash(&g_lam), prec).unwrap();
                                assert_eq!(
                                    lhs.rebase_modulus(n).unwrap(),
                                    rhs,
                                    "N={n} k={k} (a,b)=({a},{b}) g={g} λ={lam}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn monomial_cache_products() {
        let cache = MonomialCache::new();
        let one = EisMonomial::one(3);
        let e = cache.expansion(&one, 10).unwrap();
        assert_eq!(e.coeff(0), &CycNumber::one(3));
        assert!(e.coeffs()[1..].iter().all(|c| c.is_zero()));

        let m = EisMonomial::new(3, vec![(1, 0)]);
        let sq = EisMonomial::new(3, vec![(1, 0), (1, 0)]);
        let e1 = cache.expansion(&m, 30).unwrap();
        let e2 = cache.expansion(&sq, 30).unwrap();
        assert_eq!(e1.mul(&e1).unwrap(), e2);
        // growing precision reuses and recomputes correctly
        let e2big = cache.expansion(&sq, 50).unwrap();
        assert_eq!(e2big.truncate(30), e2);
    }

    #[test]
    fn monomial_canonical_ordering() {
        let m1 = EisMonomial::new(5, vec![(2, 3), (1, 0)]);
        let m2 = EisMonomial::new(5, vec![(1, 0), (2, 3)]);
        assert_eq!(m1, m2);
        assert_eq!(m1.weight(), 2);
        assert_eq!(EisMonomial::one(2).times(1, 0).weight(), 2);
    }

    #[test]
    fn numeric_modularity_spot_check() {
        let idx = EisIndex::new(3, 1, 2, 3).unwrap();
        let gamma = MatZ::new(2, 1, 1, 1);
        let tau = Complex64::new(0.0, 1.0);
        let prec = prec_for_numeric(3, 3, 1.0 / 3.0, 1e-13);
        let defect = modularity_defect(&idx, &gamma, tau, prec).unwrap();
        assert!(defect < 1e-8, "defect = {defect}");
    }

    #[test]
    fn numeric_modularity_tilde_weight2() {
        let idx = EisIndex::new_tilde(4, 1, 2);
        let gamma = MatZ::new(1, 0, 1, 1);
        let tau = Complex64::new(0.5, 1.0);
        let prec = prec_for_numeric(4, 2, 0.2, 1e-13);
        let defect = modularity_defect(&idx, &gamma, tau, prec).unwrap();
        assert!(defect < 1e-8, "defect = {defect}");
    }
}
