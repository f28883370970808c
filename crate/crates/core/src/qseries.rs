//! Truncated Fourier expansions `Σ c_n q^(n/w)` with exact cyclotomic
//! coefficients.
//!
//! A series of width `w` and precision `P` is known modulo `q^(P/w)`.  All
//! series here have nonnegative exponents, so both addition and truncated
//! multiplication propagate precision by the min rule.  All coefficients
//! are kept at one common cyclotomic modulus.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith;
use crate::cyclotomic::CycNumber;
use crate::{CoreError, Result};

/// A truncated Fourier series `Σ_{n<P} c_n q^(n/w)` over `ℚ(ζ_M)`.
#[derive(Clone, PartialEq, Eq)]
pub struct QExpansion {
    width: u64,
    modulus: u64,
    coeffs: Vec<CycNumber>,
}

impl QExpansion {
    /// The zero series of the given width, coefficient modulus and precision.
    pub fn zero(width: u64, modulus: u64, prec: usize) -> QExpansion {
        assert!(width >= 1 && prec >= 1);
        QExpansion {
            width,
            modulus,
            coeffs: vec![CycNumber::zero(modulus); prec],
        }
    }

    /// Builds a series from coefficients, normalizing them to a common
    /// modulus (the lcm of `modulus` and every coefficient's own modulus).
    pub fn from_coeffs(width: u64, modulus: u64, coeffs: Vec<CycNumber>) -> QExpansion {
        assert!(!coeffs.is_empty());
        let m = coeffs
            .iter()
            .fold(modulus, |acc, c| arith::lcm(acc, c.modulus()));
        let coeffs = coeffs
            .into_iter()
            .map(|c| c.embed(m).expect("lcm embedding"))
            .collect();
        QExpansion {
            width,
            modulus: m,
            coeffs,
        }
    }

    pub fn width(&self) -> u64 {
        self.width
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn prec(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, n: usize) -> &CycNumber {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[CycNumber] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Truncates to a smaller precision.
    pub fn truncate(&self, prec: usize) -> QExpansion {
        assert!(prec >= 1 && prec <= self.prec());
        QExpansion {
            width: self.width,
            modulus: self.modulus,
            coeffs: self.coeffs[..prec].to_vec(),
        }
    }

    /// Re-expresses every coefficient in `ℚ(ζ_target)`.
    pub fn rebase_modulus(&self, target: u64) -> Result<QExpansion> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.rebase(target))
            .collect::<Result<Vec<_>>>()?;
        Ok(QExpansion {
            width: self.width,
            modulus: target,
            coeffs,
        })
    }

    fn unify(&self, other: &QExpansion) -> Result<(QExpansion, QExpansion)> {
        if self.width != other.width {
            return Err(CoreError::WidthMismatch {
                left: self.width,
                right: other.width,
            });
        }
        let m = arith::lcm(self.modulus, other.modulus);
        Ok((
            self.rebase_modulus(m).unwrap(),
            other.rebase_modulus(m).unwrap(),
        ))
    }

    pub fn add(&self, other: &QExpansion) -> Result<QExpansion> {
        let (mut a, b) = self.unify(other)?;
        let p = a.prec().min(b.prec());
        a.coeffs.truncate(p);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs.iter()) {
            *x = x.add(y);
        }
        Ok(a)
    }

    pub fn sub(&self, other: &QExpansion) -> Result<QExpansion> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> QExpansion {
        QExpansion {
            width: self.width,
            modulus: self.modulus,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    /// Truncated product; output precision is the min of the inputs.
    ///
    /// Both series are scaled to integer coordinate vectors once, the
    /// convolution runs over the integers, and each output coefficient is
    /// reduced modulo the cyclotomic polynomial and divided back at the end.
    pub fn mul(&self, other: &QExpansion) -> Result<QExpansion> {
        let (a, b) = self.unify(other)?;
        let p = a.prec().min(b.prec());
        let m = a.modulus;
        let phi = crate::arith::phi(m) as usize;
        let da = a
            .coeffs
            .iter()
            .fold(BigInt::from(1), |acc, c| num_integer::lcm(acc, c.denominator_lcm()));
        let db = b
            .coeffs
            .iter()
            .fold(BigInt::from(1), |acc, c| num_integer::lcm(acc, c.denominator_lcm()));
        let ai: Vec<Option<Vec<BigInt>>> = a.coeffs[..p]
            .iter()
            .map(|c| (!c.is_zero()).then(|| c.scaled_int_coords(&da)))
            .collect();
        let bi: Vec<Option<Vec<BigInt>>> = b.coeffs[..p]
            .iter()
            .map(|c| (!c.is_zero()).then(|| c.scaled_int_coords(&db)))
            .collect();
        let mut grid: Vec<Option<Vec<BigInt>>> = vec![None; p];
        for (i, x) in ai.iter().enumerate() {
            let Some(x) = x else { continue };
            for (j, y) in bi.iter().enumerate().take(p - i) {
                let Some(y) = y else { continue };
                let row = grid[i + j].get_or_insert_with(|| vec![BigInt::from(0); 2 * phi - 1]);
                for (u, xu) in x.iter().enumerate() {
                    if xu.is_zero() {
                        continue;
                    }
                    for (v, yv) in y.iter().enumerate() {
                        if !yv.is_zero() {
                            row[u + v] += xu * yv;
                        }
                    }
                }
            }
        }
        let den = da * db;
        let coeffs = grid
            .into_iter()
            .map(|row| match row {
                None => CycNumber::zero(m),
                Some(poly) => CycNumber::from_int_poly(m, poly, &den),
            })
            .collect();
        Ok(QExpansion {
            width: a.width,
            modulus: m,
            coeffs,
        })
    }

    pub fn scalar_mul(&self, s: &CycNumber) -> QExpansion {
        let m = arith::lcm(self.modulus, s.modulus());
        let s = s.embed(m).unwrap();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.embed(m).unwrap().mul(&s))
            .collect();
        QExpansion {
            width: self.width,
            modulus: m,
            coeffs,
        }
    }

    pub fn scalar_mul_rat(&self, s: &BigRational) -> QExpansion {
        QExpansion {
            width: self.width,
            modulus: self.modulus,
            coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect(),
        }
    }

    /// Reindexes to a width `w'` that is a multiple of the current width;
    /// the series is unchanged as a formal sum.
    pub fn rescale_width(&self, new_width: u64) -> Result<QExpansion> {
        if new_width % self.width != 0 {
            return Err(CoreError::WidthMismatch {
                left: self.width,
                right: new_width,
            });
        }
        let k = (new_width / self.width) as usize;
        if k == 1 {
            return Ok(self.clone());
        }
        let mut coeffs = vec![CycNumber::zero(self.modulus); self.prec() * k];
        for (n, c) in self.coeffs.iter().enumerate() {
            coeffs[n * k] = c.clone();
        }
        Ok(QExpansion {
            width: new_width,
            modulus: self.modulus,
            coeffs,
        })
    }

    /// Inverse of [`rescale_width`]: errors unless all coefficients away
    /// from the coarser grid vanish.
    pub fn descend_width(&self, new_width: u64) -> Result<QExpansion> {
        if self.width % new_width != 0 {
            return Err(CoreError::WidthMismatch {
                left: self.width,
                right: new_width,
            });
        }
        let k = (self.width / new_width) as usize;
        if k == 1 {
            return Ok(self.clone());
        }
        for (n, c) in self.coeffs.iter().enumerate() {
            if n % k != 0 && !c.is_zero() {
                return Err(CoreError::BadInput(format!(
                    "coefficient at q^({n}/{}) obstructs width descent",
                    self.width
                )));
            }
        }
        let coeffs: Vec<CycNumber> = self.coeffs.iter().step_by(k).cloned().collect();
        Ok(QExpansion {
            width: new_width,
            modulus: self.modulus,
            coeffs,
        })
    }

    /// Coefficientwise Galois action σ_λ; exponents untouched.
    pub fn apply_galois(&self, lambda: u64) -> Result<QExpansion> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.galois(lambda))
            .collect::<Result<Vec<_>>>()?;
        Ok(QExpansion {
            width: self.width,
            modulus: self.modulus,
            coeffs,
        })
    }

    /// The substitution τ ↦ τ + u: `c_n ↦ ζ_w^{nu} c_n`.
    pub fn apply_t_power(&self, u: i64) -> QExpansion {
        let w = self.width;
        let ur = u.rem_euclid(w as i64) as u64;
        if ur == 0 {
            return self.clone();
        }
        let m = arith::lcm(self.modulus, w);
        let mut coeffs = Vec::with_capacity(self.prec());
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                coeffs.push(CycNumber::zero(m));
            } else {
                let e = (n as u64 % w) * ur % w;
                let z = CycNumber::root_of_unity(w, e as i64);
                coeffs.push(c.embed(m).unwrap().mul(&z.embed(m).unwrap()));
            }
        }
        QExpansion {
            width: w,
            modulus: m,
            coeffs,
        }
    }

    /// The weight-k action of an upper-triangular integer matrix
    /// `(a b; 0 d)` with a, d > 0:
    ///
    /// `f |_k (a b; 0 d) = (ad)^{k/2} d^{-k} Σ c_n ζ_{wd}^{nb} q^{na/(wd)}`.
    ///
    /// The output width is `w·d`.  For odd k with `ad` not a perfect square
    /// the factor `√(ad)` cannot live in the coefficient field; it is
    /// returned as the `radicand` of the [`ScaledExpansion`].
    pub fn apply_upper_triangular(&self, a: i64, b: i64, d: i64, k: u32) -> Result<ScaledExpansion> {
        if a <= 0 || d <= 0 {
            return Err(CoreError::BadMatrix(
                "upper-triangular action needs a, d > 0".into(),
            ));
        }
        let (au, du) = (a as u64, d as u64);
        let w2 = self.width * du;
        let det = au * du;
        // (ad)^{k/2} = (ad)^{floor(k/2)} * sqrt(ad)^{k mod 2}
        let (mut rat_factor, radicand) = if k % 2 == 0 {
            (
                BigRational::from_integer(det.into()).pow((k / 2) as i32),
                1u64,
            )
        } else {
            let (s, r) = arith::squarefree_decompose(det);
            (
                BigRational::from_integer(det.into()).pow(((k - 1) / 2) as i32)
                    * BigRational::from_integer(s.into()),
                r,
            )
        };
        rat_factor /= BigRational::from_integer(du.into()).pow(k as i32);
        let m = arith::lcm(self.modulus, w2);
        let mut coeffs = vec![CycNumber::zero(m); self.prec() * au as usize];
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let idx = n * au as usize;
            let e = ((n as u64 % w2) as i64) * b;
            let z = CycNumber::root_of_unity(w2, e);
            coeffs[idx] = c.embed(m).unwrap().mul(&z.embed(m).unwrap()).scale(&rat_factor);
        }
        Ok(ScaledExpansion {
            series: QExpansion {
                width: w2,
                modulus: m,
                coeffs,
            },
            radicand,
        })
    }

    /// Floating evaluation at τ (Im τ > 0) using the first `terms`
    /// coefficients, with a tail bound from the geometric decay of
    /// `|q^{1/w}|`.  Returns `(value, tail_bound)`.
    pub fn eval_numeric(&self, tau: Complex64, terms: usize) -> Result<(Complex64, f64)> {
        if tau.im <= 0.0 {
            return Err(CoreError::BadInput("tau must be in the upper half-plane".into()));
        }
        if terms > self.prec() {
            return Err(CoreError::PrecisionTooLow {
                given: self.prec(),
                required: terms,
            });
        }
        let w = self.width as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut max_abs: f64 = 0.0;
        for (n, c) in self.coeffs.iter().enumerate().take(terms) {
            if c.is_zero() {
                continue;
            }
            let cv = c.to_complex();
            max_abs = max_abs.max(cv.norm());
            let z = Complex64::new(0.0, 2.0 * std::f64::consts::PI * (n as f64) / w) * tau;
            acc += cv * z.exp();
        }
        let r = (-2.0 * std::f64::consts::PI * tau.im / w).exp();
        let tail = if r < 1.0 {
            // coefficients of the series in scope grow at most polynomially;
            // fold a generous polynomial factor into the bound
            let p = terms as f64;
            max_abs.max(1.0) * p.powi(4) * r.powf(p) / (1.0 - r)
        } else {
            f64::INFINITY
        };
        Ok((acc, tail))
    }

    /// Serialization: header `w=<w> prec=<P> M=<M>`, then one coefficient
    /// per line in the `M:[..]` form.  Bit-exact round trip.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        writeln!(out, "w={} prec={} M={}", self.width, self.prec(), self.modulus).unwrap();
        for c in &self.coeffs {
            writeln!(out, "{c}").unwrap();
        }
        out
    }

    pub fn deserialize(s: &str) -> Result<QExpansion> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| CoreError::Parse("empty expansion file".into()))?;
        let mut w = None;
        let mut prec = None;
        let mut m = None;
        for tok in header.split_whitespace() {
            let (key, val) = tok
                .split_once('=')
                .ok_or_else(|| CoreError::Parse(format!("bad header token `{tok}`")))?;
            let v: u64 = val
                .parse()
                .map_err(|_| CoreError::Parse(format!("bad header value `{val}`")))?;
            match key {
                "w" => w = Some(v),
                "prec" => prec = Some(v as usize),
                "M" => m = Some(v),
                _ => return Err(CoreError::Parse(format!("unknown header key `{key}`"))),
            }
        }
        let (w, prec, m) = match (w, prec, m) {
            (Some(w), Some(p), Some(m)) => (w, p, m),
            _ => return Err(CoreError::Parse("incomplete expansion header".into())),
        };
        let coeffs: Vec<CycNumber> = lines
            .map(|l| l.trim().parse::<CycNumber>())
            .collect::<Result<Vec<_>>>()?;
        if coeffs.len() != prec {
            return Err(CoreError::Parse(format!(
                "expected {prec} coefficients, found {}",
                coeffs.len()
            )));
        }
        for c in &coeffs {
            if c.modulus() != m {
                return Err(CoreError::Parse(format!(
                    "coefficient modulus {} differs from header M={m}",
                    c.modulus()
                )));
            }
        }
        Ok(QExpansion {
            width: w,
            modulus: m,
            coeffs,
        })
    }

    /// Primes dividing any coefficient denominator.
    pub fn denominator_primes(&self) -> std::collections::BTreeSet<u64> {
        let mut out = std::collections::BTreeSet::new();
        for c in &self.coeffs {
            out.extend(c.denominator_primes());
        }
        out
    }
}

impl std::fmt::Debug for QExpansion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let shown: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .take(8)
            .map(|(n, c)| format!("({c}) q^({n}/{})", self.width))
            .collect();
        write!(
            f,
            "QExpansion[w={} P={} M={}]: {} + O(q^{}/{})",
            self.width,
            self.prec(),
            self.modulus,
            if shown.is_empty() { "0".into() } else { shown.join(" + ") },
            self.prec(),
            self.width
        )
    }
}

/// A series together with a symbolic `√radicand` multiplier (radicand
/// squarefree; 1 means none).  Produced by half-integral determinant powers.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledExpansion {
    pub series: QExpansion,
    pub radicand: u64,
}

impl ScaledExpansion {
    pub fn exact(series: QExpansion) -> ScaledExpansion {
        ScaledExpansion { series, radicand: 1 }
    }

    pub fn is_exact(&self) -> bool {
        self.radicand == 1
    }
}

/// Convenience: |x| for rationals in f64 (diagnostics only).
pub fn rational_abs_f64(r: &BigRational) -> f64 {
    r.abs().to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn series_from_ints(width: u64, vals: &[i64]) -> QExpansion {
        QExpansion::from_coeffs(
            width,
            1,
            vals.iter().map(|&v| CycNumber::from_integer(v)).collect(),
        )
    }

    #[test]
    fn one_plus_q_times_one_minus_q() {
        let f = series_from_ints(1, &[1, 1, 0]);
        let g = series_from_ints(1, &[1, -1, 0]);
        let h = f.mul(&g).unwrap();
        assert_eq!(h.coeff(0), &CycNumber::from_integer(1));
        assert_eq!(h.coeff(1), &CycNumber::from_integer(0));
        assert_eq!(h.coeff(2), &CycNumber::from_integer(-1));
    }

    #[test]
    fn scalar_mul_keeps_exponents() {
        // zeta_3 * q^(1/3)
        let mut f = QExpansion::zero(3, 3, 4);
        f.coeffs[1] = CycNumber::one(3);
        let g = f.scalar_mul(&CycNumber::zeta(3));
        assert_eq!(g.coeff(1), &CycNumber::zeta(3));
        assert!(g.coeff(0).is_zero() && g.coeff(2).is_zero());
    }

    #[test]
    fn width_mismatch_is_an_error() {
        let f = series_from_ints(1, &[1, 1]);
        let g = series_from_ints(2, &[1, 1]);
        assert!(matches!(f.add(&g), Err(CoreError::WidthMismatch { .. })));
    }

    #[test]
    fn rescale_width_and_back() {
        let f = series_from_ints(1, &[1, 1, 2]);
        let g = f.rescale_width(2).unwrap();
        assert_eq!(g.prec(), 6);
        assert_eq!(g.coeff(2), &CycNumber::from_integer(1));
        assert!(g.coeff(1).is_zero());
        assert_eq!(g.descend_width(1).unwrap(), f);
        assert!(f.rescale_width(3).unwrap().descend_width(2).is_err());
    }

    #[test]
    fn rescale_commutes_with_mul() {
        let f = series_from_ints(1, &[1, 2, 3, 4]);
        let g = series_from_ints(1, &[2, 0, -1, 5]);
        let lhs = f.mul(&g).unwrap().rescale_width(3).unwrap();
        let rhs = f
            .rescale_width(3)
            .unwrap()
            .mul(&g.rescale_width(3).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn galois_acts_on_coefficients() {
        let mut f = QExpansion::zero(9, 9, 3);
        f.coeffs[1] = CycNumber::zeta(9);
        let g = f.apply_galois(2).unwrap();
        assert_eq!(g.coeff(1), &CycNumber::root_of_unity(9, 2));
        assert_eq!(f.apply_galois(1).unwrap(), f);
    }

    #[test]
    fn galois_commutes_with_ring_ops() {
        let mut f = QExpansion::zero(5, 5, 6);
        f.coeffs[0] = CycNumber::zeta(5);
        f.coeffs[2] = CycNumber::root_of_unity(5, 3).scale(&rat(2, 3));
        let mut g = QExpansion::zero(5, 5, 6);
        g.coeffs[1] = CycNumber::root_of_unity(5, 2);
        g.coeffs[3] = CycNumber::one(5);
        for lam in [2u64, 3, 4] {
            let lhs = f.mul(&g).unwrap().apply_galois(lam).unwrap();
            let rhs = f
                .apply_galois(lam)
                .unwrap()
                .mul(&g.apply_galois(lam).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
            let lhs = f.add(&g).unwrap().apply_galois(lam).unwrap();
            let rhs = f
                .apply_galois(lam)
                .unwrap()
                .add(&g.apply_galois(lam).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn t_power_identities() {
        let mut f = QExpansion::zero(4, 4, 9);
        f.coeffs[1] = CycNumber::one(4);
        f.coeffs[5] = CycNumber::zeta(4);
        assert_eq!(f.apply_t_power(0), f);
        assert_eq!(f.apply_t_power(4), f); // width periodicity
        let a = f.apply_t_power(3).apply_t_power(2);
        let b = f.apply_t_power(5);
        assert_eq!(a, b);
    }

    #[test]
    fn upper_triangular_identity_matrix() {
        let f = series_from_ints(1, &[0, 1, 2]);
        let out = f.apply_upper_triangular(1, 0, 1, 2).unwrap();
        assert!(out.is_exact());
        assert_eq!(out.series, f);
    }

    #[test]
    fn upper_triangular_doubling() {
        // f = q, (a,b,d) = (2,0,1), k = 2 → det^{k/2} = 2, output 2 q^2
        let f = series_from_ints(1, &[0, 1]);
        let out = f.apply_upper_triangular(2, 0, 1, 2).unwrap();
        assert!(out.is_exact());
        let s = out.series;
        assert_eq!(s.width(), 1);
        assert_eq!(s.prec(), 4);
        assert_eq!(s.coeff(2), &CycNumber::from_integer(2));
        assert!(s.coeff(1).is_zero());
    }

    #[test]
    fn upper_triangular_radical_for_odd_weight() {
        let f = series_from_ints(1, &[0, 1]);
        let out = f.apply_upper_triangular(2, 0, 1, 3).unwrap();
        // (ad)^{3/2} = 2·√2
        assert_eq!(out.radicand, 2);
        assert_eq!(out.series.coeff(2), &CycNumber::from_integer(2));
        let out9 = f.apply_upper_triangular(9, 0, 1, 3).unwrap();
        // 9^{3/2} = 27 exactly
        assert_eq!(out9.radicand, 1);
        assert_eq!(out9.series.coeff(9), &CycNumber::from_integer(27));
    }

    #[test]
    fn upper_triangular_b_twist() {
        // width 2, f = q^(1/2); (1 1; 0 1) in weight 2: c_1 -> zeta_2 c_1
        let mut f = QExpansion::zero(2, 1, 3);
        f.coeffs[1] = CycNumber::from_integer(1);
        let f = QExpansion::from_coeffs(2, 1, f.coeffs);
        let out = f.apply_upper_triangular(1, 1, 1, 2).unwrap().series;
        assert_eq!(out.coeff(1), &CycNumber::root_of_unity(2, 1));
        // matches apply_t_power
        assert_eq!(out, f.apply_t_power(1).rebase_modulus(2).unwrap());
    }

    #[test]
    fn eval_constant_and_q() {
        let one = series_from_ints(1, &[1, 0, 0]);
        let tau = Complex64::new(0.3, 1.0);
        let (v, tail) = one.eval_numeric(tau, 3).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(tail < 1e-2);

        let q = series_from_ints(1, &[0, 1, 0]);
        let tau = Complex64::new(0.0, 1.0);
        let (v, _) = q.eval_numeric(tau, 3).unwrap();
        let want = (-2.0 * std::f64::consts::PI).exp();
        assert!((v.re - want).abs() < 1e-12 && v.im.abs() < 1e-12);
        assert!((want - 1.8674e-3).abs() < 1e-6);
    }

    #[test]
    fn eval_rejects_lower_half_plane() {
        let f = series_from_ints(1, &[1]);
        assert!(f.eval_numeric(Complex64::new(0.0, -1.0), 1).is_err());
        assert!(f.eval_numeric(Complex64::new(0.0, 1.0), 2).is_err());
    }

    #[test]
    fn mul_only_uses_prefix_coefficients() {
        // coefficient n of f·g depends only on coefficients 0..=n
        let f = series_from_ints(1, &[1, 2, 3, 4, 5]);
        let g = series_from_ints(1, &[7, 1, -2, 1, 3]);
        let full = f.mul(&g).unwrap();
        for n in 1..5usize {
            let ft = f.truncate(n + 1);
            let gt = g.truncate(n + 1);
            let part = ft.mul(&gt).unwrap();
            for i in 0..=n {
                assert_eq!(part.coeff(i), full.coeff(i), "index {i} at cutoff {n}");
            }
        }
    }

    #[test]
    fn serialization_round_trip() {
        let mut f = QExpansion::zero(6, 6, 4);
        f.coeffs[1] = CycNumber::zeta(6);
        f.coeffs[3] = CycNumber::one(6).scale(&rat(-5, 4));
        let s = f.serialize();
        let g = QExpansion::deserialize(&s).unwrap();
        assert_eq!(f, g);
        assert_eq!(g.serialize(), s);
    }
}
