//! Exact arithmetic in cyclotomic fields `ℚ(ζ_M)` and their abelian subfields.
//!
//! Elements are stored in the power basis `1, ζ_M, …, ζ_M^{φ(M)−1}` modulo
//! the M-th cyclotomic polynomial, which makes equality a coordinate
//! comparison.  Mixed-modulus arithmetic embeds both operands into
//! `ℚ(ζ_lcm)`; descending to a smaller modulus is a separate, explicit
//! operation that fails if the element does not lie in the subfield.
//!
//! Subfields of `ℚ(ζ_M)` are described by the subgroup of `(ℤ/Mℤ)^×` whose
//! Galois automorphisms fix them ([`AbelianFieldDescriptor`]).

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith;
use crate::{CoreError, Result};

// ---------------------------------------------------------------------------
// Cyclotomic polynomials
// ---------------------------------------------------------------------------

static CYCLO_CACHE: OnceLock<RwLock<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();

fn cache() -> &'static RwLock<HashMap<u64, Arc<Vec<BigInt>>>> {
    CYCLO_CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Coefficients of the M-th cyclotomic polynomial, constant term first.
///
/// Computed by dividing `t^M − 1` by `Φ_d` for the proper divisors `d` of M;
/// results are cached per modulus and shared across threads.
pub fn cyclotomic_poly(m: u64) -> Arc<Vec<BigInt>> {
    assert!(m >= 1, "modulus must be positive");
    if let Some(p) = cache().read().unwrap().get(&m) {
        return p.clone();
    }
    let one = BigInt::one();
    let poly = if m == 1 {
        vec![-one.clone(), one]
    } else {
        // t^m - 1
        let mut num = vec![BigInt::zero(); (m + 1) as usize];
        num[0] = -one.clone();
        num[m as usize] = one;
        for d in arith::divisors(m) {
            if d < m {
                let phi_d = cyclotomic_poly(d);
                num = int_poly_div_exact(&num, &phi_d);
            }
        }
        num
    };
    debug_assert_eq!(poly.len() as u64, arith::phi(m) + 1);
    let arc = Arc::new(poly);
    cache()
        .write()
        .unwrap()
        .entry(m)
        .or_insert_with(|| arc.clone())
        .clone()
}

/// Exact division of integer polynomials (divisor monic up to sign).
fn int_poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = den.len() - 1;
    let mut rem: Vec<BigInt> = num.to_vec();
    let nn = rem.len() - 1;
    assert!(nn >= dn);
    let lead = den[dn].clone();
    let mut quo = vec![BigInt::zero(); nn - dn + 1];
    for i in (0..=(nn - dn)).rev() {
        let c = &rem[i + dn] / &lead;
        if !c.is_zero() {
            for (j, dj) in den.iter().enumerate() {
                let t = &c * dj;
                rem[i + j] -= t;
            }
        }
        quo[i] = c;
    }
    assert!(rem.iter().all(|c| c.is_zero()), "division was not exact");
    quo
}

// ---------------------------------------------------------------------------
// Rational polynomial helpers (dense, constant term first)
// ---------------------------------------------------------------------------

fn poly_trim(v: &mut Vec<BigRational>) {
    while v.len() > 1 && v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
}

fn poly_is_zero(v: &[BigRational]) -> bool {
    v.iter().all(|c| c.is_zero())
}

/// Remainder of `a` modulo the monic integer polynomial `m`.
fn poly_rem_monic(a: &mut Vec<BigRational>, m: &[BigInt]) {
    let dm = m.len() - 1;
    while a.len() > dm {
        let deg = a.len() - 1;
        let c = a[deg].clone();
        if !c.is_zero() {
            for (j, mj) in m.iter().enumerate().take(dm) {
                let t = &c * BigRational::from(mj.clone());
                a[deg - dm + j] -= t;
            }
        }
        a.pop();
    }
    while a.len() < dm {
        a.push(BigRational::zero());
    }
}

/// Quotient and remainder for rational polynomials, divisor nonzero.
fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut b = b.to_vec();
    poly_trim(&mut b);
    assert!(!poly_is_zero(&b));
    let db = b.len() - 1;
    let lead = b[db].clone();
    let mut rem = a.to_vec();
    poly_trim(&mut rem);
    if rem.len() <= db && !(rem.len() == b.len() && db == 0) {
        if rem.len() - 1 < db {
            return (vec![BigRational::zero()], rem);
        }
    }
    let mut quo = vec![BigRational::zero(); rem.len().saturating_sub(db)];
    while !poly_is_zero(&rem) && rem.len() - 1 >= db {
        let dr = rem.len() - 1;
        let c = &rem[dr] / &lead;
        quo[dr - db] = c.clone();
        for (j, bj) in b.iter().enumerate() {
            let t = &c * bj;
            rem[dr - db + j] -= t;
        }
        poly_trim(&mut rem);
        if rem.len() == 1 && rem[0].is_zero() {
            break;
        }
    }
    if quo.is_empty() {
        quo.push(BigRational::zero());
    }
    (quo, rem)
}

// ---------------------------------------------------------------------------
// CycNumber
// ---------------------------------------------------------------------------

/// An exact element of `ℚ(ζ_M)` in the power basis modulo `Φ_M`.
#[derive(Clone)]
pub struct CycNumber {
    modulus: u64,
    coords: Vec<BigRational>,
}

impl CycNumber {
    /// Builds an element from power-basis coordinates (length must be φ(M)).
    pub fn from_coords(modulus: u64, coords: Vec<BigRational>) -> Self {
        assert_eq!(
            coords.len() as u64,
            arith::phi(modulus),
            "coordinate vector must have length phi(M)"
        );
        CycNumber { modulus, coords }
    }

    /// Builds an element from an arbitrary-degree polynomial in ζ_M,
    /// reducing modulo the cyclotomic polynomial.
    pub fn from_poly(modulus: u64, mut poly: Vec<BigRational>) -> Self {
        let phi = cyclotomic_poly(modulus);
        poly_rem_monic(&mut poly, &phi);
        CycNumber {
            modulus,
            coords: poly,
        }
    }

    pub fn zero(modulus: u64) -> Self {
        CycNumber {
            modulus,
            coords: vec![BigRational::zero(); arith::phi(modulus) as usize],
        }
    }

    pub fn one(modulus: u64) -> Self {
        let mut z = Self::zero(modulus);
        z.coords[0] = BigRational::one();
        z
    }

    pub fn from_rational(r: BigRational) -> Self {
        CycNumber {
            modulus: 1,
            coords: vec![r],
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from(BigInt::from(n)))
    }

    /// ζ_M^e as an element of ℚ(ζ_M).
    pub fn root_of_unity(modulus: u64, exp: i64) -> Self {
        let e = exp.rem_euclid(modulus as i64) as usize;
        let mut poly = vec![BigRational::zero(); e + 1];
        poly[e] = BigRational::one();
        Self::from_poly(modulus, poly)
    }

    /// ζ_M itself.
    pub fn zeta(modulus: u64) -> Self {
        Self::root_of_unity(modulus, 1)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Returns the rational value if the element is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            // constant coordinate is the rational part only if the constant
            // basis vector is 1, which holds in the power basis
            Some(self.coords[0].clone())
        } else {
            let down = self.descend(1).ok()?;
            Some(down.coords[0].clone())
        }
    }

    /// Same element viewed in ℚ(ζ_{target}) where modulus | target.
    pub fn embed(&self, target: u64) -> Result<CycNumber> {
        if target == self.modulus {
            return Ok(self.clone());
        }
        if target % self.modulus != 0 {
            return Err(CoreError::NotAMultiple {
                base: self.modulus,
                target,
            });
        }
        let stride = (target / self.modulus) as usize;
        let mut poly = vec![BigRational::zero(); (self.coords.len() - 1) * stride + 1];
        for (i, c) in self.coords.iter().enumerate() {
            if !c.is_zero() {
                poly[i * stride] = c.clone();
            }
        }
        Ok(CycNumber::from_poly(target, poly))
    }

    /// Explicit descent to ℚ(ζ_{target}) for target | modulus; errors if the
    /// element does not lie in the subfield.
    pub fn descend(&self, target: u64) -> Result<CycNumber> {
        if target == self.modulus {
            return Ok(self.clone());
        }
        if self.modulus % target != 0 {
            return Err(CoreError::NotAMultiple {
                base: target,
                target: self.modulus,
            });
        }
        let dim_t = arith::phi(target) as usize;
        let dim_s = self.coords.len();
        // columns: embeddings of the target power basis
        let mut cols = Vec::with_capacity(dim_t);
        for j in 0..dim_t {
            let b = CycNumber::root_of_unity(target, j as i64).embed(self.modulus)?;
            cols.push(b.coords);
        }
        // solve cols * x = self.coords by Gaussian elimination
        let mut aug: Vec<Vec<BigRational>> = (0..dim_s)
            .map(|r| {
                let mut row: Vec<BigRational> = cols.iter().map(|c| c[r].clone()).collect();
                row.push(self.coords[r].clone());
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut rank = 0usize;
        for col in 0..dim_t {
            let Some(pr) = (rank..dim_s).find(|&r| !aug[r][col].is_zero()) else {
                continue;
            };
            aug.swap(rank, pr);
            let inv = aug[rank][col].recip();
            for x in aug[rank].iter_mut() {
                *x *= &inv;
            }
            for r in 0..dim_s {
                if r != rank && !aug[r][col].is_zero() {
                    let f = aug[r][col].clone();
                    for c in col..=dim_t {
                        let t = &f * &aug[rank][c];
                        aug[r][c] -= t;
                    }
                }
            }
            pivots.push(col);
            rank += 1;
        }
        // consistency: rows past the rank must have zero RHS
        for row in aug.iter().skip(rank) {
            if !row[dim_t].is_zero() {
                return Err(CoreError::NotInSubfield {
                    modulus: self.modulus,
                    target,
                });
            }
        }
        let mut out = vec![BigRational::zero(); dim_t];
        for (r, &col) in pivots.iter().enumerate() {
            out[col] = aug[r][dim_t].clone();
        }
        Ok(CycNumber::from_coords(target, out))
    }

    /// Re-expresses the element in ℚ(ζ_{target}) whenever it lies there,
    /// going up to lcm and descending.
    pub fn rebase(&self, target: u64) -> Result<CycNumber> {
        if target == self.modulus {
            return Ok(self.clone());
        }
        if target % self.modulus == 0 {
            return self.embed(target);
        }
        let l = arith::lcm(self.modulus, target);
        self.embed(l)?.descend(target)
    }

    fn unify(&self, other: &CycNumber) -> (CycNumber, CycNumber) {
        if self.modulus == other.modulus {
            (self.clone(), other.clone())
        } else {
            let l = arith::lcm(self.modulus, other.modulus);
            (self.embed(l).unwrap(), other.embed(l).unwrap())
        }
    }

    pub fn add(&self, other: &CycNumber) -> CycNumber {
        let (mut a, b) = self.unify(other);
        for (x, y) in a.coords.iter_mut().zip(b.coords.iter()) {
            *x += y;
        }
        a
    }

    pub fn sub(&self, other: &CycNumber) -> CycNumber {
        let (mut a, b) = self.unify(other);
        for (x, y) in a.coords.iter_mut().zip(b.coords.iter()) {
            *x -= y;
        }
        a
    }

    pub fn neg(&self) -> CycNumber {
        let mut a = self.clone();
        for x in a.coords.iter_mut() {
            *x = -x.clone();
        }
        a
    }

    pub fn mul(&self, other: &CycNumber) -> CycNumber {
        if self.modulus == other.modulus {
            return self.mul_same_modulus(other);
        }
        let (a, b) = self.unify(other);
        a.mul_same_modulus(&b)
    }

    fn mul_same_modulus(&self, other: &CycNumber) -> CycNumber {
        let n = self.coords.len();
        if self.is_zero() || other.is_zero() {
            return CycNumber::zero(self.modulus);
        }
        // clear denominators and convolve over the integers; one rational
        // division per output coordinate at the end
        let da = self.denominator_lcm();
        let db = other.denominator_lcm();
        let ai = self.scaled_int_coords(&da);
        let bi = other.scaled_int_coords(&db);
        let mut prod = vec![BigInt::zero(); 2 * n - 1];
        for (i, a) in ai.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in bi.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        CycNumber::from_int_poly(self.modulus, prod, &(da * db))
    }

    /// lcm of the coordinate denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        let mut acc = BigInt::one();
        for c in &self.coords {
            let d = c.denom();
            if !d.is_one() {
                acc = num_integer::lcm(acc, d.clone());
            }
        }
        acc
    }

    /// Coordinates times `scale` as integers; `scale` must clear every
    /// denominator.
    pub fn scaled_int_coords(&self, scale: &BigInt) -> Vec<BigInt> {
        self.coords
            .iter()
            .map(|c| {
                if c.is_zero() {
                    BigInt::zero()
                } else {
                    c.numer() * (scale / c.denom())
                }
            })
            .collect()
    }

    /// Builds an element from an integer polynomial in ζ_M divided by a
    /// common denominator, reducing modulo the cyclotomic polynomial over
    /// the integers first.
    pub fn from_int_poly(modulus: u64, mut poly: Vec<BigInt>, den: &BigInt) -> CycNumber {
        let phi = cyclotomic_poly(modulus);
        let dm = phi.len() - 1;
        while poly.len() > dm {
            let deg = poly.len() - 1;
            let c = std::mem::take(&mut poly[deg]);
            if !c.is_zero() {
                for (j, mj) in phi.iter().enumerate().take(dm) {
                    let t = &c * mj;
                    poly[deg - dm + j] -= t;
                }
            }
            poly.pop();
        }
        while poly.len() < dm {
            poly.push(BigInt::zero());
        }
        let coords = poly
            .into_iter()
            .map(|c| {
                if c.is_zero() {
                    BigRational::zero()
                } else {
                    BigRational::new(c, den.clone())
                }
            })
            .collect();
        CycNumber {
            modulus,
            coords,
        }
    }

    pub fn scale(&self, r: &BigRational) -> CycNumber {
        let mut a = self.clone();
        for x in a.coords.iter_mut() {
            *x *= r;
        }
        a
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in
    /// ℚ[t]/(Φ_M); errors on zero.
    pub fn inv(&self) -> Result<CycNumber> {
        if self.is_zero() {
            return Err(CoreError::DivisionByZero {
                modulus: self.modulus,
            });
        }
        let phi: Vec<BigRational> = cyclotomic_poly(self.modulus)
            .iter()
            .map(|c| BigRational::from(c.clone()))
            .collect();
        let mut a = self.coords.clone();
        poly_trim(&mut a);
        // invariants: r0 = s0*a + t0*phi, r1 = s1*a + t1*phi
        let (mut r0, mut r1) = (a, phi);
        let (mut s0, mut s1) = (
            vec![BigRational::one()],
            vec![BigRational::zero()],
        );
        while !poly_is_zero(&r1) {
            let (q, r) = poly_divmod(&r0, &r1);
            let s = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            poly_trim(&mut r1);
        }
        poly_trim(&mut r0);
        assert_eq!(r0.len(), 1, "cyclotomic polynomial must be irreducible");
        let c = r0[0].recip();
        let mut inv = s0;
        for x in inv.iter_mut() {
            *x *= &c;
        }
        Ok(CycNumber::from_poly(self.modulus, inv))
    }

    pub fn div(&self, other: &CycNumber) -> Result<CycNumber> {
        Ok(self.mul(&other.inv()?))
    }

    /// Galois action σ_λ: ζ_M ↦ ζ_M^λ, for λ a unit modulo M.
    pub fn galois(&self, lambda: u64) -> Result<CycNumber> {
        let m = self.modulus;
        if m == 1 {
            return Ok(self.clone());
        }
        if !arith::is_unit(lambda, m) {
            return Err(CoreError::NotAUnit {
                lambda: lambda % m,
                modulus: m,
            });
        }
        let l = lambda % m;
        if l == 1 {
            return Ok(self.clone());
        }
        let mut poly = vec![BigRational::zero(); m as usize];
        for (i, c) in self.coords.iter().enumerate() {
            if !c.is_zero() {
                let e = (i as u64 * l % m) as usize;
                poly[e] += c;
            }
        }
        Ok(CycNumber::from_poly(m, poly))
    }

    /// Complex conjugation (σ_{−1}).
    pub fn conj(&self) -> CycNumber {
        if self.modulus <= 2 {
            self.clone()
        } else {
            self.galois(self.modulus - 1).unwrap()
        }
    }

    /// Floating-point image under ζ_M ↦ exp(2πi/M).
    pub fn to_complex(&self) -> Complex64 {
        let m = self.modulus as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let x = c.to_f64().unwrap_or(f64::NAN);
            let th = 2.0 * std::f64::consts::PI * (i as f64) / m;
            acc += Complex64::new(th.cos(), th.sin()) * x;
        }
        acc
    }

    /// Primes dividing any coordinate denominator.
    pub fn denominator_primes(&self) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        for c in &self.coords {
            let d = c.denom();
            if !d.is_one() {
                let mut d = d.to_u64().expect("denominator fits u64 at desk scale");
                let mut p = 2;
                while p * p <= d {
                    if d % p == 0 {
                        out.insert(p);
                        while d % p == 0 {
                            d /= p;
                        }
                    }
                    p += 1;
                }
                if d > 1 {
                    out.insert(d);
                }
            }
        }
        out
    }

    /// Max bit-length over coordinate numerators and denominators;
    /// a cheap height proxy for diagnostics.
    pub fn height_bits(&self) -> u64 {
        self.coords
            .iter()
            .map(|c| c.numer().bits().max(c.denom().bits()))
            .max()
            .unwrap_or(0)
    }
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    out
}

impl PartialEq for CycNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.modulus == other.modulus {
            return self.coords == other.coords;
        }
        let (a, b) = self.unify(other);
        a.coords == b.coords
    }
}

impl Eq for CycNumber {}

impl fmt::Debug for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyc({self})")
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_rat(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || CoreError::Parse(format!("invalid rational `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(n, d))
    } else {
        let n = BigInt::from_str(s).map_err(|_| bad())?;
        Ok(BigRational::from(n))
    }
}

/// Textual form `M:[r0,r1,...]` with rationals `p/q` in lowest terms.
impl fmt::Display for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.coords.iter().map(fmt_rat).collect();
        write!(f, "{}:[{}]", self.modulus, body.join(","))
    }
}

impl FromStr for CycNumber {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<CycNumber> {
        let s = s.trim();
        let bad = || CoreError::Parse(format!("invalid cyclotomic literal `{s}`"));
        let (m, rest) = s.split_once(':').ok_or_else(bad)?;
        let modulus: u64 = m.trim().parse().map_err(|_| bad())?;
        let rest = rest.trim();
        if !rest.starts_with('[') || !rest.ends_with(']') {
            return Err(bad());
        }
        let inner = &rest[1..rest.len() - 1];
        let coords: Vec<BigRational> = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(parse_rat)
                .collect::<Result<Vec<_>>>()?
        };
        if coords.len() as u64 != arith::phi(modulus) {
            return Err(CoreError::Parse(format!(
                "expected {} coordinates for modulus {}, got {}",
                arith::phi(modulus),
                modulus,
                coords.len()
            )));
        }
        Ok(CycNumber::from_coords(modulus, coords))
    }
}

// ---------------------------------------------------------------------------
// Subgroups of (Z/MZ)^× and abelian field descriptors
// ---------------------------------------------------------------------------

/// A subgroup of `(ℤ/Mℤ)^×`, stored as its full (small) element set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitSubgroup {
    modulus: u64,
    elems: BTreeSet<u64>,
}

impl UnitSubgroup {
    /// Closure of a generating set under multiplication mod M.
    pub fn from_generators(modulus: u64, gens: &[u64]) -> Result<UnitSubgroup> {
        if modulus == 1 {
            return Ok(UnitSubgroup {
                modulus,
                elems: BTreeSet::from([0]),
            });
        }
        let mut elems = BTreeSet::from([1u64]);
        for &g in gens {
            if !arith::is_unit(g, modulus) {
                return Err(CoreError::NotAUnit {
                    lambda: g % modulus,
                    modulus,
                });
            }
        }
        let mut frontier: Vec<u64> = vec![1];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = x * (g % modulus) % modulus;
                if elems.insert(y) {
                    frontier.push(y);
                }
            }
        }
        Ok(UnitSubgroup { modulus, elems })
    }

    pub fn from_elements(modulus: u64, elems: impl IntoIterator<Item = u64>) -> UnitSubgroup {
        let set: Vec<u64> = elems.into_iter().collect();
        Self::from_generators(modulus, &set).expect("elements must be units")
    }

    pub fn trivial(modulus: u64) -> UnitSubgroup {
        Self::from_generators(modulus, &[]).unwrap()
    }

    pub fn full(modulus: u64) -> UnitSubgroup {
        UnitSubgroup {
            modulus,
            elems: arith::units(modulus).into_iter().collect(),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        self.elems.len() as u64
    }

    /// Index in the full unit group.
    pub fn index(&self) -> u64 {
        arith::phi(self.modulus) / self.order()
    }

    pub fn contains(&self, x: u64) -> bool {
        if self.modulus == 1 {
            return true;
        }
        self.elems.contains(&(x % self.modulus))
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> + '_ {
        self.elems.iter().copied()
    }

    pub fn is_full(&self) -> bool {
        self.order() == arith::phi(self.modulus)
    }

    /// Verifies closure under multiplication; used by invariants tests.
    pub fn is_closed(&self) -> bool {
        if self.modulus == 1 {
            return true;
        }
        for &a in &self.elems {
            for &b in &self.elems {
                if !self.elems.contains(&(a * b % self.modulus)) {
                    return false;
                }
            }
        }
        self.elems.contains(&1)
    }

    /// Full preimage under the reduction `(ℤ/Lℤ)^× → (ℤ/Mℤ)^×` for M | L.
    pub fn lift(&self, l: u64) -> UnitSubgroup {
        assert_eq!(l % self.modulus, 0);
        if l == self.modulus {
            return self.clone();
        }
        let elems = arith::units(l)
            .into_iter()
            .filter(|&x| self.contains(x % self.modulus.max(1)) || self.modulus == 1)
            .collect();
        UnitSubgroup { modulus: l, elems }
    }

    /// Image under reduction mod a divisor of the modulus.
    pub fn project(&self, m: u64) -> UnitSubgroup {
        assert_eq!(self.modulus % m, 0);
        if m == 1 {
            return UnitSubgroup::trivial(1);
        }
        let elems = self.elems.iter().map(|&x| x % m).collect();
        UnitSubgroup { modulus: m, elems }
    }

    /// Subgroup generated by this subgroup together with another (same modulus).
    pub fn join(&self, other: &UnitSubgroup) -> UnitSubgroup {
        assert_eq!(self.modulus, other.modulus);
        let gens: Vec<u64> = self.elems.iter().chain(other.elems.iter()).copied().collect();
        UnitSubgroup::from_generators(self.modulus, &gens).unwrap()
    }

    pub fn intersect(&self, other: &UnitSubgroup) -> UnitSubgroup {
        assert_eq!(self.modulus, other.modulus);
        UnitSubgroup {
            modulus: self.modulus,
            elems: self.elems.intersection(&other.elems).copied().collect(),
        }
    }

    /// Kernel of `(ℤ/Lℤ)^× → (ℤ/mℤ)^×` as a subgroup of modulus L.
    pub fn reduction_kernel(l: u64, m: u64) -> UnitSubgroup {
        assert_eq!(l % m, 0);
        let elems = arith::units(l)
            .into_iter()
            .filter(|&x| m == 1 || x % m == 1)
            .collect();
        UnitSubgroup { modulus: l, elems }
    }
}

/// An abelian number field inside `ℚ(ζ_M)`, described as the fixed field of
/// a subgroup of `(ℤ/Mℤ)^×`.
#[derive(Clone, Debug)]
pub struct AbelianFieldDescriptor {
    modulus: u64,
    stabilizer: UnitSubgroup,
}

impl AbelianFieldDescriptor {
    pub fn new(modulus: u64, stabilizer: UnitSubgroup) -> Self {
        assert_eq!(stabilizer.modulus(), modulus);
        AbelianFieldDescriptor { modulus, stabilizer }
    }

    /// The rationals.
    pub fn rationals() -> Self {
        AbelianFieldDescriptor {
            modulus: 1,
            stabilizer: UnitSubgroup::trivial(1),
        }
    }

    /// The full cyclotomic field ℚ(ζ_n).
    pub fn cyclotomic(n: u64) -> Self {
        AbelianFieldDescriptor {
            modulus: n,
            stabilizer: UnitSubgroup::trivial(n),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn stabilizer(&self) -> &UnitSubgroup {
        &self.stabilizer
    }

    /// Degree over ℚ.
    pub fn degree(&self) -> u64 {
        self.stabilizer.index()
    }

    /// The same field described inside ℚ(ζ_L) for modulus | L.
    pub fn lift(&self, l: u64) -> AbelianFieldDescriptor {
        AbelianFieldDescriptor {
            modulus: l,
            stabilizer: self.stabilizer.lift(l),
        }
    }

    /// Adjoins ζ_n: the compositum with ℚ(ζ_n).
    pub fn adjoin_zeta(&self, n: u64) -> AbelianFieldDescriptor {
        let l = arith::lcm(self.modulus, n);
        let lifted = self.stabilizer.lift(l);
        let ker = UnitSubgroup::reduction_kernel(l, n);
        AbelianFieldDescriptor {
            modulus: l,
            stabilizer: lifted.intersect(&ker),
        }
    }

    /// Compositum with another abelian field.
    pub fn compositum(&self, other: &AbelianFieldDescriptor) -> AbelianFieldDescriptor {
        let l = arith::lcm(self.modulus, other.modulus);
        AbelianFieldDescriptor {
            modulus: l,
            stabilizer: self.stabilizer.lift(l).intersect(&other.stabilizer.lift(l)),
        }
    }

    /// Membership test for an exact cyclotomic value.
    pub fn contains(&self, v: &CycNumber) -> bool {
        let l = arith::lcm(self.modulus, v.modulus());
        let lifted = self.stabilizer.lift(l);
        let v = v.embed(l).expect("lcm embedding");
        let ok = lifted
            .elements()
            .all(|lam| l == 1 || v.galois(lam).unwrap() == v);
        ok
    }

    /// True if this field is contained in `other`.
    pub fn is_subfield_of(&self, other: &AbelianFieldDescriptor) -> bool {
        let l = arith::lcm(self.modulus, other.modulus);
        let a = self.stabilizer.lift(l);
        let b = other.stabilizer.lift(l);
        let ok = b.elements().all(|x| a.contains(x));
        ok
    }

    /// Field equality (independent of the ambient modulus).
    pub fn same_field(&self, other: &AbelianFieldDescriptor) -> bool {
        self.is_subfield_of(other) && other.is_subfield_of(self)
    }
}

impl PartialEq for AbelianFieldDescriptor {
    fn eq(&self, other: &Self) -> bool {
        self.same_field(other)
    }
}

impl fmt::Display for AbelianFieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 1 {
            return write!(f, "Q");
        }
        if self.stabilizer.order() == 1 {
            return write!(f, "Q(zeta_{})", self.modulus);
        }
        let gens: Vec<String> = self.stabilizer.elements().map(|x| x.to_string()).collect();
        write!(
            f,
            "fixed field of {{{}}} in Q(zeta_{}) (degree {})",
            gens.join(","),
            self.modulus,
            self.degree()
        )
    }
}

/// The exact field generated by a list of values inside ℚ(ζ_M), as the
/// descriptor (M, H) with H the joint Galois stabilizer.
pub fn field_of(values: &[CycNumber], m: u64) -> Result<AbelianFieldDescriptor> {
    let embedded: Vec<CycNumber> = values
        .iter()
        .map(|v| v.rebase(m))
        .collect::<Result<Vec<_>>>()?;
    if m == 1 {
        return Ok(AbelianFieldDescriptor::rationals());
    }
    let elems: Vec<u64> = arith::units(m)
        .into_iter()
        .filter(|&lam| {
            embedded
                .iter()
                .all(|v| v.galois(lam).expect("unit") == *v)
        })
        .collect();
    Ok(AbelianFieldDescriptor::new(
        m,
        UnitSubgroup::from_elements(m, elems),
    ))
}

/// The subgroup `G' ⊆ (ℤ/m'ℤ)^×` corresponding to `K ∩ ℚ(ζ_{m'})` for an
/// abelian field K: lift the stabilizer to lcm, join with the reduction
/// kernel, project to modulus m'.
pub fn intersect_with_cyclotomic(field: &AbelianFieldDescriptor, m_prime: u64) -> UnitSubgroup {
    let l = arith::lcm(field.modulus(), m_prime);
    let lifted = field.stabilizer().lift(l);
    let ker = UnitSubgroup::reduction_kernel(l, m_prime);
    lifted.join(&ker).project(m_prime)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn cyclotomic_polys() {
        // Phi_1 = t - 1, Phi_4 = t^2 + 1, Phi_6 = t^2 - t + 1, Phi_9 = t^6 + t^3 + 1
        let p4 = cyclotomic_poly(4);
        assert_eq!(p4.as_ref(), &[1, 0, 1].map(BigInt::from).to_vec());
        let p6 = cyclotomic_poly(6);
        assert_eq!(p6.as_ref(), &[1, -1, 1].map(BigInt::from).to_vec());
        let p9 = cyclotomic_poly(9);
        assert_eq!(
            p9.as_ref(),
            &[1, 0, 0, 1, 0, 0, 1].map(BigInt::from).to_vec()
        );
    }

    #[test]
    fn zeta4_squared_is_minus_one() {
        let z = CycNumber::zeta(4);
        assert_eq!(z.mul(&z), CycNumber::from_integer(-1).rebase(4).unwrap());
    }

    #[test]
    fn zeta3_plus_zeta3_squared_is_minus_one() {
        let z = CycNumber::zeta(3);
        let got = z.add(&z.mul(&z));
        assert_eq!(got, CycNumber::from_integer(-1).rebase(3).unwrap());
    }

    #[test]
    fn inverse_of_one_plus_zeta5() {
        let x = CycNumber::one(5).add(&CycNumber::zeta(5));
        let inv = x.inv().unwrap();
        assert_eq!(x.mul(&inv), CycNumber::one(5));
    }

    #[test]
    fn embed_zeta3_into_6() {
        // zeta_3 = zeta_6^2 = zeta_6 - 1 in the power basis mod Phi_6
        let z3 = CycNumber::zeta(3).embed(6).unwrap();
        assert_eq!(z3.coords(), &[rat(-1, 1), rat(1, 1)]);
        // round trip back down
        assert_eq!(z3.descend(3).unwrap(), CycNumber::zeta(3));
    }

    #[test]
    fn embed_one_into_12() {
        assert_eq!(
            CycNumber::one(1).embed(12).unwrap(),
            CycNumber::one(12)
        );
    }

    #[test]
    fn embed_then_galois_identity() {
        // (zeta_4 + 1) embedded in 8 then sigma_1 = zeta_8^2 + 1
        let x = CycNumber::zeta(4).add(&CycNumber::one(4));
        let y = x.embed(8).unwrap().galois(1).unwrap();
        let want = CycNumber::root_of_unity(8, 2).add(&CycNumber::one(8));
        assert_eq!(y, want);
        // numeric agreement
        let d = (y.to_complex() - x.to_complex()).norm();
        assert!(d < 1e-12);
    }

    #[test]
    fn galois_examples() {
        let z9 = CycNumber::zeta(9);
        assert_eq!(z9.galois(2).unwrap(), CycNumber::root_of_unity(9, 2));
        let x = CycNumber::zeta(3).add(&CycNumber::from_integer(2).rebase(3).unwrap());
        let want = CycNumber::root_of_unity(3, 2).add(&CycNumber::from_integer(2).rebase(3).unwrap());
        assert_eq!(x.galois(2).unwrap(), want);
        assert!(z9.galois(3).is_err());
    }

    #[test]
    fn galois_composition_and_identity() {
        let x = CycNumber::zeta(9).add(&CycNumber::root_of_unity(9, 4).scale(&rat(3, 7)));
        assert_eq!(x.galois(1).unwrap(), x);
        let a = x.galois(2).unwrap().galois(5).unwrap();
        let b = x.galois(10 % 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn descent_rejects_outsiders() {
        let z9 = CycNumber::zeta(9);
        assert!(matches!(
            z9.descend(3),
            Err(CoreError::NotInSubfield { .. })
        ));
        // zeta_9^3 = zeta_3 does descend
        let z3 = CycNumber::root_of_unity(9, 3).descend(3).unwrap();
        assert_eq!(z3, CycNumber::zeta(3));
    }

    #[test]
    fn field_of_rationals_is_q() {
        let vals = vec![
            CycNumber::from_rational(rat(1, 2)),
            CycNumber::from_integer(-3),
        ];
        let f = field_of(&vals, 12).unwrap();
        assert_eq!(f.degree(), 1);
        assert!(f.stabilizer().is_full());
    }

    #[test]
    fn field_of_zeta8_is_everything() {
        let f = field_of(&[CycNumber::zeta(8)], 8).unwrap();
        assert_eq!(f.stabilizer().order(), 1);
        assert_eq!(f.degree(), 4);
    }

    #[test]
    fn field_of_shifted_line_degree_six() {
        // values zeta_9^2 * {1, zeta_3}: stabilizer is trivial (degree 6)
        let vals = vec![
            CycNumber::root_of_unity(9, 2),
            CycNumber::root_of_unity(9, 5),
        ];
        let f = field_of(&vals, 9).expect("embeddable");
        // independent brute force over every lambda
        let mut expect = Vec::new();
        for lam in arith::units(9) {
            if vals.iter().all(|v| v.galois(lam).unwrap() == *v) {
                expect.push(lam);
            }
        }
        assert_eq!(expect, vec![1]);
        assert_eq!(f.degree(), 6);
    }

    #[test]
    fn field_of_is_monotone() {
        let a = field_of(&[CycNumber::root_of_unity(9, 3)], 9).unwrap();
        let b = field_of(
            &[CycNumber::root_of_unity(9, 3), CycNumber::zeta(9)],
            9,
        )
        .unwrap();
        // adding values can only shrink the stabilizer
        for x in b.stabilizer().elements() {
            assert!(a.stabilizer().contains(x));
        }
    }

    #[test]
    fn intersect_level9_example() {
        // Q(zeta_3) inside modulus 9: G' = {1, 4, 7}
        let f = AbelianFieldDescriptor::cyclotomic(3);
        let g = intersect_with_cyclotomic(&f, 9);
        assert_eq!(g.elements().collect::<Vec<_>>(), vec![1, 4, 7]);
    }

    #[test]
    fn intersect_trivial_field() {
        let q = AbelianFieldDescriptor::rationals();
        let g = intersect_with_cyclotomic(&q, 12);
        assert!(g.is_full());
    }

    #[test]
    fn intersect_q8_q12_is_q4() {
        let f = AbelianFieldDescriptor::cyclotomic(8);
        let g = intersect_with_cyclotomic(&f, 12);
        // brute force: Q(zeta_8) ∩ Q(zeta_12) = Q(zeta_4), i.e. {1, 5} mod 12
        let q4 = AbelianFieldDescriptor::cyclotomic(4);
        let h = intersect_with_cyclotomic(&q4, 12);
        assert_eq!(g, UnitSubgroup::from_elements(12, [1u64, 5]));
        assert_eq!(g, h);
    }

    #[test]
    fn adjoin_zeta_and_membership() {
        let kf = AbelianFieldDescriptor::cyclotomic(3);
        let k = kf.adjoin_zeta(3); // still Q(zeta_3)
        assert!(k.same_field(&kf));
        let big = kf.adjoin_zeta(4);
        assert!(big.contains(&CycNumber::zeta(4)));
        assert!(big.contains(&CycNumber::zeta(3)));
        assert!(!big.contains(&CycNumber::zeta(9)));
        assert_eq!(big.degree(), 4);
    }

    #[test]
    fn serialization_round_trip() {
        let x = CycNumber::from_coords(6, vec![rat(-1, 2), rat(3, 7)]);
        let s = x.to_string();
        assert_eq!(s, "6:[-1/2,3/7]");
        let y: CycNumber = s.parse().unwrap();
        assert_eq!(x, y);
        // canonical strings survive a parse/print cycle byte-for-byte
        let z: CycNumber = "9:[0,1,0,0,0,0]".parse().unwrap();
        assert_eq!(z.to_string(), "9:[0,1,0,0,0,0]");
        assert_eq!(z, CycNumber::zeta(9));
    }

    #[test]
    fn poly_cache_is_shared_across_threads() {
        let handles: Vec<_> = (0..4)
            .map(|_| std::thread::spawn(|| cyclotomic_poly(105).len()))
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap() as u64, arith::phi(105) + 1);
        }
    }

    #[test]
    fn ring_axiom_spot_checks() {
        let xs = [
            CycNumber::zeta(12),
            CycNumber::root_of_unity(12, 7).scale(&rat(2, 3)),
            CycNumber::one(12).sub(&CycNumber::root_of_unity(12, 5)),
        ];
        for a in &xs {
            for b in &xs {
                assert_eq!(a.add(b), b.add(a));
                assert_eq!(a.mul(b), b.mul(a));
                for c in &xs {
                    assert_eq!(a.mul(&b.add(c)), a.mul(b).add(&a.mul(c)));
                    assert_eq!(a.add(b).add(c), a.add(&b.add(c)));
                }
            }
        }
        for a in &xs {
            if !a.is_zero() {
                assert_eq!(a.inv().unwrap().mul(a), CycNumber::one(12));
            }
        }
    }

    #[test]
    fn galois_is_ring_homomorphism() {
        let a = CycNumber::zeta(15).add(&CycNumber::root_of_unity(15, 4).scale(&rat(1, 3)));
        let b = CycNumber::root_of_unity(15, 11).sub(&CycNumber::one(15).scale(&rat(5, 2)));
        for lam in arith::units(15) {
            let lhs = a.mul(&b).galois(lam).unwrap();
            let rhs = a.galois(lam).unwrap().mul(&b.galois(lam).unwrap());
            assert_eq!(lhs, rhs);
            let lhs = a.add(&b).galois(lam).unwrap();
            let rhs = a.galois(lam).unwrap().add(&b.galois(lam).unwrap());
            assert_eq!(lhs, rhs);
        }
    }
}
