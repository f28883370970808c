//! Integer 2×2 matrices: `SL₂(ℤ)` lifts, the matrices `g_λ`, Atkin-Lehner
//! matrices `W_Q` and `h_Q`, and the decompositions used when moving a
//! Fourier expansion between cusps.

use crate::arith::{self, egcd, gcd, gcd_i};
use crate::{CoreError, Result};

/// An integer 2×2 matrix `(a b; c d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MatZ {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl MatZ {
    pub const IDENTITY: MatZ = MatZ { a: 1, b: 0, c: 0, d: 1 };
    /// S = (0 -1; 1 0)
    pub const S: MatZ = MatZ { a: 0, b: -1, c: 1, d: 0 };
    /// T = (1 1; 0 1)
    pub const T: MatZ = MatZ { a: 1, b: 1, c: 0, d: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> MatZ {
        MatZ { a, b, c, d }
    }

    pub fn det(&self) -> i64 {
        let d = self.a as i128 * self.d as i128 - self.b as i128 * self.c as i128;
        i64::try_from(d).expect("determinant overflow")
    }

    pub fn is_sl2(&self) -> bool {
        self.det() == 1
    }

    pub fn mul(&self, rhs: &MatZ) -> MatZ {
        let m = |x: i128| i64::try_from(x).expect("matrix entry overflow");
        MatZ {
            a: m(self.a as i128 * rhs.a as i128 + self.b as i128 * rhs.c as i128),
            b: m(self.a as i128 * rhs.b as i128 + self.b as i128 * rhs.d as i128),
            c: m(self.c as i128 * rhs.a as i128 + self.d as i128 * rhs.c as i128),
            d: m(self.c as i128 * rhs.b as i128 + self.d as i128 * rhs.d as i128),
        }
    }

    /// Inverse of an SL₂(ℤ) matrix.
    pub fn inv_sl2(&self) -> MatZ {
        assert!(self.is_sl2());
        MatZ::new(self.d, -self.b, -self.c, self.a)
    }

    /// T^u = (1 u; 0 1)
    pub fn t_power(u: i64) -> MatZ {
        MatZ::new(1, u, 0, 1)
    }

    pub fn reduce_mod(&self, n: u64) -> MatModN {
        MatModN::new(
            n,
            self.a.rem_euclid(n as i64) as u64,
            self.b.rem_euclid(n as i64) as u64,
            self.c.rem_euclid(n as i64) as u64,
            self.d.rem_euclid(n as i64) as u64,
        )
    }

    /// Parses "A,B,C,D".
    pub fn parse(s: &str) -> Result<MatZ> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(CoreError::Parse(format!(
                "matrix must be `A,B,C,D`, got `{s}`"
            )));
        }
        let v: Vec<i64> = parts
            .iter()
            .map(|p| {
                p.parse()
                    .map_err(|_| CoreError::Parse(format!("bad matrix entry `{p}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MatZ::new(v[0], v[1], v[2], v[3]))
    }
}

impl std::fmt::Display for MatZ {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

/// A matrix over ℤ/Nℤ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MatModN {
    pub n: u64,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl MatModN {
    pub fn new(n: u64, a: u64, b: u64, c: u64, d: u64) -> MatModN {
        assert!(n >= 1);
        MatModN {
            n,
            a: a % n,
            b: b % n,
            c: c % n,
            d: d % n,
        }
    }

    pub fn det(&self) -> u64 {
        if self.n == 1 {
            return 0;
        }
        ((self.a as i128 * self.d as i128 - self.b as i128 * self.c as i128)
            .rem_euclid(self.n as i128)) as u64
    }

    pub fn is_invertible(&self) -> bool {
        self.n == 1 || arith::is_unit(self.det(), self.n)
    }

    pub fn mul(&self, rhs: &MatModN) -> MatModN {
        assert_eq!(self.n, rhs.n);
        let n = self.n as i128;
        let m = |x: i128| (x.rem_euclid(n)) as u64;
        MatModN {
            n: self.n,
            a: m(self.a as i128 * rhs.a as i128 + self.b as i128 * rhs.c as i128),
            b: m(self.a as i128 * rhs.b as i128 + self.b as i128 * rhs.d as i128),
            c: m(self.c as i128 * rhs.a as i128 + self.d as i128 * rhs.c as i128),
            d: m(self.c as i128 * rhs.b as i128 + self.d as i128 * rhs.d as i128),
        }
    }

    /// diag(1, λ)
    pub fn diag_lambda(n: u64, lambda: u64) -> MatModN {
        MatModN::new(n, 1, 0, 0, lambda % n)
    }
}

/// Lifts a matrix of determinant 1 mod N to an honest `SL₂(ℤ)` matrix.
///
/// The bottom row is lifted to a coprime pair first (shifting by multiples
/// of N), then the top row is completed through the extended gcd; any valid
/// lift is acceptable for the slash action on level-N forms.
pub fn sl2_lift(m: &MatModN) -> Result<MatZ> {
    let n = m.n;
    if n == 1 {
        return Ok(MatZ::IDENTITY);
    }
    if m.det() != 1 {
        return Err(CoreError::BadMatrix(format!(
            "determinant {} is not 1 mod {}",
            m.det(),
            n
        )));
    }
    // lift (c, d) to coprime integers congruent mod N
    let mut c = m.c as i64;
    let d0 = m.d as i64;
    let n_i = n as i64;
    if c == 0 {
        c = n_i;
    }
    let mut d = d0;
    let mut found = false;
    for t in 0..(4 * n_i + 4) {
        d = d0 + t * n_i;
        if gcd(c.unsigned_abs(), d.unsigned_abs()) == 1 {
            found = true;
            break;
        }
    }
    if !found {
        return Err(CoreError::BadMatrix(format!(
            "could not lift bottom row ({}, {}) mod {}",
            m.c, m.d, n
        )));
    }
    // complete (x, y) with x*d - y*c = 1, then slide by k*(c, d) to hit the
    // required congruence class of the top row
    let (g, x0, y0) = egcd(d, -c);
    debug_assert_eq!(g, 1);
    for k in 0..n_i {
        let a = x0 + k * c;
        let b = y0 + k * d;
        if a.rem_euclid(n_i) as u64 == m.a && b.rem_euclid(n_i) as u64 == m.b {
            let g = MatZ::new(a, b, c, d);
            debug_assert!(g.is_sl2());
            return Ok(g);
        }
    }
    Err(CoreError::BadMatrix(format!(
        "no SL2 completion found for {m:?}"
    )))
}

/// An `SL₂(ℤ)` lift of `(A, λB; λ⁻¹C, D)` mod N.
///
/// Satisfies `g·diag(1,λ) ≡ diag(1,λ)·g_λ (mod N)`, which is what makes
/// the Galois action and the slash action commute past each other.
pub fn g_lambda(g: &MatZ, lambda: u64, n: u64) -> Result<MatZ> {
    if n == 1 {
        return Ok(*g);
    }
    if !arith::is_unit(lambda, n) {
        return Err(CoreError::NotAUnit {
            lambda: lambda % n,
            modulus: n,
        });
    }
    let lam = lambda % n;
    let lam_inv = arith::inv_mod(lam, n).unwrap();
    let gm = g.reduce_mod(n);
    let target = MatModN::new(
        n,
        gm.a,
        (gm.b as u128 * lam as u128 % n as u128) as u64,
        (gm.c as u128 * lam_inv as u128 % n as u128) as u64,
        gm.d,
    );
    sl2_lift(&target)
}

/// The congruence `g·diag(1,λ) ≡ diag(1,λ)·g_λ (mod N)`.
pub fn g_lambda_congruence_holds(g: &MatZ, g_lam: &MatZ, lambda: u64, n: u64) -> bool {
    let lhs = g.reduce_mod(n).mul(&MatModN::diag_lambda(n, lambda));
    let rhs = MatModN::diag_lambda(n, lambda).mul(&g_lam.reduce_mod(n));
    lhs == rhs
}

/// Atkin-Lehner matrices for a maximal divisor Q of N:
/// `W_Q = (Qx y; Nz Qw)` of determinant Q with `x ≡ 1 (mod N/Q)` and
/// `y ≡ 1 (mod Q)`, together with `h_Q = (x y; (N/Q)z Qw) ∈ SL₂(ℤ)`
/// satisfying `W_Q = h_Q · diag(Q, 1)`.
pub fn atkin_lehner_matrices(q: u64, n: u64) -> Result<(MatZ, MatZ)> {
    if q == 0 || n % q != 0 || gcd(q, n / q) != 1 {
        return Err(CoreError::BadMatrix(format!(
            "Q = {q} is not a maximal divisor of N = {n}"
        )));
    }
    let r = (n / q) as i64;
    let qi = q as i64;
    // x = 1, y = 1; solve Q*w - (N/Q)*z = 1
    let (g, w, z_neg) = egcd(qi, r);
    debug_assert_eq!(g, 1);
    let (w, z) = (w, -z_neg);
    let h = MatZ::new(1, 1, r * z, qi * w);
    if !h.is_sl2() {
        return Err(CoreError::BadMatrix(format!(
            "h_Q construction failed for Q={q}, N={n}"
        )));
    }
    let wq = h.mul(&MatZ::new(qi, 0, 0, 1));
    debug_assert_eq!(wq.det(), qi);
    Ok((wq, h))
}

/// Factorization used to move an expansion across an Atkin-Lehner operator:
/// returns `g″ ∈ SL₂(ℤ)` and an upper-triangular matrix of determinant Q
/// with `diag(Q,1) · g = g″ · upper` exactly over ℤ.
pub fn wq_g_decomposition(g: &MatZ, q: u64, n: u64) -> Result<(MatZ, MatZ)> {
    if q == 0 || n % q != 0 || gcd(q, n / q) != 1 {
        return Err(CoreError::BadMatrix(format!(
            "Q = {q} is not a maximal divisor of N = {n}"
        )));
    }
    if !g.is_sl2() {
        return Err(CoreError::BadMatrix("g must be in SL2(Z)".into()));
    }
    let qi = q as i64;
    let g0 = gcd_i(g.c, q) as i64;
    let top = g.a * qi / g0;
    let bot = g.c / g0;
    if gcd(top.unsigned_abs(), bot.unsigned_abs()) != 1 {
        return Err(CoreError::BadMatrix(format!(
            "AQ/g0 = {top} and C/g0 = {bot} are not coprime"
        )));
    }
    // r*top - s*bot = 1, canonical representative 0 <= s < |bot| when bot != 0
    let (gg, r0, s0) = egcd(top, -bot);
    debug_assert_eq!(gg, 1);
    let (mut r, mut s);
    if bot != 0 {
        // family: (r + k*bot, s + k*top)
        let k = -(s0.div_euclid(bot.abs())) * bot.signum();
        r = r0 + k * bot;
        s = s0 + k * top;
        if !(0 <= s && s < bot.abs()) {
            // fall back to a direct scan over the residue classes
            for kk in -2..=2i64 {
                let rr = r0 + kk * bot;
                let ss = s0 + kk * top;
                if 0 <= ss && ss < bot.abs() {
                    r = rr;
                    s = ss;
                    break;
                }
            }
        }
    } else {
        s = 0;
        r = r0;
    }
    let gpp = MatZ::new(top, s, bot, r);
    if !gpp.is_sl2() {
        return Err(CoreError::BadMatrix(format!(
            "decomposition produced det {} != 1",
            gpp.det()
        )));
    }
    let upper = MatZ::new(g0, r * g.b * qi - s * g.d, 0, qi / g0);
    let lhs = MatZ::new(qi, 0, 0, 1).mul(g);
    let rhs = gpp.mul(&upper);
    if lhs != rhs {
        return Err(CoreError::BadMatrix(
            "wq_g_decomposition identity failed".into(),
        ));
    }
    Ok((gpp, upper))
}

/// Cusp data for `α = g∞ = A/C` on `X₀(N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cusp {
    /// Numerator A of the reduced cusp g∞ = A/C.
    pub numerator: i64,
    /// Denominator entry C (0 encodes ∞).
    pub c: i64,
    /// δ = gcd(C, N), the cusp denominator class on X₀(N).
    pub delta: u64,
    /// Width of the cusp on X₀(N).
    pub width: u64,
}

/// Width on X₀(N) by the closed formula N / gcd(C², N) (fast path).
pub fn cusp_width_gamma0(n: u64, c: i64) -> u64 {
    let c2 = (c as i128 * c as i128).unsigned_abs();
    let g = if c2 == 0 {
        n
    } else {
        gcd((c2 % n as u128) as u64, n)
    };
    n / g.max(1)
}

/// Width on X₀(N) by the defining property: the least h ≥ 1 with
/// `g T^h g⁻¹ ∈ Γ₀(N)`.
pub fn cusp_width_gamma0_brute(n: u64, g: &MatZ) -> u64 {
    assert!(g.is_sl2());
    for h in 1..=n {
        let conj = g.mul(&MatZ::t_power(h as i64)).mul(&g.inv_sl2());
        if conj.c.rem_euclid(n as i64) == 0 {
            return h;
        }
    }
    n
}

/// Cusp of `g∞` on X₀(N), with the brute-force width as a debug cross-check.
pub fn cusp_of(g: &MatZ, n: u64) -> Result<Cusp> {
    if !g.is_sl2() {
        return Err(CoreError::BadMatrix("g must be in SL2(Z)".into()));
    }
    let delta = if g.c == 0 { n } else { gcd_i(g.c, n) };
    let width = cusp_width_gamma0(n, g.c);
    debug_assert_eq!(width, cusp_width_gamma0_brute(n, g));
    Ok(Cusp {
        numerator: g.a,
        c: g.c,
        delta,
        width,
    })
}

/// An `SL₂(ℤ)` matrix with `g∞ = a/c` for a reduced fraction a/c
/// (c = 0 encodes ∞).
pub fn matrix_for_cusp(a: i64, c: i64) -> Result<MatZ> {
    if a == 0 && c == 0 {
        return Err(CoreError::BadMatrix("cusp 0/0 is not a point".into()));
    }
    if gcd(a.unsigned_abs(), c.unsigned_abs()) != 1 {
        return Err(CoreError::BadMatrix(format!(
            "cusp {a}/{c} is not in lowest terms"
        )));
    }
    let (_, d, bm) = egcd(a, -c);
    let m = MatZ::new(a, bm, c, d);
    debug_assert!(m.is_sl2());
    Ok(m)
}

/// Splits an integer matrix X of positive determinant as `X = γ · U` with
/// `γ ∈ SL₂(ℤ)` and U upper-triangular with positive diagonal.  Used to
/// push a scaling matrix through the slash action.
pub fn hnf_split(x: &MatZ) -> Result<(MatZ, MatZ)> {
    let det = x.det();
    if det <= 0 {
        return Err(CoreError::BadMatrix(format!(
            "hnf_split needs positive determinant, got {det}"
        )));
    }
    let g = gcd(x.a.unsigned_abs(), x.c.unsigned_abs()) as i64;
    if g == 0 {
        return Err(CoreError::BadMatrix("zero first column".into()));
    }
    let (p, q) = (x.a / g, x.c / g);
    let (gg, u, v) = egcd(p, q);
    debug_assert_eq!(gg, 1);
    // gamma = (p, -v; q, u) has det p*u + q*v = 1
    let mut gamma = MatZ::new(p, -v, q, u);
    debug_assert!(gamma.is_sl2());
    let mut upper = gamma.inv_sl2().mul(x);
    debug_assert_eq!(upper.c, 0);
    if upper.a < 0 {
        gamma = gamma.mul(&MatZ::new(-1, 0, 0, -1));
        upper = MatZ::new(-upper.a, -upper.b, 0, -upper.d);
    }
    debug_assert!(upper.a > 0 && upper.d > 0);
    debug_assert_eq!(gamma.mul(&upper), *x);
    Ok((gamma, upper))
}
