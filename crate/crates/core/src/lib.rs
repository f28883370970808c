//! Exact computation of Fourier expansions of modular forms at the cusps.
//!
//! The crate expresses modular forms of weight `k >= 2` on congruence
//! subgroups of level `N` as polynomials in the weight-1 Eisenstein series
//! `E_{a,b}` of level `N` (which generate the graded algebra of forms on
//! `Γ(N)` in weight 2 and above, after Khuri-Makdisi).  The slash action of
//! `SL₂(ℤ)` then reduces to a right action on the index pairs `(a, b)`,
//! which makes `f |_k g` computable with exact cyclotomic coefficients.
//!
//! On top of the expansion engine sit the coefficient-field tools: for
//! `g = (A B; C D)` the coefficients of `f | g` lie in `K_f(ζ_{N'})` with
//! `N' = N / gcd(CD, N)`; with a Nebentypus character they lie on an
//! explicit line `c_{χ,g} · K_f(ζ_{N'})`, and for newforms on `Γ₀(N)` the
//! bound is exact.  The [`bounds`] module predicts, optimizes, and
//! certifies these fields; [`verify`] packages the executable checks.
//!
//! Module map:
//! - [`cyclotomic`]: exact arithmetic in `ℚ(ζ_M)`, Galois actions, abelian
//!   subfield descriptors.
//! - [`qseries`]: truncated Fourier expansions in `q^(1/w)` with cyclotomic
//!   coefficients.
//! - [`modmatrix`]: integer 2×2 matrices, `SL₂(ℤ)` lifts, `g_λ`,
//!   Atkin-Lehner matrices, cusp data.
//! - [`characters`]: Dirichlet characters, conductors, Gauss sums.
//! - [`eisenstein`]: expansions of `E^{(k)}_{a,b}` and the index action.
//! - [`engine`]: Eisenstein-monomial bases, decomposition, `f | g`.
//! - [`bounds`]: `N'`, `m'`, `χ_g`, `c_{χ,g}`, Atkin-Lehner bounds,
//!   optimizers, exact-field certification.
//! - [`formfile`]: the text format for newform input files.
//! - [`recipes`]: in-repo regeneration of the bundled newform data.
//! - [`verify`]: named verification suites used by the CLI and tests.

pub mod arith;
pub mod bounds;
pub mod characters;
pub mod cyclotomic;
pub mod eisenstein;
pub mod engine;
mod error;
pub mod formfile;
pub mod modmatrix;
pub mod qseries;
pub mod recipes;
pub mod verify;

pub use error::CoreError;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, CoreError>;
