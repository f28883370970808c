//! The expansion engine: expresses modular forms as polynomials in the
//! Eisenstein generators and computes `f |_k g` exactly for `g ∈ SL₂(ℤ)`.
//!
//! The weight-1 series `E^{(1)}_{a,b}` generate every `M_k(Γ(N))` in weight
//! `k ≥ 2` (for N = 2 the three weight-2 series `Ẽ^{(2)}_{a,b}` take their
//! place).  A basis of monomial expansions is grown by rank saturation:
//! weight-k candidates are products of the saturated weight-(k−1) basis by
//! the generators, inserted into an exact row echelon until the rank hits
//! the dimension of `M_k(Γ(N))`.  Expressing a form in that basis reduces
//! the slash action to the index action `(a,b) ↦ (a,b)·g` on monomials,
//! which is where every expansion at a cusp comes from.
//!
//! Correctness of a decomposition never rests on the dimension formula: a
//! candidate combination is accepted only when its re-expansion reproduces
//! the input coefficients exactly to the declared precision, which pins the
//! form by the Sturm bound.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use crate::arith;
use crate::characters::DirichletCharacter;
use crate::cyclotomic::{field_of, AbelianFieldDescriptor, CycNumber};
use crate::eisenstein::{EisMonomial, MonomialCache};
use crate::modmatrix::{g_lambda, hnf_split, MatZ};
use crate::qseries::QExpansion;
use crate::{CoreError, Result};

// ---------------------------------------------------------------------------
// Index, dimension and Sturm data for Γ(N)
// ---------------------------------------------------------------------------

/// `[SL₂(ℤ) : Γ(N)] = N³ ∏_{p|N} (1 − p⁻²)`.
pub fn sl2_index(n: u64) -> u64 {
    let mut out = n * n * n;
    for (p, _) in arith::factorize(n) {
        out = out / (p * p) * (p * p - 1);
    }
    out
}

fn psl2_index(n: u64) -> u64 {
    if n <= 2 {
        sl2_index(n)
    } else {
        sl2_index(n) / 2
    }
}

/// Number of cusps of Γ(N).
pub fn gamma_n_cusps(n: u64) -> u64 {
    match n {
        1 => 1,
        2 => 3,
        _ => psl2_index(n) / n,
    }
}

/// Genus of X(N).
pub fn gamma_n_genus(n: u64) -> i64 {
    if n <= 2 {
        return 0;
    }
    let mu = psl2_index(n) as i64;
    1 + mu * (n as i64 - 6) / (12 * n as i64)
}

/// Dimension of `M_k(Γ(N))` for k ≥ 2 (N ≥ 1).
pub fn dim_mk_gamma(n: u64, k: u32) -> u64 {
    assert!(k >= 2, "dimension formula implemented for k >= 2");
    match n {
        1 => {
            if k % 2 == 1 {
                0
            } else if k % 12 == 2 {
                (k / 12) as u64
            } else {
                (k / 12) as u64 + 1
            }
        }
        2 => {
            if k % 2 == 1 {
                0
            } else {
                (k / 2) as u64 + 1
            }
        }
        _ => {
            let g = gamma_n_genus(n);
            let eps = gamma_n_cusps(n);
            let d = (k as i64 - 1) * (g - 1) + (k as u64 * eps / 2) as i64;
            debug_assert_eq!(k as u64 * eps % 2, 0);
            d.max(0) as u64
        }
    }
}

/// Sturm bound for `M_k(Γ(N))` in `q^{1/N}`-coefficient count: a form
/// vanishing to this order is identically zero.
pub fn sturm_bound(n: u64, k: u32) -> usize {
    let idx = sl2_index(n);
    let num = k as u64 * idx;
    (num.div_ceil(12) + 1) as usize
}

// ---------------------------------------------------------------------------
// Echelon with combination tracking
// ---------------------------------------------------------------------------

struct EchRow {
    pivot: usize,
    vec: Vec<CycNumber>,
    /// this row as a combination of the tagged input vectors (sparse)
    combo: Vec<(usize, CycNumber)>,
}

fn combo_axpy(
    target: &mut Vec<(usize, CycNumber)>,
    factor: &CycNumber,
    src: &[(usize, CycNumber)],
) {
    // target -= factor * src, merging sparse entries
    let mut map: BTreeMap<usize, CycNumber> = target.drain(..).collect();
    for (idx, c) in src {
        let delta = factor.mul(c);
        let e = map.entry(*idx).or_insert_with(|| CycNumber::zero(delta.modulus()));
        *e = e.sub(&delta);
        if e.is_zero() {
            map.remove(idx);
        }
    }
    target.extend(map);
}

/// Result of inserting a vector into a [`TrackedEchelon`].
pub enum InsertOutcome {
    Independent,
    /// The vector is a combination of earlier tagged vectors; the combo
    /// satisfies `Σ combo_j · vector_j = 0` and includes the new vector
    /// with coefficient 1.
    Dependent(Vec<(usize, CycNumber)>),
}

/// Exact incremental row echelon over cyclotomic coefficient vectors, with
/// every row tracked as a combination of the inserted (tagged) vectors.
pub struct TrackedEchelon {
    ncols: usize,
    rows: Vec<EchRow>,
}

impl TrackedEchelon {
    pub fn new(ncols: usize) -> TrackedEchelon {
        TrackedEchelon {
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Reduces `v` against the rows; on independence installs a new
    /// normalized row.  The caller chooses the tag that identifies `v` in
    /// later combination reports.
    pub fn insert(&mut self, v: &[CycNumber], tag: usize) -> InsertOutcome {
        assert_eq!(v.len(), self.ncols);
        let modulus = v
            .iter()
            .map(|c| c.modulus())
            .fold(1, crate::arith::lcm);
        let mut v: Vec<CycNumber> = v.to_vec();
        let mut combo: Vec<(usize, CycNumber)> = vec![(tag, CycNumber::one(modulus))];
        for row in &self.rows {
            let f = v[row.pivot].clone();
            if f.is_zero() {
                continue;
            }
            for (x, y) in v.iter_mut().zip(row.vec.iter()) {
                if !y.is_zero() {
                    *x = x.sub(&f.mul(y));
                }
            }
            combo_axpy(&mut combo, &f, &row.combo);
        }
        let Some(pivot) = v.iter().position(|c| !c.is_zero()) else {
            return InsertOutcome::Dependent(combo);
        };
        let inv = v[pivot].inv().expect("pivot nonzero");
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x = x.mul(&inv);
            }
        }
        for (_, c) in combo.iter_mut() {
            *c = c.mul(&inv);
        }
        let at = self.rows.partition_point(|r| r.pivot < pivot);
        self.rows.insert(at, EchRow { pivot, vec: v, combo });
        InsertOutcome::Independent
    }

    /// Writes `target` as a combination of the tagged input vectors, if it
    /// lies in their span (checked over all ncols coordinates).
    pub fn solve(&self, target: &[CycNumber]) -> Option<Vec<(usize, CycNumber)>> {
        assert!(target.len() >= self.ncols);
        let mut v: Vec<CycNumber> = target[..self.ncols].to_vec();
        let mut combo: Vec<(usize, CycNumber)> = Vec::new();
        for row in &self.rows {
            let f = v[row.pivot].clone();
            if f.is_zero() {
                continue;
            }
            for (x, y) in v.iter_mut().zip(row.vec.iter()) {
                if !y.is_zero() {
                    *x = x.sub(&f.mul(y));
                }
            }
            let neg = f.neg();
            combo_axpy(&mut combo, &neg, &row.combo);
        }
        if v.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(combo)
    }
}

// ---------------------------------------------------------------------------
// Basis
// ---------------------------------------------------------------------------

/// A saturated independent set of Eisenstein monomials for `M_k(Γ(N))`,
/// with the echelonized expansion matrix over the first Sturm-bound
/// coefficients.
pub struct EisBasis {
    level: u64,
    weight: u32,
    sturm: usize,
    monomials: Vec<EisMonomial>,
    echelon: TrackedEchelon,
}

impl EisBasis {
    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn monomials(&self) -> &[EisMonomial] {
        &self.monomials
    }

    pub fn sturm(&self) -> usize {
        self.sturm
    }

    fn try_insert(&mut self, expansion: &QExpansion, mon: &EisMonomial) -> bool {
        let v = &expansion.coeffs()[..self.sturm];
        match self.echelon.insert(v, self.monomials.len()) {
            InsertOutcome::Independent => {
                self.monomials.push(mon.clone());
                true
            }
            InsertOutcome::Dependent(_) => false,
        }
    }

    /// Solves for `target = Σ c_i · monomial_i` over the first `sturm`
    /// coefficients; returns None if the target is outside the span.
    fn solve(&self, target: &[CycNumber]) -> Option<Vec<(usize, CycNumber)>> {
        self.echelon.solve(target)
    }
}

/// A modular form expressed as `Σ c_i · monomial_i`.
#[derive(Clone, Debug)]
pub struct EisDecomposition {
    pub level: u64,
    pub weight: u32,
    pub terms: Vec<(EisMonomial, CycNumber)>,
}

impl EisDecomposition {
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Index action on every monomial; coefficients untouched.
    pub fn slash(&self, g: &MatZ) -> EisDecomposition {
        let gm = g.reduce_mod(self.level);
        EisDecomposition {
            level: self.level,
            weight: self.weight,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.slash(&gm), c.clone()))
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

/// Shared engine state: the monomial expansion cache and saturated bases
/// per (level, weight).
#[derive(Default)]
pub struct Engine {
    cache: MonomialCache,
    bases: RwLock<HashMap<(u64, u32), Arc<EisBasis>>>,
}

impl Engine {
    pub fn new() -> Engine {
        Engine::default()
    }

    pub fn monomial_cache(&self) -> &MonomialCache {
        &self.cache
    }

    /// Generator index pairs at level N, one per ±-pair, zero series
    /// excluded.
    pub fn generators(n: u64) -> Vec<(u64, u64)> {
        if n == 2 {
            return vec![(0, 1), (1, 0), (1, 1)];
        }
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a == 0 && b == 0 {
                    continue;
                }
                let neg = ((n - a) % n, (n - b) % n);
                if neg == (a, b) {
                    continue; // E = −E, the series vanishes
                }
                if (a, b) <= neg {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// The saturated monomial basis of `M_k(Γ(N))`, built recursively and
    /// cached.  Errors if saturation cannot reach the dimension formula.
    pub fn basis(&self, n: u64, k: u32) -> Result<Arc<EisBasis>> {
        if n < 2 {
            return Err(CoreError::BadInput(
                "the Eisenstein basis needs level N >= 2".into(),
            ));
        }
        if let Some(b) = self.bases.read().unwrap().get(&(n, k)) {
            return Ok(b.clone());
        }
        let gw = EisMonomial::generator_weight(n);
        if k < gw {
            return Err(CoreError::BadInput(format!(
                "no Eisenstein monomials of weight {k} at level {n}"
            )));
        }
        let sturm = sturm_bound(n, k);
        let mut basis = EisBasis {
            level: n,
            weight: k,
            sturm,
            monomials: Vec::new(),
            echelon: TrackedEchelon::new(sturm),
        };
        // dimension target for k >= 2; weight 1 saturates by exhaustion
        let dim = if k % gw != 0 {
            Some(0)
        } else if k >= 2 {
            Some(dim_mk_gamma(n, k))
        } else {
            None
        };
        if dim != Some(0) {
            let gens = Self::generators(n);
            let candidates: Vec<EisMonomial> = if k == gw {
                gens.iter()
                    .map(|&(a, b)| EisMonomial::new(n, vec![(a, b)]))
                    .collect()
            } else {
                let prev = self.basis(n, k - gw)?;
                prev.monomials()
                    .iter()
                    .flat_map(|m| gens.iter().map(move |&(a, b)| m.times(a, b)))
                    .collect()
            };
            'outer: for chunk in candidates.chunks(32) {
                let expanded: Vec<(usize, Result<QExpansion>)> = chunk
                    .par_iter()
                    .enumerate()
                    .map(|(i, m)| (i, self.cache.expansion(m, sturm)))
                    .collect();
                for (i, exp) in expanded {
                    let exp = exp?;
                    basis.try_insert(&exp, &chunk[i]);
                    if dim == Some(basis.rank() as u64) {
                        break 'outer;
                    }
                }
            }
            if let Some(d) = dim {
                if basis.rank() as u64 != d {
                    return Err(CoreError::Saturation(format!(
                        "level {n} weight {k}: rank {} after exhausting candidates, dimension formula says {d}",
                        basis.rank()
                    )));
                }
            }
        }
        let arc = Arc::new(basis);
        self.bases
            .write()
            .unwrap()
            .entry((n, k))
            .or_insert_with(|| arc.clone());
        Ok(arc)
    }

    /// Expresses a width-N expansion as a combination of basis monomials.
    ///
    /// The linear solve runs over the first Sturm-bound coefficients; the
    /// candidate combination is then re-expanded and compared against every
    /// declared coefficient, so a success is a proof of membership in
    /// `M_k(Γ(N))` and not a heuristic fit.
    pub fn express(&self, expansion: &QExpansion, n: u64, k: u32) -> Result<EisDecomposition> {
        if expansion.width() != n {
            return Err(CoreError::WidthMismatch {
                left: expansion.width(),
                right: n,
            });
        }
        if k == 1 {
            return Err(CoreError::WeightOne);
        }
        let basis = self.basis(n, k)?;
        if expansion.prec() < basis.sturm() {
            return Err(CoreError::PrecisionTooLow {
                given: expansion.prec(),
                required: basis.sturm(),
            });
        }
        if expansion.is_zero() {
            return Ok(EisDecomposition {
                level: n,
                weight: k,
                terms: Vec::new(),
            });
        }
        let combo = basis.solve(expansion.coeffs()).ok_or_else(|| {
            CoreError::NotModular(format!(
                "no representation in the weight-{k} Eisenstein span at level {n}"
            ))
        })?;
        let dec = EisDecomposition {
            level: n,
            weight: k,
            terms: combo
                .into_iter()
                .map(|(i, c)| (basis.monomials()[i].clone(), c))
                .collect(),
        };
        // exact residual check to full declared precision
        let re = self.expand_decomposition(&dec, expansion.prec())?;
        let diff = re.sub(expansion)?;
        if !diff.is_zero() {
            return Err(CoreError::NotModular(
                "combination matches to the Sturm bound but not to full precision".into(),
            ));
        }
        Ok(dec)
    }

    /// Re-expands a decomposition to the requested precision.
    pub fn expand_decomposition(
        &self,
        dec: &EisDecomposition,
        prec: usize,
    ) -> Result<QExpansion> {
        let mut acc = QExpansion::zero(dec.level, dec.level, prec);
        for (mon, c) in &dec.terms {
            let e = self.cache.expansion(mon, prec)?;
            acc = acc.add(&e.scalar_mul(c))?;
        }
        Ok(acc)
    }

    /// `Σ c_i · expansion(monomial_i | g)`: the slash action through the
    /// index action.
    pub fn slash_decomposition(
        &self,
        dec: &EisDecomposition,
        g: &MatZ,
        prec: usize,
    ) -> Result<QExpansion> {
        if !g.is_sl2() {
            return Err(CoreError::BadMatrix("slash needs g in SL2(Z)".into()));
        }
        self.expand_decomposition(&dec.slash(g), prec)
    }

    /// `f | g` for a raw width-N expansion of a form in `M_k(Γ(N))`.
    pub fn slash_expansion(
        &self,
        expansion: &QExpansion,
        n: u64,
        k: u32,
        g: &MatZ,
        prec: usize,
    ) -> Result<QExpansion> {
        let dec = self.express(expansion, n, k)?;
        self.slash_decomposition(&dec, g, prec)
    }

    /// `f | g` for a declared modular form, handling the width reindex for
    /// `Γ₁/Γ₀` inputs and the scaled route for forms given as f(τ) = f₀(dτ).
    /// The output is a width-N expansion with `prec` coefficients.
    pub fn slash_form(&self, form: &ModularFormInput, g: &MatZ, prec: usize) -> Result<QExpansion> {
        if !g.is_sl2() {
            return Err(CoreError::BadMatrix("slash needs g in SL2(Z)".into()));
        }
        let n = form.level;
        let k = form.weight;
        if n == 1 {
            // level 1: f | g = f
            return form.width_n_expansion(prec);
        }
        match &form.scaling {
            None => {
                let sturm = sturm_bound(n, k);
                let input = form.width_n_expansion(prec.max(sturm))?;
                let out = self.slash_expansion(&input, n, k, g, prec)?;
                Ok(out)
            }
            Some(sc) => {
                let d = sc.factor as i64;
                let x = MatZ::new(d, 0, 0, 1).mul(g);
                let (gamma, upper) = hnf_split(&x)?;
                // output width-N index of base index m is m·a²  (N = base·d,
                // base width scales by upper.d, exponents by upper.a)
                let a2 = (upper.a * upper.a) as usize;
                let base_prec = prec.div_ceil(a2) + 2;
                let sturm0 = sturm_bound(sc.base_level, k);
                let dec = self.express(
                    &form.base_expansion(base_prec.max(sturm0))?,
                    sc.base_level,
                    k,
                )?;
                let f0g = self.slash_decomposition(&dec, &gamma, base_prec)?;
                let scaled = f0g.apply_upper_triangular(upper.a, upper.b, upper.d, k)?;
                debug_assert!(scaled.is_exact(), "even weight keeps det^{{k/2}} rational");
                // overall d^{−k/2} from f = d^{−k/2}·(f₀ | diag(d,1))
                let mut series = scaled.series.scalar_mul_rat(
                    &BigRational::new(
                        num_bigint::BigInt::one(),
                        num_bigint::BigInt::from(sc.factor.pow(k / 2)),
                    ),
                );
                series = series.rescale_width(n)?;
                if series.prec() < prec {
                    return Err(CoreError::PrecisionTooLow {
                        given: series.prec(),
                        required: prec,
                    });
                }
                Ok(series.truncate(prec))
            }
        }
    }

    /// Executable form of the Galois–slash compatibility: computes
    /// `(f|g)^σ` and `f^σ | g_λ` through independent paths and compares
    /// exactly.  λ must be a unit mod lcm(level, coefficient modulus).
    pub fn galois_slash_check(
        &self,
        form: &ModularFormInput,
        g: &MatZ,
        lambda: u64,
        prec: usize,
    ) -> Result<bool> {
        let lhs = self.slash_form(form, g, prec)?.apply_galois(lambda)?;
        let f_sigma = form.galois_twist(lambda)?;
        let g_lam = g_lambda(g, lambda % form.level, form.level)?;
        let rhs = self.slash_form(&f_sigma, &g_lam, prec)?;
        Ok(lhs == rhs)
    }

    /// Same check for a raw width-N expansion in `M_k(Γ(N))`.
    pub fn galois_slash_check_expansion(
        &self,
        expansion: &QExpansion,
        n: u64,
        k: u32,
        g: &MatZ,
        lambda: u64,
        prec: usize,
    ) -> Result<bool> {
        let lhs = self
            .slash_expansion(expansion, n, k, g, prec)?
            .apply_galois(lambda)?;
        let twisted = expansion.apply_galois(lambda)?;
        let g_lam = g_lambda(g, lambda % n, n)?;
        let rhs = self.slash_expansion(&twisted, n, k, &g_lam, prec)?;
        Ok(lhs == rhs)
    }
}

// ---------------------------------------------------------------------------
// Declared modular forms
// ---------------------------------------------------------------------------

/// Congruence-group tag of a declared form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupTag {
    /// Γ(N); the declared coefficients are width-N indexed.
    GammaN,
    Gamma1,
    /// Γ₀(N), with a Nebentypus character when one is declared.
    Gamma0,
}

/// Declaration that f(τ) = f₀(d·τ) for a base form f₀ of level `base_level`
/// with `level = base_level · factor`; the declared width-1 coefficient a_m
/// of f is the width-`base_level` coefficient m of f₀.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Scaling {
    pub base_level: u64,
    pub factor: u64,
}

/// A modular form as ingested from a form file: exact q-expansion at ∞
/// plus the metadata the field-bound machinery needs.
#[derive(Clone, Debug)]
pub struct ModularFormInput {
    pub label: String,
    pub level: u64,
    pub weight: u32,
    pub group: GroupTag,
    pub character: Option<DirichletCharacter>,
    /// coefficients lie in ℚ(ζ_n) for this n
    pub coeff_modulus: u64,
    pub a0: CycNumber,
    /// a_1, a_2, … (width-1 indexing for Γ₁/Γ₀ forms, width-N for Γ(N))
    pub coeffs: Vec<CycNumber>,
    pub is_newform: bool,
    /// Atkin-Lehner eigenvalue table: Q ↦ ±1
    pub al_table: BTreeMap<u64, i64>,
    pub scaling: Option<Scaling>,
}

impl ModularFormInput {
    /// Validates the declared invariants; called at ingestion.
    pub fn validate(&self) -> Result<()> {
        if self.level == 0 || self.weight == 0 {
            return Err(CoreError::BadInput("level and weight must be positive".into()));
        }
        let sturm = sturm_bound(self.level, self.weight);
        let declared = match self.group {
            GroupTag::GammaN => self.coeffs.len() + 1,
            _ => (self.coeffs.len() + 1) * self.level as usize,
        };
        if declared < sturm {
            return Err(CoreError::PrecisionTooLow {
                given: declared,
                required: sturm,
            });
        }
        if let Some(chi) = &self.character {
            if chi.modulus() != self.level {
                return Err(CoreError::BadCharacter(format!(
                    "character modulus {} must equal the level {}",
                    chi.modulus(),
                    self.level
                )));
            }
            if !chi.parity_matches_weight(self.weight) {
                return Err(CoreError::BadCharacter(format!(
                    "character parity χ(−1) = {} does not match weight {}",
                    chi.parity(),
                    self.weight
                )));
            }
            if self.group != GroupTag::Gamma0 {
                return Err(CoreError::BadCharacter(
                    "characters are declared on gamma0 forms".into(),
                ));
            }
        }
        if let Some(sc) = &self.scaling {
            if sc.base_level * sc.factor != self.level {
                return Err(CoreError::BadInput(format!(
                    "scaling base {} × factor {} must equal the level {}",
                    sc.base_level, sc.factor, self.level
                )));
            }
            if self.weight % 2 != 0 {
                return Err(CoreError::BadInput(
                    "scaled declarations are limited to even weight".into(),
                ));
            }
        }
        for (q, e) in &self.al_table {
            if self.level % q != 0 || arith::gcd(*q, self.level / q) != 1 {
                return Err(CoreError::BadInput(format!(
                    "Atkin-Lehner table key {q} is not a maximal divisor of {}",
                    self.level
                )));
            }
            if *e != 1 && *e != -1 {
                return Err(CoreError::BadInput(
                    "Atkin-Lehner table entries must be ±1".into(),
                ));
            }
        }
        for c in std::iter::once(&self.a0).chain(self.coeffs.iter()) {
            c.rebase(self.coeff_modulus).map_err(|_| {
                CoreError::BadInput(format!(
                    "coefficient {c} does not lie in Q(zeta_{})",
                    self.coeff_modulus
                ))
            })?;
        }
        Ok(())
    }

    /// The number of declared width-1 coefficients (a_1..a_prec).
    pub fn declared_prec(&self) -> usize {
        self.coeffs.len()
    }

    /// The width-N reindexed expansion: `q = q_N^N`.
    pub fn width_n_expansion(&self, prec: usize) -> Result<QExpansion> {
        let n = self.level as usize;
        if self.group == GroupTag::GammaN {
            if self.coeffs.len() + 1 < prec {
                return Err(CoreError::PrecisionTooLow {
                    given: self.coeffs.len() + 1,
                    required: prec,
                });
            }
            let mut coeffs = vec![self.a0.clone()];
            coeffs.extend(self.coeffs[..prec - 1].iter().cloned());
            return Ok(QExpansion::from_coeffs(
                self.level,
                self.coeff_modulus,
                coeffs,
            ));
        }
        let have = self.coeffs.len() * n + 1;
        if have < prec {
            return Err(CoreError::PrecisionTooLow {
                given: have,
                required: prec,
            });
        }
        let mut coeffs = vec![CycNumber::zero(self.coeff_modulus); prec];
        coeffs[0] = self.a0.clone();
        let mut i = n;
        let mut m = 0usize;
        while i < prec {
            coeffs[i] = self.coeffs[m].clone();
            i += n;
            m += 1;
        }
        Ok(QExpansion::from_coeffs(
            self.level,
            self.coeff_modulus,
            coeffs,
        ))
    }

    /// For scaled forms: the width-`base_level` expansion of f₀, whose
    /// index-m coefficient is the declared a_m.
    pub fn base_expansion(&self, prec: usize) -> Result<QExpansion> {
        let sc = self.scaling.as_ref().ok_or_else(|| {
            CoreError::BadInput("base_expansion requires a scaling declaration".into())
        })?;
        if self.coeffs.len() + 1 < prec {
            return Err(CoreError::PrecisionTooLow {
                given: self.coeffs.len() + 1,
                required: prec,
            });
        }
        let mut coeffs = vec![self.a0.clone()];
        coeffs.extend(self.coeffs[..prec - 1].iter().cloned());
        Ok(QExpansion::from_coeffs(
            sc.base_level,
            self.coeff_modulus,
            coeffs,
        ))
    }

    /// `K_f`: the field generated by the coefficients a_n, n ≥ 1.
    pub fn kf(&self) -> Result<AbelianFieldDescriptor> {
        field_of(&self.coeffs, self.coeff_modulus)
    }

    /// The σ_λ-twisted form (coefficientwise Galois action, character
    /// replaced by χ^σ).  λ must be a unit mod lcm(level, coeff modulus).
    pub fn galois_twist(&self, lambda: u64) -> Result<ModularFormInput> {
        let l = arith::lcm(self.level, self.coeff_modulus);
        if !arith::is_unit(lambda, l) {
            return Err(CoreError::NotAUnit {
                lambda: lambda % l,
                modulus: l,
            });
        }
        let twist = |c: &CycNumber| c.galois(lambda % c.modulus().max(1)).or_else(|_| {
            // coefficient modulus divides l, so rebase first
            c.rebase(self.coeff_modulus)?.galois(lambda % self.coeff_modulus.max(1))
        });
        let character = match &self.character {
            None => None,
            Some(chi) => {
                let t = lambda % chi.order();
                let pairs: Vec<(u64, u64)> = chi
                    .generator_exponents()
                    .iter()
                    .map(|&(g, e)| {
                        let d = arith::unit_order(g, chi.modulus());
                        (g, e * t % d)
                    })
                    .collect();
                Some(DirichletCharacter::from_generator_exponents(
                    chi.modulus(),
                    &pairs,
                )?)
            }
        };
        Ok(ModularFormInput {
            label: format!("{}^sigma_{}", self.label, lambda),
            a0: twist(&self.a0)?,
            coeffs: self
                .coeffs
                .iter()
                .map(twist)
                .collect::<Result<Vec<_>>>()?,
            character,
            ..self.clone()
        })
    }
}
