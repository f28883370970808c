//! Generating recipes for the bundled newform data.
//!
//! Every form file shipped in `forms/` is reproducible from first
//! principles inside this crate: four of them are eta products (exact
//! integer series), and the level-9 weight-3 character newform is cut out
//! of the Eisenstein-monomial span of `M₃(Γ(9))` by linear algebra and a
//! Hecke eigenvector computation.  The regeneration tests compare the
//! bundled files against these functions coefficient by coefficient.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::arith;
use crate::characters::DirichletCharacter;
use crate::cyclotomic::CycNumber;
use crate::engine::{EisDecomposition, Engine, InsertOutcome, TrackedEchelon};
use crate::modmatrix::{sl2_lift, MatModN};
use crate::{CoreError, Result};

/// Width-1 integer q-expansion of `q^{e} · ∏_i ∏_{n≥1} (1 − q^{d_i n})^{r_i}`
/// where `e = Σ d_i r_i / 24` (which must be integral): the eta product
/// `∏ η(d_i τ)^{r_i}`.  Returns coefficients a_0 .. a_{prec−1}.
pub fn eta_product(terms: &[(u64, u32)], prec: usize) -> Result<Vec<BigInt>> {
    let total: u64 = terms.iter().map(|&(d, r)| d * r as u64).sum();
    if total % 24 != 0 {
        return Err(CoreError::BadInput(format!(
            "eta product has fractional leading exponent {total}/24"
        )));
    }
    let shift = (total / 24) as usize;
    let mut series = vec![BigInt::ZERO; prec];
    if shift >= prec {
        return Ok(series);
    }
    series[shift] = BigInt::from(1);
    for &(d, r) in terms {
        for _ in 0..r {
            // multiply by ∏_n (1 − q^{dn}) term by term
            let mut m = d as usize;
            while m < prec {
                // in-place multiply by (1 − q^m): high to low
                for i in (m..prec).rev() {
                    let t = series[i - m].clone();
                    series[i] -= t;
                }
                m += d as usize;
            }
        }
    }
    Ok(series)
}

fn to_cyc(v: Vec<BigInt>) -> Vec<CycNumber> {
    v.into_iter()
        .map(|x| CycNumber::from_rational(BigRational::from(x)))
        .collect()
}

/// η(τ)²η(11τ)²: the level-11 weight-2 newform (a_0 .. a_{prec−1}).
pub fn eta_11a(prec: usize) -> Vec<CycNumber> {
    to_cyc(eta_product(&[(1, 2), (11, 2)], prec).unwrap())
}

/// η(3τ)²η(9τ)²: the level-27 weight-2 newform.
pub fn eta_27a(prec: usize) -> Vec<CycNumber> {
    to_cyc(eta_product(&[(3, 2), (9, 2)], prec).unwrap())
}

/// η(4τ)²η(8τ)²: the level-32 weight-2 newform.
pub fn eta_32a(prec: usize) -> Vec<CycNumber> {
    to_cyc(eta_product(&[(4, 2), (8, 2)], prec).unwrap())
}

/// η(6τ)⁴: the level-36 weight-2 newform.
pub fn eta_36a(prec: usize) -> Vec<CycNumber> {
    to_cyc(eta_product(&[(6, 4)], prec).unwrap())
}

/// The sextic character mod 9 with χ(2) = ζ₆ (so χ(4) = ζ₃, χ(−1) = −1).
pub fn level9_character() -> DirichletCharacter {
    DirichletCharacter::from_generator_exponents(9, &[(2, 1)]).expect("canonical generator 2")
}

/// Derives the level-9 weight-3 newform with the [`level9_character`]
/// Nebentypus, entirely from the Eisenstein-monomial span of `M₃(Γ(9))`:
///
/// 1. the subspace with expansions supported on `q^(9m/9)` (exactly
///    `M₃(Γ₁(9))`, by the Sturm bound);
/// 2. the diamond eigenspace `⟨2⟩ = χ(2)` inside it;
/// 3. the Hecke T₂ eigenvector with vanishing constant term whose
///    eigenvalue is not the Eisenstein value `χ(2) + 4`.
///
/// Returns the decomposition, normalized to `a_1 = 1`; width-1
/// coefficients of any length follow by re-expanding it.
pub fn derive_level9_newform(engine: &Engine) -> Result<EisDecomposition> {
    let n = 9u64;
    let k = 3u32;
    let chi = level9_character();
    let basis = engine.basis(n, k)?;
    let sturm = basis.sturm();
    let rank = basis.rank();

    // -- step 1: T-invariant kernel ----------------------------------------
    // condition vector: coefficients at width-9 indices not divisible by 9
    let cond_indices: Vec<usize> = (1..sturm).filter(|t| t % 9 != 0).collect();
    let mut cond_ech = TrackedEchelon::new(cond_indices.len());
    let mut t_invariant: Vec<Vec<(usize, CycNumber)>> = Vec::new();
    for i in 0..rank {
        let exp = engine
            .monomial_cache()
            .expansion(&basis.monomials()[i].clone(), sturm)?;
        let cond: Vec<CycNumber> = cond_indices.iter().map(|&t| exp.coeff(t).clone()).collect();
        if let InsertOutcome::Dependent(combo) = cond_ech.insert(&cond, i) {
            t_invariant.push(combo);
        }
    }
    let v1_dim = t_invariant.len();
    if v1_dim == 0 {
        return Err(CoreError::Saturation(
            "no T-invariant combinations found in M_3(Γ(9))".into(),
        ));
    }

    let combo_to_dec = |combo: &[(usize, CycNumber)]| EisDecomposition {
        level: n,
        weight: k,
        terms: combo
            .iter()
            .map(|(i, c)| (basis.monomials()[*i].clone(), c.clone()))
            .collect(),
    };

    // expansion matrix of the T-invariant space, for expressing images
    let v1_expansions: Vec<crate::qseries::QExpansion> = t_invariant
        .iter()
        .map(|combo| engine.expand_decomposition(&combo_to_dec(combo), sturm))
        .collect::<Result<Vec<_>>>()?;
    let mut v1_ech = TrackedEchelon::new(sturm);
    for (i, e) in v1_expansions.iter().enumerate() {
        match v1_ech.insert(e.coeffs(), i) {
            InsertOutcome::Independent => {}
            InsertOutcome::Dependent(_) => {
                return Err(CoreError::Saturation(
                    "T-invariant combinations are unexpectedly dependent".into(),
                ))
            }
        }
    }

    // -- step 2: diamond <2> eigenspace ------------------------------------
    // <d> is the slash by an SL2(Z) lift of (d^{-1}, 0; 0, d) mod 9
    let d_inv = arith::inv_mod(2, 9).unwrap();
    let diamond = sl2_lift(&MatModN::new(9, d_inv, 0, 0, 2))?;
    // columns of (D − χ(2)·I) over the v1 coordinates
    let chi2 = chi.value(2).rebase(9)?;
    let mut cols: Vec<Vec<CycNumber>> = Vec::new();
    for (j, combo) in t_invariant.iter().enumerate() {
        let image = engine.slash_decomposition(&combo_to_dec(combo), &diamond, sturm)?;
        let coords = v1_ech.solve(image.rebase_modulus(9)?.coeffs()).ok_or_else(|| {
            CoreError::Saturation("diamond image left the T-invariant space".into())
        })?;
        let mut col = vec![CycNumber::zero(9); v1_dim];
        for (i, c) in coords {
            col[i] = c;
        }
        col[j] = col[j].sub(&chi2);
        cols.push(col);
    }
    let mut eig_ech = TrackedEchelon::new(v1_dim);
    let mut eigen_combos: Vec<Vec<(usize, CycNumber)>> = Vec::new();
    for (j, col) in cols.iter().enumerate() {
        if let InsertOutcome::Dependent(combo) = eig_ech.insert(col, j) {
            eigen_combos.push(combo);
        }
    }
    if eigen_combos.is_empty() {
        return Err(CoreError::Saturation(
            "diamond eigenspace for χ(2) is empty".into(),
        ));
    }

    // compose: eigenvector j-th coordinate over v1, then over monomials
    let eigen_decs: Vec<EisDecomposition> = eigen_combos
        .iter()
        .map(|combo| {
            let mut acc: std::collections::BTreeMap<usize, CycNumber> = Default::default();
            for (j, c) in combo {
                for (i, b) in &t_invariant[*j] {
                    let e = acc.entry(*i).or_insert_with(|| CycNumber::zero(9));
                    *e = e.add(&c.mul(b));
                }
            }
            EisDecomposition {
                level: n,
                weight: k,
                terms: acc
                    .into_iter()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, c)| (basis.monomials()[i].clone(), c))
                    .collect(),
            }
        })
        .collect();

    // -- step 3: kill the constant term, then T₂ ---------------------------
    // width-1 view: a_m = width-9 coefficient at 9m
    let m_max = (sturm - 1) / 9; // a_1 .. a_m_max available
    let width1 = |dec: &EisDecomposition| -> Result<Vec<CycNumber>> {
        let e = engine.expand_decomposition(dec, sturm)?.rebase_modulus(9)?;
        Ok((0..=m_max).map(|m| e.coeff(9 * m).clone()).collect())
    };
    let eigen_w1: Vec<Vec<CycNumber>> = eigen_decs
        .iter()
        .map(|d| width1(d))
        .collect::<Result<Vec<_>>>()?;

    // subspace with a_0 = 0
    let mut w_decs: Vec<EisDecomposition> = Vec::new();
    let mut w_w1: Vec<Vec<CycNumber>> = Vec::new();
    {
        let mut pivot: Option<(usize, CycNumber)> = None;
        for (i, v) in eigen_w1.iter().enumerate() {
            if !v[0].is_zero() {
                pivot = Some((i, v[0].clone()));
                break;
            }
        }
        for (i, v) in eigen_w1.iter().enumerate() {
            if v[0].is_zero() {
                w_decs.push(eigen_decs[i].clone());
                w_w1.push(v.clone());
            } else if let Some((p, pv)) = &pivot {
                if i != *p {
                    let f = v[0].div(pv)?;
                    let mut dec = eigen_decs[i].clone();
                    for (mon, c) in &eigen_decs[*p].terms {
                        dec.terms.push((mon.clone(), c.mul(&f).neg()));
                    }
                    let dec = EisDecomposition {
                        level: n,
                        weight: k,
                        terms: merge_terms(dec.terms),
                    };
                    let v1 = width1(&dec)?;
                    debug_assert!(v1[0].is_zero());
                    w_decs.push(dec);
                    w_w1.push(v1);
                }
            }
        }
    }
    if w_decs.len() != 2 {
        return Err(CoreError::Saturation(format!(
            "expected a 2-dimensional cuspidal+Eisenstein space with a_0 = 0, got {}",
            w_decs.len()
        )));
    }

    // T₂ on W: (T₂ f)_m = a_{2m} + χ(2)·4·a_{m/2}
    let t_len = m_max / 2;
    let t2 = |v: &[CycNumber]| -> Vec<CycNumber> {
        (0..=t_len)
            .map(|m| {
                let mut x = v[2 * m].clone();
                if m % 2 == 0 && m > 0 {
                    x = x.add(&chi2.scale(&BigRational::from_integer(4.into())).mul(&v[m / 2]));
                }
                x
            })
            .collect()
    };
    let mut w_ech = TrackedEchelon::new(t_len + 1);
    for (i, v) in w_w1.iter().enumerate() {
        match w_ech.insert(&v[..=t_len], i) {
            InsertOutcome::Independent => {}
            InsertOutcome::Dependent(_) => {
                return Err(CoreError::Saturation(
                    "W basis dependent at the working precision".into(),
                ))
            }
        }
    }
    // 2×2 matrix of T₂ on W
    let mut t2_mat = vec![vec![CycNumber::zero(9); 2]; 2];
    for (j, v) in w_w1.iter().enumerate() {
        let image = t2(v);
        let coords = w_ech
            .solve(&image)
            .ok_or_else(|| CoreError::Saturation("T₂ does not preserve W".into()))?;
        for (i, c) in coords {
            t2_mat[i][j] = c;
        }
    }
    let trace = t2_mat[0][0].add(&t2_mat[1][1]);
    let eis_eigenvalue = chi2.add(&CycNumber::from_integer(4).rebase(9)?);
    let a2 = trace.sub(&eis_eigenvalue);

    // eigenvector for a2: kernel of (T₂ − a2) on coordinates
    let m00 = t2_mat[0][0].sub(&a2);
    let m11 = t2_mat[1][1].sub(&a2);
    let (c0, c1) = if !m00.is_zero() {
        // (m00, m01; m10, m11)(x, y) = 0 with x = −m01, y = m00 … check both rows
        (t2_mat[0][1].neg(), m00.clone())
    } else if !t2_mat[0][1].is_zero() {
        (CycNumber::zero(9), CycNumber::zero(9)) // row forces y = 0 with m01 ≠ 0 ⇒ x free
    } else {
        (CycNumber::one(9), CycNumber::zero(9))
    };
    let (c0, c1) = if c0.is_zero() && c1.is_zero() {
        (CycNumber::one(9), CycNumber::zero(9))
    } else {
        (c0, c1)
    };
    // verify the kernel equations on both rows
    let r0 = m00.mul(&c0).add(&t2_mat[0][1].mul(&c1));
    let r1 = t2_mat[1][0].mul(&c0).add(&m11.mul(&c1));
    if !r0.is_zero() || !r1.is_zero() {
        return Err(CoreError::Saturation(
            "T₂ eigenvector equations are inconsistent".into(),
        ));
    }

    let mut terms = Vec::new();
    for (dec, c) in w_decs.iter().zip([c0, c1]) {
        if c.is_zero() {
            continue;
        }
        for (mon, cc) in &dec.terms {
            terms.push((mon.clone(), cc.mul(&c)));
        }
    }
    let mut newform = EisDecomposition {
        level: n,
        weight: k,
        terms: merge_terms(terms),
    };
    // normalize a_1 = 1
    let e = engine.expand_decomposition(&newform, 10)?;
    let a1 = e.coeff(9).clone();
    if a1.is_zero() {
        return Err(CoreError::Saturation("derived eigenform has a_1 = 0".into()));
    }
    let inv = a1.inv()?;
    for (_, c) in newform.terms.iter_mut() {
        *c = c.mul(&inv);
    }

    // Hecke sanity: a_4 = a_2² − χ(2)·2², and a_0 = 0
    let e = engine.expand_decomposition(&newform, 9 * 8 + 1)?.rebase_modulus(9)?;
    let a = |m: usize| e.coeff(9 * m).clone();
    if !a(0).is_zero() {
        return Err(CoreError::Saturation("derived form is not cuspidal at ∞".into()));
    }
    let want_a4 = a(2).mul(&a(2)).sub(&chi2.scale(&BigRational::from_integer(4.into())));
    if a(4) != want_a4 {
        return Err(CoreError::Saturation(
            "derived form fails the T₂ Hecke relation at a_4".into(),
        ));
    }
    Ok(newform)
}

fn merge_terms(
    terms: Vec<(crate::eisenstein::EisMonomial, CycNumber)>,
) -> Vec<(crate::eisenstein::EisMonomial, CycNumber)> {
    let mut map: std::collections::BTreeMap<crate::eisenstein::EisMonomial, CycNumber> =
        Default::default();
    for (m, c) in terms {
        let e = map.entry(m).or_insert_with(|| CycNumber::zero(c.modulus()));
        *e = e.add(&c);
    }
    map.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Width-1 coefficients (a_0 .. a_{prec−1}) of the derived level-9 newform.
pub fn level9_coefficients(engine: &Engine, prec: usize) -> Result<Vec<CycNumber>> {
    let dec = derive_level9_newform(engine)?;
    let e = engine
        .expand_decomposition(&dec, 9 * prec)?
        .rebase_modulus(9)?;
    (0..prec)
        .map(|m| {
            e.coeff(9 * m)
                .descend(3)
                .map_err(|_| CoreError::Saturation(format!("a_{m} is not in Q(zeta_3)")))
        })
        .collect()
}
