//! Dirichlet characters mod N with exact cyclotomic values: construction
//! from images of canonical unit-group generators, conductors and primitive
//! parts, the Q-part / (N/Q)-part factorization, and Gauss sums.

use crate::arith::{self, crt, gcd, lcm, phi, unit_order};
use crate::cyclotomic::{AbelianFieldDescriptor, CycNumber};
use crate::{CoreError, Result};

/// The canonical generating set of `(ℤ/Nℤ)^×`: CRT-ordered by ascending
/// prime, smallest primitive root for odd prime powers and for 4, and the
/// pair (−1, 5) for 2^e with e ≥ 3.  Each generator comes with its order.
pub fn canonical_generators(n: u64) -> Vec<(u64, u64)> {
    if n <= 2 {
        return Vec::new();
    }
    let mut gens = Vec::new();
    for (p, e) in arith::factorize(n) {
        let pe = p.pow(e);
        let rest = n / pe;
        if p == 2 {
            match e {
                1 => {}
                2 => gens.push(lift_gen(3, pe, rest, n)),
                _ => {
                    gens.push(lift_gen(pe - 1, pe, rest, n));
                    gens.push(lift_gen(5, pe, rest, n));
                }
            }
        } else {
            let g = smallest_primitive_root(pe);
            gens.push(lift_gen(g, pe, rest, n));
        }
    }
    gens
}

fn lift_gen(g: u64, pe: u64, rest: u64, n: u64) -> (u64, u64) {
    let lifted = if rest == 1 { g % pe } else { crt(g % pe, pe, 1, rest) };
    (lifted, unit_order(lifted, n))
}

fn smallest_primitive_root(pe: u64) -> u64 {
    let target = phi(pe);
    (2..pe)
        .find(|&g| gcd(g, pe) == 1 && unit_order(g, pe) == target)
        .expect("odd prime powers are cyclic")
}

/// A Dirichlet character mod N with exact root-of-unity values.
///
/// Values are stored as a table of exponents t(a) with
/// `χ(a) = ζ_order^{t(a)}` for units a and `χ(a) = 0` otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletCharacter {
    modulus: u64,
    order: u64,
    conductor: u64,
    /// exponent of ζ_order at each residue; None for non-units
    table: Vec<Option<u64>>,
    /// images of the canonical generators as exponents of ζ_{order(gen)}
    gen_exponents: Vec<(u64, u64)>,
}

impl DirichletCharacter {
    /// The trivial character mod N.
    pub fn trivial(n: u64) -> DirichletCharacter {
        let gens = canonical_generators(n);
        Self::from_generator_exponents(n, &gens.iter().map(|&(g, _)| (g, 0)).collect::<Vec<_>>())
            .expect("trivial character")
    }

    /// Builds a character from `(generator, exponent)` pairs: for a
    /// canonical generator g of order d, the pair (g, e) declares
    /// `χ(g) = ζ_d^e`.  The pairs must cover the canonical generators.
    pub fn from_generator_exponents(n: u64, pairs: &[(u64, u64)]) -> Result<DirichletCharacter> {
        let gens = canonical_generators(n);
        if pairs.len() != gens.len() {
            return Err(CoreError::BadCharacter(format!(
                "expected images for the {} canonical generators of (Z/{n})^*, got {}",
                gens.len(),
                pairs.len()
            )));
        }
        for (&(g, _), &(pg, _)) in gens.iter().zip(pairs.iter()) {
            if g != pg {
                return Err(CoreError::BadCharacter(format!(
                    "generator {pg} is not canonical (expected {g}); canonical set: {:?}",
                    gens.iter().map(|&(g, _)| g).collect::<Vec<_>>()
                )));
            }
        }
        // order = lcm of the orders of the individual images
        let mut order = 1u64;
        for (&(_, d), &(_, e)) in gens.iter().zip(pairs.iter()) {
            let img_order = d / gcd(d, e);
            order = lcm(order, img_order);
        }
        // exponent table by enumerating the product of cyclic factors
        let mut table: Vec<Option<u64>> = vec![None; n.max(1) as usize];
        let mut pointer = vec![0u64; gens.len()];
        loop {
            let mut a = 1u64;
            let mut t = 0u64;
            for (i, (&(g, d), &(_, e))) in gens.iter().zip(pairs.iter()).enumerate() {
                a = if n == 1 { 0 } else { a * arith::pow_mod(g, pointer[i], n) % n };
                // χ(g^j) = ζ_d^{e j} = ζ_order^{(order/d) e j}
                t = (t + (order / d) % order * (e % d) % order * (pointer[i] % d)) % order;
            }
            let idx = if n == 1 { 0 } else { a as usize };
            table[idx] = Some(t % order);
            // advance mixed-radix counter
            let mut i = 0;
            loop {
                if i == gens.len() {
                    // full cycle
                    let conductor = conductor_of(n, &table);
                    return Ok(DirichletCharacter {
                        modulus: n,
                        order,
                        conductor,
                        table,
                        gen_exponents: pairs.to_vec(),
                    });
                }
                pointer[i] += 1;
                if pointer[i] < gens[i].1 {
                    break;
                }
                pointer[i] = 0;
                i += 1;
            }
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Order of χ in the character group.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus
    }

    pub fn generator_exponents(&self) -> &[(u64, u64)] {
        &self.gen_exponents
    }

    /// χ(a) as an exact cyclotomic number (zero for non-units).
    pub fn value(&self, a: i64) -> CycNumber {
        match self.exponent(a) {
            None => CycNumber::zero(self.order),
            Some(t) => CycNumber::root_of_unity(self.order, t as i64),
        }
    }

    /// The exponent t with χ(a) = ζ_order^t, or None when gcd(a, N) > 1.
    pub fn exponent(&self, a: i64) -> Option<u64> {
        if self.modulus == 1 {
            return Some(0);
        }
        let r = a.rem_euclid(self.modulus as i64) as usize;
        self.table[r]
    }

    /// χ(−1) as ±1.
    pub fn parity(&self) -> i64 {
        match self.exponent(-1) {
            Some(t) if 2 * t % self.order == 0 && t != 0 => -1,
            Some(0) => 1,
            _ => {
                // χ(−1)² = 1 forces the exponent to be 0 or order/2
                unreachable!("χ(−1) must be ±1")
            }
        }
    }

    /// Whether χ(−1) = (−1)^k.
    pub fn parity_matches_weight(&self, k: u32) -> bool {
        let want = if k % 2 == 0 { 1 } else { -1 };
        self.parity() == want
    }

    /// The primitive character mod the conductor inducing χ.
    pub fn primitive_part(&self) -> DirichletCharacter {
        let m = self.conductor;
        if m == self.modulus {
            return self.clone();
        }
        let gens = canonical_generators(m);
        let pairs: Vec<(u64, u64)> = gens
            .iter()
            .map(|&(g, d)| {
                let lifted = lift_unit(g, m, self.modulus);
                let t = self.exponent(lifted as i64).expect("lift is a unit");
                // χ*(g) = ζ_order^t = ζ_d^{t d / order} (d/order cancels exactly)
                let e = t * d / self.order;
                debug_assert_eq!(t * d % self.order, 0);
                (g, e % d.max(1))
            })
            .collect();
        let prim = DirichletCharacter::from_generator_exponents(m, &pairs)
            .expect("canonical pairs by construction");
        debug_assert_eq!(prim.conductor(), m);
        prim
    }

    /// Splits χ = χ_Q · χ_{N/Q} for a maximal divisor Q of N.
    /// χ_Q agrees with χ on residues ≡ 1 mod N/Q via the CRT idempotents.
    pub fn q_part(&self, q: u64) -> Result<(DirichletCharacter, DirichletCharacter)> {
        let n = self.modulus;
        if q == 0 || n % q != 0 || gcd(q, n / q) != 1 {
            return Err(CoreError::BadCharacter(format!(
                "Q = {q} is not a maximal divisor of N = {n}"
            )));
        }
        let r = n / q;
        let part = |m: u64, other: u64| -> Result<DirichletCharacter> {
            let gens = canonical_generators(m);
            let pairs: Vec<(u64, u64)> = gens
                .iter()
                .map(|&(g, d)| {
                    let lifted = if m == n { g } else { crt(g % m, m, 1 % other.max(1), other) };
                    let t = self.exponent(lifted as i64).expect("unit by construction");
                    // order of ζ^t must divide d here
                    debug_assert_eq!(t * d % self.order, 0);
                    (g, t * d / self.order % d.max(1))
                })
                .collect();
            DirichletCharacter::from_generator_exponents(m, &pairs)
        };
        let chi_q = if q == n { self.clone() } else { part(q, r)? };
        let chi_r = if r == n { self.clone() } else { part(r, q)? };
        Ok((chi_q, chi_r))
    }

    /// The Gauss sum `G(χ) = Σ_{u ∈ (ℤ/mℤ)^×} χ(u) ζ_m^u` of a primitive
    /// character, as an exact element of `ℚ(ζ_lcm(m, order)})`.
    pub fn gauss_sum(&self) -> Result<CycNumber> {
        if !self.is_primitive() {
            return Err(CoreError::BadCharacter(format!(
                "Gauss sums are only computed for primitive characters (conductor {} < modulus {})",
                self.conductor, self.modulus
            )));
        }
        let m = self.modulus;
        if m == 1 {
            return Ok(CycNumber::one(1));
        }
        let big = lcm(m, self.order);
        let mut acc = CycNumber::zero(big);
        for u in arith::units(m) {
            let zu = CycNumber::root_of_unity(m, u as i64).embed(big)?;
            let cu = self.value(u as i64).embed(big)?;
            acc = acc.add(&cu.mul(&zu));
        }
        Ok(acc)
    }

    /// ℚ(χ) = ℚ(ζ_order) as a field descriptor.
    pub fn field_of_character(&self) -> AbelianFieldDescriptor {
        AbelianFieldDescriptor::cyclotomic(self.order)
    }

    /// The conjugate character χ̄.
    pub fn conjugate(&self) -> DirichletCharacter {
        let pairs: Vec<(u64, u64)> = self
            .gen_exponents
            .iter()
            .map(|&(g, e)| {
                let d = unit_order(g, self.modulus);
                (g, (d - e % d) % d)
            })
            .collect();
        DirichletCharacter::from_generator_exponents(self.modulus, &pairs).unwrap()
    }
}

/// Minimal d | N through which the table factors.
fn conductor_of(n: u64, table: &[Option<u64>]) -> u64 {
    if n == 1 {
        return 1;
    }
    'outer: for d in arith::divisors(n) {
        // χ factors through (Z/d)^* iff χ(a) = 1 whenever a ≡ 1 mod d
        for a in arith::units(n) {
            if a % d == 1 % d && table[a as usize] != Some(0) {
                continue 'outer;
            }
        }
        return d;
    }
    n
}

/// A unit b mod n with b ≡ a mod m (for m | n, gcd(a, m) = 1).
fn lift_unit(a: u64, m: u64, n: u64) -> u64 {
    let mut b = a % m;
    if b == 0 {
        b = m; // only for m = 1
    }
    while gcd(b, n) != 1 {
        b += m;
    }
    b % n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::field_of;

    fn level9_chi() -> DirichletCharacter {
        // χ mod 9 with χ(2) = ζ_6: χ(4) = ζ_3, χ(−1) = −1
        DirichletCharacter::from_generator_exponents(9, &[(2, 1)]).unwrap()
    }

    #[test]
    fn canonical_generator_sets() {
        assert_eq!(canonical_generators(9), vec![(2, 6)]);
        assert_eq!(canonical_generators(5), vec![(2, 4)]);
        assert_eq!(canonical_generators(4), vec![(3, 2)]);
        assert_eq!(canonical_generators(8), vec![(7, 2), (5, 2)]);
        // 36 = 4 * 9: CRT lifts of 3 (mod 4) and 2 (mod 9)
        let g36 = canonical_generators(36);
        assert_eq!(g36.len(), 2);
        assert_eq!(g36[0].0 % 4, 3);
        assert_eq!(g36[0].0 % 9, 1);
        assert_eq!(g36[1].0 % 4, 1);
        assert_eq!(g36[1].0 % 9, 2);
    }

    #[test]
    fn trivial_character() {
        let chi = DirichletCharacter::trivial(12);
        assert_eq!(chi.order(), 1);
        assert_eq!(chi.conductor(), 1);
        assert_eq!(chi.value(5), CycNumber::one(1));
        assert!(chi.value(4).is_zero());
        assert_eq!(chi.parity(), 1);
    }

    #[test]
    fn level9_character_values() {
        let chi = level9_chi();
        assert_eq!(chi.order(), 6);
        assert_eq!(chi.conductor(), 9);
        // χ(4) = ζ_3
        assert_eq!(chi.value(4), CycNumber::zeta(3).rebase(6).unwrap());
        // χ(−1) = −1
        assert_eq!(chi.parity(), -1);
        assert!(chi.parity_matches_weight(3));
        // multiplicativity across the whole unit group
        for a in arith::units(9) {
            for b in arith::units(9) {
                let lhs = chi.value((a * b) as i64);
                let rhs = chi.value(a as i64).mul(&chi.value(b as i64));
                assert_eq!(lhs, rhs);
            }
        }
        assert!(chi.value(3).is_zero());
    }

    #[test]
    fn multiplicativity_exhaustive_small_levels() {
        for n in 3..=30u64 {
            let gens = canonical_generators(n);
            // a nontrivial exponent choice per generator
            let pairs: Vec<(u64, u64)> = gens.iter().map(|&(g, d)| (g, 1 % d.max(1))).collect();
            let chi = DirichletCharacter::from_generator_exponents(n, &pairs).unwrap();
            for a in arith::units(n) {
                for b in arith::units(n) {
                    assert_eq!(
                        chi.value((a * b) as i64),
                        chi.value(a as i64).mul(&chi.value(b as i64)),
                        "N={n} a={a} b={b}"
                    );
                }
            }
        }
    }

    #[test]
    fn conductor_brute_force_agreement() {
        // conductor = minimal d | N through which χ factors, checked
        // against the defining property pointwise
        for n in [8u64, 9, 12, 16, 24, 36, 45, 60, 100] {
            let gens = canonical_generators(n);
            for mask in 0..(1u32 << gens.len().min(4)) {
                let pairs: Vec<(u64, u64)> = gens
                    .iter()
                    .enumerate()
                    .map(|(i, &(g, d))| (g, if mask & (1 << i) != 0 { 1 % d.max(1) } else { 0 }))
                    .collect();
                let chi = DirichletCharacter::from_generator_exponents(n, &pairs).unwrap();
                let m = chi.conductor();
                assert_eq!(n % m, 0);
                // χ constant on classes mod m
                for a in arith::units(n) {
                    for b in arith::units(n) {
                        if a % m == b % m {
                            assert_eq!(chi.value(a as i64), chi.value(b as i64));
                        }
                    }
                }
                // minimality
                for d in arith::divisors(m) {
                    if d == m {
                        continue;
                    }
                    let factors = arith::units(n).into_iter().all(|a| {
                        arith::units(n)
                            .into_iter()
                            .filter(|&b| a % d == b % d)
                            .all(|b| chi.value(a as i64) == chi.value(b as i64))
                    });
                    assert!(!factors, "conductor {m} not minimal for N={n}: {d} works");
                }
            }
        }
    }

    #[test]
    fn q_part_trivial_cases() {
        let chi = DirichletCharacter::trivial(45);
        let (cq, cr) = chi.q_part(9).unwrap();
        assert!(cq.is_trivial() && cr.is_trivial());

        let chi9 = level9_chi();
        let (cq, cr) = chi9.q_part(9).unwrap();
        assert_eq!(cq, chi9);
        assert!(cr.is_trivial());
        assert_eq!(cr.modulus(), 1);
    }

    #[test]
    fn q_part_product_reconstructs_chi_n45() {
        // character of conductor 45: order-6 part mod 9 times quadratic mod 5
        let gens = canonical_generators(45);
        let pairs: Vec<(u64, u64)> = gens.iter().map(|&(g, d)| (g, 1 % d.max(1))).collect();
        let chi = DirichletCharacter::from_generator_exponents(45, &pairs).unwrap();
        assert_eq!(chi.conductor(), 45);
        let (cq, cr) = chi.q_part(9).unwrap();
        assert_eq!(cq.modulus(), 9);
        assert_eq!(cr.modulus(), 5);
        for u in arith::units(45) {
            let lhs = chi.value(u as i64);
            let rhs = cq.value(u as i64).mul(&cr.value(u as i64));
            assert_eq!(lhs, rhs, "u = {u}");
        }
        // conductors multiply
        assert_eq!(cq.conductor() * cr.conductor(), chi.conductor());
        assert!(chi.q_part(15).is_err());
    }

    #[test]
    fn gauss_sum_trivial_mod_1() {
        let chi = DirichletCharacter::trivial(1);
        assert_eq!(chi.gauss_sum().unwrap(), CycNumber::one(1));
    }

    #[test]
    fn gauss_sum_quadratic_mod_3() {
        // G = ζ_3 − ζ_3² (= √−3)
        let chi = DirichletCharacter::from_generator_exponents(3, &[(2, 1)]).unwrap();
        assert_eq!(chi.order(), 2);
        let g = chi.gauss_sum().unwrap();
        let want = CycNumber::zeta(3)
            .sub(&CycNumber::root_of_unity(3, 2))
            .embed(6)
            .unwrap();
        assert_eq!(g.rebase(6).unwrap(), want);
        // |G|² = 3
        let norm = g.mul(&g.conj());
        assert_eq!(norm.as_rational().unwrap(), num_rational::BigRational::from_integer(3.into()));
    }

    #[test]
    fn gauss_sum_identity_mod_9() {
        // G(χ)·G(χ̄) = χ(−1)·9 for the primitive sextic χ mod 9
        let chi = level9_chi();
        let g = chi.gauss_sum().unwrap();
        let gbar = chi.conjugate().gauss_sum().unwrap();
        let prod = g.mul(&gbar);
        let want = CycNumber::from_integer(-9);
        assert_eq!(prod, want.rebase(prod.modulus()).unwrap());
        // σ-twist σ_λ(G) = χ̄(λ)·G for σ fixing ℚ(χ): G lives in ℚ(ζ_18),
        // so sweep the units of 18 that are ≡ 1 mod 6
        for lam in [1u64, 7, 13] {
            let lhs = g.galois(lam).unwrap();
            let rhs = chi.conjugate().value(lam as i64).mul(&g);
            assert_eq!(lhs, rhs, "lambda = {lam}");
        }
    }

    #[test]
    fn gauss_sum_rejects_imprimitive() {
        let chi = DirichletCharacter::trivial(3);
        assert!(chi.gauss_sum().is_err());
    }

    #[test]
    fn primitive_part_roundtrip() {
        // trivial character mod 12 has primitive part mod 1
        let chi = DirichletCharacter::trivial(12);
        let p = chi.primitive_part();
        assert_eq!(p.modulus(), 1);
        // induce the quadratic character mod 3 up to mod 12 via generators
        let gens = canonical_generators(12);
        // 12 = 4*9? no: 4*3; generators: 3-part has gen lifted from 2 mod 3
        let pairs: Vec<(u64, u64)> = gens
            .iter()
            .map(|&(g, d)| if g % 3 == 2 && g % 4 == 1 { (g, 1 % d.max(1)) } else { (g, 0) })
            .collect();
        let chi12 = DirichletCharacter::from_generator_exponents(12, &pairs).unwrap();
        assert_eq!(chi12.conductor(), 3);
        let prim = chi12.primitive_part();
        assert_eq!(prim.modulus(), 3);
        assert_eq!(prim.order(), 2);
        for u in arith::units(12) {
            assert_eq!(chi12.value(u as i64), prim.value(u as i64));
        }
    }

    #[test]
    fn field_of_character_examples() {
        assert_eq!(
            DirichletCharacter::trivial(7).field_of_character().degree(),
            1
        );
        let quad = DirichletCharacter::from_generator_exponents(3, &[(2, 1)]).unwrap();
        assert_eq!(quad.field_of_character().degree(), 1); // Q(ζ_2) = Q
        let chi = level9_chi();
        // order 6: Q(ζ_6) = Q(ζ_3)
        let f = chi.field_of_character();
        assert!(f.same_field(&AbelianFieldDescriptor::cyclotomic(3)));
        // ℚ(χ) really is generated by the values
        let vals: Vec<CycNumber> = arith::units(9).into_iter().map(|u| chi.value(u as i64)).collect();
        let gen = field_of(&vals, 6).unwrap();
        assert!(gen.same_field(&f));
    }
}
