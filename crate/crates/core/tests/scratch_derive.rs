use cuspexp_core::cyclotomic::CycNumber;
use cuspexp_core::engine::{sturm_bound, Engine};
use cuspexp_core::qseries::QExpansion;
use cuspexp_core::recipes;

#[test]
fn eta4_is_in_m2_gamma6() {
    let engine = Engine::new();
    let sturm = sturm_bound(6, 2);
    let coeffs = recipes::eta_36a(sturm + 5); // width-6 coefficients of eta(tau)^4
    let f0 = QExpansion::from_coeffs(6, 1, coeffs);
    let t0 = std::time::Instant::now();
    let dec = engine.express(&f0, 6, 2).expect("eta^4 must lie in M_2(Gamma(6))");
    println!("level 6 decomposition: {} terms in {:?}", dec.terms.len(), t0.elapsed());
    assert!(!dec.is_empty());
}

#[test]
fn eta2eta2_level8_and_9() {
    let engine = Engine::new();
    for (name, coeffs_fn, base) in [
        ("32a base", recipes::eta_32a as fn(usize) -> Vec<CycNumber>, 8u64),
        ("27a base", recipes::eta_27a as fn(usize) -> Vec<CycNumber>, 9u64),
    ] {
        let sturm = sturm_bound(base, 2);
        let f0 = QExpansion::from_coeffs(base, 1, coeffs_fn(sturm + 5));
        let t0 = std::time::Instant::now();
        let dec = engine.express(&f0, base, 2).expect(name);
        println!("{name}: {} terms in {:?}", dec.terms.len(), t0.elapsed());
    }
}

#[test]
fn derive_level9() {
    let engine = Engine::new();
    let t0 = std::time::Instant::now();
    let coeffs = recipes::level9_coefficients(&engine, 12).expect("derivation");
    println!("derived in {:?}", t0.elapsed());
    for (m, c) in coeffs.iter().enumerate() {
        println!("a_{m} = {c}");
    }
}

#[test]
fn level11_decompose() {
    let engine = Engine::new();
    let sturm = sturm_bound(11, 2);
    println!("sturm(11,2) = {sturm}");
    let t0 = std::time::Instant::now();
    let coeffs = recipes::eta_11a(sturm / 11 + 2);
    let f = QExpansion::from_coeffs(1, 1, coeffs).rescale_width(11).unwrap();
    let dec = engine.express(&f.truncate(sturm + 5), 11, 2).expect("11a in M_2(Gamma(11))");
    println!("level 11 decomposition: {} terms in {:?}", dec.terms.len(), t0.elapsed());
    let t1 = std::time::Instant::now();
    let out = engine.slash_decomposition(&dec, &cuspexp_core::modmatrix::MatZ::S, 60).unwrap();
    println!("slash by S at prec 60 in {:?}; first coeffs:", t1.elapsed());
    for t in 0..14 { if !out.coeff(t).is_zero() { println!("  c[{t}] = {}", out.coeff(t)); } }
}
