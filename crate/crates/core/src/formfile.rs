//! The hand-writable text format for newform input files.
//!
//! ```text
//! # comments anywhere
//! label 11a
//! level 11
//! weight 2
//! group gamma0            # gamma0 | gamma1 | gammaN
//! newform true
//! character mod=9 2->1    # optional: χ(2) = ζ_6^1 on the canonical generators
//! scale base=6 factor=6   # optional: f(τ) = f₀(6τ), f₀ of level 6
//! al 4=-1 9=1             # optional Atkin-Lehner signs
//! field 1                 # coefficients lie in Q(zeta_field)
//! a0 1:[0]
//! prec 100                # a_1 .. a_100 are declared (missing lines are 0)
//! coeffs
//! 1 1:[1]
//! 2 -2                    # bare rationals are shorthand for modulus 1
//! end
//! ```
//!
//! The canonical serializer writes coefficients in the full `M:[..]` form
//! and omits zero coefficients; parse ∘ serialize is the identity up to
//! whitespace and comments.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::characters::DirichletCharacter;
use crate::cyclotomic::CycNumber;
use crate::engine::{GroupTag, ModularFormInput, Scaling};
use crate::{CoreError, Result};

/// Parses a form file.
pub fn parse(text: &str) -> Result<ModularFormInput> {
    let mut label = String::new();
    let mut level: Option<u64> = None;
    let mut weight: Option<u32> = None;
    let mut group = GroupTag::Gamma0;
    let mut newform = false;
    let mut character: Option<(u64, Vec<(u64, u64)>)> = None;
    let mut scaling: Option<Scaling> = None;
    let mut al_table: BTreeMap<u64, i64> = BTreeMap::new();
    let mut field: Option<u64> = None;
    let mut a0: Option<CycNumber> = None;
    let mut prec: Option<usize> = None;
    let mut sparse: Vec<(usize, CycNumber)> = Vec::new();
    let mut in_coeffs = false;
    let mut saw_end = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| CoreError::Parse(format!("line {}: {msg}", lineno + 1));
        if in_coeffs {
            if line == "end" {
                in_coeffs = false;
                saw_end = true;
                continue;
            }
            let (idx, val) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| err("expected `<n> <value>`".into()))?;
            let n: usize = idx
                .trim()
                .parse()
                .map_err(|_| err(format!("bad coefficient index `{idx}`")))?;
            if n == 0 {
                return Err(err("coefficient indices start at 1; use a0 for the constant".into()));
            }
            sparse.push((n, parse_value(val.trim())?));
            continue;
        }
        let (key, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (line, ""),
        };
        match key {
            "label" => label = rest.to_string(),
            "level" => level = Some(rest.parse().map_err(|_| err("bad level".into()))?),
            "weight" => weight = Some(rest.parse().map_err(|_| err("bad weight".into()))?),
            "group" => {
                group = match rest {
                    "gamma0" => GroupTag::Gamma0,
                    "gamma1" => GroupTag::Gamma1,
                    "gammaN" => GroupTag::GammaN,
                    other => return Err(err(format!("unknown group `{other}`"))),
                }
            }
            "newform" => newform = rest == "true",
            "character" => {
                let mut modulus = None;
                let mut pairs = Vec::new();
                for tok in rest.split_whitespace() {
                    if let Some(m) = tok.strip_prefix("mod=") {
                        modulus = Some(m.parse().map_err(|_| err("bad character modulus".into()))?);
                    } else if let Some((g, e)) = tok.split_once("->") {
                        pairs.push((
                            g.parse().map_err(|_| err("bad character generator".into()))?,
                            e.parse().map_err(|_| err("bad character exponent".into()))?,
                        ));
                    } else {
                        return Err(err(format!("unexpected character token `{tok}`")));
                    }
                }
                let modulus = modulus.ok_or_else(|| err("character needs mod=<N>".into()))?;
                character = Some((modulus, pairs));
            }
            "scale" => {
                let mut base = None;
                let mut factor = None;
                for tok in rest.split_whitespace() {
                    if let Some(v) = tok.strip_prefix("base=") {
                        base = Some(v.parse().map_err(|_| err("bad scale base".into()))?);
                    } else if let Some(v) = tok.strip_prefix("factor=") {
                        factor = Some(v.parse().map_err(|_| err("bad scale factor".into()))?);
                    } else {
                        return Err(err(format!("unexpected scale token `{tok}`")));
                    }
                }
                scaling = Some(Scaling {
                    base_level: base.ok_or_else(|| err("scale needs base=".into()))?,
                    factor: factor.ok_or_else(|| err("scale needs factor=".into()))?,
                });
            }
            "al" => {
                for tok in rest.split_whitespace() {
                    let (q, e) = tok
                        .split_once('=')
                        .ok_or_else(|| err(format!("bad al token `{tok}`")))?;
                    al_table.insert(
                        q.parse().map_err(|_| err("bad al divisor".into()))?,
                        e.parse().map_err(|_| err("bad al sign".into()))?,
                    );
                }
            }
            "field" => field = Some(rest.parse().map_err(|_| err("bad field modulus".into()))?),
            "a0" => a0 = Some(parse_value(rest)?),
            "prec" => prec = Some(rest.parse().map_err(|_| err("bad prec".into()))?),
            "coeffs" => in_coeffs = true,
            other => return Err(err(format!("unknown key `{other}`"))),
        }
    }
    if in_coeffs || !saw_end {
        return Err(CoreError::Parse("missing `end` after coeffs".into()));
    }
    let level = level.ok_or_else(|| CoreError::Parse("missing level".into()))?;
    let weight = weight.ok_or_else(|| CoreError::Parse("missing weight".into()))?;
    let field = field.ok_or_else(|| CoreError::Parse("missing field".into()))?;
    let prec = prec.ok_or_else(|| CoreError::Parse("missing prec".into()))?;
    let a0 = a0
        .unwrap_or_else(|| CycNumber::zero(1))
        .rebase(field)
        .map_err(|_| CoreError::Parse("a0 does not lie in the declared field".into()))?;

    let mut coeffs = vec![CycNumber::zero(field); prec];
    for (n, v) in sparse {
        if n > prec {
            return Err(CoreError::Parse(format!(
                "coefficient index {n} exceeds declared prec {prec}"
            )));
        }
        coeffs[n - 1] = v
            .rebase(field)
            .map_err(|_| CoreError::Parse(format!("a_{n} does not lie in Q(zeta_{field})")))?;
    }

    let character = match character {
        None => None,
        Some((m, pairs)) => Some(DirichletCharacter::from_generator_exponents(m, &pairs)?),
    };

    let form = ModularFormInput {
        label,
        level,
        weight,
        group,
        character,
        coeff_modulus: field,
        a0,
        coeffs,
        is_newform: newform,
        al_table,
        scaling,
    };
    form.validate()?;
    Ok(form)
}

fn parse_value(s: &str) -> Result<CycNumber> {
    if s.contains(':') {
        s.parse()
    } else {
        // bare rational shorthand
        let r = s
            .parse::<CycNumber>()
            .err()
            .map(|_| ())
            .map_or_else(|| s.parse::<CycNumber>(), |_| parse_bare_rational(s))?;
        Ok(r)
    }
}

fn parse_bare_rational(s: &str) -> Result<CycNumber> {
    let lit = format!("1:[{s}]");
    lit.parse()
}

/// Canonical serialization; `parse(serialize(f))` reproduces `f` and the
/// output is a fixpoint of parse ∘ serialize.
pub fn serialize(form: &ModularFormInput) -> String {
    let mut out = String::new();
    writeln!(out, "label {}", form.label).unwrap();
    writeln!(out, "level {}", form.level).unwrap();
    writeln!(out, "weight {}", form.weight).unwrap();
    let group = match form.group {
        GroupTag::Gamma0 => "gamma0",
        GroupTag::Gamma1 => "gamma1",
        GroupTag::GammaN => "gammaN",
    };
    writeln!(out, "group {group}").unwrap();
    writeln!(out, "newform {}", form.is_newform).unwrap();
    if let Some(chi) = &form.character {
        let pairs: Vec<String> = chi
            .generator_exponents()
            .iter()
            .map(|(g, e)| format!("{g}->{e}"))
            .collect();
        writeln!(out, "character mod={} {}", chi.modulus(), pairs.join(" ")).unwrap();
    }
    if let Some(sc) = &form.scaling {
        writeln!(out, "scale base={} factor={}", sc.base_level, sc.factor).unwrap();
    }
    if !form.al_table.is_empty() {
        let entries: Vec<String> = form
            .al_table
            .iter()
            .map(|(q, e)| format!("{q}={e}"))
            .collect();
        writeln!(out, "al {}", entries.join(" ")).unwrap();
    }
    writeln!(out, "field {}", form.coeff_modulus).unwrap();
    writeln!(out, "a0 {}", form.a0).unwrap();
    writeln!(out, "prec {}", form.coeffs.len()).unwrap();
    writeln!(out, "coeffs").unwrap();
    for (i, c) in form.coeffs.iter().enumerate() {
        if !c.is_zero() {
            writeln!(out, "{} {}", i + 1, c).unwrap();
        }
    }
    writeln!(out, "end").unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# a toy declaration (not a real form; validation only sees structure)
label toy
level 3
weight 4
group gamma0
newform false
field 1
a0 1:[1/240]
prec 12
coeffs
1 1
2 9
3 28            # bare rationals allowed
4 1:[73]
end
";

    #[test]
    fn parse_and_reserialize_fixpoint() {
        let f = parse(SAMPLE).unwrap();
        assert_eq!(f.level, 3);
        assert_eq!(f.weight, 4);
        assert_eq!(f.coeffs.len(), 12);
        assert_eq!(f.coeffs[2], CycNumber::from_integer(28));
        assert!(f.coeffs[5].is_zero());
        let s1 = serialize(&f);
        let g = parse(&s1).unwrap();
        let s2 = serialize(&g);
        assert_eq!(s1, s2);
        assert_eq!(f.a0, g.a0);
        assert_eq!(f.coeffs, g.coeffs);
    }

    #[test]
    fn rejects_sturm_violation() {
        // sturm(Γ(3), 4) = 9 in q^{1/3}; one declared coefficient gives
        // width-3 precision 6
        let short = "label s\nlevel 3\nweight 4\ngroup gamma0\nfield 1\na0 1:[0]\nprec 1\ncoeffs\n1 1\nend\n";
        assert!(matches!(
            parse(short),
            Err(CoreError::PrecisionTooLow { .. })
        ));
    }

    #[test]
    fn rejects_character_parity_mismatch() {
        let text = "\
label bad
level 9
weight 2
group gamma0
newform false
character mod=9 2->1
field 3
a0 1:[0]
prec 20
coeffs
1 1
end
";
        // χ(−1) = −1 but weight 2 is even
        assert!(matches!(
            parse(text),
            Err(CoreError::BadCharacter(_))
        ));
    }

    #[test]
    fn rejects_unknown_key_and_missing_end() {
        assert!(parse("wibble 3\n").is_err());
        assert!(parse("label x\nlevel 3\nweight 4\nfield 1\nprec 9\ncoeffs\n1 1\n").is_err());
    }
}
