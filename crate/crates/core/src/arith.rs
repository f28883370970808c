//! Small integer number theory shared across the crate.

/// Greatest common divisor with the convention `gcd(0, n) = n`.
pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// gcd of a signed value with a modulus, using `gcd(0, n) = n`.
pub fn gcd_i(a: i64, n: u64) -> u64 {
    gcd(a.unsigned_abs(), n)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    num_integer::lcm(a, b)
}

/// Extended gcd: returns (g, x, y) with a*x + b*y = g, g >= 0.
pub fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = egcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// Inverse of `a` modulo `n`, if it exists.
pub fn inv_mod(a: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(0);
    }
    let (g, x, _) = egcd((a % n) as i64, n as i64);
    if g != 1 {
        None
    } else {
        Some(x.rem_euclid(n as i64) as u64)
    }
}

pub fn is_unit(a: u64, n: u64) -> bool {
    gcd(a % n.max(1), n) == 1 || n == 1
}

/// Prime factorization by trial division; fine for the moduli in scope.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn phi(n: u64) -> u64 {
    let mut out = n;
    for (p, _) in factorize(n) {
        out = out / p * (p - 1);
    }
    out
}

/// All positive divisors, sorted.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1];
    for (p, e) in factorize(n) {
        let base = out.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            out.extend(base.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    out
}

/// Units of Z/nZ in ascending order. For n = 1 this is `[0]` (the trivial group).
pub fn units(n: u64) -> Vec<u64> {
    if n == 1 {
        return vec![0];
    }
    (1..n).filter(|&a| gcd(a, n) == 1).collect()
}

pub fn pow_mod(mut base: u64, mut exp: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % n;
        }
        base = base * base % n;
        exp >>= 1;
    }
    acc
}

/// Multiplicative order of `a` modulo `n` (requires gcd(a, n) = 1).
pub fn unit_order(a: u64, n: u64) -> u64 {
    if n == 1 {
        return 1;
    }
    assert!(is_unit(a, n), "{a} is not a unit mod {n}");
    let mut x = a % n;
    let mut ord = 1;
    while x != 1 {
        x = x * (a % n) % n;
        ord += 1;
    }
    ord
}

/// Writes n = s^2 * r with r squarefree; returns (s, r).
pub fn squarefree_decompose(n: u64) -> (u64, u64) {
    let mut s = 1;
    let mut r = 1;
    for (p, e) in factorize(n) {
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            r *= p;
        }
    }
    (s, r)
}

/// CRT lift: value ≡ a mod m, ≡ b mod n for coprime m, n.
pub fn crt(a: u64, m: u64, b: u64, n: u64) -> u64 {
    assert_eq!(gcd(m, n), 1);
    let mn = m * n;
    let (_, x, y) = egcd(m as i64, n as i64);
    // m*x + n*y = 1
    let am = (b as i128) * (m as i128) * (x as i128) + (a as i128) * (n as i128) * (y as i128);
    am.rem_euclid(mn as i128) as u64
}

/// The p-primary part of n for the primes dividing c, with the convention
/// that every prime divides 0 (so `c = 0` gives n itself).
pub fn c_part(n: u64, c: u64) -> u64 {
    if c == 0 {
        return n;
    }
    let mut out = 1;
    for (p, e) in factorize(n) {
        if c % p == 0 {
            out *= p.pow(e);
        }
    }
    out
}
