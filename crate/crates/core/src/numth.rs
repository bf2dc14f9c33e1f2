//! Integer utilities: primality, factorization, gcd.
//!
//! Factorization is needed to certify primitive elements (the multiplicative
//! order test requires the prime factors of |F| - 1); everything stays in
//! 64/128-bit integers, worst case a Pollard-rho split of a 63-bit cofactor.

/// Greatest common divisor of two `u64`s.
pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Greatest common divisor of two `u128`s.
pub fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e != 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for `u64` (the standard 7-base certificate).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard's rho (Brent variant) for a single nontrivial factor of an odd
/// composite.  Deterministic retry sequence so factorizations are stable.
fn pollard_rho(n: u64) -> u64 {
    debug_assert!(n > 3 && !is_prime_u64(n));
    for c in 1u64.. {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!()
}

/// Full factorization of `n` as ascending `(prime, exponent)` pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    let push = |p: u64, out: &mut Vec<(u64, u32)>| {
        if let Some(last) = out.iter_mut().find(|(q, _)| *q == p) {
            last.1 += 1;
        } else {
            out.push((p, 1));
        }
    };
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n % p == 0 {
            push(p, &mut out);
            n /= p;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            push(m, &mut out);
            continue;
        }
        let d = pollard_rho(m);
        stack.push(d);
        stack.push(m / d);
    }
    out.sort_unstable();
    out
}

/// Distinct prime factors of `n`.
pub fn prime_factors_u64(n: u64) -> Vec<u64> {
    factor_u64(n).into_iter().map(|(p, _)| p).collect()
}

/// `p^n` as `u128`, or `None` on overflow.
pub fn checked_pow_u128(p: u64, n: u32) -> Option<u128> {
    let mut r: u128 = 1;
    for _ in 0..n {
        r = r.checked_mul(p as u128)?;
    }
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small_and_carmichael() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(3));
        assert!(!is_prime_u64(561)); // Carmichael
        assert!(!is_prime_u64(1));
        assert!(is_prime_u64((1 << 31) - 1)); // Mersenne prime 2^31-1
        assert!(!is_prime_u64((1 << 29) - 1)); // 233 * 1103 * 2089
    }

    #[test]
    fn factors_of_mersenne_numbers() {
        assert_eq!(factor_u64(15), vec![(3, 1), (5, 1)]);
        assert_eq!(factor_u64(63), vec![(3, 2), (7, 1)]);
        assert_eq!(factor_u64(255), vec![(3, 1), (5, 1), (17, 1)]);
        assert_eq!(factor_u64(1023), vec![(3, 1), (11, 1), (31, 1)]);
        // 2^36 - 1 = 3^3 * 5 * 7 * 13 * 19 * 37 * 73 * 109
        let f = factor_u64((1u64 << 36) - 1);
        let back: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
        assert_eq!(back, (1u64 << 36) - 1);
        assert_eq!(f[0], (3, 3));
    }

    #[test]
    fn factorization_reconstructs_large_inputs() {
        for n in [(1u64 << 60) - 1, (1u64 << 62) - 1, 999_999_999_999_999_989] {
            let f = factor_u64(n);
            let back: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n);
            for &(p, _) in &f {
                assert!(is_prime_u64(p));
            }
        }
    }
}
