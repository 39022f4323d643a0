//! Small-integer number theory shared across the crate: factorization by
//! trial division, Euler's totient, primitive roots of odd prime powers,
//! and a cube-free test. Everything here operates on `u64` moduli in the
//! ranges the rest of the crate cares about (up to a few million), so
//! trial division is plenty.

/// Prime factorization as `(prime, exponent)` pairs in ascending order.
/// `factorize(1)` is empty; `factorize(0)` panics.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "factorize(0)");
    let mut out = Vec::new();
    let mut push = |p: u64, n: &mut u64| {
        if *n % p == 0 {
            let mut e = 0u32;
            while *n % p == 0 {
                *n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut p = 5u64;
    while p.saturating_mul(p) <= n {
        push(p, &mut n);
        push(p + 2, &mut n);
        p += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n > 1 && factorize(n) == [(n, 1)]
}

/// True when no cube divides `n`.
pub fn is_cubefree(n: u64) -> bool {
    factorize(n).iter().all(|&(_, e)| e < 3)
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// `base^exp mod m` with `m` small enough that `m*m` fits in u128.
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    assert!(m > 0);
    let mut base = (base % m) as u128;
    let m = m as u128;
    let mut acc: u128 = 1 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc as u64
}

/// Multiplicative order of `a` modulo `m`, for `gcd(a, m) = 1`.
pub fn order_mod(a: u64, m: u64) -> u64 {
    assert_eq!(gcd(a, m), 1, "order_mod of non-unit");
    if m == 1 {
        return 1; // the trivial group
    }
    let group = euler_phi(m);
    // The order divides φ(m); test divisors in ascending order.
    let mut divs: Vec<u64> = Vec::new();
    let mut d = 1;
    while d * d <= group {
        if group % d == 0 {
            divs.push(d);
            divs.push(group / d);
        }
        d += 1;
    }
    divs.sort_unstable();
    divs.dedup();
    for d in divs {
        if pow_mod(a, d, m) == 1 {
            return d;
        }
    }
    unreachable!("order must divide the group order")
}

/// Smallest primitive root modulo `m`, where `m` is an odd prime power.
/// Panics for moduli whose unit group is not cyclic in that form.
pub fn primitive_root(m: u64) -> u64 {
    let f = factorize(m);
    assert!(
        f.len() == 1 && f[0].0 != 2,
        "primitive_root expects an odd prime power, got {m}"
    );
    let group = euler_phi(m);
    for g in 2..m {
        if gcd(g, m) == 1 && order_mod(g, m) == group {
            return g;
        }
    }
    unreachable!("odd prime powers have primitive roots")
}

/// Mathematical remainder in `0..m`, for possibly negative arguments.
pub fn rem_euclid_i64(v: i64, m: u64) -> u64 {
    v.rem_euclid(m as i64) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_small() {
        assert_eq!(factorize(1), []);
        assert_eq!(factorize(2), [(2, 1)]);
        assert_eq!(factorize(360), [(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(729), [(3, 6)]);
        assert_eq!(factorize(1_000_003), [(1_000_003, 1)]);
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (2..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(!is_prime(1));
        assert!(is_prime(1_000_003));
    }

    #[test]
    fn cubefree() {
        assert!(is_cubefree(1));
        assert!(is_cubefree(4));
        assert!(is_cubefree(36));
        assert!(!is_cubefree(8));
        assert!(!is_cubefree(54));
    }

    #[test]
    fn totient() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(10), 4);
        assert_eq!(euler_phi(729), 486);
        assert_eq!(euler_phi(97), 96);
    }

    #[test]
    fn powers_and_orders() {
        assert_eq!(pow_mod(2, 10, 1000), 24);
        assert_eq!(pow_mod(7, 0, 13), 1);
        assert_eq!(order_mod(2, 7), 3);
        assert_eq!(order_mod(3, 7), 6);
        assert_eq!(order_mod(1, 1), 1);
    }

    #[test]
    fn primitive_roots_match_known_values() {
        assert_eq!(primitive_root(3), 2);
        assert_eq!(primitive_root(7), 3);
        assert_eq!(primitive_root(9), 2);
        assert_eq!(primitive_root(25), 2);
        assert_eq!(primitive_root(27), 2);
        // 2 has order 3 mod 7 but is a root mod 49.
        assert_eq!(primitive_root(49), 3);
    }

    #[test]
    fn euclidean_remainder() {
        assert_eq!(rem_euclid_i64(-1, 7), 6);
        assert_eq!(rem_euclid_i64(-14, 7), 0);
        assert_eq!(rem_euclid_i64(13, 7), 6);
    }
}
