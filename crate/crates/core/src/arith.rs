//! Small integer helpers shared across modules. Everything here is exact
//! integer arithmetic; thresholds that come from rational inequalities are
//! compared cross-multiplied, never through floats.

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Trial-division primality, adequate at desk scale.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Largest integer r with r^m <= x, by bisection on integers.
pub fn integer_root(x: u128, m: u32) -> u128 {
    assert!(m >= 1);
    if x <= 1 || m == 1 {
        return x;
    }
    let mut lo: u128 = 1;
    let mut hi: u128 = 1u128 << (128 / m).min(127);
    while hi.checked_pow(m).is_some_and(|p| p <= x) {
        hi <<= 1;
    }
    // invariant: lo^m <= x < hi^m
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match mid.checked_pow(m) {
            Some(p) if p <= x => lo = mid,
            _ => hi = mid,
        }
    }
    lo
}

/// base^exp, saturating at u128::MAX instead of overflowing.
pub fn saturating_pow(base: u128, exp: u32) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}
