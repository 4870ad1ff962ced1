//! Explicit barycentric-free witness families, each verified before it is
//! returned.
//!
//! Three families:
//!
//! * [`lb_witness`] — a k-element non-barycentric subset of Z/n for coprime
//!   k and n, built from short integer intervals. Shows BO(k, Z/n) >= k+1.
//! * [`th8_witness`] — for k = (p-1)/2 with the order of 2 mod p even: {0}
//!   together with the union of even powers of 2 over coset representatives
//!   of (Z/p)*/<2>. Shows BO(k, Z/p) >= k+2 in exactly those cases.
//! * [`behrend_witness`] — integers below floor(n/k) whose digits in base
//!   (k-1)(d-1)+1 are at most d-1, restricted to a shell of fixed squared
//!   digit norm. Digit sums of up to k-1 members never carry, so integer
//!   and mod-n barycentric equations coincide, and equality in the triangle
//!   inequality on a norm shell forces proportional, equal-norm, hence equal
//!   digit vectors. The largest shell is a free set of size at least
//!   (d^m - 1) / (m (d-1)^2) by pigeonhole.

use std::collections::BTreeMap;
use std::fmt;

use crate::arith::{gcd, integer_root, is_prime, saturating_pow};
use crate::engine::{has_k_barycentric_subset, is_barycentric};
use crate::error::{Error, Result};
use crate::group::{mult_order, ElementSet, FiniteAbelianGroup};

/// Which construction produced a witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessMethod {
    Lb,
    Th8,
    Behrend,
    Corner,
}

impl fmt::Display for WitnessMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WitnessMethod::Lb => "lb",
            WitnessMethod::Th8 => "th8",
            WitnessMethod::Behrend => "behrend",
            WitnessMethod::Corner => "corner",
        })
    }
}

/// Parameters of a digit-shell construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BehrendParams {
    pub n: u64,
    pub k: u64,
    /// Number of digits.
    pub m: u32,
    /// Digit bound parameter; digits range over 0..=d-1.
    pub d: u64,
    /// The base (k-1)(d-1) + 1.
    pub base: u64,
    /// Squared norm of the selected shell.
    pub r: u64,
    /// d = 1 collapses the digit set to {0}; tiny n/k makes this unavoidable.
    pub degenerate: bool,
}

/// A constructed barycentric-free set together with its verification status.
#[derive(Clone, Debug)]
pub struct WitnessRecord {
    pub n: u64,
    pub k: u64,
    pub method: WitnessMethod,
    pub set: ElementSet,
    /// True when freeness was re-checked by brute force (always re-checkable).
    pub verified: bool,
    pub params: Option<BehrendParams>,
}

fn check_range_preconditions(n: u64, k: u64) -> Result<()> {
    if n < 6 {
        return Err(Error::InvalidArgument(format!("need n >= 6, got n = {n}")));
    }
    if k < 3 || k > n.saturating_sub(3) {
        return Err(Error::InvalidArgument(format!(
            "need 3 <= k <= n-3, got k = {k}, n = {n}"
        )));
    }
    Ok(())
}

/// A k-element subset of Z/n that is not barycentric, for gcd(k, n) = 1 and
/// 3 <= k <= n-3. Even k: the interval {0, ..., k-1}. k = 3: {0, 1, 3}.
/// Odd k >= 5: {0, ..., (k-1)/2} with {(k+5)/2, ..., k} and k+2.
pub fn lb_witness(n: u64, k: u64) -> Result<WitnessRecord> {
    check_range_preconditions(n, k)?;
    if gcd(k, n) != 1 {
        return Err(Error::InvalidArgument(format!(
            "need gcd(k, n) = 1, got gcd({k}, {n}) = {}",
            gcd(k, n)
        )));
    }

    let members: Vec<u64> = if k.is_multiple_of(2) {
        (0..k).collect()
    } else if k == 3 {
        vec![0, 1, 3]
    } else {
        (0..=(k - 1) / 2)
            .chain((k + 5) / 2..=k)
            .chain([k + 2])
            .collect()
    };
    debug_assert_eq!(members.len() as u64, k);
    debug_assert!(members.iter().all(|&a| a < n));

    let group = FiniteAbelianGroup::cyclic(n)?;
    let set = ElementSet::from_indices(group, members.iter().copied());
    if is_barycentric(&set) {
        return Err(Error::Internal(format!(
            "interval construction produced a barycentric set for n = {n}, k = {k}"
        )));
    }
    Ok(WitnessRecord {
        n,
        k,
        method: WitnessMethod::Lb,
        set,
        verified: true,
        params: None,
    })
}

/// For p >= 7 prime with l = ord_p(2) even: the (k+1)-element set {0} + B,
/// k = (p-1)/2, where B collects the even powers 2^(2j) h_i over greedily
/// chosen coset representatives h_i of (Z/p)*/<2>. Checks sigma(B) = 0 and
/// that Z/p minus 0 is the disjoint union of B and 2B, then re-verifies
/// freeness by brute force.
pub fn th8_witness(p: u64) -> Result<WitnessRecord> {
    if p < 7 || !is_prime(p) {
        return Err(Error::InvalidArgument(format!(
            "need a prime p >= 7, got {p}"
        )));
    }
    let ell = mult_order(2, p)?;
    if ell % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "the multiplicative order of 2 mod {p} is {ell}, which is odd: \
             no such witness exists (BO(k, Z/{p}) = k+1 there)"
        )));
    }
    let k = (p - 1) / 2;

    // coset representatives of (Z/p)*/<2>, smallest-first
    let mut covered = vec![false; p as usize];
    let mut b_members: Vec<u64> = Vec::with_capacity(k as usize);
    for h in 1..p {
        if covered[h as usize] {
            continue;
        }
        // mark the whole coset h*<2>, collect the even-power half
        let mut x = h;
        for j in 0..ell {
            covered[x as usize] = true;
            if j % 2 == 0 {
                b_members.push(x);
            }
            x = x * 2 % p;
        }
    }

    if b_members.len() as u64 != k {
        return Err(Error::Internal(format!(
            "coset construction for p = {p} produced {} elements, expected {k}",
            b_members.len()
        )));
    }
    let sigma_b = b_members.iter().sum::<u64>() % p;
    if sigma_b != 0 {
        return Err(Error::Internal(format!(
            "coset construction for p = {p} has sigma(B) = {sigma_b}, expected 0"
        )));
    }
    // B and 2B must partition the nonzero elements
    let mut seen = vec![false; p as usize];
    for &b in &b_members {
        for x in [b, b * 2 % p] {
            if x == 0 || seen[x as usize] {
                return Err(Error::Internal(format!(
                    "B and 2B do not partition Z/{p} minus 0 (collision at {x})"
                )));
            }
            seen[x as usize] = true;
        }
    }

    let group = FiniteAbelianGroup::cyclic(p)?;
    let set = ElementSet::from_indices(group, [0].into_iter().chain(b_members));
    if has_k_barycentric_subset(&set, k) {
        return Err(Error::Internal(format!(
            "coset witness for p = {p} contains a {k}-barycentric subset"
        )));
    }
    Ok(WitnessRecord {
        n: p,
        k,
        method: WitnessMethod::Th8,
        set,
        verified: true,
        params: None,
    })
}

fn behrend_base(k: u64, d: u64) -> u64 {
    (k - 1) * (d - 1) + 1
}

/// The unique d >= 1 with ((k-1)(d-1)+1)^m <= floor(n/k) <= ((k-1)(d-1)+k)^m - 1.
/// The intervals for consecutive d tile the integers because
/// (k-1)(d-1) + k = (k-1)d + 1, so d is recovered from the exact integer
/// m-th root of floor(n/k).
pub fn behrend_d(n: u64, k: u64, m: u32) -> Result<u64> {
    check_range_preconditions(n, k)?;
    if m < 1 {
        return Err(Error::InvalidArgument("need m >= 1".into()));
    }
    let q = n / k;
    debug_assert!(q >= 1);
    let t = integer_root(q as u128, m) as u64; // largest t with t^m <= q
    let d = (t - 1) / (k - 1) + 1;
    debug_assert!(saturating_pow(behrend_base(k, d) as u128, m) <= q as u128);
    debug_assert!(saturating_pow(behrend_base(k, d + 1) as u128, m) > q as u128);
    Ok(d)
}

struct ShellChoice {
    m: u32,
    d: u64,
    base: u64,
    r: u64,
    members: Vec<u64>,
}

/// All digit vectors with digits 0..=d-1 over m digits, keyed by squared norm.
fn shells_for(k: u64, m: u32, d: u64) -> BTreeMap<u64, Vec<u64>> {
    let base = behrend_base(k, d);
    let mut shells: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    let mut digits = vec![0u64; m as usize];
    loop {
        let mut value = 0u64;
        let mut norm = 0u64;
        for &a in digits.iter().rev() {
            value = value * base + a;
            norm += a * a;
        }
        shells.entry(norm).or_default().push(value);

        // next digit vector
        let mut i = 0;
        loop {
            if i == digits.len() {
                return shells;
            }
            digits[i] += 1;
            if digits[i] < d {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

fn binomial_at_most(n: u64, k: u64, cap: u128) -> bool {
    if k > n {
        return true;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
        if acc > cap {
            return false;
        }
    }
    true
}

/// Build the digit set A = {sum a_i base^i : 0 <= a_i <= d-1} inside
/// {0, ..., floor(n/k)}, split it into squared-norm shells, and return the
/// largest shell (ties: smallest r, then smallest digit count) as a subset
/// of Z/n. With m omitted, every digit count with a non-degenerate d is
/// tried.
pub fn behrend_witness(n: u64, k: u64, m: Option<u32>) -> Result<WitnessRecord> {
    check_range_preconditions(n, k)?;
    let q = n / k;

    let candidate_ms: Vec<u32> = match m {
        Some(m) if m >= 1 => vec![m],
        Some(_) => return Err(Error::InvalidArgument("need m >= 1".into())),
        None => {
            // d >= 2 requires k^m <= q; past that only the singleton {0} is left
            let mut ms: Vec<u32> = (1..64)
                .take_while(|&m| saturating_pow(k as u128, m) <= q as u128)
                .collect();
            if ms.is_empty() {
                ms.push(1);
            }
            ms
        }
    };

    let mut best: Option<ShellChoice> = None;
    for m in candidate_ms {
        let d = behrend_d(n, k, m)?;
        let shells = shells_for(k, m, d);
        // largest shell; BTreeMap iterates r ascending, so max_by_key keeps
        // the smallest r among ties
        let (&r, members) = shells
            .iter()
            .max_by_key(|(&r, v)| (v.len(), std::cmp::Reverse(r)))
            .unwrap();

        // pigeonhole floor promised by the construction
        if d >= 2 {
            let promised_num = saturating_pow(d as u128, m) - 1;
            let promised_den = m as u128 * ((d - 1) * (d - 1)) as u128;
            if (members.len() as u128) * promised_den < promised_num {
                return Err(Error::Internal(format!(
                    "largest shell for n = {n}, k = {k}, m = {m} undercuts the \
                     pigeonhole bound"
                )));
            }
        }

        let better = match &best {
            None => true,
            Some(b) => members.len() > b.members.len(),
        };
        if better {
            best = Some(ShellChoice {
                m,
                d,
                base: behrend_base(k, d),
                r,
                members: members.clone(),
            });
        }
    }

    let choice = best.unwrap();
    // members stay below floor(n/k), so k times any member stays below n and
    // the integer and mod-n barycentric equations coincide
    let max_member = choice.members.iter().copied().max().unwrap_or(0);
    if max_member > q || k * max_member > n {
        return Err(Error::Internal(format!(
            "shell member {max_member} escapes the interval for n = {n}, k = {k}"
        )));
    }

    let group = FiniteAbelianGroup::cyclic(n)?;
    let set = ElementSet::from_indices(group, choice.members.iter().copied());

    // freeness is structural; re-verify by brute force while that is cheap
    let verified = binomial_at_most(set.len() as u64, k, 5_000_000);
    if verified && has_k_barycentric_subset(&set, k) {
        return Err(Error::Internal(format!(
            "digit shell for n = {n}, k = {k}, m = {} contains a {k}-barycentric subset",
            choice.m
        )));
    }

    Ok(WitnessRecord {
        n,
        k,
        method: WitnessMethod::Behrend,
        set,
        verified,
        params: Some(BehrendParams {
            n,
            k,
            m: choice.m,
            d: choice.d,
            base: choice.base,
            r: choice.r,
            degenerate: choice.d == 1,
        }),
    })
}
