//! Closed-form BO values, bounds with theorem tags, and the coefficient
//! identity behind the polynomial-method upper bound.
//!
//! Everything here is a formula, not a search. The search engine and the
//! verification suites cross-check these formulas against exhaustive
//! computation; a disagreement is always an implementation bug, never an
//! accepted outcome. Threshold conditions such as k >= (p+2)/3 are compared
//! cross-multiplied over the integers.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::arith::{gcd, is_prime, saturating_pow};
use crate::constructions::{behrend_witness, lb_witness};
use crate::error::{Error, Result};
use crate::group::{mult_order, FiniteAbelianGroup};

/// Tags identifying which statement a bound or exact value comes from.
/// The display names are the wire format used by the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TheoremTag {
    W1,
    Dsh,
    Proptech,
    Th8,
    UbPol,
    Lb,
    Corner,
    Behrend,
}

impl fmt::Display for TheoremTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TheoremTag::W1 => "W1",
            TheoremTag::Dsh => "DSH",
            TheoremTag::Proptech => "proptech",
            TheoremTag::Th8 => "th8",
            TheoremTag::UbPol => "UBpol",
            TheoremTag::Lb => "lbk+1",
            TheoremTag::Corner => "corner",
            TheoremTag::Behrend => "theoBehrend",
        })
    }
}

/// Exact BO(k, G) for the corner cases k in {1, 2}, k > |G|, and
/// k in {|G|, |G|-1, |G|-2}; None outside them.
pub fn bo_corner(group: &FiniteAbelianGroup, k: u64) -> Option<u64> {
    if k == 0 {
        return None;
    }
    let n = group.order();
    let r2 = group.p_rank(2).unwrap();
    if k == 1 {
        return Some(1);
    }
    if k == 2 || k > n {
        return Some(n + 1);
    }
    if k == n {
        // the full group sums to the unique order-2 element when r2 = 1
        return Some(if r2 == 1 { n + 1 } else { n });
    }
    if k == n - 1 {
        return Some(if r2 == 1 { n - 1 } else { n + 1 });
    }
    if n >= 3 && k == n - 2 {
        return Some(if n % 2 == 1 {
            n - 2
        } else if group.exponent() == 2 || n == 4 {
            n + 1
        } else {
            n - 1
        });
    }
    None
}

/// k <= BO(k, Z/p) <= ceil((p-1)/(k-1)) + k, for p >= 7 prime and
/// 3 <= k <= p-3. The upper bound never exceeds p.
pub fn w1_bounds(p: u64, k: u64) -> Result<(u64, u64)> {
    if p < 7 || !is_prime(p) {
        return Err(Error::InvalidArgument(format!(
            "need a prime p >= 7, got {p}"
        )));
    }
    if k < 3 || k > p - 3 {
        return Err(Error::InvalidArgument(format!(
            "need 3 <= k <= p-3, got k = {k}, p = {p}"
        )));
    }
    let upper = (p - 1).div_ceil(k - 1) + k;
    debug_assert!(upper <= p);
    Ok((k, upper))
}

/// min(p, k(a-k)+1): the guaranteed size of the set of k-subset sums of an
/// a-element subset of Z/p.
pub fn dsh_bound(p: u64, a: u64, k: u64) -> u64 {
    debug_assert!(is_prime(p));
    assert!(k <= a, "need 0 <= k <= a, got k = {k}, a = {a}");
    p.min(k * (a - k) + 1)
}

/// BO(k, Z/n) = k+1 whenever n >= 6, (n+1)/2 <= k <= n-3, and n is coprime
/// to both k and k+1; None when those conditions do not hold. The prime case
/// (p+1)/2 <= k <= p-3 falls out as a special case.
pub fn proptech_value(n: u64, k: u64) -> Option<u64> {
    if n < 6 || k > n {
        return None;
    }
    let applies = k > n / 2 && k + 3 <= n && gcd(n, k) == 1 && gcd(n, k + 1) == 1;
    applies.then(|| k + 1)
}

/// At the threshold k = (p-1)/2 the answer splits on the parity of the
/// multiplicative order of 2 mod p: returns (k, k+1) for odd order and
/// (k, k+2) for even order.
pub fn th8_value(p: u64) -> Result<(u64, u64)> {
    if p < 7 || !is_prime(p) {
        return Err(Error::InvalidArgument(format!(
            "need a prime p >= 7, got {p}"
        )));
    }
    let k = (p - 1) / 2;
    let ell = mult_order(2, p)?;
    Ok((k, if ell % 2 == 1 { k + 1 } else { k + 2 }))
}

/// k+1 <= BO(k, Z/p) <= k+2 for p >= 7 prime and (p+2)/3 <= k <= p-3.
pub fn ubpol_bounds(p: u64, k: u64) -> Result<(u64, u64)> {
    if p < 7 || !is_prime(p) {
        return Err(Error::InvalidArgument(format!(
            "need a prime p >= 7, got {p}"
        )));
    }
    if k > p - 3 || 3 * k < p + 2 {
        return Err(Error::InvalidArgument(format!(
            "need (p+2)/3 <= k <= p-3, got k = {k}, p = {p}"
        )));
    }
    Ok((k + 1, k + 2))
}

/// Inputs of the coefficient chi: the coefficient of X1^c1 X2^c2 X3^c3 in
/// (X1+X2+X3)^m H with H = (X1-X2)(X3-kX1)(X3-kX2) and m = c1+c2+c3-3.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChiParams {
    pub k: u64,
    pub c1: u64,
    pub c2: u64,
    pub c3: u64,
}

impl ChiParams {
    pub fn new(k: u64, c1: u64, c2: u64, c3: u64) -> Self {
        Self { k, c1, c2, c3 }
    }

    /// m = c1 + c2 + c3 - 3; negative means every monomial degree is too
    /// small and chi vanishes.
    pub fn m(&self) -> i64 {
        self.c1 as i64 + self.c2 as i64 + self.c3 as i64 - 3
    }
}

fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::from(1);
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// Trinomial coefficient m! / (x! y! z!), zero unless x, y, z >= 0
/// (x + y + z = m holds by construction at every call site).
fn trinomial(m: u64, x: i64, y: i64, z: i64) -> BigInt {
    if x < 0 || y < 0 || z < 0 {
        return BigInt::zero();
    }
    debug_assert_eq!(x + y + z, m as i64);
    factorial(m) / (factorial(x as u64) * factorial(y as u64) * factorial(z as u64))
}

/// chi in closed form:
/// m!(c1-c2)/(c1! c2! c3!) * (k^2 c1 c2 - k c3 (c1+c2-1) + c3 (c3-1)).
/// Exact over the integers; the rational prefactor always divides out.
pub fn chi_closed_form(params: &ChiParams) -> BigInt {
    let m = params.m();
    if m < 0 {
        return BigInt::zero();
    }
    let (k, c1, c2, c3) = (
        BigInt::from(params.k),
        BigInt::from(params.c1),
        BigInt::from(params.c2),
        BigInt::from(params.c3),
    );
    let bracket = &k * &k * &c1 * &c2 - &k * &c3 * (&c1 + &c2 - 1) + &c3 * (&c3 - 1);
    let numerator = factorial(m as u64) * (&c1 - &c2) * bracket;
    let denominator = factorial(params.c1) * factorial(params.c2) * factorial(params.c3);
    let quot: BigInt = &numerator / &denominator;
    let rem: BigInt = &numerator % &denominator;
    assert!(rem.is_zero(), "chi is always integral");
    quot
}

/// chi as the signed sum of six trinomial coefficients, straight from the
/// expansion of H. Serves as the independent oracle for the closed form.
pub fn chi_direct(params: &ChiParams) -> BigInt {
    let m = params.m();
    if m < 0 {
        return BigInt::zero();
    }
    let m_u = m as u64;
    let k = BigInt::from(params.k);
    let (c1, c2, c3) = (params.c1 as i64, params.c2 as i64, params.c3 as i64);

    // H = k^2 X1^2 X2 - k^2 X1 X2^2 + k X2^2 X3 - k X1^2 X3 + X1 X3^2 - X2 X3^2
    let k2_part = trinomial(m_u, c1 - 2, c2 - 1, c3) - trinomial(m_u, c1 - 1, c2 - 2, c3);
    let k_part = trinomial(m_u, c1, c2 - 2, c3 - 1) - trinomial(m_u, c1 - 2, c2, c3 - 1);
    let unit_part = trinomial(m_u, c1 - 1, c2, c3 - 2) - trinomial(m_u, c1, c2 - 1, c3 - 2);
    &k * &k * k2_part + k * k_part + unit_part
}

/// chi reduced into 0..p.
pub fn chi_mod_p(params: &ChiParams, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let chi = chi_closed_form(params);
    let p_big = BigInt::from(p);
    let mut r = chi % &p_big;
    if r.is_negative() {
        r += &p_big;
    }
    Ok(u64::try_from(r).unwrap())
}

/// Guaranteed size of S_k(A) for |A| = a >= k+2 in Z/p, 3 <= k <= p-1:
/// 3a-6 up to a <= (p+6)/3, p-2 at a = (p+7)/3, and p from a >= (p+8)/3 on.
pub fn sk_lemma_bound(p: u64, a: u64, k: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if k < 3 || k > p - 1 {
        return Err(Error::InvalidArgument(format!(
            "need 3 <= k <= p-1, got k = {k}, p = {p}"
        )));
    }
    if a < k + 2 {
        return Err(Error::InvalidArgument(format!(
            "need |A| >= k+2, got |A| = {a}, k = {k}"
        )));
    }
    Ok(if 3 * a <= p + 6 {
        3 * a - 6
    } else if 3 * a == p + 7 {
        p - 2
    } else {
        p
    })
}

/// One term of the digit-shell lower bound:
/// (1/m) (((n/k)^{1/m} - k)/(k-1))^{m-2}. Defined for m >= 2 with
/// (n/k)^{1/m} > k, i.e. n > k^{m+1} (checked exactly over the integers);
/// None otherwise. m = 1 is excluded: the negative exponent there flips the
/// inequality the bound rests on, so that term is not a valid lower bound.
pub fn behrend_bound_term(n: u64, k: u64, m: u32) -> Option<f64> {
    if m < 2 || saturating_pow(k as u128, m + 1) >= n as u128 {
        return None;
    }
    let ratio = n as f64 / k as f64;
    let root = ratio.powf(1.0 / m as f64);
    let base = (root - k as f64) / (k as f64 - 1.0);
    Some(base.powi(m as i32 - 2) / m as f64)
}

/// max over feasible digit counts m of [`behrend_bound_term`]; 0 when no m
/// is feasible. A lower bound for BO(k, Z/n) whenever n >= 6, 3 <= k <= n-3.
pub fn behrend_bound(n: u64, k: u64) -> Result<f64> {
    if n < 6 || k < 3 || k > n || k + 3 > n {
        return Err(Error::InvalidArgument(format!(
            "need n >= 6 and 3 <= k <= n-3, got n = {n}, k = {k}"
        )));
    }
    let mut best = 0.0f64;
    for m in 2..64 {
        match behrend_bound_term(n, k, m) {
            Some(term) => best = best.max(term),
            None => break,
        }
    }
    Ok(best)
}

/// The asymptotic reference value n exp(-5 sqrt(log k log n)). Reported for
/// orientation only; never asserted against finite computations.
pub fn behrend_corollary_bound(n: u64, k: u64) -> f64 {
    let (n, k) = (n as f64, k as f64);
    n * (-5.0 * (k.ln() * n.ln()).sqrt()).exp()
}

/// Every applicable closed-form bound for (G, k), with theorem tags, plus
/// construction-backed lower bounds. Building the report fails loudly if any
/// lower bound exceeds any upper bound or a pinned exact value escapes the
/// box.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub group: FiniteAbelianGroup,
    pub k: u64,
    pub lower_bounds: Vec<(u64, TheoremTag)>,
    pub upper_bounds: Vec<(u64, TheoremTag)>,
    pub exact: Option<(u64, TheoremTag)>,
}

impl BoundReport {
    /// Strongest lower bound, if any.
    pub fn best_lower(&self) -> Option<u64> {
        self.lower_bounds.iter().map(|&(v, _)| v).max()
    }

    /// Strongest upper bound, if any.
    pub fn best_upper(&self) -> Option<u64> {
        self.upper_bounds.iter().map(|&(v, _)| v).min()
    }

    /// Is a computed value compatible with the report?
    pub fn admits(&self, value: u64) -> bool {
        if let Some((exact, _)) = self.exact {
            if value != exact {
                return false;
            }
        }
        self.best_lower().is_none_or(|lo| value >= lo)
            && self.best_upper().is_none_or(|hi| value <= hi)
    }
}

fn claim_exact(report: &mut BoundReport, value: u64, tag: TheoremTag) -> Result<()> {
    match report.exact {
        Some((prev, prev_tag)) if prev != value => Err(Error::TheoremContradiction(format!(
            "exact values disagree for BO({}, {}): {prev} per {prev_tag} vs {value} per {tag}",
            report.k, report.group
        ))),
        Some(_) => Ok(()),
        None => {
            report.exact = Some((value, tag));
            Ok(())
        }
    }
}

/// Collect every formula above that applies to (G, k).
///
/// Construction-backed lower bounds are included only after their witness
/// verified; a failed verification propagates as a hard error rather than a
/// silently dropped bound.
pub fn bound_report(group: &FiniteAbelianGroup, k: u64) -> Result<BoundReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    let mut report = BoundReport {
        group: group.clone(),
        k,
        lower_bounds: Vec::new(),
        upper_bounds: Vec::new(),
        exact: None,
    };

    if let Some(value) = bo_corner(group, k) {
        claim_exact(&mut report, value, TheoremTag::Corner)?;
    }

    if group.is_cyclic() {
        let n = group.order();
        let in_range = n >= 6 && k >= 3 && k.saturating_add(3) <= n;

        if is_prime(n) && n >= 7 && in_range {
            let (lo, hi) = w1_bounds(n, k)?;
            report.lower_bounds.push((lo, TheoremTag::W1));
            report.upper_bounds.push((hi, TheoremTag::W1));

            if 3 * k >= n + 2 {
                let (lo, hi) = ubpol_bounds(n, k)?;
                report.lower_bounds.push((lo, TheoremTag::UbPol));
                report.upper_bounds.push((hi, TheoremTag::UbPol));
            }
            if k == (n - 1) / 2 {
                let (_, value) = th8_value(n)?;
                claim_exact(&mut report, value, TheoremTag::Th8)?;
            }
        }

        if let Some(value) = proptech_value(n, k) {
            claim_exact(&mut report, value, TheoremTag::Proptech)?;
        }

        if in_range && gcd(k, n) == 1 {
            let witness = lb_witness(n, k)?;
            debug_assert!(witness.verified);
            report.lower_bounds.push((k + 1, TheoremTag::Lb));
        }

        if in_range {
            let witness = behrend_witness(n, k, None)?;
            if witness.verified {
                // a verified free set of size s proves BO >= s+1, at least
                // the ceiling of the analytic bound
                report
                    .lower_bounds
                    .push((witness.set.len() as u64 + 1, TheoremTag::Behrend));
            }
        }
    }

    // internal consistency: theorems never contradict each other
    if let (Some(lo), Some(hi)) = (report.best_lower(), report.best_upper()) {
        if lo > hi {
            return Err(Error::TheoremContradiction(format!(
                "bounds cross for BO({k}, {group}): lower {lo} > upper {hi}"
            )));
        }
    }
    if let Some((exact, tag)) = report.exact {
        if !report.admits(exact) {
            return Err(Error::TheoremContradiction(format!(
                "exact value {exact} per {tag} escapes the bounds for BO({k}, {group})"
            )));
        }
    }
    Ok(report)
}
