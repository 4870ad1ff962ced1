//! Named verification suites behind the `verify` subcommand: each one
//! cross-checks a family of closed-form statements against exhaustive
//! computation up to a size limit.

use std::fmt;
use std::str::FromStr;

use crate::arith::is_prime;
use crate::constructions::{behrend_witness, lb_witness, th8_witness};
use crate::engine::{bo_exhaustive, s_k_set, sigma_k, SearchConfig};
use crate::error::{Error, Result};
use crate::group::{enumerate_groups, mult_order, ElementSet, FiniteAbelianGroup};
use crate::theory::{
    bo_corner, chi_closed_form, chi_direct, dsh_bound, proptech_value, sk_lemma_bound, th8_value,
    ubpol_bounds, w1_bounds, behrend_bound, ChiParams,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteKind {
    Corner,
    W1,
    Dsh,
    Proptech,
    Th8,
    UbPol,
    Chi,
    SkLemma,
    Constructions,
}

impl SuiteKind {
    pub const ALL: [SuiteKind; 9] = [
        SuiteKind::Corner,
        SuiteKind::W1,
        SuiteKind::Dsh,
        SuiteKind::Proptech,
        SuiteKind::Th8,
        SuiteKind::UbPol,
        SuiteKind::Chi,
        SuiteKind::SkLemma,
        SuiteKind::Constructions,
    ];
}

impl fmt::Display for SuiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SuiteKind::Corner => "corner",
            SuiteKind::W1 => "w1",
            SuiteKind::Dsh => "dsh",
            SuiteKind::Proptech => "proptech",
            SuiteKind::Th8 => "th8",
            SuiteKind::UbPol => "ubpol",
            SuiteKind::Chi => "chi",
            SuiteKind::SkLemma => "sklemma",
            SuiteKind::Constructions => "constructions",
        })
    }
}

impl FromStr for SuiteKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteKind::ALL
            .into_iter()
            .find(|kind| kind.to_string() == s)
            .ok_or_else(|| {
                let names: Vec<String> = SuiteKind::ALL.iter().map(|k| k.to_string()).collect();
                Error::InvalidArgument(format!(
                    "unknown suite {s:?} (known: {})",
                    names.join(", ")
                ))
            })
    }
}

/// Size caps for a suite run.
#[derive(Clone, Copy, Debug)]
pub struct SuiteLimits {
    /// Largest group order (corner suite).
    pub max_order: u64,
    /// Largest prime (w1, dsh, th8, ubpol, sklemma, and the coset family).
    pub max_prime: u64,
    /// Largest cyclic order (proptech and the digit-shell family).
    pub max_n: u64,
    pub workers: usize,
}

impl Default for SuiteLimits {
    fn default() -> Self {
        Self {
            max_order: 16,
            max_prime: 13,
            max_n: 25,
            workers: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteCase {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: SuiteKind,
    pub cases: Vec<SuiteCase>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.cases.iter().filter(|c| !c.passed).count()
    }
}

fn case(cases: &mut Vec<SuiteCase>, label: impl Into<String>, passed: bool, detail: String) {
    cases.push(SuiteCase {
        label: label.into(),
        passed,
        detail,
    });
}

fn primes_to(limit: u64) -> impl Iterator<Item = u64> {
    (2..=limit).filter(|&p| is_prime(p))
}

pub fn run_suite(kind: SuiteKind, limits: &SuiteLimits) -> Result<SuiteReport> {
    let config = SearchConfig {
        worker_count: limits.workers.max(1),
        ..SearchConfig::default()
    };
    let cases = match kind {
        SuiteKind::Corner => corner_suite(limits, &config)?,
        SuiteKind::W1 => w1_suite(limits, &config)?,
        SuiteKind::Dsh => dsh_suite(limits)?,
        SuiteKind::Proptech => proptech_suite(limits, &config)?,
        SuiteKind::Th8 => th8_suite(limits, &config)?,
        SuiteKind::UbPol => ubpol_suite(limits, &config)?,
        SuiteKind::Chi => chi_suite()?,
        SuiteKind::SkLemma => sklemma_suite(limits)?,
        SuiteKind::Constructions => constructions_suite(limits)?,
    };
    Ok(SuiteReport { suite: kind, cases })
}

/// Exhaustive search equals the corner-case formulas on every abelian group
/// up to the order cap, for every k the formulas cover.
fn corner_suite(limits: &SuiteLimits, config: &SearchConfig) -> Result<Vec<SuiteCase>> {
    let mut cases = Vec::new();
    for order in 2..=limits.max_order {
        for group in enumerate_groups(order)? {
            for k in 1..=order + 1 {
                let Some(formula) = bo_corner(&group, k) else {
                    continue;
                };
                let got = bo_exhaustive(&group, k, config)?.value;
                case(
                    &mut cases,
                    format!("BO({k}, {group})"),
                    got == formula,
                    format!("exhaustive {got}, formula {formula}"),
                );
            }
        }
    }
    Ok(cases)
}

/// k <= BO(k, Z/p) <= ceil((p-1)/(k-1)) + k across the whole stated range.
fn w1_suite(limits: &SuiteLimits, config: &SearchConfig) -> Result<Vec<SuiteCase>> {
    let mut cases = Vec::new();
    for p in primes_to(limits.max_prime).filter(|&p| p >= 7) {
        let group = FiniteAbelianGroup::cyclic(p)?;
        for k in 3..=p - 3 {
            let (lo, hi) = w1_bounds(p, k)?;
            let got = bo_exhaustive(&group, k, config)?.value;
            case(
                &mut cases,
                format!("BO({k}, Z/{p})"),
                lo <= got && got <= hi,
                format!("{got} in [{lo}, {hi}]"),
            );
        }
    }
    Ok(cases)
}

/// |sum set of k-subsets| >= min(p, k(|A|-k)+1) for every subset of every
/// prime field up to the cap. One rolled-up case per prime.
fn dsh_suite(limits: &SuiteLimits) -> Result<Vec<SuiteCase>> {
    let mut cases = Vec::new();
    for p in primes_to(limits.max_prime) {
        let group = FiniteAbelianGroup::cyclic(p)?;
        let mut checked = 0u64;
        let mut worst: Option<String> = None;
        for bits in 0u64..1 << p {
            let members: Vec<u64> = (0..p).filter(|&i| bits >> i & 1 == 1).collect();
            if members.is_empty() {
                continue;
            }
            let a = ElementSet::from_indices(group.clone(), members.iter().copied());
            for k in 1..=members.len() as u64 {
                let got = sigma_k(&a, k)?.len() as u64;
                let bound = dsh_bound(p, members.len() as u64, k);
                checked += 1;
                if got < bound && worst.is_none() {
                    worst = Some(format!(
                        "A = {{{}}}, k = {k}: |sums| = {got} < {bound}",
                        a.element_list_string()
                    ));
                }
            }
        }
        case(
            &mut cases,
            format!("p = {p}"),
            worst.is_none(),
            worst.unwrap_or_else(|| format!("{checked} subset/k pairs meet the bound")),
        );
    }
    Ok(cases)
}

/// BO(k, Z/n) = k+1 wherever the coprimality window applies.
fn proptech_suite(limits: &SuiteLimits, config: &SearchConfig) -> Result<Vec<SuiteCase>> {
    let mut cases = Vec::new();
    for n in 6..=limits.max_n {
        let group = FiniteAbelianGroup::cyclic(n)?;
        for k in 3..=n - 3 {
            let Some(expect) = proptech_value(n, k) else {
                continue;
            };
            let got = bo_exhaustive(&group, k, config)?.value;
            case(
                &mut cases,
                format!("BO({k}, Z/{n})"),
                got == expect,
                format!("exhaustive {got}, formula {expect}"),
            );
        }
    }
    Ok(cases)
}

/// The split at k = (p-1)/2 on the parity of ord_p(2).
fn th8_suite(limits: &SuiteLimits, config: &SearchConfig) -> Result<Vec<SuiteCase>> {
    let mut cases = Vec::new();
    for p in primes_to(limits.max_prime).filter(|&p| p >= 7) {
        let (k, expect) = th8_value(p)?;
        let group = FiniteAbelianGroup::cyclic(p)?;
        let got = bo_exhaustive(&group, k, config)?.value;
        let ell = mult_order(2, p)?;
        case(
            &mut cases,
            format!("BO({k}, Z/{p})"),
            got == expect,
            format!("exhaustive {got}, formula {expect} (ord_2 = {ell})"),
        );
    }
    Ok(cases)
}

/// BO lands in {k+1, k+2} across the polynomial-method window.
fn ubpol_suite(limits: &SuiteLimits, config: &SearchConfig) -> Result<Vec<SuiteCase>> {
    let mut cases = Vec::new();
    for p in primes_to(limits.max_prime).filter(|&p| p >= 7) {
        let group = FiniteAbelianGroup::cyclic(p)?;
        for k in 3..=p - 3 {
            if 3 * k < p + 2 {
                continue;
            }
            let (lo, hi) = ubpol_bounds(p, k)?;
            let got = bo_exhaustive(&group, k, config)?.value;
            case(
                &mut cases,
                format!("BO({k}, Z/{p})"),
                got == lo || got == hi,
                format!("{got} in {{{lo}, {hi}}}"),
            );
        }
    }
    Ok(cases)
}

/// Closed form equals the six-trinomial expansion, exhaustively over small
/// exponents. One rolled-up case per k.
fn chi_suite() -> Result<Vec<SuiteCase>> {
    let mut cases = Vec::new();
    for k in 2..=11u64 {
        let mut checked = 0u64;
        let mut worst: Option<String> = None;
        for c1 in 0..=8 {
            for c2 in 0..=8 {
                for c3 in 0..=8 {
                    let params = ChiParams::new(k, c1, c2, c3);
                    let closed = chi_closed_form(&params);
                    let direct = chi_direct(&params);
                    checked += 1;
                    if closed != direct && worst.is_none() {
                        worst = Some(format!(
                            "c = ({c1}, {c2}, {c3}): closed {closed} != direct {direct}"
                        ));
                    }
                }
            }
        }
        case(
            &mut cases,
            format!("k = {k}"),
            worst.is_none(),
            worst.unwrap_or_else(|| format!("{checked} exponent triples agree exactly")),
        );
    }
    Ok(cases)
}

/// Realized |S_k(A)| meets the three-case floor for every subset of the
/// sklemma primes. One rolled-up case per (p, k).
fn sklemma_suite(limits: &SuiteLimits) -> Result<Vec<SuiteCase>> {
    let mut cases = Vec::new();
    for p in primes_to(limits.max_prime).filter(|&p| p == 11 || p == 13) {
        let group = FiniteAbelianGroup::cyclic(p)?;
        for k in 3..=p - 1 {
            let mut checked = 0u64;
            let mut worst: Option<String> = None;
            for bits in 0u64..1 << p {
                let size = bits.count_ones() as u64;
                if size < k + 2 {
                    continue;
                }
                let members: Vec<u64> = (0..p).filter(|&i| bits >> i & 1 == 1).collect();
                let a = ElementSet::from_indices(group.clone(), members);
                let got = s_k_set(&a, k)?.len() as u64;
                let bound = sk_lemma_bound(p, size, k)?;
                checked += 1;
                if got < bound && worst.is_none() {
                    worst = Some(format!(
                        "A = {{{}}}: |S_k| = {got} < {bound}",
                        a.element_list_string()
                    ));
                }
            }
            if checked > 0 || worst.is_some() {
                case(
                    &mut cases,
                    format!("p = {p}, k = {k}"),
                    worst.is_none(),
                    worst.unwrap_or_else(|| format!("{checked} subsets meet the floor")),
                );
            }
        }
    }
    Ok(cases)
}

/// Every constructed witness verifies barycentric-free, and the digit-shell
/// family realizes at least the ceiling of its analytic bound.
fn constructions_suite(limits: &SuiteLimits) -> Result<Vec<SuiteCase>> {
    let mut cases = Vec::new();

    let mut lb_checked = 0u64;
    let mut lb_worst: Option<String> = None;
    for n in 6..=limits.max_n.max(6) {
        for k in 3..=n - 3 {
            if crate::arith::gcd(k, n) != 1 {
                continue;
            }
            lb_checked += 1;
            match lb_witness(n, k) {
                Ok(w) if w.verified && w.set.len() as u64 == k => {}
                Ok(_) => lb_worst = lb_worst.or(Some(format!("n = {n}, k = {k}: not verified"))),
                Err(e) => lb_worst = lb_worst.or(Some(format!("n = {n}, k = {k}: {e}"))),
            }
        }
    }
    case(
        &mut cases,
        "interval family",
        lb_worst.is_none(),
        lb_worst.unwrap_or_else(|| format!("{lb_checked} coprime (n, k) pairs verified")),
    );

    for p in primes_to(limits.max_prime).filter(|&p| p >= 7) {
        if mult_order(2, p)? % 2 != 0 {
            continue;
        }
        let w = th8_witness(p)?;
        case(
            &mut cases,
            format!("coset family p = {p}"),
            w.verified && w.set.len() as u64 == (p - 1) / 2 + 1,
            format!("size {}, verified {}", w.set.len(), w.verified),
        );
    }

    let mut sh_checked = 0u64;
    let mut sh_worst: Option<String> = None;
    for n in 6..=limits.max_n.max(6) {
        for k in [3u64, 5] {
            if k + 3 > n {
                continue;
            }
            sh_checked += 1;
            let w = behrend_witness(n, k, None)?;
            let floor = behrend_bound(n, k)?.ceil() as u64;
            if !w.verified || (w.set.len() as u64) < floor {
                sh_worst = sh_worst.or(Some(format!(
                    "n = {n}, k = {k}: size {} vs floor {floor}, verified {}",
                    w.set.len(),
                    w.verified
                )));
            }
        }
    }
    case(
        &mut cases,
        "digit-shell family",
        sh_worst.is_none(),
        sh_worst.unwrap_or_else(|| format!("{sh_checked} (n, k) pairs verified")),
    );

    Ok(cases)
}
