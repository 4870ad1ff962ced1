//! Barycentric predicates, k-subset sum sets, and the exact BO(k, G) solver.
//!
//! A nonempty set S = {g_1, ..., g_k} is barycentric when
//! g_1 + ... + g_k = k*g_j for some j; equivalently, the sum of the other
//! k-1 elements is (k-1)*g_j. BO(k, G) is computed as M + 1 where M is the
//! maximum cardinality of a subset of G containing no k-barycentric subset
//! ("free" below). Since every subset of a free set is free, the family of
//! free sets is downward closed, which the search engine leans on: a partial
//! set that already contains a k-barycentric subset can never extend to a
//! free one.
//!
//! Two complementary exhaustive strategies sit behind [`bo_exhaustive`]; see
//! [`search`] for how work is split across workers and how the symmetry
//! reductions stay sound.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::group::{ElementSet, FiniteAbelianGroup};

pub(crate) mod search;

use search::{Budget, GroupCtx};

/// How a [`BoResult`] value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Proved by exhausting the search space.
    Exhaustive,
    /// A definitional short-circuit (k in {1, 2} or k > |G|).
    ClosedForm,
    /// Loaded from the result cache.
    Cached,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exhaustive => "exhaustive",
            Method::ClosedForm => "closed_form",
            Method::Cached => "cached",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Method::Exhaustive),
            "closed_form" => Ok(Method::ClosedForm),
            "cached" => Ok(Method::Cached),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

/// Knobs for the exhaustive search. The result value never depends on them.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Normalize by translations, and by dilations at the root branching
    /// level, when exploring cyclic groups. Off is only useful for
    /// cross-checking the reduction itself.
    pub use_affine_reduction: bool,
    /// Number of worker threads splitting the search at the root level.
    pub worker_count: usize,
    /// Abort with an inconclusive error after this many search nodes.
    pub node_budget: Option<u64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            use_affine_reduction: true,
            worker_count: 1,
            node_budget: None,
        }
    }
}

/// An exactly computed barycentric Olson constant, with its witness.
#[derive(Clone, Debug)]
pub struct BoResult {
    pub group: FiniteAbelianGroup,
    pub k: u64,
    /// BO(k, G) itself.
    pub value: u64,
    /// A free set of maximum cardinality `value - 1` (capped at |G|):
    /// the lexicographically smallest one under the canonical element order.
    pub witness: ElementSet,
    pub method: Method,
    pub elapsed: Duration,
}

/// Is the set barycentric (as a |S|-element set)? Evaluated literally:
/// singletons are, two-element sets never are.
pub fn is_barycentric(set: &ElementSet) -> bool {
    if set.is_empty() {
        return false;
    }
    let k = set.len() as u64;
    let ctx = GroupCtx::new(set.group(), k);
    let members = ctx.member_indices(set);
    let sigma = ctx.sum(&members);
    ctx.preimages(sigma).iter().any(|x| members.contains(x))
}

/// Does A contain a k-barycentric subset?
pub fn has_k_barycentric_subset(set: &ElementSet, k: u64) -> bool {
    find_k_barycentric_subset(set, k).is_some()
}

/// Like [`has_k_barycentric_subset`], but hands back a witness subset.
pub fn find_k_barycentric_subset(set: &ElementSet, k: u64) -> Option<ElementSet> {
    if k == 0 || (set.len() as u64) < k {
        return None;
    }
    if k == 1 {
        // any singleton is 1-barycentric
        let first = set.indices()[0];
        return Some(ElementSet::from_indices(set.group().clone(), [first]));
    }
    if k == 2 {
        // a + b = 2a forces b = a, so no 2-barycentric set exists
        return None;
    }
    let ctx = GroupCtx::new(set.group(), k);
    let members = ctx.member_indices(set);
    let witness = search::find_barycentric_combination(&ctx, &members, k as usize)?;
    Some(ElementSet::from_indices(
        set.group().clone(),
        witness.into_iter().map(u64::from),
    ))
}

/// The set of all sums of k-element subsets of A.
pub fn sigma_k(set: &ElementSet, k: u64) -> Result<ElementSet> {
    if k > set.len() as u64 {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds |A| = {}",
            set.len()
        )));
    }
    let group = set.group();
    let n = group.order() as usize;
    let k = k as usize;
    let ctx = GroupCtx::new(group, 1);
    let words = n.div_ceil(64);

    // sums[j] = achievable sums of j-element subsets, as a bitset over G
    let mut sums = vec![vec![0u64; words]; k + 1];
    sums[0][0] = 1; // the empty sum
    let mut scratch = vec![0u64; words];
    for &a in &ctx.member_indices(set) {
        let top = k.min(set.len());
        for j in (1..=top).rev() {
            scratch.iter_mut().for_each(|w| *w = 0);
            let src = &sums[j - 1];
            for (w, &word) in src.iter().enumerate() {
                let mut rest = word;
                while rest != 0 {
                    let b = rest.trailing_zeros() as usize;
                    let dest = ctx.add((w * 64 + b) as u32, a);
                    scratch[dest as usize / 64] |= 1 << (dest % 64);
                    rest &= rest - 1;
                }
            }
            for (dst, &s) in sums[j].iter_mut().zip(&scratch) {
                *dst |= s;
            }
        }
    }

    let mut out = ElementSet::new(group.clone());
    for (w, &word) in sums[k].iter().enumerate() {
        let mut rest = word;
        while rest != 0 {
            let b = rest.trailing_zeros() as usize;
            out.insert_index((w * 64 + b) as u64);
            rest &= rest - 1;
        }
    }
    Ok(out)
}

/// S_k(A) = {a_1 + a_2 + k*a_3 : a_i in A pairwise distinct}, for A a subset
/// of a cyclic group of prime order.
pub fn s_k_set(set: &ElementSet, k: u64) -> Result<ElementSet> {
    let group = set.group();
    if !group.is_cyclic() || !crate::arith::is_prime(group.order()) {
        return Err(Error::InvalidArgument(
            "S_k(A) is defined over cyclic groups of prime order".into(),
        ));
    }
    if set.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "S_k(A) needs |A| >= 3, got {}",
            set.len()
        )));
    }
    let p = group.order();
    let members = set.indices();
    let mut out = ElementSet::new(group.clone());
    for (i, &a1) in members.iter().enumerate() {
        for &a2 in &members[i + 1..] {
            for &a3 in &members {
                if a3 == a1 || a3 == a2 {
                    continue;
                }
                out.insert_index((a1 + a2 + k % p * (a3 % p)) % p);
            }
        }
    }
    Ok(out)
}

/// Exact BO(k, G) by exhaustive search: M + 1 where M is the maximum size of
/// a subset of G without a k-barycentric subset. The value is deterministic
/// and independent of the worker count; the witness is the lexicographically
/// smallest maximum free set.
pub fn bo_exhaustive(
    group: &FiniteAbelianGroup,
    k: u64,
    config: &SearchConfig,
) -> Result<BoResult> {
    let start = Instant::now();
    if k == 0 {
        return Err(Error::InvalidArgument(
            "k must be >= 1 (BO is undefined for k = 0)".into(),
        ));
    }
    let n = group.order();

    let done = |value: u64, witness: ElementSet, method: Method| BoResult {
        group: group.clone(),
        k,
        value,
        witness,
        method,
        elapsed: start.elapsed(),
    };

    // degenerate k: singletons are 1-barycentric; no 2-barycentric set
    // exists; no k-subset exists for k > |G|
    if k == 1 {
        return Ok(done(1, ElementSet::new(group.clone()), Method::ClosedForm));
    }
    if k == 2 || k > n {
        return Ok(done(n + 1, ElementSet::full(group.clone()), Method::ClosedForm));
    }

    if config.node_budget.is_none() && n > search::MAX_UNBUDGETED_ORDER {
        return Err(Error::SearchTooLarge { order: n });
    }
    // even budgeted searches need the index tables to fit
    if n > 1 << 26 {
        return Err(Error::SearchTooLarge { order: n });
    }

    let ctx = GroupCtx::new(group, k);
    let budget = Budget::new(config.node_budget);
    let max_free = search::max_free_size(&ctx, k as usize, config, &budget);

    let max_free = match max_free {
        Some(m) => m,
        None => {
            let best = budget.best_seen();
            return Err(Error::BudgetExhausted {
                lower: (best as u64 + 1).max(k),
                upper: n + 1,
            });
        }
    };

    let witness_indices = match search::lexmin_free_set(&ctx, k as usize, max_free, &budget) {
        Some(w) => w,
        None => {
            return Err(Error::BudgetExhausted {
                lower: (max_free as u64 + 1).max(k),
                upper: n + 1,
            })
        }
    };
    let witness = ElementSet::from_indices(
        group.clone(),
        witness_indices.into_iter().map(u64::from),
    );

    if witness.len() != max_free || has_k_barycentric_subset(&witness, k) {
        return Err(Error::Internal(format!(
            "witness re-check failed for BO({k}, {group}) = {}",
            max_free as u64 + 1
        )));
    }

    Ok(done(max_free as u64 + 1, witness, Method::Exhaustive))
}

/// A maximum-cardinality subset of G with no k-barycentric subset, verified
/// before return.
pub fn max_barycentric_free(
    group: &FiniteAbelianGroup,
    k: u64,
    config: &SearchConfig,
) -> Result<ElementSet> {
    let result = bo_exhaustive(group, k, config)?;
    Ok(result.witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::enumerate_groups;

    fn z(n: u64) -> FiniteAbelianGroup {
        FiniteAbelianGroup::cyclic(n).unwrap()
    }

    fn set(n: u64, members: &[u64]) -> ElementSet {
        ElementSet::from_indices(z(n), members.iter().copied())
    }

    #[test]
    fn barycentric_examples() {
        assert!(is_barycentric(&set(7, &[0, 1, 2]))); // 0+1+2 = 3 = 3*1
        assert!(!is_barycentric(&set(7, &[0, 1, 3])));
        for g in 0..7 {
            assert!(is_barycentric(&set(7, &[g])));
        }
        // no 2-element set is barycentric
        for a in 0..7 {
            for b in (a + 1)..7 {
                assert!(!is_barycentric(&set(7, &[a, b])));
            }
        }
        assert!(!is_barycentric(&ElementSet::new(z(7))));
    }

    #[test]
    fn subset_search_examples() {
        assert!(has_k_barycentric_subset(&set(7, &[0, 1, 2, 3, 4]), 3));
        assert!(!has_k_barycentric_subset(&set(7, &[0, 1, 3]), 3));
        assert!(!has_k_barycentric_subset(&set(7, &[0, 1]), 3)); // |A| < k

        let witness = find_k_barycentric_subset(&set(7, &[0, 1, 2, 3, 4]), 3).unwrap();
        assert_eq!(witness.len(), 3);
        assert!(is_barycentric(&witness));
    }

    #[test]
    fn subset_search_matches_naive_enumeration() {
        // oracle: test every k-subset directly via is_barycentric
        fn naive(a: &ElementSet, k: usize) -> bool {
            let idx = a.indices();
            if k > idx.len() {
                return false;
            }
            let mut chosen = vec![0u64; k];
            fn rec(
                idx: &[u64],
                start: usize,
                chosen: &mut Vec<u64>,
                depth: usize,
                a: &ElementSet,
            ) -> bool {
                if depth == chosen.len() {
                    let s = ElementSet::from_indices(a.group().clone(), chosen.iter().copied());
                    return is_barycentric(&s);
                }
                for i in start..idx.len() {
                    chosen[depth] = idx[i];
                    if rec(idx, i + 1, chosen, depth + 1, a) {
                        return true;
                    }
                }
                false
            }
            rec(&idx, 0, &mut chosen, 0, a)
        }

        for n in [6u64, 7, 10] {
            for bits in 0u64..1 << n {
                let members: Vec<u64> = (0..n).filter(|&i| bits >> i & 1 == 1).collect();
                if members.len() > 6 {
                    continue;
                }
                let a = set(n, &members);
                for k in 1..=members.len() as u64 {
                    assert_eq!(
                        has_k_barycentric_subset(&a, k),
                        naive(&a, k as usize),
                        "n={n} A={members:?} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn sigma_k_examples() {
        let out = sigma_k(&set(7, &[1, 2, 3]), 2).unwrap();
        assert_eq!(out.indices(), vec![3, 4, 5]);

        let empty_sum = sigma_k(&set(7, &[1, 2, 3]), 0).unwrap();
        assert_eq!(empty_sum.indices(), vec![0]);

        assert!(sigma_k(&set(7, &[1, 2]), 3).is_err());
    }

    #[test]
    fn sigma_k_of_k_plus_one_set_is_sigma_minus_a() {
        let z13 = z(13);
        for bits in 0u64..1 << 13 {
            if bits.count_ones() != 5 {
                continue;
            }
            let members: Vec<u64> = (0..13).filter(|&i| bits >> i & 1 == 1).collect();
            let a = ElementSet::from_indices(z13.clone(), members.iter().copied());
            let sigma = a.sum().coords()[0];
            let expect: std::collections::BTreeSet<u64> =
                members.iter().map(|&m| (13 + sigma - m) % 13).collect();
            let got: std::collections::BTreeSet<u64> =
                sigma_k(&a, 4).unwrap().indices().into_iter().collect();
            assert_eq!(got, expect);
        }
    }

    #[test]
    fn s_k_set_example_by_direct_enumeration() {
        let a = set(11, &[0, 1, 2]);
        // oracle: all ordered triples, done by hand here
        let mut expect = std::collections::BTreeSet::new();
        let members = [0u64, 1, 2];
        for &a1 in &members {
            for &a2 in &members {
                for &a3 in &members {
                    if a1 != a2 && a1 != a3 && a2 != a3 {
                        expect.insert((a1 + a2 + 3 * a3) % 11);
                    }
                }
            }
        }
        let got: std::collections::BTreeSet<u64> =
            s_k_set(&a, 3).unwrap().indices().into_iter().collect();
        assert_eq!(got, expect);

        assert!(s_k_set(&set(10, &[0, 1, 2]), 3).is_err()); // not prime
        assert!(s_k_set(&set(11, &[0, 1]), 3).is_err()); // too small
        let g24 = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        let s = ElementSet::from_indices(g24, [0, 1, 2]);
        assert!(s_k_set(&s, 3).is_err()); // not cyclic
    }

    #[test]
    fn bo_exhaustive_paper_values() {
        let cfg = SearchConfig::default();
        assert_eq!(bo_exhaustive(&z(7), 4, &cfg).unwrap().value, 5);
        assert_eq!(bo_exhaustive(&z(7), 3, &cfg).unwrap().value, 4);
        assert_eq!(bo_exhaustive(&z(11), 5, &cfg).unwrap().value, 7);
        assert_eq!(bo_exhaustive(&z(6), 4, &cfg).unwrap().value, 5);
        for order in [4u64, 9, 15] {
            for group in enumerate_groups(order).unwrap() {
                assert_eq!(bo_exhaustive(&group, 2, &cfg).unwrap().value, order + 1);
            }
        }
    }

    #[test]
    fn bo_exhaustive_witness_is_maximal_and_free() {
        let cfg = SearchConfig::default();
        let res = bo_exhaustive(&z(7), 3, &cfg).unwrap();
        assert_eq!(res.value, 4);
        assert_eq!(res.witness.len(), 3);
        assert!(!has_k_barycentric_subset(&res.witness, 3));
        // lexicographically smallest maximum free set
        assert_eq!(res.witness.indices(), vec![0, 1, 3]);

        let res = bo_exhaustive(&z(11), 5, &cfg).unwrap();
        assert_eq!(res.witness.len(), 6);
        assert!(!has_k_barycentric_subset(&res.witness, 5));
    }

    #[test]
    fn bo_witness_is_affine_image_of_coset_construction() {
        // at p = 11, k = 5 the maximum free sets are exactly the affine
        // images of {0} with the even powers of 2
        let res = bo_exhaustive(&z(11), 5, &SearchConfig::default()).unwrap();
        let coset: Vec<u64> = vec![0, 1, 3, 4, 5, 9];
        let witness = res.witness.indices();
        let mut found = false;
        for u in 1..11u64 {
            for t in 0..11u64 {
                let mut image: Vec<u64> = coset.iter().map(|&x| (u * x + t) % 11).collect();
                image.sort();
                found |= image == witness;
            }
        }
        assert!(found, "witness {witness:?} is not an affine image");
    }

    #[test]
    fn bo_exhaustive_degenerate_k() {
        let cfg = SearchConfig::default();
        let res = bo_exhaustive(&z(9), 1, &cfg).unwrap();
        assert_eq!(res.value, 1);
        assert!(res.witness.is_empty());

        let res = bo_exhaustive(&z(9), 10, &cfg).unwrap();
        assert_eq!(res.value, 10);
        assert_eq!(res.witness.len(), 9);

        assert!(bo_exhaustive(&z(9), 0, &cfg).is_err());
    }

    #[test]
    fn bo_exhaustive_matches_independent_enumeration() {
        // oracle: enumerate every subset of G as a bitmask and test every
        // k-subset directly with group arithmetic, no engine machinery
        fn oracle(group: &FiniteAbelianGroup, k: usize) -> (u64, Vec<u64>) {
            let n = group.order() as usize;
            let elems: Vec<_> = group.elements().collect();
            let is_bary = |subset: &[usize]| {
                let mut sigma = group.identity();
                for &i in subset {
                    sigma = group.add(&sigma, &elems[i]).unwrap();
                }
                subset
                    .iter()
                    .any(|&i| group.scalar_mul(subset.len() as i64, &elems[i]).unwrap() == sigma)
            };
            let mut best: Option<Vec<u64>> = None;
            for bits in 0u64..1 << n {
                let members: Vec<usize> = (0..n).filter(|&i| bits >> i & 1 == 1).collect();
                let mut combo = vec![0usize; k];
                fn any_bary(
                    members: &[usize],
                    combo: &mut Vec<usize>,
                    depth: usize,
                    start: usize,
                    test: &dyn Fn(&[usize]) -> bool,
                ) -> bool {
                    if depth == combo.len() {
                        return test(combo);
                    }
                    (start..members.len()).any(|i| {
                        combo[depth] = members[i];
                        any_bary(members, combo, depth + 1, i + 1, test)
                    })
                }
                let free =
                    members.len() < k || !any_bary(&members, &mut combo, 0, 0, &is_bary);
                if free {
                    let as_indices: Vec<u64> = members.iter().map(|&i| i as u64).collect();
                    let better = match &best {
                        None => true,
                        Some(b) => {
                            as_indices.len() > b.len()
                                || (as_indices.len() == b.len() && as_indices < *b)
                        }
                    };
                    if better {
                        best = Some(as_indices);
                    }
                }
            }
            let best = best.unwrap();
            (best.len() as u64 + 1, best)
        }

        let cfg = SearchConfig::default();
        for order in 2..=10u64 {
            for group in enumerate_groups(order).unwrap() {
                for k in 3..=order {
                    let (expect_value, expect_witness) = oracle(&group, k as usize);
                    let got = bo_exhaustive(&group, k, &cfg).unwrap();
                    assert_eq!(got.value, expect_value, "value for {group:?} k={k}");
                    assert_eq!(
                        got.witness.indices(),
                        expect_witness,
                        "lexmin witness for {group:?} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn bo_exhaustive_matches_unreduced_search() {
        // the affine reduction must not change any value
        let plain = SearchConfig {
            use_affine_reduction: false,
            ..SearchConfig::default()
        };
        let reduced = SearchConfig::default();
        for n in 4..=14u64 {
            for k in 3..=n.min(8) {
                let a = bo_exhaustive(&z(n), k, &plain).unwrap();
                let b = bo_exhaustive(&z(n), k, &reduced).unwrap();
                assert_eq!(a.value, b.value, "n={n} k={k}");
                assert_eq!(a.witness, b.witness, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn bo_exhaustive_worker_counts_agree() {
        for n in [10u64, 13] {
            for k in 3..=6 {
                let one = bo_exhaustive(&z(n), k, &SearchConfig::default()).unwrap();
                let four = bo_exhaustive(
                    &z(n),
                    k,
                    &SearchConfig {
                        worker_count: 4,
                        ..SearchConfig::default()
                    },
                )
                .unwrap();
                assert_eq!(one.value, four.value);
                assert_eq!(one.witness, four.witness);
            }
        }
    }

    #[test]
    fn bo_exhaustive_budget_and_size_guards() {
        let tiny = SearchConfig {
            node_budget: Some(3),
            ..SearchConfig::default()
        };
        match bo_exhaustive(&z(13), 3, &tiny) {
            Err(Error::BudgetExhausted { lower, upper }) => {
                assert!(lower >= 3);
                assert_eq!(upper, 14);
            }
            other => panic!("expected budget exhaustion, got {other:?}"),
        }

        let unbudgeted = SearchConfig::default();
        assert!(matches!(
            bo_exhaustive(&z(101), 5, &unbudgeted),
            Err(Error::SearchTooLarge { order: 101 })
        ));
    }

    #[test]
    fn max_barycentric_free_examples() {
        let cfg = SearchConfig::default();
        let w = max_barycentric_free(&z(7), 3, &cfg).unwrap();
        assert_eq!(w.len(), 3);
        assert!(!has_k_barycentric_subset(&w, 3));

        let w = max_barycentric_free(&z(5), 9, &cfg).unwrap();
        assert_eq!(w.len(), 5); // k > |G|: the full group
    }
}
