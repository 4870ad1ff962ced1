//! Exhaustive-search internals behind `bo_exhaustive`.
//!
//! Two strategies, both exact:
//!
//! * `dfs_max` — branch-and-bound DFS over free sets in canonical element
//!   order, extending a current free set one element at a time. The
//!   incremental feasibility check only enumerates the (k-1)-subsets of the
//!   current set, which is sound because the free family is downward closed.
//!   Used for small k, where free sets are rare.
//!
//! * `level_scan` — for k within a factor 3 of |G|, every set of size < k is
//!   vacuously free and the DFS would wade through all of them. Instead,
//!   decide level by level from s = k upward whether a free s-set exists;
//!   the first empty level s gives M = s - 1. Each level enumerates only
//!   sets with sum in a fixed transversal of G/(s*G) — sound because
//!   translating A by t shifts its sum by s*t, and freeness is translation
//!   invariant — via a meet-in-the-middle join over the two halves of the
//!   element range, so the work is proportional to the number of surviving
//!   candidates, roughly C(|G|, s)/|s*G|.
//!
//! Symmetry reductions used by the DFS: every nonempty free set has a
//! translate containing 0, and for cyclic groups the lexicographically
//! smallest member of an affine orbit has a second element that is minimal
//! in its unit orbit, i.e. a divisor of n. The divisor restriction is applied
//! at the root branching level only.
//!
//! Workers split the search at the root level (DFS roots, or blocks of
//! left-half masks). The shared incumbent only ever grows through atomic
//! maxima, so the computed value is scheduler independent; the reported
//! witness is recovered afterwards by a separate deterministic
//! lexicographic pass.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use crate::engine::SearchConfig;
use crate::group::{ElementSet, FiniteAbelianGroup};

/// Without a node budget, groups larger than this are refused outright
/// rather than silently running for hours.
pub(crate) const MAX_UNBUDGETED_ORDER: u64 = 40;

/// The level scan joins subsets of the two halves of the element range;
/// beyond this order the half tables stop fitting in memory.
const LEVEL_SCAN_MAX_ORDER: usize = 44;

/// Precomputed group arithmetic on canonical element indices.
pub(crate) struct GroupCtx {
    pub n: usize,
    factors: Vec<u64>,
    cyclic: bool,
    neg_table: Vec<u32>,
    kmul_table: Vec<u32>,
    /// preim_table[t] = all x with k*x = t.
    preim_table: Vec<Vec<u32>>,
    add_table: Option<Vec<u32>>,
}

impl GroupCtx {
    pub fn new(group: &FiniteAbelianGroup, k: u64) -> Self {
        let n = group.order();
        assert!(n <= 1 << 26, "group of order {n} is too large for set operations");
        let n = n as usize;
        let factors = group.invariant_factors().to_vec();
        let cyclic = factors.len() == 1;

        let mut ctx = GroupCtx {
            n,
            factors,
            cyclic,
            neg_table: Vec::new(),
            kmul_table: Vec::new(),
            preim_table: Vec::new(),
            add_table: None,
        };

        ctx.neg_table = (0..n as u32).map(|a| ctx.neg_raw(a)).collect();
        ctx.kmul_table = (0..n as u32).map(|a| ctx.smul_raw(k, a)).collect();
        let mut preim = vec![Vec::new(); n];
        for x in 0..n as u32 {
            preim[ctx.kmul_table[x as usize] as usize].push(x);
        }
        ctx.preim_table = preim;

        if !cyclic && n <= 1024 {
            let mut table = vec![0u32; n * n];
            for a in 0..n as u32 {
                for b in 0..n as u32 {
                    table[a as usize * n + b as usize] = ctx.add_raw(a, b);
                }
            }
            ctx.add_table = Some(table);
        }
        ctx
    }

    fn decode(&self, mut idx: u32) -> Vec<u64> {
        let mut coords = vec![0u64; self.factors.len()];
        for i in (0..self.factors.len()).rev() {
            coords[i] = idx as u64 % self.factors[i];
            idx /= self.factors[i] as u32;
        }
        coords
    }

    fn encode(&self, coords: &[u64]) -> u32 {
        let mut idx = 0u64;
        for (&c, &f) in coords.iter().zip(&self.factors) {
            idx = idx * f + c;
        }
        idx as u32
    }

    fn add_raw(&self, a: u32, b: u32) -> u32 {
        if self.cyclic {
            let s = a as u64 + b as u64;
            let n = self.n as u64;
            return if s >= n { (s - n) as u32 } else { s as u32 };
        }
        let (ca, cb) = (self.decode(a), self.decode(b));
        let coords: Vec<u64> = ca
            .iter()
            .zip(&cb)
            .zip(&self.factors)
            .map(|((&x, &y), &f)| {
                let s = x + y;
                if s >= f { s - f } else { s }
            })
            .collect();
        self.encode(&coords)
    }

    fn neg_raw(&self, a: u32) -> u32 {
        if self.cyclic {
            return if a == 0 { 0 } else { self.n as u32 - a };
        }
        let coords: Vec<u64> = self
            .decode(a)
            .iter()
            .zip(&self.factors)
            .map(|(&x, &f)| if x == 0 { 0 } else { f - x })
            .collect();
        self.encode(&coords)
    }

    fn smul_raw(&self, t: u64, a: u32) -> u32 {
        if self.cyclic {
            let n = self.n as u64;
            return (t % n * (a as u64) % n) as u32;
        }
        let coords: Vec<u64> = self
            .decode(a)
            .iter()
            .zip(&self.factors)
            .map(|(&x, &f)| t % f * x % f)
            .collect();
        self.encode(&coords)
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.cyclic {
            let s = a as u64 + b as u64;
            let n = self.n as u64;
            return if s >= n { (s - n) as u32 } else { s as u32 };
        }
        match &self.add_table {
            Some(t) => t[a as usize * self.n + b as usize],
            None => self.add_raw(a, b),
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg_table[b as usize])
    }

    pub fn smul(&self, t: u64, a: u32) -> u32 {
        self.smul_raw(t, a)
    }

    /// All x with k*x = t, k being the barycentric parameter of this context.
    #[inline]
    pub fn preimages(&self, t: u32) -> &[u32] {
        &self.preim_table[t as usize]
    }

    pub fn sum(&self, members: &[u32]) -> u32 {
        members.iter().fold(0u32, |acc, &m| self.add(acc, m))
    }

    pub fn member_indices(&self, set: &ElementSet) -> Vec<u32> {
        set.indices().into_iter().map(|i| i as u32).collect()
    }
}

/// Shared node budget. `spend` reports whether the search may continue.
pub(crate) struct Budget {
    used: AtomicU64,
    limit: u64,
    exhausted: AtomicBool,
    best: AtomicUsize,
}

impl Budget {
    pub fn new(limit: Option<u64>) -> Self {
        Self {
            used: AtomicU64::new(0),
            limit: limit.unwrap_or(u64::MAX),
            exhausted: AtomicBool::new(false),
            best: AtomicUsize::new(0),
        }
    }

    #[inline]
    pub fn spend(&self, amount: u64) -> bool {
        if self.used.fetch_add(amount, Ordering::Relaxed) + amount > self.limit {
            self.exhausted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    #[inline]
    pub fn alive(&self) -> bool {
        !self.exhausted.load(Ordering::Relaxed)
    }

    pub fn note_best(&self, size: usize) {
        self.best.fetch_max(size, Ordering::Relaxed);
    }

    pub fn best_seen(&self) -> usize {
        self.best.load(Ordering::Relaxed)
    }
}

/// Would S + {v} still be free? Only k-subsets through v are new, so it
/// suffices to test every (k-1)-subset T of S against v: the extended set
/// is barycentric iff sigma(T) + v = k*x for some x in T + {v}.
fn adding_keeps_free(ctx: &GroupCtx, k: usize, members: &[u32], v: u32) -> bool {
    if members.len() + 1 < k {
        return true;
    }
    let mut chosen: Vec<u32> = Vec::with_capacity(k - 1);
    !picks_barycentric(ctx, k, members, v, 0, 0, &mut chosen)
}

fn picks_barycentric(
    ctx: &GroupCtx,
    k: usize,
    members: &[u32],
    v: u32,
    start: usize,
    sum_t: u32,
    chosen: &mut Vec<u32>,
) -> bool {
    if chosen.len() == k - 1 {
        let total = ctx.add(sum_t, v);
        return ctx
            .preimages(total)
            .iter()
            .any(|&x| x == v || chosen.contains(&x));
    }
    let need = k - 1 - chosen.len();
    for i in start..members.len() {
        if members.len() - i < need {
            break;
        }
        chosen.push(members[i]);
        let found = picks_barycentric(ctx, k, members, v, i + 1, ctx.add(sum_t, members[i]), chosen);
        chosen.pop();
        if found {
            return true;
        }
    }
    false
}

/// First barycentric k-subset of `members` in lexicographic order, if any.
pub(crate) fn find_barycentric_combination(
    ctx: &GroupCtx,
    members: &[u32],
    k: usize,
) -> Option<Vec<u32>> {
    fn rec(
        ctx: &GroupCtx,
        members: &[u32],
        k: usize,
        start: usize,
        sum: u32,
        chosen: &mut Vec<u32>,
    ) -> bool {
        if chosen.len() == k {
            return ctx.preimages(sum).iter().any(|x| chosen.contains(x));
        }
        let need = k - chosen.len();
        for i in start..members.len() {
            if members.len() - i < need {
                break;
            }
            chosen.push(members[i]);
            if rec(ctx, members, k, i + 1, ctx.add(sum, members[i]), chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut chosen = Vec::with_capacity(k);
    rec(ctx, members, k, 0, 0, &mut chosen).then_some(chosen)
}

/// Does the bitmask set contain a barycentric k-subset? Hot path of the
/// level scan; `sigma` is the known sum of the whole set.
fn mask_has_bary(ctx: &GroupCtx, mask: u64, size: usize, k: usize, sigma: u32) -> bool {
    if size == k {
        // the only k-subset is the set itself
        return ctx.preimages(sigma).iter().any(|&x| mask >> x & 1 == 1);
    }
    if size == k + 1 {
        // k-subsets are the sets minus one element a, with sum sigma - a
        let mut rest = mask;
        while rest != 0 {
            let a = rest.trailing_zeros();
            rest &= rest - 1;
            let total = ctx.sub(sigma, a);
            if ctx
                .preimages(total)
                .iter()
                .any(|&x| x != a && mask >> x & 1 == 1)
            {
                return true;
            }
        }
        return false;
    }
    let mut members: Vec<u32> = Vec::with_capacity(size);
    let mut rest = mask;
    while rest != 0 {
        members.push(rest.trailing_zeros());
        rest &= rest - 1;
    }
    find_barycentric_combination(ctx, &members, k).is_some()
}

fn divisors_below(n: u64) -> Vec<u32> {
    (1..n).filter(|d| n.is_multiple_of(*d)).map(|d| d as u32).collect()
}

/// M = maximum cardinality of a free set, or None when the budget ran out.
pub(crate) fn max_free_size(
    ctx: &GroupCtx,
    k: usize,
    config: &SearchConfig,
    budget: &Budget,
) -> Option<usize> {
    debug_assert!(k >= 3 && k <= ctx.n);
    if 3 * k >= ctx.n && ctx.n <= LEVEL_SCAN_MAX_ORDER {
        level_scan(ctx, k, config, budget)
    } else {
        dfs_max(ctx, k, config, budget)
    }
}

fn dfs_max(ctx: &GroupCtx, k: usize, config: &SearchConfig, budget: &Budget) -> Option<usize> {
    let n = ctx.n;
    let workers = config.worker_count.max(1);
    let incumbent = AtomicUsize::new(0);

    // root prefixes: free sets whose subtrees partition the search space
    let mut roots: Vec<Vec<u32>> = if config.use_affine_reduction {
        // translation: some maximum free set contains 0. Dilations (cyclic
        // only): the lex-least orbit representative has a second element
        // that is minimal in its unit orbit, hence a divisor of n.
        incumbent.fetch_max(2, Ordering::Relaxed); // any pair is free for k >= 3
        let seconds: Vec<u32> = if ctx.cyclic {
            divisors_below(n as u64)
        } else {
            (1..n as u32).collect()
        };
        seconds.into_iter().map(|v| vec![0, v]).collect()
    } else {
        incumbent.fetch_max(1, Ordering::Relaxed);
        (0..n as u32).map(|v| vec![v]).collect()
    };

    // widen the frontier until there is enough root-level work to split
    let target = 4 * workers;
    while roots.len() < target && roots.iter().any(|r| r.len() < 4) {
        let mut next = Vec::with_capacity(roots.len() * 2);
        let mut grew = false;
        for prefix in roots {
            if prefix.len() >= 4 {
                next.push(prefix);
                continue;
            }
            // a prefix with no feasible extension is a maximal free set;
            // its size is already in the incumbent, so it can be dropped
            let last = *prefix.last().unwrap();
            for v in last + 1..n as u32 {
                if !budget.spend(1) {
                    return None;
                }
                if adding_keeps_free(ctx, k, &prefix, v) {
                    let mut child = prefix.clone();
                    child.push(v);
                    incumbent.fetch_max(child.len(), Ordering::Relaxed);
                    next.push(child);
                    grew = true;
                }
            }
        }
        roots = next;
        if !grew {
            break;
        }
    }

    let cursor = AtomicUsize::new(0);
    let run = || {
        let mut stack = Vec::with_capacity(n);
        loop {
            let i = cursor.fetch_add(1, Ordering::Relaxed);
            if i >= roots.len() || !budget.alive() {
                return;
            }
            stack.clear();
            stack.extend_from_slice(&roots[i]);
            dfs_rec(ctx, k, &mut stack, &incumbent, budget);
        }
    };

    if workers == 1 {
        run();
    } else {
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(run);
            }
        });
    }

    let best = incumbent.load(Ordering::Relaxed);
    budget.note_best(best);
    budget.alive().then_some(best)
}

fn dfs_rec(ctx: &GroupCtx, k: usize, set: &mut Vec<u32>, incumbent: &AtomicUsize, budget: &Budget) {
    let n = ctx.n as u32;
    let last = *set.last().unwrap();
    for v in last + 1..n {
        // even taking every remaining element cannot beat the incumbent
        if set.len() + (n - v) as usize <= incumbent.load(Ordering::Relaxed) {
            break;
        }
        if !budget.spend(1) {
            return;
        }
        if adding_keeps_free(ctx, k, set, v) {
            set.push(v);
            incumbent.fetch_max(set.len(), Ordering::Relaxed);
            dfs_rec(ctx, k, set, incumbent, budget);
            set.pop();
        }
    }
}

fn level_scan(ctx: &GroupCtx, k: usize, config: &SearchConfig, budget: &Budget) -> Option<usize> {
    // everything below size k is vacuously free
    budget.note_best(k - 1);
    for s in k..=ctx.n {
        match scan_level(ctx, k, s, config, budget) {
            None => return None,
            Some(false) => return Some(s - 1),
            Some(true) => budget.note_best(s),
        }
    }
    Some(ctx.n)
}

/// Is there a free set of size exactly s? Enumerates only candidates whose
/// sum is the canonical representative of its coset modulo s*G.
fn scan_level(
    ctx: &GroupCtx,
    k: usize,
    s: usize,
    config: &SearchConfig,
    budget: &Budget,
) -> Option<bool> {
    let n = ctx.n;
    debug_assert!(s <= n && n <= LEVEL_SCAN_MAX_ORDER);

    // canonical representatives of G / s*G
    let reps: Vec<u32> = if config.use_affine_reduction {
        let mut in_sg = vec![false; n];
        for g in 0..n as u32 {
            in_sg[ctx.smul(s as u64, g) as usize] = true;
        }
        let sg: Vec<u32> = (0..n as u32).filter(|&g| in_sg[g as usize]).collect();
        let mut visited = vec![false; n];
        let mut reps = Vec::new();
        for g in 0..n as u32 {
            if !visited[g as usize] {
                reps.push(g);
                for &d in &sg {
                    visited[ctx.add(g, d) as usize] = true;
                }
            }
        }
        reps
    } else {
        (0..n as u32).collect()
    };

    let h = n / 2; // left half [0, h), right half [h, n)
    let rs = n - h;

    // right-half subsets bucketed by (count, sum)
    let mut right_sum = vec![0u32; 1 << rs];
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); (s + 1) * n];
    for mask in 0u32..1 << rs {
        if mask != 0 {
            let low = mask & mask.wrapping_neg();
            right_sum[mask as usize] =
                ctx.add(right_sum[(mask ^ low) as usize], h as u32 + low.trailing_zeros());
        }
        let pc = mask.count_ones() as usize;
        if pc <= s {
            buckets[pc * n + right_sum[mask as usize] as usize].push(mask);
        }
    }

    let mut left_sum = vec![0u32; 1 << h];
    for mask in 1u32..1 << h {
        let low = mask & mask.wrapping_neg();
        left_sum[mask as usize] = ctx.add(left_sum[(mask ^ low) as usize], low.trailing_zeros());
    }

    let found = AtomicBool::new(false);
    let cursor = AtomicUsize::new(0);
    const CHUNK: usize = 1 << 12;
    let total = 1usize << h;
    let workers = config.worker_count.max(1);

    let run = || {
        while budget.alive() && !found.load(Ordering::Relaxed) {
            let begin = cursor.fetch_add(CHUNK, Ordering::Relaxed);
            if begin >= total {
                return;
            }
            let end = (begin + CHUNK).min(total);
            // mask_l doubles as the left-half subset itself
            #[allow(clippy::needless_range_loop)]
            for mask_l in begin..end {
                let pc = (mask_l as u32).count_ones() as usize;
                if pc > s || s - pc > rs {
                    continue;
                }
                let need = s - pc;
                let sigma_l = left_sum[mask_l];
                for &t in &reps {
                    let want = ctx.sub(t, sigma_l);
                    let bucket = &buckets[need * n + want as usize];
                    if bucket.is_empty() {
                        continue;
                    }
                    if !budget.spend(bucket.len() as u64) {
                        return;
                    }
                    for &mask_r in bucket {
                        let full = mask_l as u64 | (mask_r as u64) << h;
                        if !mask_has_bary(ctx, full, s, k, t) {
                            found.store(true, Ordering::Relaxed);
                            return;
                        }
                    }
                }
                if found.load(Ordering::Relaxed) {
                    return;
                }
            }
        }
    };

    if workers == 1 {
        run();
    } else {
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(run);
            }
        });
    }

    budget.alive().then(|| found.load(Ordering::Relaxed))
}

/// The lexicographically smallest free set of size m, by a deterministic
/// single-threaded DFS in canonical element order. Exists whenever m is the
/// maximum free size. None only on budget exhaustion.
pub(crate) fn lexmin_free_set(
    ctx: &GroupCtx,
    k: usize,
    m: usize,
    budget: &Budget,
) -> Option<Vec<u32>> {
    if m == 0 {
        return Some(Vec::new());
    }
    fn rec(ctx: &GroupCtx, k: usize, m: usize, set: &mut Vec<u32>, budget: &Budget) -> Option<bool> {
        if set.len() == m {
            return Some(true);
        }
        let n = ctx.n as u32;
        let start = set.last().map_or(0, |&l| l + 1);
        for v in start..n {
            if ((n - v) as usize) < m - set.len() {
                break;
            }
            if !budget.spend(1) {
                return None;
            }
            if adding_keeps_free(ctx, k, set, v) {
                set.push(v);
                match rec(ctx, k, m, set, budget) {
                    Some(true) => return Some(true),
                    Some(false) => {
                        set.pop();
                    }
                    None => return None,
                }
            }
        }
        Some(false)
    }
    let mut set = Vec::with_capacity(m);
    match rec(ctx, k, m, &mut set, budget) {
        Some(true) => Some(set),
        // m is the proven maximum free size, so the DFS always finds a set
        Some(false) => unreachable!("no free set of size {m} found"),
        None => None,
    }
}
