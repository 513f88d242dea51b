//! Maximising the induced-subtree density over hosts of a fixed size.
//!
//! For small host sizes [`max_gamma_exact`] enumerates every shape and
//! returns the exact maximum of `gamma(B, ·)` together with the complete set
//! of maximisers. Beyond the enumeration limit, [`max_gamma_search`] returns
//! a certified lower bound: the exact density of an explicitly constructed
//! host, found by a beam search over root splits combined with hill-climbing
//! local search from seeded starts (the even tree, the caterpillar, the beam
//! winner and random shapes).
//!
//! The beam is a heuristic, not an exact dynamic program: the quantity being
//! maximised does not decompose over root splits, so `beam_width` candidates
//! are kept per size instead of one. Exact mode exists for small sizes
//! precisely because of this incompleteness.
//!
//! Search internals score hosts in `u128` when the relevant binomial
//! coefficient fits (it essentially always does at desk scale) and fall back
//! to big integers otherwise; the reported density is always recomputed
//! exactly through the counting layer.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::counting::{binomial, even_inducibility, CountLike, Counter, PatternTable};
use crate::rng::stream;
use crate::tree::{caterpillar, even, enumerate_shapes_limited, TreeShape, DEFAULT_ENUM_LIMIT};
use crate::{Error, Result};

/// Tuning knobs for [`max_gamma_search`], plus the enumeration cap shared
/// with [`max_gamma_exact`].
#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Host sizes up to this are handled by exact enumeration.
    pub exact_limit: u64,
    /// Candidates kept per host size in the beam.
    pub beam_width: usize,
    /// Hill-climbing restarts, counting the seeded starts.
    pub restarts: u32,
    /// Move proposals per restart.
    pub local_moves: u32,
    /// Seed for the restart streams; recorded in the report.
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            exact_limit: DEFAULT_ENUM_LIMIT,
            beam_width: 64,
            restarts: 32,
            local_moves: 3000,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMethod {
    Exact,
    Heuristic,
}

impl SearchMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchMethod::Exact => "exact",
            SearchMethod::Heuristic => "heuristic",
        }
    }
}

/// Outcome of a density maximisation over hosts of one size.
#[derive(Clone, Debug)]
pub struct ExtremalReport {
    pub pattern: TreeShape,
    pub n: u64,
    pub method: SearchMethod,
    /// Maximum density found; exact for [`SearchMethod::Exact`], otherwise a
    /// certified lower bound attained by `argmax[0]`.
    pub best_value: BigRational,
    /// Maximising hosts in canonical order. Complete for exact mode.
    pub argmax: Vec<TreeShape>,
    /// `i(B) - best_value` where the inducibility of the pattern is known
    /// (caterpillars and even trees); negative values are normal for small
    /// hosts that beat the limit value.
    pub gap_to_limit: Option<BigRational>,
    /// Seed used by the heuristic; absent for exact mode.
    pub seed: Option<u64>,
}

/// Inducibility of the pattern when a closed form is available.
pub fn known_inducibility(pattern: &TreeShape) -> Option<BigRational> {
    let k = pattern.leaf_count();
    if *pattern == caterpillar(k) {
        return Some(BigRational::one());
    }
    if *pattern == even(k) {
        return even_inducibility(k).ok();
    }
    None
}

/// Exact maximisation of `gamma(B, ·)` over all hosts with `n` leaves.
pub fn max_gamma_exact(pattern: &TreeShape, n: u64, exact_limit: u64) -> Result<ExtremalReport> {
    if n < pattern.leaf_count() {
        return Err(Error::HostSmallerThanPattern {
            host: n,
            pattern: pattern.leaf_count(),
        });
    }
    let hosts = enumerate_shapes_limited(n, exact_limit)?;
    let mut counter = Counter::new(pattern);
    let mut best = BigUint::zero();
    let mut argmax: Vec<TreeShape> = Vec::new();
    for host in hosts {
        let c = counter.count(&host);
        match c.cmp(&best) {
            Ordering::Greater => {
                best = c;
                argmax = vec![host];
            }
            Ordering::Equal => argmax.push(host),
            Ordering::Less => {}
        }
    }
    argmax.sort();
    let best_value = BigRational::new(best.into(), binomial(n, pattern.leaf_count()).into());
    let gap_to_limit = known_inducibility(pattern).map(|i| i - &best_value);
    Ok(ExtremalReport {
        pattern: pattern.clone(),
        n,
        method: SearchMethod::Exact,
        best_value,
        argmax,
        gap_to_limit,
        seed: None,
    })
}

/// Heuristic maximisation of `gamma(B, ·)` over hosts with `n` leaves.
///
/// The returned value is exact for the best host found, so it is a valid
/// lower bound on the true maximum, and never below the densities of the
/// even tree and the caterpillar, which seed the local search.
pub fn max_gamma_search(pattern: &TreeShape, n: u64, cfg: &SearchConfig) -> Result<ExtremalReport> {
    let k = pattern.leaf_count();
    if n < k {
        return Err(Error::HostSmallerThanPattern {
            host: n,
            pattern: k,
        });
    }
    let table = PatternTable::new(pattern);
    // score in u128 whenever every count is guaranteed to fit
    let candidates = if binomial(n, k) <= BigUint::from(u128::MAX) {
        search_candidates::<u128>(&table, n, cfg)
    } else {
        search_candidates::<BigUint>(&table, n, cfg)
    };

    let mut counter = Counter::new(pattern);
    let mut best = BigUint::zero();
    let mut argmax: Vec<TreeShape> = Vec::new();
    for host in candidates {
        let c = counter.count(&host);
        match c.cmp(&best) {
            Ordering::Greater => {
                best = c;
                argmax = vec![host];
            }
            Ordering::Equal => {
                if !argmax.contains(&host) {
                    argmax.push(host);
                }
            }
            Ordering::Less => {}
        }
    }
    argmax.sort();
    let best_value = BigRational::new(best.into(), binomial(n, k).into());
    let gap_to_limit = known_inducibility(pattern).map(|i| i - &best_value);
    Ok(ExtremalReport {
        pattern: pattern.clone(),
        n,
        method: SearchMethod::Heuristic,
        best_value,
        argmax,
        gap_to_limit,
        seed: Some(cfg.seed),
    })
}

// Candidate hosts worth an exact evaluation: the beam finalists' best and
// the per-restart winners of the local search.
fn search_candidates<N: CountLike>(
    table: &PatternTable,
    n: u64,
    cfg: &SearchConfig,
) -> Vec<TreeShape> {
    let mut out = Vec::new();
    let beam = beam_best::<N>(table, n, cfg.beam_width.max(1));
    out.extend(beam.iter().cloned());

    // seeded starts first, then random restarts
    let mut starts: Vec<Arena> = vec![
        Arena::from_shape(&even(n)),
        Arena::from_shape(&caterpillar(n)),
    ];
    if let Some(b) = beam.first() {
        starts.push(Arena::from_shape(b));
    }
    let restarts = cfg.restarts.max(starts.len() as u32);
    for r in starts.len() as u32..restarts {
        let mut rng = stream(cfg.seed, u64::from(r));
        starts.push(Arena::random(n as usize, &mut rng));
    }
    for (r, start) in starts.into_iter().enumerate() {
        let mut rng = stream(cfg.seed, r as u64);
        let best = hill_climb::<N>(table, start, cfg.local_moves, &mut rng);
        out.push(best.to_shape());
    }
    out
}

// ---------------------------------------------------------------------------
// Beam search over root splits
// ---------------------------------------------------------------------------

// Candidates per size are ranked on the full count vector, pattern entry
// first and ever smaller sub-patterns after, because composing a host from
// two branches consumes the branch counts of every sub-pattern, not just the
// final count. Ties break toward smaller encodings of the composed shape.
fn rank_cmp<N: CountLike>(
    av: &[N],
    a: (&TreeShape, &TreeShape),
    bv: &[N],
    b: (&TreeShape, &TreeShape),
) -> Ordering {
    for i in (0..av.len()).rev() {
        match av[i].cmp(&bv[i]) {
            Ordering::Equal => {}
            other => return other.reverse(),
        }
    }
    a.0.cmp(b.0).then_with(|| a.1.cmp(b.1))
}

fn beam_best<N: CountLike>(table: &PatternTable, n: u64, width: usize) -> Vec<TreeShape> {
    let n = n as usize;
    let mut shapes: Vec<Vec<TreeShape>> = vec![Vec::new(), vec![TreeShape::leaf()]];
    let mut vecs: Vec<Vec<Vec<N>>> = vec![Vec::new(), vec![table.leaf_vector()]];
    let pair_budget = width * width;
    for m in 2..=n {
        let splits = m / 2;
        let per_side = ((pair_budget / splits.max(1)) as f64).sqrt() as usize;
        let per_side = per_side.clamp(2, width.max(2));
        // branch shapes in canonical order plus the combined vector
        let mut pool: Vec<(TreeShape, TreeShape, Vec<N>)> = Vec::new();
        for a in 1..=splits {
            let b = m - a;
            let xs = shapes[a].len().min(per_side);
            let ys = shapes[b].len().min(per_side);
            for i in 0..xs {
                let j0 = if a == b { i } else { 0 };
                for j in j0..ys {
                    let combined = table.combine(&vecs[a][i], &vecs[b][j]);
                    let (x, y) = (&shapes[a][i], &shapes[b][j]);
                    let (x, y) = if x <= y { (x, y) } else { (y, x) };
                    pool.push((x.clone(), y.clone(), combined));
                }
            }
        }
        pool.sort_by(|p, q| rank_cmp(&p.2, (&p.0, &p.1), &q.2, (&q.0, &q.1)));
        pool.truncate(width);
        let mut level_shapes = Vec::with_capacity(pool.len());
        let mut level_vecs = Vec::with_capacity(pool.len());
        for (x, y, v) in pool {
            level_shapes.push(TreeShape::node(&x, &y));
            level_vecs.push(v);
        }
        shapes.push(level_shapes);
        vecs.push(level_vecs);
    }
    // the ranking puts maximal pattern counts first; keep the leading ties
    let last = &shapes[n];
    let lastv = &vecs[n];
    let pattern_idx = table.pattern_index();
    let mut best: Vec<TreeShape> = Vec::new();
    for (i, s) in last.iter().enumerate() {
        if i == 0 || lastv[i][pattern_idx] == lastv[0][pattern_idx] {
            best.push(s.clone());
        } else {
            break;
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Local search on a mutable plane arena
// ---------------------------------------------------------------------------

// A host as an array of nodes. Only reachability from the root matters;
// slots detached by a move get reused.
#[derive(Clone)]
struct Arena {
    parent: Vec<i32>,
    kids: Vec<Option<(u32, u32)>>,
    root: u32,
}

impl Arena {
    fn from_shape(shape: &TreeShape) -> Arena {
        let mut arena = Arena {
            parent: Vec::new(),
            kids: Vec::new(),
            root: 0,
        };
        // explicit stack: (shape, parent slot)
        let mut stack: Vec<(TreeShape, i32)> = vec![(shape.clone(), -1)];
        while let Some((t, parent)) = stack.pop() {
            let idx = arena.parent.len() as u32;
            arena.parent.push(parent);
            arena.kids.push(None);
            if parent >= 0 {
                let slot = &mut arena.kids[parent as usize];
                *slot = match *slot {
                    None => Some((idx, idx)),
                    Some((x, _)) if x == u32::MAX => Some((idx, idx)),
                    Some((x, _)) => Some((x, idx)),
                };
            }
            if let Some((x, y)) = t.branches() {
                arena.kids[idx as usize] = None;
                stack.push((y.clone(), idx as i32));
                stack.push((x.clone(), idx as i32));
            }
        }
        arena
    }

    // uniform recursive split; diversity is all that matters for restarts
    fn random(n: usize, rng: &mut ChaCha8Rng) -> Arena {
        let mut arena = Arena {
            parent: Vec::new(),
            kids: Vec::new(),
            root: 0,
        };
        // (leaves wanted, parent slot)
        let mut stack: Vec<(usize, i32)> = vec![(n, -1)];
        while let Some((m, parent)) = stack.pop() {
            let idx = arena.parent.len() as u32;
            arena.parent.push(parent);
            arena.kids.push(None);
            if parent >= 0 {
                let slot = &mut arena.kids[parent as usize];
                *slot = match *slot {
                    None => Some((idx, idx)),
                    Some((x, _)) => Some((x, idx)),
                };
            }
            if m > 1 {
                let split = rng.random_range(1..m);
                stack.push((m - split, idx as i32));
                stack.push((split, idx as i32));
            }
        }
        arena
    }

    fn len(&self) -> usize {
        self.parent.len()
    }

    fn to_shape(&self) -> TreeShape {
        let mut result: Vec<Option<TreeShape>> = vec![None; self.len()];
        let mut stack = vec![self.root];
        while let Some(&v) = stack.last() {
            if result[v as usize].is_some() {
                stack.pop();
                continue;
            }
            match self.kids[v as usize] {
                None => {
                    result[v as usize] = Some(TreeShape::leaf());
                    stack.pop();
                }
                Some((x, y)) => match (&result[x as usize], &result[y as usize]) {
                    (Some(sx), Some(sy)) => {
                        result[v as usize] = Some(TreeShape::node(sx, sy));
                        stack.pop();
                    }
                    _ => {
                        stack.push(x);
                        stack.push(y);
                    }
                },
            }
        }
        result[self.root as usize].take().unwrap()
    }

    fn reachable(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            out.push(v);
            if let Some((x, y)) = self.kids[v as usize] {
                stack.push(x);
                stack.push(y);
            }
        }
        out
    }

    fn is_ancestor(&self, a: u32, mut b: u32) -> bool {
        loop {
            if a == b {
                return true;
            }
            match self.parent[b as usize] {
                -1 => return false,
                p => b = p as u32,
            }
        }
    }

    fn replace_child(&mut self, parent: u32, old: u32, new: u32) {
        let (x, y) = self.kids[parent as usize].expect("parent must be internal");
        self.kids[parent as usize] = if x == old {
            Some((new, y))
        } else {
            Some((x, new))
        };
        self.parent[new as usize] = parent as i32;
    }

    // Prune the subtree at `u` and regraft it next to `v`: the freed parent
    // of `u` becomes the new joint vertex above `v`. `u` must not be the
    // root; `v` must not sit inside the pruned subtree or be `u`'s parent.
    fn regraft(&mut self, u: u32, v: u32) {
        let p = self.parent[u as usize] as u32;
        let (x, y) = self.kids[p as usize].unwrap();
        let sibling = if x == u { y } else { x };
        match self.parent[p as usize] {
            -1 => {
                self.root = sibling;
                self.parent[sibling as usize] = -1;
            }
            g => self.replace_child(g as u32, p, sibling),
        }
        match self.parent[v as usize] {
            -1 => {
                self.root = p;
                self.parent[p as usize] = -1;
            }
            pv => self.replace_child(pv as u32, v, p),
        }
        self.kids[p as usize] = Some((u, v));
        self.parent[u as usize] = p as i32;
        self.parent[v as usize] = p as i32;
    }

    // Exchange two disjoint non-root subtrees.
    fn swap_subtrees(&mut self, u: u32, v: u32) {
        let pu = self.parent[u as usize] as u32;
        let pv = self.parent[v as usize] as u32;
        self.replace_child(pu, u, v);
        self.replace_child(pv, v, u);
    }

    // Count of the full pattern at the root.
    fn score<N: CountLike>(&self, table: &PatternTable, scratch: &mut Vec<Option<Vec<N>>>) -> N {
        scratch.clear();
        scratch.resize(self.len(), None);
        let mut stack = vec![self.root];
        while let Some(&v) = stack.last() {
            if scratch[v as usize].is_some() {
                stack.pop();
                continue;
            }
            match self.kids[v as usize] {
                None => {
                    scratch[v as usize] = Some(table.leaf_vector());
                    stack.pop();
                }
                Some((x, y)) => {
                    if scratch[x as usize].is_some() && scratch[y as usize].is_some() {
                        let combined = table.combine(
                            scratch[x as usize].as_ref().unwrap(),
                            scratch[y as usize].as_ref().unwrap(),
                        );
                        scratch[v as usize] = Some(combined);
                        stack.pop();
                    } else {
                        stack.push(x);
                        stack.push(y);
                    }
                }
            }
        }
        scratch[self.root as usize].as_ref().unwrap()[table.pattern_index()].clone()
    }
}

fn hill_climb<N: CountLike>(
    table: &PatternTable,
    start: Arena,
    moves: u32,
    rng: &mut ChaCha8Rng,
) -> Arena {
    let mut scratch: Vec<Option<Vec<N>>> = Vec::new();
    let mut current = start;
    let mut current_score = current.score(table, &mut scratch);
    if current.len() < 3 {
        return current;
    }
    for _ in 0..moves {
        let mut trial = current.clone();
        let nodes = trial.reachable();
        let swap_move = rng.random_range(0..4u32) == 0;
        let applied = if swap_move {
            let u = nodes[rng.random_range(0..nodes.len())];
            let v = nodes[rng.random_range(0..nodes.len())];
            if u != trial.root
                && v != trial.root
                && !trial.is_ancestor(u, v)
                && !trial.is_ancestor(v, u)
            {
                trial.swap_subtrees(u, v);
                true
            } else {
                false
            }
        } else {
            let u = nodes[rng.random_range(0..nodes.len())];
            if u == trial.root {
                false
            } else {
                let p = trial.parent[u as usize] as u32;
                let candidates: Vec<u32> = nodes
                    .iter()
                    .copied()
                    .filter(|&v| v != p && !trial.is_ancestor(u, v))
                    .collect();
                if candidates.is_empty() {
                    false
                } else {
                    let v = candidates[rng.random_range(0..candidates.len())];
                    trial.regraft(u, v);
                    true
                }
            }
        };
        if !applied {
            continue;
        }
        let trial_score = trial.score(table, &mut scratch);
        if trial_score > current_score {
            current = trial;
            current_score = trial_score;
        }
    }
    current
}

// ---------------------------------------------------------------------------
// Conjecture tables
// ---------------------------------------------------------------------------

/// One row of [`conjecture_report`]: does the even tree maximise the count
/// of even-tree copies at size `n`, and how far is the exact maximum density
/// from the limiting inducibility.
#[derive(Clone, Debug)]
pub struct ConjectureRow {
    pub k: u64,
    pub n: u64,
    pub even_is_max: bool,
    pub max_gamma: BigRational,
    pub inducibility: BigRational,
    /// `inducibility - max_gamma`, signed: small hosts regularly exceed the
    /// limit value.
    pub gap: BigRational,
    /// `n * gap`, for eyeballing an O(1/n) trend.
    pub scaled_gap: BigRational,
}

/// Exact per-size check of the even-tree maximiser conjecture for pattern
/// `E_k`, over host sizes `k..=n_max`. Failures show up in the rows; they
/// are not errors.
pub fn conjecture_report(k: u64, n_max: u64, exact_limit: u64) -> Result<Vec<ConjectureRow>> {
    if k == 0 {
        return Err(Error::Invalid("conjecture report needs k >= 1".into()));
    }
    if n_max > exact_limit {
        return Err(Error::SizeLimit {
            what: "conjecture report",
            n: n_max,
            limit: exact_limit,
            hint: "; raise with --exact-limit",
        });
    }
    let pattern = even(k);
    let inducibility = even_inducibility(k)?;
    let mut counter = Counter::new(&pattern);
    let mut rows = Vec::new();
    for n in k..=n_max {
        let hosts = enumerate_shapes_limited(n, exact_limit)?;
        let mut best = BigUint::zero();
        let mut argmax: Vec<TreeShape> = Vec::new();
        for host in hosts {
            let c = counter.count(&host);
            match c.cmp(&best) {
                Ordering::Greater => {
                    best = c;
                    argmax = vec![host];
                }
                Ordering::Equal => argmax.push(host),
                Ordering::Less => {}
            }
        }
        let even_is_max = argmax.contains(&even(n));
        let max_gamma = BigRational::new(best.into(), binomial(n, k).into());
        let gap = &inducibility - &max_gamma;
        let scaled_gap = &gap * BigRational::from_integer(n.into());
        rows.push(ConjectureRow {
            k,
            n,
            even_is_max,
            max_gamma,
            inducibility: inducibility.clone(),
            gap,
            scaled_gap,
        });
    }
    Ok(rows)
}
