//! Tanglegrams: two plane binary trees of equal size joined by a perfect
//! matching of their leaves.
//!
//! A [`Tanglegram`] value is a *layout*: a concrete drawing with the left
//! tree's leaves facing the right tree's leaves and matching edges drawn as
//! straight segments. Two layouts represent the same tanglegram when a
//! sequence of child swaps ("flips") at internal vertices of either tree
//! carries one onto the other, with the matching transported along. The
//! layout's crossing count is the number of inversions of the induced
//! permutation; the tangle crossing number is the minimum over all layouts.
//!
//! The quadruple lower bound [`no6_lower_bound`] counts pairs of four-leaf
//! subsets, one per side, that are matched to each other and induce the
//! unique four-leaf tanglegram with two caterpillar trees and one forced
//! crossing. Every such pair shares its crossing with at most `C(n-2, 2)`
//! others, so the count divided by `C(n-2, 2)` never exceeds the tangle
//! crossing number. [`expectation_experiment`] samples uniformly random
//! layouts and summarises that bound, which grows like `n^2`.
//!
//! Text format: `<left>|<right>|<sigma>` with both trees in the `L`/`(X Y)`
//! grammar and `sigma` the comma-separated images of the left leaf ranks
//! `1..=n`.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use crate::counting::binomial;
use crate::rng::{stream, RNG_ID};
use crate::tree::{caterpillar, complete, parse_plane, PlaneTree, TreeShape};
use crate::{Error, Result};

/// Brute-force cap for [`tangle_crossing_exact`]: `4^(n-1)` layouts.
pub const MAX_CRT_LEAVES: u32 = 10;
/// Cap for [`enumerate_tanglegrams`].
pub const MAX_ENUM_LEAVES: u32 = 5;
/// Cap for [`tanglegram_automorphism_order`].
pub const MAX_AUT_LEAVES: u32 = 12;
/// Default cap for [`no6_lower_bound`]'s quadruple scan.
pub const MAX_BOUND_LEAVES: u32 = 512;
/// Default threshold coefficient for [`expectation_experiment`]: the
/// fraction of trials with bound at least `theta * n^2` is reported.
pub const DEFAULT_THETA: f64 = 2.0 / 441.0;

// ---------------------------------------------------------------------------
// The tanglegram type
// ---------------------------------------------------------------------------

/// A tanglegram layout: two plane trees and a leaf matching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tanglegram {
    left: PlaneTree,
    right: PlaneTree,
    /// 1-based: left leaf rank `i` matches right leaf rank `sigma[i-1]`.
    sigma: Vec<u32>,
}

/// One flip bit per internal vertex of each tree, in preorder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlipAssignment {
    pub left: Vec<bool>,
    pub right: Vec<bool>,
}

impl Tanglegram {
    pub fn new(left: PlaneTree, right: PlaneTree, sigma: Vec<u32>) -> Result<Self> {
        let n = left.leaf_count();
        if right.leaf_count() != n {
            return Err(Error::Invalid(format!(
                "tree sizes differ: {} vs {}",
                n,
                right.leaf_count()
            )));
        }
        if sigma.len() != n as usize {
            return Err(Error::Invalid(format!(
                "matching has {} entries for {} leaves",
                sigma.len(),
                n
            )));
        }
        let mut seen = vec![false; n as usize];
        for &v in &sigma {
            if v == 0 || v > n {
                return Err(Error::InvalidRank { rank: v, n });
            }
            if std::mem::replace(&mut seen[(v - 1) as usize], true) {
                return Err(Error::Invalid(format!("matching repeats image {v}")));
            }
        }
        Ok(Tanglegram { left, right, sigma })
    }

    pub fn n(&self) -> u32 {
        self.left.leaf_count()
    }

    pub fn left(&self) -> &PlaneTree {
        &self.left
    }

    pub fn right(&self) -> &PlaneTree {
        &self.right
    }

    pub fn sigma(&self) -> &[u32] {
        &self.sigma
    }

    /// Crossings of this layout: inversions of the matching permutation,
    /// counted with a Fenwick tree in `O(n log n)`.
    pub fn layout_crossings(&self) -> u64 {
        let n = self.n() as usize;
        let mut fenwick = vec![0u32; n + 1];
        let seen_le = |v: u32, fenwick: &[u32]| {
            let mut idx = v as usize;
            let mut total = 0u32;
            while idx > 0 {
                total += fenwick[idx];
                idx -= idx & idx.wrapping_neg();
            }
            total
        };
        let mut inversions = 0u64;
        for (i, &v) in self.sigma.iter().enumerate() {
            inversions += (i as u32 - seen_le(v, &fenwick)) as u64;
            let mut idx = v as usize;
            while idx <= n {
                fenwick[idx] += 1;
                idx += idx & idx.wrapping_neg();
            }
        }
        inversions
    }

    /// Apply flips to both trees and transport the matching.
    pub fn apply_flips(&self, flips: &FlipAssignment) -> Tanglegram {
        let (left, pl) = self.left.apply_flips(&flips.left);
        let (right, pr) = self.right.apply_flips(&flips.right);
        let n = self.n() as usize;
        let mut sigma = vec![0u32; n];
        for i in 0..n {
            sigma[pl[i] as usize] = pr[(self.sigma[i] - 1) as usize] + 1;
        }
        Tanglegram { left, right, sigma }
    }

    /// Lexicographically smallest encoding over all `2^(2n-2)` flip pairs:
    /// a canonical form for the tanglegram this layout represents.
    /// Exponential in `n`, meant for small sizes.
    pub fn canonical_encoding(&self) -> String {
        let left_variants = flip_variants(&self.left);
        let right_variants = flip_variants(&self.right);
        let n = self.n() as usize;
        let mut best: Option<String> = None;
        let mut sigma = vec![0u32; n];
        for (le, pl) in &left_variants {
            for (re, pr) in &right_variants {
                for i in 0..n {
                    sigma[pl[i] as usize] = pr[(self.sigma[i] - 1) as usize] + 1;
                }
                let mut enc = String::with_capacity(le.len() + re.len() + 3 * n + 2);
                enc.push_str(le);
                enc.push('|');
                enc.push_str(re);
                enc.push('|');
                for (i, v) in sigma.iter().enumerate() {
                    if i > 0 {
                        enc.push(',');
                    }
                    enc.push_str(&v.to_string());
                }
                if best.as_ref().is_none_or(|b| enc < *b) {
                    best = Some(enc);
                }
            }
        }
        best.unwrap()
    }
}

impl std::fmt::Display for Tanglegram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}|{}|", self.left, self.right)?;
        for (i, v) in self.sigma.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Parse the `<left>|<right>|<sigma>` format; error positions are byte
/// offsets into the full input.
pub fn parse_tanglegram(input: &str) -> Result<Tanglegram> {
    let shift = |e: Error, offset: usize| match e {
        Error::Parse { pos, msg } => Error::Parse {
            pos: pos + offset,
            msg,
        },
        other => other,
    };
    let mut parts = input.splitn(3, '|');
    let left_part = parts.next().unwrap_or("");
    let right_part = parts.next().ok_or_else(|| Error::Parse {
        pos: input.len(),
        msg: "expected '|' after the left tree".into(),
    })?;
    let sigma_part = parts.next().ok_or_else(|| Error::Parse {
        pos: input.len(),
        msg: "expected '|' after the right tree".into(),
    })?;
    let right_offset = left_part.len() + 1;
    let sigma_offset = right_offset + right_part.len() + 1;

    let left = parse_plane(left_part)?;
    let right = parse_plane(right_part).map_err(|e| shift(e, right_offset))?;
    let mut sigma = Vec::new();
    let mut pos = sigma_offset;
    for piece in sigma_part.split(',') {
        let v: u32 = piece.trim().parse().map_err(|_| Error::Parse {
            pos,
            msg: format!("bad matching entry {piece:?}"),
        })?;
        sigma.push(v);
        pos += piece.len() + 1;
    }
    Tanglegram::new(left, right, sigma)
}

// All flipped forms of a tree: (encoding, rank map old -> new), one per flip
// assignment, 2^(n-1) entries.
fn flip_variants(t: &PlaneTree) -> Vec<(String, Vec<u32>)> {
    let internals = t.internal_count() as usize;
    let mut out = Vec::with_capacity(1 << internals);
    let mut bits = vec![false; internals];
    loop {
        let (flipped, map) = t.apply_flips(&bits);
        out.push((flipped.encoding(), map));
        // binary increment
        let mut i = 0;
        loop {
            if i == internals {
                return out;
            }
            bits[i] = !bits[i];
            if bits[i] {
                break;
            }
            i += 1;
        }
    }
}

// All leaf orders reachable by flips, as position maps: entry `pos[r]` is
// the display position of original 0-based rank `r`.
fn flip_position_maps(t: &PlaneTree) -> Vec<Vec<u32>> {
    fn sequences(t: &PlaneTree) -> Vec<Vec<u32>> {
        match t.children() {
            None => vec![vec![0]],
            Some((a, b)) => {
                let offset = a.leaf_count();
                let sa = sequences(a);
                let sb = sequences(b);
                let mut out = Vec::with_capacity(2 * sa.len() * sb.len());
                for x in &sa {
                    for y in &sb {
                        let mut fwd = Vec::with_capacity(x.len() + y.len());
                        fwd.extend(x.iter().copied());
                        fwd.extend(y.iter().map(|v| v + offset));
                        out.push(fwd);
                        let mut rev = Vec::with_capacity(x.len() + y.len());
                        rev.extend(y.iter().map(|v| v + offset));
                        rev.extend(x.iter().copied());
                        out.push(rev);
                    }
                }
                out
            }
        }
    }
    sequences(t)
        .into_iter()
        .map(|seq| {
            let mut pos = vec![0u32; seq.len()];
            for (p, &r) in seq.iter().enumerate() {
                pos[r as usize] = p as u32;
            }
            pos
        })
        .collect()
}

/// Minimum crossings over every layout of the tanglegram: brute force over
/// all flip assignments of both trees, pruning the inversion count against
/// the incumbent. Capped at [`MAX_CRT_LEAVES`] leaves.
pub fn tangle_crossing_exact(t: &Tanglegram) -> Result<u64> {
    let n = t.n();
    if n > MAX_CRT_LEAVES {
        return Err(Error::SizeLimit {
            what: "exact tangle crossing number",
            n: n as u64,
            limit: MAX_CRT_LEAVES as u64,
            hint: "",
        });
    }
    let mut best = t.layout_crossings();
    if best == 0 {
        return Ok(0);
    }
    let left_orders = flip_position_maps(&t.left);
    let right_orders = flip_position_maps(&t.right);
    let n = n as usize;
    let sigma0: Vec<usize> = t.sigma.iter().map(|&v| (v - 1) as usize).collect();
    let mut edge = vec![0u32; n];
    for lo in &left_orders {
        for ro in &right_orders {
            for i in 0..n {
                edge[lo[i] as usize] = ro[sigma0[i]];
            }
            let mut crossings = 0u64;
            'count: for i in 0..n {
                for j in i + 1..n {
                    if edge[i] > edge[j] {
                        crossings += 1;
                        if crossings >= best {
                            break 'count;
                        }
                    }
                }
            }
            if crossings < best {
                best = crossings;
                if best == 0 {
                    return Ok(0);
                }
            }
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Size-4 classification and the quadruple machinery
// ---------------------------------------------------------------------------

/// Classification of a four-leaf tanglegram.
#[derive(Clone, Debug)]
pub struct Size4Class {
    /// Canonical (flip-minimal) encoding; equal exactly for equivalent
    /// layouts.
    pub canonical: String,
    pub left_shape: TreeShape,
    pub right_shape: TreeShape,
    pub crt: u64,
    /// Both trees are four-leaf caterpillars and one crossing is forced.
    pub is_no6: bool,
    /// Both trees are complete and one crossing is forced.
    pub is_no13: bool,
}

/// Classify a tanglegram with exactly four leaves.
pub fn classify_size4(t: &Tanglegram) -> Result<Size4Class> {
    if t.n() != 4 {
        return Err(Error::Invalid(format!(
            "size-4 classification needs exactly 4 leaves, got {}",
            t.n()
        )));
    }
    let crt = tangle_crossing_exact(t)?;
    let left_shape = t.left.shape();
    let right_shape = t.right.shape();
    let c4 = caterpillar(4);
    let cb2 = complete(2);
    Ok(Size4Class {
        canonical: t.canonical_encoding(),
        is_no6: left_shape == c4 && right_shape == c4 && crt == 1,
        is_no13: left_shape == cb2 && right_shape == cb2 && crt == 1,
        left_shape,
        right_shape,
        crt,
    })
}

// The five plane trees on four ordered leaves, indexed by the relative order
// of their adjacent-pair LCA depths (d1, d2, d3):
//   0: (L (L (L L)))   d1 < d2 < d3
//   1: (L ((L L) L))   d1 < d3 < d2
//   2: ((L L) (L L))   d2 minimal
//   3: ((L (L L)) L)   d3 < d1 < d2
//   4: (((L L) L) L)   d3 < d2 < d1
fn plane4(idx: usize) -> PlaneTree {
    let l = PlaneTree::leaf;
    match idx {
        0 => PlaneTree::node(l(), PlaneTree::node(l(), PlaneTree::node(l(), l()))),
        1 => PlaneTree::node(l(), PlaneTree::node(PlaneTree::node(l(), l()), l())),
        2 => PlaneTree::node(PlaneTree::node(l(), l()), PlaneTree::node(l(), l())),
        3 => PlaneTree::node(PlaneTree::node(l(), PlaneTree::node(l(), l())), l()),
        4 => PlaneTree::node(PlaneTree::node(PlaneTree::node(l(), l()), l()), l()),
        _ => unreachable!(),
    }
}

// Plane structure of the subtree induced by four ordered leaves, from the
// depths of the three adjacent-pair LCAs. The depths involved in each
// decision are distinct for genuine plane trees.
#[inline]
fn quad_pattern(d1: u16, d2: u16, d3: u16) -> usize {
    if d2 < d1 && d2 < d3 {
        2
    } else if d1 < d3 {
        if d2 < d3 {
            0
        } else {
            1
        }
    } else if d1 < d2 {
        3
    } else {
        4
    }
}

#[inline]
fn sort4_with_perm(vals: [u32; 4]) -> ([u32; 4], [u8; 4]) {
    let mut v = vals;
    let mut idx = [0u8, 1, 2, 3];
    macro_rules! cswap {
        ($i:expr, $j:expr) => {
            if v[$i] > v[$j] {
                v.swap($i, $j);
                idx.swap($i, $j);
            }
        };
    }
    cswap!(0, 1);
    cswap!(2, 3);
    cswap!(0, 2);
    cswap!(1, 3);
    cswap!(1, 2);
    let mut rank = [0u8; 4];
    for (r, &orig) in idx.iter().enumerate() {
        rank[orig as usize] = r as u8;
    }
    (v, rank)
}

#[inline]
fn perm4_rank(p: [u8; 4]) -> usize {
    let mut rank = 0usize;
    let weights = [6usize, 2, 1];
    for i in 0..3 {
        let smaller = (i + 1..4).filter(|&j| p[j] < p[i]).count();
        rank += smaller * weights[i];
    }
    rank
}

// is_no6 for every (left plane structure, right plane structure, induced
// permutation), built once by brute force on actual four-leaf tanglegrams.
fn no6_table() -> &'static [[[bool; 24]; 5]; 5] {
    static TABLE: OnceLock<Box<[[[bool; 24]; 5]; 5]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Box::new([[[false; 24]; 5]; 5]);
        for a in 0..4u8 {
            for b in 0..4u8 {
                for c in 0..4u8 {
                    for d in 0..4u8 {
                        if a == b || a == c || a == d || b == c || b == d || c == d {
                            continue;
                        }
                        let perm = [a, b, c, d];
                        let sigma: Vec<u32> = perm.iter().map(|&v| v as u32 + 1).collect();
                        let rank = perm4_rank(perm);
                        for li in 0..5 {
                            for ri in 0..5 {
                                let t = Tanglegram::new(plane4(li), plane4(ri), sigma.clone())
                                    .unwrap();
                                let class = classify_size4(&t).unwrap();
                                table[li][ri][rank] = class.is_no6;
                            }
                        }
                    }
                }
            }
        }
        table
    })
}

/// All 4-element leaf subsets of a plane tree that induce the four-leaf
/// caterpillar, as sorted 1-based rank quadruples.
pub fn c4_quadruples(t: &PlaneTree) -> Vec<[u32; 4]> {
    let n = t.leaf_count() as usize;
    let mut out = Vec::new();
    if n < 4 {
        return out;
    }
    let depths = t.lca_depths();
    for a in 0..n - 3 {
        for b in a + 1..n - 2 {
            let d1 = depths.get(a, b);
            for c in b + 1..n - 1 {
                let d2 = depths.get(b, c);
                for d in c + 1..n {
                    let d3 = depths.get(c, d);
                    if quad_pattern(d1, d2, d3) != 2 {
                        out.push([a as u32 + 1, b as u32 + 1, c as u32 + 1, d as u32 + 1]);
                    }
                }
            }
        }
    }
    out
}

// Number of quadruple pairs (U, sigma(U)) inducing the forced-crossing
// caterpillar pair. The scan classifies both induced plane structures from
// LCA depths and looks up the induced permutation in the precomputed table.
fn no6_pair_count(t: &Tanglegram) -> u64 {
    let n = t.n() as usize;
    if n < 4 {
        return 0;
    }
    let dl = t.left.lca_depths();
    let dr = t.right.lca_depths();
    let table = no6_table();
    let s: Vec<u32> = t.sigma.iter().map(|&v| v - 1).collect();
    let mut count = 0u64;
    for a in 0..n - 3 {
        for b in a + 1..n - 2 {
            let d1 = dl.get(a, b);
            for c in b + 1..n - 1 {
                let d2 = dl.get(b, c);
                for d in c + 1..n {
                    let d3 = dl.get(c, d);
                    let li = quad_pattern(d1, d2, d3);
                    if li == 2 {
                        continue;
                    }
                    let (v, tau) = sort4_with_perm([s[a], s[b], s[c], s[d]]);
                    let e1 = dr.get(v[0] as usize, v[1] as usize);
                    let e2 = dr.get(v[1] as usize, v[2] as usize);
                    let e3 = dr.get(v[2] as usize, v[3] as usize);
                    let ri = quad_pattern(e1, e2, e3);
                    if ri == 2 {
                        continue;
                    }
                    if table[li][ri][perm4_rank(tau)] {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// Quadruple lower bound on the tangle crossing number: the number of
/// matched four-leaf subset pairs forcing a crossing, divided by
/// `C(n-2, 2)`. Always at most the tangle crossing number. Capped at
/// [`MAX_BOUND_LEAVES`] leaves.
pub fn no6_lower_bound(t: &Tanglegram) -> Result<BigRational> {
    let n = t.n();
    if n > MAX_BOUND_LEAVES {
        return Err(Error::SizeLimit {
            what: "quadruple crossing bound",
            n: n as u64,
            limit: MAX_BOUND_LEAVES as u64,
            hint: "",
        });
    }
    if n < 4 {
        return Ok(BigRational::from_integer(BigInt::from(0)));
    }
    let count = no6_pair_count(t);
    Ok(BigRational::new(
        BigInt::from(count),
        BigInt::from(binomial(n as u64 - 2, 2)),
    ))
}

// ---------------------------------------------------------------------------
// Random generation
// ---------------------------------------------------------------------------

/// Exactly uniform random plane tree with `n` leaves, grown by leaf
/// insertion: each step picks one of the current `2k - 1` vertices and a
/// side uniformly and grafts a new leaf there, which makes every leaf-
/// labelled tree (hence every plane shape) equally likely.
pub fn random_plane_tree(n: u32, rng: &mut impl Rng) -> PlaneTree {
    assert!(n >= 1, "plane tree needs at least one leaf");
    let mut kids: Vec<Option<(u32, u32)>> = vec![None];
    let mut parent: Vec<i32> = vec![-1];
    let mut root: u32 = 0;
    for _ in 1..n {
        let v = rng.random_range(0..kids.len() as u32);
        let leaf_first = rng.random_range(0..2u32) == 0;
        let joint = kids.len() as u32;
        kids.push(None);
        parent.push(parent[v as usize]);
        let leaf = kids.len() as u32;
        kids.push(None);
        parent.push(joint as i32);
        match parent[joint as usize] {
            -1 => root = joint,
            p => {
                let (x, y) = kids[p as usize].unwrap();
                kids[p as usize] = if x == v {
                    Some((joint, y))
                } else {
                    Some((x, joint))
                };
            }
        }
        kids[joint as usize] = if leaf_first {
            Some((leaf, v))
        } else {
            Some((v, leaf))
        };
        parent[v as usize] = joint as i32;
    }
    // assemble bottom-up over the arena
    let mut built: Vec<Option<PlaneTree>> = vec![None; kids.len()];
    let mut stack = vec![root];
    while let Some(&v) = stack.last() {
        if built[v as usize].is_some() {
            stack.pop();
            continue;
        }
        match kids[v as usize] {
            None => {
                built[v as usize] = Some(PlaneTree::Leaf);
                stack.pop();
            }
            Some((x, y)) => {
                if built[x as usize].is_some() && built[y as usize].is_some() {
                    let a = built[x as usize].take().unwrap();
                    let b = built[y as usize].take().unwrap();
                    built[v as usize] = Some(PlaneTree::node(a, b));
                    stack.pop();
                } else {
                    stack.push(x);
                    stack.push(y);
                }
            }
        }
    }
    built[root as usize].take().unwrap()
}

/// Uniform random layout: two independent uniform plane trees and a uniform
/// matching. This is uniform over the `Cat(n-1)^2 n!` layouts, not over
/// tanglegram equivalence classes; see [`ExperimentConfig::weighted`] for
/// the automorphism-weighted alternative. Draw order: left tree, right
/// tree, matching.
pub fn random_tanglegram_layout(n: u32, rng: &mut impl Rng) -> Tanglegram {
    let left = random_plane_tree(n, rng);
    let right = random_plane_tree(n, rng);
    let mut sigma: Vec<u32> = (1..=n).collect();
    for i in (1..n as usize).rev() {
        let j = rng.random_range(0..=i);
        sigma.swap(i, j);
    }
    Tanglegram { left, right, sigma }
}

/// Derived generator for trial `index` of a run seeded with `seed`; the
/// mixing pipeline is documented in [`crate::rng`].
pub fn trial_rng(seed: u64, index: u64) -> rand_chacha::ChaCha8Rng {
    stream(seed, index)
}

// ---------------------------------------------------------------------------
// Enumeration and automorphisms
// ---------------------------------------------------------------------------

/// All tanglegrams with `n <= 5` leaves, one canonical layout per
/// equivalence class, sorted by canonical encoding.
pub fn enumerate_tanglegrams(n: u32) -> Result<Vec<Tanglegram>> {
    if n == 0 {
        return Err(Error::Invalid("tanglegram enumeration needs n >= 1".into()));
    }
    if n > MAX_ENUM_LEAVES {
        return Err(Error::SizeLimit {
            what: "tanglegram enumeration",
            n: n as u64,
            limit: MAX_ENUM_LEAVES as u64,
            hint: "",
        });
    }
    let trees = crate::tree::enumerate_plane_trees(n);
    let mut classes = BTreeSet::new();
    for left in &trees {
        for right in &trees {
            for sigma in permutations(n) {
                let t = Tanglegram {
                    left: left.clone(),
                    right: right.clone(),
                    sigma,
                };
                classes.insert(t.canonical_encoding());
            }
        }
    }
    classes.into_iter().map(|s| parse_tanglegram(&s)).collect()
}

// All permutations of 1..=n (Heap's algorithm), for small n.
fn permutations(n: u32) -> Vec<Vec<u32>> {
    let mut current: Vec<u32> = (1..=n).collect();
    let mut out = vec![current.clone()];
    let mut c = vec![0usize; n as usize];
    let mut i = 0usize;
    while i < n as usize {
        if c[i] < i {
            if i.is_multiple_of(2) {
                current.swap(0, i);
            } else {
                current.swap(c[i], i);
            }
            out.push(current.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Order of the automorphism group of the tanglegram: pairs of tree
/// automorphisms whose leaf actions commute with the matching. Divides both
/// tree automorphism orders and is a power of two. Capped at
/// [`MAX_AUT_LEAVES`].
pub fn tanglegram_automorphism_order(t: &Tanglegram) -> Result<u64> {
    let n = t.n();
    if n > MAX_AUT_LEAVES {
        return Err(Error::SizeLimit {
            what: "tanglegram automorphism count",
            n: n as u64,
            limit: MAX_AUT_LEAVES as u64,
            hint: "",
        });
    }
    let alphas = t.left.automorphism_perms();
    let betas = t.right.automorphism_perms();
    let sigma0: Vec<u32> = t.sigma.iter().map(|&v| v - 1).collect();
    let mut count = 0u64;
    for alpha in &alphas {
        for beta in &betas {
            let commutes =
                (0..n as usize).all(|i| beta[sigma0[i] as usize] == sigma0[alpha[i] as usize]);
            if commutes {
                count += 1;
            }
        }
    }
    Ok(count)
}

// ---------------------------------------------------------------------------
// Monte Carlo experiments
// ---------------------------------------------------------------------------

/// Parameters for [`expectation_experiment`].
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub n: u32,
    pub trials: u32,
    pub seed: u64,
    /// Threshold coefficient: the report carries the fraction of trials
    /// with bound at least `theta * n^2`.
    pub theta: f64,
    /// Worker threads; results do not depend on the worker count.
    pub jobs: usize,
    /// Reweight each sampled layout by the automorphism order of its
    /// tanglegram, turning the layout-uniform sample into a
    /// tanglegram-uniform one. Requires `n <=` [`MAX_AUT_LEAVES`].
    pub weighted: bool,
}

impl ExperimentConfig {
    pub fn new(n: u32, trials: u32, seed: u64) -> Self {
        ExperimentConfig {
            n,
            trials,
            seed,
            theta: DEFAULT_THETA,
            jobs: 1,
            weighted: false,
        }
    }
}

/// Summary statistics of the quadruple bound over sampled layouts.
#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub n: u32,
    pub trials: u32,
    pub seed: u64,
    /// Mean of the per-trial bound `X`.
    pub mean_bound: f64,
    /// Sample variance of `X`; in weighted mode, the weighted second
    /// central moment.
    pub var_bound: f64,
    pub q10: f64,
    pub q50: f64,
    pub q90: f64,
    /// Fraction of trials with `X >= theta * n^2`.
    pub frac_ge_theta: f64,
    pub theta: f64,
    /// Generator pipeline identifier, for output metadata.
    pub rng_id: &'static str,
    pub weighted: bool,
}

/// Sample seeded random layouts, compute the quadruple crossing bound for
/// each, and summarise. Trial `i` always uses the derived stream
/// `(seed, i)`, so results are bit-identical for a fixed seed regardless of
/// the worker count.
pub fn expectation_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    if cfg.n < 8 {
        return Err(Error::Invalid(
            "the crossing-bound experiment needs n >= 8".into(),
        ));
    }
    if cfg.trials < 1 {
        return Err(Error::Invalid(
            "the experiment needs at least one trial".into(),
        ));
    }
    if cfg.n > MAX_BOUND_LEAVES {
        return Err(Error::SizeLimit {
            what: "quadruple crossing bound",
            n: cfg.n as u64,
            limit: MAX_BOUND_LEAVES as u64,
            hint: "",
        });
    }
    if cfg.weighted && cfg.n > MAX_AUT_LEAVES {
        return Err(Error::SizeLimit {
            what: "automorphism-weighted experiment",
            n: cfg.n as u64,
            limit: MAX_AUT_LEAVES as u64,
            hint: "",
        });
    }

    let pair_choices =
        u128::try_from(&binomial(cfg.n as u64 - 2, 2)).unwrap_or(u128::MAX) as f64;
    let run_trial = |trial: u32| -> Result<(f64, f64)> {
        let mut rng = stream(cfg.seed, u64::from(trial));
        let layout = random_tanglegram_layout(cfg.n, &mut rng);
        let x = no6_pair_count(&layout) as f64 / pair_choices;
        let w = if cfg.weighted {
            tanglegram_automorphism_order(&layout)? as f64
        } else {
            1.0
        };
        Ok((x, w))
    };

    let jobs = cfg.jobs.max(1).min(cfg.trials as usize);
    let mut samples: Vec<(f64, f64)> = vec![(0.0, 0.0); cfg.trials as usize];
    if jobs <= 1 {
        for (trial, slot) in samples.iter_mut().enumerate() {
            *slot = run_trial(trial as u32)?;
        }
    } else {
        type TrialBatch = Vec<(u32, (f64, f64))>;
        let results: Vec<Result<TrialBatch>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs)
                .map(|worker| {
                    let run_trial = &run_trial;
                    scope.spawn(move || {
                        let mut mine = Vec::new();
                        let mut trial = worker as u32;
                        while trial < cfg.trials {
                            mine.push((trial, run_trial(trial)?));
                            trial += jobs as u32;
                        }
                        Ok(mine)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        for chunk in results {
            for (trial, sample) in chunk? {
                samples[trial as usize] = sample;
            }
        }
    }

    let total_weight: f64 = samples.iter().map(|&(_, w)| w).sum();
    let mean = samples.iter().map(|&(x, w)| x * w).sum::<f64>() / total_weight;
    let var = if cfg.trials > 1 {
        let ss: f64 = samples
            .iter()
            .map(|&(x, w)| w * (x - mean) * (x - mean))
            .sum();
        if cfg.weighted {
            ss / total_weight
        } else {
            ss / (cfg.trials as f64 - 1.0)
        }
    } else {
        0.0
    };
    let threshold = cfg.theta * (cfg.n as f64) * (cfg.n as f64);
    let frac = samples
        .iter()
        .filter(|&&(x, _)| x >= threshold)
        .map(|&(_, w)| w)
        .sum::<f64>()
        / total_weight;

    let mut sorted = samples.clone();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let quantile = |q: f64| -> f64 {
        let target = q * total_weight;
        let mut cum = 0.0;
        for &(x, w) in &sorted {
            cum += w;
            if cum >= target {
                return x;
            }
        }
        sorted.last().unwrap().0
    };

    Ok(ExperimentResult {
        n: cfg.n,
        trials: cfg.trials,
        seed: cfg.seed,
        mean_bound: mean,
        var_bound: var,
        q10: quantile(0.1),
        q50: quantile(0.5),
        q90: quantile(0.9),
        frac_ge_theta: frac,
        theta: cfg.theta,
        rng_id: RNG_ID,
        weighted: cfg.weighted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{induce_plane, LeafSubset};
    use std::collections::HashMap;

    fn tg(text: &str) -> Tanglegram {
        parse_tanglegram(text).unwrap()
    }

    // the forced-crossing pair of caterpillars, four leaves
    fn forced_caterpillar_pair() -> Tanglegram {
        tg("(((L L) L) L)|(((L L) L) L)|1,4,3,2")
    }

    #[test]
    fn parse_and_display_round_trip() {
        let t = tg("(L (L L))|((L L) L)|2,3,1");
        assert_eq!(t.to_string(), "(L (L L))|((L L) L)|2,3,1");
        assert_eq!(t.n(), 3);
        assert!(parse_tanglegram("(L L)|(L L)|1").is_err());
        assert!(parse_tanglegram("(L L)|(L L)|1,1").is_err());
        assert!(parse_tanglegram("(L L)|(L L)|1,3").is_err());
        assert!(parse_tanglegram("(L L)|(L L)").is_err());
        assert!(parse_tanglegram("(L L)|((L L) L)|1,2").is_err());
    }

    #[test]
    fn layout_crossings_examples() {
        let id = tg("((L L) (L L))|((L L) (L L))|1,2,3,4");
        assert_eq!(id.layout_crossings(), 0);
        let rev = tg("((L L) (L L))|((L L) (L L))|4,3,2,1");
        assert_eq!(rev.layout_crossings(), 6);
        let single = tg("((L L) (L L))|((L L) (L L))|2,1,3,4");
        assert_eq!(single.layout_crossings(), 1);
    }

    #[test]
    fn layout_crossings_matches_naive_count() {
        for trial in 0..50 {
            let mut rng = stream(3, trial);
            let n = 2 + (trial % 9) as u32;
            let t = random_tanglegram_layout(n, &mut rng);
            let s = t.sigma();
            let mut naive = 0u64;
            for i in 0..s.len() {
                for j in i + 1..s.len() {
                    if s[i] > s[j] {
                        naive += 1;
                    }
                }
            }
            assert_eq!(t.layout_crossings(), naive);
        }
    }

    #[test]
    fn crossing_number_examples() {
        assert_eq!(tangle_crossing_exact(&forced_caterpillar_pair()).unwrap(), 1);
        let forced_complete = tg("((L L) (L L))|((L L) (L L))|1,3,2,4");
        assert_eq!(tangle_crossing_exact(&forced_complete).unwrap(), 1);
        let identity = tg("(((L L) L) L)|(((L L) L) L)|1,2,3,4");
        assert_eq!(tangle_crossing_exact(&identity).unwrap(), 0);
    }

    #[test]
    fn crossing_number_is_flip_invariant_and_bounded() {
        for trial in 0..40u64 {
            let mut rng = stream(17, trial);
            let n = 4 + (trial % 5) as u32;
            let t = random_tanglegram_layout(n, &mut rng);
            let crt = tangle_crossing_exact(&t).unwrap();
            assert!(crt <= t.layout_crossings());
            assert!(t.layout_crossings() <= (n as u64) * (n as u64 - 1) / 2);
            let flips = FlipAssignment {
                left: (0..t.left().internal_count())
                    .map(|i| (trial >> (i % 16)) & 1 == 1)
                    .collect(),
                right: (0..t.right().internal_count())
                    .map(|i| (trial >> ((i + 7) % 16)) & 1 == 1)
                    .collect(),
            };
            let moved = t.apply_flips(&flips);
            assert_eq!(tangle_crossing_exact(&moved).unwrap(), crt);
            assert_eq!(moved.canonical_encoding(), t.canonical_encoding());
        }
    }

    #[test]
    fn crossing_number_cap() {
        let mut rng = stream(0, 0);
        let t = random_tanglegram_layout(11, &mut rng);
        assert!(matches!(
            tangle_crossing_exact(&t),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn size4_catalogue() {
        let classes = enumerate_tanglegrams(4).unwrap();
        assert_eq!(classes.len(), 13);
        let crossing: Vec<&Tanglegram> = classes
            .iter()
            .filter(|t| tangle_crossing_exact(t).unwrap() > 0)
            .collect();
        assert_eq!(crossing.len(), 2);
        let mut saw_forced_caterpillars = false;
        let mut saw_forced_complete = false;
        for t in crossing {
            let class = classify_size4(t).unwrap();
            assert_eq!(class.crt, 1);
            saw_forced_caterpillars |= class.is_no6;
            saw_forced_complete |= class.is_no13;
        }
        assert!(saw_forced_caterpillars && saw_forced_complete);
    }

    #[test]
    fn small_catalogues() {
        assert_eq!(enumerate_tanglegrams(1).unwrap().len(), 1);
        assert_eq!(enumerate_tanglegrams(2).unwrap().len(), 1);
        assert_eq!(enumerate_tanglegrams(3).unwrap().len(), 2);
        assert!(matches!(
            enumerate_tanglegrams(6),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn four_of_twentyfour_matchings_force_a_crossing() {
        let mut hits = 0;
        let perms = permutations(4);
        assert_eq!(perms.len(), 24);
        for p in perms {
            let t = Tanglegram::new(plane4(4), plane4(4), p).unwrap();
            if classify_size4(&t).unwrap().is_no6 {
                hits += 1;
            }
        }
        assert_eq!(hits, 4);
    }

    #[test]
    fn c4_quadruples_match_counts() {
        use crate::counting::count_induced;
        for (shape, expect) in [
            (complete(3), 32u64),
            (caterpillar(6), 15),
            (complete(2), 0),
        ] {
            let plane = PlaneTree::from_shape(&shape);
            let quads = c4_quadruples(&plane);
            assert_eq!(quads.len() as u64, expect);
            assert_eq!(
                num_bigint::BigUint::from(quads.len() as u64),
                count_induced(&caterpillar(4), &shape)
            );
            for q in quads.iter().take(10) {
                let subset = LeafSubset::new(q.iter().copied(), plane.leaf_count()).unwrap();
                assert_eq!(
                    crate::tree::induce(&plane, &subset).unwrap(),
                    caterpillar(4)
                );
            }
        }
    }

    // independent oracle: count matched quadruple pairs by explicitly
    // building each induced four-leaf tanglegram
    fn no6_pair_count_oracle(t: &Tanglegram) -> u64 {
        let n = t.n();
        let s = t.sigma();
        let mut count = 0;
        for quad in c4_quadruples(t.left()) {
            let images: Vec<u32> = quad.iter().map(|&r| s[(r - 1) as usize]).collect();
            let mut sorted = images.clone();
            sorted.sort_unstable();
            let left_sub =
                induce_plane(t.left(), &LeafSubset::new(quad.iter().copied(), n).unwrap())
                    .unwrap();
            let right_sub =
                induce_plane(t.right(), &LeafSubset::new(sorted.clone(), n).unwrap()).unwrap();
            let sigma4: Vec<u32> = images
                .iter()
                .map(|v| sorted.iter().position(|w| w == v).unwrap() as u32 + 1)
                .collect();
            let induced = Tanglegram::new(left_sub, right_sub, sigma4).unwrap();
            if classify_size4(&induced).unwrap().is_no6 {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn fast_pair_count_matches_oracle() {
        for trial in 0..60 {
            let mut rng = stream(23, trial);
            let n = 4 + (trial % 7) as u32;
            let t = random_tanglegram_layout(n, &mut rng);
            assert_eq!(no6_pair_count(&t), no6_pair_count_oracle(&t), "{t}");
        }
    }

    #[test]
    fn bound_examples_and_soundness() {
        // the four-leaf forced-crossing layout is its own single witness
        let t = forced_caterpillar_pair();
        assert_eq!(
            no6_lower_bound(&t).unwrap(),
            BigRational::from_integer(BigInt::from(1))
        );
        assert_eq!(tangle_crossing_exact(&t).unwrap(), 1);
        // identity-matched caterpillars have no crossings and no witnesses
        let id = tg("(((L L) L) L)|(((L L) L) L)|1,2,3,4");
        assert_eq!(
            no6_lower_bound(&id).unwrap(),
            BigRational::from_integer(BigInt::from(0))
        );
        for trial in 0..60 {
            let mut rng = stream(29, trial);
            let n = 4 + (trial % 7) as u32;
            let t = random_tanglegram_layout(n, &mut rng);
            let bound = no6_lower_bound(&t).unwrap();
            let crt =
                BigRational::from_integer(BigInt::from(tangle_crossing_exact(&t).unwrap()));
            assert!(bound <= crt, "{t}");
        }
        // and over every enumerated class at four and five leaves
        for n in 4..=5 {
            for t in enumerate_tanglegrams(n).unwrap() {
                let bound = no6_lower_bound(&t).unwrap();
                let crt = BigRational::from_integer(BigInt::from(
                    tangle_crossing_exact(&t).unwrap(),
                ));
                assert!(bound <= crt, "{t}");
            }
        }
    }

    #[test]
    fn plane_tree_sampler_frequencies() {
        // two shapes at n = 3, about half each
        let mut rng = stream(5, 0);
        let mut left_heavy = 0u32;
        let trials = 10_000;
        for _ in 0..trials {
            let t = random_plane_tree(3, &mut rng);
            if t.encoding() == "((L L) L)" {
                left_heavy += 1;
            }
        }
        let p = left_heavy as f64 / trials as f64;
        assert!((p - 0.5).abs() < 0.02, "p = {p}");
        // all five plane trees at n = 4 appear
        let mut seen = HashMap::new();
        for _ in 0..5000 {
            let t = random_plane_tree(4, &mut rng);
            *seen.entry(t.encoding()).or_insert(0u32) += 1;
        }
        assert_eq!(seen.len(), 5);
    }

    #[test]
    fn matching_marginal_is_uniform() {
        let mut rng = stream(6, 0);
        let n = 5u32;
        let trials = 20_000;
        let mut first_image = vec![0u32; n as usize];
        for _ in 0..trials {
            let t = random_tanglegram_layout(n, &mut rng);
            first_image[(t.sigma()[0] - 1) as usize] += 1;
        }
        let expect = trials as f64 / n as f64;
        for &c in &first_image {
            assert!((c as f64 - expect).abs() < 5.0 * expect.sqrt());
        }
    }

    #[test]
    fn automorphism_orders_divide_and_are_powers_of_two() {
        for trial in 0..40 {
            let mut rng = stream(31, trial);
            let n = 2 + (trial % 7) as u32;
            let t = random_tanglegram_layout(n, &mut rng);
            let a = tanglegram_automorphism_order(&t).unwrap();
            assert!(a.is_power_of_two());
            let la = t.left().automorphism_perms().len() as u64;
            let ra = t.right().automorphism_perms().len() as u64;
            assert_eq!(la % a, 0);
            assert_eq!(ra % a, 0);
        }
        // identity-matched pair of four-leaf caterpillars
        let id = tg("(((L L) L) L)|(((L L) L) L)|1,2,3,4");
        assert_eq!(tanglegram_automorphism_order(&id).unwrap(), 2);
        let single = tg("L|L|1");
        assert_eq!(tanglegram_automorphism_order(&single).unwrap(), 1);
    }

    #[test]
    fn orbit_stabilizer_sums_count_classes() {
        // sum of |A| / 2^(2n-2) over all layouts equals the class count:
        // an independent route to the same number the enumeration finds
        for n in 2..=5u32 {
            let trees = crate::tree::enumerate_plane_trees(n);
            let mut total = 0u64;
            let mut layouts = 0u64;
            for sigma in permutations(n) {
                for left in &trees {
                    for right in &trees {
                        let t = Tanglegram {
                            left: left.clone(),
                            right: right.clone(),
                            sigma: sigma.clone(),
                        };
                        total += tanglegram_automorphism_order(&t).unwrap();
                        layouts += 1;
                    }
                }
            }
            let expected_layouts =
                (trees.len() * trees.len()) as u64 * permutations(n).len() as u64;
            assert_eq!(layouts, expected_layouts);
            let denom = 1u64 << (2 * n - 2);
            assert_eq!(total % denom, 0, "n = {n}");
            assert_eq!(
                total / denom,
                enumerate_tanglegrams(n).unwrap().len() as u64,
                "n = {n}"
            );
        }
    }

    #[test]
    fn fixed_pair_matching_probability() {
        // for one fixed quadruple pair between two caterpillar hosts, the
        // chance that a uniform matching joins them into the forced-crossing
        // class is 4 (n-4)! / n!
        let n = 8u32;
        let left = PlaneTree::from_shape(&caterpillar(n as u64));
        let right = PlaneTree::from_shape(&caterpillar(n as u64));
        let quad = [1u32, 2, 3, 4];
        let trials = 200_000u32;
        let mut hits = 0u32;
        let mut rng = stream(41, 0);
        for _ in 0..trials {
            let mut sigma: Vec<u32> = (1..=n).collect();
            for i in (1..n as usize).rev() {
                let j = rng.random_range(0..=i);
                sigma.swap(i, j);
            }
            let images: Vec<u32> = quad.iter().map(|&r| sigma[(r - 1) as usize]).collect();
            let mut sorted = images.clone();
            sorted.sort_unstable();
            if sorted != [1, 2, 3, 4] {
                continue;
            }
            let induced = Tanglegram::new(
                induce_plane(&left, &LeafSubset::new(quad.iter().copied(), n).unwrap())
                    .unwrap(),
                induce_plane(&right, &LeafSubset::new(sorted, n).unwrap()).unwrap(),
                images,
            )
            .unwrap();
            if classify_size4(&induced).unwrap().is_no6 {
                hits += 1;
            }
        }
        let p = hits as f64 / trials as f64;
        let expect = 4.0 / (n as f64 * (n - 1) as f64 * (n - 2) as f64 * (n - 3) as f64);
        let sd = (expect * (1.0 - expect) / trials as f64).sqrt();
        assert!(
            (p - expect).abs() < 5.0 * sd + 1e-9,
            "p = {p}, expected {expect}"
        );
    }

    #[test]
    fn experiment_is_deterministic_and_parallel_safe() {
        let cfg = ExperimentConfig {
            jobs: 1,
            ..ExperimentConfig::new(16, 40, 7)
        };
        let a = expectation_experiment(&cfg).unwrap();
        let b = expectation_experiment(&cfg).unwrap();
        assert_eq!(a.mean_bound.to_bits(), b.mean_bound.to_bits());
        let par = ExperimentConfig { jobs: 4, ..cfg };
        let c = expectation_experiment(&par).unwrap();
        assert_eq!(a.mean_bound.to_bits(), c.mean_bound.to_bits());
        assert_eq!(a.var_bound.to_bits(), c.var_bound.to_bits());
        assert_eq!(a.q50.to_bits(), c.q50.to_bits());
        assert_eq!(a.frac_ge_theta.to_bits(), c.frac_ge_theta.to_bits());
        assert_eq!(a.rng_id, RNG_ID);
    }

    #[test]
    fn experiment_rejects_bad_parameters() {
        assert!(expectation_experiment(&ExperimentConfig::new(4, 10, 0)).is_err());
        assert!(expectation_experiment(&ExperimentConfig::new(16, 0, 0)).is_err());
        let weighted = ExperimentConfig {
            weighted: true,
            ..ExperimentConfig::new(16, 10, 0)
        };
        assert!(expectation_experiment(&weighted).is_err());
    }

    #[test]
    fn weighted_experiment_runs_at_small_sizes() {
        let cfg = ExperimentConfig {
            weighted: true,
            ..ExperimentConfig::new(10, 50, 3)
        };
        let r = expectation_experiment(&cfg).unwrap();
        assert!(r.weighted);
        assert!(r.mean_bound >= 0.0);
    }

    #[test]
    fn no6_bound_degenerates_below_four_leaves() {
        let t = tg("(L L)|(L L)|2,1");
        assert_eq!(
            no6_lower_bound(&t).unwrap(),
            BigRational::from_integer(BigInt::from(0))
        );
    }

    #[test]
    fn quantiles_are_monotone() {
        let cfg = ExperimentConfig::new(24, 60, 11);
        let r = expectation_experiment(&cfg).unwrap();
        assert!(r.q10 <= r.q50 && r.q50 <= r.q90);
        assert!(r.mean_bound >= 0.0);
    }
}
