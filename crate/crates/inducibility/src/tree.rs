//! Rooted binary tree shapes and plane (ordered) binary trees.
//!
//! A [`TreeShape`] is a rooted binary tree up to isomorphism: every vertex is
//! a leaf or has exactly two children, and the order of the two branches does
//! not matter. Shapes are interned in a global content-addressed table, so
//! equality and hashing are O(1) and isomorphic trees are always the same
//! object. The canonical form puts the smaller branch first under the total
//! order "compare leaf counts, then encodings lexicographically".
//!
//! A [`PlaneTree`] keeps the left/right order of children significant; its
//! leaves are implicitly ranked `1..=n` from left to right.
//!
//! Both kinds share one text grammar: `L` is a leaf and `(X Y)` is an
//! internal vertex with branches `X` and `Y`, separated by a single space.
//! The builder aliases `cat:<k>`, `cb:<h>`, `even:<n>` and `a52` are accepted
//! anywhere a tree is expected.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;

use crate::{Error, Result};

/// Default cap for [`enumerate_shapes`]; raiseable per call.
pub const DEFAULT_ENUM_LIMIT: u64 = 14;

// ---------------------------------------------------------------------------
// Canonical shapes
// ---------------------------------------------------------------------------

/// A rooted binary tree shape, canonical and interned.
///
/// Two shapes are isomorphic if and only if they are the same interned
/// object, which is what `==` checks. Cloning is an `Arc` bump.
#[derive(Clone)]
pub struct TreeShape(Arc<ShapeNode>);

struct ShapeNode {
    id: u64,
    leaf_count: u64,
    /// `None` for a leaf; otherwise the two branches with the smaller one
    /// (under the canonical order) first.
    branches: Option<(TreeShape, TreeShape)>,
}

struct Interner {
    leaf: TreeShape,
    nodes: HashMap<(u64, u64), TreeShape>,
    next_id: u64,
}

fn interner() -> &'static Mutex<Interner> {
    static TABLE: OnceLock<Mutex<Interner>> = OnceLock::new();
    TABLE.get_or_init(|| {
        Mutex::new(Interner {
            leaf: TreeShape(Arc::new(ShapeNode {
                id: 0,
                leaf_count: 1,
                branches: None,
            })),
            nodes: HashMap::new(),
            next_id: 1,
        })
    })
}

impl TreeShape {
    /// The single-leaf shape.
    pub fn leaf() -> Self {
        interner().lock().unwrap().leaf.clone()
    }

    /// Canonical node over the branch multiset `{a, b}`; the arguments may be
    /// given in either order.
    pub fn node(a: &TreeShape, b: &TreeShape) -> Self {
        let (small, large) = if a.cmp(b) == Ordering::Greater {
            (b, a)
        } else {
            (a, b)
        };
        let key = (small.id(), large.id());
        let mut table = interner().lock().unwrap();
        if let Some(t) = table.nodes.get(&key) {
            return t.clone();
        }
        let id = table.next_id;
        table.next_id += 1;
        let t = TreeShape(Arc::new(ShapeNode {
            id,
            leaf_count: small.leaf_count() + large.leaf_count(),
            branches: Some((small.clone(), large.clone())),
        }));
        table.nodes.insert(key, t.clone());
        t
    }

    pub fn is_leaf(&self) -> bool {
        self.0.branches.is_none()
    }

    /// Number of leaves.
    pub fn leaf_count(&self) -> u64 {
        self.0.leaf_count
    }

    /// The two branches in canonical order, or `None` for a leaf.
    pub fn branches(&self) -> Option<(&TreeShape, &TreeShape)> {
        self.0.branches.as_ref().map(|(a, b)| (a, b))
    }

    /// Interner id; stable for the lifetime of the process and usable as a
    /// memoisation key.
    pub(crate) fn id(&self) -> u64 {
        self.0.id
    }

    /// Canonical text form in the `L` / `(X Y)` grammar.
    pub fn encoding(&self) -> String {
        enum Item<'a> {
            Tree(&'a TreeShape),
            Char(char),
        }
        let mut out = String::new();
        let mut stack = vec![Item::Tree(self)];
        while let Some(item) = stack.pop() {
            match item {
                Item::Char(c) => out.push(c),
                Item::Tree(t) => match t.branches() {
                    None => out.push('L'),
                    Some((a, b)) => {
                        out.push('(');
                        stack.push(Item::Char(')'));
                        stack.push(Item::Tree(b));
                        stack.push(Item::Char(' '));
                        stack.push(Item::Tree(a));
                    }
                },
            }
        }
        out
    }

    /// Order of the automorphism group: 1 for a leaf, the product of the
    /// branch orders when the branches differ, and twice the square of the
    /// branch order when they are isomorphic. Always a power of two.
    pub fn automorphism_order(&self) -> BigUint {
        let mut memo: HashMap<u64, BigUint> = HashMap::new();
        let mut stack = vec![self.clone()];
        while let Some(t) = stack.last().cloned() {
            if memo.contains_key(&t.id()) {
                stack.pop();
                continue;
            }
            match t.branches() {
                None => {
                    memo.insert(t.id(), BigUint::from(1u32));
                    stack.pop();
                }
                Some((a, b)) => match (memo.get(&a.id()), memo.get(&b.id())) {
                    (Some(va), Some(vb)) => {
                        let value = if a == b {
                            BigUint::from(2u32) * va * va
                        } else {
                            va * vb
                        };
                        memo.insert(t.id(), value);
                        stack.pop();
                    }
                    _ => {
                        stack.push(a.clone());
                        stack.push(b.clone());
                    }
                },
            }
        }
        memo.remove(&self.id()).unwrap()
    }
}

impl PartialEq for TreeShape {
    fn eq(&self, other: &Self) -> bool {
        self.id() == other.id()
    }
}
impl Eq for TreeShape {}

impl Hash for TreeShape {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.id().hash(state);
    }
}

impl PartialOrd for TreeShape {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order: leaf count first, then encodings lexicographically.
impl Ord for TreeShape {
    fn cmp(&self, other: &Self) -> Ordering {
        self.leaf_count()
            .cmp(&other.leaf_count())
            .then_with(|| encoding_cmp(self, other))
    }
}

// Lexicographic comparison of encodings without materialising the strings.
// A node encoding starts with '(' (0x28) and a leaf is 'L' (0x4c), so a node
// string sorts before a leaf. A balanced encoding is never a proper prefix of
// another (the opening '(' closes only at the final byte), so a mismatch
// inside the first branches settles the comparison.
fn encoding_cmp(a: &TreeShape, b: &TreeShape) -> Ordering {
    if a.id() == b.id() {
        return Ordering::Equal;
    }
    match (a.branches(), b.branches()) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Greater,
        (Some(_), None) => Ordering::Less,
        (Some((a1, a2)), Some((b1, b2))) => {
            encoding_cmp(a1, b1).then_with(|| encoding_cmp(a2, b2))
        }
    }
}

impl fmt::Display for TreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encoding())
    }
}

impl fmt::Debug for TreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encoding())
    }
}

// ---------------------------------------------------------------------------
// Named families
// ---------------------------------------------------------------------------

/// Caterpillar with `k` leaves: all internal vertices on one path.
pub fn caterpillar(k: u64) -> TreeShape {
    assert!(k >= 1, "caterpillar needs at least one leaf");
    let leaf = TreeShape::leaf();
    let mut t = leaf.clone();
    for _ in 1..k {
        t = TreeShape::node(&t, &leaf);
    }
    t
}

/// Complete binary tree of height `h`, with `2^h` leaves.
pub fn complete(h: u32) -> TreeShape {
    let mut t = TreeShape::leaf();
    for _ in 0..h {
        t = TreeShape::node(&t, &t);
    }
    t
}

/// The even tree with `n` leaves: at every internal vertex the branch leaf
/// counts differ by at most one. Unique for each `n`.
pub fn even(n: u64) -> TreeShape {
    assert!(n >= 1, "even tree needs at least one leaf");
    fn build(n: u64, memo: &mut HashMap<u64, TreeShape>) -> TreeShape {
        if n == 1 {
            return TreeShape::leaf();
        }
        if let Some(t) = memo.get(&n) {
            return t.clone();
        }
        let lo = build(n / 2, memo);
        let hi = build(n - n / 2, memo);
        let t = TreeShape::node(&lo, &hi);
        memo.insert(n, t.clone());
        t
    }
    build(n, &mut HashMap::new())
}

/// The five-leaf tree whose branches are a single leaf and the complete tree
/// on four leaves: the third five-leaf shape besides the caterpillar and the
/// even tree.
pub fn a52() -> TreeShape {
    TreeShape::node(&TreeShape::leaf(), &complete(2))
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// All shapes with exactly `n` leaves, each once, sorted by the canonical
/// order. Uses the default cap of [`DEFAULT_ENUM_LIMIT`] leaves.
pub fn enumerate_shapes(n: u64) -> Result<Vec<TreeShape>> {
    enumerate_shapes_limited(n, DEFAULT_ENUM_LIMIT)
}

/// As [`enumerate_shapes`] with an explicit cap.
///
/// Shapes with `m` leaves are built by splitting `m = a + b` with `a <= b`
/// and pairing shapes of the two sizes, taking ordered pairs when `a == b`;
/// this produces every shape exactly once.
pub fn enumerate_shapes_limited(n: u64, limit: u64) -> Result<Vec<TreeShape>> {
    if n == 0 {
        return Err(Error::Invalid("shape enumeration needs n >= 1".into()));
    }
    if n > limit {
        return Err(Error::SizeLimit {
            what: "shape enumeration",
            n,
            limit,
            hint: "; raise with --exact-limit",
        });
    }
    let n = n as usize;
    let mut levels: Vec<Vec<TreeShape>> = vec![Vec::new(), vec![TreeShape::leaf()]];
    for m in 2..=n {
        let mut out = Vec::new();
        for a in 1..=m / 2 {
            let b = m - a;
            if a < b {
                for x in &levels[a] {
                    for y in &levels[b] {
                        out.push(TreeShape::node(x, y));
                    }
                }
            } else {
                let same = &levels[a];
                for i in 0..same.len() {
                    for j in i..same.len() {
                        out.push(TreeShape::node(&same[i], &same[j]));
                    }
                }
            }
        }
        out.sort();
        levels.push(out);
    }
    Ok(levels.swap_remove(n))
}

// ---------------------------------------------------------------------------
// Plane trees
// ---------------------------------------------------------------------------

/// An ordered rooted binary tree. Leaves are ranked `1..=n` left to right.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum PlaneTree {
    Leaf,
    Node {
        count: u32,
        first: Box<PlaneTree>,
        second: Box<PlaneTree>,
    },
}

impl PlaneTree {
    pub fn leaf() -> Self {
        PlaneTree::Leaf
    }

    pub fn node(first: PlaneTree, second: PlaneTree) -> Self {
        PlaneTree::Node {
            count: first.leaf_count() + second.leaf_count(),
            first: Box::new(first),
            second: Box::new(second),
        }
    }

    pub fn leaf_count(&self) -> u32 {
        match self {
            PlaneTree::Leaf => 1,
            PlaneTree::Node { count, .. } => *count,
        }
    }

    /// Number of internal vertices, `n - 1`.
    pub fn internal_count(&self) -> u32 {
        self.leaf_count() - 1
    }

    pub fn children(&self) -> Option<(&PlaneTree, &PlaneTree)> {
        match self {
            PlaneTree::Leaf => None,
            PlaneTree::Node { first, second, .. } => Some((first, second)),
        }
    }

    /// Forget the ordering.
    pub fn shape(&self) -> TreeShape {
        match self.children() {
            None => TreeShape::leaf(),
            Some((a, b)) => TreeShape::node(&a.shape(), &b.shape()),
        }
    }

    /// Embed a canonical shape as a plane tree, smaller branch first.
    pub fn from_shape(shape: &TreeShape) -> Self {
        match shape.branches() {
            None => PlaneTree::Leaf,
            Some((a, b)) => PlaneTree::node(Self::from_shape(a), Self::from_shape(b)),
        }
    }

    /// Apply a flip assignment: `flips[i]` says whether to swap the children
    /// of the `i`-th internal vertex in preorder of `self`. Returns the
    /// flipped tree and the rank map sending each old 0-based leaf index to
    /// its new index.
    pub fn apply_flips(&self, flips: &[bool]) -> (PlaneTree, Vec<u32>) {
        assert_eq!(
            flips.len(),
            self.internal_count() as usize,
            "one flip bit per internal vertex"
        );
        let n = self.leaf_count() as usize;
        let mut rank_map = vec![0u32; n];
        let mut next_new_rank = 0u32;
        let flipped = flip_rec(self, 0, flips, &mut next_new_rank, &mut rank_map);
        (flipped, rank_map)
    }

    /// All leaf permutations induced by automorphisms, i.e. flip assignments
    /// that leave the tree unchanged. Entries are 0-based: `perm[i]` is the
    /// image of leaf `i`.
    pub fn automorphism_perms(&self) -> Vec<Vec<u32>> {
        iso_perms(self, self)
    }

    /// Depths of the lowest common ancestor of every leaf pair, as a flat
    /// `n * n` matrix; the diagonal holds the leaf depths themselves.
    pub fn lca_depths(&self) -> LcaDepths {
        let n = self.leaf_count() as usize;
        let mut depth = vec![0u16; n * n];
        fn rec(t: &PlaneTree, d: u16, lo: usize, n: usize, depth: &mut [u16]) {
            match t.children() {
                None => depth[lo * n + lo] = d,
                Some((a, b)) => {
                    let mid = lo + a.leaf_count() as usize;
                    let hi = lo + t.leaf_count() as usize;
                    for i in lo..mid {
                        for j in mid..hi {
                            depth[i * n + j] = d;
                            depth[j * n + i] = d;
                        }
                    }
                    rec(a, d + 1, lo, n, depth);
                    rec(b, d + 1, mid, n, depth);
                }
            }
        }
        rec(self, 0, 0, n, &mut depth);
        LcaDepths { n, depth }
    }

    /// Text form; child order is preserved.
    pub fn encoding(&self) -> String {
        enum Item<'a> {
            Tree(&'a PlaneTree),
            Char(char),
        }
        let mut out = String::new();
        let mut stack = vec![Item::Tree(self)];
        while let Some(item) = stack.pop() {
            match item {
                Item::Char(c) => out.push(c),
                Item::Tree(t) => match t.children() {
                    None => out.push('L'),
                    Some((a, b)) => {
                        out.push('(');
                        stack.push(Item::Char(')'));
                        stack.push(Item::Tree(b));
                        stack.push(Item::Char(' '));
                        stack.push(Item::Tree(a));
                    }
                },
            }
        }
        out
    }
}

impl fmt::Display for PlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encoding())
    }
}

impl fmt::Debug for PlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encoding())
    }
}

// Flip bits are consumed in preorder of the ORIGINAL tree, while new leaf
// ranks are handed out in the order leaves appear in the OUTPUT tree.
fn flip_rec(
    t: &PlaneTree,
    old_lo: u32,
    flips: &[bool],
    next_new_rank: &mut u32,
    rank_map: &mut [u32],
) -> PlaneTree {
    match t.children() {
        None => {
            rank_map[old_lo as usize] = *next_new_rank;
            *next_new_rank += 1;
            PlaneTree::Leaf
        }
        Some((a, b)) => {
            let flip = flips[0];
            let a_internals = a.internal_count() as usize;
            let (fa, fb) = flips[1..].split_at(a_internals);
            let a_lo = old_lo;
            let b_lo = old_lo + a.leaf_count();
            if flip {
                let new_b = flip_rec(b, b_lo, fb, next_new_rank, rank_map);
                let new_a = flip_rec(a, a_lo, fa, next_new_rank, rank_map);
                PlaneTree::node(new_b, new_a)
            } else {
                let new_a = flip_rec(a, a_lo, fa, next_new_rank, rank_map);
                let new_b = flip_rec(b, b_lo, fb, next_new_rank, rank_map);
                PlaneTree::node(new_a, new_b)
            }
        }
    }
}

// All leaf bijections realised by flip assignments carrying `x` onto `y`;
// empty unless the two have the same shape. `iso_perms(x, x)` is the
// automorphism action.
fn iso_perms(x: &PlaneTree, y: &PlaneTree) -> Vec<Vec<u32>> {
    if x.leaf_count() != y.leaf_count() {
        return Vec::new();
    }
    match (x.children(), y.children()) {
        (None, None) => vec![vec![0]],
        (Some((x1, x2)), Some((y1, y2))) => {
            let mut out = Vec::new();
            let offset = y1.leaf_count();
            for p in iso_perms(x1, y1) {
                for q in iso_perms(x2, y2) {
                    let mut perm = Vec::with_capacity(x.leaf_count() as usize);
                    perm.extend(p.iter().copied());
                    perm.extend(q.iter().map(|v| v + offset));
                    out.push(perm);
                }
            }
            for p in iso_perms(x1, y2) {
                for q in iso_perms(x2, y1) {
                    let mut perm = Vec::with_capacity(x.leaf_count() as usize);
                    perm.extend(p.iter().map(|v| v + offset));
                    perm.extend(q.iter().copied());
                    out.push(perm);
                }
            }
            out
        }
        _ => Vec::new(),
    }
}

/// Flat matrix of pairwise LCA depths of a plane tree's leaves.
pub struct LcaDepths {
    n: usize,
    depth: Vec<u16>,
}

impl LcaDepths {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u16 {
        self.depth[i * self.n + j]
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

// ---------------------------------------------------------------------------
// Leaf subsets and induced shapes
// ---------------------------------------------------------------------------

/// A nonempty set of 1-based leaf ranks of some host tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafSubset {
    ranks: Vec<u32>,
}

impl LeafSubset {
    /// Build from arbitrary ranks, validated against a host with `n` leaves.
    /// Ranks are sorted; duplicates are rejected.
    pub fn new(ranks: impl IntoIterator<Item = u32>, n: u32) -> Result<Self> {
        let mut ranks: Vec<u32> = ranks.into_iter().collect();
        ranks.sort_unstable();
        if ranks.is_empty() {
            return Err(Error::Invalid("leaf subset must be nonempty".into()));
        }
        for pair in ranks.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::Invalid(format!("duplicate leaf rank {}", pair[0])));
            }
        }
        for &r in &ranks {
            if r == 0 || r > n {
                return Err(Error::InvalidRank { rank: r, n });
            }
        }
        Ok(LeafSubset { ranks })
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }
}

/// Plane tree induced by a leaf subset: as [`induce`], but keeping the
/// left-to-right order of the chosen leaves.
pub fn induce_plane(host: &PlaneTree, subset: &LeafSubset) -> Result<PlaneTree> {
    let n = host.leaf_count();
    for &r in subset.ranks() {
        if r == 0 || r > n {
            return Err(Error::InvalidRank { rank: r, n });
        }
    }
    fn rec(t: &PlaneTree, lo: u32, ranks: &[u32]) -> Option<PlaneTree> {
        if ranks.is_empty() {
            return None;
        }
        match t.children() {
            None => Some(PlaneTree::Leaf),
            Some((a, b)) => {
                let mid = lo + a.leaf_count();
                let split = ranks.partition_point(|&r| r < mid);
                let (left, right) = ranks.split_at(split);
                match (rec(a, lo, left), rec(b, mid, right)) {
                    (Some(x), Some(y)) => Some(PlaneTree::node(x, y)),
                    (Some(x), None) => Some(x),
                    (None, Some(y)) => Some(y),
                    (None, None) => None,
                }
            }
        }
    }
    Ok(rec(host, 1, subset.ranks()).expect("subset is nonempty"))
}

/// All plane trees with exactly `n` leaves (Catalan many); exponential, meant
/// for small `n`.
pub fn enumerate_plane_trees(n: u32) -> Vec<PlaneTree> {
    let mut levels: Vec<Vec<PlaneTree>> = vec![Vec::new(), vec![PlaneTree::Leaf]];
    for m in 2..=n as usize {
        let mut out = Vec::new();
        for a in 1..m {
            for x in &levels[a] {
                for y in &levels[m - a] {
                    out.push(PlaneTree::node(x.clone(), y.clone()));
                }
            }
        }
        levels.push(out);
    }
    levels.swap_remove(n as usize)
}

/// Shape induced by a leaf subset: the smallest subtree containing the chosen
/// leaves, with vertices of degree 2 suppressed.
pub fn induce(host: &PlaneTree, subset: &LeafSubset) -> Result<TreeShape> {
    let n = host.leaf_count();
    for &r in subset.ranks() {
        if r == 0 || r > n {
            return Err(Error::InvalidRank { rank: r, n });
        }
    }
    fn rec(t: &PlaneTree, lo: u32, ranks: &[u32]) -> Option<TreeShape> {
        if ranks.is_empty() {
            return None;
        }
        match t.children() {
            None => Some(TreeShape::leaf()),
            Some((a, b)) => {
                let mid = lo + a.leaf_count();
                let split = ranks.partition_point(|&r| r < mid);
                let (left, right) = ranks.split_at(split);
                match (rec(a, lo, left), rec(b, mid, right)) {
                    (Some(x), Some(y)) => Some(TreeShape::node(&x, &y)),
                    (Some(x), None) => Some(x),
                    (None, Some(y)) => Some(y),
                    (None, None) => None,
                }
            }
        }
    }
    Ok(rec(host, 1, subset.ranks()).expect("subset is nonempty"))
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Parse a shape from the tree grammar, canonicalising branch order.
pub fn parse_shape(input: &str) -> Result<TreeShape> {
    parse_tree(input, &TreeShape::leaf, &|a, b| TreeShape::node(&a, &b), &|t| {
        t.clone()
    })
}

/// Parse a plane tree from the tree grammar; child order is significant.
/// Builder aliases embed with the smaller branch first.
pub fn parse_plane(input: &str) -> Result<PlaneTree> {
    parse_tree(
        input,
        &PlaneTree::leaf,
        &PlaneTree::node,
        &PlaneTree::from_shape,
    )
}

fn parse_tree<T>(
    input: &str,
    leaf: &dyn Fn() -> T,
    node: &dyn Fn(T, T) -> T,
    from_shape: &dyn Fn(&TreeShape) -> T,
) -> Result<T> {
    let bytes = input.as_bytes();
    let err = |pos: usize, msg: &str| Error::Parse {
        pos,
        msg: msg.to_string(),
    };
    let mut pos = 0usize;
    while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
        pos += 1;
    }
    let mut end = bytes.len();
    while end > pos && bytes[end - 1].is_ascii_whitespace() {
        end -= 1;
    }
    // each frame holds the children collected so far inside one open '('
    let mut frames: Vec<Vec<T>> = vec![Vec::new()];
    let mut after_separator = false;
    while pos < end {
        let value_ok = after_separator
            || frames.len() == 1
            || frames.last().unwrap().is_empty();
        match bytes[pos] {
            b'(' => {
                if !value_ok {
                    return Err(err(pos, "missing separator before branch"));
                }
                frames.push(Vec::new());
                after_separator = false;
                pos += 1;
            }
            b')' => {
                let frame = frames.pop().ok_or_else(|| err(pos, "unmatched ')'"))?;
                if frames.is_empty() {
                    return Err(err(pos, "unmatched ')'"));
                }
                if frame.len() != 2 {
                    return Err(err(pos, "a node needs exactly two branches"));
                }
                let mut it = frame.into_iter();
                let a = it.next().unwrap();
                let b = it.next().unwrap();
                push_value(&mut frames, node(a, b), pos)?;
                after_separator = false;
                pos += 1;
            }
            b' ' => {
                if frames.len() == 1 || frames.last().unwrap().len() != 1 || after_separator {
                    return Err(err(pos, "unexpected space"));
                }
                after_separator = true;
                pos += 1;
                if pos >= end || matches!(bytes[pos], b' ' | b')') {
                    return Err(err(pos, "expected a tree after the separator"));
                }
            }
            b'L' => {
                if !value_ok {
                    return Err(err(pos, "missing separator before branch"));
                }
                push_value(&mut frames, leaf(), pos)?;
                after_separator = false;
                pos += 1;
            }
            c if c.is_ascii_lowercase() || c.is_ascii_digit() => {
                if !value_ok {
                    return Err(err(pos, "missing separator before branch"));
                }
                let start = pos;
                while pos < end
                    && (bytes[pos].is_ascii_lowercase()
                        || bytes[pos].is_ascii_digit()
                        || bytes[pos] == b':')
                {
                    pos += 1;
                }
                let shape = parse_alias(&input[start..pos], start)?;
                push_value(&mut frames, from_shape(&shape), start)?;
                after_separator = false;
            }
            _ => return Err(err(pos, "expected 'L', '(' or a builder alias")),
        }
    }
    if frames.len() != 1 {
        return Err(err(end, "unclosed '('"));
    }
    let mut top = frames.pop().unwrap();
    match top.len() {
        1 => Ok(top.pop().unwrap()),
        _ => Err(err(end, "empty input")),
    }
}

fn push_value<T>(frames: &mut [Vec<T>], value: T, pos: usize) -> Result<()> {
    let depth = frames.len();
    let top = frames.last_mut().unwrap();
    let limit = if depth == 1 { 1 } else { 2 };
    if top.len() >= limit {
        return Err(Error::Parse {
            pos,
            msg: if limit == 1 {
                "trailing content after a complete tree".into()
            } else {
                "a node has exactly two branches".into()
            },
        });
    }
    top.push(value);
    Ok(())
}

fn parse_alias(word: &str, pos: usize) -> Result<TreeShape> {
    let err = |msg: String| Error::Parse { pos, msg };
    if word == "a52" {
        return Ok(a52());
    }
    if let Some(k) = word.strip_prefix("cat:") {
        let k: u64 = k
            .parse()
            .map_err(|_| err(format!("bad caterpillar size {k:?}")))?;
        if k < 1 {
            return Err(err("cat:<k> needs k >= 1".into()));
        }
        return Ok(caterpillar(k));
    }
    if let Some(h) = word.strip_prefix("cb:") {
        let h: u32 = h
            .parse()
            .map_err(|_| err(format!("bad complete-tree height {h:?}")))?;
        if h > 40 {
            return Err(err("cb:<h> is capped at h = 40".into()));
        }
        return Ok(complete(h));
    }
    if let Some(n) = word.strip_prefix("even:") {
        let n: u64 = n
            .parse()
            .map_err(|_| err(format!("bad even-tree size {n:?}")))?;
        if n < 1 {
            return Err(err("even:<n> needs n >= 1".into()));
        }
        return Ok(even(n));
    }
    Err(err(format!(
        "unknown alias {word:?}; expected cat:<k>, cb:<h>, even:<n> or a52"
    )))
}
