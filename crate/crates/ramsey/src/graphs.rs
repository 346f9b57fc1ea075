//! Colored complete graphs, color normalization, canonical forms under the
//! ordered and unordered symmetry regimes, pattern graphs with their
//! embeddings, and the one-line-per-graph text format used by level files.
//!
//! Edges of a complete graph on `n` vertices are indexed in row-major pair
//! order `(1,2),(1,3),…,(1,n),(2,3),…,(n-1,n)` (0-based internally). Every
//! module in the crate uses this same indexing, so serialized graphs and
//! canonical keys are bit-exact across engines.

use std::fmt;
use thiserror::Error;

pub type Color = u32;

/// Cell value reserved for "no edge" in partial graphs. Complete graphs
/// never contain it; the canonical-form machinery treats it as a fixed
/// marker that is never renamed.
pub const NON_EDGE: Color = Color::MAX;

/// Number of unordered pairs on `n` vertices.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Row-major index of the pair `{i,j}`, `i != j`, 0-based vertices.
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i != j && i < n && j < n);
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// All pairs in row-major order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Relabels color ids by order of first occurrence starting at 0. The
/// `NON_EDGE` marker is left untouched. Idempotent, preserves the partition
/// of positions into classes.
pub fn normalize_colors(raw: &[Color]) -> Vec<Color> {
    let mut map: Vec<(Color, Color)> = Vec::new();
    let mut next: Color = 0;
    raw.iter()
        .map(|&c| {
            if c == NON_EDGE {
                return NON_EDGE;
            }
            match map.iter().find(|&&(old, _)| old == c) {
                Some(&(_, new)) => new,
                None => {
                    let new = next;
                    map.push((c, new));
                    next += 1;
                    new
                }
            }
        })
        .collect()
}

/// Isomorphism regime for colored complete graphs.
///
/// `Ordered`: vertices are fixed, only color classes may be renamed.
/// `Unordered`: any vertex permutation composed with a class renaming.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Symmetry {
    Ordered,
    Unordered,
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum GraphError {
    #[error("color sequence has {got} entries, expected {expected} for n = {n}")]
    WrongLength { n: usize, expected: usize, got: usize },
    #[error("color id {id} at position {pos} appears before some smaller id")]
    NotNormalized { pos: usize, id: Color },
    #[error("declared class count {declared} but sequence uses {actual}")]
    ClassCountMismatch { declared: usize, actual: usize },
    #[error("line has wrong token count: {0}")]
    TokenCount(usize),
    #[error("unparsable token `{0}`")]
    BadToken(String),
    #[error("pattern edge ({0},{1}) out of range or degenerate")]
    BadEdge(usize, usize),
    #[error("duplicate pattern edge ({0},{1})")]
    DuplicateEdge(usize, usize),
}

/// A complete graph on `n` ordered slots with a colorblind edge partition.
///
/// The color sequence is always held in normalized (first-occurrence) form,
/// so color-renaming equivalence is structural and never needs a search.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ColoredCompleteGraph {
    n: usize,
    colors: Vec<Color>,
}

impl ColoredCompleteGraph {
    /// Builds from an already-normalized sequence, verifying the invariants.
    pub fn new(n: usize, colors: Vec<Color>) -> Result<Self, GraphError> {
        if colors.len() != pair_count(n) {
            return Err(GraphError::WrongLength {
                n,
                expected: pair_count(n),
                got: colors.len(),
            });
        }
        let mut seen: Color = 0;
        for (pos, &c) in colors.iter().enumerate() {
            if c > seen {
                return Err(GraphError::NotNormalized { pos, id: c });
            }
            if c == seen {
                seen += 1;
            }
        }
        Ok(Self { n, colors })
    }

    /// Builds from an arbitrary sequence, normalizing ids.
    pub fn from_raw(n: usize, raw: &[Color]) -> Result<Self, GraphError> {
        if raw.len() != pair_count(n) {
            return Err(GraphError::WrongLength {
                n,
                expected: pair_count(n),
                got: raw.len(),
            });
        }
        Ok(Self {
            n,
            colors: normalize_colors(raw),
        })
    }

    pub fn single_vertex() -> Self {
        Self { n: 1, colors: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    #[inline]
    pub fn color(&self, i: usize, j: usize) -> Color {
        self.colors[pair_index(self.n, i, j)]
    }

    /// Number of distinct color classes.
    pub fn class_count(&self) -> usize {
        self.colors.iter().map(|&c| c as usize + 1).max().unwrap_or(0)
    }

    /// Appends one vertex whose edges to `0..n` take the given colors
    /// (indexed by the old vertex), then renormalizes.
    pub fn extended(&self, new_edge_colors: &[Color]) -> Self {
        assert_eq!(new_edge_colors.len(), self.n);
        let n = self.n + 1;
        let mut raw = vec![0; pair_count(n)];
        for (i, j) in pairs(self.n) {
            raw[pair_index(n, i, j)] = self.color(i, j);
        }
        for (i, &c) in new_edge_colors.iter().enumerate() {
            raw[pair_index(n, i, self.n)] = c;
        }
        Self {
            n,
            colors: normalize_colors(&raw),
        }
    }

    /// Removes the last vertex.
    pub fn drop_last_vertex(&self) -> Self {
        assert!(self.n >= 1);
        let n = self.n - 1;
        let mut raw = Vec::with_capacity(pair_count(n));
        for (i, j) in pairs(n) {
            raw.push(self.color(i, j));
        }
        Self {
            n,
            colors: normalize_colors(&raw),
        }
    }

    /// Relabels vertices: new vertex `x` takes the role of old vertex
    /// `perm[x]`, then renormalizes colors.
    pub fn apply_permutation(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut raw = Vec::with_capacity(self.colors.len());
        for (x, y) in pairs(self.n) {
            raw.push(self.color(perm[x], perm[y]));
        }
        Self {
            n: self.n,
            colors: normalize_colors(&raw),
        }
    }
}

/// 64-bit FNV-1a over a color sequence; deterministic across runs and
/// platforms, used for canonical keys and tabu lists.
pub fn color_hash(colors: &[Color]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &c in colors {
        for b in c.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

/// Canonical key of a colored complete graph under a symmetry regime. Two
/// graphs get equal keys exactly when they are isomorphic in that regime.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CanonicalKey {
    colors: Vec<Color>,
    hash: u64,
}

impl CanonicalKey {
    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn hash(&self) -> u64 {
        self.hash
    }
}

pub fn canonical_form(g: &ColoredCompleteGraph, sym: Symmetry) -> CanonicalKey {
    let colors = match sym {
        Symmetry::Ordered => g.colors.clone(),
        Symmetry::Unordered => {
            let cells = min_image_cells(g.n, &g.colors, 0, true);
            normalize_colors(&cells)
        }
    };
    let hash = color_hash(&colors);
    CanonicalKey { colors, hash }
}

/// Minimum-image canonical cells for a (possibly partial) cell sequence.
///
/// The minimum is taken over vertex permutations fixing the first `pinned`
/// vertices pointwise, comparing cell sequences in staircase order (for
/// each new vertex `k`, the cells to vertices `0..k`), with class ids
/// relabeled by first occurrence along that traversal when `rename` is set.
/// Staircase order lets a breadth-first scan over vertex prefixes prune
/// non-minimal branches as soon as they diverge. The winning labeling is
/// returned re-encoded in row-major order (not renormalized).
pub(crate) fn min_image_cells(n: usize, cells: &[Color], pinned: usize, rename: bool) -> Vec<Color> {
    #[derive(Clone)]
    struct State {
        assigned: Vec<usize>,
        // old color id -> renamed id, lazily extended
        renaming: Vec<(Color, Color)>,
        next_id: Color,
    }

    impl State {
        fn rename(&mut self, c: Color, rename: bool) -> Color {
            if !rename || c == NON_EDGE {
                return c;
            }
            match self.renaming.iter().find(|&&(old, _)| old == c) {
                Some(&(_, new)) => new,
                None => {
                    let new = self.next_id;
                    self.renaming.push((c, new));
                    self.next_id += 1;
                    new
                }
            }
        }
    }

    let at = |i: usize, j: usize| cells[pair_index(n, i, j)];

    let mut states: Vec<State> = if pinned == 0 {
        (0..n)
            .map(|v| State {
                assigned: vec![v],
                renaming: Vec::new(),
                next_id: 0,
            })
            .collect()
    } else {
        // Pinned prefix: a single seed, with renaming threaded through the
        // staircase cells of the prefix itself.
        let mut st = State {
            assigned: (0..pinned).collect(),
            renaming: Vec::new(),
            next_id: 0,
        };
        for k in 1..pinned {
            for t in 0..k {
                let _ = st.rename(at(t, k), rename);
            }
        }
        vec![st]
    };
    if states.is_empty() {
        // n == 0 pinned == 0 never happens for real graphs; keep total.
        return cells.to_vec();
    }

    let start = states[0].assigned.len().max(1);
    for k in start..n {
        let mut best_seg: Option<Vec<Color>> = None;
        let mut survivors: Vec<State> = Vec::new();
        for st in &states {
            for w in 0..n {
                if st.assigned.contains(&w) {
                    continue;
                }
                let mut trial = st.clone();
                let mut seg = Vec::with_capacity(k);
                for t in 0..k {
                    let c = at(trial.assigned[t], w);
                    seg.push(trial.rename(c, rename));
                }
                let keep = match &best_seg {
                    None => true,
                    Some(best) => seg <= *best,
                };
                if keep {
                    if best_seg.as_ref() != Some(&seg) {
                        survivors.clear();
                        best_seg = Some(seg);
                    }
                    trial.assigned.push(w);
                    survivors.push(trial);
                }
            }
        }
        // Survivors sharing an identical view of the unassigned part lead
        // to identical continuations; keeping one of each keeps symmetric
        // graphs (near-monochromatic ones) from exploding the frontier.
        let mut seen: Vec<Vec<Color>> = Vec::new();
        let mut deduped: Vec<State> = Vec::new();
        for st in survivors {
            let mut sig: Vec<Color> = Vec::new();
            let mut probe = st.clone();
            let unassigned: Vec<usize> = (0..n).filter(|v| !st.assigned.contains(v)).collect();
            for &w in &unassigned {
                for t in 0..st.assigned.len() {
                    sig.push(probe.rename(at(st.assigned[t], w), rename));
                }
            }
            for (a, &w1) in unassigned.iter().enumerate() {
                for &w2 in &unassigned[a + 1..] {
                    sig.push(probe.rename(at(w1, w2), rename));
                }
            }
            if !seen.contains(&sig) {
                seen.push(sig);
                deduped.push(st);
            }
        }
        states = deduped;
    }

    let winner = &states[0];
    let mut out = vec![0; cells.len()];
    for (x, y) in pairs(n) {
        out[pair_index(n, x, y)] = at(winner.assigned[x], winner.assigned[y]);
    }
    out
}

/// A target graph: vertex count, edge list, and whether the vertex labels
/// carry a linear order that embeddings must respect.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GraphPattern {
    m: usize,
    edges: Vec<(usize, usize)>,
    ordered: bool,
}

impl GraphPattern {
    pub fn new(m: usize, edges: &[(usize, usize)], ordered: bool) -> Result<Self, GraphError> {
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b || a >= m || b >= m {
                return Err(GraphError::BadEdge(a, b));
            }
            let e = (a.min(b), a.max(b));
            if norm.contains(&e) {
                return Err(GraphError::DuplicateEdge(e.0, e.1));
            }
            norm.push(e);
        }
        norm.sort_unstable();
        Ok(Self { m, edges: norm, ordered })
    }

    pub fn complete(m: usize, ordered: bool) -> Self {
        let edges: Vec<_> = pairs(m).collect();
        Self { m, edges, ordered }
    }

    pub fn cycle(m: usize, ordered: bool) -> Self {
        assert!(m >= 3);
        let mut edges: Vec<(usize, usize)> = (0..m - 1).map(|i| (i, i + 1)).collect();
        edges.push((0, m - 1));
        Self::new(m, &edges, ordered).unwrap()
    }

    /// Monotone path 0-1-…-(m-1).
    pub fn path(m: usize, ordered: bool) -> Self {
        let edges: Vec<_> = (0..m - 1).map(|i| (i, i + 1)).collect();
        Self::new(m, &edges, ordered).unwrap()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn ordered(&self) -> bool {
        self.ordered
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let e = (a.min(b), a.max(b));
        self.edges.contains(&e)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// All automorphisms, by brute force over the `m!` vertex maps.
    /// Patterns in scope have at most 6 vertices.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let mut result = Vec::new();
        let mut perm: Vec<usize> = (0..self.m).collect();
        loop {
            if self
                .edges
                .iter()
                .all(|&(a, b)| self.has_edge(perm[a], perm[b]))
            {
                result.push(perm.clone());
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        result
    }

    /// Unordered-isomorphism test against another pattern (brute force).
    pub fn iso_unordered(&self, other: &GraphPattern) -> bool {
        if self.m != other.m || self.edges.len() != other.edges.len() {
            return false;
        }
        let mut perm: Vec<usize> = (0..self.m).collect();
        loop {
            if self
                .edges
                .iter()
                .all(|&(a, b)| other.has_edge(perm[a], perm[b]))
            {
                return true;
            }
            if !next_permutation(&mut perm) {
                return false;
            }
        }
    }
}

pub(crate) fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// An embedding is a map from pattern vertices to host vertices,
/// `emb[p] = host vertex`.
pub type Embedding = Vec<usize>;

/// Every copy of `pattern` in the complete host on `n` vertices, each copy
/// exactly once.
///
/// Ordered patterns yield all strictly increasing injections; unordered
/// patterns yield one representative injection per orbit of the pattern's
/// automorphism group (equivalently, one per distinct host edge set).
pub fn embeddings(pattern: &GraphPattern, n: usize) -> Vec<Embedding> {
    let mut out = Vec::new();
    if pattern.m > n {
        return out;
    }
    for subset in combinations(n, pattern.m) {
        push_subset_embeddings(pattern, &subset, &mut out);
    }
    out
}

/// Copies whose image contains the host vertex `v`.
pub fn embeddings_through(pattern: &GraphPattern, n: usize, v: usize) -> Vec<Embedding> {
    let mut out = Vec::new();
    if pattern.m > n {
        return out;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| u != v).collect();
    for mut subset in combinations(rest.len(), pattern.m - 1)
        .into_iter()
        .map(|ix| ix.into_iter().map(|i| rest[i]).collect::<Vec<_>>())
    {
        subset.push(v);
        subset.sort_unstable();
        push_subset_embeddings(pattern, &subset, &mut out);
    }
    out
}

fn push_subset_embeddings(pattern: &GraphPattern, subset: &[usize], out: &mut Vec<Embedding>) {
    if pattern.ordered {
        out.push(subset.to_vec());
        return;
    }
    // One embedding per distinct edge-image set. Patterns have no isolated
    // vertices, so equal edge sets mean automorphism-equivalent maps.
    let mut seen_edge_sets: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut perm: Vec<usize> = (0..pattern.m).collect();
    loop {
        let emb: Vec<usize> = perm.iter().map(|&p| subset[p]).collect();
        let mut eset: Vec<(usize, usize)> = pattern
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (emb[a], emb[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        eset.sort_unstable();
        if !seen_edge_sets.contains(&eset) {
            seen_edge_sets.push(eset);
            out.push(emb);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Parses the line format `n k c_1 … c_{n(n-1)/2}` where `k` is the number
/// of distinct ids and the ids are in normalized form.
pub fn parse_graph(line: &str) -> Result<ColoredCompleteGraph, GraphError> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() < 2 {
        return Err(GraphError::TokenCount(tokens.len()));
    }
    let n: usize = tokens[0]
        .parse()
        .map_err(|_| GraphError::BadToken(tokens[0].to_string()))?;
    let k: usize = tokens[1]
        .parse()
        .map_err(|_| GraphError::BadToken(tokens[1].to_string()))?;
    if tokens.len() != 2 + pair_count(n) {
        return Err(GraphError::TokenCount(tokens.len()));
    }
    let mut colors = Vec::with_capacity(pair_count(n));
    for t in &tokens[2..] {
        colors.push(t.parse().map_err(|_| GraphError::BadToken(t.to_string()))?);
    }
    let g = ColoredCompleteGraph::new(n, colors)?;
    if g.class_count() != k {
        return Err(GraphError::ClassCountMismatch {
            declared: k,
            actual: g.class_count(),
        });
    }
    Ok(g)
}

pub fn serialize_graph(g: &ColoredCompleteGraph) -> String {
    let mut s = format!("{} {}", g.n(), g.class_count());
    for &c in g.colors() {
        s.push(' ');
        s.push_str(&c.to_string());
    }
    s
}

impl fmt::Display for ColoredCompleteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_graph(self))
    }
}

/// Writes a level file: `#` header lines with problem id, level and count,
/// then one graph per line.
pub fn write_level_file(
    path: &std::path::Path,
    problem_id: &str,
    level: usize,
    graphs: &[ColoredCompleteGraph],
) -> std::io::Result<()> {
    use std::io::Write;
    let mut out = String::new();
    out.push_str(&format!("# problem: {problem_id}\n"));
    out.push_str(&format!("# level: {level}\n"));
    out.push_str(&format!("# count: {}\n", graphs.len()));
    for g in graphs {
        out.push_str(&serialize_graph(g));
        out.push('\n');
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(out.as_bytes())
}

/// Reads a level file back; returns `(problem id, level, graphs)` and
/// requires the stored count to match, so truncated files are rejected.
pub fn read_level_file(
    path: &std::path::Path,
) -> Result<(String, usize, Vec<ColoredCompleteGraph>), String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let mut problem_id = String::new();
    let mut level = None;
    let mut count = None;
    let mut graphs = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("problem:") {
                problem_id = v.trim().to_string();
            } else if let Some(v) = rest.strip_prefix("level:") {
                level = v.trim().parse::<usize>().ok();
            } else if let Some(v) = rest.strip_prefix("count:") {
                count = v.trim().parse::<usize>().ok();
            }
            continue;
        }
        graphs.push(parse_graph(line).map_err(|e| e.to_string())?);
    }
    let level = level.ok_or("missing level header")?;
    let count = count.ok_or("missing count header")?;
    if count != graphs.len() {
        return Err(format!(
            "level file stores count {count} but has {} graphs",
            graphs.len()
        ));
    }
    Ok((problem_id, level, graphs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_colors(&[7, 7, 2]), vec![0, 0, 1]);
        assert_eq!(normalize_colors(&[0, 1, 0]), vec![0, 1, 0]);
        assert_eq!(normalize_colors(&[3, 1, 4, 1]), vec![0, 1, 2, 1]);
        // idempotence
        let x = normalize_colors(&[5, 9, 5, 0]);
        assert_eq!(normalize_colors(&x), x);
    }

    #[test]
    fn pair_indexing_roundtrip() {
        for n in 1..8 {
            for (k, (i, j)) in pairs(n).enumerate() {
                assert_eq!(pair_index(n, i, j), k);
                assert_eq!(pair_index(n, j, i), k);
            }
            assert_eq!(pairs(n).count(), pair_count(n));
        }
    }

    #[test]
    fn canonical_ordered_is_identity_on_normalized() {
        let g = ColoredCompleteGraph::new(3, vec![0, 1, 0]).unwrap();
        assert_eq!(canonical_form(&g, Symmetry::Ordered).colors(), &[0, 1, 0]);
    }

    #[test]
    fn canonical_unordered_examples() {
        let g = ColoredCompleteGraph::new(3, vec![0, 1, 0]).unwrap();
        assert_eq!(canonical_form(&g, Symmetry::Unordered).colors(), &[0, 0, 1]);
        let mono = ColoredCompleteGraph::new(3, vec![0, 0, 0]).unwrap();
        assert_eq!(
            canonical_form(&mono, Symmetry::Unordered).colors(),
            &[0, 0, 0]
        );
    }

    /// Brute-force unordered isomorphism: some permutation maps one
    /// normalized sequence onto the other.
    fn iso_brute(a: &ColoredCompleteGraph, b: &ColoredCompleteGraph) -> bool {
        if a.n() != b.n() {
            return false;
        }
        let mut perm: Vec<usize> = (0..a.n()).collect();
        loop {
            if a.apply_permutation(&perm) == *b {
                return true;
            }
            if !next_permutation(&mut perm) {
                return false;
            }
        }
    }

    fn random_graph(n: usize, max_classes: u32, seed: u64) -> ColoredCompleteGraph {
        // Tiny LCG to avoid pulling rand into unit tests.
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        let mut raw = Vec::with_capacity(pair_count(n));
        for _ in 0..pair_count(n) {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            raw.push(((s >> 33) as u32) % max_classes);
        }
        ColoredCompleteGraph::from_raw(n, &raw).unwrap()
    }

    #[test]
    fn canonical_constant_on_iso_classes() {
        let mut s: u64 = 12345;
        for trial in 0..1000 {
            let n = 2 + (trial % 6); // up to 7 vertices
            let g = random_graph(n, 1 + (trial as u32 % 5), trial as u64 + 1);
            // random permutation by sorting lcg draws
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = ((s >> 33) as usize) % (i + 1);
                perm.swap(i, j);
            }
            let h = g.apply_permutation(&perm);
            assert_eq!(
                canonical_form(&g, Symmetry::Unordered),
                canonical_form(&h, Symmetry::Unordered),
                "n={n} g={g} perm={perm:?}"
            );
            // Ordered keys are invariant under color renaming only; the
            // stored normalized form already quotients renaming out.
            assert_eq!(canonical_form(&g, Symmetry::Ordered).colors(), g.colors());
        }
    }

    #[test]
    fn canonical_separates_k4_classes() {
        // All normalized colorings of K4 with at most 3 classes.
        let mut graphs = Vec::new();
        let m = pair_count(4);
        let mut cur = vec![0u32; m];
        loop {
            let g = ColoredCompleteGraph::from_raw(4, &cur).unwrap();
            if g.colors() == cur.as_slice() && g.class_count() <= 3 {
                graphs.push(g);
            }
            // odometer over raw sequences with digits < 4 (superset; filtered above)
            let mut i = 0;
            loop {
                if i == m {
                    break;
                }
                cur[i] += 1;
                if cur[i] < 4 {
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
            if i == m {
                break;
            }
        }
        for a in &graphs {
            for b in &graphs {
                let same_key = canonical_form(a, Symmetry::Unordered)
                    == canonical_form(b, Symmetry::Unordered);
                assert_eq!(same_key, iso_brute(a, b), "a={a} b={b}");
            }
        }
    }

    #[test]
    fn parse_serialize_roundtrip() {
        for line in ["3 2 0 0 1", "2 1 0", "1 0", "4 3 0 1 2 1 0 2"] {
            let g = parse_graph(line).unwrap();
            assert_eq!(serialize_graph(&g), line);
            assert_eq!(parse_graph(&serialize_graph(&g)).unwrap(), g);
        }
    }

    #[test]
    fn parse_rejects_malformed() {
        assert!(matches!(
            parse_graph("3 2 0 2 1"),
            Err(GraphError::NotNormalized { pos: 1, id: 2 })
        ));
        assert!(matches!(
            parse_graph("3 1 0 0 1"),
            Err(GraphError::ClassCountMismatch { .. })
        ));
        assert!(matches!(parse_graph("3 2 0 0"), Err(GraphError::TokenCount(_))));
        assert!(parse_graph("x 1 0").is_err());
    }

    #[test]
    fn embedding_counts() {
        let p3 = GraphPattern::new(3, &[(0, 1), (1, 2)], true).unwrap();
        assert_eq!(embeddings(&p3, 4).len(), 4);
        let c3 = GraphPattern::cycle(3, false);
        assert_eq!(embeddings(&c3, 4).len(), 4);
        let c4 = GraphPattern::cycle(4, false);
        // 4!/|Aut(C4)| = 24/8
        assert_eq!(embeddings(&c4, 4).len(), 3);
        let too_big = GraphPattern::complete(5, false);
        assert!(embeddings(&too_big, 4).is_empty());
    }

    #[test]
    fn embeddings_unordered_match_aut_count() {
        for (pat, n) in [
            (GraphPattern::cycle(4, false), 6),
            (GraphPattern::cycle(3, false), 5),
            (GraphPattern::new(4, &[(0, 1), (2, 3)], false).unwrap(), 5),
            (GraphPattern::complete(4, false), 6),
        ] {
            let falling: usize = (n - pat.m() + 1..=n).product();
            let expected = falling / pat.automorphisms().len();
            assert_eq!(embeddings(&pat, n).len(), expected, "{:?}", pat);
        }
    }

    #[test]
    fn embeddings_through_partition() {
        let c4 = GraphPattern::cycle(4, false);
        let n = 6;
        let all = embeddings(&c4, n).len();
        let through_last = embeddings_through(&c4, n, n - 1).len();
        let without_last = embeddings(&c4, n - 1).len();
        assert_eq!(all, through_last + without_last);
    }

    #[test]
    fn level_file_roundtrip() {
        let dir = std::env::temp_dir().join("ramsey-levelfile-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("n3.txt");
        let graphs = vec![
            parse_graph("3 2 0 0 1").unwrap(),
            parse_graph("3 2 0 1 0").unwrap(),
        ];
        write_level_file(&path, "er-c3", 3, &graphs).unwrap();
        let (id, level, back) = read_level_file(&path).unwrap();
        assert_eq!(id, "er-c3");
        assert_eq!(level, 3);
        assert_eq!(back, graphs);
    }
}
