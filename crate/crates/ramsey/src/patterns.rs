//! Detectors for every forbidden structure: monochromatic, rainbow and
//! canonically colored copies, orderable copies via a generic greedy
//! elimination plus specialized per-graph criteria, and the scoring
//! function used by the search engines.
//!
//! Detectors are generic over a [`Host`] so they run unchanged on complete
//! colorings and on the partial graphs of the flag pipeline, where a pair
//! may be a non-edge. A pattern copy only counts when every pattern edge
//! lands on an actual edge of the host.

use crate::graphs::{
    combinations, pairs, Color, ColoredCompleteGraph, Embedding, GraphPattern, Symmetry,
    canonical_form, embeddings, normalize_colors,
};
use crate::problem::{ProblemSpec, Variant};
use thiserror::Error;

/// Read access to the (possibly partial) edge coloring of a complete host.
pub trait Host {
    fn n(&self) -> usize;
    /// `Some(class)` for an edge, `None` for a non-edge.
    fn cell(&self, i: usize, j: usize) -> Option<Color>;
}

impl Host for ColoredCompleteGraph {
    fn n(&self) -> usize {
        self.n()
    }

    #[inline]
    fn cell(&self, i: usize, j: usize) -> Option<Color> {
        Some(self.color(i, j))
    }
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum PatternError {
    #[error("no specialized orderability criterion for this pattern")]
    UnsupportedSpecialized,
}

/// A forbidden-structure description, mainly for reporting and drivers.
#[derive(Clone, Debug)]
pub enum PatternKind {
    Monochromatic(GraphPattern),
    Rainbow(GraphPattern),
    Canonical(GraphPattern),
    Orderable(GraphPattern),
}

/// A vertex order certifying that a copy is orderable: every vertex sees
/// all later neighbors of the copy in a single color.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderabilityWitness(pub Vec<usize>);

#[inline]
fn copy_colors<H: Host>(host: &H, pattern: &GraphPattern, emb: &Embedding) -> Option<Vec<Color>> {
    let mut out = Vec::with_capacity(pattern.edge_count());
    for &(a, b) in pattern.edges() {
        out.push(host.cell(emb[a], emb[b])?);
    }
    Some(out)
}

pub fn copy_is_monochromatic<H: Host>(host: &H, pattern: &GraphPattern, emb: &Embedding) -> bool {
    match copy_colors(host, pattern, emb) {
        Some(cs) => cs.windows(2).all(|w| w[0] == w[1]),
        None => false,
    }
}

pub fn copy_is_rainbow<H: Host>(host: &H, pattern: &GraphPattern, emb: &Embedding) -> bool {
    match copy_colors(host, pattern, emb) {
        Some(cs) => {
            for i in 0..cs.len() {
                for j in i + 1..cs.len() {
                    if cs[i] == cs[j] {
                        return false;
                    }
                }
            }
            true
        }
        None => false,
    }
}

/// Canonical test on the edge colors of one copy of an ordered pattern:
/// monochromatic, rainbow, lower-lexicographic (color determined by, and
/// distinct across, the smaller endpoint) or upper-lexicographic.
pub fn is_canonically_colored(pattern: &GraphPattern, edge_colors: &[Color]) -> bool {
    assert_eq!(edge_colors.len(), pattern.edge_count());
    let es = pattern.edges();
    let m = es.len();
    let mut mono = true;
    let mut rainbow = true;
    let mut lower = true;
    let mut upper = true;
    for i in 0..m {
        for j in i + 1..m {
            let same = edge_colors[i] == edge_colors[j];
            if !same {
                mono = false;
            }
            if same {
                rainbow = false;
            }
            if (es[i].0 == es[j].0) != same {
                lower = false;
            }
            if (es[i].1 == es[j].1) != same {
                upper = false;
            }
        }
    }
    mono || rainbow || lower || upper
}

pub fn copy_is_canonical<H: Host>(host: &H, pattern: &GraphPattern, emb: &Embedding) -> bool {
    match copy_colors(host, pattern, emb) {
        Some(cs) => is_canonically_colored(pattern, &cs),
        None => false,
    }
}

/// Greedy orderability check on one colored copy.
///
/// Repeatedly removes any vertex whose incident edges within the remaining
/// copy all share one color (vertices of remaining degree at most 1
/// qualify vacuously), appending it to the order. The coloring is orderable
/// exactly when all vertices can be removed; the removal order is the
/// witness. The accept/reject answer does not depend on removal choices,
/// which the tests validate against brute force over all orderings.
pub fn is_orderable(pattern: &GraphPattern, edge_colors: &[Color]) -> Option<OrderabilityWitness> {
    assert_eq!(edge_colors.len(), pattern.edge_count());
    let m = pattern.m();
    let mut alive = vec![true; m];
    let mut order = Vec::with_capacity(m);
    loop {
        if order.len() == m {
            return Some(OrderabilityWitness(order));
        }
        let mut removed = false;
        for v in 0..m {
            if !alive[v] {
                continue;
            }
            let mut color: Option<Color> = None;
            let mut ok = true;
            for (t, &(a, b)) in pattern.edges().iter().enumerate() {
                let other = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if !alive[other] {
                    continue;
                }
                match color {
                    None => color = Some(edge_colors[t]),
                    Some(c) if c == edge_colors[t] => {}
                    Some(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                alive[v] = false;
                order.push(v);
                removed = true;
                break;
            }
        }
        if !removed {
            return None;
        }
    }
}

pub fn copy_is_orderable<H: Host>(
    host: &H,
    pattern: &GraphPattern,
    emb: &Embedding,
) -> Option<OrderabilityWitness> {
    let cs = copy_colors(host, pattern, emb)?;
    is_orderable(pattern, &cs)
}

pub fn find_monochromatic_copy<H: Host>(host: &H, g: &GraphPattern) -> Option<Embedding> {
    embeddings(g, host.n())
        .into_iter()
        .find(|e| copy_is_monochromatic(host, g, e))
}

pub fn find_rainbow_copy<H: Host>(host: &H, h: &GraphPattern) -> Option<Embedding> {
    embeddings(h, host.n())
        .into_iter()
        .find(|e| copy_is_rainbow(host, h, e))
}

pub fn find_canonical_copy<H: Host>(host: &H, g: &GraphPattern) -> Option<Embedding> {
    debug_assert!(g.ordered());
    embeddings(g, host.n())
        .into_iter()
        .find(|e| copy_is_canonical(host, g, e))
}

/// The graphs with a closed-form orderability criterion: cycles (any
/// length; a triangle is the length-3 case), K4, and the bipartite family
/// K(2,3), the 3-rung ladder, K(3,3) minus an edge, K(2,4) and K(3,3).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OrderabilityKind {
    Cycle(usize),
    K4,
    K23,
    L3,
    K33Minus,
    K24,
    K33,
}

impl OrderabilityKind {
    pub fn pattern(&self) -> GraphPattern {
        match self {
            OrderabilityKind::Cycle(len) => GraphPattern::cycle(*len, false),
            OrderabilityKind::K4 => GraphPattern::complete(4, false),
            OrderabilityKind::K23 => bipartite(2, 3),
            OrderabilityKind::L3 => ladder3(),
            OrderabilityKind::K33Minus => k33_minus(),
            OrderabilityKind::K24 => bipartite(2, 4),
            OrderabilityKind::K33 => bipartite(3, 3),
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            OrderabilityKind::Cycle(len) => *len,
            OrderabilityKind::K4 => 4,
            OrderabilityKind::K23 => 5,
            OrderabilityKind::K24 | OrderabilityKind::K33 | OrderabilityKind::K33Minus
            | OrderabilityKind::L3 => 6,
        }
    }
}

pub fn bipartite(s: usize, t: usize) -> GraphPattern {
    let mut edges = Vec::new();
    for i in 0..s {
        for j in 0..t {
            edges.push((i, s + j));
        }
    }
    GraphPattern::new(s + t, &edges, false).unwrap()
}

/// Two 4-cycles glued along an edge: rails (0,1),(1,2),(3,4),(4,5) and
/// rungs (0,3),(1,4),(2,5).
pub fn ladder3() -> GraphPattern {
    GraphPattern::new(6, &[(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)], false).unwrap()
}

pub fn k33_minus() -> GraphPattern {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for i in 0..3 {
        for j in 3..6 {
            if !(i == 2 && j == 5) {
                edges.push((i, j));
            }
        }
    }
    GraphPattern::new(6, &edges, false).unwrap()
}

/// Matches an unordered pattern against the supported kinds.
pub fn orderable_kind(g: &GraphPattern) -> Option<OrderabilityKind> {
    let candidates = [
        OrderabilityKind::Cycle(3),
        OrderabilityKind::Cycle(4),
        OrderabilityKind::Cycle(5),
        OrderabilityKind::Cycle(6),
        OrderabilityKind::K4,
        OrderabilityKind::K23,
        OrderabilityKind::L3,
        OrderabilityKind::K33Minus,
        OrderabilityKind::K24,
        OrderabilityKind::K33,
    ];
    candidates
        .into_iter()
        .find(|k| g.m() == k.vertex_count() && g.iso_unordered(&k.pattern()))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DetectionMode {
    Generic,
    Specialized,
}

#[inline]
fn same_cell<H: Host>(host: &H, a: (usize, usize), b: (usize, usize)) -> bool {
    match (host.cell(a.0, a.1), host.cell(b.0, b.1)) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    }
}

/// A vertex with two equally colored incident edges to `a` and `b`.
#[inline]
fn cherry<H: Host>(host: &H, center: usize, a: usize, b: usize) -> bool {
    same_cell(host, (center, a), (center, b))
}

/// A vertex with `k` incident edges of one color into `others`-many
/// distinct partners, all avoiding `avoid`.
fn mono_star<H: Host>(host: &H, center: usize, k: usize, avoid: &[usize]) -> bool {
    let n = host.n();
    let mut counts: Vec<(Color, usize)> = Vec::new();
    for w in 0..n {
        if w == center || avoid.contains(&w) {
            continue;
        }
        if let Some(c) = host.cell(center, w) {
            match counts.iter_mut().find(|(col, _)| *col == c) {
                Some((_, cnt)) => *cnt += 1,
                None => counts.push((c, 1)),
            }
        }
    }
    counts.iter().any(|&(_, cnt)| cnt >= k)
}

/// Presence test for the closed-form criteria: does the host contain a
/// configuration forcing an orderable copy of the kind's graph? Exact for
/// hosts with at least as many vertices as the pattern.
pub fn orderable_config_present<H: Host>(host: &H, kind: OrderabilityKind) -> bool {
    let n = host.n();
    if n < kind.vertex_count() {
        return false;
    }
    match kind {
        // One vertex with two incident edges of the same color.
        OrderabilityKind::Cycle(_) => {
            for i in 0..n {
                if mono_star(host, i, 2, &[]) {
                    return true;
                }
            }
            false
        }
        // One vertex with three equal incident edges inside a 4-set plus a
        // second vertex whose two remaining edges agree.
        OrderabilityKind::K4 => {
            for sub in combinations(n, 4) {
                for &i in &sub {
                    for &j in &sub {
                        if j == i {
                            continue;
                        }
                        let rest: Vec<usize> =
                            sub.iter().copied().filter(|&v| v != i && v != j).collect();
                        let (k, l) = (rest[0], rest[1]);
                        if same_cell(host, (i, j), (i, k))
                            && same_cell(host, (i, j), (i, l))
                            && same_cell(host, (j, k), (j, l))
                        {
                            return true;
                        }
                    }
                }
            }
            false
        }
        OrderabilityKind::K23 => {
            // Monochromatic 3-star.
            if (0..n).any(|i| mono_star(host, i, 3, &[])) {
                return true;
            }
            // Two vertices that each see a common pair in one color.
            for a1 in 0..n {
                for b1 in a1 + 1..n {
                    let watchers = (0..n)
                        .filter(|&v| v != a1 && v != b1 && cherry(host, v, a1, b1))
                        .count();
                    if watchers >= 2 {
                        return true;
                    }
                }
            }
            // A cherry over a pair, one of whose ends has its own cherry
            // avoiding the first configuration's vertices.
            for a2 in 0..n {
                for a1 in 0..n {
                    for b1 in 0..n {
                        if a1 == a2 || b1 == a2 || a1 >= b1 {
                            continue;
                        }
                        if !cherry(host, a2, a1, b1) {
                            continue;
                        }
                        for e in [a1, b1] {
                            let other = if e == a1 { b1 } else { a1 };
                            for b2 in 0..n {
                                for c2 in b2 + 1..n {
                                    if [a2, e, other].contains(&b2) || [a2, e, other].contains(&c2)
                                    {
                                        continue;
                                    }
                                    if cherry(host, e, b2, c2) {
                                        return true;
                                    }
                                }
                            }
                        }
                    }
                }
            }
            false
        }
        OrderabilityKind::L3 => {
            if (0..n).any(|i| mono_star(host, i, 3, &[])) {
                return true;
            }
            // Two cherries at distinct centers spanning at least 5 vertices.
            for a in 0..n {
                for b in 0..n {
                    if b == a {
                        continue;
                    }
                    for c1 in 0..n {
                        for c2 in c1 + 1..n {
                            if c1 == a || c2 == a || !cherry(host, a, c1, c2) {
                                continue;
                            }
                            for d1 in 0..n {
                                for d2 in d1 + 1..n {
                                    if d1 == b || d2 == b || !cherry(host, b, d1, d2) {
                                        continue;
                                    }
                                    let mut set = vec![a, b, c1, c2, d1, d2];
                                    set.sort_unstable();
                                    set.dedup();
                                    if set.len() >= 5 {
                                        return true;
                                    }
                                }
                            }
                        }
                    }
                }
            }
            false
        }
        OrderabilityKind::K33Minus => {
            for t in distinct_tuples(n, 6) {
                let (a1, b1, c1, a2, b2, c2) = (t[0], t[1], t[2], t[3], t[4], t[5]);
                let star = same_cell(host, (a1, a2), (a1, b2)) && same_cell(host, (a1, a2), (a1, c2));
                if star && cherry(host, a2, b1, c1) {
                    return true;
                }
                if star && cherry(host, c1, a2, b2) {
                    return true;
                }
                if cherry(host, a1, b2, c2)
                    && cherry(host, a2, a1, b1)
                    && cherry(host, c1, a2, b2)
                {
                    return true;
                }
                if cherry(host, a2, a1, b1)
                    && cherry(host, c1, a2, b2)
                    && cherry(host, c2, a1, b1)
                {
                    return true;
                }
                // two watchers of a pair plus a cherry over the watchers:
                // the watcher pair and cherry center fill one side, the
                // missing edge lands between the cherry center and the
                // free sixth vertex.
                if cherry(host, a2, a1, b1)
                    && cherry(host, b2, a1, b1)
                    && cherry(host, c1, a2, b2)
                {
                    return true;
                }
            }
            false
        }
        OrderabilityKind::K24 => {
            if (0..n).any(|i| mono_star(host, i, 4, &[])) {
                return true;
            }
            // cherry over {a1,b1} plus three edges at a1 in one color
            // avoiding a2 and b1.
            for a1 in 0..n {
                for b1 in 0..n {
                    for a2 in 0..n {
                        if a1 == b1 || a2 == a1 || a2 == b1 {
                            continue;
                        }
                        if cherry(host, a2, a1, b1) && mono_star(host, a1, 3, &[a2, b1]) {
                            return true;
                        }
                    }
                }
            }
            // three watchers of one pair
            for a1 in 0..n {
                for b1 in a1 + 1..n {
                    let watchers = (0..n)
                        .filter(|&v| v != a1 && v != b1 && cherry(host, v, a1, b1))
                        .count();
                    if watchers >= 3 {
                        return true;
                    }
                }
            }
            // two watchers of {a1,b1} plus a disjoint cherry at a1
            for t in distinct_tuples(n, 6) {
                let (a2, b2, a1, b1, c2, d2) = (t[0], t[1], t[2], t[3], t[4], t[5]);
                if a2 > b2 || c2 > d2 {
                    continue;
                }
                if cherry(host, a2, a1, b1)
                    && cherry(host, b2, a1, b1)
                    && cherry(host, a1, c2, d2)
                {
                    return true;
                }
            }
            false
        }
        OrderabilityKind::K33 => {
            // Two vertices with monochromatic 3-stars onto a common triple.
            for a1 in 0..n {
                for b1 in 0..n {
                    if b1 == a1 {
                        continue;
                    }
                    let rest: Vec<usize> = (0..n).filter(|&v| v != a1 && v != b1).collect();
                    for tri in combinations(rest.len(), 3) {
                        let (x, y, z) = (rest[tri[0]], rest[tri[1]], rest[tri[2]]);
                        let star = |c: usize| {
                            same_cell(host, (c, x), (c, y)) && same_cell(host, (c, x), (c, z))
                        };
                        if star(a1) && star(b1) {
                            return true;
                        }
                    }
                }
            }
            for t in distinct_tuples(n, 6) {
                let (a1, b1, c1, a2, b2, c2) = (t[0], t[1], t[2], t[3], t[4], t[5]);
                let star = same_cell(host, (a1, a2), (a1, b2)) && same_cell(host, (a1, a2), (a1, c2));
                if !star || !cherry(host, a2, b1, c1) {
                    continue;
                }
                if cherry(host, b1, b2, c2) || cherry(host, b2, b1, c1) {
                    return true;
                }
            }
            false
        }
    }
}

fn distinct_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !cur.contains(&v) {
                cur.push(v);
                rec(n, k, cur, out);
                cur.pop();
            }
        }
    }
    rec(n, k, &mut cur, &mut out);
    out
}

/// Searches for an orderable copy of `g`.
///
/// Generic mode scans all copies with the greedy check. Specialized mode
/// first tests the closed-form criterion for the pattern's kind and scans
/// only when it fires; both modes agree on found/absent.
pub fn find_orderable_copy<H: Host>(
    host: &H,
    g: &GraphPattern,
    mode: DetectionMode,
) -> Result<Option<Embedding>, PatternError> {
    match mode {
        DetectionMode::Generic => Ok(embeddings(g, host.n())
            .into_iter()
            .find(|e| copy_is_orderable(host, g, e).is_some())),
        DetectionMode::Specialized => {
            let kind = orderable_kind(g).ok_or(PatternError::UnsupportedSpecialized)?;
            if !orderable_config_present(host, kind) {
                return Ok(None);
            }
            Ok(embeddings(g, host.n())
                .into_iter()
                .find(|e| copy_is_orderable(host, g, e).is_some()))
        }
    }
}

/// Counts copies of the auxiliary colored graph inside the host under the
/// given symmetry.
pub fn count_aux_copies(
    host: &ColoredCompleteGraph,
    aux: &ColoredCompleteGraph,
    sym: Symmetry,
) -> u64 {
    let m = aux.n();
    if m > host.n() {
        return 0;
    }
    let mut count = 0;
    match sym {
        Symmetry::Ordered => {
            for sub in combinations(host.n(), m) {
                if induced_colors(host, &sub) == aux.colors() {
                    count += 1;
                }
            }
        }
        Symmetry::Unordered => {
            let key = canonical_form(aux, Symmetry::Unordered);
            for sub in combinations(host.n(), m) {
                let induced = ColoredCompleteGraph::new(m, induced_colors(host, &sub)).unwrap();
                if canonical_form(&induced, Symmetry::Unordered) == key {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Colors of the subgraph induced by a sorted vertex subset, renormalized.
pub fn induced_colors(host: &ColoredCompleteGraph, sub: &[usize]) -> Vec<Color> {
    let mut raw = Vec::with_capacity(sub.len() * (sub.len().saturating_sub(1)) / 2);
    for (a, b) in pairs(sub.len()) {
        raw.push(host.color(sub[a], sub[b]));
    }
    normalize_colors(&raw)
}

/// Total number of forbidden copies in the host: monochromatic copies for
/// the ordered 2-color variant, canonical copies for the canonical ordered
/// variant, orderable plus rainbow copies for the unordered canonical
/// variant, plus copies of any auxiliary forbidden colored graphs. Zero
/// exactly when the host is feasible.
pub fn score(host: &ColoredCompleteGraph, problem: &ProblemSpec) -> u64 {
    let mut total: u64 = 0;
    match problem.variant {
        Variant::Or => {
            for e in embeddings(&problem.g, host.n()) {
                if copy_is_monochromatic(host, &problem.g, &e) {
                    total += 1;
                }
            }
        }
        Variant::Er => {
            for e in embeddings(&problem.g, host.n()) {
                if copy_is_canonical(host, &problem.g, &e) {
                    total += 1;
                }
            }
        }
        Variant::Cr => {
            for e in embeddings(&problem.g, host.n()) {
                if copy_is_orderable(host, &problem.g, &e).is_some() {
                    total += 1;
                }
            }
            let h = problem.h.as_ref().expect("CR problem has h");
            for e in embeddings(h, host.n()) {
                if copy_is_rainbow(host, h, &e) {
                    total += 1;
                }
            }
        }
    }
    for aux in &problem.aux_forbidden {
        total += count_aux_copies(host, aux, problem.symmetry());
    }
    total
}
