//! Exact engine: extend-by-vertex complete enumeration of feasible
//! colorings with isomorph rejection, producing witnesses (lower bounds),
//! exhaustion certificates (upper bounds) and per-level counts.
//!
//! Each level holds one representative per isomorphism class under the
//! problem's symmetry. A new vertex is attached to every representative and
//! all colorings of the new edges are searched depth-first; feasibility is
//! checked incrementally on the copies that become fully colored with each
//! new edge, which is exhaustive because every forbidden copy not meeting
//! the new vertex already lay inside the (feasible) parent.

use crate::graphs::{
    canonical_form, pairs, write_level_file, CanonicalKey, Color, ColoredCompleteGraph, Embedding,
    GraphPattern, Symmetry, embeddings_through,
};
use crate::patterns::{
    copy_is_canonical, copy_is_monochromatic, copy_is_orderable, copy_is_rainbow, orderable_kind,
    score, Host, OrderabilityKind,
};
use crate::problem::{ColorRegime, ProblemSpec, Variant};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

/// All feasible representatives of one size, pairwise non-isomorphic.
#[derive(Clone, Debug)]
pub struct LevelResult {
    pub n: usize,
    pub representatives: Vec<ColoredCompleteGraph>,
}

impl LevelResult {
    pub fn count(&self) -> usize {
        self.representatives.len()
    }
}

/// Outcome of a finished or truncated run.
///
/// `Witness` proves the number is at least `n + 1`; `complete` records
/// whether the level it came from was fully enumerated. `Exhaustion` at an
/// empty level `n` proves the number is exactly `n` when every earlier
/// level was non-empty.
#[derive(Clone, Debug)]
pub enum Certificate {
    Witness {
        graph: ColoredCompleteGraph,
        n: usize,
        complete: bool,
    },
    Exhaustion {
        n: usize,
        counts: Vec<u64>,
    },
}

#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub max_reps_per_level: usize,
    pub deadline: Option<Instant>,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_reps_per_level: 50_000_000,
            deadline: None,
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error("level {level} exceeded the representative limit")]
    LevelLimit { level: usize },
    #[error("budget exhausted while building level {level}")]
    Deadline { level: usize },
    #[error("io error: {0}")]
    Io(String),
}

/// Host view during extension: the parent plus partially assigned edges to
/// the new vertex. Unassigned new edges read as `None`, so no check can
/// fire through them.
struct WorkingHost<'a> {
    parent: &'a ColoredCompleteGraph,
    new_colors: &'a [Option<Color>],
}

impl Host for WorkingHost<'_> {
    fn n(&self) -> usize {
        self.parent.n() + 1
    }

    #[inline]
    fn cell(&self, i: usize, j: usize) -> Option<Color> {
        let v = self.parent.n();
        if i == v {
            self.new_colors[j]
        } else if j == v {
            self.new_colors[i]
        } else {
            Some(self.parent.color(i, j))
        }
    }
}

enum CopyCheck {
    Mono(GraphPattern),
    Canonical(GraphPattern),
    Rainbow(GraphPattern),
    Orderable(GraphPattern),
    Aux { graph: ColoredCompleteGraph, key: Option<CanonicalKey> },
}

impl CopyCheck {
    fn pattern_size(&self) -> usize {
        match self {
            CopyCheck::Mono(p) | CopyCheck::Canonical(p) | CopyCheck::Rainbow(p)
            | CopyCheck::Orderable(p) => p.m(),
            CopyCheck::Aux { graph, .. } => graph.n(),
        }
    }

    fn fires(&self, host: &WorkingHost<'_>, emb: &Embedding) -> bool {
        match self {
            CopyCheck::Mono(p) => copy_is_monochromatic(host, p, emb),
            CopyCheck::Canonical(p) => copy_is_canonical(host, p, emb),
            CopyCheck::Rainbow(p) => copy_is_rainbow(host, p, emb),
            CopyCheck::Orderable(p) => copy_is_orderable(host, p, emb).is_some(),
            CopyCheck::Aux { graph, key } => {
                let sub = {
                    let mut s = emb.clone();
                    s.sort_unstable();
                    s
                };
                let mut raw = Vec::with_capacity(sub.len() * (sub.len() - 1) / 2);
                for (a, b) in pairs(sub.len()) {
                    match host.cell(sub[a], sub[b]) {
                        Some(c) => raw.push(c),
                        None => return false,
                    }
                }
                let induced = ColoredCompleteGraph::from_raw(sub.len(), &raw).unwrap();
                match key {
                    Some(k) => canonical_form(&induced, Symmetry::Unordered) == *k,
                    None => induced.colors() == graph.colors(),
                }
            }
        }
    }
}

/// Per-level extension context: copy checks bucketed by the index of the
/// new edge at which each copy becomes fully colored.
pub struct ExtensionContext {
    n_new: usize,
    regime: ColorRegime,
    /// buckets[i] holds (check index, embedding) pairs complete once edge
    /// (i, new vertex) is assigned.
    buckets: Vec<Vec<(usize, Embedding)>>,
    checks: Vec<CopyCheck>,
    /// Proper-coloring shortcut for an orderable cycle target of this
    /// length: no two incident edges may share a color once hosts reach it.
    cycle_shortcut: Option<usize>,
    problem: ProblemSpec,
}

impl ExtensionContext {
    pub fn new(problem: &ProblemSpec, n_new: usize) -> Self {
        let mut checks: Vec<CopyCheck> = Vec::new();
        let mut cycle_shortcut = None;
        match problem.variant {
            Variant::Or => checks.push(CopyCheck::Mono(problem.g.clone())),
            Variant::Er => checks.push(CopyCheck::Canonical(problem.g.clone())),
            Variant::Cr => {
                match orderable_kind(&problem.g) {
                    Some(OrderabilityKind::Cycle(len)) => cycle_shortcut = Some(len),
                    _ => checks.push(CopyCheck::Orderable(problem.g.clone())),
                }
                checks.push(CopyCheck::Rainbow(problem.h.clone().expect("CR has h")));
            }
        }
        for aux in &problem.aux_forbidden {
            let key = match problem.symmetry() {
                Symmetry::Unordered => Some(canonical_form(aux, Symmetry::Unordered)),
                Symmetry::Ordered => None,
            };
            checks.push(CopyCheck::Aux { graph: aux.clone(), key });
        }

        let v = n_new - 1;
        let mut buckets: Vec<Vec<(usize, Embedding)>> = vec![Vec::new(); n_new.max(1) - 1];
        for (ci, check) in checks.iter().enumerate() {
            if check.pattern_size() > n_new {
                continue;
            }
            let embs = match check {
                CopyCheck::Aux { graph, .. } => {
                    // all subsets through v, as identity embeddings
                    embeddings_through(&GraphPattern::complete(graph.n(), true), n_new, v)
                }
                CopyCheck::Mono(p) | CopyCheck::Canonical(p) | CopyCheck::Rainbow(p)
                | CopyCheck::Orderable(p) => embeddings_through(p, n_new, v),
            };
            for emb in embs {
                let bucket = match check {
                    CopyCheck::Aux { .. } => {
                        *emb.iter().filter(|&&u| u != v).max().unwrap()
                    }
                    CopyCheck::Mono(p) | CopyCheck::Canonical(p) | CopyCheck::Rainbow(p)
                    | CopyCheck::Orderable(p) => {
                        let mut m = 0;
                        for &(a, b) in p.edges() {
                            let (x, y) = (emb[a], emb[b]);
                            if x == v {
                                m = m.max(y);
                            } else if y == v {
                                m = m.max(x);
                            }
                        }
                        m
                    }
                };
                buckets[bucket].push((ci, emb));
            }
        }
        Self {
            n_new,
            regime: problem.color_regime(),
            buckets,
            checks,
            cycle_shortcut,
            problem: problem.clone(),
        }
    }

    /// Any violation among copies completed by assigning edge (i, v)?
    fn violation_at(&self, host: &WorkingHost<'_>, i: usize) -> bool {
        if let Some(len) = self.cycle_shortcut {
            if self.n_new >= len {
                let v = self.n_new - 1;
                let c = host.new_colors[i].expect("edge just assigned");
                for u in 0..v {
                    if u != i && host.cell(i, u) == Some(c) {
                        return true;
                    }
                }
                for u in 0..i {
                    if host.new_colors[u] == Some(c) {
                        return true;
                    }
                }
            }
        }
        self.buckets[i]
            .iter()
            .any(|(ci, emb)| self.checks[*ci].fires(host, emb))
    }

    /// Violations entirely inside the parent that only become copies at
    /// the new size (the proper-coloring shortcut crossing its threshold).
    fn parent_blocks_extension(&self, parent: &ColoredCompleteGraph) -> bool {
        if let Some(len) = self.cycle_shortcut {
            if self.n_new == len {
                for c in 0..parent.n() {
                    for a in 0..parent.n() {
                        for b in a + 1..parent.n() {
                            if a != c && b != c && parent.color(c, a) == parent.color(c, b) {
                                return true;
                            }
                        }
                    }
                }
            }
        }
        false
    }
}

/// Enumerates every feasible one-vertex extension of a feasible parent.
///
/// In the two-color regime each new edge takes class 0 or 1; in the
/// unbounded regime it takes an existing id or opens exactly one fresh id,
/// which together with first-occurrence normalization generates each
/// extension partition exactly once.
pub fn extend_by_vertex(
    parent: &ColoredCompleteGraph,
    problem: &ProblemSpec,
) -> Vec<ColoredCompleteGraph> {
    let ctx = ExtensionContext::new(problem, parent.n() + 1);
    extend_with_context(parent, &ctx)
}

pub fn extend_with_context(
    parent: &ColoredCompleteGraph,
    ctx: &ExtensionContext,
) -> Vec<ColoredCompleteGraph> {
    debug_assert_eq!(parent.n() + 1, ctx.n_new);
    let n = parent.n();
    if ctx.parent_blocks_extension(parent) {
        return Vec::new();
    }
    let mut new_colors: Vec<Option<Color>> = vec![None; n];
    let mut out = Vec::new();
    let parent_classes = parent.class_count() as Color;

    fn dfs(
        parent: &ColoredCompleteGraph,
        ctx: &ExtensionContext,
        new_colors: &mut Vec<Option<Color>>,
        i: usize,
        opened: Color,
        out: &mut Vec<ColoredCompleteGraph>,
        parent_classes: Color,
    ) {
        let n = parent.n();
        if i == n {
            let colors: Vec<Color> = new_colors.iter().map(|c| c.unwrap()).collect();
            let child = parent.extended(&colors);
            out.push(child);
            return;
        }
        let limit = match ctx.regime {
            ColorRegime::Two => 2,
            ColorRegime::Unbounded => parent_classes + opened + 1,
        };
        for c in 0..limit {
            new_colors[i] = Some(c);
            let host = WorkingHost { parent, new_colors };
            if !ctx.violation_at(&host, i) {
                let opened_next = match ctx.regime {
                    ColorRegime::Two => opened,
                    ColorRegime::Unbounded => {
                        if c >= parent_classes {
                            opened.max(c - parent_classes + 1)
                        } else {
                            opened
                        }
                    }
                };
                dfs(parent, ctx, new_colors, i + 1, opened_next, out, parent_classes);
            }
        }
        new_colors[i] = None;
    }

    dfs(parent, ctx, &mut new_colors, 0, 0, &mut out, parent_classes);
    // Incremental checks are re-verified against the full scoring function
    // in debug builds; release builds trust them for speed.
    for child in &out {
        debug_assert_eq!(score(child, &ctx.problem), 0, "incremental check missed a copy");
    }
    out
}

/// Builds the next level from a complete, deduplicated level: extends every
/// representative, filters to feasible children and keeps one canonical
/// representative per isomorphism class, sorted by canonical key.
pub fn enumerate_level(
    reps: &LevelResult,
    problem: &ProblemSpec,
    budget: &Budget,
) -> Result<LevelResult, EnumError> {
    let n_new = reps.n + 1;
    let ctx = ExtensionContext::new(problem, n_new);
    let sym = problem.symmetry();

    let chunks: Vec<Result<BTreeMap<CanonicalKey, ColoredCompleteGraph>, EnumError>> = reps
        .representatives
        .par_iter()
        .map(|parent| {
            if let Some(deadline) = budget.deadline {
                if Instant::now() > deadline {
                    return Err(EnumError::Deadline { level: n_new });
                }
            }
            let mut local = BTreeMap::new();
            for child in extend_with_context(parent, &ctx) {
                let key = canonical_form(&child, sym);
                local.entry(key).or_insert(child);
            }
            Ok(local)
        })
        .collect();

    let mut merged: BTreeMap<CanonicalKey, ColoredCompleteGraph> = BTreeMap::new();
    for chunk in chunks {
        for (key, child) in chunk? {
            merged.entry(key).or_insert(child);
            if merged.len() > budget.max_reps_per_level {
                return Err(EnumError::LevelLimit { level: n_new });
            }
        }
    }

    // Store the canonical labeling itself so level files are byte-stable.
    let representatives: Vec<ColoredCompleteGraph> = merged
        .into_iter()
        .map(|(key, g)| match sym {
            Symmetry::Ordered => g,
            Symmetry::Unordered => {
                ColoredCompleteGraph::new(n_new, key.colors().to_vec()).unwrap()
            }
        })
        .collect();
    Ok(LevelResult { n: n_new, representatives })
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub certificate: Certificate,
    pub levels: Vec<LevelResult>,
    pub limited: Option<EnumError>,
}

/// Runs levels upward from a single vertex (resuming from persisted level
/// files when `out_dir` already holds some for this problem). Stops at the
/// first empty level with an exhaustion certificate, at `n_max` with a
/// witness, or on budget exhaustion with the best witness so far flagged
/// incomplete.
pub fn run_enumeration(
    problem: &ProblemSpec,
    n_max: usize,
    budget: &Budget,
    out_dir: Option<&Path>,
) -> Result<RunOutcome, EnumError> {
    assert!(n_max >= 1);
    let mut levels: Vec<LevelResult> = Vec::new();

    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(|e| EnumError::Io(e.to_string()))?;
        for n in 1..=n_max {
            let path = level_path(dir, n);
            if !path.exists() {
                break;
            }
            match crate::graphs::read_level_file(&path) {
                Ok((id, level, graphs)) if id == problem.id && level == n => {
                    levels.push(LevelResult { n, representatives: graphs });
                }
                _ => break,
            }
        }
    }
    if levels.is_empty() {
        levels.push(LevelResult {
            n: 1,
            representatives: vec![ColoredCompleteGraph::single_vertex()],
        });
        persist(out_dir, problem, levels.last().unwrap())?;
    }

    loop {
        let cur = levels.last().unwrap();
        if cur.representatives.is_empty() {
            let counts = levels.iter().map(|l| l.count() as u64).collect();
            return Ok(RunOutcome {
                certificate: Certificate::Exhaustion { n: cur.n, counts },
                levels,
                limited: None,
            });
        }
        if cur.n == n_max {
            let graph = cur.representatives[0].clone();
            let n = cur.n;
            return Ok(RunOutcome {
                certificate: Certificate::Witness { graph, n, complete: true },
                levels,
                limited: None,
            });
        }
        match enumerate_level(cur, problem, budget) {
            Ok(next) => {
                persist(out_dir, problem, &next)?;
                levels.push(next);
            }
            Err(err @ (EnumError::LevelLimit { .. } | EnumError::Deadline { .. })) => {
                let graph = cur.representatives[0].clone();
                let n = cur.n;
                return Ok(RunOutcome {
                    certificate: Certificate::Witness { graph, n, complete: false },
                    levels,
                    limited: Some(err),
                });
            }
            Err(e) => return Err(e),
        }
    }
}

fn level_path(dir: &Path, n: usize) -> PathBuf {
    dir.join(format!("n{n}.txt"))
}

fn persist(
    out_dir: Option<&Path>,
    problem: &ProblemSpec,
    level: &LevelResult,
) -> Result<(), EnumError> {
    if let Some(dir) = out_dir {
        write_level_file(&level_path(dir, level.n), &problem.id, level.n, &level.representatives)
            .map_err(|e| EnumError::Io(e.to_string()))?;
    }
    Ok(())
}

/// Formats a certificate for the on-disk certificate file.
pub fn certificate_text(problem_id: &str, cert: &Certificate, counts: &[u64]) -> String {
    let mut s = String::from("# certificate\n");
    s.push_str(&format!("problem: {problem_id}\n"));
    match cert {
        Certificate::Exhaustion { n, .. } => {
            s.push_str("type: exhaustion\n");
            s.push_str(&format!("n: {n}\n"));
        }
        Certificate::Witness { graph, n, complete } => {
            s.push_str("type: witness\n");
            s.push_str(&format!("n: {n}\n"));
            s.push_str(&format!("complete: {complete}\n"));
            s.push_str(&format!("witness: {}\n", crate::graphs::serialize_graph(graph)));
        }
    }
    let counts_str: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
    s.push_str(&format!("counts: {}\n", counts_str.join(" ")));
    s
}

/// Exact value determined by a certificate, when it is one: an exhaustion
/// at `n` preceded by a witness at `n - 1` pins the number to `n`.
pub fn exact_value(cert: &Certificate) -> Option<usize> {
    match cert {
        Certificate::Exhaustion { n, counts } => {
            if counts[..counts.len() - 1].iter().all(|&c| c > 0) {
                Some(*n)
            } else {
                None
            }
        }
        _ => None,
    }
}

/// Brute-force level oracle for tests: every normalized coloring of the
/// complete graph on `n` vertices, filtered by score and deduplicated by
/// canonical form.
pub fn brute_force_level(problem: &ProblemSpec, n: usize) -> Vec<ColoredCompleteGraph> {
    let e = crate::graphs::pair_count(n);
    let mut out: BTreeMap<CanonicalKey, ColoredCompleteGraph> = BTreeMap::new();
    let max_classes = match problem.color_regime() {
        ColorRegime::Two => 2usize,
        ColorRegime::Unbounded => e.max(1),
    };
    let mut colors = vec![0 as Color; e];
    loop {
        if let Ok(g) = ColoredCompleteGraph::new(n, colors.clone()) {
            if score(&g, problem) == 0 {
                let key = canonical_form(&g, problem.symmetry());
                out.entry(key).or_insert(g);
            }
        }
        if e == 0 {
            return out.into_values().collect();
        }
        let mut i = e;
        loop {
            if i == 0 {
                return out.into_values().collect();
            }
            i -= 1;
            colors[i] += 1;
            if (colors[i] as usize) < max_classes {
                break;
            }
            colors[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::parse_graph;

    fn er_c3() -> ProblemSpec {
        ProblemSpec::er("er-c3", GraphPattern::cycle(3, true)).unwrap()
    }

    #[test]
    fn extend_k1_and_k2_for_er_c3() {
        let p = er_c3();
        let k1 = ColoredCompleteGraph::single_vertex();
        let children = extend_by_vertex(&k1, &p);
        assert_eq!(children.len(), 1);
        assert_eq!(children[0], parse_graph("2 1 0").unwrap());
        let k2 = children[0].clone();
        let children = extend_by_vertex(&k2, &p);
        assert_eq!(children.len(), 1);
        assert_eq!(children[0], parse_graph("3 2 0 1 0").unwrap());
    }

    #[test]
    fn er_c3_value_is_4() {
        let p = er_c3();
        let run = run_enumeration(&p, 10, &Budget::default(), None).unwrap();
        match run.certificate {
            Certificate::Exhaustion { n, ref counts } => {
                assert_eq!(n, 4);
                assert_eq!(counts, &[1, 1, 1, 0]);
            }
            _ => panic!("expected exhaustion"),
        }
        assert_eq!(exact_value(&run.certificate), Some(4));
    }

    #[test]
    fn cr_3_3_value_is_3() {
        let p = ProblemSpec::cr(
            "cr-3-3",
            GraphPattern::cycle(3, false),
            GraphPattern::cycle(3, false),
        )
        .unwrap();
        let run = run_enumeration(&p, 10, &Budget::default(), None).unwrap();
        assert_eq!(exact_value(&run.certificate), Some(3));
    }

    #[test]
    fn or_c3_value_is_6() {
        let p = ProblemSpec::or("or-c3", GraphPattern::cycle(3, true)).unwrap();
        let run = run_enumeration(&p, 10, &Budget::default(), None).unwrap();
        assert_eq!(exact_value(&run.certificate), Some(6));
    }

    #[test]
    fn guided_levels_match_published_counts() {
        let mono_c3 = parse_graph("3 1 0 0 0").unwrap();
        let p = ProblemSpec::cr(
            "cr-6-3-guided",
            GraphPattern::complete(6, false),
            GraphPattern::cycle(3, false),
        )
        .unwrap()
        .with_aux(vec![mono_c3]);
        let run = run_enumeration(&p, 5, &Budget::default(), None).unwrap();
        let counts: Vec<usize> = run.levels.iter().map(|l| l.count()).collect();
        assert_eq!(counts, vec![1, 1, 1, 4, 9]);
    }

    #[test]
    fn levels_match_brute_force_small() {
        let problems = vec![
            er_c3(),
            ProblemSpec::or("or-p3", GraphPattern::new(3, &[(0, 1), (1, 2)], true).unwrap())
                .unwrap(),
            ProblemSpec::cr(
                "cr-4-3",
                GraphPattern::complete(4, false),
                GraphPattern::cycle(3, false),
            )
            .unwrap(),
        ];
        for p in problems {
            let run = run_enumeration(&p, 4, &Budget::default(), None).unwrap();
            for level in &run.levels {
                if level.n > 4 {
                    continue;
                }
                let brute = brute_force_level(&p, level.n);
                assert_eq!(level.count(), brute.len(), "problem {} n={}", p.id, level.n);
            }
        }
    }

    #[test]
    fn representatives_score_zero_and_hereditary() {
        let p = ProblemSpec::cr(
            "cr-4-3",
            GraphPattern::complete(4, false),
            GraphPattern::cycle(3, false),
        )
        .unwrap();
        let run = run_enumeration(&p, 5, &Budget::default(), None).unwrap();
        for level in &run.levels {
            for g in &level.representatives {
                assert_eq!(score(g, &p), 0);
            }
        }
        // hereditarity: dropping the last vertex lands on the previous level
        for w in run.levels.windows(2) {
            let prev: Vec<_> = w[0]
                .representatives
                .iter()
                .map(|g| canonical_form(g, p.symmetry()))
                .collect();
            for g in &w[1].representatives {
                let parent = g.drop_last_vertex();
                assert!(prev.contains(&canonical_form(&parent, p.symmetry())));
            }
        }
    }

    #[test]
    fn deterministic_levels_and_resume() {
        let p = er_c3();
        let dir = tempfile::tempdir().unwrap();
        let run1 = run_enumeration(&p, 3, &Budget::default(), Some(dir.path())).unwrap();
        let bytes1 = std::fs::read(dir.path().join("n3.txt")).unwrap();
        // resume continues from the stored levels and reproduces them
        let run2 = run_enumeration(&p, 10, &Budget::default(), Some(dir.path())).unwrap();
        let bytes2 = std::fs::read(dir.path().join("n3.txt")).unwrap();
        assert_eq!(bytes1, bytes2);
        assert_eq!(run1.levels[2].representatives, run2.levels[2].representatives);
        assert_eq!(exact_value(&run2.certificate), Some(4));
    }

    #[test]
    fn budget_truncation_yields_incomplete_witness() {
        let p = ProblemSpec::or("or-k4", GraphPattern::complete(4, true)).unwrap();
        let budget = Budget {
            max_reps_per_level: 2,
            deadline: None,
        };
        let run = run_enumeration(&p, 17, &budget, None).unwrap();
        match run.certificate {
            Certificate::Witness { complete, .. } => assert!(!complete),
            _ => panic!("expected truncated witness"),
        }
        assert!(matches!(run.limited, Some(EnumError::LevelLimit { .. })));
    }
}
