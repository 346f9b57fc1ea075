//! Lower-bound search engines that do not enumerate exhaustively: tabu
//! search over single-edge recolorings, and an exact backtracking decision
//! procedure for the 2-color ordered variant.

use crate::graphs::{
    color_hash, normalize_colors, pair_index, Color, ColoredCompleteGraph, Embedding, GraphPattern,
};
use crate::patterns::{
    copy_is_canonical, copy_is_monochromatic, copy_is_orderable, copy_is_rainbow, score, Host,
};
use crate::problem::{ColorRegime, ProblemSpec, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{HashSet, VecDeque};
use std::sync::atomic::{AtomicBool, Ordering};
use thiserror::Error;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum HeuristicsError {
    #[error("the DFS decision procedure only handles ordered two-color problems")]
    NotOrderedTwoColor,
}

/// Result of the exact 2-coloring decision at size `n`.
#[derive(Clone, Debug)]
pub enum DfsOutcome {
    Feasible { witness: ColoredCompleteGraph, nodes: u64 },
    Infeasible { nodes: u64 },
    Indeterminate { nodes: u64 },
}

struct DfsSolver {
    copy_edges: Vec<Vec<usize>>,
    edge_copies: Vec<Vec<usize>>,
    colors: Vec<u8>,
    counts: Vec<[u32; 2]>,
    trail: Vec<usize>,
    nodes: u64,
    budget: u64,
}

const UNASSIGNED: u8 = 2;

impl DfsSolver {
    fn new(g: &GraphPattern, n: usize) -> Self {
        let edge_count = crate::graphs::pair_count(n);
        let mut copy_edges = Vec::new();
        for emb in crate::graphs::embeddings(g, n) {
            let es: Vec<usize> = g
                .edges()
                .iter()
                .map(|&(a, b)| pair_index(n, emb[a], emb[b]))
                .collect();
            copy_edges.push(es);
        }
        let mut edge_copies = vec![Vec::new(); edge_count];
        for (ci, es) in copy_edges.iter().enumerate() {
            for &e in es {
                edge_copies[e].push(ci);
            }
        }
        Self {
            counts: vec![[0, 0]; copy_edges.len()],
            copy_edges,
            edge_copies,
            colors: vec![UNASSIGNED; edge_count],
            trail: Vec::new(),
            nodes: 0,
            budget: u64::MAX,
        }
    }

    /// Assigns an edge and unit-propagates: a copy with all but one edge in
    /// a single color forces the last edge to the other color; a fully
    /// monochromatic copy is a conflict.
    fn assign(&mut self, edge: usize, color: u8) -> bool {
        let mut queue: VecDeque<(usize, u8)> = VecDeque::new();
        queue.push_back((edge, color));
        while let Some((e, c)) = queue.pop_front() {
            match self.colors[e] {
                x if x == c => continue,
                x if x == UNASSIGNED => {}
                _ => return false,
            }
            self.colors[e] = c;
            self.trail.push(e);
            for &ci in &self.edge_copies[e] {
                self.counts[ci][c as usize] += 1;
                let len = self.copy_edges[ci].len() as u32;
                let cnt = self.counts[ci];
                if cnt[c as usize] == len {
                    return false;
                }
                if cnt[c as usize] == len - 1 && cnt[1 - c as usize] == 0 {
                    if let Some(&free) = self.copy_edges[ci]
                        .iter()
                        .find(|&&x| self.colors[x] == UNASSIGNED)
                    {
                        queue.push_back((free, 1 - c));
                    }
                }
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let e = self.trail.pop().unwrap();
            let c = self.colors[e];
            self.colors[e] = UNASSIGNED;
            for &ci in &self.edge_copies[e] {
                self.counts[ci][c as usize] -= 1;
            }
        }
    }

    fn search(&mut self) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        let Some(e) = self.colors.iter().position(|&c| c == UNASSIGNED) else {
            return Some(true);
        };
        // Swapping the two classes maps solutions to solutions, so the very
        // first decision is pinned to class 0.
        let branch: &[u8] = if self.trail.is_empty() && e == 0 { &[0] } else { &[0, 1] };
        for &c in branch {
            let mark = self.trail.len();
            if self.assign(e, c) {
                match self.search() {
                    Some(true) => return Some(true),
                    Some(false) => {}
                    None => return None,
                }
            }
            self.undo_to(mark);
        }
        Some(false)
    }
}

/// Decides whether a 2-coloring of the ordered complete graph on `n`
/// vertices avoiding monochromatic copies of the target exists, by
/// backtracking over edges in row-major order with unit propagation.
pub fn dfs_decide(
    problem: &ProblemSpec,
    n: usize,
    node_budget: u64,
) -> Result<DfsOutcome, HeuristicsError> {
    if problem.variant != Variant::Or || problem.color_regime() != ColorRegime::Two {
        return Err(HeuristicsError::NotOrderedTwoColor);
    }
    let mut solver = DfsSolver::new(&problem.g, n);
    solver.budget = node_budget;
    match solver.search() {
        Some(true) => {
            let colors: Vec<Color> = solver.colors.iter().map(|&c| c as Color).collect();
            let witness = ColoredCompleteGraph::from_raw(n, &colors).unwrap();
            debug_assert_eq!(score(&witness, problem), 0);
            Ok(DfsOutcome::Feasible { witness, nodes: solver.nodes })
        }
        Some(false) => Ok(DfsOutcome::Infeasible { nodes: solver.nodes }),
        None => Ok(DfsOutcome::Indeterminate { nodes: solver.nodes }),
    }
}

/// Tabu search configuration. The color cap bounds the ids a coloring may
/// use; the default for unordered canonical problems is one less than the
/// rainbow target's edge count, the cap above which extra colors cannot
/// help, and can be tightened after solving the color-count objective of
/// the integer program.
#[derive(Clone, Debug)]
pub struct TabuConfig {
    pub n: usize,
    pub c_max: Color,
    pub max_iters: u64,
    pub tabu_capacity: usize,
    pub seed: u64,
    pub restarts: u32,
    pub threads: usize,
}

impl TabuConfig {
    pub fn for_problem(problem: &ProblemSpec, n: usize) -> Self {
        let c_max = match problem.variant {
            Variant::Or => 2,
            Variant::Cr => {
                let h_edges = problem.h.as_ref().map(|h| h.edge_count()).unwrap_or(3);
                (h_edges as Color).saturating_sub(1).max(2)
            }
            Variant::Er => crate::graphs::pair_count(n) as Color,
        };
        Self {
            n,
            c_max,
            max_iters: 100_000,
            tabu_capacity: 1_000_000,
            seed: 1,
            restarts: 10,
            threads: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TraceStep {
    pub iter: u64,
    pub score: u64,
    pub edge: usize,
    pub color: Color,
}

#[derive(Clone, Debug)]
pub struct SearchTrace {
    pub restart: u32,
    pub steps: Vec<TraceStep>,
    pub final_score: u64,
    pub final_graph: ColoredCompleteGraph,
}

#[derive(Clone, Debug)]
pub struct TabuOutcome {
    pub witness: Option<ColoredCompleteGraph>,
    pub traces: Vec<SearchTrace>,
}

struct RawHost<'a> {
    n: usize,
    colors: &'a [Color],
}

impl Host for RawHost<'_> {
    fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn cell(&self, i: usize, j: usize) -> Option<Color> {
        Some(self.colors[pair_index(self.n, i, j)])
    }
}

enum MoveCheck {
    Mono(GraphPattern),
    Canonical(GraphPattern),
    Rainbow(GraphPattern),
    Orderable(GraphPattern),
}

impl MoveCheck {
    fn pattern(&self) -> &GraphPattern {
        match self {
            MoveCheck::Mono(p) | MoveCheck::Canonical(p) | MoveCheck::Rainbow(p)
            | MoveCheck::Orderable(p) => p,
        }
    }

    fn fires(&self, host: &RawHost<'_>, emb: &Embedding) -> bool {
        match self {
            MoveCheck::Mono(p) => copy_is_monochromatic(host, p, emb),
            MoveCheck::Canonical(p) => copy_is_canonical(host, p, emb),
            MoveCheck::Rainbow(p) => copy_is_rainbow(host, p, emb),
            MoveCheck::Orderable(p) => copy_is_orderable(host, p, emb).is_some(),
        }
    }
}

/// Precomputed copies indexed by host edge, so recoloring one edge only
/// rescans the copies whose pattern edges use it.
struct MoveTable {
    checks: Vec<MoveCheck>,
    copies: Vec<(usize, Embedding)>,
    per_edge: Vec<Vec<usize>>,
}

impl MoveTable {
    fn new(problem: &ProblemSpec, n: usize) -> Self {
        let mut checks = Vec::new();
        match problem.variant {
            Variant::Or => checks.push(MoveCheck::Mono(problem.g.clone())),
            Variant::Er => checks.push(MoveCheck::Canonical(problem.g.clone())),
            Variant::Cr => {
                checks.push(MoveCheck::Orderable(problem.g.clone()));
                checks.push(MoveCheck::Rainbow(problem.h.clone().expect("CR has h")));
            }
        }
        let mut copies = Vec::new();
        let mut per_edge = vec![Vec::new(); crate::graphs::pair_count(n)];
        for (ki, check) in checks.iter().enumerate() {
            for emb in crate::graphs::embeddings(check.pattern(), n) {
                let ci = copies.len();
                for &(a, b) in check.pattern().edges() {
                    per_edge[pair_index(n, emb[a], emb[b])].push(ci);
                }
                copies.push((ki, emb));
            }
        }
        Self { checks, copies, per_edge }
    }

    fn total(&self, host: &RawHost<'_>) -> u64 {
        self.copies
            .iter()
            .filter(|(ki, emb)| self.checks[*ki].fires(host, emb))
            .count() as u64
    }

    fn through_edge(&self, host: &RawHost<'_>, e: usize) -> u64 {
        self.per_edge[e]
            .iter()
            .filter(|&&ci| {
                let (ki, emb) = &self.copies[ci];
                self.checks[*ki].fires(host, emb)
            })
            .count() as u64
    }
}

struct TabuList {
    set: HashSet<u64>,
    fifo: VecDeque<u64>,
    capacity: usize,
}

impl TabuList {
    fn new(capacity: usize) -> Self {
        Self { set: HashSet::new(), fifo: VecDeque::new(), capacity }
    }

    fn insert(&mut self, h: u64) {
        if self.set.insert(h) {
            self.fifo.push_back(h);
            if self.fifo.len() > self.capacity {
                if let Some(old) = self.fifo.pop_front() {
                    self.set.remove(&old);
                }
            }
        }
    }

    fn contains(&self, h: &u64) -> bool {
        self.set.contains(h)
    }
}

fn run_restart(
    cfg: &TabuConfig,
    restart: u32,
    table: &MoveTable,
    stop: &AtomicBool,
) -> SearchTrace {
    let n = cfg.n;
    let e_count = crate::graphs::pair_count(n);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(restart as u64));
    let mut colors: Vec<Color> = (0..e_count).map(|_| rng.gen_range(0..cfg.c_max)).collect();
    let mut tabu = TabuList::new(cfg.tabu_capacity);
    tabu.insert(color_hash(&normalize_colors(&colors)));
    let mut current = table.total(&RawHost { n, colors: &colors });
    let mut steps = Vec::new();

    let mut iter = 0;
    while iter < cfg.max_iters && current > 0 {
        if stop.load(Ordering::Relaxed) {
            break;
        }
        let mut best: Option<(u64, usize, Color)> = None;
        for e in 0..e_count {
            let old_color = colors[e];
            let before = table.through_edge(&RawHost { n, colors: &colors }, e);
            for c in 0..cfg.c_max {
                if c == old_color {
                    continue;
                }
                colors[e] = c;
                let hash = color_hash(&normalize_colors(&colors));
                if tabu.contains(&hash) {
                    colors[e] = old_color;
                    continue;
                }
                let after = table.through_edge(&RawHost { n, colors: &colors }, e);
                let candidate = current - before + after;
                colors[e] = old_color;
                // strictly-better keeps the first of any tie: lowest edge
                // index, then lowest color id
                if best.map_or(true, |(s, _, _)| candidate < s) {
                    best = Some((candidate, e, c));
                }
            }
        }
        let Some((new_score, e, c)) = best else {
            break; // every move is tabu
        };
        colors[e] = c;
        current = new_score;
        tabu.insert(color_hash(&normalize_colors(&colors)));
        iter += 1;
        steps.push(TraceStep { iter, score: current, edge: e, color: c });
    }

    let final_graph = ColoredCompleteGraph::from_raw(n, &colors).unwrap();
    SearchTrace { restart, steps, final_score: current, final_graph }
}

/// Seeded tabu search: from a random coloring with ids below the cap,
/// repeatedly applies the single-edge recoloring with the best resulting
/// score whose graph hash is not in the tabu list, until the score reaches
/// zero or the iteration budget runs out. Restarts use derived seeds; with
/// multiple threads the first witness cancels the rest cooperatively and
/// the lowest-index witness is returned.
pub fn tabu_search(problem: &ProblemSpec, cfg: &TabuConfig) -> TabuOutcome {
    let table = MoveTable::new(problem, cfg.n);
    let stop = AtomicBool::new(false);

    let traces: Vec<SearchTrace> = if cfg.threads <= 1 {
        let mut out = Vec::new();
        for r in 0..cfg.restarts {
            let t = run_restart(cfg, r, &table, &stop);
            let done = t.final_score == 0;
            out.push(t);
            if done {
                break;
            }
        }
        out
    } else {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .expect("thread pool");
        pool.install(|| {
            (0..cfg.restarts)
                .into_par_iter()
                .map(|r| {
                    let t = run_restart(cfg, r, &table, &stop);
                    if t.final_score == 0 {
                        stop.store(true, Ordering::Relaxed);
                    }
                    t
                })
                .collect()
        })
    };

    let witness = traces
        .iter()
        .filter(|t| t.final_score == 0)
        .min_by_key(|t| t.restart)
        .map(|t| t.final_graph.clone());
    if let Some(w) = &witness {
        assert_eq!(score(w, problem), 0, "tabu witness failed re-verification");
    }
    TabuOutcome { witness, traces }
}

/// Trace dump, one `iter,score,edge,color` row per applied move.
pub fn trace_csv(trace: &SearchTrace) -> String {
    let mut s = String::from("iter,score,edge,color\n");
    for step in &trace.steps {
        s.push_str(&format!("{},{},{},{}\n", step.iter, step.score, step.edge, step.color));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::{exact_value, run_enumeration, Budget};
    use crate::graphs::GraphPattern;

    fn or_problem(id: &str, g: GraphPattern) -> ProblemSpec {
        ProblemSpec::or(id, g).unwrap()
    }

    #[test]
    fn dfs_or_c3() {
        let p = or_problem("or-c3", GraphPattern::cycle(3, true));
        assert!(matches!(
            dfs_decide(&p, 5, u64::MAX).unwrap(),
            DfsOutcome::Feasible { .. }
        ));
        assert!(matches!(
            dfs_decide(&p, 6, u64::MAX).unwrap(),
            DfsOutcome::Infeasible { .. }
        ));
    }

    #[test]
    fn dfs_monotone_p3() {
        let p = or_problem("or-p3-mono", GraphPattern::path(3, true));
        assert!(matches!(
            dfs_decide(&p, 4, u64::MAX).unwrap(),
            DfsOutcome::Feasible { .. }
        ));
        assert!(matches!(
            dfs_decide(&p, 5, u64::MAX).unwrap(),
            DfsOutcome::Infeasible { .. }
        ));
    }

    #[test]
    fn dfs_rejects_non_or() {
        let p = ProblemSpec::er("er-c3", GraphPattern::cycle(3, true)).unwrap();
        assert!(matches!(
            dfs_decide(&p, 3, 10),
            Err(HeuristicsError::NotOrderedTwoColor)
        ));
    }

    #[test]
    fn dfs_budget() {
        let p = or_problem("or-k4", GraphPattern::complete(4, true));
        assert!(matches!(
            dfs_decide(&p, 17, 50).unwrap(),
            DfsOutcome::Indeterminate { .. }
        ));
    }

    #[test]
    fn dfs_agrees_with_enumeration_on_small_problems() {
        let problems = [
            or_problem("or-k2", GraphPattern::complete(2, true)),
            or_problem("or-p3a", GraphPattern::new(3, &[(0, 2), (1, 2)], true).unwrap()),
            or_problem("or-p3b", GraphPattern::path(3, true)),
            or_problem("or-c3", GraphPattern::cycle(3, true)),
            or_problem("or-2k2", GraphPattern::new(4, &[(0, 3), (1, 2)], true).unwrap()),
        ];
        for p in problems {
            let run = run_enumeration(&p, 8, &Budget::default(), None).unwrap();
            let value = exact_value(&run.certificate).expect("small values settle by 8");
            for n in value - 1..=value {
                let feasible = matches!(
                    dfs_decide(&p, n, u64::MAX).unwrap(),
                    DfsOutcome::Feasible { .. }
                );
                assert_eq!(feasible, n < value, "problem {} n={n} value={value}", p.id);
            }
        }
    }

    #[test]
    fn tabu_finds_or_c3_witness_at_5() {
        let p = or_problem("or-c3", GraphPattern::cycle(3, true));
        let cfg = TabuConfig {
            max_iters: 2000,
            ..TabuConfig::for_problem(&p, 5)
        };
        let out = tabu_search(&p, &cfg);
        assert!(out.witness.is_some());
    }

    #[test]
    fn tabu_k2_has_no_witness() {
        let p = or_problem("or-k2", GraphPattern::complete(2, true));
        let cfg = TabuConfig {
            max_iters: 50,
            restarts: 2,
            ..TabuConfig::for_problem(&p, 2)
        };
        let out = tabu_search(&p, &cfg);
        assert!(out.witness.is_none());
    }

    #[test]
    fn tabu_trace_deterministic_and_moves_minimize() {
        let p = ProblemSpec::cr(
            "cr-3-3",
            GraphPattern::cycle(3, false),
            GraphPattern::cycle(3, false),
        )
        .unwrap();
        let cfg = TabuConfig {
            n: 4,
            c_max: 2,
            max_iters: 200,
            tabu_capacity: 1000,
            seed: 42,
            restarts: 1,
            threads: 1,
        };
        let a = tabu_search(&p, &cfg);
        let b = tabu_search(&p, &cfg);
        assert_eq!(trace_csv(&a.traces[0]), trace_csv(&b.traces[0]));
    }
}
