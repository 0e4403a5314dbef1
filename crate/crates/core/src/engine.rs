//! Recursive domain partitioning.
//!
//! Each domain is fitted with the best penalized model of the family. Every
//! candidate boundary is then scored by the sum of the effective losses of the
//! two induced subdomains, and the cheapest boundary is kept only if it passes
//! the improvement test `e1 + e2 <= (1 - q) * e0`. Accepted subdomains are
//! searched again, left side first.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    candidate_lines_2d, candidates_1d, perimeter_points, split_indices, GridSpec, Hyperplane,
    PerimeterIndex, PerimeterLine,
};
use crate::sample::SampleSet;
use crate::scoring::{select_model, ModelFamily, PenaltySpec, ScoredModel, EXACT_FIT_RTOL};

pub const DEFAULT_Q: f64 = 0.10;
pub const DEFAULT_MAX_DEPTH: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdpConfig {
    pub q: f64,
    pub family: ModelFamily,
    pub penalty: PenaltySpec,
    pub min_points: usize,
    pub max_depth: usize,
    /// Grid whose perimeter supplies the 2D candidate lines. Inferred from the
    /// root data when absent.
    pub grid: Option<GridSpec>,
    /// Score candidates on the rayon pool. Ignored without the `parallel` feature.
    #[serde(skip, default = "default_parallel")]
    pub parallel: bool,
}

fn default_parallel() -> bool {
    cfg!(feature = "parallel")
}

impl RdpConfig {
    pub fn new(family: ModelFamily, penalty: PenaltySpec) -> Self {
        let min_points = family.max_term_count() + 1;
        Self {
            q: DEFAULT_Q,
            family,
            penalty,
            min_points,
            max_depth: DEFAULT_MAX_DEPTH,
            grid: None,
            parallel: default_parallel(),
        }
    }

    /// Polynomials of degree `0..=max_degree` with the affine penalty `1 - alpha (max_degree - K)`.
    pub fn polynomial_1d(max_degree: u32, alpha: f64) -> Result<Self> {
        Ok(Self::new(
            ModelFamily::polynomials(max_degree),
            PenaltySpec::affine(alpha, max_degree)?,
        ))
    }

    /// A single tensor-product power series with no penalty.
    pub fn power_series_2d(degree_x: u32, degree_y: u32) -> Self {
        Self::new(
            ModelFamily::single(crate::basis::Basis::bivariate(degree_x, degree_y)),
            PenaltySpec::Unit,
        )
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = q;
        self
    }

    pub fn with_min_points(mut self, min_points: usize) -> Self {
        self.min_points = min_points;
        self
    }

    pub fn with_max_depth(mut self, max_depth: usize) -> Self {
        self.max_depth = max_depth;
        self
    }

    pub fn with_grid(mut self, grid: GridSpec) -> Self {
        self.grid = Some(grid);
        self
    }

    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q >= 0.0 && self.q < 1.0) {
            return Err(Error::Config(format!(
                "q must lie in [0, 1), got {}",
                self.q
            )));
        }
        let terms = self.family.max_term_count();
        if self.min_points < terms {
            return Err(Error::Config(format!(
                "min_points {} is below the largest basis size {terms}",
                self.min_points
            )));
        }
        for basis in self.family.candidates() {
            self.penalty.multiplier(basis.complexity()).map_err(|_| {
                Error::Config(format!("penalty is undefined for {}", basis.label()))
            })?;
        }
        Ok(())
    }
}

/// Where a scored boundary sits in the canonical candidate order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CandidateId {
    /// Position in the ascending threshold list.
    Threshold { index: usize },
    /// Perimeter point indices, `i < j`.
    Pair { i: usize, j: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryScore {
    pub hyperplane: Hyperplane,
    pub candidate: Option<CandidateId>,
    /// Model of the first side (`x < t`, or non-negative orientation).
    pub first: ScoredModel,
    pub second: ScoredModel,
}

impl BoundaryScore {
    pub fn e1(&self) -> f64 {
        self.first.effective_loss
    }

    pub fn e2(&self) -> f64 {
        self.second.effective_loss
    }

    pub fn total(&self) -> f64 {
        self.e1() + self.e2()
    }
}

/// Splits `data` by `h` and selects the best model on each side.
///
/// Returns `Ok(None)` when either side has fewer than `cfg.min_points` samples.
pub fn score_boundary(
    data: &SampleSet,
    h: &Hyperplane,
    cfg: &RdpConfig,
) -> Result<Option<BoundaryScore>> {
    let (first, second) = split_indices(data, h)?;
    if first.len() < cfg.min_points || second.len() < cfg.min_points {
        return Ok(None);
    }
    let attach = |e: Error| Error::Boundary {
        boundary: h.to_string(),
        source: Box::new(e),
    };
    // Both sides are non-empty here.
    let first_data = data.subset(&first).expect("non-empty side");
    let second_data = data.subset(&second).expect("non-empty side");
    let first = select_model(&first_data, &cfg.family, &cfg.penalty).map_err(attach)?;
    let second = select_model(&second_data, &cfg.family, &cfg.penalty).map_err(attach)?;
    Ok(Some(BoundaryScore {
        hyperplane: *h,
        candidate: None,
        first,
        second,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdLoss {
    pub threshold: f64,
    /// `e1 + e2`, or `None` when the boundary is inadmissible.
    pub total: Option<f64>,
}

/// Two-model loss for every candidate boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossSurface {
    Thresholds(Vec<ThresholdLoss>),
    /// Symmetric `len x len` matrix over perimeter indices, row-major.
    Perimeter {
        perimeter: PerimeterIndex,
        totals: Vec<Option<f64>>,
    },
}

impl LossSurface {
    /// Entry for the perimeter pair `(i, j)`; `None` for 1D surfaces.
    pub fn pair(&self, i: usize, j: usize) -> Option<f64> {
        match self {
            LossSurface::Perimeter { perimeter, totals } => totals[i * perimeter.len() + j],
            LossSurface::Thresholds(_) => None,
        }
    }

    /// Every candidate line `(i, j, total)` with `i < j` on different edges.
    pub fn pairs(&self) -> Vec<(usize, usize, Option<f64>)> {
        match self {
            LossSurface::Perimeter { perimeter, totals } => candidate_lines_2d(perimeter)
                .into_iter()
                .map(|l| (l.i, l.j, totals[l.i * perimeter.len() + l.j]))
                .collect(),
            LossSurface::Thresholds(_) => Vec::new(),
        }
    }

    /// Smallest admissible total loss.
    pub fn min_admissible(&self) -> Option<f64> {
        let it: Box<dyn Iterator<Item = f64>> = match self {
            LossSurface::Thresholds(rows) => Box::new(rows.iter().filter_map(|r| r.total)),
            LossSurface::Perimeter { totals, .. } => Box::new(totals.iter().flatten().copied()),
        };
        it.fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))))
    }

    pub fn admissible_count(&self) -> usize {
        match self {
            LossSurface::Thresholds(rows) => rows.iter().filter(|r| r.total.is_some()).count(),
            LossSurface::Perimeter { .. } => self.pairs().iter().filter(|p| p.2.is_some()).count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySearch {
    pub best: Option<BoundaryScore>,
    pub surface: LossSurface,
    /// Candidates that were large enough but could not be fitted.
    pub rejected: usize,
}

fn map_candidates<T, R, F>(items: &[T], parallel: bool, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = parallel;
    items.iter().map(f).collect()
}

/// Scores every candidate boundary of `data` and returns the cheapest admissible one.
///
/// Ties go to the earliest candidate in canonical order, so the result does not
/// depend on evaluation order.
pub fn best_boundary(data: &SampleSet, cfg: &RdpConfig) -> Result<BoundarySearch> {
    cfg.validate()?;
    if data.dim() != cfg.family.dim() {
        return Err(Error::DimensionMismatch {
            expected: cfg.family.dim(),
            actual: data.dim(),
        });
    }
    match data.dim() {
        1 => search_thresholds(data, cfg),
        _ => {
            let grid = match cfg.grid {
                Some(g) => g,
                None => GridSpec::infer(data)?,
            };
            search_lines(data, cfg, &grid)
        }
    }
}

fn admissible(
    outcome: Result<Option<BoundaryScore>>,
    rejected: &mut usize,
) -> Result<Option<BoundaryScore>> {
    match outcome {
        Ok(score) => Ok(score),
        Err(e) if e.is_fit_failure() => {
            *rejected += 1;
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn keep_best(best: &mut Option<BoundaryScore>, candidate: &BoundaryScore) {
    if best.as_ref().is_none_or(|b| candidate.total() < b.total()) {
        *best = Some(candidate.clone());
    }
}

fn search_thresholds(data: &SampleSet, cfg: &RdpConfig) -> Result<BoundarySearch> {
    let thresholds = candidates_1d(data, cfg.min_points);
    let outcomes = map_candidates(&thresholds, cfg.parallel, |&t| {
        score_boundary(data, &Hyperplane::Threshold { t }, cfg)
    });
    let mut rejected = 0;
    let mut best = None;
    let mut rows = Vec::with_capacity(thresholds.len());
    for (index, (threshold, outcome)) in thresholds.into_iter().zip(outcomes).enumerate() {
        let score = admissible(outcome, &mut rejected)?.map(|mut s| {
            s.candidate = Some(CandidateId::Threshold { index });
            s
        });
        if let Some(s) = &score {
            keep_best(&mut best, s);
        }
        rows.push(ThresholdLoss {
            threshold,
            total: score.as_ref().map(BoundaryScore::total),
        });
    }
    Ok(BoundarySearch {
        best,
        surface: LossSurface::Thresholds(rows),
        rejected,
    })
}

fn search_lines(data: &SampleSet, cfg: &RdpConfig, grid: &GridSpec) -> Result<BoundarySearch> {
    let perimeter = perimeter_points(grid);
    let lines: Vec<PerimeterLine> = candidate_lines_2d(&perimeter);
    let outcomes = map_candidates(&lines, cfg.parallel, |line| {
        score_boundary(data, &line.hyperplane(), cfg)
    });
    let n = perimeter.len();
    let mut totals = vec![None; n * n];
    let mut rejected = 0;
    let mut best = None;
    for (line, outcome) in lines.iter().zip(outcomes) {
        let score = admissible(outcome, &mut rejected)?;
        if let Some(mut s) = score {
            s.candidate = Some(CandidateId::Pair {
                i: line.i,
                j: line.j,
            });
            totals[line.i * n + line.j] = Some(s.total());
            totals[line.j * n + line.i] = Some(s.total());
            keep_best(&mut best, &s);
        }
    }
    Ok(BoundarySearch {
        best,
        surface: LossSurface::Perimeter { perimeter, totals },
        rejected,
    })
}

/// The improvement test: a split is worth making when `e1 + e2 <= (1 - q) e0`.
pub fn accept_split(e0: f64, e1: f64, e2: f64, q: f64) -> bool {
    e1 + e2 <= (1.0 - q) * e0
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub boundary: BoundaryScore,
    pub left: Node,
    pub right: Node,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    /// Preorder position in the tree (root 0, left subtree before right).
    pub id: usize,
    pub depth: usize,
    /// Indices into the root sample set.
    pub indices: Vec<usize>,
    pub model: ScoredModel,
    pub split: Option<Box<Split>>,
    /// Why the search stopped early in this domain, if it did.
    pub diagnostic: Option<String>,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.split.is_none()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    fn number(&mut self, next: &mut usize) {
        self.id = *next;
        *next += 1;
        if let Some(split) = self.split.as_mut() {
            split.left.number(next);
            split.right.number(next);
        }
    }

    fn visit<'a>(&'a self, out: &mut Vec<&'a Node>) {
        out.push(self);
        if let Some(split) = &self.split {
            split.left.visit(out);
            split.right.visit(out);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionTree {
    pub root: Node,
}

impl PartitionTree {
    /// All nodes in preorder.
    pub fn nodes(&self) -> Vec<&Node> {
        let mut out = Vec::new();
        self.root.visit(&mut out);
        out
    }

    /// Leaves, left to right.
    pub fn leaves(&self) -> Vec<&Node> {
        self.nodes().into_iter().filter(|n| n.is_leaf()).collect()
    }

    /// Accepted boundaries in discovery order (preorder of internal nodes).
    pub fn boundaries(&self) -> Vec<&BoundaryScore> {
        self.nodes()
            .into_iter()
            .filter_map(|n| n.split.as_ref().map(|s| &s.boundary))
            .collect()
    }
}

/// Recursively partitions `data` into subdomains.
pub fn partition(data: &SampleSet, cfg: &RdpConfig) -> Result<PartitionTree> {
    cfg.validate()?;
    if data.len() < cfg.min_points {
        return Err(Error::InvalidSamples(format!(
            "{} samples is below min_points {}",
            data.len(),
            cfg.min_points
        )));
    }
    let mut cfg = cfg.clone();
    if data.dim() == 2 && cfg.grid.is_none() {
        cfg.grid = Some(GridSpec::infer(data)?);
    }
    let model = select_model(data, &cfg.family, &cfg.penalty)?;
    let indices: Vec<usize> = (0..data.len()).collect();
    let mut root = grow(data, indices, model, 0, &cfg)?;
    root.number(&mut 0);
    Ok(PartitionTree { root })
}

fn grow(
    data: &SampleSet,
    indices: Vec<usize>,
    model: ScoredModel,
    depth: usize,
    cfg: &RdpConfig,
) -> Result<Node> {
    let mut node = Node {
        id: 0,
        depth,
        indices,
        model,
        split: None,
        diagnostic: None,
    };
    if depth >= cfg.max_depth {
        node.diagnostic = Some(format!("max depth {} reached", cfg.max_depth));
        return Ok(node);
    }
    // An exact fit cannot be improved; splitting it would only chase rounding noise.
    if node.model.effective_loss <= EXACT_FIT_RTOL * data.energy() {
        return Ok(node);
    }
    let search = match best_boundary(data, cfg) {
        Ok(s) => s,
        Err(e) if depth == 0 => return Err(e),
        Err(e) => {
            node.diagnostic = Some(e.to_string());
            return Ok(node);
        }
    };
    let Some(best) = search.best else {
        return Ok(node);
    };
    if !accept_split(node.model.effective_loss, best.e1(), best.e2(), cfg.q) {
        return Ok(node);
    }
    let (first, second) = split_indices(data, &best.hyperplane)?;
    let left_data = data.subset(&first).expect("admissible side");
    let right_data = data.subset(&second).expect("admissible side");
    let left_idx: Vec<usize> = first.iter().map(|&i| node.indices[i]).collect();
    let right_idx: Vec<usize> = second.iter().map(|&i| node.indices[i]).collect();
    let (left_model, right_model) = (best.first.clone(), best.second.clone());

    let build_left = || grow(&left_data, left_idx, left_model, depth + 1, cfg);
    let build_right = || grow(&right_data, right_idx, right_model, depth + 1, cfg);
    let (left, right) = join(cfg.parallel, build_left, build_right);
    node.split = Some(Box::new(Split {
        boundary: best,
        left: left?,
        right: right?,
    }));
    Ok(node)
}

fn join<A, B, RA, RB>(parallel: bool, a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return rayon::join(a, b);
    }
    let _ = parallel;
    (a(), b())
}
