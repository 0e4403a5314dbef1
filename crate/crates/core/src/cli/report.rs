//! JSON run report.
//!
//! The tree is written as nested nodes:
//!
//! ```text
//! { "id", "n",
//!   "model": { "degrees": [..], "terms": [..], "coeffs": [[..], ..] },
//!   "loss": { "raw", "effective" },
//!   "boundary": { "kind": "threshold" | "line", "params": [..] } | null,
//!   "children": [ .. ] }
//! ```
//!
//! `coeffs` has one row per term with one entry per output. Threshold params
//! are `[t]`; line params are `[ax, ay, bx, by]`.

use serde::{Deserialize, Serialize};

use crate::basis::Basis;
use crate::engine::{BoundaryScore, Node, PartitionTree, RdpConfig};
use crate::geometry::{GridSpec, Hyperplane};
use crate::scoring::{PenaltySpec, ScoredModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelJson {
    pub degrees: Vec<u32>,
    pub terms: Vec<String>,
    pub coeffs: Vec<Vec<f64>>,
}

impl From<&ScoredModel> for ModelJson {
    fn from(s: &ScoredModel) -> Self {
        Self {
            degrees: s.model.basis().degrees(),
            terms: s.model.basis().term_names(),
            coeffs: s.model.coefficient_rows(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossJson {
    pub raw: f64,
    pub effective: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Threshold,
    Line,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryJson {
    pub kind: BoundaryKind,
    pub params: Vec<f64>,
}

impl From<&Hyperplane> for BoundaryJson {
    fn from(h: &Hyperplane) -> Self {
        match *h {
            Hyperplane::Threshold { t } => Self {
                kind: BoundaryKind::Threshold,
                params: vec![t],
            },
            Hyperplane::Line { a, b } => Self {
                kind: BoundaryKind::Line,
                params: vec![a.x, a.y, b.x, b.y],
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportNode {
    pub id: usize,
    pub n: usize,
    pub model: ModelJson,
    pub loss: LossJson,
    pub boundary: Option<BoundaryJson>,
    pub children: Vec<ReportNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl From<&Node> for ReportNode {
    fn from(node: &Node) -> Self {
        let (boundary, children) = match &node.split {
            Some(split) => (
                Some(BoundaryJson::from(&split.boundary.hyperplane)),
                vec![Self::from(&split.left), Self::from(&split.right)],
            ),
            None => (None, Vec::new()),
        };
        Self {
            id: node.id,
            n: node.len(),
            model: ModelJson::from(&node.model),
            loss: LossJson {
                raw: node.model.raw_loss,
                effective: node.model.effective_loss,
            },
            boundary,
            children,
            diagnostic: node.diagnostic.clone(),
        }
    }
}

impl ReportNode {
    /// Leaves, left to right.
    pub fn leaves(&self) -> Vec<&ReportNode> {
        if self.children.is_empty() {
            return vec![self];
        }
        self.children.iter().flat_map(ReportNode::leaves).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafJson {
    pub id: usize,
    pub n: usize,
    pub model: ModelJson,
    pub loss: LossJson,
}

/// An accepted boundary with the losses of the improvement test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRecord {
    pub node: usize,
    pub boundary: BoundaryJson,
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub input: Option<String>,
    pub dim: usize,
    pub outputs: usize,
    pub samples: usize,
    pub q: f64,
    pub family: Vec<Basis>,
    pub penalty: PenaltySpec,
    pub min_points: usize,
    pub max_depth: usize,
    pub grid: Option<GridSpec>,
    pub parallel: bool,
}

impl ConfigEcho {
    pub fn new(
        cfg: &RdpConfig,
        input: Option<String>,
        dim: usize,
        outputs: usize,
        samples: usize,
    ) -> Self {
        Self {
            input,
            dim,
            outputs,
            samples,
            q: cfg.q,
            family: cfg.family.candidates().to_vec(),
            penalty: cfg.penalty.clone(),
            min_points: cfg.min_points,
            max_depth: cfg.max_depth,
            grid: cfg.grid,
            parallel: cfg.parallel && cfg!(feature = "parallel"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ConfigEcho,
    pub tree: ReportNode,
    pub leaves: Vec<LeafJson>,
    pub boundaries: Vec<BoundaryRecord>,
    pub seconds: f64,
}

impl RunReport {
    pub fn new(config: ConfigEcho, tree: &PartitionTree, seconds: f64) -> Self {
        let leaves = tree
            .leaves()
            .into_iter()
            .map(|n| LeafJson {
                id: n.id,
                n: n.len(),
                model: ModelJson::from(&n.model),
                loss: LossJson {
                    raw: n.model.raw_loss,
                    effective: n.model.effective_loss,
                },
            })
            .collect();
        let boundaries = tree
            .nodes()
            .into_iter()
            .filter_map(|n| n.split.as_ref().map(|s| (n, &s.boundary)))
            .map(|(n, b): (&Node, &BoundaryScore)| BoundaryRecord {
                node: n.id,
                boundary: BoundaryJson::from(&b.hyperplane),
                e0: n.model.effective_loss,
                e1: b.e1(),
                e2: b.e2(),
            })
            .collect();
        Self {
            config,
            tree: ReportNode::from(&tree.root),
            leaves,
            boundaries,
            seconds,
        }
    }
}
