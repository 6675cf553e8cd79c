//! Network file format: a JSON document bundling the agent matrices, the
//! digraph, and optional gains, initial state, and integration settings.
//!
//! ```json
//! {
//!   "agent": {"A": [[...]], "B": [[...]], "C": [[...]], "g": [...]},
//!   "graph": {"n": 3, "arcs": [[2, 1, 1.0], [3, 2, 1.0], [3, 1, 1.0]]},
//!   "gains": [1.0, 1.0, 0.5],
//!   "x0": [2.0, -2.0, -7.0, 3.0, 1.0, -3.0],
//!   "sim": {"t_end": 25.0, "dt": 0.001, "tol": 0.01}
//! }
//! ```
//!
//! Arc indices are 1-based. Missing gains fall back to an identical gain
//! supplied by the caller; a missing x0 is drawn uniformly from [-5, 5] with
//! a deterministic seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::digraph::WeightedDigraph;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::passify::AgentModel;
use crate::sim::{NetworkSpec, SimOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentBlock {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    pub g: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphBlock {
    pub n: usize,
    pub arcs: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct SimBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkFile {
    pub agent: AgentBlock,
    pub graph: GraphBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gains: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimBlock>,
}

impl NetworkFile {
    pub fn parse_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("network file serializes")
    }

    pub fn agent_model(&self) -> Result<AgentModel> {
        AgentModel::new(
            DenseMatrix::from_rows_real(&self.agent.a)?,
            DenseMatrix::from_rows_real(&self.agent.b)?,
            DenseMatrix::from_rows_real(&self.agent.c)?,
            self.agent.g.clone(),
        )
    }

    pub fn digraph(&self) -> Result<WeightedDigraph> {
        WeightedDigraph::new(self.graph.n, self.graph.arcs.clone())
    }

    /// Integration settings with file values overriding the defaults.
    pub fn sim_options(&self) -> SimOptions {
        let mut opts = SimOptions::default();
        if let Some(block) = &self.sim {
            if let Some(t_end) = block.t_end {
                opts.t_end = t_end;
            }
            if let Some(dt) = block.dt {
                opts.dt = dt;
            }
            if let Some(tol) = block.tol {
                opts.tol_conv = tol;
            }
        }
        opts
    }

    /// Build a simulation-ready spec. Files without a gains block need
    /// `default_k`; files without x0 draw agent states uniformly from
    /// [-5, 5] using the given seed.
    pub fn resolve(&self, default_k: Option<f64>, seed: u64) -> Result<(NetworkSpec, SimOptions)> {
        let agent = self.agent_model()?;
        let graph = self.digraph()?;
        let gains = match (&self.gains, default_k) {
            (Some(g), _) => g.clone(),
            (None, Some(k)) => vec![k; graph.n()],
            (None, None) => {
                return Err(Error::InvalidInput(
                    "no gains in the file; supply an identical gain with --k".into(),
                ))
            }
        };
        let x0 = match &self.x0 {
            Some(x0) => x0.clone(),
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..graph.n() * agent.state_dim())
                    .map(|_| rng.gen_range(-5.0..5.0))
                    .collect()
            }
        };
        let opts = self.sim_options();
        let spec = NetworkSpec::new(agent, graph, gains, x0)?;
        Ok((spec, opts))
    }

    /// Reconstruct a file from a resolved spec (used to round-trip presets
    /// and to dump derived configurations).
    pub fn from_spec(spec: &NetworkSpec, opts: &SimOptions) -> Self {
        let matrix_rows = |m: &DenseMatrix| -> Vec<Vec<f64>> {
            (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m[(i, j)].re).collect())
                .collect()
        };
        NetworkFile {
            agent: AgentBlock {
                a: matrix_rows(spec.agent.a()),
                b: matrix_rows(spec.agent.b()),
                c: matrix_rows(spec.agent.c()),
                g: spec.agent.g().to_vec(),
            },
            graph: GraphBlock {
                n: spec.graph.n(),
                arcs: spec
                    .graph
                    .arcs()
                    .iter()
                    .map(|a| (a.src, a.dst, a.weight))
                    .collect(),
            },
            gains: Some(spec.gains.clone()),
            x0: Some(spec.x0.clone()),
            sim: Some(SimBlock {
                t_end: Some(opts.t_end),
                dt: Some(opts.dt),
                tol: Some(opts.tol_conv),
            }),
        }
    }
}
