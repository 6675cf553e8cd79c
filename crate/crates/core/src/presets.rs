//! Canned experiment configurations for the CLI: the three-node leader
//! example with its two published gain cases, unit-weight cycles, and the
//! twenty-node two-ring network.

use crate::digraph;
use crate::error::{Error, Result};
use crate::netfile::{AgentBlock, GraphBlock, NetworkFile, SimBlock};

/// Common gain magnitude of the three-node example, kappa_0 / r(K'L) at the
/// minimizing direction.
pub const THREE_NODE_COMMON_GAIN: f64 = 1.5;

/// Identical-gain fraction chosen so both cases have equal gain-vector norm.
pub const THREE_NODE_IDENTICAL_FRACTION: f64 = 0.527;

fn double_integrator_block() -> AgentBlock {
    AgentBlock {
        a: vec![vec![0.0, 0.0], vec![1.0, 0.0]],
        b: vec![vec![2.0], vec![0.0]],
        c: vec![vec![0.5], vec![0.5]],
        g: vec![1.0],
    }
}

fn graph_block(g: &digraph::WeightedDigraph) -> GraphBlock {
    GraphBlock {
        n: g.n(),
        arcs: g.arcs().iter().map(|a| (a.src, a.dst, a.weight)).collect(),
    }
}

/// Three-node leader network with the published initial conditions.
/// Case 1: identical gains 0.527 * k; case 2: nonidentical gains
/// (2/3, 1/3) * k, with k = 3/2. The leader's gain never enters the loop
/// and is set to 1.
pub fn three_node(case: u8) -> Result<NetworkFile> {
    let k = THREE_NODE_COMMON_GAIN;
    let gains = match case {
        1 => {
            let ki = THREE_NODE_IDENTICAL_FRACTION * k;
            vec![1.0, ki, ki]
        }
        2 => vec![1.0, 2.0 / 3.0 * k, 1.0 / 3.0 * k],
        other => {
            return Err(Error::InvalidInput(format!(
                "three_node has cases 1 and 2, got {other}"
            )))
        }
    };
    Ok(NetworkFile {
        agent: double_integrator_block(),
        graph: graph_block(&digraph::make_three_node_example()),
        gains: Some(gains),
        x0: Some(vec![2.0, -2.0, -7.0, 3.0, 1.0, -3.0]),
        sim: Some(SimBlock {
            t_end: Some(25.0),
            dt: Some(1e-3),
            tol: Some(1e-2),
        }),
    })
}

/// Unit-weight directed N-cycle of double integrators. Gains are left to
/// the caller (--k), initial states to the seeded default.
pub fn cycle(n: usize) -> Result<NetworkFile> {
    let g = digraph::make_cycle(n)?;
    Ok(NetworkFile {
        agent: double_integrator_block(),
        graph: graph_block(&g),
        gains: None,
        x0: None,
        sim: Some(SimBlock {
            t_end: Some(25.0),
            dt: Some(1e-3),
            tol: Some(1e-2),
        }),
    })
}

/// Twenty-node two-ring network: gain nu on the inner leading cycle
/// (vertices 1..=10), gain mu on the outer ring (11..=20). Initial states
/// come from the seeded default.
pub fn dodeca(nu: f64, mu: f64) -> Result<NetworkFile> {
    if !(nu > 0.0) || !(mu > 0.0) {
        return Err(Error::Domain(format!(
            "gains must be positive, got nu = {nu}, mu = {mu}"
        )));
    }
    let mut gains = vec![nu; 10];
    gains.extend(vec![mu; 10]);
    Ok(NetworkFile {
        agent: double_integrator_block(),
        graph: graph_block(&digraph::make_dodeca_example()),
        gains: Some(gains),
        x0: None,
        // the slowest mode at the published gains decays near 0.11/s, so a
        // 60 s horizon is needed for e to fall below the 1e-2 tolerance
        sim: Some(SimBlock {
            t_end: Some(60.0),
            dt: Some(1e-3),
            tol: Some(1e-2),
        }),
    })
}

/// Look up a preset by name with its optional parameters.
pub fn by_name(
    name: &str,
    n: Option<usize>,
    case: Option<u8>,
    nu: Option<f64>,
    mu: Option<f64>,
) -> Result<NetworkFile> {
    match name {
        "three_node" => three_node(case.unwrap_or(2)),
        "cycle" => cycle(n.ok_or_else(|| {
            Error::InvalidInput("preset cycle needs --n".into())
        })?),
        "dodeca" => dodeca(nu.unwrap_or(5.5), mu.unwrap_or(1.0)),
        other => Err(Error::InvalidInput(format!(
            "unknown preset '{other}' (expected three_node, cycle, or dodeca)"
        ))),
    }
}
