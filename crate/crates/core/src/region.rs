//! Gain-region geometry: the map h(k') = kappa_0 / r(K'L) * k' on the
//! positive unit sphere traces a subset of the sufficient-region boundary.
//! This module samples that hypersurface, locates extrema of its distance to
//! the origin, and emits the closed-form polar boundary of the three-node
//! leader example.

use crate::digraph::{self, WeightedDigraph};
use crate::error::{Error, Result};
use crate::passify::{self, AgentModel};

/// One point of the sufficient-boundary hypersurface.
#[derive(Debug, Clone)]
pub struct BoundarySample {
    /// Unit-sphere direction; the dropped leader coordinate (if any) is zero.
    pub k_prime: Vec<f64>,
    /// kappa_0 / r(K'L); equals ||h(k')||_2 since k' has unit norm.
    pub radius: f64,
    /// Boundary point radius * k_prime.
    pub point: Vec<f64>,
    /// (gamma, rho) polar pair when exactly two coordinates are active:
    /// gamma = atan2(second, first), rho = radius.
    pub polar: Option<(f64, f64)>,
}

/// Boundary sweep result with the h_rho extrema over the grid.
#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    pub samples: Vec<BoundarySample>,
    pub min_index: usize,
    pub max_index: usize,
    /// Leader vertex (1-based) whose gain coordinate was dropped from the
    /// sphere parameterization, reported as zero in every sample.
    pub reduced_vertex: Option<usize>,
}

/// Closed-form polar boundary point of the three-node leader example.
#[derive(Debug, Clone, Copy)]
pub struct PolarSample {
    pub delta: f64,
    pub gamma: f64,
    pub rho: f64,
}

/// Evaluate the boundary map at one unit-sphere direction. Coordinates must
/// stay at or above `eps`, except that vertices without outgoing arcs may
/// carry an exact zero (their gain does not enter K'L).
pub fn boundary_sample(
    agent: &AgentModel,
    g: &WeightedDigraph,
    k_prime: &[f64],
    eps: f64,
) -> Result<BoundarySample> {
    let kappa0 = passify::kappa0(agent)?;
    boundary_sample_inner(kappa0, g, k_prime, eps)
}

fn boundary_sample_inner(
    kappa0: f64,
    g: &WeightedDigraph,
    k_prime: &[f64],
    eps: f64,
) -> Result<BoundarySample> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps = {eps} must be positive")));
    }
    if k_prime.len() != g.n() {
        return Err(Error::Dimension(format!(
            "k' needs {} coordinates, got {}",
            g.n(),
            k_prime.len()
        )));
    }
    if !g.has_directed_spanning_tree() {
        return Err(Error::Topology("digraph has no directed spanning tree".into()));
    }
    let norm = k_prime.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "k' must lie on the unit sphere, got norm {norm}"
        )));
    }
    for (i, &x) in k_prime.iter().enumerate() {
        let exempt = x == 0.0 && g.out_degree(i + 1) == 0;
        if x < eps && !exempt {
            return Err(Error::Domain(format!(
                "k'_{} = {x} below eps = {eps}",
                i + 1
            )));
        }
    }
    let rep = digraph::spectrum_report(g, Some(k_prime))?;
    let r = rep
        .r
        .ok_or_else(|| Error::Topology("scaled Laplace spectrum has no nonzero eigenvalues".into()))?;
    let radius = kappa0 / r;
    let point: Vec<f64> = k_prime.iter().map(|x| radius * x).collect();
    let active: Vec<usize> = (0..k_prime.len()).filter(|&i| k_prime[i] != 0.0).collect();
    let polar = if active.len() == 2 {
        Some((
            k_prime[active[1]].atan2(k_prime[active[0]]),
            radius,
        ))
    } else {
        None
    };
    Ok(BoundarySample {
        k_prime: k_prime.to_vec(),
        radius,
        point,
        polar,
    })
}

fn default_samples_per_dim(n_eff: usize) -> usize {
    match n_eff {
        2 => 400,
        3 => 64,
        4 => 16,
        _ => 8,
    }
}

/// Sweep a deterministic angular grid over the clipped sphere part and map
/// every direction through the boundary map. When the Leading Set is a
/// single vertex the sweep runs in the remaining N-1 gain coordinates (the
/// leader's gain never enters K'L) and that coordinate is emitted as zero.
///
/// `samples_per_dim` points are placed per angular dimension (defaults:
/// 400 for two effective coordinates, 64 for three, coarser above).
pub fn trace_boundary(
    agent: &AgentModel,
    g: &WeightedDigraph,
    eps: f64,
    samples_per_dim: Option<usize>,
) -> Result<BoundaryTrace> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain(format!("eps = {eps} must be in (0, 0.5)")));
    }
    if !g.has_directed_spanning_tree() {
        return Err(Error::Topology("digraph has no directed spanning tree".into()));
    }
    let kappa0 = passify::kappa0(agent)?;

    let leading = g.leading_set()?;
    let reduced_vertex = if leading.len() == 1 {
        Some(leading[0])
    } else {
        None
    };
    let active: Vec<usize> = (1..=g.n())
        .filter(|v| Some(*v) != reduced_vertex)
        .collect();
    let n_eff = active.len();
    if n_eff < 2 {
        return Err(Error::Domain(
            "boundary tracing needs at least two effective gain coordinates".into(),
        ));
    }
    let per_dim = samples_per_dim.unwrap_or_else(|| default_samples_per_dim(n_eff));
    if per_dim < 2 {
        return Err(Error::InvalidInput("need at least 2 samples per dimension".into()));
    }

    let angles = n_eff - 1;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let theta = |i: usize| (i as f64 + 0.5) * half_pi / per_dim as f64;

    let mut samples = Vec::new();
    let mut index = vec![0usize; angles];
    loop {
        // hyperspherical coordinates on the positive orthant
        let mut coords = vec![0.0f64; n_eff];
        let mut sin_prod = 1.0;
        for (d, &i) in index.iter().enumerate() {
            let t = theta(i);
            coords[d] = sin_prod * t.cos();
            sin_prod *= t.sin();
        }
        coords[n_eff - 1] = sin_prod;

        if coords.iter().all(|&x| x >= eps) {
            let mut k_prime = vec![0.0f64; g.n()];
            for (slot, &vertex) in active.iter().enumerate() {
                k_prime[vertex - 1] = coords[slot];
            }
            // renormalize against accumulated rounding
            let norm = k_prime.iter().map(|x| x * x).sum::<f64>().sqrt();
            for x in &mut k_prime {
                *x /= norm;
            }
            samples.push(boundary_sample_inner(kappa0, g, &k_prime, eps)?);
        }

        // odometer increment over the angle grid
        let mut d = 0;
        loop {
            index[d] += 1;
            if index[d] < per_dim {
                break;
            }
            index[d] = 0;
            d += 1;
            if d == angles {
                break;
            }
        }
        if d == angles {
            break;
        }
    }

    if samples.len() < 2 {
        return Err(Error::Domain(format!(
            "clipped sphere part S_eps is empty at eps = {eps} with {per_dim} samples per dimension"
        )));
    }
    let min_index = samples
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.radius.total_cmp(&b.1.radius))
        .unwrap()
        .0;
    let max_index = samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.radius.total_cmp(&b.1.radius))
        .unwrap()
        .0;
    Ok(BoundaryTrace {
        samples,
        min_index,
        max_index,
        reduced_vertex,
    })
}

/// Closed-form boundary of the three-node leader example in the paper's
/// simplex parameterization k_2' = delta, k_3' = 1 - delta: the angle is
/// gamma(delta) = atan((1-delta)/delta) and the scale factor is
/// rho(delta) = kappa_0 / min(delta, 2 - 2 delta).
pub fn three_node_polar(
    agent: &AgentModel,
    eps: f64,
    samples: usize,
) -> Result<Vec<PolarSample>> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain(format!("eps = {eps} must be in (0, 0.5)")));
    }
    if samples < 2 {
        return Err(Error::InvalidInput("need at least 2 samples".into()));
    }
    let kappa0 = passify::kappa0(agent)?;
    let mut out = Vec::with_capacity(samples);
    for i in 0..samples {
        let delta = eps + (1.0 - 2.0 * eps) * i as f64 / (samples - 1) as f64;
        out.push(PolarSample {
            delta,
            gamma: ((1.0 - delta) / delta).atan(),
            rho: kappa0 / delta.min(2.0 - 2.0 * delta),
        });
    }
    Ok(out)
}

/// Re-projection of a reduced two-coordinate direction onto the simplex:
/// delta = k_2' / (k_2' + k_3').
pub fn simplex_delta(sample: &BoundarySample) -> Option<f64> {
    let active: Vec<f64> = sample
        .k_prime
        .iter()
        .copied()
        .filter(|&x| x != 0.0)
        .collect();
    if active.len() != 2 {
        return None;
    }
    Some(active[0] / (active[0] + active[1]))
}
