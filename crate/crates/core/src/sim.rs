//! Closed-loop time-domain simulation of the relative-output feedback
//! network, disagreement measurement, consensus-vector prediction, and
//! convergence verdicts.
//!
//! The stacked dynamics are xdot = (I_N (x) A - (K L) (x) B g' C') x with
//! K = diag(gains), integrated by fixed-step RK4.

use crate::digraph::{self, WeightedDigraph};
use crate::error::{Error, Result};
use crate::gains::exact_consensus_test;
use crate::linalg::{self, DenseMatrix};
use crate::passify::AgentModel;

/// Overflow guard: runs whose state infinity-norm exceeds this abort with a
/// divergence error carrying the first-exceed time.
pub const DIVERGENCE_GUARD: f64 = 1e12;

/// Default convergence tolerance on the terminal disagreement e(t_end).
pub const DEFAULT_TOL_CONV: f64 = 1e-2;

/// One closed-loop network instance.
#[derive(Debug, Clone)]
pub struct NetworkSpec {
    pub agent: AgentModel,
    pub graph: WeightedDigraph,
    /// Per-agent gains k_i, all strictly positive.
    pub gains: Vec<f64>,
    /// Stacked initial state col(x_1, ..., x_N), length N * n.
    pub x0: Vec<f64>,
}

impl NetworkSpec {
    pub fn new(
        agent: AgentModel,
        graph: WeightedDigraph,
        gains: Vec<f64>,
        x0: Vec<f64>,
    ) -> Result<Self> {
        if gains.len() != graph.n() {
            return Err(Error::Dimension(format!(
                "expected {} gains, got {}",
                graph.n(),
                gains.len()
            )));
        }
        if gains.iter().any(|&k| !(k > 0.0) || !k.is_finite()) {
            return Err(Error::Domain("all gains must be strictly positive".into()));
        }
        let expect = graph.n() * agent.state_dim();
        if x0.len() != expect {
            return Err(Error::Dimension(format!(
                "x0 needs {} entries (N * n), got {}",
                expect,
                x0.len()
            )));
        }
        if x0.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("x0 entries must be finite".into()));
        }
        Ok(Self {
            agent,
            graph,
            gains,
            x0,
        })
    }

    pub fn agent_count(&self) -> usize {
        self.graph.n()
    }

    /// Closed-loop system matrix I (x) A - (K L) (x) B g' C' as a flat real
    /// row-major array of size (N n) x (N n).
    pub fn closed_loop_matrix(&self) -> Result<Vec<f64>> {
        let kl = self.graph.scaled_laplace_matrix(&self.gains)?;
        let m = linalg::kron(&DenseMatrix::identity(self.graph.n()), self.agent.a())
            .sub(&linalg::kron(&kl, &self.agent.feedback_dyad()))?;
        Ok(m.real_entries())
    }
}

/// Integration settings.
#[derive(Debug, Clone, Copy)]
pub struct SimOptions {
    pub t_end: f64,
    pub dt: f64,
    pub tol_conv: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            t_end: 25.0,
            dt: 1e-3,
            tol_conv: DEFAULT_TOL_CONV,
        }
    }
}

/// Time-domain trace of one closed-loop run.
#[derive(Debug, Clone)]
pub struct SimTrace {
    /// Time grid, one entry per recorded step (including t = 0).
    pub t: Vec<f64>,
    /// Stacked state per step, each of length N * n.
    pub states: Vec<Vec<f64>>,
    /// Disagreement e(t) = sum_i ||x_i - x_{i+1}||_2 per step.
    pub e: Vec<f64>,
    /// Predicted consensus vector c(t) per step, when the zero eigenvalue of
    /// K L is simple.
    pub c_pred: Option<Vec<Vec<f64>>>,
    /// e(t_end) < tol_conv.
    pub converged: bool,
    /// max_i ||x_i(t_end) - c(t_end)||_2, when c is available.
    pub final_error_to_c: Option<f64>,
}

fn disagreement(state: &[f64], n_agents: usize, dim: usize) -> f64 {
    (0..n_agents.saturating_sub(1))
        .map(|i| {
            let a = &state[i * dim..(i + 1) * dim];
            let b = &state[(i + 1) * dim..(i + 2) * dim];
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()
        })
        .sum()
}

fn matvec(m: &[f64], x: &[f64], out: &mut [f64]) {
    let n = x.len();
    for i in 0..n {
        let row = &m[i * n..(i + 1) * n];
        out[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
    }
}

/// Fixed-step RK4 integration of the closed loop. The step count is chosen
/// so the grid lands exactly on t_end; every step is recorded. Aborts with a
/// divergence error when the state exceeds the overflow guard.
pub fn simulate(spec: &NetworkSpec, opts: &SimOptions) -> Result<SimTrace> {
    if !(opts.t_end > 0.0) || !(opts.dt > 0.0) || opts.dt > opts.t_end {
        return Err(Error::InvalidInput(format!(
            "need 0 < dt <= t_end, got dt = {}, t_end = {}",
            opts.dt, opts.t_end
        )));
    }
    let n_agents = spec.agent_count();
    let dim = spec.agent.state_dim();
    let steps = (opts.t_end / opts.dt).round().max(1.0) as usize;
    let dt = opts.t_end / steps as f64;

    let m = spec.closed_loop_matrix()?;
    let size = n_agents * dim;

    // consensus-vector recursion c_{k+1} = exp(A dt) c_k, seeded with
    // (v' (x) I) x0 when the zero eigenvalue of K L is simple
    let kl = spec.graph.scaled_laplace_matrix(&spec.gains)?;
    let c_setup = match digraph::left_zero_eigenvector(&kl) {
        Ok(v) => {
            let mut c0 = vec![0.0; dim];
            for (i, &vi) in v.iter().enumerate() {
                for d in 0..dim {
                    c0[d] += vi * spec.x0[i * dim + d];
                }
            }
            let step_exp = linalg::expm(spec.agent.a(), dt)?.real_entries();
            Some((c0, step_exp))
        }
        Err(Error::Multiplicity(_)) => None,
        Err(e) => return Err(e),
    };

    let mut state = spec.x0.clone();
    let mut t_grid = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut e = Vec::with_capacity(steps + 1);
    let mut c_pred = c_setup.as_ref().map(|_| Vec::with_capacity(steps + 1));
    let mut c_now = c_setup.as_ref().map(|(c0, _)| c0.clone());

    let mut k1 = vec![0.0; size];
    let mut k2 = vec![0.0; size];
    let mut k3 = vec![0.0; size];
    let mut k4 = vec![0.0; size];
    let mut tmp = vec![0.0; size];

    for step in 0..=steps {
        let t = step as f64 * dt;
        t_grid.push(t);
        states.push(state.clone());
        e.push(disagreement(&state, n_agents, dim));
        if let (Some(list), Some(c)) = (c_pred.as_mut(), c_now.as_ref()) {
            list.push(c.clone());
        }
        if step == steps {
            break;
        }

        matvec(&m, &state, &mut k1);
        for i in 0..size {
            tmp[i] = state[i] + 0.5 * dt * k1[i];
        }
        matvec(&m, &tmp, &mut k2);
        for i in 0..size {
            tmp[i] = state[i] + 0.5 * dt * k2[i];
        }
        matvec(&m, &tmp, &mut k3);
        for i in 0..size {
            tmp[i] = state[i] + dt * k3[i];
        }
        matvec(&m, &tmp, &mut k4);
        for i in 0..size {
            state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if state.iter().any(|x| x.abs() > DIVERGENCE_GUARD) {
            return Err(Error::Diverged {
                t: (step + 1) as f64 * dt,
                guard: DIVERGENCE_GUARD,
            });
        }

        if let (Some((_, step_exp)), Some(c)) = (c_setup.as_ref(), c_now.as_mut()) {
            let mut next = vec![0.0; dim];
            matvec(step_exp, c, &mut next);
            *c = next;
        }
    }

    let converged = *e.last().unwrap() < opts.tol_conv;
    let final_error_to_c = c_pred.as_ref().map(|list| {
        let c_end = list.last().unwrap();
        let x_end = states.last().unwrap();
        (0..n_agents)
            .map(|i| {
                (0..dim)
                    .map(|d| {
                        let diff = x_end[i * dim + d] - c_end[d];
                        diff * diff
                    })
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    });

    Ok(SimTrace {
        t: t_grid,
        states,
        e,
        c_pred,
        converged,
        final_error_to_c,
    })
}

/// Predicted consensus vector c(t) = exp(A t) (v(K L)' (x) I_n) x0.
pub fn predicted_consensus(spec: &NetworkSpec, t: f64) -> Result<Vec<f64>> {
    let dim = spec.agent.state_dim();
    let kl = spec.graph.scaled_laplace_matrix(&spec.gains)?;
    let v = digraph::left_zero_eigenvector(&kl)?;
    let mut xi = vec![0.0; dim];
    for (i, &vi) in v.iter().enumerate() {
        for d in 0..dim {
            xi[d] += vi * spec.x0[i * dim + d];
        }
    }
    let e_at = linalg::expm(spec.agent.a(), t)?.real_entries();
    let mut c = vec![0.0; dim];
    matvec(&e_at, &xi, &mut c);
    Ok(c)
}

/// Post-run summary: terminal disagreement, distance to the predicted
/// consensus vector, and agreement with the exact spectral verdict.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub final_disagreement: f64,
    pub final_error_to_c: Option<f64>,
    pub exact_achieved: bool,
    /// True when the finite-horizon converged flag matches the exact test.
    pub agrees_with_exact_test: bool,
}

pub fn convergence_report(trace: &SimTrace, spec: &NetworkSpec) -> Result<ConvergenceReport> {
    let verdict = exact_consensus_test(&spec.agent, &spec.graph, &spec.gains)?;
    Ok(ConvergenceReport {
        final_disagreement: *trace.e.last().unwrap(),
        final_error_to_c: trace.final_error_to_c,
        exact_achieved: verdict.achieved,
        agrees_with_exact_test: verdict.achieved == trace.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::{make_cycle, make_three_node_example, WeightedDigraph};

    fn di() -> AgentModel {
        AgentModel::double_integrator()
    }

    /// Initial conditions of the worked three-node example.
    fn three_node_x0() -> Vec<f64> {
        vec![2.0, -2.0, -7.0, 3.0, 1.0, -3.0]
    }

    fn three_node_spec(gains: [f64; 3]) -> NetworkSpec {
        NetworkSpec::new(
            di(),
            make_three_node_example(),
            gains.to_vec(),
            three_node_x0(),
        )
        .unwrap()
    }

    #[test]
    fn three_node_nonidentical_gains_converge() {
        // k = 3/2 along the direction (2/3, 1/3); leader gain is irrelevant
        let spec = three_node_spec([1.0, 1.0, 0.5]);
        let trace = simulate(&spec, &SimOptions::default()).unwrap();
        assert!(trace.converged, "e(25) = {}", trace.e.last().unwrap());
        assert!(*trace.e.last().unwrap() < 1e-2);
        // every agent lands on c(25) = (2, 48)
        let c = predicted_consensus(&spec, 25.0).unwrap();
        assert!((c[0] - 2.0).abs() < 1e-9 && (c[1] - 48.0).abs() < 1e-9);
        let x_end = trace.states.last().unwrap();
        for i in 0..3 {
            assert!((x_end[2 * i] - 2.0).abs() < 1e-2);
            assert!((x_end[2 * i + 1] - 48.0).abs() < 1e-2);
        }
    }

    #[test]
    fn three_node_identical_gains_converge() {
        let k = 0.527 * 1.5;
        let spec = three_node_spec([1.0, k, k]);
        let trace = simulate(&spec, &SimOptions::default()).unwrap();
        assert!(trace.converged);
        assert!(trace.final_error_to_c.unwrap() < 1e-2);
    }

    #[test]
    fn below_threshold_cycle_does_not_converge() {
        // k = 0.15 < 1/6 on the 3-cycle
        let spec = NetworkSpec::new(
            di(),
            make_cycle(3).unwrap(),
            vec![0.15; 3],
            three_node_x0(),
        )
        .unwrap();
        let trace = simulate(&spec, &SimOptions::default()).unwrap();
        assert!(!trace.converged, "e(25) = {}", trace.e.last().unwrap());
    }

    #[test]
    fn single_agent_follows_matrix_exponential() {
        let g = WeightedDigraph::new(1, vec![]).unwrap();
        let spec = NetworkSpec::new(di(), g, vec![1.0], vec![1.5, -0.5]).unwrap();
        let opts = SimOptions {
            t_end: 2.0,
            ..Default::default()
        };
        let trace = simulate(&spec, &opts).unwrap();
        assert!(trace.e.iter().all(|&x| x == 0.0));
        // x(t) = exp(At) x0 = (x1, t*x1 + x2)
        let x_end = trace.states.last().unwrap();
        assert!((x_end[0] - 1.5).abs() < 1e-9);
        assert!((x_end[1] - (2.0 * 1.5 - 0.5)).abs() < 1e-9);
    }

    #[test]
    fn predicted_consensus_leader_case() {
        let spec = three_node_spec([1.0, 1.0, 0.5]);
        // leader S_1: c(t) = exp(At) x_1(0) = (2, 2t - 2)
        let c = predicted_consensus(&spec, 3.0).unwrap();
        assert!((c[0] - 2.0).abs() < 1e-12);
        assert!((c[1] - 4.0).abs() < 1e-12);
        // gain changes outside the leader leave c unchanged
        let spec2 = three_node_spec([1.0, 2.7, 0.9]);
        let c2 = predicted_consensus(&spec2, 3.0).unwrap();
        assert!((c[0] - c2[0]).abs() < 1e-12 && (c[1] - c2[1]).abs() < 1e-12);
    }

    #[test]
    fn predicted_consensus_identical_start() {
        // all agents at the same x0: c(t) = exp(At) x0 on any topology
        let x0 = [0.7, -1.3];
        let spec = NetworkSpec::new(
            di(),
            make_cycle(4).unwrap(),
            vec![1.0; 4],
            x0.repeat(4),
        )
        .unwrap();
        let c = predicted_consensus(&spec, 5.0).unwrap();
        assert!((c[0] - 0.7).abs() < 1e-12);
        assert!((c[1] - (5.0 * 0.7 - 1.3)).abs() < 1e-12);
    }

    #[test]
    fn consensus_subspace_is_invariant() {
        // x(0) = 1 (x) xi: relative outputs vanish, so u = 0 and every agent
        // follows exp(At) xi
        let xi = [1.2, 0.4];
        let spec = NetworkSpec::new(
            di(),
            make_three_node_example(),
            vec![1.0, 3.0, 0.8],
            xi.repeat(3),
        )
        .unwrap();
        let opts = SimOptions {
            t_end: 4.0,
            ..Default::default()
        };
        let trace = simulate(&spec, &opts).unwrap();
        assert!(trace.e.iter().all(|&x| x < 1e-9));
        let x_end = trace.states.last().unwrap();
        for i in 0..3 {
            assert!((x_end[2 * i] - 1.2).abs() < 1e-9);
            assert!((x_end[2 * i + 1] - (4.0 * 1.2 + 0.4)).abs() < 1e-9);
        }
    }

    #[test]
    fn rk4_order_of_accuracy() {
        let spec = NetworkSpec::new(
            di(),
            make_cycle(3).unwrap(),
            vec![0.5; 3],
            three_node_x0(),
        )
        .unwrap();
        let run = |dt: f64| {
            let opts = SimOptions {
                t_end: 2.0,
                dt,
                tol_conv: 1e-2,
            };
            simulate(&spec, &opts).unwrap().states.last().unwrap().clone()
        };
        let reference = run(0.01 / 8.0);
        let err = |dt: f64| {
            run(dt)
                .iter()
                .zip(&reference)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max)
        };
        let ratio = err(0.08) / err(0.04);
        assert!(
            (10.0..24.0).contains(&ratio),
            "RK4 halving ratio {ratio} (expected about 16)"
        );
    }

    #[test]
    fn divergence_guard_fires() {
        // open-loop unstable scalar agent: x(t) = e^t hits the guard near
        // t = ln(1e12) = 27.6
        let unstable = AgentModel::new(
            DenseMatrix::from_real(1, 1, &[1.0]).unwrap(),
            DenseMatrix::from_real(1, 1, &[1.0]).unwrap(),
            DenseMatrix::from_real(1, 1, &[1.0]).unwrap(),
            vec![1.0],
        )
        .unwrap();
        let g = WeightedDigraph::new(1, vec![]).unwrap();
        let spec = NetworkSpec::new(unstable, g, vec![1.0], vec![1.0]).unwrap();
        let opts = SimOptions {
            t_end: 40.0,
            dt: 1e-2,
            tol_conv: 1e-2,
        };
        match simulate(&spec, &opts) {
            Err(Error::Diverged { t, .. }) => {
                assert!((t - 27.63).abs() < 0.1, "first-exceed time {t}")
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn report_matches_exact_verdict() {
        let spec = three_node_spec([1.0, 1.0, 0.5]);
        let trace = simulate(&spec, &SimOptions::default()).unwrap();
        let report = convergence_report(&trace, &spec).unwrap();
        assert!(report.exact_achieved);
        assert!(report.agrees_with_exact_test);
        assert!(report.final_error_to_c.unwrap() < 10.0 * DEFAULT_TOL_CONV);

        let bad = NetworkSpec::new(
            di(),
            make_cycle(3).unwrap(),
            vec![0.15; 3],
            three_node_x0(),
        )
        .unwrap();
        let trace = simulate(&bad, &SimOptions::default()).unwrap();
        let report = convergence_report(&trace, &bad).unwrap();
        assert!(!report.exact_achieved);
        assert!(report.agrees_with_exact_test);
    }
}
