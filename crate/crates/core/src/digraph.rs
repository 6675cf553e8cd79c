//! Weighted digraph model: Laplace matrix construction, directed spanning
//! tree detection, Leading Set extraction via strongly connected components,
//! left zero-eigenvector computation, and spectral summaries.
//!
//! Arc (a, b) means agent a measures agent b, so b is a's neighbour. Vertex
//! indices are 1-based, matching the network file format.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};

/// Directed arc with a strictly positive weight; 1-based endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

/// Weighted digraph without self-loops; at most one arc per ordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDigraph {
    n: usize,
    arcs: Vec<Arc>,
}

impl WeightedDigraph {
    pub fn new(n: usize, arcs: Vec<(usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("digraph needs at least one vertex".into()));
        }
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::with_capacity(arcs.len());
        for (src, dst, weight) in arcs {
            if src == 0 || src > n || dst == 0 || dst > n {
                return Err(Error::InvalidInput(format!(
                    "arc ({src},{dst}) out of range for {n} vertices (indices are 1-based)"
                )));
            }
            if src == dst {
                return Err(Error::InvalidInput(format!("self-loop at vertex {src}")));
            }
            if !(weight > 0.0) || !weight.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "arc ({src},{dst}) weight {weight} must be strictly positive and finite"
                )));
            }
            if !seen.insert((src, dst)) {
                return Err(Error::InvalidInput(format!(
                    "duplicate arc ({src},{dst})"
                )));
            }
            out.push(Arc { src, dst, weight });
        }
        out.sort_by(|a, b| (a.src, a.dst).cmp(&(b.src, b.dst)));
        Ok(Self { n, arcs: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Out-neighbour adjacency list, 0-based, targets ascending.
    fn adjacency_list(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for arc in &self.arcs {
            adj[arc.src - 1].push(arc.dst - 1);
        }
        adj
    }

    /// Number of outgoing arcs of a 1-based vertex.
    pub fn out_degree(&self, vertex: usize) -> usize {
        self.arcs.iter().filter(|a| a.src == vertex).count()
    }

    /// Adjacency matrix with entry (i, j) = w(i+1, j+1).
    pub fn adjacency_matrix(&self) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(self.n, self.n);
        for arc in &self.arcs {
            a[(arc.src - 1, arc.dst - 1)] = Complex64::new(arc.weight, 0.0);
        }
        a
    }

    /// Laplace matrix diag(A 1) - A; row sums are exactly zero by
    /// construction.
    pub fn laplace_matrix(&self) -> DenseMatrix {
        let mut l = DenseMatrix::zeros(self.n, self.n);
        for arc in &self.arcs {
            let (i, j) = (arc.src - 1, arc.dst - 1);
            l[(i, j)] -= Complex64::new(arc.weight, 0.0);
            l[(i, i)] += Complex64::new(arc.weight, 0.0);
        }
        l
    }

    /// Laplace matrix row-scaled by per-vertex gains: diag(gains) * L. Gains
    /// must be nonnegative and may vanish only on vertices without outgoing
    /// arcs (their Laplace row is zero anyway).
    pub fn scaled_laplace_matrix(&self, gains: &[f64]) -> Result<DenseMatrix> {
        self.validate_gains(gains)?;
        let mut l = self.laplace_matrix();
        for i in 0..self.n {
            for j in 0..self.n {
                l[(i, j)] *= Complex64::new(gains[i], 0.0);
            }
        }
        Ok(l)
    }

    pub fn validate_gains(&self, gains: &[f64]) -> Result<()> {
        if gains.len() != self.n {
            return Err(Error::Dimension(format!(
                "expected {} gains, got {}",
                self.n,
                gains.len()
            )));
        }
        for (i, &k) in gains.iter().enumerate() {
            if !k.is_finite() || k < 0.0 {
                return Err(Error::Domain(format!(
                    "gain k_{} = {k} must be finite and nonnegative",
                    i + 1
                )));
            }
            if k == 0.0 && self.out_degree(i + 1) > 0 {
                return Err(Error::Domain(format!(
                    "gain k_{} = 0 on a vertex with outgoing arcs",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// Strongly connected components in a deterministic order (Tarjan over
    /// ascending vertex indices); each component's vertices are 1-based and
    /// sorted.
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency_list();
        let mut state = TarjanState {
            index: 0,
            stack: Vec::new(),
            on_stack: vec![false; self.n],
            idx: vec![None; self.n],
            low: vec![0; self.n],
            comps: Vec::new(),
        };
        for v in 0..self.n {
            if state.idx[v].is_none() {
                strongconnect(v, &adj, &mut state);
            }
        }
        let mut comps: Vec<Vec<usize>> = state
            .comps
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c.iter().map(|&v| v + 1).collect()
            })
            .collect();
        comps.sort_by_key(|c| c[0]);
        comps
    }

    /// True iff some vertex is reachable from every vertex along arc
    /// direction, i.e. the SCC condensation has exactly one sink component.
    pub fn has_directed_spanning_tree(&self) -> bool {
        self.sink_components().len() == 1
    }

    /// The Leading Set: the unique strongly connected component with no arcs
    /// leaving it. Requires a directed spanning tree.
    pub fn leading_set(&self) -> Result<Vec<usize>> {
        let sinks = self.sink_components();
        if sinks.len() != 1 {
            return Err(Error::Topology(format!(
                "digraph has {} closed components, so no directed spanning tree",
                sinks.len()
            )));
        }
        Ok(sinks.into_iter().next().unwrap())
    }

    fn sink_components(&self) -> Vec<Vec<usize>> {
        let comps = self.strongly_connected_components();
        let mut comp_of = vec![0usize; self.n];
        for (ci, comp) in comps.iter().enumerate() {
            for &v in comp {
                comp_of[v - 1] = ci;
            }
        }
        let mut has_exit = vec![false; comps.len()];
        for arc in &self.arcs {
            let (cs, cd) = (comp_of[arc.src - 1], comp_of[arc.dst - 1]);
            if cs != cd {
                has_exit[cs] = true;
            }
        }
        comps
            .into_iter()
            .enumerate()
            .filter(|(ci, _)| !has_exit[*ci])
            .map(|(_, c)| c)
            .collect()
    }
}

struct TarjanState {
    index: usize,
    stack: Vec<usize>,
    on_stack: Vec<bool>,
    idx: Vec<Option<usize>>,
    low: Vec<usize>,
    comps: Vec<Vec<usize>>,
}

fn strongconnect(v: usize, adj: &[Vec<usize>], state: &mut TarjanState) {
    state.idx[v] = Some(state.index);
    state.low[v] = state.index;
    state.index += 1;
    state.stack.push(v);
    state.on_stack[v] = true;

    for &w in &adj[v] {
        if state.idx[w].is_none() {
            strongconnect(w, adj, state);
            state.low[v] = state.low[v].min(state.low[w]);
        } else if state.on_stack[w] {
            state.low[v] = state.low[v].min(state.idx[w].unwrap());
        }
    }

    if state.low[v] == state.idx[v].unwrap() {
        let mut comp = Vec::new();
        loop {
            let w = state.stack.pop().expect("tarjan stack underflow");
            state.on_stack[w] = false;
            comp.push(w);
            if w == v {
                break;
            }
        }
        state.comps.push(comp);
    }
}

/// Classification tolerance for zero eigenvalues of a Laplace-type matrix.
pub fn zero_eigenvalue_tol(l: &DenseMatrix) -> f64 {
    1e-9 * l.max_abs().max(1.0)
}

/// Left eigenvector of a Laplace-type matrix at eigenvalue zero, normalized
/// to sum 1. Solved by anchoring one coordinate to 1 and solving the
/// remaining (n-1)-dimensional system; anchors are tried in ascending order
/// until the reduced system is solvable with a small residual, with inverse
/// iteration as a fallback.
pub fn left_zero_eigenvector(l: &DenseMatrix) -> Result<Vec<f64>> {
    if !l.is_square() {
        return Err(Error::Dimension("left eigenvector of non-square matrix".into()));
    }
    let n = l.rows();
    let tol = zero_eigenvalue_tol(l);
    let eigs = linalg::eigenvalues(l)?;
    let zero_mult = eigs.iter().filter(|z| z.norm() < tol).count();
    if zero_mult != 1 {
        return Err(Error::Multiplicity(zero_mult));
    }
    if n == 1 {
        return Ok(vec![1.0]);
    }

    for anchor in 0..n {
        if let Some(v) = anchored_solve(l, anchor) {
            if residual_ok(l, &v) {
                return Ok(normalize(v));
            }
        }
    }
    // fallback: inverse iteration on the transpose near eigenvalue zero
    let v = inverse_iteration(l)?;
    if !residual_ok(l, &v) {
        return Err(Error::NonConvergence {
            residual: residual_inf(l, &v),
            sweeps: 0,
        });
    }
    Ok(normalize(v))
}

fn anchored_solve(l: &DenseMatrix, anchor: usize) -> Option<Vec<f64>> {
    let n = l.rows();
    let m = n - 1;
    let keep: Vec<usize> = (0..n).filter(|&i| i != anchor).collect();
    // equations (v^T L)_i = 0 for i != anchor, with v_anchor = 1
    let mut sys = DenseMatrix::zeros(m, m);
    let mut rhs = vec![Complex64::new(0.0, 0.0); m];
    for (ei, &i) in keep.iter().enumerate() {
        for (uj, &j) in keep.iter().enumerate() {
            sys[(ei, uj)] = l[(j, i)];
        }
        rhs[ei] = -l[(anchor, i)];
    }
    let sol = linalg::solve_vec(&sys, &rhs).ok()?;
    let mut v = vec![0.0; n];
    v[anchor] = 1.0;
    for (uj, &j) in keep.iter().enumerate() {
        v[j] = sol[uj].re;
    }
    Some(v)
}

fn inverse_iteration(l: &DenseMatrix) -> Result<Vec<f64>> {
    let n = l.rows();
    let shift = 1e-10 * l.max_abs().max(1.0);
    let lt_shifted = {
        let mut m = l.transpose();
        for i in 0..n {
            m[(i, i)] += Complex64::new(shift, 0.0);
        }
        m
    };
    let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
    for _ in 0..100 {
        let y = linalg::solve_vec(&lt_shifted, &x)?;
        let norm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        x = y.iter().map(|z| z / norm).collect();
    }
    Ok(x.iter().map(|z| z.re).collect())
}

fn residual_inf(l: &DenseMatrix, v: &[f64]) -> f64 {
    let n = l.rows();
    (0..n)
        .map(|j| {
            (0..n)
                .map(|i| v[i] * l[(i, j)].re)
                .sum::<f64>()
                .abs()
        })
        .fold(0.0, f64::max)
}

fn residual_ok(l: &DenseMatrix, v: &[f64]) -> bool {
    let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    residual_inf(l, v) <= 1e-10 * l.max_abs().max(1.0) * vmax
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let sum: f64 = v.iter().sum();
    // the null vector of a Laplacian with simple zero has one sign; flip if
    // the solver returned the negative ray
    let sign = if sum < 0.0 { -1.0 } else { 1.0 };
    let sum = sum.abs().max(1e-300);
    let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for x in &mut v {
        *x = sign * *x / sum;
        if x.abs() < 1e-9 * vmax / sum {
            *x = 0.0;
        }
    }
    v
}

/// Spectral summary of a (gain-scaled) Laplace matrix.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    /// Eigenvalues sorted by (Re, Im).
    pub eigenvalues: Vec<Complex64>,
    /// Count of eigenvalues classified as zero.
    pub zero_multiplicity: usize,
    /// Minimum real part over nonzero eigenvalues; None when the spectrum is
    /// entirely zero.
    pub r: Option<f64>,
    /// Graph-theoretic directed-spanning-tree flag.
    pub has_spanning_tree: bool,
    /// Leading Set (1-based, ascending) when a spanning tree exists.
    pub leading_set: Option<Vec<usize>>,
    /// Left zero-eigenvector normalized to sum 1, when zero is simple.
    pub v_left: Option<Vec<f64>>,
}

/// Spectral report for diag(gains) * L (identity gains if absent).
pub fn spectrum_report(g: &WeightedDigraph, gains: Option<&[f64]>) -> Result<SpectrumReport> {
    let uniform = vec![1.0; g.n()];
    let gains = gains.unwrap_or(&uniform);
    let kl = g.scaled_laplace_matrix(gains)?;
    let mut eigenvalues = linalg::eigenvalues(&kl)?;
    linalg::sort_complex(&mut eigenvalues);
    let tol = zero_eigenvalue_tol(&kl);
    let zero_multiplicity = eigenvalues.iter().filter(|z| z.norm() < tol).count();
    let r = eigenvalues
        .iter()
        .filter(|z| z.norm() >= tol)
        .map(|z| z.re)
        .fold(None, |acc: Option<f64>, re| {
            Some(acc.map_or(re, |m| m.min(re)))
        });
    let has_spanning_tree = g.has_directed_spanning_tree();
    let leading_set = if has_spanning_tree {
        Some(g.leading_set()?)
    } else {
        None
    };
    let v_left = if zero_multiplicity == 1 {
        Some(left_zero_eigenvector(&kl)?)
    } else {
        None
    };
    Ok(SpectrumReport {
        eigenvalues,
        zero_multiplicity,
        r,
        has_spanning_tree,
        leading_set,
        v_left,
    })
}

/// Unit-weight directed cycle S_1 -> S_2 -> ... -> S_n -> S_1 (arc (i, i+1)
/// means S_i measures S_{i+1}).
pub fn make_cycle(n: usize) -> Result<WeightedDigraph> {
    if n < 2 {
        return Err(Error::InvalidInput("cycle needs at least 2 vertices".into()));
    }
    let arcs = (1..=n).map(|i| (i, i % n + 1, 1.0)).collect();
    WeightedDigraph::new(n, arcs)
}

/// Twenty-node example: an inner directed 10-cycle S_1..S_10 (the Leading
/// Set) plus an outer ring S_11..S_20 where each outer vertex measures its
/// inner partner and the next outer vertex. This is a documented convention
/// satisfying the required properties, not a claim about any particular
/// drawing.
pub fn make_dodeca_example() -> WeightedDigraph {
    let mut arcs = Vec::with_capacity(30);
    for i in 1..=10 {
        arcs.push((i, i % 10 + 1, 1.0));
        arcs.push((10 + i, i, 1.0));
        arcs.push((10 + i, 10 + (i % 10) + 1, 1.0));
    }
    WeightedDigraph::new(20, arcs).expect("static topology is valid")
}

/// The three-node digraph used throughout the worked examples: S_2 measures
/// S_1; S_3 measures S_1 and S_2; S_1 is the leader.
pub fn make_three_node_example() -> WeightedDigraph {
    WeightedDigraph::new(3, vec![(2, 1, 1.0), (3, 2, 1.0), (3, 1, 1.0)])
        .expect("static topology is valid")
}
