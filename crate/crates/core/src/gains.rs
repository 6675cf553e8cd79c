//! Consensus-gain criteria: sufficient spectral thresholds for identical and
//! nonidentical gains, the exact per-eigenvalue stability test, numerical
//! threshold search by bisection, the double-integrator closed forms, the
//! large-cycle asymptote, and the weighted-cycle hyperbola identity.

use num_complex::Complex64;

use crate::digraph::{self, WeightedDigraph};
use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::passify::{self, AgentModel};

/// Max-real-part band treated as "on the stability boundary"; strict decay
/// is required, so boundary verdicts count as not achieved.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Per-agent gain vector split into common magnitude and unit-sphere
/// direction: k_vec = k * k_prime with ||k_prime||_2 = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct GainAssignment {
    k_vec: Vec<f64>,
    k: f64,
    k_prime: Vec<f64>,
}

impl GainAssignment {
    pub fn new(k_vec: Vec<f64>) -> Result<Self> {
        if k_vec.is_empty() {
            return Err(Error::InvalidInput("gain vector is empty".into()));
        }
        if k_vec.iter().any(|&k| !(k > 0.0) || !k.is_finite()) {
            return Err(Error::Domain(
                "all gains must be strictly positive and finite".into(),
            ));
        }
        let k = k_vec.iter().map(|x| x * x).sum::<f64>().sqrt();
        let k_prime = k_vec.iter().map(|x| x / k).collect();
        Ok(Self { k_vec, k, k_prime })
    }

    pub fn identical(k: f64, n: usize) -> Result<Self> {
        Self::new(vec![k; n])
    }

    pub fn k_vec(&self) -> &[f64] {
        &self.k_vec
    }

    /// Common magnitude ||k_vec||_2.
    pub fn k(&self) -> f64 {
        self.k
    }

    /// Unit-sphere projection k_vec / ||k_vec||_2.
    pub fn k_prime(&self) -> &[f64] {
        &self.k_prime
    }
}

/// Outcome of the exact consensus test.
#[derive(Debug, Clone)]
pub struct ConsensusVerdict {
    /// True iff the tested closed loop is strictly stable (max real part
    /// below -[`BOUNDARY_TOL`]); boundary cases report false.
    pub achieved: bool,
    /// Largest real part over the tested block spectra.
    pub max_real_part: f64,
    /// Human-readable description of the deciding eigenvalue/block.
    pub witness: String,
}

fn require_spanning_tree(g: &WeightedDigraph) -> Result<()> {
    if !g.has_directed_spanning_tree() {
        return Err(Error::Topology(
            "digraph has no directed spanning tree".into(),
        ));
    }
    Ok(())
}

/// Nonzero eigenvalues of a gain-scaled Laplace matrix.
fn nonzero_spectrum(kl: &DenseMatrix) -> Result<Vec<Complex64>> {
    let mut eigs = linalg::eigenvalues(kl)?;
    linalg::sort_complex(&mut eigs);
    let tol = digraph::zero_eigenvalue_tol(kl);
    Ok(eigs.into_iter().filter(|z| z.norm() >= tol).collect())
}

/// Max real part over the spectra of the closed-loop blocks
/// A - lambda B g' C', one per supplied eigenvalue.
fn blocks_max_real_part(
    agent: &AgentModel,
    lambdas: &[Complex64],
) -> Result<(f64, String)> {
    let dyad = agent.feedback_dyad();
    // no coupling eigenvalues: the disagreement dynamics reduce to copies of A
    if lambdas.is_empty() {
        let eigs = linalg::eigenvalues(agent.a())?;
        let worst = eigs
            .iter()
            .max_by(|a, b| a.re.total_cmp(&b.re))
            .copied()
            .unwrap_or(Complex64::new(f64::NEG_INFINITY, 0.0));
        return Ok((worst.re, format!("open-loop eigenvalue {worst}")));
    }
    let mut max_re = f64::NEG_INFINITY;
    let mut witness = String::new();
    for &lambda in lambdas {
        let block = agent.a().sub(&dyad.scale(lambda))?;
        let eigs = linalg::eigenvalues(&block)?;
        for z in eigs {
            if z.re > max_re {
                max_re = z.re;
                witness = format!(
                    "block lambda = {:.6}{:+.6}i, eigenvalue {:.6}{:+.6}i",
                    lambda.re, lambda.im, z.re, z.im
                );
            }
        }
    }
    Ok((max_re, witness))
}

fn verdict_from_max(max_real_part: f64, witness: String) -> ConsensusVerdict {
    ConsensusVerdict {
        achieved: max_real_part < -BOUNDARY_TOL,
        max_real_part,
        witness,
    }
}

/// Sufficient identical gain threshold kappa_0 / r(L): every k strictly
/// above it achieves consensus.
pub fn sufficient_gain_identical(agent: &AgentModel, g: &WeightedDigraph) -> Result<f64> {
    require_spanning_tree(g)?;
    let kappa0 = passify::kappa0(agent)?;
    let rep = digraph::spectrum_report(g, None)?;
    let r = rep
        .r
        .ok_or_else(|| Error::Topology("Laplace spectrum has no nonzero eigenvalues".into()))?;
    Ok(kappa0 / r)
}

/// Sufficient common-gain threshold kappa_0 / r(K'L) for a unit-sphere gain
/// direction; the gain vector k * k_prime achieves consensus for every k
/// strictly above the returned value. Zero direction entries are allowed
/// only on vertices without outgoing arcs (their Laplace row vanishes).
pub fn sufficient_gain_nonidentical(
    agent: &AgentModel,
    g: &WeightedDigraph,
    k_prime: &[f64],
) -> Result<f64> {
    require_spanning_tree(g)?;
    let norm = k_prime.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "k' must lie on the unit sphere, got norm {norm}"
        )));
    }
    let kappa0 = passify::kappa0(agent)?;
    let rep = digraph::spectrum_report(g, Some(k_prime))?;
    let r = rep
        .r
        .ok_or_else(|| Error::Topology("scaled Laplace spectrum has no nonzero eigenvalues".into()))?;
    Ok(kappa0 / r)
}

/// Exact consensus test with a common gain k >= 0: consensus holds iff every
/// block A - k lambda_j B g' C' is Hurwitz, lambda_j ranging over the
/// nonzero Laplace eigenvalues with multiplicity.
pub fn exact_consensus_test_identical(
    agent: &AgentModel,
    g: &WeightedDigraph,
    k: f64,
) -> Result<ConsensusVerdict> {
    require_spanning_tree(g)?;
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::Domain(format!("gain k = {k} must be >= 0")));
    }
    let lambdas = nonzero_spectrum(&g.laplace_matrix())?;
    let scaled: Vec<Complex64> = lambdas.iter().map(|&z| z * k).collect();
    let (max_re, witness) = blocks_max_real_part(agent, &scaled)?;
    Ok(verdict_from_max(max_re, witness))
}

/// Exact consensus test with per-agent gains: blocks are built from the
/// nonzero eigenvalues of diag(gains) L.
pub fn exact_consensus_test(
    agent: &AgentModel,
    g: &WeightedDigraph,
    gains: &[f64],
) -> Result<ConsensusVerdict> {
    require_spanning_tree(g)?;
    let kl = g.scaled_laplace_matrix(gains)?;
    let lambdas = nonzero_spectrum(&kl)?;
    let (max_re, witness) = blocks_max_real_part(agent, &lambdas)?;
    Ok(verdict_from_max(max_re, witness))
}

const BISECTION_PRESAMPLES: usize = 32;

/// Numerical inverse of the exact identical-gain test: locate the gain where
/// the verdict flips inside [k_lo, k_hi]. The bracket must be false at k_lo
/// and true at k_hi; 32 pre-samples guard against non-monotone verdicts (no
/// global monotonicity claim is available for general agents).
pub fn threshold_bisection(
    agent: &AgentModel,
    g: &WeightedDigraph,
    k_lo: f64,
    k_hi: f64,
) -> Result<f64> {
    require_spanning_tree(g)?;
    if !(k_lo >= 0.0) || !(k_hi > k_lo) || !k_hi.is_finite() {
        return Err(Error::Bracket(format!(
            "need 0 <= k_lo < k_hi, got [{k_lo}, {k_hi}]"
        )));
    }
    // the Laplace spectrum is gain-independent here; factor it out of the probe
    let lambdas = nonzero_spectrum(&g.laplace_matrix())?;
    let probe = |k: f64| -> Result<bool> {
        let scaled: Vec<Complex64> = lambdas.iter().map(|&z| z * k).collect();
        let (max_re, _) = blocks_max_real_part(agent, &scaled)?;
        Ok(max_re < -BOUNDARY_TOL)
    };

    if probe(k_lo)? {
        return Err(Error::Bracket(format!(
            "consensus already achieved at k_lo = {k_lo}"
        )));
    }
    if !probe(k_hi)? {
        return Err(Error::Bracket(format!(
            "consensus not achieved at k_hi = {k_hi}"
        )));
    }

    // monotonicity guard over the bracket
    let mut last_true: Option<f64> = None;
    for i in 0..BISECTION_PRESAMPLES {
        let k = k_lo + (k_hi - k_lo) * (i as f64 + 1.0) / (BISECTION_PRESAMPLES as f64 + 1.0);
        let v = probe(k)?;
        if v {
            last_true = Some(k);
        } else if let Some(kt) = last_true {
            return Err(Error::Bracket(format!(
                "verdicts are not monotone in the bracket: true at k = {kt}, false at k = {k}"
            )));
        }
    }

    let (mut lo, mut hi) = (k_lo, k_hi);
    for _ in 0..200 {
        if hi - lo <= 1e-9 * k_hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if probe(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Exact gain threshold for N double integrators in a directed cycle:
/// 0.5 * cot^2(pi / N).
pub fn cycle_threshold(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::Domain(format!(
            "cycle threshold needs n >= 3, got {n}"
        )));
    }
    let cot = 1.0 / (std::f64::consts::PI / n as f64).tan();
    Ok(0.5 * cot * cot)
}

/// Exact gain threshold for double integrators on an arbitrary
/// spanning-tree digraph: max over nonzero Laplace eigenvalues of
/// sin^2(arg lambda) / Re lambda. Zero for a real spectrum (any k > 0
/// works).
pub fn general_threshold(spectrum: &[Complex64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &z in spectrum {
        if z.re <= 0.0 {
            return Err(Error::Domain(format!(
                "eigenvalue {z} has nonpositive real part"
            )));
        }
        // sin^2(arg z) = Im^2 / |z|^2
        let term = z.im * z.im / (z.norm_sqr() * z.re);
        worst = worst.max(term);
    }
    Ok(worst)
}

/// Ratio of the exact cycle threshold to its large-N asymptote
/// N^2 / (2 pi^2); tends to 1 from below as N grows.
pub fn asymptote_ratio(n: usize) -> Result<f64> {
    let exact = cycle_threshold(n)?;
    let asym = (n * n) as f64 / (2.0 * std::f64::consts::PI * std::f64::consts::PI);
    Ok(exact / asym)
}

/// Hyperbola identity on a unit-weight directed cycle: the products
/// k_i * v_i of gains with the left zero-eigenvector components of
/// diag(gains) L are all equal. True iff they agree within 1e-9 relative.
pub fn cycle_hyperbola_check(g: &WeightedDigraph, gains: &[f64]) -> Result<bool> {
    let n = g.n();
    if n < 2 || g.arcs().len() != n {
        return Err(Error::Domain("hyperbola identity needs a directed cycle".into()));
    }
    // every vertex has exactly one outgoing unit-weight arc and the
    // permutation closes a single n-cycle
    let mut next = vec![0usize; n + 1];
    for arc in g.arcs() {
        if next[arc.src] != 0 {
            return Err(Error::Domain("vertex with two outgoing arcs".into()));
        }
        if arc.weight != 1.0 {
            return Err(Error::Domain("hyperbola identity needs unit weights".into()));
        }
        next[arc.src] = arc.dst;
    }
    let mut seen = 1usize;
    let mut v = 1usize;
    while next[v] != 1 {
        v = next[v];
        if v == 0 || seen > n {
            return Err(Error::Domain("arcs do not close a single cycle".into()));
        }
        seen += 1;
    }
    if seen != n {
        return Err(Error::Domain("arcs do not close a single cycle".into()));
    }

    let kl = g.scaled_laplace_matrix(gains)?;
    let v_left = digraph::left_zero_eigenvector(&kl)?;
    let products: Vec<f64> = gains.iter().zip(&v_left).map(|(k, v)| k * v).collect();
    let mean = products.iter().sum::<f64>() / n as f64;
    Ok(products
        .iter()
        .all(|p| (p - mean).abs() <= 1e-9 * mean.abs().max(f64::MIN_POSITIVE)))
}
