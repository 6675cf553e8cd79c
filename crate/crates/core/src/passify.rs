//! Agent-level passifiability analysis: numerator/denominator of the scalar
//! transfer function g' C' (sI - A)^{-1} B, the hyper-minimum-phase test
//! (assumption A1), and the passification constant kappa_0 that enters every
//! sufficient gain threshold.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::poly::{routh_hurwitz, Polynomial};

/// SIMO agent: real matrices A (n x n), B (n x 1), C (n x l) and the output
/// mixing vector g (length l).
#[derive(Debug, Clone, PartialEq)]
pub struct AgentModel {
    a: DenseMatrix,
    b: DenseMatrix,
    c: DenseMatrix,
    g: Vec<f64>,
}

impl AgentModel {
    pub fn new(a: DenseMatrix, b: DenseMatrix, c: DenseMatrix, g: Vec<f64>) -> Result<Self> {
        let n = a.rows();
        if n == 0 || !a.is_square() {
            return Err(Error::Dimension(format!(
                "A must be square and nonempty, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if b.rows() != n || b.cols() != 1 {
            return Err(Error::Dimension(format!(
                "B must be {n}x1, got {}x{}",
                b.rows(),
                b.cols()
            )));
        }
        let l = c.cols();
        if c.rows() != n || l == 0 {
            return Err(Error::Dimension(format!(
                "C must be {n}xl with l >= 1, got {}x{}",
                c.rows(),
                c.cols()
            )));
        }
        if g.len() != l {
            return Err(Error::Dimension(format!(
                "g must have length {l}, got {}",
                g.len()
            )));
        }
        for m in [&a, &b, &c] {
            if !m.is_real(0.0) {
                return Err(Error::InvalidInput("agent matrices must be real".into()));
            }
        }
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("g entries must be finite".into()));
        }
        Ok(Self { a, b, c, g })
    }

    /// Double integrator with blended position/velocity output:
    /// A = [[0,0],[1,0]], B = (2,0), C = (0.5,0.5), g = 1. Its transfer
    /// function is (s+1)/s^2.
    pub fn double_integrator() -> Self {
        Self::new(
            DenseMatrix::from_real(2, 2, &[0.0, 0.0, 1.0, 0.0]).unwrap(),
            DenseMatrix::from_real(2, 1, &[2.0, 0.0]).unwrap(),
            DenseMatrix::from_real(2, 1, &[0.5, 0.5]).unwrap(),
            vec![1.0],
        )
        .unwrap()
    }

    pub fn state_dim(&self) -> usize {
        self.a.rows()
    }

    pub fn output_dim(&self) -> usize {
        self.c.cols()
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &DenseMatrix {
        &self.b
    }

    pub fn c(&self) -> &DenseMatrix {
        &self.c
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    /// Row vector g' C' (1 x n).
    pub fn gc_row(&self) -> DenseMatrix {
        let g = DenseMatrix::from_real(1, self.g.len(), &self.g).unwrap();
        g.matmul(&self.c.transpose()).unwrap()
    }

    /// Feedback dyad B g' C' (n x n); the closed-loop per-eigenvalue block is
    /// A - k lambda B g' C'.
    pub fn feedback_dyad(&self) -> DenseMatrix {
        self.b.matmul(&self.gc_row()).unwrap()
    }
}

/// Outcome of the passifiability analysis of one agent.
#[derive(Debug, Clone)]
pub struct PassifyReport {
    /// Numerator of g' chi(s), ascending coefficients.
    pub numerator: Polynomial,
    /// Characteristic polynomial of A, ascending coefficients.
    pub denominator: Polynomial,
    /// Assumption A1: numerator of degree n-1, positive coefficients, Hurwitz.
    pub is_hmp: bool,
    /// Passification constant, present iff `is_hmp`; clamped to zero when the
    /// frequency sweep is negative everywhere.
    pub kappa0: Option<f64>,
    /// True when the supremum was negative (agent already strictly passive)
    /// and kappa0 was clamped to zero.
    pub already_passive: bool,
}

/// Numerator and denominator of g' chi(s) = g' C' (sI - A)^{-1} B as a
/// rational function, via the Faddeev-LeVerrier recursion. The result is
/// cross-checked by resolvent linear solves at random sample points
/// (relative residual below 1e-8; points colliding with eigenvalues of A are
/// resampled).
pub fn transfer_numerator(agent: &AgentModel) -> Result<(Polynomial, Polynomial)> {
    let n = agent.state_dim();
    let a = agent.a();
    let gc = agent.gc_row();

    // Faddeev-LeVerrier: den(s) = s^n + c_{n-1} s^{n-1} + ... + c_0 and
    // adj(sI - A) = sum_k N_k s^{n-k}, so the numerator coefficient of
    // s^{n-k} is g' C' N_k B.
    let mut den = vec![Complex64::new(0.0, 0.0); n + 1];
    den[n] = Complex64::new(1.0, 0.0);
    let mut num = vec![Complex64::new(0.0, 0.0); n];
    let mut nk = DenseMatrix::identity(n);
    for k in 1..=n {
        if k > 1 {
            // N_k = A N_{k-1} + c_{n-k+1} I
            let prev_c = den[n - k + 1];
            nk = a.matmul(&nk)?;
            for i in 0..n {
                nk[(i, i)] += prev_c;
            }
        }
        num[n - k] = gc.matmul(&nk)?.matmul(agent.b())?[(0, 0)];
        den[n - k] = -(a.matmul(&nk)?.trace()?) / k as f64;
    }
    let num = Polynomial::new(num);
    let den = Polynomial::new(den);

    verify_by_sampling(agent, &num, &den)?;
    Ok((num, den))
}

fn verify_by_sampling(agent: &AgentModel, num: &Polynomial, den: &Polynomial) -> Result<()> {
    let n = agent.state_dim();
    let a = agent.a();
    let gc = agent.gc_row();
    let radius = 1.0 + a.norm_one();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7023_1f5e);
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < 10 {
        attempts += 1;
        if attempts > 200 {
            return Err(Error::NonConvergence {
                residual: f64::NAN,
                sweeps: attempts,
            });
        }
        let s = Complex64::new(
            radius * rng.gen_range(-1.0..1.0f64),
            radius * rng.gen_range(-1.0..1.0f64),
        );
        let den_val = den.eval(s);
        if den_val.norm() < 1e-6 * radius.powi(n as i32) {
            continue; // too close to an eigenvalue of A; resample
        }
        // direct resolvent: solve (sI - A) x = B
        let mut si_a = a.scale_real(-1.0);
        for i in 0..n {
            si_a[(i, i)] += s;
        }
        let x = match linalg::solve(&si_a, agent.b()) {
            Ok(x) => x,
            Err(_) => continue,
        };
        let direct = gc.matmul(&x)?[(0, 0)];
        let rational = num.eval(s) / den_val;
        let err = (rational - direct).norm();
        if err > 1e-8 * (1.0 + direct.norm()) {
            return Err(Error::NonConvergence {
                residual: err,
                sweeps: attempts,
            });
        }
        accepted += 1;
    }
    Ok(())
}

/// Assumption A1: g' chi(s) is hyper-minimum-phase, i.e. the numerator has
/// degree n-1, strictly positive coefficients, and is Hurwitz.
pub fn is_hyper_minimum_phase(agent: &AgentModel) -> Result<bool> {
    let (num, _den) = transfer_numerator(agent)?;
    hmp_from_numerator(agent.state_dim(), &num)
}

fn hmp_from_numerator(n: usize, num: &Polynomial) -> Result<bool> {
    if num.is_zero() || num.degree() != n - 1 {
        return Ok(false);
    }
    let scale = num.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let coeffs = match num.real_coeffs(1e-9 * scale.max(1.0)) {
        Ok(c) => c,
        Err(_) => return Ok(false),
    };
    if coeffs.iter().any(|&c| c <= 0.0) {
        return Ok(false);
    }
    if num.degree() == 0 {
        return Ok(true); // positive constant: no roots
    }
    routh_hurwitz(num)
}

const OMEGA_GRID_POINTS: usize = 600;
const OMEGA_LOG_MIN: f64 = -6.0;
const OMEGA_LOG_MAX: f64 = 6.0;

/// Passification constant kappa_0 = sup over omega >= 0 of
/// -Re[(g' chi(i omega))^{-1}], including the omega -> infinity limit from
/// polynomial division (the relative degree is 1 under A1, so the limit is
/// finite). A negative supremum means the agent is already strictly passive
/// and is clamped to zero. Absolute accuracy: 1e-6.
///
/// The sign convention is fixed by the strict-passivity frequency condition
/// Re[kappa + (g' chi(i omega))^{-1}] > 0 for every kappa > kappa_0.
pub fn kappa0(agent: &AgentModel) -> Result<f64> {
    let report = passify_report(agent)?;
    report
        .kappa0
        .ok_or_else(|| Error::Passifiability("kappa0 requires a hyper-minimum-phase agent".into()))
}

/// Full analysis: transfer polynomials, the A1 verdict, and kappa_0 when A1
/// holds. Unlike [`kappa0`], a non-HMP agent yields a report with
/// `is_hmp = false` instead of an error, so analysis front ends can print
/// the verdict.
pub fn passify_report(agent: &AgentModel) -> Result<PassifyReport> {
    let (num, den) = transfer_numerator(agent)?;
    let is_hmp = hmp_from_numerator(agent.state_dim(), &num)?;
    if !is_hmp {
        return Ok(PassifyReport {
            numerator: num,
            denominator: den,
            is_hmp: false,
            kappa0: None,
            already_passive: false,
        });
    }

    let phi = |omega: f64| -> f64 {
        let s = Complex64::new(0.0, omega);
        -(den.eval(s) / num.eval(s)).re
    };

    // coarse sweep: omega = 0 plus a logarithmic grid
    let grid_omega = |i: usize| -> f64 {
        let t = i as f64 / (OMEGA_GRID_POINTS - 1) as f64;
        10f64.powf(OMEGA_LOG_MIN + t * (OMEGA_LOG_MAX - OMEGA_LOG_MIN))
    };
    let mut best_idx = 0usize; // slot 0 is omega = 0
    let mut best_val = phi(0.0);
    for i in 0..OMEGA_GRID_POINTS {
        let val = phi(grid_omega(i));
        if val > best_val {
            best_val = val;
            best_idx = i + 1;
        }
    }
    // golden-section refinement around the grid argmax
    let refined = if best_idx == 0 {
        golden_max(&phi, 0.0, grid_omega(0))
    } else {
        let i = best_idx - 1;
        let lo = if i == 0 { 0.0 } else { grid_omega(i - 1) };
        let hi = grid_omega((i + 1).min(OMEGA_GRID_POINTS - 1));
        golden_max(&phi, lo, hi)
    }
    .max(best_val);

    // omega -> infinity limit: 1/W(i omega) ~ q(i omega) with q = den / num,
    // whose linear term is imaginary on the axis, so Re -> Re(q_0)
    let (quot, _rem) = den.div_rem(&num)?;
    let limit = -quot.coeffs()[0].re;

    let sup = refined.max(limit);
    let already_passive = sup < 0.0;
    Ok(PassifyReport {
        numerator: num,
        denominator: den,
        is_hmp: true,
        kappa0: Some(if already_passive { 0.0 } else { sup }),
        already_passive,
    })
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..120 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    f(0.5 * (lo + hi)).max(f1).max(f2)
}
