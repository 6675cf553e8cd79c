//! Eigenvalues of dense complex matrices: Householder reduction to upper
//! Hessenberg form followed by implicit single-shift QR with Wilkinson
//! shifts. Complex arithmetic throughout, so real matrices with complex
//! conjugate pairs need no double-shift machinery.

use num_complex::Complex64;

use super::DenseMatrix;
use crate::error::{Error, Result};

/// Subdiagonal deflation tolerance (relative to neighbouring diagonal
/// magnitudes).
const DEFLATE_TOL: f64 = 1e-12;

/// Sweep budget per matrix: 100 * n.
const SWEEPS_PER_DIM: usize = 100;

/// Eigenvalues of a square matrix, with multiplicity, in no particular
/// order. Consumers sort with [`super::sort_complex`] before comparing.
pub fn eigenvalues(m: &DenseMatrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eigenvalues of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    match n {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![m[(0, 0)]]),
        2 => {
            let (e1, e2) = eig2(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
            return Ok(vec![e1, e2]);
        }
        _ => {}
    }
    let mut h = m.clone();
    hessenberg(&mut h);
    qr_hessenberg(&mut h)
}

/// In-place Householder similarity reduction to upper Hessenberg form.
fn hessenberg(h: &mut DenseMatrix) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        // reflect column k below the subdiagonal onto the subdiagonal entry
        let m = n - k - 1;
        let mut v: Vec<Complex64> = (0..m).map(|i| h[(k + 1 + i, k)]).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;
        v[0] -= alpha;
        let vnorm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sqr == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm_sqr;

        // left: rows k+1..n, columns k..n
        for j in k..n {
            let s: Complex64 = (0..m).map(|i| v[i].conj() * h[(k + 1 + i, j)]).sum();
            let s = s * beta;
            for i in 0..m {
                let delta = s * v[i];
                h[(k + 1 + i, j)] -= delta;
            }
        }
        // right: columns k+1..n, all rows
        for i in 0..n {
            let s: Complex64 = (0..m).map(|j| h[(i, k + 1 + j)] * v[j]).sum();
            let s = s * beta;
            for j in 0..m {
                let delta = s * v[j].conj();
                h[(i, k + 1 + j)] -= delta;
            }
        }
        h[(k + 1, k)] = alpha;
        for i in (k + 2)..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Shifted QR iteration on an upper Hessenberg matrix; deflates eigenvalues
/// from the bottom-right corner.
fn qr_hessenberg(h: &mut DenseMatrix) -> Result<Vec<Complex64>> {
    let n = h.rows();
    let hnorm = h.norm_one().max(f64::MIN_POSITIVE);
    let max_sweeps = SWEEPS_PER_DIM * n;
    let mut sweeps = 0usize;
    let mut since_deflate = 0usize;
    let mut eigs = Vec::with_capacity(n);
    let mut active_hi = Some(n - 1);

    while let Some(hi) = active_hi {
        if hi == 0 {
            eigs.push(h[(0, 0)]);
            break;
        }
        // locate the start of the irreducible trailing block
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut thresh = DEFLATE_TOL * (h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm());
            if thresh == 0.0 {
                thresh = DEFLATE_TOL * hnorm;
            }
            if sub <= thresh {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }

        if lo == hi {
            eigs.push(h[(hi, hi)]);
            active_hi = Some(hi - 1);
            since_deflate = 0;
            continue;
        }
        if lo + 1 == hi {
            let (e1, e2) = eig2(h[(lo, lo)], h[(lo, hi)], h[(hi, lo)], h[(hi, hi)]);
            eigs.push(e1);
            eigs.push(e2);
            active_hi = if lo == 0 { None } else { Some(lo - 1) };
            since_deflate = 0;
            continue;
        }

        if sweeps >= max_sweeps {
            let residual = (lo + 1..=hi)
                .map(|i| h[(i, i - 1)].norm())
                .fold(f64::INFINITY, f64::min);
            return Err(Error::NonConvergence { residual, sweeps });
        }
        sweeps += 1;
        since_deflate += 1;

        let shift = if since_deflate % 16 == 0 {
            // exceptional shift to break limit cycles
            let kick = h[(hi, hi - 1)].norm() + h[(hi - 1, hi - 2)].norm();
            h[(hi, hi)] + Complex64::new(0.75 * kick, 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        qr_sweep(h, lo, hi, shift);
    }
    Ok(eigs)
}

/// One implicit single-shift bulge chase on rows/columns `lo..=hi`.
fn qr_sweep(h: &mut DenseMatrix, lo: usize, hi: usize, shift: Complex64) {
    let mut x = h[(lo, lo)] - shift;
    let mut y = h[(lo + 1, lo)];
    for k in lo..hi {
        let (a, b) = givens(x, y);
        // left rotation on rows k, k+1
        let col_start = if k > lo { k - 1 } else { lo };
        for j in col_start..=hi {
            let p = h[(k, j)];
            let q = h[(k + 1, j)];
            h[(k, j)] = a.conj() * p + b.conj() * q;
            h[(k + 1, j)] = -b * p + a * q;
        }
        // right rotation on columns k, k+1
        let row_end = hi.min(k + 2);
        for i in lo..=row_end {
            let p = h[(i, k)];
            let q = h[(i, k + 1)];
            h[(i, k)] = a * p + b * q;
            h[(i, k + 1)] = -b.conj() * p + a.conj() * q;
        }
        if k + 1 < hi {
            x = h[(k + 1, k)];
            y = h[(k + 2, k)];
        }
    }
}

/// Unitary rotation parameters (a, b) with |a|^2 + |b|^2 = 1 such that
/// conj(a) f + conj(b) g = r and -b f + a g = 0.
fn givens(f: Complex64, g: Complex64) -> (Complex64, Complex64) {
    let denom = (f.norm_sqr() + g.norm_sqr()).sqrt();
    if denom == 0.0 {
        return (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    }
    (f / denom, g / denom)
}

/// Eigenvalues of [[a, b], [c, d]] by the complex quadratic formula; uses the
/// product relation for the smaller root when possible.
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let mean = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (mean * mean - det).sqrt();
    let e1 = mean + disc;
    let e2 = mean - disc;
    if e1.norm() >= e2.norm() && e1.norm() > 0.0 {
        (e1, det / e1)
    } else if e2.norm() > 0.0 {
        (det / e2, e2)
    } else {
        (e1, e2)
    }
}

/// Wilkinson shift: eigenvalue of the trailing 2x2 block closer to its
/// bottom-right entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let (e1, e2) = eig2(a, b, c, d);
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}
