//! Polynomials over the complex numbers plus the two stability tests used by
//! the consensus criteria: the Routh-Hurwitz array for real polynomials and
//! the Hermite-Biehler test for the complex quadratic z^2 + c z + c.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Polynomial with complex coefficients in ascending degree order. Trailing
/// near-zero coefficients are trimmed on construction so the leading
/// coefficient is nonzero (the zero polynomial keeps a single zero entry).
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0)],
        }
    }

    fn trim(&mut self) {
        let max_mag = self
            .coeffs
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
        let cut = 1e-10 * max_mag;
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().norm() <= cut {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(Complex64::new(0.0, 0.0));
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].norm() == 0.0
    }

    /// Horner evaluation at a complex point.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.im.abs() <= tol)
    }

    /// Real parts of the coefficients; errors when any imaginary part is
    /// above the tolerance.
    pub fn real_coeffs(&self, tol: f64) -> Result<Vec<f64>> {
        if !self.is_real(tol) {
            return Err(Error::InvalidInput(
                "polynomial has non-real coefficients".into(),
            ));
        }
        Ok(self.coeffs.iter().map(|c| c.re).collect())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Euclidean division: returns (quotient, remainder).
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        if divisor.is_zero() {
            return Err(Error::InvalidInput("division by zero polynomial".into()));
        }
        if self.degree() < divisor.degree() {
            return Ok((Self::zero(), self.clone()));
        }
        let mut rem = self.coeffs.clone();
        let dn = divisor.degree();
        let lead = divisor.coeffs[dn];
        let qdeg = self.degree() - dn;
        let mut quot = vec![Complex64::new(0.0, 0.0); qdeg + 1];
        for k in (0..=qdeg).rev() {
            let factor = rem[k + dn] / lead;
            quot[k] = factor;
            for j in 0..=dn {
                let sub = factor * divisor.coeffs[j];
                rem[k + j] -= sub;
            }
        }
        rem.truncate(dn.max(1));
        Ok((Self::new(quot), Self::new(rem)))
    }
}

impl std::fmt::Display for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut wrote = false;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.norm() == 0.0 && self.degree() > 0 {
                continue;
            }
            let coef = if c.im.abs() <= 1e-12 * c.norm().max(1.0) {
                format!("{:.6}", c.re)
            } else {
                format!("({:.6}{:+.6}i)", c.re, c.im)
            };
            let term = match k {
                0 => coef,
                1 => format!("{coef}*s"),
                _ => format!("{coef}*s^{k}"),
            };
            if wrote {
                write!(f, " + {term}")?;
            } else {
                write!(f, "{term}")?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Routh-Hurwitz test: true iff every root of the real polynomial has a
/// strictly negative real part. A zero or sign flip in the first column of
/// the Routh array (including a vanishing pivot) means not strictly Hurwitz.
pub fn routh_hurwitz(p: &Polynomial) -> Result<bool> {
    if p.is_zero() {
        return Err(Error::InvalidInput("zero polynomial has no roots".into()));
    }
    let mut coeffs = p.real_coeffs(1e-9 * p.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max))?;
    if p.degree() < 1 {
        return Err(Error::InvalidInput(
            "Routh-Hurwitz needs degree >= 1".into(),
        ));
    }
    // normalize sign of the leading coefficient
    if *coeffs.last().unwrap() < 0.0 {
        for c in &mut coeffs {
            *c = -*c;
        }
    }
    // necessary: all coefficients strictly positive
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if coeffs.iter().any(|&c| c <= 1e-14 * scale) {
        return Ok(false);
    }

    // rows hold descending-degree coefficients: row0 = a_n, a_{n-2}, ...
    let n = p.degree();
    let width = n / 2 + 1;
    let take_row = |start: usize| -> Vec<f64> {
        let mut row = Vec::with_capacity(width);
        let mut k = n as isize - start as isize;
        while k >= 0 {
            row.push(coeffs[k as usize]);
            k -= 2;
        }
        row.resize(width, 0.0);
        row
    };
    let mut prev = take_row(0);
    let mut curr = take_row(1);
    for _ in 2..=n {
        let pivot = curr[0];
        if pivot.abs() <= 1e-14 * scale {
            return Ok(false);
        }
        if pivot < 0.0 {
            return Ok(false);
        }
        let mut next = vec![0.0; width];
        for j in 0..width - 1 {
            next[j] = (pivot * prev[j + 1] - prev[0] * curr[j + 1]) / pivot;
        }
        prev = curr;
        curr = next;
    }
    Ok(curr[0] > 0.0)
}

/// Stability of the complex quadratic f(z) = z^2 + (alpha + i beta) z +
/// (alpha + i beta): true iff both roots lie strictly in the open left
/// half-plane.
///
/// Along the imaginary axis f splits as f(i w) = phi(w) + i psi(w) with
/// phi(w) = -w^2 - beta w + alpha and psi(w) = alpha w + beta. The Wronskian
/// phi(0) psi'(0) - phi'(0) psi(0) = alpha^2 + beta^2 is positive away from
/// the origin, so stability reduces to root interlacing of phi and psi,
/// which for alpha > 0 is the inequality
/// alpha + beta * (beta / alpha) > (beta / alpha)^2, i.e.
/// alpha (alpha^2 + beta^2) > beta^2. Roots exactly on the imaginary axis
/// count as unstable.
pub fn complex_quadratic_stable(alpha: f64, beta: f64) -> bool {
    if alpha <= 0.0 {
        // necessary: the root sum -(alpha + i beta) must have negative real part
        return false;
    }
    alpha * (alpha * alpha + beta * beta) > beta * beta
}
