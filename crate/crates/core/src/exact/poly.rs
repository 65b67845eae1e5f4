//! Real polynomials in ascending coefficient order.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::increments::LatticeIncrement;

/// `P(z) = sum_d p_d z^(d + a) - z^a`, where `a = max_down`.
pub fn char_poly(dist: &LatticeIncrement) -> Vec<f64> {
    let a = dist.max_down();
    let mut c = vec![0.0; a + dist.max_up() + 1];
    for (d, p) in dist.iter() {
        c[(d + a as i64) as usize] += p;
    }
    c[a] -= 1.0;
    c
}

/// Divide by `(z - 1)`, returning the quotient and the remainder.
pub fn deflate_unit(c: &[f64]) -> (Vec<f64>, f64) {
    let m = c.len() - 1;
    let mut q = vec![0.0; m];
    let mut carry = 0.0;
    for k in (1..=m).rev() {
        carry += c[k];
        q[k - 1] = carry;
    }
    (q, c[0] + carry)
}

fn eval_with_derivative(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    c.iter().rev().fold((zero, zero), |(p, dp), &ck| (p * z + ck, dp * z + p))
}

/// All complex roots: companion-matrix eigenvalues, then Newton polish.
pub fn roots(c: &[f64]) -> Result<Vec<Complex64>> {
    let m = c.len() - 1;
    if m == 0 {
        return Ok(Vec::new());
    }
    let lead = c[m];
    if lead == 0.0 {
        return Err(Error::Unsupported("zero leading coefficient".into()));
    }
    let mut comp = DMatrix::<f64>::zeros(m, m);
    for i in 1..m {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..m {
        comp[(i, m - 1)] = -c[i] / lead;
    }
    let eig = comp.complex_eigenvalues();
    let mut out = Vec::with_capacity(m);
    for &z0 in eig.iter() {
        let mut z = z0;
        for _ in 0..100 {
            let (p, dp) = eval_with_derivative(c, z);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            z -= step;
            if step.norm() <= 1e-15 * z.norm().max(1.0) {
                break;
            }
        }
        if !z.is_finite() {
            return Err(Error::Unsupported("root polish diverged".into()));
        }
        out.push(z);
    }
    Ok(out)
}
