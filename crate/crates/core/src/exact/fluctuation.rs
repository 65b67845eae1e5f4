//! Overshoot laws, ladder heights and the Green's function of the killed walk,
//! from the roots of the characteristic polynomial.
//!
//! For offsets in `[-a, b]`, `r^v` is harmonic for the walk iff `P(r) = 0`,
//! `P(z) = sum_d p_d z^(d+a) - z^a`. Besides the double root at 1, `P` has
//! `a - 1` roots inside and `b - 1` roots outside the unit disk (when the
//! offsets are coprime). Bounded harmonic functions on a half line
//! `[c, +inf)` are spanned by `1` and the inside modes, on `(-inf, c]` by `1`
//! and the outside modes; boundary data on the `a` (resp. `b`) cells beyond
//! the barrier fix the coefficients.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::poly;
use crate::error::{Error, Result};
use crate::increments::LatticeIncrement;

const ROOT_GAP: f64 = 1e-9;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn solve(m: DMatrix<Complex64>, rhs: DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    m.lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Unsupported("singular boundary system".into()))
}

#[derive(Debug, Clone)]
pub struct Fluctuation {
    dist: LatticeIncrement,
    a: usize,
    b: usize,
    inside: Vec<Complex64>,
    outside: Vec<Complex64>,
    /// Column `h` holds `(c0, c_1..c_{a-1})` for `g_h(v) = P(overshoot = h | start v)`,
    /// `g_h(v) = c0 + sum_i c_i r_i^(v + a - 1)` for `v >= 1 - a`.
    overshoot_coef: DMatrix<Complex64>,
    /// `P(chi+ = h)` for `h = 1..=b` (index `h - 1`).
    ascending: Vec<f64>,
}

impl Fluctuation {
    pub fn new(dist: &LatticeIncrement) -> Result<Self> {
        let a = dist.max_down();
        let b = dist.max_up();
        let p = poly::char_poly(dist);
        let (q, _) = poly::deflate_unit(&p);
        let (q, _) = poly::deflate_unit(&q);
        let roots = poly::roots(&q)?;

        let mut inside = Vec::new();
        let mut outside = Vec::new();
        for &r in &roots {
            let m = r.norm();
            if m < 1.0 - ROOT_GAP {
                inside.push(r);
            } else if m > 1.0 + ROOT_GAP {
                outside.push(r);
            } else {
                return Err(Error::Unsupported(format!(
                    "characteristic root {r} on the unit circle (offsets share a common factor)"
                )));
            }
        }
        if inside.len() != a - 1 || outside.len() != b - 1 {
            return Err(Error::Unsupported(format!(
                "root split {}/{} does not match {}/{}",
                inside.len(),
                outside.len(),
                a - 1,
                b - 1
            )));
        }
        for (i, r) in roots.iter().enumerate() {
            if roots[i + 1..].iter().any(|s| (r - s).norm() < 1e-8) {
                return Err(Error::Unsupported("coincident characteristic roots".into()));
            }
        }

        // Overshoot boundary system: rows v = 1-a..=0 (row j <-> v = j + 1 - a).
        let mut m = DMatrix::<Complex64>::zeros(a, a);
        for j in 0..a {
            m[(j, 0)] = c(1.0);
            for (i, r) in inside.iter().enumerate() {
                m[(j, i + 1)] = r.powi(j as i32);
            }
        }
        // boundary value at v is 1{-v = h}: depth h sits in row a - 1 - h
        let mut rhs = DMatrix::<Complex64>::zeros(a, a);
        for h in 0..a {
            rhs[(a - 1 - h, h)] = c(1.0);
        }
        let overshoot_coef = solve(m, rhs)?;

        // Ascending ladder: k_h(v) = alpha + sum_j beta_j rho_j^(v - b) on v <= b,
        // boundary k_h(v) = 1{v = h} for v = 1..=b (row v - 1).
        let mut m = DMatrix::<Complex64>::zeros(b, b);
        for v in 1..=b {
            m[(v - 1, 0)] = c(1.0);
            for (j, rho) in outside.iter().enumerate() {
                m[(v - 1, j + 1)] = rho.powi(v as i32 - b as i32);
            }
        }
        let coef = solve(m, DMatrix::identity(b, b))?;
        let at_zero: Vec<Complex64> = std::iter::once(c(1.0))
            .chain(outside.iter().map(|rho| rho.powi(-(b as i32))))
            .collect();
        let ascending = (0..b)
            .map(|h| {
                (0..b)
                    .map(|k| at_zero[k] * coef[(k, h)])
                    .sum::<Complex64>()
                    .re
            })
            .collect();

        Ok(Self {
            dist: dist.clone(),
            a,
            b,
            inside,
            outside,
            overshoot_coef,
            ascending,
        })
    }

    pub fn inside_roots(&self) -> &[Complex64] {
        &self.inside
    }

    pub fn outside_roots(&self) -> &[Complex64] {
        &self.outside
    }

    /// `P(overshoot = h | start v)` for a live start `v >= 1`, or the
    /// boundary value for `1 - a <= v <= 0`.
    fn overshoot_harmonic(&self, v: i64, h: usize) -> f64 {
        if v <= 0 {
            return if (-v) as usize == h { 1.0 } else { 0.0 };
        }
        if h >= self.a {
            return 0.0;
        }
        let e = v + self.a as i64 - 1;
        let mut acc = self.overshoot_coef[(0, h)];
        for (i, r) in self.inside.iter().enumerate() {
            acc += self.overshoot_coef[(i + 1, h)] * pow_nonneg(*r, e);
        }
        acc.re
    }

    /// Law of the overshoot `|x + S_{tau_x}|`, indexed `0..=a`.
    pub fn overshoot_law(&self, x: u64) -> Vec<f64> {
        let mut law = vec![0.0; self.a + 1];
        if x == 0 {
            for (d, p) in self.dist.iter() {
                for (h, slot) in law.iter_mut().enumerate() {
                    *slot += p * self.overshoot_harmonic(d, h);
                }
            }
        } else {
            for (h, slot) in law.iter_mut().enumerate().take(self.a) {
                *slot = self.overshoot_harmonic(x as i64, h);
            }
        }
        law
    }

    /// `(E|x + S_tau|, E|x + S_tau|^2)`.
    pub fn overshoot_moments(&self, x: u64) -> (f64, f64) {
        let law = self.overshoot_law(x);
        law.iter().enumerate().fold((0.0, 0.0), |(m1, m2), (h, p)| {
            let h = h as f64;
            (m1 + h * p, m2 + h * h * p)
        })
    }

    /// `E = lim_{x -> inf} E|x + S_{tau_x}|`.
    pub fn limit_overshoot(&self) -> f64 {
        (0..self.a)
            .map(|h| h as f64 * self.overshoot_coef[(0, h)].re)
            .sum()
    }

    /// Law of the weak descending ladder height `chi- = |S_{tau_0}|`, indexed `0..=a`.
    pub fn descending_law(&self) -> Vec<f64> {
        self.overshoot_law(0)
    }

    /// Law of the strict ascending ladder height `chi+`, indexed `0..=b` (entry 0 is 0).
    pub fn ascending_law(&self) -> Vec<f64> {
        std::iter::once(0.0).chain(self.ascending.iter().copied()).collect()
    }

    /// Green's function `G(y, w)` of the killed walk (visits to `w` before
    /// `tau_y`, time 0 included) for `y, w` in `1..=size`; `out[y-1][w-1]`.
    pub fn green(&self, size: usize) -> Result<Vec<Vec<f64>>> {
        let l = size.max(1);
        let a = self.a;
        let modes = a;
        let dim = l + modes;
        // Unknowns: G(1..=l) then mode coefficients (c0, c_i) with
        // G(y) = c0 + sum_i c_i r_i^(y - l) for y >= l + 1 - a.
        let mode_row = |y: i64| -> Vec<Complex64> {
            let e = y - l as i64;
            std::iter::once(c(1.0))
                .chain(self.inside.iter().map(|r| r.powi(e as i32)))
                .collect()
        };
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for y in 1..=l {
            let row = y - 1;
            m[(row, y - 1)] += c(1.0);
            for (d, p) in self.dist.iter() {
                let t = y as i64 + d;
                if t <= 0 {
                    continue;
                }
                if t as usize <= l {
                    m[(row, t as usize - 1)] -= c(p);
                } else {
                    for (k, v) in mode_row(t).into_iter().enumerate() {
                        m[(row, l + k)] -= c(p) * v;
                    }
                }
            }
        }
        for j in 0..modes {
            let y = l as i64 + 1 - a as i64 + j as i64;
            let row = l + j;
            if y >= 1 {
                m[(row, y as usize - 1)] += c(1.0);
            }
            for (k, v) in mode_row(y).into_iter().enumerate() {
                m[(row, l + k)] -= v;
            }
        }
        let mut rhs = DMatrix::<Complex64>::zeros(dim, l);
        for w in 0..l {
            rhs[(w, w)] = c(1.0);
        }
        let sol = solve(m, rhs)?;
        Ok((0..l)
            .map(|y| (0..l).map(|w| sol[(y, w)].re).take(size).collect())
            .take(size)
            .collect())
    }

    /// Occupation measure `phi(x) = sum_k P(S_k = x, tau_0 > k)` for `x = 0..=x_max`.
    pub fn occupation(&self, x_max: usize) -> Result<Vec<f64>> {
        let size = x_max.max(self.b);
        let g = self.green(size)?;
        let mut phi = vec![0.0; x_max + 1];
        phi[0] = 1.0;
        for (d, p) in self.dist.iter().filter(|&(d, _)| d >= 1) {
            for x in 1..=x_max {
                phi[x] += p * g[d as usize - 1][x - 1];
            }
        }
        Ok(phi)
    }

    /// Max coefficient error of `(1 - E z^chi+) z^a (1 - E z^-chi-) = -P(z)`.
    pub fn wiener_hopf_defect(&self) -> f64 {
        let asc = self.ascending_law();
        let desc = self.descending_law();
        // A(z) = 1 - sum f_h z^h, B(z) = z^a - sum q_h z^(a - h)
        let mut a_poly = vec![0.0; self.b + 1];
        a_poly[0] = 1.0;
        for (h, f) in asc.iter().enumerate().skip(1) {
            a_poly[h] -= f;
        }
        let mut b_poly = vec![0.0; self.a + 1];
        b_poly[self.a] = 1.0;
        for (h, q) in desc.iter().enumerate() {
            b_poly[self.a - h] -= q;
        }
        let mut prod = vec![0.0; self.a + self.b + 1];
        for (i, x) in a_poly.iter().enumerate() {
            for (j, y) in b_poly.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        let p = poly::char_poly(&self.dist);
        prod.iter()
            .zip(&p)
            .map(|(l, r)| (l + r).abs())
            .fold(0.0, f64::max)
    }
}

fn pow_nonneg(r: Complex64, e: i64) -> Complex64 {
    if r.norm() == 0.0 {
        return if e == 0 { c(1.0) } else { c(0.0) };
    }
    if e > i32::MAX as i64 {
        return c(0.0);
    }
    r.powi(e as i32)
}
