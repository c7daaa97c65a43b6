//! Polynomial space-time fluxes and their piecewise-linear grid tabulations.
//!
//! A flux is a bivariate polynomial f(t, u). Derivatives are exact coefficient
//! operations; sup-norms over boxes are certified upper bounds (exact root scan
//! for univariate restrictions, interval branch-and-bound otherwise), so every
//! constant derived from them errs on the safe side and never underestimates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;

/// Relative tolerance for certified sup-norm computations.
const SUP_TOL: f64 = 1e-12;

/// Bivariate polynomial flux: `coeffs[j][k]` multiplies `t^j u^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeFlux {
    coeffs: Vec<Vec<f64>>,
}

impl SpaceTimeFlux {
    pub fn new(coeffs: Vec<Vec<f64>>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|row| row.iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidCoefficients);
        }
        let mut f = Self { coeffs };
        f.trim();
        Ok(f)
    }

    /// Autonomous polynomial: coefficients of 1, u, u², ...
    pub fn autonomous(u_coeffs: &[f64]) -> Result<Self> {
        Self::new(vec![u_coeffs.to_vec()])
    }

    fn trim(&mut self) {
        for row in &mut self.coeffs {
            while row.len() > 1 && *row.last().unwrap() == 0.0 {
                row.pop();
            }
        }
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().iter().all(|&c| c == 0.0) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(vec![0.0]);
        }
    }

    pub fn deg_t(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn deg_u(&self) -> usize {
        self.coeffs.iter().map(|r| r.len()).max().unwrap_or(1) - 1
    }

    pub fn is_autonomous(&self) -> bool {
        self.deg_t() == 0
    }

    pub fn coeffs(&self) -> &[Vec<f64>] {
        &self.coeffs
    }

    pub fn eval(&self, t: f64, u: f64) -> f64 {
        // Horner in t of Horner-in-u rows, highest degree first.
        let mut acc = 0.0;
        for row in self.coeffs.iter().rev() {
            acc = acc * t + poly_eval(row, u);
        }
        acc
    }

    /// Coefficients of the univariate polynomial u ↦ f(t, u) at frozen t.
    pub fn freeze_time(&self, t: f64) -> Vec<f64> {
        let width = self.coeffs.iter().map(|r| r.len()).max().unwrap();
        let mut out = vec![0.0; width];
        for (k, slot) in out.iter_mut().enumerate() {
            // Horner in t over column k.
            let mut acc = 0.0;
            for row in self.coeffs.iter().rev() {
                acc = acc * t + row.get(k).copied().unwrap_or(0.0);
            }
            *slot = acc;
        }
        out
    }

    /// ∂f/∂u, exact on coefficients.
    pub fn du(&self) -> SpaceTimeFlux {
        let coeffs = self
            .coeffs
            .iter()
            .map(|row| {
                if row.len() <= 1 {
                    vec![0.0]
                } else {
                    row[1..]
                        .iter()
                        .enumerate()
                        .map(|(i, c)| c * (i + 1) as f64)
                        .collect()
                }
            })
            .collect();
        let mut f = SpaceTimeFlux { coeffs };
        f.trim();
        f
    }

    /// ∂f/∂t, exact on coefficients.
    pub fn dt(&self) -> SpaceTimeFlux {
        if self.coeffs.len() <= 1 {
            return SpaceTimeFlux { coeffs: vec![vec![0.0]] };
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(j, row)| row.iter().map(|c| c * (j + 1) as f64).collect())
            .collect();
        let mut f = SpaceTimeFlux { coeffs };
        f.trim();
        f
    }

    /// ∂²f/∂t∂u.
    pub fn dtdu(&self) -> SpaceTimeFlux {
        self.dt().du()
    }

    /// Coefficient-wise difference f − g.
    pub fn sub(&self, other: &SpaceTimeFlux) -> SpaceTimeFlux {
        let rows = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(rows);
        for j in 0..rows {
            let a = self.coeffs.get(j);
            let b = other.coeffs.get(j);
            let width = a.map_or(0, |r| r.len()).max(b.map_or(0, |r| r.len())).max(1);
            let mut row = vec![0.0; width];
            for (k, slot) in row.iter_mut().enumerate() {
                let ca = a.and_then(|r| r.get(k)).copied().unwrap_or(0.0);
                let cb = b.and_then(|r| r.get(k)).copied().unwrap_or(0.0);
                *slot = ca - cb;
            }
            coeffs.push(row);
        }
        let mut f = SpaceTimeFlux { coeffs };
        f.trim();
        f
    }

    /// Certified upper bound for sup |f| over the box `t_box × u_box`,
    /// within relative tolerance 1e-12 of the true supremum.
    pub fn sup_abs_on_box(&self, t_box: Interval, u_box: Interval) -> Result<f64> {
        if !t_box.hi.is_finite() || !u_box.hi.is_finite() {
            return Err(Error::InvalidInterval { lo: t_box.lo, hi: t_box.hi });
        }
        // Univariate restrictions admit an exact critical-point scan.
        if self.deg_t() == 0 || t_box.is_degenerate() {
            let p = self.freeze_time(t_box.lo);
            return Ok(sup_abs_univariate(&p, u_box));
        }
        if self.deg_u() == 0 || u_box.is_degenerate() {
            // Swap roles: restrict to fixed u, scan in t.
            let p = self.freeze_u(u_box.lo);
            return Ok(sup_abs_univariate(&p, t_box));
        }
        Ok(self.sup_abs_branch_bound(t_box, u_box))
    }

    /// Coefficients of the univariate polynomial t ↦ f(t, u) at frozen u.
    fn freeze_u(&self, u: f64) -> Vec<f64> {
        self.coeffs.iter().map(|row| poly_eval(row, u)).collect()
    }

    /// sup |∂_u f| over `t_box × u_box`, certified.
    pub fn sup_du_norm(&self, t_box: Interval, u_box: Interval) -> Result<f64> {
        self.du().sup_abs_on_box(t_box, u_box)
    }

    /// sup |∂_t ∂_u f| over `t_box × u_box`, certified.
    pub fn sup_dtdu_norm(&self, t_box: Interval, u_box: Interval) -> Result<f64> {
        self.dtdu().sup_abs_on_box(t_box, u_box)
    }

    fn sup_abs_branch_bound(&self, t_box: Interval, u_box: Interval) -> f64 {
        use std::cmp::Ordering;
        use std::collections::BinaryHeap;

        #[derive(PartialEq)]
        struct Box2 {
            bound: f64,
            t: Interval,
            u: Interval,
        }
        impl Eq for Box2 {}
        impl Ord for Box2 {
            fn cmp(&self, other: &Self) -> Ordering {
                self.bound.total_cmp(&other.bound)
            }
        }
        impl PartialOrd for Box2 {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }

        let sample = |t: Interval, u: Interval| -> f64 {
            let tm = 0.5 * (t.lo + t.hi);
            let um = 0.5 * (u.lo + u.hi);
            let pts = [
                (t.lo, u.lo),
                (t.lo, u.hi),
                (t.hi, u.lo),
                (t.hi, u.hi),
                (tm, um),
            ];
            pts.iter()
                .map(|&(a, b)| self.eval(a, b).abs())
                .fold(0.0, f64::max)
        };

        // Mean-value form: |p| ≤ |p(mid)| + sup|∂_t p|·w_t/2 + sup|∂_u p|·w_u/2,
        // intersected with the plain monomial bound. The first converges
        // quadratically near smooth peaks, the second wins far from them.
        let dt = self.dt();
        let du = self.du();
        let upper = |t: Interval, u: Interval| -> f64 {
            let monomial = interval_abs_bound(&self.coeffs, t, u);
            let mid = self
                .eval(0.5 * (t.lo + t.hi), 0.5 * (u.lo + u.hi))
                .abs();
            let radius = interval_abs_bound(&dt.coeffs, t, u) * 0.5 * t.width()
                + interval_abs_bound(&du.coeffs, t, u) * 0.5 * u.width();
            let mv = mid + radius;
            monomial.min(mv + 1e-14 * mv)
        };

        let mut lower = sample(t_box, u_box);
        let mut heap = BinaryHeap::new();
        heap.push(Box2 {
            bound: upper(t_box, u_box),
            t: t_box,
            u: u_box,
        });
        let mut iter = 0usize;
        while let Some(bx) = heap.pop() {
            if bx.bound <= lower * (1.0 + SUP_TOL) + 1e-300 {
                return bx.bound.max(lower);
            }
            iter += 1;
            if iter > 20_000 {
                // Budget hit: the current bound is still a sound upper bound.
                return bx.bound.max(lower);
            }
            let split_t = bx.t.width() >= bx.u.width();
            let halves: [(Interval, Interval); 2] = if split_t {
                let m = 0.5 * (bx.t.lo + bx.t.hi);
                [(Interval { lo: bx.t.lo, hi: m }, bx.u), (Interval { lo: m, hi: bx.t.hi }, bx.u)]
            } else {
                let m = 0.5 * (bx.u.lo + bx.u.hi);
                [(bx.t, Interval { lo: bx.u.lo, hi: m }), (bx.t, Interval { lo: m, hi: bx.u.hi })]
            };
            for (t, u) in halves {
                lower = lower.max(sample(t, u));
                heap.push(Box2 { bound: upper(t, u), t, u });
            }
        }
        lower
    }
}

/// Evaluate a univariate polynomial (ascending coefficients) by Horner.
pub fn poly_eval(c: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &ci in c.iter().rev() {
        acc = acc * x + ci;
    }
    acc
}

fn poly_derive(c: &[f64]) -> Vec<f64> {
    if c.len() <= 1 {
        return vec![0.0];
    }
    c[1..]
        .iter()
        .enumerate()
        .map(|(i, ci)| ci * (i + 1) as f64)
        .collect()
}

fn poly_deg(c: &[f64]) -> usize {
    let mut d = c.len();
    while d > 1 && c[d - 1] == 0.0 {
        d -= 1;
    }
    d - 1
}

/// All real roots of a polynomial inside `[lo, hi]`, by the derivative chain:
/// the roots of p' split `[lo, hi]` into monotone pieces, and each sign change
/// is bisected to full float precision.
pub fn poly_roots_in(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let deg = poly_deg(c);
    if deg == 0 || lo >= hi {
        return vec![];
    }
    if deg == 1 {
        let r = -c[0] / c[1];
        return if r >= lo && r <= hi { vec![r] } else { vec![] };
    }
    let crit = poly_roots_in(&poly_derive(c), lo, hi);
    let mut cuts = Vec::with_capacity(crit.len() + 2);
    cuts.push(lo);
    cuts.extend(crit);
    cuts.push(hi);
    cuts.dedup();
    let mut roots = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (poly_eval(c, a), poly_eval(c, b));
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fb == 0.0 {
            // Right endpoint belongs to the next window unless it is hi.
            if b == hi {
                roots.push(b);
            }
            continue;
        }
        if fa.signum() == fb.signum() {
            continue;
        }
        let (mut a, mut b, mut fa) = (a, b, fa);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = poly_eval(c, m);
            if fm == 0.0 {
                a = m;
                break;
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        roots.push(a);
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup();
    roots
}

/// Exact sup |p| over a closed interval via endpoints + critical points.
fn sup_abs_univariate(c: &[f64], x: Interval) -> f64 {
    let mut best = poly_eval(c, x.lo).abs().max(poly_eval(c, x.hi).abs());
    for r in poly_roots_in(&poly_derive(c), x.lo, x.hi) {
        best = best.max(poly_eval(c, r).abs());
    }
    best
}

/// Interval range of x^n over [lo, hi].
fn pow_interval(x: Interval, n: usize) -> Interval {
    if n == 0 {
        return Interval { lo: 1.0, hi: 1.0 };
    }
    let (pl, ph) = (x.lo.powi(n as i32), x.hi.powi(n as i32));
    if n % 2 == 1 || x.lo >= 0.0 {
        Interval { lo: pl.min(ph), hi: pl.max(ph) }
    } else if x.hi <= 0.0 {
        Interval { lo: ph.min(pl), hi: ph.max(pl) }
    } else {
        Interval { lo: 0.0, hi: pl.max(ph) }
    }
}

/// Conservative bound for sup |p| on a box: sum of |c_jk| · max|t^j| · max|u^k|
/// with a directed-rounding slack.
fn interval_abs_bound(coeffs: &[Vec<f64>], t: Interval, u: Interval) -> f64 {
    let mut lo = 0.0f64;
    let mut hi = 0.0f64;
    for (j, row) in coeffs.iter().enumerate() {
        let tj = pow_interval(t, j);
        for (k, &c) in row.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let uk = pow_interval(u, k);
            // Interval product c · tj · uk.
            let candidates = [
                c * tj.lo * uk.lo,
                c * tj.lo * uk.hi,
                c * tj.hi * uk.lo,
                c * tj.hi * uk.hi,
            ];
            lo += candidates.iter().copied().fold(f64::INFINITY, f64::min);
            hi += candidates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        }
    }
    let m = lo.abs().max(hi.abs());
    m + 1e-14 * m
}

/// Index range of grid states, closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexHull {
    pub lo: i64,
    pub hi: i64,
}

impl IndexHull {
    pub fn contains(&self, k: i64) -> bool {
        k >= self.lo && k <= self.hi
    }

    pub fn hull_with(&self, other: &IndexHull) -> IndexHull {
        IndexHull {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn as_interval(&self, eps: f64) -> Interval {
        Interval {
            lo: self.lo as f64 * eps,
            hi: self.hi as f64 * eps,
        }
    }
}

/// Piecewise-linear tabulation of a flux on the grid εℤ, restricted to a
/// closed node range. Affine on each cell [kε, (k+1)ε], exact at the nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlcFlux {
    eps: f64,
    k_min: i64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl PlcFlux {
    /// Tabulate `f(t_frozen, ·)` on grid nodes covering `hull`.
    pub fn from_smooth(f: &SpaceTimeFlux, t_frozen: f64, eps: f64, hull: Interval) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidSpacing(eps));
        }
        if !hull.hi.is_finite() {
            return Err(Error::EmptyHull);
        }
        let k_min = snapped_floor(hull.lo / eps);
        let k_max = snapped_ceil(hull.hi / eps);
        Self::from_index_range(f, t_frozen, eps, IndexHull { lo: k_min, hi: k_max })
    }

    /// Tabulate `f(t_frozen, ·)` on the exact node range `hull`.
    pub fn from_index_range(
        f: &SpaceTimeFlux,
        t_frozen: f64,
        eps: f64,
        hull: IndexHull,
    ) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidSpacing(eps));
        }
        if hull.hi < hull.lo {
            return Err(Error::EmptyHull);
        }
        let frozen = f.freeze_time(t_frozen);
        let values: Vec<f64> = (hull.lo..=hull.hi)
            .map(|k| poly_eval(&frozen, k as f64 * eps))
            .collect();
        Self::from_nodes(eps, hull.lo, values)
    }

    /// Build directly from node values (tests and imports).
    pub fn from_nodes(eps: f64, k_min: i64, values: Vec<f64>) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidSpacing(eps));
        }
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidValues);
        }
        let slopes = values
            .windows(2)
            .map(|w| (w[1] - w[0]) / eps)
            .collect();
        Ok(Self { eps, k_min, values, slopes })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.values.len() as i64 - 1
    }

    pub fn index_hull(&self) -> IndexHull {
        IndexHull { lo: self.k_min(), hi: self.k_max() }
    }

    pub fn contains_state(&self, k: i64) -> bool {
        k >= self.k_min() && k <= self.k_max()
    }

    /// Node value f^ε(kε).
    pub fn node(&self, k: i64) -> Result<f64> {
        if !self.contains_state(k) {
            return Err(Error::StateOutsideRange(k, self.k_min(), self.k_max()));
        }
        Ok(self.values[(k - self.k_min) as usize])
    }

    /// Slope on the cell [kε, (k+1)ε].
    pub fn cell_slope(&self, k: i64) -> Result<f64> {
        if k < self.k_min() || k >= self.k_max() {
            return Err(Error::StateOutsideRange(k, self.k_min(), self.k_max() - 1));
        }
        Ok(self.slopes[(k - self.k_min) as usize])
    }

    /// Jump speed between distinct grid states l and r.
    pub fn chord_speed(&self, l: i64, r: i64) -> Result<f64> {
        if l == r {
            return Err(Error::Internal("chord between equal states".into()));
        }
        let fl = self.node(l)?;
        let fr = self.node(r)?;
        Ok((fl - fr) / ((l - r) as f64 * self.eps))
    }

    /// Piecewise-linear evaluation at an arbitrary point of the node range.
    pub fn eval(&self, u: f64) -> Result<f64> {
        let lo = self.k_min() as f64 * self.eps;
        let hi = self.k_max() as f64 * self.eps;
        if !(u >= lo - 1e-12 * self.eps && u <= hi + 1e-12 * self.eps) {
            return Err(Error::PointOutsideRange(u));
        }
        let u = u.clamp(lo, hi);
        let cell = (((u - lo) / self.eps).floor() as i64)
            .clamp(0, (self.values.len() as i64 - 2).max(0));
        if self.values.len() == 1 {
            return Ok(self.values[0]);
        }
        let x0 = (self.k_min + cell) as f64 * self.eps;
        Ok(self.values[cell as usize] + self.slopes[cell as usize] * (u - x0))
    }

    /// Lipschitz constant of the tabulation: max |cell slope|.
    pub fn max_abs_slope(&self) -> f64 {
        self.slopes.iter().fold(0.0, |m, s| m.max(s.abs()))
    }

    pub fn node_values(&self) -> &[f64] {
        &self.values
    }
}

fn snapped_floor(x: f64) -> i64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r as i64
    } else {
        x.floor() as i64
    }
}

fn snapped_ceil(x: f64) -> i64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r as i64
    } else {
        x.ceil() as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn burgers() -> SpaceTimeFlux {
        SpaceTimeFlux::autonomous(&[0.0, 0.0, 0.5]).unwrap()
    }

    /// f(t, u) = (1 + t) u.
    fn ramp_transport() -> SpaceTimeFlux {
        SpaceTimeFlux::new(vec![vec![0.0, 1.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn eval_bilinear() {
        assert_eq!(ramp_transport().eval(1.0, 2.0), 4.0);
        assert_eq!(burgers().eval(7.0, 3.0), 4.5);
    }

    #[test]
    fn derivative_coefficients() {
        // ∂_t∂_u of (1+t)u²/2 is u.
        let f = SpaceTimeFlux::new(vec![vec![0.0, 0.0, 0.5], vec![0.0, 0.0, 0.5]]).unwrap();
        let d = f.dtdu();
        assert_eq!(d.coeffs(), &[vec![0.0, 1.0]]);
        // ∂_u of u³/3 is u².
        let g = SpaceTimeFlux::autonomous(&[0.0, 0.0, 0.0, 1.0 / 3.0]).unwrap();
        assert_eq!(g.du().coeffs(), &[vec![0.0, 0.0, 1.0]]);
    }

    #[test]
    fn sup_univariate_exact() {
        // sup |u²| over [−2, 1] = 4, attained at the corner.
        let g = SpaceTimeFlux::autonomous(&[0.0, 0.0, 0.0, 1.0 / 3.0]).unwrap();
        let s = g
            .sup_du_norm(Interval::point(0.0).unwrap(), Interval::new(-2.0, 1.0).unwrap())
            .unwrap();
        assert!((s - 4.0).abs() < 1e-12);
        // Interior critical point: sup |u² − 1| over [−2, 2] = 3, but at u = 0 the
        // scan must still see the local value 1 when the box is [−0.5, 0.5].
        let h = SpaceTimeFlux::autonomous(&[-1.0, 0.0, 1.0]).unwrap();
        let s2 = h
            .sup_abs_on_box(Interval::point(0.0).unwrap(), Interval::new(-0.5, 0.5).unwrap())
            .unwrap();
        assert!((s2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sup_bilinear_box() {
        // sup |(1+t)u| over [0,1]×[0,1] = 2.
        let s = ramp_transport()
            .sup_abs_on_box(Interval::new(0.0, 1.0).unwrap(), Interval::new(0.0, 1.0).unwrap())
            .unwrap();
        assert!(s >= 2.0 && s <= 2.0 + 1e-9, "s={s}");
    }

    #[test]
    fn sup_interior_peak_not_missed() {
        // p(t,u) = 2 − (t−1/2)² − (u−1/2)² peaks at an interior point with value 2
        // while every edge maximum is 1.75.
        let p = SpaceTimeFlux::new(vec![
            vec![2.0 - 0.25 - 0.25, 1.0, -1.0],
            vec![1.0, 0.0, 0.0],
            vec![-1.0, 0.0, 0.0],
        ])
        .unwrap();
        assert!((p.eval(0.5, 0.5) - 2.0).abs() < 1e-12);
        let s = p
            .sup_abs_on_box(Interval::new(0.0, 1.0).unwrap(), Interval::new(0.0, 1.0).unwrap())
            .unwrap();
        assert!(s >= 2.0 && s <= 2.0 + 1e-9, "s={s}");
    }

    #[test]
    fn splitting_constants_example() {
        // f = (1+t)u²/2 on [0,1]×[0,1]: sup|∂_u f| = 2, sup|∂_t∂_u f| = 1.
        let f = SpaceTimeFlux::new(vec![vec![0.0, 0.0, 0.5], vec![0.0, 0.0, 0.5]]).unwrap();
        let t = Interval::new(0.0, 1.0).unwrap();
        let u = Interval::new(0.0, 1.0).unwrap();
        let du = f.sup_du_norm(t, u).unwrap();
        let dtdu = f.sup_dtdu_norm(t, u).unwrap();
        assert!((du - 2.0).abs() < 1e-9, "du={du}");
        assert!((dtdu - 1.0).abs() < 1e-9, "dtdu={dtdu}");
    }

    #[test]
    fn tabulation_nodes_and_slopes() {
        // Burgers, ε = 0.5, hull [0, 1]: nodes (0, 0.125, 0.5), slopes (0.25, 0.75).
        let p = PlcFlux::from_smooth(&burgers(), 0.0, 0.5, Interval::new(0.0, 1.0).unwrap())
            .unwrap();
        assert_eq!(p.k_min(), 0);
        assert_eq!(p.k_max(), 2);
        assert_eq!(p.node_values(), &[0.0, 0.125, 0.5]);
        assert_eq!(p.cell_slope(0).unwrap(), 0.25);
        assert_eq!(p.cell_slope(1).unwrap(), 0.75);
        assert_eq!(p.max_abs_slope(), 0.75);
    }

    #[test]
    fn tabulation_is_exact_for_affine_flux() {
        // Degree ≤ 1 fluxes tabulate to themselves.
        let f = SpaceTimeFlux::autonomous(&[0.25, -2.0]).unwrap();
        let p = PlcFlux::from_smooth(&f, 0.0, 0.5, Interval::new(-2.0, 2.0).unwrap()).unwrap();
        for k in p.k_min()..=p.k_max() {
            let u = k as f64 * 0.5;
            assert_eq!(p.node(k).unwrap(), f.eval(0.0, u));
        }
        assert!((p.eval(0.3).unwrap() - f.eval(0.0, 0.3)).abs() < 1e-15);
    }

    #[test]
    fn hull_endpoints_snap_to_nodes() {
        // Endpoints that are grid multiples up to rounding must not widen the range.
        let p = PlcFlux::from_smooth(
            &burgers(),
            0.0,
            0.1,
            Interval::new(3.0 * 0.1, 7.0 * 0.1).unwrap(),
        )
        .unwrap();
        assert_eq!(p.k_min(), 3);
        assert_eq!(p.k_max(), 7);
    }

    #[test]
    fn slope_bounded_by_derivative_sup() {
        let f = SpaceTimeFlux::autonomous(&[0.3, -1.0, 0.7, 0.2, -0.4]).unwrap();
        let hull = Interval::new(-2.0, 1.5).unwrap();
        let p = PlcFlux::from_smooth(&f, 0.0, 0.25, hull).unwrap();
        let sup = f
            .sup_du_norm(Interval::point(0.0).unwrap(), p.index_hull().as_interval(0.25))
            .unwrap();
        assert!(p.max_abs_slope() <= sup + 1e-9);
    }

    #[test]
    fn chord_speed_matches_nodes() {
        let p = PlcFlux::from_nodes(1.0, -1, vec![1.0, 0.0, 1.0]).unwrap();
        // f(−1)=1, f(0)=0, f(1)=1.
        assert_eq!(p.chord_speed(1, 0).unwrap(), 1.0);
        assert_eq!(p.chord_speed(-1, 0).unwrap(), -1.0);
        assert_eq!(p.chord_speed(1, -1).unwrap(), 0.0);
    }

    #[test]
    fn out_of_range_state_is_an_error() {
        let p = PlcFlux::from_nodes(1.0, 0, vec![0.0, 1.0]).unwrap();
        assert!(p.node(2).is_err());
        assert!(p.eval(2.5).is_err());
    }
}
