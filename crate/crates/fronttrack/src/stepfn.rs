//! Piecewise-constant functions on an interval, their grid-valued
//! quantizations, and the metrics the solver and verifier share (total
//! variation, L¹ distance, range hulls).
//!
//! Conventions used throughout: step functions are right-continuous, their
//! breakpoints are strictly inside the domain and strictly increasing, and
//! adjacent pieces always carry distinct values (constructors merge).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::IndexHull;
use crate::interval::Interval;

/// Which one-sided limit to take at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// Right-continuous step function on a closed interval (the upper end may be
/// +∞). `values.len() == breaks.len() + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    domain: Interval,
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(domain: Interval, breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breaks.len() + 1 {
            return Err(Error::InvalidValues);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidValues);
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidBreakpoints);
        }
        if breaks
            .iter()
            .any(|&b| !b.is_finite() || b <= domain.lo || b >= domain.hi)
        {
            return Err(Error::InvalidBreakpoints);
        }
        let mut f = Self { domain, breaks, values };
        f.merge_equal();
        Ok(f)
    }

    pub fn constant(domain: Interval, value: f64) -> Result<Self> {
        Self::new(domain, vec![], vec![value])
    }

    fn merge_equal(&mut self) {
        let mut breaks = Vec::with_capacity(self.breaks.len());
        let mut values = Vec::with_capacity(self.values.len());
        values.push(self.values[0]);
        for (i, &b) in self.breaks.iter().enumerate() {
            let v = self.values[i + 1];
            if v != *values.last().unwrap() {
                breaks.push(b);
                values.push(v);
            }
        }
        self.breaks = breaks;
        self.values = values;
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn piece_count(&self) -> usize {
        self.values.len()
    }

    /// Index of the piece whose half-open support contains x.
    fn piece_index(&self, x: f64) -> usize {
        self.breaks.partition_point(|&b| b <= x)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !self.domain.contains(x) {
            return Err(Error::PointOutsideDomain(x));
        }
        Ok(self.values[self.piece_index(x)])
    }

    /// One-sided limit at a point of the closed domain. The left limit at the
    /// lower end and the right limit at a finite upper end fall back to the
    /// function value there.
    pub fn trace(&self, x: f64, side: Side) -> Result<f64> {
        if !self.domain.contains(x) {
            return Err(Error::NoSidedLimit(x));
        }
        match side {
            Side::Right => Ok(self.values[self.piece_index(x)]),
            Side::Left => {
                let i = self.breaks.partition_point(|&b| b < x);
                Ok(self.values[i])
            }
        }
    }

    /// Total variation restricted to a window: the sum of |jump| over the
    /// breakpoints strictly inside the window. The full-domain call counts
    /// every jump.
    pub fn tv(&self, window: Interval) -> Result<f64> {
        if window.intersect(&self.domain).is_none() {
            return Err(Error::WindowOutsideDomain { lo: window.lo, hi: window.hi });
        }
        let mut sum = 0.0;
        for (i, &b) in self.breaks.iter().enumerate() {
            if b > window.lo && b < window.hi {
                sum += (self.values[i + 1] - self.values[i]).abs();
            }
        }
        Ok(sum)
    }

    pub fn tv_total(&self) -> f64 {
        self.breaks
            .iter()
            .enumerate()
            .map(|(i, _)| (self.values[i + 1] - self.values[i]).abs())
            .sum()
    }

    /// Closed hull of the values attained on `window ∩ domain`.
    pub fn range_hull(&self, window: Interval) -> Result<Interval> {
        let w = window
            .intersect(&self.domain)
            .ok_or(Error::WindowOutsideDomain { lo: window.lo, hi: window.hi })?;
        let first = self.piece_index(w.lo);
        let last = if w.hi.is_finite() {
            self.piece_index(w.hi)
        } else {
            self.values.len() - 1
        };
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.values[first..=last] {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        // A closed window also attains the left limit at its upper end when
        // that end sits exactly on a breakpoint; the sweep above already
        // includes it because piece `last − 1` is in range whenever w has
        // positive width. Degenerate windows see a single piece.
        Interval::new(lo, hi)
    }

    /// L¹ distance over the common domain. Unbounded domains require the two
    /// tail values to agree.
    pub fn l1_distance(&self, other: &StepFunction) -> Result<f64> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        if !self.domain.is_bounded()
            && self.values.last().unwrap() != other.values.last().unwrap()
        {
            return Err(Error::DivergingTail);
        }
        let mut cuts: Vec<f64> = Vec::with_capacity(self.breaks.len() + other.breaks.len());
        cuts.extend_from_slice(&self.breaks);
        cuts.extend_from_slice(&other.breaks);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let end = if self.domain.is_bounded() {
            self.domain.hi
        } else {
            // Beyond the last cut the integrand vanishes.
            cuts.last().copied().unwrap_or(self.domain.lo)
        };
        let mut sum = 0.0;
        let mut x = self.domain.lo;
        let mut ia = 0usize;
        let mut ib = 0usize;
        for &c in cuts.iter().chain(std::iter::once(&end)) {
            if c > x {
                sum += (self.values[ia] - other.values[ib]).abs() * (c - x);
                x = c;
            }
            ia = self.breaks.partition_point(|&b| b <= c);
            ib = other.breaks.partition_point(|&b| b <= c);
        }
        Ok(sum)
    }

    /// The function x ↦ u(start + x) on [0, end − start]. Jumps exactly at
    /// `end` are dropped (the restriction keeps the pre-jump value there);
    /// the value at `start` is the right-continuous one.
    pub fn restrict_shifted(&self, start: f64, end: f64) -> Result<StepFunction> {
        if !(start < end) || !self.domain.contains(start) || !self.domain.contains(end) {
            return Err(Error::WindowOutsideDomain { lo: start, hi: end });
        }
        let mut breaks = Vec::new();
        let mut values = vec![self.values[self.piece_index(start)]];
        for (i, &b) in self.breaks.iter().enumerate() {
            if b > start && b < end {
                breaks.push(b - start);
                values.push(self.values[i + 1]);
            }
        }
        StepFunction::new(Interval::new(0.0, end - start)?, breaks, values)
    }

    /// Hysteretic grid quantization with spacing `eps` and symmetric index
    /// clamp `k_clamp`. The first emitted index is the nearest grid index to
    /// the first value (ties toward zero), or the clamped `seed` when given;
    /// each later piece clamps the previous emitted index into that piece's
    /// grid bracket. Emitted indices are finally clamped into ±`k_clamp`,
    /// and the clamped value feeds the hysteresis forward.
    pub fn quantize(&self, eps: f64, k_clamp: i64, seed: Option<i64>) -> Result<GridStepFunction> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidSpacing(eps));
        }
        let clamp_box = |k: i64| k.clamp(-k_clamp, k_clamp);
        let mut indices = Vec::with_capacity(self.values.len());
        let mut prev: i64 = 0;
        for (i, &v) in self.values.iter().enumerate() {
            let (blo, bhi) = grid_bracket(v, eps);
            let k = if i == 0 {
                match seed {
                    Some(s) => s.clamp(blo, bhi),
                    None => nearest_index_ties_to_zero(v, eps),
                }
            } else {
                prev.clamp(blo, bhi)
            };
            let k = clamp_box(k);
            indices.push(k);
            prev = k;
        }
        GridStepFunction::new(eps, self.domain, self.breaks.clone(), indices)
    }

    /// Default index clamp for this function: ⌊‖u‖∞ / ε⌋.
    pub fn default_clamp(&self, eps: f64) -> i64 {
        let sup = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        (sup / eps).floor() as i64
    }
}

/// Grid index bracket [⌊v/ε⌋, ⌈v/ε⌉], degenerate when v is exactly on the
/// grid in floating point.
fn grid_bracket(v: f64, eps: f64) -> (i64, i64) {
    let k = (v / eps).round();
    if k * eps == v {
        return (k as i64, k as i64);
    }
    let x = v / eps;
    (x.floor() as i64, x.ceil() as i64)
}

fn nearest_index_ties_to_zero(v: f64, eps: f64) -> i64 {
    let x = v / eps;
    let fl = x.floor();
    let frac = x - fl;
    let k = if frac > 0.5 {
        fl + 1.0
    } else if frac < 0.5 {
        fl
    } else if x >= 0.0 {
        fl
    } else {
        fl + 1.0
    };
    k as i64
}

/// Step function whose values live on the grid εℤ, stored as exact indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridStepFunction {
    eps: f64,
    domain: Interval,
    breaks: Vec<f64>,
    indices: Vec<i64>,
}

impl GridStepFunction {
    pub fn new(eps: f64, domain: Interval, breaks: Vec<f64>, indices: Vec<i64>) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidSpacing(eps));
        }
        if indices.len() != breaks.len() + 1 {
            return Err(Error::InvalidValues);
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidBreakpoints);
        }
        if breaks
            .iter()
            .any(|&b| !b.is_finite() || b <= domain.lo || b >= domain.hi)
        {
            return Err(Error::InvalidBreakpoints);
        }
        let mut g = Self { eps, domain, breaks, indices };
        g.merge_equal();
        Ok(g)
    }

    pub fn constant(eps: f64, domain: Interval, index: i64) -> Result<Self> {
        Self::new(eps, domain, vec![], vec![index])
    }

    fn merge_equal(&mut self) {
        let mut breaks = Vec::with_capacity(self.breaks.len());
        let mut indices = Vec::with_capacity(self.indices.len());
        indices.push(self.indices[0]);
        for (i, &b) in self.breaks.iter().enumerate() {
            let k = self.indices[i + 1];
            if k != *indices.last().unwrap() {
                breaks.push(b);
                indices.push(k);
            }
        }
        self.breaks = breaks;
        self.indices = indices;
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    pub fn to_step(&self) -> StepFunction {
        StepFunction {
            domain: self.domain,
            breaks: self.breaks.clone(),
            values: self.indices.iter().map(|&k| k as f64 * self.eps).collect(),
        }
    }

    pub fn eval_index(&self, x: f64) -> Result<i64> {
        if !self.domain.contains(x) {
            return Err(Error::PointOutsideDomain(x));
        }
        Ok(self.indices[self.breaks.partition_point(|&b| b <= x)])
    }

    pub fn trace_index(&self, x: f64, side: Side) -> Result<i64> {
        if !self.domain.contains(x) {
            return Err(Error::NoSidedLimit(x));
        }
        let i = match side {
            Side::Right => self.breaks.partition_point(|&b| b <= x),
            Side::Left => self.breaks.partition_point(|&b| b < x),
        };
        Ok(self.indices[i])
    }

    pub fn max_abs_index(&self) -> i64 {
        self.indices.iter().map(|k| k.abs()).max().unwrap_or(0)
    }

    /// Total variation in index units (multiply by ε for the real one).
    pub fn tv_index(&self) -> i64 {
        self.indices.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }

    /// Jump sizes in index units at breakpoints strictly after `x`.
    pub fn future_jump_index_sum(&self, x: f64) -> i64 {
        self.breaks
            .iter()
            .enumerate()
            .filter(|&(_, &b)| b > x)
            .map(|(i, _)| (self.indices[i + 1] - self.indices[i]).abs())
            .sum()
    }

    pub fn future_jump_count(&self, x: f64) -> usize {
        self.breaks.iter().filter(|&&b| b > x).count()
    }

    pub fn hull(&self) -> IndexHull {
        let lo = self.indices.iter().copied().min().unwrap();
        let hi = self.indices.iter().copied().max().unwrap();
        IndexHull { lo, hi }
    }

    /// Same restriction convention as the real-valued version.
    pub fn restrict_shifted(&self, start: f64, end: f64) -> Result<GridStepFunction> {
        if !(start < end) || !self.domain.contains(start) || !self.domain.contains(end) {
            return Err(Error::WindowOutsideDomain { lo: start, hi: end });
        }
        let mut breaks = Vec::new();
        let i0 = self.breaks.partition_point(|&b| b <= start);
        let mut indices = vec![self.indices[i0]];
        for (i, &b) in self.breaks.iter().enumerate() {
            if b > start && b < end {
                breaks.push(b - start);
                indices.push(self.indices[i + 1]);
            }
        }
        GridStepFunction::new(self.eps, Interval::new(0.0, end - start)?, breaks, indices)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seg(hi: f64) -> Interval {
        Interval::new(0.0, hi).unwrap()
    }

    #[test]
    fn tv_counts_interior_jumps() {
        let u = StepFunction::new(seg(4.0), vec![1.0, 2.0, 3.0], vec![0.0, 0.5, 2.0, -1.0])
            .unwrap();
        assert_eq!(u.tv_total(), 0.5 + 1.5 + 3.0);
        // Window [1, 3] counts only the jump at 2 (ends excluded).
        assert_eq!(u.tv(Interval::new(1.0, 3.0).unwrap()).unwrap(), 1.5);
        assert_eq!(u.tv(seg(4.0)).unwrap(), 5.0);
    }

    #[test]
    fn eval_is_right_continuous() {
        let u = StepFunction::new(seg(2.0), vec![1.0], vec![3.0, 7.0]).unwrap();
        assert_eq!(u.eval(1.0).unwrap(), 7.0);
        assert_eq!(u.trace(1.0, Side::Left).unwrap(), 3.0);
        assert_eq!(u.trace(1.0, Side::Right).unwrap(), 7.0);
        assert_eq!(u.eval(2.0).unwrap(), 7.0);
        assert!(u.eval(2.5).is_err());
    }

    #[test]
    fn equal_neighbors_merge() {
        let u = StepFunction::new(seg(3.0), vec![1.0, 2.0], vec![1.0, 1.0, 4.0]).unwrap();
        assert_eq!(u.breaks(), &[2.0]);
        assert_eq!(u.values(), &[1.0, 4.0]);
    }

    #[test]
    fn l1_distance_merged_sweep() {
        // |u − v| is 1 on [0,1), 0.5 on [1,1.5), 0 after: total 1.25.
        let u = StepFunction::new(seg(3.0), vec![1.0], vec![2.0, 0.5]).unwrap();
        let v = StepFunction::new(seg(3.0), vec![1.5], vec![1.0, 0.5]).unwrap();
        assert_eq!(u.l1_distance(&v).unwrap(), 1.25);
        assert_eq!(v.l1_distance(&u).unwrap(), 1.25);
    }

    #[test]
    fn l1_distance_half_line() {
        let dom = Interval::half_line_from(0.0).unwrap();
        let u = StepFunction::new(dom, vec![2.0], vec![1.0, 0.0]).unwrap();
        let v = StepFunction::constant(dom, 0.0).unwrap();
        assert_eq!(u.l1_distance(&v).unwrap(), 2.0);
        let w = StepFunction::constant(dom, 1.0).unwrap();
        assert!(matches!(u.l1_distance(&w), Err(Error::DivergingTail)));
    }

    #[test]
    fn range_hull_windows() {
        let u = StepFunction::new(seg(4.0), vec![1.0, 2.0, 3.0], vec![0.0, 2.0, -1.0, 0.5])
            .unwrap();
        let h = u.range_hull(seg(4.0)).unwrap();
        assert_eq!((h.lo, h.hi), (-1.0, 2.0));
        // Degenerate window at a breakpoint sees the right value.
        let p = u.range_hull(Interval::point(2.0).unwrap()).unwrap();
        assert_eq!((p.lo, p.hi), (-1.0, -1.0));
        let w = u.range_hull(Interval::new(0.0, 1.5).unwrap()).unwrap();
        assert_eq!((w.lo, w.hi), (0.0, 2.0));
    }

    #[test]
    fn restriction_shifts_and_drops_end_jump() {
        let u = StepFunction::new(seg(4.0), vec![1.0, 2.0], vec![5.0, 6.0, 7.0]).unwrap();
        // Window [1, 2]: starts on the post-jump value 6, the jump at 2 is dropped.
        let r = u.restrict_shifted(1.0, 2.0).unwrap();
        assert_eq!(r.domain(), seg(1.0));
        assert_eq!(r.values(), &[6.0]);
        let r2 = u.restrict_shifted(0.5, 4.0).unwrap();
        assert_eq!(r2.breaks(), &[0.5, 1.5]);
        assert_eq!(r2.values(), &[5.0, 6.0, 7.0]);
    }

    #[test]
    fn quantize_nearest_with_ties_toward_zero() {
        let u = StepFunction::constant(seg(1.0), 0.7).unwrap();
        let q = u.quantize(0.5, 10, None).unwrap();
        // 0.7/0.5 = 1.4 → nearest index 1, value 0.5.
        assert_eq!(q.indices(), &[1]);
        let v = StepFunction::constant(seg(1.0), 0.25).unwrap();
        assert_eq!(v.quantize(0.5, 10, None).unwrap().indices(), &[0]);
        let w = StepFunction::constant(seg(1.0), -0.25).unwrap();
        assert_eq!(w.quantize(0.5, 10, None).unwrap().indices(), &[0]);
    }

    #[test]
    fn quantize_hysteresis_flattens_oscillation() {
        // Oscillation inside one grid cell quantizes to a constant.
        let u = StepFunction::new(
            seg(5.0),
            vec![1.0, 2.0, 3.0, 4.0],
            vec![0.9, 1.1, 0.9, 1.1, 0.9],
        )
        .unwrap();
        let q = u.quantize(1.0, 10, None).unwrap();
        assert_eq!(q.indices(), &[1]);
        assert_eq!(q.breaks(), &[] as &[f64]);
    }

    #[test]
    fn quantize_exact_grid_values_pass_through() {
        let u = StepFunction::new(seg(3.0), vec![1.0, 2.0], vec![0.5, -1.0, 0.0]).unwrap();
        let q = u.quantize(0.5, 10, None).unwrap();
        assert_eq!(q.indices(), &[1, -2, 0]);
        assert_eq!(q.tv_index(), 5);
    }

    #[test]
    fn quantize_seed_controls_first_piece() {
        let u = StepFunction::constant(seg(1.0), 0.7).unwrap();
        // Bracket of 0.7 at ε = 0.5 is [1, 2]; a seed of 4 clamps down to 2.
        let q = u.quantize(0.5, 10, Some(4)).unwrap();
        assert_eq!(q.indices(), &[2]);
        let q0 = u.quantize(0.5, 10, Some(0)).unwrap();
        assert_eq!(q0.indices(), &[1]);
    }

    #[test]
    fn quantize_clamp_caps_magnitude() {
        let u = StepFunction::new(seg(2.0), vec![1.0], vec![0.9, 0.1]).unwrap();
        let clamp = u.default_clamp(0.5);
        assert_eq!(clamp, 1);
        let q = u.quantize(0.5, clamp, None).unwrap();
        assert!(q.max_abs_index() <= 1);
        // Hysteresis holds index 1 through the second piece, so the pieces merge.
        assert_eq!(q.indices(), &[1]);
    }

    #[test]
    fn grid_future_jump_bookkeeping() {
        let g = GridStepFunction::new(1.0, seg(4.0), vec![1.0, 3.0], vec![0, 2, -1]).unwrap();
        assert_eq!(g.future_jump_index_sum(0.0), 5);
        assert_eq!(g.future_jump_index_sum(1.0), 3);
        assert_eq!(g.future_jump_index_sum(3.0), 0);
        assert_eq!(g.future_jump_count(1.0), 1);
        assert_eq!(g.hull(), IndexHull { lo: -1, hi: 2 });
    }

    fn arb_step(max_pieces: usize) -> impl Strategy<Value = StepFunction> {
        (1..=max_pieces)
            .prop_flat_map(|n| {
                (
                    proptest::collection::vec(0.01f64..0.99, n - 1),
                    proptest::collection::vec(-3.0f64..3.0, n),
                )
            })
            .prop_map(|(mut cuts, values)| {
                cuts.sort_by(f64::total_cmp);
                cuts.dedup();
                let values = values[..cuts.len() + 1].to_vec();
                StepFunction::new(seg(1.0), cuts, values).unwrap()
            })
    }

    proptest! {
        #[test]
        fn quantize_postconditions(u in arb_step(8), eps in 0.05f64..1.0) {
            let clamp = u.default_clamp(eps);
            let q = u.quantize(eps, clamp, None).unwrap();
            let qs = q.to_step();
            // Pointwise closeness: |q − u| < ε at every piece of both.
            let mut probes: Vec<f64> = vec![0.0, 1.0];
            probes.extend_from_slice(u.breaks());
            probes.extend_from_slice(qs.breaks());
            for &x in &probes {
                let d = (qs.eval(x).unwrap() - u.eval(x).unwrap()).abs();
                prop_assert!(d < eps + 1e-12, "pointwise gap {d} at {x} (eps {eps})");
            }
            // Norm never grows past the clamp.
            prop_assert!(q.max_abs_index() <= clamp);
            // Variation grows by less than one grid cell.
            let tv_q = q.tv_index() as f64 * eps;
            prop_assert!(tv_q <= u.tv_total() + eps + 1e-12,
                "tv {tv_q} vs {} + {eps}", u.tv_total());
        }

        #[test]
        fn quantize_preserves_monotonicity(
            mut values in proptest::collection::vec(-3.0f64..3.0, 1..6),
            eps in 0.05f64..1.0,
        ) {
            values.sort_by(f64::total_cmp);
            let n = values.len();
            let breaks: Vec<f64> = (1..n).map(|i| i as f64 / n as f64).collect();
            let u = StepFunction::new(seg(1.0), breaks, values).unwrap();
            let q = u.quantize(eps, u.default_clamp(eps), None).unwrap();
            prop_assert!(q.indices().windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn l1_is_a_metric_on_examples(a in arb_step(6), b in arb_step(6), c in arb_step(6)) {
            let ab = a.l1_distance(&b).unwrap();
            let ba = b.l1_distance(&a).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!(ab >= 0.0);
            let ac = a.l1_distance(&c).unwrap();
            let cb = c.l1_distance(&b).unwrap();
            prop_assert!(ab <= ac + cb + 1e-9);
            prop_assert!((a.l1_distance(&a).unwrap()).abs() < 1e-15);
        }

        #[test]
        fn tv_is_additive_over_adjacent_windows(u in arb_step(8), cut in 0.01f64..0.99) {
            // Jumps exactly at the cut are counted by neither half, so the
            // two halves sum to at most the total; with a cut off every
            // breakpoint they sum exactly.
            let left = u.tv(Interval::new(0.0, cut).unwrap()).unwrap();
            let right = u.tv(Interval::new(cut, 1.0).unwrap()).unwrap();
            let total = u.tv(seg(1.0)).unwrap();
            if u.breaks().iter().all(|&b| b != cut) {
                prop_assert!((left + right - total).abs() < 1e-12);
            } else {
                prop_assert!(left + right <= total + 1e-12);
            }
        }
    }
}
