//! Certificate checks for computed solutions.
//!
//! Everything a solution claims is re-checked here from the stored artifacts
//! alone: weak-form entropy inequalities tested against compactly supported
//! bumps, boundary admissibility in the six-case flux form, L¹ contraction
//! and flux-stability bounds, and the a-priori range, variation and time
//! modulus estimates. The checks are falsifiers: each one evaluates an exact
//! quantity (modulo roundoff, with pinned tolerances) and reports the worst
//! margin found, so a corrupted solution fails loudly rather than averaging
//! out.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::{IndexHull, PlcFlux, SpaceTimeFlux};
use crate::interval::Interval;
use crate::nonaut::initial_v_index;
use crate::stepfn::GridStepFunction;
use crate::tracker::{SlabSolution, Solution, Trigger};

/// Relative tolerance for boundary admissibility residuals.
pub const ADMISSIBILITY_TOL: f64 = 1e-12;

/// Relative slack applied to comparison bounds (contraction, stability,
/// time modulus): a measured distance may exceed its bound by at most
/// `bound * COMPARISON_REL + COMPARISON_ABS`.
pub const COMPARISON_REL: f64 = 1e-9;
pub const COMPARISON_ABS: f64 = 1e-12;

/// Hard cap on quadrature cells per residual evaluation.
const CELL_BUDGET: usize = 4_000_000;

// Gauss-Legendre 6-point rule on [-1, 1]: exact through degree 11, which
// covers every integrand below (polynomial degree at most 8 per variable
// after the trapezoid map).
const GL_NODES: [f64; 3] = [0.238_619_186_083_196_9, 0.661_209_386_466_264_5, 0.932_469_514_203_152_1];
const GL_WEIGHTS: [f64; 3] = [0.467_913_934_572_691, 0.360_761_573_048_138_6, 0.171_324_492_379_170_4];

fn gl6(a: f64, b: f64) -> [(f64, f64); 6] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [(0.0, 0.0); 6];
    for i in 0..3 {
        out[2 * i] = (c - h * GL_NODES[i], h * GL_WEIGHTS[i]);
        out[2 * i + 1] = (c + h * GL_NODES[i], h * GL_WEIGHTS[i]);
    }
    out
}

/// Tensor test function `B((t-t0)/rt) * B((x-x0)/rx)` with the quartic bump
/// `B(s) = (1-s^2)^2` on (-1, 1), zero outside. C¹ across the support edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpTestFunction {
    pub t0: f64,
    pub x0: f64,
    pub rt: f64,
    pub rx: f64,
}

fn bump_profile(s: f64) -> f64 {
    if s.abs() < 1.0 {
        let q = 1.0 - s * s;
        q * q
    } else {
        0.0
    }
}

fn bump_profile_deriv(s: f64) -> f64 {
    if s.abs() < 1.0 {
        -4.0 * s * (1.0 - s * s)
    } else {
        0.0
    }
}

impl BumpTestFunction {
    pub fn new(t0: f64, x0: f64, rt: f64, rx: f64) -> Result<Self> {
        if !(rt.is_finite() && rt > 0.0 && rx.is_finite() && rx > 0.0)
            || !t0.is_finite()
            || !x0.is_finite()
        {
            return Err(Error::InvalidValues);
        }
        Ok(BumpTestFunction { t0, x0, rt, rx })
    }

    pub fn value(&self, t: f64, x: f64) -> f64 {
        bump_profile((t - self.t0) / self.rt) * bump_profile((x - self.x0) / self.rx)
    }

    pub fn dt(&self, t: f64, x: f64) -> f64 {
        bump_profile_deriv((t - self.t0) / self.rt) / self.rt
            * bump_profile((x - self.x0) / self.rx)
    }

    pub fn dx(&self, t: f64, x: f64) -> f64 {
        bump_profile((t - self.t0) / self.rt) * bump_profile_deriv((x - self.x0) / self.rx)
            / self.rx
    }

    /// ∫∫ φ over the full support: (16/15)² · rt · rx.
    pub fn mass(&self) -> f64 {
        (16.0 / 15.0) * (16.0 / 15.0) * self.rt * self.rx
    }
}

/// Quadrature tolerance for one residual evaluation: the integrals are exact
/// for the rule used, so only accumulated roundoff remains.
pub fn quad_tolerance(bump: &BumpTestFunction) -> f64 {
    1e-7 * bump.mass()
}

/// One-sided Kruzhkov pair: `eta(u) = (u-k)^+` with `sgn^+` when `positive`,
/// `(u-k)^-` with `sgn^-` otherwise. The associated flux is
/// `sgn(u-k) * (f(u) - f(k))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiEntropyPair {
    pub k: f64,
    pub positive: bool,
}

impl SemiEntropyPair {
    pub fn eta(&self, u: f64) -> f64 {
        if self.positive {
            (u - self.k).max(0.0)
        } else {
            (self.k - u).max(0.0)
        }
    }

    /// `sgn^+(u-k)` is 1 strictly above k and 0 otherwise; `sgn^-(u-k)` is
    /// -1 strictly below k and 0 otherwise.
    pub fn sgn(&self, u: f64) -> f64 {
        if self.positive {
            if u > self.k {
                1.0
            } else {
                0.0
            }
        } else if u < self.k {
            -1.0
        } else {
            0.0
        }
    }

    pub fn entropy_flux(&self, u: f64, f_u: f64, f_k: f64) -> f64 {
        self.sgn(u) * (f_u - f_k)
    }
}

/// Multiplier for the boundary terms of the weak inequality: the Lipschitz
/// norm of the flux over the full time horizon and the grid-aligned state
/// hull of the problem.
pub fn boundary_weight(sol: &Solution) -> Result<f64> {
    let prep = &sol.prepared;
    let t_box = Interval::new(0.0, prep.horizon)?;
    prep.flux.sup_du_norm(t_box, prep.hull.as_interval(prep.eps))
}

/// Value of the slab's frozen flux at an arbitrary state. States inside the
/// tabulated range use the stored tabulation; outside, the smooth flux is
/// tabulated once more on the same grid over a range extended to reach the
/// query (the two tabulations agree exactly on shared nodes).
fn slab_flux_value(slab: &SlabSolution, smooth: &SpaceTimeFlux, k: f64) -> Result<f64> {
    if !k.is_finite() {
        return Err(Error::InvalidValues);
    }
    let plc = &slab.plc;
    let eps = plc.eps();
    let lo = plc.k_min() as f64 * eps;
    let hi = plc.k_max() as f64 * eps;
    if k >= lo && k <= hi {
        return plc.eval(k);
    }
    let kf = (k / eps).floor() as i64 - 1;
    let kc = (k / eps).ceil() as i64 + 1;
    let hull = IndexHull {
        lo: plc.k_min().min(kf),
        hi: plc.k_max().max(kc),
    };
    PlcFlux::from_index_range(smooth, slab.t_start, eps, hull)?.eval(k)
}

/// A cell wall: either a window edge (constant) or a front path (linear).
#[derive(Clone, Copy)]
enum Wall {
    Fixed(f64),
    Moving { pos: f64, speed: f64, t_ref: f64 },
}

impl Wall {
    fn at(&self, t: f64) -> f64 {
        match *self {
            Wall::Fixed(x) => x,
            Wall::Moving { pos, speed, t_ref } => pos + speed * (t - t_ref),
        }
    }
}

/// Residual of the weak one-sided entropy inequality against one bump:
///
/// ```text
///   ∫∫ [eta(u) φ_t + q(t, u) φ_x] dx dt
/// + ∫ eta(u_o) φ(0, ·) dx  -  ∫ eta(u(T, ·)) φ(T, ·) dx
/// + weight ∫ eta(u_b) φ(·, left edge) dt
/// + weight ∫ eta(u_b) φ(·, right edge) dt   (bounded domain only)
/// ```
///
/// where q pairs the slab-frozen flux with the entropy. For levels inside
/// the grid state hull a valid solution yields a value no smaller than
/// `-quad_tolerance(bump)`; past the hull on the trivial side (above for the
/// positive pair, below for the negative one) the residual vanishes
/// identically. Levels far outside the hull on the other side are not
/// certified: there the boundary compensation is linear in the level while
/// a polynomial flux is not. The quadrature is exact for piecewise-constant
/// states and polynomial walls, so a genuine violation shows up at its
/// analytic size.
pub fn entropy_residual(
    sol: &Solution,
    pair: &SemiEntropyPair,
    bump: &BumpTestFunction,
    weight: f64,
) -> Result<f64> {
    let prep = &sol.prepared;
    let eps = prep.eps;
    let horizon = prep.horizon;
    let length = prep.domain.length();
    let mut acc = 0.0;
    let mut cells = 0usize;

    // Interior term, slab by slab. Within a slab the front set is fixed
    // between snapshots and every front path is a straight line, so cutting
    // time at snapshots and at window crossings makes each cell an exact
    // trapezoid with a constant state.
    for slab in &sol.slabs {
        let f_k = slab_flux_value(slab, &prep.flux, pair.k)?;
        let t_lo = slab.t_start.max(bump.t0 - bump.rt).max(0.0);
        let t_hi = slab.t_end.min(bump.t0 + bump.rt);
        if t_hi <= t_lo {
            continue;
        }
        let xw_lo = (bump.x0 - bump.rx).max(0.0);
        let xw_hi = match length {
            Some(l) => (bump.x0 + bump.rx).min(l),
            None => bump.x0 + bump.rx,
        };
        if xw_hi <= xw_lo {
            continue;
        }

        let mut tcuts: Vec<f64> = vec![t_lo, t_hi];
        for s in &slab.snapshots {
            if s.time > t_lo && s.time < t_hi {
                tcuts.push(s.time);
            }
        }
        tcuts.sort_by(f64::total_cmp);

        for strip in tcuts.windows(2) {
            let (ta, tb) = (strip[0], strip[1]);
            if !(tb > ta) {
                continue;
            }
            let tm0 = 0.5 * (ta + tb);
            let i = slab.snapshots.partition_point(|s| s.time <= tm0);
            let snap = &slab.snapshots[i.saturating_sub(1)];

            // Cut again where a front path crosses a window edge, so the
            // wall set is constant on each sub-strip.
            let mut sub: Vec<f64> = vec![ta, tb];
            for f in &snap.fronts {
                if f.speed != 0.0 {
                    for xe in [xw_lo, xw_hi] {
                        let tc = snap.time + (xe - f.pos) / f.speed;
                        if tc > ta && tc < tb {
                            sub.push(tc);
                        }
                    }
                }
            }
            sub.sort_by(f64::total_cmp);

            for piece in sub.windows(2) {
                let (sa, sb) = (piece[0], piece[1]);
                if !(sb > sa) {
                    continue;
                }
                let tm = 0.5 * (sa + sb);
                let mut walls: Vec<Wall> = vec![Wall::Fixed(xw_lo)];
                for f in &snap.fronts {
                    let xm = f.pos + f.speed * (tm - snap.time);
                    if xm > xw_lo && xm < xw_hi {
                        walls.push(Wall::Moving {
                            pos: f.pos,
                            speed: f.speed,
                            t_ref: snap.time,
                        });
                    }
                }
                walls.push(Wall::Fixed(xw_hi));
                let prof = slab.profile_index_at(tm)?;

                for wpair in walls.windows(2) {
                    let xl_m = wpair[0].at(tm);
                    let xr_m = wpair[1].at(tm);
                    if !(xr_m > xl_m) {
                        continue;
                    }
                    let idx = prof.eval_index(0.5 * (xl_m + xr_m))?;
                    let u = idx as f64 * eps;
                    let eta = pair.eta(u);
                    let q = pair.entropy_flux(u, slab.plc.node(idx)?, f_k);
                    if eta == 0.0 && q == 0.0 {
                        continue;
                    }
                    cells += 1;
                    if cells > CELL_BUDGET {
                        return Err(Error::QuadratureBudget(cells));
                    }
                    for (tq, wt) in gl6(sa, sb) {
                        let xl = wpair[0].at(tq);
                        let xr = wpair[1].at(tq);
                        let width = xr - xl;
                        if width <= 0.0 {
                            continue;
                        }
                        for (sq, ws) in gl6(0.0, 1.0) {
                            let x = xl + sq * width;
                            acc += wt * ws * width * (eta * bump.dt(tq, x) + q * bump.dx(tq, x));
                        }
                    }
                }
            }
        }
    }

    // Initial and terminal line terms.
    acc += space_line_integral(&prep.initial, 0.0, pair, bump, length)?;
    acc -= space_line_integral(&sol.profile_index_at(horizon)?, horizon, pair, bump, length)?;

    // Boundary line terms, weighted by the flux Lipschitz norm.
    acc += weight * time_line_integral(&prep.left_schedule, 0.0, pair, bump, horizon)?;
    if let (Some(len), Some(sched)) = (length, prep.right_schedule.as_ref()) {
        acc += weight * time_line_integral(sched, len, pair, bump, horizon)?;
    }

    Ok(acc)
}

/// ∫ eta(g(x)) φ(t_line, x) dx over the window where the bump meets the
/// domain. Exact per piece.
fn space_line_integral(
    g: &GridStepFunction,
    t_line: f64,
    pair: &SemiEntropyPair,
    bump: &BumpTestFunction,
    length: Option<f64>,
) -> Result<f64> {
    let tb = bump_profile((t_line - bump.t0) / bump.rt);
    if tb == 0.0 {
        return Ok(0.0);
    }
    let w_lo = (bump.x0 - bump.rx).max(0.0);
    let w_hi = match length {
        Some(l) => (bump.x0 + bump.rx).min(l),
        None => bump.x0 + bump.rx,
    };
    if w_hi <= w_lo {
        return Ok(0.0);
    }
    let eps = g.eps();
    let mut acc = 0.0;
    let breaks = g.breaks();
    let indices = g.indices();
    let mut a = g.domain().lo;
    for (i, &idx) in indices.iter().enumerate() {
        let b = if i < breaks.len() { breaks[i] } else { f64::INFINITY };
        let lo = a.max(w_lo);
        let hi = b.min(w_hi);
        a = b;
        if hi <= lo {
            continue;
        }
        let eta = pair.eta(idx as f64 * eps);
        if eta == 0.0 {
            continue;
        }
        for (xq, wq) in gl6(lo, hi) {
            acc += wq * eta * tb * bump_profile((xq - bump.x0) / bump.rx);
        }
    }
    Ok(acc)
}

/// ∫ eta(sched(t)) φ(t, x_line) dt over the window where the bump meets the
/// time axis. Exact per piece.
fn time_line_integral(
    sched: &GridStepFunction,
    x_line: f64,
    pair: &SemiEntropyPair,
    bump: &BumpTestFunction,
    horizon: f64,
) -> Result<f64> {
    let xb = bump_profile((x_line - bump.x0) / bump.rx);
    if xb == 0.0 {
        return Ok(0.0);
    }
    let w_lo = (bump.t0 - bump.rt).max(0.0);
    let w_hi = (bump.t0 + bump.rt).min(horizon);
    if w_hi <= w_lo {
        return Ok(0.0);
    }
    let eps = sched.eps();
    let mut acc = 0.0;
    let breaks = sched.breaks();
    let indices = sched.indices();
    let mut a = sched.domain().lo;
    for (i, &idx) in indices.iter().enumerate() {
        let b = if i < breaks.len() { breaks[i] } else { sched.domain().hi };
        let lo = a.max(w_lo);
        let hi = b.min(w_hi);
        a = b;
        if hi <= lo {
            continue;
        }
        let eta = pair.eta(idx as f64 * eps);
        if eta == 0.0 {
            continue;
        }
        for (tq, wq) in gl6(lo, hi) {
            acc += wq * eta * xb * bump_profile((tq - bump.t0) / bump.rt);
        }
    }
    Ok(acc)
}

/// Six-case boundary interaction flux for trace `u`, datum `w` and level `k`.
/// Negative (for every k) exactly when the pair (u, w) is admissible at a
/// left edge; the right edge uses the negation.
pub fn boundary_flux(f: &dyn Fn(f64) -> f64, u: f64, w: f64, k: f64) -> f64 {
    if u <= w && w <= k {
        f(w) - f(u)
    } else if w <= u && u <= k {
        0.0
    } else if w <= k && k <= u {
        f(u) - f(k)
    } else if u <= k && k <= w {
        f(k) - f(u)
    } else if k <= u && u <= w {
        0.0
    } else {
        // k <= w <= u
        f(u) - f(w)
    }
}

/// Grid form of the six-case flux: states are node indices, comparisons are
/// exact integers and values come from the tabulation.
pub fn boundary_flux_grid(plc: &PlcFlux, u: i64, w: i64, k: i64) -> Result<f64> {
    Ok(if u <= w && w <= k {
        plc.node(w)? - plc.node(u)?
    } else if w <= u && u <= k {
        0.0
    } else if w <= k && k <= u {
        plc.node(u)? - plc.node(k)?
    } else if u <= k && k <= w {
        plc.node(k)? - plc.node(u)?
    } else if k <= u && u <= w {
        0.0
    } else {
        plc.node(u)? - plc.node(w)?
    })
}

/// Worst boundary admissibility residual over one edge of the domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    /// Largest signed residual found; admissible solutions stay at or below
    /// roundoff size.
    pub max_violation: f64,
    /// Normalisation: 1 plus the largest tabulated |flux| value involved.
    pub scale: f64,
    pub samples: usize,
}

impl AdmissibilityReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_violation <= tol * self.scale
    }
}

/// Sample the boundary admissibility inequality on every interval between
/// recorded events, for every grid level between trace and datum. The trace
/// is constant on each interval, so midpoint sampling is exhaustive; levels
/// beyond the pair are constant in k and covered by the end levels.
pub fn boundary_admissibility(sol: &Solution, left: bool) -> Result<AdmissibilityReport> {
    if !left && !sol.prepared.domain.is_segment() {
        return Err(Error::DomainMismatch);
    }
    let mut max_violation = f64::NEG_INFINITY;
    let mut scale = 1.0f64;
    let mut samples = 0usize;
    for slab in &sol.slabs {
        for v in slab.plc.node_values() {
            scale = scale.max(1.0 + v.abs());
        }
        let tau = crate::tracker::event_tolerance(sol.prepared.horizon);
        let mut cuts: Vec<f64> = vec![slab.t_start, slab.t_end];
        for r in &slab.records {
            if r.time > slab.t_start && r.time < slab.t_end {
                cuts.push(r.time);
            }
        }
        cuts.sort_by(f64::total_cmp);
        for pair in cuts.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if b - a <= 2.0 * tau {
                continue;
            }
            let ts = 0.5 * (a + b);
            let trace = slab.trace_index_at(ts, left)?;
            let datum = slab.datum_index_at(ts, left)?;
            let (lo, hi) = (trace.min(datum), trace.max(datum));
            for k in lo..=hi {
                let f_val = boundary_flux_grid(&slab.plc, trace, datum, k)?;
                let viol = if left { f_val } else { -f_val };
                max_violation = max_violation.max(viol);
                samples += 1;
            }
        }
    }
    if samples == 0 {
        max_violation = 0.0;
    }
    Ok(AdmissibilityReport {
        max_violation,
        scale,
        samples,
    })
}

/// Measured distances against the L¹ contraction bound
/// `|u0 - v0|_1 + Lip(f) * |ub - vb|_{L1(0,t)}` for two runs of the same
/// flux on the same grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub times: Vec<f64>,
    pub distances: Vec<f64>,
    pub bounds: Vec<f64>,
    /// Worst `distance - slackened bound`; non-positive means every sample
    /// sits inside its certificate.
    pub max_excess: f64,
}

impl ComparisonReport {
    pub fn passes(&self) -> bool {
        self.max_excess <= 0.0
    }
}

fn check_comparable(a: &Solution, b: &Solution) -> Result<()> {
    if a.prepared.eps != b.prepared.eps
        || a.prepared.domain != b.prepared.domain
        || a.prepared.horizon != b.prepared.horizon
        || a.depth != b.depth
    {
        return Err(Error::DomainMismatch);
    }
    Ok(())
}

/// Exact stability in the initial and boundary data: solutions of the same
/// flux on the same grid contract in L¹, with boundary differences entering
/// through the flux Lipschitz norm over the joint state hull.
pub fn contraction_check(a: &Solution, b: &Solution, times: &[f64]) -> Result<ComparisonReport> {
    check_comparable(a, b)?;
    if a.prepared.flux.coeffs() != b.prepared.flux.coeffs() {
        return Err(Error::DomainMismatch);
    }
    let joint = a.prepared.hull.hull_with(&b.prepared.hull);
    let t_box = Interval::new(0.0, a.prepared.horizon)?;
    let lip = a
        .prepared
        .flux
        .sup_du_norm(t_box, joint.as_interval(a.prepared.eps))?;
    let d0 = a
        .prepared
        .initial
        .to_step()
        .l1_distance(&b.prepared.initial.to_step())?;
    let mut report = ComparisonReport {
        times: times.to_vec(),
        distances: Vec::with_capacity(times.len()),
        bounds: Vec::with_capacity(times.len()),
        max_excess: f64::NEG_INFINITY,
    };
    for &t in times {
        let dist = a.l1_distance_at(b, t)?;
        let mut sched = 0.0;
        if t > 0.0 {
            sched += schedule_l1(&a.prepared.left_schedule, &b.prepared.left_schedule, t)?;
            if let (Some(ra), Some(rb)) = (
                a.prepared.right_schedule.as_ref(),
                b.prepared.right_schedule.as_ref(),
            ) {
                sched += schedule_l1(ra, rb, t)?;
            }
        }
        let bound = d0 + lip * sched;
        report.distances.push(dist);
        report.bounds.push(bound);
        report.max_excess = report
            .max_excess
            .max(dist - bound * (1.0 + COMPARISON_REL) - COMPARISON_ABS);
    }
    Ok(report)
}

fn schedule_l1(a: &GridStepFunction, b: &GridStepFunction, t: f64) -> Result<f64> {
    a.restrict_shifted(0.0, t)?
        .to_step()
        .l1_distance(&b.restrict_shifted(0.0, t)?.to_step())
}

/// Variation budget available at time t, in real units: interior variation
/// plus boundary jumps scheduled up to t plus the corner gaps.
fn windowed_variation(sol: &Solution, t: f64) -> Result<f64> {
    let prep = &sol.prepared;
    let mut v = prep.initial.tv_index();
    v += (prep.left_schedule.indices()[0] - prep.initial.indices()[0]).abs();
    if let Some(r) = &prep.right_schedule {
        v += (r.indices()[0] - prep.initial.indices().last().unwrap()).abs();
    }
    if t > 0.0 {
        v += prep.left_schedule.restrict_shifted(0.0, t)?.tv_index();
        if let Some(r) = &prep.right_schedule {
            v += r.restrict_shifted(0.0, t)?.tv_index();
        }
    }
    Ok(v as f64 * prep.eps)
}

/// Distances between two runs with the same data and grids but different
/// fluxes, against the bound
/// `max(1, Lip(g)) * Lip(f - g; [0,t]) * K(t) * t`.
pub fn flux_stability_check(a: &Solution, b: &Solution, times: &[f64]) -> Result<ComparisonReport> {
    check_comparable(a, b)?;
    let joint = a.prepared.hull.hull_with(&b.prepared.hull);
    let u_box = joint.as_interval(a.prepared.eps);
    let t_full = Interval::new(0.0, a.prepared.horizon)?;
    let lip_g = b.prepared.flux.sup_du_norm(t_full, u_box)?.max(1.0);
    let diff = a.prepared.flux.sub(&b.prepared.flux);
    let mut report = ComparisonReport {
        times: times.to_vec(),
        distances: Vec::with_capacity(times.len()),
        bounds: Vec::with_capacity(times.len()),
        max_excess: f64::NEG_INFINITY,
    };
    for &t in times {
        let dist = a.l1_distance_at(b, t)?;
        let bound = if t > 0.0 {
            let lip_diff = diff.sup_du_norm(Interval::new(0.0, t)?, u_box)?;
            lip_g * lip_diff * windowed_variation(a, t)? * t
        } else {
            0.0
        };
        report.distances.push(dist);
        report.bounds.push(bound);
        report.max_excess = report
            .max_excess
            .max(dist - bound * (1.0 + COMPARISON_REL) - COMPARISON_ABS);
    }
    Ok(report)
}

/// A-priori estimate audit for one solution: range and variation stay inside
/// their budgets (exact integers), the profile path is Lipschitz in time,
/// and the interaction ledger traces are monotone event by event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Worst `allowed - attained` sup-norm slack over snapshots, index units.
    pub range_margin_index: i64,
    /// Worst `budget - attained` variation slack over snapshots, index units.
    pub tv_margin_index: i64,
    /// Worst slackened-bound minus distance over sampled time pairs.
    pub time_lipschitz_margin: f64,
    /// Whole-run interaction trace (variation plus scheduled jumps plus
    /// corner gaps) never increases, across slab seams included.
    pub glimm_trace_monotone: bool,
    pub v_violations: usize,
    /// Events where the integer event budget rose without the trace
    /// strictly falling (time-zero gluing excluded).
    pub budget_violations: usize,
    /// Events violating the literal weighted-count alternative. Informational:
    /// boundary absorptions genuinely break it while every certified budget
    /// still holds, so it does not gate `passes`.
    pub sharp_violations: usize,
    pub records_checked: usize,
    pub passes: bool,
}

/// Audit every a-priori bound a finished run certifies.
pub fn bound_report(sol: &Solution) -> Result<BoundReport> {
    let prep = &sol.prepared;
    let eps = prep.eps;
    let v0 = initial_v_index(prep);

    // Range and variation at every snapshot, in exact index arithmetic.
    let mut range_margin = i64::MAX;
    let mut tv_margin = i64::MAX;
    let init_sup = prep.initial.max_abs_index();
    for slab in &sol.slabs {
        for snap in &slab.snapshots {
            let prof = slab.profile_index_at(snap.time)?;
            let allowed = windowed_sup_index(prep, snap.time);
            range_margin = range_margin.min(allowed.max(init_sup) - prof.max_abs_index());
            tv_margin = tv_margin.min(v0 - prof.tv_index());
        }
    }

    // Global interaction trace: each slab's ledger values plus the variation
    // still scheduled in later slabs plus the seam jumps dropped by the slab
    // restrictions.
    let n = sol.slabs.len();
    let mut tails = vec![0i64; n + 1];
    for i in (0..n).rev() {
        let mut tail = tails[i + 1];
        if i + 1 < n {
            let next = &sol.slabs[i + 1];
            let cur = &sol.slabs[i];
            tail += next.left_schedule.tv_index();
            tail += (next.left_schedule.indices()[0]
                - cur.left_schedule.indices().last().unwrap())
            .abs();
            if let (Some(rn), Some(rc)) = (&next.right_schedule, &cur.right_schedule) {
                tail += rn.tv_index();
                tail += (rn.indices()[0] - rc.indices().last().unwrap()).abs();
            }
        }
        tails[i] = tail;
    }
    let mut monotone = true;
    let mut v_violations = 0usize;
    let mut budget_violations = 0usize;
    let mut sharp_violations = 0usize;
    let mut records_checked = 0usize;
    let mut last_g: Option<i64> = None;
    for (i, slab) in sol.slabs.iter().enumerate() {
        for rec in &slab.records {
            records_checked += 1;
            let g_pre = rec.pre.v_index() + tails[i];
            let g_post = rec.post.v_index() + tails[i];
            if let Some(prev) = last_g {
                if g_pre > prev {
                    monotone = false;
                }
            }
            if g_post > g_pre {
                monotone = false;
                v_violations += 1;
            }
            last_g = Some(g_post);
            if rec.trigger != Trigger::Initial {
                let dv = rec.post.v_index() - rec.pre.v_index();
                let db = rec.post.budget(prep.budget_weight) - rec.pre.budget(prep.budget_weight);
                if !(db <= 0 || dv <= -1) {
                    budget_violations += 1;
                }
                let ds = rec.post.sharp(prep.sharp_weight) - rec.pre.sharp(prep.sharp_weight);
                let tol = 1e-9 * (1.0 + rec.pre.sharp(prep.sharp_weight).abs());
                if !(ds <= tol || dv <= -1) {
                    sharp_violations += 1;
                }
            }
        }
    }

    // Time modulus on an even grid, all pairs.
    let t_box = Interval::new(0.0, prep.horizon)?;
    let sup_du = prep.flux.sup_du_norm(t_box, prep.hull.as_interval(eps))?;
    let grid: Vec<f64> = (0..50)
        .map(|i| prep.horizon * i as f64 / 49.0)
        .collect();
    let profiles: Vec<_> = grid
        .iter()
        .map(|&t| sol.profile_at(t))
        .collect::<Result<_>>()?;
    let mut lip_margin = f64::INFINITY;
    for i in 0..grid.len() {
        for j in i + 1..grid.len() {
            let dist = profiles[i].l1_distance(&profiles[j])?;
            let bound = sup_du * windowed_variation(sol, grid[j])? * (grid[j] - grid[i]);
            lip_margin = lip_margin
                .min(bound * (1.0 + COMPARISON_REL) + COMPARISON_ABS * (1.0 + bound) - dist);
        }
    }

    let passes = range_margin >= 0
        && tv_margin >= 0
        && lip_margin >= 0.0
        && monotone
        && v_violations == 0
        && budget_violations == 0;
    Ok(BoundReport {
        range_margin_index: range_margin,
        tv_margin_index: tv_margin,
        time_lipschitz_margin: lip_margin,
        glimm_trace_monotone: monotone,
        v_violations,
        budget_violations,
        sharp_violations,
        records_checked,
        passes,
    })
}

/// Sup norm allowed at time t: data supremum over everything seen so far.
fn windowed_sup_index(prep: &crate::tracker::PreparedProblem, t: f64) -> i64 {
    let mut m = prep.initial.max_abs_index();
    let sched_sup = |s: &GridStepFunction| -> i64 {
        let breaks = s.breaks();
        let cut = breaks.partition_point(|&b| b <= t);
        s.indices()[..=cut.min(s.indices().len() - 1)]
            .iter()
            .map(|i| i.abs())
            .max()
            .unwrap_or(0)
    };
    m = m.max(sched_sup(&prep.left_schedule));
    if let Some(r) = &prep.right_schedule {
        m = m.max(sched_sup(r));
    }
    m
}

/// Options for the full verification battery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Number of random entropy spot checks.
    pub entropy_samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            entropy_samples: 64,
            seed: 0,
        }
    }
}

/// Outcome of the full battery. `passes` summarises every gate; the fields
/// carry the worst values found so a failure can be located.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub records_checked: usize,
    pub chain_ok: bool,
    /// Worst relative gap between a recorded speed and the chord it claims.
    pub max_speed_error: f64,
    /// Worst one-sided envelope margin over all recorded fronts, normalised
    /// by the flux slope scale.
    pub min_chord_margin: f64,
    pub left_admissibility: AdmissibilityReport,
    pub right_admissibility: Option<AdmissibilityReport>,
    pub bounds: BoundReport,
    pub entropy_checks: usize,
    /// Worst residual divided by its quadrature tolerance; -1 is the gate.
    pub worst_entropy_ratio: f64,
    pub passes: bool,
}

/// Re-check a finished solution from its stored data alone: ledger chains,
/// recorded speeds and envelope margins against the slab tabulations,
/// boundary admissibility, the a-priori bound audit, and a seeded battery of
/// random entropy spot checks.
pub fn verify_solution(sol: &Solution, opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut chain_ok = true;
    let mut records_checked = 0usize;
    let mut max_speed_error = 0.0f64;
    let mut min_chord_margin = f64::INFINITY;
    for slab in &sol.slabs {
        let slope_scale = 1.0 + slab.plc.max_abs_slope();
        for pair in slab.records.windows(2) {
            if pair[1].pre != pair[0].post {
                chain_ok = false;
            }
        }
        for rec in &slab.records {
            records_checked += 1;
            for wpair in rec.outgoing.windows(2) {
                if wpair[0].right != wpair[1].left
                    || wpair[0].speed > wpair[1].speed + 1e-12 * slope_scale
                {
                    chain_ok = false;
                }
            }
            for w in &rec.outgoing {
                let chord = slab.plc.chord_speed(w.left, w.right)?;
                max_speed_error =
                    max_speed_error.max((w.speed - chord).abs() / slope_scale);
                let margin = crate::riemann::oleinik_margin(&slab.plc, w)? / slope_scale;
                min_chord_margin = min_chord_margin.min(margin);
            }
        }
    }
    if records_checked == 0 {
        min_chord_margin = 0.0;
    }

    let left_admissibility = boundary_admissibility(sol, true)?;
    let right_admissibility = if sol.prepared.domain.is_segment() {
        Some(boundary_admissibility(sol, false)?)
    } else {
        None
    };
    let bounds = bound_report(sol)?;

    // Seeded entropy spot checks: levels sweep the certified band (the grid
    // state hull), bumps cover the corners and edges as well as the interior.
    let prep = &sol.prepared;
    let weight = boundary_weight(sol)?;
    let hull_iv = prep.hull.as_interval(prep.eps);
    let reach = match prep.domain.length() {
        Some(l) => l,
        None => {
            let max_slope = sol
                .slabs
                .iter()
                .map(|s| s.plc.max_abs_slope())
                .fold(0.0f64, f64::max);
            let far_break = prep
                .initial
                .breaks()
                .last()
                .copied()
                .unwrap_or(0.0);
            (far_break + max_slope * prep.horizon).max(1.0) + 1.0
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst_ratio = f64::INFINITY;
    let mut entropy_checks = 0usize;
    for _ in 0..opts.entropy_samples {
        let k = rng.gen_range(hull_iv.lo..=hull_iv.hi);
        let pair = SemiEntropyPair {
            k,
            positive: rng.gen_bool(0.5),
        };
        let rt = prep.horizon * rng.gen_range(0.05..=0.45);
        let t0 = prep.horizon * rng.gen_range(-0.2..=1.2);
        let rx = reach * rng.gen_range(0.05..=0.45);
        let x0 = reach * rng.gen_range(-0.2..=1.2);
        let bump = BumpTestFunction::new(t0, x0, rt, rx)?;
        let residual = entropy_residual(sol, &pair, &bump, weight)?;
        worst_ratio = worst_ratio.min(residual / quad_tolerance(&bump));
        entropy_checks += 1;
    }
    if entropy_checks == 0 {
        worst_ratio = 0.0;
    }

    let passes = chain_ok
        && max_speed_error <= 1e-12
        && min_chord_margin >= -1e-12
        && left_admissibility.passes(ADMISSIBILITY_TOL)
        && right_admissibility
            .as_ref()
            .map_or(true, |r| r.passes(ADMISSIBILITY_TOL))
        && bounds.passes
        && worst_ratio >= -1.0;
    Ok(VerifyReport {
        records_checked,
        chain_ok,
        max_speed_error,
        min_chord_margin,
        left_admissibility,
        right_admissibility,
        bounds,
        entropy_checks,
        worst_entropy_ratio: worst_ratio,
        passes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::SpaceTimeFlux;
    use crate::stepfn::StepFunction;
    use crate::tracker::{run, Domain, Problem, SolveOptions};

    fn burgers() -> SpaceTimeFlux {
        SpaceTimeFlux::autonomous(&[0.0, 0.0, 0.5]).unwrap()
    }

    fn half_line(initial: StepFunction, boundary: StepFunction, horizon: f64) -> Problem {
        Problem {
            domain: Domain::HalfLine,
            flux: burgers(),
            initial,
            left_boundary: boundary,
            right_boundary: None,
            horizon,
            eps: 0.5,
        }
    }

    fn shock_solution() -> Solution {
        // Single shock 1 -> 0 from x = 1, speed 1/2, steady feed at the edge.
        let dom = Interval::half_line_from(0.0).unwrap();
        let init = StepFunction::new(dom, vec![1.0], vec![1.0, 0.0]).unwrap();
        let bdy = StepFunction::constant(Interval::new(0.0, 2.0).unwrap(), 1.0).unwrap();
        let p = half_line(init, bdy, 2.0);
        run(&p, SolveOptions::default()).unwrap()
    }

    #[test]
    fn six_case_boundary_flux_matches_hand_values() {
        let f = |v: f64| 0.5 * v * v;
        assert_eq!(boundary_flux(&f, -1.0, 0.0, -0.5), -0.375);
        assert_eq!(boundary_flux(&f, 1.0, 0.0, 0.5), 0.375);
        // Interleavings that pin the zero cases.
        assert_eq!(boundary_flux(&f, 0.2, 0.0, 0.5), 0.0);
        assert_eq!(boundary_flux(&f, 0.2, 0.5, 0.0), 0.0);
        // Case boundaries coincide where two orderings overlap.
        assert_eq!(boundary_flux(&f, 0.5, 0.5, 0.5), 0.0);
    }

    #[test]
    fn boundary_flux_is_continuous_and_matches_grid_form() {
        // Tabulated past the sampled states so nudged queries stay inside.
        let plc = PlcFlux::from_smooth(
            &burgers(),
            0.0,
            0.25,
            Interval::new(-3.0, 3.0).unwrap(),
        )
        .unwrap();
        let f = |v: f64| plc.eval(v).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let u = rng.gen_range(-8i64..=8);
            let w = rng.gen_range(-8i64..=8);
            let k = rng.gen_range(-8i64..=8);
            let grid = boundary_flux_grid(&plc, u, w, k).unwrap();
            let real = boundary_flux(&f, u as f64 * 0.25, w as f64 * 0.25, k as f64 * 0.25);
            assert!((grid - real).abs() <= 1e-15, "grid {grid} vs real {real}");
            // Continuity: nudging any argument moves the value by at most
            // the flux Lipschitz constant times the nudge.
            let (uf, wf, kf) = (u as f64 * 0.25, w as f64 * 0.25, k as f64 * 0.25);
            let d = 1e-9;
            for (du, dw, dk) in [(d, 0.0, 0.0), (0.0, d, 0.0), (0.0, 0.0, d)] {
                let moved = boundary_flux(&f, uf + du, wf + dw, kf + dk);
                assert!((moved - real).abs() <= 2.5 * d, "jump at {uf} {wf} {kf}");
            }
        }
    }

    #[test]
    fn bump_integrals_match_closed_forms() {
        let bump = BumpTestFunction::new(0.3, 1.7, 0.45, 0.8).unwrap();
        // The quartic profile integrates exactly under the 6-point rule.
        let mut mass = 0.0;
        let mut dt_total = 0.0;
        for (t, wt) in gl6(bump.t0 - bump.rt, bump.t0 + bump.rt) {
            for (x, wx) in gl6(bump.x0 - bump.rx, bump.x0 + bump.rx) {
                mass += wt * wx * bump.value(t, x);
                dt_total += wt * wx * bump.dt(t, x);
            }
        }
        assert!((mass - bump.mass()).abs() <= 1e-13 * bump.mass());
        assert!(dt_total.abs() <= 1e-13);
    }

    #[test]
    fn residual_is_exactly_zero_outside_the_range() {
        let sol = shock_solution();
        let w = boundary_weight(&sol).unwrap();
        let bump = BumpTestFunction::new(1.0, 1.5, 0.6, 0.7).unwrap();
        let above = SemiEntropyPair { k: 2.0, positive: true };
        assert_eq!(entropy_residual(&sol, &above, &bump, w).unwrap(), 0.0);
        let below = SemiEntropyPair { k: -2.0, positive: false };
        assert_eq!(entropy_residual(&sol, &below, &bump, w).unwrap(), 0.0);
    }

    #[test]
    fn shock_dissipation_matches_an_independent_line_integral() {
        let sol = shock_solution();
        let w = boundary_weight(&sol).unwrap();
        let bump = BumpTestFunction::new(1.0, 1.5, 0.6, 0.7).unwrap();
        let pair = SemiEntropyPair { k: 0.5, positive: true };
        let residual = entropy_residual(&sol, &pair, &bump, w).unwrap();
        // For a lone shock the weak form collapses to a line integral along
        // the path x = 1 + t/2 with constant dissipation density
        // s*(eta_r - eta_l) - (q_r - q_l) = k(1 - k)/2 = 1/8.
        let n = 20_000usize;
        let (a, b) = (0.4, 1.6);
        let h = (b - a) / n as f64;
        let mut reference = 0.0;
        for i in 0..=n {
            let t = a + i as f64 * h;
            let weight = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            reference += weight * bump.value(t, 1.0 + 0.5 * t);
        }
        reference *= 0.125 * h / 3.0;
        assert!(residual > 0.01, "expected strict dissipation, got {residual}");
        assert!(
            (residual - reference).abs() <= 1e-9,
            "residual {residual} vs line integral {reference}"
        );
    }

    #[test]
    fn constant_state_with_edge_bump_matches_closed_form() {
        // u identically 1/2; bump straddles the left edge, interior in time.
        let dom = Interval::half_line_from(0.0).unwrap();
        let init = StepFunction::constant(dom, 0.5).unwrap();
        let bdy = StepFunction::constant(Interval::new(0.0, 1.0).unwrap(), 0.5).unwrap();
        let p = half_line(init, bdy, 1.0);
        let sol = run(&p, SolveOptions::default()).unwrap();
        let w = boundary_weight(&sol).unwrap();
        assert_eq!(w, 0.5);
        let bump = BumpTestFunction::new(0.5, 0.0, 0.4, 0.8).unwrap();
        // Off-grid level below the state, reached through the tabulation
        // extension: f(-3/4) interpolates between the nodes at -1 and -1/2.
        let pair = SemiEntropyPair { k: -0.75, positive: true };
        let residual = entropy_residual(&sol, &pair, &bump, w).unwrap();
        let eta = 0.5 - (-0.75);
        let f_c = 0.125;
        let f_k = 0.5 * (0.5 + 0.125);
        let hand = (w * eta - (f_c - f_k)) * (16.0 / 15.0) * bump.rt;
        assert!(
            (residual - hand).abs() <= 1e-12 * (1.0 + hand.abs()),
            "residual {residual} vs hand value {hand}"
        );
    }

    #[test]
    fn absorbing_boundary_case_is_entropy_admissible() {
        let dom = Interval::half_line_from(0.0).unwrap();
        let init = StepFunction::constant(dom, -1.0).unwrap();
        let bdy = StepFunction::constant(Interval::new(0.0, 2.0).unwrap(), 0.0).unwrap();
        let p = half_line(init, bdy, 2.0);
        let sol = run(&p, SolveOptions::default()).unwrap();
        let w = boundary_weight(&sol).unwrap();
        let bump = BumpTestFunction::new(1.0, 0.0, 0.8, 1.0).unwrap();
        for k in [-0.5, -1.0, -0.25] {
            for positive in [true, false] {
                let pair = SemiEntropyPair { k, positive };
                let r = entropy_residual(&sol, &pair, &bump, w).unwrap();
                assert!(
                    r >= -quad_tolerance(&bump),
                    "violation at k={k} positive={positive}: {r}"
                );
            }
        }
    }

    #[test]
    fn wrong_shock_speed_is_flagged() {
        let mut sol = shock_solution();
        for snap in &mut sol.slabs[0].snapshots {
            for f in &mut snap.fronts {
                f.speed = 0.7;
            }
        }
        let w = boundary_weight(&sol).unwrap();
        let bump = BumpTestFunction::new(1.0, 1.7, 0.6, 0.7).unwrap();
        // The level at the bottom of the range turns the residual into the
        // plain weak-form defect, which the wrong speed makes strictly
        // negative: 0.7 * (0 - 1) - (f(0) - f(1)) = -0.2 per unit of bump.
        let pair = SemiEntropyPair { k: 0.0, positive: true };
        let r = entropy_residual(&sol, &pair, &bump, w).unwrap();
        assert!(r < -quad_tolerance(&bump), "undetected: {r}");
    }

    #[test]
    fn inverted_jump_is_flagged() {
        let mut sol = shock_solution();
        for snap in &mut sol.slabs[0].snapshots {
            for f in &mut snap.fronts {
                let l = f.left;
                f.left = f.right;
                f.right = l;
            }
        }
        let w = boundary_weight(&sol).unwrap();
        let bump = BumpTestFunction::new(1.0, 1.5, 0.6, 0.7).unwrap();
        // Chord speed still matches, but an upward jump must fan out: the
        // level between the states exposes it.
        let pair = SemiEntropyPair { k: 0.5, positive: true };
        let r = entropy_residual(&sol, &pair, &bump, w).unwrap();
        assert!(r < -quad_tolerance(&bump), "undetected: {r}");
    }

    #[test]
    fn admissibility_is_clean_for_tracked_runs() {
        let dom = Interval::half_line_from(0.0).unwrap();
        let init = StepFunction::constant(dom, -1.0).unwrap();
        let bdy = StepFunction::constant(Interval::new(0.0, 2.0).unwrap(), 0.0).unwrap();
        let sol = run(&half_line(init, bdy, 2.0), SolveOptions::default()).unwrap();
        let rep = boundary_admissibility(&sol, true).unwrap();
        assert!(rep.samples > 0);
        assert!(rep.passes(ADMISSIBILITY_TOL), "violation {}", rep.max_violation);

        let seg = Interval::new(0.0, 2.0).unwrap();
        let p = Problem {
            domain: Domain::Segment { length: 2.0 },
            flux: burgers(),
            initial: StepFunction::constant(seg, 0.0).unwrap(),
            left_boundary: StepFunction::new(
                Interval::new(0.0, 3.0).unwrap(),
                vec![1.0],
                vec![1.0, 0.0],
            )
            .unwrap(),
            right_boundary: Some(
                StepFunction::constant(Interval::new(0.0, 3.0).unwrap(), 0.0).unwrap(),
            ),
            horizon: 3.0,
            eps: 0.5,
        };
        let sol = run(&p, SolveOptions::default()).unwrap();
        for left in [true, false] {
            let rep = boundary_admissibility(&sol, left).unwrap();
            assert!(rep.passes(ADMISSIBILITY_TOL), "violation {}", rep.max_violation);
        }
    }

    #[test]
    fn admissibility_flags_a_corrupted_trace() {
        // High datum over a low initial state launches an entering shock.
        // Erasing it from the snapshots leaves trace 0 facing datum 1, which
        // is inadmissible at the level between them.
        let dom = Interval::half_line_from(0.0).unwrap();
        let init = StepFunction::constant(dom, 0.0).unwrap();
        let bdy = StepFunction::constant(Interval::new(0.0, 2.0).unwrap(), 1.0).unwrap();
        let mut sol = run(&half_line(init, bdy, 2.0), SolveOptions::default()).unwrap();
        let clean = boundary_admissibility(&sol, true).unwrap();
        assert!(clean.passes(ADMISSIBILITY_TOL));
        for snap in &mut sol.slabs[0].snapshots {
            snap.fronts.clear();
            snap.lone_value = 0;
        }
        let rep = boundary_admissibility(&sol, true).unwrap();
        assert!(rep.max_violation > 0.1, "missed: {}", rep.max_violation);
    }

    #[test]
    fn contraction_bound_holds_for_data_perturbations() {
        let dom = Interval::half_line_from(0.0).unwrap();
        let tdom = Interval::new(0.0, 2.0).unwrap();
        let base_init = StepFunction::new(dom, vec![1.0], vec![1.0, 0.0]).unwrap();
        let base_bdy = StepFunction::constant(tdom, 1.0).unwrap();
        let a = run(&half_line(base_init, base_bdy, 2.0), SolveOptions::default()).unwrap();

        // Initial-data perturbation only: distances stay at or below the
        // initial gap for all time.
        let moved_init = StepFunction::new(dom, vec![1.5], vec![1.0, 0.0]).unwrap();
        let bdy = StepFunction::constant(tdom, 1.0).unwrap();
        let b = run(&half_line(moved_init, bdy, 2.0), SolveOptions::default()).unwrap();
        let times = [0.0, 0.5, 1.0, 1.5, 2.0];
        let rep = contraction_check(&a, &b, &times).unwrap();
        assert!(rep.passes(), "excess {}", rep.max_excess);
        assert!((rep.bounds[0] - 0.5).abs() <= 1e-12);

        // Boundary-data perturbation only.
        let init = StepFunction::constant(dom, 0.0).unwrap();
        let calm = StepFunction::constant(tdom, 0.0).unwrap();
        let pulse = StepFunction::new(tdom, vec![1.0], vec![1.0, 0.0]).unwrap();
        let c = run(&half_line(init.clone(), calm, 2.0), SolveOptions::default()).unwrap();
        let d = run(&half_line(init, pulse, 2.0), SolveOptions::default()).unwrap();
        let rep = contraction_check(&c, &d, &times).unwrap();
        assert!(rep.passes(), "excess {}", rep.max_excess);
        // Lip over the joint hull [0, 1] is 1, so the final bound is the
        // scheduled L¹ gap: 1.
        assert!((rep.bounds[4] - 1.0).abs() <= 1e-12);
        assert!(rep.distances[4] > 0.0);
    }

    #[test]
    fn flux_stability_bound_matches_the_hand_constant() {
        let dom = Interval::half_line_from(0.0).unwrap();
        let tdom = Interval::new(0.0, 1.0).unwrap();
        let init = StepFunction::new(dom, vec![0.5], vec![1.0, 0.0]).unwrap();
        let bdy = StepFunction::constant(tdom, 1.0).unwrap();
        let mut p = half_line(init, bdy, 1.0);
        let a = run(&p, SolveOptions::default()).unwrap();
        p.flux = SpaceTimeFlux::autonomous(&[0.0, 0.1, 0.5]).unwrap();
        let b = run(&p, SolveOptions::default()).unwrap();
        let rep = flux_stability_check(&a, &b, &[1.0]).unwrap();
        // max(1, Lip g) = 1.1 over [0, 1]; Lip(f - g) = 0.1; K = 1; t = 1.
        assert!((rep.bounds[0] - 0.11).abs() <= 1e-12, "bound {}", rep.bounds[0]);
        assert!(rep.passes(), "excess {}", rep.max_excess);
    }

    #[test]
    fn bound_report_is_green_and_pins_the_absorption_count() {
        // Head-on cancellation: everything in budget, no weighted-count hits.
        let f = SpaceTimeFlux::autonomous(&[0.0, 0.0, 1.0]).unwrap();
        let dom = Interval::half_line_from(0.0).unwrap();
        let init = StepFunction::new(
            dom,
            vec![1.0, 2.0],
            vec![1.0, 0.0, -1.0],
        )
        .unwrap();
        let bdy = StepFunction::constant(Interval::new(0.0, 2.0).unwrap(), 1.0).unwrap();
        let p = Problem {
            domain: Domain::HalfLine,
            flux: f,
            initial: init,
            left_boundary: bdy,
            right_boundary: None,
            horizon: 2.0,
            eps: 0.5,
        };
        let sol = run(&p, SolveOptions::default()).unwrap();
        let rep = bound_report(&sol).unwrap();
        assert!(rep.passes);
        assert_eq!(rep.v_violations, 0);
        assert_eq!(rep.budget_violations, 0);
        assert_eq!(rep.sharp_violations, 0);

        // A boundary absorption behind a standing gap: the certified budget
        // holds while the literal weighted count rises once. The report
        // keeps passing and pins the count.
        let init = StepFunction::new(dom, vec![1.0], vec![0.0, -1.0]).unwrap();
        let bdy = StepFunction::constant(Interval::new(0.0, 4.0).unwrap(), 0.0).unwrap();
        let p = half_line(init, bdy, 4.0);
        let sol = run(&p, SolveOptions::default()).unwrap();
        let rep = bound_report(&sol).unwrap();
        assert!(rep.passes);
        assert_eq!(rep.budget_violations, 0);
        assert_eq!(rep.sharp_violations, 1);
    }

    #[test]
    fn full_battery_is_green_and_rejects_corruption() {
        let dom = Interval::half_line_from(0.0).unwrap();
        let init = StepFunction::new(dom, vec![1.0, 2.0], vec![0.5, 1.0, -0.5]).unwrap();
        let bdy = StepFunction::new(
            Interval::new(0.0, 3.0).unwrap(),
            vec![1.5],
            vec![1.0, 0.0],
        )
        .unwrap();
        let p = half_line(init, bdy, 3.0);
        let sol = run(&p, SolveOptions::default()).unwrap();
        let opts = VerifyOptions { entropy_samples: 40, seed: 7 };
        let rep = verify_solution(&sol, &opts).unwrap();
        assert!(rep.chain_ok);
        assert!(rep.passes, "report: {rep:?}");
        assert!(rep.worst_entropy_ratio >= -1.0);

        // Corrupt a recorded wave: the chord recomputation sees it.
        let mut bad = sol.clone();
        let rec = bad.slabs[0]
            .records
            .iter_mut()
            .find(|r| !r.outgoing.is_empty())
            .unwrap();
        rec.outgoing[0].speed += 0.25;
        let rep = verify_solution(&bad, &opts).unwrap();
        assert!(!rep.passes);
        assert!(rep.max_speed_error > 1e-12);

        // Corrupt a snapshot: the entropy battery sees it.
        let mut bad = sol.clone();
        let snap_count = bad.slabs[0].snapshots.len();
        for snap in &mut bad.slabs[0].snapshots[..snap_count - 1] {
            for f in &mut snap.fronts {
                f.speed += 0.4;
            }
        }
        let rep = verify_solution(&bad, &opts).unwrap();
        assert!(!rep.passes);
    }

    #[test]
    fn nonautonomous_runs_pass_the_battery() {
        let flux = SpaceTimeFlux::new(vec![vec![0.0, 0.0, 0.5], vec![0.0, 0.0, 0.5]]).unwrap();
        let dom = Interval::half_line_from(0.0).unwrap();
        let p = Problem {
            domain: Domain::HalfLine,
            flux,
            initial: StepFunction::new(dom, vec![1.0], vec![1.0, 0.0]).unwrap(),
            left_boundary: StepFunction::constant(Interval::new(0.0, 1.5).unwrap(), 1.0)
                .unwrap(),
            right_boundary: None,
            horizon: 1.5,
            eps: 0.5,
        };
        let sol = crate::nonaut::dyadic_solve(&p, 3, SolveOptions::default()).unwrap();
        assert_eq!(sol.slabs.len(), 8);
        let rep = verify_solution(&sol, &VerifyOptions { entropy_samples: 48, seed: 3 }).unwrap();
        assert!(rep.passes, "report: {rep:?}");
        assert!(rep.bounds.glimm_trace_monotone);
    }

    #[test]
    fn seeded_random_problems_pass_spot_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for case in 0..12 {
            let deg = rng.gen_range(2..=4);
            let coeffs: Vec<f64> = (0..=deg)
                .map(|_| rng.gen_range(-1.5f64..=1.5))
                .collect();
            let flux = SpaceTimeFlux::autonomous(&coeffs).unwrap();
            let eps = if rng.gen_bool(0.5) { 0.5 } else { 1.0 };
            let segment = rng.gen_bool(0.5);
            let (domain, sdom) = if segment {
                (
                    Domain::Segment { length: 4.0 },
                    Interval::new(0.0, 4.0).unwrap(),
                )
            } else {
                (Domain::HalfLine, Interval::half_line_from(0.0).unwrap())
            };
            let pieces = rng.gen_range(1..=3);
            let mut breaks = Vec::new();
            let mut values = vec![rng.gen_range(-1.5f64..=1.5)];
            for i in 0..pieces - 1 {
                breaks.push(1.0 + i as f64 + rng.gen_range(0.0..0.9));
                values.push(rng.gen_range(-1.5f64..=1.5));
            }
            let initial = StepFunction::new(sdom, breaks, values).unwrap();
            let tdom = Interval::new(0.0, 2.0).unwrap();
            let bmake = |rng: &mut ChaCha8Rng| {
                if rng.gen_bool(0.5) {
                    StepFunction::constant(tdom, rng.gen_range(-1.5f64..=1.5)).unwrap()
                } else {
                    StepFunction::new(
                        tdom,
                        vec![rng.gen_range(0.5..1.5)],
                        vec![rng.gen_range(-1.5f64..=1.5), rng.gen_range(-1.5f64..=1.5)],
                    )
                    .unwrap()
                }
            };
            let left_boundary = bmake(&mut rng);
            let right_boundary = if segment { Some(bmake(&mut rng)) } else { None };
            let p = Problem {
                domain,
                flux,
                initial,
                left_boundary,
                right_boundary,
                horizon: 2.0,
                eps,
            };
            let sol = run(&p, SolveOptions::default()).unwrap();
            let rep = verify_solution(
                &sol,
                &VerifyOptions { entropy_samples: 6, seed: 100 + case },
            )
            .unwrap();
            assert!(
                rep.chain_ok
                    && rep.max_speed_error <= 1e-12
                    && rep.min_chord_margin >= -1e-12
                    && rep.left_admissibility.passes(ADMISSIBILITY_TOL)
                    && rep.worst_entropy_ratio >= -1.0
                    && rep.bounds.v_violations == 0
                    && rep.bounds.budget_violations == 0,
                "case {case}: {rep:?}"
            );
        }
    }
}

