//! Time-dependent fluxes via dyadic time splitting.
//!
//! The horizon is cut into 2^depth slabs at exactly representable dyadic
//! times; inside each slab the flux is frozen at the slab's left endpoint and
//! the autonomous tracker runs on the frozen tabulation. Each slab starts
//! from the previous slab's terminal profile bit for bit, so refining the
//! depth is a genuine Cauchy sequence of exact solutions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::PlcFlux;
use crate::interval::Interval;
use crate::tracker::{
    event_tolerance, prepare, PreparedProblem, Problem, SlabSpec, SolveOptions, Solution, Tracker,
};

/// A-priori constants for the splitting error and the time modulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// sup |∂_u f| over [0, T] and the grid-aligned state hull.
    pub sup_du: f64,
    /// L = 1 + sup |∂_u f|.
    pub lipschitz_l: f64,
    /// K: total-variation budget, the initial Glimm value.
    pub tv_budget: f64,
    /// M = sup |∂_t ∂_u f| over the same box.
    pub mixed_m: f64,
    /// O = L·K·M·T²/4: consecutive-depth splitting error at depth n is
    /// at most O·2^−n.
    pub split_o: f64,
    /// C₁ = sup|∂_u f| · K: L¹ Lipschitz constant in time.
    pub time_lipschitz_c1: f64,
}

/// Initial Glimm value in index units: interior variation plus all scheduled
/// boundary jumps plus the time-zero datum/trace gaps.
pub fn initial_v_index(prepared: &PreparedProblem) -> i64 {
    let mut v = prepared.initial.tv_index();
    v += prepared.left_schedule.tv_index();
    v += (prepared.left_schedule.indices()[0] - prepared.initial.indices()[0]).abs();
    if let Some(right) = &prepared.right_schedule {
        v += right.tv_index();
        v += (right.indices()[0] - prepared.initial.indices().last().unwrap()).abs();
    }
    v
}

/// Evaluate the splitting and modulus constants for a prepared problem.
pub fn bound_constants(prepared: &PreparedProblem) -> Result<Constants> {
    let t_box = Interval::new(0.0, prepared.horizon)?;
    let u_box = prepared.hull.as_interval(prepared.eps);
    let sup_du = prepared.flux.sup_du_norm(t_box, u_box)?;
    let mixed_m = prepared.flux.sup_dtdu_norm(t_box, u_box)?;
    let lipschitz_l = 1.0 + sup_du;
    let tv_budget = initial_v_index(prepared) as f64 * prepared.eps;
    let t = prepared.horizon;
    Ok(Constants {
        sup_du,
        lipschitz_l,
        tv_budget,
        mixed_m,
        split_o: 0.25 * lipschitz_l * tv_budget * mixed_m * t * t,
        time_lipschitz_c1: sup_du * tv_budget,
    })
}

/// Solve with the flux frozen on 2^depth dyadic slabs. Depth 0 with an
/// autonomous flux reproduces the plain tracker run exactly.
pub fn dyadic_solve(problem: &Problem, depth: u32, opts: SolveOptions) -> Result<Solution> {
    if depth > 30 {
        return Err(Error::Config(format!("depth {depth} too large")));
    }
    let prepared = prepare(problem)?;
    let m = 1u64 << depth;
    let tau = event_tolerance(prepared.horizon);
    let mut slabs = Vec::with_capacity(m as usize);
    let mut state = prepared.initial.clone();
    for i in 0..m {
        // Dyadic fractions are exact, so slab endpoints are consistent
        // across depths.
        let t_lo = prepared.horizon * (i as f64 / m as f64);
        let t_hi = if i + 1 == m {
            prepared.horizon
        } else {
            prepared.horizon * ((i + 1) as f64 / m as f64)
        };
        let plc = PlcFlux::from_index_range(&prepared.flux, t_lo, prepared.eps, prepared.hull)?;
        let spec = SlabSpec {
            eps: prepared.eps,
            domain: prepared.domain,
            duration: t_hi - t_lo,
            t_offset: t_lo,
            plc,
            initial: state.clone(),
            left_schedule: prepared.left_schedule.restrict_shifted(t_lo, t_hi)?,
            right_schedule: prepared
                .right_schedule
                .as_ref()
                .map(|s| s.restrict_shifted(t_lo, t_hi))
                .transpose()?,
            budget_weight: prepared.budget_weight,
            sharp_weight: prepared.sharp_weight,
            tau,
            fuse: opts.fuse,
        };
        let mut tracker = Tracker::new(spec)?;
        tracker.run_to_end()?;
        let slab = tracker.into_solution();
        state = slab.profile_index_at(t_hi)?;
        slabs.push(slab);
    }
    Ok(Solution { prepared, depth, slabs })
}

/// One row of a depth-refinement study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CauchyRow {
    pub depth: u32,
    /// sup over sampled times of the L¹ distance to the next depth.
    pub distance: f64,
    /// O · 2^−depth.
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyStudy {
    pub constants: Constants,
    pub rows: Vec<CauchyRow>,
}

impl CauchyStudy {
    pub fn all_within_bound(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.distance <= r.bound * (1.0 + 1e-9) + 1e-12)
    }
}

/// Compare consecutive dyadic depths n and n+1 for n in [n_min, n_max],
/// measuring the sup of L¹ profile distances over a uniform time grid
/// together with all slab endpoints of the finer run.
pub fn cauchy_study(
    problem: &Problem,
    n_min: u32,
    n_max: u32,
    grid_points: usize,
    opts: SolveOptions,
) -> Result<CauchyStudy> {
    if n_min > n_max {
        return Err(Error::Config(format!("empty depth range {n_min}..{n_max}")));
    }
    let mut solutions = Vec::with_capacity((n_max - n_min + 2) as usize);
    for n in n_min..=n_max + 1 {
        solutions.push(dyadic_solve(problem, n, opts)?);
    }
    let constants = bound_constants(&solutions[0].prepared)?;
    let horizon = problem.horizon;
    let mut rows = Vec::new();
    for (k, n) in (n_min..=n_max).enumerate() {
        let (coarse, fine) = (&solutions[k], &solutions[k + 1]);
        let mut times: Vec<f64> = (0..=grid_points.max(1))
            .map(|j| horizon * j as f64 / grid_points.max(1) as f64)
            .collect();
        times.extend(fine.slabs.iter().map(|s| s.t_start));
        times.sort_by(f64::total_cmp);
        times.dedup();
        let mut distance = 0.0f64;
        for &t in &times {
            distance = distance.max(coarse.l1_distance_at(fine, t)?);
        }
        let bound = constants.split_o * 0.5f64.powi(n as i32);
        rows.push(CauchyRow {
            depth: n,
            distance,
            bound,
            ratio: if bound > 0.0 { distance / bound } else { f64::INFINITY },
        });
    }
    Ok(CauchyStudy { constants, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::SpaceTimeFlux;
    use crate::stepfn::StepFunction;
    use crate::tracker::Domain;

    fn half_dom() -> Interval {
        Interval::half_line_from(0.0).unwrap()
    }

    fn advection_growing() -> SpaceTimeFlux {
        // f(t, u) = (1 + t) u.
        SpaceTimeFlux::new(vec![vec![0.0, 1.0], vec![0.0, 1.0]]).unwrap()
    }

    fn burgers_growing() -> SpaceTimeFlux {
        // f(t, u) = (1 + t) u²/2.
        SpaceTimeFlux::new(vec![vec![0.0, 0.0, 0.5], vec![0.0, 0.0, 0.5]]).unwrap()
    }

    fn step_problem(flux: SpaceTimeFlux, horizon: f64) -> Problem {
        Problem {
            domain: Domain::HalfLine,
            flux,
            initial: StepFunction::new(half_dom(), vec![1.0], vec![1.0, 0.0]).unwrap(),
            left_boundary: StepFunction::constant(Interval::new(0.0, horizon).unwrap(), 1.0)
                .unwrap(),
            right_boundary: None,
            horizon,
            eps: 1.0,
        }
    }

    #[test]
    fn frozen_advection_front_positions_by_depth() {
        // Speed is 1 + t frozen at slab starts: depth 0 gives x(1) = 2,
        // depth 1 gives x(1) = 1 + 1/2 + (3/2)/2 = 9/4.
        let p = step_problem(advection_growing(), 1.0);
        let d0 = dyadic_solve(&p, 0, SolveOptions::default()).unwrap();
        let prof0 = d0.profile_index_at(1.0).unwrap();
        assert_eq!(prof0.breaks(), &[2.0]);
        let d1 = dyadic_solve(&p, 1, SolveOptions::default()).unwrap();
        let prof1 = d1.profile_index_at(1.0).unwrap();
        assert_eq!(prof1.breaks(), &[2.25]);
        assert_eq!(d1.slabs.len(), 2);
        assert_eq!(d0.l1_distance_at(&d1, 1.0).unwrap(), 0.25);
    }

    #[test]
    fn splitting_constants_match_hand_values() {
        // f = (1+t)u²/2 on hull [0,1], T = 1, K = 1: ∂_u f = (1+t)u has sup 2,
        // ∂_t∂_u f = u has sup 1, so L = 3, M = 1, O = 3/4.
        let p = step_problem(burgers_growing(), 1.0);
        let prepared = prepare(&p).unwrap();
        let c = bound_constants(&prepared).unwrap();
        assert!((c.sup_du - 2.0).abs() < 1e-9);
        assert!((c.lipschitz_l - 3.0).abs() < 1e-9);
        assert_eq!(c.tv_budget, 1.0);
        assert!((c.mixed_m - 1.0).abs() < 1e-9);
        assert!((c.split_o - 0.75).abs() < 1e-8);
        assert!((c.time_lipschitz_c1 - 2.0).abs() < 1e-9);
    }

    #[test]
    fn autonomous_flux_is_depth_invariant() {
        let p = Problem {
            domain: Domain::HalfLine,
            flux: SpaceTimeFlux::autonomous(&[0.0, 0.0, 0.5]).unwrap(),
            initial: StepFunction::new(half_dom(), vec![0.5, 1.5], vec![-1.0, 1.0, 0.0]).unwrap(),
            left_boundary: StepFunction::new(
                Interval::new(0.0, 2.0).unwrap(),
                vec![0.8],
                vec![-1.0, 0.5],
            )
            .unwrap(),
            right_boundary: None,
            horizon: 2.0,
            eps: 0.5,
        };
        let d0 = dyadic_solve(&p, 0, SolveOptions::default()).unwrap();
        let d3 = dyadic_solve(&p, 3, SolveOptions::default()).unwrap();
        for &t in &[0.0, 0.3, 0.75, 1.0, 1.6, 2.0] {
            let a = d0.profile_index_at(t).unwrap();
            let b = d3.profile_index_at(t).unwrap();
            assert_eq!(a.indices(), b.indices(), "t={t}");
            // Positions are recomputed at each slab seam, so agreement is up
            // to accumulated rounding, not bit-for-bit.
            assert_eq!(a.breaks().len(), b.breaks().len(), "t={t}");
            for (x, y) in a.breaks().iter().zip(b.breaks()) {
                assert!((x - y).abs() < 1e-12, "t={t}: {x} vs {y}");
            }
        }
        assert_eq!(d3.slabs.len(), 8);
    }

    #[test]
    fn refinement_distances_sit_under_dyadic_bound() {
        let p = step_problem(burgers_growing(), 1.0);
        let study = cauchy_study(&p, 0, 3, 16, SolveOptions::default()).unwrap();
        assert_eq!(study.rows.len(), 4);
        assert!(study.all_within_bound(), "{:?}", study.rows);
        // Distances must actually shrink with depth for this genuinely
        // time-dependent flux.
        assert!(study.rows[3].distance < study.rows[0].distance);
        assert!(study.rows[0].distance > 0.0);
    }

    #[test]
    fn slab_handoff_is_exact() {
        let p = step_problem(burgers_growing(), 1.0);
        let d2 = dyadic_solve(&p, 2, SolveOptions::default()).unwrap();
        for w in d2.slabs.windows(2) {
            let end = w[0].profile_index_at(w[0].t_end).unwrap();
            let start = &w[1].initial;
            assert_eq!(end.indices(), start.indices());
            assert_eq!(end.breaks(), start.breaks());
        }
    }
}
