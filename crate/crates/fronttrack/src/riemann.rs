//! Riemann problems for a piecewise-linear flux on grid states.
//!
//! Jumps between grid states resolve into fans of admissible fronts read off
//! the convex (rising jump) or concave (falling jump) envelope of the flux
//! nodes between the two states. All states are exact grid indices; only
//! speeds are floating point.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::flux::PlcFlux;

/// A single front: jump from `left` to `right` (grid indices) moving at
/// `speed`. Adjacent states are always distinct.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wave {
    pub left: i64,
    pub right: i64,
    pub speed: f64,
}

impl Wave {
    /// Jump strength in index units.
    pub fn strength_index(&self) -> i64 {
        (self.left - self.right).abs()
    }
}

/// Ordered fan of fronts with nondecreasing speeds; consecutive fronts chain
/// (`waves[i].right == waves[i+1].left`).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WaveFan {
    pub waves: Vec<Wave>,
}

impl WaveFan {
    pub fn is_empty(&self) -> bool {
        self.waves.is_empty()
    }

    pub fn len(&self) -> usize {
        self.waves.len()
    }

    /// Σ |jump| over the fan, in index units. Fans from a Riemann problem are
    /// monotone, so this equals |l − r|.
    pub fn total_strength_index(&self) -> i64 {
        self.waves.iter().map(Wave::strength_index).sum()
    }

    /// The chained state sequence l = k₀, …, k_m = r (empty fan yields none).
    pub fn states(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.waves.len() + 1);
        if let Some(first) = self.waves.first() {
            out.push(first.left);
            for w in &self.waves {
                out.push(w.right);
            }
        }
        out
    }
}

/// States on the lower convex envelope of the flux nodes over [lo, hi],
/// ascending. Collinear nodes are dropped, so hull slopes strictly increase.
fn lower_convex_states(flux: &PlcFlux, lo: i64, hi: i64) -> Result<Vec<i64>> {
    envelope_states(flux, lo, hi, true)
}

/// States on the upper concave envelope over [lo, hi], ascending; hull slopes
/// strictly decrease.
fn upper_concave_states(flux: &PlcFlux, lo: i64, hi: i64) -> Result<Vec<i64>> {
    envelope_states(flux, lo, hi, false)
}

fn envelope_states(flux: &PlcFlux, lo: i64, hi: i64, convex: bool) -> Result<Vec<i64>> {
    let mut hull: Vec<(i64, f64)> = Vec::with_capacity((hi - lo + 1) as usize);
    for k in lo..=hi {
        let fk = flux.node(k)?;
        while hull.len() >= 2 {
            let (k1, f1) = hull[hull.len() - 2];
            let (k2, f2) = hull[hull.len() - 1];
            // Slope comparison by cross multiplication; the index gaps are
            // positive so the inequality direction is preserved. Ties pop,
            // which merges collinear nodes into one front.
            let lhs = (f2 - f1) * (k - k2) as f64;
            let rhs = (fk - f2) * (k2 - k1) as f64;
            let pop = if convex { lhs >= rhs } else { lhs <= rhs };
            if pop {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((k, fk));
    }
    Ok(hull.into_iter().map(|(k, _)| k).collect())
}

/// Resolve the jump from left state `l` to right state `r` into its fan of
/// admissible fronts, ordered by increasing speed. `l == r` yields the empty
/// fan.
pub fn solve_riemann(flux: &PlcFlux, l: i64, r: i64) -> Result<WaveFan> {
    if l == r {
        return Ok(WaveFan::default());
    }
    let mut waves = Vec::new();
    if l < r {
        let states = lower_convex_states(flux, l, r)?;
        for w in states.windows(2) {
            waves.push(Wave {
                left: w[0],
                right: w[1],
                speed: flux.chord_speed(w[0], w[1])?,
            });
        }
    } else {
        // Falling jump: concave envelope scanned ascending from r to l, then
        // reversed so the slowest front (adjacent to l) comes first.
        let states = upper_concave_states(flux, r, l)?;
        for w in states.windows(2).rev() {
            waves.push(Wave {
                left: w[1],
                right: w[0],
                speed: flux.chord_speed(w[1], w[0])?,
            });
        }
    }
    debug_assert!(waves.windows(2).all(|p| p[0].speed <= p[1].speed));
    debug_assert!(waves.windows(2).all(|p| p[0].right == p[1].left));
    Ok(WaveFan { waves })
}

/// Resolve a jump at the left boundary x = 0 between the boundary datum
/// (outside) and the trace (inside). Only fronts with strictly positive speed
/// enter the domain; the rest collapse into the new trace.
pub fn solve_boundary_left(flux: &PlcFlux, datum: i64, trace: i64) -> Result<(WaveFan, i64)> {
    let fan = solve_riemann(flux, datum, trace)?;
    let kept: Vec<Wave> = fan
        .waves
        .into_iter()
        .filter(|w| w.speed > 0.0)
        .collect();
    let new_trace = kept.first().map_or(trace, |w| w.left);
    Ok((WaveFan { waves: kept }, new_trace))
}

/// Mirror image at the right boundary x = L: only fronts with strictly
/// negative speed enter.
pub fn solve_boundary_right(flux: &PlcFlux, trace: i64, datum: i64) -> Result<(WaveFan, i64)> {
    let fan = solve_riemann(flux, trace, datum)?;
    let kept: Vec<Wave> = fan
        .waves
        .into_iter()
        .filter(|w| w.speed < 0.0)
        .collect();
    let new_trace = kept.last().map_or(trace, |w| w.right);
    Ok((WaveFan { waves: kept }, new_trace))
}

/// Worst-case admissibility slack of a single front: the minimum over grid
/// states k strictly between the endpoints of
///   min( chord(l→k) − speed, speed − chord(k→r) ).
/// Admissible fronts have nonnegative margin up to rounding; a front with no
/// interior state returns +∞.
pub fn oleinik_margin(flux: &PlcFlux, w: &Wave) -> Result<f64> {
    let (lo, hi) = (w.left.min(w.right), w.left.max(w.right));
    let mut margin = f64::INFINITY;
    for k in (lo + 1)..hi {
        let left_chord = flux.chord_speed(w.left, k)?;
        let right_chord = flux.chord_speed(k, w.right)?;
        margin = margin.min(left_chord - w.speed).min(w.speed - right_chord);
    }
    Ok(margin)
}
