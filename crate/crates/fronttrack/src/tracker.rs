//! Event-driven front tracking for the autonomous initial-boundary value
//! problem on a half-line or segment.
//!
//! The solver maintains a sorted list of fronts (exact grid states, floating
//! positions and speeds) and processes three event kinds: front collisions,
//! fronts reaching a boundary, and boundary datum jumps. Events closer than a
//! small tolerance in time are merged into one bundle and resolved as
//! independent sites from left to right; every site records exact integer
//! ledger components (front counts, strengths, future boundary jumps, and
//! datum/trace mismatches) so any monotonicity functional can be recomputed
//! after the fact.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::{IndexHull, PlcFlux, SpaceTimeFlux};
use crate::interval::Interval;
use crate::riemann::{
    oleinik_margin, solve_boundary_left, solve_boundary_right, solve_riemann, Wave,
};
use crate::stepfn::{GridStepFunction, StepFunction};

/// Spatial domain: the half-line [0, ∞) or a segment [0, L].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    HalfLine,
    Segment { length: f64 },
}

impl Domain {
    pub fn interval(&self) -> Interval {
        match self {
            Domain::HalfLine => Interval::half_line_from(0.0).unwrap(),
            Domain::Segment { length } => Interval::new(0.0, *length).unwrap(),
        }
    }

    pub fn length(&self) -> Option<f64> {
        match self {
            Domain::HalfLine => None,
            Domain::Segment { length } => Some(*length),
        }
    }

    pub fn is_segment(&self) -> bool {
        matches!(self, Domain::Segment { .. })
    }
}

/// One moving discontinuity. States are grid indices; `pos` is the position
/// at time `anchor` (local slab time).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Front {
    pub id: u64,
    pub pos: f64,
    pub anchor: f64,
    pub left: i64,
    pub right: i64,
    pub speed: f64,
}

impl Front {
    pub fn position_at(&self, t: f64) -> f64 {
        self.pos + self.speed * (t - self.anchor)
    }

    pub fn strength_index(&self) -> i64 {
        (self.left - self.right).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventSite {
    Interior,
    LeftBoundary,
    RightBoundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trigger {
    /// Datum vs initial trace resolution at time zero.
    Initial,
    Collision,
    Hit,
    Jump,
    HitAndJump,
}

/// Exact bookkeeping snapshot of the tracker state, all in index units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerSide {
    pub fronts: usize,
    pub strength: i64,
    pub future_jumps: usize,
    pub future_jump_sum: i64,
    pub mismatch: i64,
}

impl LedgerSide {
    /// Glimm functional in index units.
    pub fn v_index(&self) -> i64 {
        self.strength + self.future_jump_sum + self.mismatch
    }

    /// Weighted discontinuity count with the given weight on future boundary
    /// jumps; the mismatch enters in index units.
    pub fn sharp(&self, jump_weight: f64) -> f64 {
        self.fronts as f64 + jump_weight * self.future_jumps as f64 + self.mismatch as f64
    }

    /// Event-budget variant: fronts plus weighted future jumps, without the
    /// mismatch term. This one provably never increases at an event unless
    /// the Glimm functional drops by a full grid cell.
    pub fn budget(&self, jump_weight: i64) -> i64 {
        self.fronts as i64 + jump_weight * self.future_jumps as i64
    }
}

/// One resolved interaction site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub seq: usize,
    /// Absolute time.
    pub time: f64,
    pub site: EventSite,
    pub pos: f64,
    pub trigger: Trigger,
    /// Fronts removed (collided or absorbed).
    pub incoming: usize,
    pub jumps_consumed: usize,
    pub outgoing: Vec<Wave>,
    pub pre: LedgerSide,
    pub post: LedgerSide,
}

/// Front list at a fixed time; profiles at later times (up to the next
/// snapshot) follow by linear motion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontsSnapshot {
    /// Absolute time.
    pub time: f64,
    pub lone_value: i64,
    pub fronts: Vec<Front>,
}

/// Everything the tracker needs for one run with a frozen flux tabulation.
#[derive(Debug, Clone)]
pub struct SlabSpec {
    pub eps: f64,
    pub domain: Domain,
    /// Local duration of the run.
    pub duration: f64,
    /// Absolute time of local 0 (records and snapshots carry absolute times).
    pub t_offset: f64,
    pub plc: PlcFlux,
    pub initial: GridStepFunction,
    /// Left boundary datum, local time domain [0, duration].
    pub left_schedule: GridStepFunction,
    pub right_schedule: Option<GridStepFunction>,
    /// Integer weight for the event-budget functional.
    pub budget_weight: i64,
    /// Real weight 2(‖u_b‖∞ + ‖u_o‖∞)/ε for the weighted discontinuity count.
    pub sharp_weight: f64,
    /// Merge tolerance for simultaneous events.
    pub tau: f64,
    /// Hard cap on resolved event sites.
    pub fuse: usize,
}

/// Completed run over one time slab.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlabSolution {
    pub t_start: f64,
    pub t_end: f64,
    pub eps: f64,
    pub domain: Domain,
    pub plc: PlcFlux,
    /// Quantized profile handed to this slab (before time-zero resolution).
    pub initial: GridStepFunction,
    pub left_schedule: GridStepFunction,
    pub right_schedule: Option<GridStepFunction>,
    pub records: Vec<EventRecord>,
    pub snapshots: Vec<FrontsSnapshot>,
}

impl SlabSolution {
    fn snapshot_at(&self, t: f64) -> Result<(&FrontsSnapshot, f64)> {
        if !(t >= self.t_start - 1e-12 && t <= self.t_end + 1e-12) {
            return Err(Error::PointOutsideDomain(t));
        }
        let t = t.clamp(self.t_start, self.t_end);
        let i = self.snapshots.partition_point(|s| s.time <= t);
        let snap = &self.snapshots[i.saturating_sub(1).min(self.snapshots.len() - 1)];
        Ok((snap, t - snap.time))
    }

    /// Exact profile at an absolute time inside the slab.
    pub fn profile_index_at(&self, t: f64) -> Result<GridStepFunction> {
        let (snap, dt) = self.snapshot_at(t)?;
        let length = self.domain.length();
        let positioned = snap.fronts.iter().map(|f| {
            let mut p = f.pos + f.speed * dt;
            p = p.max(0.0);
            if let Some(len) = length {
                p = p.min(len);
            }
            (p, f.left, f.right)
        });
        build_profile(self.eps, self.domain, snap.lone_value, positioned)
    }

    /// Trace (profile value adjacent to a boundary) at an absolute time.
    pub fn trace_index_at(&self, t: f64, left: bool) -> Result<i64> {
        let (snap, _) = self.snapshot_at(t)?;
        Ok(if snap.fronts.is_empty() {
            snap.lone_value
        } else if left {
            snap.fronts[0].left
        } else {
            snap.fronts.last().unwrap().right
        })
    }

    /// Boundary datum index at an absolute time.
    pub fn datum_index_at(&self, t: f64, left: bool) -> Result<i64> {
        let sched = if left {
            &self.left_schedule
        } else {
            self.right_schedule.as_ref().ok_or(Error::DomainMismatch)?
        };
        sched.eval_index((t - self.t_start).clamp(0.0, self.t_end - self.t_start))
    }
}

/// Assemble a grid step function from positioned fronts, folding fronts that
/// sit exactly on a boundary into the boundary value and merging co-located
/// interior fronts into one jump.
pub fn build_profile(
    eps: f64,
    domain: Domain,
    lone_value: i64,
    fronts: impl Iterator<Item = (f64, i64, i64)>,
) -> Result<GridStepFunction> {
    let length = domain.length();
    let mut breaks: Vec<f64> = Vec::new();
    let mut indices: Vec<i64> = Vec::new();
    let mut first = true;
    for (pos, left, right) in fronts {
        if first {
            indices.push(left);
            first = false;
        }
        if pos <= 0.0 {
            // Fold: the jump sits on the left boundary, only its right state
            // is visible inside the domain.
            *indices.last_mut().unwrap() = right;
            if let Some(b) = breaks.last() {
                // A previous interior break cannot follow a boundary fold.
                debug_assert!(*b > 0.0);
            }
            continue;
        }
        if length.is_some_and(|len| pos >= len) {
            // Jumps at the right boundary are invisible from inside.
            break;
        }
        if breaks.last() == Some(&pos) {
            *indices.last_mut().unwrap() = right;
        } else {
            breaks.push(pos);
            indices.push(right);
        }
    }
    if first {
        indices.push(lone_value);
    }
    GridStepFunction::new(eps, domain.interval(), breaks, indices)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Action {
    Collide { a: u64, b: u64 },
    HitLeft { id: u64 },
    HitRight { id: u64 },
    JumpLeft { cursor: usize },
    JumpRight { cursor: usize },
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    time: f64,
    rank: u8,
    pos: f64,
    seq: u64,
    action: Action,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.rank.cmp(&other.rank))
            .then(self.pos.total_cmp(&other.pos))
            .then(self.seq.cmp(&other.seq))
    }
}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Live solver state for one slab.
pub struct Tracker {
    spec: SlabSpec,
    clock: f64,
    fronts: Vec<Front>,
    lone_value: i64,
    left_cursor: usize,
    right_cursor: usize,
    queue: BinaryHeap<std::cmp::Reverse<Entry>>,
    entry_seq: u64,
    next_front_id: u64,
    records: Vec<EventRecord>,
    snapshots: Vec<FrontsSnapshot>,
    hull: IndexHull,
}

impl Tracker {
    /// Build the initial front configuration: fans at every jump of the
    /// initial datum, then boundary resolutions at time zero.
    pub fn new(spec: SlabSpec) -> Result<Tracker> {
        if spec.domain.is_segment() != spec.right_schedule.is_some() {
            return Err(Error::DomainMismatch);
        }
        let hull = spec.plc.index_hull();
        let mut tracker = Tracker {
            clock: 0.0,
            fronts: Vec::new(),
            lone_value: spec.initial.indices()[0],
            left_cursor: 0,
            right_cursor: 0,
            queue: BinaryHeap::new(),
            entry_seq: 0,
            next_front_id: 0,
            records: Vec::new(),
            snapshots: Vec::new(),
            hull,
            spec,
        };
        // Glue fans at every interior jump of the initial datum.
        let initial = tracker.spec.initial.clone();
        for (i, &b) in initial.breaks().iter().enumerate() {
            let (l, r) = (initial.indices()[i], initial.indices()[i + 1]);
            let fan = solve_riemann(&tracker.spec.plc, l, r)?;
            for w in &fan.waves {
                let front = tracker.make_front(b, *w);
                tracker.fronts.push(front);
            }
        }
        tracker.check_chain()?;
        // Time-zero boundary resolutions (the datum may disagree with the
        // initial trace).
        if tracker.datum_left() != tracker.trace_left() {
            tracker.resolve_boundary(true, 0, Trigger::Initial)?;
        }
        if tracker.spec.domain.is_segment() && tracker.datum_right() != tracker.trace_right() {
            tracker.resolve_boundary(false, 0, Trigger::Initial)?;
        }
        // Schedule every datum jump once; collisions and hits for the fronts.
        let n_left = tracker.spec.left_schedule.breaks().len();
        for c in 0..n_left {
            let t = tracker.spec.left_schedule.breaks()[c];
            tracker.push_entry(t, 0, 0.0, Action::JumpLeft { cursor: c });
        }
        if let Some(right) = tracker.spec.right_schedule.clone() {
            let pos = tracker.spec.domain.length().unwrap();
            for (c, &t) in right.breaks().iter().enumerate() {
                tracker.push_entry(t, 0, pos, Action::JumpRight { cursor: c });
            }
        }
        for i in 0..tracker.fronts.len() {
            tracker.schedule_hit(tracker.fronts[i]);
            if i + 1 < tracker.fronts.len() {
                tracker.schedule_collision(tracker.fronts[i], tracker.fronts[i + 1]);
            }
        }
        tracker.take_snapshot();
        Ok(tracker)
    }

    fn make_front(&mut self, pos: f64, w: Wave) -> Front {
        let id = self.next_front_id;
        self.next_front_id += 1;
        debug_assert!(
            oleinik_margin(&self.spec.plc, &w).map_or(false, |m| m >= -1e-12),
            "inadmissible front emitted: {w:?}"
        );
        Front {
            id,
            pos,
            anchor: self.clock,
            left: w.left,
            right: w.right,
            speed: w.speed,
        }
    }

    fn push_entry(&mut self, time: f64, rank: u8, pos: f64, action: Action) {
        if time > self.spec.duration {
            return;
        }
        let seq = self.entry_seq;
        self.entry_seq += 1;
        self.queue
            .push(std::cmp::Reverse(Entry { time, rank, pos, seq, action }));
    }

    fn schedule_collision(&mut self, a: Front, b: Front) {
        if a.speed <= b.speed {
            return;
        }
        let t = (self.clock + (b.pos - a.pos) / (a.speed - b.speed)).max(self.clock);
        let pos = a.pos + a.speed * (t - self.clock);
        self.push_entry(t, 2, pos, Action::Collide { a: a.id, b: b.id });
    }

    fn schedule_hit(&mut self, f: Front) {
        if f.speed < 0.0 {
            let t = (self.clock + f.pos / (-f.speed)).max(self.clock);
            self.push_entry(t, 1, 0.0, Action::HitLeft { id: f.id });
        } else if f.speed > 0.0 {
            if let Some(len) = self.spec.domain.length() {
                let t = (self.clock + (len - f.pos) / f.speed).max(self.clock);
                self.push_entry(t, 1, len, Action::HitRight { id: f.id });
            }
        }
    }

    fn index_of(&self, id: u64) -> Option<usize> {
        self.fronts.iter().position(|f| f.id == id)
    }

    fn entry_is_valid(&self, e: &Entry) -> bool {
        match e.action {
            Action::Collide { a, b } => match (self.index_of(a), self.index_of(b)) {
                (Some(i), Some(j)) => {
                    j == i + 1 && self.fronts[i].speed > self.fronts[j].speed
                }
                _ => false,
            },
            Action::HitLeft { id } => self.index_of(id).is_some(),
            Action::HitRight { id } => self.index_of(id).is_some(),
            Action::JumpLeft { cursor } => cursor >= self.left_cursor,
            Action::JumpRight { cursor } => cursor >= self.right_cursor,
        }
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn fronts(&self) -> &[Front] {
        &self.fronts
    }

    pub fn records(&self) -> &[EventRecord] {
        &self.records
    }

    fn datum_left(&self) -> i64 {
        self.spec.left_schedule.indices()[self.left_cursor]
    }

    fn datum_right(&self) -> i64 {
        self.spec
            .right_schedule
            .as_ref()
            .map_or(0, |s| s.indices()[self.right_cursor])
    }

    fn trace_left(&self) -> i64 {
        self.fronts.first().map_or(self.lone_value, |f| f.left)
    }

    fn trace_right(&self) -> i64 {
        self.fronts.last().map_or(self.lone_value, |f| f.right)
    }

    /// Exact integer components of the monotonicity functionals.
    pub fn ledger(&self) -> LedgerSide {
        let strength: i64 = self.fronts.iter().map(Front::strength_index).sum();
        let mut future_jumps = self.spec.left_schedule.breaks().len() - self.left_cursor;
        let mut future_jump_sum = {
            let idx = self.spec.left_schedule.indices();
            idx[self.left_cursor..]
                .windows(2)
                .map(|w| (w[1] - w[0]).abs())
                .sum::<i64>()
        };
        let mut mismatch = (self.datum_left() - self.trace_left()).abs();
        if let Some(right) = &self.spec.right_schedule {
            future_jumps += right.breaks().len() - self.right_cursor;
            future_jump_sum += right.indices()[self.right_cursor..]
                .windows(2)
                .map(|w| (w[1] - w[0]).abs())
                .sum::<i64>();
            mismatch += (self.datum_right() - self.trace_right()).abs();
        }
        LedgerSide {
            fronts: self.fronts.len(),
            strength,
            future_jumps,
            future_jump_sum,
            mismatch,
        }
    }

    /// Glimm functional in real units.
    pub fn glimm_value(&self) -> f64 {
        self.ledger().v_index() as f64 * self.spec.eps
    }

    /// Weighted discontinuity count (real units, pinned formula).
    pub fn sharp_value(&self) -> f64 {
        self.ledger().sharp(self.spec.sharp_weight)
    }

    /// Current profile as a grid step function.
    pub fn profile_index(&self) -> Result<GridStepFunction> {
        build_profile(
            self.spec.eps,
            self.spec.domain,
            self.lone_value,
            self.fronts.iter().map(|f| (f.pos, f.left, f.right)),
        )
    }

    fn check_chain(&self) -> Result<()> {
        for w in self.fronts.windows(2) {
            if w[0].right != w[1].left {
                return Err(Error::Internal(format!(
                    "front chain broken between ids {} and {}",
                    w[0].id, w[1].id
                )));
            }
            if w[0].pos > w[1].pos + 1e-9 * (1.0 + w[1].pos.abs()) {
                return Err(Error::Internal(format!(
                    "front order broken: {} at {} before {} at {}",
                    w[0].id, w[0].pos, w[1].id, w[1].pos
                )));
            }
        }
        for f in &self.fronts {
            if f.left == f.right {
                return Err(Error::Internal(format!("zero front {}", f.id)));
            }
            if !self.hull.contains(f.left) || !self.hull.contains(f.right) {
                return Err(Error::StateOutsideRange(f.left, self.hull.lo, self.hull.hi));
            }
        }
        Ok(())
    }

    fn take_snapshot(&mut self) {
        let time = self.spec.t_offset + self.clock;
        if let Some(last) = self.snapshots.last() {
            if last.time == time {
                self.snapshots.pop();
            }
        }
        self.snapshots.push(FrontsSnapshot {
            time,
            lone_value: self.lone_value,
            fronts: self.fronts.clone(),
        });
    }

    /// Time of the next pending event, if any remains before the horizon.
    pub fn next_event_time(&mut self) -> Option<f64> {
        while let Some(std::cmp::Reverse(e)) = self.queue.peek() {
            if self.entry_is_valid(e) {
                return Some(e.time);
            }
            self.queue.pop();
        }
        None
    }

    /// Resolve the next event bundle. Returns false when no event remains.
    pub fn step(&mut self) -> Result<bool> {
        let Some(t0) = self.next_event_time() else {
            return Ok(false);
        };
        // Drain everything within the merge window.
        let mut bundle: Vec<Entry> = Vec::new();
        while let Some(std::cmp::Reverse(e)) = self.queue.peek() {
            if e.time > t0 + self.spec.tau {
                break;
            }
            let e = self.queue.pop().unwrap().0;
            if self.entry_is_valid(&e) {
                bundle.push(e);
            }
        }
        // Advance every front to the bundle time.
        let length = self.spec.domain.length();
        for f in &mut self.fronts {
            let mut p = f.position_at(t0);
            p = p.max(0.0);
            if let Some(len) = length {
                p = p.min(len);
            }
            f.pos = p;
            f.anchor = t0;
        }
        self.clock = t0;

        // Split the bundle into sites.
        let pos_tol = self.spec.tau * (1.0 + 2.0 * self.spec.plc.max_abs_slope());
        let mut left_jumps = 0usize;
        let mut right_jumps = 0usize;
        let mut left_hit = false;
        let mut right_hit = false;
        let mut interior: Vec<f64> = Vec::new();
        for e in &bundle {
            match e.action {
                Action::JumpLeft { .. } => left_jumps += 1,
                Action::JumpRight { .. } => right_jumps += 1,
                Action::HitLeft { .. } => left_hit = true,
                Action::HitRight { .. } => right_hit = true,
                Action::Collide { a, .. } => {
                    if let Some(i) = self.index_of(a) {
                        let p = self.fronts[i].pos;
                        if p <= pos_tol {
                            left_hit = true;
                        } else if length.is_some_and(|len| p >= len - pos_tol) {
                            right_hit = true;
                        } else {
                            interior.push(p);
                        }
                    }
                }
            }
        }
        interior.sort_by(f64::total_cmp);
        interior.dedup_by(|b, a| (*b - *a).abs() <= pos_tol);

        if left_hit || left_jumps > 0 {
            let trigger = match (left_hit, left_jumps > 0) {
                (true, true) => Trigger::HitAndJump,
                (true, false) => Trigger::Hit,
                _ => Trigger::Jump,
            };
            self.resolve_boundary(true, left_jumps, trigger)?;
        }
        for p in interior {
            self.resolve_interior(p)?;
        }
        if right_hit || right_jumps > 0 {
            let trigger = match (right_hit, right_jumps > 0) {
                (true, true) => Trigger::HitAndJump,
                (true, false) => Trigger::Hit,
                _ => Trigger::Jump,
            };
            self.resolve_boundary(false, right_jumps, trigger)?;
        }
        self.check_chain()?;
        self.take_snapshot();
        if self.records.len() > self.spec.fuse {
            return Err(Error::EventFuse {
                fuse: self.spec.fuse,
                time: self.spec.t_offset + self.clock,
                detail: format!("{} fronts live", self.fronts.len()),
            });
        }
        Ok(true)
    }

    /// Merge all fronts sitting at (numerically) one interior point and
    /// replace them by the fan between the outermost states.
    fn resolve_interior(&mut self, p: f64) -> Result<()> {
        let pos_tol = self.spec.tau * (1.0 + 2.0 * self.spec.plc.max_abs_slope());
        let mut i = match self.fronts.iter().position(|f| (f.pos - p).abs() <= pos_tol) {
            Some(i) => i,
            None => return Ok(()),
        };
        let mut j = i;
        while j + 1 < self.fronts.len() && (self.fronts[j + 1].pos - p).abs() <= pos_tol {
            j += 1;
        }
        while i > 0 && (self.fronts[i - 1].pos - p).abs() <= pos_tol {
            i -= 1;
        }
        if j == i {
            return Ok(());
        }
        let pre = self.ledger();
        let l = self.fronts[i].left;
        let r = self.fronts[j].right;
        let incoming = j - i + 1;
        let fan = solve_riemann(&self.spec.plc, l, r)?;
        let outgoing = fan.waves.clone();
        let new_fronts: Vec<Front> = fan.waves.iter().map(|w| self.make_front(p, *w)).collect();
        let inserted = new_fronts.len();
        self.fronts.splice(i..=j, new_fronts);
        if self.fronts.is_empty() {
            self.lone_value = l;
        }
        // New adjacencies at the splice seams; the fan itself is ordered by
        // strictly increasing speed and never self-collides.
        for k in i..i + inserted {
            let f = self.fronts[k];
            self.schedule_hit(f);
        }
        if i > 0 && i <= self.fronts.len().saturating_sub(1) {
            self.schedule_collision(self.fronts[i - 1], self.fronts[i]);
        }
        let seam = i + inserted;
        if seam > 0 && seam < self.fronts.len() {
            self.schedule_collision(self.fronts[seam - 1], self.fronts[seam]);
        }
        let post = self.ledger();
        self.push_record(EventSite::Interior, p, Trigger::Collision, incoming, 0, outgoing, pre, post)
    }

    /// Resolve a boundary site: absorb arriving fronts, consume datum jumps,
    /// and emit the entering part of the boundary fan.
    fn resolve_boundary(&mut self, left: bool, jumps: usize, trigger: Trigger) -> Result<()> {
        let pre = self.ledger();
        if left {
            self.left_cursor += jumps;
        } else {
            self.right_cursor += jumps;
        }
        let pos_tol = self.spec.tau * (1.0 + 2.0 * self.spec.plc.max_abs_slope());
        let length = self.spec.domain.length();
        // Every front parked at the wall joins the boundary Riemann problem
        // (a merged bundle can park a whole colliding cluster there). The
        // instantaneous trace is the innermost state beyond the cluster; the
        // cluster itself carries zero width.
        let (absorbed, trace) = if left {
            let j = self
                .fronts
                .iter()
                .take_while(|f| f.pos <= pos_tol)
                .count();
            let trace = if j > 0 { self.fronts[j - 1].right } else { self.trace_left() };
            self.fronts.drain(0..j);
            (j, trace)
        } else {
            let len = length.unwrap();
            let n = self.fronts.len();
            let j = self
                .fronts
                .iter()
                .rev()
                .take_while(|f| f.pos >= len - pos_tol)
                .count();
            let trace = if j > 0 { self.fronts[n - j].left } else { self.trace_right() };
            self.fronts.truncate(n - j);
            (j, trace)
        };
        if self.fronts.is_empty() {
            self.lone_value = trace;
        }
        let datum = if left { self.datum_left() } else { self.datum_right() };
        let (fan, _new_trace) = if left {
            solve_boundary_left(&self.spec.plc, datum, trace)?
        } else {
            solve_boundary_right(&self.spec.plc, trace, datum)?
        };
        let outgoing = fan.waves.clone();
        let boundary_pos = if left { 0.0 } else { length.unwrap() };
        let new_fronts: Vec<Front> = fan
            .waves
            .iter()
            .map(|w| self.make_front(boundary_pos, *w))
            .collect();
        let inserted = new_fronts.len();
        if left {
            self.fronts.splice(0..0, new_fronts);
            for k in 0..inserted {
                let f = self.fronts[k];
                self.schedule_hit(f);
            }
            if inserted > 0 && inserted < self.fronts.len() {
                self.schedule_collision(self.fronts[inserted - 1], self.fronts[inserted]);
            }
        } else {
            let base = self.fronts.len();
            self.fronts.extend(new_fronts);
            for k in base..base + inserted {
                let f = self.fronts[k];
                self.schedule_hit(f);
            }
            if inserted > 0 && base > 0 {
                self.schedule_collision(self.fronts[base - 1], self.fronts[base]);
            }
        }
        let post = self.ledger();
        let site = if left { EventSite::LeftBoundary } else { EventSite::RightBoundary };
        self.push_record(site, boundary_pos, trigger, absorbed, jumps, outgoing, pre, post)
    }

    #[allow(clippy::too_many_arguments)]
    fn push_record(
        &mut self,
        site: EventSite,
        pos: f64,
        trigger: Trigger,
        incoming: usize,
        jumps_consumed: usize,
        outgoing: Vec<Wave>,
        pre: LedgerSide,
        post: LedgerSide,
    ) -> Result<()> {
        // The Glimm functional never increases; this is exact in integers.
        if post.v_index() > pre.v_index() {
            return Err(Error::Internal(format!(
                "variation functional increased at t={}: {} -> {}",
                self.spec.t_offset + self.clock,
                pre.v_index(),
                post.v_index()
            )));
        }
        self.records.push(EventRecord {
            seq: self.records.len(),
            time: self.spec.t_offset + self.clock,
            site,
            pos,
            trigger,
            incoming,
            jumps_consumed,
            outgoing,
            pre,
            post,
        });
        Ok(())
    }

    /// Run until no event remains before the slab end.
    pub fn run_to_end(&mut self) -> Result<()> {
        while self.step()? {}
        // Advance to the final time for a clean terminal snapshot.
        let t = self.spec.duration;
        let length = self.spec.domain.length();
        for f in &mut self.fronts {
            let mut p = f.position_at(t);
            p = p.max(0.0);
            if let Some(len) = length {
                p = p.min(len);
            }
            f.pos = p;
            f.anchor = t;
        }
        self.clock = t;
        self.take_snapshot();
        Ok(())
    }

    /// Package the finished run.
    pub fn into_solution(self) -> SlabSolution {
        SlabSolution {
            t_start: self.spec.t_offset,
            t_end: self.spec.t_offset + self.spec.duration,
            eps: self.spec.eps,
            domain: self.spec.domain,
            plc: self.spec.plc,
            initial: self.spec.initial,
            left_schedule: self.spec.left_schedule,
            right_schedule: self.spec.right_schedule,
            records: self.records,
            snapshots: self.snapshots,
        }
    }
}

/// Full problem statement prior to quantization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub domain: Domain,
    pub flux: SpaceTimeFlux,
    pub initial: StepFunction,
    pub left_boundary: StepFunction,
    pub right_boundary: Option<StepFunction>,
    pub horizon: f64,
    pub eps: f64,
}

impl Problem {
    pub fn validate(&self) -> Result<()> {
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidInterval { lo: 0.0, hi: self.horizon });
        }
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::InvalidSpacing(self.eps));
        }
        if self.initial.domain() != self.domain.interval() {
            return Err(Error::DomainMismatch);
        }
        let tdom = Interval::new(0.0, self.horizon)?;
        if self.left_boundary.domain() != tdom {
            return Err(Error::DomainMismatch);
        }
        if self.domain.is_segment() != self.right_boundary.is_some() {
            return Err(Error::DomainMismatch);
        }
        if let Some(rb) = &self.right_boundary {
            if rb.domain() != tdom {
                return Err(Error::DomainMismatch);
            }
        }
        Ok(())
    }

    fn sup_norm(f: &StepFunction) -> f64 {
        f.values().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Quantized problem plus the constants shared by every slab.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreparedProblem {
    pub eps: f64,
    pub domain: Domain,
    pub horizon: f64,
    pub flux: SpaceTimeFlux,
    pub initial: GridStepFunction,
    /// Absolute time domain [0, horizon].
    pub left_schedule: GridStepFunction,
    pub right_schedule: Option<GridStepFunction>,
    pub hull: IndexHull,
    pub clamp: i64,
    pub budget_weight: i64,
    pub sharp_weight: f64,
}

/// Quantize all data on the shared grid. Boundary quantizations are seeded
/// with the adjacent quantized initial value so no artificial jump appears at
/// the corner when the data agree there.
pub fn prepare(problem: &Problem) -> Result<PreparedProblem> {
    problem.validate()?;
    let eps = problem.eps;
    let sup_all = Problem::sup_norm(&problem.initial)
        .max(Problem::sup_norm(&problem.left_boundary))
        .max(
            problem
                .right_boundary
                .as_ref()
                .map_or(0.0, Problem::sup_norm),
        );
    let clamp = (sup_all / eps).floor() as i64;
    let initial = problem.initial.quantize(eps, clamp, None)?;
    let seed_left = initial.indices()[0];
    let left_schedule = problem.left_boundary.quantize(eps, clamp, Some(seed_left))?;
    let right_schedule = match &problem.right_boundary {
        Some(rb) => {
            let seed = *initial.indices().last().unwrap();
            Some(rb.quantize(eps, clamp, Some(seed))?)
        }
        None => None,
    };
    let mut hull = initial.hull().hull_with(&left_schedule.hull());
    if let Some(r) = &right_schedule {
        hull = hull.hull_with(&r.hull());
    }
    let k_o = initial.max_abs_index();
    let mut k_b = left_schedule.max_abs_index();
    let mut sup_b = Problem::sup_norm(&problem.left_boundary);
    if let Some(r) = &right_schedule {
        k_b = k_b.max(r.max_abs_index());
        sup_b = sup_b.max(Problem::sup_norm(problem.right_boundary.as_ref().unwrap()));
    }
    let budget_weight = 2 * (k_o + k_b);
    let sharp_weight = 2.0 * (sup_b + Problem::sup_norm(&problem.initial)) / eps;
    Ok(PreparedProblem {
        eps,
        domain: problem.domain,
        horizon: problem.horizon,
        flux: problem.flux.clone(),
        initial,
        left_schedule,
        right_schedule,
        hull,
        clamp,
        budget_weight,
        sharp_weight,
    })
}

/// Options for a solver run.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub fuse: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { fuse: 500_000 }
    }
}

/// Event merge tolerance for a run with the given horizon.
pub fn event_tolerance(horizon: f64) -> f64 {
    1e-11 * horizon.max(1.0)
}

/// Complete multi-slab solution. Autonomous runs have a single slab.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub prepared: PreparedProblem,
    /// The time axis was split into 2^depth slabs with the flux frozen at
    /// each slab's start.
    pub depth: u32,
    pub slabs: Vec<SlabSolution>,
}

impl Solution {
    pub fn eps(&self) -> f64 {
        self.prepared.eps
    }

    pub fn horizon(&self) -> f64 {
        self.prepared.horizon
    }

    pub fn slab_at(&self, t: f64) -> Result<&SlabSolution> {
        if !(t >= 0.0 && t <= self.prepared.horizon) {
            return Err(Error::PointOutsideDomain(t));
        }
        let i = self.slabs.partition_point(|s| s.t_start <= t);
        Ok(&self.slabs[i.saturating_sub(1)])
    }

    /// Exact profile at time t (grid indices).
    pub fn profile_index_at(&self, t: f64) -> Result<GridStepFunction> {
        self.slab_at(t)?.profile_index_at(t)
    }

    /// Exact profile at time t (real values).
    pub fn profile_at(&self, t: f64) -> Result<StepFunction> {
        Ok(self.profile_index_at(t)?.to_step())
    }

    /// L¹ distance between two solutions' profiles at a common time.
    pub fn l1_distance_at(&self, other: &Solution, t: f64) -> Result<f64> {
        self.profile_at(t)?.l1_distance(&other.profile_at(t)?)
    }

    pub fn trace_index_at(&self, t: f64, left: bool) -> Result<i64> {
        self.slab_at(t)?.trace_index_at(t, left)
    }

    pub fn datum_index_at(&self, t: f64, left: bool) -> Result<i64> {
        self.slab_at(t)?.datum_index_at(t, left)
    }

    pub fn records(&self) -> impl Iterator<Item = &EventRecord> {
        self.slabs.iter().flat_map(|s| s.records.iter())
    }
}

/// Solve an autonomous problem (single slab, flux tabulated once).
pub fn run(problem: &Problem, opts: SolveOptions) -> Result<Solution> {
    if !problem.flux.is_autonomous() {
        return Err(Error::Config(
            "time-dependent flux requires the dyadic splitting solver".into(),
        ));
    }
    let prepared = prepare(problem)?;
    let plc = PlcFlux::from_index_range(&prepared.flux, 0.0, prepared.eps, prepared.hull)?;
    let spec = SlabSpec {
        eps: prepared.eps,
        domain: prepared.domain,
        duration: prepared.horizon,
        t_offset: 0.0,
        plc,
        initial: prepared.initial.clone(),
        left_schedule: prepared.left_schedule.clone(),
        right_schedule: prepared.right_schedule.clone(),
        budget_weight: prepared.budget_weight,
        sharp_weight: prepared.sharp_weight,
        tau: event_tolerance(prepared.horizon),
        fuse: opts.fuse,
    };
    let mut tracker = Tracker::new(spec)?;
    tracker.run_to_end()?;
    Ok(Solution {
        prepared,
        depth: 0,
        slabs: vec![tracker.into_solution()],
    })
}
