//! Network assembly, fixed-step integration, and synchronization verdicts.
//!
//! The assembled right-hand side for node `i` is
//!
//! ```text
//! dX_i/dt = F_i(X_i, t) - epsilon * sum_{j adjacent to i} h(X_i, X_j)
//! ```
//!
//! The minus sign is the attractive convention for the shipped couplings
//! (each `h` points along the state difference, so subtracting it pulls
//! neighbors together); flipping it makes the same couplings repel and no
//! threshold applies. This convention is used everywhere, including for
//! couplings sometimes written with the opposite sign.
//!
//! States are flat row-major matrices (`n` nodes by `d` coordinates).
//! Trajectories record the pairwise-difference infinity norm and the
//! weighted Lyapunov function
//!
//! ```text
//! V = 1/2 * sum_k sum_{i<j} a_k (X_i^k - X_j^k)^2
//! ```
//!
//! which equals the squared weighted norm of the difference vector, so ball
//! containment reduces to `sqrt(V) <= r`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{CouplingFunction, OscillatorModel, WeightVector};
use crate::error::{Error, Result};
use crate::graph::UndirectedGraph;

/// The coupled network: graph + per-node fields + coupling + weights +
/// coupling strength.
#[derive(Debug, Clone)]
pub struct NetworkSystem {
    graph: UndirectedGraph,
    model: OscillatorModel,
    coupling: CouplingFunction,
    weights: WeightVector,
    epsilon: f64,
}

/// Validates dimension agreement and assembles the network right-hand side.
pub fn assemble(
    graph: UndirectedGraph,
    model: OscillatorModel,
    coupling: CouplingFunction,
    weights: WeightVector,
    epsilon: f64,
) -> Result<NetworkSystem> {
    let d = model.dim();
    if coupling.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "model dimension {} but coupling dimension {}",
            d,
            coupling.dim()
        )));
    }
    if weights.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "model dimension {} but weight vector length {}",
            d,
            weights.len()
        )));
    }
    if let Some(required) = model.required_nodes() {
        if required != graph.n() {
            return Err(Error::DimensionMismatch(format!(
                "model carries {} per-node parameter records but the graph has {} vertices",
                required,
                graph.n()
            )));
        }
    }
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "coupling strength must be finite and nonnegative, got {epsilon}"
        )));
    }
    Ok(NetworkSystem { graph, model, coupling, weights, epsilon })
}

impl NetworkSystem {
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn graph(&self) -> &UndirectedGraph {
        &self.graph
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Evaluates the network right-hand side into `out`. `scratch` must hold
    /// `d` values.
    pub fn rhs_into(&self, t: f64, state: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        let n = self.n();
        let d = self.dim();
        debug_assert_eq!(state.len(), n * d);
        debug_assert_eq!(out.len(), n * d);
        for i in 0..n {
            let xi = &state[i * d..(i + 1) * d];
            let oi = &mut out[i * d..(i + 1) * d];
            self.model.eval_into(i, xi, t, oi);
        }
        for i in 0..n {
            let vertex = i + 1;
            for &jv in self.graph.neighbors(vertex) {
                let j = jv - 1;
                // Split borrow: node i's slice is disjoint from node j's.
                let xi = &state[i * d..(i + 1) * d];
                let xj = &state[j * d..(j + 1) * d];
                self.coupling.eval_into(xi, xj, scratch);
                for k in 0..d {
                    out[i * d + k] -= self.epsilon * scratch[k];
                }
            }
        }
    }

    /// Integrates with classical fixed-step RK4 and records every
    /// `record_every`-th step (plus the initial and final states), filling
    /// the Lyapunov and difference-norm series.
    pub fn integrate(
        &self,
        x0: &[f64],
        t0: f64,
        t_end: f64,
        dt: f64,
        record_every: usize,
    ) -> Result<Trajectory> {
        let n = self.n();
        let d = self.dim();
        if x0.len() != n * d {
            return Err(Error::DimensionMismatch(format!(
                "initial state has {} values, expected {}",
                x0.len(),
                n * d
            )));
        }
        let mut scratch = vec![0.0; d];
        let mut f = |t: f64, state: &[f64], out: &mut [f64]| {
            self.rhs_into(t, state, out, &mut scratch);
        };
        let mut times = Vec::new();
        let mut states: Vec<Vec<f64>> = Vec::new();
        rk4_integrate(&mut f, x0, t0, t_end, dt, record_every, |t, state| {
            times.push(t);
            states.push(state.to_vec());
        })?;
        let v = states
            .iter()
            .map(|s| lyapunov_v(s, n, d, &self.weights))
            .collect();
        let delta_inf = states.iter().map(|s| delta_inf_norm(s, n, d)).collect();
        Ok(Trajectory { n, d, times, states, v, delta_inf })
    }
}

/// Classical 4th-order Runge-Kutta with a fixed step; the final partial step
/// is shortened to land exactly on `t_end`.
///
/// `on_sample` receives the initial state, every `record_every`-th step, and
/// the final state. Integration aborts with the blow-up time if the state
/// stops being finite.
pub fn rk4_integrate<F>(
    f: &mut F,
    x0: &[f64],
    t0: f64,
    t_end: f64,
    dt: f64,
    record_every: usize,
    mut on_sample: impl FnMut(f64, &[f64]),
) -> Result<()>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidConfig(format!("dt must be positive, got {dt}")));
    }
    if !(t_end > t0) {
        return Err(Error::InvalidConfig(format!(
            "t_end ({t_end}) must exceed t0 ({t0})"
        )));
    }
    if record_every == 0 {
        return Err(Error::InvalidConfig("record_every must be at least 1".into()));
    }
    let dim = x0.len();
    let mut state = x0.to_vec();
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut probe = vec![0.0; dim];

    let span = t_end - t0;
    let full_steps = (span / dt + 1e-9).floor() as u64;
    let remainder = t_end - (t0 + full_steps as f64 * dt);
    let has_partial = remainder > dt * 1e-9;

    on_sample(t0, &state);
    let mut recorded_last = true;
    for step in 0..full_steps {
        let t = t0 + step as f64 * dt;
        rk4_step(f, t, dt, &mut state, &mut k1, &mut k2, &mut k3, &mut k4, &mut probe);
        if !state.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteState { time: t + dt });
        }
        recorded_last = (step + 1) % record_every as u64 == 0;
        if recorded_last {
            on_sample(t0 + (step + 1) as f64 * dt, &state);
        }
    }
    if has_partial {
        let t = t0 + full_steps as f64 * dt;
        rk4_step(
            f,
            t,
            t_end - t,
            &mut state,
            &mut k1,
            &mut k2,
            &mut k3,
            &mut k4,
            &mut probe,
        );
        if !state.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteState { time: t_end });
        }
        on_sample(t_end, &state);
    } else if !recorded_last {
        on_sample(t_end, &state);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn rk4_step<F>(
    f: &mut F,
    t: f64,
    dt: f64,
    state: &mut [f64],
    k1: &mut [f64],
    k2: &mut [f64],
    k3: &mut [f64],
    k4: &mut [f64],
    probe: &mut [f64],
) where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let dim = state.len();
    f(t, state, k1);
    for i in 0..dim {
        probe[i] = state[i] + 0.5 * dt * k1[i];
    }
    f(t + 0.5 * dt, probe, k2);
    for i in 0..dim {
        probe[i] = state[i] + 0.5 * dt * k2[i];
    }
    f(t + 0.5 * dt, probe, k3);
    for i in 0..dim {
        probe[i] = state[i] + dt * k3[i];
    }
    f(t + dt, probe, k4);
    for i in 0..dim {
        state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/// Convenience wrapper returning only the final state.
pub fn rk4_solve<F>(f: &mut F, x0: &[f64], t0: f64, t_end: f64, dt: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let mut last = x0.to_vec();
    rk4_integrate(f, x0, t0, t_end, dt, usize::MAX - 1, |_, s| {
        last.copy_from_slice(s);
    })?;
    Ok(last)
}

/// Recorded trajectory of a network integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub n: usize,
    pub d: usize,
    /// Strictly increasing sample times.
    pub times: Vec<f64>,
    /// One flat `n * d` state per sample.
    pub states: Vec<Vec<f64>>,
    /// Lyapunov series `V(t)` at the sample times.
    pub v: Vec<f64>,
    /// Pairwise-difference infinity norm at the sample times.
    pub delta_inf: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// CSV export: header `t,x_<i>_<k>...,V,delta_inf` (1-indexed), one row
    /// per sample, 17 significant digits throughout. The output is
    /// byte-stable for identical trajectories.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.len() * (self.n * self.d + 3) * 26);
        out.push('t');
        for i in 1..=self.n {
            for k in 1..=self.d {
                out.push_str(&format!(",x_{i}_{k}"));
            }
        }
        out.push_str(",V,delta_inf\n");
        for idx in 0..self.len() {
            out.push_str(&format!("{:.16e}", self.times[idx]));
            for value in &self.states[idx] {
                out.push_str(&format!(",{value:.16e}"));
            }
            out.push_str(&format!(",{:.16e},{:.16e}\n", self.v[idx], self.delta_inf[idx]));
        }
        out
    }
}

/// Stacked pairwise differences `X_i - X_j`, ordered lexicographically by
/// `(i, j)` with `i < j`: `(1,2), (1,3), ..., (1,n), (2,3), ..., (n-1,n)`.
pub fn delta_vector(state: &[f64], n: usize, d: usize) -> Vec<f64> {
    debug_assert_eq!(state.len(), n * d);
    let mut out = Vec::with_capacity(n * (n - 1) / 2 * d);
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..d {
                out.push(state[i * d + k] - state[j * d + k]);
            }
        }
    }
    out
}

/// Infinity norm of [`delta_vector`]: the largest coordinate difference over
/// all node pairs.
pub fn delta_inf_norm(state: &[f64], n: usize, d: usize) -> f64 {
    debug_assert_eq!(state.len(), n * d);
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..d {
                worst = worst.max((state[i * d + k] - state[j * d + k]).abs());
            }
        }
    }
    worst
}

/// Weighted Lyapunov function
/// `V = 1/2 sum_k sum_{i<j} a_k (X_i^k - X_j^k)^2`; zero exactly when all
/// rows agree (weights are strictly positive).
pub fn lyapunov_v(state: &[f64], n: usize, d: usize, weights: &WeightVector) -> f64 {
    debug_assert_eq!(state.len(), n * d);
    let w = weights.as_slice();
    let mut acc = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..d {
                let diff = state[i * d + k] - state[j * d + k];
                acc += w[k] * diff * diff;
            }
        }
    }
    0.5 * acc
}

/// Weighted norm of a stacked difference vector: `sqrt(1/2 sum a_k y_k^2)`
/// block-wise. Satisfies `v_norm(delta_vector(s))^2 == lyapunov_v(s)`.
pub fn v_norm(delta: &[f64], d: usize, weights: &WeightVector) -> f64 {
    debug_assert_eq!(delta.len() % d, 0);
    let w = weights.as_slice();
    let mut acc = 0.0;
    for block in delta.chunks_exact(d) {
        for (k, y) in block.iter().enumerate() {
            acc += w[k] * y * y;
        }
    }
    (0.5 * acc).sqrt()
}

/// Relative tolerance scale for the Lyapunov monotonicity check: a recorded
/// step counts as a violation when its finite-difference slope exceeds
/// `V_SLOPE_TOL_SCALE * max(1, V)`.
pub const V_SLOPE_TOL_SCALE: f64 = 1e-8;

/// Synchronization verdict over a recorded trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct SyncReport {
    /// True when the difference norm stays below `tolerance` over the whole
    /// trailing window.
    pub synced: bool,
    /// Earliest recorded time after which the difference norm never exceeds
    /// the tolerance again.
    pub t_sync: Option<f64>,
    /// Difference norm at the final sample.
    pub final_residual: f64,
    pub tolerance: f64,
    pub trailing_window: f64,
    /// Recorded steps whose V slope exceeds the scale-aware tolerance.
    pub v_violation_count: usize,
    /// Largest finite-difference slope of V (negative when V only decays).
    pub worst_v_slope: f64,
    /// Ball containment record, when requested.
    pub ball: Option<BallContainment>,
}

/// Builds the synchronization verdict from a recorded trajectory.
///
/// The criterion is asymptotic in principle; requiring the norm to stay
/// below tolerance over a sustained trailing window avoids declaring success
/// on a transient crossing.
pub fn sync_report(traj: &Trajectory, tolerance: f64, trailing_window: f64) -> Result<SyncReport> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "sync tolerance must be positive, got {tolerance}"
        )));
    }
    if traj.is_empty() {
        return Err(Error::InvalidConfig("trajectory has no samples".into()));
    }
    let t_start = *traj.times.first().expect("nonempty");
    let t_end = *traj.times.last().expect("nonempty");
    if !(trailing_window >= 0.0 && trailing_window <= t_end - t_start) {
        return Err(Error::InvalidConfig(format!(
            "trailing window {trailing_window} exceeds the trajectory span {}",
            t_end - t_start
        )));
    }

    let window_start = t_end - trailing_window - 1e-9;
    let synced = traj
        .times
        .iter()
        .zip(&traj.delta_inf)
        .filter(|(t, _)| **t >= window_start)
        .all(|(_, r)| *r < tolerance);

    // Last sample at or above tolerance determines t_sync.
    let mut t_sync = Some(traj.times[0]);
    for idx in (0..traj.len()).rev() {
        if traj.delta_inf[idx] >= tolerance {
            t_sync = if idx + 1 < traj.len() {
                Some(traj.times[idx + 1])
            } else {
                None
            };
            break;
        }
    }

    let mut v_violation_count = 0;
    let mut worst_v_slope = 0.0_f64;
    for idx in 0..traj.len().saturating_sub(1) {
        let dt = traj.times[idx + 1] - traj.times[idx];
        if dt <= 0.0 {
            continue;
        }
        let slope = (traj.v[idx + 1] - traj.v[idx]) / dt;
        worst_v_slope = worst_v_slope.max(slope);
        if slope > V_SLOPE_TOL_SCALE * traj.v[idx].max(1.0) {
            v_violation_count += 1;
        }
    }

    Ok(SyncReport {
        synced,
        t_sync,
        final_residual: *traj.delta_inf.last().expect("nonempty"),
        tolerance,
        trailing_window,
        v_violation_count,
        worst_v_slope,
        ball: None,
    })
}

impl SyncReport {
    /// Machine-readable `key = value` export (17 significant digits, stable
    /// ordering).
    pub fn to_key_values(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        writeln!(out, "synced = {}", self.synced).unwrap();
        match self.t_sync {
            Some(t) => writeln!(out, "t_sync = {t:.16e}").unwrap(),
            None => writeln!(out, "t_sync = none").unwrap(),
        }
        writeln!(out, "final_residual = {:.16e}", self.final_residual).unwrap();
        writeln!(out, "sync_tolerance = {:.16e}", self.tolerance).unwrap();
        writeln!(out, "trailing_window = {:.16e}", self.trailing_window).unwrap();
        writeln!(out, "v_violations = {}", self.v_violation_count).unwrap();
        writeln!(out, "worst_v_slope = {:.16e}", self.worst_v_slope).unwrap();
        if let Some(ball) = &self.ball {
            writeln!(out, "ball_radius = {:.16e}", ball.radius).unwrap();
            writeln!(out, "ball_initial_norm = {:.16e}", ball.initial_norm).unwrap();
            writeln!(out, "ball_initially_interior = {}", ball.initially_interior).unwrap();
            writeln!(out, "ball_max_norm = {:.16e}", ball.max_norm).unwrap();
            match ball.first_exit {
                Some(t) => writeln!(out, "ball_first_exit = {t:.16e}").unwrap(),
                None => writeln!(out, "ball_first_exit = none").unwrap(),
            }
            writeln!(out, "ball_contained = {}", ball.contained).unwrap();
        }
        out
    }
}

/// Containment of the difference trajectory in the weighted-norm ball of
/// radius `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallContainment {
    pub radius: f64,
    /// Weighted difference norm at the first sample.
    pub initial_norm: f64,
    /// Whether the first sample is strictly inside the ball.
    pub initially_interior: bool,
    /// Largest weighted difference norm over the recorded samples.
    pub max_norm: f64,
    /// First recorded time at which the trajectory left the ball, if any.
    pub first_exit: Option<f64>,
    /// True when every recorded sample stays inside the closed ball.
    pub contained: bool,
}

/// Checks `sqrt(V(t)) <= r` at every recorded sample.
pub fn ball_containment(traj: &Trajectory, radius: f64) -> Result<BallContainment> {
    if !(radius > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "ball radius must be positive, got {radius}"
        )));
    }
    if traj.is_empty() {
        return Err(Error::InvalidConfig("trajectory has no samples".into()));
    }
    let norms: Vec<f64> = traj.v.iter().map(|v| v.max(0.0).sqrt()).collect();
    let initial_norm = norms[0];
    let mut max_norm = 0.0_f64;
    let mut first_exit = None;
    for (idx, norm) in norms.iter().enumerate() {
        max_norm = max_norm.max(*norm);
        if first_exit.is_none() && *norm > radius * (1.0 + 1e-12) {
            first_exit = Some(traj.times[idx]);
        }
    }
    Ok(BallContainment {
        radius,
        initial_norm,
        initially_interior: initial_norm < radius,
        max_norm,
        first_exit,
        contained: first_exit.is_none(),
    })
}

/// Samples an initial state matrix whose difference vector sits exactly at
/// weighted norm `v_radius`.
///
/// The lift fixes node 1 at `base` and offsets the remaining nodes by a
/// Gaussian direction rescaled so that `sqrt(V(x0)) = v_radius`; a radius of
/// zero returns the fully synchronized matrix.
pub fn initial_states_in_v_ball(
    n: usize,
    d: usize,
    weights: &WeightVector,
    base: &[f64],
    v_radius: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if base.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "base state has {} values, expected {}",
            base.len(),
            d
        )));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("need at least two nodes".into()));
    }
    if !(v_radius >= 0.0 && v_radius.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "target norm must be finite and nonnegative, got {v_radius}"
        )));
    }
    let mut state = Vec::with_capacity(n * d);
    for _ in 0..n {
        state.extend_from_slice(base);
    }
    if v_radius == 0.0 {
        return Ok(state);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let offsets: Vec<f64> = (0..(n - 1) * d).map(|_| standard_normal(&mut rng)).collect();
        for i in 1..n {
            for k in 0..d {
                state[i * d + k] = base[k] + offsets[(i - 1) * d + k];
            }
        }
        let norm = lyapunov_v(&state, n, d, weights).sqrt();
        if norm > 1e-12 {
            let scale = v_radius / norm;
            for i in 1..n {
                for k in 0..d {
                    state[i * d + k] = base[k] + (state[i * d + k] - base[k]) * scale;
                }
            }
            return Ok(state);
        }
        // Degenerate draw; redraw from the advanced stream.
    }
}

/// Samples an initial state matrix with every coordinate uniform in a box.
pub fn initial_states_random_box(
    n: usize,
    d: usize,
    lower: &[f64],
    upper: &[f64],
    seed: u64,
) -> Result<Vec<f64>> {
    if lower.len() != d || upper.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "box bounds have {} and {} values, expected {}",
            lower.len(),
            upper.len(),
            d
        )));
    }
    for (lo, hi) in lower.iter().zip(upper) {
        if !(lo < hi) {
            return Err(Error::InvalidConfig(format!(
                "box requires lower < upper, got [{lo}, {hi}]"
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = Vec::with_capacity(n * d);
    for _ in 0..n {
        for k in 0..d {
            state.push(rng.random_range(lower[k]..=upper[k]));
        }
    }
    Ok(state)
}

/// Box-Muller standard normal draw.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
