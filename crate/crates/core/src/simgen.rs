//! Benchmark generators: a noisy VAR(1) network with a confounder and three
//! one-way coupled Rössler oscillators, plus the coupling-strength sweep.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimator::{estimate_flow_matrix, AnalysisConfig, FlowEstimate};
use crate::panel::TimeSeriesPanel;
use crate::rng::SimRng;

/// Transition matrix of the six-node VAR benchmark.
pub const VAR6_TRANSITION: [[f64; 6]; 6] = [
    [0.0, 0.0, -0.6, 0.0, 0.0, 0.0],
    [-0.5, 0.0, 0.0, 0.0, 0.0, 0.8],
    [0.0, 0.7, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.7, 0.4, 0.0],
    [0.0, 0.0, 0.0, 0.2, 0.0, 0.7],
    [0.0, 0.0, 0.0, 0.0, 0.0, -0.5],
];

pub const VAR6_INTERCEPT: [f64; 6] = [0.1, 0.7, 0.5, 0.2, 0.8, 0.3];

/// Designed edges of the VAR benchmark as 0-based `(source, target)` pairs.
pub const VAR6_EDGES: [(usize, usize); 7] =
    [(0, 1), (1, 2), (2, 0), (3, 4), (4, 3), (5, 1), (5, 4)];

pub const DEFAULT_VAR_BURN_IN: usize = 1000;

/// `X(n+1) = α + A X(n) + diag(b) e(n+1)` with i.i.d. standard normal `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct VarSpec {
    pub transition: DMatrix<f64>,
    pub intercept: Vec<f64>,
    pub noise: Vec<f64>,
    pub n: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl VarSpec {
    /// The six-node benchmark with every noise amplitude set to `noise`.
    pub fn var6(noise: f64, n: usize, seed: u64) -> Self {
        Self {
            transition: DMatrix::from_fn(6, 6, |i, j| VAR6_TRANSITION[i][j]),
            intercept: VAR6_INTERCEPT.to_vec(),
            noise: vec![noise; 6],
            n,
            burn_in: DEFAULT_VAR_BURN_IN,
            seed,
        }
    }

    pub fn d(&self) -> usize {
        self.intercept.len()
    }

    /// Largest eigenvalue modulus of the transition matrix.
    pub fn spectral_radius(&self) -> f64 {
        self.transition
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    fn validate(&self) -> Result<()> {
        let d = self.d();
        if self.transition.nrows() != d || self.transition.ncols() != d || self.noise.len() != d {
            return Err(Error::InvalidArgument(format!(
                "VAR spec dimensions disagree: A is {}x{}, {} intercepts, {} noise amplitudes",
                self.transition.nrows(),
                self.transition.ncols(),
                d,
                self.noise.len()
            )));
        }
        if self.n == 0 {
            return Err(Error::InvalidArgument("VAR length must be positive".into()));
        }
        Ok(())
    }
}

pub fn simulate_var(spec: &VarSpec) -> Result<TimeSeriesPanel> {
    spec.validate()?;
    let d = spec.d();
    let radius = spec.spectral_radius();
    if radius >= 1.0 {
        log::warn!("VAR transition matrix has spectral radius {radius:.4} >= 1; the process is not stationary");
    }
    let mut rng = SimRng::seed_from_u64(spec.seed);
    let mut x: Vec<f64> = (0..d)
        .map(|i| spec.intercept[i] + spec.noise[i] * rng.standard_normal())
        .collect();
    let mut rows: Vec<Vec<f64>> = (0..d).map(|_| Vec::with_capacity(spec.n)).collect();
    let mut next = vec![0.0; d];
    for step in 0..spec.burn_in + spec.n {
        for (i, v) in next.iter_mut().enumerate() {
            let drift: f64 = (0..d).map(|j| spec.transition[(i, j)] * x[j]).sum();
            *v = spec.intercept[i] + drift + spec.noise[i] * rng.standard_normal();
        }
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { step });
        }
        std::mem::swap(&mut x, &mut next);
        if step >= spec.burn_in {
            for (row, v) in rows.iter_mut().zip(&x) {
                row.push(*v);
            }
        }
    }
    TimeSeriesPanel::build(rows, 1.0, None)
}

/// Three Rössler oscillators; `X` drives `Y` and `Z` through their first
/// components with strength `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledRossler {
    pub omega: [f64; 3],
    pub epsilon: f64,
}

pub type RosslerState = [f64; 9];

impl CoupledRossler {
    pub fn rhs(&self, s: &RosslerState) -> RosslerState {
        let mut out = [0.0; 9];
        let driver = s[0];
        for (osc, &w) in self.omega.iter().enumerate() {
            let b = 3 * osc;
            let (u, v, z) = (s[b], s[b + 1], s[b + 2]);
            let coupling = if osc == 0 {
                0.0
            } else {
                self.epsilon * (driver - u)
            };
            out[b] = -w * v - z + coupling;
            out[b + 1] = w * u + 0.15 * v;
            out[b + 2] = 0.2 + z * (u - 10.0);
        }
        out
    }

    /// One Heun (trapezoidal predictor–corrector) step.
    pub fn heun_step(&self, s: &mut RosslerState, dt: f64) {
        let k1 = self.rhs(s);
        let mut pred = *s;
        for (p, k) in pred.iter_mut().zip(&k1) {
            *p += dt * k;
        }
        let k2 = self.rhs(&pred);
        for i in 0..9 {
            s[i] += 0.5 * dt * (k1[i] + k2[i]);
        }
    }
}

pub const ROSSLER_LABELS: [&str; 9] = ["x1", "x2", "x3", "y1", "y2", "y3", "z1", "z2", "z3"];

/// Rows of `x1`, `y1`, `z1` in the nine-variable panel.
pub const OSCILLATOR_ROWS: [usize; 3] = [0, 3, 6];

pub const DIVERGENCE_BOUND: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RosslerSpec {
    pub omega: [f64; 3],
    pub epsilon: f64,
    pub dt: f64,
    pub n_total: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl RosslerSpec {
    /// `ω = (1.015, 0.985, 0.95)`, `dt = 0.001`, 50000 steps with the first
    /// 10000 discarded.
    pub fn benchmark(epsilon: f64, seed: u64) -> Self {
        Self {
            omega: [1.015, 0.985, 0.95],
            epsilon,
            dt: 0.001,
            n_total: 50_000,
            burn_in: 10_000,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.burn_in >= self.n_total {
            return Err(Error::InvalidArgument(format!(
                "burn-in {} must be below total steps {}",
                self.burn_in, self.n_total
            )));
        }
        if !self.epsilon.is_finite() {
            return Err(Error::InvalidArgument("epsilon must be finite".into()));
        }
        Ok(())
    }
}

/// Integrates the nine-variable system from a uniform `[0, 1)^9` start and
/// returns the `n_total - burn_in` states after the burn-in.
pub fn simulate_rossler(spec: &RosslerSpec) -> Result<TimeSeriesPanel> {
    spec.validate()?;
    let system = CoupledRossler {
        omega: spec.omega,
        epsilon: spec.epsilon,
    };
    let mut rng = SimRng::seed_from_u64(spec.seed);
    let mut state: RosslerState = [0.0; 9];
    for v in state.iter_mut() {
        *v = rng.uniform();
    }
    let kept = spec.n_total - spec.burn_in;
    let mut rows: Vec<Vec<f64>> = (0..9).map(|_| Vec::with_capacity(kept)).collect();
    for step in 1..=spec.n_total {
        system.heun_step(&mut state, spec.dt);
        if state
            .iter()
            .any(|v| !v.is_finite() || v.abs() > DIVERGENCE_BOUND)
        {
            return Err(Error::Divergence { step });
        }
        if step > spec.burn_in {
            for (row, v) in rows.iter_mut().zip(&state) {
                row.push(*v);
            }
        }
    }
    let labels = ROSSLER_LABELS.iter().map(|s| s.to_string()).collect();
    TimeSeriesPanel::build(rows, spec.dt, Some(labels))
}

/// The `x1`, `y1`, `z1` rows standing in for the three oscillators.
pub fn oscillator_panel(full: &TimeSeriesPanel) -> Result<TimeSeriesPanel> {
    full.select(&OSCILLATOR_ROWS)
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Ordered oscillator pairs reported by the sweep, as indices into `(X, Y, Z)`.
pub const SWEEP_PAIRS: [(usize, usize, &str); 6] = [
    (0, 1, "X_to_Y"),
    (1, 0, "Y_to_X"),
    (0, 2, "X_to_Z"),
    (2, 0, "Z_to_X"),
    (1, 2, "Y_to_Z"),
    (2, 1, "Z_to_Y"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    /// Flows in [`SWEEP_PAIRS`] order.
    pub flows: [FlowEstimate; 6],
    /// Pearson correlation of `y1` and `z1`.
    pub sync_corr: f64,
}

impl SweepRow {
    pub fn csv_header() -> String {
        let mut cols = vec!["epsilon".to_string()];
        cols.extend(SWEEP_PAIRS.iter().map(|(_, _, n)| format!("abs_T_{n}")));
        cols.extend(SWEEP_PAIRS.iter().map(|(_, _, n)| format!("sig_{n}")));
        cols.join(",")
    }

    pub fn csv_line(&self) -> String {
        let mut cols = vec![format!("{}", self.epsilon)];
        cols.extend(self.flows.iter().map(|f| format!("{:.6e}", f.value.abs())));
        cols.extend(
            self.flows
                .iter()
                .map(|f| u8::from(f.significant).to_string()),
        );
        cols.join(",")
    }
}

/// `steps` evenly spaced values from `from` to `to` inclusive.
pub fn epsilon_grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    match steps {
        0 => Err(Error::InvalidArgument(
            "sweep needs at least one point".into(),
        )),
        1 => Ok(vec![from]),
        _ => Ok((0..steps)
            .map(|s| from + (to - from) * s as f64 / (steps - 1) as f64)
            .collect()),
    }
}

/// Simulates the oscillators at every coupling in `grid` (same seed and
/// initial state) and reports the six flows among `x1`, `y1`, `z1`.
///
/// Flows are estimated on the full nine-variable state, in which the first
/// component of each oscillator evolves linearly; `x1`, `y1` and `z1` then
/// stand in for the oscillators when the pairwise rates are read off.
pub fn sweep_epsilon(
    base: &RosslerSpec,
    grid: &[f64],
    config: &AnalysisConfig,
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty epsilon grid".into()));
    }
    grid.par_iter()
        .map(|&epsilon| {
            let spec = RosslerSpec { epsilon, ..*base };
            let panel = simulate_rossler(&spec)?;
            let fm = estimate_flow_matrix(&panel, config)?;
            let flows = SWEEP_PAIRS.map(|(s, t, _)| {
                *fm.flow(OSCILLATOR_ROWS[s], OSCILLATOR_ROWS[t])
                    .expect("off-diagonal pair")
            });
            Ok(SweepRow {
                epsilon,
                flows,
                sync_corr: pearson(panel.row(OSCILLATOR_ROWS[1]), panel.row(OSCILLATOR_ROWS[2])),
            })
        })
        .collect()
}

pub const DEFAULT_ROSSLER_EPSILON: f64 = 0.1;

/// Named benchmark configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// VAR network, unit noise, 10000 steps.
    Var6B1,
    /// VAR network, noise amplitude 100, 10000 steps.
    Var6B100,
    /// VAR network, noise amplitude 100, 500 steps.
    Var6B100Short,
    /// Coupled Rössler oscillators, 40000 retained points.
    Rossler,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Self::Var6B1,
        Self::Var6B100,
        Self::Var6B100Short,
        Self::Rossler,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Var6B1 => "var6-b1",
            Self::Var6B100 => "var6-b100",
            Self::Var6B100Short => "var6-b100-short",
            Self::Rossler => "rossler",
        }
    }

    /// Differencing stride recommended for the preset.
    pub fn default_k(&self) -> usize {
        match self {
            Self::Rossler => 2,
            _ => 1,
        }
    }

    pub fn var_spec(&self, seed: u64) -> Option<VarSpec> {
        match self {
            Self::Var6B1 => Some(VarSpec::var6(1.0, 10_000, seed)),
            Self::Var6B100 => Some(VarSpec::var6(100.0, 10_000, seed)),
            Self::Var6B100Short => Some(VarSpec::var6(100.0, 500, seed)),
            Self::Rossler => None,
        }
    }

    /// Full generated panel (nine rows for the oscillators).
    ///
    /// `epsilon` applies to the oscillator preset only.
    pub fn generate(&self, seed: u64, epsilon: Option<f64>) -> Result<TimeSeriesPanel> {
        match self.var_spec(seed) {
            Some(spec) => {
                if epsilon.is_some() {
                    return Err(Error::InvalidArgument(format!(
                        "epsilon is not a parameter of preset {}",
                        self.name()
                    )));
                }
                simulate_var(&spec)
            }
            None => simulate_rossler(&RosslerSpec::benchmark(
                epsilon.unwrap_or(DEFAULT_ROSSLER_EPSILON),
                seed,
            )),
        }
    }

    /// Panel the preset is analyzed on; same as [`Preset::generate`].
    ///
    /// The oscillator preset keeps all nine components so that each
    /// oscillator's first component has a linear governing equation; use
    /// [`OSCILLATOR_ROWS`] to locate `x1`, `y1`, `z1`.
    pub fn analysis_panel(&self, seed: u64, epsilon: Option<f64>) -> Result<TimeSeriesPanel> {
        self.generate(seed, epsilon)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = Self::ALL.iter().map(|p| p.name()).collect();
                Error::InvalidArgument(format!(
                    "unknown preset `{s}` (known: {})",
                    known.join(", ")
                ))
            })
    }
}
