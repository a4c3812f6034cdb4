//! Density-matrix evolution with a leaky cavity and the fidelity of CNOT_BA
//! against the ratio of gate time to cavity decay time.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{compile_gate, program_duration, qubit_ket, run_program, GateKind, GateSpec, QUBIT_INPUTS};
use crate::hilbert::{OpSpec, OperatorMatrix, PureState, SystemConfig};
use crate::params::PhysicalParams;
use crate::propagators::{analytic_propagate, case_generator, coupling_rate};

pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-10;
pub const EIGEN_FLOOR: f64 = -1e-9;
/// Largest trace drift accepted from [`lindblad_evolve`].
pub const TRACE_DRIFT_BOUND: f64 = 1e-8;
/// Largest anti-Hermitian part accepted from [`lindblad_evolve`].
pub const EVOLVED_HERMITIAN_BOUND: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    config: SystemConfig,
    matrix: DMatrix<C64>,
}

fn anti_hermitian(m: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..m.nrows() {
        for c in r..m.ncols() {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(config: SystemConfig, matrix: DMatrix<C64>) -> Result<Self> {
        config.validate()?;
        let dim = config.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Shape { expected: dim, got: matrix.nrows() });
        }
        let herm = anti_hermitian(&matrix);
        if herm > HERMITIAN_TOLERANCE {
            return Err(Error::NonHermitian(herm));
        }
        let rho = Self { config, matrix };
        let tr = rho.trace();
        if (tr - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::Domain { field: "trace", reason: format!("{tr} differs from 1") });
        }
        let low = rho.min_eigenvalue();
        if low < EIGEN_FLOOR {
            return Err(Error::Domain { field: "eigenvalue", reason: format!("{low} is negative") });
        }
        Ok(rho)
    }

    pub fn config(&self) -> SystemConfig {
        self.config
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        h.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `<psi| rho |psi>`.
    pub fn fidelity(&self, psi: &PureState) -> Result<f64> {
        if psi.config() != self.config {
            return Err(Error::Shape { expected: self.config.dim(), got: psi.dim() });
        }
        let v = psi.amplitudes();
        Ok((v.adjoint() * &self.matrix * v)[(0, 0)].re)
    }

    /// Population of the basis states selected by `pred`.
    pub fn population_where(&self, mut pred: impl FnMut(usize) -> bool) -> f64 {
        (0..self.matrix.nrows()).filter(|&i| pred(i)).map(|i| self.matrix[(i, i)].re).sum()
    }
}

/// `|psi><psi|`.
pub fn to_density(state: &PureState) -> Result<DensityMatrix> {
    let n = state.norm();
    if (n - 1.0).abs() > TRACE_TOLERANCE {
        return Err(Error::Domain { field: "state", reason: format!("norm {n} differs from 1") });
    }
    let v = state.amplitudes();
    Ok(DensityMatrix { config: state.config(), matrix: v * v.adjoint() })
}

/// Integrates `d rho/dt = -i[H, rho] + kappa (a rho a^+ - {a^+ a, rho}/2)`
/// with fixed-step RK4. The step is shrunk so that it divides `duration`.
///
/// Fails with [`Error::StepSize`] when the trace drifts by more than
/// [`TRACE_DRIFT_BOUND`] or an eigenvalue falls below [`EIGEN_FLOOR`].
pub fn lindblad_evolve(
    rho: &DensityMatrix,
    h: &OperatorMatrix,
    kappa: f64,
    duration: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    let cfg = rho.config;
    if h.config() != cfg {
        return Err(Error::Shape { expected: cfg.dim(), got: h.matrix().nrows() });
    }
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(Error::Domain { field: "kappa", reason: format!("{kappa} must be finite and >= 0") });
    }
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(Error::Domain { field: "duration", reason: format!("{duration} must be finite and >= 0") });
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Domain { field: "dt", reason: format!("{dt} must be positive") });
    }
    if duration == 0.0 {
        return Ok(rho.clone());
    }
    let steps = (duration / dt).ceil().max(1.0) as usize;
    let step = duration / steps as f64;

    let a = OperatorMatrix::build(cfg, OpSpec::A)?.into_matrix();
    let ad = a.adjoint();
    let n_half = (&ad * &a) * C64::new(0.5, 0.0);
    let minus_i = C64::new(0.0, -1.0);
    let hm = h.matrix();
    let k = C64::new(kappa, 0.0);
    // Effective non-Hermitian generator: -iH - kappa a^+ a / 2.
    let eff = hm * minus_i - &n_half * k;
    let eff_adj = eff.adjoint();
    let rhs = |r: &DMatrix<C64>| -> DMatrix<C64> {
        let mut out = &eff * r + r * &eff_adj;
        if kappa > 0.0 {
            out += (&a * r * &ad) * k;
        }
        out
    };

    let half = C64::new(step / 2.0, 0.0);
    let full = C64::new(step, 0.0);
    let sixth = C64::new(step / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);
    let mut r = rho.matrix.clone();
    for _ in 0..steps {
        let k1 = rhs(&r);
        let k2 = rhs(&(&r + &k1 * half));
        let k3 = rhs(&(&r + &k2 * half));
        let k4 = rhs(&(&r + &k3 * full));
        r += (k1 + k2 * two + k3 * two + k4) * sixth;
    }
    let out = DensityMatrix { config: cfg, matrix: r };
    let drift = (out.trace() - rho.trace()).abs();
    if drift > TRACE_DRIFT_BOUND {
        return Err(Error::StepSize { drift, bound: TRACE_DRIFT_BOUND });
    }
    let herm = anti_hermitian(&out.matrix);
    if herm > EVOLVED_HERMITIAN_BOUND {
        return Err(Error::NonHermitian(herm));
    }
    let low = out.min_eigenvalue();
    if low < EIGEN_FLOOR {
        return Err(Error::StepSize { drift: -low, bound: -EIGEN_FLOOR });
    }
    Ok(out)
}

/// Which pulses of a program run with the cavity leaking.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayWindow {
    #[default]
    LastPulse,
    AllPulses,
    Pulses(Vec<usize>),
}

impl DecayWindow {
    fn indices(&self, len: usize) -> Result<Vec<bool>> {
        let mut mask = vec![false; len];
        match self {
            DecayWindow::LastPulse => {
                if let Some(m) = mask.last_mut() {
                    *m = true;
                }
            }
            DecayWindow::AllPulses => mask.iter_mut().for_each(|m| *m = true),
            DecayWindow::Pulses(ix) => {
                for &i in ix {
                    if i >= len {
                        return Err(Error::Range { field: "decay_window", value: i, max: len.saturating_sub(1) });
                    }
                    mask[i] = true;
                }
            }
        }
        Ok(mask)
    }
}

/// Cavity decay rate `kappa` (1/s) and the pulses it acts during.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecaySpec {
    pub kappa: f64,
    #[serde(default)]
    pub window: DecayWindow,
}

impl DecaySpec {
    pub fn new(kappa: f64) -> Self {
        Self { kappa, window: DecayWindow::LastPulse }
    }
}

/// Numerical settings for the fidelity study. `dt` is measured in pulse
/// area (radians of the pulse angle).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FidelityOptions {
    pub cutoff: usize,
    pub dt: f64,
}

impl Default for FidelityOptions {
    fn default() -> Self {
        Self { cutoff: 1, dt: 2e-3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FidelityInput {
    /// Computational input `|a>_a |b>_b`.
    Basis(usize, usize),
    Average,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    /// Per input, ordered as [`QUBIT_INPUTS`].
    pub per_input: [f64; 4],
    pub average: f64,
}

fn run_with_decay(
    input: &PureState,
    params: &PhysicalParams,
    decay: &DecaySpec,
    opts: &FidelityOptions,
) -> Result<DensityMatrix> {
    let program = compile_gate(GateSpec::new(GateKind::CnotBa, 0));
    let mask = decay.window.indices(program.pulses.len())?;
    let cfg = input.config();
    let mut psi = input.clone();
    let mut rho: Option<DensityMatrix> = None;
    for (pulse, &leaky) in program.pulses.iter().zip(&mask) {
        if rho.is_none() && !leaky {
            psi = analytic_propagate(&psi, pulse)?;
            continue;
        }
        let current = match rho.take() {
            Some(r) => r,
            None => to_density(&psi)?,
        };
        let rate = coupling_rate(pulse.case, params);
        if rate == 0.0 {
            return Err(Error::ZeroCoupling { index: 0, case: pulse.case.to_string() });
        }
        let generator = case_generator(pulse.case, cfg, pulse.trap)?;
        let kappa = if leaky { decay.kappa / rate } else { 0.0 };
        rho = Some(lindblad_evolve(&current, &generator, kappa, pulse.theta, opts.dt)?);
    }
    match rho {
        Some(r) => Ok(r),
        None => to_density(&psi),
    }
}

/// Fidelity of CNOT_BA with cavity decay, per computational input and
/// averaged.
pub fn cnot_ba_fidelity_report(
    params: &PhysicalParams,
    decay: &DecaySpec,
    opts: &FidelityOptions,
) -> Result<FidelityReport> {
    params.validate()?;
    if !(decay.kappa.is_finite() && decay.kappa >= 0.0) {
        return Err(Error::Domain { field: "kappa", reason: format!("{} must be finite and >= 0", decay.kappa) });
    }
    let cfg = SystemConfig::new(1, opts.cutoff.max(1), opts.cutoff.max(1))?;
    let program = compile_gate(GateSpec::new(GateKind::CnotBa, 0));
    let mut per_input = [0.0; 4];
    for (slot, &(a, b)) in per_input.iter_mut().zip(QUBIT_INPUTS.iter()) {
        let input = qubit_ket(cfg, 0, a, b)?;
        let ideal = run_program(&input, &program)?;
        let rho = run_with_decay(&input, params, decay, opts)?;
        *slot = rho.fidelity(&ideal)?;
    }
    let average = per_input.iter().sum::<f64>() / 4.0;
    Ok(FidelityReport { per_input, average })
}

/// Fidelity of CNOT_BA under cavity decay `kappa` (1/s) during its last
/// pulse.
pub fn cnot_ba_fidelity(params: &PhysicalParams, kappa: f64, input: FidelityInput) -> Result<f64> {
    let report = cnot_ba_fidelity_report(params, &DecaySpec::new(kappa), &FidelityOptions::default())?;
    match input {
        FidelityInput::Average => Ok(report.average),
        FidelityInput::Basis(a, b) => QUBIT_INPUTS
            .iter()
            .position(|&p| p == (a, b))
            .map(|i| report.per_input[i])
            .ok_or(Error::Range { field: "input", value: a.max(b), max: 1 }),
    }
}

/// Duration of CNOT_BA in seconds.
pub fn cnot_ba_time(params: &PhysicalParams) -> Result<f64> {
    Ok(program_duration(&compile_gate(GateSpec::new(GateKind::CnotBa, 0)), params)?.total)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityPoint {
    /// Gate time over cavity decay time.
    pub ratio: f64,
    pub kappa: f64,
    pub fidelity: f64,
    pub per_input: [f64; 4],
}

/// Averaged fidelity over a grid of `T_im / T_d`, with `kappa = ratio / T_im`.
/// Points are evaluated in parallel and returned in input order.
pub fn fidelity_curve(
    params: &PhysicalParams,
    ratios: &[f64],
    window: &DecayWindow,
    opts: &FidelityOptions,
) -> Result<Vec<FidelityPoint>> {
    for &r in ratios {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Domain { field: "ratio", reason: format!("{r} must be positive") });
        }
    }
    let t_im = cnot_ba_time(params)?;
    ratios
        .par_iter()
        .map(|&ratio| {
            let kappa = ratio / t_im;
            let decay = DecaySpec { kappa, window: window.clone() };
            let rep = cnot_ba_fidelity_report(params, &decay, opts)?;
            Ok(FidelityPoint { ratio, kappa, fidelity: rep.average, per_input: rep.per_input })
        })
        .collect()
}
