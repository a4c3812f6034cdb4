//! Time-dependent integration of the full ion-trap-cavity Hamiltonian
//!
//! ```text
//! H = w0/2 sz + nu b^dag b + w_c a^dag a
//!   + G [s+ exp(i eta_L (b^dag + b) - i w_L t) + h.c.]
//!   + g sx (a^dag + a) sin(eta_c (b^dag + b) + phi)
//! ```
//!
//! summed over traps. The free part is diagonal, so the state is carried in
//! its rotating frame (an exact change of variables, no terms dropped) and
//! rotated back to the lab frame at the end. This keeps the RK4 step bounded
//! by the coupling and detuning scales rather than by `w0`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{analytic_propagate, coupling_rate, Case, Pulse};
use crate::error::{Error, Result};
use crate::hilbert::{Factor, OpSpec, OperatorMatrix, PureState, SystemConfig};
use crate::params::PhysicalParams;

pub const NORM_DRIFT_BOUND: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabFrameOptions {
    /// Replace `sin(eta_c X + phi)` by `eta_c X cos(phi) + sin(phi)` and
    /// `exp(i eta_L X)` by `1 + i eta_L X`.
    pub lamb_dicke_linearized: bool,
    pub dt: f64,
}

/// `f(b + b^dag)` on a truncated phonon ladder, by diagonalization.
fn phonon_function(cutoff: usize, f: impl Fn(f64) -> C64) -> DMatrix<C64> {
    let r = cutoff + 1;
    let mut x = DMatrix::<f64>::zeros(r, r);
    for n in 1..r {
        x[(n - 1, n)] = (n as f64).sqrt();
        x[(n, n - 1)] = (n as f64).sqrt();
    }
    let eig = x.symmetric_eigen();
    let v = eig.eigenvectors.map(|e| C64::new(e, 0.0));
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f));
    &v * d * v.adjoint()
}

fn position(cutoff: usize) -> DMatrix<C64> {
    let r = cutoff + 1;
    let mut x = DMatrix::zeros(r, r);
    for n in 1..r {
        x[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
        x[(n, n - 1)] = C64::new((n as f64).sqrt(), 0.0);
    }
    x
}

/// Diagonal of the free Hamiltonian.
fn free_energies(p: &PhysicalParams, config: SystemConfig) -> Vec<f64> {
    (0..config.dim())
        .map(|i| {
            let mut e = p.omega_c * config.digit(i, Factor::Photon) as f64;
            for t in 0..config.trap_count {
                let sz = if config.digit(i, Factor::Ion(t)) == 1 { 1.0 } else { -1.0 };
                e += 0.5 * p.omega0 * sz + p.nu * config.digit(i, Factor::Phonon(t)) as f64;
            }
            e
        })
        .collect()
}

/// Rotating-frame generator as groups of entries sharing one oscillation
/// frequency: `H_I(t)[r, c] = sum over groups of exp(i f t) v`.
struct RotatingGenerator {
    groups: Vec<(f64, Vec<(usize, usize, C64)>)>,
}

impl RotatingGenerator {
    fn new(p: &PhysicalParams, config: SystemConfig, linearized: bool) -> Result<Self> {
        let energies = free_energies(p, config);
        let nb = config.phonon_cutoff;
        let (sin_arg, laser_disp) = if linearized {
            let x = position(nb);
            let id = DMatrix::<C64>::identity(nb + 1, nb + 1);
            (
                &x * C64::new(p.eta_c * p.phi.cos(), 0.0) + &id * C64::new(p.phi.sin(), 0.0),
                id + x * C64::new(0.0, p.eta_l),
            )
        } else {
            (
                phonon_function(nb, |l| C64::new((p.eta_c * l + p.phi).sin(), 0.0)),
                phonon_function(nb, |l| C64::from_polar(1.0, p.eta_l * l)),
            )
        };

        let a_plus_ad = &OperatorMatrix::build(config, OpSpec::A)?
            + &OperatorMatrix::build(config, OpSpec::ADag)?;
        let mut cavity = OperatorMatrix::zeros(config);
        let mut laser = OperatorMatrix::zeros(config);
        for t in 0..config.trap_count {
            let sx = OperatorMatrix::build(config, OpSpec::SigmaX(t))?;
            let sp = OperatorMatrix::build(config, OpSpec::SigmaPlus(t))?;
            let s = OperatorMatrix::from_local(config, Factor::Phonon(t), &sin_arg)?;
            let d = OperatorMatrix::from_local(config, Factor::Phonon(t), &laser_disp)?;
            cavity = &cavity + &(&(&sx * &a_plus_ad) * &s).scale_re(p.g);
            laser = &laser + &(&sp * &d).scale_re(p.g_cap);
        }

        let mut groups: BTreeMap<u64, (f64, Vec<(usize, usize, C64)>)> = BTreeMap::new();
        let mut push = |f: f64, r: usize, c: usize, v: C64| {
            groups.entry(f.to_bits()).or_insert_with(|| (f, Vec::new())).1.push((r, c, v));
        };
        for (r, c, v) in cavity.nonzeros() {
            push(energies[r] - energies[c], r, c, v);
        }
        for (r, c, v) in laser.nonzeros() {
            push(energies[r] - energies[c] - p.omega_l, r, c, v);
            push(energies[c] - energies[r] + p.omega_l, c, r, v.conj());
        }
        Ok(Self { groups: groups.into_values().collect() })
    }

    /// `out = -i H_I(t) y`.
    fn rhs(&self, t: f64, y: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|o| *o = C64::default());
        for (f, entries) in &self.groups {
            let (s, c) = (f * t).sin_cos();
            // -i exp(i f t)
            let ph = C64::new(s, -c);
            for &(r, col, v) in entries {
                out[r] += ph * v * y[col];
            }
        }
    }
}

/// Integrates the full time-dependent Hamiltonian for `duration` seconds
/// (fixed-step RK4) and returns the lab-frame state.
pub fn full_hamiltonian_evolve(
    state: &PureState,
    params: &PhysicalParams,
    duration: f64,
    options: LabFrameOptions,
) -> Result<PureState> {
    params.validate()?;
    let config = state.config();
    if !(options.dt > 0.0 && options.dt.is_finite()) {
        return Err(Error::Domain { field: "dt", reason: format!("{} must be > 0", options.dt) });
    }
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(Error::Domain { field: "duration", reason: format!("{duration} must be >= 0") });
    }
    if duration == 0.0 {
        return Ok(state.clone());
    }
    let gen = RotatingGenerator::new(params, config, options.lamb_dicke_linearized)?;
    let steps = (duration / options.dt).ceil().max(1.0) as usize;
    let h = duration / steps as f64;

    let n = config.dim();
    let mut y: Vec<C64> = state.amplitudes().iter().copied().collect();
    let norm0 = state.norm();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![C64::default(); n], vec![C64::default(); n], vec![C64::default(); n], vec![C64::default(); n]);
    let mut tmp = vec![C64::default(); n];
    for step in 0..steps {
        let t = step as f64 * h;
        gen.rhs(t, &y, &mut k1);
        for i in 0..n {
            tmp[i] = y[i] + k1[i] * (0.5 * h);
        }
        gen.rhs(t + 0.5 * h, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + k2[i] * (0.5 * h);
        }
        gen.rhs(t + 0.5 * h, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + k3[i] * h;
        }
        gen.rhs(t + h, &tmp, &mut k4);
        for i in 0..n {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
    }

    let norm = y.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let drift = (norm - norm0).abs();
    if !(drift <= NORM_DRIFT_BOUND) {
        return Err(Error::StepSize { drift, bound: NORM_DRIFT_BOUND });
    }
    let energies = free_energies(params, config);
    let lab = y
        .iter()
        .zip(&energies)
        .map(|(a, e)| a * C64::from_polar(1.0, -e * duration));
    PureState::from_amplitudes(config, nalgebra::DVector::from_iterator(n, lab))
}

/// Detuning from the case's resonance condition (rad/s).
fn resonance_mismatch(case: Case, p: &PhysicalParams) -> f64 {
    match case {
        Case::Carrier => p.omega_l - p.omega0,
        Case::RedSideband => p.omega_l - (p.omega0 - p.nu),
        Case::BlueSideband => p.omega_l - (p.omega0 + p.nu),
        Case::CavityRed => p.omega_c - (p.omega0 - p.nu),
        Case::CavityInverted => p.omega_c - (p.nu - p.omega0),
        Case::CavityBlue => p.omega_c - (p.omega0 + p.nu),
        Case::CavityCarrier => p.omega_c - p.omega0,
    }
}

/// Sets the laser (cases 1-3) or cavity (cases 4-7) frequency on resonance.
pub fn resonant_params(case: Case, base: &PhysicalParams) -> PhysicalParams {
    let mut p = *base;
    let detuning = resonance_mismatch(case, base);
    if case.uses_cavity() {
        p.omega_c -= detuning;
    } else {
        p.omega_l -= detuning;
    }
    p
}

/// Probe state for RWA checks: equal-weight superposition of every trap-0
/// level with at most one quantum per mode, with distinct phases so that
/// relative-phase errors show up.
fn rwa_probe(config: SystemConfig) -> PureState {
    let mut k = 0;
    PureState::from_fn(config, |l| {
        let low = l.internal.iter().skip(1).all(|s| s.digit() == 0)
            && l.phonon.iter().skip(1).all(|&n| n == 0)
            && l.phonon[0] <= 1
            && l.photon <= 1;
        if low {
            k += 1;
            C64::from_polar(1.0, 0.7 * k as f64)
        } else {
            C64::default()
        }
    })
    .normalized()
}

/// Largest amplitude difference between the full-Hamiltonian evolution
/// (rotated back into the interaction picture) and the resonance-case closed
/// form for angle `theta`, on trap 0.
///
/// The pulse lasts `theta / rate`. When the case's rate vanishes, `theta` is
/// read as a duration in units of `1/nu`.
pub fn rwa_deviation(
    case: Case,
    params: &PhysicalParams,
    config: SystemConfig,
    theta: f64,
    options: LabFrameOptions,
) -> Result<f64> {
    let scale = params.omega0.abs().max(params.nu.abs()).max(1.0);
    let mismatch = resonance_mismatch(case, params);
    if mismatch.abs() > 1e-12 * scale {
        return Err(Error::Precondition(format!(
            "parameters are detuned by {mismatch:.3e} rad/s from the {case} resonance"
        )));
    }
    if config.phonon_cutoff < 2 || config.photon_cutoff < 2 {
        return Err(Error::Precondition("rwa probe needs cutoffs >= 2".into()));
    }
    let rate = coupling_rate(case, params);
    let duration = if rate > 0.0 { theta / rate } else { theta / params.nu.max(1.0) };
    let probe = rwa_probe(config);
    let lab = full_hamiltonian_evolve(&probe, params, duration, options)?;
    let energies = free_energies(params, config);
    let rotating = PureState::from_amplitudes(
        config,
        nalgebra::DVector::from_iterator(
            config.dim(),
            lab.amplitudes().iter().zip(&energies).map(|(a, e)| a * C64::from_polar(1.0, e * duration)),
        ),
    )?;
    let ideal = if rate > 0.0 {
        analytic_propagate(&probe, &Pulse::new(case, 0, theta))?
    } else {
        probe
    };
    rotating.max_abs_diff(&ideal)
}
