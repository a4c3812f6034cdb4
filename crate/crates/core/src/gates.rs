//! Gates on the bosonic qubits (cavity photon `a`, trap phonon `b`, each
//! restricted to Fock states 0 and 1), lowered to fixed pulse sequences.
//!
//! The sequences are executed literally: whatever phases they leave behind
//! (notably the `i` on the `|1>_b` outputs of CNOT_BA) are part of the gate.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{max_entry, BasisLabel, Factor, Internal, PureState, SystemConfig};
use crate::params::PhysicalParams;
use crate::propagators::{analytic_propagate, coupling_rate, expm_unitary, Case, Pulse};

/// Population of the excited ion tolerated when a named gate starts.
const GROUND_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    /// CNOT, photon control, phonon target.
    CnotAb,
    /// CNOT, phonon control, photon target.
    CnotBa,
    /// Hadamard on the photon qubit.
    HA,
    /// Hadamard on the phonon qubit.
    HB,
    /// Photon-phonon exchange, `CNOT_AB CNOT_BA CNOT_AB`.
    SwapAb,
    Primitive { case: Case, theta: f64 },
}

impl GateKind {
    pub const NAMED: [GateKind; 5] =
        [GateKind::CnotAb, GateKind::CnotBa, GateKind::HA, GateKind::HB, GateKind::SwapAb];

    pub fn name(&self) -> String {
        match self {
            GateKind::CnotAb => "CNOT_AB".into(),
            GateKind::CnotBa => "CNOT_BA".into(),
            GateKind::HA => "H_A".into(),
            GateKind::HB => "H_B".into(),
            GateKind::SwapAb => "SWAP_AB".into(),
            GateKind::Primitive { case, theta } => format!("{case}({theta})"),
        }
    }

    pub fn is_named(&self) -> bool {
        !matches!(self, GateKind::Primitive { .. })
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        match norm.as_str() {
            "cnot_ab" => Ok(GateKind::CnotAb),
            "cnot_ba" => Ok(GateKind::CnotBa),
            "h_a" | "ha" => Ok(GateKind::HA),
            "h_b" | "hb" => Ok(GateKind::HB),
            "swap_ab" | "swap" => Ok(GateKind::SwapAb),
            _ => Err(Error::Parse(format!(
                "unknown gate {s:?} (expected cnot_ab, cnot_ba, h_a, h_b or swap_ab)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateSpec {
    pub kind: GateKind,
    pub trap: usize,
}

impl GateSpec {
    pub fn new(kind: GateKind, trap: usize) -> Self {
        Self { kind, trap }
    }
}

/// Ordered pulse sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseProgram {
    pub label: String,
    pub pulses: Vec<Pulse>,
}

impl PulseProgram {
    pub fn new(label: impl Into<String>, pulses: Vec<Pulse>) -> Self {
        Self { label: label.into(), pulses }
    }

    /// Named gates assume the addressed ions start in `|g>`.
    pub fn is_named_gate(&self) -> bool {
        GateKind::NAMED.iter().any(|g| g.name() == self.label)
    }

    pub fn then(mut self, other: &PulseProgram) -> Self {
        self.pulses.extend_from_slice(&other.pulses);
        self
    }
}

pub fn compile_gate(spec: GateSpec) -> PulseProgram {
    let t = spec.trap;
    let p = |case, theta| Pulse::new(case, t, theta);
    let pulses = match spec.kind {
        GateKind::CnotAb => vec![
            p(Case::CavityRed, FRAC_PI_2),
            p(Case::CavityCarrier, 1.5 * PI),
            p(Case::CavityRed, FRAC_PI_2),
        ],
        GateKind::CnotBa => vec![
            p(Case::CavityRed, 1.5 * PI),
            p(Case::RedSideband, 1.5 * PI),
            p(Case::CavityRed, FRAC_PI_2),
        ],
        GateKind::HA => vec![
            p(Case::CavityCarrier, FRAC_PI_2),
            p(Case::Carrier, 1.75 * PI),
            p(Case::CavityCarrier, FRAC_PI_2),
        ],
        GateKind::HB => vec![
            p(Case::RedSideband, FRAC_PI_2),
            p(Case::Carrier, 1.75 * PI),
            p(Case::RedSideband, FRAC_PI_2),
        ],
        GateKind::SwapAb => {
            let ab = compile_gate(GateSpec::new(GateKind::CnotAb, t));
            let ba = compile_gate(GateSpec::new(GateKind::CnotBa, t));
            return PulseProgram::new(spec.kind.name(), vec![])
                .then(&ab)
                .then(&ba)
                .then(&ab);
        }
        GateKind::Primitive { case, theta } => vec![p(case, theta)],
    };
    PulseProgram::new(spec.kind.name(), pulses)
}

fn check_ground(state: &PureState, trap: usize) -> Result<()> {
    let cfg = state.config();
    cfg.check_trap(trap)?;
    let excited = state.population_where(|i| cfg.digit(i, Factor::Ion(trap)) == 1);
    if excited > GROUND_TOLERANCE {
        return Err(Error::Precondition(format!(
            "ion {trap} must start in |g> (excited population {excited:.3e})"
        )));
    }
    Ok(())
}

/// Applies the program's pulses left to right.
pub fn run_program(state: &PureState, program: &PulseProgram) -> Result<PureState> {
    if program.is_named_gate() {
        let mut traps: Vec<usize> = program.pulses.iter().map(|p| p.trap).collect();
        traps.dedup();
        for t in traps {
            check_ground(state, t)?;
        }
    }
    program
        .pulses
        .iter()
        .try_fold(state.clone(), |psi, pulse| analytic_propagate(&psi, pulse))
}

/// Same as [`run_program`] but through the matrix-exponential route.
pub fn run_program_expm(state: &PureState, program: &PulseProgram) -> Result<PureState> {
    program.pulses.iter().try_fold(state.clone(), |psi, pulse| {
        pulse.validate(psi.config())?;
        expm_unitary(pulse.case, pulse.theta, psi.config(), pulse.trap)?.apply(&psi)
    })
}

/// Computational basis state `|g>|a>_a|b>_b` on `trap`, everything else in
/// its ground state.
pub fn qubit_ket(config: SystemConfig, trap: usize, a: usize, b: usize) -> Result<PureState> {
    config.check_trap(trap)?;
    let mut label = BasisLabel {
        internal: vec![Internal::G; config.trap_count],
        phonon: vec![0; config.trap_count],
        photon: a,
    };
    label.phonon[trap] = b;
    PureState::basis(config, &label)
}

#[derive(Clone, Debug)]
pub struct TruthRow {
    /// `(photon, phonon)` occupations of the input.
    pub input: (usize, usize),
    pub output: PureState,
}

#[derive(Clone, Debug)]
pub struct TruthTable {
    pub gate: GateKind,
    pub rows: Vec<TruthRow>,
    /// Action on the `|ab>` qubit subspace, basis order `00, 01, 10, 11`.
    pub qubit_matrix: DMatrix<C64>,
    /// Output population outside the qubit subspace, per row.
    pub leakage: Vec<f64>,
}

impl TruthTable {
    /// `max |U^dag U - I|` on the qubit subspace.
    pub fn unitarity_error(&self) -> f64 {
        max_entry(&(self.qubit_matrix.adjoint() * &self.qubit_matrix - DMatrix::identity(4, 4)))
    }
}

pub const QUBIT_INPUTS: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

/// Target action of a named gate on the `|ab>` qubits (basis order `00, 01,
/// 10, 11`, columns are inputs), phases included. `None` for gates checked
/// only against the matrix-exponential replay.
pub fn reference_qubit_matrix(kind: GateKind) -> Option<DMatrix<C64>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (o, z, i) = (C64::new(1.0, 0.0), C64::default(), C64::new(0.0, 1.0));
    let r = |x: f64| C64::new(x, 0.0);
    let rows: [[C64; 4]; 4] = match kind {
        GateKind::CnotAb => [[o, z, z, z], [z, o, z, z], [z, z, z, o], [z, z, o, z]],
        GateKind::CnotBa => [[o, z, z, z], [z, z, z, i], [z, z, o, z], [z, i, z, z]],
        GateKind::HA => [
            [r(h), z, r(h), z],
            [z, r(h), z, r(h)],
            [r(h), z, r(-h), z],
            [z, r(h), z, r(-h)],
        ],
        GateKind::HB => [
            [r(h), i * h, z, z],
            [-i * h, r(-h), z, z],
            [z, z, r(h), i * h],
            [z, z, -i * h, r(-h)],
        ],
        GateKind::SwapAb | GateKind::Primitive { .. } => return None,
    };
    Some(DMatrix::from_fn(4, 4, |row, col| rows[row][col]))
}

/// Runs the gate on the four computational inputs `|g>|ab>`.
pub fn truth_table(spec: GateSpec, config: SystemConfig) -> Result<TruthTable> {
    table_with(spec, config, run_program)
}

/// Truth table through the matrix-exponential route.
pub fn truth_table_expm(spec: GateSpec, config: SystemConfig) -> Result<TruthTable> {
    table_with(spec, config, run_program_expm)
}

fn table_with(
    spec: GateSpec,
    config: SystemConfig,
    run: fn(&PureState, &PulseProgram) -> Result<PureState>,
) -> Result<TruthTable> {
    let program = compile_gate(spec);
    let kets: Vec<PureState> = QUBIT_INPUTS
        .iter()
        .map(|&(a, b)| qubit_ket(config, spec.trap, a, b))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(4);
    let mut qubit_matrix = DMatrix::zeros(4, 4);
    let mut leakage = Vec::with_capacity(4);
    for (col, (&input, ket)) in QUBIT_INPUTS.iter().zip(&kets).enumerate() {
        let output = run(ket, &program)?;
        let mut inside = 0.0;
        for (row, out_ket) in kets.iter().enumerate() {
            let amp = crate::hilbert::inner(out_ket, &output)?;
            qubit_matrix[(row, col)] = amp;
            inside += amp.norm_sqr();
        }
        leakage.push((output.norm().powi(2) - inside).max(0.0));
        rows.push(TruthRow { input, output });
    }
    Ok(TruthTable { gate: spec.kind, rows, qubit_matrix, leakage })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimingReport {
    pub per_pulse: Vec<(Pulse, f64)>,
    /// Idle time between consecutive pulses (frequency retuning).
    pub delays: f64,
    pub total: f64,
}

/// Durations `theta / rate` of each pulse, with no retuning delay.
pub fn program_duration(program: &PulseProgram, params: &PhysicalParams) -> Result<TimingReport> {
    program_duration_with_delay(program, params, 0.0)
}

pub fn program_duration_with_delay(
    program: &PulseProgram,
    params: &PhysicalParams,
    delay: f64,
) -> Result<TimingReport> {
    if !(delay >= 0.0 && delay.is_finite()) {
        return Err(Error::Domain { field: "delay", reason: format!("{delay} must be >= 0") });
    }
    let mut per_pulse = Vec::with_capacity(program.pulses.len());
    for (index, pulse) in program.pulses.iter().enumerate() {
        let rate = coupling_rate(pulse.case, params);
        if !(rate > 0.0) {
            return Err(Error::ZeroCoupling { index, case: pulse.case.to_string() });
        }
        per_pulse.push((*pulse, pulse.theta / rate));
    }
    let delays = delay * program.pulses.len().saturating_sub(1) as f64;
    let total = per_pulse.iter().map(|(_, s)| s).sum::<f64>() + delays;
    Ok(TimingReport { per_pulse, delays, total })
}

/// Which coupling a timing sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Ion-cavity coupling `g`.
    CavityCoupling,
    /// Ion-laser coupling `G`.
    LaserCoupling,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    /// Swept coupling, rad/s.
    pub coupling: f64,
    pub gate: GateKind,
    pub seconds: f64,
}

/// Gate durations over a grid of coupling values (rad/s). Rows are ordered
/// by grid point, then by gate, in input order.
pub fn timing_sweep(
    gates: &[GateKind],
    params: &PhysicalParams,
    axis: SweepAxis,
    values: &[f64],
) -> Result<Vec<SweepRow>> {
    if let Some(v) = values.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::Domain { field: "coupling", reason: format!("{v} must be > 0") });
    }
    let rows: Vec<Vec<SweepRow>> = values
        .par_iter()
        .map(|&value| {
            let mut p = *params;
            match axis {
                SweepAxis::CavityCoupling => p.g = value,
                SweepAxis::LaserCoupling => p.g_cap = value,
            }
            gates
                .iter()
                .map(|&gate| {
                    let report = program_duration(&compile_gate(GateSpec::new(gate, 0)), &p)?;
                    Ok(SweepRow { coupling: value, gate, seconds: report.total })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn cnot_ab_sequence() {
        let prog = compile_gate(GateSpec::new(GateKind::CnotAb, 0));
        let cases: Vec<u8> = prog.pulses.iter().map(|p| p.case.id()).collect();
        let thetas: Vec<f64> = prog.pulses.iter().map(|p| p.theta).collect();
        assert_eq!(cases, [4, 7, 4]);
        assert_eq!(thetas, [FRAC_PI_2, 1.5 * PI, FRAC_PI_2]);
    }

    #[test]
    fn other_sequences() {
        let ids = |k| {
            compile_gate(GateSpec::new(k, 0)).pulses.iter().map(|p| p.case.id()).collect::<Vec<_>>()
        };
        assert_eq!(ids(GateKind::CnotBa), [4, 2, 4]);
        assert_eq!(ids(GateKind::HA), [7, 1, 7]);
        assert_eq!(ids(GateKind::HB), [2, 1, 2]);
        assert_eq!(ids(GateKind::SwapAb), [4, 7, 4, 4, 2, 4, 4, 7, 4]);
    }

    #[test]
    fn primitive_zero_angle_is_identity() {
        let cfg = SystemConfig::single(2);
        let prog = compile_gate(GateSpec::new(
            GateKind::Primitive { case: Case::RedSideband, theta: 0.0 },
            0,
        ));
        assert_eq!(prog.pulses.len(), 1);
        assert!(!prog.is_named_gate());
        let psi = qubit_ket(cfg, 0, 1, 1).unwrap();
        assert_eq!(run_program(&psi, &prog).unwrap(), psi);
    }

    #[test]
    fn cnot_ab_flips_phonon_when_photon_present() {
        let cfg = SystemConfig::single(3);
        let prog = compile_gate(GateSpec::new(GateKind::CnotAb, 0));
        let out = run_program(&qubit_ket(cfg, 0, 1, 0).unwrap(), &prog).unwrap();
        assert!(out.max_abs_diff(&qubit_ket(cfg, 0, 1, 1).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn cnot_ba_keeps_phase_i() {
        let cfg = SystemConfig::single(3);
        let prog = compile_gate(GateSpec::new(GateKind::CnotBa, 0));
        let out = run_program(&qubit_ket(cfg, 0, 0, 1).unwrap(), &prog).unwrap();
        let want = qubit_ket(cfg, 0, 1, 1).unwrap().scaled(c(0.0, 1.0));
        assert!(out.max_abs_diff(&want).unwrap() < 1e-12);
    }

    #[test]
    fn hadamard_on_photon_vacuum() {
        let cfg = SystemConfig::single(3);
        let prog = compile_gate(GateSpec::new(GateKind::HA, 0));
        let out = run_program(&qubit_ket(cfg, 0, 0, 0).unwrap(), &prog).unwrap();
        let want = qubit_ket(cfg, 0, 0, 0)
            .unwrap()
            .plus(c(1.0, 0.0), &qubit_ket(cfg, 0, 1, 0).unwrap())
            .unwrap()
            .scaled(c(FRAC_1_SQRT_2, 0.0));
        assert!(out.max_abs_diff(&want).unwrap() < 1e-12);
    }

    #[test]
    fn named_gate_requires_ground_ion() {
        let cfg = SystemConfig::single(3);
        let excited = PureState::basis(cfg, &BasisLabel::single(Internal::E, 0, 0)).unwrap();
        let prog = compile_gate(GateSpec::new(GateKind::CnotAb, 0));
        assert!(matches!(run_program(&excited, &prog), Err(Error::Precondition(_))));
        let raw = PulseProgram::new("custom", prog.pulses.clone());
        assert!(run_program(&excited, &raw).is_ok());
    }

    #[test]
    fn cnot_ab_squared_is_identity() {
        let t = truth_table(GateSpec::new(GateKind::CnotAb, 0), SystemConfig::single(3)).unwrap();
        let sq = &t.qubit_matrix * &t.qubit_matrix;
        assert!(max_entry(&(sq - DMatrix::identity(4, 4))) < 1e-10);
    }

    #[test]
    fn cnot_ba_squared_keeps_phases() {
        // composing the printed table: |01> -> i|11> -> i*i|01>, |11> -> -|11>
        let t = truth_table(GateSpec::new(GateKind::CnotBa, 0), SystemConfig::single(3)).unwrap();
        let sq = &t.qubit_matrix * &t.qubit_matrix;
        let want = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(-1.0, 0.0),
            c(1.0, 0.0),
            c(-1.0, 0.0),
        ]));
        assert!(max_entry(&(sq - want)) < 1e-10);
    }

    #[test]
    fn reference_matrices_match_sequences() {
        let cfg = SystemConfig::single(2);
        for kind in GateKind::NAMED {
            let t = truth_table(GateSpec::new(kind, 0), cfg).unwrap();
            match reference_qubit_matrix(kind) {
                Some(m) => assert!(max_entry(&(&t.qubit_matrix - m)) < 1e-10, "{kind}"),
                None => assert_eq!(kind, GateKind::SwapAb),
            }
        }
    }

    #[test]
    fn empty_program_takes_no_time() {
        let r = program_duration(&PulseProgram::new("empty", vec![]), &PhysicalParams::default())
            .unwrap();
        assert_eq!(r.total, 0.0);
        assert!(r.per_pulse.is_empty());
    }

    #[test]
    fn node_position_has_no_cavity_carrier() {
        let p = PhysicalParams { phi: 0.0, ..Default::default() };
        let err = program_duration(&compile_gate(GateSpec::new(GateKind::CnotAb, 0)), &p)
            .unwrap_err();
        assert_eq!(err, Error::ZeroCoupling { index: 1, case: "R7".into() });
    }

    #[test]
    fn retuning_delay_added_between_pulses() {
        let p = PhysicalParams::default();
        let prog = compile_gate(GateSpec::new(GateKind::HB, 0));
        let base = program_duration(&prog, &p).unwrap();
        let delayed = program_duration_with_delay(&prog, &p, 1e-6).unwrap();
        assert!((delayed.total - base.total - 2e-6).abs() < 1e-18);
    }

    #[test]
    fn doubling_g_halves_cnot_ab() {
        let p = PhysicalParams::default();
        let rows = timing_sweep(&[GateKind::CnotAb], &p, SweepAxis::CavityCoupling, &[p.g, 2.0 * p.g])
            .unwrap();
        assert!((rows[1].seconds - 0.5 * rows[0].seconds).abs() <= 1e-15 * rows[0].seconds);
    }

    #[test]
    fn sweep_rejects_nonpositive_values() {
        let p = PhysicalParams::default();
        assert!(timing_sweep(&[GateKind::HA], &p, SweepAxis::LaserCoupling, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn gate_names_parse() {
        for g in GateKind::NAMED {
            assert_eq!(g.name().parse::<GateKind>().unwrap(), g);
        }
        assert!("toffoli".parse::<GateKind>().is_err());
    }
}
