//! Two-trap protocols: state transfer, internal-state swap, GHZ and Bell
//! state preparation, internal-state entanglement and the motional CNOT
//! built from alternating swaps.
//!
//! Factors are ordered (photon, phonon 1, ion 1, phonon 2, ion 2); trap 1 is
//! index 0 and trap 2 is index 1.

use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{compile_gate, GateKind, GateSpec};
use crate::hilbert::{BasisLabel, Factor, Internal, OperatorMatrix, PureState, SystemConfig};
use crate::propagators::{analytic_propagate, expm_unitary, Case, Pulse};

const NORM_TOLERANCE: f64 = 1e-12;

/// Normalized qubit amplitudes `C|0> + D|1>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudePair {
    pub c: C64,
    pub d: C64,
}

impl AmplitudePair {
    pub fn new(c: C64, d: C64) -> Result<Self> {
        let norm = c.norm_sqr() + d.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Domain {
                field: "amplitudes",
                reason: format!("|C|^2 + |D|^2 = {norm}, expected 1"),
            });
        }
        Ok(Self { c, d })
    }

    pub fn real(c: f64, d: f64) -> Result<Self> {
        Self::new(C64::new(c, 0.0), C64::new(d, 0.0))
    }

    fn as_slice(&self) -> [C64; 2] {
        [self.c, self.d]
    }
}

/// One step of a protocol: a physical pulse or a phase `exp(-i phi n_b)` on
/// a trap's phonon mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Step {
    Pulse(Pulse),
    PhononPhase { trap: usize, phi: f64 },
}

/// How pulses are propagated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    #[default]
    Analytic,
    Expm,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolOptions {
    pub config: SystemConfig,
    pub route: Route,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        Self { config: SystemConfig::two_traps(5), route: Route::Analytic }
    }
}

impl ProtocolOptions {
    pub fn new(cutoff: usize, route: Route) -> Self {
        Self { config: SystemConfig::two_traps(cutoff), route }
    }

    fn checked_config(&self) -> Result<SystemConfig> {
        self.config.validate()?;
        if self.config.trap_count != 2 {
            return Err(Error::Precondition("protocols need two traps".into()));
        }
        Ok(self.config)
    }
}

/// Deviation of an intermediate state from its closed form.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub label: String,
    pub state: PureState,
    pub expected: PureState,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolResult {
    pub label: String,
    pub steps: Vec<Step>,
    pub initial: PureState,
    pub final_state: PureState,
    pub expected: PureState,
    /// Largest amplitude difference between `final_state` and `expected`.
    pub deviation: f64,
    pub checkpoints: Vec<Checkpoint>,
}

impl ProtocolResult {
    /// Worst deviation over the final state and all checkpoints.
    pub fn worst_deviation(&self) -> f64 {
        self.checkpoints.iter().map(|c| c.deviation).fold(self.deviation, f64::max)
    }
}

/// Applies `exp(-i phi n_b)` to the phonon of `trap`.
pub fn phonon_phase(state: &PureState, trap: usize, phi: f64) -> Result<PureState> {
    let cfg = state.config();
    cfg.check_trap(trap)?;
    let mut out = state.clone();
    for (i, a) in out.amplitudes_mut().iter_mut().enumerate() {
        let n = cfg.digit(i, Factor::Phonon(trap)) as f64;
        *a *= C64::from_polar(1.0, -phi * n);
    }
    Ok(out)
}

/// Executes steps in order, caching expm unitaries on the oracle route.
#[derive(Default)]
pub struct Runner {
    route: Route,
    cache: HashMap<(u8, usize, u64), OperatorMatrix>,
}

impl Runner {
    pub fn new(route: Route) -> Self {
        Self { route, cache: HashMap::new() }
    }

    pub fn step(&mut self, state: &PureState, step: &Step) -> Result<PureState> {
        match *step {
            Step::PhononPhase { trap, phi } => phonon_phase(state, trap, phi),
            Step::Pulse(p) => match self.route {
                Route::Analytic => analytic_propagate(state, &p),
                Route::Expm => {
                    let cfg = state.config();
                    p.validate(cfg)?;
                    let key = (p.case.id(), p.trap, p.theta.to_bits());
                    if !self.cache.contains_key(&key) {
                        self.cache.insert(key, expm_unitary(p.case, p.theta, cfg, p.trap)?);
                    }
                    self.cache[&key].apply(state)
                }
            },
        }
    }

    pub fn run(&mut self, state: &PureState, steps: &[Step]) -> Result<PureState> {
        steps.iter().try_fold(state.clone(), |psi, s| self.step(&psi, s))
    }
}

/// Runs `steps` on `state` along `route`.
pub fn run_steps(state: &PureState, steps: &[Step], route: Route) -> Result<PureState> {
    Runner::new(route).run(state, steps)
}

fn pulse(case: Case, trap: usize, theta: f64) -> Step {
    Step::Pulse(Pulse::new(case, trap, theta))
}

/// Pulses of a named gate on `trap`, executed literally.
pub fn gate_steps(kind: GateKind, trap: usize) -> Vec<Step> {
    compile_gate(GateSpec::new(kind, trap)).pulses.into_iter().map(Step::Pulse).collect()
}

/// CNOT_BA followed by the phonon phase that removes its `i` on `|1>_b`,
/// giving the textbook CNOT with control `b` and target `a`.
pub fn cnot_ba_ideal(trap: usize) -> Vec<Step> {
    let mut s = gate_steps(GateKind::CnotBa, trap);
    s.push(Step::PhononPhase { trap, phi: FRAC_PI_2 });
    s
}

/// `S_ab` built from [`cnot_ba_ideal`]: exchanges the photon and phonon
/// qubits with no residual phase.
pub fn swap_ideal(trap: usize) -> Vec<Step> {
    let ab = gate_steps(GateKind::CnotAb, trap);
    let mut s = ab.clone();
    s.extend(cnot_ba_ideal(trap));
    s.extend(ab);
    s
}

/// Phonon Hadamard `|0> -> (|0> - |1>)/sqrt 2`, `|1> -> (|0> + |1>)/sqrt 2`,
/// obtained by dressing H_B with phonon phases.
pub fn bell_hadamard(trap: usize) -> Vec<Step> {
    let mut s = vec![Step::PhononPhase { trap, phi: FRAC_PI_2 }];
    s.extend(gate_steps(GateKind::HB, trap));
    s.push(Step::PhononPhase { trap, phi: FRAC_PI_2 });
    s
}

/// Two-trap product state. Ion entries are `[g, e]`, Fock entries start at 0.
pub fn two_trap_product(
    config: SystemConfig,
    ion1: [C64; 2],
    b1: &[C64],
    ion2: [C64; 2],
    b2: &[C64],
    a: &[C64],
) -> Result<PureState> {
    PureState::product(config, &[&ion1, &ion2], &[b1, b2], a)
}

/// Sum of `coef |s1, n1; s2, n2; a>` terms.
fn ket(config: SystemConfig, terms: &[(C64, (Internal, usize), (Internal, usize), usize)]) -> Result<PureState> {
    let mut psi = PureState::zeros(config);
    for &(coef, t1, t2, a) in terms {
        let idx = config.basis_index(&BasisLabel::pair([t1, t2], a))?;
        psi.amplitudes_mut()[idx] += coef;
    }
    Ok(psi)
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn vac() -> [C64; 1] {
    [one()]
}

fn ground() -> [C64; 2] {
    [one(), C64::default()]
}

struct Builder {
    label: String,
    runner: Runner,
    steps: Vec<Step>,
    initial: PureState,
    state: PureState,
    checkpoints: Vec<Checkpoint>,
}

impl Builder {
    fn new(label: &str, route: Route, initial: PureState) -> Self {
        Self {
            label: label.into(),
            runner: Runner::new(route),
            steps: Vec::new(),
            state: initial.clone(),
            initial,
            checkpoints: Vec::new(),
        }
    }

    fn apply(&mut self, steps: impl IntoIterator<Item = Step>) -> Result<&mut Self> {
        for s in steps {
            self.state = self.runner.step(&self.state, &s)?;
            self.steps.push(s);
        }
        Ok(self)
    }

    fn check(&mut self, label: &str, expected: PureState) -> Result<&mut Self> {
        let deviation = self.state.max_abs_diff(&expected)?;
        self.checkpoints.push(Checkpoint {
            label: label.into(),
            state: self.state.clone(),
            expected,
            deviation,
        });
        Ok(self)
    }

    fn finish(self, expected: PureState) -> Result<ProtocolResult> {
        let deviation = self.state.max_abs_diff(&expected)?;
        Ok(ProtocolResult {
            label: self.label,
            steps: self.steps,
            initial: self.initial,
            final_state: self.state,
            expected,
            deviation,
            checkpoints: self.checkpoints,
        })
    }
}

/// Steps moving ion `from`'s internal state to ion `to` through the cavity.
pub fn transfer_steps(from: usize, to: usize) -> Vec<Step> {
    vec![pulse(Case::CavityCarrier, from, FRAC_PI_2), pulse(Case::CavityCarrier, to, 1.5 * PI)]
}

/// Moves `(C|g> + D|e>)` from ion 1 to ion 2.
pub fn state_transfer(pair: AmplitudePair, opts: &ProtocolOptions) -> Result<ProtocolResult> {
    let cfg = opts.checked_config()?;
    let AmplitudePair { c, d } = pair;
    let initial = two_trap_product(cfg, pair.as_slice(), &vac(), ground(), &vac(), &vac())?;
    let mut b = Builder::new("state_transfer", opts.route, initial);
    b.apply(transfer_steps(0, 1)[..1].to_vec())?;
    let mid = two_trap_product(cfg, ground(), &vac(), ground(), &vac(), &[c, -C64::i() * d])?;
    b.check("after R7 on ion 1", mid)?;
    b.apply(transfer_steps(0, 1)[1..].to_vec())?;
    let expected = two_trap_product(cfg, ground(), &vac(), pair.as_slice(), &vac(), &vac())?;
    b.finish(expected)
}

/// Exchanges the internal states of the two ions.
pub fn internal_swap(first: AmplitudePair, second: AmplitudePair, opts: &ProtocolOptions) -> Result<ProtocolResult> {
    let cfg = opts.checked_config()?;
    let initial = two_trap_product(cfg, first.as_slice(), &vac(), second.as_slice(), &vac(), &vac())?;
    let mut b = Builder::new("internal_swap", opts.route, initial);
    b.apply([pulse(Case::RedSideband, 0, FRAC_PI_2), pulse(Case::RedSideband, 1, FRAC_PI_2)])?;
    let mid = two_trap_product(
        cfg,
        ground(),
        &[first.c, -first.d],
        ground(),
        &[second.c, -second.d],
        &vac(),
    )?;
    b.check("after R2 on both ions", mid)?;
    b.apply(swap_ideal(0))?;
    b.apply(swap_ideal(1))?;
    b.apply(swap_ideal(0))?;
    let swapped = two_trap_product(
        cfg,
        ground(),
        &[second.c, -second.d],
        ground(),
        &[first.c, -first.d],
        &vac(),
    )?;
    b.check("after the three swaps", swapped)?;
    b.apply([pulse(Case::RedSideband, 0, 1.5 * PI), pulse(Case::RedSideband, 1, 1.5 * PI)])?;
    let expected = two_trap_product(cfg, second.as_slice(), &vac(), first.as_slice(), &vac(), &vac())?;
    b.finish(expected)
}

fn ghz_builder(pair: AmplitudePair, opts: &ProtocolOptions, label: &str) -> Result<Builder> {
    let cfg = opts.checked_config()?;
    let initial = two_trap_product(cfg, pair.as_slice(), &vac(), ground(), &vac(), &vac())?;
    let mut b = Builder::new(label, opts.route, initial);
    b.apply([pulse(Case::CavityCarrier, 0, FRAC_PI_2)])?;
    b.apply(gate_steps(GateKind::CnotAb, 0))?;
    b.apply(gate_steps(GateKind::CnotAb, 1))?;
    Ok(b)
}

fn ghz_ket(cfg: SystemConfig, pair: AmplitudePair) -> Result<PureState> {
    let g = Internal::G;
    ket(cfg, &[(pair.c, (g, 0), (g, 0), 0), (-C64::i() * pair.d, (g, 1), (g, 1), 1)])
}

/// `|g>|g>(C|000> - iD|111>)` over `(b1, b2, a)`.
pub fn prepare_ghz(pair: AmplitudePair, opts: &ProtocolOptions) -> Result<ProtocolResult> {
    let cfg = opts.checked_config()?;
    let b = ghz_builder(pair, opts, "prepare_ghz")?;
    b.finish(ghz_ket(cfg, pair)?)
}

/// Disentangles the cavity from the GHZ state, optionally followed by a
/// phonon Hadamard on each trap.
pub fn bell_from_ghz(pair: AmplitudePair, opts: &ProtocolOptions, apply_hadamards: bool) -> Result<ProtocolResult> {
    let cfg = opts.checked_config()?;
    let label = if apply_hadamards { "bell_hadamard" } else { "bell" };
    let mut b = ghz_builder(pair, opts, label)?;
    b.check("GHZ state", ghz_ket(cfg, pair)?)?;
    let g = Internal::G;
    let AmplitudePair { c, d } = pair;
    b.apply(cnot_ba_ideal(0))?;
    let bell = ket(cfg, &[(c, (g, 0), (g, 0), 0), (-C64::i() * d, (g, 1), (g, 1), 0)])?;
    if !apply_hadamards {
        return b.finish(bell);
    }
    b.check("after CNOT_BA on trap 1", bell)?;
    b.apply(bell_hadamard(0))?;
    b.apply(bell_hadamard(1))?;
    let even = (c - C64::i() * d) * 0.5;
    let odd = -(c + C64::i() * d) * 0.5;
    let expected = ket(
        cfg,
        &[
            (even, (g, 0), (g, 0), 0),
            (even, (g, 1), (g, 1), 0),
            (odd, (g, 0), (g, 1), 0),
            (odd, (g, 1), (g, 0), 0),
        ],
    )?;
    b.finish(expected)
}

/// `|e>(C|0> + D|1>)_b1 |g> -> (C|eg> - D|ge>)` with all modes in vacuum.
pub fn entangle_internal(pair: AmplitudePair, opts: &ProtocolOptions) -> Result<ProtocolResult> {
    let cfg = opts.checked_config()?;
    let AmplitudePair { c, d } = pair;
    let excited = [C64::default(), one()];
    let initial = two_trap_product(cfg, excited, &pair.as_slice(), ground(), &vac(), &vac())?;
    let mut b = Builder::new("entangle_internal", opts.route, initial);
    b.apply([pulse(Case::CavityBlue, 0, FRAC_PI_2)])?;
    let (g, e) = (Internal::G, Internal::E);
    let mid = ket(cfg, &[(c, (e, 0), (g, 0), 0), (-C64::i() * d, (g, 0), (g, 0), 1)])?;
    b.check("after R6 on ion 1", mid)?;
    b.apply(gate_steps(GateKind::CnotAb, 1))?;
    let mid = ket(cfg, &[(c, (e, 0), (g, 0), 0), (-C64::i() * d, (g, 0), (g, 1), 1)])?;
    b.check("after CNOT_AB on trap 2", mid)?;
    b.apply([pulse(Case::CavityRed, 1, FRAC_PI_2)])?;
    let expected = ket(cfg, &[(c, (e, 0), (g, 0), 0), (-d, (g, 0), (e, 0), 0)])?;
    b.finish(expected)
}

/// Swap-based CNOT between the two phonon qubits: `S_ab` on trap 1, CNOT_AB
/// on trap 2, `S_ab` on trap 1, all executed literally.
pub fn motional_cnot_steps() -> Vec<Step> {
    let mut s = gate_steps(GateKind::SwapAb, 0);
    s.extend(gate_steps(GateKind::CnotAb, 1));
    s.extend(gate_steps(GateKind::SwapAb, 0));
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotionalCnotRow {
    /// `(x, y)`: phonon occupations of traps 1 and 2 at the input.
    pub input: (usize, usize),
    /// Occupations of the single output basis state.
    pub output: (usize, usize),
    /// Amplitude of that output state.
    pub phase: C64,
    /// Population outside the output basis state.
    pub leakage: f64,
    /// Photon occupation of the output state.
    pub photon: usize,
}

/// Truth table of [`motional_cnot_steps`] on the four motional inputs.
pub fn motional_cnot_via_swaps(opts: &ProtocolOptions) -> Result<Vec<MotionalCnotRow>> {
    let cfg = opts.checked_config()?;
    let steps = motional_cnot_steps();
    let g = Internal::G;
    crate::gates::QUBIT_INPUTS
        .par_iter()
        .map(|&(x, y)| {
            let input = ket(cfg, &[(one(), (g, x), (g, y), 0)])?;
            let out = run_steps(&input, &steps, opts.route)?;
            let (idx, amp) = out
                .amplitudes()
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
                .map(|(i, a)| (i, *a))
                .ok_or_else(|| Error::Precondition("empty state".into()))?;
            let label = cfg.label(idx)?;
            Ok(MotionalCnotRow {
                input: (x, y),
                output: (label.phonon[0], label.phonon[1]),
                phase: amp,
                leakage: (1.0 - amp.norm_sqr()).max(0.0),
                photon: label.photon,
            })
        })
        .collect()
}

/// Occupation pattern of the textbook CNOT with control `b1`.
pub fn motional_cnot_target(x: usize, y: usize) -> (usize, usize) {
    (x, y ^ x)
}

/// `(1/sqrt 2, 1/sqrt 2)`.
pub fn balanced_pair() -> AmplitudePair {
    AmplitudePair { c: C64::new(FRAC_1_SQRT_2, 0.0), d: C64::new(FRAC_1_SQRT_2, 0.0) }
}
