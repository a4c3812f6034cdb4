//! Resonance-case Hamiltonians and their propagators.
//!
//! Each case is a two-level block structure: every `|g, m, n>` couples to at
//! most one `|e, m', n'>` with photon/phonon shifts fixed by the case. Pulses
//! are parameterized by the dimensionless angle `theta = rate * t`, so the
//! generators here are normalized to unit coupling rate.

mod lab;

pub use lab::{full_hamiltonian_evolve, resonant_params, rwa_deviation, LabFrameOptions};

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{Factor, OpSpec, OperatorMatrix, PureState, SystemConfig};
use crate::params::PhysicalParams;

/// Population allowed at the top of the Fock ladder before a pulse that
/// would raise it.
pub const TRUNCATION_GUARD: f64 = 1e-10;

/// The seven interaction-picture resonance cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Case {
    /// `w_L = w0`: `G (s+ + s-)`.
    Carrier = 1,
    /// `w_L = w0 - nu`: `iW (b s+ - b^dag s-)`.
    RedSideband = 2,
    /// `w_L = w0 + nu`: `iW (b^dag s+ - b s-)`.
    BlueSideband = 3,
    /// `w_c = w0 - nu`: `Omega (a^dag b^dag s- + a b s+)`.
    CavityRed = 4,
    /// `w_c = nu - w0`: `Omega (a b^dag s- + a^dag b s+)`.
    CavityInverted = 5,
    /// `w_c = w0 + nu`: `Omega (a b^dag s+ + a^dag b s-)`.
    CavityBlue = 6,
    /// `w_c = w0`: `Omega' (a^dag s- + a s+)`.
    CavityCarrier = 7,
}

impl Case {
    pub const ALL: [Case; 7] = [
        Case::Carrier,
        Case::RedSideband,
        Case::BlueSideband,
        Case::CavityRed,
        Case::CavityInverted,
        Case::CavityBlue,
        Case::CavityCarrier,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    /// Whether the case involves the cavity mode.
    pub fn uses_cavity(self) -> bool {
        self.id() >= 4
    }

    /// Photon and phonon shifts of the `g -> e` transition, and whether the
    /// `<e|H|g>` matrix element carries a factor `i`.
    fn transition(self) -> Transition {
        let (photon, phonon, imaginary) = match self {
            Case::Carrier => (0, 0, false),
            Case::RedSideband => (0, -1, true),
            Case::BlueSideband => (0, 1, true),
            Case::CavityRed => (-1, -1, false),
            Case::CavityInverted => (1, -1, false),
            Case::CavityBlue => (-1, 1, false),
            Case::CavityCarrier => (-1, 0, false),
        };
        Transition { photon, phonon, imaginary }
    }
}

impl TryFrom<u8> for Case {
    type Error = Error;

    fn try_from(id: u8) -> Result<Self> {
        Case::ALL
            .get((id as usize).wrapping_sub(1))
            .copied()
            .ok_or_else(|| Error::Domain { field: "case", reason: format!("{id} is not in 1..=7") })
    }
}

impl From<Case> for u8 {
    fn from(c: Case) -> u8 {
        c.id()
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}", self.id())
    }
}

#[derive(Clone, Copy, Debug)]
struct Transition {
    photon: i64,
    phonon: i64,
    imaginary: bool,
}

/// `sqrt` of the ladder factors for `|g, m, n> -> |e, m + dm, n + dn>`.
fn ladder_factor(m: usize, n: usize, t: Transition) -> f64 {
    let step = |occ: usize, d: i64| -> f64 {
        match d {
            0 => 1.0,
            -1 => occ as f64,
            _ => (occ + 1) as f64,
        }
    };
    (step(m, t.photon) * step(n, t.phonon)).sqrt()
}

/// One pulse: a case applied to one trap for angle `theta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pulse {
    pub case: Case,
    pub trap: usize,
    pub theta: f64,
}

impl Pulse {
    pub fn new(case: Case, trap: usize, theta: f64) -> Self {
        Self { case, trap, theta }
    }

    pub fn validate(&self, config: SystemConfig) -> Result<()> {
        config.check_trap(self.trap)?;
        if !(self.theta.is_finite() && self.theta >= 0.0) {
            return Err(Error::Domain { field: "theta", reason: format!("{} must be >= 0", self.theta) });
        }
        Ok(())
    }
}

impl fmt::Display for Pulse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[trap {}]({:.6})", self.case, self.trap, self.theta)
    }
}

/// Effective couplings after the Lamb-Dicke expansion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedCouplings {
    /// Laser sideband rate `G eta_L`.
    pub w: f64,
    /// Cavity sideband rate `eta_c g cos(phi)`.
    pub omega: f64,
    /// Cavity carrier rate `g sin(phi)`.
    pub omega_prime: f64,
}

impl DerivedCouplings {
    pub fn from_params(p: &PhysicalParams) -> Self {
        Self {
            w: p.g_cap * p.eta_l,
            omega: p.eta_c * p.g * p.phi.cos(),
            omega_prime: p.g * p.phi.sin(),
        }
    }
}

/// Coupling rate (rad/s) multiplying the normalized case generator.
pub fn coupling_rate(case: Case, params: &PhysicalParams) -> f64 {
    let d = DerivedCouplings::from_params(params);
    match case {
        Case::Carrier => params.g_cap,
        Case::RedSideband | Case::BlueSideband => d.w,
        Case::CavityRed | Case::CavityInverted | Case::CavityBlue => d.omega,
        Case::CavityCarrier => d.omega_prime,
    }
}

/// Case Hamiltonian with unit coupling rate.
pub fn case_generator(case: Case, config: SystemConfig, trap: usize) -> Result<OperatorMatrix> {
    config.check_trap(trap)?;
    let op = |s| OperatorMatrix::build(config, s);
    let (sp, sm) = (op(OpSpec::SigmaPlus(trap))?, op(OpSpec::SigmaMinus(trap))?);
    let (a, ad) = (op(OpSpec::A)?, op(OpSpec::ADag)?);
    let (b, bd) = (op(OpSpec::B(trap))?, op(OpSpec::BDag(trap))?);
    let i = C64::new(0.0, 1.0);
    let h = match case {
        Case::Carrier => &sp + &sm,
        Case::RedSideband => (&b * &sp - &bd * &sm).scale(i),
        Case::BlueSideband => (&bd * &sp - &b * &sm).scale(i),
        Case::CavityRed => &(&(&ad * &bd) * &sm) + &(&(&a * &b) * &sp),
        Case::CavityInverted => &(&(&a * &bd) * &sm) + &(&(&ad * &b) * &sp),
        Case::CavityBlue => &(&(&a * &bd) * &sp) + &(&(&ad * &b) * &sm),
        Case::CavityCarrier => &(&ad * &sm) + &(&a * &sp),
    };
    Ok(h)
}

/// Interaction-picture Hamiltonian of `case` on `trap`, in rad/s.
pub fn case_hamiltonian(
    case: Case,
    params: &PhysicalParams,
    config: SystemConfig,
    trap: usize,
) -> Result<OperatorMatrix> {
    Ok(case_generator(case, config, trap)?.scale_re(coupling_rate(case, params)))
}

/// Index of the partner of a `g`-state under `case`, or `None` when the
/// required occupation is negative (ladder factor zero) or above the cutoff
/// (`Some(Err(()))`).
fn partner(
    config: SystemConfig,
    index: usize,
    trap: usize,
    t: Transition,
) -> Option<std::result::Result<usize, ()>> {
    let m = config.digit(index, Factor::Photon) as i64;
    let n = config.digit(index, Factor::Phonon(trap)) as i64;
    let (m2, n2) = (m + t.photon, n + t.phonon);
    if m2 < 0 || n2 < 0 {
        return None;
    }
    if m2 > config.photon_cutoff as i64 || n2 > config.phonon_cutoff as i64 {
        return Some(Err(()));
    }
    let s_a = config.stride(Factor::Photon) as i64;
    let s_b = config.stride(Factor::Phonon(trap)) as i64;
    let s_ion = config.stride(Factor::Ion(trap)) as i64;
    Some(Ok((index as i64 + s_ion + t.photon * s_a + t.phonon * s_b) as usize))
}

/// Applies the closed-form evolution of `pulse` to `state`.
///
/// Within each coupled pair, with ladder factor `s` and `<e|H|g> = s p`
/// (`p` = 1 or i):
///
/// ```text
/// |g> -> cos(s theta) |g> - i p  sin(s theta) |e>
/// |e> -> cos(s theta) |e> - i p* sin(s theta) |g>
/// ```
///
/// so `p = 1` gives the `-i sin` forms of the cavity and carrier cases and
/// `p = i` gives the real `+sin` / `-sin` rotations of the laser sidebands.
/// States whose partner lies above the Fock cutoff are left unchanged (as the
/// truncated Hamiltonian does), but only if their total population is below
/// [`TRUNCATION_GUARD`].
pub fn analytic_propagate(state: &PureState, pulse: &Pulse) -> Result<PureState> {
    let config = state.config();
    pulse.validate(config)?;
    let trap = pulse.trap;
    let t = pulse.case.transition();
    let ion = Factor::Ion(trap);
    let amps = state.amplitudes();
    let mut out = amps.clone();

    let mut leaked = 0.0;
    // e-states whose g partner would sit above the cutoff
    for idx in 0..config.dim() {
        if config.digit(idx, ion) != 1 {
            continue;
        }
        let g_idx = idx - config.stride(ion);
        let m = config.digit(g_idx, Factor::Photon) as i64 - t.photon;
        let n = config.digit(g_idx, Factor::Phonon(trap)) as i64 - t.phonon;
        if m < 0 || n < 0 {
            continue;
        }
        if m > config.photon_cutoff as i64 || n > config.phonon_cutoff as i64 {
            leaked += amps[idx].norm_sqr();
        }
    }

    let p = if t.imaginary { C64::new(0.0, 1.0) } else { C64::new(1.0, 0.0) };
    let minus_i = C64::new(0.0, -1.0);
    for l in 0..config.dim() {
        if config.digit(l, ion) != 0 {
            continue;
        }
        let m = config.digit(l, Factor::Photon);
        let n = config.digit(l, Factor::Phonon(trap));
        let s = ladder_factor(m, n, t);
        match partner(config, l, trap, t) {
            None => {}
            Some(Err(())) => {
                if s > 0.0 {
                    leaked += amps[l].norm_sqr();
                }
            }
            Some(Ok(u)) => {
                let (sin, cos) = (s * pulse.theta).sin_cos();
                let (al, au) = (amps[l], amps[u]);
                out[l] = al * cos + minus_i * p.conj() * sin * au;
                out[u] = au * cos + minus_i * p * sin * al;
            }
        }
    }
    if leaked > TRUNCATION_GUARD {
        return Err(Error::TruncationRisk { pulse: pulse.to_string(), population: leaked });
    }
    PureState::from_amplitudes(config, out)
}

/// `exp(-i theta H)` for a Hermitian `H`, via its eigendecomposition.
pub fn hermitian_expm(h: &OperatorMatrix, theta: f64) -> Result<OperatorMatrix> {
    let err = h.hermiticity_error();
    if err > 1e-12 {
        return Err(Error::NonHermitian(err));
    }
    let eig = h.matrix().clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = DMatrix::from_diagonal(
        &eig.eigenvalues.map(|lambda| C64::from_polar(1.0, -theta * lambda)),
    );
    OperatorMatrix::from_matrix(h.config(), v * phases * v.adjoint())
}

/// Unitary of a pulse computed by matrix exponential of the case generator.
pub fn expm_unitary(case: Case, theta: f64, config: SystemConfig, trap: usize) -> Result<OperatorMatrix> {
    hermitian_expm(&case_generator(case, config, trap)?, theta)
}

/// Independent matrix-exponential route for a single pulse.
pub fn expm_propagate(state: &PureState, case: Case, theta: f64, trap: usize) -> Result<PureState> {
    expm_unitary(case, theta, state.config(), trap)?.apply(state)
}
