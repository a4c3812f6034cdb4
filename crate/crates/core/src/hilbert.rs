//! Truncated tensor-product space of ion internal levels, trap phonons and the
//! cavity photon mode.
//!
//! Basis ordering is mixed-radix with the photon number varying fastest, then
//! the phonon number of trap 1, the internal level of trap 1, and (for two
//! traps) the phonon number and internal level of trap 2. `g` is digit 0 and
//! `e` is digit 1.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_TRAPS: usize = 2;

/// Shape of the truncated Hilbert space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub trap_count: usize,
    /// Highest phonon number kept in each trap.
    pub phonon_cutoff: usize,
    /// Highest photon number kept in the cavity.
    pub photon_cutoff: usize,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self { trap_count: 1, phonon_cutoff: 5, photon_cutoff: 5 }
    }
}

/// One tensor factor of the composite space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    Photon,
    Phonon(usize),
    Ion(usize),
}

impl SystemConfig {
    pub fn new(trap_count: usize, phonon_cutoff: usize, photon_cutoff: usize) -> Result<Self> {
        let cfg = Self { trap_count, phonon_cutoff, photon_cutoff };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn single(cutoff: usize) -> Self {
        Self { trap_count: 1, phonon_cutoff: cutoff, photon_cutoff: cutoff }
    }

    pub fn two_traps(cutoff: usize) -> Self {
        Self { trap_count: 2, phonon_cutoff: cutoff, photon_cutoff: cutoff }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trap_count == 0 || self.trap_count > MAX_TRAPS {
            return Err(Error::Domain {
                field: "trap_count",
                reason: format!("{} (must be 1 or 2)", self.trap_count),
            });
        }
        if self.phonon_cutoff == 0 {
            return Err(Error::Domain { field: "phonon_cutoff", reason: "must be >= 1".into() });
        }
        if self.photon_cutoff == 0 {
            return Err(Error::Domain { field: "photon_cutoff", reason: "must be >= 1".into() });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        let per_trap = 2 * (self.phonon_cutoff + 1);
        per_trap.pow(self.trap_count as u32) * (self.photon_cutoff + 1)
    }

    pub fn radix(&self, factor: Factor) -> usize {
        match factor {
            Factor::Photon => self.photon_cutoff + 1,
            Factor::Phonon(_) => self.phonon_cutoff + 1,
            Factor::Ion(_) => 2,
        }
    }

    /// Index increment for a unit change of `factor`'s digit.
    pub fn stride(&self, factor: Factor) -> usize {
        let photon = self.photon_cutoff + 1;
        let trap_block = 2 * (self.phonon_cutoff + 1);
        match factor {
            Factor::Photon => 1,
            Factor::Phonon(i) => photon * trap_block.pow(i as u32),
            Factor::Ion(i) => photon * trap_block.pow(i as u32) * (self.phonon_cutoff + 1),
        }
    }

    /// Digit of `factor` in basis index `index`.
    #[inline]
    pub fn digit(&self, index: usize, factor: Factor) -> usize {
        (index / self.stride(factor)) % self.radix(factor)
    }

    pub fn check_trap(&self, trap: usize) -> Result<()> {
        if trap >= self.trap_count {
            return Err(Error::Range { field: "trap", value: trap, max: self.trap_count - 1 });
        }
        Ok(())
    }

    pub fn factors(&self) -> Vec<Factor> {
        let mut out = vec![Factor::Photon];
        for t in 0..self.trap_count {
            out.push(Factor::Phonon(t));
            out.push(Factor::Ion(t));
        }
        out
    }

    /// Basis index of a label; the inverse of [`SystemConfig::label`].
    pub fn basis_index(&self, label: &BasisLabel) -> Result<usize> {
        if label.internal.len() != self.trap_count || label.phonon.len() != self.trap_count {
            return Err(Error::Shape {
                expected: self.trap_count,
                got: label.internal.len().max(label.phonon.len()),
            });
        }
        if label.photon > self.photon_cutoff {
            return Err(Error::Range { field: "photon", value: label.photon, max: self.photon_cutoff });
        }
        let mut index = label.photon;
        for t in 0..self.trap_count {
            let n = label.phonon[t];
            if n > self.phonon_cutoff {
                return Err(Error::Range { field: "phonon", value: n, max: self.phonon_cutoff });
            }
            index += n * self.stride(Factor::Phonon(t));
            index += label.internal[t].digit() * self.stride(Factor::Ion(t));
        }
        Ok(index)
    }

    pub fn label(&self, index: usize) -> Result<BasisLabel> {
        let dim = self.dim();
        if index >= dim {
            return Err(Error::Range { field: "index", value: index, max: dim - 1 });
        }
        let internal = (0..self.trap_count)
            .map(|t| Internal::from_digit(self.digit(index, Factor::Ion(t))))
            .collect();
        let phonon = (0..self.trap_count).map(|t| self.digit(index, Factor::Phonon(t))).collect();
        Ok(BasisLabel { internal, phonon, photon: self.digit(index, Factor::Photon) })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Internal {
    #[serde(rename = "g")]
    G,
    #[serde(rename = "e")]
    E,
}

impl Internal {
    pub fn digit(self) -> usize {
        match self {
            Internal::G => 0,
            Internal::E => 1,
        }
    }

    pub fn from_digit(d: usize) -> Self {
        if d == 0 { Internal::G } else { Internal::E }
    }
}

/// Occupation label of one basis state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    pub internal: Vec<Internal>,
    pub phonon: Vec<usize>,
    pub photon: usize,
}

impl BasisLabel {
    pub fn single(internal: Internal, phonon: usize, photon: usize) -> Self {
        Self { internal: vec![internal], phonon: vec![phonon], photon }
    }

    pub fn pair(ions: [(Internal, usize); 2], photon: usize) -> Self {
        Self {
            internal: vec![ions[0].0, ions[1].0],
            phonon: vec![ions[0].1, ions[1].1],
            photon,
        }
    }
}

/// `g,0;e,1;a=0`: per-trap `internal,phonon` pairs, photon last.
impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, n) in self.internal.iter().zip(&self.phonon) {
            let c = if *s == Internal::G { 'g' } else { 'e' };
            write!(f, "{c},{n};")?;
        }
        write!(f, "a={}", self.photon)
    }
}

impl FromStr for BasisLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(';').map(str::trim).collect();
        let (photon_part, traps) = parts
            .split_last()
            .ok_or_else(|| Error::Parse(format!("empty label {s:?}")))?;
        let photon = photon_part
            .strip_prefix("a=")
            .and_then(|n| n.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("expected `a=<n>` at end of label {s:?}")))?;
        let mut internal = Vec::with_capacity(traps.len());
        let mut phonon = Vec::with_capacity(traps.len());
        for t in traps {
            let (sym, n) = t
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("expected `<g|e>,<n>`, got {t:?}")))?;
            internal.push(match sym.trim() {
                "g" => Internal::G,
                "e" => Internal::E,
                other => return Err(Error::Parse(format!("unknown internal state {other:?}"))),
            });
            phonon.push(
                n.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad phonon number {n:?}")))?,
            );
        }
        if internal.is_empty() {
            return Err(Error::Parse(format!("label {s:?} names no trap")));
        }
        Ok(Self { internal, phonon, photon })
    }
}

/// Single-factor operators appearing in the system Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpSpec {
    A,
    ADag,
    B(usize),
    BDag(usize),
    SigmaPlus(usize),
    SigmaMinus(usize),
    SigmaZ(usize),
    SigmaX(usize),
    Identity,
}

impl OpSpec {
    fn factor(self) -> Option<Factor> {
        match self {
            OpSpec::A | OpSpec::ADag => Some(Factor::Photon),
            OpSpec::B(t) | OpSpec::BDag(t) => Some(Factor::Phonon(t)),
            OpSpec::SigmaPlus(t) | OpSpec::SigmaMinus(t) | OpSpec::SigmaZ(t) | OpSpec::SigmaX(t) => {
                Some(Factor::Ion(t))
            }
            OpSpec::Identity => None,
        }
    }

    /// Image of digit `d` under the local operator: `(new digit, coefficient)`.
    fn act(self, d: usize, radix: usize) -> Option<(usize, f64)> {
        match self {
            OpSpec::A | OpSpec::B(_) => (d > 0).then(|| (d - 1, (d as f64).sqrt())),
            OpSpec::ADag | OpSpec::BDag(_) => {
                (d + 1 < radix).then(|| (d + 1, ((d + 1) as f64).sqrt()))
            }
            OpSpec::SigmaPlus(_) => (d == 0).then_some((1, 1.0)),
            OpSpec::SigmaMinus(_) => (d == 1).then_some((0, 1.0)),
            OpSpec::SigmaZ(_) => Some((d, if d == 1 { 1.0 } else { -1.0 })),
            OpSpec::SigmaX(_) => Some((1 - d, 1.0)),
            OpSpec::Identity => Some((d, 1.0)),
        }
    }
}

/// Dense operator on the composite space.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    config: SystemConfig,
    matrix: DMatrix<C64>,
}

impl OperatorMatrix {
    pub fn zeros(config: SystemConfig) -> Self {
        let d = config.dim();
        Self { config, matrix: DMatrix::zeros(d, d) }
    }

    pub fn identity(config: SystemConfig) -> Self {
        let d = config.dim();
        Self { config, matrix: DMatrix::identity(d, d) }
    }

    pub fn from_matrix(config: SystemConfig, matrix: DMatrix<C64>) -> Result<Self> {
        let d = config.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Shape { expected: d, got: matrix.nrows() });
        }
        Ok(Self { config, matrix })
    }

    /// Embeds a single-factor operator into the full space.
    pub fn build(config: SystemConfig, spec: OpSpec) -> Result<Self> {
        let factor = spec.factor();
        if let Some(Factor::Phonon(t) | Factor::Ion(t)) = factor {
            config.check_trap(t)?;
        }
        let d = config.dim();
        let mut matrix = DMatrix::zeros(d, d);
        for col in 0..d {
            let Some(factor) = factor else {
                matrix[(col, col)] = C64::new(1.0, 0.0);
                continue;
            };
            let digit = config.digit(col, factor);
            if let Some((new, coeff)) = spec.act(digit, config.radix(factor)) {
                let row = col + new * config.stride(factor) - digit * config.stride(factor);
                matrix[(row, col)] = C64::new(coeff, 0.0);
            }
        }
        Ok(Self { config, matrix })
    }

    pub fn config(&self) -> SystemConfig {
        self.config
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn dagger(&self) -> Self {
        Self { config: self.config, matrix: self.matrix.adjoint() }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { config: self.config, matrix: &self.matrix * c }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// Largest entry of `|H - H^dag|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        check_same(self.config, state.config)?;
        Ok(PureState { config: self.config, amps: &self.matrix * &state.amps })
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self * other - other * self
    }

    /// Embeds a matrix acting on one factor's local basis.
    pub fn from_local(config: SystemConfig, factor: Factor, local: &DMatrix<C64>) -> Result<Self> {
        if let Factor::Phonon(t) | Factor::Ion(t) = factor {
            config.check_trap(t)?;
        }
        let r = config.radix(factor);
        if local.nrows() != r || local.ncols() != r {
            return Err(Error::Shape { expected: r, got: local.nrows() });
        }
        let d = config.dim();
        let stride = config.stride(factor);
        let mut matrix = DMatrix::zeros(d, d);
        for col in 0..d {
            let dc = config.digit(col, factor);
            let base = col - dc * stride;
            for dr in 0..r {
                matrix[(base + dr * stride, col)] = local[(dr, dc)];
            }
        }
        Ok(Self { config, matrix })
    }

    /// Nonzero entries as `(row, col, value)`, column-major.
    pub fn nonzeros(&self) -> Vec<(usize, usize, C64)> {
        let n = self.matrix.nrows();
        let mut out = Vec::new();
        for c in 0..n {
            for r in 0..n {
                let v = self.matrix[(r, c)];
                if v != C64::new(0.0, 0.0) {
                    out.push((r, c, v));
                }
            }
        }
        out
    }
}

impl<'a> Mul<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        debug_assert_eq!(self.config, rhs.config);
        OperatorMatrix { config: self.config, matrix: &self.matrix * &rhs.matrix }
    }
}

impl<'a> Add<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        debug_assert_eq!(self.config, rhs.config);
        OperatorMatrix { config: self.config, matrix: &self.matrix + &rhs.matrix }
    }
}

impl Add for OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: OperatorMatrix) -> OperatorMatrix {
        &self + &rhs
    }
}

impl Sub for OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: OperatorMatrix) -> OperatorMatrix {
        debug_assert_eq!(self.config, rhs.config);
        OperatorMatrix { config: self.config, matrix: self.matrix - rhs.matrix }
    }
}

impl Mul for OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: OperatorMatrix) -> OperatorMatrix {
        &self * &rhs
    }
}

pub fn build_operator(config: SystemConfig, spec: OpSpec) -> Result<OperatorMatrix> {
    OperatorMatrix::build(config, spec)
}

/// Complex amplitude vector over the composite basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    config: SystemConfig,
    amps: DVector<C64>,
}

impl PureState {
    pub fn basis(config: SystemConfig, label: &BasisLabel) -> Result<Self> {
        let idx = config.basis_index(label)?;
        let mut amps = DVector::zeros(config.dim());
        amps[idx] = C64::new(1.0, 0.0);
        Ok(Self { config, amps })
    }

    pub fn from_amplitudes(config: SystemConfig, amps: DVector<C64>) -> Result<Self> {
        if amps.len() != config.dim() {
            return Err(Error::Shape { expected: config.dim(), got: amps.len() });
        }
        Ok(Self { config, amps })
    }

    pub fn zeros(config: SystemConfig) -> Self {
        Self { config, amps: DVector::zeros(config.dim()) }
    }

    /// Amplitudes given by a function of the basis label (not normalized).
    pub fn from_fn(config: SystemConfig, mut f: impl FnMut(&BasisLabel) -> C64) -> Self {
        let amps = DVector::from_iterator(
            config.dim(),
            (0..config.dim()).map(|i| f(&config.label(i).expect("index in range"))),
        );
        Self { config, amps }
    }

    /// Tensor product of per-factor states. Each slice holds the amplitudes
    /// of one factor's local basis; missing trailing entries are zero.
    pub fn product(
        config: SystemConfig,
        ions: &[&[C64]],
        phonons: &[&[C64]],
        photon: &[C64],
    ) -> Result<Self> {
        if ions.len() != config.trap_count || phonons.len() != config.trap_count {
            return Err(Error::Shape { expected: config.trap_count, got: ions.len() });
        }
        let get = |v: &[C64], i: usize| v.get(i).copied().unwrap_or_default();
        for p in phonons {
            if p.len() > config.phonon_cutoff + 1 {
                return Err(Error::Range {
                    field: "phonon",
                    value: p.len() - 1,
                    max: config.phonon_cutoff,
                });
            }
        }
        if photon.len() > config.photon_cutoff + 1 {
            return Err(Error::Range {
                field: "photon",
                value: photon.len() - 1,
                max: config.photon_cutoff,
            });
        }
        Ok(Self::from_fn(config, |l| {
            let mut a = get(photon, l.photon);
            for t in 0..config.trap_count {
                a *= get(ions[t], l.internal[t].digit()) * get(phonons[t], l.phonon[t]);
            }
            a
        }))
    }

    pub fn config(&self) -> SystemConfig {
        self.config
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut DVector<C64> {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amps
    }

    pub fn amplitude(&self, label: &BasisLabel) -> Result<C64> {
        Ok(self.amps[self.config.basis_index(label)?])
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.amps /= C64::new(n, 0.0);
        }
        self
    }

    pub fn scaled(mut self, c: C64) -> Self {
        self.amps *= c;
        self
    }

    /// Superposition `self + c * other`.
    pub fn plus(mut self, c: C64, other: &PureState) -> Result<Self> {
        check_same(self.config, other.config)?;
        self.amps.axpy(c, &other.amps, C64::new(1.0, 0.0));
        Ok(self)
    }

    /// Largest `|x_i - y_i|`.
    pub fn max_abs_diff(&self, other: &PureState) -> Result<f64> {
        check_same(self.config, other.config)?;
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Total probability on basis states selected by `pred`.
    pub fn population_where(&self, mut pred: impl FnMut(usize) -> bool) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| pred(*i))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Embeds into a larger (or equal) cutoff; fails if population would be dropped.
    pub fn embed(&self, target: SystemConfig) -> Result<Self> {
        if target.trap_count != self.config.trap_count {
            return Err(Error::Shape { expected: target.trap_count, got: self.config.trap_count });
        }
        let mut out = Self::zeros(target);
        for (i, a) in self.amps.iter().enumerate() {
            if *a == C64::default() {
                continue;
            }
            let label = self.config.label(i)?;
            out.amps[target.basis_index(&label)?] = *a;
        }
        Ok(out)
    }
}

fn check_same(a: SystemConfig, b: SystemConfig) -> Result<()> {
    if a != b {
        return Err(Error::Shape { expected: a.dim(), got: b.dim() });
    }
    Ok(())
}

/// `<x|y>`, antilinear in `x`.
pub fn inner(x: &PureState, y: &PureState) -> Result<C64> {
    check_same(x.config, y.config)?;
    Ok(x.amps.dotc(&y.amps))
}

/// `|<x|y>|^2`.
pub fn fidelity_pure(x: &PureState, y: &PureState) -> Result<f64> {
    Ok(inner(x, y)?.norm_sqr())
}

/// Reduced density matrix of a single tensor factor.
pub fn reduced_density(state: &PureState, factor: Factor) -> Result<DMatrix<C64>> {
    let cfg = state.config;
    if let Factor::Phonon(t) | Factor::Ion(t) = factor {
        cfg.check_trap(t)?;
    }
    let r = cfg.radix(factor);
    let stride = cfg.stride(factor);
    let mut rho = DMatrix::zeros(r, r);
    for (i, ai) in state.amps.iter().enumerate() {
        if *ai == C64::default() {
            continue;
        }
        let di = cfg.digit(i, factor);
        // rest of the index with this factor's digit cleared
        let base = i - di * stride;
        for dj in 0..r {
            let aj = state.amps[base + dj * stride];
            rho[(di, dj)] += ai * aj.conj();
        }
    }
    Ok(rho)
}

/// Largest entry modulus of a complex matrix.
pub fn max_entry(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `-tr(rho ln rho)` in nats.
pub fn von_neumann_entropy(rho: &DMatrix<C64>) -> f64 {
    rho.clone()
        .symmetric_eigenvalues()
        .iter()
        .filter(|&&p| p > 1e-15)
        .map(|&p| -p * p.ln())
        .sum()
}
