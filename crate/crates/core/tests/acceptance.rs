//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{c, leak_set, random_pair, random_state, rng};
use ioncavity::gates::{compile_gate, program_duration, qubit_ket, truth_table_expm, GateKind, GateSpec};
use ioncavity::hilbert::max_entry;
use ioncavity::open_system::{
    cnot_ba_fidelity_report, cnot_ba_time, fidelity_curve, lindblad_evolve, to_density, DecaySpec, DecayWindow,
    FidelityOptions,
};
use ioncavity::propagators::{analytic_propagate, expm_propagate, resonant_params, rwa_deviation, LabFrameOptions};
use ioncavity::protocols::{
    bell_from_ghz, entangle_internal, internal_swap, motional_cnot_target, motional_cnot_via_swaps, prepare_ghz,
    state_transfer, AmplitudePair, ProtocolOptions, ProtocolResult, Route,
};
use ioncavity::{BasisLabel, Case, Factor, Internal, OperatorMatrix, PhysicalParams, Pulse, PureState, SystemConfig, C64};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// `sum coef |g>|a b>` on one trap.
fn ab(cfg: SystemConfig, terms: &[(C64, Internal, usize, usize)]) -> PureState {
    let mut psi = PureState::zeros(cfg);
    for &(coef, s, a, b) in terms {
        let idx = cfg.basis_index(&BasisLabel::single(s, b, a)).unwrap();
        psi.amplitudes_mut()[idx] += coef;
    }
    psi
}

/// Runs the gate pulse by pulse and compares every intermediate with the
/// printed line.
fn check_line(kind: GateKind, input: (usize, usize), line: &[PureState]) -> Result<f64, String> {
    let cfg = line[0].config();
    let mut psi = qubit_ket(cfg, 0, input.0, input.1).map_err(err)?;
    let mut worst = psi.max_abs_diff(&line[0]).map_err(err)?;
    for (pulse, want) in compile_gate(GateSpec::new(kind, 0)).pulses.iter().zip(&line[1..]) {
        psi = analytic_propagate(&psi, pulse).map_err(err)?;
        worst = worst.max(psi.max_abs_diff(want).map_err(err)?);
    }
    Ok(worst)
}

fn one() -> C64 {
    c(1.0, 0.0)
}

fn criterion_truth_tables() -> Outcome {
    let start = Instant::now();
    let cfg = SystemConfig::default();
    let (g, e, i) = (Internal::G, Internal::E, c(0.0, 1.0));
    let k = |coef: C64, s, a, b| ab(cfg, &[(coef, s, a, b)]);
    let cnot_ab = [
        ((1, 0), [k(one(), g, 1, 0), k(one(), g, 1, 0), k(i, e, 0, 0), k(one(), g, 1, 1)]),
        ((0, 1), [k(one(), g, 0, 1), k(one(), g, 0, 1), k(one(), g, 0, 1), k(one(), g, 0, 1)]),
        ((1, 1), [k(one(), g, 1, 1), k(-i, e, 0, 0), k(one(), g, 1, 0), k(one(), g, 1, 0)]),
        ((0, 0), [k(one(), g, 0, 0), k(one(), g, 0, 0), k(one(), g, 0, 0), k(one(), g, 0, 0)]),
    ];
    let cnot_ba = [
        ((1, 0), [k(one(), g, 1, 0), k(one(), g, 1, 0), k(one(), g, 1, 0), k(one(), g, 1, 0)]),
        ((0, 1), [k(one(), g, 0, 1), k(one(), g, 0, 1), k(-one(), e, 0, 0), k(i, g, 1, 1)]),
        ((1, 1), [k(one(), g, 1, 1), k(i, e, 0, 0), k(i, g, 0, 1), k(i, g, 0, 1)]),
        ((0, 0), [k(one(), g, 0, 0), k(one(), g, 0, 0), k(one(), g, 0, 0), k(one(), g, 0, 0)]),
    ];
    let mut worst = 0.0f64;
    for (kind, table) in [(GateKind::CnotAb, &cnot_ab), (GateKind::CnotBa, &cnot_ba)] {
        for (input, line) in table.iter() {
            worst = worst.max(check_line(kind, *input, line)?);
        }
    }
    let elapsed = start.elapsed();
    ensure(worst <= 1e-10, format!("max amplitude error {worst:.3e}"))?;
    ensure(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("max error {worst:.2e}, {elapsed:.2?}"))
}

fn criterion_hadamards() -> Outcome {
    let cfg = SystemConfig::default();
    let (g, e, i, h) = (Internal::G, Internal::E, c(0.0, 1.0), FRAC_1_SQRT_2);
    let r = |x: f64| c(x, 0.0);
    let ha_one = [
        ab(cfg, &[(one(), g, 1, 0)]),
        ab(cfg, &[(-i, e, 0, 0)]),
        ab(cfg, &[(-i * h, e, 0, 0), (r(h), g, 0, 0)]),
        ab(cfg, &[(r(h), g, 0, 0), (r(-h), g, 1, 0)]),
    ];
    let ha_zero = [
        ab(cfg, &[(one(), g, 0, 0)]),
        ab(cfg, &[(one(), g, 0, 0)]),
        ab(cfg, &[(r(h), g, 0, 0), (i * h, e, 0, 0)]),
        ab(cfg, &[(r(h), g, 0, 0), (r(h), g, 1, 0)]),
    ];
    let mut worst = check_line(GateKind::HA, (1, 0), &ha_one)?;
    worst = worst.max(check_line(GateKind::HA, (0, 0), &ha_zero)?);

    // Phonon analogue: R7 replaced by R2, whose closed form carries real
    // sin factors; |0> -> (|0> - i|1>)/sqrt2, |1> -> (i|0> - |1>)/sqrt2.
    let hb_zero = [
        ab(cfg, &[(one(), g, 0, 0)]),
        ab(cfg, &[(one(), g, 0, 0)]),
        ab(cfg, &[(r(h), g, 0, 0), (i * h, e, 0, 0)]),
        ab(cfg, &[(r(h), g, 0, 0), (-i * h, g, 0, 1)]),
    ];
    let hb_one = [
        ab(cfg, &[(one(), g, 0, 1)]),
        ab(cfg, &[(one(), e, 0, 0)]),
        ab(cfg, &[(r(h), e, 0, 0), (i * h, g, 0, 0)]),
        ab(cfg, &[(i * h, g, 0, 0), (r(-h), g, 0, 1)]),
    ];
    worst = worst.max(check_line(GateKind::HB, (0, 0), &hb_zero)?);
    worst = worst.max(check_line(GateKind::HB, (0, 1), &hb_one)?);
    let small = SystemConfig::single(2);
    let oracle = truth_table_expm(GateSpec::new(GateKind::HB, 0), small).map_err(err)?;
    let analytic = ioncavity::gates::truth_table(GateSpec::new(GateKind::HB, 0), small).map_err(err)?;
    worst = worst.max(max_entry(&(&oracle.qubit_matrix - &analytic.qubit_matrix)));
    ensure(worst <= 1e-10, format!("max amplitude error {worst:.3e}"))?;
    Ok(format!("H_A and H_B lines, max error {worst:.2e}"))
}

fn criterion_oracle() -> Outcome {
    let mut r = rng(2024);
    let configs = [SystemConfig::single(3), SystemConfig::new(1, 4, 2).map_err(err)?, SystemConfig::two_traps(2)];
    let (mut worst, mut trials) = (0.0f64, 0);
    for case in Case::ALL {
        for n in 0..16 {
            let cfg = configs[n % configs.len()];
            let trap = r.gen_range(0..cfg.trap_count);
            let theta = r.gen_range(0.0..4.0 * PI);
            let psi = random_state(cfg, &leak_set(case, cfg, trap), &mut r);
            let a = analytic_propagate(&psi, &Pulse::new(case, trap, theta)).map_err(err)?;
            let b = expm_propagate(&psi, case, theta, trap).map_err(err)?;
            worst = worst.max(a.max_abs_diff(&b).map_err(err)?);
            trials += 1;
        }
    }
    ensure(trials >= 100, format!("only {trials} trials"))?;
    ensure(worst <= 1e-9, format!("max deviation {worst:.3e}"))?;
    Ok(format!("{trials} trials over 7 cases, max deviation {worst:.2e}"))
}

fn criterion_timing() -> Outcome {
    let p = PhysicalParams::default();
    let t = |kind| program_duration(&compile_gate(GateSpec::new(kind, 0)), &p).map(|r| r.total).map_err(err);
    let (ab_t, ba_t, ha_t, hb_t) = (t(GateKind::CnotAb)?, t(GateKind::CnotBa)?, t(GateKind::HA)?, t(GateKind::HB)?);
    let within = |x: f64, target: f64, tol: f64| ((x - target) / target).abs() <= tol;
    ensure(within(ab_t, 1.5e-7, 0.05), format!("CNOT_AB {ab_t:.4e} s"))?;
    ensure(within(ba_t, 7.8e-6, 0.02), format!("CNOT_BA {ba_t:.4e} s"))?;
    ensure(within(hb_t, 6.8e-6, 0.02), format!("H_B {hb_t:.4e} s"))?;
    Ok(format!(
        "CNOT_AB {ab_t:.3e} s, CNOT_BA {ba_t:.3e} s, H_B {hb_t:.3e} s; H_A {ha_t:.3e} s from the pulse areas (published figure 4.2e-6 s, not asserted)"
    ))
}

fn protocol_suite(p: AmplitudePair, q: AmplitudePair, o: &ProtocolOptions) -> Result<Vec<ProtocolResult>, String> {
    Ok(vec![
        state_transfer(p, o).map_err(err)?,
        internal_swap(p, q, o).map_err(err)?,
        prepare_ghz(p, o).map_err(err)?,
        bell_from_ghz(p, o, false).map_err(err)?,
        bell_from_ghz(p, o, true).map_err(err)?,
        entangle_internal(p, o).map_err(err)?,
    ])
}

fn criterion_protocols() -> Outcome {
    let mut r = rng(77);
    let o = ProtocolOptions::default();
    let mut worst = 0.0f64;
    let mut runs = 0;
    for _ in 0..10 {
        let (p, q) = (random_pair(&mut r), random_pair(&mut r));
        for res in protocol_suite(p, q, &o)? {
            worst = worst.max(res.worst_deviation());
            runs += 1;
        }
    }
    let h = FRAC_1_SQRT_2;
    for sign in [1.0, -1.0] {
        let pair = AmplitudePair::new(c(0.0, sign * h), c(h, 0.0)).map_err(err)?;
        let res = bell_from_ghz(pair, &o, true).map_err(err)?;
        worst = worst.max(res.worst_deviation());
        // C = iD empties the (|00> + |11>) branch, C = -iD the other one
        let g = Internal::G;
        let amp = |x, y| res.final_state.amplitude(&BasisLabel::pair([(g, x), (g, y)], 0)).unwrap();
        let vanishing = if sign > 0.0 { amp(0, 0).norm().max(amp(1, 1).norm()) } else { amp(0, 1).norm().max(amp(1, 0).norm()) };
        ensure(vanishing <= 1e-10, format!("Bell branch for C = {sign:+}iD is {vanishing:.3e}"))?;
    }
    ensure(worst <= 1e-10, format!("max protocol deviation {worst:.3e}"))?;
    for row in motional_cnot_via_swaps(&o).map_err(err)? {
        let want = motional_cnot_target(row.input.0, row.input.1);
        ensure(
            row.output == want && row.photon == 0 && row.leakage <= 1e-10,
            format!("swap table row {:?} -> {:?}", row.input, row.output),
        )?;
    }
    Ok(format!("{runs} random runs + 2 Bell cases, max deviation {worst:.2e}; swap table occupations match"))
}

fn criterion_truncation() -> Outcome {
    let mut r = rng(31);
    let (p, q) = (random_pair(&mut r), random_pair(&mut r));
    let five = protocol_suite(p, q, &ProtocolOptions::new(5, Route::Analytic))?;
    let seven = protocol_suite(p, q, &ProtocolOptions::new(7, Route::Analytic))?;
    let mut worst = 0.0f64;
    for (a, b) in five.iter().zip(&seven) {
        worst = worst.max((a.deviation - b.deviation).abs());
        let lifted = a.final_state.embed(b.final_state.config()).map_err(err)?;
        worst = worst.max(lifted.max_abs_diff(&b.final_state).map_err(err)?);
    }
    let rows5 = motional_cnot_via_swaps(&ProtocolOptions::new(5, Route::Analytic)).map_err(err)?;
    let rows7 = motional_cnot_via_swaps(&ProtocolOptions::new(7, Route::Analytic)).map_err(err)?;
    for (a, b) in rows5.iter().zip(&rows7) {
        ensure(a.output == b.output, "swap table changed with cutoff")?;
        worst = worst.max((a.phase - b.phase).norm());
    }
    ensure(worst <= 1e-10, format!("cutoff 5 vs 7 differ by {worst:.3e}"))?;
    Ok(format!("cutoff 5 vs 7, max change {worst:.2e}"))
}

fn criterion_open_system() -> Outcome {
    let start = Instant::now();
    let p = PhysicalParams::default();
    let opts = FidelityOptions { cutoff: 2, dt: 2e-3 };
    let f0 = cnot_ba_fidelity_report(&p, &DecaySpec::new(0.0), &opts).map_err(err)?.average;
    ensure((f0 - 1.0).abs() <= 1e-8, format!("kappa = 0 fidelity {f0}"))?;

    let cfg = SystemConfig::single(2);
    let photon = PureState::basis(cfg, &BasisLabel::single(Internal::G, 0, 1)).map_err(err)?;
    let kappa = 1.7;
    let rho = lindblad_evolve(&to_density(&photon).map_err(err)?, &OperatorMatrix::zeros(cfg), kappa, 1.0 / kappa, 1e-3)
        .map_err(err)?;
    let pop = rho.population_where(|i| cfg.digit(i, Factor::Photon) == 1);
    ensure((pop - (-1.0f64).exp()).abs() <= 1e-4, format!("damped population {pop}"))?;

    let ratios: Vec<f64> = (0..20).map(|i| 0.01 + (2.0 - 0.01) * i as f64 / 19.0).collect();
    let curve = fidelity_curve(&p, &ratios, &DecayWindow::LastPulse, &opts).map_err(err)?;
    ensure(curve.windows(2).all(|w| w[1].fidelity <= w[0].fidelity), "fidelity curve increases somewhere")?;

    let t_im = cnot_ba_time(&p).map_err(err)?;
    let half = cnot_ba_fidelity_report(&p, &DecaySpec::new(0.5 / t_im), &opts).map_err(err)?.average;
    ensure(half >= 0.9, format!("F at ratio 0.5 is {half}"))?;
    let wider = cnot_ba_fidelity_report(&p, &DecaySpec::new(0.5 / t_im), &FidelityOptions { cutoff: 3, ..opts })
        .map_err(err)?
        .average;
    ensure((wider - half).abs() <= 1e-10, format!("cutoff 2 vs 3 differ by {:.3e}", (wider - half).abs()))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), format!("took {elapsed:?}"))?;
    Ok(format!(
        "F(0) = {f0:.12}, e^-1 check {pop:.6}, F(0.5) = {half:.6}, F(2) = {:.6}, {elapsed:.2?}",
        curve.last().map(|x| x.fidelity).unwrap_or(f64::NAN)
    ))
}

fn scaled_units() -> PhysicalParams {
    PhysicalParams {
        omega0: 5.0,
        omega_c: 5.0,
        omega_l: 5.0,
        nu: 1.0,
        g: 0.0,
        g_cap: 0.0,
        eta_c: 0.02,
        eta_l: 0.02,
        phi: FRAC_PI_4,
        kappa: 0.0,
    }
}

fn criterion_rwa() -> Outcome {
    let start = Instant::now();
    let cfg = SystemConfig::single(2);
    let mut report = Vec::new();
    for (case, dt) in [(Case::RedSideband, 0.1), (Case::CavityCarrier, 0.02)] {
        let mut devs = Vec::new();
        for coupling in [1e-2, 1e-3, 1e-4] {
            let base = if case.uses_cavity() {
                PhysicalParams { g: coupling, ..scaled_units() }
            } else {
                PhysicalParams { g_cap: coupling, ..scaled_units() }
            };
            let p = resonant_params(case, &base);
            let opts = LabFrameOptions { lamb_dicke_linearized: true, dt };
            devs.push(rwa_deviation(case, &p, cfg, FRAC_PI_2, opts).map_err(err)?);
        }
        ensure(devs[1] < devs[0] && devs[2] < devs[1], format!("{case} deviations {devs:?} not decreasing"))?;
        ensure(devs[2] <= 1e-2, format!("{case} deviation {:.3e} at coupling 1e-4", devs[2]))?;
        let p = resonant_params(case, &if case.uses_cavity() {
            PhysicalParams { g: 1e-3, ..scaled_units() }
        } else {
            PhysicalParams { g_cap: 1e-3, ..scaled_units() }
        });
        let exact = rwa_deviation(case, &p, cfg, FRAC_PI_2, LabFrameOptions { lamb_dicke_linearized: false, dt })
            .map_err(err)?;
        report.push(format!("{case}: {:.1e} > {:.1e} > {:.1e} (exact sine at 1e-3: {exact:.1e})", devs[0], devs[1], devs[2]));
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), format!("took {elapsed:?}"))?;
    Ok(format!("{}; {elapsed:.1?}", report.join("; ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 truth tables", criterion_truth_tables),
        ("2 hadamards", criterion_hadamards),
        ("3 oracle equivalence", criterion_oracle),
        ("4 timing", criterion_timing),
        ("5 protocols", criterion_protocols),
        ("6 truncation invariance", criterion_truncation),
        ("7 open system", criterion_open_system),
        ("8 rwa", criterion_rwa),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS [{name}] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{name}] {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
