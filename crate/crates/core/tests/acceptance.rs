//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::f64::consts::TAU;
use std::process::ExitCode;

use qubit_chern::chern::{
    coarse_delta2_grid, fine_delta2_grid, linspace, plateau_averages, transition_width, uniform_thetas,
};
use qubit_chern::engine::step_control;
use qubit_chern::oracle::{curvature_fd_derivative, curvature_fd_plaquette, lattice_chern_gauged};
use qubit_chern::tomography::{splitmix64, DEFAULT_SHOTS};
use qubit_chern::{
    analytic_curvature, evolve_lindblad, evolve_unitary, lattice_chern, measure_chern, prepare_initial,
    ramp_rate_sweep, transition_sweep, Decoherence, Density, LatticeGrid, Manifold, Setup, ShotModel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Gate {
    failed: usize,
}

impl Gate {
    fn check(&mut self, id: &str, title: &str, f: impl FnOnce() -> Result<String, String>) {
        let (ok, detail) = match f() {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if !ok {
            self.failed += 1;
        }
        println!("{id} {} {title}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn require(cond: bool, detail: String) -> Result<String, String> {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ellipse(ratio: f64) -> Manifold {
    Manifold::from_mhz(30.0, 10.0, 30.0 * ratio).unwrap()
}

fn ac1() -> Result<String, String> {
    let c1 = |ratio: f64| {
        let setup = Setup::coherent(ellipse(ratio), 10e-6);
        measure_chern(&setup)
            .map(|(_, r)| r.c1_raw)
            .map_err(|e| e.to_string())
    };
    let top = c1(0.0)?;
    let trivial = c1(1.5)?;
    require(
        (top - 1.0).abs() <= 0.005 && trivial.abs() <= 0.01,
        format!("C1(delta2=0) = {top:.6}, C1(delta2=1.5 delta1) = {trivial:.2e}"),
    )
}

fn ac2() -> Result<String, String> {
    let (_, r) = measure_chern(&Setup::reference()).map_err(|e| e.to_string())?;
    require(
        (r.c1_raw - 0.974).abs() <= 0.015 && (r.c1_corrected - 0.998).abs() <= 0.015,
        format!("c1_raw = {:.4}, c1_corrected = {:.4}", r.c1_raw, r.c1_corrected),
    )
}

fn ac3() -> Result<String, String> {
    let points =
        transition_sweep(&coarse_delta2_grid::<f64>(), &Setup::reference()).map_err(|e| e.to_string())?;
    let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.delta2_ratio, p.result.c1_raw)).collect();
    let (below, above) = plateau_averages(&pairs);
    let (below, above) = (below.ok_or("no points below")?, above.ok_or("no points above")?);
    require(
        (0.95..=1.005).contains(&below) && (-0.04..=0.02).contains(&above),
        format!("below = {below:.4}, above = {above:.4}"),
    )
}

fn ac4() -> Result<String, String> {
    let mut grid: Vec<f64> = coarse_delta2_grid();
    grid.extend(fine_delta2_grid::<f64>());
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mut widths = Vec::new();
    for t_ramp in [0.5e-6, 1e-6, 2e-6] {
        let mut setup = Setup::reference();
        setup.t_ramp = t_ramp;
        let points = transition_sweep(&grid, &setup).map_err(|e| e.to_string())?;
        let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.delta2_ratio, p.result.c1_raw)).collect();
        widths.push(transition_width(&pairs).ok_or("C1 never crosses 0.75 and 0.25")?);
    }
    require(
        widths[0] > widths[1] && widths[1] > widths[2] && widths[2] >= 0.02,
        format!(
            "widths at 0.5/1/2 us = {:.4} / {:.4} / {:.4}",
            widths[0], widths[1], widths[2]
        ),
    )
}

fn ac5() -> Result<String, String> {
    let t_ramps: Vec<f64> = linspace(0.5e-6, 3e-6, 26);
    let points = ramp_rate_sweep(&t_ramps, &Setup::reference()).map_err(|e| e.to_string())?;
    let (worst_t, worst) = points
        .iter()
        .map(|p| (p.t_ramp, p.result.c1_corrected))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();

    let mut setup = Setup::reference();
    setup.t_ramp = 0.25e-6;
    let (profile, _) = measure_chern(&setup).map_err(|e| e.to_string())?;
    let residual: Vec<f64> = profile
        .samples
        .iter()
        .map(|s| s.f_est - analytic_curvature(&setup.params, s.theta).unwrap())
        .collect();
    let p2p =
        residual.iter().cloned().fold(f64::MIN, f64::max) - residual.iter().cloned().fold(f64::MAX, f64::min);
    require(
        worst >= 0.97 && p2p > 0.2,
        format!(
            "min C1 over 0.5..3 us = {worst:.4} (at {:.2} us), 0.25 us oscillation p2p = {p2p:.3}",
            worst_t * 1e6
        ),
    )
}

fn ac6() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let delta1 = rng.random_range(5.0..50.0);
        let omega1 = rng.random_range(2.0..30.0);
        let mut ratio: f64 = rng.random_range(-2.0..2.0);
        while (ratio.abs() - 1.0).abs() < 0.05 {
            ratio = rng.random_range(-2.0..2.0);
        }
        let phi = rng.random_range(0.0..TAU);
        let p = Manifold::from_mhz(delta1, omega1, delta1 * ratio)
            .and_then(|p| p.with_phi(phi))
            .unwrap();
        for theta in uniform_thetas::<f64>(101) {
            let exact = analytic_curvature(&p, theta).map_err(|e| e.to_string())?;
            let d = curvature_fd_derivative(&p, theta, phi, 1e-5).map_err(|e| e.to_string())?;
            let q = curvature_fd_plaquette(&p, theta, phi, 1e-3).map_err(|e| e.to_string())?;
            worst = worst.max((d - exact).abs()).max((q - exact).abs());
        }
    }

    let ratios: [f64; 9] = [-1.6, -1.2, -0.8, -0.4, 0.0, 0.4, 0.8, 1.2, 1.6];
    let grids = [
        LatticeGrid::square(24).unwrap(),
        LatticeGrid::square(48).unwrap(),
        LatticeGrid::new(96, 64).unwrap(),
    ];
    let mut lattice_ok = true;
    for &ratio in &ratios {
        let expected = i64::from(ratio.abs() < 1.0);
        for grid in &grids {
            let plain = lattice_chern(&ellipse(ratio), grid).map_err(|e| e.to_string())?;
            let salt = rng.random::<u64>();
            let twist = |theta: f64, phi: f64| {
                let h = splitmix64(theta.to_bits() ^ splitmix64(phi.to_bits() ^ salt));
                TAU * (h >> 11) as f64 / (1u64 << 53) as f64
            };
            let twisted = lattice_chern_gauged(&ellipse(ratio), grid, twist).map_err(|e| e.to_string())?;
            lattice_ok &= plain == expected && twisted == expected;
        }
    }
    require(
        worst < 1e-6 && lattice_ok,
        format!(
            "max |F_fd - F_analytic| = {worst:.2e}; lattice C1 over 9 delta2 x 3 grids x gauge twists {}",
            if lattice_ok { "exact" } else { "WRONG" }
        ),
    )
}

fn ac7() -> Result<String, String> {
    let setup = Setup::reference();
    let protocol = setup.protocol().map_err(|e| e.to_string())?;
    let rho0 = prepare_initial(&setup.params, &setup.preparation).map_err(|e| e.to_string())?;
    let mixed = evolve_lindblad(&setup.params, &protocol, rho0, &setup.decoherence, setup.t_ramp)
        .map_err(|e| e.to_string())?;
    let trace_drift = mixed.max_trace_drift();
    let min_eig = mixed.min_eigenvalue();

    let psi0 = setup
        .params
        .ground_state_at(0.0, setup.params.phi)
        .map_err(|e| e.to_string())?;
    let pure = evolve_unitary(&setup.params, &protocol, psi0, setup.t_ramp).map_err(|e| e.to_string())?;
    let norm_drift = pure.max_norm_drift();

    let zero_rate = evolve_lindblad(
        &setup.params,
        &protocol,
        Density::from_pure(&psi0),
        &Decoherence::coherent(),
        setup.t_ramp,
    )
    .map_err(|e| e.to_string())?;
    let unitary_gap = pure
        .states()
        .zip(zero_rate.states())
        .map(|(psi, rho)| psi.bloch().max_abs_diff(&rho.bloch))
        .fold(0.0, f64::max);

    let base = step_control(setup.t_ramp, &setup.params);
    let c1_at = |steps: usize| {
        let mut s = setup;
        s.n_steps = Some(steps);
        measure_chern(&s)
            .map(|(_, r)| r.c1_raw)
            .map_err(|e| e.to_string())
    };
    let doubling = (c1_at(base)? - c1_at(2 * base)?).abs();

    require(
        trace_drift < 1e-12 && min_eig >= -1e-8 && norm_drift < 1e-9 && unitary_gap < 1e-6 && doubling < 1e-4,
        format!(
            "trace drift {trace_drift:.1e}, min eigenvalue {min_eig:.2e}, norm drift {norm_drift:.1e}, \
             zero-rate vs unitary {unitary_gap:.1e}, step doubling dC1 {doubling:.1e}"
        ),
    )
}

fn ac8() -> Result<String, String> {
    let exact = measure_chern(&Setup::reference())
        .map_err(|e| e.to_string())?
        .1
        .c1_raw;
    let runs: Vec<(f64, f64)> = (0..100u64)
        .map(|seed| {
            let mut setup = Setup::reference();
            setup.shots = Some(ShotModel::new(DEFAULT_SHOTS, seed).unwrap());
            measure_chern(&setup).map(|(_, r)| (r.c1_raw, r.c1_err))
        })
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let n = runs.len() as f64;
    let mean_err = runs.iter().map(|r| r.1).sum::<f64>() / n;
    let mean = runs.iter().map(|r| r.0).sum::<f64>() / n;
    let chi2 = runs.iter().map(|r| ((r.0 - mean) / r.1).powi(2)).sum::<f64>() / (n - 1.0);
    require(
        (mean_err - 0.023).abs() <= 0.3 * 0.023 && (0.6..=1.5).contains(&chi2),
        format!(
            "{DEFAULT_SHOTS} shots/axis: propagated error {mean_err:.4}, chi2/dof {chi2:.3}, \
             mean C1 {mean:.4} (exact {exact:.4})"
        ),
    )
}

fn main() -> ExitCode {
    let mut gate = Gate { failed: 0 };
    gate.check("AC1", "quantized Chern number, ideal limit", ac1);
    gate.check("AC2", "headline Chern number with dissipation", ac2);
    gate.check("AC3", "transition plateaus", ac3);
    gate.check("AC4", "transition sharpening", ac4);
    gate.check("AC5", "ramp-rate behaviour", ac5);
    gate.check("AC6", "oracle agreement", ac6);
    gate.check("AC7", "numerical hygiene", ac7);
    gate.check("AC8", "shot-noise statistics", ac8);
    println!("acceptance: {} of 8 criteria passed", 8 - gate.failed);
    if gate.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
