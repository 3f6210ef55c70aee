//! The CSV reports behind each CLI subcommand.
//!
//! Every table starts with a `#` block: the tool name and version, the
//! command, every resolved config key, then summary records. Numbers are
//! written with Rust's shortest round-trip formatting, so identical configs
//! give byte-identical output.

use std::fmt::Write as _;

use crate::chern::{
    chern_integrate, curvature_profile, plateau_averages, ramp_rate_sweep, run_tomography, transition_sweep,
    transition_width,
};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::oracle::{
    adiabatic_consistency, analytic_curvature, curvature_fd_derivative, curvature_fd_plaquette, lattice_chern,
};
use crate::scalar::{s_to_us, us_to_s};
use crate::VERSION;

/// One CSV table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    /// Empty for the primary table, otherwise a short suffix such as `map`.
    pub name: &'static str,
    pub text: String,
}

/// Tables plus the summary lines also printed to the terminal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub tables: Vec<Table>,
    pub summary: Vec<String>,
}

struct TableBuilder {
    text: String,
}

impl TableBuilder {
    fn new(command: &str, cfg: &ExperimentConfig, summary: &[String], columns: &[&str]) -> Self {
        let mut text = format!("# qubit-chern {VERSION}\n# command = {command}\n");
        text.push_str(&cfg.header());
        for line in summary {
            writeln!(text, "# {line}").unwrap();
        }
        text.push_str(&columns.join(","));
        text.push('\n');
        Self { text }
    }

    fn row(&mut self, values: &[String]) {
        self.text.push_str(&values.join(","));
        self.text.push('\n');
    }

    fn finish(self, name: &'static str) -> Table {
        Table {
            name,
            text: self.text,
        }
    }
}

fn num(x: f64) -> String {
    x.to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".to_string(), num)
}

/// Bloch vector at every tomography time of one ramp.
pub fn cmd_tomography(cfg: &ExperimentConfig) -> Result<Report> {
    let setup = cfg.setup()?;
    let points = run_tomography(&setup)?;
    let sampled = setup.shots.is_some();
    let summary = vec![format!("rows = {}", points.len())];
    let mut columns = vec!["t_meas_us", "theta", "sx", "sy", "sz"];
    if sampled {
        columns.extend(["sx_err", "sy_err", "sz_err"]);
    }
    let mut table = TableBuilder::new("tomography", cfg, &summary, &columns);
    for p in &points {
        let mut row = vec![
            num(s_to_us(p.t)),
            num(p.theta),
            num(p.bloch.x),
            num(p.bloch.y),
            num(p.bloch.z),
        ];
        if let Some(e) = p.error {
            row.extend([num(e.x), num(e.y), num(e.z)]);
        }
        table.row(&row);
    }
    Ok(Report {
        tables: vec![table.finish("")],
        summary,
    })
}

/// Curvature profile of one ramp and its Chern number.
pub fn cmd_chern(cfg: &ExperimentConfig) -> Result<Report> {
    let setup = cfg.setup()?;
    let points = run_tomography(&setup)?;
    let profile = curvature_profile(&setup, &points)?;
    let result = chern_integrate(&profile)?;
    let summary = vec![
        format!("c1_raw = {}", result.c1_raw),
        format!("c1_err = {}", result.c1_err),
        format!("c1_corrected = {}", result.c1_corrected),
        format!("quadrature = {}", result.quadrature.name()),
    ];
    let mut table = TableBuilder::new(
        "chern",
        cfg,
        &summary,
        &["t_meas_us", "theta", "sy", "f_est", "f_err", "f_adiabatic"],
    );
    for (p, s) in points.iter().zip(&profile.samples) {
        let adiabatic = analytic_curvature(&setup.params, s.theta).ok();
        table.row(&[
            num(s_to_us(p.t)),
            num(s.theta),
            num(p.bloch.y),
            num(s.f_est),
            num(s.f_err),
            opt(adiabatic),
        ]);
    }
    Ok(Report {
        tables: vec![table.finish("")],
        summary,
    })
}

/// Chern number against Δ₂/Δ₁, repeated for every transition ramp time.
///
/// The sweep runs over `delta2_ratios` and `delta2_ratios_fine` merged in
/// ascending order. Plateau averages use the `delta2_ratios` points only; the
/// width uses all of them. Ramp time `j`, sweep point `i` draws shots with
/// seed `mix_seed(mix_seed(seed, j), i)`.
pub fn cmd_transition(cfg: &ExperimentConfig) -> Result<Report> {
    let coarse = cfg.sweep("delta2_ratios", &cfg.delta2_ratios, false)?;
    let fine = &cfg.delta2_ratios_fine;
    if let Some(v) = fine.iter().find(|v| !v.is_finite()) {
        return Err(crate::error::Error::config(
            "delta2_ratios_fine",
            format!("invalid value {v}"),
        ));
    }
    let t_ramps = cfg.sweep("transition_t_ramps_us", &cfg.transition_t_ramps_us, true)?;
    let mut grid: Vec<(f64, bool)> = coarse.iter().map(|&r| (r, true)).collect();
    grid.extend(fine.iter().map(|&r| (r, false)));
    // Stable sort keeps the plateau-grid entry first among duplicates.
    grid.sort_by(|a, b| a.0.total_cmp(&b.0));
    grid.dedup_by(|later, kept| (later.0 - kept.0).abs() < 1e-12);
    let ratios: Vec<f64> = grid.iter().map(|g| g.0).collect();

    let mut summary = Vec::new();
    let mut rows = Vec::new();
    for (j, &t_us) in t_ramps.iter().enumerate() {
        let mut setup = cfg.setup_at(t_us)?;
        setup.shots = setup.shots.map(|s| s.for_point(j as u64));
        let points = transition_sweep(&ratios, &setup)?;
        let all: Vec<(f64, f64)> = points.iter().map(|p| (p.delta2_ratio, p.result.c1_raw)).collect();
        let plateau: Vec<(f64, f64)> = all
            .iter()
            .zip(&grid)
            .filter(|(_, g)| g.1)
            .map(|(p, _)| *p)
            .collect();
        let (below, above) = plateau_averages(&plateau);
        let width = transition_width(&all);
        summary.push(format!(
            "t_ramp_us = {t_us}: c1_below = {}, c1_above = {}, width = {}",
            opt(below),
            opt(above),
            opt(width)
        ));
        rows.extend(points.into_iter().zip(&grid).map(|(p, g)| (t_us, p, g.1)));
    }
    let mut table = TableBuilder::new(
        "transition",
        cfg,
        &summary,
        &[
            "t_ramp_us",
            "delta2_over_delta1",
            "c1",
            "c1_err",
            "c1_corrected",
            "plateau_grid",
        ],
    );
    for (t_us, p, on_grid) in rows {
        table.row(&[
            num(t_us),
            num(p.delta2_ratio),
            num(p.result.c1_raw),
            num(p.result.c1_err),
            num(p.result.c1_corrected),
            u8::from(on_grid).to_string(),
        ]);
    }
    Ok(Report {
        tables: vec![table.finish("")],
        summary,
    })
}

/// Chern number against ramp time (primary table) and the curvature map
/// over θ and ramp time (`map` table).
pub fn cmd_ramprate(cfg: &ExperimentConfig) -> Result<Report> {
    let t_us = cfg.sweep("ramp_t_ramps_us", &cfg.ramp_t_ramps_us, true)?;
    let setup = cfg.setup()?;
    let t_ramps: Vec<f64> = t_us.iter().map(|&t| us_to_s(t)).collect();
    let points = ramp_rate_sweep(&t_ramps, &setup)?;
    let min_c1 = points
        .iter()
        .map(|p| p.result.c1_corrected)
        .fold(f64::INFINITY, f64::min);
    let summary = vec![
        format!("points = {}", points.len()),
        format!("min_c1_corrected = {min_c1}"),
    ];
    let mut c1 = TableBuilder::new(
        "ramp-rate",
        cfg,
        &summary,
        &["t_ramp_us", "c1", "c1_err", "c1_corrected"],
    );
    let mut map = TableBuilder::new(
        "ramp-rate",
        cfg,
        &summary,
        &["t_ramp_us", "theta", "f_est", "f_err"],
    );
    for (&t, p) in t_us.iter().zip(&points) {
        c1.row(&[
            num(t),
            num(p.result.c1_raw),
            num(p.result.c1_err),
            num(p.result.c1_corrected),
        ]);
        for s in &p.profile.samples {
            map.row(&[num(t), num(s.theta), num(s.f_est), num(s.f_err)]);
        }
    }
    Ok(Report {
        tables: vec![c1.finish(""), map.finish("map")],
        summary,
    })
}

/// Ground truth for the configured manifold: curvature table (primary),
/// lattice Chern number (summary) and the adiabatic-consistency report
/// (`consistency` table).
pub fn cmd_oracle(cfg: &ExperimentConfig) -> Result<Report> {
    let params = cfg.manifold()?;
    let grid = cfg.lattice()?;
    let n = cfg.oracle_points;
    if n < 2 {
        return Err(crate::error::Error::config("oracle_points", "need at least 2"));
    }
    let t_us = cfg.sweep("oracle_t_ramps_us", &cfg.oracle_t_ramps_us, true)?;
    let chern = lattice_chern(&params, &grid)?;
    let t_ramps: Vec<f64> = t_us.iter().map(|&t| us_to_s(t)).collect();
    let report = adiabatic_consistency(&params, &t_ramps, cfg.theta_points)?;
    let summary = vec![
        format!("lattice_chern = {chern}"),
        format!("lattice = {}x{}", grid.n_theta, grid.n_phi),
        format!("decay_exponent = {}", report.decay_exponent),
        format!("monotone = {}", report.monotone),
    ];
    let mut curv = TableBuilder::new(
        "oracle",
        cfg,
        &summary,
        &["theta", "f_analytic", "f_derivative", "f_plaquette"],
    );
    for theta in crate::chern::uniform_thetas::<f64>(n) {
        curv.row(&[
            num(theta),
            num(analytic_curvature(&params, theta)?),
            num(curvature_fd_derivative(&params, theta, params.phi, 1e-5)?),
            num(curvature_fd_plaquette(&params, theta, params.phi, 1e-3)?),
        ]);
    }
    let mut cons = TableBuilder::new("oracle", cfg, &summary, &["t_ramp_us", "max_deviation", "c1"]);
    for row in &report.rows {
        cons.row(&[num(s_to_us(row.t_ramp)), num(row.max_deviation), num(row.c1)]);
    }
    Ok(Report {
        tables: vec![curv.finish(""), cons.finish("consistency")],
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn columns(table: &Table) -> Vec<&str> {
        table
            .text
            .lines()
            .find(|l| !l.starts_with('#'))
            .unwrap()
            .split(',')
            .collect()
    }

    fn rows(table: &Table) -> Vec<Vec<f64>> {
        table
            .text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .skip(1)
            .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
            .collect()
    }

    #[test]
    fn header_records_version_and_config() {
        let cfg = ExperimentConfig {
            theta_points: crate::chern::ThetaPoints::Fixed(51),
            ..Default::default()
        };
        let report = cmd_tomography(&cfg).unwrap();
        let text = &report.tables[0].text;
        assert!(text.starts_with(&format!("# qubit-chern {VERSION}\n# command = tomography\n")));
        assert!(text.contains("# t2_star_us = 9\n"));
        assert_eq!(rows(&report.tables[0]).len(), 51);
        assert_eq!(
            columns(&report.tables[0]),
            ["t_meas_us", "theta", "sx", "sy", "sz"]
        );
    }

    #[test]
    fn sampled_tomography_has_error_columns() {
        let cfg = ExperimentConfig {
            shots: Some(100),
            ..Default::default()
        };
        let report = cmd_tomography(&cfg).unwrap();
        assert_eq!(columns(&report.tables[0]).len(), 8);
    }

    #[test]
    fn oracle_sphere_column_is_half_sine() {
        let cfg = ExperimentConfig {
            delta1_mhz: 10.0,
            delta2_mhz: 0.0,
            oracle_t_ramps_us: vec![1.0],
            lattice_size: 16,
            ..Default::default()
        };
        let report = cmd_oracle(&cfg).unwrap();
        assert!(report.summary.contains(&"lattice_chern = 1".to_string()));
        for r in rows(&report.tables[0]) {
            assert!((r[1] - 0.5 * r[0].sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_refuses_degenerate_manifold() {
        let cfg = ExperimentConfig {
            delta2_mhz: 30.0,
            ..Default::default()
        };
        assert!(matches!(cmd_oracle(&cfg), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn empty_sweeps_are_errors() {
        let mut cfg = ExperimentConfig::default();
        cfg.delta2_ratios.clear();
        assert_eq!(cmd_transition(&cfg), Err(Error::EmptySweep("delta2_ratios")));
        cfg.ramp_t_ramps_us.clear();
        assert!(cmd_ramprate(&cfg).is_err());
    }

    #[test]
    fn single_value_ramp_sweep_is_valid() {
        let cfg = ExperimentConfig {
            ramp_t_ramps_us: vec![0.5],
            ..Default::default()
        };
        let report = cmd_ramprate(&cfg).unwrap();
        assert_eq!(rows(&report.tables[0]).len(), 1);
        assert_eq!(report.tables[1].name, "map");
        assert!(rows(&report.tables[1]).len() >= 51);
    }
}
