//! Command-line driver: config parsing and the run orchestration behind the
//! `bimeron` binary.
//!
//! A run is described by a key = value config file; command-line flags
//! (`--key value`) override file entries, and the fully resolved config is
//! embedded in every artifact for provenance. Exit codes: 0 success,
//! 1 operational error, 2 ran fine but a paper-bound audit failed.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::ansatz::{
    annulus_energy, cutoff_field_map, disk_energy_closed_form, offset_disk_energy,
    prototype_reduced_density, AnsatzParams,
};
use crate::energy::{energy_s2, EnergyParams};
use crate::error::{BimeronError, Result};
use crate::experiments::{
    bound_audit, conformal_sweep, core_radius, large_domain_sweep, neck_energy_profile,
    SweepRow, SWEEP_CSV_HEADER, SWEEP_SCHEMA,
};
use crate::grid::{make_grid, sample_field, DomainGrid, DomainKind};
use crate::io::{load_sphere_field, save_sidecar, save_sphere_field};
use crate::minimize::{minimize_s2, SolveConfig, StepRule};
use crate::quad::integrate_annulus;

const VALID_KEYS: &[&str] = &[
    "command", "domain", "n", "lambda", "eps", "a", "r_cut", "c_phase", "z0_x", "z0_y",
    "max_iters", "tol", "step", "degree_check_every", "seed", "out_dir", "field", "delta0",
    "lambda_list", "eps_list", "x_core_x", "x_core_y", "radii", "threads",
];

/// Resolved run configuration: a flat key -> value map with typed accessors.
#[derive(Debug, Clone)]
pub struct RunConfig {
    map: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn from_file_and_flags(path: Option<&Path>, flags: &[String]) -> Result<Self> {
        let mut map = BTreeMap::new();
        // defaults
        map.insert("domain".into(), "disk".into());
        map.insert("n".into(), "128".into());
        map.insert("lambda".into(), "0.5".into());
        map.insert("eps".into(), "0.2".into());
        map.insert("a".into(), "0.05".into());
        map.insert("r_cut".into(), "0.25".into());
        map.insert("c_phase".into(), "0".into());
        map.insert("z0_x".into(), "auto".into());
        map.insert("z0_y".into(), "auto".into());
        map.insert("max_iters".into(), "50000".into());
        map.insert("tol".into(), "0".into());
        map.insert("step".into(), "bb".into());
        map.insert("degree_check_every".into(), "100".into());
        map.insert("seed".into(), "0".into());
        map.insert("out_dir".into(), "out".into());
        map.insert("delta0".into(), "0.7".into());
        map.insert("threads".into(), "1".into());
        if let Some(p) = path {
            let text = std::fs::read_to_string(p)?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    BimeronError::Parse(format!("config line {}: expected key = value", lineno + 1))
                })?;
                insert_checked(&mut map, k.trim(), v.trim())?;
            }
        }
        let mut it = flags.iter();
        while let Some(flag) = it.next() {
            let key = flag.strip_prefix("--").ok_or_else(|| {
                BimeronError::Parse(format!("expected --key, got '{flag}'"))
            })?;
            let val = it
                .next()
                .ok_or_else(|| BimeronError::Parse(format!("flag --{key} needs a value")))?;
            insert_checked(&mut map, key, val)?;
        }
        Ok(RunConfig { map })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    fn f64_of(&self, key: &str) -> Result<f64> {
        let s = self
            .get(key)
            .ok_or_else(|| BimeronError::Parse(format!("missing key '{key}'")))?;
        if s == "inf" {
            return Ok(f64::INFINITY);
        }
        s.parse()
            .map_err(|_| BimeronError::Parse(format!("bad number for '{key}': '{s}'")))
    }

    fn usize_of(&self, key: &str) -> Result<usize> {
        self.get(key)
            .ok_or_else(|| BimeronError::Parse(format!("missing key '{key}'")))?
            .parse()
            .map_err(|_| BimeronError::Parse(format!("bad integer for '{key}'")))
    }

    fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        let s = self
            .get(key)
            .ok_or_else(|| BimeronError::Parse(format!("missing key '{key}'")))?;
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| BimeronError::Parse(format!("bad list entry '{t}' in '{key}'")))
            })
            .collect()
    }

    pub fn grid(&self) -> Result<Arc<DomainGrid>> {
        let kind: DomainKind = self
            .get("domain")
            .unwrap_or("disk")
            .parse()?;
        make_grid(kind, self.usize_of("n")?)
    }

    pub fn ansatz(&self, grid: &DomainGrid) -> Result<AnsatzParams> {
        let center = match grid.kind {
            DomainKind::Disk => [0.0, 0.0],
            DomainKind::Torus => [0.5, 0.5],
        };
        let zx = match self.get("z0_x") {
            Some("auto") | None => center[0],
            Some(s) => s
                .parse()
                .map_err(|_| BimeronError::Parse(format!("bad z0_x '{s}'")))?,
        };
        let zy = match self.get("z0_y") {
            Some("auto") | None => center[1],
            Some(s) => s
                .parse()
                .map_err(|_| BimeronError::Parse(format!("bad z0_y '{s}'")))?,
        };
        AnsatzParams::new(
            self.f64_of("a")?,
            self.f64_of("r_cut")?,
            self.f64_of("c_phase")?,
            [zx, zy],
        )
    }

    pub fn solve(&self) -> Result<SolveConfig> {
        let step = match self.get("step").unwrap_or("bb") {
            "bb" => StepRule::BarzilaiBorwein,
            s => {
                let tau: f64 = s.parse().map_err(|_| {
                    BimeronError::Parse(format!("step must be 'bb' or a number, got '{s}'"))
                })?;
                StepRule::FixedStep(tau)
            }
        };
        Ok(SolveConfig {
            max_iters: self.usize_of("max_iters")?,
            tol: self.f64_of("tol")?,
            step_rule: step,
            degree_check_every: self.usize_of("degree_check_every")?,
            seed: self.usize_of("seed")? as u64,
        })
    }

    pub fn provenance(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        for (k, v) in &self.map {
            m.insert(k.clone(), serde_json::Value::String(v.clone()));
        }
        serde_json::json!({ "schema": SWEEP_SCHEMA, "config": m })
    }

    fn out_dir(&self) -> Result<PathBuf> {
        let d = PathBuf::from(self.get("out_dir").unwrap_or("out"));
        std::fs::create_dir_all(&d)?;
        Ok(d)
    }
}

fn insert_checked(map: &mut BTreeMap<String, String>, key: &str, val: &str) -> Result<()> {
    if !VALID_KEYS.contains(&key) {
        return Err(BimeronError::Parse(format!(
            "unknown key '{key}'; valid keys: {}",
            VALID_KEYS.join(", ")
        )));
    }
    map.insert(key.to_string(), val.to_string());
    Ok(())
}

/// Run a subcommand; returns the process exit code.
pub fn run(command: &str, cfg: &RunConfig) -> Result<i32> {
    match command {
        "ansatz" => cmd_ansatz(cfg),
        "energy" => cmd_energy(cfg),
        "minimize" => cmd_minimize(cfg),
        "sweep-conformal" => cmd_sweep(cfg, true),
        "sweep-eps" => cmd_sweep(cfg, false),
        "verify" => cmd_verify(cfg),
        "neck" => cmd_neck(cfg),
        other => Err(BimeronError::Parse(format!(
            "unknown command '{other}'; commands: ansatz energy minimize sweep-conformal sweep-eps verify neck"
        ))),
    }
}

fn cmd_ansatz(cfg: &RunConfig) -> Result<i32> {
    let grid = cfg.grid()?;
    let p = cfg.ansatz(&grid)?;
    let phase = if grid.kind == DomainKind::Disk {
        Some(p.c_phase)
    } else {
        None
    };
    let field = sample_field(grid.clone(), |x, y| cutoff_field_map(x, y, &p), phase)?;
    let out = cfg.out_dir()?;
    let path = out.join("ansatz.field");
    save_sphere_field(&path, &field)?;
    save_sidecar(&path.with_extension("field.json"), &cfg.provenance())?;
    let params = EnergyParams::full_s2(cfg.f64_of("lambda")?, cfg.f64_of("eps")?)?;
    let brk = energy_s2(&field, &params)?;
    println!(
        "ansatz: {} n={} total={:.6} degree={} -> {}",
        grid.kind,
        grid.n,
        brk.total,
        brk.degree,
        path.display()
    );
    Ok(0)
}

fn cmd_energy(cfg: &RunConfig) -> Result<i32> {
    let field_path = cfg
        .get("field")
        .ok_or_else(|| BimeronError::Parse("energy needs field = <snapshot path>".into()))?;
    let field = load_sphere_field(Path::new(field_path))?;
    let params = EnergyParams::full_s2(cfg.f64_of("lambda")?, cfg.f64_of("eps")?)?;
    let brk = energy_s2(&field, &params)?;
    let out = cfg.out_dir()?;
    let path = out.join("energy.json");
    let doc = serde_json::json!({
        "provenance": cfg.provenance(),
        "breakdown": brk,
    });
    save_sidecar(&path, &doc)?;
    println!(
        "energy: total={:.9} exchange={:.9} dmi={:.9} anisotropy={:.9} degree={} ({:.6})",
        brk.total, brk.exchange, brk.dmi, brk.anisotropy, brk.degree, brk.degree_real
    );
    Ok(0)
}

fn cmd_minimize(cfg: &RunConfig) -> Result<i32> {
    let grid = cfg.grid()?;
    let p = cfg.ansatz(&grid)?;
    let phase = if grid.kind == DomainKind::Disk {
        Some(p.c_phase)
    } else {
        None
    };
    let init = sample_field(grid.clone(), |x, y| cutoff_field_map(x, y, &p), phase)?;
    let params = EnergyParams::full_s2(cfg.f64_of("lambda")?, cfg.f64_of("eps")?)?;
    let solve = cfg.solve()?;
    let (field, report) = minimize_s2(&init, &params, &solve)?;
    let out = cfg.out_dir()?;
    let fpath = out.join("minimized.field");
    save_sphere_field(&fpath, &field)?;
    let doc = serde_json::json!({
        "provenance": cfg.provenance(),
        "report": report,
    });
    save_sidecar(&out.join("minimize.json"), &doc)?;
    println!(
        "minimize: converged={} iters={} total={:.6} degree={} grad_sup={:.3e} escape={}",
        report.converged,
        report.iters,
        report.final_energy.total,
        report.final_energy.degree,
        report.final_energy.grad_sup,
        report.sector_escape
    );
    Ok(0)
}

fn cmd_sweep(cfg: &RunConfig, conformal: bool) -> Result<i32> {
    let grid = cfg.grid()?;
    let solve = cfg.solve()?;
    let delta0 = cfg.f64_of("delta0")?;
    let results = if conformal {
        let lambdas = cfg.f64_list("lambda_list")?;
        conformal_sweep(&lambdas, cfg.f64_of("eps")?, grid.clone(), &solve, delta0)
    } else {
        let epss = cfg.f64_list("eps_list")?;
        large_domain_sweep(cfg.f64_of("lambda")?, &epss, grid.clone(), &solve, delta0)
    };
    let out = cfg.out_dir()?;
    let mut rows: Vec<SweepRow> = Vec::new();
    let mut csv = format!("# {SWEEP_SCHEMA}\n{SWEEP_CSV_HEADER}\n");
    for (k, res) in results.into_iter().enumerate() {
        match res {
            Ok((row, field)) => {
                csv.push_str(&row.to_csv());
                csv.push('\n');
                let fp = out.join(format!("sweep_row{k}.field"));
                save_sphere_field(&fp, &field)?;
                rows.push(row);
            }
            Err(e) => {
                eprintln!("row {k} failed: {e}");
                csv.push_str(&format!("# row {k} error: {e}\n"));
            }
        }
    }
    let csv_path = out.join(if conformal {
        "sweep_conformal.csv"
    } else {
        "sweep_eps.csv"
    });
    std::fs::write(&csv_path, csv)?;
    let audit = bound_audit(&rows, grid.h);
    let doc = serde_json::json!({
        "provenance": cfg.provenance(),
        "audit": audit,
    });
    save_sidecar(&out.join("audit.json"), &doc)?;
    println!(
        "sweep: {} rows -> {}; audit {}",
        rows.len(),
        csv_path.display(),
        if audit.all_pass { "PASS" } else { "FAIL" }
    );
    Ok(if audit.all_pass { 0 } else { 2 })
}

/// Closed forms vs adaptive quadrature over a parameter matrix; prints the
/// worst relative error.
fn cmd_verify(_cfg: &RunConfig) -> Result<i32> {
    let tol = 1e-9;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for &r in &[0.25, 0.5, 1.0] {
        for &a in &[0.02, 0.05, 0.1] {
            for &(lambda, eps) in &[(0.0, f64::INFINITY), (0.3, 0.1), (0.5, 0.3)] {
                let cf = disk_energy_closed_form(r, a, lambda, eps)?;
                let q = integrate_annulus(
                    |x, y| prototype_reduced_density(x, y, a, lambda, eps),
                    [0.0, 0.0],
                    0.0,
                    r,
                    tol,
                );
                worst = worst.max(((q - cf) / cf).abs());
                count += 1;
            }
        }
    }
    for &(r, z0, a) in &[(1.0, 0.5, 0.2), (0.7, 0.3, 0.05), (0.5, 0.0, 0.1), (0.4, 0.35, 0.02)] {
        let cf = offset_disk_energy(r, z0, a)?;
        let q = integrate_annulus(
            |x, y| {
                let r2 = x * x + y * y;
                4.0 * a * a / ((r2 + a * a) * (r2 + a * a))
            },
            [z0, 0.0],
            0.0,
            r,
            tol,
        );
        worst = worst.max(((q - cf) / cf).abs());
        count += 1;
    }
    // annulus energy consistency: quadrature is finite and the cut-off total
    // stays above the closed-form disk part for lambda = 0
    let p = AnsatzParams::new(0.05, 0.25, 0.0, [0.0, 0.0])?;
    let ann = annulus_energy(&p, 0.0, f64::INFINITY, 1e-8);
    let ok = worst <= 1e-6 && ann.is_finite() && ann > 0.0;
    println!(
        "verify: {count} closed-form cases, max rel err = {worst:.3e}, annulus quad = {ann:.6} -> {}",
        if ok { "PASS" } else { "FAIL" }
    );
    Ok(if ok { 0 } else { 2 })
}

fn cmd_neck(cfg: &RunConfig) -> Result<i32> {
    let field_path = cfg
        .get("field")
        .ok_or_else(|| BimeronError::Parse("neck needs field = <snapshot path>".into()))?;
    let field = load_sphere_field(Path::new(field_path))?;
    let radii = cfg.f64_list("radii")?;
    let delta0 = cfg.f64_of("delta0")?;
    let eps = cfg.f64_of("eps")?;
    let core = core_radius(&field, eps, delta0)?;
    let rows = neck_energy_profile(&field, core.x_core, &radii)?;
    let out = cfg.out_dir()?;
    let doc = serde_json::json!({
        "provenance": cfg.provenance(),
        "core": core,
        "profile": rows,
    });
    save_sidecar(&out.join("neck.json"), &doc)?;
    println!(
        "neck: r_core={:.5} x_core=({:.4},{:.4}); {} annuli written",
        core.r_core,
        core.x_core[0],
        core.x_core[1],
        rows.len()
    );
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key_lists_valid_ones() {
        let err = RunConfig::from_file_and_flags(None, &["--bogus".into(), "1".into()]);
        match err {
            Err(BimeronError::Parse(msg)) => {
                assert!(msg.contains("unknown key 'bogus'"));
                assert!(msg.contains("lambda"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join("bimeron_cli_test");
        std::fs::create_dir_all(&dir).unwrap();
        let cfg_path = dir.join("run.cfg");
        std::fs::write(&cfg_path, "lambda = 0.3\nn = 64\n# comment\n").unwrap();
        let cfg = RunConfig::from_file_and_flags(
            Some(&cfg_path),
            &["--lambda".into(), "0.5".into()],
        )
        .unwrap();
        assert_eq!(cfg.get("lambda"), Some("0.5"));
        assert_eq!(cfg.get("n"), Some("64"));
    }
}
