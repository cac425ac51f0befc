use clap::{Args, Parser, Subcommand};
use fracture_core::scenario::{
    bundled, conjugate_on_slit, example_oscillating, example_transmission, golab_demo,
    midline_mesh, oracle_compare, run_scenario, simulate, ScenarioConfig, TransmissionParams,
};
use fracture_core::Result;
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Quasi-static anti-plane fracture on slit finite element meshes.
#[derive(Parser)]
#[command(name = "fracture", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Mesh size; accepts fractions such as `1/64`.
    #[arg(long, value_parser = parse_number)]
    h: Option<f64>,
}

#[derive(Args, Clone)]
struct ScenarioArgs {
    /// Scenario config (TOML) or the name of a bundled one.
    #[arg(default_value = "midline")]
    config: String,
    /// Comma-separated time steps, largest first; accepts fractions.
    #[arg(long, value_delimiter = ',', value_parser = parse_number)]
    deltas: Option<Vec<f64>>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write traces, reports, the final mesh and field.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Oscillating cracks with g = ±1: distance of u_n to x₂.
    ExampleOscillating {
        #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2, 4, 8, 16, 32])]
        ns: Vec<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Packed cracks with gaps e^-n: fitted transmission coefficient.
    ExampleTransmission {
        #[arg(long, value_delimiter = ',', default_values_t = [2u32, 3, 4, 5])]
        ns: Vec<u32>,
        #[arg(long)]
        no_tip_refinement: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Length semicontinuity with and without a component bound.
    GolabDemo {
        #[arg(long, value_delimiter = ',', default_values_t = [8u32, 16, 32, 64])]
        ns: Vec<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Policy-driven evolution against exhaustive search over the pool.
    OracleCompare {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Hausdorff distances between traces at several time steps.
    DeltaStudy {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Spread of the harmonic conjugate over an interior slit.
    Conjugate {
        #[arg(long, value_delimiter = ',', value_parser = parse_number, default_values_t = [0.0625, 0.03125])]
        hs: Vec<f64>,
        /// Grade the mesh towards the crack tips.
        #[arg(long)]
        graded: bool,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (
                a.trim().parse().map_err(|_| s.to_string())?,
                b.trim().parse().map_err(|_| s.to_string())?,
            );
            a / b
        }
        None => s
            .trim()
            .parse()
            .map_err(|_| format!("`{s}` is not a number"))?,
    };
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("`{s}` must be positive"))
    }
}

fn load(args: &ScenarioArgs, h: Option<f64>) -> Result<ScenarioConfig> {
    let mut cfg = if Path::new(&args.config).exists() {
        ScenarioConfig::load(Path::new(&args.config))?
    } else {
        bundled(&args.config)?
    };
    if let Some(h) = h {
        cfg.mesh.h = h;
    }
    if let Some(d) = &args.deltas {
        cfg.deltas = d.clone();
    }
    Ok(cfg)
}

fn save(dir: &Path, name: &str, value: &impl Serialize) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn save_csv(
    dir: &Path,
    name: &str,
    header: &str,
    rows: impl IntoIterator<Item = String>,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut f = fs::File::create(dir.join(name))?;
    writeln!(f, "{header}")?;
    for r in rows {
        writeln!(f, "{r}")?;
    }
    Ok(())
}

fn verdict(ok: bool, what: &str) -> bool {
    println!("{} {what}", if ok { "ok  " } else { "FAIL" });
    ok
}

fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Run { scenario, common } => {
            let cfg = load(&scenario, common.h)?;
            let report = run_scenario(&cfg, &common.out)?;
            for r in &report.runs {
                println!(
                    "delta {:<10} steps {:>3}  length {:.4}  omega {:.3e}  balance {:.3e}  flux {:.3e}",
                    r.delta, r.steps, r.final_length, r.omega_hat, r.max_balance_error_jump_free, r.max_flux_error_jump_free
                );
            }
            println!("jump times: {:?}", report.jump_times);
            println!("artifacts in {}", common.out.display());
            Ok(verdict(
                report.validations_passed,
                "structural invariants and a-priori bounds",
            ))
        }
        Command::ExampleOscillating { ns, common } => {
            let h = common.h.unwrap_or(1.0 / 128.0);
            let rows = example_oscillating(&ns, &midline_mesh(h))?;
            save(&common.out, "oscillating.json", &rows)?;
            save_csv(
                &common.out,
                "oscillating.csv",
                "n,l2_distance,crack_face_flux_rms,grad_x,grad_y,triangles",
                rows.iter().map(|r| {
                    format!(
                        "{},{},{},{},{},{}",
                        r.n,
                        r.l2_distance,
                        r.crack_face_flux_rms,
                        r.interior_gradient[0],
                        r.interior_gradient[1],
                        r.triangles
                    )
                }),
            )?;
            for r in &rows {
                println!(
                    "n {:>3}  |u - x2| {:.5}  crack flux {:.3e}  grad ({:.4}, {:.4})",
                    r.n,
                    r.l2_distance,
                    r.crack_face_flux_rms,
                    r.interior_gradient[0],
                    r.interior_gradient[1]
                );
            }
            Ok(verdict(
                rows.windows(2).all(|w| w[1].l2_distance < w[0].l2_distance),
                "distance to x2 decreases in n",
            ))
        }
        Command::ExampleTransmission {
            ns,
            no_tip_refinement,
            common,
        } => {
            let mut params = TransmissionParams {
                tip_refinement: !no_tip_refinement,
                ..TransmissionParams::default()
            };
            if let Some(h) = common.h {
                params.h = h;
            }
            let rows = example_transmission(&ns, &params)?;
            save(&common.out, "transmission.json", &rows)?;
            save_csv(
                &common.out,
                "transmission.csv",
                "n,gap,c_plus,c_minus,c,relative_error,triangles",
                rows.iter().map(|r| {
                    format!(
                        "{},{},{},{},{},{},{}",
                        r.n, r.gap, r.c_plus, r.c_minus, r.c, r.relative_error, r.triangles
                    )
                }),
            )?;
            for r in &rows {
                println!(
                    "n {:>2}  gap {:.3e}  c {:.4}  (c+ {:.4}, c- {:.4})  rel. error {:.3}",
                    r.n, r.gap, r.c, r.c_plus, r.c_minus, r.relative_error
                );
            }
            let signs = verdict(
                rows.iter().all(|r| r.signs_consistent),
                "jump and flux signs",
            );
            let trend = verdict(
                rows.len() < 2 || rows.last().unwrap().relative_error <= rows[0].relative_error,
                "error at the largest n does not exceed the error at the smallest",
            );
            Ok(signs && trend)
        }
        Command::GolabDemo { ns, common } => {
            let demo = golab_demo(&ns)?;
            save(&common.out, "golab.json", &demo)?;
            println!(
                "connected:   lengths {:?} limit {}",
                demo.connected.lengths, demo.connected.limit_length
            );
            println!(
                "oscillating: lengths {:?} limit {}",
                demo.oscillating.lengths, demo.oscillating.limit_length
            );
            let a = verdict(
                demo.connected.semicontinuous,
                "connected family is semicontinuous",
            );
            let b = verdict(
                !demo.oscillating.semicontinuous,
                "oscillating family is not",
            );
            Ok(a && b)
        }
        Command::OracleCompare { scenario, common } => {
            let cfg = load(&scenario, common.h)?;
            let s = cfg.build()?;
            let rows = oracle_compare(&s, &cfg.deltas)?;
            save(&common.out, "oracle.json", &rows)?;
            for r in &rows {
                println!(
                    "delta {:<10} steps {:>3}  identical {}  max |dE| {:.3e}",
                    r.delta, r.steps, r.identical, r.max_energy_difference
                );
            }
            Ok(verdict(
                rows.iter().all(|r| r.identical),
                "policy matches exhaustive search",
            ))
        }
        Command::DeltaStudy { scenario, common } => {
            let cfg = load(&scenario, common.h)?;
            let run = simulate(&cfg.build()?)?;
            save(&common.out, "delta_study.json", &run.study)?;
            for (trace, b) in run.traces.iter().zip(&run.balances) {
                println!("delta {:<10} omega {:.4e}", trace.delta, b.omega_hat);
            }
            for s in &run.study.samples {
                println!(
                    "t {:.4}  max d_H {:.4}  cauchy {}  jump {}",
                    s.t, s.max_distance, s.cauchy, s.jump
                );
            }
            let a = verdict(
                run.study.monotone.iter().all(|&m| m),
                "cracks grow monotonically for every delta",
            );
            let b = verdict(
                run.validations_passed(),
                "structural invariants and a-priori bounds",
            );
            Ok(a && b)
        }
        Command::Conjugate { hs, graded, common } => {
            let rows = conjugate_on_slit(&hs, graded)?;
            save(&common.out, "conjugate.json", &rows)?;
            for r in &rows {
                println!(
                    "h {:<10} spread {:.4e}  misfit {:.3e}  triangles {}",
                    r.h, r.spread, r.relative_misfit, r.triangles
                );
            }
            Ok(verdict(
                rows.windows(2).all(|w| w[1].spread < w[0].spread),
                "spread decreases under refinement",
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
