//! `dicke`: parameter scans, RWA reports and exact simulations of the
//! frequency-modulated Dicke model.
//!
//! Exit codes: 0 success, 1 internal failure, 2 configuration error,
//! 3 invalid effective model at a requested point, 4 Fock truncation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use dicke_core::scan::{run, Command, Document, Format, Output, ScanConfig, SidebandOverride};
use dicke_core::Error;
use serde_json::json;

#[derive(Debug, Parser)]
#[command(name = "dicke", version, about = "Scans and reports for the frequency-modulated Dicke model")]
struct Args {
    /// critical-scan | coupling-scan | phase-diagram | spectrum-scan |
    /// trajectory | validate-rwa | exact-sim. Falls back to the config's
    /// `command` field.
    command: Option<String>,

    /// JSON config; flags below override its fields.
    #[arg(long, env = "DICKE_CONFIG")]
    config: Option<PathBuf>,

    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long = "omega-c-prime")]
    omega_c_prime: Option<f64>,
    #[arg(long)]
    g0: Option<f64>,
    #[arg(long)]
    chi: Option<f64>,
    #[arg(long = "n-qubits")]
    n_qubits: Option<u32>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    xi: Option<f64>,
    /// `a` or `a:b:n`
    #[arg(long = "nu-range")]
    nu_range: Option<String>,
    #[arg(long = "xi-range")]
    xi_range: Option<String>,
    /// Rotating coupling over its critical value, `a` or `a:b:n`.
    #[arg(long = "lr-range")]
    lr_range: Option<String>,
    /// Counter-rotating coupling over its critical value.
    #[arg(long = "lcr-range")]
    lcr_range: Option<String>,
    #[arg(long)]
    threshold: Option<f64>,
    /// Force the rotating sideband index (needs --m0 too).
    #[arg(long, requires = "m0", allow_hyphen_values = true)]
    n0: Option<i32>,
    #[arg(long, requires = "n0", allow_hyphen_values = true)]
    m0: Option<i32>,
    /// Include the exact simulation in validate-rwa.
    #[arg(long = "run-sim")]
    run_sim: bool,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_config(args: &Args) -> Result<ScanConfig, Error> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            ScanConfig::from_json(&text)?
        }
        None => ScanConfig::default(),
    };
    macro_rules! set {
        ($($field:ident),*) => {
            $(if let Some(v) = args.$field.clone() { cfg.$field = v; })*
        };
    }
    set!(omega0, omega_c_prime, g0, chi, n_qubits, nu, xi, threshold);
    macro_rules! set_opt {
        ($($field:ident),*) => {
            $(if let Some(v) = args.$field.clone() { cfg.$field = Some(v); })*
        };
    }
    set_opt!(nu_range, xi_range, lr_range, lcr_range);
    if let (Some(n0), Some(m0)) = (args.n0, args.m0) {
        cfg.sidebands = Some(SidebandOverride { n0, m0 });
    }
    if args.run_sim {
        cfg.run_sim = true;
    }
    if let Some(f) = &args.format {
        cfg.format = f.parse::<Format>()?;
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.display().to_string());
    }
    if let Some(c) = &args.command {
        cfg.command = Some(c.parse()?);
    }
    Ok(cfg)
}

fn extension(doc: &Document, format: Format) -> &'static str {
    match (doc, format) {
        (Document::Table(_), Format::Csv) => "csv",
        _ => "json",
    }
}

/// `runs/traj.csv` + `boundaries` -> `runs/traj.boundaries.csv`
fn companion_path(out: &Path, name: &str, ext: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.{name}.{ext}"))
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    out.with_file_name(name)
}

fn write_output(command: Command, cfg: &ScanConfig, output: &Output, started: Instant) -> Result<(), Error> {
    match &cfg.out {
        None => {
            print!("{}", output.primary.render(cfg.format));
            for (_, doc) in &output.companions {
                println!();
                print!("{}", doc.render(cfg.format));
            }
        }
        Some(out) => {
            let out = Path::new(out);
            std::fs::write(out, output.primary.render(cfg.format))?;
            let mut companions = Vec::new();
            for (name, doc) in &output.companions {
                let path = companion_path(out, name, extension(doc, cfg.format));
                std::fs::write(&path, doc.render(cfg.format))?;
                companions.push(path.display().to_string());
            }
            let meta = json!({
                "tool": "dicke",
                "version": env!("CARGO_PKG_VERSION"),
                "command": command.name(),
                "config": cfg,
                "companions": companions,
                "wall_time_s": started.elapsed().as_secs_f64(),
            });
            let mut text = serde_json::to_string_pretty(&meta)?;
            text.push('\n');
            std::fs::write(sidecar_path(out), text)?;
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::Json(_) => 2,
        Error::InvalidRegime(_) => 3,
        Error::Truncation { .. } => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let started = Instant::now();
    let args = Args::parse();
    let result = load_config(&args).and_then(|cfg| {
        let command = cfg
            .command
            .ok_or_else(|| Error::Config("no command given on the command line or in the config".into()))?;
        let output = run(command, &cfg)?;
        write_output(command, &cfg, &output, started)?;
        Ok(output.invalid_regime)
    });
    match result {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(msg)) => {
            eprintln!("dicke: {msg}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("dicke: {e}");
            if let Error::Truncation { .. } = e {
                eprintln!("dicke: increase sim.fock_dim and rerun");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
