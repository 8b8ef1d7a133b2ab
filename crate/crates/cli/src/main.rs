use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use qcst_core::fock::FockState;
use qcst_core::qcst::sample_husimi;
use qcst_core::sample::PhaseSampleSet;
use qcst_core::tomography::{mle_fit, MleConfig};

use qcst_lab::{run_experiment, validate_config, write_outputs};

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "qcst-lab", version, about = "Coherent state transform experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a TOML config file.
    Run { config: PathBuf },
    /// Validate a config file without running anything.
    Validate { config: PathBuf },
    /// Draw phase-space samples from the Q function of a pure state.
    Sample {
        /// State JSON: {"dim": d, "coeffs": [[re, im], ...]}.
        #[arg(long)]
        state: PathBuf,
        /// Number of samples.
        #[arg(long)]
        m: usize,
        #[arg(long)]
        seed: u64,
        /// Output CSV path (re,im rows).
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct a pure state from phase-space samples by maximum
    /// likelihood.
    Tomo {
        /// Input CSV of re,im samples.
        #[arg(long)]
        samples: PathBuf,
        /// Fock support of the reconstruction.
        #[arg(long)]
        gamma: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random restarts besides the moment-informed start.
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        /// Output JSON path.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    dim: usize,
    coeffs: Vec<[f64; 2]>,
}

fn load_state(path: &PathBuf) -> Result<FockState, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read state file {}: {e}", path.display()))?;
    let st: StateJson =
        serde_json::from_str(&text).map_err(|e| format!("invalid state JSON: {e}"))?;
    if st.coeffs.len() != st.dim {
        return Err(format!(
            "state declares dim {} but has {} coefficients",
            st.dim,
            st.coeffs.len()
        ));
    }
    let coeffs: Vec<Complex64> = st
        .coeffs
        .iter()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect();
    FockState::from_components(&coeffs).map_err(|e| format!("invalid state: {e}"))
}

fn cmd_run(config: PathBuf) -> u8 {
    let text = match std::fs::read_to_string(&config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read config {}: {e}", config.display());
            return EXIT_CONFIG;
        }
    };
    let cfg = match validate_config(&text) {
        Ok(c) => c,
        Err(errors) => {
            for err in &errors {
                eprintln!("config error: {err}");
            }
            return EXIT_CONFIG;
        }
    };
    let result = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("experiment failed: {e}");
            return EXIT_NUMERICAL;
        }
    };
    match write_outputs(&cfg, &result) {
        Ok(path) => {
            println!("wrote {} ({} rows)", path.display(), result.rows.len());
            0
        }
        Err(e) => {
            eprintln!("cannot write results: {e}");
            EXIT_NUMERICAL
        }
    }
}

fn cmd_validate(config: PathBuf) -> u8 {
    let text = match std::fs::read_to_string(&config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read config {}: {e}", config.display());
            return EXIT_CONFIG;
        }
    };
    match validate_config(&text) {
        Ok(cfg) => {
            println!("ok: experiment {} (seed {})", cfg.experiment, cfg.seed);
            0
        }
        Err(errors) => {
            for err in &errors {
                eprintln!("config error: {err}");
            }
            EXIT_CONFIG
        }
    }
}

fn cmd_sample(state: PathBuf, m: usize, seed: u64, out: PathBuf) -> u8 {
    let psi = match load_state(&state) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    };
    if m == 0 {
        eprintln!("--m must be >= 1");
        return EXIT_CONFIG;
    }
    let set = match sample_husimi(&psi, m, seed) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("sampling failed: {e}");
            return EXIT_NUMERICAL;
        }
    };
    match set.write_csv(&out) {
        Ok(()) => {
            println!("wrote {} ({} samples)", out.display(), set.len());
            0
        }
        Err(e) => {
            eprintln!("cannot write samples: {e}");
            EXIT_NUMERICAL
        }
    }
}

fn cmd_tomo(samples: PathBuf, gamma: usize, seed: u64, restarts: usize, out: PathBuf) -> u8 {
    let set = match PhaseSampleSet::read_csv(&samples) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("cannot read samples {}: {e}", samples.display());
            return EXIT_CONFIG;
        }
    };
    if gamma == 0 {
        eprintln!("--gamma must be >= 1");
        return EXIT_CONFIG;
    }
    let cfg = MleConfig { gamma, restarts, seed, ..MleConfig::default() };
    let rec = match mle_fit(&set.samples, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("reconstruction failed: {e}");
            return EXIT_NUMERICAL;
        }
    };
    let state = StateJson {
        dim: rec.psi_hat.dim(),
        coeffs: rec.psi_hat.coeffs().iter().map(|z| [z.re, z.im]).collect(),
    };
    let doc = serde_json::json!({
        "dim": state.dim,
        "coeffs": state.coeffs,
        "neg_log_likelihood": rec.neg_log_likelihood,
        "iterations": rec.iterations,
        "floor_hits": rec.floor_hits,
        "samples": set.len(),
    });
    match std::fs::write(&out, serde_json::to_string_pretty(&doc).unwrap()) {
        Ok(()) => {
            println!(
                "wrote {} (nll {:.6}, {} iterations)",
                out.display(),
                rec.neg_log_likelihood,
                rec.iterations
            );
            0
        }
        Err(e) => {
            eprintln!("cannot write reconstruction: {e}");
            EXIT_NUMERICAL
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config } => cmd_run(config),
        Command::Validate { config } => cmd_validate(config),
        Command::Sample { state, m, seed, out } => cmd_sample(state, m, seed, out),
        Command::Tomo { samples, gamma, seed, restarts, out } => {
            cmd_tomo(samples, gamma, seed, restarts, out)
        }
    };
    ExitCode::from(code)
}
