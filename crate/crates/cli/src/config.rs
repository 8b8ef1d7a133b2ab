//! Experiment configuration: TOML parsing with per-experiment parameter
//! schemas and exhaustive validation messages.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    Fig2Squeeze,
    Fig34Tomography,
    Fig5Windows,
    Fig67Discrete,
    BsCalibration,
    RotCalibration,
    DispCalibration,
    QcstVerify,
    QgtVerify,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 9] = [
        ExperimentId::Fig2Squeeze,
        ExperimentId::Fig34Tomography,
        ExperimentId::Fig5Windows,
        ExperimentId::Fig67Discrete,
        ExperimentId::BsCalibration,
        ExperimentId::RotCalibration,
        ExperimentId::DispCalibration,
        ExperimentId::QcstVerify,
        ExperimentId::QgtVerify,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentId::Fig2Squeeze => "fig2-squeeze",
            ExperimentId::Fig34Tomography => "fig34-tomography",
            ExperimentId::Fig5Windows => "fig5-windows",
            ExperimentId::Fig67Discrete => "fig67-discrete",
            ExperimentId::BsCalibration => "bs-calibration",
            ExperimentId::RotCalibration => "rot-calibration",
            ExperimentId::DispCalibration => "disp-calibration",
            ExperimentId::QcstVerify => "qcst-verify",
            ExperimentId::QgtVerify => "qgt-verify",
        }
    }

    fn from_str(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|id| id.as_str() == s)
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn d_m_values() -> Vec<usize> {
    vec![256, 1024, 4096]
}
fn d_alphas() -> Vec<f64> {
    vec![2.0, 4.0, 8.0]
}
fn d_reps() -> usize {
    200
}
fn d_m_sweep() -> Vec<usize> {
    vec![256, 512, 1024, 2048, 4096, 8192]
}
fn d_trials_50() -> usize {
    50
}
fn d_gamma() -> usize {
    32
}
fn d_restarts() -> usize {
    2
}
fn d_radius() -> f64 {
    5.0
}
fn d_states() -> Vec<String> {
    vec!["fig3".into(), "coherent".into(), "superpos".into()]
}
fn d_window_n() -> usize {
    8
}
fn d_lambda() -> f64 {
    0.5
}
fn d_n_values() -> Vec<usize> {
    vec![16, 64]
}
fn d_n_lambda_values() -> Vec<f64> {
    vec![2.0, 5.0, 8.0, 11.0, 14.0, 17.0, 20.0, 23.0, 26.0]
}
fn d_cal_alphas() -> Vec<f64> {
    vec![2.0, 4.0, 8.0, 16.0]
}
fn d_cal_trials() -> usize {
    400
}
fn d_theta() -> f64 {
    0.7
}
fn d_phi() -> f64 {
    1.9
}
fn d_disp_alpha() -> [f64; 2] {
    [0.6, -0.3]
}
fn d_lambdas() -> Vec<f64> {
    vec![1.0, 2.0, 4.0, 8.0]
}
fn d_disp_trials() -> usize {
    100_000
}
fn d_dim16() -> usize {
    16
}
fn d_dim24() -> usize {
    24
}
fn d_extent() -> f64 {
    3.0
}
fn d_step() -> f64 {
    0.5
}
fn d_r() -> f64 {
    0.3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig2Params {
    #[serde(default = "d_m_values")]
    pub m_values: Vec<usize>,
    #[serde(default = "d_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "d_reps")]
    pub reps: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig34Params {
    #[serde(default = "d_m_sweep")]
    pub m_values: Vec<usize>,
    #[serde(default = "d_trials_50")]
    pub trials: usize,
    #[serde(default = "d_gamma")]
    pub gamma: usize,
    #[serde(default = "d_restarts")]
    pub restarts: usize,
    #[serde(default = "d_radius")]
    pub radius: f64,
    /// Subset of {fig3, coherent, superpos}.
    #[serde(default = "d_states")]
    pub states: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig5Params {
    #[serde(default = "d_window_n")]
    pub n: usize,
    #[serde(default = "d_lambda")]
    pub lambda: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig67Params {
    #[serde(default = "d_n_values")]
    pub n_values: Vec<usize>,
    /// Sweep positions expressed as Nλ (the p-grid spacing scale).
    #[serde(default = "d_n_lambda_values")]
    pub n_lambda_values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BsCalParams {
    #[serde(default = "d_cal_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "d_cal_trials")]
    pub trials: usize,
    #[serde(default = "d_theta")]
    pub theta: f64,
    #[serde(default = "d_phi")]
    pub phi: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotCalParams {
    #[serde(default = "d_cal_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "d_cal_trials")]
    pub trials: usize,
    #[serde(default = "d_theta")]
    pub theta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispCalParams {
    /// True displacement as [re, im].
    #[serde(default = "d_disp_alpha")]
    pub alpha: [f64; 2],
    #[serde(default = "d_lambdas")]
    pub lambdas: Vec<f64>,
    #[serde(default = "d_disp_trials")]
    pub trials: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QcstVerifyParams {
    #[serde(default = "d_dim16")]
    pub per_mode_dim: usize,
    #[serde(default = "d_extent")]
    pub grid_extent: f64,
    #[serde(default = "d_step")]
    pub grid_step: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QgtVerifyParams {
    #[serde(default = "d_dim24")]
    pub per_mode_dim: usize,
    #[serde(default = "d_r")]
    pub r: f64,
    #[serde(default = "d_extent")]
    pub grid_extent: f64,
    #[serde(default = "d_step")]
    pub grid_step: f64,
}

#[derive(Debug, Clone, Serialize)]
pub enum ExperimentParams {
    Fig2Squeeze(Fig2Params),
    Fig34Tomography(Fig34Params),
    Fig5Windows(Fig5Params),
    Fig67Discrete(Fig67Params),
    BsCalibration(BsCalParams),
    RotCalibration(RotCalParams),
    DispCalibration(DispCalParams),
    QcstVerify(QcstVerifyParams),
    QgtVerify(QgtVerifyParams),
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub params: ExperimentParams,
}

fn parse_params<T: serde::de::DeserializeOwned>(
    table: toml::Table,
    errors: &mut Vec<String>,
) -> Option<T> {
    match toml::Value::Table(table).try_into::<T>() {
        Ok(p) => Some(p),
        Err(e) => {
            errors.push(format!("params: {e}"));
            None
        }
    }
}

fn check_positive(name: &str, value: f64, errors: &mut Vec<String>) {
    if !(value > 0.0) || !value.is_finite() {
        errors.push(format!("params.{name}: must be positive and finite, got {value}"));
    }
}

fn check_nonempty<T>(name: &str, values: &[T], errors: &mut Vec<String>) {
    if values.is_empty() {
        errors.push(format!("params.{name}: must not be empty"));
    }
}

/// Parses and fully validates a config document, collecting every problem
/// rather than stopping at the first.
pub fn validate_config(text: &str) -> Result<ExperimentConfig, Vec<String>> {
    let table: toml::Table = match toml::from_str(text) {
        Ok(t) => t,
        Err(e) => return Err(vec![format!("TOML parse error: {e}")]),
    };

    let mut errors = Vec::new();
    for key in table.keys() {
        if !matches!(key.as_str(), "experiment" | "seed" | "output_dir" | "params") {
            errors.push(format!("unknown top-level key `{key}`"));
        }
    }

    let experiment = match table.get("experiment") {
        Some(toml::Value::String(s)) => match ExperimentId::from_str(s) {
            Some(id) => Some(id),
            None => {
                let valid: Vec<&str> = ExperimentId::ALL.iter().map(|i| i.as_str()).collect();
                errors.push(format!(
                    "unknown experiment id `{s}`; valid ids: {}",
                    valid.join(", ")
                ));
                None
            }
        },
        Some(_) => {
            errors.push("`experiment` must be a string".into());
            None
        }
        None => {
            errors.push("missing required key `experiment`".into());
            None
        }
    };

    let seed = match table.get("seed") {
        Some(toml::Value::Integer(i)) if *i >= 0 => *i as u64,
        Some(_) => {
            errors.push("`seed` must be a nonnegative integer".into());
            0
        }
        None => {
            errors.push("missing required key `seed`".into());
            0
        }
    };

    let output_dir = match table.get("output_dir") {
        Some(toml::Value::String(s)) if !s.is_empty() => PathBuf::from(s),
        Some(_) => {
            errors.push("`output_dir` must be a nonempty string".into());
            PathBuf::new()
        }
        None => {
            errors.push("missing required key `output_dir`".into());
            PathBuf::new()
        }
    };

    let params_table = match table.get("params") {
        Some(toml::Value::Table(t)) => t.clone(),
        Some(_) => {
            errors.push("`params` must be a table".into());
            toml::Table::new()
        }
        None => toml::Table::new(),
    };

    let params = experiment.and_then(|id| build_params(id, params_table, &mut errors));

    match (experiment, params) {
        (Some(experiment), Some(params)) if errors.is_empty() => Ok(ExperimentConfig {
            experiment,
            seed,
            output_dir,
            params,
        }),
        _ => Err(errors),
    }
}

fn build_params(
    id: ExperimentId,
    table: toml::Table,
    errors: &mut Vec<String>,
) -> Option<ExperimentParams> {
    match id {
        ExperimentId::Fig2Squeeze => {
            let p: Fig2Params = parse_params(table, errors)?;
            check_nonempty("m_values", &p.m_values, errors);
            check_nonempty("alphas", &p.alphas, errors);
            for &a in &p.alphas {
                check_positive("alphas[]", a, errors);
            }
            if p.reps == 0 {
                errors.push("params.reps: must be >= 1".into());
            }
            Some(ExperimentParams::Fig2Squeeze(p))
        }
        ExperimentId::Fig34Tomography => {
            let p: Fig34Params = parse_params(table, errors)?;
            check_nonempty("m_values", &p.m_values, errors);
            check_nonempty("states", &p.states, errors);
            for s in &p.states {
                if !matches!(s.as_str(), "fig3" | "coherent" | "superpos") {
                    errors.push(format!(
                        "params.states: unknown state `{s}`; valid: fig3, coherent, superpos"
                    ));
                }
            }
            if p.gamma == 0 {
                errors.push("params.gamma: must be >= 1".into());
            }
            if p.trials == 0 {
                errors.push("params.trials: must be >= 1".into());
            }
            check_positive("radius", p.radius, errors);
            Some(ExperimentParams::Fig34Tomography(p))
        }
        ExperimentId::Fig5Windows => {
            let p: Fig5Params = parse_params(table, errors)?;
            if p.n < 2 || !p.n.is_power_of_two() {
                errors.push(format!("params.n: must be a power of two >= 2, got {}", p.n));
            }
            check_positive("lambda", p.lambda, errors);
            Some(ExperimentParams::Fig5Windows(p))
        }
        ExperimentId::Fig67Discrete => {
            let p: Fig67Params = parse_params(table, errors)?;
            check_nonempty("n_values", &p.n_values, errors);
            check_nonempty("n_lambda_values", &p.n_lambda_values, errors);
            for &n in &p.n_values {
                if n < 2 || !n.is_power_of_two() {
                    errors.push(format!("params.n_values: must be powers of two >= 2, got {n}"));
                }
            }
            for &x in &p.n_lambda_values {
                check_positive("n_lambda_values[]", x, errors);
            }
            Some(ExperimentParams::Fig67Discrete(p))
        }
        ExperimentId::BsCalibration => {
            let p: BsCalParams = parse_params(table, errors)?;
            check_nonempty("alphas", &p.alphas, errors);
            if p.trials == 0 {
                errors.push("params.trials: must be >= 1".into());
            }
            Some(ExperimentParams::BsCalibration(p))
        }
        ExperimentId::RotCalibration => {
            let p: RotCalParams = parse_params(table, errors)?;
            check_nonempty("alphas", &p.alphas, errors);
            if p.trials == 0 {
                errors.push("params.trials: must be >= 1".into());
            }
            Some(ExperimentParams::RotCalibration(p))
        }
        ExperimentId::DispCalibration => {
            let p: DispCalParams = parse_params(table, errors)?;
            check_nonempty("lambdas", &p.lambdas, errors);
            for &l in &p.lambdas {
                check_positive("lambdas[]", l, errors);
            }
            if p.trials == 0 {
                errors.push("params.trials: must be >= 1".into());
            }
            Some(ExperimentParams::DispCalibration(p))
        }
        ExperimentId::QcstVerify => {
            let p: QcstVerifyParams = parse_params(table, errors)?;
            if p.per_mode_dim < 8 {
                errors.push("params.per_mode_dim: must be >= 8".into());
            }
            check_positive("grid_extent", p.grid_extent, errors);
            check_positive("grid_step", p.grid_step, errors);
            Some(ExperimentParams::QcstVerify(p))
        }
        ExperimentId::QgtVerify => {
            let p: QgtVerifyParams = parse_params(table, errors)?;
            if p.per_mode_dim < 16 {
                errors.push("params.per_mode_dim: must be >= 16".into());
            }
            check_positive("grid_extent", p.grid_extent, errors);
            check_positive("grid_step", p.grid_step, errors);
            Some(ExperimentParams::QgtVerify(p))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_valid_config() {
        let cfg = validate_config(
            "experiment = \"fig5-windows\"\nseed = 1\noutput_dir = \"out\"\n",
        )
        .unwrap();
        assert_eq!(cfg.experiment, ExperimentId::Fig5Windows);
        assert_eq!(cfg.seed, 1);
    }

    #[test]
    fn negative_lambda_single_error() {
        let errs = validate_config(
            "experiment = \"fig5-windows\"\nseed = 1\noutput_dir = \"out\"\n[params]\nlambda = -0.5\n",
        )
        .unwrap_err();
        assert_eq!(errs.len(), 1);
        assert!(errs[0].contains("lambda"));
    }

    #[test]
    fn unknown_id_lists_valid_ids() {
        let errs = validate_config(
            "experiment = \"bogus\"\nseed = 1\noutput_dir = \"out\"\n",
        )
        .unwrap_err();
        assert!(errs[0].contains("fig2-squeeze"));
        assert!(errs[0].contains("qgt-verify"));
    }

    #[test]
    fn multiple_errors_reported_individually() {
        let errs = validate_config(
            "experiment = \"fig2-squeeze\"\nbogus = 3\noutput_dir = \"\"\n[params]\nreps = 0\n",
        )
        .unwrap_err();
        assert!(errs.len() >= 3, "{errs:?}");
    }

    #[test]
    fn unknown_param_key_rejected() {
        let errs = validate_config(
            "experiment = \"fig5-windows\"\nseed = 1\noutput_dir = \"out\"\n[params]\nnn = 4\n",
        )
        .unwrap_err();
        assert!(errs[0].contains("nn"));
    }
}
