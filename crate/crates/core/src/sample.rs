//! Phase-space sample sets with RNG provenance, plus the CSV/JSON file
//! formats shared by the CLI.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QcstError, Result};

/// Where a sample set came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleSource {
    AnalyticGaussian,
    Rejection,
    ExternalFile,
}

/// Ordered collection of complex phase-space samples α_j.
#[derive(Debug, Clone)]
pub struct PhaseSampleSet {
    pub samples: Vec<Complex64>,
    pub seed: u64,
    pub source: SampleSource,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    seed: u64,
    source: SampleSource,
    count: usize,
}

impl PhaseSampleSet {
    pub fn new(samples: Vec<Complex64>, seed: u64, source: SampleSource) -> Result<Self> {
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QcstError::NonFinite("phase-space sample".into()));
        }
        Ok(Self { samples, seed, source })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Writes `re,im` CSV rows plus a `<path>.meta.json` seed sidecar.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["re", "im"])?;
        for z in &self.samples {
            w.write_record([format!("{}", z.re), format!("{}", z.im)])?;
        }
        w.flush()?;
        let sidecar = Sidecar { seed: self.seed, source: self.source, count: self.samples.len() };
        let meta_path = sidecar_path(path);
        std::fs::write(meta_path, serde_json::to_string_pretty(&sidecar)?)?;
        Ok(())
    }

    /// Reads a `re,im` CSV; the sidecar is optional (seed 0, external tag
    /// when missing).
    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
        let mut samples = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let parse = |field: Option<&str>, name: &str| -> Result<f64> {
                field
                    .ok_or_else(|| QcstError::InvalidArgument(format!("missing {name} column")))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| QcstError::InvalidArgument(format!("bad {name} value: {e}")))
            };
            let re = parse(rec.get(0), "re")?;
            let im = parse(rec.get(1), "im")?;
            samples.push(Complex64::new(re, im));
        }
        let (seed, source) = match std::fs::read_to_string(sidecar_path(path)) {
            Ok(text) => {
                let sc: Sidecar = serde_json::from_str(&text)?;
                (sc.seed, sc.source)
            }
            Err(_) => (0, SampleSource::ExternalFile),
        };
        Self::new(samples, seed, source)
    }
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".meta.json");
    std::path::PathBuf::from(p)
}
