//! Certificate file format (JSON, format version "1").
//!
//! Floats are printed with 17 significant digits so every `f64` round-trips
//! exactly and output is byte-identical across runs. The decrease level `c1`
//! is `null` when the dynamics impose no decrease constraint.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use doa_core::bench::{by_name, cart_pole_closed_loop, Benchmark};
use doa_core::brs::Certificate;
use doa_core::initroa::{BindingConstraint, InitialRoaReport};
use doa_core::linalg::Matrix;
use doa_core::sets::{LevelDescriptor, LevelFunction};

use crate::error::CliError;

pub const FORMAT_VERSION: &str = "1";

#[derive(Serialize, Deserialize)]
pub struct CertificateFile {
    pub format_version: String,
    pub system: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gain: Option<Vec<f64>>,
    pub depth: usize,
    pub theta: LevelDescriptor,
    pub report: ReportData,
}

#[derive(Serialize, Deserialize)]
pub struct ReportData {
    pub jacobian: Matrix,
    pub q: Matrix,
    pub p: Matrix,
    pub region_radius: Vec<f64>,
    pub eta: Vec<f64>,
    pub epsilon: f64,
    pub d: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `null` means no decrease constraint (linear dynamics on the box).
    pub c1: Option<f64>,
    pub c2: f64,
    pub c: f64,
    pub lambda_min_p: f64,
    pub lambda_max_p: f64,
    pub binding: BindingConstraint,
}

impl CertificateFile {
    pub fn new(
        system: &str,
        gain: Option<Vec<f64>>,
        depth: usize,
        theta: &LevelFunction,
        report: &InitialRoaReport,
    ) -> Result<Self, CliError> {
        let theta = theta
            .descriptor()
            .ok_or_else(|| CliError::usage("safe-set function is not serializable"))?;
        Ok(Self {
            format_version: FORMAT_VERSION.to_string(),
            system: system.to_string(),
            gain,
            depth,
            theta,
            report: ReportData {
                jacobian: report.jacobian.clone(),
                q: report.q.clone(),
                p: report.p.clone(),
                region_radius: report.region.radius().to_vec(),
                eta: report.eta.clone(),
                epsilon: report.epsilon,
                d: report.d,
                alpha: report.alpha,
                beta: report.beta,
                c1: report.c1.is_finite().then_some(report.c1),
                c2: report.c2,
                c: report.c,
                lambda_min_p: report.lambda_min_p,
                lambda_max_p: report.lambda_max_p,
                binding: report.binding,
            },
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let file = std::fs::File::create(path)
            .map_err(|e| CliError::io(format!("cannot create {}: {e}", path.display())))?;
        let mut writer = std::io::BufWriter::new(file);
        let mut serializer = serde_json::Serializer::with_formatter(&mut writer, Float17Formatter);
        self.serialize(&mut serializer)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
        writer
            .write_all(b"\n")
            .and_then(|()| writer.flush())
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
        let file: CertificateFile = serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        if file.format_version != FORMAT_VERSION {
            return Err(CliError::usage(format!(
                "{}: unsupported format version '{}'",
                path.display(),
                file.format_version
            )));
        }
        Ok(file)
    }

    /// Rebuild the benchmark (system + safe set) this certificate refers to.
    pub fn benchmark(&self) -> Result<Benchmark, CliError> {
        match &self.gain {
            Some(gain) if self.system == "cart_pole" => {
                Ok(cart_pole_closed_loop(Some(Matrix::row_vector(gain)))?)
            }
            _ => Ok(by_name(&self.system)?),
        }
    }

    /// Reconstruct the runtime certificate at `depth` (falling back to the
    /// stored depth).
    pub fn certificate(&self, depth: Option<usize>) -> Result<Certificate, CliError> {
        let benchmark = self.benchmark()?;
        let theta = LevelFunction::from_descriptor(self.theta.clone())?;
        let v0 = LevelFunction::quadratic(self.report.p.clone(), self.report.c)?;
        Ok(Certificate::trusted(
            theta,
            v0,
            benchmark.system,
            depth.unwrap_or(self.depth),
        )?)
    }
}

/// JSON formatter that prints every float with 17 significant digits.
pub struct Float17Formatter;

impl serde_json::ser::Formatter for Float17Formatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serialize any value as compact JSON with 17-significant-digit floats.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut buffer = Vec::new();
    let mut serializer = serde_json::Serializer::with_formatter(&mut buffer, Float17Formatter);
    value
        .serialize(&mut serializer)
        .map_err(|e| CliError::io(format!("serialization failed: {e}")))?;
    String::from_utf8(buffer).map_err(|e| CliError::io(format!("serialization failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use doa_core::initroa::build_initial_roa;

    #[test]
    fn round_trip_preserves_verdicts() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};

        let bench = by_name("two_machine").unwrap();
        let report = build_initial_roa(
            bench.system.as_ref(),
            &bench.region,
            &Matrix::identity(2),
            0.01,
        )
        .unwrap();
        let file = CertificateFile::new("two_machine", None, 40, &bench.safe_set, &report).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cert.json");
        file.save(&path).unwrap();
        let reloaded = CertificateFile::load(&path).unwrap();

        let original =
            Certificate::from_report(bench.safe_set.clone(), report, bench.system.clone(), 40)
                .unwrap();
        let restored = reloaded.certificate(None).unwrap();

        let mut rng = StdRng::seed_from_u64(77);
        for _ in 0..100 {
            let x = [rng.gen_range(-1.2..1.2), rng.gen_range(-0.6..0.6)];
            assert_eq!(original.eval_vk(&x).unwrap(), restored.eval_vk(&x).unwrap());
            assert_eq!(
                original.member_vk(&x).unwrap(),
                restored.member_vk(&x).unwrap()
            );
        }
    }

    #[test]
    fn saved_bytes_are_deterministic() {
        let bench = by_name("two_machine").unwrap();
        let report = build_initial_roa(
            bench.system.as_ref(),
            &bench.region,
            &Matrix::identity(2),
            0.01,
        )
        .unwrap();
        let file = CertificateFile::new("two_machine", None, 0, &bench.safe_set, &report).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
        file.save(&a).unwrap();
        file.save(&b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }
}
