//! Artifact writers. Every number is formatted through Rust's
//! shortest-roundtrip float display, so identical runs produce identical
//! bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// Collects artifact files for one run directory and remembers what it
/// wrote, so the manifest can list exactly the files that exist.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root)
            .map_err(|e| CliError::Fault(format!("cannot create {}: {e}", root.display())))?;
        Ok(OutputDir { root: root.to_path_buf(), written: Vec::new() })
    }

    /// Files written so far, in write order.
    pub fn artifacts(&self) -> &[String] {
        &self.written
    }

    fn write_file(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.root.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| CliError::Fault(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(name.to_string());
        Ok(())
    }

    /// `trajectory.csv`: one loss value per epoch (or per optimizer
    /// evaluation for the bare circuit stage).
    pub fn write_trajectory(&mut self, losses: &[f64]) -> Result<(), CliError> {
        let mut text = String::from("epoch,loss\n");
        for (epoch, loss) in losses.iter().enumerate() {
            let _ = writeln!(text, "{epoch},{loss}");
        }
        self.write_file("trajectory.csv", &text)
    }

    /// `landscape.csv`: the trained network output over every bitstring,
    /// with a flag for strings the ansatz histogram observed.
    pub fn write_landscape(
        &mut self,
        n: usize,
        outputs: &[f64],
        observed: &[bool],
    ) -> Result<(), CliError> {
        let mut text = String::from("bitstring,network_output,observed_in_ansatz\n");
        for (s, (value, seen)) in outputs.iter().zip(observed).enumerate() {
            let bits = uvqnhe_core::bits::to_bitstring(s, n);
            let flag = i32::from(*seen);
            let _ = writeln!(text, "{bits},{value},{flag}");
        }
        self.write_file("landscape.csv", &text)
    }

    /// `sweep.csv`: one row per (shot count, trial). `model_sigma` is left
    /// empty when no closed-form forecast applies.
    pub fn write_sweep(&mut self, rows: &[SweepRow]) -> Result<(), CliError> {
        let mut text = String::from("shots,trial,final_energy,model_sigma,coverage_ok\n");
        for row in rows {
            let sigma = match row.model_sigma {
                Some(s) => s.to_string(),
                None => String::new(),
            };
            let _ = writeln!(
                text,
                "{},{},{},{},{}",
                row.shots,
                row.trial,
                row.final_energy,
                sigma,
                i32::from(row.coverage_ok)
            );
        }
        self.write_file("sweep.csv", &text)
    }

    /// `variance.csv`: forecast versus observed estimation-error variance
    /// per shot count.
    pub fn write_variance(&mut self, rows: &[VarianceRow]) -> Result<(), CliError> {
        let mut text = String::from("shots,model_var,empirical_var,gamma,delta\n");
        for row in rows {
            let _ = writeln!(
                text,
                "{},{},{},{},{}",
                row.shots, row.model_var, row.empirical_var, row.gamma, row.delta
            );
        }
        self.write_file("variance.csv", &text)
    }

    /// `manifest.json`, written last so its artifact list is complete.
    pub fn write_manifest<M: Serialize>(&mut self, manifest: &M) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(manifest)
            .map_err(|e| CliError::Fault(format!("manifest serialization: {e}")))?;
        text.push('\n');
        self.write_file("manifest.json", &text)
    }
}

pub struct SweepRow {
    pub shots: u64,
    pub trial: usize,
    pub final_energy: f64,
    pub model_sigma: Option<f64>,
    pub coverage_ok: bool,
}

pub struct VarianceRow {
    pub shots: u64,
    pub model_var: f64,
    pub empirical_var: f64,
    pub gamma: f64,
    pub delta: f64,
}
