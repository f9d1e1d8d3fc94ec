//! Command-line front end: grid/overlap dumps, feature-map and transform
//! verification, model training, sampling and derivative export.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 I/O error,
//! 3 verification failure, 4 numerical failure.

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use qcheb::chebmath::{chebyshev_nodes, overlap_sq_formula};
use qcheb::dqgm::{
    self, AnsatzSpec, MapKind, ModelParams, TargetDistribution, TrainingConfig,
};
use qcheb::encodings;
use qcheb::error::{Error, Result};
use qcheb::qcht;
use qcheb::simcore::Gate;

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Directory used for default output filenames when `--out` is omitted.
const OUT_DIR_ENV: &str = "QCHEB_OUT_DIR";

#[derive(Parser)]
#[command(name = "qcheb", version, about = "Chebyshev-basis quantum model toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump the Chebyshev node grid as CSV (j, x).
    Nodes {
        #[arg(long)]
        qubits: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Squared-overlap sweep against a fixed node, CSV (x, overlap_sq).
    Overlap {
        #[arg(long)]
        qubits: usize,
        /// Index of the reference node x'.
        #[arg(long)]
        node: usize,
        /// Number of uniform sample points in (-1, 1).
        #[arg(long, default_value_t = 512)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Post-selected feature-map state at x, CSV (k, re, im).
    Featuremap {
        #[arg(long)]
        qubits: usize,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the transform circuit against its matrix oracle.
    QchtVerify {
        #[arg(long)]
        qubits: usize,
        /// Largest register the verifier accepts.
        #[arg(long, default_value_t = 8)]
        max_qubits: usize,
        /// Negative-path self test: perturb a gate and require detection.
        #[arg(long, default_value_t = false)]
        self_test_corrupt: bool,
    },
    /// Train a model from a JSON config; write model JSON and loss CSV.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        loss_out: Option<PathBuf>,
        /// Override the feature map in the config.
        #[arg(long)]
        map: Option<String>,
    },
    /// Sample a trained model in the computational basis.
    Sample {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        shots: u64,
        /// Extend the register to this many qubits before sampling.
        #[arg(long)]
        extend: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export model and target derivatives, CSV (x, dpdx_model, dpdx_target).
    Derivative {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 256)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// On-disk trained model: config echo plus the optimized angles.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    config: TrainingConfig,
    map: MapKind,
    ansatz: AnsatzSpec,
    theta: Vec<f64>,
    final_loss: f64,
}

impl ModelFile {
    fn params(&self) -> ModelParams {
        ModelParams { ansatz: self.ansatz, theta: self.theta.clone() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(match e {
                Error::Config(_) | Error::Usage(_) | Error::Domain(_) => 1u8,
                Error::Io(_) => 2,
                Error::Verification(_) | Error::Internal(_) => 3,
                Error::Numerical(_) => 4,
            })
        }
    }
}

fn out_path(explicit: Option<PathBuf>, default_name: &str) -> PathBuf {
    match explicit {
        Some(p) => p,
        None => match std::env::var_os(OUT_DIR_ENV) {
            Some(dir) => Path::new(&dir).join(default_name),
            None => PathBuf::from(default_name),
        },
    }
}

fn config_hash(tag: &str) -> String {
    let mut h = Sha256::new();
    h.update(tag.as_bytes());
    let digest = h.finalize();
    digest.iter().take(8).map(|b| format!("{:02x}", b)).collect()
}

fn write_csv(path: &Path, tag: &str, header: &str, rows: &[String]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "# qcheb v{} config={}", VERSION, config_hash(tag))?;
    writeln!(f, "{}", header)?;
    for row in rows {
        writeln!(f, "{}", row)?;
    }
    Ok(())
}

fn load_model(path: &Path) -> Result<ModelFile> {
    let text = std::fs::read_to_string(path)?;
    let model: ModelFile =
        serde_json::from_str(&text).map_err(|e| Error::Usage(format!("bad model file: {}", e)))?;
    if model.theta.len() != model.ansatz.param_count() {
        return Err(Error::Usage("model parameter count mismatch".into()));
    }
    Ok(model)
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Nodes { qubits, out } => {
            let grid = chebyshev_nodes(qubits)?;
            let rows: Vec<String> = grid
                .nodes()
                .iter()
                .enumerate()
                .map(|(j, x)| format!("{},{}", j, x))
                .collect();
            let path = out_path(out, "nodes.csv");
            write_csv(&path, &format!("nodes qubits={}", qubits), "j,x", &rows)?;
            println!("wrote {} rows to {}", rows.len(), path.display());
            Ok(())
        }
        Command::Overlap { qubits, node, points, out } => {
            let grid = chebyshev_nodes(qubits)?;
            if node >= grid.len() {
                return Err(Error::Usage(format!(
                    "node index {} out of range 0..{}",
                    node,
                    grid.len()
                )));
            }
            if points < 2 {
                return Err(Error::Usage("points must be >= 2".into()));
            }
            let xp = grid.node(node);
            let rows: Vec<String> = (0..points)
                .map(|i| {
                    let x = -1.0 + 2.0 * (i as f64 + 0.5) / points as f64;
                    Ok(format!("{},{}", x, overlap_sq_formula(qubits, xp, x)?))
                })
                .collect::<Result<_>>()?;
            let path = out_path(out, "overlap.csv");
            write_csv(
                &path,
                &format!("overlap qubits={} node={} points={}", qubits, node, points),
                "x,overlap_sq",
                &rows,
            )?;
            println!("wrote {} rows to {}", rows.len(), path.display());
            Ok(())
        }
        Command::Featuremap { qubits, x, out } => {
            let prepared = encodings::prepare_tau_tilde(qubits, x)?;
            let rows: Vec<String> = prepared
                .state
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(k, a)| format!("{},{},{}", k, a.re, a.im))
                .collect();
            let path = out_path(out, "featuremap.csv");
            write_csv(
                &path,
                &format!("featuremap qubits={} x={}", qubits, x),
                "k,re,im",
                &rows,
            )?;
            println!(
                "success_probability={} wrote {} rows to {}",
                prepared.success_probability,
                rows.len(),
                path.display()
            );
            Ok(())
        }
        Command::QchtVerify { qubits, max_qubits, self_test_corrupt } => {
            if qubits < 1 || qubits > max_qubits {
                return Err(Error::Usage(format!(
                    "qubits {} outside 1..={}",
                    qubits, max_qubits
                )));
            }
            let mut circ = qcht::qcht_circuit_unchecked(qubits)?;
            if self_test_corrupt {
                circ.push(Gate::p(1e-3, 1.min(qubits)));
            }
            let report = qcht::verify_circuit(qubits, &circ)?;
            println!(
                "max block deviation: {:.3e}\nmax ancilla leakage: {:.3e}",
                report.max_block_deviation, report.max_ancilla_leakage
            );
            if report.max_block_deviation > 1e-9 || report.max_ancilla_leakage > 1e-9 {
                return Err(Error::Verification(format!(
                    "transform deviates from oracle: block {:.3e}, leakage {:.3e}",
                    report.max_block_deviation, report.max_ancilla_leakage
                )));
            }
            println!("qcht circuit matches oracle within 1e-9");
            Ok(())
        }
        Command::Train { config, out, loss_out, map } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg: TrainingConfig = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("bad config: {}", e)))?;
            if let Some(m) = map {
                cfg.map = match m.as_str() {
                    "chebyshev" => MapKind::Chebyshev,
                    "phase" => MapKind::Phase,
                    other => {
                        return Err(Error::Usage(format!("unknown map '{}'", other)))
                    }
                };
            }
            let model = dqgm::train(&cfg)?;
            let file = ModelFile {
                config: cfg.clone(),
                map: model.map,
                ansatz: model.params.ansatz,
                theta: model.params.theta.clone(),
                final_loss: model.final_loss,
            };
            let model_path = out_path(out, "model.json");
            let json = serde_json::to_string_pretty(&file)
                .map_err(|e| Error::Internal(e.to_string()))?;
            std::fs::write(&model_path, json + "\n")?;

            let tag = serde_json::to_string(&cfg).map_err(|e| Error::Internal(e.to_string()))?;
            let rows: Vec<String> = model
                .loss_history
                .iter()
                .enumerate()
                .map(|(e, l)| format!("{},{}", e, l))
                .collect();
            let loss_path = out_path(loss_out, "loss.csv");
            write_csv(&loss_path, &tag, "epoch,loss", &rows)?;
            println!(
                "final loss {} after {} epochs; model at {}, losses at {}",
                model.final_loss,
                cfg.epochs,
                model_path.display(),
                loss_path.display()
            );
            Ok(())
        }
        Command::Sample { model, shots, extend, seed, out } => {
            let file = load_model(&model)?;
            if file.map != MapKind::Chebyshev {
                return Err(Error::Usage(
                    "sampling requires a chebyshev-map model".into(),
                ));
            }
            let rows_data = dqgm::sample_model(&file.params(), shots, extend, seed)?;
            let rows: Vec<String> = rows_data
                .iter()
                .map(|r| {
                    format!(
                        "{},{},{},{},{}",
                        r.index, r.x, r.count, r.frequency, r.analytic_prob
                    )
                })
                .collect();
            let tag = format!(
                "sample model={:?} shots={} extend={:?} seed={}",
                model, shots, extend, seed
            );
            let path = out_path(out, "samples.csv");
            write_csv(&path, &tag, "j,x_j,count,frequency,analytic_prob", &rows)?;
            println!("wrote {} rows to {}", rows.len(), path.display());
            Ok(())
        }
        Command::Derivative { model, points, out } => {
            let file = load_model(&model)?;
            if points < 2 {
                return Err(Error::Usage("points must be >= 2".into()));
            }
            let set = dqgm::build_training_set(&file.config)?;
            let c = set.norm_constant;
            let params = file.params();
            let rows: Vec<String> = (0..points)
                .map(|i| {
                    let x = match file.map {
                        MapKind::Chebyshev => -1.0 + 2.0 * (i as f64 + 0.5) / points as f64,
                        MapKind::Phase => (i as f64 + 0.5) / points as f64,
                    };
                    let d = dqgm::model_prob_dx(file.map, &params, x)?;
                    let t = c * target_density_dx(&file.config.target, x);
                    Ok(format!("{},{},{}", x, d, t))
                })
                .collect::<Result<_>>()?;
            let tag = format!("derivative model={:?} points={}", model, points);
            let path = out_path(out, "derivative.csv");
            write_csv(&path, &tag, "x,dpdx_model,dpdx_target", &rows)?;
            println!("wrote {} rows to {}", rows.len(), path.display());
            Ok(())
        }
    }
}

/// d/dx of the raw target density (unscaled).
fn target_density_dx(target: &TargetDistribution, x: f64) -> f64 {
    match *target {
        TargetDistribution::Linear => {
            if (0.0..=1.0).contains(&x) {
                1.0
            } else {
                0.0
            }
        }
        TargetDistribution::Lognormal { mu, sigma, t, s0 } => {
            if x <= 0.0 {
                return 0.0;
            }
            let arg = (x / s0).ln() + (mu - sigma * sigma / 2.0) * t;
            let var = sigma * sigma * t;
            -target.density(x) * (arg / var + 1.0) / x
        }
    }
}
