//! Batch front end: reads an instance file, dispatches to one library
//! operation, and emits a machine-readable report with all thresholds
//! echoed.
//!
//! Exit codes: 0 computed (the verdict may still be "not solvable"),
//! 2 validation error, 3 numerical failure. A report is written on 0 and 3.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;
use sha2::{Digest, Sha256};

use crate::criterion::{check_global, check_local, BlockReading, LocalProblem};
use crate::error::{Error, Result};
use crate::files::{
    self, global_verdict_info, lifting_data, lifting_from_data, line_path_data,
    local_report_info, structure_to_clusters, ErrorInfo, InstanceFile, LiftingData, ReportFile,
    ToleranceOverrides, VerificationInfo, SCHEMA_VERSION,
};
use crate::instance::LiftInstance;
use crate::jordan::{d_sequence, jordan_structure};
use crate::lift::{connect_similar, global_cyclic_lift, verify_lift};
use crate::projection::{in_spectral_ball, in_symmetrized_polydisc, project};
use crate::ToleranceConfig;

/// One CLI invocation.
#[derive(Debug, Clone)]
pub struct Options {
    pub command: Command,
    pub input: PathBuf,
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub tolerances: ToleranceOverrides,
    pub reading: Option<BlockReading>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Project,
    Membership,
    Jordan { matrix: usize },
    Dseq { matrix: usize },
    CheckLocal { node: usize },
    CheckGlobal,
    Lift,
    Connect { i: usize, j: usize },
    Verify { lifting: PathBuf },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Project => "project",
            Command::Membership => "membership",
            Command::Jordan { .. } => "jordan",
            Command::Dseq { .. } => "dseq",
            Command::CheckLocal { .. } => "check-local",
            Command::CheckGlobal => "check-global",
            Command::Lift => "lift",
            Command::Connect { .. } => "connect",
            Command::Verify { .. } => "verify",
        }
    }
}

/// Outcome of a run: the exit code, the report (present on codes 0 and 3),
/// and human-readable diagnostics for stderr.
#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub report: Option<ReportFile>,
    pub diagnostics: Vec<String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn check_index(name: &str, idx: usize, len: usize) -> Result<()> {
    if idx >= len {
        Err(Error::InvalidArgument(format!(
            "{name} index {idx} out of range (have {len})"
        )))
    } else {
        Ok(())
    }
}

struct Loaded {
    instance: LiftInstance,
    cfg: ToleranceConfig,
    reading: BlockReading,
    input_sha256: String,
}

fn load(opts: &Options) -> Result<Loaded> {
    let bytes = fs::read(&opts.input).map_err(|e| {
        Error::InvalidArgument(format!("cannot read {}: {e}", opts.input.display()))
    })?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Error::InvalidArgument("input is not UTF-8".into()))?;
    let file = InstanceFile::parse(&text)?;
    let instance = file.to_instance()?;
    let cfg = file.tolerance_config(&opts.tolerances)?;
    let reading = opts
        .reading
        .or(file.reading()?)
        .unwrap_or(BlockReading::Grouped);
    Ok(Loaded {
        instance,
        cfg,
        reading,
        input_sha256: sha256_hex(&bytes),
    })
}

fn run_command(opts: &Options, loaded: &Loaded) -> Result<(serde_json::Value, Option<String>)> {
    let instance = &loaded.instance;
    let cfg = &loaded.cfg;
    match &opts.command {
        Command::Project => {
            let points: Vec<Vec<_>> = instance
                .matrices()
                .iter()
                .map(|m| project(m).components().to_vec())
                .collect();
            Ok((json!({ "points": points }), None))
        }
        Command::Membership => {
            let mut entries = Vec::new();
            for m in instance.matrices() {
                let ball: files::MembershipInfo = in_spectral_ball(m)?.into();
                let poly: files::MembershipInfo =
                    in_symmetrized_polydisc(&project(m))?.into();
                entries.push(json!({
                    "spectral_ball": ball,
                    "symmetrized_polydisc": poly,
                }));
            }
            Ok((json!({ "matrices": entries }), None))
        }
        Command::Jordan { matrix } => {
            check_index("matrix", *matrix, instance.matrices().len())?;
            let s = jordan_structure(&instance.matrices()[*matrix], cfg)?;
            Ok((
                json!({
                    "matrix_index": matrix,
                    "cyclic": s.is_cyclic(),
                    "clusters": structure_to_clusters(&s),
                }),
                None,
            ))
        }
        Command::Dseq { matrix } => {
            check_index("matrix", *matrix, instance.matrices().len())?;
            let s = jordan_structure(&instance.matrices()[*matrix], cfg)?;
            let d = d_sequence(&s);
            Ok((
                json!({
                    "matrix_index": matrix,
                    "clusters": structure_to_clusters(&s),
                    "d_sequence": d.values(),
                }),
                None,
            ))
        }
        Command::CheckLocal { node } => {
            check_index("node", *node, instance.node_count())?;
            instance.validate_membership()?;
            let n = instance.dim();
            let problem = LocalProblem::new(
                instance.nodes()[*node],
                instance.matrices()[*node].clone(),
                instance.jets_at(*node, 2 * n + 2),
            )?;
            let report = check_local(&problem, loaded.reading, cfg)?;
            Ok((
                serde_json::to_value(local_report_info(*node, &report)).expect("serializable"),
                None,
            ))
        }
        Command::CheckGlobal => {
            let verdict = check_global(instance, loaded.reading, cfg)?;
            Ok((
                serde_json::to_value(global_verdict_info(&verdict)).expect("serializable"),
                None,
            ))
        }
        Command::Lift => {
            let lift = global_cyclic_lift(instance, cfg, opts.seed)?;
            let verification = verify_lift(&lift.map, instance, opts.samples, cfg.verify_tol)?;
            Ok((
                json!({
                    "lifting": lifting_data(&lift.map),
                    "verification": VerificationInfo::from(&verification),
                    "warnings": lift.warnings,
                }),
                None,
            ))
        }
        Command::Connect { i, j } => {
            check_index("matrix", *i, instance.matrices().len())?;
            check_index("matrix", *j, instance.matrices().len())?;
            let b = &instance.matrices()[*i];
            let target = &instance.matrices()[*j];
            let path = connect_similar(b, target, cfg, opts.seed)?;
            let endpoint_residual = path.endpoint(b)?.sub(target)?.norm_inf();
            Ok((
                json!({
                    "i": i,
                    "j": j,
                    "path": line_path_data(&path, endpoint_residual),
                }),
                None,
            ))
        }
        Command::Verify { lifting } => {
            let bytes = fs::read(lifting).map_err(|e| {
                Error::InvalidArgument(format!("cannot read {}: {e}", lifting.display()))
            })?;
            let sha = sha256_hex(&bytes);
            let text = String::from_utf8(bytes)
                .map_err(|_| Error::InvalidArgument("lifting file is not UTF-8".into()))?;
            let data = parse_lifting_payload(&text)?;
            let map = lifting_from_data(&data)?;
            if map.dim() != instance.dim() {
                return Err(Error::DimensionMismatch {
                    expected: instance.dim(),
                    got: map.dim(),
                });
            }
            let verification = verify_lift(&map, instance, opts.samples, cfg.verify_tol)?;
            Ok((
                serde_json::to_value(VerificationInfo::from(&verification))
                    .expect("serializable"),
                Some(sha),
            ))
        }
    }
}

/// Accepts either a bare lifting payload or a full report produced by the
/// `lift` command.
fn parse_lifting_payload(text: &str) -> Result<LiftingData> {
    if let Ok(data) = serde_json::from_str::<LiftingData>(text) {
        return Ok(data);
    }
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::InvalidArgument(format!("lifting parse error: {e}")))?;
    if let Some(inner) = value.get("payload").and_then(|p| p.get("lifting")) {
        return serde_json::from_value(inner.clone())
            .map_err(|e| Error::InvalidArgument(format!("lifting parse error: {e}")));
    }
    Err(Error::InvalidArgument(
        "lifting file carries neither a lifting payload nor a lift report".into(),
    ))
}

/// Executes one command; never panics on bad input.
pub fn execute(opts: &Options) -> RunOutcome {
    let started = Instant::now();
    let loaded = match load(opts) {
        Ok(l) => l,
        Err(e) => {
            return RunOutcome {
                exit_code: files::exit_code_for(&e),
                report: None,
                diagnostics: vec![format!("error [{}]: {e}", files::error_code(&e))],
            }
        }
    };

    let mut report = ReportFile {
        schema: SCHEMA_VERSION,
        command: opts.command.name().to_string(),
        input_sha256: loaded.input_sha256.clone(),
        lifting_sha256: None,
        seed: opts.seed,
        reading: loaded.reading.as_str().to_string(),
        thresholds: loaded.cfg,
        payload: serde_json::Value::Null,
        error: None,
        wall_ms: 0.0,
    };

    match run_command(opts, &loaded) {
        Ok((payload, lifting_sha)) => {
            report.payload = payload;
            report.lifting_sha256 = lifting_sha;
            report.wall_ms = started.elapsed().as_secs_f64() * 1e3;
            RunOutcome {
                exit_code: 0,
                report: Some(report),
                diagnostics: Vec::new(),
            }
        }
        Err(e) => {
            let code = files::exit_code_for(&e);
            let diag = format!("error [{}]: {e}", files::error_code(&e));
            if code == 3 {
                report.error = Some(ErrorInfo::from_error(&e));
                report.wall_ms = started.elapsed().as_secs_f64() * 1e3;
                RunOutcome {
                    exit_code: 3,
                    report: Some(report),
                    diagnostics: vec![diag],
                }
            } else {
                RunOutcome {
                    exit_code: code,
                    report: None,
                    diagnostics: vec![diag],
                }
            }
        }
    }
}

/// Serializes a report; the payload substring is deterministic for a fixed
/// (input, seed, version).
pub fn report_json(report: &ReportFile) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

/// Writes atomically: temp file in the target directory, then rename.
pub fn write_output(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut tmp = path.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    tmp.push(".tmp");
    let tmp_path = dir.join(tmp);
    fs::write(&tmp_path, contents)?;
    fs::rename(&tmp_path, path)
}
