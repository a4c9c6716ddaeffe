use std::path::Path;

use pipeline::{
    interaction_audit, quantum_depth_audit, run_error_model, run_exact_small_batch, Mode, PipelineConfig, PipelineError,
};
use serde_json::json;

use crate::io::{Failure, Outcome, OutputDir};

pub const KEYS: &[(&str, &str)] = &[
    ("mode", "exact_small | error_model (required)"),
    ("architecture", "4d | 3d (default 4d; 3d needs gadget gb_prime)"),
    ("n", "wires (required; the CLI fills 1 when absent)"),
    ("k", "columns, at least 2 (required; the CLI fills 2 when absent)"),
    ("gadget", "gb | gb_prime (default gb)"),
    ("gadget_file", "path to a gadget JSON; default tile when absent"),
    ("distance", "surface-code distance per logical qubit: 1 or 3 for exact_small (default 1)"),
    ("noise", "object p_prep, p_layer, p_out; only p_out (readout flips) may be nonzero"),
    ("eps_t", "raw T-state infidelity (default 0)"),
    ("eps_y", "raw Y-state infidelity (default 0)"),
    ("distill", "distil and route magic states (default true)"),
    ("t_copies", "T distillation copies (default: T vertices + 1)"),
    ("y_copies", "Y distillation copies (default: T vertices + 1)"),
    ("p_f", "logical failure rate for error_model"),
    ("calibration", "object distance, flip_rate, trials: estimate p_f when p_f is absent"),
    ("eps_out", "magic-state error rate for error_model (default 0)"),
    ("magic_noise", "dephasing | depolarizing (default dephasing)"),
    ("decode_model", "independent | union_bound (default independent)"),
    ("shots", "runs (default 10000)"),
    ("seed", "master seed (default 0)"),
    ("cap", "largest statevector, in qubits (default 20)"),
    ("envelope_z", "standard deviations in the sampling envelope (default 5)"),
];

fn pipeline_failure(e: PipelineError) -> Failure {
    if e.is_config() {
        Failure::config(e)
    } else {
        Failure::runtime(e)
    }
}

pub fn run(cfg: &PipelineConfig, out: &Path) -> Outcome<()> {
    cfg.validate().map_err(pipeline_failure)?;
    let depth = quantum_depth_audit(cfg).map_err(pipeline_failure)?;
    match cfg.mode {
        Mode::ExactSmall => {
            let report = run_exact_small_batch(cfg, cfg.shots).map_err(pipeline_failure)?;
            if report.completed == 0 {
                return Err(Failure::Runtime(format!("all {} runs aborted: insufficient distillation successes", report.shots)));
            }
            let feedback = interaction_audit(&report.records).map_err(pipeline_failure)?;
            let dir = OutputDir::create(out, "pipeline", cfg, cfg.seed)?;
            dir.text("distribution.csv", |w| report.exact.write_csv(w))?;
            dir.text("empirical.csv", |w| report.empirical.write_csv(w))?;
            dir.text("empirical_raw.csv", |w| report.empirical_raw.write_csv(w))?;
            dir.jsonl("records.jsonl", &report.records)?;
            dir.json("depth.json", &depth)?;
            let mut body = serde_json::to_value(&report).map_err(Failure::runtime)?;
            body["feedback_audit"] = json!(feedback);
            body["depth_total"] = json!(depth.total);
            body["within_envelope"] = json!(report.l1_decoded <= report.envelope);
            dir.json("report.json", &body)
        }
        Mode::ErrorModel => {
            let report = run_error_model(cfg, cfg.shots).map_err(pipeline_failure)?;
            let feedback = interaction_audit(&report.records).map_err(pipeline_failure)?;
            let dir = OutputDir::create(out, "pipeline", cfg, cfg.seed)?;
            dir.text("distribution.csv", |w| report.exact.write_csv(w))?;
            dir.text("empirical.csv", |w| report.empirical.write_csv(w))?;
            if let Some(m) = &report.model {
                dir.text("model.csv", |w| m.write_csv(w))?;
            }
            dir.jsonl("records.jsonl", &report.records)?;
            dir.json("depth.json", &depth)?;
            let mut body = serde_json::to_value(&report).map_err(Failure::runtime)?;
            body["feedback_audit"] = json!(feedback);
            body["depth_total"] = json!(depth.total);
            dir.json("report.json", &body)
        }
    }
}
