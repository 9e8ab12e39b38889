//! Deterministic CSV/JSON emission. Float fields use Rust's shortest
//! round-trip formatting, so a fixed seed reproduces files byte-for-byte.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use gauss_convex::influence::ShellDensity;
use gauss_convex::sampling::{Estimate, SamplingPlan};
use gauss_convex::verify::{AveragingTrace, ThresholdCurve};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
pub struct InfluenceRow {
    pub quantity: String,
    pub direction: Vec<f64>,
    pub estimate: Estimate,
}

/// One serializable document per subcommand; `csv` renders the same content
/// as the JSON form.
#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OutputDoc<'a> {
    Influence {
        version: &'a str,
        body: String,
        sigma: f64,
        seed: u64,
        samples: u64,
        rows: Vec<InfluenceRow>,
    },
    Threshold {
        version: &'a str,
        body: String,
        seed: u64,
        samples: u64,
        curve: &'a ThresholdCurve,
    },
    Shell {
        version: &'a str,
        body: String,
        seed: u64,
        samples: u64,
        radii: &'a [f64],
        estimates: &'a [Estimate],
    },
    Friedgut {
        version: &'a str,
        body: String,
        seed: u64,
        samples: u64,
        trace: &'a AveragingTrace,
    },
}

impl<'a> OutputDoc<'a> {
    pub fn influence(
        body: &str,
        sigma: f64,
        plan: &SamplingPlan,
        rows: Vec<InfluenceRow>,
    ) -> Self {
        OutputDoc::Influence {
            version: VERSION,
            body: body.to_string(),
            sigma,
            seed: plan.seed,
            samples: plan.samples,
            rows,
        }
    }

    pub fn threshold(body: &str, plan: &SamplingPlan, curve: &'a ThresholdCurve) -> Self {
        OutputDoc::Threshold {
            version: VERSION,
            body: body.to_string(),
            seed: plan.seed,
            samples: plan.samples,
            curve,
        }
    }

    pub fn shell(body: &str, plan: &SamplingPlan, sd: &'a ShellDensity) -> Self {
        OutputDoc::Shell {
            version: VERSION,
            body: body.to_string(),
            seed: plan.seed,
            samples: plan.samples,
            radii: &sd.radii,
            estimates: &sd.estimates,
        }
    }

    pub fn friedgut(body: &str, plan: &SamplingPlan, trace: &'a AveragingTrace) -> Self {
        OutputDoc::Friedgut {
            version: VERSION,
            body: body.to_string(),
            seed: plan.seed,
            samples: plan.samples,
            trace,
        }
    }

    fn to_csv(&self) -> String {
        let mut out = format!("# gauss-convex v{VERSION}\n");
        match self {
            OutputDoc::Influence {
                body,
                sigma,
                seed,
                samples,
                rows,
                ..
            } => {
                out.push_str(&format!("# body={} sigma={sigma}\n", csv_escape(body)));
                out.push_str("quantity,direction,value,se,seed,samples\n");
                for row in rows {
                    out.push_str(&format!(
                        "{},{},{},{},{seed},{samples}\n",
                        csv_escape(&row.quantity),
                        csv_escape(&join_vector(&row.direction)),
                        row.estimate.value,
                        row.estimate.std_error,
                    ));
                }
            }
            OutputDoc::Threshold {
                body,
                seed,
                samples,
                curve,
                ..
            } => {
                out.push_str(&format!("# body={}\n", csv_escape(body)));
                out.push_str("sigma,value,se,width,seed,samples\n");
                let width = curve
                    .width
                    .map(|w| w.to_string())
                    .unwrap_or_else(|| "unbracketed".to_string());
                for (sigma, est) in curve.sigmas.iter().zip(curve.estimates.iter()) {
                    out.push_str(&format!(
                        "{sigma},{},{},{width},{seed},{samples}\n",
                        est.value, est.std_error,
                    ));
                }
            }
            OutputDoc::Shell {
                body,
                seed,
                samples,
                radii,
                estimates,
                ..
            } => {
                out.push_str(&format!("# body={}\n", csv_escape(body)));
                out.push_str("radius,alpha,se,seed,samples\n");
                for (r, est) in radii.iter().zip(estimates.iter()) {
                    out.push_str(&format!(
                        "{r},{},{},{seed},{samples}\n",
                        est.value, est.std_error,
                    ));
                }
            }
            OutputDoc::Friedgut {
                body,
                seed,
                samples,
                trace,
                ..
            } => {
                out.push_str(&format!(
                    "# body={} eps={} verdict={} terminal_variance={}\n",
                    csv_escape(body),
                    trace.eps_target,
                    trace.verdict,
                    trace.terminal_variance.value,
                ));
                out.push_str(
                    "step,influence,influence_se,residual_variance,residual_variance_se,logconcave_bound,direction,seed,samples\n",
                );
                for (k, step) in trace.steps.iter().enumerate() {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{seed},{samples}\n",
                        k + 1,
                        step.influence.value,
                        step.influence.std_error,
                        step.residual_variance.value,
                        step.residual_variance.std_error,
                        step.logconcave_bound,
                        csv_escape(&join_vector(&step.direction)),
                    ));
                }
            }
        }
        out
    }
}

fn join_vector(v: &[f64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn write_output(doc: &OutputDoc, out: Option<&Path>, json: bool) -> Result<(), String> {
    let text = if json {
        serde_json::to_string_pretty(doc).map_err(|e| e.to_string())? + "\n"
    } else {
        doc.to_csv()
    };
    write_text(&text, out)
}

pub fn write_text(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string()),
    }
}
