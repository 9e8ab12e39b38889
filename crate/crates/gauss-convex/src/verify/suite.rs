//! The built-in verification suite and its machine-readable reports.

use serde::Serialize;

use crate::bodies::ConvexBody;
use crate::sampling::{Estimate, SamplingPlan};
use crate::special::symmetric_interval_halfwidth;
use crate::verify::threshold::linear_grid;
use crate::verify::{
    check_dilation_form, check_isoperimetric_profile, check_kkl_ingredient,
    check_kruskal_katona, check_margulis_russo, check_poincare, check_s_inequality_spot,
    check_sharp_threshold, check_slab_lower_bound, friedgut_average_with_budget, CheckResult,
    FriedgutBudget, Relation, Verdict,
};
use crate::Result;

/// A named member of the built-in suite.
pub struct SuiteBody {
    pub name: String,
    pub body: ConvexBody,
}

fn basis_vector(i: usize, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

/// Half-side of the cube with Gaussian volume 1/2 in dimension n.
pub fn cube_half_volume_side(n: usize) -> f64 {
    symmetric_interval_halfwidth((0.5f64).powf(1.0 / n as f64)).expect("mass in range")
}

/// Slabs, balls, cubes, rotated slabs and two-slab intersections across
/// n ∈ {2, 4, 8, 16}.
pub fn builtin_suite() -> Vec<SuiteBody> {
    let mut bodies = Vec::new();
    for (idx, &n) in [2usize, 4, 8, 16].iter().enumerate() {
        let e1 = basis_vector(0, n);
        let e2 = basis_vector(1, n);
        bodies.push(SuiteBody {
            name: format!("slab[n={n}]"),
            body: ConvexBody::slab(&e1, 1.0, n).unwrap(),
        });
        bodies.push(SuiteBody {
            name: format!("ball[n={n}]"),
            body: ConvexBody::ball((n as f64).sqrt(), n).unwrap(),
        });
        bodies.push(SuiteBody {
            name: format!("cube[n={n}]"),
            body: ConvexBody::cube(cube_half_volume_side(n), n).unwrap(),
        });
        let angle = 0.5 + 0.13 * idx as f64;
        let q = ConvexBody::rotation_in_plane(n, 0, n - 1, angle).unwrap();
        bodies.push(SuiteBody {
            name: format!("rotated_slab[n={n}]"),
            body: ConvexBody::linear_image(ConvexBody::slab(&e1, 1.0, n).unwrap(), q).unwrap(),
        });
        bodies.push(SuiteBody {
            name: format!("two_slabs[n={n}]"),
            body: ConvexBody::intersect(vec![
                ConvexBody::slab(&e1, 1.0, n).unwrap(),
                ConvexBody::slab(&e2, 1.0, n).unwrap(),
            ])
            .unwrap(),
        });
    }
    bodies
}

/// Options for the suite run; the defaults mirror the CLI defaults.
#[derive(Debug, Clone)]
pub struct SuiteOptions {
    /// Only run checks whose name contains one of these substrings.
    pub filter: Option<Vec<String>>,
    /// Include the threshold-curve comparison (the n=256 cube makes it the
    /// most expensive section).
    pub thresholds: bool,
    /// Include the averaging traces.
    pub friedgut: bool,
    /// Nested budget for the averaging traces.
    pub friedgut_budget: FriedgutBudget,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            filter: None,
            thresholds: true,
            friedgut: true,
            friedgut_budget: FriedgutBudget::default(),
        }
    }
}

/// Run the built-in suite. Deterministic per plan: every check derives its
/// substream from a fixed counter, and results arrive in a fixed order.
pub fn run_builtin_suite(plan: &SamplingPlan, options: &SuiteOptions) -> Result<Vec<CheckResult>> {
    let mut results = Vec::new();
    let mut tag = 0u64;
    let mut next = |base: &SamplingPlan| {
        tag += 1;
        base.substream(tag)
    };

    let wanted = |name: &str| -> bool {
        match &options.filter {
            None => true,
            Some(keys) => keys.iter().any(|k| name.contains(k.as_str())),
        }
    };

    for SuiteBody { name, body } in builtin_suite() {
        if wanted(&format!("margulis_russo[{}", body.label())) {
            results.push(check_margulis_russo(&body, 1.0, 1e-3, &next(plan))?);
        }
        if wanted(&format!("dilation_form[{}", body.label())) {
            results.push(check_dilation_form(&body, 1e-2, &next(plan))?);
        }
        if wanted(&format!("poincare[{}", body.label())) {
            results.push(check_poincare(&body, &next(plan))?);
        }
        if wanted(&format!("kkl_ingredient[{}", body.label())) {
            results.push(check_kkl_ingredient(&body, &next(plan))?);
        }
        if wanted(&format!("slab_lower_bound[{}", body.label())) {
            results.push(check_slab_lower_bound(&body, &next(plan))?);
        }
        for t in [1.25, 0.8] {
            if wanted(&format!("s_inequality[{}", body.label())) {
                results.push(check_s_inequality_spot(&body, t, &next(plan))?);
            }
        }
        let _ = name;
    }

    if wanted("gaussian_isoperimetric_profile") {
        results.push(check_isoperimetric_profile(10_000));
    }

    if wanted("kruskal_katona") {
        let n = 16;
        let slab = ConvexBody::slab(&basis_vector(0, n), 1.0, n).unwrap();
        let cube = ConvexBody::cube(cube_half_volume_side(n), n).unwrap();
        let r = (n as f64).sqrt();
        results.push(check_kruskal_katona(&slab, r, 0.01, &next(plan))?.check);
        results.push(check_kruskal_katona(&cube, r, 0.01, &next(plan))?.check);
    }

    if options.thresholds && wanted("threshold_width_order") {
        let eps = 0.1;
        let entries = vec![
            (
                "cube[n=256]".to_string(),
                ConvexBody::cube(cube_half_volume_side(256), 256).unwrap(),
                linear_grid(0.6, 1.6, 33),
            ),
            (
                "cube[n=16]".to_string(),
                ConvexBody::cube(cube_half_volume_side(16), 16).unwrap(),
                linear_grid(0.5, 2.0, 31),
            ),
            (
                "slab[n=2]".to_string(),
                ConvexBody::slab(&basis_vector(0, 2), 1.0, 2).unwrap(),
                linear_grid(0.4, 12.0, 59),
            ),
        ];
        let threshold_plan = next(plan).with_samples(plan.samples.min(1 << 16));
        let report = check_sharp_threshold(&entries, eps, &threshold_plan)?;
        results.extend(report.checks);
    }

    if options.friedgut && wanted("friedgut") {
        let slab8 = ConvexBody::slab(&basis_vector(0, 8), 1.0, 8).unwrap();
        let cross8 = ConvexBody::intersect(vec![
            ConvexBody::slab(&basis_vector(0, 8), 1.0, 8).unwrap(),
            ConvexBody::slab(&basis_vector(1, 8), 1.0, 8).unwrap(),
        ])
        .unwrap();
        let ball8 = ConvexBody::ball((8f64).sqrt(), 8).unwrap();
        for (body, eps, cap, expected_steps) in [
            (slab8, 0.01, 16usize, Some(1usize)),
            (cross8, 0.01, 16, Some(2)),
            (ball8, 0.25, 32, None),
        ] {
            let trace = friedgut_average_with_budget(
                &body,
                eps,
                cap,
                &next(plan),
                options.friedgut_budget,
            )?;
            let mut check = CheckResult::evaluate(
                format!("friedgut[{}, eps={eps}]", body.label()),
                trace.terminal_variance,
                Estimate::exact(eps),
                Relation::Le,
                crate::constants::SLACK_SIGMA * trace.terminal_variance.std_error,
            );
            if trace.verdict != Verdict::Pass || !trace.within_step_bound() {
                check.verdict = Verdict::Fail;
            }
            if let Some(want) = expected_steps {
                if trace.step_count() != want {
                    check.verdict = Verdict::Fail;
                }
            }
            results.push(check);
        }
    }

    Ok(results)
}

/// Report wrapper serialized to JSON.
#[derive(Debug, Serialize)]
struct Report<'a> {
    version: &'a str,
    results: &'a [CheckResult],
}

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// One CSV row per check, under a versioned header comment.
pub fn report_to_csv(results: &[CheckResult]) -> String {
    let mut out = String::new();
    out.push_str(&format!("# gauss-convex v{VERSION}\n"));
    out.push_str("name,lhs,lhs_se,rhs,rhs_se,relation,slack,verdict,seed,samples\n");
    for r in results {
        let relation = match r.relation {
            Relation::Ge => "ge",
            Relation::Le => "le",
            Relation::Eq => "eq",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            csv_escape(&r.name),
            r.lhs.value,
            r.lhs.std_error,
            r.rhs.value,
            r.rhs.std_error,
            relation,
            r.slack,
            r.verdict,
            r.lhs.seed,
            r.lhs.samples,
        ));
    }
    out
}

/// The same report as pretty JSON.
pub fn report_to_json(results: &[CheckResult]) -> String {
    serde_json::to_string_pretty(&Report {
        version: VERSION,
        results,
    })
    .expect("report serialization")
    + "\n"
}
