//! Executable verification: each theorem-shaped statement becomes a check
//! that estimates both sides with honest uncertainties and compares them
//! under the crate-wide slack convention (3 × the summed standard errors,
//! plus any discretization allowance the check itself introduces).
//!
//! Checks never share mutable state and are deterministic per seed, so a
//! report is reproducible byte-for-byte.

mod checks;
mod friedgut;
mod suite;
mod threshold;

pub use checks::{
    check_dilation_form, check_isoperimetric_profile, check_kkl_chain, check_kkl_ingredient,
    check_kruskal_katona, check_margulis_russo, check_poincare, check_s_inequality_spot,
    check_slab_lower_bound, KruskalKatonaReport,
};
pub use friedgut::{
    friedgut_average, friedgut_average_with_budget, AveragingStep, AveragingTrace, FriedgutBudget,
};
pub use suite::{
    builtin_suite, cube_half_volume_side, report_to_csv, report_to_json, run_builtin_suite,
    SuiteBody, SuiteOptions,
};
pub use threshold::{
    check_sharp_threshold, curve_matches_closed_form, linear_grid, threshold_curve,
    ThresholdCurve, ThresholdReport,
};

use serde::Serialize;

use crate::sampling::Estimate;

/// Outcome of a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// The check could not be decided (precondition unmet, transition not
    /// bracketed, ...), as opposed to being violated.
    Inconclusive,
}

/// The declared direction of a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// lhs ≥ rhs − slack
    Ge,
    /// lhs ≤ rhs + slack
    Le,
    /// |lhs − rhs| ≤ slack
    Eq,
}

/// One verified statement: both sides, the statistical margin used, and the
/// verdict that comparison produced.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub lhs: Estimate,
    pub rhs: Estimate,
    pub relation: Relation,
    pub slack: f64,
    pub verdict: Verdict,
}

impl CheckResult {
    /// Compare and record. The verdict is pass iff the relation holds within
    /// the slack.
    pub fn evaluate(
        name: impl Into<String>,
        lhs: Estimate,
        rhs: Estimate,
        relation: Relation,
        slack: f64,
    ) -> Self {
        let holds = match relation {
            Relation::Ge => lhs.value >= rhs.value - slack,
            Relation::Le => lhs.value <= rhs.value + slack,
            Relation::Eq => (lhs.value - rhs.value).abs() <= slack,
        };
        CheckResult {
            name: name.into(),
            lhs,
            rhs,
            relation,
            slack,
            verdict: if holds { Verdict::Pass } else { Verdict::Fail },
        }
    }

    pub fn inconclusive(
        name: impl Into<String>,
        lhs: Estimate,
        rhs: Estimate,
        relation: Relation,
    ) -> Self {
        CheckResult {
            name: name.into(),
            lhs,
            rhs,
            relation,
            slack: 0.0,
            verdict: Verdict::Inconclusive,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::Fail => write!(f, "fail"),
            Verdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// Combined slack for an inequality whose sides carry the given errors.
pub(crate) fn statistical_slack(lhs: &Estimate, rhs: &Estimate) -> f64 {
    crate::constants::SLACK_SIGMA * (lhs.std_error + rhs.std_error)
}
