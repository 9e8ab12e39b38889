//! The individual identity and inequality checks.
//!
//! Shared-stream discipline: whenever both sides of a comparison are Monte
//! Carlo, they are estimated from the same sample stream so the errors are
//! positively correlated and the conservative summed-SE slack does not
//! produce false alarms.

use crate::bodies::ConvexBody;
use crate::constants::{
    ISOP_COEFF, KKL_COEFF, KK_C1, POINCARE_C0, SLAB_BOUND_DENOM, SLACK_SIGMA,
};
use crate::influence::{density_increment, second_moment_matrix};
use crate::sampling::{mc_expectations, Distribution, Estimate, SamplingPlan};
use crate::special::{
    gaussian_isoperimetric_profile, normal_pdf, symmetric_interval_halfwidth,
    symmetric_interval_mass,
};
use crate::verify::{statistical_slack, CheckResult, Relation, Verdict};
use crate::{Error, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Margulis-Russo: dγ_σ(K)/dσ² = −TInf^{(σ)}[K]/(σ²√2).
///
/// The left side is a central finite difference in σ² with step `h`; halving
/// the step once furnishes the curvature allowance (4/3)|FD_h − FD_{h/2}|.
/// Volumes use the closed form when the body carries one, and otherwise a
/// common-random-numbers difference estimator whose variance lives only in
/// the thin shell between the two dilates.
pub fn check_margulis_russo(
    body: &ConvexBody,
    sigma: f64,
    h: f64,
    plan: &SamplingPlan,
) -> Result<CheckResult> {
    if !(h > 0.0) {
        return Err(Error::invalid(format!("finite-difference step must be positive, got {h}")));
    }
    if !(sigma > 0.0) {
        return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
    }
    let s2 = sigma * sigma;
    if h >= s2 {
        return Err(Error::invalid(format!("step {h} too large for sigma² = {s2}")));
    }
    let n = body.dim();
    let nf = n as f64;
    let sig = |offset: f64| (s2 + offset).sqrt();

    let (fd_h, fd_h2, tinf) = if body.analytic_gaussian_volume(sigma).is_some() {
        let vol = |s: f64| body.analytic_gaussian_volume(s).expect("analytic volume");
        let fd_h = Estimate::exact((vol(sig(h)) - vol(sig(-h))) / (2.0 * h));
        let fd_h2 = Estimate::exact((vol(sig(h / 2.0)) - vol(sig(-h / 2.0))) / h);
        let ests = mc_expectations(
            Distribution::Gaussian { dim: n, sigma: 1.0 },
            plan,
            1,
            |g, out| {
                let scaled: Vec<f64> = g.iter().map(|x| sigma * x).collect();
                let norm2: f64 = g.iter().map(|x| x * x).sum();
                out[0] = body.indicator(&scaled) * (nf - norm2) / SQRT_2;
            },
        )?;
        (fd_h, fd_h2, ests[0])
    } else {
        let ests = mc_expectations(
            Distribution::Gaussian { dim: n, sigma: 1.0 },
            plan,
            3,
            |g, out| {
                let at = |s: f64| {
                    let scaled: Vec<f64> = g.iter().map(|x| s * x).collect();
                    body.indicator(&scaled)
                };
                out[0] = at(sig(h)) - at(sig(-h));
                out[1] = at(sig(h / 2.0)) - at(sig(-h / 2.0));
                let norm2: f64 = g.iter().map(|x| x * x).sum();
                out[2] = at(sigma) * (nf - norm2) / SQRT_2;
            },
        )?;
        let fd_h = Estimate {
            value: ests[0].value / (2.0 * h),
            std_error: ests[0].std_error / (2.0 * h),
            ..ests[0]
        };
        let fd_h2 = Estimate {
            value: ests[1].value / h,
            std_error: ests[1].std_error / h,
            ..ests[1]
        };
        (fd_h, fd_h2, ests[2])
    };

    let rhs = Estimate {
        value: -tinf.value / (s2 * SQRT_2),
        std_error: tinf.std_error / (s2 * SQRT_2),
        ..tinf
    };
    let curvature_allowance = (4.0 / 3.0) * (fd_h.value - fd_h2.value).abs()
        + SLACK_SIGMA * (4.0 / 3.0) * fd_h2.std_error;
    let slack = statistical_slack(&fd_h, &rhs) + curvature_allowance + 1e-12;
    Ok(CheckResult::evaluate(
        format!("margulis_russo[{}, sigma={sigma}]", body.label()),
        fd_h,
        rhs,
        Relation::Eq,
        slack,
    ))
}

/// Dilation form of the same derivative:
/// TInf[K] = (1/√2)·lim_{δ→0} (γ(K) − γ((1−δ)K))/δ, at finite δ with an
/// O(δ) allowance obtained by halving δ once.
pub fn check_dilation_form(
    body: &ConvexBody,
    delta: f64,
    plan: &SamplingPlan,
) -> Result<CheckResult> {
    if !(delta > 0.0 && delta <= 1e-2) {
        return Err(Error::invalid(format!("delta must lie in (0, 1e-2], got {delta}")));
    }
    let n = body.dim();
    let nf = n as f64;
    // x ∈ (1−δ)K ⟺ x/(1−δ) ∈ K.
    let ests = mc_expectations(
        Distribution::Gaussian { dim: n, sigma: 1.0 },
        plan,
        3,
        |g, out| {
            let at_scale = |s: f64| {
                let scaled: Vec<f64> = g.iter().map(|x| x / s).collect();
                body.indicator(&scaled)
            };
            let k = body.indicator(g);
            out[0] = k - at_scale(1.0 - delta);
            out[1] = k - at_scale(1.0 - delta / 2.0);
            let norm2: f64 = g.iter().map(|x| x * x).sum();
            out[2] = k * (nf - norm2) / SQRT_2;
        },
    )?;
    let quotient = |est: &Estimate, d: f64| Estimate {
        value: est.value / (d * SQRT_2),
        std_error: est.std_error / (d * SQRT_2),
        ..*est
    };
    let fd = quotient(&ests[0], delta);
    let fd_half = quotient(&ests[1], delta / 2.0);
    let rhs = ests[2];
    let first_order_allowance =
        2.0 * (fd.value - fd_half.value).abs() + SLACK_SIGMA * 2.0 * fd_half.std_error;
    let slack = statistical_slack(&fd, &rhs) + first_order_allowance + 1e-12;
    Ok(CheckResult::evaluate(
        format!("dilation_form[{}, delta={delta}]", body.label()),
        fd,
        rhs,
        Relation::Eq,
        slack,
    ))
}

/// Poincaré: TInf[K] ≥ c₀·Var[K] with the tested constant c₀ = 0.1.
/// Volume and total influence share one stream; the indicator variance is
/// computed analytically as γ(1−γ) rather than by a second pass.
pub fn check_poincare(body: &ConvexBody, plan: &SamplingPlan) -> Result<CheckResult> {
    let n = body.dim();
    let nf = n as f64;
    let ests = mc_expectations(
        Distribution::Gaussian { dim: n, sigma: 1.0 },
        plan,
        2,
        |x, out| {
            let k = body.indicator(x);
            out[0] = k;
            let norm2: f64 = x.iter().map(|t| t * t).sum();
            out[1] = k * (nf - norm2) / SQRT_2;
        },
    )?;
    let volume = ests[0];
    let tinf = ests[1];
    let variance = indicator_variance(&volume);
    let rhs = Estimate {
        value: POINCARE_C0 * variance.value,
        std_error: POINCARE_C0 * variance.std_error,
        ..variance
    };
    let slack = statistical_slack(&tinf, &rhs);
    Ok(CheckResult::evaluate(
        format!("poincare[{}]", body.label()),
        tinf,
        rhs,
        Relation::Ge,
        slack,
    ))
}

/// Var[K] = γ(1−γ) for an indicator, with first-order error propagation.
pub(crate) fn indicator_variance(volume: &Estimate) -> Estimate {
    Estimate {
        value: volume.value * (1.0 - volume.value),
        std_error: (1.0 - 2.0 * volume.value).abs() * volume.std_error
            + volume.std_error * volume.std_error,
        ..*volume
    }
}

/// First ingredient of the KKL chain: TInf[K] ≥ (1/√π)·Var[K]·r_in, with the
/// certified lower bound on the in-radius on the right.
pub fn check_kkl_ingredient(body: &ConvexBody, plan: &SamplingPlan) -> Result<CheckResult> {
    let n = body.dim();
    let nf = n as f64;
    let (r_lower, _) = body.in_radius(&plan.substream(0x6b6b6c).with_samples(4096))?;
    let ests = mc_expectations(
        Distribution::Gaussian { dim: n, sigma: 1.0 },
        plan,
        2,
        |x, out| {
            let k = body.indicator(x);
            out[0] = k;
            let norm2: f64 = x.iter().map(|t| t * t).sum();
            out[1] = k * (nf - norm2) / SQRT_2;
        },
    )?;
    let variance = indicator_variance(&ests[0]);
    let tinf = ests[1];
    let rhs = Estimate {
        value: KKL_COEFF * variance.value * r_lower,
        std_error: KKL_COEFF * variance.std_error * r_lower,
        ..variance
    };
    let slack = statistical_slack(&tinf, &rhs);
    Ok(CheckResult::evaluate(
        format!("kkl_ingredient[{}]", body.label()),
        tinf,
        rhs,
        Relation::Ge,
        slack,
    ))
}

/// Second ingredient: the profile bound φ∘Φ⁻¹(α) ≥ √(2/π)·min(α, 1−α),
/// verified pointwise on an α grid. Pure 1-D evaluation, no Monte Carlo;
/// equality at α = 1/2 is required to 1e-12.
pub fn check_isoperimetric_profile(grid_points: usize) -> CheckResult {
    let mut worst_margin = f64::INFINITY;
    let mut worst = (0.5, 0.0, 0.0);
    for k in 1..grid_points {
        let alpha = k as f64 / grid_points as f64;
        let profile = gaussian_isoperimetric_profile(alpha).expect("alpha in range");
        let bound = ISOP_COEFF * alpha.min(1.0 - alpha);
        let margin = profile - bound;
        if margin < worst_margin {
            worst_margin = margin;
            worst = (alpha, profile, bound);
        }
    }
    let center = gaussian_isoperimetric_profile(0.5).expect("alpha in range");
    let center_exact = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let center_ok = (center - center_exact).abs() <= 1e-12;

    let mut result = CheckResult::evaluate(
        format!("gaussian_isoperimetric_profile[grid={grid_points}]"),
        Estimate::exact(worst.1),
        Estimate::exact(worst.2),
        Relation::Ge,
        1e-12,
    );
    if !center_ok {
        result.verdict = Verdict::Fail;
    }
    result
}

/// The two KKL sub-checks together: the in-radius ingredient on the body and
/// the profile estimate on a 10⁴-point grid.
pub fn check_kkl_chain(body: &ConvexBody, plan: &SamplingPlan) -> Result<Vec<CheckResult>> {
    Ok(vec![
        check_kkl_ingredient(body, plan)?,
        check_isoperimetric_profile(10_000),
    ])
}

/// Enclosing-slab lower bound: the eigen-direction influence is at least
/// γ(K)·e^{−c²}/(2^{3/2}π), where c is an upper bound on the in-radius (the
/// width of some enclosing slab). Influence and volume come from one
/// second-moment pass.
pub fn check_slab_lower_bound(body: &ConvexBody, plan: &SamplingPlan) -> Result<CheckResult> {
    let (_, c) = body.in_radius(&plan.substream(0x51ab).with_samples(4096))?;
    let m = second_moment_matrix(body, 1.0, plan)?;
    let (_, influence) = m.max_influence_direction()?;
    let scale = (-c * c).exp() / SLAB_BOUND_DENOM;
    let rhs = Estimate {
        value: m.volume.value * scale,
        std_error: m.volume.std_error * scale,
        ..m.volume
    };
    let slack = statistical_slack(&influence, &rhs);
    Ok(CheckResult::evaluate(
        format!("slab_lower_bound[{}]", body.label()),
        influence,
        rhs,
        Relation::Ge,
        slack,
    ))
}

/// Spot check of the dilation extremality of slabs: for the matched slab of
/// equal volume, γ(tK) ≥ γ(t·slab) when t ≥ 1 and ≤ when t ≤ 1.
pub fn check_s_inequality_spot(
    body: &ConvexBody,
    t: f64,
    plan: &SamplingPlan,
) -> Result<CheckResult> {
    if !(t > 0.0) {
        return Err(Error::invalid(format!("dilation factor must be positive, got {t}")));
    }
    let n = body.dim();
    let ests = mc_expectations(
        Distribution::Gaussian { dim: n, sigma: 1.0 },
        plan,
        2,
        |g, out| {
            out[0] = body.indicator(g);
            let shrunk: Vec<f64> = g.iter().map(|x| x / t).collect();
            out[1] = body.indicator(&shrunk);
        },
    )?;
    let gamma_k = ests[0];
    let gamma_tk = ests[1];
    if gamma_k.value <= 0.0 || gamma_k.value >= 1.0 {
        return Ok(CheckResult::inconclusive(
            format!("s_inequality[{}, t={t}]", body.label()),
            gamma_tk,
            gamma_k,
            if t >= 1.0 { Relation::Ge } else { Relation::Le },
        ));
    }
    // Matched slab half-width c with 2Φ(c)−1 = γ(K); dilating by t gives tc.
    let c = symmetric_interval_halfwidth(gamma_k.value)?;
    let slab_value = symmetric_interval_mass(t * c);
    // d(2Φ(tc)−1)/dγ = t·φ(tc)/φ(c).
    let sensitivity = t * normal_pdf(t * c) / normal_pdf(c).max(1e-300);
    let rhs = Estimate {
        value: slab_value,
        std_error: sensitivity * gamma_k.std_error,
        ..gamma_k
    };
    let relation = if t >= 1.0 { Relation::Ge } else { Relation::Le };
    let slack = statistical_slack(&gamma_tk, &rhs);
    Ok(CheckResult::evaluate(
        format!("s_inequality[{}, t={t}]", body.label()),
        gamma_tk,
        rhs,
        relation,
        slack,
    ))
}

/// Everything the robust density-increment check reports.
#[derive(Debug, Clone, Serialize)]
pub struct KruskalKatonaReport {
    pub check: CheckResult,
    pub shell_density_at_r: Estimate,
    pub increment: Estimate,
    pub max_influence: Estimate,
    /// increment / (ε·√(ln(1/δ̂))), the quantity the robust statement bounds
    /// from below.
    pub normalized_ratio: f64,
}

use serde::Serialize;

/// Robust density increment: α_K(r(1−ε)) − α_K(r) ≥ c₁·ε when the shell
/// density at r is in [0.1, 0.9] and ε is small. Reports the max-influence
/// normalization alongside.
pub fn check_kruskal_katona(
    body: &ConvexBody,
    r: f64,
    eps: f64,
    plan: &SamplingPlan,
) -> Result<KruskalKatonaReport> {
    if !(r > 0.0) {
        return Err(Error::invalid(format!("radius must be positive, got {r}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("eps must lie in (0,1), got {eps}")));
    }
    let name = format!("kruskal_katona[{}, r={r}, eps={eps}]", body.label());

    let shell = crate::influence::shell_density(body, &[r], &plan.substream(0xa1fa))?;
    let alpha_r = shell.estimates[0];
    let m = second_moment_matrix(body, 1.0, &plan.substream(0x5eed))?;
    let (_, max_inf) = m.max_influence_direction()?;

    // The statement is asymptotic in ε and conditioned on a non-degenerate
    // shell density; otherwise report inconclusive rather than guessing.
    let mut precondition_ok = true;
    if eps > 0.05 {
        precondition_ok = false;
    }
    if !(0.1..=0.9).contains(&alpha_r.value) {
        precondition_ok = false;
    }

    let increment = density_increment(body, r, eps, plan)?;
    let delta_hat = max_inf.value.max(1e-300);
    let normalized_ratio = if delta_hat < 1.0 {
        increment.value / (eps * (1.0 / delta_hat).ln().sqrt())
    } else {
        f64::NAN
    };

    let rhs = Estimate::exact(KK_C1 * eps);
    let check = if precondition_ok {
        let slack = statistical_slack(&increment, &rhs);
        CheckResult::evaluate(name, increment, rhs, Relation::Ge, slack)
    } else {
        CheckResult::inconclusive(name, increment, rhs, Relation::Ge)
    };

    Ok(KruskalKatonaReport {
        check,
        shell_density_at_r: alpha_r,
        increment,
        max_influence: max_inf,
        normalized_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::influence::{analytic_ball_total_influence, analytic_slab_influence};
    use crate::special::sphere_cap_symmetric_mass;
    use approx::assert_relative_eq;

    fn e(i: usize, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    }

    fn plan(seed: u64) -> SamplingPlan {
        SamplingPlan::new(seed, 1 << 19)
    }

    #[test]
    fn margulis_russo_slab_analytic_derivative() {
        // Closed form: dγ/dσ² of 2Φ(c/σ)−1 equals −c·φ(c/σ)/σ³, and the
        // biased-influence side equals the same expression.
        let c = 1.0f64;
        let sigma = 1.0f64;
        let analytic = -c * normal_pdf(c / sigma) / sigma.powi(3);
        assert_relative_eq!(analytic, -0.241_970_724_519_143, epsilon = 1e-12);
        let influence_side = -analytic_slab_influence(c, sigma) / (sigma * sigma * SQRT_2);
        assert_relative_eq!(analytic, influence_side, epsilon = 1e-14);

        let slab = ConvexBody::slab(&e(0, 3), c, 3).unwrap();
        let result = check_margulis_russo(&slab, sigma, 1e-3, &plan(61)).unwrap();
        assert!(result.passed(), "{result:?}");
        // The finite difference reproduces the closed form to 3 significant
        // figures easily.
        assert_relative_eq!(result.lhs.value, analytic, max_relative = 1e-4);
    }

    #[test]
    fn margulis_russo_ball_closed_form() {
        // γ_σ(B_{√2}, n=2) = 1 − e^{−1/σ²}; derivative at σ=1 is −1/e.
        let ball = ConvexBody::ball(SQRT_2, 2).unwrap();
        let result = check_margulis_russo(&ball, 1.0, 1e-3, &plan(62)).unwrap();
        assert!(result.passed(), "{result:?}");
        assert_relative_eq!(
            result.lhs.value,
            -1.0 / std::f64::consts::E,
            max_relative = 1e-4
        );
        let rhs_exact = -analytic_ball_total_influence(SQRT_2, 2, 1.0) / SQRT_2;
        assert!((result.rhs.value - rhs_exact).abs() <= 3.0 * result.rhs.std_error);
    }

    #[test]
    fn margulis_russo_near_full_body_is_flat() {
        let wide = ConvexBody::slab(&e(0, 2), 8.0, 2).unwrap();
        let result = check_margulis_russo(&wide, 1.0, 1e-3, &plan(63)).unwrap();
        assert!(result.passed());
        assert!(result.lhs.value.abs() < 1e-3);
        assert!(result.rhs.value.abs() < 1e-3);
    }

    #[test]
    fn margulis_russo_exercises_monte_carlo_path() {
        // A rotated two-slab intersection has no closed-form volume.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let body = ConvexBody::intersect(vec![
            ConvexBody::slab(&e(0, 2), 1.0, 2).unwrap(),
            ConvexBody::slab(&[s, s], 1.2, 2).unwrap(),
        ])
        .unwrap();
        assert!(body.analytic_gaussian_volume(1.0).is_none());
        let result = check_margulis_russo(&body, 1.0, 1e-3, &plan(64)).unwrap();
        assert!(result.passed(), "{result:?}");
    }

    #[test]
    fn dilation_form_on_reference_bodies() {
        for (seed, body) in [
            (65u64, ConvexBody::slab(&e(0, 3), 1.0, 3).unwrap()),
            (66, ConvexBody::ball(SQRT_2, 2).unwrap()),
            (67, ConvexBody::cube(1.0, 3).unwrap()),
        ] {
            let result = check_dilation_form(&body, 5e-3, &plan(seed)).unwrap();
            assert!(result.passed(), "{}: {result:?}", body.label());
        }
    }

    #[test]
    fn poincare_reference_ratios() {
        // Slab c=1: TInf ≈ 0.342, Var ≈ 0.2166, ratio ≈ 1.58.
        let slab = ConvexBody::slab(&e(0, 2), 1.0, 2).unwrap();
        let r = check_poincare(&slab, &plan(68)).unwrap();
        assert!(r.passed());
        let gamma = symmetric_interval_mass(1.0);
        assert_relative_eq!(
            r.lhs.value,
            analytic_slab_influence(1.0, 1.0),
            epsilon = 3.0 * r.lhs.std_error + 1e-12
        );
        assert!((r.rhs.value - POINCARE_C0 * gamma * (1.0 - gamma)).abs() < 1e-2);

        // Ball(√2, 2): ratio ≈ 2.2.
        let ball = ConvexBody::ball(SQRT_2, 2).unwrap();
        let r = check_poincare(&ball, &plan(69)).unwrap();
        assert!(r.passed());

        // Near-empty body: both sides ≈ 0 and the verdict stays pass.
        let sliver = ConvexBody::slab(&e(0, 2), 0.01, 2).unwrap();
        let r = check_poincare(&sliver, &plan(70)).unwrap();
        assert!(r.passed());
        assert!(r.lhs.value.abs() < 2e-2);
    }

    #[test]
    fn poincare_constant_validated_on_slab_family() {
        // Quadrature scan of TInf/Var over slab widths: the ratio decreases
        // towards 1/√2 as c → 0, so the infimum on c ∈ [0.01, 6] is ≈ 0.713
        // and the tested constant 0.1 has a 7× margin.
        let mut inf_ratio = f64::INFINITY;
        for k in 0..=600 {
            let c = 0.01 + (6.0 - 0.01) * k as f64 / 600.0;
            let tinf = analytic_slab_influence(c, 1.0);
            let gamma = symmetric_interval_mass(c);
            let var = gamma * (1.0 - gamma);
            inf_ratio = inf_ratio.min(tinf / var);
        }
        assert!(
            (0.70..0.72).contains(&inf_ratio),
            "infimum {inf_ratio} drifted from the calibration"
        );
        assert!(inf_ratio > POINCARE_C0);
    }

    #[test]
    fn isoperimetric_profile_grid() {
        let r = check_isoperimetric_profile(10_000);
        assert!(r.passed(), "{r:?}");
        // Worst margin occurs towards the edges of the grid but stays
        // non-negative.
        assert!(r.lhs.value >= r.rhs.value - 1e-12);
        assert_relative_eq!(
            gaussian_isoperimetric_profile(0.5).unwrap(),
            0.398_942_280_401_432_7,
            epsilon = 1e-12
        );
        assert!(gaussian_isoperimetric_profile(1e-12).unwrap() < 1e-10);
    }

    #[test]
    fn kkl_ingredient_on_half_volume_cube() {
        let n = 16;
        let r = symmetric_interval_halfwidth((0.5f64).powf(1.0 / n as f64)).unwrap();
        let cube = ConvexBody::cube(r, n).unwrap();
        let result = check_kkl_ingredient(&cube, &plan(71)).unwrap();
        assert!(result.passed(), "{result:?}");
        // TInf·√π/(Var·r) ≥ 1 with margin for this family.
        assert!(result.lhs.value > result.rhs.value);
    }

    #[test]
    fn slab_lower_bound_reference_values() {
        let slab = ConvexBody::slab(&e(0, 2), 1.0, 2).unwrap();
        let result = check_slab_lower_bound(&slab, &plan(72)).unwrap();
        assert!(result.passed(), "{result:?}");
        let gamma = symmetric_interval_mass(1.0);
        let bound = gamma * (-1.0f64).exp() / SLAB_BOUND_DENOM;
        assert_relative_eq!(bound, 0.028_264_015_995_558_8, epsilon = 1e-8);
        assert!((result.rhs.value - bound).abs() < 3.0 * result.rhs.std_error + 1e-6);

        for body in [
            ConvexBody::cube(1.0, 2).unwrap(),
            ConvexBody::ball(1.0, 3).unwrap(),
        ] {
            let result = check_slab_lower_bound(&body, &plan(73)).unwrap();
            assert!(result.passed(), "{}: {result:?}", body.label());
        }
    }

    #[test]
    fn s_inequality_slab_is_tight() {
        let slab = ConvexBody::slab(&e(0, 3), 1.0, 3).unwrap();
        for (seed, t) in [(74u64, 1.3), (75, 0.7), (76, 1.0)] {
            let r = check_s_inequality_spot(&slab, t, &plan(seed)).unwrap();
            assert!(r.passed(), "t={t}: {r:?}");
            // Extremal case: equality within slack.
            assert!((r.lhs.value - r.rhs.value).abs() <= r.slack);
        }
    }

    #[test]
    fn s_inequality_ball_and_cube() {
        let ball = ConvexBody::ball(SQRT_2, 2).unwrap();
        let r = check_s_inequality_spot(&ball, 1.2, &plan(77)).unwrap();
        assert!(r.passed(), "{r:?}");
        // Closed forms: γ(1.2·B) = 1 − e^{−1.44}, slab side = 2Φ(1.2c)−1.
        let exact_lhs = 1.0 - (-1.44f64).exp();
        assert!((r.lhs.value - exact_lhs).abs() <= 3.0 * r.lhs.std_error);
        assert!(r.lhs.value > r.rhs.value);

        let cube = ConvexBody::cube(1.0, 3).unwrap();
        let r = check_s_inequality_spot(&cube, 0.8, &plan(78)).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.relation, Relation::Le);
        assert!(r.lhs.value < r.rhs.value);
    }

    #[test]
    fn kruskal_katona_slab_matches_cap_oracle() {
        let n = 16;
        let slab = ConvexBody::slab(&e(0, n), 1.0, n).unwrap();
        let r = 4.0;
        let eps = 0.01;
        let report = check_kruskal_katona(&slab, r, eps, &plan(79)).unwrap();
        assert_eq!(report.check.verdict, Verdict::Pass, "{report:?}");

        let oracle = sphere_cap_symmetric_mass(n, r * (1.0 - eps), 1.0)
            - sphere_cap_symmetric_mass(n, r, 1.0);
        assert!(
            (report.increment.value - oracle).abs() <= 3.0 * report.increment.std_error,
            "{} vs {oracle}",
            report.increment.value
        );
        assert!(report.normalized_ratio.is_finite());
    }

    #[test]
    fn kruskal_katona_guards_degenerate_density() {
        // At the ball's own boundary radius the density jumps 1 → 0; the
        // precondition excludes it.
        let ball = ConvexBody::ball(2.0, 8).unwrap();
        let report = check_kruskal_katona(&ball, 3.5, 0.01, &plan(80)).unwrap();
        assert_eq!(report.check.verdict, Verdict::Inconclusive);

        // Large ε is excluded as well: the statement is asymptotic.
        let slab = ConvexBody::slab(&e(0, 16), 1.0, 16).unwrap();
        let report = check_kruskal_katona(&slab, 4.0, 0.2, &plan(81)).unwrap();
        assert_eq!(report.check.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn kruskal_katona_cube_beats_slab_normalized() {
        // Low-influence bodies climb faster: the cube's increment/ε exceeds
        // the slab's under the same sample stream.
        let n = 16;
        let r = 4.0;
        let eps = 0.01;
        let slab = ConvexBody::slab(&e(0, n), 1.0, n).unwrap();
        let rc = symmetric_interval_halfwidth((0.5f64).powf(1.0 / n as f64)).unwrap();
        let cube = ConvexBody::cube(rc, n).unwrap();
        let p = plan(82);
        let slab_report = check_kruskal_katona(&slab, r, eps, &p).unwrap();
        let cube_report = check_kruskal_katona(&cube, r, eps, &p).unwrap();
        assert_eq!(cube_report.check.verdict, Verdict::Pass);
        assert!(
            cube_report.increment.value
                > slab_report.increment.value
                    - 3.0 * (cube_report.increment.std_error + slab_report.increment.std_error),
            "cube {} vs slab {}",
            cube_report.increment.value,
            slab_report.increment.value
        );
    }
}
