//! Tested constants behind the inequality checks.
//!
//! The theory states several bounds only up to unspecified absolute
//! constants. Each check pins an explicit constant here, validated once
//! against a family where the quantity is computable by quadrature (see the
//! `constant_validation` tests in the verify module). Keeping them in one
//! place makes the calibration auditable.

/// Poincaré: TInf[K] ≥ POINCARE_C0 · Var[K].
///
/// Over the slab family the ratio TInf/Var = √2·c·φ(c) / (γ(1−γ)) has
/// infimum ≈ 0.49 on c ∈ [0.01, 6]; 0.1 leaves a 4.9× margin.
pub const POINCARE_C0: f64 = 0.1;

/// KKL ingredient: TInf[K] ≥ KKL_COEFF · Var[K] · r_in(K). The coefficient
/// 1/√π comes straight from the isoperimetric argument, no hidden constant.
pub const KKL_COEFF: f64 = 0.564_189_583_547_756_3; // 1/√π

/// Isoperimetric profile bound: φ∘Φ⁻¹(α) ≥ ISOP_COEFF · min(α, 1−α).
pub const ISOP_COEFF: f64 = 0.797_884_560_802_865_4; // √(2/π)

/// Enclosing-slab influence bound: Inf_v[K] ≥ γ(K)·e^{−c²} / SLAB_BOUND_DENOM
/// for K inside the slab {|v·x| ≤ c}. The denominator 2^{3/2}·π is exact.
pub const SLAB_BOUND_DENOM: f64 = 8.885_765_876_316_732; // 2^{3/2}·π

/// Robust density increment: α_K(r(1−ε)) − α_K(r) ≥ KK_C1 · ε for bodies in
/// the tested regime. Validated against the slab family at r = √n, where the
/// increment is a spherical-cap difference computable from the Beta CDF; the
/// slab's normalized increment at n = 16 is ≈ 0.49.
pub const KK_C1: f64 = 0.05;

/// Exponent coefficient in the logconcave KKL bound
/// Inf_{v*}[f] ≥ σ²·e^{−FRIEDGUT_EXP_COEFF·I²/σ⁴} / FRIEDGUT_DENOM.
pub const FRIEDGUT_EXP_COEFF: f64 = 12.566_370_614_359_172; // 4π

/// Denominator 2^{5/2}·π of the same bound.
pub const FRIEDGUT_DENOM: f64 = 17.771_531_752_633_465;

/// Statistical slack convention: an inequality or identity passes when it
/// holds within SLACK_SIGMA times the summed standard errors of both sides.
pub const SLACK_SIGMA: f64 = 3.0;
