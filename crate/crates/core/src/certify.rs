//! Feasibility checks for the parameter constraint systems and the contraction
//! factors they certify.
//!
//! Non-strict inequalities `lhs ≤ rhs` are accepted with a relative slack of
//! 1e-12 (several default parameter choices make them tight, and the two sides
//! are evaluated in different orders); strict inequalities are exact;
//! equalities use a relative tolerance of 1e-12.

use std::fmt;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::harness::Potential;
use crate::problems::fmt_real;
use crate::solvers::{OptParams, ViParams};

const REL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    ViUnrestricted,
    ViRestricted,
    Opt,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Self::ViUnrestricted => "vi-unrestricted",
            Self::ViRestricted => "vi-restricted",
            Self::Opt => "opt",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "vi-unrestricted" => Some(Self::ViUnrestricted),
            "vi-restricted" => Some(Self::ViRestricted),
            "opt" => Some(Self::Opt),
            _ => None,
        }
    }
}

/// Which analysis a certificate comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertKind {
    ViUnrestricted,
    ViRestricted,
    Opt,
    Vanilla,
    ExtraGradient,
    Ogda,
}

impl CertKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::ViUnrestricted => "vi-unrestricted",
            Self::ViRestricted => "vi-restricted",
            Self::Opt => "opt",
            Self::Vanilla => "vanilla",
            Self::ExtraGradient => "extragradient",
            Self::Ogda => "ogda",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Self::Lt => "<",
            Self::Le => "<=",
            Self::Eq => "=",
            Self::Ge => ">=",
            Self::Gt => ">",
        }
    }

    fn holds(self, lhs: f64, rhs: f64) -> bool {
        let slack = REL_TOL * lhs.abs().max(rhs.abs());
        match self {
            Self::Lt => lhs < rhs,
            Self::Le => lhs <= rhs + slack,
            Self::Eq => (lhs - rhs).abs() <= slack,
            Self::Ge => lhs + slack >= rhs,
            Self::Gt => lhs > rhs,
        }
    }
}

/// One line of a constraint system, evaluated.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintCheck {
    pub id: &'static str,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    pub satisfied: bool,
}

impl ConstraintCheck {
    fn new(id: &'static str, lhs: f64, relation: Relation, rhs: f64) -> Self {
        Self {
            id,
            lhs,
            relation,
            rhs,
            satisfied: relation.holds(lhs, rhs),
        }
    }
}

/// Intermediates of the restricted-domain reduction
/// `(1−u)‖z⁺−z*‖² ≤ (1−s)‖z−z*‖² + t‖z⁻−z*‖²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RestrictedTerms {
    pub s: f64,
    pub t: f64,
    pub u: f64,
    /// `(αμ + 4γ + 2|γ−β| − 3τL)/(1 − τL)`, the closed form as it is usually
    /// quoted. It disagrees with `(s − u)/(1 − u)` in the sign of the γ terms
    /// and is reported only for comparison.
    pub a_printed: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateCertificate {
    pub kind: CertKind,
    pub mu: f64,
    pub lip: f64,
    pub feasible: bool,
    /// Coefficients of `‖z⁺−z*‖² ≤ (1−a)‖z−z*‖² + b‖z⁻−z*‖²`. For the
    /// optimization scheme `a = θ`, `b = 0`.
    pub a: f64,
    pub b: f64,
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub theta_default: f64,
    /// Per-iteration contraction of `potential`; NaN when infeasible.
    pub rate: f64,
    pub potential: Potential,
    /// C of the optimization potential; zero otherwise.
    pub c: f64,
    pub checks: Vec<ConstraintCheck>,
    pub violated: Vec<&'static str>,
    pub restricted: Option<RestrictedTerms>,
}

impl RateCertificate {
    fn assemble(kind: CertKind, mu: f64, lip: f64, checks: Vec<ConstraintCheck>) -> Self {
        let violated: Vec<_> = checks.iter().filter(|c| !c.satisfied).map(|c| c.id).collect();
        Self {
            kind,
            mu,
            lip,
            feasible: violated.is_empty(),
            a: f64::NAN,
            b: f64::NAN,
            theta_lo: f64::NAN,
            theta_hi: f64::NAN,
            theta_default: f64::NAN,
            rate: f64::NAN,
            potential: Potential::Distance,
            c: 0.0,
            checks,
            violated,
            restricted: None,
        }
    }

    /// Fills in θ and the rate from (a, b) when every line holds.
    fn with_two_term(mut self, a: f64, b: f64) -> Self {
        self.a = a;
        self.b = b;
        if self.feasible {
            match theta_interval(a, b) {
                Ok((lo, hi)) => {
                    self.theta_lo = lo;
                    self.theta_hi = hi;
                    self.theta_default = 0.5 * (a + b);
                    self.rate = 1.0 - (a - self.theta_default);
                    self.potential = Potential::TwoTerm {
                        theta: self.theta_default,
                    };
                }
                Err(_) => {
                    self.feasible = false;
                    self.violated.push("theta-interval");
                }
            }
        }
        self
    }

    /// Single-term certificates: `‖z⁺−z*‖² ≤ rate·‖z−z*‖²` (or the given potential).
    fn with_rate(mut self, rate: f64, potential: Potential) -> Self {
        self.a = 1.0 - rate;
        self.b = 0.0;
        self.theta_lo = 0.0;
        self.theta_hi = self.a;
        self.theta_default = 0.0;
        self.potential = potential;
        if self.feasible {
            self.rate = rate;
        }
        self
    }

    /// Rate for a θ other than the default, if it lies in the certified interval.
    pub fn rate_for_theta(&self, theta: f64) -> Result<f64> {
        if !self.feasible {
            return Err(Error::invalid("certificate is infeasible"));
        }
        if !(theta >= self.theta_lo && theta < self.theta_hi) {
            return Err(Error::invalid(format!(
                "theta {theta} outside [{}, {})",
                self.theta_lo, self.theta_hi
            )));
        }
        Ok(1.0 - (self.a - theta))
    }

    /// `key = value` lines; constraint lines as `check.<id> = <lhs> <rel> <rhs> ok|violated`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("kind", self.kind.name().to_string());
        kv("feasible", self.feasible.to_string());
        kv("mu", fmt_real(self.mu));
        kv("lip", fmt_real(self.lip));
        kv("a", fmt_real(self.a));
        kv("b", fmt_real(self.b));
        kv("theta_lo", fmt_real(self.theta_lo));
        kv("theta_hi", fmt_real(self.theta_hi));
        kv("theta_default", fmt_real(self.theta_default));
        kv("rate", fmt_real(self.rate));
        kv("potential", self.potential.name().to_string());
        if self.kind == CertKind::Opt {
            kv("c", fmt_real(self.c));
        }
        if let Some(r) = &self.restricted {
            kv("s", fmt_real(r.s));
            kv("t", fmt_real(r.t));
            kv("u", fmt_real(r.u));
            kv("a_printed", fmt_real(r.a_printed));
        }
        kv("violated", self.violated.join(","));
        for c in &self.checks {
            kv(
                &format!("check.{}", c.id),
                format!(
                    "{} {} {} {}",
                    fmt_real(c.lhs),
                    c.relation.symbol(),
                    fmt_real(c.rhs),
                    if c.satisfied { "ok" } else { "violated" }
                ),
            );
        }
        out
    }
}

impl fmt::Display for RateCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn check_constants(mu: f64, lip: f64) -> Result<()> {
    if !(mu > 0.0 && mu.is_finite() && lip.is_finite() && mu <= lip) {
        return Err(Error::invalid(format!("need 0 < mu <= lip, got mu = {mu}, lip = {lip}")));
    }
    Ok(())
}

fn nonnegative(p: &ViParams) -> ConstraintCheck {
    let min = [p.alpha, p.beta, p.gamma, p.eta, p.tau]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    ConstraintCheck::new("nonnegative", min, Relation::Ge, 0.0)
}

/// Admissible θ for turning `d⁺ ≤ (1−a)d + b·d⁻` into a one-step contraction
/// of `d + θd⁻`: `θ ∈ [lo, a)` with `lo = (√((1−a)² + 4b) − (1−a))/2`, the
/// smallest θ with `b ≤ θ(1 − (a − θ))`. For `b = 0` the interval is `[0, a)`.
pub fn theta_interval(a: f64, b: f64) -> Result<(f64, f64)> {
    if !(a < 1.0 && b >= 0.0 && b < a) {
        return Err(Error::invalid(format!("need 0 <= b < a < 1, got a = {a}, b = {b}")));
    }
    let c = 1.0 - a;
    let lo = if b == 0.0 {
        0.0
    } else {
        2.0 * b / ((c * c + 4.0 * b).sqrt() + c)
    };
    Ok((lo, a))
}

/// Constraint system for the extra-point update without projection of the
/// half-point (only valid when that point stays where F is defined).
///
/// With `X = γ − αβ/η` and `Y = −2αβ/η − (2α/η)X`:
///
/// ```text
/// a = αμ − 3γ − τL(3 + 2τL + 2α/η + 2αL) − 2X² − |Y|
/// b = 2X² + γ + 2τL(1 + τL + α/η + αL) + |Y|
/// ```
///
/// Identifiers: `epc-line-1` … `epc-line-6`, `nonnegative`, `eta-positive`.
pub fn certify_vi_unrestricted(mu: f64, lip: f64, params: &ViParams) -> Result<RateCertificate> {
    check_constants(mu, lip)?;
    let ViParams {
        alpha,
        beta,
        gamma,
        eta,
        tau,
    } = *params;
    let l = lip;
    if !(eta > 0.0) {
        let checks = vec![nonnegative(params), ConstraintCheck::new("eta-positive", eta, Relation::Gt, 0.0)];
        return Ok(RateCertificate::assemble(CertKind::ViUnrestricted, mu, lip, checks));
    }
    let r = alpha / eta;
    let tl = tau * l;
    let x = gamma - alpha * beta / eta;
    let y = -2.0 * alpha * beta / eta - 2.0 * r * x;
    let a = alpha * mu - 3.0 * gamma - tl * (3.0 + 2.0 * tl + 2.0 * r + 2.0 * alpha * l) - 2.0 * x * x - y.abs();
    let b = 2.0 * x * x + gamma + 2.0 * tl * (1.0 + tl + r + alpha * l) + y.abs();
    let line1 = alpha * mu
        - 4.0 * gamma
        - tl * (5.0 + 4.0 * tl + 4.0 * r + 4.0 * alpha * l)
        - 4.0 * x * x
        - 4.0 * (-alpha * beta / eta - alpha * gamma / eta + alpha * alpha * beta / (eta * eta)).abs();
    // Line 3 is compared as (positive part) ≤ 2α/η so the tolerance scales with its terms.
    let line3 = alpha * alpha * l * l + r * r + r * tl + 2.0 * alpha * mu + alpha * tau * l * l
        + (-alpha * beta / eta - r * x).abs();
    let checks = vec![
        ConstraintCheck::new("epc-line-1", line1, Relation::Gt, 0.0),
        ConstraintCheck::new("epc-line-2", a, Relation::Lt, 1.0),
        ConstraintCheck::new("epc-line-3", line3, Relation::Le, 2.0 * r),
        ConstraintCheck::new("epc-line-4", 2.0 * alpha * r, Relation::Ge, 2.0 * alpha),
        ConstraintCheck::new("epc-line-5", 2.0 * tau * gamma, Relation::Ge, 2.0 * tau * alpha * beta / eta),
        ConstraintCheck::new("epc-line-6", gamma * eta * alpha, Relation::Eq, alpha * beta * alpha),
        nonnegative(params),
        ConstraintCheck::new("eta-positive", eta, Relation::Gt, 0.0),
    ];
    Ok(RateCertificate::assemble(CertKind::ViUnrestricted, mu, lip, checks).with_two_term(a, b))
}

/// Constraint system for the extra-point update with the half-point projected.
///
/// With `u = τL`, `s = αμ − 4γ − 2|γ−β| − 2τL`, `t = 2γ + 2|γ−β| + 2τL`, the
/// one-step bound reduces to `a = (s − u)/(1 − u)`, `b = t/(1 − u)`.
///
/// Identifiers: `rc-line-1` … `rc-line-4`, `eta-equals-alpha`, `nonnegative`.
pub fn certify_vi_restricted(mu: f64, lip: f64, params: &ViParams) -> Result<RateCertificate> {
    check_constants(mu, lip)?;
    let ViParams {
        alpha,
        beta,
        gamma,
        eta,
        tau,
    } = *params;
    let l = lip;
    let gb = (gamma - beta).abs();
    let u = tau * l;
    let s = alpha * mu - 4.0 * gamma - 2.0 * gb - 2.0 * u;
    let t = 2.0 * gamma + 2.0 * gb + 2.0 * u;
    let line1 = [
        ConstraintCheck::new("rc-line-1", u, Relation::Ge, 0.0),
        ConstraintCheck::new("rc-line-1", u, Relation::Lt, s),
        ConstraintCheck::new("rc-line-1", s, Relation::Lt, 1.0),
    ];
    // Report line 1 once, by its first failing part.
    let line1 = line1.iter().find(|c| !c.satisfied).unwrap_or(&line1[1]).clone();
    let checks = vec![
        line1,
        ConstraintCheck::new("rc-line-2", t, Relation::Lt, s - u),
        ConstraintCheck::new("rc-line-3", alpha * l + gb - 1.0, Relation::Le, 0.0),
        ConstraintCheck::new(
            "rc-line-4",
            alpha * l + 2.0 * alpha * mu + u + 2.0 * gamma - 1.0,
            Relation::Le,
            0.0,
        ),
        ConstraintCheck::new("eta-equals-alpha", eta, Relation::Eq, alpha),
        nonnegative(params),
    ];
    let mut cert = RateCertificate::assemble(CertKind::ViRestricted, mu, lip, checks);
    cert.restricted = Some(RestrictedTerms {
        s,
        t,
        u,
        a_printed: (alpha * mu + 4.0 * gamma + 2.0 * gb - 3.0 * u) / (1.0 - u),
    });
    Ok(cert.with_two_term((s - u) / (1.0 - u), t / (1.0 - u)))
}

/// Constraint system of the optimization extra-point scheme. Feasible
/// parameters contract `f(x) − f* + C‖v − x*‖²` by `1 − θ` per step.
///
/// Identifiers: `theta-range`, `opt-line-1` … `opt-line-5`, `t7-t8-sum`,
/// `opt-line-7`, `opt-line-8`.
pub fn certify_opt(mu: f64, lip: f64, params: &OptParams) -> Result<RateCertificate> {
    check_constants(mu, lip)?;
    let [t1, t2, t3, t4, t5, t6, t7, t8, t9] = params.t;
    let (theta, c, l) = (params.theta, params.c, lip);
    let denom = 1.0 - 2.0 * t8 * t9 * c;
    let rhs8 = (2.0 * t4 * (1.0 - t3) - (1.0 + t3) * (1.0 + t3) * t4 * t4 + 2.0 * t3 * (t6 - t5)) / (2.0 * l);
    let checks = vec![
        ConstraintCheck::new("theta-range", theta, Relation::Gt, 0.0),
        ConstraintCheck::new("theta-range", theta, Relation::Le, 1.0),
        ConstraintCheck::new("opt-line-1", theta, Relation::Eq, 2.0 * t9 * c),
        // t₁ = (1−θ)/(1 − 2t₈t₉C) and t₂ = 2t₇t₉C/(1 − 2t₈t₉C), cross-multiplied
        // so that θ = 1 (where both sides are 0/0) stays well defined.
        ConstraintCheck::new("opt-line-2", t1 * denom, Relation::Eq, 1.0 - theta),
        ConstraintCheck::new("opt-line-3", t2 * denom, Relation::Eq, 2.0 * t7 * t9 * c),
        ConstraintCheck::new("opt-line-4", t3, Relation::Lt, 1.0),
        ConstraintCheck::new("opt-line-5", t7, Relation::Le, 1.0 - theta),
        ConstraintCheck::new("t7-t8-sum", t8, Relation::Eq, 1.0 - t7),
        ConstraintCheck::new("opt-line-7", t8 * c, Relation::Le, mu * theta / 2.0),
        ConstraintCheck::new("opt-line-8", t9 * t9 * c, Relation::Le, rhs8),
    ];
    let mut checks_dedup: Vec<ConstraintCheck> = Vec::with_capacity(checks.len());
    for ch in checks {
        match checks_dedup.iter_mut().find(|c| c.id == ch.id) {
            Some(prev) if prev.satisfied && !ch.satisfied => *prev = ch,
            Some(_) => {}
            None => checks_dedup.push(ch),
        }
    }
    let mut cert = RateCertificate::assemble(CertKind::Opt, mu, lip, checks_dedup)
        .with_rate(1.0 - theta, Potential::Lyapunov { c });
    cert.c = c;
    Ok(cert)
}

/// Projection method `z⁺ = P(z − αF(z))`: `‖z⁺−z*‖² ≤ (1 − 2αμ + α²L²)‖z−z*‖²`.
pub fn certify_vanilla(mu: f64, lip: f64, alpha: f64) -> Result<RateCertificate> {
    check_constants(mu, lip)?;
    let rate = 1.0 - 2.0 * alpha * mu + alpha * alpha * lip * lip;
    let checks = vec![
        ConstraintCheck::new("alpha-positive", alpha, Relation::Gt, 0.0),
        ConstraintCheck::new("vanilla-rate", rate, Relation::Lt, 1.0),
    ];
    Ok(RateCertificate::assemble(CertKind::Vanilla, mu, lip, checks).with_rate(rate, Potential::Distance))
}

/// Extra-gradient with `η = α` and `α²L² + 2αμ ≤ 1`: `‖z⁺−z*‖² ≤ (1 − αμ)‖z−z*‖²`.
/// Covers both the plain and the projected half-step.
pub fn certify_extragradient(mu: f64, lip: f64, alpha: f64, eta: f64) -> Result<RateCertificate> {
    check_constants(mu, lip)?;
    let checks = vec![
        ConstraintCheck::new("alpha-positive", alpha, Relation::Gt, 0.0),
        ConstraintCheck::new("eta-equals-alpha", eta, Relation::Eq, alpha),
        ConstraintCheck::new(
            "eg-step",
            alpha * alpha * lip * lip + 2.0 * alpha * mu - 1.0,
            Relation::Le,
            0.0,
        ),
    ];
    Ok(RateCertificate::assemble(CertKind::ExtraGradient, mu, lip, checks)
        .with_rate(1.0 - alpha * mu, Potential::Distance))
}

/// Optimistic update with `α ≥ 1/(2L)`, `τ(1 + σ) = α` and `τL(2 + σ) ≤ 1`
/// (met by `α = 1/(2L)`, `τ = α/(1+σ)`): the potential
/// `V = ‖z−z*‖² + 2τ(z−z*)ᵀ(F(z⁻) − F(z)) + (1−Lτ)/(1+σ)‖z − z⁻‖²`
/// shrinks by `1/(1+σ)` per step and `‖z^k−z*‖² ≤ 2(1+σ)^{−k}‖z⁰−z*‖²`.
pub fn certify_ogda(mu: f64, lip: f64, alpha: f64, tau: f64) -> Result<RateCertificate> {
    check_constants(mu, lip)?;
    let sigma = mu / lip;
    let checks = vec![
        ConstraintCheck::new("ogda-alpha", 2.0 * alpha * lip, Relation::Ge, 1.0),
        ConstraintCheck::new("ogda-tau-link", tau * (1.0 + sigma), Relation::Eq, alpha),
        ConstraintCheck::new("ogda-tau-bound", tau * lip * (2.0 + sigma), Relation::Le, 1.0),
    ];
    Ok(RateCertificate::assemble(CertKind::Ogda, mu, lip, checks)
        .with_rate(1.0 / (1.0 + sigma), Potential::Ogda { tau }))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DefaultParams {
    Vi(ViParams),
    Opt(OptParams),
}

/// Standard parameter choice for each regime (`delta` is used by `Opt` only, default 0.5).
pub fn default_params(regime: Regime, mu: f64, lip: f64, delta: Option<f64>) -> Result<DefaultParams> {
    Ok(match regime {
        Regime::Opt => DefaultParams::Opt(default_opt_params(mu, lip, delta)?),
        vi => DefaultParams::Vi(default_vi_params(vi, mu, lip)?),
    })
}

/// `(1/(4L), σ/64, σ/64, 1/(4L), σ/(128L))` without projection of the
/// half-point; `α = η = 1/(4L)`, `β = γ = μ/(64L)`, `τ = μ/(64L²)` with it.
pub fn default_vi_params(regime: Regime, mu: f64, lip: f64) -> Result<ViParams> {
    check_constants(mu, lip)?;
    let sigma = mu / lip;
    let step = 1.0 / (4.0 * lip);
    match regime {
        Regime::ViUnrestricted => ViParams::new(step, sigma / 64.0, sigma / 64.0, step, sigma / (128.0 * lip)),
        Regime::ViRestricted => ViParams::new(step, sigma / 64.0, sigma / 64.0, step, sigma / (64.0 * lip)),
        Regime::Opt => Err(Error::invalid("use default_opt_params for the optimization regime")),
    }
}

/// `θ = √σ`, `t₉ = 1/√(μL)`, `C = μ/2`, `t₃ = δ`, `t₄ = (1−δ)/(1+δ)²`,
/// `t₅ = 1/(1+δ)²`, `t₆ = 3/(1+δ)²`, `t₁ = 1/(1+θ)`, `t₂ = θ/(1+θ)`,
/// `t₇ = 1 − θ`, `t₈ = θ`.
pub fn default_opt_params(mu: f64, lip: f64, delta: Option<f64>) -> Result<OptParams> {
    check_constants(mu, lip)?;
    let delta = delta.unwrap_or(0.5);
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    let theta = (mu / lip).sqrt();
    let d2 = (1.0 + delta) * (1.0 + delta);
    OptParams::new(
        [
            1.0 / (1.0 + theta),
            theta / (1.0 + theta),
            delta,
            (1.0 - delta) / d2,
            1.0 / d2,
            3.0 / d2,
            1.0 - theta,
            theta,
            1.0 / (mu * lip).sqrt(),
        ],
        theta,
        mu / 2.0,
        delta,
    )
}

/// Multiplier turning the initial gap into a bound on the initial potential.
fn potential_scale(cert: &RateCertificate) -> f64 {
    match cert.potential {
        Potential::Distance => 1.0,
        Potential::TwoTerm { theta } => 1.0 + theta,
        Potential::Ogda { .. } => 2.0,
        Potential::Lyapunov { c } => 1.0 + 2.0 * c / cert.mu,
    }
}

/// Smallest `k` with `rate^k · scale · initial_gap ≤ tol`:
/// `k = ⌈ln(scale·gap/tol) / ln(1/rate)⌉`.
///
/// `initial_gap` is `‖z⁰−z*‖²` for VI certificates and `f(x⁰) − f*` for the
/// optimization certificate. `scale` is `1 + θ` for the two-term potential,
/// 2 for the optimistic one and `1 + 2C/μ` for the optimization potential.
pub fn iteration_bound(cert: &RateCertificate, initial_gap: f64, tol: f64) -> Result<usize> {
    if !cert.feasible {
        return Err(Error::invalid("iteration bound needs a feasible certificate"));
    }
    if !(initial_gap > 0.0 && tol > 0.0) {
        return Err(Error::invalid("gap and tolerance must be positive"));
    }
    let start = potential_scale(cert) * initial_gap;
    if tol >= start {
        return Ok(0);
    }
    if cert.rate <= 0.0 {
        return Ok(1);
    }
    let k = ((start / tol).ln() / (1.0 / cert.rate).ln()).ceil();
    Ok(k as usize)
}
