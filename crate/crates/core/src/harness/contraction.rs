use super::{IterateTrace, Potential};
use crate::certify::{CertKind, RateCertificate};
use crate::error::{Error, Result};

/// Slack allowed on each observed ratio above the certified rate.
pub const CONTRACTION_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct ContractionReport {
    pub rate: f64,
    /// Number of consecutive pairs whose ratio was compared.
    pub checked: usize,
    /// Largest observed ratio minus the certified rate (per step), `-inf` if nothing was checked.
    pub max_violation: f64,
    pub max_ratio: f64,
    /// Iterations `k` whose step `k → k+1` exceeded the rate by more than [`CONTRACTION_TOL`].
    pub violating_iters: Vec<usize>,
    /// Endpoint bound `value_k ≤ c·rate^k·value_0` (optimistic and optimization certificates only).
    pub endpoint_checked: usize,
    pub endpoint_max_violation: f64,
    pub endpoint_violating_iters: Vec<usize>,
}

impl ContractionReport {
    pub fn passes(&self) -> bool {
        self.violating_iters.is_empty() && self.endpoint_violating_iters.is_empty()
    }
}

fn series(trace: &IterateTrace, p: Potential) -> Result<Vec<f64>> {
    if trace.potential == Some(p) {
        return trace
            .records
            .iter()
            .map(|r| r.potential.ok_or_else(|| Error::invalid("trace lacks potential values")))
            .collect();
    }
    let dist: Vec<f64> = trace
        .records
        .iter()
        .map(|r| r.dist_sq.ok_or_else(|| Error::invalid("trace lacks distances to the solution")))
        .collect::<Result<_>>()?;
    match p {
        Potential::Distance => Ok(dist),
        Potential::TwoTerm { theta } => {
            if trace.records.iter().enumerate().any(|(i, r)| r.k != trace.records[0].k + i) {
                return Err(Error::invalid("the two-term potential needs an unthinned trace"));
            }
            Ok((0..dist.len())
                .map(|i| dist[i] + theta * dist[i.saturating_sub(1)])
                .collect())
        }
        _ => Err(Error::invalid(format!(
            "trace does not record the {} potential the certificate needs",
            p.name()
        ))),
    }
}

fn noise_floor(p: Potential, resolution: f64, lip: f64) -> f64 {
    let r2 = resolution * resolution;
    match p {
        Potential::Distance => r2,
        Potential::TwoTerm { theta } => (1.0 + theta) * r2,
        Potential::Ogda { .. } => 4.0 * r2,
        Potential::Lyapunov { c } => (lip / 2.0 + c) * r2,
    }
}

/// Checks that the certificate's potential shrinks by at least `rate` per step
/// along the trace (`rate^Δk` across thinned gaps).
///
/// Steps starting from a potential below the rounding floor are skipped: the
/// larger of `1e-14·V₀` and the potential of a point at the trace's resolution
/// distance from the solution.
pub fn check_contraction(trace: &IterateTrace, cert: &RateCertificate) -> Result<ContractionReport> {
    if trace.records.is_empty() {
        return Err(Error::invalid("empty trace"));
    }
    if !cert.feasible {
        return Err(Error::invalid("certificate is infeasible"));
    }
    let s = series(trace, cert.potential)?;
    let resolution = trace.resolution.unwrap_or(0.0);
    let floor = (1e-14 * s[0]).max(noise_floor(cert.potential, resolution, cert.lip));
    let mut report = ContractionReport {
        rate: cert.rate,
        checked: 0,
        max_violation: f64::NEG_INFINITY,
        max_ratio: f64::NEG_INFINITY,
        violating_iters: Vec::new(),
        endpoint_checked: 0,
        endpoint_max_violation: f64::NEG_INFINITY,
        endpoint_violating_iters: Vec::new(),
    };
    for i in 0..s.len().saturating_sub(1) {
        let (k0, k1) = (trace.records[i].k, trace.records[i + 1].k);
        let (now, next) = (s[i], s[i + 1]);
        let ratio = if now == 0.0 && next == 0.0 {
            0.0
        } else if now < floor {
            continue;
        } else {
            next / now
        };
        let violation = ratio - cert.rate.powi((k1 - k0) as i32);
        report.checked += 1;
        report.max_ratio = report.max_ratio.max(ratio);
        report.max_violation = report.max_violation.max(violation);
        if violation > CONTRACTION_TOL || violation.is_nan() {
            report.violating_iters.push(k0);
        }
    }
    endpoint(trace, cert, resolution, &mut report);
    Ok(report)
}

fn endpoint(trace: &IterateTrace, cert: &RateCertificate, resolution: f64, report: &mut ContractionReport) {
    let r2 = resolution * resolution;
    let (values, factor, floor): (Vec<Option<f64>>, f64, f64) = match cert.kind {
        CertKind::Ogda => (trace.records.iter().map(|r| r.dist_sq).collect(), 2.0, r2),
        CertKind::Opt if trace.potential.is_some() => (
            trace.records.iter().map(|r| Some(r.merit_aux)).collect(),
            1.0 + 2.0 * cert.c / cert.mu,
            cert.lip / 2.0 * r2,
        ),
        _ => return,
    };
    let Some(Some(v0)) = values.first().copied() else {
        return;
    };
    let k_start = trace.records[0].k;
    for (r, v) in trace.records.iter().zip(values) {
        let Some(v) = v else { continue };
        let bound = factor * cert.rate.powi((r.k - k_start) as i32) * v0;
        if v <= bound {
            report.endpoint_checked += 1;
            report.endpoint_max_violation = report.endpoint_max_violation.max((v - bound) / v0.max(f64::MIN_POSITIVE));
            continue;
        }
        if v < floor {
            continue;
        }
        let violation = (v - bound) / v0;
        report.endpoint_checked += 1;
        report.endpoint_max_violation = report.endpoint_max_violation.max(violation);
        if violation > CONTRACTION_TOL {
            report.endpoint_violating_iters.push(r.k);
        }
    }
}
