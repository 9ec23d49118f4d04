//! Archive trustworthiness: progress stage, convergence-archive maturity and
//! the mapping from trust to search controls.

use crate::directions::{count_segments, ReferenceDirections};
use crate::error::{config, Result};
use crate::pareto::{nondominated_indices, ObjectiveScale};
use crate::solution::Population;

#[derive(Debug, Clone, PartialEq)]
pub struct TrustParams {
    /// Start of the exploration-to-exploitation transition, as a fraction of the run.
    pub tau_s: f64,
    /// End of the transition window.
    pub tau_e: f64,
    /// Size-maturity proportion: ND(C) is mature once it holds `mu * N` members.
    pub mu: f64,
    /// Number of coverage bins; `None` uses the archive capacity.
    pub bins: Option<usize>,
    /// Segment penalty.
    pub kappa: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub lambda_exp: f64,
    pub k_min: usize,
    /// `None` uses the total group count.
    pub k_max: Option<usize>,
    pub rho_min: f64,
    pub rho_max: f64,
}

impl Default for TrustParams {
    fn default() -> Self {
        Self {
            tau_s: 0.1,
            tau_e: 0.6,
            mu: 0.5,
            bins: None,
            kappa: 1.0,
            alpha: 1.0 / 3.0,
            beta: 1.0 / 3.0,
            gamma: 1.0 / 3.0,
            p_min: 0.1,
            p_max: 0.9,
            lambda_exp: 1.25,
            k_min: 1,
            k_max: None,
            rho_min: 0.1,
            rho_max: 0.8,
        }
    }
}

impl TrustParams {
    /// Checks every range constraint against a structure with `groups` groups.
    pub fn validate(&self, groups: usize) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !(0.0..1.0).contains(&self.tau_s) || !(0.0..1.0).contains(&self.tau_e) || self.tau_s >= self.tau_e {
            return Err(config(format!(
                "stage window requires 0 <= tau_s < tau_e < 1, got {} / {}",
                self.tau_s, self.tau_e
            )));
        }
        if !(self.mu > 0.0) || !(self.kappa > 0.0) || !(self.lambda_exp > 0.0) {
            return Err(config("mu, kappa and lambda_exp must be positive"));
        }
        if self.bins == Some(0) {
            return Err(config("bin count must be positive"));
        }
        let w = [self.alpha, self.beta, self.gamma];
        if w.iter().any(|&v| v < 0.0) || (w.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(config("maturity weights must be nonnegative and sum to 1"));
        }
        if !(unit(self.p_min) && unit(self.p_max) && self.p_min < self.p_max) {
            return Err(config("exploration bounds require 0 <= p_min < p_max <= 1"));
        }
        if !(unit(self.rho_min) && unit(self.rho_max) && self.rho_min <= self.rho_max) {
            return Err(config("repair bounds require 0 <= rho_min <= rho_max <= 1"));
        }
        let k_max = self.k_max.unwrap_or(groups);
        if self.k_min < 1 || self.k_min > k_max || k_max > groups {
            return Err(config(format!(
                "active group bounds require 1 <= k_min <= k_max <= K, got {} / {} / {}",
                self.k_min, k_max, groups
            )));
        }
        Ok(())
    }

    pub fn resolved_k_max(&self, groups: usize) -> usize {
        self.k_max.unwrap_or(groups)
    }
}

/// Normalized progress and stage factor of generation `t` out of `max_gen`.
pub fn compute_progress_stage(t: usize, max_gen: usize, params: &TrustParams) -> Result<(f64, f64)> {
    if max_gen < 2 {
        return Err(config(format!("at least two generations required, got {max_gen}")));
    }
    let p = t as f64 / (max_gen - 1) as f64;
    Ok((p, stage_factor(p, params)))
}

pub(crate) fn stage_factor(p: f64, params: &TrustParams) -> f64 {
    ((p - params.tau_s) / (params.tau_e - params.tau_s)).clamp(0.0, 1.0)
}

/// Components of convergence-archive maturity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Maturity {
    pub m_size: f64,
    pub m_cov: f64,
    pub m_shape: f64,
    pub maturity: f64,
}

/// Coverage of a set of normalized points over reference directions.
pub(crate) fn coverage(points: &[Vec<f64>], dirs: &ReferenceDirections) -> f64 {
    if dirs.is_empty() {
        return 0.0;
    }
    dirs.occupied(points) as f64 / dirs.len() as f64
}

pub(crate) fn bin_directions(m: usize, params: &TrustParams, capacity: usize) -> ReferenceDirections {
    ReferenceDirections::new(m, params.bins.unwrap_or(capacity.max(1)))
}

/// Maturity of the convergence archive from its nondominated subset.
pub fn compute_maturity(archive: &Population, params: &TrustParams, scale: &ObjectiveScale) -> Maturity {
    if archive.is_empty() {
        return Maturity::default();
    }
    let nd = nondominated_indices(&archive.members);
    let capacity = archive.capacity.max(1);
    let m_size = (nd.len() as f64 / (params.mu * capacity as f64)).min(1.0);
    let normalized: Vec<Vec<f64>> = nd
        .iter()
        .map(|&i| scale.normalize(&archive.members[i].f))
        .collect();
    let dirs = bin_directions(scale.dim(), params, capacity);
    let m_cov = coverage(&normalized, &dirs);
    let segments = count_segments(&normalized);
    let m_shape = 1.0 / (1.0 + params.kappa * (segments as f64 - 1.0));
    let maturity = params.alpha * m_size + params.beta * m_cov + params.gamma * m_shape;
    Maturity {
        m_size,
        m_cov,
        m_shape,
        maturity: maturity.clamp(0.0, 1.0),
    }
}

/// Trustworthiness: the stage factor gating archive maturity.
pub fn compute_trust(phi: f64, maturity: f64) -> f64 {
    (phi * maturity).clamp(0.0, 1.0)
}

/// Offspring-generation controls derived from trust.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchControls {
    pub p_explore: f64,
    pub k_active: usize,
    pub rho: f64,
}

pub fn derive_controls(trust: f64, params: &TrustParams, groups: usize) -> SearchControls {
    let trust = trust.clamp(0.0, 1.0);
    let k_max = params.resolved_k_max(groups);
    let p_explore = params.p_max - (params.p_max - params.p_min) * trust.powf(params.lambda_exp);
    let k_raw = params.k_min as f64 + (k_max - params.k_min) as f64 * trust;
    let k_active = (k_raw.ceil() as usize).clamp(params.k_min, k_max);
    let rho = params.rho_min + (params.rho_max - params.rho_min) * trust;
    SearchControls {
        p_explore: p_explore.clamp(params.p_min, params.p_max),
        k_active,
        rho: rho.clamp(params.rho_min, params.rho_max),
    }
}

/// Per-generation trust record.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrustState {
    pub p: f64,
    pub phi: f64,
    pub m_size: f64,
    pub m_cov: f64,
    pub m_shape: f64,
    pub maturity: f64,
    pub trust: f64,
}

/// Full trust evaluation for generation `t`.
pub fn evaluate_trust(
    t: usize,
    max_gen: usize,
    archive: &Population,
    params: &TrustParams,
    scale: &ObjectiveScale,
) -> Result<TrustState> {
    let (p, phi) = compute_progress_stage(t, max_gen, params)?;
    let m = compute_maturity(archive, params, scale);
    Ok(TrustState {
        p,
        phi,
        m_size: m.m_size,
        m_cov: m.m_cov,
        m_shape: m.m_shape,
        maturity: m.maturity,
        trust: compute_trust(phi, m.maturity),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solution::Solution;
    use proptest::prelude::*;

    fn front(points: &[(f64, f64)], capacity: usize) -> Population {
        Population::new(
            points
                .iter()
                .map(|&(a, b)| Solution::unconstrained(vec![a], vec![a, b]))
                .collect(),
            capacity,
        )
    }

    fn unit_scale() -> ObjectiveScale {
        ObjectiveScale::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn progress_stage_examples() {
        let p = TrustParams::default();
        assert_eq!(compute_progress_stage(0, 500, &p).unwrap(), (0.0, 0.0));
        assert_eq!(compute_progress_stage(499, 500, &p).unwrap(), (1.0, 1.0));
        let (pr, phi) = compute_progress_stage(149, 500, &p).unwrap();
        // 149/499 and (149/499 - 0.1)/0.5
        assert!((pr - 0.298_597_194_388_777_6).abs() < 1e-12);
        assert!((phi - 0.397_194_388_777_555_1).abs() < 1e-12);
        assert!(compute_progress_stage(0, 1, &p).is_err());
    }

    #[test]
    fn size_maturity_saturates() {
        let pts: Vec<(f64, f64)> = (0..50).map(|i| (i as f64 / 49.0, 1.0 - i as f64 / 49.0)).collect();
        let m = compute_maturity(&front(&pts, 100), &TrustParams::default(), &unit_scale());
        assert_eq!(m.m_size, 1.0);
        assert_eq!(m.m_shape, 1.0);
    }

    #[test]
    fn shape_maturity_three_segments() {
        let mut pts = Vec::new();
        for c in [0.0, 0.45, 0.9] {
            for i in 0..5 {
                let a = c + i as f64 * 0.02;
                pts.push((a, 1.0 - a));
            }
        }
        let m = compute_maturity(&front(&pts, 100), &TrustParams::default(), &unit_scale());
        assert!((m.m_shape - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_archive_is_immature() {
        let m = compute_maturity(&Population::empty(10), &TrustParams::default(), &unit_scale());
        assert_eq!(m, Maturity::default());
    }

    #[test]
    fn singleton_archive() {
        let m = compute_maturity(&front(&[(0.5, 0.5)], 10), &TrustParams::default(), &unit_scale());
        assert_eq!(m.m_shape, 1.0);
        assert_eq!(m.m_cov, 0.1);
    }

    #[test]
    fn trust_examples() {
        assert_eq!(compute_trust(0.0, 0.9), 0.0);
        assert_eq!(compute_trust(1.0, 1.0), 1.0);
        assert!((compute_trust(0.4, 0.75) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn controls_examples() {
        let mut p = TrustParams::default();
        p.k_max = Some(6);
        let lo = derive_controls(0.0, &p, 6);
        assert_eq!(lo, SearchControls { p_explore: 0.9, k_active: 1, rho: 0.1 });
        let hi = derive_controls(1.0, &p, 6);
        assert!((hi.p_explore - 0.1).abs() < 1e-12 && hi.k_active == 6 && (hi.rho - 0.8).abs() < 1e-12);
        let mid = derive_controls(0.5, &p, 6);
        // 0.9 - 0.8 * 0.5^1.25
        assert!((mid.p_explore - 0.563_641_433_898_514_2).abs() < 1e-9);
        assert_eq!(mid.k_active, 4);
        assert!((mid.rho - 0.45).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        let p = TrustParams::default();
        assert!(p.validate(6).is_ok());
        assert!(TrustParams { tau_s: 0.7, ..p.clone() }.validate(6).is_err());
        assert!(TrustParams { alpha: 0.5, ..p.clone() }.validate(6).is_err());
        assert!(TrustParams { k_max: Some(7), ..p.clone() }.validate(6).is_err());
        assert!(TrustParams { rho_min: 0.9, ..p }.validate(6).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn trust_is_gated_and_bounded(
            t in 0usize..500,
            pts in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..30),
        ) {
            let p = TrustParams::default();
            let s = evaluate_trust(t, 500, &front(&pts, 20), &p, &unit_scale()).unwrap();
            prop_assert!((0.0..=1.0).contains(&s.trust));
            if s.p <= p.tau_s {
                prop_assert_eq!(s.trust, 0.0);
            }
        }

        #[test]
        fn controls_are_monotone(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let p = TrustParams::default();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let cl = derive_controls(lo, &p, 6);
            let ch = derive_controls(hi, &p, 6);
            prop_assert!(cl.p_explore >= ch.p_explore);
            prop_assert!(cl.k_active <= ch.k_active);
            prop_assert!(cl.rho <= ch.rho);
        }

        #[test]
        fn maturity_in_unit_interval(pts in prop::collection::vec((-2.0f64..3.0, -2.0f64..3.0), 0..40)) {
            let m = compute_maturity(&front(&pts, 20), &TrustParams::default(), &unit_scale());
            for v in [m.m_size, m.m_cov, m.m_shape, m.maturity] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
    }
}
