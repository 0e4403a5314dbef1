//! Reconstruction loss, complexity penalties and per-domain model selection.
//!
//! The effective loss of a candidate is `p(K) * E` where `E` is the summed
//! squared residual and `p` is a multiplier in `(0, 1]` that shrinks the loss
//! of simpler models. Summed (not averaged) losses are additive over disjoint
//! subdomains, which is what makes two-model losses comparable to the
//! one-model loss of their union.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::basis::Basis;
use crate::error::{Error, Result};
use crate::model::{fit, PowerSeriesModel};
use crate::sample::SampleSet;

/// Raw losses at or below this fraction of the data energy are rounding noise
/// from an exact fit and are scored as zero.
pub const EXACT_FIT_RTOL: f64 = 1e-20;

/// Complexity penalty `p(K)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PenaltySpec {
    /// Multiplier 1 for every model.
    #[default]
    Unit,
    /// `p(K) = 1 - alpha * (k_max - K)` for `K <= k_max`.
    Affine { alpha: f64, k_max: u32 },
    /// Explicit multipliers per complexity.
    Table { multipliers: BTreeMap<u32, f64> },
}

impl PenaltySpec {
    pub fn affine(alpha: f64, k_max: u32) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::Config(format!(
                "penalty alpha must be >= 0, got {alpha}"
            )));
        }
        if alpha * k_max as f64 >= 1.0 {
            return Err(Error::Config(format!(
                "penalty alpha {alpha} makes p(0) non-positive for k_max {k_max}"
            )));
        }
        Ok(PenaltySpec::Affine { alpha, k_max })
    }

    pub fn table(multipliers: BTreeMap<u32, f64>) -> Result<Self> {
        if let Some((k, m)) = multipliers.iter().find(|(_, &m)| !(m > 0.0 && m <= 1.0)) {
            return Err(Error::Config(format!(
                "penalty multiplier for K={k} must lie in (0, 1], got {m}"
            )));
        }
        Ok(PenaltySpec::Table { multipliers })
    }

    /// The multiplier `p(K)` applied to the reconstruction loss of a degree-`k` model.
    pub fn multiplier(&self, k: u32) -> Result<f64> {
        match self {
            PenaltySpec::Unit => Ok(1.0),
            PenaltySpec::Affine { alpha, k_max } => {
                if k > *k_max {
                    return Err(Error::PenaltyDomain(k));
                }
                let m = 1.0 - alpha * f64::from(k_max - k);
                if m > 0.0 && m <= 1.0 {
                    Ok(m)
                } else {
                    Err(Error::PenaltyDomain(k))
                }
            }
            PenaltySpec::Table { multipliers } => {
                multipliers.get(&k).copied().ok_or(Error::PenaltyDomain(k))
            }
        }
    }
}

/// Candidate bases for a domain, ordered by increasing complexity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFamily {
    candidates: Vec<Basis>,
}

impl ModelFamily {
    pub fn new(candidates: Vec<Basis>) -> Result<Self> {
        let first = candidates
            .first()
            .ok_or_else(|| Error::Config("model family is empty".into()))?;
        if candidates.iter().any(|b| b.dim() != first.dim()) {
            return Err(Error::Config("model family mixes input dimensions".into()));
        }
        if candidates
            .windows(2)
            .any(|w| w[0].complexity() >= w[1].complexity())
        {
            return Err(Error::Config(
                "model family must be ordered by strictly increasing degree".into(),
            ));
        }
        Ok(Self { candidates })
    }

    /// Univariate polynomials of degree `0..=max_degree`.
    pub fn polynomials(max_degree: u32) -> Self {
        Self {
            candidates: (0..=max_degree).map(Basis::univariate).collect(),
        }
    }

    /// A family with exactly one candidate.
    pub fn single(basis: Basis) -> Self {
        Self {
            candidates: vec![basis],
        }
    }

    pub fn candidates(&self) -> &[Basis] {
        &self.candidates
    }

    pub fn dim(&self) -> usize {
        self.candidates[0].dim()
    }

    pub fn max_complexity(&self) -> u32 {
        self.candidates.last().map(Basis::complexity).unwrap_or(0)
    }

    pub fn max_term_count(&self) -> usize {
        self.candidates
            .iter()
            .map(Basis::term_count)
            .max()
            .unwrap_or(1)
    }
}

/// A fitted model together with its raw and penalized losses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredModel {
    pub model: PowerSeriesModel,
    pub raw_loss: f64,
    pub effective_loss: f64,
}

impl ScoredModel {
    pub fn complexity(&self) -> u32 {
        self.model.basis().complexity()
    }
}

/// Summed squared residual over every sample and output component.
pub fn reconstruction_loss(model: &PowerSeriesModel, data: &SampleSet) -> Result<f64> {
    if data.dim() != model.basis().dim() {
        return Err(Error::DimensionMismatch {
            expected: model.basis().dim(),
            actual: data.dim(),
        });
    }
    if data.outputs() != model.outputs() {
        return Err(Error::DimensionMismatch {
            expected: model.outputs(),
            actual: data.outputs(),
        });
    }
    let mut row = vec![0.0; model.basis().term_count()];
    let mut pred = vec![0.0; model.outputs()];
    let mut total = 0.0;
    for (point, value) in data.points().zip(data.values()) {
        model.evaluate_into(point, &mut row, &mut pred);
        total += pred
            .iter()
            .zip(value)
            .map(|(p, v)| (v - p) * (v - p))
            .sum::<f64>();
    }
    Ok(total)
}

/// Index and effective loss of the smallest `p(K) * E` among `(K, E)` pairs.
///
/// Ties go to the earliest entry, which in a family is the least complex model.
pub fn argmin_effective(raw: &[(u32, f64)], penalty: &PenaltySpec) -> Result<Option<(usize, f64)>> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &(k, loss)) in raw.iter().enumerate() {
        let eff = penalty.multiplier(k)? * loss;
        if best.is_none_or(|(_, b)| eff < b) {
            best = Some((i, eff));
        }
    }
    Ok(best)
}

/// Fits every candidate of `family` and keeps the one with the smallest effective loss.
///
/// A raw loss within [`EXACT_FIT_RTOL`] of zero is recorded as exactly zero, so
/// that equally exact fits are ranked by the penalty alone.
/// Candidates that cannot be fitted (too few samples, rank deficiency) are
/// skipped; if none can be fitted the last fit failure is returned.
pub fn select_model(
    data: &SampleSet,
    family: &ModelFamily,
    penalty: &PenaltySpec,
) -> Result<ScoredModel> {
    let floor = EXACT_FIT_RTOL * data.energy();
    let mut fitted = Vec::with_capacity(family.candidates().len());
    let mut last_failure = None;
    for basis in family.candidates() {
        match fit(data, *basis) {
            Ok(model) => {
                let raw = reconstruction_loss(&model, data)?;
                fitted.push((model, if raw <= floor { 0.0 } else { raw }));
            }
            Err(e) if e.is_fit_failure() => last_failure = Some(e),
            Err(e) => return Err(e),
        }
    }
    let raw: Vec<(u32, f64)> = fitted
        .iter()
        .map(|(m, loss)| (m.basis().complexity(), *loss))
        .collect();
    match argmin_effective(&raw, penalty)? {
        Some((i, effective_loss)) => {
            let (model, raw_loss) = fitted.swap_remove(i);
            Ok(ScoredModel {
                model,
                raw_loss,
                effective_loss,
            })
        }
        None => Err(Error::NoFittableModel(Box::new(
            last_failure.unwrap_or_else(|| Error::Config("model family is empty".into())),
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_multipliers_are_exact() {
        let p = PenaltySpec::affine(0.15, 2).unwrap();
        assert_eq!(p.multiplier(0).unwrap(), 0.7);
        assert_eq!(p.multiplier(1).unwrap(), 0.85);
        assert_eq!(p.multiplier(2).unwrap(), 1.0);
        let p = PenaltySpec::affine(0.10, 2).unwrap();
        assert_eq!(p.multiplier(0).unwrap(), 0.8);
        assert_eq!(p.multiplier(1).unwrap(), 0.9);
        assert_eq!(p.multiplier(2).unwrap(), 1.0);
        assert!(matches!(p.multiplier(3), Err(Error::PenaltyDomain(3))));
    }

    #[test]
    fn penalty_construction_errors() {
        assert!(PenaltySpec::affine(-0.1, 2).is_err());
        assert!(PenaltySpec::affine(0.5, 2).is_err());
        assert!(PenaltySpec::table(BTreeMap::from([(0, 0.0)])).is_err());
        let t = PenaltySpec::table(BTreeMap::from([(0, 0.5), (1, 1.0)])).unwrap();
        assert_eq!(t.multiplier(0).unwrap(), 0.5);
        assert!(t.multiplier(2).is_err());
        assert_eq!(PenaltySpec::Unit.multiplier(99).unwrap(), 1.0);
    }

    #[test]
    fn family_validation() {
        assert!(ModelFamily::new(vec![]).is_err());
        assert!(ModelFamily::new(vec![Basis::univariate(1), Basis::univariate(1)]).is_err());
        assert!(ModelFamily::new(vec![Basis::univariate(0), Basis::bivariate(1, 1)]).is_err());
        let f = ModelFamily::polynomials(2);
        assert_eq!(f.max_term_count(), 3);
        assert_eq!(
            ModelFamily::single(Basis::bivariate(3, 3)).max_term_count(),
            16
        );
    }

    #[test]
    fn argmin_prefers_discounted_constant() {
        // Raw (100, 90, 80) at alpha 0.15 -> effective (70, 76.5, 80).
        let p = PenaltySpec::affine(0.15, 2).unwrap();
        let (i, eff) = argmin_effective(&[(0, 100.0), (1, 90.0), (2, 80.0)], &p)
            .unwrap()
            .unwrap();
        assert_eq!(i, 0);
        assert!((eff - 70.0).abs() < 1e-12);
    }

    #[test]
    fn ties_prefer_simpler_model() {
        let (i, _) = argmin_effective(&[(0, 5.0), (1, 5.0)], &PenaltySpec::Unit)
            .unwrap()
            .unwrap();
        assert_eq!(i, 0);
    }

    #[test]
    fn losses() {
        let data = SampleSet::from_xy(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0]).unwrap();
        let constant = PowerSeriesModel::new(Basis::univariate(0), 1, vec![1.0 / 3.0]).unwrap();
        let loss = reconstruction_loss(&constant, &data).unwrap();
        assert!((loss - 2.0 / 3.0).abs() < 1e-15);

        let vector = SampleSet::new(1, 2, vec![0.0], vec![1.0, 1.0]).unwrap();
        let zero = PowerSeriesModel::zeros(Basis::univariate(0), 2);
        assert_eq!(reconstruction_loss(&zero, &vector).unwrap(), 2.0);

        let wrong = PowerSeriesModel::zeros(Basis::univariate(0), 1);
        assert!(reconstruction_loss(&wrong, &vector).is_err());
    }

    #[test]
    fn clean_linear_selects_linear() {
        let xs: Vec<f64> = (0..50).map(|i| i as f64 * 0.2).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 2.0).collect();
        let data = SampleSet::from_xy(&xs, &ys).unwrap();
        let chosen = select_model(
            &data,
            &ModelFamily::polynomials(2),
            &PenaltySpec::affine(0.15, 2).unwrap(),
        )
        .unwrap();
        assert_eq!(chosen.complexity(), 1);
    }

    #[test]
    fn skips_unfittable_candidates() {
        let data = SampleSet::from_xy(&[0.0, 1.0], &[1.0, 3.0]).unwrap();
        let chosen = select_model(
            &data,
            &ModelFamily::polynomials(2),
            &PenaltySpec::affine(0.15, 2).unwrap(),
        )
        .unwrap();
        // The quadratic is underdetermined; the exact line beats the constant.
        assert_eq!(chosen.complexity(), 1);
        let tiny = SampleSet::from_xy(&[0.0], &[1.0]).unwrap();
        let err = select_model(
            &tiny,
            &ModelFamily::single(Basis::univariate(2)),
            &PenaltySpec::Unit,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NoFittableModel(_)));
    }
}
