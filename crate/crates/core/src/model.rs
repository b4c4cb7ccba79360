//! JSON model document.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::FeatureScaler;
use crate::error::{Error, Result};
use crate::link::SigmoidKind;
use crate::objective::WeightVector;
use crate::scalar::Scalar;
use crate::target::{TargetScaler, DEFAULT_EPSILON};
use crate::trainers::{Algorithm, TrainConfig, TrainedModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScalerDoc {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
}

/// Flat, f64-valued snapshot of a [`TrainedModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub algorithm: String,
    pub weights: Vec<f64>,
    pub y_min: Option<f64>,
    pub y_max: Option<f64>,
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub feature_scaler: Option<FeatureScalerDoc>,
    pub iterations: usize,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default = "default_sigmoid")]
    pub sigmoid: String,
}

fn default_sigmoid() -> String {
    SigmoidKind::Exact.as_str().to_string()
}

fn conv<T: Scalar>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.as_f64()).collect()
}

fn back<T: Scalar>(v: &[f64]) -> Vec<T> {
    v.iter().map(|&x| T::lit(x)).collect()
}

impl ModelDocument {
    pub fn from_model<T: Scalar>(m: &TrainedModel<T>) -> Self {
        Self {
            algorithm: m.algorithm.as_str().to_string(),
            weights: conv(m.weights.as_slice().expect("contiguous weights")),
            y_min: m.scaler.map(|s| s.y_min.as_f64()),
            y_max: m.scaler.map(|s| s.y_max.as_f64()),
            epsilon: m.scaler.map(|s| s.epsilon).unwrap_or(m.config.epsilon).as_f64(),
            gamma: m.scaler.and_then(|s| s.gamma).map(Scalar::as_f64),
            feature_scaler: m.feature_scaler.as_ref().map(|f| FeatureScalerDoc {
                mins: conv(&f.mins),
                maxs: conv(&f.maxs),
                lo: f.lo.as_f64(),
                hi: f.hi.as_f64(),
            }),
            iterations: m.config.iterations,
            lambda: m.config.lambda.as_f64(),
            sigmoid: m.config.sigmoid_kind.as_str().to_string(),
        }
    }

    pub fn into_model<T: Scalar>(self) -> Result<TrainedModel<T>> {
        let algorithm: Algorithm = self.algorithm.parse()?;
        let epsilon = T::lit(self.epsilon);
        let scaler = match (self.y_min, self.y_max) {
            (Some(lo), Some(hi)) => {
                Some(TargetScaler::new(T::lit(lo), T::lit(hi), epsilon, self.gamma.map(T::lit))?)
            }
            (None, None) => None,
            _ => return Err(Error::Schema("y_min and y_max must be given together".into())),
        };
        let feature_scaler = self.feature_scaler.map(|f| FeatureScaler {
            mins: back(&f.mins),
            maxs: back(&f.maxs),
            lo: T::lit(f.lo),
            hi: T::lit(f.hi),
        });
        if let Some(fs) = &feature_scaler {
            if fs.mins.len() + 1 != self.weights.len() || fs.maxs.len() != fs.mins.len() {
                return Err(Error::Schema("feature scaler width does not match weights".into()));
            }
        }
        let mut config = TrainConfig::new(algorithm, self.iterations)
            .with_lambda(T::lit(self.lambda))
            .with_sigmoid(self.sigmoid.parse()?)
            .with_normalized_targets(algorithm == Algorithm::Linear && scaler.is_some());
        config.epsilon = epsilon;
        if let Some(g) = self.gamma {
            config.gamma = T::lit(g);
        }
        Ok(TrainedModel {
            weights: WeightVector::from_vec(back(&self.weights)),
            scaler,
            feature_scaler,
            algorithm,
            config,
            trace: Vec::new(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl Default for ModelDocument {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Linear.as_str().into(),
            weights: Vec::new(),
            y_min: None,
            y_max: None,
            epsilon: DEFAULT_EPSILON,
            gamma: None,
            feature_scaler: None,
            iterations: 0,
            lambda: 0.0,
            sigmoid: default_sigmoid(),
        }
    }
}
