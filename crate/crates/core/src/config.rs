//! Run configuration: built-in defaults, overridden by a TOML file, overridden
//! by command-line flags.

use serde::{Deserialize, Serialize};

use crate::matcher::{weights_from_slice, ConfigError, PipelineOrder, WeightConfig};
use crate::model::ModelOptions;
use crate::similarity::LabelCombine;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RunConfig {
    pub matcher: WeightConfig,
    pub model: ModelOptions,
}

/// A partial configuration. Every field left as `None` keeps the value from
/// the layer below.
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub weights: Option<Vec<f64>>,
    pub pre_filter: Option<f64>,
    pub min_confidence: Option<f64>,
    pub stable_matching: Option<bool>,
    pub fallback_factor: Option<f64>,
    pub label_combine: Option<LabelCombine>,
    pub order: Option<PipelineOrder>,
    pub synonyms: Option<bool>,
    pub local_name_labels: Option<bool>,
}

impl ConfigOverrides {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

impl RunConfig {
    pub fn apply(mut self, o: &ConfigOverrides) -> Result<Self, ConfigError> {
        if let Some(w) = &o.weights {
            self.matcher.weights = weights_from_slice(w)?;
        }
        let m = &mut self.matcher;
        m.pre_filter = o.pre_filter.unwrap_or(m.pre_filter);
        m.min_confidence = o.min_confidence.unwrap_or(m.min_confidence);
        m.stable_matching = o.stable_matching.unwrap_or(m.stable_matching);
        m.fallback_factor = o.fallback_factor.unwrap_or(m.fallback_factor);
        m.label_combine = o.label_combine.unwrap_or(m.label_combine);
        m.order = o.order.unwrap_or(m.order);
        let model = &mut self.model;
        model.synonyms_enabled = o.synonyms.unwrap_or(model.synonyms_enabled);
        model.local_name_labels = o.local_name_labels.unwrap_or(model.local_name_labels);
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.matcher.validate()
    }
}
