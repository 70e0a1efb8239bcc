//! Bounds and seeds for a pipeline run.

use serde::{Deserialize, Serialize};

use super::corpus::CorpusSpec;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// iterates used to decide weak attraction of strata
    pub n_attraction: usize,
    pub m_flare: usize,
    pub n_strict: usize,
    pub ball_radius: usize,
    pub peripheral_enumeration_bound: usize,
    pub conjugator_bound: usize,
    pub leaf_library_depth: usize,
    pub corpus: CorpusSpec,
    pub rotationless_power: Option<usize>,
    pub growth_bound: usize,
    pub stabilize_depth: usize,
    pub stabilize_length: usize,
    pub nielsen_length_bound: usize,
    pub periodic_period_bound: usize,
    pub periodic_length_bound: usize,
    pub recursion_depth: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            n_attraction: 20,
            m_flare: 8,
            n_strict: 8,
            ball_radius: 100_000,
            peripheral_enumeration_bound: 1,
            conjugator_bound: 0,
            leaf_library_depth: 10,
            corpus: CorpusSpec::default(),
            rotationless_power: None,
            growth_bound: 12,
            stabilize_depth: 8,
            stabilize_length: 4,
            nielsen_length_bound: 6,
            periodic_period_bound: 6,
            periodic_length_bound: 4,
            recursion_depth: 8,
        }
    }
}

impl AnalysisConfig {
    pub fn from_json(text: &str) -> Result<AnalysisConfig, String> {
        let c: AnalysisConfig = serde_json::from_str(text).map_err(|e| e.to_string())?;
        c.validate()?;
        Ok(c)
    }

    /// Every bound must be positive; the corpus range must be nonempty.
    pub fn validate(&self) -> Result<(), String> {
        let bounds = [
            ("n_attraction", self.n_attraction),
            ("m_flare", self.m_flare),
            ("n_strict", self.n_strict),
            ("ball_radius", self.ball_radius),
            (
                "peripheral_enumeration_bound",
                self.peripheral_enumeration_bound,
            ),
            ("leaf_library_depth", self.leaf_library_depth),
            ("growth_bound", self.growth_bound),
            ("stabilize_depth", self.stabilize_depth),
            ("stabilize_length", self.stabilize_length),
            ("nielsen_length_bound", self.nielsen_length_bound),
            ("periodic_period_bound", self.periodic_period_bound),
            ("periodic_length_bound", self.periodic_length_bound),
            ("recursion_depth", self.recursion_depth),
        ];
        if let Some((name, _)) = bounds.iter().find(|(_, v)| *v == 0) {
            return Err(format!("{name} must be positive"));
        }
        if self.rotationless_power == Some(0) {
            return Err("rotationless_power must be positive".into());
        }
        let c = &self.corpus;
        if c.min_len > c.max_len || c.max_len == 0 {
            return Err(format!(
                "empty corpus length range {}..={}",
                c.min_len, c.max_len
            ));
        }
        Ok(())
    }
}
