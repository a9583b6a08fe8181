//! Named, interchangeable strategies: consistency classifiers (CR, PR) and
//! PCM generators (logical, random, coerced). Front ends look them up by
//! name so benchmarks and simulations can be configured at runtime.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use crate::consistency::cr_threshold;
use crate::error::{Error, Result};
use crate::ml::{LogitModel, Verdict};
use crate::pcm::Pcm;
use crate::simulate::{harker_coerce, simulate_logical_with_pool, simulate_random, Source};

/// Everything a classifier may look at for one matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evidence {
    pub order: usize,
    pub cr: f64,
    pub prop3_rev: f64,
    pub max3_rev: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assessment {
    pub verdict: Verdict,
    /// Method-specific score (CR value, or probability of consistency).
    pub score: f64,
}

pub trait ConsistencyClassifier: Send + Sync {
    fn name(&self) -> &'static str;
    fn assess(&self, evidence: &Evidence) -> Assessment;
}

/// Saaty's rule: consistent iff CR is within the order's threshold.
#[derive(Debug, Clone, Copy, Default)]
pub struct CrClassifier;

impl ConsistencyClassifier for CrClassifier {
    fn name(&self) -> &'static str {
        "cr"
    }

    fn assess(&self, e: &Evidence) -> Assessment {
        Assessment {
            verdict: Verdict::from_consistent(e.cr <= cr_threshold(e.order)),
            score: e.cr,
        }
    }
}

/// Preference-reversal logit model.
#[derive(Debug, Clone)]
pub struct PrClassifier {
    pub model: LogitModel,
}

impl ConsistencyClassifier for PrClassifier {
    fn name(&self) -> &'static str {
        "pr"
    }

    fn assess(&self, e: &Evidence) -> Assessment {
        let p = self.model.predict(e.order, e.prop3_rev, e.max3_rev);
        Assessment {
            verdict: self.model.classify_probability(p),
            score: p,
        }
    }
}

pub trait PcmGenerator: Send + Sync {
    fn name(&self) -> &'static str;
    fn source(&self) -> Source;
    /// `pool` is the logical generator's candidate pool; others ignore it.
    fn generate(&self, order: usize, pool: usize, rng: &mut ChaCha8Rng) -> Result<Pcm>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LogicalGenerator;

impl PcmGenerator for LogicalGenerator {
    fn name(&self) -> &'static str {
        "logical"
    }

    fn source(&self) -> Source {
        Source::Logical
    }

    fn generate(&self, order: usize, pool: usize, rng: &mut ChaCha8Rng) -> Result<Pcm> {
        simulate_logical_with_pool(order, pool, rng)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RandomGenerator;

impl PcmGenerator for RandomGenerator {
    fn name(&self) -> &'static str {
        "random"
    }

    fn source(&self) -> Source {
        Source::Random
    }

    fn generate(&self, order: usize, _pool: usize, rng: &mut ChaCha8Rng) -> Result<Pcm> {
        simulate_random(order, rng)
    }
}

/// Random PCMs coerced to CR-consistency. A draw that does not reach the
/// threshold within `max_iter` steps is discarded and redrawn from the same
/// generator, up to `max_attempts` draws.
#[derive(Debug, Clone, Copy)]
pub struct CoercedGenerator {
    pub max_iter: usize,
    pub max_attempts: usize,
}

impl Default for CoercedGenerator {
    fn default() -> Self {
        CoercedGenerator {
            max_iter: 200,
            max_attempts: 100,
        }
    }
}

impl PcmGenerator for CoercedGenerator {
    fn name(&self) -> &'static str {
        "coerced"
    }

    fn source(&self) -> Source {
        Source::Coerced
    }

    fn generate(&self, order: usize, _pool: usize, rng: &mut ChaCha8Rng) -> Result<Pcm> {
        for _ in 0..self.max_attempts {
            let random = simulate_random(order, rng)?;
            let outcome = harker_coerce(&random, cr_threshold(order), self.max_iter)?;
            if outcome.converged {
                return Ok(outcome.pcm);
            }
        }
        Err(Error::NoConvergence {
            iterations: self.max_iter * self.max_attempts,
        })
    }
}

#[derive(Clone, Default)]
pub struct Registry {
    classifiers: BTreeMap<&'static str, Arc<dyn ConsistencyClassifier>>,
    generators: BTreeMap<&'static str, Arc<dyn PcmGenerator>>,
}

impl Registry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// CR and PR classifiers (PR backed by `model`) and all three generators.
    pub fn with_model(model: LogitModel) -> Self {
        let mut r = Registry::empty();
        r.register_classifier(Arc::new(CrClassifier));
        r.register_classifier(Arc::new(PrClassifier { model }));
        r.register_generator(Arc::new(LogicalGenerator));
        r.register_generator(Arc::new(RandomGenerator));
        r.register_generator(Arc::new(CoercedGenerator::default()));
        r
    }

    pub fn register_classifier(&mut self, c: Arc<dyn ConsistencyClassifier>) {
        self.classifiers.insert(c.name(), c);
    }

    pub fn register_generator(&mut self, g: Arc<dyn PcmGenerator>) {
        self.generators.insert(g.name(), g);
    }

    pub fn classifier(&self, name: &str) -> Result<Arc<dyn ConsistencyClassifier>> {
        self.classifiers.get(name).cloned().ok_or_else(|| {
            Error::InvalidParameter(format!(
                "unknown classifier {name:?} (available: {})",
                self.classifier_names().join(", ")
            ))
        })
    }

    pub fn generator(&self, name: &str) -> Result<Arc<dyn PcmGenerator>> {
        self.generators.get(name).cloned().ok_or_else(|| {
            Error::InvalidParameter(format!(
                "unknown generator {name:?} (available: {})",
                self.generator_names().join(", ")
            ))
        })
    }

    pub fn classifier_names(&self) -> Vec<&'static str> {
        self.classifiers.keys().copied().collect()
    }

    pub fn generator_names(&self) -> Vec<&'static str> {
        self.generators.keys().copied().collect()
    }
}

impl std::fmt::Debug for Registry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Registry")
            .field("classifiers", &self.classifier_names())
            .field("generators", &self.generator_names())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn lookup_by_name() {
        let r = Registry::with_model(LogitModel::paper());
        assert_eq!(r.classifier_names(), vec!["cr", "pr"]);
        assert_eq!(r.generator_names(), vec!["coerced", "logical", "random"]);
        assert!(r.classifier("koczkodaj").is_err());
        assert_eq!(r.generator("random").unwrap().source(), Source::Random);
    }

    #[test]
    fn classifiers_follow_their_rules() {
        let r = Registry::with_model(LogitModel::paper());
        let e = Evidence {
            order: 4,
            cr: 0.06,
            prop3_rev: 0.0,
            max3_rev: 1.0,
        };
        assert_eq!(r.classifier("cr").unwrap().assess(&e).verdict, Verdict::Inconsistent);
        assert_eq!(r.classifier("cr").unwrap().assess(&Evidence { order: 5, ..e }).verdict, Verdict::Consistent);
        let pr = r.classifier("pr").unwrap().assess(&e);
        assert_eq!(pr.verdict, Verdict::Consistent);
        assert!(pr.score > 0.5);
    }

    #[test]
    fn coerced_generator_meets_threshold() {
        let g = CoercedGenerator::default();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let pcm = g.generate(7, 5, &mut rng).unwrap();
        assert!(crate::consistency::consistency_ratio(&pcm).unwrap().cr <= 0.10);
    }
}
