//! The learned decision set: assembly from per-class covers, prediction,
//! explanation in the original vocabulary, metrics, and JSON serialization.

use crate::dataset::{BinarizationMap, BinaryDataset, DatasetError};
use crate::enumerator::{FeatureLit, Term, TermSet};
use crate::setcover::CoverSolution;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("rule references class '{0}' which is not in the class list")]
    UnknownClass(String),
    #[error("malformed model JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cover selection index {index} out of range for class {class}")]
    SelectionOutOfRange { class: usize, index: usize },
}

/// One IF-THEN rule: a term paired with the class it predicts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub term: Term,
    pub class_index: usize,
}

/// How an instance was classified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Class(usize),
    /// No rule fired.
    Abstain,
    /// Fired rules disagree; the distinct classes involved, ascending.
    Ambiguous(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prediction {
    pub outcome: Outcome,
    /// Indices of the rules that fired.
    pub fired: Vec<usize>,
}

/// Per-class training provenance kept with the model.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassStats {
    pub class: String,
    pub positives: usize,
    pub negatives: usize,
    pub terms_enumerated: usize,
    pub truncated: bool,
    pub cover_cost: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelStats {
    pub objective: String,
    pub symmetry_breaking: bool,
    pub seed: u64,
    pub rule_count: usize,
    pub literal_count: usize,
    pub total_size: usize,
    pub train_accuracy: f64,
    pub per_class: Vec<ClassStats>,
}

/// An unordered set of rules over binarized features, with the binarization
/// map needed to speak the original vocabulary.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionSet {
    rules: Vec<Rule>,
    map: BinarizationMap,
    default_class: Option<usize>,
    stats: ModelStats,
}

/// Model size and training-accuracy measures. The literal count is the
/// left-hand-side measure; total size adds one per rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metrics {
    pub rule_count: usize,
    pub literal_count: usize,
    pub total_size: usize,
    pub train_accuracy: f64,
}

/// Build a decision set from each class's enumerated terms and chosen cover.
/// Rules keep class order, then selection order.
pub fn assemble(
    per_class: &[(TermSet, CoverSolution)],
    map: BinarizationMap,
) -> Result<DecisionSet, ModelError> {
    let mut rules = Vec::new();
    for (terms, cover) in per_class {
        for &j in &cover.selected {
            let term = terms
                .terms()
                .get(j)
                .ok_or(ModelError::SelectionOutOfRange {
                    class: terms.class_index(),
                    index: j,
                })?
                .clone();
            rules.push(Rule {
                term,
                class_index: terms.class_index(),
            });
        }
    }
    Ok(DecisionSet {
        rules,
        map,
        default_class: None,
        stats: ModelStats::default(),
    })
}

impl DecisionSet {
    pub fn new(rules: Vec<Rule>, map: BinarizationMap) -> DecisionSet {
        DecisionSet {
            rules,
            map,
            default_class: None,
            stats: ModelStats::default(),
        }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn map(&self) -> &BinarizationMap {
        &self.map
    }

    pub fn stats(&self) -> &ModelStats {
        &self.stats
    }

    pub fn set_stats(&mut self, stats: ModelStats) {
        self.stats = stats;
    }

    pub fn default_class(&self) -> Option<usize> {
        self.default_class
    }

    pub fn set_default_class(&mut self, class: Option<usize>) {
        self.default_class = class;
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    pub fn literal_count(&self) -> usize {
        self.rules.iter().map(|r| r.term.size()).sum()
    }

    /// One per literal on the left plus one per rule.
    pub fn total_size(&self) -> usize {
        self.literal_count() + self.rule_count()
    }

    fn check_width(&self, instance: &[bool]) -> Result<(), ModelError> {
        let expected = self.map.num_binary_features();
        if instance.len() != expected {
            return Err(ModelError::Dataset(DatasetError::WidthMismatch {
                expected,
                found: instance.len(),
            }));
        }
        Ok(())
    }

    /// Prediction without the default-class fallback; used for scoring.
    fn predict_strict(&self, instance: &[bool]) -> Result<Prediction, ModelError> {
        self.check_width(instance)?;
        let fired: Vec<usize> = self
            .rules
            .iter()
            .enumerate()
            .filter(|(_, r)| r.term.agrees_with(instance))
            .map(|(i, _)| i)
            .collect();
        let mut classes: Vec<usize> = fired.iter().map(|&i| self.rules[i].class_index).collect();
        classes.sort_unstable();
        classes.dedup();
        let outcome = match classes.len() {
            0 => Outcome::Abstain,
            1 => Outcome::Class(classes[0]),
            _ => Outcome::Ambiguous(classes),
        };
        Ok(Prediction { outcome, fired })
    }

    /// Classify an instance. With a default class configured, abstentions
    /// map to it (the fired list stays empty).
    pub fn predict(&self, instance: &[bool]) -> Result<Prediction, ModelError> {
        let mut p = self.predict_strict(instance)?;
        if p.outcome == Outcome::Abstain {
            if let Some(d) = self.default_class {
                p.outcome = Outcome::Class(d);
            }
        }
        Ok(p)
    }

    /// Rendered IF-THEN line for one rule, in the original vocabulary.
    pub fn render_rule(&self, rule: &Rule) -> String {
        let lhs = if rule.term.literals().is_empty() {
            "TRUE".to_string()
        } else {
            rule.term
                .literals()
                .iter()
                .map(|l| self.render_literal(l))
                .collect::<Vec<_>>()
                .join(" AND ")
        };
        format!(
            "IF {} THEN {}={}",
            lhs, self.map.class_feature, self.map.classes[rule.class_index]
        )
    }

    fn render_literal(&self, l: &FeatureLit) -> String {
        match self.map.literal_tokens(l.feature, l.positive) {
            Some((name, token)) => match token.strip_prefix('!') {
                Some(value) => format!("{name}!={value}"),
                None => format!("{name}={token}"),
            },
            None => format!("feature[{}]={}", l.feature, u8::from(l.positive)),
        }
    }

    /// One (rule index, rendered IF-THEN string) entry per fired rule.
    pub fn explain(&self, instance: &[bool]) -> Result<Vec<(usize, String)>, ModelError> {
        let p = self.predict_strict(instance)?;
        Ok(p.fired
            .iter()
            .map(|&i| (i, self.render_rule(&self.rules[i])))
            .collect())
    }

    /// Full IF-THEN listing of the model.
    pub fn render(&self) -> String {
        self.rules
            .iter()
            .map(|r| self.render_rule(r))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Scores over the original multiset (duplicates and majority-dropped
    /// rows included). Abstain and ambiguous predictions count as wrong.
    pub fn metrics(&self, data: &BinaryDataset) -> Result<Metrics, ModelError> {
        let mut correct = 0usize;
        for (bits, class) in &data.examples {
            let p = self.predict_strict(bits)?;
            if p.outcome == Outcome::Class(*class) {
                correct += 1;
            }
        }
        let train_accuracy = if data.examples.is_empty() {
            1.0
        } else {
            correct as f64 / data.examples.len() as f64
        };
        Ok(Metrics {
            rule_count: self.rule_count(),
            literal_count: self.literal_count(),
            total_size: self.total_size(),
            train_accuracy,
        })
    }

    pub fn to_json(&self) -> String {
        let rules: Vec<RuleJson> = self
            .rules
            .iter()
            .map(|r| RuleJson {
                class: self.map.classes[r.class_index].clone(),
                literals: r
                    .term
                    .literals()
                    .iter()
                    .map(|l| {
                        self.map
                            .literal_tokens(l.feature, l.positive)
                            .expect("every rule literal maps to a feature value")
                    })
                    .collect(),
            })
            .collect();
        let doc = ModelJson {
            classes: self.map.classes.clone(),
            rules,
            binarization: self.map.clone(),
            default_class: self.default_class.map(|c| self.map.classes[c].clone()),
            stats: self.stats.clone(),
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("model serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<DecisionSet, ModelError> {
        let doc: ModelJson = serde_json::from_str(text)?;
        let map = doc.binarization;
        let mut rules = Vec::new();
        for r in doc.rules {
            let class_index = map
                .class_index(&r.class)
                .ok_or_else(|| ModelError::UnknownClass(r.class.clone()))?;
            let mut literals = Vec::new();
            for (name, token) in &r.literals {
                let (feature, positive) = map.literal_from_tokens(name, token)?;
                literals.push(FeatureLit::new(feature, positive));
            }
            // Coverage is training-time metadata; rules loaded from JSON
            // carry an empty coverage of width zero.
            rules.push(Rule {
                term: Term::new(literals, crate::bitset::BitSet::new(0)),
                class_index,
            });
        }
        let default_class = match doc.default_class {
            Some(name) => Some(
                map.class_index(&name)
                    .ok_or(ModelError::UnknownClass(name))?,
            ),
            None => None,
        };
        Ok(DecisionSet {
            rules,
            map,
            default_class,
            stats: doc.stats,
        })
    }

    /// The DNF value of one class on an instance: true when some rule of
    /// that class fires.
    pub fn class_dnf_value(&self, class_index: usize, instance: &[bool]) -> bool {
        self.rules
            .iter()
            .filter(|r| r.class_index == class_index)
            .any(|r| r.term.agrees_with(instance))
    }
}

#[derive(Serialize, Deserialize)]
struct RuleJson {
    class: String,
    literals: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    classes: Vec<String>,
    rules: Vec<RuleJson>,
    binarization: BinarizationMap,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    default_class: Option<String>,
    /// Optional so hand-written model files load without a stats block.
    #[serde(default)]
    stats: ModelStats,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitset::BitSet;
    use crate::dataset::{binarize, parse_csv};

    const DATE_CSV: &str = "\
Day,Venue,Weather,TV Show,Date
Weekday,Dinner,Warm,Bad,No
Weekend,Club,Warm,Bad,Yes
Weekend,Club,Warm,Bad,Yes
Weekend,Club,Cold,Good,No
";

    fn date_map() -> (BinaryDataset, BinarizationMap) {
        binarize(&parse_csv(DATE_CSV).unwrap()).unwrap()
    }

    fn term_of(lits: &[(usize, bool)]) -> Term {
        Term::new(
            lits.iter().map(|&(f, p)| FeatureLit::new(f, p)).collect(),
            BitSet::new(0),
        )
    }

    /// The paper-style target model: No <- f4; No <- !f1; Yes <- f1 & !f4.
    fn date_target_model() -> DecisionSet {
        let (_, map) = date_map();
        let no = map.class_index("No").unwrap();
        let yes = map.class_index("Yes").unwrap();
        DecisionSet::new(
            vec![
                Rule {
                    term: term_of(&[(3, true)]),
                    class_index: no,
                },
                Rule {
                    term: term_of(&[(0, false)]),
                    class_index: no,
                },
                Rule {
                    term: term_of(&[(0, true), (3, false)]),
                    class_index: yes,
                },
            ],
            map,
        )
    }

    #[test]
    fn predicts_training_rows_of_the_date_example() {
        let (ds, _) = date_map();
        let model = date_target_model();
        for (bits, class) in &ds.examples {
            let p = model.predict(bits).unwrap();
            assert_eq!(p.outcome, Outcome::Class(*class));
        }
        // e4 = (1,0,0,1) fires the TV Show rule for No.
        let e4 = vec![true, false, false, true];
        let p = model.predict(&e4).unwrap();
        assert_eq!(p.outcome, Outcome::Class(0));
        assert!(p.fired.contains(&0));
    }

    #[test]
    fn overlapping_rules_yield_ambiguous() {
        // Second decision set of the running example:
        // No <- f4; No <- !f1; Yes <- f3 & f1.
        let (_, map) = date_map();
        let model = DecisionSet::new(
            vec![
                Rule {
                    term: term_of(&[(3, true)]),
                    class_index: 0,
                },
                Rule {
                    term: term_of(&[(0, false)]),
                    class_index: 0,
                },
                Rule {
                    term: term_of(&[(2, true), (0, true)]),
                    class_index: 1,
                },
            ],
            map,
        );
        // Warm weather, good TV show, weekend: rules 0 and 2 both fire.
        let instance = vec![true, false, true, true];
        let p = model.predict(&instance).unwrap();
        assert_eq!(p.outcome, Outcome::Ambiguous(vec![0, 1]));
        assert_eq!(p.fired, vec![0, 2]);
    }

    #[test]
    fn unmatched_instance_abstains_unless_default_class() {
        let (_, map) = date_map();
        let mut model = DecisionSet::new(
            vec![Rule {
                term: term_of(&[(0, true), (3, false)]),
                class_index: 1,
            }],
            map,
        );
        let instance = vec![false, false, false, true];
        assert_eq!(model.predict(&instance).unwrap().outcome, Outcome::Abstain);
        model.set_default_class(Some(0));
        assert_eq!(model.predict(&instance).unwrap().outcome, Outcome::Class(0));
    }

    #[test]
    fn width_mismatch_is_an_error() {
        let model = date_target_model();
        assert!(matches!(
            model.predict(&[true, false]),
            Err(ModelError::Dataset(DatasetError::WidthMismatch { .. }))
        ));
    }

    #[test]
    fn explains_in_original_vocabulary() {
        let model = date_target_model();
        // e2 = (1,0,1,0) fires only the Yes rule.
        let e2 = vec![true, false, true, false];
        let entries = model.explain(&e2).unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].1, "IF Day=Weekend AND TV Show=Bad THEN Date=Yes");
        // An abstaining instance explains to nothing.
        let (_, map) = date_map();
        let narrow = DecisionSet::new(
            vec![Rule {
                term: term_of(&[(0, true), (3, false)]),
                class_index: 1,
            }],
            map,
        );
        assert!(narrow
            .explain(&[false, false, false, true])
            .unwrap()
            .is_empty());
    }

    #[test]
    fn one_hot_negative_literal_renders_with_bang_equals() {
        let text = "color,class\nred,x\ngreen,y\nblue,x\n";
        let (_, map) = binarize(&parse_csv(text).unwrap()).unwrap();
        let model = DecisionSet::new(
            vec![Rule {
                term: term_of(&[(0, false)]),
                class_index: 0,
            }],
            map,
        );
        assert_eq!(
            model.render_rule(&model.rules()[0]),
            "IF color!=blue THEN class=x"
        );
    }

    #[test]
    fn metrics_match_the_size_counting_convention() {
        // First decision set of the running example: 3 rules, 4 literals,
        // total size 7.
        let model = date_target_model();
        let (ds, _) = date_map();
        let m = model.metrics(&ds).unwrap();
        assert_eq!(m.rule_count, 3);
        assert_eq!(m.literal_count, 4);
        assert_eq!(m.total_size, 7);
        assert_eq!(m.train_accuracy, 1.0);
    }

    #[test]
    fn empty_model_scores_zero_on_nonempty_data() {
        let (ds, map) = date_map();
        let model = DecisionSet::new(vec![], map);
        let m = model.metrics(&ds).unwrap();
        assert_eq!(m.train_accuracy, 0.0);
        assert_eq!(m.total_size, 0);
    }

    #[test]
    fn json_round_trip_is_identity() {
        let mut model = date_target_model();
        model.set_stats(ModelStats {
            objective: "literals".into(),
            symmetry_breaking: true,
            seed: 0,
            rule_count: 3,
            literal_count: 4,
            total_size: 7,
            train_accuracy: 1.0,
            per_class: vec![],
        });
        let json = model.to_json();
        let back = DecisionSet::from_json(&json).unwrap();
        assert_eq!(back.to_json(), json);
        assert_eq!(back.rule_count(), 3);
        // Loaded model predicts identically.
        let (ds, _) = date_map();
        for (bits, _) in &ds.examples {
            assert_eq!(
                back.predict(bits).unwrap().outcome,
                model.predict(bits).unwrap().outcome
            );
        }
    }

    #[test]
    fn handwritten_single_rule_json_loads_and_predicts() {
        let model = date_target_model();
        let mut doc: serde_json::Value = serde_json::from_str(&model.to_json()).unwrap();
        doc["rules"] = serde_json::json!([
            {"class": "Yes", "literals": [["Day", "Weekend"]]}
        ]);
        // Hand-written files may omit the stats block entirely.
        doc.as_object_mut().unwrap().remove("stats");
        let loaded = DecisionSet::from_json(&doc.to_string()).unwrap();
        assert_eq!(loaded.rule_count(), 1);
        let p = loaded.predict(&[true, false, true, false]).unwrap();
        assert_eq!(p.outcome, Outcome::Class(1));
    }

    #[test]
    fn unknown_feature_name_in_json_is_an_error() {
        let model = date_target_model();
        let mut doc: serde_json::Value = serde_json::from_str(&model.to_json()).unwrap();
        doc["rules"] = serde_json::json!([
            {"class": "Yes", "literals": [["Banana", "Weekend"]]}
        ]);
        let err = DecisionSet::from_json(&doc.to_string()).unwrap_err();
        match err {
            ModelError::Dataset(DatasetError::UnknownFeature(name)) => {
                assert_eq!(name, "Banana")
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn assemble_orders_rules_by_class_then_selection() {
        let (_, map) = date_map();
        let no_terms = TermSet::new(
            vec![
                Term::new(
                    vec![FeatureLit::new(0, false)],
                    BitSet::from_indices(2, &[0]),
                ),
                Term::new(
                    vec![FeatureLit::new(3, true)],
                    BitSet::from_indices(2, &[1]),
                ),
            ],
            0,
            false,
        );
        let yes_terms = TermSet::new(
            vec![Term::new(
                vec![FeatureLit::new(0, true), FeatureLit::new(3, false)],
                BitSet::from_indices(1, &[0]),
            )],
            1,
            false,
        );
        let model = assemble(
            &[
                (
                    no_terms,
                    CoverSolution {
                        selected: vec![0, 1],
                        cost: 2,
                    },
                ),
                (
                    yes_terms,
                    CoverSolution {
                        selected: vec![0],
                        cost: 2,
                    },
                ),
            ],
            map,
        )
        .unwrap();
        assert_eq!(model.rule_count(), 3);
        assert_eq!(model.rules()[0].class_index, 0);
        assert_eq!(model.rules()[2].class_index, 1);
        assert_eq!(model.literal_count(), 4);
    }

    #[test]
    fn assemble_rejects_out_of_range_selection() {
        let (_, map) = date_map();
        let terms = TermSet::new(
            vec![Term::new(
                vec![FeatureLit::new(0, true)],
                BitSet::from_indices(1, &[0]),
            )],
            0,
            false,
        );
        let err = assemble(
            &[(
                terms,
                CoverSolution {
                    selected: vec![5],
                    cost: 1,
                },
            )],
            map,
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::SelectionOutOfRange { .. }));
    }
}
