//! Tabular input handling: CSV parsing, feature binarization, and
//! majority-vote consistency resolution.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap, HashSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DatasetError {
    #[error("empty input")]
    Empty,
    #[error("no data rows")]
    NoDataRows,
    #[error("data row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("header must name at least one feature plus the class column")]
    NoFeatures,
    #[error("duplicate feature name '{0}' in header")]
    DuplicateFeature(String),
    #[error("data row {row}: missing value in column '{column}'")]
    MissingValue { row: usize, column: String },
    #[error("no usable features after binarization (every feature is constant)")]
    NoUsableFeatures,
    #[error("unknown class '{0}'")]
    UnknownClass(String),
    #[error("data row {row}: unseen value '{value}' for feature '{feature}'")]
    UnseenValue {
        row: usize,
        feature: String,
        value: String,
    },
    #[error("unknown feature '{0}'")]
    UnknownFeature(String),
    #[error("unknown value token '{value}' for feature '{feature}'")]
    UnknownValueToken { feature: String, value: String },
    #[error("feature vector has width {found}, expected {expected}")]
    WidthMismatch { expected: usize, found: usize },
}

/// Parsed but not yet encoded tabular data. The last CSV column is the class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawDataset {
    pub feature_names: Vec<String>,
    pub class_name: String,
    pub rows: Vec<(Vec<String>, String)>,
}

/// Parse simple comma-separated text: header row first, class column last,
/// no embedded commas or quoting.
pub fn parse_csv(text: &str) -> Result<RawDataset, DatasetError> {
    let mut lines = text
        .lines()
        .map(|l| l.trim_end_matches('\r'))
        .filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or(DatasetError::Empty)?;
    let mut columns: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    if columns.len() < 2 {
        return Err(DatasetError::NoFeatures);
    }
    let class_name = columns.pop().unwrap();
    let feature_names = columns;
    let mut seen = HashSet::new();
    for name in &feature_names {
        if !seen.insert(name.clone()) {
            return Err(DatasetError::DuplicateFeature(name.clone()));
        }
    }

    let expected = feature_names.len() + 1;
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = i + 1;
        let mut fields: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
        if fields.len() != expected {
            return Err(DatasetError::RaggedRow {
                row,
                expected,
                found: fields.len(),
            });
        }
        let class = fields.pop().unwrap();
        for (f, value) in fields.iter().enumerate() {
            if value.is_empty() || value == "?" {
                return Err(DatasetError::MissingValue {
                    row,
                    column: feature_names[f].clone(),
                });
            }
        }
        if class.is_empty() || class == "?" {
            return Err(DatasetError::MissingValue {
                row,
                column: class_name.clone(),
            });
        }
        rows.push((fields, class));
    }
    if rows.is_empty() {
        return Err(DatasetError::NoDataRows);
    }
    Ok(RawDataset {
        feature_names,
        class_name,
        rows,
    })
}

/// How one original feature column maps onto Boolean features.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnSpec {
    /// Constant feature, dropped with a warning. The single value is kept so
    /// encoding can still validate inputs.
    Dropped { value: String },
    /// Two-valued feature: one Boolean feature, alphabetically-first value
    /// mapped to 0.
    Binary {
        zero: String,
        one: String,
        index: usize,
    },
    /// Multi-valued feature: one Boolean feature per value (one-hot),
    /// values in alphabetical order.
    OneHot { values: Vec<(String, usize)> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMap {
    pub name: String,
    pub spec: ColumnSpec,
}

/// Bijection between original feature values and Boolean feature indices,
/// plus the class vocabulary. Serializable so models decode back to the
/// original vocabulary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinarizationMap {
    pub class_feature: String,
    pub classes: Vec<String>,
    pub columns: Vec<ColumnMap>,
    pub num_binary: usize,
}

impl BinarizationMap {
    pub fn num_binary_features(&self) -> usize {
        self.num_binary
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == name)
    }

    /// Names of constant features that were dropped during binarization.
    pub fn dropped_features(&self) -> Vec<&str> {
        self.columns
            .iter()
            .filter(|c| matches!(c.spec, ColumnSpec::Dropped { .. }))
            .map(|c| c.name.as_str())
            .collect()
    }

    /// Encode one original-vocabulary row into a Boolean feature vector.
    pub fn encode_row(&self, values: &[String], row: usize) -> Result<Vec<bool>, DatasetError> {
        if values.len() != self.columns.len() {
            return Err(DatasetError::WidthMismatch {
                expected: self.columns.len(),
                found: values.len(),
            });
        }
        let mut bits = vec![false; self.num_binary];
        for (col, value) in self.columns.iter().zip(values) {
            let unseen = || DatasetError::UnseenValue {
                row,
                feature: col.name.clone(),
                value: value.clone(),
            };
            match &col.spec {
                ColumnSpec::Dropped { value: known } => {
                    if value != known {
                        return Err(unseen());
                    }
                }
                ColumnSpec::Binary { zero, one, index } => {
                    if value == one {
                        bits[*index] = true;
                    } else if value != zero {
                        return Err(unseen());
                    }
                }
                ColumnSpec::OneHot { values: entries } => {
                    let (_, idx) = entries
                        .iter()
                        .find(|(v, _)| v == value)
                        .ok_or_else(unseen)?;
                    bits[*idx] = true;
                }
            }
        }
        Ok(bits)
    }

    /// Decode a Boolean vector back to original (feature, value) pairs.
    /// Only canonical vectors (exactly one bit per one-hot group) decode.
    pub fn decode_vector(&self, bits: &[bool]) -> Result<Vec<(String, String)>, DatasetError> {
        if bits.len() != self.num_binary {
            return Err(DatasetError::WidthMismatch {
                expected: self.num_binary,
                found: bits.len(),
            });
        }
        let mut out = Vec::new();
        for col in &self.columns {
            match &col.spec {
                ColumnSpec::Dropped { value } => out.push((col.name.clone(), value.clone())),
                ColumnSpec::Binary { zero, one, index } => {
                    let v = if bits[*index] { one } else { zero };
                    out.push((col.name.clone(), v.clone()));
                }
                ColumnSpec::OneHot { values } => {
                    let mut set = values.iter().filter(|(_, i)| bits[*i]);
                    let first = set.next();
                    if first.is_none() || set.next().is_some() {
                        return Err(DatasetError::UnknownValueToken {
                            feature: col.name.clone(),
                            value: "<non-canonical one-hot pattern>".into(),
                        });
                    }
                    out.push((col.name.clone(), first.unwrap().0.clone()));
                }
            }
        }
        Ok(out)
    }

    /// Human-readable (feature, value-token) pair for a Boolean literal.
    /// One-hot negations use a `!` prefix on the value token.
    pub fn literal_tokens(&self, feature: usize, positive: bool) -> Option<(String, String)> {
        for col in &self.columns {
            match &col.spec {
                ColumnSpec::Binary { zero, one, index } if *index == feature => {
                    let v = if positive { one } else { zero };
                    return Some((col.name.clone(), v.clone()));
                }
                ColumnSpec::OneHot { values } => {
                    if let Some((v, _)) = values.iter().find(|(_, i)| *i == feature) {
                        let token = if positive { v.clone() } else { format!("!{v}") };
                        return Some((col.name.clone(), token));
                    }
                }
                _ => {}
            }
        }
        None
    }

    /// Inverse of [`literal_tokens`]: map a (feature name, value token) pair
    /// back to a Boolean literal.
    pub fn literal_from_tokens(
        &self,
        name: &str,
        token: &str,
    ) -> Result<(usize, bool), DatasetError> {
        let col = self
            .columns
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| DatasetError::UnknownFeature(name.to_string()))?;
        let unknown = || DatasetError::UnknownValueToken {
            feature: name.to_string(),
            value: token.to_string(),
        };
        match &col.spec {
            ColumnSpec::Dropped { .. } => Err(unknown()),
            ColumnSpec::Binary { zero, one, index } => {
                if token == one {
                    Ok((*index, true))
                } else if token == zero {
                    Ok((*index, false))
                } else {
                    Err(unknown())
                }
            }
            ColumnSpec::OneHot { values } => {
                let (positive, value) = match token.strip_prefix('!') {
                    Some(rest) => (false, rest),
                    None => (true, token),
                };
                values
                    .iter()
                    .find(|(v, _)| v == value)
                    .map(|(_, i)| (*i, positive))
                    .ok_or_else(unknown)
            }
        }
    }
}

/// Binarized, class-labeled examples over Boolean features.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryDataset {
    pub num_features: usize,
    pub examples: Vec<(Vec<bool>, usize)>,
    pub class_count: usize,
}

/// Binarize raw tabular data. Two-valued features become one Boolean feature
/// (alphabetically-first value mapped to 0), multi-valued features one-hot
/// encode, constant features are dropped with a warning record, and classes
/// map to dense indices in alphabetical order.
pub fn binarize(raw: &RawDataset) -> Result<(BinaryDataset, BinarizationMap), DatasetError> {
    let mut columns = Vec::with_capacity(raw.feature_names.len());
    let mut next_index = 0usize;
    for (f, name) in raw.feature_names.iter().enumerate() {
        let distinct: BTreeSet<&str> = raw.rows.iter().map(|(v, _)| v[f].as_str()).collect();
        let spec = match distinct.len() {
            1 => ColumnSpec::Dropped {
                value: distinct.iter().next().unwrap().to_string(),
            },
            2 => {
                let mut it = distinct.iter();
                let zero = it.next().unwrap().to_string();
                let one = it.next().unwrap().to_string();
                let index = next_index;
                next_index += 1;
                ColumnSpec::Binary { zero, one, index }
            }
            _ => {
                let values = distinct
                    .iter()
                    .map(|v| {
                        let idx = next_index;
                        next_index += 1;
                        (v.to_string(), idx)
                    })
                    .collect();
                ColumnSpec::OneHot { values }
            }
        };
        columns.push(ColumnMap {
            name: name.clone(),
            spec,
        });
    }
    if next_index == 0 {
        return Err(DatasetError::NoUsableFeatures);
    }

    let classes: Vec<String> = raw
        .rows
        .iter()
        .map(|(_, c)| c.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let map = BinarizationMap {
        class_feature: raw.class_name.clone(),
        classes: classes.clone(),
        columns,
        num_binary: next_index,
    };

    let mut examples = Vec::with_capacity(raw.rows.len());
    for (i, (values, class)) in raw.rows.iter().enumerate() {
        let bits = map.encode_row(values, i + 1)?;
        let class_idx = map
            .class_index(class)
            .ok_or_else(|| DatasetError::UnknownClass(class.clone()))?;
        examples.push((bits, class_idx));
    }

    Ok((
        BinaryDataset {
            num_features: map.num_binary,
            examples,
            class_count: classes.len(),
        },
        map,
    ))
}

/// One-vs-rest split of the surviving distinct feature vectors for a target
/// class. Counts record how many original rows stand behind each vector
/// (rows matching the vector's majority class).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSplit {
    pub positives: Vec<Vec<bool>>,
    pub negatives: Vec<Vec<bool>>,
    pub positive_counts: Vec<u32>,
    pub negative_counts: Vec<u32>,
    /// Rows discarded by majority voting; this is the training error.
    pub dropped: u32,
}

/// Group identical feature vectors, resolve class collisions by majority
/// vote (ties to the smaller class index), and split the survivors by the
/// target class. With `keep_duplicates`, each surviving row is kept as its
/// own entry instead of merging into one representative.
pub fn resolve_consistency(
    ds: &BinaryDataset,
    target_class: usize,
    keep_duplicates: bool,
) -> ClassSplit {
    assert!(target_class < ds.class_count, "target class out of range");
    let mut order: Vec<Vec<bool>> = Vec::new();
    let mut group: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut counts: Vec<Vec<u32>> = Vec::new();
    for (bits, class) in &ds.examples {
        let idx = *group.entry(bits.clone()).or_insert_with(|| {
            order.push(bits.clone());
            counts.push(vec![0; ds.class_count]);
            counts.len() - 1
        });
        counts[idx][*class] += 1;
    }

    let mut split = ClassSplit {
        positives: Vec::new(),
        negatives: Vec::new(),
        positive_counts: Vec::new(),
        negative_counts: Vec::new(),
        dropped: 0,
    };
    for (vector, class_counts) in order.into_iter().zip(counts) {
        let majority = class_counts
            .iter()
            .enumerate()
            .max_by(|(i, a), (j, b)| a.cmp(b).then(j.cmp(i)))
            .map(|(i, _)| i)
            .unwrap();
        let kept = class_counts[majority];
        let total: u32 = class_counts.iter().sum();
        split.dropped += total - kept;
        let copies = if keep_duplicates { kept } else { 1 };
        let count_each = if keep_duplicates { 1 } else { kept };
        for _ in 0..copies {
            if majority == target_class {
                split.positives.push(vector.clone());
                split.positive_counts.push(count_each);
            } else {
                split.negatives.push(vector.clone());
                split.negative_counts.push(count_each);
            }
        }
    }
    split
}

/// The majority class of the original rows, used for `--default-class`
/// style fallbacks. Ties break toward the smaller class index.
pub fn majority_class(ds: &BinaryDataset) -> usize {
    let mut counts = vec![0u32; ds.class_count];
    for (_, c) in &ds.examples {
        counts[*c] += 1;
    }
    counts
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.cmp(b).then(j.cmp(i)))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const DATE_CSV: &str = "\
Day,Venue,Weather,TV Show,Date
Weekday,Dinner,Warm,Bad,No
Weekend,Club,Warm,Bad,Yes
Weekend,Club,Warm,Bad,Yes
Weekend,Club,Cold,Good,No
";

    #[test]
    fn parses_date_csv() {
        let raw = parse_csv(DATE_CSV).unwrap();
        assert_eq!(
            raw.feature_names,
            vec!["Day", "Venue", "Weather", "TV Show"]
        );
        assert_eq!(raw.class_name, "Date");
        assert_eq!(raw.rows.len(), 4);
        assert_eq!(raw.rows[1].1, "Yes");
    }

    #[test]
    fn header_only_is_an_error() {
        assert_eq!(parse_csv("a,b,c\n"), Err(DatasetError::NoDataRows));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert_eq!(parse_csv(""), Err(DatasetError::Empty));
    }

    #[test]
    fn ragged_row_reports_index() {
        let text = "a,b,c,d,class\n1,2,3,4,x\n1,2,3\n";
        assert_eq!(
            parse_csv(text),
            Err(DatasetError::RaggedRow {
                row: 2,
                expected: 5,
                found: 3
            })
        );
    }

    #[test]
    fn missing_values_are_rejected() {
        let text = "a,b,class\n1,,x\n";
        assert!(matches!(
            parse_csv(text),
            Err(DatasetError::MissingValue { row: 1, .. })
        ));
    }

    #[test]
    fn binarizes_date_example() {
        let raw = parse_csv(DATE_CSV).unwrap();
        let (ds, map) = binarize(&raw).unwrap();
        assert_eq!(ds.num_features, 4);
        assert_eq!(map.classes, vec!["No", "Yes"]);
        // e1 = (0,1,1,0) labeled No; e2 = (1,0,1,0) labeled Yes.
        assert_eq!(
            ds.examples[0],
            (vec![false, true, true, false], 0),
            "e1 should binarize to 0110"
        );
        assert_eq!(ds.examples[1], (vec![true, false, true, false], 1));
        assert_eq!(ds.examples[3], (vec![true, false, false, true], 0));
    }

    #[test]
    fn three_valued_feature_one_hot_encodes() {
        let text = "color,class\nred,x\ngreen,y\nblue,x\n";
        let (ds, map) = binarize(&parse_csv(text).unwrap()).unwrap();
        assert_eq!(ds.num_features, 3);
        match &map.columns[0].spec {
            ColumnSpec::OneHot { values } => {
                let names: Vec<&str> = values.iter().map(|(v, _)| v.as_str()).collect();
                assert_eq!(names, vec!["blue", "green", "red"]);
            }
            other => panic!("expected one-hot, got {other:?}"),
        }
        // "red" row: only the red bit set.
        assert_eq!(ds.examples[0].0, vec![false, false, true]);
    }

    #[test]
    fn zero_one_column_maps_zero_to_false() {
        let text = "bit,class\n0,x\n1,y\n";
        let (ds, map) = binarize(&parse_csv(text).unwrap()).unwrap();
        assert_eq!(ds.num_features, 1);
        match &map.columns[0].spec {
            ColumnSpec::Binary { zero, one, .. } => {
                assert_eq!(zero, "0");
                assert_eq!(one, "1");
            }
            other => panic!("expected binary, got {other:?}"),
        }
        assert_eq!(ds.examples[0].0, vec![false]);
        assert_eq!(ds.examples[1].0, vec![true]);
    }

    #[test]
    fn constant_feature_is_dropped_with_warning() {
        let text = "k,v,class\nsame,a,x\nsame,b,y\n";
        let (ds, map) = binarize(&parse_csv(text).unwrap()).unwrap();
        assert_eq!(ds.num_features, 1);
        assert_eq!(map.dropped_features(), vec!["k"]);
    }

    #[test]
    fn all_constant_features_is_an_error() {
        let text = "k,class\nsame,x\nsame,y\n";
        assert_eq!(
            binarize(&parse_csv(text).unwrap()),
            Err(DatasetError::NoUsableFeatures)
        );
    }

    #[test]
    fn feature_count_formula_holds() {
        let text = "a,b,c,class\nx,0,red,p\ny,1,green,q\nx,0,blue,p\nz,1,red,q\n";
        let (ds, map) = binarize(&parse_csv(text).unwrap()).unwrap();
        // a: 3 values -> 3, b: 2 values -> 1, c: 3 values -> 3.
        assert_eq!(ds.num_features, 7);
        assert_eq!(map.num_binary_features(), 7);
    }

    #[test]
    fn encode_decode_round_trip_on_seen_rows() {
        let raw = parse_csv(DATE_CSV).unwrap();
        let (ds, map) = binarize(&raw).unwrap();
        for ((values, _), (bits, _)) in raw.rows.iter().zip(&ds.examples) {
            let decoded = map.decode_vector(bits).unwrap();
            let values_back: Vec<String> = decoded.into_iter().map(|(_, v)| v).collect();
            assert_eq!(&values_back, values);
            let re = map.encode_row(&values_back, 0).unwrap();
            assert_eq!(&re, bits);
        }
    }

    #[test]
    fn literal_tokens_round_trip() {
        let text = "a,color,class\nx,red,p\ny,green,q\nx,blue,p\n";
        let (_, map) = binarize(&parse_csv(text).unwrap()).unwrap();
        for feature in 0..map.num_binary_features() {
            for positive in [true, false] {
                let (name, token) = map.literal_tokens(feature, positive).unwrap();
                assert_eq!(
                    map.literal_from_tokens(&name, &token).unwrap(),
                    (feature, positive)
                );
            }
        }
        assert!(matches!(
            map.literal_from_tokens("nope", "x"),
            Err(DatasetError::UnknownFeature(_))
        ));
        assert!(matches!(
            map.literal_from_tokens("color", "violet"),
            Err(DatasetError::UnknownValueToken { .. })
        ));
    }

    #[test]
    fn resolves_date_example_for_positive_class() {
        let raw = parse_csv(DATE_CSV).unwrap();
        let (ds, map) = binarize(&raw).unwrap();
        let yes = map.class_index("Yes").unwrap();
        let split = resolve_consistency(&ds, yes, false);
        assert_eq!(split.positives, vec![vec![true, false, true, false]]);
        assert_eq!(split.positive_counts, vec![2], "merged multiplicity kept");
        assert_eq!(
            split.negatives,
            vec![
                vec![false, true, true, false],
                vec![true, false, false, true]
            ]
        );
        assert_eq!(split.dropped, 0);

        let kept = resolve_consistency(&ds, yes, true);
        assert_eq!(kept.positives.len(), 2, "keep_duplicates preserves e2,e3");
    }

    #[test]
    fn exact_tie_goes_to_smaller_class_index() {
        let ds = BinaryDataset {
            num_features: 2,
            examples: vec![(vec![true, false], 1), (vec![true, false], 0)],
            class_count: 2,
        };
        let split = resolve_consistency(&ds, 0, false);
        assert_eq!(split.positives.len(), 1);
        assert_eq!(split.negatives.len(), 0);
        assert_eq!(split.dropped, 1);
        let split1 = resolve_consistency(&ds, 1, false);
        assert_eq!(split1.positives.len(), 0);
        assert_eq!(split1.negatives.len(), 1);
    }

    #[test]
    fn consistent_data_has_zero_error() {
        let raw = parse_csv(DATE_CSV).unwrap();
        let (ds, _) = binarize(&raw).unwrap();
        let split = resolve_consistency(&ds, 0, false);
        assert_eq!(split.dropped, 0);
        assert_eq!(split.positives.len() + split.negatives.len(), 3);
    }

    #[test]
    fn splits_partition_surviving_vectors() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let k = rng.gen_range(1..=4);
            let n = rng.gen_range(1..=12);
            let classes = rng.gen_range(2..=3);
            let examples: Vec<(Vec<bool>, usize)> = (0..n)
                .map(|_| {
                    (
                        (0..k).map(|_| rng.gen_bool(0.5)).collect(),
                        rng.gen_range(0..classes),
                    )
                })
                .collect();
            let ds = BinaryDataset {
                num_features: k,
                examples,
                class_count: classes,
            };
            let distinct: HashSet<Vec<bool>> = ds.examples.iter().map(|(v, _)| v.clone()).collect();
            let mut assigned: HashMap<Vec<bool>, usize> = HashMap::new();
            for target in 0..classes {
                let split = resolve_consistency(&ds, target, false);
                for v in &split.positives {
                    // Each vector is positive for exactly one class.
                    assert!(assigned.insert(v.clone(), target).is_none());
                }
                assert_eq!(
                    split.positives.len() + split.negatives.len(),
                    distinct.len()
                );
            }
            assert_eq!(assigned.len(), distinct.len());
        }
    }

    #[test]
    fn majority_class_breaks_ties_to_the_smaller_index() {
        let ds = BinaryDataset {
            num_features: 1,
            examples: vec![
                (vec![true], 1),
                (vec![false], 1),
                (vec![true], 0),
                (vec![false], 0),
            ],
            class_count: 2,
        };
        assert_eq!(majority_class(&ds), 0);
        let ds2 = BinaryDataset {
            num_features: 1,
            examples: vec![(vec![true], 1), (vec![false], 1), (vec![true], 0)],
            class_count: 2,
        };
        assert_eq!(majority_class(&ds2), 1);
    }

    #[test]
    fn training_error_is_minimal_row_removal_count() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..40 {
            let k = rng.gen_range(1..=3);
            let n = rng.gen_range(1..=10);
            let examples: Vec<(Vec<bool>, usize)> = (0..n)
                .map(|_| {
                    (
                        (0..k).map(|_| rng.gen_bool(0.5)).collect(),
                        rng.gen_range(0..2),
                    )
                })
                .collect();
            let ds = BinaryDataset {
                num_features: k,
                examples: examples.clone(),
                class_count: 2,
            };
            let reported = resolve_consistency(&ds, 0, false).dropped;

            // Brute force: smallest subset of rows whose removal leaves no
            // vector labeled with two different classes.
            let mut best = n as u32;
            for mask in 0u32..(1 << n) {
                let mut seen: HashMap<&Vec<bool>, usize> = HashMap::new();
                let mut ok = true;
                for (i, (v, c)) in examples.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        continue;
                    }
                    match seen.get(v) {
                        Some(&c0) if c0 != *c => {
                            ok = false;
                            break;
                        }
                        _ => {
                            seen.insert(v, *c);
                        }
                    }
                }
                if ok {
                    best = best.min(mask.count_ones());
                }
            }
            assert_eq!(reported, best);
        }
    }
}
