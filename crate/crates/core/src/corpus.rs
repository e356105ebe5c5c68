//! Record schema, line-delimited serialization, corpus statistics,
//! experimental splits, class balancing, and triplet construction.
//!
//! Records are stored one JSON object per line with a fixed field order
//! (`id`, `draft`, `cited`, `final`, `labels`, `edges`), so writing the
//! same records always produces the same bytes.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::alignment::{load_score_matrix, ScorerSpec};
use crate::error::{Error, Result};
use crate::labeling::{EditLabel, PerClass};

/// One aligned document: draft sentences, cited-reference sentences, final
/// sentences, and (once labeled) the per-draft edit labels and match edges.
///
/// Edges are stored as `(draft index, final index)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatentRecord {
    pub id: String,
    pub draft: Vec<String>,
    pub cited: Vec<String>,
    #[serde(rename = "final")]
    pub final_: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<EditLabel>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(usize, usize)>>,
}

impl PatentRecord {
    /// Checks the structural invariants: non-empty id and draft, label list
    /// aligned to the draft, edges in bounds with unique draft indices.
    pub fn validate(&self) -> Result<()> {
        let invalid = |message: String| Error::InvalidRecord {
            id: self.id.clone(),
            message,
        };
        if self.id.is_empty() {
            return Err(Error::InvalidRecord {
                id: "<unnamed>".into(),
                message: "field `id` must be non-empty".into(),
            });
        }
        if self.draft.is_empty() {
            return Err(invalid("field `draft` must be non-empty".into()));
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.draft.len() {
                return Err(invalid(format!(
                    "{} labels for {} draft sentences",
                    labels.len(),
                    self.draft.len()
                )));
            }
        }
        if let Some(edges) = &self.edges {
            let mut seen = vec![false; self.draft.len()];
            for &(draft_index, final_index) in edges {
                if draft_index >= self.draft.len() {
                    return Err(invalid(format!("edge draft index {draft_index} out of bounds")));
                }
                if final_index >= self.final_.len() {
                    return Err(invalid(format!("edge final index {final_index} out of bounds")));
                }
                if seen[draft_index] {
                    return Err(invalid(format!("draft index {draft_index} appears in two edges")));
                }
                seen[draft_index] = true;
            }
        }
        Ok(())
    }

    fn labels_or_err(&self) -> Result<&[EditLabel]> {
        self.labels
            .as_deref()
            .ok_or_else(|| Error::Unlabeled(self.id.clone()))
    }
}

/// Parses one record line (1-based `line_no` is used in errors).
pub fn parse_record_line(line: &str, line_no: usize) -> Result<PatentRecord> {
    let record: PatentRecord = serde_json::from_str(line).map_err(|e| Error::Record {
        line: line_no,
        message: e.to_string(),
    })?;
    record.validate().map_err(|e| Error::Record {
        line: line_no,
        message: e.to_string(),
    })?;
    Ok(record)
}

/// Serializes one record to its line form (no trailing newline).
pub fn record_to_line(record: &PatentRecord) -> Result<String> {
    record.validate()?;
    serde_json::to_string(record).map_err(|e| Error::InvalidRecord {
        id: record.id.clone(),
        message: e.to_string(),
    })
}

/// Reads a line-delimited record file. Blank lines are skipped; invalid
/// lines are reported with their line number.
pub fn read_records(path: &Path) -> Result<Vec<PatentRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(parse_record_line(&line, idx + 1)?);
    }
    Ok(records)
}

/// Writes records one per line. `read_records(write_records(x)) == x`.
pub fn write_records(records: &[PatentRecord], path: &Path) -> Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    for record in records {
        writeln!(writer, "{}", record_to_line(record)?)?;
    }
    writer.flush()?;
    Ok(())
}

/// Label distribution of a labeled corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    pub records: usize,
    pub sentences: usize,
    pub mean_sentences_per_record: f64,
    pub counts: PerClass<usize>,
    pub fractions: PerClass<f64>,
}

/// Counts labels across all records (every record must be labeled).
pub fn corpus_stats(records: &[PatentRecord]) -> Result<StatsReport> {
    let mut counts = PerClass::<usize>::default();
    let mut sentences = 0usize;
    for record in records {
        for &label in record.labels_or_err()? {
            *counts.get_mut(label) += 1;
        }
        sentences += record.draft.len();
    }
    let fraction = |count: usize| {
        if sentences == 0 {
            0.0
        } else {
            count as f64 / sentences as f64
        }
    };
    Ok(StatsReport {
        records: records.len(),
        sentences,
        mean_sentences_per_record: if records.is_empty() {
            0.0
        } else {
            sentences as f64 / records.len() as f64
        },
        fractions: PerClass {
            keep: fraction(counts.keep),
            edit: fraction(counts.edit),
            del: fraction(counts.del),
        },
        counts,
    })
}

/// Train/validation/test fractions plus the shuffle seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub validation_fraction: f64,
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.8,
            validation_fraction: 0.1,
            test_fraction: 0.1,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        let fractions = [
            self.train_fraction,
            self.validation_fraction,
            self.test_fraction,
        ];
        if fractions.iter().any(|&f| !f.is_finite() || f <= 0.0) {
            return Err(Error::Config("split fractions must be positive".into()));
        }
        let sum: f64 = fractions.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("split fractions sum to {sum}, not 1")));
        }
        Ok(())
    }
}

fn dominant_label(labels: &[EditLabel]) -> EditLabel {
    let mut counts = PerClass::<usize>::default();
    for &label in labels {
        *counts.get_mut(label) += 1;
    }
    // ties resolve in keep > edit > del order
    EditLabel::ALL
        .into_iter()
        .max_by_key(|&label| *counts.get(label))
        .expect("three candidate labels")
}

/// Largest-remainder allocation of `total` items to the three fractions.
fn allocate(total: usize, fractions: [f64; 3]) -> [usize; 3] {
    let targets: Vec<f64> = fractions.iter().map(|f| f * total as f64).collect();
    let mut sizes: [usize; 3] = [
        targets[0].floor() as usize,
        targets[1].floor() as usize,
        targets[2].floor() as usize,
    ];
    let mut remaining = total - sizes.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| {
        let ra = targets[a] - targets[a].floor();
        let rb = targets[b] - targets[b].floor();
        rb.partial_cmp(&ra).expect("finite fractions").then(a.cmp(&b))
    });
    for idx in order {
        if remaining == 0 {
            break;
        }
        sizes[idx] += 1;
        remaining -= 1;
    }
    sizes
}

/// Seeded stratified split. Records are shuffled, binned by their dominant
/// edit label, and each bin is allocated to the three splits by largest
/// remainder, so every split inherits the corpus label mix.
pub fn stratified_split(
    records: &[PatentRecord],
    spec: &SplitSpec,
) -> Result<(Vec<PatentRecord>, Vec<PatentRecord>, Vec<PatentRecord>)> {
    spec.validate()?;
    if records.len() < 10 {
        return Err(Error::TooFewRecords(records.len()));
    }
    let mut order: Vec<usize> = (0..records.len()).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    order.shuffle(&mut rng);

    let mut bins: Vec<Vec<usize>> = vec![Vec::new(); 3];
    for idx in order {
        let label = dominant_label(records[idx].labels_or_err()?);
        let bin = EditLabel::ALL.iter().position(|&l| l == label).expect("known label");
        bins[bin].push(idx);
    }

    let fractions = [
        spec.train_fraction,
        spec.validation_fraction,
        spec.test_fraction,
    ];
    let mut splits: [Vec<PatentRecord>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for bin in bins {
        let sizes = allocate(bin.len(), fractions);
        let mut cursor = bin.into_iter();
        for (split, &size) in splits.iter_mut().zip(sizes.iter()) {
            split.extend(cursor.by_ref().take(size).map(|idx| records[idx].clone()));
        }
    }
    let [train, validation, test] = splits;
    Ok((train, validation, test))
}

/// Downsamples every class (seeded, without replacement) to the size of
/// the smallest non-empty class; survivors keep their relative order.
pub fn undersample(
    examples: &[(String, EditLabel)],
    seed: u64,
) -> Vec<(String, EditLabel)> {
    let mut by_class: PerClass<Vec<usize>> = PerClass::default();
    for (idx, (_, label)) in examples.iter().enumerate() {
        by_class.get_mut(*label).push(idx);
    }
    let minimum = EditLabel::ALL
        .iter()
        .map(|&label| by_class.get(label).len())
        .filter(|&n| n > 0)
        .min()
        .unwrap_or(0);

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut kept = Vec::new();
    for label in EditLabel::ALL {
        let indices = by_class.get(label);
        if indices.len() <= minimum {
            kept.extend_from_slice(indices);
        } else {
            let mut pool = indices.clone();
            pool.shuffle(&mut rng);
            kept.extend_from_slice(&pool[..minimum]);
        }
    }
    kept.sort_unstable();
    kept.into_iter().map(|idx| examples[idx].clone()).collect()
}

/// One retriever training example: a draft sentence (anchor), its most
/// similar cited sentence (positive), and the final sentence it was edited
/// into (negative).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triplet {
    pub anchor: String,
    pub positive: String,
    pub negative: String,
    pub record_id: String,
}

fn usable(sentence: &str) -> bool {
    !sentence.trim().is_empty()
}

/// Builds triplets from every edited draft sentence that has a match edge.
///
/// The positive is the cited sentence with the highest `cited_ranker` score
/// against the draft sentence (lowest index on ties). Records with no cited
/// sentences are skipped. For an external ranker, `matrix_path` names a
/// directory holding one `<record id>.txt` score grid per record.
pub fn build_triplets(
    records: &[PatentRecord],
    cited_ranker: &ScorerSpec,
    limit: Option<usize>,
) -> Result<Vec<Triplet>> {
    let limit = limit.unwrap_or(usize::MAX);
    let mut triplets = Vec::new();
    if limit == 0 {
        return Ok(triplets);
    }
    for record in records {
        let labels = record.labels_or_err()?;
        let edges = record.edges.as_ref().ok_or_else(|| Error::InvalidRecord {
            id: record.id.clone(),
            message: "triplet construction needs match edges".into(),
        })?;
        if !record.cited.iter().any(|c| usable(c)) {
            continue;
        }
        let edge_of: HashMap<usize, usize> = edges.iter().copied().collect();
        let external_matrix = match cited_ranker {
            ScorerSpec::External(dir) => Some(load_score_matrix(
                &dir.join(format!("{}.txt", record.id)),
                record.draft.len(),
                record.cited.len(),
            )?),
            ScorerSpec::Builtin(_) => None,
        };
        for (draft_index, label) in labels.iter().enumerate() {
            if *label != EditLabel::Edited {
                continue;
            }
            let Some(&final_index) = edge_of.get(&draft_index) else {
                continue;
            };
            let anchor = &record.draft[draft_index];
            let negative = &record.final_[final_index];
            if !usable(anchor) || !usable(negative) {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for (cited_index, cited) in record.cited.iter().enumerate() {
                if !usable(cited) {
                    continue;
                }
                let score = match (&external_matrix, cited_ranker) {
                    (Some(matrix), _) => matrix.get(draft_index, cited_index),
                    (None, ScorerSpec::Builtin(metric)) => metric.score_strings(anchor, cited)?,
                    (None, ScorerSpec::External(_)) => unreachable!("matrix loaded above"),
                };
                if best.is_none_or(|(_, best_score)| score > best_score) {
                    best = Some((cited_index, score));
                }
            }
            let Some((cited_index, _)) = best else {
                continue;
            };
            triplets.push(Triplet {
                anchor: anchor.clone(),
                positive: record.cited[cited_index].clone(),
                negative: negative.clone(),
                record_id: record.id.clone(),
            });
            if triplets.len() == limit {
                return Ok(triplets);
            }
        }
    }
    Ok(triplets)
}

/// Triplet loss over precomputed anchor-positive / anchor-negative
/// distances: `max(0, d_ap - d_an + alpha)`.
pub fn triplet_loss(d_ap: f64, d_an: f64, alpha: f64) -> f64 {
    debug_assert!(d_ap >= 0.0 && d_an >= 0.0, "distances must be non-negative");
    (d_ap - d_an + alpha).max(0.0)
}
