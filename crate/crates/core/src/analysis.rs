//! Evaluation harness: match F1 against gold edges, multi-average label F1,
//! the entailment-to-edit mapping, and the chi-squared independence test.

use std::collections::HashSet;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::alignment::MatchEdge;
use crate::error::{Error, Result};
use crate::labeling::{EditLabel, PerClass};

/// A textual-entailment verdict for a (cited, draft) sentence pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EntailmentLabel {
    #[serde(rename = "contradiction")]
    Contradiction,
    #[serde(rename = "neutral")]
    Neutral,
    #[serde(rename = "entailment")]
    Entailment,
}

impl EntailmentLabel {
    pub const ALL: [EntailmentLabel; 3] = [
        EntailmentLabel::Contradiction,
        EntailmentLabel::Neutral,
        EntailmentLabel::Entailment,
    ];
}

/// Maps an entailment verdict onto an edit label: a draft claim that
/// contradicts the cited premise is novel (kept); one entailed by it
/// infringes (deleted); neutral pairs are edited.
pub fn entailment_to_edit(label: EntailmentLabel) -> EditLabel {
    match label {
        EntailmentLabel::Contradiction => EditLabel::Kept,
        EntailmentLabel::Neutral => EditLabel::Edited,
        EntailmentLabel::Entailment => EditLabel::Deleted,
    }
}

/// Precision/recall/F1 of two edge sets with the degenerate conventions:
/// both empty scores (1, 1, 1), exactly one empty scores (0, 0, 0).
pub fn set_f1<T: Eq + Hash>(predicted: &HashSet<T>, gold: &HashSet<T>) -> (f64, f64, f64) {
    if predicted.is_empty() && gold.is_empty() {
        return (1.0, 1.0, 1.0);
    }
    if predicted.is_empty() || gold.is_empty() {
        return (0.0, 0.0, 0.0);
    }
    let overlap = predicted.intersection(gold).count() as f64;
    let precision = overlap / predicted.len() as f64;
    let recall = overlap / gold.len() as f64;
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    (precision, recall, f1)
}

/// Compares predicted and gold edges as unordered sets of
/// `(draft index, final index)` pairs; scores are ignored.
pub fn match_f1(predicted: &[MatchEdge], gold: &[MatchEdge]) -> (f64, f64, f64) {
    let as_set = |edges: &[MatchEdge]| -> HashSet<(usize, usize)> {
        edges.iter().map(|e| (e.draft_index, e.final_index)).collect()
    };
    set_f1(&as_set(predicted), &as_set(gold))
}

/// Match evaluation report (all values in `[0, 1]`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchEvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl MatchEvalReport {
    /// JSON with every value printed at 4 decimal places.
    pub fn to_json(&self) -> String {
        format!(
            r#"{{"precision":{:.4},"recall":{:.4},"f1":{:.4}}}"#,
            self.precision, self.recall, self.f1
        )
    }
}

/// Per-class and averaged F1 over edit labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelEvalReport {
    pub per_class_f1: PerClass<f64>,
    pub micro_f1: f64,
    pub macro_f1: f64,
    pub weighted_f1: f64,
}

impl LabelEvalReport {
    /// JSON with every value printed at 4 decimal places.
    pub fn to_json(&self) -> String {
        format!(
            r#"{{"per_class_f1":{{"keep":{:.4},"edit":{:.4},"del":{:.4}}},"micro_f1":{:.4},"macro_f1":{:.4},"weighted_f1":{:.4}}}"#,
            self.per_class_f1.keep,
            self.per_class_f1.edit,
            self.per_class_f1.del,
            self.micro_f1,
            self.macro_f1,
            self.weighted_f1
        )
    }
}

/// One-vs-rest F1 per class plus micro (global, equals accuracy for
/// single-label data), macro (unweighted mean over the three classes,
/// absent classes contributing 0), and weighted (by gold support) averages.
pub fn label_f1(predicted: &[EditLabel], gold: &[EditLabel]) -> Result<LabelEvalReport> {
    if predicted.len() != gold.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: gold.len(),
        });
    }
    if gold.is_empty() {
        return Err(Error::EmptyInput("label_f1"));
    }
    let mut true_pos = PerClass::<usize>::default();
    let mut false_pos = PerClass::<usize>::default();
    let mut false_neg = PerClass::<usize>::default();
    let mut support = PerClass::<usize>::default();
    for (&p, &g) in predicted.iter().zip(gold) {
        *support.get_mut(g) += 1;
        if p == g {
            *true_pos.get_mut(p) += 1;
        } else {
            *false_pos.get_mut(p) += 1;
            *false_neg.get_mut(g) += 1;
        }
    }
    let class_f1 = |label: EditLabel| -> f64 {
        let tp = *true_pos.get(label) as f64;
        let denom = 2.0 * tp + *false_pos.get(label) as f64 + *false_neg.get(label) as f64;
        if denom == 0.0 {
            0.0
        } else {
            2.0 * tp / denom
        }
    };
    let per_class_f1 = PerClass {
        keep: class_f1(EditLabel::Kept),
        edit: class_f1(EditLabel::Edited),
        del: class_f1(EditLabel::Deleted),
    };
    let total = gold.len() as f64;
    let tp_total: usize = EditLabel::ALL.iter().map(|&l| *true_pos.get(l)).sum();
    let fp_total: usize = EditLabel::ALL.iter().map(|&l| *false_pos.get(l)).sum();
    let fn_total: usize = EditLabel::ALL.iter().map(|&l| *false_neg.get(l)).sum();
    let micro_f1 = tp_total as f64 / (tp_total as f64 + 0.5 * (fp_total + fn_total) as f64);
    let macro_f1 = EditLabel::ALL.iter().map(|&l| *per_class_f1.get(l)).sum::<f64>() / 3.0;
    let weighted_f1 = EditLabel::ALL
        .iter()
        .map(|&l| *support.get(l) as f64 * *per_class_f1.get(l))
        .sum::<f64>()
        / total;
    Ok(LabelEvalReport {
        per_class_f1,
        micro_f1,
        macro_f1,
        weighted_f1,
    })
}

/// A rectangular grid of observation counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<u64>>,
}

impl ContingencyTable {
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        if counts.is_empty() || counts[0].is_empty() {
            return Err(Error::EmptyInput("contingency table"));
        }
        let cols = counts[0].len();
        if let Some(row) = counts.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                left: cols,
                right: row.len(),
            });
        }
        Ok(Self { counts })
    }

    /// A 3x3 entailment-by-edit table tallied from paired predictions.
    pub fn from_label_pairs(pairs: &[(EntailmentLabel, EditLabel)]) -> Self {
        let mut counts = vec![vec![0u64; 3]; 3];
        for &(entailment, edit) in pairs {
            let row = EntailmentLabel::ALL.iter().position(|&e| e == entailment).expect("known");
            let col = EditLabel::ALL.iter().position(|&l| l == edit).expect("known");
            counts[row][col] += 1;
        }
        Self { counts }
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }
}

/// Result of the chi-squared independence test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquaredResult {
    pub statistic: f64,
    pub p_value: f64,
    pub dof: usize,
}

/// Pearson chi-squared test of independence. All-zero rows and columns are
/// dropped first; at least two of each must remain. The p-value is the
/// upper tail `Q(dof/2, statistic/2)` of the chi-squared distribution.
pub fn chi_squared_independence(table: &ContingencyTable) -> Result<ChiSquaredResult> {
    let counts = &table.counts;
    let row_sums: Vec<u64> = counts.iter().map(|row| row.iter().sum()).collect();
    let col_sums: Vec<u64> = (0..counts[0].len())
        .map(|j| counts.iter().map(|row| row[j]).sum())
        .collect();
    let rows: Vec<usize> = (0..counts.len()).filter(|&i| row_sums[i] > 0).collect();
    let cols: Vec<usize> = (0..counts[0].len()).filter(|&j| col_sums[j] > 0).collect();
    if rows.len() < 2 || cols.len() < 2 {
        return Err(Error::DegenerateTable);
    }
    let total: u64 = row_sums.iter().sum();
    let total = total as f64;
    let mut statistic = 0.0;
    for &i in &rows {
        for &j in &cols {
            let expected = row_sums[i] as f64 * col_sums[j] as f64 / total;
            let diff = counts[i][j] as f64 - expected;
            statistic += diff * diff / expected;
        }
    }
    let dof = (rows.len() - 1) * (cols.len() - 1);
    let p_value = regularized_gamma_q(dof as f64 / 2.0, statistic / 2.0);
    Ok(ChiSquaredResult {
        statistic,
        p_value,
        dof,
    })
}

// Lanczos approximation, g = 7, 9 terms. Accurate to ~1e-15 for x > 0.5;
// the reflection branch covers (0, 0.5).
#[allow(clippy::excessive_precision)]
fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    debug_assert!(x > 0.0);
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return pi.ln() - (pi * x).sin().ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = 0.99999999999980993;
    for (i, &coeff) in COEFFS.iter().enumerate() {
        acc += coeff / (z + (i + 1) as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized upper incomplete gamma `Q(a, x)`, by power series for
/// `x < a + 1` and Lentz continued fraction otherwise. Converges to
/// near machine precision (well inside 1e-10 relative).
pub fn regularized_gamma_q(a: f64, x: f64) -> f64 {
    assert!(a > 0.0, "shape parameter must be positive");
    assert!(x >= 0.0, "argument must be non-negative");
    if x == 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - lower_gamma_series(a, x)
    } else {
        upper_gamma_continued_fraction(a, x)
    }
}

fn gamma_prefactor(a: f64, x: f64) -> f64 {
    (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn lower_gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..1000 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    sum * gamma_prefactor(a, x)
}

fn upper_gamma_continued_fraction(a: f64, x: f64) -> f64 {
    const FPMIN: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    gamma_prefactor(a, x) * h
}
