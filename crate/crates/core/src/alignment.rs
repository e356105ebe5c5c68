//! Similarity matrices and the draft/final sentence matching algorithms.
//!
//! Matching works over a [`SimilarityMatrix`] (one score per draft/final
//! sentence pair) or, for [`match_and_cover`], directly over token
//! sequences so covered parts of a final sentence can be carved out by LCS
//! removal. Scores can come from a builtin metric or from an external
//! score-matrix file (used to plug in embedding-based scorers without
//! running a model in-process).

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::text_metrics::{
    bleu, chrf, lcs, meteor, remove_lcs, rouge_l, rouge_n, tokenize, TokenSequence,
};

/// The sentence-pair metrics that can score a matrix in-process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinMetric {
    Bleu1,
    Bleu4,
    Rouge1,
    RougeL,
    Meteor,
    Chrf,
}

impl BuiltinMetric {
    pub const ALL: [BuiltinMetric; 6] = [
        BuiltinMetric::Bleu1,
        BuiltinMetric::Bleu4,
        BuiltinMetric::Rouge1,
        BuiltinMetric::RougeL,
        BuiltinMetric::Meteor,
        BuiltinMetric::Chrf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinMetric::Bleu1 => "bleu1",
            BuiltinMetric::Bleu4 => "bleu4",
            BuiltinMetric::Rouge1 => "rouge1",
            BuiltinMetric::RougeL => "rougeL",
            BuiltinMetric::Meteor => "meteor",
            BuiltinMetric::Chrf => "chrf",
        }
    }

    /// Scores a raw sentence pair. Token metrics tokenize first; chrf runs
    /// on the strings as given.
    pub fn score_strings(self, candidate: &str, reference: &str) -> Result<f64> {
        match self {
            BuiltinMetric::Chrf => Ok(chrf(candidate, reference)?.value),
            _ => self.score_tokens(&tokenize(candidate), &tokenize(reference)),
        }
    }

    /// Scores a tokenized pair. chrf scores the whitespace-joined tokens.
    pub fn score_tokens(self, candidate: &TokenSequence, reference: &TokenSequence) -> Result<f64> {
        let score = match self {
            BuiltinMetric::Bleu1 => bleu(candidate, reference, 1)?,
            BuiltinMetric::Bleu4 => bleu(candidate, reference, 4)?,
            BuiltinMetric::Rouge1 => rouge_n(candidate, reference, 1)?,
            BuiltinMetric::RougeL => rouge_l(candidate, reference)?,
            BuiltinMetric::Meteor => meteor(candidate, reference)?,
            BuiltinMetric::Chrf => chrf(&candidate.joined(), &reference.joined())?,
        };
        Ok(score.value)
    }
}

impl FromStr for BuiltinMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BuiltinMetric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownMetric(s.to_owned()))
    }
}

impl fmt::Display for BuiltinMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where similarity scores come from: a builtin metric computed in-process,
/// or a precomputed score-matrix file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScorerSpec {
    Builtin(BuiltinMetric),
    External(PathBuf),
}

impl ScorerSpec {
    /// Parses `bleu1|bleu4|rouge1|rougeL|meteor|chrf` or `external:<path>`.
    pub fn parse(s: &str) -> Result<Self> {
        if let Some(path) = s.strip_prefix("external:") {
            if path.is_empty() {
                return Err(Error::Config("external scorer needs a path".into()));
            }
            Ok(ScorerSpec::External(PathBuf::from(path)))
        } else {
            Ok(ScorerSpec::Builtin(s.parse()?))
        }
    }

    pub fn builtin(&self) -> Option<BuiltinMetric> {
        match self {
            ScorerSpec::Builtin(m) => Some(*m),
            ScorerSpec::External(_) => None,
        }
    }
}

impl fmt::Display for ScorerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScorerSpec::Builtin(m) => f.write_str(m.name()),
            ScorerSpec::External(path) => write!(f, "external:{}", path.display()),
        }
    }
}

/// A |draft| x |final| grid of similarity scores in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    scorer: ScorerSpec,
}

impl SimilarityMatrix {
    /// Builds a matrix from row vectors, validating shape and value range.
    pub fn from_rows(rows: Vec<Vec<f64>>, scorer: ScorerSpec) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::EmptyInput("similarity matrix"));
        }
        let cols = rows[0].len();
        let mut values = Vec::with_capacity(rows.len() * cols);
        for row in &rows {
            if row.len() != cols {
                return Err(Error::LengthMismatch {
                    left: cols,
                    right: row.len(),
                });
            }
            for &v in row {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Config(format!("similarity value {v} outside [0, 1]")));
                }
            }
            values.extend_from_slice(row);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            values,
            scorer,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn scorer(&self) -> &ScorerSpec {
        &self.scorer
    }
}

/// One attribution of a final sentence's content to a draft sentence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchEdge {
    pub draft_index: usize,
    pub final_index: usize,
    pub score: f64,
}

/// Which matching procedure produced a [`MatchResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatchAlgorithm {
    DraftGreedy,
    FinalGreedy,
    MatchAndCover,
}

impl MatchAlgorithm {
    pub fn name(self) -> &'static str {
        match self {
            MatchAlgorithm::DraftGreedy => "draft_greedy",
            MatchAlgorithm::FinalGreedy => "final_greedy",
            MatchAlgorithm::MatchAndCover => "match_and_cover",
        }
    }
}

impl FromStr for MatchAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "draft_greedy" => Ok(MatchAlgorithm::DraftGreedy),
            "final_greedy" => Ok(MatchAlgorithm::FinalGreedy),
            "match_and_cover" => Ok(MatchAlgorithm::MatchAndCover),
            other => Err(Error::UnknownAlgorithm(other.to_owned())),
        }
    }
}

impl fmt::Display for MatchAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Matching output. Draft indices are unique across edges; for
/// [`match_and_cover`] a final index may appear in several edges.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub edges: Vec<MatchEdge>,
    pub algorithm: MatchAlgorithm,
}

/// Scores every `left[i]` / `right[j]` pair with a builtin metric, or loads
/// the precomputed grid for an external scorer.
pub fn score_matrix(left: &[String], right: &[String], scorer: &ScorerSpec) -> Result<SimilarityMatrix> {
    if left.is_empty() {
        return Err(Error::EmptyInput("score_matrix left sentence list"));
    }
    if right.is_empty() {
        return Err(Error::EmptyInput("score_matrix right sentence list"));
    }
    match scorer {
        ScorerSpec::Builtin(metric) => {
            let mut rows = Vec::with_capacity(left.len());
            for cand in left {
                let mut row = Vec::with_capacity(right.len());
                for reference in right {
                    row.push(metric.score_strings(cand, reference)?);
                }
                rows.push(row);
            }
            SimilarityMatrix::from_rows(rows, scorer.clone())
        }
        ScorerSpec::External(path) => load_score_matrix(path, left.len(), right.len()),
    }
}

/// Loads an external score-matrix file: first line `R C`, then R rows of C
/// space-separated values in `[0, 1]`.
pub fn load_score_matrix(path: &Path, expected_rows: usize, expected_cols: usize) -> Result<SimilarityMatrix> {
    let format_err = |message: String| Error::MatrixFormat {
        path: path.to_path_buf(),
        message,
    };
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| format_err("empty file".into()))?;
    let mut parts = header.split_whitespace();
    let rows: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| format_err("header must be `R C`".into()))?;
    let cols: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| format_err("header must be `R C`".into()))?;
    if parts.next().is_some() {
        return Err(format_err("header must be `R C`".into()));
    }
    if rows != expected_rows || cols != expected_cols {
        return Err(Error::MatrixDimensions {
            path: path.to_path_buf(),
            found_rows: rows,
            found_cols: cols,
            expected_rows,
            expected_cols,
        });
    }
    let mut grid = Vec::with_capacity(rows);
    for _ in 0..rows {
        let (idx, line) = lines
            .next()
            .ok_or_else(|| format_err(format!("expected {rows} data rows")))?;
        let mut row = Vec::with_capacity(cols);
        for token in line.split_whitespace() {
            let value: f64 = token
                .parse()
                .map_err(|_| format_err(format!("line {}: bad value `{token}`", idx + 1)))?;
            if !(0.0..=1.0).contains(&value) {
                return Err(format_err(format!(
                    "line {}: value {value} outside [0, 1]",
                    idx + 1
                )));
            }
            row.push(value);
        }
        if row.len() != cols {
            return Err(format_err(format!(
                "line {}: expected {cols} values, found {}",
                idx + 1,
                row.len()
            )));
        }
        grid.push(row);
    }
    SimilarityMatrix::from_rows(grid, ScorerSpec::External(path.to_path_buf()))
}

/// Draft-side greedy matching: each draft row, in ascending order, takes
/// the highest-scoring still-available final column, provided that score
/// clears `deleted_threshold`. Ties break toward the lowest final index.
pub fn draft_side_greedy(matrix: &SimilarityMatrix, deleted_threshold: f64) -> MatchResult {
    let mut taken = vec![false; matrix.cols()];
    let mut edges = Vec::new();
    for i in 0..matrix.rows() {
        let best = (0..matrix.cols())
            .filter(|&j| !taken[j])
            .map(|j| (j, matrix.get(i, j)))
            .max_by(|a, b| a.1.partial_cmp(&b.1).expect("scores are not NaN").then(b.0.cmp(&a.0)));
        if let Some((j, score)) = best {
            if score >= deleted_threshold {
                taken[j] = true;
                edges.push(MatchEdge {
                    draft_index: i,
                    final_index: j,
                    score,
                });
            }
        }
    }
    MatchResult {
        edges,
        algorithm: MatchAlgorithm::DraftGreedy,
    }
}

/// Final-side greedy matching: each final column, in ascending order, is
/// assigned the highest-scoring still-unmatched draft row, provided that
/// score clears `deleted_threshold`. Ties break toward the lowest draft
/// index.
pub fn final_side_greedy(matrix: &SimilarityMatrix, deleted_threshold: f64) -> MatchResult {
    let mut matched = vec![false; matrix.rows()];
    let mut edges = Vec::new();
    for j in 0..matrix.cols() {
        let best = (0..matrix.rows())
            .filter(|&i| !matched[i])
            .map(|i| (i, matrix.get(i, j)))
            .max_by(|a, b| a.1.partial_cmp(&b.1).expect("scores are not NaN").then(b.0.cmp(&a.0)));
        if let Some((i, score)) = best {
            if score >= deleted_threshold {
                matched[i] = true;
                edges.push(MatchEdge {
                    draft_index: i,
                    final_index: j,
                    score,
                });
            }
        }
    }
    MatchResult {
        edges,
        algorithm: MatchAlgorithm::FinalGreedy,
    }
}

/// Match-and-cover for final-side matching.
///
/// For each final sentence, while more than `epsilon` of its tokens remain
/// uncovered: score every unmatched draft against the remaining tokens,
/// take the best one (lowest index on ties), and if its score clears `tau`
/// remove the LCS of the pair from the remainder and emit the edge. Several
/// drafts can thereby attribute to one final sentence.
pub fn match_and_cover(
    drafts: &[TokenSequence],
    finals: &[TokenSequence],
    metric: BuiltinMetric,
    tau: f64,
    epsilon: f64,
) -> MatchResult {
    let mut matched = vec![false; drafts.len()];
    let mut edges = Vec::new();
    for (j, final_sentence) in finals.iter().enumerate() {
        let original_len = final_sentence.len();
        if original_len == 0 {
            continue;
        }
        let mut remaining = final_sentence.clone();
        while remaining.len() as f64 / original_len as f64 > epsilon {
            let mut best: Option<(usize, f64)> = None;
            for (i, draft) in drafts.iter().enumerate() {
                if matched[i] || draft.is_empty() {
                    continue;
                }
                let score = metric
                    .score_tokens(draft, &remaining)
                    .expect("both sequences are non-empty");
                if best.is_none_or(|(_, best_score)| score > best_score) {
                    best = Some((i, score));
                }
            }
            match best {
                Some((i, score)) if score >= tau => {
                    let common = lcs(&drafts[i], &remaining);
                    remaining = remove_lcs(&remaining, &common).expect("lcs is a subsequence");
                    matched[i] = true;
                    edges.push(MatchEdge {
                        draft_index: i,
                        final_index: j,
                        score,
                    });
                }
                _ => break,
            }
        }
    }
    MatchResult {
        edges,
        algorithm: MatchAlgorithm::MatchAndCover,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn seq(tokens: &[&str]) -> TokenSequence {
        tokens.iter().copied().collect()
    }

    fn matrix(rows: Vec<Vec<f64>>) -> SimilarityMatrix {
        SimilarityMatrix::from_rows(rows, ScorerSpec::Builtin(BuiltinMetric::RougeL)).unwrap()
    }

    fn edge_pairs(result: &MatchResult) -> Vec<(usize, usize)> {
        result.edges.iter().map(|e| (e.draft_index, e.final_index)).collect()
    }

    #[test]
    fn metric_names_round_trip() {
        for metric in BuiltinMetric::ALL {
            assert_eq!(metric.name().parse::<BuiltinMetric>().unwrap(), metric);
        }
        assert!("bleu2".parse::<BuiltinMetric>().is_err());
    }

    #[test]
    fn scorer_spec_parse() {
        assert_eq!(
            ScorerSpec::parse("rougeL").unwrap(),
            ScorerSpec::Builtin(BuiltinMetric::RougeL)
        );
        assert_eq!(
            ScorerSpec::parse("external:/tmp/m.txt").unwrap(),
            ScorerSpec::External(PathBuf::from("/tmp/m.txt"))
        );
        assert!(ScorerSpec::parse("cosine").is_err());
        assert!(ScorerSpec::parse("external:").is_err());
    }

    #[test]
    fn score_matrix_identity_pair() {
        let left = vec!["a b".to_owned()];
        let m = score_matrix(&left, &left, &ScorerSpec::Builtin(BuiltinMetric::RougeL)).unwrap();
        assert_eq!((m.rows(), m.cols()), (1, 1));
        assert!((m.get(0, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn score_matrix_disjoint_pair() {
        let left = vec!["a".to_owned()];
        let right = vec!["b".to_owned()];
        let m = score_matrix(&left, &right, &ScorerSpec::Builtin(BuiltinMetric::Bleu1)).unwrap();
        assert_eq!(m.get(0, 0), 0.0);
    }

    #[test]
    fn score_matrix_rejects_empty_lists() {
        let one = vec!["a".to_owned()];
        assert!(score_matrix(&[], &one, &ScorerSpec::Builtin(BuiltinMetric::Bleu1)).is_err());
        assert!(score_matrix(&one, &[], &ScorerSpec::Builtin(BuiltinMetric::Bleu1)).is_err());
    }

    #[test]
    fn external_matrix_round_trip() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "2 3").unwrap();
        writeln!(file, "0.1 0.2 0.3").unwrap();
        writeln!(file, "0.9 0.85 1.0").unwrap();
        let left = vec!["a".to_owned(), "b".to_owned()];
        let right = vec!["x".to_owned(), "y".to_owned(), "z".to_owned()];
        let m = score_matrix(&left, &right, &ScorerSpec::External(file.path().to_path_buf())).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 3));
        assert_eq!(m.get(0, 1), 0.2);
        assert_eq!(m.get(1, 2), 1.0);
    }

    #[test]
    fn external_matrix_dimension_mismatch() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "1 1").unwrap();
        writeln!(file, "0.5").unwrap();
        let two = vec!["a".to_owned(), "b".to_owned()];
        let one = vec!["x".to_owned()];
        let err = score_matrix(&two, &one, &ScorerSpec::External(file.path().to_path_buf()));
        assert!(matches!(err, Err(Error::MatrixDimensions { .. })));
    }

    #[test]
    fn external_matrix_rejects_out_of_range() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "1 1").unwrap();
        writeln!(file, "1.5").unwrap();
        let one = vec!["a".to_owned()];
        assert!(score_matrix(&one, &one, &ScorerSpec::External(file.path().to_path_buf())).is_err());
    }

    #[test]
    fn draft_greedy_identity_matrix() {
        let m = matrix(vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        let result = draft_side_greedy(&m, 0.45);
        assert_eq!(edge_pairs(&result), vec![(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn draft_greedy_all_below_threshold() {
        let m = matrix(vec![vec![0.0, 0.0], vec![0.0, 0.0]]);
        assert!(draft_side_greedy(&m, 0.45).edges.is_empty());
    }

    #[test]
    fn draft_greedy_takes_best_available_column() {
        // row 0 takes col 0; row 1's best available is col 1 at 0.2 < 0.45
        let m = matrix(vec![vec![0.9, 0.8], vec![0.9, 0.2]]);
        let result = draft_side_greedy(&m, 0.45);
        assert_eq!(edge_pairs(&result), vec![(0, 0)]);
        assert_eq!(result.edges[0].score, 0.9);
    }

    #[test]
    fn draft_greedy_breaks_ties_toward_lowest_column() {
        let m = matrix(vec![vec![0.7, 0.7]]);
        let result = draft_side_greedy(&m, 0.45);
        assert_eq!(edge_pairs(&result), vec![(0, 0)]);
    }

    #[test]
    fn final_greedy_identity_matrix() {
        let m = matrix(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let result = final_side_greedy(&m, 0.45);
        assert_eq!(edge_pairs(&result), vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn final_greedy_skips_columns_below_threshold() {
        // col 0 picks draft 0 (0.9); col 1's best unmatched is draft 1 at 0.2
        let m = matrix(vec![vec![0.9, 0.8], vec![0.85, 0.2]]);
        let result = final_side_greedy(&m, 0.45);
        assert_eq!(edge_pairs(&result), vec![(0, 0)]);
    }

    #[test]
    fn final_greedy_breaks_ties_toward_lowest_draft() {
        let m = matrix(vec![vec![0.7], vec![0.7]]);
        let result = final_side_greedy(&m, 0.45);
        assert_eq!(edge_pairs(&result), vec![(0, 0)]);
    }

    #[test]
    fn match_and_cover_identical_lists() {
        let drafts = vec![seq(&["a", "b", "c"]), seq(&["d", "e", "f"])];
        let result = match_and_cover(&drafts, &drafts.clone(), BuiltinMetric::RougeL, 0.45, 0.3);
        assert_eq!(edge_pairs(&result), vec![(0, 0), (1, 1)]);
        assert!(result.edges.iter().all(|e| (e.score - 1.0).abs() < 1e-12));
    }

    #[test]
    fn match_and_cover_disjoint_tokens() {
        let drafts = vec![seq(&["a", "b"])];
        let finals = vec![seq(&["x", "y"])];
        let result = match_and_cover(&drafts, &finals, BuiltinMetric::RougeL, 0.45, 0.3);
        assert!(result.edges.is_empty());
    }

    #[test]
    fn match_and_cover_attributes_concatenation() {
        let drafts = vec![
            seq(&["a", "b", "c", "d", "e", "f"]),
            seq(&["g", "h", "i", "j", "k", "l"]),
        ];
        let finals = vec![seq(&[
            "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l",
        ])];
        let result = match_and_cover(&drafts, &finals, BuiltinMetric::RougeL, 0.45, 0.3);
        assert_eq!(edge_pairs(&result), vec![(0, 0), (1, 0)]);
        // first match scores against the full final, second against the remainder
        assert!((result.edges[0].score - 2.0 / 3.0).abs() < 1e-12);
        assert!((result.edges[1].score - 1.0).abs() < 1e-12);
    }

    #[test]
    fn match_and_cover_stops_at_fraction_limit() {
        // identical draft covers the final entirely in one step; remainder
        // fraction 0 stops the loop
        let drafts = vec![seq(&["a", "b"]), seq(&["a", "b"])];
        let finals = vec![seq(&["a", "b"])];
        let result = match_and_cover(&drafts, &finals, BuiltinMetric::RougeL, 0.45, 0.3);
        assert_eq!(edge_pairs(&result), vec![(0, 0)]);
    }

    #[test]
    fn match_and_cover_skips_empty_sentences() {
        let drafts = vec![TokenSequence::default(), seq(&["a", "b"])];
        let finals = vec![TokenSequence::default(), seq(&["a", "b"])];
        let result = match_and_cover(&drafts, &finals, BuiltinMetric::RougeL, 0.45, 0.3);
        assert_eq!(edge_pairs(&result), vec![(1, 1)]);
    }
}
