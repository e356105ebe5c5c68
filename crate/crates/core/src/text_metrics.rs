//! Sentence-pair similarity metrics and the token utilities they share.
//!
//! Everything in this module is a pure function: the same inputs always
//! produce the same score, and all scores lie in `[0, 1]`. The n-gram
//! metrics ([`bleu`], [`rouge_n`], [`rouge_l`], [`meteor`]) operate on
//! [`TokenSequence`]s produced by [`tokenize`]; [`chrf`] works directly on
//! character n-grams of the raw strings.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// An ordered list of lowercase tokens.
///
/// Produced by [`tokenize`]; never contains empty-string tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TokenSequence {
    tokens: Vec<String>,
}

impl TokenSequence {
    /// Wraps a token list, dropping any empty-string tokens.
    pub fn new(tokens: Vec<String>) -> Self {
        Self {
            tokens: tokens.into_iter().filter(|t| !t.is_empty()).collect(),
        }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// The tokens joined with single spaces (used when a character-level
    /// metric needs to score a token remainder).
    pub fn joined(&self) -> String {
        self.tokens.join(" ")
    }
}

impl From<Vec<String>> for TokenSequence {
    fn from(tokens: Vec<String>) -> Self {
        Self::new(tokens)
    }
}

impl<'a> FromIterator<&'a str> for TokenSequence {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        Self::new(iter.into_iter().map(str::to_owned).collect())
    }
}

/// A similarity value in `[0, 1]` together with the metric that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricScore {
    pub value: f64,
    pub metric_name: String,
}

impl MetricScore {
    fn new(value: f64, metric_name: impl Into<String>) -> Self {
        debug_assert!((0.0..=1.0).contains(&value), "metric out of range: {value}");
        Self {
            value,
            metric_name: metric_name.into(),
        }
    }
}

/// Lowercases, splits on whitespace, and detaches punctuation characters as
/// standalone tokens. Empty input yields an empty sequence.
pub fn tokenize(text: &str) -> TokenSequence {
    let mut tokens = Vec::new();
    let mut word = String::new();
    for ch in text.to_lowercase().chars() {
        if ch.is_whitespace() {
            if !word.is_empty() {
                tokens.push(std::mem::take(&mut word));
            }
        } else if ch.is_alphanumeric() {
            word.push(ch);
        } else {
            // punctuation or symbol: becomes its own token
            if !word.is_empty() {
                tokens.push(std::mem::take(&mut word));
            }
            tokens.push(ch.to_string());
        }
    }
    if !word.is_empty() {
        tokens.push(word);
    }
    TokenSequence { tokens }
}

fn ngram_counts(tokens: &[String], order: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if order == 0 || tokens.len() < order {
        return counts;
    }
    for window in tokens.windows(order) {
        *counts.entry(window).or_insert(0) += 1;
    }
    counts
}

/// Clipped n-gram matches: sum over candidate n-grams of
/// `min(count_in_candidate, count_in_reference)`.
fn clipped_matches(cand: &HashMap<&[String], usize>, reference: &HashMap<&[String], usize>) -> usize {
    cand.iter()
        .map(|(gram, &count)| count.min(reference.get(gram).copied().unwrap_or(0)))
        .sum()
}

fn require_non_empty(seq: &TokenSequence, side: &'static str) -> Result<()> {
    if seq.is_empty() {
        Err(Error::EmptyInput(side))
    } else {
        Ok(())
    }
}

/// Sentence-level BLEU: geometric mean of clipped modified n-gram precisions
/// for orders `1..=max_order`, times the brevity penalty
/// `exp(1 - |ref|/|cand|)` when the candidate is shorter than the reference.
///
/// No smoothing is applied: any order with zero matches, or a candidate
/// shorter than `max_order`, scores 0.
pub fn bleu(candidate: &TokenSequence, reference: &TokenSequence, max_order: usize) -> Result<MetricScore> {
    assert!(max_order >= 1, "max_order must be >= 1");
    require_non_empty(candidate, "bleu candidate")?;
    require_non_empty(reference, "bleu reference")?;
    Ok(MetricScore::new(
        bleu_value(candidate.tokens(), reference.tokens(), max_order),
        format!("bleu{max_order}"),
    ))
}

pub(crate) fn bleu_value(candidate: &[String], reference: &[String], max_order: usize) -> f64 {
    if candidate.len() < max_order {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for order in 1..=max_order {
        let cand_grams = ngram_counts(candidate, order);
        let ref_grams = ngram_counts(reference, order);
        let matched = clipped_matches(&cand_grams, &ref_grams);
        if matched == 0 {
            return 0.0;
        }
        let total: usize = cand_grams.values().sum();
        log_sum += (matched as f64 / total as f64).ln();
    }
    let brevity = if candidate.len() < reference.len() {
        (1.0 - reference.len() as f64 / candidate.len() as f64).exp()
    } else {
        1.0
    };
    brevity * (log_sum / max_order as f64).exp()
}

/// ROUGE-N: F1 of clipped n-gram overlap for a single order.
pub fn rouge_n(candidate: &TokenSequence, reference: &TokenSequence, order: usize) -> Result<MetricScore> {
    assert!(order >= 1, "order must be >= 1");
    require_non_empty(candidate, "rouge_n candidate")?;
    require_non_empty(reference, "rouge_n reference")?;
    Ok(MetricScore::new(
        rouge_n_value(candidate.tokens(), reference.tokens(), order),
        format!("rouge{order}"),
    ))
}

pub(crate) fn rouge_n_value(candidate: &[String], reference: &[String], order: usize) -> f64 {
    let cand_grams = ngram_counts(candidate, order);
    let ref_grams = ngram_counts(reference, order);
    let cand_total: usize = cand_grams.values().sum();
    let ref_total: usize = ref_grams.values().sum();
    if cand_total == 0 || ref_total == 0 {
        return 0.0;
    }
    let matched = clipped_matches(&cand_grams, &ref_grams) as f64;
    let precision = matched / cand_total as f64;
    let recall = matched / ref_total as f64;
    f1(precision, recall)
}

/// ROUGE-L: F1 over the longest common subsequence,
/// `P = |LCS|/|candidate|`, `R = |LCS|/|reference|`.
pub fn rouge_l(candidate: &TokenSequence, reference: &TokenSequence) -> Result<MetricScore> {
    require_non_empty(candidate, "rouge_l candidate")?;
    require_non_empty(reference, "rouge_l reference")?;
    Ok(MetricScore::new(
        rouge_l_value(candidate.tokens(), reference.tokens()),
        "rougeL",
    ))
}

pub(crate) fn rouge_l_value(candidate: &[String], reference: &[String]) -> f64 {
    let lcs = lcs_length(candidate, reference);
    if lcs == 0 {
        return 0.0;
    }
    let precision = lcs as f64 / candidate.len() as f64;
    let recall = lcs as f64 / reference.len() as f64;
    f1(precision, recall)
}

fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Exact-match METEOR: unigram matches `m` from a one-to-one greedy
/// alignment that prefers extending the current chunk, scored as
/// `F_mean * (1 - penalty)` with `F_mean = 10PR/(R+9P)` and
/// `penalty = 0.5 * (chunks/m)^3`.
pub fn meteor(candidate: &TokenSequence, reference: &TokenSequence) -> Result<MetricScore> {
    require_non_empty(candidate, "meteor candidate")?;
    require_non_empty(reference, "meteor reference")?;
    Ok(MetricScore::new(
        meteor_value(candidate.tokens(), reference.tokens()),
        "meteor",
    ))
}

pub(crate) fn meteor_value(candidate: &[String], reference: &[String]) -> f64 {
    let (matches, chunks) = meteor_alignment(candidate, reference);
    if matches == 0 {
        return 0.0;
    }
    let m = matches as f64;
    let precision = m / candidate.len() as f64;
    let recall = m / reference.len() as f64;
    let f_mean = 10.0 * precision * recall / (recall + 9.0 * precision);
    let penalty = 0.5 * (chunks as f64 / m).powi(3);
    f_mean * (1.0 - penalty)
}

/// One-to-one exact unigram alignment. Each candidate token is matched to
/// the reference position directly after the previous match when that
/// extends a chunk, otherwise to the earliest unmatched occurrence.
/// Returns (match count, chunk count).
fn meteor_alignment(candidate: &[String], reference: &[String]) -> (usize, usize) {
    let mut used = vec![false; reference.len()];
    let mut matches = 0usize;
    let mut chunks = 0usize;
    // (candidate index, reference index) of the previous match
    let mut prev: Option<(usize, usize)> = None;
    for (i, token) in candidate.iter().enumerate() {
        let continuation = prev.and_then(|(pi, pj)| {
            let j = pj + 1;
            (pi + 1 == i && j < reference.len() && !used[j] && reference[j] == *token).then_some(j)
        });
        let chosen = continuation
            .or_else(|| (0..reference.len()).find(|&j| !used[j] && reference[j] == *token));
        if let Some(j) = chosen {
            used[j] = true;
            matches += 1;
            let extends = prev.is_some_and(|(pi, pj)| pi + 1 == i && pj + 1 == j);
            if !extends {
                chunks += 1;
            }
            prev = Some((i, j));
        }
    }
    (matches, chunks)
}

const CHRF_MAX_ORDER: usize = 6;
const CHRF_BETA: f64 = 2.0;

/// ChrF: character n-gram F-score over orders 1..=6 with beta = 2
/// (recall-weighted). Whitespace is excluded from the n-grams; orders where
/// neither string has any n-gram are skipped from the average.
pub fn chrf(candidate: &str, reference: &str) -> Result<MetricScore> {
    if candidate.is_empty() {
        return Err(Error::EmptyInput("chrf candidate"));
    }
    if reference.is_empty() {
        return Err(Error::EmptyInput("chrf reference"));
    }
    Ok(MetricScore::new(chrf_value(candidate, reference), "chrf"))
}

pub(crate) fn chrf_value(candidate: &str, reference: &str) -> f64 {
    let cand: Vec<char> = candidate.chars().filter(|c| !c.is_whitespace()).collect();
    let reference: Vec<char> = reference.chars().filter(|c| !c.is_whitespace()).collect();
    let mut precision_sum = 0.0;
    let mut recall_sum = 0.0;
    let mut active_orders = 0usize;
    for order in 1..=CHRF_MAX_ORDER {
        let cand_grams = char_ngram_counts(&cand, order);
        let ref_grams = char_ngram_counts(&reference, order);
        let cand_total: usize = cand_grams.values().sum();
        let ref_total: usize = ref_grams.values().sum();
        if cand_total == 0 && ref_total == 0 {
            continue;
        }
        active_orders += 1;
        let matched: usize = cand_grams
            .iter()
            .map(|(gram, &count)| count.min(ref_grams.get(gram).copied().unwrap_or(0)))
            .sum();
        if cand_total > 0 {
            precision_sum += matched as f64 / cand_total as f64;
        }
        if ref_total > 0 {
            recall_sum += matched as f64 / ref_total as f64;
        }
    }
    if active_orders == 0 {
        return 0.0;
    }
    let precision = precision_sum / active_orders as f64;
    let recall = recall_sum / active_orders as f64;
    let beta_sq = CHRF_BETA * CHRF_BETA;
    let denom = beta_sq * precision + recall;
    if denom == 0.0 {
        0.0
    } else {
        (1.0 + beta_sq) * precision * recall / denom
    }
}

fn char_ngram_counts(chars: &[char], order: usize) -> HashMap<&[char], usize> {
    let mut counts = HashMap::new();
    if order == 0 || chars.len() < order {
        return counts;
    }
    for window in chars.windows(order) {
        *counts.entry(window).or_insert(0) += 1;
    }
    counts
}

/// LCS length only (used by ROUGE-L); rolling single-row DP.
pub(crate) fn lcs_length(a: &[String], b: &[String]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut row = vec![0usize; b.len() + 1];
    for token in a {
        let mut diagonal = 0;
        for (j, other) in b.iter().enumerate() {
            let above = row[j + 1];
            row[j + 1] = if token == other {
                diagonal + 1
            } else {
                above.max(row[j])
            };
            diagonal = above;
        }
    }
    row[b.len()]
}

/// A longest common subsequence of `a` and `b`.
///
/// Among equal-length candidates, returns the one whose match positions in
/// `a` are lexicographically first (earliest positions preferred), with the
/// earliest feasible positions in `b` as the secondary rule.
pub fn lcs(a: &TokenSequence, b: &TokenSequence) -> TokenSequence {
    let (tokens, _, _) = lcs_with_positions(a.tokens(), b.tokens());
    TokenSequence { tokens }
}

/// Deterministic LCS with the chosen match positions in both sequences.
pub(crate) fn lcs_with_positions(a: &[String], b: &[String]) -> (Vec<String>, Vec<usize>, Vec<usize>) {
    let n = a.len();
    let m = b.len();
    if n == 0 || m == 0 {
        return (Vec::new(), Vec::new(), Vec::new());
    }
    // suffix[i][j] = LCS length of a[i..] and b[j..]
    let mut suffix = vec![vec![0usize; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            suffix[i][j] = if a[i] == b[j] {
                suffix[i + 1][j + 1] + 1
            } else {
                suffix[i + 1][j].max(suffix[i][j + 1])
            };
        }
    }
    let mut tokens = Vec::with_capacity(suffix[0][0]);
    let mut a_positions = Vec::with_capacity(suffix[0][0]);
    let mut b_positions = Vec::with_capacity(suffix[0][0]);
    let (mut i, mut j) = (0, 0);
    while i < n && j < m && suffix[i][j] > 0 {
        // Match a[i] at its first occurrence in b[j..] when that keeps the
        // remaining LCS optimal; otherwise a[i] cannot be part of any
        // earliest-position optimum and is skipped.
        let first = (j..m).find(|&k| b[k] == a[i]);
        match first {
            Some(k) if suffix[i + 1][k + 1] + 1 == suffix[i][j] => {
                tokens.push(a[i].clone());
                a_positions.push(i);
                b_positions.push(k);
                i += 1;
                j = k + 1;
            }
            _ => i += 1,
        }
    }
    (tokens, a_positions, b_positions)
}

/// Removes one subsequence occurrence of `lcs_seq` from `target`, matching
/// each token at its earliest possible position. Remaining tokens keep
/// their relative order.
pub fn remove_lcs(target: &TokenSequence, lcs_seq: &TokenSequence) -> Result<TokenSequence> {
    let positions = subsequence_positions(target.tokens(), lcs_seq.tokens())
        .ok_or(Error::NotSubsequence)?;
    Ok(TokenSequence {
        tokens: remove_positions(target.tokens(), &positions),
    })
}

/// Earliest-position embedding of `needle` into `haystack`, or None if
/// `needle` is not a subsequence.
pub(crate) fn subsequence_positions(haystack: &[String], needle: &[String]) -> Option<Vec<usize>> {
    let mut positions = Vec::with_capacity(needle.len());
    let mut start = 0usize;
    for token in needle {
        let found = (start..haystack.len()).find(|&k| haystack[k] == *token)?;
        positions.push(found);
        start = found + 1;
    }
    Some(positions)
}

pub(crate) fn remove_positions(tokens: &[String], positions: &[usize]) -> Vec<String> {
    let mut cut = positions.iter().copied().peekable();
    tokens
        .iter()
        .enumerate()
        .filter_map(|(idx, token)| {
            if cut.peek() == Some(&idx) {
                cut.next();
                None
            } else {
                Some(token.clone())
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(tokens: &[&str]) -> TokenSequence {
        tokens.iter().copied().collect()
    }

    const TOL: f64 = 1e-12;

    #[test]
    fn tokenize_empty_input() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("   \t\n").is_empty());
    }

    #[test]
    fn tokenize_lowercases_and_detaches_punctuation() {
        assert_eq!(
            tokenize("A radiation image.").tokens(),
            ["a", "radiation", "image", "."]
        );
        assert_eq!(
            tokenize("claim 1, further").tokens(),
            ["claim", "1", ",", "further"]
        );
        assert_eq!(tokenize("x-ray (source)").tokens(), ["x", "-", "ray", "(", "source", ")"]);
    }

    #[test]
    fn tokenize_is_deterministic() {
        let text = "The CLAIMS, of claim 2; wherein...";
        assert_eq!(tokenize(text), tokenize(text));
    }

    #[test]
    fn bleu_identity_is_one() {
        let s = seq(&["a", "b", "c", "d", "e"]);
        assert!((bleu(&s, &s, 4).unwrap().value - 1.0).abs() < TOL);
    }

    #[test]
    fn bleu_disjoint_is_zero() {
        let a = seq(&["a", "b", "c", "d"]);
        let b = seq(&["e", "f", "g", "h"]);
        assert_eq!(bleu(&a, &b, 4).unwrap().value, 0.0);
    }

    #[test]
    fn bleu_brevity_penalty() {
        // all clipped precisions 1, penalty exp(1 - 5/4)
        let cand = seq(&["a", "b", "c", "d"]);
        let reference = seq(&["a", "b", "c", "d", "e"]);
        let expected = (-0.25f64).exp();
        assert!((bleu(&cand, &reference, 4).unwrap().value - expected).abs() < TOL);
    }

    #[test]
    fn bleu_short_candidate_is_zero() {
        let s = seq(&["a", "b", "c"]);
        assert_eq!(bleu(&s, &s, 4).unwrap().value, 0.0);
    }

    #[test]
    fn bleu_rejects_empty() {
        let s = seq(&["a"]);
        assert!(bleu(&TokenSequence::default(), &s, 1).is_err());
        assert!(bleu(&s, &TokenSequence::default(), 1).is_err());
    }

    // Values computed with an independent reference implementation of the
    // same formulas.
    #[test]
    fn bleu_reference_values() {
        let a = seq(&[
            "a", "radiation", "image", "projection", "apparatus", "comprising", "an", "image",
            "acquisition", "unit",
        ]);
        let b = seq(&[
            "a", "radiation", "image", "projection", "apparatus", "according", "to", "claim",
            "one", "comprising", "a", "unit",
        ]);
        assert!((bleu(&a, &b, 4).unwrap().value - 0.3498330125272252).abs() < 1e-12);
        assert!((bleu(&a, &b, 1).unwrap().value - 0.5731115271545874).abs() < 1e-12);

        let c = seq(&["the", "cat", "sat", "on", "the", "mat"]);
        let d = seq(&["the", "cat", "on", "a", "mat", "sat"]);
        assert!((bleu(&c, &d, 2).unwrap().value - 0.408248290463863).abs() < 1e-12);
    }

    #[test]
    fn rouge_n_identity_and_disjoint() {
        let s = seq(&["a", "b", "c"]);
        assert!((rouge_n(&s, &s, 1).unwrap().value - 1.0).abs() < TOL);
        assert!((rouge_n(&s, &s, 2).unwrap().value - 1.0).abs() < TOL);
        let t = seq(&["x", "y", "z"]);
        assert_eq!(rouge_n(&s, &t, 1).unwrap().value, 0.0);
    }

    #[test]
    fn rouge_n_order_insensitive_unigrams() {
        let a = seq(&["a", "b", "c"]);
        let b = seq(&["a", "c", "b"]);
        assert!((rouge_n(&a, &b, 1).unwrap().value - 1.0).abs() < TOL);
    }

    #[test]
    fn rouge_n_no_ngrams_of_order() {
        let a = seq(&["a"]);
        let b = seq(&["a", "b"]);
        assert_eq!(rouge_n(&a, &b, 2).unwrap().value, 0.0);
    }

    #[test]
    fn rouge_n_reference_values() {
        let a = seq(&[
            "a", "radiation", "image", "projection", "apparatus", "comprising", "an", "image",
            "acquisition", "unit",
        ]);
        let b = seq(&[
            "a", "radiation", "image", "projection", "apparatus", "according", "to", "claim",
            "one", "comprising", "a", "unit",
        ]);
        assert!((rouge_n(&a, &b, 1).unwrap().value - 0.6363636363636365).abs() < 1e-12);
        assert!((rouge_n(&a, &b, 2).unwrap().value - 0.4).abs() < 1e-12);
    }

    #[test]
    fn rouge_l_reference_values() {
        let a = seq(&["a", "b", "c", "d"]);
        let b = seq(&["a", "c", "b", "d"]);
        // LCS length 3, P = R = 3/4
        assert!((rouge_l(&a, &b).unwrap().value - 0.75).abs() < TOL);

        let c = seq(&["the", "cat", "sat", "on", "the", "mat"]);
        let d = seq(&["the", "cat", "on", "a", "mat", "sat"]);
        assert!((rouge_l(&c, &d).unwrap().value - 0.6666666666666666).abs() < 1e-12);
    }

    #[test]
    fn rouge_l_identity_and_disjoint() {
        let s = seq(&["a", "b", "c"]);
        assert!((rouge_l(&s, &s).unwrap().value - 1.0).abs() < TOL);
        assert_eq!(rouge_l(&s, &seq(&["x", "y"])).unwrap().value, 0.0);
    }

    #[test]
    fn meteor_disjoint_is_zero() {
        assert_eq!(meteor(&seq(&["a", "b"]), &seq(&["c", "d"])).unwrap().value, 0.0);
    }

    #[test]
    fn meteor_single_token_identity() {
        // m = 1, chunks = 1, F_mean = 1, penalty = 0.5
        assert!((meteor(&seq(&["x"]), &seq(&["x"])).unwrap().value - 0.5).abs() < TOL);
    }

    #[test]
    fn meteor_identity_length_ten() {
        let s: TokenSequence = ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j"]
            .into_iter()
            .collect();
        assert!((meteor(&s, &s).unwrap().value - 0.9995).abs() < TOL);
    }

    #[test]
    fn meteor_reference_values() {
        let c = seq(&["the", "cat", "sat", "on", "the", "mat"]);
        let d = seq(&["the", "cat", "on", "a", "mat", "sat"]);
        assert!((meteor(&c, &d).unwrap().value - 0.62).abs() < 1e-12);

        let a = seq(&[
            "a", "radiation", "image", "projection", "apparatus", "comprising", "an", "image",
            "acquisition", "unit",
        ]);
        let b = seq(&[
            "a", "radiation", "image", "projection", "apparatus", "according", "to", "claim",
            "one", "comprising", "a", "unit",
        ]);
        assert!((meteor(&a, &b).unwrap().value - 0.5698720166032516).abs() < 1e-12);
    }

    #[test]
    fn chrf_identity_and_disjoint() {
        assert!((chrf("abcd", "abcd").unwrap().value - 1.0).abs() < TOL);
        assert_eq!(chrf("aaaa", "bbbb").unwrap().value, 0.0);
    }

    #[test]
    fn chrf_reference_values() {
        assert!((chrf("abcd", "abce").unwrap().value - 23.0 / 48.0).abs() < 1e-12);
        assert!((chrf("the cat", "the bat").unwrap().value - 0.28055555555555556).abs() < 1e-12);
    }

    #[test]
    fn chrf_ignores_whitespace() {
        assert!((chrf("a b c d", "abcd").unwrap().value - 1.0).abs() < TOL);
    }

    #[test]
    fn chrf_rejects_empty() {
        assert!(chrf("", "x").is_err());
        assert!(chrf("x", "").is_err());
    }

    #[test]
    fn lcs_identity_and_empty() {
        let s = seq(&["a", "b", "c"]);
        assert_eq!(lcs(&s, &s), s);
        assert!(lcs(&TokenSequence::default(), &s).is_empty());
        assert!(lcs(&s, &TokenSequence::default()).is_empty());
    }

    #[test]
    fn lcs_skips_interleaved_tokens() {
        let a = seq(&["a", "x", "b", "y", "c"]);
        let b = seq(&["a", "b", "c"]);
        assert_eq!(lcs(&a, &b).tokens(), ["a", "b", "c"]);
    }

    #[test]
    fn lcs_prefers_earliest_positions() {
        // ["a","b"] can be matched at a-positions (0,2) or (1,2); the
        // earliest-position rule picks (0,2).
        let a = seq(&["a", "a", "b"]);
        let b = seq(&["a", "b"]);
        let (tokens, a_pos, b_pos) = lcs_with_positions(a.tokens(), b.tokens());
        assert_eq!(tokens, ["a", "b"]);
        assert_eq!(a_pos, vec![0, 2]);
        assert_eq!(b_pos, vec![0, 1]);
    }

    #[test]
    fn remove_lcs_examples() {
        let x = seq(&["a", "b", "c"]);
        assert!(remove_lcs(&x, &x).unwrap().is_empty());
        assert_eq!(remove_lcs(&x, &TokenSequence::default()).unwrap(), x);
        let target = seq(&["a", "x", "b", "y"]);
        assert_eq!(remove_lcs(&target, &seq(&["a", "b"])).unwrap().tokens(), ["x", "y"]);
    }

    #[test]
    fn remove_lcs_earliest_occurrence() {
        // "a" appears twice; the first is the one removed
        let target = seq(&["a", "b", "a"]);
        assert_eq!(remove_lcs(&target, &seq(&["a"])).unwrap().tokens(), ["b", "a"]);
    }

    #[test]
    fn remove_lcs_rejects_non_subsequence() {
        let target = seq(&["a", "b"]);
        assert!(matches!(
            remove_lcs(&target, &seq(&["b", "a"])),
            Err(Error::NotSubsequence)
        ));
        assert!(remove_lcs(&target, &seq(&["c"])).is_err());
    }
}
