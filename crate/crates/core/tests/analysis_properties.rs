//! Property tests for the evaluation harness and the chi-squared test.

use proptest::prelude::*;

use editalign::analysis::{
    chi_squared_independence, label_f1, match_f1, regularized_gamma_q, ContingencyTable,
};
use editalign::labeling::EditLabel;
use editalign::MatchEdge;

fn edges(pairs: &[(usize, usize)]) -> Vec<MatchEdge> {
    pairs
        .iter()
        .map(|&(draft_index, final_index)| MatchEdge {
            draft_index,
            final_index,
            score: 0.5,
        })
        .collect()
}

fn labels(ids: &[usize]) -> Vec<EditLabel> {
    ids.iter().map(|&i| EditLabel::ALL[i]).collect()
}

proptest! {
    #[test]
    fn match_f1_is_symmetric_in_its_f1_component(
        predicted in prop::collection::vec((0usize..6, 0usize..6), 0..10),
        gold in prop::collection::vec((0usize..6, 0usize..6), 0..10),
    ) {
        let p = edges(&predicted);
        let g = edges(&gold);
        let (_, _, forward) = match_f1(&p, &g);
        let (_, _, backward) = match_f1(&g, &p);
        prop_assert!((forward - backward).abs() < 1e-12);
    }

    #[test]
    fn match_f1_precision_recall_swap(
        predicted in prop::collection::vec((0usize..6, 0usize..6), 1..10),
        gold in prop::collection::vec((0usize..6, 0usize..6), 1..10),
    ) {
        let p = edges(&predicted);
        let g = edges(&gold);
        let (precision, recall, _) = match_f1(&p, &g);
        let (swapped_precision, swapped_recall, _) = match_f1(&g, &p);
        prop_assert!((precision - swapped_recall).abs() < 1e-12);
        prop_assert!((recall - swapped_precision).abs() < 1e-12);
    }

    #[test]
    fn label_f1_values_stay_in_unit_interval(
        ids in prop::collection::vec((0usize..3, 0usize..3), 1..40),
    ) {
        let pred_ids: Vec<usize> = ids.iter().map(|p| p.0).collect();
        let gold_ids: Vec<usize> = ids.iter().map(|p| p.1).collect();
        let report = label_f1(&labels(&pred_ids), &labels(&gold_ids)).unwrap();
        for value in [
            report.per_class_f1.keep,
            report.per_class_f1.edit,
            report.per_class_f1.del,
            report.micro_f1,
            report.macro_f1,
            report.weighted_f1,
        ] {
            prop_assert!((0.0..=1.0).contains(&value));
        }
    }

    #[test]
    fn micro_f1_equals_accuracy(ids in prop::collection::vec((0usize..3, 0usize..3), 1..40)) {
        let predicted = labels(&ids.iter().map(|p| p.0).collect::<Vec<_>>());
        let gold = labels(&ids.iter().map(|p| p.1).collect::<Vec<_>>());
        let report = label_f1(&predicted, &gold).unwrap();
        let correct = predicted.iter().zip(&gold).filter(|(p, g)| p == g).count();
        let accuracy = correct as f64 / gold.len() as f64;
        prop_assert!((report.micro_f1 - accuracy).abs() < 1e-12);
    }

    #[test]
    fn weighted_f1_is_the_class_f1_for_single_class_gold(
        pred_ids in prop::collection::vec(0usize..3, 1..30),
        gold_class in 0usize..3,
    ) {
        let predicted = labels(&pred_ids);
        let gold = vec![EditLabel::ALL[gold_class]; predicted.len()];
        let report = label_f1(&predicted, &gold).unwrap();
        let class_f1 = *report.per_class_f1.get(EditLabel::ALL[gold_class]);
        prop_assert!((report.weighted_f1 - class_f1).abs() < 1e-12);
    }

    #[test]
    fn chi_squared_statistic_scales_linearly(
        counts in prop::collection::vec(prop::collection::vec(0u64..40, 2..4), 2..4),
        factor in 2u64..6,
    ) {
        let cols = counts[0].len();
        prop_assume!(counts.iter().all(|r| r.len() == cols));
        let base = ContingencyTable::from_counts(counts.clone()).unwrap();
        let Ok(base_result) = chi_squared_independence(&base) else {
            return Ok(()); // degenerate tables are rejected; nothing to scale
        };
        let scaled_counts: Vec<Vec<u64>> = counts
            .iter()
            .map(|row| row.iter().map(|&v| v * factor).collect())
            .collect();
        let scaled = ContingencyTable::from_counts(scaled_counts).unwrap();
        let scaled_result = chi_squared_independence(&scaled).unwrap();
        prop_assert_eq!(scaled_result.dof, base_result.dof);
        let expected = base_result.statistic * factor as f64;
        prop_assert!(
            (scaled_result.statistic - expected).abs() <= 1e-9 * expected.max(1.0),
            "{} vs {}",
            scaled_result.statistic,
            expected
        );
    }

    #[test]
    fn p_value_decreases_as_the_statistic_grows(
        dof in 1usize..8,
        low in 0.0f64..40.0,
        bump in 0.01f64..20.0,
    ) {
        let high = low + bump;
        let p_low = regularized_gamma_q(dof as f64 / 2.0, low / 2.0);
        let p_high = regularized_gamma_q(dof as f64 / 2.0, high / 2.0);
        prop_assert!(p_high <= p_low + 1e-15);
    }

    #[test]
    fn dof_one_tail_matches_erfc(statistic in 0.001f64..60.0) {
        let p = regularized_gamma_q(0.5, statistic / 2.0);
        let reference = statrs::function::erf::erfc((statistic / 2.0).sqrt());
        prop_assert!(
            (p - reference).abs() < 1e-8,
            "p = {p}, erfc reference = {reference}"
        );
    }
}
