mod oracle;

use proptest::prelude::*;
use tokeval::report::metric_table;
use tokeval::stats::{correlation_matrix, pearson, rank_models, MetricTable};
use tokeval::{compare::ComparisonConfig, compare::run_comparison, TABLE1_FIXTURE};

use oracle::{naive_pearson, FROZEN_R, TABLE};

fn fixture_table() -> MetricTable {
    let config = ComparisonConfig::from_json(TABLE1_FIXTURE).unwrap();
    metric_table(&run_comparison(&config, None, None).unwrap()).unwrap()
}

#[test]
fn fixture_columns_match_oracle_table() {
    let table = fixture_table();
    assert_eq!(table.models(), ["gemma-2", "llama-3.1", "Qwen2.5", "aya-expanse"]);
    assert_eq!(table.column_names(), TABLE.map(|(n, _)| n));
    for (name, values) in TABLE {
        assert_eq!(table.column(name).unwrap(), values, "{name}");
    }
}

#[test]
fn fixture_matrix_agrees_with_frozen_and_naive_values() {
    let m = correlation_matrix(&fixture_table()).unwrap();
    m.check_invariants().unwrap();
    let pairs = m.pairs();
    assert_eq!(pairs.len(), FROZEN_R.len());
    for (a, b, r) in pairs {
        let (_, _, frozen) = FROZEN_R.iter().find(|(x, y, _)| *x == a && *y == b).unwrap();
        assert!((r - frozen).abs() < 5e-5, "{a}/{b}: {r} vs {frozen}");
        let col = |n: &str| TABLE.iter().find(|(c, _)| *c == n).unwrap().1;
        let naive = naive_pearson(&col(a), &col(b));
        assert!((r - naive).abs() < 1e-9, "{a}/{b}: {r} vs naive {naive}");
    }
}

#[test]
fn fixture_rankings() {
    let t = fixture_table();
    assert_eq!(
        rank_models(&t, "mmlu").unwrap(),
        ["gemma-2", "aya-expanse", "llama-3.1", "Qwen2.5"]
    );
    assert_eq!(
        rank_models(&t, "pct_tr").unwrap(),
        ["aya-expanse", "gemma-2", "llama-3.1", "Qwen2.5"]
    );
}

fn varied(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e6f64..1e6, len)
        .prop_filter("non-constant", |v| v.iter().any(|&x| x != v[0]))
}

fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..30).prop_flat_map(|n| (varied(n..n + 1), varied(n..n + 1)))
}

proptest! {
    #[test]
    fn exact_linear_gives_unit_r(x in varied(2..40), a in 0.01f64..100.0, b in -1e3f64..1e3) {
        let up: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let down: Vec<f64> = x.iter().map(|v| -a * v + b).collect();
        prop_assert!((pearson(&x, &up).unwrap() - 1.0).abs() < 1e-9);
        prop_assert!((pearson(&x, &down).unwrap() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn symmetric_and_affine_invariant((x, y) in pair(), a in 0.01f64..100.0, b in -1e3f64..1e3) {
        let r = pearson(&x, &y).unwrap();
        prop_assert!((r - pearson(&y, &x).unwrap()).abs() < 1e-9);
        let scaled: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        prop_assert!((r - pearson(&scaled, &y).unwrap()).abs() < 1e-9);
        let flipped: Vec<f64> = y.iter().map(|v| -a * v + b).collect();
        prop_assert!((r + pearson(&x, &flipped).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn agrees_with_naive_formula((x, y) in pair()) {
        let r = pearson(&x, &y).unwrap();
        prop_assert!((-1.0..=1.0).contains(&r));
        prop_assert!((r - naive_pearson(&x, &y)).abs() < 1e-6);
    }

    #[test]
    fn matrix_entries_are_pairwise_calls(cols in (2usize..12).prop_flat_map(|n| prop::collection::vec(varied(n..n + 1), 2..6))) {
        let models = (0..cols[0].len()).map(|i| format!("m{i}")).collect();
        let mut table = MetricTable::new(models);
        for (i, c) in cols.iter().enumerate() {
            table.push_column(&format!("c{i}"), c.clone()).unwrap();
        }
        let m = correlation_matrix(&table).unwrap();
        m.check_invariants().unwrap();
        for i in 0..cols.len() {
            prop_assert_eq!(m.r[i][i], 1.0);
            for j in 0..cols.len() {
                if i != j {
                    prop_assert_eq!(m.r[i][j], pearson(&cols[i], &cols[j]).unwrap());
                }
            }
        }
    }
}
