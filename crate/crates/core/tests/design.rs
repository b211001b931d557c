use nsumkit::design::{min_sample_size, raw_sample_size, sample_size_grid, StudyDesign};
use nsumkit::PopulationSpec;
use proptest::prelude::*;

fn pop(m: u64, q: f64, d: f64) -> PopulationSpec {
    PopulationSpec { m, q, d_bar: d }
}

proptest! {
    #[test]
    fn doubling_epsilon_quarters_raw_value(eps in 0.01f64..0.5, q in 0.01f64..1.0, d in 1.0f64..500.0) {
        let p = pop(1_000_000, q, d);
        let a = raw_sample_size(&StudyDesign::new(eps, 0.05).unwrap(), &p).unwrap();
        let b = raw_sample_size(&StudyDesign::new(2.0 * eps, 0.05).unwrap(), &p).unwrap();
        prop_assert!((a / b - 4.0).abs() < 1e-12);
    }

    #[test]
    fn lower_inputs_never_shrink_n(q in 0.01f64..1.0, dq in 0.0f64..0.5, d in 1.0f64..500.0, dd in 0.0f64..0.5) {
        let design = StudyDesign::new(0.1, 0.05).unwrap();
        let base = min_sample_size(&design, &pop(100_000, q, d)).unwrap().n;
        let lower_q = min_sample_size(&design, &pop(100_000, q * (1.0 - dq), d)).unwrap().n;
        let lower_d = min_sample_size(&design, &pop(100_000, q, d * (1.0 - dd))).unwrap().n;
        prop_assert!(lower_q >= base && lower_d >= base);
    }

    #[test]
    fn design_effect_is_linear(c in 0.1f64..10.0, q in 0.01f64..1.0, d in 1.0f64..500.0) {
        let base = StudyDesign::new(0.1, 0.05).unwrap();
        let p = pop(50_000, q, d);
        let raw = raw_sample_size(&base, &p).unwrap();
        let n = min_sample_size(&base.with_design_effect(c).unwrap(), &p).unwrap().n;
        let expect = ((c * raw).ceil() as u64).clamp(1, 50_000);
        // Allow one unit for rounding in the product c · raw.
        prop_assert!(n.abs_diff(expect) <= 1, "{n} vs {expect}");
    }
}

#[test]
fn grid_is_monotone_and_truncated() {
    let q: Vec<f64> = vec![0.001, 0.005, 0.01, 0.05, 0.1, 0.5];
    let d: Vec<f64> = vec![1.0, 5.0, 10.0, 50.0, 100.0, 1000.0];
    let g = sample_size_grid(&StudyDesign::new(0.1, 0.05).unwrap(), 10_000, &q, &d).unwrap();
    for i in 0..q.len() {
        for j in 0..d.len() {
            assert!(g.n[i][j] <= 10_000 && g.n[i][j] >= 1);
            if i + 1 < q.len() {
                assert!(g.n[i + 1][j] <= g.n[i][j]);
            }
            if j + 1 < d.len() {
                assert!(g.n[i][j + 1] <= g.n[i][j]);
            }
        }
    }
    assert_eq!(g.n[0][0], 10_000);
    assert_eq!(g.long_rows().count(), 36);
}
