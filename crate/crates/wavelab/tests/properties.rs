//! Property tests over randomly drawn data.

use std::sync::Arc;

use proptest::prelude::*;

use wavelab::cli::{DataSpec, RunConfig, TimeSpec};
use wavelab::diagnostics::critical_norm;
use wavelab::models::{data, ModelSpec};
use wavelab::radial_spectral::{forward_transform, inverse_transform, GridSpec, RadialField, RadialGrid};

fn grid() -> Arc<RadialGrid> {
    RadialGrid::new(256, 20.0).unwrap()
}

fn bump(a: f64, w: f64) -> impl Fn(f64) -> f64 {
    move |r| a * (-0.5 * r * r / (w * w)).exp()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn transform_is_linear(a in -2.0..2.0f64, b in -2.0..2.0f64, w1 in 0.8..2.5f64, w2 in 0.8..2.5f64) {
        let g = grid();
        let f1 = RadialField::from_fn(g.clone(), bump(1.0, w1));
        let f2 = RadialField::from_fn(g.clone(), bump(1.0, w2));
        let sum = RadialField::from_fn(g.clone(), |r| bump(a, w1)(r) + bump(b, w2)(r));
        let (s1, s2, s) = (forward_transform(&f1).unwrap(), forward_transform(&f2).unwrap(), forward_transform(&sum).unwrap());
        let err: Vec<f64> = s.values().iter().zip(s1.values()).zip(s2.values()).map(|((v, x), y)| v - a * x - b * y).collect();
        prop_assert!(max_abs(&err) <= 1e-12 * (1.0 + max_abs(s.values())));
    }

    #[test]
    fn round_trip_recovers_resolved_fields(a in -3.0..3.0f64, w in 0.8..2.5f64, k in 0.0..4.0f64) {
        let g = grid();
        let f = RadialField::from_fn(g, |r| bump(a, w)(r) * (k * r).cos());
        let back = inverse_transform(&forward_transform(&f).unwrap()).unwrap();
        let err: Vec<f64> = back.values().iter().zip(f.values()).map(|(x, y)| x - y).collect();
        prop_assert!(max_abs(&err) <= 1e-9 * (1e-300 + max_abs(f.values())));
    }

    #[test]
    fn critical_norm_is_scale_invariant(a in 0.1..2.0f64, lambda in 0.7..1.5f64) {
        let g = RadialGrid::new(512, 30.0).unwrap();
        let s = data::free_state_gaussian(g, a, 1.0);
        let base = critical_norm(&s).unwrap();
        let scaled = critical_norm(&s.rescaled(lambda).unwrap()).unwrap();
        prop_assert!((scaled - base).abs() <= 1e-8 * base);
    }

    #[test]
    fn critical_norm_is_homogeneous(a in 0.01..5.0f64) {
        let g = grid();
        let one = critical_norm(&data::gaussian(g.clone(), 1.0, 1.0)).unwrap();
        let many = critical_norm(&data::gaussian(g, a, 1.0)).unwrap();
        prop_assert!((many - a * one).abs() <= 1e-12 * many);
    }

    #[test]
    fn config_json_round_trips(
        amp in -10.0..10.0f64,
        width in 0.1..5.0f64,
        n in 16usize..2048,
        dt in 1e-5..1e-1f64,
        seed in any::<u64>(),
    ) {
        let cfg = RunConfig {
            model: ModelSpec::wm_s3(),
            grid: GridSpec { n, r_max: 40.0, bandwidth: 1.0 },
            time: TimeSpec { dt, t_end: 1.0, snapshot_stride: 3 },
            data: DataSpec::Gaussian { amplitude: amp, width },
            diagnostics: vec!["energy".into(), "linf".into()],
            seed,
            out: "prop".into(),
            scheme: Default::default(),
        };
        let back = RunConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
