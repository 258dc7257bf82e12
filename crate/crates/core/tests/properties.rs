//! Property tests for the serialization formats and the hard-function
//! invariants that must hold at any configuration.

use depthsep_core::hardfn::{build_family, HardFunction, SignVector};
use depthsep_core::netbuild::{
    ActivationKind, ThreeLayerNet, TwoLayerNet, TwoLayerUnit, Coupling, InnerUnit, OuterUnit,
};
use proptest::prelude::*;

fn finite_f64() -> impl Strategy<Value = f64> {
    prop_oneof![
        prop::num::f64::NORMAL,
        prop::num::f64::SUBNORMAL,
        Just(0.0),
        Just(-0.0),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_layer_text_round_trip(
        vs in prop::collection::vec(finite_f64(), 1..6),
        ws in prop::collection::vec(finite_f64(), 3..18),
        bs in prop::collection::vec(finite_f64(), 1..6),
    ) {
        let d = 3u32;
        let k = vs.len().min(bs.len()).min(ws.len() / 3);
        prop_assume!(k >= 1);
        let units: Vec<TwoLayerUnit> = (0..k)
            .map(|i| TwoLayerUnit { v: vs[i], w: ws[3 * i..3 * i + 3].to_vec(), b: bs[i] })
            .collect();
        let net = TwoLayerNet { d, activation: ActivationKind::Relu, units };
        let back = TwoLayerNet::from_text(&net.to_text()).unwrap();
        prop_assert_eq!(net.to_text(), back.to_text());
        for (a, b) in net.units.iter().zip(&back.units) {
            prop_assert_eq!(a.v.to_bits(), b.v.to_bits());
            prop_assert_eq!(a.b.to_bits(), b.b.to_bits());
            for (x, y) in a.w.iter().zip(&b.w) {
                prop_assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn three_layer_text_round_trip(
        ws in prop::collection::vec(finite_f64(), 4..10),
        col in prop::collection::vec(finite_f64(), 2..5),
        us in prop::collection::vec(finite_f64(), 1..4),
    ) {
        let d = 2u32;
        let k_in = (ws.len() / 2).min(col.len());
        let k_out = us.len();
        prop_assume!(k_in >= 1 && k_out >= 1);
        let net = ThreeLayerNet {
            d,
            activation: ActivationKind::Threshold,
            inner: (0..k_in)
                .map(|i| InnerUnit { w: ws[2 * i..2 * i + 2].to_vec(), b: ws[2 * i] })
                .collect(),
            coupling: Coupling::Scaled {
                col: col[..k_in].to_vec(),
                row_gain: vec![1.0; k_out],
            },
            outer: us.iter().map(|u| OuterUnit { u: *u, c: *u * 0.5 }).collect(),
        };
        let back = ThreeLayerNet::from_text(&net.to_text()).unwrap();
        prop_assert_eq!(net.to_text(), back.to_text());
    }

    #[test]
    fn hard_function_round_trip_and_invariants(
        n in 4usize..60,
        alpha in 1.0f64..4.0,
        d in 2u32..5,
        seed in 0u64..1000,
        flips in prop::collection::vec(any::<bool>(), 60),
    ) {
        let family = build_family(d, alpha, n).unwrap();
        let eps: Vec<i8> = (0..n).map(|i| if flips[i % flips.len()] { 1 } else { -1 }).collect();
        let h = HardFunction::new(
            family,
            SignVector { eps, high_freq_mass: 0.25, seed },
        )
        .unwrap();
        let back = HardFunction::from_text(&h.to_text()).unwrap();
        prop_assert_eq!(back.to_text(), h.to_text());

        // g̃ takes values in {−1, 0, 1}; the surrogate stays within [−1, 1]
        // and inside the support
        let (a, b) = h.family.support();
        for k in 0..200 {
            let r = a - 1.0 + (b - a + 2.0) * k as f64 / 199.0;
            let g = h.eval_gtilde(r);
            prop_assert!(g == 0.0 || g == 1.0 || g == -1.0);
            let s = h.eval_surrogate(r);
            prop_assert!((-1.0..=1.0).contains(&s));
            if !(a..b).contains(&r) {
                prop_assert_eq!(s, 0.0);
                prop_assert_eq!(g, 0.0);
            }
            // the surrogate never exceeds the indicator in magnitude and
            // matches its sign wherever it is nonzero
            if s != 0.0 {
                prop_assert_eq!(s.signum(), g.signum());
                prop_assert!(s.abs() <= g.abs());
            }
        }
    }
}
