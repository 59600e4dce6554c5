use proptest::prelude::*;

use relunet::approx::{
    build_bridge, make_partition, DeltaPolicy, Modulus, ShiftPolicy, TargetFunction,
};
use relunet::bits::{build_bits_width_depth, BitString};
use relunet::cpwl::{to_shallow_net, PiecewiseLinear};
use relunet::network::{
    compose_serial, deserialize, hexfloat, serialize, stack_parallel, widen_with_passthrough,
};
use relunet::{AffineLayer, ReluNetwork};

fn layer(rows: usize, cols: usize) -> impl Strategy<Value = AffineLayer> {
    (
        prop::collection::vec(-2.0f64..2.0, rows * cols),
        prop::collection::vec(-1.0f64..1.0, rows),
    )
        .prop_map(move |(w, b)| AffineLayer::new(rows, cols, w, b).unwrap())
}

/// Networks with scalar input and output and up to three hidden layers.
fn network() -> impl Strategy<Value = ReluNetwork> {
    prop::collection::vec(1usize..5, 0..4).prop_flat_map(|hidden| {
        let mut dims = vec![1];
        dims.extend(hidden);
        dims.push(1);
        let layers: Vec<_> = dims.windows(2).map(|w| layer(w[1], w[0])).collect();
        layers.prop_map(|ls| ReluNetwork::new(ls).unwrap())
    })
}

proptest! {
    #[test]
    fn hexfloat_round_trip(bits in any::<u64>()) {
        let v = f64::from_bits(bits);
        prop_assume!(v.is_finite());
        let s = hexfloat::format(v).unwrap();
        prop_assert_eq!(hexfloat::parse(&s).unwrap().to_bits(), bits);
    }

    #[test]
    fn serialize_round_trip(net in network()) {
        let text = serialize(&net, &Default::default());
        let back = deserialize(&text).unwrap().network;
        prop_assert_eq!(back, net);
    }

    #[test]
    fn compose_matches_sequential(a in network(), b in network(), x in -3.0f64..3.0) {
        let c = compose_serial(&a, &b).unwrap();
        let direct = b.eval1(&[a.eval1(&[x])]);
        prop_assert!((c.eval1(&[x]) - direct).abs() <= 1e-9 * direct.abs().max(1.0));
        prop_assert_eq!(c.depth(), a.depth() + b.depth());
    }

    #[test]
    fn stack_matches_parts(a in network(), b in network(), x in -3.0f64..3.0) {
        let s = stack_parallel(&[a.clone(), b.clone()], true).unwrap();
        let y = s.evaluate(&[x]).unwrap();
        prop_assert!((y[0] - a.eval1(&[x])).abs() <= 1e-9 * y[0].abs().max(1.0));
        prop_assert!((y[1] - b.eval1(&[x])).abs() <= 1e-9 * y[1].abs().max(1.0));
    }

    #[test]
    fn passthrough_carries_value(a in network(), x in -3.0f64..3.0, v in -1.0f64..5.0) {
        let w = widen_with_passthrough(&a, 1, 1.0).unwrap();
        let y = w.evaluate(&[x, v]).unwrap();
        prop_assert!((y[1] - v).abs() <= 1e-12 * v.abs().max(1.0) + 1e-15);
    }

    #[test]
    fn shallow_form_is_exact(
        steps in prop::collection::vec((0.05f64..1.0, -2.0f64..2.0), 1..10),
        s0 in -2.0f64..2.0,
        s1 in -2.0f64..2.0,
        x in -5.0f64..10.0,
    ) {
        let mut pts = Vec::new();
        let mut t = -1.0;
        for (dx, y) in steps {
            pts.push((t, y));
            t += dx;
        }
        let f = PiecewiseLinear::from_points(&pts, s0, s1).unwrap();
        let v = f.eval(x);
        prop_assert!((to_shallow_net(&f).eval1(&[x]) - v).abs() <= 1e-9 * v.abs().max(1.0));
    }

    #[test]
    fn bit_sums_are_exact(bits in prop::collection::vec(0u8..=1, 12), k in 0usize..=12) {
        let net = build_bits_width_depth(3, 4).unwrap();
        let s = BitString::new(bits).unwrap();
        prop_assert_eq!(net.eval1(&[s.value(), k as f64]), f64::from(s.partial_sum(k)));
    }

    #[test]
    fn trifling_region_complements_cubes(nw in 1u64..6, l in 1u64..3, x in 0.0f64..=1.0) {
        let spec = make_partition(nw, l, 1, DeltaPolicy::Max).unwrap();
        let inside = (0..spec.k).filter(|&b| {
            let (lo, hi) = spec.cube(&[b])[0];
            lo <= x && x <= hi
        }).count();
        prop_assert_eq!(inside == 0, spec.in_trifling_region(&[x]));
        prop_assert!(inside <= 1);
    }

    #[test]
    fn bridge_gap_within_modulus(c0 in -1.0f64..1.0, c1 in -1.0f64..1.0, nw in 1u64..10, l in 1u64..3) {
        let lambda = (c0 * c0 + c1 * c1).sqrt();
        let f = TargetFunction::new("lin", 2, Modulus::lipschitz(lambda), move |x| c0 * x[0] + c1 * x[1]);
        let spec = make_partition(nw, l, 2, DeltaPolicy::Max).unwrap();
        let (g, eps, _) = build_bridge(&f, &spec, ShiftPolicy::EmpiricalMin).unwrap();
        let k = spec.k as f64;
        prop_assert!(eps <= f.omega(2f64.sqrt() / k) + 1e-12 || eps == relunet::approx::EPSILON_FLOOR);
        prop_assert!(g.values.iter().all(|v| *v >= 0.0 && *v <= 2.0 * f.omega(2f64.sqrt()) + 1e-12));
    }
}
