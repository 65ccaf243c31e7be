use gdn_manifold::linalg::Direction;
use gdn_manifold::resolve_manifold;
use gdn_manifold::sampling::{random_point, random_tangent};
use gdn_manifold::zoo::{distance, exp_map};
use gdn_nn::readout::simplex_from_support;
use gdn_nn::{
    gauge_chart, homotopy_shrink, parallelize, pipeline_eval, project_convex, softmax_chart,
    ActivationInfo, AffineLayer, ConvexShape, FeedforwardNet, Gauge, GdnModel, HomotopyShape,
    PipelineModel, PipelineOutput,
};
use gdn_quotient::{product_distance, Component, ProductSpace};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn random_net(rng: &mut ChaCha8Rng, dims: &[usize], act: &str) -> FeedforwardNet {
    let layers = dims
        .windows(2)
        .map(|w| {
            let weights = (0..w[1]).map(|_| (0..w[0]).map(|_| rng.gen_range(-0.3..0.3)).collect()).collect();
            let bias = (0..w[1]).map(|_| rng.gen_range(-0.1..0.1)).collect();
            AffineLayer::new(weights, bias).unwrap()
        })
        .collect();
    FeedforwardNet::new(layers, ActivationInfo::by_name(act).unwrap()).unwrap()
}

/// Active-set simplex projection: drop negative coordinates until none remain.
fn simplex_active_set(y: &[f64]) -> Vec<f64> {
    let mut support = vec![true; y.len()];
    loop {
        let p = simplex_from_support(y, &support);
        let mut changed = false;
        for (s, v) in support.iter_mut().zip(&p) {
            if *s && *v < 0.0 {
                *s = false;
                changed = true;
            }
        }
        if !changed {
            return p.iter().map(|v| v.max(0.0)).collect();
        }
    }
}

#[test]
fn softmax_forward_is_interior_and_invertible() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for c in 2..6 {
        for _ in 0..1000 {
            let x: Vec<f64> = (0..c - 1).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let y = softmax_chart(Direction::Encode, &x).unwrap();
            assert!(y.iter().all(|v| *v > 0.0));
            assert!((y.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            let back = softmax_chart(Direction::Decode, &y).unwrap();
            assert!(dist(&back, &x) <= 1e-10, "{x:?} {back:?}");
            let x2: Vec<f64> = (0..c - 1).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let y2 = softmax_chart(Direction::Encode, &x2).unwrap();
            assert!(dist(&y, &y2) <= dist(&x, &x2) + 1e-12);
        }
    }
}

#[test]
fn gauge_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for g in [Gauge::Euclidean, Gauge::Sup, Gauge::L1] {
        for _ in 0..1000 {
            let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-20.0..20.0)).collect();
            let f = gauge_chart(&g, Direction::Encode, &v).unwrap();
            assert!(g.eval(&f) < 1.0);
            let back = gauge_chart(&g, Direction::Decode, &f).unwrap();
            assert!(dist(&back, &v) <= 1e-10 * (1.0 + g.eval(&v)).powi(2), "{v:?} {back:?}");
        }
    }
}

#[test]
fn projections_idempotent_and_nonexpansive() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let shapes = [
        ConvexShape::Box { lo: vec![-1.0, 0.0, 0.5], hi: vec![1.0, 0.0, 2.0] },
        ConvexShape::Ball { center: vec![0.5, -0.5, 1.0], radius: 1.5 },
        ConvexShape::Simplex { c: 3 },
    ];
    for shape in &shapes {
        for _ in 0..1000 {
            let a: Vec<f64> = (0..3).map(|_| rng.gen_range(-4.0..4.0)).collect();
            let b: Vec<f64> = (0..3).map(|_| rng.gen_range(-4.0..4.0)).collect();
            let (pa, pb) = (project_convex(shape, &a).unwrap(), project_convex(shape, &b).unwrap());
            assert!(dist(&pa, &pb) <= dist(&a, &b) + 1e-12);
            let ppa = project_convex(shape, &pa).unwrap();
            assert!(dist(&ppa, &pa) <= 1e-12);
        }
    }
}

#[test]
fn simplex_projection_matches_active_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for c in 1..8 {
        let shape = ConvexShape::Simplex { c };
        for _ in 0..500 {
            let y: Vec<f64> = (0..c).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let p = project_convex(&shape, &y).unwrap();
            let want = simplex_active_set(&y);
            assert!(dist(&p, &want) <= 1e-12, "{y:?} {p:?} {want:?}");
        }
    }
}

#[test]
fn homotopy_distance_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    for _ in 0..1000 {
        let t: f64 = rng.gen();
        let raw: Vec<f64> = (0..4).map(|_| rng.gen::<f64>()).collect();
        let s: f64 = raw.iter().sum();
        let y: Vec<f64> = raw.iter().map(|v| v / s).collect();
        let h = homotopy_shrink(&HomotopyShape::Simplex { c: 4 }, t, &y).unwrap();
        let bar = vec![0.25; 4];
        assert!((dist(&h, &y) - (1.0 - t) * dist(&y, &bar)).abs() <= 1e-12);
        if t < 1.0 {
            assert!(h.iter().all(|v| *v > 0.0));
        }
        let star = HomotopyShape::Star { anchor: vec![1.0; 4] };
        assert_eq!(homotopy_shrink(&star, 0.0, &y).unwrap(), vec![1.0; 4]);
    }
}

#[test]
fn zero_core_is_constant_on_domain_ball() {
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    for id in ["euclidean:3", "sphere:2", "poincare:2:1", "spd:2", "gaussian:1", "torus:2", "rp:2"] {
        let x = resolve_manifold(id).unwrap();
        let y = resolve_manifold("sphere:2").unwrap();
        let bx = random_point(&x, &mut rng);
        let by = vec![0.0, 1.0, 0.0];
        let core = FeedforwardNet::constant(x.chart_dim, vec![0.0; 3], ActivationInfo::relu());
        let m = GdnModel::new(x.clone(), y, bx.clone(), by.clone(), core).unwrap();
        let r = x.inj_lower(&bx).to_f64().min(2.0);
        for _ in 0..100 {
            let v = random_tangent(&x, &bx, 0.99 * r, &mut rng).unwrap();
            let p = exp_map(&x, &bx, &v).unwrap();
            assert_eq!(m.eval(&p).unwrap(), by, "{id}");
        }
    }
}

#[test]
fn parallel_error_is_max_of_branch_errors() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let e = resolve_manifold("euclidean:2").unwrap();
    let s = resolve_manifold("sphere:2").unwrap();
    let p = resolve_manifold("poincare:2:1").unwrap();
    let branches = vec![
        GdnModel::new(e.clone(), e.clone(), vec![0.0; 2], vec![1.0, 1.0], random_net(&mut rng, &[2, 4, 2], "tanh")).unwrap(),
        GdnModel::new(e.clone(), s.clone(), vec![0.0; 2], vec![0.0, 0.0, 1.0], random_net(&mut rng, &[2, 4, 3], "relu")).unwrap(),
        GdnModel::new(e.clone(), p.clone(), vec![0.0; 2], vec![0.1, 0.0], random_net(&mut rng, &[2, 3, 2], "softplus")).unwrap(),
    ];
    let prod = ProductSpace::new(vec![Component::Manifold(e), Component::Manifold(s.clone()), Component::Manifold(p.clone())]).unwrap();
    let par = parallelize(branches.clone()).unwrap();
    for _ in 0..200 {
        let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let PipelineOutput::Tuple(outs) = pipeline_eval(&par, &x).unwrap() else { panic!() };
        for (o, b) in outs.iter().zip(&branches) {
            assert_eq!(o, &b.eval(&x).unwrap());
        }
        let targets = vec![
            vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
            random_point(&s, &mut rng),
            random_point(&p, &mut rng),
        ];
        let errs = [
            distance(&branches[0].codomain, &outs[0], &targets[0]).unwrap(),
            distance(&s, &outs[1], &targets[1]).unwrap(),
            distance(&p, &outs[2], &targets[2]).unwrap(),
        ];
        let want = errs.iter().copied().fold(0.0, f64::max);
        assert_eq!(product_distance(&prod, &outs, &targets).unwrap(), want);
    }
}

#[test]
fn bare_pipeline_is_bitwise_gdn() {
    let mut rng = ChaCha8Rng::seed_from_u64(38);
    let s = resolve_manifold("sphere:2").unwrap();
    let spd = resolve_manifold("spd:2").unwrap();
    let g = GdnModel::new(s.clone(), spd, vec![0.0, 0.0, 1.0], vec![2.0, 0.1, 1.0], random_net(&mut rng, &[3, 5, 3], "sigmoid")).unwrap();
    let p = PipelineModel::single(g.clone());
    for _ in 0..500 {
        let v = random_tangent(&s, &[0.0, 0.0, 1.0], 3.0, &mut rng).unwrap();
        let x = exp_map(&s, &[0.0, 0.0, 1.0], &v).unwrap();
        assert_eq!(p.eval(&x).unwrap(), PipelineOutput::Single(g.eval(&x).unwrap()));
    }
}

proptest! {
    #[test]
    fn net_json_round_trip(seed in 0u64..1000, hidden in 1usize..6, act in 0usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let name = gdn_nn::ACTIVATION_NAMES[act];
        let net = random_net(&mut rng, &[2, hidden, 3], name);
        let back = FeedforwardNet::from_json(&net.to_json()).unwrap();
        prop_assert_eq!(&back, &net);
        let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        prop_assert_eq!(back.eval(&x).unwrap(), net.eval(&x).unwrap());
    }

    #[test]
    fn param_count_formula(dims in proptest::collection::vec(1usize..7, 2..5)) {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let net = random_net(&mut rng, &dims, "relu");
        let want: usize = dims.windows(2).map(|w| w[1] * (w[0] + 1)).sum();
        prop_assert_eq!(net.param_count(), want);
    }
}
