mod common;

use common::*;
use phasegraph::graph_projection::{project_tv, BranchKind, GraphProjector, TvOperator};
use phasegraph::model::{FieldKind, SamplingEnsemble};
use phasegraph::CVec;
use proptest::prelude::*;

fn ensemble(n: usize, m: usize, complex: bool, seed: u64) -> SamplingEnsemble {
    let field = field_of(complex);
    SamplingEnsemble::dense(random_cmat(n, m, field, seed), field).unwrap()
}

fn inputs(n: usize, m: usize, complex: bool, seed: u64) -> (CVec, CVec) {
    let field = field_of(complex);
    (
        random_cvec(n, field, seed ^ 0xa5a5),
        random_cvec(m, field, seed ^ 0x5a5a),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_solves_the_kkt_system(n in 1usize..=8, m in 1usize..=20, complex: bool, seed: u64) {
        let ens = ensemble(n, m, complex, seed);
        let (c, d) = inputs(n, m, complex, seed);
        let p = GraphProjector::build(&ens).unwrap();
        let (x, y) = p.project(&c, &d).unwrap();
        let (xo, yo) = kkt_projection(ens.dense_matrix().unwrap(), &c, &d);
        prop_assert!(max_abs_diff(&x, &xo) < 1e-9);
        prop_assert!(max_abs_diff(&y, &yo) < 1e-9);
    }

    #[test]
    fn projection_lands_on_the_graph_and_is_idempotent(n in 1usize..=8, m in 1usize..=20, complex: bool, seed: u64) {
        let ens = ensemble(n, m, complex, seed);
        let (c, d) = inputs(n, m, complex, seed);
        let p = GraphProjector::build(&ens).unwrap();
        let (x, y) = p.project(&c, &d).unwrap();
        prop_assert!(max_abs_diff(&ens.forward(&x), &y) < 1e-10);
        let (x2, y2) = p.project(&x, &y).unwrap();
        prop_assert!(max_abs_diff(&x, &x2) < 1e-10);
        prop_assert!(max_abs_diff(&y, &y2) < 1e-10);
    }

    #[test]
    fn residual_is_normal_to_the_graph(n in 1usize..=8, m in 1usize..=20, complex: bool, seed: u64) {
        // (c - x, d - y) is orthogonal to every (u, A* u), i.e. (c - x) + A (d - y) = 0
        let ens = ensemble(n, m, complex, seed);
        let (c, d) = inputs(n, m, complex, seed);
        let (x, y) = GraphProjector::build(&ens).unwrap().project(&c, &d).unwrap();
        let normal = (&c - &x) + ens.backward(&(&d - &y));
        prop_assert!(normal.norm() < 1e-9 * (1.0 + c.norm() + d.norm()));
    }

    #[test]
    fn relaxed_projection_is_a_convex_combination(n in 1usize..=8, m in 1usize..=20, complex: bool, seed: u64, t in 0.0f64..1.0) {
        let ens = ensemble(n, m, complex, seed);
        let (c, d) = inputs(n, m, complex, seed);
        let p = GraphProjector::build(&ens).unwrap();
        let (x, y) = p.project(&c, &d).unwrap();
        let (xr, yr) = p.project_relaxed(t, &c, &d).unwrap();
        let ex = &c * phasegraph::Complex64::from(t) + &x * phasegraph::Complex64::from(1.0 - t);
        let ey = &d * phasegraph::Complex64::from(t) + &y * phasegraph::Complex64::from(1.0 - t);
        prop_assert!(max_abs_diff(&xr, &ex) < 1e-12);
        prop_assert!(max_abs_diff(&yr, &ey) < 1e-12);
        let (x0, y0) = p.project_relaxed(0.0, &c, &d).unwrap();
        prop_assert_eq!(x0, x);
        prop_assert_eq!(y0, y);
    }

    #[test]
    fn tall_and_wide_branches_agree(n in 1usize..=6, m in 1usize..=6, seed: u64) {
        let ens = ensemble(n, m, true, seed);
        let (c, d) = inputs(n, m, true, seed);
        let natural = GraphProjector::build(&ens).unwrap().project(&c, &d).unwrap();
        for kind in [BranchKind::Tall, BranchKind::Wide] {
            if let Ok(p) = GraphProjector::with_branch(&ens, kind) {
                let (x, y) = p.project(&c, &d).unwrap();
                prop_assert!(max_abs_diff(&x, &natural.0) < 1e-9);
                prop_assert!(max_abs_diff(&y, &natural.1) < 1e-9);
            }
        }
    }
}

#[test]
fn fourier_fast_path_matches_the_dense_kkt_solve() {
    for (h, w, pad, scale) in [(2, 3, 2, 1.0), (3, 3, 2, 0.25), (4, 2, 1, 1.0)] {
        let ens = SamplingEnsemble::scaled_fourier(h, w, pad, scale).unwrap();
        let dense = ens.to_dense();
        let c = random_cvec(ens.n(), FieldKind::Complex, 3);
        let d = random_cvec(ens.m(), FieldKind::Complex, 4);
        let p = GraphProjector::build(&ens).unwrap();
        assert_eq!(p.branch(), BranchKind::Isometric);
        let (x, y) = p.project(&c, &d).unwrap();
        let (xo, yo) = kkt_projection(&dense, &c, &d);
        assert!(max_abs_diff(&x, &xo) < 1e-10);
        assert!(max_abs_diff(&y, &yo) < 1e-10);
    }
}

#[test]
fn three_block_projection_satisfies_its_optimality_condition() {
    // minimiser of |x - c|^2 + |y1 - d1|^2 + |y2 - d2|^2 on y1 = A* x, y2 = D x:
    // (x - c) + A (y1 - d1) + D* (y2 - d2) = 0
    let ens = SamplingEnsemble::scaled_fourier(3, 4, 2, 0.5).unwrap();
    let f = ens.fourier().unwrap();
    let d = TvOperator::new(f.grid_height(), f.grid_width()).unwrap();
    let c = random_cvec(ens.n(), FieldKind::Complex, 10);
    let d1 = random_cvec(ens.m(), FieldKind::Complex, 11);
    let d2 = random_cvec(d.output_len(), FieldKind::Complex, 12);
    let p = project_tv(&ens, Some(&d), &c, &d1, &d2, 1e-12, 1000).unwrap();
    assert!(max_abs_diff(&ens.forward(&p.x), &p.y1) < 1e-10);
    assert!(max_abs_diff(&d.apply(&p.x), &p.y2) < 1e-10);
    let grad = (&p.x - &c) + ens.backward(&(&p.y1 - &d1)) + d.adjoint(&(&p.y2 - &d2));
    assert!(grad.norm() < 1e-8 * c.norm());
    // without the TV block it reduces to the two-block graph projection
    let two = project_tv(&ens, None, &c, &d1, &d2, 1e-12, 1000).unwrap();
    let (x, y) = GraphProjector::build(&ens).unwrap().project(&c, &d1).unwrap();
    assert!(max_abs_diff(&two.x, &x) < 1e-12);
    assert!(max_abs_diff(&two.y1, &y) < 1e-12);
}

#[test]
fn tv_adjoint_matches_inner_products() {
    let d = TvOperator::new(4, 5).unwrap();
    let x = random_cvec(d.input_len(), FieldKind::Complex, 1);
    let z = random_cvec(d.output_len(), FieldKind::Complex, 2);
    let lhs = d.apply(&x).dotc(&z);
    let rhs = x.dotc(&d.adjoint(&z));
    assert!((lhs - rhs).norm() < 1e-12);
}
