use nalgebra::Matrix3;
use num_rational::Ratio;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use simplexk::catalog::GroupId;
use simplexk::coxeter::{
    classify_subdiagram, identify_group, realize_vertex_group, truncated_domain_inventory, Label, SubdiagramType,
};
use simplexk::CoxeterDiagram;

const EPS: f64 = 1e-9;

fn triangle(p: u32, q: u32, r: u32) -> CoxeterDiagram {
    let f = Label::Finite;
    CoxeterDiagram::from_matrix(vec![vec![f(1), f(p), f(q)], vec![f(p), f(1), f(r)], vec![f(q), f(r), f(1)]]).unwrap()
}

fn simplex(l: [Label; 6]) -> CoxeterDiagram {
    let one = Label::Finite(1);
    CoxeterDiagram::from_matrix(vec![
        vec![one, l[0], l[1], l[2]],
        vec![l[0], one, l[3], l[4]],
        vec![l[1], l[3], one, l[5]],
        vec![l[2], l[4], l[5], one],
    ])
    .unwrap()
}

/// `1/p + 1/q + 1/r` as an exact rational.
fn angle_sum(p: u32, q: u32, r: u32) -> Ratio<u64> {
    [p, q, r].iter().map(|&x| Ratio::new(1, u64::from(x))).sum()
}

fn labels_2_to_6() -> impl Iterator<Item = (u32, u32, u32)> {
    (2..=6).flat_map(|p| (2..=6).flat_map(move |q| (2..=6).map(move |r| (p, q, r))))
}

#[test]
fn finite_triangle_orders_match_formula() {
    let mut finite = 0;
    for (p, q, r) in labels_2_to_6() {
        let s = angle_sum(p, q, r);
        let d = triangle(p, q, r);
        let t = classify_subdiagram(&d, &[0, 1, 2]).unwrap();
        if s > Ratio::from_integer(1) {
            finite += 1;
            let expected = Ratio::from_integer(4) / (s - Ratio::from_integer(1));
            assert!(expected.is_integer());
            let g = realize_vertex_group(&d, &[0, 1, 2]).unwrap();
            assert_eq!(g.order() as u64, expected.to_integer(), "({p},{q},{r})");
            assert!(matches!(t, SubdiagramType::Finite { order: Some(o), .. } if o == expected.to_integer()));
        } else {
            assert!(!t.is_finite(), "({p},{q},{r})");
        }
        assert_eq!(t.is_affine(), s == Ratio::from_integer(1), "({p},{q},{r})");
    }
    // (2,2,n) for n in 2..=6 in three positions, plus (2,3,3), (2,3,4), (2,3,5) in six orders.
    assert_eq!(finite, 5 * 3 - 2 + 3 * 6 - 3);
}

#[test]
fn affine_recognition_names_wallpaper_groups() {
    let named = [((2, 4, 4), GroupId::P4m), ((2, 3, 6), GroupId::P6m), ((3, 3, 3), GroupId::P3m1)];
    for ((p, q, r), id) in named {
        assert_eq!(
            classify_subdiagram(&triangle(p, q, r), &[0, 1, 2]).unwrap(),
            SubdiagramType::Affine { id }
        );
    }
}

fn matrix_order(m: &Matrix3<f64>, cap: u32) -> Option<u32> {
    let mut x = *m;
    for k in 1..=cap {
        if (x - Matrix3::identity()).abs().max() < EPS {
            return Some(k);
        }
        x *= m;
    }
    None
}

#[test]
fn realized_generators_satisfy_the_relations_exactly() {
    for (p, q, r) in labels_2_to_6().filter(|&(p, q, r)| angle_sum(p, q, r) > Ratio::from_integer(1)) {
        let g = realize_vertex_group(&triangle(p, q, r), &[0, 1, 2]).unwrap();
        let gens = g.generators();
        for a in gens {
            assert_eq!(matrix_order(a, 2), Some(2));
        }
        for (i, j, m) in [(0, 1, p), (0, 2, q), (1, 2, r)] {
            assert_eq!(matrix_order(&(gens[i] * gens[j]), 12), Some(m), "({p},{q},{r}) pair {i}{j}");
        }
        assert!(g.orthogonality_defect() < EPS);
    }
}

fn random_orthogonal(seed: u64) -> Matrix3<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = Matrix3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    let q = m.qr().q();
    if q.determinant() < 0.0 {
        -q
    } else {
        q
    }
}

fn label() -> impl Strategy<Value = Label> {
    prop_oneof![(2u32..=6).prop_map(Label::Finite), Just(Label::Infinity)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn identification_survives_conjugation(
        (p, q, r) in prop::sample::select(labels_2_to_6().filter(|&(p, q, r)| angle_sum(p, q, r) > Ratio::from_integer(1)).collect::<Vec<_>>()),
        seed in any::<u64>(),
    ) {
        let g = realize_vertex_group(&triangle(p, q, r), &[0, 1, 2]).unwrap();
        let h = g.conjugate(&random_orthogonal(seed)).unwrap();
        prop_assert_eq!(h.order(), g.order());
        prop_assert_eq!(identify_group(&h), identify_group(&g));
    }

    #[test]
    fn finite_subdiagrams_have_finite_subsets(l in prop::array::uniform6(label())) {
        let d = simplex(l);
        for mask in 1u32..16 {
            let s: Vec<usize> = (0..4).filter(|i| mask >> i & 1 == 1).collect();
            if !classify_subdiagram(&d, &s).unwrap().is_finite() {
                continue;
            }
            for sub in 1u32..16 {
                if sub & !mask == 0 {
                    let t: Vec<usize> = (0..4).filter(|i| sub >> i & 1 == 1).collect();
                    prop_assert!(classify_subdiagram(&d, &t).unwrap().is_finite(), "{:?} finite but {:?} not", s, t);
                }
            }
        }
    }
}

#[test]
fn truncated_domains_are_balls() {
    let mut seen = 0;
    let mut one_ideal = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(344);
    for _ in 0..4000 {
        let l: [Label; 6] = std::array::from_fn(|_| Label::Finite(rng.gen_range(2..=6)));
        let Ok(inv) = truncated_domain_inventory(&simplex(l)) else {
            continue;
        };
        seen += 1;
        let counts = inv.counts();
        let chi: i64 = counts.iter().enumerate().map(|(p, &n)| if p % 2 == 0 { n as i64 } else { -(n as i64) }).sum();
        assert_eq!(chi, 1, "{l:?}: {counts:?}");
        if counts[0] == 6 {
            one_ideal += 1;
            assert_eq!(counts, [6, 9, 5, 1], "{l:?}");
        }
        let c = inv.chain_complex().expect("oriented boundaries");
        let h = simplexk::intlinalg::homology(&c).unwrap();
        assert_eq!(h[0], simplexk::AbGroup::free(1));
        assert!(h[1..].iter().all(simplexk::AbGroup::is_zero), "{l:?}");
    }
    assert!(seen > 0 && one_ideal > 0, "sampled {seen} simplices, {one_ideal} with one ideal vertex");
}
