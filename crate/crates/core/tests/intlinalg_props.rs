mod common;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use common::*;
use simplexk::intlinalg::{homology, smith_normal_form, validate_complex};
use simplexk::{AbGroup, ChainComplexZ, IntMatrix};

fn complex(ranks: &[usize], ds: &[Vec<Vec<i64>>]) -> ChainComplexZ {
    let mats = ds
        .iter()
        .enumerate()
        .map(|(k, d)| int_matrix(ranks[k], ranks[k + 1], d))
        .collect();
    ChainComplexZ::new(ranks.to_vec(), mats)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn snf_reconstructs_with_unimodular_transforms((r, c, m) in small_matrix(6, -9, 9)) {
        let a = int_matrix(r, c, &m);
        let s = smith_normal_form(&a);
        let uad = s.u.checked_mul(&a).unwrap().checked_mul(&s.v).unwrap();
        prop_assert_eq!(&uad, &s.d);
        prop_assert_eq!(s.u.determinant().unwrap().abs(), BigInt::one());
        prop_assert_eq!(s.v.determinant().unwrap().abs(), BigInt::one());
        for i in 0..r {
            for j in 0..c {
                if i != j {
                    prop_assert!(s.d.get(i, j).is_zero());
                }
            }
        }
    }

    #[test]
    fn snf_diagonal_is_a_divisor_chain((r, c, m) in small_matrix(6, -9, 9)) {
        let diag = smith_normal_form(&int_matrix(r, c, &m)).diagonal();
        prop_assert!(diag.iter().all(|x| !x.is_negative()));
        let rank = diag.iter().take_while(|x| !x.is_zero()).count();
        prop_assert!(diag[rank..].iter().all(Zero::is_zero));
        for w in diag[..rank].windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero(), "{} does not divide {}", w[0], w[1]);
        }
    }

    #[test]
    fn snf_matches_minor_gcds((r, c, m) in small_matrix(4, -9, 9)) {
        let diag = smith_normal_form(&int_matrix(r, c, &m)).diagonal();
        let nonzero: Vec<BigInt> = diag.into_iter().filter(|x| !x.is_zero()).collect();
        prop_assert_eq!(nonzero, minor_gcd_diagonal(&to_rows(&m), c));
    }

    #[test]
    fn cokernel_matches_oracle((r, c, m) in small_matrix(3, -3, 3)) {
        let diag = smith_normal_form(&int_matrix(r, c, &m)).diagonal();
        let g = AbGroup::from_diagonal(&diag, r).unwrap();
        let (free, torsion) = cokernel_oracle(&to_rows(&m), r, c);
        prop_assert_eq!(g.free_rank(), free);
        prop_assert_eq!(g.invariant_factors(), torsion.as_slice());
    }

    #[test]
    fn generated_complexes_are_valid((ranks, ds) in three_term_complex()) {
        prop_assert!(validate_complex(&complex(&ranks, &ds)).is_ok());
    }

    #[test]
    fn homology_matches_oracle((ranks, ds) in three_term_complex()) {
        let h = homology(&complex(&ranks, &ds)).unwrap();
        let rows: Vec<Vec<Vec<BigInt>>> = ds.iter().map(|d| to_rows(d)).collect();
        let oracle = homology_oracle(&ranks, &rows);
        for (p, (g, (free, torsion))) in h.iter().zip(&oracle).enumerate() {
            prop_assert_eq!(g.free_rank(), *free, "H_{} free rank", p);
            prop_assert_eq!(g.invariant_factors(), torsion.as_slice(), "H_{} torsion", p);
        }
    }

    #[test]
    fn homology_rank_nullity((ranks, ds) in three_term_complex()) {
        let c = complex(&ranks, &ds);
        let h = homology(&c).unwrap();
        let rank = |p: usize| if p == 0 || p >= ranks.len() { 0 } else { smith_normal_form(&c.differentials[p - 1]).rank() };
        for p in 0..ranks.len() {
            prop_assert_eq!(h[p].free_rank(), ranks[p] - rank(p) - rank(p + 1));
        }
    }

    #[test]
    fn euler_characteristic_is_homological((ranks, ds) in three_term_complex()) {
        let c = complex(&ranks, &ds);
        let h = homology(&c).unwrap();
        let chi: i64 = h
            .iter()
            .enumerate()
            .map(|(p, g)| if p % 2 == 0 { g.free_rank() as i64 } else { -(g.free_rank() as i64) })
            .sum();
        prop_assert_eq!(chi, c.euler_characteristic());
    }

    #[test]
    fn matrix_text_round_trip((r, c, m) in small_matrix(5, -50, 50)) {
        let mut text = format!("{r} {c}\n");
        for row in &m {
            text.push_str(&row.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "));
            text.push('\n');
        }
        prop_assert_eq!(IntMatrix::parse_text(&text).unwrap(), int_matrix(r, c, &m));
    }
}

#[test]
fn large_entries_do_not_overflow() {
    let big = BigInt::from(i64::MAX) * BigInt::from(3);
    let a = IntMatrix::new(2, 2, vec![big.clone(), BigInt::from(1), BigInt::from(0), big.clone()]).unwrap();
    let s = smith_normal_form(&a);
    assert_eq!(s.diagonal(), vec![BigInt::one(), &big * &big]);
}
