mod common;

use common::*;
use kstab::lattice::library;
use kstab::weight::{self, FitOptions};
use kstab::{FlagIdeal, Mode, MonomialIdeal, PolarizedToricVariety, RawFlagIdeal};

type ChartCase = (PolarizedToricVariety, HalfSpaces, Vec<Vec<Vec<u32>>>, u32);

fn chart_flag(v: &PolarizedToricVariety, ideals: &[Vec<Vec<u32>>]) -> FlagIdeal {
    let n = v.dim();
    let raw = RawFlagIdeal::new(Mode::Chart, ideals.iter().map(|g| MonomialIdeal::from_exponents(n, g)).collect());
    FlagIdeal::validate(raw, v).unwrap()
}

fn check_weights(v: &PolarizedToricVariety, p: &HalfSpaces, ideals: &[Vec<Vec<u32>>], r: u32) {
    let flag = chart_flag(v, ideals);
    let gens = flag_generators(p.dim(), ideals);
    let ours = weight::weight_sequence(v, &flag, r, (1, 5)).unwrap();
    for (i, w) in ours.iter().enumerate() {
        let (ow, _) = sample(p, &gens, r as i64, i as u32 + 1, &identity_coords);
        assert_eq!(*w, ow, "W({}) for {ideals:?}", i + 1);
    }
}

#[test]
fn weight_samples_match_expansion() {
    let cases: Vec<ChartCase> = vec![
        (library::projective_space(1, 1).unwrap(), HalfSpaces::simplex(1, 1), vec![vec![vec![1]]], 1),
        (library::projective_space(1, 2).unwrap(), HalfSpaces::simplex(1, 2), vec![vec![vec![2]]], 1),
        (library::projective_space(1, 3).unwrap(), HalfSpaces::simplex(1, 3), vec![vec![vec![3]], vec![vec![1]]], 1),
        (library::projective_space(1, 1).unwrap(), HalfSpaces::simplex(1, 1), vec![vec![vec![2]]], 1),
        (
            library::projective_space(2, 2).unwrap(),
            HalfSpaces::simplex(2, 2),
            vec![vec![vec![2, 0], vec![1, 1], vec![0, 2]]],
            1,
        ),
        (library::projective_space(2, 1).unwrap(), HalfSpaces::simplex(2, 1), vec![vec![vec![2, 0], vec![0, 2]]], 2),
        (
            library::product_of_lines(&[1, 1]).unwrap(),
            HalfSpaces::boxed(&[1, 1]),
            vec![vec![vec![1, 0], vec![0, 1]]],
            1,
        ),
        (
            library::product_of_lines(&[2, 1]).unwrap(),
            HalfSpaces::boxed(&[2, 1]),
            vec![vec![vec![2, 0], vec![0, 1]], vec![vec![1, 0], vec![0, 1]]],
            1,
        ),
    ];
    for (v, p, ideals, r) in cases {
        check_weights(&v, &p, &ideals, r);
    }
}

#[test]
fn hilbert_counts_match_half_spaces() {
    let cases = [
        (library::projective_space(2, 2).unwrap(), HalfSpaces::simplex(2, 2)),
        (library::projective_space(3, 1).unwrap(), HalfSpaces::simplex(3, 1)),
        (library::product_of_lines(&[2, 3]).unwrap(), HalfSpaces::boxed(&[2, 3])),
        (library::hirzebruch_one_anticanonical().unwrap(), HalfSpaces::f1_anticanonical()),
    ];
    for (v, p) in cases {
        for k in 0..6 {
            assert_eq!(v.ehrhart_count(k), p.points(k as i64).len() as u64);
        }
    }
}

#[test]
fn counting_df_matches_oracle_fit() {
    let cases: Vec<ChartCase> = vec![
        (library::projective_space(1, 3).unwrap(), HalfSpaces::simplex(1, 3), vec![vec![vec![3]], vec![vec![1]]], 1),
        (library::projective_space(2, 1).unwrap(), HalfSpaces::simplex(2, 1), vec![vec![vec![1, 0], vec![0, 1]]], 1),
        (
            library::product_of_lines(&[1, 1]).unwrap(),
            HalfSpaces::boxed(&[1, 1]),
            vec![vec![vec![1, 0], vec![0, 1]]],
            2,
        ),
    ];
    for (v, p, ideals, r) in cases {
        let flag = chart_flag(&v, &ideals);
        let ours = weight::df_counting(&v, &flag, r, &FitOptions::default()).unwrap();
        let gens = flag_generators(p.dim(), &ideals);
        let oracle = oracle_fit(&p, &gens, r as i64, 2, 2, &identity_coords);
        assert_eq!(kstab::exact::to_string(&ours.df), qs(&oracle.df), "{ideals:?} at r = {r}");
    }
}

#[test]
fn cox_divisor_weights_match_expansion() {
    // (X0) + (t) on F₁: X0 is the (−1)-curve, the first inequality
    let v = library::hirzebruch_one_anticanonical().unwrap();
    let p = HalfSpaces::f1_anticanonical();
    let raw = RawFlagIdeal::new(Mode::Cox, vec![MonomialIdeal::from_exponents(4, &[vec![1, 0, 0, 0]])]);
    let flag = FlagIdeal::validate(raw, &v).unwrap();
    let gens = flag_generators(4, &[vec![vec![1, 0, 0, 0]]]);
    for r in [1u32, 2] {
        let ours = weight::weight_sequence(&v, &flag, r, (1, 5)).unwrap();
        for (i, w) in ours.iter().enumerate() {
            let (ow, _) = sample(&p, &gens, r as i64, i as u32 + 1, &|u, s| p.distances(u, s));
            assert_eq!(*w, ow, "W({}) at r = {r}", i + 1);
        }
    }
}
