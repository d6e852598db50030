mod common;

use common::HalfSpaces;
use num::{BigInt, Signed};
use proptest::prelude::*;

use kstab::exact;
use kstab::flag::graded_piece;
use kstab::intersection;
use kstab::io::is_exact_rational_string;
use kstab::lattice::library;
use kstab::report::{self, Configuration, Pipeline};
use kstab::weight::{self, FitOptions};
use kstab::{FlagIdeal, Mode, MonomialIdeal, PolarizedToricVariety, RawFlagIdeal};

/// Point-supported chain on `n` variables: pure powers plus optional mixed
/// generators, then each level divides every generator by one variable.
fn chain(n: usize, max: u32) -> impl Strategy<Value = Vec<Vec<Vec<u32>>>> {
    (
        prop::collection::vec(1..=max, n),
        prop::collection::vec(prop::collection::vec(0..max, n), 0..=2),
        1..=2usize,
    )
        .prop_map(move |(pure, mixed, levels)| {
            let mut gens: Vec<Vec<u32>> = (0..n)
                .map(|i| {
                    let mut e = vec![0; n];
                    e[i] = pure[i];
                    e
                })
                .collect();
            gens.extend(mixed);
            let mut out = vec![gens.clone()];
            for _ in 1..levels {
                for g in gens.iter_mut() {
                    if let Some(i) = (0..n).find(|&i| g[i] > 0) {
                        g[i] -= 1;
                    }
                }
                out.push(gens.clone());
            }
            out
        })
}

fn variety(n: usize, d: i64) -> PolarizedToricVariety {
    library::projective_space(n, d).unwrap()
}

fn flag(v: &PolarizedToricVariety, ideals: &[Vec<Vec<u32>>]) -> FlagIdeal {
    let n = v.dim();
    let raw = RawFlagIdeal::new(Mode::Chart, ideals.iter().map(|g| MonomialIdeal::from_exponents(n, g)).collect());
    FlagIdeal::validate(raw, v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ehrhart_counts_match_closed_forms(n in 1usize..=3, d in 1i64..=3, k in 0u64..=4) {
        // #(kd·Δₙ) = C(kd + n, n)
        let m = k as i64 * d;
        let expect = (1..=n as i64).fold(BigInt::from(1), |acc, i| acc * (m + i) / i);
        prop_assert_eq!(BigInt::from(variety(n, d).ehrhart_count(k)), expect);
    }

    #[test]
    fn box_counts_are_products(a in 1i64..=3, b in 1i64..=3, k in 0u64..=4) {
        let v = library::product_of_lines(&[a, b]).unwrap();
        let k = k as i64;
        prop_assert_eq!(v.ehrhart_count(k as u64) as i64, (k * a + 1) * (k * b + 1));
        prop_assert_eq!(HalfSpaces::boxed(&[a, b]).points(k).len() as i64, (k * a + 1) * (k * b + 1));
    }

    #[test]
    fn graded_pieces_increase_with_t(ideals in chain(2, 3), k in 1usize..=3) {
        let v = variety(2, 3);
        let f = flag(&v, &ideals);
        for j in 0..k * f.levels() {
            prop_assert!(graded_piece(&f, k, j + 1).contains_ideal(&graded_piece(&f, k, j)));
        }
    }

    #[test]
    fn weights_are_bounded_by_levels(ideals in chain(2, 2), r in 1u32..=2) {
        let v = variety(2, 2);
        let f = flag(&v, &ideals);
        let ws = weight::weight_sequence(&v, &f, r, (1, 4)).unwrap();
        let hs = weight::hilbert_sequence(&v, r, (1, 4));
        for (k, (w, h)) in ws.iter().zip(&hs).enumerate() {
            let k = k as i64 + 1;
            prop_assert!(!w.is_positive());
            prop_assert!(-w <= h * BigInt::from(k * f.levels() as i64));
        }
    }

    #[test]
    fn t_powers_leave_df_unchanged(ideals in chain(1, 3), d in 1i64..=3, c in 1usize..=3) {
        let v = variety(1, d);
        let r = 3;
        let n = v.dim();
        let raw = RawFlagIdeal::new(Mode::Chart, ideals.iter().map(|g| MonomialIdeal::from_exponents(n, g)).collect());
        let base = FlagIdeal::validate(raw.clone(), &v).unwrap();
        let shifted = FlagIdeal::validate(raw.times_t_power(c), &v).unwrap();
        let opts = FitOptions::default();
        let a = weight::df_counting(&v, &base, r, &opts).unwrap().df;
        let b = weight::df_counting(&v, &shifted, r, &opts).unwrap().df;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn pipelines_agree_or_normalization_lowers(ideals in chain(2, 2)) {
        let v = variety(2, 2);
        let f = flag(&v, &ideals);
        let rep = match report::compute(&v, &f, 2, Pipeline::Both, &FitOptions::default()) {
            Ok(rep) => rep,
            Err(kstab::Error::NotStabilized(_)) | Err(kstab::Error::ExponentTooSmall { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let (a, b) = (rep.df_counting.clone().unwrap(), rep.df_intersection.clone().unwrap());
        if intersection::is_normal(&f).unwrap() {
            prop_assert_eq!(rep.configuration, Configuration::AsGiven);
            prop_assert_eq!(a, b);
        } else {
            prop_assert_eq!(rep.configuration, Configuration::Normalized);
            prop_assert!(b <= a);
        }
        prop_assert!(!rep.decomposition.unwrap().t3.is_negative());
        prop_assert!(rep.checks.all_pass());
    }

    #[test]
    fn rationals_print_in_the_exact_grammar(p in -10_000i64..10_000, q in 1i64..500) {
        let s = exact::to_string(&exact::frac(p, q));
        prop_assert!(is_exact_rational_string(&s), "{}", s);
        prop_assert_eq!(exact::parse(&s), Some(exact::frac(p, q)));
    }
}
