//! Invariants checked over random inputs on small grids.

use hodgelab::extrapolate::richardson;
use hodgelab::grid::TorusGrid;
use hodgelab::harness::config::parse_grid_spec;
use hodgelab::harness::Settings;
use hodgelab::hodge::hodge_decompose;
use hodgelab::io::{decode_hfrm, encode_hfrm};
use hodgelab::multi_index::{merge_indices, MultiIndex};
use hodgelab::random::{random_form, seeded_rng};
use proptest::prelude::*;

fn small_grid(dim: usize) -> TorusGrid {
    match dim {
        2 => TorusGrid::unit(&[16, 16]).unwrap(),
        _ => TorusGrid::unit(&[8, 8, 8]).unwrap(),
    }
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(32)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn d_squared_vanishes(seed in any::<u64>(), dim in 2usize..=3, degree in 0usize..=1) {
        prop_assume!(degree + 2 <= dim);
        let g = small_grid(dim);
        let w = random_form(&g, degree, 3, &mut seeded_rng(seed)).unwrap();
        let dd = w.exterior_derivative().unwrap().exterior_derivative().unwrap();
        prop_assert!(dd.max_abs() <= 1e-9 * w.max_abs().max(1.0));
    }

    #[test]
    fn star_star_sign(seed in any::<u64>(), dim in 2usize..=3, degree in 0usize..=3) {
        prop_assume!(degree <= dim);
        let g = small_grid(dim);
        let w = random_form(&g, degree, 3, &mut seeded_rng(seed)).unwrap();
        let sign = if degree * (dim - degree) % 2 == 0 { 1.0 } else { -1.0 };
        let back = w.hodge_star().hodge_star();
        prop_assert!(back.sub(&w.scale(sign)).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn wedge_graded_commutativity(seed in any::<u64>(), k in 0usize..=2, l in 0usize..=1) {
        let g = small_grid(3);
        let mut rng = seeded_rng(seed);
        let a = random_form(&g, k, 2, &mut rng).unwrap();
        let b = random_form(&g, l, 2, &mut rng).unwrap();
        let sign = if k * l % 2 == 0 { 1.0 } else { -1.0 };
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap().scale(sign);
        prop_assert!(ab.sub(&ba).unwrap().max_abs() <= 1e-12 * ab.max_abs().max(1.0));
    }

    #[test]
    fn hodge_parts_are_orthogonal(seed in any::<u64>(), dim in 2usize..=3, degree in 0usize..=2) {
        prop_assume!(degree <= dim);
        let g = small_grid(dim);
        let w = random_form(&g, degree, 3, &mut seeded_rng(seed)).unwrap();
        let parts = hodge_decompose(&w).unwrap();
        let scale = w.l2_norm().powi(2).max(1e-300);
        let pairs = [
            (&parts.exact, &parts.coexact),
            (&parts.exact, &parts.harmonic),
            (&parts.coexact, &parts.harmonic),
        ];
        for (a, b) in pairs {
            prop_assert!(a.l2_inner(b).unwrap().abs() / scale <= 1e-12);
        }
        let sum = parts.exact.add(&parts.coexact).unwrap().add(&parts.harmonic).unwrap();
        prop_assert!(sum.sub(&w).unwrap().max_abs() <= 1e-12 * w.max_abs().max(1.0));
    }

    #[test]
    fn richardson_is_exact_on_first_order_data(c in -10.0f64..10.0, d in 0.5f64..10.0) {
        let ns = [4usize, 8, 16];
        let values: Vec<f64> = ns.iter().map(|&n| c + d / n as f64).collect();
        let e = richardson(&ns, &values);
        prop_assert!((e.value - c).abs() <= 1e-10 * (1.0 + c.abs() + d));
        prop_assert!((e.order.unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn merge_sign_matches_permutation_parity(a in 0u32..32, b in 0u32..32) {
        let axes = |m: u32| (0..5).filter(|k| m >> k & 1 == 1).collect::<Vec<usize>>();
        let (i, j) = (MultiIndex::new(axes(a)).unwrap(), MultiIndex::new(axes(b)).unwrap());
        let (sign, merged) = merge_indices(&i, &j);
        if a & b != 0 {
            prop_assert_eq!(sign, 0);
            prop_assert!(merged.is_none());
        } else {
            let mut seq: Vec<usize> = i.axes().iter().chain(j.axes()).copied().collect();
            let mut swaps = 0;
            for x in 0..seq.len() {
                for y in 0..seq.len() - 1 - x {
                    if seq[y] > seq[y + 1] {
                        seq.swap(y, y + 1);
                        swaps += 1;
                    }
                }
            }
            prop_assert_eq!(sign, if swaps % 2 == 0 { 1 } else { -1 });
            let merged = merged.unwrap();
            prop_assert_eq!(merged.axes(), &seq[..]);
        }
    }

    #[test]
    fn grid_spec_roundtrip(sizes in prop::collection::vec(1usize..6, 1..=3)) {
        let dims: Vec<usize> = sizes.iter().map(|&e| 1usize << e).collect();
        let text = dims.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("x");
        prop_assert_eq!(parse_grid_spec(&text).unwrap(), dims);
    }

    #[test]
    fn ini_values_roundtrip(seed in any::<u64>(), x in -1e6f64..1e6) {
        let s = Settings::parse_ini(&format!("[run]\nseed = {seed}\n[family]\nscale = {x:e}\n")).unwrap();
        prop_assert_eq!(s.u64("run.seed").unwrap(), seed);
        prop_assert_eq!(s.f64("family.scale").unwrap(), x);
    }

    #[test]
    fn hfrm_roundtrip(seed in any::<u64>(), dim in 2usize..=3, degree in 0usize..=2) {
        let g = small_grid(dim);
        let w = random_form(&g, degree, 3, &mut seeded_rng(seed)).unwrap();
        let back = decode_hfrm(&encode_hfrm(&w)).unwrap();
        prop_assert_eq!(back.degree(), degree);
        prop_assert_eq!(back.grid(), &g);
        prop_assert_eq!(back.components(), w.components());
    }
}
