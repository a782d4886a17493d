//! Randomized invariants across modules.

use proptest::prelude::*;

use evasion_lab::algebra::{dot, kernel_basis, row_reduce, Field, Scalar};
use evasion_lab::diagram::{load_builtin_diagram, Verdict as DiagramVerdict};
use evasion_lab::gross::{luzin_to_gross, make_coherent_injections, InjectionStyle};
use evasion_lab::luzin::SigmaStarCache;
use evasion_lab::predict::{check_prediction, Predictor, SpaceSpec};
use evasion_lab::transforms::{clamp_word, extend_predictor_to_omega, find_merge_point, indicator_split};

fn bounds_and_word() -> impl Strategy<Value = (Vec<u64>, Vec<u64>)> {
    prop::collection::vec(2u64..5, 1..6).prop_flat_map(|x| {
        let len = x.len();
        (Just(x), prop::collection::vec(0u64..9, len))
    })
}

fn gf(p: u64) -> impl Strategy<Value = Scalar> {
    (0..p).prop_map(move |v| Field::Prime(p).residue(v).unwrap())
}

proptest! {
    #[test]
    fn clamp_lands_in_space_and_is_idempotent((x, f) in bounds_and_word()) {
        let c = clamp_word(&f, &x).unwrap();
        prop_assert!(SpaceSpec::bounded(&x).unwrap().contains(&c));
        prop_assert_eq!(clamp_word(&c, &x).unwrap(), c.clone());
        for n in 0..f.len() {
            prop_assert!(c[n] == f[n] || (c[n] == 0 && f[n] >= x[n]));
        }
    }

    #[test]
    fn extension_reads_the_clamped_word((x, f) in bounds_and_word(), salt in any::<u64>()) {
        let spec = SpaceSpec::bounded(&x).unwrap();
        let domain: Vec<usize> = (0..x.len()).filter(|n| salt >> n & 1 == 1).collect();
        let pi = Predictor::tabulate(spec, &domain, |n, w| {
            (w.iter().sum::<u64>() + salt.rotate_left(n as u32)) % x[n]
        }).unwrap();
        let star = extend_predictor_to_omega(&pi, &x).unwrap();
        let c = clamp_word(&f, &x).unwrap();
        for n in domain {
            prop_assert_eq!(star.predict(&f[..n]).unwrap(), pi.predict(&c[..n]).unwrap());
        }
    }

    #[test]
    fn indicator_split_determines_the_word(f in prop::collection::vec(0u64..4, 1..8), mask in any::<u8>()) {
        let ks: Vec<usize> = (0..f.len()).filter(|i| mask >> i & 1 == 1).collect();
        let (g, h) = indicator_split(&f, 4, &ks).unwrap();
        prop_assert!(g.iter().all(|&v| v <= 1));
        for (m, &k) in ks.iter().enumerate() {
            let back = if g[k] == 1 { 1 } else if h[m] == 0 { 0 } else { h[m] + 1 };
            prop_assert_eq!(back, f[k]);
        }
    }

    #[test]
    fn merge_point_is_never_spoiled(opts in prop::collection::vec(prop::collection::vec(0u8..2, 9), 1..4)) {
        let j = find_merge_point(&opts).unwrap();
        prop_assert!(j < 9);
        for a in &opts {
            for b in &opts {
                prop_assert!(a[..j] != b[..j] || a[j] == b[j]);
            }
        }
    }

    #[test]
    fn prime_field_distributes(a in gf(7), b in gf(7), c in gf(7)) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn kernel_vectors_are_annihilated(rows in prop::collection::vec(prop::collection::vec(gf(3), 4), 1..4)) {
        let field = Field::Prime(3);
        let basis = kernel_basis(field, &rows, 4);
        prop_assert_eq!(basis.len() + row_reduce(field, &rows).rank(), 4);
        for v in &basis {
            for r in &rows {
                prop_assert!(dot(field, r, v).is_zero());
            }
        }
    }

    #[test]
    fn forms_from_words_are_symmetric(n in 1usize..6, seed in any::<u64>(), vals in prop::collection::vec(0u64..3, 40)) {
        let field = Field::Prime(3);
        let h = make_coherent_injections(n, InjectionStyle::Perturbed(seed));
        let width = h.working_horizon() as usize;
        let g: Vec<Vec<Scalar>> =
            (0..n).map(|b| (0..width).map(|i| field.residue(vals[(b * 7 + i) % 40]).unwrap()).collect()).collect();
        let phi = luzin_to_gross(field, &g, &h, n).unwrap();
        for a in 0..n {
            prop_assert!(phi.entry(a, a).is_zero());
            for b in 0..n {
                prop_assert_eq!(phi.entry(a, b), phi.entry(b, a));
            }
        }
    }

    #[test]
    fn sigma_star_is_coherent(sigma in prop::collection::vec(0u64..4, 1..5)) {
        let mut cache = SigmaStarCache::new(Field::Rationals).unwrap();
        let star = cache.sigma_star(&sigma).unwrap();
        prop_assert_eq!(star.len(), sigma.len());
        for i in 0..sigma.len() {
            prop_assert_eq!(star[i], cache.sigma_star(&sigma[..=i]).unwrap()[i]);
        }
    }

    #[test]
    fn prediction_report_matches_guesses(f in prop::collection::vec(0u64..2, 4), grace in 0usize..5) {
        let spec = SpaceSpec::uniform(2, 4).unwrap();
        let pi = Predictor::tabulate(spec, &[1, 3], |n, w| w.get(n - 1).copied().unwrap_or(0)).unwrap();
        let report = check_prediction(&pi, &f, grace).unwrap();
        let active: Vec<usize> = [1, 3].into_iter().filter(|&n| n >= grace).collect();
        let all_right = active.iter().all(|&n| f[n] == f[n - 1]);
        prop_assert_eq!(report.predicted(), !active.is_empty() && all_right);
    }
}

#[test]
fn diagram_order_is_transitive_and_dual() {
    let d = load_builtin_diagram();
    let ids: Vec<&str> = d.nodes().iter().map(|n| n.id.as_str()).collect();
    let le: Vec<Vec<bool>> = ids.iter().map(|a| ids.iter().map(|b| d.provable_le(a, b).unwrap()).collect()).collect();
    for i in 0..ids.len() {
        assert!(le[i][i]);
        for j in 0..ids.len() {
            let q = d.query(ids[i], ids[j]).unwrap();
            let r = d.query(ids[j], ids[i]).unwrap();
            if i != j && le[i][j] {
                assert!(!le[j][i], "{} and {} are provably equal", ids[i], ids[j]);
                assert_eq!(q.verdict, DiagramVerdict::ProvableLe);
                assert_eq!(r.verdict, DiagramVerdict::ProvableGe);
            }
            for k in 0..ids.len() {
                if le[i][j] && le[j][k] {
                    assert!(le[i][k]);
                }
            }
        }
    }
}
