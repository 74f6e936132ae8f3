use std::sync::Arc;

use coframe_core::amalgam::{
    convolution_domination_check, matrix_envelope, restriction_check, schur_norm_bound, GroupFunction,
};
use coframe_core::density::{beurling_density, frame_measure};
use coframe_core::frame::{rescale_to_subcritical, CoherentSystem};
use coframe_core::geometry::{
    canonical_windows, is_u_dense, packing_cover_bound, relative_separation, IndexSet, Window,
    WindowSequence,
};
use coframe_core::group::{make_cyclic_product, make_heisenberg, validate_group, FiniteGroup};
use coframe_core::linalg::{
    c, hermitian_norm, inner, random_hermitian, random_unit_vector, random_vector, seeded_rng,
};
use coframe_core::Complex64;
use coframe_core::removal::{
    neumann_truncation, remove_positive_density, removal_certificate, truncation_order, RemovalConfig,
};
use coframe_core::rep::{gabor_rep, heisenberg_schroedinger_rep, ProjectiveRep};
use proptest::prelude::*;

fn small_groups() -> Vec<FiniteGroup> {
    vec![
        make_cyclic_product(&[8]).unwrap(),
        make_cyclic_product(&[2, 4]).unwrap(),
        make_cyclic_product(&[3, 3]).unwrap(),
        make_cyclic_product(&[4, 4]).unwrap(),
        make_heisenberg(2).unwrap(),
        make_heisenberg(3).unwrap(),
    ]
}

fn group_strategy() -> impl Strategy<Value = FiniteGroup> {
    prop::sample::select(small_groups())
}

fn subset(group: &FiniteGroup, mask: &[bool]) -> IndexSet {
    IndexSet::new(group, (0..group.order()).filter(|&i| mask[i % mask.len()])).unwrap()
}

fn gabor_system(n: usize, seed: u64, lambda_mask: Option<&[bool]>) -> CoherentSystem {
    let rep = Arc::new(gabor_rep(n).unwrap());
    let group = rep.group().clone();
    let g = random_unit_vector(&mut seeded_rng(seed), n);
    let lambda = match lambda_mask {
        Some(m) => subset(&group, m),
        None => IndexSet::full(&group),
    };
    CoherentSystem::new(rep, g, lambda, Window::identity(&group)).unwrap()
}

#[test]
fn builtin_groups_satisfy_the_axioms() {
    for g in small_groups() {
        assert!(validate_group(&g).is_valid(), "{}", g.label());
    }
}

#[test]
fn packing_bound_holds_exhaustively_on_order_eight() {
    for group in [
        make_cyclic_product(&[8]).unwrap(),
        make_cyclic_product(&[2, 4]).unwrap(),
        make_cyclic_product(&[2, 2, 2]).unwrap(),
        make_heisenberg(2).unwrap(),
    ] {
        let windows = canonical_windows(&group);
        let ks: Vec<&Window> = windows.iter().filter(|w| w.is_symmetric()).collect();
        for bits in 0u32..(1 << group.order()) {
            let lambda = IndexSet::new(&group, (0..group.order()).filter(|i| bits >> i & 1 == 1)).unwrap();
            for u in &windows {
                for k in &ks {
                    let b = packing_cover_bound(&group, &lambda, u, k).unwrap();
                    assert!(b.holds(), "{} bits={bits:#b}: {b:?}", group.label());
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relative_separation_grows_with_q(group in group_strategy(), mask in prop::collection::vec(any::<bool>(), 1..32)) {
        let lambda = subset(&group, &mask);
        let windows = canonical_windows(&group);
        let rels: Vec<usize> = windows.iter().map(|q| relative_separation(&group, &lambda, q)).collect();
        prop_assert!(rels.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn density_is_monotone_in_u(group in group_strategy(), mask in prop::collection::vec(any::<bool>(), 1..32)) {
        let lambda = subset(&group, &mask);
        let windows = canonical_windows(&group);
        let dense: Vec<bool> = windows.iter().map(|u| is_u_dense(&group, &lambda, u)).collect();
        // once dense, every larger window is dense too
        if let Some(first) = dense.iter().position(|&d| d) {
            prop_assert!(dense[first..].iter().all(|&d| d));
        }
    }

    #[test]
    fn beurling_density_is_translation_invariant(
        group in group_strategy(),
        mask in prop::collection::vec(any::<bool>(), 1..32),
        shift in 0usize..64,
    ) {
        let lambda = subset(&group, &mask);
        let x = shift % group.order();
        let moved = lambda.translate_left(&group, x);
        let seq = WindowSequence::canonical(&group);
        let a = beurling_density(&group, &lambda, &seq);
        let b = beurling_density(&group, &moved, &seq);
        for (p, q) in a.windows.iter().zip(&b.windows) {
            prop_assert_eq!((p.min_count, p.max_count), (q.min_count, q.max_count));
        }
    }

    #[test]
    fn restriction_estimate_holds(
        group in group_strategy(),
        seed in any::<u64>(),
        lmask in prop::collection::vec(any::<bool>(), 1..32),
        kmask in prop::collection::vec(any::<bool>(), 1..32),
        qi in 0usize..4,
    ) {
        let mut rng = seeded_rng(seed);
        let f = GroupFunction::from_complex(random_vector(&mut rng, group.order()).iter().copied().collect());
        let lambda = subset(&group, &lmask);
        let k = Window::from_mask(&group, (0..group.order()).map(|i| kmask[i % kmask.len()]).collect());
        let windows = canonical_windows(&group);
        let q = &windows[qi.min(windows.len() - 1)];
        prop_assert!(restriction_check(&group, &f, &lambda, &k, q).holds());
        let f2 = GroupFunction::from_complex(random_vector(&mut rng, group.order()).iter().copied().collect());
        prop_assert!(convolution_domination_check(&group, &f, &f2, q).max_violation() <= 1e-12);
    }

    #[test]
    fn schur_bound_dominates_spectral_norm(
        group in group_strategy(),
        seed in any::<u64>(),
        lmask in prop::collection::vec(any::<bool>(), 1..32),
        qi in 0usize..3,
    ) {
        let lambda = subset(&group, &lmask);
        prop_assume!(!lambda.is_empty());
        let mut rng = seeded_rng(seed);
        let n = lambda.len();
        let a = random_hermitian(&mut rng, n);
        let theta = matrix_envelope(&group, &a, &lambda);
        let windows = canonical_windows(&group);
        let q = &windows[qi.min(windows.len() - 1)];
        let bound = schur_norm_bound(&group, &theta, &lambda, q);
        prop_assert!(hermitian_norm(&a) <= bound * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn orthogonality_relations(which in 0usize..5, seed in any::<u64>()) {
        let rep: ProjectiveRep = match which {
            0 => gabor_rep(2).unwrap(),
            1 => gabor_rep(3).unwrap(),
            2 => gabor_rep(5).unwrap(),
            3 => heisenberg_schroedinger_rep(2).unwrap(),
            _ => heisenberg_schroedinger_rep(3).unwrap(),
        };
        let d = rep.dim();
        let d_pi = d as f64 / rep.group().order() as f64;
        let mut rng = seeded_rng(seed);
        let [f1, g1, g2, f2] = [0, 1, 2, 3].map(|_| random_vector(&mut rng, d));
        let lhs: Complex64 = rep
            .matrices()
            .iter()
            .map(|m| inner(&f1, &(m * &g1)) * inner(&(m * &g2), &f2))
            .sum();
        let rhs = inner(&f1, &f2) * inner(&g1, &g2).conj() / d_pi;
        prop_assert!((lhs - rhs).norm() <= 1e-9 * rhs.norm().max(1.0));
    }

    #[test]
    fn certificate_matches_eigensolve(seed in any::<u64>(), mask in prop::collection::vec(any::<bool>(), 9)) {
        // Gabor(3) with at most 9 vectors: all 2^#Λ subsets of the frame
        let sys = gabor_system(3, seed, Some(&mask));
        let frame = sys.frame();
        let Ok(analysis) = frame.analyze() else { return Ok(()); };
        let labels = frame.labels().to_vec();
        for bits in 0u32..(1 << labels.len()) {
            let gamma: Vec<usize> = labels.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &l)| l).collect();
            let check = removal_certificate(&frame, &analysis, &gamma).unwrap();
            prop_assert!(check.agrees(), "Γ={:?} norm={} reduced={:?}", gamma, check.norm, check.reduced_bounds);
        }
    }

    #[test]
    fn neumann_error_decreases(seed in any::<u64>(), n in 2usize..5) {
        let sys = gabor_system(n, seed, None);
        let (scaled, _) = rescale_to_subcritical(&sys).unwrap();
        let frame = scaled.frame();
        let a = frame.analyze().unwrap();
        let exact = a.dual_gram(&frame);
        let top = truncation_order(a.lower, a.upper, 1e-3).unwrap() + 2;
        let mut prev = f64::INFINITY;
        for order in 0..=top {
            let split = neumann_truncation(&frame, order).unwrap();
            let err = hermitian_norm(&(&exact - &split.m_n));
            prop_assert!(err <= split.tail_bound + 1e-10);
            prop_assert!(err <= prev + 1e-12);
            prev = err;
        }
    }

    #[test]
    fn removal_verdict_is_scale_invariant(seed in any::<u64>(), t in 0.05f64..20.0) {
        let sys = gabor_system(3, seed, None);
        let seq = WindowSequence::canonical(sys.group());
        let cfg = RemovalConfig::default();
        let a = remove_positive_density(&sys, &seq, &cfg).unwrap();
        let b = remove_positive_density(&sys.scaled(c(t, 0.0)).unwrap(), &seq, &cfg).unwrap();
        prop_assert_eq!(a.is_removable, b.is_removable);
        prop_assert_eq!(&a.gamma, &b.gamma);
        prop_assert!((a.certificate_norm - b.certificate_norm).abs() < 1e-9);
    }

    #[test]
    fn parsevalize_preserves_verdicts(seed in any::<u64>(), mask in prop::collection::vec(any::<bool>(), 9)) {
        let sys = gabor_system(3, seed ^ 0x5eed, None);
        let frame = sys.frame();
        let parseval = frame.parsevalize().unwrap();
        let (a, p) = (frame.analyze().unwrap(), parseval.analyze().unwrap());
        for (x, y) in a.pairings.iter().zip(&p.pairings) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        let gamma: Vec<usize> = (0..9).filter(|&i| mask[i]).collect();
        let c1 = removal_certificate(&frame, &a, &gamma).unwrap();
        let c2 = removal_certificate(&parseval, &p, &gamma).unwrap();
        prop_assert_eq!(c1.is_removable, c2.is_removable);
        prop_assert!((c1.norm - c2.norm).abs() < 1e-9);
    }

    #[test]
    fn frame_measure_survives_translation(seed in any::<u64>(), shift in 0usize..16) {
        // replacing Λ by xΛ and g by π(x)-conjugated data leaves pairings unchanged
        let sys = gabor_system(4, seed, Some(&[true, false, true, true, false, true, true]));
        let group = sys.group().clone();
        let Ok(a) = sys.analyze() else { return Ok(()); };
        let x = shift % group.order();
        let moved = sys.with_index_set(sys.lambda().translate_left(&group, x)).unwrap();
        let b = moved.analyze().unwrap();
        let seq = WindowSequence::full_group(&group);
        let ma = frame_measure(&group, &a, sys.lambda(), &seq).unwrap();
        let mb = frame_measure(&group, &b, moved.lambda(), &seq).unwrap();
        prop_assert!((ma.m_plus - mb.m_plus).abs() < 1e-10 && (ma.m_minus - mb.m_minus).abs() < 1e-10);
    }
}
