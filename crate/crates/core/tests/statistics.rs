mod common;

use common::EPS;
use modinv::linalg::CMatrix;
use modinv::modular_data::{su2_modular_data, verlinde_fusion};
use modinv::statistics::{statistics_from_modular_data, verify_statistics_relations, SubSystem};
use num_complex::Complex64;

fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

#[test]
fn y_is_rescaled_s_and_unitary_up_to_w() {
    for k in 1..=16usize {
        let md = su2_modular_data(k as i64).unwrap();
        let fr = verlinde_fusion(&md, EPS).unwrap();
        let sd = statistics_from_modular_data(&md, &fr, &SubSystem::full(&fr)).unwrap();
        let n = k + 1;
        let w: f64 = (0..n).map(|a| common::dim(k, a).powi(2)).sum();
        assert!((sd.w - w).abs() < 1e-9 * w);
        let scaled_s = CMatrix::from_fn(n, n, |a, b| Complex64::new(w.sqrt() * common::s_entry(k, a, b), 0.0));
        assert!(max_diff(&sd.y, &scaled_s) < 1e-9 * w, "k={k}");
        let gram = &sd.y * sd.y.adjoint();
        let target = CMatrix::identity(n, n) * Complex64::new(w, 0.0);
        assert!(max_diff(&gram, &target) < 1e-9 * w, "k={k}");
        assert!(!sd.degenerate);
        assert!(verify_statistics_relations(&sd, EPS).unwrap().pass);
    }
}

#[test]
fn closed_truncation_restricts_full_matrices() {
    for k in [4usize, 8, 12] {
        let md = su2_modular_data(k as i64).unwrap();
        let fr = verlinde_fusion(&md, EPS).unwrap();
        let full = statistics_from_modular_data(&md, &fr, &SubSystem::full(&fr)).unwrap();
        let evens: Vec<usize> = (0..=k).step_by(2).collect();
        let delta = SubSystem::new(evens.clone(), &fr).unwrap();
        assert!(delta.is_closed());
        let part = statistics_from_modular_data(&md, &fr, &delta).unwrap();
        for (p, &i) in evens.iter().enumerate() {
            assert_eq!(part.kappa[p], full.kappa[i]);
            for (q, &j) in evens.iter().enumerate() {
                assert!((part.y[(p, q)] - full.y[(i, j)]).norm() < 1e-12);
                assert!((part.x[(p, q)] - full.x[(i, j)]).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn simple_current_subsystem_is_degenerate_at_level_four() {
    // {0, 4} at level 4: h_4 = 1, so X = 1 and Y = [[1, 1], [1, 1]]
    let md = su2_modular_data(4).unwrap();
    let fr = verlinde_fusion(&md, EPS).unwrap();
    let sd = statistics_from_modular_data(&md, &fr, &SubSystem::new([0, 4], &fr).unwrap()).unwrap();
    assert!(sd.closed);
    assert!(sd.degenerate);
    for v in sd.y.iter() {
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }
}
