use sdqc_core::curves::{gamma, gamma_minus, gamma_plus, lift_line, lift_through_matrix, two_matrix_hull, CurveKind, TwoMatrixHull};
use sdqc_core::invariants::SQRT3;
use sdqc_core::{phi, Direction, PQPoint, SdqcError, SymMatrix};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn family_selection_and_parameters() {
    let y = PQPoint { p: 1.0, q: 2.0 };
    let v = gamma(&y, &Direction::new(0.0, 1.0).unwrap()).unwrap();
    assert_eq!(v.kind, CurveKind::VLine { p0: 1.0, b: f64::INFINITY });
    let steep = Direction::from_angle(1.2);
    let CurveKind::VLine { p0, b } = gamma(&y, &steep).unwrap().kind else { panic!() };
    assert!(close(b, 1.2f64.tan(), 1e-14) && close(p0, 1.0 - 2.0 / 1.2f64.tan(), 1e-14));
    let flat = gamma(&y, &Direction::new(1.0, 0.0).unwrap()).unwrap();
    assert_eq!(flat.kind, CurveKind::Hyperbola { p0: 1.0, q0: 2.0 });
    assert!(matches!(gamma(&PQPoint { p: 0.0, q: 0.0 }, &steep), Err(SdqcError::DegenerateBase(_))));
    assert!(matches!(gamma_minus(&y, &steep), Err(SdqcError::SlopeOutOfRange(_))));
}

#[test]
fn points_lie_on_curve_and_move_at_unit_speed() {
    let y = PQPoint { p: -0.3, q: 0.8 };
    for theta in [0.1, 0.5, -0.6, 2.9, 1.0, 1.4, -1.3, 3.0] {
        let e = Direction::from_angle(theta);
        let c = gamma(&y, &e).unwrap();
        let z = c.point(0.0);
        assert!(close(z.p, y.p, 1e-15) && close(z.q, y.q, 1e-15));
        let h = 1e-6;
        let (a, b) = (c.point(-h), c.point(h));
        let (dp, dq) = ((b.p - a.p) / (2.0 * h), (b.q - a.q) / (2.0 * h));
        assert!(close(dp, e.e1, 1e-6) && close(dq, e.e2, 1e-6), "theta={theta}: ({dp}, {dq})");
        for t in [-1.5, -0.4, 0.3, 2.0] {
            let z = c.point(t);
            assert!(close(c.q_at(z.p).unwrap(), z.q, 1e-10), "theta={theta} t={t}");
        }
    }
}

#[test]
fn junction_families_coincide() {
    let y = PQPoint { p: 0.4, q: 1.1 };
    let e = Direction::new(2.0 / 7f64.sqrt(), SQRT3 / 7f64.sqrt()).unwrap();
    let (a, b) = (gamma_plus(&y, &e).unwrap(), gamma_minus(&y, &e).unwrap());
    let CurveKind::Hyperbola { q0, .. } = b.kind else { panic!() };
    assert_eq!(q0, 0.0);
    for t in [-2.0, -0.5, 0.7, 1.9] {
        let (u, v) = (a.point(t), b.point(t));
        assert!((u.p - v.p).abs() < 1e-12 && (u.q - v.q).abs() < 1e-12);
    }
}

#[test]
fn lifts_trace_the_curve_with_rank_two_direction() {
    let y = PQPoint { p: 0.2, q: 0.9 };
    for theta in [0.0, 0.3, -0.45, 1.0, 1.3, 2.5] {
        let c = gamma(&y, &Direction::from_angle(theta)).unwrap();
        let path = c.lift();
        assert!(path.dir.det().abs() < 1e-12, "direction must be singular");
        for tau in [-2.0, -0.3, 0.0, 0.8, 3.0] {
            let z = phi(&path.at(tau));
            let q = c.q_at(z.p).unwrap_or(z.q);
            assert!(close(q, z.q, 1e-12), "theta={theta} tau={tau}");
        }
    }
    let vertical = lift_line(&CurveKind::VLine { p0: 1.0, b: f64::INFINITY });
    assert!(vertical.dir.trace().abs() < 1e-15);
}

#[test]
fn lift_through_matrix_is_tangent() {
    let sigma = SymMatrix::from_rows(&[
        vec![1.0, 0.3, -0.2],
        vec![0.3, -0.5, 0.4],
        vec![-0.2, 0.4, 0.2],
    ])
    .unwrap();
    let y = phi(&sigma);
    for s in [0.0, 0.2, -0.4, SQRT3 / 4.0] {
        for sign in [1.0, -1.0] {
            let n = (1.0 + s * s).sqrt();
            let e = Direction::new(sign / n, sign * s / n).unwrap();
            let (path, g) = lift_through_matrix(&sigma, &e).unwrap();
            assert_eq!(path.at(0.0), sigma);
            assert!((g.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(path.dir.det().abs() < 1e-12);
            let h = 1e-6;
            let (a, b) = (phi(&path.at(-h)), phi(&path.at(h)));
            let (dp, dq) = (b.p - a.p, b.q - a.q);
            // image tangent is parallel to e
            assert!((dp * e.e2 - dq * e.e1).abs() < 1e-8 * dp.hypot(dq), "s={s}");
            assert!(dp * e.e1 + dq * e.e2 > 0.0);
            assert!((phi(&path.at(0.0)).q - y.q).abs() < 1e-15);
        }
    }
    let steep = Direction::from_angle(1.0);
    assert!(matches!(lift_through_matrix(&sigma, &steep), Err(SdqcError::SlopeOutOfRange(_))));
    let iso = SymMatrix::identity(3).unwrap();
    assert!(matches!(lift_through_matrix(&iso, &Direction::new(1.0, 0.0).unwrap()), Err(SdqcError::DegenerateBase(_))));
}

#[test]
fn two_matrix_pair_witness() {
    for n in [2usize, 3] {
        let id = SymMatrix::identity(n).unwrap();
        let TwoMatrixHull::Pair { witness, .. } = two_matrix_hull(&id, &id.scale(-1.0)).unwrap() else {
            panic!("invertible difference");
        };
        assert!(witness.value(&id).abs() < 1e-12);
        assert!(witness.value(&id.scale(-1.0)).abs() < 1e-12);
        for k in 0..=20 {
            let t = -1.0 + 0.1 * k as f64;
            let v = witness.value(&id.scale(t));
            assert!((v - n as f64 * (1.0 - t * t)).abs() < 1e-12, "n={n} t={t}: {v}");
        }
    }
    // an indefinite difference still gets a certificate vanishing at both ends
    let a = SymMatrix::diag(&[1.0, -2.0, 0.5]).unwrap();
    let b = SymMatrix::diag(&[-1.0, 1.0, 0.0]).unwrap();
    let TwoMatrixHull::Pair { witness, .. } = two_matrix_hull(&a, &b).unwrap() else { panic!() };
    assert!(witness.value(&a).abs() < 1e-12 && witness.value(&b).abs() < 1e-12);
    assert!(witness.value(&a.add(&b).scale(0.5)) > 0.0);
}

#[test]
fn two_matrix_segment() {
    let a = SymMatrix::diag(&[1.0, 2.0, 0.0]).unwrap();
    let b = SymMatrix::diag(&[0.0, 0.0, 0.0]).unwrap();
    match two_matrix_hull(&a, &b).unwrap() {
        TwoMatrixHull::Segment { rank, .. } => assert_eq!(rank, 2),
        h => panic!("{h:?}"),
    }
    assert!(matches!(two_matrix_hull(&a, &a), Err(SdqcError::DomainError(_))));
    let two = SymMatrix::identity(2).unwrap();
    assert!(matches!(two_matrix_hull(&a, &two), Err(SdqcError::InvalidDimension(2))));
}
