use lmo_hardbench::{
    build_hard_instance, build_smoothed_instance, BaseKind, Instance, InstanceDocument, Permutation, PermutedFamily,
};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn ball_document_values() {
    let doc = Instance::Ball(build_hard_instance(2, 1.0, 1.0).unwrap()).to_document();
    assert!(close(doc.c.unwrap(), 0.35355339059327373, 1e-15));
    let w = doc.w.as_ref().unwrap();
    assert!(close(w[0], 0.5, 1e-15) && close(w[1], std::f64::consts::FRAC_1_SQRT_2, 1e-15));
    assert!(close(doc.nu.unwrap(), 0.095929772389679, 1e-12));
    assert!(close(doc.diameter, 0.41421356237309503, 1e-15));
    assert_eq!(doc.x_star, vec![doc.nu.unwrap(); 2]);
}

#[test]
fn smoothed_simplex_minimizer() {
    let s = build_smoothed_instance(BaseKind::Simplex, 4, 10.0).unwrap();
    for v in s.objective.minimizer() {
        assert!(close(*v, 0.3, 1e-15));
    }
    assert!(close(s.diameter(), 2f64.sqrt() + 0.2, 1e-15));
}

#[test]
fn documents_round_trip_through_json() {
    let family = PermutedFamily::scaled(5, 2.0, 0.5).unwrap();
    let instances = [
        Instance::Ball(build_hard_instance(6, 3.0, 2.0).unwrap()),
        Instance::Permuted { family, perm: Permutation::from_one_based(&[3, 1, 5, 2, 4]).unwrap() },
        Instance::Smoothed(build_smoothed_instance(BaseKind::WeightedBall, 4, 10.0).unwrap()),
        Instance::Smoothed(build_smoothed_instance(BaseKind::Simplex, 3, 100.0).unwrap()),
    ];
    for inst in instances {
        let doc = inst.to_document();
        let json = serde_json::to_string(&doc).unwrap();
        let back: InstanceDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back, doc);
        let rebuilt = Instance::from_document(&back).unwrap();
        assert_eq!(rebuilt.to_document(), doc);
    }
}

#[test]
fn tampered_documents_are_rejected() {
    let mut doc = Instance::Ball(build_hard_instance(3, 1.0, 1.0).unwrap()).to_document();
    doc.c = Some(1.0);
    assert!(Instance::from_document(&doc).is_err());
    let mut doc = Instance::Ball(build_hard_instance(3, 1.0, 1.0).unwrap()).to_document();
    doc.x_star.pop();
    assert!(Instance::from_document(&doc).is_err());
}

#[test]
fn document_keys() {
    let doc = Instance::Smoothed(build_smoothed_instance(BaseKind::Simplex, 2, 10.0).unwrap()).to_document();
    let v = serde_json::to_value(&doc).unwrap();
    assert_eq!(v["kind"], "smoothed");
    assert_eq!(v["base"], "simplex");
    assert!(v.get("C").is_none());
    for key in ["d", "L", "alpha", "beta", "tail_value", "diameter", "x_star"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}
