use std::f64::consts::PI;

use proptest::prelude::*;

use screwspec::arith::detect_rational;
use screwspec::geodesic::{geodesic_lie, ScrewConfig};
use screwspec::helix::{arcsin_k, generator_from_kappa_tau, kappa_tau_from_generator, sin_k, ComplexLength};
use screwspec::io::{
    parse_clspectrum, parse_spectrum_csv, parse_spectrum_json, write_clspectrum, write_spectrum_csv,
    write_spectrum_json, SpectrumFile, SpectrumMetadata,
};
use screwspec::spaceform::{algebra_from_parts, exp_at, inner_k, phi, phi_inv, AlgebraElement, SpaceForm, Vec3, Vec4};
use screwspec::spectrum::{model_spectrum, CLSpectrum, EnumerationBudget};

fn space_form() -> impl Strategy<Value = SpaceForm> {
    prop_oneof![Just(SpaceForm::Flat), Just(SpaceForm::Spherical), Just(SpaceForm::Hyperbolic)]
}

fn vec3(bound: f64) -> impl Strategy<Value = Vec3> {
    (-bound..bound, -bound..bound, -bound..bound).prop_map(|(a, b, c)| Vec3::new(a, b, c))
}

fn algebra() -> impl Strategy<Value = AlgebraElement> {
    (vec3(1.5), vec3(1.5), space_form()).prop_map(|(x, w, k)| algebra_from_parts(&x, &w, k))
}

/// A point of `M_k` reached from the base point.
fn point_of(v: &AlgebraElement) -> Vec4 {
    exp_at(v, 1.0).act(&Vec4::new(1.0, 0.0, 0.0, 0.0))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn conjugation_stays_in_the_algebra(v in algebra(), u in algebra()) {
        let u = algebra_from_parts(&u.translation_part(), &u.rotation_part(), v.space_form());
        let w = v.conjugate_by(&exp_at(&u, 1.0));
        let scale = w.matrix().abs().max().max(1.0);
        prop_assert!(AlgebraElement::defect_of(w.matrix(), v.space_form()) < 1e-11 * scale);
    }

    #[test]
    fn exponential_is_a_one_parameter_group(v in algebra(), s in -1.5..1.5f64, t in -1.5..1.5f64) {
        let lhs = exp_at(&v, s) * exp_at(&v, t);
        let rhs = exp_at(&v, s + t);
        let scale = rhs.matrix().abs().max().max(1.0);
        prop_assert!((lhs.matrix() - rhs.matrix()).abs().max() < 1e-12 * scale);
        prop_assert!(rhs.defect() < 1e-12);
    }

    #[test]
    fn group_elements_are_isometries(v in algebra(), a in algebra(), b in algebra()) {
        let k = v.space_form();
        let (a, b) = (algebra_from_parts(&a.translation_part(), &a.rotation_part(), k),
                      algebra_from_parts(&b.translation_part(), &b.rotation_part(), k));
        let g = exp_at(&v, 1.0);
        let (p, q) = (point_of(&a), point_of(&b));
        // the flat model lives in the affine chart x₀ = 1; compare displacements
        let (p, q) = match k {
            SpaceForm::Flat => (p - Vec4::new(1.0, 0.0, 0.0, 0.0), q - Vec4::new(1.0, 0.0, 0.0, 0.0)),
            _ => (p, q),
        };
        let (gp, gq) = match k {
            SpaceForm::Flat => (g.matrix() * p, g.matrix() * q),
            _ => (g.act(&p), g.act(&q)),
        };
        let before = inner_k(&p, &q, k);
        let after = inner_k(&gp, &gq, k);
        prop_assert!((before - after).abs() < 1e-10 * before.abs().max(1.0) * g.matrix().abs().max().powi(2));
    }

    #[test]
    fn frame_map_round_trips(x in vec3(2.0), y in vec3(2.0), k in space_form(), lambda in 1.1..3.0f64, t in 0.0..3.0f64) {
        let cfg = ScrewConfig::new(k, lambda).unwrap();
        let g = geodesic_lie(&x, &y, &cfg, t);
        let back = phi_inv(&phi(&g)).unwrap();
        prop_assert_eq!(back.matrix(), g.matrix());
    }

    #[test]
    fn curvature_and_torsion_round_trip(kappa in 0.01..3.0f64, tau in -3.0..3.0f64, k in space_form()) {
        let z = generator_from_kappa_tau(kappa, tau, k).unwrap();
        let f = kappa_tau_from_generator(&z).unwrap();
        prop_assert!((f.kappa - kappa).abs() < 1e-12 && (f.tau - tau).abs() < 1e-12);
    }

    #[test]
    fn arcsin_k_inverts_sin_k(r in 0.0..1.5f64, k in space_form()) {
        let back = arcsin_k(sin_k(r, k), k).unwrap();
        prop_assert!((back - r).abs() < 1e-12);
    }

    #[test]
    fn rationals_are_detected(p in -500i64..500, q in 1u64..500) {
        let (m, n) = detect_rational(p as f64 / q as f64, 1_000_000, 1e-9).unwrap();
        prop_assert_eq!(m as f64 / n as f64, p as f64 / q as f64);
        prop_assert!(n <= q);
    }

    #[test]
    fn clspectrum_round_trips(raw in prop::collection::vec((0.01..50.0f64, 0.0..2.0 * PI), 0..12),
                              name in prop::option::of("[a-z]{1,8}")) {
        let entries = raw.into_iter().map(|(l, t)| ComplexLength::new(l, t).unwrap()).collect();
        let cls = CLSpectrum { entries, name };
        prop_assert_eq!(parse_clspectrum(&write_clspectrum(&cls)).unwrap(), cls);
    }

    #[test]
    fn spectrum_files_round_trip(k in space_form(), lambda in 1.1..3.0f64, cutoff in 5.0..40.0f64) {
        let cfg = ScrewConfig::new(k, lambda).unwrap();
        let budget = EnumerationBudget::new(cutoff).unwrap();
        let entries = model_spectrum(&cfg, &budget).unwrap();
        let file = SpectrumFile::new(SpectrumMetadata::new(k, lambda, &budget), &entries);
        let csv = parse_spectrum_csv(&write_spectrum_csv(&file)).unwrap();
        let json = parse_spectrum_json(&write_spectrum_json(&file)).unwrap();
        prop_assert_eq!(csv.entries().unwrap(), entries.clone());
        prop_assert_eq!(json.entries().unwrap(), entries);
        prop_assert_eq!(csv.metadata, file.metadata);
        prop_assert_eq!(json.metadata, file.metadata);
    }
}
