use innerlab_core::clark::{clark_measure, desintegrate};
use innerlab_core::clt::{
    gauss_report, quadrature_moments, simulate, Normalization, NormalizedSum, Tolerances,
};
use innerlab_core::correlations::{higher_correlation, CorrelationSpec};
use innerlab_core::quadrature::mc_integrate;
use innerlab_core::variance::{l2_identity_check, CoefficientSequence};
use innerlab_core::{BlaschkeProduct, CirclePoint, InnerMap, Iterate, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn monte_carlo_agrees_with_quadrature_variance() {
    let f = BlaschkeProduct::with_zero(C64::from_polar(0.4, 1.0)).unwrap();
    let a = CoefficientSequence::random_signs(9, 8).unwrap();
    let exact = l2_identity_check(&f, &a, 8).unwrap();
    let sum = NormalizedSum::new(&f, &a, 8, Normalization::Main).unwrap();
    let mc = mc_integrate(|z| c(sum.raw(z).norm_sqr(), 0.0), 200_000, 3).unwrap();
    assert!(
        (mc.value.re - exact.sigma2).abs() < 5.0 * mc.stderr,
        "{} {}",
        mc.value.re,
        exact.sigma2
    );
    let q = quadrature_moments(&f, &a, 8).unwrap();
    assert!((q.norm2 - 0.5).abs() < 1e-8);
}

#[test]
fn clark_measures_of_iterates_desintegrate() {
    let f = BlaschkeProduct::with_zero(c(0.5, 0.0)).unwrap();
    let f3 = Iterate::new(&f, 3).unwrap();
    let mu = clark_measure(&f3, CirclePoint::new(0.3).unwrap()).unwrap();
    assert_eq!(mu.atoms.len(), 8);
    assert!((mu.weight_sum() - 1.0).abs() < 1e-10);
    let d = desintegrate(&f3, |z| z * z + c(0.5, 0.0) * z.conj(), 256).unwrap();
    assert!(d.residual < 1e-8, "{d:?}");
}

#[test]
fn sign_flip_conjugates_correlations() {
    let f = BlaschkeProduct::new(
        &[c(0.0, 0.0), C64::from_polar(0.3, 1.0)],
        C64::from_polar(1.0, 0.7),
    )
    .unwrap();
    for (signs, idx) in [
        (vec![1, 1, -1], vec![1, 3, 6]),
        (vec![1, -1, -1, 1], vec![1, 2, 4, 7]),
    ] {
        let spec = CorrelationSpec::new(signs, idx).unwrap();
        let i = higher_correlation(&f, &spec).unwrap();
        let j = higher_correlation(&f, &spec.conjugate()).unwrap();
        assert!((i - j.conj()).norm() < 1e-10);
    }
}

#[test]
fn lacunary_ks_improves_with_n() {
    let z2 = BlaschkeProduct::monomial(2).unwrap();
    let a = CoefficientSequence::constant(c(1.0, 0.0), 18).unwrap();
    let ks = |n| {
        let sum = NormalizedSum::new(&z2, &a, n, Normalization::Main).unwrap();
        let r = gauss_report(&simulate(&sum, 200_000, 8).unwrap(), &Tolerances::default()).unwrap();
        r.ks_re.max(r.ks_im)
    };
    let (k6, k18) = (ks(6), ks(18));
    assert!(k18 < k6, "{k6} {k18}");
}

#[test]
fn iterate_jet_matches_power() {
    let f = BlaschkeProduct::with_zero(C64::from_polar(0.6, -0.4)).unwrap();
    let f5 = Iterate::new(&f, 5).unwrap();
    assert!((f5.jet().c1 - f.jet().c1.powu(5)).norm() < 1e-14);
}
