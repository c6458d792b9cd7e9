use super::*;
use crate::linalg::svd_matrix_oracle;
use crate::tensor::{Distribution, Field, TensorSpace};

fn cfg() -> SolverConfig {
    SolverConfig::default().with_seed(11)
}

fn superdiagonal() -> DenseTensor {
    let mut d = vec![0.0; 8];
    d[0] = 1.0;
    d[7] = 1.0;
    DenseTensor::from_real(&[2, 2, 2], &d).unwrap()
}

fn rank_one(space: &TensorSpace, seed: u64, c: f64) -> (SimpleTensor, DenseTensor) {
    let f = crate::tensor::random_factor(space, seed);
    let v = SimpleTensor::unit_from_factors(space.clone(), f).unwrap().with_scale(c);
    let a = v.assemble();
    (v, a)
}

#[test]
fn rank_one_is_found_exactly() {
    for field in [Field::Real, Field::Complex] {
        let space = TensorSpace::new(vec![2, 3, 2], field).unwrap();
        let (_, s) = rank_one(&space, 5, 2.5);
        let lo = spectral_lower(&s, &cfg()).unwrap();
        assert!((lo.value - 2.5).abs() < 1e-10);
        assert!((spectral_upper(&s) - 2.5).abs() < 1e-10);
        let u = lo.witness.unwrap();
        assert!(u.is_unit());
        let ip = u.inner_with(&s).unwrap();
        assert!((ip.re - 2.5).abs() < 1e-10 && ip.im.abs() < 1e-10);
        let resid = s.sub(&u.assemble().scaled(C64::new(2.5, 0.0))).unwrap();
        assert!(resid.norm() < 1e-9);
    }
}

#[test]
fn diagonal_matrix_and_superdiagonal() {
    let d = DenseTensor::from_real(&[2, 2], &[2.0, 0.0, 0.0, 1.0]).unwrap();
    let b = spectral_bracket(&d, &cfg()).unwrap();
    assert!((b.lower - 2.0).abs() < 1e-12 && (b.upper - 2.0).abs() < 1e-12);

    let s = superdiagonal();
    let b = spectral_bracket(&s, &cfg()).unwrap();
    assert!((b.lower - 1.0).abs() < 1e-10, "{b:?}");
    assert!((b.upper - 1.0).abs() < 1e-12);
}

#[test]
fn zero_tensor_has_no_witness() {
    let z = DenseTensor::zeros(TensorSpace::real(&[2, 2]).unwrap());
    let b = spectral_bracket(&z, &cfg()).unwrap();
    assert_eq!((b.lower, b.upper), (0.0, 0.0));
    assert!(b.lower_witness.is_none());
    assert_eq!(b.upper_method, UpperMethod::Exact);
}

#[test]
fn matrices_match_the_svd_oracle() {
    for n in 1..=8 {
        for field in [Field::Real, Field::Complex] {
            let space = TensorSpace::new(vec![n, (n + 2) % 8 + 1], field).unwrap();
            let m = DenseTensor::random(&space, 100 + n as u64, Distribution::Gaussian);
            let smax = svd_matrix_oracle(&m).unwrap()[0];
            let b = spectral_bracket(&m, &cfg()).unwrap();
            assert!((b.lower - smax).abs() <= 1e-8 * smax, "{n} {field:?}: {} vs {smax}", b.lower);
            assert!((b.upper - smax).abs() <= 1e-8 * smax);
        }
    }
}

#[test]
fn ascent_is_monotone_and_witness_reproduces_value() {
    for seed in 0..6 {
        for field in [Field::Real, Field::Complex] {
            let space = TensorSpace::new(vec![3, 2, 3], field).unwrap();
            let s = DenseTensor::random(&space, seed, Distribution::Gaussian);
            let lo = spectral_lower(&s, &cfg()).unwrap();
            for w in lo.trace.windows(2) {
                assert!(w[1] >= w[0] - 1e-12 * (1.0 + w[0]));
            }
            let u = lo.witness.unwrap();
            assert!(u.is_unit());
            let ip = u.inner_with(&s).unwrap();
            assert!((ip.norm() - lo.value).abs() < 1e-10);
            assert!(lo.value <= spectral_upper(&s) + 1e-9);
        }
    }
}

#[test]
fn parallel_and_sequential_agree_bitwise() {
    let space = TensorSpace::complex(&[2, 3, 2]).unwrap();
    let s = DenseTensor::random(&space, 3, Distribution::Gaussian);
    let a = spectral_lower(&s, &cfg()).unwrap();
    let b = spectral_lower(&s, &cfg().sequential()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn tuple_of_matrix_units() {
    let e11 = DenseTensor::from_real(&[2, 2], &[1.0, 0.0, 0.0, 0.0]).unwrap();
    let e12 = DenseTensor::from_real(&[2, 2], &[0.0, 1.0, 0.0, 0.0]).unwrap();
    let t = TensorTuple::new(vec![e11, e12]).unwrap();
    let b = tuple_alpha(&t, &cfg().with_alpha(Exponent::TWO)).unwrap();
    assert!((b.lower - 1.0).abs() < 1e-10);
    assert!(b.upper >= 1.0 - 1e-12);
}

#[test]
fn single_member_tuple_reduces_to_spectral() {
    let space = TensorSpace::real(&[2, 2, 3]).unwrap();
    let s = DenseTensor::random(&space, 9, Distribution::Gaussian);
    let spec = spectral_bracket(&s, &cfg()).unwrap();
    let t = TensorTuple::single(s);
    for a in [Exponent::ONE, Exponent::TWO, Exponent::new(3.0).unwrap(), Exponent::INF] {
        let b = tuple_alpha(&t, &cfg().with_alpha(a)).unwrap();
        assert_eq!(b.lower, spec.lower);
        assert_eq!(b.upper, spec.upper);
    }
}

#[test]
fn alpha_infinity_is_the_best_member() {
    let space = TensorSpace::complex(&[2, 2, 2]).unwrap();
    let t = TensorTuple::random(&space, 3, 4, Distribution::Gaussian).unwrap();
    let c = cfg().with_alpha(Exponent::INF);
    let b = tuple_alpha(&t, &c).unwrap();
    let best = t
        .members()
        .iter()
        .map(|m| spectral_lower(m, &c).unwrap().value)
        .fold(0.0, f64::max);
    assert_eq!(b.lower, best);
}

#[test]
fn tuple_brackets_are_ordered_and_witnessed() {
    for a in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
        let alpha = Exponent::new(a).unwrap();
        for field in [Field::Real, Field::Complex] {
            let space = TensorSpace::new(vec![2, 3, 2], field).unwrap();
            let t = TensorTuple::random(&space, 3, 21, Distribution::Gaussian).unwrap();
            let b = tuple_alpha(&t, &cfg().with_alpha(alpha)).unwrap();
            assert!(b.lower <= b.upper + 1e-9);
            let Some(Witness::Simple(u)) = &b.lower_witness else { panic!() };
            let v = tuple_alpha_value(&t, u, alpha).unwrap();
            if a.is_finite() {
                assert!((v - b.lower).abs() < 1e-10 * (1.0 + v));
            } else {
                assert!(v >= b.lower - 1e-10);
            }
            for ue in tuple_alpha_mode_uppers(&t, alpha) {
                assert!(b.lower <= ue + 1e-9);
            }
        }
    }
}

#[test]
fn missing_alpha_is_an_error() {
    let t = TensorTuple::single(superdiagonal());
    assert!(matches!(tuple_alpha(&t, &cfg()), Err(Error::MissingExponent(_))));
    let mut c = cfg();
    c.alpha = Some(Exponent::TWO);
    c.beta = Some(Exponent::ONE);
    assert!(matches!(tuple_alpha(&t, &c), Err(Error::NotConjugate { .. })));
}

#[test]
fn kron_warm_start_gives_product_lower() {
    for field in [Field::Real, Field::Complex] {
        let space = TensorSpace::new(vec![2, 2, 2], field).unwrap();
        let s = DenseTensor::random(&space, 1, Distribution::Gaussian);
        let t = DenseTensor::random(&space, 2, Distribution::Gaussian);
        let ls = spectral_lower(&s, &cfg()).unwrap();
        let lt = spectral_lower(&t, &cfg()).unwrap();
        let warm = ls.witness.unwrap().kron(&lt.witness.unwrap()).unwrap();
        let st = s.kron(&t).unwrap();
        let l = spectral_lower(&st, &cfg().with_warm_starts(vec![warm])).unwrap();
        assert!(l.value >= ls.value * lt.value - 1e-9);
    }
}

#[test]
fn brute_force_examples() {
    let d = DenseTensor::from_real(&[2, 2], &[2.0, 0.0, 0.0, 1.0]).unwrap();
    assert!((brute_force_spectral(&d, 360).unwrap() - 2.0).abs() < 1e-3);
    let space = TensorSpace::real(&[2, 2, 2]).unwrap();
    let (_, r1) = rank_one(&space, 4, 1.0);
    assert!((brute_force_spectral(&r1, 16).unwrap() - 1.0).abs() < 1e-3);
    assert!((brute_force_spectral(&superdiagonal(), 16).unwrap() - 1.0).abs() < 1e-3);
}

#[test]
fn brute_force_guards() {
    let c = DenseTensor::zeros(TensorSpace::complex(&[2, 2]).unwrap());
    assert!(matches!(brute_force_spectral(&c, 8), Err(Error::BruteForceGuard(_))));
    let big = DenseTensor::zeros(TensorSpace::real(&[5, 5, 3]).unwrap());
    assert!(matches!(brute_force_spectral(&big, 8), Err(Error::BruteForceGuard(_))));
}

#[test]
fn brute_force_grows_with_resolution_and_matches_ascent() {
    for seed in 0..3 {
        let space = TensorSpace::real(&[2, 2, 2]).unwrap();
        let s = DenseTensor::random(&space, seed, Distribution::Gaussian);
        let a = brute_force_spectral(&s, 8).unwrap();
        let b = brute_force_spectral(&s, 16).unwrap();
        assert!(b >= a - 1e-12);
        let (v, _) = brute_force_spectral_converged(&s).unwrap();
        let lo = spectral_lower(&s, &cfg()).unwrap().value;
        assert!((v - lo).abs() < 1e-3, "{v} vs {lo}");
        assert!(v <= spectral_upper(&s) + 1e-9);
    }
}
