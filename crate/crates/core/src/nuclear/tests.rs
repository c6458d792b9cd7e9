use super::*;
use crate::linalg::svd_matrix_oracle;
use crate::spectral::{spectral_lower, tuple_alpha};
use crate::tensor::{random_factor, Distribution, TensorSpace};

fn cfg() -> SolverConfig {
    SolverConfig::default().with_seed(5)
}

fn superdiagonal() -> DenseTensor {
    let mut d = vec![0.0; 8];
    d[0] = 1.0;
    d[7] = 1.0;
    DenseTensor::from_real(&[2, 2, 2], &d).unwrap()
}

fn identity2() -> DenseTensor {
    DenseTensor::identity(2, Field::Real)
}

#[test]
fn caratheodory_counts() {
    assert_eq!(caratheodory_max_atoms(&TensorSpace::real(&[2, 2]).unwrap(), 1), 5);
    assert_eq!(caratheodory_max_atoms(&TensorSpace::complex(&[2, 2]).unwrap(), 1), 9);
    assert_eq!(caratheodory_max_atoms(&TensorSpace::real(&[2, 2, 2]).unwrap(), 2), 17);
}

#[test]
fn envelope_examples() {
    let z = DenseTensor::zeros(TensorSpace::real(&[3, 3]).unwrap());
    assert_eq!(nuclear_envelope(&z), 0.0);
    let space = TensorSpace::real(&[2, 2, 2]).unwrap();
    let r = DenseTensor::random(&space, 3, Distribution::Gaussian);
    assert!((nuclear_envelope(&r) - 2.0 * r.norm()).abs() < 1e-14);
    for n in 2..5 {
        let m = DenseTensor::random(&TensorSpace::complex(&[n, n]).unwrap(), n as u64, Distribution::Gaussian);
        let nuc: f64 = svd_matrix_oracle(&m).unwrap().iter().sum();
        assert!(nuclear_envelope(&m) >= nuc - 1e-12);
    }
}

#[test]
fn rank_one_uses_a_single_atom() {
    for field in [Field::Real, Field::Complex] {
        let space = TensorSpace::new(vec![2, 3, 2], field).unwrap();
        let v = SimpleTensor::unit_from_factors(space.clone(), random_factor(&space, 8)).unwrap().with_scale(1.75);
        let s = v.assemble();
        let sol = nuclear_bracket(&s, &cfg()).unwrap();
        assert!((sol.bracket.upper - 1.75).abs() < 1e-9, "{:?}", sol.bracket);
        assert!((sol.bracket.lower - 1.75).abs() < 1e-9);
        assert!(sol.decomposition.max_deviation(&TensorTuple::single(s)).unwrap() < 1e-12);
    }
}

#[test]
fn identity_and_superdiagonal() {
    let sol = nuclear_bracket(&identity2(), &cfg()).unwrap();
    assert!(sol.bracket.contains(2.0, 1e-12) && sol.bracket.relative_gap() < 1e-6, "{:?}", sol.bracket);
    assert!((nuclear_lower(&identity2(), Some(&identity2())).unwrap() - 2.0).abs() < 1e-14);

    let s = superdiagonal();
    let sol = nuclear_bracket(&s, &cfg()).unwrap();
    assert!(sol.bracket.upper <= 2.0 + 1e-6, "{:?}", sol.bracket);
    assert!((nuclear_lower(&s, None).unwrap() - 2.0).abs() < 1e-12);
    assert!(sol.bracket.lower >= 2.0 - 1e-9);
}

#[test]
fn zero_inputs() {
    let z = DenseTensor::zeros(TensorSpace::real(&[2, 2]).unwrap());
    let (v, d) = nuclear_upper(&z, &cfg()).unwrap();
    assert_eq!(v, 0.0);
    assert!(d.is_empty());
    assert_eq!(nuclear_lower(&z, None).unwrap(), 0.0);
    assert!(matches!(nuclear_lower(&identity2(), Some(&z.clone())), Err(Error::ZeroWitness)));
    let t = TensorTuple::zeros(TensorSpace::complex(&[2, 2, 2]).unwrap(), 3).unwrap();
    let sol = tuple_beta_star(&t, &cfg().with_beta(Exponent::TWO)).unwrap();
    assert_eq!((sol.bracket.lower, sol.bracket.upper), (0.0, 0.0));
}

#[test]
fn matrices_match_sum_of_singular_values() {
    for n in 1..=6 {
        for field in [Field::Real, Field::Complex] {
            let space = TensorSpace::new(vec![n, 7 - n], field).unwrap();
            let m = DenseTensor::random(&space, 40 + n as u64, Distribution::Gaussian);
            let nuc: f64 = svd_matrix_oracle(&m).unwrap().iter().sum();
            let sol = nuclear_bracket(&m, &cfg()).unwrap();
            let b = &sol.bracket;
            assert!(b.contains(nuc, 1e-9 * nuc), "{n} {field:?}: {b:?} vs {nuc}");
            assert!(b.relative_gap() <= 1e-3, "{n} {field:?}: gap {}", b.relative_gap());
        }
    }
}

#[test]
fn decompositions_are_exact_and_short() {
    for seed in 0..4 {
        for field in [Field::Real, Field::Complex] {
            let space = TensorSpace::new(vec![2, 3, 2], field).unwrap();
            let s = DenseTensor::random(&space, seed, Distribution::Gaussian);
            let sol = nuclear_bracket(&s, &cfg()).unwrap();
            let d = &sol.decomposition;
            assert!(d.max_deviation(&TensorTuple::single(s.clone())).unwrap() < 1e-12);
            assert!(d.len() <= caratheodory_max_atoms(&space, 1));
            assert!(d.atoms.iter().all(SimpleTensor::is_unit));
            assert!(sol.bracket.lower <= sol.bracket.upper);
            assert!(sol.bracket.lower >= s.norm() - 1e-12);
            for round in &sol.trace {
                for w in round.windows(2) {
                    assert!(w[1] <= w[0] + 1e-9 * (1.0 + w[0]), "objective rose: {w:?}");
                }
            }
        }
    }
}

#[test]
fn product_decomposition_cost_factorizes() {
    let space = TensorSpace::real(&[2, 2, 2]).unwrap();
    let s = DenseTensor::random(&space, 1, Distribution::Gaussian);
    let t = DenseTensor::random(&space, 2, Distribution::Gaussian);
    let (_, ds) = nuclear_upper(&s, &cfg()).unwrap();
    let (_, dt) = nuclear_upper(&t, &cfg()).unwrap();
    let st = s.kron(&t).unwrap();
    let p = ds.kron(&dt, &st).unwrap();
    assert!((p.cost() - ds.cost() * dt.cost()).abs() <= 1e-12 * p.cost());
    assert!(p.max_deviation(&st).unwrap() < 1e-12);
    assert!(p.upper() <= ds.upper() * dt.upper() + 1e-9);
}

#[test]
fn tuple_with_one_member_matches_nuclear() {
    let space = TensorSpace::complex(&[2, 2, 2]).unwrap();
    let s = DenseTensor::random(&space, 6, Distribution::Gaussian);
    let nuc = nuclear_bracket(&s, &cfg()).unwrap().bracket;
    for b in [Exponent::ONE, Exponent::TWO, Exponent::INF] {
        let t = tuple_beta_star(&TensorTuple::single(s.clone()), &cfg().with_beta(b)).unwrap().bracket;
        assert!((t.upper - nuc.upper).abs() <= 1e-9);
        assert!((t.lower - nuc.lower).abs() <= 1e-9);
    }
}

#[test]
fn repeated_atom_has_unit_beta_infinity_norm() {
    let space = TensorSpace::real(&[2, 3, 2]).unwrap();
    let u = SimpleTensor::unit_from_factors(space.clone(), random_factor(&space, 2)).unwrap();
    let t = TensorTuple::new(vec![u.assemble(); 3]).unwrap();
    let sol = tuple_beta_star(&t, &cfg().with_beta(Exponent::INF)).unwrap();
    assert!(sol.bracket.contains(1.0, 1e-9), "{:?}", sol.bracket);
    assert!(sol.bracket.upper <= 1.0 + 1e-9);
}

#[test]
fn tuple_brackets_are_ordered_and_exact() {
    let cases = [1.0, 2.0, f64::INFINITY]
        .into_iter()
        .flat_map(|b| [(b, Field::Real), (b, Field::Complex)])
        .chain([(3.0, Field::Real)]);
    for (b, field) in cases {
        let beta = Exponent::new(b).unwrap();
        {
            let space = TensorSpace::new(vec![2, 2, 2], field).unwrap();
            let t = TensorTuple::random(&space, 2, 77, Distribution::Gaussian).unwrap();
            let sol = tuple_beta_star(&t, &cfg().with_beta(beta)).unwrap();
            let d = &sol.decomposition;
            assert!(d.max_deviation(&t).unwrap() < 1e-12);
            assert!(d.len() <= caratheodory_max_atoms(&space, 2));
            assert!(sol.bracket.lower <= sol.bracket.upper + 1e-9);
            let Some(Witness::Dual(w)) = &sol.bracket.lower_witness else { panic!() };
            let direct = tuple_beta_star_lower(&t, w, &cfg().with_beta(beta)).unwrap();
            assert!((direct - sol.bracket.lower).abs() < 1e-12 * (1.0 + direct));
        }
    }
}

#[test]
fn duality_witness_formulas() {
    let space = TensorSpace::complex(&[2, 2, 2]).unwrap();
    let s = TensorTuple::random(&space, 3, 4, Distribution::Gaussian).unwrap();
    let u = SimpleTensor::unit_from_factors(space.clone(), random_factor(&space, 1)).unwrap();
    let a: Vec<C64> = s.members().iter().map(|m| u.inner_with(m).unwrap()).collect();

    let t = duality_witness_construct(&s, &u, Exponent::TWO).unwrap();
    for ((m, ti), ai) in s.members().iter().zip(t.members()).zip(&a) {
        let expect = u.assemble().scaled(*ai);
        assert!(ti.sub(&expect).unwrap().norm() < 1e-14);
        let ip = m.inner(ti).unwrap();
        assert!((ip.re - ai.norm_sqr()).abs() < 1e-12 && ip.im.abs() < 1e-12);
    }

    for alpha in [Exponent::ONE, Exponent::new(1.5).unwrap(), Exponent::TWO, Exponent::new(4.0).unwrap()] {
        let d = duality_witness_decomposition(&s, &u, alpha).unwrap();
        let t = d.reconstruct_tuple();
        let f = alpha.norm_c(&a);
        for ((m, ti), ai) in s.members().iter().zip(t.members()).zip(&a) {
            assert!((m.inner(ti).unwrap().norm() - ai.norm().powf(alpha.value())).abs() < 1e-10);
        }
        assert!((d.cost() - f.powf(alpha.value() - 1.0)).abs() < 1e-10);
        let ip = s.inner(&t).unwrap();
        assert!((ip.re - f * d.cost()).abs() < 1e-10 && ip.im.abs() < 1e-10);
    }

    let d = duality_witness_decomposition(&s, &u, Exponent::INF).unwrap();
    let k = (0..3).max_by(|&i, &j| a[i].norm().total_cmp(&a[j].norm()).then(j.cmp(&i))).unwrap();
    let t = d.reconstruct_tuple();
    for (i, ti) in t.members().iter().enumerate() {
        assert_eq!(ti.is_zero(), i != k);
    }
    assert!((s.inner(&t).unwrap().re - a[k].norm_sqr()).abs() < 1e-12);
}

#[test]
fn alpha_one_witness_is_phase_aligned() {
    // With S = (A, -A) the plain choice T_i = u gives <S, T> = 0; aligning
    // each T_i with the phase of <S_i, u> recovers the tight value.
    let space = TensorSpace::real(&[2, 2]).unwrap();
    let a = DenseTensor::random(&space, 2, Distribution::Gaussian);
    let s = TensorTuple::new(vec![a.clone(), a.scaled(C64::new(-1.0, 0.0))]).unwrap();
    let c = cfg().with_alpha(Exponent::ONE);
    let lo = tuple_alpha(&s, &c).unwrap();
    let Some(Witness::Simple(u)) = lo.lower_witness else { panic!() };
    let t = duality_witness_construct(&s, &u, Exponent::ONE).unwrap();
    let naive = TensorTuple::new(vec![u.assemble(), u.assemble()]).unwrap();
    assert!(s.inner(&naive).unwrap().norm() < 1e-12);
    assert!((s.inner(&t).unwrap().re - lo.lower).abs() < 1e-10);
    let sp = spectral_lower(&a, &cfg()).unwrap().value;
    assert!((lo.lower - 2.0 * sp).abs() < 1e-9);
}

#[test]
fn non_unit_direction_is_rejected() {
    let space = TensorSpace::real(&[2, 2]).unwrap();
    let s = TensorTuple::single(identity2());
    let u = SimpleTensor::basis(space, &[0, 0]).unwrap().with_scale(2.0);
    assert!(matches!(duality_witness_construct(&s, &u, Exponent::TWO), Err(Error::NotUnit(_))));
}

#[test]
fn certificates_round_trip_and_catch_tampering() {
    let space = TensorSpace::complex(&[2, 2, 2]).unwrap();
    let s = DenseTensor::random(&space, 12, Distribution::Gaussian);
    let t = TensorTuple::single(s.clone());
    let sol = nuclear_bracket(&s, &cfg()).unwrap();
    let cert = Certificate::decomposition(NormKind::Nuclear, None, &t, &sol.bracket, &sol.decomposition, "x");
    let text = crate::json::to_machine_string(&cert).unwrap();
    let back: Certificate = serde_json::from_str(&text).unwrap();
    assert_eq!(back, cert);
    assert!(check_certificate(&back, &t).unwrap().is_valid());

    let mut bad = back.clone();
    if let Scalar::Complex(ref mut z) = bad.weights[0] {
        z[0] += 1e-3;
    }
    bad.coefficients[0] = bad.weights.clone();
    assert!(!check_certificate(&bad, &t).unwrap().is_valid());

    let mut low = back.clone();
    low.upper = sol.decomposition.cost() * 0.99;
    assert!(!check_certificate(&low, &t).unwrap().is_valid());

    let mut greedy = back;
    greedy.lower = sol.bracket.upper * 1.01;
    assert!(!check_certificate(&greedy, &t).unwrap().is_valid());

    let spec = crate::spectral::spectral_bracket(&s, &cfg()).unwrap();
    let cert = Certificate::spectral(NormKind::Spectral, None, &t, &spec, "x");
    assert!(check_certificate(&cert, &t).unwrap().is_valid());
    let mut bad = cert;
    bad.upper *= 0.9;
    assert!(!check_certificate(&bad, &t).unwrap().is_valid());
}

use crate::tensor::io::Scalar;
