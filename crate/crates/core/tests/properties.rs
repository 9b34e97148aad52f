use num_complex::Complex64;
use proptest::prelude::*;

use cklms::dictionary::{novelty_admit, rkhs_distance_sq, Admission, Dictionary, FeatureSpace, NoveltyParams};
use cklms::filters::{Algorithm, Filter, FilterConfig};
use cklms::harness::{default_ncklms1, default_ncklms2, default_nclms, default_wlnclms};
use cklms::kernels::{gram, ComplexVector, KernelSpec};

fn complex() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn vector(dim: usize) -> impl Strategy<Value = ComplexVector> {
    prop::collection::vec(complex(), dim).prop_map(|v| ComplexVector::new(v).unwrap())
}

fn real_vector(dim: usize) -> impl Strategy<Value = ComplexVector> {
    prop::collection::vec(-2.0..2.0f64, dim).prop_map(|v| ComplexVector::from_real(&v).unwrap())
}

fn complex_kernel() -> impl Strategy<Value = KernelSpec> {
    prop_oneof![(0.5..8.0f64).prop_map(|sigma| KernelSpec::ComplexGaussian { sigma }), Just(KernelSpec::ComplexLinear)]
}

fn stream(dim: usize, len: usize) -> impl Strategy<Value = Vec<(ComplexVector, Complex64)>> {
    prop::collection::vec((vector(dim), complex()), len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn complex_kernels_are_hermitian(spec in complex_kernel(), z in vector(3), w in vector(3)) {
        let a = spec.eval(&z, &w).unwrap();
        let b = spec.eval(&w, &z).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1.0));
        let diag = spec.eval(&z, &z).unwrap();
        prop_assert!(diag.im.abs() <= 1e-12 * diag.norm().max(1.0));
        prop_assert!(diag.re >= 0.0);
    }

    #[test]
    fn real_kernels_are_symmetric(sigma in 0.5..8.0f64, degree in 1u32..5, x in real_vector(4), y in real_vector(4)) {
        for spec in [KernelSpec::RealGaussian { sigma }, KernelSpec::Polynomial { degree }] {
            prop_assert_eq!(spec.eval(&x, &y).unwrap(), spec.eval(&y, &x).unwrap());
        }
    }

    #[test]
    fn distances_are_nonnegative_and_vanish_on_the_diagonal(z in vector(3), w in vector(3), sigma in 1.0..8.0f64) {
        let cases = [
            (FeatureSpace::ComplexifiedReal, KernelSpec::RealGaussian { sigma }),
            (FeatureSpace::ComplexifiedReal, KernelSpec::Polynomial { degree: 2 }),
            (FeatureSpace::PureComplex, KernelSpec::ComplexGaussian { sigma }),
            (FeatureSpace::PureComplex, KernelSpec::ComplexLinear),
        ];
        for (space, spec) in cases {
            prop_assert!(rkhs_distance_sq(&z, &w, space, &spec).unwrap() >= 0.0);
            let self_dist = rkhs_distance_sq(&z, &z, space, &spec).unwrap();
            let scale = spec.eval(&z, &z).map(|v| v.norm()).unwrap_or(1.0).max(1.0);
            prop_assert!(self_dist <= 1e-9 * scale);
        }
    }

    #[test]
    fn gram_is_positive_semidefinite(points in prop::collection::vec(vector(2), 2..12), sigma in 1.0..6.0f64) {
        let g = gram(&points, &KernelSpec::ComplexGaussian { sigma }).unwrap();
        let scale = (0..g.size()).map(|i| g.get(i, i).norm()).fold(1.0, f64::max);
        prop_assert!(g.hermitian_deviation() <= 1e-12 * scale);
        prop_assert!(g.min_eigenvalue() >= -1e-8 * scale);
    }

    #[test]
    fn novelty_rejects_known_centers(z in vector(3), err in 0.0..5.0f64) {
        let spec = KernelSpec::RealGaussian { sigma: 5.0 };
        let mut dict = Dictionary::new(FeatureSpace::ComplexifiedReal, spec).unwrap();
        let p = NoveltyParams::new(0.15, 0.2).unwrap();
        let first = novelty_admit(&dict, &z, err, &p).unwrap();
        prop_assert_eq!(first, Admission::Admit);
        dict.push(z.clone(), Complex64::new(1.0, 0.0)).unwrap();
        prop_assert_eq!(novelty_admit(&dict, &z, err, &p).unwrap(), Admission::RejectNear);
    }

    #[test]
    fn dictionary_text_roundtrip(centers in prop::collection::vec((vector(2), complex()), 0..8), sigma in 0.5..8.0f64) {
        let mut dict = Dictionary::new(FeatureSpace::PureComplex, KernelSpec::ComplexGaussian { sigma }).unwrap();
        for (z, a) in centers {
            dict.push(z, a).unwrap();
        }
        let back = Dictionary::from_text(&dict.to_text()).unwrap();
        prop_assert_eq!(back.centers(), dict.centers());
        prop_assert_eq!(back.coeffs(), dict.coeffs());
        prop_assert_eq!(back.kernel(), dict.kernel());
    }

    #[test]
    fn filters_are_deterministic_and_bounded_by_one_step(data in stream(3, 40)) {
        for cfg in [default_ncklms1(), default_ncklms2(), default_nclms(), default_wlnclms()] {
            let run = || {
                let mut f = Filter::new(&cfg, 3).unwrap();
                data.iter().map(|(z, d)| f.step(z, *d).unwrap()).collect::<Vec<_>>()
            };
            let a = run();
            let b = run();
            prop_assert_eq!(&a, &b);
            for (i, r) in a.iter().enumerate() {
                prop_assert!(r.dict_size <= i + 1);
                prop_assert_eq!(r.error, data[i].1 - r.prediction);
            }
        }
    }

    #[test]
    fn predict_matches_the_next_step(data in stream(2, 20), probe in vector(2), d in complex()) {
        let cfg = FilterConfig::kernel(Algorithm::Ncklms2, 0.25, KernelSpec::ComplexGaussian { sigma: 5.0 }, None);
        let mut f = Filter::new(&cfg, 2).unwrap();
        for (z, target) in &data {
            f.step(z, *target).unwrap();
        }
        let predicted = f.predict(&probe).unwrap();
        prop_assert_eq!(f.step(&probe, d).unwrap().prediction, predicted);
    }
}
