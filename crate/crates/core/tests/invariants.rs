//! Randomized invariants over small multiplex networks.

use mgsp::apps::adjusted_rand_index;
use mgsp::io::{read_signal, write_signal};
use mgsp::properties::flattening_gap;
use mgsp::signal::apply_tensor_with;
use mgsp::spectral::{hosvd, joint_spectrum, mgft_joint, mgst, TransformMode};
use mgsp::tensor::contract_tensors_with;
use mgsp::{
    flatten, flatten_signal, gen_er_multiplex, laplacian, shift, unflatten_signal, Convention, Exec, MlnSignal,
    RepresentingTensor,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn network() -> impl Strategy<Value = RepresentingTensor> {
    (0.0..=1.0f64, 0.0..=1.0f64, 1usize..4, 2usize..6, any::<u64>(), any::<bool>()).prop_map(
        |(p, q, m, n, seed, lap)| {
            let net = gen_er_multiplex(p, q, m, n, seed).unwrap();
            if lap {
                laplacian(&net)
            } else {
                mgsp::network::adjacency(&net)
            }
        },
    )
}

fn signal_for(f: &RepresentingTensor, values: &[f64]) -> MlnSignal {
    let (m, n) = f.dims();
    MlnSignal::new(DMatrix::from_fn(m, n, |a, i| values[(a * n + i) % values.len()])).unwrap()
}

fn samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, 1..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shift_is_linear(f in network(), x in samples(), y in samples(), a in -3.0..3.0f64) {
        let (sx, sy) = (signal_for(&f, &x), signal_for(&f, &y));
        let combined = MlnSignal::new(sx.matrix() * a + sy.matrix()).unwrap();
        let lhs = shift(&f, &combined).unwrap();
        let rhs = shift(&f, &sx).unwrap().into_matrix() * a + shift(&f, &sy).unwrap().into_matrix();
        let scale = 1.0 + rhs.amax();
        prop_assert!((lhs.matrix() - rhs).amax() <= 1e-12 * scale);
    }

    #[test]
    fn flattenings_round_trip(f in network(), x in samples()) {
        let s = signal_for(&f, &x);
        let (m, n) = f.dims();
        for c in [Convention::LayerWise, Convention::EntityWise] {
            let supra = flatten(f.tensor(), c).unwrap();
            prop_assert_eq!(&supra.unflatten().unwrap(), f.tensor());
            let v = flatten_signal(&s, c);
            prop_assert_eq!(&unflatten_signal(&v, m, n, c).unwrap(), &s);
            // the supra-matrix acts on the flattened signal like the tensor does
            let shifted = flatten_signal(&shift(&f, &s).unwrap(), c);
            prop_assert!((&supra.data * v - shifted).amax() <= 1e-10 * (1.0 + f.tensor().max_abs()));
        }
        prop_assert!(flattening_gap(&f).unwrap() < 1e-9);
    }

    #[test]
    fn contraction_composes_shifts(f in network(), x in samples()) {
        let s = signal_for(&f, &x);
        let ff = contract_tensors_with(Exec::Sequential, f.tensor(), f.tensor()).unwrap();
        let once = apply_tensor_with(Exec::Sequential, &ff, &s).unwrap();
        let twice = shift(&f, &shift(&f, &s).unwrap()).unwrap();
        prop_assert!((once.matrix() - twice.matrix()).amax() <= 1e-9 * (1.0 + twice.matrix().amax()));
    }

    #[test]
    fn sequential_and_parallel_are_identical(f in network(), x in samples()) {
        let s = signal_for(&f, &x);
        let a = contract_tensors_with(Exec::Sequential, f.tensor(), f.tensor()).unwrap();
        let b = contract_tensors_with(Exec::Parallel, f.tensor(), f.tensor()).unwrap();
        prop_assert_eq!(a.data(), b.data());
        let a = apply_tensor_with(Exec::Sequential, f.tensor(), &s).unwrap();
        let b = apply_tensor_with(Exec::Parallel, f.tensor(), &s).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn orthonormal_transforms_preserve_energy(f in network(), x in samples()) {
        let s = signal_for(&f, &x);
        let energy = s.matrix().norm();
        let joint = mgft_joint(&joint_spectrum(&f).unwrap(), &s).unwrap();
        prop_assert!((joint.norm() - energy).abs() <= 1e-10 * (1.0 + energy));
        let spec = hosvd(&f).unwrap();
        for mode in [TransformMode::Layer, TransformMode::Entity, TransformMode::Joint] {
            let c = mgst(&spec, &s, mode).unwrap();
            prop_assert!((c.norm() - energy).abs() <= 1e-10 * (1.0 + energy));
        }
    }

    #[test]
    fn ari_ignores_label_names(labels in prop::collection::vec(0usize..4, 2..30), shift_by in 1usize..5) {
        let renamed: Vec<usize> = labels.iter().map(|l| (l + shift_by) % 4 + 10).collect();
        let ari = adjusted_rand_index(&labels, &renamed).unwrap();
        prop_assert!((ari - 1.0).abs() < 1e-12);
        let other: Vec<usize> = labels.iter().enumerate().map(|(i, l)| (l + i) % 3).collect();
        let ab = adjusted_rand_index(&labels, &other).unwrap();
        let ba = adjusted_rand_index(&other, &labels).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
    }

    #[test]
    fn signal_files_round_trip_exactly(f in network(), x in samples()) {
        let s = signal_for(&f, &x);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        write_signal(&path, &s).unwrap();
        prop_assert_eq!(read_signal(&path).unwrap(), s);
    }
}
