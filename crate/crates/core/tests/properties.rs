//! Randomized invariants of the matrix kernel and the closed-form
//! measures, driven by proptest over seeds and dimensions.

use entcost::measures::binary_entropy;
use entcost::qmat::{CMat, DimSplit, Subsystem};
use entcost::states::{random_density, random_pure};
use num_complex::Complex64;
use proptest::prelude::*;

/// Spectrum entropy recomputed from scratch, independent of the library's
/// own entropy helpers.
fn entropy_oracle(mat: &CMat) -> f64 {
    mat.eig_hermitian()
        .unwrap()
        .values
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.log2())
        .sum()
}

proptest! {
    #[test]
    fn binary_entropy_bounded_and_symmetric(x in 0.0f64..=1.0) {
        let h = binary_entropy(x).unwrap().value();
        prop_assert!((0.0..=1.0).contains(&h), "H2({x}) = {h}");
        let mirrored = binary_entropy(1.0 - x).unwrap().value();
        prop_assert!((h - mirrored).abs() < 1e-12);
    }

    #[test]
    fn partial_transpose_is_an_involution(
        seed in 0u64..1_000,
        da in 2usize..=3,
        db in 2usize..=3,
        on_a in any::<bool>(),
    ) {
        let split = DimSplit::new(da, db).unwrap();
        let rho = random_density(split, da * db, seed).unwrap();
        let side = if on_a { Subsystem::A } else { Subsystem::B };
        let twice = rho
            .mat()
            .partial_transpose(split, side)
            .unwrap()
            .partial_transpose(split, side)
            .unwrap();
        prop_assert!(twice.max_abs_diff(rho.mat()) < 1e-14);
    }

    #[test]
    fn partial_trace_preserves_trace(seed in 0u64..1_000, keep_a in any::<bool>()) {
        let split = DimSplit::new(3, 4).unwrap();
        let rho = random_density(split, 5, seed).unwrap();
        let keep = if keep_a { Subsystem::A } else { Subsystem::B };
        let reduced = rho.mat().partial_trace(split, keep).unwrap();
        prop_assert!((reduced.trace() - rho.mat().trace()).norm() < 1e-10);
    }

    #[test]
    fn eigendecomposition_reconstructs_hermitian_input(
        seed in 0u64..500,
        dim in 2usize..=16,
    ) {
        // Shifted PSD matrix: Hermitian with both signs in the spectrum.
        let rho = random_density(DimSplit::new(dim, 1).unwrap(), dim, seed).unwrap();
        let shift = CMat::identity(dim).scale(Complex64::new(-1.0 / dim as f64, 0.0));
        let h = rho.mat() + &shift;
        let eig = h.eig_hermitian().unwrap();
        let back = eig.reassemble(|x| x);
        prop_assert!(back.max_abs_diff(&h) < 1e-8);
        let gram = eig.vectors.dagger().matmul(&eig.vectors);
        prop_assert!(gram.max_abs_diff(&CMat::identity(dim)) < 1e-9);
    }

    #[test]
    fn reduced_entropies_agree_across_the_split(
        seed in 0u64..500,
        da in 2usize..=4,
        db in 2usize..=4,
    ) {
        let psi = random_pure(DimSplit::new(da, db).unwrap(), seed);
        let ea = entropy_oracle(&psi.reduced(Subsystem::A));
        let eb = entropy_oracle(&psi.reduced(Subsystem::B));
        prop_assert!((ea - eb).abs() < 1e-9, "A-side {ea} vs B-side {eb}");
    }

    #[test]
    fn kron_trace_factorizes(seed_a in 0u64..500, seed_b in 0u64..500) {
        let split = DimSplit::new(2, 2).unwrap();
        let a = random_density(split, 4, seed_a).unwrap();
        let b = random_density(split, 4, seed_b).unwrap();
        let joint = a.mat().kron(b.mat()).unwrap();
        let want = a.mat().trace() * b.mat().trace();
        prop_assert!((joint.trace() - want).norm() < 1e-10);
    }
}
