//! Closed-form entanglement measures: entropies, two-qubit concurrence and
//! entanglement of formation, the cost and distillation rates of
//! two-component Bell mixtures, and the constant-entanglement subspace check.
//!
//! All values are in ebits (logarithms base 2); `0*log(0)` is taken as 0 and
//! eigenvalues in `[-1e-10, 0)` are clipped before any logarithm.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmat::{CMat, Subsystem};
use crate::rng::{gaussian_vector, stream_rng};
use crate::states::{embed, BellMixParam, DensityMatrix, PureState, SubspaceBasis};

/// Entanglement value in ebits. Finite and nonnegative; roundoff negatives
/// above `-1e-12` clip to zero.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Ebits(f64);

impl Ebits {
    pub fn new(value: f64) -> Self {
        debug_assert!(value.is_finite(), "ebit value must be finite");
        Self(if value < 0.0 && value > -1e-12 {
            0.0
        } else {
            value
        })
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for Ebits {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Shannon entropy of `(x, 1-x)` in bits.
pub fn binary_entropy(x: f64) -> Result<Ebits> {
    if !(-1e-12..=1.0 + 1e-12).contains(&x) {
        return Err(Error::Domain(format!(
            "binary entropy argument must lie in [0, 1], got {x}"
        )));
    }
    let x = x.clamp(0.0, 1.0);
    Ok(Ebits::new(xlog2(x) + xlog2(1.0 - x)))
}

/// `-x log2 x` with the `0 log 0 = 0` convention.
pub(crate) fn xlog2(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.log2()
    } else {
        0.0
    }
}

/// Entropy of a probability spectrum; entries at or below zero contribute 0.
pub(crate) fn entropy_of_spectrum(spectrum: &[f64]) -> f64 {
    spectrum.iter().map(|&x| xlog2(x)).sum()
}

pub(crate) fn vn_entropy_mat(mat: &CMat) -> Result<f64> {
    let eig = mat.eig_hermitian()?;
    Ok(entropy_of_spectrum(&eig.values))
}

/// Von Neumann entropy `-tr(rho log2 rho)`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<Ebits> {
    Ok(Ebits::new(vn_entropy_mat(rho.mat())?))
}

/// Entropy of entanglement of a bipartite pure state: the entropy of either
/// reduced density matrix.
pub fn entropy_of_entanglement(psi: &PureState) -> Result<Ebits> {
    Ok(Ebits::new(vn_entropy_mat(&psi.reduced(Subsystem::A))?))
}

/// Two-qubit concurrence `C = max(0, l1 - l2 - l3 - l4)` where the `l_i` are
/// the decreasing square roots of the spectrum of `rho * rho_tilde`,
/// `rho_tilde = (Y(x)Y) rho* (Y(x)Y)`.
///
/// The `l_i` equal the singular values of `B = sqrt(rho) * sqrt(rho_tilde)`
/// (`B B†` is the Hermitian form `sqrt(rho) rho_tilde sqrt(rho)`), read off
/// directly as the nonnegative eigenvalues of the Hermitian embedding
/// `[[0, B], [B†, 0]]`. That avoids taking square roots of near-zero
/// eigenvalues, which would halve the attainable precision.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    let split = rho.split();
    if (split.da, split.db) != (2, 2) {
        return Err(Error::Dimension(format!(
            "concurrence is defined for 2x2 splits, got {split}"
        )));
    }
    let yy = spin_flip_operator();
    let sqrt_rho = rho.mat().psd_sqrt()?;
    // sqrt(rho_tilde) = (Y(x)Y) conj(sqrt(rho)) (Y(x)Y).
    let sqrt_rho_tilde = yy.matmul(&sqrt_rho.conj()).matmul(&yy);
    let b = sqrt_rho.matmul(&sqrt_rho_tilde);
    let mut embedding = CMat::zeros(8, 8);
    for i in 0..4 {
        for j in 0..4 {
            embedding.set(i, 4 + j, b.get(i, j));
            embedding.set(4 + j, i, b.get(i, j).conj());
        }
    }
    let eig = embedding.eig_hermitian()?;
    // Spectrum is symmetric; the top four entries are the singular values
    // in ascending order.
    let l = &eig.values;
    let c = l[7] - l[6] - l[5] - l[4];
    Ok(c.clamp(0.0, 1.0))
}

/// `Y (x) Y` where `Y` is the single-qubit flip `[[0, -i], [i, 0]]`.
fn spin_flip_operator() -> CMat {
    let mut yy = CMat::zeros(4, 4);
    let one = Complex64::ONE;
    yy.set(0, 3, -one);
    yy.set(1, 2, one);
    yy.set(2, 1, one);
    yy.set(3, 0, -one);
    yy
}

/// Closed-form two-qubit entanglement of formation
/// `E_f = H2((1 + sqrt(1 - C^2))/2)`.
pub fn ef_two_qubit(rho: &DensityMatrix) -> Result<Ebits> {
    let c = concurrence(rho)?;
    binary_entropy(0.5 * (1.0 + (1.0 - c * c).sqrt()))
}

/// Entanglement cost of the two-component Bell mixture:
/// `H2(1/2 + sqrt(p(1-p)))`.
pub fn ec_bell_mix(param: BellMixParam) -> Ebits {
    let p = param.value();
    binary_entropy(0.5 + (p * (1.0 - p)).sqrt()).expect("argument lies in [1/2, 1]")
}

/// Distillable entanglement of the two-component Bell mixture (hashing
/// rate): `1 - H2(p)`, clipped at zero.
pub fn ed_hashing(param: BellMixParam) -> Ebits {
    let h = binary_entropy(param.value()).expect("parameter lies in [0, 1/2]");
    Ebits::new((1.0 - h.value()).max(0.0))
}

/// Outcome of sampling the reduced spectra across a subspace.
#[derive(Clone, Debug)]
pub struct ConstantEntanglementCheck {
    /// True when every sampled reduced spectrum agrees within `1e-8`.
    pub is_constant: bool,
    /// Ascending reduced spectrum of the first sample.
    pub spectrum: Vec<f64>,
    /// Entropy of that spectrum.
    pub value: Ebits,
}

/// Draws `samples` random coefficient vectors in the subspace, reduces each
/// embedded state onto the A factor and compares the sorted spectra.
pub fn constant_entanglement_check(
    basis: &SubspaceBasis,
    samples: usize,
    seed: u64,
) -> Result<ConstantEntanglementCheck> {
    if samples < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 samples, got {samples}"
        )));
    }
    let mut rng = stream_rng(seed, 0);
    let mut first: Option<Vec<f64>> = None;
    let mut is_constant = true;
    for _ in 0..samples {
        let coeffs = gaussian_vector(&mut rng, basis.len());
        let psi = embed(&coeffs, basis)?;
        let spectrum = psi.reduced(Subsystem::A).eig_hermitian()?.values;
        match &first {
            None => first = Some(spectrum),
            Some(reference) => {
                let dev = reference
                    .iter()
                    .zip(&spectrum)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                if dev > 1e-8 {
                    is_constant = false;
                }
            }
        }
    }
    let spectrum = first.expect("samples >= 2");
    let value = Ebits::new(entropy_of_spectrum(&spectrum));
    Ok(ConstantEntanglementCheck {
        is_constant,
        spectrum,
        value,
    })
}

/// Strong-subadditivity functional of a tripartite pure state:
/// `S(rho_12) + S(rho_23) - S(rho_123) - S(rho_2)`, which is nonnegative up
/// to numerical error for every input.
pub fn ssa_check(amplitudes: &[Complex64], dims: (usize, usize, usize)) -> Result<f64> {
    let (d1, d2, d3) = dims;
    if d1 == 0 || d2 == 0 || d3 == 0 || amplitudes.len() != d1 * d2 * d3 {
        return Err(Error::Dimension(format!(
            "amplitude vector of length {} does not match dims {}x{}x{}",
            amplitudes.len(),
            d1,
            d2,
            d3
        )));
    }
    let norm2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
    if (norm2.sqrt() - 1.0).abs() > 1e-9 {
        return Err(Error::Invariant(format!(
            "tripartite state norm {} is not 1",
            norm2.sqrt()
        )));
    }
    let rho = CMat::outer(amplitudes, amplitudes);
    let split_12_3 = crate::qmat::DimSplit::new(d1 * d2, d3)?;
    let split_1_23 = crate::qmat::DimSplit::new(d1, d2 * d3)?;
    let split_1_2 = crate::qmat::DimSplit::new(d1, d2)?;

    let rho_12 = rho.partial_trace(split_12_3, Subsystem::A)?;
    let rho_23 = rho.partial_trace(split_1_23, Subsystem::B)?;
    let rho_2 = rho_12.partial_trace(split_1_2, Subsystem::B)?;

    let s_123 = vn_entropy_mat(&rho)?;
    let s_12 = vn_entropy_mat(&rho_12)?;
    let s_23 = vn_entropy_mat(&rho_23)?;
    let s_2 = vn_entropy_mat(&rho_2)?;
    Ok(s_12 + s_23 - s_123 - s_2)
}
