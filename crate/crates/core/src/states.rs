//! Bipartite pure states, density matrices, subspace bases and the seeded
//! random-state generators used by the property suites.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{CMat, DimSplit, Subsystem};
use crate::rng::{gaussian_vector, stream_rng};

/// Tolerance for state invariants (norm, trace, Hermiticity).
pub const STATE_TOL: f64 = 1e-10;

/// Normalized vector in a bipartite Hilbert space, amplitudes in the
/// computational product basis `|i>_A |k>_B -> index i*db + k`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    vec: Vec<Complex64>,
    split: DimSplit,
}

impl PureState {
    /// Wraps an already-normalized amplitude vector.
    pub fn new(vec: Vec<Complex64>, split: DimSplit) -> Result<Self> {
        if vec.len() != split.total() {
            return Err(Error::Dimension(format!(
                "vector length {} does not match split {}",
                vec.len(),
                split
            )));
        }
        let norm2: f64 = vec.iter().map(|z| z.norm_sqr()).sum();
        if (norm2.sqrt() - 1.0).abs() > STATE_TOL {
            return Err(Error::Invariant(format!(
                "state vector norm {} is not 1",
                norm2.sqrt()
            )));
        }
        Ok(Self { vec, split })
    }

    /// Normalizes the given amplitudes; rejects the zero vector.
    pub fn from_unnormalized(vec: Vec<Complex64>, split: DimSplit) -> Result<Self> {
        let norm2: f64 = vec.iter().map(|z| z.norm_sqr()).sum();
        if norm2 <= 1e-24 {
            return Err(Error::Domain("cannot normalize the zero vector".into()));
        }
        let inv = 1.0 / norm2.sqrt();
        Self::new(vec.into_iter().map(|z| z * inv).collect(), split)
    }

    pub fn vec(&self) -> &[Complex64] {
        &self.vec
    }

    pub fn split(&self) -> DimSplit {
        self.split
    }

    pub fn dim(&self) -> usize {
        self.vec.len()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.vec
            .iter()
            .zip(&other.vec)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// The projector `|psi><psi|`.
    pub fn projector(&self) -> CMat {
        CMat::outer(&self.vec, &self.vec)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            mat: self.projector(),
            split: self.split,
        }
    }

    /// Reduced density matrix of the kept factor.
    pub fn reduced(&self, keep: Subsystem) -> CMat {
        self.projector()
            .partial_trace(self.split, keep)
            .expect("projector dimension matches the state's own split")
    }

    pub fn to_json(&self) -> StateJson {
        StateJson {
            dims: [self.split.da, self.split.db],
            re: vec![self.vec.iter().map(|z| z.re).collect()],
            im: vec![self.vec.iter().map(|z| z.im).collect()],
        }
    }

    pub fn from_json(doc: &StateJson) -> Result<Self> {
        let split = DimSplit::new(doc.dims[0], doc.dims[1])?;
        if doc.re.len() != 1 || doc.im.len() != 1 {
            return Err(Error::Parse(
                "pure state document must hold exactly one row".into(),
            ));
        }
        if doc.re[0].len() != split.total() || doc.im[0].len() != split.total() {
            return Err(Error::Parse(format!(
                "row length does not match dims {}x{}",
                split.da, split.db
            )));
        }
        let vec: Vec<Complex64> = doc.re[0]
            .iter()
            .zip(&doc.im[0])
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        Self::new(vec, split)
    }
}

/// Hermitian, unit-trace, PSD operator on a bipartite space.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    mat: CMat,
    split: DimSplit,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity before wrapping.
    pub fn new(mat: CMat, split: DimSplit) -> Result<Self> {
        if !mat.is_square() || mat.rows() != split.total() {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, split {} requires dimension {}",
                mat.rows(),
                mat.cols(),
                split,
                split.total()
            )));
        }
        let dev = mat.herm_deviation();
        if dev > STATE_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::Invariant(format!("trace {} is not 1", tr.re)));
        }
        let eig = mat.eig_hermitian()?;
        if let Some(&min) = eig.values.first() {
            if min < -STATE_TOL {
                return Err(Error::NotPsd(min));
            }
        }
        Ok(Self { mat, split })
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn split(&self) -> DimSplit {
        self.split
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    /// Reduced density matrix of the kept factor.
    pub fn reduced(&self, keep: Subsystem) -> CMat {
        self.mat
            .partial_trace(self.split, keep)
            .expect("density matrix dimension matches its own split")
    }

    pub fn to_json(&self) -> StateJson {
        let n = self.mat.rows();
        let row = |i: usize, f: fn(Complex64) -> f64| -> Vec<f64> {
            (0..n).map(|j| f(self.mat.get(i, j))).collect()
        };
        StateJson {
            dims: [self.split.da, self.split.db],
            re: (0..n).map(|i| row(i, |z| z.re)).collect(),
            im: (0..n).map(|i| row(i, |z| z.im)).collect(),
        }
    }

    pub fn from_json(doc: &StateJson) -> Result<Self> {
        let split = DimSplit::new(doc.dims[0], doc.dims[1])?;
        let n = split.total();
        if doc.re.len() != n || doc.im.len() != n {
            return Err(Error::Parse(format!(
                "expected {n} rows for dims {}x{}",
                split.da, split.db
            )));
        }
        for rows in [&doc.re, &doc.im] {
            if rows.iter().any(|r| r.len() != n) {
                return Err(Error::Parse(format!("expected {n} columns in every row")));
            }
        }
        let mat = CMat::from_fn(n, n, |i, j| Complex64::new(doc.re[i][j], doc.im[i][j]));
        Self::new(mat, split)
    }
}

/// JSON wire format for states: `{"dims": [dA, dB], "re": [[..]], "im": [[..]]}`
/// with row-major nested arrays. Density matrices use `dA*dB` rows, pure
/// states a single row of amplitudes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateJson {
    pub dims: [usize; 2],
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// Ordered orthonormal vectors spanning a subspace of a bipartite space.
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    ambient: DimSplit,
    vectors: Vec<PureState>,
}

impl SubspaceBasis {
    /// Checks pairwise orthonormality within [`STATE_TOL`].
    pub fn new(ambient: DimSplit, vectors: Vec<PureState>) -> Result<Self> {
        if vectors.is_empty() || vectors.len() > ambient.total() {
            return Err(Error::Dimension(format!(
                "basis size {} invalid for ambient dimension {}",
                vectors.len(),
                ambient.total()
            )));
        }
        for v in &vectors {
            if v.split() != ambient {
                return Err(Error::Dimension(
                    "basis vector split differs from ambient split".into(),
                ));
            }
        }
        for i in 0..vectors.len() {
            for j in i..vectors.len() {
                let overlap = vectors[i].inner(&vectors[j]);
                let want = if i == j { 1.0 } else { 0.0 };
                if (overlap - Complex64::new(want, 0.0)).norm() > STATE_TOL {
                    return Err(Error::Invariant(format!(
                        "basis vectors {i} and {j} are not orthonormal (<i|j> = {overlap})"
                    )));
                }
            }
        }
        Ok(Self { ambient, vectors })
    }

    pub fn ambient(&self) -> DimSplit {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, i: usize) -> &PureState {
        &self.vectors[i]
    }

    pub fn vectors(&self) -> &[PureState] {
        &self.vectors
    }
}

/// The four Bell states of a two-qubit system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

/// `|Phi+-> = (|00> +- |11>)/sqrt(2)`, `|Psi+-> = (|01> +- |10>)/sqrt(2)`.
pub fn bell_state(kind: BellKind) -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut vec = vec![Complex64::ZERO; 4];
    let (i, j, sign) = match kind {
        BellKind::PhiPlus => (0, 3, 1.0),
        BellKind::PhiMinus => (0, 3, -1.0),
        BellKind::PsiPlus => (1, 2, 1.0),
        BellKind::PsiMinus => (1, 2, -1.0),
    };
    vec[i] = Complex64::new(s, 0.0);
    vec[j] = Complex64::new(sign * s, 0.0);
    PureState::new(vec, DimSplit { da: 2, db: 2 }).expect("Bell states are normalized")
}

/// Mixing weight of the two-component Bell mixture, restricted to [0, 1/2].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellMixParam(f64);

impl BellMixParam {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&p) {
            return Err(Error::Domain(format!(
                "Bell mixture weight must lie in [0, 1/2], got {p}"
            )));
        }
        Ok(Self(p))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// The rank-2 mixture `(1-p)|Phi+><Phi+| + p|Phi-><Phi-|`, supported on
/// span{|00>, |11>}.
pub fn bell_mix(param: BellMixParam) -> DensityMatrix {
    let p = param.value();
    let plus = bell_state(BellKind::PhiPlus).projector();
    let minus = bell_state(BellKind::PhiMinus).projector();
    let mat = &plus.scale(Complex64::new(1.0 - p, 0.0)) + &minus.scale(Complex64::new(p, 0.0));
    DensityMatrix::new(mat, DimSplit { da: 2, db: 2 })
        .expect("Bell mixtures are valid density matrices")
}

/// Reference subspace bases:
///
/// * `1`: span{|00>, |11>} in 2x2 — the support of every two-component Bell
///   mixture.
/// * `2`: the antisymmetric subspace of 3x3, spanned by
///   (|12>-|21>)/sqrt(2), (|20>-|02>)/sqrt(2), (|01>-|10>)/sqrt(2).
/// * `3`: the qubit-qutrit pair (|02>-sqrt(2)|10>)/sqrt(3),
///   (sqrt(2)|01>-|12>)/sqrt(3); every vector in the span has reduced
///   spectrum {1/3, 2/3}.
/// * `4`: three vectors in 3x6 with constant reduced spectrum
///   {1/4, 1/4, 1/2}: (|12>+|21>+sqrt(2)|03>)/2, (|20>+|02>+sqrt(2)|14>)/2,
///   (|01>+|10>+sqrt(2)|25>)/2. The C^6 factor uses computational ordering
///   |0>..|5>.
pub fn subspace_basis(id: u8) -> Result<SubspaceBasis> {
    let make = |split: DimSplit, terms: &[&[(usize, usize, f64)]], norm: f64| -> SubspaceBasis {
        let vectors = terms
            .iter()
            .map(|entries| {
                let mut vec = vec![Complex64::ZERO; split.total()];
                for &(i, k, amp) in *entries {
                    vec[i * split.db + k] = Complex64::new(amp * norm, 0.0);
                }
                PureState::new(vec, split).expect("reference vectors are normalized")
            })
            .collect();
        SubspaceBasis::new(split, vectors).expect("reference bases are orthonormal")
    };

    let r2 = std::f64::consts::SQRT_2;
    match id {
        1 => Ok(make(
            DimSplit { da: 2, db: 2 },
            &[&[(0, 0, 1.0)], &[(1, 1, 1.0)]],
            1.0,
        )),
        2 => Ok(make(
            DimSplit { da: 3, db: 3 },
            &[
                &[(1, 2, 1.0), (2, 1, -1.0)],
                &[(2, 0, 1.0), (0, 2, -1.0)],
                &[(0, 1, 1.0), (1, 0, -1.0)],
            ],
            1.0 / r2,
        )),
        3 => Ok(make(
            DimSplit { da: 2, db: 3 },
            &[&[(0, 2, 1.0), (1, 0, -r2)], &[(0, 1, r2), (1, 2, -1.0)]],
            1.0 / 3.0_f64.sqrt(),
        )),
        4 => Ok(make(
            DimSplit { da: 3, db: 6 },
            &[
                &[(1, 2, 1.0), (2, 1, 1.0), (0, 3, r2)],
                &[(2, 0, 1.0), (0, 2, 1.0), (1, 4, r2)],
                &[(0, 1, 1.0), (1, 0, 1.0), (2, 5, r2)],
            ],
            0.5,
        )),
        other => Err(Error::Domain(format!(
            "unknown subspace id {other}, expected 1..=4"
        ))),
    }
}

/// Normalized linear combination `sum_a c_a |a>` of the basis vectors,
/// expressed in the ambient space.
pub fn embed(coeffs: &[Complex64], basis: &SubspaceBasis) -> Result<PureState> {
    if coeffs.len() != basis.len() {
        return Err(Error::Dimension(format!(
            "{} coefficients for a basis of size {}",
            coeffs.len(),
            basis.len()
        )));
    }
    let dim = basis.ambient().total();
    let mut vec = vec![Complex64::ZERO; dim];
    for (c, v) in coeffs.iter().zip(basis.vectors()) {
        for (out, amp) in vec.iter_mut().zip(v.vec()) {
            *out += c * amp;
        }
    }
    PureState::from_unnormalized(vec, basis.ambient())
}

/// Haar-direction random pure state: independent standard complex Gaussian
/// amplitudes, normalized. Deterministic in `seed` (stream 0).
pub fn random_pure(split: DimSplit, seed: u64) -> PureState {
    let mut rng = stream_rng(seed, 0);
    let vec = gaussian_vector(&mut rng, split.total());
    PureState::from_unnormalized(vec, split).expect("Gaussian vector is nonzero")
}

/// Random density matrix of rank at most `rank`: a normalized sum of `rank`
/// Gaussian outer products. Deterministic in `seed` (stream 0).
pub fn random_density(split: DimSplit, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let dim = split.total();
    if rank == 0 || rank > dim {
        return Err(Error::Domain(format!(
            "rank {rank} invalid for dimension {dim}"
        )));
    }
    let mut rng = stream_rng(seed, 0);
    let mut mat = CMat::zeros(dim, dim);
    for _ in 0..rank {
        let g = gaussian_vector(&mut rng, dim);
        mat = &mat + &CMat::outer(&g, &g);
    }
    let tr = mat.trace().re;
    DensityMatrix::new(mat.scale(Complex64::new(1.0 / tr, 0.0)), split)
}
