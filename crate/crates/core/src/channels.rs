//! Quantum channels in Kraus form, the trace-out channel induced by a
//! subspace, Choi matrices, PPT tests and entanglement-breaking
//! certification.
//!
//! A channel is entanglement breaking exactly when its Choi matrix is
//! separable. The decision procedure certifies separability constructively:
//! a negative partial-transpose eigenvalue refutes it, the PPT criterion
//! decides it in the 2x2 and 2x3 exact regimes, and the normalized
//! symmetric projector on 3x3 is decomposed explicitly through the qutrit
//! MUB 2-design. Everything else is reported as indeterminate.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmat::{CMat, DimSplit, Subsystem};
use crate::states::{DensityMatrix, PureState, SubspaceBasis};

/// Choi eigenvalues below this are dropped during Kraus extraction.
pub const KRAUS_CLIP: f64 = 1e-10;

/// Partial-transpose eigenvalues below the negative of this refute
/// separability.
pub const PPT_TOL: f64 = 1e-9;

/// Completely positive trace-preserving map given by Kraus operators.
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    din: usize,
    dout: usize,
    kraus: Vec<CMat>,
}

impl QuantumChannel {
    /// Wraps Kraus operators after checking shapes and trace preservation
    /// (`sum K† K = I` within `1e-9`).
    pub fn new(din: usize, dout: usize, kraus: Vec<CMat>) -> Result<Self> {
        if din == 0 || dout == 0 || kraus.is_empty() {
            return Err(Error::Dimension(
                "channel needs positive dimensions and at least one Kraus operator".into(),
            ));
        }
        for k in &kraus {
            if k.rows() != dout || k.cols() != din {
                return Err(Error::Dimension(format!(
                    "Kraus operator is {}x{}, expected {dout}x{din}",
                    k.rows(),
                    k.cols()
                )));
            }
        }
        let mut sum = CMat::zeros(din, din);
        for k in &kraus {
            sum = &sum + &k.dagger().matmul(k);
        }
        let dev = sum.max_abs_diff(&CMat::identity(din));
        if dev > 1e-9 {
            return Err(Error::Invariant(format!(
                "channel is not trace preserving (|sum K†K - I| = {dev:.3e})"
            )));
        }
        Ok(Self { din, dout, kraus })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            din: d,
            dout: d,
            kraus: vec![CMat::identity(d)],
        }
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    /// Applies the channel: `sum_k K X K†`.
    pub fn apply(&self, x: &CMat) -> Result<CMat> {
        if x.rows() != self.din || x.cols() != self.din {
            return Err(Error::Dimension(format!(
                "input is {}x{}, channel expects {}x{}",
                x.rows(),
                x.cols(),
                self.din,
                self.din
            )));
        }
        let mut out = CMat::zeros(self.dout, self.dout);
        for k in &self.kraus {
            out = &out + &k.matmul(x).matmul(&k.dagger());
        }
        Ok(out)
    }

    /// Choi state `(id (x) N)(|Omega><Omega|)` with the normalized maximally
    /// entangled reference `|Omega> = sum_i |ii>/sqrt(din)`; the result
    /// carries the split `(din, dout)`.
    pub fn choi(&self) -> Result<DensityMatrix> {
        let (din, dout) = (self.din, self.dout);
        let n = din * dout;
        let mut mat = CMat::zeros(n, n);
        let norm = Complex64::new(1.0 / din as f64, 0.0);
        for k in &self.kraus {
            // Column alpha of K placed in block row alpha.
            for alpha in 0..din {
                for beta in 0..din {
                    for i in 0..dout {
                        let a = k.get(i, alpha);
                        if a == Complex64::ZERO {
                            continue;
                        }
                        for j in 0..dout {
                            let add = a * k.get(j, beta).conj() * norm;
                            let (r, c) = (alpha * dout + i, beta * dout + j);
                            mat.set(r, c, mat.get(r, c) + add);
                        }
                    }
                }
            }
        }
        DensityMatrix::new(mat, DimSplit::new(din, dout)?)
    }

    /// Rebuilds a Kraus representation from a Choi state with split
    /// `(din, dout)`, dropping eigenvalues below [`KRAUS_CLIP`].
    pub fn from_choi(choi: &DensityMatrix) -> Result<Self> {
        let din = choi.split().da;
        let dout = choi.split().db;
        let unnormalized = choi.mat().scale(Complex64::new(din as f64, 0.0));
        kraus_from_choi(&unnormalized, din, dout)
    }
}

/// Extracts Kraus operators from an unnormalized Choi matrix
/// (`sum_ab E_ab (x) N(E_ab)`), input index major.
fn kraus_from_choi(choi_unnormalized: &CMat, din: usize, dout: usize) -> Result<QuantumChannel> {
    let eig = choi_unnormalized.eig_hermitian()?;
    if let Some(&min) = eig.values.first() {
        if min < -1e-9 {
            return Err(Error::NotPsd(min));
        }
    }
    let mut kraus = Vec::new();
    for (idx, &lambda) in eig.values.iter().enumerate() {
        if lambda <= KRAUS_CLIP {
            continue;
        }
        let v = eig.column(idx);
        let w = lambda.sqrt();
        kraus.push(CMat::from_fn(dout, din, |i, alpha| v[alpha * dout + i] * w));
    }
    QuantumChannel::new(din, dout, kraus)
}

/// The channel `X -> tr_B(sum_ab X_ab |a>_V <b|)` that expresses tracing out
/// the B factor of any operator supported on the subspace, in the
/// coordinates of the given basis. Input dimension is the subspace size,
/// output dimension the A factor.
pub fn trace_out_map(basis: &SubspaceBasis) -> Result<QuantumChannel> {
    let r = basis.len();
    let da = basis.ambient().da;
    let db = basis.ambient().db;
    let mut choi = CMat::zeros(r * da, r * da);
    for alpha in 0..r {
        for beta in 0..r {
            let va = basis.vector(alpha).vec();
            let vb = basis.vector(beta).vec();
            // tr_B |va><vb| as a da x da block.
            for i in 0..da {
                for j in 0..da {
                    let mut s = Complex64::ZERO;
                    for k in 0..db {
                        s += va[i * db + k] * vb[j * db + k].conj();
                    }
                    choi.set(alpha * da + i, beta * da + j, s);
                }
            }
        }
    }
    kraus_from_choi(&choi, r, da)
}

/// PPT test: returns whether the partial transpose is positive
/// semidefinite together with its minimum eigenvalue.
pub fn is_ppt(rho: &DensityMatrix) -> (bool, f64) {
    let (min_eig, _) = pt_min_eig(rho).expect("valid density matrices have a PT spectrum");
    (min_eig >= -PPT_TOL, min_eig)
}

/// Minimum partial-transpose eigenvalue and its eigenvector.
fn pt_min_eig(rho: &DensityMatrix) -> Result<(f64, Vec<Complex64>)> {
    let pt = rho.mat().partial_transpose(rho.split(), Subsystem::B)?;
    let eig = pt.eig_hermitian()?;
    Ok((eig.values[0], eig.column(0)))
}

/// The twelve vectors of the four mutually unbiased bases of a qutrit,
/// forming a projective 2-design. Basis 0 is computational; basis `m + 1`
/// (`m = 0, 1, 2`) holds the vectors with amplitudes
/// `w^(m k^2 + j k)/sqrt(3)` at `|k>`, `w = exp(2 pi i/3)`, `j = 0, 1, 2`.
/// Satisfies `(1/12) sum_i P_i (x) P_i = P_sym/6`.
pub fn mub_two_design(d: usize) -> Result<Vec<PureState>> {
    if d != 3 {
        return Err(Error::Domain(format!(
            "MUB 2-design construction is only available for dimension 3, got {d}"
        )));
    }
    let split = DimSplit::new(3, 1)?;
    let mut vectors = Vec::with_capacity(12);
    for j in 0..3 {
        let mut v = vec![Complex64::ZERO; 3];
        v[j] = Complex64::ONE;
        vectors.push(PureState::new(v, split)?);
    }
    let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let norm = 1.0 / 3.0_f64.sqrt();
    for m in 0..3u32 {
        for j in 0..3u32 {
            let v: Vec<Complex64> = (0..3u32)
                .map(|k| omega.powu(m * k * k + j * k) * norm)
                .collect();
            vectors.push(PureState::new(v, split)?);
        }
    }
    Ok(vectors)
}

/// Projector onto the symmetric subspace of `C^d (x) C^d`: `(I + SWAP)/2`.
pub fn symmetric_projector(d: usize) -> CMat {
    let mut swap = CMat::zeros(d * d, d * d);
    for i in 0..d {
        for k in 0..d {
            swap.set(i * d + k, k * d + i, Complex64::ONE);
        }
    }
    let eye = CMat::identity(d * d);
    (&eye + &swap).scale(Complex64::new(0.5, 0.0))
}

/// Verdict of the entanglement-breaking decision procedure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EbVerdict {
    Breaking,
    NotBreaking,
    Indeterminate,
}

/// How a verdict was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EbMethod {
    Ppt2x2,
    Ppt2x3,
    PptViolation,
    DesignDecomposition,
    HolevoForm,
}

/// One term of a separable decomposition of a Choi state: a weight and a
/// product of pure states on the input and output factors.
#[derive(Clone, Debug, Serialize)]
pub struct ProductTerm {
    pub weight: f64,
    pub a_re: Vec<f64>,
    pub a_im: Vec<f64>,
    pub b_re: Vec<f64>,
    pub b_im: Vec<f64>,
}

impl ProductTerm {
    fn new(weight: f64, a: &[Complex64], b: &[Complex64]) -> Self {
        Self {
            weight,
            a_re: a.iter().map(|z| z.re).collect(),
            a_im: a.iter().map(|z| z.im).collect(),
            b_re: b.iter().map(|z| z.re).collect(),
            b_im: b.iter().map(|z| z.im).collect(),
        }
    }

    /// `weight * |a><a| (x) |b><b|` summed over terms.
    pub fn assemble(terms: &[ProductTerm]) -> CMat {
        let da = terms[0].a_re.len();
        let db = terms[0].b_re.len();
        let mut out = CMat::zeros(da * db, da * db);
        for t in terms {
            let a: Vec<Complex64> = t
                .a_re
                .iter()
                .zip(&t.a_im)
                .map(|(&re, &im)| Complex64::new(re, im))
                .collect();
            let b: Vec<Complex64> = t
                .b_re
                .iter()
                .zip(&t.b_im)
                .map(|(&re, &im)| Complex64::new(re, im))
                .collect();
            let term = CMat::outer(&a, &a)
                .kron(&CMat::outer(&b, &b))
                .expect("witness dimensions stay small")
                .scale(Complex64::new(t.weight, 0.0));
            out = &out + &term;
        }
        out
    }
}

/// Evidence attached to an entanglement-breaking verdict.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EbWitness {
    /// Negative partial-transpose eigenvalue with its eigenvector.
    NegativeEigenvector {
        eigenvalue: f64,
        vector_re: Vec<f64>,
        vector_im: Vec<f64>,
    },
    /// PPT holds and the split lies in the exact 2x2/2x3 regime.
    PptExactRegime,
    /// No decision procedure applies.
    None,
}

/// Outcome of [`eb_certify`]: verdict, method, the minimum
/// partial-transpose eigenvalue of the Choi state, supporting evidence and
/// (for constructive separability) an explicit product ensemble.
#[derive(Clone, Debug, Serialize)]
pub struct EbCertificate {
    pub verdict: EbVerdict,
    pub method: Option<EbMethod>,
    pub min_pt_eig: f64,
    pub witness: EbWitness,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<Vec<ProductTerm>>,
}

/// Decides whether a channel is entanglement breaking.
///
/// Procedure on the Choi state: a partial-transpose eigenvalue below
/// `-1e-9` refutes (verdict `not_breaking`); otherwise PPT certifies
/// separability exactly on 2x2 and 2x3 splits; otherwise a 3x3 Choi equal
/// to the normalized symmetric projector within `1e-8` is decomposed
/// explicitly through the MUB 2-design; anything else is `indeterminate`.
pub fn eb_certify(ch: &QuantumChannel) -> Result<EbCertificate> {
    let choi = ch.choi()?;
    let (min_pt_eig, eigvec) = pt_min_eig(&choi)?;
    if min_pt_eig < -PPT_TOL {
        return Ok(EbCertificate {
            verdict: EbVerdict::NotBreaking,
            method: Some(EbMethod::PptViolation),
            min_pt_eig,
            witness: EbWitness::NegativeEigenvector {
                eigenvalue: min_pt_eig,
                vector_re: eigvec.iter().map(|z| z.re).collect(),
                vector_im: eigvec.iter().map(|z| z.im).collect(),
            },
            ensemble: None,
        });
    }

    let dims = (choi.split().da, choi.split().db);
    match dims {
        (2, 2) | (2, 3) | (3, 2) => {
            let method = if dims == (2, 2) {
                EbMethod::Ppt2x2
            } else {
                EbMethod::Ppt2x3
            };
            Ok(EbCertificate {
                verdict: EbVerdict::Breaking,
                method: Some(method),
                min_pt_eig,
                witness: EbWitness::PptExactRegime,
                ensemble: None,
            })
        }
        (3, 3) => {
            let target = symmetric_projector(3).scale(Complex64::new(1.0 / 6.0, 0.0));
            if choi.mat().max_abs_diff(&target) <= 1e-8 {
                let terms: Vec<ProductTerm> = mub_two_design(3)?
                    .iter()
                    .map(|phi| ProductTerm::new(1.0 / 12.0, phi.vec(), phi.vec()))
                    .collect();
                Ok(EbCertificate {
                    verdict: EbVerdict::Breaking,
                    method: Some(EbMethod::DesignDecomposition),
                    min_pt_eig,
                    witness: EbWitness::PptExactRegime,
                    ensemble: Some(terms),
                })
            } else {
                Ok(indeterminate(min_pt_eig))
            }
        }
        _ => Ok(indeterminate(min_pt_eig)),
    }
}

fn indeterminate(min_pt_eig: f64) -> EbCertificate {
    EbCertificate {
        verdict: EbVerdict::Indeterminate,
        method: None,
        min_pt_eig,
        witness: EbWitness::None,
        ensemble: None,
    }
}

/// Applies a measure-and-prepare form: `X -> sum_k tr(M_k X) rho_k`.
/// The measurement operators must form a POVM within `1e-9`.
pub fn holevo_apply(form: &[(CMat, CMat)], x: &CMat) -> Result<CMat> {
    let din = validate_povm(form)?;
    if x.rows() != din || x.cols() != din {
        return Err(Error::Dimension(format!(
            "input is {}x{}, POVM acts on {din}x{din}",
            x.rows(),
            x.cols()
        )));
    }
    let dout = form[0].1.rows();
    let mut out = CMat::zeros(dout, dout);
    for (m, rho) in form {
        let weight = m.matmul(x).trace();
        out = &out + &rho.scale(weight);
    }
    Ok(out)
}

/// Certifies a measure-and-prepare form as entanglement breaking by
/// decomposing its Choi state into the explicit product ensemble
/// `sum_k M_k^T/din (x) rho_k`, expanded into pure products through the
/// eigenvectors of both factors.
pub fn holevo_certificate(form: &[(CMat, CMat)]) -> Result<EbCertificate> {
    let din = validate_povm(form)?;
    let mut terms = Vec::new();
    let mut choi = CMat::zeros(0, 0);
    let mut first = true;
    for (m, rho) in form {
        let scaled = m.transpose().scale(Complex64::new(1.0 / din as f64, 0.0));
        let block = scaled.kron(rho)?;
        if first {
            choi = block.clone();
            first = false;
        } else {
            choi = &choi + &block;
        }
        let eig_m = scaled.eig_hermitian()?;
        let eig_r = rho.eig_hermitian()?;
        for (i, &mu) in eig_m.values.iter().enumerate() {
            if mu <= KRAUS_CLIP {
                continue;
            }
            for (j, &nu) in eig_r.values.iter().enumerate() {
                if nu <= KRAUS_CLIP {
                    continue;
                }
                terms.push(ProductTerm::new(
                    mu * nu,
                    &eig_m.column(i),
                    &eig_r.column(j),
                ));
            }
        }
    }
    let split = DimSplit::new(din, form[0].1.rows())?;
    let choi_state = DensityMatrix::new(choi, split)?;
    let (_, min_pt_eig) = is_ppt(&choi_state);
    Ok(EbCertificate {
        verdict: EbVerdict::Breaking,
        method: Some(EbMethod::HolevoForm),
        min_pt_eig,
        witness: EbWitness::PptExactRegime,
        ensemble: Some(terms),
    })
}

/// Checks POVM completeness and positivity; returns the input dimension.
fn validate_povm(form: &[(CMat, CMat)]) -> Result<usize> {
    if form.is_empty() {
        return Err(Error::Domain("empty measure-and-prepare form".into()));
    }
    let din = form[0].0.rows();
    let dout = form[0].1.rows();
    let mut sum = CMat::zeros(din, din);
    for (m, rho) in form {
        if m.rows() != din || !m.is_square() || rho.rows() != dout || !rho.is_square() {
            return Err(Error::Dimension(
                "inconsistent operator dimensions in measure-and-prepare form".into(),
            ));
        }
        let eig = m
            .eig_hermitian()
            .map_err(|_| Error::Domain("measurement operators must be Hermitian".into()))?;
        if eig.values[0] < -1e-9 {
            return Err(Error::Domain(format!(
                "measurement operator has negative eigenvalue {:.3e}",
                eig.values[0]
            )));
        }
        sum = &sum + m;
    }
    let dev = sum.max_abs_diff(&CMat::identity(din));
    if dev > 1e-9 {
        return Err(Error::Domain(format!(
            "measurement operators do not sum to the identity (|sum - I| = {dev:.3e})"
        )));
    }
    Ok(din)
}
