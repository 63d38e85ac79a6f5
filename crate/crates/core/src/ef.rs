//! Variational upper bounds on the entanglement of formation, plus the
//! finite tensor-power additivity check.
//!
//! The formation measure of a mixed state is the infimum of the average
//! entanglement entropy over all pure-state ensembles realizing the state.
//! Every ensemble of size `m` realizing a rank-`r` state arises from an
//! `m x r` isometry applied to the scaled eigenvectors, so the search runs
//! over isometries: an unconstrained complex matrix `Z` is projected by the
//! polar map `U = Z (Z†Z)^{-1/2}` and the average entanglement of the
//! induced ensemble is minimized by multi-start gradient descent with
//! finite-difference gradients on the real parameters of `Z`.
//!
//! The returned value is a feasible-point upper bound: it can sit above the
//! true infimum but never materially below it.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{ef_two_qubit, xlog2, Ebits};
use crate::qmat::{CMat, DimSplit};
use crate::rng::{standard_normal, stream_rng};
use crate::states::{DensityMatrix, PureState, StateJson};

/// Ensemble weights at or below this are dropped from returned
/// decompositions (they stay in the objective at zero weight).
pub const WEIGHT_CLIP: f64 = 1e-12;

/// Eigenvalues below this do not count toward the rank.
const RANK_CLIP: f64 = 1e-10;

/// Pure-state ensemble `{p_k, |psi_k>}` realizing a density matrix.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub weights: Vec<f64>,
    pub states: Vec<PureState>,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `sum_k p_k |psi_k><psi_k|`.
    pub fn reconstruct(&self) -> CMat {
        let dim = self.states[0].dim();
        let mut out = CMat::zeros(dim, dim);
        for (w, psi) in self.weights.iter().zip(&self.states) {
            out = &out + &psi.projector().scale(Complex64::new(*w, 0.0));
        }
        out
    }

    /// Largest entrywise deviation of the reconstruction from `rho`.
    pub fn reconstruction_residual(&self, rho: &DensityMatrix) -> f64 {
        self.reconstruct().max_abs_diff(rho.mat())
    }

    /// `sum_k p_k E(|psi_k>)`.
    pub fn average_entanglement(&self) -> Result<Ebits> {
        let mut total = 0.0;
        for (w, psi) in self.weights.iter().zip(&self.states) {
            total += w * crate::measures::entropy_of_entanglement(psi)?.value();
        }
        Ok(Ebits::new(total))
    }

    pub fn to_json(&self) -> DecompositionJson {
        DecompositionJson {
            weights: self.weights.clone(),
            states: self.states.iter().map(PureState::to_json).collect(),
        }
    }
}

/// Wire format of a decomposition: weights plus the state vectors.
#[derive(Clone, Debug, Serialize)]
pub struct DecompositionJson {
    pub weights: Vec<f64>,
    pub states: Vec<StateJson>,
}

/// Settings of the multi-start ensemble search.
///
/// Restart 0 starts from the eigen-ensemble (identity isometry); restart
/// `k >= 1` draws its starting point from stream `k` of a ChaCha8 generator
/// seeded with `seed`, so runs are reproducible and the best value is
/// non-increasing in the restart count.
#[derive(Clone, Debug)]
pub struct OptimizerConfig {
    /// Ensemble size `m`; `None` selects `r^2` for a rank-`r` state.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop when the accepted step shrinks below this length.
    pub step_tol: f64,
    /// Stop after three consecutive accepted steps improving less than this.
    pub value_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            ensemble_size: None,
            restarts: 20,
            max_iters: 300,
            step_tol: 1e-9,
            value_tol: 1e-9,
            seed: 0,
        }
    }
}

/// Outcome of [`ef_upper_bound`]: the best found average entanglement, the
/// realizing decomposition, how many restarts terminated by tolerance and
/// the per-restart best values.
#[derive(Clone, Debug)]
pub struct EfResult {
    pub value: Ebits,
    pub decomposition: Decomposition,
    pub restarts_converged: usize,
    pub history: Vec<f64>,
}

impl EfResult {
    pub fn to_json(&self) -> EfResultJson {
        EfResultJson {
            value: self.value.value(),
            restarts_converged: self.restarts_converged,
            history: self.history.clone(),
            decomposition: self.decomposition.to_json(),
        }
    }
}

/// Wire format of an optimizer result, including the full decomposition so
/// the value can be re-checked independently.
#[derive(Clone, Debug, Serialize)]
pub struct EfResultJson {
    pub value: f64,
    pub restarts_converged: usize,
    pub history: Vec<f64>,
    pub decomposition: DecompositionJson,
}

/// Spectral data of a state restricted to its support: eigenvalues in
/// descending order with matching eigenvectors.
struct Spectral {
    evals: Vec<f64>,
    evecs: Vec<Vec<Complex64>>,
}

fn spectral(rho: &DensityMatrix) -> Result<Spectral> {
    let eig = rho.mat().eig_hermitian()?;
    let mut evals = Vec::new();
    let mut evecs = Vec::new();
    for (idx, &lambda) in eig.values.iter().enumerate().rev() {
        if lambda > RANK_CLIP {
            evals.push(lambda);
            evecs.push(eig.column(idx));
        }
    }
    Ok(Spectral { evals, evecs })
}

/// Eigen-ensemble of a state: weights are the nonzero eigenvalues in
/// descending order, states the matching eigenvectors.
pub fn decompose_sqrt(rho: &DensityMatrix) -> Result<Decomposition> {
    let sp = spectral(rho)?;
    let states = sp
        .evecs
        .iter()
        .map(|v| PureState::new(v.clone(), rho.split()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Decomposition {
        weights: sp.evals,
        states,
    })
}

/// Members `|psi~_k> = sum_i U[k,i] scaled_i` of the ensemble induced by an
/// isometry on scaled eigenvectors; returns `(weights, normalized states)`
/// with members at or below [`WEIGHT_CLIP`] dropped.
fn ensemble_members(scaled: &[Vec<Complex64>], u: &CMat) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let dim = scaled[0].len();
    let mut weights = Vec::new();
    let mut states = Vec::new();
    for k in 0..u.rows() {
        let mut psi = vec![Complex64::ZERO; dim];
        for (i, s) in scaled.iter().enumerate() {
            let coeff = u.get(k, i);
            if coeff == Complex64::ZERO {
                continue;
            }
            for (out, amp) in psi.iter_mut().zip(s) {
                *out += coeff * amp;
            }
        }
        let p: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if p <= WEIGHT_CLIP {
            continue;
        }
        let inv = 1.0 / p.sqrt();
        states.push(psi.into_iter().map(|z| z * inv).collect());
        weights.push(p);
    }
    (weights, states)
}

/// Ensemble induced by an `m x r` isometry (`U†U = I`) acting on the scaled
/// eigenvectors of `rho`. Every realization of `rho` arises this way.
pub fn ensemble_from_isometry(rho: &DensityMatrix, u: &CMat) -> Result<Decomposition> {
    let sp = spectral(rho)?;
    let r = sp.evals.len();
    if u.cols() != r || u.rows() < r {
        return Err(Error::Dimension(format!(
            "isometry is {}x{}, state has rank {r}",
            u.rows(),
            u.cols()
        )));
    }
    let gram = u.dagger().matmul(u);
    let dev = gram.max_abs_diff(&CMat::identity(r));
    if dev > 1e-9 {
        return Err(Error::Domain(format!(
            "matrix is not an isometry (|U†U - I| = {dev:.3e})"
        )));
    }
    let scaled = scaled_eigvecs(&sp);
    let (weights, vecs) = ensemble_members(&scaled, u);
    let states = vecs
        .into_iter()
        .map(|v| PureState::new(v, rho.split()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Decomposition { weights, states })
}

fn scaled_eigvecs(sp: &Spectral) -> Vec<Vec<Complex64>> {
    sp.evals
        .iter()
        .zip(&sp.evecs)
        .map(|(&l, v)| {
            let w = l.sqrt();
            v.iter().map(|z| z * w).collect()
        })
        .collect()
}

/// Average-entanglement objective over isometry parameters.
///
/// The reduced matrix of each unnormalized member is assembled from
/// precomputed cross-reductions `T_ij = tr_B(scaled_i scaled_j†)`, so a
/// function evaluation never materializes the member vectors.
struct Objective {
    m: usize,
    r: usize,
    da: usize,
    /// `cross[i*r + j] = T_ij`, row-major `da x da` blocks.
    cross: Vec<Complex64>,
}

impl Objective {
    fn new(sp: &Spectral, split: DimSplit, m: usize) -> Self {
        let r = sp.evals.len();
        let (da, db) = (split.da, split.db);
        let scaled = scaled_eigvecs(sp);
        let mut cross = vec![Complex64::ZERO; r * r * da * da];
        for i in 0..r {
            for j in 0..r {
                let base = (i * r + j) * da * da;
                for a in 0..da {
                    for b in 0..da {
                        let mut s = Complex64::ZERO;
                        for c in 0..db {
                            s += scaled[i][a * db + c] * scaled[j][b * db + c].conj();
                        }
                        cross[base + a * da + b] = s;
                    }
                }
            }
        }
        Self { m, r, da, cross }
    }

    fn param_len(&self) -> usize {
        2 * self.m * self.r
    }

    /// Objective value `sum_k p_k E(psi_k)` at the polar projection of the
    /// parameter vector.
    fn value(&self, z: &[f64], ws: &mut Workspace) -> f64 {
        self.project(z, ws);
        let (m, r, da) = (self.m, self.r, self.da);
        let mut total = 0.0;
        for k in 0..m {
            // R_k = sum_ij U[k,i] conj(U[k,j]) T_ij, the unnormalized
            // reduced matrix of member k, trace p_k.
            ws.red.iter_mut().for_each(|z| *z = Complex64::ZERO);
            for i in 0..r {
                let ui = ws.u[k * r + i];
                if ui == Complex64::ZERO {
                    continue;
                }
                for j in 0..r {
                    let w = ui * ws.u[k * r + j].conj();
                    let base = (i * r + j) * da * da;
                    for (red, t) in ws.red.iter_mut().zip(&self.cross[base..base + da * da]) {
                        *red += w * t;
                    }
                }
            }
            total += member_entropy(&mut ws.red, da);
        }
        total
    }

    /// Polar projection `U = Z (Z†Z)^{-1/2}` into the workspace.
    fn project(&self, z: &[f64], ws: &mut Workspace) {
        let (m, r) = (self.m, self.r);
        for (out, pair) in ws.zm.iter_mut().zip(z.chunks_exact(2)) {
            *out = Complex64::new(pair[0], pair[1]);
        }
        for i in 0..r {
            for j in 0..r {
                let mut s = Complex64::ZERO;
                for k in 0..m {
                    s += ws.zm[k * r + i].conj() * ws.zm[k * r + j];
                }
                ws.gram[i * r + j] = s;
            }
        }
        jacobi_in_place(&mut ws.gram, r, Some(&mut ws.gvec));
        // inv_sqrt = V diag(1/sqrt(s)) V†, tiny eigenvalues floored so the
        // projection stays defined at rank-deficient points.
        ws.invs.iter_mut().for_each(|z| *z = Complex64::ZERO);
        for t in 0..r {
            let w = 1.0 / ws.gram[t * r + t].re.max(1e-14).sqrt();
            for i in 0..r {
                let vi = ws.gvec[i * r + t] * w;
                for j in 0..r {
                    ws.invs[i * r + j] += vi * ws.gvec[j * r + t].conj();
                }
            }
        }
        for k in 0..m {
            for i in 0..r {
                let mut s = Complex64::ZERO;
                for t in 0..r {
                    s += ws.zm[k * r + t] * ws.invs[t * r + i];
                }
                ws.u[k * r + i] = s;
            }
        }
    }

    fn workspace(&self) -> Workspace {
        Workspace {
            zm: vec![Complex64::ZERO; self.m * self.r],
            u: vec![Complex64::ZERO; self.m * self.r],
            red: vec![Complex64::ZERO; self.da * self.da],
            gram: vec![Complex64::ZERO; self.r * self.r],
            gvec: vec![Complex64::ZERO; self.r * self.r],
            invs: vec![Complex64::ZERO; self.r * self.r],
        }
    }
}

struct Workspace {
    zm: Vec<Complex64>,
    u: Vec<Complex64>,
    red: Vec<Complex64>,
    gram: Vec<Complex64>,
    gvec: Vec<Complex64>,
    invs: Vec<Complex64>,
}

/// In-place cyclic Jacobi diagonalization of a small Hermitian matrix in a
/// flat row-major buffer; no allocation, no sorting. When `vectors` is
/// given it receives the accumulated rotations (eigenvector columns).
/// The hot-path twin of the general solver in `qmat`.
fn jacobi_in_place(a: &mut [Complex64], n: usize, vectors: Option<&mut [Complex64]>) {
    let v = if let Some(v) = vectors {
        for i in 0..n {
            for j in 0..n {
                v[i * n + j] = if i == j {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                };
            }
        }
        Some(v)
    } else {
        None
    };
    let mut v = v;
    let scale: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = 1e-13 * scale.max(1e-300);
    for _ in 0..40 {
        let mut off = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    off += a[p * n + q].norm_sqr();
                }
            }
        }
        if off.sqrt() <= target {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let h = a[p * n + q];
                let habs = h.norm();
                if habs < 1e-300 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let phase = h / habs;
                let delta = (aqq - app) / (2.0 * habs);
                let t = if delta == 0.0 {
                    1.0
                } else {
                    -delta.signum() / (delta.abs() + (1.0 + delta * delta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_conj_phase = s * phase.conj();
                let s_phase = s * phase;
                a[p * n + p] = Complex64::new(c * c * app + 2.0 * c * s * habs + s * s * aqq, 0.0);
                a[q * n + q] = Complex64::new(s * s * app - 2.0 * c * s * habs + c * c * aqq, 0.0);
                a[p * n + q] = Complex64::ZERO;
                a[q * n + p] = Complex64::ZERO;
                for j in 0..n {
                    if j == p || j == q {
                        continue;
                    }
                    let ajp = a[j * n + p];
                    let ajq = a[j * n + q];
                    let new_jp = ajp * c + ajq * s_conj_phase;
                    let new_jq = -ajp * s_phase + ajq * c;
                    a[j * n + p] = new_jp;
                    a[p * n + j] = new_jp.conj();
                    a[j * n + q] = new_jq;
                    a[q * n + j] = new_jq.conj();
                }
                if let Some(v) = v.as_deref_mut() {
                    for j in 0..n {
                        let vjp = v[j * n + p];
                        let vjq = v[j * n + q];
                        v[j * n + p] = vjp * c + vjq * s_conj_phase;
                        v[j * n + q] = -vjp * s_phase + vjq * c;
                    }
                }
            }
        }
    }
}

/// Entropy contribution `sum_j f(mu_j) - f(p)` of one unnormalized reduced
/// matrix (`f(x) = -x log2 x`), which equals `p * S(R/p)`. Diagonalizes the
/// buffer in place for sizes above 2.
fn member_entropy(red: &mut [Complex64], da: usize) -> f64 {
    if da == 2 {
        let t = red[0].re + red[3].re;
        if t <= WEIGHT_CLIP {
            return 0.0;
        }
        let det = red[0].re * red[3].re - red[1].norm_sqr();
        let disc = (0.25 * t * t - det).max(0.0).sqrt();
        let hi = 0.5 * t + disc;
        let lo = (0.5 * t - disc).max(0.0);
        xlog2(hi) + xlog2(lo) - xlog2(t)
    } else {
        let t: f64 = (0..da).map(|i| red[i * da + i].re).sum();
        if t <= WEIGHT_CLIP {
            return 0.0;
        }
        jacobi_in_place(red, da, None);
        let mut total = 0.0;
        for i in 0..da {
            total += xlog2(red[i * da + i].re.max(0.0));
        }
        total - xlog2(t)
    }
}

/// One gradient-descent run on the real parameter vector. Step sizes follow
/// the Barzilai-Borwein rule safeguarded by a nonmonotone Armijo
/// backtracking search; gradients are central finite differences. Returns
/// the final point, value and a convergence flag.
fn descend(
    obj: &Objective,
    ws: &mut Workspace,
    mut z: Vec<f64>,
    cfg: &OptimizerConfig,
) -> (Vec<f64>, f64, bool) {
    const FD_STEP: f64 = 1e-6;
    let n = z.len();

    let fd_gradient = |z: &mut [f64], grad: &mut [f64], ws: &mut Workspace| -> f64 {
        let mut gnorm2 = 0.0;
        for i in 0..n {
            let orig = z[i];
            z[i] = orig + FD_STEP;
            let fp = obj.value(z, ws);
            z[i] = orig - FD_STEP;
            let fm = obj.value(z, ws);
            z[i] = orig;
            let g = (fp - fm) / (2.0 * FD_STEP);
            grad[i] = g;
            gnorm2 += g * g;
        }
        gnorm2
    };

    let mut fz = obj.value(&z, ws);
    let mut grad = vec![0.0; n];
    let mut gnorm2 = fd_gradient(&mut z, &mut grad, ws);
    let mut trial = vec![0.0; n];
    let mut prev_z: Vec<f64> = Vec::new();
    let mut prev_grad: Vec<f64> = Vec::new();
    // Reference window for the nonmonotone acceptance test.
    let mut recent = std::collections::VecDeque::from([fz]);
    let mut step = 0.1;
    let mut converged = false;
    let mut stalls = 0;

    for _ in 0..cfg.max_iters {
        if gnorm2.sqrt() < 1e-8 {
            converged = true;
            break;
        }

        if !prev_z.is_empty() {
            // Barzilai-Borwein step: (dz . dz) / (dz . dg).
            let mut ss = 0.0;
            let mut sy = 0.0;
            for i in 0..n {
                let dz = z[i] - prev_z[i];
                let dg = grad[i] - prev_grad[i];
                ss += dz * dz;
                sy += dz * dg;
            }
            if sy > 1e-16 && ss > 0.0 {
                step = (ss / sy).clamp(1e-8, 1e3);
            }
        }

        let f_ref = recent.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut accepted = false;
        for _ in 0..40 {
            for i in 0..n {
                trial[i] = z[i] - step * grad[i];
            }
            let ft = obj.value(&trial, ws);
            if ft <= f_ref - 1e-4 * step * gnorm2 {
                let progress = fz - ft;
                prev_z = std::mem::replace(&mut z, std::mem::take(&mut trial));
                trial = vec![0.0; n];
                if step * gnorm2.sqrt() < cfg.step_tol {
                    converged = true;
                }
                stalls = if progress.abs() < cfg.value_tol {
                    stalls + 1
                } else {
                    0
                };
                fz = ft;
                recent.push_back(fz);
                if recent.len() > 5 {
                    recent.pop_front();
                }
                prev_grad.clone_from(&grad);
                gnorm2 = fd_gradient(&mut z, &mut grad, ws);
                accepted = true;
                break;
            }
            step *= 0.35;
            if step * gnorm2.sqrt() < cfg.step_tol {
                converged = true;
                break;
            }
        }
        if !accepted || converged || stalls >= 3 {
            converged = true;
            break;
        }
    }
    (z, fz, converged)
}

/// Best-found upper bound on the entanglement of formation.
///
/// Multi-start minimization of the average entanglement over ensembles of
/// size `m` (default `r^2`). Restart 0 starts from the eigen-ensemble, so
/// the result is never worse than the starting ensemble; the remaining
/// restarts draw Gaussian starting points from per-restart streams.
/// Deterministic in `cfg.seed`; ties between restarts resolve to the lowest
/// restart index.
pub fn ef_upper_bound(rho: &DensityMatrix, cfg: &OptimizerConfig) -> Result<EfResult> {
    ef_upper_bound_with_init(rho, cfg, None)
}

pub(crate) fn ef_upper_bound_with_init(
    rho: &DensityMatrix,
    cfg: &OptimizerConfig,
    init: Option<CMat>,
) -> Result<EfResult> {
    if cfg.restarts == 0 || cfg.max_iters == 0 {
        return Err(Error::Domain(
            "optimizer needs at least one restart and one iteration".into(),
        ));
    }
    let sp = spectral(rho)?;
    let r = sp.evals.len();
    let m = cfg.ensemble_size.unwrap_or(r * r);
    if m < r {
        return Err(Error::Domain(format!(
            "ensemble size {m} below the state rank {r}"
        )));
    }
    let obj = Objective::new(&sp, rho.split(), m);
    let mut ws = obj.workspace();

    let start0 = match &init {
        Some(u0) => {
            if u0.rows() != m || u0.cols() != r {
                return Err(Error::Dimension(format!(
                    "initial isometry is {}x{}, expected {m}x{r}",
                    u0.rows(),
                    u0.cols()
                )));
            }
            let mut z = vec![0.0; obj.param_len()];
            for k in 0..m {
                for i in 0..r {
                    let v = u0.get(k, i);
                    z[2 * (k * r + i)] = v.re;
                    z[2 * (k * r + i) + 1] = v.im;
                }
            }
            z
        }
        None => {
            // Identity isometry: the eigen-ensemble itself.
            let mut z = vec![0.0; obj.param_len()];
            for i in 0..r {
                z[2 * (i * r + i)] = 1.0;
            }
            z
        }
    };

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut history = Vec::with_capacity(cfg.restarts);
    let mut restarts_converged = 0;
    for restart in 0..cfg.restarts {
        let z0 = if restart == 0 {
            start0.clone()
        } else {
            let mut rng = stream_rng(cfg.seed, restart as u64);
            (0..obj.param_len())
                .map(|_| standard_normal(&mut rng))
                .collect()
        };
        let (z, fz, converged) = descend(&obj, &mut ws, z0, cfg);
        history.push(fz);
        if converged {
            restarts_converged += 1;
        }
        if best.as_ref().is_none_or(|(fb, _)| fz < *fb) {
            best = Some((fz, z));
        }
    }

    let (_, zbest) = best.expect("at least one restart ran");
    obj.project(&zbest, &mut ws);
    let u = CMat::from_fn(m, r, |k, i| ws.u[k * r + i]);
    let (weights, vecs) = ensemble_members(&scaled_eigvecs(&sp), &u);
    let states = vecs
        .into_iter()
        .map(|v| PureState::new(v, rho.split()))
        .collect::<Result<Vec<_>>>()?;
    let decomposition = Decomposition { weights, states };
    let value = decomposition.average_entanglement()?;
    Ok(EfResult {
        value,
        decomposition,
        restarts_converged,
        history,
    })
}

/// Tensor product of two bipartite states regrouped so the A factors and
/// the B factors sit together: the result carries the split
/// `(dA_rho * dA_sigma, dB_rho * dB_sigma)`. Joint dimensions above 256 are
/// rejected.
pub fn tensor_join(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<DensityMatrix> {
    let (sr, ss) = (rho.split(), sigma.split());
    let split = DimSplit::new(sr.da * ss.da, sr.db * ss.db)?;
    let total = split.total();
    if total > 256 {
        return Err(Error::TooLarge {
            rows: total,
            cols: total,
            max: 256,
        });
    }
    // Joint index (iA, ia, kB, kb) against factor indices (iA, kB), (ia, kb).
    let mut perm = vec![(0usize, 0usize); total];
    let mut n = 0;
    for i_a in 0..sr.da {
        for i_a2 in 0..ss.da {
            for k_b in 0..sr.db {
                for k_b2 in 0..ss.db {
                    perm[n] = (i_a * sr.db + k_b, i_a2 * ss.db + k_b2);
                    n += 1;
                }
            }
        }
    }
    let mat = CMat::from_fn(total, total, |row, col| {
        let (r1, r2) = perm[row];
        let (c1, c2) = perm[col];
        rho.mat().get(r1, c1) * sigma.mat().get(r2, c2)
    });
    DensityMatrix::new(mat, split)
}

/// Product of two pure states in the regrouped joint ordering.
fn joint_product_vec(psi: &PureState, chi: &PureState) -> Vec<Complex64> {
    let (sr, ss) = (psi.split(), chi.split());
    let mut out = Vec::with_capacity(sr.total() * ss.total());
    for i_a in 0..sr.da {
        for i_a2 in 0..ss.da {
            for k_b in 0..sr.db {
                for k_b2 in 0..ss.db {
                    out.push(psi.vec()[i_a * sr.db + k_b] * chi.vec()[i_a2 * ss.db + k_b2]);
                }
            }
        }
    }
    out
}

/// Isometry whose induced ensemble reproduces the given one:
/// `U[t,i] = sqrt(w_t) <e_i|phi_t> / sqrt(lambda_i)`, padded with zero rows
/// up to `m`.
fn isometry_from_ensemble(
    sp: &Spectral,
    weights: &[f64],
    states: &[Vec<Complex64>],
    m: usize,
) -> CMat {
    let r = sp.evals.len();
    CMat::from_fn(m, r, |t, i| {
        if t >= weights.len() {
            return Complex64::ZERO;
        }
        let overlap: Complex64 = sp.evecs[i]
            .iter()
            .zip(&states[t])
            .map(|(e, p)| e.conj() * p)
            .sum();
        overlap * (weights[t].sqrt() / sp.evals[i].sqrt())
    })
}

/// Finite tensor-power additivity check.
///
/// Builds `rho (x) sigma` with the composite `(Aa|Bb)` split, bounds its
/// formation measure from above and subtracts the per-factor references
/// (the two-qubit closed form where available, the variational bound
/// otherwise). The joint search starts from the product of the factor
/// decompositions, so the gap can exceed zero only by local-search slack
/// and can sit below it only by numerical error.
pub fn additivity_gap(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    cfg: &OptimizerConfig,
) -> Result<(f64, EfResult)> {
    let joint = tensor_join(rho, sigma)?;

    let (ref_rho, decomp_rho) = factor_reference(rho, cfg)?;
    let (ref_sigma, decomp_sigma) = factor_reference(sigma, cfg)?;

    let sp = spectral(&joint)?;
    let r = sp.evals.len();
    let product_len = decomp_rho.len() * decomp_sigma.len();
    let m = cfg.ensemble_size.unwrap_or(r * r).max(product_len).max(r);

    let mut weights = Vec::with_capacity(product_len);
    let mut states = Vec::with_capacity(product_len);
    for (wr, pr) in decomp_rho.weights.iter().zip(&decomp_rho.states) {
        for (wsig, ps) in decomp_sigma.weights.iter().zip(&decomp_sigma.states) {
            weights.push(wr * wsig);
            states.push(joint_product_vec(pr, ps));
        }
    }
    let u0 = isometry_from_ensemble(&sp, &weights, &states, m);

    let mut joint_cfg = cfg.clone();
    joint_cfg.ensemble_size = Some(m);
    let joint_result = ef_upper_bound_with_init(&joint, &joint_cfg, Some(u0))?;
    let gap = joint_result.value.value() - ref_rho - ref_sigma;
    Ok((gap, joint_result))
}

/// Reference value and decomposition for one tensor factor: the closed-form
/// two-qubit value when the split is 2x2, the variational bound otherwise.
/// The decomposition always comes from the variational search.
fn factor_reference(state: &DensityMatrix, cfg: &OptimizerConfig) -> Result<(f64, Decomposition)> {
    let found = ef_upper_bound(state, cfg)?;
    let split = state.split();
    let value = if (split.da, split.db) == (2, 2) {
        ef_two_qubit(state)?.value()
    } else {
        found.value.value()
    };
    Ok((value, found.decomposition))
}
