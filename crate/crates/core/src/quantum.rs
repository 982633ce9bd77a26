//! Validated quantum objects: density matrices, ensembles, POVMs.
//!
//! Two ensemble representations coexist. [`Ensemble`] pairs priors with
//! density matrices and is what callers hand in and get back. [`PureEnsemble`]
//! stores unnormalized vectors whose squared norms are the priors; the
//! optimizer works exclusively in this form.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector};

/// Absolute tolerance used for entrywise and eigenvalue checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidDensityMatrix(format!(
                "not square ({}x{})",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.nrows() == 0 {
            return Err(Error::Empty("density matrix"));
        }
        if !linalg::is_finite(&matrix) {
            return Err(Error::InvalidDensityMatrix("non-finite entries".into()));
        }
        let herm = linalg::hermiticity_deviation(&matrix);
        if herm > tol {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let matrix = linalg::hermitian_part(&matrix);
        let trace = linalg::trace_re(&matrix);
        if (trace - 1.0).abs() > tol {
            return Err(Error::InvalidDensityMatrix(format!("trace {trace} differs from 1")));
        }
        let min = linalg::min_eigenvalue(&matrix);
        if min < -tol {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { matrix })
    }

    /// The projector onto `v / |v|`.
    pub fn from_pure(v: &CVector) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidDensityMatrix("zero or non-finite state vector".into()));
        }
        let u = v.unscale(norm);
        Ok(Self { matrix: linalg::projector(&u) })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: linalg::identity(dim).unscale(dim as f64) }
    }

    /// Wraps a matrix already known to be a state (e.g. a convex mixture of
    /// validated states), only restoring exact Hermiticity.
    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        Self { matrix: linalg::hermitian_part(&matrix) }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Spectrum in ascending order, with tiny negative values clipped to 0.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
            .into_iter()
            .map(|v| v.max(0.0))
            .collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.matrix)
    }
}

/// Priors paired with density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    priors: Vec<f64>,
    states: Vec<DensityMatrix>,
}

/// Checks priors and dimensions; priors within `tol` of normalized are
/// rescaled to sum exactly to one.
pub fn validate_ensemble(items: Vec<(f64, DensityMatrix)>, tol: f64) -> Result<Ensemble> {
    let Some(first) = items.first() else {
        return Err(Error::Empty("ensemble"));
    };
    let dim = first.1.dim();
    for (index, (p, rho)) in items.iter().enumerate() {
        if rho.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: rho.dim() });
        }
        if !p.is_finite() || *p < -tol {
            return Err(Error::NegativePrior { index, value: *p });
        }
    }
    let sum: f64 = items.iter().map(|(p, _)| p.max(0.0)).sum();
    if (sum - 1.0).abs() > tol {
        return Err(Error::PriorsNotNormalized { sum });
    }
    let (priors, states): (Vec<f64>, Vec<DensityMatrix>) =
        items.into_iter().map(|(p, rho)| (p.max(0.0) / sum, rho)).unzip();
    Ok(Ensemble { priors, states })
}

impl Ensemble {
    pub fn new(items: Vec<(f64, DensityMatrix)>, tol: f64) -> Result<Self> {
        validate_ensemble(items, tol)
    }

    /// Ensemble of pure states `|v_i>` (normalized internally) with the given priors.
    pub fn from_pure_states(priors: &[f64], vectors: &[CVector], tol: f64) -> Result<Self> {
        if priors.len() != vectors.len() {
            return Err(Error::DimensionMismatch { expected: priors.len(), found: vectors.len() });
        }
        let items = priors
            .iter()
            .zip(vectors)
            .map(|(&p, v)| DensityMatrix::from_pure(v).map(|rho| (p, rho)))
            .collect::<Result<Vec<_>>>()?;
        validate_ensemble(items, tol)
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.priors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.priors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityMatrix)> {
        self.priors.iter().copied().zip(self.states.iter())
    }

    /// The average state `sum_i p_i rho_i`.
    pub fn average_state(&self) -> DensityMatrix {
        let mut avg = CMatrix::zeros(self.dim(), self.dim());
        for (p, rho) in self.iter() {
            avg += rho.matrix().scale(p);
        }
        DensityMatrix::from_trusted(avg)
    }
}

/// Ensemble of unnormalized pure states; `|psi_i|^2` is the prior of state `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureEnsemble {
    vectors: Vec<CVector>,
}

impl PureEnsemble {
    /// Validates nonzero weights, common dimension and total weight one.
    pub fn new(vectors: Vec<CVector>, tol: f64) -> Result<Self> {
        let ens = Self::from_raw(vectors)?;
        let total = ens.total_weight();
        if (total - 1.0).abs() > tol {
            return Err(Error::PriorsNotNormalized { sum: total });
        }
        Ok(ens)
    }

    /// Builds `sqrt(p_i) |d_i> / |d_i|`; zero priors are skipped.
    pub fn from_priors(priors: &[f64], directions: &[CVector], tol: f64) -> Result<Self> {
        if priors.len() != directions.len() {
            return Err(Error::DimensionMismatch { expected: priors.len(), found: directions.len() });
        }
        let mut vectors = Vec::with_capacity(priors.len());
        for (index, (&p, d)) in priors.iter().zip(directions).enumerate() {
            if !p.is_finite() || p < -tol {
                return Err(Error::NegativePrior { index, value: p });
            }
            let norm = d.norm();
            if norm == 0.0 {
                return Err(Error::ZeroWeightState { index });
            }
            if p > 0.0 {
                vectors.push(d.scale(p.sqrt() / norm));
            }
        }
        Self::new(vectors, tol)
    }

    /// Checks dimensions and nonzero weights but not normalization.
    pub(crate) fn from_raw(vectors: Vec<CVector>) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(Error::Empty("pure ensemble"));
        };
        let dim = first.len();
        if dim == 0 {
            return Err(Error::Empty("state vector"));
        }
        for (index, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
            }
            if !v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::InvalidArguments(format!("state {index} has non-finite amplitudes")));
            }
            if v.norm_squared() == 0.0 {
                return Err(Error::ZeroWeightState { index });
            }
        }
        Ok(Self { vectors })
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<CVector> {
        self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn priors(&self) -> Vec<f64> {
        self.vectors.iter().map(|v| v.norm_squared()).collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.vectors.iter().map(|v| v.norm_squared()).sum()
    }

    /// Unit vector of state `i`.
    pub fn direction(&self, i: usize) -> CVector {
        let v = &self.vectors[i];
        v.unscale(v.norm())
    }

    /// Exact conversion to the density-matrix representation.
    pub fn to_ensemble(&self) -> Ensemble {
        let total = self.total_weight();
        let priors = self.vectors.iter().map(|v| v.norm_squared() / total).collect();
        let states = self
            .vectors
            .iter()
            .map(|v| DensityMatrix::from_trusted(linalg::projector(&v.unscale(v.norm()))))
            .collect();
        Ensemble { priors, states }
    }

    /// `sum_i |psi_i><psi_i|`.
    pub fn average_state(&self) -> DensityMatrix {
        let mut avg = CMatrix::zeros(self.dim(), self.dim());
        for v in &self.vectors {
            avg += linalg::projector(v);
        }
        DensityMatrix::from_trusted(avg.unscale(self.total_weight()))
    }
}

/// Diagnostics of a candidate measurement, computed without failing.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmDiagnostics {
    pub dim: usize,
    pub completeness_deviation: f64,
    pub hermiticity_deviation: f64,
    pub min_eigenvalues: Vec<f64>,
}

/// A validated POVM: Hermitian PSD elements summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<CMatrix>,
}

fn check_shapes(elements: &[CMatrix]) -> Result<usize> {
    let Some(first) = elements.first() else {
        return Err(Error::Empty("POVM"));
    };
    let dim = first.nrows();
    if dim == 0 {
        return Err(Error::Empty("POVM element"));
    }
    for (index, m) in elements.iter().enumerate() {
        if !m.is_square() {
            return Err(Error::NotSquare { index, rows: m.nrows(), cols: m.ncols() });
        }
        if m.nrows() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: m.nrows() });
        }
        if !linalg::is_finite(m) {
            return Err(Error::NonFinite { index });
        }
    }
    Ok(dim)
}

fn completeness_deviation(dim: usize, elements: &[CMatrix]) -> f64 {
    let sum = elements
        .iter()
        .fold(CMatrix::zeros(dim, dim), |acc, m| acc + m);
    linalg::max_abs(&(sum - linalg::identity(dim)))
}

/// Shape checks plus Hermiticity, completeness and per-element minimum eigenvalues.
pub fn povm_diagnostics(elements: &[CMatrix]) -> Result<PovmDiagnostics> {
    let dim = check_shapes(elements)?;
    Ok(PovmDiagnostics {
        dim,
        completeness_deviation: completeness_deviation(dim, elements),
        hermiticity_deviation: elements
            .iter()
            .map(linalg::hermiticity_deviation)
            .fold(0.0, f64::max),
        min_eigenvalues: elements.iter().map(linalg::min_eigenvalue).collect(),
    })
}

pub fn validate_povm(elements: Vec<CMatrix>, tol: f64) -> Result<Povm> {
    let dim = check_shapes(&elements)?;
    for (index, m) in elements.iter().enumerate() {
        let deviation = linalg::hermiticity_deviation(m);
        if deviation > tol {
            return Err(Error::NotHermitian { index, deviation });
        }
    }
    let elements: Vec<CMatrix> = elements.iter().map(linalg::hermitian_part).collect();
    for (index, m) in elements.iter().enumerate() {
        let min_eigenvalue = linalg::min_eigenvalue(m);
        if min_eigenvalue < -tol {
            return Err(Error::NotPositive { index, min_eigenvalue });
        }
    }
    let deviation = completeness_deviation(dim, &elements);
    if deviation > tol {
        return Err(Error::NotComplete { deviation });
    }
    Ok(Povm { dim, elements })
}

impl Povm {
    pub fn new(elements: Vec<CMatrix>, tol: f64) -> Result<Self> {
        validate_povm(elements, tol)
    }

    /// Rank-one POVM `{w_j |v_j><v_j|}` with the vectors taken as given.
    pub fn from_weighted_vectors(weights: &[f64], vectors: &[CVector], tol: f64) -> Result<Self> {
        if weights.len() != vectors.len() {
            return Err(Error::DimensionMismatch { expected: weights.len(), found: vectors.len() });
        }
        let elements = weights
            .iter()
            .zip(vectors)
            .map(|(&w, v)| linalg::projector(v).scale(w))
            .collect();
        validate_povm(elements, tol)
    }

    /// Projective measurement on the computational basis.
    pub fn computational_basis(dim: usize) -> Self {
        let elements = (0..dim)
            .map(|j| {
                let mut m = CMatrix::zeros(dim, dim);
                m[(j, j)] = c(1.0, 0.0);
                m
            })
            .collect();
        Self { dim, elements }
    }

    pub fn trivial(dim: usize) -> Self {
        Self { dim, elements: vec![linalg::identity(dim)] }
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of outcomes.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn completeness_deviation(&self) -> f64 {
        completeness_deviation(self.dim, &self.elements)
    }

    /// Outcome probabilities `Tr[rho Pi_j]`, clamped to `[0, 1]`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rho.dim() });
        }
        Ok(self
            .elements
            .iter()
            .map(|m| linalg::trace_product(rho.matrix(), m).clamp(0.0, 1.0))
            .collect())
    }

    /// `<v|Pi_j|v>` for every outcome, unnormalized.
    pub fn vector_weights(&self, v: &CVector) -> Vec<f64> {
        self.elements
            .iter()
            .map(|m| linalg::expectation(m, v).max(0.0))
            .collect()
    }

    /// Conjugates every element by `u`: `Pi_j -> u Pi_j u^dagger`.
    pub fn conjugated(&self, u: &CMatrix) -> Self {
        let elements = self
            .elements
            .iter()
            .map(|m| linalg::hermitian_part(&(u * m * u.adjoint())))
            .collect();
        Self { dim: self.dim, elements }
    }

    /// Reorders outcomes: new outcome `k` is old outcome `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self { dim: self.dim, elements: order.iter().map(|&k| self.elements[k].clone()).collect() }
    }
}

/// Born-rule table `p_{j|i} = Tr[rho_i Pi_j]`, one row per ensemble member.
///
/// Entries are clamped to `[0, 1]`.
pub fn born_matrix(ensemble: &Ensemble, povm: &Povm) -> Result<DMatrix<f64>> {
    if ensemble.dim() != povm.dim() {
        return Err(Error::DimensionMismatch { expected: povm.dim(), found: ensemble.dim() });
    }
    let mut table = DMatrix::zeros(ensemble.len(), povm.len());
    for (i, rho) in ensemble.states().iter().enumerate() {
        for (j, p) in povm.probabilities(rho)?.into_iter().enumerate() {
            table[(i, j)] = p;
        }
    }
    Ok(table)
}

/// `a ⊗ b` with outcome `(j, k)` at index `j * b.len() + k`.
pub fn tensor_povm(a: &Povm, b: &Povm) -> Povm {
    let mut elements = Vec::with_capacity(a.len() * b.len());
    for ea in a.elements() {
        for eb in b.elements() {
            elements.push(ea.kronecker(eb));
        }
    }
    Povm { dim: a.dim * b.dim, elements }
}

pub(crate) fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn gaussian_vector<R: Rng>(dim: usize, real: bool, rng: &mut R) -> CVector {
    CVector::from_fn(dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = if real { 0.0 } else { rng.sample(StandardNormal) };
        c(re, im)
    })
}

fn gaussian_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

fn uniform_pure_ensemble<R: Rng>(dim: usize, count: usize, real: bool, rng: &mut R) -> Result<PureEnsemble> {
    if dim < 2 || count < 1 {
        return Err(Error::InvalidArguments(format!(
            "random ensemble needs dimension >= 2 and at least one state (got D={dim}, M={count})"
        )));
    }
    let weight = (1.0 / count as f64).sqrt();
    let vectors = (0..count)
        .map(|_| loop {
            let v = gaussian_vector(dim, real, rng);
            let norm = v.norm();
            if norm > 1e-300 {
                break v.scale(weight / norm);
            }
        })
        .collect();
    PureEnsemble::from_raw(vectors)
}

/// `count` Haar-random pure states of dimension `dim` with uniform priors.
pub fn random_pure_ensemble(dim: usize, count: usize, seed: u64) -> Result<PureEnsemble> {
    uniform_pure_ensemble(dim, count, false, &mut rng_for(seed))
}

/// As [`random_pure_ensemble`] but with real amplitudes.
pub fn random_real_pure_ensemble(dim: usize, count: usize, seed: u64) -> Result<PureEnsemble> {
    uniform_pure_ensemble(dim, count, true, &mut rng_for(seed))
}

pub(crate) fn random_pure_ensemble_with<R: Rng>(
    dim: usize,
    count: usize,
    real: bool,
    rng: &mut R,
) -> Result<PureEnsemble> {
    uniform_pure_ensemble(dim, count, real, rng)
}

/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
pub fn random_unitary(dim: usize, seed: u64) -> CMatrix {
    let g = gaussian_matrix(dim, dim, &mut rng_for(seed));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = CMatrix::from_diagonal(&CVector::from_fn(dim, |k, _| {
        let d = r[(k, k)];
        if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) }
    }));
    q * phases
}

/// Full-rank random state from the Ginibre (Hilbert-Schmidt) measure.
pub fn random_density_matrix(dim: usize, seed: u64) -> DensityMatrix {
    let g = gaussian_matrix(dim, dim, &mut rng_for(seed));
    let m = &g * g.adjoint();
    let tr = linalg::trace_re(&m);
    DensityMatrix::from_trusted(m.unscale(tr))
}

/// Random `outcomes`-element POVM: `S^{-1/2} G_j S^{-1/2}` for random
/// positive `G_j` of the given rank.
pub fn random_povm(dim: usize, outcomes: usize, rank: usize, seed: u64) -> Result<Povm> {
    if dim == 0 || outcomes == 0 || rank == 0 || rank > dim {
        return Err(Error::InvalidArguments(format!(
            "random POVM needs D>0, N>0, 0<rank<=D (got D={dim}, N={outcomes}, rank={rank})"
        )));
    }
    let mut rng = rng_for(seed);
    let grams: Vec<CMatrix> = (0..outcomes)
        .map(|_| {
            let a = gaussian_matrix(dim, rank, &mut rng);
            &a * a.adjoint()
        })
        .collect();
    let total = grams.iter().fold(CMatrix::zeros(dim, dim), |acc, g| acc + g);
    if linalg::min_eigenvalue(&total) <= 1e-12 {
        return Err(Error::InvalidArguments("random POVM elements do not span the space".into()));
    }
    let inv_sqrt = linalg::psd_inv_sqrt(&total);
    let elements = grams.iter().map(|g| &inv_sqrt * g * &inv_sqrt).collect();
    validate_povm(elements, 1e-8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ket(amps: &[f64]) -> CVector {
        CVector::from_iterator(amps.len(), amps.iter().map(|&a| c(a, 0.0)))
    }

    fn trine_elements() -> Vec<CMatrix> {
        (0..3)
            .map(|j| {
                let t = PI * j as f64 / 3.0;
                linalg::projector(&ket(&[t.cos(), t.sin()])).scale(2.0 / 3.0)
            })
            .collect()
    }

    #[test]
    fn basis_projectors_validate() {
        let e0 = linalg::projector(&ket(&[1.0, 0.0]));
        let e1 = linalg::projector(&ket(&[0.0, 1.0]));
        let povm = validate_povm(vec![e0, e1], DEFAULT_TOL).unwrap();
        assert_eq!(povm.len(), 2);
        assert_eq!(povm.dim(), 2);
    }

    #[test]
    fn trine_validates() {
        let povm = validate_povm(trine_elements(), DEFAULT_TOL).unwrap();
        assert!(povm.completeness_deviation() < 1e-15);
    }

    #[test]
    fn duplicated_projector_is_incomplete() {
        let e0 = linalg::projector(&ket(&[1.0, 0.0]));
        match validate_povm(vec![e0.clone(), e0], DEFAULT_TOL) {
            Err(Error::NotComplete { deviation }) => assert!((deviation - 1.0).abs() < 1e-12),
            other => panic!("expected NotComplete, got {other:?}"),
        }
    }

    #[test]
    fn negative_element_reports_index() {
        let mut bad = trine_elements();
        bad[1] = bad[1].clone() - linalg::identity(2).scale(0.1);
        bad[2] = bad[2].clone() + linalg::identity(2).scale(0.1);
        match validate_povm(bad, DEFAULT_TOL) {
            Err(Error::NotPositive { index, min_eigenvalue }) => {
                assert_eq!(index, 1);
                assert!((min_eigenvalue + 0.1).abs() < 1e-12);
            }
            other => panic!("expected NotPositive, got {other:?}"),
        }
    }

    #[test]
    fn non_hermitian_and_mismatched_inputs_rejected() {
        let mut m = linalg::identity(2);
        m[(0, 1)] = c(0.5, 0.0);
        assert!(matches!(validate_povm(vec![m], DEFAULT_TOL), Err(Error::NotHermitian { index: 0, .. })));
        let r = validate_povm(vec![linalg::identity(2), linalg::identity(3)], DEFAULT_TOL);
        assert!(matches!(r, Err(Error::DimensionMismatch { expected: 2, found: 3 })));
        assert!(matches!(validate_povm(vec![], DEFAULT_TOL), Err(Error::Empty(_))));
    }

    #[test]
    fn ensemble_validation() {
        let zero = DensityMatrix::from_pure(&ket(&[1.0, 0.0])).unwrap();
        let one = DensityMatrix::from_pure(&ket(&[0.0, 1.0])).unwrap();
        let ok = validate_ensemble(vec![(0.5, zero.clone()), (0.5, one.clone())], DEFAULT_TOL).unwrap();
        assert_eq!(ok.len(), 2);
        let err = validate_ensemble(vec![(0.7, zero.clone()), (0.7, one.clone())], DEFAULT_TOL);
        assert!(matches!(err, Err(Error::PriorsNotNormalized { sum }) if (sum - 1.4).abs() < 1e-12));
        let err = validate_ensemble(vec![(-0.5, zero.clone()), (1.5, one.clone())], DEFAULT_TOL);
        assert!(matches!(err, Err(Error::NegativePrior { index: 0, .. })));
        // small deviations are renormalized away
        let near = validate_ensemble(vec![(0.5 + 1e-10, zero), (0.5, one)], DEFAULT_TOL).unwrap();
        assert!((near.priors().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn antitrine_ensemble_is_valid() {
        let vectors: Vec<CVector> = (0..3)
            .map(|i| {
                let t = PI * i as f64 / 3.0;
                ket(&[t.sin(), t.cos()])
            })
            .collect();
        let ens = Ensemble::from_pure_states(&[1.0 / 3.0; 3], &vectors, DEFAULT_TOL).unwrap();
        assert_eq!(ens.len(), 3);
        let avg = ens.average_state();
        assert!(linalg::max_abs(&(avg.matrix() - linalg::identity(2).scale(0.5))) < 1e-15);
    }

    #[test]
    fn density_matrix_checks() {
        let m = linalg::identity(2).scale(0.6);
        assert!(matches!(DensityMatrix::new(m, DEFAULT_TOL), Err(Error::InvalidDensityMatrix(_))));
        let m = CMatrix::from_row_slice(2, 2, &[c(1.2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.2, 0.0)]);
        assert!(matches!(DensityMatrix::new(m, DEFAULT_TOL), Err(Error::InvalidDensityMatrix(_))));
        assert!(DensityMatrix::new(linalg::identity(3).scale(1.0 / 3.0), DEFAULT_TOL).is_ok());
    }

    #[test]
    fn born_matrix_examples() {
        let zero = DensityMatrix::from_pure(&ket(&[1.0, 0.0])).unwrap();
        let one = DensityMatrix::from_pure(&ket(&[0.0, 1.0])).unwrap();
        let ens = validate_ensemble(vec![(0.5, zero), (0.5, one)], DEFAULT_TOL).unwrap();
        let table = born_matrix(&ens, &Povm::computational_basis(2)).unwrap();
        assert_eq!(table, DMatrix::identity(2, 2));

        let table = born_matrix(&ens, &Povm::trivial(2)).unwrap();
        assert_eq!(table, DMatrix::from_element(2, 1, 1.0));

        // antitrine against trine: (2/3) sin^2(theta_i + pi j / 3)
        let vectors: Vec<CVector> = (0..3)
            .map(|i| {
                let t = PI * i as f64 / 3.0;
                ket(&[t.sin(), t.cos()])
            })
            .collect();
        let anti = Ensemble::from_pure_states(&[1.0 / 3.0; 3], &vectors, DEFAULT_TOL).unwrap();
        let trine = validate_povm(trine_elements(), DEFAULT_TOL).unwrap();
        let table = born_matrix(&anti, &trine).unwrap();
        for i in 0..3 {
            let mut row: Vec<f64> = table.row(i).iter().copied().collect();
            row.sort_by(f64::total_cmp);
            assert!(row[0].abs() < 1e-15);
            assert!((row[1] - 0.5).abs() < 1e-15 && (row[2] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn tensor_products() {
        let p = Povm::computational_basis(2);
        let pp = tensor_povm(&p, &p);
        assert_eq!(pp, Povm::computational_basis(4));

        let trine = validate_povm(trine_elements(), DEFAULT_TOL).unwrap();
        let tt = tensor_povm(&trine, &trine);
        assert_eq!(tt.len(), 9);
        assert!(tt.completeness_deviation() < 1e-14);
        for e in tt.elements() {
            let ev = linalg::hermitian_eigenvalues(e);
            assert!(ev[..3].iter().all(|v| v.abs() < 1e-14));
        }

        let padded = tensor_povm(&trine, &Povm::trivial(3));
        assert_eq!(padded.dim(), 6);
        let rho = random_density_matrix(2, 3);
        let sigma = random_density_matrix(3, 4);
        let product = DensityMatrix::from_trusted(rho.matrix().kronecker(sigma.matrix()));
        let lhs = padded.probabilities(&product).unwrap();
        let rhs = trine.probabilities(&rho).unwrap();
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn random_ensembles_are_reproducible_and_uniform() {
        let a = random_pure_ensemble(2, 4, 7).unwrap();
        let b = random_pure_ensemble(2, 4, 7).unwrap();
        assert_eq!(a, b);
        for p in a.priors() {
            assert!((p - 0.25).abs() < 1e-15);
        }
        assert_ne!(a, random_pure_ensemble(2, 4, 8).unwrap());
        assert!(random_pure_ensemble(1, 4, 0).is_err());
        assert!(random_pure_ensemble(2, 0, 0).is_err());
    }

    #[test]
    fn random_states_average_to_maximally_mixed() {
        // Monte-Carlo check of unitary invariance: 400 seeds x 9 states.
        let mut avg = CMatrix::zeros(3, 3);
        let seeds = 400;
        for seed in 0..seeds {
            avg += random_pure_ensemble(3, 9, seed).unwrap().average_state().matrix();
        }
        avg.unscale_mut(seeds as f64);
        // each entry is a mean of 3600 samples with std ~ 1/3 / sqrt(3600 * 4) or less
        assert!(linalg::max_abs(&(avg - linalg::identity(3).scale(1.0 / 3.0))) < 0.02);
    }

    #[test]
    fn random_povm_and_unitary_are_valid() {
        let povm = random_povm(3, 5, 1, 11).unwrap();
        assert_eq!(povm.len(), 5);
        let u = random_unitary(3, 2);
        assert!(linalg::max_abs(&(&u * u.adjoint() - linalg::identity(3))) < 1e-12);
    }
}
