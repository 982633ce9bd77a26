//! Entropy functionals and the mutual information between an ensemble index
//! and a measurement outcome. All results are in bits.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::quantum::{born_matrix, DensityMatrix, Ensemble, Povm, PureEnsemble, DEFAULT_TOL};

/// Joint probabilities at or below this contribute nothing (limit of `x log x`).
pub const ZERO_PROBABILITY: f64 = 1e-15;

/// Eigenvalues closer than this are treated as coincident in [`subentropy`].
pub const SUBENTROPY_DEGENERACY: f64 = 1e-6;

/// A validated discrete distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(entries: Vec<f64>, tol: f64) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        if let Some(bad) = entries.iter().find(|p| !p.is_finite() || **p < -tol) {
            return Err(Error::InvalidDistribution(format!("entry {bad} is negative or not finite")));
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
        }
        Ok(Self(entries.into_iter().map(|p| p.max(0.0)).collect()))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn plogp(p: f64) -> f64 {
    if p <= ZERO_PROBABILITY {
        0.0
    } else {
        p * p.log2()
    }
}

/// `H(p) = -sum p log2 p`.
pub fn shannon_entropy(p: &ProbabilityVector) -> f64 {
    entropy_bits(p.as_slice())
}

/// Shannon entropy of an unchecked slice; callers guarantee it is a distribution.
pub(crate) fn entropy_bits(p: &[f64]) -> f64 {
    -p.iter().map(|&x| plogp(x)).sum::<f64>()
}

/// `I = sum_ij p_i p_{j|i} log2(p_{j|i} / q_j)` for a row-stochastic table.
pub fn mutual_information_from_table(priors: &[f64], table: &DMatrix<f64>) -> Result<f64> {
    if priors.len() != table.nrows() {
        return Err(Error::DimensionMismatch { expected: table.nrows(), found: priors.len() });
    }
    let output = output_distribution(priors, table);
    let mut total = 0.0;
    for (i, &p) in priors.iter().enumerate() {
        for (j, &q) in output.iter().enumerate() {
            let cond = table[(i, j)];
            let joint = p * cond;
            if joint > ZERO_PROBABILITY {
                total += joint * (cond / q).log2();
            }
        }
    }
    Ok(total)
}

/// `q_j = sum_i p_i p_{j|i}`.
pub fn output_distribution(priors: &[f64], table: &DMatrix<f64>) -> Vec<f64> {
    (0..table.ncols())
        .map(|j| priors.iter().enumerate().map(|(i, p)| p * table[(i, j)]).sum())
        .collect()
}

/// Mutual information between ensemble label and POVM outcome.
pub fn mutual_information(ensemble: &Ensemble, povm: &Povm) -> Result<f64> {
    let table = born_matrix(ensemble, povm)?;
    mutual_information_from_table(ensemble.priors(), &table)
}

/// Same quantity through `H(Y) - H(Y|X)`; kept as an independent route.
pub fn mutual_information_via_entropies(ensemble: &Ensemble, povm: &Povm) -> Result<f64> {
    let table = born_matrix(ensemble, povm)?;
    let output = output_distribution(ensemble.priors(), &table);
    let conditional: f64 = ensemble
        .priors()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let row: Vec<f64> = table.row(i).iter().copied().collect();
            p * entropy_bits(&row)
        })
        .sum();
    Ok(entropy_bits(&output) - conditional)
}

/// Joint weights `a_ij = <psi_i|Pi_j|psi_i>` of a weight-carrying ensemble.
pub(crate) fn joint_weights(ensemble: &PureEnsemble, povm: &Povm) -> Result<DMatrix<f64>> {
    if ensemble.dim() != povm.dim() {
        return Err(Error::DimensionMismatch { expected: povm.dim(), found: ensemble.dim() });
    }
    let mut a = DMatrix::zeros(ensemble.len(), povm.len());
    for (i, v) in ensemble.vectors().iter().enumerate() {
        for (j, w) in povm.vector_weights(v).into_iter().enumerate() {
            a[(i, j)] = w;
        }
    }
    Ok(a)
}

/// Mutual information of a weight-carrying ensemble, with the vectors'
/// total weight normalized away.
pub fn pure_mutual_information(ensemble: &PureEnsemble, povm: &Povm) -> Result<f64> {
    let a = joint_weights(ensemble, povm)?;
    let total = ensemble.total_weight();
    let weights = ensemble.priors();
    let q: Vec<f64> = a.column_iter().map(|col| col.sum()).collect();
    let mut sum = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        for (j, &qj) in q.iter().enumerate() {
            let aij = a[(i, j)];
            if aij / total > ZERO_PROBABILITY {
                sum += aij * (aij * total / (w * qj)).log2();
            }
        }
    }
    Ok(sum / total)
}

/// `S(rho) = -sum lambda log2 lambda`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_bits(&rho.eigenvalues())
}

/// `chi = S(sum p_i rho_i) - sum p_i S(rho_i)`.
pub fn holevo_quantity(ensemble: &Ensemble) -> f64 {
    let mixed: f64 = ensemble.iter().map(|(p, rho)| p * von_neumann_entropy(rho)).sum();
    von_neumann_entropy(&ensemble.average_state()) - mixed
}

// k-th derivative of x^n ln x divided by k!, for k < n.
fn scaled_derivative(x: f64, n: usize, k: usize) -> f64 {
    let binom = (0..k).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64);
    if x <= 0.0 {
        return 0.0;
    }
    let harmonic: f64 = ((n - k + 1)..=n).map(|t| 1.0 / t as f64).sum();
    binom * x.powi((n - k) as i32) * (x.ln() + harmonic)
}

/// Subentropy `Q(rho) = -sum_k (prod_{l!=k} l_k / (l_k - l_l)) l_k log2 l_k`.
///
/// The sum equals minus the divided difference of `f(x) = x^D log2 x` over
/// the spectrum, which is evaluated with a confluent (Hermite) table so that
/// repeated eigenvalues get the exact limiting value.
pub fn subentropy(rho: &DensityMatrix) -> f64 {
    subentropy_of_spectrum(&rho.eigenvalues())
}

pub fn subentropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    let n = eigenvalues.len();
    let mut x: Vec<f64> = eigenvalues.iter().map(|v| v.max(0.0)).collect();
    x.sort_by(f64::total_cmp);
    // snap near-coincident eigenvalues onto a shared node
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && x[end] - x[start] < SUBENTROPY_DEGENERACY {
            end += 1;
        }
        let mean = x[start..end].iter().sum::<f64>() / (end - start) as f64;
        x[start..end].iter_mut().for_each(|v| *v = mean);
        start = end;
    }
    // table[i] holds f[x_i, ..., x_{i+level}]
    let mut table: Vec<f64> = x.iter().map(|&v| scaled_derivative(v, n, 0)).collect();
    for level in 1..n {
        for i in 0..n - level {
            let (lo, hi) = (x[i], x[i + level]);
            table[i] = if hi == lo {
                scaled_derivative(lo, n, level)
            } else {
                (table[i + 1] - table[i]) / (hi - lo)
            };
        }
    }
    -table[0] / std::f64::consts::LN_2
}

/// `Q(rho_R) - sum_i p_i Q(rho_i)`; returned as-is even when negative.
pub fn subentropy_lower_bound(ensemble: &Ensemble) -> f64 {
    let members: f64 = ensemble.iter().map(|(p, rho)| p * subentropy(rho)).sum();
    subentropy(&ensemble.average_state()) - members
}

/// Holevo upper bound and subentropy lower bound on accessible information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsReport {
    pub holevo_chi: f64,
    pub subentropy_bound: f64,
}

pub fn bounds(ensemble: &Ensemble) -> BoundsReport {
    BoundsReport {
        holevo_chi: holevo_quantity(ensemble),
        subentropy_bound: subentropy_lower_bound(ensemble),
    }
}

/// Output distribution of the quantum-classical channel `rho -> sum_j Tr[rho Pi_j] |j><j|`.
pub fn apply_qc_channel(povm: &Povm, rho: &DensityMatrix) -> Result<ProbabilityVector> {
    let probs = povm.probabilities(rho)?;
    ProbabilityVector::new(probs, DEFAULT_TOL)
}
