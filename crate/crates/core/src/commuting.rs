//! Measurements whose elements commute.
//!
//! Such a POVM is diagonal in a common eigenbasis, and a maximally
//! informative ensemble can be built from at most `D` of those eigenvectors.
//! What remains is a classical channel-capacity problem over the priors,
//! solved here by the Blahut–Arimoto iteration.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::info::mutual_information_from_table;
use crate::linalg::{self, CMatrix, CVector};
use crate::quantum::{Povm, PureEnsemble};

pub const DEFAULT_COMMUTATOR_TOL: f64 = 1e-9;

/// Seed for the random linear combination used to split the spectrum.
const COMBINATION_SEED: u64 = 0x5eed_c0de;

/// Blahut–Arimoto stops when the capacity bracket is narrower than this (bits).
pub const CAPACITY_TOL: f64 = 1e-12;
const MAX_BLAHUT_ITERS: usize = 200_000;

/// Orthonormal basis diagonalizing every POVM element.
#[derive(Debug, Clone, PartialEq)]
pub struct CommonEigenbasis {
    pub basis: Vec<CVector>,
    /// `table[(i, j)] = <i|P_j|i>`; rows are basis vectors, columns outcomes.
    pub table: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EigenbasisOutcome {
    Common(CommonEigenbasis),
    NotCommuting { max_commutator: f64 },
}

impl EigenbasisOutcome {
    pub fn common(self) -> Option<CommonEigenbasis> {
        match self {
            EigenbasisOutcome::Common(basis) => Some(basis),
            EigenbasisOutcome::NotCommuting { .. } => None,
        }
    }
}

pub fn max_commutator(povm: &Povm) -> f64 {
    let elements = povm.elements();
    let mut worst: f64 = 0.0;
    for (j, a) in elements.iter().enumerate() {
        for b in &elements[j + 1..] {
            worst = worst.max(linalg::max_abs(&(a * b - b * a)));
        }
    }
    worst
}

// Splits a block of orthonormal columns into joint eigenvectors of elements[from..].
fn split_block(block: Vec<CVector>, elements: &[CMatrix], tol: f64, out: &mut Vec<CVector>) {
    if block.len() == 1 || elements.is_empty() {
        out.extend(block);
        return;
    }
    let dim = block[0].len();
    let basis = CMatrix::from_columns(&block);
    let restricted = basis.adjoint() * &elements[0] * &basis;
    let (values, vectors) = linalg::hermitian_eigen(&restricted);
    let rotated = &basis * vectors;
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && values[end] - values[end - 1] <= tol.max(1e-12) * 10.0 {
            end += 1;
        }
        let sub: Vec<CVector> = (start..end).map(|k| CVector::from_column_slice(rotated.column(k).as_slice())).collect();
        debug_assert!(sub.iter().all(|v| v.len() == dim));
        split_block(sub, &elements[1..], tol, out);
        start = end;
    }
}

/// Simultaneous eigenbasis of a commuting POVM, or the size of the largest
/// commutator when the elements do not commute within `tol`.
pub fn common_eigenbasis(povm: &Povm, tol: f64) -> EigenbasisOutcome {
    let max_comm = max_commutator(povm);
    if max_comm > tol {
        return EigenbasisOutcome::NotCommuting { max_commutator: max_comm };
    }
    let dim = povm.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(COMBINATION_SEED);
    let mut combination = CMatrix::zeros(dim, dim);
    for element in povm.elements() {
        combination += element.scale(rng.random_range(0.5..1.5));
    }
    let identity_block: Vec<CVector> = (0..dim)
        .map(|k| CVector::from_fn(dim, |r, _| linalg::c(if r == k { 1.0 } else { 0.0 }, 0.0)))
        .collect();
    // the combination first, then each element to break accidental degeneracy
    let mut sequence = Vec::with_capacity(povm.len() + 1);
    sequence.push(combination);
    sequence.extend(povm.elements().iter().cloned());
    let mut basis = Vec::with_capacity(dim);
    split_block(identity_block, &sequence, tol, &mut basis);

    let mut table = DMatrix::zeros(dim, povm.len());
    let mut off_diagonal: f64 = 0.0;
    let frame = CMatrix::from_columns(&basis);
    for (j, element) in povm.elements().iter().enumerate() {
        let rotated = frame.adjoint() * element * &frame;
        for r in 0..dim {
            table[(r, j)] = rotated[(r, r)].re.max(0.0);
            for s in 0..dim {
                if r != s {
                    off_diagonal = off_diagonal.max(rotated[(r, s)].norm());
                }
            }
        }
    }
    if off_diagonal > tol.max(1e-12) * 100.0 {
        return EigenbasisOutcome::NotCommuting { max_commutator: max_comm.max(off_diagonal) };
    }
    EigenbasisOutcome::Common(CommonEigenbasis { basis, table })
}

/// Capacity-achieving priors of a classical channel.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorSolution {
    pub priors: Vec<f64>,
    /// Mutual information at `priors`, in bits.
    pub power: f64,
    /// Upper bound on `capacity - power`, in bits.
    pub gap: f64,
    pub iterations: usize,
}

fn validate_table(table: &DMatrix<f64>) -> Result<()> {
    if table.nrows() == 0 || table.ncols() == 0 {
        return Err(Error::InvalidTable("empty table".into()));
    }
    for (i, row) in table.row_iter().enumerate() {
        if row.iter().any(|p| !p.is_finite() || *p < -1e-12) {
            return Err(Error::InvalidTable(format!("row {i} has a negative or non-finite entry")));
        }
        let sum: f64 = row.sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidTable(format!("row {i} sums to {sum}")));
        }
    }
    Ok(())
}

/// Relative entropy `D(W_i || q)` in nats for every input row.
fn divergences(table: &DMatrix<f64>, output: &[f64]) -> Vec<f64> {
    table
        .row_iter()
        .map(|row| {
            row.iter()
                .zip(output)
                .filter(|(w, _)| **w > 0.0)
                .map(|(w, q)| w * (w / q).ln())
                .sum()
        })
        .collect()
}

/// Per-input divergences `D(p_{.|i} || q)` in bits at the given priors.
pub fn input_divergences(table: &DMatrix<f64>, priors: &[f64]) -> Vec<f64> {
    let output = crate::info::output_distribution(priors, table);
    divergences(table, &output)
        .into_iter()
        .map(|d| d / std::f64::consts::LN_2)
        .collect()
}

/// Maximizes mutual information over input priors for a row-stochastic
/// table (`table[(i, j)] = p(j | i)`).
pub fn optimize_priors(table: &DMatrix<f64>) -> Result<PriorSolution> {
    validate_table(table)?;
    let table = table.map(|p| p.max(0.0));
    let inputs = table.nrows();
    let mut priors = vec![1.0 / inputs as f64; inputs];
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    while iterations < MAX_BLAHUT_ITERS {
        let output = crate::info::output_distribution(&priors, &table);
        let factors: Vec<f64> = divergences(&table, &output).into_iter().map(f64::exp).collect();
        let norm: f64 = priors.iter().zip(&factors).map(|(p, c)| p * c).sum();
        let upper = factors.iter().copied().fold(f64::MIN, f64::max).ln();
        gap = (upper - norm.ln()) / std::f64::consts::LN_2;
        if gap < CAPACITY_TOL {
            break;
        }
        priors.iter_mut().zip(&factors).for_each(|(p, c)| *p *= c / norm);
        iterations += 1;
    }
    let power = mutual_information_from_table(&priors, &table)?;
    Ok(PriorSolution { priors, power, gap: gap.max(0.0), iterations })
}

/// Informational power of a commuting POVM and an optimal ensemble built
/// from the common eigenvectors.
#[derive(Debug, Clone)]
pub struct CommutingSolution {
    pub power: f64,
    pub ensemble: PureEnsemble,
    pub priors: Vec<f64>,
    pub eigenbasis: CommonEigenbasis,
    pub iterations: usize,
}

/// Priors below this are dropped from the returned ensemble.
pub const PRIOR_PRUNE: f64 = 1e-12;

pub fn commuting_power(povm: &Povm) -> Result<CommutingSolution> {
    commuting_power_with_tol(povm, DEFAULT_COMMUTATOR_TOL)
}

pub fn commuting_power_with_tol(povm: &Povm, tol: f64) -> Result<CommutingSolution> {
    let eigenbasis = match common_eigenbasis(povm, tol) {
        EigenbasisOutcome::Common(basis) => basis,
        EigenbasisOutcome::NotCommuting { max_commutator } => {
            return Err(Error::NotCommuting { max_commutator });
        }
    };
    let solution = optimize_priors(&eigenbasis.table)?;
    let (priors, directions): (Vec<f64>, Vec<CVector>) = solution
        .priors
        .iter()
        .zip(&eigenbasis.basis)
        .filter(|(p, _)| **p >= PRIOR_PRUNE)
        .map(|(p, v)| (*p, v.clone()))
        .unzip();
    let total: f64 = priors.iter().sum();
    let priors: Vec<f64> = priors.iter().map(|p| p / total).collect();
    let ensemble = PureEnsemble::from_priors(&priors, &directions, 1e-9)?;
    Ok(CommutingSolution { power: solution.power, ensemble, priors, eigenbasis, iterations: solution.iterations })
}

/// Closed-form power of the projective measurement on `dim` basis states
/// mixed with isotropic noise: `log D - H(Y|X)`.
pub fn noisy_projective_power(dim: usize, eta: f64) -> Result<f64> {
    if dim < 1 || !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidArguments(format!("need D >= 1 and eta in [0, 1], got D={dim}, eta={eta}")));
    }
    let d = dim as f64;
    if eta == 0.0 {
        return Ok(0.0);
    }
    if eta == 1.0 {
        return Ok(d.log2());
    }
    let hit = eta + (1.0 - eta) / d;
    let miss = (1.0 - eta) / d;
    let xlogx = |x: f64| if x > 0.0 { x * x.log2() } else { 0.0 };
    let conditional = -xlogx(hit) - (d - 1.0) * xlogx(miss);
    Ok((d.log2() - conditional).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::info::pure_mutual_information;

    #[test]
    fn noisy_projective_has_standard_basis() {
        for eta in [0.0, 0.3, 1.0] {
            let povm = catalog::noisy_projective_povm(3, eta).unwrap().povm;
            let basis = common_eigenbasis(&povm, DEFAULT_COMMUTATOR_TOL).common().unwrap();
            for v in &basis.basis {
                let hits = v.iter().filter(|z| z.norm() > 1e-9).count();
                assert_eq!(hits, 1, "eta={eta}: {v}");
            }
            for row in basis.table.row_iter() {
                assert!((row.sum() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn trine_does_not_commute() {
        let trine = catalog::trine().povm;
        match common_eigenbasis(&trine, DEFAULT_COMMUTATOR_TOL) {
            EigenbasisOutcome::NotCommuting { max_commutator } => assert!(max_commutator > 0.1),
            other => panic!("expected NotCommuting, got {other:?}"),
        }
        assert!(matches!(commuting_power(&trine), Err(Error::NotCommuting { .. })));
    }

    #[test]
    fn half_identities_accept_any_basis() {
        let half = linalg::identity(2).scale(0.5);
        let povm = Povm::new(vec![half.clone(), half], 1e-9).unwrap();
        let basis = common_eigenbasis(&povm, DEFAULT_COMMUTATOR_TOL).common().unwrap();
        let frame = CMatrix::from_columns(&basis.basis);
        assert!(linalg::max_abs(&(frame.adjoint() * &frame - linalg::identity(2))) < 1e-12);
        let solution = commuting_power(&povm).unwrap();
        assert!(solution.power.abs() < 1e-12);
    }

    #[test]
    fn degenerate_block_is_split_by_later_elements() {
        // P0 = diag(1,1,0)/2 + ..., chosen so a combination is degenerate only on a 2-block
        let mut p0 = CMatrix::zeros(3, 3);
        p0[(0, 0)] = linalg::c(0.5, 0.0);
        p0[(1, 1)] = linalg::c(0.5, 0.0);
        let mut p1 = CMatrix::zeros(3, 3);
        p1[(0, 0)] = linalg::c(0.5, 0.0);
        p1[(2, 2)] = linalg::c(1.0, 0.0);
        let mut p2 = CMatrix::zeros(3, 3);
        p2[(1, 1)] = linalg::c(0.5, 0.0);
        let povm = Povm::new(vec![p0, p1, p2], 1e-9).unwrap();
        let basis = common_eigenbasis(&povm, DEFAULT_COMMUTATOR_TOL).common().unwrap();
        let mut rows: Vec<Vec<f64>> = basis.table.row_iter().map(|r| r.iter().map(|x| (x * 1e9).round() / 1e9).collect()).collect();
        rows.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(rows, vec![vec![0.0, 1.0, 0.0], vec![0.5, 0.0, 0.5], vec![0.5, 0.5, 0.0]]);
    }

    #[test]
    fn noiseless_channel_capacity() {
        let solution = optimize_priors(&DMatrix::identity(3, 3)).unwrap();
        assert!((solution.power - 3f64.log2()).abs() < 1e-12);
        for p in &solution.priors {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn noisy_binary_table() {
        let table = DMatrix::from_row_slice(2, 2, &[0.75, 0.25, 0.25, 0.75]);
        let solution = optimize_priors(&table).unwrap();
        assert!((solution.power - noisy_projective_power(2, 0.5).unwrap()).abs() < 1e-12);
        assert!((solution.power - 0.188722).abs() < 1e-6);
        assert!((solution.priors[0] - 0.5).abs() < 1e-12);
    }

    // capacity of the Z-channel by a 1-D grid search with golden-section refinement
    fn z_channel_brute_force() -> f64 {
        let table = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.5, 0.5]);
        let f = |p: f64| mutual_information_from_table(&[1.0 - p, p], &table).unwrap();
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let a = hi - g * (hi - lo);
            let b = lo + g * (hi - lo);
            if f(a) < f(b) { lo = a } else { hi = b }
        }
        f(0.5 * (lo + hi))
    }

    #[test]
    fn z_channel_capacity() {
        let oracle = z_channel_brute_force();
        assert!((oracle - 1.25f64.log2()).abs() < 1e-12);
        let table = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.5, 0.5]);
        let solution = optimize_priors(&table).unwrap();
        assert!((solution.power - oracle).abs() < 1e-10);
        assert!((solution.priors[1] - 0.4).abs() < 1e-6);
    }

    #[test]
    fn invalid_tables_rejected() {
        assert!(matches!(optimize_priors(&DMatrix::from_row_slice(1, 2, &[0.5, 0.6])), Err(Error::InvalidTable(_))));
        assert!(matches!(optimize_priors(&DMatrix::from_row_slice(1, 2, &[-0.5, 1.5])), Err(Error::InvalidTable(_))));
        assert!(matches!(optimize_priors(&DMatrix::zeros(0, 0)), Err(Error::InvalidTable(_))));
    }

    #[test]
    fn commuting_power_examples() {
        let solution = commuting_power(&Povm::computational_basis(3)).unwrap();
        assert!((solution.power - 3f64.log2()).abs() < 1e-12);
        assert_eq!(solution.ensemble.len(), 3);

        let povm = catalog::noisy_projective_povm(4, 0.7).unwrap().povm;
        let solution = commuting_power(&povm).unwrap();
        assert!((solution.power - noisy_projective_power(4, 0.7).unwrap()).abs() < 1e-9);
        let direct = pure_mutual_information(&solution.ensemble, &povm).unwrap();
        assert!((direct - solution.power).abs() < 1e-12);
    }

    #[test]
    fn dead_inputs_are_pruned() {
        // input 2 is a copy of input 0 mixed with input 1; it never helps
        let mut p0 = CMatrix::zeros(3, 3);
        p0[(0, 0)] = linalg::c(1.0, 0.0);
        p0[(2, 2)] = linalg::c(0.5, 0.0);
        let mut p1 = CMatrix::zeros(3, 3);
        p1[(1, 1)] = linalg::c(1.0, 0.0);
        p1[(2, 2)] = linalg::c(0.5, 0.0);
        let povm = Povm::new(vec![p0, p1], 1e-9).unwrap();
        let solution = commuting_power(&povm).unwrap();
        assert!((solution.power - 1.0).abs() < 1e-9);
        let mixed = (0..3).find(|&r| (solution.eigenbasis.table[(r, 0)] - 0.5).abs() < 1e-9).unwrap();
        let full = optimize_priors(&solution.eigenbasis.table).unwrap();
        assert!(full.priors[mixed] < 1e-11);
    }

    #[test]
    fn closed_form_endpoints() {
        for d in 2..=4 {
            assert!((noisy_projective_power(d, 1.0).unwrap() - (d as f64).log2()).abs() < 1e-15);
            assert_eq!(noisy_projective_power(d, 0.0).unwrap(), 0.0);
        }
        let direct = 1.0 - (-(0.75 * 0.75f64.log2() + 0.25 * 0.25f64.log2()));
        assert!((noisy_projective_power(2, 0.5).unwrap() - direct).abs() < 1e-15);
        assert!(noisy_projective_power(2, 1.5).is_err());
        assert!(noisy_projective_power(0, 0.5).is_err());
    }
}
