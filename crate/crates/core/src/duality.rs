//! The correspondence between ensembles and measurements: the pretty-good
//! measurement of an ensemble and the ensemble induced by a POVM and a
//! reference state. Mutual information is preserved under the pair of maps.

use crate::error::{Error, Result};
use crate::info::mutual_information;
use crate::linalg::{self, CMatrix};
use crate::quantum::{validate_ensemble, validate_povm, DensityMatrix, Ensemble, Povm};

/// Minimum eigenvalue below which an average state counts as singular.
pub const SINGULAR_TOL: f64 = 1e-10;

/// Tolerance used to validate the maps' outputs.
const OUTPUT_TOL: f64 = 1e-8;

/// `{q_i sigma^{-1/2} sigma_i sigma^{-1/2}}` with `sigma = sum_i q_i sigma_i`.
pub fn pretty_good_measurement(ensemble: &Ensemble) -> Result<Povm> {
    pretty_good_measurement_with_ridge(ensemble, 0.0)
}

/// As [`pretty_good_measurement`], with `ridge * 1` added to the average
/// state before inversion and the result renormalized to a POVM. A zero
/// ridge reproduces the unregularized map.
pub fn pretty_good_measurement_with_ridge(ensemble: &Ensemble, ridge: f64) -> Result<Povm> {
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(Error::InvalidArguments(format!("ridge must be nonnegative, got {ridge}")));
    }
    let dim = ensemble.dim();
    let mut average = ensemble.average_state().matrix().clone();
    let min_eigenvalue = linalg::min_eigenvalue(&average);
    if ridge == 0.0 && min_eigenvalue <= SINGULAR_TOL {
        return Err(Error::SingularAverageState { min_eigenvalue });
    }
    let mut weighted: Vec<CMatrix> = ensemble.iter().map(|(q, s)| s.matrix().scale(q)).collect();
    if ridge > 0.0 {
        average += linalg::identity(dim).scale(ridge);
        // spread the ridge evenly so the elements still sum to the identity
        let share = linalg::identity(dim).scale(ridge / ensemble.len() as f64);
        weighted.iter_mut().for_each(|w| *w += &share);
    }
    let inv_sqrt = linalg::psd_inv_sqrt(&average);
    let elements = weighted.iter().map(|w| &inv_sqrt * w * &inv_sqrt).collect();
    validate_povm(elements, OUTPUT_TOL)
}

/// Output of [`dual_ensemble`]: the ensemble plus the outcomes that were
/// dropped for having zero probability under the reference state.
#[derive(Debug, Clone, PartialEq)]
pub struct DualEnsemble {
    pub ensemble: Ensemble,
    /// POVM indices of the kept states, in order.
    pub kept: Vec<usize>,
    pub dropped: Vec<usize>,
}

impl DualEnsemble {
    pub fn has_dropped(&self) -> bool {
        !self.dropped.is_empty()
    }
}

/// Probability below which an outcome is dropped from the dual ensemble.
pub const DROP_TOL: f64 = 1e-14;

/// `{Tr[sigma L_j], sigma^{1/2} L_j sigma^{1/2} / Tr[sigma L_j]}`.
pub fn dual_ensemble(povm: &Povm, sigma: &DensityMatrix) -> Result<DualEnsemble> {
    if sigma.dim() != povm.dim() {
        return Err(Error::DimensionMismatch { expected: povm.dim(), found: sigma.dim() });
    }
    let root = linalg::psd_sqrt(sigma.matrix());
    let mut items = Vec::with_capacity(povm.len());
    let (mut kept, mut dropped) = (Vec::new(), Vec::new());
    for (j, element) in povm.elements().iter().enumerate() {
        let prior = linalg::trace_product(sigma.matrix(), element);
        if prior <= DROP_TOL {
            dropped.push(j);
            continue;
        }
        let state = (&root * element * &root).unscale(prior);
        items.push((prior, DensityMatrix::new(state, OUTPUT_TOL)?));
        kept.push(j);
    }
    if items.is_empty() {
        return Err(Error::InvalidDensityMatrix("reference state is orthogonal to every POVM element".into()));
    }
    let ensemble = validate_ensemble(items, OUTPUT_TOL)?;
    Ok(DualEnsemble { ensemble, kept, dropped })
}

/// An ensemble, its average state, and its pretty-good measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPair {
    pub povm: Povm,
    pub reference_state: DensityMatrix,
    pub ensemble: Ensemble,
}

impl DualPair {
    pub fn from_ensemble(ensemble: Ensemble) -> Result<Self> {
        let povm = pretty_good_measurement(&ensemble)?;
        Ok(Self { povm, reference_state: ensemble.average_state(), ensemble })
    }

    /// Builds the pair from a POVM and reference state. Fails if any
    /// outcome has zero probability, since the pair would not round-trip.
    pub fn from_povm(povm: Povm, sigma: DensityMatrix) -> Result<Self> {
        let dual = dual_ensemble(&povm, &sigma)?;
        if dual.has_dropped() {
            return Err(Error::InvalidArguments(format!(
                "outcomes {:?} have zero probability under the reference state",
                dual.dropped
            )));
        }
        Ok(Self { povm, reference_state: sigma, ensemble: dual.ensemble })
    }
}

/// `|I(S, L) - I(R(L, sigma_S), Pi(S))|`.
pub fn duality_gap(ensemble: &Ensemble, povm: &Povm) -> Result<f64> {
    let sigma = ensemble.average_state();
    let pgm = pretty_good_measurement(ensemble)?;
    let dual = dual_ensemble(povm, &sigma)?;
    let direct = mutual_information(ensemble, povm)?;
    let swapped = mutual_information(&dual.ensemble, &pgm)?;
    Ok((direct - swapped).abs())
}

/// Largest entrywise deviation between two POVMs with the same outcome count.
pub fn povm_deviation(a: &Povm, b: &Povm) -> Result<f64> {
    if a.len() != b.len() || a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    Ok(a.elements()
        .iter()
        .zip(b.elements())
        .map(|(x, y)| linalg::max_abs(&(x - y)))
        .fold(0.0, f64::max))
}

/// Largest deviation across priors and state entries, member by member.
pub fn ensemble_deviation(a: &Ensemble, b: &Ensemble) -> Result<f64> {
    if a.len() != b.len() || a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    Ok(a.iter()
        .zip(b.iter())
        .map(|((p, r), (q, s))| (p - q).abs().max(linalg::max_abs(&(r.matrix() - s.matrix()))))
        .fold(0.0, f64::max))
}

/// Deviation of `Pi(R(L, sigma))` from `L`.
pub fn povm_round_trip_deviation(povm: &Povm, sigma: &DensityMatrix) -> Result<f64> {
    let pair = DualPair::from_povm(povm.clone(), sigma.clone())?;
    let back = pretty_good_measurement(&pair.ensemble)?;
    povm_deviation(&back, povm)
}

/// Deviation of `R(Pi(S), sigma_S)` from `S`.
pub fn ensemble_round_trip_deviation(ensemble: &Ensemble) -> Result<f64> {
    let pair = DualPair::from_ensemble(ensemble.clone())?;
    let dual = dual_ensemble(&pair.povm, &pair.reference_state)?;
    if dual.has_dropped() {
        return Err(Error::InvalidArguments("ensemble has zero-weight members".into()));
    }
    ensemble_deviation(&dual.ensemble, ensemble)
}

fn sigma_z(dim: usize) -> CMatrix {
    let mut z = linalg::identity(dim);
    z[(dim - 1, dim - 1)] = linalg::c(-1.0, 0.0);
    z
}

/// True when the qubit POVM is real and closed under `L -> Z L Z`.
pub fn is_mirror_symmetric_povm(povm: &Povm, tol: f64) -> bool {
    povm.dim() == 2 && is_real(povm.elements().iter()) && closed_under_reflection(povm.elements(), tol)
}

/// True when the qubit ensemble is real and closed under `rho -> Z rho Z`
/// with matching priors.
pub fn is_mirror_symmetric_ensemble(ensemble: &Ensemble, tol: f64) -> bool {
    if ensemble.dim() != 2 || !is_real(ensemble.states().iter().map(|s| s.matrix())) {
        return false;
    }
    let weighted: Vec<CMatrix> = ensemble.iter().map(|(p, s)| s.matrix().scale(p)).collect();
    closed_under_reflection(&weighted, tol)
}

fn is_real<'a>(mut matrices: impl Iterator<Item = &'a CMatrix>) -> bool {
    matrices.all(|m| m.iter().all(|z| z.im.abs() <= 1e-12))
}

fn closed_under_reflection(matrices: &[CMatrix], tol: f64) -> bool {
    let z = sigma_z(2);
    let mut used = vec![false; matrices.len()];
    for m in matrices {
        let mirrored = &z * m * &z;
        let partner = (0..matrices.len())
            .find(|&k| !used[k] && linalg::max_abs(&(&matrices[k] - &mirrored)) <= tol);
        match partner {
            Some(k) => used[k] = true,
            None => return false,
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, CVector};
    use crate::quantum::{random_povm, DEFAULT_TOL};
    use std::f64::consts::PI;

    fn ket(amps: &[f64]) -> CVector {
        CVector::from_iterator(amps.len(), amps.iter().map(|&a| c(a, 0.0)))
    }

    fn antitrine() -> Ensemble {
        let vs: Vec<CVector> = (0..3).map(|i| {
            let t = PI * i as f64 / 3.0;
            ket(&[t.sin(), t.cos()])
        }).collect();
        Ensemble::from_pure_states(&[1.0 / 3.0; 3], &vs, DEFAULT_TOL).unwrap()
    }

    fn trine() -> Povm {
        let vs: Vec<CVector> = (0..3).map(|j| {
            let t = PI * j as f64 / 3.0;
            ket(&[t.cos(), t.sin()])
        }).collect();
        Povm::from_weighted_vectors(&[2.0 / 3.0; 3], &vs, DEFAULT_TOL).unwrap()
    }

    fn basis_ensemble(dim: usize) -> Ensemble {
        let vs: Vec<CVector> = (0..dim).map(|i| CVector::from_fn(dim, |r, _| c(if r == i { 1.0 } else { 0.0 }, 0.0))).collect();
        Ensemble::from_pure_states(&vec![1.0 / dim as f64; dim], &vs, DEFAULT_TOL).unwrap()
    }

    #[test]
    fn pgm_of_orthonormal_basis_is_projective() {
        let pgm = pretty_good_measurement(&basis_ensemble(3)).unwrap();
        assert!(povm_deviation(&pgm, &Povm::computational_basis(3)).unwrap() < 1e-14);
    }

    #[test]
    fn pgm_of_antitrine_is_symmetric_triple() {
        let anti = antitrine();
        let pgm = pretty_good_measurement(&anti).unwrap();
        for (element, (_, state)) in pgm.elements().iter().zip(anti.iter()) {
            assert!(linalg::max_abs(&(element - state.matrix().scale(2.0 / 3.0))) < 1e-14);
        }
    }

    #[test]
    fn pgm_of_single_pure_state_is_singular() {
        let single = Ensemble::from_pure_states(&[1.0], &[ket(&[1.0, 0.0])], DEFAULT_TOL).unwrap();
        assert!(matches!(pretty_good_measurement(&single), Err(Error::SingularAverageState { .. })));
        // a ridge makes it usable
        let pgm = pretty_good_measurement_with_ridge(&single, 1e-3).unwrap();
        assert_eq!(pgm.len(), 1);
    }

    #[test]
    fn dual_ensemble_examples() {
        let dual = dual_ensemble(&Povm::computational_basis(2), &DensityMatrix::maximally_mixed(2)).unwrap();
        assert!(!dual.has_dropped());
        assert!(ensemble_deviation(&dual.ensemble, &basis_ensemble(2)).unwrap() < 1e-14);

        let dual = dual_ensemble(&trine(), &DensityMatrix::maximally_mixed(2)).unwrap();
        for (p, state) in dual.ensemble.iter() {
            assert!((p - 1.0 / 3.0).abs() < 1e-14);
            assert!((linalg::trace_product(state.matrix(), state.matrix()) - 1.0).abs() < 1e-12);
        }
        for (element, state) in trine().elements().iter().zip(dual.ensemble.states()) {
            assert!(linalg::max_abs(&(element.scale(1.5) - state.matrix())) < 1e-14);
        }

        let zero = DensityMatrix::from_pure(&ket(&[1.0, 0.0])).unwrap();
        let dual = dual_ensemble(&Povm::computational_basis(2), &zero).unwrap();
        assert_eq!(dual.dropped, vec![1]);
        assert_eq!(dual.kept, vec![0]);
        assert_eq!(dual.ensemble.len(), 1);
    }

    #[test]
    fn gap_examples() {
        assert!(duality_gap(&antitrine(), &trine()).unwrap() < 1e-10);
        let gap = duality_gap(&basis_ensemble(3), &Povm::computational_basis(3)).unwrap();
        assert!(gap < 1e-10);
    }

    #[test]
    fn round_trips_on_random_inputs() {
        for seed in 0..10 {
            let povm = random_povm(3, 4, 1, seed).unwrap();
            let sigma = crate::quantum::random_density_matrix(3, seed + 100);
            assert!(povm_round_trip_deviation(&povm, &sigma).unwrap() < 1e-9);
            let ens = dual_ensemble(&random_povm(2, 3, 2, seed + 200).unwrap(), &sigma_2(seed)).unwrap().ensemble;
            assert!(ensemble_round_trip_deviation(&ens).unwrap() < 1e-9);
        }
    }

    fn sigma_2(seed: u64) -> DensityMatrix {
        crate::quantum::random_density_matrix(2, seed + 300)
    }

    #[test]
    fn mirror_symmetry_carries_over_to_pgm() {
        let t = 0.4_f64;
        let vs = vec![ket(&[t.cos(), t.sin()]), ket(&[t.cos(), -t.sin()]), ket(&[0.0, 1.0])];
        let ens = Ensemble::from_pure_states(&[0.3, 0.3, 0.4], &vs, DEFAULT_TOL).unwrap();
        assert!(is_mirror_symmetric_ensemble(&ens, 1e-12));
        let pgm = pretty_good_measurement(&ens).unwrap();
        assert!(is_mirror_symmetric_povm(&pgm, 1e-10));
        let dual = dual_ensemble(&pgm, &crate::quantum::DensityMatrix::maximally_mixed(2)).unwrap();
        assert!(is_mirror_symmetric_ensemble(&dual.ensemble, 1e-10));
        assert!(!is_mirror_symmetric_povm(&random_povm(2, 3, 1, 5).unwrap(), 1e-6));
    }
}
