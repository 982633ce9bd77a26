//! Named measurement families with known informational power.
//!
//! Qubit vectors are written in the `sigma_z` eigenbasis `{|0>, |1>}`, real
//! where possible and with a nonnegative first component.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::commuting::noisy_projective_power;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector};
use crate::quantum::{Povm, PureEnsemble, DEFAULT_TOL};

/// A measurement together with what is known about it in closed form.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub povm: Povm,
    pub known_power: Option<f64>,
    pub known_optimal_ensembles: Vec<PureEnsemble>,
    pub parameters: BTreeMap<String, f64>,
    /// Unit vectors `|pi_j>` of rank-one elements, when the family has them.
    pub directions: Vec<CVector>,
}

/// Names accepted by [`by_name`].
pub const FAMILIES: [&str; 6] = ["projective", "noisy-projective", "zn", "trine", "mirror-y", "sic2"];

fn real_ket(amps: &[f64]) -> CVector {
    CVector::from_iterator(amps.len(), amps.iter().map(|&a| c(a, 0.0)))
}

fn qubit(a: f64, b: f64) -> CVector {
    real_ket(&[a, b])
}

fn basis_vector(dim: usize, k: usize) -> CVector {
    CVector::from_fn(dim, |r, _| c(if r == k { 1.0 } else { 0.0 }, 0.0))
}

/// Weighted outcome probabilities `(2/N) sin^2(pi j / N)` of the Z_N family.
fn zn_weight(n: usize, j: usize) -> f64 {
    let s = (PI * j as f64 / n as f64).sin();
    2.0 / n as f64 * s * s
}

/// Closed-form power of the real Z_N-symmetric qubit POVM.
pub fn zn_power(n: usize) -> f64 {
    let sum: f64 = (0..n)
        .map(|j| {
            let w = zn_weight(n, j);
            if w > 0.0 { w * w.log2() } else { 0.0 }
        })
        .sum();
    sum + (n as f64).log2()
}

/// `|psi> = (sin t, cos t)`, the parameterization of the optimal ensembles.
fn zn_state(theta: f64) -> CVector {
    let (s, co) = (theta.sin(), theta.cos());
    // keep the first component nonnegative
    if s < -1e-15 || (s.abs() <= 1e-15 && co < 0.0) { qubit(-s, -co) } else { qubit(s, co) }
}

/// The `n` values giving an admissible three-state Y-shaped ensemble for
/// the Z_N POVM (`0 <= p_0 <= 1`), one representative per mirror pair.
pub fn admissible_y_indices(n: usize) -> Vec<usize> {
    (1..=n / 2)
        .filter(|&k| {
            let s = (PI * k as f64 / n as f64).sin();
            4.0 * s * s >= 2.0 - 1e-12
        })
        .collect()
}

/// Y-shaped ensemble with angles `0, +-pi k / N`; zero-weight members are omitted.
pub fn y_shaped_ensemble(n: usize, k: usize) -> Result<PureEnsemble> {
    let angle = PI * k as f64 / n as f64;
    let side = 1.0 / (4.0 * angle.sin().powi(2));
    let center = 1.0 - 2.0 * side;
    if !(-1e-12..=1.0).contains(&center) {
        return Err(Error::InvalidArguments(format!("n={k} is not admissible for N={n}")));
    }
    let priors = [center.max(0.0), side, side];
    let states = [zn_state(0.0), zn_state(angle), zn_state(-angle)];
    PureEnsemble::from_priors(&priors, &states, 1e-12)
}

/// The real Z_N-symmetric ensemble `{1/N, (sin(pi i/N), cos(pi i/N))}`.
pub fn zn_symmetric_ensemble(n: usize) -> Result<PureEnsemble> {
    let states: Vec<CVector> = (0..n).map(|i| zn_state(PI * i as f64 / n as f64)).collect();
    PureEnsemble::from_priors(&vec![1.0 / n as f64; n], &states, 1e-12)
}

/// Real Z_N-symmetric qubit POVM `{(2/N)|pi_j><pi_j|}` with
/// `|pi_j> = (cos(pi j/N), sin(pi j/N))`.
pub fn zn_symmetric_povm(n: usize) -> Result<CatalogEntry> {
    if n < 2 {
        return Err(Error::InvalidArguments(format!("Z_N family needs N >= 2, got {n}")));
    }
    let directions: Vec<CVector> = (0..n)
        .map(|j| {
            let t = PI * j as f64 / n as f64;
            qubit(t.cos(), t.sin())
        })
        .collect();
    let povm = Povm::from_weighted_vectors(&vec![2.0 / n as f64; n], &directions, DEFAULT_TOL)?;
    let mut ensembles = vec![zn_symmetric_ensemble(n)?];
    let admissible = admissible_y_indices(n);
    for &k in &admissible {
        ensembles.push(y_shaped_ensemble(n, k)?);
    }
    let mut parameters = BTreeMap::from([("N".to_string(), n as f64)]);
    for (idx, &k) in admissible.iter().enumerate() {
        parameters.insert(format!("admissible_n_{idx}"), k as f64);
    }
    Ok(CatalogEntry {
        name: format!("zn-{n}"),
        povm,
        known_power: Some(zn_power(n)),
        known_optimal_ensembles: ensembles,
        parameters,
        directions,
    })
}

/// The qubit trine: the Z_3 member of [`zn_symmetric_povm`].
pub fn trine() -> CatalogEntry {
    let mut entry = zn_symmetric_povm(3).expect("N=3 is valid");
    entry.name = "trine".into();
    entry
}

/// The antitrine ensemble, optimal for the trine.
pub fn antitrine() -> PureEnsemble {
    zn_symmetric_ensemble(3).expect("N=3 is valid")
}

/// Ensemble with the fewest states among the known optima of the Z_N POVM.
///
/// Even `N` gives `{1/2, |0>; 1/2, |1>}`; odd `N` gives the Y-shaped
/// ensemble whose central weight `p_0` is largest.
pub fn minimal_optimal_ensemble(n: usize) -> Result<PureEnsemble> {
    if n < 2 {
        return Err(Error::InvalidArguments(format!("Z_N family needs N >= 2, got {n}")));
    }
    if n % 2 == 0 {
        return PureEnsemble::from_priors(&[0.5, 0.5], &[basis_vector(2, 0), basis_vector(2, 1)], 1e-12);
    }
    let best = admissible_y_indices(n)
        .into_iter()
        .max_by(|&a, &b| {
            let pa = (PI * a as f64 / n as f64).sin().powi(2);
            let pb = (PI * b as f64 / n as f64).sin().powi(2);
            pa.total_cmp(&pb)
        })
        .ok_or_else(|| Error::InvalidArguments(format!("no admissible Y-shaped ensemble for N={n}")))?;
    y_shaped_ensemble(n, best)
}

/// Mirror-symmetric three-outcome qubit POVM with directions `(1, 0)` and
/// `(sin t, +-cos t)`, weights `cos 2t / cos^2 t` and `1 / (2 cos^2 t)`.
pub fn mirror_y_povm(theta: f64) -> Result<CatalogEntry> {
    if !(theta > 0.0 && theta <= PI / 4.0 + 1e-12) {
        return Err(Error::InvalidArguments(format!("theta must lie in (0, pi/4], got {theta}")));
    }
    let cos2 = theta.cos().powi(2);
    let weights = [((2.0 * theta).cos() / cos2).max(0.0), 0.5 / cos2, 0.5 / cos2];
    let directions = vec![qubit(1.0, 0.0), qubit(theta.sin(), theta.cos()), qubit(theta.sin(), -theta.cos())];
    let povm = Povm::from_weighted_vectors(&weights, &directions, DEFAULT_TOL)?;
    let (known_power, known_optimal_ensembles) = if (theta - PI / 6.0).abs() < 1e-12 {
        (Some(1.5f64.log2()), vec![antitrine()])
    } else if (theta - PI / 4.0).abs() < 1e-12 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ens = PureEnsemble::from_priors(&[0.5, 0.5], &[qubit(h, h), qubit(h, -h)], 1e-12)?;
        (Some(1.0), vec![ens])
    } else {
        (None, Vec::new())
    };
    Ok(CatalogEntry {
        name: "mirror-y".into(),
        povm,
        known_power,
        known_optimal_ensembles,
        parameters: BTreeMap::from([("theta".to_string(), theta)]),
        directions,
    })
}

/// The qubit SIC POVM (tetrahedron) with its antitetrahedron ensemble.
pub fn sic_qubit() -> CatalogEntry {
    let third = 1.0 / 3.0_f64.sqrt();
    let two_thirds = (2.0 / 3.0_f64).sqrt();
    let phase = |angle: f64| c(angle.cos(), angle.sin());
    let directions = vec![
        qubit(1.0, 0.0),
        qubit(third, two_thirds),
        CVector::from_vec(vec![c(third, 0.0), phase(2.0 * PI / 3.0) * two_thirds]),
        CVector::from_vec(vec![c(third, 0.0), phase(4.0 * PI / 3.0) * two_thirds]),
    ];
    let povm = Povm::from_weighted_vectors(&[0.5; 4], &directions, DEFAULT_TOL).expect("tetrahedron is a POVM");
    let anti = vec![
        qubit(0.0, 1.0),
        qubit(two_thirds, -third),
        CVector::from_vec(vec![c(two_thirds, 0.0), phase(PI / 3.0) * third]),
        CVector::from_vec(vec![c(two_thirds, 0.0), phase(5.0 * PI / 3.0) * third]),
    ];
    let ensemble = PureEnsemble::from_priors(&[0.25; 4], &anti, 1e-12).expect("antitetrahedron is normalized");
    CatalogEntry {
        name: "sic2".into(),
        povm,
        known_power: Some((4.0f64 / 3.0).log2()),
        known_optimal_ensembles: vec![ensemble],
        parameters: BTreeMap::new(),
        directions,
    }
}

/// Computational-basis measurement mixed with isotropic noise:
/// `eta |j><j| + (1 - eta) 1 / D`.
pub fn noisy_projective_povm(dim: usize, eta: f64) -> Result<CatalogEntry> {
    if dim < 2 || !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidArguments(format!("need D >= 2 and eta in [0, 1], got D={dim}, eta={eta}")));
    }
    let noise = linalg::identity(dim).scale((1.0 - eta) / dim as f64);
    let elements: Vec<CMatrix> = (0..dim)
        .map(|j| linalg::projector(&basis_vector(dim, j)).scale(eta) + &noise)
        .collect();
    let povm = Povm::new(elements, DEFAULT_TOL)?;
    let basis: Vec<CVector> = (0..dim).map(|k| basis_vector(dim, k)).collect();
    let ensemble = PureEnsemble::from_priors(&vec![1.0 / dim as f64; dim], &basis, 1e-12)?;
    Ok(CatalogEntry {
        name: "noisy-projective".into(),
        povm,
        known_power: Some(noisy_projective_power(dim, eta)?),
        known_optimal_ensembles: vec![ensemble],
        parameters: BTreeMap::from([("D".to_string(), dim as f64), ("eta".to_string(), eta)]),
        directions: if eta == 1.0 { basis } else { Vec::new() },
    })
}

/// Noiseless computational-basis measurement.
pub fn projective(dim: usize) -> Result<CatalogEntry> {
    let mut entry = noisy_projective_povm(dim, 1.0)?;
    entry.name = "projective".into();
    entry.parameters.remove("eta");
    Ok(entry)
}

/// Parameters for [`by_name`]; unused fields are ignored by a family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    pub dim: usize,
    pub eta: f64,
    pub n: usize,
    pub theta: f64,
}

impl Default for FamilyParams {
    fn default() -> Self {
        Self { dim: 2, eta: 1.0, n: 3, theta: PI / 6.0 }
    }
}

/// Looks up one of [`FAMILIES`].
pub fn by_name(name: &str, params: &FamilyParams) -> Result<CatalogEntry> {
    match name {
        "projective" => projective(params.dim),
        "noisy-projective" => noisy_projective_povm(params.dim, params.eta),
        "zn" => zn_symmetric_povm(params.n),
        "trine" => Ok(trine()),
        "mirror-y" => mirror_y_povm(params.theta),
        "sic2" => Ok(sic_qubit()),
        other => Err(Error::InvalidArguments(format!(
            "unknown family '{other}' (expected one of {})",
            FAMILIES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::is_mirror_symmetric_povm;
    use crate::info::pure_mutual_information;
    use crate::optimizer::stationarity_residual;

    #[test]
    fn zn_closed_form_values() {
        assert!((trine().known_power.unwrap() - 1.5f64.log2()).abs() < 1e-15);
        assert!((zn_power(2) - 1.0).abs() < 1e-15);
        assert!((zn_power(4) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn known_ensembles_attain_known_power() {
        let mut entries: Vec<CatalogEntry> = (2..=8).map(|n| zn_symmetric_povm(n).unwrap()).collect();
        entries.push(sic_qubit());
        entries.push(mirror_y_povm(PI / 6.0).unwrap());
        entries.push(mirror_y_povm(PI / 4.0).unwrap());
        entries.push(noisy_projective_povm(3, 0.4).unwrap());
        entries.push(projective(4).unwrap());
        for entry in entries {
            let power = entry.known_power.unwrap();
            assert!(!entry.known_optimal_ensembles.is_empty(), "{}", entry.name);
            for ens in &entry.known_optimal_ensembles {
                let mi = pure_mutual_information(ens, &entry.povm).unwrap();
                assert!((mi - power).abs() < 1e-9, "{}: {mi} vs {power}", entry.name);
                let residual = stationarity_residual(ens, &entry.povm).unwrap();
                assert!(residual < 1e-8, "{}: residual {residual}", entry.name);
            }
        }
    }

    #[test]
    fn optimal_states_are_orthogonal_to_a_direction() {
        let mut entries: Vec<CatalogEntry> = (2..=8).map(|n| zn_symmetric_povm(n).unwrap()).collect();
        entries.push(sic_qubit());
        for entry in entries {
            for ens in &entry.known_optimal_ensembles {
                for i in 0..ens.len() {
                    let psi = ens.direction(i);
                    let best = entry.directions.iter().map(|d| d.dotc(&psi).norm()).fold(f64::MAX, f64::min);
                    assert!(best <= 1e-12, "{} state {i}: {best}", entry.name);
                }
            }
        }
    }

    #[test]
    fn tetrahedron_structure() {
        let sic = sic_qubit();
        let els = sic.povm.elements();
        for j in 0..4 {
            for l in 0..4 {
                if j != l {
                    assert!((linalg::trace_product(&els[j], &els[l]) - 1.0 / 12.0).abs() < 1e-14);
                }
            }
        }
        // each antitetrahedron state is orthogonal to exactly one tetrahedron direction
        let anti = &sic.known_optimal_ensembles[0];
        for i in 0..4 {
            let psi = anti.direction(i);
            let zeros = sic.directions.iter().filter(|d| d.dotc(&psi).norm() < 1e-12).count();
            assert_eq!(zeros, 1);
        }
    }

    #[test]
    fn y_shaped_admissibility() {
        assert_eq!(admissible_y_indices(3), vec![1]);
        assert_eq!(admissible_y_indices(4), vec![1, 2]);
        assert_eq!(admissible_y_indices(7), vec![2, 3]);
        assert!(y_shaped_ensemble(7, 1).is_err());
    }

    #[test]
    fn minimal_ensembles() {
        let four = minimal_optimal_ensemble(4).unwrap();
        assert_eq!(four.len(), 2);
        let mi = pure_mutual_information(&four, &zn_symmetric_povm(4).unwrap().povm).unwrap();
        assert!((mi - 0.5).abs() < 1e-12);

        let three = minimal_optimal_ensemble(3).unwrap();
        assert_eq!(three.len(), 3);
        for p in three.priors() {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }

        let five = minimal_optimal_ensemble(5).unwrap();
        assert_eq!(five.len(), 3);
        let mi = pure_mutual_information(&five, &zn_symmetric_povm(5).unwrap().povm).unwrap();
        assert!((mi - zn_power(5)).abs() < 1e-12);
        assert!(minimal_optimal_ensemble(1).is_err());
    }

    #[test]
    fn mirror_family() {
        let at_trine = mirror_y_povm(PI / 6.0).unwrap();
        let trine = trine();
        for (a, b) in at_trine.povm.elements().iter().zip(trine.povm.elements()) {
            assert!(linalg::max_abs(&(a - b)) < 1e-12);
        }
        let flat = mirror_y_povm(PI / 4.0).unwrap();
        assert!(linalg::max_abs(&flat.povm.elements()[0]) < 1e-15);
        assert_eq!(flat.known_power, Some(1.0));
        let generic = mirror_y_povm(PI / 5.0).unwrap();
        assert!(generic.povm.completeness_deviation() < 1e-14);
        assert!(generic.known_power.is_none());
        for theta in [0.1, PI / 6.0, PI / 5.0, PI / 4.0] {
            assert!(is_mirror_symmetric_povm(&mirror_y_povm(theta).unwrap().povm, 1e-12));
        }
        assert!(mirror_y_povm(0.0).is_err());
        assert!(mirror_y_povm(1.0).is_err());
    }

    #[test]
    fn noisy_projective_entries() {
        let p = noisy_projective_povm(2, 1.0).unwrap();
        assert_eq!(p.povm, Povm::computational_basis(2));
        assert_eq!(p.known_power, Some(1.0));
        let flat = noisy_projective_povm(3, 0.0).unwrap();
        for e in flat.povm.elements() {
            assert!(linalg::max_abs(&(e - linalg::identity(3).scale(1.0 / 3.0))) < 1e-15);
        }
        assert_eq!(flat.known_power, Some(0.0));
        assert!((noisy_projective_povm(2, 0.5).unwrap().known_power.unwrap() - 0.188722).abs() < 1e-6);
        assert!(noisy_projective_povm(1, 0.5).is_err());
        assert!(by_name("nope", &FamilyParams::default()).is_err());
        for name in FAMILIES {
            assert!(by_name(name, &FamilyParams::default()).is_ok(), "{name}");
        }
    }
}
