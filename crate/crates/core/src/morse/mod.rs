//! Numerical certification of critical points and Morse indices.
//!
//! The Morse index on the quotient is the number of negative eigenvalues of
//! the Lagrangian Hessian restricted to the orthogonal complement of the
//! constraint normals and the rotation orbit directions.

mod refine;
mod search;
mod tangent;

use nalgebra::DMatrix;
use serde::Serialize;

pub use refine::{project_to_constraints, refine_critical, Refined};
pub use search::{
    classify_candidate, random_search, summarize, Classification, Diagnostics, SearchResult, SearchSummary,
    CONVERGED_RESIDUAL, MATCH_TOL,
};
pub use tangent::{
    ambient_gradient, ambient_hessian, constraint_normals, lagrange_multipliers, lagrangian_hessian, planar_reduced,
    planar_tangent_frame, projected_gradient, projected_gradient_norm, projected_hessian, rotation_generators,
    tangent_frame, TangentFrame, NEAR_CRITICAL,
};

use crate::catalog::{build_cyclic, CatalogEntry};
use crate::config::{perturb_lengths, DecoratedConfiguration, LengthVector, PerturbationSpec, PlanarConfiguration};
use crate::error::{Error, Result};

/// Relative threshold below which an eigenvalue counts as zero.
pub const ZERO_TOL: f64 = 1e-7;
/// Perturbation used when the equilateral Hessian is degenerate.
pub const FALLBACK_EPSILON: f64 = 1e-3;
pub const FALLBACK_SEEDS: [u64; 3] = [1, 2, 3];

#[derive(Clone, Debug, PartialEq)]
pub struct EigenCounts {
    pub negatives: usize,
    pub zeros: usize,
    pub positives: usize,
    pub eigenvalues: Vec<f64>,
}

impl EigenCounts {
    pub fn min_abs_nonzero(&self, zero_tol: f64) -> f64 {
        let cut = zero_tol * self.spectral_radius();
        self.eigenvalues
            .iter()
            .map(|l| l.abs())
            .filter(|&a| a > cut)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max)
    }
}

/// Inertia of a symmetric matrix from a full eigendecomposition.
pub fn eigen_counts(matrix: &DMatrix<f64>, zero_tol: f64) -> Result<EigenCounts> {
    let scale = matrix.norm();
    let asym = (matrix - matrix.transpose()).norm();
    if asym > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotSymmetric(asym));
    }
    let sym = (matrix + matrix.transpose()) * 0.5;
    let mut eigenvalues: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    let cut = zero_tol * eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max);
    let negatives = eigenvalues.iter().filter(|&&l| l < -cut).count();
    let positives = eigenvalues.iter().filter(|&&l| l > cut).count();
    Ok(EigenCounts {
        negatives,
        zeros: eigenvalues.len() - negatives - positives,
        positives,
        eigenvalues,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HessianReport {
    pub negatives: usize,
    pub zeros: usize,
    pub positives: usize,
    pub min_abs_nonzero: f64,
    /// Norm of `grad S - J^T lambda` at the least-squares multipliers.
    pub gradient_residual: f64,
    pub degenerate: bool,
    /// Set when the counts come from a perturbed-length realization.
    pub perturbation_seed: Option<u64>,
}

impl HessianReport {
    fn from_counts(counts: &EigenCounts, gradient_residual: f64) -> Self {
        Self {
            negatives: counts.negatives,
            zeros: counts.zeros,
            positives: counts.positives,
            min_abs_nonzero: counts.min_abs_nonzero(ZERO_TOL),
            gradient_residual,
            degenerate: counts.zeros > 0,
            perturbation_seed: None,
        }
    }
}

/// Inertia of the projected Hessian at a near-critical configuration.
pub fn hessian_report(config: &DecoratedConfiguration) -> Result<HessianReport> {
    let frame = tangent_frame(config)?;
    let (g, h, residual) = tangent::reduced_derivatives(config, &frame);
    if g.norm() >= NEAR_CRITICAL {
        return Err(Error::NotNearCritical(g.norm()));
    }
    let counts = eigen_counts(&h, ZERO_TOL)?;
    Ok(HessianReport::from_counts(&counts, residual))
}

/// Inertia of the planar area Hessian on the planar configuration space.
pub fn planar_hessian_report(config: &PlanarConfiguration) -> Result<HessianReport> {
    let (g, h) = planar_reduced(config)?;
    if g.norm() >= NEAR_CRITICAL {
        return Err(Error::NotNearCritical(g.norm()));
    }
    let counts = eigen_counts(&h, ZERO_TOL)?;
    Ok(HessianReport::from_counts(&counts, g.norm()))
}

/// Numeric Morse index of a catalog entry. A degenerate Hessian is
/// re-examined at the nearby critical pair of a perturbed linkage.
pub fn numeric_index(entry: &CatalogEntry) -> Result<HessianReport> {
    let report = hessian_report(&entry.config)?;
    if !report.degenerate {
        return Ok(report);
    }
    for seed in FALLBACK_SEEDS {
        let lengths = perturbed(entry.config.lengths(), seed)?;
        let moved = build_cyclic(&entry.ctype, &lengths)?;
        let polished = refine_critical(&moved.config, 20);
        let mut report = hessian_report(&polished.config)?;
        if !report.degenerate {
            report.perturbation_seed = Some(seed);
            return Ok(report);
        }
    }
    Err(Error::PersistentDegeneracy(entry.key()))
}

/// Planar-mode index of a catalog entry.
pub fn planar_numeric_index(entry: &CatalogEntry) -> Result<HessianReport> {
    let report = planar_hessian_report(&PlanarConfiguration::from_decorated(&entry.config)?)?;
    if !report.degenerate {
        return Ok(report);
    }
    for seed in FALLBACK_SEEDS {
        let lengths = perturbed(entry.config.lengths(), seed)?;
        let moved = build_cyclic(&entry.ctype, &lengths)?;
        let mut report = planar_hessian_report(&PlanarConfiguration::from_decorated(&moved.config)?)?;
        if !report.degenerate {
            report.perturbation_seed = Some(seed);
            return Ok(report);
        }
    }
    Err(Error::PersistentDegeneracy(entry.key()))
}

fn perturbed(base: &LengthVector, seed: u64) -> Result<LengthVector> {
    let factors = perturb_lengths(base.n(), PerturbationSpec::new(FALLBACK_EPSILON, seed)?)?;
    LengthVector::new(
        base.as_slice()
            .iter()
            .zip(factors.as_slice())
            .map(|(l, f)| l * f)
            .collect(),
    )
}
