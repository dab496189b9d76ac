use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::refine::refine_critical;
use super::tangent::projected_gradient_norm;
use crate::area::vector_area;
use crate::catalog::{build_catalog, Catalog};
use crate::config::{
    configuration_distance, plane_frame, random_configuration, vertices, DecoratedConfiguration, LengthVector, Vec2,
};
use crate::error::{Error, Result};

/// Projected gradient below which a refined configuration counts as converged.
pub const CONVERGED_RESIDUAL: f64 = 1e-9;
/// Planarity and catalog-match tolerance used by the search.
pub const MATCH_TOL: f64 = 1e-6;
/// Projected gradient required before a candidate is classified.
const CLASSIFY_GRADIENT: f64 = 1e-8;
const REFINE_ITERS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Classification {
    PlanarCyclic,
    /// Planar with `xi` normal, but at no catalog entry.
    PlanarUnmatched,
    NonPlanarCandidate,
    NotConverged,
}

/// Raw values of the non-planar critical-point conditions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    /// `|xi x S/|S||`; zero when `xi` and the vector area are parallel.
    pub xi_vector_area_cross: f64,
    /// Variance of the distances from the projected vertices (onto the
    /// plane orthogonal to the vector area) to their best-fit circle center.
    pub concyclicity: f64,
    /// `max_i |det(T_i, S, d_i)|` with `T_i` the vector area of the triangle
    /// `p_{i-1} p_i p_{i+1}` and `d_i = p_{i+1} - p_{i-1}`.
    pub coplanarity: f64,
    /// Largest distance of a vertex from the plane through `p_0` normal to `xi`.
    pub out_of_plane: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    #[serde(serialize_with = "ser_config")]
    pub found: DecoratedConfiguration,
    pub residual: f64,
    pub matched_entry: Option<String>,
    pub match_distance: Option<f64>,
    pub classification: Classification,
    pub diagnostics: Option<Diagnostics>,
}

fn ser_config<S: serde::Serializer>(c: &DecoratedConfiguration, s: S) -> std::result::Result<S::Ok, S::Error> {
    c.to_json().serialize(s)
}

fn not_converged(config: &DecoratedConfiguration, residual: f64) -> SearchResult {
    SearchResult {
        found: config.clone(),
        residual,
        matched_entry: None,
        match_distance: None,
        classification: Classification::NotConverged,
        diagnostics: None,
    }
}

pub fn diagnostics(config: &DecoratedConfiguration) -> Diagnostics {
    let p = vertices(config);
    let m = p.len();
    let xi = config.xi();
    let s = vector_area(config);
    let s_hat = if s.norm() > 0.0 { s.normalize() } else { xi };

    let (b1, b2) = plane_frame(&s_hat);
    let flat: Vec<Vec2> = p.iter().map(|q| Vec2::new(q.dot(&b1), q.dot(&b2))).collect();
    let center = fit_circle_center(&flat);
    let dists: Vec<f64> = flat.iter().map(|q| (q - center).norm()).collect();
    let mean = dists.iter().sum::<f64>() / m as f64;
    let concyclicity = dists.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / m as f64;

    let coplanarity = (0..m)
        .map(|i| {
            let (prev, here, next) = (p[(i + m - 1) % m], p[i], p[(i + 1) % m]);
            let t = 0.5 * (here - prev).cross(&(next - here));
            let d = next - prev;
            t.cross(&s).dot(&d).abs()
        })
        .fold(0.0, f64::max);

    Diagnostics {
        xi_vector_area_cross: xi.cross(&s_hat).norm(),
        concyclicity,
        coplanarity,
        out_of_plane: p.iter().map(|q| (q - p[0]).dot(&xi).abs()).fold(0.0, f64::max),
    }
}

/// Algebraic least-squares circle fit: minimizes
/// `sum (|q|^2 - 2 c.q - (r^2 - |c|^2))^2` over `c` and the radius term.
fn fit_circle_center(points: &[Vec2]) -> Vec2 {
    let a = nalgebra::DMatrix::from_fn(points.len(), 3, |i, j| match j {
        0 => 2.0 * points[i].x,
        1 => 2.0 * points[i].y,
        _ => 1.0,
    });
    let b = nalgebra::DVector::from_fn(points.len(), |i, _| points[i].norm_squared());
    match a.svd(true, true).solve(&b, 1e-14) {
        Ok(x) => Vec2::new(x[0], x[1]),
        Err(_) => points.iter().sum::<Vec2>() / points.len() as f64,
    }
}

/// Classifies a critical configuration: planar pairs are matched against
/// the catalog, anything else reports the non-planar diagnostics.
pub fn classify_candidate(config: &DecoratedConfiguration, catalog: &Catalog, tol: f64) -> SearchResult {
    let residual = projected_gradient_norm(config).unwrap_or(f64::INFINITY);
    if residual >= CLASSIFY_GRADIENT {
        return not_converged(config, residual);
    }
    let diag = diagnostics(config);
    if diag.out_of_plane > tol {
        return SearchResult {
            found: config.clone(),
            residual,
            matched_entry: None,
            match_distance: None,
            classification: Classification::NonPlanarCandidate,
            diagnostics: Some(diag),
        };
    }
    let best = catalog
        .entries
        .iter()
        .filter_map(|e| configuration_distance(config, &e.config).ok().map(|d| (d, e)))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    match best {
        Some((d, e)) if d <= tol => SearchResult {
            found: config.clone(),
            residual,
            matched_entry: Some(e.key()),
            match_distance: Some(d),
            classification: Classification::PlanarCyclic,
            diagnostics: None,
        },
        best => SearchResult {
            found: config.clone(),
            residual,
            matched_entry: None,
            match_distance: best.map(|(d, _)| d),
            classification: Classification::PlanarUnmatched,
            diagnostics: Some(diag),
        },
    }
}

/// Random restarts of [`refine_critical`] on the equilateral linkage.
/// Restart `r` draws from the seed `seed ^ r`; results come back in restart
/// order whatever the thread scheduling.
pub fn random_search(n: usize, restarts: usize, seed: u64) -> Result<Vec<SearchResult>> {
    if restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let lengths = LengthVector::equilateral(n)?;
    let catalog = build_catalog(n, &lengths)?;
    Ok((0..restarts as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ r);
            let start = random_configuration(&lengths, &mut rng);
            let refined = refine_critical(&start, REFINE_ITERS);
            if refined.residual < CONVERGED_RESIDUAL {
                classify_candidate(&refined.config, &catalog, MATCH_TOL)
            } else {
                not_converged(&refined.config, refined.residual)
            }
        })
        .collect())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SearchSummary {
    pub restarts: usize,
    pub converged: usize,
    pub planar_cyclic: usize,
    pub planar_unmatched: usize,
    pub non_planar: usize,
    pub not_converged: usize,
    pub max_match_distance: f64,
    /// Hits per matched catalog key.
    pub histogram: BTreeMap<String, usize>,
}

pub fn summarize(results: &[SearchResult]) -> SearchSummary {
    let mut s = SearchSummary {
        restarts: results.len(),
        ..Default::default()
    };
    for r in results {
        match r.classification {
            Classification::PlanarCyclic => s.planar_cyclic += 1,
            Classification::PlanarUnmatched => s.planar_unmatched += 1,
            Classification::NonPlanarCandidate => s.non_planar += 1,
            Classification::NotConverged => s.not_converged += 1,
        }
        if let Some(key) = &r.matched_entry {
            *s.histogram.entry(key.clone()).or_insert(0) += 1;
            s.max_match_distance = s.max_match_distance.max(r.match_distance.unwrap_or(0.0));
        }
    }
    s.converged = s.restarts - s.not_converged;
    s
}
