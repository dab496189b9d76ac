//! Configurations of a closed polygonal linkage.
//!
//! A configuration is stored as its edge vectors `u_i = p_{i+1} - p_i`
//! (edge `n - 1` closes the polygon back to `p_0`). Vertices are recovered
//! with the gauge `p_0 = 0`; the rotation quotient is never coordinatized,
//! quotient-sensitive code projects out the rotation generators instead.

use nalgebra::{Matrix3, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Vec2 = Vector2<f64>;

/// Tolerance accepted by the validating constructors.
pub const CONSTRUCT_TOL: f64 = 1e-9;
/// Tolerance for identity checks (closure, lengths after snapping).
pub const IDENTITY_TOL: f64 = 1e-12;
/// Coplanarity tolerance for winding numbers.
pub const COPLANAR_TOL: f64 = 1e-8;

/// Largest admissible deviation of a bar length from 1.
pub const MAX_LENGTH_DEVIATION: f64 = 0.1;

/// Bar lengths of an odd linkage, equilateral or a small perturbation of it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LengthVector {
    lengths: Vec<f64>,
}

impl LengthVector {
    pub fn new(lengths: Vec<f64>) -> Result<Self> {
        check_odd(lengths.len())?;
        for (i, &l) in lengths.iter().enumerate() {
            if !l.is_finite() || l <= 0.0 {
                return Err(Error::InvalidLengths(format!("length {i} is {l}")));
            }
            if (l - 1.0).abs() >= MAX_LENGTH_DEVIATION {
                return Err(Error::InvalidLengths(format!(
                    "length {i} = {l} is not within {MAX_LENGTH_DEVIATION} of 1"
                )));
            }
        }
        Ok(Self { lengths })
    }

    pub fn equilateral(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn n(&self) -> usize {
        self.lengths.len()
    }

    /// `n = 2k + 1`.
    pub fn k(&self) -> usize {
        self.lengths.len() / 2
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.lengths
    }

    pub fn is_equilateral(&self) -> bool {
        self.lengths.iter().all(|&l| l == 1.0)
    }

    pub fn total(&self) -> f64 {
        self.lengths.iter().sum()
    }

    fn splice_fold(&self, edge: usize) -> Self {
        let mut lengths = Vec::with_capacity(self.n() + 2);
        for (i, &l) in self.lengths.iter().enumerate() {
            lengths.push(l);
            if i == edge {
                lengths.push(l);
                lengths.push(l);
            }
        }
        Self { lengths }
    }
}

impl std::ops::Index<usize> for LengthVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.lengths[i]
    }
}

impl TryFrom<Vec<f64>> for LengthVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<LengthVector> for Vec<f64> {
    fn from(l: LengthVector) -> Self {
        l.lengths
    }
}

pub(crate) fn check_odd(n: usize) -> Result<()> {
    if n < 5 || n.is_multiple_of(2) {
        return Err(Error::BadParity(n));
    }
    Ok(())
}

/// Random relative perturbation `1 + eps_i`, `eps_i` uniform in `[-e, e]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbationSpec {
    pub epsilon_magnitude: f64,
    pub seed: u64,
}

impl PerturbationSpec {
    pub fn new(epsilon_magnitude: f64, seed: u64) -> Result<Self> {
        if !(0.0..MAX_LENGTH_DEVIATION).contains(&epsilon_magnitude) {
            return Err(Error::InvalidArgument(format!(
                "perturbation magnitude {epsilon_magnitude} outside [0, {MAX_LENGTH_DEVIATION})"
            )));
        }
        Ok(Self {
            epsilon_magnitude,
            seed,
        })
    }
}

pub fn perturb_lengths(n: usize, spec: PerturbationSpec) -> Result<LengthVector> {
    check_odd(n)?;
    let eps = spec.epsilon_magnitude;
    if eps == 0.0 {
        return LengthVector::equilateral(n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let lengths = (0..n).map(|_| 1.0 + rng.gen_range(-eps..=eps)).collect();
    LengthVector::new(lengths)
}

/// A spatial polygon together with a unit decoration vector `xi`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecoratedConfiguration {
    edges: Vec<Vec3>,
    xi: Vec3,
    lengths: LengthVector,
}

/// Validating constructor. Inputs within [`CONSTRUCT_TOL`] of the
/// constraint set are snapped onto it.
pub fn make_decorated(edges: Vec<Vec3>, xi: Vec3, lengths: LengthVector) -> Result<DecoratedConfiguration> {
    let n = edges.len();
    check_odd(n)?;
    if lengths.n() != n {
        return Err(Error::DimensionMismatch(n, lengths.n()));
    }
    if edges
        .iter()
        .chain(std::iter::once(&xi))
        .any(|v| !v.iter().all(|c| c.is_finite()))
    {
        return Err(Error::NonFinite);
    }
    let defect = edges.iter().sum::<Vec3>().norm();
    if defect > CONSTRUCT_TOL * n as f64 {
        return Err(Error::ClosureViolation { defect });
    }
    for (i, u) in edges.iter().enumerate() {
        let error = (u.norm() - lengths[i]).abs() / lengths[i];
        if error > CONSTRUCT_TOL {
            return Err(Error::LengthViolation { edge: i, error });
        }
    }
    let norm = xi.norm();
    if (norm - 1.0).abs() > CONSTRUCT_TOL {
        return Err(Error::BadDecoration { norm });
    }
    let xi = if norm == 1.0 { xi } else { xi / norm };

    // Snap to within a few rounding errors so that re-reading saved
    // vertices does not move the configuration again.
    let mut config = DecoratedConfiguration { edges, xi, lengths };
    let snap_tol = 4.0 * n as f64 * f64::EPSILON;
    let before = constraint_residual(&config.edges, &config.lengths);
    if before > snap_tol {
        let (edges, after) = project_edges(&config.edges, &config.lengths, 100, snap_tol);
        if after < before {
            config.edges = edges;
        }
    }
    Ok(config)
}

impl DecoratedConfiguration {
    /// Builds a configuration the caller guarantees to satisfy the constraints.
    pub(crate) fn from_parts(edges: Vec<Vec3>, xi: Vec3, lengths: LengthVector) -> Self {
        debug_assert_eq!(edges.len(), lengths.n());
        Self { edges, xi, lengths }
    }

    pub fn n(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec3] {
        &self.edges
    }

    pub fn xi(&self) -> Vec3 {
        self.xi
    }

    pub fn lengths(&self) -> &LengthVector {
        &self.lengths
    }

    /// Largest violation among closure, edge lengths and the unit norm of `xi`.
    pub fn constraint_residual(&self) -> f64 {
        constraint_residual(&self.edges, &self.lengths).max((self.xi.norm() - 1.0).abs())
    }

    /// The same configuration with `xi` replaced by `-xi`.
    pub fn flipped(&self) -> Self {
        Self {
            edges: self.edges.clone(),
            xi: -self.xi,
            lengths: self.lengths.clone(),
        }
    }

    /// Applies a rotation to every edge and to `xi`.
    pub fn rotated(&self, rotation: &Matrix3<f64>) -> Self {
        Self {
            edges: self.edges.iter().map(|u| rotation * u).collect(),
            xi: rotation * self.xi,
            lengths: self.lengths.clone(),
        }
    }

    pub fn to_json(&self) -> ConfigurationJson {
        ConfigurationJson {
            n: self.n(),
            lengths: self.lengths.as_slice().to_vec(),
            edges: self.edges.iter().map(|u| [u.x, u.y, u.z]).collect(),
            xi: [self.xi.x, self.xi.y, self.xi.z],
        }
    }

    pub fn from_json(json: &ConfigurationJson) -> Result<Self> {
        if json.edges.len() != json.n {
            return Err(Error::DimensionMismatch(json.n, json.edges.len()));
        }
        make_decorated(
            json.edges.iter().map(|e| Vec3::from(*e)).collect(),
            Vec3::from(json.xi),
            LengthVector::new(json.lengths.clone())?,
        )
    }
}

/// Canonical serialized form of a decorated configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationJson {
    pub n: usize,
    pub lengths: Vec<f64>,
    pub edges: Vec<[f64; 3]>,
    pub xi: [f64; 3],
}

/// Vertices `p_0 = 0, p_{i+1} = p_i + u_i` (the closing vertex is not repeated).
pub fn vertices(config: &DecoratedConfiguration) -> Vec<Vec3> {
    vertices_of(config.edges())
}

pub(crate) fn vertices_of(edges: &[Vec3]) -> Vec<Vec3> {
    let mut p = Vec3::zeros();
    let mut out = Vec::with_capacity(edges.len());
    for u in edges {
        out.push(p);
        p += u;
    }
    out
}

pub(crate) fn constraint_residual(edges: &[Vec3], lengths: &LengthVector) -> f64 {
    let closure = edges.iter().sum::<Vec3>().norm();
    edges
        .iter()
        .zip(lengths.as_slice())
        .map(|(u, l)| (u.norm() - l).abs())
        .fold(closure, f64::max)
}

/// Alternating projection onto the edge-length spheres and the closure
/// plane. The closure defect is distributed over the edges proportionally
/// to their lengths. Returns the edges and the final residual.
pub(crate) fn project_edges(edges: &[Vec3], lengths: &LengthVector, max_rounds: usize, tol: f64) -> (Vec<Vec3>, f64) {
    let total = lengths.total();
    let mut edges = edges.to_vec();
    let mut residual = f64::INFINITY;
    for _ in 0..max_rounds {
        for (u, &l) in edges.iter_mut().zip(lengths.as_slice()) {
            let norm = u.norm();
            if norm > 0.0 {
                *u *= l / norm;
            }
        }
        residual = constraint_residual(&edges, lengths);
        if residual < tol {
            break;
        }
        let defect: Vec3 = edges.iter().sum();
        for (u, &l) in edges.iter_mut().zip(lengths.as_slice()) {
            *u -= defect * (l / total);
        }
    }
    (edges, residual)
}

/// Uniformly distributed unit vector.
pub(crate) fn random_unit<R: Rng>(rng: &mut R) -> Vec3 {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

/// Draws random edge directions and `xi`, then retracts onto the
/// constraint set. Draws whose projection stalls are discarded and redrawn.
pub fn random_configuration<R: Rng>(lengths: &LengthVector, rng: &mut R) -> DecoratedConfiguration {
    loop {
        let edges: Vec<Vec3> = lengths.as_slice().iter().map(|&l| random_unit(rng) * l).collect();
        let xi = random_unit(rng);
        let (edges, residual) = project_edges(&edges, lengths, 200, IDENTITY_TOL);
        if residual < IDENTITY_TOL {
            return DecoratedConfiguration::from_parts(edges, xi, lengths.clone());
        }
    }
}

/// Number of times the closed polygon through `points` winds around
/// `center`, in the orientation induced by `plane_normal`.
pub fn winding_number(points: &[Vec3], center: &Vec3, plane_normal: &Vec3) -> Result<i64> {
    let normal = plane_normal.normalize();
    for (i, p) in points.iter().enumerate() {
        let offset = (p - center).dot(&normal);
        if offset.abs() > COPLANAR_TOL {
            return Err(Error::NotCoplanar(offset));
        }
        if (p - center).norm() <= IDENTITY_TOL {
            return Err(Error::CenterOnPolygonVertex(i));
        }
    }
    let m = points.len();
    let total: f64 = (0..m)
        .map(|i| {
            let a = points[i] - center;
            let b = points[(i + 1) % m] - center;
            normal.dot(&a.cross(&b)).atan2(a.dot(&b))
        })
        .sum();
    let turns = total / std::f64::consts::TAU;
    let rounded = turns.round();
    debug_assert!((turns - rounded).abs() < 1e-6, "winding residual {}", turns - rounded);
    Ok(rounded as i64)
}

/// Replaces edge `edge` (0-based) by the fold `(u, -u, u)`.
pub fn threefold_embed(config: &DecoratedConfiguration, edge: usize) -> Result<DecoratedConfiguration> {
    let n = config.n();
    if edge >= n {
        return Err(Error::InvalidArgument(format!("edge {edge} out of range for n = {n}")));
    }
    let mut edges = Vec::with_capacity(n + 2);
    for (i, u) in config.edges.iter().enumerate() {
        edges.push(*u);
        if i == edge {
            edges.push(-u);
            edges.push(*u);
        }
    }
    make_decorated(edges, config.xi, config.lengths.splice_fold(edge))
}

/// Optimal rotation (determinant +1) taking the stacked vectors `from` onto `to`.
pub fn optimal_rotation(from: &[Vec3], to: &[Vec3]) -> Matrix3<f64> {
    let mut cov = Matrix3::zeros();
    for (a, b) in from.iter().zip(to) {
        cov += b * a.transpose();
    }
    let svd = cov.svd(true, true);
    let u = svd.u.expect("3x3 SVD has U");
    let v_t = svd.v_t.expect("3x3 SVD has V^T");
    let d = (u * v_t).determinant().signum();
    u * Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, d)) * v_t
}

/// Distance in the quotient by rotations: the residual of the best
/// orientation-preserving alignment of the stacked edge and `xi` vectors.
pub fn configuration_distance(c1: &DecoratedConfiguration, c2: &DecoratedConfiguration) -> Result<f64> {
    if c1.n() != c2.n() {
        return Err(Error::DimensionMismatch(c1.n(), c2.n()));
    }
    let stack =
        |c: &DecoratedConfiguration| -> Vec<Vec3> { c.edges.iter().copied().chain(std::iter::once(c.xi)).collect() };
    let (a, b) = (stack(c1), stack(c2));
    let rotation = optimal_rotation(&a, &b);
    let sq: f64 = a.iter().zip(&b).map(|(x, y)| (rotation * x - y).norm_squared()).sum();
    Ok(sq.sqrt())
}

/// Combinatorial type of a planar cyclic critical pair: the per-edge sign
/// word (+1 = the edge advances counterclockwise around the circumcircle in
/// the orientation induced by `xi`) and the signed winding number.
///
/// The derived ordering is lexicographic in the signs (with -1 < +1), then
/// ascending in `omega`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicType {
    signs: Vec<i8>,
    omega: i64,
}

impl CyclicType {
    pub fn new(signs: Vec<i8>, omega: i64) -> Result<Self> {
        let n = signs.len();
        check_odd(n)?;
        if let Some(s) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::Inadmissible(format!("sign {s} is not +1 or -1")));
        }
        let t = Self { signs, omega };
        let sum = t.sign_sum();
        if omega == 0 || omega.signum() != sum.signum() {
            return Err(Error::Inadmissible(format!(
                "winding number {omega} does not match sign sum {sum}"
            )));
        }
        if 2 * omega.abs() > sum.abs() {
            return Err(Error::Inadmissible(format!(
                "|winding number| {omega} exceeds {} for sign sum {sum}",
                t.max_winding()
            )));
        }
        Ok(t)
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn omega(&self) -> i64 {
        self.omega
    }

    pub fn n(&self) -> usize {
        self.signs.len()
    }

    pub fn sign_sum(&self) -> i64 {
        self.signs.iter().map(|&s| s as i64).sum()
    }

    /// Number of counterclockwise edges.
    pub fn e(&self) -> usize {
        self.signs.iter().filter(|&&s| s == 1).count()
    }

    /// Number of edges carrying the minority sign.
    pub fn minority(&self) -> usize {
        (self.n() - self.sign_sum().unsigned_abs() as usize) / 2
    }

    /// Largest admissible `|omega|` for this sign word, `k - c`.
    pub fn max_winding(&self) -> i64 {
        (self.n() / 2) as i64 - self.minority() as i64
    }

    /// The type of the same polygon with the opposite decoration.
    pub fn mirror(&self) -> Self {
        Self {
            signs: self.signs.iter().map(|s| -s).collect(),
            omega: -self.omega,
        }
    }

    /// Replaces the sign of edge `edge` by `(s, -s, s)`.
    pub fn splice_fold(&self, edge: usize) -> Result<Self> {
        let mut signs = Vec::with_capacity(self.n() + 2);
        for (i, &s) in self.signs.iter().enumerate() {
            signs.push(s);
            if i == edge {
                signs.push(-s);
                signs.push(s);
            }
        }
        Self::new(signs, self.omega)
    }

    /// Sign word with `+`/`-` characters.
    pub fn sign_word(&self) -> String {
        self.signs.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
    }

    /// Stable textual key, e.g. `s++-++_w1`.
    pub fn key(&self) -> String {
        format!("s{}_w{}", self.sign_word(), self.omega)
    }
}

impl std::fmt::Display for CyclicType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.key())
    }
}

/// A closed polygon in the plane.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarConfiguration {
    edges: Vec<Vec2>,
    lengths: LengthVector,
}

impl PlanarConfiguration {
    pub fn new(edges: Vec<Vec2>, lengths: LengthVector) -> Result<Self> {
        let n = edges.len();
        check_odd(n)?;
        if lengths.n() != n {
            return Err(Error::DimensionMismatch(n, lengths.n()));
        }
        let defect = edges.iter().sum::<Vec2>().norm();
        if defect > CONSTRUCT_TOL * n as f64 {
            return Err(Error::ClosureViolation { defect });
        }
        for (i, u) in edges.iter().enumerate() {
            let error = (u.norm() - lengths[i]).abs() / lengths[i];
            if error > CONSTRUCT_TOL {
                return Err(Error::LengthViolation { edge: i, error });
            }
        }
        Ok(Self { edges, lengths })
    }

    #[cfg(test)]
    pub(crate) fn new_unchecked(edges: Vec<Vec2>, lengths: LengthVector) -> Self {
        Self { edges, lengths }
    }

    /// The polygon of a decorated configuration lying in a plane orthogonal
    /// to `xi`, expressed in a right-handed frame `(b1, b2, xi)`.
    pub fn from_decorated(config: &DecoratedConfiguration) -> Result<Self> {
        let (b1, b2) = plane_frame(&config.xi());
        for u in config.edges() {
            let off = u.dot(&config.xi());
            if off.abs() > COPLANAR_TOL {
                return Err(Error::NotCoplanar(off));
            }
        }
        let edges = config
            .edges()
            .iter()
            .map(|u| Vec2::new(u.dot(&b1), u.dot(&b2)))
            .collect();
        Self::new(edges, config.lengths().clone())
    }

    pub fn n(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec2] {
        &self.edges
    }

    pub fn lengths(&self) -> &LengthVector {
        &self.lengths
    }

    pub fn vertices(&self) -> Vec<Vec2> {
        let mut p = Vec2::zeros();
        self.edges
            .iter()
            .map(|u| {
                let q = p;
                p += u;
                q
            })
            .collect()
    }
}

/// Orthonormal `(b1, b2)` with `(b1, b2, normal)` right-handed.
pub fn plane_frame(normal: &Vec3) -> (Vec3, Vec3) {
    let n = normal.normalize();
    let helper = if n.x.abs() <= n.y.abs() && n.x.abs() <= n.z.abs() {
        Vec3::x()
    } else if n.y.abs() <= n.z.abs() {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let b1 = (helper - n * n.dot(&helper)).normalize();
    let b2 = n.cross(&b1);
    (b1, b2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn regular_edges(n: usize, turns: f64) -> Vec<Vec3> {
        let theta = TAU * turns / n as f64;
        let r = 1.0 / (2.0 * (theta / 2.0).sin());
        let pts: Vec<Vec3> = (0..n)
            .map(|i| {
                let a = theta * i as f64;
                Vec3::new(r * a.cos(), r * a.sin(), 0.0)
            })
            .collect();
        (0..n).map(|i| pts[(i + 1) % n] - pts[i]).collect()
    }

    fn pentagon() -> DecoratedConfiguration {
        make_decorated(regular_edges(5, 1.0), Vec3::z(), LengthVector::equilateral(5).unwrap()).unwrap()
    }

    #[test]
    fn regular_pentagon_is_valid() {
        let c = pentagon();
        assert!(c.constraint_residual() < IDENTITY_TOL);
        assert_eq!(vertices(&c)[0], Vec3::zeros());
    }

    #[test]
    fn scaled_edge_is_a_length_violation() {
        let mut edges = regular_edges(5, 1.0);
        edges[0] *= 1.5;
        let err = make_decorated(edges, Vec3::z(), LengthVector::equilateral(5).unwrap());
        assert!(matches!(
            err,
            Err(Error::ClosureViolation { .. }) | Err(Error::LengthViolation { .. })
        ));

        // a length error alone, with closure kept
        let mut edges = regular_edges(5, 1.0);
        edges[0] *= 1.5;
        let lengths = LengthVector::new(vec![1.0, 1.0, 1.0, 1.0, 1.05]).unwrap();
        edges[4] = -edges[..4].iter().sum::<Vec3>();
        let err = make_decorated(edges, Vec3::z(), lengths).unwrap_err();
        assert!(matches!(err, Error::LengthViolation { .. }));
    }

    #[test]
    fn doubled_then_renormalized_edge_breaks_closure() {
        let mut edges = regular_edges(5, 1.0);
        edges[0] = (edges[0] * 2.0 + edges[1]).normalize();
        let err = make_decorated(edges, Vec3::z(), LengthVector::equilateral(5).unwrap()).unwrap_err();
        assert!(matches!(err, Error::ClosureViolation { .. }));
    }

    #[test]
    fn decoration_and_parity_checks() {
        let l = LengthVector::equilateral(5).unwrap();
        let err = make_decorated(regular_edges(5, 1.0), Vec3::z() * 1.1, l.clone()).unwrap_err();
        assert!(matches!(err, Error::BadDecoration { .. }));
        let c = make_decorated(regular_edges(5, 1.0), Vec3::z() * (1.0 + 5e-10), l).unwrap();
        assert_eq!(c.xi().norm(), 1.0);
        assert!(matches!(LengthVector::equilateral(4), Err(Error::BadParity(4))));
        assert!(matches!(LengthVector::equilateral(3), Err(Error::BadParity(3))));
        assert!(LengthVector::new(vec![1.0, 1.0, 1.0, 1.0, 1.2]).is_err());
    }

    #[test]
    fn snapping_tightens_near_feasible_input() {
        let mut edges = regular_edges(7, 1.0);
        edges[2] *= 1.0 + 3e-10;
        let c = make_decorated(edges, Vec3::z(), LengthVector::equilateral(7).unwrap()).unwrap();
        assert!(c.constraint_residual() < IDENTITY_TOL);
    }

    #[test]
    fn pentagon_vertices_lie_on_circumcircle() {
        let p = vertices(&pentagon());
        let r = 1.0 / (2.0 * (PI / 5.0).sin());
        assert!((r - 0.850651).abs() < 1e-6);
        let center: Vec3 = p.iter().sum::<Vec3>() / 5.0;
        for v in &p {
            assert!(((v - center).norm() - r).abs() < 1e-12);
        }
    }

    #[test]
    fn winding_numbers() {
        let c = pentagon();
        let p = vertices(&c);
        let center: Vec3 = p.iter().sum::<Vec3>() / 5.0;
        assert_eq!(winding_number(&p, &center, &Vec3::z()).unwrap(), 1);
        assert_eq!(winding_number(&p, &center, &-Vec3::z()).unwrap(), -1);

        let star =
            vertices(&make_decorated(regular_edges(5, 2.0), Vec3::z(), LengthVector::equilateral(5).unwrap()).unwrap());
        let center: Vec3 = star.iter().sum::<Vec3>() / 5.0;
        assert_eq!(winding_number(&star, &center, &Vec3::z()).unwrap(), 2);

        let mut rolled = star.clone();
        rolled.rotate_left(2);
        assert_eq!(winding_number(&rolled, &center, &Vec3::z()).unwrap(), 2);

        assert!(matches!(
            winding_number(&p, &(center + Vec3::z()), &Vec3::z()),
            Err(Error::NotCoplanar(_))
        ));
        assert!(matches!(
            winding_number(&p, &p[3], &Vec3::z()),
            Err(Error::CenterOnPolygonVertex(3))
        ));
    }

    #[test]
    fn threefold_adds_two_edges() {
        let c = pentagon();
        let folded = threefold_embed(&c, 2).unwrap();
        assert_eq!(folded.n(), 7);
        assert_eq!(folded.edges()[3], -c.edges()[2]);
        assert_eq!(folded.edges()[4], c.edges()[2]);
        assert_eq!(folded.edges()[6], c.edges()[4]);
        assert!(folded.constraint_residual() < IDENTITY_TOL);
        assert!(threefold_embed(&c, 5).is_err());
    }

    #[test]
    fn perturbation_contract() {
        let zero = perturb_lengths(5, PerturbationSpec::new(0.0, 9).unwrap()).unwrap();
        assert!(zero.is_equilateral());
        let spec = PerturbationSpec::new(1e-3, 42).unwrap();
        let a = perturb_lengths(7, spec).unwrap();
        let b = perturb_lengths(7, spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n(), 7);
        assert!(a.as_slice().iter().all(|l| (0.999..=1.001).contains(l)));
        assert_ne!(a, perturb_lengths(7, PerturbationSpec::new(1e-3, 43).unwrap()).unwrap());
        assert!(PerturbationSpec::new(0.5, 0).is_err());
    }

    #[test]
    fn distance_to_self_and_rotated_copy() {
        let c = pentagon();
        assert!(configuration_distance(&c, &c).unwrap() < 1e-12);
        let q = nalgebra::Rotation3::from_euler_angles(0.3, -1.1, 2.0).into_inner();
        assert!(configuration_distance(&c, &c.rotated(&q)).unwrap() < 1e-9);
        // xi flip is not a rotation of the planar pentagon with the same labels
        assert!(configuration_distance(&c, &c.flipped()).unwrap() > 0.1);
        let seven = make_decorated(regular_edges(7, 1.0), Vec3::z(), LengthVector::equilateral(7).unwrap()).unwrap();
        assert!(matches!(
            configuration_distance(&c, &seven),
            Err(Error::DimensionMismatch(5, 7))
        ));
    }

    #[test]
    fn random_configurations_are_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let l = LengthVector::equilateral(9).unwrap();
        for _ in 0..20 {
            let c = random_configuration(&l, &mut rng);
            assert!(c.constraint_residual() < IDENTITY_TOL);
        }
    }

    #[test]
    fn json_round_trip() {
        let c = pentagon();
        let json = serde_json::to_string(&c.to_json()).unwrap();
        let back: ConfigurationJson = serde_json::from_str(&json).unwrap();
        assert_eq!(DecoratedConfiguration::from_json(&back).unwrap(), c);
    }

    #[test]
    fn cyclic_type_admissibility() {
        assert!(CyclicType::new(vec![1; 5], 2).is_ok());
        assert!(CyclicType::new(vec![1; 5], 3).is_err());
        assert!(CyclicType::new(vec![1; 5], -1).is_err());
        assert!(CyclicType::new(vec![1, -1, 1, 1, 1], 2).is_err());
        assert!(CyclicType::new(vec![1, -1, -1, 1, 1], 1).is_err());
        assert!(CyclicType::new(vec![1, 0, 1, 1, 1], 1).is_err());
        let t = CyclicType::new(vec![1, -1, 1, 1, 1], 1).unwrap();
        assert_eq!((t.e(), t.minority(), t.max_winding()), (4, 1, 1));
        assert_eq!(t.mirror().mirror(), t);
        assert_eq!(t.key(), "s+-+++_w1");
        let folded = t.splice_fold(0).unwrap();
        assert_eq!(folded.sign_word(), "+-+-+++");
        assert_eq!(folded.e(), t.e() + 1);
    }

    #[test]
    fn planar_projection_of_pentagon() {
        let planar = PlanarConfiguration::from_decorated(&pentagon()).unwrap();
        assert_eq!(planar.n(), 5);
        assert_eq!(planar.vertices()[0], Vec2::zeros());
    }
}
