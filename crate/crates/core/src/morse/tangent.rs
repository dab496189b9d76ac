//! Tangent spaces of the constraint manifolds modulo rotations, and the
//! first and second order data of the area functions expressed in them.
//!
//! Ambient coordinates of a decorated configuration are the edge
//! coordinates followed by the coordinates of `xi` (length `3n + 3`).
//! Planar configurations use the `2n` edge coordinates.

use nalgebra::{DMatrix, DVector, Matrix3};

use crate::area::{grad_s_ambient, partial_sum_difference};
use crate::config::{DecoratedConfiguration, PlanarConfiguration, Vec2, Vec3};
use crate::error::{Error, Result};

/// Orthonormal basis of the tangent space with constraint normals and
/// rotation orbits removed, stored as matrix columns.
#[derive(Clone, Debug)]
pub struct TangentFrame {
    basis: DMatrix<f64>,
}

impl TangentFrame {
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }
}

const RANK_TOL: f64 = 1e-9;

/// Orthonormal basis of the orthogonal complement of the column span.
fn complement(span: &DMatrix<f64>, expected_rank: usize) -> Result<TangentFrame> {
    let ambient = span.nrows();
    let svd = span.clone().svd(true, false);
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&s| s > RANK_TOL * smax).count();
    if rank != expected_rank {
        return Err(Error::RankDeficiency {
            rank,
            expected: expected_rank,
        });
    }
    let u = svd.u.expect("requested U");
    let mut projector = DMatrix::<f64>::identity(ambient, ambient);
    for (j, &s) in svd.singular_values.iter().enumerate() {
        if s > RANK_TOL * smax {
            let col = u.column(j);
            projector -= col * col.transpose();
        }
    }
    let eig = projector.symmetric_eigen();
    let mut keep: Vec<usize> = (0..ambient).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
    keep.sort_unstable();
    debug_assert_eq!(keep.len(), ambient - expected_rank);
    let basis = eig.eigenvectors.select_columns(keep.iter());
    Ok(TangentFrame { basis })
}

fn skew(v: &Vec3) -> Matrix3<f64> {
    v.cross_matrix()
}

/// Gradients of the constraints: `n` edge lengths, 3 closure components,
/// the unit norm of `xi`.
pub fn constraint_normals(config: &DecoratedConfiguration) -> DMatrix<f64> {
    let n = config.n();
    let dim = 3 * n + 3;
    let mut a = DMatrix::zeros(dim, n + 4);
    for (i, u) in config.edges().iter().enumerate() {
        a.fixed_view_mut::<3, 1>(3 * i, i).copy_from(u);
        for c in 0..3 {
            a[(3 * i + c, n + c)] = 1.0;
        }
    }
    a.fixed_view_mut::<3, 1>(3 * n, n + 3).copy_from(&config.xi());
    a
}

/// Infinitesimal rotations `(e x u_0, ..., e x u_{n-1}, e x xi)` for the
/// three coordinate axes `e`.
pub fn rotation_generators(config: &DecoratedConfiguration) -> DMatrix<f64> {
    let n = config.n();
    let mut g = DMatrix::zeros(3 * n + 3, 3);
    for axis in 0..3 {
        let e = Vec3::ith(axis, 1.0);
        for (i, v) in config.edges().iter().chain(std::iter::once(&config.xi())).enumerate() {
            g.fixed_view_mut::<3, 1>(3 * i, axis).copy_from(&e.cross(v));
        }
    }
    g
}

pub fn tangent_frame(config: &DecoratedConfiguration) -> Result<TangentFrame> {
    let n = config.n();
    let normals = constraint_normals(config);
    let gens = rotation_generators(config);
    let mut span = DMatrix::zeros(3 * n + 3, n + 7);
    span.columns_mut(0, n + 4).copy_from(&normals);
    span.columns_mut(n + 4, 3).copy_from(&gens);
    complement(&span, n + 7)
}

pub fn ambient_gradient(config: &DecoratedConfiguration) -> DVector<f64> {
    DVector::from_vec(grad_s_ambient(config.edges(), &config.xi()).to_flat())
}

/// Exact second derivatives of `S` in ambient coordinates.
pub fn ambient_hessian(config: &DecoratedConfiguration) -> DMatrix<f64> {
    let n = config.n();
    let edges = config.edges();
    let xi = config.xi();
    let mut h = DMatrix::zeros(3 * n + 3, 3 * n + 3);
    let upper = -0.5 * skew(&xi);
    for j in 0..n.saturating_sub(1) {
        for i in j + 1..n - 1 {
            h.fixed_view_mut::<3, 3>(3 * j, 3 * i).copy_from(&upper);
            h.fixed_view_mut::<3, 3>(3 * i, 3 * j).copy_from(&upper.transpose());
        }
    }
    for m in 0..n - 1 {
        let block = 0.5 * skew(&partial_sum_difference(edges, m));
        h.fixed_view_mut::<3, 3>(3 * m, 3 * n).copy_from(&block);
        h.fixed_view_mut::<3, 3>(3 * n, 3 * m).copy_from(&block.transpose());
    }
    h
}

/// Least-squares multipliers for `grad S = sum lambda_j grad c_j` and the
/// norm of what remains.
pub fn lagrange_multipliers(config: &DecoratedConfiguration) -> (DVector<f64>, f64) {
    least_squares(&constraint_normals(config), &ambient_gradient(config))
}

fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    let svd = a.clone().svd(true, true);
    let lambda = svd.solve(b, 1e-14).expect("SVD with U and V solves");
    let residual = (b - a * &lambda).norm();
    (lambda, residual)
}

/// Hessian of the Lagrangian `S - sum lambda_j c_j` in ambient coordinates.
/// Closure is linear, so only the quadratic norm constraints contribute.
pub fn lagrangian_hessian(config: &DecoratedConfiguration, lambda: &DVector<f64>) -> DMatrix<f64> {
    let n = config.n();
    let mut h = ambient_hessian(config);
    for i in 0..n {
        for c in 0..3 {
            h[(3 * i + c, 3 * i + c)] -= lambda[i];
        }
    }
    for c in 0..3 {
        h[(3 * n + c, 3 * n + c)] -= lambda[n + 3];
    }
    h
}

/// The constraint gradients are `u_i`, not `u_i / |u_i|`; with
/// `c_i = (|u_i|^2 - l_i^2) / 2` the constraint Hessians are identities.
pub(crate) fn reduced_derivatives(
    config: &DecoratedConfiguration,
    frame: &TangentFrame,
) -> (DVector<f64>, DMatrix<f64>, f64) {
    let grad = ambient_gradient(config);
    let (lambda, residual) = least_squares(&constraint_normals(config), &grad);
    let b = frame.basis();
    let g = b.transpose() * &grad;
    let h = b.transpose() * lagrangian_hessian(config, &lambda) * b;
    (g, h, residual)
}

pub fn projected_gradient(config: &DecoratedConfiguration) -> Result<DVector<f64>> {
    let frame = tangent_frame(config)?;
    Ok(frame.basis().transpose() * ambient_gradient(config))
}

pub fn projected_gradient_norm(config: &DecoratedConfiguration) -> Result<f64> {
    Ok(projected_gradient(config)?.norm())
}

/// Largest projected gradient accepted by [`projected_hessian`].
pub const NEAR_CRITICAL: f64 = 1e-6;

pub fn projected_hessian(config: &DecoratedConfiguration) -> Result<DMatrix<f64>> {
    let frame = tangent_frame(config)?;
    let (g, h, _) = reduced_derivatives(config, &frame);
    if g.norm() >= NEAR_CRITICAL {
        return Err(Error::NotNearCritical(g.norm()));
    }
    Ok(h)
}

fn rot90(v: &Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

pub fn planar_tangent_frame(config: &PlanarConfiguration) -> Result<TangentFrame> {
    let n = config.n();
    let mut span = DMatrix::zeros(2 * n, n + 3);
    for (i, u) in config.edges().iter().enumerate() {
        span.fixed_view_mut::<2, 1>(2 * i, i).copy_from(u);
        span[(2 * i, n)] = 1.0;
        span[(2 * i + 1, n + 1)] = 1.0;
        span.fixed_view_mut::<2, 1>(2 * i, n + 2).copy_from(&rot90(u));
    }
    complement(&span, n + 3)
}

/// Ambient gradient and Hessian of the planar signed area, with the same
/// extension convention as the decorated area.
pub(crate) fn planar_derivatives(config: &PlanarConfiguration) -> (DVector<f64>, DMatrix<f64>) {
    let n = config.n();
    let e = config.edges();
    let mut grad = DVector::zeros(2 * n);
    for m in 0..n - 1 {
        let before: Vec2 = e[..m].iter().sum();
        let after: Vec2 = e[m + 1..n - 1].iter().sum();
        // d/du_m of u_j x u_i: for u_m on the left, K w; K = [[0,1],[-1,0]].
        let w = after - before;
        grad[2 * m] = 0.5 * w.y;
        grad[2 * m + 1] = -0.5 * w.x;
    }
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n.saturating_sub(1) {
        for i in j + 1..n - 1 {
            h[(2 * j, 2 * i + 1)] = 0.5;
            h[(2 * j + 1, 2 * i)] = -0.5;
            h[(2 * i + 1, 2 * j)] = 0.5;
            h[(2 * i, 2 * j + 1)] = -0.5;
        }
    }
    (grad, h)
}

/// Reduced gradient and Lagrangian Hessian of the planar area.
pub fn planar_reduced(config: &PlanarConfiguration) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = config.n();
    let frame = planar_tangent_frame(config)?;
    let (grad, mut h) = planar_derivatives(config);
    let mut normals = DMatrix::zeros(2 * n, n + 2);
    for (i, u) in config.edges().iter().enumerate() {
        normals.fixed_view_mut::<2, 1>(2 * i, i).copy_from(u);
        normals[(2 * i, n)] = 1.0;
        normals[(2 * i + 1, n + 1)] = 1.0;
    }
    let (lambda, _) = least_squares(&normals, &grad);
    for i in 0..n {
        h[(2 * i, 2 * i)] -= lambda[i];
        h[(2 * i + 1, 2 * i + 1)] -= lambda[i];
    }
    let b = frame.basis();
    Ok((b.transpose() * grad, b.transpose() * h * b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::area::area_s_ambient;
    use crate::config::{random_configuration, LengthVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, seed: u64) -> DecoratedConfiguration {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_configuration(&LengthVector::equilateral(n).unwrap(), &mut rng)
    }

    #[test]
    fn frame_is_orthonormal_and_orthogonal_to_constraints() {
        for n in [5, 7, 9] {
            let c = random(n, n as u64);
            let f = tangent_frame(&c).unwrap();
            assert_eq!(f.dim(), 2 * n - 4);
            assert_eq!(f.ambient_dim(), 3 * n + 3);
            let b = f.basis();
            let gram = b.transpose() * b;
            assert!((gram - DMatrix::identity(2 * n - 4, 2 * n - 4)).amax() < 1e-10);
            assert!((constraint_normals(&c).transpose() * b).amax() < 1e-10);
            assert!((rotation_generators(&c).transpose() * b).amax() < 1e-10);
        }
    }

    #[test]
    fn rotation_generators_are_tangent() {
        let c = random(7, 2);
        let gens = rotation_generators(&c);
        assert!((constraint_normals(&c).transpose() * &gens).amax() < 1e-12);
        // S is rotation invariant, so its gradient has no orbit component.
        assert!((gens.transpose() * ambient_gradient(&c)).amax() < 1e-12);
    }

    // Central differences of the analytic gradient, as an oracle for the
    // analytic Hessian.
    #[test]
    fn hessian_matches_finite_differences_of_gradient() {
        let c = random(7, 4);
        let n = c.n();
        let h = ambient_hessian(&c);
        let step = 1e-5;
        let grad_at = |idx: usize, delta: f64| {
            let mut edges = c.edges().to_vec();
            let mut xi = c.xi();
            if idx / 3 < n {
                edges[idx / 3][idx % 3] += delta;
            } else {
                xi[idx % 3] += delta;
            }
            DVector::from_vec(grad_s_ambient(&edges, &xi).to_flat())
        };
        let scale = h.amax().max(1.0);
        for idx in 0..3 * n + 3 {
            let fd = (grad_at(idx, step) - grad_at(idx, -step)) / (2.0 * step);
            assert!((fd - h.column(idx)).amax() / scale < 1e-5, "column {idx}");
        }
        assert_eq!(h, h.transpose());
        // and second differences of S itself on a few coordinates
        let s = |e: &[Vec3], x: &Vec3| area_s_ambient(e, x);
        let mut e1 = c.edges().to_vec();
        let mut e2 = c.edges().to_vec();
        e1[1].x += step;
        e2[1].x -= step;
        let mut xi1 = c.xi();
        let mut xi2 = c.xi();
        xi1.z += step;
        xi2.z -= step;
        let mixed = (s(&e1, &xi1) - s(&e1, &xi2) - s(&e2, &xi1) + s(&e2, &xi2)) / (4.0 * step * step);
        assert!((mixed - h[(3, 3 * n + 2)]).abs() < 1e-5);
    }

    #[test]
    fn planar_gradient_matches_finite_differences() {
        let n = 7;
        let c = random(n, 9);
        let edges2: Vec<Vec2> = c.edges().iter().map(|u| u.xy()).collect();
        let area = |e: &[Vec2]| {
            let mut p = Vec2::zeros();
            let pts: Vec<Vec2> = e
                .iter()
                .map(|u| {
                    let q = p;
                    p += u;
                    q
                })
                .collect();
            crate::area::signed_area_2d(&pts)
        };
        // not a closed polygon, but the derivatives are those of the extension
        let lengths = LengthVector::equilateral(n).unwrap();
        let planar = PlanarConfiguration::new_unchecked(edges2.clone(), lengths);
        let (grad, h) = planar_derivatives(&planar);
        let step = 1e-5;
        for idx in 0..2 * n {
            let mut plus = edges2.clone();
            let mut minus = edges2.clone();
            plus[idx / 2][idx % 2] += step;
            minus[idx / 2][idx % 2] -= step;
            let fd = (area(&plus) - area(&minus)) / (2.0 * step);
            assert!((fd - grad[idx]).abs() < 1e-8);
        }
        assert_eq!(h, h.transpose());
    }
}
