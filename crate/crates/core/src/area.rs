//! Signed planar area `A`, decorated area `S`, and the ambient gradient of `S`.
//!
//! All public values are the halved quantities `A` and `S`.
//!
//! `S` is evaluated from edges through vertices `p_0 = 0, p_i = u_0 + ... + u_{i-1}`
//! for `i < n`, with the closing vertex identified with `p_0`. Off the closure
//! constraint this fixes one smooth extension of `S` to all of `(R^3)^n x R^3`;
//! gradients and Hessians refer to that extension. In it the last edge never
//! appears: `2S = sum_{j < i <= n-2} det(u_j, u_i, xi)`.

use crate::config::{plane_frame, vertices_of, DecoratedConfiguration, Vec2, Vec3};

/// Shoelace area with cyclic indices.
pub fn signed_area_2d(points: &[Vec2]) -> f64 {
    let m = points.len();
    let twice: f64 = (0..m)
        .map(|i| {
            let (a, b) = (points[i], points[(i + 1) % m]);
            a.x * b.y - b.x * a.y
        })
        .sum();
    0.5 * twice
}

/// `1/2 sum p_i x p_{i+1}`, the vector area of the closed polygon.
pub fn vector_area(config: &DecoratedConfiguration) -> Vec3 {
    vector_area_of_points(&vertices_of(config.edges()))
}

pub(crate) fn vector_area_of_points(points: &[Vec3]) -> Vec3 {
    let m = points.len();
    let twice: Vec3 = (0..m).map(|i| points[i].cross(&points[(i + 1) % m])).sum();
    twice * 0.5
}

pub fn area_s(config: &DecoratedConfiguration) -> f64 {
    vector_area(config).dot(&config.xi())
}

/// `S` evaluated on arbitrary (not necessarily feasible) ambient coordinates.
pub fn area_s_ambient(edges: &[Vec3], xi: &Vec3) -> f64 {
    vector_area_of_points(&vertices_of(edges)).dot(xi)
}

/// Signed area of the polygon projected onto the plane orthogonal to `xi`,
/// cooriented by `xi`.
pub fn projected_area(config: &DecoratedConfiguration) -> f64 {
    let (b1, b2) = plane_frame(&config.xi());
    let projected: Vec<Vec2> = vertices_of(config.edges())
        .iter()
        .map(|p| Vec2::new(p.dot(&b1), p.dot(&b2)))
        .collect();
    signed_area_2d(&projected)
}

/// Partial derivatives of `S` with respect to the ambient coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct AmbientGradient {
    pub d_edges: Vec<Vec3>,
    pub d_xi: Vec3,
}

impl AmbientGradient {
    /// Flattened `(d_edges..., d_xi)`.
    pub fn to_flat(&self) -> Vec<f64> {
        self.d_edges
            .iter()
            .chain(std::iter::once(&self.d_xi))
            .flat_map(|v| [v.x, v.y, v.z])
            .collect()
    }

    pub fn norm(&self) -> f64 {
        self.to_flat().iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

pub fn grad_s(config: &DecoratedConfiguration) -> AmbientGradient {
    grad_s_ambient(config.edges(), &config.xi())
}

/// `dS/du_m = 1/2 w_m x xi` with `w_m = sum_{m<i<=n-2} u_i - sum_{j<m} u_j`.
pub fn grad_s_ambient(edges: &[Vec3], xi: &Vec3) -> AmbientGradient {
    let n = edges.len();
    let d_edges = (0..n)
        .map(|m| {
            if m + 1 == n {
                Vec3::zeros()
            } else {
                partial_sum_difference(edges, m).cross(xi) * 0.5
            }
        })
        .collect();
    AmbientGradient {
        d_edges,
        d_xi: vector_area_of_points(&vertices_of(edges)),
    }
}

/// `w_m = sum_{m<i<=n-2} u_i - sum_{j<m} u_j`.
pub(crate) fn partial_sum_difference(edges: &[Vec3], m: usize) -> Vec3 {
    let n = edges.len();
    let before: Vec3 = edges[..m].iter().sum();
    let after: Vec3 = edges[m + 1..n - 1].iter().sum();
    after - before
}

/// Largest deviation between the analytic gradient and central finite
/// differences of `S` (step `h` on each ambient coordinate), relative to
/// `max(1, |grad|)`.
pub fn gradient_fd_error(config: &DecoratedConfiguration, h: f64) -> f64 {
    let analytic = grad_s(config).to_flat();
    let scale = analytic.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    let n = config.n();
    let mut worst = 0.0f64;
    for (idx, &g) in analytic.iter().enumerate() {
        let eval = |delta: f64| {
            let mut edges = config.edges().to_vec();
            let mut xi = config.xi();
            let (block, comp) = (idx / 3, idx % 3);
            if block < n {
                edges[block][comp] += delta;
            } else {
                xi[comp] += delta;
            }
            area_s_ambient(&edges, &xi)
        };
        let fd = (eval(h) - eval(-h)) / (2.0 * h);
        worst = worst.max((fd - g).abs() / scale);
    }
    worst
}
