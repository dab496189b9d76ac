use nalgebra::{DMatrix, DVector};

use super::tangent::{reduced_derivatives, tangent_frame};
use crate::config::{project_edges, DecoratedConfiguration, LengthVector, Vec3, IDENTITY_TOL};

/// Result of [`refine_critical`].
#[derive(Clone, Debug)]
pub struct Refined {
    pub config: DecoratedConfiguration,
    /// Projected gradient norm at `config`.
    pub residual: f64,
    pub iterations: usize,
    /// Projected gradient norm after each accepted step, starting value first.
    pub history: Vec<f64>,
}

const TARGET: f64 = 1e-10;
const MAX_DAMPING: f64 = 1e12;

/// Retraction onto the constraint set by alternating edge normalization
/// and length-weighted closure correction. `None` if it stalls.
pub fn project_to_constraints(edges: &[Vec3], xi: &Vec3, lengths: &LengthVector) -> Option<DecoratedConfiguration> {
    let (edges, residual) = project_edges(edges, lengths, 500, 0.1 * IDENTITY_TOL);
    let norm = xi.norm();
    if residual >= IDENTITY_TOL || norm == 0.0 {
        return None;
    }
    Some(DecoratedConfiguration::from_parts(edges, xi / norm, lengths.clone()))
}

/// Levenberg-Marquardt iteration on the projected gradient: the step solves
/// `(H^2 + mu I) d = -H g` in the tangent frame, where `H` is the reduced
/// Lagrangian Hessian, and is accepted only if the projected gradient norm
/// decreases. Converges to critical points of any index.
pub fn refine_critical(config: &DecoratedConfiguration, max_iters: usize) -> Refined {
    let n = config.n();
    let mut current = config.clone();
    let Ok(mut frame) = tangent_frame(&current) else {
        return Refined {
            residual: f64::INFINITY,
            config: current,
            iterations: 0,
            history: Vec::new(),
        };
    };
    let (mut g, mut h, _) = reduced_derivatives(&current, &frame);
    let mut history = vec![g.norm()];
    let mut mu = 1e-3 * h.amax().powi(2).max(1e-6);
    let mut iterations = 0;

    while iterations < max_iters && g.norm() >= TARGET && mu < MAX_DAMPING {
        iterations += 1;
        let dim = g.len();
        let normal = &h * &h + DMatrix::<f64>::identity(dim, dim) * mu;
        let rhs = -(&h * &g);
        let Some(step) = normal.cholesky().map(|c| c.solve(&rhs)) else {
            mu *= 4.0;
            continue;
        };
        let ambient: DVector<f64> = frame.basis() * step;
        let edges: Vec<Vec3> = current
            .edges()
            .iter()
            .enumerate()
            .map(|(i, u)| u + Vec3::new(ambient[3 * i], ambient[3 * i + 1], ambient[3 * i + 2]))
            .collect();
        let xi = current.xi() + Vec3::new(ambient[3 * n], ambient[3 * n + 1], ambient[3 * n + 2]);

        let candidate =
            project_to_constraints(&edges, &xi, current.lengths()).and_then(|c| tangent_frame(&c).ok().map(|f| (c, f)));
        let Some((cand, cand_frame)) = candidate else {
            mu *= 4.0;
            continue;
        };
        let (cg, ch, _) = reduced_derivatives(&cand, &cand_frame);
        if cg.norm() < g.norm() {
            current = cand;
            frame = cand_frame;
            g = cg;
            h = ch;
            history.push(g.norm());
            mu = (mu / 3.0).max(1e-15);
        } else {
            mu *= 4.0;
        }
    }

    Refined {
        residual: g.norm(),
        config: current,
        iterations,
        history,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_catalog;
    use crate::config::{configuration_distance, random_configuration};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn nudge(config: &DecoratedConfiguration, size: f64, rng: &mut ChaCha8Rng) -> DecoratedConfiguration {
        let frame = tangent_frame(config).unwrap();
        let coeffs = DVector::from_fn(frame.dim(), |_, _| rng.gen_range(-1.0..1.0));
        let step = frame.basis() * coeffs.normalize() * size;
        let n = config.n();
        let edges: Vec<Vec3> = config
            .edges()
            .iter()
            .enumerate()
            .map(|(i, u)| u + Vec3::new(step[3 * i], step[3 * i + 1], step[3 * i + 2]))
            .collect();
        let xi = config.xi() + Vec3::new(step[3 * n], step[3 * n + 1], step[3 * n + 2]);
        project_to_constraints(&edges, &xi, config.lengths()).unwrap()
    }

    #[test]
    fn returns_to_nudged_entries() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let cat = build_catalog(7, &LengthVector::equilateral(7).unwrap()).unwrap();
        for e in cat.entries.iter().step_by(5) {
            let start = nudge(&e.config, 1e-4, &mut rng);
            let r = refine_critical(&start, 50);
            assert!(r.residual < 1e-10, "{} residual {}", e.key(), r.residual);
            assert!(
                configuration_distance(&r.config, &e.config).unwrap() < 1e-8,
                "{}",
                e.key()
            );
        }
    }

    #[test]
    fn exact_entry_is_a_fixed_point() {
        let cat = build_catalog(5, &LengthVector::equilateral(5).unwrap()).unwrap();
        for e in &cat.entries {
            let r = refine_critical(&e.config, 10);
            assert_eq!(r.iterations, 0);
            assert_eq!(r.config, e.config);
        }
    }

    #[test]
    fn accepted_steps_decrease_the_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let c = random_configuration(&LengthVector::equilateral(7).unwrap(), &mut rng);
        let r = refine_critical(&c, 100);
        assert!(r.history.len() > 1);
        assert!(r.history.windows(2).all(|w| w[1] < w[0]));
        assert!(r.config.constraint_residual() < IDENTITY_TOL);
    }
}
