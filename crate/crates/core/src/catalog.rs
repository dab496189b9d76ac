//! Enumeration and geometric realization of the cyclic critical pairs.
//!
//! Every realization lies in the `z = 0` plane with `xi = +z`. The pair with
//! the opposite decoration is represented by the mirrored type
//! `(-signs, -omega)`; the two differ by a rotation of space that flips the
//! plane, so they are the same point of the decorated configuration space.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::area::area_s;
use crate::config::{
    check_odd, make_decorated, vertices, winding_number, CyclicType, DecoratedConfiguration, LengthVector, Vec3,
};
use crate::error::{Error, Result};

/// All admissible types for `n` edges, in the derived `CyclicType` order.
pub fn enumerate_types(n: usize) -> Result<Vec<CyclicType>> {
    check_odd(n)?;
    let mut out = Vec::new();
    for_each_sign_word(n, |signs, sum| {
        let k = (n / 2) as i64;
        let c = (n as i64 - sum.abs()) / 2;
        let reach = k - c;
        let range: Vec<i64> = if sum > 0 {
            (1..=reach).collect()
        } else {
            (-reach..=-1).collect()
        };
        for omega in range {
            out.push(CyclicType::new(signs.to_vec(), omega).expect("enumerated type is admissible"));
        }
    });
    Ok(out)
}

/// Visits all sign words of length `n` in lexicographic order (-1 < +1)
/// together with their sum.
pub(crate) fn for_each_sign_word(n: usize, mut f: impl FnMut(&[i8], i64)) {
    let mut signs = vec![-1i8; n];
    for word in 0u64..(1u64 << n) {
        let mut sum = 0i64;
        for (pos, s) in signs.iter_mut().enumerate() {
            *s = if word >> (n - 1 - pos) & 1 == 1 { 1 } else { -1 };
            sum += *s as i64;
        }
        f(&signs, sum);
    }
}

/// Per-edge central angles and circumradius of a cyclic realization.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleSolution {
    pub thetas: Vec<f64>,
    pub radius: f64,
}

impl CircleSolution {
    /// Mean central angle; the common angle in the equilateral case.
    pub fn theta(&self) -> f64 {
        self.thetas.iter().sum::<f64>() / self.thetas.len() as f64
    }
}

const RADIUS_CEILING: f64 = 1e3;
const ANGLE_RESIDUAL: f64 = 1e-12;

/// Solves `sum s_i * 2 asin(l_i / 2R) = 2 pi omega` for the circumradius.
pub fn central_angle(lengths: &LengthVector, signs: &[i8], omega: i64) -> Result<CircleSolution> {
    let ctype = CyclicType::new(signs.to_vec(), omega)?;
    if lengths.n() != ctype.n() {
        return Err(Error::DimensionMismatch(ctype.n(), lengths.n()));
    }
    let theta_eq = (TAU * omega as f64 / ctype.sign_sum() as f64).abs();
    if lengths.is_equilateral() {
        return Ok(CircleSolution {
            thetas: vec![theta_eq; ctype.n()],
            radius: 1.0 / (2.0 * (theta_eq / 2.0).sin()),
        });
    }

    let l = lengths.as_slice();
    let residual = |r: f64| -> f64 {
        signs
            .iter()
            .zip(l)
            .map(|(&s, &li)| s as f64 * 2.0 * (li / (2.0 * r)).asin())
            .sum::<f64>()
            - TAU * omega as f64
    };
    let slope = |r: f64| -> f64 {
        signs
            .iter()
            .zip(l)
            .map(|(&s, &li)| {
                let x = li / (2.0 * r);
                -(s as f64) * li / (r * r * (1.0 - x * x).sqrt())
            })
            .sum()
    };

    let floor = l.iter().cloned().fold(0.0, f64::max) / 2.0 + 1e-15;
    let mean = lengths.total() / l.len() as f64;
    let start = (mean / (2.0 * (theta_eq / 2.0).sin())).clamp(floor, RADIUS_CEILING);
    let fail = || Error::NoRoot(ctype.key());

    // Grow a sign-change bracket around the equilateral radius.
    let f0 = residual(start);
    if f0 == 0.0 {
        return Ok(solution(l, start));
    }
    let mut step = 1e-3 * start;
    let (mut lo, mut hi) = loop {
        let (a, b) = ((start - step).max(floor), (start + step).min(RADIUS_CEILING));
        if residual(a).signum() != f0.signum() {
            break (a, start);
        }
        if residual(b).signum() != f0.signum() {
            break (start, b);
        }
        if a == floor && b == RADIUS_CEILING {
            return Err(fail());
        }
        step *= 2.0;
    };
    let f_lo = residual(lo);

    // Newton safeguarded by bisection.
    let mut r = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = residual(r);
        if f.abs() < ANGLE_RESIDUAL {
            return Ok(solution(l, r));
        }
        if f.signum() == f_lo.signum() {
            lo = r;
        } else {
            hi = r;
        }
        let newton = r - f / slope(r);
        r = if newton > lo.min(hi) && newton < lo.max(hi) {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(fail())
}

fn solution(lengths: &[f64], radius: f64) -> CircleSolution {
    CircleSolution {
        thetas: lengths.iter().map(|&l| 2.0 * (l / (2.0 * radius)).asin()).collect(),
        radius,
    }
}

/// A realized critical pair.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub ctype: CyclicType,
    pub thetas: Vec<f64>,
    pub radius: f64,
    /// Circumcenter in the `p_0 = 0` gauge.
    pub center: Vec3,
    pub config: DecoratedConfiguration,
    pub s_value: f64,
    pub index_combinatorial: u32,
    pub index_numeric: Option<u32>,
}

impl CatalogEntry {
    pub fn theta(&self) -> f64 {
        self.thetas.iter().sum::<f64>() / self.thetas.len() as f64
    }

    pub fn key(&self) -> String {
        self.ctype.key()
    }
}

/// Places the polygon on its circumcircle in the `z = 0` plane, first
/// vertex at polar angle 0, and checks the realization.
pub fn build_cyclic(ctype: &CyclicType, lengths: &LengthVector) -> Result<CatalogEntry> {
    let circle = central_angle(lengths, ctype.signs(), ctype.omega())?;
    let r = circle.radius;
    let mut phi = 0.0f64;
    let mut edges = Vec::with_capacity(ctype.n());
    for ((&s, &theta), &l) in ctype.signs().iter().zip(&circle.thetas).zip(lengths.as_slice()) {
        let step = s as f64 * theta;
        let mid = phi + step / 2.0;
        edges.push(Vec3::new(-mid.sin(), mid.cos(), 0.0) * (s as f64 * l));
        phi += step;
    }
    let config = make_decorated(edges, Vec3::z(), lengths.clone())?;
    let center = Vec3::new(-r, 0.0, 0.0);

    let points = vertices(&config);
    debug_assert!(points.iter().all(|p| ((p - center).norm() - r).abs() < 1e-10));
    let omega = winding_number(&points, &center, &Vec3::z())?;
    if omega != ctype.omega() {
        return Err(Error::Inadmissible(format!(
            "{} realized with winding number {omega}",
            ctype.key()
        )));
    }

    Ok(CatalogEntry {
        index_combinatorial: combinatorial_index(ctype),
        s_value: area_s(&config),
        ctype: ctype.clone(),
        thetas: circle.thetas,
        radius: r,
        center,
        config,
        index_numeric: None,
    })
}

/// Morse index of the decorated pair, `2e - 2 omega - 2`.
pub fn combinatorial_index(ctype: &CyclicType) -> u32 {
    let m = 2 * ctype.e() as i64 - 2 * ctype.omega() - 2;
    debug_assert!(m >= 0 && m % 2 == 0);
    m as u32
}

/// Morse index of the planar polygon for the area function on the planar
/// configuration space: `e - 2 omega - 1` for `omega > 0`, and the
/// complement in dimension `n - 3` of the mirrored type for `omega < 0`.
pub fn planar_index(ctype: &CyclicType) -> u32 {
    if ctype.omega() > 0 {
        (ctype.e() as i64 - 2 * ctype.omega() - 1) as u32
    } else {
        ctype.n() as u32 - 3 - planar_index(&ctype.mirror())
    }
}

/// All critical pairs for one length vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Catalog {
    pub n: usize,
    pub lengths: LengthVector,
    pub entries: Vec<CatalogEntry>,
}

/// `2 * sum_{c<k} C(n, c) (k - c)`, the closed-form size of the catalog.
pub fn catalog_size(n: usize) -> u128 {
    let k = n / 2;
    let mut binom = 1u128;
    let mut total = 0u128;
    for c in 0..k {
        total += binom * (k - c) as u128;
        binom = binom * (n - c) as u128 / (c + 1) as u128;
    }
    2 * total
}

pub fn build_catalog(n: usize, lengths: &LengthVector) -> Result<Catalog> {
    if lengths.n() != n {
        return Err(Error::DimensionMismatch(n, lengths.n()));
    }
    let types = enumerate_types(n)?;
    let entries = types
        .par_iter()
        .map(|t| build_cyclic(t, lengths))
        .collect::<Result<Vec<_>>>()?;
    Ok(Catalog {
        n,
        lengths: lengths.clone(),
        entries,
    })
}

impl Catalog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn find(&self, ctype: &CyclicType) -> Option<&CatalogEntry> {
        self.entries
            .binary_search_by(|e| e.ctype.cmp(ctype))
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn to_json(&self) -> CatalogJson {
        CatalogJson {
            n: self.n,
            lengths: self.lengths.as_slice().to_vec(),
            entries: self
                .entries
                .iter()
                .map(|e| EntryJson {
                    signs: e.ctype.signs().to_vec(),
                    omega: e.ctype.omega(),
                    theta: e.theta(),
                    thetas: e.thetas.clone(),
                    radius: e.radius,
                    s_value: e.s_value,
                    index_combinatorial: e.index_combinatorial,
                    index_numeric: e.index_numeric,
                    vertices: vertices(&e.config).iter().map(|p| [p.x, p.y, p.z]).collect(),
                    xi: [e.config.xi().x, e.config.xi().y, e.config.xi().z],
                })
                .collect(),
        }
    }

    pub fn from_json(json: &CatalogJson) -> Result<Self> {
        let lengths = LengthVector::new(json.lengths.clone())?;
        if lengths.n() != json.n {
            return Err(Error::DimensionMismatch(json.n, lengths.n()));
        }
        let entries = json
            .entries
            .iter()
            .map(|e| {
                let m = e.vertices.len();
                let pts: Vec<Vec3> = e.vertices.iter().map(|p| Vec3::from(*p)).collect();
                let edges: Vec<Vec3> = (0..m).map(|i| pts[(i + 1) % m] - pts[i]).collect();
                // validate, but keep the stored vertices rather than re-snapping
                let checked = make_decorated(edges.clone(), Vec3::from(e.xi), lengths.clone())?;
                let config = DecoratedConfiguration::from_parts(edges, checked.xi(), lengths.clone());
                Ok(CatalogEntry {
                    ctype: CyclicType::new(e.signs.clone(), e.omega)?,
                    thetas: e.thetas.clone(),
                    radius: e.radius,
                    center: pts[0] - Vec3::new(e.radius, 0.0, 0.0),
                    config,
                    s_value: e.s_value,
                    index_combinatorial: e.index_combinatorial,
                    index_numeric: e.index_numeric,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n: json.n,
            lengths,
            entries,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogJson {
    pub n: usize,
    pub lengths: Vec<f64>,
    pub entries: Vec<EntryJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryJson {
    pub signs: Vec<i8>,
    pub omega: i64,
    pub theta: f64,
    /// Per-edge central angles; all equal to `theta` for equal lengths.
    pub thetas: Vec<f64>,
    pub radius: f64,
    #[serde(rename = "S_value")]
    pub s_value: f64,
    pub index_combinatorial: u32,
    pub index_numeric: Option<u32>,
    pub vertices: Vec<[f64; 3]>,
    pub xi: [f64; 3],
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{configuration_distance, perturb_lengths, threefold_embed, PerturbationSpec};
    use std::collections::BTreeMap;
    use std::f64::consts::PI;

    // Oracle: direct count over all sign words and admissible winding numbers.
    fn brute_force_count(n: usize) -> usize {
        let k = (n / 2) as i64;
        let mut count = 0;
        for word in 0..(1u32 << n) {
            let plus = word.count_ones() as i64;
            let sum = 2 * plus - n as i64;
            for omega in -k..=k {
                if omega != 0 && omega.signum() == sum.signum() && 2 * omega.abs() < sum.abs() {
                    count += 1;
                }
            }
        }
        count
    }

    fn pentagon_entry(signs: &[i8], omega: i64) -> CatalogEntry {
        let t = CyclicType::new(signs.to_vec(), omega).unwrap();
        build_cyclic(&t, &LengthVector::equilateral(5).unwrap()).unwrap()
    }

    #[test]
    fn type_counts() {
        assert_eq!(enumerate_types(5).unwrap().len(), 14);
        assert_eq!(brute_force_count(7), 76);
        assert_eq!(enumerate_types(7).unwrap().len(), 76);
        assert_eq!(brute_force_count(9), 374);
        assert_eq!(enumerate_types(9).unwrap().len(), 374);
        for n in [5, 7, 9, 11] {
            assert_eq!(catalog_size(n), brute_force_count(n) as u128);
        }
        assert!(matches!(enumerate_types(6), Err(Error::BadParity(6))));
        assert!(matches!(enumerate_types(3), Err(Error::BadParity(3))));
    }

    #[test]
    fn enumeration_is_sorted_and_unique() {
        let types = enumerate_types(7).unwrap();
        assert!(types.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(types[0].signs(), &[-1; 7]);
        assert_eq!(types[0].omega(), -3);
    }

    #[test]
    fn equilateral_angles() {
        let l = LengthVector::equilateral(5).unwrap();
        let convex = central_angle(&l, &[1; 5], 1).unwrap();
        assert!((convex.theta() - 2.0 * PI / 5.0).abs() < 1e-15);
        assert!((convex.radius - 0.8506508).abs() < 1e-7);
        let star = central_angle(&l, &[1; 5], 2).unwrap();
        assert!((star.theta() - 4.0 * PI / 5.0).abs() < 1e-15);
        assert!((star.radius - 0.5257311).abs() < 1e-7);
        let folded = central_angle(&l, &[1, -1, 1, 1, 1], 1).unwrap();
        assert!((folded.theta() - 2.0 * PI / 3.0).abs() < 1e-15);
        assert!((folded.radius - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!(matches!(central_angle(&l, &[1; 5], 3), Err(Error::Inadmissible(_))));
    }

    #[test]
    fn perturbed_root_solves_closing_condition() {
        let l = perturb_lengths(7, PerturbationSpec::new(1e-3, 17).unwrap()).unwrap();
        for t in enumerate_types(7).unwrap() {
            let sol = central_angle(&l, t.signs(), t.omega()).unwrap();
            let total: f64 = t.signs().iter().zip(&sol.thetas).map(|(&s, th)| s as f64 * th).sum();
            assert!((total - TAU * t.omega() as f64).abs() < 1e-12);
            let eq = central_angle(&LengthVector::equilateral(7).unwrap(), t.signs(), t.omega()).unwrap();
            assert!((sol.radius - eq.radius).abs() < 1e-2);
        }
    }

    #[test]
    fn named_pentagons() {
        let convex = pentagon_entry(&[1; 5], 1);
        assert_eq!(convex.index_combinatorial, 6);
        assert!((convex.s_value - 1.720477).abs() < 1e-6);

        let mirror = pentagon_entry(&[-1; 5], -1);
        assert_eq!(mirror.index_combinatorial, 0);
        assert!((mirror.s_value + convex.s_value).abs() < 1e-12);

        let star = pentagon_entry(&[1; 5], 2);
        assert_eq!(star.index_combinatorial, 4);
        assert!((star.s_value - 0.406149).abs() < 1e-6);

        let folded = pentagon_entry(&[1, -1, 1, 1, 1], 1);
        assert_eq!(folded.index_combinatorial, 4);
        let p = vertices(&folded.config);
        assert!((p[0] - p[2]).norm() < 1e-12);
        let mut distinct: Vec<Vec3> = Vec::new();
        for q in &p {
            if distinct.iter().all(|d| (d - q).norm() > 1e-9) {
                distinct.push(*q);
            }
        }
        // p1 lands on p3: every vertex sits at a multiple of 120 degrees
        assert_eq!(distinct.len(), 3);
    }

    #[test]
    fn index_formulas() {
        let t = |s: &[i8], w| CyclicType::new(s.to_vec(), w).unwrap();
        assert_eq!(combinatorial_index(&t(&[1; 5], 1)), 6);
        assert_eq!(combinatorial_index(&t(&[-1; 5], -1)), 0);
        assert_eq!(combinatorial_index(&t(&[1, 1, -1, 1, 1], 1)), 4);
        assert_eq!(planar_index(&t(&[1; 5], 1)), 2);
        assert_eq!(planar_index(&t(&[1, 1, 1, -1, 1], 1)), 1);
        assert_eq!(planar_index(&t(&[1; 5], 2)), 0);
        assert_eq!(planar_index(&t(&[-1; 5], -1)), 0);
        assert_eq!(planar_index(&t(&[-1; 5], -2)), 2);
    }

    #[test]
    fn catalog_realizations_are_checked() {
        for n in [5, 7, 9] {
            let l = LengthVector::equilateral(n).unwrap();
            let cat = build_catalog(n, &l).unwrap();
            assert_eq!(cat.len() as u128, catalog_size(n));
            for e in &cat.entries {
                assert!((e.radius - 1.0 / (2.0 * (e.theta() / 2.0).sin())).abs() < 1e-12);
                for p in vertices(&e.config) {
                    assert!(((p - e.center).norm() - e.radius).abs() < 1e-10);
                }
                for u in e.config.edges() {
                    assert!((u.norm() - 1.0).abs() < 1e-10);
                }
                assert_eq!(e.s_value.signum() as i64, e.ctype.omega().signum());
                let mirror = cat.find(&e.ctype.mirror()).unwrap();
                assert_eq!(
                    e.index_combinatorial + mirror.index_combinatorial,
                    4 * (n as u32 / 2) - 2
                );
            }
        }
    }

    #[test]
    fn catalog_index_census() {
        let census = |n| {
            let cat = build_catalog(n, &LengthVector::equilateral(n).unwrap()).unwrap();
            let mut m = BTreeMap::new();
            for e in &cat.entries {
                *m.entry(e.index_combinatorial).or_insert(0) += 1;
            }
            m.into_iter().collect::<Vec<_>>()
        };
        assert_eq!(census(5), vec![(0, 1), (2, 6), (4, 6), (6, 1)]);
        assert_eq!(census(7), vec![(0, 1), (2, 8), (4, 29), (6, 29), (8, 8), (10, 1)]);
    }

    #[test]
    fn perturbed_catalog_stays_close() {
        let l = perturb_lengths(5, PerturbationSpec::new(1e-3, 7).unwrap()).unwrap();
        let cat = build_catalog(5, &l).unwrap();
        let eq = build_catalog(5, &LengthVector::equilateral(5).unwrap()).unwrap();
        assert_eq!(cat.len(), 14);
        for (a, b) in cat.entries.iter().zip(&eq.entries) {
            assert_eq!(a.ctype, b.ctype);
            assert!((a.radius - b.radius).abs() < 1e-2);
        }
    }

    #[test]
    fn fold_matches_spliced_type() {
        let cat = build_catalog(5, &LengthVector::equilateral(5).unwrap()).unwrap();
        let l7 = LengthVector::equilateral(7).unwrap();
        for e in &cat.entries {
            for i in 0..5 {
                let folded = threefold_embed(&e.config, i).unwrap();
                let spliced = build_cyclic(&e.ctype.splice_fold(i).unwrap(), &l7).unwrap();
                assert!(configuration_distance(&folded, &spliced.config).unwrap() <= 1e-9);
                assert_eq!(spliced.index_combinatorial, e.index_combinatorial + 2);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let cat = build_catalog(7, &LengthVector::equilateral(7).unwrap()).unwrap();
        let text = crate::json::to_string(&cat.to_json()).unwrap();
        let back = Catalog::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.len(), cat.len());
        for (a, b) in back.entries.iter().zip(&cat.entries) {
            assert_eq!(a.ctype, b.ctype);
            assert_eq!(a.radius, b.radius);
            assert_eq!(a.s_value, b.s_value);
            assert_eq!(a.thetas, b.thetas);
            for (u, v) in a.config.edges().iter().zip(b.config.edges()) {
                assert!((u - v).norm() <= 1e-14);
            }
        }
    }
}
