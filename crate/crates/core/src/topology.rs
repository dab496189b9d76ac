//! Betti numbers of the configuration spaces and the perfectness check.
//!
//! Exact integer arithmetic throughout. The closed formulas cover degrees
//! `2p` with `p < k`; the upper half of each table comes from Poincare
//! duality of the closed orientable manifold.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::catalog::{combinatorial_index, for_each_sign_word, Catalog};
use crate::config::{check_odd, CyclicType};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Space {
    /// Spatial polygons modulo rotations, dimension `4k - 4`.
    M3,
    /// Pairs (polygon, unit vector) modulo rotations, dimension `4k - 2`.
    DecoratedM3,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiTable {
    pub n: usize,
    pub space: Space,
    pub dim: usize,
    /// `betti[m]` for `m = 0..=dim`.
    pub betti: Vec<BigUint>,
}

impl BettiTable {
    pub fn get(&self, degree: usize) -> BigUint {
        self.betti.get(degree).cloned().unwrap_or_default()
    }

    pub fn total(&self) -> BigUint {
        self.betti.iter().sum()
    }

    /// Even-degree entries as `(degree, betti)`.
    pub fn even_degrees(&self) -> impl Iterator<Item = (usize, &BigUint)> {
        self.betti.iter().enumerate().step_by(2)
    }
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Fills degrees `2p`, `p < k`, from `lower(p)` and the rest by duality.
fn palindromic_table(n: usize, space: Space, dim: usize, lower: impl Fn(usize) -> BigUint) -> BettiTable {
    let k = n / 2;
    let mut betti = vec![BigUint::zero(); dim + 1];
    for p in 0..k {
        let value = lower(p);
        betti[dim - 2 * p] = value.clone();
        betti[2 * p] = value;
    }
    BettiTable { n, space, dim, betti }
}

fn cumulative_binomial(top: usize, p: usize) -> BigUint {
    (0..=p).map(|i| binomial(top, i)).sum()
}

pub fn betti_m3(n: usize) -> Result<BettiTable> {
    check_odd(n)?;
    let k = n / 2;
    Ok(palindromic_table(n, Space::M3, 4 * k - 4, |p| {
        cumulative_binomial(2 * k, p)
    }))
}

/// Decorated Betti numbers, computed from the sphere-bundle relation
/// `b~^m = b^m + b^{m-2}` and from the direct binomial sums, which must agree.
pub fn betti_decorated(n: usize) -> Result<BettiTable> {
    let base = betti_m3(n)?;
    let via_bundle = decorated_from_base(&base);
    let direct = betti_decorated_direct(n)?;
    for m in 0..=direct.dim {
        if via_bundle.get(m) != direct.get(m) {
            return Err(Error::FormulaMismatch { n, degree: m });
        }
    }
    Ok(direct)
}

pub fn decorated_from_base(base: &BettiTable) -> BettiTable {
    let dim = base.dim + 2;
    let betti = (0..=dim)
        .map(|m| base.get(m) + if m >= 2 { base.get(m - 2) } else { BigUint::zero() })
        .collect();
    BettiTable {
        n: base.n,
        space: Space::DecoratedM3,
        dim,
        betti,
    }
}

pub fn betti_decorated_direct(n: usize) -> Result<BettiTable> {
    check_odd(n)?;
    let k = n / 2;
    Ok(palindromic_table(n, Space::DecoratedM3, 4 * k - 2, |p| {
        cumulative_binomial(n, p)
    }))
}

/// Number of critical pairs per combinatorial index.
pub fn morse_census(catalog: &Catalog) -> BTreeMap<usize, u64> {
    let mut census = BTreeMap::new();
    for e in &catalog.entries {
        *census.entry(e.index_combinatorial as usize).or_insert(0) += 1;
    }
    census
}

/// The same census computed straight from the sign words, without
/// realizing any polygon. Agrees with [`morse_census`] of the equilateral
/// catalog and stays cheap for `n` up to 21.
pub fn type_census(n: usize) -> Result<BTreeMap<usize, u64>> {
    check_odd(n)?;
    let k = (n / 2) as i64;
    let mut census = BTreeMap::new();
    for_each_sign_word(n, |_, sum| {
        let e = (sum + n as i64) / 2;
        let c = (n as i64 - sum.abs()) / 2;
        for w in 1..=(k - c) {
            let omega = w * sum.signum();
            let m = (2 * e - 2 * omega - 2) as usize;
            *census.entry(m).or_insert(0) += 1;
        }
    });
    Ok(census)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeRow {
    pub degree: usize,
    pub morse_count: u64,
    #[serde(serialize_with = "ser_big")]
    pub betti: BigUint,
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerfectnessReport {
    pub n: usize,
    pub per_index: Vec<DegreeRow>,
    pub verdict: bool,
    pub total_critical: u64,
    #[serde(serialize_with = "ser_big")]
    pub total_betti: BigUint,
}

pub fn compare_census(n: usize, census: &BTreeMap<usize, u64>, betti: &BettiTable) -> PerfectnessReport {
    let mut rows = Vec::new();
    let mut verdict = census.keys().all(|&m| m <= betti.dim && m % 2 == 0);
    for (degree, b) in betti.even_degrees() {
        let morse_count = census.get(&degree).copied().unwrap_or(0);
        verdict &= BigUint::from(morse_count) == *b;
        rows.push(DegreeRow {
            degree,
            morse_count,
            betti: b.clone(),
        });
    }
    PerfectnessReport {
        n,
        verdict,
        total_critical: census.values().sum(),
        total_betti: betti.total(),
        per_index: rows,
    }
}

/// Compares the census of critical pairs against the decorated Betti numbers.
pub fn verify_perfect(n: usize) -> Result<PerfectnessReport> {
    let betti = betti_decorated(n)?;
    let census = type_census(n)?;
    Ok(compare_census(n, &census, &betti))
}

/// Census of an explicit list of types.
pub fn census_of_types<'a>(types: impl IntoIterator<Item = &'a CyclicType>) -> BTreeMap<usize, u64> {
    let mut census = BTreeMap::new();
    for t in types {
        *census.entry(combinatorial_index(t) as usize).or_insert(0) += 1;
    }
    census
}
