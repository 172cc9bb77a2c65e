//! Geometry of the hexagonal lattice in homogeneous coordinates.
//!
//! A point of the plane is written as a triple `(t1, t2, t3)` with
//! `t1 + t2 + t3 = 0`. The fundamental domain is the hexagon
//!
//! ```text
//! Ω = { -1 <= t1 < 1, -1 <= t2 < 1, -1 < t3 <= 1 }
//! ```
//!
//! and two points are identified when their difference `j` is an integer
//! triple with `j1 ≡ j2 ≡ j3 (mod 3)`. In the `(t1, t2)` chart that period
//! lattice is `{(j1, j2) ∈ Z² : j1 ≡ j2 (mod 3)}`, generated by `(1, 1)` and
//! `(3, 0)`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{HexError, Result};

/// Absolute tolerance on `t1 + t2 + t3` accepted by [`HexPoint::new`].
pub const PLANE_TOLERANCE: f64 = 1e-12;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Integer frequency triple with zero sum.
///
/// Ordering is shell-major: first by [`HexIndex::degree`], then
/// lexicographically on `(k1, k2)`. Iterating a sorted collection of indices
/// therefore visits shells in increasing order and each shell in canonical
/// order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HexIndex {
    k1: i64,
    k2: i64,
    k3: i64,
}

impl HexIndex {
    pub fn new(k1: i64, k2: i64, k3: i64) -> Result<Self> {
        if k1 + k2 + k3 != 0 {
            return Err(HexError::IndexNotOnPlane { k1, k2, k3 });
        }
        Ok(Self { k1, k2, k3 })
    }

    /// Index determined by its first two components.
    pub fn from_pair(k1: i64, k2: i64) -> Self {
        Self { k1, k2, k3: -k1 - k2 }
    }

    pub fn origin() -> Self {
        Self { k1: 0, k2: 0, k3: 0 }
    }

    pub fn k1(&self) -> i64 {
        self.k1
    }

    pub fn k2(&self) -> i64 {
        self.k2
    }

    pub fn k3(&self) -> i64 {
        self.k3
    }

    pub fn components(&self) -> [i64; 3] {
        [self.k1, self.k2, self.k3]
    }

    /// Shell number `|k| = max |k_j|`.
    pub fn degree(&self) -> u32 {
        self.k1.unsigned_abs().max(self.k2.unsigned_abs()).max(self.k3.unsigned_abs()) as u32
    }

    pub fn neg(&self) -> Self {
        Self { k1: -self.k1, k2: -self.k2, k3: -self.k3 }
    }

    pub fn dot(&self, t: &HexPoint) -> f64 {
        self.k1 as f64 * t.t1 + self.k2 as f64 * t.t2 + self.k3 as f64 * t.t3
    }
}

impl Ord for HexIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.k1.cmp(&other.k1))
            .then(self.k2.cmp(&other.k2))
    }
}

impl PartialOrd for HexIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for HexIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.k1, self.k2, self.k3)
    }
}

/// Real point of the plane `t1 + t2 + t3 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexPoint {
    t1: f64,
    t2: f64,
    t3: f64,
}

impl HexPoint {
    pub fn new(t1: f64, t2: f64, t3: f64) -> Result<Self> {
        let sum = t1 + t2 + t3;
        if sum.abs() > PLANE_TOLERANCE || sum.is_nan() {
            return Err(HexError::NotOnPlane { t1, t2, t3, sum });
        }
        Ok(Self { t1, t2, t3 })
    }

    /// Point with `t3 = -(t1 + t2)`.
    pub fn from_pair(t1: f64, t2: f64) -> Self {
        Self { t1, t2, t3: -(t1 + t2) }
    }

    pub fn origin() -> Self {
        Self { t1: 0.0, t2: 0.0, t3: 0.0 }
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    pub fn t3(&self) -> f64 {
        self.t3
    }

    /// `z1 = (2π/3)(t2 - t3)`.
    pub fn z1(&self) -> f64 {
        TWO_PI_3 * (self.t2 - self.t3)
    }

    /// `z2 = (2π/3)(t3 - t1)`.
    pub fn z2(&self) -> f64 {
        TWO_PI_3 * (self.t3 - self.t1)
    }

    /// `z3 = (2π/3)(t1 - t2)`.
    pub fn z3(&self) -> f64 {
        TWO_PI_3 * (self.t1 - self.t2)
    }

    pub fn z(&self) -> [f64; 3] {
        [self.z1(), self.z2(), self.z3()]
    }

    /// Translate by a real displacement given in the `(t1, t2)` chart.
    pub fn translate(&self, d1: f64, d2: f64) -> Self {
        Self::from_pair(self.t1 + d1, self.t2 + d2)
    }

    /// Componentwise sum of two points.
    pub fn add(&self, other: &HexPoint) -> Self {
        Self::from_pair(self.t1 + other.t1, self.t2 + other.t2)
    }
}

const TWO_PI_3: f64 = 2.0 * std::f64::consts::PI / 3.0;

/// Generator matrix and the area of Ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeConstants {
    pub h: [[f64; 2]; 2],
    /// Area of Ω in the `dt1 dt2` measure.
    pub omega_area: f64,
}

pub const LATTICE: LatticeConstants = LatticeConstants {
    h: [[SQRT3, 0.0], [-1.0, 2.0]],
    omega_area: 3.0,
};

/// Jacobian `dx = (2√3/3) dt1 dt2` of the chart change.
pub const JACOBIAN: f64 = 2.0 * SQRT3 / 3.0;

/// `x = (1/3) H (2 t1 + t2, t1 + 2 t2)ᵀ`.
pub fn to_cartesian(t: &HexPoint) -> (f64, f64) {
    let u = (2.0 * t.t1 + t.t2) / 3.0;
    let v = (t.t1 + 2.0 * t.t2) / 3.0;
    let h = LATTICE.h;
    (h[0][0] * u + h[0][1] * v, h[1][0] * u + h[1][1] * v)
}

pub fn from_cartesian(x1: f64, x2: f64) -> HexPoint {
    let t1 = -x2 / 2.0 + SQRT3 * x1 / 2.0;
    let t2 = x2;
    let t3 = -x2 / 2.0 - SQRT3 * x1 / 2.0;
    // t1 + t2 + t3 cancels exactly only in exact arithmetic; keep the stored
    // triple on the plane by deriving t3 when rounding disagrees.
    if t1 + t2 + t3 == 0.0 {
        HexPoint { t1, t2, t3 }
    } else {
        HexPoint::from_pair(t1, t2)
    }
}

/// Membership in the half-open hexagon Ω.
pub fn is_in_omega(t: &HexPoint) -> bool {
    (-1.0..1.0).contains(&t.t1) && (-1.0..1.0).contains(&t.t2) && t.t3 > -1.0 && t.t3 <= 1.0
}

/// True when `j = (j1, j2, -j1-j2)` is a period of the lattice.
pub fn is_period(j1: i64, j2: i64) -> bool {
    (j1 - j2).rem_euclid(3) == 0
}

/// Amount by which a point misses Ω; zero means inside the closure.
fn omega_violation(t1: f64, t2: f64) -> f64 {
    let t3 = -(t1 + t2);
    let mut v: f64 = 0.0;
    for c in [t1, t2, t3] {
        v = v.max(-1.0 - c).max(c - 1.0);
    }
    v
}

/// Representative of `t` modulo the period lattice inside Ω.
///
/// Points already in Ω are returned unchanged, which makes `fold`
/// idempotent.
pub fn fold(t: &HexPoint) -> HexPoint {
    if is_in_omega(t) {
        return *t;
    }
    // Coordinates in the basis (1, 1), (3, 0): t = a (1, 1) + b (3, 0).
    let a = t.t2;
    let b = (t.t1 - t.t2) / 3.0;
    let base1 = a.floor() as i64 + 3 * b.floor() as i64;
    let base2 = a.floor() as i64;

    let mut best: Option<(f64, HexPoint)> = None;
    for s1 in -2..=5_i64 {
        for s2 in -2..=2_i64 {
            if !is_period(s1, s2) {
                continue;
            }
            let j1 = base1 + s1;
            let j2 = base2 + s2;
            let cand = HexPoint::from_pair(t.t1 - j1 as f64, t.t2 - j2 as f64);
            if is_in_omega(&cand) {
                return cand;
            }
            let v = omega_violation(cand.t1, cand.t2);
            if best.is_none_or(|(bv, _)| v < bv) {
                best = Some((v, cand));
            }
        }
    }
    // Only reachable when rounding pushes every candidate off a boundary.
    best.map(|(_, p)| p).unwrap_or(*t)
}

/// The shell `J_ν = {k : |k| = ν}` in canonical order (lexicographic on
/// `(k1, k2)`).
pub fn index_shell(nu: u32) -> Vec<HexIndex> {
    shell_iter(nu).collect()
}

/// Allocation-free iterator over `J_ν` in the order of [`index_shell`].
pub fn shell_iter(nu: u32) -> impl Iterator<Item = HexIndex> {
    let n = nu as i64;
    (-n..=n).flat_map(move |k1| {
        // k2 ranges over the values keeping every component within [-n, n];
        // only the endpoints reach degree n unless |k1| = n.
        let lo = (-n).max(-n - k1);
        let hi = n.min(n - k1);
        let full = k1.abs() == n;
        let (a, b) = if full { (lo, hi) } else { (lo, lo) };
        let tail = if full { None } else { Some(hi) };
        (a..=b).chain(tail).map(move |k2| HexIndex::from_pair(k1, k2))
    })
}

/// All indices with degree at most `max_degree`, shell-major.
pub fn indices_up_to(max_degree: u32) -> Vec<HexIndex> {
    (0..=max_degree).flat_map(index_shell).collect()
}
