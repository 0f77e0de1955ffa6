//! Torus geometry: the space itself, chord and center labels, exact phases,
//! symplectic products and the polygon areas that show up in product rules.
//!
//! Centers are always carried as doubled integers `(a2, b2)` so that
//! half-integer labels never touch floating point.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest denominator accepted when reading a float angle as an exact fraction.
const MAX_EXACT_DENOM: i128 = 1_000_000;

/// A phase `exp(i2π·t)` stored as a number of turns `t`.
///
/// The turns are an exact fraction plus a floating residual. The residual is
/// zero whenever every ingredient was rational, which is the case for all
/// phases produced by the operator algebra at rational Floquet angles.
/// Turns are not reduced mod 1 until [`Phase::reduced`] or conversion to a
/// complex number, so a `Phase` can also stand in for a real angle like χ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Phase {
    exact: Ratio<i128>,
    residual: f64,
}

impl Phase {
    pub fn zero() -> Self {
        Phase { exact: Ratio::zero(), residual: 0.0 }
    }

    /// The exact phase `exp(i2π·num/den)`.
    ///
    /// # Panics
    /// If `den` is zero.
    pub fn from_ratio(num: i128, den: i128) -> Self {
        Phase { exact: Ratio::new(num, den), residual: 0.0 }
    }

    /// Reads `turns` as an exact fraction when it has a small denominator
    /// and round-trips, otherwise keeps it as a float.
    pub fn from_turns(turns: f64) -> Self {
        if let Some(r) = Ratio::<i128>::approximate_float(turns) {
            if *r.denom() <= MAX_EXACT_DENOM
                && (*r.numer() as f64) / (*r.denom() as f64) == turns
            {
                return Phase { exact: r, residual: 0.0 };
            }
        }
        Phase { exact: Ratio::zero(), residual: turns }
    }

    /// Numerator of the exact part after reduction into `[0, 1)`.
    pub fn numerator(&self) -> i128 {
        *self.reduced().exact.numer()
    }

    /// Denominator of the exact part after reduction into `[0, 1)`.
    pub fn denominator(&self) -> i128 {
        *self.exact.denom()
    }

    pub fn is_exact(&self) -> bool {
        self.residual == 0.0
    }

    /// Turns as a float, unreduced.
    pub fn turns(&self) -> f64 {
        self.exact.to_f64().unwrap_or(0.0) + self.residual
    }

    /// Same phase with turns reduced into `[0, 1)`.
    pub fn reduced(&self) -> Self {
        let exact = self.exact - self.exact.floor();
        let residual = self.residual.rem_euclid(1.0);
        Phase { exact, residual }
    }

    pub fn to_complex(&self) -> Complex64 {
        let r = self.reduced();
        let t = r.exact.to_f64().unwrap_or(0.0) + r.residual;
        Complex64::from_polar(1.0, TAU * t)
    }

    /// Product of two angles, both read as turns.
    pub fn mul_phase(&self, other: &Phase) -> Phase {
        let cross = self.exact.to_f64().unwrap_or(0.0) * other.residual
            + self.residual * other.exact.to_f64().unwrap_or(0.0)
            + self.residual * other.residual;
        Phase { exact: self.exact * other.exact, residual: cross }
    }

    /// Equality of the phases `exp(i2π·t)`, i.e. of turns mod 1.
    pub fn same_phase(&self, other: &Phase, tol: f64) -> bool {
        let d = (*self - *other).reduced();
        let t = d.exact.to_f64().unwrap_or(0.0) + d.residual;
        t.min(1.0 - t).abs() <= tol
    }
}

impl Default for Phase {
    fn default() -> Self {
        Phase::zero()
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.exact)
        } else {
            write!(f, "{}", self.turns())
        }
    }
}

impl Add for Phase {
    type Output = Phase;
    fn add(self, o: Phase) -> Phase {
        Phase { exact: self.exact + o.exact, residual: self.residual + o.residual }
    }
}

impl AddAssign for Phase {
    fn add_assign(&mut self, o: Phase) {
        *self = *self + o;
    }
}

impl Sub for Phase {
    type Output = Phase;
    fn sub(self, o: Phase) -> Phase {
        Phase { exact: self.exact - o.exact, residual: self.residual - o.residual }
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        Phase { exact: -self.exact, residual: -self.residual }
    }
}

impl Mul<i64> for Phase {
    type Output = Phase;
    fn mul(self, k: i64) -> Phase {
        Phase { exact: self.exact * k as i128, residual: self.residual * k as f64 }
    }
}

impl Div<i64> for Phase {
    type Output = Phase;
    fn div(self, k: i64) -> Phase {
        Phase { exact: self.exact / k as i128, residual: self.residual / k as f64 }
    }
}

/// Hilbert space of one degree of freedom on the unit torus: `N` states and
/// Floquet angles `(χ_p, χ_q)`. Planck's constant is fixed by `2πħN = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusSpace {
    n: usize,
    chi_p: Phase,
    chi_q: Phase,
}

impl TorusSpace {
    pub fn new(n: usize, chi_p: f64, chi_q: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpace("N must be at least 1".into()));
        }
        for (name, c) in [("chi_p", chi_p), ("chi_q", chi_q)] {
            if !c.is_finite() || !(0.0..1.0).contains(&c) {
                return Err(Error::InvalidSpace(format!("{name} = {c} is outside [0, 1)")));
            }
        }
        Ok(TorusSpace { n, chi_p: Phase::from_turns(chi_p), chi_q: Phase::from_turns(chi_q) })
    }

    /// Periodic boundary conditions, `χ = 0`.
    pub fn periodic(n: usize) -> Result<Self> {
        TorusSpace::new(n, 0.0, 0.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_i64(&self) -> i64 {
        self.n as i64
    }

    pub fn chi_p(&self) -> f64 {
        self.chi_p.turns()
    }

    pub fn chi_q(&self) -> f64 {
        self.chi_q.turns()
    }

    pub fn chi_p_phase(&self) -> Phase {
        self.chi_p
    }

    pub fn chi_q_phase(&self) -> Phase {
        self.chi_q
    }

    pub fn hbar(&self) -> f64 {
        1.0 / (TAU * self.n as f64)
    }

    pub fn is_odd(&self) -> bool {
        self.n % 2 == 1
    }

    pub fn has_zero_chi(&self) -> bool {
        self.chi_p.turns() == 0.0 && self.chi_q.turns() == 0.0
    }

    pub(crate) fn check_same(&self, other: &TorusSpace) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch(format!(
                "N={} chi=({}, {}) vs N={} chi=({}, {})",
                self.n,
                self.chi_p(),
                self.chi_q(),
                other.n,
                other.chi_p(),
                other.chi_q()
            )))
        }
    }

    pub(crate) fn require_odd(&self) -> Result<()> {
        if self.is_odd() {
            Ok(())
        } else {
            Err(Error::RequiresOddN(self.n))
        }
    }
}

/// Chord `ξ = (r/N, s/N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ChordIndex {
    pub r: i64,
    pub s: i64,
}

impl ChordIndex {
    pub fn new(r: i64, s: i64) -> Self {
        ChordIndex { r, s }
    }

    pub fn vector(&self, space: &TorusSpace) -> [f64; 2] {
        let n = space.n as f64;
        [self.r as f64 / n, self.s as f64 / n]
    }
}

impl Neg for ChordIndex {
    type Output = ChordIndex;
    fn neg(self) -> ChordIndex {
        ChordIndex::new(-self.r, -self.s)
    }
}

impl Add for ChordIndex {
    type Output = ChordIndex;
    fn add(self, o: ChordIndex) -> ChordIndex {
        ChordIndex::new(self.r + o.r, self.s + o.s)
    }
}

impl Sub for ChordIndex {
    type Output = ChordIndex;
    fn sub(self, o: ChordIndex) -> ChordIndex {
        ChordIndex::new(self.r - o.r, self.s - o.s)
    }
}

/// Center `x = ((a + χ_p)/N, (b + χ_q)/N)` with `a = a2/2`, `b = b2/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CenterIndex {
    pub a2: i64,
    pub b2: i64,
}

impl CenterIndex {
    pub fn new(a2: i64, b2: i64) -> Self {
        CenterIndex { a2, b2 }
    }

    /// Integer point `(α, β)` of the quantum phase space.
    pub fn qps(alpha: i64, beta: i64) -> Self {
        CenterIndex { a2: 2 * alpha, b2: 2 * beta }
    }

    pub fn point(&self, space: &TorusSpace) -> [f64; 2] {
        let n = space.n as f64;
        [
            (self.a2 as f64 / 2.0 + space.chi_p()) / n,
            (self.b2 as f64 / 2.0 + space.chi_q()) / n,
        ]
    }

    /// `x + ξ/2` in doubled labels.
    pub fn shifted(&self, chord: ChordIndex) -> CenterIndex {
        CenterIndex::new(self.a2 + chord.r, self.b2 + chord.s)
    }
}

/// `u ∧ v = u_p v_q − u_q v_p`.
pub fn symplectic_product(u: [f64; 2], v: [f64; 2]) -> f64 {
    u[0] * v[1] - u[1] * v[0]
}

pub(crate) fn wedge_i(u: (i64, i64), v: (i64, i64)) -> i64 {
    u.0 * v.1 - u.1 * v.0
}

/// 1 if `x − y` is an integer multiple of `period` (to 1e-9), else 0.
pub fn n_periodic_delta(x: f64, y: f64, period: f64) -> u8 {
    let d = (x - y) / period;
    ((d - d.round()).abs() * period <= 1e-9) as u8
}

fn parity(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `f_N` from raw doubled labels.
pub(crate) fn f_n_labels(n: i64, a2: i64, b2: i64) -> i64 {
    (1 + parity(a2) + parity(b2) + parity(a2 + b2 + n)) / 2
}

/// Trace of the reflection through `center`: the signed count of fixed
/// points of the classical reflection on the torus.
pub fn f_n(space: &TorusSpace, center: CenterIndex) -> i8 {
    f_n_labels(space.n_i64(), center.a2, center.b2) as i8
}

/// Area `D` of the polygon built from `chords`, with
/// `T_{ξ1}···T_{ξj} = T_{Σξ} exp(i2πN·D)`.
///
/// `D = ½ Σ_{i<k} ξ_i∧ξ_k`. For two chords this is `+½ ξ1∧ξ2`, which is
/// the sign the operators actually produce.
pub fn chord_polygon_phase(chords: &[[f64; 2]]) -> Result<f64> {
    if chords.is_empty() {
        return Err(Error::Domain("chord polygon needs at least one chord".into()));
    }
    let mut d = 0.0;
    let mut partial = [0.0, 0.0];
    for c in chords {
        d += 0.5 * symplectic_product(partial, *c);
        partial = [partial[0] + c[0], partial[1] + c[1]];
    }
    Ok(d)
}

/// Numerator over `2N` of `N·D` for integer chords.
pub(crate) fn chord_polygon_numerator(chords: &[ChordIndex]) -> i64 {
    let mut acc = 0;
    let mut partial = (0, 0);
    for c in chords {
        acc += wedge_i(partial, (c.r, c.s));
        partial = (partial.0 + c.r, partial.1 + c.s);
    }
    acc
}

/// Exact `N·D` for integer chords.
pub fn chord_polygon_turns(space: &TorusSpace, chords: &[ChordIndex]) -> Result<Phase> {
    if chords.is_empty() {
        return Err(Error::Domain("chord polygon needs at least one chord".into()));
    }
    Ok(Phase::from_ratio(chord_polygon_numerator(chords) as i128, 2 * space.n as i128))
}

/// Area `Δ_{2n+1}` of the polygon circumscribed around `reference` and
/// `centers = [x_1, …, x_2n]`, defined by
/// `Tr(R_{x_2n}···R_{x_1} R_x) = exp(i2πN·Δ) f_N(x + Σ_j (−1)^j x_j)`.
///
/// For two centers this is `2(x1∧x2 + x2∧x + x∧x1)`.
pub fn center_polygon_phase(reference: [f64; 2], centers: &[[f64; 2]]) -> Result<f64> {
    if centers.is_empty() || !centers.len().is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "center polygon needs a positive even number of centers, got {}",
            centers.len()
        )));
    }
    let u: Vec<[f64; 2]> = centers
        .iter()
        .map(|c| [c[0] - reference[0], c[1] - reference[1]])
        .collect();
    let mut delta = 0.0;
    for pair in u.chunks(2) {
        delta -= 2.0 * symplectic_product(pair[1], pair[0]);
    }
    let eta: Vec<[f64; 2]> = u
        .chunks(2)
        .rev()
        .map(|p| [2.0 * (p[1][0] - p[0][0]), 2.0 * (p[1][1] - p[0][1])])
        .collect();
    Ok(delta + chord_polygon_phase(&eta)?)
}

/// Numerator over `2N` of `N·Δ` for doubled-label centers. Only label
/// differences enter, so the result does not depend on χ.
pub(crate) fn center_polygon_numerator(reference: CenterIndex, centers: &[CenterIndex]) -> i64 {
    let u: Vec<(i64, i64)> = centers
        .iter()
        .map(|c| (c.a2 - reference.a2, c.b2 - reference.b2))
        .collect();
    let mut acc = 0;
    for pair in u.chunks(2) {
        acc -= wedge_i(pair[1], pair[0]);
    }
    let eta: Vec<ChordIndex> = u
        .chunks(2)
        .rev()
        .map(|p| ChordIndex::new(p[1].0 - p[0].0, p[1].1 - p[0].1))
        .collect();
    acc + chord_polygon_numerator(&eta)
}

/// Exact `N·Δ_{2n+1}` for doubled-label centers.
pub fn center_polygon_turns(
    space: &TorusSpace,
    reference: CenterIndex,
    centers: &[CenterIndex],
) -> Result<Phase> {
    if centers.is_empty() || !centers.len().is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "center polygon needs a positive even number of centers, got {}",
            centers.len()
        )));
    }
    Ok(Phase::from_ratio(
        center_polygon_numerator(reference, centers) as i128,
        2 * space.n as i128,
    ))
}

/// `x + Σ_j (−1)^j x_j`, the label whose `f_N` closes a center polygon.
pub fn center_polygon_corner(reference: CenterIndex, centers: &[CenterIndex]) -> CenterIndex {
    let mut c = reference;
    for (j, x) in centers.iter().enumerate() {
        // j is zero-based, the sign belongs to j+1
        let sign = if j % 2 == 0 { -1 } else { 1 };
        c.a2 += sign * x.a2;
        c.b2 += sign * x.b2;
    }
    c
}

/// Exact `N·x∧ξ`.
pub fn center_chord_turns(space: &TorusSpace, x: CenterIndex, xi: ChordIndex) -> Phase {
    let n = space.n_i64();
    Phase::from_ratio((x.a2 * xi.s - x.b2 * xi.r) as i128, 2 * n as i128)
        + (space.chi_p * xi.s - space.chi_q * xi.r) / n
}

/// Powers of `exp(i2π/d)`, for phases whose turns are `k/d` with integer `k`.
#[derive(Clone, Debug)]
pub(crate) struct RootTable {
    roots: Vec<Complex64>,
}

impl RootTable {
    pub fn new(d: usize) -> Self {
        let roots = (0..d)
            .map(|k| Phase::from_ratio(k as i128, d as i128).to_complex())
            .collect();
        RootTable { roots }
    }

    pub fn get(&self, k: i64) -> Complex64 {
        self.roots[k.rem_euclid(self.roots.len() as i64) as usize]
    }
}
