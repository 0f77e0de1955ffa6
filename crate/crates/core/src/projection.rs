//! Periodic plane observables given by finite Fourier series, their Weyl
//! quantization on the torus and the projection of plane symbols onto torus
//! symbols.
//!
//! The coefficient `H_{r,s}` multiplies the translation `T_{r,s}`, whose plane
//! symbol is `exp(i2π(r q − s p))`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::lattice::{CenterIndex, ChordIndex, TorusSpace};
use crate::operators::{accumulate, translation_columns, CMatrix, TorusOperator};

/// `H(p, q) = Σ H_{r,s} exp(i2π(r q − s p))` with finitely many terms.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PeriodicPlaneSymbol {
    coefficients: BTreeMap<(i64, i64), Complex64>,
}

impl PeriodicPlaneSymbol {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `c` to the coefficient of chord `(r, s)`.
    pub fn add_term(&mut self, r: i64, s: i64, c: Complex64) {
        *self.coefficients.entry((r, s)).or_default() += c;
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, i64, Complex64)>>(terms: I) -> Self {
        let mut h = Self::new();
        for (r, s, c) in terms {
            h.add_term(r, s, c);
        }
        h
    }

    /// Harper's model `cos(2πp) + cos(2πq)`.
    pub fn harper() -> Self {
        let half = Complex64::from(0.5);
        Self::from_terms([(1, 0, half), (-1, 0, half), (0, 1, half), (0, -1, half)])
    }

    pub fn coefficient(&self, r: i64, s: i64) -> Complex64 {
        self.coefficients.get(&(r, s)).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i64, Complex64)> + '_ {
        self.coefficients.iter().map(|(&(r, s), &c)| (r, s, c))
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// True when `H_{−r,−s} = H_{r,s}*` for every term.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms().all(|(r, s, c)| (self.coefficient(-r, -s) - c.conj()).norm() <= tol)
    }

    pub fn evaluate(&self, p: f64, q: f64) -> Complex64 {
        self.terms()
            .map(|(r, s, c)| c * Complex64::from_polar(1.0, TAU * (r as f64 * q - s as f64 * p)))
            .sum()
    }
}

/// `Ĥ = Σ H_{r,s} T_{r,s}`.
pub fn quantize_hamiltonian(space: &TorusSpace, h: &PeriodicPlaneSymbol) -> TorusOperator {
    let n = space.n();
    let mut m = CMatrix::zeros(n, n);
    for (r, s, c) in h.terms() {
        accumulate(&mut m, &translation_columns(space, ChordIndex::new(r, s)), c);
    }
    TorusOperator::new(*space, m).expect("square matrix of the space dimension")
}

/// Torus chord symbol of the quantized observable at `chord`, as the
/// phase-weighted sum of the plane coefficients at the equivalent chords
/// `ξ + kN`:
/// `A(ξ) = N Σ_k (−1)^{s k_p + r k_q + k_p k_q N} exp(i2π(k_p χ_q − k_q χ_p)) H_{ξ+kN}`.
///
/// The factor `N` is the ratio of torus to plane trace normalizations,
/// read off the identity (`H_{0,0} = 1` gives `A(0) = N`).
pub fn project_plane_chord_symbol(
    space: &TorusSpace,
    h: &PeriodicPlaneSymbol,
    chord: ChordIndex,
) -> Complex64 {
    let n = space.n_i64();
    let mut acc = Complex64::from(0.0);
    for (r, s, c) in h.terms() {
        let (dr, ds) = (r - chord.r, s - chord.s);
        if dr.rem_euclid(n) != 0 || ds.rem_euclid(n) != 0 {
            continue;
        }
        let (kp, kq) = (dr / n, ds / n);
        let sign = if (chord.s * kp + chord.r * kq + kp * kq * n).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        };
        let chi = space.chi_q_phase() * kp - space.chi_p_phase() * kq;
        acc += c * chi.to_complex() * sign;
    }
    acc * n as f64
}

/// Torus center symbol of the quantized observable at `center`, as the
/// average of the plane symbol over the four half-period translates of `x`:
/// `A(x) = ½ Σ_{k ∈ {0,1}²} (−1)^{a2 k_q − b2 k_p + N k_p k_q} H(x + k/2)`.
///
/// The weights do not depend on χ.
pub fn project_plane_center_symbol(
    space: &TorusSpace,
    h: &PeriodicPlaneSymbol,
    center: CenterIndex,
) -> Complex64 {
    let n = space.n_i64();
    let [p, q] = center.point(space);
    let mut acc = Complex64::from(0.0);
    for kp in 0..2i64 {
        for kq in 0..2i64 {
            let e = center.a2 * kq - center.b2 * kp + n * kp * kq;
            let w = if e.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            acc += h.evaluate(p + kp as f64 / 2.0, q + kq as f64 / 2.0) * w;
        }
    }
    acc * 0.5
}
