//! Chord and center symbols of torus operators.
//!
//! Both kinds are stored on an `N×N` fundamental block and extended to any
//! integer label by exact phase rules:
//!
//! * chords `(r, s) ∈ [0, N−1]²`, with `A(ξ) = Tr(Â T_{−ξ})`;
//! * centers `(a2, b2) ∈ [0, N−1]²` in doubled labels (the quarter torus),
//!   with `A(x) = Tr(Â R_x)`.
//!
//! For odd `N` the center symbol can be moved onto the integer points
//! `X = (2α, 2β)` of the quantum phase space, where `Tr R_X = 1`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{
    center_chord_turns, f_n_labels, CenterIndex, ChordIndex, Phase, TorusSpace,
};
use crate::operators::{
    accumulate, max_abs_diff, reflection_columns, trace_against, translation_columns, CMatrix,
    TorusOperator, TorusState,
};

fn check_block(space: &TorusSpace, values: &CMatrix) -> Result<()> {
    let n = space.n();
    for d in [values.nrows(), values.ncols()] {
        if d != n {
            return Err(Error::Dimension { expected: n, found: d });
        }
    }
    Ok(())
}

macro_rules! symbol_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq)]
        pub struct $name {
            space: TorusSpace,
            values: CMatrix,
        }

        impl $name {
            pub fn new(space: TorusSpace, values: CMatrix) -> Result<Self> {
                check_block(&space, &values)?;
                Ok($name { space, values })
            }

            #[allow(dead_code)]
            pub(crate) fn from_parts(space: TorusSpace, values: CMatrix) -> Self {
                $name { space, values }
            }

            pub fn zeros(space: TorusSpace) -> Self {
                $name { space, values: CMatrix::zeros(space.n(), space.n()) }
            }

            pub fn space(&self) -> &TorusSpace {
                &self.space
            }

            /// The stored fundamental block.
            pub fn values(&self) -> &CMatrix {
                &self.values
            }

            pub fn max_abs_diff(&self, other: &$name) -> f64 {
                max_abs_diff(&self.values, &other.values)
            }

            pub fn scale(&self, c: Complex64) -> Self {
                $name { space: self.space, values: &self.values * c }
            }
        }
    };
}

symbol_type!(
    /// Chord symbol, `values[(r, s)] = A(ξ_{r,s})`.
    ChordSymbol
);
symbol_type!(
    /// Center (Weyl) symbol on the quarter torus, `values[(a2, b2)] = A(x)`.
    CenterSymbol
);
symbol_type!(
    /// Odd-`N` center symbol on the integer points, `values[(α, β)] = A(X)`.
    QpsSymbol
);

fn split(k: i64, n: i64) -> (i64, i64) {
    (k.rem_euclid(n), k.div_euclid(n))
}

fn sign(e: i64) -> f64 {
    if e.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Extension phase of a chord symbol for `(r0 + k_p N, s0 + k_q N)`.
pub(crate) fn chord_extension_factor(space: &TorusSpace, r: i64, s: i64) -> (usize, usize, Complex64) {
    let n = space.n_i64();
    let (r0, kp) = split(r, n);
    let (s0, kq) = split(s, n);
    let chi = space.chi_q_phase() * kp - space.chi_p_phase() * kq;
    let f = (-chi).to_complex() * sign(s0 * kp + r0 * kq + kp * kq * n);
    (r0 as usize, s0 as usize, f)
}

/// Extension sign of a center symbol for `(a0 + k_p N, b0 + k_q N)`.
pub(crate) fn center_extension_sign(n: i64, a2: i64, b2: i64) -> (usize, usize, f64) {
    let (a0, kp) = split(a2, n);
    let (b0, kq) = split(b2, n);
    (a0 as usize, b0 as usize, sign(b0 * kp + a0 * kq + kp * kq * n))
}

/// Chord symbol at any integer chord.
pub fn extend_chord(sym: &ChordSymbol, r: i64, s: i64) -> Complex64 {
    let (i, j, f) = chord_extension_factor(&sym.space, r, s);
    sym.values[(i, j)] * f
}

/// Center symbol at any doubled center label.
pub fn extend_center(sym: &CenterSymbol, a2: i64, b2: i64) -> Complex64 {
    let (i, j, f) = center_extension_sign(sym.space.n_i64(), a2, b2);
    sym.values[(i, j)] * f
}

impl ChordSymbol {
    pub fn at(&self, chord: ChordIndex) -> Complex64 {
        extend_chord(self, chord.r, chord.s)
    }

    /// The symbol of the identity, `N δ_ξ`.
    pub fn identity(space: TorusSpace) -> Self {
        let mut s = ChordSymbol::zeros(space);
        s.values[(0, 0)] = Complex64::from(space.n() as f64);
        s
    }

    /// `Tr Â = A(0)`.
    pub fn trace(&self) -> Complex64 {
        self.values[(0, 0)]
    }
}

impl CenterSymbol {
    pub fn at(&self, center: CenterIndex) -> Complex64 {
        extend_center(self, center.a2, center.b2)
    }

    /// The symbol of the identity, `f_N(x)`.
    pub fn identity(space: TorusSpace) -> Self {
        let n = space.n_i64();
        let values = CMatrix::from_fn(space.n(), space.n(), |a, b| {
            Complex64::from(f_n_labels(n, a as i64, b as i64) as f64)
        });
        CenterSymbol { space, values }
    }

    /// `Tr Â = (1/N) Σ_quarter A(x) f_N(x)`.
    pub fn trace(&self) -> Complex64 {
        let n = self.space.n_i64();
        let mut acc = Complex64::from(0.0);
        for a in 0..n {
            for b in 0..n {
                acc += self.values[(a as usize, b as usize)] * f_n_labels(n, a, b) as f64;
            }
        }
        acc / n as f64
    }

    /// Values on the full `2N × 2N` doubled-label grid, `grid[(a2, b2)]`.
    pub fn extended_grid(&self) -> CMatrix {
        let n = self.space.n();
        CMatrix::from_fn(2 * n, 2 * n, |a, b| extend_center(self, a as i64, b as i64))
    }

    /// Largest imaginary part over the extended grid; zero for Hermitian operators.
    pub fn max_imag(&self) -> f64 {
        self.extended_grid().iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

impl QpsSymbol {
    pub fn at(&self, alpha: i64, beta: i64) -> Complex64 {
        let n = self.space.n_i64();
        self.values[(alpha.rem_euclid(n) as usize, beta.rem_euclid(n) as usize)]
    }

    /// The identity, constant 1.
    pub fn identity(space: TorusSpace) -> Result<Self> {
        space.require_odd()?;
        let values = CMatrix::from_element(space.n(), space.n(), Complex64::from(1.0));
        Ok(QpsSymbol { space, values })
    }

    /// Back to the quarter-torus labels.
    pub fn to_center(&self) -> CenterSymbol {
        let n = self.space.n_i64();
        let half = |k: i64| if k % 2 == 0 { k / 2 } else { (k + n) / 2 };
        let values = CMatrix::from_fn(self.space.n(), self.space.n(), |a, b| {
            let (alpha, beta) = (half(a as i64), half(b as i64));
            let (_, _, sg) = center_extension_sign(n, 2 * alpha, 2 * beta);
            self.values[(alpha as usize, beta as usize)] * sg
        });
        CenterSymbol { space: self.space, values }
    }
}

/// `A(ξ) = Tr(Â T_{−ξ})` on the fundamental block.
pub fn chord_symbol(op: &TorusOperator) -> ChordSymbol {
    let space = *op.space();
    let n = space.n();
    let values = CMatrix::from_fn(n, n, |r, s| {
        let cols = translation_columns(&space, ChordIndex::new(-(r as i64), -(s as i64)));
        trace_against(op.matrix(), &cols)
    });
    ChordSymbol { space, values }
}

/// The same chord symbol read off the position matrix elements,
/// `A(ξ) = Σ_n ⟨q_{n+s}|Â|q_n⟩ exp(−i2π r(n + s/2 + χ_q)/N)`.
pub fn chord_symbol_from_positions(op: &TorusOperator) -> ChordSymbol {
    let space = *op.space();
    let n = space.n_i64();
    let values = CMatrix::from_fn(space.n(), space.n(), |r, s| {
        let (r, s) = (r as i64, s as i64);
        let mut acc = Complex64::from(0.0);
        for k in 0..n {
            let (row, w) = split(k + s, n);
            let phase = space.chi_p_phase() * w
                - Phase::from_ratio((r * (2 * k + s)) as i128, 2 * n as i128)
                - space.chi_q_phase() * r / n;
            acc += op.matrix()[(row as usize, k as usize)] * phase.to_complex();
        }
        acc
    });
    ChordSymbol { space, values }
}

/// `Â = (1/N) Σ_ξ A(ξ) T_ξ`.
pub fn operator_from_chord(sym: &ChordSymbol) -> TorusOperator {
    let space = sym.space;
    let n = space.n();
    let mut m = CMatrix::zeros(n, n);
    for r in 0..n {
        for s in 0..n {
            let cols = translation_columns(&space, ChordIndex::new(r as i64, s as i64));
            accumulate(&mut m, &cols, sym.values[(r, s)] / n as f64);
        }
    }
    TorusOperator::from_parts(space, m)
}

/// `A(x) = Tr(Â R_x)` on the quarter torus.
pub fn center_symbol(op: &TorusOperator) -> CenterSymbol {
    let space = *op.space();
    let n = space.n();
    let values = CMatrix::from_fn(n, n, |a, b| {
        let cols = reflection_columns(&space, CenterIndex::new(a as i64, b as i64));
        trace_against(op.matrix(), &cols)
    });
    CenterSymbol { space, values }
}

/// The same center symbol read off the position matrix elements,
/// `A(x) = Σ_n ⟨q_{2b−n}|Â|q_n⟩ exp(−i2π·2(b−n)(a + χ_p)/N)`.
pub fn center_symbol_from_positions(op: &TorusOperator) -> CenterSymbol {
    let space = *op.space();
    let n = space.n_i64();
    let values = CMatrix::from_fn(space.n(), space.n(), |a2, b2| {
        let (a2, b2) = (a2 as i64, b2 as i64);
        let mut acc = Complex64::from(0.0);
        for k in 0..n {
            let (row, w) = split(b2 - k, n);
            let phase = space.chi_p_phase() * w
                - Phase::from_ratio(((b2 - 2 * k) * a2) as i128, 2 * n as i128)
                - space.chi_p_phase() * (b2 - 2 * k) / n;
            acc += op.matrix()[(row as usize, k as usize)] * phase.to_complex();
        }
        acc
    });
    CenterSymbol { space, values }
}

/// `Â = (1/N) Σ_quarter R_x A(x)`.
pub fn operator_from_center(sym: &CenterSymbol) -> TorusOperator {
    let space = sym.space;
    let n = space.n();
    let mut m = CMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let cols = reflection_columns(&space, CenterIndex::new(a as i64, b as i64));
            accumulate(&mut m, &cols, sym.values[(a, b)] / n as f64);
        }
    }
    TorusOperator::from_parts(space, m)
}

/// `A(ξ) = (1/N) Σ_x A(x) f_N(x + ξ/2) exp(i2πN x∧ξ)`.
pub fn center_to_chord(sym: &CenterSymbol) -> ChordSymbol {
    let space = sym.space;
    let n = space.n_i64();
    let values = CMatrix::from_fn(space.n(), space.n(), |r, s| {
        let xi = ChordIndex::new(r as i64, s as i64);
        let mut acc = Complex64::from(0.0);
        for a2 in 0..n {
            for b2 in 0..n {
                let f = f_n_labels(n, a2 + xi.r, b2 + xi.s);
                if f == 0 {
                    continue;
                }
                let x = CenterIndex::new(a2, b2);
                acc += sym.values[(a2 as usize, b2 as usize)]
                    * center_chord_turns(&space, x, xi).to_complex()
                    * f as f64;
            }
        }
        acc / n as f64
    });
    ChordSymbol { space, values }
}

/// `A(x) = (1/N) Σ_ξ A(ξ) f_N(x + ξ/2) exp(−i2πN x∧ξ)`.
pub fn chord_to_center(sym: &ChordSymbol) -> CenterSymbol {
    let space = sym.space;
    let n = space.n_i64();
    let values = CMatrix::from_fn(space.n(), space.n(), |a2, b2| {
        let x = CenterIndex::new(a2 as i64, b2 as i64);
        let mut acc = Complex64::from(0.0);
        for r in 0..n {
            for s in 0..n {
                let f = f_n_labels(n, x.a2 + r, x.b2 + s);
                if f == 0 {
                    continue;
                }
                let xi = ChordIndex::new(r, s);
                acc += sym.values[(r as usize, s as usize)]
                    * (-center_chord_turns(&space, x, xi)).to_complex()
                    * f as f64;
            }
        }
        acc / n as f64
    });
    CenterSymbol { space, values }
}

/// `⟨q_m|Â|q_n⟩ = (1/N) Σ_r A(r, m−n) exp(i2π r((m+n)/2 + χ_q)/N)`.
pub fn position_matrix_from_chord(sym: &ChordSymbol) -> TorusOperator {
    let space = sym.space;
    let n = space.n_i64();
    let m = CMatrix::from_fn(space.n(), space.n(), |row, col| {
        let (row, col) = (row as i64, col as i64);
        let mut acc = Complex64::from(0.0);
        for r in 0..n {
            let phase = Phase::from_ratio((r * (row + col)) as i128, 2 * n as i128)
                + space.chi_q_phase() * r / n;
            acc += extend_chord(sym, r, row - col) * phase.to_complex();
        }
        acc / n as f64
    });
    TorusOperator::from_parts(space, m)
}

/// `⟨q_m|Â|q_n⟩ = (1/N) Σ_a A(a, (m+n)/2) exp(i2π(m−n)(a + χ_p)/N)`.
pub fn position_matrix_from_center(sym: &CenterSymbol) -> TorusOperator {
    let space = sym.space;
    let n = space.n_i64();
    let m = CMatrix::from_fn(space.n(), space.n(), |row, col| {
        let (row, col) = (row as i64, col as i64);
        let mut acc = Complex64::from(0.0);
        for a2 in 0..n {
            let phase = Phase::from_ratio(((row - col) * a2) as i128, 2 * n as i128)
                + space.chi_p_phase() * (row - col) / n;
            acc += extend_center(sym, a2, row + col) * phase.to_complex();
        }
        acc / n as f64
    });
    TorusOperator::from_parts(space, m)
}

/// Moves an odd-`N` center symbol onto the integer points `X = (2α, 2β)`.
pub fn recenter_odd_n(sym: &CenterSymbol) -> Result<QpsSymbol> {
    sym.space.require_odd()?;
    let values = CMatrix::from_fn(sym.space.n(), sym.space.n(), |alpha, beta| {
        extend_center(sym, 2 * alpha as i64, 2 * beta as i64)
    });
    Ok(QpsSymbol { space: sym.space, values })
}

/// `A(X) = Tr(Â R_X)` at the integer points, odd `N` only.
pub fn qps_symbol(op: &TorusOperator) -> Result<QpsSymbol> {
    let space = *op.space();
    space.require_odd()?;
    let values = CMatrix::from_fn(space.n(), space.n(), |alpha, beta| {
        let cols = reflection_columns(&space, CenterIndex::qps(alpha as i64, beta as i64));
        trace_against(op.matrix(), &cols)
    });
    Ok(QpsSymbol { space, values })
}

/// `Â = (1/N) Σ_X R_X A(X)`.
pub fn operator_from_qps(sym: &QpsSymbol) -> TorusOperator {
    let space = sym.space;
    let n = space.n();
    let mut m = CMatrix::zeros(n, n);
    for alpha in 0..n {
        for beta in 0..n {
            let cols = reflection_columns(&space, CenterIndex::qps(alpha as i64, beta as i64));
            accumulate(&mut m, &cols, sym.values[(alpha, beta)] / n as f64);
        }
    }
    TorusOperator::from_parts(space, m)
}

/// Raw Wigner symbol `W(x) = Tr(ρ R_x)` of the normalized state, so that
/// `(1/N) Σ_quarter W(x) f_N(x) = 1`.
pub fn wigner(state: &TorusState) -> Result<CenterSymbol> {
    Ok(center_symbol(&state.normalized()?.projector()))
}
