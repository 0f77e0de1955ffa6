//! Operators on the torus Hilbert space, as dense `N×N` matrices in the
//! position basis `|q_n⟩`.
//!
//! Translations and reflections are generated from their action on basis
//! states. When a target index leaves `[0, N−1]` it is wrapped and picks up
//! the Bloch phase `|q_{n+wN}⟩ = exp(−i2πχ_p·w)|q_n⟩`.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{center_chord_turns, CenterIndex, ChordIndex, Phase, TorusSpace};

pub type CMatrix = DMatrix<Complex64>;

/// A linear operator on a [`TorusSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct TorusOperator {
    space: TorusSpace,
    matrix: CMatrix,
}

impl TorusOperator {
    pub fn new(space: TorusSpace, matrix: CMatrix) -> Result<Self> {
        let n = space.n();
        if matrix.nrows() != n {
            return Err(Error::Dimension { expected: n, found: matrix.nrows() });
        }
        if matrix.ncols() != n {
            return Err(Error::Dimension { expected: n, found: matrix.ncols() });
        }
        Ok(TorusOperator { space, matrix })
    }

    pub(crate) fn from_parts(space: TorusSpace, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.shape(), (space.n(), space.n()));
        TorusOperator { space, matrix }
    }

    pub fn identity(space: TorusSpace) -> Self {
        TorusOperator { space, matrix: CMatrix::identity(space.n(), space.n()) }
    }

    pub fn zeros(space: TorusSpace) -> Self {
        TorusOperator { space, matrix: CMatrix::zeros(space.n(), space.n()) }
    }

    pub fn space(&self) -> &TorusSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        TorusOperator { space: self.space, matrix: self.matrix.adjoint() }
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        TorusOperator { space: self.space, matrix: &self.matrix * c }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = TorusOperator::identity(self.space);
        for _ in 0..k {
            out.matrix = &out.matrix * &self.matrix;
        }
        out
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &TorusOperator) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }

    pub fn hermiticity_error(&self) -> f64 {
        max_abs_diff(&self.matrix, &self.matrix.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn unitarity_error(&self) -> f64 {
        let n = self.space.n();
        max_abs_diff(&(&self.matrix * self.matrix.adjoint()), &CMatrix::identity(n, n))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    pub fn try_mul(&self, other: &TorusOperator) -> Result<TorusOperator> {
        self.space.check_same(&other.space)?;
        Ok(TorusOperator { space: self.space, matrix: &self.matrix * &other.matrix })
    }
}

pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// # Panics
/// If the operands live on different spaces; use [`TorusOperator::try_mul`]
/// to get an error instead.
impl Mul for &TorusOperator {
    type Output = TorusOperator;
    fn mul(self, o: &TorusOperator) -> TorusOperator {
        self.try_mul(o).expect("operator product across different spaces")
    }
}

impl Add for &TorusOperator {
    type Output = TorusOperator;
    fn add(self, o: &TorusOperator) -> TorusOperator {
        assert_eq!(self.space, o.space, "operator sum across different spaces");
        TorusOperator { space: self.space, matrix: &self.matrix + &o.matrix }
    }
}

impl Sub for &TorusOperator {
    type Output = TorusOperator;
    fn sub(self, o: &TorusOperator) -> TorusOperator {
        assert_eq!(self.space, o.space, "operator difference across different spaces");
        TorusOperator { space: self.space, matrix: &self.matrix - &o.matrix }
    }
}

/// A vector in the position basis.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusState {
    space: TorusSpace,
    amplitudes: DVector<Complex64>,
}

impl TorusState {
    pub fn new(space: TorusSpace, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != space.n() {
            return Err(Error::Dimension { expected: space.n(), found: amplitudes.len() });
        }
        Ok(TorusState { space, amplitudes: DVector::from_vec(amplitudes) })
    }

    /// The position eigenstate `|q_n⟩`, `n` taken mod `N` without phase.
    pub fn position(space: TorusSpace, n: usize) -> Self {
        let mut amplitudes = DVector::zeros(space.n());
        amplitudes[n % space.n()] = Complex64::new(1.0, 0.0);
        TorusState { space, amplitudes }
    }

    pub fn space(&self) -> &TorusSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Domain("cannot normalize a zero state".into()));
        }
        Ok(TorusState { space: self.space, amplitudes: &self.amplitudes / Complex64::from(norm) })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> TorusOperator {
        TorusOperator::from_parts(self.space, &self.amplitudes * self.amplitudes.adjoint())
    }
}

/// Reduces `t` into the window and returns `(index, winding)`.
fn wrap(t: i64, n: i64) -> (usize, i64) {
    let m = t.rem_euclid(n);
    (m as usize, (t - m) / n)
}

/// Finite Fourier transform `F_{m,n} = N^{−1/2} exp(i2π(m+χ_p)(n+χ_q)/N)`.
pub fn fourier_kernel(space: &TorusSpace) -> TorusOperator {
    let n = space.n();
    let norm = 1.0 / (n as f64).sqrt();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        let pi = Phase::from_ratio(i as i128, 1) + space.chi_p_phase();
        for j in 0..n {
            let qj = Phase::from_ratio(j as i128, 1) + space.chi_q_phase();
            m[(i, j)] = (pi.mul_phase(&qj) / n as i64).to_complex() * norm;
        }
    }
    TorusOperator::from_parts(*space, m)
}

/// Translation `T_ξ`, acting as
/// `T_{r,s}|q_n⟩ = exp(i2π r(n + χ_q + s/2)/N) |q_{n+s}⟩`.
pub fn translation(space: &TorusSpace, chord: ChordIndex) -> TorusOperator {
    from_columns(space, &translation_columns(space, chord))
}

/// Entry `n` is `(row, value)` of the single nonzero in column `n` of `T_ξ`.
pub(crate) fn translation_columns(space: &TorusSpace, chord: ChordIndex) -> Vec<(usize, Complex64)> {
    let n = space.n_i64();
    (0..n)
        .map(|col| {
            let (row, w) = wrap(col + chord.s, n);
            let phase = Phase::from_ratio((chord.r * (2 * col + chord.s)) as i128, 2 * n as i128)
                + space.chi_q_phase() * chord.r / n
                - space.chi_p_phase() * w;
            (row, phase.to_complex())
        })
        .collect()
}

/// Reflection `R_x`, acting as
/// `R_x|q_n⟩ = exp(i2π·2(b−n)(a+χ_p)/N) |q_{2b−n}⟩`.
pub fn reflection(space: &TorusSpace, center: CenterIndex) -> TorusOperator {
    from_columns(space, &reflection_columns(space, center))
}

pub(crate) fn reflection_columns(space: &TorusSpace, center: CenterIndex) -> Vec<(usize, Complex64)> {
    let n = space.n_i64();
    (0..n)
        .map(|col| {
            let k = center.b2 - 2 * col;
            let (row, w) = wrap(center.b2 - col, n);
            let phase = Phase::from_ratio((k * center.a2) as i128, 2 * n as i128)
                + space.chi_p_phase() * k / n
                - space.chi_p_phase() * w;
            (row, phase.to_complex())
        })
        .collect()
}

fn from_columns(space: &TorusSpace, cols: &[(usize, Complex64)]) -> TorusOperator {
    let mut m = CMatrix::zeros(space.n(), space.n());
    for (col, &(row, v)) in cols.iter().enumerate() {
        m[(row, col)] = v;
    }
    TorusOperator::from_parts(*space, m)
}

/// `Tr(A·B)` for `B` given by its column form.
pub(crate) fn trace_against(a: &CMatrix, cols: &[(usize, Complex64)]) -> Complex64 {
    cols.iter().enumerate().map(|(col, &(row, v))| a[(col, row)] * v).sum()
}

/// `acc += c·B` for `B` given by its column form.
pub(crate) fn accumulate(acc: &mut CMatrix, cols: &[(usize, Complex64)], c: Complex64) {
    for (col, &(row, v)) in cols.iter().enumerate() {
        acc[(row, col)] += v * c;
    }
}

/// `T_ξ` rebuilt as `(1/2N) Σ exp(−i2πN x∧ξ) R_x`, the sum running over all
/// `2N × 2N` doubled center labels.
pub fn translation_from_reflections(space: &TorusSpace, chord: ChordIndex) -> TorusOperator {
    let n = space.n();
    let mut m = CMatrix::zeros(n, n);
    for a2 in 0..2 * n as i64 {
        for b2 in 0..2 * n as i64 {
            let x = CenterIndex::new(a2, b2);
            let w = (-center_chord_turns(space, x, chord)).to_complex();
            m += reflection(space, x).into_matrix() * w;
        }
    }
    TorusOperator::from_parts(*space, m / Complex64::from(2.0 * n as f64))
}

/// Minimal position shift `T_q = T_{0,1}`.
pub fn schwinger_tq(space: &TorusSpace) -> TorusOperator {
    translation(space, ChordIndex::new(0, 1))
}

/// Minimal momentum shift `T_p = T_{1,0}`.
pub fn schwinger_tp(space: &TorusSpace) -> TorusOperator {
    translation(space, ChordIndex::new(1, 0))
}

/// The unit torus seen inside a torus `ν` times larger in each direction.
#[derive(Clone, Debug)]
pub struct NestedEmbedding {
    big: TorusSpace,
    small: TorusSpace,
    nu: usize,
    isometry: CMatrix,
}

fn integer_part(p: Phase) -> Option<i64> {
    let t = p.turns();
    let k = t.round();
    if p.is_exact() {
        (p.reduced() == Phase::zero()).then_some(k as i64)
    } else {
        ((t - k).abs() < 1e-12).then_some(k as i64)
    }
}

impl NestedEmbedding {
    /// `big` must have `ν²N` states and angles `χ' = νχ − k` for an integer `k`.
    pub fn new(big: TorusSpace, small: TorusSpace, nu: usize) -> Result<Self> {
        if nu == 0 {
            return Err(Error::Domain("nesting factor must be positive".into()));
        }
        let n = small.n();
        if big.n() != nu * nu * n {
            return Err(Error::Dimension { expected: nu * nu * n, found: big.n() });
        }
        let kp = integer_part(small.chi_p_phase() * nu as i64 - big.chi_p_phase());
        let kq = integer_part(small.chi_q_phase() * nu as i64 - big.chi_q_phase());
        let (Some(_), Some(kq)) = (kp, kq) else {
            return Err(Error::Domain(format!(
                "big-torus angles ({}, {}) are not nu*chi minus an integer",
                big.chi_p(),
                big.chi_q()
            )));
        };
        let amp = 1.0 / (nu as f64).sqrt();
        let mut isometry = CMatrix::zeros(big.n(), n);
        for col in 0..n {
            for r in 0..nu {
                let row = nu * col + kq as usize + r * nu * n;
                let ph = (small.chi_p_phase() * r as i64).to_complex();
                isometry[(row, col)] = ph * amp;
            }
        }
        Ok(NestedEmbedding { big, small, nu, isometry })
    }

    pub fn big(&self) -> &TorusSpace {
        &self.big
    }

    pub fn small(&self) -> &TorusSpace {
        &self.small
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    /// Columns are the embedded states `|q_n, N⟩`.
    pub fn isometry(&self) -> &CMatrix {
        &self.isometry
    }

    pub fn projector(&self) -> TorusOperator {
        TorusOperator::from_parts(self.big, &self.isometry * self.isometry.adjoint())
    }

    /// Compresses a big-torus operator onto the embedded unit torus.
    pub fn restrict(&self, op: &TorusOperator) -> Result<TorusOperator> {
        self.big.check_same(op.space())?;
        Ok(TorusOperator::from_parts(
            self.small,
            self.isometry.adjoint() * op.matrix() * &self.isometry,
        ))
    }

    /// Embeds a unit-torus operator as `E A E†`.
    pub fn lift(&self, op: &TorusOperator) -> Result<TorusOperator> {
        self.small.check_same(op.space())?;
        Ok(TorusOperator::from_parts(
            self.big,
            &self.isometry * op.matrix() * self.isometry.adjoint(),
        ))
    }

    /// Big-torus chord equal to the unit-torus chord `(r, s)`.
    pub fn lift_chord(&self, chord: ChordIndex) -> ChordIndex {
        let nu = self.nu as i64;
        ChordIndex::new(nu * chord.r, nu * chord.s)
    }
}

/// Rank-`N` projector onto the embedded unit-torus states.
pub fn nested_projector(big: TorusSpace, small: TorusSpace, nu: usize) -> Result<TorusOperator> {
    Ok(NestedEmbedding::new(big, small, nu)?.projector())
}
