//! Time evolution: exact and Trotterized propagators, discrete path sums for
//! the propagator's center symbol, and quantum cat maps.

use nalgebra::DVector;
use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, Zero};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::lattice::{center_polygon_numerator, f_n_labels, CenterIndex, RootTable};
use crate::operators::{CMatrix, TorusOperator};
use crate::products::{center_product_multi, check_budget};
use crate::symbols::{operator_from_qps, CenterSymbol, QpsSymbol};

/// Sign of the exponent in the propagator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Propagation {
    /// `exp(+i t Ĥ/ħ)`, the convention used throughout this crate.
    #[default]
    Forward,
    /// `exp(−i t Ĥ/ħ)`.
    Schrodinger,
}

fn hermitian_part(h: &TorusOperator) -> Result<CMatrix> {
    let scale = h.matrix().iter().map(|z| z.norm()).fold(1.0, f64::max);
    let err = h.hermiticity_error();
    if err > 1e-10 * scale {
        return Err(Error::NotHermitian(err));
    }
    Ok((h.matrix() + h.matrix().adjoint()) * Complex64::from(0.5))
}

/// `exp(+i t 2πN Ĥ)` by eigendecomposition.
pub fn propagator_exact(h: &TorusOperator, t: f64) -> Result<TorusOperator> {
    propagator_exact_with(h, t, Propagation::Forward)
}

pub fn propagator_exact_with(h: &TorusOperator, t: f64, sign: Propagation) -> Result<TorusOperator> {
    let m = hermitian_part(h)?;
    let eig = m.symmetric_eigen();
    let n = h.space().n() as f64;
    let theta = match sign {
        Propagation::Forward => TAU * n * t,
        Propagation::Schrodinger => -TAU * n * t,
    };
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, theta * l)),
    );
    let v = &eig.eigenvectors;
    let u = v * CMatrix::from_diagonal(&phases) * v.adjoint();
    TorusOperator::new(*h.space(), u)
}

/// `(exp(i (t/M) 2πN Ĥ))^M`.
pub fn propagator_trotter(h: &TorusOperator, t: f64, steps: usize) -> Result<TorusOperator> {
    if steps == 0 {
        return Err(Error::Domain("Trotter step count must be at least 1".into()));
    }
    Ok(propagator_exact(h, t / steps as f64)?.pow(steps as u32))
}

/// Short-time center symbol `f_N(x) − 1 + exp(i2πN τ H(x))`. It reduces
/// to the identity symbol when `H = 0` and to `exp(i2πN τ H(X))` on the
/// integer points of odd `N`, where `f_N = 1`.
pub fn short_time_symbol(h: &CenterSymbol, tau: f64) -> CenterSymbol {
    let space = *h.space();
    let n = space.n_i64();
    let theta = TAU * space.n() as f64 * tau;
    let values = CMatrix::from_fn(space.n(), space.n(), |a, b| {
        let f = f_n_labels(n, a as i64, b as i64) as f64;
        Complex64::from(f - 1.0) + (Complex64::i() * theta * h.values()[(a, b)]).exp()
    });
    CenterSymbol::new(space, values).expect("block has the space dimension")
}

/// `exp(i2πN τ H(X))` on the integer points.
pub fn short_time_symbol_qps(h: &QpsSymbol, tau: f64) -> QpsSymbol {
    let space = *h.space();
    let theta = TAU * space.n() as f64 * tau;
    let values = h.values().map(|z| (Complex64::i() * theta * z).exp());
    QpsSymbol::new(space, values).expect("block has the space dimension")
}

/// Center symbol of the propagator from a `2M`-slice path sum: the
/// `2M`-fold center product of the short-time symbol at `τ = t/(2M)`.
/// Costs `N^{4M+2}` terms.
pub fn path_integral_center(
    h: &CenterSymbol,
    t: f64,
    steps: usize,
    budget: f64,
) -> Result<CenterSymbol> {
    if steps == 0 {
        return Err(Error::Domain("path sum needs at least one step".into()));
    }
    let nf = h.space().n() as f64;
    check_budget(nf.powi(4 * steps as i32 + 2), budget)?;
    let slice = short_time_symbol(h, t / (2 * steps) as f64);
    center_product_multi(&vec![slice; 2 * steps], budget)
}

/// Odd-`N` path sum on the integer points,
/// `U(X) = N^{−2M} Σ exp{i2πN [Δ_{2M+1}(X, X_1, …, X_2M) + (t/2M) Σ_i H(X_i)]}`.
pub fn path_integral_qps(h: &QpsSymbol, t: f64, steps: usize, budget: f64) -> Result<QpsSymbol> {
    let space = *h.space();
    space.require_odd()?;
    if steps == 0 {
        return Err(Error::Domain("path sum needs at least one step".into()));
    }
    let nf = space.n() as f64;
    let slices = 2 * steps;
    check_budget(nf.powi(2 * slices as i32 + 2), budget)?;
    let theta = TAU * nf * t / slices as f64;
    let roots = RootTable::new(2 * space.n());
    let points = space.n() * space.n();
    let values = CMatrix::from_fn(space.n(), space.n(), |alpha, beta| {
        let x = CenterIndex::qps(alpha as i64, beta as i64);
        let mut acc = Complex64::from(0.0);
        let mut centers = vec![x; slices];
        let mut idx = vec![0usize; slices];
        loop {
            let mut action = Complex64::from(0.0);
            for (j, &k) in idx.iter().enumerate() {
                let (al, be) = (k / space.n(), k % space.n());
                centers[j] = CenterIndex::qps(al as i64, be as i64);
                action += h.values()[(al, be)];
            }
            let area = roots.get(center_polygon_numerator(x, &centers));
            acc += area * (Complex64::i() * theta * action).exp();
            // odometer over the slice points, last slice fastest
            let mut j = slices;
            loop {
                if j == 0 {
                    return acc / nf.powi(slices as i32);
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < points {
                    break;
                }
                idx[j] = 0;
            }
        }
    });
    QpsSymbol::new(space, values)
}

type Mat2 = [[i64; 2]; 2];
type RMat2 = [[Ratio<i64>; 2]; 2];

fn rat(m: &Mat2) -> RMat2 {
    m.map(|row| row.map(Ratio::from_integer))
}

fn rmul(a: &RMat2, b: &RMat2) -> RMat2 {
    let mut c = [[Ratio::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn radd(a: &RMat2, b: &RMat2, sb: i64) -> RMat2 {
    let mut c = *a;
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][j] + b[i][j] * Ratio::from_integer(sb);
        }
    }
    c
}

fn rinv(a: &RMat2) -> Option<RMat2> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det.is_zero() {
        return None;
    }
    Some([[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]])
}

fn to_int(a: &RMat2) -> Option<Mat2> {
    let mut m = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            if !a[i][j].is_integer() {
                return None;
            }
            m[i][j] = a[i][j].to_integer();
        }
    }
    Some(m)
}

fn ident() -> RMat2 {
    [[Ratio::one(), Ratio::zero()], [Ratio::zero(), Ratio::one()]]
}

/// `J = [[0, −1], [1, 0]]`.
fn jmat() -> RMat2 {
    rat(&[[0, -1], [1, 0]])
}

/// Integer symplectic matrix `M` together with its integer Cayley matrix
/// `B`, related by `M = (1 − JB)(1 + JB)^{−1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CatMapSpec {
    m: Mat2,
    b: Mat2,
}

impl CatMapSpec {
    pub fn from_cayley(b: Mat2) -> Result<Self> {
        if b[0][1] != b[1][0] {
            return Err(Error::Domain("Cayley matrix must be symmetric".into()));
        }
        let jb = rmul(&jmat(), &rat(&b));
        let den = rinv(&radd(&ident(), &jb, 1))
            .ok_or_else(|| Error::Domain("1 + JB is singular (det B = −1)".into()))?;
        let m = rmul(&radd(&ident(), &jb, -1), &den);
        let m = to_int(&m).ok_or_else(|| {
            Error::Domain("Cayley matrix gives a non-integer symplectic matrix".into())
        })?;
        Ok(CatMapSpec { m, b })
    }

    /// Inverts the Cayley relation, `B = −J (M + 1)^{−1}(1 − M)`.
    pub fn from_matrix(m: Mat2) -> Result<Self> {
        if m[0][0] * m[1][1] - m[0][1] * m[1][0] != 1 {
            return Err(Error::Domain("cat map matrix must have determinant 1".into()));
        }
        let rm = rat(&m);
        let inv = rinv(&radd(&rm, &ident(), 1))
            .ok_or_else(|| Error::Domain("M + 1 is singular (trace −2)".into()))?;
        let b = rmul(&rmul(&jmat(), &inv), &radd(&ident(), &rm, -1));
        let b = b.map(|row| row.map(|x| -x));
        let b = to_int(&b).ok_or_else(|| {
            Error::Domain("non-integer Cayley matrix is not supported".into())
        })?;
        CatMapSpec::from_cayley(b)
    }

    pub fn m(&self) -> Mat2 {
        self.m
    }

    pub fn b(&self) -> Mat2 {
        self.b
    }

    /// The chord-side Cayley matrix `β`, with `M = (1 + Jβ)(1 − Jβ)^{−1}`.
    pub fn beta(&self) -> Mat2 {
        self.b.map(|row| row.map(|x| -x))
    }

    /// `M·(α, β)` reduced mod `n`.
    pub fn apply(&self, alpha: i64, beta: i64, n: i64) -> (i64, i64) {
        let m = self.m;
        (
            (m[0][0] * alpha + m[0][1] * beta).rem_euclid(n),
            (m[1][0] * alpha + m[1][1] * beta).rem_euclid(n),
        )
    }
}

fn require_cat_space(space: &crate::lattice::TorusSpace) -> Result<()> {
    space.require_odd()?;
    if !space.has_zero_chi() {
        return Err(Error::Domain("cat maps need periodic boundary conditions (chi = 0)".into()));
    }
    Ok(())
}

/// Quantum cat map built from its symbol `exp(i2π XBX·N)` on the integer
/// points, scaled so that `U U† = 1`.
pub fn cat_map_unitary(space: &crate::lattice::TorusSpace, spec: &CatMapSpec) -> Result<TorusOperator> {
    require_cat_space(space)?;
    let n = space.n_i64();
    let b = spec.b;
    let roots = RootTable::new(space.n());
    let values = CMatrix::from_fn(space.n(), space.n(), |al, be| {
        let (al, be) = (al as i64, be as i64);
        roots.get((al * al * b[0][0] + 2 * al * be * b[0][1] + be * be * b[1][1]).rem_euclid(n))
    });
    let u = operator_from_qps(&QpsSymbol::new(*space, values)?);
    let uu = u.matrix() * u.matrix().adjoint();
    let c = uu.trace().re / space.n() as f64;
    let dev = crate::operators::max_abs_diff(&uu, &(CMatrix::identity(space.n(), space.n()) * Complex64::from(c)));
    if c <= 0.0 || dev > 1e-9 * c {
        return Err(Error::Domain(format!("cat map operator is not proportional to a unitary (deviation {dev:e})")));
    }
    Ok(u.scale(Complex64::from(1.0 / c.sqrt())))
}

/// `U_M Â U_M^{−1}`.
pub fn feline_conjugate(a: &TorusOperator, spec: &CatMapSpec) -> Result<TorusOperator> {
    let u = cat_map_unitary(a.space(), spec)?;
    Ok(&(&u * a) * &u.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{ChordIndex, TorusSpace};
    use crate::operators::reflection;
    use crate::products::{qps_product_multi, DEFAULT_TERM_BUDGET};
    use crate::projection::{quantize_hamiltonian, PeriodicPlaneSymbol};
    use crate::random::{random_hermitian, random_operator, seeded};
    use crate::symbols::{center_symbol, chord_symbol, qps_symbol};

    const TOL: f64 = 1e-10;

    fn harper(n: usize) -> TorusOperator {
        quantize_hamiltonian(&TorusSpace::periodic(n).unwrap(), &PeriodicPlaneSymbol::harper())
    }

    #[test]
    fn group_law() {
        let s = TorusSpace::new(4, 0.3, 0.7).unwrap();
        let h = random_hermitian(&s, &mut seeded(20));
        let id = TorusOperator::identity(s);
        assert!(propagator_exact(&h, 0.0).unwrap().max_abs_diff(&id) < TOL);
        let (t1, t2) = (0.13, -0.41);
        let u1 = propagator_exact(&h, t1).unwrap();
        let u2 = propagator_exact(&h, t2).unwrap();
        let u12 = propagator_exact(&h, t1 + t2).unwrap();
        assert!((&u1 * &u2).max_abs_diff(&u12) < TOL);
        assert!(u1.is_unitary(TOL));
        let back = propagator_exact(&h, -t1).unwrap();
        assert!((&u1 * &back).max_abs_diff(&id) < TOL);
        let flipped = propagator_exact_with(&h, t1, Propagation::Schrodinger).unwrap();
        assert!(flipped.max_abs_diff(&back) < TOL);
    }

    #[test]
    fn scalar_generator() {
        let s = TorusSpace::periodic(3).unwrap();
        let t = 0.07;
        let u = propagator_exact(&TorusOperator::identity(s), t).unwrap();
        let want = Complex64::from_polar(1.0, TAU * 3.0 * t);
        assert!(u.max_abs_diff(&TorusOperator::identity(s).scale(want)) < TOL);
    }

    #[test]
    fn trotter_matches_exact() {
        let h = harper(5);
        let exact = propagator_exact(&h, 0.3).unwrap();
        assert!(propagator_trotter(&h, 0.3, 1).unwrap().max_abs_diff(&exact) < TOL);
        assert!(propagator_trotter(&h, 0.3, 16).unwrap().max_abs_diff(&exact) < TOL);
        assert!(propagator_trotter(&h, 0.3, 0).is_err());
    }

    #[test]
    fn rejects_non_hermitian() {
        let s = TorusSpace::periodic(3).unwrap();
        let a = random_operator(&s, &mut seeded(21));
        assert!(matches!(propagator_exact(&a, 0.1), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn zero_hamiltonian_paths() {
        let s = TorusSpace::periodic(4).unwrap();
        let zero = CenterSymbol::zeros(s);
        let u = path_integral_center(&zero, 0.3, 1, DEFAULT_TERM_BUDGET).unwrap();
        assert!(u.max_abs_diff(&CenterSymbol::identity(s)) < TOL);
        let s3 = TorusSpace::periodic(3).unwrap();
        let q = path_integral_qps(&QpsSymbol::zeros(s3), 0.3, 2, DEFAULT_TERM_BUDGET).unwrap();
        assert!(q.max_abs_diff(&QpsSymbol::identity(s3).unwrap()) < TOL);
    }

    #[test]
    fn one_step_path_is_two_fold_product() {
        let h = harper(3);
        let hq = qps_symbol(&h).unwrap();
        let tau = 0.05 / 2.0;
        let slice = short_time_symbol_qps(&hq, tau);
        let prod = qps_product_multi(&[slice.clone(), slice], DEFAULT_TERM_BUDGET).unwrap();
        let path = path_integral_qps(&hq, 0.05, 1, DEFAULT_TERM_BUDGET).unwrap();
        assert!(path.max_abs_diff(&prod) < TOL);
    }

    #[test]
    fn general_path_converges_for_even_n() {
        let h = harper(4);
        let exact = center_symbol(&propagator_exact(&h, 0.05).unwrap());
        let hc = center_symbol(&h);
        let err = |m| {
            path_integral_center(&hc, 0.05, m, DEFAULT_TERM_BUDGET).unwrap().max_abs_diff(&exact)
        };
        let (e1, e2) = (err(1), err(2));
        assert!(e2 < e1, "{e1} {e2}");
    }

    #[test]
    fn path_error_decreases_with_steps() {
        let h = harper(3);
        let exact = qps_symbol(&propagator_exact(&h, 0.05).unwrap()).unwrap();
        let hq = qps_symbol(&h).unwrap();
        let e1 = path_integral_qps(&hq, 0.05, 1, DEFAULT_TERM_BUDGET).unwrap().max_abs_diff(&exact);
        let e2 = path_integral_qps(&hq, 0.05, 2, DEFAULT_TERM_BUDGET).unwrap().max_abs_diff(&exact);
        assert!(e2 < e1, "{e1} {e2}");
        assert!((e1 - 0.626).abs() < 0.01 && (e2 - 0.361).abs() < 0.01, "{e1} {e2}");
    }

    #[test]
    fn path_budget_guard() {
        let s = TorusSpace::periodic(3).unwrap();
        let h = CenterSymbol::zeros(s);
        assert!(matches!(path_integral_center(&h, 0.1, 3, 1e6), Err(Error::Budget { .. })));
        let even = QpsSymbol::zeros(TorusSpace::periodic(4).unwrap());
        assert!(matches!(path_integral_qps(&even, 0.1, 1, 1e8), Err(Error::RequiresOddN(4))));
    }

    #[test]
    fn cayley_examples() {
        assert_eq!(CatMapSpec::from_cayley([[1, 0], [0, 1]]).unwrap().m(), [[0, 1], [-1, 0]]);
        assert_eq!(CatMapSpec::from_cayley([[1, 0], [0, 0]]).unwrap().m(), [[1, 0], [-2, 1]]);
        assert_eq!(CatMapSpec::from_cayley([[1, 1], [1, 2]]).unwrap().m(), [[1, 2], [-1, -1]]);
        let spec = CatMapSpec::from_matrix([[1, 2], [-1, -1]]).unwrap();
        assert_eq!(spec.b(), [[1, 1], [1, 2]]);
        assert_eq!(CatMapSpec::from_cayley([[1, 0], [0, 1]]).unwrap().beta(), [[-1, 0], [0, -1]]);
        assert!(CatMapSpec::from_cayley([[1, 2], [0, 1]]).is_err());
        assert!(CatMapSpec::from_matrix([[2, 1], [1, 1]]).is_err());
        assert!(CatMapSpec::from_matrix([[1, 1], [0, 2]]).is_err());
    }

    #[test]
    fn cat_maps_are_unitary() {
        for b in [[[1, 0], [0, 1]], [[1, 1], [1, 2]], [[1, 1], [1, -1]], [[2, 2], [2, 2]], [[1, 0], [0, 0]]] {
            let spec = CatMapSpec::from_cayley(b).unwrap();
            for n in [3, 5, 7] {
                let u = cat_map_unitary(&TorusSpace::periodic(n).unwrap(), &spec).unwrap();
                assert!(u.is_unitary(TOL));
            }
        }
        let spec = CatMapSpec::from_cayley([[1, 0], [0, 1]]).unwrap();
        assert!(cat_map_unitary(&TorusSpace::periodic(4).unwrap(), &spec).is_err());
        assert!(cat_map_unitary(&TorusSpace::new(3, 0.5, 0.0).unwrap(), &spec).is_err());
    }

    #[test]
    fn feline_covariance() {
        let mut rng = seeded(22);
        for b in [[[1, 0], [0, 1]], [[1, 1], [1, 2]]] {
            let spec = CatMapSpec::from_cayley(b).unwrap();
            for n in [3usize, 5, 7] {
                let s = TorusSpace::periodic(n).unwrap();
                let a = random_operator(&s, &mut rng);
                let before = qps_symbol(&a).unwrap();
                let after = qps_symbol(&feline_conjugate(&a, &spec).unwrap()).unwrap();
                for al in 0..n as i64 {
                    for be in 0..n as i64 {
                        let (ma, mb) = spec.apply(al, be, n as i64);
                        assert!((after.at(ma, mb) - before.at(al, be)).norm() < TOL);
                    }
                }
            }
        }
    }

    #[test]
    fn conjugated_reflection() {
        let spec = CatMapSpec::from_cayley([[1, 0], [0, 1]]).unwrap();
        let s = TorusSpace::periodic(3).unwrap();
        let x0 = CenterIndex::qps(1, 2);
        let conj = feline_conjugate(&reflection(&s, x0), &spec).unwrap();
        let (ma, mb) = spec.apply(1, 2, 3);
        let target = reflection(&s, CenterIndex::qps(ma, mb));
        let c = (conj.matrix() * target.matrix().adjoint()).trace() / 3.0;
        assert!((c.norm() - 1.0).abs() < TOL);
        assert!(conj.max_abs_diff(&target.scale(c)) < TOL);
        let id = TorusOperator::identity(s);
        assert!(feline_conjugate(&id, &spec).unwrap().max_abs_diff(&id) < TOL);
    }

    #[test]
    fn cat_chord_symbol_is_quadratic_form() {
        for n in [3usize, 5, 7] {
            let spec = CatMapSpec::from_cayley([[1, 0], [0, 1]]).unwrap();
            let s = TorusSpace::periodic(n).unwrap();
            let ch = chord_symbol(&cat_map_unitary(&s, &spec).unwrap());
            let beta = spec.beta();
            let mut c0 = None;
            for r in 0..n as i64 {
                for q in 0..n as i64 {
                    let form = r * r * beta[0][0] + 2 * r * q * beta[0][1] + q * q * beta[1][1];
                    let want = Complex64::from_polar(1.0, TAU * form as f64 / n as f64);
                    let ratio = ch.at(ChordIndex::new(2 * r, 2 * q)) / want;
                    let c = *c0.get_or_insert(ratio);
                    assert!((ratio - c).norm() < TOL);
                }
            }
        }
    }
}
