//! Numerical self-checks. Each suite compares the library against an
//! independent route to the same quantity and reports the worst deviation.

use std::fmt;

use num_complex::Complex64;

use crate::dynamics::{
    cat_map_unitary, feline_conjugate, path_integral_qps, propagator_exact, propagator_trotter,
    short_time_symbol_qps, CatMapSpec,
};
use crate::error::{Error, Result};
use crate::lattice::{center_chord_turns, f_n, CenterIndex, ChordIndex, Phase, TorusSpace};
use crate::operators::{
    reflection, translation, translation_from_reflections, NestedEmbedding, TorusOperator,
};
use crate::products::{
    center_product, center_product_multi, center_product_odd_n, chord_product,
    chord_product_multi, qps_product_multi, trace_of_center_product, trace_of_chord_product,
};
use crate::projection::{quantize_hamiltonian, PeriodicPlaneSymbol};
use crate::random::{random_hermitian, random_operator, seeded};
use crate::symbols::{
    center_symbol, center_symbol_from_positions, center_to_chord, chord_symbol,
    chord_symbol_from_positions, chord_to_center, operator_from_center, operator_from_chord,
    operator_from_qps, position_matrix_from_center, position_matrix_from_chord, qps_symbol,
    recenter_odd_n,
};

/// Default tolerance for matrix and symbol comparisons.
pub const TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub error: f64,
    pub tol: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.error <= self.tol
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl Report {
    fn new(suite: impl Into<String>) -> Self {
        Report { suite: suite.into(), checks: vec![] }
    }

    fn record(&mut self, name: impl Into<String>, error: f64, tol: f64) {
        self.checks.push(Check { name: name.into(), error, tol });
    }

    fn flag(&mut self, name: impl Into<String>, ok: bool) {
        self.record(name, if ok { 0.0 } else { f64::INFINITY }, 0.0);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn set_tolerance(&mut self, tol: f64) {
        for c in &mut self.checks {
            c.tol = tol;
        }
    }

    pub fn merge(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            writeln!(f, "{status}  {:<9} {:<48} err {:.2e}  tol {:.0e}", self.suite, c.name, c.error, c.tol)?;
        }
        Ok(())
    }
}

/// Knobs shared by the randomized suites.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Options {
    pub seed: u64,
    pub samples: usize,
    pub budget: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options { seed: 0, samples: 20, budget: crate::products::DEFAULT_TERM_BUDGET }
    }
}

fn tag(space: &TorusSpace) -> String {
    format!("N={} chi=({}, {})", space.n(), space.chi_p(), space.chi_q())
}

fn chords(space: &TorusSpace) -> impl Iterator<Item = ChordIndex> {
    let n = space.n_i64();
    (0..n).flat_map(move |r| (0..n).map(move |s| ChordIndex::new(r, s)))
}

fn centers(space: &TorusSpace) -> impl Iterator<Item = CenterIndex> {
    let n = space.n_i64();
    (0..2 * n).flat_map(move |a| (0..2 * n).map(move |b| CenterIndex::new(a, b)))
}

/// Group relations of translations and reflections for all pairs.
pub fn cocycle(space: &TorusSpace) -> Report {
    let mut rep = Report::new("cocycle");
    let s = space;
    let id = TorusOperator::identity(*s);
    let ts: Vec<(ChordIndex, TorusOperator)> = chords(s).map(|c| (c, translation(s, c))).collect();
    let rs: Vec<(CenterIndex, TorusOperator)> = centers(s).map(|x| (x, reflection(s, x))).collect();
    let n = s.n() as i128;

    let (mut tt, mut inv) = (0.0f64, 0.0f64);
    for (c1, t1) in &ts {
        inv = inv
            .max((t1 * &translation(s, -*c1)).max_abs_diff(&id))
            .max(t1.adjoint().max_abs_diff(&translation(s, -*c1)));
        for (c2, t2) in &ts {
            let ph = Phase::from_ratio((c1.r * c2.s - c1.s * c2.r) as i128, 2 * n);
            let want = translation(s, *c1 + *c2).scale(ph.to_complex());
            tt = tt.max((t1 * t2).max_abs_diff(&want));
        }
    }
    rep.record(format!("TT product phase {}", tag(s)), tt, TOL);
    rep.record(format!("T inverse is T(-xi) and T^dagger {}", tag(s)), inv, TOL);

    let (mut rt, mut tr) = (0.0f64, 0.0f64);
    for (x, rx) in &rs {
        for (c, t) in &ts {
            let ph = (-center_chord_turns(s, *x, *c)).to_complex();
            let down = reflection(s, CenterIndex::new(x.a2 - c.r, x.b2 - c.s));
            let up = reflection(s, CenterIndex::new(x.a2 + c.r, x.b2 + c.s));
            rt = rt.max((rx * t).max_abs_diff(&down.scale(ph)));
            tr = tr.max((t * rx).max_abs_diff(&up.scale(ph)));
        }
    }
    rep.record(format!("RT shifts the center down {}", tag(s)), rt, TOL);
    rep.record(format!("TR shifts the center up {}", tag(s)), tr, TOL);

    let mut rr = 0.0f64;
    for (x1, r1) in &rs {
        for (x2, r2) in &rs {
            // N·2x1∧x2 = N x1∧(doubled label of x2 as a chord) + (a2_1 χ_q − b2_1 χ_p)/N
            let ph = center_chord_turns(s, *x1, ChordIndex::new(x2.a2, x2.b2))
                + (s.chi_q_phase() * x1.a2 - s.chi_p_phase() * x1.b2) / s.n_i64();
            let t = translation(s, ChordIndex::new(x1.a2 - x2.a2, x1.b2 - x2.b2));
            rr = rr.max((r1 * r2).max_abs_diff(&t.scale((-ph).to_complex())));
        }
    }
    rep.record(format!("RR is a translation {}", tag(s)), rr, TOL);
    rep
}

/// `Tr T_ξ` in closed form and `Tr R_x = f_N(x)`.
pub fn traces(space: &TorusSpace) -> Report {
    let mut rep = Report::new("traces");
    let s = space;
    let n = s.n_i64();
    let mut tt = 0.0f64;
    for r in -2 * n..2 * n {
        for q in -2 * n..2 * n {
            let got = translation(s, ChordIndex::new(r, q)).trace();
            let want = if r.rem_euclid(n) == 0 && q.rem_euclid(n) == 0 {
                let (j, k) = (r / n, q / n);
                let sign = if (j * k * n).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                let chi = s.chi_q_phase() * j - s.chi_p_phase() * k;
                chi.to_complex() * (sign * n as f64)
            } else {
                Complex64::from(0.0)
            };
            tt = tt.max((got - want).norm());
        }
    }
    rep.record(format!("Tr T closed form {}", tag(s)), tt, TOL);

    let (mut tr, mut range) = (0.0f64, true);
    for x in centers(s) {
        let f = f_n(s, x);
        range &= (-1..=2).contains(&f);
        tr = tr.max((reflection(s, x).trace() - Complex64::from(f as f64)).norm());
    }
    rep.record(format!("Tr R = f_N {}", tag(s)), tr, TOL);
    rep.flag(format!("f_N takes values in {{-1, 0, 1, 2}} {}", tag(s)), range);
    rep
}

/// Quasi-periodicity of translations and reflections under lattice shifts.
pub fn periodicity(space: &TorusSpace) -> Report {
    let mut rep = Report::new("period");
    let s = space;
    let n = s.n_i64();
    let parity = |e: i64| if e.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let (mut tsim, mut tdouble, mut rsim, mut rdouble) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for kp in -1..=1i64 {
        for kq in -1..=1i64 {
            let chi = s.chi_q_phase() * kp - s.chi_p_phase() * kq;
            for c in chords(s) {
                let t = translation(s, c);
                let shifted = translation(s, ChordIndex::new(c.r + kp * n, c.s + kq * n));
                let w = chi.to_complex() * parity(c.s * kp + c.r * kq + kp * kq * n);
                tsim = tsim.max(shifted.max_abs_diff(&t.scale(w)));
                // a double shift loses the sign but keeps twice the χ phase
                let twice = translation(s, ChordIndex::new(c.r + 2 * kp * n, c.s + 2 * kq * n));
                tdouble = tdouble.max(twice.max_abs_diff(&t.scale((chi * 2).to_complex())));
            }
            for x in centers(s) {
                let r = reflection(s, x);
                let shifted = reflection(s, CenterIndex::new(x.a2 + kp * n, x.b2 + kq * n));
                let w = parity(x.b2 * kp + x.a2 * kq + kp * kq * n);
                rsim = rsim.max(shifted.max_abs_diff(&r.scale(Complex64::from(w))));
                let twice = reflection(s, CenterIndex::new(x.a2 + 2 * kp * n, x.b2 + 2 * kq * n));
                rdouble = rdouble.max(twice.max_abs_diff(&r));
            }
        }
    }
    rep.record(format!("T(xi + kN) phase {}", tag(s)), tsim, TOL);
    rep.record(format!("T(xi + 2kN) drops the sign {}", tag(s)), tdouble, TOL);
    rep.record(format!("R(x + k/2) sign {}", tag(s)), rsim, TOL);
    rep.record(format!("R(x + k) is periodic {}", tag(s)), rdouble, TOL);
    rep
}

/// Round trips and alternative routes between operators and symbols.
pub fn symbols(space: &TorusSpace, opts: &Options) -> Result<Report> {
    let mut rep = Report::new("symbols");
    let s = space;
    let mut rng = seeded(opts.seed);
    let mut e = [0.0f64; 10];
    for _ in 0..opts.samples {
        let a = random_operator(s, &mut rng);
        let ch = chord_symbol(&a);
        let ce = center_symbol(&a);
        e[0] = e[0].max(operator_from_chord(&ch).max_abs_diff(&a));
        e[1] = e[1].max(operator_from_center(&ce).max_abs_diff(&a));
        e[2] = e[2].max(chord_symbol_from_positions(&a).max_abs_diff(&ch));
        e[3] = e[3].max(center_symbol_from_positions(&a).max_abs_diff(&ce));
        e[4] = e[4].max(position_matrix_from_chord(&ch).max_abs_diff(&a));
        e[5] = e[5].max(position_matrix_from_center(&ce).max_abs_diff(&a));
        e[6] = e[6].max(center_to_chord(&ce).max_abs_diff(&ch));
        e[7] = e[7].max(chord_to_center(&ch).max_abs_diff(&ce));
        e[8] = e[8].max((ch.trace() - a.trace()).norm().max((ce.trace() - a.trace()).norm()));
        let t = translation_from_reflections(s, ChordIndex::new(1, s.n_i64() - 1));
        e[9] = e[9].max(t.max_abs_diff(&translation(s, ChordIndex::new(1, s.n_i64() - 1))));
    }
    let names = [
        "chord symbol round trip",
        "center symbol round trip",
        "chord symbol from position elements",
        "center symbol from position elements",
        "position matrix from chord symbol",
        "position matrix from center symbol",
        "center to chord conversion",
        "chord to center conversion",
        "symbol traces",
        "translation from reflections",
    ];
    for (name, err) in names.iter().zip(e) {
        rep.record(format!("{name} {} x{}", tag(s), opts.samples), err, TOL);
    }
    Ok(rep)
}

/// Twisted products against operator products.
pub fn products(space: &TorusSpace, opts: &Options) -> Result<Report> {
    let mut rep = Report::new("products");
    let s = space;
    let nf = s.n() as f64;
    let mut rng = seeded(opts.seed);
    let samples = opts.samples.clamp(1, 5);
    let (mut ch, mut ce, mut tr) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..samples {
        let a = random_operator(s, &mut rng);
        let b = random_operator(s, &mut rng);
        let ab = &a * &b;
        ch = ch.max(chord_product(&chord_symbol(&a), &chord_symbol(&b))?.max_abs_diff(&chord_symbol(&ab)));
        ce = ce.max(center_product(&center_symbol(&a), &center_symbol(&b))?.max_abs_diff(&center_symbol(&ab)));
        tr = tr
            .max((trace_of_chord_product(&chord_symbol(&a), &chord_symbol(&b))? - ab.trace()).norm())
            .max((trace_of_center_product(&center_symbol(&a), &center_symbol(&b))? - ab.trace()).norm());
    }
    rep.record(format!("chord product {}", tag(s)), ch, TOL);
    rep.record(format!("center product {}", tag(s)), ce, TOL);
    rep.record(format!("trace of products {}", tag(s)), tr, TOL);

    let ops: Vec<TorusOperator> = (0..4).map(|_| random_operator(s, &mut rng)).collect();
    if nf.powi(6) <= opts.budget {
        let syms: Vec<_> = ops[..3].iter().map(chord_symbol).collect();
        let want = chord_symbol(&(&(&ops[0] * &ops[1]) * &ops[2]));
        let err = chord_product_multi(&syms, opts.budget)?.max_abs_diff(&want);
        rep.record(format!("3-fold chord product {}", tag(s)), err, TOL);
    }
    if nf.powi(10) <= opts.budget {
        let syms: Vec<_> = ops.iter().map(center_symbol).collect();
        let want = center_symbol(&(&(&(&ops[0] * &ops[1]) * &ops[2]) * &ops[3]));
        let err = center_product_multi(&syms, opts.budget)?.max_abs_diff(&want);
        rep.record(format!("4-fold center product {}", tag(s)), err, TOL);
    }
    if s.is_odd() {
        let (a, b) = (center_symbol(&ops[0]), center_symbol(&ops[1]));
        let general = recenter_odd_n(&center_product(&a, &b)?)?;
        let odd = center_product_odd_n(&recenter_odd_n(&a)?, &recenter_odd_n(&b)?)?;
        rep.record(format!("odd-N product after recentering {}", tag(s)), odd.max_abs_diff(&general), TOL);
    }
    Ok(rep)
}

/// Reflections through integer points for odd `N`; rejection for even `N`.
pub fn qps(space: &TorusSpace, opts: &Options) -> Result<Report> {
    let mut rep = Report::new("qps");
    let s = space;
    if !s.is_odd() {
        let a = TorusOperator::identity(*s);
        rep.flag(format!("even N is rejected {}", tag(s)), matches!(qps_symbol(&a), Err(Error::RequiresOddN(_))));
        return Ok(rep);
    }
    let n = s.n_i64();
    let mut tr = 0.0f64;
    for al in 0..n {
        for be in 0..n {
            tr = tr.max((reflection(s, CenterIndex::qps(al, be)).trace() - Complex64::from(1.0)).norm());
        }
    }
    rep.record(format!("Tr R_X = 1 {}", tag(s)), tr, TOL);
    let mut rng = seeded(opts.seed);
    let mut rec = 0.0f64;
    for _ in 0..opts.samples {
        let a = random_operator(s, &mut rng);
        rec = rec.max(operator_from_qps(&qps_symbol(&a)?).max_abs_diff(&a));
    }
    rep.record(format!("reconstruction from integer points {}", tag(s)), rec, TOL);
    Ok(rep)
}

/// Projector onto a small torus nested `nu`-fold in each direction.
pub fn nested(small: &TorusSpace, nu: usize) -> Result<Report> {
    let mut rep = Report::new("nested");
    let big_chi = |c: f64| (nu as f64 * c).fract();
    let big = TorusSpace::new(nu * nu * small.n(), big_chi(small.chi_p()), big_chi(small.chi_q()))?;
    let emb = NestedEmbedding::new(big, *small, nu)?;
    let p = emb.projector();
    let label = format!("{} nu={nu}", tag(small));
    rep.record(format!("projector idempotent {label}"), (&p * &p).max_abs_diff(&p), TOL);
    rep.record(format!("projector Hermitian {label}"), p.hermiticity_error(), TOL);
    rep.record(format!("projector trace N {label}"), (p.trace() - Complex64::from(small.n() as f64)).norm(), TOL);
    let (mut off, mut on) = (0.0f64, 0.0f64);
    let nu_i = nu as i64;
    for c in chords(&big) {
        let res = emb.restrict(&translation(&big, c))?;
        if c.r % nu_i != 0 || c.s % nu_i != 0 {
            off = off.max(res.matrix().iter().map(|z| z.norm()).fold(0.0, f64::max));
        } else {
            let small_c = ChordIndex::new(c.r / nu_i, c.s / nu_i);
            let want = translation(small, small_c);
            // commensurate translations restrict to small translations up to a phase
            let ph = (want.adjoint().matrix() * res.matrix()).trace() / small.n() as f64;
            on = on.max(res.max_abs_diff(&want.scale(ph))).max((ph.norm() - 1.0).abs());
        }
    }
    rep.record(format!("non-commensurate translations vanish {label}"), off, TOL);
    rep.record(format!("commensurate translations restrict {label}"), on, TOL);
    Ok(rep)
}

/// Covariance of integer-point symbols under a quantum cat map.
pub fn feline(space: &TorusSpace, spec: &CatMapSpec, opts: &Options) -> Result<Report> {
    space.require_odd()?;
    let mut rep = Report::new("feline");
    let s = space;
    let n = s.n_i64();
    let u = cat_map_unitary(s, spec)?;
    rep.record(format!("cat map unitary {}", tag(s)), u.unitarity_error(), TOL);
    let mut rng = seeded(opts.seed);
    let mut cov = 0.0f64;
    for _ in 0..opts.samples {
        let a = random_operator(s, &mut rng);
        let before = qps_symbol(&a)?;
        let after = qps_symbol(&feline_conjugate(&a, spec)?)?;
        for al in 0..n {
            for be in 0..n {
                let (ma, mb) = spec.apply(al, be, n);
                cov = cov.max((after.at(ma, mb) - before.at(al, be)).norm());
            }
        }
    }
    rep.record(format!("symbol covariance M={:?} {} x{}", spec.m(), tag(s), opts.samples), cov, TOL);
    Ok(rep)
}

/// Propagator group law and, on odd `N` with `χ = 0`, path sums for Harper's model.
pub fn dynamics(space: &TorusSpace, opts: &Options) -> Result<Report> {
    let mut rep = Report::new("dynamics");
    let s = space;
    let mut rng = seeded(opts.seed);
    let h = random_hermitian(s, &mut rng);
    let (t1, t2) = (0.21, -0.08);
    let u1 = propagator_exact(&h, t1)?;
    let u2 = propagator_exact(&h, t2)?;
    let u12 = propagator_exact(&h, t1 + t2)?;
    rep.record(format!("group law {}", tag(s)), (&u1 * &u2).max_abs_diff(&u12), TOL);
    rep.record(format!("propagator unitary {}", tag(s)), u1.unitarity_error(), TOL);
    let trotter = propagator_trotter(&h, t1, 4)?;
    rep.record(format!("Trotter steps compose {}", tag(s)), trotter.max_abs_diff(&u1), TOL);

    if s.is_odd() && s.has_zero_chi() {
        let t = 0.05;
        let harper = quantize_hamiltonian(s, &PeriodicPlaneSymbol::harper());
        let hq = qps_symbol(&harper)?;
        let slice = short_time_symbol_qps(&hq, t / 2.0);
        let two = qps_product_multi(&[slice.clone(), slice], opts.budget)?;
        let p1 = path_integral_qps(&hq, t, 1, opts.budget)?;
        rep.record(format!("one-step path is the 2-fold product {}", tag(s)), p1.max_abs_diff(&two), TOL);
        let exact = qps_symbol(&propagator_exact(&harper, t)?)?;
        let e1 = p1.max_abs_diff(&exact);
        let e2 = path_integral_qps(&hq, t, 2, opts.budget)?.max_abs_diff(&exact);
        rep.flag(format!("Harper path error falls, M=1 {e1:.3} to M=2 {e2:.3} {}", tag(s)), e2 < e1);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> Options {
        Options { samples: 3, ..Options::default() }
    }

    #[test]
    fn suites_pass_on_small_spaces() {
        for s in [TorusSpace::periodic(3).unwrap(), TorusSpace::new(4, 0.3, 0.7).unwrap()] {
            for rep in [
                cocycle(&s),
                traces(&s),
                periodicity(&s),
                symbols(&s, &quick()).unwrap(),
                products(&s, &quick()).unwrap(),
                qps(&s, &quick()).unwrap(),
            ] {
                assert!(rep.passed(), "{rep}");
            }
        }
    }

    #[test]
    fn feline_needs_odd_n() {
        let spec = CatMapSpec::from_cayley([[1, 0], [0, 1]]).unwrap();
        let s = TorusSpace::periodic(4).unwrap();
        assert!(matches!(feline(&s, &spec, &quick()), Err(Error::RequiresOddN(4))));
        let s = TorusSpace::periodic(3).unwrap();
        assert!(feline(&s, &spec, &quick()).unwrap().passed());
    }

    #[test]
    fn report_lines() {
        let mut rep = Report::new("demo");
        rep.record("fine", 1e-12, 1e-9);
        rep.record("broken", 1.0, 1e-9);
        assert!(!rep.passed());
        assert_eq!(rep.failures().count(), 1);
        let text = rep.to_string();
        assert!(text.starts_with("PASS  demo"));
        assert!(text.lines().nth(1).unwrap().starts_with("FAIL  demo"));
    }
}
