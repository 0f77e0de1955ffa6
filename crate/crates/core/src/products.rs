//! Product rules: symbols of operator products computed from the symbols of
//! the factors.
//!
//! Symbol lists are read left to right as operator products, so
//! `[A, B, C]` stands for `Â·B̂·Ĉ`. Every term's phase is an integer over
//! `2N`, assembled exactly and looked up in a table of roots of unity.
//! Summation runs row-major over the lattice labels.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{
    center_polygon_corner, center_polygon_numerator, chord_polygon_numerator, f_n_labels,
    CenterIndex, ChordIndex, RootTable, TorusSpace,
};
use crate::operators::CMatrix;
use crate::symbols::{extend_chord, CenterSymbol, ChordSymbol, QpsSymbol};

/// Default cap on the number of summed terms for one product evaluation.
pub const DEFAULT_TERM_BUDGET: f64 = 1e8;

/// Fails when `terms` exceeds `budget`.
pub fn check_budget(terms: f64, budget: f64) -> Result<()> {
    if terms > budget {
        Err(Error::Budget { terms, budget })
    } else {
        Ok(())
    }
}

fn same_space<'a, I: IntoIterator<Item = &'a TorusSpace>>(spaces: I) -> Result<TorusSpace> {
    let mut it = spaces.into_iter();
    let first = *it.next().ok_or_else(|| Error::Domain("empty symbol list".into()))?;
    for s in it {
        first.check_same(s)?;
    }
    Ok(first)
}

/// Calls `f` on every tuple in `[0, n)^len`, last entry fastest.
fn for_each_tuple(n: i64, len: usize, mut f: impl FnMut(&[i64])) {
    let mut t = vec![0i64; len];
    loop {
        f(&t);
        let mut k = len;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            t[k] += 1;
            if t[k] < n {
                break;
            }
            t[k] = 0;
        }
    }
}

/// Chord symbol of `Â·B̂`:
/// `AB(ξ) = (1/N) Σ_{ξ1} A(ξ1) B(ξ−ξ1) exp(iπN ξ1∧ξ)`.
pub fn chord_product(a: &ChordSymbol, b: &ChordSymbol) -> Result<ChordSymbol> {
    let space = same_space([a.space(), b.space()])?;
    let n = space.n_i64();
    let roots = RootTable::new(2 * space.n());
    let values = CMatrix::from_fn(space.n(), space.n(), |r, s| {
        let (r, s) = (r as i64, s as i64);
        let mut acc = Complex64::from(0.0);
        for r1 in 0..n {
            for s1 in 0..n {
                let av = a.values()[(r1 as usize, s1 as usize)];
                let bv = extend_chord(b, r - r1, s - s1);
                acc += av * bv * roots.get(r1 * s - s1 * r);
            }
        }
        acc / n as f64
    });
    ChordSymbol::new(space, values)
}

/// Chord symbol of `Â1···Ân` as one `(n−1)`-fold sum with the polygon
/// phase `D_{n+1}`.
pub fn chord_product_multi(symbols: &[ChordSymbol], budget: f64) -> Result<ChordSymbol> {
    let space = same_space(symbols.iter().map(|s| s.space()))?;
    let k = symbols.len();
    if k == 1 {
        return Ok(symbols[0].clone());
    }
    let n = space.n_i64();
    let nf = space.n() as f64;
    check_budget(nf.powi(2 * k as i32), budget)?;
    let roots = RootTable::new(2 * space.n());
    let norm = nf.powi(k as i32 - 1);
    let last = &symbols[k - 1];
    let values = CMatrix::from_fn(space.n(), space.n(), |r, s| {
        let mut acc = Complex64::from(0.0);
        let mut chords = vec![ChordIndex::new(0, 0); k];
        for_each_tuple(n, 2 * (k - 1), |t| {
            let mut w = Complex64::from(1.0);
            let mut rest = ChordIndex::new(r as i64, s as i64);
            for i in 0..k - 1 {
                let c = ChordIndex::new(t[2 * i], t[2 * i + 1]);
                w *= symbols[i].values()[(c.r as usize, c.s as usize)];
                chords[i] = c;
                rest = rest - c;
            }
            if w == Complex64::from(0.0) {
                return;
            }
            chords[k - 1] = rest;
            w *= extend_chord(last, rest.r, rest.s);
            acc += w * roots.get(chord_polygon_numerator(&chords));
        });
        acc / norm
    });
    ChordSymbol::new(space, values)
}

/// Center symbol of `Â·B̂`:
/// `AB(x) = (1/N²) Σ_{x1,x2} A(x2) B(x1) exp(i2πN Δ3(x,x1,x2)) f_N(x + x2 − x1)`,
/// both sums over the quarter torus.
pub fn center_product(a: &CenterSymbol, b: &CenterSymbol) -> Result<CenterSymbol> {
    center_product_multi(&[a.clone(), b.clone()], DEFAULT_TERM_BUDGET)
}

/// Center symbol of `Â1···Âk`. Odd `k` is padded on the right with the
/// identity, whose symbol is `f_N`.
pub fn center_product_multi(symbols: &[CenterSymbol], budget: f64) -> Result<CenterSymbol> {
    let space = same_space(symbols.iter().map(|s| s.space()))?;
    let mut list: Vec<&CenterSymbol> = symbols.iter().collect();
    let pad = CenterSymbol::identity(space);
    if list.len() == 1 {
        return Ok(symbols[0].clone());
    }
    if list.len() % 2 == 1 {
        list.push(&pad);
    }
    let count = list.len();
    let n = space.n_i64();
    let nf = space.n() as f64;
    check_budget(nf.powi(2 * count as i32 + 2), budget)?;
    let roots = RootTable::new(2 * space.n());
    let norm = nf.powi(count as i32);
    let values = CMatrix::from_fn(space.n(), space.n(), |a2, b2| {
        let x = CenterIndex::new(a2 as i64, b2 as i64);
        let mut acc = Complex64::from(0.0);
        let mut centers = vec![x; count];
        for_each_tuple(n, 2 * count, |t| {
            // centers[j] is x_{j+1}; the operator in that slot is list[count-1-j]
            let mut w = Complex64::from(1.0);
            for j in 0..count {
                let c = CenterIndex::new(t[2 * j], t[2 * j + 1]);
                w *= list[count - 1 - j].values()[(c.a2 as usize, c.b2 as usize)];
                centers[j] = c;
            }
            if w == Complex64::from(0.0) {
                return;
            }
            let corner = center_polygon_corner(x, &centers);
            let f = f_n_labels(n, corner.a2, corner.b2);
            if f != 0 {
                acc += w * roots.get(center_polygon_numerator(x, &centers)) * f as f64;
            }
        });
        acc / norm
    });
    CenterSymbol::new(space, values)
}

/// Odd-`N` product on the integer points, with no `f_N` factor:
/// `AB(X) = (1/N²) Σ_{X1,X2} A(X2) B(X1) exp(i2πN Δ3(X,X1,X2))`.
pub fn center_product_odd_n(a: &QpsSymbol, b: &QpsSymbol) -> Result<QpsSymbol> {
    qps_product_multi(&[a.clone(), b.clone()], DEFAULT_TERM_BUDGET)
}

/// Odd-`N` product of `k` symbols on the integer points. Odd `k` is padded
/// with the identity, constant 1.
pub fn qps_product_multi(symbols: &[QpsSymbol], budget: f64) -> Result<QpsSymbol> {
    let space = same_space(symbols.iter().map(|s| s.space()))?;
    space.require_odd()?;
    if symbols.len() == 1 {
        return Ok(symbols[0].clone());
    }
    let mut list: Vec<&QpsSymbol> = symbols.iter().collect();
    let pad = QpsSymbol::identity(space)?;
    if list.len() % 2 == 1 {
        list.push(&pad);
    }
    let count = list.len();
    let n = space.n_i64();
    let nf = space.n() as f64;
    check_budget(nf.powi(2 * count as i32 + 2), budget)?;
    let roots = RootTable::new(2 * space.n());
    let norm = nf.powi(count as i32);
    let values = CMatrix::from_fn(space.n(), space.n(), |alpha, beta| {
        let x = CenterIndex::qps(alpha as i64, beta as i64);
        let mut acc = Complex64::from(0.0);
        let mut centers = vec![x; count];
        for_each_tuple(n, 2 * count, |t| {
            let mut w = Complex64::from(1.0);
            for j in 0..count {
                w *= list[count - 1 - j].values()[(t[2 * j] as usize, t[2 * j + 1] as usize)];
                centers[j] = CenterIndex::qps(t[2 * j], t[2 * j + 1]);
            }
            acc += w * roots.get(center_polygon_numerator(x, &centers));
        });
        acc / norm
    });
    QpsSymbol::new(space, values)
}

/// `Tr(ÂB̂) = (1/N) Σ_ξ A(ξ) B(−ξ)`.
pub fn trace_of_chord_product(a: &ChordSymbol, b: &ChordSymbol) -> Result<Complex64> {
    let space = same_space([a.space(), b.space()])?;
    let n = space.n_i64();
    let mut acc = Complex64::from(0.0);
    for r in 0..n {
        for s in 0..n {
            acc += a.values()[(r as usize, s as usize)] * extend_chord(b, -r, -s);
        }
    }
    Ok(acc / n as f64)
}

/// `Tr(ÂB̂) = (1/N) Σ_quarter A(x) B(x)`.
pub fn trace_of_center_product(a: &CenterSymbol, b: &CenterSymbol) -> Result<Complex64> {
    let space = same_space([a.space(), b.space()])?;
    let acc: Complex64 = a.values().iter().zip(b.values().iter()).map(|(x, y)| x * y).sum();
    Ok(acc / space.n() as f64)
}
