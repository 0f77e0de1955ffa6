//! File formats.
//!
//! * Operators and symbols as JSON:
//!   `{"n": N, "chi": [χ_p, χ_q], "re": [[...]], "im": [[...]]}`, row-major,
//!   with an extra `"kind"` field on symbols.
//! * Symbols as CSV: a `kind,n,chi_p,chi_q` header and its values, then
//!   an `i,j,re,im` header and one row per entry, 17 significant digits.
//! * Hamiltonians: `{"terms": [{"r": int, "s": int, "re": float, "im": float}]}`.
//! * Cat maps: `{"b": [[..], [..]]}` or `{"m": [[..], [..]]}`.
//! * Evolution jobs: `{"hamiltonian": path, "t": float, "m_steps": int, "mode": ..}`.
//! * Binary PGM (P5) images with a JSON sidecar.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::CatMapSpec;
use crate::error::{Error, Result};
use crate::lattice::TorusSpace;
use crate::operators::{CMatrix, TorusOperator, TorusState};
use crate::projection::PeriodicPlaneSymbol;
use crate::symbols::{CenterSymbol, ChordSymbol, QpsSymbol};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct MatrixFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kind: Option<String>,
    n: usize,
    chi: [f64; 2],
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl MatrixFile {
    fn from_matrix(kind: Option<&str>, space: &TorusSpace, m: &CMatrix) -> Self {
        let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
        };
        MatrixFile {
            kind: kind.map(str::to_owned),
            n: space.n(),
            chi: [space.chi_p(), space.chi_q()],
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    /// With `extended`, a `2N × 2N` grid is also accepted and cut down to
    /// its fundamental block.
    fn into_parts(self, extended: bool) -> Result<(Option<String>, TorusSpace, CMatrix)> {
        let space = TorusSpace::new(self.n, self.chi[0], self.chi[1])?;
        let n = self.n;
        let size = if extended && self.re.len() == 2 * n { 2 * n } else { n };
        for part in [&self.re, &self.im] {
            if part.len() != size {
                return Err(Error::Dimension { expected: n, found: part.len() });
            }
            if let Some(row) = part.iter().find(|r| r.len() != size) {
                return Err(Error::Dimension { expected: n, found: row.len() });
            }
        }
        let m = CMatrix::from_fn(n, n, |i, j| Complex64::new(self.re[i][j], self.im[i][j]));
        Ok((self.kind, space, m))
    }
}

pub fn operator_to_json(op: &TorusOperator) -> Result<String> {
    Ok(serde_json::to_string_pretty(&MatrixFile::from_matrix(None, op.space(), op.matrix()))?)
}

pub fn operator_from_json(text: &str) -> Result<TorusOperator> {
    let file: MatrixFile = serde_json::from_str(text)?;
    let (_, space, m) = file.into_parts(false)?;
    TorusOperator::new(space, m)
}

/// Which symbol a file holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    Chord,
    Center,
    CenterQps,
}

impl SymbolKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SymbolKind::Chord => "chord",
            SymbolKind::Center => "center",
            SymbolKind::CenterQps => "center_qps",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "chord" => Ok(SymbolKind::Chord),
            "center" => Ok(SymbolKind::Center),
            "center_qps" => Ok(SymbolKind::CenterQps),
            other => Err(Error::Parse(format!("unknown symbol kind {other:?}"))),
        }
    }
}

/// Any of the three symbol types.
#[derive(Clone, Debug, PartialEq)]
pub enum AnySymbol {
    Chord(ChordSymbol),
    Center(CenterSymbol),
    CenterQps(QpsSymbol),
}

impl AnySymbol {
    pub fn kind(&self) -> SymbolKind {
        match self {
            AnySymbol::Chord(_) => SymbolKind::Chord,
            AnySymbol::Center(_) => SymbolKind::Center,
            AnySymbol::CenterQps(_) => SymbolKind::CenterQps,
        }
    }

    pub fn space(&self) -> &TorusSpace {
        match self {
            AnySymbol::Chord(s) => s.space(),
            AnySymbol::Center(s) => s.space(),
            AnySymbol::CenterQps(s) => s.space(),
        }
    }

    pub fn values(&self) -> &CMatrix {
        match self {
            AnySymbol::Chord(s) => s.values(),
            AnySymbol::Center(s) => s.values(),
            AnySymbol::CenterQps(s) => s.values(),
        }
    }

    fn build(kind: SymbolKind, space: TorusSpace, values: CMatrix) -> Result<Self> {
        Ok(match kind {
            SymbolKind::Chord => AnySymbol::Chord(ChordSymbol::new(space, values)?),
            SymbolKind::Center => AnySymbol::Center(CenterSymbol::new(space, values)?),
            SymbolKind::CenterQps => {
                space.require_odd()?;
                AnySymbol::CenterQps(QpsSymbol::new(space, values)?)
            }
        })
    }
}

pub fn symbol_to_json(sym: &AnySymbol) -> Result<String> {
    grid_to_json(sym.kind(), sym.space(), sym.values())
}

/// JSON for the fundamental block or the extended `2N × 2N` grid.
pub fn grid_to_json(kind: SymbolKind, space: &TorusSpace, values: &CMatrix) -> Result<String> {
    let file = MatrixFile::from_matrix(Some(kind.as_str()), space, values);
    Ok(serde_json::to_string_pretty(&file)?)
}

/// Reads a symbol from JSON or CSV, telling them apart by the first character.
pub fn symbol_from_text(text: &str) -> Result<AnySymbol> {
    if text.trim_start().starts_with('{') {
        symbol_from_json(text)
    } else {
        symbol_from_csv(text)
    }
}

pub fn symbol_from_json(text: &str) -> Result<AnySymbol> {
    let file: MatrixFile = serde_json::from_str(text)?;
    let (kind, space, m) = file.into_parts(true)?;
    let kind = kind.ok_or_else(|| Error::Parse("symbol JSON needs a \"kind\" field".into()))?;
    AnySymbol::build(SymbolKind::parse(&kind)?, space, m)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV for an arbitrary rectangular grid of values labelled by `kind`.
pub fn grid_to_csv(kind: SymbolKind, space: &TorusSpace, values: &CMatrix) -> String {
    let mut out = String::new();
    out.push_str("kind,n,chi_p,chi_q\n");
    let _ = writeln!(out, "{},{},{},{}", kind.as_str(), space.n(), num(space.chi_p()), num(space.chi_q()));
    out.push_str("i,j,re,im\n");
    for i in 0..values.nrows() {
        for j in 0..values.ncols() {
            let z = values[(i, j)];
            let _ = writeln!(out, "{i},{j},{},{}", num(z.re), num(z.im));
        }
    }
    out
}

pub fn symbol_to_csv(sym: &AnySymbol) -> String {
    grid_to_csv(sym.kind(), sym.space(), sym.values())
}

fn parse_field<T: std::str::FromStr>(s: &str, what: &str, line: usize) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: bad {what} {s:?}")))
}

/// Reads a symbol CSV. Rows outside the fundamental block (as in an
/// extended grid) are ignored; every fundamental entry must be present.
pub fn symbol_from_csv(text: &str) -> Result<AnySymbol> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let mut next = |what: &str| {
        lines.next().ok_or_else(|| Error::Parse(format!("missing {what}")))
    };
    let (_, header) = next("header")?;
    if header.trim() != "kind,n,chi_p,chi_q" {
        return Err(Error::Parse(format!("expected header kind,n,chi_p,chi_q, got {header:?}")));
    }
    let (ln, meta) = next("metadata row")?;
    let f: Vec<&str> = meta.split(',').collect();
    if f.len() != 4 {
        return Err(Error::Parse(format!("line {}: expected 4 fields", ln + 1)));
    }
    let kind = SymbolKind::parse(f[0].trim())?;
    let n: usize = parse_field(f[1], "n", ln + 1)?;
    let space = TorusSpace::new(n, parse_field(f[2], "chi_p", ln + 1)?, parse_field(f[3], "chi_q", ln + 1)?)?;
    let (_, cols) = next("column header")?;
    if cols.trim() != "i,j,re,im" {
        return Err(Error::Parse(format!("expected header i,j,re,im, got {cols:?}")));
    }
    let mut values = CMatrix::zeros(n, n);
    let mut seen = vec![false; n * n];
    for (ln, row) in lines {
        let f: Vec<&str> = row.split(',').collect();
        if f.len() != 4 {
            return Err(Error::Parse(format!("line {}: expected 4 fields", ln + 1)));
        }
        let i: usize = parse_field(f[0], "row index", ln + 1)?;
        let j: usize = parse_field(f[1], "column index", ln + 1)?;
        let z = Complex64::new(parse_field(f[2], "re", ln + 1)?, parse_field(f[3], "im", ln + 1)?);
        if i < n && j < n {
            values[(i, j)] = z;
            seen[i * n + j] = true;
        }
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        return Err(Error::Parse(format!("missing entry ({}, {})", k / n, k % n)));
    }
    AnySymbol::build(kind, space, values)
}

#[derive(Deserialize, Serialize)]
struct StateFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    chi: Option<[f64; 2]>,
    re: Vec<f64>,
    #[serde(default)]
    im: Vec<f64>,
}

/// Reads `{"re": [...], "im": [...]}`; `im` may be omitted. Optional `n`
/// and `chi` fields must agree with `space`.
pub fn state_from_json(text: &str, space: &TorusSpace) -> Result<TorusState> {
    let f: StateFile = serde_json::from_str(text)?;
    if let Some(n) = f.n {
        if n != space.n() {
            return Err(Error::Dimension { expected: space.n(), found: n });
        }
    }
    if let Some([p, q]) = f.chi {
        if p != space.chi_p() || q != space.chi_q() {
            return Err(Error::SpaceMismatch(format!("state chi ({p}, {q}) differs from the space")));
        }
    }
    let im = if f.im.is_empty() { vec![0.0; f.re.len()] } else { f.im };
    if im.len() != f.re.len() {
        return Err(Error::Parse("re and im have different lengths".into()));
    }
    let amps = f.re.iter().zip(&im).map(|(&r, &i)| Complex64::new(r, i)).collect();
    TorusState::new(*space, amps)
}

pub fn state_to_json(state: &TorusState) -> Result<String> {
    let s = state.space();
    let f = StateFile {
        n: Some(s.n()),
        chi: Some([s.chi_p(), s.chi_q()]),
        re: state.amplitudes().iter().map(|z| z.re).collect(),
        im: state.amplitudes().iter().map(|z| z.im).collect(),
    };
    Ok(serde_json::to_string_pretty(&f)?)
}

#[derive(Deserialize, Serialize)]
struct Term {
    r: i64,
    s: i64,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Deserialize, Serialize)]
struct HamiltonianFile {
    terms: Vec<Term>,
}

pub fn hamiltonian_from_json(text: &str) -> Result<PeriodicPlaneSymbol> {
    let f: HamiltonianFile = serde_json::from_str(text)?;
    Ok(PeriodicPlaneSymbol::from_terms(
        f.terms.into_iter().map(|t| (t.r, t.s, Complex64::new(t.re, t.im))),
    ))
}

pub fn hamiltonian_to_json(h: &PeriodicPlaneSymbol) -> Result<String> {
    let terms = h.terms().map(|(r, s, c)| Term { r, s, re: c.re, im: c.im }).collect();
    Ok(serde_json::to_string_pretty(&HamiltonianFile { terms })?)
}

fn int_matrix(v: &Value, name: &str) -> Result<[[i64; 2]; 2]> {
    let bad = || Error::Parse(format!("\"{name}\" must be a 2x2 array of integers"));
    let rows = v.as_array().filter(|r| r.len() == 2).ok_or_else(bad)?;
    let mut m = [[0i64; 2]; 2];
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().filter(|r| r.len() == 2).ok_or_else(bad)?;
        for (j, x) in row.iter().enumerate() {
            m[i][j] = match x.as_i64() {
                Some(k) => k,
                None => match x.as_f64() {
                    Some(f) if f.fract() == 0.0 && f.abs() < 9e15 => f as i64,
                    _ => return Err(bad()),
                },
            };
        }
    }
    Ok(m)
}

/// Reads `{"b": ...}` or `{"m": ...}` (exactly one of them).
pub fn cat_map_from_json(text: &str) -> Result<CatMapSpec> {
    let v: Value = serde_json::from_str(text)?;
    match (v.get("b"), v.get("m")) {
        (Some(b), None) => CatMapSpec::from_cayley(int_matrix(b, "b")?),
        (None, Some(m)) => CatMapSpec::from_matrix(int_matrix(m, "m")?),
        _ => Err(Error::Parse("cat map JSON needs exactly one of \"b\" or \"m\"".into())),
    }
}

/// How an evolution job computes the propagator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EvolveMode {
    Exact,
    Trotter,
    Path,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
pub struct EvolutionJob {
    pub hamiltonian: PathBuf,
    pub t: f64,
    #[serde(default = "one")]
    pub m_steps: usize,
    pub mode: EvolveMode,
}

fn one() -> usize {
    1
}

impl EvolutionJob {
    /// Parses a job; a relative Hamiltonian path is taken relative to `base`.
    pub fn from_json(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut job: EvolutionJob = serde_json::from_str(text)?;
        if let Some(base) = base {
            if job.hamiltonian.is_relative() {
                job.hamiltonian = base.join(&job.hamiltonian);
            }
        }
        Ok(job)
    }
}

/// Summary written next to a PGM image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PgmSidecar {
    pub width: usize,
    pub height: usize,
    pub component: String,
    pub min: f64,
    pub max: f64,
    pub normalization: f64,
}

/// Binary P5 graymap of `values` (row `i` of the matrix is image row `i`),
/// mapped linearly from `[min, max]` to `[0, 255]`.
pub fn to_pgm(values: &nalgebra::DMatrix<f64>) -> (Vec<u8>, f64, f64) {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = format!("P5\n{} {}\n255\n", values.ncols(), values.nrows()).into_bytes();
    let span = max - min;
    for i in 0..values.nrows() {
        for j in 0..values.ncols() {
            let v = if span > 0.0 { (values[(i, j)] - min) / span * 255.0 } else { 0.0 };
            out.push(v.round().clamp(0.0, 255.0) as u8);
        }
    }
    (out, min, max)
}

/// Header and pixels of a binary P5 image with maxval below 256.
pub fn parse_pgm(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>)> {
    let bad = |m: &str| Error::Parse(format!("invalid PGM: {m}"));
    let mut pos = 0;
    let mut token = || -> Result<String> {
        while pos < bytes.len() {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else if bytes[pos].is_ascii_whitespace() {
                pos += 1;
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token()? != "P5" {
        return Err(bad("magic is not P5"));
    }
    let w: usize = token()?.parse().map_err(|_| bad("width"))?;
    let h: usize = token()?.parse().map_err(|_| bad("height"))?;
    let maxval: usize = token()?.parse().map_err(|_| bad("maxval"))?;
    if maxval == 0 || maxval > 255 {
        return Err(bad("maxval must be in 1..=255"));
    }
    // exactly one whitespace byte separates the header from the raster
    let data = bytes.get(pos + 1..).ok_or_else(|| bad("missing raster"))?;
    if data.len() != w * h {
        return Err(bad("raster size does not match header"));
    }
    Ok((w, h, data.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_operator, seeded};
    use crate::symbols::{center_symbol, chord_symbol, qps_symbol};

    #[test]
    fn operator_json_round_trip_is_bit_exact() {
        let s = TorusSpace::new(4, 0.3, 0.7).unwrap();
        let a = random_operator(&s, &mut seeded(30));
        let back = operator_from_json(&operator_to_json(&a).unwrap()).unwrap();
        assert_eq!(back, a);
        for (x, y) in a.matrix().iter().zip(back.matrix().iter()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }

    #[test]
    fn symbol_round_trips() {
        let s = TorusSpace::new(3, 0.3, 0.7).unwrap();
        let a = random_operator(&s, &mut seeded(31));
        for sym in [
            AnySymbol::Chord(chord_symbol(&a)),
            AnySymbol::Center(center_symbol(&a)),
            AnySymbol::CenterQps(qps_symbol(&a).unwrap()),
        ] {
            assert_eq!(symbol_from_json(&symbol_to_json(&sym).unwrap()).unwrap(), sym);
            let back = symbol_from_csv(&symbol_to_csv(&sym)).unwrap();
            assert_eq!(back.kind(), sym.kind());
            let err = crate::operators::max_abs_diff(back.values(), sym.values());
            assert!(err <= 1e-12, "{err}");
        }
    }

    #[test]
    fn extended_grid_csv_reads_back_fundamental_block() {
        let s = TorusSpace::periodic(3).unwrap();
        let ce = center_symbol(&random_operator(&s, &mut seeded(32)));
        let text = grid_to_csv(SymbolKind::Center, &s, &ce.extended_grid());
        assert_eq!(text.lines().count(), 3 + 36);
        let back = symbol_from_csv(&text).unwrap();
        assert!(crate::operators::max_abs_diff(back.values(), ce.values()) < 1e-12);
        let json = grid_to_json(SymbolKind::Center, &s, &ce.extended_grid()).unwrap();
        assert_eq!(symbol_from_text(&json).unwrap(), AnySymbol::Center(ce));
    }

    #[test]
    fn csv_errors() {
        assert!(symbol_from_csv("").is_err());
        assert!(symbol_from_csv("kind,n,chi_p,chi_q\nfoo,3,0,0\ni,j,re,im\n").is_err());
        assert!(symbol_from_csv("kind,n,chi_p,chi_q\nchord,2,0,0\ni,j,re,im\n0,0,1,0\n").is_err());
    }

    #[test]
    fn hamiltonian_and_cat_map_files() {
        let h = hamiltonian_from_json(
            r#"{"terms":[{"r":1,"s":0,"re":0.5,"im":0.0},{"r":-1,"s":0,"re":0.5,"im":0.0}]}"#,
        )
        .unwrap();
        assert_eq!(h.coefficient(1, 0), Complex64::from(0.5));
        assert_eq!(hamiltonian_from_json(&hamiltonian_to_json(&h).unwrap()).unwrap(), h);
        assert_eq!(cat_map_from_json(r#"{"b":[[1,0],[0,1]]}"#).unwrap().m(), [[0, 1], [-1, 0]]);
        assert_eq!(cat_map_from_json(r#"{"m":[[0,1],[-1,0]]}"#).unwrap().b(), [[1, 0], [0, 1]]);
        assert!(matches!(cat_map_from_json(r#"{"b":[[1.5,0],[0,1]]}"#), Err(Error::Parse(_))));
        assert!(cat_map_from_json(r#"{"b":[[1,0],[0,1]],"m":[[0,1],[-1,0]]}"#).is_err());
        assert!(matches!(cat_map_from_json(r#"{"m":[[2,1],[1,1]]}"#), Err(Error::Domain(_))));
    }

    #[test]
    fn job_paths_resolve_against_base() {
        let job = EvolutionJob::from_json(
            r#"{"hamiltonian":"h.json","t":0.1,"m_steps":2,"mode":"trotter"}"#,
            Some(Path::new("/tmp/jobs")),
        )
        .unwrap();
        assert_eq!(job.hamiltonian, PathBuf::from("/tmp/jobs/h.json"));
        assert_eq!(job.mode, EvolveMode::Trotter);
        assert!(EvolutionJob::from_json(r#"{"hamiltonian":"h","t":1,"mode":"fast"}"#, None).is_err());
    }

    #[test]
    fn state_file() {
        let s = TorusSpace::periodic(3).unwrap();
        let st = state_from_json(r#"{"re":[1,0,0]}"#, &s).unwrap();
        assert_eq!(st, TorusState::position(s, 0));
        assert_eq!(state_from_json(&state_to_json(&st).unwrap(), &s).unwrap(), st);
        assert!(matches!(state_from_json(r#"{"re":[1,0]}"#, &s), Err(Error::Dimension { .. })));
        assert!(state_from_json("{", &s).unwrap_err().is_parse());
    }

    #[test]
    fn pgm_round_trip() {
        let m = nalgebra::DMatrix::from_row_slice(2, 3, &[0.0, 0.5, 1.0, -1.0, 0.25, 0.75]);
        let (bytes, min, max) = to_pgm(&m);
        assert_eq!((min, max), (-1.0, 1.0));
        let (w, h, px) = parse_pgm(&bytes).unwrap();
        assert_eq!((w, h), (3, 2));
        assert_eq!(px, vec![128, 191, 255, 0, 159, 223]);
        assert!(parse_pgm(b"P2\n1 1\n255\n\x00").is_err());
        assert!(parse_pgm(b"P5\n2 2\n255\n\x00").is_err());
    }
}
