//! Plain-text exchange formats.
//!
//! State file:
//!
//! ```text
//! dim dS dE
//! row col re im      (dim² lines, every entry exactly once)
//! ```
//!
//! Hamiltonian file: the same header, then one block per segment:
//!
//! ```text
//! segment t_start t_end
//! row col re im      (dim² lines)
//! ```
//!
//! Indices are zero-based. Blank lines and lines starting with `#` are
//! ignored. Times accept `inf` and `-inf`.

use std::fmt::Write as _;
use std::path::Path;

use crate::dynamics::{HamiltonianSchedule, Segment};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, DEFAULT_MAX_DIM};
use crate::state::BipartiteState;

struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)> + 'a> = Box::new(
            text.lines()
                .enumerate()
                .map(|(k, l)| (k + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
        );
        Self { inner: it.peekable() }
    }

    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        self.inner.next().map(|(n, l)| (n, l.split_whitespace().collect()))
    }

    fn last_line(&mut self) -> usize {
        self.inner.peek().map(|(n, _)| *n).unwrap_or(0)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn field<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse().map_err(|_| parse_err(line, format!("cannot parse {what} from '{tok}'")))
}

fn parse_header(lines: &mut Lines) -> Result<(usize, usize, usize)> {
    let (n, toks) = lines.next().ok_or_else(|| parse_err(0, "missing header 'dim dS dE'"))?;
    if toks.len() != 3 {
        return Err(parse_err(n, "header must be 'dim dS dE'"));
    }
    let dim: usize = field(n, toks[0], "dim")?;
    let d_s: usize = field(n, toks[1], "dS")?;
    let d_e: usize = field(n, toks[2], "dE")?;
    if d_s == 0 || d_e == 0 || d_s.checked_mul(d_e) != Some(dim) {
        return Err(parse_err(n, format!("dim = {dim} does not equal dS·dE = {d_s}·{d_e}")));
    }
    if dim > DEFAULT_MAX_DIM {
        return Err(Error::Size { dim, max: DEFAULT_MAX_DIM });
    }
    Ok((dim, d_s, d_e))
}

fn parse_entries(lines: &mut Lines, dim: usize) -> Result<ComplexMatrix> {
    let mut m = ComplexMatrix::zeros(dim);
    let mut seen = vec![false; dim * dim];
    for _ in 0..dim * dim {
        let (n, toks) = match lines.next() {
            Some(x) => x,
            None => return Err(parse_err(lines.last_line(), format!("expected {} entry lines", dim * dim))),
        };
        if toks.len() != 4 {
            return Err(parse_err(n, "entry line must be 'row col re im'"));
        }
        let row: usize = field(n, toks[0], "row")?;
        let col: usize = field(n, toks[1], "col")?;
        if row >= dim || col >= dim {
            return Err(parse_err(n, format!("index ({row}, {col}) out of range for dim {dim}")));
        }
        if std::mem::replace(&mut seen[row * dim + col], true) {
            return Err(parse_err(n, format!("duplicate entry ({row}, {col})")));
        }
        let re: f64 = field(n, toks[2], "real part")?;
        let im: f64 = field(n, toks[3], "imaginary part")?;
        if !re.is_finite() || !im.is_finite() {
            return Err(parse_err(n, "matrix entries must be finite"));
        }
        m[(row, col)] = C64::new(re, im);
    }
    Ok(m)
}

pub fn parse_state(text: &str) -> Result<BipartiteState> {
    let mut lines = Lines::new(text);
    let (dim, d_s, d_e) = parse_header(&mut lines)?;
    let m = parse_entries(&mut lines, dim)?;
    if let Some((n, _)) = lines.next() {
        return Err(parse_err(n, "trailing content after the last entry"));
    }
    BipartiteState::new(m, d_s, d_e)
}

pub fn parse_schedule(text: &str) -> Result<HamiltonianSchedule> {
    let mut lines = Lines::new(text);
    let (dim, d_s, d_e) = parse_header(&mut lines)?;
    let mut segments = Vec::new();
    while let Some((n, toks)) = lines.next() {
        if toks.len() != 3 || toks[0] != "segment" {
            return Err(parse_err(n, "expected 'segment t_start t_end'"));
        }
        let t_start: f64 = field(n, toks[1], "t_start")?;
        let t_end: f64 = field(n, toks[2], "t_end")?;
        let hamiltonian = parse_entries(&mut lines, dim)?;
        segments.push(Segment { t_start, t_end, hamiltonian });
    }
    HamiltonianSchedule::new(d_s, d_e, segments)
}

fn write_entries(out: &mut String, m: &ComplexMatrix) {
    let dim = m.dim();
    for i in 0..dim {
        for j in 0..dim {
            let z = m[(i, j)];
            let _ = writeln!(out, "{i} {j} {} {}", z.re, z.im);
        }
    }
}

/// Shortest round-trip formatting, so `parse_state(&write_state(s))` is exact.
pub fn write_state(state: &BipartiteState) -> String {
    let mut out = format!("{} {} {}\n", state.dim(), state.d_s(), state.d_e());
    write_entries(&mut out, state.matrix());
    out
}

pub fn write_schedule(sched: &HamiltonianSchedule) -> String {
    let mut out = format!("{} {} {}\n", sched.d_s() * sched.d_e(), sched.d_s(), sched.d_e());
    for seg in sched.segments() {
        let _ = writeln!(out, "segment {} {}", seg.t_start, seg.t_end);
        write_entries(&mut out, &seg.hamiltonian);
    }
    out
}

pub fn read_state(path: &Path) -> Result<BipartiteState> {
    parse_state(&std::fs::read_to_string(path)?)
}

pub fn read_schedule(path: &Path) -> Result<HamiltonianSchedule> {
    parse_schedule(&std::fs::read_to_string(path)?)
}
