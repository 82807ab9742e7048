//! Text mesh format.
//!
//! ```text
//! SPHMESH <n> <k> <num_vertices> <num_simplices>
//! <n+1 coordinates per vertex line>
//! <k+1 zero-based vertex indices per simplex line>
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::DVector;

use super::surface::EmbeddedSurface;
use crate::error::{Error, Result};
use crate::tol;

/// Vertices whose norm is off by more than this are rejected rather than normalized.
pub const LOAD_NORM_TOLERANCE: f64 = 1e-6;

pub fn write_mesh<W: Write>(s: &EmbeddedSurface, mut w: W) -> Result<()> {
    writeln!(w, "SPHMESH {} 2 {} {}", s.ambient_n(), s.num_vertices(), s.triangles().len())?;
    for x in s.vertices() {
        let line: Vec<String> = x.iter().map(|c| format!("{c:.16e}")).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    for t in s.triangles() {
        writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_surface(s: &EmbeddedSurface, path: impl AsRef<Path>) -> Result<()> {
    write_mesh(s, BufWriter::new(File::create(path)?))
}

fn parse<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::Mesh(format!("line {line}: cannot parse {tok:?}")))
}

/// Reads a surface and checks `declared_betti` against its homology.
pub fn read_mesh<R: BufRead>(r: R, name: &str, declared_betti: usize) -> Result<EmbeddedSurface> {
    let mut lines = r
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((i, l)) => Ok((i, l?)),
            None => Err(Error::Mesh(format!("unexpected end of file reading {what}"))),
        }
    };
    let (ln, header) = next("header")?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 5 || toks[0] != "SPHMESH" {
        return Err(Error::Mesh(format!("line {ln}: expected `SPHMESH n k nv ns`")));
    }
    let n: usize = parse(toks[1], ln)?;
    let k: usize = parse(toks[2], ln)?;
    let nv: usize = parse(toks[3], ln)?;
    let ns: usize = parse(toks[4], ln)?;
    if k != 2 {
        return Err(Error::Mesh(format!("only surfaces are supported (k = 2), got k = {k}")));
    }
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, line) = next("vertices")?;
        let coords: Vec<f64> = line.split_whitespace().map(|t| parse(t, ln)).collect::<Result<_>>()?;
        if coords.len() != n + 1 {
            return Err(Error::Mesh(format!("line {ln}: expected {} coordinates", n + 1)));
        }
        let mut x = DVector::from_vec(coords);
        let norm = x.norm();
        if (norm - 1.0).abs() > LOAD_NORM_TOLERANCE {
            return Err(crate::error::invalid(
                "vertex",
                format!("line {ln}: norm {norm} cannot be normalized to a point of S^{n}"),
            ));
        }
        if (norm - 1.0).abs() > tol::UNIT {
            x /= norm;
        }
        vertices.push(x);
    }
    let mut triangles = Vec::with_capacity(ns);
    for _ in 0..ns {
        let (ln, line) = next("simplices")?;
        let idx: Vec<usize> = line.split_whitespace().map(|t| parse(t, ln)).collect::<Result<_>>()?;
        if idx.len() != 3 {
            return Err(Error::Mesh(format!("line {ln}: expected 3 vertex indices")));
        }
        triangles.push([idx[0], idx[1], idx[2]]);
    }
    if let Ok((ln, _)) = next("trailing") {
        return Err(Error::Mesh(format!("line {ln}: unexpected trailing data")));
    }
    EmbeddedSurface::from_mesh(name, n, vertices, triangles, declared_betti)
}

pub fn load_surface(path: impl AsRef<Path>, declared_betti: usize) -> Result<EmbeddedSurface> {
    let path = path.as_ref();
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("mesh").to_string();
    read_mesh(BufReader::new(File::open(path)?), &name, declared_betti)
}
