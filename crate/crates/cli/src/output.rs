//! OBJ, CSV and JSON writers.

use std::fmt::Write as _;
use std::path::Path;

use harmloop::dpw::GridSpec;
use harmloop::laurent::C64;

use crate::error::CliError;

/// One sampled surface: the map at a single spectral value.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    pub lambda: C64,
    pub points: Vec<Option<[f64; 3]>>,
}

pub const CSV_HEADER: &str = "x,y,lambda_re,lambda_im,phi1,phi2,phi3";

/// Masked cells are written as `nan`.
pub fn csv(grid: &GridSpec, slices: &[Slice]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for s in slices {
        for (i, p) in s.points.iter().enumerate() {
            let z = grid.point_at(i);
            let [a, b, c] = p.unwrap_or([f64::NAN; 3]);
            writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                z.re, z.im, s.lambda.re, s.lambda.im, a, b, c
            )
            .unwrap();
        }
    }
    out
}

/// One object per slice with vertices `(φ¹, φ², φ³)` and quad faces; faces touching
/// a masked cell are dropped.
pub fn obj(grid: &GridSpec, slices: &[Slice]) -> String {
    let mut out = String::from("# harmloop surface export\n");
    let mut next = 1usize;
    for (k, s) in slices.iter().enumerate() {
        writeln!(out, "o lambda_{k}_{:e}_{:e}", s.lambda.re, s.lambda.im).unwrap();
        let mut index = vec![None; s.points.len()];
        for (i, p) in s.points.iter().enumerate() {
            if let Some([a, b, c]) = p {
                writeln!(out, "v {a:e} {b:e} {c:e}").unwrap();
                index[i] = Some(next);
                next += 1;
            }
        }
        for iy in 0..grid.ny - 1 {
            for ix in 0..grid.nx - 1 {
                let corners = [
                    grid.index(ix, iy),
                    grid.index(ix + 1, iy),
                    grid.index(ix + 1, iy + 1),
                    grid.index(ix, iy + 1),
                ];
                if let [Some(a), Some(b), Some(c), Some(d)] = corners.map(|i| index[i]) {
                    writeln!(out, "f {a} {b} {c} {d}").unwrap();
                }
            }
        }
    }
    out
}

pub fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
