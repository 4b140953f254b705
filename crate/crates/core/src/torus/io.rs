//! Flat binary field dumps with a plain-text sidecar header.
//!
//! The data file holds little-endian `f64` values, node-major in the grid's
//! linear node order (axis 0 fastest, axes `x₁,…,xₙ,y₁,…,yₙ`). A potential
//! stores one value per node. A Hermitian field stores, per node, the
//! `n × n` entries in row-major order, each as `(re, im)`.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::torus::field::HermitianField;
use crate::torus::grid::TorusGrid;

fn sidecar_path(data: &Path) -> PathBuf {
    let mut name = data.as_os_str().to_owned();
    name.push(".hdr");
    PathBuf::from(name)
}

fn write_values(path: &Path, values: impl Iterator<Item = f64>) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    for v in values {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

fn write_header(path: &Path, grid: &TorusGrid, kind: &str, layout: &str, count: usize) -> Result<()> {
    let axes: Vec<String> = (1..=grid.dim())
        .map(|i| format!("x{i}"))
        .chain((1..=grid.dim()).map(|i| format!("y{i}")))
        .collect();
    let header = format!(
        "kind = {kind}\nscalar = f64\nendianness = little\nn = {}\nN = {}\nnodes = {}\naxes = {}\naxis_order = first axis varies fastest\nlayout = {layout}\nvalues = {count}\n",
        grid.dim(),
        grid.size(),
        grid.nodes(),
        axes.join(","),
    );
    fs::write(sidecar_path(path), header)?;
    Ok(())
}

/// Writes one value per node plus `<path>.hdr`.
pub fn write_potential(path: &Path, grid: &TorusGrid, values: &[f64]) -> Result<()> {
    if values.len() != grid.nodes() {
        return Err(Error::Domain("potential does not match the grid".into()));
    }
    write_values(path, values.iter().copied())?;
    write_header(path, grid, "potential", "node", values.len())
}

/// Writes every node matrix plus `<path>.hdr`.
pub fn write_hermitian(path: &Path, grid: &TorusGrid, field: &HermitianField) -> Result<()> {
    if field.nodes() != grid.nodes() || field.dim() != grid.dim() {
        return Err(Error::Domain("field does not match the grid".into()));
    }
    let values = field.as_slice().iter().flat_map(|z| [z.re, z.im]);
    write_values(path, values)?;
    write_header(
        path,
        grid,
        "hermitian",
        "node, row, column, (re, im)",
        field.as_slice().len() * 2,
    )
}

/// Reads a little-endian `f64` dump.
pub fn read_values(path: &Path) -> Result<Vec<f64>> {
    let bytes = fs::read(path)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Io(format!("{} is not a whole number of f64 values", path.display())));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}
