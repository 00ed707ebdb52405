//! File formats: grid functions as CSV or raw `f64` with a grid header,
//! dense operators as raw row-major `f64`, trajectory records as CSV.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::diagnostics::TrajectoryRecord;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::singular_ops::DiscreteOperator;

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("{other:?}")),
    }
}

/// Writes `x,value` rows with a header line.
pub fn write_csv(u: &GridFunction, w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "value"]).map_err(csv_err)?;
    for (j, v) in u.values().iter().enumerate() {
        out.serialize((u.grid().node(j), v)).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads `x,value` rows. The nodes must form a valid uniform grid starting
/// at `−L`.
pub fn read_csv(r: impl Read) -> Result<GridFunction> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for row in rdr.deserialize::<(f64, f64)>() {
        let (x, v) = row.map_err(csv_err)?;
        xs.push(x);
        vs.push(v);
    }
    if xs.len() < 2 {
        return Err(Error::Parse("need at least two rows".to_string()));
    }
    let n = xs.len();
    let h = xs[1] - xs[0];
    let grid = Grid::new(-xs[0], n)?;
    for (j, x) in xs.iter().enumerate() {
        if (x - grid.node(j)).abs() > 1e-9 * h.abs().max(1.0) {
            return Err(Error::Parse(format!(
                "row {j}: x = {x} is not the node {} of a uniform grid on [{}, {})",
                grid.node(j),
                xs[0],
                -xs[0]
            )));
        }
    }
    GridFunction::from_values(grid, vs)
}

/// Raw little-endian layout: `N` as `u64`, `L` as `f64`, then `N` samples.
pub fn write_raw(u: &GridFunction, mut w: impl Write) -> Result<()> {
    w.write_all(&(u.len() as u64).to_le_bytes())?;
    w.write_all(&u.grid().half_width().to_le_bytes())?;
    for v in u.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_raw(mut r: impl Read) -> Result<GridFunction> {
    let n = read_u64(&mut r)? as usize;
    let l = read_f64(&mut r)?;
    let grid = Grid::new(l, n)?;
    let values = (0..n).map(|_| read_f64(&mut r)).collect::<Result<Vec<_>>>()?;
    GridFunction::from_values(grid, values)
}

/// Raw little-endian layout: rows and columns as `u64`, then the entries in
/// row-major order.
pub fn write_operator(op: &DiscreteOperator, mut w: impl Write) -> Result<()> {
    let (rows, cols) = op.matrix.shape();
    w.write_all(&(rows as u64).to_le_bytes())?;
    w.write_all(&(cols as u64).to_le_bytes())?;
    for i in 0..rows {
        for j in 0..cols {
            w.write_all(&op.matrix[(i, j)].to_le_bytes())?;
        }
    }
    Ok(())
}

/// Reads an operator dump back as `(rows, cols, row-major entries)`.
pub fn read_operator(mut r: impl Read) -> Result<(usize, usize, Vec<f64>)> {
    let rows = read_u64(&mut r)? as usize;
    let cols = read_u64(&mut r)? as usize;
    let data = (0..rows * cols).map(|_| read_f64(&mut r)).collect::<Result<Vec<_>>>()?;
    Ok((rows, cols, data))
}

pub fn save_raw(u: &GridFunction, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_raw(u, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_raw(path: &Path) -> Result<GridFunction> {
    read_raw(BufReader::new(File::open(path)?))
}

pub fn load_csv(path: &Path) -> Result<GridFunction> {
    read_csv(BufReader::new(File::open(path)?))
}

/// Writes the records under [`TrajectoryRecord::CSV_HEADER`]. A missing
/// `fitted_decay_rate` is an empty field.
pub fn write_records(records: &[TrajectoryRecord], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    if records.is_empty() {
        out.write_record(TrajectoryRecord::CSV_HEADER.split(','))
            .map_err(csv_err)?;
    }
    for r in records {
        out.serialize(r).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_records(r: impl Read) -> Result<Vec<TrajectoryRecord>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .map(|row| row.map_err(csv_err))
        .collect()
}
