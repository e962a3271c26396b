//! CSV export of fields and grid samples.
//!
//! Numbers are written with 17 significant digits, enough to round-trip an
//! `f64` exactly.

use std::io::{Read, Write};
use std::sync::Arc;

use crate::domain::{QuadratureGrid, SpectralBasis};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::scalar::Scalar;

/// Round-trip formatting for a scalar.
pub fn fmt_real<T: Scalar>(x: T) -> String {
    format!("{:.16e}", x.to_f64_lossy())
}

fn index_headers(dim: usize) -> Vec<String> {
    if dim == 1 {
        vec!["m".into()]
    } else {
        (1..=dim).map(|i| format!("m{i}")).collect()
    }
}

/// Columns `m` (or `m1, m2`) then `coefficient`, one row per mode in basis
/// order.
pub fn write_field_csv<T: Scalar, W: Write>(field: &Field<T>, out: W) -> Result<()> {
    let basis = field.basis();
    let mut w = csv::Writer::from_writer(out);
    let mut header = index_headers(basis.domain().dim());
    header.push("coefficient".into());
    w.write_record(&header)?;
    for (mode, &c) in basis.modes().iter().zip(field.coeffs()) {
        let mut row: Vec<String> = mode.index.iter().map(|i| i.to_string()).collect();
        row.push(fmt_real(c));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file written by [`write_field_csv`]. Rows may come in any order
/// but must name exactly the modes of `basis`.
pub fn read_field_csv<T: Scalar, R: Read>(basis: Arc<SpectralBasis<T>>, input: R) -> Result<Field<T>> {
    let dim = basis.domain().dim();
    let mut coeffs = vec![None; basis.len()];
    let mut r = csv::Reader::from_reader(input);
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != dim + 1 {
            return Err(Error::InvalidArgument(format!(
                "field row needs {} columns, got {}",
                dim + 1,
                rec.len()
            )));
        }
        let parse_idx = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|e| Error::InvalidArgument(format!("bad mode index `{s}`: {e}")))
        };
        let index = (0..dim).map(|i| parse_idx(&rec[i])).collect::<Result<Vec<_>>>()?;
        let value: f64 = rec[dim]
            .trim()
            .parse()
            .map_err(|e| Error::InvalidArgument(format!("bad coefficient `{}`: {e}", &rec[dim])))?;
        let j = basis
            .modes()
            .iter()
            .position(|m| m.index == index)
            .ok_or_else(|| Error::InvalidArgument(format!("mode {index:?} not in the basis")))?;
        coeffs[j] = Some(T::lit(value));
    }
    let coeffs = coeffs
        .into_iter()
        .enumerate()
        .map(|(j, c)| c.ok_or_else(|| Error::InvalidArgument(format!("mode {j} missing"))))
        .collect::<Result<Vec<_>>>()?;
    Field::new(basis, coeffs)
}

/// Columns `x` (or `x1, x2`) then `value`, one row per grid node.
pub fn write_samples_csv<T: Scalar, W: Write>(
    grid: &QuadratureGrid<T>,
    values: &[T],
    out: W,
) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: values.len(),
        });
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = if grid.dim() == 1 {
        vec!["x".into()]
    } else {
        (1..=grid.dim()).map(|i| format!("x{i}")).collect()
    };
    header.push("value".into());
    w.write_record(&header)?;
    for (x, &v) in grid.nodes().zip(values) {
        let mut row: Vec<String> = x.iter().map(|&c| fmt_real(c)).collect();
        row.push(fmt_real(v));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
