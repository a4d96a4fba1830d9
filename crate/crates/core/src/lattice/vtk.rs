//! Legacy ASCII VTK writers for viewers.

use std::io::Write;

use super::io::RawField;
use super::Grid;
use crate::error::Result;
use crate::vec3::Vec3;

pub enum VtkArray<'a> {
    Scalars(&'a str, &'a [f64]),
    Vectors(&'a str, &'a [Vec3]),
}

pub fn write_structured_points<W: Write>(mut w: W, title: &str, grid: &Grid, arrays: &[VtkArray]) -> Result<()> {
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{}", title.lines().next().unwrap_or(""))?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET STRUCTURED_POINTS")?;
    writeln!(w, "DIMENSIONS {} {} {}", grid.nx, grid.ny, grid.nz)?;
    writeln!(w, "ORIGIN {} {} {}", grid.origin[0], grid.origin[1], grid.origin[2])?;
    writeln!(w, "SPACING {} {} {}", grid.h, grid.h, grid.h)?;
    writeln!(w, "POINT_DATA {}", grid.len())?;
    for array in arrays {
        match array {
            VtkArray::Scalars(name, data) => {
                writeln!(w, "SCALARS {name} double 1")?;
                writeln!(w, "LOOKUP_TABLE default")?;
                for v in data.iter() {
                    writeln!(w, "{v:e}")?;
                }
            }
            VtkArray::Vectors(name, data) => {
                writeln!(w, "VECTORS {name} double")?;
                for v in data.iter() {
                    writeln!(w, "{:e} {:e} {:e}", v[0], v[1], v[2])?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Exports a container: three components become one vector array, anything
/// else becomes one scalar array per component.
pub fn write_raw<W: Write>(w: W, name: &str, raw: &RawField) -> Result<()> {
    if raw.components == 3 {
        let vecs: Vec<Vec3> = raw.data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        return write_structured_points(w, name, &raw.grid, &[VtkArray::Vectors(name, &vecs)]);
    }
    let columns: Vec<(String, Vec<f64>)> = (0..raw.components)
        .map(|c| {
            let label = if raw.components == 1 { name.to_string() } else { format!("{name}_{c}") };
            (label, raw.data.iter().skip(c).step_by(raw.components).copied().collect())
        })
        .collect();
    let arrays: Vec<VtkArray> = columns.iter().map(|(n, d)| VtkArray::Scalars(n, d)).collect();
    write_structured_points(w, name, &raw.grid, &arrays)
}
