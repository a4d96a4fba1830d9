//! Text exports for traced lines.

use std::io::Write;

use super::FieldLine;
use crate::error::Result;

/// One row per vertex: `s,x,y,z,n1,n2,n3`.
pub fn write_csv<W: Write>(mut w: W, line: &FieldLine) -> Result<()> {
    writeln!(w, "s,x,y,z,n1,n2,n3")?;
    for i in 0..line.points.len() {
        let p = line.points[i];
        let n = line.n_samples[i];
        writeln!(w, "{:e},{:e},{:e},{:e},{:e},{:e},{:e}", line.arclength[i], p[0], p[1], p[2], n[0], n[1], n[2])?;
    }
    w.flush()?;
    Ok(())
}

/// Legacy VTK POLYDATA with one polyline per field line. Closed lines repeat
/// their first vertex at the end.
pub fn write_vtk_polylines<W: Write>(mut w: W, title: &str, lines: &[FieldLine]) -> Result<()> {
    let total: usize = lines.iter().map(|l| l.points.len()).sum();
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{}", title.lines().next().unwrap_or(""))?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET POLYDATA")?;
    writeln!(w, "POINTS {total} double")?;
    for line in lines {
        for p in &line.points {
            writeln!(w, "{:e} {:e} {:e}", p[0], p[1], p[2])?;
        }
    }
    let size: usize = lines.iter().map(|l| 1 + l.points.len() + usize::from(l.closed)).sum();
    writeln!(w, "LINES {} {}", lines.len(), size)?;
    let mut offset = 0;
    for line in lines {
        let m = line.points.len();
        write!(w, "{}", m + usize::from(line.closed))?;
        for i in 0..m {
            write!(w, " {}", offset + i)?;
        }
        if line.closed {
            write!(w, " {offset}")?;
        }
        writeln!(w)?;
        offset += m;
    }
    w.flush()?;
    Ok(())
}
