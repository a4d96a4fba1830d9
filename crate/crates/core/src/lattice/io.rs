//! Binary field container.
//!
//! Layout (all little-endian):
//!
//! ```text
//! magic       5 bytes   "HPFN1"
//! nx, ny, nz  3 x u32
//! h           f64
//! origin      3 x f64
//! components  u32
//! boundary    u8        0 = FixedVacuum, 1 = Periodic
//! data        nx*ny*nz*components x f64, z outermost, x innermost,
//!             components interleaved per node
//! ```

use std::fs;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{BoundaryPolicy, ComplexField, DirectorField, Grid, ScalarField, VectorField3, NORTH_POLE};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 5] = b"HPFN1";
pub const HEADER_LEN: usize = 5 + 3 * 4 + 8 + 3 * 8 + 4 + 1;
const MAX_COMPONENTS: usize = 64;

/// Untyped contents of a container file.
#[derive(Clone, Debug, PartialEq)]
pub struct RawField {
    pub grid: Grid,
    pub components: usize,
    pub data: Vec<f64>,
}

impl RawField {
    pub fn new(grid: Grid, components: usize, data: Vec<f64>) -> Result<Self> {
        if components == 0 || components > MAX_COMPONENTS {
            return Err(Error::Format(format!("unsupported component count {components}")));
        }
        if data.len() != grid.len() * components {
            return Err(Error::Format(format!(
                "data length {} does not match {} nodes x {} components",
                data.len(),
                grid.len(),
                components
            )));
        }
        Ok(RawField { grid, components, data })
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let g = &self.grid;
        let mut header = Vec::with_capacity(HEADER_LEN);
        header.extend_from_slice(MAGIC);
        for n in g.dims() {
            let n = u32::try_from(n).map_err(|_| Error::Format("dimension exceeds u32".into()))?;
            header.extend_from_slice(&n.to_le_bytes());
        }
        header.extend_from_slice(&g.h.to_le_bytes());
        for o in g.origin {
            header.extend_from_slice(&o.to_le_bytes());
        }
        header.extend_from_slice(&(self.components as u32).to_le_bytes());
        header.push(g.boundary.to_byte());
        w.write_all(&header)?;
        let mut buf = Vec::with_capacity(self.data.len() * 8);
        for v in &self.data {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; HEADER_LEN];
        r.read_exact(&mut header).map_err(|e| match e.kind() {
            io::ErrorKind::UnexpectedEof => Error::Format("truncated header".into()),
            _ => Error::Io(e),
        })?;
        if &header[..5] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let u32_at = |o: usize| u32::from_le_bytes(header[o..o + 4].try_into().unwrap()) as usize;
        let f64_at = |o: usize| f64::from_le_bytes(header[o..o + 8].try_into().unwrap());
        let dims = [u32_at(5), u32_at(9), u32_at(13)];
        let h = f64_at(17);
        let origin = [f64_at(25), f64_at(33), f64_at(41)];
        let components = u32_at(49);
        let boundary = BoundaryPolicy::from_byte(header[53])
            .ok_or_else(|| Error::Format(format!("unknown boundary policy byte {}", header[53])))?;
        let grid = Grid::new(dims, h, origin, boundary).map_err(|e| Error::Format(e.to_string()))?;
        if components == 0 || components > MAX_COMPONENTS {
            return Err(Error::Format(format!("unsupported component count {components}")));
        }
        let count = grid
            .len()
            .checked_mul(components)
            .ok_or_else(|| Error::Format("payload size overflows".into()))?;
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() != count * 8 {
            return Err(Error::Format(format!(
                "payload has {} bytes, header implies {}",
                bytes.len(),
                count * 8
            )));
        }
        let data = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        Ok(RawField { grid, components, data })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.data.len() * 8);
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, |w| self.write_to(w))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(BufReader::new(fs::File::open(path)?))
    }

    fn expect_components(&self, n: usize) -> Result<()> {
        if self.components != n {
            return Err(Error::Format(format!("expected {n} components, found {}", self.components)));
        }
        Ok(())
    }

    pub fn into_vectors(self) -> Result<VectorField3> {
        self.expect_components(3)?;
        let data = self.data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        Ok(VectorField3 { grid: self.grid, data })
    }

    /// Reads a director field. Under `FixedVacuum` the vacuum is taken from the
    /// corner node, otherwise it defaults to the north pole.
    pub fn into_director(self) -> Result<DirectorField> {
        let v = self.into_vectors()?;
        let vacuum = match v.grid.boundary {
            BoundaryPolicy::FixedVacuum => v.data[0],
            BoundaryPolicy::Periodic => NORTH_POLE,
        };
        Ok(DirectorField { grid: v.grid, data: v.data, vacuum })
    }

    pub fn into_scalar(self) -> Result<ScalarField> {
        self.expect_components(1)?;
        Ok(ScalarField { grid: self.grid, data: self.data })
    }

    pub fn into_complex(self) -> Result<ComplexField> {
        self.expect_components(2)?;
        let data = self.data.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
        Ok(ComplexField { grid: self.grid, data })
    }
}

impl From<&VectorField3> for RawField {
    fn from(f: &VectorField3) -> Self {
        RawField { grid: f.grid, components: 3, data: f.data.iter().flatten().copied().collect() }
    }
}

impl From<&DirectorField> for RawField {
    fn from(f: &DirectorField) -> Self {
        RawField { grid: f.grid, components: 3, data: f.data.iter().flatten().copied().collect() }
    }
}

impl From<&ScalarField> for RawField {
    fn from(f: &ScalarField) -> Self {
        RawField { grid: f.grid, components: 1, data: f.data.clone() }
    }
}

impl From<&ComplexField> for RawField {
    fn from(f: &ComplexField) -> Self {
        RawField {
            grid: f.grid,
            components: 2,
            data: f.data.iter().flat_map(|z| [z.re, z.im]).collect(),
        }
    }
}

/// Writes through a temporary sibling file and renames it into place.
pub fn write_atomic<F>(path: &Path, write: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<fs::File>) -> Result<()>,
{
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Format(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut w = BufWriter::new(fs::File::create(&tmp)?);
        write(&mut w)?;
        w.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn save_director(field: &DirectorField, path: &Path) -> Result<()> {
    RawField::from(field).save(path)
}

pub fn load_director(path: &Path) -> Result<DirectorField> {
    RawField::load(path)?.into_director()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> RawField {
        let g = Grid::new([8, 9, 10], 0.25, [-1.0, -1.125, 0.5], BoundaryPolicy::Periodic).unwrap();
        let data = (0..g.len() * 2).map(|i| (i as f64).sqrt() - 3.0).collect();
        RawField::new(g, 2, data).unwrap()
    }

    #[test]
    fn header_layout_is_fixed() {
        let bytes = sample().to_bytes();
        assert_eq!(&bytes[..5], b"HPFN1");
        assert_eq!(u32::from_le_bytes(bytes[5..9].try_into().unwrap()), 8);
        assert_eq!(u32::from_le_bytes(bytes[13..17].try_into().unwrap()), 10);
        assert_eq!(f64::from_le_bytes(bytes[17..25].try_into().unwrap()), 0.25);
        assert_eq!(u32::from_le_bytes(bytes[49..53].try_into().unwrap()), 2);
        assert_eq!(bytes[53], 1);
        assert_eq!(bytes.len(), HEADER_LEN + 8 * 9 * 10 * 2 * 8);
        // second node, first component: x is the fastest axis
        let first = f64::from_le_bytes(bytes[HEADER_LEN + 16..HEADER_LEN + 24].try_into().unwrap());
        assert_eq!(first, 2f64.sqrt() - 3.0);
    }

    #[test]
    fn corrupted_inputs_are_format_errors() {
        let mut bytes = sample().to_bytes();
        bytes[0] = b'X';
        assert!(matches!(RawField::read_from(&bytes[..]), Err(Error::Format(_))));
        let bytes = sample().to_bytes();
        assert!(matches!(RawField::read_from(&bytes[..30]), Err(Error::Format(_))));
        assert!(matches!(RawField::read_from(&bytes[..bytes.len() - 1]), Err(Error::Format(_))));
        let mut bytes = sample().to_bytes();
        bytes[53] = 7;
        assert!(matches!(RawField::read_from(&bytes[..]), Err(Error::Format(_))));
    }

    #[test]
    fn director_vacuum_recovered_from_corner() {
        let g = Grid::cube(8, 1.0).unwrap();
        let f = DirectorField::uniform(g, [0.0, 1.0, 0.0]);
        let back = RawField::read_from(&RawField::from(&f).to_bytes()[..]).unwrap().into_director().unwrap();
        assert_eq!(back, f);
    }

    proptest! {
        #[test]
        fn roundtrip_is_bit_exact(seed in any::<u64>(), comps in 1usize..5, h in 0.01f64..10.0) {
            let g = Grid::new([8, 8, 9], h, [seed as f64 * 1e-9, -h, 3.0], BoundaryPolicy::FixedVacuum).unwrap();
            let data: Vec<f64> = (0..g.len() * comps)
                .map(|i| f64::from_bits(seed.wrapping_mul(6364136223846793005).wrapping_add(i as u64) >> 2))
                .collect();
            let raw = RawField::new(g, comps, data).unwrap();
            let bytes = raw.to_bytes();
            let back = RawField::read_from(&bytes[..]).unwrap();
            prop_assert_eq!(back.to_bytes(), bytes);
        }
    }
}
