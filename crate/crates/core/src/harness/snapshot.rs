//! `GPR1` snapshots: an ASCII header line
//! `GPR1 <ndims> <dims...> <spacings...> <time>` followed by little-endian `f64`
//! values, real and imaginary parts interleaved.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub dims: Vec<usize>,
    pub spacings: Vec<f64>,
    pub time: f64,
    pub values: Vec<Complex64>,
}

impl Snapshot {
    pub fn new(dims: Vec<usize>, spacings: Vec<f64>, time: f64, values: Vec<Complex64>) -> Result<Self> {
        if dims.is_empty() || dims.len() != spacings.len() {
            return Err(Error::Interface("snapshot needs one spacing per dimension".into()));
        }
        if dims.iter().product::<usize>() != values.len() {
            return Err(Error::Interface(format!("snapshot dims {dims:?} do not match {} values", values.len())));
        }
        Ok(Self { dims, spacings, time, values })
    }

    pub fn header(&self) -> String {
        let mut h = format!("GPR1 {}", self.dims.len());
        for d in &self.dims {
            h.push_str(&format!(" {d}"));
        }
        for s in &self.spacings {
            h.push_str(&format!(" {s:e}"));
        }
        h.push_str(&format!(" {:e}\n", self.time));
        h
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.header().as_bytes())?;
        let mut buf = Vec::with_capacity(16 * self.values.len());
        for z in &self.values {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(f))
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let mut reader = BufReader::new(r);
        let mut line = String::new();
        reader.read_line(&mut line)?;
        let bad = |msg: &str| Error::Interface(format!("malformed GPR1 header: {msg}"));
        let mut tok = line.split_whitespace();
        if tok.next() != Some("GPR1") {
            return Err(bad("missing magic"));
        }
        let nd: usize = tok.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("ndims"))?;
        let dims: Vec<usize> =
            (0..nd).map(|_| tok.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("dims"))).collect::<Result<_>>()?;
        let spacings: Vec<f64> =
            (0..nd).map(|_| tok.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("spacings"))).collect::<Result<_>>()?;
        let time: f64 = tok.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("time"))?;
        let len: usize = dims.iter().product();
        let mut raw = vec![0u8; 16 * len];
        reader.read_exact(&mut raw)?;
        let values = raw
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(f64::from_le_bytes(c[..8].try_into().unwrap()), f64::from_le_bytes(c[8..].try_into().unwrap()))
            })
            .collect();
        Self::new(dims, spacings, time, values)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(std::fs::File::open(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let s = Snapshot::new(vec![2, 3], vec![0.5, 0.25], 1.5, (0..6).map(|i| Complex64::new(i as f64, -0.1 * i as f64)).collect())
            .unwrap();
        let mut buf = Vec::new();
        s.write_to(&mut buf).unwrap();
        assert!(buf.starts_with(b"GPR1 2 2 3 5e-1 2.5e-1 1.5e0\n"));
        assert_eq!(Snapshot::read_from(&buf[..]).unwrap(), s);
    }
}
