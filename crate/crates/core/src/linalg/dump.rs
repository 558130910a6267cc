//! Lossless text dump of a [`DenseOperator`], used for regression goldens.
//!
//! ```text
//! DENSEOP 1
//! dim 4
//! precision 106
//! backend dd
//! <re hex> <im hex>        one line per entry, row-major
//! ```

use std::io::{BufRead, Write};

use super::DenseOperator;
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

const MAGIC: &str = "DENSEOP 1";

pub fn write_dump<T: Real>(op: &DenseOperator<T>, mut w: impl Write) -> Result<()> {
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "dim {}", op.dim())?;
    writeln!(w, "precision {}", T::BITS)?;
    writeln!(w, "backend {}", T::NAME)?;
    for z in op.entries() {
        writeln!(w, "{} {}", z.re.to_hex(), z.im.to_hex())?;
    }
    Ok(())
}

pub fn read_dump<T: Real>(r: impl BufRead) -> Result<DenseOperator<T>> {
    let mut lines = r.lines();
    let mut next = |what: &str| -> Result<String> {
        lines
            .next()
            .transpose()?
            .ok_or_else(|| Error::Parse(format!("matrix dump truncated before {what}")))
    };
    if next("header")?.trim() != MAGIC {
        return Err(Error::Parse("not a dense-operator dump".into()));
    }
    let field = |line: String, key: &str| -> Result<String> {
        line.strip_prefix(key)
            .map(|v| v.trim().to_string())
            .ok_or_else(|| Error::Parse(format!("expected `{key}` line, found {line:?}")))
    };
    let dim: usize = field(next("dim")?, "dim ")?
        .parse()
        .map_err(|e| Error::Parse(format!("bad dim: {e}")))?;
    let bits = field(next("precision")?, "precision ")?;
    let backend = field(next("backend")?, "backend ")?;
    if backend != T::NAME || bits != T::BITS.to_string() {
        return Err(Error::Parse(format!(
            "dump holds backend {backend} at {bits} bits, reader expects {} at {} bits",
            T::NAME,
            T::BITS
        )));
    }
    let mut data = Vec::with_capacity(dim * dim);
    for idx in 0..dim * dim {
        let line = next("all entries")?;
        let mut parts = line.split_whitespace();
        let (Some(re), Some(im), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse(format!("entry {idx}: expected two hex fields")));
        };
        data.push(Cplx::new(T::from_hex(re)?, T::from_hex(im)?));
    }
    DenseOperator::from_entries(dim, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testing::random_hermitian;
    use crate::scalar::{Dd, F256};

    #[test]
    fn roundtrip_is_bit_exact() {
        let m = random_hermitian::<Dd>(4, 3, true);
        let mut buf = Vec::new();
        write_dump(&m, &mut buf).unwrap();
        let back: DenseOperator<Dd> = read_dump(buf.as_slice()).unwrap();
        assert!(back == m);

        let m = random_hermitian::<F256>(2, 4, true);
        let mut buf = Vec::new();
        write_dump(&m, &mut buf).unwrap();
        assert!(read_dump::<F256>(buf.as_slice()).unwrap() == m);
    }

    #[test]
    fn backend_mismatch_is_rejected() {
        let m = random_hermitian::<Dd>(2, 3, false);
        let mut buf = Vec::new();
        write_dump(&m, &mut buf).unwrap();
        assert!(read_dump::<f64>(buf.as_slice()).is_err());
        assert!(read_dump::<Dd>(&buf[..buf.len() - 40]).is_err());
    }
}
