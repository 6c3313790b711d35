//! Binary file formats, all little-endian.
//!
//! Index: magic `PBWTBAT1`, `h: u32`, `l: u32`, `sigma: u8`, then per column
//! a run count `u32` followed by that many `(symbol: u8, length: u32,
//! last_pa_entry: u32)` triples, then the total run count `r: u64`.
//!
//! Batch: `q: u32`, record count `u64`, then per record `(query_id, end_col,
//! lo, hi, last_hap_id)` as `u32`s plus a trailing `start_col: u32` when the
//! batch keeps starts. Whether starts are present is not stored in the file.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};
use crate::index::{PbwtIndex, RleColumn, Run};
use crate::smem::{SmemBatchInput, SmemRecord};

pub const INDEX_MAGIC: &[u8; 8] = b"PBWTBAT1";

fn truncated(e: io::Error, what: &str) -> Error {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        Error::Corruption(format!("file truncated while reading {}", what))
    } else {
        Error::Io(e)
    }
}

fn expect_eof<R: Read>(r: &mut R) -> Result<()> {
    let mut byte = [0u8; 1];
    match r.read(&mut byte)? {
        0 => Ok(()),
        _ => Err(Error::Corruption("trailing bytes after end of data".into())),
    }
}

pub fn write_index<W: Write>(w: &mut W, index: &PbwtIndex) -> Result<()> {
    w.write_all(INDEX_MAGIC)?;
    w.write_u32::<LittleEndian>(index.height() as u32)?;
    w.write_u32::<LittleEndian>(index.length() as u32)?;
    w.write_u8(index.sigma())?;
    for col in index.columns() {
        w.write_u32::<LittleEndian>(col.runs.len() as u32)?;
        for run in &col.runs {
            w.write_u8(run.symbol)?;
            w.write_u32::<LittleEndian>(run.length)?;
            w.write_u32::<LittleEndian>(run.last_pa_entry)?;
        }
    }
    w.write_u64::<LittleEndian>(index.runs())?;
    Ok(())
}

pub fn read_index<R: Read>(r: &mut R) -> Result<PbwtIndex> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)
        .map_err(|e| truncated(e, "magic"))?;
    if &magic != INDEX_MAGIC {
        return Err(Error::Corruption("bad magic, not an index file".into()));
    }
    let h = r
        .read_u32::<LittleEndian>()
        .map_err(|e| truncated(e, "header"))?;
    let l = r
        .read_u32::<LittleEndian>()
        .map_err(|e| truncated(e, "header"))?;
    let sigma = r.read_u8().map_err(|e| truncated(e, "header"))?;

    let mut columns = Vec::new();
    for j in 0..l {
        let n = r
            .read_u32::<LittleEndian>()
            .map_err(|e| truncated(e, "run count"))?;
        if u64::from(n) > u64::from(h) {
            return Err(Error::Corruption(format!(
                "column {} claims {} runs for {} rows",
                j, n, h
            )));
        }
        let mut runs = Vec::with_capacity(n as usize);
        for _ in 0..n {
            let symbol = r.read_u8().map_err(|e| truncated(e, "run"))?;
            let length = r
                .read_u32::<LittleEndian>()
                .map_err(|e| truncated(e, "run"))?;
            let last_pa_entry = r
                .read_u32::<LittleEndian>()
                .map_err(|e| truncated(e, "run"))?;
            runs.push(Run {
                symbol,
                length,
                last_pa_entry,
            });
        }
        columns.push(RleColumn { runs });
    }
    let total = r
        .read_u64::<LittleEndian>()
        .map_err(|e| truncated(e, "run total"))?;
    expect_eof(r)?;

    let index = PbwtIndex::from_parts(h, sigma, columns)?;
    if index.runs() != total {
        return Err(Error::Corruption(format!(
            "run total {} does not match the {} runs stored",
            total,
            index.runs()
        )));
    }
    Ok(index)
}

pub fn save_index(path: &Path, index: &PbwtIndex) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_index(&mut w, index)?;
    w.flush()?;
    Ok(())
}

pub fn load_index(path: &Path) -> Result<PbwtIndex> {
    read_index(&mut BufReader::new(File::open(path)?))
}

pub fn write_batch<W: Write>(w: &mut W, batch: &SmemBatchInput) -> Result<()> {
    w.write_u32::<LittleEndian>(batch.q)?;
    w.write_u64::<LittleEndian>(batch.records.len() as u64)?;
    for rec in &batch.records {
        for v in [rec.query_id, rec.end_col, rec.lo, rec.hi, rec.last_hap_id] {
            w.write_u32::<LittleEndian>(v)?;
        }
        if batch.with_starts {
            let start = rec
                .start_col
                .ok_or_else(|| Error::State("batch keeps starts but a record has none".into()))?;
            w.write_u32::<LittleEndian>(start)?;
        }
    }
    Ok(())
}

pub fn read_batch<R: Read>(r: &mut R, with_starts: bool) -> Result<SmemBatchInput> {
    let q = r
        .read_u32::<LittleEndian>()
        .map_err(|e| truncated(e, "batch header"))?;
    let n = r
        .read_u64::<LittleEndian>()
        .map_err(|e| truncated(e, "batch header"))?;
    let mut records = Vec::new();
    for _ in 0..n {
        let mut f = [0u32; 5];
        for v in &mut f {
            *v = r
                .read_u32::<LittleEndian>()
                .map_err(|e| truncated(e, "record"))?;
        }
        let start_col = if with_starts {
            Some(
                r.read_u32::<LittleEndian>()
                    .map_err(|e| truncated(e, "record"))?,
            )
        } else {
            None
        };
        records.push(SmemRecord {
            query_id: f[0],
            end_col: f[1],
            lo: f[2],
            hi: f[3],
            last_hap_id: f[4],
            start_col,
        });
    }
    expect_eof(r)?;
    if records.windows(2).any(|w| w[0].end_col > w[1].end_col) {
        return Err(Error::Corruption(
            "batch records are not sorted by end column".into(),
        ));
    }
    Ok(SmemBatchInput {
        records,
        q,
        with_starts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::build_index;
    use crate::panel::parse_panel;

    fn toy() -> PbwtIndex {
        build_index(&parse_panel("0110\n1010\n0011\n").unwrap())
    }

    #[test]
    fn index_layout() {
        let idx = build_index(&parse_panel("01\n01\n").unwrap());
        let mut buf = Vec::new();
        write_index(&mut buf, &idx).unwrap();
        let mut want = b"PBWTBAT1".to_vec();
        want.extend([2, 0, 0, 0, 2, 0, 0, 0, 2]);
        want.extend([1, 0, 0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0]);
        want.extend([1, 0, 0, 0, 1, 2, 0, 0, 0, 1, 0, 0, 0]);
        want.extend([2, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(buf, want);
        assert_eq!(read_index(&mut buf.as_slice()).unwrap(), idx);
    }

    #[test]
    fn index_corruption_is_detected() {
        let mut buf = Vec::new();
        write_index(&mut buf, &toy()).unwrap();

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(
            read_index(&mut bad.as_slice()),
            Err(Error::Corruption(_))
        ));

        let mut bad = buf.clone();
        let n = bad.len();
        bad[n - 8] ^= 1;
        assert!(matches!(
            read_index(&mut bad.as_slice()),
            Err(Error::Corruption(_))
        ));

        let bad = &buf[..buf.len() - 3];
        assert!(matches!(
            read_index(&mut &bad[..]),
            Err(Error::Corruption(_))
        ));

        let mut bad = buf.clone();
        bad.push(0);
        assert!(matches!(
            read_index(&mut bad.as_slice()),
            Err(Error::Corruption(_))
        ));
    }

    #[test]
    fn batch_layout() {
        let rec = SmemRecord {
            query_id: 1,
            end_col: 7,
            lo: 1,
            hi: 2,
            last_hap_id: 7,
            start_col: Some(5),
        };
        let batch = SmemBatchInput {
            records: vec![rec],
            q: 1,
            with_starts: true,
        };
        let mut buf = Vec::new();
        write_batch(&mut buf, &batch).unwrap();
        assert_eq!(buf.len(), 4 + 8 + 24);
        assert_eq!(read_batch(&mut buf.as_slice(), true).unwrap(), batch);
        assert!(read_batch(&mut buf.as_slice(), false).is_err());

        let plain = SmemBatchInput {
            with_starts: false,
            records: vec![SmemRecord {
                start_col: None,
                ..rec
            }],
            q: 1,
        };
        buf.clear();
        write_batch(&mut buf, &plain).unwrap();
        assert_eq!(buf.len(), 4 + 8 + 20);
        assert_eq!(read_batch(&mut buf.as_slice(), false).unwrap(), plain);
    }
}
