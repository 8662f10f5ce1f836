//! Binary spinor-field checkpoints with integrity hashing.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic   8 B   "SGCKPT\x00\x01" (format + version)
//! shape   3 × u64
//! extent  3 × f64   internal length units
//! time    f64       internal time of the stored state
//! step    u64       completed propagation steps
//! up      shape-product × (f64 re, f64 im)
//! dn      shape-product × (f64 re, f64 im)
//! digest  32 B      SHA-256 over every preceding byte
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::error::{Result, SgiError};
use crate::grid::Grid;
use crate::spinor::SpinorField;

const MAGIC: [u8; 8] = *b"SGCKPT\x00\x01";

/// Conventional checkpoint file name for a given completed-step count.
pub fn checkpoint_path(dir: &Path, step: u64) -> PathBuf {
    dir.join(format!("ckpt_{step:010}.bin"))
}

/// Writer that hashes everything it forwards.
struct HashingWriter<W: Write> {
    inner: W,
    hasher: Sha256,
}

impl<W: Write> HashingWriter<W> {
    fn put(&mut self, bytes: &[u8]) -> Result<()> {
        self.hasher.update(bytes);
        self.inner.write_all(bytes)?;
        Ok(())
    }
}

/// Write `field` (with its absolute completed-step count) to `path`
/// atomically: the data goes to a temporary sibling first and is renamed
/// into place only after a successful flush.
pub fn write_checkpoint(path: &Path, field: &SpinorField, step: u64) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let file = File::create(&tmp)?;
        let mut w = HashingWriter {
            inner: BufWriter::new(file),
            hasher: Sha256::new(),
        };
        w.put(&MAGIC)?;
        for ax in 0..3 {
            w.put(&(field.grid.shape[ax] as u64).to_le_bytes())?;
        }
        for ax in 0..3 {
            w.put(&field.grid.extent[ax].to_le_bytes())?;
        }
        w.put(&field.time.to_le_bytes())?;
        w.put(&step.to_le_bytes())?;
        let mut buf = Vec::with_capacity(16 * 4096);
        for comp in [&field.up, &field.dn] {
            for chunk in comp.chunks(4096) {
                buf.clear();
                for amp in chunk {
                    buf.extend_from_slice(&amp.re.to_le_bytes());
                    buf.extend_from_slice(&amp.im.to_le_bytes());
                }
                w.put(&buf)?;
            }
        }
        let digest = w.hasher.finalize();
        w.inner.write_all(&digest)?;
        w.inner.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn read_exact_hashed<R: Read>(r: &mut R, hasher: &mut Sha256, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf)
        .map_err(|e| SgiError::Checkpoint(format!("truncated checkpoint: {e}")))?;
    hasher.update(&*buf);
    Ok(())
}

/// Read a checkpoint, verify its digest, and reconstruct the field and the
/// completed-step count.
pub fn read_checkpoint(path: &Path) -> Result<(SpinorField, u64)> {
    let file = File::open(path)?;
    let mut r = BufReader::new(file);
    let mut hasher = Sha256::new();

    let mut magic = [0u8; 8];
    read_exact_hashed(&mut r, &mut hasher, &mut magic)?;
    if magic != MAGIC {
        return Err(SgiError::Checkpoint(format!(
            "{}: not a checkpoint file (bad magic)",
            path.display()
        )));
    }
    let mut u64buf = [0u8; 8];
    let mut shape = [0usize; 3];
    for s in &mut shape {
        read_exact_hashed(&mut r, &mut hasher, &mut u64buf)?;
        let v = u64::from_le_bytes(u64buf);
        if v == 0 || v > (1 << 32) {
            return Err(SgiError::Checkpoint(format!("implausible grid size {v}")));
        }
        *s = v as usize;
    }
    let mut extent = [0f64; 3];
    for e in &mut extent {
        read_exact_hashed(&mut r, &mut hasher, &mut u64buf)?;
        *e = f64::from_le_bytes(u64buf);
    }
    read_exact_hashed(&mut r, &mut hasher, &mut u64buf)?;
    let time = f64::from_le_bytes(u64buf);
    read_exact_hashed(&mut r, &mut hasher, &mut u64buf)?;
    let step = u64::from_le_bytes(u64buf);

    let grid = Grid::box3(shape, extent)?;
    let n = grid.len();
    let mut components = Vec::with_capacity(2);
    let mut raw = vec![0u8; 16 * 4096];
    for _ in 0..2 {
        let mut comp = Vec::with_capacity(n);
        let mut left = n;
        while left > 0 {
            let take = left.min(4096);
            let buf = &mut raw[..16 * take];
            read_exact_hashed(&mut r, &mut hasher, buf)?;
            for pair in buf.chunks_exact(16) {
                let re = f64::from_le_bytes(pair[..8].try_into().unwrap());
                let im = f64::from_le_bytes(pair[8..].try_into().unwrap());
                comp.push(Complex64::new(re, im));
            }
            left -= take;
        }
        components.push(comp);
    }
    let expected = hasher.finalize();
    let mut digest = [0u8; 32];
    r.read_exact(&mut digest)
        .map_err(|e| SgiError::Checkpoint(format!("truncated digest: {e}")))?;
    if digest[..] != expected[..] {
        return Err(SgiError::Checkpoint(format!(
            "{}: integrity check failed",
            path.display()
        )));
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(SgiError::Checkpoint(format!(
            "{}: trailing bytes after digest",
            path.display()
        )));
    }

    let dn = components.pop().unwrap();
    let up = components.pop().unwrap();
    let field = SpinorField {
        grid,
        up,
        dn,
        time,
    };
    field.check_finite()?;
    Ok((field, step))
}

/// Most advanced checkpoint in a directory, judged by the step encoded in
/// the file name.
pub fn latest_checkpoint(dir: &Path) -> Result<Option<(PathBuf, u64)>> {
    let mut best: Option<(PathBuf, u64)> = None;
    if !dir.exists() {
        return Ok(None);
    }
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        let Some(step) = name
            .strip_prefix("ckpt_")
            .and_then(|s| s.strip_suffix(".bin"))
            .and_then(|s| s.parse::<u64>().ok())
        else {
            continue;
        };
        if best.as_ref().is_none_or(|(_, b)| step > *b) {
            best = Some((path, step));
        }
    }
    Ok(best)
}
