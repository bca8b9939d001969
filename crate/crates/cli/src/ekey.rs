//! On-disk equivalent key: three files, each with an 8-byte header
//! (`EKY1`, rows as u16 LE, cols as u16 LE) followed by the payload.
//! The selector and keystream use one byte per step and the position map
//! uses one u32 LE per slot.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use chaoscrack::{ByteKeystream, ChannelSelector, EquivalentKey, RankPermutation};

use crate::write_atomic;

pub const MAGIC: &[u8; 4] = b"EKY1";
pub const SELECTOR_FILE: &str = "selector.eky";
pub const KEYSTREAM_FILE: &str = "keystream.eky";
pub const POSMAP_FILE: &str = "posmap.eky";

fn header(rows: usize, cols: usize) -> Result<Vec<u8>> {
    let r = u16::try_from(rows).context("rows do not fit in 16 bits")?;
    let c = u16::try_from(cols).context("cols do not fit in 16 bits")?;
    let mut out = MAGIC.to_vec();
    out.extend_from_slice(&r.to_le_bytes());
    out.extend_from_slice(&c.to_le_bytes());
    Ok(out)
}

pub fn encode(ek: &EquivalentKey) -> Result<[Vec<u8>; 3]> {
    let (rows, cols) = ek.dims();
    let head = header(rows, cols)?;
    let mut selector = head.clone();
    selector.extend_from_slice(ek.selector().as_slice());
    let mut keystream = head.clone();
    keystream.extend_from_slice(ek.keystream().as_slice());
    let mut posmap = head;
    for &v in ek.posmap().as_slice() {
        posmap.extend_from_slice(&(v as u32).to_le_bytes());
    }
    Ok([selector, keystream, posmap])
}

fn split<'a>(bytes: &'a [u8], what: &str) -> Result<((usize, usize), &'a [u8])> {
    ensure!(bytes.len() >= 8, "{what}: shorter than the 8-byte header");
    ensure!(&bytes[..4] == MAGIC, "{what}: bad magic {:?}", &bytes[..4]);
    let rows = u16::from_le_bytes([bytes[4], bytes[5]]) as usize;
    let cols = u16::from_le_bytes([bytes[6], bytes[7]]) as usize;
    Ok(((rows, cols), &bytes[8..]))
}

pub fn decode(selector: &[u8], keystream: &[u8], posmap: &[u8]) -> Result<EquivalentKey> {
    let (dims, y) = split(selector, "selector")?;
    let (dz, z) = split(keystream, "keystream")?;
    let (dp, p) = split(posmap, "posmap")?;
    if dz != dims || dp != dims {
        bail!("equivalent key files disagree on dimensions: {dims:?}, {dz:?}, {dp:?}");
    }
    let (rows, cols) = dims;
    let slots = 3 * rows * cols;
    ensure!(y.len() == slots, "selector: {} bytes, expected {slots}", y.len());
    ensure!(z.len() == slots, "keystream: {} bytes, expected {slots}", z.len());
    ensure!(p.len() == 4 * slots, "posmap: {} bytes, expected {}", p.len(), 4 * slots);
    let selector = ChannelSelector::new(y.to_vec(), rows * cols).context("selector")?;
    let posmap = p
        .chunks_exact(4)
        .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as usize)
        .collect();
    let posmap = RankPermutation::new(posmap).context("posmap")?;
    Ok(EquivalentKey::new(rows, cols, selector, ByteKeystream::new(z.to_vec()), posmap)?)
}

pub fn save(dir: &Path, ek: &EquivalentKey) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let names = [SELECTOR_FILE, KEYSTREAM_FILE, POSMAP_FILE];
    let mut paths = Vec::new();
    for (name, bytes) in names.iter().zip(encode(ek)?) {
        let path = dir.join(name);
        write_atomic(&path, &bytes)?;
        paths.push(path);
    }
    Ok(paths)
}

pub fn load(dir: &Path) -> Result<EquivalentKey> {
    let read = |name: &str| {
        let path = dir.join(name);
        std::fs::read(&path).with_context(|| format!("reading {}", path.display()))
    };
    decode(&read(SELECTOR_FILE)?, &read(KEYSTREAM_FILE)?, &read(POSMAP_FILE)?)
}
