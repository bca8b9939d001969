//! The three encryption stages and their inverses.
//!
//! Row permutation: `out(i, j, k) = in(t[kM+i] mod M, j, t[kM+i] / M)`.
//! Column permutation: `out(i, j, k) = in(i, u mod N, u / N)` with `u = t*_i[kN+j]`.
//! Substitution walks the scan schedule; each step adds the keystream byte
//! plus the previous step's plain and cipher values, modulo 256.

use crate::error::{Error, Result};
use crate::image::ColourImage;
use crate::keystream::{derive_all, ByteKeystream, KeyMaterial, ScanSchedule, SecretKey};
use crate::permutation::RankPermutation;
use crate::scalar::ChaosFloat;

/// Row table of length `3M` and `M` column tables of length `3N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationTables {
    rows: RankPermutation,
    cols: Vec<RankPermutation>,
}

impl PermutationTables {
    pub fn new(
        row_table: RankPermutation,
        col_tables: Vec<RankPermutation>,
        rows: usize,
        cols: usize,
    ) -> Result<Self> {
        check_row_table(&row_table, rows)?;
        check_col_tables(&col_tables, rows, cols)?;
        Ok(PermutationTables {
            rows: row_table,
            cols: col_tables,
        })
    }

    pub fn identity(rows: usize, cols: usize) -> Self {
        PermutationTables {
            rows: RankPermutation::identity(3 * rows),
            cols: vec![RankPermutation::identity(3 * cols); rows],
        }
    }

    pub fn row_table(&self) -> &RankPermutation {
        &self.rows
    }

    pub fn col_tables(&self) -> &[RankPermutation] {
        &self.cols
    }

    /// Source slot for every destination slot of `column_permute(row_permute(.))`.
    pub fn combined_source_map(&self, rows: usize, cols: usize) -> Vec<usize> {
        let mn = rows * cols;
        let mut map = vec![0; 3 * mn];
        for i in 0..rows {
            for k in 0..3 {
                for j in 0..cols {
                    let u = self.cols[i][k * cols + j];
                    let (j2, k2) = (u % cols, u / cols);
                    let v = self.rows[k2 * rows + i];
                    let (i1, k1) = (v % rows, v / rows);
                    map[k * mn + i * cols + j] = k1 * mn + i1 * cols + j2;
                }
            }
        }
        map
    }
}

fn check_row_table(t: &RankPermutation, rows: usize) -> Result<()> {
    if t.len() != 3 * rows {
        return Err(Error::dims(format!("row table of {}", 3 * rows), t.len()));
    }
    Ok(())
}

fn check_col_tables(tables: &[RankPermutation], rows: usize, cols: usize) -> Result<()> {
    if tables.len() != rows {
        return Err(Error::dims(format!("{rows} column tables"), tables.len()));
    }
    if let Some(bad) = tables.iter().find(|t| t.len() != 3 * cols) {
        return Err(Error::dims(format!("column table of {}", 3 * cols), bad.len()));
    }
    Ok(())
}

pub fn row_permute(img: &ColourImage, t: &RankPermutation) -> Result<ColourImage> {
    let (m, n) = img.dims();
    check_row_table(t, m)?;
    let mut out = img.blank_like();
    for k in 0..3 {
        for i in 0..m {
            let v = t[k * m + i];
            let src = img.index(v % m, 0, v / m);
            let dst = out.index(i, 0, k);
            out.as_bytes_mut()[dst..dst + n].copy_from_slice(&img.as_bytes()[src..src + n]);
        }
    }
    Ok(out)
}

pub fn row_unpermute(img: &ColourImage, t: &RankPermutation) -> Result<ColourImage> {
    let (m, n) = img.dims();
    check_row_table(t, m)?;
    let mut out = img.blank_like();
    for k in 0..3 {
        for i in 0..m {
            let v = t[k * m + i];
            let dst = out.index(v % m, 0, v / m);
            let src = img.index(i, 0, k);
            out.as_bytes_mut()[dst..dst + n].copy_from_slice(&img.as_bytes()[src..src + n]);
        }
    }
    Ok(out)
}

pub fn column_permute(img: &ColourImage, tstar: &[RankPermutation]) -> Result<ColourImage> {
    let (m, n) = img.dims();
    check_col_tables(tstar, m, n)?;
    let mut out = img.blank_like();
    for (i, row) in tstar.iter().enumerate() {
        for k in 0..3 {
            for j in 0..n {
                let u = row[k * n + j];
                out.set(i, j, k, img.get(i, u % n, u / n));
            }
        }
    }
    Ok(out)
}

pub fn column_unpermute(img: &ColourImage, tstar: &[RankPermutation]) -> Result<ColourImage> {
    let (m, n) = img.dims();
    check_col_tables(tstar, m, n)?;
    let mut out = img.blank_like();
    for (i, row) in tstar.iter().enumerate() {
        for k in 0..3 {
            for j in 0..n {
                let u = row[k * n + j];
                out.set(i, u % n, u / n, img.get(i, j, k));
            }
        }
    }
    Ok(out)
}

fn check_stream(img: &ColourImage, sched: &ScanSchedule, z: &ByteKeystream) -> Result<()> {
    let (m, n) = sched.dims();
    img.expect_dims(m, n)?;
    if z.len() != img.slot_count() {
        return Err(Error::dims(format!("keystream of {}", img.slot_count()), z.len()));
    }
    Ok(())
}

pub fn substitute(img: &ColourImage, sched: &ScanSchedule, z: &ByteKeystream) -> Result<ColourImage> {
    check_stream(img, sched, z)?;
    let plain = img.as_bytes();
    let mut out = img.blank_like();
    let cipher = out.as_bytes_mut();
    let mut prev: Option<usize> = None;
    for (p, &zl) in sched.positions().zip(z.as_slice()) {
        let mut c = plain[p].wrapping_add(zl);
        if let Some(q) = prev {
            c = c.wrapping_add(plain[q]).wrapping_add(cipher[q]);
        }
        cipher[p] = c;
        prev = Some(p);
    }
    Ok(out)
}

pub fn unsubstitute(img: &ColourImage, sched: &ScanSchedule, z: &ByteKeystream) -> Result<ColourImage> {
    check_stream(img, sched, z)?;
    let cipher = img.as_bytes();
    let mut out = img.blank_like();
    let plain = out.as_bytes_mut();
    let mut prev: Option<usize> = None;
    for (p, &zl) in sched.positions().zip(z.as_slice()) {
        let mut v = cipher[p].wrapping_sub(zl);
        if let Some(q) = prev {
            v = v.wrapping_sub(plain[q]).wrapping_sub(cipher[q]);
        }
        plain[p] = v;
        prev = Some(p);
    }
    Ok(out)
}

pub fn encrypt<F: ChaosFloat>(img: &ColourImage, key: &SecretKey<F>) -> Result<ColourImage> {
    encrypt_with(img, &derive_all(key, img.rows(), img.cols())?)
}

pub fn decrypt<F: ChaosFloat>(img: &ColourImage, key: &SecretKey<F>) -> Result<ColourImage> {
    decrypt_with(img, &derive_all(key, img.rows(), img.cols())?)
}

/// Encrypts with pre-derived material, e.g. to reuse it across many images.
pub fn encrypt_with(img: &ColourImage, km: &KeyMaterial) -> Result<ColourImage> {
    let shuffled = row_permute(img, km.tables.row_table())?;
    let shuffled = column_permute(&shuffled, km.tables.col_tables())?;
    substitute(&shuffled, &km.schedule, &km.keystream)
}

pub fn decrypt_with(img: &ColourImage, km: &KeyMaterial) -> Result<ColourImage> {
    let shuffled = unsubstitute(img, &km.schedule, &km.keystream)?;
    let shuffled = column_unpermute(&shuffled, km.tables.col_tables())?;
    row_unpermute(&shuffled, km.tables.row_table())
}
