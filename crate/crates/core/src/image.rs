use crate::error::{Error, Result};

/// An `rows x cols x 3` byte volume, stored channel-major:
/// slot `(i, j, k)` lives at `k * rows * cols + i * cols + j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColourImage {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl ColourImage {
    pub fn new(rows: usize, cols: usize, data: Vec<u8>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::dims("nonzero rows and cols", format!("{rows}x{cols}")));
        }
        let want = 3 * rows * cols;
        if data.len() != want {
            return Err(Error::dims(format!("{want} bytes"), format!("{} bytes", data.len())));
        }
        Ok(ColourImage { rows, cols, data })
    }

    /// Every slot set to `value`.
    pub fn solid(rows: usize, cols: usize, value: u8) -> Result<Self> {
        Self::new(rows, cols, vec![value; 3 * rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Pixels per channel.
    pub fn pixel_count(&self) -> usize {
        self.rows * self.cols
    }

    /// Total slot count, `3 * rows * cols`.
    pub fn slot_count(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i < self.rows && j < self.cols && k < 3);
        k * self.rows * self.cols + i * self.cols + j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> u8 {
        self.data[self.index(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: u8) {
        let p = self.index(i, j, k);
        self.data[p] = v;
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn as_bytes_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.data
    }

    pub(crate) fn blank_like(&self) -> Self {
        ColourImage {
            rows: self.rows,
            cols: self.cols,
            data: vec![0; self.data.len()],
        }
    }

    pub(crate) fn expect_dims(&self, rows: usize, cols: usize) -> Result<()> {
        if self.dims() != (rows, cols) {
            return Err(Error::dims(
                format!("{rows}x{cols}"),
                format!("{}x{}", self.rows, self.cols),
            ));
        }
        Ok(())
    }
}
