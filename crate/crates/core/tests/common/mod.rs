//! Straight-line reference implementation used as a test oracle. It shares
//! no code with the library: images are `[i][j][k]` nested vectors and every
//! stage is a literal transcription of the index formulas.
#![allow(dead_code, clippy::needless_range_loop)]

use chaoscrack::{ColourImage, SecretKey};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type Pixels = Vec<Vec<[u8; 3]>>;

pub struct Reference {
    pub t: Vec<usize>,
    pub tstar: Vec<Vec<usize>>,
    pub y: Vec<u8>,
    pub z: Vec<u8>,
    pub raw_y: Vec<u8>,
}

fn orbit(x0: f64, mu: f64, burn: u64, n: usize) -> Vec<f64> {
    let mut x = x0;
    for _ in 0..burn {
        x = mu * x * (1.0 - x);
    }
    let mut out = Vec::new();
    for _ in 0..n {
        x = mu * x * (1.0 - x);
        out.push(x);
    }
    out
}

fn ranks(v: &[f64]) -> Vec<usize> {
    // selection by repeated maximum; first index wins on ties
    let mut used = vec![false; v.len()];
    let mut out = Vec::new();
    for _ in 0..v.len() {
        let mut best = usize::MAX;
        for i in 0..v.len() {
            if !used[i] && (best == usize::MAX || v[i] > v[best]) {
                best = i;
            }
        }
        used[best] = true;
        out.push(best);
    }
    out
}

fn ranks_fast(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].partial_cmp(&v[a]).unwrap().then(a.cmp(&b)));
    idx
}

impl Reference {
    pub fn derive(key: &SecretKey, m: usize, n: usize) -> Reference {
        let mn = m * n;
        let xr = orbit(key.x0, key.mu0, key.m1, 3 * m);
        let xs = orbit(key.x0s, key.mu0s, key.m2, 3 * mn);
        let rank = if 3 * n <= 64 { ranks } else { ranks_fast };
        let t = rank(&xr);
        let tstar = (0..m).map(|i| rank(&xs[3 * i * n..3 * i * n + 3 * n])).collect();
        let raw_y: Vec<u8> = xs.iter().map(|x| ((x * 1e14).floor() as u64 % 3) as u8).collect();
        let z = xs.iter().map(|x| ((x * 1e14).floor() as u64 % 256) as u8).collect();
        let mut y = raw_y.clone();
        // the six rewrite rules, counts kept over the rewritten prefix
        let mut cnt = [0usize; 3];
        cnt[y[0] as usize] += 1;
        for l in 1..3 * mn {
            let (n0, n1, n2) = (cnt[0], cnt[1], cnt[2]);
            y[l] = match y[l] {
                0 if n0 >= mn && n1 < mn => 1,
                0 if n0 >= mn && n1 >= mn => 2,
                1 if n1 >= mn && n2 < mn => 2,
                1 if n1 >= mn && n2 >= mn => 0,
                2 if n2 >= mn && n0 < mn => 0,
                2 if n2 >= mn && n0 >= mn => 1,
                v => v,
            };
            cnt[y[l] as usize] += 1;
        }
        Reference { t, tstar, y, z, raw_y }
    }

    /// `(i, j, k)` visited at each step: the `c`-th pixel of channel `Y_l`.
    pub fn schedule(&self, n: usize) -> Vec<(usize, usize, usize)> {
        let mut seen = [0usize; 3];
        self.y
            .iter()
            .map(|&k| {
                let c = seen[k as usize];
                seen[k as usize] += 1;
                (c / n, c % n, k as usize)
            })
            .collect()
    }

    pub fn encrypt(&self, img: &Pixels) -> Pixels {
        let m = img.len();
        let n = img[0].len();
        let mut a = img.clone();
        for i in 0..m {
            for j in 0..n {
                for k in 0..3 {
                    let v = self.t[k * m + i];
                    a[i][j][k] = img[v % m][j][v / m];
                }
            }
        }
        let mut b = a.clone();
        for i in 0..m {
            for j in 0..n {
                for k in 0..3 {
                    let v = self.tstar[i][k * n + j];
                    b[i][j][k] = a[i][v % n][v / n];
                }
            }
        }
        let mut c = b.clone();
        let sched = self.schedule(n);
        for l in 0..sched.len() {
            let (i, j, k) = sched[l];
            if l == 0 {
                c[i][j][k] = ((b[i][j][k] as u32 + self.z[0] as u32) % 256) as u8;
            } else {
                let (pi, pj, pk) = sched[l - 1];
                let s = b[i][j][k] as u32 + b[pi][pj][pk] as u32 + c[pi][pj][pk] as u32 + self.z[l] as u32;
                c[i][j][k] = (s % 256) as u8;
            }
        }
        c
    }

    pub fn material_digest(&self) -> String {
        let mut h = Sha256::new();
        for &v in &self.t {
            h.update((v as u32).to_le_bytes());
        }
        for row in &self.tstar {
            for &v in row {
                h.update((v as u32).to_le_bytes());
            }
        }
        h.update(&self.y);
        h.update(&self.z);
        hex::encode(h.finalize())
    }
}

pub fn to_pixels(img: &ColourImage) -> Pixels {
    (0..img.rows())
        .map(|i| {
            (0..img.cols())
                .map(|j| [img.get(i, j, 0), img.get(i, j, 1), img.get(i, j, 2)])
                .collect()
        })
        .collect()
}

pub fn from_pixels(p: &Pixels) -> ColourImage {
    let (m, n) = (p.len(), p[0].len());
    let mut img = ColourImage::solid(m, n, 0).unwrap();
    for i in 0..m {
        for j in 0..n {
            for k in 0..3 {
                img.set(i, j, k, p[i][j][k]);
            }
        }
    }
    img
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn reference_key() -> SecretKey {
    SecretKey::new(1000, 0.123456789764, 4.0, 2000, 0.567891234567, 3.999999).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_image<R: rand::Rng>(rng: &mut R, m: usize, n: usize) -> ColourImage {
    let mut data = vec![0u8; 3 * m * n];
    rng.fill(&mut data[..]);
    ColourImage::new(m, n, data).unwrap()
}

/// `(I(i,j,k) * 7 + 3) mod 256` over channel-major slot index.
pub fn ramp_image(m: usize, n: usize) -> ColourImage {
    ColourImage::new(m, n, (0..3 * m * n).map(|p| (p * 7 + 3) as u8).collect()).unwrap()
}

/// First step at which the difference progression matches more than one
/// channel, by direct scan of the window condition on the true selector.
pub fn first_ambiguous_step(y: &[u8], period: usize) -> Option<(usize, Vec<u8>)> {
    for l in 0..y.len() {
        let mut cands = vec![y[l]];
        let mut s = period;
        while l + s < y.len() {
            let window = &y[l..l + s];
            if !window.contains(&y[l + s]) {
                cands.push(y[l + s]);
            }
            s += period;
        }
        if cands.len() > 1 {
            cands.sort_unstable();
            cands.dedup();
            return Some((l, cands));
        }
    }
    None
}
