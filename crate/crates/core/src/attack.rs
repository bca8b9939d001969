//! Chosen-plaintext recovery of an equivalent key.
//!
//! Solid images pass through both permutations unchanged, so two solid
//! plaintexts `d1` and `d2` expose the substitution alone. Their ciphertext
//! difference at the `l`-th scheduled slot is `(2l + 1)(d1 - d2) mod 256`,
//! which pins down the channel selector one step at a time; the keystream
//! then follows from the `d1` ciphertext by back-substitution. With the
//! substitution stripped, what remains is a fixed slot permutation, read off
//! from a few probe images whose bytes spell out each slot's index.

use std::time::{Duration, Instant};

use num_traits::{Float, FromPrimitive};

use crate::cipher::{encrypt_with, unsubstitute};
use crate::error::{Error, Result};
use crate::image::ColourImage;
use crate::keystream::{build_schedule, derive_all, ByteKeystream, ChannelSelector, KeyMaterial, ScanSchedule, SecretKey};
use crate::permutation::RankPermutation;
use crate::scalar::ChaosFloat;

/// Least period of `l -> (2l + 1) d mod 256`, i.e. `128 / gcd(d, 256)`.
pub fn difference_period(d: i32) -> Result<u32> {
    let r = d.rem_euclid(256) as u32;
    if r == 0 {
        return Err(Error::InvalidDifference(d));
    }
    Ok(128 / gcd(r, 256))
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The two solid values used to recover the selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DifferenceParams {
    d1: u8,
    d2: u8,
    d: i32,
    period: u32,
}

impl DifferenceParams {
    /// Rejects `d1 == d2` and `d1 - d2 = ±128`, whose progressions are constant.
    pub fn new(d1: u8, d2: u8) -> Result<Self> {
        let d = d1 as i32 - d2 as i32;
        let period = difference_period(d)?;
        if period == 1 {
            return Err(Error::InvalidDifference(d));
        }
        Ok(DifferenceParams { d1, d2, d, period })
    }

    pub fn d1(&self) -> u8 {
        self.d1
    }

    pub fn d2(&self) -> u8 {
        self.d2
    }

    pub fn difference(&self) -> i32 {
        self.d
    }

    pub fn period(&self) -> u32 {
        self.period
    }

    /// Expected ciphertext difference at step `l`.
    #[inline]
    pub fn expected(&self, l: usize) -> u8 {
        ((2 * l + 1) as u8).wrapping_mul(self.d.rem_euclid(256) as u8)
    }
}

impl Default for DifferenceParams {
    fn default() -> Self {
        DifferenceParams::new(127, 0).expect("127 is a valid difference")
    }
}

/// Recovers `Y` from ciphertexts of the solid images `d1` and `d2`.
///
/// At each step, the candidates are the channels that still have pixels
/// left and whose next raster slot carries the expected difference. Exactly
/// one candidate is required; otherwise the step is reported as ambiguous.
pub fn recover_selector(
    c1: &ColourImage,
    c2: &ColourImage,
    params: &DifferenceParams,
) -> Result<ChannelSelector> {
    let (m, n) = c1.dims();
    c2.expect_dims(m, n)?;
    let mn = m * n;
    let diff: Vec<u8> = c1
        .as_bytes()
        .iter()
        .zip(c2.as_bytes())
        .map(|(a, b)| a.wrapping_sub(*b))
        .collect();

    let mut filled = [0usize; 3];
    let mut y = Vec::with_capacity(3 * mn);
    for l in 0..3 * mn {
        let want = params.expected(l);
        let mut candidates = (0..3u8).filter(|&k| {
            let c = filled[k as usize];
            c < mn && diff[k as usize * mn + c] == want
        });
        match (candidates.next(), candidates.next()) {
            (Some(k), None) => {
                filled[k as usize] += 1;
                y.push(k);
            }
            (first, second) => {
                let candidates = first.into_iter().chain(second).chain(candidates).collect();
                return Err(Error::AmbiguousChannel { step: l, candidates });
            }
        }
    }
    ChannelSelector::new(y, mn)
}

/// Recovers `Z` from the ciphertext `c1` of the solid image `d1`, given the
/// correct selector.
pub fn recover_byte_keystream(c1: &ColourImage, d1: u8, yhat: &ChannelSelector) -> Result<ByteKeystream> {
    let (m, n) = c1.dims();
    let sched = build_schedule(yhat, m, n)?;
    let c = c1.as_bytes();
    let mut z = Vec::with_capacity(c.len());
    let mut prev: Option<usize> = None;
    for p in sched.positions() {
        let v = match prev {
            None => c[p].wrapping_sub(d1),
            Some(q) => c[p].wrapping_sub(d1.wrapping_mul(2)).wrapping_sub(c[q]),
        };
        z.push(v);
        prev = Some(p);
    }
    Ok(ByteKeystream::new(z))
}

/// Number of probe images for `slots` slots: `ceil(ceil(log2(slots)) / 8)`, at least one.
pub fn probe_count(slots: usize) -> usize {
    let bits = if slots <= 1 {
        0
    } else {
        (usize::BITS - (slots - 1).leading_zeros()) as usize
    };
    bits.div_ceil(8).max(1)
}

/// Probe `q` holds byte `q` (little-endian) of each slot's linear index.
pub fn build_permutation_probes(rows: usize, cols: usize) -> Result<Vec<ColourImage>> {
    let slots = 3 * rows * cols;
    (0..probe_count(slots))
        .map(|q| {
            let data = (0..slots).map(|p| (p >> (8 * q)) as u8).collect();
            ColourImage::new(rows, cols, data)
        })
        .collect()
}

/// Decodes the stripped probes into `posmap`, with `posmap[q]` the plaintext
/// slot that ends up at slot `q` after both permutations.
pub fn recover_position_map(stripped: &[ColourImage], rows: usize, cols: usize) -> Result<RankPermutation> {
    let slots = 3 * rows * cols;
    let want = probe_count(slots);
    if stripped.len() != want {
        return Err(Error::dims(format!("{want} probes"), stripped.len()));
    }
    for probe in stripped {
        probe.expect_dims(rows, cols)?;
    }
    let mut map = vec![0usize; slots];
    for (b, probe) in stripped.iter().enumerate() {
        for (m, &v) in map.iter_mut().zip(probe.as_bytes()) {
            *m |= (v as usize) << (8 * b);
        }
    }
    RankPermutation::new(map).map_err(|e| match e {
        Error::InvalidPermutation(msg) => Error::NotABijection(msg),
        e => e,
    })
}

/// Chosen-plaintext access to a cipher under a fixed hidden key.
pub trait EncryptionOracle {
    fn dims(&self) -> (usize, usize);
    fn query(&mut self, plain: &ColourImage) -> Result<ColourImage>;
}

/// In-process oracle holding a secret key; counts the queries it answers.
#[derive(Debug, Clone)]
pub struct KeyedOracle {
    rows: usize,
    cols: usize,
    material: KeyMaterial,
    queries: usize,
}

impl KeyedOracle {
    pub fn new<F: ChaosFloat>(key: &SecretKey<F>, rows: usize, cols: usize) -> Result<Self> {
        Ok(KeyedOracle {
            rows,
            cols,
            material: derive_all(key, rows, cols)?,
            queries: 0,
        })
    }

    pub fn queries(&self) -> usize {
        self.queries
    }
}

impl EncryptionOracle for KeyedOracle {
    fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    fn query(&mut self, plain: &ColourImage) -> Result<ColourImage> {
        plain.expect_dims(self.rows, self.cols)?;
        self.queries += 1;
        encrypt_with(plain, &self.material)
    }
}

/// Recovered material that decrypts like the hidden key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalentKey {
    rows: usize,
    cols: usize,
    selector: ChannelSelector,
    keystream: ByteKeystream,
    posmap: RankPermutation,
}

impl EquivalentKey {
    pub fn new(
        rows: usize,
        cols: usize,
        selector: ChannelSelector,
        keystream: ByteKeystream,
        posmap: RankPermutation,
    ) -> Result<Self> {
        let slots = 3 * rows * cols;
        if rows == 0 || cols == 0 {
            return Err(Error::dims("nonzero rows and cols", format!("{rows}x{cols}")));
        }
        if selector.pixel_count() != rows * cols || keystream.len() != slots || posmap.len() != slots {
            return Err(Error::dims(
                format!("{slots} slots"),
                format!(
                    "selector {}, keystream {}, posmap {}",
                    selector.len(),
                    keystream.len(),
                    posmap.len()
                ),
            ));
        }
        Ok(EquivalentKey {
            rows,
            cols,
            selector,
            keystream,
            posmap,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn selector(&self) -> &ChannelSelector {
        &self.selector
    }

    pub fn keystream(&self) -> &ByteKeystream {
        &self.keystream
    }

    pub fn posmap(&self) -> &RankPermutation {
        &self.posmap
    }

    pub fn schedule(&self) -> ScanSchedule {
        build_schedule(&self.selector, self.rows, self.cols).expect("selector sized at construction")
    }
}

/// Wall-clock time of each attack stage, in execution order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StageTimings {
    pub selector: Duration,
    pub keystream: Duration,
    pub posmap: Duration,
}

#[derive(Debug, Clone)]
pub struct AttackTrace {
    pub key: EquivalentKey,
    /// Chosen plaintexts submitted to the oracle.
    pub queries: usize,
    pub timings: StageTimings,
}

pub fn run_attack<O: EncryptionOracle + ?Sized>(oracle: &mut O, params: &DifferenceParams) -> Result<EquivalentKey> {
    run_attack_traced(oracle, params).map(|t| t.key)
}

/// Like [`run_attack`], also reporting query count and stage timings.
pub fn run_attack_traced<O: EncryptionOracle + ?Sized>(
    oracle: &mut O,
    params: &DifferenceParams,
) -> Result<AttackTrace> {
    let (m, n) = oracle.dims();
    let mut queries = 0;
    let mut ask = |oracle: &mut O, img: &ColourImage| {
        queries += 1;
        let c = oracle.query(img)?;
        c.expect_dims(m, n)?;
        Ok::<_, Error>(c)
    };

    let started = Instant::now();
    let c1 = ask(oracle, &ColourImage::solid(m, n, params.d1())?)?;
    let c2 = ask(oracle, &ColourImage::solid(m, n, params.d2())?)?;
    let selector = recover_selector(&c1, &c2, params)?;
    let t_selector = started.elapsed();

    let started = Instant::now();
    let keystream = recover_byte_keystream(&c1, params.d1(), &selector)?;
    let sched = build_schedule(&selector, m, n)?;
    let t_keystream = started.elapsed();

    let started = Instant::now();
    let stripped = build_permutation_probes(m, n)?
        .iter()
        .map(|probe| unsubstitute(&ask(oracle, probe)?, &sched, &keystream))
        .collect::<Result<Vec<_>>>()?;
    let posmap = recover_position_map(&stripped, m, n)?;
    let t_posmap = started.elapsed();

    Ok(AttackTrace {
        key: EquivalentKey::new(m, n, selector, keystream, posmap)?,
        queries,
        timings: StageTimings {
            selector: t_selector,
            keystream: t_keystream,
            posmap: t_posmap,
        },
    })
}

/// Decrypts `c` with an equivalent key: strip the substitution, then put
/// each byte back at its plaintext slot.
pub fn break_ciphertext(c: &ColourImage, ek: &EquivalentKey) -> Result<ColourImage> {
    c.expect_dims(ek.rows, ek.cols)?;
    let stripped = unsubstitute(c, &ek.schedule(), &ek.keystream)?;
    let mut plain = stripped.clone();
    let out = plain.as_bytes_mut();
    for (q, &v) in stripped.as_bytes().iter().enumerate() {
        out[ek.posmap[q]] = v;
    }
    Ok(plain)
}

/// Upper bound on the chance that selector recovery hits an ambiguous step:
/// `sum_{k=1}^{floor(2 mn / T)} (3 mn - k T) (2/3)^(k T) / 3`, summed in
/// ascending `k`.
pub fn failure_probability_bound<F: Float + FromPrimitive>(mn: u64, period: u32) -> F {
    let cast = |v: u64| F::from_u64(v).expect("count representable");
    let two_thirds = cast(2) / cast(3);
    let third = F::one() / cast(3);
    let t = period as u64;
    let mut sum = F::zero();
    for k in 1..=(2 * mn) / t {
        let e = k * t;
        let power = match i32::try_from(e) {
            Ok(e) => two_thirds.powi(e),
            Err(_) => F::zero(),
        };
        if power == F::zero() {
            // all later terms underflow as well
            break;
        }
        sum = sum + cast(3 * mn - e) * (power * third);
    }
    sum
}
