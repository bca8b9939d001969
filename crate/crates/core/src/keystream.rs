//! Key schedule: logistic-map orbits and everything derived from them.
//!
//! Two orbits are used. The first (`x0`, `mu0`, burn-in `m1`) yields `3M`
//! states whose descending rank order is the row table. The second (`x0s`,
//! `mu0s`, burn-in `m2`) yields `3MN` states; each block of `3N` gives one
//! column table, and the same states give the channel selector `Y` and the
//! byte keystream `Z` through `floor(x * 1e14)`.

use rand::Rng;

use crate::cipher::PermutationTables;
use crate::error::{Error, Result};
use crate::permutation::RankPermutation;
use crate::scalar::ChaosFloat;

/// Lower bound of the admissible control parameter range (exclusive).
pub const MU_MIN: f64 = 3.5699456;
/// Upper bound of the admissible control parameter range (inclusive).
pub const MU_MAX: f64 = 4.0;

const SCALE: f64 = 1e14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecretKey<F> {
    pub m1: u64,
    pub x0: F,
    pub mu0: F,
    pub m2: u64,
    pub x0s: F,
    pub mu0s: F,
}

impl<F: ChaosFloat> SecretKey<F> {
    pub fn new(m1: u64, x0: F, mu0: F, m2: u64, x0s: F, mu0s: F) -> Result<Self> {
        let key = SecretKey { m1, x0, mu0, m2, x0s, mu0s };
        key.validate()?;
        Ok(key)
    }

    /// Checks burn-ins are positive, states lie in (0, 1) and control
    /// parameters in (3.5699456, 4].
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: F| {
            if v > F::zero() && v < F::one() {
                Ok(())
            } else {
                Err(Error::InvalidKey(format!("{name}={v} not in (0, 1)")))
            }
        };
        let mu = |name: &str, v: F| {
            if v > F::lit(MU_MIN) && v <= F::lit(MU_MAX) {
                Ok(())
            } else {
                Err(Error::InvalidKey(format!("{name}={v} not in ({MU_MIN}, {MU_MAX}]")))
            }
        };
        if self.m1 == 0 {
            return Err(Error::InvalidKey("m1 must be at least 1".into()));
        }
        if self.m2 == 0 {
            return Err(Error::InvalidKey("m2 must be at least 1".into()));
        }
        unit("x0", self.x0)?;
        unit("x0s", self.x0s)?;
        mu("mu0", self.mu0)?;
        mu("mu0s", self.mu0s)
    }

    /// Draws a key with states in (0.01, 0.99), control parameters in
    /// [3.57, 4.0] and burn-ins in [500, 5000].
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut state = || F::lit(rng.gen_range(0.01..0.99));
        let (x0, x0s) = (state(), state());
        let mut ctrl = || F::lit(rng.gen_range(3.57..=4.0));
        let (mu0, mu0s) = (ctrl(), ctrl());
        SecretKey {
            m1: rng.gen_range(500..=5000),
            x0,
            mu0,
            m2: rng.gen_range(500..=5000),
            x0s,
            mu0s,
        }
    }
}

/// States of one logistic orbit, all strictly inside (0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct ChaoticSequence<F>(Vec<F>);

impl<F: ChaosFloat> ChaoticSequence<F> {
    pub fn new(values: Vec<F>) -> Result<Self> {
        if let Some((step, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v > F::zero() && **v < F::one()))
        {
            return Err(degenerate(step as u64, *v));
        }
        Ok(ChaoticSequence(values))
    }

    pub fn as_slice(&self) -> &[F] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn degenerate<F: ChaosFloat>(step: u64, v: F) -> Error {
    Error::DegenerateOrbit {
        step,
        value: v.to_f64().unwrap_or(f64::NAN),
    }
}

#[inline]
fn logistic<F: ChaosFloat>(x: F, mu: F) -> F {
    (mu * x) * (F::one() - x)
}

/// Applies `x -> (mu * x) * (1 - x)` `n` times. Every value the map is
/// applied to must lie in (0, 1); the returned value itself is not checked.
pub fn iterate_logistic<F: ChaosFloat>(x: F, mu: F, n: u64) -> Result<F> {
    let mut x = x;
    for step in 0..n {
        if !(x > F::zero() && x < F::one()) {
            return Err(degenerate(step, x));
        }
        x = logistic(x, mu);
    }
    Ok(x)
}

/// Returns `f^(burn_in + 1)(x0), ..., f^(burn_in + n)(x0)`.
pub fn generate_states<F: ChaosFloat>(
    x0: F,
    mu: F,
    burn_in: u64,
    n: usize,
) -> Result<ChaoticSequence<F>> {
    let mut x = iterate_logistic(x0, mu, burn_in)?;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        x = logistic(x, mu);
        out.push(x);
    }
    ChaoticSequence::new(out).map_err(|e| match e {
        Error::DegenerateOrbit { step, value } => Error::DegenerateOrbit {
            step: step + burn_in + 1,
            value,
        },
        e => e,
    })
}

pub fn rank_permutation<F: ChaosFloat>(states: &[F]) -> RankPermutation {
    RankPermutation::by_descending(states)
}

#[inline]
fn scaled<F: ChaosFloat>(x: F) -> u64 {
    // x * 1e14 < 2^53 for x in (0, 1), so the floor is exact in binary64
    (x * F::lit(SCALE))
        .floor()
        .to_u64()
        .expect("scaled state fits in u64")
}

/// `floor(x * 1e14) mod 3` per state, before balancing.
pub fn derive_raw_selector<F: ChaosFloat>(states: &[F]) -> Vec<u8> {
    states.iter().map(|&x| (scaled(x) % 3) as u8).collect()
}

/// Channel selector `Y`: `3 * mn` symbols from {0, 1, 2}, each used `mn` times.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChannelSelector {
    y: Vec<u8>,
    mn: usize,
}

impl ChannelSelector {
    /// Accepts an already balanced sequence.
    pub fn new(y: Vec<u8>, mn: usize) -> Result<Self> {
        if y.len() != 3 * mn {
            return Err(Error::dims(format!("{} symbols", 3 * mn), format!("{} symbols", y.len())));
        }
        let mut counts = [0usize; 3];
        for (l, &s) in y.iter().enumerate() {
            if s > 2 {
                return Err(Error::InvalidPermutation(format!(
                    "selector symbol {s} at {l} not in {{0, 1, 2}}"
                )));
            }
            counts[s as usize] += 1;
        }
        if counts != [mn; 3] {
            return Err(Error::InvalidPermutation(format!(
                "selector counts {counts:?} are not all {mn}"
            )));
        }
        Ok(ChannelSelector { y, mn })
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.y
    }

    pub fn pixel_count(&self) -> usize {
        self.mn
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

/// Rewrites `raw[1..]` so each symbol appears exactly `mn` times. Counts
/// are taken over the already rewritten prefix; a symbol whose quota is
/// full moves to the next symbol (cyclically) that still has room.
pub fn balance_selector(raw: &[u8], mn: usize) -> Result<ChannelSelector> {
    if raw.len() != 3 * mn || mn == 0 {
        return Err(Error::dims(format!("{} raw symbols", 3 * mn), format!("{}", raw.len())));
    }
    let mut y = Vec::with_capacity(raw.len());
    let mut n = [0usize; 3];
    for (l, &r) in raw.iter().enumerate() {
        if r > 2 {
            return Err(Error::InvalidPermutation(format!("raw symbol {r} at {l}")));
        }
        let s = if l == 0 || n[r as usize] < mn {
            r
        } else {
            let next = (r + 1) % 3;
            if n[next as usize] < mn {
                next
            } else {
                (r + 2) % 3
            }
        };
        n[s as usize] += 1;
        y.push(s);
    }
    ChannelSelector::new(y, mn)
}

/// Byte keystream `Z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ByteKeystream(Vec<u8>);

impl ByteKeystream {
    pub fn new(z: Vec<u8>) -> Self {
        ByteKeystream(z)
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `floor(x * 1e14) mod 256` per state.
pub fn derive_byte_keystream<F: ChaosFloat>(states: &[F]) -> ByteKeystream {
    ByteKeystream(states.iter().map(|&x| (scaled(x) % 256) as u8).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slot {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl From<(usize, usize, usize)> for Slot {
    fn from((i, j, k): (usize, usize, usize)) -> Self {
        Slot { i, j, k }
    }
}

/// Order in which the substitution visits the `3MN` slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanSchedule {
    rows: usize,
    cols: usize,
    slots: Vec<Slot>,
}

impl ScanSchedule {
    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Channel-major linear positions, in visiting order.
    pub fn positions(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        let mn = self.rows * self.cols;
        self.slots
            .iter()
            .map(move |s| s.k * mn + s.i * self.cols + s.j)
    }
}

/// Each channel is filled in raster order: step `l` goes to channel `Y_l`
/// at the `c`-th pixel, `c` being how often `Y_l` occurred before `l`.
pub fn build_schedule(y: &ChannelSelector, rows: usize, cols: usize) -> Result<ScanSchedule> {
    if y.pixel_count() != rows * cols {
        return Err(Error::dims(
            format!("selector for {} pixels", rows * cols),
            format!("{} pixels", y.pixel_count()),
        ));
    }
    let mut seen = [0usize; 3];
    let slots = y
        .as_slice()
        .iter()
        .map(|&k| {
            let k = k as usize;
            let c = seen[k];
            seen[k] += 1;
            Slot { i: c / cols, j: c % cols, k }
        })
        .collect();
    Ok(ScanSchedule { rows, cols, slots })
}

/// All material the cipher needs for one key and image size.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyMaterial {
    pub tables: PermutationTables,
    pub selector: ChannelSelector,
    pub keystream: ByteKeystream,
    pub schedule: ScanSchedule,
}

pub fn derive_all<F: ChaosFloat>(key: &SecretKey<F>, rows: usize, cols: usize) -> Result<KeyMaterial> {
    key.validate()?;
    if rows == 0 || cols == 0 {
        return Err(Error::dims("nonzero rows and cols", format!("{rows}x{cols}")));
    }
    let mn = rows * cols;

    let row_states = generate_states(key.x0, key.mu0, key.m1, 3 * rows)?;
    let row_table = rank_permutation(row_states.as_slice());

    let states = generate_states(key.x0s, key.mu0s, key.m2, 3 * mn)?;
    let col_tables = states
        .as_slice()
        .chunks_exact(3 * cols)
        .map(rank_permutation)
        .collect();

    let selector = balance_selector(&derive_raw_selector(states.as_slice()), mn)?;
    let keystream = derive_byte_keystream(states.as_slice());
    let schedule = build_schedule(&selector, rows, cols)?;

    Ok(KeyMaterial {
        tables: PermutationTables::new(row_table, col_tables, rows, cols)?,
        selector,
        keystream,
        schedule,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Frozen from an independent straight-line binary64 loop.
    const ITER_1000_BITS: u64 = 0x3fe205b077cb02c1;
    const STATES_6_BITS: [u64; 6] = [
        0x3fef7d23b85022f6,
        0x3fb018a47fa1ba6b,
        0x3fce2b1b20d7c208,
        0x3fe70ed7e532ce3a,
        0x3fe9c5eaa4828c37,
        0x3fe40f8faed201ff,
    ];

    #[test]
    fn logistic_small_cases() {
        assert_eq!(iterate_logistic(0.5f64, 4.0, 1).unwrap(), 1.0);
        assert!(matches!(
            iterate_logistic(0.5f64, 4.0, 2),
            Err(Error::DegenerateOrbit { step: 1, .. })
        ));
        assert_eq!(iterate_logistic(0.75f64, 4.0, 17).unwrap(), 0.75);
        assert_eq!(iterate_logistic(0.3f64, 4.0, 0).unwrap(), 0.3);
        assert_eq!(
            iterate_logistic(0.123456789764f64, 4.0, 1000).unwrap().to_bits(),
            ITER_1000_BITS
        );
    }

    #[test]
    fn states_after_burn_in() {
        assert_eq!(generate_states(0.75f64, 4.0, 5, 3).unwrap().as_slice(), &[0.75; 3]);
        let x = 0.3f64;
        assert_eq!(generate_states(x, 3.9, 0, 1).unwrap().as_slice(), &[(3.9 * x) * (1.0 - x)]);
        let bits: Vec<u64> = generate_states(0.123456789764f64, 4.0, 1000, 6)
            .unwrap()
            .as_slice()
            .iter()
            .map(|v| v.to_bits())
            .collect();
        assert_eq!(bits, STATES_6_BITS);
        assert!(matches!(
            generate_states(0.5f64, 4.0, 0, 3),
            Err(Error::DegenerateOrbit { .. })
        ));
    }

    #[test]
    fn scaled_reductions() {
        assert_eq!(derive_raw_selector(&[0.5f64, 0.25]), vec![2, 1]);
        // 0.25e14 = 25 * 2^12 * 5^12 is a multiple of 256
        assert_eq!(derive_byte_keystream(&[0.5f64, 0.25]).as_slice(), &[0, 0]);
    }

    #[test]
    fn balance_hand_traces() {
        assert_eq!(balance_selector(&[0, 0, 0, 1, 2, 2], 2).unwrap().as_slice(), &[0, 0, 1, 1, 2, 2]);
        assert_eq!(balance_selector(&[0, 1, 2], 1).unwrap().as_slice(), &[0, 1, 2]);
        assert_eq!(balance_selector(&[0; 6], 2).unwrap().as_slice(), &[0, 0, 1, 1, 2, 2]);
    }

    #[test]
    fn balance_exhaustive_small() {
        for mn in 1..=4usize {
            let len = 3 * mn;
            for code in 0..3usize.pow(len as u32) {
                let mut c = code;
                let raw: Vec<u8> = (0..len)
                    .map(|_| {
                        let d = (c % 3) as u8;
                        c /= 3;
                        d
                    })
                    .collect();
                let y = balance_selector(&raw, mn).unwrap();
                assert_eq!(y.as_slice()[0], raw[0]);
            }
        }
    }

    #[test]
    fn schedule_hand_traces() {
        let y = ChannelSelector::new(vec![0, 0, 1, 2, 1, 2], 2).unwrap();
        let s = build_schedule(&y, 1, 2).unwrap();
        let want: Vec<Slot> = [(0, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, 2), (0, 1, 1), (0, 1, 2)]
            .into_iter()
            .map(Slot::from)
            .collect();
        assert_eq!(s.slots(), &want[..]);

        let y = ChannelSelector::new(vec![0, 1, 2], 1).unwrap();
        let s = build_schedule(&y, 1, 1).unwrap();
        assert_eq!(s.positions().collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn key_validation() {
        assert!(SecretKey::new(1, 0.5, 4.0, 1, 0.5, 3.6).is_ok());
        assert!(SecretKey::new(0, 0.5, 4.0, 1, 0.5, 3.6).is_err());
        assert!(SecretKey::new(1, 1.0, 4.0, 1, 0.5, 3.6).is_err());
        assert!(SecretKey::new(1, 0.5, 4.01, 1, 0.5, 3.6).is_err());
        assert!(SecretKey::new(1, 0.5, 3.5699456, 1, 0.5, 3.6).is_err());
    }

    #[test]
    fn tiny_dims_lengths() {
        let key = SecretKey::new(10, 0.3f64, 3.9, 20, 0.6, 3.99).unwrap();
        let km = derive_all(&key, 1, 1).unwrap();
        assert_eq!(km.tables.row_table().len(), 3);
        assert_eq!(km.tables.col_tables().len(), 1);
        assert_eq!(km.tables.col_tables()[0].len(), 3);
        assert_eq!(km.selector.len(), 3);
        assert_eq!(km.keystream.len(), 3);
    }

    #[test]
    fn m1_only_moves_row_table() {
        let a = SecretKey::new(1000, 0.3f64, 3.9, 20, 0.6, 3.99).unwrap();
        let b = SecretKey { m1: 1001, ..a };
        let ka = derive_all(&a, 8, 8).unwrap();
        let kb = derive_all(&b, 8, 8).unwrap();
        assert_ne!(ka.tables.row_table(), kb.tables.row_table());
        assert_eq!(ka.selector, kb.selector);
        assert_eq!(ka.keystream, kb.keystream);
    }

    #[test]
    fn f32_keys_work() {
        let key = SecretKey::new(100, 0.3f32, 3.9, 200, 0.6, 3.99).unwrap();
        let km = derive_all(&key, 4, 4).unwrap();
        assert_eq!(km.selector.len(), 48);
    }

    proptest! {
        #[test]
        fn balance_always_balanced(raw in prop::collection::vec(0u8..3, 3..300usize)) {
            let mn = raw.len() / 3;
            let raw = &raw[..3 * mn];
            let y = balance_selector(raw, mn).unwrap();
            for s in 0..3u8 {
                prop_assert_eq!(y.as_slice().iter().filter(|&&v| v == s).count(), mn);
            }
        }

        #[test]
        fn balance_prefix_stable(
            raw in prop::collection::vec(0u8..3, 3..150usize),
            at in any::<prop::sample::Index>(),
            sym in 0u8..3,
        ) {
            let mn = raw.len() / 3;
            let raw = raw[..3 * mn].to_vec();
            let l = at.index(raw.len());
            let mut changed = raw.clone();
            changed[l] = sym;
            let a = balance_selector(&raw, mn).unwrap();
            let b = balance_selector(&changed, mn).unwrap();
            prop_assert_eq!(&a.as_slice()[..l], &b.as_slice()[..l]);
        }

        #[test]
        fn schedule_covers_every_slot(raw in prop::collection::vec(0u8..3, 3..300usize), cols in 1usize..5) {
            let mn = (raw.len() / 3 / cols).max(1) * cols;
            let raw: Vec<u8> = raw.iter().cycle().take(3 * mn).copied().collect();
            let y = balance_selector(&raw, mn).unwrap();
            let s = build_schedule(&y, mn / cols, cols).unwrap();
            let mut hit = vec![false; 3 * mn];
            for p in s.positions() {
                prop_assert!(!hit[p]);
                hit[p] = true;
            }
            for (slot, &k) in s.slots().iter().zip(y.as_slice()) {
                prop_assert_eq!(slot.k, k as usize);
            }
            prop_assert!(hit.into_iter().all(|h| h));
        }
    }
}
