//! `name=value` text form of a secret key.

use anyhow::{anyhow, bail, Context, Result};
use chaoscrack::SecretKey;
use rand::Rng;

const FIELDS: [&str; 6] = ["m1", "x0", "mu0", "m2", "x0s", "mu0s"];

pub fn parse_key(text: &str) -> Result<SecretKey> {
    let mut values: [Option<&str>; 6] = [None; 6];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (name, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected name=value", lineno + 1))?;
        let name = name.trim();
        let slot = FIELDS
            .iter()
            .position(|&f| f == name)
            .ok_or_else(|| anyhow!("line {}: unknown field {name:?}", lineno + 1))?;
        if values[slot].replace(value.trim()).is_some() {
            bail!("field {name} given more than once");
        }
    }
    let get = |i: usize| values[i].ok_or_else(|| anyhow!("missing field {}", FIELDS[i]));
    let uint = |i: usize| -> Result<u64> {
        get(i)?.parse().with_context(|| format!("field {}", FIELDS[i]))
    };
    let real = |i: usize| -> Result<f64> {
        get(i)?.parse().with_context(|| format!("field {}", FIELDS[i]))
    };
    let key = SecretKey::new(uint(0)?, real(1)?, real(2)?, uint(3)?, real(4)?, real(5)?)?;
    Ok(key)
}

/// Shortest round-trip decimal for every real, so `parse_key(format_key(k)) == k`.
pub fn format_key(key: &SecretKey) -> String {
    format!(
        "m1={}\nx0={}\nmu0={}\nm2={}\nx0s={}\nmu0s={}\n",
        key.m1, key.x0, key.mu0, key.m2, key.x0s, key.mu0s
    )
}

pub fn generate_key<R: Rng + ?Sized>(rng: &mut R) -> SecretKey {
    SecretKey::random(rng)
}
