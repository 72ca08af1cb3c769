//! The coefficient field: `Q_p` at fixed relative precision and its totally
//! ramified extension `L = Q_p(pi)`, `pi^e = p`.
//!
//! Valuations on `L` are normalized so that `v(pi) = 1` and `v(p) = e`.
//! Every nonzero p-adic number carries the number of its guaranteed unit
//! digits; sums lose digits under cancellation and products keep the smaller
//! count. A sum whose guaranteed digits all cancel becomes exact zero.

mod ext;
mod padic;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::Error;

pub use ext::{cross_section, ExtElement, ExtWire};
pub use padic::{PadicNumber, PadicWire};

/// Prime `p`, ramification index `e` and relative precision `N` (in p-adic
/// digits per coordinate).
#[derive(Clone)]
pub struct FieldConfig {
    p: u32,
    e: u32,
    precision: u32,
    // p^0 ..= p^precision
    powers: Arc<[BigUint]>,
}

/// Largest precision accepted; beyond this the digit vectors stop being a
/// sensible interchange format.
pub const MAX_PRECISION: u32 = 4096;

impl FieldConfig {
    pub fn new(p: u32, e: u32, precision: u32) -> Result<Self, Error> {
        if !is_prime(p) {
            return Err(Error::InvalidConfig(format!("p = {p} is not prime")));
        }
        if e == 0 {
            return Err(Error::InvalidConfig("ramification index must be at least 1".into()));
        }
        if precision == 0 || precision > MAX_PRECISION {
            return Err(Error::InvalidConfig(format!(
                "precision must lie in 1..={MAX_PRECISION}, got {precision}"
            )));
        }
        let mut powers = Vec::with_capacity(precision as usize + 1);
        let mut acc = BigUint::from(1u32);
        for _ in 0..=precision {
            powers.push(acc.clone());
            acc *= p;
        }
        Ok(FieldConfig { p, e, precision, powers: powers.into() })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `p^k` for `k <= precision`.
    pub(crate) fn pow(&self, k: u32) -> &BigUint {
        &self.powers[k as usize]
    }
}

impl PartialEq for FieldConfig {
    fn eq(&self, other: &Self) -> bool {
        (self.p, self.e, self.precision) == (other.p, other.e, other.precision)
    }
}

impl Eq for FieldConfig {}

impl fmt::Debug for FieldConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldConfig")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("precision", &self.precision)
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldConfigWire {
    p: u32,
    e: u32,
    precision: u32,
}

impl Serialize for FieldConfig {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FieldConfigWire { p: self.p, e: self.e, precision: self.precision }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldConfig {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = FieldConfigWire::deserialize(d)?;
        FieldConfig::new(w.p, w.e, w.precision).map_err(serde::de::Error::custom)
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let n = n as u64;
    (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}
