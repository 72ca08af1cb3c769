//! Extensions `0 -> Z -> G -> Q -> 0` of ordered abelian groups, presented as
//! the twisted product `G_beta` for a 2-cocycle `beta: Q x Q -> Z`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rational::RationalExponent;

/// Elements of the convex subgroup `A = Z`.
pub type IntValue = BigInt;

/// Integer wire form: a JSON number when it fits in `i64`, a decimal string
/// otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct WireInt(pub BigInt);

impl Serialize for WireInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(&self.0) {
            Ok(n) => s.serialize_i64(n),
            Err(_) => s.collect_str(&self.0),
        }
    }
}

impl<'de> Deserialize<'de> for WireInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(WireInt(BigInt::from(n))),
            Raw::Text(s) => s
                .trim()
                .parse()
                .map(WireInt)
                .map_err(|_| serde::de::Error::custom(format!("invalid integer {s:?}"))),
        }
    }
}

/// A normalized 1-cochain `psi: Q -> Z` with `psi(0) = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CochainWire", into = "CochainWire")]
pub enum CochainSpec {
    /// `psi(h) = floor(scale * h)`.
    Floor(RationalExponent),
    /// Explicit values; unlisted nonzero arguments map to `default`.
    Table {
        entries: BTreeMap<RationalExponent, IntValue>,
        default: IntValue,
    },
}

impl CochainSpec {
    pub fn floor(scale: RationalExponent) -> Result<Self, Error> {
        if !scale.is_positive() {
            return Err(Error::InvalidConfig(format!("floor scale must be positive, got {scale}")));
        }
        Ok(CochainSpec::Floor(scale))
    }

    /// The zero cochain.
    pub fn zero() -> Self {
        CochainSpec::Table { entries: BTreeMap::new(), default: BigInt::zero() }
    }

    pub fn table(
        entries: impl IntoIterator<Item = (RationalExponent, IntValue)>,
        default: IntValue,
    ) -> Result<Self, Error> {
        let entries: BTreeMap<_, _> = entries.into_iter().collect();
        if let Some(v) = entries.get(&RationalExponent::zero()) {
            if !v.is_zero() {
                return Err(Error::InvalidConfig(format!("cochain must vanish at 0, got {v}")));
            }
        }
        Ok(CochainSpec::Table { entries, default })
    }

    pub fn eval(&self, h: &RationalExponent) -> IntValue {
        if h.is_zero() {
            return BigInt::zero();
        }
        match self {
            CochainSpec::Floor(scale) => (scale * h).floor(),
            CochainSpec::Table { entries, default } => {
                entries.get(h).cloned().unwrap_or_else(|| default.clone())
            }
        }
    }

    /// The 2-coboundary `psi(h + h') - psi(h) - psi(h')`.
    pub fn coboundary(&self, h: &RationalExponent, h2: &RationalExponent) -> IntValue {
        self.eval(&(h + h2)) - self.eval(h) - self.eval(h2)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum CochainWire {
    Floor {
        scale: RationalExponent,
    },
    Table {
        entries: Vec<(RationalExponent, WireInt)>,
        #[serde(default = "wire_zero")]
        default: WireInt,
    },
}

fn wire_zero() -> WireInt {
    WireInt(BigInt::zero())
}

impl TryFrom<CochainWire> for CochainSpec {
    type Error = Error;

    fn try_from(w: CochainWire) -> Result<Self, Error> {
        match w {
            CochainWire::Floor { scale } => CochainSpec::floor(scale),
            CochainWire::Table { entries, default } => {
                let mut map = BTreeMap::new();
                for (h, WireInt(z)) in entries {
                    if map.insert(h.clone(), z).is_some() {
                        return Err(Error::Parse(format!("duplicate cochain entry at {h}")));
                    }
                }
                CochainSpec::table(map, default.0)
            }
        }
    }
}

impl From<CochainSpec> for CochainWire {
    fn from(c: CochainSpec) -> Self {
        match c {
            CochainSpec::Floor(scale) => CochainWire::Floor { scale },
            CochainSpec::Table { entries, default } => CochainWire::Table {
                entries: entries.into_iter().map(|(h, z)| (h, WireInt(z))).collect(),
                default: WireInt(default),
            },
        }
    }
}

/// A 2-cochain `beta: Q x Q -> Z`, meant to be a normalized symmetric cocycle.
///
/// `Carry` and `Coboundary` are cocycles by construction. A `Table` is taken
/// literally and may fail [`check_cocycle`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CocycleWire", into = "CocycleWire")]
pub enum CocycleSpec {
    Zero,
    /// `floor(s(h + h')) - floor(s h) - floor(s h')` for a positive scale `s`.
    Carry(RationalExponent),
    Coboundary(CochainSpec),
    Table {
        entries: BTreeMap<(RationalExponent, RationalExponent), IntValue>,
        default: IntValue,
    },
}

impl CocycleSpec {
    pub fn carry(scale: RationalExponent) -> Result<Self, Error> {
        if !scale.is_positive() {
            return Err(Error::InvalidConfig(format!("carry scale must be positive, got {scale}")));
        }
        Ok(CocycleSpec::Carry(scale))
    }

    pub fn table(
        entries: impl IntoIterator<Item = ((RationalExponent, RationalExponent), IntValue)>,
        default: IntValue,
    ) -> Self {
        CocycleSpec::Table { entries: entries.into_iter().collect(), default }
    }

    /// `beta(h, h2)`.
    pub fn eval(&self, h: &RationalExponent, h2: &RationalExponent) -> IntValue {
        match self {
            CocycleSpec::Zero => BigInt::zero(),
            CocycleSpec::Carry(scale) => {
                if h.is_zero() || h2.is_zero() {
                    return BigInt::zero();
                }
                let x = scale * h;
                let y = scale * h2;
                (&x + &y).floor() - x.floor() - y.floor()
            }
            CocycleSpec::Coboundary(psi) => psi.coboundary(h, h2),
            CocycleSpec::Table { entries, default } => entries
                .get(&(h.clone(), h2.clone()))
                .cloned()
                .unwrap_or_else(|| default.clone()),
        }
    }

    /// `beta(h, h2)` as a machine integer, for use as an exponent of the
    /// uniformizer.
    pub fn eval_i64(&self, h: &RationalExponent, h2: &RationalExponent) -> Result<i64, Error> {
        let b = self.eval(h, h2);
        i64::try_from(&b).map_err(|_| Error::Overflow(format!("cocycle value {b}")))
    }

    /// `beta` in machine integers on small fractions, when it has a closed
    /// form there. Used by the series product's fast path.
    pub(crate) fn small(&self) -> Option<SmallCocycle> {
        match self {
            CocycleSpec::Zero => Some(SmallCocycle::Const(0)),
            CocycleSpec::Carry(scale) | CocycleSpec::Coboundary(CochainSpec::Floor(scale)) => {
                let n = i64::try_from(scale.numer()).ok().filter(|n| n.abs() < 1 << 24)?;
                let d = i64::try_from(scale.denom()).ok().filter(|d| *d < 1 << 24)?;
                Some(SmallCocycle::Carry { num: n as i128, den: d as i128 })
            }
            CocycleSpec::Coboundary(CochainSpec::Table { entries, default }) if entries.is_empty() => {
                Some(SmallCocycle::ConstCochain(i64::try_from(default).ok()?))
            }
            CocycleSpec::Table { entries, default } if entries.is_empty() => {
                Some(SmallCocycle::Const(i64::try_from(default).ok()?))
            }
            _ => None,
        }
    }
}

/// A cocycle evaluated on fractions `(num, den)` with `den > 0`, both below
/// `2^62` in absolute value.
#[derive(Clone, Copy, Debug)]
pub(crate) enum SmallCocycle {
    Const(i64),
    /// Coboundary of `psi(h) = d` for `h != 0`, `psi(0) = 0`.
    ConstCochain(i64),
    /// `floor(s (h + h')) - floor(s h) - floor(s h')` with `s = num / den`.
    Carry { num: i128, den: i128 },
}

impl SmallCocycle {
    pub(crate) fn eval(&self, x: (i64, i64), y: (i64, i64), sum: (i64, i64)) -> i64 {
        match *self {
            SmallCocycle::Const(d) => d,
            SmallCocycle::ConstCochain(d) => {
                let psi = |h: (i64, i64)| if h.0 == 0 { 0 } else { d };
                psi(sum) - psi(x) - psi(y)
            }
            SmallCocycle::Carry { num, den } => {
                let fl = |h: (i64, i64)| (num * h.0 as i128).div_euclid(den * h.1 as i128);
                (fl(sum) - fl(x) - fl(y)) as i64
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum CocycleWire {
    Zero,
    Carry {
        scale: RationalExponent,
    },
    Coboundary {
        psi: CochainSpec,
    },
    Table {
        entries: Vec<(RationalExponent, RationalExponent, WireInt)>,
        #[serde(default = "wire_zero")]
        default: WireInt,
    },
}

impl TryFrom<CocycleWire> for CocycleSpec {
    type Error = Error;

    fn try_from(w: CocycleWire) -> Result<Self, Error> {
        Ok(match w {
            CocycleWire::Zero => CocycleSpec::Zero,
            CocycleWire::Carry { scale } => CocycleSpec::carry(scale)?,
            CocycleWire::Coboundary { psi } => CocycleSpec::Coboundary(psi),
            CocycleWire::Table { entries, default } => {
                let mut map = BTreeMap::new();
                for (h, h2, WireInt(z)) in entries {
                    if map.insert((h.clone(), h2.clone()), z).is_some() {
                        return Err(Error::Parse(format!("duplicate cocycle entry at ({h}, {h2})")));
                    }
                }
                CocycleSpec::Table { entries: map, default: default.0 }
            }
        })
    }
}

impl From<CocycleSpec> for CocycleWire {
    fn from(c: CocycleSpec) -> Self {
        match c {
            CocycleSpec::Zero => CocycleWire::Zero,
            CocycleSpec::Carry(scale) => CocycleWire::Carry { scale },
            CocycleSpec::Coboundary(psi) => CocycleWire::Coboundary { psi },
            CocycleSpec::Table { entries, default } => CocycleWire::Table {
                entries: entries.into_iter().map(|((h, h2), z)| (h, h2, WireInt(z))).collect(),
                default: WireInt(default),
            },
        }
    }
}

/// Which cocycle law a sample violated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CocycleLaw {
    Identity,
    Symmetry,
    Normalization,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocycleFailure {
    pub law: CocycleLaw,
    pub args: Vec<RationalExponent>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocycleReport {
    pub identity_ok: bool,
    pub symmetry_ok: bool,
    pub normalization_ok: bool,
    pub first_failure: Option<CocycleFailure>,
}

impl CocycleReport {
    pub fn ok(&self) -> bool {
        self.identity_ok && self.symmetry_ok && self.normalization_ok
    }
}

/// Checks the cocycle identity, symmetry and normalization on sampled triples.
///
/// For a triple `(h, h', h'')` the identity is
/// `beta(h,h') + beta(h+h',h'') = beta(h',h'') + beta(h,h'+h'')`; symmetry is
/// checked on the pairs `(h,h')` and `(h',h'')`, normalization on `(x,0)` and
/// `(0,x)` for each coordinate.
pub fn check_cocycle(
    beta: &CocycleSpec,
    samples: &[(RationalExponent, RationalExponent, RationalExponent)],
) -> CocycleReport {
    let mut report = CocycleReport {
        identity_ok: true,
        symmetry_ok: true,
        normalization_ok: true,
        first_failure: None,
    };
    let zero = RationalExponent::zero();
    let fail = |report: &mut CocycleReport, law: CocycleLaw, args: Vec<RationalExponent>| {
        match law {
            CocycleLaw::Identity => report.identity_ok = false,
            CocycleLaw::Symmetry => report.symmetry_ok = false,
            CocycleLaw::Normalization => report.normalization_ok = false,
        }
        if report.first_failure.is_none() {
            report.first_failure = Some(CocycleFailure { law, args });
        }
    };
    for (a, b, c) in samples {
        for x in [a, b, c] {
            if !beta.eval(x, &zero).is_zero() || !beta.eval(&zero, x).is_zero() {
                fail(&mut report, CocycleLaw::Normalization, vec![x.clone()]);
            }
        }
        for (x, y) in [(a, b), (b, c)] {
            if beta.eval(x, y) != beta.eval(y, x) {
                fail(&mut report, CocycleLaw::Symmetry, vec![x.clone(), y.clone()]);
            }
        }
        let lhs = beta.eval(a, b) + beta.eval(&(a + b), c);
        let rhs = beta.eval(b, c) + beta.eval(a, &(b + c));
        if lhs != rhs {
            fail(&mut report, CocycleLaw::Identity, vec![a.clone(), b.clone(), c.clone()]);
        }
    }
    report
}

/// `psi(h + h2) - psi(h) - psi(h2)`.
pub fn coboundary_eval(psi: &CochainSpec, h: &RationalExponent, h2: &RationalExponent) -> IntValue {
    psi.coboundary(h, h2)
}

/// True iff `beta2 = beta - d(psi)` on every sampled pair, i.e. `psi` witnesses
/// that the two cocycles define isomorphic extensions.
pub fn cocycles_equivalent(
    beta: &CocycleSpec,
    beta2: &CocycleSpec,
    psi: &CochainSpec,
    samples: &[(RationalExponent, RationalExponent)],
) -> bool {
    samples
        .iter()
        .all(|(h, h2)| beta2.eval(h, h2) == beta.eval(h, h2) - psi.coboundary(h, h2))
}

/// An element `(z, h)` of `G_beta = Z x Q`.
///
/// The order is exponent-major lexicographic; the group law needs the cocycle
/// and is therefore supplied per call.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GBetaWire", into = "GBetaWire")]
pub struct GBetaElement {
    pub z: IntValue,
    pub h: RationalExponent,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GBetaWire {
    z: WireInt,
    h: RationalExponent,
}

impl TryFrom<GBetaWire> for GBetaElement {
    type Error = Error;
    fn try_from(w: GBetaWire) -> Result<Self, Error> {
        Ok(GBetaElement { z: w.z.0, h: w.h })
    }
}

impl From<GBetaElement> for GBetaWire {
    fn from(g: GBetaElement) -> Self {
        GBetaWire { z: WireInt(g.z), h: g.h }
    }
}

impl GBetaElement {
    pub fn new(z: impl Into<BigInt>, h: RationalExponent) -> Self {
        GBetaElement { z: z.into(), h }
    }

    pub fn zero() -> Self {
        GBetaElement { z: BigInt::zero(), h: RationalExponent::zero() }
    }

    /// `(z,h) + (z',h') = (z + z' - beta(h,h'), h + h')`.
    pub fn add(&self, other: &GBetaElement, beta: &CocycleSpec) -> GBetaElement {
        GBetaElement {
            z: &self.z + &other.z - beta.eval(&self.h, &other.h),
            h: &self.h + &other.h,
        }
    }

    /// `-(z,h) = (-z + beta(h,-h), -h)`.
    pub fn neg(&self, beta: &CocycleSpec) -> GBetaElement {
        let minus_h = -&self.h;
        GBetaElement { z: -&self.z + beta.eval(&self.h, &minus_h), h: minus_h }
    }

    pub fn sub(&self, other: &GBetaElement, beta: &CocycleSpec) -> GBetaElement {
        self.add(&other.neg(beta), beta)
    }

    /// The isomorphism `G_beta -> G_beta'`, `(z,h) -> (z + psi(h), h)`, where
    /// `beta' = beta - d(psi)`.
    pub fn change_cocycle(&self, psi: &CochainSpec) -> GBetaElement {
        GBetaElement { z: &self.z + psi.eval(&self.h), h: self.h.clone() }
    }

    pub fn is_positive(&self) -> bool {
        self.h.is_positive() || (self.h.is_zero() && self.z.is_positive())
    }
}

impl Ord for GBetaElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.h.cmp(&other.h).then_with(|| self.z.cmp(&other.z))
    }
}

impl PartialOrd for GBetaElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GBetaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.z, self.h)
    }
}
