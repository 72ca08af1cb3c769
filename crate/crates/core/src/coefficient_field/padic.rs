use std::cmp::min;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::FieldConfig;
use crate::error::Error;
use crate::rational::RationalExponent;

/// A p-adic number `p^val * unit` where `unit` is known modulo `p^prec`.
///
/// Invariants: `unit` is not divisible by `p`, `unit < p^prec` and
/// `1 <= prec <= N`. Exact zero is a separate value. A sum whose guaranteed
/// digits all cancel is a zero known only modulo `p^val`, stored with
/// `prec == 0` and `unit == 0`; it counts as zero but keeps its absolute
/// precision, so later sums do not claim digits nobody computed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicNumber(Option<Unit>);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Unit {
    val: i64,
    unit: BigUint,
    prec: u32,
}

impl PadicNumber {
    pub fn zero() -> Self {
        PadicNumber(None)
    }

    pub fn one(cfg: &FieldConfig) -> Self {
        PadicNumber::from_i64(1, cfg)
    }

    pub fn from_i64(n: i64, cfg: &FieldConfig) -> Self {
        Self::from_int(&BigInt::from(n), cfg)
    }

    /// The integer `n` with all `N` digits guaranteed.
    pub fn from_int(n: &BigInt, cfg: &FieldConfig) -> Self {
        if n.is_zero() {
            return PadicNumber::zero();
        }
        let (sign, mut mag) = (n.sign(), n.magnitude().clone());
        let mut val = 0i64;
        let p = BigUint::from(cfg.p());
        loop {
            let (q, r) = mag.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            mag = q;
            val += 1;
        }
        let modulus = cfg.pow(cfg.precision());
        let mut unit = mag % modulus;
        if sign == Sign::Minus {
            unit = modulus - unit;
        }
        PadicNumber(Some(Unit { val, unit, prec: cfg.precision() }))
    }

    /// `num / den` with all `N` digits guaranteed.
    pub fn from_ratio(num: &BigInt, den: &BigInt, cfg: &FieldConfig) -> Result<Self, Error> {
        let d = Self::from_int(den, cfg).inv(cfg)?;
        Ok(Self::from_int(num, cfg).mul(&d, cfg))
    }

    pub fn from_rational(r: &RationalExponent, cfg: &FieldConfig) -> Self {
        // The denominator of a reduced rational is never zero.
        Self::from_ratio(r.numer(), r.denom(), cfg).expect("nonzero denominator")
    }

    /// Builds `p^val * sum(digits[i] p^i)`; the digit count is the precision.
    /// No digits at all means a zero known modulo `p^val`.
    pub fn from_digits(val: i64, digits: &[u32], cfg: &FieldConfig) -> Result<Self, Error> {
        if digits.is_empty() {
            return Ok(PadicNumber::approximate_zero(val));
        }
        if let Some(d) = digits.iter().find(|&&d| d >= cfg.p()) {
            return Err(Error::Parse(format!("digit {d} out of range for p = {}", cfg.p())));
        }
        if digits[0] == 0 {
            return Err(Error::Parse("leading unit digit must be nonzero".into()));
        }
        let digits = &digits[..min(digits.len(), cfg.precision() as usize)];
        let mut unit = BigUint::zero();
        for &d in digits.iter().rev() {
            unit = unit * cfg.p() + d;
        }
        Ok(PadicNumber(Some(Unit { val, unit, prec: digits.len() as u32 })))
    }

    pub(crate) fn from_parts(val: i64, unit: BigUint, prec: u32) -> Self {
        PadicNumber(Some(Unit { val, unit, prec }))
    }

    /// A zero known modulo `p^abs`.
    pub fn approximate_zero(abs: i64) -> Self {
        PadicNumber(Some(Unit { val: abs, unit: BigUint::zero(), prec: 0 }))
    }

    /// True for exact zero and for zeros known to some precision.
    pub fn is_zero(&self) -> bool {
        self.0.as_ref().is_none_or(|u| u.prec == 0)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.0.is_none()
    }

    fn nonzero(&self) -> Option<&Unit> {
        self.0.as_ref().filter(|u| u.prec > 0)
    }

    /// `v_p(x)`, `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        self.nonzero().map(|u| u.val)
    }

    /// Number of guaranteed unit digits, `None` for zero.
    pub fn precision(&self) -> Option<u32> {
        self.nonzero().map(|u| u.prec)
    }

    /// `val + prec`: the power of `p` modulo which the value is known;
    /// `None` for exact zero.
    pub fn absolute_precision(&self) -> Option<i64> {
        self.0.as_ref().map(|u| u.val + u.prec as i64)
    }

    pub fn unit(&self) -> Option<&BigUint> {
        self.nonzero().map(|u| &u.unit)
    }

    /// Guaranteed unit digits, least significant first.
    pub fn digits(&self, cfg: &FieldConfig) -> Vec<u32> {
        let Some(u) = self.nonzero() else { return Vec::new() };
        let mut out = Vec::with_capacity(u.prec as usize);
        let mut rest = u.unit.clone();
        for _ in 0..u.prec {
            let (q, r) = rest.div_rem(&BigUint::from(cfg.p()));
            out.push(r.try_into().expect("digit below p"));
            rest = q;
        }
        out
    }

    /// The exact rational whose expansion is the retained digits.
    pub fn to_rational(&self, cfg: &FieldConfig) -> BigRational {
        let Some(u) = self.nonzero() else { return BigRational::zero() };
        let unit = BigRational::from_integer(BigInt::from(u.unit.clone()));
        let p = BigRational::from_integer(BigInt::from(cfg.p()));
        unit * num_traits::pow::Pow::pow(&p, u.val)
    }

    pub fn neg(&self, cfg: &FieldConfig) -> Self {
        match &self.0 {
            Some(u) if u.prec > 0 => PadicNumber::from_parts(u.val, cfg.pow(u.prec) - &u.unit, u.prec),
            _ => self.clone(),
        }
    }

    pub fn add(&self, other: &Self, cfg: &FieldConfig) -> Self {
        let (x, y) = match (&self.0, &other.0) {
            (None, _) => return other.clone(),
            (_, None) => return self.clone(),
            (Some(a), Some(b)) if a.val <= b.val => (a, b),
            (Some(a), Some(b)) => (b, a),
        };
        let abs = min(x.val + x.prec as i64, y.val + y.prec as i64);
        if abs <= x.val {
            return PadicNumber::approximate_zero(abs);
        }
        // rel <= x.prec <= N since abs <= x.val + x.prec
        let rel = (abs - x.val) as u32;
        let modulus = cfg.pow(rel);
        let shift = y.val - x.val;
        let mut sum = &x.unit % modulus;
        if shift < rel as i64 {
            sum += (&y.unit * cfg.pow(shift as u32)) % modulus;
        }
        normalize(x.val, sum % modulus, rel, cfg)
    }

    pub fn sub(&self, other: &Self, cfg: &FieldConfig) -> Self {
        self.add(&other.neg(cfg), cfg)
    }

    pub fn mul(&self, other: &Self, cfg: &FieldConfig) -> Self {
        match (&self.0, &other.0) {
            (Some(a), Some(b)) if a.prec == 0 || b.prec == 0 => PadicNumber::approximate_zero(a.val + b.val),
            (Some(a), Some(b)) => {
                let prec = min(a.prec, b.prec);
                let unit = (&a.unit * &b.unit) % cfg.pow(prec);
                PadicNumber::from_parts(a.val + b.val, unit, prec)
            }
            _ => PadicNumber::zero(),
        }
    }

    pub fn inv(&self, cfg: &FieldConfig) -> Result<Self, Error> {
        let u = self.nonzero().ok_or(Error::DivisionByZero)?;
        let modulus = cfg.pow(u.prec);
        let unit = u.unit.modinv(modulus).expect("units are invertible modulo p^k");
        Ok(PadicNumber::from_parts(-u.val, unit, u.prec))
    }

    /// Multiplication by `p^k`; exact.
    pub fn mul_p_power(&self, k: i64) -> Self {
        match &self.0 {
            None => PadicNumber::zero(),
            Some(u) => PadicNumber::from_parts(u.val + k, u.unit.clone(), u.prec),
        }
    }

    /// Equality on guaranteed digits: the difference is zero to the
    /// precision both operands are known to.
    pub fn agrees(&self, other: &Self, cfg: &FieldConfig) -> bool {
        self.sub(other, cfg).is_zero()
    }

    /// Keeps at most `prec` unit digits.
    pub fn truncate(&self, prec: u32, cfg: &FieldConfig) -> Self {
        match &self.0 {
            Some(u) if prec < u.prec && u.prec > 0 => {
                if prec == 0 {
                    return PadicNumber::zero();
                }
                PadicNumber::from_parts(u.val, &u.unit % cfg.pow(prec), prec)
            }
            _ => self.clone(),
        }
    }

    pub fn to_wire(&self, cfg: &FieldConfig) -> PadicWire {
        match &self.0 {
            None => PadicWire::Digits { val: WireVal::Infinite, digits: Vec::new() },
            Some(u) => PadicWire::Digits { val: WireVal::Finite(u.val), digits: self.digits(cfg) },
        }
    }

    pub fn from_wire(w: &PadicWire, cfg: &FieldConfig) -> Result<Self, Error> {
        match w {
            PadicWire::Exact(s) => {
                let r = RationalExponent::parse(s)?;
                Ok(PadicNumber::from_rational(&r, cfg))
            }
            PadicWire::Digits { val: WireVal::Infinite, digits } => {
                if !digits.is_empty() {
                    return Err(Error::Parse("zero must have an empty digit list".into()));
                }
                Ok(PadicNumber::zero())
            }
            PadicWire::Digits { val: WireVal::Finite(v), digits } => {
                PadicNumber::from_digits(*v, digits, cfg)
            }
        }
    }
}

/// Strips factors of `p` from `sum` (known modulo `p^rel`, scaled by `p^val`).
fn normalize(val: i64, mut sum: BigUint, rel: u32, cfg: &FieldConfig) -> PadicNumber {
    if sum.is_zero() {
        return PadicNumber::approximate_zero(val + rel as i64);
    }
    let p = BigUint::from(cfg.p());
    let mut k = 0u32;
    loop {
        let (q, r) = sum.div_rem(&p);
        if !r.is_zero() {
            break;
        }
        sum = q;
        k += 1;
    }
    PadicNumber::from_parts(val + k as i64, sum, rel - k)
}

/// JSON form: `{"val": v, "digits": [d0, ...]}` (zero is
/// `{"val": "inf", "digits": []}`), or on input a rational string such as
/// `"-4"` or `"1/3"` meaning that exact value at full precision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PadicWire {
    Digits { val: WireVal, digits: Vec<u32> },
    Exact(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WireVal {
    Finite(i64),
    Infinite,
}

impl Serialize for WireVal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            WireVal::Finite(v) => s.serialize_i64(*v),
            WireVal::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for WireVal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(WireVal::Finite(v)),
            Raw::Text(s) if s == "inf" => Ok(WireVal::Infinite),
            Raw::Text(s) => Err(serde::de::Error::custom(format!("invalid valuation {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(p: u32, n: u32) -> FieldConfig {
        FieldConfig::new(p, 1, n).unwrap()
    }

    #[test]
    fn minus_one_plus_one_is_zero() {
        let c = cfg(5, 4);
        let m1 = PadicNumber::from_i64(-1, &c);
        assert_eq!(m1.digits(&c), vec![4, 4, 4, 4]);
        assert_eq!(m1.valuation(), Some(0));
        assert!(m1.add(&PadicNumber::one(&c), &c).is_zero());
    }

    #[test]
    fn zero_is_additive_identity() {
        let c = cfg(5, 4);
        let x = PadicNumber::from_i64(37, &c);
        assert_eq!(x.add(&PadicNumber::zero(), &c), x);
        assert_eq!(PadicNumber::zero().add(&x, &c), x);
    }

    #[test]
    fn inverse_of_one_minus_p() {
        let c = cfg(5, 4);
        let x = PadicNumber::from_i64(1 - 5, &c);
        let y = x.inv(&c).unwrap();
        assert_eq!(y.unit(), Some(&BigUint::from(156u32)));
        assert_eq!(y.digits(&c), vec![1, 1, 1, 1]);
        assert!(PadicNumber::one(&c).inv(&c).unwrap().agrees(&PadicNumber::one(&c), &c));
        let ip = PadicNumber::from_i64(5, &c).inv(&c).unwrap();
        assert_eq!(ip.valuation(), Some(-1));
        assert_eq!(ip.digits(&c), vec![1, 0, 0, 0]);
        assert_eq!(PadicNumber::zero().inv(&c), Err(Error::DivisionByZero));
    }

    #[test]
    fn cancellation_drops_digits() {
        let c = cfg(5, 4);
        // 1 + 5^3 * 2 minus 1 leaves 2*5^3 known to absolute precision 4
        let x = PadicNumber::from_i64(1 + 2 * 125, &c);
        let d = x.sub(&PadicNumber::one(&c), &c);
        assert_eq!(d.valuation(), Some(3));
        assert_eq!(d.precision(), Some(1));
        assert_eq!(d.digits(&c), vec![2]);
    }

    #[test]
    fn wire_round_trip_and_validation() {
        let c = cfg(5, 8);
        let x = PadicNumber::from_i64(-7, &c).mul_p_power(2);
        let w = x.to_wire(&c);
        let json = serde_json::to_string(&w).unwrap();
        let back: PadicWire = serde_json::from_str(&json).unwrap();
        assert_eq!(PadicNumber::from_wire(&back, &c).unwrap(), x);
        let z = serde_json::to_string(&PadicNumber::zero().to_wire(&c)).unwrap();
        assert_eq!(z, r#"{"val":"inf","digits":[]}"#);
        let bad: PadicWire = serde_json::from_str(r#"{"val":0,"digits":[0,1]}"#).unwrap();
        assert!(PadicNumber::from_wire(&bad, &c).is_err());
        let bad: PadicWire = serde_json::from_str(r#"{"val":0,"digits":[5]}"#).unwrap();
        assert!(PadicNumber::from_wire(&bad, &c).is_err());
        let exact: PadicWire = serde_json::from_str(r#""1/3""#).unwrap();
        let third = PadicNumber::from_wire(&exact, &c).unwrap();
        assert!(third.mul(&PadicNumber::from_i64(3, &c), &c).agrees(&PadicNumber::one(&c), &c));
    }

    fn arb_padic(p: u32, n: u32) -> impl Strategy<Value = PadicNumber> {
        (any::<bool>(), -3i64..4, proptest::collection::vec(0..p, n as usize)).prop_map(
            move |(zero, val, mut digits)| {
                if zero {
                    return PadicNumber::zero();
                }
                if digits[0] == 0 {
                    digits[0] = 1;
                }
                PadicNumber::from_digits(val, &digits, &cfg(p, n)).unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn valuation_of_product_adds(x in arb_padic(5, 12), y in arb_padic(5, 12)) {
            let c = cfg(5, 12);
            let xy = x.mul(&y, &c);
            match (x.valuation(), y.valuation()) {
                (Some(a), Some(b)) => prop_assert_eq!(xy.valuation(), Some(a + b)),
                _ => prop_assert!(xy.is_zero()),
            }
            let five_x = PadicNumber::from_i64(5, &c).mul(&x, &c);
            prop_assert_eq!(five_x.valuation(), x.valuation().map(|v| v + 1));
        }

        #[test]
        fn ring_laws_on_guaranteed_digits(
            x in arb_padic(2, 16), y in arb_padic(2, 16), z in arb_padic(2, 16)
        ) {
            let c = cfg(2, 16);
            prop_assert!(x.mul(&y, &c).mul(&z, &c).agrees(&x.mul(&y.mul(&z, &c), &c), &c));
            let lhs = x.mul(&y.add(&z, &c), &c);
            let rhs = x.mul(&y, &c).add(&x.mul(&z, &c), &c);
            if !lhs.is_zero() || !rhs.is_zero() {
                // Compare the difference: it must vanish to the guaranteed precision.
                prop_assert!(lhs.sub(&rhs, &c).is_zero());
            }
            prop_assert!(x.add(&y, &c).agrees(&y.add(&x, &c), &c));
        }

        #[test]
        fn inverse_times_value_is_one(x in arb_padic(5, 10)) {
            let c = cfg(5, 10);
            prop_assume!(!x.is_zero());
            let y = x.inv(&c).unwrap();
            prop_assert_eq!(y.valuation(), x.valuation().map(|v| -v));
            prop_assert!(x.mul(&y, &c).agrees(&PadicNumber::one(&c), &c));
        }

        #[test]
        fn retained_digits_match_exact_rationals(a in -10_000i64..10_000, b in -10_000i64..10_000) {
            // Oracle: the retained digits of a+b and a*b, read back as a
            // rational, are congruent to the integer result modulo p^abs.
            let c = cfg(3, 20);
            let (x, y) = (PadicNumber::from_i64(a, &c), PadicNumber::from_i64(b, &c));
            for (got, want) in [(x.add(&y, &c), a + b), (x.mul(&y, &c), a * b)] {
                let w = PadicNumber::from_i64(want, &c);
                prop_assert!(got.agrees(&w, &c), "{:?} vs {}", got, want);
            }
        }
    }
}
