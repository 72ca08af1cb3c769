//! Seeded generators for the property suites.
//!
//! Everything is driven by a caller-supplied RNG; the suites use
//! `ChaCha8Rng`, so a seed reproduces the same samples on every platform.

use std::ops::RangeInclusive;
use std::sync::Arc;

use rand::Rng;

use crate::coefficient_field::{ExtElement, FieldConfig, PadicNumber};
use crate::ordered_groups::GBetaElement;
use crate::rational::RationalExponent;
use crate::twisted_series::{SeriesContext, TwistedSeries};

/// A rational in `[lo, hi)` with denominator at most `max_den` (before
/// reduction).
pub fn rational<R: Rng + ?Sized>(rng: &mut R, max_den: i64, lo: i64, hi: i64) -> RationalExponent {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(lo * den..hi * den);
    RationalExponent::ratio(num, den)
}

pub fn gbeta<R: Rng + ?Sized>(rng: &mut R, max_den: i64) -> GBetaElement {
    GBetaElement::new(rng.gen_range(-50i64..=50), rational(rng, max_den, -20, 20))
}

/// A nonzero p-adic number with all `N` digits random and guaranteed.
pub fn padic<R: Rng + ?Sized>(rng: &mut R, cfg: &FieldConfig, vals: RangeInclusive<i64>) -> PadicNumber {
    let p = cfg.p();
    let mut digits: Vec<u32> = (0..cfg.precision()).map(|_| rng.gen_range(0..p)).collect();
    digits[0] = rng.gen_range(1..p);
    PadicNumber::from_digits(rng.gen_range(vals), &digits, cfg).expect("digits are in range")
}

/// A nonzero element of `L`; each coordinate is zero with probability 1/3.
pub fn ext<R: Rng + ?Sized>(rng: &mut R, cfg: &FieldConfig, vals: RangeInclusive<i64>) -> ExtElement {
    loop {
        let coords = (0..cfg.e())
            .map(|_| if rng.gen_ratio(1, 3) { PadicNumber::zero() } else { padic(rng, cfg, vals.clone()) })
            .collect();
        let x = ExtElement::from_coords(coords, cfg).expect("e coordinates");
        if !x.is_zero() {
            return x;
        }
    }
}

/// An element of `Q_p` embedded in `L` with `v >= 0`, so it has a residue.
pub fn integral_ext<R: Rng + ?Sized>(rng: &mut R, cfg: &FieldConfig) -> ExtElement {
    let coords = (0..cfg.e())
        .map(|_| if rng.gen_ratio(1, 4) { PadicNumber::zero() } else { padic(rng, cfg, 0..=2) })
        .collect();
    ExtElement::from_coords(coords, cfg).expect("e coordinates")
}

/// Shape of a random series: up to `max_terms` terms with exponents in
/// `[lo, hi)` of denominator at most `max_den`.
#[derive(Clone, Debug)]
pub struct SeriesShape {
    pub max_terms: usize,
    pub max_den: i64,
    pub lo: i64,
    pub hi: i64,
}

impl SeriesShape {
    /// Dense shape for the field axioms.
    pub fn dense() -> Self {
        SeriesShape { max_terms: 16, max_den: 64, lo: 0, hi: 4 }
    }

    /// Few terms on a coarse grid: inverses of such series stay small.
    pub fn coarse() -> Self {
        SeriesShape { max_terms: 4, max_den: 4, lo: 0, hi: 4 }
    }
}

/// A series with between 0 and `max_terms` terms (fewer if exponents repeat).
pub fn series<R: Rng + ?Sized>(rng: &mut R, ctx: &Arc<SeriesContext>, shape: &SeriesShape) -> TwistedSeries {
    let n = rng.gen_range(0..=shape.max_terms);
    terms(rng, ctx, shape, n)
}

pub fn nonzero_series<R: Rng + ?Sized>(
    rng: &mut R,
    ctx: &Arc<SeriesContext>,
    shape: &SeriesShape,
) -> TwistedSeries {
    loop {
        let n = rng.gen_range(1..=shape.max_terms);
        let s = terms(rng, ctx, shape, n);
        if !s.is_zero() {
            return s;
        }
    }
}

fn terms<R: Rng + ?Sized>(rng: &mut R, ctx: &Arc<SeriesContext>, shape: &SeriesShape, n: usize) -> TwistedSeries {
    let mut hs: Vec<RationalExponent> =
        (0..n).map(|_| rational(rng, shape.max_den, shape.lo, shape.hi)).collect();
    hs.sort();
    hs.dedup();
    let cfg = &ctx.field;
    let terms: Vec<_> = hs.into_iter().map(|h| (h, ext(rng, cfg, -2..=2))).collect();
    TwistedSeries::from_terms(ctx, terms).expect("sorted distinct exponents")
}
