//! Exact oracles over the rationals.
//!
//! An element of `Q(pi)`, `pi^e = p`, is a vector of `e` rational
//! coordinates; a series is a map from exponent to element. Nothing here
//! touches p-adic digits, so comparing against the library checks its
//! precision handling as well as its algebra.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use twisted_hahn::{
    ExtElement, FieldConfig, PadicNumber, RationalExponent, SeriesContext, TwistedSeries,
};

pub type Q = BigRational;
pub type El = Vec<Q>;
pub type Series = BTreeMap<Q, El>;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn floor(x: &Q) -> BigInt {
    x.floor().to_integer()
}

/// `v_p(x)`, `None` for zero.
pub fn vp(x: &Q, p: i64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let count = |n: &BigInt| {
        let mut n = n.abs();
        let mut k = 0;
        while (&n % p).is_zero() {
            n /= p;
            k += 1;
        }
        k
    };
    Some(count(x.numer()) - count(x.denom()))
}

#[derive(Clone, Copy, Debug)]
pub struct Field {
    pub p: i64,
    pub e: usize,
}

impl Field {
    pub fn zero(&self) -> El {
        vec![Q::zero(); self.e]
    }

    pub fn int(&self, n: i64) -> El {
        self.rational(q(n, 1))
    }

    pub fn rational(&self, x: Q) -> El {
        let mut v = self.zero();
        v[0] = x;
        v
    }

    pub fn is_zero(&self, a: &El) -> bool {
        a.iter().all(Zero::is_zero)
    }

    pub fn add(&self, a: &El, b: &El) -> El {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn neg(&self, a: &El) -> El {
        a.iter().map(|x| -x).collect()
    }

    pub fn sub(&self, a: &El, b: &El) -> El {
        self.add(a, &self.neg(b))
    }

    /// Product of polynomials in `pi`, reduced by `pi^e = p`.
    pub fn mul(&self, a: &El, b: &El) -> El {
        let mut out = self.zero();
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let k = i + j;
                let c = x * y;
                if k >= self.e {
                    out[k - self.e] += c * q(self.p, 1);
                } else {
                    out[k] += c;
                }
            }
        }
        out
    }

    /// `a * pi^m` for any integer `m`.
    pub fn mul_pi(&self, a: &El, m: i64) -> El {
        let e = self.e as i64;
        let mut out = self.zero();
        for (i, x) in a.iter().enumerate() {
            let k = i as i64 + m;
            let scale = pow_q(&q(self.p, 1), k.div_euclid(e));
            out[k.rem_euclid(e) as usize] = x * scale;
        }
        out
    }

    /// Inverse by Gauss-Jordan elimination on the multiplication matrix.
    pub fn inv(&self, a: &El) -> Option<El> {
        let e = self.e;
        // column j is a * pi^j
        let cols: Vec<El> = (0..e).map(|j| self.mul_pi(a, j as i64)).collect();
        let mut m: Vec<Vec<Q>> = (0..e)
            .map(|i| {
                let mut row: Vec<Q> = cols.iter().map(|c| c[i].clone()).collect();
                row.push(if i == 0 { Q::one() } else { Q::zero() });
                row
            })
            .collect();
        for c in 0..e {
            let pivot = (c..e).find(|&r| !m[r][c].is_zero())?;
            m.swap(c, pivot);
            let inv = Q::one() / &m[c][c];
            for k in c..=e {
                m[c][k] = &m[c][k] * &inv;
            }
            for r in 0..e {
                if r != c && !m[r][c].is_zero() {
                    let f = m[r][c].clone();
                    for k in c..=e {
                        let d = &f * &m[c][k];
                        m[r][k] -= d;
                    }
                }
            }
        }
        Some(m.into_iter().map(|row| row[e].clone()).collect())
    }

    /// `min(e v_p(a_i) + i)`.
    pub fn val(&self, a: &El) -> Option<i64> {
        a.iter().enumerate().filter_map(|(i, x)| vp(x, self.p).map(|v| self.e as i64 * v + i as i64)).min()
    }

    pub fn to_ext(&self, a: &El, cfg: &FieldConfig) -> ExtElement {
        let coords = a
            .iter()
            .map(|x| PadicNumber::from_rational(&RationalExponent::from_rational(x.clone()), cfg))
            .collect();
        ExtElement::from_coords(coords, cfg).expect("e coordinates")
    }
}

pub fn pow_q(x: &Q, k: i64) -> Q {
    let mut out = Q::one();
    for _ in 0..k.unsigned_abs() {
        out *= x;
    }
    if k < 0 {
        Q::one() / out
    } else {
        out
    }
}

/// The cocycles the oracle knows: zero, or the carry of `floor(s h)`.
#[derive(Clone, Debug)]
pub enum Beta {
    Zero,
    Carry(Q),
}

impl Beta {
    pub fn eval(&self, h: &Q, h2: &Q) -> i64 {
        match self {
            Beta::Zero => 0,
            Beta::Carry(s) => {
                let v = floor(&(s * (h + h2))) - floor(&(s * h)) - floor(&(s * h2));
                i64::try_from(v).expect("small carry")
            }
        }
    }
}

/// Twisted product below `cutoff`.
pub fn series_mul(f: &Field, beta: &Beta, a: &Series, b: &Series, cutoff: &Q) -> Series {
    let mut out = Series::new();
    for (h, x) in a {
        for (h2, y) in b {
            let s = h + h2;
            if &s >= cutoff {
                continue;
            }
            let c = f.mul_pi(&f.mul(x, y), -beta.eval(h, h2));
            let slot = out.entry(s).or_insert_with(|| f.zero());
            *slot = f.add(slot, &c);
        }
    }
    out.retain(|_, c| !f.is_zero(c));
    out
}

pub fn series_add(f: &Field, a: &Series, b: &Series) -> Series {
    let mut out = a.clone();
    for (h, y) in b {
        let slot = out.entry(h.clone()).or_insert_with(|| f.zero());
        *slot = f.add(slot, y);
    }
    out.retain(|_, c| !f.is_zero(c));
    out
}

/// Inverse below `cutoff`: with `f = M (1 - a)` for the leading monomial `M`,
/// `f^-1 = M^-1 sum a^n`, where `M^-1 = c^-1 pi^beta(h,-h) t^-h` is forced
/// by `M M^-1 = 1`.
pub fn series_inv(f: &Field, beta: &Beta, s: &Series, cutoff: &Q) -> Option<Series> {
    let (h0, c0) = s.iter().next()?;
    let minv_c = f.mul_pi(&f.inv(c0)?, beta.eval(h0, &-h0));
    let minv: Series = [(-h0.clone(), minv_c)].into_iter().collect();
    let wide = cutoff + h0;
    let one: Series = [(Q::zero(), f.int(1))].into_iter().collect();
    let ms = series_mul(f, beta, &minv, s, &wide);
    let a: Series = series_add(f, &one, &ms.into_iter().map(|(h, c)| (h, f.neg(&c))).collect());
    assert!(a.keys().all(|h| h.is_positive()), "leading term cancels");
    let mut sum = one.clone();
    let mut power = one;
    while !power.is_empty() && !a.is_empty() {
        power = series_mul(f, beta, &power, &a, &wide);
        sum = series_add(f, &sum, &power);
    }
    Some(series_mul(f, beta, &minv, &sum, cutoff))
}

/// `(z, h)` of the leading term.
pub fn series_val(f: &Field, s: &Series) -> Option<(i64, Q)> {
    s.iter().next().map(|(h, c)| (f.val(c).expect("nonzero"), h.clone()))
}

pub fn to_series(f: &Field, ctx: &Arc<SeriesContext>, s: &Series) -> TwistedSeries {
    TwistedSeries::from_terms(
        ctx,
        s.iter().map(|(h, c)| (RationalExponent::from_rational(h.clone()), f.to_ext(c, &ctx.field))),
    )
    .expect("sorted exponents")
}

/// Every exponent below `bound` carries the same coefficient, up to the
/// digits the library guarantees. A term the library dropped must be zero
/// in the oracle too.
pub fn compare(f: &Field, lib: &TwistedSeries, oracle: &Series, bound: &Q) -> Result<(), String> {
    let cfg = lib.field();
    let mut hs: Vec<Q> = oracle.keys().filter(|h| *h < bound).cloned().collect();
    hs.extend(lib.terms().iter().map(|t| t.h.as_rational().clone()).filter(|h| h < bound));
    hs.sort();
    hs.dedup();
    for h in hs {
        let want = oracle.get(&h).map(|c| f.to_ext(c, cfg)).unwrap_or_else(|| ExtElement::zero(cfg));
        let got = lib.coeff(&RationalExponent::from_rational(h.clone()));
        if !got.agrees(&want, cfg) {
            return Err(format!("coefficient at t^{h} differs: library {got:?}, oracle {want:?}"));
        }
    }
    Ok(())
}

pub fn random_q<R: Rng>(rng: &mut R, num: i64, max_den: i64) -> Q {
    q(rng.gen_range(-num..=num), rng.gen_range(1..=max_den))
}

pub fn random_el<R: Rng>(rng: &mut R, f: &Field) -> El {
    loop {
        let a: El = (0..f.e).map(|_| if rng.gen_ratio(1, 3) { Q::zero() } else { random_q(rng, 30, 6) }).collect();
        if !f.is_zero(&a) {
            return a;
        }
    }
}

/// Up to `max_terms` terms with exponents in `[lo, hi)` of denominator at most `max_den`.
pub fn random_series<R: Rng>(rng: &mut R, f: &Field, max_terms: usize, max_den: i64, lo: i64, hi: i64) -> Series {
    let n = rng.gen_range(1..=max_terms);
    (0..n)
        .map(|_| {
            let d = rng.gen_range(1..=max_den);
            (q(rng.gen_range(lo * d..hi * d), d), random_el(rng, f))
        })
        .collect()
}
