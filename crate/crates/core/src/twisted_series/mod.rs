//! Twisted Hahn series with finite support.
//!
//! A series is a strictly increasing list of `(exponent, coefficient)` terms
//! with nonzero coefficients. Every result is cut to exponents below the
//! context's `cutoff` and then to its `max_terms` smallest exponents; all
//! retained terms below the cutoff are exact (up to coefficient precision)
//! as long as `max_terms` does not bind.

mod inverse;
mod pseudo;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::coefficient_field::{ExtElement, ExtWire, FieldConfig};
use crate::error::Error;
use crate::ordered_groups::{CocycleSpec, GBetaElement};
use crate::rational::RationalExponent;

pub use inverse::{Factorization, InversionAlgorithm};
pub use pseudo::{pseudo_cauchy_check, pseudo_limit, PseudoCauchyCase, PseudoCauchyPrefix, PseudoCauchyReport};

/// Finite stand-in for the cardinal bound on supports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TruncationWire", into = "TruncationWire")]
pub struct TruncationPolicy {
    max_terms: usize,
    cutoff: RationalExponent,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TruncationWire {
    max_terms: usize,
    cutoff: RationalExponent,
}

impl TryFrom<TruncationWire> for TruncationPolicy {
    type Error = Error;
    fn try_from(w: TruncationWire) -> Result<Self, Error> {
        TruncationPolicy::new(w.max_terms, w.cutoff)
    }
}

impl From<TruncationPolicy> for TruncationWire {
    fn from(t: TruncationPolicy) -> Self {
        TruncationWire { max_terms: t.max_terms, cutoff: t.cutoff }
    }
}

impl TruncationPolicy {
    pub fn new(max_terms: usize, cutoff: RationalExponent) -> Result<Self, Error> {
        if max_terms == 0 {
            return Err(Error::InvalidConfig("max_terms must be at least 1".into()));
        }
        Ok(TruncationPolicy { max_terms, cutoff })
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    pub fn cutoff(&self) -> &RationalExponent {
        &self.cutoff
    }
}

/// Everything two series must share to be combined.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesContext {
    pub field: FieldConfig,
    pub cocycle: CocycleSpec,
    pub truncation: TruncationPolicy,
}

impl SeriesContext {
    pub fn new(field: FieldConfig, cocycle: CocycleSpec, truncation: TruncationPolicy) -> Arc<Self> {
        Arc::new(SeriesContext { field, cocycle, truncation })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub h: RationalExponent,
    pub coeff: ExtElement,
}

/// Valuation of a series in `G_beta`, with `Infinity` above every element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesValuation {
    Finite(GBetaElement),
    Infinity,
}

impl SeriesValuation {
    pub fn finite(&self) -> Option<&GBetaElement> {
        match self {
            SeriesValuation::Finite(g) => Some(g),
            SeriesValuation::Infinity => None,
        }
    }

    /// Sum in `G_beta`, absorbing into `Infinity`.
    pub fn add(&self, other: &Self, beta: &CocycleSpec) -> Self {
        match (self, other) {
            (SeriesValuation::Finite(a), SeriesValuation::Finite(b)) => {
                SeriesValuation::Finite(a.add(b, beta))
            }
            _ => SeriesValuation::Infinity,
        }
    }
}

impl Ord for SeriesValuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (SeriesValuation::Finite(a), SeriesValuation::Finite(b)) => a.cmp(b),
            (SeriesValuation::Finite(_), SeriesValuation::Infinity) => Ordering::Less,
            (SeriesValuation::Infinity, SeriesValuation::Finite(_)) => Ordering::Greater,
            (SeriesValuation::Infinity, SeriesValuation::Infinity) => Ordering::Equal,
        }
    }
}

impl PartialOrd for SeriesValuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SeriesValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesValuation::Finite(g) => g.fmt(f),
            SeriesValuation::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for SeriesValuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            SeriesValuation::Finite(g) => g.serialize(s),
            SeriesValuation::Infinity => s.serialize_str("inf"),
        }
    }
}

/// A finite-support element of `L(t^Q, beta)`.
#[derive(Clone)]
pub struct TwistedSeries {
    ctx: Arc<SeriesContext>,
    terms: Vec<Term>,
}

impl fmt::Debug for TwistedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|t| (&t.h, t.coeff.coords()))).finish()
    }
}

impl PartialEq for TwistedSeries {
    fn eq(&self, other: &Self) -> bool {
        same_context(&self.ctx, &other.ctx) && self.terms == other.terms
    }
}

fn same_context(a: &Arc<SeriesContext>, b: &Arc<SeriesContext>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl TwistedSeries {
    pub fn zero(ctx: &Arc<SeriesContext>) -> Self {
        TwistedSeries { ctx: Arc::clone(ctx), terms: Vec::new() }
    }

    pub fn one(ctx: &Arc<SeriesContext>) -> Self {
        Self::monomial(ctx, RationalExponent::zero(), ExtElement::one(&ctx.field))
    }

    /// `coeff * t^h`, subject to the truncation policy.
    pub fn monomial(ctx: &Arc<SeriesContext>, h: RationalExponent, coeff: ExtElement) -> Self {
        Self::from_sorted(ctx, vec![Term { h, coeff }])
    }

    /// `t^h`.
    pub fn t_power(ctx: &Arc<SeriesContext>, h: RationalExponent) -> Self {
        Self::monomial(ctx, h, ExtElement::one(&ctx.field))
    }

    /// Builds a series from terms given in strictly increasing exponent order.
    /// Zero coefficients are dropped and the truncation policy applied.
    pub fn from_terms(
        ctx: &Arc<SeriesContext>,
        terms: impl IntoIterator<Item = (RationalExponent, ExtElement)>,
    ) -> Result<Self, Error> {
        let terms: Vec<Term> = terms.into_iter().map(|(h, coeff)| Term { h, coeff }).collect();
        if let Some(w) = terms.windows(2).find(|w| w[0].h >= w[1].h) {
            return Err(Error::Parse(format!(
                "exponents must be strictly increasing, found {} then {}",
                w[0].h, w[1].h
            )));
        }
        let e = ctx.field.e() as usize;
        if let Some(t) = terms.iter().find(|t| t.coeff.coords().len() != e) {
            return Err(Error::Parse(format!("coefficient at {} has the wrong degree", t.h)));
        }
        Ok(Self::from_sorted(ctx, terms))
    }

    fn from_sorted(ctx: &Arc<SeriesContext>, terms: Vec<Term>) -> Self {
        let policy = &ctx.truncation;
        let mut terms: Vec<Term> = terms
            .into_iter()
            .filter(|t| !t.coeff.is_zero() && t.h < policy.cutoff)
            .collect();
        terms.truncate(policy.max_terms);
        TwistedSeries { ctx: Arc::clone(ctx), terms }
    }

    pub fn context(&self) -> &Arc<SeriesContext> {
        &self.ctx
    }

    pub fn field(&self) -> &FieldConfig {
        &self.ctx.field
    }

    pub fn cocycle(&self) -> &CocycleSpec {
        &self.ctx.cocycle
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading_term(&self) -> Option<&Term> {
        self.terms.first()
    }

    /// Coefficient of `t^h` (zero if absent).
    pub fn coeff(&self, h: &RationalExponent) -> ExtElement {
        self.terms
            .binary_search_by(|t| t.h.cmp(h))
            .map(|i| self.terms[i].coeff.clone())
            .unwrap_or_else(|_| ExtElement::zero(&self.ctx.field))
    }

    fn check_context(&self, other: &Self) -> Result<(), Error> {
        if same_context(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        self.check_context(other)?;
        Ok(Self::from_sorted(&self.ctx, add_terms(&self.terms, &other.terms, &self.ctx.field)))
    }

    pub fn neg(&self) -> Self {
        let cfg = &self.ctx.field;
        TwistedSeries {
            ctx: Arc::clone(&self.ctx),
            terms: self.terms.iter().map(|t| Term { h: t.h.clone(), coeff: t.coeff.neg(cfg) }).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, Error> {
        self.add(&other.neg())
    }

    /// Twisted product: `a t^h * b t^h' = a b pi^(-beta(h,h')) t^(h+h')`.
    pub fn mul(&self, other: &Self) -> Result<Self, Error> {
        self.check_context(other)?;
        let terms = mul_terms(&self.terms, &other.terms, &self.ctx, &self.ctx.truncation.cutoff)?;
        Ok(Self::from_sorted(&self.ctx, terms))
    }

    /// Multiplies every coefficient by `c` (a constant, so no twist arises).
    pub fn scale(&self, c: &ExtElement) -> Self {
        let cfg = &self.ctx.field;
        let terms = self
            .terms
            .iter()
            .map(|t| Term { h: t.h.clone(), coeff: t.coeff.mul(c, cfg) })
            .collect();
        Self::from_sorted(&self.ctx, terms)
    }

    /// `(v(leading coefficient), leading exponent)` in `G_beta`.
    pub fn val(&self) -> SeriesValuation {
        match self.terms.first() {
            None => SeriesValuation::Infinity,
            Some(t) => {
                let v = t.coeff.val(&self.ctx.field).expect("stored coefficients are nonzero");
                SeriesValuation::Finite(GBetaElement::new(v, t.h.clone()))
            }
        }
    }

    /// Term-by-term equality with coefficients compared on guaranteed digits.
    pub fn agrees(&self, other: &Self) -> bool {
        let cfg = &self.ctx.field;
        same_context(&self.ctx, &other.ctx)
            && self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .zip(&other.terms)
                .all(|(a, b)| a.h == b.h && a.coeff.agrees(&b.coeff, cfg))
    }

    /// Like [`TwistedSeries::agrees`] but only on exponents below `bound`.
    pub fn agrees_below(&self, other: &Self, bound: &RationalExponent) -> bool {
        let cut = |s: &Self| TwistedSeries {
            ctx: Arc::clone(&s.ctx),
            terms: s.terms.iter().filter(|t| &t.h < bound).cloned().collect(),
        };
        cut(self).agrees(&cut(other))
    }

    /// Same terms under another context with the same field.
    pub fn with_context(&self, ctx: &Arc<SeriesContext>) -> Result<Self, Error> {
        if ctx.field != self.ctx.field {
            return Err(Error::ContextMismatch);
        }
        Ok(Self::from_sorted(ctx, self.terms.clone()))
    }

    pub(crate) fn from_raw(ctx: &Arc<SeriesContext>, terms: Vec<Term>) -> Self {
        Self::from_sorted(ctx, terms)
    }
}

/// Merge of two sorted term lists. Only exact zeros are dropped; a
/// coefficient that cancelled to some precision stays, so that later
/// internal sums know how little of it is guaranteed.
pub(crate) fn add_terms(a: &[Term], b: &[Term], cfg: &FieldConfig) -> Vec<Term> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].h.cmp(&b[j].h) {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                let c = a[i].coeff.add(&b[j].coeff, cfg);
                if !c.is_exact_zero() {
                    out.push(Term { h: a[i].h.clone(), coeff: c });
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Twisted convolution restricted to exponents below `cutoff`.
pub(crate) fn mul_terms(
    a: &[Term],
    b: &[Term],
    ctx: &SeriesContext,
    cutoff: &RationalExponent,
) -> Result<Vec<Term>, Error> {
    match mul_terms_small(a, b, ctx, cutoff) {
        Some(terms) => Ok(terms),
        None => mul_terms_exact(a, b, ctx, cutoff),
    }
}

type SmallQ = (i64, i64);

const SMALL: i128 = 1 << 62;

fn small_q(n: i128, d: i128) -> Option<SmallQ> {
    let g = n.gcd(&d);
    let (n, d) = (n / g, d / g);
    (n.abs() < SMALL && d < SMALL).then_some((n as i64, d as i64))
}

fn to_small(h: &RationalExponent) -> Option<SmallQ> {
    Some((i64::try_from(h.numer()).ok()?, i64::try_from(h.denom()).ok()?))
        .filter(|(n, d)| (*n as i128).abs() < SMALL && (*d as i128) < SMALL)
}

fn cmp_small(x: SmallQ, y: SmallQ) -> Ordering {
    (x.0 as i128 * y.1 as i128).cmp(&(y.0 as i128 * x.1 as i128))
}

/// The product with exponents held as machine-sized fractions. `None` when
/// something does not fit, in which case the caller uses exact rationals.
fn mul_terms_small(
    a: &[Term],
    b: &[Term],
    ctx: &SeriesContext,
    cutoff: &RationalExponent,
) -> Option<Vec<Term>> {
    let cfg = &ctx.field;
    let beta = ctx.cocycle.small()?;
    let cut = to_small(cutoff)?;
    let ha = a.iter().map(|t| to_small(&t.h)).collect::<Option<Vec<_>>>()?;
    let hb = b.iter().map(|t| to_small(&t.h)).collect::<Option<Vec<_>>>()?;
    let mut acc: HashMap<SmallQ, ExtElement> = HashMap::new();
    for (x, &hx) in a.iter().zip(&ha) {
        for (y, &hy) in b.iter().zip(&hb) {
            let (xn, xd, yn, yd) = (hx.0 as i128, hx.1 as i128, hy.0 as i128, hy.1 as i128);
            let h = small_q(xn * yd + yn * xd, xd * yd)?;
            if cmp_small(h, cut) != Ordering::Less {
                break;
            }
            let c = x.coeff.mul(&y.coeff, cfg).mul_pi_power(-beta.eval(hx, hy, h), cfg);
            match acc.get_mut(&h) {
                Some(slot) => *slot = slot.add(&c, cfg),
                None => {
                    acc.insert(h, c);
                }
            }
        }
    }
    let mut out: Vec<(SmallQ, ExtElement)> = acc.into_iter().filter(|(_, c)| !c.is_exact_zero()).collect();
    out.sort_by(|x, y| cmp_small(x.0, y.0));
    Some(out.into_iter().map(|((n, d), coeff)| Term { h: RationalExponent::ratio(n, d), coeff }).collect())
}

fn mul_terms_exact(
    a: &[Term],
    b: &[Term],
    ctx: &SeriesContext,
    cutoff: &RationalExponent,
) -> Result<Vec<Term>, Error> {
    let cfg = &ctx.field;
    let mut acc: BTreeMap<RationalExponent, ExtElement> = BTreeMap::new();
    for x in a {
        for y in b {
            let h = &x.h + &y.h;
            if &h >= cutoff {
                break;
            }
            let twist = ctx.cocycle.eval_i64(&x.h, &y.h)?;
            let c = x.coeff.mul(&y.coeff, cfg).mul_pi_power(-twist, cfg);
            match acc.get_mut(&h) {
                Some(slot) => *slot = slot.add(&c, cfg),
                None => {
                    acc.insert(h, c);
                }
            }
        }
    }
    Ok(acc
        .into_iter()
        .filter(|(_, c)| !c.is_exact_zero())
        .map(|(h, coeff)| Term { h, coeff })
        .collect())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermWire {
    h: RationalExponent,
    coeff: ExtWire,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesWire {
    context: SeriesContext,
    terms: Vec<TermWire>,
}

impl Serialize for TwistedSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let cfg = &self.ctx.field;
        SeriesWire {
            context: (*self.ctx).clone(),
            terms: self
                .terms
                .iter()
                .map(|t| TermWire { h: t.h.clone(), coeff: t.coeff.to_wire(cfg) })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TwistedSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = SeriesWire::deserialize(d)?;
        let ctx = Arc::new(w.context);
        let terms = w
            .terms
            .iter()
            .map(|t| Ok((t.h.clone(), ExtElement::from_wire(&t.coeff, &ctx.field)?)))
            .collect::<Result<Vec<_>, Error>>()
            .map_err(serde::de::Error::custom)?;
        TwistedSeries::from_terms(&ctx, terms).map_err(serde::de::Error::custom)
    }
}

impl TwistedSeries {
    /// Reads a series whose context is given separately (the `terms` list of
    /// the JSON form).
    pub fn from_json_terms(ctx: &Arc<SeriesContext>, terms: &serde_json::Value) -> Result<Self, Error> {
        let wire: Vec<TermWire> =
            serde_json::from_value(terms.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let terms = wire
            .iter()
            .map(|t| Ok((t.h.clone(), ExtElement::from_wire(&t.coeff, &ctx.field)?)))
            .collect::<Result<Vec<_>, Error>>()?;
        Self::from_terms(ctx, terms)
    }
}
