//! Lifting automorphisms of the value group and of the coefficient field to
//! twisted series.
//!
//! An order automorphism of `G_beta` is `(z, h) -> (z, q h)` with `q > 0`
//! (the `Z` part is forced to be the identity). A coefficient automorphism
//! fixes `Q_p` and sends `pi` to another root `P` of `x^e - p`. The lift
//! `sum a_h t^h -> sum phi(a_h) t^(q h)` respects the twisted product when
//! `beta(q h, q h') = beta(h, h')` and `phi(pi^m) = pi^m`.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coefficient_field::{cross_section, ExtElement, ExtWire, FieldConfig};
use crate::error::Error;
use crate::ordered_groups::{CocycleSpec, GBetaElement};
use crate::random::{self, SeriesShape};
use crate::rational::RationalExponent;
use crate::twisted_series::{SeriesContext, SeriesValuation, Term, TwistedSeries};

/// `h -> q h` on `Q`, identity on `Z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupAutoWire", into = "GroupAutoWire")]
pub struct GroupAutoSpec {
    q: RationalExponent,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupAutoWire {
    q: RationalExponent,
}

impl TryFrom<GroupAutoWire> for GroupAutoSpec {
    type Error = Error;
    fn try_from(w: GroupAutoWire) -> Result<Self, Error> {
        GroupAutoSpec::new(w.q)
    }
}

impl From<GroupAutoSpec> for GroupAutoWire {
    fn from(g: GroupAutoSpec) -> Self {
        GroupAutoWire { q: g.q }
    }
}

impl GroupAutoSpec {
    pub fn new(q: RationalExponent) -> Result<Self, Error> {
        if !q.is_positive() {
            return Err(Error::InvalidConfig(format!("scaling factor must be positive, got {q}")));
        }
        Ok(GroupAutoSpec { q })
    }

    pub fn identity() -> Self {
        GroupAutoSpec { q: RationalExponent::one() }
    }

    pub fn q(&self) -> &RationalExponent {
        &self.q
    }

    pub fn apply_exponent(&self, h: &RationalExponent) -> RationalExponent {
        &self.q * h
    }

    pub fn apply(&self, g: &GBetaElement) -> GBetaElement {
        GBetaElement::new(g.z.clone(), self.apply_exponent(&g.h))
    }
}

/// The automorphism of `L` fixing `Q_p` with `pi -> image_of_pi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffAutoSpec {
    image_of_pi: ExtElement,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffAutoWire {
    pub image_of_pi: ExtWire,
}

impl CoeffAutoSpec {
    /// Checks `P^e = p` on guaranteed digits.
    pub fn new(image_of_pi: ExtElement, cfg: &FieldConfig) -> Result<Self, Error> {
        let mut power = ExtElement::one(cfg);
        for _ in 0..cfg.e() {
            power = power.mul(&image_of_pi, cfg);
        }
        if !power.agrees(&ExtElement::from_i64(cfg.p() as i64, cfg), cfg) {
            return Err(Error::InvalidConfig("image of pi is not a root of x^e - p".into()));
        }
        Ok(CoeffAutoSpec { image_of_pi })
    }

    pub fn identity(cfg: &FieldConfig) -> Self {
        CoeffAutoSpec { image_of_pi: ExtElement::pi(cfg) }
    }

    pub fn image_of_pi(&self) -> &ExtElement {
        &self.image_of_pi
    }

    /// `sum a_i pi^i -> sum a_i P^i`.
    pub fn apply(&self, x: &ExtElement, cfg: &FieldConfig) -> ExtElement {
        let mut out = ExtElement::zero(cfg);
        let mut power = ExtElement::one(cfg);
        for a in x.coords() {
            if !a.is_exact_zero() {
                out = out.add(&power.scale(a, cfg), cfg);
            }
            power = power.mul(&self.image_of_pi, cfg);
        }
        out
    }

    pub fn to_wire(&self, cfg: &FieldConfig) -> CoeffAutoWire {
        CoeffAutoWire { image_of_pi: self.image_of_pi.to_wire(cfg) }
    }

    pub fn from_wire(w: &CoeffAutoWire, cfg: &FieldConfig) -> Result<Self, Error> {
        Self::new(ExtElement::from_wire(&w.image_of_pi, cfg)?, cfg)
    }
}

/// `beta(h, h') = beta(q h, q h')` on every sampled pair.
pub fn check_cocycle_compat(
    spec: &GroupAutoSpec,
    beta: &CocycleSpec,
    samples: &[(RationalExponent, RationalExponent)],
) -> bool {
    first_cocycle_incompat(spec, beta, samples).is_none()
}

fn first_cocycle_incompat<'a>(
    spec: &GroupAutoSpec,
    beta: &CocycleSpec,
    samples: &'a [(RationalExponent, RationalExponent)],
) -> Option<&'a (RationalExponent, RationalExponent)> {
    samples.iter().find(|(h, h2)| {
        beta.eval(h, h2) != beta.eval(&spec.apply_exponent(h), &spec.apply_exponent(h2))
    })
}

/// `phi(pi^m) = pi^m` on every sampled `m`.
pub fn check_sigma_compat(phi_bar: &CoeffAutoSpec, cfg: &FieldConfig, samples: &[i64]) -> bool {
    samples.iter().all(|&m| {
        let s = cross_section(m, cfg);
        phi_bar.apply(&s, cfg).agrees(&s, cfg)
    })
}

/// Term-by-term image without any compatibility check.
pub fn lift_unchecked(a: &TwistedSeries, phi_bar: &CoeffAutoSpec, spec: &GroupAutoSpec) -> TwistedSeries {
    let cfg = a.field();
    let terms = a
        .terms()
        .iter()
        .map(|t| Term { h: spec.apply_exponent(&t.h), coeff: phi_bar.apply(&t.coeff, cfg) })
        .collect();
    TwistedSeries::from_raw(a.context(), terms)
}

/// Lifts `a`, refusing when the compatibility conditions fail on the data of
/// `a` itself: the cross-section at the valuations of its coefficients and
/// the cocycle on pairs from its support.
pub fn lift_auto(
    a: &TwistedSeries,
    phi_bar: &CoeffAutoSpec,
    spec: &GroupAutoSpec,
) -> Result<TwistedSeries, Error> {
    let cfg = a.field();
    let vals: Vec<i64> = a.terms().iter().filter_map(|t| t.coeff.val(cfg)).collect();
    if let Some(m) = vals.iter().find(|&&m| !check_sigma_compat(phi_bar, cfg, &[m])) {
        return Err(Error::IncompatibleAutomorphism(format!(
            "coefficient automorphism moves pi^{m}"
        )));
    }
    let pairs: Vec<_> = a
        .terms()
        .iter()
        .flat_map(|x| a.terms().iter().map(move |y| (x.h.clone(), y.h.clone())))
        .collect();
    if let Some((h, h2)) = first_cocycle_incompat(spec, a.cocycle(), &pairs) {
        return Err(Error::IncompatibleAutomorphism(format!(
            "cocycle differs at ({h}, {h2}) and its image"
        )));
    }
    Ok(lift_unchecked(a, phi_bar, spec))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LiftClause {
    Additive,
    Multiplicative,
    Valuation,
    Section,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftFailure {
    pub clause: LiftClause,
    pub trial: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftReport {
    pub trials: usize,
    pub failures: Vec<LiftFailure>,
}

impl LiftReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failed(&self, clause: LiftClause) -> bool {
        self.failures.iter().any(|f| f.clause == clause)
    }
}

/// Checks on `trials` random pairs that the unchecked lift is additive,
/// multiplicative, maps valuations by `(z, h) -> (z, q h)` and commutes
/// with the cross-section at the valuations of the coefficients.
///
/// Comparisons are made below `cutoff * min(q, 1)`: for `q < 1` the lift of
/// a truncated product lacks the terms that came from beyond the cutoff.
pub fn verify_lift_hom<R: Rng + ?Sized>(
    phi_bar: &CoeffAutoSpec,
    spec: &GroupAutoSpec,
    ctx: &Arc<SeriesContext>,
    trials: usize,
    rng: &mut R,
) -> Result<LiftReport, Error> {
    let cfg = &ctx.field;
    let cutoff = ctx.truncation.cutoff();
    let bound = if spec.q() < &RationalExponent::one() { cutoff * spec.q() } else { cutoff.clone() };
    let lift = |s: &TwistedSeries| lift_unchecked(s, phi_bar, spec);
    let mut failures = Vec::new();
    let shape = SeriesShape { max_terms: 6, max_den: 12, lo: 0, hi: 4 };
    for trial in 0..trials {
        let a = random::series(rng, ctx, &shape);
        let b = random::series(rng, ctx, &shape);
        let mut fail = |clause, detail: String| failures.push(LiftFailure { clause, trial, detail });

        if !lift(&a.add(&b)?).agrees_below(&lift(&a).add(&lift(&b))?, &bound) {
            fail(LiftClause::Additive, "lift(a + b) != lift(a) + lift(b)".into());
        }
        if !lift(&a.mul(&b)?).agrees_below(&lift(&a).mul(&lift(&b))?, &bound) {
            fail(LiftClause::Multiplicative, "lift(a b) != lift(a) lift(b)".into());
        }
        for x in [&a, &b] {
            if let SeriesValuation::Finite(v) = x.val() {
                let image = spec.apply(&v);
                if image.h < bound && lift(x).val().finite() != Some(&image) {
                    fail(LiftClause::Valuation, format!("val(lift(x)) != image of {v}"));
                }
            }
            for t in x.terms() {
                let m = t.coeff.val(cfg).expect("nonzero coefficient");
                if !check_sigma_compat(phi_bar, cfg, &[m]) {
                    fail(LiftClause::Section, format!("phi(pi^{m}) != pi^{m} at exponent {}", t.h));
                    break;
                }
            }
        }
    }
    Ok(LiftReport { trials, failures })
}
