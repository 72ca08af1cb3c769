//! Pseudo-Cauchy prefixes and their pseudo-limits.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{SeriesContext, SeriesValuation, Term, TwistedSeries};
use crate::error::Error;
use crate::ordered_groups::GBetaElement;

/// Shape of the ladder `g_a = val(c_{a+1} - c_a)` on the observed prefix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PseudoCauchyCase {
    /// Ladder exponents strictly increase.
    ExponentsIncrease,
    /// Ladder exponents are constant from some point on, with at least two
    /// entries in the final run, while coefficient valuations increase.
    ExponentStable,
    Undetermined,
}

impl Serialize for PseudoCauchyCase {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            PseudoCauchyCase::ExponentsIncrease => s.serialize_u8(1),
            PseudoCauchyCase::ExponentStable => s.serialize_u8(2),
            PseudoCauchyCase::Undetermined => s.serialize_str("undetermined"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PseudoCauchyReport {
    pub ok: bool,
    /// Ladder up to the first zero difference, if any.
    pub ladder: Vec<GBetaElement>,
    pub case: PseudoCauchyCase,
}

/// Computes the ladder of `prefix` and classifies it. Prefixes shorter than
/// three entries are reported as not ok.
pub fn pseudo_cauchy_check(prefix: &[TwistedSeries]) -> Result<PseudoCauchyReport, Error> {
    let mut ladder = Vec::new();
    let mut ok = prefix.len() >= 3;
    for w in prefix.windows(2) {
        match w[1].sub(&w[0])?.val() {
            SeriesValuation::Finite(g) => {
                if ladder.last().is_some_and(|prev| prev >= &g) {
                    ok = false;
                }
                ladder.push(g);
            }
            SeriesValuation::Infinity => {
                ok = false;
                break;
            }
        }
    }
    let case = if ok { classify(&ladder) } else { PseudoCauchyCase::Undetermined };
    Ok(PseudoCauchyReport { ok, ladder, case })
}

fn classify(ladder: &[GBetaElement]) -> PseudoCauchyCase {
    if ladder.windows(2).all(|w| w[0].h < w[1].h) {
        return PseudoCauchyCase::ExponentsIncrease;
    }
    let last = &ladder[ladder.len() - 1].h;
    let run = ladder.iter().rev().take_while(|g| &g.h == last).count();
    if run >= 2 {
        PseudoCauchyCase::ExponentStable
    } else {
        PseudoCauchyCase::Undetermined
    }
}

/// A checked prefix `(c_0, ..., c_N)`, `N >= 2`, with strictly increasing
/// ladder.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoCauchyPrefix {
    entries: Vec<TwistedSeries>,
    report: PseudoCauchyReport,
}

impl PseudoCauchyPrefix {
    pub fn new(entries: Vec<TwistedSeries>) -> Result<Self, Error> {
        if entries.len() < 3 {
            return Err(Error::NotPseudoCauchy(format!(
                "a prefix needs at least 3 entries, got {}",
                entries.len()
            )));
        }
        let report = pseudo_cauchy_check(&entries)?;
        if !report.ok {
            let at = report.ladder.len();
            return Err(Error::NotPseudoCauchy(format!("ladder stops increasing at index {at}")));
        }
        Ok(PseudoCauchyPrefix { entries, report })
    }

    pub fn entries(&self) -> &[TwistedSeries] {
        &self.entries
    }

    pub fn ladder(&self) -> &[GBetaElement] {
        &self.report.ladder
    }

    pub fn case(&self) -> PseudoCauchyCase {
        self.report.case
    }

    pub fn context(&self) -> &Arc<SeriesContext> {
        self.entries[0].context()
    }

    /// First `a` with `val(b - c_a) != g_a`, over every `a` that has a ladder
    /// entry.
    pub fn first_ladder_mismatch(&self, b: &TwistedSeries) -> Result<Option<usize>, Error> {
        for (a, g) in self.ladder().iter().enumerate() {
            if b.sub(&self.entries[a])?.val().finite() != Some(g) {
                return Ok(Some(a));
            }
        }
        Ok(None)
    }
}

/// A pseudo-limit of the prefix.
///
/// When the ladder exponents increase the last entry already has the
/// stabilized coefficients and is returned as is. When they stabilize at
/// `h`, the result keeps the last entry's terms below `h`, takes the last
/// entry's coefficient at `h` (whose digits below each `g_a` agree with
/// those of `c_a`) and drops everything beyond.
pub fn pseudo_limit(prefix: &PseudoCauchyPrefix) -> Result<TwistedSeries, Error> {
    let last = &prefix.entries[prefix.entries.len() - 1];
    match prefix.case() {
        PseudoCauchyCase::Undetermined => Err(Error::UndeterminedCase),
        PseudoCauchyCase::ExponentsIncrease => Ok(last.clone()),
        PseudoCauchyCase::ExponentStable => {
            let stable = &prefix.ladder()[prefix.ladder().len() - 1].h;
            let terms: Vec<Term> = last.terms().iter().take_while(|t| &t.h <= stable).cloned().collect();
            Ok(TwistedSeries::from_raw(last.context(), terms))
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PrefixWire {
    context: SeriesContext,
    entries: Vec<serde_json::Value>,
}

impl Serialize for PseudoCauchyPrefix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let entries = self
            .entries
            .iter()
            .map(|e| serde_json::to_value(e).map(|mut v| v["terms"].take()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::ser::Error::custom)?;
        PrefixWire { context: (**self.context()).clone(), entries }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PseudoCauchyPrefix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = PrefixWire::deserialize(d)?;
        let ctx = Arc::new(w.context);
        let entries = w
            .entries
            .iter()
            .map(|terms| TwistedSeries::from_json_terms(&ctx, terms))
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        PseudoCauchyPrefix::new(entries).map_err(serde::de::Error::custom)
    }
}
