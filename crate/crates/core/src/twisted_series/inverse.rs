//! Two independent inversion routes.
//!
//! Both compute the inverse on exponents below the cutoff without applying
//! `max_terms` internally; the policy is applied once to the result.

use super::{add_terms, mul_terms, Term, TwistedSeries};
use crate::coefficient_field::ExtElement;
use crate::error::Error;
use crate::rational::RationalExponent;

/// `b = c t^h_tilde (1 - a)` with `min supp(a) > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub c: ExtElement,
    pub h_tilde: RationalExponent,
    pub a: TwistedSeries,
}

struct RawFactor {
    c: ExtElement,
    c_inv: ExtElement,
    h_tilde: RationalExponent,
    a: Vec<Term>,
}

impl TwistedSeries {
    /// Splits off the leading monomial.
    pub fn factor(&self) -> Result<Factorization, Error> {
        let raw = self.factor_raw()?;
        Ok(Factorization { c: raw.c, h_tilde: raw.h_tilde, a: TwistedSeries::from_raw(&self.ctx, raw.a) })
    }

    // a_h = -b_{h + h_tilde} / (c pi^(-beta(h, h_tilde)))
    fn factor_raw(&self) -> Result<RawFactor, Error> {
        let cfg = &self.ctx.field;
        let lead = self.terms.first().ok_or(Error::ZeroSeries)?;
        let c = lead.coeff.clone();
        let c_inv = c.inv(cfg)?;
        let h_tilde = lead.h.clone();
        let mut a = Vec::with_capacity(self.terms.len() - 1);
        for t in &self.terms[1..] {
            let h = &t.h - &h_tilde;
            let twist = self.ctx.cocycle.eval_i64(&h, &h_tilde)?;
            let coeff = t.coeff.mul(&c_inv, cfg).mul_pi_power(twist, cfg).neg(cfg);
            a.push(Term { h, coeff });
        }
        Ok(RawFactor { c, c_inv, h_tilde, a })
    }

    /// Inverse through the geometric series
    /// `b^-1 = c^-1 pi^beta(h~,-h~) t^-h~ * sum_n a^n`.
    pub fn inv_geometric(&self) -> Result<Self, Error> {
        let ctx = &self.ctx;
        let cfg = &ctx.field;
        let RawFactor { c_inv, h_tilde, a, .. } = self.factor_raw()?;
        // the sum is multiplied by t^-h~ afterwards
        let inner_cutoff = ctx.truncation.cutoff() + &h_tilde;
        let one = vec![Term { h: RationalExponent::zero(), coeff: ExtElement::one(cfg) }];
        let mut sum = if RationalExponent::zero() < inner_cutoff { one.clone() } else { Vec::new() };
        let mut power = sum.clone();
        // a^n starts at n * min supp(a), so the loop stops once that passes the cutoff
        while !power.is_empty() && !a.is_empty() {
            power = mul_terms(&power, &a, ctx, &inner_cutoff)?;
            sum = add_terms(&sum, &power, cfg);
        }
        let neg_h = -h_tilde.clone();
        let twist = ctx.cocycle.eval_i64(&h_tilde, &neg_h)?;
        let lead = Term { h: neg_h, coeff: c_inv.mul_pi_power(twist, cfg) };
        let terms = mul_terms(&[lead], &sum, ctx, ctx.truncation.cutoff())?;
        Ok(TwistedSeries::from_raw(ctx, terms))
    }

    /// Inverse by successive cancellation of the leading term of the
    /// residual `1 - f g`, where `f` is `self` with unit leading coefficient.
    pub fn inv_iterative(&self) -> Result<Self, Error> {
        let ctx = &self.ctx;
        let cfg = &ctx.field;
        let lead = self.terms.first().ok_or(Error::ZeroSeries)?;
        let c_inv = lead.coeff.inv(cfg)?;
        let h1 = lead.h.clone();
        let f: Vec<Term> =
            self.terms.iter().map(|t| Term { h: t.h.clone(), coeff: t.coeff.mul(&c_inv, cfg) }).collect();
        // g has exponents h2 - h1, which must stay below the cutoff
        let inner_cutoff = ctx.truncation.cutoff() + &h1;
        let mut residual = vec![Term { h: RationalExponent::zero(), coeff: ExtElement::one(cfg) }];
        let mut g: Vec<Term> = Vec::new();
        while let Some(r) = residual.first() {
            if r.h >= inner_cutoff {
                break;
            }
            let h = &r.h - &h1;
            let twist = ctx.cocycle.eval_i64(&h1, &h)?;
            let step = Term { h, coeff: r.coeff.mul_pi_power(twist, cfg) };
            let correction = mul_terms(&f, std::slice::from_ref(&step), ctx, &inner_cutoff)?;
            let neg: Vec<Term> =
                correction.into_iter().map(|t| Term { h: t.h, coeff: t.coeff.neg(cfg) }).collect();
            let mut next = add_terms(&residual, &neg, cfg);
            // what is left at r.h cancelled up to precision
            if next.first().is_some_and(|n| n.h <= residual[0].h) {
                debug_assert!(next[0].coeff.is_zero());
                next.remove(0);
            }
            residual = next;
            g.push(step);
        }
        let terms = g.into_iter().map(|t| Term { h: t.h, coeff: t.coeff.mul(&c_inv, cfg) }).collect();
        Ok(TwistedSeries::from_raw(ctx, terms))
    }

    /// Inverse by the named algorithm (`"geometric"` or `"iterative"`).
    pub fn inv_with(&self, algorithm: InversionAlgorithm) -> Result<Self, Error> {
        match algorithm {
            InversionAlgorithm::Geometric => self.inv_geometric(),
            InversionAlgorithm::Iterative => self.inv_iterative(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InversionAlgorithm {
    Geometric,
    Iterative,
}
