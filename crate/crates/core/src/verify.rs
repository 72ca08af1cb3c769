//! Seeded property suites over every layer of the library.
//!
//! Suite `i` draws from `ChaCha8Rng::seed_from_u64(seed)` switched to stream
//! `i`, so suites are independent of each other and of their order. The
//! `trials` budget applies per family (cocycle, field, or context) listed in
//! each suite.

use std::fmt::Display;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Pow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coefficient_field::{ExtElement, FieldConfig, PadicNumber};
use crate::error::Error;
use crate::lifting::{
    check_cocycle_compat, check_sigma_compat, verify_lift_hom, CoeffAutoSpec, GroupAutoSpec, LiftClause,
};
use crate::ordered_groups::{check_cocycle, cocycles_equivalent, CochainSpec, CocycleSpec, GBetaElement};
use crate::random::{self, SeriesShape};
use crate::rational::RationalExponent;
use crate::twisted_series::{
    pseudo_limit, PseudoCauchyCase, PseudoCauchyPrefix, SeriesContext, SeriesValuation, TruncationPolicy,
    TwistedSeries,
};

/// At most this many failures are kept per suite.
const MAX_FAILURES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    CocycleLaws,
    GBetaGroup,
    CoboundaryEquivalence,
    CoefficientField,
    TwistedField,
    DualInversion,
    PseudoLimit,
    Lifting,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::CocycleLaws,
        Suite::GBetaGroup,
        Suite::CoboundaryEquivalence,
        Suite::CoefficientField,
        Suite::TwistedField,
        Suite::DualInversion,
        Suite::PseudoLimit,
        Suite::Lifting,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::CocycleLaws => "cocycle_laws",
            Suite::GBetaGroup => "gbeta_group",
            Suite::CoboundaryEquivalence => "coboundary_equivalence",
            Suite::CoefficientField => "coefficient_field",
            Suite::TwistedField => "twisted_field",
            Suite::DualInversion => "dual_inversion",
            Suite::PseudoLimit => "pseudo_limit",
            Suite::Lifting => "lifting",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }

    fn stream(self) -> u64 {
        Suite::ALL.iter().position(|&s| s == self).expect("listed") as u64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub check: String,
    pub case: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub trials: usize,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub suites: Vec<SuiteReport>,
    pub ok: bool,
}

/// Runs every suite. With `trials == 0` nothing runs and the report is empty.
pub fn verify_all(seed: u64, trials: usize) -> VerifyReport {
    if trials == 0 {
        return VerifyReport { suites: Vec::new(), ok: true };
    }
    let suites: Vec<SuiteReport> = Suite::ALL.iter().map(|&s| run_suite(s, seed, trials)).collect();
    let ok = suites.iter().all(SuiteReport::ok);
    VerifyReport { suites, ok }
}

pub fn run_suite(suite: Suite, seed: u64, trials: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(suite.stream());
    let mut rec = Recorder::default();
    let count = match suite {
        Suite::CocycleLaws => cocycle_laws(&mut rng, trials, &mut rec),
        Suite::GBetaGroup => gbeta_group(&mut rng, trials, &mut rec),
        Suite::CoboundaryEquivalence => coboundary_equivalence(&mut rng, trials, &mut rec),
        Suite::CoefficientField => coefficient_field(&mut rng, trials, &mut rec),
        Suite::TwistedField => twisted_field(&mut rng, trials, &mut rec),
        Suite::DualInversion => dual_inversion(&mut rng, trials, &mut rec),
        Suite::PseudoLimit => pseudo_limits(&mut rng, trials, &mut rec),
        Suite::Lifting => lifting(&mut rng, trials, &mut rec),
    };
    SuiteReport { name: suite.name().to_string(), trials: count, failures: rec.failures }
}

#[derive(Default)]
struct Recorder {
    failures: Vec<Failure>,
}

impl Recorder {
    fn check(&mut self, ok: bool, check: &str, case: impl FnOnce() -> String) {
        if !ok && self.failures.len() < MAX_FAILURES {
            self.failures.push(Failure { check: check.to_string(), case: case() });
        }
    }

    /// Records an unexpected error as a failure and yields `None`.
    fn ok<T>(&mut self, r: Result<T, Error>, check: &str, case: impl Display) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.check(false, check, || format!("{case}: {e}"));
                None
            }
        }
    }
}

fn q(n: i64, d: i64) -> RationalExponent {
    RationalExponent::ratio(n, d)
}

fn carry(n: i64, d: i64) -> CocycleSpec {
    CocycleSpec::carry(q(n, d)).expect("positive scale")
}

fn cocycle_name(beta: &CocycleSpec) -> String {
    serde_json::to_string(beta).expect("serializable")
}

// ---- ordered groups ----

fn cocycle_laws(rng: &mut ChaCha8Rng, trials: usize, rec: &mut Recorder) -> usize {
    let families = [carry(1, 1), carry(1, 2), carry(3, 1), carry(7, 5)];
    for beta in &families {
        let name = cocycle_name(beta);
        for i in 0..trials {
            let triple = (
                random::rational(rng, 1 << 16, -8, 8),
                random::rational(rng, 1 << 16, -8, 8),
                random::rational(rng, 1 << 16, -8, 8),
            );
            let report = check_cocycle(beta, std::slice::from_ref(&triple));
            rec.check(report.ok(), "cocycle laws", || format!("{name} trial {i}: {:?}", report.first_failure));
            let v = beta.eval(&triple.0, &triple.1);
            rec.check(v == BigInt::from(0) || v == BigInt::from(1), "carry values in {0,1}", || {
                format!("{name} trial {i}: {v}")
            });
        }
    }
    families.len() * trials
}

fn gbeta_group(rng: &mut ChaCha8Rng, trials: usize, rec: &mut Recorder) -> usize {
    let floor = CochainSpec::floor(q(2, 3)).expect("positive scale");
    let families = [
        CocycleSpec::Zero,
        carry(1, 1),
        carry(1, 2),
        carry(3, 1),
        carry(7, 5),
        CocycleSpec::Coboundary(floor),
    ];
    let zero = GBetaElement::zero();
    for beta in &families {
        let name = cocycle_name(beta);
        for i in 0..trials {
            let (x, y, w) = (random::gbeta(rng, 64), random::gbeta(rng, 64), random::gbeta(rng, 64));
            let case = || format!("{name} trial {i}: {x}, {y}, {w}");
            rec.check(
                x.add(&y, beta).add(&w, beta) == x.add(&y.add(&w, beta), beta),
                "associativity",
                case,
            );
            rec.check(x.add(&y, beta) == y.add(&x, beta), "commutativity", case);
            rec.check(x.add(&zero, beta) == x && zero.add(&x, beta) == x, "identity", case);
            rec.check(x.add(&x.neg(beta), beta) == zero, "inverse", case);
            if x < y {
                rec.check(x.add(&w, beta) < y.add(&w, beta), "order compatibility", case);
            }
            rec.check(x.sub(&y, beta).is_positive() == (x > y), "positive cone", case);
        }
    }
    let c1 = carry(1, 1);
    let half = GBetaElement::new(0, q(1, 2));
    rec.check(half.add(&half, &c1) == GBetaElement::new(-1, q(1, 1)), "witness", || {
        "(0,1/2)+(0,1/2) under carry 1".into()
    });
    rec.check(half.neg(&c1) == GBetaElement::new(1, q(-1, 2)), "witness", || "-(0,1/2) under carry 1".into());
    families.len() * trials
}

fn coboundary_equivalence(rng: &mut ChaCha8Rng, trials: usize, rec: &mut Recorder) -> usize {
    // carry(l) is the coboundary of floor(l), so it is equivalent to zero
    let families = [(q(1, 1), carry(1, 1)), (q(7, 5), carry(7, 5))];
    let zero = CocycleSpec::Zero;
    for (scale, beta) in &families {
        let psi = CochainSpec::floor(scale.clone()).expect("positive scale");
        let name = cocycle_name(beta);
        for i in 0..trials {
            let pair = (random::rational(rng, 64, -8, 8), random::rational(rng, 64, -8, 8));
            rec.check(cocycles_equivalent(beta, &zero, &psi, std::slice::from_ref(&pair)), "equivalence", || {
                format!("{name} trial {i}: ({}, {})", pair.0, pair.1)
            });
            let (x, y) = (random::gbeta(rng, 64), random::gbeta(rng, 64));
            let case = || format!("{name} trial {i}: {x}, {y}");
            let (fx, fy) = (x.change_cocycle(&psi), y.change_cocycle(&psi));
            rec.check(x.add(&y, beta).change_cocycle(&psi) == fx.add(&fy, &zero), "homomorphism", case);
            rec.check(x.cmp(&y) == fx.cmp(&fy), "order preserving", case);
            let back = GBetaElement::new(&fx.z - psi.eval(&fx.h), fx.h.clone());
            rec.check(back == x, "bijective", case);
        }
    }
    families.len() * trials
}

// ---- coefficient field ----

fn coefficient_field(rng: &mut ChaCha8Rng, trials: usize, rec: &mut Recorder) -> usize {
    let mut count = 0;
    for p in [2, 5] {
        for e in 1..=3 {
            let cfg = FieldConfig::new(p, e, 32).expect("valid field");
            let name = format!("p={p} e={e}");
            rec.check(ExtElement::pi(&cfg).val(&cfg) == Some(1), "val(pi) = 1", || name.clone());
            rec.check(
                ExtElement::from_i64(p as i64, &cfg).val(&cfg) == Some(e as i64),
                "val(p) = e",
                || name.clone(),
            );
            for i in 0..trials {
                coefficient_trial(rng, &cfg, rec, &format!("{name} trial {i}"));
            }
            count += trials;
        }
    }
    count
}

fn coefficient_trial(rng: &mut ChaCha8Rng, cfg: &FieldConfig, rec: &mut Recorder, case: &str) {
    let c = || case.to_string();
    let (x, y, w) = (random::ext(rng, cfg, -3..=3), random::ext(rng, cfg, -3..=3), random::ext(rng, cfg, -3..=3));
    let same = |a: &ExtElement, b: &ExtElement| a.agrees(b, cfg);
    rec.check(same(&x.add(&y, cfg).add(&w, cfg), &x.add(&y.add(&w, cfg), cfg)), "additive associativity", c);
    rec.check(same(&x.add(&y, cfg), &y.add(&x, cfg)), "additive commutativity", c);
    rec.check(x.add(&x.neg(cfg), cfg).is_zero(), "additive inverse", c);
    rec.check(same(&x.mul(&y, cfg).mul(&w, cfg), &x.mul(&y.mul(&w, cfg), cfg)), "associativity", c);
    rec.check(same(&x.mul(&y, cfg), &y.mul(&x, cfg)), "commutativity", c);
    rec.check(
        same(&x.mul(&y.add(&w, cfg), cfg), &x.mul(&y, cfg).add(&x.mul(&w, cfg), cfg)),
        "distributivity",
        c,
    );
    rec.check(same(&x.mul(&ExtElement::one(cfg), cfg), &x), "one is neutral", c);
    if let (Some(a), Some(b)) = (rec.ok(x.inv(cfg), "inverse", case), rec.ok(x.inv_linear(cfg), "inverse", case)) {
        rec.check(same(&a, &b), "newton inverse matches linear solve", c);
        rec.check(same(&x.mul(&a, cfg), &ExtElement::one(cfg)), "x * inv(x) = 1", c);
    }
    let (vx, vy) = (x.val(cfg).expect("nonzero"), y.val(cfg).expect("nonzero"));
    rec.check(x.mul(&y, cfg).val(cfg) == Some(vx + vy), "valuation of product", c);
    let vs = x.add(&y, cfg).val(cfg);
    rec.check(vs.is_none_or(|v| v >= vx.min(vy)), "ultrametric inequality", c);
    if vx != vy {
        rec.check(vs == Some(vx.min(vy)), "ultrametric equality", c);
    }
    let (u, v) = (random::integral_ext(rng, cfg), random::integral_ext(rng, cfg));
    let p = cfg.p() as u64;
    let res = |a: &ExtElement| a.residue(cfg).expect("integral") as u64;
    rec.check(res(&u.add(&v, cfg)) == (res(&u) + res(&v)) % p, "residue of sum", c);
    rec.check(res(&u.mul(&v, cfg)) == (res(&u) * res(&v)) % p, "residue of product", c);
}

// ---- twisted series ----

/// Contexts for the series suites: every (cocycle, ramification) pair.
fn series_contexts(max_terms: usize) -> Vec<Arc<SeriesContext>> {
    let mut out = Vec::new();
    for beta in [CocycleSpec::Zero, carry(1, 1), carry(7, 5)] {
        for e in [1, 2] {
            out.push(SeriesContext::new(
                FieldConfig::new(5, e, 16).expect("valid field"),
                beta.clone(),
                TruncationPolicy::new(max_terms, q(8, 1)).expect("valid policy"),
            ));
        }
    }
    out
}

fn context_name(ctx: &SeriesContext) -> String {
    format!("{} e={}", cocycle_name(&ctx.cocycle), ctx.field.e())
}

fn twisted_field(rng: &mut ChaCha8Rng, trials: usize, rec: &mut Recorder) -> usize {
    let contexts = series_contexts(4096);
    for ctx in &contexts {
        let name = context_name(ctx);
        for i in 0..trials {
            let case = format!("{name} trial {i}");
            let r = twisted_trial(rng, ctx, rec, &case);
            rec.ok(r, "series arithmetic", &case);
        }
    }
    contexts.len() * trials
}

fn twisted_trial(rng: &mut ChaCha8Rng, ctx: &Arc<SeriesContext>, rec: &mut Recorder, case: &str) -> Result<(), Error> {
    let shape = SeriesShape::dense();
    let a = random::series(rng, ctx, &shape);
    let b = random::series(rng, ctx, &shape);
    let c = random::series(rng, ctx, &shape);
    let d = random::nonzero_series(rng, ctx, &SeriesShape::coarse());
    let beta = &ctx.cocycle;
    let one = TwistedSeries::one(ctx);
    let k = || case.to_string();

    rec.check(a.add(&b)?.add(&c)?.agrees(&a.add(&b.add(&c)?)?), "additive associativity", k);
    rec.check(a.add(&b)?.agrees(&b.add(&a)?), "additive commutativity", k);
    rec.check(a.add(&a.neg())?.is_zero(), "additive inverse", k);
    let ab = a.mul(&b)?;
    rec.check(ab.mul(&c)?.agrees(&a.mul(&b.mul(&c)?)?), "associativity", k);
    rec.check(ab.agrees(&b.mul(&a)?), "commutativity", k);
    rec.check(a.mul(&b.add(&c)?)?.agrees(&ab.add(&a.mul(&c)?)?), "distributivity", k);
    rec.check(a.mul(&one)?.agrees(&a) && one.mul(&a)?.agrees(&a), "one is neutral", k);
    rec.check(d.mul(&d.inv_geometric()?)?.agrees(&one), "multiplicative inverse", k);

    let (va, vb) = (a.val(), b.val());
    rec.check(ab.val() == va.add(&vb, beta), "val(ab) = val(a) + val(b)", k);
    let vs = a.add(&b)?.val();
    rec.check(vs >= va.clone().min(vb.clone()), "ultrametric inequality", k);
    if va != vb {
        rec.check(vs == va.min(vb), "ultrametric equality", k);
    }
    rec.check((a.val() == SeriesValuation::Infinity) == a.is_zero(), "val is infinite only at zero", k);

    // on monomials the twist is exactly what G_beta's addition predicts
    if let (Some(x), Some(y)) = (a.leading_term(), b.leading_term()) {
        let mx = TwistedSeries::monomial(ctx, x.h.clone(), x.coeff.clone());
        let my = TwistedSeries::monomial(ctx, y.h.clone(), y.coeff.clone());
        rec.check(mx.mul(&my)?.val() == mx.val().add(&my.val(), beta), "twist consistency", k);
    }

    let f = d.factor()?;
    let mono = TwistedSeries::monomial(ctx, f.h_tilde.clone(), f.c.clone());
    rec.check(mono.mul(&one.sub(&f.a)?)?.agrees(&d), "factorization round trip", k);
    rec.check(f.a.terms().iter().all(|t| t.h.is_positive()), "factor has positive support", k);
    Ok(())
}

fn dual_inversion(rng: &mut ChaCha8Rng, trials: usize, rec: &mut Recorder) -> usize {
    let contexts = series_contexts(4096);
    for i in 0..trials {
        let ctx = &contexts[rng.gen_range(0..contexts.len())];
        let case = format!("{} trial {i}", context_name(ctx));
        let f = random::nonzero_series(rng, ctx, &SeriesShape::coarse());
        let (Some(g), Some(it)) = (
            rec.ok(f.inv_geometric(), "geometric inversion", &case),
            rec.ok(f.inv_iterative(), "iterative inversion", &case),
        ) else {
            continue;
        };
        rec.check(g.agrees(&it), "geometric and iterative inverses agree", || case.clone());
        let residual = f.mul(&g).and_then(|p| p.sub(&TwistedSeries::one(ctx)));
        if let Some(r) = rec.ok(residual, "inverse residual", &case) {
            let past = match r.val() {
                SeriesValuation::Infinity => true,
                SeriesValuation::Finite(v) => &v.h >= ctx.truncation.cutoff(),
            };
            rec.check(past, "val(f inv(f) - 1) beyond the cutoff", || case.clone());
        }
    }
    trials
}

// ---- pseudo-limits ----

fn pseudo_limits(rng: &mut ChaCha8Rng, trials: usize, rec: &mut Recorder) -> usize {
    fixtures(rec);
    let contexts = series_contexts(4096);
    for i in 0..trials {
        let ctx = &contexts[rng.gen_range(0..contexts.len())];
        let case = format!("{} trial {i}", context_name(ctx));
        let (entries, ladder, expected) = random_prefix(rng, ctx);
        let Some(prefix) = rec.ok(PseudoCauchyPrefix::new(entries), "prefix accepted", &case) else {
            continue;
        };
        rec.check(prefix.ladder() == ladder.as_slice(), "ladder matches construction", || case.clone());
        rec.check(prefix.case() == expected, "case classification", || case.clone());
        if let Some(b) = rec.ok(pseudo_limit(&prefix), "pseudo-limit", &case) {
            let bad = rec.ok(prefix.first_ladder_mismatch(&b), "pseudo-limit", &case);
            rec.check(bad == Some(None), "val(b - c_a) = g_a", || format!("{case}: {bad:?}"));
        }
    }
    trials
}

/// A prefix built from steps `d_k` with known valuations, its ladder and
/// the case it should fall into.
fn random_prefix(
    rng: &mut ChaCha8Rng,
    ctx: &Arc<SeriesContext>,
) -> (Vec<TwistedSeries>, Vec<GBetaElement>, PseudoCauchyCase) {
    let cfg = &ctx.field;
    let stable = rng.gen_bool(0.5);
    let mut exps: Vec<RationalExponent> = Vec::new();
    let mut vals: Vec<i64> = Vec::new();
    let (pre, run) = if stable { (rng.gen_range(0..=2), rng.gen_range(2..=5)) } else { (rng.gen_range(2..=6), 0) };
    let top = if stable { random::rational(rng, 6, 1, 5) } else { RationalExponent::from_integer(6) };
    while exps.len() < pre {
        let h = random::rational(rng, 6, 0, 6);
        if h < top && !exps.contains(&h) {
            exps.push(h);
        }
    }
    exps.sort();
    vals.extend((0..pre).map(|_| rng.gen_range(-2..=3)));
    let mut gamma = rng.gen_range(-2..=1);
    for _ in 0..run {
        exps.push(top.clone());
        vals.push(gamma);
        gamma += rng.gen_range(1..=3);
    }
    let tail_shape = SeriesShape { max_terms: 3, max_den: 6, lo: 0, hi: 8 };
    let mut entries = vec![random::series(rng, ctx, &SeriesShape::coarse())];
    let mut ladder = Vec::new();
    for (h, v) in exps.iter().zip(&vals) {
        let unit = random::ext(rng, cfg, 0..=0);
        let lead = unit.mul_pi_power(v - unit.val(cfg).expect("nonzero"), cfg);
        let tail: Vec<_> = random::series(rng, ctx, &tail_shape)
            .terms()
            .iter()
            .filter(|t| &t.h > h)
            .map(|t| (t.h.clone(), t.coeff.clone()))
            .collect();
        let step = TwistedSeries::from_terms(ctx, std::iter::once((h.clone(), lead)).chain(tail))
            .expect("sorted terms");
        ladder.push(GBetaElement::new(*v, h.clone()));
        let next = entries.last().expect("nonempty").add(&step).expect("same context");
        entries.push(next);
    }
    let case = if stable { PseudoCauchyCase::ExponentStable } else { PseudoCauchyCase::ExponentsIncrease };
    (entries, ladder, case)
}

fn fixtures(rec: &mut Recorder) {
    let ctx = SeriesContext::new(
        FieldConfig::new(5, 1, 16).expect("valid field"),
        carry(1, 1),
        TruncationPolicy::new(256, q(8, 1)).expect("valid policy"),
    );
    let cfg = &ctx.field;
    let one = ExtElement::one(cfg);

    // c_n = sum_{k=1..n} t^(k/(k+1))
    let entries: Vec<_> = (0..=5)
        .map(|n| TwistedSeries::from_terms(&ctx, (1..=n).map(|k| (q(k, k + 1), one.clone()))).expect("sorted"))
        .collect();
    let expected_limit = entries[5].clone();
    match PseudoCauchyPrefix::new(entries).and_then(|p| pseudo_limit(&p).map(|b| (p, b))) {
        Ok((prefix, b)) => {
            rec.check(prefix.case() == PseudoCauchyCase::ExponentsIncrease, "fixture: exponent ladder case", String::new);
            rec.check(b == expected_limit, "fixture: exponent ladder limit", String::new);
            rec.check(prefix.first_ladder_mismatch(&b) == Ok(None), "fixture: exponent ladder contract", String::new);
        }
        Err(e) => rec.check(false, "fixture: exponent ladder", || e.to_string()),
    }

    // c_n = (sum_{k<=n} 5^k) t^0, whose limit is 1/(1-5)
    let entries: Vec<_> = (0..=8u32)
        .map(|n| {
            let s: BigInt = (0..=n).map(|k| BigInt::from(5).pow(k)).sum();
            TwistedSeries::monomial(&ctx, q(0, 1), ExtElement::from_padic(PadicNumber::from_int(&s, cfg), cfg))
        })
        .collect();
    match PseudoCauchyPrefix::new(entries).and_then(|p| pseudo_limit(&p).map(|b| (p, b))) {
        Ok((prefix, b)) => {
            rec.check(prefix.case() == PseudoCauchyCase::ExponentStable, "fixture: coefficient ladder case", String::new);
            rec.check(prefix.first_ladder_mismatch(&b) == Ok(None), "fixture: coefficient ladder contract", String::new);
            let geometric = PadicNumber::from_i64(-4, cfg).inv(cfg).expect("unit");
            let digits = b.terms().first().map(|t| t.coeff.coords()[0].digits(cfg)).unwrap_or_default();
            let good = digits.len() >= 6 && digits[..6] == geometric.digits(cfg)[..6];
            rec.check(good, "fixture: coefficient ladder digits", || format!("{digits:?}"));
        }
        Err(e) => rec.check(false, "fixture: coefficient ladder", || e.to_string()),
    }
}

// ---- lifting ----

fn lifting(rng: &mut ChaCha8Rng, trials: usize, rec: &mut Recorder) -> usize {
    let compatible = [(carry(1, 1), q(1, 1)), (CocycleSpec::Zero, q(2, 1)), (CocycleSpec::Zero, q(1, 3)), (carry(7, 5), q(1, 1))];
    for (beta, scale) in &compatible {
        for e in [1, 2] {
            let ctx = SeriesContext::new(
                FieldConfig::new(5, e, 16).expect("valid field"),
                beta.clone(),
                TruncationPolicy::new(4096, q(8, 1)).expect("valid policy"),
            );
            let case = format!("{} q={scale}", context_name(&ctx));
            let spec = GroupAutoSpec::new(scale.clone()).expect("positive");
            let id = CoeffAutoSpec::identity(&ctx.field);
            if let Some(report) = rec.ok(verify_lift_hom(&id, &spec, &ctx, trials, rng), "lift", &case) {
                for f in report.failures.iter().take(3) {
                    rec.check(false, "compatible lift", || format!("{case} trial {}: {}", f.trial, f.detail));
                }
            }
        }
    }

    // the cocycle check must single out q = 1 for carry 1
    let c1 = carry(1, 1);
    let mut pairs = vec![(q(1, 2), q(1, 2)), (q(1, 2), q(1, 4))];
    pairs.extend((0..50).map(|_| (random::rational(rng, 12, -4, 4), random::rational(rng, 12, -4, 4))));
    for scale in [q(1, 1), q(2, 1), q(3, 1), q(1, 2), q(2, 3)] {
        let spec = GroupAutoSpec::new(scale.clone()).expect("positive");
        let is_id = scale == q(1, 1);
        rec.check(check_cocycle_compat(&spec, &c1, &pairs) == is_id, "cocycle compatibility", || {
            format!("carry 1, q={scale}")
        });
        rec.check(check_cocycle_compat(&spec, &CocycleSpec::Zero, &pairs), "cocycle compatibility", || {
            format!("zero, q={scale}")
        });
    }
    let double = GroupAutoSpec::new(q(2, 1)).expect("positive");
    rec.check(!check_cocycle_compat(&double, &c1, &[(q(1, 2), q(1, 2))]), "discriminating pair", || {
        "carry 1, q=2 at (1/2,1/2)".into()
    });

    // pi -> -pi is a field automorphism but moves the cross-section
    let cfg = FieldConfig::new(5, 2, 16).expect("valid field");
    let minus = CoeffAutoSpec::new(ExtElement::pi(&cfg).neg(&cfg), &cfg).expect("(-pi)^2 = p");
    rec.check(!check_sigma_compat(&minus, &cfg, &[1]), "sigma compatibility", || "pi -> -pi".into());
    rec.check(check_sigma_compat(&CoeffAutoSpec::identity(&cfg), &cfg, &[-3, 1, 4]), "sigma compatibility", || {
        "pi -> pi".into()
    });
    let ctx = SeriesContext::new(cfg, CocycleSpec::Zero, TruncationPolicy::new(4096, q(8, 1)).expect("valid policy"));
    let n = trials.min(20);
    if let Some(report) = rec.ok(verify_lift_hom(&minus, &GroupAutoSpec::identity(), &ctx, n, rng), "lift", "pi -> -pi") {
        rec.check(!report.failed(LiftClause::Multiplicative), "pi -> -pi stays multiplicative", String::new);
        rec.check(report.failed(LiftClause::Section), "pi -> -pi flagged by the section clause", String::new);
    }
    compatible.len() * 2 * trials
}
