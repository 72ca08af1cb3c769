//! Exact arithmetic for twisted Hahn series `L(t^Q, beta)`.
//!
//! The value group is the extension `G_beta` of `Q` by `Z` determined by a
//! 2-cocycle `beta`; coefficients live in the totally ramified extension
//! `L = Q_p(pi)`, `pi^e = p`, with cross-section `m -> pi^m`. Series multiply
//! with the twist `a t^h * b t^h' = a b pi^(-beta(h,h')) t^(h+h')` and carry
//! the valuation `(v(leading coefficient), leading exponent)` in `G_beta`.

pub mod coefficient_field;
pub mod error;
pub mod lifting;
pub mod ordered_groups;
pub mod random;
pub mod rational;
pub mod twisted_series;
pub mod verify;

pub use coefficient_field::{cross_section, ExtElement, FieldConfig, PadicNumber};
pub use error::{Error, Result};
pub use lifting::{
    check_cocycle_compat, check_sigma_compat, lift_auto, verify_lift_hom, CoeffAutoSpec, GroupAutoSpec,
};
pub use ordered_groups::{
    check_cocycle, coboundary_eval, cocycles_equivalent, CochainSpec, CocycleReport, CocycleSpec,
    GBetaElement, IntValue,
};
pub use rational::RationalExponent;
pub use twisted_series::{
    pseudo_cauchy_check, pseudo_limit, Factorization, InversionAlgorithm, PseudoCauchyCase,
    PseudoCauchyPrefix, PseudoCauchyReport, SeriesContext, SeriesValuation, TruncationPolicy,
    TwistedSeries,
};
