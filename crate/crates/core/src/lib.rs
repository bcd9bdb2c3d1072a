//! Finite-scale domain theory.
//!
//! Finite posets stand in for dcpos: every directed subset of a finite poset
//! contains its supremum, and monotone maps between them are exactly the
//! Scott-continuous ones. On top of that the crate builds the lifting monad,
//! products and exponentials, least fixed points, towers of
//! embedding-projection pairs with their bilimit, and Scott's D∞ together with
//! a cutoff denotation of untyped λ-terms.

pub mod bilimit;
pub mod constructions;
pub mod dinfty;
pub mod error;
pub mod lambda;
pub mod laws;
pub mod lifting;
pub mod maps;
pub mod poset;

pub use bilimit::{constant_tower, CompactElement, Thread, Tower, TowerJson};
pub use constructions::{exponential, lfp, lfp_map, product, ExponentialPoset, ProductPoset};
pub use dinfty::{DInfinity, FinFun, IsoReport, TowerOptions};
pub use error::{Error, Result};
pub use lambda::{denote, parse_term, Env, Term};
pub use laws::{Counterexample, LawReport};
pub use lifting::{
    free_extension_dcpo, free_extension_set, kleisli_extend, lift_functor, LiftedPoset, PartialElement,
};
pub use maps::{compose, enumerate_continuous_maps, is_continuous_retract, validate_ep_pair, EpPair, MonotoneMap};
pub use poset::{Poset, PosetJson};

/// Validates a relation table as a partial order.
pub fn validate_poset(leq: Vec<Vec<bool>>) -> Result<Poset> {
    Poset::new(leq)
}

/// The monotone inverse of `f`, if `f` is an order isomorphism.
pub fn is_isomorphism(f: &MonotoneMap) -> Option<MonotoneMap> {
    f.inverse()
}

/// The `D_n` tower up to `depth` with default options.
pub fn build_dn_tower(depth: usize) -> Result<DInfinity> {
    DInfinity::build(depth)
}
