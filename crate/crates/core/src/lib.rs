//! Finite-scale laboratory for prediction and evasion of functions on the
//! naturals: predictors and their transformations, exact linear algebra over
//! GF(p) and the rationals, divisibility chains, Luzin-type generator families,
//! symmetric forms built from them, a poset of finite predictor fragments, and
//! a cited diagram of cardinal invariants. The `harness` module drives all of
//! it from the command line with versioned artifacts.

pub mod algebra;
pub mod diagram;
pub mod gross;
pub mod harness;
pub mod luzin;
pub mod poset;
pub mod predict;
pub mod rng;
pub mod specker;
pub mod transforms;
