//! Exact computation of k-th barycentric Olson constants BO(k, G) of finite
//! abelian groups.
//!
//! A set {g_1, ..., g_k} in an abelian group is k-barycentric if
//! g_1 + ... + g_k = k*g_j for some member g_j. BO(k, G) is the smallest l
//! such that every l-element subset of G contains a k-barycentric subset
//! (|G| + 1 by convention when no k-barycentric set exists at all).
//!
//! The crate has four layers:
//!
//! * [`group`] — invariant-factor groups, elements, subsets.
//! * [`engine`] — barycentric predicates, k-subset sum sets, and the exact
//!   BO solver (symmetry-reduced exhaustive search).
//! * [`constructions`] — explicit extremal witness families with built-in
//!   verification.
//! * [`theory`] — closed-form values and bounds with theorem tags, plus the
//!   coefficient identity they rest on.
//!
//! [`cache`] and [`suites`] back the command-line front end.

pub mod arith;
pub mod cache;
pub mod constructions;
pub mod engine;
pub mod error;
pub mod group;
pub mod suites;
pub mod theory;

pub use engine::{
    bo_exhaustive, has_k_barycentric_subset, is_barycentric, max_barycentric_free, s_k_set,
    sigma_k, BoResult, Method, SearchConfig,
};
pub use error::{Error, Result};
pub use group::{
    enumerate_groups, mult_order, sigma_set, ElementSet, FiniteAbelianGroup, GroupElement,
};
