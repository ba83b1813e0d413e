//! Finite transitive group actions: block systems generated by a subset,
//! simple subsets, and reconstruction of a pointed G-set from the set of
//! group elements that carry the base point into the subset.

pub mod blocks;
pub mod catalog;
pub mod error;
pub mod group;
pub mod perm;
pub mod search;

pub use blocks::{
    actions_isomorphic, actions_isomorphic_unpointed, block_system_generated, invariant_partitions, is_simple,
    members, point_set, reconstruct_from_return_subset, return_subset, setwise_stabilizer, BlockSystem, ReturnSubset,
};
pub use catalog::{catalog_group, parse_catalog, CatalogGroup};
pub use error::{Error, Result};
pub use group::{
    enumerate_group, transitive_actions, CosetAction, PermAction, PermGroup, DEFAULT_ORDER_CAP, SUBGROUP_ORDER_LIMIT,
};
pub use perm::{parse_generators, Perm};
pub use search::{
    search_counterexamples, verify_certificate, ActionSummary, Certificate, CertificateCheck, InstanceRecord, Regime,
    SearchLimits, SearchReport, OPEN_QUESTION_BANNER,
};
