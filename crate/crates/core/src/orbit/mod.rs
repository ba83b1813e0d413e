//! Open sets, closure stabilizers and return-time sets.

mod generate;
mod open_set;
mod returns;

pub use generate::{
    return_set_linear, return_set_linear_from, return_set_polynomial, return_set_skew, weyl_discrepancy,
    IntegerPolynomial, SkewSystem,
};
pub(crate) use generate::CompensatedSum;
pub use open_set::{Arc, Membership, OpenBox, OpenSet, ResidueSet, Shift, StabilizerReport, MEMBERSHIP_GUARD};
pub use returns::{ReturnSet, Window};
