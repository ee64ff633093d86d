#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bieberbach;
pub mod cli;
pub mod clifford;
pub mod deform;
pub mod descriptor;
pub mod error;
pub mod frame;
pub mod identities;
pub mod linalg;
pub mod spin;
pub mod tks;
pub mod tolerances;
pub mod zoo;
