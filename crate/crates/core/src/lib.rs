#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod certificates;
pub mod cycle;
pub mod error;
pub mod harness;
pub mod integrator;
pub mod model;
