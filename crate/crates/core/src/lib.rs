#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod matrixlab;
pub mod problems;
pub mod solvers;
pub mod certificates;
pub mod bench;
