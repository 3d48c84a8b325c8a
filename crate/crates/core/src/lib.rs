// Index loops over small dense matrices read more clearly than iterator chains.
#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod averages;
pub mod brandt;
pub mod cache;
pub mod cli;
pub mod eigen;
pub mod error;
pub mod quaternion;
pub mod report;
pub mod special;
