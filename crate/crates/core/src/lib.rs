#![allow(clippy::needless_range_loop)]

pub mod cover;
pub mod error;
pub mod instance;
pub mod pareto;
pub mod rng;
pub mod epo;
pub mod lp;
pub mod momab;
pub mod regret;
pub mod harness;
pub mod par;
