pub mod algebraicity;
pub mod cli;
pub mod cgroup;
pub mod field;
pub mod galois;
pub mod gu;
pub mod lifting;
pub mod matrix;
pub mod polarisation;
pub mod pseudochar;
pub mod report;
