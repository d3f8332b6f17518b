pub mod error;
pub mod par;
pub mod special_math;
pub mod group_core;
pub mod constants;
pub mod kernels;
pub mod spectral;
pub mod extension;
pub mod inequalities;
pub mod radon;
pub mod report;
pub mod suite;
pub mod cli;
