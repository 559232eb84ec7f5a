//! Shortest S-T bibranchings: the cut LP and its integral dual, the
//! M♮-convex submodular flow formulation, and exact translations of optimal
//! certificates between the two.

pub mod arborescence;
pub mod bridge;
pub mod cli;
pub mod exec;
pub mod graph;
pub mod lp;
pub mod mconvex;
pub mod msf;
pub mod testkit;
