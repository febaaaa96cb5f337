//! Planning toolkit for three-level lot-sizing with a distribution structure:
//! one plant supplies warehouses, each warehouse supplies its retailers, and
//! retailers face known dynamic demand with no capacity limits.

pub mod cli;
pub mod cuts;
pub mod formulations;
pub mod heuristic;
pub mod instance;
pub mod lotsizing;
pub mod oracle;
pub mod preprocess;
pub mod solution;
