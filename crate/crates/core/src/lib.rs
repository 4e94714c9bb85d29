//! Deterministic mobile agents in anonymous port-labeled graphs: graphs,
//! views and quotients, a synchronous simulator, the agent protocols built
//! on them, and the decision problems they are checked against.

pub mod config;
pub mod corpus;
pub mod graph;
pub mod lift;
pub mod problems;
pub mod protocols;
pub mod sim;
pub mod suites;
pub mod views;
