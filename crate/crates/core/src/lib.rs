//! Exact counting, estimation, sampling and verification for d-regular
//! multipartite r-uniform hypergraphs (r-dimensional binary contingency
//! tables with every margin equal to d).

pub mod acceptance;
pub mod analytic;
pub mod cli;
pub mod configmodel;
pub mod error;
pub mod estimate;
pub mod exact;
pub mod hypergraph;
pub mod numeric;
pub mod rng;
pub mod switching;

pub use error::{Error, Result};
pub use hypergraph::{make_multigraph_params, make_params, Configuration, Edge, Hypergraph, MultiHypergraph, Params};
pub use numeric::{BigCount, LogReal};
pub use rng::RngStream;
