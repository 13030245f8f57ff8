//! Random balanced graphs, balancedness and symmetry checks, first-order
//! distinguishing experiments, Ehrenfeucht-Fraisse games and exact rational
//! approximation tools.

pub mod balance;
pub mod diophantine;
pub mod distinguish;
pub mod ef;
pub mod experiment;
pub mod canon;
pub mod flow;
pub mod graph;
pub mod rational;
pub mod rng;
pub mod sampler;
pub mod symmetry;

pub use graph::{MultiGraph, SimpleGraph};
