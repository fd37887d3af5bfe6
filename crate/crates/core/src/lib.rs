//! Exact assignment spaces and assignment cohomology for torus actions
//! described by their infinitesimal stratification poset.

pub mod assignops;
pub mod builders;
pub mod cochain;
pub mod coeffsys;
pub mod description;
pub mod momentpoly;
pub mod ratlin;
pub mod stratposet;
