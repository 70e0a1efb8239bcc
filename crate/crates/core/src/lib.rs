//! Free-group outer automorphisms on marked graphs: topological
//! representatives, nonattracting subgroup systems, coned-off lengths and
//! bounded flaring checks for mapping tori.

pub mod classify;
pub mod electric;
pub mod flaring;
pub mod graph;
pub mod laminations;
pub mod par;
pub mod subgroups;
pub mod words;
