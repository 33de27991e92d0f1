//! Characteristic foliations of surfaces embedded in 3D contact
//! sub-Riemannian structures.
//!
//! The crate computes the phase portrait of the characteristic vector field
//! of an embedded surface (singular points, leaves, closed orbits), decides
//! finiteness of the induced distance on the surface via a reachability
//! graph, and runs perturbation experiments (orbit breaking, singular-pair
//! elimination, stability sweeps over embedding families).
//!
//! Pipeline: a [`scene::Scene`] pairs a [`contact::ContactStructure`] with a
//! [`surface::Surface`]; [`portrait::compute_portrait`] produces a
//! [`portrait::FoliationPortrait`]; [`graph::build_foliation_graph`] turns it
//! into a [`graph::FoliationGraph`] for distance queries.

pub mod contact;
pub mod experiments;
pub mod expr;
pub mod geom;
pub mod graph;
pub mod integrate;
pub mod portrait;
pub mod render;
pub mod report;
pub mod scene;
pub mod surface;
