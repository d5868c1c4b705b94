//! Stable one-dimensional orderings and visual summaries of 2D motion data.
//!
//! Given a set of entities moving in the plane, this crate computes one
//! ordering of the entities per frame, scores the result on spatial quality
//! (are spatial neighbors close in the ordering?) and stability (how much do
//! consecutive orderings change?), and renders the per-frame orderings as
//! dense raster timelines.
//!
//! The ordering methods fall into four families:
//!
//! * **fixed** — the [`dataset::TrajectoryDataset::fxd_order`] baseline,
//!   maximally stable, oblivious to geometry;
//! * **spatial subdivisions** — Hilbert and Z-order curves, point quadtree,
//!   and R-tree traversals in [`spatial`];
//! * **hierarchical clustering** — complete-linkage and shared-nearest-
//!   neighbor dendrograms with optimal leaf ordering in [`cluster`];
//! * **dimensionality reduction** — per-frame PCA stabilized by projection-
//!   vector interpolation (`spc`), its cluster-aware variant (`cpc`), and
//!   gradient-descent embeddings (Sammon mapping and t-SNE) with optional
//!   warm starts from the previous frame, all in [`dimred`].
//!
//! [`metrics`] implements the neighborhood-based quality measures,
//! [`datagen`] provides seeded boids-style generators, [`render`] draws rug
//! and line summaries, and [`experiment`] wires everything into comparison
//! runs and parameter sweeps.

pub mod cluster;
pub mod dataset;
pub mod datagen;
pub mod dimred;
pub mod error;
pub mod experiment;
pub mod geom;
pub mod io;
pub mod methods;
pub mod metrics;
pub mod neighbors;
pub mod render;
pub mod spatial;

pub use dataset::{OrderingSummary, TrajectoryDataset};
pub use error::{Error, Result};
pub use geom::{Bounds, Point};
