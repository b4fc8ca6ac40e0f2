//! Finite CAT(0) cube complexes as median graphs, their normal cube paths,
//! and the explicit uniformly bounded covers that witness finite asymptotic
//! dimension, with exact checkers for every invariant involved.
//!
//! ```
//! use asdim_core::{generators, net};
//!
//! let grid = generators::grid(&[4, 4]).unwrap();
//! let cover = net::build_cover(&grid, 0, 1).unwrap();
//! assert!(cover.cover.uncovered(grid.vertex_count()).is_none());
//! ```

pub mod checks;
pub mod clique;
pub mod error;
pub mod generators;
pub mod io;
pub mod median;
pub mod metric;
pub mod net;
pub mod normal;

pub use error::{Error, Result};
pub use median::{BuildOptions, Hyperplane, MedianGraph, VertexSet, WallId};
pub use metric::{Cover, CoverMetrics, Dist, FiniteMetricSpace, SSystem};
pub use net::{Constants, GraphCover, Net, NetBuilder};
pub use normal::{NormalGeometry, NormalPath};
