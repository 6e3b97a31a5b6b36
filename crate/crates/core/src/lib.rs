pub mod cli;
pub mod delaunay;
pub mod error;
pub mod export;
pub mod fixtures;
pub mod geom;
pub mod jointcover;
pub mod planner;
pub mod robot;
pub mod scene;
pub mod states;

pub use error::{Error, Result};
