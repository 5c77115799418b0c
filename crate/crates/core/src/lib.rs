pub mod algebra;
pub mod ap;
pub mod cyclo;
pub mod epe;
pub mod render;
pub mod report;
pub mod spectral;
pub mod tiling;
mod verdict;

pub use verdict::Verdict;
