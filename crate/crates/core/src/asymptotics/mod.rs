//! Predictor side: Gaussian moments, half-power series composition, the
//! truncated expansion and remainder envelopes.

pub mod moments;
pub mod poly;
pub mod predict;
pub mod series;

pub use moments::{gaussian_moment, MomentTable};
pub use poly::Poly;
pub use predict::{compose_expansion, predict, predict_with, remainder_bound, szego_remainder_bound, BranchTerm, Prediction, Predictor};
pub use series::HalfPowerSeries;
