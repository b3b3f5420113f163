use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),

    #[error("point outside chart radius: |w| = {norm} > {radius}")]
    OutOfChart { norm: f64, radius: f64 },

    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    #[error("under-resolved quadrature: {nodes} nodes, at least {required} required")]
    UnderResolved { nodes: usize, required: usize },

    #[error("no branch of the Legendrian within cutoff {cutoff} (nearest at {nearest})")]
    NoBranch { cutoff: f64, nearest: f64 },

    #[error("insufficient Taylor order: have {have}, need {need}")]
    TaylorOrder { have: u32, need: u32 },

    #[error("moment degree {degree} exceeds table limit {max}")]
    MomentDegree { degree: u32, max: u32 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid model string {0:?} (expected bf:<d> or cp1:<D>)")]
    ModelParse(String),

    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("not Legendrian: {0}")]
    NotLegendrian(String),
}
