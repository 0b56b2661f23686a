use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("block mismatch: {0}")]
    BlockMismatch(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("stage {stage} out of range 1..={max}")]
    StageOutOfRange { stage: usize, max: usize },
    #[error(
        "grid too coarse: resolution {resolution} cannot resolve phase speed {speed} (need resolution >= 8 * speed)"
    )]
    GridTooCoarse { resolution: usize, speed: String },
    #[error("corner has zero rank in block {block}")]
    ZeroRankCorner { block: usize },
    #[error("source block {0} does not have circle spectrum")]
    NotCircleSource(usize),
    #[error("class has nonzero winding in block {0}; quotient norm is defined on torsion classes only")]
    NonTorsionClass(usize),
    #[error("system does not have uniformly varied determinant: {0}")]
    NotUvd(String),
    #[error("systems were built from different parameters")]
    ParamMismatch,
    #[error("no admissible stage m <= {stage_count} with 4^(m-1) > 8M+8 (M = {amplitude})")]
    StageBudgetExceeded { stage_count: usize, amplitude: f64 },
    #[error("stage m = {m} is not admissible: 4^(m-1) must exceed 8M+8 and n < m")]
    InadmissibleStage { m: usize },
    #[error("lattice modes differ")]
    ModeMismatch,
}
