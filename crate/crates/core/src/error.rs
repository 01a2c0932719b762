use thiserror::Error;

/// Errors produced by contour conversion, model building and the codecs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("edge {index} reverses the direction of its predecessor")]
    EdgeReversal { index: usize },
    #[error("edge {index} is not orthogonally adjacent to the previous endpoint")]
    NonAdjacentEdge { index: usize },
    #[error("empty edge sequence")]
    EmptyEdges,
    #[error("invalid PBM: {0}")]
    InvalidPbm(String),
    #[error("invalid contour text at line {line}: {reason}")]
    InvalidContourText { line: usize, reason: String },
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("bitstream truncated")]
    Truncated,
    #[error("bad magic bytes")]
    BadMagic,
    #[error("model hash mismatch: stream has {stream:#018x}, loaded model is {model:#018x}")]
    ModelHashMismatch { stream: u64, model: u64 },
    #[error("invalid model file: {0}")]
    InvalidModel(String),
    #[error("contour length {len} does not fit the 16-bit length field")]
    ContourTooLong { len: usize },
    #[error("contour coordinate ({x},{y}) outside the {width}x{height} lattice")]
    OutOfBounds {
        x: i64,
        y: i64,
        width: u16,
        height: u16,
    },
    #[error("corrupt bitstream: {0}")]
    CorruptStream(String),
    #[error("no feasible approximation under the given constraints")]
    Infeasible,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
