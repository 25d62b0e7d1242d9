use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid rational {0:?}")]
    ParseRational(String),
    #[error("rect {0} has empty interior")]
    DegenerateRect(String),
    #[error("layout has no rects")]
    EmptyLayout,
    #[error("rects {0} and {1} overlap")]
    Overlap(String, String),
    #[error("rects do not cover the bounding box: {0}")]
    Coverage(String),
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("layout is not generic (four rects share a corner)")]
    Nongeneric,
    #[error("id {0} is reserved for the extended dual")]
    ReservedId(String),
    #[error("invalid plane graph: {0}")]
    InvalidGraph(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph is not 2-connected")]
    NotBiconnected,
    #[error("graph has {0} vertices, above the isomorphism size limit {1}")]
    SizeLimit(usize, usize),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("{0} is not a cut vertex")]
    NotCutVertex(String),
    #[error("removing {0} leaves more than two components")]
    MoreThanTwoComponents(String),
    #[error("{0} is a cut vertex")]
    CutVertex(String),
    #[error("{0} is not on the outer face")]
    NotOuter(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("reconstructed layout failed verification: {0}")]
    InternalVerification(String),
    #[error("layout is not sliceable")]
    NotSliceable,
    #[error("aspect assignment: {0}")]
    Assignment(String),
    #[error("not an alternating 4-cycle of the structure")]
    InvalidCycle,
    #[error("invalid transversal structure: {0}")]
    InvalidTransversal(String),
    #[error("n = {0} outside the supported range 1..={1}")]
    Cap(usize, usize),
    #[error("input: {0}")]
    Input(String),
}
