use tailsheaf_core::AlgebraError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SheafError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("entry ({row}, {col}) has degree {found}, expected {expected}")]
    Degree { row: usize, col: usize, expected: i64, found: u32 },
    #[error("entry ({row}, {col}) must be zero since its twist gap {gap} is not positive")]
    Minimality { row: usize, col: usize, gap: i64 },
    #[error("matrix is not generically injective: rank {rank} < {rows} over the fraction field")]
    NotInjective { rank: usize, rows: usize },
    #[error("sheaf rank q - s = {0} is not positive")]
    RankTooSmall(i64),
    #[error("malformed presentation: {0}")]
    Shape(String),
    #[error("cohomology needs projective dimension n >= 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("coefficient {0} has no image in the target field")]
    FieldReduction(String),
    #[error("not a tail: {0}")]
    NotTail(String),
    #[error("not a minimal tail")]
    NotMinimal,
    #[error("not level: {0}")]
    NotLevel(String),
    #[error("every tried hyperplane meets the singular locus ({0} attempts)")]
    HyperplaneMeetsSing(usize),
    #[error("the singular locus has no rational point")]
    NoRationalPoint,
    #[error("the singular locus has points that are not rational")]
    IrrationalPoints,
    #[error("row {row} spans {dim} linear forms, expected {expected}")]
    RowSpan { row: usize, dim: usize, expected: usize },
    #[error("cannot clear the link between row {row} and the block at {point}")]
    Unsolvable { row: usize, point: String },
    #[error("degree-one block has column rank {found}, expected {expected}")]
    ColumnRank { found: usize, expected: usize },
    #[error("column {col} with twist {twist} does not split off")]
    NotSplit { col: usize, twist: i64 },
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("engines disagree at t = {t}: dense {dense:?}, groebner {groebner:?}")]
    EngineMismatch { t: i64, dense: Vec<u64>, groebner: Vec<u64> },
}

pub type Result<T> = std::result::Result<T, SheafError>;
