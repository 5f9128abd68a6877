use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("word is not over the expected alphabet")]
    AlphabetMismatch,
    #[error("element is trivial")]
    TrivialElement,
    #[error("ineligible Tietze move: {0}")]
    IneligibleMove(String),
    #[error("coset table is incomplete")]
    IncompleteTable,
    #[error("oracle protocol error: {0}")]
    OracleProtocol(String),
    #[error("budget exhausted after {0} steps")]
    BudgetExhausted(u64),
    #[error("word oracle is not a total decision procedure")]
    NonTotalOracle,
    #[error("map is not a retraction: generator {0} is not fixed by rho∘rho = rho")]
    NotARetraction(usize),
    #[error("not a homomorphism: relator {0} does not map to the identity")]
    NotAHomomorphism(usize),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
