use thiserror::Error;

/// Location-tagged syntax error shared by every text format.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl SyntaxError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        SyntaxError { line, column, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtsError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state index {0} out of range")]
    StateOutOfRange(usize),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("invalid action label `{0}`")]
    BadLabel(String),
    #[error("no initial state")]
    NoInitial,
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error("tau may not be encapsulated or hidden")]
    TauInSet,
    #[error("communication function violates associativity closure: {0}")]
    InvalidComm(String),
    #[error("conflicting communication entries for {0} and {1}")]
    ConflictingComm(String, String),
    #[error(transparent)]
    Lts(#[from] LtsError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("expression contains variable `{0}`")]
    Open(String),
    #[error("operator `{0}` has no transition-system counterpart")]
    NoCounterpart(&'static str),
    #[error("iteration is not supported by axiom expansion")]
    StarUnsupported,
    #[error("law variable `{0}` is unbound")]
    Unbound(String),
    #[error(transparent)]
    Compose(#[from] ComposeError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("empty specification")]
    Empty,
    #[error("variable `{0}` defined twice")]
    Duplicate(String),
    #[error("variable `{0}` is used but not defined")]
    Undefined(String),
    #[error("specification is not guarded: {0}")]
    Unguarded(String),
    #[error("specification is not linear: {0}")]
    NotLinear(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("unknown place `{0}`")]
    UnknownPlace(String),
    #[error("transition {0} has an empty preset or postset")]
    EmptyArcSet(usize),
    #[error("empty initial marking")]
    EmptyMarking,
    #[error("transition {0} is not enabled")]
    NotEnabled(usize),
    #[error("state space exceeds the budget of {0} markings")]
    Incomplete(usize),
    #[error(transparent)]
    Compose(#[from] ComposeError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown model `{0}`")]
    Unknown(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
}
