//! Error types shared across the workbench.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SyntaxError {
    #[error("unbound variable `{name}`")]
    UnboundVariable { name: String },
    #[error("unknown constant `{name}`")]
    UnknownConstant { name: String },
    #[error("unknown relation `{name}`")]
    UnknownRelation { name: String },
    #[error("unknown basic type `{name}`")]
    UnknownBasicType { name: String },
    #[error("type mismatch: {detail}")]
    TypeMismatch { detail: String },
    #[error("mode violation: {what}")]
    ModeViolation { what: String },
    #[error("duplicate {kind} `{name}`")]
    DuplicateName { kind: String, name: String },
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DeductionError {
    #[error("rule `{rule}` is not available in mode {mode}")]
    RuleNotInMode { rule: String, mode: String },
    #[error("side condition violated for rule `{rule}`: {detail}")]
    SideConditionViolated { rule: String, detail: String },
    #[error("rule schema mismatch for `{rule}`: {detail}")]
    SchemaMismatch { rule: String, detail: String },
    #[error("axiom index {index} out of range (theory has {count} axioms)")]
    AxiomOutOfRange { index: usize, count: usize },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SpaceError {
    #[error("subset member `{member}` is not a point of the space")]
    MemberOutOfRange { member: String },
    #[error("unknown point `{name}`")]
    UnknownPoint { name: String },
    #[error("not a topology: {detail}")]
    NotTopology { detail: String },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SheafError {
    #[error("sheaves live over different base spaces")]
    BaseMismatch,
    #[error("subsheaves have different parents")]
    ParentMismatch,
    #[error("not a sheaf: {detail}")]
    NotSheaf { detail: String },
    #[error("not a sheaf morphism: {detail}")]
    NotMorphism { detail: String },
    #[error("projection is not a local homeomorphism: {detail}")]
    NotEtale { detail: String },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SemanticsError {
    #[error("no sheaf assigned to basic type `{name}`")]
    UnknownBasicType { name: String },
    #[error("type `{ty}` is not interpreted by a decidable sheaf")]
    NotDecidable { ty: String },
    #[error("no subsheaf assigned to relation `{name}`")]
    UnknownRelation { name: String },
    #[error("flavor mismatch: {detail}")]
    FlavorMismatch { detail: String },
    #[error("model file error: {detail}")]
    ModelFile { detail: String },
    #[error("interpretation of type `{ty}` is too large (stalk bound {bound})")]
    StalkTooLarge { ty: String, bound: usize },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum HenkinError {
    #[error("term `{term}` denotes a function missing from its carrier")]
    EscapesCarrier { term: String },
    #[error("no carrier for type `{ty}`")]
    MissingCarrier { ty: String },
    #[error("unknown carrier element `{name}` at type `{ty}`")]
    UnknownElement { name: String, ty: String },
    #[error("environment does not cover variable `{name}`")]
    UnboundVariable { name: String },
    #[error("carrier for type `{ty}` is too large to enumerate")]
    CarrierTooLarge { ty: String },
    #[error("carrier for type `{ty}` cannot be edited: {detail}")]
    CarrierEdit { ty: String, detail: String },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}
