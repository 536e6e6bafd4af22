use std::fmt;

use crate::pasting::Color;
use crate::pcv::{FamilyKind, Pcv};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate subset: every block count is zero")]
    DegenerateSubset,

    #[error("invalid parameters: {0}")]
    Parameter(String),

    #[error("{kind} member {pcv} contains no crossing edge; the clause would be empty")]
    EmptyClause { kind: FamilyKind, pcv: Pcv },

    #[error("assignment does not cover variable {0}")]
    IncompleteAssignment(usize),

    #[error("coloring is not total: no entry for {0}")]
    Domain(Pcv),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("certificate rejected: vertices {clique:?} span a {color} clique")]
    CertificateRejected { clique: Vec<u32>, color: Color },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl fmt::Display) -> Self {
        Error::Parse {
            line,
            msg: msg.to_string(),
        }
    }
}
