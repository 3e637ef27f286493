//! Exit codes and one-line failure reasons.

use std::fmt;

use spx_core::face_ring::{ExprError, FaceRingError};
use spx_core::generators::GeneratorError;
use spx_core::homology::{GorensteinReport, HomologyError};
use spx_core::index::IndexError;
use spx_core::poset::PosetError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Failed = 1,
    Input = 2,
    Internal = 3,
}

/// A failure with a stable upper-case code, rendered on one line as
/// `spx: CODE: message`.
#[derive(Debug, Clone)]
pub struct Failure {
    pub exit: Exit,
    pub code: &'static str,
    pub message: String,
}

impl Failure {
    pub fn new(exit: Exit, code: &'static str, message: impl Into<String>) -> Self {
        Failure {
            exit,
            code,
            message: message.into().replace('\n', " "),
        }
    }

    pub fn input(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(Exit::Input, code, message)
    }

    pub fn failed(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(Exit::Failed, code, message)
    }

    /// The failing-link witness of a negative Gorenstein* report.
    pub fn not_gorenstein(report: &GorensteinReport) -> Self {
        let detail = match &report.failure {
            Some(w) => format!(
                "link of chain {:?} has dimension {} and reduced betti {:?}, expected a {}-sphere",
                w.face, w.link_dim, w.betti, w.expected_dim
            ),
            None => "link check failed".to_string(),
        };
        Failure::failed("NOT_GORENSTEIN", detail)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "spx: {}: {}", self.code, self.message)
    }
}

impl From<PosetError> for Failure {
    fn from(e: PosetError) -> Self {
        Failure::input("BAD_POSET", e.to_string())
    }
}

impl From<GeneratorError> for Failure {
    fn from(e: GeneratorError) -> Self {
        Failure::input("BAD_GENERATOR", e.to_string())
    }
}

impl From<ExprError> for Failure {
    fn from(e: ExprError) -> Self {
        Failure::input("BAD_EXPRESSION", e.to_string())
    }
}

impl From<HomologyError> for Failure {
    fn from(e: HomologyError) -> Self {
        let code = match e {
            HomologyError::NotPure(_) => "NOT_PURE",
            HomologyError::NotPseudomanifold { .. } => "NOT_PSEUDOMANIFOLD",
            HomologyError::NonOrientable { .. } => "NON_ORIENTABLE",
        };
        Failure::failed(code, e.to_string())
    }
}

impl From<FaceRingError> for Failure {
    fn from(e: FaceRingError) -> Self {
        match e {
            FaceRingError::RankZero => Failure::input("RANK_ZERO", e.to_string()),
            FaceRingError::NotPure => Failure::failed("NOT_PURE", e.to_string()),
            FaceRingError::SingularFacet { .. } => Failure::input("SINGULAR_FACET", e.to_string()),
            FaceRingError::Shape { .. } => Failure::input("BAD_SHAPE", e.to_string()),
            FaceRingError::RetryExhausted(_) => {
                Failure::new(Exit::Internal, "RETRY_EXHAUSTED", e.to_string())
            }
        }
    }
}

impl From<IndexError> for Failure {
    fn from(e: IndexError) -> Self {
        let internal = e.is_internal();
        match e {
            IndexError::Homology(h) => h.into(),
            IndexError::Parameters(p) => p.into(),
            IndexError::WrongDegree { .. } => Failure::input("WRONG_DEGREE", e.to_string()),
            IndexError::Invalid => Failure::input("INVALID_POSET", e.to_string()),
            IndexError::NotGorenstein(ref report) => Failure::not_gorenstein(report),
            IndexError::NotPmOne { .. } => Failure::new(Exit::Internal, "NOT_PM_ONE", e.to_string()),
            IndexError::NotPolynomial { .. } => {
                Failure::new(Exit::Internal, "NOT_POLYNOMIAL", e.to_string())
            }
            IndexError::ClassMismatch { .. } => {
                Failure::new(Exit::Internal, "CLASS_MISMATCH", e.to_string())
            }
            IndexError::TheoremViolation { .. } => {
                Failure::new(Exit::Internal, "THEOREM_VIOLATION", e.to_string())
            }
        }
        .internal_if(internal)
    }
}

impl Failure {
    fn internal_if(mut self, internal: bool) -> Self {
        if internal {
            self.exit = Exit::Internal;
        }
        self
    }
}
