//! Local solubility of fibres over Q_p and R.
//!
//! Exact symbol computations cover conics; everything else goes through
//! [`padic_point_search`], a residue-tree search that only answers
//! `Soluble` with a Hensel certificate and `Insoluble` after exhausting every
//! primitive residue vector at some level.

mod cubic;
mod form;
mod search;
mod symbols;

use std::fmt;

pub use cubic::{cube_class, cubic_criterion, CubicKey};
pub use form::HomogeneousForm;
pub use search::{default_depth, max_depth, padic_point_search};
pub use symbols::{
    conic_soluble, hilbert, hilbert_reciprocity_check, is_kth_power_residue, legendre,
    real_soluble, relevant_places, Fibre, Rational,
};

use crate::arith;
use crate::error::{invalid, Result};

/// A place of Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Prime(u64),
    Infinity,
}

impl Place {
    pub fn prime(p: u64) -> Result<Self> {
        if !arith::is_prime(p) {
            return invalid(format!("{p} is not prime"));
        }
        Ok(Place::Prime(p))
    }

    pub fn as_prime(&self) -> Option<u64> {
        match *self {
            Place::Prime(p) => Some(p),
            Place::Infinity => None,
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(p) => write!(f, "{p}"),
            Place::Infinity => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Place {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "inf" | "infinity" | "oo" | "∞" | "R" => Ok(Place::Infinity),
            _ => {
                let p: u64 = t.parse().map_err(|_| {
                    crate::Error::InvalidArgument(format!("cannot parse place {t:?}"))
                })?;
                Place::prime(p)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Soluble,
    Insoluble,
    Unknown,
}

/// Evidence attached to a `Soluble` verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// A residue vector x mod p^level with v_p(F(x)) > 2·v_p(∂F/∂x_index(x)).
    Hensel {
        residues: Vec<u64>,
        level: u32,
        index: usize,
        value_valuation: u32,
        derivative_valuation: u32,
    },
    /// Decided by a closed-form symbol computation.
    Exact(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolubilityVerdict {
    pub status: Status,
    pub certificate: Option<Certificate>,
    /// Deepest residue level examined.
    pub depth: u32,
}

impl SolubilityVerdict {
    pub fn exact(soluble: bool, tag: &'static str) -> Self {
        if soluble {
            SolubilityVerdict {
                status: Status::Soluble,
                certificate: Some(Certificate::Exact(tag)),
                depth: 0,
            }
        } else {
            SolubilityVerdict {
                status: Status::Insoluble,
                certificate: None,
                depth: 0,
            }
        }
    }

    pub fn is_soluble(&self) -> bool {
        self.status == Status::Soluble
    }

    pub fn is_insoluble(&self) -> bool {
        self.status == Status::Insoluble
    }
}
