//! Exact arithmetic in `Z/p^N`, quadratic extensions of `Z_p` modulo `p^N`,
//! cyclotomic quotients `(Z/p^N)[y]/Phi_{p^n}(y)` and their tensor products.

mod analytic;
pub(crate) mod elem;
pub(crate) mod modular;
mod spec;

pub use elem::{Automorphism, RingElem, Valuation};
pub use spec::{RingKind, RingSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Serialized form of a ring handle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingSpecJson {
    pub p: u64,
    #[serde(rename = "N")]
    pub n: u32,
    pub kind: RingKind,
}

/// Serialized form of an element; `prec` is omitted at full precision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingElemJson {
    pub p: u64,
    #[serde(rename = "N")]
    pub n: u32,
    pub kind: RingKind,
    pub coords: Vec<u128>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prec: Option<u32>,
}

impl RingSpec {
    pub fn to_json(&self) -> RingSpecJson {
        RingSpecJson { p: self.p(), n: self.prec(), kind: self.kind().clone() }
    }
    pub fn from_json(j: &RingSpecJson) -> Result<Self> {
        RingSpec::new(j.p, j.n, j.kind.clone())
    }
}

impl RingElem {
    pub fn to_json(&self) -> RingElemJson {
        RingElemJson {
            p: self.spec().p(),
            n: self.spec().prec(),
            kind: self.spec().kind().clone(),
            coords: self.coords().to_vec(),
            prec: (self.prec() < self.spec().prec()).then_some(self.prec()),
        }
    }

    pub fn from_json(j: &RingElemJson) -> Result<Self> {
        let spec = RingSpec::new(j.p, j.n, j.kind.clone())?;
        Self::from_json_in(&spec, &j.coords, j.prec)
    }

    pub fn from_json_in(spec: &RingSpec, coords: &[u128], prec: Option<u32>) -> Result<Self> {
        if coords.iter().any(|&c| c >= spec.modulus()) {
            return Err(Error::Format("coordinate exceeds p^N".into()));
        }
        spec.from_residues(coords.to_vec(), prec.unwrap_or(spec.prec()))
    }
}
