use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::hilbert::Vector;

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MonotoneDescriptor {
    /// `A x = x - b`.
    IdentityMinus {
        b: Vector,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eta: Option<f64>,
    },
    /// `A x = M x` with `M` symmetric positive definite.
    SpdMatrix {
        matrix: Matrix,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eta: Option<f64>,
    },
    /// `A x = diag(d) x` with every `d_i > 0`.
    Diagonal {
        d: Vector,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eta: Option<f64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    IdentityMinus(Vector),
    SpdMatrix(Matrix),
    Diagonal(Vector),
}

/// A `k`-Lipschitz, `eta`-strongly monotone operator.
///
/// Constructors compute the exact constants from the data. Declared
/// constants (from a problem file, say) replace them verbatim; an incorrect
/// claim shows up in [`super::CertifyConstants`] and, if it breaks the step
/// size window, as a diverging run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MonotoneDescriptor", into = "MonotoneDescriptor")]
pub struct MonotoneOperator {
    kind: Kind,
    k: f64,
    eta: f64,
}

impl MonotoneOperator {
    pub fn identity_minus(b: Vector) -> Self {
        Self {
            kind: Kind::IdentityMinus(b),
            k: 1.0,
            eta: 1.0,
        }
    }

    pub fn spd_matrix(matrix: Matrix) -> Result<Self> {
        if !matrix.is_symmetric(SYMMETRY_TOL) {
            return Err(Error::InvalidOperator("spd-matrix is not symmetric".into()));
        }
        let (lo, hi) = matrix.symmetric_eigen_range();
        if !(lo > 0.0) {
            return Err(Error::InvalidOperator(format!(
                "spd-matrix is not positive definite (smallest eigenvalue {lo})"
            )));
        }
        Ok(Self {
            kind: Kind::SpdMatrix(matrix),
            k: hi,
            eta: lo,
        })
    }

    pub fn diagonal(d: Vector) -> Result<Self> {
        let s = d.as_slice();
        if s.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidOperator(
                "diagonal entries must all be positive".into(),
            ));
        }
        let hi = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self {
            kind: Kind::Diagonal(d),
            k: hi,
            eta: lo,
        })
    }

    /// Replaces the constants with declared values, requiring
    /// `0 < eta <= k`.
    pub fn with_constants(mut self, k: f64, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && k.is_finite() && eta <= k) {
            return Err(Error::InvalidOperator(format!(
                "monotone constants need 0 < eta <= k, got k = {k}, eta = {eta}"
            )));
        }
        self.k = k;
        self.eta = eta;
        Ok(self)
    }

    pub fn from_descriptor(d: MonotoneDescriptor) -> Result<Self> {
        let (op, k, eta) = match d {
            MonotoneDescriptor::IdentityMinus { b, k, eta } => (Self::identity_minus(b), k, eta),
            MonotoneDescriptor::SpdMatrix { matrix, k, eta } => (Self::spd_matrix(matrix)?, k, eta),
            MonotoneDescriptor::Diagonal { d, k, eta } => (Self::diagonal(d)?, k, eta),
        };
        if k.is_none() && eta.is_none() {
            return Ok(op);
        }
        let (k0, e0) = (op.k, op.eta);
        op.with_constants(k.unwrap_or(k0), eta.unwrap_or(e0))
    }

    pub fn descriptor(&self) -> MonotoneDescriptor {
        let (k, eta) = (Some(self.k), Some(self.eta));
        match &self.kind {
            Kind::IdentityMinus(b) => MonotoneDescriptor::IdentityMinus {
                b: b.clone(),
                k,
                eta,
            },
            Kind::SpdMatrix(m) => MonotoneDescriptor::SpdMatrix {
                matrix: m.clone(),
                k,
                eta,
            },
            Kind::Diagonal(d) => MonotoneDescriptor::Diagonal {
                d: d.clone(),
                k,
                eta,
            },
        }
    }

    pub fn lipschitz(&self) -> f64 {
        self.k
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            Kind::IdentityMinus(b) => b.dim(),
            Kind::SpdMatrix(m) => m.dim(),
            Kind::Diagonal(d) => d.dim(),
        }
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(self.eval(x))
    }

    pub(crate) fn eval(&self, x: &Vector) -> Vector {
        match &self.kind {
            Kind::IdentityMinus(b) => x - b,
            Kind::SpdMatrix(m) => m.apply(x),
            Kind::Diagonal(d) => Vector::from_raw(
                x.as_slice()
                    .iter()
                    .zip(d.as_slice())
                    .map(|(a, b)| a * b)
                    .collect(),
            ),
        }
    }
}

impl TryFrom<MonotoneDescriptor> for MonotoneOperator {
    type Error = Error;

    fn try_from(d: MonotoneDescriptor) -> Result<Self> {
        Self::from_descriptor(d)
    }
}

impl From<MonotoneOperator> for MonotoneDescriptor {
    fn from(a: MonotoneOperator) -> Self {
        a.descriptor()
    }
}
