use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::hilbert::Vector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ContractionDescriptor {
    /// `f(x) = u`, with `alpha = 0`.
    Constant { u: Vector },
    /// `f(x) = c (x - anchor) + anchor`, with `alpha = c`.
    AffineShrink { c: f64, anchor: Vector },
    /// `f(x) = M x`. `alpha` defaults to the spectral norm of `M`.
    Linear {
        matrix: Matrix,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<f64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Constant(Vector),
    AffineShrink { c: f64, anchor: Vector },
    Linear(Matrix),
}

/// A map `f` with `||f(x) - f(y)|| <= alpha ||x - y||`, `alpha` in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ContractionDescriptor", into = "ContractionDescriptor")]
pub struct Contraction {
    kind: Kind,
    alpha: f64,
}

impl Contraction {
    pub fn constant(u: Vector) -> Self {
        Self {
            kind: Kind::Constant(u),
            alpha: 0.0,
        }
    }

    pub fn affine_shrink(c: f64, anchor: Vector) -> Result<Self> {
        if !(0.0..1.0).contains(&c) {
            return Err(Error::InvalidOperator(format!(
                "affine-shrink factor must lie in [0, 1), got {c}"
            )));
        }
        Ok(Self {
            kind: Kind::AffineShrink { c, anchor },
            alpha: c,
        })
    }

    /// Linear contraction with its constant computed as the spectral norm.
    pub fn linear(matrix: Matrix) -> Result<Self> {
        let alpha = matrix.spectral_norm();
        Self::linear_declared(matrix, alpha)
    }

    /// Linear contraction with a caller-declared constant. The claim is not
    /// checked against the matrix here; see [`super::CertifyConstants`].
    pub fn linear_declared(matrix: Matrix, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            kind: Kind::Linear(matrix),
            alpha,
        })
    }

    pub fn from_descriptor(d: ContractionDescriptor) -> Result<Self> {
        match d {
            ContractionDescriptor::Constant { u } => Ok(Self::constant(u)),
            ContractionDescriptor::AffineShrink { c, anchor } => Self::affine_shrink(c, anchor),
            ContractionDescriptor::Linear { matrix, alpha: None } => Self::linear(matrix),
            ContractionDescriptor::Linear {
                matrix,
                alpha: Some(alpha),
            } => Self::linear_declared(matrix, alpha),
        }
    }

    pub fn descriptor(&self) -> ContractionDescriptor {
        match &self.kind {
            Kind::Constant(u) => ContractionDescriptor::Constant { u: u.clone() },
            Kind::AffineShrink { c, anchor } => ContractionDescriptor::AffineShrink {
                c: *c,
                anchor: anchor.clone(),
            },
            Kind::Linear(m) => ContractionDescriptor::Linear {
                matrix: m.clone(),
                alpha: Some(self.alpha),
            },
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            Kind::Constant(u) => u.dim(),
            Kind::AffineShrink { anchor, .. } => anchor.dim(),
            Kind::Linear(m) => m.dim(),
        }
    }

    /// The anchor `u` when `f` is constant.
    pub fn constant_value(&self) -> Option<&Vector> {
        match &self.kind {
            Kind::Constant(u) => Some(u),
            _ => None,
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
            Kind::Constant(u) => u.clone(),
            Kind::AffineShrink { c, anchor } => Vector::lincomb(*c, x, 1.0 - c, anchor),
            Kind::Linear(m) => m.apply(x),
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::InvalidOperator(format!(
            "contraction constant must lie in [0, 1), got {alpha}"
        )))
    }
}

impl TryFrom<ContractionDescriptor> for Contraction {
    type Error = Error;

    fn try_from(d: ContractionDescriptor) -> Result<Self> {
        Self::from_descriptor(d)
    }
}

impl From<Contraction> for ContractionDescriptor {
    fn from(f: Contraction) -> Self {
        f.descriptor()
    }
}
