use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::hilbert::Vector;

/// Rank-detection threshold for orthonormalizing affine-subspace bases.
pub const RANK_TOL: f64 = 1e-12;

/// Serializable description of a nonexpansive map, tagged by `"kind"`.
///
/// Validation happens when converting into a [`NonexpansiveOp`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OpDescriptor {
    /// Projection onto `{x : <a, x> <= b}`.
    Halfspace { a: Vector, b: f64 },
    /// Projection onto `{x : <a, x> = b}`.
    Hyperplane { a: Vector, b: f64 },
    Ball { center: Vector, radius: f64 },
    Box { lo: Vector, hi: Vector },
    /// Projection onto `offset + span(basis)`.
    Affine { basis: Vec<Vector>, offset: Vector },
    /// `ops[0] . ops[1] . ... . ops[last]`; the last entry is applied first.
    Composition { ops: Vec<OpDescriptor> },
    /// `(1 - theta) I + theta T`.
    Average { theta: f64, op: Box<OpDescriptor> },
    Identity,
    /// `x -> M x` with spectral norm of `M` at most one.
    Linear { matrix: Matrix },
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Halfspace { a: Vector, b: f64, a_norm_sq: f64 },
    Hyperplane { a: Vector, b: f64, a_norm_sq: f64 },
    Ball { center: Vector, radius: f64 },
    Box { lo: Vector, hi: Vector },
    Affine { basis: Vec<Vector>, offset: Vector, frame: Vec<Vector> },
    Composition(Vec<NonexpansiveOp>),
    Average { theta: f64, inner: Box<NonexpansiveOp> },
    Identity,
    Linear(Matrix),
}

/// A validated nonexpansive map `T : R^d -> R^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OpDescriptor", into = "OpDescriptor")]
pub struct NonexpansiveOp {
    kind: Kind,
}

fn same_dim(what: &str, a: &Vector, b: &Vector) -> Result<()> {
    if a.dim() == b.dim() {
        Ok(())
    } else {
        Err(Error::InvalidOperator(format!(
            "{what}: dimensions {} and {} differ",
            a.dim(),
            b.dim()
        )))
    }
}

impl NonexpansiveOp {
    pub fn halfspace(a: Vector, b: f64) -> Result<Self> {
        let a_norm_sq = normal_norm_sq("halfspace", &a, b)?;
        Ok(Self {
            kind: Kind::Halfspace { a, b, a_norm_sq },
        })
    }

    pub fn hyperplane(a: Vector, b: f64) -> Result<Self> {
        let a_norm_sq = normal_norm_sq("hyperplane", &a, b)?;
        Ok(Self {
            kind: Kind::Hyperplane { a, b, a_norm_sq },
        })
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidOperator(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            kind: Kind::Ball { center, radius },
        })
    }

    pub fn box_set(lo: Vector, hi: Vector) -> Result<Self> {
        same_dim("box", &lo, &hi)?;
        if let Some(i) = (0..lo.dim()).find(|&i| lo[i] > hi[i]) {
            return Err(Error::InvalidOperator(format!(
                "box bounds inverted at coordinate {i}: lo = {} > hi = {}",
                lo[i], hi[i]
            )));
        }
        Ok(Self {
            kind: Kind::Box { lo, hi },
        })
    }

    /// Projection onto `offset + span(basis)`. Linearly dependent basis
    /// vectors are dropped; an empty basis gives the single point `offset`.
    pub fn affine(basis: Vec<Vector>, offset: Vector) -> Result<Self> {
        for b in &basis {
            same_dim("affine", &offset, b)?;
        }
        let frame = orthonormalize(&basis);
        Ok(Self {
            kind: Kind::Affine {
                basis,
                offset,
                frame,
            },
        })
    }

    pub fn identity() -> Self {
        Self {
            kind: Kind::Identity,
        }
    }

    pub fn linear(matrix: Matrix) -> Result<Self> {
        let norm = matrix.spectral_norm();
        if norm > 1.0 + 1e-12 {
            return Err(Error::InvalidOperator(format!(
                "linear map has spectral norm {norm} > 1 and is not nonexpansive"
            )));
        }
        Ok(Self {
            kind: Kind::Linear(matrix),
        })
    }

    /// `(1 - theta) x + theta T x` for `theta` in `(0, 1]`.
    pub fn average(theta: f64, inner: NonexpansiveOp) -> Result<Self> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::InvalidOperator(format!(
                "average weight must lie in (0, 1], got {theta}"
            )));
        }
        Ok(Self {
            kind: Kind::Average {
                theta,
                inner: Box::new(inner),
            },
        })
    }

    /// Composition applying the last operator first, so
    /// `compose([T3, T2, T1])` is `T3 T2 T1`.
    pub fn compose(ops: Vec<NonexpansiveOp>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::EmptyComposition);
        }
        let mut dim = None;
        for op in &ops {
            match (dim, op.dim()) {
                (Some(d), Some(e)) if d != e => {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: e,
                    })
                }
                (None, Some(e)) => dim = Some(e),
                _ => {}
            }
        }
        Ok(Self {
            kind: Kind::Composition(ops),
        })
    }

    /// `T_{start+N-1} ... T_{start+1} T_start` over a cyclic family, with
    /// `start` a zero-based position.
    pub fn cyclic_composite(family: &[NonexpansiveOp], start: usize) -> Result<Self> {
        let n = family.len();
        if n == 0 {
            return Err(Error::EmptyComposition);
        }
        let ops = (0..n).rev().map(|j| family[(start + j) % n].clone()).collect();
        Self::compose(ops)
    }

    pub fn from_descriptor(d: OpDescriptor) -> Result<Self> {
        match d {
            OpDescriptor::Halfspace { a, b } => Self::halfspace(a, b),
            OpDescriptor::Hyperplane { a, b } => Self::hyperplane(a, b),
            OpDescriptor::Ball { center, radius } => Self::ball(center, radius),
            OpDescriptor::Box { lo, hi } => Self::box_set(lo, hi),
            OpDescriptor::Affine { basis, offset } => Self::affine(basis, offset),
            OpDescriptor::Composition { ops } => Self::compose(
                ops.into_iter()
                    .map(Self::from_descriptor)
                    .collect::<Result<_>>()?,
            ),
            OpDescriptor::Average { theta, op } => {
                Self::average(theta, Self::from_descriptor(*op)?)
            }
            OpDescriptor::Identity => Ok(Self::identity()),
            OpDescriptor::Linear { matrix } => Self::linear(matrix),
        }
    }

    pub fn descriptor(&self) -> OpDescriptor {
        match &self.kind {
            Kind::Halfspace { a, b, .. } => OpDescriptor::Halfspace { a: a.clone(), b: *b },
            Kind::Hyperplane { a, b, .. } => OpDescriptor::Hyperplane { a: a.clone(), b: *b },
            Kind::Ball { center, radius } => OpDescriptor::Ball {
                center: center.clone(),
                radius: *radius,
            },
            Kind::Box { lo, hi } => OpDescriptor::Box {
                lo: lo.clone(),
                hi: hi.clone(),
            },
            Kind::Affine { basis, offset, .. } => OpDescriptor::Affine {
                basis: basis.clone(),
                offset: offset.clone(),
            },
            Kind::Composition(ops) => OpDescriptor::Composition {
                ops: ops.iter().map(Self::descriptor).collect(),
            },
            Kind::Average { theta, inner } => OpDescriptor::Average {
                theta: *theta,
                op: Box::new(inner.descriptor()),
            },
            Kind::Identity => OpDescriptor::Identity,
            Kind::Linear(m) => OpDescriptor::Linear { matrix: m.clone() },
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            Kind::Halfspace { .. } => "halfspace",
            Kind::Hyperplane { .. } => "hyperplane",
            Kind::Ball { .. } => "ball",
            Kind::Box { .. } => "box",
            Kind::Affine { .. } => "affine",
            Kind::Composition(_) => "composition",
            Kind::Average { .. } => "average",
            Kind::Identity => "identity",
            Kind::Linear(_) => "linear",
        }
    }

    /// Ambient dimension; `None` for maps that act on any dimension.
    pub fn dim(&self) -> Option<usize> {
        match &self.kind {
            Kind::Halfspace { a, .. } | Kind::Hyperplane { a, .. } => Some(a.dim()),
            Kind::Ball { center, .. } => Some(center.dim()),
            Kind::Box { lo, .. } => Some(lo.dim()),
            Kind::Affine { offset, .. } => Some(offset.dim()),
            Kind::Composition(ops) => ops.iter().find_map(Self::dim),
            Kind::Average { inner, .. } => inner.dim(),
            Kind::Identity => None,
            Kind::Linear(m) => Some(m.dim()),
        }
    }

    /// True for metric projections onto a closed convex set.
    pub fn is_projection(&self) -> bool {
        matches!(
            self.kind,
            Kind::Halfspace { .. }
                | Kind::Hyperplane { .. }
                | Kind::Ball { .. }
                | Kind::Box { .. }
                | Kind::Affine { .. }
                | Kind::Identity
        )
    }

    /// True when the map is averaged (a convex combination of the identity
    /// and a nonexpansive map). Cyclic compositions of averaged maps have
    /// exactly the common fixed points of their factors whenever that set is
    /// nonempty.
    pub fn is_averaged(&self) -> bool {
        match &self.kind {
            Kind::Composition(ops) => ops.iter().all(Self::is_averaged),
            Kind::Average { theta, inner } => *theta < 1.0 || inner.is_averaged(),
            Kind::Linear(_) => false,
            _ => true,
        }
    }

    /// Projections whose intersection is the fixed-point set of this map,
    /// or `None` when the fixed-point set has no such description. An empty
    /// list means every point is fixed.
    pub fn fixed_point_sets(&self) -> Option<Vec<NonexpansiveOp>> {
        match &self.kind {
            Kind::Identity => Some(Vec::new()),
            _ if self.is_projection() => Some(vec![self.clone()]),
            Kind::Average { inner, .. } => inner.fixed_point_sets(),
            Kind::Composition(ops) if self.is_averaged() => {
                let mut sets = Vec::new();
                for op in ops {
                    sets.extend(op.fixed_point_sets()?);
                }
                Some(sets)
            }
            _ => None,
        }
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        if let Some(d) = self.dim() {
            if d != x.dim() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: x.dim(),
                });
            }
        }
        Ok(self.eval(x))
    }

    pub(crate) fn eval(&self, x: &Vector) -> Vector {
        match &self.kind {
            Kind::Halfspace { a, b, a_norm_sq } => {
                let excess = a.dot(x) - b;
                if excess <= 0.0 {
                    x.clone()
                } else {
                    Vector::axpy_unchecked(-excess / a_norm_sq, a, x)
                }
            }
            Kind::Hyperplane { a, b, a_norm_sq } => {
                let excess = a.dot(x) - b;
                Vector::axpy_unchecked(-excess / a_norm_sq, a, x)
            }
            Kind::Ball { center, radius } => {
                let offset = x - center;
                let r = offset.norm();
                if r <= *radius {
                    x.clone()
                } else {
                    Vector::axpy_unchecked(radius / r, &offset, center)
                }
            }
            Kind::Box { lo, hi } => Vector::from_raw(
                x.as_slice()
                    .iter()
                    .zip(lo.as_slice().iter().zip(hi.as_slice()))
                    .map(|(v, (l, h))| v.clamp(*l, *h))
                    .collect(),
            ),
            Kind::Affine { offset, frame, .. } => {
                let rel = x - offset;
                frame.iter().fold(offset.clone(), |acc, q| {
                    Vector::axpy_unchecked(q.dot(&rel), q, &acc)
                })
            }
            Kind::Composition(ops) => ops
                .iter()
                .rev()
                .fold(x.clone(), |acc, op| op.eval(&acc)),
            Kind::Average { theta, inner } => {
                Vector::lincomb(1.0 - theta, x, *theta, &inner.eval(x))
            }
            Kind::Identity => x.clone(),
            Kind::Linear(m) => m.apply(x),
        }
    }

    /// `||T x - x|| <= tol`.
    pub fn fixes(&self, x: &Vector, tol: f64) -> Result<bool> {
        Ok(self.apply(x)?.dist(x) <= tol)
    }
}

/// `true` iff `||apply(op, x) - x|| <= tol`.
pub fn fixed_point_set_membership(op: &NonexpansiveOp, x: &Vector, tol: f64) -> Result<bool> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "membership tolerance must be positive, got {tol}"
        )));
    }
    op.fixes(x, tol)
}

fn normal_norm_sq(what: &str, a: &Vector, b: f64) -> Result<f64> {
    let n = a.norm_squared();
    if !(n > 0.0) {
        return Err(Error::InvalidOperator(format!("{what} normal must be nonzero")));
    }
    if !b.is_finite() {
        return Err(Error::InvalidOperator(format!("{what} offset must be finite")));
    }
    Ok(n)
}

/// Modified Gram-Schmidt with one reorthogonalization pass.
fn orthonormalize(basis: &[Vector]) -> Vec<Vector> {
    let mut frame: Vec<Vector> = Vec::with_capacity(basis.len());
    for v in basis {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &frame {
                w = Vector::axpy_unchecked(-q.dot(&w), q, &w);
            }
        }
        let n = w.norm();
        if n > RANK_TOL * v.norm().max(1.0) {
            frame.push(w.scale(1.0 / n));
        }
    }
    frame
}

impl TryFrom<OpDescriptor> for NonexpansiveOp {
    type Error = Error;

    fn try_from(d: OpDescriptor) -> Result<Self> {
        Self::from_descriptor(d)
    }
}

impl From<NonexpansiveOp> for OpDescriptor {
    fn from(op: NonexpansiveOp) -> Self {
        op.descriptor()
    }
}
