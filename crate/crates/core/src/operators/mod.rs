//! Operator catalog: nonexpansive maps `T_i`, contractions `f`, and
//! Lipschitz strongly monotone operators `A`, each carrying its constants.

mod contraction;
mod matrix;
mod monotone;
mod nonexpansive;

use serde::Serialize;

use crate::sampling;

pub use contraction::{Contraction, ContractionDescriptor};
pub use matrix::Matrix;
pub use monotone::{MonotoneDescriptor, MonotoneOperator};
pub use nonexpansive::{fixed_point_set_membership, NonexpansiveOp, OpDescriptor, RANK_TOL};

/// Relative slack allowed between a declared constant and an observed ratio.
pub const CERTIFY_REL_SLACK: f64 = 1e-7;

/// Worst ratios observed over random pairs, compared with declared constants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateReport {
    pub samples: usize,
    pub declared_lipschitz: f64,
    /// `max ||Fx - Fy|| / ||x - y||` over the sampled pairs.
    pub observed_lipschitz: f64,
    /// Declared strong-monotonicity modulus, when the operator has one.
    pub declared_monotonicity: Option<f64>,
    /// `min <x - y, Ax - Ay> / ||x - y||^2` over the sampled pairs.
    pub observed_monotonicity: Option<f64>,
    pub violations: Vec<String>,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Empirical audit of an operator's declared constants.
pub trait CertifyConstants {
    /// Draws `samples` random pairs from a seeded generator and reports the
    /// extreme ratios. Panics if `samples == 0`.
    fn certify_constants(&self, samples: usize, seed: u64) -> CertificateReport;
}

fn sample_pairs(dim: usize, samples: usize, seed: u64) -> impl Iterator<Item = (crate::Vector, crate::Vector)> {
    assert!(samples >= 1, "certify_constants needs at least one sample");
    let mut rng = sampling::rng(seed);
    std::iter::from_fn(move || {
        let x = sampling::normal_vector(&mut rng, dim, 1.0);
        let y = sampling::normal_vector(&mut rng, dim, 1.0);
        Some((x, y))
    })
    .filter(|(x, y)| x.dist(y) > 1e-12)
    .take(samples)
}

fn exceeds(observed: f64, declared: f64) -> bool {
    observed > declared * (1.0 + CERTIFY_REL_SLACK) + f64::EPSILON
}

impl CertifyConstants for Contraction {
    fn certify_constants(&self, samples: usize, seed: u64) -> CertificateReport {
        let worst = sample_pairs(self.dim(), samples, seed)
            .map(|(x, y)| self.eval(&x).dist(&self.eval(&y)) / x.dist(&y))
            .fold(0.0_f64, f64::max);
        let mut violations = Vec::new();
        if exceeds(worst, self.alpha()) {
            violations.push(format!(
                "observed contraction ratio {worst} exceeds declared alpha {}",
                self.alpha()
            ));
        }
        CertificateReport {
            samples,
            declared_lipschitz: self.alpha(),
            observed_lipschitz: worst,
            declared_monotonicity: None,
            observed_monotonicity: None,
            violations,
        }
    }
}

impl CertifyConstants for MonotoneOperator {
    fn certify_constants(&self, samples: usize, seed: u64) -> CertificateReport {
        let (mut lip, mut mono) = (0.0_f64, f64::INFINITY);
        for (x, y) in sample_pairs(self.dim(), samples, seed) {
            let dx = &x - &y;
            let da = &self.eval(&x) - &self.eval(&y);
            let n2 = dx.norm_squared();
            lip = lip.max(da.norm() / n2.sqrt());
            mono = mono.min(dx.dot(&da) / n2);
        }
        let mut violations = Vec::new();
        if exceeds(lip, self.lipschitz()) {
            violations.push(format!(
                "observed Lipschitz ratio {lip} exceeds declared k {}",
                self.lipschitz()
            ));
        }
        if mono < self.eta() * (1.0 - CERTIFY_REL_SLACK) {
            violations.push(format!(
                "observed monotonicity ratio {mono} is below declared eta {}",
                self.eta()
            ));
        }
        CertificateReport {
            samples,
            declared_lipschitz: self.lipschitz(),
            observed_lipschitz: lip,
            declared_monotonicity: Some(self.eta()),
            observed_monotonicity: Some(mono),
            violations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Vector;

    #[test]
    fn affine_shrink_ratio_is_exact() {
        let f = Contraction::affine_shrink(0.5, Vector::new(vec![1.0, -2.0, 0.5]).unwrap()).unwrap();
        let r = f.certify_constants(200, 7);
        assert!(r.passed());
        assert!((r.observed_lipschitz - 0.5).abs() < 1e-9);
    }

    #[test]
    fn identity_minus_ratios_are_one() {
        let a = MonotoneOperator::identity_minus(Vector::new(vec![3.0, 1.0]).unwrap());
        let r = a.certify_constants(200, 11);
        assert!(r.passed());
        assert!((r.observed_lipschitz - 1.0).abs() < 1e-12);
        assert!((r.observed_monotonicity.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spd_ratios_approach_extreme_eigenvalues() {
        // Eigenvalues of diag(1, 4) are read off the diagonal.
        let a = MonotoneOperator::spd_matrix(Matrix::diagonal(&[1.0, 4.0])).unwrap();
        let coarse = a.certify_constants(10, 3);
        let fine = a.certify_constants(20_000, 3);
        assert!(fine.passed());
        assert!((fine.observed_lipschitz - 4.0).abs() < 1e-4);
        assert!((fine.observed_monotonicity.unwrap() - 1.0).abs() < 1e-4);
        assert!(fine.observed_lipschitz >= coarse.observed_lipschitz);
        assert!(fine.observed_monotonicity.unwrap() <= coarse.observed_monotonicity.unwrap());
    }

    #[test]
    fn flags_misdeclared_constants() {
        let a = MonotoneOperator::diagonal(Vector::new(vec![1.0, 4.0]).unwrap())
            .unwrap()
            .with_constants(2.0, 1.5)
            .unwrap();
        let r = a.certify_constants(500, 5);
        assert_eq!(r.violations.len(), 2);

        let m = Matrix::diagonal(&[0.9, 0.1]);
        let f = Contraction::linear_declared(m, 0.5).unwrap();
        assert!(!f.certify_constants(500, 5).passed());
    }
}
