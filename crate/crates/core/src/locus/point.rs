use crate::tensor::random_unit_vector;
use crate::{CVector, Complex64, Error, Result};
use rand::Rng;

/// Entries below this modulus are skipped when fixing the phase gauge.
const GAUGE_EPS: f64 = 1e-12;

/// A point of a product of projective spaces, one block per measured group.
///
/// Each block is stored with unit norm and its first entry of modulus above
/// `1e-12` real and positive.
#[derive(Clone, Debug, PartialEq)]
pub struct PointPP {
    blocks: Vec<CVector>,
}

impl PointPP {
    /// Normalises the blocks; fails if any block is (numerically) zero.
    pub fn new(blocks: Vec<CVector>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidDimension("a point needs at least one block".into()));
        }
        let blocks = blocks
            .into_iter()
            .map(|b| {
                if b.is_empty() {
                    return Err(Error::InvalidDimension("empty block".into()));
                }
                let n = b.norm();
                if !(n > 1e-300) || !n.is_finite() {
                    return Err(Error::InvalidDimension("zero block is not a projective point".into()));
                }
                Ok(gauge(b / Complex64::new(n, 0.0)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { blocks })
    }

    /// Convenience constructor from real coordinates.
    pub fn from_real(blocks: &[&[f64]]) -> Result<Self> {
        Self::new(
            blocks
                .iter()
                .map(|b| CVector::from_iterator(b.len(), b.iter().map(|&x| Complex64::new(x, 0.0))))
                .collect(),
        )
    }

    /// Uniform (unitarily invariant) random point.
    pub fn random<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Self {
        Self::new(dims.iter().map(|&d| random_unit_vector(d, rng)).collect())
            .expect("random unit vectors are nonzero")
    }

    pub fn blocks(&self) -> &[CVector] {
        &self.blocks
    }

    pub fn block(&self, g: usize) -> &CVector {
        &self.blocks[g]
    }

    pub fn num_groups(&self) -> usize {
        self.blocks.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len()).collect()
    }

    /// Segre image: the Kronecker product of the blocks.
    pub fn segre(&self) -> CVector {
        let mut out = CVector::from_element(1, Complex64::new(1.0, 0.0));
        for b in &self.blocks {
            out = out.kronecker(b);
        }
        out
    }

    /// Gauge-invariant distance: root sum over blocks of the phase-minimised
    /// Euclidean distance `sqrt(2 - 2 |<a, b>|)`.
    pub fn distance(&self, other: &PointPP) -> f64 {
        assert_eq!(self.dims(), other.dims(), "points in different spaces");
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (2.0 - 2.0 * a.dotc(b).norm().min(1.0)).max(0.0))
            .sum::<f64>()
            .sqrt()
    }
}

fn gauge(mut b: CVector) -> CVector {
    if let Some(z) = b.iter().find(|z| z.norm() > GAUGE_EPS).copied() {
        b /= z / z.norm();
    }
    b
}
