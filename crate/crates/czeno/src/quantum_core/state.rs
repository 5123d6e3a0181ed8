use std::sync::Arc;

use nalgebra::DVector;

use super::{C64, Space};
use crate::{Result, SimError, TOL_EXACT};

/// A complex amplitude vector over a labeled tensor-product basis.
///
/// Sub-normalized states are first-class: a conditioned branch carries its
/// probability in its squared norm, so no renormalization bookkeeping is
/// needed while a run is in flight.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    space: Arc<Space>,
    amplitudes: DVector<C64>,
}

impl PureState {
    pub fn new(space: Arc<Space>, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(SimError::DimensionMismatch(format!(
                "space dimension {} vs amplitude vector length {}",
                space.dim(),
                amplitudes.len()
            )));
        }
        Ok(PureState { space, amplitudes })
    }

    /// The basis state with amplitude 1 on the given level names (one per
    /// subsystem, in subsystem order).
    pub fn basis(space: &Arc<Space>, levels: &[&str]) -> Result<Self> {
        let idx = space.basis_index(levels)?;
        let mut amplitudes = DVector::zeros(space.dim());
        amplitudes[idx] = C64::new(1.0, 0.0);
        Ok(PureState {
            space: space.clone(),
            amplitudes,
        })
    }

    pub fn zero(space: &Arc<Space>) -> Self {
        PureState {
            space: space.clone(),
            amplitudes: DVector::zeros(space.dim()),
        }
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, levels: &[&str]) -> Result<C64> {
        Ok(self.amplitudes[self.space.basis_index(levels)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= TOL_EXACT
    }

    pub fn assert_normalized(&self) -> Result<()> {
        let n2 = self.norm_sqr();
        if (n2 - 1.0).abs() > TOL_EXACT {
            return Err(SimError::NotNormalized(n2));
        }
        Ok(())
    }

    /// Renormalized copy. Errors on the zero state.
    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 <= 0.0 {
            return Err(SimError::NotNormalized(n2));
        }
        Ok(PureState {
            space: self.space.clone(),
            amplitudes: &self.amplitudes / C64::new(n2.sqrt(), 0.0),
        })
    }

    pub fn scaled(&self, factor: C64) -> Self {
        PureState {
            space: self.space.clone(),
            amplitudes: &self.amplitudes * factor,
        }
    }

    /// Kronecker product with concatenated labels. The norm is
    /// multiplicative; subsystem names must be disjoint.
    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        let space = self.space.tensor(other.space())?;
        let amplitudes = self.amplitudes.kronecker(&other.amplitudes);
        let amplitudes = DVector::from_iterator(space.dim(), amplitudes.iter().cloned());
        Ok(PureState { space, amplitudes })
    }

    /// Inner product ⟨self|other⟩.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.space != other.space {
            return Err(SimError::SpaceMismatch(
                "inner product between states on different spaces".into(),
            ));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}
