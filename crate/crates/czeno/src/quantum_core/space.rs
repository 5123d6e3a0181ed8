use std::fmt;
use std::sync::Arc;

use crate::{Result, SimError};

/// One factor of a tensor-product space: a named subsystem with named
/// levels. Level order is fixed at construction and defines the canonical
/// basis ordering for that factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subsystem {
    name: String,
    levels: Vec<String>,
}

impl Subsystem {
    pub fn new(name: impl Into<String>, levels: &[&str]) -> Self {
        Subsystem {
            name: name.into(),
            levels: levels.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn level_index(&self, level: &str) -> Result<usize> {
        self.levels
            .iter()
            .position(|l| l == level)
            .ok_or_else(|| SimError::UnknownLevel {
                subsystem: self.name.clone(),
                level: level.to_string(),
            })
    }
}

/// A labeled tensor-product space. Subsystem order is canonical
/// (declaration order) and immutable; basis indices are row-major over the
/// subsystems, so cross-representation comparisons are bit-stable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Space {
    subsystems: Vec<Subsystem>,
    dim: usize,
}

impl Space {
    pub fn new(subsystems: Vec<Subsystem>) -> Result<Arc<Space>> {
        for (i, a) in subsystems.iter().enumerate() {
            if a.dim() == 0 {
                return Err(SimError::DimensionMismatch(format!(
                    "subsystem '{}' has no levels",
                    a.name
                )));
            }
            for b in &subsystems[i + 1..] {
                if a.name == b.name {
                    return Err(SimError::NameCollision(a.name.clone()));
                }
            }
        }
        let dim = subsystems.iter().map(Subsystem::dim).product();
        Ok(Arc::new(Space { subsystems, dim }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.subsystems
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| SimError::UnknownSubsystem(name.to_string()))
    }

    pub fn subsystem(&self, name: &str) -> Result<&Subsystem> {
        Ok(&self.subsystems[self.position(name)?])
    }

    /// Stride of each subsystem in the row-major basis index.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.subsystems.len()];
        for i in (0..self.subsystems.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.subsystems[i + 1].dim();
        }
        strides
    }

    /// Basis index of the product state given one level name per subsystem,
    /// in subsystem order.
    pub fn basis_index(&self, levels: &[&str]) -> Result<usize> {
        if levels.len() != self.subsystems.len() {
            return Err(SimError::DimensionMismatch(format!(
                "expected {} level names, got {}",
                self.subsystems.len(),
                levels.len()
            )));
        }
        let strides = self.strides();
        let mut idx = 0;
        for ((sub, level), stride) in self.subsystems.iter().zip(levels).zip(&strides) {
            idx += sub.level_index(level)? * stride;
        }
        Ok(idx)
    }

    /// Per-subsystem level indices of a flat basis index.
    pub fn split_index(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.subsystems.len()];
        for (k, stride) in self.strides().iter().enumerate() {
            out[k] = index / stride;
            index %= stride;
        }
        out
    }

    pub fn label(&self, index: usize) -> BasisLabel {
        let factors = self
            .split_index(index)
            .into_iter()
            .zip(&self.subsystems)
            .map(|(li, sub)| (sub.name.clone(), sub.levels[li].clone()))
            .collect();
        BasisLabel { factors }
    }

    /// Tensor product of two spaces; subsystem names must be disjoint.
    pub fn tensor(&self, other: &Space) -> Result<Arc<Space>> {
        let mut subsystems = self.subsystems.clone();
        subsystems.extend(other.subsystems.iter().cloned());
        Space::new(subsystems)
    }
}

/// The composite ket label of one basis vector, e.g. `|g,G,D⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisLabel {
    factors: Vec<(String, String)>,
}

impl BasisLabel {
    pub fn factors(&self) -> &[(String, String)] {
        &self.factors
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, (_, level)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{level}")?;
        }
        write!(f, "⟩")
    }
}
