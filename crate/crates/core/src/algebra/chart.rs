use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use super::Parity;
use crate::error::{Error, Result};

/// Prefix reserved for coordinates introduced internally (e.g. the ℝ^{1|1}
/// factor used by the connection homotopy).
pub const RESERVED_PREFIX: char = '_';

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coordinate {
    pub name: String,
    pub parity: Parity,
}

/// An ordered list of named coordinates. The order fixes the canonical form
/// of odd monomials and the index order of tensor components.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chart {
    coords: Vec<Coordinate>,
}

impl Chart {
    /// Builds a chart from user-facing names. Names starting with `_` are
    /// rejected.
    pub fn new<S: Into<String>>(coords: impl IntoIterator<Item = (S, Parity)>) -> Result<Arc<Chart>> {
        let coords: Vec<Coordinate> = coords
            .into_iter()
            .map(|(name, parity)| Coordinate {
                name: name.into(),
                parity,
            })
            .collect();
        if let Some(c) = coords.iter().find(|c| c.name.starts_with(RESERVED_PREFIX)) {
            return Err(Error::ReservedName(c.name.clone()));
        }
        Self::build(coords)
    }

    fn build(coords: Vec<Coordinate>) -> Result<Arc<Chart>> {
        let mut seen = HashSet::new();
        for c in &coords {
            if c.name.is_empty() {
                return Err(Error::Invalid("empty coordinate name".into()));
            }
            if !seen.insert(c.name.as_str()) {
                return Err(Error::DuplicateCoordinate(c.name.clone()));
            }
        }
        Ok(Arc::new(Chart { coords }))
    }

    /// Appends coordinates that may use the reserved prefix.
    pub fn extended<S: Into<String>>(&self, extra: impl IntoIterator<Item = (S, Parity)>) -> Result<Arc<Chart>> {
        let mut coords = self.coords.clone();
        coords.extend(extra.into_iter().map(|(name, parity)| Coordinate {
            name: name.into(),
            parity,
        }));
        Self::build(coords)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Coordinate] {
        &self.coords
    }

    pub fn parity(&self, index: usize) -> Parity {
        self.coords[index].parity
    }

    pub fn name(&self, index: usize) -> &str {
        &self.coords[index].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c.name == name)
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.dim() {
            Ok(())
        } else {
            Err(Error::CoordinateOutOfRange { index, dim: self.dim() })
        }
    }

    pub fn even_count(&self) -> usize {
        self.coords.iter().filter(|c| c.parity.is_even()).count()
    }

    pub fn odd_count(&self) -> usize {
        self.dim() - self.even_count()
    }

    pub fn is_purely_odd(&self) -> bool {
        self.even_count() == 0
    }

    /// `true` when `self` is an initial segment of `other`.
    pub fn is_prefix_of(&self, other: &Chart) -> bool {
        other.coords.len() >= self.coords.len() && other.coords[..self.coords.len()] == self.coords[..]
    }

    /// Sum of the coordinate parities of a component index tuple, mod 2.
    pub(crate) fn index_parity(&self, indices: &[usize]) -> u32 {
        indices.iter().map(|&i| self.coords[i].parity.bit() as u32).sum::<u32>() & 1
    }

    pub(crate) fn bit(&self, index: usize) -> u32 {
        self.coords[index].parity.bit() as u32
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (even, odd): (Vec<_>, Vec<_>) = self.coords.iter().partition(|c| c.parity.is_even());
        write!(f, "ℝ^{{{}|{}}} (", even.len(), odd.len())?;
        for (k, c) in self.coords.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{}", c.name, c.parity)?;
        }
        f.write_str(")")
    }
}

/// Two chart handles refer to the same coordinate system.
pub(crate) fn same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}
