use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::PolyError;

pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Coordinate,
    Parameter,
}

/// Ordered, immutable list of variable names.
///
/// Coordinates come first and parameters after; the position of a variable
/// fixes its place in the canonical term order, so a table is never mutated
/// once built. Share it behind an [`Arc`].
#[derive(Debug, Clone)]
pub struct VarTable {
    names: Vec<String>,
    kinds: Vec<VarKind>,
    index: HashMap<String, VarId>,
    n_coords: usize,
}

impl PartialEq for VarTable {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.kinds == other.kinds
    }
}

impl Eq for VarTable {}

impl VarTable {
    pub fn new<S: AsRef<str>>(coords: &[S], params: &[S]) -> Result<Arc<Self>, PolyError> {
        let mut names = Vec::with_capacity(coords.len() + params.len());
        let mut kinds = Vec::with_capacity(names.capacity());
        let mut index = HashMap::new();
        let all = coords
            .iter()
            .map(|s| (s.as_ref(), VarKind::Coordinate))
            .chain(params.iter().map(|s| (s.as_ref(), VarKind::Parameter)));
        for (name, kind) in all {
            if !is_identifier(name) {
                return Err(PolyError::BadName(name.to_string()));
            }
            if index.insert(name.to_string(), names.len()).is_some() {
                return Err(PolyError::DuplicateVariable(name.to_string()));
            }
            names.push(name.to_string());
            kinds.push(kind);
        }
        if coords.len() > 64 {
            return Err(PolyError::TooManyCoordinates(coords.len()));
        }
        if names.len() > u16::MAX as usize {
            return Err(PolyError::TooManyCoordinates(names.len()));
        }
        Ok(Arc::new(VarTable {
            names,
            kinds,
            index,
            n_coords: coords.len(),
        }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.names[v]
    }

    pub fn kind(&self, v: VarId) -> VarKind {
        self.kinds[v]
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    pub fn get(&self, name: &str) -> Result<VarId, PolyError> {
        self.lookup(name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
    }

    /// Number of coordinate variables; they occupy ids `0..n_coords()`.
    pub fn n_coords(&self) -> usize {
        self.n_coords
    }

    pub fn coordinate_names(&self) -> impl Iterator<Item = &str> {
        self.names[..self.n_coords].iter().map(String::as_str)
    }

    pub fn parameter_names(&self) -> impl Iterator<Item = &str> {
        self.names[self.n_coords..].iter().map(String::as_str)
    }

    pub fn is_coordinate(&self, v: VarId) -> bool {
        v < self.n_coords
    }

    /// A new table with `name` prepended as coordinate 0.
    pub fn with_leading_coordinate(&self, name: &str) -> Result<Arc<Self>, PolyError> {
        let coords: Vec<&str> = std::iter::once(name)
            .chain(self.coordinate_names())
            .collect();
        let params: Vec<&str> = self.parameter_names().collect();
        VarTable::new(&coords, &params)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_bad_names() {
        assert!(matches!(
            VarTable::new(&["x", "y"], &["x"]),
            Err(PolyError::DuplicateVariable(_))
        ));
        assert!(matches!(
            VarTable::new(&["1x"], &[]),
            Err(PolyError::BadName(_))
        ));
    }

    #[test]
    fn coordinates_precede_parameters() {
        let t = VarTable::new(&["x", "y"], &["b0"]).unwrap();
        assert_eq!(t.n_coords(), 2);
        assert_eq!(t.kind(2), VarKind::Parameter);
        let e = t.with_leading_coordinate("x0").unwrap();
        assert_eq!(e.name(0), "x0");
        assert_eq!(e.get("b0").unwrap(), 3);
    }
}
