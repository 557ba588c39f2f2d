use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use super::ExprError;

/// Names of the coordinate symbols, in canonical order. The first three span
/// the base space; the last three are the fiber coordinates of the 6D
/// extension.
pub const COORDINATE_NAMES: [&str; 6] = ["x", "y", "z", "psi1", "psi2", "psi3"];

const PARAM_RANK: u8 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Coordinate,
    Parameter,
}

/// A variable appearing in polynomial terms.
///
/// Symbols order coordinates first (`x < y < z < psi1 < psi2 < psi3`), then
/// parameters alphabetically. That order fixes monomial comparison and
/// therefore the printed form of every expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    rank: u8,
    name: Arc<str>,
}

impl Symbol {
    /// Coordinate by slot: 0..3 are x, y, z and 3..6 are psi1..psi3.
    pub fn coordinate(slot: usize) -> Symbol {
        assert!(slot < COORDINATE_NAMES.len(), "coordinate slot {slot} out of range");
        Symbol {
            rank: slot as u8,
            name: Arc::from(COORDINATE_NAMES[slot]),
        }
    }

    pub fn x() -> Symbol {
        Symbol::coordinate(0)
    }

    pub fn y() -> Symbol {
        Symbol::coordinate(1)
    }

    pub fn z() -> Symbol {
        Symbol::coordinate(2)
    }

    /// Fiber coordinate `psi{k}` for `k` in 1..=3.
    pub fn psi(k: usize) -> Symbol {
        assert!((1..=3).contains(&k), "psi index must be 1, 2 or 3");
        Symbol::coordinate(2 + k)
    }

    /// Base coordinates `[x, y, z]`.
    pub fn base() -> [Symbol; 3] {
        [Symbol::x(), Symbol::y(), Symbol::z()]
    }

    pub fn try_param(name: &str) -> Result<Symbol, ExprError> {
        if COORDINATE_NAMES.contains(&name) {
            return Err(ExprError::ReservedName(String::from(name)));
        }
        if !is_identifier(name) {
            return Err(ExprError::InvalidName(String::from(name)));
        }
        Ok(Symbol {
            rank: PARAM_RANK,
            name: Arc::from(name),
        })
    }

    /// Parameter symbol. Panics on coordinate names or non-identifiers; use
    /// [`Symbol::try_param`] for untrusted input.
    pub fn param(name: &str) -> Symbol {
        match Symbol::try_param(name) {
            Ok(s) => s,
            Err(e) => panic!("{e}"),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SymbolKind {
        if self.rank < PARAM_RANK {
            SymbolKind::Coordinate
        } else {
            SymbolKind::Parameter
        }
    }

    pub fn is_coordinate(&self) -> bool {
        self.kind() == SymbolKind::Coordinate
    }

    /// Slot index for coordinates (0..6), `None` for parameters.
    pub fn slot(&self) -> Option<usize> {
        self.is_coordinate().then_some(self.rank as usize)
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank
            .cmp(&other.rank)
            .then_with(|| self.name.cmp(&other.name))
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_')
}

/// The symbols an expression may mention: x, y, z always, the fiber
/// coordinates when extended, plus declared parameters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolTable {
    params: BTreeSet<Symbol>,
    extended: bool,
}

impl SymbolTable {
    pub fn new() -> SymbolTable {
        SymbolTable::default()
    }

    /// Table with the given parameters declared.
    pub fn with_params<I, S>(names: I) -> Result<SymbolTable, ExprError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut table = SymbolTable::new();
        for n in names {
            table.declare(n.as_ref())?;
        }
        Ok(table)
    }

    /// Also accept `psi1`, `psi2`, `psi3`.
    pub fn extended(mut self) -> SymbolTable {
        self.extended = true;
        self
    }

    pub fn declare(&mut self, name: &str) -> Result<Symbol, ExprError> {
        let s = Symbol::try_param(name)?;
        self.params.insert(s.clone());
        Ok(s)
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        let n = if self.extended { 6 } else { 3 };
        if let Some(slot) = COORDINATE_NAMES[..n].iter().position(|c| *c == name) {
            return Some(Symbol::coordinate(slot));
        }
        self.params.iter().find(|p| p.name() == name).cloned()
    }

    pub fn params(&self) -> impl Iterator<Item = &Symbol> {
        self.params.iter()
    }

    pub fn param_names(&self) -> Vec<String> {
        self.params.iter().map(|p| String::from(p.name())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates_precede_parameters() {
        let mut syms = alloc::vec![
            Symbol::param("sigma"),
            Symbol::z(),
            Symbol::param("b"),
            Symbol::psi(1),
            Symbol::x(),
        ];
        syms.sort();
        let names: Vec<&str> = syms.iter().map(|s| s.name()).collect();
        assert_eq!(names, ["x", "z", "psi1", "b", "sigma"]);
    }

    #[test]
    fn reserved_and_invalid_names() {
        assert!(matches!(Symbol::try_param("y"), Err(ExprError::ReservedName(_))));
        assert!(matches!(Symbol::try_param("2a"), Err(ExprError::InvalidName(_))));
        assert!(Symbol::try_param("σ").is_ok());
    }

    #[test]
    fn psi_only_visible_when_extended() {
        let t = SymbolTable::new();
        assert!(t.lookup("psi2").is_none());
        assert_eq!(t.clone().extended().lookup("psi2"), Some(Symbol::psi(2)));
    }
}
