use std::fmt;

use serde::{Serialize, Serializer};

use super::slice::CausticSlice;
use super::{angle_distance, wrap_angle, CausticError};

/// Six half-integer entries, one per arc between consecutive cusps: half the
/// number of crossing passages on that arc. Stored doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub doubled: [u32; 6],
}

impl Symbol {
    pub const fn from_doubled(doubled: [u32; 6]) -> Self {
        Self { doubled }
    }

    /// Panics unless every entry is a non-negative multiple of ½.
    pub fn from_halves(entries: [f64; 6]) -> Self {
        Self {
            doubled: entries.map(|e| {
                let d = 2.0 * e;
                assert!(d >= 0.0 && d.fract() == 0.0, "{e} is not a non-negative half-integer");
                d as u32
            }),
        }
    }

    pub fn entries(&self) -> [f64; 6] {
        self.doubled.map(|d| d as f64 / 2.0)
    }

    /// Number of crossing points the symbol accounts for.
    pub fn crossing_count(&self) -> u32 {
        self.doubled.iter().sum::<u32>() / 2
    }

    pub fn canonical(&self) -> Symbol {
        canonical_symbol(*self)
    }

    /// The named symbol with the same canonical form, if any.
    pub fn name(&self) -> Option<NamedSymbol> {
        let c = self.canonical();
        NamedSymbol::ALL.into_iter().find(|n| n.symbol().canonical() == c)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, d) in self.doubled.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            if d % 2 == 0 {
                write!(f, "{}", d / 2)?;
            } else {
                write!(f, "{}/2", d)?;
            }
        }
        write!(f, ")")
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.entries().serialize(s)
    }
}

/// The seven symbols of the generic on-curve classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, serde::Deserialize)]
pub enum NamedSymbol {
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
    S7,
}

impl NamedSymbol {
    pub const ALL: [NamedSymbol; 7] = [
        NamedSymbol::S1,
        NamedSymbol::S2,
        NamedSymbol::S3,
        NamedSymbol::S4,
        NamedSymbol::S5,
        NamedSymbol::S6,
        NamedSymbol::S7,
    ];

    pub const GENERIC: [NamedSymbol; 3] = [NamedSymbol::S1, NamedSymbol::S2, NamedSymbol::S3];
    pub const DEGENERATE: [NamedSymbol; 4] =
        [NamedSymbol::S4, NamedSymbol::S5, NamedSymbol::S6, NamedSymbol::S7];

    pub fn symbol(self) -> Symbol {
        Symbol::from_doubled(match self {
            NamedSymbol::S1 => [0, 2, 2, 2, 2, 2],
            NamedSymbol::S2 => [4, 2, 2, 2, 2, 2],
            NamedSymbol::S3 => [4, 2, 2, 4, 2, 0],
            NamedSymbol::S4 => [1, 1, 2, 0, 0, 2],
            NamedSymbol::S5 => [2, 1, 1, 2, 2, 2],
            NamedSymbol::S6 => [3, 1, 2, 2, 0, 2],
            NamedSymbol::S7 => [4, 1, 1, 4, 0, 0],
        })
    }

    pub fn is_degenerate(self) -> bool {
        Self::DEGENERATE.contains(&self)
    }
}

impl fmt::Display for NamedSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Lexicographically smallest tuple over the six rotations and their
/// reversals.
pub fn canonical_symbol(sym: Symbol) -> Symbol {
    let d = sym.doubled;
    let mut best = d;
    for shift in 0..6 {
        let rot: [u32; 6] = std::array::from_fn(|k| d[(k + shift) % 6]);
        let rev: [u32; 6] = std::array::from_fn(|k| rot[5 - k]);
        best = best.min(rot).min(rev);
    }
    Symbol::from_doubled(best)
}

/// Assigns passages to the arcs `[c_k, c_{k+1})` between sorted cusp angles.
pub fn symbol_from_passages(
    cusps: &[f64],
    passages: &[f64],
    tol_cusp: f64,
) -> Result<Symbol, CausticError> {
    if cusps.len() != 6 {
        return Err(CausticError::NotSixCusps(cusps.len()));
    }
    let mut c: Vec<f64> = cusps.iter().map(|&a| wrap_angle(a)).collect();
    c.sort_by(f64::total_cmp);
    let mut doubled = [0u32; 6];
    for &p in passages {
        if c.iter().any(|&a| angle_distance(a, p) <= tol_cusp) {
            return Err(CausticError::PassageOnCusp { phi: p });
        }
        let p = wrap_angle(p);
        // arc k runs from c[k] to c[k+1]; arc 5 wraps through 0
        let k = match c.iter().rposition(|&a| a <= p) {
            Some(k) => k,
            None => 5,
        };
        doubled[k] += 1;
    }
    Ok(Symbol::from_doubled(doubled))
}

pub fn extract_symbol(slice: &CausticSlice) -> Result<Symbol, CausticError> {
    extract_symbol_with(slice, 2.0 * slice.grid_spacing())
}

pub fn extract_symbol_with(slice: &CausticSlice, tol_cusp: f64) -> Result<Symbol, CausticError> {
    let passages: Vec<f64> = slice.crossings.iter().flat_map(|c| c.passages()).collect();
    symbol_from_passages(&slice.cusp_angles, &passages, tol_cusp)
}
