//! Objects, morphisms and the per-model structure.

mod arrow;
mod morphism;
mod obj;
pub mod structural;
mod validate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semiring::SemiringId;

pub use arrow::{Arrow, Grading, Row, Trend};
pub(crate) use arrow::add_into;
pub use morphism::Morphism;
pub use obj::{Base, Coords, Obj, Shape};
pub use validate::{
    apply, partial_sum, pcoh_member, pcoh_witnesses, promotion, validate, validate_arrow, Membership,
    Validity,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelKind {
    Rel,
    Wrel(SemiringId),
    Wcs,
    Coh,
    Nucs,
    Pcoh,
}

impl ModelKind {
    pub const ALL: [ModelKind; 8] = [
        ModelKind::Rel,
        ModelKind::Wrel(SemiringId::Bool),
        ModelKind::Wrel(SemiringId::NatInf),
        ModelKind::Wrel(SemiringId::RatPos),
        ModelKind::Wcs,
        ModelKind::Coh,
        ModelKind::Nucs,
        ModelKind::Pcoh,
    ];

    pub fn semiring(self) -> SemiringId {
        match self {
            ModelKind::Wrel(s) => s,
            ModelKind::Pcoh => SemiringId::RatPos,
            _ => SemiringId::Bool,
        }
    }

    pub fn is_coherence(self) -> bool {
        matches!(self, ModelKind::Wcs | ModelKind::Coh | ModelKind::Nucs)
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Rel => "rel",
            ModelKind::Wrel(SemiringId::Bool) => "wrel-bool",
            ModelKind::Wrel(SemiringId::NatInf) => "wrel-nat",
            ModelKind::Wrel(SemiringId::RatPos) => "wrel-rat",
            ModelKind::Wcs => "wcs",
            ModelKind::Coh => "coh",
            ModelKind::Nucs => "nucs",
            ModelKind::Pcoh => "pcoh",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            ModelKind::Rel => "relations (boolean weights, no validity predicate)",
            ModelKind::Wrel(SemiringId::Bool) => "weighted relations over the boolean semiring",
            ModelKind::Wrel(SemiringId::NatInf) => "weighted relations over the naturals with infinity",
            ModelKind::Wrel(SemiringId::RatPos) => "weighted relations over nonnegative rationals with infinity",
            ModelKind::Wcs => "weak coherence spaces, cliques of strict coherence",
            ModelKind::Coh => "coherence spaces with the uniform exponential",
            ModelKind::Nucs => "non-uniform coherence spaces with the free exponential",
            ModelKind::Pcoh => "probabilistic coherence spaces, witness checked",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        Ok(match s.as_str() {
            "rel" => ModelKind::Rel,
            "wcs" => ModelKind::Wcs,
            "coh" => ModelKind::Coh,
            "nucs" => ModelKind::Nucs,
            "pcoh" | "pcohnum" => ModelKind::Pcoh,
            "wrel" => ModelKind::Wrel(SemiringId::RatPos),
            _ => match s.strip_prefix("wrel-").or_else(|| s.strip_prefix("wrel:")) {
                Some(sr) => ModelKind::Wrel(sr.parse()?),
                None => return Err(Error::Parse(format!("unknown model `{s}`"))),
            },
        })
    }
}

/// Three-valued coherence between two web points. Large coherence is
/// `Scoh` or `Neu`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rel3 {
    Scoh,
    Neu,
    Sincoh,
}

impl Rel3 {
    pub fn coh(self) -> bool {
        self != Rel3::Sincoh
    }

    pub fn dual(self) -> Rel3 {
        match self {
            Rel3::Scoh => Rel3::Sincoh,
            Rel3::Sincoh => Rel3::Scoh,
            Rel3::Neu => Rel3::Neu,
        }
    }

    /// Coherence of `(a,b)` and `(a',b')` in `E ⊸ F`.
    pub fn lin(ra: Rel3, rb: Rel3) -> Rel3 {
        if ra == Rel3::Neu && rb == Rel3::Neu {
            return Rel3::Neu;
        }
        let large = !ra.coh() || (rb.coh() && (rb != Rel3::Neu || ra == Rel3::Neu));
        if large {
            Rel3::Scoh
        } else {
            Rel3::Sincoh
        }
    }

    pub fn tensor(ra: Rel3, rb: Rel3) -> Rel3 {
        Rel3::lin(ra, rb.dual()).dual()
    }
}

/// Truncation bounds. `bang` caps every multiset, `s` caps every degree
/// index, and `pad` caps how many empty blocks, zero degrees or unit
/// copies an unbounded generator emits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bounds {
    pub bang: usize,
    pub s: usize,
    pub pad: usize,
}

impl Bounds {
    pub fn new(bang: usize, s: usize) -> Bounds {
        Bounds { bang, s, pad: bang }
    }

    pub fn with_pad(self, pad: usize) -> Bounds {
        Bounds { pad, ..self }
    }

    /// The within-bound region: total bag weight at most `bang` and total
    /// degree weight at most `s`.
    pub fn in_region(&self, p: &crate::multiset::Point) -> bool {
        p.bag_weight() <= self.bang && p.deg_weight() <= self.s
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds::new(3, 4)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_names_round_trip() {
        for m in ModelKind::ALL {
            assert_eq!(m.name().parse::<ModelKind>().unwrap(), m);
        }
    }

    #[test]
    fn lin_rel_table() {
        use Rel3::*;
        // strict incoherence on the left makes anything coherent
        assert_eq!(Rel3::lin(Sincoh, Sincoh), Scoh);
        assert_eq!(Rel3::lin(Scoh, Sincoh), Sincoh);
        assert_eq!(Rel3::lin(Scoh, Neu), Sincoh);
        assert_eq!(Rel3::lin(Neu, Neu), Neu);
        assert_eq!(Rel3::lin(Neu, Scoh), Scoh);
        assert_eq!(Rel3::tensor(Scoh, Scoh), Scoh);
        assert_eq!(Rel3::tensor(Scoh, Sincoh), Sincoh);
        assert_eq!(Rel3::tensor(Neu, Scoh), Scoh);
    }
}
