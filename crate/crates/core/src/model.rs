//! The four families of random products `g = d(t) e(tau)`.

use core::fmt;
use core::str::FromStr;

use crate::error::Error;
use crate::sl2::SubgroupKind;

/// Which one-parameter subgroups the two factors of each step come from.
/// The first factor's parameter `t` has an arbitrary law; the second
/// factor's parameter `tau` is exponential with rate `rho`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `k(t) n+(tau)`.
    KNplus,
    /// `n-(t) k(tau)`.
    NminusK,
    /// `n-(t) n+(tau)`.
    NminusNplus,
    /// `n-(t) a1(+-tau)`.
    NminusA1,
}

/// Sign of the exponential parameter in the `n- a1` family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::KNplus,
        Family::NminusK,
        Family::NminusNplus,
        Family::NminusA1,
    ];

    /// The subgroups of the first and second factor.
    pub fn factors(self) -> (SubgroupKind, SubgroupKind) {
        match self {
            Family::KNplus => (SubgroupKind::K, SubgroupKind::Nplus),
            Family::NminusK => (SubgroupKind::Nminus, SubgroupKind::K),
            Family::NminusNplus => (SubgroupKind::Nminus, SubgroupKind::Nplus),
            Family::NminusA1 => (SubgroupKind::Nminus, SubgroupKind::A1),
        }
    }

    /// Command-line spelling, e.g. `k-nplus`.
    pub fn name(self) -> &'static str {
        match self {
            Family::KNplus => "k-nplus",
            Family::NminusK => "nminus-k",
            Family::NminusNplus => "nminus-nplus",
            Family::NminusA1 => "nminus-a1",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(alloc::format!("unknown family `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("k-a2".parse::<Family>().is_err());
    }
}
