use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest matrix size handled for every family.
pub const MAX_SIZE: usize = 5;

/// Classical matrix group families in scope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    U,
    SU,
    SO,
    SL2R,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::U => "U",
            Family::SU => "SU",
            Family::SO => "SO",
            Family::SL2R => "SL2R",
        }
    }

    pub fn is_compact(self) -> bool {
        !matches!(self, Family::SL2R)
    }

    /// Whether matrices of this family have real entries.
    pub fn is_real(self) -> bool {
        matches!(self, Family::SO | Family::SL2R)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "U" => Ok(Family::U),
            "SU" => Ok(Family::SU),
            "SO" => Ok(Family::SO),
            "SL2R" | "SL2" | "SL(2,R)" => Ok(Family::SL2R),
            other => Err(Error::Parse(format!("unknown group family `{other}`"))),
        }
    }
}

/// A classical group together with its matrix size.
///
/// Construction goes through [`GroupSpec::new`], which rejects sizes outside
/// the supported range, so every live `GroupSpec` has a well-defined Lie
/// algebra basis, maximal torus and Weyl group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct GroupSpec {
    family: Family,
    size: usize,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    family: Family,
    size: usize,
}

impl TryFrom<RawSpec> for GroupSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        GroupSpec::new(raw.family, raw.size)
    }
}

impl From<GroupSpec> for RawSpec {
    fn from(spec: GroupSpec) -> Self {
        RawSpec {
            family: spec.family,
            size: spec.size,
        }
    }
}

impl GroupSpec {
    pub fn new(family: Family, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidInput("group size must be positive".into()));
        }
        let ok = match family {
            Family::U => size <= MAX_SIZE,
            // SU(1) and SO(1) are trivial groups with a zero-dimensional algebra.
            Family::SU | Family::SO => (2..=MAX_SIZE).contains(&size),
            Family::SL2R => size == 2,
        };
        if !ok {
            return Err(Error::Unsupported(format!("{family}({size})")));
        }
        Ok(GroupSpec { family, size })
    }

    pub fn u(m: usize) -> Result<Self> {
        Self::new(Family::U, m)
    }

    pub fn su(m: usize) -> Result<Self> {
        Self::new(Family::SU, m)
    }

    pub fn so(m: usize) -> Result<Self> {
        Self::new(Family::SO, m)
    }

    pub fn sl2r() -> Self {
        GroupSpec {
            family: Family::SL2R,
            size: 2,
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Matrix size m.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Dimension of the Lie algebra.
    pub fn algebra_dim(&self) -> usize {
        let m = self.size;
        match self.family {
            Family::U => m * m,
            Family::SU => m * m - 1,
            Family::SO => m * (m - 1) / 2,
            Family::SL2R => 3,
        }
    }

    /// Rank of the maximal torus (of the maximal compact subgroup for SL(2,R)).
    pub fn torus_rank(&self) -> usize {
        match self.family {
            Family::U => self.size,
            Family::SU => self.size - 1,
            Family::SO => self.size / 2,
            Family::SL2R => 1,
        }
    }

    /// Number of phases stored in a torus torsion point. SU keeps one phase
    /// per eigenvalue (constrained to sum to an integer), so it stores m.
    pub fn phase_count(&self) -> usize {
        match self.family {
            Family::U | Family::SU => self.size,
            Family::SO => self.size / 2,
            Family::SL2R => 1,
        }
    }

    /// True for the groups whose torus is a single circle with trivial
    /// Weyl group: SO(2) and SL(2,R) (through its maximal compact SO(2)).
    pub fn is_circle(&self) -> bool {
        matches!(
            (self.family, self.size),
            (Family::SO, 2) | (Family::SL2R, _)
        )
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::SL2R => f.write_str("SL(2,R)"),
            fam => write!(f, "{}({})", fam, self.size),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Accepts `U(3)`, `SU2`, `SO(5)`, `SL(2,R)`, `SL2R`.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let upper = t.to_ascii_uppercase();
        if matches!(upper.as_str(), "SL(2,R)" | "SL2R" | "SL2(R)") {
            return Ok(GroupSpec::sl2r());
        }
        let split = upper
            .find(|c: char| c == '(' || c.is_ascii_digit())
            .ok_or_else(|| Error::Parse(format!("missing size in `{s}`")))?;
        let family: Family = upper[..split].parse()?;
        let rest = &upper[split..];
        let digits = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(rest);
        let size: usize = digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad size in `{s}`")))?;
        GroupSpec::new(family, size)
    }
}
