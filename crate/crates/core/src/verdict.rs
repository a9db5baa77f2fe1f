use serde::Serialize;

use crate::expr::ZeroTest;

/// Outcome of a symbolic predicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Certified by exact arithmetic.
    Holds,
    Fails,
    /// Supported by floating-point sampling only (exp/log present).
    HoldsNumerically,
}

impl Verdict {
    pub fn holds(self) -> bool {
        !matches!(self, Self::Fails)
    }

    pub fn is_exact(self) -> bool {
        !matches!(self, Self::HoldsNumerically)
    }

    /// Conjunction: any failure fails; otherwise numeric if any part was numeric.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Self::Fails, _) | (_, Self::Fails) => Self::Fails,
            (Self::HoldsNumerically, _) | (_, Self::HoldsNumerically) => Self::HoldsNumerically,
            _ => Self::Holds,
        }
    }

    pub fn all(it: impl IntoIterator<Item = Verdict>) -> Verdict {
        let mut acc = Self::Holds;
        for v in it {
            acc = acc.and(v);
            if acc == Self::Fails {
                break;
            }
        }
        acc
    }

    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Self::Holds
        } else {
            Self::Fails
        }
    }
}

impl From<ZeroTest> for Verdict {
    fn from(z: ZeroTest) -> Self {
        match z {
            ZeroTest::Zero => Self::Holds,
            ZeroTest::Nonzero => Self::Fails,
            ZeroTest::NumericZero => Self::HoldsNumerically,
        }
    }
}
