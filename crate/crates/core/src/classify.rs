//! SLOCC class and FTS rank from the vanishing pattern of the measures.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::Measures;
use crate::tensor::{PureState, Qubit};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SloccClass {
    Null,
    Separable,
    /// Class `a|bc`: qubit `a` factors off, the other two are entangled.
    Biseparable(#[serde(with = "label")] Qubit),
    W,
    Ghz,
}

mod label {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Qubit, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u64(q.label() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Qubit, D::Error> {
        Qubit::new(usize::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl SloccClass {
    pub fn fts_rank(self) -> u8 {
        match self {
            SloccClass::Null => 0,
            SloccClass::Separable => 1,
            SloccClass::Biseparable(_) => 2,
            SloccClass::W => 3,
            SloccClass::Ghz => 4,
        }
    }

    /// Zero/nonzero row: `(n, c_{1|23}, c_{2|13}, c_{3|12}, ω, τ)`.
    pub fn pattern(self) -> [bool; 6] {
        match self {
            SloccClass::Null => [false; 6],
            SloccClass::Separable => [true, false, false, false, false, false],
            SloccClass::Biseparable(a) => {
                let mut c = [true; 3];
                c[a.slot()] = false;
                [true, c[0], c[1], c[2], false, false]
            }
            SloccClass::W => [true, true, true, true, true, false],
            SloccClass::Ghz => [true; 6],
        }
    }

    pub const ALL: [SloccClass; 7] = [
        SloccClass::Null,
        SloccClass::Separable,
        SloccClass::Biseparable(Qubit::One),
        SloccClass::Biseparable(Qubit::Two),
        SloccClass::Biseparable(Qubit::Three),
        SloccClass::W,
        SloccClass::Ghz,
    ];
}

impl fmt::Display for SloccClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SloccClass::Null => f.write_str("Null"),
            SloccClass::Separable => f.write_str("1|2|3"),
            SloccClass::Biseparable(a) => {
                let (b, c) = a.others();
                write!(f, "{a}|{b}{c}")
            }
            SloccClass::W => f.write_str("W"),
            SloccClass::Ghz => f.write_str("GHZ"),
        }
    }
}

/// Ordered by FTS rank; distinct biseparable classes are incomparable.
impl PartialOrd for SloccClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self == other {
            return Some(Ordering::Equal);
        }
        match self.fts_rank().cmp(&other.fts_rank()) {
            Ordering::Equal => None,
            ord => Some(ord),
        }
    }
}

/// `None` means incomparable.
pub fn class_order(x: SloccClass, y: SloccClass) -> Option<Ordering> {
    x.partial_cmp(&y)
}

/// Degree-4 quantities `(n⁴, n²c_{1|23}, n²c_{2|13}, n²c_{3|12}, nω, τ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub values: [f64; 6],
    /// Set where `value / n⁴` lies in `[0.1·tol, 10·tol]`.
    pub marginal: [bool; 6],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub class: SloccClass,
    pub fts_rank: u8,
    pub witness: Witness,
}

pub const WITNESS_NAMES: [&str; 6] = ["n^4", "n^2 c1_23", "n^2 c2_13", "n^2 c3_12", "n omega", "tau"];

/// Classifies by thresholding each degree-4 quantity at `tol·n⁴`.
pub fn classify(psi: &PureState, tol: f64) -> Result<Classification> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let scale = psi.max_abs();
    if scale == 0.0 {
        return Ok(Classification {
            class: SloccClass::Null,
            fts_rank: 0,
            witness: Witness { values: [0.0; 6], marginal: [false; 6] },
        });
    }
    // Ratios value/n⁴ are scale invariant; evaluate them on the unit vector.
    let unit = psi.normalized().expect("nonzero vector");
    let m = Measures::of(&unit);
    let ratios = [1.0, m.c[0], m.c[1], m.c[2], m.omega, m.tau];
    let n = psi.norm();
    let n4 = n.powi(4);
    let witness = Witness { values: ratios.map(|r| r * n4), marginal: ratios.map(|r| (0.1 * tol..=10.0 * tol).contains(&r)) };
    let pattern = ratios.map(|r| r >= tol);
    let class = SloccClass::ALL.into_iter().find(|c| c.pattern() == pattern).ok_or_else(|| {
        let shown: Vec<String> = WITNESS_NAMES.iter().zip(ratios).map(|(k, r)| format!("{k}/n^4={r:.3e}")).collect();
        Error::PatternInconsistent(shown.join(", "))
    })?;
    Ok(Classification { class, fts_rank: class.fts_rank(), witness })
}
