//! File formats: JSON state files and the CSV curve tables.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{SmallMatrix, C64};
use crate::tensor::PureState;

/// JSON state file: eight `[re, im]` pairs in index order `4i + 2j + k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub amplitudes: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl StateFile {
    pub fn from_state(psi: &PureState, label: Option<String>) -> Self {
        Self { amplitudes: psi.amplitudes().iter().map(|z| [z.re, z.im]).collect(), label }
    }

    pub fn to_state(&self) -> Result<PureState> {
        if self.amplitudes.len() != 8 {
            return Err(Error::StateFile(format!("expected 8 amplitudes, found {}", self.amplitudes.len())));
        }
        if self.amplitudes.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::StateFile("non-finite amplitude".into()));
        }
        let amps = std::array::from_fn(|k| C64::new(self.amplitudes[k][0], self.amplitudes[k][1]));
        PureState::new(amps)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(text).map_err(|e| Error::StateFile(e.to_string()))?;
        file.to_state()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state file serializes")
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::StateFile(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::StateFile(format!("{}: {e}", path.display())))
    }
}

/// Serde adapter storing a [`PureState`] as its `[re, im]` list.
pub mod state_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(psi: &PureState, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateFile::from_state(psi, None).amplitudes.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<PureState, D::Error> {
        let amplitudes = Vec::<[f64; 2]>::deserialize(d)?;
        StateFile { amplitudes, label: None }.to_state().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter storing a 2×2 matrix as row-major `[re, im]` pairs.
pub mod matrix_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &SmallMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = m.dim();
        let entries: Vec<[f64; 2]> = (0..n * n).map(|k| [m[(k / n, k % n)].re, m[(k / n, k % n)].im]).collect();
        entries.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<SmallMatrix, D::Error> {
        let entries = Vec::<[f64; 2]>::deserialize(d)?;
        let zs: Vec<C64> = entries.iter().map(|e| C64::new(e[0], e[1])).collect();
        SmallMatrix::from_row_major(&zs).map_err(serde::de::Error::custom)
    }
}

/// One row of a measure curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub x: f64,
    pub tau: f64,
    pub omega: f64,
    pub c1_23: f64,
    pub c2_13: f64,
    pub c3_12: f64,
}

pub const CURVE_HEADER: &str = "x,tau,omega,c1_23,c2_13,c3_12";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn curve_csv(rows: &[CurveRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 140);
    out.push_str(CURVE_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [r.x, r.tau, r.omega, r.c1_23, r.c2_13, r.c3_12].map(format_f64);
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

pub fn parse_curve_csv(text: &str) -> Result<Vec<CurveRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(CURVE_HEADER) {
        return Err(Error::InvalidInput("missing curve header".into()));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let v: Vec<f64> = line
                .split(',')
                .map(|f| f.parse::<f64>().map_err(|e| Error::InvalidInput(format!("{f}: {e}"))))
                .collect::<Result<_>>()?;
            if v.len() != 6 {
                return Err(Error::InvalidInput(format!("expected 6 fields, found {}", v.len())));
            }
            Ok(CurveRow { x: v[0], tau: v[1], omega: v[2], c1_23: v[3], c2_13: v[4], c3_12: v[5] })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_wrong_length() {
        let err = StateFile::parse(r#"{"amplitudes": [[1, 0], [0, 0]]}"#).unwrap_err();
        assert!(matches!(err, Error::StateFile(ref m) if m.contains("expected 8")));
    }

    #[test]
    fn rejects_malformed_json() {
        assert!(StateFile::parse("{amplitudes: 3").is_err());
        assert!(StateFile::parse(r#"{"amplitudes": [[1, 0, 0]]}"#).is_err());
        assert!(StateFile::parse(r#"{"amps": []}"#).is_err());
    }

    #[test]
    fn label_is_optional() {
        let text = r#"{"amplitudes": [[1,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]], "label": "sep"}"#;
        let f = StateFile::parse(text).unwrap();
        assert_eq!(f.label.as_deref(), Some("sep"));
        assert_eq!(f.to_state().unwrap(), PureState::basis(0, 0, 0));
    }

    #[test]
    fn csv_layout() {
        let rows = [CurveRow { x: -1.0, tau: 1.0, omega: 1.0, c1_23: 1.0, c2_13: 1.0, c3_12: 1.0 }];
        let text = curve_csv(&rows);
        assert!(text.starts_with("x,tau,omega,c1_23,c2_13,c3_12\n-1.0000000000000000e0,"));
        assert!(text.ends_with('\n') && !text.contains('\r'));
        assert_eq!(parse_curve_csv(&text).unwrap(), rows);
    }

    proptest! {
        #[test]
        fn state_file_round_trip_is_bit_exact(v in prop::collection::vec(-1e3f64..1e3, 16)) {
            let amps = std::array::from_fn(|k| C64::new(v[2 * k], v[2 * k + 1]));
            let psi = PureState::new(amps).unwrap();
            let back = StateFile::parse(&StateFile::from_state(&psi, None).to_json()).unwrap().to_state().unwrap();
            prop_assert_eq!(back, psi);
        }

        #[test]
        fn csv_numbers_round_trip(x in proptest::num::f64::NORMAL) {
            prop_assert_eq!(format_f64(x).parse::<f64>().unwrap(), x);
        }
    }
}
