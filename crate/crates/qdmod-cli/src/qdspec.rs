//! The quadratic differentials accepted by `trace`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use qdmod::qdiff::{growth_qd, RationalQD};
use qdmod::{QdError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QdSpec {
    /// The growth family with parameters `r` and `ψ`.
    Growth { r: f64, psi: f64 },
    /// `dz²/z²`.
    Dz2OverZ2,
    /// `-dz²`.
    NegDz2,
}

impl QdSpec {
    pub fn build(&self) -> Result<RationalQD> {
        match *self {
            QdSpec::Growth { r, psi } => growth_qd(r, psi),
            QdSpec::Dz2OverZ2 => Ok(RationalQD::dz2_over_z2()),
            QdSpec::NegDz2 => RationalQD::constant(Complex64::new(-1.0, 0.0)),
        }
    }
}

impl FromStr for QdSpec {
    type Err = QdError;
    fn from_str(s: &str) -> Result<Self> {
        let mut words = s.split_whitespace();
        let head = words.next().unwrap_or("");
        let rest: Vec<&str> = words.collect();
        match head {
            "dz2_over_z2" | "neg_dz2" if !rest.is_empty() => {
                Err(QdError::Parse(format!("{head} takes no parameters")))
            }
            "dz2_over_z2" => Ok(QdSpec::Dz2OverZ2),
            "neg_dz2" => Ok(QdSpec::NegDz2),
            "growth" => {
                let (mut r, mut psi) = (None, None);
                for kv in rest {
                    let (k, v) = kv
                        .split_once('=')
                        .ok_or_else(|| QdError::Parse(format!("growth: expected key=value, got {kv:?}")))?;
                    let x: f64 =
                        v.parse().map_err(|_| QdError::Parse(format!("growth: invalid number {v:?}")))?;
                    match k {
                        "r" => r = Some(x),
                        "psi" => psi = Some(x),
                        _ => return Err(QdError::Parse(format!("growth: unexpected key {k:?}"))),
                    }
                }
                match (r, psi) {
                    (Some(r), Some(psi)) => Ok(QdSpec::Growth { r, psi }),
                    _ => Err(QdError::Parse("growth: needs r and psi".into())),
                }
            }
            _ => Err(QdError::Parse(format!("unknown quadratic differential {s:?}"))),
        }
    }
}

impl fmt::Display for QdSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QdSpec::Growth { r, psi } => write!(f, "growth r={r} psi={psi}"),
            QdSpec::Dz2OverZ2 => f.write_str("dz2_over_z2"),
            QdSpec::NegDz2 => f.write_str("neg_dz2"),
        }
    }
}
