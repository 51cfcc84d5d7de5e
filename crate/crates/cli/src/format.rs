//! JSON file formats.
//!
//! A presentation file is `{"matrix": [[..], ..], "chern": [..], "name": ".."}`
//! with keys written in that order; `name` is omitted when absent. Integers
//! are JSON numbers of any size. Rationals are `"num/den"` strings.

use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Number;

use spinc_core::classify::{ClassFingerprint, FinitePart, InvariantReport, Witness};
use spinc_core::exact::{rational_string, CyclotomicSum, QmodZ};
use spinc_core::presentation::DecoratedPresentation;
use spinc_core::zlinalg::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationFile {
    pub matrix: Vec<Vec<Number>>,
    pub chern: Vec<Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

/// Problem with a file, naming the offending field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for FieldError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

pub fn number(x: &BigInt) -> Number {
    Number::from_str(&x.to_string()).expect("integers are valid JSON numbers")
}

fn integer(n: &Number, field: String) -> Result<BigInt, FieldError> {
    BigInt::from_str(&n.to_string())
        .map_err(|_| FieldError { field, message: format!("expected an integer, found {n}") })
}

impl PresentationFile {
    pub fn parse(text: &str) -> Result<Self, FieldError> {
        serde_json::from_str(text).map_err(|e| FieldError {
            field: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes") + "\n"
    }

    pub fn from_presentation(p: &DecoratedPresentation, name: Option<String>) -> Self {
        PresentationFile {
            matrix: p.matrix().to_rows().iter().map(|r| r.iter().map(number).collect()).collect(),
            chern: p.chern().iter().map(number).collect(),
            name,
        }
    }

    /// Checks shape, symmetry and parity, reporting the first bad field.
    pub fn to_presentation(&self) -> Result<DecoratedPresentation, FieldError> {
        let n = self.matrix.len();
        let mut rows = Vec::with_capacity(n);
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != n {
                return Err(FieldError {
                    field: format!("matrix[{i}]"),
                    message: format!("row has {} entries, expected {n}", row.len()),
                });
            }
            let row = row
                .iter()
                .enumerate()
                .map(|(j, x)| integer(x, format!("matrix[{i}][{j}]")))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        if self.chern.len() != n {
            return Err(FieldError {
                field: "chern".into(),
                message: format!("has {} entries, expected {n}", self.chern.len()),
            });
        }
        let chern = self
            .chern
            .iter()
            .enumerate()
            .map(|(i, x)| integer(x, format!("chern[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let b = IntMatrix::from_big_rows(rows)
            .map_err(|e| FieldError { field: "matrix".into(), message: e.to_string() })?;
        DecoratedPresentation::new(b, chern).map_err(|e| {
            let field = match &e {
                spinc_core::Error::NotSymmetric { row, col } => format!("matrix[{row}][{col}]"),
                spinc_core::Error::ParityViolation { index } => format!("chern[{index}]"),
                _ => "matrix".into(),
            };
            FieldError { field, message: e.to_string() }
        })
    }
}

/// Twelve significant digits, `.` as separator, no exponent.
pub fn decimal(x: f64) -> Number {
    // rounding happens once, in the scientific rendering
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    let (sign, mantissa) = mantissa.strip_prefix('-').map_or(("", mantissa), |m| ("-", m));
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let point = 1 + exp;
    let s = if digits.bytes().all(|b| b == b'0') {
        "0.00000000000".to_string()
    } else if point <= 0 {
        format!("{sign}0.{}{digits}", "0".repeat((-point) as usize))
    } else if point as usize >= digits.len() {
        format!("{sign}{digits}{}", "0".repeat(point as usize - digits.len()))
    } else {
        let (int, frac) = digits.split_at(point as usize);
        format!("{sign}{int}.{frac}")
    };
    Number::from_str(&s).expect("formatted decimal")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Approx {
    pub re: Number,
    pub im: Number,
    pub display_only: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussJson {
    pub modulus: u64,
    pub coeffs: Vec<i64>,
    pub text: String,
    pub approx: Approx,
}

impl GaussJson {
    pub fn of(g: &CyclotomicSum) -> Self {
        let g = g.canonical();
        let (re, im) = g.to_complex();
        // floating noise around exact zeros
        let snap = |x: f64| if x.abs() < 1e-9 { 0.0 } else { x };
        GaussJson {
            modulus: g.modulus(),
            coeffs: g.coeffs().to_vec(),
            text: g.to_string(),
            approx: Approx { re: decimal(snap(re)), im: decimal(snap(im)), display_only: true },
        }
    }
}

fn strings(v: &[QmodZ]) -> Vec<String> {
    v.iter().map(QmodZ::to_string).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FiniteJson {
    Exact { values: Vec<String>, defects: Vec<String>, gauss: GaussJson },
    Coset { step: u64, value_multisets: Vec<Vec<String>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FingerprintJson {
    pub free_rank: usize,
    pub torsion: Vec<Number>,
    pub chern_free_gcd: Number,
    pub finite: FiniteJson,
}

impl FingerprintJson {
    pub fn of(f: &ClassFingerprint) -> Self {
        let finite = match &f.finite {
            FinitePart::Exact { values, defects, gauss } => {
                FiniteJson::Exact { values: strings(values), defects: strings(defects), gauss: GaussJson::of(gauss) }
            }
            FinitePart::Coset { step, value_multisets } => {
                FiniteJson::Coset { step: *step, value_multisets: value_multisets.iter().map(|v| strings(v)).collect() }
            }
        };
        FingerprintJson {
            free_rank: f.free_rank,
            torsion: f.torsion.iter().map(number).collect(),
            chern_free_gcd: number(&f.chern_free_gcd),
            finite,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub free_rank: usize,
    pub torsion: Vec<Number>,
    pub chern_free_gcd: Number,
    pub chern_free: Vec<Number>,
    pub chern_torsion: Vec<Number>,
    pub gauss: GaussJson,
    pub value_multiset: Vec<String>,
    pub defect_multiset: Vec<String>,
    pub radical_slopes: Vec<String>,
    pub section_dependent: bool,
    pub fingerprint: FingerprintJson,
}

impl ReportFile {
    pub fn of(r: &InvariantReport, name: Option<String>) -> Self {
        ReportFile {
            name,
            free_rank: r.free_rank,
            torsion: r.torsion.iter().map(number).collect(),
            chern_free_gcd: number(&r.chern_free_gcd),
            chern_free: r.chern_free.iter().map(number).collect(),
            chern_torsion: r.chern_torsion.iter().map(number).collect(),
            gauss: GaussJson::of(&r.gauss),
            value_multiset: strings(&r.value_multiset),
            defect_multiset: strings(&r.defect_multiset),
            radical_slopes: r.radical_slopes.iter().map(rational_string).collect(),
            section_dependent: r.section_dependent,
            fingerprint: FingerprintJson::of(&r.fingerprint),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub torsion: Vec<Vec<u64>>,
    pub free: Vec<Vec<Number>>,
    pub coupling: Vec<String>,
}

impl WitnessJson {
    pub fn of(w: &Witness) -> Self {
        WitnessJson {
            torsion: w.torsion.images.clone(),
            free: w.free.to_rows().iter().map(|r| r.iter().map(number).collect()).collect(),
            coupling: strings(&w.coupling),
        }
    }
}
