//! Input documents: a single JSON file describing the germ.
//!
//! Rationals are strings like `"3/2"` so nothing passes through floating
//! point. Example:
//!
//! ```json
//! {
//!   "mode": "qo",
//!   "d": 2,
//!   "exponents": [["3/2", "0"], ["7/4", "0"], ["2", "1/2"]],
//!   "options": { "section_lattice": "ambient" }
//! }
//! ```

use std::str::FromStr;

use serde::Deserialize;

use qoseries::motivic::Options;
use qoseries::qocore::{CharData, SectionLattice};
use qoseries::{Rat, RatVec};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    pub mode: String,
    pub d: usize,
    #[serde(default)]
    pub exponents: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub generators: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub options: InputOptions,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputOptions {
    #[serde(default)]
    pub section_lattice: Option<String>,
    #[serde(default)]
    pub box_limit: Option<u64>,
    #[serde(default)]
    pub guard: Option<usize>,
}

/// A located input problem: what failed and where.
#[derive(Debug)]
pub struct InputError {
    pub location: String,
    pub message: String,
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for InputError {}

fn parse_rat(s: &str, location: &str) -> Result<Rat, InputError> {
    Rat::from_str(s.trim()).map_err(|e| InputError {
        location: location.to_string(),
        message: format!("cannot parse rational {s:?}: {e}"),
    })
}

fn parse_rows(
    rows: &[Vec<String>],
    d: usize,
    field: &str,
) -> Result<Vec<RatVec>, InputError> {
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.len() != d {
            return Err(InputError {
                location: format!("{field}[{i}]"),
                message: format!("expected {d} entries, found {}", row.len()),
            });
        }
        let mut entries = Vec::with_capacity(d);
        for (j, s) in row.iter().enumerate() {
            entries.push(parse_rat(s, &format!("{field}[{i}][{j}]"))?);
        }
        out.push(RatVec::new(entries));
    }
    Ok(out)
}

impl InputSpec {
    pub fn from_json(text: &str) -> Result<InputSpec, InputError> {
        serde_json::from_str(text).map_err(|e| InputError {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })
    }

    /// Validated characteristic data; errors carry the offending field.
    pub fn to_char_data(&self) -> Result<CharData, InputError> {
        if self.d == 0 {
            return Err(InputError {
                location: "d".into(),
                message: "ambient dimension must be at least 1".into(),
            });
        }
        match self.mode.as_str() {
            "qo" => {
                if self.generators.is_some() {
                    return Err(InputError {
                        location: "generators".into(),
                        message: "qo mode takes \"exponents\", not \"generators\"".into(),
                    });
                }
                let rows = self.exponents.clone().unwrap_or_default();
                let exponents = parse_rows(&rows, self.d, "exponents")?;
                CharData::qo(self.d, exponents).map_err(|e| InputError {
                    location: "exponents".into(),
                    message: e.to_string(),
                })
            }
            "toric" => {
                if self.exponents.is_some() {
                    return Err(InputError {
                        location: "exponents".into(),
                        message: "toric mode takes \"generators\", not \"exponents\"".into(),
                    });
                }
                let rows = self.generators.clone().ok_or(InputError {
                    location: "generators".into(),
                    message: "toric mode requires a \"generators\" array".into(),
                })?;
                let generators = parse_rows(&rows, self.d, "generators")?;
                CharData::toric(self.d, generators, None).map_err(|e| InputError {
                    location: "generators".into(),
                    message: e.to_string(),
                })
            }
            other => Err(InputError {
                location: "mode".into(),
                message: format!("unknown mode {other:?}; expected \"qo\" or \"toric\""),
            }),
        }
    }

    /// Assembly options from the document, before CLI flag overrides.
    pub fn to_options(&self) -> Result<Options, InputError> {
        let mut opts = Options::default();
        if let Some(s) = &self.options.section_lattice {
            opts.section_lattice = parse_section_lattice(s)?;
        }
        if let Some(b) = self.options.box_limit {
            opts.box_limit = b;
        }
        opts.guard = self.options.guard;
        Ok(opts)
    }
}

pub fn parse_section_lattice(s: &str) -> Result<SectionLattice, InputError> {
    match s {
        "ambient" => Ok(SectionLattice::Ambient),
        "branch" => Ok(SectionLattice::Branch),
        other => Err(InputError {
            location: "options.section_lattice".into(),
            message: format!("unknown section lattice {other:?}; expected \"ambient\" or \"branch\""),
        }),
    }
}
