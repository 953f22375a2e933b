//! Mask file format: JSON documents whose scalar entries are either plain
//! numbers or constant-expression strings, plus the bundled example masks.
//!
//! The expression form keeps surd-valued coefficients exact in the file;
//! plain numbers are read bit-exactly, so `load(save(bundle))` reproduces
//! every coefficient.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::parse_const_expr;
use crate::mask::{validate, CoefficientMask, MaskBundle, WaveletMask};
use crate::matrix::Matrix;

/// One scalar in a mask file: a decimal number or an expression string.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Number(f64),
    Expr(String),
}

impl Entry {
    fn eval(&self, location: &str) -> Result<f64> {
        match self {
            Entry::Number(v) => Ok(*v),
            Entry::Expr(text) => parse_const_expr(text).map_err(|source| Error::BadEntry {
                location: location.to_string(),
                source,
            }),
        }
    }
}

type Table = BTreeMap<String, Vec<Vec<Entry>>>;

#[derive(Debug, Serialize, Deserialize)]
struct SectionFile {
    support: [i64; 2],
    #[serde(default)]
    positive: Table,
    #[serde(default)]
    negative: Table,
}

#[derive(Debug, Serialize, Deserialize)]
struct WaveletFile {
    branch: u32,
    #[serde(flatten)]
    section: SectionFile,
}

#[derive(Debug, Serialize, Deserialize)]
struct MaskFile {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    notes: Option<String>,
    dilation: u32,
    multiplicity: usize,
    scaling: SectionFile,
    #[serde(default)]
    wavelets: Vec<WaveletFile>,
}

fn parse_table(table: &Table, label: &str) -> Result<BTreeMap<i64, Matrix<f64>>> {
    let mut out = BTreeMap::new();
    for (key, rows) in table {
        let k: i64 = key.trim().parse().map_err(|_| {
            Error::MaskFile(format!("{label}: coefficient key '{key}' is not an integer"))
        })?;
        let mut evaluated = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let mut out_row = Vec::with_capacity(row.len());
            for (j, entry) in row.iter().enumerate() {
                out_row.push(entry.eval(&format!("{label} k={k} entry ({i},{j})"))?);
            }
            evaluated.push(out_row);
        }
        if evaluated.is_empty() || evaluated.iter().any(|r| r.len() != evaluated[0].len()) {
            return Err(Error::MaskFile(format!("{label} k={k}: ragged or empty matrix")));
        }
        out.insert(k, Matrix::from_rows(&evaluated));
    }
    Ok(out)
}

fn bundle_from_file(file: &MaskFile) -> Result<MaskBundle<f64>> {
    let scaling = CoefficientMask::new(
        file.name.clone(),
        file.dilation,
        file.multiplicity,
        (file.scaling.support[0], file.scaling.support[1]),
        parse_table(&file.scaling.positive, "scaling positive")?,
        parse_table(&file.scaling.negative, "scaling negative")?,
    );
    let mut wavelets = Vec::with_capacity(file.wavelets.len());
    for w in &file.wavelets {
        let label = format!("wavelet branch {}", w.branch);
        wavelets.push(WaveletMask::new(
            w.branch,
            (w.section.support[0], w.section.support[1]),
            parse_table(&w.section.positive, &format!("{label} positive"))?,
            parse_table(&w.section.negative, &format!("{label} negative"))?,
        ));
    }
    let bundle = MaskBundle::new(scaling, wavelets);
    let report = validate(&bundle);
    if !report.ok() {
        return Err(Error::Invalid(report.violations));
    }
    Ok(bundle)
}

/// Parse a mask bundle from JSON text. Validation runs automatically.
pub fn load_mask_str(text: &str) -> Result<MaskBundle<f64>> {
    let file: MaskFile = serde_json::from_str(text)?;
    bundle_from_file(&file)
}

/// Load and validate a mask bundle from a file.
pub fn load_mask(path: impl AsRef<Path>) -> Result<MaskBundle<f64>> {
    let text = std::fs::read_to_string(path)?;
    load_mask_str(&text)
}

fn table_to_file(table: &BTreeMap<i64, Matrix<f64>>) -> Table {
    table
        .iter()
        .map(|(k, m)| {
            let rows = (0..m.rows())
                .map(|i| m.row(i).into_iter().map(Entry::Number).collect())
                .collect();
            (k.to_string(), rows)
        })
        .collect()
}

/// Serialize a bundle to JSON with numeric entries (full `f64` precision,
/// round-trip exact).
pub fn save_mask(bundle: &MaskBundle<f64>) -> String {
    let file = MaskFile {
        name: bundle.scaling.name().to_string(),
        notes: None,
        dilation: bundle.scaling.dilation(),
        multiplicity: bundle.scaling.multiplicity(),
        scaling: SectionFile {
            support: [bundle.scaling.support().0, bundle.scaling.support().1],
            positive: table_to_file(bundle.scaling.positive()),
            negative: table_to_file(bundle.scaling.negative()),
        },
        wavelets: bundle
            .wavelets
            .iter()
            .map(|w| WaveletFile {
                branch: w.branch(),
                section: SectionFile {
                    support: [w.support().0, w.support().1],
                    positive: table_to_file(w.positive()),
                    negative: table_to_file(w.negative()),
                },
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("mask serialization cannot fail")
}

/// Bundled example masks as `(name, file text)` pairs.
pub fn bundled_examples() -> &'static [(&'static str, &'static str)] {
    &[
        ("example_5_1", include_str!("../masks/example_5_1.json")),
        ("example_5_2", include_str!("../masks/example_5_2.json")),
    ]
}

/// Load a bundled example by name.
pub fn load_bundled(name: &str) -> Result<MaskBundle<f64>> {
    bundled_examples()
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| load_mask_str(text))
        .unwrap_or_else(|| Err(Error::UnknownExample(name.to_string())))
}

/// Resolve a CLI mask argument: a bundled example name, or a path.
pub fn resolve_mask(arg: &str) -> Result<MaskBundle<f64>> {
    if bundled_examples().iter().any(|(n, _)| *n == arg) {
        load_bundled(arg)
    } else {
        load_mask(arg)
    }
}
