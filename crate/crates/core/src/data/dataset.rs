use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::chem::{circular_fingerprint, parse_smiles, scaffold_key};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub id: String,
    pub smiles: Option<String>,
    pub y: f64,
    pub features: Option<Vec<f64>>,
    pub scaffold: Option<u64>,
    /// Source line in the CSV (header is line 1); 0 when built in memory.
    #[serde(default)]
    pub line: usize,
}

impl Row {
    fn position(&self, index: usize) -> usize {
        if self.line > 0 {
            self.line
        } else {
            index + 1
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub rows: Vec<Row>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub count: usize,
    pub y_min: f64,
    pub y_max: f64,
}

/// Fingerprint bits and scaffold key of one SMILES string.
pub fn featurize_smiles(smiles: &str, radius: usize, nbits: usize) -> Result<(Vec<f64>, u64)> {
    let mol = parse_smiles(smiles)?;
    let fp = circular_fingerprint(&mol, radius, nbits)?;
    Ok((fp.to_features(), scaffold_key(&mol)))
}

struct Columns {
    smiles: Option<usize>,
    y: usize,
    id: Option<usize>,
    scaffold: Option<usize>,
    features: Vec<usize>,
}

impl Columns {
    fn from_header(header: &csv::StringRecord) -> Result<Self> {
        let find = |name: &str| header.iter().position(|h| h == name);
        let y = find("y").ok_or_else(|| Error::Data {
            row: 1,
            message: "header has no `y` column".into(),
        })?;
        let mut indexed: Vec<(usize, usize)> = header
            .iter()
            .enumerate()
            .filter_map(|(col, h)| {
                let n = h.strip_prefix('f')?.parse::<usize>().ok()?;
                Some((n, col))
            })
            .collect();
        indexed.sort_unstable();
        if let Some(pos) = indexed.iter().enumerate().position(|(i, &(n, _))| i != n) {
            return Err(Error::Data {
                row: 1,
                message: format!("feature columns must run f0..fM without gaps; missing f{pos}"),
            });
        }
        let cols = Self {
            smiles: find("smiles"),
            y,
            id: find("id"),
            scaffold: find("scaffold"),
            features: indexed.into_iter().map(|(_, c)| c).collect(),
        };
        if cols.smiles.is_none() && cols.features.is_empty() {
            return Err(Error::Data {
                row: 1,
                message: "need a `smiles` column or feature columns f0..fM".into(),
            });
        }
        Ok(cols)
    }
}

fn number(text: &str, line: usize, column: &str) -> Result<f64> {
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Data {
            row: line,
            message: format!("column `{column}`: `{text}` is not a finite number"),
        })
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reads a CSV with columns `y`, and `smiles` and/or `f0..fM`, plus
    /// optional `id` and `scaffold`. Errors cite the 1-based file line.
    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let header = rdr.headers().map_err(|e| csv_error(e, 1))?.clone();
        if header.iter().all(str::is_empty) {
            log::warn!("dataset is empty");
            return Ok(Self::default());
        }
        let cols = Columns::from_header(&header)?;
        let mut rows = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| csv_error(e, 0))?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let field = |c: usize| record.get(c).unwrap_or("");
            let y_text = field(cols.y);
            if y_text.is_empty() {
                return Err(Error::Data {
                    row: line,
                    message: "missing `y`".into(),
                });
            }
            let y = number(y_text, line, "y")?;
            let smiles = cols
                .smiles
                .map(field)
                .filter(|s| !s.is_empty())
                .map(str::to_owned);
            let present = cols.features.iter().filter(|&&c| !field(c).is_empty()).count();
            let features = match present {
                0 => None,
                p if p == cols.features.len() => Some(
                    cols.features
                        .iter()
                        .enumerate()
                        .map(|(j, &c)| number(field(c), line, &format!("f{j}")))
                        .collect::<Result<Vec<_>>>()?,
                ),
                p => {
                    return Err(Error::Data {
                        row: line,
                        message: format!(
                            "ragged feature row: {p} of {} values present",
                            cols.features.len()
                        ),
                    })
                }
            };
            if smiles.is_none() && features.is_none() {
                return Err(Error::Data {
                    row: line,
                    message: "row has neither SMILES nor features".into(),
                });
            }
            let scaffold = match cols.scaffold.map(field).filter(|s| !s.is_empty()) {
                Some(s) => Some(s.parse::<u64>().map_err(|_| Error::Data {
                    row: line,
                    message: format!("column `scaffold`: `{s}` is not an unsigned integer"),
                })?),
                None => None,
            };
            let id = cols
                .id
                .map(field)
                .filter(|s| !s.is_empty())
                .map_or_else(|| (rows.len()).to_string(), str::to_owned);
            rows.push(Row {
                id,
                smiles,
                y,
                features,
                scaffold,
                line,
            });
        }
        if rows.is_empty() {
            log::warn!("dataset has a header but no rows");
        }
        Ok(Self { rows })
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_reader(std::fs::File::open(path)?)
    }

    pub fn summary(&self) -> Option<DatasetSummary> {
        let first = self.rows.first()?.y;
        let (lo, hi) = self
            .rows
            .iter()
            .fold((first, first), |(lo, hi), r| (lo.min(r.y), hi.max(r.y)));
        Some(DatasetSummary {
            count: self.rows.len(),
            y_min: lo,
            y_max: hi,
        })
    }

    pub fn targets(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.y).collect()
    }

    /// Fills in missing features and scaffold keys from SMILES. Failures
    /// are collected per row (source line, see [`Row::line`]) rather than aborting.
    pub fn featurize(&mut self, radius: usize, nbits: usize) -> Vec<(usize, Error)> {
        let mut failures = Vec::new();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if row.features.is_some() && row.scaffold.is_some() {
                continue;
            }
            let Some(smiles) = &row.smiles else { continue };
            match featurize_smiles(smiles, radius, nbits) {
                Ok((bits, key)) => {
                    row.features.get_or_insert(bits);
                    row.scaffold.get_or_insert(key);
                }
                Err(e) => failures.push((row.position(i), e)),
            }
        }
        failures
    }

    /// Feature matrix; every row must have features of one common length.
    pub fn features(&self) -> Result<Vec<Vec<f64>>> {
        let mut width = None;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let f = r.features.as_ref().ok_or_else(|| Error::Data {
                    row: r.position(i),
                    message: "row has no features; featurize first".into(),
                })?;
                match width {
                    None => width = Some(f.len()),
                    Some(w) if w != f.len() => {
                        return Err(Error::Data {
                            row: r.position(i),
                            message: format!("feature length {} differs from {w}", f.len()),
                        })
                    }
                    _ => {}
                }
                Ok(f.clone())
            })
            .collect()
    }

    /// Scaffold keys, computed from SMILES where the column is missing.
    pub fn scaffold_keys(&self) -> Result<Vec<u64>> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| match (r.scaffold, &r.smiles) {
                (Some(k), _) => Ok(k),
                (None, Some(s)) => parse_smiles(s)
                    .map(|m| scaffold_key(&m))
                    .map_err(|e| Error::Data {
                        row: r.position(i),
                        message: e.to_string(),
                    }),
                (None, None) => Err(Error::Split(format!(
                    "row {} has neither a scaffold key nor SMILES",
                    r.position(i)
                ))),
            })
            .collect()
    }

    /// Writes `id,smiles,y,scaffold,f0..fM`. Floats use shortest round-trip
    /// formatting, so output is byte-stable.
    pub fn to_csv(&self) -> Result<String> {
        let width = self
            .rows
            .iter()
            .find_map(|r| r.features.as_ref().map(Vec::len))
            .unwrap_or(0);
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = ["id", "smiles", "y", "scaffold"].map(String::from).into();
        header.extend((0..width).map(|j| format!("f{j}")));
        w.write_record(&header).map_err(|e| csv_error(e, 0))?;
        for (i, r) in self.rows.iter().enumerate() {
            let mut rec = vec![
                r.id.clone(),
                r.smiles.clone().unwrap_or_default(),
                r.y.to_string(),
                r.scaffold.map(|k| k.to_string()).unwrap_or_default(),
            ];
            match &r.features {
                Some(f) if f.len() == width => rec.extend(f.iter().map(|v| v.to_string())),
                Some(f) => {
                    return Err(Error::Data {
                        row: r.position(i),
                        message: format!("feature length {} differs from {width}", f.len()),
                    })
                }
                None => rec.extend(std::iter::repeat_n(String::new(), width)),
            }
            w.write_record(&rec).map_err(|e| csv_error(e, 0))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Data {
            row: 0,
            message: e.to_string(),
        })?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn csv_error(e: csv::Error, fallback_line: usize) -> Error {
    let row = e
        .position()
        .map_or(fallback_line, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => Error::Data {
            row,
            message: format!("{kind:?}"),
        },
    }
}
