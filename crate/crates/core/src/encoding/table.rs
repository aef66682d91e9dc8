//! CSV tables of video-level vectors and kernel matrices.
//!
//! Feature table: one `id,v1,...,vd` row per video. Gram matrix: a
//! `#gram<TAB>gamma=<g><TAB>epsilon=<e>` line, an `id,<col ids...>` header,
//! then one `row_id,values...` line per row. Floats are written in shortest
//! round-trip form so tables reload bit-exactly. Other `#` lines are comments.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub ids: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

fn join_row(id: &str, values: &[f64]) -> String {
    let mut line = String::from(id);
    for v in values {
        line.push(',');
        line.push_str(&v.to_string());
    }
    line.push('\n');
    line
}

fn check_id(id: &str) -> Result<()> {
    if id.is_empty() || id.contains([',', '\n', '\r']) || id.starts_with('#') {
        return Err(Error::contract(format!(
            "id `{id}` cannot be written to csv"
        )));
    }
    Ok(())
}

fn parse_values(source: &str, line_no: usize, fields: &[&str]) -> Result<Vec<f64>> {
    fields
        .iter()
        .map(|f| {
            let f = f.trim();
            let v: f64 = f
                .parse()
                .map_err(|_| Error::parse(source, line_no, format!("not a number: `{f}`")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::parse(
                    source,
                    line_no,
                    format!("non-finite value `{f}`"),
                ))
            }
        })
        .collect()
}

impl FeatureTable {
    pub fn new(ids: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if ids.len() != rows.len() {
            return Err(Error::contract("feature table needs one id per row"));
        }
        if let Some(first) = rows.first() {
            if rows.iter().any(|r| r.len() != first.len()) {
                return Err(Error::contract("feature rows differ in dimension"));
            }
        }
        for id in &ids {
            check_id(id)?;
        }
        Ok(FeatureTable { ids, rows })
    }

    pub fn to_csv(&self) -> String {
        self.ids
            .iter()
            .zip(&self.rows)
            .map(|(id, row)| join_row(id, row))
            .collect()
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut ids = Vec::new();
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            ids.push(fields[0].trim().to_owned());
            rows.push(parse_values("features", i + 1, &fields[1..])?);
        }
        FeatureTable::new(ids, rows).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    pub row_ids: Vec<String>,
    pub col_ids: Vec<String>,
    pub values: Vec<Vec<f64>>,
    pub gamma: f64,
    pub epsilon: f64,
}

impl GramMatrix {
    pub fn to_csv(&self) -> String {
        let mut out = format!("#gram\tgamma={}\tepsilon={}\n", self.gamma, self.epsilon);
        out.push_str("id");
        for c in &self.col_ids {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (id, row) in self.row_ids.iter().zip(&self.values) {
            out.push_str(&join_row(id, row));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut gamma = None;
        let mut epsilon = None;
        let mut col_ids: Option<Vec<String>> = None;
        let mut row_ids = Vec::new();
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if let Some(rest) = line.strip_prefix("#gram") {
                for field in rest.split('\t') {
                    if let Some(v) = field.strip_prefix("gamma=") {
                        gamma = v.parse().ok();
                    } else if let Some(v) = field.strip_prefix("epsilon=") {
                        epsilon = v.parse().ok();
                    }
                }
                continue;
            }
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            match &col_ids {
                None => col_ids = Some(fields[1..].iter().map(|s| s.trim().to_owned()).collect()),
                Some(cols) => {
                    let row = parse_values("gram", line_no, &fields[1..])?;
                    if row.len() != cols.len() {
                        return Err(Error::parse(
                            "gram",
                            line_no,
                            format!("{} values for {} columns", row.len(), cols.len()),
                        ));
                    }
                    row_ids.push(fields[0].trim().to_owned());
                    values.push(row);
                }
            }
        }
        let (Some(gamma), Some(epsilon)) = (gamma, epsilon) else {
            return Err(Error::Format(
                "gram header with gamma and epsilon missing".into(),
            ));
        };
        Ok(GramMatrix {
            row_ids,
            col_ids: col_ids.unwrap_or_default(),
            values,
            gamma,
            epsilon,
        })
    }
}
