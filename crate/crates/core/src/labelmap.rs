//! Mapping from original synsets to merged training classes, and its
//! tab-separated file format:
//!
//! ```text
//! #labelmap<TAB>v1<TAB><provenance>
//! <class_id><TAB><representative><TAB><assigned_count><TAB><member,member,...>
//! ...
//! #UNASSIGNED
//! <synset><TAB><count>
//! ```
//!
//! Other lines starting with `#` are comments.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::taxonomy::SynsetId;

const HEADER: &str = "#labelmap";
const UNASSIGNED: &str = "#UNASSIGNED";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelClass {
    pub id: u32,
    pub representative: SynsetId,
    /// Sorted, includes the representative when it contributes images.
    pub members: Vec<SynsetId>,
    pub assigned_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    pub classes: Vec<LabelClass>,
    /// Synsets whose images are not used for training, sorted by id.
    pub unassigned: Vec<(SynsetId, u64)>,
    pub provenance: String,
}

impl LabelMap {
    /// Builds a map from unordered `(representative, members, count)` triples.
    /// Classes are numbered consecutively in representative-id order.
    pub fn from_classes(
        provenance: impl Into<String>,
        classes: Vec<(SynsetId, Vec<SynsetId>, u64)>,
        mut unassigned: Vec<(SynsetId, u64)>,
    ) -> Self {
        let mut classes = classes;
        classes.sort_by(|a, b| a.0.cmp(&b.0));
        unassigned.sort();
        let classes = classes
            .into_iter()
            .enumerate()
            .map(|(i, (representative, mut members, assigned_count))| {
                members.sort();
                LabelClass {
                    id: i as u32,
                    representative,
                    members,
                    assigned_count,
                }
            })
            .collect();
        LabelMap {
            classes,
            unassigned,
            provenance: provenance.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn total_assigned(&self) -> u64 {
        self.classes.iter().map(|c| c.assigned_count).sum()
    }

    pub fn total_unassigned(&self) -> u64 {
        self.unassigned.iter().map(|u| u.1).sum()
    }

    /// Class id of every member synset.
    pub fn class_of(&self) -> HashMap<&SynsetId, u32> {
        self.classes
            .iter()
            .flat_map(|c| c.members.iter().map(move |m| (m, c.id)))
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{HEADER}\tv1\t{}", self.provenance);
        for class in &self.classes {
            let members: Vec<&str> = class.members.iter().map(SynsetId::as_str).collect();
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}",
                class.id,
                class.representative,
                class.assigned_count,
                members.join(",")
            );
        }
        let _ = writeln!(out, "{UNASSIGNED}");
        for (id, count) in &self.unassigned {
            let _ = writeln!(out, "{id}\t{count}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut provenance = None;
        let mut classes = Vec::new();
        let mut unassigned = Vec::new();
        let mut in_unassigned = false;
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix(HEADER) {
                let mut fields = rest.trim_start_matches('\t').splitn(2, '\t');
                if fields.next() != Some("v1") {
                    return Err(Error::parse(
                        "labelmap",
                        line_no,
                        "unsupported labelmap version",
                    ));
                }
                provenance = Some(fields.next().unwrap_or("").to_owned());
                continue;
            }
            if line == UNASSIGNED {
                in_unassigned = true;
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let synset = |s: &str| {
                SynsetId::new(s).map_err(|e| Error::parse("labelmap", line_no, e.to_string()))
            };
            let number = |s: &str| {
                s.parse::<u64>()
                    .map_err(|_| Error::parse("labelmap", line_no, format!("bad number `{s}`")))
            };
            if in_unassigned {
                if fields.len() != 2 {
                    return Err(Error::parse(
                        "labelmap",
                        line_no,
                        "expected `synset<TAB>count`",
                    ));
                }
                unassigned.push((synset(fields[0])?, number(fields[1])?));
            } else {
                if fields.len() != 4 {
                    return Err(Error::parse(
                        "labelmap",
                        line_no,
                        "expected `class_id<TAB>representative<TAB>count<TAB>members`",
                    ));
                }
                let members = if fields[3].is_empty() {
                    Vec::new()
                } else {
                    fields[3].split(',').map(synset).collect::<Result<_>>()?
                };
                classes.push(LabelClass {
                    id: number(fields[0])? as u32,
                    representative: synset(fields[1])?,
                    assigned_count: number(fields[2])?,
                    members,
                });
            }
        }
        let provenance =
            provenance.ok_or_else(|| Error::Format("labelmap header line missing".into()))?;
        Ok(LabelMap {
            classes,
            unassigned,
            provenance,
        })
    }
}
