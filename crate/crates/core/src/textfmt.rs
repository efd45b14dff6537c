//! Plain sectioned `key = value` text, shared by rule files and run configs.
//!
//! ```text
//! # comment
//! [section]
//! key = value
//! ```
//!
//! Sections may repeat; keys before the first header land in an unnamed section.

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().rev().find(|e| e.key == key)
    }

    pub fn require(&self, key: &str) -> Result<&Entry> {
        self.get(key).ok_or_else(|| Error::Parse {
            line: self.line,
            msg: format!("section [{}] is missing key `{key}`", self.name),
        })
    }
}

impl Entry {
    pub fn parse<T: std::str::FromStr>(&self) -> Result<T> {
        self.value.trim().parse().map_err(|_| Error::Parse {
            line: self.line,
            msg: format!("cannot parse value `{}` for `{}`", self.value, self.key),
        })
    }

    pub fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }
}

pub fn parse(text: &str) -> Result<Vec<Section>> {
    let mut sections = vec![Section::default()];
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or(Error::Parse {
                line: line_no,
                msg: "unterminated section header".into(),
            })?;
            sections.push(Section {
                name: name.trim().to_string(),
                line: line_no,
                entries: Vec::new(),
            });
            continue;
        }
        let (k, v) = line.split_once('=').ok_or(Error::Parse {
            line: line_no,
            msg: format!("expected `key = value`, got `{line}`"),
        })?;
        sections.last_mut().unwrap().entries.push(Entry {
            key: k.trim().to_string(),
            value: v.trim().to_string(),
            line: line_no,
        });
    }
    if sections[0].entries.is_empty() {
        sections.remove(0);
    }
    Ok(sections)
}

/// Parses `x,y x,y ...` into planar points.
pub fn parse_points(entry: &Entry) -> Result<Vec<[f64; 2]>> {
    entry
        .value
        .split_whitespace()
        .map(|tok| {
            let (a, b) = tok
                .split_once(',')
                .ok_or_else(|| entry.err(format!("expected `x,y`, got `{tok}`")))?;
            let x = a
                .parse::<f64>()
                .map_err(|_| entry.err(format!("bad number `{a}`")))?;
            let y = b
                .parse::<f64>()
                .map_err(|_| entry.err(format!("bad number `{b}`")))?;
            Ok([x, y])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_comments() {
        let text = "top = 1\n# c\n[a]\nx = 2 # trailing\n\n[b]\ny=3\n[a]\nx = 4\n";
        let s = parse(text).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s[0].name, "");
        assert_eq!(s[1].get("x").unwrap().value, "2");
        assert_eq!(s[2].get("y").unwrap().parse::<i32>().unwrap(), 3);
        assert_eq!(s[3].get("x").unwrap().line, 9);
    }

    #[test]
    fn malformed_lines_are_reported() {
        assert!(matches!(parse("[a\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("[a]\nnope\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn points() {
        let s = parse("[t]\np = 0,0 0.5,1\n").unwrap();
        let pts = parse_points(s[0].get("p").unwrap()).unwrap();
        assert_eq!(pts, vec![[0.0, 0.0], [0.5, 1.0]]);
    }
}
