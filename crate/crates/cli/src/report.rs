use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::CliError;

/// Output of one command in every supported format.
#[derive(Debug, Clone)]
pub struct Report {
    pub text: String,
    pub json: Value,
    /// Header and rows, for commands with a tabular result.
    pub table: Option<(Vec<String>, Vec<Vec<String>>)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "text" | "txt" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Usage(format!("unknown format '{other}' (use text, csv or json)"))),
        }
    }
}

impl Report {
    pub fn render(&self, format: Format, command: &str) -> Result<String, CliError> {
        match format {
            Format::Text => Ok(self.text.clone()),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).map_err(|e| CliError::Io(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let (header, rows) = self
                    .table
                    .as_ref()
                    .ok_or_else(|| CliError::Usage(format!("{command} has no tabular output; use text or json")))?;
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(header).map_err(|e| CliError::Io(e.to_string()))?;
                for r in rows {
                    w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
            }
        }
    }

    /// Writes to `path` if given, otherwise to `out`.
    pub fn emit(&self, format: Format, command: &str, path: Option<&str>, out: &mut dyn Write) -> Result<(), CliError> {
        let body = self.render(format, command)?;
        match path {
            Some(p) => {
                fs::write(Path::new(p), body).map_err(|e| CliError::Io(format!("{p}: {e}")))?;
                writeln!(out, "wrote {p}").map_err(|e| CliError::Io(e.to_string()))
            }
            None => out.write_all(body.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
        }
    }
}

/// Groups the fractional digits of a plain decimal in threes with `~`, as in
/// `2.500~000~000`.
pub fn group_digits(s: &str) -> String {
    let Some((int, frac)) = s.split_once('.') else { return s.to_string() };
    let groups: Vec<&str> = frac.as_bytes().chunks(3).map(|c| std::str::from_utf8(c).expect("ascii digits")).collect();
    format!("{int}.{}", groups.join("~"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grouping() {
        assert_eq!(group_digits("2.500000000000000000"), "2.500~000~000~000~000~000");
        assert_eq!(group_digits("-12.35693"), "-12.356~93");
        assert_eq!(group_digits("7"), "7");
    }

    #[test]
    fn csv_needs_a_table() {
        let r = Report { text: "x\n".into(), json: Value::Null, table: None };
        assert!(matches!(r.render(Format::Csv, "bounds"), Err(CliError::Usage(_))));
        let r = Report { table: Some((vec!["k".into()], vec![vec!["1".into()]])), ..r };
        assert_eq!(r.render(Format::Csv, "x").unwrap(), "k\n1\n");
    }
}
