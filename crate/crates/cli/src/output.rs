//! Result rows and their CSV / JSON-lines encodings.
//!
//! Both formats share one column set. Numbers are written in scientific
//! notation with 17 significant digits, which round-trips every `f64`.
//! Missing values are empty CSV fields and JSON `null`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use hazard_core::{EquilibriumResult, Family, GameInstance, Mode, Model};

use crate::config::Format;

pub const COLUMNS: [&str; 11] = [
    "beta",
    "y",
    "r",
    "mode",
    "model",
    "family",
    "p_accident",
    "p_signal",
    "social_cost",
    "residual",
    "flags",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Row {
    pub beta: Option<f64>,
    pub y: Option<f64>,
    pub r: Option<f64>,
    pub mode: Option<Mode>,
    pub model: Option<Model>,
    pub family: Option<Family>,
    pub p_accident: Option<f64>,
    pub p_signal: Option<f64>,
    pub social_cost: Option<f64>,
    pub residual: Option<f64>,
    /// `key=value` pairs, joined with `;`.
    pub flags: Vec<(String, String)>,
}

impl Row {
    pub fn for_game(g: &GameInstance) -> Self {
        Row {
            beta: Some(g.beta()),
            y: Some(g.y()),
            r: Some(g.r()),
            mode: Some(g.mode()),
            ..Row::default()
        }
    }

    pub fn equilibrium(g: &GameInstance, eq: &EquilibriumResult) -> Self {
        let mut row = Row {
            mode: Some(eq.mode),
            model: Some(eq.model),
            family: eq.family,
            p_accident: Some(eq.p_accident),
            p_signal: Some(eq.p_signal),
            social_cost: Some(eq.social_cost),
            residual: Some(eq.residual),
            ..Row::for_game(g)
        };
        if !eq.indifferent.is_empty() {
            let types: Vec<&str> = eq.indifferent.iter().map(|a| a.as_str()).collect();
            row.flag("indifferent", types.join("+"));
        }
        row
    }

    pub fn flag(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.flags.push((key.to_string(), value.to_string()));
        self
    }

    pub fn flags_text(&self) -> String {
        self.flags
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    fn numbers(&self) -> [Option<f64>; 3] {
        [self.beta, self.y, self.r]
    }

    fn results(&self) -> [Option<f64>; 4] {
        [self.p_accident, self.p_signal, self.social_cost, self.residual]
    }

    fn labels(&self) -> [Option<String>; 3] {
        [
            self.mode.map(|m| m.as_str().to_string()),
            self.model.map(|m| m.as_str().to_string()),
            self.family.map(|f| f.to_string()),
        ]
    }
}

pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_line(row: &Row) -> String {
    let mut fields: Vec<String> = Vec::with_capacity(COLUMNS.len());
    fields.extend(row.numbers().iter().map(|v| v.map(number).unwrap_or_default()));
    fields.extend(row.labels().into_iter().map(Option::unwrap_or_default));
    fields.extend(row.results().iter().map(|v| v.map(number).unwrap_or_default()));
    fields.push(row.flags_text());
    fields.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(",")
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn json_number(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => number(x),
        _ => "null".to_string(),
    }
}

pub fn json_line(row: &Row) -> String {
    let mut values: Vec<String> = Vec::with_capacity(COLUMNS.len());
    values.extend(row.numbers().iter().map(|&v| json_number(v)));
    values.extend(
        row.labels()
            .iter()
            .map(|l| l.as_deref().map_or_else(|| "null".to_string(), json_string)),
    );
    values.extend(row.results().iter().map(|&v| json_number(v)));
    values.push(json_string(&row.flags_text()));
    let body: Vec<String> = COLUMNS
        .iter()
        .zip(values)
        .map(|(k, v)| format!("{}:{v}", json_string(k)))
        .collect();
    format!("{{{}}}", body.join(","))
}

pub fn render(rows: &[Row], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(&COLUMNS.join(","));
            out.push('\n');
            for row in rows {
                out.push_str(&csv_line(row));
                out.push('\n');
            }
        }
        Format::JsonLines => {
            for row in rows {
                out.push_str(&json_line(row));
                out.push('\n');
            }
        }
    }
    out
}

pub fn write_rows(path: &Path, rows: &[Row], format: Format) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut file =
        std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    file.write_all(render(rows, format).as_bytes())
        .with_context(|| format!("writing {}", path.display()))
}
