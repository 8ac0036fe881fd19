//! Number formatting and plain tables.

use num_complex::Complex64 as C64;
use serde_json::{json, Value};

/// Rounded to 9 decimals, trailing zeros dropped, no negative zero.
pub fn real(x: f64) -> String {
    let r = (x * 1e9).round() / 1e9;
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r}")
}

pub fn complex(c: C64) -> String {
    let im = (c.im * 1e9).round() / 1e9;
    if im == 0.0 {
        return real(c.re);
    }
    let re = real(c.re);
    let mag = real(im.abs());
    let sign = if im < 0.0 { '-' } else { '+' };
    if re == "0" {
        format!("{}{mag}i", if im < 0.0 { "-" } else { "" })
    } else {
        format!("{re}{sign}{mag}i")
    }
}

fn round12(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// `[re, im]` rounded to 12 decimals.
pub fn complex_json(c: C64) -> Value {
    json!([round12(c.re), round12(c.im)])
}

pub fn real_json(x: f64) -> Value {
    json!(round12(x))
}

/// Headers plus rows of cells.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Self { headers: headers.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// Right-aligned columns separated by two spaces.
    pub fn text(&self) -> String {
        let cols = self.rows.iter().map(Vec::len).chain([self.headers.len()]).max().unwrap_or(0);
        let mut width = vec![0; cols];
        for row in std::iter::once(&self.headers).chain(&self.rows) {
            for (k, c) in row.iter().enumerate() {
                width[k] = width[k].max(c.chars().count());
            }
        }
        let mut out = String::new();
        for row in std::iter::once(&self.headers).chain(&self.rows) {
            let line: Vec<String> = row.iter().enumerate().map(|(k, c)| format!("{c:>w$}", w = width[k])).collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out
    }

    pub fn csv(&self) -> String {
        let esc = |c: &String| {
            if c.contains([',', '"', '\n']) {
                format!("\"{}\"", c.replace('"', "\"\""))
            } else {
                c.clone()
            }
        };
        let mut out = String::new();
        for row in std::iter::once(&self.headers).chain(&self.rows) {
            out.push_str(&row.iter().map(esc).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_forms() {
        assert_eq!(real(-0.5), "-0.5");
        assert_eq!(real(1.0 - 1e-13), "1");
        assert_eq!(real(-1e-14), "0");
        assert_eq!(complex(C64::new(0.5, 0.5)), "0.5+0.5i");
        assert_eq!(complex(C64::new(0.0, -1.0)), "-1i");
        assert_eq!(complex(C64::new(0.25, 1e-15)), "0.25");
    }

    #[test]
    fn csv_quotes() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec!["1".into(), "|+ZI,+IZ|".into()]);
        assert_eq!(t.csv(), "a,b\n1,\"|+ZI,+IZ|\"\n");
    }
}
