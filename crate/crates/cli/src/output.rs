use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy)]
pub struct Style {
    pub format: Format,
    pub full_precision: bool,
}

impl Style {
    pub fn num(&self, x: f64) -> String {
        if self.full_precision {
            format!("{x}")
        } else {
            significant(x, 4)
        }
    }

    pub fn opt(&self, x: Option<f64>) -> String {
        x.map(|v| self.num(v)).unwrap_or_default()
    }
}

/// `x` rounded to `digits` significant digits, trailing zeros dropped.
pub fn significant(x: f64, digits: i32) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { format!("{x}") };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (digits - 1 - magnitude).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Header plus rows as CSV text.
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| csv_cell(c)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_significant_digits() {
        assert_eq!(significant(0.6, 4), "0.6");
        assert_eq!(significant(0.24471, 4), "0.2447");
        assert_eq!(significant(0.0027114, 4), "0.002711");
        assert_eq!(significant(0.65, 4), "0.65");
        assert_eq!(significant(1.0, 4), "1");
        assert_eq!(significant(0.0, 4), "0");
        assert_eq!(significant(-0.00000001, 4), "-0.00000001");
        assert_eq!(significant(1234.5678, 4), "1235");
    }

    #[test]
    fn quoting() {
        let s = csv(&["a", "b"], &[vec!["C=1,D=0".into(), "x".into()]]);
        assert_eq!(s, "a,b\n\"C=1,D=0\",x\n");
    }
}
