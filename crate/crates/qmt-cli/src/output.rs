//! Deterministic CSV and table formatting.
//!
//! CSV cells carry 12 significant digits in scientific notation, rows end
//! with a bare LF, and undefined values serialize as empty cells, so output
//! is byte-stable across runs and safe for spreadsheets.

use std::io::Write;
use std::path::Path;

/// Scientific notation with 12 significant digits.
pub fn fmt_sci(x: f64) -> String {
    format!("{x:.11e}")
}

/// Empty cell for `None`, scientific notation otherwise.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_sci).unwrap_or_default()
}

/// Writes one CSV file with LF line endings.
pub fn write_csv(
    path: &Path,
    header: &[String],
    rows: &[Vec<String>],
) -> std::io::Result<()> {
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()
}

/// Prints an aligned text table to stdout.
pub fn print_table(header: &[&str], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row.iter()) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    println!(
        "{}",
        line(&header.iter().map(|s| s.to_string()).collect::<Vec<_>>())
    );
    for row in rows {
        println!("{}", line(row));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_format_is_fixed_width_mantissa() {
        assert_eq!(fmt_sci(0.4), "4.00000000000e-1");
        assert_eq!(fmt_sci(1.0), "1.00000000000e0");
        assert_eq!(fmt_sci(0.0), "0.00000000000e0");
        assert_eq!(fmt_opt(None), "");
    }
}
