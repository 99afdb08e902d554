use crate::error::CliResult;
use std::fs::File;
use std::path::{Path, PathBuf};

pub type Writer = csv::Writer<File>;

/// Scientific notation with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn writer(path: &Path, header: &[String]) -> CliResult<Writer> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_path(path)?;
    w.write_record(header)?;
    Ok(w)
}

pub fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}

/// `<dir>/<stem>.smatrix.csv` next to `out`.
pub fn smatrix_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    out.with_file_name(format!("{stem}.smatrix.csv"))
}

pub fn write_smatrix(path: &Path, s: &gaia_core::SMatrix) -> CliResult<()> {
    let mut w = writer(path, &header(&["row", "col", "re", "im", "probability"]))?;
    for r in 0..s.dim() {
        for c in 0..s.dim() {
            let z = s.entry(r, c);
            w.write_record([(r + 1).to_string(), (c + 1).to_string(), num(z.re), num(z.im), num(z.norm_sqr())])?;
        }
    }
    w.flush()?;
    Ok(())
}
