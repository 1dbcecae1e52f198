//! Number formatting shared by every CSV writer.

/// Scientific notation with 12 significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.11e}")
}

/// Like [`sci`], but `None` becomes an empty cell.
pub fn sci_opt(x: Option<f64>) -> String {
    x.map(sci).unwrap_or_default()
}
