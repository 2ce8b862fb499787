use std::fs::File;
use std::io::Write;
use std::path::Path;

use super::SweepRow;
use crate::domain::format_general;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 17] = [
    "n",
    "r_low",
    "r_up",
    "dist",
    "trials",
    "seed",
    "mean_ratio",
    "se_mean",
    "var_ratio",
    "se_var",
    "p_dev",
    "epsilon",
    "a_n",
    "c_n",
    "exact_ratio",
    "bound_low",
    "bound_up",
];

fn num(x: f64) -> String {
    format_general(x, 17)
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> Error {
    Error::File(e.to_string())
}

/// Writes the header and one record per row. Absent values are empty fields.
pub fn write_csv_to<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for row in rows {
        let s = &row.summary;
        w.write_record([
            row.n.to_string(),
            row.r_low.to_string(),
            row.r_up.to_string(),
            row.dist.to_string(),
            row.trials.to_string(),
            row.seed.to_string(),
            num(s.mean),
            num(s.se_mean),
            num(s.variance),
            opt(s.se_variance),
            num(row.p_dev),
            num(row.epsilon),
            num(row.a_n),
            num(row.c_n),
            opt(row.exact_ratio),
            opt(row.bounds.map(|b| b.0)),
            opt(row.bounds.map(|b| b.1)),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::File(format!("{}: {e}", path.display())))?;
    write_csv_to(rows, file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::ModelSpec;
    use crate::experiments::{estimate_moments, SweepRow};

    #[test]
    fn empty_sweep_is_header_only() {
        let mut buf = Vec::new();
        write_csv_to(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "n,r_low,r_up,dist,trials,seed,mean_ratio,se_mean,var_ratio,se_var,p_dev,epsilon,a_n,c_n,exact_ratio,bound_low,bound_up\n"
        );
    }

    #[test]
    fn deterministic_row_has_zero_variance_and_blank_bounds() {
        let spec = ModelSpec::homogeneous(4, 4, "const:1".parse().unwrap()).unwrap();
        let row = SweepRow::from_batch(&estimate_moments(&spec, 10, 5).unwrap(), 0.1);
        let mut buf = Vec::new();
        write_csv_to(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let line = text.lines().nth(1).unwrap();
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 17);
        assert_eq!(fields[8], "0");
        assert_eq!(fields[14], "1");
        assert_eq!(fields[15], "");
        assert_eq!(fields[16], "");
    }

    #[test]
    fn uniform_dist_field_is_quoted() {
        let spec = ModelSpec::homogeneous(3, 2, "uniform:1,3".parse().unwrap()).unwrap();
        let row = SweepRow::from_batch(&estimate_moments(&spec, 10, 5).unwrap(), 0.1);
        let mut buf = Vec::new();
        write_csv_to(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("\"uniform:1,3\""));
    }
}
