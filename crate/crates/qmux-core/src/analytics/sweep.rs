use crate::error::{Error, Result};
use crate::format::fmt_sig;

/// Column-labeled numeric table, the unit every sweep experiment produces.
/// Serializes to CSV with a header row, one row per grid point, 12
/// significant digits, `.` decimals, LF newlines.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::InvalidParameter(format!(
                "row has {} values for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|x| fmt_sig(*x, 12)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_shape() {
        let mut t = SweepTable::new(vec!["L_km".into(), "value".into()]);
        t.push_row(vec![0.0, 1.0]).unwrap();
        t.push_row(vec![1.0, 0.794028968501]).unwrap();
        assert!(t.push_row(vec![1.0]).is_err());
        let csv = t.to_csv();
        assert_eq!(csv, "L_km,value\n0,1.00000000000\n1.00000000000,0.794028968501\n");
        assert!(csv.ends_with('\n'));
        assert!(!csv.contains('\r'));
    }
}
