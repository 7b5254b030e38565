//! Rows of the shared CSV schema `map,r,psi,w,path,value,est_error,flag`.
//!
//! Floats are written with `{:.16e}` (17 significant digits), complex `w` as
//! `re+imi`, absent fields as empty strings.

use std::io::Write;

use crate::error::{QdError, Result};
use crate::inequalities::InequalityReport;
use crate::invariant::ModuleResult;
use crate::maps::MapDescriptor;
use crate::ComplexValue;

pub const CSV_HEADER: [&str; 8] = ["map", "r", "psi", "w", "path", "value", "est_error", "flag"];

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub map: String,
    pub r: Option<f64>,
    pub psi: Option<f64>,
    pub w: Option<ComplexValue>,
    pub path: String,
    pub value: f64,
    pub est_error: f64,
    pub flag: String,
}

impl CsvRow {
    pub fn from_module(f: &MapDescriptor, r: Option<f64>, psi: Option<f64>, res: &ModuleResult) -> Self {
        let flag = if res.warnings.is_empty() { "ok".to_string() } else { res.warnings.join("; ") };
        CsvRow {
            map: f.to_string(),
            r,
            psi,
            w: None,
            path: res.path.to_string(),
            value: res.value,
            est_error: res.est_error,
            flag,
        }
    }

    pub fn from_inequality(rep: &InequalityReport) -> Self {
        CsvRow {
            map: rep.map.clone(),
            r: None,
            psi: rep.psi,
            w: Some(rep.w),
            path: rep.functional_name.clone(),
            value: rep.value,
            est_error: 0.0,
            flag: if rep.satisfied { "ok" } else { "violated" }.to_string(),
        }
    }

    fn fields(&self) -> [String; 8] {
        let real = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
        [
            self.map.clone(),
            real(self.r),
            real(self.psi),
            self.w.map(|w| format!("{}{:+.16e}i", fmt_f64(w.re), w.im)).unwrap_or_default(),
            self.path.clone(),
            fmt_f64(self.value),
            fmt_f64(self.est_error),
            self.flag.clone(),
        ]
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a header row followed by `rows`.
pub fn write_csv<W: Write>(out: W, rows: &[CsvRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let io = |e: csv::Error| QdError::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        w.write_record(row.fields()).map_err(io)?;
    }
    w.flush().map_err(|e| QdError::Io(e.to_string()))
}

pub fn csv_string(rows: &[CsvRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    String::from_utf8(buf).map_err(|e| QdError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequalities::pick_lower;
    use crate::invariant::module_residue;

    #[test]
    fn header_and_layout() {
        let f = MapDescriptor::pick_slit(0.5).unwrap();
        let res = module_residue(&f, 0.25, 0.0).unwrap();
        let ineq = pick_lower(&f, ComplexValue::new(0.0, 0.3)).unwrap();
        let rows = [CsvRow::from_module(&f, Some(0.25), Some(0.0), &res), CsvRow::from_inequality(&ineq)];
        let text = csv_string(&rows).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "map,r,psi,w,path,value,est_error,flag");
        assert!(lines[1].starts_with("pick m=0.5,2.5000000000000000e-1,0.0000000000000000e0,,B-residue,"));
        assert!(lines[2].contains(",0.0000000000000000e0+2.9999999999999999e-1i,pick_lower,"), "{}", lines[2]);
        assert!(!text.contains('\r'));
        assert_eq!(text, csv_string(&rows).unwrap());
    }

    #[test]
    fn floats_round_trip() {
        for x in [std::f64::consts::PI, -1e-300, 0.1 + 0.2, 12345.678901234567] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }
}
