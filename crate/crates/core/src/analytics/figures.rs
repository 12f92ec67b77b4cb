//! Tabulated curves over `v` for plotting.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::closed_form::{report, AnalyticsReport};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FigureId {
    AndWins,
    RevenueOr,
    RevenueTotal,
    Poa,
    WelfareLoss,
}

impl FigureId {
    pub const ALL: [FigureId; 5] = [
        FigureId::AndWins,
        FigureId::RevenueOr,
        FigureId::RevenueTotal,
        FigureId::Poa,
        FigureId::WelfareLoss,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::AndWins => "and-wins",
            FigureId::RevenueOr => "revenue-or",
            FigureId::RevenueTotal => "revenue-total",
            FigureId::Poa => "poa",
            FigureId::WelfareLoss => "welfare-loss",
        }
    }

    /// Column name of the tabulated quantity.
    pub fn quantity(self) -> &'static str {
        match self {
            FigureId::AndWins => "p_and_wins",
            FigureId::RevenueOr => "revenue_or",
            FigureId::RevenueTotal => "revenue_total",
            FigureId::Poa => "poa",
            FigureId::WelfareLoss => "welfare_loss",
        }
    }

    pub fn value(self, r: &AnalyticsReport) -> f64 {
        match self {
            FigureId::AndWins => r.p_and_wins,
            FigureId::RevenueOr => r.revenue_or,
            FigureId::RevenueTotal => r.revenue_total,
            FigureId::Poa => r.poa,
            FigureId::WelfareLoss => r.welfare_loss,
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownFigure {
                id: s.to_string(),
                valid: FigureId::ALL.map(FigureId::as_str).join(", "),
            })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FigureSeries {
    pub figure: FigureId,
    pub quantity: &'static str,
    pub v_min: f64,
    pub v_max: f64,
    pub step: f64,
    pub rows: Vec<(f64, f64)>,
}

/// `v_min, v_min + step, ...` up to `v_max`, with `v = 1` always present
/// when it lies in the range.
pub fn v_grid(v_min: f64, v_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(v_min > 0.5 && v_max > v_min && step > 0.0 && v_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "figure range needs 1/2 < v_min < v_max and step > 0, got [{v_min}, {v_max}] step {step}"
        )));
    }
    let n = ((v_max - v_min) / step + 1e-9).floor() as usize;
    let mut vs: Vec<f64> = (0..=n).map(|k| v_min + k as f64 * step).collect();
    // Snap accumulated rounding onto the crossover point.
    let snap = 1e-9 * step.max(1.0);
    for v in vs.iter_mut() {
        if (*v - 1.0).abs() < snap {
            *v = 1.0;
        }
    }
    if (v_min..=v_max).contains(&1.0) && !vs.contains(&1.0) {
        let at = vs.partition_point(|&v| v < 1.0);
        vs.insert(at, 1.0);
    }
    Ok(vs)
}

pub fn figure_series(figure: FigureId, v_min: f64, v_max: f64, step: f64) -> Result<FigureSeries> {
    let vs = v_grid(v_min, v_max, step)?;
    let rows = vs
        .par_iter()
        .map(|&v| Ok((v, figure.value(&report(v)?))))
        .collect::<Result<Vec<_>>>()?;
    Ok(FigureSeries {
        figure,
        quantity: figure.quantity(),
        v_min,
        v_max,
        step,
        rows,
    })
}

/// Formats `x` with 12 significant digits, like C's `%.12g`.
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS).contains(&exp) {
        let s = format!("{:.*}", (DIGITS - 1 - exp).max(0) as usize, x);
        trim_zeros(&s).to_string()
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

impl FigureSeries {
    /// CSV with header `v,<quantity>` and LF line endings.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(["v", self.quantity])?;
        for &(v, y) in &self.rows {
            w.write_record([format_sig(v), format_sig(y)])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is ASCII"))
    }

    /// Row with the smallest value.
    pub fn min_row(&self) -> Option<(f64, f64)> {
        self.rows.iter().copied().min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ids() {
        assert_eq!("poa".parse::<FigureId>().unwrap(), FigureId::Poa);
        let e = "price".parse::<FigureId>().unwrap_err().to_string();
        assert!(e.contains("and-wins") && e.contains("welfare-loss"), "{e}");
    }

    #[test]
    fn grid_contains_one_exactly() {
        let g = v_grid(0.51, 10.0, 0.01).unwrap();
        assert!(g.contains(&1.0));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!((g.last().unwrap() - 10.0).abs() < 1e-9);
        let g = v_grid(0.55, 2.0, 0.3).unwrap();
        assert!(g.contains(&1.0) && g.windows(2).all(|w| w[0] < w[1]));
        assert!(v_grid(0.5, 2.0, 0.1).is_err());
    }

    #[test]
    fn crossover_rows() {
        let s = figure_series(FigureId::AndWins, 0.51, 3.0, 0.01).unwrap();
        let row = s.rows.iter().find(|r| r.0 == 1.0).unwrap();
        assert!((row.1 - 0.25).abs() < 1e-12);
        let s = figure_series(FigureId::RevenueOr, 0.51, 3.0, 0.01).unwrap();
        let row = s.rows.iter().find(|r| r.0 == 1.0).unwrap();
        assert!((row.1 - 0.25).abs() < 1e-12);
        let s = figure_series(FigureId::Poa, 0.51, 0.99, 0.01).unwrap();
        assert!((s.min_row().unwrap().0 - 0.643).abs() <= 0.01);
    }

    #[test]
    fn formatting() {
        assert_eq!(format_sig(0.25), "0.25");
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(0.1081976621622466), "0.108197662162");
        assert_eq!(format_sig(1.0 / 3.0 * 1e-7), "3.33333333333e-8");
        assert_eq!(format_sig(9.9999999999999), "10");
        let s = figure_series(FigureId::RevenueTotal, 0.9, 1.1, 0.1).unwrap();
        let csv = s.to_csv_string().unwrap();
        assert!(csv.starts_with("v,revenue_total\n0.9,"), "{csv}");
        assert!(csv.contains("\n1,0.5\n"), "{csv}");
    }
}
