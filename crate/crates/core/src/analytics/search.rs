//! Golden-section minimization and the price-of-anarchy minima.

use serde::Serialize;

use super::closed_form::poa;
use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Minimizes a unimodal `f` on `[a, b]` until the bracket is narrower than `tol`.
pub fn golden_section<F>(f: F, a: f64, b: f64, tol: f64) -> Result<Minimum>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(a < b && tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "golden-section search needs a < b and tol > 0, got [{a}, {b}], tol {tol}"
        )));
    }
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    let mut iterations = 0;
    while hi - lo > tol {
        iterations += 1;
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let (x, value) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    Ok(Minimum {
        x,
        value,
        iterations,
    })
}

/// Search brackets for the two local minima of the price of anarchy, one on
/// each side of `v = 1` where it equals 1.
pub const POA_BRACKETS: [(f64, f64); 2] = [(0.5, 1.0), (1.0, 20.0)];
pub const POA_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoaMinimum {
    pub bracket: (f64, f64),
    pub v: f64,
    pub poa: f64,
}

pub fn find_poa_minima() -> Result<[PoaMinimum; 2]> {
    let find = |(a, b): (f64, f64)| -> Result<PoaMinimum> {
        let m = golden_section(poa, a, b, POA_TOL)?;
        Ok(PoaMinimum {
            bracket: (a, b),
            v: m.x,
            poa: m.value,
        })
    };
    Ok([find(POA_BRACKETS[0])?, find(POA_BRACKETS[1])?])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let m = golden_section(|x| Ok((x - 0.3) * (x - 0.3) + 2.0), -1.0, 4.0, 1e-9).unwrap();
        // Flat minimum: x is resolvable only to about sqrt(machine epsilon).
        assert!((m.x - 0.3).abs() < 1e-6);
        assert!((m.value - 2.0).abs() < 1e-15);
        assert!(golden_section(Ok, 1.0, 1.0, 1e-9).is_err());
    }

    #[test]
    fn poa_minima() {
        let [low, high] = find_poa_minima().unwrap();
        assert!((low.v - 0.643_028_265_664_765).abs() < 1e-5, "{low:?}");
        assert!((low.poa - 0.818_484_964_961_820_9).abs() < 1e-10, "{low:?}");
        assert!((high.v - 1.879_988_829_497_779).abs() < 1e-5, "{high:?}");
        assert!(
            (high.poa - 0.945_682_249_765_524_1).abs() < 1e-10,
            "{high:?}"
        );
        for m in [low, high] {
            // The brackets' lower ends are outside the domain or at the v = 1 peak.
            let ends = [m.bracket.0 + 1e-6, m.bracket.1];
            for e in ends {
                assert!(poa(e).unwrap() > m.poa);
            }
        }
    }
}
