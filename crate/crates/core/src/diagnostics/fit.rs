use crate::error::{LandauError, Result};

/// Least-squares line `ln e = slope · ln p + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square deviation of the points from the line in log space.
    pub residual: f64,
}

pub fn convergence_fit(points: &[(f64, f64)]) -> Result<Fit> {
    if points.len() < 3 {
        return Err(LandauError::InvalidInput(format!("a rate fit needs at least 3 points, got {}", points.len())));
    }
    if let Some(&(p, e)) = points.iter().find(|&&(p, e)| !(p > 0.0 && e > 0.0 && p.is_finite() && e.is_finite())) {
        return Err(LandauError::InvalidInput(format!("rate fit needs positive entries, got ({p}, {e})")));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(LandauError::InvalidInput("rate fit needs distinct parameters".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    Ok(Fit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let f = convergence_fit(&[(1.0, 1.0), (2.0, 2.0), (4.0, 4.0)]).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-14 && f.intercept.abs() < 1e-14 && f.residual < 1e-14);
        let f = convergence_fit(&[(1.0, 1.0), (2.0, 4.0), (4.0, 16.0)]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(convergence_fit(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(convergence_fit(&[(1.0, 1.0), (2.0, 0.0), (4.0, 4.0)]).is_err());
        assert!(convergence_fit(&[(1.0, 1.0), (-2.0, 1.0), (4.0, 4.0)]).is_err());
    }
}
