//! Fixed-step classical Runge-Kutta integration.

use crate::error::{Error, Result};
use crate::linalg::{RMatrix, RVector};

/// Integrates y' = f(y) with the classical 4th-order scheme, sampling at `times`.
///
/// Each sampling interval is split into ceil(Δt / step) equal substeps, so the
/// effective step never exceeds `step` and the samples land exactly on `times`.
pub fn rk4<F>(f: F, y0: &RVector, times: &[f64], step: f64) -> Result<Vec<RVector>>
where
    F: Fn(&RVector) -> RVector,
{
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "integration step must be positive, got {step}"
        )));
    }
    check_times(times)?;
    let mut out = Vec::with_capacity(times.len());
    if times.is_empty() {
        return Ok(out);
    }
    let mut y = y0.clone();
    out.push(y.clone());
    for w in times.windows(2) {
        let dt = w[1] - w[0];
        let substeps = (dt / step).ceil().max(1.0) as usize;
        let h = dt / substeps as f64;
        for _ in 0..substeps {
            let k1 = f(&y);
            let k2 = f(&(&y + &k1 * (0.5 * h)));
            let k3 = f(&(&y + &k2 * (0.5 * h)));
            let k4 = f(&(&y + &k3 * h));
            y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        out.push(y.clone());
    }
    Ok(out)
}

pub fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("sample times must be finite".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "sample times must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// ẍ = K x + D ẋ + d, integrated as the first-order system on (x, ẋ).
///
/// Returns (positions, velocities) at each sample time.
pub fn second_order(
    stiffness: &RMatrix,
    friction: Option<&RMatrix>,
    drive: Option<&RVector>,
    x0: &RVector,
    v0: &RVector,
    times: &[f64],
    step: f64,
) -> Result<(Vec<RVector>, Vec<RVector>)> {
    let n = x0.len();
    if stiffness.nrows() != n || stiffness.ncols() != n || v0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: stiffness.nrows().max(v0.len()),
        });
    }
    if let Some(d) = friction {
        if d.nrows() != n || d.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: d.nrows(),
            });
        }
    }
    if let Some(b) = drive {
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
    }
    let mut y0 = RVector::zeros(2 * n);
    y0.rows_mut(0, n).copy_from(x0);
    y0.rows_mut(n, n).copy_from(v0);
    let rhs = |y: &RVector| {
        let x = y.rows(0, n);
        let v = y.rows(n, n);
        let mut acc = stiffness * x;
        if let Some(d) = friction {
            acc += d * v;
        }
        if let Some(b) = drive {
            acc += b;
        }
        let mut dy = RVector::zeros(2 * n);
        dy.rows_mut(0, n).copy_from(&v);
        dy.rows_mut(n, n).copy_from(&acc);
        dy
    };
    let states = rk4(rhs, &y0, times, step)?;
    let positions = states.iter().map(|y| y.rows(0, n).into_owned()).collect();
    let velocities = states.iter().map(|y| y.rows(n, n).into_owned()).collect();
    Ok((positions, velocities))
}
