use crate::error::{Error, Result};

/// State derivative `(x, state) ↦ state'`.
pub type Rhs<'a> = dyn FnMut(f64, &[f64]) -> Result<Vec<f64>> + 'a;

fn axpy(y: &[f64], a: f64, k: &[f64]) -> Vec<f64> {
    y.iter().zip(k).map(|(u, v)| u + a * v).collect()
}

/// One classical fourth-order Runge–Kutta step.
pub fn rk4_step(f: &mut Rhs<'_>, x: f64, state: &[f64], h: f64) -> Result<Vec<f64>> {
    let k1 = f(x, state)?;
    let k2 = f(x + h / 2.0, &axpy(state, h / 2.0, &k1))?;
    let k3 = f(x + h / 2.0, &axpy(state, h / 2.0, &k2))?;
    let k4 = f(x + h, &axpy(state, h, &k3))?;
    Ok(state.iter().enumerate().map(|(i, s)| s + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect())
}

/// Integrates from `x0` to `x1` with a uniform step no larger than `step`,
/// returning every node including both endpoints.
pub fn rk4_integrate(f: &mut Rhs<'_>, x0: f64, x1: f64, step: f64, state: &[f64]) -> Result<Vec<(f64, Vec<f64>)>> {
    if !step.is_finite() || step <= 0.0 || !x0.is_finite() || !x1.is_finite() || x1 <= x0 {
        return Err(Error::Invalid(format!("invalid span [{x0}, {x1}] or step {step}")));
    }
    let steps = ((x1 - x0) / step - 1e-9).ceil().max(1.0) as usize;
    let h = (x1 - x0) / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    let mut cur = state.to_vec();
    out.push((x0, cur.clone()));
    for k in 0..steps {
        let x = x0 + k as f64 * h;
        cur = rk4_step(f, x, &cur, h)?;
        if cur.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("trajectory left the finite range near x = {x}")));
        }
        let xn = if k + 1 == steps { x1 } else { x0 + (k + 1) as f64 * h };
        out.push((xn, cur.clone()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let traj = rk4_integrate(&mut |_, y| Ok(vec![y[0]]), 0.0, 1.0, 1e-3, &[1.0]).unwrap();
        let (x, y) = traj.last().unwrap();
        assert_eq!(*x, 1.0);
        assert!((y[0] - std::f64::consts::E).abs() < 1e-10);
    }

    #[test]
    fn constant_field() {
        let s = rk4_step(&mut |_, _| Ok(vec![0.0, 0.0]), 0.0, &[1.5, -2.0], 0.1).unwrap();
        assert_eq!(s, vec![1.5, -2.0]);
    }

    #[test]
    fn harmonic_energy_drift() {
        let tau = 2.0 * std::f64::consts::PI;
        let traj = rk4_integrate(&mut |_, s| Ok(vec![s[1], -s[0]]), 0.0, tau, 1e-3, &[0.0, 1.0]).unwrap();
        let drift = traj.iter().map(|(_, s)| (0.5 * (s[0] * s[0] + s[1] * s[1]) - 0.5).abs()).fold(0.0, f64::max);
        assert!(drift <= 1e-9, "drift {drift}");
    }

    #[test]
    fn bad_span() {
        assert!(rk4_integrate(&mut |_, s| Ok(s.to_vec()), 1.0, 0.0, 0.1, &[1.0]).is_err());
        assert!(rk4_integrate(&mut |_, s| Ok(s.to_vec()), 0.0, 1.0, 0.0, &[1.0]).is_err());
    }
}
