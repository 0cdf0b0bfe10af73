use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::linalg::{cdot, cnorm};
use crate::model::IsingHamiltonian;
use crate::statics::ScanAxis;
use crate::{Error, Result, C64};

/// A Hamiltonian family `H(c) = H_0 + c V` that is affine in one real control.
pub trait ControlledOperator: Sync {
    fn dim(&self) -> usize;
    /// `y = H(control) x`.
    fn apply_at(&self, control: f64, x: &[C64], y: &mut [C64]);
}

/// The Ising Hamiltonian with `h` or `g` promoted to the control.
#[derive(Clone, Copy, Debug)]
pub struct Ramped<'a> {
    pub op: &'a IsingHamiltonian,
    pub axis: ScanAxis,
}

impl ControlledOperator for Ramped<'_> {
    fn dim(&self) -> usize {
        self.op.dim()
    }

    fn apply_at(&self, control: f64, x: &[C64], y: &mut [C64]) {
        match self.axis {
            ScanAxis::H => self.op.apply_with(control, self.op.g(), x, y),
            ScanAxis::G => self.op.apply_with(self.op.h(), control, x, y),
        }
    }
}

/// Time-stepping scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// Exponential midpoint rule, second order.
    Midpoint,
    /// Fourth-order commutator-free Magnus scheme with two exponentials per step.
    Magnus4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagatorConfig {
    pub step_dt: f64,
    pub krylov_dim: usize,
    /// Allowed `| ‖Ψ‖ - 1 |` after any step.
    pub norm_tol: f64,
    /// Target for the change of sampled observables under step halving.
    pub convergence_tol: f64,
    /// Per-exponential Krylov error target; steps are split until it is met.
    pub krylov_tol: f64,
    pub integrator: Integrator,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            step_dt: 0.01,
            krylov_dim: 20,
            norm_tol: 1e-10,
            convergence_tol: 1e-6,
            krylov_tol: 1e-12,
            integrator: Integrator::Magnus4,
        }
    }
}

impl PropagatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_dt > 0.0 && self.step_dt.is_finite()) {
            return Err(Error::Domain(format!("step_dt = {} must be positive", self.step_dt)));
        }
        if self.krylov_dim < 2 {
            return Err(Error::Domain("krylov_dim must be at least 2".into()));
        }
        if !(self.norm_tol > 0.0 && self.krylov_tol > 0.0) {
            return Err(Error::Domain("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Scratch space for repeated Krylov exponentials of one dimension.
pub struct KrylovWorkspace {
    basis: Vec<Vec<C64>>,
    w: Vec<C64>,
}

impl KrylovWorkspace {
    pub fn new(dim: usize, krylov_dim: usize) -> Self {
        Self {
            basis: (0..=krylov_dim).map(|_| vec![C64::default(); dim]).collect(),
            w: vec![C64::default(); dim],
        }
    }
}

const MAX_SPLITS: usize = 40;

/// Eigendecomposition of a small symmetric tridiagonal Lanczos matrix.
struct Tridiagonal {
    eig: SymmetricEigen<f64, nalgebra::Dyn>,
}

impl Tridiagonal {
    fn new(alpha: &[f64], beta: &[f64]) -> Self {
        let size = alpha.len();
        let mut t = DMatrix::<f64>::zeros(size, size);
        for i in 0..size {
            t[(i, i)] = alpha[i];
            if i + 1 < size {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        Tridiagonal {
            eig: SymmetricEigen::new(t),
        }
    }

    /// `exp(-i s T) e_1`.
    fn exp_first_column(&self, s: f64) -> Vec<C64> {
        let e = &self.eig;
        let size = e.eigenvalues.len();
        (0..size)
            .map(|r| {
                (0..size)
                    .map(|k| {
                        let q = e.eigenvectors[(r, k)] * e.eigenvectors[(0, k)];
                        C64::from_polar(q, -s * e.eigenvalues[k])
                    })
                    .sum()
            })
            .collect()
    }
}

/// `v ← exp(-i dt H) v` for a Hermitian `apply`, with Lanczos subspaces of
/// dimension at most `m` and sub-stepping until the a posteriori error
/// estimate `β_m |[exp(-i s T_m) e_1]_m| ‖v‖` is below `tol` for each piece.
pub fn expmv<F>(apply: F, v: &mut [C64], dt: f64, m: usize, tol: f64, ws: &mut KrylovWorkspace) -> Result<()>
where
    F: Fn(&[C64], &mut [C64]),
{
    let n = v.len();
    let m = m.min(n).min(ws.basis.len() - 1).max(1);
    let mut remaining = dt;
    let mut splits = 0usize;
    while remaining > 0.0 {
        let beta0 = cnorm(v);
        if beta0 == 0.0 {
            return Ok(());
        }
        for (b, x) in ws.basis[0].iter_mut().zip(v.iter()) {
            *b = x / beta0;
        }
        let mut alpha = Vec::with_capacity(m);
        let mut beta = Vec::with_capacity(m);
        let mut size = m;
        let mut beta_last = 0.0;
        for j in 0..m {
            let (head, tail) = ws.basis.split_at_mut(j + 1);
            let vj = &head[j];
            apply(vj, &mut ws.w);
            let a = cdot(vj, &ws.w).re;
            alpha.push(a);
            // Full reorthogonalization against the whole basis.
            for vi in head.iter() {
                let c = cdot(vi, &ws.w);
                for (x, y) in ws.w.iter_mut().zip(vi) {
                    *x -= c * y;
                }
            }
            let b = cnorm(&ws.w);
            if b <= 1e-14 * (a.abs() + beta.last().copied().unwrap_or(0.0)).max(1e-300) {
                size = j + 1;
                beta_last = 0.0;
                break;
            }
            if j + 1 == m {
                beta_last = b;
                break;
            }
            // Stop early once the whole remaining interval is already accurate.
            if j >= 2 {
                let y = Tridiagonal::new(&alpha, &beta).exp_first_column(remaining);
                if b * y[j].norm() * beta0 <= tol {
                    size = j + 1;
                    beta_last = b;
                    break;
                }
            }
            beta.push(b);
            for (x, y) in tail[0].iter_mut().zip(&ws.w) {
                *x = y / b;
            }
        }
        let tri = Tridiagonal::new(&alpha[..size], &beta[..size - 1]);
        let mut s = remaining;
        let mut y = tri.exp_first_column(s);
        while beta_last * y[size - 1].norm() * beta0 > tol {
            s *= 0.5;
            splits += 1;
            if splits > MAX_SPLITS {
                return Err(Error::Propagation(format!(
                    "Krylov exponential did not reach tolerance {tol:.1e} with dimension {m}"
                )));
            }
            y = tri.exp_first_column(s);
        }
        v.iter_mut().for_each(|x| *x = C64::default());
        for (k, c) in y.iter().enumerate() {
            let c = c * beta0;
            for (x, b) in v.iter_mut().zip(&ws.basis[k]) {
                *x += c * b;
            }
        }
        remaining = if s == remaining { 0.0 } else { remaining - s };
    }
    Ok(())
}

const MAGNUS_A1: f64 = (3.0 - 2.0 * 1.732_050_807_568_877_2) / 12.0;
const MAGNUS_A2: f64 = (3.0 + 2.0 * 1.732_050_807_568_877_2) / 12.0;
const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // sqrt(3) / 6

/// One step of length `dt` from time `t`.
///
/// Because `H` is affine in the control, `a H(c_1) + b H(c_2)` with
/// `a + b = 1/2` equals `H(2(a c_1 + b c_2)) / 2`, so each Magnus
/// exponential is a single Krylov exponential of `H` at an effective control.
pub fn step<A, C>(
    op: &A,
    control: &C,
    v: &mut [C64],
    t: f64,
    dt: f64,
    config: &PropagatorConfig,
    ws: &mut KrylovWorkspace,
) -> Result<()>
where
    A: ControlledOperator + ?Sized,
    C: Fn(f64) -> f64,
{
    let m = config.krylov_dim;
    let tol = config.krylov_tol;
    match config.integrator {
        Integrator::Midpoint => {
            let c = control(t + 0.5 * dt);
            expmv(|x, y| op.apply_at(c, x, y), v, dt, m, tol, ws)
        }
        Integrator::Magnus4 => {
            let c1 = control(t + (0.5 - GAUSS_OFFSET) * dt);
            let c2 = control(t + (0.5 + GAUSS_OFFSET) * dt);
            let first = 2.0 * (MAGNUS_A2 * c1 + MAGNUS_A1 * c2);
            let second = 2.0 * (MAGNUS_A1 * c1 + MAGNUS_A2 * c2);
            expmv(|x, y| op.apply_at(first, x, y), v, 0.5 * dt, m, tol, ws)?;
            expmv(|x, y| op.apply_at(second, x, y), v, 0.5 * dt, m, tol, ws)
        }
    }
}

/// Integrates from `t0` to `t1` in equal steps no longer than `config.step_dt`,
/// checking the norm after every step. Returns the number of steps taken.
pub fn evolve<A, C>(
    op: &A,
    control: &C,
    v: &mut [C64],
    t0: f64,
    t1: f64,
    config: &PropagatorConfig,
    ws: &mut KrylovWorkspace,
) -> Result<usize>
where
    A: ControlledOperator + ?Sized,
    C: Fn(f64) -> f64,
{
    if v.len() != op.dim() {
        return Err(Error::LengthMismatch {
            expected: op.dim(),
            got: v.len(),
        });
    }
    let span = t1 - t0;
    if span <= 0.0 {
        return Ok(0);
    }
    let steps = (span / config.step_dt - 1e-9).ceil().max(1.0) as usize;
    let dt = span / steps as f64;
    for i in 0..steps {
        let t = t0 + i as f64 * dt;
        step(op, control, v, t, dt, config, ws)?;
        let drift = (cnorm(v) - 1.0).abs();
        if drift > config.norm_tol {
            return Err(Error::NormDrift {
                drift,
                tol: config.norm_tol,
                t: t + dt,
            });
        }
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `H(c) = [[s c, Δ/2], [Δ/2, -s c]]`.
    struct TwoLevel {
        slope: f64,
        gap: f64,
    }

    impl ControlledOperator for TwoLevel {
        fn dim(&self) -> usize {
            2
        }
        fn apply_at(&self, c: f64, x: &[C64], y: &mut [C64]) {
            let d = self.slope * c;
            y[0] = x[0] * d + x[1] * (0.5 * self.gap);
            y[1] = x[0] * (0.5 * self.gap) - x[1] * d;
        }
    }

    #[test]
    fn expmv_matches_closed_form_rotation() {
        // H = σ^x: exp(-i t σ^x)|0> = cos t |0> - i sin t |1>
        let apply = |x: &[C64], y: &mut [C64]| {
            y[0] = x[1];
            y[1] = x[0];
        };
        let mut ws = KrylovWorkspace::new(2, 4);
        let mut v = vec![C64::new(1.0, 0.0), C64::default()];
        let t = 0.7;
        expmv(apply, &mut v, t, 4, 1e-14, &mut ws).unwrap();
        assert!((v[0] - C64::new(t.cos(), 0.0)).norm() < 1e-14);
        assert!((v[1] - C64::new(0.0, -t.sin())).norm() < 1e-14);
    }

    #[test]
    fn landau_zener_two_level() {
        let sys = TwoLevel { slope: 2.0, gap: 0.5 };
        let tau = 4.0;
        let p_lz = (-std::f64::consts::PI * sys.gap * sys.gap * tau / (4.0 * sys.slope)).exp();
        // symmetric window of 40 gap widths Δ/s on each side
        let w = 40.0 * sys.gap / sys.slope;
        let control = |t: f64| t / tau;
        let ground = |c: f64| {
            let d = sys.slope * c;
            let e = (d * d + 0.25 * sys.gap * sys.gap).sqrt();
            let norm = (0.25 * sys.gap * sys.gap + (d + e).powi(2)).sqrt();
            [(-0.5 * sys.gap) / norm, (d + e) / norm]
        };
        let g0 = ground(-w);
        let v = vec![C64::new(g0[0], 0.0), C64::new(g0[1], 0.0)];
        let mut ws = KrylovWorkspace::new(2, 2);
        for integrator in [Integrator::Midpoint, Integrator::Magnus4] {
            let cfg = PropagatorConfig {
                step_dt: 1e-3,
                integrator,
                ..Default::default()
            };
            let mut psi = v.clone();
            evolve(&sys, &control, &mut psi, -w * tau, w * tau, &cfg, &mut ws).unwrap();
            let gf = ground(w);
            let stay = (psi[0] * gf[0] + psi[1] * gf[1]).norm_sqr();
            let p_excited = 1.0 - stay;
            assert!((p_excited - p_lz).abs() <= 0.02 * p_lz, "{p_excited} vs {p_lz}");
        }
    }

    #[test]
    fn magnus_converges_at_fourth_order() {
        let sys = TwoLevel { slope: 3.0, gap: 1.0 };
        let control = |t: f64| t / 2.0 - 1.0;
        let run = |dt: f64| {
            let cfg = PropagatorConfig {
                step_dt: dt,
                ..Default::default()
            };
            let mut ws = KrylovWorkspace::new(2, 2);
            let mut v = vec![C64::new(1.0, 0.0), C64::default()];
            evolve(&sys, &control, &mut v, 0.0, 4.0, &cfg, &mut ws).unwrap();
            v
        };
        let reference = run(1e-3);
        let err = |dt: f64| {
            let v = run(dt);
            ((v[0] - reference[0]).norm_sqr() + (v[1] - reference[1]).norm_sqr()).sqrt()
        };
        let ratio = err(0.1) / err(0.05);
        assert!(ratio > 12.0, "ratio {ratio}");
    }
}
