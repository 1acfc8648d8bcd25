//! Adaptive Dormand–Prince 5(4) integrator with dense output and event location.
//!
//! Small fixed-size systems only (`[f64; D]`); every shooting problem in the
//! crate is two- or three-dimensional.

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OdeError {
    #[error("step size collapsed to {h:e} at t = {t}")]
    StepSizeCollapse { t: f64, h: f64 },
    #[error("exceeded {max_steps} steps at t = {t}")]
    TooManySteps { t: f64, max_steps: usize },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("event location failed near t = {t}")]
    EventLocation { t: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rtol: 1e-11, atol: 1e-13, h_init: 1e-4, h_max: f64::INFINITY, max_steps: 2_000_000 }
    }
}

impl Tolerances {
    pub fn with_rtol(mut self, rtol: f64) -> Self {
        self.rtol = rtol;
        self
    }

    pub fn with_atol(mut self, atol: f64) -> Self {
        self.atol = atol;
        self
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }
}

/// Why an integration ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    ReachedEnd,
    /// The event function changed sign; `t`/`y` are refined to the crossing.
    Event,
    /// The stop predicate fired after an accepted step.
    Stopped,
}

/// One accepted step with the data needed for dense output.
#[derive(Debug, Clone)]
struct Segment<const D: usize> {
    t0: f64,
    h: f64,
    coeffs: [[f64; D]; 5],
}

impl<const D: usize> Segment<D> {
    fn eval(&self, t: f64) -> [f64; D] {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let c = &self.coeffs;
        let mut out = [0.0; D];
        for i in 0..D {
            out[i] = c[0][i] + s * (c[1][i] + s1 * (c[2][i] + s * (c[3][i] + s1 * c[4][i])));
        }
        out
    }
}

/// Result of an integration: accepted step points plus a dense interpolant.
#[derive(Debug, Clone)]
pub struct Trajectory<const D: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; D]>,
    pub termination: Termination,
    segments: Vec<Segment<D>>,
}

impl<const D: usize> Trajectory<D> {
    pub fn last(&self) -> (f64, [f64; D]) {
        (*self.t.last().unwrap(), *self.y.last().unwrap())
    }

    pub fn t_start(&self) -> f64 {
        self.t[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.t.last().unwrap()
    }

    /// Dense-output evaluation; `t` is clamped to the integrated range.
    pub fn eval(&self, t: f64) -> [f64; D] {
        if self.segments.is_empty() {
            return self.y[0];
        }
        let forward = self.t_end() >= self.t_start();
        let idx = if forward {
            self.segments.partition_point(|s| s.t0 + s.h < t)
        } else {
            self.segments.partition_point(|s| s.t0 + s.h > t)
        };
        let idx = idx.min(self.segments.len() - 1);
        let seg = &self.segments[idx];
        let (a, b) = if seg.h > 0.0 { (seg.t0, seg.t0 + seg.h) } else { (seg.t0 + seg.h, seg.t0) };
        seg.eval(t.clamp(a, b))
    }
}

// Dormand–Prince coefficients.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn axpy<const D: usize>(y: &[f64; D], h: f64, terms: &[(f64, &[f64; D])]) -> [f64; D] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..D {
            out[i] += h * c * k[i];
        }
    }
    out
}

struct StepResult<const D: usize> {
    y_new: [f64; D],
    k_new: [f64; D],
    err: f64,
    segment: Segment<D>,
}

fn dopri_step<const D: usize, F>(f: &mut F, t: f64, y: &[f64; D], k1: &[f64; D], h: f64, tol: &Tolerances) -> StepResult<D>
where
    F: FnMut(f64, &[f64; D]) -> [f64; D],
{
    let k2 = f(t + C2 * h, &axpy(y, h, &[(A21, k1)]));
    let k3 = f(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = f(t + C4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = f(t + C5 * h, &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
    let k6 = f(t + h, &axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
    let y_new = axpy(y, h, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
    let k7 = f(t + h, &y_new);

    let mut err = 0.0_f64;
    for i in 0..D {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
        err = err.max((e / sc).abs());
    }
    if !y_new.iter().all(|v| v.is_finite()) {
        err = f64::INFINITY;
    }

    let mut coeffs = [[0.0; D]; 5];
    for i in 0..D {
        let ydiff = y_new[i] - y[i];
        let bspl = h * k1[i] - ydiff;
        coeffs[0][i] = y[i];
        coeffs[1][i] = ydiff;
        coeffs[2][i] = bspl;
        coeffs[3][i] = ydiff - h * k7[i] - bspl;
        coeffs[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
    StepResult { y_new, k_new: k7, err, segment: Segment { t0: t, h, coeffs } }
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end` (either direction).
///
/// `event`, when given, terminates the run at its first sign change, located
/// by secant iteration on the dense interpolant to `|Δt| ≤ 1e-12·max(1,|t|)`.
/// `stop` is checked after every accepted step.
pub fn integrate<const D: usize, F>(
    mut f: F,
    t0: f64,
    y0: [f64; D],
    t_end: f64,
    tol: &Tolerances,
    event: Option<&dyn Fn(f64, &[f64; D]) -> f64>,
    stop: Option<&dyn Fn(f64, &[f64; D]) -> bool>,
) -> Result<Trajectory<D>, OdeError>
where
    F: FnMut(f64, &[f64; D]) -> [f64; D],
{
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let span = (t_end - t0).abs();
    let mut traj = Trajectory { t: vec![t0], y: vec![y0], termination: Termination::ReachedEnd, segments: Vec::new() };
    if span == 0.0 {
        return Ok(traj);
    }
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = tol.h_init.min(span).min(tol.h_max);
    let mut g_prev = event.map(|g| g(t, &y));
    let mut steps = 0usize;

    loop {
        steps += 1;
        if steps > tol.max_steps {
            return Err(OdeError::TooManySteps { t, max_steps: tol.max_steps });
        }
        let remaining = (t_end - t) * dir;
        let last = h >= remaining;
        let h_try = if last { remaining } else { h };
        let step = dopri_step(&mut f, t, &y, &k1, dir * h_try, tol);
        if step.err > 1.0 || !step.err.is_finite() {
            let factor = if step.err.is_finite() { (0.9 * step.err.powf(-0.2)).max(0.1) } else { 0.1 };
            h = h_try * factor;
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(OdeError::StepSizeCollapse { t, h });
            }
            continue;
        }
        let t_new = if last { t_end } else { t + dir * h_try };

        if let (Some(g), Some(gp)) = (event, g_prev) {
            let g_new = g(t_new, &step.y_new);
            if gp != 0.0 && gp * g_new <= 0.0 {
                let (te, ye) = locate_event(&step.segment, t, gp, t_new, g_new, g)?;
                let mut seg = step.segment.clone();
                // the interpolant stays valid on the truncated interval
                seg.h = step.segment.h;
                traj.segments.push(seg);
                traj.t.push(te);
                traj.y.push(ye);
                traj.termination = Termination::Event;
                return Ok(traj);
            }
            g_prev = Some(g_new);
        }

        traj.segments.push(step.segment);
        traj.t.push(t_new);
        traj.y.push(step.y_new);
        t = t_new;
        y = step.y_new;
        k1 = step.k_new;

        if let Some(s) = stop {
            if s(t, &y) {
                traj.termination = Termination::Stopped;
                return Ok(traj);
            }
        }
        if last {
            return Ok(traj);
        }
        let factor = if step.err == 0.0 { 5.0 } else { (0.9 * step.err.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h_try * factor).min(tol.h_max);
    }
}

fn locate_event<const D: usize>(
    seg: &Segment<D>,
    t_a: f64,
    g_a: f64,
    t_b: f64,
    g_b: f64,
    g: &dyn Fn(f64, &[f64; D]) -> f64,
) -> Result<(f64, [f64; D]), OdeError> {
    let (mut a, mut ga, mut b, mut gb) = (t_a, g_a, t_b, g_b);
    if gb == 0.0 {
        return Ok((b, seg.eval(b)));
    }
    for _ in 0..200 {
        let mut tm = b - gb * (b - a) / (gb - ga);
        let w = b - a;
        if !tm.is_finite() || ((tm - a) / w) < 0.01 || ((b - tm) / w) < 0.01 {
            tm = 0.5 * (a + b);
        }
        let ym = seg.eval(tm);
        let gm = g(tm, &ym);
        if gm == 0.0 || (b - a).abs() <= 1e-12 * tm.abs().max(1.0) {
            return Ok((tm, ym));
        }
        if ga * gm < 0.0 {
            b = tm;
            gb = gm;
        } else {
            a = tm;
            ga = gm;
        }
    }
    Err(OdeError::EventLocation { t: 0.5 * (a + b) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth_and_dense_output() {
        let tol = Tolerances::default();
        let traj = integrate(|_t, y: &[f64; 1]| [y[0]], 0.0, [1.0], 3.0, &tol, None, None).unwrap();
        assert!((traj.last().1[0] - 3f64.exp()).abs() < 1e-9 * 3f64.exp());
        for i in 0..=30 {
            let t = 0.1 * i as f64;
            let v = traj.eval(t)[0];
            assert!((v - t.exp()).abs() < 1e-9 * t.exp(), "t={t}");
        }
    }

    #[test]
    fn harmonic_oscillator_event_at_half_pi() {
        let tol = Tolerances::default();
        let g = |_t: f64, y: &[f64; 2]| y[0];
        let traj = integrate(|_t, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], 10.0, &tol, Some(&g), None).unwrap();
        assert_eq!(traj.termination, Termination::Event);
        assert!((traj.t_end() - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    }

    #[test]
    fn backward_integration() {
        let tol = Tolerances::default();
        let traj = integrate(|_t, y: &[f64; 1]| [-y[0]], 2.0, [1.0], 0.0, &tol, None, None).unwrap();
        assert!((traj.last().1[0] - 2f64.exp()).abs() < 1e-9 * 2f64.exp());
        assert!((traj.eval(1.0)[0] - 1f64.exp()).abs() < 1e-9 * 1f64.exp());
    }

    #[test]
    fn stop_predicate() {
        let tol = Tolerances::default();
        let stop = |_t: f64, y: &[f64; 1]| y[0] > 10.0;
        let traj = integrate(|_t, y: &[f64; 1]| [y[0]], 0.0, [1.0], 100.0, &tol, None, Some(&stop)).unwrap();
        assert_eq!(traj.termination, Termination::Stopped);
        assert!(traj.last().1[0] > 10.0 && traj.t_end() < 5.0);
    }
}
