//! Dormand-Prince 5(4) with PI step control and 4th-order dense output.
//!
//! Follows the step-size controller of Hairer's `DOPRI5`. The right-hand side
//! may fail (e.g. near a wave-function node); a failed evaluation halves the
//! step and retries, up to a fixed number of consecutive attempts.

use thiserror::Error;

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

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    pub max_retries: usize,
    pub h_max: f64,
    pub safety: f64,
    pub fac_min: f64,
    pub fac_max: f64,
    pub beta: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_steps: 200_000,
            max_retries: 40,
            h_max: f64::INFINITY,
            safety: 0.9,
            fac_min: 0.2,
            fac_max: 10.0,
            beta: 0.04,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError<E> {
    #[error("step budget of {0} steps exhausted")]
    Budget(usize),
    #[error("right-hand side failed {retries} consecutive times: {source}")]
    Retries { retries: usize, source: E },
    #[error("step size underflow at t = {0}")]
    Underflow(f64),
}

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    rcont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn start(&self) -> [f64; N] {
        self.rcont[0]
    }

    pub fn end(&self) -> [f64; N] {
        let mut y = self.rcont[0];
        for (yi, di) in y.iter_mut().zip(self.rcont[1]) {
            *yi += di;
        }
        y
    }

    /// Component `i` at fraction `theta` of the step.
    pub fn component_at(&self, i: usize, theta: f64) -> f64 {
        let t1 = 1.0 - theta;
        let r = &self.rcont;
        r[0][i] + theta * (r[1][i] + t1 * (r[2][i] + theta * (r[3][i] + t1 * r[4][i])))
    }

    pub fn at_fraction(&self, theta: f64) -> [f64; N] {
        std::array::from_fn(|i| self.component_at(i, theta))
    }

    pub fn at(&self, t: f64) -> [f64; N] {
        self.at_fraction((t - self.t0) / self.h)
    }
}

#[inline]
fn combine<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        y[i] + h * acc
    })
}

pub struct Dopri5<F, const N: usize> {
    rhs: F,
    ctl: StepControl,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    fac_old: f64,
    steps: usize,
    evals: usize,
}

impl<F, E, const N: usize> Dopri5<F, N>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
{
    /// Sets up at `(t0, y0)`; the first evaluation of the right-hand side
    /// must succeed.
    pub fn new(mut rhs: F, t0: f64, y0: [f64; N], ctl: StepControl) -> Result<Self, E> {
        let k1 = rhs(t0, &y0)?;
        let mut s = Dopri5 {
            rhs,
            ctl,
            t: t0,
            y: y0,
            k1,
            h: 0.0,
            fac_old: 1e-4,
            steps: 0,
            evals: 1,
        };
        s.h = s.initial_step();
        Ok(s)
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> [f64; N] {
        self.y
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn evaluations(&self) -> usize {
        self.evals
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.ctl.abs_tol + self.ctl.rel_tol * a.abs().max(b.abs())
    }

    fn initial_step(&mut self) -> f64 {
        let n = N as f64;
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for i in 0..N {
            let sk = self.scale(self.y[i], self.y[i]);
            d0 += (self.y[i] / sk).powi(2);
            d1 += (self.k1[i] / sk).powi(2);
        }
        let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
        let mut h = if d0 <= 1e-10 || d1 <= 1e-10 { 1e-6 } else { 0.01 * d0 / d1 };
        h = h.min(self.ctl.h_max);
        let y1 = combine(&self.y, h, &[(1.0, &self.k1)]);
        let Ok(f1) = (self.rhs)(self.t + h, &y1) else {
            return h * 1e-3;
        };
        self.evals += 1;
        let mut d2 = 0.0;
        for ((&y, &f), &k) in self.y.iter().zip(&f1).zip(&self.k1) {
            d2 += ((f - k) / self.scale(y, y)).powi(2);
        }
        let d2 = (d2 / n).sqrt() / h;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h).min(h1).min(self.ctl.h_max)
    }

    /// Advances by one accepted step without passing `t_end`.
    pub fn advance(&mut self, t_end: f64) -> Result<DenseStep<N>, StepError<E>> {
        let ctl = self.ctl;
        let expo1 = 0.2 - ctl.beta * 0.75;
        let mut rejected = false;
        let mut retries = 0usize;
        loop {
            if self.steps >= ctl.max_steps {
                return Err(StepError::Budget(ctl.max_steps));
            }
            let mut h = self.h.min(ctl.h_max);
            if self.t + h > t_end {
                h = t_end - self.t;
            }
            if h <= f64::EPSILON * self.t.abs().max(1e-300) * 4.0 {
                return Err(StepError::Underflow(self.t));
            }
            let stages = match self.stages(h) {
                Ok(s) => s,
                Err(source) => {
                    retries += 1;
                    if retries > ctl.max_retries {
                        return Err(StepError::Retries { retries: ctl.max_retries, source });
                    }
                    self.h = 0.5 * h;
                    rejected = true;
                    continue;
                }
            };
            self.steps += 1;
            let (y1, k3, k4, k5, k6, k7) = stages;
            let k1 = self.k1;
            let mut err = 0.0;
            for i in 0..N {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sk = self.scale(self.y[i], y1[i]);
                err += (e / sk).powi(2);
            }
            let err = (err / N as f64).sqrt();
            let fac11 = err.powf(expo1);
            let fac = (fac11 / self.fac_old.powf(ctl.beta) / ctl.safety)
                .clamp(1.0 / ctl.fac_max, 1.0 / ctl.fac_min);
            if err <= 1.0 {
                self.fac_old = err.max(1e-4);
                let mut rcont = [[0.0; N]; 5];
                for i in 0..N {
                    let ydiff = y1[i] - self.y[i];
                    let bspl = h * k1[i] - ydiff;
                    rcont[0][i] = self.y[i];
                    rcont[1][i] = ydiff;
                    rcont[2][i] = bspl;
                    rcont[3][i] = ydiff - h * k7[i] - bspl;
                    rcont[4][i] = h
                        * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                            + D7 * k7[i]);
                }
                let dense = DenseStep { t0: self.t, h, rcont };
                let mut h_new = h / fac;
                if rejected {
                    h_new = h_new.min(h);
                }
                self.t += h;
                self.y = y1;
                self.k1 = k7;
                self.h = h_new.min(ctl.h_max);
                return Ok(dense);
            }
            self.h = h / (1.0 / ctl.fac_min).min(fac11 / ctl.safety);
            rejected = true;
        }
    }

    #[allow(clippy::type_complexity)]
    fn stages(
        &mut self,
        h: f64,
    ) -> Result<([f64; N], [f64; N], [f64; N], [f64; N], [f64; N], [f64; N]), E> {
        let t = self.t;
        let y = &self.y;
        let k1 = &self.k1;
        let rhs = &mut self.rhs;
        self.evals += 6;
        let k2 = rhs(t + C2 * h, &combine(y, h, &[(A21, k1)]))?;
        let k3 = rhs(t + C3 * h, &combine(y, h, &[(A31, k1), (A32, &k2)]))?;
        let k4 = rhs(t + C4 * h, &combine(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = rhs(
            t + C5 * h,
            &combine(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )?;
        let k6 = rhs(
            t + h,
            &combine(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        )?;
        let y1 = combine(y, h, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = rhs(t + h, &y1)?;
        Ok((y1, k3, k4, k5, k6, k7))
    }
}
