//! Scalar special functions and guarded divided differences shared by the
//! closed-form expressions.

use crate::error::{Error, Result};

/// Relative node separation below which divided differences switch to their
/// analytic confluent limits.
const CONFLUENT_REL_TOL: f64 = 1e-9;

/// `omega(theta) = (1/2) * int_0^inf erfc(sqrt(x)) e^(-theta x) dx`
/// `            = (1 - (1 + theta)^(-1/2)) / (2 theta)`,
/// continued to `omega(0) = 1/4`.
///
/// The generic branch uses `expm1`/`ln_1p` so the numerator never cancels;
/// below `1e-6` a three-term series makes the `theta -> 0` limit explicit.
pub fn omega(theta: f64) -> Result<f64> {
    if !theta.is_finite() || theta < 0.0 {
        return Err(Error::invalid(
            "theta",
            format!("{theta} is not in [0, inf)"),
        ));
    }
    if theta < 1e-6 {
        return Ok(0.25 - 3.0 * theta / 16.0 + 5.0 * theta * theta / 32.0);
    }
    Ok(-f64::exp_m1(-0.5 * f64::ln_1p(theta)) / (2.0 * theta))
}

/// First derivative of [`omega`].
pub(crate) fn omega_deriv(theta: f64) -> f64 {
    if theta < 1e-4 {
        return -3.0 / 16.0 + 5.0 * theta / 16.0 - 105.0 * theta * theta / 256.0;
    }
    let u1 = (1.0 + theta).powf(-1.5);
    let one_minus_u = -f64::exp_m1(-0.5 * f64::ln_1p(theta));
    (0.5 * theta * u1 - one_minus_u) / (2.0 * theta * theta)
}

/// Second derivative of [`omega`].
pub(crate) fn omega_deriv2(theta: f64) -> f64 {
    if theta < 3e-4 {
        return 5.0 / 16.0 - 105.0 * theta / 128.0 + 189.0 * theta * theta / 128.0;
    }
    let u1 = -0.5 * (1.0 + theta).powf(-1.5);
    let u2 = 0.75 * (1.0 + theta).powf(-2.5);
    let one_minus_u = -f64::exp_m1(-0.5 * f64::ln_1p(theta));
    (-u2 * theta * theta + 2.0 * u1 * theta + 2.0 * one_minus_u) / (2.0 * theta.powi(3))
}

/// `chi_a(x) = a (1 - e^(-x/a)) = int_0^x e^(-t/a) dt` for `a > 0`, `x >= 0`.
pub fn chi(a: f64, x: f64) -> Result<f64> {
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::invalid("a", format!("{a} is not positive")));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::invalid("x", format!("{x} is not in [0, inf)")));
    }
    Ok(-a * f64::exp_m1(-x / a))
}

/// Gamma function at `half/2` for positive integer or half-integer
/// arguments, evaluated exactly by the recurrence from Γ(1/2) or Γ(1).
pub(crate) fn gamma_of_half(half: u32) -> f64 {
    assert!(half > 0, "argument must be positive");
    let (mut g, mut x) = if half % 2 == 1 {
        (std::f64::consts::PI.sqrt(), 0.5)
    } else {
        (1.0, 1.0)
    };
    let target = half as f64 / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// Exact binomial coefficient as `f64` (exact for the small orders used
/// here; `n` up to 60 stays within integer-exact range).
pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k as u128 {
        num *= n as u128 - i;
        den *= i + 1;
    }
    (num / den) as f64
}

/// Neumaier-compensated accumulator; the alternating binomial sums are
/// evaluated through this so cancellation never compounds. Also tracks the
/// magnitude of what was cancelled, so callers can tell roundoff-scale
/// negatives from genuine sign violations.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Accumulator {
    sum: f64,
    comp: f64,
    abs: f64,
}

impl Accumulator {
    pub fn add(&mut self, v: f64) {
        self.abs += v.abs();
        let t = self.sum + v;
        self.comp += if self.sum.abs() >= v.abs() {
            (self.sum - t) + v
        } else {
            (v - t) + self.sum
        };
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }

    /// Sum of absolute values of everything added.
    pub fn magnitude(&self) -> f64 {
        self.abs
    }
}

/// A scalar function of a rate parameter together with its first two
/// derivatives. The closed forms below are linear combinations of such
/// kernels evaluated at mixture rates, plus first and second divided
/// differences across pairs/triples of rates; the divided differences take
/// analytic confluent limits when nodes coincide.
pub(crate) trait RateKernel {
    fn eval(&self, r: f64) -> f64;
    fn deriv(&self, r: f64) -> f64;
    fn deriv2(&self, r: f64) -> f64;

    /// `(eval(a) - eval(b)) / (b - a)`, continued across `a ~ b`.
    fn dd1(&self, a: f64, b: f64) -> f64 {
        let d = b - a;
        if d.abs() <= CONFLUENT_REL_TOL * a.abs().max(b.abs()) {
            -self.deriv(0.5 * (a + b))
        } else {
            (self.eval(a) - self.eval(b)) / d
        }
    }

    /// Second divided difference over `{r0, r1, r2}` (symmetric in its
    /// arguments). Pivots on the middle node so the outer denominator is
    /// the full spread.
    fn dd2(&self, r0: f64, r1: f64, r2: f64) -> f64 {
        let mut v = [r0, r1, r2];
        v.sort_by(f64::total_cmp);
        let [lo, mid, hi] = v;
        let tol = CONFLUENT_REL_TOL * lo.abs().max(hi.abs());
        let lo_mid = (mid - lo).abs() <= tol;
        let mid_hi = (hi - mid).abs() <= tol;
        if lo_mid && mid_hi {
            return self.deriv2((lo + mid + hi) / 3.0) / 2.0;
        }
        if lo_mid {
            // f[m, m, hi] with m = (lo + mid) / 2
            let m = 0.5 * (lo + mid);
            return (self.deriv(m) + self.dd1(m, hi)) / (m - hi);
        }
        if mid_hi {
            let m = 0.5 * (mid + hi);
            return (self.deriv(m) + self.dd1(lo, m)) / (m - lo);
        }
        (self.dd1(mid, lo) - self.dd1(mid, hi)) / (hi - lo)
    }
}

/// `r -> e^(-r x)` for fixed `x >= 0`.
pub(crate) struct ExpKernel {
    pub x: f64,
}

impl RateKernel for ExpKernel {
    fn eval(&self, r: f64) -> f64 {
        (-r * self.x).exp()
    }

    fn deriv(&self, r: f64) -> f64 {
        -self.x * (-r * self.x).exp()
    }

    fn deriv2(&self, r: f64) -> f64 {
        self.x * self.x * (-r * self.x).exp()
    }

    fn dd1(&self, a: f64, b: f64) -> f64 {
        // e^(-ax) - e^(-bx) = e^(-(a+b)x/2) * 2 sinh((b-a)x/2): uniformly
        // stable for small separations without a branch cut.
        let d = b - a;
        let t = 0.5 * d * self.x;
        if t.abs() <= 1.0 {
            let mean = 0.5 * (a + b);
            let sinhc = if t.abs() < 1e-8 {
                1.0 + t * t / 6.0
            } else {
                t.sinh() / t
            };
            self.x * (-mean * self.x).exp() * sinhc
        } else {
            (self.eval(a) - self.eval(b)) / d
        }
    }
}

/// `r -> omega(r)`: the half Laplace transform of `erfc(sqrt(x))`.
pub(crate) struct OmegaKernel;

impl RateKernel for OmegaKernel {
    fn eval(&self, r: f64) -> f64 {
        omega(r).expect("rates are positive")
    }

    fn deriv(&self, r: f64) -> f64 {
        omega_deriv(r)
    }

    fn deriv2(&self, r: f64) -> f64 {
        omega_deriv2(r)
    }
}

/// `r -> int_0^phi e^(-rt) dt = (1 - e^(-r phi)) / r`.
pub(crate) struct ChiKernel {
    pub phi: f64,
}

/// int_0^1 u^k e^(-x u) du as a truncated power series; accurate to full
/// precision for x <= 0.5, where the closed forms cancel catastrophically.
fn moment_series(k: u32, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for j in 0..=13u32 {
        if j > 0 {
            term *= -x / j as f64;
        }
        sum += term / (j + k + 1) as f64;
    }
    sum
}

impl RateKernel for ChiKernel {
    fn eval(&self, r: f64) -> f64 {
        -f64::exp_m1(-r * self.phi) / r
    }

    fn deriv(&self, r: f64) -> f64 {
        // -int_0^phi t e^(-rt) dt
        let x = r * self.phi;
        if x < 0.5 {
            -self.phi * self.phi * moment_series(1, x)
        } else {
            -(1.0 - (1.0 + x) * (-x).exp()) / (r * r)
        }
    }

    fn deriv2(&self, r: f64) -> f64 {
        // int_0^phi t^2 e^(-rt) dt
        let x = r * self.phi;
        if x < 0.5 {
            self.phi * self.phi * self.phi * moment_series(2, x)
        } else {
            (2.0 - (2.0 + 2.0 * x + x * x) * (-x).exp()) / (r * r * r)
        }
    }
}

/// `r -> r^(-2) = int_0^inf z e^(-rz) dz`: yields first moments.
pub(crate) struct InverseSquareKernel;

impl RateKernel for InverseSquareKernel {
    fn eval(&self, r: f64) -> f64 {
        1.0 / (r * r)
    }

    fn deriv(&self, r: f64) -> f64 {
        -2.0 / (r * r * r)
    }

    fn deriv2(&self, r: f64) -> f64 {
        6.0 / (r * r * r * r)
    }

    fn dd1(&self, a: f64, b: f64) -> f64 {
        // (1/a^2 - 1/b^2) / (b - a) = (a + b) / (a^2 b^2), exactly.
        (a + b) / (a * a * b * b)
    }
}
