//! Bessel functions J, I, K of integer and half-integer order.
//!
//! Evaluation strategy:
//! * `J_ν`: ascending series summed in double-double below [`ASYMPTOTIC_CROSSOVER`],
//!   Hankel expansion above it. Half-integer orders use the spherical-Bessel closed
//!   forms away from the origin.
//! * `I_ν`: ascending series (positive terms), large-argument expansion for big `x`.
//! * `K_ν`: closed forms for half-integer orders; for integer orders the
//!   digamma limit series at small `x`, Steed's continued fraction in the middle
//!   range and the large-argument expansion beyond the crossover.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use super::dd::Dd;
use super::SpecfunError;

/// Above this argument the large-`x` expansions are used.
pub const ASYMPTOTIC_CROSSOVER: f64 = 25.0;

/// Largest supported order (covers dimensions up to 12, plus one for derivatives).
const MAX_TWICE_ORDER: u32 = 12;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Bessel order restricted to `k/2`, `k ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BesselOrder {
    twice: u32,
}

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self, SpecfunError> {
        let twice = 2.0 * nu;
        if !(twice >= 0.0) || (twice - twice.round()).abs() > 1e-12 || twice.round() as u32 > MAX_TWICE_ORDER {
            return Err(SpecfunError::UnsupportedOrder { nu });
        }
        Ok(BesselOrder { twice: twice.round() as u32 })
    }

    /// `ν = (N − 2)/2` for a spatial dimension `N ≥ 2`.
    pub fn from_dimension(dim: u32) -> Result<Self, SpecfunError> {
        if dim < 2 {
            return Err(SpecfunError::UnsupportedOrder { nu: (dim as f64 - 2.0) / 2.0 });
        }
        Self::new((dim as f64 - 2.0) / 2.0)
    }

    pub fn nu(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn is_half_integer(self) -> bool {
        self.twice % 2 == 1
    }

    /// `Γ(ν + 1)`, the normalization of the small-argument limit of `J_ν`.
    pub fn gamma_plus_one(self) -> f64 {
        gamma_order_plus_one(self.twice)
    }

    fn plus_one(self) -> BesselOrder {
        BesselOrder { twice: self.twice + 2 }
    }
}

fn check_arg(x: f64) -> Result<(), SpecfunError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(SpecfunError::Domain { x })
    }
}

/// `Γ(ν + 1)` for `ν = twice/2`.
fn gamma_order_plus_one(twice: u32) -> f64 {
    let mut g = if twice % 2 == 0 { 1.0 } else { 0.5 * PI.sqrt() };
    let mut z = if twice % 2 == 0 { 1.0 } else { 1.5 };
    let target = twice as f64 / 2.0 + 1.0;
    while z < target - 0.25 {
        g *= z;
        z += 1.0;
    }
    g
}

/// `(x/2)^ν / Γ(ν+1) · Σ_k (∓x²/4)^k / (k! (ν+1)_k)` with the sign chosen by `alternating`.
fn ascending_series_dd(nu: f64, x: f64, alternating: bool) -> f64 {
    let half = 0.5 * x;
    let (hi, lo) = (half * half, half.mul_add(half, -(half * half)));
    let q = if alternating { Dd { hi: -hi, lo: -lo } } else { Dd { hi, lo } };
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    for k in 1..400 {
        let kf = k as f64;
        term = (term * q).div_f64(kf * (kf + nu));
        sum = sum + term;
        if kf > half && term.abs().hi <= 1e-33 * sum.abs().hi.max(1e-300) {
            break;
        }
    }
    let prefactor = if nu == 0.0 { 1.0 } else { half.powf(nu) / gamma_order_plus_one((2.0 * nu).round() as u32) };
    sum.to_f64() * prefactor
}

/// Coefficients `a_k(ν)/x^k` of the Hankel-type expansions, truncated at the smallest term.
fn asymptotic_terms(nu: f64, x: f64) -> Vec<f64> {
    let mu = 4.0 * nu * nu;
    let mut terms = vec![1.0];
    let mut a = 1.0_f64;
    for k in 1..60 {
        let kf = k as f64;
        let next = a * (mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
        if next == 0.0 {
            break;
        }
        if next.abs() > a.abs() {
            break;
        }
        a = next;
        terms.push(a);
        if a.abs() < 1e-17 {
            break;
        }
    }
    terms
}

fn hankel_j(nu: f64, x: f64) -> f64 {
    let terms = asymptotic_terms(nu, x);
    let (mut p, mut q) = (0.0, 0.0);
    for (k, a) in terms.iter().enumerate() {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            q += sign * a;
        }
    }
    let chi_shift = (nu / 2.0) * PI + FRAC_PI_4;
    let (sx, cx) = x.sin_cos();
    let (ss, cs) = chi_shift.sin_cos();
    let cos_chi = cx * cs + sx * ss;
    let sin_chi = sx * cs - cx * ss;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Spherical-Bessel closed forms for `J_{n+1/2}`; accurate when `x` is not small.
fn j_half_closed(twice: u32, x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    let norm = (2.0 / (PI * x)).sqrt();
    let mut jm = norm * c; // J_{-1/2}
    let mut j = norm * s; // J_{1/2}
    let mut nu = 0.5;
    while ((2.0 * nu) as u32) < twice {
        let next = (2.0 * nu / x) * j - jm;
        jm = j;
        j = next;
        nu += 1.0;
    }
    j
}

fn j_unchecked(twice: u32, x: f64) -> f64 {
    let nu = twice as f64 / 2.0;
    if twice == 1 {
        return (2.0 / (PI * x)).sqrt() * x.sin();
    }
    if x >= ASYMPTOTIC_CROSSOVER.max(nu * nu) {
        return hankel_j(nu, x);
    }
    if twice % 2 == 1 && x >= 2.0 * nu {
        return j_half_closed(twice, x);
    }
    ascending_series_dd(nu, x, true)
}

/// `J_ν(x)` for `x > 0`.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64, SpecfunError> {
    check_arg(x)?;
    Ok(j_unchecked(order.twice, x))
}

/// `J'_ν(x) = (ν/x) J_ν(x) − J_{ν+1}(x)`.
pub fn bessel_j_prime(order: BesselOrder, x: f64) -> Result<f64, SpecfunError> {
    check_arg(x)?;
    if order.twice == 0 {
        return Ok(-j_unchecked(2, x));
    }
    let nu = order.nu();
    Ok(nu / x * j_unchecked(order.twice, x) - j_unchecked(order.plus_one().twice, x))
}

fn i_series(nu: f64, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..500 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    let prefactor = if nu == 0.0 { 1.0 } else { (0.5 * x).powf(nu) / gamma_order_plus_one((2.0 * nu).round() as u32) };
    sum * prefactor
}

/// `e^{-x} I_ν(x)`.
fn i_scaled_unchecked(twice: u32, x: f64) -> f64 {
    let nu = twice as f64 / 2.0;
    if x >= ASYMPTOTIC_CROSSOVER.max(nu * nu) {
        let terms = asymptotic_terms(nu, x);
        let s: f64 = terms.iter().enumerate().map(|(k, a)| if k % 2 == 0 { *a } else { -a }).sum();
        s / (2.0 * PI * x).sqrt()
    } else {
        i_series(nu, x) * (-x).exp()
    }
}

/// `I_ν(x)`; errors with [`SpecfunError::Overflow`] where the value exceeds `f64`.
pub fn bessel_i(order: BesselOrder, x: f64) -> Result<f64, SpecfunError> {
    check_arg(x)?;
    let scaled = i_scaled_unchecked(order.twice, x);
    let v = scaled * x.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(SpecfunError::Overflow { x })
    }
}

/// Exponentially scaled `I_ν(x)·e^{-x}`; never overflows.
pub fn bessel_i_scaled(order: BesselOrder, x: f64) -> Result<f64, SpecfunError> {
    check_arg(x)?;
    Ok(i_scaled_unchecked(order.twice, x))
}

/// `I'_ν(x) = I_{ν+1}(x) + (ν/x) I_ν(x)`.
pub fn bessel_i_prime(order: BesselOrder, x: f64) -> Result<f64, SpecfunError> {
    check_arg(x)?;
    let v = (i_scaled_unchecked(order.plus_one().twice, x) + order.nu() / x * i_scaled_unchecked(order.twice, x)) * x.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(SpecfunError::Overflow { x })
    }
}

/// `K_n(x)` for integer `n` and `x ≤ 2`, from the limit formula with digamma terms.
fn k_integer_small(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    let nf = n as f64;

    let mut finite = 0.0;
    if n > 0 {
        let mut fact_a = (1..n).map(|j| j as f64).product::<f64>(); // (n-1)!
        let mut fact_k = 1.0;
        let mut pow = 1.0;
        for k in 0..n {
            if k > 0 {
                fact_a /= (n - k) as f64;
                fact_k *= k as f64;
                pow *= -q;
            }
            finite += fact_a / fact_k * pow;
        }
        finite *= 0.5 * half.powi(-(n as i32));
    }

    let log_term = if n % 2 == 0 { -1.0 } else { 1.0 } * half.ln() * i_series(nf, x);

    // Σ [ψ(k+1) + ψ(n+k+1)] q^k / (k! (n+k)!)
    let mut psi_k = -EULER_GAMMA;
    let mut psi_nk = -EULER_GAMMA + (1..=n).map(|j| 1.0 / j as f64).sum::<f64>();
    let mut coeff = 1.0 / (1..=n).map(|j| j as f64).product::<f64>();
    let mut sum = (psi_k + psi_nk) * coeff;
    for k in 1..200 {
        let kf = k as f64;
        psi_k += 1.0 / kf;
        psi_nk += 1.0 / (nf + kf);
        coeff *= q / (kf * (nf + kf));
        let term = (psi_k + psi_nk) * coeff;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    let series = if n % 2 == 0 { 1.0 } else { -1.0 } * 0.5 * half.powi(n as i32) * sum;
    finite + log_term + series
}

/// `(e^x K_0(x), e^x K_1(x))` via Steed's continued fraction, valid for `x ≥ 2`.
fn k01_scaled_steed(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..10_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

/// `e^x K_ν(x)`.
fn k_scaled_unchecked(twice: u32, x: f64) -> f64 {
    let nu = twice as f64 / 2.0;
    if twice % 2 == 1 {
        let mut km = (FRAC_PI_2 / x).sqrt(); // K_{1/2}
        if twice == 1 {
            return km;
        }
        let mut k = km * (1.0 + 1.0 / x); // K_{3/2}
        let mut order = 1.5;
        while ((2.0 * order) as u32) < twice {
            let next = km + (2.0 * order / x) * k;
            km = k;
            k = next;
            order += 1.0;
        }
        return k;
    }
    if x >= ASYMPTOTIC_CROSSOVER.max(nu * nu) {
        let terms = asymptotic_terms(nu, x);
        return (FRAC_PI_2 / x).sqrt() * terms.iter().sum::<f64>();
    }
    let n = twice / 2;
    if x <= 2.0 {
        return k_integer_small(n, x) * x.exp();
    }
    let (mut km, mut k) = k01_scaled_steed(x);
    if n == 0 {
        return km;
    }
    for j in 1..n {
        let next = km + (2.0 * j as f64 / x) * k;
        km = k;
        k = next;
    }
    k
}

/// `K_ν(x)`; underflows gracefully to zero for very large `x`.
pub fn bessel_k(order: BesselOrder, x: f64) -> Result<f64, SpecfunError> {
    check_arg(x)?;
    Ok(k_scaled_unchecked(order.twice, x) * (-x).exp())
}

/// Exponentially scaled `K_ν(x)·e^{x}`.
pub fn bessel_k_scaled(order: BesselOrder, x: f64) -> Result<f64, SpecfunError> {
    check_arg(x)?;
    Ok(k_scaled_unchecked(order.twice, x))
}

/// `K'_ν(x) = (ν/x) K_ν(x) − K_{ν+1}(x)`.
pub fn bessel_k_prime(order: BesselOrder, x: f64) -> Result<f64, SpecfunError> {
    check_arg(x)?;
    let v = order.nu() / x * k_scaled_unchecked(order.twice, x) - k_scaled_unchecked(order.plus_one().twice, x);
    Ok(v * (-x).exp())
}

/// Logarithmic derivative `K'_ν(x)/K_ν(x)`, stable for large `x`.
pub fn bessel_k_log_derivative(order: BesselOrder, x: f64) -> Result<f64, SpecfunError> {
    check_arg(x)?;
    let k = k_scaled_unchecked(order.twice, x);
    let k1 = k_scaled_unchecked(order.plus_one().twice, x);
    Ok(order.nu() / x - k1 / k)
}

/// First positive zero `j_{ν,1}` of `J_ν`.
pub fn first_zero_j(order: BesselOrder) -> f64 {
    let nu = order.nu();
    if order.twice == 1 {
        return PI;
    }
    let f = |x: f64| j_unchecked(order.twice, x);
    let mut lo = nu.max(0.5);
    let step = 0.05;
    let mut f_lo = f(lo);
    loop {
        let hi = lo + step;
        let f_hi = f(hi);
        if f_lo * f_hi <= 0.0 {
            return super::root::find_root(f, lo, hi, 1e-15)
                .map(|r| r.root)
                .unwrap_or(0.5 * (lo + hi));
        }
        lo = hi;
        f_lo = f_hi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(nu: f64) -> BesselOrder {
        BesselOrder::new(nu).unwrap()
    }

    /// Plain power series in f64; only trustworthy for moderate `x`.
    fn series_oracle_j(nu: f64, x: f64) -> f64 {
        let mut term = (0.5 * x).powf(nu) / gamma_order_plus_one((2.0 * nu) as u32);
        let mut sum = term;
        for k in 1..200 {
            let kf = k as f64;
            term *= -(0.25 * x * x) / (kf * (kf + nu));
            sum += term;
        }
        sum
    }

    /// `K_ν(x) = ∫_0^∞ e^{-x cosh t} cosh(νt) dt`, trapezoid rule (exponentially convergent).
    fn integral_oracle_k(nu: f64, x: f64) -> f64 {
        let h: f64 = 1e-3;
        let mut sum = 0.5 * (-x).exp();
        let mut t = h;
        loop {
            let v = (-x * t.cosh()).exp() * (nu * t).cosh();
            sum += v;
            if v < 1e-300 || t > 50.0 {
                break;
            }
            t += h;
        }
        sum * h
    }

    #[test]
    fn rejects_bad_orders_and_arguments() {
        assert!(BesselOrder::new(0.3).is_err());
        assert!(BesselOrder::new(-0.5).is_err());
        assert!(BesselOrder::from_dimension(1).is_err());
        assert!(bessel_j(order(0.0), 0.0).is_err());
        assert!(bessel_k(order(1.0), -1.0).is_err());
        assert_eq!(BesselOrder::from_dimension(3).unwrap().nu(), 0.5);
    }

    #[test]
    fn half_order_j_vanishes_at_pi() {
        assert!(bessel_j(order(0.5), PI).unwrap().abs() < 1e-16);
    }

    #[test]
    fn j0_first_zero() {
        let j = bessel_j(order(0.0), 2.404_825_557_695_773).unwrap();
        assert!(j.abs() < 1e-10);
        // bisection on the plain series oracle
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if series_oracle_j(0.0, lo) * series_oracle_j(0.0, mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((first_zero_j(order(0.0)) - 0.5 * (lo + hi)).abs() < 1e-13);
    }

    #[test]
    fn half_order_matches_series_oracle() {
        let expected = (2.0 / PI).sqrt() * 1f64.sin();
        let got = bessel_j(order(0.5), 1.0).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!((series_oracle_j(0.5, 1.0) - expected).abs() < 1e-15);
    }

    #[test]
    fn j_matches_series_oracle_at_moderate_arguments() {
        for &nu in &[0.0, 1.0, 1.5, 2.0, 2.5, 3.0] {
            for i in 1..=40 {
                let x = 0.2 * i as f64;
                let got = bessel_j(order(nu), x).unwrap();
                let want = series_oracle_j(nu, x);
                assert!((got - want).abs() < 1e-14 * (1.0 + want.abs()), "nu={nu} x={x} {got} {want}");
            }
        }
    }

    #[test]
    fn series_and_hankel_agree_in_overlap_band() {
        for &nu in &[0.0, 1.0, 2.0, 3.0] {
            for i in 0..=20 {
                let x = ASYMPTOTIC_CROSSOVER + 0.25 * i as f64;
                let s = ascending_series_dd(nu, x, true);
                let h = hankel_j(nu, x);
                assert!((s - h).abs() < 1e-13, "nu={nu} x={x} series={s} hankel={h}");
            }
        }
    }

    #[test]
    fn half_integer_closed_forms_agree_with_series() {
        for &nu in &[1.5, 2.5] {
            for i in 0..=40 {
                let x = 2.0 * nu + 0.25 * i as f64;
                let closed = j_half_closed((2.0 * nu) as u32, x);
                let series = ascending_series_dd(nu, x, true);
                assert!((closed - series).abs() < 1e-14, "nu={nu} x={x}");
            }
        }
    }

    #[test]
    fn half_order_closed_forms_relative() {
        let mut x = 1e-3;
        while x <= 50.0 {
            let j = bessel_j(order(0.5), x).unwrap();
            let jc = (2.0 / (PI * x)).sqrt() * x.sin();
            assert!((j - jc).abs() <= 1e-12 * jc.abs());
            let k = bessel_k(order(0.5), x).unwrap();
            let kc = (PI / (2.0 * x)).sqrt() * (-x).exp();
            assert!((k - kc).abs() <= 1e-12 * kc);
            x *= 1.1;
        }
    }

    #[test]
    fn j_prime_identities() {
        assert!(bessel_j_prime(order(0.0), 1e-12).unwrap().abs() < 1e-11);
        let d = bessel_j_prime(order(0.0), 1.0).unwrap();
        assert!((d + bessel_j(order(1.0), 1.0).unwrap()).abs() < 1e-16);
        let x = FRAC_PI_2;
        let h = 1e-6;
        let fd = (bessel_j(order(0.5), x + h).unwrap() - bessel_j(order(0.5), x - h).unwrap()) / (2.0 * h);
        assert!((bessel_j_prime(order(0.5), x).unwrap() - fd).abs() < 1e-8);
    }

    #[test]
    fn k_half_against_integral_oracle() {
        let want = (FRAC_PI_2).sqrt() * (-1f64).exp();
        assert!((bessel_k(order(0.5), 1.0).unwrap() - want).abs() < 1e-15);
        assert!((integral_oracle_k(0.5, 1.0) - want).abs() < 1e-12);
    }

    #[test]
    fn integer_k_against_integral_oracle() {
        for &nu in &[0.0, 1.0, 2.0, 3.0] {
            for &x in &[0.01, 0.3, 1.0, 1.99, 2.01, 3.5, 7.0, 12.0, 20.0, 24.9, 25.1, 40.0] {
                let got = bessel_k(order(nu), x).unwrap();
                let want = integral_oracle_k(nu, x);
                assert!((got - want).abs() <= 1e-12 * want, "nu={nu} x={x} got={got} want={want}");
            }
        }
    }

    #[test]
    fn i_at_origin_and_positivity() {
        assert!((bessel_i(order(0.0), 1e-12).unwrap() - 1.0).abs() < 1e-15);
        for &x in &[0.1, 1.0, 10.0, 30.0] {
            assert!(bessel_k(order(1.0), x).unwrap() > 0.0);
            assert!(bessel_k_prime(order(1.0), x).unwrap() < 0.0);
        }
        assert!(matches!(bessel_i(order(0.0), 800.0), Err(SpecfunError::Overflow { .. })));
        let scaled = bessel_i_scaled(order(0.0), 800.0).unwrap();
        assert!((scaled * (2.0 * PI * 800.0).sqrt() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn wronskian() {
        for &nu in &[0.0, 0.5, 1.0, 1.5, 2.0] {
            for &x in &[0.5, 1.0, 5.0] {
                let o = order(nu);
                let w = bessel_i(o, x).unwrap() * bessel_k_prime(o, x).unwrap()
                    - bessel_i_prime(o, x).unwrap() * bessel_k(o, x).unwrap();
                assert!((w + 1.0 / x).abs() < 1e-10, "nu={nu} x={x} w={w}");
            }
        }
    }

    #[test]
    fn k_large_argument_asymptote() {
        let x = 60.0;
        let k = bessel_k(order(0.0), x).unwrap();
        let leading = (PI / (2.0 * x)).sqrt() * (-x).exp();
        assert!((k / leading - 1.0).abs() < 1.0 / (8.0 * x) * 1.01);
    }
}
