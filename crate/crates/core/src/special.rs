//! Log-space binomial/Poisson masses and regularized incomplete beta/gamma.
//!
//! Masses follow Loader's saddle-point form so that both `p` and `q = 1 - p`
//! enter separately; callers near `u = 1` pass the complement they hold.

use std::f64::consts::PI;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_2PI: f64 = 1.837_877_066_409_345_5;
const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAX_ITER: usize = 100_000;

const SFERR_HALVES: [f64; 31] = [
    0.0,
    0.1534264097200273452914,
    0.08106146679532725821967,
    0.05481412105191765389614,
    0.04134069595540929409382,
    0.03316287351993628748511,
    0.02767792568499833914879,
    0.02374616365629749597133,
    0.02079067210376509311152,
    0.01848845053267318523078,
    0.01664469118982119216319,
    0.01513497322191737887351,
    0.01387612882307074799875,
    0.01281046524292022692425,
    0.01189670994589177009506,
    0.01110455975820691732663,
    0.01041126526197209649748,
    0.00979941612615880329839,
    0.009255462182712732917729,
    0.008768700134139385462955,
    0.008330563433362871256469,
    0.00793411456431402054725,
    0.007573675487951840794972,
    0.007244554301320383179546,
    0.006942840107209529865664,
    0.006665247032707682442356,
    0.00640899418800420706844,
    0.006171712263039457647535,
    0.005951370112758847735624,
    0.005746216513010115682026,
    0.005554733551962801371039,
];

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Stirling remainder: ln Γ(n+1) - (n+1/2) ln n + n - ln √(2π).
pub fn stirlerr(n: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n <= 15.0 {
        let nn = n + n;
        if nn == nn.trunc() {
            return SFERR_HALVES[nn as usize];
        }
        return ln_gamma(n + 1.0) - (n + 0.5) * n.ln() + n - LN_SQRT_2PI;
    }
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance term x ln(x/np) + np - x, stable when x ≈ np.
pub fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        if s.abs() < f64::MIN_POSITIVE {
            return s;
        }
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
    }
    x * (x / np).ln() + np - x
}

/// ln P(Bin(n, p) = x) with q = 1 - p given separately.
pub fn ln_dbinom(x: f64, n: f64, p: f64, q: f64) -> f64 {
    if x < 0.0 || x > n {
        return f64::NEG_INFINITY;
    }
    if p == 0.0 {
        return if x == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if q == 0.0 {
        return if x == n { 0.0 } else { f64::NEG_INFINITY };
    }
    if x == 0.0 {
        if n == 0.0 {
            return 0.0;
        }
        return if p < 0.1 { -bd0(n, n * q) - n * p } else { n * q.ln() };
    }
    if x == n {
        return if q < 0.1 { -bd0(n, n * p) - n * q } else { n * p.ln() };
    }
    let lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(x, n * p) - bd0(n - x, n * q);
    let lf = LN_2PI + x.ln() + (-x / n).ln_1p();
    lc - 0.5 * lf
}

pub fn dbinom(x: f64, n: f64, p: f64, q: f64) -> f64 {
    ln_dbinom(x, n, p, q).exp()
}

/// ln of the Poisson mass λ^x e^{-λ} / Γ(x+1), real x ≥ 0.
pub fn ln_dpois(x: f64, lambda: f64) -> f64 {
    if x < 0.0 {
        return f64::NEG_INFINITY;
    }
    if lambda == 0.0 {
        return if x == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if x == 0.0 {
        return -lambda;
    }
    if lambda.is_infinite() {
        return f64::NEG_INFINITY;
    }
    if lambda < x * f64::MIN_POSITIVE {
        return -lambda + x * lambda.ln() - ln_gamma(x + 1.0);
    }
    -stirlerr(x) - bd0(x, lambda) - 0.5 * (2.0 * PI * x).ln()
}

pub fn dpois(x: f64, lambda: f64) -> f64 {
    ln_dpois(x, lambda).exp()
}

fn is_int(v: f64) -> bool {
    v == v.trunc() && v.abs() < 9.0e15
}

/// ln of x^a (1-x)^b / (a B(a,b)).
fn ln_beta_front(a: f64, b: f64, x: f64, xc: f64) -> f64 {
    if is_int(a) && is_int(b) {
        ln_dbinom(a, a + b - 1.0, x, xc) + xc.ln()
    } else {
        a * x.ln() + b * xc.ln() - ln_beta(a, b) - a.ln()
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `(I_x(a,b), 1 - I_x(a,b))`; `xc` must equal `1 - x`.
///
/// The smaller of the pair is always computed directly, so both carry
/// relative accuracy in their own tail.
pub fn beta_reg(a: f64, b: f64, x: f64, xc: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    if xc <= 0.0 {
        return (1.0, 0.0);
    }
    if a == b && x == 0.5 {
        return (0.5, 0.5);
    }
    if x < (a + 1.0) / (a + b + 2.0) {
        let v = (ln_beta_front(a, b, x, xc)).exp() * beta_cf(a, b, x);
        (v, 1.0 - v)
    } else {
        let v = (ln_beta_front(b, a, xc, x)).exp() * beta_cf(b, a, xc);
        (1.0 - v, v)
    }
}

/// `(P(Bin(n,p) ≥ r), P(Bin(n,p) < r))` for integer `0 ≤ r`.
pub fn binom_sf(r: u64, n: u64, p: f64, q: f64) -> (f64, f64) {
    if r == 0 {
        return (1.0, 0.0);
    }
    if r > n {
        return (0.0, 1.0);
    }
    beta_reg(r as f64, (n - r + 1) as f64, p, q)
}

/// Regularized incomplete gamma `(P(a,x), Q(a,x))`.
pub fn gamma_reg(a: f64, x: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    if x.is_infinite() {
        return (1.0, 0.0);
    }
    let front = a.ln() + ln_dpois(a, x);
    if x < a + 1.0 {
        let mut ap = a;
        let mut del = 1.0 / a;
        let mut sum = del;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if del.abs() < sum.abs() * EPS {
                break;
            }
        }
        let p = sum * front.exp();
        (p, 1.0 - p)
    } else {
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / FPMIN;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < FPMIN {
                d = FPMIN;
            }
            c = b + an / c;
            if c.abs() < FPMIN {
                c = FPMIN;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < EPS {
                break;
            }
        }
        let q = front.exp() * h;
        (1.0 - q, q)
    }
}

pub fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}
