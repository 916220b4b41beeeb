//! Monte Carlo helpers: order statistics by inverse transform and the
//! upper k-record process.

use crate::dist::Distribution;
use crate::distortion::order_index;
use crate::exec::Exec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Samples per independent RNG stream.
pub const CHUNK: usize = 1 << 14;

/// A ChaCha stream keyed by (seed, chunk) so results do not depend on
/// how chunks are scheduled.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u;
        }
    }
}

/// The (m+1)-th smallest of n iid U(0,1), returned as (u, 1 − u).
fn uniform_order_stat<R: Rng>(rng: &mut R, n: u64, m: u64, buf: &mut Vec<f64>) -> (f64, f64) {
    buf.clear();
    buf.extend((0..n).map(|_| open_unit(rng)));
    let (_, v, _) = buf.select_nth_unstable_by(m as usize, f64::total_cmp);
    (*v, 1.0 - *v)
}

/// Draws the (1 + [(n−1)γ])-th order statistic of n iid copies of `d`.
pub fn sample_order_stat<R: Rng>(d: &Distribution, n: u64, gamma: f64, rng: &mut R) -> f64 {
    let mut buf = Vec::with_capacity(n as usize);
    let (u, ub) = uniform_order_stat(rng, n, order_index(n, gamma), &mut buf);
    d.quantile_pair(u, ub)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct McEstimate {
    pub p: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Estimates P(X_{n:γ} ≤ Y_{n:γ}) from independent paired draws.
pub fn precedence_monte_carlo(
    x: &Distribution,
    y: &Distribution,
    n: u64,
    gamma: f64,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> McEstimate {
    let m = order_index(n, gamma);
    let chunks: Vec<u64> = (0..samples.div_ceil(CHUNK) as u64).collect();
    let hits = exec.map(&chunks, |&c| {
        let mut rng = chunk_rng(seed, c);
        let len = CHUNK.min(samples - c as usize * CHUNK);
        let mut buf = Vec::with_capacity(n as usize);
        let mut k = 0usize;
        for _ in 0..len {
            let (u, ub) = uniform_order_stat(&mut rng, n, m, &mut buf);
            let xv = x.quantile_pair(u, ub);
            let (u, ub) = uniform_order_stat(&mut rng, n, m, &mut buf);
            let yv = y.quantile_pair(u, ub);
            if xv <= yv {
                k += 1;
            }
        }
        k
    });
    let k: usize = hits.iter().sum();
    let p = k as f64 / samples as f64;
    McEstimate { p, std_error: (p * (1.0 - p) / samples as f64).sqrt(), samples }
}

/// n-th upper k-record values of iid draws from `d`.
///
/// The k-records of F are the ordinary records of G = 1 − (1 − F)^k, and
/// given the current record r the next one has law G conditioned on (r, ∞).
/// Each step therefore multiplies the survival 1 − G by an independent
/// uniform; the non-record draws in between are not generated.
pub fn simulate_records(d: &Distribution, n: u64, k: u64, paths: usize, seed: u64, exec: Exec) -> Vec<f64> {
    let chunks: Vec<u64> = (0..paths.div_ceil(CHUNK) as u64).collect();
    let parts = exec.map(&chunks, |&c| {
        let mut rng = chunk_rng(seed, c);
        let len = CHUNK.min(paths - c as usize * CHUNK);
        (0..len)
            .map(|_| {
                let mut ln_sg = 0.0;
                for _ in 0..n {
                    ln_sg += open_unit(&mut rng).ln();
                }
                let l = ln_sg / k as f64;
                d.quantile_pair(-l.exp_m1(), l.exp())
            })
            .collect::<Vec<_>>()
    });
    parts.into_iter().flatten().collect()
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}
