use super::Distortion;
use crate::error::{domain, Result};
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum IndexRule {
    Constant,
    /// γ_n = (k−1)/(n−1)
    KthSmallest(u64),
    /// γ_n = (n−k)/(n−1)
    KthLargest(u64),
    /// Explicit (n, γ_n) pairs; n missing from the table falls back to the limit γ.
    Custom(Vec<(u64, f64)>),
}

/// A sequence γ_n → γ with |γ_n − γ| ≤ K/n.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSequence {
    pub gamma: f64,
    pub rule: IndexRule,
    pub rate_constant: f64,
}

impl IndexSequence {
    pub fn constant(gamma: f64) -> Self {
        IndexSequence { gamma, rule: IndexRule::Constant, rate_constant: 0.0 }
    }

    pub fn kth_smallest(k: u64) -> Result<Self> {
        if k == 0 {
            return domain("k must be ≥ 1");
        }
        Ok(IndexSequence { gamma: 0.0, rule: IndexRule::KthSmallest(k), rate_constant: 2.0 * (k - 1) as f64 })
    }

    pub fn kth_largest(k: u64) -> Result<Self> {
        if k == 0 {
            return domain("k must be ≥ 1");
        }
        Ok(IndexSequence { gamma: 1.0, rule: IndexRule::KthLargest(k), rate_constant: 2.0 * (k - 1) as f64 })
    }

    pub fn custom(gamma: f64, table: Vec<(u64, f64)>) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) || table.iter().any(|(_, g)| !(0.0..=1.0).contains(g)) {
            return domain("custom sequence values must lie in [0,1]");
        }
        let k = table.iter().map(|&(n, g)| n as f64 * (g - gamma).abs()).fold(0.0, f64::max);
        Ok(IndexSequence { gamma, rule: IndexRule::Custom(table), rate_constant: k })
    }

    pub fn gamma_n(&self, n: u64) -> f64 {
        let nm1 = n.saturating_sub(1) as f64;
        let v = match &self.rule {
            IndexRule::Constant => self.gamma,
            IndexRule::KthSmallest(k) => {
                if n <= 1 {
                    0.0
                } else {
                    (*k - 1) as f64 / nm1
                }
            }
            IndexRule::KthLargest(k) => {
                if n <= 1 {
                    1.0
                } else {
                    (n as f64 - *k as f64) / nm1
                }
            }
            IndexRule::Custom(t) => t.iter().find(|(m, _)| *m == n).map(|p| p.1).unwrap_or(self.gamma),
        };
        v.clamp(0.0, 1.0)
    }
}

/// A distortion family indexed by n.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyTemplate {
    OrderStat(IndexSequence),
    Mixture { alphas: Vec<f64>, seqs: Vec<IndexSequence> },
    Record { k: u64 },
}

impl FamilyTemplate {
    pub fn order_stat(gamma: f64) -> Self {
        FamilyTemplate::OrderStat(IndexSequence::constant(gamma))
    }

    pub fn mixture(alphas: Vec<f64>, gammas: Vec<f64>) -> Self {
        FamilyTemplate::Mixture { alphas, seqs: gammas.into_iter().map(IndexSequence::constant).collect() }
    }

    pub fn at(&self, n: u64) -> Result<Distortion> {
        match self {
            FamilyTemplate::OrderStat(seq) => Distortion::order_stat(n, seq.gamma_n(n)),
            FamilyTemplate::Mixture { alphas, seqs } => {
                Distortion::mixture(n, alphas.clone(), seqs.iter().map(|s| s.gamma_n(n)).collect())
            }
            FamilyTemplate::Record { k } => Distortion::record(n, *k),
        }
    }

    /// Points where φ'_n concentrates as n grows.
    pub fn concentration_points(&self) -> Vec<f64> {
        match self {
            FamilyTemplate::OrderStat(seq) => vec![seq.gamma],
            FamilyTemplate::Mixture { seqs, .. } => seqs.iter().map(|s| s.gamma).collect(),
            FamilyTemplate::Record { .. } => vec![1.0],
        }
    }
}

impl fmt::Display for FamilyTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyTemplate::OrderStat(seq) => match &seq.rule {
                IndexRule::Constant => write!(f, "os(gamma={})", seq.gamma),
                IndexRule::KthSmallest(k) => write!(f, "os(rule=kth_smallest,k={k})"),
                IndexRule::KthLargest(k) => write!(f, "os(rule=kth_largest,k={k})"),
                IndexRule::Custom(_) => write!(f, "os(rule=custom,gamma={})", seq.gamma),
            },
            FamilyTemplate::Mixture { alphas, seqs } => {
                write!(f, "mix(")?;
                for (i, (a, s)) in alphas.iter().zip(seqs).enumerate() {
                    write!(f, "{}{a}@{}", if i == 0 { "" } else { ", " }, s.gamma)?;
                }
                write!(f, ")")
            }
            FamilyTemplate::Record { k } => write!(f, "record(k={k})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_bound_holds() {
        let seqs = [
            IndexSequence::constant(0.4),
            IndexSequence::kth_smallest(3).unwrap(),
            IndexSequence::kth_largest(2).unwrap(),
        ];
        for s in &seqs {
            for n in 2..500u64 {
                let g = s.gamma_n(n);
                assert!((0.0..=1.0).contains(&g));
                assert!((g - s.gamma).abs() * n as f64 <= s.rate_constant + 1.0);
            }
        }
        assert_eq!(IndexSequence::kth_smallest(2).unwrap().gamma_n(11), 0.1);
    }
}
