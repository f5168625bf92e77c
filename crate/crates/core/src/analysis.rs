//! Classical reference values: exact norms, Boltzmann distributions by
//! enumeration, and goodness-of-fit statistics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::ising::{IsingLattice, MAX_BRUTE_FORCE_SITES};
use crate::transduce::{phi_product, AmplitudeTable, Variant};

/// Norms of the synthesized target projection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    /// `sqrt(sum_l gamma^(-2 lambda_l))`.
    pub a_bar: f64,
    pub phi: f64,
    /// Pre-amplification norm of the target projection.
    pub u: f64,
}

/// Direct: `u = Phi * a_bar / sqrt(N)`. Controlled: `u = a_bar / sqrt(N)`.
pub fn exact_norms(lambdas: &[u64], gamma: f64, d: u32, variant: Variant) -> Result<Norms> {
    if lambdas.is_empty() {
        return Err(Error::EmptyInput("lambda table"));
    }
    let phi = phi_product(gamma, d)?;
    let ln_gamma = gamma.ln();
    let a_bar = lambdas
        .iter()
        .map(|&l| (-2.0 * l as f64 * ln_gamma).exp())
        .sum::<f64>()
        .sqrt();
    let base = a_bar / (lambdas.len() as f64).sqrt();
    let u = match variant {
        Variant::Direct => phi * base,
        Variant::Controlled => base,
    };
    Ok(Norms { a_bar, phi, u })
}

/// [`exact_norms`] with the entries where `keep` is false removed from the
/// target projection (as the exact-zero handling does for saturated entries).
pub fn exact_norms_masked(lambdas: &[u64], keep: &[bool], gamma: f64, d: u32, variant: Variant) -> Result<Norms> {
    if lambdas.len() != keep.len() {
        return Err(Error::InvalidArgument("mask length differs from table".into()));
    }
    let full = exact_norms(lambdas, gamma, d, variant)?;
    let ln_gamma = gamma.ln();
    let a_bar = lambdas
        .iter()
        .zip(keep)
        .filter(|(_, &k)| k)
        .map(|(&l, _)| (-2.0 * l as f64 * ln_gamma).exp())
        .sum::<f64>()
        .sqrt();
    let scale = if full.a_bar > 0.0 { a_bar / full.a_bar } else { 0.0 };
    Ok(Norms {
        a_bar,
        phi: full.phi,
        u: full.u * scale,
    })
}

pub fn exact_norms_for_table(table: &AmplitudeTable, variant: Variant) -> Result<Norms> {
    exact_norms(&table.lambdas, table.gamma, table.d, variant)
}

/// Summary of one synthesis run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthesisDiagnostics {
    /// Target-projection probability of `U|0>`, read off the statevector.
    pub u_sq: f64,
    /// Same quantity from [`exact_norms`].
    pub u_sq_oracle: f64,
    pub nu: u32,
    /// `sin^2((2 nu + 1) asin u)`.
    pub a_prime_sq: f64,
    /// Target-projection probability of the amplified statevector.
    pub a_prime_sq_measured: f64,
    /// Fraction of sampled shots with the target register at 0.
    pub efficiency: Option<f64>,
    pub shots: u64,
    pub seed: Option<u64>,
    pub total_qubits: usize,
    pub d: u32,
}

/// Standard deviation of a binomial frequency.
pub fn binomial_sigma(p: f64, shots: u64) -> f64 {
    (p * (1.0 - p) / shots as f64).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaBin {
    /// Number of configurations with this `Sigma`.
    pub density: u64,
    pub probability: f64,
}

/// Exact Boltzmann distribution of a small lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoltzmannReference {
    /// `ln Z` with `Z = sum_l exp(-beta E_l)`.
    pub log_partition: f64,
    /// Probability of each configuration.
    pub probabilities: Vec<f64>,
    pub sigma: BTreeMap<u32, SigmaBin>,
    pub magnetization: BTreeMap<i32, f64>,
}

impl BoltzmannReference {
    pub fn partition(&self) -> f64 {
        self.log_partition.exp()
    }

    /// Density of states keyed by `Sigma`.
    pub fn density_of_states(&self) -> BTreeMap<u32, u64> {
        self.sigma.iter().map(|(&s, b)| (s, b.density)).collect()
    }
}

/// Enumerates all `2^N` configurations. `P(l)` is proportional to
/// `exp(-2 beta_j Sigma_l)`.
pub fn boltzmann_reference(lattice: &IsingLattice) -> Result<BoltzmannReference> {
    if lattice.sites() > MAX_BRUTE_FORCE_SITES {
        return Err(Error::InvalidArgument(format!(
            "{} sites is beyond brute-force enumeration ({MAX_BRUTE_FORCE_SITES})",
            lattice.sites()
        )));
    }
    let beta_j = lattice.beta_j;
    let weights: Vec<(u32, f64)> = (0..lattice.configurations())
        .map(|l| {
            let s = lattice.sigma_count(l);
            (s, (-2.0 * beta_j * s as f64).exp())
        })
        .collect();
    let total: f64 = weights.iter().map(|(_, w)| w).sum();
    // Z = exp(2N beta J) * sum_l exp(-2 beta J Sigma_l), with 2N = pair count
    let log_partition = lattice.pairs.len() as f64 * beta_j + total.ln();

    let mut probabilities = Vec::with_capacity(weights.len());
    let mut sigma: BTreeMap<u32, SigmaBin> = BTreeMap::new();
    let mut magnetization: BTreeMap<i32, f64> = BTreeMap::new();
    for (l, (s, w)) in weights.into_iter().enumerate() {
        let p = w / total;
        probabilities.push(p);
        let bin = sigma.entry(s).or_insert(SigmaBin {
            density: 0,
            probability: 0.0,
        });
        bin.density += 1;
        bin.probability += p;
        *magnetization.entry(lattice.magnetization(l as u64)).or_insert(0.0) += p;
    }
    Ok(BoltzmannReference {
        log_partition,
        probabilities,
        sigma,
        magnetization,
    })
}

/// Pearson chi-square and total-variation comparison of counts against a
/// reference distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub tvd: f64,
}

/// Minimum expected count per chi-square bin; smaller bins are pooled.
pub const MIN_EXPECTED: f64 = 5.0;

pub fn distribution_tests(observed: &[u64], reference: &[f64]) -> Result<DistributionTest> {
    if observed.is_empty() || reference.is_empty() {
        return Err(Error::EmptyInput("distribution"));
    }
    if observed.len() != reference.len() {
        return Err(Error::InvalidArgument(format!(
            "{} observed bins vs {} reference bins",
            observed.len(),
            reference.len()
        )));
    }
    let shots: u64 = observed.iter().sum();
    if shots == 0 {
        return Err(Error::EmptyInput("observed counts"));
    }
    let mass: f64 = reference.iter().sum();
    if !(mass > 0.0) {
        return Err(Error::InvalidArgument("reference distribution has no mass".into()));
    }
    let n = shots as f64;
    let probs: Vec<f64> = reference.iter().map(|p| p / mass).collect();

    let tvd = 0.5
        * observed
            .iter()
            .zip(&probs)
            .map(|(&o, &p)| (o as f64 / n - p).abs())
            .sum::<f64>();

    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut pooled = (0.0, 0.0);
    let mut impossible = false;
    for (&o, &p) in observed.iter().zip(&probs) {
        let e = n * p;
        if p == 0.0 {
            impossible |= o > 0;
            continue;
        }
        if e < MIN_EXPECTED {
            pooled.0 += o as f64;
            pooled.1 += e;
        } else {
            bins.push((o as f64, e));
        }
    }
    if pooled.1 > 0.0 {
        if pooled.1 >= MIN_EXPECTED || bins.is_empty() {
            bins.push(pooled);
        } else {
            let smallest = bins
                .iter_mut()
                .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite"))
                .expect("non-empty");
            smallest.0 += pooled.0;
            smallest.1 += pooled.1;
        }
    }
    if impossible {
        return Ok(DistributionTest {
            statistic: f64::INFINITY,
            dof: bins.len().saturating_sub(1),
            p_value: 0.0,
            tvd,
        });
    }
    let statistic: f64 = bins.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = bins.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        (1.0 - dist.cdf(statistic)).clamp(0.0, 1.0)
    };
    Ok(DistributionTest {
        statistic,
        dof,
        p_value,
        tvd,
    })
}

/// One row of a `Sigma` histogram: raw counts, counts per configuration, and
/// the expected counts per configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaRow {
    pub sigma: u32,
    pub density: u64,
    pub observed: u64,
    pub observed_over_g: f64,
    pub theory: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagnetizationRow {
    pub m: i32,
    pub observed: u64,
    pub frequency: f64,
    pub theory: f64,
}

/// Folds configuration counts into `Sigma` rows. `theory` is
/// `shots * P(Sigma) / g(Sigma)`, proportional to `exp(-2 beta_j Sigma)`.
pub fn sigma_rows(
    lattice: &IsingLattice,
    reference: &BoltzmannReference,
    counts: &BTreeMap<u64, u64>,
) -> Vec<SigmaRow> {
    let shots: u64 = counts.values().sum();
    let mut observed: BTreeMap<u32, u64> = BTreeMap::new();
    for (&l, &n) in counts {
        *observed.entry(lattice.sigma_count(l)).or_insert(0) += n;
    }
    reference
        .sigma
        .iter()
        .map(|(&sigma, bin)| {
            let o = observed.get(&sigma).copied().unwrap_or(0);
            SigmaRow {
                sigma,
                density: bin.density,
                observed: o,
                observed_over_g: o as f64 / bin.density as f64,
                theory: shots as f64 * bin.probability / bin.density as f64,
            }
        })
        .collect()
}

pub fn magnetization_rows(
    lattice: &IsingLattice,
    reference: &BoltzmannReference,
    counts: &BTreeMap<u64, u64>,
) -> Vec<MagnetizationRow> {
    let shots: u64 = counts.values().sum::<u64>().max(1);
    let mut observed: BTreeMap<i32, u64> = BTreeMap::new();
    for (&l, &n) in counts {
        *observed.entry(lattice.magnetization(l)).or_insert(0) += n;
    }
    reference
        .magnetization
        .iter()
        .map(|(&m, &p)| {
            let o = observed.get(&m).copied().unwrap_or(0);
            MagnetizationRow {
                m,
                observed: o,
                frequency: o as f64 / shots as f64,
                theory: p,
            }
        })
        .collect()
}
