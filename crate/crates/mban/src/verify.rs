//! Density-classification verdicts: exhaustive sweeps for small networks,
//! stratified sampling for large ones, and per-density convergence stats.
//!
//! The exhaustive sweep partitions the `2^n` configuration space into
//! contiguous ranges that workers scan independently; partial results merge
//! by pointwise sum/max and by taking the counterexample with the lowest
//! configuration value, so verdicts are identical for any worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{mask, Configuration};
use crate::dynamics::{MajorityNetwork, TrajectoryOutcome};
use crate::enumerate;
use crate::error::{MbanError, Result};

/// Largest `n` the exhaustive verifier accepts by default (`2^n` orbits).
pub const DEFAULT_EXHAUSTIVE_MAX_N: usize = 24;

/// How a verdict was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerifyMode {
    Exhaustive,
    Sampled { seed: u64, samples: u64 },
}

/// A failing initial configuration together with its replayable orbit data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub config: Configuration,
    pub outcome: TrajectoryOutcome,
}

/// Per-initial-density orbit statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DensityStat {
    pub count: u64,
    pub max_transient: u64,
    pub sum_transient: u64,
}

/// The solver/non-solver decision for one network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DctVerdict {
    pub solves: bool,
    pub counterexample: Option<Counterexample>,
    pub max_transient: u64,
    /// Indexed by initial ones-count, size `n + 1`.
    pub histogram: Vec<DensityStat>,
    pub configs_checked: u64,
    pub mode: VerifyMode,
}

/// Per-density `(max, mean)` transient statistics over all configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceProfile {
    pub n: usize,
    /// `(density, max_transient, mean_transient)` for density `0..=n`.
    pub rows: Vec<(u32, u64, f64)>,
    pub overall_max: u64,
}

struct Partial {
    stats: Vec<DensityStat>,
    // (config bits, transient, cycle, entry bits)
    counterexample: Option<(u128, u64, u64, u128)>,
    checked: u64,
}

impl Partial {
    fn empty(n: usize) -> Self {
        Self {
            stats: vec![DensityStat::default(); n + 1],
            counterexample: None,
            checked: 0,
        }
    }

    fn record(&mut self, bits: u128, mu: u64, lam: u64, entry: u128, ok: bool) {
        let d = bits.count_ones() as usize;
        let s = &mut self.stats[d];
        s.count += 1;
        s.max_transient = s.max_transient.max(mu);
        s.sum_transient += mu;
        self.checked += 1;
        if !ok {
            let better = match self.counterexample {
                None => true,
                Some((existing, ..)) => bits < existing,
            };
            if better {
                self.counterexample = Some((bits, mu, lam, entry));
            }
        }
    }

    fn merge(mut self, other: Partial) -> Partial {
        for (a, b) in self.stats.iter_mut().zip(other.stats) {
            a.count += b.count;
            a.max_transient = a.max_transient.max(b.max_transient);
            a.sum_transient += b.sum_transient;
        }
        self.counterexample = match (self.counterexample, other.counterexample) {
            (None, c) | (c, None) => c,
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
        };
        self.checked += other.checked;
        self
    }
}

/// Constant-memory orbit analysis on an arbitrary successor function;
/// returns `(transient, cycle_length, entry_bits)`. The state space is
/// finite, so this always terminates.
fn orbit_of(next: impl Fn(u128) -> u128, start: u128) -> (u64, u64, u128) {
    let mut power: u64 = 1;
    let mut lam: u64 = 1;
    let mut tortoise = start;
    let mut hare = next(start);
    while tortoise != hare {
        if power == lam {
            tortoise = hare;
            power = power.saturating_mul(2);
            lam = 0;
        }
        hare = next(hare);
        lam += 1;
    }
    let mut lead = start;
    for _ in 0..lam {
        lead = next(lead);
    }
    let mut trail = start;
    let mut mu: u64 = 0;
    while trail != lead {
        trail = next(trail);
        lead = next(lead);
        mu += 1;
    }
    (mu, lam, trail)
}

fn require_odd(n: usize) -> Result<()> {
    if n % 2 == 0 {
        return Err(MbanError::EvenSize { n });
    }
    Ok(())
}

fn sweep(net: &MajorityNetwork, max_n: usize) -> Result<Partial> {
    let n = net.n();
    require_odd(n)?;
    if n > max_n {
        return Err(MbanError::TooLarge {
            what: "exhaustive verification",
            n,
            max: max_n,
            detail: format!("needs a sweep over 2^{n} configurations"),
        });
    }
    let total: u64 = 1 << n;
    let full = mask(n);
    // Memoized one-step table when it fits; direct updates otherwise.
    let table = if n <= enumerate::MAX_TABLE_N {
        Some(enumerate::transition_table(net)?)
    } else {
        None
    };

    let block: u64 = 1 << 14;
    let n_blocks = total.div_ceil(block);
    let scan = |b: u64| {
        let lo = b * block;
        let hi = total.min(lo + block);
        let mut part = Partial::empty(n);
        for value in lo..hi {
            let bits = value as u128;
            let (mu, lam, entry) = match &table {
                Some(t) => {
                    let (mu, lam, e) =
                        orbit_of(|s| t[s as usize] as u128, bits);
                    (mu, lam, e)
                }
                None => orbit_of(|s| net.step_bits(s), bits),
            };
            let target = if 2 * bits.count_ones() as usize > n { full } else { 0 };
            let ok = lam == 1 && entry == target;
            part.record(bits, mu, lam, entry, ok);
        }
        part
    };
    Ok((0..n_blocks)
        .into_par_iter()
        .map(scan)
        .reduce(|| Partial::empty(n), Partial::merge))
}

fn verdict_from(net: &MajorityNetwork, part: Partial, mode: VerifyMode) -> DctVerdict {
    let n = net.n();
    let max_transient = part.stats.iter().map(|s| s.max_transient).max().unwrap_or(0);
    let counterexample = part.counterexample.map(|(bits, mu, lam, entry)| Counterexample {
        config: Configuration::from_bits(n, bits).expect("swept state fits"),
        outcome: TrajectoryOutcome {
            transient: mu,
            cycle_length: lam,
            entry_config: Configuration::from_bits(n, entry).expect("swept state fits"),
            steps_evaluated: 0,
        },
    });
    DctVerdict {
        solves: counterexample.is_none(),
        counterexample,
        max_transient,
        histogram: part.stats,
        configs_checked: part.checked,
        mode,
    }
}

/// Decides the task over all `2^n` configurations. Every orbit must reach
/// the uniform fixed point of its initial majority; the failing
/// configuration with the lowest value becomes the counterexample.
pub fn verify_dct_exhaustive(net: &MajorityNetwork) -> Result<DctVerdict> {
    verify_dct_exhaustive_bounded(net, DEFAULT_EXHAUSTIVE_MAX_N)
}

/// As [`verify_dct_exhaustive`] with an explicit size budget.
pub fn verify_dct_exhaustive_bounded(net: &MajorityNetwork, max_n: usize) -> Result<DctVerdict> {
    let part = sweep(net, max_n)?;
    Ok(verdict_from(net, part, VerifyMode::Exhaustive))
}

/// Per-density transient statistics over all configurations.
pub fn convergence_profile(net: &MajorityNetwork) -> Result<ConvergenceProfile> {
    let part = sweep(net, DEFAULT_EXHAUSTIVE_MAX_N)?;
    let rows = part
        .stats
        .iter()
        .enumerate()
        .map(|(d, s)| {
            let mean = if s.count == 0 {
                0.0
            } else {
                s.sum_transient as f64 / s.count as f64
            };
            (d as u32, s.max_transient, mean)
        })
        .collect();
    Ok(ConvergenceProfile {
        n: net.n(),
        rows,
        overall_max: part.stats.iter().map(|s| s.max_transient).max().unwrap_or(0),
    })
}

/// Checks `samples` configurations drawn by [`sample_configuration`]. Half
/// of the draws sit at the hard densities `floor(n/2)` and `ceil(n/2)`, the
/// rest spread uniformly over the other densities. A passing verdict means
/// "no counterexample found", never a proof.
pub fn verify_dct_sampled(net: &MajorityNetwork, samples: u64, seed: u64) -> Result<DctVerdict> {
    verify_dct_sampled_bounded(net, samples, seed, crate::dynamics::default_max_steps(net.n()))
}

/// As [`verify_dct_sampled`] with an explicit per-orbit step budget.
pub fn verify_dct_sampled_bounded(
    net: &MajorityNetwork,
    samples: u64,
    seed: u64,
    max_steps: u64,
) -> Result<DctVerdict> {
    let n = net.n();
    require_odd(n)?;
    if samples == 0 {
        return Err(MbanError::Parameter("samples must be at least 1".into()));
    }
    let full = mask(n);
    let block: u64 = 256;
    let n_blocks = samples.div_ceil(block);
    let scan = |b: u64| -> Result<Partial> {
        let lo = b * block;
        let hi = samples.min(lo + block);
        let mut part = Partial::empty(n);
        for draw in lo..hi {
            let x = sample_configuration(n, seed, draw);
            let outcome = net.evolve(&x, max_steps)?;
            let target = if 2 * x.ones_count() as usize > n { full } else { 0 };
            let ok = outcome.cycle_length == 1 && outcome.entry_config.bits() == target;
            part.record(
                x.bits(),
                outcome.transient,
                outcome.cycle_length,
                outcome.entry_config.bits(),
                ok,
            );
        }
        Ok(part)
    };
    let part = (0..n_blocks)
        .into_par_iter()
        .map(scan)
        .try_reduce(|| Partial::empty(n), |a, b| Ok(a.merge(b)))?;
    Ok(verdict_from(net, part, VerifyMode::Sampled { seed, samples }))
}

/// Stratified draw: a pure function of `(n, seed, draw index)`, so sampling
/// is reproducible independently of worker count. Even draw indices go to
/// the hard densities `floor(n/2)`/`ceil(n/2)`; odd indices pick uniformly
/// among the remaining densities.
pub fn sample_configuration(n: usize, seed: u64, draw: u64) -> Configuration {
    use rand::{Rng, SeedableRng};
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&draw.to_le_bytes());
    key[16..24].copy_from_slice(&(n as u64).to_le_bytes());
    key[24..].copy_from_slice(b"mban-smp");
    let mut rng = rand_chacha::ChaCha8Rng::from_seed(key);

    let low = n / 2;
    let high = n.div_ceil(2);
    let density = if draw % 2 == 0 {
        if rng.gen::<bool>() {
            high
        } else {
            low
        }
    } else if n == 1 {
        rng.gen_range(0..=1usize)
    } else {
        // Uniform over 0..=n excluding the two middle densities.
        let pick = rng.gen_range(0..n - 1);
        if pick < low {
            pick
        } else {
            pick + 2
        }
    };

    // Partial Fisher-Yates: the first `density` entries become the 1-bits.
    let mut positions: Vec<usize> = (0..n).collect();
    let mut bits = 0u128;
    for i in 0..density {
        let j = rng.gen_range(i..n);
        positions.swap(i, j);
        bits |= 1 << positions[i];
    }
    Configuration::from_bits(n, bits).expect("sampled bits fit")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    fn net(g: crate::graph::Digraph) -> MajorityNetwork {
        MajorityNetwork::new(g)
    }

    #[test]
    fn complete_k5_solves_in_one_step() {
        let v = verify_dct_exhaustive(&net(families::complete(5).unwrap())).unwrap();
        assert!(v.solves);
        assert!(v.max_transient <= 1);
        assert_eq!(v.configs_checked, 32);
        assert!(v.counterexample.is_none());
    }

    #[test]
    fn directed_cycle_c5_fails_at_lowest_value() {
        let v = verify_dct_exhaustive(&net(families::directed_cycle(5).unwrap())).unwrap();
        assert!(!v.solves);
        let cex = v.counterexample.unwrap();
        // Lowest failing configuration value is 1: automaton 0 alone set.
        assert_eq!(cex.config.bits(), 1);
        assert_eq!(cex.config.to_text(), "10000");
        assert_eq!(cex.outcome.cycle_length, 5);
        assert_eq!(cex.outcome.transient, 0);
    }

    #[test]
    fn left_right_n9_within_four_steps() {
        let v =
            verify_dct_exhaustive(&net(families::complementary_left_right(9).unwrap())).unwrap();
        assert!(v.solves);
        assert!(v.max_transient <= 4);
    }

    #[test]
    fn even_size_is_a_domain_error() {
        let g = families::directed_cycle(4).unwrap();
        assert_eq!(
            verify_dct_exhaustive(&net(g)).unwrap_err(),
            MbanError::EvenSize { n: 4 }
        );
    }

    #[test]
    fn oversized_sweep_is_refused() {
        let g = crate::graph::Digraph::new(25).unwrap();
        assert!(matches!(
            verify_dct_exhaustive(&net(g)).unwrap_err(),
            MbanError::TooLarge { .. }
        ));
    }

    #[test]
    fn zero_samples_is_a_parameter_error() {
        let g = families::complete(3).unwrap();
        assert!(matches!(
            verify_dct_sampled(&net(g), 0, 1).unwrap_err(),
            MbanError::Parameter(_)
        ));
    }

    #[test]
    fn sampled_cycle_c101_finds_a_rotation() {
        let v = verify_dct_sampled(&net(families::directed_cycle(101).unwrap()), 100, 1).unwrap();
        assert!(!v.solves);
        let cex = v.counterexample.unwrap();
        assert!(cex.outcome.cycle_length > 1);
    }

    #[test]
    fn sampled_left_right_n101_within_four_steps() {
        let g = families::complementary_left_right(101).unwrap();
        let v = verify_dct_sampled(&net(g), 1000, 1).unwrap();
        assert!(v.solves);
        assert!(v.max_transient <= 4);
        assert_eq!(v.configs_checked, 1000);
    }

    #[test]
    fn profile_complete_k3() {
        let p = convergence_profile(&net(families::complete(3).unwrap())).unwrap();
        assert_eq!(p.rows.len(), 4);
        assert_eq!(p.rows[0], (0, 0, 0.0));
        assert_eq!(p.rows[3], (3, 0, 0.0));
        assert_eq!(p.rows[1].1, 1);
        assert_eq!(p.rows[2].1, 1);
        assert_eq!(p.overall_max, 1);
    }

    #[test]
    fn profile_complete_cycle_7_max_at_most_n() {
        let p = convergence_profile(&net(families::complete_cycle(7).unwrap())).unwrap();
        assert!(p.overall_max <= 7);
    }

    #[test]
    fn profile_two_cycles_within_n_plus_5() {
        let p =
            convergence_profile(&net(families::two_intersecting_cycles(7, 4).unwrap())).unwrap();
        assert!(p.overall_max <= 12);
    }

    #[test]
    fn sample_draws_are_pure_functions_of_seed_and_index() {
        for draw in 0..50 {
            let a = sample_configuration(11, 7, draw);
            let b = sample_configuration(11, 7, draw);
            assert_eq!(a, b);
        }
        // Different seeds decorrelate.
        let same: usize = (0..50)
            .filter(|&d| sample_configuration(11, 7, d) == sample_configuration(11, 8, d))
            .count();
        assert!(same < 50);
    }

    #[test]
    fn sample_stratification_hits_hard_densities() {
        let n = 11;
        for draw in (0..100).step_by(2) {
            let d = sample_configuration(n, 3, draw).ones_count() as usize;
            assert!(d == 5 || d == 6, "even draws stay at the middle, got {d}");
        }
        for draw in (1..100).step_by(2) {
            let d = sample_configuration(n, 3, draw).ones_count() as usize;
            assert!(d != 5 && d != 6, "odd draws avoid the middle, got {d}");
        }
    }

    #[test]
    fn exhaustive_verdict_is_worker_count_independent() {
        let g = families::complementary_left_right(9).unwrap();
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| verify_dct_exhaustive(&net(g.clone())).unwrap());
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| verify_dct_exhaustive(&net(g)).unwrap());
        assert_eq!(one, four);
    }
}
