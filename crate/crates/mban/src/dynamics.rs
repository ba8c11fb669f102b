//! Exact synchronous dynamics of majority Boolean automata networks.
//!
//! Every automaton simultaneously takes the majority state of its
//! in-neighbors, keeping its current state on an exact tie (which includes
//! the empty neighborhood, so isolated inputs behave as the identity).
//! Because states are bit-packed, one update of node `v` is an AND with the
//! in-neighbor mask, a popcount, and a comparison against the in-degree:
//! `2 * ones(x & mask_v)` versus `|N(v)|`, with the tie branch reading bit
//! `v` of `x`.
//!
//! The uniform configurations `0^n` and `1^n` are fixed points of every
//! network: a uniform neighborhood never produces the opposite strict
//! majority, and ties keep the (uniform) current state.

use crate::config::Configuration;
use crate::error::{MbanError, Result};
use crate::graph::Digraph;

/// Majority over a multiset of neighbor states with tie-keep fallback.
///
/// Returns 0 if fewer than half the inputs are 1, 1 if more than half are,
/// and `current` on an exact tie (an empty input set is a tie).
pub fn local_majority<I>(neighbor_states: I, current: bool) -> bool
where
    I: IntoIterator<Item = bool>,
{
    let mut ones = 0usize;
    let mut total = 0usize;
    for s in neighbor_states {
        total += 1;
        if s {
            ones += 1;
        }
    }
    match (2 * ones).cmp(&total) {
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Equal => current,
    }
}

/// A Boolean automata network whose every local function is the tie-keeping
/// majority over the in-neighborhood in its graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MajorityNetwork {
    graph: Digraph,
    degrees: Vec<u32>,
}

/// Minimal transient and cycle data of one deterministic orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrajectoryOutcome {
    /// Minimal `t` with `A^(t+l)(x) = A^t(x)`.
    pub transient: u64,
    /// Minimal period `l` of the limit cycle the orbit falls into.
    pub cycle_length: u64,
    /// The configuration `A^t(x)` entering the cycle.
    pub entry_config: Configuration,
    /// Number of one-step updates evaluated while analyzing the orbit.
    pub steps_evaluated: u64,
}

impl TrajectoryOutcome {
    pub fn is_fixed_point(&self) -> bool {
        self.cycle_length == 1
    }
}

impl MajorityNetwork {
    pub fn new(graph: Digraph) -> Self {
        let degrees = (0..graph.n()).map(|v| graph.in_degree(v) as u32).collect();
        Self { graph, degrees }
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// One synchronous update on a raw state word. All reads come from
    /// `bits`; callers must not set bits at positions `>= n`.
    pub fn step_bits(&self, bits: u128) -> u128 {
        let mut out = 0u128;
        for v in 0..self.graph.n() {
            let ones = 2 * (bits & self.graph.in_mask(v)).count_ones();
            let deg = self.degrees[v];
            let state = if ones > deg {
                1
            } else if ones < deg {
                0
            } else {
                (bits >> v) & 1
            };
            out |= state << v;
        }
        out
    }

    /// One fully synchronous update.
    pub fn step(&self, x: &Configuration) -> Result<Configuration> {
        if x.n() != self.n() {
            return Err(MbanError::Dimension {
                expected: self.n(),
                actual: x.n(),
            });
        }
        Ok(Configuration::from_bits(self.n(), self.step_bits(x.bits()))
            .expect("step preserves the state width"))
    }

    /// Default step budget: `2^n` clamped to `2^20`.
    pub fn default_max_steps(&self) -> u64 {
        default_max_steps(self.n())
    }

    /// Finds the minimal `(transient, cycle_length)` of the orbit of `x`
    /// with constant memory (teleporting-tortoise cycle search followed by
    /// exact refinement). Errors with [`MbanError::BudgetExceeded`] exactly
    /// when the orbit does not close within `max_steps` updates, i.e. when
    /// `transient + cycle_length > max_steps`.
    pub fn evolve(&self, x: &Configuration, max_steps: u64) -> Result<TrajectoryOutcome> {
        if x.n() != self.n() {
            return Err(MbanError::Dimension {
                expected: self.n(),
                actual: x.n(),
            });
        }
        if max_steps == 0 {
            return Err(MbanError::Parameter("max_steps must be at least 1".into()));
        }
        let mut evaluated = 0u64;
        let mut count_step = |s: u128| {
            evaluated += 1;
            self.step_bits(s)
        };

        // Cycle search. The hare walks at most ~3(transient + cycle) steps
        // before detection, so a 3x cap cannot produce a spurious refusal.
        let cap = max_steps.saturating_mul(3).saturating_add(8);
        let start = x.bits();
        let mut power: u64 = 1;
        let mut lam: u64 = 1;
        let mut tortoise = start;
        let mut hare = count_step(start);
        let mut hare_pos: u64 = 1;
        while tortoise != hare {
            if power == lam {
                tortoise = hare;
                power = power.saturating_mul(2);
                lam = 0;
            }
            if hare_pos >= cap {
                return Err(MbanError::BudgetExceeded {
                    max_steps,
                    required: hare_pos,
                });
            }
            hare = count_step(hare);
            hare_pos += 1;
            lam += 1;
        }

        // Transient refinement: two pointers `lam` apart meet at the entry.
        let mut lead = start;
        for _ in 0..lam {
            lead = count_step(lead);
        }
        let mut trail = start;
        let mut mu: u64 = 0;
        while trail != lead {
            trail = count_step(trail);
            lead = count_step(lead);
            mu += 1;
        }

        if mu.saturating_add(lam) > max_steps {
            return Err(MbanError::BudgetExceeded {
                max_steps,
                required: mu + lam,
            });
        }
        Ok(TrajectoryOutcome {
            transient: mu,
            cycle_length: lam,
            entry_config: Configuration::from_bits(self.n(), trail)
                .expect("orbit stays within the state width"),
            steps_evaluated: evaluated,
        })
    }
}

/// `2^n` clamped to `2^20`: guarantees orbit closure for `n <= 20` and
/// bounds the walk for larger networks.
pub fn default_max_steps(n: usize) -> u64 {
    if n >= 20 {
        1 << 20
    } else {
        1 << n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;
    use crate::graph::Digraph;

    fn k(n: usize) -> MajorityNetwork {
        MajorityNetwork::new(families::complete(n).unwrap())
    }

    fn c(n: usize) -> MajorityNetwork {
        MajorityNetwork::new(families::directed_cycle(n).unwrap())
    }

    #[test]
    fn local_majority_examples() {
        assert!(local_majority([true, true, false], false));
        assert!(!local_majority([true, false], false));
        assert!(local_majority([], true));
        assert!(!local_majority([], false));
    }

    #[test]
    fn step_complete_k3() {
        let net = k(3);
        let x = Configuration::from_text("110").unwrap();
        assert_eq!(net.step(&x).unwrap().to_text(), "111");
        let zero = Configuration::zeros(3).unwrap();
        assert_eq!(net.step(&zero).unwrap(), zero);
    }

    #[test]
    fn step_directed_cycle_rotates() {
        let net = c(3);
        let x = Configuration::from_text("110").unwrap();
        assert_eq!(net.step(&x).unwrap().to_text(), "011");
    }

    #[test]
    fn step_checks_dimensions() {
        let net = k(3);
        let x = Configuration::from_text("1100").unwrap();
        assert_eq!(
            net.step(&x).unwrap_err(),
            MbanError::Dimension {
                expected: 3,
                actual: 4
            }
        );
    }

    #[test]
    fn isolated_node_keeps_its_state() {
        // Empty in-neighborhood is a tie of size zero, hence the identity.
        let g = Digraph::new(2).unwrap();
        let net = MajorityNetwork::new(g);
        for text in ["00", "10", "01", "11"] {
            let x = Configuration::from_text(text).unwrap();
            assert_eq!(net.step(&x).unwrap(), x);
        }
    }

    #[test]
    fn evolve_complete_k3() {
        let net = k(3);
        let x = Configuration::from_text("110").unwrap();
        let out = net.evolve(&x, 10).unwrap();
        assert_eq!(out.transient, 1);
        assert_eq!(out.cycle_length, 1);
        assert_eq!(out.entry_config.to_text(), "111");
        assert!(out.is_fixed_point());
    }

    #[test]
    fn evolve_directed_cycle_c3() {
        let net = c(3);
        let x = Configuration::from_text("110").unwrap();
        let out = net.evolve(&x, 10).unwrap();
        assert_eq!((out.transient, out.cycle_length), (0, 3));
        assert_eq!(out.entry_config, x);
    }

    #[test]
    fn evolve_complete_cycle_7() {
        // Majority of 1110000 is 0, so the orbit must end in the all-zeros
        // fixed point; the transient was frozen from a stored-orbit sweep.
        let net = MajorityNetwork::new(families::complete_cycle(7).unwrap());
        let x = Configuration::from_text("1110000").unwrap();
        let out = net.evolve(&x, 100).unwrap();
        assert_eq!(out.transient, 7);
        assert_eq!(out.cycle_length, 1);
        assert_eq!(out.entry_config.to_text(), "0000000");
    }

    #[test]
    fn evolve_budget_error_is_exact() {
        // C_5 from a non-uniform word: transient 0, cycle 5. The orbit
        // closes after 5 evaluated steps, so max_steps = 4 must refuse and
        // max_steps = 5 must succeed.
        let net = c(5);
        let x = Configuration::from_text("10000").unwrap();
        assert_eq!(
            net.evolve(&x, 4).unwrap_err(),
            MbanError::BudgetExceeded {
                max_steps: 4,
                required: 5
            }
        );
        let out = net.evolve(&x, 5).unwrap();
        assert_eq!((out.transient, out.cycle_length), (0, 5));
    }

    #[test]
    fn evolve_rejects_zero_budget() {
        let net = k(3);
        let x = Configuration::zeros(3).unwrap();
        assert!(matches!(
            net.evolve(&x, 0).unwrap_err(),
            MbanError::Parameter(_)
        ));
    }

    #[test]
    fn default_budget_is_clamped() {
        assert_eq!(default_max_steps(3), 8);
        assert_eq!(default_max_steps(20), 1 << 20);
        assert_eq!(default_max_steps(101), 1 << 20);
    }
}
