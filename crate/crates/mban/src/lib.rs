//! Majority Boolean automata networks and the density classification task.
//!
//! An automata network updates every node synchronously to the majority
//! state of its in-neighbors, keeping the current state on a tie. The
//! density classification task asks that every initial configuration
//! converge to the uniform fixed point of its initial majority state. This
//! crate builds the named network families that achieve this, decides the
//! property exhaustively or by stratified sampling, and enumerates all
//! solving networks of a given size up to isomorphism.
//!
//! The `mban` binary exposes the same functionality as subcommands; see the
//! crate README for the file formats and the exit-code contract.

pub mod config;
pub mod dynamics;
pub mod enumerate;
pub mod error;
pub mod families;
pub mod graph;
pub mod report;
pub mod verify;

pub use config::{Configuration, MAX_NODES};
pub use dynamics::{default_max_steps, local_majority, MajorityNetwork, TrajectoryOutcome};
pub use error::{MbanError, Result};
pub use graph::{network_metrics, Digraph, GraphFormat, NetworkMetrics};
