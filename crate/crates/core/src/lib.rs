//! Offline optimization toolkit for batteryless, intermittently powered
//! systems.
//!
//! An application is a fixed sequence of atomically executed tasks exchanging
//! fixed-size data packets. Execution happens in *bursts*: the energy
//! management unit charges a capacitor, wakes the system, the burst loads its
//! inputs from nonvolatile memory, runs a contiguous range of tasks, stores
//! the outputs that later bursts need, and powers off.
//!
//! This crate provides:
//!
//! * [`model`] — applications, packets, energy models, partitions and the
//!   liveness lookups everything else is built on;
//! * [`adl`] — a parser and serializer for the `.adl` application
//!   description language;
//! * [`cost`] — burst energy evaluation `E<i,j>` and the pruned cost table;
//! * [`solver`] — optimal partitioning under a storage bound, minimum-storage
//!   search, baselines, brute-force oracle and design-space sweeps;
//! * [`sim`] — discrete-event replay of a partition against a harvested
//!   power trace, plus data-consistency checking;
//! * [`mod@bench`] — generators for the head-counting replica applications and
//!   synthetic test families.

pub mod adl;
pub mod bench;
pub mod cost;
pub mod model;
pub mod sim;
pub mod solver;

mod error;

pub use error::Error;
pub use model::{
    e_read, e_write, validate, Application, BurstRecord, Diagnostic, DiagnosticRule, EnergyModel,
    Packet, PacketDef, PacketId, Partition, PartitionReport, Task, TaskDef,
};

pub use cost::{
    build_cost_table, burst_energy, evaluate_partition, BurstCost, CostEntry, CostTable,
};
pub use solver::{
    baseline_single_task, baseline_whole, brute_force, optimal_partition, partition_from_lines,
    partition_to_lines, q_min, state_graph, sweep, Feasibility, Infeasible, Objective, QMinResult,
    SingleTaskMode, Solution, StateGraph, SweepGrid, SweepPoint,
};

pub use sim::{
    check_consistency, check_plan, simulate, transfer_plan, BurstPlan, ConsistencyOutcome,
    EmuConfig, PowerTrace, ResidualPolicy, SimBurst, SimReport, TransferPlan,
};
