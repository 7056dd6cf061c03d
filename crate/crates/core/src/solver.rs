//! Optimal burst partitioning.
//!
//! Between consecutive tasks the system is powered off, giving states
//! `s_0..s_n`; a burst `<i, j>` is an edge from `s_{i-1}` to `s_j` weighted
//! by its energy. A partition is a path from `s_0` to `s_n`, so minimizing
//! total energy under a per-burst cap `q_max` is a shortest-path problem on
//! the graph with over-cap edges removed, and the minimum workable storage
//! capacity `Q_min` is the same problem with the path length replaced by the
//! maximum edge weight, on the complete graph.
//!
//! Both solvers run dynamic programming over the states in order, scanning
//! each burst row with an incremental [`RowSweep`] instead of materializing
//! the quadratic edge set. Rows are pruned once `E_s` plus the execution
//! energies alone exceed the cap. Ties are broken deterministically: lower
//! energy first, then fewer bursts, then the earliest burst start found
//! (predecessors are scanned in increasing order).

use crate::cost::{burst_energy, evaluate_partition, CostTable, RowSweep};
use crate::model::{e_read, e_write, Application, BurstRecord, Partition, PartitionReport};
use crate::Error;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;

/// Exhaustive enumeration refuses above this many tasks (2^(n-1) partitions).
pub const BRUTE_FORCE_MAX_TASKS: usize = 22;

/// Infeasibility evidence includes the exact `Q_min` up to this many tasks;
/// beyond it, only the first blocked task is reported.
const QMIN_EVIDENCE_MAX_TASKS: usize = 10_000;

/// A partition together with its evaluated report.
#[derive(Clone, Debug)]
pub struct Solution {
    pub partition: Partition,
    pub report: PartitionReport,
}

/// Why no partition fits under the requested bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Infeasible {
    /// The smallest bound that admits a partition.
    QMin { q_min: f64 },
    /// First task with no burst at or below the bound (reported when the
    /// application is too large to compute `Q_min` as a side effect).
    Blocked { task: usize },
}

impl fmt::Display for Infeasible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Infeasible::QMin { q_min } => write!(
                f,
                "no partition fits the bound; the smallest feasible bound (Q_min) is {q_min} uJ"
            ),
            Infeasible::Blocked { task } => write!(
                f,
                "no partition fits the bound; task {task} has no burst within it"
            ),
        }
    }
}

/// Outcome of a bounded partitioning run.
#[derive(Clone, Debug)]
pub enum Feasibility {
    Feasible(Solution),
    Infeasible(Infeasible),
}

impl Feasibility {
    pub fn feasible(self) -> Option<Solution> {
        match self {
            Feasibility::Feasible(s) => Some(s),
            Feasibility::Infeasible(_) => None,
        }
    }

    pub fn as_feasible(&self) -> Option<&Solution> {
        match self {
            Feasibility::Feasible(s) => Some(s),
            Feasibility::Infeasible(_) => None,
        }
    }
}

fn better(cand_energy: f64, cand_bursts: u32, cur_energy: f64, cur_bursts: u32) -> bool {
    cand_energy < cur_energy || (cand_energy == cur_energy && cand_bursts < cur_bursts)
}

struct DpTables {
    pred: Vec<usize>,
}

/// Shortest-path DP; assumes the bound was already validated.
fn solve_total(app: &Application, q_max: f64) -> Option<DpTables> {
    let n = app.n_tasks();
    let mut dist = vec![f64::INFINITY; n + 1];
    let mut bursts = vec![u32::MAX; n + 1];
    let mut pred = vec![usize::MAX; n + 1];
    dist[0] = 0.0;
    bursts[0] = 0;
    for i in 1..=n {
        if !dist[i - 1].is_finite() {
            continue;
        }
        let mut sweep = RowSweep::new(app, i);
        for j in i..=n {
            sweep.advance();
            if sweep.exec_lower_bound() > q_max {
                break;
            }
            let energy = sweep.energy();
            if energy <= q_max {
                let cand = dist[i - 1] + energy;
                let cand_bursts = bursts[i - 1] + 1;
                if better(cand, cand_bursts, dist[j], bursts[j]) {
                    dist[j] = cand;
                    bursts[j] = cand_bursts;
                    pred[j] = i - 1;
                }
            }
        }
    }
    dist[n].is_finite().then_some(DpTables { pred })
}

fn reconstruct(pred: &[usize], n: usize) -> Partition {
    let mut ends = Vec::new();
    let mut state = n;
    while state > 0 {
        ends.push(state);
        state = pred[state];
    }
    ends.reverse();
    let boundaries = &ends[..ends.len() - 1];
    Partition::from_boundaries(boundaries, n).expect("DP path tiles the task sequence")
}

/// Minimum-total-energy partition with every burst at or below `q_max`.
///
/// When no partition fits, the result carries blocking evidence: the exact
/// `Q_min` for applications small enough to afford the unpruned bottleneck
/// pass, otherwise the first task whose every enclosing burst busts the
/// bound.
pub fn optimal_partition(app: &Application, q_max: f64) -> Result<Feasibility, Error> {
    if !q_max.is_finite() || q_max <= 0.0 {
        return Err(Error::InvalidQMax(q_max));
    }
    let n = app.n_tasks();
    if n == 0 {
        let partition = Partition::whole(0);
        let report = evaluate_partition(app, &partition);
        return Ok(Feasibility::Feasible(Solution { partition, report }));
    }
    match solve_total(app, q_max) {
        Some(tables) => {
            let partition = reconstruct(&tables.pred, n);
            let report = evaluate_partition(app, &partition);
            debug_assert!(report.per_burst.iter().all(|b| b.energy <= q_max));
            Ok(Feasibility::Feasible(Solution { partition, report }))
        }
        None => {
            let evidence = if n <= QMIN_EVIDENCE_MAX_TASKS {
                Infeasible::QMin {
                    q_min: bottleneck_value(app),
                }
            } else {
                Infeasible::Blocked {
                    task: first_blocked_task(app, q_max),
                }
            };
            Ok(Feasibility::Infeasible(evidence))
        }
    }
}

fn first_blocked_task(app: &Application, q_max: f64) -> usize {
    let n = app.n_tasks();
    for i in 1..=n {
        let mut sweep = RowSweep::new(app, i);
        let mut any = false;
        for _ in i..=n {
            sweep.advance();
            if sweep.exec_lower_bound() > q_max {
                break;
            }
            if sweep.energy() <= q_max {
                any = true;
                break;
            }
        }
        if !any {
            return i;
        }
    }
    // Every task admits some burst, so forward progress always reaches the
    // final state; infeasibility implies some empty row above.
    unreachable!("infeasible DP implies a task with no burst under the bound")
}

/// Bottleneck DP over the complete (unpruned) state graph: minimizes the
/// maximum edge along the path.
fn bottleneck_value(app: &Application) -> f64 {
    let n = app.n_tasks();
    let mut widest = vec![f64::INFINITY; n + 1];
    let mut bursts = vec![u32::MAX; n + 1];
    widest[0] = 0.0;
    bursts[0] = 0;
    for i in 1..=n {
        let mut sweep = RowSweep::new(app, i);
        for j in i..=n {
            sweep.advance();
            let cand = widest[i - 1].max(sweep.energy());
            let cand_bursts = bursts[i - 1] + 1;
            if better(cand, cand_bursts, widest[j], bursts[j]) {
                widest[j] = cand;
                bursts[j] = cand_bursts;
            }
        }
    }
    widest[n]
}

/// `Q_min` and its witness partition.
#[derive(Clone, Debug)]
pub struct QMinResult {
    pub q_min: f64,
    pub solution: Solution,
}

/// Smallest storage bound under which the application can run, computed as a
/// minimax path over all bursts, followed by an ordinary partitioning run at
/// that bound for the witness. Merging tasks can retire transfer costs, so
/// this can undercut the largest single-task burst.
pub fn q_min(app: &Application) -> Result<QMinResult, Error> {
    let n = app.n_tasks();
    if n == 0 {
        return Err(Error::EmptyApplication);
    }
    let value = bottleneck_value(app);
    let solution = if value > 0.0 {
        match optimal_partition(app, value)? {
            Feasibility::Feasible(s) => s,
            Feasibility::Infeasible(_) => {
                unreachable!("a bound equal to Q_min always admits its witness partition")
            }
        }
    } else {
        // Degenerate all-zero-cost application: any partition works.
        let partition = Partition::whole(n);
        let report = evaluate_partition(app, &partition);
        Solution { partition, report }
    };
    Ok(QMinResult {
        q_min: value,
        solution,
    })
}

/// What [`brute_force`] optimizes.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Objective {
    TotalEnergy,
    MaxBurst,
}

/// Exhaustive search over all `2^(n-1)` partitions; the test oracle for the
/// DP solvers. Partitions with any burst above `q_max` are skipped (pass
/// `f64::INFINITY` for an unconstrained search). Returns `None` when no
/// partition fits.
pub fn brute_force(
    app: &Application,
    q_max: f64,
    objective: Objective,
) -> Result<Option<(f64, Partition)>, Error> {
    let n = app.n_tasks();
    if n > BRUTE_FORCE_MAX_TASKS {
        return Err(Error::BruteForceTooLarge {
            n,
            limit: BRUTE_FORCE_MAX_TASKS,
        });
    }
    if q_max.is_nan() || q_max <= 0.0 {
        return Err(Error::InvalidQMax(q_max));
    }
    if n == 0 {
        return Ok(Some((0.0, Partition::whole(0))));
    }
    let mut best: Option<(f64, u32, Partition)> = None;
    for mask in 0u64..(1u64 << (n - 1)) {
        let mut value = 0.0f64;
        let mut n_bursts = 0u32;
        let mut start = 1usize;
        let mut feasible = true;
        let mut bursts = Vec::new();
        for end in 1..=n {
            let boundary = end == n || mask & (1 << (end - 1)) != 0;
            if !boundary {
                continue;
            }
            let energy = burst_energy(app, start, end)
                .expect("enumerated ranges are valid")
                .energy;
            if energy > q_max {
                feasible = false;
                break;
            }
            match objective {
                Objective::TotalEnergy => value += energy,
                Objective::MaxBurst => value = value.max(energy),
            }
            n_bursts += 1;
            bursts.push((start, end));
            start = end + 1;
        }
        if !feasible {
            continue;
        }
        let replace = match &best {
            None => true,
            Some((bv, bb, _)) => better(value, n_bursts, *bv, *bb),
        };
        if replace {
            best = Some((
                value,
                n_bursts,
                Partition::new(bursts, n).expect("enumerated partition tiles the sequence"),
            ));
        }
    }
    Ok(best.map(|(v, _, p)| (v, p)))
}

/// Transfer accounting for the one-task-per-burst baseline.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SingleTaskMode {
    /// Dependency-tracked transfers, i.e. the ordinary burst cost model.
    Optimized,
    /// Every burst saves and restores all packets live across its start
    /// boundary, dependencies ignored.
    RetainLive,
    /// Every burst saves and restores every packet in the application; the
    /// crude upper bound.
    RetainTotal,
}

/// One burst per task. The retain modes reproduce naive state retention
/// where a burst's load and store volume is the live application state
/// rather than what its task actually touches.
pub fn baseline_single_task(app: &Application, mode: SingleTaskMode) -> Solution {
    let n = app.n_tasks();
    let partition = Partition::single_tasks(n);
    if matches!(mode, SingleTaskMode::Optimized) {
        let report = evaluate_partition(app, &partition);
        return Solution { partition, report };
    }
    let model = app.model();
    let mut per_burst = Vec::with_capacity(n);
    let mut e_read_total = 0.0;
    let mut e_write_total = 0.0;
    let mut bytes_loaded = 0u64;
    let mut bytes_stored = 0u64;
    let mut q_needed = 0.0f64;
    for k in 1..=n {
        let mut e_r = 0.0;
        let mut e_w = 0.0;
        let mut bytes = 0u64;
        for p in app.packets() {
            let retained = match mode {
                SingleTaskMode::RetainTotal => true,
                SingleTaskMode::RetainLive => {
                    let written_before = p.writer.is_some_and(|w| w < k);
                    let used_later = app
                        .last_use_ever(p.id)
                        .expect("packet id from this app")
                        .is_some_and(|l| l >= k);
                    written_before && used_later
                }
                SingleTaskMode::Optimized => unreachable!(),
            };
            if retained {
                e_r += e_read(model, p.size);
                e_w += e_write(model, p.size);
                bytes += p.size;
            }
        }
        let energy = model.startup + e_r + app.task(k).energy + e_w;
        e_read_total += e_r;
        e_write_total += e_w;
        bytes_loaded += bytes;
        bytes_stored += bytes;
        q_needed = q_needed.max(energy);
        per_burst.push(BurstRecord {
            i: k,
            j: k,
            energy,
            bytes_loaded: bytes,
            bytes_stored: bytes,
        });
    }
    let e_app = app.e_app();
    let e_startup_total = model.startup * n as f64;
    let report = PartitionReport {
        n_bursts: n,
        e_startup_total,
        e_read_total,
        e_write_total,
        e_app,
        e_total: e_startup_total + e_read_total + e_write_total + e_app,
        bytes_loaded,
        bytes_stored,
        q_needed,
        per_burst,
    };
    Solution { partition, report }
}

/// Everything in one burst: zero NVM traffic, maximal storage requirement.
pub fn baseline_whole(app: &Application) -> Solution {
    let partition = Partition::whole(app.n_tasks());
    let report = evaluate_partition(app, &partition);
    Solution { partition, report }
}

/// Bound grid for [`sweep`].
#[derive(Clone, Debug)]
pub enum SweepGrid {
    Explicit(Vec<f64>),
    /// Log-spaced from `Q_min` to `1.05 * E<1,n>`, endpoints included.
    Auto {
        points: usize,
    },
}

/// One sweep sample: the bound and the optimal solution, or `None` below
/// `Q_min`.
#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub q_max: f64,
    pub result: Option<Solution>,
}

/// Runs [`optimal_partition`] over a grid of bounds. Points are evaluated in
/// parallel; output order matches the grid and is independent of the worker
/// count.
pub fn sweep(app: &Application, grid: &SweepGrid) -> Result<Vec<SweepPoint>, Error> {
    let qs: Vec<f64> = match grid {
        SweepGrid::Explicit(values) => {
            for &q in values {
                if !q.is_finite() || q <= 0.0 {
                    return Err(Error::InvalidQMax(q));
                }
            }
            values.clone()
        }
        SweepGrid::Auto { points } => auto_grid(app, *points)?,
    };
    qs.par_iter()
        .map(|&q| {
            Ok(SweepPoint {
                q_max: q,
                result: optimal_partition(app, q)?.feasible(),
            })
        })
        .collect()
}

fn auto_grid(app: &Application, points: usize) -> Result<Vec<f64>, Error> {
    let n = app.n_tasks();
    let lo = q_min(app)?.q_min;
    let hi = burst_energy(app, 1, n)?.energy * 1.05;
    let points = points.max(2);
    let mut qs = Vec::with_capacity(points);
    qs.push(lo);
    if lo > 0.0 && hi > lo {
        let (ll, lh) = (lo.ln(), hi.ln());
        for k in 1..points - 1 {
            let f = k as f64 / (points - 1) as f64;
            qs.push((ll + f * (lh - ll)).exp());
        }
    } else {
        for k in 1..points - 1 {
            let f = k as f64 / (points - 1) as f64;
            qs.push(lo + f * (hi - lo));
        }
    }
    qs.push(hi);
    Ok(qs)
}

/// Burst edges over the power-off states `s_0..s_n`, built from the feasible
/// entries of a cost table.
#[derive(Clone, Debug)]
pub struct StateGraph {
    n_states: usize,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl StateGraph {
    pub fn n_states(&self) -> usize {
        self.n_states
    }

    /// Outgoing edges of state `s` as `(target state, burst energy)`.
    pub fn edges_from(&self, s: usize) -> &[(usize, f64)] {
        &self.adjacency[s]
    }

    pub fn n_edges(&self) -> usize {
        self.adjacency.iter().map(|a| a.len()).sum()
    }
}

/// Edge `(i-1) -> j` exists iff the table holds a feasible entry `<i, j>`.
pub fn state_graph(table: &CostTable) -> StateGraph {
    let n_states = table.n_tasks() + 1;
    let mut adjacency = vec![Vec::new(); n_states];
    for (i, j, entry) in table.iter() {
        if entry.feasible {
            adjacency[i - 1].push((j, entry.energy));
        }
    }
    StateGraph {
        n_states,
        adjacency,
    }
}

/// Serializes a report's bursts, one per line:
/// `burst <k>: tasks <i>..<j> energy_uJ=<e> load_B=<x> store_B=<y>`.
pub fn partition_to_lines(report: &PartitionReport) -> String {
    let mut out = String::new();
    for (idx, b) in report.per_burst.iter().enumerate() {
        out.push_str(&format!(
            "burst {}: tasks {}..{} energy_uJ={} load_B={} store_B={}\n",
            idx + 1,
            b.i,
            b.j,
            b.energy,
            b.bytes_loaded,
            b.bytes_stored
        ));
    }
    out
}

/// Parses burst lines back into a partition. Energy and byte fields are
/// ignored; only the task ranges matter. Blank lines and `#` comments are
/// skipped.
pub fn partition_from_lines(text: &str, n_tasks: usize) -> Result<Partition, Error> {
    let mut bursts = Vec::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() < 4 || tokens[0] != "burst" || tokens[2] != "tasks" {
            return Err(Error::InvalidPartition(format!(
                "expected 'burst <k>: tasks <i>..<j> ...', got '{line}'"
            )));
        }
        let range = tokens[3];
        let Some((i_s, j_s)) = range.split_once("..") else {
            return Err(Error::InvalidPartition(format!("bad task range '{range}'")));
        };
        let (Ok(i), Ok(j)) = (i_s.parse::<usize>(), j_s.parse::<usize>()) else {
            return Err(Error::InvalidPartition(format!("bad task range '{range}'")));
        };
        bursts.push((i, j));
    }
    Partition::new(bursts, n_tasks)
}
