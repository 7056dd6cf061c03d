//! Burst energy evaluation.
//!
//! The energy of a burst covering tasks `i..=j` is
//!
//! ```text
//! E<i,j> = E_s + sum over k in i..=j of
//!              ( loads of t_k not already resident
//!              + E_task,k
//!              + stores of t_k still needed after j )
//! ```
//!
//! Everything here evaluates that formula through [`RowSweep`], an
//! incremental scan that holds the burst start fixed and extends the end one
//! task at a time. For a fixed start the loaded reads of each task form a
//! prefix of its (last-use sorted) read list and the retired stores form a
//! suffix of its (writer sorted) dying-read list, so each extension costs
//! O(log reads) via the prefix sums precomputed on the application. The
//! store term is kept as `pending_writes - retired`, both append-only, which
//! makes a from-scratch [`burst_energy`] call and an incremental table row
//! execute the identical float operation sequence: the two always agree
//! bit for bit.

use crate::model::{Application, BurstRecord, Partition, PartitionReport};
use crate::Error;
use rayon::prelude::*;
use serde::Serialize;
use std::io::{self, Write};

/// Energy and NVM traffic of one burst.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BurstCost {
    pub i: usize,
    pub j: usize,
    pub energy: f64,
    pub bytes_loaded: u64,
    pub bytes_stored: u64,
}

/// Incremental burst-cost scan for a fixed start task.
///
/// After `n` calls to [`RowSweep::advance`] the sweep describes the burst
/// `<start, start + n - 1>`.
pub struct RowSweep<'a> {
    app: &'a Application,
    start: usize,
    end: usize,
    /// E_s + loads + execution, appended in task order.
    base: f64,
    /// E_s + execution only: the pruning lower bound.
    exec_lb: f64,
    read_sum: f64,
    /// Store costs of all writes in the burst that any later task uses.
    wsum: f64,
    /// Store costs retired because the final consumer joined the burst.
    dead: f64,
    loaded_bytes: u64,
    wsum_bytes: u64,
    dead_bytes: u64,
    wsum_count: u32,
    dead_count: u32,
}

impl<'a> RowSweep<'a> {
    /// Starts an empty sweep for bursts beginning at 1-based task `start`.
    pub fn new(app: &'a Application, start: usize) -> Self {
        let startup = app.model().startup;
        RowSweep {
            app,
            start,
            end: start - 1,
            base: startup,
            exec_lb: startup,
            read_sum: 0.0,
            wsum: 0.0,
            dead: 0.0,
            loaded_bytes: 0,
            wsum_bytes: 0,
            dead_bytes: 0,
            wsum_count: 0,
            dead_count: 0,
        }
    }

    /// Extends the burst by its next task. Panics past the end of the
    /// application.
    pub fn advance(&mut self) {
        self.end += 1;
        let k = self.end;
        assert!(k <= self.app.n_tasks(), "sweep past last task");
        let hot = self.app.hot(k);
        let i = self.start as u32;

        // Loads: reads whose previous use lies before the burst start.
        let m = hot.load_prev.partition_point(|&prev| prev < i);
        self.base += hot.load_cost_pfx[m];
        self.read_sum += hot.load_cost_pfx[m];
        self.loaded_bytes += hot.load_bytes_pfx[m];

        self.base += hot.exec;
        self.exec_lb += hot.exec;

        // Writes that some later task uses; retired below once their final
        // consumer is inside the burst.
        self.wsum += hot.wsum_cost;
        self.wsum_bytes += hot.wsum_bytes;
        self.wsum_count += hot.wsum_count;

        // Reads that are their packet's final use, when the writer is also
        // inside the burst.
        let d = hot.dead_writer.partition_point(|&w| w < i);
        self.dead += hot.dead_cost_sfx[d];
        self.dead_bytes += hot.dead_bytes_sfx[d];
        self.dead_count += hot.dead_count_sfx[d];
    }

    pub fn start(&self) -> usize {
        self.start
    }

    /// Current burst end (one less than `start` before the first advance).
    pub fn end(&self) -> usize {
        self.end
    }

    /// `E_s` + execution energy of the covered tasks: a lower bound on the
    /// burst energy used for pruning.
    pub fn exec_lower_bound(&self) -> f64 {
        self.exec_lb
    }

    /// Burst energy `E<start, end>`.
    pub fn energy(&self) -> f64 {
        if self.wsum_count == self.dead_count {
            // No pending stores: the store term is identically zero, not a
            // difference of rounded sums.
            self.base
        } else {
            (self.base + self.wsum) - self.dead
        }
    }

    pub fn e_read(&self) -> f64 {
        self.read_sum
    }

    pub fn e_write(&self) -> f64 {
        if self.wsum_count == self.dead_count {
            0.0
        } else {
            self.wsum - self.dead
        }
    }

    pub fn bytes_loaded(&self) -> u64 {
        self.loaded_bytes
    }

    pub fn bytes_stored(&self) -> u64 {
        self.wsum_bytes - self.dead_bytes
    }

    pub fn cost(&self) -> BurstCost {
        BurstCost {
            i: self.start,
            j: self.end,
            energy: self.energy(),
            bytes_loaded: self.bytes_loaded(),
            bytes_stored: self.bytes_stored(),
        }
    }
}

/// Evaluates `E<i,j>` from scratch.
pub fn burst_energy(app: &Application, i: usize, j: usize) -> Result<BurstCost, Error> {
    let n = app.n_tasks();
    if i < 1 || j > n || i > j {
        return Err(Error::BurstRange { i, j, n });
    }
    let mut sweep = RowSweep::new(app, i);
    for _ in i..=j {
        sweep.advance();
    }
    Ok(sweep.cost())
}

/// One row entry of a [`CostTable`]; the `(i, j)` range is implied by the
/// row start and entry position.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CostEntry {
    pub energy: f64,
    pub bytes_loaded: u64,
    pub bytes_stored: u64,
    /// `energy <= q_max`. Entries whose execution lower bound passed the
    /// pruning check but whose full energy exceeds the bound are kept and
    /// flagged, so the table stays reusable for unbounded queries.
    pub feasible: bool,
}

struct CostRow {
    entries: Vec<CostEntry>,
}

/// All burst energies `E<i,j>` whose execution lower bound
/// `E_s + sum of task energies` does not exceed `q_max`, organized as one
/// contiguous run of ends per start.
pub struct CostTable {
    q_max: f64,
    n_tasks: usize,
    rows: Vec<CostRow>,
}

impl CostTable {
    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    pub fn n_tasks(&self) -> usize {
        self.n_tasks
    }

    pub fn n_entries(&self) -> usize {
        self.rows.iter().map(|r| r.entries.len()).sum()
    }

    /// Entry for burst `<i, j>`, if it was within the pruning horizon.
    pub fn get(&self, i: usize, j: usize) -> Option<&CostEntry> {
        if i < 1 || i > self.n_tasks || j < i {
            return None;
        }
        self.rows[i - 1].entries.get(j - i)
    }

    /// Number of ends covered for row `i`: entries exist for
    /// `j in i .. i + row_len(i)`.
    pub fn row_len(&self, i: usize) -> usize {
        self.rows[i - 1].entries.len()
    }

    /// Iterates all entries as `(i, j, entry)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &CostEntry)> {
        self.rows.iter().enumerate().flat_map(|(row, r)| {
            r.entries
                .iter()
                .enumerate()
                .map(move |(off, e)| (row + 1, row + 1 + off, e))
        })
    }

    /// Debug dump: `i,j,energy_uJ,bytes_loaded,bytes_stored,feasible`.
    pub fn dump_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "i,j,energy_uJ,bytes_loaded,bytes_stored,feasible")?;
        for (i, j, e) in self.iter() {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                i, j, e.energy, e.bytes_loaded, e.bytes_stored, e.feasible
            )?;
        }
        Ok(())
    }
}

/// Builds the pruned burst-cost table: each row `i` extends `j` while the
/// execution lower bound stays within `q_max`. Rows are independent and
/// computed in parallel; the result does not depend on the worker count.
pub fn build_cost_table(app: &Application, q_max: f64) -> Result<CostTable, Error> {
    if !q_max.is_finite() || q_max <= 0.0 {
        return Err(Error::InvalidQMax(q_max));
    }
    let n = app.n_tasks();
    let rows: Vec<CostRow> = (1..=n)
        .into_par_iter()
        .map(|i| {
            let mut sweep = RowSweep::new(app, i);
            let mut entries = Vec::new();
            for _ in i..=n {
                sweep.advance();
                if sweep.exec_lower_bound() > q_max {
                    break;
                }
                let energy = sweep.energy();
                entries.push(CostEntry {
                    energy,
                    bytes_loaded: sweep.bytes_loaded(),
                    bytes_stored: sweep.bytes_stored(),
                    feasible: energy <= q_max,
                });
            }
            CostRow { entries }
        })
        .collect();
    Ok(CostTable {
        q_max,
        n_tasks: n,
        rows,
    })
}

/// Evaluates every burst of a partition and aggregates the figures of merit.
pub fn evaluate_partition(app: &Application, partition: &Partition) -> PartitionReport {
    let mut per_burst = Vec::with_capacity(partition.n_bursts());
    let mut e_read_total = 0.0;
    let mut e_write_total = 0.0;
    let mut bytes_loaded = 0u64;
    let mut bytes_stored = 0u64;
    let mut q_needed: f64 = 0.0;
    for &(i, j) in partition.bursts() {
        let mut sweep = RowSweep::new(app, i);
        for _ in i..=j {
            sweep.advance();
        }
        let energy = sweep.energy();
        e_read_total += sweep.e_read();
        e_write_total += sweep.e_write();
        bytes_loaded += sweep.bytes_loaded();
        bytes_stored += sweep.bytes_stored();
        q_needed = q_needed.max(energy);
        per_burst.push(BurstRecord {
            i,
            j,
            energy,
            bytes_loaded: sweep.bytes_loaded(),
            bytes_stored: sweep.bytes_stored(),
        });
    }
    let e_app = app.e_app();
    let e_startup_total = app.model().startup * partition.n_bursts() as f64;
    PartitionReport {
        n_bursts: partition.n_bursts(),
        e_startup_total,
        e_read_total,
        e_write_total,
        e_app,
        e_total: e_startup_total + e_read_total + e_write_total + e_app,
        bytes_loaded,
        bytes_stored,
        q_needed,
        per_burst,
    }
}
