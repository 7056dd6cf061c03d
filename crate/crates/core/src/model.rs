//! Domain model: tasks, packets, the NVM energy model, partitions, and the
//! packet-liveness lookups shared by the cost and solver code.
//!
//! Task indices are 1-based throughout, matching the burst notation
//! `<i, j>` used everywhere else in the crate. Packet ids are dense and
//! assigned in declaration order.

use crate::Error;
use serde::Serialize;
use std::fmt;

/// Dense index of a packet within an [`Application`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PacketId(pub u32);

impl PacketId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for PacketId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

/// A fixed-size datum produced by exactly one task and consumed by zero or
/// more later tasks. Size zero is allowed and models a pure ordering edge.
#[derive(Clone, Debug, PartialEq)]
pub struct Packet {
    pub id: PacketId,
    pub name: String,
    /// Size in bytes.
    pub size: u64,
    /// 1-based index of the task that produces this packet. `None` only for
    /// invalid applications (a packet that is read but never written); such
    /// applications are flagged by [`validate`].
    pub writer: Option<usize>,
}

/// One atomically executed kernel call.
#[derive(Clone, Debug, PartialEq)]
pub struct Task {
    /// 1-based position in the execution sequence.
    pub index: usize,
    pub name: String,
    /// Execution energy in uJ.
    pub energy: f64,
    pub reads: Vec<PacketId>,
    pub writes: Vec<PacketId>,
}

/// Startup cost and the linear NVM transfer model.
///
/// Per-byte coefficients are kept in nJ/byte as declared in `.adl` files;
/// [`e_read`]/[`e_write`] convert to uJ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyModel {
    /// Fixed boot-up cost per burst, uJ. Also covers burst-index bookkeeping.
    pub startup: f64,
    pub read_base: f64,
    pub read_per_byte_nj: f64,
    pub write_base: f64,
    pub write_per_byte_nj: f64,
}

impl EnergyModel {
    pub const ZERO: EnergyModel = EnergyModel {
        startup: 0.0,
        read_base: 0.0,
        read_per_byte_nj: 0.0,
        write_base: 0.0,
        write_per_byte_nj: 0.0,
    };

    /// Characterized external-FRAM model used by the replica generators:
    /// 9 uJ boot-up, reads 1.3 uJ + 7.6 nJ/B, writes 0.9 uJ + 6.2 nJ/B.
    pub fn fram() -> EnergyModel {
        EnergyModel {
            startup: 9.0,
            read_base: 1.3,
            read_per_byte_nj: 7.6,
            write_base: 0.9,
            write_per_byte_nj: 6.2,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.startup == 0.0
            && self.read_base == 0.0
            && self.read_per_byte_nj == 0.0
            && self.write_base == 0.0
            && self.write_per_byte_nj == 0.0
    }
}

const UJ_PER_NJ: f64 = 1e-3;

/// Energy in uJ to load a packet of `size` bytes from NVM.
pub fn e_read(model: &EnergyModel, size: u64) -> f64 {
    model.read_base + size as f64 * model.read_per_byte_nj * UJ_PER_NJ
}

/// Energy in uJ to store a packet of `size` bytes to NVM.
pub fn e_write(model: &EnergyModel, size: u64) -> f64 {
    model.write_base + size as f64 * model.write_per_byte_nj * UJ_PER_NJ
}

/// Packet declaration used to build an [`Application`].
#[derive(Clone, Debug)]
pub struct PacketDef {
    pub name: String,
    pub size: u64,
}

/// Task declaration used to build an [`Application`]. Packet ids refer to the
/// positions in the packet declaration list.
#[derive(Clone, Debug)]
pub struct TaskDef {
    pub name: String,
    pub energy: f64,
    pub reads: Vec<PacketId>,
    pub writes: Vec<PacketId>,
}

/// Per-task acceleration data for burst-cost evaluation.
///
/// All of the cost code sums packet transfer costs through these arrays, so
/// every evaluation route (single burst, incremental row scan, table build)
/// performs the identical floating-point operation sequence and produces
/// bit-identical energies.
#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct TaskHot {
    pub exec: f64,
    /// Reads sorted by (last use before this task, packet id). A read must be
    /// loaded from NVM exactly when its previous use lies before the burst
    /// start, so for a given start the loaded reads form a prefix.
    pub load_prev: Vec<u32>,
    pub load_cost_pfx: Vec<f64>,
    pub load_bytes_pfx: Vec<u64>,
    pub load_count_pfx: Vec<u32>,
    /// Reads that are the final use of their packet, sorted by (writer,
    /// packet id). Their store cost is retired when the burst covers both the
    /// writer and this task; for a given start the retired entries form a
    /// suffix.
    pub dead_writer: Vec<u32>,
    pub dead_cost_sfx: Vec<f64>,
    pub dead_bytes_sfx: Vec<u64>,
    pub dead_count_sfx: Vec<u32>,
    /// Aggregate store cost of this task's writes that any later task uses.
    pub wsum_cost: f64,
    pub wsum_bytes: u64,
    pub wsum_count: u32,
}

/// An immutable task sequence plus packet table, energy model, and
/// precomputed last-use lookups.
#[derive(Clone, Debug)]
pub struct Application {
    tasks: Vec<Task>,
    packets: Vec<Packet>,
    model: EnergyModel,
    /// Per packet: ascending 1-based indices of every task reading or
    /// writing it.
    uses: Vec<Vec<usize>>,
    hot: Vec<TaskHot>,
}

impl PartialEq for Application {
    fn eq(&self, other: &Self) -> bool {
        self.tasks == other.tasks && self.packets == other.packets && self.model == other.model
    }
}

impl Application {
    /// Builds an application from declarations. Packet writers and liveness
    /// tables are derived here. Construction is total: invariant violations
    /// (duplicate writers, reads before writes, unwritten packets) are left
    /// to [`validate`] rather than rejected.
    ///
    /// Panics if a task references a packet id outside the declaration list;
    /// that is a programming error, not an input error.
    pub fn from_parts(model: EnergyModel, packets: Vec<PacketDef>, tasks: Vec<TaskDef>) -> Self {
        let n_packets = packets.len();
        let mut ptab: Vec<Packet> = packets
            .into_iter()
            .enumerate()
            .map(|(idx, def)| Packet {
                id: PacketId(idx as u32),
                name: def.name,
                size: def.size,
                writer: None,
            })
            .collect();

        let tasks: Vec<Task> = tasks
            .into_iter()
            .enumerate()
            .map(|(pos, def)| Task {
                index: pos + 1,
                name: def.name,
                energy: def.energy,
                reads: dedup_preserving(def.reads),
                writes: dedup_preserving(def.writes),
            })
            .collect();

        let mut uses: Vec<Vec<usize>> = vec![Vec::new(); n_packets];
        for task in &tasks {
            for &p in task.reads.iter().chain(task.writes.iter()) {
                assert!(p.index() < n_packets, "packet id {p} out of range");
            }
            for &p in &task.writes {
                if ptab[p.index()].writer.is_none() {
                    ptab[p.index()].writer = Some(task.index);
                }
            }
            for &p in &task.reads {
                push_use(&mut uses[p.index()], task.index);
            }
            for &p in &task.writes {
                push_use(&mut uses[p.index()], task.index);
            }
        }
        for u in &mut uses {
            u.sort_unstable();
            u.dedup();
        }

        let mut app = Application {
            tasks,
            packets: ptab,
            model,
            uses,
            hot: Vec::new(),
        };
        app.hot = app.build_hot();
        app
    }

    fn build_hot(&self) -> Vec<TaskHot> {
        self.tasks
            .iter()
            .map(|task| {
                let k = task.index;
                let mut loads: Vec<(u32, PacketId)> = task
                    .reads
                    .iter()
                    .map(|&p| {
                        // Previous use strictly before k; 0 when none (then the
                        // packet is loaded regardless of the burst start).
                        let prev = self.last_use_unchecked(p, k).unwrap_or(0);
                        (prev as u32, p)
                    })
                    .collect();
                loads.sort_unstable();
                let mut load_cost_pfx = Vec::with_capacity(loads.len() + 1);
                let mut load_bytes_pfx = Vec::with_capacity(loads.len() + 1);
                let mut load_count_pfx = Vec::with_capacity(loads.len() + 1);
                load_cost_pfx.push(0.0);
                load_bytes_pfx.push(0);
                load_count_pfx.push(0);
                for &(_, p) in &loads {
                    let size = self.packets[p.index()].size;
                    load_cost_pfx.push(load_cost_pfx.last().unwrap() + e_read(&self.model, size));
                    load_bytes_pfx.push(load_bytes_pfx.last().unwrap() + size);
                    load_count_pfx.push(load_count_pfx.last().unwrap() + 1);
                }

                let mut dead: Vec<(u32, PacketId)> = task
                    .reads
                    .iter()
                    .filter(|&&p| self.uses[p.index()].last() == Some(&k))
                    .filter_map(|&p| self.packets[p.index()].writer.map(|w| (w as u32, p)))
                    .collect();
                dead.sort_unstable();
                let mut dead_cost_sfx = vec![0.0; dead.len() + 1];
                let mut dead_bytes_sfx = vec![0u64; dead.len() + 1];
                let mut dead_count_sfx = vec![0u32; dead.len() + 1];
                for m in (0..dead.len()).rev() {
                    let size = self.packets[dead[m].1.index()].size;
                    dead_cost_sfx[m] = dead_cost_sfx[m + 1] + e_write(&self.model, size);
                    dead_bytes_sfx[m] = dead_bytes_sfx[m + 1] + size;
                    dead_count_sfx[m] = dead_count_sfx[m + 1] + 1;
                }

                let mut wsum_cost = 0.0;
                let mut wsum_bytes = 0u64;
                let mut wsum_count = 0u32;
                for &p in &task.writes {
                    // A write only ever needs storing if some later task uses it.
                    if self.uses[p.index()].last() > Some(&k) {
                        let size = self.packets[p.index()].size;
                        wsum_cost += e_write(&self.model, size);
                        wsum_bytes += size;
                        wsum_count += 1;
                    }
                }

                TaskHot {
                    exec: task.energy,
                    load_prev: loads.iter().map(|&(prev, _)| prev).collect(),
                    load_cost_pfx,
                    load_bytes_pfx,
                    load_count_pfx,
                    dead_writer: dead.iter().map(|&(w, _)| w).collect(),
                    dead_cost_sfx,
                    dead_bytes_sfx,
                    dead_count_sfx,
                    wsum_cost,
                    wsum_bytes,
                    wsum_count,
                }
            })
            .collect()
    }

    pub fn n_tasks(&self) -> usize {
        self.tasks.len()
    }

    pub fn n_packets(&self) -> usize {
        self.packets.len()
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn packets(&self) -> &[Packet] {
        &self.packets
    }

    pub fn model(&self) -> &EnergyModel {
        &self.model
    }

    /// Task by 1-based index.
    pub fn task(&self, index: usize) -> &Task {
        &self.tasks[index - 1]
    }

    pub fn packet(&self, id: PacketId) -> &Packet {
        &self.packets[id.index()]
    }

    pub fn packet_by_name(&self, name: &str) -> Option<&Packet> {
        self.packets.iter().find(|p| p.name == name)
    }

    /// Total execution energy, uJ, summed in task order.
    pub fn e_app(&self) -> f64 {
        self.tasks.iter().map(|t| t.energy).sum()
    }

    pub(crate) fn hot(&self, index: usize) -> &TaskHot {
        &self.hot[index - 1]
    }

    fn check_packet(&self, p: PacketId) -> Result<(), Error> {
        if p.index() < self.packets.len() {
            Ok(())
        } else {
            Err(Error::UnknownPacket { id: p.0 })
        }
    }

    fn last_use_unchecked(&self, p: PacketId, j: usize) -> Option<usize> {
        let uses = &self.uses[p.index()];
        let m = uses.partition_point(|&u| u < j);
        if m == 0 {
            None
        } else {
            Some(uses[m - 1])
        }
    }

    /// Highest task index strictly below `j` that reads or writes `p`.
    /// `j = n_tasks + 1` queries the application-wide final use.
    pub fn last_use(&self, p: PacketId, j: usize) -> Result<Option<usize>, Error> {
        self.check_packet(p)?;
        let max = self.tasks.len() + 1;
        if j < 1 || j > max {
            return Err(Error::LastUseBound { j, max });
        }
        Ok(self.last_use_unchecked(p, j))
    }

    /// Index of the last task in the application that reads or writes `p`.
    pub fn last_use_ever(&self, p: PacketId) -> Result<Option<usize>, Error> {
        self.check_packet(p)?;
        Ok(self.uses[p.index()].last().copied())
    }

    /// NVM transfer sets of task `k` when executed inside the burst
    /// `<i, j>`: the packets `t_k` must load (no use of them since the burst
    /// started) and the packets it must store (some task after the burst
    /// still uses them). Both sets are returned sorted by packet id.
    pub fn transfer_sets(
        &self,
        i: usize,
        j: usize,
        k: usize,
    ) -> Result<(Vec<PacketId>, Vec<PacketId>), Error> {
        let n = self.tasks.len();
        if i < 1 || j > n || i > j {
            return Err(Error::BurstRange { i, j, n });
        }
        if k < i || k > j {
            return Err(Error::TaskIndexRange { index: k, max: n });
        }
        let task = &self.tasks[k - 1];
        let mut loads: Vec<PacketId> = task
            .reads
            .iter()
            .copied()
            .filter(|&p| match self.last_use_unchecked(p, k) {
                Some(prev) => prev < i,
                None => true,
            })
            .collect();
        let mut stores: Vec<PacketId> = task
            .writes
            .iter()
            .copied()
            .filter(|&p| self.uses[p.index()].last().copied().unwrap_or(0) > j)
            .collect();
        loads.sort_unstable();
        stores.sort_unstable();
        Ok((loads, stores))
    }
}

fn push_use(uses: &mut Vec<usize>, index: usize) {
    if uses.last() != Some(&index) {
        uses.push(index);
    }
}

fn dedup_preserving(ids: Vec<PacketId>) -> Vec<PacketId> {
    let mut seen = Vec::new();
    for id in ids {
        if !seen.contains(&id) {
            seen.push(id);
        }
    }
    seen
}

/// Rules checked by [`validate`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DiagnosticRule {
    DuplicateWriter,
    ReadBeforeWrite,
    NeverWritten,
    ReadWriteOverlap,
}

impl fmt::Display for DiagnosticRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DiagnosticRule::DuplicateWriter => "duplicate-writer",
            DiagnosticRule::ReadBeforeWrite => "read-before-write",
            DiagnosticRule::NeverWritten => "never-written",
            DiagnosticRule::ReadWriteOverlap => "read-write-overlap",
        };
        f.write_str(s)
    }
}

/// One invariant violation, naming the rule and the task/packet involved.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostic {
    pub rule: DiagnosticRule,
    pub packet: Option<String>,
    pub task: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.message)
    }
}

/// Checks the packet-model invariants: every packet has exactly one writer,
/// every read happens strictly after the write, no task reads its own output,
/// and no packet is read without ever being written.
///
/// Returns an empty list iff the application is well formed.
pub fn validate(app: &Application) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for packet in app.packets() {
        let writers: Vec<usize> = app
            .tasks()
            .iter()
            .filter(|t| t.writes.contains(&packet.id))
            .map(|t| t.index)
            .collect();
        if writers.len() > 1 {
            out.push(Diagnostic {
                rule: DiagnosticRule::DuplicateWriter,
                packet: Some(packet.name.clone()),
                task: Some(writers[1]),
                message: format!(
                    "packet {} written by tasks {}",
                    packet.name,
                    writers
                        .iter()
                        .map(|w| w.to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
            });
        }
        let readers: Vec<usize> = app
            .tasks()
            .iter()
            .filter(|t| t.reads.contains(&packet.id))
            .map(|t| t.index)
            .collect();
        if writers.is_empty() && !readers.is_empty() {
            out.push(Diagnostic {
                rule: DiagnosticRule::NeverWritten,
                packet: Some(packet.name.clone()),
                task: Some(readers[0]),
                message: format!(
                    "packet {} read at task {} but never written",
                    packet.name, readers[0]
                ),
            });
        }
        if let Some(&w) = writers.first() {
            for &r in &readers {
                if r == w {
                    out.push(Diagnostic {
                        rule: DiagnosticRule::ReadWriteOverlap,
                        packet: Some(packet.name.clone()),
                        task: Some(r),
                        message: format!(
                            "packet {} both read and written by task {}",
                            packet.name, r
                        ),
                    });
                } else if r < w {
                    out.push(Diagnostic {
                        rule: DiagnosticRule::ReadBeforeWrite,
                        packet: Some(packet.name.clone()),
                        task: Some(r),
                        message: format!(
                            "read-before-write: packet {} read at task {} but written at task {}",
                            packet.name, r, w
                        ),
                    });
                }
            }
        }
    }
    out
}

/// A division of the task sequence `1..=n` into contiguous bursts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    bursts: Vec<(usize, usize)>,
}

impl Partition {
    /// Validates contiguity and coverage: bursts must tile `1..=n_tasks`.
    pub fn new(bursts: Vec<(usize, usize)>, n_tasks: usize) -> Result<Self, Error> {
        if n_tasks == 0 {
            if bursts.is_empty() {
                return Ok(Partition { bursts });
            }
            return Err(Error::InvalidPartition(
                "empty application admits only the empty partition".into(),
            ));
        }
        if bursts.is_empty() {
            return Err(Error::InvalidPartition("no bursts".into()));
        }
        let mut expect = 1;
        for &(i, j) in &bursts {
            if i != expect || j < i || j > n_tasks {
                return Err(Error::InvalidPartition(format!(
                    "burst {i}..{j} does not continue at task {expect} within 1..={n_tasks}"
                )));
            }
            expect = j + 1;
        }
        if expect != n_tasks + 1 {
            return Err(Error::InvalidPartition(format!(
                "bursts end at task {} instead of {}",
                expect - 1,
                n_tasks
            )));
        }
        Ok(Partition { bursts })
    }

    /// Builds a partition from the sorted interior boundaries: `boundaries`
    /// lists the last task of every burst except the final one.
    pub fn from_boundaries(boundaries: &[usize], n_tasks: usize) -> Result<Self, Error> {
        let mut bursts = Vec::with_capacity(boundaries.len() + 1);
        let mut start = 1;
        for &b in boundaries {
            bursts.push((start, b));
            start = b + 1;
        }
        if n_tasks > 0 {
            bursts.push((start, n_tasks));
        }
        Partition::new(bursts, n_tasks)
    }

    /// One burst per task.
    pub fn single_tasks(n_tasks: usize) -> Self {
        Partition {
            bursts: (1..=n_tasks).map(|k| (k, k)).collect(),
        }
    }

    /// Everything in one burst.
    pub fn whole(n_tasks: usize) -> Self {
        Partition {
            bursts: if n_tasks == 0 {
                Vec::new()
            } else {
                vec![(1, n_tasks)]
            },
        }
    }

    pub fn bursts(&self) -> &[(usize, usize)] {
        &self.bursts
    }

    pub fn n_bursts(&self) -> usize {
        self.bursts.len()
    }

    /// Interior boundaries (last task of each burst except the final one).
    pub fn boundaries(&self) -> Vec<usize> {
        self.bursts
            .iter()
            .take(self.bursts.len().saturating_sub(1))
            .map(|&(_, j)| j)
            .collect()
    }
}

/// Energy and traffic of one burst inside a [`PartitionReport`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BurstRecord {
    pub i: usize,
    pub j: usize,
    pub energy: f64,
    pub bytes_loaded: u64,
    pub bytes_stored: u64,
}

/// Figures of merit for a partition:
/// `e_total = e_startup_total + e_read_total + e_write_total + e_app`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionReport {
    pub n_bursts: usize,
    pub e_startup_total: f64,
    pub e_read_total: f64,
    pub e_write_total: f64,
    pub e_app: f64,
    pub e_total: f64,
    pub bytes_loaded: u64,
    pub bytes_stored: u64,
    /// Largest single-burst energy: the storage capacity this partition needs.
    pub q_needed: f64,
    pub per_burst: Vec<BurstRecord>,
}
