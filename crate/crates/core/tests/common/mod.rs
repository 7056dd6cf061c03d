//! Shared oracle helpers for the integration suites: straight-off-the-
//! definition reimplementations that deliberately avoid the incremental
//! sweep machinery used by the library.

// Each integration test target compiles its own copy and uses a subset.
#![allow(dead_code)]

use julienne_core::bench::{gen_synthetic, BenchSpec, RandomParams};
use julienne_core::{e_read, e_write, Application, PacketId, Partition};

pub fn assert_rel(a: f64, b: f64, tol: f64, what: &str) {
    let scale = a.abs().max(b.abs()).max(1e-300);
    assert!(
        (a - b).abs() / scale < tol,
        "{what}: {a} vs {b} (rel err {})",
        (a - b).abs() / scale
    );
}

/// Last use of `p` strictly before task `j`, by linear scan over the tasks.
pub fn scan_last_use(app: &Application, p: PacketId, j: usize) -> Option<usize> {
    let mut last = None;
    for task in app.tasks() {
        if task.index >= j {
            break;
        }
        if task.reads.contains(&p) || task.writes.contains(&p) {
            last = Some(task.index);
        }
    }
    last
}

pub fn scan_last_use_ever(app: &Application, p: PacketId) -> Option<usize> {
    scan_last_use(app, p, app.n_tasks() + 1)
}

/// Burst energy evaluated directly from its definition.
pub fn naive_burst_energy(app: &Application, i: usize, j: usize) -> f64 {
    let m = app.model();
    let mut e = m.startup;
    for k in i..=j {
        let task = app.task(k);
        for &p in &task.reads {
            let loaded = match scan_last_use(app, p, k) {
                Some(prev) => prev < i,
                None => true,
            };
            if loaded {
                e += e_read(m, app.packet(p).size);
            }
        }
        e += task.energy;
        for &p in &task.writes {
            if scan_last_use_ever(app, p).is_some_and(|l| l > j) {
                e += e_write(m, app.packet(p).size);
            }
        }
    }
    e
}

pub fn naive_partition_energy(app: &Application, partition: &Partition) -> f64 {
    partition
        .bursts()
        .iter()
        .map(|&(i, j)| naive_burst_energy(app, i, j))
        .sum()
}

pub fn random_app(seed: u64, tasks: usize) -> Application {
    gen_synthetic(&BenchSpec::Random(RandomParams {
        tasks,
        seed,
        ..RandomParams::default()
    }))
    .expect("valid random spec")
    .app
}
