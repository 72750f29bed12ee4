//! Seeded sweeps over many hosts, written as CSV.
//!
//! Instance `i` of a run seeded with `s` uses the generator seed
//! [`instance_seed`]`(s, i)`, so rows do not depend on the worker count.
//! Rows come out in instance order.

use std::io::Write;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::complete::{find_complete_subdivision, FinderParams};
use crate::exec::{instance_seed, Exec};
use crate::finder::{FinderError, Outcome};
use crate::oracle::ScanTable;
use crate::subdivision::{verify, Subdivision};
use crate::tournament::{generate, Generator, Tournament};
use crate::transitive::{find_one_subdivision, find_tt_len3, TransitiveParams};

pub const CSV_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinderKind {
    Complete,
    Tt3,
    Onesub,
}

impl FinderKind {
    /// `(max_len, exact_len)` every witness of this finder must satisfy.
    pub fn cap(self) -> (usize, Option<usize>) {
        match self {
            FinderKind::Complete | FinderKind::Tt3 => (3, None),
            FinderKind::Onesub => (2, Some(2)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HostKind {
    Random,
    /// Stacked directed triangles over a random tail; produces cut chains.
    Stacked,
    /// Random on even instances, stacked on odd ones.
    Mixed,
}

impl HostKind {
    pub fn generator(self, n: usize, index: u64) -> Generator {
        let stacked = match self {
            HostKind::Random => false,
            HostKind::Stacked => true,
            HostKind::Mixed => index % 2 == 1,
        };
        if stacked {
            let blocks = n / 5;
            Generator::StackedTriangles {
                blocks,
                tail: n - 3 * blocks,
            }
        } else {
            Generator::Random { n }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoundnessConfig {
    pub finder: FinderKind,
    pub host: HostKind,
    pub k: usize,
    pub n: usize,
    pub trials: usize,
    pub scale: f64,
    pub seed: u64,
    pub timings: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoundnessRow {
    pub index: u64,
    pub seed: u64,
    pub generator: String,
    pub n: usize,
    pub k: usize,
    pub found: bool,
    /// `pass`/`fail` for witnesses, empty otherwise.
    pub verify: String,
    pub direct: usize,
    pub l1: usize,
    pub l2: usize,
    pub span: usize,
    pub max_internals: usize,
    /// Cut-chain stages (complete finder) or splits (tt3) or recursion depth
    /// (onesub).
    pub stages: usize,
    pub repairs: usize,
    pub phase: String,
    pub millis: Option<u64>,
}

/// Regenerates the host of instance `index`.
pub fn sweep_host(cfg: &SoundnessConfig, index: u64) -> (Tournament, Generator, u64) {
    let seed = instance_seed(cfg.seed, index);
    let g = cfg.host.generator(cfg.n, index);
    (generate(g, seed).expect("valid generator"), g, seed)
}

fn generator_label(g: Generator) -> String {
    match g {
        Generator::Random { n } => format!("random:{n}"),
        Generator::Transitive { n } => format!("transitive:{n}"),
        Generator::Rotational { n } => format!("rotational:{n}"),
        Generator::BlowupCyclicTriangle { class_size } => format!("blowup:{class_size}"),
        Generator::StackedTriangles { blocks, tail } => format!("stacked:{blocks}:{tail}"),
    }
}

/// Checks a witness against the cap of the finder that produced it.
pub fn witness_sound(t: &Tournament, sub: &Subdivision, finder: FinderKind) -> bool {
    let (max_len, exact) = finder.cap();
    verify(t, sub, max_len, exact).is_valid() && (finder != FinderKind::Complete || sub.max_internals() <= 2)
}

pub fn soundness_sweep(cfg: &SoundnessConfig, exec: Exec) -> Result<Vec<SoundnessRow>, FinderError> {
    let complete = FinderParams::scaled(cfg.k, cfg.scale)?;
    let transitive = TransitiveParams::scaled(cfg.scale)?;
    if cfg.k < 2 {
        return Err(FinderError::InvalidK { k: cfg.k, min: 2 });
    }
    let indices: Vec<u64> = (0..cfg.trials as u64).collect();
    let rows = exec.map(&indices, |&index| {
        let (t, g, seed) = sweep_host(cfg, index);
        let start = Instant::now();
        let (outcome, stages, repairs) = match cfg.finder {
            FinderKind::Complete => {
                let run = find_complete_subdivision(&t, cfg.k, &complete).expect("checked parameters");
                (run.outcome, run.stats.stages, run.stats.repairs)
            }
            FinderKind::Tt3 => {
                let run = find_tt_len3(&t, cfg.k, &transitive).expect("checked parameters");
                (run.outcome, run.stats.splits, 0)
            }
            FinderKind::Onesub => {
                let run = find_one_subdivision(&t, cfg.k, &transitive).expect("checked parameters");
                (run.outcome, run.stats.max_depth, 0)
            }
        };
        let millis = cfg.timings.then(|| start.elapsed().as_millis() as u64);
        let mut row = SoundnessRow {
            index,
            seed,
            generator: generator_label(g),
            n: t.n(),
            k: cfg.k,
            found: outcome.is_found(),
            verify: String::new(),
            direct: 0,
            l1: 0,
            l2: 0,
            span: 0,
            max_internals: 0,
            stages,
            repairs,
            phase: String::new(),
            millis,
        };
        match &outcome {
            Outcome::Found(sub) => {
                row.verify = if witness_sound(&t, sub, cfg.finder) {
                    "pass"
                } else {
                    "fail"
                }
                .into();
                row.direct = sub.paths_of_len(1);
                row.l1 = sub.l1();
                row.l2 = sub.l2();
                row.span = sub.span();
                row.max_internals = sub.max_internals();
            }
            Outcome::Failed(trace) => row.phase = trace.phase.clone(),
        }
        row
    });
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TtSpanConfig {
    pub k_min: usize,
    pub k_max: usize,
    pub n: usize,
    pub trials: usize,
    pub scale: f64,
    pub seed: u64,
    pub timings: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TtSpanRow {
    pub k: usize,
    pub index: u64,
    pub seed: u64,
    pub n: usize,
    pub found: bool,
    pub span: usize,
    /// Smallest possible span `k`: every pair joined by a direct edge.
    pub span_floor: usize,
    pub direct: usize,
    pub l1: usize,
    pub l2: usize,
    pub splits: usize,
    pub phase: String,
    pub millis: Option<u64>,
}

/// Span and path-length profile of `TT_k` on random hosts, `k` in
/// `k_min..=k_max`. Instance indices run `k·2³² + trial`.
pub fn tt_span(cfg: &TtSpanConfig, exec: Exec) -> Result<Vec<TtSpanRow>, FinderError> {
    let params = TransitiveParams::scaled(cfg.scale)?;
    if cfg.k_min < 2 {
        return Err(FinderError::InvalidK { k: cfg.k_min, min: 2 });
    }
    let jobs: Vec<(usize, u64)> = (cfg.k_min..=cfg.k_max)
        .flat_map(|k| (0..cfg.trials as u64).map(move |i| (k, i)))
        .collect();
    Ok(exec.map(&jobs, |&(k, trial)| {
        let index = ((k as u64) << 32) | trial;
        let seed = instance_seed(cfg.seed, index);
        let t = generate(Generator::Random { n: cfg.n }, seed).expect("n ≥ 1");
        let start = Instant::now();
        let run = find_tt_len3(&t, k, &params).expect("checked parameters");
        let millis = cfg.timings.then(|| start.elapsed().as_millis() as u64);
        let mut row = TtSpanRow {
            k,
            index: trial,
            seed,
            n: cfg.n,
            found: run.outcome.is_found(),
            span: 0,
            span_floor: k,
            direct: 0,
            l1: 0,
            l2: 0,
            splits: run.stats.splits,
            phase: String::new(),
            millis,
        };
        match &run.outcome {
            Outcome::Found(sub) => {
                row.span = sub.span();
                row.direct = sub.paths_of_len(1);
                row.l1 = sub.l1();
                row.l2 = sub.l2();
            }
            Outcome::Failed(trace) => row.phase = trace.phase.clone(),
        }
        row
    }))
}

/// Comment lines written above the column header.
pub struct CsvHeader<'a> {
    pub experiment: &'a str,
    pub config: serde_json::Value,
    pub summary: Vec<String>,
    /// Adds a `# generated=<unix seconds>` line, the only varying line.
    pub timestamp: bool,
}

pub fn write_csv<W: Write, R: Serialize>(mut w: W, header: &CsvHeader<'_>, rows: &[R]) -> std::io::Result<()> {
    writeln!(w, "# tsub {} schema={CSV_SCHEMA}", header.experiment)?;
    writeln!(w, "# config={}", header.config)?;
    for line in &header.summary {
        writeln!(w, "# {line}")?;
    }
    if header.timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        writeln!(w, "# generated={secs}")?;
    }
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r).map_err(std::io::Error::other)?;
    }
    out.flush()
}

/// Everything after the comment lines.
pub fn csv_body(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn soundness_summary(rows: &[SoundnessRow]) -> Vec<String> {
    let found = rows.iter().filter(|r| r.found).count();
    let failed = rows.iter().filter(|r| r.verify == "fail").count();
    vec![format!("found={found}/{} verify_fail={failed}", rows.len())]
}

pub fn scan_summary(table: &ScanTable) -> Vec<String> {
    let max = table
        .max_delta_without()
        .map_or_else(|| "none".to_string(), |d| d.to_string());
    vec![format!(
        "k={} max_delta_plus_without={max} budget_misses={} (sampled evidence, not a bound)",
        table.k,
        table.budget_misses()
    )]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(finder: FinderKind, k: usize) -> SoundnessConfig {
        SoundnessConfig {
            finder,
            host: HostKind::Mixed,
            k,
            n: 120,
            trials: 6,
            scale: 0.125,
            seed: 7,
            timings: false,
        }
    }

    fn render<R: Serialize>(rows: &[R], timestamp: bool) -> String {
        let mut buf = Vec::new();
        let header = CsvHeader {
            experiment: "test",
            config: serde_json::json!({"a": 1}),
            summary: vec![],
            timestamp,
        };
        write_csv(&mut buf, &header, rows).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn sweeps_are_deterministic_across_exec_modes() {
        for (finder, k) in [(FinderKind::Complete, 3), (FinderKind::Tt3, 4), (FinderKind::Onesub, 4)] {
            let c = cfg(finder, k);
            let a = soundness_sweep(&c, Exec::Sequential).unwrap();
            let b = soundness_sweep(&c, Exec::Parallel).unwrap();
            assert_eq!(a, b);
            assert!(a.iter().all(|r| !r.found || r.verify == "pass"));
            assert_eq!(csv_body(&render(&a, true)), csv_body(&render(&b, false)));
        }
    }

    #[test]
    fn mixed_hosts_alternate() {
        let c = cfg(FinderKind::Complete, 3);
        assert!(matches!(sweep_host(&c, 0).1, Generator::Random { n: 120 }));
        assert!(matches!(
            sweep_host(&c, 1).1,
            Generator::StackedTriangles { blocks: 24, tail: 48 }
        ));
    }

    #[test]
    fn csv_layout() {
        let rows = tt_span(
            &TtSpanConfig {
                k_min: 2,
                k_max: 3,
                n: 60,
                trials: 2,
                scale: 0.1,
                seed: 3,
                timings: false,
            },
            Exec::Sequential,
        )
        .unwrap();
        let text = render(&rows, false);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# tsub test schema=1"));
        assert_eq!(lines.next(), Some("# config={\"a\":1}"));
        assert!(lines.next().unwrap().starts_with("k,index,seed,n,found,span"));
        assert_eq!(lines.count(), 4);
    }
}
