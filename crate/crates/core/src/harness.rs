//! Benchmark protocol: random instances per (family, density, n) cell,
//! embedded into BTE and QTE templates under a time limit, with per
//! instance rows and aggregate tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chimera::ChimeraGraph;
use crate::formulations::{assignment_to_physical, embed_bte, embed_qte, Assignment, BteOutcome, QteOutcome};
use crate::generators::{generate, Family, GenError, GenSpec};
use crate::graph::{bipartition_check, BipartiteCheck, ProblemGraph, Side};
use crate::templates::{bte_template, qte_template, Template, TemplateKind};
use crate::verify::{verify, Embedding};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("invalid bench config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    /// Square Chimera `C_{M,M,L}`.
    pub m: usize,
    pub l: usize,
    pub families: Vec<Family>,
    pub densities: Vec<f64>,
    pub n_min: usize,
    pub n_max: usize,
    pub instances_per_cell: usize,
    pub time_limit: Duration,
    pub templates: Vec<TemplateKind>,
    pub base_seed: u64,
    /// Instances solved concurrently.
    pub jobs: usize,
}

impl BenchConfig {
    /// Defaults for `C_{M,M,L}`: every family and density, `n` from
    /// `ML + 1` to `2ML`, 5 instances per cell, 60 s, both templates.
    pub fn new(m: usize, l: usize) -> Self {
        BenchConfig {
            m,
            l,
            families: Family::ALL.to_vec(),
            densities: vec![0.25, 0.5, 0.75],
            n_min: m * l + 1,
            n_max: 2 * m * l,
            instances_per_cell: 5,
            time_limit: Duration::from_secs(60),
            templates: vec![TemplateKind::Bte, TemplateKind::Qte],
            base_seed: 0,
            jobs: 1,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |s: String| Err(ConfigError::Invalid(s));
        if self.m == 0 || self.l == 0 {
            return bad(format!("chimera ({}, {}) must be positive", self.m, self.l));
        }
        if self.n_min > self.n_max {
            return bad(format!("empty n range {}..={}", self.n_min, self.n_max));
        }
        if self.n_min <= self.m * self.l {
            return bad(format!(
                "n range must start above ML = {}; smaller graphs fit the TRIAD clique",
                self.m * self.l
            ));
        }
        if self.families.is_empty() || self.densities.is_empty() || self.templates.is_empty() {
            return bad("families, densities and templates must be nonempty".into());
        }
        if let Some(p) = self.densities.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
            return bad(format!("density {p} is not in (0, 1)"));
        }
        if self.instances_per_cell == 0 || self.jobs == 0 {
            return bad("instances per cell and jobs must be positive".into());
        }
        for &t in &self.templates {
            match t {
                TemplateKind::Bte => {}
                TemplateKind::Qte if self.m % 2 == 0 => {}
                TemplateKind::Qte => return bad(format!("QTE needs an even grid side, got {}", self.m)),
                TemplateKind::TriadClique => return bad("the clique template is not benchmarked".into()),
            }
        }
        Ok(())
    }

    /// Seed of instance `k` in the given cell.
    pub fn instance_seed(&self, family: Family, density: f64, n: usize, k: usize) -> u64 {
        let mut h = self.base_seed ^ 0x9e37_79b9_7f4a_7c15;
        for word in [family as u64, density.to_bits(), n as u64, k as u64] {
            h = splitmix(h ^ word);
        }
        h
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BenchStatus {
    Embeddable,
    /// For QTE this means only that the formulation found no embedding.
    NotEmbeddable,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRow {
    pub family: Family,
    pub density: f64,
    pub n: usize,
    pub seed: u64,
    pub edges: usize,
    pub template: TemplateKind,
    pub status: BenchStatus,
    /// Whether a `NotEmbeddable` status is a proof (BTE) or not (QTE).
    pub certified: bool,
    pub wall_time: f64,
    pub nodes: u64,
    /// Qubits in the embedding's chains; 0 unless embeddable.
    pub qubits: usize,
    /// Verifier verdict on the embedding; false unless embeddable.
    pub verified: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub chains: Option<BTreeMap<usize, Vec<usize>>>,
}

impl InstanceRow {
    pub fn embedding(&self) -> Option<Embedding> {
        let chains = self.chains.as_ref()?;
        let mut e = Embedding::new();
        for (&v, c) in chains {
            e.insert(v, c.clone());
        }
        Some(e)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedSpec {
    pub family: Family,
    pub density: f64,
    pub n: usize,
    pub seed: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub family: Family,
    pub density: f64,
    pub template: TemplateKind,
    pub instances: usize,
    pub embedded: usize,
    /// Largest `n` among embeddable rows, if any.
    pub largest_embedded: Option<usize>,
    /// Largest `n` whose instance is a subgraph of `K_{ML+1}` or of `K_{ML,ML}`.
    pub largest_provable: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub time: f64,
    pub embedded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub rows: Vec<InstanceRow>,
    pub skipped: Vec<SkippedSpec>,
    pub cells: Vec<CellSummary>,
    /// Per template: embedded-instance count against solve time.
    pub profiles: BTreeMap<String, Vec<ProfilePoint>>,
    pub total_time: f64,
}

/// True when `g` is provably BTE-embeddable with capacity `cap` per side:
/// it has at most `cap + 1` vertices, or a bipartition with both sides of
/// size at most `cap`.
pub fn provably_bte_embeddable(g: &ProblemGraph, cap: usize) -> bool {
    if g.n() <= cap + 1 {
        return true;
    }
    let Ok(BipartiteCheck::Bipartite(b)) = bipartition_check(g, &[]) else {
        return false;
    };
    // Components may be flipped independently; subset-sum over the flips.
    let comps = components(g);
    let mut reachable = vec![false; g.n() + 1];
    reachable[0] = true;
    for comp in comps {
        let left = comp.iter().filter(|&&v| b.side[v] == Some(Side::Left)).count();
        let right = comp.len() - left;
        let mut next = vec![false; g.n() + 1];
        for (s, _) in reachable.iter().enumerate().filter(|(_, &r)| r) {
            next[s + left] = true;
            next[s + right] = true;
        }
        reachable = next;
    }
    (0..=g.n()).any(|s| reachable[s] && s <= cap && g.n() - s <= cap)
}

fn components(g: &ProblemGraph) -> Vec<Vec<usize>> {
    let mut seen = vec![false; g.n()];
    let mut out = Vec::new();
    for s in 0..g.n() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut comp = Vec::new();
        while let Some(v) = stack.pop() {
            comp.push(v);
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        out.push(comp);
    }
    out
}

struct Job {
    spec: GenSpec,
    template: TemplateKind,
}

struct Templates {
    host: ChimeraGraph,
    bte: Template,
    qte: Option<Template>,
}

fn run_job(job: &Job, g: &ProblemGraph, t: &Templates, limit: Duration) -> InstanceRow {
    let (ml, pl) = (t.bte.partitions[0].len(), t.bte.partitions[0].len() / 2);
    let started = Instant::now();
    let (status, certified, nodes, embedding) = match job.template {
        TemplateKind::Bte => {
            let run = embed_bte(g, ml, ml, Some(limit));
            let e = match &run.outcome {
                BteOutcome::Embeddable(a) => Some(assignment_to_physical(Assignment::Bte(a), &t.bte)),
                _ => None,
            };
            let status = match run.outcome {
                BteOutcome::Embeddable(_) => BenchStatus::Embeddable,
                BteOutcome::NotEmbeddable => BenchStatus::NotEmbeddable,
                BteOutcome::Unknown => BenchStatus::Unknown,
            };
            (status, status == BenchStatus::NotEmbeddable, run.stats.nodes, e)
        }
        _ => {
            let qte = t.qte.as_ref().expect("validated: QTE needs an even grid");
            let run = embed_qte(g, [pl, ml, ml, pl], Some(limit));
            let e = match &run.outcome {
                QteOutcome::Embeddable(a) => Some(assignment_to_physical(Assignment::Qte(a), qte)),
                _ => None,
            };
            let status = match run.outcome {
                QteOutcome::Embeddable(_) => BenchStatus::Embeddable,
                QteOutcome::NoSolutionFound => BenchStatus::NotEmbeddable,
                QteOutcome::Unknown => BenchStatus::Unknown,
            };
            (status, false, run.stats.nodes, e)
        }
    };
    let wall_time = started.elapsed().as_secs_f64();
    let embedding = embedding.map(|r| r.expect("solved assignments fit their template"));
    let verified = embedding.as_ref().is_some_and(|e| verify(g, &t.host, e).is_ok_and(|r| r.ok));
    InstanceRow {
        family: job.spec.family,
        density: job.spec.p,
        n: job.spec.n,
        seed: job.spec.seed,
        edges: g.edge_count(),
        template: job.template,
        status,
        certified,
        wall_time,
        nodes,
        qubits: embedding.as_ref().map_or(0, Embedding::qubits_used),
        verified,
        chains: embedding.map(|e| e.chains().map(|(v, c)| (v, c.to_vec())).collect()),
    }
}

/// Runs the whole benchmark. `progress` is called once per finished row.
pub fn run_bench(cfg: &BenchConfig, progress: impl Fn(&InstanceRow) + Sync) -> Result<BenchReport, ConfigError> {
    cfg.validate()?;
    let started = Instant::now();
    let host = ChimeraGraph::square(cfg.m, cfg.l).expect("validated dimensions");
    let templates = Templates {
        bte: bte_template(&host).expect("square grid"),
        qte: (cfg.m % 2 == 0).then(|| qte_template(&host).expect("even square grid")),
        host,
    };

    let mut graphs = Vec::new();
    let mut skipped = Vec::new();
    for &family in &cfg.families {
        for &p in &cfg.densities {
            for n in cfg.n_min..=cfg.n_max {
                for k in 0..cfg.instances_per_cell {
                    let spec = GenSpec::new(family, n, p, cfg.instance_seed(family, p, n, k));
                    match generate(&spec) {
                        Ok(g) => graphs.push((spec, g)),
                        Err(e @ GenError::DegenerateSpec(_)) => skipped.push(SkippedSpec {
                            family,
                            density: p,
                            n,
                            seed: spec.seed,
                            reason: e.to_string(),
                        }),
                        Err(e) => return Err(ConfigError::Invalid(e.to_string())),
                    }
                }
            }
        }
    }
    let jobs: Vec<(usize, Job)> = graphs
        .iter()
        .enumerate()
        .flat_map(|(gi, (spec, _))| cfg.templates.iter().map(move |&template| (gi, Job { spec: *spec, template })))
        .collect();

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<InstanceRow>>> = Mutex::new(vec![None; jobs.len()]);
    std::thread::scope(|s| {
        for _ in 0..cfg.jobs.min(jobs.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((gi, job)) = jobs.get(i) else { break };
                let row = run_job(job, &graphs[*gi].1, &templates, cfg.time_limit);
                progress(&row);
                results.lock().unwrap()[i] = Some(row);
            });
        }
    });
    let rows: Vec<InstanceRow> = results.into_inner().unwrap().into_iter().map(|r| r.expect("every job ran")).collect();

    let cap = cfg.m * cfg.l;
    let mut cells = Vec::new();
    for &family in &cfg.families {
        for &p in &cfg.densities {
            for &template in &cfg.templates {
                let in_cell = |r: &&InstanceRow| r.family == family && r.density == p && r.template == template;
                let cell_rows: Vec<&InstanceRow> = rows.iter().filter(in_cell).collect();
                let provable = graphs
                    .iter()
                    .filter(|(s, g)| s.family == family && s.p == p && provably_bte_embeddable(g, cap))
                    .map(|(s, _)| s.n)
                    .max();
                let embedded: Vec<&&InstanceRow> =
                    cell_rows.iter().filter(|r| r.status == BenchStatus::Embeddable).collect();
                cells.push(CellSummary {
                    family,
                    density: p,
                    template,
                    instances: cell_rows.len(),
                    embedded: embedded.len(),
                    largest_embedded: embedded.iter().map(|r| r.n).max(),
                    largest_provable: provable,
                });
            }
        }
    }

    let mut profiles = BTreeMap::new();
    for &template in &cfg.templates {
        let mut times: Vec<f64> = rows
            .iter()
            .filter(|r| r.template == template && r.status == BenchStatus::Embeddable)
            .map(|r| r.wall_time)
            .collect();
        times.sort_by(f64::total_cmp);
        let series = times.iter().enumerate().map(|(k, &t)| ProfilePoint { time: t, embedded: k + 1 }).collect();
        profiles.insert(template_name(template).to_string(), series);
    }

    Ok(BenchReport { config: cfg.clone(), rows, skipped, cells, profiles, total_time: started.elapsed().as_secs_f64() })
}

pub fn template_name(t: TemplateKind) -> &'static str {
    match t {
        TemplateKind::Bte => "BTE",
        TemplateKind::Qte => "QTE",
        TemplateKind::TriadClique => "TriadClique",
    }
}

fn status_name(s: BenchStatus) -> &'static str {
    match s {
        BenchStatus::Embeddable => "Embeddable",
        BenchStatus::NotEmbeddable => "NotEmbeddable",
        BenchStatus::Unknown => "Unknown",
    }
}

/// Column order of [`BenchReport::rows_csv`].
pub const CSV_COLUMNS: [&str; 12] =
    ["family", "density", "n", "seed", "edges", "template", "status", "certified", "wall_time", "nodes", "qubits", "verified"];

impl BenchReport {
    pub fn rows_csv(&self) -> String {
        let mut out = CSV_COLUMNS.join(",");
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{:.6},{},{},{}",
                r.family,
                r.density,
                r.n,
                r.seed,
                r.edges,
                template_name(r.template),
                status_name(r.status),
                r.certified,
                r.wall_time,
                r.nodes,
                r.qubits,
                r.verified
            )
            .unwrap();
        }
        out
    }

    /// Largest embedded `n` per family and density, one column per template.
    pub fn largest_csv(&self) -> String {
        let mut out = String::from("family,density,template,instances,embedded,largest_embedded,largest_provable\n");
        let opt = |v: Option<usize>| v.map_or(String::new(), |n| n.to_string());
        for c in &self.cells {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                c.family,
                c.density,
                template_name(c.template),
                c.instances,
                c.embedded,
                opt(c.largest_embedded),
                opt(c.largest_provable)
            )
            .unwrap();
        }
        out
    }

    pub fn profile_csv(&self) -> String {
        let mut out = String::from("template,time,embedded\n");
        for (t, series) in &self.profiles {
            for p in series {
                writeln!(out, "{t},{:.6},{}", p.time, p.embedded).unwrap();
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
