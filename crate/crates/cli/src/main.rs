use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use tembed::formulations::{
    assignment_to_physical, build_bte_model, build_qte_model, embed_bte, embed_qte, Assignment, BteOutcome, QteOutcome,
};
use tembed::generators::{generate, Family, GenSpec};
use tembed::graph::io::{read_graph, to_dimacs, to_json};
use tembed::harness::{run_bench, template_name, BenchConfig, BenchStatus, InstanceRow};
use tembed::ilp::export_lp;
use tembed::templates::{bte_template, qte_template, template_as_embedding, triad_clique_template_with, TriadLayout, TriadOptions};
use tembed::verify::EmbeddingDoc;
use tembed::{verify, ChimeraGraph, ProblemGraph, Template, TemplateKind};

/// Template minor embedding into Chimera graphs via 0-1 programs.
#[derive(Parser)]
#[command(name = "tembed", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random problem graph.
    Gen(GenArgs),
    /// Embed a problem graph into a BTE or QTE template.
    Embed(EmbedArgs),
    /// Check an embedding file against a problem graph.
    Verify(VerifyArgs),
    /// Emit the TRIAD clique embedding of a Chimera graph.
    Clique(CliqueArgs),
    /// Emit a template's chain partitions as JSON.
    Template(TemplateArgs),
    /// Write the embedding ILP in LP format.
    ExportLp(ExportLpArgs),
    /// Run the benchmark protocol and write its report.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum TemplateArg {
    Bte,
    Qte,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dimacs,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum LayoutArg {
    Minimal,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Bte,
    Qte,
    Triad,
}

/// Square Chimera `C_{M,M,L}` written `M,L`.
#[derive(Clone, Copy)]
struct Dims {
    m: usize,
    l: usize,
}

fn parse_dims(s: &str) -> Result<Dims, String> {
    let parts = parse_list::<usize>(s)?;
    match parts[..] {
        [m, l] => Ok(Dims { m, l }),
        _ => Err(format!("expected M,L, got `{s}`")),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    s.split(',').map(|p| p.trim().parse::<T>().map_err(|e| format!("`{p}`: {e}"))).collect()
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: tembed::generators::GenError| e.to_string())
}

fn parse_seconds(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("`{s}`: {e}"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("time limit must be a nonnegative number of seconds, got `{s}`"))
    }
}

#[derive(Args)]
struct TimeLimit {
    /// Solver time limit in seconds; 0 disables it.
    #[arg(long = "time-limit", env = "TEMBED_TIME_LIMIT", default_value = "60", value_parser = parse_seconds)]
    seconds: f64,
}

impl TimeLimit {
    fn get(&self) -> Option<Duration> {
        (self.seconds > 0.0).then(|| Duration::from_secs_f64(self.seconds))
    }
}

#[derive(Args)]
struct GenArgs {
    /// percolation, barabasi-albert, erdos-renyi, regular or noisy-bipartite.
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long)]
    n: usize,
    /// Density parameter in (0, 1).
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "dimacs")]
    format: GraphFormat,
    /// Output file; also writes `<out>.spec.json`. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long, value_enum)]
    template: TemplateArg,
    #[arg(long, value_parser = parse_dims)]
    chimera: Dims,
    #[arg(long)]
    graph: PathBuf,
    /// Partition capacities (2 for BTE, 4 for QTE); default is the full template.
    #[arg(long, value_delimiter = ',')]
    caps: Option<Vec<usize>>,
    #[command(flatten)]
    time: TimeLimit,
    /// Embedding JSON destination; defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    embedding: PathBuf,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CliqueArgs {
    #[arg(long, value_parser = parse_dims)]
    chimera: Dims,
    /// Add the extra chain for K_{ML+1}.
    #[arg(long)]
    extra: bool,
    #[arg(long, value_enum, default_value = "minimal")]
    layout: LayoutArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TemplateArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, value_parser = parse_dims)]
    chimera: Dims,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportLpArgs {
    #[arg(long, value_enum)]
    template: TemplateArg,
    #[arg(long, value_parser = parse_dims)]
    chimera: Dims,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_delimiter = ',')]
    caps: Option<Vec<usize>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_parser = parse_dims, default_value = "4,4")]
    chimera: Dims,
    /// Comma-separated families; default all.
    #[arg(long, value_delimiter = ',', value_parser = parse_family)]
    families: Vec<Family>,
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75")]
    densities: Vec<f64>,
    /// Smallest n; default M*L + 1.
    #[arg(long)]
    n_min: Option<usize>,
    /// Largest n; default 2*M*L.
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long, default_value_t = 5)]
    instances: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "bte,qte")]
    templates: Vec<TemplateArg>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Instances solved concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    time: TimeLimit,
    /// Report directory.
    #[arg(long)]
    out: PathBuf,
    /// Suppress per-instance progress lines.
    #[arg(long)]
    quiet: bool,
}

/// Process outcome besides hard errors (which exit with 2).
enum Verdict {
    Ok,
    Negative,
    Unknown,
}

impl From<Verdict> for ExitCode {
    fn from(v: Verdict) -> Self {
        ExitCode::from(match v {
            Verdict::Ok => 0,
            Verdict::Negative => 1,
            Verdict::Unknown => 3,
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Embed(a) => cmd_embed(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Clique(a) => cmd_clique(a),
        Cmd::Template(a) => cmd_template(a),
        Cmd::ExportLp(a) => cmd_export_lp(a),
        Cmd::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(v) => v.into(),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn load_graph(p: &Path) -> Result<ProblemGraph> {
    read_graph(p).with_context(|| format!("reading graph {}", p.display()))
}

fn host(d: Dims) -> Result<ChimeraGraph> {
    ChimeraGraph::square(d.m, d.l).map_err(|e| anyhow!("chimera {},{}: {e}", d.m, d.l))
}

fn template_for(kind: TemplateArg, h: &ChimeraGraph) -> Result<Template> {
    Ok(match kind {
        TemplateArg::Bte => bte_template(h)?,
        TemplateArg::Qte => qte_template(h)?,
    })
}

/// Requested capacities, checked against the template's partition sizes.
fn capacities(t: &Template, caps: Option<Vec<usize>>) -> Result<Vec<usize>> {
    let sizes = t.partition_sizes();
    let Some(caps) = caps else { return Ok(sizes) };
    if caps.len() != sizes.len() {
        bail!("{} template takes {} capacities, got {}", template_name(t.kind), sizes.len(), caps.len());
    }
    for (k, (&c, &s)) in caps.iter().zip(&sizes).enumerate() {
        if c > s {
            bail!("capacity {c} for U{} exceeds the template's {s} chains", k + 1);
        }
    }
    Ok(caps)
}

fn cmd_gen(a: GenArgs) -> Result<Verdict> {
    let spec = GenSpec::new(a.family, a.n, a.p, a.seed);
    let g = generate(&spec)?;
    let text = match a.format {
        GraphFormat::Dimacs => to_dimacs(&g),
        GraphFormat::Json => to_json(&g),
    };
    emit(a.out.as_deref(), &text)?;
    if let Some(out) = &a.out {
        let mut side = out.clone().into_os_string();
        side.push(".spec.json");
        fs::write(&side, serde_json::to_string_pretty(&spec)?)
            .with_context(|| format!("writing {}", Path::new(&side).display()))?;
    }
    Ok(Verdict::Ok)
}

fn cmd_embed(a: EmbedArgs) -> Result<Verdict> {
    let g = load_graph(&a.graph)?;
    let h = host(a.chimera)?;
    let t = template_for(a.template, &h)?;
    let caps = capacities(&t, a.caps)?;
    let limit = a.time.get();
    let (status, nodes, secs, embedding) = match a.template {
        TemplateArg::Bte => {
            let run = embed_bte(&g, caps[0], caps[1], limit);
            let e = match &run.outcome {
                BteOutcome::Embeddable(x) => Some(assignment_to_physical(Assignment::Bte(x), &t)?),
                _ => None,
            };
            let status = match run.outcome {
                BteOutcome::Embeddable(_) => BenchStatus::Embeddable,
                BteOutcome::NotEmbeddable => BenchStatus::NotEmbeddable,
                BteOutcome::Unknown => BenchStatus::Unknown,
            };
            (status, run.stats.nodes, run.stats.wall_time, e)
        }
        TemplateArg::Qte => {
            let run = embed_qte(&g, [caps[0], caps[1], caps[2], caps[3]], limit);
            let e = match &run.outcome {
                QteOutcome::Embeddable(x) => Some(assignment_to_physical(Assignment::Qte(x), &t)?),
                _ => None,
            };
            let status = match run.outcome {
                QteOutcome::Embeddable(_) => BenchStatus::Embeddable,
                QteOutcome::NoSolutionFound => BenchStatus::NotEmbeddable,
                QteOutcome::Unknown => BenchStatus::Unknown,
            };
            (status, run.stats.nodes, run.stats.wall_time, e)
        }
    };
    let label = match (status, a.template) {
        (BenchStatus::NotEmbeddable, TemplateArg::Qte) => "NoSolutionFound",
        (BenchStatus::NotEmbeddable, TemplateArg::Bte) => "NotEmbeddable",
        (BenchStatus::Embeddable, _) => "Embeddable",
        (BenchStatus::Unknown, _) => "Unknown",
    };
    eprintln!("{label} ({} nodes, {:.3} s)", nodes, secs.as_secs_f64());
    Ok(match (status, embedding) {
        (BenchStatus::Embeddable, Some(e)) => {
            emit(a.out.as_deref(), &EmbeddingDoc::new(g.n(), &h, &e).to_json())?;
            Verdict::Ok
        }
        (BenchStatus::Unknown, _) => Verdict::Unknown,
        _ => Verdict::Negative,
    })
}

fn cmd_verify(a: VerifyArgs) -> Result<Verdict> {
    let g = load_graph(&a.graph)?;
    let text = fs::read_to_string(&a.embedding).with_context(|| format!("reading {}", a.embedding.display()))?;
    let doc = EmbeddingDoc::parse(&text).with_context(|| format!("parsing {}", a.embedding.display()))?;
    if doc.graph_n != g.n() {
        bail!("embedding is for {} vertices, graph has {}", doc.graph_n, g.n());
    }
    let c = doc.chimera;
    let h = ChimeraGraph::new(c.M, c.N, c.L).map_err(|e| anyhow!("embedding host: {e}"))?;
    let report = verify(&g, &h, &doc.embedding()?)?;
    if a.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    Ok(if report.ok { Verdict::Ok } else { Verdict::Negative })
}

fn cmd_clique(a: CliqueArgs) -> Result<Verdict> {
    let h = host(a.chimera)?;
    let layout = match a.layout {
        LayoutArg::Minimal => TriadLayout::Minimal,
        LayoutArg::Full => TriadLayout::Full,
    };
    let t = triad_clique_template_with(&h, TriadOptions { layout, extra_vertex: a.extra })?;
    let (g, e) = template_as_embedding(&t)?;
    emit(a.out.as_deref(), &EmbeddingDoc::new(g.n(), &h, &e).to_json())?;
    Ok(Verdict::Ok)
}

fn cmd_template(a: TemplateArgs) -> Result<Verdict> {
    let h = host(a.chimera)?;
    let t = match a.kind {
        KindArg::Bte => bte_template(&h)?,
        KindArg::Qte => qte_template(&h)?,
        KindArg::Triad => triad_clique_template_with(&h, TriadOptions::default())?,
    };
    emit(a.out.as_deref(), &t.to_json())?;
    Ok(Verdict::Ok)
}

fn cmd_export_lp(a: ExportLpArgs) -> Result<Verdict> {
    let g = load_graph(&a.graph)?;
    let t = template_for(a.template, &host(a.chimera)?)?;
    let caps = capacities(&t, a.caps)?;
    let model = match a.template {
        TemplateArg::Bte => build_bte_model(&g, caps[0], caps[1]),
        TemplateArg::Qte => build_qte_model(&g, [caps[0], caps[1], caps[2], caps[3]]),
    };
    emit(a.out.as_deref(), &export_lp(&model))?;
    Ok(Verdict::Ok)
}

fn row_stem(r: &InstanceRow) -> String {
    format!("{}_p{}_n{}_s{}", r.family, r.density, r.n, r.seed)
}

fn cmd_bench(a: BenchArgs) -> Result<Verdict> {
    let Dims { m, l } = a.chimera;
    let defaults = BenchConfig::new(m, l);
    let cfg = BenchConfig {
        families: if a.families.is_empty() { defaults.families.clone() } else { a.families },
        densities: a.densities,
        n_min: a.n_min.unwrap_or(defaults.n_min),
        n_max: a.n_max.unwrap_or(defaults.n_max),
        instances_per_cell: a.instances,
        time_limit: a.time.get().unwrap_or(Duration::MAX),
        templates: a
            .templates
            .iter()
            .map(|t| match t {
                TemplateArg::Bte => TemplateKind::Bte,
                TemplateArg::Qte => TemplateKind::Qte,
            })
            .collect(),
        base_seed: a.seed,
        jobs: a.jobs,
        ..defaults
    };
    cfg.validate()?;
    fs::create_dir_all(a.out.join("embeddings")).with_context(|| format!("creating {}", a.out.display()))?;
    fs::create_dir_all(a.out.join("graphs"))?;

    let quiet = a.quiet;
    let report = run_bench(&cfg, |r| {
        if !quiet {
            eprintln!(
                "{} {} p={} n={} seed={}: {:?} in {:.3} s",
                template_name(r.template),
                r.family,
                r.density,
                r.n,
                r.seed,
                r.status,
                r.wall_time
            );
        }
    })?;

    let h = ChimeraGraph::square(m, l)?;
    for r in &report.rows {
        let stem = row_stem(r);
        let g = generate(&GenSpec::new(r.family, r.n, r.density, r.seed))?;
        let gp = a.out.join("graphs").join(format!("{stem}.col"));
        if !gp.exists() {
            fs::write(&gp, to_dimacs(&g))?;
        }
        if let Some(e) = r.embedding() {
            let ep = a.out.join("embeddings").join(format!("{stem}_{}.json", template_name(r.template)));
            fs::write(ep, EmbeddingDoc::new(g.n(), &h, &e).to_json())?;
        }
    }
    fs::write(a.out.join("rows.csv"), report.rows_csv())?;
    fs::write(a.out.join("largest.csv"), report.largest_csv())?;
    fs::write(a.out.join("profile.csv"), report.profile_csv())?;
    fs::write(a.out.join("report.json"), report.to_json())?;

    let count = |s: BenchStatus| report.rows.iter().filter(|r| r.status == s).count();
    eprintln!(
        "{} rows: {} embeddable, {} not embeddable, {} unknown; {} specs skipped; {:.1} s",
        report.rows.len(),
        count(BenchStatus::Embeddable),
        count(BenchStatus::NotEmbeddable),
        count(BenchStatus::Unknown),
        report.skipped.len(),
        report.total_time
    );
    Ok(Verdict::Ok)
}
