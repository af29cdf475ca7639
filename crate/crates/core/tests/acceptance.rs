//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//! Pass criterion numbers or name fragments as arguments to run a subset.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use tembed::formulations::{
    assignment_to_physical, build_bte_model, build_qte_model, embed_bte, embed_qte, solve_bte_model, Assignment,
    BteOutcome, QteOutcome,
};
use tembed::generators::{generate, GenSpec};
use tembed::graph::{bipartition_check, fig4_graph, min_oct_bruteforce, DEFAULT_OCT_BRUTEFORCE_MAX};
use tembed::harness::{run_bench, BenchConfig, BenchReport, BenchStatus, CSV_COLUMNS};
use tembed::ilp::{export_lp, parse_lp, solve, Relation, SolveOptions, SolveStatus};
use tembed::templates::{bte_template, qte_template, template_as_embedding, triad_clique_template};
use tembed::{verify, ChimeraGraph, Embedding, ProblemGraph, TemplateKind, Violation};

use common::*;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 9] = [
        ("template correctness", templates),
        ("BTE certificate vs brute force", bte_oracle),
        ("OCT counterexample", oct_counterexample),
        ("clique thresholds", clique_thresholds),
        ("star thresholds", star_thresholds),
        ("QTE generalizes BTE", qte_generalizes_bte),
        ("verifier mutation suite", mutation_suite),
        ("desk-scale benchmark", desk_bench),
        ("LP export cross-check", lp_export),
    ];
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let num = (i + 1).to_string();
        if !filters.is_empty() && !filters.iter().any(|f| *f == num || name.contains(f.as_str())) {
            continue;
        }
        let started = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = started.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {num} ({name}): PASS [{secs:.1} s] {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {num} ({name}): FAIL [{secs:.1} s] {why}");
            }
        }
    }
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn templates() -> Result<String, String> {
    let started = Instant::now();
    let h = ChimeraGraph::square(16, 4).unwrap();
    let t = bte_template(&h).unwrap();
    let (g, e) = template_as_embedding(&t).unwrap();
    ensure(g.n() == 128 && g.edge_count() == 64 * 64, || format!("BTE minor has {} vertices", g.n()))?;
    ensure(t.partition_sizes() == [64, 64], || format!("partitions {:?}", t.partition_sizes()))?;
    ensure(e.chains().all(|(_, c)| c.len() == 16), || "a BTE chain is not 16 qubits".into())?;
    ensure(e.qubits_used() == 2048 && h.num_qubits() == 2048, || format!("{} qubits used", e.qubits_used()))?;
    let r = verify(&g, &h, &e).unwrap();
    ensure(r.ok, || format!("K_64,64 rejected: {}", r.to_text()))?;

    let h8 = ChimeraGraph::square(8, 4).unwrap();
    let k = triad_clique_template(&h8).unwrap();
    let (kg, ke) = template_as_embedding(&k).unwrap();
    ensure(kg.n() == 32 && kg.edge_count() == 32 * 31 / 2, || "TRIAD minor is not K_32".into())?;
    let r = verify(&kg, &h8, &ke).unwrap();
    ensure(r.ok, || format!("K_32 rejected: {}", r.to_text()))?;
    let secs = started.elapsed().as_secs_f64();
    ensure(secs < 5.0, || format!("took {secs:.1} s"))?;
    Ok(format!("K_64,64 on 2048 qubits in 128 chains of 16; K_32 on {} qubits", ke.qubits_used()))
}

fn bte_oracle() -> Result<String, String> {
    let started = Instant::now();
    let levels = nonisomorphic_graphs(7);
    let counts: Vec<usize> = levels.iter().map(Vec::len).collect();
    ensure(counts == [1, 2, 4, 11, 34, 156, 1044], || format!("isomorphism classes per n: {counts:?}"))?;
    let corpus = small_corpus();
    let mut checked = 0;
    let mut yes = 0;
    for g in &corpus {
        for (c1, c2) in [(2, 2), (3, 3), (3, 4), (4, 4)] {
            let run = embed_bte(g, c1, c2, None);
            let truth = bte_bruteforce(g, c1, c2);
            let got = match &run.outcome {
                BteOutcome::Embeddable(a) => {
                    a.check(g, c1, c2).map_err(|e| format!("{g:?} caps ({c1},{c2}): bad assignment: {e}"))?;
                    true
                }
                BteOutcome::NotEmbeddable => false,
                BteOutcome::Unknown => return Err("unexpected Unknown without a time limit".into()),
            };
            ensure(got == truth, || format!("mismatch on {g:?} caps ({c1},{c2}): solver {got}, brute force {truth}"))?;
            checked += 1;
            yes += got as usize;
        }
    }
    let secs = started.elapsed().as_secs_f64();
    ensure(secs < 120.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{} graphs, {checked} instances ({yes} embeddable), 0 mismatches", corpus.len()))
}

fn oct_counterexample() -> Result<String, String> {
    let started = Instant::now();
    let g = fig4_graph();
    let oct = min_oct_bruteforce(&g, DEFAULT_OCT_BRUTEFORCE_MAX).unwrap();
    ensure(oct.len() == 1, || format!("minimum OCT {oct:?}"))?;

    let BteOutcome::Embeddable(a) = embed_bte(&g, 3, 9, None).outcome else {
        return Err("caps (3,9) not embeddable".into());
    };
    a.check(&g, 3, 9).map_err(|e| e.to_string())?;
    ensure(a.doubled().len() == 1, || format!("caps (3,9) doubled {:?}", a.doubled()))?;

    let BteOutcome::Embeddable(b) = embed_bte(&g, 8, 8, None).outcome else {
        return Err("caps (8,8) not embeddable".into());
    };
    b.check(&g, 8, 8).map_err(|e| e.to_string())?;
    ensure(b.doubled().len() >= 2, || format!("caps (8,8) doubled {:?}", b.doubled()))?;
    let all = bte_bruteforce_all(&g, 8, 8);
    let fewest = all.iter().map(|(x, y)| (x & y).count_ones()).min().unwrap();
    ensure(fewest >= 2, || format!("a caps (8,8) solution doubles only {fewest} vertices"))?;

    // Every single-vertex OCT, forced to be exactly the doubled set.
    let singles: Vec<usize> =
        (0..g.n()).filter(|&v| bipartition_check(&g, &[v]).unwrap().is_bipartite()).collect();
    let mut feasible_at_3_9 = 0;
    for &v in &singles {
        for (c1, c2) in [(8, 8), (3, 9)] {
            let mut m = build_bte_model(&g, c1, c2);
            let var = |m: &tembed::ilp::IlpModel, name: String| m.var(&name).unwrap();
            for k in 1..=2 {
                let y = var(&m, format!("y_{v}_{k}"));
                m.add_constraint(format!("force_{k}"), vec![(y, 1.0)], Relation::Ge, 1.0).unwrap();
            }
            for i in (0..g.n()).filter(|&i| i != v) {
                let terms = vec![(var(&m, format!("y_{i}_1")), 1.0), (var(&m, format!("y_{i}_2")), 1.0)];
                m.add_constraint(format!("single_{i}"), terms, Relation::Le, 1.0).unwrap();
            }
            let run = solve_bte_model(&g, &m, &SolveOptions::new());
            let brute = bte_bruteforce_all(&g, c1, c2).iter().any(|(x, y)| x & y == 1 << v);
            let got = matches!(run.outcome, BteOutcome::Embeddable(_));
            ensure(got == brute, || format!("forcing {{{v}}} at ({c1},{c2}): solver {got}, brute force {brute}"))?;
            if (c1, c2) == (8, 8) {
                ensure(!got, || format!("forcing OCT {{{v}}} with caps (8,8) is feasible"))?;
            } else {
                feasible_at_3_9 += got as usize;
            }
        }
    }
    ensure(feasible_at_3_9 > 0, || "no single-vertex OCT works even at (3,9)".into())?;
    let secs = started.elapsed().as_secs_f64();
    ensure(secs < 10.0, || format!("took {secs:.1} s"))?;
    Ok(format!(
        "OCT size 1; (3,9) doubles {:?}; (8,8) doubles {} (min over all solutions {fewest}); forcing OCTs {singles:?} at (8,8) infeasible",
        a.doubled(),
        b.doubled().len()
    ))
}

fn clique_thresholds() -> Result<String, String> {
    for m in 3..=5 {
        for n in 1..=m + 3 {
            let run = embed_bte(&ProblemGraph::complete(n), m, m, None);
            let got = matches!(run.outcome, BteOutcome::Embeddable(_));
            ensure(got == (n <= m + 1), || format!("K_{n} in caps ({m},{m}): embeddable = {got}"))?;
        }
    }
    let mut times = Vec::new();
    for (n, expect) in [(17, true), (18, false)] {
        let started = Instant::now();
        let run = embed_bte(&ProblemGraph::complete(n), 16, 16, Some(Duration::from_secs(60)));
        let secs = started.elapsed().as_secs_f64();
        let ok = match run.outcome {
            BteOutcome::Embeddable(_) => expect,
            BteOutcome::NotEmbeddable => !expect,
            BteOutcome::Unknown => false,
        };
        ensure(ok && secs < 60.0, || format!("K_{n} at C_4,4,4: {:?} after {secs:.1} s", run.status))?;
        times.push(format!("K_{n} {:?} {secs:.2} s", run.status));
    }
    Ok(format!("thresholds n <= m+1 for m = 3..5; {}", times.join(", ")))
}

fn star_thresholds() -> Result<String, String> {
    let s5 = ProblemGraph::star(5);
    let BteOutcome::Embeddable(a) = embed_bte(&s5, 3, 4, None).outcome else {
        return Err("K_1,5 not embeddable in (3,4)".into());
    };
    a.check(&s5, 3, 4).map_err(|e| e.to_string())?;
    ensure(a.in_u1[0] && a.in_u2[0], || "K_1,5 center not doubled".into())?;
    let s6 = ProblemGraph::star(6);
    let out = embed_bte(&s6, 3, 4, None).outcome;
    ensure(out == BteOutcome::NotEmbeddable, || format!("K_1,6 in (3,4): {out:?}"))?;
    ensure(bte_bruteforce(&s5, 3, 4) && !bte_bruteforce(&s6, 3, 4), || "brute force disagrees".into())?;
    Ok("K_1,5 embeddable with doubled center, K_1,6 not".into())
}

fn qte_generalizes_bte() -> Result<String, String> {
    let corpus = small_corpus();
    let mut instances = 0;
    let mut qte_yes = 0;
    let mut expanded = 0;
    for (mm, l) in [(2, 2), (2, 4), (4, 2), (4, 4)] {
        let h = ChimeraGraph::square(mm, l).unwrap();
        let t = qte_template(&h).unwrap();
        let (ml, pl) = (mm * l, mm / 2 * l);
        let sizes = [pl, ml, ml, pl];
        for g in &corpus {
            instances += 1;
            let bte = matches!(embed_bte(g, ml, ml, None).outcome, BteOutcome::Embeddable(_));
            let run = embed_qte(g, sizes, None);
            match &run.outcome {
                QteOutcome::Embeddable(a) => {
                    qte_yes += 1;
                    a.check(g, sizes).map_err(|e| format!("{g:?} {sizes:?}: {e}"))?;
                    let model = build_qte_model(g, sizes);
                    ensure(model.is_feasible(&a.to_solution(g, &model)), || format!("{g:?}: infeasible point"))?;
                    let e = assignment_to_physical(Assignment::Qte(a), &t).map_err(|e| e.to_string())?;
                    let r = verify(g, &h, &e).unwrap();
                    ensure(r.ok, || format!("{g:?} on C_{mm},{mm},{l}: {}", r.to_text()))?;
                    expanded += 1;
                }
                QteOutcome::NoSolutionFound => {
                    ensure(!bte, || format!("{g:?}: BTE embeddable but QTE found nothing at {sizes:?}"))?;
                }
                QteOutcome::Unknown => return Err("unexpected Unknown without a time limit".into()),
            }
        }
    }
    // The QTE formulation itself, against enumeration where that is cheap.
    let mut brute = 0;
    for g in corpus.iter().filter(|g| g.n() <= 5) {
        let got = matches!(embed_qte(g, [2, 4, 4, 2], None).outcome, QteOutcome::Embeddable(_));
        ensure(got == qte_bruteforce(g, [2, 4, 4, 2]), || format!("QTE mismatch on {g:?}"))?;
        brute += 1;
    }
    let k6 = ProblemGraph::complete(6);
    ensure(
        embed_qte(&k6, [2, 4, 4, 2], None).outcome == QteOutcome::NoSolutionFound && !qte_bruteforce(&k6, [2, 4, 4, 2]),
        || "K_6 fits QTE (2,4,4,2)".into(),
    )?;
    Ok(format!(
        "{instances} instances, {qte_yes} QTE-embeddable, {expanded} expanded and verified, 0 violations; {} small graphs match enumeration",
        brute + 1
    ))
}

#[derive(Debug, PartialEq)]
enum Expect {
    Empty,
    Disconnected,
    MissingEdge,
    Overlap,
    /// The mutant is still a valid embedding.
    Valid,
}

/// What the verifier must report for a mutant, decided from the chains alone.
fn expected(g: &ProblemGraph, h: &ChimeraGraph, e: &Embedding, touched: &[usize]) -> Expect {
    let chain = |v: usize| e.chain(v).unwrap_or(&[]);
    for &v in touched {
        if chain(v).is_empty() {
            return Expect::Empty;
        }
    }
    let total: usize = e.chains().map(|(_, c)| c.len()).sum();
    let mut all: Vec<usize> = e.chains().flat_map(|(_, c)| c.iter().copied()).collect();
    all.sort_unstable();
    all.dedup();
    if all.len() < total {
        return Expect::Overlap;
    }
    for &v in touched {
        if !chain_connected(h, chain(v)) {
            return Expect::Disconnected;
        }
    }
    for &v in touched {
        if g.neighbors(v).iter().any(|&u| !chains_touch(h, chain(v), chain(u))) {
            return Expect::MissingEdge;
        }
    }
    Expect::Valid
}

fn reported(report: &tembed::VerifyReport, kind: &Expect, touched: &[usize]) -> bool {
    let on = |v: &usize| touched.contains(v);
    report.has(|x| match (kind, x) {
        (Expect::Empty, Violation::EmptyChain { vertex }) => on(vertex),
        (Expect::Disconnected, Violation::Disconnected { vertex }) => on(vertex),
        (Expect::MissingEdge, Violation::MissingEdge { u, v }) => on(u) || on(v),
        (Expect::Overlap, Violation::Overlap { first, second, .. }) => on(first) && on(second),
        _ => false,
    })
}

fn mutation_suite() -> Result<String, String> {
    let bte = bte_template(&ChimeraGraph::square(16, 4).unwrap()).unwrap();
    let triad = triad_clique_template(&ChimeraGraph::square(8, 4).unwrap()).unwrap();
    let mut tally: BTreeMap<String, usize> = BTreeMap::new();
    let mut failures = Vec::new();
    for t in [&bte, &triad] {
        let h = t.host();
        let (g, base) = template_as_embedding(t).unwrap();
        let label = if t.kind == TemplateKind::Bte { "BTE" } else { "TRIAD" };
        let mut run = |what: &str, e: Embedding, touched: Vec<usize>| {
            let kind = expected(&g, &h, &e, &touched);
            let report = verify(&g, &h, &e).unwrap();
            let ok = kind != Expect::Valid && !report.ok && reported(&report, &kind, &touched);
            *tally.entry(format!("{label} {what}")).or_default() += 1;
            if !ok && failures.len() < 5 {
                failures.push(format!("{label} {what} on {touched:?}: expected {kind:?}, got {}", report.to_text().trim()));
            }
        };
        let chains: Vec<(usize, Vec<usize>)> = base.chains().map(|(v, c)| (v, c.to_vec())).collect();
        for (v, c) in &chains {
            for q in c {
                let mut e = base.clone();
                e.insert(*v, c.iter().copied().filter(|x| x != q).collect());
                run("deletion", e, vec![*v]);
            }
        }
        for (i, (v, cv)) in chains.iter().enumerate() {
            for (w, cw) in &chains[i + 1..] {
                let mut e = base.clone();
                e.insert(*v, cv.iter().chain(cw).copied().collect());
                run("merge", e, vec![*v, *w]);
            }
        }
        // Only BTE has non-automorphic swaps: a chain of each side.
        if t.kind == TemplateKind::Bte {
            let side = t.partitions[0].len();
            for (v, cv) in &chains[..side] {
                for (w, cw) in &chains[side..] {
                    let mut e = base.clone();
                    e.insert(*v, cw.clone());
                    e.insert(*w, cv.clone());
                    run("swap", e, vec![*v, *w]);
                }
            }
        }
    }
    let summary = tally.iter().map(|(k, n)| format!("{k} {n}")).collect::<Vec<_>>().join(", ");
    ensure(failures.is_empty(), || format!("{}; {summary}", failures.join("; ")))?;
    Ok(format!("all rejected with the expected kind: {summary}"))
}

fn desk_bench() -> Result<String, String> {
    let cfg = BenchConfig { n_min: 17, n_max: 28, instances_per_cell: 3, ..BenchConfig::new(4, 4) };
    ensure(cfg.time_limit == Duration::from_secs(60), || "default limit is not 60 s".into())?;
    let report = run_bench(&cfg, |_| {}).map_err(|e| e.to_string())?;
    let specs = cfg.families.len() * cfg.densities.len() * 12 * 3;
    ensure(report.rows.len() == 2 * (specs - report.skipped.len()), || {
        format!("{} rows for {specs} specs, {} skipped", report.rows.len(), report.skipped.len())
    })?;

    let csv = report.rows_csv();
    ensure(csv.lines().next() == Some(CSV_COLUMNS.join(",").as_str()), || "rows.csv header".into())?;
    ensure(csv.lines().count() == report.rows.len() + 1, || "rows.csv length".into())?;
    let back = BenchReport::from_json(&report.to_json()).map_err(|e| e.to_string())?;
    ensure(back == report, || "report JSON does not round-trip".into())?;

    let h = ChimeraGraph::square(4, 4).unwrap();
    let mut graphs = BTreeMap::new();
    for r in &report.rows {
        let g = graphs
            .entry((r.family, r.density.to_bits(), r.n, r.seed))
            .or_insert_with(|| generate(&GenSpec::new(r.family, r.n, r.density, r.seed)).unwrap());
        ensure(g.edge_count() == r.edges, || format!("row {r:?} does not regenerate"))?;
        if r.status == BenchStatus::Embeddable {
            let e = r.embedding().ok_or("embeddable row without chains")?;
            let v = verify(g, &h, &e).unwrap();
            ensure(v.ok && r.verified, || format!("{:?} {} n={} embedding: {}", r.template, r.family, r.n, v.to_text()))?;
        }
        if r.template == TemplateKind::Bte && r.status == BenchStatus::NotEmbeddable {
            ensure(r.certified, || "uncertified BTE negative".into())?;
        }
    }

    let mut monotone = 0;
    for c in &report.cells {
        let rows: Vec<_> = report
            .rows
            .iter()
            .filter(|r| r.family == c.family && r.density == c.density && r.template == c.template)
            .collect();
        let largest = rows.iter().filter(|r| r.status == BenchStatus::Embeddable).map(|r| r.n).max();
        ensure(c.largest_embedded == largest, || format!("cell {c:?} largest mismatch"))?;
        if c.template != TemplateKind::Bte {
            continue;
        }
        let provable = rows
            .iter()
            .filter(|r| fits_complete_or_bipartite(&graphs[&(r.family, r.density.to_bits(), r.n, r.seed)], 16))
            .map(|r| r.n)
            .max();
        ensure(c.largest_provable == provable, || format!("cell {c:?}: provable {provable:?}"))?;
        ensure(provable.is_none() || largest >= provable, || {
            format!("{} p={}: largest BTE {largest:?} < provable {provable:?}", c.family, c.density)
        })?;
        monotone += 1;
    }
    let count = |t: TemplateKind, s: BenchStatus| report.rows.iter().filter(|r| r.template == t && r.status == s).count();
    let mins = report.total_time / 60.0;
    ensure(mins < 30.0, || format!("took {mins:.1} min"))?;
    Ok(format!(
        "{} rows, {} skipped specs; BTE {}/{}/{} and QTE {}/{}/{} embeddable/not/unknown; monotone in {monotone} BTE cells; {mins:.1} min",
        report.rows.len(),
        report.skipped.len(),
        count(TemplateKind::Bte, BenchStatus::Embeddable),
        count(TemplateKind::Bte, BenchStatus::NotEmbeddable),
        count(TemplateKind::Bte, BenchStatus::Unknown),
        count(TemplateKind::Qte, BenchStatus::Embeddable),
        count(TemplateKind::Qte, BenchStatus::NotEmbeddable),
        count(TemplateKind::Qte, BenchStatus::Unknown),
    ))
}

const HIGHS: &str = r#"
import sys, highspy
h = highspy.Highs()
h.setOptionValue("output_flag", False)
h.readModel(sys.argv[1])
h.run()
print(h.getModelStatus() == highspy.HighsModelStatus.kOptimal, h.getLp().num_row_, h.getInfo().objective_function_value)
"#;

/// HiGHS through its Python bindings, when they are installed.
fn external_solver() -> Option<&'static str> {
    let probe = Command::new("python3").args(["-c", "import highspy"]).output();
    probe.is_ok_and(|o| o.status.success()).then_some("HiGHS")
}

/// Row count and optimal objective HiGHS reports for an LP file.
fn highs_solve(lp: &str, tag: usize) -> Result<(usize, f64), String> {
    let path = std::env::temp_dir().join(format!("tembed-accept-{}-{tag}.lp", std::process::id()));
    std::fs::write(&path, lp).map_err(|e| e.to_string())?;
    let out = Command::new("python3").args(["-c", HIGHS]).arg(&path).output().map_err(|e| e.to_string())?;
    let _ = std::fs::remove_file(&path);
    let text = String::from_utf8_lossy(&out.stdout);
    let f: Vec<&str> = text.split_whitespace().collect();
    match f.as_slice() {
        ["True", rows, obj] => Ok((rows.parse().map_err(|_| text.to_string())?, obj.parse().map_err(|_| text.to_string())?)),
        _ => Err(format!("HiGHS: {text} {}", String::from_utf8_lossy(&out.stderr))),
    }
}

fn lp_export() -> Result<String, String> {
    let corpus = random_graphs(200, 10, 2024);
    let solver = external_solver();
    let mut external = 0;
    for (i, g) in corpus.iter().take(20).enumerate() {
        let m = build_bte_model(g, 3, 3);
        let text = export_lp(&m);
        let parsed = parse_lp(&text).map_err(|e| e.to_string())?;
        let rows = g.n() + 2 + 2 * g.edge_count();
        ensure(parsed.constraints().len() == rows && parsed.num_vars() == 3 * g.n(), || {
            format!("{g:?}: {} rows, {} vars after re-parse", parsed.constraints().len(), parsed.num_vars())
        })?;
        let a = solve(&m, &SolveOptions::new()).map_err(|e| e.to_string())?;
        let b = solve(&parsed, &SolveOptions::new()).map_err(|e| e.to_string())?;
        ensure(a.status == SolveStatus::Optimal && b.status == SolveStatus::Optimal && a.value == b.value, || {
            format!("{g:?}: built-in {:?} {:?}, re-parsed {:?} {:?}", a.status, a.value, b.status, b.value)
        })?;
        if solver.is_some() {
            let (ext_rows, ext) = highs_solve(&text, i)?;
            ensure(ext_rows == rows && Some(ext.round()) == a.value, || {
                format!("{g:?}: HiGHS {ext_rows} rows objective {ext}, built-in {rows} rows {:?}", a.value)
            })?;
            external += 1;
        }
    }
    Ok(match solver {
        Some(s) => format!("20 BTE models re-parsed with n+2+2|E| rows; optima match built-in and {s} ({external})"),
        None => "20 BTE models re-parsed with n+2+2|E| rows and equal optima; no external LP solver on PATH".into(),
    })
}
