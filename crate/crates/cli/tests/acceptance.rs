//! Acceptance checks. Runs without the libtest harness so every criterion
//! prints exactly one PASS or FAIL line, then exits non-zero if any failed.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use rand::Rng;
use serde_json::Value as Json;
use weft_core::generators::{generate_2mode, generate_ba, generate_er, generate_ws, Seed};
use weft_core::io::{self, MissingNodes};
use weft_core::model::{LayerSpec, Network, Nodeset, Traversal};
use weft_core::query::{projected_edge_count_from_sizes, shortest_path, LayerQuery, LayerSelection};

// Pinned tolerances and budgets.
const SIGMAS: f64 = 5.0;
const ORACLE_BUDGET: Duration = Duration::from_secs(60);
const GENERATOR_BUDGET: Duration = Duration::from_secs(10);
const ROUNDTRIP_BUDGET: Duration = Duration::from_secs(60);
const MAX_STORED_PER_PROJECTED: f64 = 1.0 / 1000.0;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_sigmas(got: f64, mean: f64, var: f64) -> Result<(), String> {
    let z = (got - mean) / var.sqrt();
    ensure(z.abs() <= SIGMAS, || format!("{got} is {z:.2} sigma from {mean}"))
}

fn choose2(k: u64) -> u64 {
    k * k.saturating_sub(1) / 2
}

/// Two-mode layers agree with a brute-force projection on every pair.
fn projection_oracle() -> Result<String, String> {
    let start = Instant::now();
    let mut pairs = 0u64;
    for seed in 0..200u64 {
        let mut rng = rng(seed);
        let n = rng.random_range(1..=300);
        let h = rng.random_range(0..=30);
        let a = rng.random_range(0.0..=8.0);
        let ids = scattered_ids(&mut rng, n);
        let ns = Nodeset::from_ids(ids.iter().copied()).unwrap().into_shared();
        let aff = random_affiliations(&mut rng, &ids, h, a);
        let mut net = Network::new(&ns);
        net.add_layer(LayerSpec::two_mode("W")).unwrap();
        load_affiliations(&mut net, "W", &aff);
        let layer = net.layer("W").unwrap();
        let projected = materialize(&aff);
        let mut alters: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
        for &(x, y) in projected.keys() {
            alters.entry(x).or_default().insert(y);
            alters.entry(y).or_default().insert(x);
        }
        for &x in &ids {
            for &y in &ids {
                let shared = if x == y {
                    aff.values().filter(|m| m.contains(&x)).count() as u32
                } else {
                    projected.get(&pair(x, y)).copied().unwrap_or(0)
                };
                ensure(layer.get_edge_value(x, y) == shared as f32, || {
                    format!("seed {seed}: value({x}, {y}) != {shared}")
                })?;
                ensure(layer.check_edge_exists(x, y, Traversal::Both) == (shared > 0), || {
                    format!("seed {seed}: exists({x}, {y})")
                })?;
                pairs += 1;
            }
            let want: Vec<u32> = alters.get(&x).into_iter().flatten().copied().collect();
            ensure(layer.get_node_alters(x, Traversal::Both).unwrap() == want, || {
                format!("seed {seed}: alters({x})")
            })?;
        }
    }
    let took = start.elapsed();
    ensure(took < ORACLE_BUDGET, || format!("took {took:?}"))?;
    Ok(format!("200 layers, {pairs} pairs, {took:.2?}"))
}

/// 10,000 hyperedges of 40,000 members each.
fn projected_count_arithmetic() -> Result<String, String> {
    let want: u64 = 7_999_800_000_000;
    ensure(10_000 * choose2(40_000) == want, || "oracle arithmetic".into())?;
    let got = projected_edge_count_from_sizes(std::iter::repeat_n(40_000, 10_000)).map_err(|e| e.to_string())?;
    ensure(got == want, || format!("got {got}"))?;

    // The layer path uses the same formula.
    let ns = Nodeset::with_count(60).unwrap().into_shared();
    let mut net = Network::new(&ns);
    net.add_layer(LayerSpec::two_mode("W")).unwrap();
    let sizes = [0u32, 1, 2, 7, 40, 60];
    for (i, &k) in sizes.iter().enumerate() {
        net.add_hyperedge("W", &format!("h{i}"), &(0..k).collect::<Vec<_>>()).unwrap();
    }
    let small: u64 = sizes.iter().map(|&k| choose2(k as u64)).sum();
    let layer_count = net.projected_edge_count("W").map_err(|e| e.to_string())?;
    ensure(layer_count == small, || format!("layer path {layer_count} != {small}"))?;
    Ok(format!("{got} projected edges"))
}

/// Memberships stored versus edges a projection would need.
fn compression_ratio() -> Result<String, String> {
    let (n, h, a) = (100_000u32, 100u64, 20.0f64);
    let ns = Nodeset::with_count(n as u64).unwrap().into_shared();
    let mut net = Network::new(&ns);
    net.add_layer(LayerSpec::two_mode("W")).unwrap();
    let report = generate_2mode(&mut net, "W", h, a, Seed(2024)).map_err(|e| e.to_string())?;
    let layer = net.two_mode("W").unwrap();
    let stored = layer.membership_count();
    ensure(stored == report.ties, || "report disagrees with layer".into())?;
    // Poisson(20) truncated at 100 has the untruncated mean and variance to
    // far below one part in 10^30.
    within_sigmas(stored as f64, n as f64 * a, n as f64 * a)?;
    let projected: u64 = layer.hyperedges().iter().map(|e| choose2(e.len() as u64)).sum();
    let engine = net.projected_edge_count("W").map_err(|e| e.to_string())?;
    ensure(engine == projected, || format!("engine {engine} != oracle {projected}"))?;
    let ratio = stored as f64 / projected as f64;
    ensure(ratio < MAX_STORED_PER_PROJECTED, || format!("ratio {ratio:e}"))?;
    Ok(format!("{stored} memberships vs {projected} projected edges (1:{:.0})", 1.0 / ratio))
}

fn generator_counts() -> Result<String, String> {
    let n = 20_000u64;
    let fresh = || {
        let ns = Nodeset::with_count(n).unwrap().into_shared();
        let mut net = Network::new(&ns);
        net.add_layer(LayerSpec::one_mode("L")).unwrap();
        (ns, net)
    };
    let timed = |f: &dyn Fn(&mut Network) -> weft_core::Result<weft_core::generators::GenerationReport>| {
        let (_ns, mut net) = fresh();
        let start = Instant::now();
        f(&mut net).map_err(|e| e.to_string())?;
        let took = start.elapsed();
        ensure(took < GENERATOR_BUDGET, || format!("took {took:?}"))?;
        Ok::<_, String>((net.one_mode("L").unwrap().edge_count(), took))
    };
    let (ws, t_ws) = timed(&|net| generate_ws(net, "L", 20, 0.1, Seed(1)))?;
    ensure(ws == n * 20 / 2, || format!("WS gave {ws}"))?;
    let (ba, t_ba) = timed(&|net| generate_ba(net, "L", 10, Seed(2)))?;
    ensure(ba == 10 * (n - 10), || format!("BA gave {ba}"))?;
    let (er, t_er) = timed(&|net| generate_er(net, "L", 0.001, Seed(3)))?;
    let pairs = choose2(n) as f64;
    ensure(pairs * 0.001 == 199_990.0, || "ER mean".into())?;
    within_sigmas(er as f64, pairs * 0.001, pairs * 0.001 * 0.999)?;
    Ok(format!(
        "WS {ws} ({t_ws:.2?}), BA {ba} ({t_ba:.2?}), ER {er} ({t_er:.2?})"
    ))
}

/// Oracle view of what the engine stores, read straight from layer storage.
fn stored_oracle(net: &Network, names: &[&str]) -> BTreeMap<u32, BTreeSet<u32>> {
    let mut one = Vec::new();
    let mut two = Vec::new();
    for &name in names {
        match net.layer(name).unwrap().as_one_mode() {
            Some(l) => {
                let mut o = EdgeOracle {
                    directed: l.is_directed(),
                    edges: BTreeMap::new(),
                };
                for (a, b, v) in l.edges() {
                    let k = o.key(a, b);
                    o.edges.insert(k, v);
                }
                one.push(o);
            }
            None => {
                let aff: Affiliations = net
                    .two_mode(name)
                    .unwrap()
                    .hyperedges()
                    .iter()
                    .map(|e| (e.name().to_string(), e.members().iter().copied().collect()))
                    .collect();
                two.push(aff);
            }
        }
    }
    union_adjacency(&one.iter().collect::<Vec<_>>(), &two.iter().collect::<Vec<_>>())
}

/// Benchmark-shaped networks: the four generated layers plus a directed one.
fn bfs_oracle() -> Result<String, String> {
    let mut queries = 0;
    for seed in 0..100u64 {
        let mut rng = rng(seed);
        let n = rng.random_range(6..=200u64);
        let ns = Nodeset::with_count(n).unwrap().into_shared();
        let ids: Vec<u32> = (0..n as u32).collect();
        let mut net = Network::new(&ns);
        for name in ["Random", "Neighbors", "Communication"] {
            net.add_layer(LayerSpec::one_mode(name)).unwrap();
        }
        net.add_layer(LayerSpec::two_mode("Workplaces")).unwrap();
        let s = Seed(seed);
        generate_er(&mut net, "Random", rng.random_range(0.0..0.03), s).unwrap();
        let k = 2 * rng.random_range(1..=2);
        generate_ws(&mut net, "Neighbors", k, 0.1, s).unwrap();
        let m = rng.random_range(1..=3).min(n - 1);
        generate_ba(&mut net, "Communication", m, s).unwrap();
        let h = rng.random_range(1..=n / 10 + 1);
        generate_2mode(&mut net, "Workplaces", h, rng.random_range(0.0..1.2), s).unwrap();
        let directed = rng.random_range(0..n as usize);
        random_one_mode(&mut rng, &mut net, "Calls", &ids, true, false, directed);

        let all: Vec<&str> = net.layer_names().collect();
        let subset: Vec<String> = all.iter().filter(|_| rng.random_bool(0.5)).map(|s| s.to_string()).collect();
        let subset_refs: Vec<&str> = subset.iter().map(String::as_str).collect();
        let variants = [
            (LayerSelection::All, stored_oracle(&net, &all)),
            (LayerSelection::Named(vec!["Neighbors".into()]), stored_oracle(&net, &["Neighbors"])),
            (LayerSelection::Named(subset.clone()), stored_oracle(&net, &subset_refs)),
        ];
        for (sel, adj) in &variants {
            for _ in 0..20 {
                let (a, b) = (rng.random_range(0..n as u32), rng.random_range(0..n as u32));
                let got = shortest_path(&net, a, b, sel).map_err(|e| e.to_string())?;
                let want = bfs_distance(adj, a, b);
                ensure(got.as_ref().map(|p| p.length) == want, || {
                    format!("seed {seed} {sel:?}: {a} -> {b}: got {got:?}, want {want:?}")
                })?;
                if let Some(p) = got {
                    for w in p.nodes.windows(2) {
                        ensure(adj.get(&w[0]).is_some_and(|s| s.contains(&w[1])), || {
                            format!("seed {seed}: hop {} -> {} is not an edge", w[0], w[1])
                        })?;
                    }
                }
                queries += 1;
            }
        }
    }
    Ok(format!("100 instances, {queries} queries"))
}

fn round_trips() -> Result<String, String> {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let read = |p: &Path| std::fs::read(p).unwrap();
    for seed in 0..50u64 {
        let mut rng = rng(seed + 500);
        let (ids, ns) = random_nodeset(&mut rng, 1 + seed as usize * 4);
        let net = random_network(&mut rng, &ids, &ns);
        let ns_value = ns.read().unwrap().clone();
        let mut loads = Vec::new();
        for ext in ["tsv", "tsv.gz", "bin", "bin.gz"] {
            let (np, wp) = (dir.path().join(format!("n{seed}.{ext}")), dir.path().join(format!("w{seed}.{ext}")));
            io::save_nodeset(&ns_value, &np).map_err(|e| e.to_string())?;
            io::save_network(&net, &wp).map_err(|e| e.to_string())?;
            let ns2 = io::load_nodeset(&np).map_err(|e| e.to_string())?;
            ensure(ns2 == ns_value, || format!("seed {seed} {ext}: nodeset differs"))?;
            let ns2 = ns2.into_shared();
            let net2 = io::load_network(&wp, &ns2, MissingNodes::Reject).map_err(|e| e.to_string())?;
            ensure(net2.same_layers(&net), || format!("seed {seed} {ext}: network differs"))?;
            let (np2, wp2) = (dir.path().join(format!("n{seed}b.{ext}")), dir.path().join(format!("w{seed}b.{ext}")));
            io::save_nodeset(&ns2.read().unwrap(), &np2).map_err(|e| e.to_string())?;
            io::save_network(&net2, &wp2).map_err(|e| e.to_string())?;
            ensure(read(&np) == read(&np2) && read(&wp) == read(&wp2), || {
                format!("seed {seed} {ext}: second save differs")
            })?;
            loads.push((ns2, net2));
        }
        ensure(
            *loads[0].0.read().unwrap() == *loads[2].0.read().unwrap() && loads[0].1.same_layers(&loads[2].1),
            || format!("seed {seed}: tsv and bin loads disagree"),
        )?;
    }
    let took = start.elapsed();
    ensure(took < ROUNDTRIP_BUDGET, || format!("took {took:?}"))?;
    Ok(format!("50 instances x 4 formats, {took:.2?}"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn schema_ok(v: &Json) -> bool {
    let Some(o) = v.as_object() else { return false };
    o.len() == 4
        && (o.get("command").is_some_and(|c| c.is_string() || c.is_null()))
        && o.contains_key("result")
        && match o.get("status").and_then(Json::as_str) {
            Some("ok") => o["error"].is_null(),
            Some("error") => o["error"].is_string() && o["result"].is_null(),
            _ => false,
        }
}

/// Scaled benchmark script then the query script, through the binary, in both modes.
fn scripts() -> Result<String, String> {
    let driver = "runscript(benchmark_scaled.txt)\nrunscript(queries_scaled.txt)\n";
    let mut saved = Vec::new();
    let mut json_results = Vec::new();
    for json in [false, true] {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        for f in ["benchmark_scaled.txt", "queries_scaled.txt"] {
            std::fs::copy(fixture(f), dir.path().join(f)).map_err(|e| e.to_string())?;
        }
        std::fs::write(dir.path().join("driver.txt"), driver).map_err(|e| e.to_string())?;
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_weft"));
        cmd.current_dir(dir.path()).args(["--script", "driver.txt"]);
        if json {
            cmd.arg("--json");
        }
        let out = cmd.output().map_err(|e| e.to_string())?;
        ensure(out.status.success(), || format!("exit {:?}", out.status.code()))?;
        let stdout = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
        if json {
            for line in stdout.lines() {
                let v: Json = serde_json::from_str(line).map_err(|e| format!("{e}: {line}"))?;
                ensure(schema_ok(&v), || format!("schema: {line}"))?;
                ensure(v["status"] == "ok", || format!("failed: {line}"))?;
                json_results.push(v);
            }
        } else {
            ensure(!stdout.contains("Error"), || stdout.lines().last().unwrap_or("").to_string())?;
        }
        let read = |f: &str| std::fs::read(dir.path().join(f)).map_err(|e| format!("{f}: {e}"));
        saved.push((read("benchmark_nodes.bin.gz")?, read("benchmark_net.bin.gz")?));
    }
    ensure(saved[0] == saved[1], || "saved files differ between modes".into())?;

    // 12 statements in the benchmark script, 8 in the query script, plus the two runscript lines.
    ensure(json_results.len() == 22, || format!("{} JSON lines", json_results.len()))?;
    let by_command = |c: &str| json_results.iter().filter(|v| v["command"] == c).map(|v| &v["result"]).collect::<Vec<_>>();
    let generated = by_command("generate");
    let edges = |i: usize| generated[i]["edges"].as_u64().unwrap_or(0) as f64;
    let pairs = choose2(100_000) as f64;
    within_sigmas(edges(0), pairs * 0.0002, pairs * 0.0002 * 0.9998)?;
    ensure(edges(1) == 1_000_000.0, || format!("WS gave {}", edges(1)))?;
    ensure(edges(2) == 999_900.0, || format!("BA gave {}", edges(2)))?;
    let memberships = generated[3]["memberships"].as_f64().unwrap_or(0.0);
    within_sigmas(memberships, 2_000_000.0, 2_000_000.0)?;
    ensure(by_command("checkedge")[0].is_boolean(), || "checkedge result".into())?;
    ensure(by_command("getedge")[0].is_number(), || "getedge result".into())?;
    ensure(by_command("getnodealters").iter().all(|r| r.as_array().is_some_and(|a| a.iter().all(Json::is_u64))), || {
        "getnodealters result".into()
    })?;
    ensure(by_command("shortestpath").iter().all(|r| r["nodes"].is_array() && r.get("length").is_some()), || {
        "shortestpath result".into()
    })?;
    Ok(format!("{} JSON lines, saves identical ({} + {} bytes)", json_results.len(), saved[0].0.len(), saved[0].1.len()))
}

/// Existence checks probe at most the smaller membership list.
fn probe_bound() -> Result<String, String> {
    let mut checked = 0u64;
    let mut total = 0u64;
    for seed in 0..100u64 {
        let mut rng = rng(seed + 9000);
        let n = rng.random_range(2..=150);
        let ids = scattered_ids(&mut rng, n);
        let ns = Nodeset::from_ids(ids.iter().copied()).unwrap().into_shared();
        let (h, a) = (rng.random_range(1..=30), rng.random_range(0.0..=8.0));
        let aff = random_affiliations(&mut rng, &ids, h, a);
        let mut net = Network::new(&ns);
        net.add_layer(LayerSpec::two_mode("W")).unwrap();
        load_affiliations(&mut net, "W", &aff);
        let layer = net.two_mode("W").unwrap();
        let count = |x: u32| aff.values().filter(|m| m.contains(&x)).count() as u64;
        for &x in &ids {
            for &y in &ids {
                let bound = count(x).min(count(y));
                let mut probes = 0;
                layer.check_edge_exists_probed(x, y, &mut probes);
                ensure(probes <= bound, || format!("seed {seed}: {probes} probes for ({x}, {y}), bound {bound}"))?;
                total += probes;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} checks, {total} probes"))
}

fn main() {
    let criteria: [(&str, Check); 8] = [
        ("projection-oracle-equivalence", projection_oracle),
        ("projected-edge-count-arithmetic", projected_count_arithmetic),
        ("compression-ratio", compression_ratio),
        ("generator-counts", generator_counts),
        ("bfs-oracle", bfs_oracle),
        ("round-trip", round_trips),
        ("benchmark-scripts", scripts),
        ("probe-bound", probe_bound),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} [{:.2?}]", start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
