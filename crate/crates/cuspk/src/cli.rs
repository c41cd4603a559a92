//! Command-line front door: compute single K-groups, run the bar and grid
//! verifications, inspect the p-typical profile, and prebuild structure
//! polynomial tables. Output is plain text or canonical JSON (sorted keys,
//! every integer a decimal string, no floating point).

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::algebra::AbelianGroupStructure;
use crate::cyclicbar;
use crate::error::{Error, Result};
use crate::kgroups::{self, Caps, GridSpec, RouteSelection};
use crate::semigroup::CuspPair;
use crate::witt::{FiniteField, StructureTable, TableStore};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE_OR_RESOURCE: i32 = 1;
pub const EXIT_DISAGREEMENT: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "cuspk",
    about = "Relative K-groups of planar cuspidal curves over finite fields",
    version
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Output format
    #[arg(long, global = true, default_value = "text", value_parser = ["text", "json"])]
    pub format: String,
    /// Structure-polynomial cache directory (default: CUSPK_CACHE or the
    /// user cache dir)
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Disable the on-disk structure-polynomial cache
    #[arg(long, global = true)]
    pub no_disk_cache: bool,
    /// Worker threads (default: rayon's choice)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Cap on q^|S| for the exhaustive Witt-quotient route
    #[arg(long, global = true)]
    pub enum_cap: Option<u128>,
    /// Cap on the bar-complex weight m
    #[arg(long, global = true)]
    pub weight_cap: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute K_j(k[x,y]/(y^a - x^b), (x,y)) and cross-check routes
    Kgroup(KgroupArgs),
    /// Verify the bar-complex homology against the two-cell prediction
    Bar(BarArgs),
    /// Print the p-typical profile m' -> h and its total length
    Profile(ProfileArgs),
    /// Run the full verification grid (route agreement, length identity,
    /// bar homology)
    Verify(VerifyArgs),
    /// Prebuild or inspect the structure-polynomial table of a truncation
    /// set
    WittTable(WittTableArgs),
}

#[derive(Args, Debug)]
pub struct KgroupArgs {
    #[arg(long)]
    pub a: u64,
    #[arg(long)]
    pub b: u64,
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub e: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub j: i64,
    /// Comma-separated routes from {closed,witt,tc}
    #[arg(long, default_value = "closed,witt,tc")]
    pub routes: String,
}

#[derive(Args, Debug)]
pub struct BarArgs {
    #[arg(long)]
    pub a: u64,
    #[arg(long)]
    pub b: u64,
    #[arg(long, default_value_t = 10)]
    pub m_max: u64,
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    #[arg(long)]
    pub a: u64,
    #[arg(long)]
    pub b: u64,
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub r: u32,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Grid to run; only "default" is defined
    #[arg(long, default_value = "default", value_parser = ["default"])]
    pub grid: String,
    /// Largest bar weight to verify per pair
    #[arg(long, default_value_t = 10)]
    pub m_max: u64,
}

#[derive(Args, Debug)]
pub struct WittTableArgs {
    #[arg(long)]
    pub a: Option<u64>,
    #[arg(long)]
    pub b: Option<u64>,
    #[arg(long)]
    pub r: Option<u32>,
    /// Explicit comma-separated members (alternative to --a/--b/--r)
    #[arg(long)]
    pub members: Option<String>,
}

pub struct RunConfig {
    pub format_json: bool,
    pub store: TableStore,
    pub caps: Caps,
}

impl RunConfig {
    pub fn from_global(g: &GlobalOpts) -> Self {
        let dir = if g.no_disk_cache {
            None
        } else {
            g.cache_dir.clone().or_else(TableStore::default_dir)
        };
        let mut caps = Caps::default();
        if let Some(c) = g.enum_cap {
            caps.enum_cap = c;
        }
        if let Some(w) = g.weight_cap {
            caps.weight_cap = w;
        }
        RunConfig {
            format_json: g.format == "json",
            store: TableStore::new(dir),
            caps,
        }
    }
}

fn group_json(g: &AbelianGroupStructure) -> Value {
    g.to_json()
}

fn ms(start: Instant) -> Value {
    json!({ "total": start.elapsed().as_millis().to_string() })
}

/// One output payload: rendered text, canonical JSON, and the exit code.
pub struct Outcome {
    pub text: String,
    pub json: Value,
    pub exit: i32,
}

pub fn run_command(cli: &Cli) -> Result<Outcome> {
    let config = RunConfig::from_global(&cli.global);
    match &cli.command {
        Command::Kgroup(args) => cmd_kgroup(args, &config),
        Command::Bar(args) => cmd_bar(args, &config),
        Command::Profile(args) => cmd_profile(args, &config),
        Command::Verify(args) => cmd_verify(args, &config),
        Command::WittTable(args) => cmd_witt_table(args, &config),
    }
}

fn parse_routes(spec: &str) -> Result<RouteSelection> {
    let mut sel = RouteSelection {
        witt: false,
        tc: false,
    };
    for part in spec.split(',') {
        match part.trim() {
            "closed" | "closed_form" | "" => {}
            "witt" | "witt_quotient" => sel.witt = true,
            "tc" => sel.tc = true,
            other => {
                return Err(Error::invalid(format!(
                    "unknown route {other:?} (expected closed, witt, tc)"
                )))
            }
        }
    }
    Ok(sel)
}

pub fn cmd_kgroup(args: &KgroupArgs, config: &RunConfig) -> Result<Outcome> {
    let start = Instant::now();
    let routes = parse_routes(&args.routes)?;
    let pair = CuspPair::new(args.a, args.b, args.p, args.e)?;
    let field = Arc::new(FiniteField::new(args.p, args.e)?);
    let res = kgroups::k_group(&pair, args.j, &field, routes, &config.store, &config.caps)?;

    let mut route_map = Map::new();
    for (name, g) in &res.routes {
        route_map.insert(name.clone(), group_json(g));
    }
    let json = json!({
        "command": "kgroup",
        "inputs": {
            "a": args.a.to_string(),
            "b": args.b.to_string(),
            "p": args.p.to_string(),
            "e": args.e.to_string(),
            "j": args.j.to_string(),
            "routes": args.routes,
        },
        "result": {
            "group": group_json(&res.group),
            "pretty": res.group.to_string(),
            "routes": Value::Object(route_map),
            "skipped": res.skipped.iter().map(|(n, why)| json!({"route": n, "reason": why})).collect::<Vec<_>>(),
            "agree": res.agree,
            "length": res.length.to_string(),
        },
        "checks": {
            "route_agreement": res.agree,
            "length_identity": res.length_ok,
        },
        "timings_ms": ms(start),
    });
    let mut text = format!(
        "K_{}(F_{}^{}[x,y]/(y^{} - x^{}), (x,y)) = {}\n",
        res.j,
        res.p,
        res.e,
        res.a,
        res.b,
        res.group
    );
    for (name, g) in &res.routes {
        text.push_str(&format!("  route {name:<14} {g}\n"));
    }
    for (name, why) in &res.skipped {
        text.push_str(&format!("  route {name:<14} skipped: {why}\n"));
    }
    text.push_str(&format!(
        "  agree: {}   length: {} (expected {})\n",
        res.agree, res.length, res.length_expected
    ));
    let exit = if res.pass() {
        EXIT_OK
    } else {
        EXIT_DISAGREEMENT
    };
    Ok(Outcome { text, json, exit })
}

pub fn cmd_bar(args: &BarArgs, config: &RunConfig) -> Result<Outcome> {
    let start = Instant::now();
    // any valid (p, e) works: the bar complex does not involve the field
    let pair = CuspPair::new(args.a, args.b, next_prime_coprime(args.a * args.b), 1)?;
    let reports = cyclicbar::verify_bar(&pair, args.m_max, config.caps.weight_cap)?;
    let all_agree = reports.iter().all(|r| r.agree);

    let mut text = String::new();
    let mut items = Vec::new();
    for r in &reports {
        let groups: Vec<Value> = r
            .groups
            .iter()
            .map(|(deg, g)| json!({"degree": deg.to_string(), "group": group_json(g)}))
            .collect();
        let predicted: Vec<Value> = r
            .predicted
            .iter()
            .map(|(deg, g)| json!({"degree": deg.to_string(), "group": group_json(g)}))
            .collect();
        items.push(json!({
            "m": r.m.to_string(),
            "agree": r.agree,
            "computed": groups,
            "predicted": predicted,
        }));
        let desc: Vec<String> = r
            .groups
            .iter()
            .map(|(deg, g)| format!("H_{deg} = {g}"))
            .collect();
        text.push_str(&format!(
            "m = {:>3}  agree = {:<5}  {}\n",
            r.m,
            r.agree,
            if desc.is_empty() {
                "acyclic".to_string()
            } else {
                desc.join(", ")
            }
        ));
    }
    text.push_str(&format!("all weights agree: {all_agree}\n"));
    let json = json!({
        "command": "bar",
        "inputs": {
            "a": args.a.to_string(),
            "b": args.b.to_string(),
            "m_max": args.m_max.to_string(),
        },
        "result": { "reports": items, "all_agree": all_agree },
        "checks": { "bar_prediction": all_agree },
        "timings_ms": ms(start),
    });
    let exit = if all_agree { EXIT_OK } else { EXIT_DISAGREEMENT };
    Ok(Outcome { text, json, exit })
}

/// A prime not dividing n, for commands that need a pair but no field.
fn next_prime_coprime(n: u64) -> u64 {
    let mut p = 2;
    loop {
        let is_prime = p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0);
        if is_prime && n % p != 0 {
            return p;
        }
        p += 1;
    }
}

pub fn cmd_profile(args: &ProfileArgs, _config: &RunConfig) -> Result<Outcome> {
    let start = Instant::now();
    let pair = CuspPair::new(args.a, args.b, args.p, 1)?;
    let profile = pair.p_typical_profile(args.r)?;
    let sylvester = pair.sylvester_length(args.r);

    let entries: Vec<Value> = profile
        .entries()
        .iter()
        .map(|(m, h)| json!([m.to_string(), h.to_string()]))
        .collect();
    let total_matches = profile.total_length() == sylvester;
    let json = json!({
        "command": "profile",
        "inputs": {
            "a": args.a.to_string(),
            "b": args.b.to_string(),
            "p": args.p.to_string(),
            "r": args.r.to_string(),
        },
        "result": {
            "entries": entries,
            "total_length": profile.total_length().to_string(),
            "sylvester_length": sylvester.to_string(),
        },
        "checks": { "length_identity": total_matches },
        "timings_ms": ms(start),
    });
    let mut text = format!(
        "p-typical profile for (a,b) = ({},{}), p = {}, r = {}\n",
        args.a, args.b, args.p, args.r
    );
    for (m, h) in profile.entries() {
        text.push_str(&format!("  m' = {m:<6} h = {h}\n"));
    }
    text.push_str(&format!(
        "total length {} (Sylvester: {})\n",
        profile.total_length(),
        sylvester
    ));
    let exit = if total_matches { EXIT_OK } else { EXIT_DISAGREEMENT };
    Ok(Outcome { text, json, exit })
}

pub fn cmd_verify(args: &VerifyArgs, config: &RunConfig) -> Result<Outcome> {
    let start = Instant::now();
    let grid = GridSpec::default();
    let report = kgroups::verify_grid(&grid, &config.store, &config.caps);

    let mut bar_items = Vec::new();
    let mut bar_failures = 0usize;
    for &(a, b) in &grid.pairs {
        let pair = CuspPair::new(a, b, next_prime_coprime(a * b), 1)?;
        let reports = cyclicbar::verify_bar(&pair, args.m_max, config.caps.weight_cap)?;
        let agree = reports.iter().all(|r| r.agree);
        if !agree {
            bar_failures += 1;
        }
        bar_items.push(json!({
            "a": a.to_string(),
            "b": b.to_string(),
            "m_max": args.m_max.to_string(),
            "agree": agree,
        }));
    }

    let mut text = String::new();
    let mut points = Vec::new();
    for p in &report.points {
        points.push(json!({
            "a": p.a.to_string(),
            "b": p.b.to_string(),
            "p": p.p.to_string(),
            "e": p.e.to_string(),
            "r": p.r.to_string(),
            "routes": p.routes_run,
            "agree": p.agree,
            "length_ok": p.length_ok,
            "pass": p.pass,
            "detail": p.detail,
        }));
        text.push_str(&format!(
            "({},{}) p={} e={} r={}  routes={:<28}  {}\n",
            p.a,
            p.b,
            p.p,
            p.e,
            p.r,
            p.routes_run.join(","),
            if p.pass { "pass" } else { "FAIL" }
        ));
    }
    let failures = report.failures + bar_failures;
    text.push_str(&format!(
        "grid points: {} ({} failures); bar pairs: {} ({} failures)\n",
        report.points.len(),
        report.failures,
        grid.pairs.len(),
        bar_failures
    ));
    let json = json!({
        "command": "verify",
        "inputs": { "grid": args.grid, "m_max": args.m_max.to_string() },
        "result": {
            "points": points,
            "bar": bar_items,
            "failures": failures.to_string(),
        },
        "checks": {
            "route_agreement_grid": report.failures == 0,
            "bar_prediction": bar_failures == 0,
        },
        "timings_ms": ms(start),
    });
    let exit = if failures == 0 { EXIT_OK } else { EXIT_DISAGREEMENT };
    Ok(Outcome { text, json, exit })
}

pub fn cmd_witt_table(args: &WittTableArgs, config: &RunConfig) -> Result<Outcome> {
    let start = Instant::now();
    let set = match (&args.members, args.a, args.b, args.r) {
        (Some(spec), None, None, None) => {
            let members: Vec<u64> = spec
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::invalid(format!("bad member {s:?}")))
                })
                .collect::<Result<_>>()?;
            crate::witt::TruncationSet::new(members)?
        }
        (None, Some(a), Some(b), Some(r)) => {
            let pair = CuspPair::new(a, b, next_prime_coprime(a * b), 1)?;
            pair.truncation_set(r)?
        }
        _ => {
            return Err(Error::invalid(
                "pass either --members or all of --a, --b, --r",
            ))
        }
    };
    let table: Arc<StructureTable> = config.store.get_or_build(&set)?;
    let sum_terms: usize = table.sum_polys().iter().map(|p| p.num_terms()).sum();
    let prod_terms: usize = table.prod_polys().iter().map(|p| p.num_terms()).sum();
    let cache_path = config
        .store
        .cache_path(&set)
        .map(|p| p.display().to_string());
    let json = json!({
        "command": "witt-table",
        "inputs": {
            "members": set.members().iter().map(|m| m.to_string()).collect::<Vec<_>>(),
        },
        "result": {
            "size": set.len().to_string(),
            "sum_terms": sum_terms.to_string(),
            "prod_terms": prod_terms.to_string(),
            "cache_path": cache_path.clone().map(Value::String).unwrap_or(Value::Null),
        },
        "checks": { "integrality": true },
        "timings_ms": ms(start),
    });
    let mut text = format!(
        "truncation set {:?}: {} members\n",
        set.members(),
        set.len()
    );
    text.push_str(&format!(
        "sum polynomials: {sum_terms} terms; product polynomials: {prod_terms} terms\n"
    ));
    if let Some(p) = cache_path {
        text.push_str(&format!("cached at {p}\n"));
    }
    Ok(Outcome {
        text,
        json,
        exit: EXIT_OK,
    })
}

/// Canonical JSON rendering: serde_json maps are BTree-backed, so keys are
/// already sorted; one trailing newline.
pub fn render(outcome: &Outcome, json: bool) -> String {
    if json {
        format!("{}\n", serde_json::to_string(&outcome.json).unwrap())
    } else {
        outcome.text.clone()
    }
}
