use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tilecoh::epe::{assign_rho, omega_chain, RhoConvention};
use tilecoh::render::{render_star_svgs, write_atomic};
use tilecoh::report::{
    compare_tables, complex_json, groups_from_json, run_pipeline_with_artifacts, Report, Route, RunConfig,
};
use tilecoh::tiling::{grow_star_closure, load_system, AtlasOptions, Closure, EpeFixture, SystemSpec, TilingSystem};
use tilecoh::Verdict;

#[derive(Parser)]
#[command(name = "tilecoh", version, about = "Cohomology of substitution tiling spaces with rotations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify tile, edge and vertex stars.
    Atlas(AtlasArgs),
    /// Rotation numbers of edges and the winding chain on vertices.
    Omega(AtlasArgs),
    /// Run one or both cohomology routes.
    Cohomology(CohomologyArgs),
    /// Draw every star class as SVG.
    Render(RenderArgs),
    /// Compare the final tables of two reports.
    Compare { first: PathBuf, second: PathBuf },
}

#[derive(Args)]
struct AtlasArgs {
    system: PathBuf,
    #[arg(long)]
    max_level: Option<usize>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Spectral,
    MappingTorus,
    Both,
}

#[derive(Args)]
struct CohomologyArgs {
    /// One or more system files; several are run concurrently.
    #[arg(required = true)]
    systems: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    route: RouteArg,
    #[arg(long)]
    max_level: Option<usize>,
    /// Directory for `<name>.report.json` (and SVGs with --svg).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: bool,
    /// JSON (inline or a file) with `h0_t0` and `omega_class`.
    #[arg(long)]
    fixture_h0: Option<String>,
    /// Print the report JSON to stdout.
    #[arg(long)]
    json: bool,
    /// Include wall-clock timings in the report.
    #[arg(long)]
    timings: bool,
    /// Also write the approximant complex and its maps as JSON.
    #[arg(long)]
    export_complex: bool,
}

#[derive(Args)]
struct RenderArgs {
    system: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    max_level: Option<usize>,
}

/// Input problems exit with 2.
struct InputErr(String);

impl<E: std::fmt::Display> From<E> for InputErr {
    fn from(e: E) -> Self {
        InputErr(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Atlas(a) => atlas(&a, false),
        Cmd::Omega(a) => atlas(&a, true),
        Cmd::Cohomology(c) => cohomology(&c),
        Cmd::Render(r) => render(&r),
        Cmd::Compare { first, second } => compare(&first, &second),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(InputErr(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_tiling(path: &Path) -> Result<TilingSystem, InputErr> {
    match load_system(path)? {
        SystemSpec::Tiling(t) => Ok(t),
        SystemSpec::Word(_) => Err(InputErr(format!("{}: a word system has no star atlas", path.display()))),
    }
}

fn closure(sys: &TilingSystem, max_level: Option<usize>) -> Result<Closure, tilecoh::tiling::TilingError> {
    grow_star_closure(sys, AtlasOptions { max_level, representative_seed: None })
}

fn atlas(a: &AtlasArgs, with_omega: bool) -> Result<bool, InputErr> {
    let sys = load_tiling(&a.system)?;
    let c = match closure(&sys, a.max_level) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("atlas: {e}");
            return Ok(false);
        }
    };
    let at = &c.atlas;
    let mut ok = true;
    let mut rho_omega = None;
    if with_omega {
        match assign_rho(at, &RhoConvention::Minimal).and_then(|r| omega_chain(at, &r).map(|w| (r, w))) {
            Ok(x) => rho_omega = Some(x),
            Err(e) => {
                eprintln!("omega: {e}");
                ok = false;
            }
        }
    }
    if a.json {
        let mut v = serde_json::json!({
            "system": sys.name,
            "level": c.level,
            "counts": { "tiles": at.tiles.len(), "edges": at.edges.len(), "vertices": at.vertices.len() },
            "tiles": at.tiles,
            "edges": at.edges,
            "vertices": at.vertices,
        });
        if let Some((r, w)) = &rho_omega {
            v["rho"] = serde_json::json!(r.values);
            v["rho_denominator"] = serde_json::json!(r.denominator);
            v["omega"] = serde_json::json!(w.values);
        }
        println!("{}", serde_json::to_string_pretty(&v)?);
        return Ok(ok);
    }
    println!("{}: level {}, {} tiles, {} edges, {} vertices", sys.name, c.level, at.tiles.len(), at.edges.len(), at.vertices.len());
    for t in &at.tiles {
        println!("  T{} {:<8} sym {} count {}", t.id, t.label, t.symmetry_order, t.count);
    }
    for e in &at.edges {
        let rho = rho_omega.as_ref().map_or(String::new(), |(r, _)| format!("  rho {}/{}", r.values[e.id], r.denominator));
        println!("  E{} sym {} count {}{rho}", e.id, e.symmetry_order, e.count);
    }
    for v in &at.vertices {
        let w = rho_omega.as_ref().map_or(String::new(), |(_, w)| format!("  omega {:+}", w.values[v.id]));
        println!("  V{} sym {} count {}{w}", v.id, v.symmetry_order, v.count);
    }
    Ok(ok)
}

fn parse_fixture(arg: &str) -> Result<EpeFixture, InputErr> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| InputErr(format!("cannot read {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| InputErr(format!("fixture: {e}")))
}

fn stem(path: &Path) -> String {
    path.file_stem().and_then(|s| s.to_str()).unwrap_or("system").to_string()
}

fn cohomology(c: &CohomologyArgs) -> Result<bool, InputErr> {
    let route = match c.route {
        RouteArg::Spectral => Route::Spectral,
        RouteArg::MappingTorus => Route::MappingTorus,
        RouteArg::Both => Route::Both,
    };
    let fixture = c.fixture_h0.as_deref().map(parse_fixture).transpose()?;
    let cfg = RunConfig { route, max_level: c.max_level, fixture, timings: c.timings };
    let specs = c.systems.iter().map(|p| Ok((p.clone(), load_system(p)?))).collect::<Result<Vec<_>, InputErr>>()?;

    let results: Vec<Result<bool, InputErr>> = std::thread::scope(|s| {
        let handles: Vec<_> = specs.iter().map(|(p, spec)| s.spawn(|| one_system(p, spec, &cfg, c))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut ok = true;
    for r in results {
        ok &= r?;
    }
    Ok(ok)
}

fn one_system(path: &Path, spec: &SystemSpec, cfg: &RunConfig, c: &CohomologyArgs) -> Result<bool, InputErr> {
    let (report, art) = run_pipeline_with_artifacts(spec, cfg)?;
    let name = stem(path);
    if let Some(out) = &c.out {
        write_atomic(&out.join(format!("{name}.report.json")), report.to_json().as_bytes())?;
        if c.export_complex {
            if let Some((cx, sub, rot)) = &art.complex {
                let v = complex_json(cx, sub, rot);
                write_atomic(&out.join(format!("{name}.complex.json")), serde_json::to_string(&v)?.as_bytes())?;
            }
        }
        if c.svg {
            if let (SystemSpec::Tiling(sys), Some(cl)) = (spec, &art.closure) {
                write_svgs(sys, cl, &out.join(format!("{name}-svg")))?;
            }
        }
    }
    if c.json {
        print!("{}", report.to_json());
    } else {
        summary(&name, &report);
    }
    Ok(report.ok())
}

fn summary(name: &str, r: &Report) {
    let show = |gs: &[tilecoh::algebra::GradedGroup]| {
        gs.iter()
            .map(|g| g.group.as_ref().map_or_else(|| "?".to_string(), |h| h.to_string()))
            .collect::<Vec<_>>()
            .join(", ")
    };
    println!("{name}:");
    if let Some(s) = &r.routes.spectral {
        println!("  spectral       {}", show(&s.groups));
    }
    if let Some(m) = &r.routes.mapping_torus {
        println!("  mapping torus  {}", show(&m.groups));
    }
    for v in &r.verdicts {
        match &v.verdict {
            Verdict::Pass => println!("  PASS {}", v.name),
            Verdict::Fail { witness } => println!("  FAIL {}: {witness}", v.name),
        }
    }
    for e in &r.errors {
        println!("  ERROR {e}");
    }
}

fn write_svgs(sys: &TilingSystem, cl: &Closure, dir: &Path) -> Result<usize, InputErr> {
    let rho = assign_rho(&cl.atlas, &RhoConvention::Minimal).ok();
    let omega = rho.as_ref().and_then(|r| omega_chain(&cl.atlas, r).ok());
    let docs = render_star_svgs(sys, &cl.atlas, rho.as_ref(), omega.as_ref());
    for d in &docs {
        write_atomic(&dir.join(&d.name), d.content.as_bytes())?;
    }
    Ok(docs.len())
}

fn render(r: &RenderArgs) -> Result<bool, InputErr> {
    let sys = load_tiling(&r.system)?;
    match closure(&sys, r.max_level) {
        Ok(c) => {
            let n = write_svgs(&sys, &c, &r.out)?;
            println!("wrote {n} files to {}", r.out.display());
            Ok(true)
        }
        Err(e) => {
            eprintln!("atlas: {e}");
            Ok(false)
        }
    }
}

fn compare(a: &Path, b: &Path) -> Result<bool, InputErr> {
    let load = |p: &Path| -> Result<serde_json::Value, InputErr> {
        let text = std::fs::read_to_string(p).map_err(|e| InputErr(format!("cannot read {}: {e}", p.display())))?;
        Ok(serde_json::from_str(&text)?)
    };
    let ga = groups_from_json(&load(a)?)?;
    let gb = groups_from_json(&load(b)?)?;
    match compare_tables(&ga, &gb) {
        Verdict::Pass => {
            println!("PASS");
            Ok(true)
        }
        Verdict::Fail { witness } => {
            println!("FAIL {witness}");
            Ok(false)
        }
    }
}
