//! End-to-end runs: atlas, rotation data, both cohomology routes and the
//! checks tying them together, collected into a serialisable report.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{invariant_factors, FgAbGroup, GradedGroup, IntMatrix};
use crate::ap::{
    collar, collar_word, hull_cohomology, invariants_table, mapping_torus_cohomology, quotient_complex,
    rotation_on_limits, ApError, ApproximantComplex, CellularSelfMap, CollarOptions, LimitDegree, RotationAction,
};
use crate::epe::{
    assign_rho, audit_omega, dagger_orders, omega_chain, rational_coboundary_check, rho_congruence_holds, EpeError,
    RhoConvention,
};
use crate::spectral::{omega_order, run_spectral, EpeInput, SpectralError, SpectralPage};
use crate::tiling::{
    grow_star_closure, AtlasOptions, Closure, EdgeClass, EpeFixture, SystemSpec, TileClass, TilingError, TilingSystem,
    VertexClass, WordSystem,
};
use crate::Verdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Spectral,
    MappingTorus,
    Both,
}

impl Route {
    pub fn spectral(self) -> bool {
        matches!(self, Route::Spectral | Route::Both)
    }

    pub fn mapping_torus(self) -> bool {
        matches!(self, Route::MappingTorus | Route::Both)
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub route: Route,
    pub max_level: Option<usize>,
    /// Replaces the system's own `epe` block.
    pub fixture: Option<EpeFixture>,
    /// Adds wall-clock timings to the report (which is then no longer
    /// byte-reproducible).
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { route: Route::Both, max_level: None, fixture: None, timings: false }
    }
}

/// Problems with the input itself; everything else ends up in the report.
#[derive(Debug, Error)]
pub enum InputError {
    #[error(transparent)]
    System(#[from] TilingError),
    #[error("the spectral route needs H_0(T^0) and the omega class (an `epe` block or --fixture-h0)")]
    MissingFixture,
    #[error("the spectral route needs a planar tiling")]
    NotPlanar,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReportError {
    #[error("report has no final group table")]
    MissingTable,
    #[error("malformed report: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct Counts {
    pub tiles: usize,
    pub edges: usize,
    pub vertices: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Orders {
    pub tiles: Vec<usize>,
    pub edges: Vec<usize>,
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AtlasSummary {
    pub level: usize,
    pub patch_tiles: usize,
    pub counts: Counts,
    pub orders: Orders,
    pub tiles: Vec<TileClass>,
    pub edges: Vec<EdgeClass>,
    pub vertices: Vec<VertexClass>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralSection {
    pub input: EpeInput,
    pub omega_order: Option<String>,
    #[serde(rename = "E2")]
    pub e2: SpectralPage,
    #[serde(rename = "Einf")]
    pub einf: SpectralPage,
    pub groups: Vec<GradedGroup>,
    pub flags: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitSummary {
    pub degree: usize,
    pub approximant: FgAbGroup,
    pub group: FgAbGroup,
    pub stage: usize,
}

impl LimitSummary {
    fn of(d: &LimitDegree) -> Self {
        LimitSummary { degree: d.degree, approximant: d.approximant.clone(), group: d.group(), stage: d.limit.stage }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MappingTorusSection {
    pub collared: usize,
    pub collar_level: usize,
    pub cells: Vec<usize>,
    pub quotient_cells: Vec<usize>,
    pub hull: Vec<LimitSummary>,
    pub quotient: Vec<LimitSummary>,
    pub invar: Vec<FgAbGroup>,
    pub coinvar: Vec<FgAbGroup>,
    /// Matrix of the rotation generator on each limit group, in a basis
    /// of the group (absent when it has torsion).
    pub rotation: Vec<Option<IntMatrix>>,
    /// Invariant factors of `id − f*` in that basis.
    pub id_minus_f: Vec<Option<Vec<String>>>,
    pub groups: Vec<GradedGroup>,
    pub flags: Vec<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Routes {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mapping_torus: Option<MappingTorusSection>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedVerdict {
    pub name: String,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub system: String,
    pub version: String,
    pub route: Route,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atlas: Option<AtlasSummary>,
    pub rho: Vec<i64>,
    pub rho_denominator: i64,
    pub omega: Vec<i64>,
    pub routes: Routes,
    pub verdicts: Vec<NamedVerdict>,
    pub errors: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl Report {
    fn new(system: &str, route: Route, timings: bool) -> Self {
        Report {
            system: system.to_string(),
            version: concat!("tilecoh ", env!("CARGO_PKG_VERSION")).to_string(),
            route,
            atlas: None,
            rho: Vec::new(),
            rho_denominator: 1,
            omega: Vec::new(),
            routes: Routes::default(),
            verdicts: Vec::new(),
            errors: Vec::new(),
            timings: timings.then(BTreeMap::new),
        }
    }

    fn verdict(&mut self, name: &str, v: Verdict) {
        self.verdicts.push(NamedVerdict { name: name.to_string(), verdict: v });
    }

    pub fn ok(&self) -> bool {
        self.errors.is_empty() && self.verdicts.iter().all(|v| v.verdict.passed())
    }

    /// 0 when everything passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.ok() {
            0
        } else {
            1
        }
    }

    /// The table of `Ȟ^k` of the rigid hull, preferring the mapping torus.
    pub fn final_groups(&self) -> Option<&[GradedGroup]> {
        self.routes
            .mapping_torus
            .as_ref()
            .map(|m| m.groups.as_slice())
            .or_else(|| self.routes.spectral.as_ref().map(|s| s.groups.as_slice()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }
}

/// Holds the intermediate objects of a run for callers that need more
/// than the report.
pub struct Artifacts {
    pub closure: Option<Closure>,
    pub complex: Option<(ApproximantComplex, CellularSelfMap, RotationAction)>,
    pub rotation_on_limits: Vec<crate::algebra::GroupHom>,
}

pub fn run_pipeline(spec: &SystemSpec, cfg: &RunConfig) -> Result<Report, InputError> {
    Ok(run_pipeline_with_artifacts(spec, cfg)?.0)
}

pub fn run_pipeline_with_artifacts(spec: &SystemSpec, cfg: &RunConfig) -> Result<(Report, Artifacts), InputError> {
    match spec {
        SystemSpec::Tiling(sys) => run_tiling(sys, cfg),
        SystemSpec::Word(w) => {
            if cfg.route.spectral() {
                return Err(InputError::NotPlanar);
            }
            Ok(run_word(w, cfg))
        }
    }
}

struct Clock<'a> {
    map: Option<&'a mut BTreeMap<String, f64>>,
    t: Instant,
}

impl Clock<'_> {
    fn lap(&mut self, name: &str) {
        if let Some(m) = self.map.as_deref_mut() {
            m.insert(name.to_string(), self.t.elapsed().as_secs_f64());
        }
        self.t = Instant::now();
    }
}

fn run_tiling(sys: &TilingSystem, cfg: &RunConfig) -> Result<(Report, Artifacts), InputError> {
    let fixture = cfg.fixture.clone().or_else(|| sys.epe.clone());
    if cfg.route.spectral() && fixture.is_none() {
        return Err(InputError::MissingFixture);
    }
    let mut report = Report::new(&sys.name, cfg.route, cfg.timings);
    let mut timings = BTreeMap::new();
    let mut clock = Clock { map: cfg.timings.then_some(&mut timings), t: Instant::now() };
    let mut art = Artifacts { closure: None, complex: None, rotation_on_limits: Vec::new() };

    // star atlas and rotation data
    let mut daggers = None;
    match grow_star_closure(sys, AtlasOptions { max_level: cfg.max_level, representative_seed: None }) {
        Err(e) => report.errors.push(format!("atlas: {e}")),
        Ok(closure) => {
            clock.lap("atlas");
            let a = &closure.atlas;
            report.atlas = Some(AtlasSummary {
                level: closure.level,
                patch_tiles: closure.mesh.tiles.len(),
                counts: Counts { tiles: a.tiles.len(), edges: a.edges.len(), vertices: a.vertices.len() },
                orders: Orders {
                    tiles: a.tiles.iter().map(|t| t.symmetry_order).collect(),
                    edges: a.edges.iter().map(|e| e.symmetry_order).collect(),
                    vertices: a.vertices.iter().map(|v| v.symmetry_order).collect(),
                },
                tiles: a.tiles.clone(),
                edges: a.edges.clone(),
                vertices: a.vertices.clone(),
            });
            if let Err(e) = rotation_data(sys, &closure, &mut report) {
                report.errors.push(format!("omega: {e}"));
            }
            daggers = Some(dagger_orders(a));
            clock.lap("omega");
            art.closure = Some(closure);
        }
    }

    // collared approximant: hull, rotation action, quotient
    let collared = collar(sys, CollarOptions { max_level: cfg.max_level });
    clock.lap("collar");
    let mut omega0 = None;
    match collared.map_err(|e| e.to_string()).and_then(|c| mapping_torus_section(&c, &mut report).map(|x| (c, x))) {
        Err(e) => report.errors.push(format!("mapping torus: {e}")),
        Ok((c, (section, rot))) => {
            omega0 = Some([section.quotient[0].group.clone(), section.quotient[1].group.clone(), section.quotient[2].group.clone()]);
            if cfg.route.mapping_torus() {
                report.routes.mapping_torus = Some(section);
            }
            art.rotation_on_limits = rot;
            art.complex = Some((c.complex, c.self_map, c.rotation));
        }
    }
    clock.lap("mapping_torus");

    if cfg.route.spectral() {
        match omega0 {
            None => report.errors.push("spectral: cohomology of the hull modulo rotations is unavailable".into()),
            Some(h) => {
                let fx = fixture.expect("checked above");
                let input = EpeInput { h_omega0: h, h0_t0: fx.h0_t0, omega_class: fx.omega_class, dagger_orders: daggers };
                match spectral_section(&input) {
                    Err(e) => report.errors.push(format!("spectral: {e}")),
                    Ok((s, v)) => {
                        report.verdict("spectral_rational_collapse", v);
                        report.routes.spectral = Some(s);
                    }
                }
            }
        }
        clock.lap("spectral");
    }

    if cfg.route == Route::Both {
        if let (Some(s), Some(m)) = (&report.routes.spectral, &report.routes.mapping_torus) {
            let v = compare_tables(&s.groups, &m.groups);
            report.verdict("routes_agree", v);
        }
    }
    if cfg.timings {
        report.timings = Some(timings);
    }
    Ok((report, art))
}

fn rotation_data(sys: &TilingSystem, closure: &Closure, report: &mut Report) -> Result<(), EpeError> {
    let atlas = &closure.atlas;
    let rho = assign_rho(atlas, &RhoConvention::Minimal)?;
    report.rho = rho.values.clone();
    report.rho_denominator = rho.denominator;
    report.verdict(
        "rho_congruence",
        if rho_congruence_holds(atlas, &rho) { Verdict::Pass } else { Verdict::fail("rho differs from tau_l - tau_r") },
    );
    let omega = omega_chain(atlas, &rho)?;
    report.omega = omega.values.clone();
    report.verdict("omega_coboundary", rational_coboundary_check(atlas, &rho, &omega));
    let audit = match audit_omega(closure, sys, &omega) {
        Ok(_) => Verdict::Pass,
        Err(e) => Verdict::fail(e.to_string()),
    };
    report.verdict("omega_audit", audit);
    Ok(())
}

fn snf_strings(m: &IntMatrix) -> Vec<String> {
    let (r, c) = m.shape();
    let mut d: Vec<String> = invariant_factors(m).iter().map(|x| x.to_string()).collect();
    d.resize(r.min(c), "0".to_string());
    d
}

type MtOut = (MappingTorusSection, Vec<crate::algebra::GroupHom>);

fn mapping_torus_section(c: &crate::ap::Collaring, report: &mut Report) -> Result<MtOut, String> {
    let hull = hull_cohomology(&c.complex, &c.self_map).map_err(|e| e.to_string())?;
    let rot = rotation_on_limits(&hull, &c.self_map, &c.rotation).map_err(|e| e.to_string())?;
    let (qcx, qsub) =
        quotient_complex(&c.complex, &c.self_map, &c.rotation, Some(&c.edge_paths)).map_err(|e: ApError| e.to_string())?;
    let quotient = hull_cohomology(&qcx, &qsub).map_err(|e| e.to_string())?;
    let section = torus_from_parts(c.classes.len(), c.level, &c.complex, &qcx, &hull, &quotient, &rot, report)?;
    Ok((section, rot))
}

#[allow(clippy::too_many_arguments)]
fn torus_from_parts(
    collared: usize,
    level: usize,
    cx: &ApproximantComplex,
    qcx: &ApproximantComplex,
    hull: &[LimitDegree],
    quotient: &[LimitDegree],
    rot: &[crate::algebra::GroupHom],
    report: &mut Report,
) -> Result<MappingTorusSection, String> {
    let table = invariants_table(rot).map_err(|e| e.to_string())?;
    let groups = mapping_torus_cohomology(rot).map_err(|e| e.to_string())?;
    let flags: Vec<String> =
        groups.iter().filter(|g| g.is_ambiguous()).map(|g| format!("extension_ambiguous:H{}", g.degree)).collect();
    let rotation: Vec<Option<IntMatrix>> = rot.iter().map(|r| r.free_matrix()).collect();
    let id_minus_f = rotation
        .iter()
        .map(|m| m.as_ref().map(|m| snf_strings(&IntMatrix::identity(m.rows()).sub(m))))
        .collect();

    // rank of invariants against the quotient
    let mismatch = (0..table.invariants.len().min(quotient.len()))
        .find(|&k| table.invariants[k].free_rank != quotient[k].group().free_rank);
    report.verdict(
        "invariants_match_quotient",
        match mismatch {
            None => Verdict::Pass,
            Some(k) => Verdict::fail(format!("degree {k}: rank invar {} vs quotient {}", table.invariants[k].free_rank, quotient[k].group().free_rank)),
        },
    );
    let euler: i64 = groups.iter().map(|g| if g.degree % 2 == 0 { g.rank() as i64 } else { -(g.rank() as i64) }).sum();
    report.verdict(
        "mapping_torus_euler_characteristic",
        if euler == 0 { Verdict::Pass } else { Verdict::fail(format!("Euler characteristic {euler}")) },
    );
    let h0: Vec<usize> = quotient.iter().map(|d| d.group().free_rank).collect();
    let at = |k: usize| h0.get(k).copied().unwrap_or(0);
    let bad = groups.iter().find(|g| g.rank() != at(g.degree) + if g.degree > 0 { at(g.degree - 1) } else { 0 });
    report.verdict(
        "mapping_torus_rational_collapse",
        match bad {
            None => Verdict::Pass,
            Some(g) => Verdict::fail(format!("degree {}: rank {}", g.degree, g.rank())),
        },
    );
    Ok(MappingTorusSection {
        collared,
        collar_level: level,
        cells: cx.cells.clone(),
        quotient_cells: qcx.cells.clone(),
        hull: hull.iter().map(LimitSummary::of).collect(),
        quotient: quotient.iter().map(LimitSummary::of).collect(),
        invar: table.invariants,
        coinvar: table.coinvariants,
        rotation,
        id_minus_f,
        groups,
        flags,
    })
}

fn spectral_section(input: &EpeInput) -> Result<(SpectralSection, Verdict), SpectralError> {
    let run = run_spectral(input)?;
    let flags =
        run.groups.iter().filter(|g| g.is_ambiguous()).map(|g| format!("extension_ambiguous:H{}", g.degree)).collect();
    Ok((
        SpectralSection {
            input: input.clone(),
            omega_order: omega_order(input).map(|o| o.to_string()),
            e2: run.e2,
            einf: run.einf,
            groups: run.groups,
            flags,
        },
        run.collapse,
    ))
}

fn run_word(w: &WordSystem, cfg: &RunConfig) -> (Report, Artifacts) {
    let mut report = Report::new(&w.name, cfg.route, false);
    let mut art = Artifacts { closure: None, complex: None, rotation_on_limits: Vec::new() };
    let res = collar_word(w).map_err(|e| e.to_string()).and_then(|c| {
        let hull = hull_cohomology(&c.complex, &c.self_map).map_err(|e| e.to_string())?;
        let action = RotationAction::trivial(&c.complex);
        let rot = rotation_on_limits(&hull, &c.self_map, &action).map_err(|e| e.to_string())?;
        let s = torus_from_parts(c.collared.len(), c.level, &c.complex, &c.complex, &hull, &hull, &rot, &mut report)?;
        art.complex = Some((c.complex, c.self_map, action));
        art.rotation_on_limits = rot;
        Ok(s)
    });
    match res {
        Ok(s) => report.routes.mapping_torus = Some(s),
        Err(e) => report.errors.push(format!("mapping torus: {e}")),
    }
    (report, art)
}

/// Degree-by-degree comparison of two final tables.
pub fn compare_tables(a: &[GradedGroup], b: &[GradedGroup]) -> Verdict {
    let n = a.len().max(b.len());
    for k in 0..n {
        let (x, y) = (a.get(k), b.get(k));
        let same = match (x, y) {
            (Some(x), Some(y)) => match (&x.group, &y.group) {
                (Some(g), Some(h)) => g == h,
                (None, None) => x.pieces == y.pieces,
                _ => false,
            },
            _ => false,
        };
        if !same {
            let show = |g: Option<&GradedGroup>| match g {
                None => "missing".to_string(),
                Some(g) => g.group.as_ref().map_or_else(|| "ambiguous".to_string(), |h| h.to_string()),
            };
            return Verdict::fail(format!("degree {k}: {} vs {}", show(x), show(y)));
        }
    }
    Verdict::Pass
}

pub fn compare_routes(r1: &Report, r2: &Report) -> Result<Verdict, ReportError> {
    let a = r1.final_groups().ok_or(ReportError::MissingTable)?;
    let b = r2.final_groups().ok_or(ReportError::MissingTable)?;
    Ok(compare_tables(a, b))
}

/// Final table of a serialised report.
pub fn groups_from_json(v: &serde_json::Value) -> Result<Vec<GradedGroup>, ReportError> {
    let routes = v.get("routes").ok_or(ReportError::MissingTable)?;
    let table = routes
        .get("mapping_torus")
        .and_then(|m| m.get("groups"))
        .or_else(|| routes.get("spectral").and_then(|s| s.get("groups")))
        .ok_or(ReportError::MissingTable)?;
    let arr = table.as_array().ok_or_else(|| ReportError::Malformed("groups is not a list".into()))?;
    arr.iter()
        .map(|g| {
            let degree = g.get("degree").and_then(|d| d.as_u64()).ok_or_else(|| ReportError::Malformed("degree".into()))?;
            let parse = |x: &serde_json::Value| -> Result<FgAbGroup, ReportError> {
                serde_json::from_value(x.clone()).map_err(|e| ReportError::Malformed(e.to_string()))
            };
            let pieces = g
                .get("pieces")
                .and_then(|p| p.as_array())
                .ok_or_else(|| ReportError::Malformed("pieces".into()))?
                .iter()
                .map(parse)
                .collect::<Result<Vec<_>, _>>()?;
            let group = match g.get("group") {
                None | Some(serde_json::Value::Null) => None,
                Some(x) => Some(parse(x)?),
            };
            Ok(GradedGroup { degree: degree as usize, pieces, group })
        })
        .collect()
}

/// Cells, boundary matrices and self-map matrices of the approximant.
pub fn complex_json(cx: &ApproximantComplex, sub: &CellularSelfMap, rot: &RotationAction) -> serde_json::Value {
    serde_json::json!({
        "cells": cx.cells,
        "boundaries": cx.boundaries,
        "substitution": sub.chain,
        "rotation": { "order": rot.order, "chain": rot.chain.chain },
    })
}
