use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use hypthick::arithmetic::bounds::{rinj_bound, simplex_budget};
use hypthick::arithmetic::{
    dobrowolski_bound, epsilon_choice, is_cyclotomic_product, kronecker_factorization, mahler_measure,
    translation_length_lower,
};
use hypthick::constructions::shipped_group_json;
use hypthick::domain::dirichlet_domain_auto;
use hypthick::embedding::kb::kb_embed_with;
use hypthick::embedding::{
    falconer_direction, neighborhood_volume, slab_counts, theorem1_report, verify_thickness, EmbeddedGraph,
};
use hypthick::group::{enumerate_ball, injectivity_radius_lower, GroupSpec};
use hypthick::io::{self, Mesh};
use hypthick::scaling::{scaling_family, ScalingParams, ScalingReport};
use hypthick::skeleton::{
    cheeger_exact, cheeger_spectral, random_connected_regular, theorem1_rhs, CheegerEstimate, SkeletonGraph, EXACT_LIMIT,
};
use hypthick::voronoi::complex::MAX_WORD_LEN;
use hypthick::voronoi::pipeline::choose_basepoint;
use hypthick::voronoi::{check_good, degree_and_count_report, sample_singular_points, triangulate, PipelineParams};

use crate::{csv_table, read, CliError, Outcome, Result, RunConfig};

/// Largest ball radius beyond the domain diameter tried when deriving the packing scale.
const AUTO_BALL_SLACK: f64 = 4.0;

fn load<T>(path: &Path, parse: impl Fn(&str) -> std::result::Result<T, hypthick::io::IoError>) -> Result<T> {
    parse(&read(path)?).map_err(|source| CliError::Format {
        path: path.to_path_buf(),
        source,
    })
}

/// A group file path, or the name of a shipped group.
pub fn load_group(name: &str) -> Result<GroupSpec> {
    let p = Path::new(name);
    let text = if p.exists() {
        read(p)?
    } else if let Some(t) = shipped_group_json(name) {
        t.to_string()
    } else {
        return Err(CliError::Usage(format!("no group file or shipped group named `{name}`")));
    };
    Ok(GroupSpec::from_json(&text)?)
}

#[derive(Clone, Debug, PartialEq)]
pub enum EpsilonArg {
    Fixed(f64),
    Auto,
}

impl std::str::FromStr for EpsilonArg {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "auto" {
            return Ok(Self::Auto);
        }
        match s.parse::<f64>() {
            Ok(e) if e > 0.0 => Ok(Self::Fixed(e)),
            _ => Err(format!("expected a positive number or `auto`, got `{s}`")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TriangulateArgs {
    pub group: String,
    /// Falls back to the config, then to `auto`.
    pub epsilon: Option<EpsilonArg>,
    pub mesh: Option<PathBuf>,
    pub obj: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
struct EpsilonChoice {
    value: f64,
    source: &'static str,
    /// Derived from an uncertified injectivity radius or a fallback.
    heuristic: bool,
    note: Option<String>,
}

fn auto_epsilon(spec: &GroupSpec, cfg: &RunConfig) -> Result<EpsilonChoice> {
    let c = &cfg.constants;
    let note = match spec.volume.map(|vol| rinj_bound(vol, c)) {
        Some(Ok(r)) => {
            return Ok(EpsilonChoice {
                value: epsilon_choice(c.mu_n, c.m_n, r.simplified),
                source: "volume-bounds",
                heuristic: false,
                note: None,
            })
        }
        Some(Err(e)) => format!("volume bound unavailable ({e}); using the computed injectivity radius"),
        None => "group file has no volume; using the computed injectivity radius".into(),
    };
    let p0 = choose_basepoint(spec)?;
    let (domain, _) = dirichlet_domain_auto(spec, &p0, 2.0, 12.0, MAX_WORD_LEN)?;
    // grow the ball until it reaches twice the candidate radius plus the domain diameter
    let cap = 2.0 * domain.radius + AUTO_BALL_SLACK;
    let mut radius = (2.0 * domain.radius + 1.0).min(cap);
    let inj = loop {
        let ball = enumerate_ball(spec, &p0, radius, MAX_WORD_LEN)?;
        let inj = injectivity_radius_lower(&ball, Some(domain.radius));
        let need = 2.0 * inj.value + 2.0 * domain.radius;
        if inj.certified || radius >= cap || !need.is_finite() {
            break inj;
        }
        radius = need.max(radius + 0.5).min(cap);
    };
    let value = if inj.value.is_finite() {
        epsilon_choice(c.mu_n, c.m_n, inj.value)
    } else {
        0.5 * c.mu_n
    };
    Ok(EpsilonChoice {
        value,
        source: "injectivity-radius",
        heuristic: !inj.certified,
        note: Some(note),
    })
}

#[derive(Serialize)]
struct MembershipCheck {
    probes: usize,
    tolerance: f64,
    disagreements: usize,
}

pub fn triangulate_cmd(cfg: &RunConfig, a: &TriangulateArgs) -> Result<Outcome> {
    let spec = load_group(&a.group)?;
    let eps_arg = a
        .epsilon
        .clone()
        .or(cfg.triangulate.epsilon.map(EpsilonArg::Fixed))
        .unwrap_or(EpsilonArg::Auto);
    let eps = match eps_arg {
        EpsilonArg::Fixed(value) => EpsilonChoice {
            value,
            source: "given",
            heuristic: false,
            note: None,
        },
        EpsilonArg::Auto => auto_epsilon(&spec, cfg)?,
    };
    let mut params = PipelineParams::new(eps.value, cfg.seed);
    params.probes = cfg.triangulate.probes;
    let out = triangulate(&spec, &params)?;
    let t = &out.triangulation;

    let pm = t.verify_pseudomanifold();
    let sing = sample_singular_points(t, cfg.triangulate.singular_samples, out.complex.neighbor_radius, cfg.seed ^ 0x51);
    let good = check_good(t, &sing)?;
    let mut orders: Vec<usize> = good.singular_points.iter().map(|w| w.stabilizer_order).collect();
    orders.sort_unstable();
    let q = spec.q.map(|q| q as usize).unwrap_or(out.q);
    let degree = degree_and_count_report(t, &out.complex, q, out.volume, cfg.constants.mu_n);

    let c = &out.complex;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x3e3);
    let tol = cfg.tolerances.membership;
    let disagreements = (0..cfg.triangulate.membership_probes)
        .filter(|_| {
            let x = out.domain.cell.sample_uniform(&mut rng);
            let near = c.nearest_lift(&x);
            let inside = c.containing_cells(&x, tol);
            !inside.contains(&near) || inside.iter().any(|&i| i != near && c.violation(i, &x) < -tol)
        })
        .count();
    let membership = MembershipCheck {
        probes: cfg.triangulate.membership_probes,
        tolerance: tol,
        disagreements,
    };

    let chi = t.euler_characteristic();
    let pass = pm.ok && good.ok && degree.all_hold && disagreements == 0;
    let result = serde_json::json!({
        "group": spec.label,
        "dimension": t.dim,
        "epsilon": eps,
        "sites": out.set.len(),
        "counts": t.counts(),
        "euler_characteristic": chi,
        "volume": out.volume,
        "volume_file": spec.volume,
        "q": q,
        "q_computed": out.q,
        "domain_radius": out.domain.radius,
        "cone_point_orders": orders,
        "pseudomanifold": pm,
        "goodness": good,
        "degree_report": degree,
        "packing": out.set.packing,
        "covering": out.set.covering,
        "membership": membership,
    });
    let mesh = Mesh::from_triangulation(t);
    let obj = a.obj.as_ref().and_then(|_| mesh.to_obj());
    let mut o = Outcome::new("triangulate", pass, result).with_file(a.mesh.as_deref(), mesh.to_text());
    if let Some(obj) = obj {
        o = o.with_file(a.obj.as_deref(), obj);
    }
    Ok(o)
}

#[derive(Clone, Debug)]
pub enum GraphSource {
    Graph(PathBuf),
    Mesh(PathBuf),
    RandomRegular { n: usize, degree: usize },
}

impl GraphSource {
    pub fn load(&self, seed: u64) -> Result<SkeletonGraph> {
        match self {
            Self::Graph(p) => load(p, io::parse_graph),
            Self::Mesh(p) => Ok(load(p, Mesh::parse)?.skeleton()?),
            Self::RandomRegular { n, degree } => Ok(random_connected_regular(*n, *degree, seed)?),
        }
    }
}

#[derive(Serialize)]
struct GraphSummary {
    vertices: usize,
    edges: usize,
    max_degree: usize,
    connected: bool,
}

fn summary(g: &SkeletonGraph) -> GraphSummary {
    GraphSummary {
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        max_degree: g.max_degree(),
        connected: g.is_connected(),
    }
}

#[derive(Clone, Debug)]
pub struct EmbedArgs {
    pub source: GraphSource,
    pub dim: Option<usize>,
    pub out: Option<PathBuf>,
    pub graph_out: Option<PathBuf>,
}

pub fn embed_cmd(cfg: &RunConfig, a: &EmbedArgs) -> Result<Outcome> {
    let g = a.source.load(cfg.seed)?;
    let dim = a.dim.unwrap_or(cfg.embed.dim);
    let kb = kb_embed_with(&g, dim, cfg.seed, &cfg.embed.kb)?;
    let vol = neighborhood_volume(&kb.graph, 1.0, cfg.samples, cfg.seed ^ 0x7)?;
    let result = serde_json::json!({
        "graph": summary(&g),
        "dim": dim,
        "levels": kb.levels,
        "plate_side": kb.plate_side,
        "attempts": kb.attempts,
        "total_length": kb.graph.total_length(),
        "box_volume": kb.box_volume,
        "box_constant": kb.box_constant,
        "thickness": kb.thickness,
        "volume": vol,
    });
    Ok(Outcome::new("embed", kb.thickness.pass, result)
        .with_file(a.out.as_deref(), io::embedding_to_text(&kb.graph))
        .with_file(a.graph_out.as_deref(), io::graph_to_text(&g)))
}

pub fn load_embedding(path: &Path) -> Result<EmbeddedGraph> {
    load(path, io::parse_embedding)
}

pub fn verify_cmd(_cfg: &RunConfig, path: &Path) -> Result<Outcome> {
    let g = load_embedding(path)?;
    let r = verify_thickness(&g);
    let result = serde_json::json!({
        "dim": g.dim,
        "vertices": g.vertices.len(),
        "edges": g.edges.len(),
        "thickness": r,
    });
    Ok(Outcome::new("verify", r.pass, result))
}

#[derive(Clone, Debug)]
pub struct SlicesArgs {
    pub embedding: PathBuf,
    pub trials: Option<usize>,
    pub csv: Option<PathBuf>,
}

pub fn slices_cmd(cfg: &RunConfig, a: &SlicesArgs) -> Result<Outcome> {
    let g = load_embedding(&a.embedding)?;
    let mut fp = cfg.slices.clone();
    if let Some(t) = a.trials {
        fp.trials = t;
    }
    fp.volume_samples = cfg.samples;
    let s = falconer_direction(&g, 1.0, &fp, cfg.seed)?;
    // axis directions for comparison
    let axes: Vec<serde_json::Value> = (0..g.dim)
        .map(|k| {
            let mut d = vec![0.0; g.dim];
            d[k] = 1.0;
            let c = slab_counts(&g, &d, None, s.volume)?;
            Ok(serde_json::json!({ "axis": k, "max_count": c.max_count, "count_ratio": c.count_ratio }))
        })
        .collect::<Result<_>>()?;
    let mut csv = None;
    if a.csv.is_some() {
        let lo = s.first_slab.min(s.first_level);
        let hi = (s.first_slab + s.edge_counts.len() as i64).max(s.first_level + s.slice_areas.len() as i64);
        let rows: Vec<Vec<String>> = (lo..hi)
            .map(|j| {
                let e = usize::try_from(j - s.first_slab).ok().and_then(|i| s.edge_counts.get(i));
                let a = usize::try_from(j - s.first_level).ok().and_then(|i| s.slice_areas.get(i));
                vec![
                    j.to_string(),
                    e.map(|v| v.to_string()).unwrap_or_default(),
                    a.map(|v| format!("{v:?}")).unwrap_or_default(),
                ]
            })
            .collect();
        csv = Some(csv_table(&["level", "slab_edge_count", "slice_area"], &rows)?);
    }
    let result = serde_json::json!({ "falconer": fp, "best": s, "axes": axes });
    let mut o = Outcome::new("slices", true, result);
    if let Some(c) = csv {
        o = o.with_file(a.csv.as_deref(), c);
    }
    Ok(o)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheegerChoice {
    Auto,
    Exact,
    Spectral,
}

pub fn cheeger_estimate(g: &SkeletonGraph, m: CheegerChoice) -> Result<CheegerEstimate> {
    Ok(match m {
        CheegerChoice::Exact => cheeger_exact(g)?,
        CheegerChoice::Spectral => cheeger_spectral(g)?,
        CheegerChoice::Auto if g.vertex_count() <= EXACT_LIMIT => cheeger_exact(g)?,
        CheegerChoice::Auto => cheeger_spectral(g)?,
    })
}

pub fn cheeger_cmd(cfg: &RunConfig, source: &GraphSource, m: CheegerChoice) -> Result<Outcome> {
    let g = source.load(cfg.seed)?;
    let est = cheeger_estimate(&g, m)?;
    let result = serde_json::json!({ "graph": summary(&g), "estimate": est });
    Ok(Outcome::new("cheeger", true, result))
}

#[derive(Clone, Debug)]
pub enum BoundsArgs {
    Volume { vol: f64, n: usize, delta: f64 },
    Polynomial { coeffs: String, n: Option<usize> },
}

pub fn bounds_cmd(cfg: &RunConfig, a: &BoundsArgs) -> Result<Outcome> {
    let c = &cfg.constants;
    match a {
        BoundsArgs::Volume { vol, n, delta } => {
            let r = simplex_budget(*vol, *n, *delta, c)?;
            Ok(Outcome::new("bounds", true, r))
        }
        BoundsArgs::Polynomial { coeffs, n } => {
            let p = io::parse_polynomial(coeffs)?;
            let prec = cfg.tolerances.mahler_precision;
            let m = mahler_measure(&p, prec)?;
            let d = p.degree() as u64;
            let dob = dobrowolski_bound(d, c.c1).ok();
            let kron = kronecker_factorization(&p);
            let log_m = m.lower.ln();
            let result = serde_json::json!({
                "polynomial": p.to_string(),
                "coefficients": p,
                "degree": d,
                "mahler": m,
                "log_mahler_lower": log_m,
                "translation_length_lower": translation_length_lower(&p, prec)?,
                "cyclotomic_product": is_cyclotomic_product(&p),
                "kronecker": kron,
                "dobrowolski_bound": dob,
                "dobrowolski_holds": dob.map(|b| kron.is_some() || log_m >= b),
                "charpoly_degree_bound_field_degree": n.map(|n| d.div_ceil(n as u64 + 1)),
            });
            Ok(Outcome::new("bounds", true, result))
        }
    }
}

#[derive(Clone, Debug)]
pub enum Theorem1Args {
    Single {
        source: GraphSource,
        embedding: PathBuf,
        h_override: Option<f64>,
    },
    Family {
        sizes: Option<Vec<usize>>,
        degree: Option<usize>,
        csv: Option<PathBuf>,
    },
}

pub fn family_params(cfg: &RunConfig, sizes: Option<Vec<usize>>, degree: Option<usize>) -> ScalingParams {
    ScalingParams {
        sizes: sizes.unwrap_or_else(|| cfg.family.sizes.clone()),
        degree: degree.unwrap_or(cfg.family.degree),
        dim: cfg.embed.dim,
        seed: cfg.seed,
        volume_samples: cfg.samples,
        falconer: cfg.slices.clone(),
        kb: cfg.embed.kb.clone(),
    }
}

pub fn family_csv(r: &ScalingReport) -> Result<String> {
    let f = |x: Option<f64>| x.map(|v| format!("{v:?}")).unwrap_or_default();
    let rows: Vec<Vec<String>> = r
        .rows
        .iter()
        .map(|w| {
            vec![
                w.vertices.to_string(),
                w.edges.to_string(),
                format!("{:?}", w.volume),
                format!("{:?}", w.volume_stderr),
                format!("{:?}", w.box_volume),
                f(w.lambda2),
                format!("{:?}", w.cheeger_lower),
                format!("{:?}", w.theorem1.rhs),
                format!("{:?}", w.theorem1.ratio),
                f(w.max_slice),
                f(w.slice_ratio),
                w.thickness_pass.to_string(),
            ]
        })
        .collect();
    csv_table(
        &[
            "vertices",
            "edges",
            "volume",
            "volume_stderr",
            "box_volume",
            "lambda2",
            "cheeger_lower",
            "rhs",
            "ratio",
            "max_slice",
            "slice_ratio",
            "thick",
        ],
        &rows,
    )
}

pub fn theorem1_cmd(cfg: &RunConfig, a: &Theorem1Args) -> Result<Outcome> {
    match a {
        Theorem1Args::Single {
            source,
            embedding,
            h_override,
        } => {
            let g = source.load(cfg.seed)?;
            let e = load_embedding(embedding)?;
            if e.vertices.len() != g.vertex_count() || e.edges.len() != g.edge_count() {
                return Err(CliError::Usage(format!(
                    "embedding has {} vertices and {} edges, graph has {} and {}",
                    e.vertices.len(),
                    e.edges.len(),
                    g.vertex_count(),
                    g.edge_count()
                )));
            }
            let thick = verify_thickness(&e);
            let v = neighborhood_volume(&e, 1.0, cfg.samples, cfg.seed ^ 0x7)?;
            let (h, est) = match h_override {
                Some(h) => (*h, None),
                None => {
                    let est = cheeger_estimate(&g, CheegerChoice::Auto)?;
                    (est.lower, Some(est))
                }
            };
            let rhs = theorem1_rhs(h, g.vertex_count() as f64, e.dim);
            let result = serde_json::json!({
                "graph": summary(&g),
                "dim": e.dim,
                "h": h,
                "h_source": if h_override.is_some() { "override" } else { "cheeger-lower" },
                "cheeger": est,
                "volume_proxy": "vertex count",
                "thickness": thick,
                "volume": v,
                "ratio": theorem1_report(&v, rhs),
            });
            Ok(Outcome::new("report-theorem1", thick.pass, result))
        }
        Theorem1Args::Family { sizes, degree, csv } => {
            let p = family_params(cfg, sizes.clone(), *degree);
            let r = scaling_family(&p)?;
            let table = csv.as_ref().map(|_| family_csv(&r)).transpose()?;
            let mut o = Outcome::new("report-theorem1", r.all_thick, &r);
            if let Some(t) = table {
                o = o.with_file(csv.as_deref(), t);
            }
            Ok(o)
        }
    }
}
