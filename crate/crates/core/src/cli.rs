//! Command line driver: parses a map, runs one computation and renders text, JSON or DOT.

use std::fmt::Write as _;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::json;

use crate::berktree::{BerkPoint, FiniteTree, Leaf, TypeIPoint, PREIMAGE};
use crate::crucial::{crucial_set, crucial_tree, preimage_target, support_tree};
use crate::dynamics::{analyze, classify_type_i};
use crate::error::{Error, Result};
use crate::forms::MapRep;
use crate::minresloc::{git_report, min_res_loc};
use crate::ordres::{candidate_directions, ordres_at, ordres_on_ray, slope};
use crate::ring::{fmt_exp, parse_puiseux, parse_rational_function, ResidueField, P1};

#[derive(Parser, Debug)]
#[command(name = "minres", version, about = "Minimal resultant loci of rational maps over the Berkovich line")]
pub struct Cli {
    /// Residue field: Q or F<p>.
    #[arg(long, global = true, default_value = "Q")]
    pub residue: String,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Minimal resultant locus with cross-validation certificates.
    Minresloc { map: String },
    /// Crucial set and weights.
    Crucial { map: String },
    /// Weights at every vertex of the support tree.
    Weights { map: String },
    /// Value of ordRes at a point, or along a ray with --dir.
    Ordres {
        map: String,
        #[arg(long, default_value = "0,0")]
        at: String,
        #[arg(long)]
        dir: Option<String>,
    },
    /// Directional slopes at a point (all candidate directions unless --dir is given).
    Slope {
        map: String,
        #[arg(long, default_value = "0,0")]
        at: String,
        #[arg(long)]
        dir: Option<String>,
    },
    /// Reduction type at a point, or the type of a classical fixed point with --fixed.
    Classify {
        map: String,
        #[arg(long, default_value = "0,0")]
        at: String,
        /// Classical fixed point (a Puiseux polynomial or `inf`).
        #[arg(long)]
        fixed: Option<String>,
    },
    /// Semistability and stability of the reduction at a point.
    Semistable {
        map: String,
        #[arg(long, default_value = "0,0")]
        at: String,
    },
    /// The support tree, or the crucial tree with --crucial.
    Tree {
        map: String,
        #[arg(long)]
        dot: bool,
        #[arg(long)]
        crucial: bool,
    },
}

/// Parses a map such as `(z^3 - (1+t)*z^2)/(-t)` and checks it has degree at least 2.
pub fn parse_map(text: &str, field: ResidueField) -> Result<MapRep> {
    MapRep::from_rational_function(&parse_rational_function(text, field)?)
}

/// `inf` or a residue element such as `3/2`.
pub fn parse_direction(text: &str, field: ResidueField) -> Result<P1> {
    let s = text.trim();
    if matches!(s, "inf" | "∞" | "infinity") {
        return Ok(P1::Infinity);
    }
    let x = BigRational::from_str(s).map_err(|e| Error::Parse { pos: 0, msg: format!("direction: {e}") })?;
    field
        .from_rational(&x)
        .map(P1::Finite)
        .ok_or_else(|| Error::Parse { pos: 0, msg: format!("{s} is not in the residue field") })
}

fn render<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn leaf_label(l: &Leaf) -> String {
    match &l.point {
        TypeIPoint::Infinity => "inf".into(),
        TypeIPoint::Finite(loc) => match loc.as_exact() {
            Some(r) => r.to_string(),
            None => format!("root near {}", loc.center()),
        },
    }
}

fn tree_json(tree: &FiniteTree) -> serde_json::Value {
    json!({
        "vertices": tree.vertices,
        "edges": tree.edges,
        "leaves": tree.leaves.iter().map(|l| json!({
            "vertex": l.vertex,
            "direction": l.direction,
            "root": leaf_label(l),
            "multiplicity": l.multiplicity,
            "fixed": l.is_fixed(),
        })).collect::<Vec<_>>(),
    })
}

/// Runs one command, returning its output.
pub fn run(cli: &Cli) -> Result<String> {
    let field = ResidueField::parse(&cli.residue)?;
    let mut out = String::new();
    match &cli.command {
        Command::Minresloc { map } => {
            let phi = parse_map(map, field)?;
            let r = min_res_loc(&phi)?;
            if cli.json {
                return Ok(render(&r));
            }
            writeln!(out, "MinResLoc: {}", r.shape).unwrap();
            writeln!(out, "min ordRes: {}", fmt_exp(&r.min_value)).unwrap();
            let c = r.certificates;
            writeln!(
                out,
                "certificates: descent {}, barycenter {}, balance {}, semistable {}",
                c.descent_ok, c.barycenter_ok, c.balance_ok, c.semistable_ok
            )
            .unwrap();
            if let Some(m) = &r.crucial_measure {
                writeln!(out, "crucial measure (d = {}):", m.degree).unwrap();
                for a in &m.atoms {
                    writeln!(out, "  {}  weight {}  {}", a.point, a.weight, a.classification.classification.label()).unwrap();
                }
            }
        }
        Command::Crucial { map } => {
            let phi = parse_map(map, field)?;
            let m = crucial_set(&phi)?;
            if cli.json {
                return Ok(render(&m));
            }
            writeln!(out, "crucial set (d = {}, total weight {}):", m.degree, m.total_weight()).unwrap();
            for a in &m.atoms {
                writeln!(out, "  {}  weight {}  {}", a.point, a.weight, a.classification.classification.label()).unwrap();
            }
        }
        Command::Weights { map } => {
            let phi = parse_map(map, field)?;
            let tree = support_tree(&phi)?;
            let mut reports = Vec::new();
            for p in &tree.vertices {
                reports.push(analyze(&phi, p)?.weight()?);
            }
            if cli.json {
                return Ok(render(&reports));
            }
            for r in &reports {
                writeln!(
                    out,
                    "{}  weight {}  {}  (fixed directions {}, shearing {})",
                    r.point,
                    r.weight,
                    r.classification.label(),
                    r.v_count,
                    r.shearing
                )
                .unwrap();
            }
        }
        Command::Ordres { map, at, dir } => {
            let phi = parse_map(map, field)?;
            let p = BerkPoint::parse(at, field)?;
            match dir {
                None => {
                    let v = ordres_at(&phi, &p)?;
                    if cli.json {
                        return Ok(render(&json!({ "point": p, "ordres": fmt_exp(&v) })));
                    }
                    writeln!(out, "ordRes at {p} = {}", fmt_exp(&v)).unwrap();
                }
                Some(d) => {
                    let v = parse_direction(d, field)?;
                    let paf = ordres_on_ray(&phi, &p, &v)?;
                    if cli.json {
                        return Ok(render(&json!({ "point": p, "direction": v, "ray": paf })));
                    }
                    writeln!(out, "ordRes from {p} in direction {v}: value {} at distance 0", fmt_exp(&paf.base)).unwrap();
                    for (k, m) in paf.slopes.iter().enumerate() {
                        let from = if k == 0 { "0".to_string() } else { fmt_exp(&paf.breakpoints[k - 1]) };
                        let to = paf.breakpoints.get(k).map_or("inf".to_string(), fmt_exp);
                        writeln!(out, "  slope {m} on [{from}, {to}]").unwrap();
                    }
                }
            }
        }
        Command::Slope { map, at, dir } => {
            let phi = parse_map(map, field)?;
            let p = BerkPoint::parse(at, field)?;
            let dirs = match dir {
                Some(d) => vec![parse_direction(d, field)?],
                None => candidate_directions(&phi, &p)?,
            };
            let mut rows = Vec::new();
            for v in dirs {
                let m = slope(&phi, &p, &v)?;
                rows.push((v, m));
            }
            if cli.json {
                let rows: Vec<_> = rows.iter().map(|(v, m)| json!({ "direction": v, "slope": m })).collect();
                return Ok(render(&json!({ "point": p, "slopes": rows })));
            }
            for (v, m) in rows {
                writeln!(out, "slope at {p} toward {v}: {m}").unwrap();
            }
        }
        Command::Classify { map, at, fixed } => {
            let phi = parse_map(map, field)?;
            if let Some(a) = fixed {
                let alpha = match a.trim() {
                    "inf" | "∞" => None,
                    s => Some(parse_puiseux(s, field)?),
                };
                let k = classify_type_i(&phi, alpha.as_ref())?;
                if cli.json {
                    return Ok(render(&json!({ "fixedPoint": a, "classification": k.label() })));
                }
                writeln!(out, "fixed point {a}: {}", k.label()).unwrap();
                return Ok(out);
            }
            let p = BerkPoint::parse(at, field)?;
            let l = analyze(&phi, &p)?;
            let info = l.info();
            let w = l.weight()?;
            let mut dirs = Vec::new();
            for v in candidate_directions(&phi, &p)? {
                dirs.push(json!({ "direction": v, "multiplicities": l.multiplicities(&v) }));
            }
            if cli.json {
                return Ok(render(&json!({ "reduction": info, "weight": w, "directions": dirs })));
            }
            writeln!(out, "{p}: {}", info.kind.label()).unwrap();
            writeln!(out, "local degree {}, weight {}", info.deg_red, w.weight).unwrap();
            for v in candidate_directions(&phi, &p)? {
                let m = l.multiplicities(&v);
                let opt = |x: Option<usize>| x.map_or("-".to_string(), |x| x.to_string());
                writeln!(out, "  direction {v}: s = {}, m = {}, nF = {}, nFred = {}", m.s, opt(m.m), m.nf, opt(m.nfred))
                    .unwrap();
            }
        }
        Command::Semistable { map, at } => {
            let phi = parse_map(map, field)?;
            let p = BerkPoint::parse(at, field)?;
            let g = git_report(&phi, &p)?;
            if cli.json {
                return Ok(render(&json!({ "point": p, "semistable": g.semistable, "stable": g.stable })));
            }
            writeln!(out, "semistable: {}", g.semistable).unwrap();
            writeln!(out, "stable: {}", g.stable).unwrap();
        }
        Command::Tree { map, dot, crucial } => {
            let phi = parse_map(map, field)?;
            let tree = if *crucial { crucial_tree(&crucial_set(&phi)?)? } else { support_tree(&phi)? };
            if *dot {
                return Ok(tree.to_dot());
            }
            if cli.json {
                return Ok(render(&tree_json(&tree)));
            }
            if !*crucial {
                writeln!(out, "preimages of {}", preimage_target(&phi)?).unwrap();
            }
            for (i, v) in tree.vertices.iter().enumerate() {
                writeln!(out, "v{i}: {v}").unwrap();
            }
            for e in &tree.edges {
                writeln!(out, "v{} -- v{}  length {}  direction {}", e.parent, e.child, fmt_exp(&e.length), e.parent_dir)
                    .unwrap();
            }
            for l in &tree.leaves {
                let root = leaf_label(l);
                let kind = match (l.is_fixed(), l.sources & PREIMAGE != 0) {
                    (true, true) => "fixed, preimage",
                    (true, false) => "fixed",
                    _ => "preimage",
                };
                writeln!(out, "v{} -> {root} ({kind}, multiplicity {}) direction {}", l.vertex, l.multiplicity, l.direction)
                    .unwrap();
            }
        }
    }
    Ok(out)
}

/// Parses `args` (including the program name), runs, and returns `(stdout, stderr, exit code)`.
pub fn main_with_args<I, T>(args: I) -> (String, String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            return if code == 0 { (e.to_string(), String::new(), 0) } else { (String::new(), e.to_string(), code) };
        }
    };
    match run(&cli) {
        Ok(s) => (s, String::new(), 0),
        Err(e) => (String::new(), format!("error: {e}\n"), e.exit_code()),
    }
}
