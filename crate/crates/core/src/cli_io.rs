//! Spec parsing, pipeline drivers and deterministic CSV/SVG output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::curve_model::{CurveSpec, PlaneCurve, Point};
use crate::equidistants::{
    equidistant, equidistant_hausdorff, extended_front, gensing_scan, grid_pitch, pullback_residual, wigner_caustic,
    EquidistantBranch, EquidistantField,
};
use crate::error::{Error, Result};
use crate::gcs_analysis::{
    assemble_gcs, classify_point, criminant, css_envelope, wigner_cusps, GcsOptions, Polyline,
};
use crate::generating_family::{
    realization_spec, realized_caustic, wl_membership, CausticOptions, FamilySpec, GeneratingFamily,
    RealizationLabel,
};
use crate::numeric::{bounding_box, hausdorff};
use crate::parallel_chords::{find_bitangent_pairs, find_parallel_branches, ParallelBranch, ParallelPair};

pub fn parse_curve_spec(text: &str) -> Result<PlaneCurve> {
    let spec: CurveSpec = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    PlaneCurve::from_spec(spec)
}

pub fn serialize_curve_spec(curve: &PlaneCurve) -> Result<String> {
    Ok(serde_json::to_string(curve.spec())?)
}

pub fn parse_family_spec(text: &str) -> Result<FamilySpec> {
    let spec: FamilySpec = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    spec.validate()?;
    Ok(spec)
}

/// Nine significant digits, plain notation for moderate magnitudes.
pub fn format_number(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x == 0.0 { "0".into() } else { format!("{x}") };
    }
    let exponent = x.abs().log10().floor() as i32;
    if !(-5..9).contains(&exponent) {
        return format!("{x:.8e}");
    }
    let decimals = (8 - exponent).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push_numbers(&mut self, values: &[f64]) {
        self.rows.push(values.iter().map(|&v| format_number(v)).collect());
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Write via a temporary file in the destination directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn emit_csv(table: &Table, path: &Path) -> Result<()> {
    write_atomic(path, table.to_csv().as_bytes())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub name: String,
    pub class: String,
    pub polylines: Vec<Polyline>,
    pub markers: Vec<Point>,
}

impl Layer {
    pub fn new(name: &str, class: &str) -> Layer {
        Layer { name: name.into(), class: class.into(), polylines: Vec::new(), markers: Vec::new() }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Scene {
    pub layers: Vec<Layer>,
}

impl Scene {
    pub fn push(&mut self, layer: Layer) {
        self.layers.push(layer);
    }

    fn all_points(&self) -> Vec<Point> {
        self.layers
            .iter()
            .flat_map(|l| l.polylines.iter().flatten().chain(l.markers.iter()).copied())
            .collect()
    }

    pub fn bounding_box(&self) -> Result<(Point, Point)> {
        let pts = self.all_points();
        if pts.is_empty() {
            return Err(Error::EmptyScene);
        }
        Ok(bounding_box(&pts))
    }

    /// Larger side of the bounding box, or 1 for a degenerate scene.
    pub fn scale(&self) -> Result<f64> {
        let (lo, hi) = self.bounding_box()?;
        let extent = (hi - lo).amax();
        Ok(if extent > 0.0 { extent } else { 1.0 })
    }
}

const SVG_STYLE: &str = "path{fill:none;stroke-linejoin:round}\
.curve{stroke:#000000}.wigner{stroke:#d62728}.css{stroke:#1f77b4}\
.middle{stroke:#2ca02c}.criminant{stroke:#9467bd}.equidistant{stroke:#ff7f0e}\
.caustic{stroke:#8c564b}.marker{fill:#000000}";

pub fn render_svg(scene: &Scene) -> Result<String> {
    if scene.layers.is_empty() {
        return Err(Error::EmptyScene);
    }
    let (lo, hi) = scene.bounding_box()?;
    let scale = scene.scale()?;
    let margin = 0.05 * scale;
    let (x0, y0) = (lo.x - margin, -hi.y - margin);
    let (w, h) = ((hi.x - lo.x) + 2.0 * margin, (hi.y - lo.y) + 2.0 * margin);
    let f = format_number;
    let stroke = f(0.003 * scale);
    let radius = f(0.008 * scale);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">",
        f(x0),
        f(y0),
        f(w.max(margin)),
        f(h.max(margin))
    );
    let _ = writeln!(out, "<style>{SVG_STYLE}</style>");
    for layer in &scene.layers {
        let _ = writeln!(out, "<g id=\"{}\" class=\"{}\" stroke-width=\"{stroke}\">", layer.name, layer.class);
        for line in &layer.polylines {
            if line.is_empty() {
                continue;
            }
            let mut d = String::new();
            for (i, p) in line.iter().enumerate() {
                let _ = write!(d, "{}{} {}", if i == 0 { "M" } else { " L" }, f(p.x), f(-p.y));
            }
            let _ = writeln!(out, "<path d=\"{d}\"/>");
        }
        for p in &layer.markers {
            let _ = writeln!(out, "<circle class=\"marker\" cx=\"{}\" cy=\"{}\" r=\"{radius}\"/>", f(p.x), f(-p.y));
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn emit_svg(scene: &Scene, path: &Path) -> Result<()> {
    write_atomic(path, render_svg(scene)?.as_bytes())
}

pub fn curve_polyline(curve: &PlaneCurve, samples: usize) -> Polyline {
    (0..=samples).map(|i| curve.eval(std::f64::consts::TAU * i as f64 / samples as f64)).collect()
}

pub fn equidistant_polylines(branches: &[EquidistantBranch]) -> Vec<Polyline> {
    branches
        .iter()
        .filter(|b| !b.fully_degenerate)
        .map(|b| {
            let mut pts = b.points();
            if b.closed && !pts.is_empty() {
                pts.push(pts[0]);
            }
            pts
        })
        .collect()
}

pub fn equidistant_table(branches: &[EquidistantBranch]) -> Table {
    let mut table = Table::new(&["s", "t", "x", "y", "regular"]);
    for b in branches {
        for s in &b.samples {
            table.push_numbers(&[s.s, s.t, s.point.x, s.point.y, if s.regular { 1.0 } else { 0.0 }]);
        }
    }
    table
}

pub fn branch_table(curve: &PlaneCurve, branches: &[ParallelBranch]) -> Table {
    let mut table = Table::new(&["s", "t", "gap", "a_plus_x", "a_plus_y", "a_minus_x", "a_minus_y"]);
    for b in branches {
        for p in &b.pairs {
            let (a, c) = (curve.eval(p.s), curve.eval(p.t));
            table.push_numbers(&[p.s, p.t, p.tangent_angle_gap, a.x, a.y, c.x, c.y]);
        }
    }
    table
}

pub fn polyline_table(label: &str, lines: &[Polyline]) -> Table {
    let mut table = Table::new(&[label, "x", "y"]);
    for (i, line) in lines.iter().enumerate() {
        for p in line {
            table.push_numbers(&[i as f64, p.x, p.y]);
        }
    }
    table
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaRange {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

pub fn parse_lambda_range(text: &str) -> std::result::Result<LambdaRange, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected lo:hi:n, got {text:?}"));
    }
    let lo: f64 = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    let steps: usize = parts[2].trim().parse().map_err(|e| format!("{e}"))?;
    if !(lo < hi) || steps < 2 {
        return Err(format!("need lo < hi and n ≥ 2, got {text:?}"));
    }
    Ok(LambdaRange { lo, hi, steps })
}

fn parse_pair(text: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = text.split_once(',').ok_or_else(|| format!("expected s,t, got {text:?}"))?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

#[derive(Debug, Parser)]
#[command(name = "gcs", version, about = "Affine equidistants, Wigner caustics and centre symmetry sets of planar curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct CurveArgs {
    /// Curve spec JSON file.
    #[arg(long)]
    pub curve: PathBuf,
    /// Parameter grid size for the parallel-pair search.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
}

#[derive(Debug, Args, Clone)]
pub struct OutputArgs {
    /// CSV output; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// JSON lines report.
    #[arg(long = "json-report")]
    pub json_report: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Affine λ-equidistant.
    Equidistant {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Wigner caustic and its cusps.
    Wigner {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Centre symmetry set and its cusps.
    Css {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Bitangent chords swept over a λ window.
    Criminant {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long = "lambda-range", allow_hyphen_values = true, value_parser = parse_lambda_range, default_value = "-0.5:1.5:201")]
        lambda_range: LambdaRange,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Extended front samples over a λ range.
    Front {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long = "lambda-range", allow_hyphen_values = true, value_parser = parse_lambda_range, default_value = "-0.5:1.5:201")]
        lambda_range: LambdaRange,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Full decomposition with classification reports.
    Gcs {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long = "lambda-range", allow_hyphen_values = true, value_parser = parse_lambda_range, default_value = "-0.5:1.5:201")]
        lambda_range: LambdaRange,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Classify the germ at one parallel pair.
    Classify {
        #[command(flatten)]
        curve: CurveArgs,
        /// Pair parameters as s,t.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
        pair: (f64, f64),
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.5)]
        lambda: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sample the caustic of a normal-form realization or a family spec.
    Realize {
        #[arg(long, conflicts_with = "family")]
        label: Option<String>,
        /// Family spec JSON file.
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.5)]
        lambda: f64,
        /// Fixed q coordinates for a planar section, comma separated.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        section: Option<Vec<f64>>,
        #[arg(long = "kappa-points", default_value_t = 201)]
        kappa_points: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the invariant suite on a curve.
    Check {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Successful completion, or a degenerate input reported without failure of the computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Done,
    Degenerate(String),
    ChecksFailed(usize),
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Done => 0,
            Outcome::Degenerate(_) => 4,
            Outcome::ChecksFailed(_) => 3,
        }
    }
}

fn load_curve(args: &CurveArgs) -> Result<PlaneCurve> {
    parse_curve_spec(&std::fs::read_to_string(&args.curve)?)
}

fn write_table(table: &Table, output: &OutputArgs) -> Result<()> {
    match &output.out {
        Some(path) => emit_csv(table, path),
        None => {
            std::io::stdout().write_all(table.to_csv().as_bytes())?;
            Ok(())
        }
    }
}

fn write_json_lines<T: Serialize>(items: &[T], path: &Path) -> Result<()> {
    let mut text = String::new();
    for item in items {
        text.push_str(&serde_json::to_string(item)?);
        text.push('\n');
    }
    write_atomic(path, text.as_bytes())
}

fn curve_layer(curve: &PlaneCurve) -> Layer {
    let mut layer = Layer::new("curve", "curve");
    layer.polylines.push(curve_polyline(curve, 1024));
    layer
}

fn degenerate_outcome(branches: &[EquidistantBranch], what: &str) -> Outcome {
    if !branches.is_empty() && branches.iter().all(|b| b.fully_degenerate) {
        Outcome::Degenerate(format!("{what} collapses to a point"))
    } else {
        Outcome::Done
    }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Equidistant { curve, lambda, output } => {
            let c = load_curve(&curve)?;
            let branches = find_parallel_branches(&c, curve.grid)?;
            let eq = equidistant(&c, lambda, &branches);
            write_table(&equidistant_table(&eq), &output)?;
            if let Some(svg) = &output.svg {
                let mut scene = Scene::default();
                scene.push(curve_layer(&c));
                let mut layer = Layer::new("equidistant", "equidistant");
                layer.polylines = equidistant_polylines(&eq);
                layer.markers = eq.iter().filter(|b| b.fully_degenerate).map(|b| b.samples[0].point).collect();
                scene.push(layer);
                emit_svg(&scene, svg)?;
            }
            Ok(degenerate_outcome(&eq, "equidistant"))
        }
        Command::Wigner { curve, output } => {
            let c = load_curve(&curve)?;
            let branches = find_parallel_branches(&c, curve.grid)?;
            let w = wigner_caustic(&c, &branches);
            let cusps = wigner_cusps(&c, &branches);
            write_table(&equidistant_table(&w), &output)?;
            if let Some(path) = &output.json_report {
                write_json_lines(&cusps.cusps, path)?;
            }
            if let Some(svg) = &output.svg {
                let mut scene = Scene::default();
                scene.push(curve_layer(&c));
                let mut layer = Layer::new("wigner", "wigner");
                layer.polylines = equidistant_polylines(&w);
                layer.markers = cusps.cusps.iter().map(|c| c.point).collect();
                if cusps.fully_degenerate {
                    layer.markers.extend(w.iter().map(|b| b.samples[0].point));
                }
                scene.push(layer);
                emit_svg(&scene, svg)?;
            }
            Ok(degenerate_outcome(&w, "Wigner caustic"))
        }
        Command::Css { curve, output } => {
            let c = load_curve(&curve)?;
            let branches = find_parallel_branches(&c, curve.grid)?;
            let css = css_envelope(&c, &branches);
            write_table(&polyline_table("polyline", &css.polylines), &output)?;
            if let Some(path) = &output.json_report {
                write_json_lines(&css.cusps.cusps, path)?;
            }
            if let Some(svg) = &output.svg {
                let mut scene = Scene::default();
                scene.push(curve_layer(&c));
                let mut layer = Layer::new("css", "css");
                layer.polylines = css.polylines.clone();
                layer.markers = css.cusps.cusps.iter().map(|c| c.point).collect();
                scene.push(layer);
                emit_svg(&scene, svg)?;
            }
            Ok(if css.cusps.fully_degenerate {
                Outcome::Degenerate("centre symmetry set collapses to a point".into())
            } else {
                Outcome::Done
            })
        }
        Command::Criminant { curve, lambda_range, output } => {
            let c = load_curve(&curve)?;
            let branches = find_parallel_branches(&c, curve.grid)?;
            let bitangents = find_bitangent_pairs(&c, &branches);
            let lines = criminant(&c, &bitangents, (lambda_range.lo, lambda_range.hi));
            write_table(&polyline_table("chord", &lines), &output)?;
            if let Some(svg) = &output.svg {
                let mut scene = Scene::default();
                scene.push(curve_layer(&c));
                let mut layer = Layer::new("criminant", "criminant");
                layer.polylines = lines;
                scene.push(layer);
                emit_svg(&scene, svg)?;
            }
            Ok(Outcome::Done)
        }
        Command::Front { curve, lambda_range, output } => {
            let c = load_curve(&curve)?;
            let branches = find_parallel_branches(&c, curve.grid)?;
            let bitangents = find_bitangent_pairs(&c, &branches);
            let front = extended_front(&c, &branches, &bitangents, lambda_range.lo, lambda_range.hi, lambda_range.steps);
            let mut table = Table::new(&["lambda", "x", "y", "tangency_order", "regular"]);
            for s in front.iter().flatten() {
                table.push_numbers(&[
                    s.lambda,
                    s.point.x,
                    s.point.y,
                    s.fiber_tangency_order as f64,
                    if s.regular { 1.0 } else { 0.0 },
                ]);
            }
            write_table(&table, &output)?;
            Ok(Outcome::Done)
        }
        Command::Gcs { curve, lambda_range, output } => {
            let c = load_curve(&curve)?;
            let options = GcsOptions {
                grid_n: curve.grid,
                lambda_min: lambda_range.lo,
                lambda_max: lambda_range.hi,
                lambda_steps: lambda_range.steps,
                criminant_window: (lambda_range.lo, lambda_range.hi),
            };
            let gcs = assemble_gcs(&c, &options)?;
            if output.out.is_some() {
                write_table(&branch_table(&c, &gcs.branches), &output)?;
            }
            if let Some(path) = &output.json_report {
                write_json_lines(&gcs.reports, path)?;
            }
            if let Some(svg) = &output.svg {
                let mut scene = Scene::default();
                scene.push(curve_layer(&c));
                let mut wigner = Layer::new("wigner", "wigner");
                wigner.polylines = equidistant_polylines(&gcs.wigner);
                wigner.markers = gcs.wigner_cusps.cusps.iter().map(|c| c.point).collect();
                if gcs.fully_degenerate {
                    wigner.markers.extend(gcs.wigner.iter().map(|b| b.samples[0].point));
                }
                scene.push(wigner);
                let mut css = Layer::new("css", "css");
                css.polylines = gcs.css.polylines.clone();
                css.markers = gcs.css.cusps.cusps.iter().map(|c| c.point).collect();
                scene.push(css);
                let mut middle = Layer::new("middle_axes", "middle");
                middle.polylines = gcs.sweep.middle_axes.clone();
                scene.push(middle);
                let mut crim = Layer::new("criminant", "criminant");
                crim.polylines = gcs.criminant.clone();
                scene.push(crim);
                emit_svg(&scene, svg)?;
            }
            if output.out.is_none() && output.json_report.is_none() && output.svg.is_none() {
                let mut text = String::new();
                for r in &gcs.reports {
                    text.push_str(&serde_json::to_string(r)?);
                    text.push('\n');
                }
                std::io::stdout().write_all(text.as_bytes())?;
            }
            Ok(if gcs.fully_degenerate {
                Outcome::Degenerate("Wigner caustic collapses to a point".into())
            } else {
                Outcome::Done
            })
        }
        Command::Classify { curve, pair, lambda, output } => {
            let c = load_curve(&curve)?;
            let report = classify_point(&c, &ParallelPair::new(&c, pair.0, pair.1), lambda)?;
            match &output.json_report.or(output.out) {
                Some(path) => write_json_lines(&[report], path)?,
                None => println!("{}", serde_json::to_string(&report)?),
            }
            Ok(Outcome::Done)
        }
        Command::Realize { label, family, m, lambda, section, kappa_points, output } => {
            let spec = match (&label, &family) {
                (Some(l), _) => realization_spec(&l.parse::<RealizationLabel>()?, m, lambda)?,
                (None, Some(path)) => parse_family_spec(&std::fs::read_to_string(path)?)?,
                (None, None) => return Err(Error::Schema("realize needs --label or --family".into())),
            };
            let mut options = CausticOptions::for_spec(&spec);
            options.section = section;
            options.kappa_points = kappa_points;
            let caustic = realized_caustic(&spec, &options)?;
            let mut header: Vec<String> = (1..=spec.m).map(|i| format!("p{i}")).collect();
            header.extend((1..=spec.m).map(|i| format!("q{i}")));
            let mut table = Table { header, rows: Vec::new() };
            for p in &caustic.points {
                table.push_numbers(&p.x);
            }
            write_table(&table, &output)?;
            Ok(Outcome::Done)
        }
        Command::Check { curve, output } => {
            let c = load_curve(&curve)?;
            let results = check_invariants(&c, curve.grid)?;
            let mut text = String::new();
            for r in &results {
                let _ = writeln!(text, "{} {} {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
            }
            match &output.out {
                Some(path) => write_atomic(path, text.as_bytes())?,
                None => std::io::stdout().write_all(text.as_bytes())?,
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            Ok(if failed == 0 { Outcome::Done } else { Outcome::ChecksFailed(failed) })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult { name: name.into(), passed, detail }
}

/// Invariants that must hold for any valid curve.
pub fn check_invariants(curve: &PlaneCurve, grid_n: usize) -> Result<Vec<CheckResult>> {
    let branches = find_parallel_branches(curve, grid_n)?;
    let pitch = grid_pitch(curve, grid_n);
    let mut out = Vec::new();

    let worst = (0..=20).map(|i| pullback_residual(-1.0 + 0.15 * i as f64 + 0.01)).fold(0.0, f64::max);
    out.push(check("chord_transform_pullback", worst < 1e-12, format!("max residual {worst:e}")));

    let (a, b) = (EquidistantField::new(curve, &branches, 0.3), EquidistantField::new(curve, &branches, 0.7));
    let d = equidistant_hausdorff(&a, &b);
    out.push(check("lambda_reflection", d < 2.0 * pitch, format!("hausdorff {d:e}")));

    for lambda in [0.3, 0.5] {
        let scan = gensing_scan(curve, lambda, grid_n)?;
        let field = EquidistantField::new(curve, &branches, lambda);
        let direct: Vec<Point> = field.samples().to_vec();
        let d = if scan.is_empty() || direct.is_empty() { 0.0 } else { hausdorff(&scan, &direct) };
        out.push(check(&format!("critical_set_agreement_{lambda}"), d < 2.0 * pitch, format!("hausdorff {d:e}")));
    }

    let wigner = wigner_caustic(curve, &branches);
    let mut members = 0;
    let mut tested = 0;
    for w in wigner.iter().filter(|w| !w.fully_degenerate) {
        for s in w.samples.iter().step_by((w.samples.len() / 50).max(1)) {
            let pair = ParallelPair::new(curve, s.s, s.t);
            let Ok(jets) = crate::generating_family::fit_local_jets(curve, &pair) else { continue };
            let family = GeneratingFamily::new(&jets.family_spec(0.5))?;
            let (p, q) = jets.frame.coordinates(&s.point);
            tested += 1;
            if wl_membership(&family, &[p, q], &[jets.chord_seed(0.5)], jets.scale).member {
                members += 1;
            }
        }
    }
    out.push(check("front_membership", members == tested, format!("{members}/{tested} members")));

    if curve.is_support_form() {
        let cusps = wigner_cusps(curve, &branches);
        let css = css_envelope(curve, &branches);
        let ok = cusps.fully_degenerate
            || (cusps.parity_ok && css.cusps.parity_ok && cusps.count() <= css.cusps.count());
        out.push(check(
            "cusp_parity",
            ok,
            format!("wigner {} css {}", cusps.count(), css.cusps.count()),
        ));
    }
    Ok(out)
}
