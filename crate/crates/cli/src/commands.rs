use std::io::Write;
use std::path::{Path, PathBuf};

use mgroupoid::connection::HomogeneityVerdict;
use mgroupoid::groupoid::interchange;
use mgroupoid::io::{
    christoffel_dump, connection_report_to_string, gauge_to_string, load_body, load_gauge, report_to_string,
    save_body, synthesize_body, torsion_dump, ConnectionReportFile, IoError, ReportFile, SynthesisSpec,
};
use mgroupoid::iso_solver::{symmetry_group_estimate, SolverOptions};
use mgroupoid::pipeline::{analyze as run_pipeline, connection_from_gauge, AnalysisConfig, AnalysisError};
use mgroupoid::uniformity::{UniformityError, Verdict};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NON_UNIFORM: u8 = 2;
pub const EXIT_INDETERMINATE: u8 = 3;
pub const EXIT_INVALID_GROUPOID: u8 = 4;
pub const EXIT_USAGE: u8 = 10;
pub const EXIT_IO: u8 = 11;
pub const EXIT_PARSE: u8 = 12;
pub const EXIT_VALIDATION: u8 = 13;
pub const EXIT_SOLVER: u8 = 14;
pub const EXIT_CONNECTION: u8 = 15;
pub const EXIT_CONFIG: u8 = 16;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(EXIT_CONFIG, message)
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        let code = match e {
            IoError::Io { .. } => EXIT_IO,
            IoError::Parse { .. } => EXIT_PARSE,
            IoError::Validation(_) => EXIT_VALIDATION,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        let code = match e {
            AnalysisError::Config(_) | AnalysisError::Uniformity(UniformityError::Options(_)) => EXIT_CONFIG,
            AnalysisError::Uniformity(_) => EXIT_SOLVER,
            AnalysisError::Connection(_) => EXIT_CONNECTION,
        };
        Failure::new(code, e.to_string())
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn make_dir(path: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(path).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

macro_rules! say {
    ($w:expr, $($arg:tt)*) => {
        writeln!($w, $($arg)*).map_err(|e| Failure::new(EXIT_IO, format!("stdout: {e}")))?
    };
}

pub struct AnalyzeArgs {
    pub input: PathBuf,
    pub out: PathBuf,
    pub eps_iso: Option<f64>,
    pub eps_reject: Option<f64>,
    pub tol_torsion: Option<f64>,
    pub seed: Option<u64>,
    pub starts: Option<usize>,
}

pub fn analyze(args: &AnalyzeArgs, w: &mut dyn Write) -> Result<u8, Failure> {
    let body = load_body(&args.input)?;
    let mut config = AnalysisConfig::default();
    let u = &mut config.uniformity;
    if let Some(v) = args.eps_iso {
        u.solver.eps_iso = v;
    }
    if let Some(v) = args.eps_reject {
        u.eps_reject = v;
    }
    if let Some(v) = args.seed {
        u.solver.seed = v;
    }
    if let Some(v) = args.starts {
        u.solver.starts = v;
    }
    config.tol_torsion = args.tol_torsion;
    config.validate().map_err(Failure::config)?;

    let analysis = run_pipeline(&body.model, &config)?;
    make_dir(&args.out)?;
    let report = ReportFile::new(&args.input.display().to_string(), &config, &analysis);
    write(&args.out.join("report.toml"), &report_to_string(&report))?;
    write(&args.out.join("gauge.toml"), &gauge_to_string(&report.gauge))?;
    let r = &analysis.report;
    say!(w, "verdict: {}", r.verdict.as_str());
    say!(w, "archetype node: {}", r.archetype_node);
    say!(w, "accepted nodes: {} of {}", r.accepted_nodes(), r.node_status.len());
    say!(w, 
        "residuals: max {:e}, mean {:e}, p95 {:e}",
        r.residual_stats.max, r.residual_stats.mean, r.residual_stats.p95
    );
    say!(w, "symmetry: {} discrete element(s), continuous dimension {}", r.symmetry.discrete_elements.len(), r.symmetry.continuous_dimension);
    for f in r.failures.iter().take(10) {
        match f.best_residual {
            Some(res) => say!(w, "failure: {} -> {} residual {res:e}", f.source, f.target),
            None => say!(w, "failure: {} -> {} diverged", f.source, f.target),
        }
    }
    if r.failures.len() > 10 {
        say!(w, "... {} failures in total", r.failures.len());
    }
    if let Some(c) = &analysis.connection {
        write(&args.out.join("christoffel.dat"), &christoffel_dump(&c.christoffel))?;
        write(&args.out.join("torsion.dat"), &torsion_dump(&c.torsion))?;
        say!(w, "homogeneity: {} (max |T| = {:e}, tol {:e})", c.verdict.as_str(), c.torsion.max_abs, c.tol_torsion);
    }
    Ok(match r.verdict {
        Verdict::Uniform => EXIT_OK,
        Verdict::NonUniform => EXIT_NON_UNIFORM,
        Verdict::Indeterminate => EXIT_INDETERMINATE,
    })
}

pub fn connection(
    input: &Path,
    gauge_path: &Path,
    out: &Path,
    tol_torsion: Option<f64>,
    seed: Option<u64>,
    w: &mut dyn Write,
) -> Result<u8, Failure> {
    let body = load_body(input)?;
    let gauge_file = load_gauge(gauge_path)?;
    if &gauge_file.grid != body.model.grid() {
        return Err(Failure::new(EXIT_VALIDATION, "gauge grid differs from the body grid"));
    }
    if let Some(t) = tol_torsion {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::config(format!("tol_torsion must be positive, got {t}")));
        }
    }
    let gauge = gauge_file.to_gauge()?;
    let opts = SolverOptions {
        seed: seed.unwrap_or(0),
        ..SolverOptions::default()
    };
    let node = gauge_file.archetype_node;
    if !body.model.grid().contains(node) {
        return Err(Failure::new(EXIT_VALIDATION, format!("archetype node {node} is off the grid")));
    }
    let symmetry = symmetry_group_estimate(&body.model, node, &opts).map_err(|e| Failure::new(EXIT_SOLVER, e.to_string()))?;
    let outcome = connection_from_gauge(&gauge, &symmetry, tol_torsion).map_err(|e| Failure::new(EXIT_CONNECTION, e.to_string()))?;
    make_dir(out)?;
    let report = ConnectionReportFile::new(
        &input.display().to_string(),
        &gauge_path.display().to_string(),
        gauge.continuity_defect(),
        &outcome,
        &symmetry,
    );
    write(&out.join("connection.toml"), &connection_report_to_string(&report))?;
    write(&out.join("christoffel.dat"), &christoffel_dump(&outcome.christoffel))?;
    write(&out.join("torsion.dat"), &torsion_dump(&outcome.torsion))?;
    say!(w, 
        "homogeneity: {} (max |T| = {:e}, tol {:e})",
        outcome.verdict.as_str(),
        outcome.torsion.max_abs,
        outcome.tol_torsion
    );
    if outcome.verdict == HomogeneityVerdict::IndeterminateGauge {
        say!(w, "note: continuous symmetry; another gauge may remove the torsion");
    }
    Ok(EXIT_OK)
}

pub fn synthesize(spec: &SynthesisSpec, out: &Path, w: &mut dyn Write) -> Result<u8, Failure> {
    let file = synthesize_body(spec)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        make_dir(parent)?;
    }
    save_body(out, &file)?;
    if let Some(t) = &file.ground_truth {
        say!(w, "wrote {} ({})", out.display(), t.description);
        say!(w, "expected verdict: {}", t.verdict.as_str());
        if let Some(h) = t.homogeneity {
            say!(w, "expected homogeneity: {}", h.as_str());
        }
        let default_tol = 10.0 * spec.h * spec.h;
        if let Some(max) = t.torsion_max.filter(|m| *m > 0.0 && *m <= default_tol) {
            say!(w, "note: torsion {max} is below the default tolerance 10·h² = {default_tol}; pass --tol-torsion to analyze");
        }
    }
    Ok(EXIT_OK)
}

pub fn validate_groupoid(input: &Path, w: &mut dyn Write) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(input).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", input.display())))?;
    let g = interchange::parse(&text).map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?;
    let report = g.validate_axioms();
    let orbits = g.orbit_decomposition();
    say!(w, "objects: {}, arrows: {}", g.num_objects(), g.num_arrows());
    say!(w, "valid: {}", if report.is_valid() { "yes" } else { "no" });
    say!(w, "transitive: {}", if orbits.is_transitive { "yes" } else { "no" });
    say!(w, "orbits: {}", orbits.blocks.len());
    for (k, block) in orbits.blocks.iter().enumerate() {
        let order = match g.vertex_group(block[0]) {
            Ok(vg) => vg.order().to_string(),
            Err(e) => format!("undefined ({e})"),
        };
        say!(w, "orbit {k}: {} object(s), vertex group order {order}", block.len());
    }
    for v in &report.violations {
        say!(w, "violation: {v}");
    }
    Ok(if report.is_valid() { EXIT_OK } else { EXIT_INVALID_GROUPOID })
}
