//! Run configuration, task dispatch and JSON report emission for the
//! `ruby-tcc` binary.
//!
//! A run is described by a [`RunConfig`], read from a JSON file and/or
//! command-line flags (flags win). Every run writes one JSON document: a
//! [`Report`] on success or an [`ErrorReport`] on failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::code::{code_report, CodeFamily, CodeReport, StabilizerGroup};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_color_code, build_toric, build_two_body, Couplings, EffectiveRule};
use crate::iom::{
    all_plaquette_ioms, iom_report, logical_algebra, plaquette_relations, IomReport,
    PlaquetteRelation, Relation,
};
use crate::lattice::{build_ruby, build_square, contract_triangles, Diagnostics, Validate};
use crate::spectral::{
    compare_effective, lowest_eigenpairs, CompareOptions, EffectiveComparison, SolverOptions,
    SpectrumReport,
};
use crate::VERSION;

pub const TOOL: &str = "ruby-tcc";

/// Environment variable holding the log filter, e.g. `info` or `debug`.
pub const LOG_ENV: &str = "RUBY_TCC_LOG";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Validate,
    Ioms,
    Logicals,
    Code,
    Spectrum,
    CompareEffective,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum LatticeKind {
    /// Ruby lattice with `lx x ly` unit cells.
    #[default]
    Ruby,
    /// Square lattice of side `l` for the toric code.
    Square,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    #[serde(rename = "type", default)]
    pub kind: LatticeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lx: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ly: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    #[serde(default)]
    pub rule: EffectiveRule,
    #[serde(default = "default_pattern_tol")]
    pub pattern_tol: f64,
    #[serde(default = "default_gap_ratio")]
    pub gap_ratio: f64,
}

fn default_pattern_tol() -> f64 {
    CompareOptions::default().pattern_tol
}

fn default_gap_ratio() -> f64 {
    CompareOptions::default().gap_ratio
}

impl Default for CompareConfig {
    fn default() -> Self {
        let d = CompareOptions::default();
        CompareConfig {
            rule: d.rule,
            pattern_tol: d.pattern_tol,
            gap_ratio: d.gap_ratio,
        }
    }
}

fn default_couplings() -> Couplings {
    Couplings {
        jx: 1.0,
        jy: 1.0,
        jz: 1.0,
    }
}

fn default_eigs() -> usize {
    12
}

/// Everything that determines a run. The resolved value is echoed into
/// every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: Task,
    #[serde(default)]
    pub lattice: LatticeSpec,
    #[serde(default = "default_couplings")]
    pub couplings: Couplings,
    /// Number of eigenvalues for `spectrum`.
    #[serde(default = "default_eigs")]
    pub eigs: usize,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub compare: CompareConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(task: Task) -> Self {
        RunConfig {
            task,
            lattice: LatticeSpec::default(),
            couplings: default_couplings(),
            eigs: default_eigs(),
            solver: SolverOptions::default(),
            compare: CompareConfig::default(),
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Fill lattice defaults and check task-specific requirements.
    pub fn resolve(mut self) -> Result<Self> {
        let lat = &mut self.lattice;
        match lat.kind {
            LatticeKind::Ruby => {
                if lat.l.is_some() {
                    return Err(Error::Config(
                        "`l` applies to square lattices; use lx/ly".into(),
                    ));
                }
                lat.lx.get_or_insert(1);
                lat.ly.get_or_insert(1);
            }
            LatticeKind::Square => {
                if lat.lx.is_some() || lat.ly.is_some() {
                    return Err(Error::Config("lx/ly apply to ruby lattices; use l".into()));
                }
                lat.l.get_or_insert(4);
            }
        }
        let c = self.couplings;
        Couplings::new(c.jx, c.jy, c.jz).map_err(|e| Error::Config(e.to_string()))?;
        let ruby_only = matches!(
            self.task,
            Task::Ioms | Task::Logicals | Task::CompareEffective
        );
        if ruby_only && lat.kind != LatticeKind::Ruby {
            return Err(Error::Config(format!(
                "task {:?} needs a ruby lattice",
                self.task
            )));
        }
        if self.solver.tol.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::Config("tol must be positive".into()));
        }
        if self.task == Task::Spectrum && self.eigs == 0 {
            return Err(Error::Config("eigs must be \u{2265} 1".into()));
        }
        Ok(self)
    }

    fn ruby_size(&self) -> (usize, usize) {
        (self.lattice.lx.unwrap_or(1), self.lattice.ly.unwrap_or(1))
    }

    fn compare_options(&self) -> CompareOptions {
        CompareOptions {
            solver: self.solver,
            rule: self.compare.rule,
            pattern_tol: self.compare.pattern_tol,
            gap_ratio: self.compare.gap_ratio,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = TOOL, version, about = "Two-body ruby-lattice color-code toolkit")]
pub struct Args {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub task: Option<Task>,
    #[arg(long, value_enum)]
    pub lattice: Option<LatticeKind>,
    #[arg(long)]
    pub lx: Option<usize>,
    #[arg(long)]
    pub ly: Option<usize>,
    /// Side of the square lattice.
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub jx: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub jy: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub jz: Option<f64>,
    /// Number of lowest eigenvalues.
    #[arg(long)]
    pub eigs: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Extend the spectrum until the cluster at the cut is complete.
    #[arg(long)]
    pub complete_cluster: bool,
    /// Report path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Args {
    /// Merge the config file (if any) with the flags.
    pub fn to_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                RunConfig::from_json(&text)?
            }
            None => RunConfig::new(self.task.ok_or_else(|| {
                Error::Config("a task is required (--task or config file)".into())
            })?),
        };
        if let Some(t) = self.task {
            cfg.task = t;
        }
        if let Some(k) = self.lattice {
            if k != cfg.lattice.kind {
                cfg.lattice = LatticeSpec {
                    kind: k,
                    ..LatticeSpec::default()
                };
            }
        }
        let lat = &mut cfg.lattice;
        lat.lx = self.lx.or(lat.lx);
        lat.ly = self.ly.or(lat.ly);
        lat.l = self.l.or(lat.l);
        if self.l.is_some() && self.lattice.is_none() && self.lx.is_none() && self.ly.is_none() {
            lat.kind = LatticeKind::Square;
        }
        let c = &mut cfg.couplings;
        c.jx = self.jx.unwrap_or(c.jx);
        c.jy = self.jy.unwrap_or(c.jy);
        c.jz = self.jz.unwrap_or(c.jz);
        cfg.eigs = self.eigs.unwrap_or(cfg.eigs);
        cfg.solver.tol = self.tol.unwrap_or(cfg.solver.tol);
        cfg.solver.seed = self.seed.unwrap_or(cfg.solver.seed);
        cfg.solver.complete_last_cluster |= self.complete_cluster;
        if self.out.is_some() {
            cfg.output.clone_from(&self.out);
        }
        cfg.resolve()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSummary {
    pub sites: usize,
    pub edges: usize,
    pub triangles: usize,
    pub hexagons: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidateResult {
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ruby: Option<LatticeSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub colex: Option<LatticeSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub square_sites: Option<usize>,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceIoms {
    pub face: usize,
    pub local_rank: usize,
    pub a: IomReport,
    pub b: IomReport,
    pub c: IomReport,
    /// `A B = -C` with exact phase.
    pub ab_equals_minus_c: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IomsResult {
    pub terms: usize,
    pub faces: Vec<FaceIoms>,
    pub relations: Vec<PlaquetteRelation>,
    pub all_verified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogicalsResult {
    pub operators: Vec<IomReport>,
    pub relations: Vec<Relation>,
    pub all_verified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeResult {
    pub family: CodeFamily,
    pub report: CodeReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", content = "data", rename_all = "kebab-case")]
pub enum TaskResult {
    Validate(ValidateResult),
    Ioms(IomsResult),
    Logicals(LogicalsResult),
    Code(CodeResult),
    Spectrum(SpectrumReport),
    CompareEffective(Box<EffectiveComparison>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub result: TaskResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub tool: String,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<RunConfig>,
    pub error: ErrorBody,
}

impl ErrorReport {
    pub fn new(err: &Error, config: Option<RunConfig>) -> Self {
        ErrorReport {
            tool: TOOL.into(),
            version: VERSION.into(),
            config,
            error: ErrorBody {
                kind: err.kind().into(),
                message: err.to_string(),
                exit_code: err.exit_code(),
            },
        }
    }
}

fn validate(cfg: &RunConfig) -> Result<ValidateResult> {
    match cfg.lattice.kind {
        LatticeKind::Ruby => {
            let (lx, ly) = cfg.ruby_size();
            let lat = build_ruby(lx, ly)?;
            let mut diagnostics = lat.validate();
            let colex = contract_triangles(&lat)?;
            diagnostics.violations.extend(colex.validate().violations);
            Ok(ValidateResult {
                valid: diagnostics.is_ok(),
                ruby: Some(LatticeSummary {
                    sites: lat.sites.len(),
                    edges: lat.edges.len(),
                    triangles: lat.triangles.len(),
                    hexagons: lat.hexagons.len(),
                }),
                colex: Some(LatticeSummary {
                    sites: colex.vertices.len(),
                    edges: colex.edges.len(),
                    triangles: 0,
                    hexagons: colex.faces.len(),
                }),
                square_sites: None,
                diagnostics,
            })
        }
        LatticeKind::Square => {
            let sq = build_square(cfg.lattice.l.unwrap_or(4))?;
            let diagnostics = sq.validate();
            Ok(ValidateResult {
                valid: diagnostics.is_ok(),
                ruby: None,
                colex: None,
                square_sites: Some(sq.num_sites()),
                diagnostics,
            })
        }
    }
}

fn ioms(cfg: &RunConfig) -> Result<IomsResult> {
    let (lx, ly) = cfg.ruby_size();
    let lat = build_ruby(lx, ly)?;
    let h = build_two_body(&lat, &cfg.couplings);
    let plaquettes = all_plaquette_ioms(&lat, &h)?;
    let mut faces = Vec::with_capacity(plaquettes.len());
    for p in &plaquettes {
        let ab = p.a.op.multiply(&p.b.op)?;
        faces.push(FaceIoms {
            face: p.face,
            local_rank: p.local_rank,
            a: iom_report(&h, &p.a)?,
            b: iom_report(&h, &p.b)?,
            c: iom_report(&h, &p.c)?,
            ab_equals_minus_c: ab == p.c.op.negate(),
        });
    }
    let all_verified = faces.iter().all(|f| {
        f.ab_equals_minus_c && f.local_rank == 2 && [&f.a, &f.b, &f.c].iter().all(|r| r.check.ok())
    });
    Ok(IomsResult {
        terms: h.len(),
        relations: plaquette_relations(&plaquettes),
        faces,
        all_verified,
    })
}

fn logicals(cfg: &RunConfig) -> Result<LogicalsResult> {
    let (lx, ly) = cfg.ruby_size();
    let lat = build_ruby(lx, ly)?;
    let colex = contract_triangles(&lat)?;
    let h = build_two_body(&lat, &cfg.couplings);
    let alg = logical_algebra(&lat, &colex, &h)?;
    let operators = alg
        .ops()
        .iter()
        .map(|(_, iom)| iom_report(&h, iom))
        .collect::<Result<Vec<_>>>()?;
    let relations = alg.relations();
    let all_verified = relations.iter().all(|r| r.holds) && operators.iter().all(|r| r.check.ok());
    Ok(LogicalsResult {
        operators,
        relations,
        all_verified,
    })
}

fn code(cfg: &RunConfig) -> Result<CodeResult> {
    let (family, h) = match cfg.lattice.kind {
        LatticeKind::Square => (
            CodeFamily::Toric,
            build_toric(&build_square(cfg.lattice.l.unwrap_or(4))?),
        ),
        LatticeKind::Ruby => {
            let (lx, ly) = cfg.ruby_size();
            let colex = contract_triangles(&build_ruby(lx, ly)?)?;
            (CodeFamily::Color, build_color_code(&colex)?)
        }
    };
    let g = StabilizerGroup::from_terms(&h)?;
    Ok(CodeResult {
        family,
        report: code_report(&g, family)?,
    })
}

fn spectrum(cfg: &RunConfig) -> Result<SpectrumReport> {
    match cfg.lattice.kind {
        LatticeKind::Square => {
            let h = build_toric(&build_square(cfg.lattice.l.unwrap_or(4))?);
            Ok(lowest_eigenpairs(&h, cfg.eigs, &cfg.solver)?.report)
        }
        LatticeKind::Ruby => {
            let (lx, ly) = cfg.ruby_size();
            let lat = build_ruby(lx, ly)?;
            let h = build_two_body(&lat, &cfg.couplings);
            let mut pairs = lowest_eigenpairs(&h, cfg.eigs, &cfg.solver)?;
            let plaquettes = all_plaquette_ioms(&lat, &h)?;
            let named: Vec<(String, &crate::PauliOperator)> = plaquettes
                .iter()
                .flat_map(|p| [&p.a, &p.b, &p.c])
                .map(|iom| (iom.name(), &iom.op))
                .collect();
            pairs.attach_expectations(named)?;
            Ok(pairs.report)
        }
    }
}

/// Execute a resolved configuration.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    let result = match cfg.task {
        Task::Validate => {
            let r = validate(cfg)?;
            if !r.valid {
                return Err(Error::Invariant(format!(
                    "lattice validation failed: {}",
                    serde_json::to_string(&r.diagnostics)?
                )));
            }
            TaskResult::Validate(r)
        }
        Task::Ioms => {
            let r = ioms(cfg)?;
            if !r.all_verified {
                return Err(Error::Invariant(
                    "a plaquette IOM failed verification".into(),
                ));
            }
            TaskResult::Ioms(r)
        }
        Task::Logicals => {
            let r = logicals(cfg)?;
            if !r.all_verified {
                return Err(Error::Invariant(
                    "the logical algebra failed verification".into(),
                ));
            }
            TaskResult::Logicals(r)
        }
        Task::Code => TaskResult::Code(code(cfg)?),
        Task::Spectrum => TaskResult::Spectrum(spectrum(cfg)?),
        Task::CompareEffective => {
            let (lx, ly) = cfg.ruby_size();
            let lat = build_ruby(lx, ly)?;
            TaskResult::CompareEffective(Box::new(compare_effective(
                &lat,
                &cfg.couplings,
                &cfg.compare_options(),
            )?))
        }
    };
    Ok(Report {
        tool: TOOL.into(),
        version: VERSION.into(),
        config: cfg.clone(),
        result,
    })
}

fn emit(path: Option<&Path>, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Parse, run and emit; returns the process exit status.
pub fn main_with(args: &Args) -> i32 {
    let cfg = match args.to_config() {
        Ok(c) => c,
        Err(e) => {
            let report = ErrorReport::new(&e, None);
            if emit(args.out.as_deref(), &report).is_err() {
                eprintln!("{e}");
            }
            return e.exit_code();
        }
    };
    let outcome = run(&cfg).and_then(|r| emit(cfg.output.as_deref(), &r));
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            log::error!("{e}");
            let report = ErrorReport::new(&e, Some(cfg.clone()));
            if emit(cfg.output.as_deref(), &report).is_err() {
                eprintln!("{e}");
            }
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(list: &[&str]) -> Args {
        Args::parse_from(std::iter::once(TOOL).chain(list.iter().copied()))
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"task":"code","lattice":{"type":"ruby","lx":2,"ly":1},"couplings":{"jx":1,"jy":2,"jz":3}}"#)
            .unwrap();
        let cfg = args(&[
            "--config",
            path.to_str().unwrap(),
            "--jy",
            "-0.5",
            "--ly",
            "2",
        ])
        .to_config()
        .unwrap();
        assert_eq!(cfg.task, Task::Code);
        assert_eq!((cfg.lattice.lx, cfg.lattice.ly), (Some(2), Some(2)));
        assert_eq!(
            (cfg.couplings.jx, cfg.couplings.jy, cfg.couplings.jz),
            (1.0, -0.5, 3.0)
        );
    }

    #[test]
    fn defaults_are_resolved() {
        let cfg = args(&["--task", "spectrum"]).to_config().unwrap();
        assert_eq!(cfg.lattice.kind, LatticeKind::Ruby);
        assert_eq!((cfg.lattice.lx, cfg.lattice.ly), (Some(1), Some(1)));
        assert_eq!(cfg.eigs, 12);
        let sq = args(&["--task", "code", "--l", "4"]).to_config().unwrap();
        assert_eq!(sq.lattice.kind, LatticeKind::Square);
    }

    #[test]
    fn bad_configs() {
        assert!(matches!(args(&[]).to_config(), Err(Error::Config(_))));
        assert!(matches!(
            args(&["--task", "ioms", "--lattice", "square"]).to_config(),
            Err(Error::Config(_))
        ));
        assert!(RunConfig::from_json(r#"{"task":"code","colour":1}"#).is_err());
        assert!(RunConfig::from_json(r#"{"task":"dance"}"#).is_err());
    }

    #[test]
    fn zero_width_lattice() {
        let cfg = args(&["--task", "validate", "--lx", "0"])
            .to_config()
            .unwrap();
        let err = run(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("Lx must be \u{2265} 1"));
    }

    #[test]
    fn toric_code_task() {
        let cfg = args(&["--task", "code", "--l", "4"]).to_config().unwrap();
        let TaskResult::Code(r) = run(&cfg).unwrap().result else {
            panic!("wrong result kind")
        };
        assert_eq!(r.report.parameters.k, 2);
        assert_eq!(r.report.parameters.degeneracy, 4);
    }
}
