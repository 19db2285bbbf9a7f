//! Batch experiments: JSON configuration, parallel dispatch of checks,
//! report JSON and CSV emission.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::conditions::{
    check_exponent_identities, check_expflat, check_phicond, estimate_a, exponent_calculator, ExponentInput, MeanVariant,
};
use crate::curve::{validate_monotone, validate_oracle, AnyCurve, CurveSpec, HomogeneousCurve, SimpleCurve};
use crate::error::{LabError, Result};
use crate::measure::{
    check_j_geq_k, estimate_alpha_b, k_u_geometry, lemma1_chain, lemma1_conclusion, osculating_family, sm_measure,
    LambdaOptions, Parallelepiped, SmSampling,
};
use crate::offspring::{
    admissible_samples, check_jacobian_identity, check_monomial_closed_form, check_offspring_closure, estimate_sigma,
    weight_product_bound, SigmaSweep,
};
use crate::report::{CheckReport, Series};
use crate::sampling::substream;
use crate::spectral::{
    converse_scaling_check, dilation_sweep, empirical_ratio, homogeneous_rescale_check, LatticeOptions, TestFunction,
};
use crate::vandermonde::{
    check_lin_lemma, check_psi_lower_bound, check_tail_inequalities, check_vandermonde_integration, psi_samples, GapVector,
    LinInstance, PsiSweep,
};

/// Artifact version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A curve specification with the name checks refer to it by.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedCurve {
    pub name: String,
    #[serde(flatten)]
    pub spec: CurveSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    /// Prefix for emitted files; `<output>.report.json` and CSV tables.
    #[serde(default = "default_output")]
    pub output: String,
    #[serde(default)]
    pub curves: Vec<NamedCurve>,
    /// Extra tolerances keyed by check id; a passing check whose estimate
    /// misses its bound under the configured tolerance is marked failed.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

fn default_output() -> String {
    "restriction-lab".into()
}

fn default_grid() -> usize {
    64
}

fn default_samples() -> usize {
    64
}

fn default_true() -> bool {
    true
}

/// One check: an operation name plus its parameters.
///
/// Random operations take a `seed` that is added to the run seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "operation", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CheckSpec {
    CurveMonotone {
        curve: String,
        #[serde(default = "default_grid")]
        grid: usize,
    },
    OracleDerivatives {
        curve: String,
        #[serde(default = "default_grid")]
        points: usize,
        #[serde(default = "fd_tol")]
        rel_tol: f64,
    },
    JacobianIdentity {
        dims: Vec<usize>,
        samples: usize,
        #[serde(default)]
        seed: u64,
    },
    MonomialClosedForm {
        dims: Vec<usize>,
        samples: usize,
        #[serde(default)]
        seed: u64,
    },
    PsiLowerBound {
        d: usize,
        #[serde(default)]
        sweep: PsiSweep,
    },
    VandermondeIntegration {
        s: Vec<f64>,
        #[serde(default = "integration_tol")]
        tolerance: f64,
    },
    TailInequalities {
        t: Vec<f64>,
        delta: f64,
        floor: f64,
    },
    LinLemma {
        instance: LinInstance,
    },
    OffspringClosure {
        curve: String,
        h: Vec<f64>,
        #[serde(default)]
        sweep: SigmaSweep,
    },
    Sigma {
        curve: String,
        #[serde(default)]
        sweep: SigmaSweep,
        #[serde(default)]
        a_constant: Option<f64>,
    },
    WeightProduct {
        curve: String,
        #[serde(default)]
        sweep: SigmaSweep,
        #[serde(default)]
        sigma: Option<f64>,
    },
    MeanValue {
        curve: String,
        variant: MeanVariant,
        #[serde(default = "default_grid")]
        grid: usize,
        #[serde(default)]
        bound: Option<f64>,
    },
    Phicond {
        curve: String,
        alpha: f64,
        #[serde(default = "default_grid")]
        grid: usize,
    },
    ExpflatDerivatives {
        beta: f64,
        d: usize,
        t: Vec<f64>,
    },
    ExponentIdentities {
        d: usize,
        #[serde(default = "default_grid")]
        n: usize,
    },
    Exponents {
        input: ExponentInput,
    },
    AlphaB {
        curve: String,
        alpha: f64,
        t0: f64,
        radii: Vec<f64>,
        #[serde(default = "one")]
        inflate: f64,
    },
    Lemma1Chain {
        curve: String,
        t: f64,
        h: f64,
        #[serde(default = "chain_samples")]
        samples: usize,
    },
    Lemma1Conclusion {
        curve: String,
        alpha: f64,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default)]
        seed: u64,
    },
    KHomogeneity {
        h: Vec<f64>,
        alpha: f64,
    },
    SmShells {
        d: usize,
        alpha: f64,
        m: Vec<usize>,
        #[serde(default)]
        sampling: SmSampling,
    },
    JGeqK {
        curve: String,
        alpha: f64,
        sigma: f64,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default)]
        seed: u64,
    },
    EmpiricalRatio {
        curves: Vec<String>,
        #[serde(rename = "P")]
        big_p: f64,
        /// Defaults to the restriction exponent 2/(d(d+1)(1 − 1/P)).
        #[serde(default, rename = "Q")]
        big_q: Option<f64>,
        #[serde(default = "default_true")]
        weighted: bool,
        tests: Vec<TestFunction>,
        #[serde(default = "default_grid")]
        panels: usize,
    },
    DilationSweep {
        d: usize,
        #[serde(rename = "P")]
        big_p: f64,
        sigma: f64,
        lambdas: Vec<f64>,
    },
    HomogeneousRescale {
        curve: String,
        k: i32,
        test: TestFunction,
        p: f64,
    },
    ConverseIdentity {
        parallelepiped: Parallelepiped,
        f: TestFunction,
        #[serde(rename = "P")]
        big_p: f64,
        #[serde(rename = "Q")]
        big_q: f64,
        alpha: f64,
        #[serde(default)]
        curve: Option<String>,
        #[serde(default)]
        lattice: LatticeOptions,
    },
}

fn fd_tol() -> f64 {
    1e-5
}

fn integration_tol() -> f64 {
    1e-10
}

fn one() -> f64 {
    1.0
}

fn chain_samples() -> usize {
    1000
}

/// Operation names accepted in `checks[].operation`, with a one-line summary.
pub const OPERATIONS: &[(&str, &str)] = &[
    ("curve-monotone", "φ^(d) nonnegative and nondecreasing on a grid"),
    ("oracle-derivatives", "analytic derivative stack against finite differences"),
    ("jacobian-identity", "determinant and iterated-integral Jacobians agree"),
    ("monomial-closed-form", "J·∏ j! = v(h) for φ = t^d/d!"),
    ("psi-lower-bound", "infimum of ∫ Ψ_d over the upper half of [0, κ_d], divided by v"),
    ("vandermonde-integration", "∫ Ψ_d(t − s_1) φ^(d)(t) dt against the determinant"),
    ("tail-inequalities", "Vandermonde tail and mixed-region ratios above a floor"),
    ("lin-lemma", "restricted/full ratio of a product-of-differences integral"),
    ("offspring-closure", "offspring curve stays admissible and reconstructs Γ"),
    ("sigma", "empirical σ in J ≥ σ·v·(∏ φ^(d))^{1/d}"),
    ("weight-product", "product of weights at the offsets against σ and J"),
    ("mean-value", "constant A of the AM or GM mean-value condition"),
    ("phicond", "gap condition on φ^(d−1) with exponent from α"),
    ("expflat-derivatives", "derivative recursion of exp(−t^{−β}) against finite differences"),
    ("exponent-identities", "interpolation exponent identities on a grid"),
    ("exponents", "exponent calculator record"),
    ("alpha-b", "sup of λ_γ(E)/m(E)^α over an osculating family"),
    ("lemma1-chain", "parallelepiped chain: containment, volumes, bound"),
    ("lemma1-conclusion", "derivative-gap lower bound from the chain"),
    ("k-homogeneity", "u(h), K(h) and homogeneity of K"),
    ("sm-shells", "Monte Carlo shell measures of K and their ratios"),
    ("j-geq-k", "J ≥ c·σ^{−1/α}K(h) on sampled offsets"),
    ("empirical-ratio", "exploratory restriction ratios over a curve family"),
    ("dilation-sweep", "ratio invariance under moment-curve dilations"),
    ("homogeneous-rescale", "change of variables for homogeneous curves"),
    ("converse-identity", "L^P scaling of g built from a parallelepiped"),
];

impl CheckSpec {
    pub fn operation(&self) -> String {
        serde_json::to_value(self)
            .ok()
            .and_then(|v| v.get("operation").and_then(Value::as_str).map(str::to_owned))
            .unwrap_or_default()
    }
}

/// Parses a configuration, reporting the JSON path of any schema violation.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| LabError::Config {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    parse_config(&fs::read_to_string(path)?)
}

impl ExperimentConfig {
    /// Cross-references: curve names must exist and be unique.
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for (i, c) in self.curves.iter().enumerate() {
            if !seen.insert(c.name.as_str()) {
                return Err(LabError::Config { path: format!("curves[{i}].name"), message: format!("duplicate curve name {:?}", c.name) });
            }
        }
        for (i, check) in self.checks.iter().enumerate() {
            let v = serde_json::to_value(check)?;
            let mut names: Vec<(String, String)> = Vec::new();
            if let Some(n) = v.get("curve").and_then(Value::as_str) {
                names.push((format!("checks[{i}].curve"), n.to_owned()));
            }
            if let Some(list) = v.get("curves").and_then(Value::as_array) {
                for (j, n) in list.iter().enumerate() {
                    if let Some(n) = n.as_str() {
                        names.push((format!("checks[{i}].curves[{j}]"), n.to_owned()));
                    }
                }
            }
            for (path, name) in names {
                if !seen.contains(name.as_str()) {
                    return Err(LabError::Config { path, message: format!("unknown curve {name:?}") });
                }
            }
        }
        Ok(())
    }
}

/// Everything a run produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub summary: Summary,
    pub reports: Vec<CheckReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

impl RunReport {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    curves: BTreeMap<&'a str, std::result::Result<AnyCurve, String>>,
}

impl Context<'_> {
    fn curve(&self, name: &str) -> Result<&AnyCurve> {
        match self.curves.get(name) {
            Some(Ok(c)) => Ok(c),
            Some(Err(e)) => Err(LabError::Validation(format!("curve {name:?} failed to build: {e}"))),
            None => Err(LabError::Validation(format!("unknown curve {name:?}"))),
        }
    }

    fn simple(&self, name: &str) -> Result<&SimpleCurve> {
        self.curve(name)?.as_simple()
    }

    fn homogeneous(&self, name: &str) -> Result<&HomogeneousCurve> {
        self.curve(name)?.as_homogeneous()
    }

    fn seed(&self, offset: u64) -> u64 {
        self.config.seed.wrapping_add(offset)
    }

    fn tolerance(&self, r: CheckReport) -> CheckReport {
        if let (Some(tol), Some(bound)) = (self.config.tolerances.get(&r.check_id), r.bound) {
            let holds = r.estimate.is_finite() && r.relation.holds(r.estimate, bound, *tol);
            if r.pass && !holds {
                return r.fail_with(format!("fails under configured tolerance {tol}"));
            }
        }
        r
    }
}

fn execute(ctx: &Context, check: &CheckSpec) -> Result<CheckReport> {
    use CheckSpec as C;
    Ok(match check {
        C::CurveMonotone { curve, grid } => validate_monotone(ctx.simple(curve)?, *grid)?,
        C::OracleDerivatives { curve, points, rel_tol } => {
            let c = ctx.simple(curve)?;
            validate_oracle(c.phi().as_ref(), c.bounds(), c.dimension(), *points, *rel_tol)
        }
        C::JacobianIdentity { dims, samples, seed } => check_jacobian_identity(dims, *samples, ctx.seed(*seed))?,
        C::MonomialClosedForm { dims, samples, seed } => check_monomial_closed_form(dims, *samples, ctx.seed(*seed))?,
        C::PsiLowerBound { d, sweep } => {
            let sweep = PsiSweep { seed: ctx.seed(sweep.seed), ..sweep.clone() };
            check_psi_lower_bound(*d, &psi_samples(*d, &sweep), sweep.refine_rounds)?
        }
        C::VandermondeIntegration { s, tolerance } => check_vandermonde_integration(s, *tolerance)?,
        C::TailInequalities { t, delta, floor } => check_tail_inequalities(t, *delta, *floor)?,
        C::LinLemma { instance } => check_lin_lemma(instance)?,
        C::OffspringClosure { curve, h, sweep } => {
            let sweep = SigmaSweep { seed: ctx.seed(sweep.seed), ..sweep.clone() };
            check_offspring_closure(ctx.simple(curve)?, &GapVector::new(h.clone())?, &sweep, 1e-9)?
        }
        C::Sigma { curve, sweep, a_constant } => {
            let c = ctx.simple(curve)?;
            let sweep = SigmaSweep { seed: ctx.seed(sweep.seed), ..sweep.clone() };
            estimate_sigma(c, &admissible_samples(c, &sweep, 0)?, *a_constant, sweep.order)?
        }
        C::WeightProduct { curve, sweep, sigma } => {
            let c = ctx.simple(curve)?;
            let sweep = SigmaSweep { seed: ctx.seed(sweep.seed), ..sweep.clone() };
            weight_product_bound(c, &admissible_samples(c, &sweep, 1)?, *sigma, sweep.order)?
        }
        C::MeanValue { curve, variant, grid, bound } => {
            estimate_a(ctx.simple(curve)?, *variant, *grid)?.to_report(*bound, 1e-9)
        }
        C::Phicond { curve, alpha, grid } => check_phicond(ctx.simple(curve)?, *alpha, *grid)?.to_report(None, 0.0),
        C::ExpflatDerivatives { beta, d, t } => check_expflat(*beta, *d, t)?,
        C::ExponentIdentities { d, n } => check_exponent_identities(*d, *n)?,
        C::Exponents { input } => {
            let record = exponent_calculator(input)?;
            let value = serde_json::to_value(&record)?;
            CheckReport::unbounded("conditions.exponents", json!({"input": input, "record": value}), record.p_d, true)
        }
        C::AlphaB { curve, alpha, t0, radii, inflate } => {
            let c = ctx.simple(curve)?;
            let family = osculating_family(c, *t0, radii, *inflate)?;
            estimate_alpha_b(c, &family, *alpha, &LambdaOptions::default())?
        }
        C::Lemma1Chain { curve, t, h, samples } => lemma1_chain(ctx.simple(curve)?, *t, *h, *samples)?.report,
        C::Lemma1Conclusion { curve, alpha, samples, seed } => {
            use rand::Rng;
            let c = ctx.simple(curve)?;
            let (a, b) = c.bounds();
            let mut rng = substream(ctx.seed(*seed), 0);
            let pairs: Vec<(f64, f64)> = (0..*samples)
                .map(|_| {
                    let t = rng.gen_range(a..b);
                    let s = rng.gen_range(t..b);
                    (t, s.max(t + 1e-6 * (b - a)).min(b))
                })
                .filter(|(t, s)| s > t)
                .collect();
            lemma1_conclusion(c, &pairs, *alpha, None, &LambdaOptions::default())?
        }
        C::KHomogeneity { h, alpha } => k_u_geometry(h, *alpha)?.report,
        C::SmShells { d, alpha, m, sampling } => {
            let sampling = SmSampling { seed: ctx.seed(sampling.seed), ..sampling.clone() };
            sm_measure(*d, *alpha, m, &sampling)?
        }
        C::JGeqK { curve, alpha, sigma, samples, seed } => {
            use rand::Rng;
            let c = ctx.simple(curve)?;
            let d = c.dimension();
            let (a, b) = c.bounds();
            let mut rng = substream(ctx.seed(*seed), 0);
            let mut pairs = Vec::with_capacity(*samples);
            while pairs.len() < *samples {
                let s = rng.gen_range(a..b);
                let h: Vec<f64> = (0..d - 1).map(|_| rng.gen_range(-0.3..0.3) * (b - a)).collect();
                if h.iter().all(|x| s + x > a && s + x < b) {
                    pairs.push((s, h));
                }
            }
            check_j_geq_k(c, *sigma, *alpha, &pairs)?
        }
        C::EmpiricalRatio { curves, big_p, big_q, weighted, tests, panels } => {
            let family: Vec<SimpleCurve> = curves.iter().map(|n| ctx.simple(n).cloned()).collect::<Result<_>>()?;
            let d = family[0].dimension() as f64;
            let q = big_q.unwrap_or(2.0 / (d * (d + 1.0) * (1.0 - 1.0 / big_p)));
            empirical_ratio(&family, *big_p, q, *weighted, tests, *panels)?
        }
        C::DilationSweep { d, big_p, sigma, lambdas } => dilation_sweep(*d, *big_p, *sigma, lambdas)?,
        C::HomogeneousRescale { curve, k, test, p } => homogeneous_rescale_check(ctx.homogeneous(curve)?, *k, test, *p)?,
        C::ConverseIdentity { parallelepiped, f, big_p, big_q, alpha, curve, lattice } => {
            let c = curve.as_deref().map(|n| ctx.curve(n).map(AnyCurve::as_dyn)).transpose()?;
            converse_scaling_check(parallelepiped, f, *big_p, *big_q, *alpha, c, lattice)?
        }
    })
}

/// Runs every check of the configuration (in parallel when `jobs` > 1) and
/// assembles the report in configuration order. A check that errors is
/// recorded as a failed report.
pub fn run(config: &ExperimentConfig, jobs: Option<usize>) -> Result<RunReport> {
    config.validate()?;
    let curves = config
        .curves
        .iter()
        .map(|c| (c.name.as_str(), c.spec.build().map_err(|e| e.to_string())))
        .collect();
    let ctx = Context { config, curves };
    let go = || -> Vec<CheckReport> {
        config
            .checks
            .par_iter()
            .map(|check| {
                let params = serde_json::to_value(check).unwrap_or(Value::Null);
                match execute(&ctx, check) {
                    Ok(r) => ctx.tolerance(r),
                    Err(e) => CheckReport::errored(check.operation(), params, e.to_string()),
                }
            })
            .collect()
    };
    let reports = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| LabError::Validation(format!("cannot build a pool of {n} threads: {e}")))?
            .install(go),
        None => go(),
    };
    let passed = reports.iter().filter(|r| r.pass).count();
    Ok(RunReport {
        version: VERSION.into(),
        config: config.clone(),
        summary: Summary { total: reports.len(), passed, failed: reports.len() - passed },
        reports,
    })
}

fn file_stem(index: usize, check_id: &str) -> String {
    format!("{index:02}-{}", check_id.replace('.', "-"))
}

fn write_csv(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

fn fmt(x: f64) -> String {
    if x.is_finite() {
        x.to_string()
    } else {
        String::new()
    }
}

fn series_csv(path: &Path, s: &Series) -> Result<()> {
    let header: Vec<String> = s.columns.clone();
    write_csv(path, &header, s.rows.iter().map(|r| r.iter().map(|x| fmt(*x)).collect()))
}

/// Writes `<prefix>.report.json`, one summary CSV per check and one CSV per
/// series; returns the paths written.
pub fn write_outputs(report: &RunReport, prefix: &Path) -> Result<Vec<PathBuf>> {
    if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let base = prefix.to_string_lossy().into_owned();
    let mut written = Vec::new();
    let json_path = PathBuf::from(format!("{base}.report.json"));
    fs::File::create(&json_path)?.write_all(report.to_json()?.as_bytes())?;
    written.push(json_path);
    let header: Vec<String> =
        ["check_id", "estimate", "bound", "relation", "tolerance", "pass", "status"].iter().map(|s| s.to_string()).collect();
    for (i, r) in report.reports.iter().enumerate() {
        let stem = file_stem(i, &r.check_id);
        let path = PathBuf::from(format!("{base}.{stem}.csv"));
        let row = vec![
            r.check_id.clone(),
            fmt(r.estimate),
            r.bound.map(fmt).unwrap_or_default(),
            serde_json::to_value(r.relation)?.as_str().unwrap_or_default().to_owned(),
            fmt(r.tolerance),
            r.pass.to_string(),
            serde_json::to_value(r.status)?.as_str().unwrap_or_default().to_owned(),
        ];
        write_csv(&path, &header, [row])?;
        written.push(path);
        for s in &r.series {
            let path = PathBuf::from(format!("{base}.{stem}.{}.csv", s.name));
            series_csv(&path, s)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Writes one CSV per series of the given kind into `dir`. Nonempty input
/// without any matching series is an emission error.
pub fn emit_plot_data(reports: &[CheckReport], kind: &str, dir: &Path) -> Result<Vec<PathBuf>> {
    if reports.is_empty() {
        return Ok(Vec::new());
    }
    let mut written = Vec::new();
    for (i, r) in reports.iter().enumerate() {
        for s in r.series.iter().filter(|s| s.kind.as_deref() == Some(kind)) {
            if written.is_empty() {
                fs::create_dir_all(dir)?;
            }
            let path = dir.join(format!("{}-{}.csv", file_stem(i, &r.check_id), s.name));
            series_csv(&path, s)?;
            written.push(path);
        }
    }
    if written.is_empty() {
        return Err(LabError::Emission(format!("no series of kind {kind:?} in the reports")));
    }
    Ok(written)
}

/// Reads reports from either a run report or a bare JSON array of reports.
pub fn load_reports(path: &Path) -> Result<Vec<CheckReport>> {
    let text = fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)?;
    let list = match value.get("reports") {
        Some(r) => r.clone(),
        None => value,
    };
    Ok(serde_json::from_value(list)?)
}

/// The shipped default configuration.
pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.json");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_runs() {
        let cfg = parse_config(r#"{"checks": []}"#).unwrap();
        let r = run(&cfg, Some(1)).unwrap();
        assert!(r.all_passed());
        assert_eq!(r.summary.total, 0);
    }

    #[test]
    fn unknown_operation_names_path() {
        let err = parse_config(r#"{"checks": [{"operation": "no-such-thing"}]}"#).unwrap_err();
        match err {
            LabError::Config { path, .. } => assert!(path.starts_with("checks[0]"), "{path}"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn unknown_curve_names_path() {
        let err = parse_config(r#"{"checks": [{"operation": "curve-monotone", "curve": "nope"}]}"#).unwrap_err();
        assert!(matches!(err, LabError::Config { ref path, .. } if path == "checks[0].curve"), "{err}");
    }

    #[test]
    fn operations_list_matches_variants() {
        let cfg = parse_config(DEFAULT_CONFIG).unwrap();
        for c in &cfg.checks {
            assert!(OPERATIONS.iter().any(|(n, _)| *n == c.operation()), "{}", c.operation());
        }
    }
}
