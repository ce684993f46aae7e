//! Run configuration: a strict TOML schema, validated into typed values.

use std::fmt;

use dirac_lattice::field::TriangleDomain;
use dirac_lattice::functionals::AuditTolerance;
use dirac_lattice::harness::{EnsembleSpec, Kernel};
use dirac_lattice::{make_grid, Boundary, Complex64, ConstantOverrides, Constants, Datum, Grid, Params, Profile};
use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    Audit,
    Converge,
    Unique,
    SolitonCheck,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditKind {
    Charge,
    Triangle,
    Pointwise,
    Bony,
    Gronwall,
    Algebraic,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    StructuredReport,
}

/// A complex number written either as a real scalar or as `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ComplexSpec {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexSpec {
    fn value(self) -> Complex64 {
        match self {
            ComplexSpec::Real(re) => Complex64::new(re, 0.0),
            ComplexSpec::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

fn one() -> ComplexSpec {
    ComplexSpec::Real(1.0)
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    #[default]
    Zero,
    Uniform {
        value: ComplexSpec,
    },
    GaussianPulse {
        #[serde(default)]
        center: f64,
        width: f64,
        #[serde(default = "one")]
        amplitude: ComplexSpec,
        #[serde(default)]
        wavenumber: f64,
    },
    IndicatorJump {
        left: f64,
        right: f64,
        #[serde(default = "one")]
        amplitude: ComplexSpec,
    },
    PowerSingularityTruncated {
        #[serde(default)]
        center: f64,
        exponent: f64,
        radius: f64,
        #[serde(default = "one")]
        amplitude: ComplexSpec,
    },
    Sampled {
        values: Vec<ComplexSpec>,
    },
    Sum {
        parts: Vec<ProfileSpec>,
    },
}

impl ProfileSpec {
    pub fn to_profile(&self) -> Profile<f64> {
        match self {
            ProfileSpec::Zero => Profile::Zero,
            ProfileSpec::Uniform { value } => Profile::Uniform { value: value.value() },
            ProfileSpec::GaussianPulse {
                center,
                width,
                amplitude,
                wavenumber,
            } => Profile::Gaussian {
                center: *center,
                width: *width,
                amplitude: amplitude.value(),
                wavenumber: *wavenumber,
            },
            ProfileSpec::IndicatorJump { left, right, amplitude } => Profile::Indicator {
                left: *left,
                right: *right,
                amplitude: amplitude.value(),
            },
            ProfileSpec::PowerSingularityTruncated {
                center,
                exponent,
                radius,
                amplitude,
            } => Profile::PowerSingularity {
                center: *center,
                exponent: *exponent,
                radius: *radius,
                amplitude: amplitude.value(),
            },
            ProfileSpec::Sampled { values } => Profile::Sampled(values.iter().map(|z| z.value()).collect()),
            ProfileSpec::Sum { parts } => Profile::Sum(parts.iter().map(ProfileSpec::to_profile).collect()),
        }
    }
}

/// Member of the random smooth ensemble, as an alternative to explicit profiles.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub seed: u64,
    #[serde(default = "default_bumps")]
    pub bumps: usize,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
}

fn default_bumps() -> usize {
    EnsembleSpec::default().bumps
}

fn default_amplitude() -> f64 {
    EnsembleSpec::default().amplitude
}

impl EnsembleSection {
    pub fn spec(&self) -> EnsembleSpec {
        EnsembleSpec {
            bumps: self.bumps,
            amplitude: self.amplitude,
            ..EnsembleSpec::default()
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSection {
    pub u: Option<ProfileSpec>,
    pub v: Option<ProfileSpec>,
    pub ensemble: Option<EnsembleSection>,
}

impl InitSection {
    fn datum(&self, what: &str) -> Result<Datum, CliError> {
        match (&self.ensemble, self.u.is_some() || self.v.is_some()) {
            (Some(_), true) => Err(CliError::Config(format!(
                "{what}: give either an ensemble member or explicit u/v profiles, not both"
            ))),
            (Some(e), false) => Ok(dirac_lattice::harness::random_smooth_datum(e.seed, &e.spec())),
            (None, _) => Ok(Datum::new(
                self.u.clone().unwrap_or_default().to_profile(),
                self.v.clone().unwrap_or_default().to_profile(),
            )),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    #[serde(default)]
    m: f64,
    #[serde(default)]
    alpha: f64,
    #[serde(default)]
    beta: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    #[serde(default = "default_boundary")]
    boundary: Boundary,
}

fn default_boundary() -> Boundary {
    Boundary::ZeroInflow
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TimeSection {
    #[serde(rename = "T", default = "default_horizon")]
    horizon: f64,
    #[serde(default = "default_record_every")]
    record_every: usize,
}

fn default_horizon() -> f64 {
    1.0
}

fn default_record_every() -> usize {
    1
}

impl Default for TimeSection {
    fn default() -> Self {
        Self {
            horizon: default_horizon(),
            record_every: default_record_every(),
        }
    }
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantsSection {
    delta0: Option<f64>,
    c_star: Option<f64>,
    #[serde(rename = "K")]
    k: Option<f64>,
    delta: Option<f64>,
    #[serde(rename = "C_tol")]
    c_tol: Option<f64>,
    /// Additive floor of the tolerance scale.
    tol_floor: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    #[serde(default = "default_prefix")]
    prefix: String,
    #[serde(default)]
    format: Format,
}

fn default_prefix() -> String {
    "run".into()
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            prefix: default_prefix(),
            format: Format::Csv,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct TriangleSection {
    a: f64,
    b: f64,
    #[serde(default)]
    t0: f64,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct AuditSection {
    triangle: Option<TriangleSection>,
    tau: Option<f64>,
    #[serde(rename = "C0")]
    c0: Option<f64>,
    samples: Option<usize>,
    seed: Option<u64>,
    /// Second datum for the difference estimates.
    partner: Option<InitSection>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct StudySection {
    #[serde(default)]
    epsilons: Vec<f64>,
    #[serde(default)]
    kernel: Kernel,
    kernels: Option<[Kernel; 2]>,
    #[serde(default)]
    plan: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SolitonSection {
    #[serde(default = "default_frequency")]
    frequency: f64,
}

fn default_frequency() -> f64 {
    0.5
}

impl Default for SolitonSection {
    fn default() -> Self {
        Self {
            frequency: default_frequency(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: Command,
    #[serde(default)]
    audit_selection: Vec<AuditKind>,
    model: ModelSection,
    grid: GridSection,
    #[serde(default)]
    time: TimeSection,
    #[serde(default)]
    init: InitSection,
    #[serde(default)]
    constants: ConstantsSection,
    #[serde(default)]
    output: OutputSection,
    #[serde(default)]
    audit: AuditSection,
    #[serde(default)]
    study: StudySection,
    #[serde(default)]
    soliton: SolitonSection,
}

/// Audit parameters with defaults filled.
#[derive(Clone, Debug, PartialEq)]
pub struct AuditSettings {
    pub selection: Vec<AuditKind>,
    pub triangle: TriangleDomain<f64>,
    pub tau: f64,
    /// Charge bound for the pointwise estimates; `1 + charge(datum)` if unset.
    pub c0: Option<f64>,
    pub samples: usize,
    pub seed: u64,
    pub partner: Option<Datum>,
    pub tolerance: AuditTolerance,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudySettings {
    pub epsilons: Vec<f64>,
    pub kernel: Kernel,
    pub kernels: [Kernel; 2],
    pub plan: bool,
}

/// Fully validated run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: Params,
    pub constants: Constants,
    pub grid: Grid,
    pub horizon: f64,
    pub record_every: usize,
    pub datum: Datum,
    pub prefix: String,
    pub format: Format,
    pub audit: AuditSettings,
    pub study: StudySettings,
    pub soliton_frequency: f64,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Command::Simulate => "simulate",
            Command::Audit => "audit",
            Command::Converge => "converge",
            Command::Unique => "unique",
            Command::SolitonCheck => "soliton-check",
        };
        f.write_str(s)
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let core = |e: dirac_lattice::Error| match e {
        dirac_lattice::Error::Config(msg) => CliError::Config(msg),
        other => CliError::Config(other.to_string()),
    };

    let params = Params::new(raw.model.m, raw.model.alpha, raw.model.beta).map_err(core)?;
    let c = &raw.constants;
    let overrides = ConstantOverrides {
        delta0: c.delta0,
        c_star: c.c_star,
        k: c.k,
        delta: c.delta,
    };
    let constants = Constants::with_overrides(&params, &overrides).map_err(core)?;
    let mut tolerance = AuditTolerance::default();
    if let Some(t) = c.c_tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Config(format!("C_tol > 0 violated (C_tol = {t})")));
        }
        tolerance.c_tol = t;
    }
    if let Some(fl) = c.tol_floor {
        if !(fl.is_finite() && fl >= 0.0) {
            return Err(CliError::Config(format!("tol_floor >= 0 violated (tol_floor = {fl})")));
        }
        tolerance.floor = fl;
    }

    let g = &raw.grid;
    let grid = make_grid(g.x_min, g.x_max, g.n_points, g.boundary).map_err(core)?;
    let horizon = raw.time.horizon;
    if !(horizon.is_finite() && horizon >= 0.0) {
        return Err(CliError::Config(format!(
            "time.T must be finite and nonnegative, got {horizon}"
        )));
    }
    if raw.time.record_every == 0 {
        return Err(CliError::Config("time.record_every must be at least 1".into()));
    }
    let datum = raw.init.datum("init")?;
    // surfaces sampled-length and profile errors at parse time
    dirac_lattice::sample_initial(&datum, &grid).map_err(core)?;

    let a = &raw.audit;
    let triangle = match a.triangle {
        Some(t) => TriangleDomain::new(t.a, t.b, t.t0).map_err(core)?,
        None => TriangleDomain::new(grid.x(0), grid.x(grid.n_points - 1), 0.0).map_err(core)?,
    };
    let tau = a.tau.unwrap_or_else(|| horizon.min(triangle.apex_time()));
    let partner = a.partner.as_ref().map(|p| p.datum("audit.partner")).transpose()?;
    if let Some(d) = &partner {
        dirac_lattice::sample_initial(d, &grid).map_err(core)?;
    }
    let mut selection = raw.audit_selection.clone();
    selection.sort();
    selection.dedup();
    if raw.command == Command::Audit && selection.is_empty() {
        return Err(CliError::Config(
            "command = \"audit\" needs a nonempty audit_selection".into(),
        ));
    }
    if selection.contains(&AuditKind::Gronwall) && partner.is_none() {
        return Err(CliError::Config(
            "the gronwall audit compares two runs; set [audit.partner] to the second datum".into(),
        ));
    }
    if let Some(c0) = a.c0 {
        if !(c0.is_finite() && c0 > 0.0) {
            return Err(CliError::Config(format!("C0 > 0 violated (C0 = {c0})")));
        }
    }
    let audit = AuditSettings {
        selection,
        triangle,
        tau,
        c0: a.c0,
        samples: a.samples.unwrap_or(100_000),
        seed: a.seed.unwrap_or(0),
        partner,
        tolerance,
    };

    let s = &raw.study;
    if matches!(raw.command, Command::Converge | Command::Unique) && s.epsilons.is_empty() {
        return Err(CliError::Config(format!(
            "command = \"{}\" needs study.epsilons",
            raw.command
        )));
    }
    let study = StudySettings {
        epsilons: s.epsilons.clone(),
        kernel: s.kernel,
        kernels: s.kernels.unwrap_or([Kernel::Bump, Kernel::Triangle]),
        plan: s.plan,
    };

    if raw.command == Command::SolitonCheck && !(params.alpha == 1.0 && params.beta == 0.0) {
        return Err(CliError::Config(
            "soliton-check needs the Thirring model (alpha = 1, beta = 0)".into(),
        ));
    }

    Ok(RunConfig {
        command: raw.command,
        params,
        constants,
        grid,
        horizon,
        record_every: raw.time.record_every,
        datum,
        prefix: raw.output.prefix,
        format: raw.output.format,
        audit,
        study,
        soliton_frequency: raw.soliton.frequency,
    })
}
