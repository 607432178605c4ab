//! Scenario files: schema, parsing, and resolution into core objects.
//!
//! Scenarios are TOML with a strict schema: unknown keys are errors, not
//! warnings, and parameter tables are re-typed per model/coupling name so a
//! misspelled parameter cannot silently fall back to a default.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use syncnet_core::domain::DomainDescriptor;
use syncnet_core::dynamics::{
    chua_coupling, chua_field, chua_slope_bound, chua_weights, fhn_coupling, fhn_field,
    fhn_weights, linear_difference_coupling, zero_field, ChuaParams, CouplingFunction, FhnParams,
    OscillatorModel, WeightVector,
};
use syncnet_core::graph::{build_graph, GraphFamily, PathStrategy, UndirectedGraph};
use syncnet_core::pseudometric::{
    exp_damped_pseudometric, induced_pseudometric, power_pseudometric_in_dim, Pseudometric,
};
use syncnet_core::rho::RhoSequence;
use syncnet_core::simulator::{initial_states_in_v_ball, initial_states_random_box};
use syncnet_core::stability::GrowthEnvelope;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    graph: GraphSection,
    model: ModelSection,
    coupling: CouplingSection,
    weights: WeightsSection,
    pseudometric: PseudometricSection,
    epsilon: EpsilonSection,
    integration: IntegrationSection,
    initial: InitialSection,
    threshold: ThresholdSection,
    #[serde(default)]
    sync: SyncSection,
    #[serde(default)]
    audit: Option<AuditSection>,
    #[serde(default)]
    ball: Option<BallSection>,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphSection {
    family: String,
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    edges: Option<Vec<(usize, usize)>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    name: String,
    #[serde(default)]
    params: Option<toml::Value>,
    #[serde(default)]
    node_overrides: Vec<NodeOverride>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeOverride {
    node: usize,
    #[serde(default)]
    a: Option<f64>,
    #[serde(default)]
    b: Option<f64>,
    #[serde(default)]
    c: Option<f64>,
    #[serde(default)]
    d: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FhnParamsFile {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChuaParamsFile {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    e: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ZeroParamsFile {
    dim: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CouplingSection {
    name: String,
    #[serde(default)]
    params: Option<toml::Value>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FhnCouplingParamsFile {
    alpha: f64,
    beta: f64,
    gamma: f64,
    #[serde(default)]
    b: Option<f64>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ChuaCouplingParamsFile {
    #[serde(default)]
    a: Option<f64>,
    #[serde(default)]
    delta: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsSection {
    #[serde(default)]
    preset: Option<String>,
    #[serde(default)]
    values: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PseudometricSection {
    name: String,
    #[serde(default)]
    alpha: Option<f64>,
    #[serde(default)]
    rho: Option<RhoSpec>,
    #[serde(default)]
    domain: Option<DomainSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RhoSpec {
    kind: String,
    #[serde(default)]
    exponent: Option<f64>,
    #[serde(default)]
    values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainSpec {
    kind: String,
    #[serde(default)]
    dim: Option<usize>,
    #[serde(default)]
    lower: Option<Vec<f64>>,
    #[serde(default)]
    upper: Option<Vec<f64>>,
    #[serde(default)]
    center: Option<Vec<f64>>,
    #[serde(default)]
    radius: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum EpsilonSection {
    Fixed(f64),
    Sweep(SweepSpec),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSpec {
    from: f64,
    to: f64,
    steps: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntegrationSection {
    #[serde(default)]
    t0: f64,
    t_end: f64,
    #[serde(default = "default_dt")]
    dt: f64,
    #[serde(default = "default_record_every")]
    record_every: usize,
}

fn default_dt() -> f64 {
    1e-3
}

fn default_record_every() -> usize {
    10
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialSection {
    kind: String,
    #[serde(default)]
    states: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    lower: Option<Vec<f64>>,
    #[serde(default)]
    upper: Option<Vec<f64>>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    radius_fraction: Option<f64>,
    #[serde(default)]
    base: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThresholdSection {
    method: String,
    #[serde(default = "default_strategy")]
    strategy: String,
}

fn default_strategy() -> String {
    "bfs-min-length".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SyncSection {
    #[serde(default = "default_sync_tolerance")]
    tolerance: f64,
    #[serde(default = "default_trailing_window")]
    trailing_window: f64,
}

fn default_sync_tolerance() -> f64 {
    1e-6
}

fn default_trailing_window() -> f64 {
    10.0
}

impl Default for SyncSection {
    fn default() -> Self {
        SyncSection {
            tolerance: default_sync_tolerance(),
            trailing_window: default_trailing_window(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AuditSection {
    count: usize,
    seed: u64,
    #[serde(default)]
    region: Option<DomainSpec>,
    #[serde(default)]
    wintner_region: Option<DomainSpec>,
    wintner: WintnerSpec,
    #[serde(default)]
    time_interval: Option<(f64, f64)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WintnerSpec {
    offset: f64,
    slope: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BallSection {
    #[serde(default)]
    preset: Option<String>,
    #[serde(default)]
    radius: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    #[serde(default = "default_out_dir")]
    dir: String,
}

fn default_out_dir() -> String {
    "out".into()
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: default_out_dir() }
    }
}

/// Command-line overrides applied after parsing.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
}

/// Coupling-strength plan.
#[derive(Debug, Clone, PartialEq)]
pub enum EpsilonPlan {
    Fixed(f64),
    Sweep { from: f64, to: f64, steps: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationSettings {
    pub t0: f64,
    pub t_end: f64,
    pub dt: f64,
    pub record_every: usize,
}

#[derive(Debug, Clone)]
pub enum InitialPlan {
    Explicit(Vec<f64>),
    RandomBox { lower: Vec<f64>, upper: Vec<f64>, seed: u64 },
    RandomBall { radius_fraction: f64, base: Vec<f64>, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdMethod {
    Generic,
    ConnectionGraph,
}

#[derive(Debug, Clone)]
pub struct ThresholdPlan {
    pub method: ThresholdMethod,
    pub exhaustive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncSettings {
    pub tolerance: f64,
    pub trailing_window: f64,
}

#[derive(Debug)]
pub struct AuditPlan {
    pub count: usize,
    pub seed: u64,
    pub region: DomainDescriptor,
    pub wintner_region: DomainDescriptor,
    pub envelope: GrowthEnvelope,
    pub time_interval: (f64, f64),
}

/// A fully resolved, validated scenario.
pub struct Scenario {
    pub name: String,
    pub graph: UndirectedGraph,
    pub model: OscillatorModel,
    pub coupling: CouplingFunction,
    pub weights: WeightVector,
    pub phi: Pseudometric,
    pub epsilon: EpsilonPlan,
    pub integration: IntegrationSettings,
    pub initial: InitialPlan,
    pub threshold: ThresholdPlan,
    pub sync: SyncSettings,
    pub audit: Option<AuditPlan>,
    pub ball_radius: Option<f64>,
    pub out_dir: PathBuf,
}

impl Scenario {
    /// Parses and resolves a scenario file, then applies overrides.
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read scenario file {}", path.display()))?;
        let file: ScenarioFile = toml::from_str(&text)
            .with_context(|| format!("cannot parse scenario file {}", path.display()))?;
        let mut scenario = resolve(file)?;
        if let Some(seed) = overrides.seed {
            match &mut scenario.initial {
                InitialPlan::Explicit(_) => {}
                InitialPlan::RandomBox { seed: s, .. } => *s = seed,
                InitialPlan::RandomBall { seed: s, .. } => *s = seed,
            }
            if let Some(audit) = &mut scenario.audit {
                audit.seed = seed;
            }
        }
        if let Some(dir) = &overrides.out_dir {
            scenario.out_dir = dir.clone();
        }
        if let Some(dt) = overrides.dt {
            scenario.integration.dt = dt;
        }
        if let Some(t_end) = overrides.t_end {
            scenario.integration.t_end = t_end;
        }
        validate_settings(&scenario)?;
        Ok(scenario)
    }

    /// Builds the initial state matrix. The ball plan needs the resolved
    /// ball radius.
    pub fn initial_states(&self) -> Result<Vec<f64>> {
        let n = self.graph.n();
        let d = self.model.dim();
        match &self.initial {
            InitialPlan::Explicit(states) => Ok(states.clone()),
            InitialPlan::RandomBox { lower, upper, seed } => {
                Ok(initial_states_random_box(n, d, lower, upper, *seed)?)
            }
            InitialPlan::RandomBall { radius_fraction, base, seed } => {
                let radius = self.ball_radius.ok_or_else(|| {
                    anyhow!("initial.kind = \"random_ball\" requires a [ball] section")
                })?;
                Ok(initial_states_in_v_ball(
                    n,
                    d,
                    &self.weights,
                    base,
                    radius_fraction * radius,
                    *seed,
                )?)
            }
        }
    }
}

fn resolve(file: ScenarioFile) -> Result<Scenario> {
    let graph = resolve_graph(&file.graph)?;
    let n = graph.n();
    let model = resolve_model(&file.model, n)?;
    let d = model.dim();
    let coupling = resolve_coupling(&file.coupling, &file.model)?;
    let weights = resolve_weights(&file.weights, &file.model)?;
    if coupling.dim() != d {
        bail!(
            "dimension mismatch: model '{}' has dimension {d} but coupling '{}' has {}",
            file.model.name,
            file.coupling.name,
            coupling.dim()
        );
    }
    if weights.len() != d {
        bail!(
            "dimension mismatch: model '{}' has dimension {d} but weights have {}",
            file.model.name,
            weights.len()
        );
    }
    let phi = resolve_pseudometric(&file.pseudometric, &coupling, &weights, d)?;

    let epsilon = match file.epsilon {
        EpsilonSection::Fixed(v) => EpsilonPlan::Fixed(v),
        EpsilonSection::Sweep(SweepSpec { from, to, steps }) => {
            if steps < 2 {
                bail!("epsilon sweep needs at least 2 steps, got {steps}");
            }
            if !(to > from) {
                bail!("epsilon sweep needs to > from, got [{from}, {to}]");
            }
            EpsilonPlan::Sweep { from, to, steps }
        }
    };

    let integration = IntegrationSettings {
        t0: file.integration.t0,
        t_end: file.integration.t_end,
        dt: file.integration.dt,
        record_every: file.integration.record_every,
    };

    let ball_radius = match &file.ball {
        None => None,
        Some(spec) => Some(resolve_ball_radius(spec, &file.model)?),
    };

    let initial = resolve_initial(&file.initial, n, d, ball_radius.is_some())?;
    let threshold = resolve_threshold(&file.threshold)?;
    let sync = SyncSettings {
        tolerance: file.sync.tolerance,
        trailing_window: file.sync.trailing_window,
    };
    let audit = match &file.audit {
        None => None,
        Some(section) => Some(resolve_audit(section, &phi, d)?),
    };

    Ok(Scenario {
        name: file.name,
        graph,
        model,
        coupling,
        weights,
        phi,
        epsilon,
        integration,
        initial,
        threshold,
        sync,
        audit,
        ball_radius,
        out_dir: PathBuf::from(file.output.dir),
    })
}

fn resolve_graph(section: &GraphSection) -> Result<UndirectedGraph> {
    let need_n = || {
        section
            .n
            .ok_or_else(|| anyhow!("graph family '{}' requires n", section.family))
    };
    let family = match section.family.as_str() {
        "star" => GraphFamily::Star { n: need_n()? },
        "path" => GraphFamily::Path { n: need_n()? },
        "cycle" => GraphFamily::Cycle { n: need_n()? },
        "complete" => GraphFamily::Complete { n: need_n()? },
        "custom" => GraphFamily::Custom {
            n: need_n()?,
            edges: section
                .edges
                .clone()
                .ok_or_else(|| anyhow!("custom graph requires an edge list"))?,
        },
        other => bail!("unknown graph family '{other}' (star|path|cycle|complete|custom)"),
    };
    if !matches!(family, GraphFamily::Custom { .. }) && section.edges.is_some() {
        bail!("graph family '{}' does not take an edge list", section.family);
    }
    Ok(build_graph(&family)?)
}

fn typed_params<T: serde::de::DeserializeOwned>(
    params: &Option<toml::Value>,
    what: &str,
) -> Result<T> {
    let value = params
        .clone()
        .ok_or_else(|| anyhow!("{what} requires a params table"))?;
    value
        .try_into()
        .with_context(|| format!("invalid params for {what}"))
}

fn fhn_base_params(model: &ModelSection) -> Result<FhnParamsFile> {
    typed_params::<FhnParamsFile>(&model.params, "model 'fitzhugh_nagumo'")
}

fn resolve_model(section: &ModelSection, n: usize) -> Result<OscillatorModel> {
    match section.name.as_str() {
        "fitzhugh_nagumo" => {
            let base = fhn_base_params(section)?;
            let base = FhnParams { a: base.a, b: base.b, c: base.c, d: base.d };
            if section.node_overrides.is_empty() {
                Ok(fhn_field(&[base])?)
            } else {
                let mut per_node = vec![base; n];
                for o in &section.node_overrides {
                    if o.node < 1 || o.node > n {
                        bail!("node override references node {} outside 1..={n}", o.node);
                    }
                    let p = &mut per_node[o.node - 1];
                    if let Some(v) = o.a {
                        p.a = v;
                    }
                    if let Some(v) = o.b {
                        p.b = v;
                    }
                    if let Some(v) = o.c {
                        p.c = v;
                    }
                    if let Some(v) = o.d {
                        p.d = v;
                    }
                }
                Ok(fhn_field(&per_node)?)
            }
        }
        "chua" => {
            if !section.node_overrides.is_empty() {
                bail!("model 'chua' does not support node overrides");
            }
            let p: ChuaParamsFile = typed_params(&section.params, "model 'chua'")?;
            Ok(chua_field(ChuaParams { a: p.a, b: p.b, c: p.c, d: p.d, e: p.e })?)
        }
        "zero" => {
            if !section.node_overrides.is_empty() {
                bail!("model 'zero' does not support node overrides");
            }
            let p: ZeroParamsFile = typed_params(&section.params, "model 'zero'")?;
            Ok(zero_field(p.dim)?)
        }
        other => bail!("unknown model '{other}' (fitzhugh_nagumo|chua|zero)"),
    }
}

fn chua_model_params(model: &ModelSection) -> Result<ChuaParamsFile> {
    if model.name != "chua" {
        bail!("this setting derives parameters from a chua model, but the model is '{}'", model.name);
    }
    typed_params::<ChuaParamsFile>(&model.params, "model 'chua'")
}

fn resolve_coupling(section: &CouplingSection, model: &ModelSection) -> Result<CouplingFunction> {
    match section.name.as_str() {
        "fhn_coupling" => {
            let p: FhnCouplingParamsFile = typed_params(&section.params, "coupling 'fhn_coupling'")?;
            let b = match p.b {
                Some(b) => b,
                None => {
                    if model.name != "fitzhugh_nagumo" {
                        bail!("fhn_coupling needs b (cannot derive it from model '{}')", model.name);
                    }
                    if section_overrides_touch_b(model) {
                        bail!("fhn_coupling needs an explicit b: the model's b is heterogeneous");
                    }
                    fhn_base_params(model)?.b
                }
            };
            Ok(fhn_coupling(p.alpha, p.beta, p.gamma, b)?)
        }
        "chua_coupling" => {
            let p: ChuaCouplingParamsFile = match &section.params {
                None => ChuaCouplingParamsFile::default(),
                Some(_) => typed_params(&section.params, "coupling 'chua_coupling'")?,
            };
            let model_params = chua_model_params(model);
            let a = match (p.a, &model_params) {
                (Some(a), _) => a,
                (None, Ok(mp)) => mp.a,
                (None, Err(_)) => bail!("chua_coupling needs a (cannot derive it from the model)"),
            };
            let delta = match (p.delta, &model_params) {
                (Some(d), _) => d,
                (None, Ok(mp)) => chua_slope_bound(mp.d, mp.e)?,
                (None, Err(_)) => {
                    bail!("chua_coupling needs delta (cannot derive it from the model)")
                }
            };
            Ok(chua_coupling(a, delta)?)
        }
        "linear_difference" => {
            if section.params.is_some() {
                bail!("coupling 'linear_difference' takes no params");
            }
            let dim = match model.name.as_str() {
                "zero" => typed_params::<ZeroParamsFile>(&model.params, "model 'zero'")?.dim,
                "fitzhugh_nagumo" => 2,
                "chua" => 3,
                other => bail!("cannot derive dimension from model '{other}'"),
            };
            Ok(linear_difference_coupling(dim)?)
        }
        other => bail!("unknown coupling '{other}' (fhn_coupling|chua_coupling|linear_difference)"),
    }
}

fn section_overrides_touch_b(model: &ModelSection) -> bool {
    model.node_overrides.iter().any(|o| o.b.is_some())
}

fn resolve_weights(section: &WeightsSection, model: &ModelSection) -> Result<WeightVector> {
    match (&section.preset, &section.values) {
        (Some(_), Some(_)) => bail!("weights take either a preset or explicit values, not both"),
        (None, None) => bail!("weights need a preset or explicit values"),
        (None, Some(values)) => Ok(WeightVector::new(values.clone())?),
        (Some(preset), None) => match preset.as_str() {
            "fhn" => {
                if model.name != "fitzhugh_nagumo" {
                    bail!("weights preset 'fhn' requires the fitzhugh_nagumo model");
                }
                if section_overrides_touch_b(model) {
                    bail!("weights preset 'fhn' requires a homogeneous b; give explicit values");
                }
                Ok(fhn_weights(fhn_base_params(model)?.b)?)
            }
            "chua" => {
                let p = chua_model_params(model)?;
                Ok(chua_weights(p.a, p.b)?)
            }
            other => bail!("unknown weights preset '{other}' (fhn|chua)"),
        },
    }
}

fn resolve_rho(spec: &RhoSpec) -> Result<RhoSequence> {
    match spec.kind.as_str() {
        "linear" => Ok(RhoSequence::linear()),
        "power" => {
            let exponent = spec
                .exponent
                .ok_or_else(|| anyhow!("rho kind 'power' requires an exponent"))?;
            Ok(RhoSequence::power(exponent)?)
        }
        "table" => {
            let values = spec
                .values
                .clone()
                .ok_or_else(|| anyhow!("rho kind 'table' requires values"))?;
            Ok(RhoSequence::table(values)?)
        }
        other => bail!("unknown rho kind '{other}' (linear|power|table)"),
    }
}

fn resolve_domain(spec: &DomainSpec, default_dim: usize) -> Result<DomainDescriptor> {
    match spec.kind.as_str() {
        "all" => Ok(DomainDescriptor::all(spec.dim.unwrap_or(default_dim))?),
        "box" => {
            let lower = spec
                .lower
                .clone()
                .ok_or_else(|| anyhow!("domain kind 'box' requires lower"))?;
            let upper = spec
                .upper
                .clone()
                .ok_or_else(|| anyhow!("domain kind 'box' requires upper"))?;
            Ok(DomainDescriptor::bounded_box(lower, upper)?)
        }
        "ball" => {
            let center = spec
                .center
                .clone()
                .ok_or_else(|| anyhow!("domain kind 'ball' requires center"))?;
            let radius = spec
                .radius
                .ok_or_else(|| anyhow!("domain kind 'ball' requires radius"))?;
            Ok(DomainDescriptor::ball(center, radius)?)
        }
        other => bail!("unknown domain kind '{other}' (all|box|ball)"),
    }
}

fn resolve_pseudometric(
    section: &PseudometricSection,
    coupling: &CouplingFunction,
    weights: &WeightVector,
    dim: usize,
) -> Result<Pseudometric> {
    match section.name.as_str() {
        "power" => {
            let alpha = section
                .alpha
                .ok_or_else(|| anyhow!("pseudometric 'power' requires alpha"))?;
            if section.rho.is_some() {
                bail!("pseudometric 'power' derives rho from alpha; do not set rho");
            }
            if section.domain.is_some() {
                bail!("pseudometric 'power' lives on all of state space; do not set domain");
            }
            Ok(power_pseudometric_in_dim(alpha, dim)?)
        }
        "exp_damped" => {
            if dim != 3 {
                bail!("pseudometric 'exp_damped' lives in dimension 3, model has {dim}");
            }
            if section.alpha.is_some() || section.rho.is_some() || section.domain.is_some() {
                bail!("pseudometric 'exp_damped' is fully determined; do not set alpha, rho, or domain");
            }
            Ok(exp_damped_pseudometric())
        }
        "induced" => {
            if section.alpha.is_some() {
                bail!("pseudometric 'induced' takes no alpha");
            }
            let rho_spec = section
                .rho
                .as_ref()
                .ok_or_else(|| anyhow!("pseudometric 'induced' requires a declared rho"))?;
            let rho = resolve_rho(rho_spec)?;
            let domain = match &section.domain {
                None => DomainDescriptor::all(dim)?,
                Some(spec) => resolve_domain(spec, dim)?,
            };
            Ok(induced_pseudometric(coupling, weights, rho, domain)?)
        }
        other => bail!("unknown pseudometric '{other}' (power|exp_damped|induced)"),
    }
}

fn resolve_initial(
    section: &InitialSection,
    n: usize,
    d: usize,
    has_ball: bool,
) -> Result<InitialPlan> {
    match section.kind.as_str() {
        "explicit" => {
            let rows = section
                .states
                .clone()
                .ok_or_else(|| anyhow!("initial kind 'explicit' requires states"))?;
            if rows.len() != n {
                bail!("initial states have {} rows, graph has {n} vertices", rows.len());
            }
            let mut flat = Vec::with_capacity(n * d);
            for (idx, row) in rows.iter().enumerate() {
                if row.len() != d {
                    bail!(
                        "initial state row {} has {} coordinates, model dimension is {d}",
                        idx + 1,
                        row.len()
                    );
                }
                flat.extend_from_slice(row);
            }
            Ok(InitialPlan::Explicit(flat))
        }
        "random_box" => {
            let lower = section
                .lower
                .clone()
                .ok_or_else(|| anyhow!("initial kind 'random_box' requires lower"))?;
            let upper = section
                .upper
                .clone()
                .ok_or_else(|| anyhow!("initial kind 'random_box' requires upper"))?;
            let seed = section
                .seed
                .ok_or_else(|| anyhow!("initial kind 'random_box' requires a seed"))?;
            if lower.len() != d || upper.len() != d {
                bail!("initial box bounds must have {d} coordinates");
            }
            Ok(InitialPlan::RandomBox { lower, upper, seed })
        }
        "random_ball" => {
            if !has_ball {
                bail!("initial kind 'random_ball' requires a [ball] section");
            }
            let radius_fraction = section.radius_fraction.unwrap_or(0.5);
            if !(radius_fraction > 0.0 && radius_fraction < 1.0) {
                bail!("radius_fraction must lie strictly between 0 and 1");
            }
            let seed = section
                .seed
                .ok_or_else(|| anyhow!("initial kind 'random_ball' requires a seed"))?;
            let base = section.base.clone().unwrap_or_else(|| vec![0.0; d]);
            if base.len() != d {
                bail!("initial base state must have {d} coordinates");
            }
            Ok(InitialPlan::RandomBall { radius_fraction, base, seed })
        }
        other => bail!("unknown initial kind '{other}' (explicit|random_box|random_ball)"),
    }
}

fn resolve_threshold(section: &ThresholdSection) -> Result<ThresholdPlan> {
    let method = match section.method.as_str() {
        "generic" => ThresholdMethod::Generic,
        "connection-graph" => ThresholdMethod::ConnectionGraph,
        other => bail!("unknown threshold method '{other}' (generic|connection-graph)"),
    };
    let exhaustive = match section.strategy.as_str() {
        "bfs-min-length" => false,
        "exhaustive-best" => true,
        other => bail!("unknown path strategy '{other}' (bfs-min-length|exhaustive-best)"),
    };
    Ok(ThresholdPlan { method, exhaustive })
}

impl ThresholdPlan {
    pub fn path_strategy(&self, rho: &RhoSequence) -> PathStrategy {
        if self.exhaustive {
            PathStrategy::exhaustive(rho.clone())
        } else {
            PathStrategy::BfsMinLength
        }
    }
}

fn resolve_audit(section: &AuditSection, phi: &Pseudometric, dim: usize) -> Result<AuditPlan> {
    let region = match &section.region {
        Some(spec) => resolve_domain(spec, dim)?,
        None => {
            if phi.domain().is_bounded() {
                phi.domain().clone()
            } else {
                bail!(
                    "audit.region is required: the pseudometric domain is unbounded and cannot be sampled"
                );
            }
        }
    };
    let wintner_region = match &section.wintner_region {
        Some(spec) => resolve_domain(spec, dim)?,
        None => region.clone(),
    };
    let envelope = GrowthEnvelope::affine(section.wintner.offset, section.wintner.slope)?;
    Ok(AuditPlan {
        count: section.count,
        seed: section.seed,
        region,
        wintner_region,
        envelope,
        time_interval: section.time_interval.unwrap_or((0.0, 100.0)),
    })
}

fn resolve_ball_radius(section: &BallSection, model: &ModelSection) -> Result<f64> {
    match (&section.preset, section.radius) {
        (Some(_), Some(_)) => bail!("ball takes either a preset or a radius, not both"),
        (None, None) => bail!("ball needs a preset or a radius"),
        (None, Some(r)) => {
            if !(r > 0.0) {
                bail!("ball radius must be positive, got {r}");
            }
            Ok(r)
        }
        (Some(preset), None) => match preset.as_str() {
            // Containment ball radius (sqrt(2) - 1) * sqrt(a) for the Chua
            // star scenario.
            "chua" => {
                let p = chua_model_params(model)?;
                Ok((std::f64::consts::SQRT_2 - 1.0) * p.a.sqrt())
            }
            other => bail!("unknown ball preset '{other}' (chua)"),
        },
    }
}

fn validate_settings(scenario: &Scenario) -> Result<()> {
    let it = &scenario.integration;
    if !(it.dt > 0.0) {
        bail!("integration.dt must be positive, got {}", it.dt);
    }
    if !(it.t_end > it.t0) {
        bail!("integration.t_end ({}) must exceed t0 ({})", it.t_end, it.t0);
    }
    if it.record_every == 0 {
        bail!("integration.record_every must be at least 1");
    }
    if !(scenario.sync.tolerance > 0.0) {
        bail!("sync.tolerance must be positive");
    }
    let span = it.t_end - it.t0;
    if scenario.sync.trailing_window > span {
        bail!(
            "sync.trailing_window ({}) exceeds the integration span ({span})",
            scenario.sync.trailing_window
        );
    }
    if let EpsilonPlan::Fixed(eps) = scenario.epsilon {
        if !(eps.is_finite() && eps >= 0.0) {
            bail!("epsilon must be finite and nonnegative, got {eps}");
        }
    }
    Ok(())
}
