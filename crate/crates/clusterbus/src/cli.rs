//! Command-line experiment runner.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::converse::{converse_mc, latency_max_r, latency_pfail, pr_appropriate_bernoulli, pr_appropriate_exact, ConverseParams};
use crate::error::{Error, Result};
use crate::geometry::{LatticeKind, LatticeParams};
use crate::graphs::BoundaryGraph;
use crate::noise::{trial_rng, NoiseModel, PauliError};
use crate::oracle::{oracle_run, verify_stabilizer_identities};
use crate::protocols::{run_trials, Context, Decoder};
use crate::resilience::{closed_form_bounds, enumerate_census, mismatch_probability_mc, res_value};
use crate::stats::{sigma, wilson};

pub const CSV_HEADER: &str =
    "experiment,protocol,d,R,p,noise,trials,seed,n00,n01,n10,n11,nu00_hat,ci_low,ci_high,bound_value,verdict";

#[derive(Parser, Debug)]
#[command(name = "clusterbus", version, about = "Surface-code single-shot decoding and cluster-state quantum bus simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Monte Carlo run of either protocol.
    Simulate {
        #[arg(long, value_enum)]
        protocol: Protocol,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Monte Carlo run of single-shot surface decoding.
    SimulateSurface(SimArgs),
    /// Monte Carlo run of cluster-state entanglement generation.
    SimulateCluster(SimArgs),
    /// Exhaustive path census, resilience values and optional Monte Carlo check.
    Resilience(ResilienceArgs),
    /// Converse experiment under bit-flip noise.
    Converse(ConverseArgs),
    /// Evaluate a closed-form bound.
    Bounds(BoundsArgs),
    /// Cross-check the combinatorial engines against exact stabilizer simulation.
    OracleCheck(OracleArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Protocol {
    Surface,
    Cluster,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Master seed, or `auto` to draw one from the OS.
    #[arg(long, default_value = "0")]
    pub seed: String,
    /// Worker threads (0 = all cores).
    #[arg(long, env = "CLUSTERBUS_THREADS", default_value_t = 0)]
    pub threads: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct SimArgs {
    #[arg(long)]
    pub d: usize,
    /// Bus length R (cluster only).
    #[arg(long = "len")]
    pub len: Option<usize>,
    /// Error rate or comma-separated grid; fractions like 1/144 are accepted.
    #[arg(long)]
    pub p: Option<String>,
    /// depolarizing | bitflip | phaseflip | xz, optionally with `:<rate>`.
    #[arg(long, default_value = "depolarizing")]
    pub noise: String,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphSide {
    Primal,
    Dual,
    Both,
}

#[derive(Args, Debug, Clone)]
pub struct ResilienceArgs {
    #[arg(long, value_enum, default_value_t = Protocol::Surface)]
    pub protocol: Protocol,
    #[arg(long)]
    pub d: usize,
    #[arg(long = "len")]
    pub len: Option<usize>,
    #[arg(long, value_enum, default_value_t = GraphSide::Both)]
    pub graph: GraphSide,
    #[arg(long, default_value = "1/144")]
    pub p: String,
    /// Monte Carlo trials for the mismatch check (0 skips it).
    #[arg(long, default_value_t = 0)]
    pub trials: u64,
    /// Maximum path length; required above the enumeration budget.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Write the `length,count` census here (suffixed with the graph side).
    #[arg(long)]
    pub census_out: Option<PathBuf>,
    /// Write the decoding-graph dump here (suffixed with the graph side).
    #[arg(long)]
    pub dump: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct ConverseArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long = "len")]
    pub len: usize,
    #[arg(long, default_value = "0.25")]
    pub p: String,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct BoundsArgs {
    /// One of surface-res-x, surface-res-z, surface-failure, cluster-res-x,
    /// cluster-res-z, cluster-failure, achievability, max-R, latency-max-R, latency-pfail.
    #[arg(long)]
    pub name: String,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long = "len")]
    pub len: Option<usize>,
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub p0: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub delta: u32,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[command(flatten)]
    pub common: Common,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleLevel {
    /// All 4^5 Pauli errors on the d=2 surface code.
    ExhaustiveD2,
    /// Weight <= 1 plus random errors on the d=2, R=3 cluster.
    ClusterD2,
    /// Random errors on the d=3 surface code.
    SurfaceD3,
    /// Stabilizer-product identities for d in {2,3}, R in {3,5}.
    Identities,
    All,
}

#[derive(Args, Debug, Clone)]
pub struct OracleArgs {
    #[arg(long, value_enum, default_value_t = OracleLevel::ExhaustiveD2)]
    pub level: OracleLevel,
    /// Random cases for the sampled suites.
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[command(flatten)]
    pub common: Common,
}

/// One output row; `None` fields serialize as empty cells.
#[derive(Serialize, Clone, Debug, Default, PartialEq)]
pub struct Row {
    pub experiment: String,
    pub protocol: String,
    pub d: Option<usize>,
    #[serde(rename = "R")]
    pub r: Option<usize>,
    pub p: Option<f64>,
    pub noise: String,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub n00: Option<u64>,
    pub n01: Option<u64>,
    pub n10: Option<u64>,
    pub n11: Option<u64>,
    pub nu00_hat: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub bound_value: Option<f64>,
    pub verdict: String,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub rows: Vec<Row>,
    /// Human-readable verdict lines.
    pub messages: Vec<String>,
    pub failed: bool,
}

impl Report {
    fn verdict(&mut self, ok: Option<bool>, msg: String) -> String {
        match ok {
            Some(true) => {
                self.messages.push(format!("PASS {msg}"));
                "pass".into()
            }
            Some(false) => {
                self.failed = true;
                self.messages.push(format!("FAIL {msg}"));
                "fail".into()
            }
            None => {
                self.messages.push(format!("INFO {msg}"));
                String::new()
            }
        }
    }

    pub fn to_csv(&self) -> anyhow::Result<String> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        let body = String::from_utf8(w.into_inner()?)?;
        Ok(format!("{CSV_HEADER}\n{body}"))
    }

    pub fn to_json(&self) -> anyhow::Result<String> {
        Ok(serde_json::to_string_pretty(&self.rows)?)
    }

    pub fn render(&self, format: Format) -> anyhow::Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Parses a probability: decimal, scientific or `a/b`.
pub fn parse_prob(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::InvalidParams(format!("cannot parse probability `{s}`"));
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            a / b
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if !(0.0..=1.0).contains(&v) {
        return Err(bad());
    }
    Ok(v)
}

pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_prob).collect()
}

pub fn parse_seed(s: &str) -> Result<u64> {
    if s == "auto" {
        return Ok(rand::random());
    }
    s.parse().map_err(|_| Error::InvalidParams(format!("--seed expects an integer or `auto`, got `{s}`")))
}

fn lattice_params(protocol: Protocol, d: usize, len: Option<usize>) -> Result<LatticeParams> {
    match protocol {
        Protocol::Surface => LatticeParams::surface(d),
        Protocol::Cluster => {
            let r = len.ok_or_else(|| Error::InvalidParams("--len is required for the cluster protocol".into()))?;
            LatticeParams::cluster(d, r)
        }
    }
}

fn noise_models(noise: &str, p: Option<&str>) -> Result<Vec<NoiseModel>> {
    if noise.contains(':') {
        return Ok(vec![noise.parse()?]);
    }
    let grid = p.ok_or_else(|| Error::InvalidParams("--p is required unless --noise carries a rate".into()))?;
    parse_grid(grid)?.into_iter().map(|p| NoiseModel::from_kind(noise, p)).collect()
}

pub fn run_simulate(protocol: Protocol, a: &SimArgs) -> Result<Report> {
    let params = lattice_params(protocol, a.d, a.len)?;
    let seed = parse_seed(&a.common.seed)?;
    let ctx = Context::new(params)?;
    let mut rep = Report::default();
    for model in noise_models(&a.noise, a.p.as_deref())? {
        let st = run_trials(&ctx, &model, a.trials, seed, a.common.threads)?;
        let p = model.rate();
        let (lo, hi) = st.nu00_interval();
        let (experiment, bound_name) = match protocol {
            Protocol::Surface => ("simulate-surface", "surface-failure"),
            Protocol::Cluster => ("simulate-cluster", "cluster-failure"),
        };
        let bound = closed_form_bounds(bound_name, &params, p).ok().map(|b| 1.0 - b);
        let label = format!(
            "{experiment} d={} R={} {model}: nu00={} CI=[{lo}, {hi}]",
            params.d,
            params.r.map_or("-".into(), |r| r.to_string()),
            st.nu00_hat()
        );
        let verdict = match bound {
            Some(b) => rep.verdict(Some(lo >= b), format!("{label} vs lower bound {b}")),
            None => rep.verdict(None, format!("{label} (p outside bound validity)")),
        };
        rep.rows.push(Row {
            experiment: experiment.into(),
            protocol: protocol_name(protocol).into(),
            d: Some(params.d),
            r: params.r,
            p: Some(p),
            noise: model.to_string(),
            trials: Some(st.trials),
            seed: Some(seed),
            n00: Some(st.counts[0]),
            n01: Some(st.counts[1]),
            n10: Some(st.counts[2]),
            n11: Some(st.counts[3]),
            nu00_hat: Some(st.nu00_hat()),
            ci_low: Some(lo),
            ci_high: Some(hi),
            bound_value: bound,
            verdict,
        });
    }
    Ok(rep)
}

fn protocol_name(p: Protocol) -> &'static str {
    match p {
        Protocol::Surface => "surface",
        Protocol::Cluster => "cluster",
    }
}

fn with_suffix(path: &std::path::Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    path.with_file_name(format!("{stem}-{suffix}{ext}"))
}

pub fn run_resilience(a: &ResilienceArgs) -> Result<Report> {
    let params = lattice_params(a.protocol, a.d, a.len)?;
    let seed = parse_seed(&a.common.seed)?;
    let ctx = Context::new(params)?;
    let grid = parse_grid(&a.p)?;
    let mut rep = Report::default();
    let sides: Vec<(&str, &BoundaryGraph, &crate::graphs::EdgeSet, &str)> = {
        let (bx, bz) = match a.protocol {
            Protocol::Surface => ("surface-res-x", "surface-res-z"),
            Protocol::Cluster => ("cluster-res-x", "cluster-res-z"),
        };
        let mut v = Vec::new();
        if a.graph != GraphSide::Dual {
            v.push(("primal", &ctx.dec, ctx.lx(), bx));
        }
        if a.graph != GraphSide::Primal {
            v.push(("dual", &ctx.dec_dual, ctx.lz(), bz));
        }
        v
    };
    for (side, g, l, bound_name) in sides {
        let census = enumerate_census(g, l, a.cap)?;
        if let Some(path) = &a.census_out {
            std::fs::write(with_suffix(path, side), census.to_csv())
                .map_err(|e| Error::InvalidParams(format!("--census-out: {e}")))?;
        }
        if let Some(path) = &a.dump {
            std::fs::write(with_suffix(path, side), g.dump())
                .map_err(|e| Error::InvalidParams(format!("--dump: {e}")))?;
        }
        let protocol = format!("{}-{side}", protocol_name(a.protocol));
        rep.messages.push(format!(
            "INFO {protocol} d={} census N(1..)={:?} exhaustive={}",
            params.d,
            &census.counts[1.min(census.counts.len())..],
            census.exhaustive
        ));
        for &p in &grid {
            let res = res_value(&census, p);
            let bound = closed_form_bounds(bound_name, &params, p).ok();
            let ok = bound.map(|b| res <= b * (1.0 + 1e-12));
            let verdict = rep.verdict(ok, format!("{protocol} d={} p={p}: res={res} bound={bound:?}", params.d));
            rep.rows.push(Row {
                experiment: "resilience".into(),
                protocol: protocol.clone(),
                d: Some(params.d),
                r: params.r,
                p: Some(p),
                nu00_hat: Some(res),
                bound_value: bound,
                verdict,
                ..Default::default()
            });
            if a.trials > 0 {
                let est = mismatch_probability_mc(g, l, p, a.trials, seed, a.common.threads)?;
                let (lo, hi) = est.interval();
                let limit = res + 3.0 * est.sigma();
                let ok = census.exhaustive.then_some(est.p_hat() <= limit);
                let verdict = rep.verdict(ok, format!("{protocol} d={} q={p}: mismatch={} <= res+3sigma={limit}", params.d, est.p_hat()));
                rep.rows.push(Row {
                    experiment: "resilience-mc".into(),
                    protocol: protocol.clone(),
                    d: Some(params.d),
                    r: params.r,
                    p: Some(p),
                    noise: format!("edge-iid:{p}"),
                    trials: Some(est.trials),
                    seed: Some(seed),
                    nu00_hat: Some(est.p_hat()),
                    ci_low: Some(lo),
                    ci_high: Some(hi),
                    bound_value: Some(limit),
                    verdict,
                    ..Default::default()
                });
            }
        }
    }
    Ok(rep)
}

pub fn run_converse(a: &ConverseArgs) -> Result<Report> {
    let seed = parse_seed(&a.common.seed)?;
    let mut rep = Report::default();
    for p in parse_grid(&a.p)? {
        let cp = ConverseParams::new(a.d, a.len, p)?;
        let st = converse_mc(&cp, a.trials, seed, a.common.threads)?;
        let exact = pr_appropriate_bernoulli(&cp);
        let two_p = pr_appropriate_exact(&cp);
        let n = a.trials;
        let base = Row {
            protocol: "cluster".into(),
            d: Some(cp.d),
            r: Some(cp.r),
            p: Some(p),
            noise: NoiseModel::Bitflip(p).to_string(),
            trials: Some(n),
            seed: Some(seed),
            ..Default::default()
        };
        let tag = format!("converse d={} R={} p={p}", cp.d, cp.r);

        let appr = st.pr_appr.p_hat();
        let tol = 3.0 * sigma(exact, n);
        let v = rep.verdict(Some((appr - exact).abs() <= tol), format!("{tag}: pr_appr={appr} vs exact {exact} (2p form {two_p})"));
        rep.rows.push(row_estimate(&base, "converse:pr_appr", st.pr_appr.hits, n, exact, v));

        let half = 0.5 * appr;
        let both = st.pr_e1_and_appr.p_hat();
        let tol = 3.0 * sigma(both, n).max(sigma(half, n));
        let v = rep.verdict(Some((both - half).abs() <= tol), format!("{tag}: pr_e1_and_appr={both} vs pr_appr/2={half}"));
        rep.rows.push(row_estimate(&base, "converse:pr_e1_and_appr", st.pr_e1_and_appr.hits, n, half, v));

        let bz = st.pr_bz1.p_hat();
        // The converse is asymptotic; assert only once appropriateness is near certain.
        let assert = exact >= 0.99;
        let ok = assert.then_some(bz >= 0.25 - 3.0 * sigma(bz, n));
        let v = rep.verdict(ok, format!("{tag}: pr_bz1={bz} >= 1/4 (nu00 <= {}; regime R>=(1/(2sqrt p))^d: {})", 1.0 - bz, cp.in_converse_regime()));
        rep.rows.push(row_estimate(&base, "converse:pr_bz1", st.pr_bz1.hits, n, 0.25, v));
    }
    Ok(rep)
}

fn row_estimate(base: &Row, experiment: &str, hits: u64, n: u64, bound: f64, verdict: String) -> Row {
    let (lo, hi) = wilson(hits, n);
    Row {
        experiment: experiment.into(),
        nu00_hat: Some(hits as f64 / n as f64),
        ci_low: Some(lo),
        ci_high: Some(hi),
        bound_value: Some(bound),
        verdict,
        ..base.clone()
    }
}

pub fn run_bounds(a: &BoundsArgs) -> Result<Report> {
    let need = |v: &Option<String>, flag: &str| {
        v.as_deref()
            .ok_or_else(|| Error::InvalidParams(format!("--{flag} is required for {}", a.name)))
            .and_then(parse_prob)
    };
    let mut row = Row { experiment: "bounds".into(), protocol: a.name.clone(), ..Default::default() };
    let value = match a.name.as_str() {
        "latency-max-R" => {
            let p0 = need(&a.p0, "p0")?;
            row.p = Some(p0);
            latency_max_r(p0, a.delta, a.m)?
        }
        "latency-pfail" => {
            let p = need(&a.p, "p")?;
            let r = a.len.ok_or_else(|| Error::InvalidParams("--len is required for latency-pfail".into()))?;
            row.p = Some(p);
            row.r = Some(r);
            latency_pfail(r as f64, p, a.delta, a.m)?
        }
        name => {
            let p = need(&a.p, "p")?;
            let params = match a.len {
                Some(r) => LatticeParams::cluster(a.d, r)?,
                None => LatticeParams::surface(a.d)?,
            };
            row.p = Some(p);
            row.d = Some(a.d);
            row.r = a.len;
            closed_form_bounds(name, &params, p)?
        }
    };
    row.bound_value = Some(value);
    let mut rep = Report::default();
    rep.messages.push(format!("{} = {value}", a.name));
    rep.rows.push(row);
    Ok(rep)
}

#[allow(clippy::too_many_arguments)]
fn oracle_row(rep: &mut Report, suite: &str, protocol: LatticeKind, params: LatticeParams, cases: u64, agree: u64, seed: Option<u64>, detail: String) {
    let verdict = rep.verdict(Some(agree == cases), format!("oracle {suite}: {agree}/{cases} agree{detail}"));
    rep.rows.push(Row {
        experiment: format!("oracle-check:{suite}"),
        protocol: protocol.to_string(),
        d: Some(params.d),
        r: params.r,
        trials: Some(cases),
        seed,
        n00: Some(agree),
        verdict,
        ..Default::default()
    });
}

/// Compares combinatorial outcomes with exact simulation over `errors`.
fn oracle_compare(ctx: &Context, errors: impl Iterator<Item = PauliError>, seed: u64) -> Result<(u64, u64, Option<String>)> {
    let mut dec = Decoder::new(ctx);
    let (mut cases, mut agree, mut first_bad) = (0u64, 0u64, None);
    for (i, e) in errors.enumerate() {
        let fast = dec.outcome(&e)?;
        let exact = oracle_run(ctx, &e, &mut trial_rng(seed, i as u64))?;
        cases += 1;
        if fast == exact.label {
            agree += 1;
        } else if first_bad.is_none() {
            first_bad = Some(format!("; first mismatch {e:?}: fast {fast:?} oracle {:?}", exact.label));
        }
    }
    Ok((cases, agree, first_bad))
}

/// Every Pauli error on the given qubits, indexed by base-4 digits.
pub fn all_paulis(qubits: &[crate::geometry::Site]) -> impl Iterator<Item = PauliError> + '_ {
    (0..4u64.pow(qubits.len() as u32)).map(move |mut code| {
        let mut e = PauliError::identity();
        for s in qubits {
            match code % 4 {
                1 => {
                    e.xsupp.insert(*s);
                }
                2 => {
                    e.xsupp.insert(*s);
                    e.zsupp.insert(*s);
                }
                3 => {
                    e.zsupp.insert(*s);
                }
                _ => {}
            }
            code /= 4;
        }
        e
    })
}

/// Identity plus X, Y, Z on each qubit.
pub fn weight_le1(qubits: &[crate::geometry::Site]) -> Vec<PauliError> {
    let mut v = vec![PauliError::identity()];
    for s in qubits {
        v.push(PauliError::x(&[*s]));
        v.push(PauliError::y(&[*s]));
        v.push(PauliError::z(&[*s]));
    }
    v
}

fn random_paulis(ctx: &Context, count: u64, seed: u64, rate: f64) -> Vec<PauliError> {
    let model = NoiseModel::Depolarizing(rate);
    (0..count)
        .map(|t| crate::noise::sample_error(&model, &ctx.lattice.qubits, &mut trial_rng(seed ^ 0x9e37_79b9, t)))
        .collect()
}

pub fn run_oracle(a: &OracleArgs) -> Result<Report> {
    let seed = parse_seed(&a.common.seed)?;
    let mut rep = Report::default();
    let lv = a.level;
    let on = |x: OracleLevel| lv == x || lv == OracleLevel::All;
    if on(OracleLevel::ExhaustiveD2) {
        let ctx = Context::surface(2)?;
        let (n, ok, bad) = oracle_compare(&ctx, all_paulis(&ctx.lattice.qubits), seed)?;
        oracle_row(&mut rep, "exhaustive-d2", LatticeKind::Surface, ctx.params(), n, ok, Some(seed), bad.unwrap_or_default());
    }
    if on(OracleLevel::SurfaceD3) {
        let ctx = Context::surface(3)?;
        let errs = random_paulis(&ctx, a.trials, seed, 0.2);
        let (n, ok, bad) = oracle_compare(&ctx, errs.into_iter(), seed)?;
        oracle_row(&mut rep, "surface-d3", LatticeKind::Surface, ctx.params(), n, ok, Some(seed), bad.unwrap_or_default());
    }
    if on(OracleLevel::ClusterD2) {
        let ctx = Context::cluster(2, 3)?;
        let mut errs = weight_le1(&ctx.lattice.qubits);
        errs.extend(random_paulis(&ctx, a.trials, seed, 0.15));
        let (n, ok, bad) = oracle_compare(&ctx, errs.into_iter(), seed)?;
        oracle_row(&mut rep, "cluster-d2", LatticeKind::Cluster, ctx.params(), n, ok, Some(seed), bad.unwrap_or_default());
    }
    if on(OracleLevel::Identities) {
        for (d, r) in [(2, 3), (2, 5), (3, 3), (3, 5)] {
            let params = LatticeParams::cluster(d, r)?;
            let id = verify_stabilizer_identities(&params)?;
            let detail = id.failures.first().map(|f| format!("; {f}")).unwrap_or_default();
            oracle_row(&mut rep, "identities", LatticeKind::Cluster, params, id.checked as u64, (id.checked - id.failures.len()) as u64, None, detail);
        }
    }
    Ok(rep)
}

pub fn run(cmd: &Command) -> Result<(Report, Common)> {
    Ok(match cmd {
        Command::Simulate { protocol, sim } => (run_simulate(*protocol, sim)?, sim.common.clone()),
        Command::SimulateSurface(sim) => (run_simulate(Protocol::Surface, sim)?, sim.common.clone()),
        Command::SimulateCluster(sim) => (run_simulate(Protocol::Cluster, sim)?, sim.common.clone()),
        Command::Resilience(a) => (run_resilience(a)?, a.common.clone()),
        Command::Converse(a) => (run_converse(a)?, a.common.clone()),
        Command::Bounds(a) => (run_bounds(a)?, a.common.clone()),
        Command::OracleCheck(a) => (run_oracle(a)?, a.common.clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probabilities() {
        assert_eq!(parse_prob("1/4").unwrap(), 0.25);
        assert_eq!(parse_prob("1e-4").unwrap(), 1e-4);
        assert!(parse_prob("2").is_err());
        assert_eq!(parse_grid("0.1,1/2").unwrap(), vec![0.1, 0.5]);
        assert!(parse_seed("x").is_err());
    }

    #[test]
    fn max_r_bound_row() {
        let cli = Cli::try_parse_from(["clusterbus", "bounds", "--name", "max-R", "--d", "5", "--p", "1e-4", "--len", "199"]).unwrap();
        let (rep, _) = run(&cli.command).unwrap();
        let v = rep.rows[0].bound_value.unwrap();
        assert!((v - 200.0).abs() < 1e-9);
        assert!(rep.to_csv().unwrap().starts_with(CSV_HEADER));
    }

    #[test]
    fn cluster_needs_len() {
        let cli = Cli::try_parse_from(["clusterbus", "simulate", "--protocol", "cluster", "--d", "3", "--p", "0.01"]).unwrap();
        assert!(run(&cli.command).is_err());
    }
}
