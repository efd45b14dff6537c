//! Command-line driver. Settings come from built-in defaults, then an optional
//! config file, then flags; later sources win.
//!
//! ```text
//! [run]
//! rule = pillow_lattes
//! level = 5
//! seed = 1
//! out = thurston-out
//! method = howard
//!
//! [potential]
//! spec = smooth:3
//! alpha = 1
//!
//! [closing]
//! r = 1
//! theta = 1
//! tau = 1
//! kappa = 2
//! epsilon = 0.1
//!
//! [tpo]
//! trials = 20
//! t_max = 256
//! ```
//!
//! Potential specs: `const:C`, `x`, `y`, `smooth:SEED[:TERMS]`, `table:FILE`.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::closing::{self, GapBoundConfig, GapSpec, PeriodicOrbit};
use crate::ergopt::{self, Method};
use crate::error::{Error, Result};
use crate::geometry;
use crate::potential::{self, ClosedForm, Cylinders, Potential, PotentialTable};
use crate::subdivision::{self, SubdivisionRule, SvgOptions};
use crate::symbolic::{self, TileWord};
use crate::textfmt;
use crate::tpo;

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub rule: String,
    pub level: usize,
    pub lambda: Option<f64>,
    pub alpha: f64,
    pub potential: String,
    pub method: String,
    /// TPO perturbation size; `None` means `0.05 * range`.
    pub epsilon: Option<f64>,
    pub r: f64,
    pub theta: f64,
    pub tau: f64,
    pub kappa: f64,
    pub bq_epsilon: f64,
    pub trials: usize,
    /// Locking perturbation size; `None` means `epsilon / 10`.
    pub rho: Option<f64>,
    pub t_max: f64,
    pub seed: u64,
    pub threads: usize,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            rule: "pillow_lattes".into(),
            level: 4,
            lambda: None,
            alpha: 1.0,
            potential: "smooth:1".into(),
            method: "howard".into(),
            epsilon: None,
            r: 1.0,
            theta: 1.0,
            tau: 1.0,
            kappa: 2.0,
            bq_epsilon: 0.1,
            trials: 20,
            rho: None,
            t_max: 256.0,
            seed: 1,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            out: PathBuf::from("thurston-out"),
        }
    }
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Parse { line, msg } => Error::Config(format!("line {line}: {msg}")),
        other => other,
    }
}

impl RunConfig {
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for sec in textfmt::parse(text).map_err(config_err)? {
            for e in &sec.entries {
                let key = format!("{}.{}", sec.name, e.key);
                let v = || e.parse::<f64>().map_err(config_err);
                match key.as_str() {
                    "run.rule" => self.rule = e.value.trim().to_string(),
                    "run.level" => self.level = e.parse().map_err(config_err)?,
                    "run.lambda" => self.lambda = Some(v()?),
                    "run.method" => self.method = e.value.trim().to_string(),
                    "run.seed" => self.seed = e.parse().map_err(config_err)?,
                    "run.threads" => self.threads = e.parse().map_err(config_err)?,
                    "run.out" => self.out = PathBuf::from(e.value.trim()),
                    "potential.spec" => self.potential = e.value.trim().to_string(),
                    "potential.alpha" => self.alpha = v()?,
                    "closing.r" => self.r = v()?,
                    "closing.theta" => self.theta = v()?,
                    "closing.tau" => self.tau = v()?,
                    "closing.kappa" => self.kappa = v()?,
                    "closing.epsilon" => self.bq_epsilon = v()?,
                    "tpo.epsilon" => self.epsilon = Some(v()?),
                    "tpo.trials" => self.trials = e.parse().map_err(config_err)?,
                    "tpo.rho" => self.rho = Some(v()?),
                    "tpo.t_max" => self.t_max = v()?,
                    _ => return Err(Error::Config(format!("line {}: unknown key `{key}`", e.line))),
                }
            }
        }
        Ok(())
    }

    fn apply_flags(&mut self, f: &Flags) {
        macro_rules! set {
            ($($field:ident),*) => {$(if let Some(v) = f.$field.clone() { self.$field = v; })*};
        }
        set!(rule, level, alpha, potential, method, r, theta, tau, kappa, bq_epsilon, trials, t_max, seed, threads, out);
        if f.lambda.is_some() {
            self.lambda = f.lambda;
        }
        if f.epsilon.is_some() {
            self.epsilon = f.epsilon;
        }
        if f.rho.is_some() {
            self.rho = f.rho;
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(what.to_string()));
        if self.level > 12 {
            return bad("level must be at most 12");
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad("alpha must lie in (0, 1]");
        }
        if let Some(l) = self.lambda {
            if !(l > 1.0) {
                return bad("lambda must exceed 1");
            }
        }
        if self.epsilon.is_some_and(|e| !(e > 0.0)) {
            return bad("tpo epsilon must be positive");
        }
        if self.rho.is_some_and(|r| r < 0.0) {
            return bad("rho must be nonnegative");
        }
        if !(self.r > 0.0 && self.theta > 0.0 && self.tau > 0.0 && self.kappa > 0.0) {
            return bad("r, theta, tau and kappa must be positive");
        }
        if !(self.bq_epsilon > 0.0 && self.bq_epsilon < 1.0) {
            return bad("closing epsilon must lie in (0, 1)");
        }
        if !(self.t_max >= 1.0) {
            return bad("t_max must be at least 1");
        }
        if self.threads == 0 {
            return bad("threads must be positive");
        }
        self.method.parse::<Method>().map_err(|e| match e {
            Error::Usage(m) => Error::Config(m),
            other => other,
        })?;
        Ok(())
    }
}

#[derive(Parser, Debug)]
#[command(name = "thurston-ergopt", version, about = "Ergodic optimization on expanding Thurston maps")]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Default)]
struct Flags {
    /// Config file (sectioned key = value).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    rule: Option<String>,
    #[arg(long, global = true)]
    level: Option<usize>,
    #[arg(long, global = true)]
    lambda: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    potential: Option<String>,
    /// karp, howard or brute.
    #[arg(long, global = true)]
    method: Option<String>,
    /// TPO perturbation size.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    #[arg(long, global = true)]
    r: Option<f64>,
    #[arg(long, global = true)]
    theta: Option<f64>,
    #[arg(long, global = true)]
    tau: Option<f64>,
    #[arg(long, global = true)]
    kappa: Option<f64>,
    /// Neighborhood size for the shortest-cycle search.
    #[arg(long, global = true)]
    bq_epsilon: Option<f64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true)]
    rho: Option<f64>,
    #[arg(long, global = true)]
    t_max: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Recorded in the manifest; computations run on one thread.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory for reports and the manifest.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CloseMode {
    Bq,
    Anosov,
    Gap,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rule summary and cell counts per level.
    Info {
        /// Built-in name or rule file; overrides --rule.
        name: Option<String>,
    },
    /// Cell decomposition as JSON and SVG.
    Refine {
        #[arg(long)]
        no_svg: bool,
    },
    /// Transition matrix, word counts and traces.
    Sft,
    /// Maximal potential energy at the working level.
    Q,
    /// Calibrated sub-action, normalized potential and maximizing set.
    Subaction,
    /// Closing procedures.
    Close {
        #[arg(long, value_enum, default_value = "gap")]
        mode: CloseMode,
        /// Dotted tile word for the anosov mode.
        #[arg(long)]
        word: Option<String>,
        /// Segment length for the anosov mode.
        #[arg(long)]
        l: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long, default_value_t = 0.0)]
        eta: f64,
    },
    /// Perturb toward a periodic orbit and test locking.
    Tpo,
    /// Gibbs surrogates of the TPO output over a doubling temperature schedule.
    Sweep,
    /// Quick invariant checks.
    Selftest,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Info { .. } => "info",
            Command::Refine { .. } => "refine",
            Command::Sft => "sft",
            Command::Q => "q",
            Command::Subaction => "subaction",
            Command::Close { .. } => "close",
            Command::Tpo => "tpo",
            Command::Sweep => "sweep",
            Command::Selftest => "selftest",
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::Config(_) | Error::NotFound(_) | Error::Parse { .. } => 2,
        _ => 1,
    }
}

/// Runs the CLI and returns the process exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<String> = args
        .into_iter()
        .map(|a| a.into().to_string_lossy().into_owned())
        .collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let start = Instant::now();
    let mut run = Run {
        cfg,
        outputs: Vec::new(),
    };
    let result = dispatch(&cli.command, &mut run);
    let code = match &result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(e)
        }
    };
    if let Err(e) = run.manifest(cli.command.name(), &argv, start, code) {
        eprintln!("error: cannot write manifest: {e}");
        return code.max(1);
    }
    code
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.flags.config {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    cfg.apply_flags(&cli.flags);
    if let Command::Info { name: Some(n) } = &cli.command {
        cfg.rule = n.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

struct Run {
    cfg: RunConfig,
    outputs: Vec<String>,
}

impl Run {
    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        fs::create_dir_all(&self.cfg.out)?;
        let path = self.cfg.out.join(name);
        fs::write(&path, contents)?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let text = serde_json::to_string_pretty(value)?;
        self.write(name, &text)
    }

    fn manifest(&self, command: &str, argv: &[String], start: Instant, code: i32) -> Result<()> {
        let m = json!({
            "schema_version": 1,
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "argv": argv,
            "config": self.cfg,
            "seed": self.cfg.seed,
            "exit_code": code,
            "wall_time_s": start.elapsed().as_secs_f64(),
            "outputs": self.outputs,
        });
        fs::create_dir_all(&self.cfg.out)?;
        fs::write(self.cfg.out.join("manifest.json"), serde_json::to_string_pretty(&m)?)?;
        Ok(())
    }

    fn rule(&self) -> Result<SubdivisionRule> {
        let mut rule = subdivision::load_rule(&self.cfg.rule)?;
        if let Some(l) = self.cfg.lambda {
            rule.lambda = l;
        }
        Ok(rule)
    }

    fn method(&self) -> Method {
        self.cfg.method.parse().expect("validated")
    }
}

/// Parses a potential spec against the cylinders it will be used on.
pub fn parse_potential(spec: &str, rule: &SubdivisionRule, cyl: &Cylinders, alpha: f64) -> Result<Potential> {
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::Config(format!("bad number `{s}` in potential `{spec}`")))
    };
    let closed = match kind {
        "const" => ClosedForm::constant(num(arg)?),
        "x" => ClosedForm::x_coordinate(),
        "y" => ClosedForm::y_coordinate(),
        "smooth" => {
            let mut parts = arg.split(':');
            let seed = parts.next().filter(|s| !s.is_empty()).unwrap_or("1");
            let seed: u64 = seed
                .parse()
                .map_err(|_| Error::Config(format!("bad seed in potential `{spec}`")))?;
            let terms = match parts.next() {
                Some(t) => t
                    .parse()
                    .map_err(|_| Error::Config(format!("bad term count in potential `{spec}`")))?,
                None => 6,
            };
            ClosedForm::random_smooth(rule, terms, &mut ChaCha8Rng::seed_from_u64(seed))
        }
        "table" => {
            let text = fs::read_to_string(arg).map_err(|e| Error::Config(format!("{arg}: {e}")))?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            let coarse_level = value["level"].as_u64().unwrap_or(cyl.level() as u64) as usize;
            let g = if coarse_level == cyl.level() {
                cyl.graph.clone()
            } else {
                symbolic::CylinderGraph::new(&cyl.transition, coarse_level)?
            };
            return Ok(Potential::Table(PotentialTable::from_json(&g, &value)?));
        }
        _ => {
            return Err(Error::Config(format!(
                "unknown potential `{spec}` (const:C, x, y, smooth:SEED[:TERMS], table:FILE)"
            )))
        }
    };
    let _ = alpha;
    Ok(Potential::Closed(closed))
}

fn dispatch(cmd: &Command, run: &mut Run) -> Result<()> {
    match cmd {
        Command::Info { .. } => info(run),
        Command::Refine { no_svg } => refine(run, *no_svg),
        Command::Sft => sft(run),
        Command::Q => q(run),
        Command::Subaction => subaction(run),
        Command::Close {
            mode,
            word,
            l,
            delta,
            eta,
        } => close(run, *mode, word.as_deref(), *l, *delta, *eta),
        Command::Tpo => tpo_cmd(run).map(|_| ()),
        Command::Sweep => sweep(run),
        Command::Selftest => selftest(run),
    }
}

fn info(run: &mut Run) -> Result<()> {
    let rule = run.rule()?;
    let m = rule.faces[0].star.corners.len();
    println!("rule     {}", rule.name);
    println!("deg      {}", rule.degree);
    println!("m        {m}");
    println!("lambda   {}", rule.lambda);
    let crit: Vec<&str> = rule.critical_vertices().iter().map(|v| v.label.as_str()).collect();
    println!("critical {}", crit.join(" "));
    println!("level  tiles  edges");
    let mut rows = Vec::new();
    for n in 0..=6u32 {
        println!("{n:>5}  {:>5}  {:>5}", rule.tile_count(n), rule.edge_count(n));
        rows.push(json!({"level": n, "tiles": rule.tile_count(n).to_string(), "edges": rule.edge_count(n).to_string()}));
    }
    run.write_json(
        "info.json",
        &json!({"rule": rule.name, "deg": rule.degree, "m": m, "lambda": rule.lambda, "critical": crit, "counts": rows}),
    )
}

fn refine(run: &mut Run, no_svg: bool) -> Result<()> {
    let rule = run.rule()?;
    let decomp = subdivision::refine(&rule, run.cfg.level)?;
    println!(
        "level {}: {} tiles, {} edges, {} vertices",
        decomp.level,
        decomp.tiles.len(),
        decomp.edges.len(),
        decomp.vertices.len()
    );
    let json = decomp.to_json()?;
    run.write(&format!("refine_{}.json", decomp.level), &json)?;
    if !no_svg {
        let svg = subdivision::render_svg(&rule, &decomp, &SvgOptions::default());
        run.write(&format!("refine_{}.svg", decomp.level), &svg)?;
    }
    Ok(())
}

fn sft(run: &mut Run) -> Result<()> {
    let rule = run.rule()?;
    let a = symbolic::build_transition(&rule)?;
    println!("states {}", a.len());
    for (s, row) in a.entries.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        println!("{s:>3}  {}", cells.join(" "));
    }
    println!("level  words  trace");
    let mut rows = Vec::new();
    for n in 1..=run.cfg.level {
        let words = symbolic::enumerate_words(&a, n)?.len();
        let trace = a.trace_power(n);
        println!("{n:>5}  {words:>5}  {trace:>5}");
        rows.push(json!({"level": n, "words": words, "trace": trace.to_string()}));
    }
    run.write_json("sft.json", &json!({"matrix": a, "counts": rows}))
}

struct Setup {
    rule: SubdivisionRule,
    cyl: Cylinders,
    phi: Potential,
    table: PotentialTable,
}

fn setup(run: &Run) -> Result<Setup> {
    let rule = run.rule()?;
    let cyl = Cylinders::new(&rule, run.cfg.level)?;
    let phi = parse_potential(&run.cfg.potential, &rule, &cyl, run.cfg.alpha)?;
    let table = potential::discretize(&rule, &cyl, &phi)?;
    Ok(Setup {
        rule,
        cyl,
        phi,
        table,
    })
}

fn word_strings(g: &symbolic::CylinderGraph, nodes: &[usize]) -> Vec<String> {
    nodes.iter().map(|&v| g.words[v].to_string()).collect()
}

fn q(run: &mut Run) -> Result<()> {
    let s = setup(run)?;
    let g = &s.cyl.graph;
    let r = ergopt::q_value(g, &s.table, run.method())?;
    let holder = potential::holder_seminorm_estimate(&s.rule, &s.cyl, &s.table, run.cfg.alpha, &geometry::Metric::Model)?;
    let diam = g
        .words
        .iter()
        .map(|w| geometry::tile_star(&s.rule, w).diameter())
        .fold(0.0, f64::max);
    // oscillation of the potential over one cylinder
    let band = holder.seminorm_est * diam.powf(run.cfg.alpha);
    println!("q {}", r.q);
    println!("method {:?}", r.method);
    println!("band {band:e}");
    println!("cycle {}", word_strings(g, &r.cycle).join(" "));
    run.write_json(
        "q.json",
        &json!({"level": g.level, "q": r.q, "method": r.method, "band": band, "cycle": word_strings(g, &r.cycle)}),
    )
}

fn subaction_parts(s: &Setup) -> Result<(ergopt::MaxMeanResult, ergopt::BouschState, ergopt::ManeNormalization, Vec<usize>)> {
    let g = &s.cyl.graph;
    let r = ergopt::q_value(g, &s.table, Method::Howard)?;
    let u = ergopt::calibrated_subaction(g, &s.table, r.q, 10_000_000, ergopt::GRAPH_TOL)?;
    let phi = ergopt::mane_normalize(g, &s.table, &u, r.q, ergopt::GRAPH_TOL)?;
    let k = ergopt::maximizing_set(g, &phi, 1e-9)?;
    Ok((r, u, phi, k))
}

fn subaction(run: &mut Run) -> Result<()> {
    let s = setup(run)?;
    let g = &s.cyl.graph;
    let (r, u, phi, k) = subaction_parts(&s)?;
    println!("q {}", r.q);
    println!("residual {:e} after {} iterations", u.residual, u.iterations);
    println!("max normalized {:e}", phi.max_entry());
    println!("K {} words: {}", k.len(), word_strings(g, &k).join(" "));
    run.write_json(
        "subaction.json",
        &json!({
            "level": g.level,
            "q": r.q,
            "u": u.u,
            "residual": u.residual,
            "iterations": u.iterations,
            "normalized": phi.nodes.values,
            "max_normalized": phi.max_entry(),
            "K": word_strings(g, &k),
        }),
    )
}

fn orbit_json(orbit: &PeriodicOrbit, shadow: Option<&closing::ShadowReport>, trace: Option<&[closing::GapStep]>) -> serde_json::Value {
    json!({
        "period": orbit.period,
        "word": orbit.word.to_string(),
        "points": orbit.points,
        "gap": orbit.gap,
        "shadow_fit": shadow,
        "recursion_trace": trace,
    })
}

fn gap_config(cfg: &RunConfig) -> Result<GapBoundConfig> {
    Ok(GapBoundConfig {
        spec: GapSpec::new(cfg.r, cfg.theta)?,
        alpha: cfg.alpha,
        tau: cfg.tau,
        kappa: cfg.kappa,
        epsilon: cfg.bq_epsilon,
    })
}

fn parse_word(s: &str) -> Result<TileWord> {
    let syms = s
        .split('.')
        .map(|t| t.trim().parse::<u16>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::Usage(format!("bad word `{s}` (expected dotted tile ids like 0.1.5)")))?;
    Ok(TileWord::new(syms))
}

fn close(run: &mut Run, mode: CloseMode, word: Option<&str>, l: Option<usize>, delta: f64, eta: f64) -> Result<()> {
    let report = match mode {
        CloseMode::Anosov => {
            let rule = run.rule()?;
            let a = symbolic::build_transition(&rule)?;
            let w = parse_word(word.ok_or_else(|| Error::Usage("--word is required for anosov".into()))?)?;
            let l = l.ok_or_else(|| Error::Usage("--l is required for anosov".into()))?;
            let r = closing::local_anosov_close(&rule, &a, &w, l, delta, eta)?;
            println!("period {} slope {} beta {}", r.orbit.period, r.shadow.slope, r.shadow.beta);
            orbit_json(&r.orbit, Some(&r.shadow), None)
        }
        CloseMode::Bq | CloseMode::Gap => {
            let s = setup(run)?;
            let (_, _, _, k) = subaction_parts(&s)?;
            if let CloseMode::Bq = mode {
                let r = closing::bq_search(&s.rule, &s.cyl, &k, run.cfg.kappa, run.cfg.bq_epsilon)?;
                println!("period {} bound {} neighborhood {}", r.orbit.period, r.period_bound, r.neighborhood_size);
                orbit_json(&r.orbit, None, None)
            } else {
                let r = closing::bound_by_gap(&s.rule, &s.cyl, &k, &gap_config(&run.cfg)?)?;
                let last = r.trace.last().expect("trace is nonempty");
                println!("period {} steps {} lhs {:e} rhs {:e}", r.orbit.period, r.trace.len(), last.lhs, last.rhs);
                orbit_json(&r.orbit, None, Some(&r.trace))
            }
        }
    };
    run.write_json("close.json", &report)
}

fn tpo_config(cfg: &RunConfig) -> Result<tpo::TpoConfig> {
    let mut t = tpo::TpoConfig::new(cfg.alpha);
    t.epsilon = cfg.epsilon;
    t.gap = gap_config(cfg)?;
    Ok(t)
}

fn tpo_cmd(run: &mut Run) -> Result<(Setup, tpo::TpoReport)> {
    let s = setup(run)?;
    let mut report = tpo::tpo_pipeline(&s.rule, &s.cyl, &s.phi, &tpo_config(&run.cfg)?)?;
    let rho = run.cfg.rho.unwrap_or(report.epsilon / 10.0);
    report.locking = Some(tpo::locking_test(
        &s.rule,
        &s.cyl,
        &report.perturbed,
        run.cfg.trials,
        rho,
        run.cfg.seed,
    )?);
    let lock = report.locking.as_ref().expect("just set");
    println!("orbit {} (period {})", report.orbit.word, report.orbit.period);
    println!("q before {} after {}", report.q_before, report.q_after);
    println!("margin {:e}", report.margin);
    println!("success {}", report.success);
    println!("locking {}/{} at rho {:e}", lock.successes, lock.count, lock.rho);
    run.write_json("tpo.json", &report)?;
    if !report.success {
        return Err(Error::SearchFailed(format!("perturbed argmax is not the orbit: {:?}", report.notes)));
    }
    Ok((s, report))
}

fn sweep(run: &mut Run) -> Result<()> {
    let (s, report) = tpo_cmd(run)?;
    let points = tpo::zero_temperature_sweep(
        &s.rule,
        &s.cyl,
        &report.perturbed,
        &report.orbit,
        &tpo::doubling_schedule(run.cfg.t_max),
    )?;
    let csv = tpo::sweep_csv(&points);
    print!("{csv}");
    run.write("sweep.csv", &csv)
}

fn selftest(run: &mut Run) -> Result<()> {
    let checks = selftest_checks(run.cfg.seed);
    let mut failed = 0;
    let mut lines = Vec::new();
    for (name, outcome) in &checks {
        let line = match outcome {
            Ok(()) => format!("ok    {name}"),
            Err(e) => {
                failed += 1;
                format!("FAIL  {name}: {e}")
            }
        };
        println!("{line}");
        lines.push(line);
    }
    run.write("selftest.txt", &(lines.join("\n") + "\n"))?;
    if failed > 0 {
        return Err(Error::SearchFailed(format!("{failed} self-test checks failed")));
    }
    Ok(())
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::SearchFailed(msg()))
    }
}

fn selftest_checks(seed: u64) -> Vec<(&'static str, Result<()>)> {
    let mut out: Vec<(&'static str, Result<()>)> = Vec::new();
    out.push(("cell counts", (|| {
        for name in ["pillow_lattes", "barycentric", "flap"] {
            let rule = subdivision::load_builtin(name)?;
            for n in 1..=2 {
                let d = subdivision::refine(&rule, n)?;
                check(
                    d.tiles.len() as u128 == rule.tile_count(n as u32) && d.edges.len() as u128 == rule.edge_count(n as u32),
                    || format!("{name} level {n}"),
                )?;
            }
        }
        Ok(())
    })()));
    out.push(("words match tiles", (|| {
        for name in ["pillow_lattes", "barycentric", "flap"] {
            let rule = subdivision::load_builtin(name)?;
            let a = symbolic::build_transition(&rule)?;
            for n in 1..=3 {
                let words = symbolic::enumerate_words(&a, n)?.len() as u128;
                check(words == rule.tile_count(n as u32), || format!("{name} level {n}"))?;
            }
        }
        Ok(())
    })()));
    out.push(("mean cycle methods agree", (|| {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..30 {
            let n = rng.gen_range(1..=8);
            let mut arcs = Vec::new();
            for v in 0..n {
                arcs.push((v, (v + 1) % n, rng.gen_range(-1.0..1.0)));
                for w in 0..n {
                    if w != (v + 1) % n && rng.gen_bool(0.3) {
                        arcs.push((v, w, rng.gen_range(-1.0..1.0)));
                    }
                }
            }
            let g = ergopt::ArcGraph::new(n, &arcs);
            let k = ergopt::max_mean_cycle(&g, Method::Karp)?.q;
            let h = ergopt::max_mean_cycle(&g, Method::Howard)?.q;
            let b = ergopt::max_mean_cycle(&g, Method::Brute)?.q;
            check((k - h).abs() <= 1e-12 && (k - b).abs() <= 1e-12, || format!("{k} {h} {b}"))?;
        }
        Ok(())
    })()));
    out.push(("sub-action fixed point", (|| {
        let rule = subdivision::load_builtin("pillow_lattes")?;
        let cyl = Cylinders::new(&rule, 3)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = ClosedForm::random_smooth(&rule, 6, &mut rng);
        let t = potential::discretize(&rule, &cyl, &Potential::Closed(p))?;
        let r = ergopt::q_value(&cyl.graph, &t, Method::Howard)?;
        let u = ergopt::calibrated_subaction(&cyl.graph, &t, r.q, 1_000_000, 1e-10)?;
        let phi = ergopt::mane_normalize(&cyl.graph, &t, &u, r.q, 1e-10)?;
        let q2 = ergopt::q_value(&cyl.graph, &phi.nodes, Method::Howard)?.q;
        check(q2.abs() <= 1e-10, || format!("Q of the normalized potential is {q2:e}"))
    })()));
    out.push(("coboundaries vanish on cycles", (|| {
        use rand::Rng;
        let rule = subdivision::load_builtin("pillow_lattes")?;
        let a = symbolic::build_transition(&rule)?;
        let g2 = symbolic::CylinderGraph::new(&a, 2)?;
        let g3 = symbolic::CylinderGraph::new(&a, 3)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = PotentialTable::new(2, 1.0, (0..g2.node_count()).map(|_| rng.gen_range(-1.0..1.0)).collect())?;
        let psi = ergopt::livsic::coboundary(&g2, &v, &g3)?;
        let verdict = ergopt::livsic_test(&a, &g3, &psi, 5, 1e-9)?;
        check(verdict.coboundary_like && verdict.max_cycle_sum <= 1e-9, || format!("{verdict:?}"))
    })()));
    out.push(("gibbs weights normalized", (|| {
        let rule = subdivision::load_builtin("pillow_lattes")?;
        let cyl = Cylinders::new(&rule, 2)?;
        let t = potential::discretize(&rule, &cyl, &Potential::Closed(ClosedForm::x_coordinate()))?;
        let mu = tpo::equilibrium_state(&cyl.graph, &t, 3.0)?;
        let total: f64 = mu.weights.iter().sum();
        check((total - 1.0).abs() <= 1e-12 && mu.weights.iter().all(|&w| w > 0.0), || format!("total {total}"))
    })()));
    out
}
