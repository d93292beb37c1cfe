use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rgf_core::bassserre::{build_ball, free_product_check, phi, qi_scan, IdentityMode, QiPair, WordBudget};
use rgf_core::constructions::{check_displacing, check_misaligned, check_separated, prop91_generate, FamilySpec};
use rgf_core::experiments::{
    run_example92, run_prop91, run_theorem_b, Example92Config, Prop91Config, Sink, TheoremBConfig,
};
use rgf_core::farey::oracle::stabilized_distance;
use rgf_core::farey::{farey_distance, farey_geodesic, random_slope};
use rgf_core::hypgraph::{estimate_delta, FareyMetric, FiniteGraph};
use rgf_core::projections::{
    estimate_synthetic_constants, estimate_torus_constants, general_persistence_check, persistence_check,
    synthetic_instance, torus_twist_sequence, EstimateConfig, SyntheticSpec, TorusAnnuli,
};
use rgf_core::raag::{components, normal_form};
use rgf_core::report::{write_json_lines, write_qi_csv_row, QI_CSV_HEADER};
use rgf_core::{rng, Error, HalfInt, RaagGraph, Slope, Word};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "rgf", version, about = "Free products of reducible torus mapping classes, checked by computation")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "RGF_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// JSON file with the command's configuration (a family for `tree` and `cert`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write records here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Distances and geodesics in the Farey graph.
    Farey {
        #[command(subcommand)]
        op: FareyOp,
    },
    /// Four-point hyperbolicity constant of a sample.
    DeltaEstimate(DeltaArgs),
    /// Projection constants M, B and c.
    Constants {
        #[command(subcommand)]
        op: ConstantsOp,
    },
    /// Behrstock-style persistence along a sequence of sites.
    Persistence {
        #[command(subcommand)]
        op: PersistenceOp,
    },
    /// Right-angled Artin group words.
    Raag {
        #[command(subcommand)]
        op: RaagOp,
    },
    /// Bass-Serre tree balls, orbit maps and relation searches.
    Tree {
        #[command(subcommand)]
        op: TreeOp,
    },
    /// Separation, misalignment and displacement certificates.
    Cert {
        #[command(subcommand)]
        op: CertOp,
    },
    /// End-to-end experiments.
    Experiment {
        #[command(subcommand)]
        op: ExperimentOp,
    },
}

#[derive(Subcommand)]
enum FareyOp {
    /// Distance, cross-checked by search in bounded Farey graphs.
    Dist {
        a: Slope,
        b: Slope,
        /// Largest denominator bound for the search cross-check.
        #[arg(long, default_value_t = 256)]
        oracle_bound: i64,
    },
    Geodesic {
        a: Slope,
        b: Slope,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Space {
    Farey,
    Tree,
    Cycle,
}

#[derive(Args)]
struct DeltaArgs {
    #[arg(long, value_enum, default_value_t = Space::Farey)]
    space: Space,
    /// Sample size (random slopes, or vertices of the tree or cycle).
    #[arg(long, default_value_t = 40)]
    points: usize,
    #[arg(long, default_value_t = 1000)]
    max_height: i64,
    /// Quadruples to draw when the exhaustive scan would be larger.
    #[arg(long, default_value_t = 5_000_000)]
    cap: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum System {
    Torus,
    Synthetic,
}

#[derive(Subcommand)]
enum ConstantsOp {
    Estimate {
        #[arg(long, value_enum, default_value_t = System::Torus)]
        system: System,
        #[arg(long, default_value_t = 20_000)]
        triples: usize,
        #[arg(long, default_value_t = 60)]
        geodesic_pairs: usize,
        #[arg(long, default_value_t = 2_000)]
        twist_samples: usize,
    },
}

#[derive(Subcommand)]
enum PersistenceOp {
    /// Torus twist sequences by default; `--synthetic` draws a random synthetic system.
    Check {
        #[arg(long, default_value = "1/0")]
        alpha0: Slope,
        #[arg(long, default_value = "2/7")]
        alpha1: Slope,
        /// Twist power between consecutive terms.
        #[arg(long, default_value_t = 11)]
        twist: i64,
        #[arg(long, default_value_t = 6)]
        len: usize,
        /// Comma-separated slopes, instead of a twist sequence.
        #[arg(long, value_delimiter = ',', conflicts_with = "synthetic")]
        sequence: Option<Vec<Slope>>,
        #[arg(long)]
        synthetic: bool,
    },
}

#[derive(Args)]
struct GraphArgs {
    /// Number of generators; defaults to one more than the largest index used.
    #[arg(long)]
    vertices: Option<usize>,
    /// Commuting pairs, as `a-b` separated by commas.
    #[arg(long, value_delimiter = ',')]
    edges: Vec<String>,
}

#[derive(Subcommand)]
enum RaagOp {
    /// Normal form of a word such as `x1^2 x2 x1^-1`.
    Nf {
        word: Word,
        #[command(flatten)]
        graph: GraphArgs,
    },
    Components {
        #[command(flatten)]
        graph: GraphArgs,
    },
}

#[derive(Args)]
struct FamilyArgs {
    /// Without `--config`, use the generated family with this D'.
    #[arg(long, default_value_t = 20)]
    dprime: u64,
    /// Without `--config`, factors k ∈ −window..=window.
    #[arg(long, default_value_t = 1)]
    window: i64,
    #[arg(long, default_value_t = 2)]
    max_power: usize,
}

#[derive(Subcommand)]
enum TreeOp {
    /// Vertices of a ball with their curve labels.
    Build {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 4)]
        radius: u64,
        #[arg(long, default_value = "1/0")]
        base: Slope,
    },
    /// Tree distance against curve distance on every pair of coset vertices.
    Qi {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 4)]
        radius: u64,
        #[arg(long, default_value = "1/0")]
        base: Slope,
        /// Fail when the largest ratio witness exceeds this.
        #[arg(long)]
        kappa: Option<f64>,
    },
    /// Search alternating words for a relation.
    FreeProduct {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 6)]
        syllables: usize,
        #[arg(long, default_value_t = 1)]
        syllable_letters: usize,
        /// Count only the identity matrix as trivial, not its negative.
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Subcommand)]
enum CertOp {
    Separated {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        d: u64,
    },
    Misaligned {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        a: HalfInt,
    },
    Displacing {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        l: u64,
        /// Farey neighbours of each displacing curve to try as sites.
        #[arg(long, default_value_t = 8)]
        shell: i64,
    },
}

#[derive(Subcommand)]
enum ExperimentOp {
    /// Generated family: certificates, relation search, tree scan and traces.
    Prop91(Prop91Flags),
    /// Empirical constants turned into (A, D), then a family tested against them.
    TheoremB(TheoremBFlags),
    /// Separated but not misaligned triple with a short relation.
    Example92(Example92Flags),
}

/// Flags override the matching fields of `--config`.
#[derive(Args)]
struct Prop91Flags {
    #[arg(long)]
    dprime: Option<u64>,
    /// Certified factors k ∈ −window..=window.
    #[arg(long)]
    window: Option<i64>,
    /// Factors used for the tree, relation and trace checks.
    #[arg(long)]
    tree_window: Option<i64>,
    #[arg(long)]
    radius: Option<u64>,
    #[arg(long)]
    max_power: Option<usize>,
    #[arg(long)]
    syllables: Option<usize>,
    #[arg(long)]
    words: Option<usize>,
    /// Bounded geodesic image constant.
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    delta: Option<HalfInt>,
    /// Also emit every ball vertex with its label.
    #[arg(long)]
    emit_ball: bool,
}

impl Prop91Flags {
    fn apply(&self, c: &mut Prop91Config) {
        c.dprime = self.dprime.unwrap_or(c.dprime);
        c.window = self.window.unwrap_or(c.window);
        c.tree_window = self.tree_window.unwrap_or(c.tree_window);
        c.radius = self.radius.unwrap_or(c.radius);
        c.max_power = self.max_power.unwrap_or(c.max_power);
        c.syllables = self.syllables.unwrap_or(c.syllables);
        c.words = self.words.unwrap_or(c.words);
        c.constants.m = self.m.unwrap_or(c.constants.m);
        c.delta = self.delta.unwrap_or(c.delta);
        c.emit_ball |= self.emit_ball;
    }
}

#[derive(Args)]
struct TheoremBFlags {
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    max_height: Option<i64>,
    #[arg(long)]
    radius: Option<u64>,
}

impl TheoremBFlags {
    fn apply(&self, c: &mut TheoremBConfig) {
        c.samples = self.samples.unwrap_or(c.samples);
        c.max_height = self.max_height.unwrap_or(c.max_height);
        c.radius = self.radius.unwrap_or(c.radius);
    }
}

#[derive(Args)]
struct Example92Flags {
    #[arg(long)]
    d: Option<u64>,
    #[arg(long)]
    alpha: Option<Slope>,
    #[arg(long)]
    beta: Option<Slope>,
    #[arg(long)]
    syllables: Option<usize>,
    #[arg(long)]
    m: Option<u64>,
}

impl Example92Flags {
    fn apply(&self, c: &mut Example92Config) {
        c.d = self.d.unwrap_or(c.d);
        c.alpha = self.alpha.clone().unwrap_or_else(|| c.alpha.clone());
        c.beta = self.beta.clone().or_else(|| c.beta.clone());
        c.syllables = self.syllables.unwrap_or(c.syllables);
        c.constants.m = self.m.unwrap_or(c.constants.m);
    }
}

/// Streams records to the chosen output. The first write error is kept and
/// reported once the command finishes.
struct Output {
    w: Box<dyn Write>,
    format: Format,
    csv_header: bool,
    err: Option<io::Error>,
}

impl Output {
    fn open(g: &Global) -> anyhow::Result<Self> {
        let w: Box<dyn Write> = match &g.output {
            Some(p) => {
                Box::new(io::BufWriter::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?))
            }
            None => Box::new(io::BufWriter::new(io::stdout())),
        };
        Ok(Output { w, format: g.format, csv_header: false, err: None })
    }

    fn keep(&mut self, r: io::Result<()>) {
        if let (Err(e), None) = (r, &self.err) {
            self.err = Some(e);
        }
    }

    /// A record written as-is. Ignored in CSV mode, which carries only pairs.
    fn plain(&mut self, v: Value) {
        if self.format == Format::Json {
            let r = write_json_lines(&mut self.w, [v]);
            self.keep(r);
        }
    }

    fn emit(&mut self, v: Value, pass: Option<bool>) -> Option<bool> {
        self.plain(v);
        pass
    }

    fn emit_all(&mut self, vs: Vec<Value>, pass: Option<bool>) -> Option<bool> {
        vs.into_iter().for_each(|v| self.plain(v));
        pass
    }

    fn finish(mut self) -> io::Result<()> {
        if self.format == Format::Csv && !self.csv_header {
            writeln!(self.w, "{QI_CSV_HEADER}")?;
        }
        self.w.flush()?;
        self.err.map_or(Ok(()), Err)
    }
}

impl Sink for Output {
    fn record(&mut self, kind: &str, data: Value) {
        self.plain(json!({ "record": kind, "data": data }));
    }

    fn pair(&mut self, p: &QiPair) {
        match self.format {
            Format::Json => self.record("pair", to_value(p)),
            Format::Csv => {
                let mut r = Ok(());
                if !self.csv_header {
                    self.csv_header = true;
                    r = writeln!(self.w, "{QI_CSV_HEADER}");
                }
                let r = r.and_then(|()| write_qi_csv_row(&mut self.w, p));
                self.keep(r);
            }
        }
    }
}

fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("records serialize")
}

fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn config_or_default<T: DeserializeOwned + Default>(g: &Global) -> anyhow::Result<T> {
    g.config.as_deref().map_or_else(|| Ok(T::default()), read_json)
}

fn family(g: &Global, a: &FamilyArgs) -> anyhow::Result<FamilySpec> {
    match &g.config {
        Some(p) => read_json(p),
        None => Ok(prop91_generate(a.dprime, &Slope::infinity(), -a.window..=a.window, 4, a.max_power)?.family),
    }
}

fn graph(words: &[&Word], a: &GraphArgs) -> anyhow::Result<RaagGraph> {
    let mut edges = Vec::new();
    for e in &a.edges {
        let (x, y) = e.split_once('-').with_context(|| format!("edge {e:?} is not of the form a-b"))?;
        edges.push((x.trim().parse::<usize>()?, y.trim().parse::<usize>()?));
    }
    let used = words
        .iter()
        .flat_map(|w| w.syllables().iter().map(|s| s.gen))
        .chain(edges.iter().flat_map(|&(x, y)| [x, y]))
        .max()
        .map_or(0, |m| m + 1);
    Ok(RaagGraph::new(a.vertices.unwrap_or(used), &edges)?)
}

fn run(cmd: &Command, g: &Global, out: &mut Output) -> anyhow::Result<Option<bool>> {
    Ok(match cmd {
        Command::Farey { op: FareyOp::Dist { a, b, oracle_bound } } => {
            let d = farey_distance(a, b);
            let oracle = stabilized_distance(a, b, *oracle_bound);
            let agrees = oracle.map(|(o, _)| o == d);
            let record = json!({
                "a": a,
                "b": b,
                "distance": d,
                "oracle": oracle.map(|(o, bound)| json!({ "distance": o, "bound": bound })),
                "agrees": agrees,
            });
            out.emit(record, agrees)
        }
        Command::Farey { op: FareyOp::Geodesic { a, b } } => {
            out.emit(json!({ "a": a, "b": b, "geodesic": farey_geodesic(a, b) }), Some(true))
        }
        Command::DeltaEstimate(args) => {
            let record = match args.space {
                Space::Farey => {
                    let mut r = rng::derived(g.seed, "delta-points");
                    let pts: Vec<Slope> = (0..args.points).map(|_| random_slope(&mut r, args.max_height)).collect();
                    to_value(estimate_delta(&FareyMetric, &pts, args.cap, g.seed)?)
                }
                Space::Tree | Space::Cycle => {
                    let gr = if args.space == Space::Tree {
                        FiniteGraph::random_tree(args.points, g.seed)?
                    } else {
                        FiniteGraph::cycle(args.points)?
                    };
                    to_value(estimate_delta(&gr, &gr.vertices(), args.cap, g.seed)?)
                }
            };
            out.emit(record, Some(true))
        }
        Command::Constants { op: ConstantsOp::Estimate { system, triples, geodesic_pairs, twist_samples } } => {
            let est = match system {
                System::Torus => estimate_torus_constants(EstimateConfig {
                    triples: *triples,
                    geodesic_pairs: *geodesic_pairs,
                    twist_samples: *twist_samples,
                    seed: g.seed,
                }),
                System::Synthetic => {
                    let spec = SyntheticSpec { spine: 10, extra: 8, threshold: 13, min_step: 2, max_step: 3 };
                    estimate_synthetic_constants(&synthetic_instance(spec, g.seed)?.system)
                }
            };
            let pass = est.revalidated;
            out.emit(to_value(&est), Some(pass))
        }
        Command::Persistence { op: PersistenceOp::Check { alpha0, alpha1, twist, len, sequence, synthetic } } => {
            if *synthetic {
                let spec = SyntheticSpec { spine: 14, extra: 10, threshold: 13, min_step: 2, max_step: 3 };
                let inst = synthetic_instance(spec, g.seed)?;
                let c = inst.system.constants;
                let rep = general_persistence_check(&inst.system, &inst.sequence, c.m, c.b);
                let pass = !rep.hypothesis_ok || rep.conclusions_ok;
                out.emit(to_value(&rep), Some(pass))
            } else {
                let sys = TorusAnnuli::default();
                let seq = sequence.clone().unwrap_or_else(|| torus_twist_sequence(alpha0, alpha1, *twist, *len));
                let c = sys.constants;
                let rep = persistence_check(&sys, &seq, c.m, c.b);
                let pass = !rep.hypothesis_ok || rep.conclusions_ok;
                out.emit(to_value(&rep), Some(pass))
            }
        }
        Command::Raag { op: RaagOp::Nf { word, graph: ga } } => {
            let gr = graph(&[word], ga)?;
            let nf = normal_form(&gr, word)?;
            out.emit(json!({ "word": word.to_string(), "normal_form": nf.to_string() }), Some(true))
        }
        Command::Raag { op: RaagOp::Components { graph: ga } } => {
            let gr = graph(&[], ga)?;
            out.emit(json!({ "components": components(&gr) }), Some(true))
        }
        Command::Tree { op: TreeOp::Build { family: fa, radius, base } } => {
            let f = family(g, fa)?;
            let ball = build_ball(&f.factors, *radius)?;
            let labeled = phi(&ball, &f.factors, base)?;
            rgf_core::report::vertex_records(&labeled).for_each(|v| out.plain(to_value(v)));
            Some(true)
        }
        Command::Tree { op: TreeOp::Qi { family: fa, radius, base, kappa } } => {
            let f = family(g, fa)?;
            let ball = build_ball(&f.factors, *radius)?;
            let qi = qi_scan(&phi(&ball, &f.factors, base)?, &FareyMetric, *kappa, |p| out.pair(p))?;
            let pass = qi.half_minus_four && qi.kappa_pass.unwrap_or(true);
            out.record("qi_summary", to_value(&qi));
            Some(pass)
        }
        Command::Tree { op: TreeOp::FreeProduct { family: fa, syllables, syllable_letters, strict } } => {
            let f = family(g, fa)?;
            let mode = if *strict { IdentityMode::Strict } else { IdentityMode::Projective };
            let budget = WordBudget { syllables: *syllables, syllable_letters: *syllable_letters };
            let rep = free_product_check(&f.factors, budget, mode);
            let pass = rep.no_relation;
            out.emit(to_value(&rep), Some(pass))
        }
        Command::Cert { op: CertOp::Separated { family: fa, d } } => {
            let rep = check_separated(&family(g, fa)?, *d);
            let mut records = vec![to_value(&rep)];
            if let Some((i, j)) = (0..rep.matrix.len())
                .flat_map(|i| (i + 1..rep.matrix.len()).map(move |j| (i, j)))
                .find(|&(i, j)| rep.matrix[i][j] < *d)
            {
                records.push(json!({ "witness": { "i": i, "j": j, "distance": rep.matrix[i][j] } }));
            }
            out.emit_all(records, Some(rep.pass))
        }
        Command::Cert { op: CertOp::Misaligned { family: fa, a } } => {
            let rep = check_misaligned(&family(g, fa)?, *a);
            let mut records = vec![to_value(&rep)];
            if let Some(t) = rep.triples.iter().find(|t| t.product < *a) {
                records.push(json!({ "witness": t }));
            }
            out.emit_all(records, Some(rep.pass))
        }
        Command::Cert { op: CertOp::Displacing { family: fa, l, shell } } => {
            let rep = check_displacing(&family(g, fa)?, *l, *shell)?;
            let mut records = vec![to_value(&rep)];
            if let Some(e) = rep.entries.iter().find(|e| e.margin.is_none_or(|m| m < *l)) {
                records.push(json!({ "witness": e }));
            }
            out.emit_all(records, Some(rep.pass))
        }
        Command::Experiment { op: ExperimentOp::Prop91(o) } => {
            let mut cfg: Prop91Config = config_or_default(g)?;
            cfg.seed = g.seed;
            o.apply(&mut cfg);
            Some(run_prop91(&cfg, out)?)
        }
        Command::Experiment { op: ExperimentOp::TheoremB(o) } => {
            let mut cfg: TheoremBConfig = config_or_default(g)?;
            cfg.seed = g.seed;
            o.apply(&mut cfg);
            Some(run_theorem_b(&cfg, out)?)
        }
        Command::Experiment { op: ExperimentOp::Example92(o) } => {
            let mut cfg: Example92Config = config_or_default(g)?;
            o.apply(&mut cfg);
            Some(run_example92(&cfg, out)?)
        }
    })
}

/// Commands whose output includes `(d_T, d_S)` pairs, the only CSV table.
fn has_pairs(cmd: &Command) -> bool {
    matches!(
        cmd,
        Command::Tree { op: TreeOp::Qi { .. } }
            | Command::Experiment { op: ExperimentOp::Prop91(_) | ExperimentOp::TheoremB(_) }
    )
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::BudgetExhausted(_)) => 3,
        Some(Error::ActionFailure(_) | Error::EmptyProjection(_)) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| {
        if cli.global.format == Format::Csv && !has_pairs(&cli.command) {
            bail!("--format csv is only available for `tree qi`, `experiment prop91` and `experiment theorem-b`");
        }
        let mut out = Output::open(&cli.global)?;
        let verdict = run(&cli.command, &cli.global, &mut out)?;
        match out.finish() {
            // The reader went away early (`| head`); the verdict still stands.
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(verdict),
            r => r.map(|()| verdict).map_err(Into::into),
        }
    })();
    match result {
        Ok(Some(true)) => ExitCode::SUCCESS,
        Ok(Some(false)) => ExitCode::from(1),
        Ok(None) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
