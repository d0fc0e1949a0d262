use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use growthlab::asymptotics::{anosov_gap, growth_report, zariski_span_rank, GrowthOptions, GrowthReport};
use growthlab::bending::{bend_sweep, parse_q, write_sweep};
use growthlab::config::ExperimentConfig;
use growthlab::enumerate::{
    cartan_cloud, read_ball, write_ball, write_layer_counts, BallOptions, CartanCloud, GeneratorSystem, WordBall,
    DEFAULT_MEMORY_BUDGET,
};
use growthlab::liegroup::DEFAULT_TOL;
use growthlab::pipeline::{report_summary, run, AtStage, Stage, StageResult};

#[derive(Parser)]
#[command(name = "growthlab", version, about = "Word balls, Cartan projections and growth indicators in SO(n,2)")]
struct Cli {
    /// Experiment configuration (TOML); supplies tolerances to every subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for the Zariski sampling; overrides the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline described by --config.
    Run,
    /// Enumerate a word ball; writes ball.json and layers.csv.
    Enumerate {
        generators: PathBuf,
        #[arg(long)]
        radius: Option<usize>,
    },
    /// Cartan projections of a ball; writes cloud.csv.
    Project { ball: PathBuf },
    /// Growth report of a cloud; the Zariski rank is included when --ball is given.
    Growth {
        cloud: PathBuf,
        #[arg(long)]
        ball: Option<PathBuf>,
    },
    /// Bent generator systems, one per --q, with a manifest.
    Bend {
        generators: PathBuf,
        #[arg(long = "q", required = true)]
        q: Vec<String>,
    },
    /// Anosov gap fit of a cloud; writes anosov.json and anosov.csv.
    Anosov { cloud: PathBuf },
    /// Adjoint span rank of a ball; writes zariski.json.
    Zariski { ball: PathBuf },
    /// Summary of one or more report.json files; writes summary.txt.
    Report { reports: Vec<PathBuf> },
}

struct Settings {
    config: Option<ExperimentConfig>,
    out: PathBuf,
    seed: u64,
}

impl Settings {
    fn growth(&self) -> GrowthOptions {
        self.config.as_ref().map(|c| c.growth.clone()).unwrap_or_default()
    }

    fn projection_tol(&self) -> f64 {
        self.config.as_ref().map_or(DEFAULT_TOL, |c| c.projection_tol)
    }

    fn out_file(&self, name: &str) -> StageResult<PathBuf> {
        std::fs::create_dir_all(&self.out).at(Stage::Write)?;
        Ok(self.out.join(name))
    }
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> StageResult<()> {
    let text = serde_json::to_string_pretty(value).at(Stage::Write)? + "\n";
    std::fs::write(path, text).at(Stage::Write)
}

fn execute(cli: Cli) -> StageResult<()> {
    let config = cli.config.as_deref().map(ExperimentConfig::load).transpose().at(Stage::Config)?;
    let out = cli
        .out
        .clone()
        .or_else(|| config.as_ref().and_then(ExperimentConfig::output_path))
        .unwrap_or_else(|| PathBuf::from("out"));
    let seed = cli.seed.or(config.as_ref().map(|c| c.seed)).unwrap_or(0);
    let s = Settings { config, out, seed };
    match cli.command {
        Command::Run => {
            let config = s.config.as_ref().ok_or(growthlab::Error::Invalid("run needs --config".into())).at(Stage::Config)?;
            let outcome = run(config, &s.out, Some(s.seed))?;
            print!("{}", outcome.summary);
            eprintln!("wrote {}", outcome.manifest.display());
        }
        Command::Enumerate { generators, radius } => {
            let system = GeneratorSystem::load(&generators).at(Stage::Load)?;
            let radius = radius
                .or(s.config.as_ref().map(|c| c.radius))
                .ok_or(growthlab::Error::Invalid("enumerate needs --radius or --config".into()))
                .at(Stage::Config)?;
            let budget = s.config.as_ref().map_or(DEFAULT_MEMORY_BUDGET, |c| c.memory_budget);
            let ball = WordBall::build(&system, &BallOptions { radius, memory_budget: budget, threads: None })
                .at(Stage::Enumerate)?;
            write_ball(&ball, &s.out_file("ball.json")?).at(Stage::Write)?;
            write_layer_counts(&ball.layer_counts(), &s.out_file("layers.csv")?).at(Stage::Write)?;
            eprintln!(
                "{} elements up to length {}{}",
                ball.len(),
                ball.reached(),
                if ball.is_complete() { "" } else { " (memory budget reached)" }
            );
        }
        Command::Project { ball } => {
            let ball = read_ball(&ball).at(Stage::Load)?;
            let cloud = cartan_cloud(&ball, s.projection_tol()).at(Stage::Project)?;
            cloud.save(&s.out_file("cloud.csv")?).at(Stage::Write)?;
            eprintln!("{} points", cloud.len());
        }
        Command::Growth { cloud, ball } => {
            let cloud = CartanCloud::load(&cloud).at(Stage::Load)?;
            let ball = ball.as_deref().map(read_ball).transpose().at(Stage::Load)?;
            let report = growth_report(&cloud, ball.as_ref(), &s.growth(), s.seed).at(Stage::Growth)?;
            std::fs::create_dir_all(&s.out).at(Stage::Write)?;
            report.write(&s.out).at(Stage::Write)?;
            print!("{}", report_summary("growth", &report));
        }
        Command::Bend { generators, q } => {
            let system = GeneratorSystem::load(&generators).at(Stage::Load)?;
            let qs = q.iter().map(|q| parse_q(q, system.d())).collect::<growthlab::Result<Vec<_>>>().at(Stage::Config)?;
            let systems = bend_sweep(&system, &qs).at(Stage::Bend)?;
            let manifest = write_sweep(&system, &qs, &systems, &s.out).at(Stage::Write)?;
            eprintln!("wrote {}", manifest.display());
        }
        Command::Anosov { cloud } => {
            let cloud = CartanCloud::load(&cloud).at(Stage::Load)?;
            let fit = anosov_gap(&cloud).at(Stage::Anosov)?;
            write_json(&s.out_file("anosov.json")?, &fit)?;
            let mut w = csv::Writer::from_path(s.out_file("anosov.csv")?).at(Stage::Write)?;
            w.write_record(["layer", "min_alpha1"]).at(Stage::Write)?;
            for (k, m) in &fit.minima {
                w.serialize((k, m)).at(Stage::Write)?;
            }
            w.flush().at(Stage::Write)?;
            println!(
                "slope {:.4}, intercept {:.4}, R^2 {:.4}, gap-degenerate: {}",
                fit.fit.slope,
                fit.fit.intercept,
                fit.fit.r2,
                if fit.degenerate { "yes" } else { "no" }
            );
        }
        Command::Zariski { ball } => {
            let ball = read_ball(&ball).at(Stage::Load)?;
            let rank = zariski_span_rank(&ball, &s.growth().zariski, s.seed);
            write_json(&s.out_file("zariski.json")?, &rank)?;
            println!("zariski span rank: {} / {}", rank.rank, rank.full);
        }
        Command::Report { reports } => {
            let mut text = String::new();
            for path in &reports {
                let r = GrowthReport::load(path).at(Stage::Report)?;
                let label = path.parent().and_then(Path::file_name).map_or("report".into(), |n| n.to_string_lossy().into_owned());
                text.push_str(&report_summary(&label, &r));
                text.push('\n');
            }
            std::fs::write(s.out_file("summary.txt")?, &text).at(Stage::Write)?;
            print!("{text}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.threads {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| execute(cli)),
            Err(e) => {
                eprintln!("error [config]: thread pool: {e}");
                return ExitCode::from(2);
            }
        },
        None => execute(cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error {e}");
            ExitCode::FAILURE
        }
    }
}
