use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use amrmg::spectral::{mehrstellen, LgfSource};
use amrmg_harness::cases::CaseRegistry;
use amrmg_harness::compat::{run_compat, spectrum_csv, to_csv};
use amrmg_harness::config::{Config, EpsList};
use amrmg_harness::run::{run, RunSettings};
use amrmg_harness::study::run_study;
use amrmg_harness::vortex::run_vortex;

#[derive(Parser)]
#[command(name = "amrmg", version, about = "Adaptive multigrid Poisson solver")]
struct Cli {
    /// JSON configuration; command-line options override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for cached lattice Green's function tables.
    #[arg(long, global = true)]
    lgf_cache: Option<PathBuf>,
    #[arg(long, global = true)]
    case: Option<String>,
    #[arg(long, global = true)]
    bc: Option<String>,
    #[arg(short = 'M', long = "order", global = true)]
    m: Option<usize>,
    /// Comma-separated refinement tolerances.
    #[arg(long, global = true, value_delimiter = ',')]
    eps_r: Option<Vec<f64>>,
    #[arg(long, global = true)]
    max_level: Option<usize>,
    #[arg(long, global = true)]
    max_blocks: Option<usize>,
    #[arg(long, global = true)]
    base_blocks: Option<usize>,
    #[arg(long, global = true)]
    block_size: Option<usize>,
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One adapted solve; writes the per-cycle history.
    Solve,
    /// Error against refinement tolerance.
    Study,
    /// Runs with base-level kernels of other orders.
    Compat,
    /// Velocity of the compact vortex tube.
    Vortex,
    /// Writes a unit-spacing lattice Green's function table.
    LgfTable {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 16)]
        extent: usize,
    },
}

impl Cli {
    fn config(&self) -> amrmg::Result<Config> {
        let mut c = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        if let Some(v) = &self.case {
            c.case = v.clone();
        }
        if let Some(v) = &self.bc {
            c.bc = v.clone();
        }
        if let Some(v) = self.m {
            c.m = v;
        }
        if let Some(v) = &self.eps_r {
            c.eps_r = if v.len() == 1 { EpsList::One(v[0]) } else { EpsList::Many(v.clone()) };
        }
        if let Some(v) = self.max_level {
            c.max_level = v;
        }
        if let Some(v) = self.max_blocks {
            c.max_blocks = Some(v);
        }
        if let Some(v) = self.base_blocks {
            c.base_blocks = v;
        }
        if let Some(v) = self.block_size {
            c.block_size = v;
        }
        if let Some(v) = &self.output {
            c.output = Some(v.clone());
        }
        if let Some(v) = &self.lgf_cache {
            c.lgf_cache = Some(v.clone());
        }
        c.validate()?;
        Ok(c)
    }
}

fn emit(path: Option<&Path>, text: &str) -> amrmg::Result<()> {
    match path {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: &Cli) -> amrmg::Result<bool> {
    let config = cli.config()?;
    let out = config.output.as_deref();
    let cases = CaseRegistry::default();
    match &cli.command {
        Command::Solve => {
            let case = cases.create(&config.case, &config.case_params()?)?;
            let eps = config.eps_r.values()[0];
            let o = run(&RunSettings::new(&config, eps), case.as_ref())?;
            log::info!("E_inf = {:e}, {} blocks, finest level {}", o.einf, o.blocks, o.finest_level);
            emit(out, &o.report.to_csv())?;
            Ok(o.report.converged)
        }
        Command::Study => {
            let case = cases.create(&config.case, &config.case_params()?)?;
            let s = run_study(&config, case.as_ref())?;
            emit(out, &s.to_csv())?;
            Ok(s.all_converged())
        }
        Command::Compat => {
            let case = cases.create(&config.case, &config.case_params()?)?;
            let runs = run_compat(&config, case.as_ref())?;
            emit(out, &to_csv(&runs))?;
            if let Some(p) = out {
                for r in &runs {
                    let name = format!(
                        "{}.spectrum_M{}.csv",
                        p.file_stem().and_then(|s| s.to_str()).unwrap_or("compat"),
                        r.row.m_kernel
                    );
                    std::fs::write(p.with_file_name(name), spectrum_csv(&r.spectrum))?;
                }
            }
            // the experiment succeeds when it ran; mismatched runs are expected to fail
            Ok(runs.iter().filter(|r| r.row.m_kernel == config.m).all(|r| r.row.converged))
        }
        Command::Vortex => {
            let v = run_vortex(&config)?;
            emit(out, &v.to_csv())?;
            Ok(v.all_converged())
        }
        Command::LgfTable { dim, extent } => {
            let op = mehrstellen(config.m)?;
            let src = LgfSource { cache_dir: config.lgf_cache.clone(), ..Default::default() };
            let t = src.table(op.as_ref(), *dim, *extent)?;
            let path = out.map(Path::to_path_buf).unwrap_or_else(|| {
                PathBuf::from(format!("lgf_{dim}d_{}_{extent}.bin", op.name()))
            });
            t.write_to(&path)?;
            log::info!("wrote {}", path.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            log::error!("not all solves converged");
            ExitCode::from(1)
        }
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(2)
        }
    }
}
