use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use stefan_core::forward::SchedulePreset;
use stefan_core::io::{run, Mode, RunConfig};

/// Forward simulation and melting-temperature reconstruction for the
/// one-phase Stefan problem on star-shaped domains.
#[derive(Debug, Parser)]
#[command(name = "stefan", version)]
struct Cli {
    /// Overrides `mode` from the config file.
    #[arg(value_enum)]
    mode: Option<Mode>,

    /// TOML run configuration; built-in defaults are used without one.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long)]
    dt: Option<f64>,

    /// Final time.
    #[arg(long = "T")]
    final_time: Option<f64>,

    /// Fourier order of the forward boundary.
    #[arg(long = "M")]
    order: Option<usize>,

    /// Relative noise level.
    #[arg(long)]
    delta: Option<f64>,

    #[arg(long)]
    seed: Option<u64>,

    #[arg(long)]
    preset: Option<SchedulePreset>,

    /// Initial melting temperature for the inverse problem.
    #[arg(long)]
    um0: Option<f64>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Input tube for `invert` and `perturb`.
    #[arg(long)]
    input: Option<PathBuf>,

    /// Print the effective configuration as TOML and exit.
    #[arg(long)]
    print_config: bool,
}

impl Cli {
    fn config(&self) -> stefan_core::Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(m) = self.mode {
            c.mode = m;
        }
        if let Some(dt) = self.dt {
            c.time.dt = dt;
        }
        if let Some(t) = self.final_time {
            c.time.final_time = t;
        }
        if let Some(m) = self.order {
            c.geometry.order = m;
        }
        if let Some(d) = self.delta {
            c.noise.delta = d;
        }
        if let Some(s) = self.seed {
            c.noise.seed = s;
        }
        if let Some(p) = self.preset {
            c.schedule.preset = Some(p);
            c.schedule.samples = None;
        }
        if let Some(u) = self.um0 {
            c.schedule.um0 = Some(u);
        }
        if let Some(out) = &self.out {
            c.paths.out = out.clone();
        }
        if let Some(input) = &self.input {
            c.paths.input_tube = Some(input.clone());
        }
        Ok(c)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = cli.config().and_then(|config| {
        if cli.print_config {
            print!("{}", config.to_toml());
            return Ok(());
        }
        let summary = run(&config)?;
        for path in &summary.artifacts {
            println!("wrote {}", path.display());
        }
        for r in &summary.reports {
            println!(
                "delta={} seed={}: rel. L2 error u_m {:.3e}, du_m {:.3e}",
                r.delta, r.seed, r.errors.relative_l2_value, r.errors.relative_l2_rate
            );
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
