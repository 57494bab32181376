mod commands;
mod config;
mod error;
mod formats;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{cmd_addr, cmd_check, cmd_ray, cmd_solve, cmd_trace, load_map, AddrQuery, Sink};
use config::{RunConfig, CONFIG_ENV};
use error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "rayforge", version, about = "Dynamic rays and singular-value realization for p(exp(z))")]
struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Print the effective config as JSON and exit.
    #[arg(long, global = true)]
    show_config: bool,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    cmd: Option<Cmd>,
}

#[derive(Args, Debug, Default)]
struct Overrides {
    /// Solver tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Ray seed tolerance.
    #[arg(long, global = true)]
    ray_tol: Option<f64>,
    #[arg(long, global = true)]
    eps_pot: Option<f64>,
    #[arg(long, global = true)]
    eps_sv: Option<f64>,
    #[arg(long, global = true)]
    r_big: Option<f64>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    #[arg(long, global = true)]
    cert_depth: Option<usize>,
    #[arg(long, global = true)]
    resolution: Option<usize>,
    /// Test every same-cluster pair for rigidity.
    #[arg(long, global = true)]
    all_pairs: bool,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) {
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut cfg.tol, self.tol);
        set(&mut cfg.ray_tol, self.ray_tol);
        set(&mut cfg.eps_pot, self.eps_pot);
        set(&mut cfg.eps_sv, self.eps_sv);
        set(&mut cfg.r_big, self.r_big);
        if let Some(v) = self.max_iter {
            cfg.max_iter = v;
        }
        if let Some(v) = self.cert_depth {
            cfg.cert_depth = v;
        }
        if let Some(v) = self.resolution {
            cfg.rigidity_resolution = v;
        }
        if self.all_pairs {
            cfg.all_pairs = true;
        }
        if let Some(d) = &self.out_dir {
            cfg.out_dir = Some(d.clone());
        }
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Sample a ray over a potential range and write CSV.
    Ray {
        /// Inline map such as `d=1,k=0+0i` or `d=2,c0=1,c1=0.5i`.
        #[arg(long)]
        map: Option<String>,
        #[arg(long)]
        map_file: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        addr: String,
        /// `lo:hi:n`, geometric spacing.
        #[arg(long)]
        t: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find the map realizing an escape spec; writes JSON.
    Solve {
        #[arg(long)]
        spec: PathBuf,
        /// Starting map (JSON); defaults to a leading-order guess.
        #[arg(long)]
        init: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Continue the solution along a path of potentials; writes CSV.
    Trace {
        #[arg(long)]
        spec: PathBuf,
        /// JSON array of potential tuples.
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        init: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the certificates on a marked grid; writes JSON, exit 1 on failure.
    Check {
        #[arg(long)]
        grid: PathBuf,
        /// `identity` or a JSON file of {i, j, re, im} entries.
        #[arg(long, default_value = "identity")]
        positions: String,
        /// JSON file of {i, j, length} homotopy word lengths.
        #[arg(long)]
        words: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Address queries.
    Addr {
        #[command(subcommand)]
        query: AddrCmd,
    },
}

#[derive(Subcommand, Debug)]
enum AddrCmd {
    /// Print the shifted address.
    Shift {
        #[arg(allow_hyphen_values = true)]
        addr: String,
        #[arg(long, default_value_t = 1)]
        by: usize,
    },
    /// Print whether two addresses overlap.
    Overlap {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Print whether an address lies in the wedge around a center.
    Wedge {
        #[arg(long, allow_hyphen_values = true)]
        center: String,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        k: f64,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(allow_hyphen_values = true)]
        addr: String,
    },
}

fn effective_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cli.overrides.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = effective_config(&cli)?;
    if cli.show_config {
        println!("{}", cfg.to_json());
        return Ok(());
    }
    let Some(cmd) = cli.cmd else {
        return Err(CliError::Usage("a subcommand is required (ray, solve, trace, check, addr)".into()));
    };
    match cmd {
        Cmd::Ray { map, map_file, addr, t, out } => {
            let g = load_map(map.as_deref(), map_file.as_deref())?;
            cmd_ray(&cfg, &g, &addr, &t, &Sink::new(out, &cfg, "ray.csv"))
        }
        Cmd::Solve { spec, init, out } => cmd_solve(&cfg, &spec, init.as_deref(), &Sink::new(out, &cfg, "solve.json")),
        Cmd::Trace { spec, path, init, out } => {
            cmd_trace(&cfg, &spec, &path, init.as_deref(), &Sink::new(out, &cfg, "trace.csv"))
        }
        Cmd::Check { grid, positions, words, out } => {
            cmd_check(&cfg, &grid, &positions, words.as_deref(), &Sink::new(out, &cfg, "check.json"))
        }
        Cmd::Addr { query } => {
            let q = match query {
                AddrCmd::Shift { addr, by } => AddrQuery::Shift { addr, by },
                AddrCmd::Overlap { a, b } => AddrQuery::Overlap { a, b },
                AddrCmd::Wedge { center, t, k, d, addr } => AddrQuery::Wedge { center, t, k, d, addr },
            };
            println!("{}", cmd_addr(&q)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rayforge: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
