use clap::{Args, Parser, Subcommand};
use cli_reports::commands::{self, CmdError, CmdResult};
use cli_reports::ExperimentConfig;
use eigenfunction_bases::Family;
use serde_json::{json, Map, Value};
use std::path::PathBuf;
use std::process::ExitCode;

/// Numerical experiments on eigenfunction restriction to curves.
///
/// Exit codes: 0 pass, 1 usage or configuration error, 2 pass with
/// warnings, 3 failed check.
#[derive(Parser, Debug)]
#[command(name = "restrictlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify the contact order of a curve against a symbol's bicharacteristics.
    Contact(Common),
    /// Tabulate the predicted exponents for each q and contact order.
    Predict(Common),
    /// Exact polynomial identities behind the leading-coefficient formula.
    Polylab(Common),
    /// Conservation, reversibility and jet checks for the Hamiltonian flow.
    Flowcheck(Common),
    /// Sweep flat-torus clusters along a curve and fit the growth exponent.
    VerifyTorus(Common),
    /// Sweep spherical harmonics along a latitude and fit the growth exponent.
    VerifySphere(Common),
    /// Sweep oscillator clusters along a circle and fit the growth exponent.
    VerifyHermite(Common),
    /// Cap-supported test functions and an ascent lower bound for ‖R_λ‖.
    Extremize(Common),
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, env = "RESTRICTLAB_JOBS")]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    symbol: Option<String>,
    /// Curve in short form, e.g. `poly:t,t^3@-0.5,0.5`, `latitude:1.047`, `circle:0,0,0.5`.
    #[arg(long)]
    curve: Option<String>,
    #[arg(long)]
    lambda_min: Option<f64>,
    #[arg(long)]
    lambda_max: Option<f64>,
    #[arg(long)]
    points_per_decade: Option<f64>,
    #[arg(long)]
    jitter_group: Option<usize>,
    /// Lebesgue exponents, comma separated (`2`, `6`, `9/2`, `inf`).
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<String>>,
    #[arg(long)]
    j_max: Option<usize>,
    #[arg(long)]
    rtol: Option<f64>,
    /// Slope tolerance for the verify commands.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Contact orders for `predict` (comma separated) or the cap order for `extremize`.
    #[arg(long, value_delimiter = ',')]
    sigma: Option<Vec<String>>,
    #[arg(long)]
    sigma_max: Option<u32>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    c_width: Option<f64>,
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    ascent_steps: Option<usize>,
    /// Random starts per symbol for `flowcheck`.
    #[arg(long)]
    starts: Option<usize>,
}

fn put(m: &mut Map<String, Value>, path: &[&str], v: Value) {
    match path {
        [k] => {
            m.insert(k.to_string(), v);
        }
        [k, rest @ ..] => {
            let e = m.entry(k.to_string()).or_insert_with(|| Value::Object(Map::new()));
            if let Value::Object(inner) = e {
                put(inner, rest, v);
            }
        }
        [] => {}
    }
}

impl Common {
    fn overrides(&self, extremize: bool) -> Result<Value, CmdError> {
        let mut m = Map::new();
        let mut set = |path: &[&str], v: Option<Value>| {
            if let Some(v) = v {
                put(&mut m, path, v);
            }
        };
        set(&["seed"], self.seed.map(|v| json!(v)));
        set(&["output"], self.out.as_ref().map(|v| json!(v)));
        set(&["symbol"], self.symbol.as_ref().map(|v| json!(v)));
        let curve_path: &[&str] = if extremize { &["extremize", "curve"] } else { &["curve"] };
        set(curve_path, self.curve.as_ref().map(|v| json!(v)));
        set(&["lambda_grid", "min"], self.lambda_min.map(|v| json!(v)));
        set(&["lambda_grid", "max"], self.lambda_max.map(|v| json!(v)));
        set(&["lambda_grid", "points_per_decade"], self.points_per_decade.map(|v| json!(v)));
        set(&["lambda_grid", "jitter_group"], self.jitter_group.map(|v| json!(v)));
        set(&["q_list"], self.q.as_ref().map(|v| json!(v)));
        set(&["j_max"], self.j_max.map(|v| json!(v)));
        set(&["rtol"], self.rtol.map(|v| json!(v)));
        set(&["tolerance"], self.tolerance.map(|v| json!(v)));
        set(&["polylab", "sigma_max"], self.sigma_max.map(|v| json!(v)));
        set(&["extremize", "lambda"], self.lambda.map(|v| json!(v)));
        set(&["extremize", "c_width"], self.c_width.map(|v| json!(v)));
        set(&["extremize", "t0"], self.t0.map(|v| json!(v)));
        set(&["extremize", "ascent_steps"], self.ascent_steps.map(|v| json!(v)));
        set(&["flowcheck", "starts"], self.starts.map(|v| json!(v)));
        if let Some(s) = &self.sigma {
            if extremize {
                let [one] = s.as_slice() else {
                    return Err(CmdError::Usage(anyhow::anyhow!("extremize takes a single --sigma")));
                };
                let v: u32 = one.parse().map_err(|_| CmdError::Usage(anyhow::anyhow!("invalid --sigma `{one}`")))?;
                put(&mut m, &["extremize", "sigma"], json!(v));
            } else {
                put(&mut m, &["predict", "sigma_list"], json!(s));
            }
        }
        Ok(Value::Object(m))
    }
}

fn run(cmd: Command) -> CmdResult {
    let (family, common) = match &cmd {
        Command::VerifyTorus(c) => (Some(Family::Torus), c),
        Command::VerifySphere(c) => (Some(Family::Sphere), c),
        Command::VerifyHermite(c) => (Some(Family::Hermite), c),
        Command::Contact(c)
        | Command::Predict(c)
        | Command::Polylab(c)
        | Command::Flowcheck(c)
        | Command::Extremize(c) => (None, c),
    };
    let overrides = common.overrides(matches!(cmd, Command::Extremize(_)))?;
    let cfg = ExperimentConfig::resolve(family, common.config.as_deref(), &overrides).map_err(CmdError::Usage)?;
    if let Some(j) = common.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CmdError::Usage(e.into()))?;
    }
    match cmd {
        Command::Contact(_) => commands::cmd_contact(&cfg),
        Command::Predict(_) => commands::cmd_predict(&cfg),
        Command::Polylab(_) => commands::cmd_polylab(&cfg),
        Command::Flowcheck(_) => commands::cmd_flowcheck(&cfg),
        Command::Extremize(_) => commands::cmd_extremize(&cfg),
        Command::VerifyTorus(_) | Command::VerifySphere(_) | Command::VerifyHermite(_) => {
            commands::cmd_verify(&cfg, family.expect("verify family"))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(o) => {
            for l in &o.lines {
                println!("{l}");
            }
            for f in &o.files {
                eprintln!("wrote {}", f.display());
            }
            ExitCode::from(o.status.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
