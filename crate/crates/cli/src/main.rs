use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use scghg_core::cli_io::{
    fit_surfaces, growth_paths, write_surface, write_surface_curves, write_temp_paths, write_term_structure,
    Manifest, ModelConfig,
};
use scghg_core::damages_macro::{impulse_response, write_irf, Study, T_EVAL};
use scghg_core::discounting::{calibrate, ce_term_structure};
use scghg_core::scghg::{climate_summary, run, source_labels, write_table, write_trials, Mode, NonmarketToggles};
use scghg_core::{Error, Result};

/// U.S.-specific social cost of greenhouse gases.
#[derive(Parser)]
#[command(name = "scghg", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Cmd {
    /// Monte Carlo estimate per ton of the pulsed gas.
    Run,
    /// Impulse responses of the macro damage families.
    Irf {
        #[arg(long, default_value_t = 30)]
        horizon: usize,
        /// Temperature at which responses are evaluated.
        #[arg(long, default_value_t = T_EVAL)]
        t_eval: f64,
    },
    /// Damage surfaces and temperature-path quantiles.
    Surface,
    /// Fit rho and eta to a near-term and a far-horizon discount rate.
    Calibrate,
    /// Check configuration and inputs, then report climate diagnostics.
    Validate,
}

#[derive(Args)]
struct Opts {
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    gas: Option<String>,
    #[arg(long, global = true)]
    pulse_year: Option<i32>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma list of studies, or `all`.
    #[arg(long, global = true)]
    study: Option<String>,
    /// Comma list of mortality, wildfire, biodiversity; or `all` / `none`.
    #[arg(long, global = true)]
    nonmarket: Option<String>,
    /// on | off | amazon | permafrost
    #[arg(long, global = true)]
    feedbacks: Option<String>,
    /// independent | integrated
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Near-term certainty-equivalent rate target.
    #[arg(long, global = true)]
    discount_target: Option<f64>,
    #[arg(long, global = true)]
    far_horizon: Option<usize>,
    #[arg(long, global = true)]
    far_target: Option<f64>,
}

fn parse_studies(s: &str) -> Result<Vec<Study>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(Study::ALL.to_vec());
    }
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(str::parse).collect()
}

fn configure(o: &Opts) -> Result<ModelConfig> {
    let mut c = match &o.config {
        Some(p) => ModelConfig::load(p)?,
        None => ModelConfig::default(),
    };
    let r = &mut c.run;
    if let Some(g) = &o.gas {
        r.gas = g.parse()?;
    }
    if let Some(y) = o.pulse_year {
        r.pulse_year = y;
    }
    if let Some(n) = o.trials {
        r.trials = n;
    }
    if let Some(s) = o.seed {
        r.seed = s;
    }
    if let Some(s) = &o.study {
        r.studies = parse_studies(s)?;
    }
    if let Some(s) = &o.nonmarket {
        r.nonmarket = NonmarketToggles::parse(s)?;
    }
    if let Some(m) = &o.mode {
        r.mode = match m.as_str() {
            "independent" => Mode::Independent,
            "integrated" => Mode::Integrated,
            _ => return Err(Error::Argument(format!("mode must be independent|integrated, got `{m}`"))),
        };
    }
    if let Some(f) = &o.feedbacks {
        c.feedbacks.set_mode(f)?;
    }
    if let Some(x) = o.discount_target {
        c.calibration.near_rate = x;
    }
    if let Some(x) = o.far_horizon {
        c.calibration.far_horizon = x;
    }
    if let Some(x) = o.far_target {
        c.calibration.far_rate = x;
    }
    if let Some(d) = &o.out {
        c.output.dir = d.clone();
    }
    let errs = c.validate();
    if !errs.is_empty() {
        return Err(Error::Config(errs));
    }
    Ok(c)
}

struct Outputs {
    dir: PathBuf,
    manifest: Manifest,
}

impl Outputs {
    fn new(cmd: &str, c: &ModelConfig) -> Result<Self> {
        std::fs::create_dir_all(&c.output.dir)?;
        Ok(Self { dir: c.output.dir.clone(), manifest: Manifest::new(cmd, c)? })
    }

    fn create(&self, name: &str) -> Result<(PathBuf, std::fs::File)> {
        let p = self.dir.join(name);
        let f = std::fs::File::create(&p)?;
        Ok((p, f))
    }

    fn record(&mut self, p: &Path) -> Result<()> {
        self.manifest.add_output(p)
    }

    fn time(&mut self, stage: &str, t: Instant) {
        self.manifest.timings.insert(stage.into(), t.elapsed().as_secs_f64());
    }

    fn finish(self) -> Result<()> {
        let p = self.dir.join("manifest.json");
        self.manifest.write(&p)?;
        eprintln!("wrote {}", self.dir.display());
        Ok(())
    }
}

fn cmd_run(c: &ModelConfig) -> Result<()> {
    let mut o = Outputs::new("run", c)?;
    let t = Instant::now();
    let sh = c.shared_inputs(c.run.trials)?;
    o.time("inputs", t);
    let t = Instant::now();
    let res = run(&sh, &c.run)?;
    o.time("trials", t);
    let (p, f) = o.create("scghg.csv")?;
    write_table(&res, f, c.output.round)?;
    o.record(&p)?;
    let (p, f) = o.create("trials.csv")?;
    write_trials(&res, &source_labels(&c.run), f)?;
    o.record(&p)?;
    write_table(&res, std::io::stdout().lock(), true)?;
    o.finish()
}

fn cmd_irf(c: &ModelConfig, horizon: usize, t_eval: f64) -> Result<()> {
    let mut o = Outputs::new("irf", c)?;
    let payloads = c.payloads()?;
    let irfs = c
        .run
        .studies
        .iter()
        .map(|s| {
            let spec = payloads.iter().find(|p| p.study == *s).expect("every study has a payload");
            impulse_response(spec, horizon, t_eval)
        })
        .collect::<Result<Vec<_>>>()?;
    let (p, f) = o.create("irf.csv")?;
    write_irf(&irfs, f)?;
    o.record(&p)?;
    o.finish()
}

fn cmd_surface(c: &ModelConfig) -> Result<()> {
    let mut o = Outputs::new("surface", c)?;
    let sh = c.shared_inputs(c.run.trials)?;
    let t = Instant::now();
    let fits = fit_surfaces(&sh, c.run.seed, c.run.trials, &c.run.studies)?;
    o.time("fit", t);
    let (p, f) = o.create("surface.csv")?;
    write_surface(&fits, f)?;
    o.record(&p)?;
    let grid: Vec<f64> = (0..=32).map(|k| 0.25 * f64::from(k)).collect();
    let (p, f) = o.create("surface_curves.csv")?;
    write_surface_curves(&fits, &grid, f)?;
    o.record(&p)?;
    let (p, f) = o.create("temp_paths.csv")?;
    write_temp_paths(&sh, c.run.seed, c.run.trials, f)?;
    o.record(&p)?;
    o.finish()
}

fn cmd_calibrate(c: &ModelConfig) -> Result<()> {
    let mut o = Outputs::new("calibrate", c)?;
    let sh = c.shared_inputs(c.run.trials)?;
    let g = growth_paths(&sh, c.run.trials);
    let cal = calibrate(&g, &c.calibration)?;
    let horizon = g.iter().map(Vec::len).min().unwrap_or(0);
    let rates = ce_term_structure(&g, &cal.params, horizon)?;
    let (p, f) = o.create("term_structure.csv")?;
    write_term_structure(&rates, f)?;
    o.record(&p)?;
    let p = o.dir.join("calibration.json");
    let j = serde_json::json!({
        "rho": cal.params.rho,
        "eta": cal.params.eta,
        "degenerate": cal.degenerate,
        "near_residual": cal.near_residual,
        "far_residual": cal.far_residual,
        "target": c.calibration,
    });
    std::fs::write(&p, serde_json::to_string_pretty(&j).expect("json") + "\n")?;
    o.record(&p)?;
    println!("rho = {:.6}  eta = {:.6}{}", cal.params.rho, cal.params.eta, if cal.degenerate { "  (fallback eta)" } else { "" });
    o.finish()
}

fn cmd_validate(c: &ModelConfig) -> Result<()> {
    let n = c.run.trials.min(500);
    let sh = c.shared_inputs(n)?;
    let s = climate_summary(&sh, c.run.seed, n.min(sh.scenarios.len()))?;
    println!("config ok; {} scenarios, {} climate sets", sh.scenarios.len(), sh.params.len());
    let mut groups: Vec<(String, usize)> = sh.pairing.group_sizes().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    groups.sort();
    for (g, k) in groups {
        println!("  pairing {g}: {k}");
    }
    println!("  GMST 2011-2020 mean: {:.3} C", s.gmst_2011_2020);
    println!("  U.S. temperature 2100: {:.3} C (+{:.3})", s.us_2100, s.us_delta_2100);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = configure(&cli.opts).and_then(|c| match cli.cmd {
        Cmd::Run => cmd_run(&c),
        Cmd::Irf { horizon, t_eval } => cmd_irf(&c, horizon, t_eval),
        Cmd::Surface => cmd_surface(&c),
        Cmd::Calibrate => cmd_calibrate(&c),
        Cmd::Validate => cmd_validate(&c),
    });
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("scghg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
