use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use log::{info, warn};

use xpdc_core::analysis::{analyze_streams, conversion_efficiency, Analysis};
use xpdc_core::io::csv::{correlation_map_csv, scan_csv};
use xpdc_core::io::manifest::{read_manifest, write_manifest, KeyValues};
use xpdc_core::io::{config_hash, write_atomic, ListModeFile, ListModeHeader, XpdcConfig};
use xpdc_core::physics::{
    bragg_angle, detection_chain_efficiency, emission_angle_approx, geometric_acceptance,
    polarization_suppression, ring_radius_mm,
};
use xpdc_core::sim::simulate_run;
use xpdc_core::units::{rad_to_deg, rad_to_mdeg};
use xpdc_core::workflow::run_scan;

const EVENTS_FILE: &str = "events.xpdc";
const MANIFEST_FILE: &str = "manifest.txt";
const ANALYSIS_FILE: &str = "analysis.txt";

#[derive(Parser, Debug)]
#[command(
    name = "xpdc",
    version,
    about = "Simulate and analyse X-ray down-conversion coincidence experiments"
)]
struct Cli {
    /// Experiment configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `run.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Also write events as CSV.
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print detector placement for the configured geometry.
    Plan,
    /// Simulate a run and write a list-mode file and manifest.
    Simulate,
    /// Build the correlation map and ROI rate of a list-mode file.
    Analyze {
        events: PathBuf,
        /// Run manifest; defaults to manifest.txt next to the event file.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Live time in seconds, when there is no manifest.
        #[arg(long)]
        duration: Option<f64>,
    },
    /// Simulate and analyse a series of detunings.
    Scan {
        /// Detunings in mdeg.
        #[arg(long, value_delimiter = ',', default_value = "5,10,20,30,50")]
        detunings: Vec<f64>,
        /// Runs per detuning, with seeds counting up from the base seed.
        #[arg(long, default_value_t = 3)]
        seeds: u64,
    },
    /// Convert an observed pair rate to a conversion efficiency.
    Report {
        /// Analysis summary written by `analyze`.
        #[arg(long)]
        analysis: Option<PathBuf>,
        /// Observed net pair rate per hour, instead of an analysis file.
        #[arg(long, conflicts_with = "analysis")]
        rate: Option<f64>,
        /// Uncertainty of `--rate`.
        #[arg(long, requires = "rate")]
        rate_error: Option<f64>,
    },
}

/// Error with the exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn config_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 1,
        error: e.into(),
    }
}

fn runtime_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 2,
        error: e.into(),
    }
}

/// Core errors are configuration errors when the caller could fix them in
/// the config or arguments.
fn core_err(e: xpdc_core::Error) -> Failure {
    if e.is_config() {
        config_err(e)
    } else {
        runtime_err(e)
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn load_config(cli: &Cli) -> CliResult<XpdcConfig> {
    let mut cfg = XpdcConfig::load(cli.config.as_deref(), std::env::vars()).map_err(config_err)?;
    if let Some(seed) = cli.seed {
        cfg.run.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> CliResult {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Plan => plan(&cfg),
        Command::Simulate => simulate(cli, &cfg),
        Command::Analyze {
            events,
            manifest,
            duration,
        } => analyze(cli, &cfg, events, manifest.as_deref(), *duration),
        Command::Scan { detunings, seeds } => scan(cli, &cfg, detunings, *seeds),
        Command::Report {
            analysis,
            rate,
            rate_error,
        } => report(cli, &cfg, analysis.as_deref(), *rate, *rate_error),
    }
}

fn ensure_out(dir: &Path) -> CliResult {
    fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .map_err(runtime_err)
}

fn plan(cfg: &XpdcConfig) -> CliResult {
    let ex = &cfg.run.experiment;
    let detuning = ex.crystal.detuning;
    let theta_b = bragg_angle(ex.beam.pump_energy, &ex.crystal).map_err(core_err)?;
    let two_theta = rad_to_deg(2.0 * theta_b);
    println!("pump energy        {:.1} eV", ex.beam.pump_energy);
    println!("d spacing          {:.5} A", ex.crystal.d_spacing());
    println!("Bragg angle        {:.4} deg", rad_to_deg(theta_b));
    println!("2 theta_B          {two_theta:.4} deg");
    println!("detuning           {:.3} mdeg", rad_to_mdeg(detuning));
    for x in [0.25, 0.5, 0.75] {
        let r = emission_angle_approx(x, detuning, theta_b).map_err(core_err)?;
        println!("R({x:.2})            {:.4} deg", rad_to_deg(r));
    }
    for (i, det) in ex.detectors.iter().enumerate() {
        let off = rad_to_deg(det.center_angle_offset);
        let sign = if i == 0 { -1.0 } else { 1.0 };
        let acc = geometric_acceptance(det.center_angle_offset, det);
        println!(
            "detector {}         at {:.4} deg (2 theta_B {} {off:.4} deg), distance {:.0} mm",
            i + 1,
            two_theta + sign * off,
            if i == 0 { "-" } else { "+" },
            det.distance,
        );
        println!(
            "  ring radius      {:.2} mm, acceptance {:.4}{}",
            ring_radius_mm(det.center_angle_offset, det),
            acc.fraction,
            if acc.under_resolved {
                " (ring smaller than detector)"
            } else {
                ""
            }
        );
    }
    println!(
        "polarization       {:.5} at chi = {:.1} deg",
        polarization_suppression(theta_b, ex.beam.polarization_angle),
        rad_to_deg(ex.beam.polarization_angle)
    );
    Ok(())
}

fn simulate(cli: &Cli, cfg: &XpdcConfig) -> CliResult {
    let out = simulate_run(&cfg.run).map_err(core_err)?;
    ensure_out(&cli.out)?;
    let clock = u32::try_from(cfg.run.experiment.response.clock_tick)
        .map_err(|_| config_err(anyhow!("clock tick does not fit the file header")))?;
    let file = ListModeFile::from_streams(
        ListModeHeader::new(clock, config_hash(&cfg.run)),
        &out.streams,
    );
    let events = cli.out.join(EVENTS_FILE);
    file.write_file(&events).map_err(runtime_err)?;
    write_manifest(&out.manifest, &cli.out.join(MANIFEST_FILE)).map_err(runtime_err)?;
    if cli.csv {
        write_atomic(&cli.out.join("events.csv"), file.to_csv().as_bytes()).map_err(runtime_err)?;
    }
    let m = &out.manifest;
    println!(
        "wrote {} ({} records)",
        events.display(),
        file.records.len()
    );
    println!("pairs generated    {}", m.pairs_generated);
    println!(
        "pairs recorded     {} ({:.1} /h)",
        m.pairs_recorded,
        m.recorded_pair_rate()
    );
    println!("singles recorded   {} / {}", m.recorded[0], m.recorded[1]);
    Ok(())
}

fn analysis_summary(a: &Analysis, file_hash: u64) -> KeyValues {
    let mut kv = KeyValues::new();
    kv.push("config_hash", format!("{file_hash:016x}"));
    kv.push("duration_s", format!("{:?}", a.map.duration_s));
    kv.push("mean_current", format!("{:?}", a.map.mean_current));
    kv.push("candidates_1", a.candidates[0]);
    kv.push("candidates_2", a.candidates[1]);
    kv.push("pairs", a.pairs);
    match &a.time_fit {
        Ok(f) => {
            kv.push("fit_sigma_ns", format!("{:?}", f.sigma));
            kv.push("fit_sigma_error_ns", format!("{:?}", f.sigma_error));
            kv.push("fit_center_ns", format!("{:?}", f.center));
            kv.push("fit_center_error_ns", format!("{:?}", f.center_error));
            kv.push("fit_amplitude", format!("{:?}", f.amplitude));
            kv.push("fit_baseline", format!("{:?}", f.baseline));
            kv.push("fit_chi2", format!("{:?}", f.chi2));
            kv.push("fit_dof", f.dof);
        }
        Err(e) => kv.push("fit_error", e),
    }
    if let Some(c) = a.energy_centroid {
        kv.push("peak_e1_ev", format!("{c:?}"));
    }
    let r = &a.roi;
    kv.push("roi_sigma_t_ns", format!("{:?}", a.roi_spec.sigma_t));
    kv.push("roi_counts", r.roi_counts);
    kv.push("sideband_counts", r.sideband_counts);
    kv.push("sideband_estimate", format!("{:?}", r.sideband_estimate));
    kv.push("exposure_hours", format!("{:?}", r.exposure_hours));
    kv.push("net_rate_per_hour", format!("{:?}", r.net_rate));
    kv.push("net_rate_error_per_hour", format!("{:?}", r.net_rate_error));
    kv
}

fn analyze(
    cli: &Cli,
    cfg: &XpdcConfig,
    events: &Path,
    manifest: Option<&Path>,
    duration: Option<f64>,
) -> CliResult {
    let file = ListModeFile::read_file(events)
        .with_context(|| format!("reading {}", events.display()))
        .map_err(runtime_err)?;
    let (duration_s, mean_current) = match duration {
        Some(d) if d > 0.0 => (d, 1.0),
        Some(d) => return Err(config_err(anyhow!("duration must be positive, got {d}"))),
        None => {
            let path = manifest.map(Path::to_path_buf).unwrap_or_else(|| {
                events
                    .parent()
                    .unwrap_or(Path::new("."))
                    .join(MANIFEST_FILE)
            });
            let m = read_manifest(&path)
                .with_context(|| format!("reading {} (or pass --duration)", path.display()))
                .map_err(runtime_err)?;
            if m.config_hash != file.header.config_hash {
                warn!("manifest {} belongs to a different run", path.display());
            }
            (m.duration_s, m.mean_current)
        }
    };
    let a = analyze_streams(
        &file.split_streams(),
        duration_s,
        mean_current,
        &cfg.analysis_settings(),
    )
    .map_err(core_err)?;
    ensure_out(&cli.out)?;
    write_atomic(
        &cli.out.join("correlation_map.csv"),
        correlation_map_csv(&a.map).as_bytes(),
    )
    .map_err(runtime_err)?;
    analysis_summary(&a, file.header.config_hash)
        .write(&cli.out.join(ANALYSIS_FILE))
        .map_err(runtime_err)?;
    println!("coincidence pairs  {}", a.pairs);
    match &a.time_fit {
        Ok(f) => println!(
            "time profile       sigma {:.0} +- {:.0} ns, centre {:.0} +- {:.0} ns",
            f.sigma, f.sigma_error, f.center, f.center_error
        ),
        Err(e) => println!("time profile       no fit ({e})"),
    }
    if let Some(c) = a.energy_centroid {
        println!("peak E1            {:.0} eV", c);
    }
    println!(
        "ROI                {} counts, {:.2} accidental estimate",
        a.roi.roi_counts, a.roi.sideband_estimate
    );
    println!(
        "net rate           {:.1} +- {:.1} /h",
        a.roi.net_rate, a.roi.net_rate_error
    );
    Ok(())
}

fn scan(cli: &Cli, cfg: &XpdcConfig, detunings: &[f64], seeds: u64) -> CliResult {
    if detunings.is_empty() || seeds == 0 {
        return Err(config_err(anyhow!(
            "need at least one detuning and one seed"
        )));
    }
    let seed_list: Vec<u64> = (0..seeds).map(|k| cfg.run.seed.wrapping_add(k)).collect();
    info!("scanning {} detunings x {} seeds", detunings.len(), seeds);
    let (points, fit) = run_scan(cfg, detunings, &seed_list).map_err(core_err)?;
    ensure_out(&cli.out)?;
    let fit_error = fit.as_ref().err().map(|e| e.to_string());
    let text = scan_csv(&points, fit.as_ref().ok(), fit_error.as_deref());
    write_atomic(&cli.out.join("scan.csv"), text.as_bytes()).map_err(runtime_err)?;
    for p in &points {
        println!(
            "{:>8.2} mdeg  {:>8.1} +- {:.1} /h",
            p.detuning_mdeg, p.rate, p.error
        );
    }
    match fit {
        Ok(f) => {
            println!(
                "exponent           {:.3} +- {:.3}",
                f.exponent, f.exponent_error
            );
            println!(
                "fixed -1/2 fit     chi2/dof {:.2}, p = {:.3}",
                f.fixed_chi2_per_dof, f.fixed_p_value
            );
        }
        Err(e) => eprintln!("warning: scan fit failed: {e}"),
    }
    Ok(())
}

fn report(
    cli: &Cli,
    cfg: &XpdcConfig,
    analysis: Option<&Path>,
    rate: Option<f64>,
    rate_error: Option<f64>,
) -> CliResult {
    let (net, err) = match rate {
        Some(r) => (r, rate_error.unwrap_or(0.0)),
        None => {
            let path = analysis
                .map(Path::to_path_buf)
                .unwrap_or_else(|| cli.out.join(ANALYSIS_FILE));
            let kv = KeyValues::read(&path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(runtime_err)?;
            (
                kv.parse_value("net_rate_per_hour").map_err(runtime_err)?,
                kv.parse_value("net_rate_error_per_hour")
                    .map_err(runtime_err)?,
            )
        }
    };
    if net.is_nan() || net <= 0.0 {
        return Err(runtime_err(anyhow!(
            "no positive net pair rate to convert ({net} /h)"
        )));
    }
    let ex = &cfg.run.experiment;
    let acceptance = ex
        .detectors
        .iter()
        .map(|d| geometric_acceptance(d.center_angle_offset, d).fraction)
        .fold(1.0, f64::min);
    let half = ex.beam.pump_energy / 2.0;
    let chain = detection_chain_efficiency(half, half, &ex.efficiency);
    let c =
        conversion_efficiency(net, acceptance, chain, ex.beam.incident_rate).map_err(core_err)?;
    let (e_obs, e_tot, e_eff) = c.errors_for(net, err);
    println!("observed rate      {net:.1} +- {err:.1} /h");
    println!("acceptance         {acceptance:.4}");
    println!("chain efficiency   {chain:.3}");
    println!(
        "observable rate    {:.0} +- {:.0} /h",
        c.observable_rate, e_obs
    );
    println!("generated rate     {:.0} +- {:.0} /h", c.total_rate, e_tot);
    println!("efficiency         {:.3e} +- {:.1e}", c.efficiency, e_eff);
    println!("photons per pair   {:.3e}", c.photons_per_observed_pair);
    let mut kv = KeyValues::new();
    kv.push("net_rate_per_hour", format!("{net:?}"));
    kv.push("acceptance", format!("{acceptance:?}"));
    kv.push("chain_efficiency", format!("{chain:?}"));
    kv.push(
        "observable_rate_per_hour",
        format!("{:?}", c.observable_rate),
    );
    kv.push("total_rate_per_hour", format!("{:?}", c.total_rate));
    kv.push("efficiency", format!("{:?}", c.efficiency));
    kv.push("efficiency_error", format!("{e_eff:?}"));
    kv.push(
        "photons_per_observed_pair",
        format!("{:?}", c.photons_per_observed_pair),
    );
    ensure_out(&cli.out)?;
    kv.write(&cli.out.join("report.txt")).map_err(runtime_err)?;
    Ok(())
}
