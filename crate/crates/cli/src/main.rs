//! `sild`: P/N skew analysis of differential channels from the command line.
//!
//! Exit codes: 0 success, 1 a metric gate (--max-fom/--max-sild) failed,
//! 2 usage or input errors.

mod synth_spec;

use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sildkit::batch::{analyze_batch, records_to_csv, summary_to_json, ErrorPolicy};
use sildkit::mixed_mode::{to_mixed_mode, Direction};
use sildkit::network::PortMap;
use sildkit::pulse::{pulse_response, DcExtrapolation, PulseConfig, SpectralWindow};
use sildkit::sild::{fom_sild, max_abs_sild, sild_from_parts, weight, FomConfig, Normalization};
use sildkit::skew::{pn_skew, SkewDirection};
use sildkit::touchstone::{
    parse_touchstone, write_touchstone, DataFormat, FrequencyUnit, TouchstoneOptions,
    TouchstoneVersion,
};
use synth_spec::SynthFile;

#[derive(Parser)]
#[command(
    name = "sild",
    version,
    about = "Skew-induced insertion-loss deviation metrics for differential channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Port assignment as left_p,right_p,left_n,right_n (1-based).
    #[arg(long, global = true, default_value = "1,2,3,4", value_parser = parse_port_map)]
    port_map: PortMap,

    /// Named figure-of-merit preset.
    #[arg(long, global = true, value_enum, default_value_t = Profile::Pam4_224g)]
    profile: Profile,

    /// Signaling rate override, Hz.
    #[arg(long, global = true)]
    f_b: Option<f64>,

    /// Receiver 3 dB bandwidth override, Hz.
    #[arg(long, global = true)]
    f_r: Option<f64>,

    /// Transmit filter 3 dB bandwidth override, Hz.
    #[arg(long, global = true)]
    f_t: Option<f64>,

    /// Summation cutoff override, Hz.
    #[arg(long, global = true)]
    f_max: Option<f64>,

    /// Figure-of-merit normalization.
    #[arg(long, global = true, value_enum, default_value_t = NormalizationArg::WeightedRms)]
    normalization: NormalizationArg,

    /// Output path; stdout when omitted.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Output encoding.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    /// 106.25 GBd PAM4: f_b = 106.25 GHz, f_r = 0.75 f_b, f_t = f_max = f_b.
    #[value(name = "224g-pam4")]
    Pam4_224g,
    /// 53.125 GBd PAM4.
    #[value(name = "112g-pam4")]
    Pam4_112g,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormalizationArg {
    /// sqrt(sum(W * SILD^2) / sum(W)), dB.
    WeightedRms,
    /// (1/N) * sum(W * SILD^2), dB^2.
    WeightedMean,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one Touchstone file: skew, SILD and figure-of-merit report.
    Analyze(AnalyzeArgs),
    /// Analyze a directory or pattern of files into records and a summary.
    Batch(BatchArgs),
    /// Generate synthetic channels from a TOML spec.
    Synth(SynthArgs),
    /// Pulse response of a selected transfer function.
    Pulse(PulseArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input .s4p path, or - for stdin.
    file: String,

    /// Fail (exit 1) when the worse-direction FOM exceeds this, dB.
    #[arg(long)]
    max_fom: Option<f64>,

    /// Fail (exit 1) when max |SILD| in the band exceeds this, dB.
    #[arg(long)]
    max_sild: Option<f64>,
}

#[derive(Args)]
struct BatchArgs {
    /// Directory, file, or single-star pattern like dir/chan_*.s4p.
    input: String,

    /// Records CSV path.
    #[arg(long, default_value = "records.csv")]
    records: PathBuf,

    /// Summary JSON path.
    #[arg(long, default_value = "summary.json")]
    summary: PathBuf,

    /// What to do with unparseable files.
    #[arg(long, value_enum, default_value_t = PolicyArg::Continue)]
    policy: PolicyArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Continue,
    FailFast,
}

#[derive(Args)]
struct SynthArgs {
    /// TOML channel spec.
    spec: PathBuf,

    /// Output file (single channel) or directory (sweep).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Sweep of additional flat P/left skew: tau=START:STEP:END in ps,
    /// e.g. tau=0:0.5:3ps. One file per value.
    #[arg(long)]
    sweep: Option<String>,

    /// Frequency unit of the written files.
    #[arg(long, value_enum, default_value_t = UnitArg::Ghz)]
    unit: UnitArg,

    /// Data encoding of the written files.
    #[arg(long, value_enum, default_value_t = DataFormatArg::Ri)]
    data_format: DataFormatArg,

    /// Touchstone version of the written files.
    #[arg(long, value_enum, default_value_t = VersionArg::V1)]
    ts_version: VersionArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitArg {
    Hz,
    Khz,
    Mhz,
    Ghz,
}

#[derive(Clone, Copy, ValueEnum)]
enum DataFormatArg {
    Ri,
    Ma,
    Db,
}

#[derive(Clone, Copy, ValueEnum)]
enum VersionArg {
    V1,
    V2,
}

#[derive(Args)]
struct PulseArgs {
    /// Input .s4p path, or - for stdin.
    file: String,

    /// Transfer function to excite.
    #[arg(long, value_enum, default_value_t = PulseMode::Dd21)]
    mode: PulseMode,

    /// Excitation pulse width, seconds. Default: one unit interval (1/f_b).
    #[arg(long)]
    pulse_width: Option<f64>,

    /// Pulse rise time, seconds. Default: 0.1 pulse widths.
    #[arg(long)]
    rise_time: Option<f64>,

    /// Output record length, seconds.
    #[arg(long, default_value_t = 2.0e-9)]
    time_window: f64,

    /// DC extrapolation policy.
    #[arg(long, value_enum, default_value_t = DcArg::Constant)]
    dc: DcArg,

    /// Disable the band-edge raised-cosine taper.
    #[arg(long)]
    no_taper: bool,

    /// Reject grids that are not harmonic in 1/time_window.
    #[arg(long)]
    no_resample: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum PulseMode {
    Dd21,
    Dd12,
    Sd21,
    Sd12,
}

#[derive(Clone, Copy, ValueEnum)]
enum DcArg {
    Constant,
    Linear,
}

fn parse_port_map(s: &str) -> Result<PortMap, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err("expected four comma-separated port numbers".into());
    }
    let mut nums = [0u8; 4];
    for (i, p) in parts.iter().enumerate() {
        nums[i] = p
            .trim()
            .parse()
            .map_err(|_| format!("bad port number {p:?}"))?;
    }
    PortMap::new(nums[0], nums[1], nums[2], nums[3]).map_err(|e| e.to_string())
}

fn fom_config(cli: &Cli) -> FomConfig {
    let mut cfg = match cli.profile {
        Profile::Pam4_224g => FomConfig::pam4_224g(),
        Profile::Pam4_112g => FomConfig::pam4_112g(),
    };
    if let Some(v) = cli.f_b {
        cfg.f_b = v;
    }
    if let Some(v) = cli.f_r {
        cfg.f_r = v;
    }
    if let Some(v) = cli.f_t {
        cfg.f_t = v;
    }
    if let Some(v) = cli.f_max {
        cfg.f_max = v;
    }
    cfg.normalization = match cli.normalization {
        NormalizationArg::WeightedRms => Normalization::WeightedRms,
        NormalizationArg::WeightedMean => Normalization::WeightedMean,
    };
    cfg
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    match &cli.command {
        Command::Analyze(args) => cmd_analyze(cli, args),
        Command::Batch(args) => cmd_batch(cli, args),
        Command::Synth(args) => cmd_synth(cli, args),
        Command::Pulse(args) => cmd_pulse(cli, args),
    }
}

fn read_input(file: &str) -> Result<(String, String), String> {
    if file == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| format!("stdin: {e}"))?;
        Ok((text, "<stdin>".into()))
    } else {
        let text = std::fs::read_to_string(file).map_err(|e| format!("{file}: {e}"))?;
        Ok((text, file.to_string()))
    }
}

fn emit(cli: &Cli, content: &str) -> Result<(), String> {
    match &cli.output {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => std::fs::write(path, content).map_err(|e| format!("{}: {e}", path.display())),
    }
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct AnalyzeConfig {
    f_b_hz: f64,
    f_r_hz: f64,
    f_t_hz: f64,
    f_max_hz: f64,
    normalization: String,
    port_map: String,
}

#[derive(Serialize)]
struct PerFrequency {
    f_hz: Vec<f64>,
    t_skew1_s: Vec<f64>,
    t_skew2_s: Vec<f64>,
    sdd21_db: Vec<f64>,
    sdd12_db: Vec<f64>,
    s0dd21_db: Vec<f64>,
    s0dd12_db: Vec<f64>,
    sild1_db: Vec<f64>,
    sild2_db: Vec<f64>,
    weight: Vec<f64>,
}

#[derive(Serialize)]
struct AnalyzeSummary {
    fom_1_db: f64,
    fom_2_db: f64,
    delta_db: f64,
    max_abs_sild_db: f64,
    max_abs_sild_freq_hz: f64,
    max_abs_sild_direction: String,
    actual_cutoff_hz: f64,
}

#[derive(Serialize)]
struct AnalyzeReport {
    schema: String,
    source: String,
    config: AnalyzeConfig,
    per_frequency: PerFrequency,
    summary: AnalyzeSummary,
    warnings: Vec<String>,
}

fn cmd_analyze(cli: &Cli, args: &AnalyzeArgs) -> Result<ExitCode, String> {
    let (text, source) = read_input(&args.file)?;
    let cfg = fom_config(cli);
    let net = parse_touchstone(&text, None)
        .map_err(|e| format!("{source}: {e}"))?
        .with_port_map(cli.port_map);

    let mm = to_mixed_mode(&net);
    let skew1 = pn_skew(&mm, SkewDirection::AtPort1).map_err(|e| e.to_string())?;
    let skew2 = pn_skew(&mm, SkewDirection::AtPort2).map_err(|e| e.to_string())?;
    let result = sild_from_parts(&net, &skew1, &skew2).map_err(|e| e.to_string())?;
    let fom = fom_sild(&result, &cfg).map_err(|e| e.to_string())?;
    let band_max = cfg.f_max.min(result.grid().max_freq());
    let worst = max_abs_sild(&result, band_max).map_err(|e| e.to_string())?;

    let mut warnings = result.warnings.clone();
    warnings.extend(fom.warnings.iter().cloned());

    let report = AnalyzeReport {
        schema: "sild-analyze/1".into(),
        source,
        config: AnalyzeConfig {
            f_b_hz: cfg.f_b,
            f_r_hz: cfg.f_r,
            f_t_hz: cfg.f_t,
            f_max_hz: cfg.f_max,
            normalization: match cfg.normalization {
                Normalization::WeightedRms => "weighted-rms".into(),
                Normalization::WeightedMean => "weighted-mean".into(),
            },
            port_map: format!(
                "{},{},{},{}",
                net.port_map().left_p(),
                net.port_map().right_p(),
                net.port_map().left_n(),
                net.port_map().right_n()
            ),
        },
        per_frequency: PerFrequency {
            f_hz: result.grid().as_slice().to_vec(),
            t_skew1_s: skew1.t_skew().to_vec(),
            t_skew2_s: skew2.t_skew().to_vec(),
            sdd21_db: result.original_mag_21.clone(),
            sdd12_db: result.original_mag_12.clone(),
            s0dd21_db: result.deskewed_mag_21.clone(),
            s0dd12_db: result.deskewed_mag_12.clone(),
            sild1_db: result.sild_1.clone(),
            sild2_db: result.sild_2.clone(),
            weight: result.grid().iter().map(|&f| weight(f, &cfg)).collect(),
        },
        summary: AnalyzeSummary {
            fom_1_db: fom.fom_1,
            fom_2_db: fom.fom_2,
            delta_db: (fom.fom_1 - fom.fom_2).abs(),
            max_abs_sild_db: worst.value_db,
            max_abs_sild_freq_hz: worst.freq_hz,
            max_abs_sild_direction: match worst.direction {
                Direction::LeftToRight => "left-to-right".into(),
                Direction::RightToLeft => "right-to-left".into(),
            },
            actual_cutoff_hz: fom.actual_cutoff_hz,
        },
        warnings,
    };

    let content = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => render_analyze_csv(&report),
    };
    emit(cli, &content)?;

    let worse_fom = report.summary.fom_1_db.max(report.summary.fom_2_db);
    let mut gate_failed = false;
    if let Some(limit) = args.max_fom {
        if worse_fom > limit {
            eprintln!("gate: FOM {worse_fom:.6} dB exceeds --max-fom {limit}");
            gate_failed = true;
        }
    }
    if let Some(limit) = args.max_sild {
        if report.summary.max_abs_sild_db > limit {
            eprintln!(
                "gate: max |SILD| {:.6} dB exceeds --max-sild {limit}",
                report.summary.max_abs_sild_db
            );
            gate_failed = true;
        }
    }
    Ok(if gate_failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn render_analyze_csv(report: &AnalyzeReport) -> String {
    let mut out = String::from(
        "f_hz,t_skew1_s,t_skew2_s,sdd21_db,sdd12_db,s0dd21_db,s0dd12_db,sild1_db,sild2_db,weight\n",
    );
    let p = &report.per_frequency;
    for i in 0..p.f_hz.len() {
        let _ = writeln!(
            out,
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            p.f_hz[i],
            p.t_skew1_s[i],
            p.t_skew2_s[i],
            p.sdd21_db[i],
            p.sdd12_db[i],
            p.s0dd21_db[i],
            p.s0dd12_db[i],
            p.sild1_db[i],
            p.sild2_db[i],
            p.weight[i]
        );
    }
    let s = &report.summary;
    let _ = writeln!(out, "# fom_1_db = {:.12e}", s.fom_1_db);
    let _ = writeln!(out, "# fom_2_db = {:.12e}", s.fom_2_db);
    let _ = writeln!(out, "# delta_db = {:.12e}", s.delta_db);
    let _ = writeln!(out, "# max_abs_sild_db = {:.12e}", s.max_abs_sild_db);
    let _ = writeln!(out, "# max_abs_sild_freq_hz = {:.12e}", s.max_abs_sild_freq_hz);
    let _ = writeln!(out, "# max_abs_sild_direction = {}", s.max_abs_sild_direction);
    let _ = writeln!(out, "# actual_cutoff_hz = {:.12e}", s.actual_cutoff_hz);
    for w in &report.warnings {
        let _ = writeln!(out, "# warning: {w}");
    }
    out
}

// ---------------------------------------------------------------------------
// batch
// ---------------------------------------------------------------------------

fn expand_inputs(input: &str) -> Result<Vec<PathBuf>, String> {
    let path = Path::new(input);
    if path.is_dir() {
        let mut found: Vec<PathBuf> = std::fs::read_dir(path)
            .map_err(|e| format!("{input}: {e}"))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| {
                p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| e.eq_ignore_ascii_case("s4p"))
            })
            .collect();
        found.sort();
        return Ok(found);
    }
    if let Some(name) = path.file_name().and_then(|n| n.to_str()) {
        if name.contains('*') {
            let parent = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
                _ => PathBuf::from("."),
            };
            let parts: Vec<&str> = name.splitn(2, '*').collect();
            let (prefix, suffix) = (parts[0], parts.get(1).copied().unwrap_or(""));
            let mut found: Vec<PathBuf> = std::fs::read_dir(&parent)
                .map_err(|e| format!("{}: {e}", parent.display()))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| {
                    p.file_name()
                        .and_then(|n| n.to_str())
                        .is_some_and(|n| n.starts_with(prefix) && n.ends_with(suffix))
                })
                .collect();
            found.sort();
            return Ok(found);
        }
    }
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    Ok(Vec::new())
}

fn cmd_batch(cli: &Cli, args: &BatchArgs) -> Result<ExitCode, String> {
    let inputs = expand_inputs(&args.input)?;
    if inputs.is_empty() {
        return Err(format!("no inputs matched {:?}", args.input));
    }
    let cfg = fom_config(cli);
    let policy = match args.policy {
        PolicyArg::Continue => ErrorPolicy::Continue,
        PolicyArg::FailFast => ErrorPolicy::FailFast,
    };
    let (records, summary) = analyze_batch(&inputs, &cfg, policy).map_err(|e| e.to_string())?;
    std::fs::write(&args.records, records_to_csv(&records))
        .map_err(|e| format!("{}: {e}", args.records.display()))?;
    let mut json = summary_to_json(&summary);
    json.push('\n');
    std::fs::write(&args.summary, json)
        .map_err(|e| format!("{}: {e}", args.summary.display()))?;
    println!(
        "analyzed {} of {} inputs ({} failures) -> {}, {}",
        records.len(),
        summary.count,
        summary.failures.len(),
        args.records.display(),
        args.summary.display()
    );
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

fn parse_sweep(text: &str) -> Result<Vec<f64>, String> {
    let rest = text
        .strip_prefix("tau=")
        .ok_or_else(|| format!("sweep {text:?} must look like tau=0:0.5:3ps"))?;
    let cleaned = rest.trim().trim_end_matches("ps");
    let parts: Vec<&str> = cleaned.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("sweep {text:?} needs start:step:end"));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.trim_end_matches("ps")
                .parse::<f64>()
                .map_err(|_| format!("bad sweep number {p:?}"))
        })
        .collect::<Result<_, _>>()?;
    let (start, step, end) = (nums[0], nums[1], nums[2]);
    if step <= 0.0 || end < start {
        return Err("sweep needs step > 0 and end >= start".into());
    }
    let mut taus = Vec::new();
    let mut i = 0usize;
    loop {
        let v = start + step * i as f64;
        if v > end + 1e-9 * step {
            break;
        }
        taus.push(v * 1e-12);
        i += 1;
    }
    Ok(taus)
}

/// 0.5 ps -> "0p5", 2 ps -> "2".
fn ps_tag(tau_s: f64) -> String {
    let ps = tau_s * 1e12;
    format!("{ps}").replace('.', "p")
}

fn cmd_synth(_cli: &Cli, args: &SynthArgs) -> Result<ExitCode, String> {
    let text = std::fs::read_to_string(&args.spec)
        .map_err(|e| format!("{}: {e}", args.spec.display()))?;
    let spec = SynthFile::parse(&text)?;
    let options = TouchstoneOptions {
        frequency_unit: match args.unit {
            UnitArg::Hz => FrequencyUnit::Hz,
            UnitArg::Khz => FrequencyUnit::KHz,
            UnitArg::Mhz => FrequencyUnit::MHz,
            UnitArg::Ghz => FrequencyUnit::GHz,
        },
        data_format: match args.data_format {
            DataFormatArg::Ri => DataFormat::Ri,
            DataFormatArg::Ma => DataFormat::Ma,
            DataFormatArg::Db => DataFormat::Db,
        },
        reference_impedance: 50.0,
        version: match args.ts_version {
            VersionArg::V1 => TouchstoneVersion::V1,
            VersionArg::V2 => TouchstoneVersion::V2,
        },
    };
    let stem = args
        .spec
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("channel")
        .to_string();

    match &args.sweep {
        None => {
            let net = spec.build(None)?;
            let out = args
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("{stem}.s4p")));
            let out = if out.is_dir() {
                out.join(format!("{stem}.s4p"))
            } else {
                out
            };
            let body = write_touchstone(&net, &options).map_err(|e| e.to_string())?;
            std::fs::write(&out, body).map_err(|e| format!("{}: {e}", out.display()))?;
            println!("wrote {}", out.display());
        }
        Some(sweep) => {
            let taus = parse_sweep(sweep)?;
            let dir = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
            if !dir.is_dir() {
                return Err(format!(
                    "--out {} must be a directory for sweeps",
                    dir.display()
                ));
            }
            for &tau in &taus {
                let net = spec.build(Some(tau))?;
                let out = dir.join(format!("{stem}_tau{}ps.s4p", ps_tag(tau)));
                let body = write_touchstone(&net, &options).map_err(|e| e.to_string())?;
                std::fs::write(&out, body).map_err(|e| format!("{}: {e}", out.display()))?;
                println!("wrote {}", out.display());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// pulse
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct PulseReport {
    schema: String,
    source: String,
    mode: String,
    time_s: Vec<f64>,
    amplitude: Vec<f64>,
}

fn cmd_pulse(cli: &Cli, args: &PulseArgs) -> Result<ExitCode, String> {
    let (text, source) = read_input(&args.file)?;
    let net = parse_touchstone(&text, None)
        .map_err(|e| format!("{source}: {e}"))?
        .with_port_map(cli.port_map);
    let mm = to_mixed_mode(&net);
    let transfer = match args.mode {
        PulseMode::Dd21 => &mm.sdd21,
        PulseMode::Dd12 => &mm.sdd12,
        PulseMode::Sd21 => &mm.ssd21,
        PulseMode::Sd12 => &mm.ssd12,
    };
    let fom = fom_config(cli);
    let pulse_width = args.pulse_width.unwrap_or(1.0 / fom.f_b);
    let cfg = PulseConfig {
        pulse_width,
        rise_time: args.rise_time.unwrap_or(0.1 * pulse_width),
        time_window: args.time_window,
        dc_extrapolation: match args.dc {
            DcArg::Constant => DcExtrapolation::Constant,
            DcArg::Linear => DcExtrapolation::Linear,
        },
        spectral_window: if args.no_taper {
            SpectralWindow::None
        } else {
            SpectralWindow::RaisedCosineEdge
        },
        resample: !args.no_resample,
    };
    let response = pulse_response(transfer, mm.grid(), &cfg).map_err(|e| e.to_string())?;

    let mode = match args.mode {
        PulseMode::Dd21 => "dd21",
        PulseMode::Dd12 => "dd12",
        PulseMode::Sd21 => "sd21",
        PulseMode::Sd12 => "sd12",
    };
    let content = match cli.format {
        Format::Csv => {
            let mut out = String::from("time_s,amplitude\n");
            for (t, a) in response.time.iter().zip(&response.amplitude) {
                let _ = writeln!(out, "{t:.12e},{a:.12e}");
            }
            out
        }
        Format::Json => {
            let report = PulseReport {
                schema: "sild-pulse/1".into(),
                source,
                mode: mode.into(),
                time_s: response.time.clone(),
                amplitude: response.amplitude.clone(),
            };
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
    };
    emit(cli, &content)?;
    Ok(ExitCode::SUCCESS)
}
