//! Touchstone V1/V2 reader and writer for 4-port channels and 2-port
//! delay-line elements.
//!
//! Handled grammar: `!` comments to end of line, one `# <unit> S <format>
//! R <impedance>` option line (case-insensitive, missing parts fall back to
//! the standard defaults GHz / MA / 50), V1 row wrapping for 4-port data
//! (4 lines of 4 complex values per frequency point, tolerantly re-flowed),
//! and the V2 keyword blocks needed for plain S-parameter files. Y/Z/H
//! parameter types, noise sections, >4 ports and V2 mixed-mode blocks are
//! rejected with typed errors.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::freq::FrequencyGrid;
use crate::network::{PortMap, SMatrix, SMatrix2, SingleEndedNetwork, TwoPortNetwork};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrequencyUnit {
    Hz,
    KHz,
    MHz,
    GHz,
}

impl FrequencyUnit {
    pub fn multiplier(self) -> f64 {
        match self {
            FrequencyUnit::Hz => 1.0,
            FrequencyUnit::KHz => 1.0e3,
            FrequencyUnit::MHz => 1.0e6,
            FrequencyUnit::GHz => 1.0e9,
        }
    }

    fn keyword(self) -> &'static str {
        match self {
            FrequencyUnit::Hz => "Hz",
            FrequencyUnit::KHz => "kHz",
            FrequencyUnit::MHz => "MHz",
            FrequencyUnit::GHz => "GHz",
        }
    }

    fn parse(token: &str) -> Option<Self> {
        match token.to_ascii_lowercase().as_str() {
            "hz" => Some(FrequencyUnit::Hz),
            "khz" => Some(FrequencyUnit::KHz),
            "mhz" => Some(FrequencyUnit::MHz),
            "ghz" => Some(FrequencyUnit::GHz),
            _ => None,
        }
    }
}

/// Complex number encoding used by the data records.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DataFormat {
    /// real, imaginary
    Ri,
    /// linear magnitude, angle in degrees
    Ma,
    /// 20*log10 magnitude, angle in degrees
    Db,
}

impl DataFormat {
    fn keyword(self) -> &'static str {
        match self {
            DataFormat::Ri => "RI",
            DataFormat::Ma => "MA",
            DataFormat::Db => "DB",
        }
    }

    fn parse(token: &str) -> Option<Self> {
        match token.to_ascii_lowercase().as_str() {
            "ri" => Some(DataFormat::Ri),
            "ma" => Some(DataFormat::Ma),
            "db" => Some(DataFormat::Db),
            _ => None,
        }
    }

    fn decode(self, a: f64, b: f64) -> Complex64 {
        match self {
            DataFormat::Ri => Complex64::new(a, b),
            DataFormat::Ma => Complex64::from_polar(a, b.to_radians()),
            DataFormat::Db => Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
        }
    }

    fn encode(self, v: Complex64) -> (f64, f64) {
        match self {
            DataFormat::Ri => (v.re, v.im),
            DataFormat::Ma => (v.norm(), v.arg().to_degrees()),
            DataFormat::Db => {
                let mag = v.norm();
                let db = if mag > 0.0 { 20.0 * mag.log10() } else { -600.0 };
                (db, v.arg().to_degrees())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TouchstoneVersion {
    V1,
    V2,
}

/// Option-line settings plus the file version.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TouchstoneOptions {
    pub frequency_unit: FrequencyUnit,
    pub data_format: DataFormat,
    pub reference_impedance: f64,
    pub version: TouchstoneVersion,
}

impl Default for TouchstoneOptions {
    /// Standard defaults for a file with no option line.
    fn default() -> Self {
        TouchstoneOptions {
            frequency_unit: FrequencyUnit::GHz,
            data_format: DataFormat::Ma,
            reference_impedance: 50.0,
            version: TouchstoneVersion::V1,
        }
    }
}

impl TouchstoneOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.reference_impedance.is_finite() && self.reference_impedance > 0.0) {
            return Err(Error::invalid(
                "reference impedance",
                format!("{} ohms", self.reference_impedance),
            ));
        }
        Ok(())
    }
}

struct RawTouchstone {
    options: TouchstoneOptions,
    ports: usize,
    freqs_hz: Vec<f64>,
    /// ports*ports complex values per frequency point, row-major.
    points: Vec<Vec<Complex64>>,
}

/// Parse a 4-port Touchstone file into a network with the default port map.
///
/// `overrides`, when given, replaces the option-line settings (unit, format,
/// reference impedance) before the data records are interpreted.
pub fn parse_touchstone(
    text: &str,
    overrides: Option<&TouchstoneOptions>,
) -> Result<SingleEndedNetwork> {
    let raw = parse_raw(text, overrides)?;
    if raw.ports != 4 {
        return Err(Error::UnsupportedPortCount { ports: raw.ports });
    }
    let grid = FrequencyGrid::new(raw.freqs_hz)?;
    let matrices: Vec<SMatrix> = raw
        .points
        .iter()
        .map(|vals| {
            let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    m[i][j] = vals[i * 4 + j];
                }
            }
            m
        })
        .collect();
    SingleEndedNetwork::new(grid, matrices, PortMap::default(), raw.options.reference_impedance)
}

/// Parse a 2-port Touchstone file (delay-line element).
pub fn parse_touchstone_two_port(
    text: &str,
    overrides: Option<&TouchstoneOptions>,
) -> Result<TwoPortNetwork> {
    let raw = parse_raw(text, overrides)?;
    if raw.ports != 2 {
        return Err(Error::UnsupportedPortCount { ports: raw.ports });
    }
    let grid = FrequencyGrid::new(raw.freqs_hz)?;
    let matrices: Vec<SMatrix2> = raw
        .points
        .iter()
        .map(|vals| {
            let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    m[i][j] = vals[i * 2 + j];
                }
            }
            m
        })
        .collect();
    TwoPortNetwork::new(grid, matrices, raw.options.reference_impedance)
}

struct DataLine<'a> {
    line_no: usize,
    tokens: Vec<&'a str>,
}

fn parse_raw(text: &str, overrides: Option<&TouchstoneOptions>) -> Result<RawTouchstone> {
    let mut options: Option<TouchstoneOptions> = None;
    let mut version = TouchstoneVersion::V1;
    let mut ports_keyword: Option<usize> = None;
    let mut num_freqs: Option<usize> = None;
    let mut two_port_order_12_21 = false;
    let mut reference_override: Option<f64> = None;
    let mut in_network_data = false;
    let mut ended = false;
    let mut data_lines: Vec<DataLine> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('!') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if ended {
            return Err(Error::MalformedRecord {
                line: line_no,
                reason: "data after [End]".into(),
            });
        }
        if let Some(rest) = line.strip_prefix('#') {
            if options.is_some() {
                return Err(Error::MalformedRecord {
                    line: line_no,
                    reason: "multiple option lines".into(),
                });
            }
            options = Some(parse_option_line(rest, line_no)?);
            continue;
        }
        if line.starts_with('[') {
            let lower = line.to_ascii_lowercase();
            let (keyword, arg) = match lower.find(']') {
                Some(pos) => (lower[1..pos].trim().to_string(), lower[pos + 1..].trim().to_string()),
                None => {
                    return Err(Error::MalformedRecord {
                        line: line_no,
                        reason: "unterminated keyword".into(),
                    })
                }
            };
            match keyword.as_str() {
                "version" => {
                    version = TouchstoneVersion::V2;
                }
                "number of ports" => {
                    let n: usize = arg.parse().map_err(|_| Error::MalformedRecord {
                        line: line_no,
                        reason: format!("bad port count {arg:?}"),
                    })?;
                    ports_keyword = Some(n);
                }
                "number of frequencies" => {
                    let n: usize = arg.parse().map_err(|_| Error::MalformedRecord {
                        line: line_no,
                        reason: format!("bad frequency count {arg:?}"),
                    })?;
                    num_freqs = Some(n);
                }
                "two-port data order" => match arg.as_str() {
                    "12_21" => two_port_order_12_21 = true,
                    "21_12" => two_port_order_12_21 = false,
                    other => {
                        return Err(Error::MalformedRecord {
                            line: line_no,
                            reason: format!("bad two-port data order {other:?}"),
                        })
                    }
                },
                "matrix format" => {
                    if arg != "full" {
                        return Err(Error::Unsupported(format!(
                            "matrix format {arg:?} (only Full is handled)"
                        )));
                    }
                }
                "reference" => {
                    let vals: Vec<f64> = arg
                        .split_whitespace()
                        .map(|t| t.parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| Error::MalformedRecord {
                            line: line_no,
                            reason: "bad [Reference] values".into(),
                        })?;
                    if vals.is_empty() {
                        return Err(Error::MalformedRecord {
                            line: line_no,
                            reason: "empty [Reference]".into(),
                        });
                    }
                    if vals.windows(2).any(|w| w[0] != w[1]) {
                        return Err(Error::Unsupported(
                            "per-port reference impedances differ".into(),
                        ));
                    }
                    reference_override = Some(vals[0]);
                }
                "network data" => {
                    in_network_data = true;
                }
                "noise data" => {
                    return Err(Error::Unsupported("noise parameter section".into()));
                }
                "mixed-mode order" => {
                    return Err(Error::Unsupported("mixed-mode data blocks".into()));
                }
                "end" => {
                    ended = true;
                }
                // Tolerated informational keywords.
                "begin information" | "end information" => {}
                other => {
                    return Err(Error::Unsupported(format!("keyword [{other}]")));
                }
            }
            continue;
        }
        if version == TouchstoneVersion::V2 && !in_network_data {
            // V2 information block content outside [Network Data].
            continue;
        }
        data_lines.push(DataLine {
            line_no,
            tokens: line.split_whitespace().collect(),
        });
    }

    let mut options = options.unwrap_or_default();
    options.version = version;
    if let Some(r) = reference_override {
        options.reference_impedance = r;
    }
    if let Some(ov) = overrides {
        options.frequency_unit = ov.frequency_unit;
        options.data_format = ov.data_format;
        options.reference_impedance = ov.reference_impedance;
    }
    options.validate()?;

    if data_lines.is_empty() {
        return Err(Error::MalformedRecord {
            line: text.lines().count(),
            reason: "no data records".into(),
        });
    }

    let ports = match ports_keyword {
        Some(n) => n,
        None => detect_v1_ports(&data_lines)?,
    };
    if ports != 2 && ports != 4 {
        return Err(Error::UnsupportedPortCount { ports });
    }

    // V1 2-port noise sections start with 5-value lines.
    if ports == 2 && version == TouchstoneVersion::V1 {
        if let Some(l) = data_lines.iter().find(|l| l.tokens.len() == 5) {
            let _ = l;
            return Err(Error::Unsupported("noise parameter section".into()));
        }
    }

    // Flatten tokens, keeping a line number per token for error context.
    let mut stream: Vec<(usize, &str)> = Vec::new();
    for l in &data_lines {
        for t in &l.tokens {
            stream.push((l.line_no, t));
        }
    }

    let values_per_point = 2 * ports * ports;
    let mut freqs_hz = Vec::new();
    let mut points = Vec::new();
    let mut pos = 0usize;
    while pos < stream.len() {
        let (f_line, f_tok) = stream[pos];
        let f = parse_number(f_tok, f_line)?;
        let f_hz = f * options.frequency_unit.multiplier();
        if !f_hz.is_finite() {
            return Err(Error::NumericOverflow {
                line: f_line,
                token: f_tok.to_string(),
            });
        }
        if f_hz < 0.0 {
            return Err(Error::MalformedRecord {
                line: f_line,
                reason: format!("negative frequency {f_tok}"),
            });
        }
        pos += 1;
        if pos + values_per_point > stream.len() {
            let (last_line, _) = *stream.last().unwrap();
            return Err(Error::MalformedRecord {
                line: last_line,
                reason: format!(
                    "truncated data: expected {} values for the point at {} {}",
                    values_per_point,
                    f,
                    options.frequency_unit.keyword()
                ),
            });
        }
        let mut vals = Vec::with_capacity(ports * ports);
        for _ in 0..(ports * ports) {
            let (la, ta) = stream[pos];
            let (lb, tb) = stream[pos + 1];
            let a = parse_number(ta, la)?;
            let b = parse_number(tb, lb)?;
            let v = options.data_format.decode(a, b);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NumericOverflow {
                    line: la,
                    token: format!("{ta} {tb}"),
                });
            }
            vals.push(v);
            pos += 2;
        }
        if ports == 2 && (version == TouchstoneVersion::V1 || !two_port_order_12_21) {
            // File order S11 S21 S12 S22; internal order is row-major.
            vals.swap(1, 2);
        }
        if let Some(&prev) = freqs_hz.last() {
            if f_hz <= prev {
                return Err(Error::NonAscendingFrequency {
                    index: freqs_hz.len(),
                    prev,
                    next: f_hz,
                });
            }
        }
        freqs_hz.push(f_hz);
        points.push(vals);
    }

    if let Some(n) = num_freqs {
        if n != freqs_hz.len() {
            return Err(Error::MalformedRecord {
                line: 0,
                reason: format!(
                    "[Number of Frequencies] says {n} but {} points were read",
                    freqs_hz.len()
                ),
            });
        }
    }

    Ok(RawTouchstone {
        options,
        ports,
        freqs_hz,
        points,
    })
}

fn parse_number(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token.parse().map_err(|_| Error::MalformedRecord {
        line,
        reason: format!("expected a number, found {token:?}"),
    })?;
    if v.is_nan() {
        return Err(Error::NumericOverflow {
            line,
            token: token.to_string(),
        });
    }
    Ok(v)
}

fn parse_option_line(rest: &str, line_no: usize) -> Result<TouchstoneOptions> {
    let mut opts = TouchstoneOptions::default();
    let tokens: Vec<&str> = rest.split_whitespace().collect();
    let mut i = 0;
    while i < tokens.len() {
        let t = tokens[i];
        if let Some(u) = FrequencyUnit::parse(t) {
            opts.frequency_unit = u;
        } else if let Some(f) = DataFormat::parse(t) {
            opts.data_format = f;
        } else if t.eq_ignore_ascii_case("s") {
            // parameter type S: the only one handled
        } else if matches!(t.to_ascii_lowercase().as_str(), "y" | "z" | "h" | "g") {
            return Err(Error::Unsupported(format!(
                "parameter type {} (only S-parameters are handled)",
                t.to_ascii_uppercase()
            )));
        } else if t.eq_ignore_ascii_case("r") {
            i += 1;
            let val = tokens.get(i).ok_or(Error::MalformedRecord {
                line: line_no,
                reason: "option line R without a value".into(),
            })?;
            opts.reference_impedance = parse_number(val, line_no)?;
        } else {
            return Err(Error::MalformedRecord {
                line: line_no,
                reason: format!("unrecognized option token {t:?}"),
            });
        }
        i += 1;
    }
    Ok(opts)
}

/// Infer the port count of V1 data from the line shapes.
///
/// A 2-port point is one 9-token line; a 4-port point is a 9-token line
/// followed by three 8-token continuation lines.
fn detect_v1_ports(lines: &[DataLine]) -> Result<usize> {
    let first = &lines[0];
    let t0 = first.tokens.len();
    if t0 == 9 {
        match lines.get(1).map(|l| l.tokens.len()) {
            Some(8) => return Ok(4),
            _ => return Ok(2),
        }
    }
    // Single-line full-matrix points (1 + 2n^2 tokens).
    for n in [1usize, 2, 3, 4, 5, 6] {
        if t0 == 1 + 2 * n * n {
            return Ok(n);
        }
    }
    // Wrapped rows of n complex values (1 + 2n tokens on the first line).
    if t0 >= 3 && t0 % 2 == 1 {
        return Ok((t0 - 1) / 2);
    }
    Err(Error::MalformedRecord {
        line: first.line_no,
        reason: format!("cannot infer port count from a {t0}-token line"),
    })
}

fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn push_pair(out: &mut String, fmt: DataFormat, v: Complex64) {
    let (a, b) = fmt.encode(v);
    out.push(' ');
    out.push_str(&format_value(a));
    out.push(' ');
    out.push_str(&format_value(b));
}

/// Write a 4-port network in the requested options.
///
/// Formatting is deterministic: 17 significant digits everywhere, V1 row
/// wrapping for the 4-port data, one record block per frequency point.
pub fn write_touchstone(net: &SingleEndedNetwork, options: &TouchstoneOptions) -> Result<String> {
    options.validate()?;
    let mut out = String::new();
    if options.version == TouchstoneVersion::V2 {
        out.push_str("[Version] 2.0\n");
    }
    out.push_str(&format!(
        "# {} S {} R {}\n",
        options.frequency_unit.keyword(),
        options.data_format.keyword(),
        options.reference_impedance
    ));
    if options.version == TouchstoneVersion::V2 {
        out.push_str("[Number of Ports] 4\n");
        out.push_str(&format!("[Number of Frequencies] {}\n", net.grid().len()));
        let z = options.reference_impedance;
        out.push_str(&format!("[Reference] {z} {z} {z} {z}\n"));
        out.push_str("[Matrix Format] Full\n");
        out.push_str("[Network Data]\n");
    }
    let unit = options.frequency_unit.multiplier();
    for (k, &f) in net.grid().iter().enumerate() {
        for row in 0..4 {
            if row == 0 {
                out.push_str(&format_value(f / unit));
            } else {
                out.push_str("    ");
            }
            for col in 0..4 {
                push_pair(&mut out, options.data_format, net.matrices()[k][row][col]);
            }
            out.push('\n');
        }
    }
    if options.version == TouchstoneVersion::V2 {
        out.push_str("[End]\n");
    }
    Ok(out)
}

/// Write a 2-port network (V1 order S11 S21 S12 S22 on one line per point).
pub fn write_touchstone_two_port(
    net: &TwoPortNetwork,
    options: &TouchstoneOptions,
) -> Result<String> {
    options.validate()?;
    let mut out = String::new();
    if options.version == TouchstoneVersion::V2 {
        out.push_str("[Version] 2.0\n");
    }
    out.push_str(&format!(
        "# {} S {} R {}\n",
        options.frequency_unit.keyword(),
        options.data_format.keyword(),
        options.reference_impedance
    ));
    if options.version == TouchstoneVersion::V2 {
        out.push_str("[Number of Ports] 2\n");
        out.push_str("[Two-Port Data Order] 21_12\n");
        out.push_str(&format!("[Number of Frequencies] {}\n", net.grid().len()));
        let z = options.reference_impedance;
        out.push_str(&format!("[Reference] {z} {z}\n"));
        out.push_str("[Matrix Format] Full\n");
        out.push_str("[Network Data]\n");
    }
    let unit = options.frequency_unit.multiplier();
    for (k, &f) in net.grid().iter().enumerate() {
        out.push_str(&format_value(f / unit));
        let m = &net.matrices()[k];
        for (i, j) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            push_pair(&mut out, options.data_format, m[i][j]);
        }
        out.push('\n');
    }
    if options.version == TouchstoneVersion::V2 {
        out.push_str("[End]\n");
    }
    Ok(out)
}
