//! Experiment configuration files.
//!
//! Plain `key = value` lines grouped under `[section]` headers, `#` starts a
//! comment. A key may also be written fully qualified (`beam.energy = 22 keV`)
//! outside any section. Physical values carry a unit suffix. Every key can be
//! overridden by an environment variable `XPDC_<SECTION>_<KEY>` in upper case,
//! e.g. `XPDC_CRYSTAL_DETUNING=20mdeg`.
//!
//! ```text
//! [crystal]
//! lattice_constant = 3.5668 A
//! reflection = 6 6 0
//! detuning = 10 mdeg
//!
//! [detectors]
//! distance1 = 1351 mm
//! distance2 = 1560 mm
//! area = 50 mm2
//!
//! [run]
//! duration = 0.5 h
//! seed = 7
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::fnv1a64;
use super::units::{parse_quantity, Dimension};
use crate::analysis::{CoincidenceCriteria, RoiSpec};
use crate::error::{Error, Result};
use crate::physics::EfficiencyModel;
use crate::sim::{BeamCurrentProfile, DetectorSources, Experiment, RunConfig, SpectralLine};

pub const ENV_PREFIX: &str = "XPDC_";

/// (key, may repeat)
const KEYS: &[(&str, bool)] = &[
    ("crystal.lattice_constant", false),
    ("crystal.reflection", false),
    ("crystal.detuning", false),
    ("crystal.rate_scale", false),
    ("beam.energy", false),
    ("beam.bandwidth", false),
    ("beam.incident_rate", false),
    ("beam.polarization_angle", false),
    ("detectors.distance1", false),
    ("detectors.distance2", false),
    ("detectors.area", false),
    ("detectors.area1", false),
    ("detectors.area2", false),
    ("detectors.offset1", false),
    ("detectors.offset2", false),
    ("detectors.aim_detuning", false),
    ("detectors.in_plane", false),
    ("source.pair_rate", false),
    ("source.split_min", false),
    ("source.split_max", false),
    ("source.background", false),
    ("source.fluorescence", true),
    ("source.fluorescence1", true),
    ("source.fluorescence2", true),
    ("source.compton", false),
    ("source.compton1", false),
    ("source.compton2", false),
    ("source.elastic", false),
    ("source.elastic1", false),
    ("source.elastic2", false),
    ("response.energy_resolution", false),
    ("response.time_jitter", false),
    ("response.clock_tick", false),
    ("response.energy_min", false),
    ("response.energy_max", false),
    ("response.dead_time", false),
    ("efficiency.model", false),
    ("efficiency.pair", false),
    ("efficiency.table", false),
    ("run.duration", false),
    ("run.seed", false),
    ("run.beam_current", false),
    ("analysis.single_min", false),
    ("analysis.single_max", false),
    ("analysis.sum_center", false),
    ("analysis.sum_halfwidth", false),
    ("analysis.max_dt", false),
    ("analysis.dt_bin", false),
    ("analysis.e_bin", false),
    ("analysis.exclusive", false),
    ("analysis.roi_center", false),
    ("analysis.roi_halfwidth", false),
    ("analysis.roi_sigmas", false),
    ("analysis.sideband_sigmas", false),
    ("analysis.sigma_t", false),
];

fn env_name(key: &str) -> String {
    format!("{ENV_PREFIX}{}", key.replace('.', "_").to_uppercase())
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    /// Line in the file, or `None` for environment overrides.
    line: Option<usize>,
}

/// Raw, validated-for-syntax contents of a configuration file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfigFile {
    path: String,
    entries: BTreeMap<&'static str, Vec<Entry>>,
}

impl ConfigFile {
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let mut file = ConfigFile {
            path: path.into(),
            entries: BTreeMap::new(),
        };
        let mut section: Option<String> = None;
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let err = |msg: String| Error::ConfigFile {
                path: path.into(),
                line: line_no,
                msg,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(format!("malformed section header {line:?}")))?
                    .trim();
                if !KEYS.iter().any(|(k, _)| k.split('.').next() == Some(name)) {
                    return Err(err(format!("unknown section [{name}]")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got {line:?}")))?;
            let (k, v) = (k.trim(), v.trim());
            let full = match (&section, k.contains('.')) {
                (_, true) => k.to_string(),
                (Some(s), false) => format!("{s}.{k}"),
                (None, false) => return Err(err(format!("key {k:?} outside any section"))),
            };
            let &(key, repeat) = KEYS
                .iter()
                .find(|(name, _)| *name == full)
                .ok_or_else(|| err(format!("unknown key {full:?}")))?;
            let slot = file.entries.entry(key).or_default();
            if !repeat && !slot.is_empty() {
                return Err(err(format!("duplicate key {full:?}")));
            }
            slot.push(Entry {
                value: v.to_string(),
                line: Some(line_no),
            });
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Applies `XPDC_*` overrides. An override replaces every value of its
    /// key; variables with the prefix that match no key are an error.
    pub fn apply_env<I, K, V>(&mut self, vars: I) -> Result<()>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        for (name, value) in vars {
            let name = name.as_ref();
            if !name.starts_with(ENV_PREFIX) {
                continue;
            }
            let &(key, _) = KEYS
                .iter()
                .find(|(k, _)| env_name(k) == name)
                .ok_or_else(|| {
                    Error::Config(format!("environment variable {name} matches no config key"))
                })?;
            self.entries.insert(
                key,
                vec![Entry {
                    value: value.as_ref().trim().to_string(),
                    line: None,
                }],
            );
        }
        Ok(())
    }

    fn err(&self, entry: &Entry, key: &str, msg: impl std::fmt::Display) -> Error {
        match entry.line {
            Some(line) => Error::ConfigFile {
                path: self.path.clone().into(),
                line,
                msg: format!("{key}: {msg}"),
            },
            None => Error::Config(format!("{}: {msg}", env_name(key))),
        }
    }

    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key).and_then(|v| v.last())
    }

    fn all(&self, key: &str) -> &[Entry] {
        self.entries.get(key).map_or(&[], |v| v.as_slice())
    }

    fn with<T>(&self, key: &str, f: impl FnOnce(&str) -> Result<T>) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(e) => f(&e.value)
                .map(Some)
                .map_err(|err| self.err(e, key, strip(err))),
        }
    }

    fn quantity(&self, key: &str, dim: Dimension) -> Result<Option<f64>> {
        self.with(key, |v| parse_quantity(v, dim))
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        self.with(key, parse_number)
    }

    fn flag(&self, key: &str) -> Result<Option<bool>> {
        self.with(key, |v| match v {
            "true" | "yes" | "on" => Ok(true),
            "false" | "no" | "off" => Ok(false),
            _ => Err(Error::Config(format!("expected true or false, got {v:?}"))),
        })
    }

    fn ns(&self, key: &str) -> Result<Option<i64>> {
        self.with(key, |v| {
            let ns = parse_quantity(v, Dimension::Time)? * 1e9;
            let rounded = ns.round();
            if (ns - rounded).abs() > 1e-6 {
                return Err(Error::Config(format!("{v:?} is not a whole number of ns")));
            }
            Ok(rounded as i64)
        })
    }
}

fn strip(err: Error) -> String {
    match err {
        Error::Config(msg) => msg,
        other => other.to_string(),
    }
}

fn parse_number(v: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Config(format!("expected a number, got {v:?}")))
}

/// `"<center>, <fwhm>, <rate>"`
fn parse_line(v: &str) -> Result<SpectralLine> {
    let parts: Vec<_> = v.split(',').map(str::trim).collect();
    let [center, fwhm, rate] = parts.as_slice() else {
        return Err(Error::Config(format!(
            "expected `center, fwhm, rate`, got {v:?}"
        )));
    };
    Ok(SpectralLine::new(
        parse_quantity(center, Dimension::Energy)?,
        parse_quantity(fwhm, Dimension::Energy)?,
        parse_quantity(rate, Dimension::Rate)?,
    ))
}

/// `none` or `"<fwhm>, <rate>"`; the centre comes from `center`.
fn parse_peak(v: &str, center: f64) -> Result<Option<SpectralLine>> {
    if v == "none" {
        return Ok(None);
    }
    let parts: Vec<_> = v.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [fwhm, rate] => Ok(Some(SpectralLine::new(
            center,
            parse_quantity(fwhm, Dimension::Energy)?,
            parse_quantity(rate, Dimension::Rate)?,
        ))),
        [c, fwhm, rate] => Ok(Some(SpectralLine::new(
            parse_quantity(c, Dimension::Energy)?,
            parse_quantity(fwhm, Dimension::Energy)?,
            parse_quantity(rate, Dimension::Rate)?,
        ))),
        _ => Err(Error::Config(format!(
            "expected `fwhm, rate` or `none`, got {v:?}"
        ))),
    }
}

/// `"<x> <unit>: <y>, ..."` pairs.
fn parse_pairs(v: &str, x_dim: Dimension) -> Result<Vec<(f64, f64)>> {
    v.split(',')
        .map(|item| {
            let (x, y) = item
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("expected `value: number`, got {item:?}")))?;
            Ok((parse_quantity(x, x_dim)?, parse_number(y.trim())?))
        })
        .collect()
}

/// How a detector's angular position is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Placement {
    /// On the degenerate ring for the aim detuning.
    Auto,
    /// Fixed offset from the diffracted beam, radians.
    Fixed(f64),
}

/// A run configuration plus the analysis settings that go with it.
#[derive(Debug, Clone, PartialEq)]
pub struct XpdcConfig {
    pub run: RunConfig,
    pub placement: [Placement; 2],
    /// Detuning the detectors are aimed for; `None` follows the crystal.
    pub aim_detuning: Option<f64>,
    pub criteria: CoincidenceCriteria,
    pub roi: RoiSpec,
    /// Take σ_t for the ROI from a fit of the time profile instead of
    /// `roi.sigma_t`.
    pub fit_sigma_t: bool,
}

impl Default for XpdcConfig {
    fn default() -> Self {
        XpdcConfig {
            run: RunConfig::new(Experiment::reference(), 1_800.0, 0),
            placement: [Placement::Auto; 2],
            aim_detuning: None,
            criteria: CoincidenceCriteria::default(),
            roi: RoiSpec::default(),
            fit_sigma_t: false,
        }
    }
}

impl XpdcConfig {
    /// Defaults overridden by the file and then by the environment.
    pub fn load<I, K, V>(path: Option<&Path>, env: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut file = match path {
            Some(p) => ConfigFile::read(p)?,
            None => ConfigFile::default(),
        };
        file.apply_env(env)?;
        Self::from_file(&file)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_file(&ConfigFile::parse(text, "<string>")?)
    }

    pub fn from_file(f: &ConfigFile) -> Result<Self> {
        let mut cfg = XpdcConfig::default();
        let ex = &mut cfg.run.experiment;

        if let Some(v) = f.quantity("crystal.lattice_constant", Dimension::LatticeLength)? {
            ex.crystal.lattice_constant = v;
        }
        if let Some(v) = f.with("crystal.reflection", |v| {
            let idx: Vec<i32> = v
                .split_whitespace()
                .map(|s| {
                    s.parse()
                        .map_err(|_| Error::Config(format!("bad Miller index {s:?}")))
                })
                .collect::<Result<_>>()?;
            <[i32; 3]>::try_from(idx)
                .map_err(|_| Error::Config(format!("expected three Miller indices, got {v:?}")))
        })? {
            ex.crystal.reflection = v;
        }
        if let Some(v) = f.quantity("crystal.detuning", Dimension::Angle)? {
            ex.crystal.detuning = v;
        }
        if let Some(v) = f.number("crystal.rate_scale")? {
            ex.crystal.effective_rate_scale = v;
        }

        if let Some(v) = f.quantity("beam.energy", Dimension::Energy)? {
            ex.beam.pump_energy = v;
        }
        if let Some(v) = f.quantity("beam.bandwidth", Dimension::Energy)? {
            ex.beam.bandwidth_fwhm = v;
        }
        if let Some(v) = f.quantity("beam.incident_rate", Dimension::Rate)? {
            ex.beam.incident_rate = v;
        }
        if let Some(v) = f.quantity("beam.polarization_angle", Dimension::Angle)? {
            ex.beam.polarization_angle = v;
        }

        for (i, det) in ex.detectors.iter_mut().enumerate() {
            let n = i + 1;
            if let Some(v) = f.quantity(&format!("detectors.distance{n}"), Dimension::Length)? {
                det.distance = v;
            }
            let area = f.quantity(&format!("detectors.area{n}"), Dimension::Area)?;
            if let Some(v) = area.or(f.quantity("detectors.area", Dimension::Area)?) {
                det.active_area = v;
            }
            if let Some(v) = f.flag("detectors.in_plane")? {
                det.in_plane = v;
            }
            if let Some(p) = f.with(&format!("detectors.offset{n}"), |v| match v {
                "auto" => Ok(Placement::Auto),
                _ => parse_quantity(v, Dimension::Angle).map(Placement::Fixed),
            })? {
                cfg.placement[i] = p;
            }
        }
        cfg.aim_detuning = f.quantity("detectors.aim_detuning", Dimension::Angle)?;

        let src = &mut ex.source;
        if let Some(v) = f.quantity("source.pair_rate", Dimension::Rate)? {
            src.true_pair_rate = v;
        }
        if let Some(v) = f.number("source.split_min")? {
            src.split_window.0 = v;
        }
        if let Some(v) = f.number("source.split_max")? {
            src.split_window.1 = v;
        }
        if let Some(bg) = f.with("source.background", |v| match v {
            "typical" => Ok(DetectorSources::typical()),
            "none" => Ok(DetectorSources::default()),
            _ => Err(Error::Config(format!(
                "expected typical or none, got {v:?}"
            ))),
        })? {
            src.detectors = [bg.clone(), bg];
        }
        let pump = ex.beam.pump_energy;
        for (i, det) in src.detectors.iter_mut().enumerate() {
            let n = i + 1;
            let specific = format!("source.fluorescence{n}");
            let entries = match f.all(&specific) {
                [] => f.all("source.fluorescence"),
                e => e,
            };
            if !entries.is_empty() {
                let key = if f.all(&specific).is_empty() {
                    "source.fluorescence"
                } else {
                    &specific
                };
                det.fluorescence = entries
                    .iter()
                    .filter(|e| e.value != "none")
                    .map(|e| parse_line(&e.value).map_err(|err| f.err(e, key, strip(err))))
                    .collect::<Result<_>>()?;
            }
            let compton_center = det.compton.as_ref().map_or(21_180.0, |c| c.center);
            for key in [format!("source.compton{n}"), "source.compton".to_string()] {
                if let Some(v) = f.with(&key, |v| parse_peak(v, compton_center))? {
                    det.compton = v;
                    break;
                }
            }
            for key in [format!("source.elastic{n}"), "source.elastic".to_string()] {
                if let Some(v) = f.with(&key, |v| parse_peak(v, pump))? {
                    det.elastic = v;
                    break;
                }
            }
        }

        let resp = &mut ex.response;
        if let Some(v) = f.quantity("response.energy_resolution", Dimension::Energy)? {
            resp.energy_resolution_fwhm = v;
        }
        if let Some(v) = f.quantity("response.time_jitter", Dimension::Time)? {
            resp.time_jitter_sigma = v * 1e9;
        }
        if let Some(v) = f.ns("response.clock_tick")? {
            if v < 1 {
                return Err(Error::Config(
                    "response.clock_tick must be at least 1 ns".into(),
                ));
            }
            resp.clock_tick = v as u64;
        }
        if let Some(v) = f.quantity("response.energy_min", Dimension::Energy)? {
            resp.energy_range.0 = v;
        }
        if let Some(v) = f.quantity("response.energy_max", Dimension::Energy)? {
            resp.energy_range.1 = v;
        }
        if let Some(v) = f.with("response.dead_time", |v| match v {
            "off" | "none" => Ok(None),
            _ => parse_quantity(v, Dimension::Time).map(|t| Some(t * 1e9)),
        })? {
            resp.dead_time = v;
        }

        let model = f.with("efficiency.model", |v| match v {
            "ideal" | "constant" | "table" => Ok(v.to_string()),
            _ => Err(Error::Config(format!(
                "expected ideal, constant or table, got {v:?}"
            ))),
        })?;
        let pair = f.number("efficiency.pair")?;
        let table = f.with("efficiency.table", |v| parse_pairs(v, Dimension::Energy))?;
        ex.efficiency = match (model.as_deref(), pair, table) {
            (Some("ideal"), None, None) => EfficiencyModel::Ideal,
            (Some("table") | None, None, Some(points)) => EfficiencyModel::Table { points },
            (Some("constant") | None, Some(pair), None) => EfficiencyModel::Constant { pair },
            (Some("constant") | None, None, None) => EfficiencyModel::default(),
            (Some("table"), _, None) => {
                return Err(Error::Config("efficiency.model = table needs efficiency.table".into()))
            }
            _ => {
                return Err(Error::Config(
                    "efficiency.pair and efficiency.table conflict with each other or with efficiency.model".into(),
                ))
            }
        };

        if let Some(v) = f.quantity("run.duration", Dimension::Time)? {
            cfg.run.duration = v;
        }
        if let Some(v) = f.with("run.seed", |v| {
            v.parse::<u64>()
                .map_err(|_| Error::Config(format!("expected an unsigned integer, got {v:?}")))
        })? {
            cfg.run.seed = v;
        }
        if let Some(points) = f.with("run.beam_current", |v| parse_pairs(v, Dimension::Time))? {
            cfg.run.beam_current = BeamCurrentProfile::new(points)?;
        }

        let c = &mut cfg.criteria;
        c.sum_center = pump;
        if let Some(v) = f.quantity("analysis.single_min", Dimension::Energy)? {
            c.single_window.0 = v;
        }
        if let Some(v) = f.quantity("analysis.single_max", Dimension::Energy)? {
            c.single_window.1 = v;
        }
        if let Some(v) = f.quantity("analysis.sum_center", Dimension::Energy)? {
            c.sum_center = v;
        }
        if let Some(v) = f.quantity("analysis.sum_halfwidth", Dimension::Energy)? {
            c.sum_halfwidth = v;
        }
        if let Some(v) = f.ns("analysis.max_dt")? {
            c.max_abs_dt = v;
        }
        if let Some(v) = f.ns("analysis.dt_bin")? {
            c.dt_bin = v;
        }
        if let Some(v) = f.quantity("analysis.e_bin", Dimension::Energy)? {
            c.e_bin = v;
        }
        if let Some(v) = f.flag("analysis.exclusive")? {
            c.exclusive = v;
        }
        let r = &mut cfg.roi;
        r.energy_center = pump / 2.0;
        if let Some(v) = f.quantity("analysis.roi_center", Dimension::Energy)? {
            r.energy_center = v;
        }
        if let Some(v) = f.quantity("analysis.roi_halfwidth", Dimension::Energy)? {
            r.energy_halfwidth = v;
        }
        if let Some(v) = f.number("analysis.roi_sigmas")? {
            r.roi_sigmas = v;
        }
        if let Some(v) = f.number("analysis.sideband_sigmas")? {
            r.sideband_sigmas = v;
        }
        if let Some(v) = f.with("analysis.sigma_t", |v| match v {
            "fit" => Ok(None),
            _ => parse_quantity(v, Dimension::Time).map(|t| Some(t * 1e9)),
        })? {
            match v {
                Some(s) => r.sigma_t = s,
                None => cfg.fit_sigma_t = true,
            }
        }

        cfg.apply_placement()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.run.validate()?;
        self.criteria.validate()?;
        if !(self.roi.energy_halfwidth > 0.0
            && self.roi.sigma_t > 0.0
            && self.roi.roi_sigmas > 0.0
            && self.roi.sideband_sigmas >= self.roi.roi_sigmas)
        {
            return Err(Error::Config(
                "ROI needs positive widths and sideband_sigmas ≥ roi_sigmas".into(),
            ));
        }
        Ok(())
    }

    /// Recomputes detector offsets for `Auto` placement.
    fn apply_placement(&mut self) -> Result<()> {
        let ex = &mut self.run.experiment;
        if self.placement.contains(&Placement::Auto) {
            let aim = self.aim_detuning.unwrap_or(ex.crystal.detuning);
            if !(aim > 0.0) {
                return Err(Error::Config(format!(
                    "cannot aim detectors for detuning {aim} rad; set detectors.aim_detuning or fixed offsets"
                )));
            }
            ex.aim_detectors(aim)?;
        }
        for (det, p) in ex.detectors.iter_mut().zip(self.placement) {
            if let Placement::Fixed(off) = p {
                det.center_angle_offset = off;
            }
        }
        Ok(())
    }

    /// Same configuration with the crystal at `detuning` (radians), the
    /// detectors re-aimed unless the aim is pinned.
    pub fn with_detuning(&self, detuning: f64) -> Result<Self> {
        let mut cfg = self.clone();
        cfg.run.experiment.crystal.detuning = detuning;
        cfg.apply_placement()?;
        Ok(cfg)
    }
}

/// Stable text rendering of every field that influences a simulation. Floats
/// are written in shortest round-trip form.
pub fn canonical_text(config: &RunConfig) -> String {
    let ex = &config.experiment;
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k}={v}");
    };
    kv("format", "xpdc-run-1".into());
    kv("run.duration", format!("{:?}", config.duration));
    kv("run.seed", config.seed.to_string());
    kv(
        "run.beam_current",
        format!("{:?}", config.beam_current.knots()),
    );
    let c = &ex.crystal;
    kv(
        "crystal.lattice_constant",
        format!("{:?}", c.lattice_constant),
    );
    kv("crystal.reflection", format!("{:?}", c.reflection));
    kv("crystal.detuning", format!("{:?}", c.detuning));
    kv(
        "crystal.rate_scale",
        format!("{:?}", c.effective_rate_scale),
    );
    let b = &ex.beam;
    kv("beam.energy", format!("{:?}", b.pump_energy));
    kv("beam.bandwidth", format!("{:?}", b.bandwidth_fwhm));
    kv("beam.incident_rate", format!("{:?}", b.incident_rate));
    kv(
        "beam.polarization_angle",
        format!("{:?}", b.polarization_angle),
    );
    for (i, d) in ex.detectors.iter().enumerate() {
        let n = i + 1;
        kv(
            &format!("detector{n}.distance"),
            format!("{:?}", d.distance),
        );
        kv(&format!("detector{n}.area"), format!("{:?}", d.active_area));
        kv(
            &format!("detector{n}.offset"),
            format!("{:?}", d.center_angle_offset),
        );
        kv(&format!("detector{n}.in_plane"), d.in_plane.to_string());
    }
    let src = &ex.source;
    kv("source.pair_rate", format!("{:?}", src.true_pair_rate));
    kv("source.split_window", format!("{:?}", src.split_window));
    let line = |l: &SpectralLine| format!("({:?}, {:?}, {:?})", l.center, l.fwhm, l.rate);
    for (i, d) in src.detectors.iter().enumerate() {
        let n = i + 1;
        let fl: Vec<_> = d.fluorescence.iter().map(line).collect();
        kv(&format!("source{n}.fluorescence"), fl.join(" "));
        kv(
            &format!("source{n}.compton"),
            d.compton.as_ref().map_or("none".into(), line),
        );
        kv(
            &format!("source{n}.elastic"),
            d.elastic.as_ref().map_or("none".into(), line),
        );
    }
    let r = &ex.response;
    kv(
        "response.energy_resolution",
        format!("{:?}", r.energy_resolution_fwhm),
    );
    kv("response.time_jitter", format!("{:?}", r.time_jitter_sigma));
    kv("response.clock_tick", r.clock_tick.to_string());
    kv("response.energy_range", format!("{:?}", r.energy_range));
    kv("response.dead_time", format!("{:?}", r.dead_time));
    let eff = match &ex.efficiency {
        EfficiencyModel::Ideal => "ideal".to_string(),
        EfficiencyModel::Constant { pair } => format!("constant {pair:?}"),
        EfficiencyModel::Table { points } => format!("table {points:?}"),
    };
    kv("efficiency", eff);
    s
}

pub fn config_hash(config: &RunConfig) -> u64 {
    fnv1a64(canonical_text(config).as_bytes())
}
