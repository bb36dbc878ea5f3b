//! Run configuration: a flat text file of `[section]` headers and
//! `key = value` lines. `#` starts a comment.
//!
//! Dimensional values carry a mandatory unit suffix separated by whitespace
//! (`30e-9 m`, `200e3 eV`, `17 V`, `1e-5 rad`). Unknown sections, unknown keys
//! and repeated keys are errors.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

/// A diagnostic tied to a config field, printed as
/// `error: <field>: line N: <message>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, line: Option<usize>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "{}: line {n}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

type Res<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    /// Non-negative integer without unit.
    Count,
    /// Signed integer without unit.
    Int,
    /// Dimensionless real.
    Number,
    /// Real with one of the listed units.
    Quantity(&'static [&'static str]),
    /// Length in metres, or `none` for unbounded.
    LengthOrNone,
    Bool,
    Word(&'static [&'static str]),
    Path,
}

const M: &[&str] = &["m"];
const EV: &[&str] = &["eV"];
const V: &[&str] = &["V"];
const RAD: &[&str] = &["rad"];
const M_OR_RAD: &[&str] = &["m", "rad"];

const SCHEMA: &[(&str, &str, Kind)] = &[
    ("grid", "n", Kind::Count),
    ("grid", "pitch", Kind::Quantity(M)),
    ("beam", "energy", Kind::Quantity(EV)),
    ("beam", "rest_energy", Kind::Quantity(EV)),
    ("beam", "waist", Kind::LengthOrNone),
    ("hologram", "charge", Kind::Int),
    ("hologram", "period", Kind::Quantity(M)),
    ("hologram", "depth", Kind::Quantity(M)),
    ("hologram", "base", Kind::Quantity(M)),
    ("hologram", "v_mip", Kind::Quantity(V)),
    ("hologram", "aperture_radius", Kind::LengthOrNone),
    ("hologram", "dead_zone_radius", Kind::Quantity(M)),
    ("propagation", "mode", Kind::Word(&["fraunhofer", "fresnel"])),
    ("propagation", "z", Kind::Quantity(M)),
    ("propagation", "illuminate", Kind::Bool),
    ("analysis", "selection", Kind::Word(&["none", "disk", "half_plane"])),
    ("analysis", "order", Kind::Int),
    ("analysis", "selection_radius", Kind::Quantity(RAD)),
    ("analysis", "center", Kind::Word(&["centroid", "grid_center"])),
    ("analysis", "n_r", Kind::Count),
    ("analysis", "n_phi", Kind::Count),
    ("analysis", "r_max", Kind::Quantity(M_OR_RAD)),
    ("analysis", "threshold", Kind::Number),
    ("analysis", "profile_bins", Kind::Count),
    ("analysis", "enclosed_radius", Kind::Quantity(M_OR_RAD)),
    ("modal", "m", Kind::Int),
    ("modal", "p_max", Kind::Count),
    ("modal", "z", Kind::Quantity(M)),
    ("modal", "waist", Kind::Quantity(M)),
    ("modal", "r_min", Kind::Quantity(M)),
    ("modal", "r_max", Kind::Quantity(M)),
    ("modal", "n_points", Kind::Count),
    ("modal", "extent", Kind::Quantity(M)),
    ("render", "beam_stop", Kind::Bool),
    ("render", "beam_stop_radius", Kind::Quantity(RAD)),
    ("output", "dir", Kind::Path),
    ("output", "pgm_scale", Kind::Quantity(M)),
];

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Count(usize),
    Int(i64),
    Number(f64),
    Quantity(f64, &'static str),
    Unbounded,
    Bool(bool),
    Word(String),
    Path(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub unit: &'static str,
    pub line: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCfg {
    pub n: usize,
    pub pitch: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamCfg {
    pub energy: f64,
    pub rest_energy: Option<f64>,
    /// `None`: plane-wave illumination.
    pub waist: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HologramCfg {
    pub charge: i64,
    pub period: f64,
    pub depth: f64,
    pub base: f64,
    pub v_mip: f64,
    pub aperture_radius: f64,
    pub dead_zone_radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeCfg {
    Fraunhofer,
    Fresnel { z: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationCfg {
    pub mode: ModeCfg,
    pub illuminate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selection {
    None,
    Disk { radius: f64 },
    HalfPlane,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Center {
    Centroid,
    GridCenter,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisCfg {
    pub selection: Selection,
    pub order: i64,
    pub center: Center,
    pub n_r: usize,
    pub n_phi: usize,
    pub r_max: Option<Quantity>,
    pub threshold: f64,
    pub profile_bins: usize,
    pub enclosed_radius: Option<Quantity>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalCfg {
    pub m: i64,
    pub p_max: u64,
    pub z: f64,
    pub waist: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub n_points: usize,
    pub extent: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderCfg {
    /// Angular radius of the zero-order stop, if any.
    pub beam_stop: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputCfg {
    pub dir: PathBuf,
    pub pgm_scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    grid: Option<GridCfg>,
    beam: Option<BeamCfg>,
    hologram: Option<HologramCfg>,
    pub propagation: PropagationCfg,
    pub analysis: AnalysisCfg,
    modal: Option<ModalCfg>,
    pub render: RenderCfg,
    pub output: OutputCfg,
}

fn required(section: &str) -> ConfigError {
    ConfigError::new(section, None, "section required by this command")
}

impl RunConfig {
    pub fn grid(&self) -> Res<GridCfg> {
        self.grid.ok_or_else(|| required("grid"))
    }

    pub fn beam(&self) -> Res<BeamCfg> {
        self.beam.ok_or_else(|| required("beam"))
    }

    pub fn hologram(&self) -> Res<HologramCfg> {
        self.hologram.ok_or_else(|| required("hologram"))
    }

    pub fn modal(&self) -> Res<ModalCfg> {
        self.modal.ok_or_else(|| required("modal"))
    }

    pub fn has_modal(&self) -> bool {
        self.modal.is_some()
    }

    pub fn load(path: &Path) -> Res<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", None, format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Res<Self> {
        Doc::parse(text)?.build()
    }
}

struct Entry {
    value: Value,
    line: usize,
}

struct Doc {
    entries: BTreeMap<(String, String), Entry>,
    sections: BTreeMap<String, usize>,
}

fn parse_value(field: &str, line: usize, kind: Kind, raw: &str) -> Res<Value> {
    let err = |msg: String| ConfigError::new(field, Some(line), msg);
    let tokens: Vec<&str> = raw.split_whitespace().collect();
    let unitless = |what: &str| -> Res<&str> {
        match tokens.as_slice() {
            [v] => Ok(v),
            [_, u, ..] => Err(err(format!("unexpected unit suffix {u:?}: {what} is dimensionless"))),
            [] => Err(err("missing value".into())),
        }
    };
    let number = |s: &str| -> Res<f64> {
        let v: f64 = s.parse().map_err(|_| err(format!("{s:?} is not a number")))?;
        if !v.is_finite() {
            return Err(err(format!("{s:?} is not finite")));
        }
        Ok(v)
    };
    match kind {
        Kind::Count => {
            let s = unitless("a count")?;
            s.parse()
                .map(Value::Count)
                .map_err(|_| err(format!("{s:?} is not a non-negative integer")))
        }
        Kind::Int => {
            let s = unitless("an integer")?;
            s.parse().map(Value::Int).map_err(|_| err(format!("{s:?} is not an integer")))
        }
        Kind::Number => Ok(Value::Number(number(unitless("this value")?)?)),
        Kind::Bool => match unitless("a flag")? {
            "true" => Ok(Value::Bool(true)),
            "false" => Ok(Value::Bool(false)),
            s => Err(err(format!("{s:?} is not true or false"))),
        },
        Kind::Word(choices) => {
            let s = unitless("a keyword")?;
            if choices.contains(&s) {
                Ok(Value::Word(s.to_owned()))
            } else {
                Err(err(format!("{s:?} is not one of {}", choices.join(", "))))
            }
        }
        Kind::Path => {
            if raw.is_empty() {
                Err(err("missing value".into()))
            } else {
                Ok(Value::Path(PathBuf::from(raw)))
            }
        }
        Kind::LengthOrNone if tokens == ["none"] => Ok(Value::Unbounded),
        Kind::LengthOrNone => parse_value(field, line, Kind::Quantity(M), raw),
        Kind::Quantity(units) => {
            let expected = units.join(" or ");
            match tokens.as_slice() {
                [] => Err(err("missing value".into())),
                [_] => Err(err(format!("missing unit suffix, expected {expected}"))),
                [v, u] => match units.iter().find(|&&x| x == *u) {
                    Some(unit) => Ok(Value::Quantity(number(v)?, unit)),
                    None => Err(err(format!("unit {u:?} not accepted, expected {expected}"))),
                },
                _ => Err(err(format!("expected \"<number> {expected}\""))),
            }
        }
    }
}

impl Doc {
    fn parse(text: &str) -> Res<Self> {
        let mut entries: BTreeMap<(String, String), Entry> = BTreeMap::new();
        let mut sections = BTreeMap::new();
        let mut current: Option<String> = None;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .map(str::trim)
                    .ok_or_else(|| ConfigError::new("config", Some(line), "unterminated section header"))?;
                if !SCHEMA.iter().any(|(s, _, _)| *s == name) {
                    return Err(ConfigError::new(name, Some(line), "unknown section"));
                }
                if let Some(first) = sections.insert(name.to_owned(), line) {
                    return Err(ConfigError::new(
                        name,
                        Some(line),
                        format!("duplicate section (first opened on line {first})"),
                    ));
                }
                current = Some(name.to_owned());
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(a, b)| (a.trim(), b.trim()))
                .ok_or_else(|| ConfigError::new("config", Some(line), format!("expected key = value, got {content:?}")))?;
            let section = current
                .clone()
                .ok_or_else(|| ConfigError::new(key, Some(line), "key outside any section"))?;
            let field = format!("{section}.{key}");
            let kind = SCHEMA
                .iter()
                .find(|(s, k, _)| *s == section && *k == key)
                .map(|x| x.2)
                .ok_or_else(|| ConfigError::new(&field, Some(line), "unknown key"))?;
            let value = parse_value(&field, line, kind, value)?;
            let slot = (section, key.to_owned());
            if let Some(first) = entries.get(&slot) {
                return Err(ConfigError::new(
                    &field,
                    Some(line),
                    format!("duplicate key (first set on line {})", first.line),
                ));
            }
            entries.insert(slot, Entry { value, line });
        }
        Ok(Self { entries, sections })
    }

    fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entries.get(&(section.to_owned(), key.to_owned()))
    }

    fn has(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    fn missing(section: &str, key: &str) -> ConfigError {
        ConfigError::new(format!("{section}.{key}"), None, "missing required key")
    }

    fn count(&self, s: &str, k: &str) -> Option<(usize, usize)> {
        match self.get(s, k)? {
            Entry { value: Value::Count(v), line } => Some((*v, *line)),
            _ => unreachable!("schema kind"),
        }
    }

    fn int(&self, s: &str, k: &str) -> Option<(i64, usize)> {
        match self.get(s, k)? {
            Entry { value: Value::Int(v), line } => Some((*v, *line)),
            _ => unreachable!("schema kind"),
        }
    }

    fn number(&self, s: &str, k: &str) -> Option<(f64, usize)> {
        match self.get(s, k)? {
            Entry { value: Value::Number(v), line } => Some((*v, *line)),
            _ => unreachable!("schema kind"),
        }
    }

    fn quantity(&self, s: &str, k: &str) -> Option<Quantity> {
        match self.get(s, k)? {
            Entry { value: Value::Quantity(v, unit), line } => Some(Quantity {
                value: *v,
                unit,
                line: *line,
            }),
            _ => unreachable!("schema kind"),
        }
    }

    /// `Some(None)` for `none`.
    fn length_or_none(&self, s: &str, k: &str) -> Option<(Option<f64>, usize)> {
        match self.get(s, k)? {
            Entry { value: Value::Unbounded, line } => Some((None, *line)),
            Entry { value: Value::Quantity(v, _), line } => Some((Some(*v), *line)),
            _ => unreachable!("schema kind"),
        }
    }

    fn flag(&self, s: &str, k: &str) -> Option<bool> {
        match self.get(s, k)? {
            Entry { value: Value::Bool(v), .. } => Some(*v),
            _ => unreachable!("schema kind"),
        }
    }

    fn word(&self, s: &str, k: &str) -> Option<&str> {
        match self.get(s, k)? {
            Entry { value: Value::Word(v), .. } => Some(v),
            _ => unreachable!("schema kind"),
        }
    }

    fn path(&self, s: &str, k: &str) -> Option<PathBuf> {
        match self.get(s, k)? {
            Entry { value: Value::Path(v), .. } => Some(v.clone()),
            _ => unreachable!("schema kind"),
        }
    }

    fn require_quantity(&self, s: &str, k: &str) -> Res<Quantity> {
        self.quantity(s, k).ok_or_else(|| Self::missing(s, k))
    }

    fn build(&self) -> Res<RunConfig> {
        let grid = if self.has("grid") {
            let (n, line) = self.count("grid", "n").ok_or_else(|| Self::missing("grid", "n"))?;
            if n < 2 || n % 2 != 0 {
                return Err(ConfigError::new("grid.n", Some(line), "must be even and at least 2"));
            }
            let pitch = positive("grid.pitch", self.require_quantity("grid", "pitch")?)?;
            Some(GridCfg { n, pitch })
        } else {
            None
        };

        let beam = if self.has("beam") {
            let energy = positive("beam.energy", self.require_quantity("beam", "energy")?)?;
            let rest_energy = self
                .quantity("beam", "rest_energy")
                .map(|q| positive("beam.rest_energy", q))
                .transpose()?;
            let waist = match self.length_or_none("beam", "waist") {
                None | Some((None, _)) => None,
                Some((Some(w), line)) => Some(positive("beam.waist", Quantity { value: w, unit: "m", line })?),
            };
            Some(BeamCfg {
                energy,
                rest_energy,
                waist,
            })
        } else {
            None
        };

        let hologram = if self.has("hologram") {
            let (charge, _) = self
                .int("hologram", "charge")
                .ok_or_else(|| Self::missing("hologram", "charge"))?;
            let period = positive("hologram.period", self.require_quantity("hologram", "period")?)?;
            let depth = non_negative("hologram.depth", self.require_quantity("hologram", "depth")?)?;
            let base = self
                .quantity("hologram", "base")
                .map(|q| non_negative("hologram.base", q))
                .transpose()?
                .unwrap_or(0.0);
            let v_mip = self.require_quantity("hologram", "v_mip")?.value;
            let dead = self
                .quantity("hologram", "dead_zone_radius")
                .map(|q| non_negative("hologram.dead_zone_radius", q))
                .transpose()?
                .unwrap_or(0.0);
            let aperture = match self.length_or_none("hologram", "aperture_radius") {
                None | Some((None, _)) => f64::INFINITY,
                Some((Some(a), line)) => {
                    if !(a > dead) {
                        return Err(ConfigError::new(
                            "hologram.aperture_radius",
                            Some(line),
                            "must exceed hologram.dead_zone_radius",
                        ));
                    }
                    a
                }
            };
            Some(HologramCfg {
                charge,
                period,
                depth,
                base,
                v_mip,
                aperture_radius: aperture,
                dead_zone_radius: dead,
            })
        } else {
            None
        };

        let mode = match self.word("propagation", "mode").unwrap_or("fraunhofer") {
            "fresnel" => {
                let z = self.require_quantity("propagation", "z")?;
                if z.value == 0.0 {
                    return Err(ConfigError::new("propagation.z", Some(z.line), "must be non-zero"));
                }
                ModeCfg::Fresnel { z: z.value }
            }
            _ => {
                if let Some(z) = self.quantity("propagation", "z") {
                    return Err(ConfigError::new(
                        "propagation.z",
                        Some(z.line),
                        "only meaningful with mode = fresnel",
                    ));
                }
                ModeCfg::Fraunhofer
            }
        };
        let propagation = PropagationCfg {
            mode,
            illuminate: self.flag("propagation", "illuminate").unwrap_or(true),
        };

        let selection = match self.word("analysis", "selection").unwrap_or("none") {
            "disk" => Selection::Disk {
                radius: positive(
                    "analysis.selection_radius",
                    self.require_quantity("analysis", "selection_radius")?,
                )?,
            },
            "half_plane" => Selection::HalfPlane,
            _ => Selection::None,
        };
        let count_at_least = |k: &str, default: usize, min: usize| -> Res<usize> {
            match self.count("analysis", k) {
                None => Ok(default),
                Some((v, line)) if v < min => Err(ConfigError::new(
                    format!("analysis.{k}"),
                    Some(line),
                    format!("must be at least {min}"),
                )),
                Some((v, _)) => Ok(v),
            }
        };
        let n_phi = count_at_least("n_phi", 1024, 2)?;
        if !n_phi.is_power_of_two() {
            let line = self.count("analysis", "n_phi").map(|x| x.1);
            return Err(ConfigError::new("analysis.n_phi", line, "must be a power of two"));
        }
        let threshold = match self.number("analysis", "threshold") {
            None => holovortex::analysis::DEFAULT_THRESHOLD,
            Some((t, line)) if !(0.0..=1.0).contains(&t) => {
                return Err(ConfigError::new("analysis.threshold", Some(line), "must lie in [0, 1]"))
            }
            Some((t, _)) => t,
        };
        let analysis = AnalysisCfg {
            selection,
            order: self.int("analysis", "order").map(|x| x.0).unwrap_or(1),
            center: match self.word("analysis", "center").unwrap_or("centroid") {
                "grid_center" => Center::GridCenter,
                _ => Center::Centroid,
            },
            n_r: count_at_least("n_r", 256, 1)?,
            n_phi,
            r_max: self
                .quantity("analysis", "r_max")
                .map(|q| positive("analysis.r_max", q).map(|_| q))
                .transpose()?,
            threshold,
            profile_bins: count_at_least("profile_bins", 100, 1)?,
            enclosed_radius: self
                .quantity("analysis", "enclosed_radius")
                .map(|q| positive("analysis.enclosed_radius", q).map(|_| q))
                .transpose()?,
        };

        let modal = if self.has("modal") {
            let (m, line) = self.int("modal", "m").ok_or_else(|| Self::missing("modal", "m"))?;
            if m == 0 {
                return Err(ConfigError::new(
                    "modal.m",
                    Some(line),
                    "the radial expansion is undefined for m = 0",
                ));
            }
            let waist = positive("modal.waist", self.require_quantity("modal", "waist")?)?;
            let z = self.require_quantity("modal", "z")?;
            if z.value == 0.0 {
                return Err(ConfigError::new("modal.z", Some(z.line), "must be non-zero"));
            }
            let r_min = self
                .quantity("modal", "r_min")
                .map(|q| non_negative("modal.r_min", q))
                .transpose()?
                .unwrap_or(0.0);
            let r_max = match self.quantity("modal", "r_max") {
                Some(q) => {
                    if !(q.value > r_min) {
                        return Err(ConfigError::new("modal.r_max", Some(q.line), "must exceed modal.r_min"));
                    }
                    q.value
                }
                None => (7.0 * waist).max(2.0 * r_min),
            };
            let default_p = (4 * m.unsigned_abs().pow(2)).max(1000);
            let (n_points, np_line) = self.count("modal", "n_points").unwrap_or((200, 0));
            if n_points == 0 {
                return Err(ConfigError::new("modal.n_points", Some(np_line), "must be positive"));
            }
            Some(ModalCfg {
                m,
                p_max: self.count("modal", "p_max").map(|x| x.0 as u64).unwrap_or(default_p),
                z: z.value,
                waist,
                r_min,
                r_max,
                n_points,
                extent: self
                    .quantity("modal", "extent")
                    .map(|q| positive("modal.extent", q))
                    .transpose()?,
            })
        } else {
            None
        };

        let render = RenderCfg {
            beam_stop: if self.flag("render", "beam_stop").unwrap_or(false) {
                Some(positive(
                    "render.beam_stop_radius",
                    self.require_quantity("render", "beam_stop_radius")?,
                )?)
            } else {
                None
            },
        };

        let output = OutputCfg {
            dir: self.path("output", "dir").unwrap_or_else(|| PathBuf::from("out")),
            pgm_scale: self
                .quantity("output", "pgm_scale")
                .map(|q| positive("output.pgm_scale", q))
                .transpose()?
                .unwrap_or(3e-12),
        };

        Ok(RunConfig {
            grid,
            beam,
            hologram,
            propagation,
            analysis,
            modal,
            render,
            output,
        })
    }
}

fn positive(field: &str, q: Quantity) -> Res<f64> {
    if q.value > 0.0 {
        Ok(q.value)
    } else {
        Err(ConfigError::new(field, Some(q.line), "must be positive"))
    }
}

fn non_negative(field: &str, q: Quantity) -> Res<f64> {
    if q.value >= 0.0 {
        Ok(q.value)
    } else {
        Err(ConfigError::new(field, Some(q.line), "must be non-negative"))
    }
}
