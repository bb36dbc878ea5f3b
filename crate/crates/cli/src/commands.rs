//! Subcommand implementations. Every file written here is a pure function of
//! the config and the input files.

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use holovortex::analysis::{centroid, oam_spectrum, radial_profile, singularity_map};
use holovortex::hologram::{
    exit_wave, gaussian_illumination, save_thickness_map, synthesize_thickness, transmission,
};
use holovortex::modal::{hygg_radial, radial_spectrum};
use holovortex::pgm::{self, Greymap};
use holovortex::propagation::{exclude_lower_orders, select_order, PropagationMode, PropagationPlan};
use holovortex::{cfld, export, Beam, Error, Field, Grid, Hologram, Plane};

use crate::config::{Center, ConfigError, ModeCfg, Quantity, RunConfig, Selection};

/// A failure with its process exit code: 2 for configuration or validation
/// problems, 1 for runtime and I/O failures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
    pub code: i32,
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            line: None,
            message: message.into(),
            code: 2,
        }
    }

    pub fn runtime(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            code: 1,
            ..Self::config(field, message)
        }
    }

    fn io(path: &Path, e: impl fmt::Display) -> Self {
        Self::runtime(path.display().to_string(), e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "error: {}: line {n}: {}", self.field, self.message),
            None => write!(f, "error: {}: {}", self.field, self.message),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        Self {
            field: e.field,
            line: e.line,
            message: e.message,
            code: 2,
        }
    }
}

/// Maps a library error onto the config field that caused it. `field` names
/// the parameter behind generic validation failures.
fn lib(field: &str, e: Error) -> CliError {
    let msg = e.to_string();
    match e {
        Error::CarrierUndersampled { .. } => CliError::config("hologram.period", msg),
        Error::UndefinedForZeroM => CliError::config("modal.m", msg),
        Error::PolarWindowExceedsGrid { .. } => CliError::config("analysis.r_max", msg),
        Error::DiskExitsGrid { .. } => CliError::config("analysis.order", msg),
        Error::WrongPlane { .. } | Error::NonSquareGrid { .. } | Error::GridMismatch => {
            CliError::config("input", msg)
        }
        Error::InvalidParameter { name, reason } => CliError::config(format!("{field}.{name}"), reason),
        Error::UseAngularSpectrum { .. } => CliError::config("propagation.z", msg),
        Error::MalformedPgm(_) | Error::MalformedField(_) | Error::DegenerateField => {
            CliError::runtime("input", msg)
        }
        Error::NonConvergent(_) => CliError::runtime(field, msg),
        Error::Io(_) => CliError::runtime(field, msg),
    }
}

type Res<T> = std::result::Result<T, CliError>;

pub struct Context {
    pub config: RunConfig,
    pub out: PathBuf,
    pub input: Option<PathBuf>,
}

impl Context {
    pub fn new(config: RunConfig, out: Option<PathBuf>, input: Option<PathBuf>) -> Res<Self> {
        let out = out.unwrap_or_else(|| config.output.dir.clone());
        fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;
        Ok(Self { config, out, input })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn grid(&self) -> Res<Grid> {
        let g = self.config.grid()?;
        Grid::centered(g.n, g.n, g.pitch).map_err(|e| lib("grid", e))
    }

    fn beam(&self) -> Res<Beam> {
        let b = self.config.beam()?;
        // Without a waist only the wavelength matters; the grid extent stands in.
        let waist = match (b.waist, self.config.grid()) {
            (Some(w), _) => w,
            (None, Ok(g)) => g.pitch * g.n as f64,
            (None, Err(_)) => 1.0,
        };
        let beam = match b.rest_energy {
            Some(e0) => Beam::with_rest_energy(b.energy, e0, waist),
            None => Beam::new(b.energy, waist),
        };
        beam.map_err(|e| lib("beam", e))
    }

    fn hologram(&self) -> Res<Hologram> {
        let h = self.config.hologram()?;
        Ok(Hologram {
            charge: h.charge,
            period: h.period,
            depth: h.depth,
            base: h.base,
            v_mip: h.v_mip,
            aperture_radius: h.aperture_radius,
            dead_zone_radius: h.dead_zone_radius,
        })
    }

    fn field_name(&self) -> &'static str {
        match self.config.propagation.mode {
            ModeCfg::Fraunhofer => "farfield",
            ModeCfg::Fresnel { .. } => "fresnel",
        }
    }
}

fn create(path: &Path) -> Res<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn save_field(f: &Field, path: &Path) -> Res<()> {
    cfld::write(f, create(path)?).map_err(|e| CliError::io(path, e))
}

fn load_field(path: &Path) -> Res<Field> {
    cfld::load(path).map_err(|e| match e {
        Error::Io(io) => CliError::io(path, io),
        e => CliError::runtime(path.display().to_string(), e.to_string()),
    })
}

fn write_text(path: &Path, text: &str) -> Res<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(path, e))
}

/// `|ψ|²` scaled so the brightest pixel is 65535. Pixels within `stop` of the
/// zero order are blanked first, so the stop never sets the scale.
pub fn render(f: &Field, stop: Option<f64>) -> Res<Greymap> {
    let g = f.grid();
    let mut inten = f.intensity();
    if let Some(radius) = stop {
        if f.plane() != Plane::Fraunhofer {
            return Err(CliError::config(
                "render.beam_stop",
                format!("a zero-order stop needs a fraunhofer field, got {}", f.plane().name()),
            ));
        }
        for j in 0..g.ny() {
            for i in 0..g.nx() {
                if g.x(i).hypot(g.y(j)) <= radius {
                    inten[j * g.nx() + i] = 0.0;
                }
            }
        }
    }
    let peak = inten.iter().copied().fold(0.0, f64::max);
    let samples = inten
        .iter()
        .map(|&v| if peak > 0.0 { (v / peak * 65535.0).round() as u16 } else { 0 })
        .collect();
    Greymap::new(g.nx(), g.ny(), 65535, samples).map_err(|e| CliError::runtime("render", e.to_string()))
}

pub fn synthesize(cx: &Context) -> Res<Field> {
    let grid = cx.grid()?;
    let spec = cx.hologram()?;
    let beam = cx.beam()?;
    let t = synthesize_thickness(&spec, &grid).map_err(|e| lib("hologram", e))?;
    let path = cx.path("thickness.pgm");
    save_thickness_map(&t, &path, cx.config.output.pgm_scale).map_err(|e| match e {
        Error::InvalidParameter { reason, .. } => CliError::config("output.pgm_scale", reason),
        e => CliError::io(&path, e),
    })?;
    let trans = transmission(&t, &beam, &spec).map_err(|e| lib("hologram", e))?;
    save_field(&trans, &cx.path("transmission.cfld"))?;
    Ok(trans)
}

pub fn propagate(cx: &Context, input: Option<Field>) -> Res<Field> {
    let field = match input {
        Some(f) => f,
        None => load_field(&cx.input.clone().unwrap_or_else(|| cx.path("transmission.cfld")))?,
    };
    if field.plane() != Plane::HologramExit {
        return Err(CliError::config(
            "input",
            format!("expected a hologram-exit field, got {}", field.plane().name()),
        ));
    }
    let beam = cx.beam()?;
    let exit = if !cx.config.propagation.illuminate {
        field
    } else {
        match cx.config.beam()?.waist {
            Some(w) => {
                let illum = gaussian_illumination(field.grid(), w).map_err(|e| lib("beam", e))?;
                exit_wave(&illum, &field).map_err(|e| lib("beam", e))?
            }
            None => field.normalize().map_err(|e| lib("input", e))?,
        }
    };
    let mode = match cx.config.propagation.mode {
        ModeCfg::Fraunhofer => PropagationMode::Fraunhofer,
        ModeCfg::Fresnel { z } => PropagationMode::Fresnel { z },
    };
    let plan = PropagationPlan::new(mode, beam.wavelength()).map_err(|e| lib("propagation", e))?;
    let out = plan.apply(&exit).map_err(|e| lib("propagation", e))?;
    let name = cx.field_name();
    save_field(&out, &cx.path(&format!("{name}.cfld")))?;
    let stop = match out.plane() {
        Plane::Fraunhofer => cx.config.render.beam_stop,
        _ => None,
    };
    let img = render(&out, stop)?;
    let path = cx.path(&format!("{name}.pgm"));
    pgm::write(&img, create(&path)?).map_err(|e| CliError::io(&path, e))?;
    Ok(out)
}

fn plane_unit(p: Plane) -> &'static str {
    match p {
        Plane::Fraunhofer => "rad",
        _ => "m",
    }
}

fn check_unit(field: &str, q: Quantity, unit: &str) -> Res<f64> {
    if q.unit == unit {
        Ok(q.value)
    } else {
        Err(CliError {
            line: Some(q.line),
            ..CliError::config(field, format!("unit {} does not match the input plane, expected {unit}", q.unit))
        })
    }
}

/// Writes the three CSV tables and `summary.txt`, and echoes the summary.
pub fn analyze(cx: &Context, input: Option<Field>) -> Res<()> {
    let source = cx
        .input
        .clone()
        .unwrap_or_else(|| cx.path(&format!("{}.cfld", cx.field_name())));
    let field = match input {
        Some(f) => f,
        None => load_field(&source)?,
    };
    let a = cx.config.analysis;
    let selected = match a.selection {
        Selection::None => field,
        Selection::Disk { radius } => {
            let spec = cx.hologram()?;
            select_order(&field, a.order, spec.period, cx.beam()?.wavelength(), radius)
                .map_err(|e| lib("analysis", e))?
        }
        Selection::HalfPlane => {
            let spec = cx.hologram()?;
            exclude_lower_orders(&field, a.order, spec.period, cx.beam()?.wavelength())
                .map_err(|e| lib("analysis", e))?
        }
    };
    let g = *selected.grid();
    let unit = plane_unit(selected.plane());
    let center = match a.center {
        Center::Centroid => centroid(&selected).map_err(|e| lib("input", e))?,
        Center::GridCenter => g.center(),
    };
    let r_max = match a.r_max {
        Some(q) => check_unit("analysis.r_max", q, unit)?,
        None => {
            let edge = g.distance_to_edge(center);
            match a.selection {
                Selection::Disk { radius } if unit == "rad" => radius.min(edge),
                _ => edge,
            }
        }
    };
    if !(r_max > 0.0) {
        return Err(CliError::config("analysis.center", "beam axis lies on or outside the grid edge"));
    }
    let enclosed_radius = match a.enclosed_radius {
        Some(q) => check_unit("analysis.enclosed_radius", q, unit)?,
        None => 0.5 * r_max,
    };
    let spectrum = oam_spectrum(&selected, center, a.n_r, a.n_phi, r_max).map_err(|e| lib("analysis", e))?;
    let map = singularity_map(&selected, a.threshold);
    let profile = radial_profile(&selected, center, a.profile_bins, Some(r_max)).map_err(|e| lib("analysis", e))?;

    let path = cx.path("oam_spectrum.csv");
    export::write_oam_spectrum(&spectrum, create(&path)?).map_err(|e| CliError::io(&path, e))?;
    let path = cx.path("singularities.csv");
    export::write_singularities(&map, create(&path)?).map_err(|e| CliError::io(&path, e))?;
    let path = cx.path("radial_profile.csv");
    export::write_radial_profile(&profile, create(&path)?).map_err(|e| CliError::io(&path, e))?;

    let peak = spectrum.peak();
    let summary = format!(
        "plane: {}\n\
         center_{unit}: {:e} {:e}\n\
         r_max_{unit}: {r_max:e}\n\
         oam_peak: {peak}\n\
         oam_peak_weight: {:e}\n\
         oam_mean: {:e}\n\
         oam_sem: {:e}\n\
         enclosed_radius_{unit}: {enclosed_radius:e}\n\
         enclosed_charge: {}\n\
         total_charge: {}\n",
        selected.plane().name(),
        center[0],
        center[1],
        spectrum.weight(peak),
        spectrum.mean,
        spectrum.sem,
        map.enclosed_charge(center, enclosed_radius),
        map.total_charge(),
    );
    write_text(&cx.path("summary.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}

pub fn modal(cx: &Context) -> Res<()> {
    let m = cx.config.modal()?;
    let beam = cx.beam()?;
    let lambda = beam.wavelength();
    let spec = radial_spectrum::<f64>(m.m, m.p_max).map_err(|e| lib("modal", e))?;
    let path = cx.path("radial_spectrum.csv");
    export::write_radial_spectrum(&spec, create(&path)?).map_err(|e| CliError::io(&path, e))?;

    let extent = m.extent.unwrap_or_else(|| {
        let z_r = std::f64::consts::PI * m.waist * m.waist / lambda;
        3.0 * m.waist * (1.0 + (m.z / z_r).powi(2)).sqrt()
    });
    let step = extent / m.n_points as f64;
    let r: Vec<f64> = (0..m.n_points).map(|k| (k as f64 + 0.5) * step).collect();
    let profile = hygg_radial(&r, m.z, m.m, m.waist, lambda, m.r_min, m.r_max).map_err(|e| lib("modal", e))?;
    let path = cx.path("hygg_profile.csv");
    export::write_complex_profile(&r, &profile, create(&path)?).map_err(|e| CliError::io(&path, e))?;

    println!(
        "radial_peak_p: {}\nradial_captured: {:e}\nradial_tail_bound: {:e}",
        spec.peak(),
        spec.captured(),
        spec.tail_bound
    );
    Ok(())
}

pub fn pipeline(cx: &Context) -> Res<()> {
    let trans = synthesize(cx)?;
    let out = propagate(cx, Some(trans))?;
    analyze(cx, Some(out))?;
    if cx.config.has_modal() {
        modal(cx)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    #[test]
    fn render_scales_to_full_range_and_blanks_the_stop() {
        let g = Grid::centered(4, 4, 1e-6).unwrap();
        let f = Field::from_fn(g, Plane::Fraunhofer, |x, y| {
            Complex::new(if x == 0.0 && y == 0.0 { 10.0 } else { 1.0 + x * 1e5 }, 0.0)
        });
        let img = render(&f, None).unwrap();
        assert_eq!(*img.samples.iter().max().unwrap(), 65535);
        let stopped = render(&f, Some(0.5e-6)).unwrap();
        let c = 2 * 4 + 2;
        assert_eq!(stopped.samples[c], 0);
        assert_eq!(*stopped.samples.iter().max().unwrap(), 65535);
        let exit = f.clone().with_plane(Plane::HologramExit);
        assert_eq!(render(&exit, Some(1.0)).unwrap_err().field, "render.beam_stop");
    }

    #[test]
    fn library_errors_name_their_field() {
        let e = lib("hologram", Error::CarrierUndersampled { pitch: 1.0, limit: 0.5 });
        assert_eq!(e.code, 2);
        assert!(e.to_string().starts_with("error: hologram.period: carrier undersampled"));
        assert_eq!(lib("modal", Error::UndefinedForZeroM).field, "modal.m");
        assert_eq!(lib("input", Error::MalformedField("x".into())).code, 1);
    }
}
