//! Fork-grating thickness synthesis and the thickness-to-phase transmission.

use std::path::Path;

use num_complex::Complex;
use rayon::prelude::*;

use crate::constants::{ELECTRON_REST_ENERGY_EV, HC_EV_M};
use crate::error::{Error, Result};
use crate::field::{ComplexField, GridSpec, PlaneTag};
use crate::pgm::{self, Greymap};
use crate::scalar::Real;

/// Electron beam: energies in eV, waist in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamParams<T> {
    kinetic_energy: T,
    rest_energy: T,
    waist: T,
    wavelength: T,
}

impl<T: Real> BeamParams<T> {
    pub fn new(kinetic_energy: T, waist: T) -> Result<Self> {
        Self::with_rest_energy(kinetic_energy, T::of(ELECTRON_REST_ENERGY_EV), waist)
    }

    pub fn with_rest_energy(kinetic_energy: T, rest_energy: T, waist: T) -> Result<Self> {
        if !(kinetic_energy > T::zero()) || !kinetic_energy.is_finite() {
            return Err(Error::invalid("kinetic_energy", "must be positive and finite"));
        }
        if !(rest_energy > T::zero()) || !rest_energy.is_finite() {
            return Err(Error::invalid("rest_energy", "must be positive and finite"));
        }
        if !(waist > T::zero()) || !waist.is_finite() {
            return Err(Error::invalid("waist", "must be positive and finite"));
        }
        let e = kinetic_energy.f64();
        let e0 = rest_energy.f64();
        let wavelength = T::of(HC_EV_M / (e * (e + 2.0 * e0)).sqrt());
        Ok(Self {
            kinetic_energy,
            rest_energy,
            waist,
            wavelength,
        })
    }

    pub fn kinetic_energy(&self) -> T {
        self.kinetic_energy
    }

    pub fn rest_energy(&self) -> T {
        self.rest_energy
    }

    pub fn waist(&self) -> T {
        self.waist
    }

    /// Relativistic de Broglie wavelength `hc / √(E(E + 2E₀))`, metres.
    pub fn wavelength(&self) -> T {
        self.wavelength
    }
}

/// Geometry and material of a fork hologram. Lengths in metres, `v_mip` in volts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HologramSpec<T> {
    pub charge: i64,
    pub period: T,
    pub depth: T,
    pub base: T,
    pub v_mip: T,
    /// `T::infinity()` for no aperture.
    pub aperture_radius: T,
    /// 0 for no central stop.
    pub dead_zone_radius: T,
}

impl<T: Real> HologramSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.period > T::zero()) || !self.period.is_finite() {
            return Err(Error::invalid("period", "must be positive and finite"));
        }
        if !(self.depth >= T::zero()) || !self.depth.is_finite() {
            return Err(Error::invalid("depth", "must be non-negative and finite"));
        }
        if !(self.base >= T::zero()) || !self.base.is_finite() {
            return Err(Error::invalid("base", "must be non-negative and finite"));
        }
        if !self.v_mip.is_finite() {
            return Err(Error::invalid("v_mip", "must be finite"));
        }
        if !(self.dead_zone_radius >= T::zero()) || !self.dead_zone_radius.is_finite() {
            return Err(Error::invalid("dead_zone_radius", "must be non-negative and finite"));
        }
        if !(self.aperture_radius > self.dead_zone_radius) {
            return Err(Error::invalid("aperture_radius", "must exceed dead_zone_radius"));
        }
        Ok(())
    }

    /// Whether the plate transmits at distance `r` from the axis.
    pub fn is_open(&self, r: T) -> bool {
        r >= self.dead_zone_radius && r <= self.aperture_radius
    }
}

/// Membrane thickness in metres on a sampling grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ThicknessMap<T> {
    grid: GridSpec<T>,
    t: Vec<T>,
}

impl<T: Real> ThicknessMap<T> {
    pub fn new(grid: GridSpec<T>, t: Vec<T>) -> Result<Self> {
        if t.len() != grid.len() {
            return Err(Error::invalid("thickness", "length does not match grid"));
        }
        if t.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
            return Err(Error::invalid("thickness", "negative or non-finite value"));
        }
        Ok(Self { grid, t })
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.t
    }

    pub fn at(&self, i: usize, j: usize) -> T {
        self.t[j * self.grid.nx() + i]
    }

    /// Quantises to gray levels `round(t / scale)`.
    pub fn to_greymap(&self, scale: T) -> Result<Greymap> {
        if !(scale > T::zero()) {
            return Err(Error::invalid("scale", "must be positive"));
        }
        let samples = self
            .t
            .iter()
            .map(|&v| {
                let g = (v / scale).round();
                if g > T::of(65535.0) {
                    Err(Error::invalid(
                        "scale",
                        format!("thickness {v:e} m exceeds 65535 gray levels"),
                    ))
                } else {
                    Ok(g.to_u16().unwrap_or(0))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Greymap::new(self.grid.nx(), self.grid.ny(), 65535, samples)
    }
}

/// Phase shift per volt per metre of material: `(2π/λ)(E + E₀) / (E(E + 2E₀))`
/// with energies in eV. Multiply by `V_mip·t` to get radians.
pub fn interaction_constant<T: Real>(beam: &BeamParams<T>) -> T {
    let e = beam.kinetic_energy.f64();
    let e0 = beam.rest_energy.f64();
    let lambda = beam.wavelength.f64();
    T::of(std::f64::consts::TAU / lambda * (e + e0) / (e * (e + 2.0 * e0)))
}

/// `t = base + depth·(1 + cos(mφ + 2πx/Λ))/2`, with `x` and `φ` measured from
/// the grid centre. The carrier must be sampled at least four times per period.
pub fn synthesize_thickness<T: Real>(spec: &HologramSpec<T>, grid: &GridSpec<T>) -> Result<ThicknessMap<T>> {
    spec.validate()?;
    let limit = spec.period / T::of(4.0);
    if grid.pitch() > limit {
        return Err(Error::CarrierUndersampled {
            pitch: grid.pitch().f64(),
            limit: limit.f64(),
        });
    }
    let [cx, cy] = grid.center();
    let m = T::of(spec.charge as f64);
    let k = T::TAU() / spec.period;
    let half = spec.depth / T::of(2.0);
    let mut t = vec![T::zero(); grid.len()];
    t.par_chunks_mut(grid.nx()).enumerate().for_each(|(j, row)| {
        let y = grid.y(j) - cy;
        for (i, v) in row.iter_mut().enumerate() {
            let x = grid.x(i) - cx;
            let phi = y.atan2(x);
            *v = spec.base + half * (T::one() + (m * phi + k * x).cos());
        }
    });
    ThicknessMap::new(*grid, t)
}

/// Reads a 16-bit greymap as `t = gray · scale` on a centred grid of the given pitch.
pub fn load_thickness_map<T: Real>(path: impl AsRef<Path>, pitch: T, scale: T) -> Result<ThicknessMap<T>> {
    let img = pgm::load(path)?;
    thickness_from_greymap(&img, pitch, scale)
}

pub fn thickness_from_greymap<T: Real>(img: &Greymap, pitch: T, scale: T) -> Result<ThicknessMap<T>> {
    if !(scale > T::zero()) || !scale.is_finite() {
        return Err(Error::invalid("scale", "must be positive and finite"));
    }
    let grid = GridSpec::centered(img.width, img.height, pitch)?;
    let t = img.samples.iter().map(|&g| T::of(g as f64) * scale).collect();
    ThicknessMap::new(grid, t)
}

pub fn save_thickness_map<T: Real>(map: &ThicknessMap<T>, path: impl AsRef<Path>, scale: T) -> Result<()> {
    pgm::save(&map.to_greymap(scale)?, path)
}

/// `exp(iσ V_mip t)` where the plate is open, zero in the central stop and
/// beyond the aperture.
pub fn transmission<T: Real>(
    t: &ThicknessMap<T>,
    beam: &BeamParams<T>,
    spec: &HologramSpec<T>,
) -> Result<ComplexField<T>> {
    spec.validate()?;
    let grid = t.grid;
    let [cx, cy] = grid.center();
    let scale = interaction_constant(beam) * spec.v_mip;
    let mut values = vec![Complex::new(T::zero(), T::zero()); grid.len()];
    values
        .par_chunks_mut(grid.nx())
        .zip(t.t.par_chunks(grid.nx()))
        .enumerate()
        .for_each(|(j, (row, trow))| {
            let y = grid.y(j) - cy;
            for (i, (v, &th)) in row.iter_mut().zip(trow).enumerate() {
                let r = (grid.x(i) - cx).hypot(y);
                if spec.is_open(r) {
                    *v = Complex::from_polar(T::one(), scale * th);
                }
            }
        });
    ComplexField::new(grid, values, PlaneTag::HologramExit)
}

/// Unit-power Gaussian `exp(−r²/w₀²)` about the grid centre.
pub fn gaussian_illumination<T: Real>(grid: &GridSpec<T>, waist: T) -> Result<ComplexField<T>> {
    if !(waist > T::zero()) || !waist.is_finite() {
        return Err(Error::invalid("waist", "must be positive and finite"));
    }
    let [cx, cy] = grid.center();
    let w2 = waist * waist;
    ComplexField::from_fn(*grid, PlaneTag::HologramExit, |x, y| {
        let r2 = (x - cx).powi(2) + (y - cy).powi(2);
        Complex::new((-r2 / w2).exp(), T::zero())
    })
    .normalize()
}

/// Pointwise product of illumination and transmission.
pub fn exit_wave<T: Real>(illum: &ComplexField<T>, trans: &ComplexField<T>) -> Result<ComplexField<T>> {
    if !illum.grid().same_lattice(trans.grid()) {
        return Err(Error::GridMismatch);
    }
    let values = illum
        .values()
        .par_iter()
        .zip(trans.values())
        .map(|(a, b)| a * b)
        .collect();
    ComplexField::new(*illum.grid(), values, PlaneTag::HologramExit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(m: i64) -> HologramSpec<f64> {
        HologramSpec {
            charge: m,
            period: 8e-9,
            depth: 30e-9,
            base: 120e-9,
            v_mip: 13.0,
            aperture_radius: f64::INFINITY,
            dead_zone_radius: 0.0,
        }
    }

    fn beam() -> BeamParams<f64> {
        BeamParams::new(200e3, 50e-9).unwrap()
    }

    #[test]
    fn wavelength_at_200kev() {
        // Independent route: λ = h / √(2 mₑ E (1 + E/(2 mₑc²))) with E in joules.
        use crate::constants::*;
        let e = 200e3 * ELEMENTARY_CHARGE;
        let mc2 = ELECTRON_MASS * SPEED_OF_LIGHT * SPEED_OF_LIGHT;
        let oracle = PLANCK / (2.0 * ELECTRON_MASS * e * (1.0 + e / (2.0 * mc2))).sqrt();
        let lambda = beam().wavelength();
        assert!((lambda / oracle - 1.0).abs() < 1e-9);
        assert!((lambda / 2.5e-12 - 1.0).abs() < 5e-3);
    }

    #[test]
    fn interaction_constant_at_200kev() {
        let s = interaction_constant(&beam());
        // rad/(V·nm), commonly tabulated as 7.29e-3 at 200 kV.
        assert!((s * 1e-9 - 7.29e-3).abs() < 0.01e-3, "{s}");
    }

    #[test]
    fn interaction_constant_ultrarelativistic_limit() {
        let mut prev = f64::INFINITY;
        for e in [1e6, 1e7, 1e8, 1e9, 1e10] {
            let b = BeamParams::new(e, 1e-9).unwrap();
            let gap = (interaction_constant(&b) * b.wavelength() * e / std::f64::consts::TAU - 1.0).abs();
            assert!(gap < prev);
            prev = gap;
        }
        assert!(prev < 1e-4);
    }

    #[test]
    fn carrier_floor() {
        let g = GridSpec::centered(16, 16, 2.01e-9).unwrap();
        assert!(matches!(synthesize_thickness(&spec(1), &g), Err(Error::CarrierUndersampled { .. })));
        let g = GridSpec::centered(16, 16, 2e-9).unwrap();
        assert!(synthesize_thickness(&spec(1), &g).is_ok());
    }

    #[test]
    fn plain_grating_and_axis_restriction() {
        let g = GridSpec::centered(64, 32, 1e-9).unwrap();
        let mut s = spec(0);
        s.base = 0.0;
        let t = synthesize_thickness(&s, &g).unwrap();
        for j in 0..g.ny() {
            for i in 0..g.nx() {
                let x = g.x(i);
                let expect = 15e-9 * (1.0 + (std::f64::consts::TAU * x / 8e-9).cos());
                assert!((t.at(i, j) - expect).abs() < 1e-20);
            }
        }
        let t = synthesize_thickness(&spec(7), &g).unwrap();
        for i in g.nx() / 2 + 1..g.nx() {
            let x = g.x(i);
            let expect = 120e-9 + 15e-9 * (1.0 + (std::f64::consts::TAU * x / 8e-9).cos());
            assert!((t.at(i, g.ny() / 2) - expect).abs() < 1e-20);
        }
    }

    #[test]
    fn fork_range() {
        let g = GridSpec::centered(128, 128, 1e-9).unwrap();
        let mut s = spec(200);
        s.period = 4e-9;
        let t = synthesize_thickness(&s, &g).unwrap();
        let lo = t.values().iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = t.values().iter().cloned().fold(0.0, f64::max);
        assert!(lo >= 120e-9 && hi <= 150e-9);
        assert!(lo < 120.5e-9 && hi > 149.5e-9);
    }

    #[test]
    fn transmission_stops() {
        let g = GridSpec::centered(40, 40, 1e-9).unwrap();
        let zero = ThicknessMap::new(g, vec![0.0; g.len()]).unwrap();
        let open = transmission(&zero, &beam(), &spec(1)).unwrap();
        assert!(open.values().iter().all(|v| *v == Complex::new(1.0, 0.0)));

        let mut s = spec(1);
        s.dead_zone_radius = 5e-9;
        s.aperture_radius = 15e-9;
        let t = synthesize_thickness(&s, &g).unwrap();
        let tr = transmission(&t, &beam(), &s).unwrap();
        let [cx, cy] = g.center();
        for j in 0..g.ny() {
            for i in 0..g.nx() {
                let r = (g.x(i) - cx).hypot(g.y(j) - cy);
                let a = tr.at(i, j).norm();
                if r < 5e-9 || r > 15e-9 {
                    assert_eq!(a, 0.0);
                } else {
                    assert!((a - 1.0).abs() < 1e-15);
                }
            }
        }
        s.aperture_radius = 5e-9;
        assert!(transmission(&t, &beam(), &s).is_err());
    }

    #[test]
    fn phase_depth_matches_constant() {
        let g = GridSpec::centered(64, 64, 1e-9).unwrap();
        let s = spec(3);
        let t = synthesize_thickness(&s, &g).unwrap();
        let tr = transmission(&t, &beam(), &s).unwrap();
        let sigma = interaction_constant(&beam());
        // Phases relative to the thinnest point stay well below 2π here.
        let phases: Vec<f64> = t.values().iter().map(|th| sigma * s.v_mip * th).collect();
        let lo = phases.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = phases.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let tmin = t.values().iter().cloned().fold(f64::INFINITY, f64::min);
        let tmax = t.values().iter().cloned().fold(0.0, f64::max);
        assert!(((hi - lo) - sigma * s.v_mip * (tmax - tmin)).abs() < 1e-12);
        assert!(((tmax - tmin) - s.depth).abs() < 1e-3 * s.depth);
        let k = t.values().iter().position(|&v| v == tmax).unwrap();
        let k0 = t.values().iter().position(|&v| v == tmin).unwrap();
        let rel = tr.values()[k] / tr.values()[k0];
        let dchi = sigma * s.v_mip * (tmax - tmin);
        assert!((rel - Complex::from_polar(1.0, dchi)).norm() < 1e-12);
    }

    #[test]
    fn gaussian_moments() {
        let g: GridSpec<f64> = GridSpec::centered(256, 256, 1.0).unwrap();
        let w = 20.0;
        let f = gaussian_illumination(&g, w).unwrap();
        assert!((f.total_power() - 1.0).abs() < 1e-12);
        let c = g.nx() / 2;
        let peak = f.at(c, c).re;
        assert!((f.at(c + 20, c).re / peak - (-1.0f64).exp()).abs() < 1e-12);
        let (mut s, mut sx2) = (0.0, 0.0);
        for j in 0..g.ny() {
            for i in 0..g.nx() {
                let p = f.at(i, j).norm_sqr();
                s += p;
                sx2 += p * g.x(i).powi(2);
            }
        }
        assert!(((sx2 / s).sqrt() - w / 2.0).abs() < 1e-9);
    }

    #[test]
    fn exit_wave_contract() {
        let g = GridSpec::centered(32, 32, 1.0).unwrap();
        let illum = gaussian_illumination(&g, 6.0).unwrap();
        let ones = ComplexField::from_fn(g, PlaneTag::HologramExit, |_, _| Complex::new(1.0, 0.0));
        assert_eq!(exit_wave(&illum, &ones).unwrap(), illum);
        let other = GridSpec::centered(32, 32, 2.0).unwrap();
        let bad = ComplexField::zeros(other, PlaneTag::HologramExit);
        assert!(matches!(exit_wave(&illum, &bad), Err(Error::GridMismatch)));

        let mut s = spec(1);
        s.period = 4.0;
        s.dead_zone_radius = 3.0;
        let t = synthesize_thickness(&s, &g).unwrap();
        let tr = transmission(&t, &beam(), &s).unwrap();
        let exit = exit_wave(&illum, &tr).unwrap();
        assert!(exit.total_power() < illum.total_power());
    }

    #[test]
    fn greymap_round_trip_within_half_level() {
        let g = GridSpec::centered(32, 24, 1e-9).unwrap();
        let t = synthesize_thickness(&spec(5), &g).unwrap();
        let scale = 3e-12;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.pgm");
        save_thickness_map(&t, &path, scale).unwrap();
        let back = load_thickness_map(&path, 1e-9, scale).unwrap();
        assert_eq!(back.grid(), t.grid());
        for (a, b) in back.values().iter().zip(t.values()) {
            assert!((a - b).abs() <= 0.5 * scale + 1e-24);
        }
    }

    #[test]
    fn uniform_greymap() {
        let img = Greymap::new(4, 4, 65535, vec![1000; 16]).unwrap();
        let t: ThicknessMap<f64> = thickness_from_greymap(&img, 1e-9, 0.1e-9).unwrap();
        assert!(t.values().iter().all(|v| (v - 100e-9).abs() < 1e-20));
        assert!(thickness_from_greymap(&img, 0.0, 0.1e-9).is_err());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.pgm");
        std::fs::write(&path, b"P5\n4 4\n65535\n\x00").unwrap();
        assert!(matches!(load_thickness_map(&path, 1e-9, 1e-9), Err(Error::MalformedPgm(_))));
    }

    proptest! {
        #[test]
        fn negating_charge_mirrors_y(m in -40i64..40, period in 4.0f64..12.0) {
            let g = GridSpec::centered(32, 32, 1.0).unwrap();
            let s = HologramSpec { charge: m, period, ..spec(0) };
            let neg = HologramSpec { charge: -m, ..s };
            let a = synthesize_thickness(&s, &g).unwrap();
            let b = synthesize_thickness(&neg, &g).unwrap();
            let c = g.ny() / 2;
            for j in 1..g.ny() {
                for i in 0..g.nx() {
                    prop_assert!((a.at(i, j) - b.at(i, 2 * c - j)).abs() < 1e-12 * a.at(i, j).max(1.0));
                }
            }
        }

        #[test]
        fn thickness_bounds_and_unit_modulus(m in -300i64..300, base in 0.0f64..200.0, depth in 0.0f64..50.0) {
            let g = GridSpec::centered(24, 20, 1.0).unwrap();
            let s = HologramSpec { charge: m, period: 5.0, base, depth, dead_zone_radius: 2.0, aperture_radius: 9.0, v_mip: 10.0 };
            let t = synthesize_thickness(&s, &g).unwrap();
            for &v in t.values() {
                prop_assert!(v >= base && v <= base + depth);
            }
            let b = BeamParams::new(200e3, 1.0).unwrap();
            let tr = transmission(&t, &b, &s).unwrap();
            for v in tr.values() {
                let a = v.norm();
                prop_assert!(a == 0.0 || (a - 1.0).abs() < 1e-14);
            }
        }
    }
}
