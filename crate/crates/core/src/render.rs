//! Pixel-parallel rendering of the parameter plane and of dynamical planes.
//!
//! Pixels are processed in 32×32 tiles on the current rayon pool. Every
//! pixel is a pure function of the inputs, so the image does not depend on
//! the number of threads.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::boundary::{classify_parameter, ClassifyOptions, Verdict};
use crate::dynamics::{attracting_cycle, MapParams};
use crate::linearization::{level_traps, LevelTrap, LinearizationError, DEFAULT_ORDER};
use crate::rotation::RotationNumber;
use crate::sphere::{Center, SpherePoint};

pub const TILE: usize = 32;

/// Level of the Julia-render traps as a fraction of the conformal radius.
pub const JULIA_TRAP_LEVEL: f64 = 0.9;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("malformed rectangle {0:?}, expected re_min,re_max,im_min,im_max")]
    MalformedRect(String),
    #[error("rectangle is not well ordered: {0}")]
    DegenerateRect(Rect),
    #[error("image size must be positive, got {0}x{1}")]
    EmptyImage(usize, usize),
    #[error("trap construction failed: {0}")]
    Traps(#[from] LinearizationError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Png { path: PathBuf, source: image::ImageError },
}

/// Axis-parallel window of the complex plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self, RenderError> {
        let r = Self { re_min, re_max, im_min, im_max };
        if re_min < re_max && im_min < im_max && [re_min, re_max, im_min, im_max].iter().all(|x| x.is_finite()) {
            Ok(r)
        } else {
            Err(RenderError::DegenerateRect(r))
        }
    }

    /// Default parameter-plane window `[−2, 2] × [−2.7, 1.3]`.
    pub fn overview() -> Self {
        Self { re_min: -2.0, re_max: 2.0, im_min: -2.7, im_max: 1.3 }
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.re_min, self.re_max, self.im_min, self.im_max)
    }
}

impl FromStr for Rect {
    type Err = RenderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: Vec<f64> = s.split(',').map(|x| x.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| RenderError::MalformedRect(s.into()))?;
        match v[..] {
            [a, b, c, d] => Rect::new(a, b, c, d),
            _ => Err(RenderError::MalformedRect(s.into())),
        }
    }
}

/// Pixel raster over a [`Rect`]. Continuous pixel coordinates `(x, y)` run
/// from `(0, 0)` at the top-left corner `re_min + i·im_max` to `(w, h)` at
/// the bottom-right corner `re_max + i·im_min`; pixel `(i, j)` covers
/// `[i, i+1) × [j, j+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub rect: Rect,
}

impl Raster {
    pub fn new(width: usize, height: usize, rect: Rect) -> Result<Self, RenderError> {
        if width == 0 || height == 0 {
            return Err(RenderError::EmptyImage(width, height));
        }
        Ok(Self { width, height, rect })
    }

    pub fn to_plane(&self, x: f64, y: f64) -> Complex64 {
        let r = &self.rect;
        let (u, v) = (x / self.width as f64, y / self.height as f64);
        Complex64::new(r.re_min * (1.0 - u) + r.re_max * u, r.im_max * (1.0 - v) + r.im_min * v)
    }

    pub fn to_pixel(&self, z: Complex64) -> (f64, f64) {
        let r = &self.rect;
        let x = (z.re - r.re_min) / (r.re_max - r.re_min) * self.width as f64;
        let y = (r.im_max - z.im) / (r.im_max - r.im_min) * self.height as f64;
        (x, y)
    }

    pub fn pixel_center(&self, i: usize, j: usize) -> Complex64 {
        self.to_plane(i as f64 + 0.5, j as f64 + 0.5)
    }

    /// Pixel containing `z`, if inside the raster.
    pub fn pixel_of(&self, z: Complex64) -> Option<(usize, usize)> {
        let (x, y) = self.to_pixel(z);
        let inside = x >= 0.0 && y >= 0.0 && x < self.width as f64 && y < self.height as f64;
        inside.then_some((x as usize, y as usize))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PixelClass {
    ExteriorType,
    InteriorType,
    OnGamma,
    Undetermined,
    /// The parameter-plane pixel containing `α = 0`.
    Masked,
    Julia,
    /// First trap hit on the 0 side at an even step.
    ZeroEven,
    ZeroOdd,
    InfinityEven,
    InfinityOdd,
    /// Basin of an attracting cycle of the free critical point.
    Basin,
}

impl PixelClass {
    pub const ALL: [PixelClass; 11] = [
        Self::ExteriorType,
        Self::InteriorType,
        Self::OnGamma,
        Self::Undetermined,
        Self::Masked,
        Self::Julia,
        Self::ZeroEven,
        Self::ZeroOdd,
        Self::InfinityEven,
        Self::InfinityOdd,
        Self::Basin,
    ];

    pub fn tag(self) -> u8 {
        self as u8
    }

    pub fn from_verdict(v: Verdict) -> Self {
        match v {
            Verdict::ExteriorType => Self::ExteriorType,
            Verdict::InteriorType => Self::InteriorType,
            Verdict::OnGamma => Self::OnGamma,
            Verdict::Undetermined => Self::Undetermined,
        }
    }

    fn fatou(center: Center, step: usize) -> Self {
        match (center, step % 2 == 0) {
            (Center::Zero, true) => Self::ZeroEven,
            (Center::Zero, false) => Self::ZeroOdd,
            (Center::Infinity, true) => Self::InfinityEven,
            (Center::Infinity, false) => Self::InfinityOdd,
        }
    }

    /// Whether the orbit lands in `Δ⁰` at even times (as opposed to `Δ^∞`).
    pub fn zero_cycle(self) -> Option<bool> {
        match self {
            Self::ZeroEven | Self::InfinityOdd => Some(true),
            Self::ZeroOdd | Self::InfinityEven => Some(false),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImageBuffer {
    pub raster: Raster,
    pub classes: Vec<PixelClass>,
    /// Per-pixel shade in `[0, 1]`.
    pub shade: Vec<f32>,
}

impl ImageBuffer {
    pub fn width(&self) -> usize {
        self.raster.width
    }

    pub fn height(&self) -> usize {
        self.raster.height
    }

    pub fn class_at(&self, i: usize, j: usize) -> PixelClass {
        self.classes[j * self.raster.width + i]
    }

    pub fn counts(&self) -> BTreeMap<PixelClass, usize> {
        let mut m = BTreeMap::new();
        for &c in &self.classes {
            *m.entry(c).or_insert(0) += 1;
        }
        m
    }
}

/// Runs `pixel` on every pixel center in 32×32 tiles and assembles the
/// results in row-major order.
fn render_tiles(raster: Raster, pixel: impl Fn(usize, usize, Complex64) -> (PixelClass, f32) + Sync) -> ImageBuffer {
    let (w, h) = (raster.width, raster.height);
    let (tx, ty) = (w.div_ceil(TILE), h.div_ceil(TILE));
    let tiles: Vec<(usize, Vec<(PixelClass, f32)>)> = (0..tx * ty)
        .into_par_iter()
        .map(|t| {
            let (x0, y0) = ((t % tx) * TILE, (t / tx) * TILE);
            let mut out = Vec::with_capacity(TILE * TILE);
            for j in y0..(y0 + TILE).min(h) {
                for i in x0..(x0 + TILE).min(w) {
                    out.push(pixel(i, j, raster.pixel_center(i, j)));
                }
            }
            (t, out)
        })
        .collect();
    let mut classes = vec![PixelClass::Undetermined; w * h];
    let mut shade = vec![0.0f32; w * h];
    for (t, out) in tiles {
        let (x0, y0) = ((t % tx) * TILE, (t / tx) * TILE);
        let tw = (x0 + TILE).min(w) - x0;
        for (k, (c, s)) in out.into_iter().enumerate() {
            let idx = (y0 + k / tw) * w + x0 + k % tw;
            classes[idx] = c;
            shade[idx] = s;
        }
    }
    ImageBuffer { raster, classes, shade }
}

fn log_shade(step: usize, budget: usize) -> f32 {
    ((1.0 + step as f64).ln() / (1.0 + budget as f64).ln()).clamp(0.0, 1.0) as f32
}

/// Class and shade of one parameter: the verdict, shaded by the trap-entry
/// step of the critical orbit that is off its boundary.
pub fn param_pixel(base: &MapParams, alpha: Complex64, opts: &ClassifyOptions) -> (PixelClass, f32) {
    let Ok(p) = base.with_alpha(alpha) else {
        return (PixelClass::Undetermined, 1.0);
    };
    let c = classify_parameter(&p, opts);
    let off = match c.verdict {
        Verdict::ExteriorType => c.c2.as_ref(),
        Verdict::InteriorType => c.c1.as_ref(),
        _ => None,
    };
    let shade = off.and_then(|e| e.trap_entry).map_or(1.0, |(step, _)| log_shade(step, opts.orbit_len));
    (PixelClass::from_verdict(c.verdict), shade)
}

/// Parameter plane of `θ` over `raster`, with the per-pixel classifier run
/// at orbit budget `n` and the simplicity test skipped.
pub fn render_param_plane(theta: &RotationNumber, raster: Raster, n: usize) -> ImageBuffer {
    let base = MapParams::new(theta.clone(), Complex64::new(1.0, 0.0)).expect("unit alpha");
    let opts = ClassifyOptions::for_render(n);
    let origin = raster.pixel_of(Complex64::new(0.0, 0.0));
    render_tiles(raster, |i, j, alpha| {
        if origin == Some((i, j)) {
            (PixelClass::Masked, 0.0)
        } else {
            param_pixel(&base, alpha, &opts)
        }
    })
}

/// Traps of the dynamical-plane renderer: the two Siegel level traps and
/// small disks about an attracting cycle of a critical point, if any.
#[derive(Clone, Debug, PartialEq)]
pub struct JuliaTraps {
    pub siegel: [LevelTrap; 2],
    pub cycle: Vec<SpherePoint>,
    /// Chordal radius of the disks about the cycle.
    pub cycle_radius: f64,
}

impl JuliaTraps {
    pub fn new(p: &MapParams, warmup: usize) -> Result<Self, RenderError> {
        let siegel = level_traps(p, DEFAULT_ORDER, JULIA_TRAP_LEVEL)?;
        let cp = p.critical_points();
        let cycle = [cp.c1, cp.c2]
            .iter()
            .find_map(|&c| attracting_cycle(p, SpherePoint::finite(c), warmup, 64, 1e-10))
            .unwrap_or_default();
        Ok(Self { siegel, cycle, cycle_radius: 1e-6 })
    }
}

/// Iterates `f` (single steps) from `z` for at most `max_steps` steps and
/// reports the first trap hit, checking the starting point too.
pub fn julia_point(p: &MapParams, traps: &JuliaTraps, z: SpherePoint, max_steps: usize) -> (PixelClass, Option<usize>) {
    let mut z = z;
    for step in 0..=max_steps {
        if let Some(t) = traps.siegel.iter().find(|t| t.contains(&z)) {
            return (PixelClass::fatou(t.center, step), Some(step));
        }
        if traps.cycle.iter().any(|c| c.chordal(&z) < traps.cycle_radius) {
            return (PixelClass::Basin, Some(step));
        }
        if step < max_steps {
            z = p.eval_f(z);
        }
    }
    (PixelClass::Julia, None)
}

/// Dynamical plane of `p` over `raster`; each pixel is iterated for up to
/// `2n` single steps of `f`.
pub fn render_julia(p: &MapParams, raster: Raster, n: usize) -> Result<ImageBuffer, RenderError> {
    let steps = 2 * n;
    let traps = JuliaTraps::new(p, steps)?;
    Ok(render_tiles(raster, |_, _, z| match julia_point(p, &traps, SpherePoint::finite(z), steps) {
        (c, Some(k)) => (c, log_shade(k, steps)),
        (c, None) => (c, 1.0),
    }))
}

/// Base color per class; the shade darkens a pixel by up to `shade_strength`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Palette {
    pub colors: BTreeMap<PixelClass, [u8; 3]>,
    pub shade_strength: f32,
}

impl Palette {
    /// Each class drawn in the gray level of its tag, unshaded.
    pub fn identity() -> Self {
        Self { colors: PixelClass::ALL.iter().map(|&c| (c, [c.tag(); 3])).collect(), shade_strength: 0.0 }
    }

    pub fn color(&self, class: PixelClass, shade: f32) -> [u8; 3] {
        let base = self.colors.get(&class).copied().unwrap_or([255, 0, 255]);
        let k = 1.0 - self.shade_strength * shade.clamp(0.0, 1.0);
        base.map(|c| (c as f32 * k).round() as u8)
    }
}

impl Default for Palette {
    fn default() -> Self {
        use PixelClass::*;
        let colors = [
            (ExteriorType, [250, 214, 120]),
            (InteriorType, [62, 96, 180]),
            (OnGamma, [220, 30, 30]),
            (Undetermined, [40, 200, 80]),
            (Masked, [0, 0, 0]),
            (Julia, [10, 10, 10]),
            (ZeroEven, [250, 214, 120]),
            (InfinityOdd, [235, 190, 90]),
            (InfinityEven, [62, 96, 180]),
            (ZeroOdd, [90, 125, 205]),
            (Basin, [120, 196, 160]),
        ];
        Self { colors: colors.into_iter().collect(), shade_strength: 0.6 }
    }
}

/// RGB bytes of `img`, row-major from the top-left corner.
pub fn rgb_bytes(img: &ImageBuffer, palette: &Palette) -> Vec<u8> {
    img.classes.iter().zip(&img.shade).flat_map(|(&c, &s)| palette.color(c, s)).collect()
}

/// Binary P6 PPM encoding of `img`.
pub fn encode_ppm(img: &ImageBuffer, palette: &Palette) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(rgb_bytes(img, palette));
    out
}

pub fn write_ppm(img: &ImageBuffer, palette: &Palette, path: &Path) -> Result<(), RenderError> {
    fs::write(path, encode_ppm(img, palette)).map_err(|source| RenderError::Io { path: path.into(), source })
}

pub fn write_png(img: &ImageBuffer, palette: &Palette, path: &Path) -> Result<(), RenderError> {
    image::save_buffer_with_format(path, &rgb_bytes(img, palette), img.width() as u32, img.height() as u32, image::ColorType::Rgb8, image::ImageFormat::Png)
        .map_err(|source| RenderError::Png { path: path.into(), source })
}

/// Sidecar describing a rendered image.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RenderSummary {
    pub kind: &'static str,
    pub theta: f64,
    pub theta_cf: String,
    #[serde(with = "crate::serde_complex::option")]
    pub alpha: Option<Complex64>,
    pub rect: Rect,
    pub width: usize,
    pub height: usize,
    pub n: usize,
    pub counts: BTreeMap<PixelClass, usize>,
}

impl RenderSummary {
    pub fn new(kind: &'static str, theta: &RotationNumber, alpha: Option<Complex64>, img: &ImageBuffer, n: usize) -> Self {
        Self {
            kind,
            theta: theta.value(),
            theta_cf: theta.cf_string(),
            alpha,
            rect: img.raster.rect,
            width: img.width(),
            height: img.height(),
            n,
            counts: img.counts(),
        }
    }
}
