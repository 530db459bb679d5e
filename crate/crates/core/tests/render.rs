use std::sync::OnceLock;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use siegel::boundary::{ClassifyOptions, DEFAULT_ORBIT_LEN};
use siegel::dynamics::MapParams;
use siegel::gamma::iota;
use siegel::linearization::{level_traps, DEFAULT_ORDER};
use siegel::render::{
    encode_ppm, julia_point, param_pixel, render_julia, render_param_plane, ImageBuffer, JuliaTraps, Palette, PixelClass, Raster, Rect,
    JULIA_TRAP_LEVEL,
};
use siegel::rotation::RotationNumber;
use siegel::sphere::SpherePoint;
use siegel::verify::PERIOD_THREE_ALPHA;

const QUICK_LOOK_SHA256: &str = "76c3de23466484aeaeb79a99aae23acc9027942679c097fadc294f467dbd88d4";

fn quick_look() -> &'static ImageBuffer {
    static IMG: OnceLock<ImageBuffer> = OnceLock::new();
    IMG.get_or_init(|| render_param_plane(&RotationNumber::golden(), Raster::new(64, 59, Rect::overview()).unwrap(), DEFAULT_ORBIT_LEN))
}

fn mirrored(c: PixelClass) -> PixelClass {
    match c {
        PixelClass::ExteriorType => PixelClass::InteriorType,
        PixelClass::InteriorType => PixelClass::ExteriorType,
        other => other,
    }
}

#[test]
fn quick_look_matches_its_golden_hash() {
    let bytes = encode_ppm(quick_look(), &Palette::default());
    let hash: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
    assert_eq!(hash, QUICK_LOOK_SHA256);
}

#[test]
fn quick_look_has_two_large_regions() {
    let counts = quick_look().counts();
    let total = (64 * 59) as f64;
    let share = |c| *counts.get(&c).unwrap_or(&0) as f64 / total;
    assert!(share(PixelClass::ExteriorType) > 0.2 && share(PixelClass::InteriorType) > 0.2, "{counts:?}");
    assert_eq!(counts[&PixelClass::Masked], 1);
}

#[test]
fn mirror_parameters_swap_region_tags() {
    let theta = RotationNumber::golden();
    let img = quick_look();
    let base = MapParams::new(theta.clone(), Complex64::new(1.0, 0.0)).unwrap();
    let opts = ClassifyOptions::for_render(DEFAULT_ORBIT_LEN);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 50 {
        let (i, j) = (rng.gen_range(0..img.width()), rng.gen_range(0..img.height()));
        let class = img.class_at(i, j);
        if class == PixelClass::Masked {
            continue;
        }
        let alpha = img.raster.pixel_center(i, j);
        let (image_class, _) = param_pixel(&base, iota(theta.value(), alpha), &opts);
        assert_eq!(image_class, mirrored(class), "pixel ({i}, {j}) at {alpha}");
        checked += 1;
    }
}

#[test]
fn regression_pixels() {
    let theta = RotationNumber::golden();
    let base = MapParams::new(theta.clone(), Complex64::new(1.0, 0.0)).unwrap();
    let opts = ClassifyOptions::for_render(DEFAULT_ORBIT_LEN);
    let three = Complex64::new(3.0, 0.0);
    assert_eq!(param_pixel(&base, three, &opts).0, PixelClass::ExteriorType);
    assert_eq!(param_pixel(&base, iota(theta.value(), three), &opts).0, PixelClass::InteriorType);
}

#[test]
fn renders_agree_across_thread_counts() {
    let theta = RotationNumber::golden();
    let raster = Raster::new(40, 37, Rect::overview()).unwrap();
    let render = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| encode_ppm(&render_param_plane(&theta, raster, 2000), &Palette::default()))
    };
    let one = render(1);
    assert_eq!(one, render(3));
    assert_eq!(one, render(1));
}

#[test]
fn julia_fraction_shrinks_with_the_budget() {
    let p = MapParams::new(RotationNumber::golden(), Complex64::new(1.0, 0.0)).unwrap();
    let raster = Raster::new(32, 32, Rect::new(-2.0, 2.0, -2.0, 2.0).unwrap()).unwrap();
    let (short, long) = (render_julia(&p, raster, 500).unwrap(), render_julia(&p, raster, 1000).unwrap());
    let julia = |img: &ImageBuffer| img.classes.iter().filter(|&&c| c == PixelClass::Julia).count();
    assert!(julia(&long) <= julia(&short));
    for (a, b) in short.classes.iter().zip(&long.classes) {
        assert!(*a == PixelClass::Julia || a == b, "{a:?} became {b:?}");
    }
}

#[test]
fn period_three_critical_orbit_avoids_the_siegel_traps() {
    let theta = RotationNumber::parse_cf("20:1").unwrap();
    let p = MapParams::new(theta, PERIOD_THREE_ALPHA).unwrap();
    let traps = level_traps(&p, DEFAULT_ORDER, JULIA_TRAP_LEVEL).unwrap();
    let mut z = SpherePoint::finite(p.critical_points().c1);
    for step in 0..=100_000 {
        assert!(traps.iter().all(|t| !t.contains(&z)), "trap entry at step {step}");
        z = p.eval_f(z);
    }
    let julia = JuliaTraps::new(&p, 10_000).unwrap();
    assert_eq!(julia.cycle.len(), 3);
    assert_eq!(julia_point(&p, &julia, SpherePoint::finite(p.critical_points().c1), 10).0, PixelClass::Basin);
}
