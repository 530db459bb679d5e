//! Quick-look render of the parameter plane.
//!
//! cargo run --release --example param_plane [WIDTH HEIGHT]

use siegel::render::{render_param_plane, write_png, write_ppm, Palette, Raster, Rect};
use siegel::rotation::RotationNumber;

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).map(|s| s.parse().expect("pixel count")).collect();
    let (w, h) = match args[..] {
        [w, h] => (w, h),
        _ => (64, 59),
    };
    let raster = Raster::new(w, h, Rect::overview()).unwrap();
    let img = render_param_plane(&RotationNumber::golden(), raster, 20_000);
    let palette = Palette::default();
    write_ppm(&img, &palette, "param_plane.ppm".as_ref()).unwrap();
    write_png(&img, &palette, "param_plane.png".as_ref()).unwrap();
    for (class, n) in img.counts() {
        println!("{class:?}: {n}");
    }
}
