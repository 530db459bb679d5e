//! Dynamical plane of the map with θ = [0; 20, 1, 1, ...] and c1 of period 3.

use siegel::render::{render_julia, write_png, Palette, Raster, Rect};
use siegel::rotation::RotationNumber;
use siegel::dynamics::MapParams;
use siegel::verify::PERIOD_THREE_ALPHA;

fn main() {
    let theta = RotationNumber::parse_cf("20:1").unwrap();
    let p = MapParams::new(theta, PERIOD_THREE_ALPHA).unwrap();
    let rect = Rect::new(-2.0, 2.0, -2.0, 2.0).unwrap();
    let img = render_julia(&p, Raster::new(200, 200, rect).unwrap(), 10_000).unwrap();
    write_png(&img, &Palette::default(), "julia.png".as_ref()).unwrap();
    for (class, n) in img.counts() {
        println!("{class:?}: {n}");
    }
}
