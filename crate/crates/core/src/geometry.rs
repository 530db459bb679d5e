//! Planar polyline utilities: winding numbers, simplicity testing,
//! point-to-segment distances and Hausdorff distances.

use num_complex::Complex64;
use robust::{orient2d, Coord};

fn coord(z: Complex64) -> Coord<f64> {
    Coord { x: z.re, y: z.im }
}

/// Winding number of the closed polyline `pts` (last point joined to the
/// first) around `origin`, rounded to the nearest integer.
pub fn winding_number(pts: &[Complex64], origin: Complex64) -> i64 {
    if pts.len() < 2 {
        return 0;
    }
    let total: f64 = pts
        .iter()
        .zip(pts.iter().cycle().skip(1))
        .map(|(&a, &b)| ((b - origin) / (a - origin)).arg())
        .sum();
    (total / std::f64::consts::TAU).round() as i64
}

/// Exact segment intersection test on closed segments.
pub fn segments_intersect(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    if a.re.max(b.re) < c.re.min(d.re)
        || c.re.max(d.re) < a.re.min(b.re)
        || a.im.max(b.im) < c.im.min(d.im)
        || c.im.max(d.im) < a.im.min(b.im)
    {
        return false;
    }
    let (a, b, c, d) = (coord(a), coord(b), coord(c), coord(d));
    let o1 = orient2d(a, b, c);
    let o2 = orient2d(a, b, d);
    let o3 = orient2d(c, d, a);
    let o4 = orient2d(c, d, b);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0)) && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0)) {
        return true;
    }
    let on = |p: Coord<f64>, q: Coord<f64>, r: Coord<f64>| {
        r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    (o1 == 0.0 && on(a, b, c)) || (o2 == 0.0 && on(a, b, d)) || (o3 == 0.0 && on(c, d, a)) || (o4 == 0.0 && on(c, d, b))
}

/// Whether the closed polyline through `pts` has no self-intersections.
///
/// Segments are bucketed on a uniform grid with cells about twice the mean
/// segment length; only segments sharing a cell are tested pairwise, and segments that are
/// consecutive along the polyline are allowed to share their endpoint.
/// Repeated vertices make the polyline non-simple.
pub fn is_simple_closed(pts: &[Complex64]) -> bool {
    let n = pts.len();
    if n < 3 {
        return false;
    }
    let (mut lo, mut hi) = (pts[0], pts[0]);
    for p in pts {
        lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    // cells a few segment lengths wide; long segments are split into pieces
    // no longer than a cell so each is filed under at most a 2x2 block
    let seg_len = |i: usize| (pts[(i + 1) % n] - pts[i]).norm();
    let mean = (0..n).map(seg_len).sum::<f64>() / n as f64;
    let extent = (hi.re - lo.re).max(hi.im - lo.im);
    let h = (2.0 * mean).max(extent / 65536.0).max(f64::MIN_POSITIVE);
    let eps = 1e-9 * h;
    let side = ((extent / h) as u64 + 2).max(1);
    let mut entries: Vec<(u64, u32)> = Vec::with_capacity(2 * n);
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        let pieces = ((seg_len(i) / h).ceil() as usize).max(1);
        let mut start = a;
        for k in 1..=pieces {
            let end = if k == pieces { b } else { a + (b - a) * (k as f64 / pieces as f64) };
            let cell = |x: f64, o: f64| ((x - o) / h).floor().max(0.0) as u64;
            let (x0, x1) = (cell(start.re.min(end.re) - eps, lo.re), cell(start.re.max(end.re) + eps, lo.re));
            let (y0, y1) = (cell(start.im.min(end.im) - eps, lo.im), cell(start.im.max(end.im) + eps, lo.im));
            for gy in y0..=y1 {
                for gx in x0..=x1 {
                    entries.push((gy * side + gx, i as u32));
                }
            }
            start = end;
        }
    }
    entries.sort_unstable();
    entries.dedup();
    let grid = entries.chunk_by(|x, y| x.0 == y.0).map(|c| c.iter().map(|e| e.1).collect::<Vec<u32>>());
    for cell in grid {
        for (k, &i) in cell.iter().enumerate() {
            for &j in &cell[k + 1..] {
                let (i, j) = (i as usize, j as usize);
                let adjacent = (i + 1) % n == j || (j + 1) % n == i;
                let (a, b) = (pts[i], pts[(i + 1) % n]);
                let (c, d) = (pts[j], pts[(j + 1) % n]);
                if adjacent {
                    // consecutive segments share one vertex; they may only
                    // meet there, i.e. must not fold back onto each other
                    let (shared, p, q) = if (i + 1) % n == j { (b, a, d) } else { (a, b, c) };
                    if a == b || c == d {
                        return false;
                    }
                    if orient2d(coord(p), coord(shared), coord(q)) == 0.0 {
                        let dp = p - shared;
                        let dq = q - shared;
                        if dp.re * dq.re + dp.im * dq.im > 0.0 {
                            return false;
                        }
                    }
                    if n == 3 {
                        continue;
                    }
                } else if segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
    }
    true
}

/// Distance from `p` to the segment `[a, b]` and the segment parameter of
/// the closest point.
pub fn point_segment(p: Complex64, a: Complex64, b: Complex64) -> (f64, f64) {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return ((p - a).norm(), 0.0);
    }
    let t = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    ((p - (a + d * t)).norm(), t)
}

/// Nearest-neighbour search over a point set sorted by real part.
pub struct PointIndex {
    pts: Vec<Complex64>,
}

impl PointIndex {
    pub fn new(points: &[Complex64]) -> Self {
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a.re.total_cmp(&b.re));
        Self { pts }
    }

    pub fn nearest_distance(&self, q: Complex64) -> f64 {
        if self.pts.is_empty() {
            return f64::INFINITY;
        }
        let start = self.pts.partition_point(|p| p.re < q.re);
        let mut best = f64::INFINITY;
        for p in &self.pts[start..] {
            if p.re - q.re >= best {
                break;
            }
            best = best.min((p - q).norm());
        }
        for p in self.pts[..start].iter().rev() {
            if q.re - p.re >= best {
                break;
            }
            best = best.min((p - q).norm());
        }
        best
    }
}

/// Directed distance `sup_{a∈A} inf_{b∈B} |a − b|`.
pub fn directed_hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let index = PointIndex::new(b);
    a.iter().map(|&p| index.nearest_distance(p)).fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between finite point sets.
pub fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

/// Symmetric Hausdorff distance between closed polylines, measuring each
/// vertex against the other polyline's segments.
pub fn polyline_hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let directed = |a: &[Complex64], b: &[Complex64]| -> f64 {
        a.iter()
            .map(|&p| {
                (0..b.len())
                    .map(|i| point_segment(p, b[i], b[(i + 1) % b.len()]).0)
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn circle(n: usize, r: f64) -> Vec<Complex64> {
        (0..n).map(|k| Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / n as f64)).collect()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn winding_of_circles() {
        let pts = circle(100, 1.0);
        assert_eq!(winding_number(&pts, c(0.0, 0.0)), 1);
        assert_eq!(winding_number(&pts, c(2.0, 0.0)), 0);
        let rev: Vec<_> = pts.iter().rev().copied().collect();
        assert_eq!(winding_number(&rev, c(0.1, 0.1)), -1);
        let twice: Vec<_> = (0..200).map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 100.0)).collect();
        assert_eq!(winding_number(&twice, c(0.0, 0.0)), 2);
    }

    #[test]
    fn simple_polygons() {
        assert!(is_simple_closed(&circle(20_000, 1.0)));
        assert!(is_simple_closed(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]));
        // bow tie
        assert!(!is_simple_closed(&[c(0.0, 0.0), c(1.0, 1.0), c(1.0, 0.0), c(0.0, 1.0)]));
        // repeated vertex
        assert!(!is_simple_closed(&[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]));
        // spike folding back onto its own edge
        assert!(!is_simple_closed(&[c(0.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]));
    }

    #[test]
    fn swapped_vertices_break_simplicity() {
        let mut pts = circle(1000, 1.0);
        pts.swap(100, 400);
        assert!(!is_simple_closed(&pts));
    }

    #[test]
    fn segment_intersection_cases() {
        assert!(segments_intersect(c(0.0, 0.0), c(1.0, 1.0), c(0.0, 1.0), c(1.0, 0.0)));
        assert!(!segments_intersect(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)));
        // touching at an endpoint
        assert!(segments_intersect(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)));
        // collinear overlapping
        assert!(segments_intersect(c(0.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)));
        assert!(!segments_intersect(c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)));
    }

    #[test]
    fn point_to_segment() {
        let (d, t) = point_segment(c(0.5, 1.0), c(0.0, 0.0), c(1.0, 0.0));
        assert!((d - 1.0).abs() < 1e-15 && (t - 0.5).abs() < 1e-15);
        let (d, t) = point_segment(c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        assert!((d - 1.0).abs() < 1e-15 && t == 0.0);
    }

    #[test]
    fn hausdorff_of_concentric_circles() {
        let a = circle(500, 1.0);
        let b: Vec<_> = a.iter().map(|z| z * 1.01).collect();
        assert!((hausdorff(&a, &b) - 0.01).abs() < 1e-6);
        assert_eq!(hausdorff(&a, &a), 0.0);
    }

    #[test]
    fn polyline_hausdorff_ignores_sampling() {
        let a = circle(64, 1.0);
        let b: Vec<_> = circle(64, 1.0).iter().map(|z| z * Complex64::from_polar(1.0, 0.05)).collect();
        // vertex sets differ by a chord but lie on each other's polylines up to sagitta
        assert!(hausdorff(&a, &b) > 0.04);
        assert!(polyline_hausdorff(&a, &b) < 2e-3);
    }

    proptest! {
        #[test]
        fn nearest_distance_matches_brute_force(
            pts in proptest::collection::vec((-10f64..10.0, -10f64..10.0), 1..60),
            q in (-12f64..12.0, -12f64..12.0),
        ) {
            let pts: Vec<_> = pts.into_iter().map(|(x, y)| c(x, y)).collect();
            let q = c(q.0, q.1);
            let brute = pts.iter().map(|p| (p - q).norm()).fold(f64::INFINITY, f64::min);
            prop_assert_eq!(PointIndex::new(&pts).nearest_distance(q), brute);
        }

        #[test]
        fn hausdorff_is_symmetric(
            a in proptest::collection::vec((-5f64..5.0, -5f64..5.0), 1..30),
            b in proptest::collection::vec((-5f64..5.0, -5f64..5.0), 1..30),
        ) {
            let a: Vec<_> = a.into_iter().map(|(x, y)| c(x, y)).collect();
            let b: Vec<_> = b.into_iter().map(|(x, y)| c(x, y)).collect();
            prop_assert_eq!(hausdorff(&a, &b), hausdorff(&b, &a));
        }
    }
}
