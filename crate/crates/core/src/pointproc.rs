//! Planar point patterns in a rectangular window.

use std::f64::consts::PI;
use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.distance_sq(other).sqrt()
    }

    pub fn distance_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let w = Self { x_min, x_max, y_min, y_max };
        w.validate()?;
        Ok(w)
    }

    /// Square of the given side centered at the origin.
    pub fn centered_square(side: f64) -> Result<Self> {
        Self::new(-side / 2.0, side / 2.0, -side / 2.0, side / 2.0)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite());
        if !finite || self.x_max <= self.x_min || self.y_max <= self.y_min {
            return Err(invalid(format!("degenerate window {self:?}")));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    /// Radius of the largest disk centered at the window center that fits inside.
    pub fn inradius(&self) -> f64 {
        0.5 * self.width().min(self.height())
    }

    fn dilated(&self, margin: f64) -> Window {
        Window {
            x_min: self.x_min - margin,
            x_max: self.x_max + margin,
            y_min: self.y_min - margin,
            y_max: self.y_max + margin,
        }
    }

    /// Maps a point onto the window, treating it as a torus.
    pub fn wrap(&self, p: Point) -> Point {
        Point::new(
            self.x_min + (p.x - self.x_min).rem_euclid(self.width()),
            self.y_min + (p.y - self.y_min).rem_euclid(self.height()),
        )
    }

    /// Shortest displacement between two points on the torus.
    pub fn toroidal_distance(&self, a: &Point, b: &Point) -> f64 {
        let wrap1 = |d: f64, len: f64| {
            let d = d.rem_euclid(len);
            d.min(len - d)
        };
        let dx = wrap1(a.x - b.x, self.width());
        let dy = wrap1(a.y - b.y, self.height());
        (dx * dx + dy * dy).sqrt()
    }

    fn uniform_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        Point::new(
            self.x_min + rng.random::<f64>() * self.width(),
            self.y_min + rng.random::<f64>() * self.height(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelTag {
    Ppp,
    Lattice,
    MaternHardcore,
    ThomasCluster,
}

impl ModelTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelTag::Ppp => "ppp",
            ModelTag::Lattice => "lattice",
            ModelTag::MaternHardcore => "matern_hardcore",
            ModelTag::ThomasCluster => "thomas_cluster",
        }
    }
}

/// Generating model of a node pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProcessModel {
    Ppp { density: f64 },
    /// Square grid of spacing `1/sqrt(density)` anchored at the window's lower-left
    /// corner; each coordinate optionally jittered by up to `jitter_fraction` of a spacing.
    Lattice { density: f64, jitter_fraction: f64 },
    /// Matérn type II: a parent PPP is thinned, keeping a point only if no other
    /// parent within `hardcore_radius` carries a smaller mark.
    MaternHardcore { parent_density: f64, hardcore_radius: f64 },
    ThomasCluster { parent_density: f64, mean_cluster_size: f64, scatter_sigma: f64 },
}

impl ProcessModel {
    pub fn ppp(density: f64) -> Self {
        ProcessModel::Ppp { density }
    }

    pub fn lattice(density: f64) -> Self {
        ProcessModel::Lattice { density, jitter_fraction: 0.0 }
    }

    /// Defaults giving a realized density close to 1.
    pub fn matern_default() -> Self {
        ProcessModel::MaternHardcore { parent_density: 2.0, hardcore_radius: 0.5 }
    }

    pub fn thomas_default() -> Self {
        ProcessModel::ThomasCluster { parent_density: 0.1, mean_cluster_size: 10.0, scatter_sigma: 1.0 }
    }

    pub fn tag(&self) -> ModelTag {
        match self {
            ProcessModel::Ppp { .. } => ModelTag::Ppp,
            ProcessModel::Lattice { .. } => ModelTag::Lattice,
            ProcessModel::MaternHardcore { .. } => ModelTag::MaternHardcore,
            ProcessModel::ThomasCluster { .. } => ModelTag::ThomasCluster,
        }
    }

    /// Intensity of the stationary process (before window effects).
    pub fn intensity(&self) -> f64 {
        match *self {
            ProcessModel::Ppp { density } | ProcessModel::Lattice { density, .. } => density,
            ProcessModel::MaternHardcore { parent_density, hardcore_radius } => {
                let a = parent_density * PI * hardcore_radius * hardcore_radius;
                (1.0 - (-a).exp()) / (PI * hardcore_radius * hardcore_radius)
            }
            ProcessModel::ThomasCluster { parent_density, mean_cluster_size, .. } => {
                parent_density * mean_cluster_size
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match *self {
            ProcessModel::Ppp { density } => positive("density", density),
            ProcessModel::Lattice { density, jitter_fraction } => {
                positive("density", density)?;
                if !(0.0..0.5).contains(&jitter_fraction) {
                    return Err(invalid(format!("jitter_fraction must lie in [0, 0.5), got {jitter_fraction}")));
                }
                Ok(())
            }
            ProcessModel::MaternHardcore { parent_density, hardcore_radius } => {
                positive("parent_density", parent_density)?;
                positive("hardcore_radius", hardcore_radius)
            }
            ProcessModel::ThomasCluster { parent_density, mean_cluster_size, scatter_sigma } => {
                positive("parent_density", parent_density)?;
                positive("mean_cluster_size", mean_cluster_size)?;
                positive("scatter_sigma", scatter_sigma)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointPattern {
    pub window: Window,
    pub points: Vec<Point>,
    pub model_tag: ModelTag,
    /// λ for a PPP; the realized density (count / area) for every other model.
    pub nominal_density: f64,
}

impl PointPattern {
    pub fn new(window: Window, points: Vec<Point>, model_tag: ModelTag, nominal_density: f64) -> Result<Self> {
        window.validate()?;
        if !(nominal_density > 0.0) {
            return Err(invalid("nominal density must be positive"));
        }
        if let Some(p) = points.iter().find(|p| !window.contains(p)) {
            return Err(invalid(format!("point {p:?} lies outside {window:?}")));
        }
        Ok(Self { window, points, model_tag, nominal_density })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Writes `x,y` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y"])?;
        for p in &self.points {
            w.write_record([p.x.to_string(), p.y.to_string()])?;
        }
        w.flush()
    }
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    // The parameters were validated, so construction cannot fail.
    let dist = Poisson::new(mean).expect("positive Poisson mean");
    dist.sample(rng) as usize
}

fn ppp_points<R: Rng + ?Sized>(density: f64, window: &Window, rng: &mut R) -> Vec<Point> {
    let n = poisson_count(density * window.area(), rng);
    (0..n).map(|_| window.uniform_point(rng)).collect()
}

fn lattice_points<R: Rng + ?Sized>(density: f64, jitter: f64, window: &Window, rng: &mut R) -> Vec<Point> {
    let spacing = 1.0 / density.sqrt();
    let nx = (window.width() / spacing).ceil() as usize;
    let ny = (window.height() / spacing).ceil() as usize;
    let mut points = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = window.y_min + j as f64 * spacing;
        if y >= window.y_max {
            continue;
        }
        for i in 0..nx {
            let x = window.x_min + i as f64 * spacing;
            if x >= window.x_max {
                continue;
            }
            let mut p = Point::new(x, y);
            if jitter > 0.0 {
                let amp = jitter * spacing;
                p.x += rng.random_range(-amp..amp);
                p.y += rng.random_range(-amp..amp);
                p = window.wrap(p);
            }
            points.push(p);
        }
    }
    points
}

/// Uniform-grid bucket index over a window, used for fixed-radius neighbor queries.
struct Buckets {
    window: Window,
    cell: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<usize>>,
}

impl Buckets {
    fn new(window: Window, cell: f64, points: &[Point]) -> Self {
        let nx = ((window.width() / cell).ceil() as usize).max(1);
        let ny = ((window.height() / cell).ceil() as usize).max(1);
        let mut b = Self { window, cell, nx, ny, cells: vec![Vec::new(); nx * ny] };
        for (i, p) in points.iter().enumerate() {
            let (cx, cy) = b.cell_of(p);
            b.cells[cy * nx + cx].push(i);
        }
        b
    }

    fn cell_of(&self, p: &Point) -> (usize, usize) {
        let cx = (((p.x - self.window.x_min) / self.cell) as usize).min(self.nx - 1);
        let cy = (((p.y - self.window.y_min) / self.cell) as usize).min(self.ny - 1);
        (cx, cy)
    }

    fn neighbors(&self, p: &Point) -> impl Iterator<Item = usize> + '_ {
        let (cx, cy) = self.cell_of(p);
        let xs = cx.saturating_sub(1)..=(cx + 1).min(self.nx - 1);
        let ys = cy.saturating_sub(1)..=(cy + 1).min(self.ny - 1);
        ys.flat_map(move |y| xs.clone().map(move |x| y * self.nx + x))
            .flat_map(move |c| self.cells[c].iter().copied())
    }
}

fn matern_points<R: Rng + ?Sized>(parent_density: f64, radius: f64, window: &Window, rng: &mut R) -> Vec<Point> {
    // Parents are drawn on a window dilated by the hard-core radius so that
    // points near the border see their full competition neighborhood.
    let outer = window.dilated(radius);
    let parents = ppp_points(parent_density, &outer, rng);
    let marks: Vec<f64> = parents.iter().map(|_| rng.random::<f64>()).collect();
    let buckets = Buckets::new(outer, radius, &parents);
    let r2 = radius * radius;
    parents
        .iter()
        .enumerate()
        .filter(|(i, p)| {
            window.contains(p)
                && buckets
                    .neighbors(p)
                    .all(|j| j == *i || marks[j] > marks[*i] || parents[j].distance_sq(p) >= r2)
        })
        .map(|(_, p)| *p)
        .collect()
}

fn thomas_points<R: Rng + ?Sized>(
    parent_density: f64,
    mean_size: f64,
    sigma: f64,
    window: &Window,
    rng: &mut R,
) -> Vec<Point> {
    // Parents outside the window still scatter offspring into it.
    let outer = window.dilated(4.0 * sigma);
    let parents = ppp_points(parent_density, &outer, rng);
    let offset = Normal::new(0.0, sigma).expect("positive scatter");
    let mut points = Vec::new();
    for parent in parents {
        let n = poisson_count(mean_size, rng);
        for _ in 0..n {
            let p = Point::new(parent.x + offset.sample(rng), parent.y + offset.sample(rng));
            if window.contains(&p) {
                points.push(p);
            }
        }
    }
    points
}

/// Draws one realization of `model` inside `window`.
pub fn sample_pattern<R: Rng + ?Sized>(model: &ProcessModel, window: &Window, rng: &mut R) -> Result<PointPattern> {
    window.validate()?;
    model.validate()?;
    let points = match *model {
        ProcessModel::Ppp { density } => ppp_points(density, window, rng),
        ProcessModel::Lattice { density, jitter_fraction } => lattice_points(density, jitter_fraction, window, rng),
        ProcessModel::MaternHardcore { parent_density, hardcore_radius } => {
            matern_points(parent_density, hardcore_radius, window, rng)
        }
        ProcessModel::ThomasCluster { parent_density, mean_cluster_size, scatter_sigma } => {
            thomas_points(parent_density, mean_cluster_size, scatter_sigma, window, rng)
        }
    };
    let nominal_density = match *model {
        ProcessModel::Ppp { density } => density,
        // an empty realization still needs a positive density tag
        _ => (points.len() as f64 / window.area()).max(f64::MIN_POSITIVE),
    };
    Ok(PointPattern { window: *window, points, model_tag: model.tag(), nominal_density })
}

/// Index of the point closest to `target`; ties go to the lowest index.
pub fn nearest_to(pattern: &PointPattern, target: Point) -> Result<usize> {
    nearest_in(&pattern.points, target).ok_or(Error::EmptyPattern)
}

pub(crate) fn nearest_in(points: &[Point], target: Point) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in points.iter().enumerate() {
        let d = p.distance_sq(&target);
        if best.map_or(true, |(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i)
}

/// The `k` points closest to `target`, nearest first (ties by index).
pub fn k_nearest_to(pattern: &PointPattern, target: Point, k: usize) -> Result<Vec<usize>> {
    if pattern.is_empty() {
        return Err(Error::EmptyPattern);
    }
    if k > pattern.len() {
        return Err(invalid(format!("asked for {k} nearest points of a {}-point pattern", pattern.len())));
    }
    let mut idx: Vec<usize> = (0..pattern.len()).collect();
    idx.sort_by(|&a, &b| {
        let da = pattern.points[a].distance_sq(&target);
        let db = pattern.points[b].distance_sq(&target);
        da.total_cmp(&db).then(a.cmp(&b))
    });
    idx.truncate(k);
    Ok(idx)
}

/// Uniformly distributed unit vector, by rejection from the unit disk.
pub(crate) fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    loop {
        let x = 2.0 * rng.random::<f64>() - 1.0;
        let y = 2.0 * rng.random::<f64>() - 1.0;
        let r2 = x * x + y * y;
        if r2 > 1e-12 && r2 <= 1.0 {
            let r = r2.sqrt();
            return (x / r, y / r);
        }
    }
}

/// Moves every point by `v` in its own uniformly random direction and wraps
/// the result onto the window torus.
pub fn random_walk_step<R: Rng + ?Sized>(pattern: &PointPattern, v: f64, rng: &mut R) -> Result<PointPattern> {
    let mut out = pattern.clone();
    random_walk_in_place(&mut out.points, &out.window, v, rng)?;
    Ok(out)
}

pub(crate) fn random_walk_in_place<R: Rng + ?Sized>(
    points: &mut [Point],
    window: &Window,
    v: f64,
    rng: &mut R,
) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(invalid(format!("speed must be non-negative, got {v}")));
    }
    if v == 0.0 {
        return Ok(());
    }
    for p in points.iter_mut() {
        let (dx, dy) = random_direction(rng);
        *p = window.wrap(Point::new(p.x + v * dx, p.y + v * dy));
    }
    Ok(())
}
