//! Rasterized planar coverage: a pixel grid carrying the demand density,
//! pixel-level Voronoi partitions, r-limited cells, weighted centroids,
//! polar moments and the coverage objective.
//!
//! All sums run over member pixels in ascending pixel index so results do not
//! depend on how cells are computed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::roadnet::{NodeId, Point, RoadGraph};

pub const DEFAULT_RESOLUTION_M: f64 = 50.0;

const MASS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum PlaneError {
    #[error("grid has no pixels (box {min:?}..{max:?}, resolution {resolution})")]
    EmptyGrid {
        min: Point,
        max: Point,
        resolution: f64,
    },
    #[error("covariance of component {0} is not positive definite")]
    NonPositiveDefiniteCovariance(usize),
    #[error("mixture weights must be non-negative and sum to 1 (sum = {0})")]
    InvalidWeights(f64),
    #[error("mass vector has {found} entries, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("mass must be non-negative and sum to 1 (sum = {0})")]
    InvalidMass(f64),
    #[error("node {0} lies outside the bounding box")]
    NodeOutsideBox(NodeId),
    #[error("generator set is empty")]
    EmptyGeneratorSet,
    #[error("cell carries no mass")]
    ZeroMassCell,
    #[error("step fraction {0} outside (0, 1]")]
    InvalidStep(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min: Point,
    pub max: Point,
}

impl BoundingBox {
    pub fn new(min: Point, max: Point) -> Self {
        Self { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn diagonal(&self) -> f64 {
        self.min.dist(self.max)
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Box around the graph's nodes grown by `margin` on every side.
    pub fn around(graph: &RoadGraph, margin: f64) -> Self {
        let (lo, hi) = graph.extent();
        Self::new(
            Point::new(lo.x - margin, lo.y - margin),
            Point::new(hi.x + margin, hi.y + margin),
        )
    }
}

/// Pixel lattice over a box. Pixel `iy·nx + ix` has its center at
/// `min + ((ix + ½)·res, (iy + ½)·res)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelGrid {
    pub bbox: BoundingBox,
    pub resolution: f64,
    pub nx: usize,
    pub ny: usize,
}

impl PixelGrid {
    pub fn new(bbox: BoundingBox, resolution: f64) -> Result<Self, PlaneError> {
        let empty = || PlaneError::EmptyGrid {
            min: bbox.min,
            max: bbox.max,
            resolution,
        };
        if !(resolution > 0.0) || !(bbox.width() > 0.0) || !(bbox.height() > 0.0) {
            return Err(empty());
        }
        // a box that is an exact multiple of the resolution gets no sliver column
        let nx = ((bbox.width() / resolution) - 1e-9).ceil().max(1.0) as usize;
        let ny = ((bbox.height() / resolution) - 1e-9).ceil().max(1.0) as usize;
        Ok(Self {
            bbox,
            resolution,
            nx,
            ny,
        })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn center(&self, pixel: usize) -> Point {
        let ix = pixel % self.nx;
        let iy = pixel / self.nx;
        Point::new(
            self.bbox.min.x + (ix as f64 + 0.5) * self.resolution,
            self.bbox.min.y + (iy as f64 + 0.5) * self.resolution,
        )
    }

    /// `(ix, iy)` of a pixel index.
    pub fn coords(&self, pixel: usize) -> (usize, usize) {
        (pixel % self.nx, pixel / self.nx)
    }

    /// Pixel containing `p`; points on the max edge belong to the last pixel.
    pub fn pixel_of(&self, p: Point) -> Option<usize> {
        if !self.bbox.contains(p) {
            return None;
        }
        let ix = (((p.x - self.bbox.min.x) / self.resolution) as usize).min(self.nx - 1);
        let iy = (((p.y - self.bbox.min.y) / self.resolution) as usize).min(self.ny - 1);
        Some(iy * self.nx + ix)
    }
}

/// The demand density rasterized onto pixels; masses sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    grid: PixelGrid,
    mass: Vec<f64>,
}

impl GridField {
    pub fn new(grid: PixelGrid, mass: Vec<f64>) -> Result<Self, PlaneError> {
        if mass.len() != grid.len() {
            return Err(PlaneError::LengthMismatch {
                expected: grid.len(),
                found: mass.len(),
            });
        }
        let total: f64 = mass.iter().sum();
        if mass.iter().any(|&m| !(m >= 0.0)) || (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(PlaneError::InvalidMass(total));
        }
        Ok(Self { grid, mass })
    }

    pub fn uniform(grid: PixelGrid) -> Self {
        let n = grid.len();
        Self {
            grid,
            mass: vec![1.0 / n as f64; n],
        }
    }

    pub fn grid(&self) -> &PixelGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn mass(&self, pixel: usize) -> f64 {
        self.mass[pixel]
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn center(&self, pixel: usize) -> Point {
        self.grid.center(pixel)
    }

    /// Center of mass of the whole field.
    pub fn centroid(&self) -> Point {
        let all = PlanarCell {
            generator: Point::default(),
            pixels: (0..self.len()).collect(),
        };
        weighted_centroid(&all, self).expect("field mass sums to one")
    }
}

/// One bivariate normal component of a demand mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianComponent {
    pub weight: f64,
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
}

impl GaussianComponent {
    fn precision(&self) -> Option<([[f64; 2]; 2], f64)> {
        let [[a, b], [c, d]] = self.cov;
        let det = a * d - b * c;
        if !(a > 0.0) || !(det > 0.0) || (b - c).abs() > 1e-12 * (a.abs() + d.abs()) {
            return None;
        }
        Some(([[d / det, -b / det], [-c / det, a / det]], det))
    }
}

/// Gaussian mixture with validated components, evaluable anywhere in the plane.
#[derive(Debug, Clone)]
pub struct Mixture {
    terms: Vec<(f64, Point, [[f64; 2]; 2], f64)>,
}

impl Mixture {
    pub fn new(components: &[GaussianComponent]) -> Result<Self, PlaneError> {
        let wsum: f64 = components.iter().map(|c| c.weight).sum();
        if components.is_empty()
            || components.iter().any(|c| !(c.weight >= 0.0))
            || (wsum - 1.0).abs() > MASS_TOLERANCE
        {
            return Err(PlaneError::InvalidWeights(wsum));
        }
        let mut terms = Vec::with_capacity(components.len());
        for (i, c) in components.iter().enumerate() {
            let (prec, det) = c
                .precision()
                .ok_or(PlaneError::NonPositiveDefiniteCovariance(i))?;
            let norm = c.weight / (2.0 * std::f64::consts::PI * det.sqrt());
            terms.push((norm, Point::new(c.mean[0], c.mean[1]), prec, det));
        }
        Ok(Self { terms })
    }

    pub fn density(&self, p: Point) -> f64 {
        self.terms
            .iter()
            .map(|&(norm, mean, prec, _)| {
                let dx = p.x - mean.x;
                let dy = p.y - mean.y;
                let q = dx * (prec[0][0] * dx + prec[0][1] * dy)
                    + dy * (prec[1][0] * dx + prec[1][1] * dy);
                norm * (-0.5 * q).exp()
            })
            .sum()
    }
}

fn normalized(mut mass: Vec<f64>) -> Result<Vec<f64>, PlaneError> {
    let total: f64 = mass.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(PlaneError::InvalidMass(total));
    }
    mass.iter_mut().for_each(|m| *m /= total);
    Ok(mass)
}

/// Mixture density sampled at pixel centers and renormalized over the grid.
pub fn rasterize_mixture(
    bbox: BoundingBox,
    resolution: f64,
    components: &[GaussianComponent],
) -> Result<GridField, PlaneError> {
    let grid = PixelGrid::new(bbox, resolution)?;
    let mixture = Mixture::new(components)?;
    let raw = (0..grid.len())
        .map(|p| mixture.density(grid.center(p)))
        .collect();
    GridField::new(grid, normalized(raw)?)
}

/// Deposits each node's mass into the pixel containing the node.
pub fn rasterize_node_mass(
    bbox: BoundingBox,
    resolution: f64,
    graph: &RoadGraph,
    node_mass: &[f64],
) -> Result<GridField, PlaneError> {
    let grid = PixelGrid::new(bbox, resolution)?;
    if node_mass.len() != graph.len() {
        return Err(PlaneError::LengthMismatch {
            expected: graph.len(),
            found: node_mass.len(),
        });
    }
    let mut mass = vec![0.0; grid.len()];
    for (node, &m) in node_mass.iter().enumerate() {
        let pixel = grid
            .pixel_of(graph.coord(node))
            .ok_or(PlaneError::NodeOutsideBox(node))?;
        mass[pixel] += m;
    }
    GridField::new(grid, mass)
}

/// Pixel → nearest generator assignment, with per-generator member lists.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneVoronoi {
    owner: Vec<u32>,
    members: Vec<Vec<usize>>,
}

impl PlaneVoronoi {
    pub fn owner(&self, pixel: usize) -> usize {
        self.owner[pixel] as usize
    }

    pub fn owners(&self) -> impl Iterator<Item = usize> + '_ {
        self.owner.iter().map(|&g| g as usize)
    }

    pub fn generator_count(&self) -> usize {
        self.members.len()
    }

    /// Ascending pixel indices owned by `generator`.
    pub fn members(&self, generator: usize) -> &[usize] {
        &self.members[generator]
    }
}

/// Euclidean Voronoi partition of pixel centers; ties go to the smaller index.
pub fn plane_voronoi(field: &GridField, generators: &[Point]) -> Result<PlaneVoronoi, PlaneError> {
    if generators.is_empty() {
        return Err(PlaneError::EmptyGeneratorSet);
    }
    let grid = field.grid;
    let owner: Vec<u32> = (0..grid.len())
        .into_par_iter()
        .map(|p| {
            let c = grid.center(p);
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (i, g) in generators.iter().enumerate() {
                let d = g.dist2(c);
                if d < best_d {
                    best_d = d;
                    best = i;
                }
            }
            best as u32
        })
        .collect();
    let mut members = vec![Vec::new(); generators.len()];
    for (p, &g) in owner.iter().enumerate() {
        members[g as usize].push(p);
    }
    Ok(PlaneVoronoi { owner, members })
}

/// A set of pixels attributed to one generator (a full Voronoi cell or its
/// r-limited part).
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarCell {
    pub generator: Point,
    /// Ascending pixel indices.
    pub pixels: Vec<usize>,
}

/// The full Voronoi cell of `generator`.
pub fn voronoi_cell(assignment: &PlaneVoronoi, generator: usize, position: Point) -> PlanarCell {
    PlanarCell {
        generator: position,
        pixels: assignment.members(generator).to_vec(),
    }
}

/// Voronoi cell of `generator` restricted to pixel centers within `r` of it.
pub fn r_limited_cell(
    assignment: &PlaneVoronoi,
    field: &GridField,
    generator: usize,
    position: Point,
    r: f64,
) -> PlanarCell {
    let r2 = r * r;
    PlanarCell {
        generator: position,
        pixels: assignment
            .members(generator)
            .iter()
            .copied()
            .filter(|&p| field.center(p).dist2(position) <= r2)
            .collect(),
    }
}

pub fn cell_mass(cell: &PlanarCell, field: &GridField) -> f64 {
    cell.pixels.iter().map(|&p| field.mass(p)).sum()
}

pub fn weighted_centroid(cell: &PlanarCell, field: &GridField) -> Result<Point, PlaneError> {
    let mut total = 0.0;
    let mut sx = 0.0;
    let mut sy = 0.0;
    for &p in &cell.pixels {
        let m = field.mass(p);
        let c = field.center(p);
        total += m;
        sx += m * c.x;
        sy += m * c.y;
    }
    if total > 0.0 {
        Ok(Point::new(sx / total, sy / total))
    } else {
        Err(PlaneError::ZeroMassCell)
    }
}

/// `Σ ‖x − q‖²·mass(q)` over the cell's pixels.
pub fn polar_moment(cell: &PlanarCell, field: &GridField, x: Point) -> f64 {
    cell.pixels
        .iter()
        .map(|&p| field.center(p).dist2(x) * field.mass(p))
        .sum()
}

/// Coverage cost of the r-limited partition induced by `generators`.
pub fn coverage_objective(
    generators: &[Point],
    field: &GridField,
    r: f64,
) -> Result<f64, PlaneError> {
    let assignment = plane_voronoi(field, generators)?;
    Ok(generators
        .iter()
        .enumerate()
        .map(|(i, &x)| polar_moment(&r_limited_cell(&assignment, field, i, x, r), field, x))
        .sum())
}

/// Moves every generator a fraction `step` toward the centroid of its
/// r-limited cell. Generators whose cell carries no mass stay put.
pub fn lloyd_step(
    generators: &[Point],
    field: &GridField,
    r: f64,
    step: f64,
) -> Result<Vec<Point>, PlaneError> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(PlaneError::InvalidStep(step));
    }
    let assignment = plane_voronoi(field, generators)?;
    Ok(generators
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cell = r_limited_cell(&assignment, field, i, x, r);
            match weighted_centroid(&cell, field) {
                Ok(c) => x.lerp(c, step),
                Err(_) => x,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(side: f64, res: f64) -> PixelGrid {
        PixelGrid::new(
            BoundingBox::new(Point::new(0.0, 0.0), Point::new(side, side)),
            res,
        )
        .unwrap()
    }

    fn iso(weight: f64, x: f64, y: f64, var: f64) -> GaussianComponent {
        GaussianComponent {
            weight,
            mean: [x, y],
            cov: [[var, 0.0], [0.0, var]],
        }
    }

    #[test]
    fn grid_geometry() {
        let g = square(100.0, 10.0);
        assert_eq!((g.nx, g.ny), (10, 10));
        assert_eq!(g.center(0), Point::new(5.0, 5.0));
        assert_eq!(g.center(11), Point::new(15.0, 15.0));
        assert_eq!(g.pixel_of(Point::new(100.0, 100.0)), Some(99));
        assert_eq!(g.pixel_of(Point::new(-1.0, 0.0)), None);
        assert!(PixelGrid::new(BoundingBox::new(Point::default(), Point::default()), 1.0).is_err());
    }

    #[test]
    fn mixture_peak_at_center() {
        let bbox = BoundingBox::new(Point::new(0.0, 0.0), Point::new(90.0, 90.0));
        let f = rasterize_mixture(bbox, 10.0, &[iso(1.0, 45.0, 45.0, 400.0)]).unwrap();
        let argmax = (0..f.len())
            .max_by(|&a, &b| f.mass(a).total_cmp(&f.mass(b)))
            .unwrap();
        assert_eq!(f.center(argmax), Point::new(45.0, 45.0));
        assert!((f.masses().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wide_component_is_nearly_uniform() {
        // corner pixel center is 40√2 from the mean: ratio exp(3200/(2·1e6)) ≈ 1.0016
        let bbox = BoundingBox::new(Point::new(0.0, 0.0), Point::new(90.0, 90.0));
        let f = rasterize_mixture(bbox, 10.0, &[iso(1.0, 45.0, 45.0, 1e6)]).unwrap();
        let max = f.masses().iter().copied().fold(0.0, f64::max);
        let min = f.masses().iter().copied().fold(1.0, f64::min);
        assert!(max / min < 1.01);
        assert!((max / min - (3200.0f64 / 2e6).exp()).abs() < 1e-9);
    }

    #[test]
    fn mirrored_components_give_mirrored_field() {
        let bbox = BoundingBox::new(Point::new(0.0, 0.0), Point::new(100.0, 60.0));
        let f = rasterize_mixture(
            bbox,
            10.0,
            &[iso(0.5, 20.0, 30.0, 300.0), iso(0.5, 80.0, 30.0, 300.0)],
        )
        .unwrap();
        let g = f.grid();
        for p in 0..f.len() {
            let (ix, iy) = g.coords(p);
            let q = iy * g.nx + (g.nx - 1 - ix);
            assert!((f.mass(p) - f.mass(q)).abs() < 1e-12);
        }
    }

    #[test]
    fn mixture_validation() {
        let bbox = BoundingBox::new(Point::new(0.0, 0.0), Point::new(10.0, 10.0));
        let bad = GaussianComponent {
            weight: 1.0,
            mean: [5.0, 5.0],
            cov: [[1.0, 2.0], [2.0, 1.0]],
        };
        assert_eq!(
            rasterize_mixture(bbox, 1.0, &[bad]).unwrap_err(),
            PlaneError::NonPositiveDefiniteCovariance(0)
        );
        assert!(matches!(
            rasterize_mixture(bbox, 1.0, &[iso(0.4, 5.0, 5.0, 1.0)]),
            Err(PlaneError::InvalidWeights(_))
        ));
        assert!(matches!(
            rasterize_mixture(bbox, 0.0, &[iso(1.0, 5.0, 5.0, 1.0)]),
            Err(PlaneError::EmptyGrid { .. })
        ));
    }

    fn two_node_graph(a: Point, b: Point) -> RoadGraph {
        RoadGraph::new(&[(0, a), (1, b)], &[(0, 1, a.dist(b).max(1.0))]).unwrap()
    }

    #[test]
    fn node_mass_deposition() {
        let bbox = BoundingBox::new(Point::new(0.0, 0.0), Point::new(40.0, 40.0));
        let g = two_node_graph(Point::new(1.0, 1.0), Point::new(2.0, 2.0));
        let f = rasterize_node_mass(bbox, 10.0, &g, &[0.3, 0.7]).unwrap();
        assert!((f.mass(0) - 1.0).abs() < 1e-15);

        let f = rasterize_node_mass(bbox, 10.0, &g, &[1.0, 0.0]).unwrap();
        assert_eq!(f.masses().iter().filter(|&&m| m > 0.0).count(), 1);

        let nodes: Vec<_> = [(5.0, 5.0), (15.0, 5.0), (5.0, 15.0), (15.0, 15.0)]
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| (i, Point::new(x, y)))
            .collect();
        let g4 = RoadGraph::new(&nodes, &[(0, 1, 10.0), (0, 2, 10.0), (1, 3, 10.0)]).unwrap();
        let f = rasterize_node_mass(bbox, 10.0, &g4, &[0.25; 4]).unwrap();
        for p in [0, 1, 4, 5] {
            assert_eq!(f.mass(p), 0.25);
        }

        let outside = two_node_graph(Point::new(1.0, 1.0), Point::new(50.0, 1.0));
        assert_eq!(
            rasterize_node_mass(bbox, 10.0, &outside, &[0.5, 0.5]).unwrap_err(),
            PlaneError::NodeOutsideBox(1)
        );
    }

    #[test]
    fn voronoi_basics() {
        let f = GridField::uniform(square(100.0, 10.0));
        let one = plane_voronoi(&f, &[Point::new(3.0, 3.0)]).unwrap();
        assert!(one.owners().all(|g| g == 0));
        assert_eq!(
            plane_voronoi(&f, &[]).unwrap_err(),
            PlaneError::EmptyGeneratorSet
        );

        // an odd grid puts pixel centers on the midline x = 45
        let f9 = GridField::uniform(square(90.0, 10.0));
        let v = plane_voronoi(&f9, &[Point::new(25.0, 45.0), Point::new(65.0, 45.0)]).unwrap();
        let g = f9.grid();
        for p in 0..f9.len() {
            let (ix, iy) = g.coords(p);
            if ix == 4 {
                assert_eq!(v.owner(p), 0);
            } else {
                let mirror = iy * g.nx + (g.nx - 1 - ix);
                assert_eq!(v.owner(p), 1 - v.owner(mirror));
            }
        }
    }

    #[test]
    fn limited_cells_and_centroids() {
        let f = GridField::uniform(square(100.0, 10.0));
        let x = Point::new(50.0, 50.0);
        let v = plane_voronoi(&f, &[x]).unwrap();
        let full = r_limited_cell(&v, &f, 0, x, 1000.0);
        assert_eq!(full, voronoi_cell(&v, 0, x));
        assert!(weighted_centroid(&full, &f).unwrap().dist(x) < 1e-9);

        let tiny = r_limited_cell(&v, &f, 0, Point::new(55.0, 55.0), 4.0);
        assert_eq!(tiny.pixels, vec![55]);
        assert!(r_limited_cell(&v, &f, 0, Point::new(50.0, 50.0), 4.0)
            .pixels
            .is_empty());

        // disk of radius 25 at the center of a 100 m box
        let disk = r_limited_cell(&v, &f, 0, x, 25.0);
        let brute = (0..f.len())
            .filter(|&p| f.center(p).dist2(x) <= 625.0)
            .count();
        assert_eq!(disk.pixels.len(), brute);
        let area = disk.pixels.len() as f64 * 100.0;
        let ring = 2.0 * std::f64::consts::PI * 25.0 * 10.0;
        assert!((area - std::f64::consts::PI * 625.0).abs() <= ring);
    }

    #[test]
    fn centroid_and_moment_examples() {
        let grid = PixelGrid::new(
            BoundingBox::new(Point::new(-5.0, -5.0), Point::new(15.0, 5.0)),
            10.0,
        )
        .unwrap();
        let f = GridField::new(grid, vec![0.25, 0.75]).unwrap();
        let cell = PlanarCell {
            generator: Point::default(),
            pixels: vec![0, 1],
        };
        assert_eq!(weighted_centroid(&cell, &f).unwrap(), Point::new(7.5, 0.0));
        // both pixels 5 m from x = 5
        assert!((polar_moment(&cell, &f, Point::new(5.0, 0.0)) - 25.0).abs() < 1e-12);

        let single = PlanarCell {
            generator: Point::default(),
            pixels: vec![1],
        };
        let c = weighted_centroid(&single, &f).unwrap();
        assert_eq!(c, Point::new(10.0, 0.0));
        assert_eq!(polar_moment(&single, &f, c), 0.0);

        let f0 = GridField::new(grid, vec![1.0, 0.0]).unwrap();
        assert_eq!(
            weighted_centroid(&single, &f0).unwrap_err(),
            PlaneError::ZeroMassCell
        );
    }

    #[test]
    fn objective_examples() {
        let grid = PixelGrid::new(
            BoundingBox::new(Point::new(0.0, 0.0), Point::new(10.0, 10.0)),
            10.0,
        )
        .unwrap();
        let f = GridField::new(grid, vec![1.0]).unwrap();
        assert_eq!(
            coverage_objective(&[Point::new(5.0, 5.0)], &f, 1.0).unwrap(),
            0.0
        );
        let far = Point::new(5.0, 8.0);
        assert!((coverage_objective(&[far], &f, 10.0).unwrap() - 9.0).abs() < 1e-12);
        assert_eq!(coverage_objective(&[far], &f, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn lloyd_examples() {
        let f = GridField::uniform(square(100.0, 10.0));
        let center = Point::new(50.0, 50.0);
        assert!(lloyd_step(&[center], &f, 1e3, 1.0).unwrap()[0].dist(center) < 1e-9);
        let moved = lloyd_step(&[Point::new(7.0, 91.0)], &f, 1e3, 1.0).unwrap();
        assert!(moved[0].dist(center) < 1e-9);
        assert_eq!(
            lloyd_step(&[center], &f, 1e3, 0.0).unwrap_err(),
            PlaneError::InvalidStep(0.0)
        );

        // single pixel centered at (4, 0)
        let grid = PixelGrid::new(
            BoundingBox::new(Point::new(3.0, -1.0), Point::new(5.0, 1.0)),
            2.0,
        )
        .unwrap();
        let f1 = GridField::new(grid, vec![1.0]).unwrap();
        let half = lloyd_step(&[Point::new(0.0, 0.0)], &f1, 100.0, 0.5).unwrap();
        assert_eq!(half[0], Point::new(2.0, 0.0));
    }
}
