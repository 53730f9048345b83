//! Convex hull of portfolio metric triples (quickhull).
//!
//! Coordinates are shifted by their minimum and divided by their range on each
//! axis before construction, since return and volatility live near 0.1 while
//! environmental scores live near 50. Facets are reported in original units.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::metrics::PortfolioSample;
use crate::error::{Error, Result};

/// Containment tolerance for facet half-space tests, original units.
pub const HULL_TOLERANCE: f64 = 1e-9;

/// Distance above which a standardized point counts as outside a face.
const OUTSIDE_EPS: f64 = 1e-12;

/// Minimum extent of the initial simplex in standardized coordinates.
const DEGENERACY_EPS: f64 = 1e-12;

type Point = [f64; 3];

/// A triangular hull facet: `normal · x <= offset` for points inside.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Facet {
    /// Point indices, counter-clockwise seen from outside.
    pub vertices: [usize; 3],
    /// Unit outward normal in original units.
    pub normal: [f64; 3],
    pub offset: f64,
}

impl Facet {
    pub fn signed_distance(&self, p: &Point) -> f64 {
        dot(&self.normal, p) - self.offset
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrontierHull {
    /// Sorted indices of the points that are hull vertices.
    pub vertices: Vec<usize>,
    pub facets: Vec<Facet>,
}

impl FrontierHull {
    /// True if `p` passes every facet half-space test at `tolerance`.
    pub fn contains(&self, p: &Point, tolerance: f64) -> bool {
        self.facets.iter().all(|f| f.signed_distance(p) <= tolerance)
    }
}

fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: &Point, b: &Point) -> Point {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: &Point) -> f64 {
    libm::sqrt(dot(a, a))
}

struct Face {
    v: [usize; 3],
    normal: Point,
    offset: f64,
    outside: Vec<usize>,
    alive: bool,
}

impl Face {
    fn distance(&self, p: &Point) -> f64 {
        dot(&self.normal, p) - self.offset
    }
}

struct Builder<'a> {
    pts: &'a [Point],
    faces: Vec<Face>,
    /// Directed edge (a, b) → face that owns it.
    edges: BTreeMap<(usize, usize), usize>,
}

impl<'a> Builder<'a> {
    fn add_face(&mut self, v: [usize; 3]) -> usize {
        let [a, b, c] = v.map(|i| self.pts[i]);
        let n = cross(&sub(&b, &a), &sub(&c, &a));
        let len = norm(&n);
        let normal = if len > 0.0 { n.map(|x| x / len) } else { n };
        let offset = dot(&normal, &a);
        let id = self.faces.len();
        for (x, y) in [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])] {
            self.edges.insert((x, y), id);
        }
        self.faces.push(Face { v, normal, offset, outside: Vec::new(), alive: true });
        id
    }

    fn kill_face(&mut self, id: usize) -> Vec<usize> {
        let v = self.faces[id].v;
        for (x, y) in [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])] {
            self.edges.remove(&(x, y));
        }
        self.faces[id].alive = false;
        core::mem::take(&mut self.faces[id].outside)
    }

    /// Assigns `q` to the first candidate face it lies above.
    fn assign(&mut self, q: usize, candidates: &[usize]) -> Option<usize> {
        let p = self.pts[q];
        let f =
            candidates.iter().copied().find(|&f| self.faces[f].alive && self.faces[f].distance(&p) > OUTSIDE_EPS)?;
        self.faces[f].outside.push(q);
        Some(f)
    }

    fn initial_simplex(&mut self) -> Result<[usize; 4]> {
        let pts = self.pts;
        let mut extremes = Vec::with_capacity(6);
        for axis in 0..3 {
            let by_axis = |a: &&usize, b: &&usize| pts[**a][axis].total_cmp(&pts[**b][axis]);
            let idx: Vec<usize> = (0..pts.len()).collect();
            extremes.push(*idx.iter().min_by(by_axis).expect("non-empty"));
            extremes.push(*idx.iter().max_by(by_axis).expect("non-empty"));
        }
        let mut best = (0.0, 0, 0);
        for (i, &a) in extremes.iter().enumerate() {
            for &b in &extremes[i + 1..] {
                let d = norm(&sub(&pts[a], &pts[b]));
                if d > best.0 {
                    best = (d, a, b);
                }
            }
        }
        let (span, i0, i1) = best;
        if span <= DEGENERACY_EPS {
            return Err(Error::DegenerateHull("all points coincide"));
        }
        let dir = sub(&pts[i1], &pts[i0]).map(|x| x / span);
        let (line_dist, i2) = (0..pts.len())
            .map(|i| (norm(&cross(&dir, &sub(&pts[i], &pts[i0]))), i))
            .fold((0.0, 0), |acc, x| if x.0 > acc.0 { x } else { acc });
        if line_dist <= DEGENERACY_EPS {
            return Err(Error::DegenerateHull("points are collinear"));
        }
        let n = cross(&sub(&pts[i1], &pts[i0]), &sub(&pts[i2], &pts[i0]));
        let n = n.map(|x| x / norm(&n));
        let (plane_dist, i3) = (0..pts.len())
            .map(|i| (dot(&n, &sub(&pts[i], &pts[i0])).abs(), i))
            .fold((0.0, 0), |acc, x| if x.0 > acc.0 { x } else { acc });
        if plane_dist <= DEGENERACY_EPS {
            return Err(Error::DegenerateHull("points are coplanar"));
        }
        Ok([i0, i1, i2, i3])
    }

    fn build(pts: &'a [Point]) -> Result<Vec<Face>> {
        let mut b = Builder { pts, faces: Vec::new(), edges: BTreeMap::new() };
        let simplex = b.initial_simplex()?;
        let centroid = simplex
            .iter()
            .fold([0.0; 3], |acc, &i| [acc[0] + pts[i][0], acc[1] + pts[i][1], acc[2] + pts[i][2]])
            .map(|x| x / 4.0);
        let [i0, i1, i2, i3] = simplex;
        for tri in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
            let [a, bb, c] = tri.map(|i| pts[i]);
            let n = cross(&sub(&bb, &a), &sub(&c, &a));
            let oriented = if dot(&n, &sub(&centroid, &a)) > 0.0 { [tri[0], tri[2], tri[1]] } else { tri };
            b.add_face(oriented);
        }
        let initial: Vec<usize> = (0..4).collect();
        for q in 0..pts.len() {
            if !simplex.contains(&q) {
                b.assign(q, &initial);
            }
        }

        let mut pending: Vec<usize> = initial;
        while let Some(f) = pending.pop() {
            if !b.faces[f].alive || b.faces[f].outside.is_empty() {
                continue;
            }
            let apex = *b.faces[f]
                .outside
                .iter()
                .max_by(|x, y| {
                    let face = &b.faces[f];
                    face.distance(&pts[**x]).total_cmp(&face.distance(&pts[**y])).then(y.cmp(x))
                })
                .expect("non-empty");
            let p = pts[apex];

            // Visible region: faces reachable from `f` that see the apex.
            let mut visible = vec![f];
            let mut is_visible = BTreeMap::from([(f, true)]);
            let mut horizon = Vec::new();
            let mut k = 0;
            while k < visible.len() {
                let face = visible[k];
                k += 1;
                let v = b.faces[face].v;
                for (x, y) in [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])] {
                    let nb = b.edges[&(y, x)];
                    let vis = *is_visible.entry(nb).or_insert_with(|| b.faces[nb].distance(&p) > OUTSIDE_EPS);
                    if vis {
                        if !visible.contains(&nb) {
                            visible.push(nb);
                        }
                    } else {
                        horizon.push((x, y));
                    }
                }
            }

            let mut orphans = Vec::new();
            for &face in &visible {
                orphans.extend(b.kill_face(face));
            }
            let new_faces: Vec<usize> = horizon.iter().map(|&(x, y)| b.add_face([x, y, apex])).collect();
            for q in orphans {
                if q == apex {
                    continue;
                }
                if b.assign(q, &new_faces).is_none() {
                    // Rare: q may only be above a surviving old face.
                    let live: Vec<usize> = (0..b.faces.len()).filter(|&i| b.faces[i].alive).collect();
                    pending.extend(b.assign(q, &live));
                }
            }
            pending.extend(new_faces);
        }
        Ok(b.faces.into_iter().filter(|f| f.alive).collect())
    }
}

/// Hull of raw 3D points.
pub fn build_hull_from_points(points: &[Point]) -> Result<FrontierHull> {
    if points.len() < 4 {
        return Err(Error::DegenerateHull("fewer than four points"));
    }
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::DegenerateHull("non-finite coordinate"));
    }
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let range: Point = [0, 1, 2].map(|k| hi[k] - lo[k]);
    if range.iter().any(|r| *r <= 0.0) {
        return Err(Error::DegenerateHull("points are coplanar"));
    }
    let standardized: Vec<Point> = points.iter().map(|p| [0, 1, 2].map(|k| (p[k] - lo[k]) / range[k])).collect();

    let faces = Builder::build(&standardized)?;

    let mut vertices: Vec<usize> = faces.iter().flat_map(|f| f.v).collect();
    vertices.sort_unstable();
    vertices.dedup();

    let facets = faces
        .iter()
        .map(|f| {
            // n·s = d in standardized space maps to Σ (n_k / r_k) x_k = const.
            let m: Point = [0, 1, 2].map(|k| f.normal[k] / range[k]);
            let len = norm(&m);
            let normal = m.map(|x| x / len);
            let offset = f.v.iter().map(|&i| dot(&normal, &points[i])).fold(f64::NEG_INFINITY, f64::max);
            Facet { vertices: f.v, normal, offset }
        })
        .collect();
    Ok(FrontierHull { vertices, facets })
}

/// Hull of the samples' `(mu, sigma, es)` triples; indices refer to slice positions.
pub fn build_hull(samples: &[PortfolioSample]) -> Result<FrontierHull> {
    let points: Vec<Point> = samples.iter().map(PortfolioSample::point).collect();
    build_hull_from_points(&points)
}
