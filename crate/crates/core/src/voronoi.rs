//! Exact largest-empty-circle placement for 2D problems.
//!
//! The Voronoi diagram of the high-cost points is taken as the dual of their
//! Delaunay triangulation (built with `spade`, which uses exact
//! orientation and in-circle predicates). The largest empty circle centred in
//! the box is attained at one of: a Voronoi vertex inside the box, a point
//! where a Voronoi edge crosses the boundary, or a box corner. Vertices
//! outside the box are additionally clamped onto it.

use std::collections::HashMap;

use spade::{DelaunayTriangulation, HasPosition, Point2, Triangulation};
use thiserror::Error;

use crate::geometry::{min_distance_to_set, PointSet};
use crate::leh::{LehCalculator, LehPlacement};
use crate::problem::Problem;
use crate::rng::RngStream;

/// Sites closer than this are merged before triangulating.
pub const DUPLICATE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum VoronoiError {
    #[error("need at least 3 distinct sites, got {0}")]
    TooFewSites(usize),
    #[error("all sites are collinear")]
    Collinear,
    #[error("site {0} has a non-finite or out-of-range coordinate")]
    InvalidSite(usize),
}

/// Far end of a Voronoi edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeEnd {
    Vertex(usize),
    /// Unbounded edge leaving `from` along this unit direction.
    Ray([f64; 2]),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoronoiEdge {
    pub from: usize,
    pub to: EdgeEnd,
    /// The two sites this edge separates (indices into `sites`).
    pub sites: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiDiagram {
    /// Distinct sites after merging near-duplicates.
    pub sites: Vec<[f64; 2]>,
    pub vertices: Vec<[f64; 2]>,
    /// Sites equidistant from each vertex (three, or more when cocircular).
    pub vertex_sites: Vec<Vec<usize>>,
    pub edges: Vec<VoronoiEdge>,
}

#[derive(Debug, Clone, Copy)]
struct Site {
    pos: Point2<f64>,
    index: usize,
}

impl HasPosition for Site {
    type Scalar = f64;

    fn position(&self) -> Point2<f64> {
        self.pos
    }
}

/// Removes sites within [`DUPLICATE_TOLERANCE`] of an earlier kept site.
pub fn dedup_sites(sites: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut order: Vec<usize> = (0..sites.len()).collect();
    order.sort_by(|&a, &b| {
        sites[a][0]
            .total_cmp(&sites[b][0])
            .then(sites[a][1].total_cmp(&sites[b][1]))
            .then(a.cmp(&b))
    });
    let mut kept: Vec<[f64; 2]> = Vec::with_capacity(sites.len());
    // `kept` stays sorted by x, so only a short suffix can be within tolerance.
    for &i in &order {
        let s = sites[i];
        let dup = kept
            .iter()
            .rev()
            .take_while(|k| s[0] - k[0] <= DUPLICATE_TOLERANCE)
            .any(|k| ((s[0] - k[0]).powi(2) + (s[1] - k[1]).powi(2)).sqrt() <= DUPLICATE_TOLERANCE);
        if !dup {
            kept.push(s);
        }
    }
    kept
}

fn snap(v: f64) -> f64 {
    if v.abs() < spade::MIN_ALLOWED_VALUE {
        0.0
    } else {
        v
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Voronoi diagram of at least three non-collinear sites.
///
/// Vertices are circumcentres of Delaunay triangles; cocircular triangles
/// produce coincident circumcentres, which are merged into one vertex.
pub fn build_voronoi(sites: &[[f64; 2]]) -> Result<VoronoiDiagram, VoronoiError> {
    for (i, s) in sites.iter().enumerate() {
        if !(s[0].is_finite() && s[1].is_finite())
            || s[0].abs() > spade::MAX_ALLOWED_VALUE
            || s[1].abs() > spade::MAX_ALLOWED_VALUE
        {
            return Err(VoronoiError::InvalidSite(i));
        }
    }
    let sites: Vec<[f64; 2]> = dedup_sites(sites)
        .into_iter()
        .map(|s| [snap(s[0]), snap(s[1])])
        .collect();
    if sites.len() < 3 {
        return Err(VoronoiError::TooFewSites(sites.len()));
    }
    let elements: Vec<Site> = sites
        .iter()
        .enumerate()
        .map(|(index, s)| Site {
            pos: Point2::new(s[0], s[1]),
            index,
        })
        .collect();
    let tri: DelaunayTriangulation<Site> =
        DelaunayTriangulation::bulk_load(elements).map_err(|_| VoronoiError::InvalidSite(0))?;
    if tri.num_inner_faces() == 0 {
        return Err(VoronoiError::Collinear);
    }

    let scale = sites
        .iter()
        .flat_map(|s| s.iter())
        .fold(1.0f64, |m, v| m.max(v.abs()));
    let merge_tol = 1e-10 * scale;

    // One raw vertex per Delaunay triangle.
    let mut raw_index = HashMap::new();
    let mut raw_pos = Vec::new();
    let mut raw_sites = Vec::new();
    for face in tri.inner_faces() {
        raw_index.insert(face.fix().index(), raw_pos.len());
        let c = face.circumcenter();
        raw_pos.push([c.x, c.y]);
        raw_sites.push(face.vertices().map(|v| v.data().index));
    }

    // Merge coincident circumcentres of adjacent triangles.
    let mut uf = UnionFind((0..raw_pos.len()).collect());
    for edge in tri.undirected_edges() {
        let d = edge.as_directed();
        if let (Some(f1), Some(f2)) = (d.face().as_inner(), d.rev().face().as_inner()) {
            let (a, b) = (raw_index[&f1.fix().index()], raw_index[&f2.fix().index()]);
            let (pa, pb) = (raw_pos[a], raw_pos[b]);
            if ((pa[0] - pb[0]).powi(2) + (pa[1] - pb[1]).powi(2)).sqrt() <= merge_tol {
                uf.union(a, b);
            }
        }
    }
    let mut vertex_of_raw = vec![usize::MAX; raw_pos.len()];
    let mut vertices = Vec::new();
    let mut vertex_sites: Vec<Vec<usize>> = Vec::new();
    for r in 0..raw_pos.len() {
        let root = uf.find(r);
        if vertex_of_raw[root] == usize::MAX {
            vertex_of_raw[root] = vertices.len();
            vertices.push(raw_pos[root]);
            vertex_sites.push(Vec::new());
        }
        let v = vertex_of_raw[root];
        vertex_of_raw[r] = v;
        for s in raw_sites[r] {
            if !vertex_sites[v].contains(&s) {
                vertex_sites[v].push(s);
            }
        }
    }
    for vs in &mut vertex_sites {
        vs.sort_unstable();
    }

    let mut edges = Vec::new();
    for edge in tri.undirected_edges() {
        let d = edge.as_directed();
        let [a, b] = d.vertices().map(|v| v.data().index);
        let left = d
            .face()
            .as_inner()
            .map(|f| vertex_of_raw[raw_index[&f.fix().index()]]);
        let right = d
            .rev()
            .face()
            .as_inner()
            .map(|f| vertex_of_raw[raw_index[&f.fix().index()]]);
        match (left, right) {
            (Some(u), Some(v)) if u != v => edges.push(VoronoiEdge {
                from: u,
                to: EdgeEnd::Vertex(v),
                sites: (a.min(b), a.max(b)),
            }),
            (Some(_), Some(_)) => {}
            (Some(u), None) | (None, Some(u)) => {
                // Hull edge: the ray leaves the triangle's circumcentre
                // perpendicular to the edge, away from the triangle's third site.
                let face = if left.is_some() {
                    d.face().as_inner()
                } else {
                    d.rev().face().as_inner()
                }
                .expect("inner face");
                let third = face
                    .vertices()
                    .into_iter()
                    .map(|v| v.data().index)
                    .find(|&s| s != a && s != b)
                    .expect("triangle has a third vertex");
                let (pa, pb, pc) = (sites[a], sites[b], sites[third]);
                let mut dir = [-(pb[1] - pa[1]), pb[0] - pa[0]];
                if dir[0] * (pc[0] - pa[0]) + dir[1] * (pc[1] - pa[1]) > 0.0 {
                    dir = [-dir[0], -dir[1]];
                }
                let norm = dir[0].hypot(dir[1]);
                edges.push(VoronoiEdge {
                    from: u,
                    to: EdgeEnd::Ray([dir[0] / norm, dir[1] / norm]),
                    sites: (a.min(b), a.max(b)),
                });
            }
            (None, None) => unreachable!("non-degenerate triangulation has no isolated edges"),
        }
    }

    Ok(VoronoiDiagram {
        sites,
        vertices,
        vertex_sites,
        edges,
    })
}

/// Where a candidate centre came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateKind {
    /// Voronoi vertex inside the box.
    Vertex,
    /// Voronoi vertex outside the box, clamped coordinatewise onto it.
    Clamped,
    /// Crossing of a Voronoi edge (or bisector) with the box boundary.
    Boundary,
    Corner,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub point: [f64; 2],
    pub kind: CandidateKind,
    /// Sites known to be nearest to `point`; empty when unknown.
    nearest: Vec<usize>,
}

struct BoxBounds {
    lower: [f64; 2],
    upper: [f64; 2],
}

impl BoxBounds {
    fn of(problem: &Problem) -> Self {
        Self {
            lower: [problem.lower()[0], problem.lower()[1]],
            upper: [problem.upper()[0], problem.upper()[1]],
        }
    }

    fn contains(&self, p: [f64; 2]) -> bool {
        (0..2).all(|k| self.lower[k] <= p[k] && p[k] <= self.upper[k])
    }

    fn clamp(&self, p: [f64; 2]) -> [f64; 2] {
        [
            p[0].clamp(self.lower[0], self.upper[0]),
            p[1].clamp(self.lower[1], self.upper[1]),
        ]
    }

    fn corners(&self) -> [[f64; 2]; 4] {
        let (l, u) = (self.lower, self.upper);
        [[l[0], l[1]], [u[0], l[1]], [l[0], u[1]], [u[0], u[1]]]
    }

    /// Crossings of `origin + t·dir`, `t ∈ [t_min, t_max]`, with the boundary.
    fn crossings(
        &self,
        origin: [f64; 2],
        dir: [f64; 2],
        t_min: f64,
        t_max: f64,
        out: &mut Vec<[f64; 2]>,
    ) {
        for k in 0..2 {
            if dir[k] == 0.0 {
                continue;
            }
            let other = 1 - k;
            let slack = 1e-12 * (self.upper[other] - self.lower[other]);
            for bound in [self.lower[k], self.upper[k]] {
                let t = (bound - origin[k]) / dir[k];
                if !(t >= t_min && t <= t_max) {
                    continue;
                }
                let y = origin[other] + t * dir[other];
                if y >= self.lower[other] - slack && y <= self.upper[other] + slack {
                    let mut p = [0.0; 2];
                    p[k] = bound;
                    p[other] = y.clamp(self.lower[other], self.upper[other]);
                    out.push(p);
                }
            }
        }
    }
}

/// Candidate centres for the largest empty circle in the box.
///
/// With `boundary_crossings` false, only (clamped) vertices and corners are
/// produced.
pub fn voronoi_candidates(
    sites: &[[f64; 2]],
    problem: &Problem,
    boundary_crossings: bool,
) -> Vec<Candidate> {
    let bounds = BoxBounds::of(problem);
    let mut out: Vec<Candidate> = bounds
        .corners()
        .into_iter()
        .map(|point| Candidate {
            point,
            kind: CandidateKind::Corner,
            nearest: Vec::new(),
        })
        .collect();
    let mut buf = Vec::new();

    match build_voronoi(sites) {
        Ok(diagram) => {
            for (v, vs) in diagram.vertices.iter().zip(&diagram.vertex_sites) {
                if bounds.contains(*v) {
                    out.push(Candidate {
                        point: *v,
                        kind: CandidateKind::Vertex,
                        nearest: vs.clone(),
                    });
                } else {
                    out.push(Candidate {
                        point: bounds.clamp(*v),
                        kind: CandidateKind::Clamped,
                        nearest: Vec::new(),
                    });
                }
            }
            if boundary_crossings {
                for e in &diagram.edges {
                    let origin = diagram.vertices[e.from];
                    buf.clear();
                    match e.to {
                        EdgeEnd::Vertex(t) => {
                            let end = diagram.vertices[t];
                            bounds.crossings(
                                origin,
                                [end[0] - origin[0], end[1] - origin[1]],
                                0.0,
                                1.0,
                                &mut buf,
                            );
                        }
                        EdgeEnd::Ray(dir) => {
                            bounds.crossings(origin, dir, 0.0, f64::INFINITY, &mut buf)
                        }
                    }
                    out.extend(buf.drain(..).map(|point| Candidate {
                        point,
                        kind: CandidateKind::Boundary,
                        nearest: vec![e.sites.0, e.sites.1],
                    }));
                }
            }
            // Map nearest-site indices back to the caller's site list below.
            remap_nearest(&mut out, &diagram.sites, sites);
        }
        Err(_) => {
            // Fewer than three distinct sites, or all collinear: the Voronoi
            // edges are the full bisector lines of consecutive sites.
            let distinct = dedup_sites(sites);
            if distinct.len() >= 2 {
                let (a, b) = (distinct[0], distinct[distinct.len() - 1]);
                let axis = [b[0] - a[0], b[1] - a[1]];
                let mut order: Vec<usize> = (0..distinct.len()).collect();
                let proj = |p: [f64; 2]| (p[0] - a[0]) * axis[0] + (p[1] - a[1]) * axis[1];
                order.sort_by(|&i, &j| proj(distinct[i]).total_cmp(&proj(distinct[j])));
                for w in order.windows(2) {
                    let (p, q) = (distinct[w[0]], distinct[w[1]]);
                    let mid = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
                    let dir = [-(q[1] - p[1]), q[0] - p[0]];
                    buf.clear();
                    bounds.crossings(mid, dir, f64::NEG_INFINITY, f64::INFINITY, &mut buf);
                    out.extend(buf.drain(..).map(|point| Candidate {
                        point,
                        kind: CandidateKind::Boundary,
                        nearest: Vec::new(),
                    }));
                }
            }
        }
    }
    out
}

fn remap_nearest(candidates: &mut [Candidate], distinct: &[[f64; 2]], original: &[[f64; 2]]) {
    // Distances only need the coordinates, so store indices into `original`
    // by locating each distinct site there once.
    let mut lookup: HashMap<(u64, u64), usize> = HashMap::with_capacity(original.len());
    for (i, s) in original.iter().enumerate() {
        lookup.entry((s[0].to_bits(), s[1].to_bits())).or_insert(i);
    }
    let map: Vec<Option<usize>> = distinct
        .iter()
        .map(|s| lookup.get(&(s[0].to_bits(), s[1].to_bits())).copied())
        .collect();
    for c in candidates {
        let mapped: Option<Vec<usize>> = c.nearest.iter().map(|&i| map[i]).collect();
        c.nearest = mapped.unwrap_or_default();
    }
}

/// Largest empty circle centred in the box, by enumerating Voronoi-derived
/// candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VoronoiLeh {
    /// Also consider Voronoi edge crossings with the boundary. Without them
    /// the placement can miss the optimum when it lies on the boundary.
    pub boundary_crossings: bool,
}

impl Default for VoronoiLeh {
    fn default() -> Self {
        Self {
            boundary_crossings: true,
        }
    }
}

impl LehCalculator for VoronoiLeh {
    fn place(&mut self, hcps: &PointSet, problem: &Problem, _rng: &mut RngStream) -> LehPlacement {
        vor_leh_with(hcps, problem, self.boundary_crossings)
    }
}

/// Voronoi LEH placement with boundary crossings enabled.
///
/// # Panics
/// If the problem is not two-dimensional.
pub fn vor_leh(hcps: &PointSet, problem: &Problem) -> LehPlacement {
    vor_leh_with(hcps, problem, true)
}

pub fn vor_leh_with(hcps: &PointSet, problem: &Problem, boundary_crossings: bool) -> LehPlacement {
    assert_eq!(
        problem.dim(),
        2,
        "Voronoi placement is only available in 2D"
    );
    let sites: Vec<[f64; 2]> = hcps.iter().map(|p| [p[0], p[1]]).collect();
    if sites.is_empty() {
        let center = problem.lower().to_vec();
        return LehPlacement {
            center,
            radius: f64::INFINITY,
            found: true,
        };
    }
    let candidates = voronoi_candidates(&sites, problem, boundary_crossings);

    let d = |p: [f64; 2], s: [f64; 2]| ((p[0] - s[0]).powi(2) + (p[1] - s[1]).powi(2)).sqrt();
    let mut scored: Vec<(f64, usize)> = candidates
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let r = if c.nearest.is_empty() {
                min_distance_to_set(&c.point, hcps).0
            } else {
                c.nearest
                    .iter()
                    .map(|&s| d(c.point, sites[s]))
                    .fold(f64::INFINITY, f64::min)
            };
            (r, i)
        })
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    // Re-score the leaders exactly against every site.
    let mut best: Option<(f64, [f64; 2])> = None;
    for &(_, i) in scored.iter().take(8) {
        let p = candidates[i].point;
        let r = min_distance_to_set(&p, hcps).0;
        if best.is_none_or(|(b, _)| r > b) {
            best = Some((r, p));
        }
    }
    let (radius, p) = best.expect("corners are always candidates");
    LehPlacement {
        center: p.to_vec(),
        radius,
        found: radius > problem.gamma(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square(gamma: f64) -> Problem {
        Problem::new("unit", vec![0.0, 0.0], vec![1.0, 1.0], gamma, |_| 0.0).unwrap()
    }

    #[test]
    fn equilateral_triangle() {
        let h = 3f64.sqrt() / 2.0;
        let d = build_voronoi(&[[0.0, 0.0], [1.0, 0.0], [0.5, h]]).unwrap();
        assert_eq!(d.vertices.len(), 1);
        let c = d.vertices[0];
        assert!((c[0] - 0.5).abs() < 1e-12 && (c[1] - h / 3.0).abs() < 1e-12);
        assert_eq!(d.edges.len(), 3);
        assert!(d.edges.iter().all(|e| matches!(e.to, EdgeEnd::Ray(_))));
        // Rays point away from the opposite vertex.
        for e in &d.edges {
            let EdgeEnd::Ray(dir) = e.to else {
                unreachable!()
            };
            let third = (0..3).find(|&s| s != e.sites.0 && s != e.sites.1).unwrap();
            let t = d.sites[third];
            assert!(dir[0] * (t[0] - c[0]) + dir[1] * (t[1] - c[1]) < 0.0);
        }
    }

    #[test]
    fn square_corners_merge_into_one_vertex() {
        let d = build_voronoi(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert_eq!(d.vertices.len(), 1);
        assert!((d.vertices[0][0] - 0.5).abs() < 1e-12 && (d.vertices[0][1] - 0.5).abs() < 1e-12);
        assert_eq!(d.vertex_sites[0], vec![0, 1, 2, 3]);
        assert_eq!(d.edges.len(), 4);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(
            build_voronoi(&[[0.0, 0.0], [1.0, 1.0]]),
            Err(VoronoiError::TooFewSites(2))
        );
        assert_eq!(
            build_voronoi(&[[0.0, 0.0], [1.0, 1.0], [0.0, 5e-13]]),
            Err(VoronoiError::TooFewSites(2))
        );
        assert_eq!(
            build_voronoi(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]),
            Err(VoronoiError::Collinear)
        );
        assert!(matches!(
            build_voronoi(&[[0.0, f64::NAN], [1.0, 1.0], [2.0, 0.0]]),
            Err(VoronoiError::InvalidSite(0))
        ));
    }

    #[test]
    fn single_centre_hcp_goes_to_a_corner() {
        let p = unit_square(0.1);
        let pl = vor_leh(&PointSet::from_rows(2, [[0.5, 0.5]]), &p);
        assert!(pl.found);
        assert!((pl.radius - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(pl.center.iter().all(|&v| v == 0.0 || v == 1.0));
    }

    #[test]
    fn two_diagonal_hcps() {
        let p = unit_square(0.1);
        let hcps = PointSet::from_rows(2, [[0.25, 0.25], [0.75, 0.75]]);
        let pl = vor_leh(&hcps, &p);
        // Corners (0,1) and (1,0) are at distance √(0.25² + 0.75²) from both sites.
        let expected = (0.25f64.powi(2) + 0.75f64.powi(2)).sqrt();
        assert!((pl.radius - expected).abs() < 1e-12, "{}", pl.radius);
        let steps = 500;
        let mut grid: f64 = 0.0;
        for i in 0..=steps {
            for j in 0..=steps {
                let q = [i as f64 / steps as f64, j as f64 / steps as f64];
                grid = grid.max(min_distance_to_set(&q, &hcps).0);
            }
        }
        assert!((pl.radius - grid).abs() <= 1.0 / steps as f64);
    }

    #[test]
    fn clamped_and_boundary_candidates_lie_on_the_boundary() {
        let p = unit_square(0.05);
        let mut rng = RngStream::new(8);
        let sites: Vec<[f64; 2]> = (0..40)
            .map(|_| [rng.uniform_in(-0.2, 1.2), rng.uniform_in(-0.2, 1.2)])
            .collect();
        let on_boundary = |q: [f64; 2]| q.iter().any(|&v| v == 0.0 || v == 1.0);
        let cands = voronoi_candidates(&sites, &p, true);
        assert!(cands.iter().any(|c| c.kind == CandidateKind::Clamped));
        assert!(cands.iter().any(|c| c.kind == CandidateKind::Boundary));
        for c in &cands {
            assert!(p.contains(&c.point));
            match c.kind {
                CandidateKind::Clamped | CandidateKind::Boundary | CandidateKind::Corner => {
                    assert!(on_boundary(c.point), "{c:?}")
                }
                CandidateKind::Vertex => {}
            }
        }
    }

    #[test]
    fn collinear_sites_use_bisectors() {
        let p = unit_square(0.05);
        let hcps = PointSet::from_rows(2, [[0.1, 0.5], [0.5, 0.5], [0.9, 0.5]]);
        let pl = vor_leh(&hcps, &p);
        // Best is a corner, (0,0) etc. at distance √(0.1² + 0.5²) vs bisector
        // points (0.3, 0) at √(0.2² + 0.5²).
        let expected = (0.2f64.powi(2) + 0.25).sqrt();
        assert!((pl.radius - expected).abs() < 1e-12, "{}", pl.radius);
    }
}
