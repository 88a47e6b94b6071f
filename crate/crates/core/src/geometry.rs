//! Point sets, distances and the two sampling primitives.

use crate::problem::Problem;
use crate::rng::RngStream;

/// Contiguous storage for a list of `dim`-dimensional points.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            coords: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, points: usize) -> Self {
        Self {
            dim,
            coords: Vec::with_capacity(dim * points),
        }
    }

    pub fn from_rows<R: AsRef<[f64]>>(dim: usize, rows: impl IntoIterator<Item = R>) -> Self {
        let mut set = Self::new(dim);
        for row in rows {
            set.push(row.as_ref());
        }
        set
    }

    pub fn push(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.dim, "point dimension mismatch");
        self.coords.extend_from_slice(p);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim.max(1))
    }
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

/// Squared distance, abandoned once the running sum reaches `bound`.
///
/// The returned value is exact whenever it is below `bound`; otherwise it is
/// some partial sum `>= bound`. Summation order matches [`squared_distance`],
/// so non-abandoned results are bit-identical to it.
#[inline]
fn bounded_squared_distance(a: &[f64], b: &[f64], bound: f64) -> f64 {
    let mut sum = 0.0;
    let mut ca = a.chunks_exact(8);
    let mut cb = b.chunks_exact(8);
    for (xa, xb) in (&mut ca).zip(&mut cb) {
        for k in 0..8 {
            let d = xa[k] - xb[k];
            sum += d * d;
        }
        if sum >= bound {
            return sum;
        }
    }
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        let d = x - y;
        sum += d * d;
    }
    sum
}

/// Minimum Euclidean distance from `p` to `set` and the index attaining it.
/// Ties go to the lowest index.
///
/// # Panics
/// If `set` is empty.
pub fn min_distance_to_set(p: &[f64], set: &PointSet) -> (f64, usize) {
    assert!(!set.is_empty(), "min_distance_to_set on an empty set");
    let mut best = f64::INFINITY;
    let mut arg = 0;
    for (i, q) in set.iter().enumerate() {
        let d2 = bounded_squared_distance(p, q, best);
        if d2 < best {
            best = d2;
            arg = i;
        }
    }
    (best.sqrt(), arg)
}

/// [`min_distance_to_set`] for several query points at once.
///
/// Results are bit-identical to calling it per query. Queries are processed
/// in blocks of [`QUERY_BLOCK`] so their accumulators stay in registers.
pub fn min_distances_to_set(queries: &[Vec<f64>], set: &PointSet) -> Vec<(f64, usize)> {
    assert!(!set.is_empty(), "min_distances_to_set on an empty set");
    let n = set.dim();
    let mut out = Vec::with_capacity(queries.len());
    for block in queries.chunks(QUERY_BLOCK) {
        // Coordinate-major copy; unused lanes repeat the first query.
        let mut cols = vec![[0.0; QUERY_BLOCK]; n];
        for (k, col) in cols.iter_mut().enumerate() {
            for (j, c) in col.iter_mut().enumerate() {
                let q = block.get(j).unwrap_or(&block[0]);
                assert_eq!(q.len(), n, "point dimension mismatch");
                *c = q[k];
            }
        }
        let (best, arg) = nearest_block(&cols, set);
        out.extend((0..block.len()).map(|j| (best[j].sqrt(), arg[j])));
    }
    out
}

pub const QUERY_BLOCK: usize = 8;

type Block = ([f64; QUERY_BLOCK], [usize; QUERY_BLOCK]);

fn nearest_block(cols: &[[f64; QUERY_BLOCK]], set: &PointSet) -> Block {
    #[cfg(target_arch = "x86_64")]
    {
        if std::is_x86_feature_detected!("avx512f") {
            // SAFETY: as below.
            return unsafe { nearest_block_avx512(cols, set) };
        }
        if std::is_x86_feature_detected!("avx2") {
            // SAFETY: the feature was just detected. Without FMA enabled the
            // arithmetic is identical to the portable path.
            return unsafe { nearest_block_avx2(cols, set) };
        }
    }
    nearest_block_generic(cols, set)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f")]
unsafe fn nearest_block_avx512(cols: &[[f64; QUERY_BLOCK]], set: &PointSet) -> Block {
    nearest_block_generic(cols, set)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn nearest_block_avx2(cols: &[[f64; QUERY_BLOCK]], set: &PointSet) -> Block {
    nearest_block_generic(cols, set)
}

#[inline(always)]
fn nearest_block_generic(cols: &[[f64; QUERY_BLOCK]], set: &PointSet) -> Block {
    let mut best = [f64::INFINITY; QUERY_BLOCK];
    let mut arg = [0usize; QUERY_BLOCK];
    for (i, h) in set.iter().enumerate() {
        let mut acc = [0.0; QUERY_BLOCK];
        for (col, &hk) in cols.iter().zip(h) {
            for j in 0..QUERY_BLOCK {
                let d = col[j] - hk;
                acc[j] += d * d;
            }
        }
        for j in 0..QUERY_BLOCK {
            if acc[j] < best[j] {
                best[j] = acc[j];
                arg[j] = i;
            }
        }
    }
    (best, arg)
}

/// Whether some member of `set` lies within distance `radius` of `p` (inclusive).
pub fn any_within(p: &[f64], set: &PointSet, radius: f64) -> bool {
    let r2 = radius * radius;
    // Abandon once strictly beyond r2; a partial sum equal to r2 may still finish at r2.
    let bound = f64::from_bits(r2.to_bits() + 1);
    set.iter()
        .any(|q| bounded_squared_distance(p, q, bound) <= r2)
}

/// Uniform sample from the closed ball of `radius` around `center`.
///
/// Direction from normalised standard normals, length `radius * U^(1/n)` with
/// `U` uniform on `(0, 1]`.
pub fn sample_in_ball(rng: &mut RngStream, center: &[f64], radius: f64) -> Vec<f64> {
    debug_assert!(radius > 0.0);
    let n = center.len();
    let mut dir: Vec<f64> = Vec::with_capacity(n);
    let norm = loop {
        dir.clear();
        dir.extend((0..n).map(|_| rng.standard_normal()));
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            break norm;
        }
    };
    let length = radius * rng.uniform_open0().powf(1.0 / n as f64);
    // Rounding can push ‖Δ‖ a hair past `radius`; rescale in that case.
    let mut scale = length / norm;
    let mut delta: Vec<f64> = dir.iter().map(|v| v * scale).collect();
    let mut actual = delta.iter().map(|v| v * v).sum::<f64>().sqrt();
    while actual > radius {
        scale *= radius / actual * (1.0 - f64::EPSILON);
        delta = dir.iter().map(|v| v * scale).collect();
        actual = delta.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    center.iter().zip(&delta).map(|(c, d)| c + d).collect()
}

/// Uniform sample from the problem's box, coordinates independent.
pub fn sample_in_box(rng: &mut RngStream, problem: &Problem) -> Vec<f64> {
    problem
        .lower()
        .iter()
        .zip(problem.upper())
        .map(|(&l, &u)| rng.uniform_in(l, u).min(u))
        .collect()
}
