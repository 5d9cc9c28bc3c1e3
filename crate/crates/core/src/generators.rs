//! Environment generators.
//!
//! All generators are deterministic functions of their seed, center the
//! window on the origin, and record their provenance in the environment
//! meta block.

use crate::environment::{
    CellConfiguration, CellConfigurationBuilder, CellId, EnvMeta, LatticeData,
};
use crate::error::{Error, Result};
use crate::geometry::{Point, Region, Ring, Square};
use crate::rng::stream_rng;
use rand::Rng;
use std::collections::BTreeMap;

/// Edge conductance law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConductanceLaw {
    Constant(f64),
    /// Uniform on `[lo, hi)`.
    Uniform(f64, f64),
}

impl ConductanceLaw {
    fn draw(&self, rng: &mut impl Rng) -> f64 {
        match *self {
            ConductanceLaw::Constant(c) => c,
            ConductanceLaw::Uniform(lo, hi) => rng.random_range(lo..hi),
        }
    }

    pub fn parse(text: &str) -> Result<ConductanceLaw> {
        let parts: Vec<&str> = text.split(':').collect();
        match parts.as_slice() {
            ["const", c] => Ok(ConductanceLaw::Constant(c.parse().map_err(|_| bad_law(text))?)),
            ["uniform", lo, hi] => {
                let lo: f64 = lo.parse().map_err(|_| bad_law(text))?;
                let hi: f64 = hi.parse().map_err(|_| bad_law(text))?;
                if !(lo > 0.0 && hi > lo) {
                    return Err(bad_law(text));
                }
                Ok(ConductanceLaw::Uniform(lo, hi))
            }
            _ => Err(bad_law(text)),
        }
    }
}

fn bad_law(text: &str) -> Error {
    Error::InvalidArgument(format!(
        "conductance law must be const:<c> or uniform:<lo>:<hi>, got {text}"
    ))
}

impl std::fmt::Display for ConductanceLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConductanceLaw::Constant(c) => write!(f, "const:{c}"),
            ConductanceLaw::Uniform(lo, hi) => write!(f, "uniform:{lo}:{hi}"),
        }
    }
}

/// Conductance grid specification.
#[derive(Debug, Clone)]
pub struct GridSpec {
    /// Cells per side; window side is `n`.
    pub n: u32,
    pub law: ConductanceLaw,
    /// Apply a uniform shift in `[0, 1)^2` to every coordinate.
    pub shift: bool,
    pub seed: u64,
}

fn square_ring(anchor: Point, side: f64) -> Ring {
    vec![
        anchor,
        anchor + Point::new(side, 0.0),
        anchor + Point::new(side, side),
        anchor + Point::new(0.0, side),
    ]
}

fn meta(generator: &str, seed: u64, params: &[(&str, String)]) -> EnvMeta {
    EnvMeta {
        generator: generator.to_string(),
        seed,
        parameters: params
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect::<BTreeMap<_, _>>(),
    }
}

/// `n x n` unit-square cells (the faces of a shifted integer lattice) with
/// iid conductances on the shared edges.
///
/// Cells are centered at integer points of the window `[-n/2, n/2]^2`;
/// lattice vertices sit at half-integer corners. The lattice (vertices,
/// edges with the sampled conductances, per-face vertex cycles) is attached
/// for the vertex-cell construction.
pub fn gen_grid(spec: &GridSpec) -> Result<CellConfiguration> {
    if spec.n < 4 {
        return Err(Error::InvalidArgument(format!(
            "grid side must be at least 4, got {}",
            spec.n
        )));
    }
    let n = spec.n as i64;
    let mut rng = stream_rng(spec.seed, 0);
    let shift = if spec.shift {
        Point::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0))
    } else {
        Point::new(0.0, 0.0)
    };
    let half = n as f64 / 2.0;
    let window = Square::new(Point::new(-half, -half) - shift, n as f64)?;
    let mut b = CellConfigurationBuilder::new(window);

    // cell (i, j) centered at (i - (n-1)/2, j - (n-1)/2) - shift
    let center = |i: i64, j: i64| {
        Point::new(
            i as f64 - (n - 1) as f64 / 2.0 - shift.x,
            j as f64 - (n - 1) as f64 / 2.0 - shift.y,
        )
    };
    let id = |i: i64, j: i64| CellId((j * n + i) as u32);
    for j in 0..n {
        for i in 0..n {
            let c = center(i, j);
            b.add_cell(Region::from_ring(square_ring(c - Point::new(0.5, 0.5), 1.0))?);
        }
    }
    // lattice vertices at cell corners: an (n+1)^2 grid
    let vid = |i: i64, j: i64| (j * (n + 1) + i) as u32;
    let mut vertices = Vec::with_capacity(((n + 1) * (n + 1)) as usize);
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(center(i, j) - Point::new(0.5, 0.5));
        }
    }
    // iid conductances per interior lattice edge, in fixed order; the edge
    // between face (i,j) and (i+1,j) is the vertical lattice segment from
    // vertex (i+1, j) to (i+1, j+1)
    let mut ledges = Vec::new();
    let mut edge_rng = stream_rng(spec.seed, 1);
    for j in 0..n {
        for i in 0..n - 1 {
            let c = spec.law.draw(&mut edge_rng);
            b.add_edge(id(i, j), id(i + 1, j), c);
            ledges.push((vid(i + 1, j), vid(i + 1, j + 1), c));
        }
    }
    for j in 0..n - 1 {
        for i in 0..n {
            let c = spec.law.draw(&mut edge_rng);
            b.add_edge(id(i, j), id(i, j + 1), c);
            ledges.push((vid(i, j + 1), vid(i + 1, j + 1), c));
        }
    }
    let face_vertices = (0..n)
        .flat_map(|j| {
            (0..n).map(move |i| vec![vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)])
        })
        .collect();
    b.set_lattice(LatticeData { vertices, edges: ledges, face_vertices });
    b.set_meta(meta(
        "grid",
        spec.seed,
        &[
            ("n", spec.n.to_string()),
            ("law", spec.law.to_string()),
            ("shift", spec.shift.to_string()),
        ],
    ));
    b.build()
}

/// The split grid: a unit square whose lower half is divided into cells of
/// side `2^-k` and whose upper half is divided into cells of side
/// `2^-(k+1)`, unit conductances, reflecting boundary. Each lower-half cell
/// on the interface row is adjacent to the two upper-half cells above it.
/// Window `[-1/2, 1/2]^2`.
pub fn gen_split_grid(k: u32) -> Result<CellConfiguration> {
    if !(1..=9).contains(&k) {
        return Err(Error::InvalidArgument(format!("split grid needs 1 <= k <= 9, got {k}")));
    }
    let window = Square::new(Point::new(-0.5, -0.5), 1.0)?;
    let mut b = CellConfigurationBuilder::new(window);

    let h_lo = 0.5f64.powi(k as i32);
    let h_hi = 0.5f64.powi(k as i32 + 1);
    let cols_lo = 1usize << k;
    let rows_lo = 1usize << (k - 1);
    let cols_hi = 1usize << (k + 1);
    let rows_hi = 1usize << k;

    let lo_id = |i: usize, j: usize| CellId((j * cols_lo + i) as u32);
    for j in 0..rows_lo {
        for i in 0..cols_lo {
            let a = Point::new(-0.5 + i as f64 * h_lo, -0.5 + j as f64 * h_lo);
            b.add_cell(Region::from_ring(square_ring(a, h_lo))?);
        }
    }
    let lo_count = (cols_lo * rows_lo) as u32;
    let hi_id = |i: usize, j: usize| CellId(lo_count + (j * cols_hi + i) as u32);
    for j in 0..rows_hi {
        for i in 0..cols_hi {
            let a = Point::new(-0.5 + i as f64 * h_hi, j as f64 * h_hi);
            b.add_cell(Region::from_ring(square_ring(a, h_hi))?);
        }
    }

    for j in 0..rows_lo {
        for i in 0..cols_lo {
            if i + 1 < cols_lo {
                b.add_edge(lo_id(i, j), lo_id(i + 1, j), 1.0);
            }
            if j + 1 < rows_lo {
                b.add_edge(lo_id(i, j), lo_id(i, j + 1), 1.0);
            }
        }
    }
    for j in 0..rows_hi {
        for i in 0..cols_hi {
            if i + 1 < cols_hi {
                b.add_edge(hi_id(i, j), hi_id(i + 1, j), 1.0);
            }
            if j + 1 < rows_hi {
                b.add_edge(hi_id(i, j), hi_id(i, j + 1), 1.0);
            }
        }
    }
    // interface: each top-row lower cell meets the two upper cells above it
    for i in 0..cols_lo {
        b.add_edge(lo_id(i, rows_lo - 1), hi_id(2 * i, 0), 1.0);
        b.add_edge(lo_id(i, rows_lo - 1), hi_id(2 * i + 1, 0), 1.0);
    }
    b.set_meta(meta("split_grid", 0, &[("k", k.to_string())]));
    b.build()
}

/// Bond percolation specification.
#[derive(Debug, Clone)]
pub struct PercolationSpec {
    /// Plaquettes per side; window side is `n`.
    pub n: u32,
    /// Probability that a lattice edge is open.
    pub p: f64,
    pub seed: u64,
}

/// Faces of the open subgraph of the integer lattice in the window.
///
/// Each interior lattice edge of the `n x n` plaquette window is open
/// independently with probability `p`. Faces are the connected unions of
/// unit plaquettes glued across *closed* edges (the window frame acts as a
/// closed curve; the outer face is excluded). Two faces are adjacent iff
/// they share at least one open edge; each shared open edge contributes
/// unit conductance, multiplicities summed.
pub fn gen_percolation_faces(spec: &PercolationSpec) -> Result<CellConfiguration> {
    if !(0.0..=1.0).contains(&spec.p) {
        return Err(Error::InvalidArgument(format!(
            "percolation probability must lie in [0, 1], got {}",
            spec.p
        )));
    }
    if spec.n < 4 {
        return Err(Error::InvalidArgument(format!(
            "percolation window must be at least 4, got {}",
            spec.n
        )));
    }
    let n = spec.n as usize;
    let half = spec.n as f64 / 2.0;
    let offset = Point::new(-half, -half);
    let window = Square::new(offset, spec.n as f64)?;

    // edge states in a fixed sampling order: vertical edges (between
    // horizontal plaquette neighbors) first, then horizontal edges
    let mut rng = stream_rng(spec.seed, 0);
    let mut open_v = vec![false; (n - 1) * n];
    for j in 0..n {
        for i in 0..n - 1 {
            open_v[j * (n - 1) + i] = rng.random_range(0.0..1.0) < spec.p;
        }
    }
    let mut open_h = vec![false; n * (n - 1)];
    for j in 0..n - 1 {
        for i in 0..n {
            open_h[j * n + i] = rng.random_range(0.0..1.0) < spec.p;
        }
    }

    // union-find over plaquettes, merging across closed interior edges
    let mut parent: Vec<u32> = (0..(n * n) as u32).collect();
    fn find(parent: &mut [u32], x: u32) -> u32 {
        let mut root = x;
        while parent[root as usize] != root {
            root = parent[root as usize];
        }
        let mut cur = x;
        while parent[cur as usize] != root {
            let next = parent[cur as usize];
            parent[cur as usize] = root;
            cur = next;
        }
        root
    }
    let pid = |i: usize, j: usize| (j * n + i) as u32;
    for j in 0..n {
        for i in 0..n - 1 {
            if !open_v[j * (n - 1) + i] {
                let (a, b) = (find(&mut parent, pid(i, j)), find(&mut parent, pid(i + 1, j)));
                if a != b {
                    parent[a as usize] = b;
                }
            }
        }
    }
    for j in 0..n - 1 {
        for i in 0..n {
            if !open_h[j * n + i] {
                let (a, b) = (find(&mut parent, pid(i, j)), find(&mut parent, pid(i, j + 1)));
                if a != b {
                    parent[a as usize] = b;
                }
            }
        }
    }

    // face ids in first-seen plaquette order
    let mut face_of_root: BTreeMap<u32, u32> = BTreeMap::new();
    let mut face_of = vec![0u32; n * n];
    let mut face_plaquettes: Vec<Vec<(usize, usize)>> = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let root = find(&mut parent, pid(i, j));
            let f = *face_of_root.entry(root).or_insert_with(|| {
                face_plaquettes.push(Vec::new());
                (face_plaquettes.len() - 1) as u32
            });
            face_of[pid(i, j) as usize] = f;
            face_plaquettes[f as usize].push((i, j));
        }
    }

    let mut b = CellConfigurationBuilder::new(window);
    for plaquettes in &face_plaquettes {
        b.add_cell(trace_plaquette_region(plaquettes, offset)?);
    }
    // adjacency across open interior edges between different faces
    for j in 0..n {
        for i in 0..n - 1 {
            if open_v[j * (n - 1) + i] {
                let (fa, fb) = (face_of[pid(i, j) as usize], face_of[pid(i + 1, j) as usize]);
                if fa != fb {
                    b.add_edge(CellId(fa), CellId(fb), 1.0);
                }
            }
        }
    }
    for j in 0..n - 1 {
        for i in 0..n {
            if open_h[j * n + i] {
                let (fa, fb) = (face_of[pid(i, j) as usize], face_of[pid(i, j + 1) as usize]);
                if fa != fb {
                    b.add_edge(CellId(fa), CellId(fb), 1.0);
                }
            }
        }
    }
    b.set_meta(meta(
        "percolation",
        spec.seed,
        &[("n", spec.n.to_string()), ("p", spec.p.to_string())],
    ));
    b.build()
}

/// Traces the boundary rings of a union of unit plaquettes and assembles a
/// region (outer rings counterclockwise, holes clockwise, each hole
/// attached to the outer ring containing it).
fn trace_plaquette_region(plaquettes: &[(usize, usize)], offset: Point) -> Result<Region> {
    use std::collections::BTreeSet;
    let inset: BTreeSet<(i64, i64)> =
        plaquettes.iter().map(|&(i, j)| (i as i64, j as i64)).collect();
    // directed boundary edges with the face interior on the left
    let mut remaining: BTreeSet<((i64, i64), (i64, i64))> = BTreeSet::new();
    for &(i, j) in &inset {
        let c = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
        let sides = [
            ((i, j - 1), c[0], c[1]),
            ((i + 1, j), c[1], c[2]),
            ((i, j + 1), c[2], c[3]),
            ((i - 1, j), c[3], c[0]),
        ];
        for (nb, a, bpt) in sides {
            if !inset.contains(&nb) {
                remaining.insert((a, bpt));
            }
        }
    }
    let mut by_start: BTreeMap<(i64, i64), Vec<(i64, i64)>> = BTreeMap::new();
    for &(a, b) in &remaining {
        by_start.entry(a).or_default().push(b);
    }

    // stitch into closed loops; at pinch corners prefer the sharpest left
    // turn so rings stay simple with the interior on the left
    let mut rings: Vec<Vec<(i64, i64)>> = Vec::new();
    while let Some(&(start, first)) = remaining.iter().next() {
        let mut ring = vec![start];
        let mut prev = start;
        let mut cur = first;
        remaining.remove(&(start, first));
        while cur != start {
            ring.push(cur);
            let dir = (cur.0 - prev.0, cur.1 - prev.1);
            let turn_rank = |next: (i64, i64)| {
                let nd = (next.0 - cur.0, next.1 - cur.1);
                let cross = dir.0 * nd.1 - dir.1 * nd.0;
                let dot = dir.0 * nd.0 + dir.1 * nd.1;
                if cross > 0 {
                    0 // left
                } else if cross == 0 && dot > 0 {
                    1 // straight
                } else {
                    2 // right or backward
                }
            };
            let mut best: Option<((i64, i64), i32)> = None;
            for &next in by_start.get(&cur).map(|v| v.as_slice()).unwrap_or(&[]) {
                if remaining.contains(&(cur, next)) {
                    let r = turn_rank(next);
                    if best.is_none_or(|(_, br)| r < br) {
                        best = Some((next, r));
                    }
                }
            }
            let Some((next, _)) = best else {
                return Err(Error::InvalidGeometry(
                    "plaquette boundary tracing failed to close a ring".into(),
                ));
            };
            remaining.remove(&(cur, next));
            prev = cur;
            cur = next;
        }
        // drop collinear midpoints
        let m = ring.len();
        let mut slim = Vec::with_capacity(m);
        for idx in 0..m {
            let a = ring[(idx + m - 1) % m];
            let b = ring[idx];
            let c = ring[(idx + 1) % m];
            if (b.0 - a.0) * (c.1 - b.1) - (b.1 - a.1) * (c.0 - b.0) != 0 {
                slim.push(b);
            }
        }
        rings.push(slim);
    }

    let signed = |ring: &[(i64, i64)]| -> i64 {
        let mut acc = 0i64;
        for idx in 0..ring.len() {
            let a = ring[idx];
            let b = ring[(idx + 1) % ring.len()];
            acc += a.0 * b.1 - a.1 * b.0;
        }
        acc
    };
    let to_points = |ring: &[(i64, i64)]| -> Ring {
        ring.iter()
            .map(|&(x, y)| Point::new(x as f64 + offset.x, y as f64 + offset.y))
            .collect()
    };
    type LatticeRing = Vec<(i64, i64)>;
    let mut outers: Vec<(LatticeRing, Vec<Ring>)> = Vec::new();
    let mut holes: Vec<LatticeRing> = Vec::new();
    for ring in rings {
        if signed(&ring) > 0 {
            outers.push((ring, Vec::new()));
        } else {
            holes.push(ring);
        }
    }
    'holes: for hole in holes {
        // interior probe just inside the hole's first corner: holes are
        // clockwise with the face outside, so nudge along the bisector
        for (outer, hs) in outers.iter_mut() {
            if hole.iter().all(|&p| lattice_point_in_ring(p, outer)) {
                hs.push(to_points(&hole));
                continue 'holes;
            }
        }
        return Err(Error::InvalidGeometry("orphan hole ring in face tracing".into()));
    }
    Region::new(
        outers
            .into_iter()
            .map(|(outer, hs)| (to_points(&outer), hs))
            .collect(),
    )
}

/// Membership of a lattice point in an axis-aligned lattice ring; boundary
/// points count as inside. Crossings are counted on the horizontal ray at
/// height `p.1 + 0.5`, which never meets a lattice vertex.
fn lattice_point_in_ring(p: (i64, i64), ring: &[(i64, i64)]) -> bool {
    let n = ring.len();
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        if a.0 == b.0 && p.0 == a.0 && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1) {
            return true;
        }
        if a.1 == b.1 && p.1 == a.1 && p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) {
            return true;
        }
    }
    let mut crossings = 0;
    let ray_y = p.1 as f64 + 0.5;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        if a.0 == b.0 {
            let (ylo, yhi) = (a.1.min(b.1) as f64, a.1.max(b.1) as f64);
            if ray_y > ylo && ray_y < yhi && p.0 < a.0 {
                crossings += 1;
            }
        }
    }
    crossings % 2 == 1
}

/// Long-range lattice specification.
#[derive(Debug, Clone)]
pub struct LongRangeSpec {
    /// Lattice points per side; window side is `n + range + 1`.
    pub n: u32,
    /// Interaction range: `x ~ y` iff `0 < |x - y| <= range` (Euclidean).
    pub range: u32,
    pub law: ConductanceLaw,
    pub seed: u64,
}

/// One cell per lattice point: a centered square of side 1/2 plus thin
/// rectangles (width 1e-6) reaching to every lattice point within range.
/// Adjacency is declared combinatorially by the range rule, so the sliver
/// width is purely cosmetic.
pub fn gen_long_range(spec: &LongRangeSpec) -> Result<CellConfiguration> {
    if spec.range < 1 {
        return Err(Error::InvalidArgument("long-range needs range >= 1".into()));
    }
    if spec.n < 4 {
        return Err(Error::InvalidArgument(format!(
            "long-range window must be at least 4, got {}",
            spec.n
        )));
    }
    let n = spec.n as i64;
    let r = spec.range as i64;
    let side = (n + r + 1) as f64;
    let window = Square::centered(Point::new(0.0, 0.0), side)?;
    let mut b = CellConfigurationBuilder::new(window);

    let center = |i: i64, j: i64| {
        Point::new(i as f64 - (n - 1) as f64 / 2.0, j as f64 - (n - 1) as f64 / 2.0)
    };
    let id = |i: i64, j: i64| CellId((j * n + i) as u32);

    let mut offsets = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if (dx, dy) != (0, 0) && dx * dx + dy * dy <= r * r {
                offsets.push((dx, dy));
            }
        }
    }

    const SLIVER: f64 = 1e-6;
    for j in 0..n {
        for i in 0..n {
            let c = center(i, j);
            let mut components = vec![(square_ring(c - Point::new(0.25, 0.25), 0.5), vec![])];
            for &(dx, dy) in &offsets {
                let (ni, nj) = (i + dx, j + dy);
                if ni < 0 || ni >= n || nj < 0 || nj >= n {
                    continue;
                }
                let target = center(ni, nj);
                let dir = target - c;
                let unit = dir.scale(1.0 / dir.norm());
                let normal = Point::new(-unit.y, unit.x).scale(SLIVER / 2.0);
                components.push((
                    vec![c + normal, target + normal, target - normal, c - normal],
                    vec![],
                ));
            }
            b.add_cell(Region::new(components)?);
        }
    }
    let mut rng = stream_rng(spec.seed, 2);
    for j in 0..n {
        for i in 0..n {
            for &(dx, dy) in &offsets {
                let (ni, nj) = (i + dx, j + dy);
                if ni < 0 || ni >= n || nj < 0 || nj >= n {
                    continue;
                }
                if (nj, ni) > (j, i) {
                    b.add_edge(id(i, j), id(ni, nj), spec.law.draw(&mut rng));
                }
            }
        }
    }
    b.set_meta(meta(
        "long_range",
        spec.seed,
        &[
            ("n", spec.n.to_string()),
            ("range", spec.range.to_string()),
            ("law", spec.law.to_string()),
        ],
    ));
    b.build()
}

/// The vertex-cell construction: splits each face of a lattice-carrying
/// configuration into one sub-cell per boundary vertex and reassembles the
/// pieces into vertex-indexed cells.
///
/// Each face is subdivided by straight segments from its centroid to the
/// midpoints of its boundary edges (one quad per vertex); the cell of a
/// vertex is the union of its quads over incident faces. Vertex cells are
/// adjacent iff the vertices are lattice neighbors; conductances are
/// inherited from the lattice edges. Vertices incident to no face are
/// dropped.
pub fn vertex_cells(config: &CellConfiguration) -> Result<CellConfiguration> {
    let Some(lat) = config.lattice() else {
        return Err(Error::InvalidArgument(
            "vertex cells need a face configuration carrying its lattice".into(),
        ));
    };
    let nv = lat.vertices.len();
    let mut quads: Vec<Vec<(Ring, Vec<Ring>)>> = vec![Vec::new(); nv];
    for (face, cycle) in lat.face_vertices.iter().enumerate() {
        let m = cycle.len();
        if m < 3 {
            return Err(Error::InvalidArgument(format!(
                "face {face} has fewer than 3 boundary vertices"
            )));
        }
        let c = config.centroid(CellId(face as u32));
        for (idx, &v) in cycle.iter().enumerate() {
            let x = lat.vertices[v as usize];
            let prev = lat.vertices[cycle[(idx + m - 1) % m] as usize];
            let next = lat.vertices[cycle[(idx + 1) % m] as usize];
            let m_prev = Point::new((prev.x + x.x) / 2.0, (prev.y + x.y) / 2.0);
            let m_next = Point::new((next.x + x.x) / 2.0, (next.y + x.y) / 2.0);
            quads[v as usize].push((vec![m_prev, x, m_next, c], Vec::new()));
        }
    }

    let mut renum = vec![u32::MAX; nv];
    let mut kept = Vec::new();
    for (v, qs) in quads.iter().enumerate() {
        if !qs.is_empty() {
            renum[v] = kept.len() as u32;
            kept.push(v);
        }
    }
    let mut b = CellConfigurationBuilder::new(config.window());
    for &v in &kept {
        b.add_cell(Region::new(quads[v].clone())?);
    }
    for &(x, y, c) in &lat.edges {
        let (rx, ry) = (renum[x as usize], renum[y as usize]);
        if rx != u32::MAX && ry != u32::MAX {
            b.add_edge(CellId(rx), CellId(ry), c);
        }
    }
    let mut m = config.meta().clone();
    m.generator = format!("{}+vertex_cells", m.generator);
    b.set_meta(m);
    b.build()
}
