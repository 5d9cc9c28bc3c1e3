//! Discrete Dirichlet energy, harmonic solves, and the glued harmonic
//! embeddings over dyadic partitions.
//!
//! The a priori embedding sends each cell to its Euclidean centroid. The
//! mass-`m` embedding pins the centroid values on the cells meeting each
//! partition-square boundary and solves the conductance-weighted Dirichlet
//! problem inside each square; as the mass budget grows, these interpolate
//! toward a single large harmonic solve whose difference from the a priori
//! embedding approximates the corrector.

use crate::dyadic::DyadicSystem2D;
use crate::environment::{CellConfiguration, CellId};
use crate::error::{Error, Result};
use crate::geometry::{Point, Region, Square, GEOM_TOL};
use rayon::prelude::*;

/// A scalar or vector field over cells, for energy computations.
#[derive(Debug, Clone, Copy)]
pub enum FieldView<'a> {
    Scalar(&'a [f64]),
    Points(&'a [Point]),
}

impl FieldView<'_> {
    fn diff2(&self, a: CellId, b: CellId) -> f64 {
        match self {
            FieldView::Scalar(v) => {
                let d = v[a.idx()] - v[b.idx()];
                d * d
            }
            FieldView::Points(v) => (v[a.idx()] - v[b.idx()]).norm2(),
        }
    }

    fn diff_abs(&self, a: CellId, b: CellId) -> f64 {
        self.diff2(a, b).sqrt()
    }

    fn is_set(&self, a: CellId) -> bool {
        match self {
            FieldView::Scalar(v) => v[a.idx()].is_finite(),
            FieldView::Points(v) => v[a.idx()].is_finite(),
        }
    }
}

/// A cell-to-point map with provenance.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub label: EmbeddingLabel,
    values: Vec<Point>,
    /// Worst harmonicity defect among the solves that built this embedding.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EmbeddingLabel {
    Phi0,
    PhiM { m: f64 },
    CorrectorApprox { m: f64 },
    Custom(String),
}

impl std::fmt::Display for EmbeddingLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EmbeddingLabel::Phi0 => write!(f, "phi0"),
            EmbeddingLabel::PhiM { m } => write!(f, "phi_m({m})"),
            EmbeddingLabel::CorrectorApprox { m } => write!(f, "corrector_approx({m})"),
            EmbeddingLabel::Custom(s) => write!(f, "{s}"),
        }
    }
}

impl Embedding {
    pub fn new(label: EmbeddingLabel, values: Vec<Point>, residual: f64) -> Embedding {
        Embedding { label, values, residual }
    }

    pub fn value(&self, id: CellId) -> Point {
        self.values[id.idx()]
    }

    pub fn values(&self) -> &[Point] {
        &self.values
    }

    pub fn view(&self) -> FieldView<'_> {
        FieldView::Points(&self.values)
    }

    /// Pointwise difference `self - other`.
    pub fn minus(&self, other: &Embedding) -> Vec<Point> {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| *a - *b)
            .collect()
    }
}

/// The a priori embedding: every cell at its Euclidean centroid.
pub fn phi0(config: &CellConfiguration) -> Embedding {
    Embedding {
        label: EmbeddingLabel::Phi0,
        values: config.ids().map(|id| config.centroid(id)).collect(),
        residual: 0.0,
    }
}

/// A sorted cell subset with O(1) membership.
#[derive(Debug, Clone)]
pub struct CellSet {
    ids: Vec<CellId>,
    mask: Vec<bool>,
}

impl CellSet {
    pub fn new(mut ids: Vec<CellId>, n_cells: usize) -> CellSet {
        ids.sort_unstable();
        ids.dedup();
        let mut mask = vec![false; n_cells];
        for id in &ids {
            mask[id.idx()] = true;
        }
        CellSet { ids, mask }
    }

    pub fn all(config: &CellConfiguration) -> CellSet {
        CellSet::new(config.ids().collect(), config.n_cells())
    }

    pub fn contains(&self, id: CellId) -> bool {
        self.mask[id.idx()]
    }

    pub fn ids(&self) -> &[CellId] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Dirichlet energy `sum over unoriented edges of c |f(x) - f(y)|^2`, over
/// the subgraph induced by `domain` (the whole graph when `None`).
pub fn dirichlet_energy(
    config: &CellConfiguration,
    f: FieldView<'_>,
    domain: Option<&CellSet>,
) -> Result<f64> {
    let mut acc = 0.0;
    match domain {
        None => {
            for id in config.ids() {
                if !f.is_set(id) {
                    return Err(Error::MissingValue(id.0));
                }
                for &(nb, c) in config.neighbors(id) {
                    if id < nb {
                        acc += c * f.diff2(id, nb);
                    }
                }
            }
        }
        Some(set) => {
            for &id in set.ids() {
                if !f.is_set(id) {
                    return Err(Error::MissingValue(id.0));
                }
                for &(nb, c) in config.neighbors(id) {
                    if id < nb && set.contains(nb) {
                        acc += c * f.diff2(id, nb);
                    }
                }
            }
        }
    }
    Ok(acc)
}

/// Dirichlet energy over the subgraph of cells meeting a box.
pub fn dirichlet_energy_in_box(
    config: &CellConfiguration,
    f: FieldView<'_>,
    b: &Square,
) -> Result<f64> {
    let set = CellSet::new(config.cells_in_box(b), config.n_cells());
    dirichlet_energy(config, f, Some(&set))
}

/// Dirichlet inner product of two fields over the induced subgraph.
pub fn dirichlet_inner_product(
    config: &CellConfiguration,
    f: &[Point],
    g: &[Point],
    domain: &CellSet,
) -> f64 {
    let mut acc = 0.0;
    for &id in domain.ids() {
        for &(nb, c) in config.neighbors(id) {
            if id < nb && domain.contains(nb) {
                let df = f[id.idx()] - f[nb.idx()];
                let dg = g[id.idx()] - g[nb.idx()];
                acc += c * df.dot(dg);
            }
        }
    }
    acc
}

/// Solves the Dirichlet problem on the subgraph induced by `domain`:
/// returns a dense field (NaN off-domain) agreeing with `boundary` on the
/// boundary cells and discrete harmonic (with respect to the induced
/// subgraph) elsewhere, to relative harmonicity defect `tol` in the
/// infinity norm.
///
/// Preconditioned conjugate gradient (Jacobi) on the weighted graph
/// Laplacian with the Dirichlet rows eliminated. Errors when an interior
/// component has no path to a boundary cell, or when `max_iter` iterations
/// fail to reach the tolerance.
pub fn solve_dirichlet(
    config: &CellConfiguration,
    domain: &CellSet,
    boundary: &[(CellId, f64)],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, f64)> {
    let n = config.n_cells();
    let mut values = vec![f64::NAN; n];
    let mut is_boundary = vec![false; n];
    for &(id, v) in boundary {
        config.check_id(id)?;
        if !domain.contains(id) {
            return Err(Error::InvalidArgument(format!(
                "boundary cell {id} is outside the solve domain"
            )));
        }
        values[id.idx()] = v;
        is_boundary[id.idx()] = true;
    }
    if boundary.is_empty() {
        return Err(Error::InvalidArgument("empty boundary set".into()));
    }

    // interior cells in id order
    let interior: Vec<CellId> = domain
        .ids()
        .iter()
        .copied()
        .filter(|id| !is_boundary[id.idx()])
        .collect();
    if interior.is_empty() {
        return Ok((values, 0.0));
    }
    let mut local = vec![usize::MAX; n];
    for (i, id) in interior.iter().enumerate() {
        local[id.idx()] = i;
    }

    // reachability of every interior cell from the boundary
    {
        let mut seen = vec![false; interior.len()];
        let mut stack: Vec<CellId> = Vec::new();
        for &(id, _) in boundary {
            for &(nb, _) in config.neighbors(id) {
                if domain.contains(nb) && local[nb.idx()] != usize::MAX && !seen[local[nb.idx()]]
                {
                    seen[local[nb.idx()]] = true;
                    stack.push(nb);
                }
            }
        }
        while let Some(id) = stack.pop() {
            for &(nb, _) in config.neighbors(id) {
                let l = local[nb.idx()];
                if domain.contains(nb) && l != usize::MAX && !seen[l] {
                    seen[l] = true;
                    stack.push(nb);
                }
            }
        }
        let unreached = seen.iter().filter(|&&s| !s).count();
        if unreached > 0 {
            return Err(Error::DisconnectedInterior(unreached));
        }
    }

    // degree within the domain, and the right-hand side from the boundary
    let mut diag = vec![0.0; interior.len()];
    let mut rhs = vec![0.0; interior.len()];
    for (i, &id) in interior.iter().enumerate() {
        for &(nb, c) in config.neighbors(id) {
            if domain.contains(nb) {
                diag[i] += c;
                if is_boundary[nb.idx()] {
                    rhs[i] += c * values[nb.idx()];
                }
            }
        }
    }
    if diag.iter().any(|&d| d <= 0.0) {
        return Err(Error::DisconnectedInterior(
            diag.iter().filter(|&&d| d <= 0.0).count(),
        ));
    }

    let matvec = |x: &[f64], y: &mut [f64]| {
        for (i, &id) in interior.iter().enumerate() {
            let mut acc = diag[i] * x[i];
            for &(nb, c) in config.neighbors(id) {
                let l = local[nb.idx()];
                if l != usize::MAX {
                    acc -= c * x[l];
                }
            }
            y[i] = acc;
        }
    };

    let scale = boundary
        .iter()
        .map(|&(_, v)| v.abs())
        .fold(0.0f64, f64::max)
        .max(1e-300);

    // PCG with Jacobi preconditioner
    let m = interior.len();
    let mut x = vec![0.0; m];
    // warm start from the boundary mean
    let bmean = boundary.iter().map(|&(_, v)| v).sum::<f64>() / boundary.len() as f64;
    x.fill(bmean);
    let mut r = vec![0.0; m];
    matvec(&x, &mut r);
    for i in 0..m {
        r[i] = rhs[i] - r[i];
    }
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; m];
    let mut best_defect = f64::INFINITY;
    let mut iterations = 0usize;
    loop {
        // harmonicity defect: |r_i| / (pi_i * scale)
        let defect = r
            .iter()
            .zip(&diag)
            .map(|(ri, di)| ri.abs() / (di * scale))
            .fold(0.0f64, f64::max);
        best_defect = best_defect.min(defect);
        if defect <= tol {
            break;
        }
        if iterations >= max_iter {
            return Err(Error::NoConvergence { residual: defect, iterations });
        }
        matvec(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(Error::NoConvergence { residual: defect, iterations });
        }
        let alpha = rz / pap;
        for i in 0..m {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..m {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..m {
            p[i] = z[i] + beta * p[i];
        }
        iterations += 1;
    }
    for (i, &id) in interior.iter().enumerate() {
        values[id.idx()] = x[i];
    }
    Ok((values, best_defect))
}

/// Coordinate-wise Dirichlet solve for point-valued boundary data.
pub fn solve_dirichlet_points(
    config: &CellConfiguration,
    domain: &CellSet,
    boundary: &[(CellId, Point)],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<Point>, f64)> {
    let bx: Vec<(CellId, f64)> = boundary.iter().map(|&(id, p)| (id, p.x)).collect();
    let by: Vec<(CellId, f64)> = boundary.iter().map(|&(id, p)| (id, p.y)).collect();
    let (vx, rx) = solve_dirichlet(config, domain, &bx, tol, max_iter)?;
    let (vy, ry) = solve_dirichlet(config, domain, &by, tol, max_iter)?;
    let values = vx
        .into_iter()
        .zip(vy)
        .map(|(x, y)| Point::new(x, y))
        .collect();
    Ok((values, rx.max(ry)))
}

/// Default iteration cap for the solver.
pub fn default_max_iter(config: &CellConfiguration) -> usize {
    50 * config.n_cells().max(64)
}

/// Report accompanying a glued mass-`m` embedding.
#[derive(Debug, Clone)]
pub struct PhiMReport {
    pub squares: Vec<Square>,
    /// Union of the per-square cell sets: the evaluation domain for energy
    /// identities.
    pub domain: CellSet,
    pub max_residual: f64,
    pub solves: usize,
}

/// The glued embedding at mass budget `m` over `region`: centroid values on
/// every cell meeting a partition-square boundary, per-square harmonic
/// solves inside. Cells outside every partition square keep their centroid
/// value.
pub fn phi_m(
    config: &CellConfiguration,
    d: &DyadicSystem2D,
    m: f64,
    region: &Square,
    tol: f64,
) -> Result<(Embedding, PhiMReport)> {
    let squares = d.partition(config, m, region)?;
    phi_on_squares(config, &squares, EmbeddingLabel::PhiM { m }, tol)
}

/// Shared worker: pins centroids on square-boundary cells and solves each
/// square interior. Solves are independent and run in parallel; the result
/// is assembled in square order, so it does not depend on thread count.
fn phi_on_squares(
    config: &CellConfiguration,
    squares: &[Square],
    label: EmbeddingLabel,
    tol: f64,
) -> Result<(Embedding, PhiMReport)> {
    let base = phi0(config);
    let mut values = base.values().to_vec();
    let max_iter = default_max_iter(config);

    type SquareSolve = (Vec<CellId>, Vec<Point>, f64);
    let solved: Vec<Result<SquareSolve>> = squares
        .par_iter()
        .map(|s| {
            let cells = config.cells_in_box(s);
            let bset = config.boundary_cells(s);
            let domain = CellSet::new(cells, config.n_cells());
            let boundary: Vec<(CellId, Point)> =
                bset.iter().map(|&id| (id, config.centroid(id))).collect();
            let interior: Vec<CellId> = domain
                .ids()
                .iter()
                .copied()
                .filter(|id| !bset.contains(id))
                .collect();
            if interior.is_empty() {
                return Ok((Vec::new(), Vec::new(), 0.0));
            }
            let (field, residual) =
                solve_dirichlet_points(config, &domain, &boundary, tol, max_iter)?;
            let vals = interior.iter().map(|id| field[id.idx()]).collect();
            Ok((interior, vals, residual))
        })
        .collect();

    let mut domain_ids = Vec::new();
    let mut max_residual = 0.0f64;
    let mut solves = 0usize;
    for (s, outcome) in squares.iter().zip(solved) {
        let (interior, vals, residual) = outcome?;
        for (id, v) in interior.iter().zip(vals) {
            values[id.idx()] = v;
        }
        max_residual = max_residual.max(residual);
        solves += 1;
        domain_ids.extend(config.cells_in_box(s));
    }
    let domain = CellSet::new(domain_ids, config.n_cells());
    Ok((
        Embedding { label, values, residual: max_residual },
        PhiMReport { squares: squares.to_vec(), domain, max_residual, solves },
    ))
}

/// Specific-energy evaluation of the difference `g - f` over a region box.
#[derive(Debug, Clone)]
pub struct SpecificEnergyReport {
    /// Integral of the per-cell energy density over the box, computed by the
    /// cell route (clip areas cancel against the density denominators).
    pub integral: f64,
    /// The same quantity by the independent edge route.
    pub edge_energy: f64,
    /// Integral normalized by the box area.
    pub normalized: f64,
    /// Relative gap between the two routes.
    pub rel_gap: f64,
}

/// Specific Dirichlet energy of `g - f` over the cells meeting `region`:
/// per-cell density `sum over in-region neighbors of c |d(g-f)|^2 / (2
/// Area(H and region))`, integrated with clip-area weights. The identity
/// check recomputes the integral as the plain Dirichlet energy of the
/// difference over the induced subgraph.
pub fn specific_energy(
    config: &CellConfiguration,
    f: &[Point],
    g: &[Point],
    region: &Square,
) -> Result<SpecificEnergyReport> {
    let ids = config.cells_in_box(region);
    let set = CellSet::new(ids.clone(), config.n_cells());
    let diff: Vec<Point> = g.iter().zip(f).map(|(a, b)| *a - *b).collect();

    // cell route, with the density literally divided and re-multiplied
    let mut integral = 0.0;
    for &id in set.ids() {
        let clip = config.region(id).clip_area(region);
        if clip <= 0.0 {
            continue;
        }
        let mut density = 0.0;
        for &(nb, c) in config.neighbors(id) {
            if set.contains(nb) {
                density += c * (diff[id.idx()] - diff[nb.idx()]).norm2() / (2.0 * clip);
            }
        }
        integral += density * clip;
    }

    // edge route
    let mut edge_energy = 0.0;
    for &id in set.ids() {
        for &(nb, c) in config.neighbors(id) {
            if id < nb && set.contains(nb) {
                edge_energy += c * (diff[id.idx()] - diff[nb.idx()]).norm2();
            }
        }
    }
    let denom = integral.abs().max(edge_energy.abs()).max(1e-300);
    Ok(SpecificEnergyReport {
        integral,
        edge_energy,
        normalized: integral / region.area(),
        rel_gap: (integral - edge_energy).abs() / denom,
    })
}

/// Energy decomposition over a mass ladder.
#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub ladder: Vec<f64>,
    /// `Energy(phi_{m_j} - phi_{m_{j-1}})` over the evaluation domain, with
    /// `phi_{m_0}` the centroid embedding when the ladder starts at 0.
    pub increment_energies: Vec<f64>,
    pub increments_sum: f64,
    /// Direct energy of `phi_{m_max} - phi_0` over the domain.
    pub direct: f64,
    pub rel_gap: f64,
    /// Largest `|<u_i, u_j>| / sqrt(E_i E_j)` over distinct increments.
    pub max_orthogonality_ratio: f64,
    pub domain_cells: usize,
}

/// Computes the increment energies of the ladder `0 = m_0 < m_1 < ... <
/// m_max` over the union of the top-level partition squares, the direct
/// energy of the total increment, and the pairwise Dirichlet inner products
/// of distinct increments.
pub fn energy_decomposition(
    config: &CellConfiguration,
    d: &DyadicSystem2D,
    region: &Square,
    ladder: &[f64],
    tol: f64,
) -> Result<DecompositionReport> {
    if ladder.len() < 2 || ladder.windows(2).any(|w| w[0] >= w[1]) || ladder[0] <= 0.0 {
        return Err(Error::InvalidArgument(
            "ladder must be strictly increasing positive masses".into(),
        ));
    }
    let m_max = *ladder.last().unwrap();
    // evaluation domain: union of the top partition squares
    let top = d.partition(config, m_max, region)?;
    let mut domain_ids = Vec::new();
    for s in &top {
        domain_ids.extend(config.cells_in_box(s));
    }
    let domain = CellSet::new(domain_ids, config.n_cells());

    let base = phi0(config);
    let mut fields = vec![base.values().to_vec()];
    for &m in ladder {
        let (emb, _) = phi_m(config, d, m, region, tol)?;
        fields.push(emb.values().to_vec());
    }

    let increments: Vec<Vec<Point>> = fields
        .windows(2)
        .map(|w| w[1].iter().zip(&w[0]).map(|(a, b)| *a - *b).collect())
        .collect();
    let increment_energies: Vec<f64> = increments
        .iter()
        .map(|u| dirichlet_energy(config, FieldView::Points(u), Some(&domain)))
        .collect::<Result<_>>()?;
    let total: Vec<Point> = fields
        .last()
        .unwrap()
        .iter()
        .zip(&fields[0])
        .map(|(a, b)| *a - *b)
        .collect();
    let direct = dirichlet_energy(config, FieldView::Points(&total), Some(&domain))?;
    let increments_sum: f64 = increment_energies.iter().sum();
    let denom = direct.abs().max(increments_sum.abs()).max(1e-300);

    let mut max_ratio = 0.0f64;
    for i in 0..increments.len() {
        for j in (i + 1)..increments.len() {
            let ip = dirichlet_inner_product(config, &increments[i], &increments[j], &domain);
            let geo = (increment_energies[i] * increment_energies[j]).sqrt().max(1e-300);
            max_ratio = max_ratio.max(ip.abs() / geo);
        }
    }

    Ok(DecompositionReport {
        ladder: ladder.to_vec(),
        increment_energies,
        increments_sum,
        direct,
        rel_gap: (direct - increments_sum).abs() / denom,
        max_orthogonality_ratio: max_ratio,
        domain_cells: domain.len(),
    })
}

/// Corrector approximation report.
#[derive(Debug, Clone)]
pub struct CorrectorReport {
    /// Normalized specific energy of `phi_region - phi_{m/2}`, the tail
    /// convergence indicator.
    pub tail_energy: f64,
    pub residual: f64,
    pub region: Square,
}

/// Approximates the limiting harmonic embedding by a single Dirichlet solve
/// over `region` with centroid boundary data on the cells meeting the
/// region boundary. The tail-energy proxy compares the solve against the
/// glued embedding at mass `m / 2`.
///
/// `region` must keep at least one cell layer inside the window.
pub fn corrector_approx(
    config: &CellConfiguration,
    d: &DyadicSystem2D,
    region: &Square,
    m: f64,
    tol: f64,
) -> Result<(Embedding, CorrectorReport)> {
    let window = config.window();
    if !window.contains_square(region, GEOM_TOL) {
        return Err(Error::WindowTooSmall("corrector region leaves the window".into()));
    }
    let cells = config.cells_in_box(region);
    let domain = CellSet::new(cells, config.n_cells());
    if domain.ids().iter().any(|&id| config.is_frozen(id)) {
        // frozen rim cells have unknown true neighbors; they may only carry
        // boundary data, which pinning to centroids provides, so only the
        // interior set must avoid them
    }
    let bset = config.boundary_cells(region);
    let boundary: Vec<(CellId, Point)> =
        bset.iter().map(|&id| (id, config.centroid(id))).collect();
    let (values0, residual) = solve_dirichlet_points(
        config,
        &domain,
        &boundary,
        tol,
        default_max_iter(config),
    )?;
    // off-domain cells keep centroids
    let base = phi0(config);
    let mut values = base.values().to_vec();
    for &id in domain.ids() {
        values[id.idx()] = values0[id.idx()];
    }
    let emb = Embedding {
        label: EmbeddingLabel::CorrectorApprox { m },
        values,
        residual,
    };
    let (lo, _) = phi_m(config, d, m / 2.0, region, tol)?;
    let tail = specific_energy(config, lo.values(), emb.values(), region)?;
    Ok((
        emb,
        CorrectorReport { tail_energy: tail.normalized, residual, region: *region },
    ))
}

/// `(1/r) sup over cells meeting B_r(0) of |embedding - phi0|` for each
/// radius.
pub fn sublinearity_profile(
    config: &CellConfiguration,
    embedding: &Embedding,
    base: &Embedding,
    radii: &[f64],
) -> Vec<(f64, f64)> {
    radii
        .iter()
        .map(|&r| {
            let sup = config
                .cells_in_ball(Point::new(0.0, 0.0), r)
                .into_iter()
                .map(|id| (embedding.value(id) - base.value(id)).norm())
                .fold(0.0f64, f64::max);
            (r, sup / r)
        })
        .collect()
}

/// Comparison of horizontal-line total variation against the Dirichlet
/// energy.
#[derive(Debug, Clone)]
pub struct PathVariationReport {
    /// Quadrature of `sum over edges on the horizontal line of |df|` over
    /// line heights.
    pub lhs: f64,
    pub energy: f64,
    pub sqrt_energy: f64,
    /// Empirical constant `lhs / sqrt(energy)`.
    pub ratio: f64,
    /// The Cauchy-Schwarz bound `2 (sum diam^2 pi* / side^2)^(1/2)`.
    pub cs_bound: f64,
}

/// Integrates the total variation of `f` along horizontal cross-sections of
/// the box (midpoint quadrature over `n_lines` heights, exact line-cell
/// incidence per height) and compares against `Energy(f)^(1/2)`.
pub fn path_variation_check(
    config: &CellConfiguration,
    f: FieldView<'_>,
    b: &Square,
    n_lines: usize,
) -> Result<PathVariationReport> {
    if n_lines < 1 {
        return Err(Error::InvalidArgument("need at least one line".into()));
    }
    let mut acc = 0.0;
    for i in 0..n_lines {
        let r = (i as f64 + 0.5) / n_lines as f64;
        let y = b.anchor.y + r * b.side;
        let a = Point::new(b.anchor.x, y);
        let c = Point::new(b.anchor.x + b.side, y);
        let cells = config.cells_on_segment(a, c);
        let set = CellSet::new(cells, config.n_cells());
        let mut line_sum = 0.0;
        for &id in set.ids() {
            if !f.is_set(id) {
                return Err(Error::MissingValue(id.0));
            }
            for &(nb, _) in config.neighbors(id) {
                if id < nb && set.contains(nb) {
                    line_sum += f.diff_abs(id, nb);
                }
            }
        }
        acc += line_sum / n_lines as f64;
    }
    let set = CellSet::new(config.cells_in_box(b), config.n_cells());
    let energy = dirichlet_energy(config, f, Some(&set))?;
    let sum_diam2_pistar: f64 = set
        .ids()
        .iter()
        .map(|&id| config.diameter(id).powi(2) * config.pi_star(id))
        .sum();
    let cs_bound = 2.0 * (sum_diam2_pistar / (b.side * b.side)).sqrt();
    let sqrt_energy = energy.sqrt();
    Ok(PathVariationReport {
        lhs: acc,
        energy,
        sqrt_energy,
        ratio: if sqrt_energy > 0.0 { acc / sqrt_energy } else { 0.0 },
        cs_bound,
    })
}

/// Compares discrete Dirichlet extensions against a continuum harmonic
/// function across scales.
///
/// For each `eps`, the outline region scaled by `1/eps` is the solve
/// domain. Cells crossed by the scaled outline are pinned to `f_true(eps *
/// z_H)` for `z_H` a point of the cell on the outline (the mean of the
/// outline's chord through the cell); this is the source of the genuine
/// O(eps) discretization error. The reported error is the sup over domain
/// cells of `|solution - f_true(eps * centroid)|`. `f_true` must be
/// harmonic for the Brownian motion the environment homogenizes to (any
/// isotropic covariance for the symmetric generators in this crate).
pub fn harmonic_extension_compare(
    config: &CellConfiguration,
    outline: &Region,
    f_true: &dyn Fn(Point) -> f64,
    scales: &[f64],
    tol: f64,
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(scales.len());
    for &eps in scales {
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!("scale must be positive, got {eps}")));
        }
        let scaled = outline.scaled_translated(1.0 / eps, Point::new(0.0, 0.0));
        let (lo, hi) = scaled.bbox();
        let window = config.window();
        if lo.x < window.anchor.x
            || lo.y < window.anchor.y
            || hi.x > window.anchor.x + window.side
            || hi.y > window.anchor.y + window.side
        {
            return Err(Error::WindowTooSmall(format!(
                "scaled domain at eps = {eps} leaves the window"
            )));
        }
        let cells = config.cells_in_region(&scaled);
        let domain = CellSet::new(cells, config.n_cells());

        // anchor each outline-crossed cell at the mean of the outline
        // samples falling inside it
        let min_diam = domain
            .ids()
            .iter()
            .map(|&id| config.diameter(id))
            .fold(f64::INFINITY, f64::min);
        let step = (min_diam / 8.0).max(1e-9);
        let mut anchor_sum: std::collections::BTreeMap<CellId, (Point, f64)> = Default::default();
        for ring in scaled.rings() {
            let n = ring.len();
            for i in 0..n {
                let (a, b) = (ring[i], ring[(i + 1) % n]);
                let len = (b - a).norm();
                let pieces = (len / step).ceil().max(1.0) as usize;
                for p in 0..pieces {
                    let t = (p as f64 + 0.5) / pieces as f64;
                    let z = a + (b - a).scale(t);
                    if let Some(id) = config.cell_at(z) {
                        let e = anchor_sum.entry(id).or_insert((Point::new(0.0, 0.0), 0.0));
                        e.0 = e.0 + z;
                        e.1 += 1.0;
                    }
                }
            }
        }
        let boundary: Vec<(CellId, f64)> = anchor_sum
            .iter()
            .filter(|(id, _)| domain.contains(**id))
            .map(|(&id, &(sum, count))| {
                let z = sum.scale(1.0 / count);
                (id, f_true(z.scale(eps)))
            })
            .collect();
        if boundary.is_empty() {
            return Err(Error::InvalidArgument(
                "outline crosses no cells at this scale".into(),
            ));
        }
        let (field, _) =
            solve_dirichlet(config, &domain, &boundary, tol, default_max_iter(config))?;
        let mut sup = 0.0f64;
        for &id in domain.ids() {
            let want = f_true(config.centroid(id).scale(eps));
            sup = sup.max((field[id.idx()] - want).abs());
        }
        out.push((eps, sup));
    }
    Ok(out)
}
