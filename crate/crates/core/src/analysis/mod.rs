//! Statistical utilities: empirical measures and the Prokhorov distance,
//! Kolmogorov-Smirnov statistics, CSV emission, and SVG rendering.

mod svg;

pub use svg::{render_svg, Scene, SceneItem, Style};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// A finitely supported probability measure on the plane.
#[derive(Debug, Clone)]
pub struct EmpiricalMeasure {
    points: Vec<Point>,
    weights: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn new(points: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::InvalidArgument(
                "measure needs matching nonempty point and weight lists".into(),
            ));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidArgument("measure weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "measure weights must sum to 1 within 1e-12, got {total}"
            )));
        }
        Ok(EmpiricalMeasure { points, weights })
    }

    /// Equal-weight empirical measure of a sample.
    pub fn from_samples(samples: &[Point]) -> Result<Self> {
        let n = samples.len();
        if n == 0 {
            return Err(Error::InvalidArgument("empty sample".into()));
        }
        let w = 1.0 / n as f64;
        // renormalize exactly
        let mut weights = vec![w; n];
        let sum: f64 = weights.iter().sum();
        for wt in &mut weights {
            *wt /= sum;
        }
        EmpiricalMeasure::new(samples.to_vec(), weights)
    }

    pub fn support(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Snaps points to a grid of the given spacing and merges coincident
    /// atoms. Perturbs the measure by at most `spacing / sqrt(2)` in
    /// Prokhorov distance; keeps supports small enough for the flow-based
    /// distance at large sample counts.
    pub fn coalesce(&self, spacing: f64) -> EmpiricalMeasure {
        use std::collections::BTreeMap;
        let mut acc: BTreeMap<(i64, i64), f64> = BTreeMap::new();
        for (p, w) in self.points.iter().zip(&self.weights) {
            let key = ((p.x / spacing).round() as i64, (p.y / spacing).round() as i64);
            *acc.entry(key).or_insert(0.0) += w;
        }
        let mut points = Vec::with_capacity(acc.len());
        let mut weights = Vec::with_capacity(acc.len());
        for ((ix, iy), w) in acc {
            points.push(Point::new(ix as f64 * spacing, iy as f64 * spacing));
            weights.push(w);
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        EmpiricalMeasure { points, weights }
    }
}

/// Prokhorov distance between two finitely supported measures, to within
/// `tol`, by bisection on the smallest `eps` such that a coupling moves all
/// but `eps` of the mass by at most `eps` (Strassen's theorem; feasibility
/// decided by max-flow on the eps-neighborhood bipartite graph). Bounded by
/// 1, symmetric, and exact on the feasibility side: the returned value is
/// never below the true distance.
pub fn prokhorov_distance(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure, tol: f64) -> f64 {
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    if prokhorov_feasible(mu, nu, 0.0) {
        return 0.0;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if prokhorov_feasible(mu, nu, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Whether mass `1 - eps` can be routed from `mu` to `nu` along pairs at
/// distance at most `eps`.
fn prokhorov_feasible(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure, eps: f64) -> bool {
    let n = mu.points.len();
    let m = nu.points.len();
    let mut flow = Dinic::new(n + m + 2);
    let src = n + m;
    let snk = n + m + 1;
    for (i, &w) in mu.weights.iter().enumerate() {
        flow.add_edge(src, i, w);
    }
    for (j, &w) in nu.weights.iter().enumerate() {
        flow.add_edge(n + j, snk, w);
    }
    let eps2 = (eps + 1e-12) * (eps + 1e-12);
    for (i, p) in mu.points.iter().enumerate() {
        for (j, q) in nu.points.iter().enumerate() {
            if (*p - *q).norm2() <= eps2 {
                flow.add_edge(i, n + j, f64::INFINITY);
            }
        }
    }
    let max = flow.max_flow(src, snk);
    max >= 1.0 - eps - 1e-9
}

/// Dinic max-flow with f64 capacities.
struct Dinic {
    heads: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<f64>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Dinic {
        Dinic {
            heads: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
            level: vec![0; n],
            iter: vec![0; n],
        }
    }

    fn add_edge(&mut self, a: usize, b: usize, c: f64) {
        let e = self.to.len();
        self.to.push(b);
        self.cap.push(c);
        self.to.push(a);
        self.cap.push(0.0);
        self.heads[a].push(e);
        self.heads[b].push(e + 1);
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        const EPS: f64 = 1e-15;
        self.level.fill(-1);
        let mut q = std::collections::VecDeque::new();
        self.level[s] = 0;
        q.push_back(s);
        while let Some(v) = q.pop_front() {
            for &e in &self.heads[v] {
                if self.cap[e] > EPS && self.level[self.to[e]] < 0 {
                    self.level[self.to[e]] = self.level[v] + 1;
                    q.push_back(self.to[e]);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, v: usize, t: usize, f: f64) -> f64 {
        const EPS: f64 = 1e-15;
        if v == t {
            return f;
        }
        while self.iter[v] < self.heads[v].len() {
            let e = self.heads[v][self.iter[v]];
            let u = self.to[e];
            if self.cap[e] > EPS && self.level[u] == self.level[v] + 1 {
                let d = self.dfs(u, t, f.min(self.cap[e]));
                if d > EPS {
                    self.cap[e] -= d;
                    self.cap[e ^ 1] += d;
                    return d;
                }
            }
            self.iter[v] += 1;
        }
        0.0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        while self.bfs(s, t) {
            self.iter.fill(0);
            loop {
                let f = self.dfs(s, t, f64::INFINITY);
                if f <= 1e-15 {
                    break;
                }
                total += f;
            }
        }
        total
    }
}

/// One-sample Kolmogorov-Smirnov statistic against Uniform[0, 1).
pub fn ks_uniform(samples: &[f64]) -> Result<f64> {
    if samples.len() < 10 {
        return Err(Error::InvalidArgument(format!(
            "KS needs at least 10 samples, got {}",
            samples.len()
        )));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        d = d.max((i as f64 + 1.0) / n - x).max(x - i as f64 / n);
    }
    Ok(d)
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() < 10 || b.len() < 10 {
        return Err(Error::InvalidArgument("two-sample KS needs at least 10 samples each".into()));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        if xs[i] <= ys[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Batch mean and standard error.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, (var / n).sqrt())
}

/// A CSV field.
#[derive(Debug, Clone)]
pub enum CsvField {
    Int(i64),
    Real(f64),
    Text(String),
}

impl std::fmt::Display for CsvField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CsvField::Int(v) => write!(f, "{v}"),
            CsvField::Real(v) => write!(f, "{}", crate::environment::fmt_real_17(*v)),
            CsvField::Text(v) => write!(f, "{v}"),
        }
    }
}

/// Renders a CSV document: one header row, 17-significant-digit reals,
/// UNIX newlines.
pub fn csv_document(header: &[&str], rows: &[Vec<CsvField>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|f| f.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Writes a CSV document atomically (temp file + rename).
pub fn write_csv(path: &std::path::Path, header: &[&str], rows: &[Vec<CsvField>]) -> Result<()> {
    crate::environment::atomic_write_bytes(path, csv_document(header, rows).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(coords: &[(f64, f64)]) -> Vec<Point> {
        coords.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    /// Brute-force Prokhorov feasibility: checks mu(A) <= nu(A^eps) + eps
    /// and the symmetric condition over every subset A of the supports.
    fn oracle_feasible(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure, eps: f64) -> bool {
        let check = |a: &EmpiricalMeasure, b: &EmpiricalMeasure| -> bool {
            let n = a.support().len();
            for mask in 1u32..(1 << n) {
                let mut mass_a = 0.0;
                for i in 0..n {
                    if mask & (1 << i) != 0 {
                        mass_a += a.weights()[i];
                    }
                }
                let mut mass_b_near = 0.0;
                for (j, q) in b.support().iter().enumerate() {
                    let near = (0..n).any(|i| {
                        mask & (1 << i) != 0 && (a.support()[i] - *q).norm() <= eps + 1e-12
                    });
                    if near {
                        mass_b_near += b.weights()[j];
                    }
                }
                if mass_a > mass_b_near + eps + 1e-9 {
                    return false;
                }
            }
            true
        };
        check(mu, nu) && check(nu, mu)
    }

    fn oracle_distance(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> f64 {
        let mut lo = 0.0;
        let mut hi = 1.0;
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if oracle_feasible(mu, nu, mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    #[test]
    fn identical_measures_have_distance_zero() {
        let m = EmpiricalMeasure::from_samples(&pts(&[(0.0, 0.0), (1.0, 1.0)])).unwrap();
        assert_eq!(prokhorov_distance(&m, &m, 1e-9), 0.0);
    }

    #[test]
    fn point_masses_at_distance_d() {
        for d in [0.25, 0.7, 2.0] {
            let mu = EmpiricalMeasure::from_samples(&pts(&[(0.0, 0.0)])).unwrap();
            let nu = EmpiricalMeasure::from_samples(&pts(&[(d, 0.0)])).unwrap();
            let got = prokhorov_distance(&mu, &nu, 1e-9);
            assert!((got - d.min(1.0)).abs() < 1e-6, "d={d}: got {got}");
        }
    }

    #[test]
    fn half_mass_displacement() {
        // mu uniform on {0, 1}, nu a point at 0: distance 1/2
        let mu = EmpiricalMeasure::from_samples(&pts(&[(0.0, 0.0), (1.0, 0.0)])).unwrap();
        let nu = EmpiricalMeasure::from_samples(&pts(&[(0.0, 0.0)])).unwrap();
        let got = prokhorov_distance(&mu, &nu, 1e-9);
        // oracle: brute force over the four subsets
        let want = oracle_distance(&mu, &nu);
        assert!((want - 0.5).abs() < 1e-6);
        assert!((got - 0.5).abs() < 1e-6, "got {got}");
    }

    #[test]
    fn flow_matches_subset_oracle_on_random_measures() {
        use rand::Rng;
        let mut rng = crate::rng::stream_rng(31, 0);
        for trial in 0..10 {
            let n = rng.random_range(2..6);
            let m = rng.random_range(2..6);
            let draw = |rng: &mut rand_chacha::ChaCha8Rng, k: usize| {
                let points: Vec<Point> = (0..k)
                    .map(|_| Point::new(rng.random_range(0.0..2.0), rng.random_range(0.0..2.0)))
                    .collect();
                let mut ws: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
                let total: f64 = ws.iter().sum();
                for w in &mut ws {
                    *w /= total;
                }
                EmpiricalMeasure::new(points, ws).unwrap()
            };
            let mu = draw(&mut rng, n);
            let nu = draw(&mut rng, m);
            let got = prokhorov_distance(&mu, &nu, 1e-7);
            let want = oracle_distance(&mu, &nu);
            assert!((got - want).abs() < 1e-5, "trial {trial}: got {got}, oracle {want}");
        }
    }

    #[test]
    fn prokhorov_symmetry_and_triangle() {
        use rand::Rng;
        let mut rng = crate::rng::stream_rng(77, 0);
        for _ in 0..5 {
            let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
                let pts: Vec<Point> = (0..6)
                    .map(|_| Point::new(rng.random_range(0.0..1.5), rng.random_range(0.0..1.5)))
                    .collect();
                EmpiricalMeasure::from_samples(&pts).unwrap()
            };
            let a = draw(&mut rng);
            let b = draw(&mut rng);
            let c = draw(&mut rng);
            let tol = 1e-7;
            let ab = prokhorov_distance(&a, &b, tol);
            let ba = prokhorov_distance(&b, &a, tol);
            assert!((ab - ba).abs() <= 2.0 * tol);
            let ac = prokhorov_distance(&a, &c, tol);
            let cb = prokhorov_distance(&c, &b, tol);
            assert!(ab <= ac + cb + 2.0 * tol);
            assert!(ab <= 1.0);
        }
    }

    #[test]
    fn coalesce_preserves_mass() {
        let m = EmpiricalMeasure::from_samples(&pts(&[
            (0.01, 0.0),
            (-0.01, 0.0),
            (1.0, 1.0),
            (1.02, 1.01),
        ]))
        .unwrap();
        let c = m.coalesce(0.1);
        assert_eq!(c.support().len(), 2);
        assert!((c.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ks_statistics() {
        // repeated 0.5: D = 0.5
        let d = ks_uniform(&[0.5; 10]).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        // perfect grid i/n has D <= 1/n
        let n = 100;
        let grid: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_uniform(&grid).unwrap();
        assert!(d <= 1.0 / n as f64 + 1e-12, "grid KS {d}");
        // 1e4 uniforms: below 0.02 for this fixed seed (asymptotic 1.63/sqrt(n))
        use rand::Rng;
        let mut rng = crate::rng::stream_rng(4, 0);
        let xs: Vec<f64> = (0..10_000).map(|_| rng.random_range(0.0..1.0)).collect();
        let d = ks_uniform(&xs).unwrap();
        assert!(d < 0.02, "KS {d}");
        assert!(ks_uniform(&[0.1; 5]).is_err());
    }

    #[test]
    fn two_sample_ks_detects_shift() {
        use rand::Rng;
        let mut rng = crate::rng::stream_rng(5, 0);
        let a: Vec<f64> = (0..2_000).map(|_| rng.random_range(0.0..1.0)).collect();
        let b: Vec<f64> = (0..2_000).map(|_| rng.random_range(0.0..1.0)).collect();
        let same = ks_two_sample(&a, &b).unwrap();
        assert!(same < 0.05, "same-law KS {same}");
        let shifted: Vec<f64> = a.iter().map(|x| x * 0.8 + 0.2).collect();
        let diff = ks_two_sample(&a, &shifted).unwrap();
        assert!(diff > 0.1, "shifted KS {diff}");
    }

    #[test]
    fn csv_formatting() {
        let doc = csv_document(
            &["a", "b"],
            &[vec![CsvField::Int(1), CsvField::Real(0.5)]],
        );
        assert_eq!(doc, "a,b\n1,5.0000000000000000e-1\n");
    }
}
