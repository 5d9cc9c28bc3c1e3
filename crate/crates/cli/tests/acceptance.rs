//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured values. Tolerances are pinned in code; the suite combines
//! exact identities, analytic oracles, and fixed-seed Monte Carlo runs at
//! desk scale.

use planewalk::analysis::{ks_two_sample, ks_uniform};
use planewalk::dyadic::{mass_transport_check, DyadicSystem2D, TransportRule};
use planewalk::environment::{CellConfigurationBuilder, CellId};
use planewalk::generators::{
    gen_grid, gen_split_grid, ConductanceLaw, GridSpec,
};
use planewalk::geometry::{dcmp, Point, Region, Square, TimedCurve};
use planewalk::harmonic::{
    corrector_approx, dirichlet_energy, energy_decomposition, harmonic_extension_compare, phi0,
    phi_m, sublinearity_profile, CellSet,
};
use planewalk::rng::stream_rng;
use planewalk::walk::{
    estimate_sigma, exit_coupling_tv, exit_law_prokhorov, jump_truncation_stats,
    log_annulus_energy_oracle, recurrence_resistance, run_walk, step, StopRule,
};
use planewalk::CellConfiguration;
use rand::Rng;

fn pass(criterion: u32, detail: &str) {
    println!("ACCEPTANCE PASS criterion {criterion}: {detail}");
}

fn uniform_grid(n: u32, seed: u64) -> CellConfiguration {
    gen_grid(&GridSpec { n, law: ConductanceLaw::Uniform(1.0, 2.0), shift: false, seed }).unwrap()
}

fn unit_grid(n: u32) -> CellConfiguration {
    gen_grid(&GridSpec { n, law: ConductanceLaw::Constant(1.0), shift: false, seed: 0 }).unwrap()
}

/// Criterion 1: harmonic gluing never increases Dirichlet energy over the
/// partition domain, within 1e-8 relative, across seeds and on the split
/// grid.
#[test]
fn criterion_01_energy_monotonicity() {
    let ladder = [4.0, 16.0, 64.0];
    let mut worst: f64 = f64::NEG_INFINITY;
    for seed in 0..5 {
        let g = uniform_grid(128, 100 + seed);
        let d = DyadicSystem2D::sample_uniform(seed);
        let region = Square::centered(Point::new(0.0, 0.0), 64.0).unwrap();
        let base = phi0(&g);
        for &m in &ladder {
            let (emb, report) = phi_m(&g, &d, m, &region, 1e-10).unwrap();
            let e_m = dirichlet_energy(&g, emb.view(), Some(&report.domain)).unwrap();
            let e_0 = dirichlet_energy(&g, base.view(), Some(&report.domain)).unwrap();
            assert!(
                e_m <= e_0 * (1.0 + 1e-8),
                "seed {seed}, mass {m}: {e_m} > {e_0}"
            );
            worst = worst.max(e_m / e_0 - 1.0);
        }
    }
    let split = gen_split_grid(5).unwrap();
    let d = DyadicSystem2D::sample_uniform(9);
    let region = Square::centered(Point::new(0.0, 0.0), 0.4).unwrap();
    let base = phi0(&split);
    for m in [8.0, 32.0] {
        let (emb, report) = phi_m(&split, &d, m, &region, 1e-10).unwrap();
        let e_m = dirichlet_energy(&split, emb.view(), Some(&report.domain)).unwrap();
        let e_0 = dirichlet_energy(&split, base.view(), Some(&report.domain)).unwrap();
        assert!(e_m <= e_0 * (1.0 + 1e-8), "split grid mass {m}: {e_m} > {e_0}");
        worst = worst.max(e_m / e_0 - 1.0);
    }
    pass(1, &format!("energy monotone; worst relative excess {worst:.2e}"));
}

/// Criterion 2: the increment energies sum to the direct energy within 1e-6
/// relative, and distinct increments are Dirichlet-orthogonal within 1e-6
/// of their geometric-mean energies, at solver tolerance 1e-10.
#[test]
fn criterion_02_energy_decomposition() {
    let g = uniform_grid(96, 7);
    let d = DyadicSystem2D::sample_uniform(2);
    let region = Square::centered(Point::new(0.0, 0.0), 40.0).unwrap();
    let report = energy_decomposition(&g, &d, &region, &[4.0, 8.0, 16.0, 32.0, 64.0], 1e-10)
        .unwrap();
    assert!(report.rel_gap <= 1e-6, "gap {}", report.rel_gap);
    assert!(
        report.max_orthogonality_ratio <= 1e-6,
        "orthogonality {}",
        report.max_orthogonality_ratio
    );
    pass(
        2,
        &format!(
            "gap {:.2e}, max orthogonality ratio {:.2e} over {} cells",
            report.rel_gap, report.max_orthogonality_ratio, report.domain_cells
        ),
    );
}

/// Criterion 3: on the unit grid the centroids are already harmonic, so the
/// corrector approximation coincides with them to 1e-8.
#[test]
fn criterion_03_zero_corrector_on_grid() {
    let g = unit_grid(64);
    let d = DyadicSystem2D::sample_uniform(4);
    let region = Square::centered(Point::new(0.0, 0.0), 48.0).unwrap();
    let (emb, _) = corrector_approx(&g, &d, &region, 64.0, 1e-12).unwrap();
    let base = phi0(&g);
    let sup = g
        .ids()
        .map(|id| (emb.value(id) - base.value(id)).norm())
        .fold(0.0f64, f64::max);
    assert!(sup <= 1e-8, "sup |phi_M - phi0| = {sup}");
    pass(3, &format!("sup |phi_M - phi0| = {sup:.2e}"));
}

/// Criterion 4: the covariance of the embedded walk on the unit grid.
/// Oracle: holding time 1/4 gives 4T jumps by T, each a unit move in a
/// uniform axis direction, so every directional rate is 2 and the
/// covariance is 2I. Entries within 5%, rho within 0.05 absolute.
#[test]
fn criterion_04_sigma_on_unit_grid() {
    let g = unit_grid(512);
    let base = phi0(&g);
    let est = estimate_sigma(&g, &base, g.center_cell(), 10_000, 2500.0, 11).unwrap();
    let sigma = est.sigma.expect("rates are positive");
    assert!((sigma[0][0] - 2.0).abs() <= 0.05 * 2.0, "sigma_xx {}", sigma[0][0]);
    assert!((sigma[1][1] - 2.0).abs() <= 0.05 * 2.0, "sigma_yy {}", sigma[1][1]);
    assert!(est.rho.abs() <= 0.05, "rho {}", est.rho);
    assert!(!est.boundary_warning, "discarded {}", est.walks_discarded);
    pass(
        4,
        &format!(
            "sigma = [[{:.4}, {:.4}], [{:.4}, {:.4}]] from {} walks",
            sigma[0][0], sigma[0][1], sigma[1][0], sigma[1][1], est.walks_used
        ),
    );
}

/// Exact hitting probability of the bottom end before the top end for the
/// walk on the vertices of a subdivided interval (the 1D contrast case),
/// solved directly on the path graph.
fn gamblers_ruin_interval(lower_pieces: usize, upper_pieces: usize) -> f64 {
    // vertices 0..=n, absorbing at 0 (bottom) and n (top); start at the
    // midpoint vertex between the halves; h(i) = P(hit 0 before n from i)
    // solves the discrete Laplace equation on the path: h is linear.
    // Solve the tridiagonal system explicitly rather than quoting the
    // closed form.
    let n = lower_pieces + upper_pieces;
    let mut h = vec![0.0; n + 1];
    h[0] = 1.0;
    // Thomas algorithm for the interior unknowns of h(i) = (h(i-1)+h(i+1))/2
    let m = n - 1;
    let mut c = vec![0.0; m];
    let mut dvec = vec![0.0; m];
    for i in 0..m {
        let b = -2.0;
        let rhs = if i == 0 { -h[0] } else { 0.0 };
        if i == 0 {
            c[i] = 1.0 / b;
            dvec[i] = rhs / b;
        } else {
            let denom = b - c[i - 1];
            c[i] = 1.0 / denom;
            dvec[i] = (rhs - dvec[i - 1]) / denom;
        }
    }
    let mut x = vec![0.0; m];
    x[m - 1] = dvec[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = dvec[i] - c[i] * x[i + 1];
    }
    h[1..=m].copy_from_slice(&x[..m]);
    h[lower_pieces]
}

/// Criterion 5: the split grid is fair in 2D (exit top before bottom with
/// probability 1/2 from the center), while the 1D analog is exactly 2/3.
#[test]
fn criterion_05_split_grid_fairness() {
    // 1D contrast: lower half in n pieces, upper in 2n; from the midpoint
    // the walk hits the bottom first with probability exactly 2/3
    for n in [4usize, 16, 64] {
        let p = gamblers_ruin_interval(n, 2 * n);
        assert!((p - 2.0 / 3.0).abs() <= 1e-12, "1D analog at n={n}: {p}");
    }

    let g = gen_split_grid(5).unwrap();
    // absorbing rows: cells touching the top and bottom window edges
    let top: Vec<bool> = g
        .ids()
        .map(|id| g.region(id).dist_to_segment(
            Point::new(-0.5, 0.5),
            Point::new(0.5, 0.5),
        ) <= 1e-9)
        .collect();
    let bottom: Vec<bool> = g
        .ids()
        .map(|id| g.region(id).dist_to_segment(
            Point::new(-0.5, -0.5),
            Point::new(0.5, -0.5),
        ) <= 1e-9)
        .collect();
    // start just above the center point
    let start = g.cell_at(Point::new(1e-6, 1e-6)).unwrap();
    let n_walks = 100_000usize;
    let mut hit_top = 0usize;
    for w in 0..n_walks {
        let mut rng = stream_rng(55, w as u64);
        let mut cur = start;
        loop {
            cur = step(&g, cur, &mut rng).unwrap();
            if top[cur.idx()] {
                hit_top += 1;
                break;
            }
            if bottom[cur.idx()] {
                break;
            }
        }
    }
    let p = hit_top as f64 / n_walks as f64;
    assert!((p - 0.5).abs() <= 0.02, "P(top first) = {p}");
    pass(5, &format!("P(top first) = {p:.4} over {n_walks} walks; 1D analog = 2/3 exactly"));
}

/// Criterion 6: the radial test-function energies on the unit grid track
/// the continuum oracle 2 pi / ((r-1) ln 2) within a factor of two for
/// r in 3..=8, decrease strictly in r, and the resistance bounds increase.
#[test]
fn criterion_06_recurrence_test_function() {
    let g = unit_grid(550);
    let d = DyadicSystem2D::sample_uniform(6);
    let rows = recurrence_resistance(&g, &d, 8).unwrap();
    for row in rows.iter().filter(|r| r.r >= 3) {
        let oracle = log_annulus_energy_oracle(row.r);
        assert!(
            row.energy <= 2.0 * oracle && row.energy >= oracle / 2.0,
            "r = {}: energy {} vs oracle {}",
            row.r,
            row.energy,
            oracle
        );
    }
    for w in rows.windows(2) {
        assert!(w[1].energy < w[0].energy, "energy not decreasing at r = {}", w[1].r);
        assert!(
            w[1].resistance_bound > w[0].resistance_bound,
            "bound not increasing at r = {}",
            w[1].r
        );
    }
    let summary: Vec<String> = rows
        .iter()
        .map(|r| format!("r{}={:.3}/{:.3}", r.r, r.energy, log_annulus_energy_oracle(r.r)))
        .collect();
    pass(6, &format!("energies vs oracle: {}", summary.join(", ")));
}

/// Criterion 7: exit laws from square centers approach diffusion harmonic
/// measure: Prokhorov distance at side 64 below 0.05 and decreasing over
/// sides 16, 32, 64.
#[test]
fn criterion_07_exit_law_prokhorov() {
    let g = unit_grid(256);
    let sigma = [[2.0, 0.0], [0.0, 2.0]];
    let mut dists = Vec::new();
    for (i, side) in [16.0, 32.0, 64.0].into_iter().enumerate() {
        let square = Square::centered(Point::new(0.0, 0.0), side).unwrap();
        let report = exit_law_prokhorov(
            &g,
            g.center_cell(),
            &square,
            sigma,
            10_000,
            70 + i as u64,
        )
        .unwrap();
        dists.push((side, report.prokhorov));
    }
    assert!(dists[2].1 <= 0.05, "side 64 distance {}", dists[2].1);
    assert!(
        dists[0].1 > dists[1].1 && dists[1].1 > dists[2].1,
        "distances not decreasing: {dists:?}"
    );
    let text: Vec<String> = dists.iter().map(|(s, d)| format!("{s}:{d:.4}")).collect();
    pass(7, &format!("prokhorov by side {}", text.join(", ")));
}

/// Criterion 8: corrector sublinearity on the iid conductance grid: the
/// normalized sup at radius 128 is at most half its value at radius 16
/// (medians over 5 seeds).
#[test]
fn criterion_08_sublinearity() {
    let radii = [16.0, 32.0, 64.0, 128.0];
    let mut first = Vec::new();
    let mut last = Vec::new();
    for seed in 0..5 {
        let g = uniform_grid(272, 500 + seed);
        let d = DyadicSystem2D::sample_uniform(seed);
        let region = Square::centered(Point::new(0.0, 0.0), 260.0).unwrap();
        let (emb, _) = corrector_approx(&g, &d, &region, 64.0, 1e-10).unwrap();
        let base = phi0(&g);
        let prof = sublinearity_profile(&g, &emb, &base, &radii);
        first.push(prof[0].1);
        last.push(prof[3].1);
    }
    let median = |v: &mut Vec<f64>| {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v[v.len() / 2]
    };
    let m_first = median(&mut first);
    let m_last = median(&mut last);
    assert!(
        m_last <= 0.5 * m_first,
        "ratio at 128 = {m_last} vs 0.5 * ratio at 16 = {}",
        0.5 * m_first
    );
    pass(8, &format!("median (1/r) sup: r=16 -> {m_first:.4}, r=128 -> {m_last:.4}"));
}

/// Criterion 9: the disconnection bound for exit-law coupling holds on 20
/// random instances in a 64^2 grid at 1e4 samples each.
#[test]
fn criterion_09_wilson_coupling_bound() {
    let g = unit_grid(64);
    let mut rng = stream_rng(99, 0);
    let mut worst_margin = f64::INFINITY;
    for instance in 0..20 {
        // random interior start, random neighbor, random target box
        let x = loop {
            let px = rng.random_range(-10.0..10.0);
            let py = rng.random_range(-10.0..10.0);
            if let Some(c) = g.cell_at(Point::new(px, py)) {
                break c;
            }
        };
        let nbrs = g.neighbors(x);
        let y = nbrs[rng.random_range(0..nbrs.len())].0;
        let r = rng.random_range(8..=14) as f64;
        let target_box = Square::centered(g.centroid(x), 2.0 * r).unwrap();
        let target = CellSet::new(g.boundary_cells(&target_box), g.n_cells());
        let report = exit_coupling_tv(&g, x, y, &target, 10_000, 1000 + instance).unwrap();
        assert!(
            report.bound_satisfied,
            "instance {instance}: tv {} vs 1 - {}",
            report.tv, report.disconnect_prob
        );
        worst_margin =
            worst_margin.min(1.0 - report.disconnect_prob - report.tv);
    }
    pass(9, &format!("bound held on 20 instances; worst margin {worst_margin:.4}"));
}

/// Criterion 10: mass-transport balance. The identity rule balances exactly
/// per sample; the neighbor rule balances within 3 standard errors on the
/// shifted grid; the rule missing the dilation factor is detected on the
/// two-scale split grid with |z| > 5.
#[test]
fn criterion_10_mass_transport() {
    let grid_sampler = |seed: u64| {
        gen_grid(&GridSpec {
            n: 16,
            law: ConductanceLaw::Constant(1.0),
            shift: true,
            seed,
        })
        .unwrap()
    };
    let identity = TransportRule::identity(3.0);
    let rep = mass_transport_check(&grid_sampler, &identity, 100, 100, 3.0, 5);
    assert_eq!(rep.diff_mean, 0.0, "identity transport must balance exactly");
    assert_eq!(rep.z_score, 0.0);

    let neighbor = TransportRule::to_right_neighbor(4.0);
    let rep_n = mass_transport_check(&grid_sampler, &neighbor, 100, 100, 4.0, 6);
    assert!(rep_n.z_score.abs() < 3.0, "neighbor transport z = {}", rep_n.z_score);

    let split_sampler = |_seed: u64| gen_split_grid(4).unwrap();
    let broken = TransportRule::upward_broken(6.0);
    let rep_b = mass_transport_check(&split_sampler, &broken, 100, 100, 6.0, 7);
    assert!(
        rep_b.z_score.abs() > 5.0,
        "broken rule should be detected, z = {}",
        rep_b.z_score
    );
    pass(
        10,
        &format!(
            "identity exact; neighbor z = {:.2}; broken z = {:.1}",
            rep_n.z_score, rep_b.z_score
        ),
    );
}

/// Criterion 11: the dyadic scale offset is uniform (KS below 0.02 over 1e4
/// seeds) and the measured law of (scale fraction, origin position) is
/// invariant under a fixed scale-and-translate of the plane (two-sample KS
/// below 0.03 per coordinate).
#[test]
fn criterion_11_dyadic_law() {
    let n = 10_000u64;
    let scale_offsets: Vec<f64> = (0..n)
        .map(|seed| DyadicSystem2D::sample_uniform(seed).scale_offset())
        .collect();
    let ks = ks_uniform(&scale_offsets).unwrap();
    assert!(ks < 0.02, "KS of the scale offset = {ks}");

    // base ensemble: measure S_0 around the origin
    let measure_base = |seed: u64| -> (f64, f64, f64) {
        let d = DyadicSystem2D::sample_uniform(seed);
        let s0 = d.origin_square(0).unwrap();
        let frac = s0.side.log2().rem_euclid(1.0);
        (
            frac,
            -s0.anchor.x / s0.side,
            -s0.anchor.y / s0.side,
        )
    };
    // transformed ensemble: apply z -> c (z - shift) to the system and
    // measure the origin square of the result
    let c = 2.7f64;
    let shift = Point::new(0.313, -1.057);
    let measure_transformed = |seed: u64| -> (f64, f64, f64) {
        let d = DyadicSystem2D::sample_uniform(seed);
        // the square of the transformed system with side in [1, 2)
        // containing the origin is the image of the square of the original
        // system containing `shift` at the level that lands there
        let e = c.log2() + d.scale_offset();
        let k = -e.floor() as i32;
        let s = d.containing_square(shift, k).unwrap();
        let side_t = c * s.side;
        let frac = side_t.log2().rem_euclid(1.0);
        (
            frac,
            (shift.x - s.anchor.x) / s.side,
            (shift.y - s.anchor.y) / s.side,
        )
    };
    let base: Vec<(f64, f64, f64)> = (0..n).map(measure_base).collect();
    let moved: Vec<(f64, f64, f64)> = (n..2 * n).map(measure_transformed).collect();
    for (name, sel) in [
        ("scale", 0usize),
        ("pos_x", 1),
        ("pos_y", 2),
    ] {
        let a: Vec<f64> = base
            .iter()
            .map(|t| [t.0, t.1, t.2][sel])
            .collect();
        let b: Vec<f64> = moved
            .iter()
            .map(|t| [t.0, t.1, t.2][sel])
            .collect();
        let ks2 = ks_two_sample(&a, &b).unwrap();
        assert!(ks2 < 0.03, "two-sample KS for {name} = {ks2}");
    }
    pass(11, &format!("scale-offset KS = {ks:.4}; transform invariance held"));
}

/// Criterion 12: metric axioms for the curve distance on 1e3 random
/// polyline triples, with exact symmetry and exact retiming invariance.
#[test]
fn criterion_12_dcmp_metric_axioms() {
    let mut rng = stream_rng(123, 0);
    let random_curve = |rng: &mut rand_chacha::ChaCha8Rng| -> TimedCurve {
        let n = rng.random_range(4..9);
        let samples: Vec<(f64, Point)> = (0..n)
            .map(|i| {
                (
                    i as f64,
                    Point::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
                )
            })
            .collect();
        TimedCurve::new(samples).unwrap()
    };
    let mut worst_triangle: f64 = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let a = random_curve(&mut rng);
        let b = random_curve(&mut rng);
        let c = random_curve(&mut rng);
        let ab = dcmp(&a, &b);
        let ba = dcmp(&b, &a);
        let ac = dcmp(&a, &c);
        let cb = dcmp(&c, &b);
        assert!(ab >= 0.0);
        assert_eq!(ab, ba, "symmetry must be exact");
        let defect = ab - (ac + cb);
        worst_triangle = worst_triangle.max(defect);
        assert!(defect <= 1e-9, "triangle defect {defect}");
        // identity of indiscernibles on retimed copies
        let retimed = TimedCurve::new(
            a.samples()
                .iter()
                .enumerate()
                .map(|(i, &(_, p))| ((i as f64 + 1.0).powi(2), p))
                .collect(),
        )
        .unwrap();
        assert_eq!(dcmp(&a, &retimed), 0.0, "retiming must be invisible");
    }
    pass(12, &format!("1000 triples; worst triangle defect {worst_triangle:.2e}"));
}

/// Criterion 13: discrete Dirichlet extensions of Re z^2 on grid disks
/// converge: errors strictly decreasing over eps in {1/8, 1/16, 1/32},
/// final sup error at most 0.05.
#[test]
fn criterion_13_harmonic_extension() {
    let g = unit_grid(72);
    let disk: Vec<Point> = (0..128)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / 128.0;
            Point::new(t.cos(), t.sin())
        })
        .collect();
    let outline = Region::from_ring(disk).unwrap();
    let f = |z: Point| z.x * z.x - z.y * z.y;
    let errs = harmonic_extension_compare(
        &g,
        &outline,
        &f,
        &[1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0],
        1e-10,
    )
    .unwrap();
    assert!(errs[0].1 > errs[1].1 && errs[1].1 > errs[2].1, "errors not decreasing: {errs:?}");
    assert!(errs[2].1 <= 0.05, "final error {}", errs[2].1);
    let text: Vec<String> = errs.iter().map(|(e, v)| format!("1/{:.0}:{v:.4}", 1.0 / e)).collect();
    pass(13, &format!("sup errors {}", text.join(", ")));
}

/// A unit grid with the central `k x k` block merged into one big cell.
fn one_big_cell_env(n: i64, k: i64) -> CellConfiguration {
    let half = n as f64 / 2.0;
    let window = Square::new(Point::new(-half, -half), n as f64).unwrap();
    let mut b = CellConfigurationBuilder::new(window);
    let lo = (n - k) / 2;
    let hi = lo + k; // block covers lattice cells lo..hi in both axes
    let square_ring = |a: Point, s: f64| {
        vec![
            a,
            a + Point::new(s, 0.0),
            a + Point::new(s, s),
            a + Point::new(0.0, s),
        ]
    };
    let mut ids = vec![u32::MAX; (n * n) as usize];
    let mut next = 0u32;
    for j in 0..n {
        for i in 0..n {
            let in_block = i >= lo && i < hi && j >= lo && j < hi;
            if !in_block {
                let a = Point::new(i as f64 - half, j as f64 - half);
                b.add_cell(Region::from_ring(square_ring(a, 1.0)).unwrap());
                ids[(j * n + i) as usize] = next;
                next += 1;
            }
        }
    }
    let big = b.add_cell(
        Region::from_ring(square_ring(
            Point::new(lo as f64 - half, lo as f64 - half),
            k as f64,
        ))
        .unwrap(),
    );
    let id_at = |i: i64, j: i64| -> CellId {
        let in_block = i >= lo && i < hi && j >= lo && j < hi;
        if in_block {
            big
        } else {
            CellId(ids[(j * n + i) as usize])
        }
    };
    for j in 0..n {
        for i in 0..n {
            for (ni, nj) in [(i + 1, j), (i, j + 1)] {
                if ni >= n || nj >= n {
                    continue;
                }
                let a = id_at(i, j);
                let c = id_at(ni, nj);
                if a != c {
                    b.add_edge(a, c, 1.0);
                }
            }
        }
    }
    b.build().unwrap()
}

/// Criterion 14: jump truncation statistics vanish exactly on the unit grid
/// once the threshold exceeds the unit jump size, and both decrease along
/// the horizon ladder on an environment with one macroscopic cell.
#[test]
fn criterion_14_jump_truncation() {
    // unit grid: threshold delta sqrt(T) = 0.2 * 10 = 2 > 1
    let g = unit_grid(64);
    let base = phi0(&g);
    let trace = run_walk(&g, g.center_cell(), StopRule::Horizon(100.0), 3, false).unwrap();
    let s =
        jump_truncation_stats(&g, &base, &trace, Point::new(1.0, 0.0), 0.2, 100.0).unwrap();
    assert_eq!(s.sum_large_jumps, 0.0);
    assert_eq!(s.sum_compensator, 0.0);

    // one big cell: per-horizon means over a walk batch decrease
    let env = one_big_cell_env(256, 20);
    let emb = phi0(&env);
    let start = env.cell_at(Point::new(0.1, 0.1)).unwrap();
    let v = Point::new(1.0, 0.0);
    let delta = 0.1;
    let mut means = Vec::new();
    for (ti, horizon) in [400.0, 1600.0, 6400.0].into_iter().enumerate() {
        let mut large = 0.0;
        let mut comp = 0.0;
        let n_walks = 200;
        for w in 0..n_walks {
            let seed = (ti * 1000 + w) as u64;
            let trace = run_walk(&env, start, StopRule::Horizon(horizon), seed, false).unwrap();
            let s = jump_truncation_stats(&env, &emb, &trace, v, delta, horizon).unwrap();
            large += s.sum_large_jumps;
            comp += s.sum_compensator;
        }
        means.push((horizon, large / n_walks as f64, comp / n_walks as f64));
    }
    for m in &means {
        assert!(m.1 > 0.0 && m.2 > 0.0, "sums should be positive at T = {}", m.0);
    }
    for w in means.windows(2) {
        assert!(
            w[1].1 < w[0].1 && w[1].2 < w[0].2,
            "sums not decreasing: {means:?}"
        );
    }
    let text: Vec<String> = means
        .iter()
        .map(|(t, l, c)| format!("T={t}: {l:.4}/{c:.4}"))
        .collect();
    pass(14, &format!("grid sums exactly 0; big-cell trend {}", text.join(", ")));
}

/// Criterion 15: identical CLI invocations with identical seeds produce
/// byte-identical outputs (manifests, which carry timestamps, excluded).
#[test]
fn criterion_15_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_planewalk");
    let dir = std::env::temp_dir().join(format!("planewalk-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let run = |args: &[&str]| {
        let out = std::process::Command::new(bin)
            .args(args)
            .current_dir(&dir)
            .output()
            .expect("spawn planewalk");
        assert!(
            out.status.success(),
            "command {:?} failed: {}",
            args,
            String::from_utf8_lossy(&out.stderr)
        );
    };
    let bytes = |name: &str| std::fs::read(dir.join(name)).unwrap();

    let mut compared = 0;
    for (args1, args2, file_a, file_b) in [
        (
            vec![
                "gen", "--variant", "grid", "--n", "24", "--law", "uniform:1:2", "--seed",
                "9", "-o", "env_a.json",
            ],
            vec![
                "gen", "--variant", "grid", "--n", "24", "--law", "uniform:1:2", "--seed",
                "9", "-o", "env_b.json",
            ],
            "env_a.json",
            "env_b.json",
        ),
        (
            vec![
                "sigma", "--env", "env_a.json", "--walks", "200", "--horizon", "20", "--seed",
                "4", "-o", "sigma_a.csv",
            ],
            vec![
                "sigma", "--env", "env_a.json", "--walks", "200", "--horizon", "20", "--seed",
                "4", "-o", "sigma_b.csv",
            ],
            "sigma_a.csv",
            "sigma_b.csv",
        ),
        (
            vec![
                "energy", "--env", "env_a.json", "--ladder", "4:8", "--region-side", "10",
                "--dyadic-seed", "2", "-o", "energy_a.csv",
            ],
            vec![
                "energy", "--env", "env_a.json", "--ladder", "4:8", "--region-side", "10",
                "--dyadic-seed", "2", "-o", "energy_b.csv",
            ],
            "energy_a.csv",
            "energy_b.csv",
        ),
        (
            vec![
                "exit-law", "--env", "env_a.json", "--side", "4", "--samples", "200",
                "--seed", "3", "-o", "exit_a.csv",
            ],
            vec![
                "exit-law", "--env", "env_a.json", "--side", "4", "--samples", "200",
                "--seed", "3", "-o", "exit_b.csv",
            ],
            "exit_a.csv",
            "exit_b.csv",
        ),
        (
            vec![
                "embed", "--env", "env_a.json", "--mode", "corrector", "--m", "16",
                "--region-side", "16", "--dyadic-seed", "1", "-o", "emb_a.json", "--svg",
                "emb_a.svg",
            ],
            vec![
                "embed", "--env", "env_a.json", "--mode", "corrector", "--m", "16",
                "--region-side", "16", "--dyadic-seed", "1", "-o", "emb_b.json", "--svg",
                "emb_b.svg",
            ],
            "emb_a.json",
            "emb_b.json",
        ),
    ] {
        run(&args1);
        run(&args2);
        assert_eq!(bytes(file_a), bytes(file_b), "outputs differ: {file_a} vs {file_b}");
        compared += 1;
    }
    assert_eq!(bytes("emb_a.svg"), bytes("emb_b.svg"), "svg outputs differ");
    std::fs::remove_dir_all(&dir).ok();
    pass(15, &format!("{compared} command pairs byte-identical (plus svg)"));
}
