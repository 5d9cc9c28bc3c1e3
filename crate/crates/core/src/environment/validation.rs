//! Validation of the environment hypotheses: symmetric positive
//! conductances, near-disjoint interiors, genuinely intersecting adjacent
//! cells, and (optionally) connectedness of the cell graph along
//! axis-parallel segments.

use super::{CellConfiguration, CellId};
use crate::geometry::{region_intersection_area, Point, GEOM_TOL};

#[derive(Debug, Clone)]
pub enum Violation {
    /// Declared adjacent, but the regions are farther apart than tolerance.
    AdjacentButDisjoint { a: CellId, b: CellId, distance: f64 },
    /// Interiors overlap with more area than tolerated.
    OverlappingInteriors { a: CellId, b: CellId, area: f64 },
    /// The subgraph induced by the cells meeting a probe segment is not
    /// connected.
    SegmentDisconnected { segment: usize, components: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::AdjacentButDisjoint { a, b, distance } => {
                write!(f, "cells {a} and {b} are adjacent but {distance:.3e} apart")
            }
            Violation::OverlappingInteriors { a, b, area } => {
                write!(f, "cells {a} and {b} overlap with area {area:.3e}")
            }
            Violation::SegmentDisconnected { segment, components } => {
                write!(f, "probe segment {segment} induces {components} components")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ValidationOptions {
    /// Overlap area tolerance, as a fraction of the smaller cell area.
    pub overlap_tol: f64,
    /// Adjacency distance tolerance (absolute).
    pub adjacency_tol: f64,
    /// Probe segments for the connectedness-along-lines check; each is a
    /// horizontal or vertical segment `(a, b)`.
    pub probe_segments: Vec<(Point, Point)>,
    /// Skip the O(pairs) interior-overlap scan.
    pub skip_overlap: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            overlap_tol: GEOM_TOL,
            adjacency_tol: GEOM_TOL,
            probe_segments: Vec::new(),
            skip_overlap: false,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub pairs_checked: usize,
    pub segments_checked: usize,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl CellConfiguration {
    /// Runs the hypothesis checks and returns the findings.
    ///
    /// Conductance symmetry and positivity are structural invariants of the
    /// builder, so the runtime checks cover geometry: adjacency implies
    /// intersection, interiors are essentially disjoint, and (when probe
    /// segments are supplied) cells along each axis-parallel segment form a
    /// connected subgraph.
    pub fn validate(&self, opts: &ValidationOptions) -> ValidationReport {
        let mut report = ValidationReport::default();

        for (a, b, _) in self.edges() {
            let d = self.region(a).dist_to_region(self.region(b));
            if d > opts.adjacency_tol {
                report
                    .violations
                    .push(Violation::AdjacentButDisjoint { a, b, distance: d });
            }
        }

        if !opts.skip_overlap {
            for a in self.ids() {
                let (lo, hi) = self.region(a).bbox();
                let pad = opts.adjacency_tol;
                let probe = crate::geometry::Square {
                    anchor: Point::new(lo.x - pad, lo.y - pad),
                    side: (hi.x - lo.x).max(hi.y - lo.y) + 2.0 * pad,
                };
                for b in self.cells_in_box(&probe) {
                    if b <= a {
                        continue;
                    }
                    report.pairs_checked += 1;
                    let inter = region_intersection_area(self.region(a), self.region(b));
                    let tol = opts.overlap_tol * self.area(a).min(self.area(b));
                    if inter > tol {
                        report
                            .violations
                            .push(Violation::OverlappingInteriors { a, b, area: inter });
                    }
                }
            }
        }

        for (i, &(a, b)) in opts.probe_segments.iter().enumerate() {
            report.segments_checked += 1;
            let cells = self.cells_on_segment(a, b);
            if cells.len() <= 1 {
                continue;
            }
            let comps = count_components(self, &cells);
            if comps > 1 {
                report
                    .violations
                    .push(Violation::SegmentDisconnected { segment: i, components: comps });
            }
        }

        report
    }
}

fn count_components(config: &CellConfiguration, cells: &[CellId]) -> usize {
    let inset: std::collections::BTreeMap<CellId, usize> =
        cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut seen = vec![false; cells.len()];
    let mut comps = 0;
    for start in 0..cells.len() {
        if seen[start] {
            continue;
        }
        comps += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(i) = stack.pop() {
            for &(nb, _) in config.neighbors(cells[i]) {
                if let Some(&j) = inset.get(&nb) {
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
    }
    comps
}
