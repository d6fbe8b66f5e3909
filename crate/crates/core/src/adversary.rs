//! Affine-plane adversarial edge colorings.
//!
//! High-degree vertices form `V₀`; the rest are scattered uniformly over the
//! q² points of AG(2,q). A cross-part edge takes the color of the parallel
//! class of the line through its two parts, an intra-part edge takes color 1,
//! and every edge touching `V₀` takes the last color `r`. Colors are 1-based;
//! class `i` (zero-based) is color `i + 1`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::BufRead;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::affine_plane::{AffinePlane, PlaneError};
use crate::bounds::{self, BoundsError, ColorRange, TailBound};
use crate::graphs::{GraphError, HostGraph, Vertex};

/// Upper cap on certificate trials.
pub const MAX_TRIALS: usize = 10_000;

#[derive(Debug, Error)]
pub enum AdversaryError {
    #[error("r = {0}: the construction needs r - 2 to be a prime power >= 2")]
    NonConstructive(usize),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Plane(#[from] PlaneError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("part index {part} of vertex {vertex} outside 1..={max}")]
    PartOutOfRange {
        vertex: Vertex,
        part: usize,
        max: usize,
    },
    #[error("vertex {0} is neither in V0 nor assigned to a part")]
    Unassigned(Vertex),
    #[error("plane of order {plane} does not match coloring order {expected}")]
    OrderMismatch { plane: usize, expected: usize },
    #[error("coloring has {colors} colors for {edges} edges")]
    ColorCount { colors: usize, edges: usize },
    #[error("color {color} on edge {u}-{v} outside 1..={r}")]
    ColorOutOfRange {
        u: Vertex,
        v: Vertex,
        color: usize,
        r: usize,
    },
    #[error("coloring file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryParams {
    pub r: usize,
    /// Average-degree bound of the forbidden graph H.
    pub d: f64,
    pub beta: f64,
    /// Slack constant in the edge budget and deviation threshold.
    pub c: f64,
    pub seed: u64,
    /// Order of H; defaults to the host graph's vertex count.
    pub n: Option<usize>,
}

impl AdversaryParams {
    pub fn new(r: usize, d: f64, beta: f64, c: f64, seed: u64) -> Self {
        AdversaryParams {
            r,
            d,
            beta,
            c,
            seed,
            n: None,
        }
    }

    /// Validates the parameters and returns the plane order q = r − 2.
    pub fn order(&self) -> Result<usize, AdversaryError> {
        let q = match bounds::classify_colors(self.r)? {
            ColorRange::Constructive { q } => q,
            ColorRange::Degenerate => return Err(AdversaryError::NonConstructive(self.r)),
        };
        let dom = |name, value| Err(BoundsError::Domain { name, value }.into());
        if !(self.d > 0.0 && self.d.is_finite()) {
            return dom("d", self.d);
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return dom("beta", self.beta);
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return dom("C", self.c);
        }
        Ok(q)
    }

    /// r²d/(1−β).
    pub fn degree_threshold(&self) -> f64 {
        bounds::difference_constant(self.r, self.d, self.beta)
    }

    pub fn target_order(&self, g: &HostGraph) -> usize {
        self.n.unwrap_or(g.n_vertices())
    }

    /// nd/2, the edge count every monochromatic component must stay below.
    pub fn edge_threshold(&self, g: &HostGraph) -> f64 {
        self.target_order(g) as f64 * self.d / 2.0
    }

    /// (nd/2)(r−2)² − C√n.
    pub fn edge_budget(&self, g: &HostGraph) -> f64 {
        let n = self.target_order(g) as f64;
        let q = (self.r - 2) as f64;
        n * self.d / 2.0 * q * q - self.c * n.sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub v0: Vec<Vertex>,
    pub rest: Vec<Vertex>,
}

/// Separates vertices of degree at least r²d/(1−β).
pub fn split_v0(g: &HostGraph, params: &AdversaryParams) -> Split {
    let threshold = params.degree_threshold();
    let (v0, rest) = (0..g.n_vertices()).partition(|&v| g.neighbors(v).len() as f64 >= threshold);
    Split { v0, rest }
}

/// Assignment of the non-`V₀` vertices to parts 1..=q².
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    q: usize,
    part_of: Vec<Option<usize>>,
}

impl Partition {
    pub fn new(q: usize, part_of: Vec<Option<usize>>) -> Result<Self, AdversaryError> {
        let max = q * q;
        for (vertex, p) in part_of.iter().enumerate() {
            if let Some(part) = *p {
                if part == 0 || part > max {
                    return Err(AdversaryError::PartOutOfRange { vertex, part, max });
                }
            }
        }
        Ok(Partition { q, part_of })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn part(&self, v: Vertex) -> Option<usize> {
        self.part_of.get(v).copied().flatten()
    }

    pub fn parts(&self) -> &[Option<usize>] {
        &self.part_of
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.q * self.q];
        for p in self.part_of.iter().flatten() {
            sizes[p - 1] += 1;
        }
        sizes
    }
}

/// Places each vertex of `rest` independently and uniformly into one of q² parts.
pub fn random_partition(n_vertices: usize, rest: &[Vertex], q: usize, seed: u64) -> Partition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut part_of = vec![None; n_vertices];
    let parts = q * q;
    for &v in rest {
        part_of[v] = Some(rng.gen_range(1..=parts));
    }
    Partition { q, part_of }
}

/// An r-coloring of a host graph together with the partition that produced it.
#[derive(Debug, Clone)]
pub struct Coloring {
    graph: Arc<HostGraph>,
    plane: Arc<AffinePlane>,
    r: usize,
    v0: Vec<Vertex>,
    partition: Partition,
    /// Color per edge, aligned with `graph.edges()`.
    colors: Vec<usize>,
}

/// Colors every edge of `g` by the three affine-plane rules.
pub fn color_edges(
    graph: Arc<HostGraph>,
    v0: &[Vertex],
    partition: Partition,
    plane: Arc<AffinePlane>,
) -> Result<Coloring, AdversaryError> {
    let q = plane.order();
    if partition.order() != q {
        return Err(AdversaryError::OrderMismatch {
            plane: q,
            expected: partition.order(),
        });
    }
    let r = q + 2;
    let mut in_v0 = vec![false; graph.n_vertices()];
    for &v in v0 {
        in_v0[v] = true;
    }
    let mut colors = Vec::with_capacity(graph.n_edges());
    for &(u, v) in graph.edges() {
        let color = if in_v0[u] || in_v0[v] {
            r
        } else {
            let pu = partition.part(u).ok_or(AdversaryError::Unassigned(u))?;
            let pv = partition.part(v).ok_or(AdversaryError::Unassigned(v))?;
            if pu == pv {
                1
            } else {
                plane.class_of(plane.line_through_unchecked(pu, pv))? + 1
            }
        };
        colors.push(color);
    }
    Ok(Coloring {
        graph,
        plane,
        r,
        v0: v0.to_vec(),
        partition,
        colors,
    })
}

/// Which of the three coloring rules hold on every edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleReport {
    pub v0_edges_last_color: bool,
    pub cross_edges_class_color: bool,
    pub intra_edges_not_last: bool,
    pub violations: Vec<(Vertex, Vertex)>,
}

impl RuleReport {
    pub fn passed(&self) -> bool {
        self.v0_edges_last_color && self.cross_edges_class_color && self.intra_edges_not_last
    }
}

#[derive(Debug, Clone)]
pub struct ComponentViolation {
    pub color: usize,
    pub vertices: Vec<Vertex>,
    pub parts: Vec<usize>,
}

/// Result of checking that every monochromatic component stays inside one line.
#[derive(Debug, Clone, Default)]
pub struct ConfinementReport {
    pub components_checked: usize,
    pub violations: Vec<ComponentViolation>,
}

impl ConfinementReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Coloring {
    /// Rebuilds a coloring from stored parts and colors, validating shapes but not the rules.
    pub fn from_raw(
        graph: Arc<HostGraph>,
        plane: Arc<AffinePlane>,
        v0: Vec<Vertex>,
        partition: Partition,
        colors: Vec<usize>,
    ) -> Result<Self, AdversaryError> {
        let q = plane.order();
        if partition.order() != q {
            return Err(AdversaryError::OrderMismatch {
                plane: q,
                expected: partition.order(),
            });
        }
        if colors.len() != graph.n_edges() {
            return Err(AdversaryError::ColorCount {
                colors: colors.len(),
                edges: graph.n_edges(),
            });
        }
        let r = q + 2;
        for (&(u, v), &color) in graph.edges().iter().zip(&colors) {
            if color == 0 || color > r {
                return Err(AdversaryError::ColorOutOfRange { u, v, color, r });
            }
        }
        Ok(Coloring {
            graph,
            plane,
            r,
            v0,
            partition,
            colors,
        })
    }

    pub fn graph(&self) -> &HostGraph {
        &self.graph
    }

    pub fn plane(&self) -> &AffinePlane {
        &self.plane
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn num_colors(&self) -> usize {
        self.r
    }

    pub fn v0(&self) -> &[Vertex] {
        &self.v0
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// Vertices outside `V₀`.
    pub fn rest(&self) -> Vec<Vertex> {
        let v0: BTreeSet<_> = self.v0.iter().copied().collect();
        (0..self.graph.n_vertices())
            .filter(|v| !v0.contains(v))
            .collect()
    }

    /// Mutable access to edge colors, for building corrupted fixtures.
    pub fn colors_mut(&mut self) -> &mut [usize] {
        &mut self.colors
    }

    /// The subgraph `G_i` of edges with color `color`.
    pub fn color_class(&self, color: usize) -> HostGraph {
        self.graph.edge_subgraph(|i| self.colors[i] == color)
    }

    pub fn check_rules(&self) -> RuleReport {
        let mut in_v0 = vec![false; self.graph.n_vertices()];
        for &v in &self.v0 {
            in_v0[v] = true;
        }
        let mut report = RuleReport {
            v0_edges_last_color: true,
            cross_edges_class_color: true,
            intra_edges_not_last: true,
            violations: Vec::new(),
        };
        for (&(u, v), &color) in self.graph.edges().iter().zip(&self.colors) {
            let ok = if in_v0[u] || in_v0[v] {
                let ok = color == self.r;
                report.v0_edges_last_color &= ok;
                ok
            } else {
                match (self.partition.part(u), self.partition.part(v)) {
                    (Some(pu), Some(pv)) if pu == pv => {
                        let ok = color != self.r;
                        report.intra_edges_not_last &= ok;
                        ok
                    }
                    (Some(pu), Some(pv)) => {
                        let line = self.plane.line_through_unchecked(pu, pv);
                        let ok = self.plane.class_of(line).map(|c| c + 1) == Ok(color);
                        report.cross_edges_class_color &= ok;
                        ok
                    }
                    _ => {
                        report.cross_edges_class_color = false;
                        false
                    }
                }
            };
            if !ok {
                report.violations.push((u, v));
            }
        }
        report
    }

    /// For each color i in 1..=q+1, every component of `G_i` with an edge must lie
    /// inside the union of parts along a single line of class i.
    pub fn check_confinement(&self) -> ConfinementReport {
        let mut report = ConfinementReport::default();
        let classes = self.plane.order() + 1;
        for color in 1..=classes {
            let class = color - 1;
            let sub = self.color_class(color);
            for comp in sub.components() {
                if comp.len() < 2 {
                    continue;
                }
                report.components_checked += 1;
                let parts: Option<BTreeSet<usize>> =
                    comp.iter().map(|&v| self.partition.part(v)).collect();
                let confined = match &parts {
                    None => false,
                    Some(parts) => {
                        let first = *parts.iter().next().expect("component is non-empty");
                        match self.plane.line_in_class_through(class, first) {
                            Some(line) => {
                                let pts = self.plane.line(line);
                                parts.iter().all(|p| pts.binary_search(p).is_ok())
                            }
                            None => false,
                        }
                    }
                };
                if !confined {
                    report.violations.push(ComponentViolation {
                        color,
                        vertices: comp,
                        parts: parts.map(|p| p.into_iter().collect()).unwrap_or_default(),
                    });
                }
            }
        }
        report
    }

    /// Text serialization: header, `v0` list, one `part v p` per partitioned
    /// vertex, one `edge u v color` per edge.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# affine-plane coloring").unwrap();
        writeln!(out, "r {}", self.r).unwrap();
        writeln!(out, "q {}", self.plane.order()).unwrap();
        writeln!(out, "vertices {}", self.graph.n_vertices()).unwrap();
        let v0: Vec<String> = self.v0.iter().map(|v| v.to_string()).collect();
        writeln!(out, "v0 {}", v0.join(" ")).unwrap();
        for (v, p) in self.partition.parts().iter().enumerate() {
            if let Some(p) = p {
                writeln!(out, "part {v} {p}").unwrap();
            }
        }
        for (&(u, v), &c) in self.graph.edges().iter().zip(&self.colors) {
            writeln!(out, "edge {u} {v} {c}").unwrap();
        }
        out
    }

    /// Parses the text serialization, rebuilding graph and plane. Rules are not checked.
    pub fn read_text<R: BufRead>(source: R) -> Result<Self, AdversaryError> {
        let mut r = None;
        let mut q = None;
        let mut n = None;
        let mut v0 = Vec::new();
        let mut parts = Vec::new();
        let mut edges = Vec::new();
        for (i, line) in source.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let err = |msg: &str| AdversaryError::Parse {
                line: lineno,
                msg: msg.to_string(),
            };
            let mut words = text.split_whitespace();
            let key = words.next().unwrap_or_default();
            let nums: Vec<usize> = words
                .map(|w| w.parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| err("expected non-negative integers"))?;
            match (key, nums.as_slice()) {
                ("r", [x]) => r = Some(*x),
                ("q", [x]) => q = Some(*x),
                ("vertices", [x]) => n = Some(*x),
                ("v0", list) => v0.extend_from_slice(list),
                ("part", [v, p]) => parts.push((*v, *p)),
                ("edge", [u, v, c]) => edges.push((*u, *v, *c)),
                _ => return Err(err("unrecognized record")),
            }
        }
        let missing = |what: &str| AdversaryError::Parse {
            line: 0,
            msg: format!("missing `{what}` record"),
        };
        let q = q.ok_or_else(|| missing("q"))?;
        let r = r.ok_or_else(|| missing("r"))?;
        let n = n.ok_or_else(|| missing("vertices"))?;
        if r != q + 2 {
            return Err(AdversaryError::Parse {
                line: 0,
                msg: format!("r = {r} does not equal q + 2 = {}", q + 2),
            });
        }
        let plane = Arc::new(AffinePlane::build(q)?);
        let graph = HostGraph::from_edges(n, edges.iter().map(|&(u, v, _)| (u, v)))?;
        let mut color_of = std::collections::HashMap::new();
        for &(u, v, c) in &edges {
            color_of.insert((u.min(v), u.max(v)), c);
        }
        let colors = graph.edges().iter().map(|e| color_of[e]).collect();
        let mut part_of = vec![None; n];
        for (v, p) in parts {
            if v >= n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n }.into());
            }
            part_of[v] = Some(p);
        }
        let partition = Partition::new(q, part_of)?;
        Coloring::from_raw(Arc::new(graph), plane, v0, partition, colors)
    }
}

/// Per-line edge counts `A_L` for one partition.
#[derive(Debug, Clone, PartialEq)]
pub struct LineCounts {
    pub counts: Vec<usize>,
    /// Line index to class index.
    pub classes: Vec<usize>,
    /// Expected count per line: edges not touching V₀, divided by q².
    pub expectation: f64,
    /// Deviation threshold C√n/(r−2)².
    pub gamma: f64,
    /// nd/2.
    pub threshold: f64,
}

impl LineCounts {
    pub fn passes(&self, line: usize) -> bool {
        (self.counts[line] as f64) < self.threshold
    }

    pub fn all_pass(&self) -> bool {
        (0..self.counts.len()).all(|l| self.passes(l))
    }

    pub fn max(&self) -> usize {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// threshold − max A_L; positive iff every line passes.
    pub fn worst_margin(&self) -> f64 {
        self.threshold - self.max() as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("line_index,class_index,A_L,expectation,gamma,pass\n");
        for (l, &a) in self.counts.iter().enumerate() {
            writeln!(
                out,
                "{l},{},{a},{:.6},{:.6},{}",
                self.classes[l],
                self.expectation,
                self.gamma,
                self.passes(l)
            )
            .unwrap();
        }
        out
    }
}

/// Counts, for every line L, the edges with both ends in the union of parts on L.
pub fn count_lines(col: &Coloring, params: &AdversaryParams) -> LineCounts {
    let raw = raw_line_counts(&col.graph, &col.plane, &col.partition);
    let plane = &col.plane;
    let q = plane.order();
    let inner = inner_edge_count(&col.graph, &col.partition);
    LineCounts {
        counts: raw,
        classes: (0..plane.lines().len())
            .map(|l| plane.class_of(l).expect("valid line"))
            .collect(),
        expectation: inner as f64 / (q * q) as f64,
        gamma: bounds::deviation_threshold(params.r, params.target_order(&col.graph), params.c),
        threshold: params.edge_threshold(&col.graph),
    }
}

/// Edges whose endpoints are both partitioned.
pub fn inner_edge_count(g: &HostGraph, partition: &Partition) -> usize {
    g.edges()
        .iter()
        .filter(|&&(u, v)| partition.part(u).is_some() && partition.part(v).is_some())
        .count()
}

/// Line counts straight from a partition, one pass over the edges.
pub fn raw_line_counts(g: &HostGraph, plane: &AffinePlane, partition: &Partition) -> Vec<usize> {
    let q = plane.order();
    let mut counts = vec![0usize; plane.lines().len()];
    // lines through each point, for intra-part edges
    let mut through_point: Vec<Vec<usize>> = vec![Vec::with_capacity(q + 1); q * q];
    for (l, line) in plane.lines().iter().enumerate() {
        for &p in line {
            through_point[p - 1].push(l);
        }
    }
    for &(u, v) in g.edges() {
        let (Some(pu), Some(pv)) = (partition.part(u), partition.part(v)) else {
            continue;
        };
        if pu == pv {
            for &l in &through_point[pu - 1] {
                counts[l] += 1;
            }
        } else {
            counts[plane.line_through_unchecked(pu, pv)] += 1;
        }
    }
    counts
}

/// A successful partition together with everything it certifies.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub trial: usize,
    pub seed: u64,
    pub coloring: Coloring,
    pub counts: LineCounts,
    pub confinement: ConfinementReport,
    /// Largest edge count of a monochromatic component in colors 1..r−1.
    pub max_component_edges: usize,
    /// `V ∖ V₀` spans no edge of color r.
    pub rest_independent_in_last_color: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error(transparent)]
    Setup(#[from] AdversaryError),
    #[error("no certificate after {trials} trials; best worst-line margin {best_margin:.3} (threshold {threshold:.3})")]
    Exhausted {
        trials: usize,
        best_margin: f64,
        threshold: f64,
    },
    #[error("trial {trial} passed the line counts but failed verification: {reason}")]
    Verification { trial: usize, reason: String },
}

/// ⌈10 / margin⌉ capped at [`MAX_TRIALS`]; the cap when the margin is not positive.
pub fn default_trials(margin: f64) -> usize {
    if margin > 0.0 {
        ((10.0 / margin).ceil() as usize).clamp(1, MAX_TRIALS)
    } else {
        MAX_TRIALS
    }
}

/// Union margin for the parameters on this graph.
pub fn union_margin_for(g: &HostGraph, params: &AdversaryParams) -> Result<f64, AdversaryError> {
    let q = params.order()?;
    let split = split_v0(g, params);
    let tail = TailBound::for_line_counts(
        params.r,
        params.target_order(g),
        params.d,
        params.beta,
        params.c,
        split.rest.len(),
    )?;
    Ok(bounds::union_margin(q, &tail))
}

/// Resamples partitions with seeds `seed + t` until every line count is below nd/2,
/// then verifies confinement, component sizes and independence of `V ∖ V₀` in color r.
/// Trials run in parallel batches; the lowest successful trial index wins.
pub fn find_certificate(
    graph: Arc<HostGraph>,
    params: &AdversaryParams,
    plane: Arc<AffinePlane>,
    max_trials: usize,
) -> Result<Certificate, CertificateError> {
    let q = params.order()?;
    if plane.order() != q {
        return Err(AdversaryError::OrderMismatch {
            plane: plane.order(),
            expected: q,
        }
        .into());
    }
    let mut warnings = Vec::new();
    let budget = params.edge_budget(&graph);
    if graph.n_edges() as f64 > budget {
        warnings.push(format!(
            "graph has {} edges, above the budget {budget:.1}; a certificate may not exist",
            graph.n_edges()
        ));
    }
    if !graph.is_connected() {
        warnings.push("graph is not connected".to_string());
    }
    for w in &warnings {
        log::warn!("{w}");
    }

    let split = split_v0(&graph, params);
    let threshold = params.edge_threshold(&graph);
    let batch = (rayon::current_num_threads() * 4).max(1);
    let mut best_margin = f64::NEG_INFINITY;
    let mut start = 0;
    while start < max_trials {
        let end = (start + batch).min(max_trials);
        let outcomes: Vec<(usize, f64)> = (start..end)
            .into_par_iter()
            .map(|t| {
                let seed = params.seed.wrapping_add(t as u64);
                let partition = random_partition(graph.n_vertices(), &split.rest, q, seed);
                let counts = raw_line_counts(&graph, &plane, &partition);
                let max = counts.iter().copied().max().unwrap_or(0);
                (t, threshold - max as f64)
            })
            .collect();
        for &(_, m) in &outcomes {
            best_margin = best_margin.max(m);
        }
        if let Some(&(trial, _)) = outcomes.iter().find(|&&(_, m)| m > 0.0) {
            let seed = params.seed.wrapping_add(trial as u64);
            let partition = random_partition(graph.n_vertices(), &split.rest, q, seed);
            let coloring =
                color_edges(Arc::clone(&graph), &split.v0, partition, Arc::clone(&plane))?;
            return verify_certificate(coloring, params, trial, seed, warnings);
        }
        start = end;
    }
    Err(CertificateError::Exhausted {
        trials: max_trials,
        best_margin,
        threshold,
    })
}

fn verify_certificate(
    coloring: Coloring,
    params: &AdversaryParams,
    trial: usize,
    seed: u64,
    warnings: Vec<String>,
) -> Result<Certificate, CertificateError> {
    let fail = |reason: String| CertificateError::Verification { trial, reason };
    let counts = count_lines(&coloring, params);
    if !counts.all_pass() {
        return Err(fail("line counts regressed".into()));
    }
    let rules = coloring.check_rules();
    if !rules.passed() {
        return Err(fail(format!(
            "coloring rules violated on {} edges",
            rules.violations.len()
        )));
    }
    let confinement = coloring.check_confinement();
    if !confinement.passed() {
        return Err(fail(format!(
            "{} unconfined components",
            confinement.violations.len()
        )));
    }
    let mut max_component_edges = 0;
    for color in 1..coloring.num_colors() {
        let sub = coloring.color_class(color);
        let mut comp_id = vec![usize::MAX; sub.n_vertices()];
        let comps = sub.components();
        for (i, comp) in comps.iter().enumerate() {
            for &v in comp {
                comp_id[v] = i;
            }
        }
        let mut edges_in = vec![0usize; comps.len()];
        for &(u, _) in sub.edges() {
            edges_in[comp_id[u]] += 1;
        }
        max_component_edges = max_component_edges.max(edges_in.into_iter().max().unwrap_or(0));
    }
    if max_component_edges as f64 >= counts.threshold {
        return Err(fail(format!(
            "monochromatic component with {max_component_edges} edges reaches nd/2 = {}",
            counts.threshold
        )));
    }
    let last = coloring.color_class(coloring.num_colors());
    let rest_independent_in_last_color = last
        .is_independent(&coloring.rest())
        .map_err(|e| fail(e.to_string()))?;
    if !rest_independent_in_last_color {
        return Err(fail("V \\ V0 spans an edge of the last color".into()));
    }
    Ok(Certificate {
        trial,
        seed,
        coloring,
        counts,
        confinement,
        max_component_edges,
        rest_independent_in_last_color,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::power_of_path;

    fn star(leaves: usize) -> HostGraph {
        HostGraph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).unwrap()
    }

    #[test]
    fn split_star() {
        let params = AdversaryParams::new(4, 2.0, 0.5, 1.0, 0);
        assert_eq!(params.degree_threshold(), 64.0);
        let split = split_v0(&star(100), &params);
        assert_eq!(split.v0, vec![0]);
        assert_eq!(split.rest.len(), 100);
        let split = split_v0(&HostGraph::empty(5), &params);
        assert!(split.v0.is_empty());
    }

    #[test]
    fn split_size_obeys_handshake_bound() {
        let g = power_of_path(300, 20).unwrap();
        for d in [0.5, 1.0, 2.0] {
            let params = AdversaryParams::new(4, d, 0.5, 1.0, 0);
            let split = split_v0(&g, &params);
            let bound = 2.0 * g.n_edges() as f64 * 0.5 / (16.0 * d);
            assert!(split.v0.len() as f64 <= bound, "d={d}");
        }
    }

    #[test]
    fn partition_determinism_and_range() {
        let rest: Vec<_> = (0..50).collect();
        let a = random_partition(60, &rest, 3, 9);
        let b = random_partition(60, &rest, 3, 9);
        assert_eq!(a, b);
        assert_ne!(a, random_partition(60, &rest, 3, 10));
        assert!(rest
            .iter()
            .all(|&v| matches!(a.part(v), Some(p) if (1..=9).contains(&p))));
        assert!((50..60).all(|v| a.part(v).is_none()));
        assert!(random_partition(5, &[], 2, 0)
            .parts()
            .iter()
            .all(Option::is_none));
        assert!(Partition::new(2, vec![Some(5)]).is_err());
    }

    #[test]
    fn coloring_rules_on_examples() {
        let plane = Arc::new(AffinePlane::build(3).unwrap());
        // 0-1 crosses parts 1,2; 1-2 intra part 2; 2-3 touches v0
        let g = Arc::new(HostGraph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap());
        let partition = Partition::new(3, vec![Some(1), Some(2), Some(2), None]).unwrap();
        let col = color_edges(g, &[3], partition, Arc::clone(&plane)).unwrap();
        let line = plane.line_through(1, 2).unwrap();
        assert_eq!(plane.line(line), &[1, 2, 3]);
        assert_eq!(col.colors(), &[plane.class_of(line).unwrap() + 1, 1, 5]);
        assert!(col.check_rules().passed());
        assert!(col.check_confinement().passed());
    }

    #[test]
    fn corrupted_coloring_fails_confinement() {
        let plane = Arc::new(AffinePlane::build(3).unwrap());
        let g = Arc::new(HostGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap());
        let partition = Partition::new(3, vec![Some(1), Some(2), Some(4)]).unwrap();
        let mut col = color_edges(g, &[], partition, Arc::clone(&plane)).unwrap();
        assert!(col.check_confinement().passed());
        // parts 1,2,4 are not collinear; force both edges into one color
        let c0 = col.colors()[0];
        col.colors_mut()[1] = c0;
        let report = col.check_confinement();
        assert!(!report.passed());
        assert!(!col.check_rules().passed());
    }

    #[test]
    fn empty_color_classes_pass() {
        let plane = Arc::new(AffinePlane::build(2).unwrap());
        let g = Arc::new(HostGraph::empty(4));
        let p = random_partition(4, &[0, 1, 2, 3], 2, 1);
        let col = color_edges(g, &[], p, plane).unwrap();
        let report = col.check_confinement();
        assert!(report.passed());
        assert_eq!(report.components_checked, 0);
    }

    #[test]
    fn degenerate_partition_counts() {
        let plane = Arc::new(AffinePlane::build(2).unwrap());
        let g = Arc::new(power_of_path(10, 2).unwrap());
        let p = Partition::new(2, vec![Some(3); 10]).unwrap();
        let col = color_edges(Arc::clone(&g), &[], p, Arc::clone(&plane)).unwrap();
        let params = AdversaryParams::new(4, 2.0, 0.5, 1.0, 0);
        let counts = count_lines(&col, &params);
        for (l, line) in plane.lines().iter().enumerate() {
            let want = if line.contains(&3) { g.n_edges() } else { 0 };
            assert_eq!(counts.counts[l], want);
        }
        let empty = color_edges(
            Arc::new(HostGraph::empty(3)),
            &[],
            Partition::new(2, vec![Some(1); 3]).unwrap(),
            plane,
        )
        .unwrap();
        assert!(count_lines(&empty, &params).counts.iter().all(|&a| a == 0));
    }

    #[test]
    fn class_sums_dominate_color_class_sizes() {
        let plane = Arc::new(AffinePlane::build(3).unwrap());
        let g = Arc::new(power_of_path(200, 4).unwrap());
        let params = AdversaryParams::new(5, 1.0, 0.5, 1.0, 0);
        let split = split_v0(&g, &params);
        for seed in 0..20 {
            let p = random_partition(200, &split.rest, 3, seed);
            let col = color_edges(Arc::clone(&g), &split.v0, p, Arc::clone(&plane)).unwrap();
            let counts = count_lines(&col, &params);
            for (class, lines) in plane.classes().iter().enumerate() {
                let sum: usize = lines.iter().map(|&l| counts.counts[l]).sum();
                let colored = col.colors().iter().filter(|&&c| c == class + 1).count();
                assert!(sum >= colored);
            }
        }
    }

    #[test]
    fn certificate_for_path_power() {
        let g = Arc::new(power_of_path(2000, 2).unwrap());
        let plane = Arc::new(AffinePlane::build(2).unwrap());
        let params = AdversaryParams::new(4, 3.99, 0.5, 10.0, 7);
        let cert = find_certificate(Arc::clone(&g), &params, Arc::clone(&plane), 100).unwrap();
        assert!(cert.counts.all_pass());
        assert!(cert.rest_independent_in_last_color);
        let again = find_certificate(g, &params, plane, 100).unwrap();
        assert_eq!(again.trial, cert.trial);
        assert_eq!(again.coloring.colors(), cert.coloring.colors());
    }

    #[test]
    fn certificate_edge_cases() {
        let plane = Arc::new(AffinePlane::build(2).unwrap());
        let params = AdversaryParams::new(4, 2.0, 0.5, 1.0, 0);
        let cert = find_certificate(
            Arc::new(HostGraph::empty(10)),
            &params,
            Arc::clone(&plane),
            5,
        )
        .unwrap();
        assert_eq!(cert.trial, 0);
        let k = 40;
        let kn =
            HostGraph::from_edges(k, (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j)))).unwrap();
        let params = AdversaryParams::new(4, 2.0, 0.99, 1.0, 0);
        match find_certificate(Arc::new(kn), &params, plane, 20) {
            Err(CertificateError::Exhausted {
                trials,
                best_margin,
                ..
            }) => {
                assert_eq!(trials, 20);
                assert!(best_margin <= 0.0);
            }
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn text_round_trip_and_corruption() {
        let plane = Arc::new(AffinePlane::build(3).unwrap());
        let g = Arc::new(power_of_path(60, 3).unwrap());
        let params = AdversaryParams::new(5, 0.1, 0.5, 1.0, 0);
        let split = split_v0(&g, &params);
        assert!(!split.v0.is_empty());
        let p = random_partition(60, &split.rest, 3, 3);
        let col = color_edges(g, &split.v0, p, plane).unwrap();
        let text = col.to_text();
        let back = Coloring::read_text(text.as_bytes()).unwrap();
        assert_eq!(back.colors(), col.colors());
        assert_eq!(back.partition(), col.partition());
        assert_eq!(back.v0(), col.v0());
        assert!(back.check_rules().passed());
        assert!(Coloring::read_text("q 3\nr 4\nvertices 2\n".as_bytes()).is_err());
        assert!(Coloring::read_text("q 3\nr 5\nvertices 2\nedge 0 1 9\n".as_bytes()).is_err());
    }

    #[test]
    fn default_trial_count() {
        assert_eq!(default_trials(0.5), 20);
        assert_eq!(default_trials(1.0), 10);
        assert_eq!(default_trials(0.0), MAX_TRIALS);
        assert_eq!(default_trials(1e-9), MAX_TRIALS);
    }
}
