use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};

use size_ramsey::adversary::{
    count_lines, default_trials, find_certificate, union_margin_for, AdversaryParams, Certificate,
    CertificateError, Coloring,
};
use size_ramsey::affine_plane::{check_axioms, AffinePlane};
use size_ramsey::arrowing::{
    arrow_bruteforce, check_expansion, subset_size, ExpansionMode, ExpansionSpec, Verdict,
};
use size_ramsey::bounds::{self, ColorRange};
use size_ramsey::first_moment::{self, ReferenceCheck};
use size_ramsey::graphs::{power_of_path, HostGraph};
use size_ramsey::pairing_model::{sample_pairing, sample_simple, PairingError};

use crate::{ColorArgs, Mode};

/// Process outcome; each maps to a distinct exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    InputError,
    /// No certificate or no simple sample within the budget.
    Infeasible,
    /// A stored or computed object failed verification.
    VerificationFailed,
}

impl Outcome {
    pub fn code(self) -> ExitCode {
        ExitCode::from(match self {
            Outcome::Success => 0,
            Outcome::InputError => 2,
            Outcome::Infeasible => 3,
            Outcome::VerificationFailed => 4,
        })
    }
}

/// Published c·d values for four and five colors, reported next to the computed optimum.
const REFERENCE_PRODUCTS: [(u32, f64); 2] = [(4, 5167.7), (5, 56110.0)];

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn read_graph(path: &Path) -> Result<HostGraph> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    HostGraph::read_edge_list(BufReader::new(file))
        .with_context(|| format!("reading {}", path.display()))
}

pub fn plane(q: usize, out: Option<&Path>) -> Result<Outcome> {
    let plane = AffinePlane::build(q)?;
    let axioms = check_axioms(q, plane.lines(), plane.classes(), plane.num_points());
    let json = serde_json::to_string_pretty(&plane.to_document())? + "\n";
    emit(out, &json)?;
    if out.is_some() {
        println!(
            "q {q}\npoints {}\nlines {}\nclasses {}\naxioms {}",
            plane.num_points(),
            plane.lines().len(),
            plane.classes().len(),
            if axioms.all() { "ok" } else { "FAIL" }
        );
    }
    Ok(if axioms.all() {
        Outcome::Success
    } else {
        Outcome::VerificationFailed
    })
}

fn certificate_text(cert: &Certificate, params: &AdversaryParams, margin: f64) -> String {
    let counts = &cert.counts;
    let g = cert.coloring.graph();
    let mut out = String::new();
    writeln!(out, "verdict CERTIFIED").unwrap();
    writeln!(out, "trial {}", cert.trial).unwrap();
    writeln!(out, "seed {}", cert.seed).unwrap();
    writeln!(out, "r {}", params.r).unwrap();
    writeln!(out, "q {}", cert.coloring.plane().order()).unwrap();
    writeln!(out, "vertices {}", g.n_vertices()).unwrap();
    writeln!(out, "edges {}", g.n_edges()).unwrap();
    writeln!(out, "n {}", params.target_order(g)).unwrap();
    writeln!(out, "d {}", params.d).unwrap();
    writeln!(out, "beta {}", params.beta).unwrap();
    writeln!(out, "C {}", params.c).unwrap();
    writeln!(out, "edge_budget {:.6}", params.edge_budget(g)).unwrap();
    writeln!(out, "v0_size {}", cert.coloring.v0().len()).unwrap();
    writeln!(out, "union_margin {margin:.6}").unwrap();
    writeln!(out, "threshold {:.6}", counts.threshold).unwrap();
    writeln!(out, "max_line_count {}", counts.max()).unwrap();
    writeln!(out, "expectation {:.6}", counts.expectation).unwrap();
    writeln!(out, "gamma {:.6}", counts.gamma).unwrap();
    writeln!(
        out,
        "components_checked {}",
        cert.confinement.components_checked
    )
    .unwrap();
    writeln!(
        out,
        "confinement {}",
        if cert.confinement.passed() {
            "ok"
        } else {
            "FAIL"
        }
    )
    .unwrap();
    writeln!(out, "max_component_edges {}", cert.max_component_edges).unwrap();
    writeln!(
        out,
        "rest_independent_in_last_color {}",
        cert.rest_independent_in_last_color
    )
    .unwrap();
    for w in &cert.warnings {
        writeln!(out, "warning {w}").unwrap();
    }
    out
}

fn params_of(args: &ColorArgs) -> AdversaryParams {
    AdversaryParams {
        n: args.n,
        ..AdversaryParams::new(args.r, args.d, args.beta, args.c, args.seed)
    }
}

pub fn color(args: &ColorArgs) -> Result<Outcome> {
    let params = params_of(args);
    let q = params.order()?;
    if let Some(path) = &args.replay {
        return replay(path, &params, q, args.out_dir.as_deref());
    }
    let path = args
        .graph
        .as_deref()
        .expect("clap requires --graph without --replay");
    let graph = Arc::new(read_graph(path)?);
    let plane = Arc::new(AffinePlane::build(q)?);
    let margin = union_margin_for(&graph, &params)?;
    let trials = args.trials.unwrap_or_else(|| default_trials(margin));
    log::info!("union margin {margin:.6}; up to {trials} trials");
    match find_certificate(graph, &params, plane, trials) {
        Ok(cert) => {
            let text = certificate_text(&cert, &params, margin);
            if let Some(dir) = &args.out_dir {
                fs::create_dir_all(dir)?;
                fs::write(dir.join("coloring.txt"), cert.coloring.to_text())?;
                fs::write(dir.join("line_counts.csv"), cert.counts.to_csv())?;
                fs::write(dir.join("certificate.txt"), &text)?;
            }
            print!("{text}");
            Ok(Outcome::Success)
        }
        Err(CertificateError::Setup(e)) => Err(e.into()),
        Err(e @ CertificateError::Exhausted { .. }) => {
            println!("verdict NO_CERTIFICATE\nreason {e}");
            Ok(Outcome::Infeasible)
        }
        Err(e @ CertificateError::Verification { .. }) => {
            println!("verdict VERIFICATION_FAILED\nreason {e}");
            Ok(Outcome::VerificationFailed)
        }
    }
}

fn replay(
    path: &Path,
    params: &AdversaryParams,
    q: usize,
    out_dir: Option<&Path>,
) -> Result<Outcome> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let coloring = Coloring::read_text(BufReader::new(file))?;
    if coloring.plane().order() != q {
        bail!(
            "coloring uses a plane of order {}, but r = {} needs {q}",
            coloring.plane().order(),
            params.r
        );
    }
    let rules = coloring.check_rules();
    let confinement = coloring.check_confinement();
    let counts = count_lines(&coloring, params);
    let last = coloring.color_class(coloring.num_colors());
    let independent = last.is_independent(&coloring.rest())?;
    let ok = rules.passed() && confinement.passed() && counts.all_pass() && independent;
    let yes = |b: bool| if b { "ok" } else { "FAIL" };
    let mut out = String::new();
    writeln!(out, "verdict {}", if ok { "VERIFIED" } else { "FAIL" }).unwrap();
    writeln!(out, "rules {}", yes(rules.passed())).unwrap();
    writeln!(out, "rule_violations {}", rules.violations.len()).unwrap();
    writeln!(out, "confinement {}", yes(confinement.passed())).unwrap();
    writeln!(
        out,
        "unconfined_components {}",
        confinement.violations.len()
    )
    .unwrap();
    writeln!(out, "line_counts {}", yes(counts.all_pass())).unwrap();
    writeln!(out, "max_line_count {}", counts.max()).unwrap();
    writeln!(out, "threshold {:.6}", counts.threshold).unwrap();
    writeln!(out, "rest_independent_in_last_color {independent}").unwrap();
    for v in &confinement.violations {
        writeln!(out, "violation color {} parts {:?}", v.color, v.parts).unwrap();
    }
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("line_counts.csv"), counts.to_csv())?;
    }
    print!("{out}");
    Ok(if ok {
        Outcome::Success
    } else {
        Outcome::VerificationFailed
    })
}

pub fn bounds(r: usize, n: f64, d: Option<f64>, k: Option<usize>, c: f64) -> Result<Outcome> {
    if bounds::classify_colors(r)? == ColorRange::Degenerate {
        eprintln!("warning: r = {r} has no affine plane of order r - 2; the constructive range requires r >= 4");
    }
    match (d, k) {
        (Some(d), _) => {
            let value = bounds::lower_bound_general(r, n, d, c)?;
            println!("bound general\nr {r}\nn {n}\nd {d}\nC {c}\nlower_bound {value:.6}");
        }
        (None, Some(k)) => {
            let value = bounds::lower_bound_path_power(r, n, k, c)?;
            let avg = bounds::path_power_average_degree(n, k);
            println!("bound path_power\nr {r}\nn {n}\nk {k}\nC {c}\naverage_degree {avg:.6}\nlower_bound {value:.6}");
        }
        (None, None) => bail!("one of --d or --k is required"),
    }
    Ok(Outcome::Success)
}

pub fn optimize(r: u32, tolerance: f64, trace: Option<&Path>) -> Result<Outcome> {
    let res = first_moment::optimize_constants(r, tolerance)?;
    let mut out = String::new();
    writeln!(out, "r {r}").unwrap();
    writeln!(out, "c_star {:.9}", res.c_star).unwrap();
    writeln!(out, "d_star {:.9}", res.d_star).unwrap();
    writeln!(out, "cd_star {:.6}", res.cd_star).unwrap();
    writeln!(out, "g_at_star {:.3e}", res.g_at_star).unwrap();
    writeln!(
        out,
        "c1_star {:.9}",
        first_moment::confinement_ratio(r, res.c_star)
    )
    .unwrap();
    writeln!(out, "integer_degree {}", res.d_star.ceil()).unwrap();
    writeln!(out, "integer_degree_cost {:.6}", res.integer_degree_cost).unwrap();
    writeln!(out, "iterations {}", res.trace.len()).unwrap();
    writeln!(out, "local_minimum {}", res.is_local_minimum(1e-3, 1e-6)).unwrap();
    if r == 3 {
        writeln!(
            out,
            "below_reference_bound {} ({:.6} < {})",
            res.cd_star < first_moment::REFERENCE_BOUND_R3,
            res.cd_star,
            first_moment::REFERENCE_BOUND_R3
        )
        .unwrap();
        out.push_str(&ReferenceCheck::evaluate().report());
    }
    if let Some(&(_, reference)) = REFERENCE_PRODUCTS.iter().find(|(rr, _)| *rr == r) {
        writeln!(
            out,
            "reference_cd {reference}\nrelative_deviation {:+.6}",
            (res.cd_star - reference) / reference
        )
        .unwrap();
    }
    if let Some(path) = trace {
        fs::write(path, res.trace_text())?;
    }
    print!("{out}");
    Ok(Outcome::Success)
}

pub fn sample(
    side_size: usize,
    degree: usize,
    seed: u64,
    multigraph: bool,
    max_attempts: usize,
    out: Option<&Path>,
) -> Result<Outcome> {
    let mut header = vec![format!(
        "pairing side_size {side_size} degree {degree} seed {seed}"
    )];
    let graph = if multigraph {
        let projection = sample_pairing(side_size, degree, seed)?.project();
        let hist: Vec<String> = projection
            .histogram
            .iter()
            .map(|(m, k)| format!("{m}:{k}"))
            .collect();
        header.push(format!(
            "support of one pairing; multiplicity histogram {}",
            hist.join(" ")
        ));
        projection.support(side_size)
    } else {
        match sample_simple(side_size, degree, seed, max_attempts) {
            Ok(s) => {
                header.push(format!("simple after {} attempts", s.attempts));
                s.graph
            }
            Err(e @ PairingError::Exhausted(_)) => {
                eprintln!(
                    "{e}; expected success rate {:.3e}",
                    size_ramsey::pairing_model::simplicity_probability(degree)
                );
                return Ok(Outcome::Infeasible);
            }
            Err(e) => return Err(e.into()),
        }
    };
    let mut buf = Vec::new();
    graph.write_edge_list(&mut buf, &header)?;
    emit(out, std::str::from_utf8(&buf)?)?;
    Ok(Outcome::Success)
}

#[allow(clippy::too_many_arguments)]
pub fn expand(
    path: &Path,
    s: Option<usize>,
    r: u32,
    c: Option<f64>,
    n: Option<usize>,
    mode: Mode,
    samples: usize,
    seed: u64,
) -> Result<Outcome> {
    let graph = read_graph(path)?;
    let s = match (s, c) {
        (Some(s), _) => s,
        (None, Some(c)) => {
            let side = graph
                .bipartition()
                .map(|(l, _)| l)
                .context("graph has no bipartition header")?;
            let n = n.unwrap_or_else(|| (side as f64 / c).round() as usize);
            subset_size(r, c, n)
        }
        (None, None) => bail!("give --s, or --c (with optional --n) to derive it"),
    };
    let mode = match mode {
        Mode::Exhaustive => ExpansionMode::Exhaustive,
        Mode::Sampled => ExpansionMode::Sampled { samples, seed },
    };
    let verdict = check_expansion(&graph, &ExpansionSpec { s, mode })?;
    print!("s {s}\n{}", verdict.to_text());
    Ok(match verdict {
        Verdict::Fail { .. } => Outcome::VerificationFailed,
        _ => Outcome::Success,
    })
}

pub fn arrow(
    graph: Option<&Path>,
    complete: Option<usize>,
    path: Option<usize>,
    path_vertices: usize,
    colors: usize,
) -> Result<Outcome> {
    let (name, g) = match (graph, complete, path) {
        (Some(p), _, _) => (p.display().to_string(), read_graph(p)?),
        (None, Some(k), _) => (
            format!("K{k}"),
            HostGraph::from_edges(k, (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))))?,
        ),
        (None, None, Some(k)) => (format!("P{k}"), power_of_path(k, 1)?),
        (None, None, None) => bail!("give one of --graph, --complete, --path"),
    };
    let arrows = arrow_bruteforce(&g, path_vertices, colors)?;
    println!("graph {name}\ntarget P{path_vertices}\ncolors {colors}\narrows {arrows}");
    Ok(Outcome::Success)
}

pub fn g_surface(
    r: u32,
    c_range: (f64, f64),
    d_range: (f64, f64),
    steps: usize,
    out: Option<&Path>,
) -> Result<Outcome> {
    let rows = first_moment::emit_g_surface(r, c_range, d_range, steps);
    emit(out, &first_moment::surface_csv(&rows))?;
    Ok(Outcome::Success)
}

pub fn moment_converge(r: u32, c: f64, d: f64, ns: &[u64], out: Option<&Path>) -> Result<Outcome> {
    let rows = first_moment::convergence_table(r, c, d, ns)?;
    emit(out, &first_moment::convergence_csv(&rows))?;
    Ok(Outcome::Success)
}
