use std::fmt::Display;
use std::fs;
use std::path::Path;

use serde::Serialize;

use lcltrees_core::equivalence::census;
use lcltrees_core::oracle::{brute_force_connects, brute_force_solve, OracleBudget, Outcome};
use lcltrees_core::path::minimal_ell;
use lcltrees_core::rake_compress::{decompose as raw_decompose, post_process, simulated_rounds};
use lcltrees_core::report::{classify as run_classify, ClassificationReport, Verdict};
use lcltrees_core::solver::{round_report, solve_log, RoundsReport};
use lcltrees_core::toast::{auto_centers, build_nested_toast, solve_toast};
use lcltrees_core::{
    gen_tree, is_valid_labeling, parse_labeling, parse_problem, parse_tree, serialize_labeling,
    serialize_tree, HalfEdgeLabeling, LclProblem, PortTree, TreeGenSpec, TreeModel, ValidityReport,
    VertexConfig,
};

use crate::{
    ClassesArgs, ClassifyArgs, DecomposeArgs, Format, GenArgs, OracleConnectsArgs, OracleSolveArgs,
    SolveArgs, VerifyArgs,
};

pub const OK: u8 = 0;
pub const NEGATIVE: u8 = 1;
pub const INPUT: u8 = 2;
pub const INCONCLUSIVE: u8 = 3;

pub struct Failure {
    pub code: u8,
    pub message: String,
}

type Res = Result<u8, Failure>;

fn fail(code: u8, e: impl Display) -> Failure {
    Failure {
        code,
        message: e.to_string(),
    }
}

fn input(e: impl Display) -> Failure {
    fail(INPUT, e)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| input(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn load_problem(path: &Path) -> Result<LclProblem, Failure> {
    parse_problem(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_tree(path: &Path) -> Result<PortTree, Failure> {
    parse_tree(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

/// A subset file holds either a list of configurations or a report.
fn load_subset(problem: &LclProblem, path: &Path) -> Result<(Vec<VertexConfig>, Option<usize>), Failure> {
    let text = read(path)?;
    if let Ok(report) = ClassificationReport::from_json(&text) {
        let subset = report
            .subset_configs(problem)
            .map_err(input)?
            .ok_or_else(|| input("the report has no subset"))?;
        return Ok((subset, report.minimal_ell));
    }
    let names: Vec<Vec<String>> = serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let subset = names
        .iter()
        .map(|c| problem.config_from_names(c))
        .collect::<Result<Vec<_>, _>>()
        .map_err(input)?;
    Ok((subset, None))
}

fn parse_config(problem: &LclProblem, text: &str) -> Result<VertexConfig, Failure> {
    let names: Vec<&str> = text.split([',', ' ']).filter(|s| !s.is_empty()).collect();
    problem.config_from_names(&names).map_err(input)
}

pub fn classify(a: &ClassifyArgs, fmt: Format) -> Res {
    let problem = load_problem(&a.problem)?;
    let report = run_classify(&problem, a.budget);
    if let Some(out) = &a.out {
        write_or_print(Some(out), &report.to_json())?;
    }
    match fmt {
        Format::Json => println!("{}", report.to_json()),
        Format::Human => print!("{}", report.render_human()),
    }
    Ok(match report.verdict {
        Verdict::In | Verdict::Not => OK,
        Verdict::Inconclusive => INCONCLUSIVE,
    })
}

#[derive(Serialize)]
struct SolveReport {
    algorithm: &'static str,
    ell: usize,
    subset: Vec<Vec<String>>,
    validity: ValidityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    rounds: Option<RoundsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    toast_pieces: Option<usize>,
}

pub fn solve(a: &SolveArgs, fmt: Format) -> Res {
    let problem = load_problem(&a.problem)?;
    let tree = load_tree(&a.tree)?;
    if tree.delta() != problem.delta() {
        return Err(input(format!(
            "tree has delta {} but the problem has {}",
            tree.delta(),
            problem.delta()
        )));
    }
    let (subset, ell) = match &a.subset {
        Some(path) => {
            let (subset, from_file) = load_subset(&problem, path)?;
            let ell = match a.ell.or(from_file) {
                Some(ell) => ell,
                None => minimal_ell(&problem, &subset)
                    .map_err(input)?
                    .ok_or_else(|| fail(NEGATIVE, "the subset is not l-full for any l"))?,
            };
            (subset, ell)
        }
        None => {
            let report = run_classify(&problem, a.budget);
            match report.verdict {
                Verdict::In => {}
                Verdict::Not => return Err(fail(NEGATIVE, "the problem has no l-full subset")),
                Verdict::Inconclusive => {
                    return Err(fail(INCONCLUSIVE, "no l-full subset found within the budget"))
                }
            }
            let subset = report.subset_configs(&problem).map_err(input)?.expect("positive verdict");
            (subset, a.ell.unwrap_or(report.minimal_ell.expect("positive verdict")))
        }
    };

    let (labeling, rounds, pieces): (HalfEdgeLabeling, _, _) = match a.toast {
        Some(q) => {
            let centers = auto_centers(&tree, 4 * q);
            let toast = build_nested_toast(&tree, q, &centers, a.toast_levels).map_err(input)?;
            let l = solve_toast(&problem, &subset, ell, &tree, &toast).map_err(input)?;
            (l, None, Some(toast.pieces.len()))
        }
        None => {
            let sol = solve_log(&problem, &subset, ell, &tree).map_err(input)?;
            let r = round_report(&tree, &sol.decomposition);
            (sol.labeling, Some(r), None)
        }
    };
    let validity = is_valid_labeling(&problem, &tree, &labeling).map_err(input)?;
    let report = SolveReport {
        algorithm: if a.toast.is_some() { "toast" } else { "rake-and-compress" },
        ell,
        subset: subset.iter().map(|c| problem.config_to_names(c)).collect(),
        validity,
        rounds,
        toast_pieces: pieces,
    };
    let text = serialize_labeling(&problem, &labeling);
    match &a.out {
        Some(path) => write_or_print(Some(path), &text)?,
        None if fmt == Format::Human => println!("{text}"),
        None => {}
    }
    match fmt {
        Format::Json if a.out.is_some() => println!("{}", json(&report)),
        Format::Json => println!(
            "{}",
            json(&serde_json::json!({ "report": report, "labeling": serde_json::from_str::<serde_json::Value>(&text).unwrap() }))
        ),
        Format::Human => {
            eprintln!(
                "{} with l = {}: {} violations",
                report.algorithm,
                ell,
                report.validity.num_violations()
            );
            if let Some(r) = &report.rounds {
                eprintln!(
                    "depth {} (l' = {}), simulated rounds {}, rounds / log2 n = {:.2}",
                    r.depth, r.ell_prime, r.simulated_rounds, r.ratio
                );
            }
        }
    }
    Ok(if report.validity.is_valid() { OK } else { NEGATIVE })
}

pub fn verify(a: &VerifyArgs, fmt: Format) -> Res {
    let problem = load_problem(&a.problem)?;
    let tree = load_tree(&a.tree)?;
    let labeling = parse_labeling(&problem, &read(&a.labeling)?).map_err(input)?;
    let report = is_valid_labeling(&problem, &tree, &labeling).map_err(input)?;
    match fmt {
        Format::Json => println!("{}", json(&report)),
        Format::Human => {
            if report.is_valid() {
                println!("valid");
            } else {
                println!("invalid: {} violations", report.num_violations());
                for &v in &report.vertex_violations {
                    println!(
                        "vertex {v}: configuration {} not allowed",
                        problem.format_config(&labeling.config(v))
                    );
                }
                for e in &report.edge_violations {
                    println!(
                        "edge {}:{} - {}:{}: labels {} {} not allowed",
                        e.u,
                        e.pu,
                        e.v,
                        e.pv,
                        problem.label_name(labeling.get(e.u, e.pu)),
                        problem.label_name(labeling.get(e.v, e.pv))
                    );
                }
            }
        }
    }
    Ok(if report.is_valid() { OK } else { NEGATIVE })
}

pub fn gen(a: &GenArgs) -> Res {
    let model: TreeModel = a.model.parse().map_err(input)?;
    let tree = gen_tree(&TreeGenSpec {
        n: a.n,
        delta: a.delta,
        seed: a.seed,
        model,
    })
    .map_err(input)?;
    write_or_print(a.out.as_deref(), &serialize_tree(&tree))?;
    Ok(OK)
}

#[derive(Serialize)]
struct VertexLayers {
    vertex: usize,
    raw: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    layer: Option<String>,
}

#[derive(Serialize)]
struct DecomposeReport {
    n: usize,
    gamma: usize,
    ell: usize,
    raw_depth: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    ell_prime: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    promotion_passes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    simulated_rounds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    post_processing_error: Option<String>,
    vertices: Vec<VertexLayers>,
}

pub fn decompose(a: &DecomposeArgs, fmt: Format) -> Res {
    let tree = load_tree(&a.tree)?;
    if a.gamma == 0 || a.ell == 0 {
        return Err(input("gamma and ell must be positive"));
    }
    let raw = raw_decompose(&tree, a.gamma, a.ell);
    let ell_prime = a.ell_prime.unwrap_or(a.ell.saturating_sub(1).max(1));
    let post = post_process(&tree, &raw, ell_prime);
    let (layered, error) = match post {
        Ok(d) => (Some(d), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let report = DecomposeReport {
        n: tree.len(),
        gamma: a.gamma,
        ell: a.ell,
        raw_depth: raw.depth(),
        ell_prime: layered.as_ref().map(|d| d.ell_prime),
        depth: layered.as_ref().map(|d| d.depth()),
        promotion_passes: layered.as_ref().map(|d| d.promotion_passes),
        simulated_rounds: layered.as_ref().map(simulated_rounds),
        post_processing_error: error,
        vertices: (0..tree.len())
            .map(|v| VertexLayers {
                vertex: v,
                raw: raw.layers[v].to_string(),
                layer: layered.as_ref().map(|d| d.layers[v].to_string()),
            })
            .collect(),
    };
    match fmt {
        Format::Json => println!("{}", json(&report)),
        Format::Human => {
            println!("raw depth {} (gamma {}, ell {})", report.raw_depth, a.gamma, a.ell);
            match (&layered, &report.post_processing_error) {
                (Some(d), _) => println!(
                    "post-processed depth {} (ell' {}, {} promotion passes, {} simulated rounds)",
                    d.depth(),
                    d.ell_prime,
                    d.promotion_passes,
                    simulated_rounds(d)
                ),
                (None, Some(e)) => println!("post-processing skipped: {e}"),
                (None, None) => {}
            }
            for v in &report.vertices {
                match &v.layer {
                    Some(l) => println!("{}\t{}\t{}", v.vertex, v.raw, l),
                    None => println!("{}\t{}", v.vertex, v.raw),
                }
            }
        }
    }
    Ok(OK)
}

pub fn classes(a: &ClassesArgs, fmt: Format) -> Res {
    let problem = load_problem(&a.problem)?;
    if a.max_size == 0 {
        return Err(input("max-size must be positive"));
    }
    let c = census(&problem, a.max_size, a.samples, a.seed, a.cap);
    match fmt {
        Format::Json => println!("{}", json(&c)),
        Format::Human => {
            println!("sampled {} trees of at most {} vertices", c.trees_sampled, c.max_size);
            for (arity, count) in &c.rooted_classes {
                println!("rooted classes with {arity} free half-edges at the root: {count}");
            }
            println!("bipolar classes: {}", c.bipolar_classes);
            println!("ell_pump upper bound (observed): {}", c.ell_pump_bound);
            if !c.saturated {
                println!("closure stopped at the cap of {} classes", a.cap);
            }
        }
    }
    Ok(if c.saturated { OK } else { INCONCLUSIVE })
}

pub fn oracle_solve(a: &OracleSolveArgs, fmt: Format) -> Res {
    let problem = load_problem(&a.problem)?;
    let tree = load_tree(&a.tree)?;
    let budget = OracleBudget {
        max_vertices: a.max_vertices,
        max_labelings: a.budget,
    };
    match brute_force_solve(&problem, &tree, budget) {
        Outcome::Found(l) => {
            let text = serialize_labeling(&problem, &l);
            match (&a.out, fmt) {
                (Some(path), _) => write_or_print(Some(path), &text)?,
                (None, _) => println!("{text}"),
            }
            Ok(OK)
        }
        Outcome::Absent => {
            println!("{}", if fmt == Format::Json { "null" } else { "no labeling exists" });
            Ok(NEGATIVE)
        }
        Outcome::Unknown => Err(fail(INCONCLUSIVE, "search budget exhausted")),
    }
}

pub fn oracle_connects(a: &OracleConnectsArgs, fmt: Format) -> Res {
    let problem = load_problem(&a.problem)?;
    let subset = match &a.subset {
        Some(path) => load_subset(&problem, path)?.0,
        None => problem.vertex_configs().to_vec(),
    };
    let label = |name: &str| {
        problem
            .label_by_name(name)
            .ok_or_else(|| input(format!("unknown label {name:?}")))
    };
    let (a1, a2) = (label(&a.a1)?, label(&a.a2)?);
    let (c1, c2) = (parse_config(&problem, &a.c1)?, parse_config(&problem, &a.c2)?);
    if !c1.contains(a1) || !c2.contains(a2) {
        return Err(input("endpoint label is not in its configuration"));
    }
    if a.k < 2 {
        return Err(input("k must be at least 2"));
    }
    let budget = OracleBudget {
        max_vertices: usize::MAX,
        max_labelings: a.budget,
    };
    let outcome = brute_force_connects(&problem, &subset, (a1, &c1), (a2, &c2), a.k, budget);
    let answer = outcome.decided();
    match fmt {
        Format::Json => println!("{}", json(&serde_json::json!({ "connects": answer }))),
        Format::Human => match answer {
            Some(b) => println!("{b}"),
            None => println!("unknown"),
        },
    }
    Ok(match answer {
        Some(true) => OK,
        Some(false) => NEGATIVE,
        None => INCONCLUSIVE,
    })
}
