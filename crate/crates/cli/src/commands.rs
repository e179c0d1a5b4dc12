//! Implementations of the four subcommands.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use maxkcut::cluster::{
    cluster_kmeans, cluster_sdp, cluster_sdp_weights, rand_index, ClusterResult, Diagnostics,
    SdpMethod, SdpPipelineParams,
};
use maxkcut::data::{
    gaussian_ring, load_mnist_idx, load_points_csv, load_weight_matrix, random_weight_matrix,
    save_points_csv, save_weight_matrix, WeightFamily,
};
use maxkcut::elliptope::extract_partition;
use maxkcut::rng::{stream, substream};
use maxkcut::rounding::{RoundStatus, RoundingParams};
use maxkcut::sdp::{SolveStatus, SolverParams};
use maxkcut::{Error, Partition, Result, SymMatrix};

use crate::config::RunConfig;
use crate::render as rdr;
use crate::report::Report;
use crate::{ClusterArgs, EvalArgs, FamilyArg, GenerateKind, MethodArg, RenderKind};

pub fn generate(kind: GenerateKind) -> Result<()> {
    match kind {
        GenerateKind::Ring {
            clusters,
            per,
            sigma,
            radius,
            seed,
            out,
        } => {
            let ds = gaussian_ring(clusters, per, sigma, radius, seed)?;
            save_points_csv(&ds, &out)?;
            println!(
                "wrote {} labeled 2-D points ({clusters} clusters x {per}) to {}",
                ds.n(),
                out.display()
            );
        }
        GenerateKind::RandomWeights {
            n,
            family,
            dim,
            seed,
            out,
        } => {
            let family = match family {
                FamilyArg::Gaussian => WeightFamily::GaussianWeights,
                FamilyArg::Euclidean => WeightFamily::EuclideanUniform(dim),
            };
            let m = random_weight_matrix(n, family, seed)?;
            save_weight_matrix(&m, &out)?;
            println!("wrote {n}x{n} weight matrix to {}", out.display());
        }
        GenerateKind::MnistSubset {
            images,
            labels,
            digits,
            per,
            threshold,
            seed,
            out,
        } => {
            let ds = load_mnist_idx(&images, &labels, &digits, per, threshold, seed)?;
            save_points_csv(&ds, &out)?;
            println!(
                "wrote {} binarized examples ({per} per digit, threshold {threshold}) to {}",
                ds.n(),
                out.display()
            );
        }
    }
    Ok(())
}

fn parse_method(raw: &str) -> Result<MethodArg> {
    match raw {
        "sdp-fixed-point" => Ok(MethodArg::SdpFixedPoint),
        "sdp-random" => Ok(MethodArg::SdpRandom),
        "kmeans" => Ok(MethodArg::Kmeans),
        other => Err(Error::invalid(format!(
            "config key method: expected sdp-fixed-point, sdp-random or kmeans, found {other:?}"
        ))),
    }
}

pub fn cluster(args: ClusterArgs) -> Result<()> {
    let cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };

    let input = args.input.clone().or_else(|| cfg.get_path("input"));
    let weights = args.weights.clone().or_else(|| cfg.get_path("weights"));
    let k = args
        .k
        .or(cfg.get::<usize>("k")?)
        .ok_or_else(|| Error::invalid("--k is required (flag or config)"))?;
    let method = match args.method {
        Some(m) => m,
        None => match cfg.get_str("method") {
            Some(raw) => parse_method(raw)?,
            None => return Err(Error::invalid("--method is required (flag or config)")),
        },
    };
    let seed = args.seed.or(cfg.get::<u64>("seed")?).unwrap_or(0);
    let trials = args.trials.or(cfg.get::<usize>("trials")?).unwrap_or(50);
    let restarts = args.restarts.or(cfg.get::<usize>("restarts")?).unwrap_or(10);

    let mut solver = SolverParams::default();
    if let Some(v) = args.max_iters.or(cfg.get("max_iters")?) {
        solver.max_iters = v;
    }
    if let Some(v) = args.eps_abs.or(cfg.get("eps_abs")?) {
        solver.eps_abs = v;
    }
    if let Some(v) = args.eps_rel.or(cfg.get("eps_rel")?) {
        solver.eps_rel = v;
    }
    if let Some(v) = args.rho.or(cfg.get("rho")?) {
        solver.rho = v;
    }
    if let Some(v) = args.adaptive_rho.or(cfg.get_bool("adaptive_rho")?) {
        solver.adaptive_rho = v;
    }
    if let Some(v) = args.over_relaxation.or(cfg.get("over_relaxation")?) {
        solver.over_relaxation = v;
    }

    let mut rounding = RoundingParams {
        seed,
        ..RoundingParams::default()
    };
    if let Some(v) = args.max_rounds.or(cfg.get("max_rounds")?) {
        rounding.max_rounds = v;
    }
    if let Some(v) = args.vertex_tol.or(cfg.get("vertex_tol")?) {
        rounding.vertex_tol = v;
    }
    if let Some(v) = args.step_tol.or(cfg.get("step_tol")?) {
        rounding.step_tol = v;
    }

    let out_assignments = args
        .out_assignments
        .clone()
        .or_else(|| cfg.get_path("out_assignments"))
        .unwrap_or_else(|| PathBuf::from("assignments.csv"));
    let report_path = args
        .report
        .clone()
        .or_else(|| cfg.get_path("report"))
        .unwrap_or_else(|| PathBuf::from("report.json"));
    let trace_dir = args.trace_dir.clone().or_else(|| cfg.get_path("trace_dir"));

    let (points, weight_matrix): (Option<Vec<Vec<f64>>>, Option<SymMatrix>) =
        match (&input, &weights) {
            (Some(_), Some(_)) => {
                return Err(Error::invalid("give either --input or --weights, not both"))
            }
            (None, None) => return Err(Error::invalid("one of --input or --weights is required")),
            (Some(path), None) => (Some(load_points_csv(path)?.points), None),
            (None, Some(path)) => (None, Some(load_weight_matrix(path)?)),
        };
    let n = points
        .as_ref()
        .map(|p| p.len())
        .unwrap_or_else(|| weight_matrix.as_ref().expect("weights loaded").n());
    if k < 1 || k > n {
        return Err(Error::invalid(format!("k = {k} must lie in 1..=n = {n}")));
    }
    if trace_dir.is_some() && method != MethodArg::SdpFixedPoint {
        return Err(Error::invalid("--trace-dir requires --method sdp-fixed-point"));
    }

    let pipeline = SdpPipelineParams {
        solver,
        rounding,
        trials,
        seed,
    };

    let started = Instant::now();
    let (result, trace_matrices): (ClusterResult, Option<Vec<SymMatrix>>) = match method {
        MethodArg::Kmeans => {
            let pts = points
                .as_ref()
                .ok_or_else(|| Error::invalid("kmeans requires --input points, not --weights"))?;
            (cluster_kmeans(pts, k, restarts, seed)?, None)
        }
        MethodArg::SdpFixedPoint | MethodArg::SdpRandom => {
            let sdp_method = if method == MethodArg::SdpFixedPoint {
                SdpMethod::FixedPoint
            } else {
                SdpMethod::Randomized
            };
            let result = match (&points, &weight_matrix) {
                (Some(pts), None) => cluster_sdp(pts, k, sdp_method, &pipeline)?,
                (None, Some(m)) => cluster_sdp_weights(m, k, sdp_method, &pipeline)?,
                _ => unreachable!("exactly one input source"),
            };
            let iterates = match &result.diagnostics {
                Diagnostics::SdpFixedPoint { trace, .. } => Some(trace.iterates.clone()),
                _ => None,
            };
            (result, iterates)
        }
    };
    let wall_time_seconds = started.elapsed().as_secs_f64();

    let mut csv = String::from("index,label\n");
    for (i, &label) in result.partition.labels().iter().enumerate() {
        csv.push_str(&format!("{i},{label}\n"));
    }
    fs::write(&out_assignments, csv)?;

    let report = build_report(&result, method, k, n, seed, wall_time_seconds);
    fs::write(&report_path, report.to_json())?;

    if let (Some(dir), Some(iterates)) = (&trace_dir, &trace_matrices) {
        fs::create_dir_all(dir)?;
        for (t, x) in iterates.iter().enumerate() {
            save_weight_matrix(x, dir.join(format!("iterate_{t:03}.txt")))?;
        }
    }

    println!(
        "method={} k={k} n={n} blocks={} cut_weight={:.6} -> {}, {}",
        method.name(),
        result.partition.block_count(),
        result.cut_weight,
        out_assignments.display(),
        report_path.display()
    );
    Ok(())
}

fn build_report(
    result: &ClusterResult,
    method: MethodArg,
    k: usize,
    n: usize,
    seed: u64,
    wall_time_seconds: f64,
) -> Report {
    let mut report = Report {
        method: method.name(),
        k,
        n,
        seed,
        cut_weight: result.cut_weight,
        block_count: result.partition.block_count(),
        relaxation_weight: None,
        solver_iterations: None,
        solver_status: None,
        rounding_rounds: None,
        rounding_status: None,
        fallback_randomized: None,
        trials: None,
        restarts: None,
        kmeans_objective: None,
        wall_time_seconds,
    };
    match &result.diagnostics {
        Diagnostics::SdpFixedPoint { solve, trace } => {
            report.relaxation_weight = Some(solve.relaxation_weight);
            report.solver_iterations = Some(solve.iterations);
            report.solver_status = Some(solve_status_name(solve.status));
            report.rounding_rounds = Some(trace.rounds());
            report.rounding_status = Some(round_status_name(trace.status));
            report.fallback_randomized = Some(trace.fallback_randomized);
        }
        Diagnostics::SdpRandomized { solve, trials } => {
            report.relaxation_weight = Some(solve.relaxation_weight);
            report.solver_iterations = Some(solve.iterations);
            report.solver_status = Some(solve_status_name(solve.status));
            report.trials = Some(*trials);
        }
        Diagnostics::KMeans {
            restarts,
            objective,
        } => {
            report.restarts = Some(*restarts);
            report.kmeans_objective = Some(*objective);
        }
    }
    report
}

fn solve_status_name(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Converged => "converged",
        SolveStatus::MaxIters => "max-iters",
    }
}

fn round_status_name(status: RoundStatus) -> &'static str {
    match status {
        RoundStatus::VertexReached => "vertex-reached",
        RoundStatus::Stalled => "stalled",
        RoundStatus::MaxRounds => "max-rounds",
    }
}

pub fn eval(args: EvalArgs) -> Result<()> {
    match &args.batch {
        None => {
            let value = eval_pair(&args.pred, &args.truth)?;
            println!("rand_index: {value:.6}");
        }
        Some(parent) => {
            let mut dirs: Vec<PathBuf> = Vec::new();
            for entry in fs::read_dir(parent)? {
                let entry = entry?;
                if entry.file_type()?.is_dir() {
                    dirs.push(entry.path());
                }
            }
            dirs.sort();
            if dirs.is_empty() {
                return Err(Error::invalid(format!(
                    "no repetition directories under {}",
                    parent.display()
                )));
            }
            let mut values = Vec::new();
            for dir in &dirs {
                let value = eval_pair(&dir.join(&args.pred), &dir.join(&args.truth))?;
                println!(
                    "{}: {value:.6}",
                    dir.file_name().unwrap_or_default().to_string_lossy()
                );
                values.push(value);
            }
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let std = if values.len() > 1 {
                (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                    / (values.len() - 1) as f64)
                    .sqrt()
            } else {
                0.0
            };
            println!("{mean:.3} ± {std:.3}");
        }
    }
    Ok(())
}

fn eval_pair(pred: &Path, truth: &Path) -> Result<f64> {
    let a = read_clustering(pred)?;
    let b = read_clustering(truth)?;
    rand_index(&a, &b)
}

/// Read a clustering from either an assignments CSV (header `index,label`)
/// or a labeled points CSV.
fn read_clustering(path: &Path) -> Result<Partition> {
    let text = fs::read_to_string(path)?;
    let first = text
        .lines()
        .next()
        .ok_or_else(|| Error::Format(format!("{}: empty file", path.display())))?;
    let normalized: String = first
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_ascii_lowercase();
    if normalized == "index,label" {
        parse_assignments(&text, path)
    } else {
        load_points_csv(path)?.label_partition()?.ok_or_else(|| {
            Error::invalid(format!(
                "{}: points CSV has no label column",
                path.display()
            ))
        })
    }
}

fn parse_assignments(text: &str, path: &Path) -> Result<Partition> {
    let mut rows: Vec<(usize, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate().skip(1) {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let (i, l) = line.split_once(',').ok_or_else(|| Error::Parse {
            line: lineno,
            message: format!("expected index,label in {}", path.display()),
        })?;
        let index: usize = i.trim().parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("bad index {:?}", i.trim()),
        })?;
        let label: usize = l.trim().parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("bad label {:?}", l.trim()),
        })?;
        rows.push((index, label));
    }
    if rows.is_empty() {
        return Err(Error::Format(format!(
            "{}: no assignment rows",
            path.display()
        )));
    }
    rows.sort_unstable();
    for (pos, (index, _)) in rows.iter().enumerate() {
        if *index != pos {
            return Err(Error::invalid(format!(
                "{}: indices must cover exactly 0..{} (missing or duplicate index near {pos})",
                path.display(),
                rows.len() - 1
            )));
        }
    }
    let labels: Vec<usize> = rows.into_iter().map(|(_, label)| label).collect();
    let k = labels.iter().max().copied().unwrap_or(0) + 1;
    Partition::new(labels, k)
}

pub fn render(kind: RenderKind) -> Result<()> {
    match kind {
        RenderKind::Heatmap {
            input,
            trace_dir,
            k,
            permute,
            assignments,
            out,
        } => {
            if k < 2 {
                return Err(Error::invalid("--k must be at least 2"));
            }
            match (input, trace_dir) {
                (Some(_), Some(_)) => {
                    Err(Error::invalid("give either --input or --trace-dir, not both"))
                }
                (None, None) => Err(Error::invalid("one of --input or --trace-dir is required")),
                (Some(file), None) => {
                    let m = load_weight_matrix(&file)?;
                    let perm = permutation_for(&m, k, permute, assignments.as_deref())?;
                    fs::write(&out, rdr::heatmap_ppm(&m, k, perm.as_deref()))?;
                    println!("wrote {}", out.display());
                    Ok(())
                }
                (None, Some(dir)) => {
                    let mut files: Vec<PathBuf> = Vec::new();
                    for entry in fs::read_dir(&dir)? {
                        let path = entry?.path();
                        let name = path.file_name().unwrap_or_default().to_string_lossy();
                        if name.starts_with("iterate_") && name.ends_with(".txt") {
                            files.push(path);
                        }
                    }
                    files.sort();
                    if files.is_empty() {
                        return Err(Error::invalid(format!(
                            "no iterate_*.txt files in {}",
                            dir.display()
                        )));
                    }
                    let last = load_weight_matrix(files.last().expect("nonempty"))?;
                    let perm = permutation_for(&last, k, permute, assignments.as_deref())?;
                    fs::create_dir_all(&out)?;
                    for file in &files {
                        let m = load_weight_matrix(file)?;
                        let stem = file
                            .file_stem()
                            .unwrap_or_default()
                            .to_string_lossy()
                            .into_owned();
                        fs::write(
                            out.join(format!("{stem}.ppm")),
                            rdr::heatmap_ppm(&m, k, perm.as_deref()),
                        )?;
                    }
                    println!("wrote {} heatmaps to {}", files.len(), out.display());
                    Ok(())
                }
            }
        }
        RenderKind::Scatter {
            points,
            assignments,
            seed,
            out,
        } => {
            let ds = load_points_csv(&points)?;
            if ds.dim() != 2 {
                return Err(Error::invalid(format!(
                    "scatter requires 2-D points, got {}-D",
                    ds.dim()
                )));
            }
            let partition = read_clustering(&assignments)?;
            if partition.n() != ds.n() {
                return Err(Error::dims(format!(
                    "assignments cover {} points, dataset has {}",
                    partition.n(),
                    ds.n()
                )));
            }
            let pts: Vec<(f64, f64)> = ds.points.iter().map(|p| (p[0], p[1])).collect();
            let mut rng = substream(seed, stream::WELZL);
            fs::write(&out, rdr::scatter_svg(&pts, &partition, &mut rng))?;
            println!("wrote {}", out.display());
            Ok(())
        }
    }
}

/// Permutation for `--permute`: from explicit assignments when given, else
/// extracted from the final matrix at a relaxed tolerance.
fn permutation_for(
    final_m: &SymMatrix,
    k: usize,
    permute: bool,
    assignments: Option<&Path>,
) -> Result<Option<Vec<usize>>> {
    if !permute {
        return Ok(None);
    }
    let partition = match assignments {
        Some(path) => read_clustering(path)?,
        None => extract_partition(final_m, k, 1e-2).map_err(|_| {
            Error::invalid(
                "cannot derive a block permutation: the final matrix is not near a \
                 partition matrix; pass --assignments",
            )
        })?,
    };
    if partition.n() != final_m.n() {
        return Err(Error::dims(format!(
            "assignments cover {} points, matrix is {1}x{1}",
            partition.n(),
            final_m.n()
        )));
    }
    Ok(Some(rdr::block_permutation(&partition)))
}
