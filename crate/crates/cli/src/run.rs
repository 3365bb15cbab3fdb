use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use exemplar_core::builders::{
    coauthor_relation, euclidean_relation, hausdorff_relation, load_pbm, load_points, load_publications,
    CoauthorRelation,
};
use exemplar_core::export::{durations_csv, export_dot, scores_csv, sweep_csv, Report, Robustness};
use exemplar_core::network::load_adjacency;
use exemplar_core::relation::{load_table, quote};
use exemplar_core::robustness::{bootstrap_standards, outlier_experiment, Exclusion, OutlierConfig};
use exemplar_core::{
    aggregated_scores, build_network, load_relation, rank_table, scale_sweep, standard, validate_relation, Error,
    NeighborhoodSpec, RelationMatrix, ValidationReport,
};

use crate::args::*;

pub enum Failure {
    Usage(String),
    Core(Error),
    Invalid(ValidationReport),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<(), Failure>;

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?,
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        })?,
    }
    Ok(())
}

fn summary(line: String) {
    eprintln!("{line}");
}

fn only(format: Format, allowed: &[Format]) -> Result<(), Failure> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(Failure::Usage(
            format!("--format {format:?} is not supported here").to_lowercase(),
        ))
    }
}

pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate(input) => validate(&input),
        Command::Score(args) => score(&args),
        Command::Network(args) => network(&args),
        Command::Sweep(args) => sweep(&args),
        Command::Bootstrap(args) => bootstrap(&args),
        Command::Outliers(args) => outliers(&args),
        Command::Relation(cmd) => relation(cmd),
    }
}

fn validate(input: &Input) -> Outcome {
    let table = load_table(&input.input, input.labels)?;
    let report = validate_relation(&table.rows)?;
    if !report.valid {
        return Err(Failure::Invalid(report));
    }
    println!(
        "valid: {} objects, {}",
        table.rows.len(),
        if report.is_symmetric { "symmetric" } else { "asymmetric" }
    );
    Ok(())
}

fn score(args: &ScoreArgs) -> Outcome {
    only(args.format, &[Format::Csv])?;
    let r = load_relation(&args.scoring.input.input, args.scoring.input.labels)?;
    let sv = aggregated_scores(&rank_table(&r, args.scoring.tie_policy));
    emit(args.out.as_deref(), &scores_csv(r.labels(), &sv))?;
    let s = standard(&sv);
    summary(format!("standard {} (score {})", r.labels()[s], sv.get(s)));
    Ok(())
}

fn network(args: &NetworkArgs) -> Outcome {
    only(args.format, &[Format::Dot, Format::Json])?;
    if args.bootstraps.is_some() && args.format != Format::Json {
        return Err(Failure::Usage("--bootstraps needs --format json".into()));
    }
    let r = load_relation(&args.scoring.input.input, args.scoring.input.labels)?;
    let rk = rank_table(&r, args.scoring.tie_policy);
    let sv = aggregated_scores(&rk);

    let (spec, sweep) = match (&args.graph, args.k) {
        (Some(path), _) => (NeighborhoodSpec::Graph(load_adjacency(path, r.labels())?), None),
        (None, k) => {
            let sweep = scale_sweep(&sv, &rk);
            (NeighborhoodSpec::Knn(k.unwrap_or(sweep.k_optimum())), Some(sweep))
        }
    };
    let net = build_network(&sv, &rk, &spec)?;

    let boot = match (args.bootstraps, args.seed) {
        (Some(b), Some(seed)) => Some(bootstrap_standards(&r, b, seed)?),
        _ => None,
    };
    let text = match args.format {
        Format::Dot => export_dot(r.labels(), &net, &sv),
        _ => {
            let robustness = Robustness {
                bootstrap: boot.as_ref(),
                outliers: None,
            };
            Report::new(
                r.labels(),
                args.scoring.tie_policy,
                &sv,
                &net,
                sweep.as_ref(),
                robustness,
            )
            .to_json()
        }
    };
    emit(args.out.as_deref(), &text)?;
    summary(format!(
        "standard {}, {} exemplars, {}",
        r.labels()[standard(&sv)],
        net.exemplars().len(),
        spec.k().map_or("graph neighborhoods".to_owned(), |k| format!("k={k}"))
    ));
    Ok(())
}

fn sweep(args: &SweepArgs) -> Outcome {
    only(args.format, &[Format::Csv, Format::Json])?;
    let r = load_relation(&args.scoring.input.input, args.scoring.input.labels)?;
    let rk = rank_table(&r, args.scoring.tie_policy);
    let sv = aggregated_scores(&rk);
    let sweep = scale_sweep(&sv, &rk);
    let k = sweep.k_optimum();

    let text = match args.format {
        Format::Csv => sweep_csv(&sweep),
        _ => {
            let net = build_network(&sv, &rk, &NeighborhoodSpec::Knn(k))?;
            Report::new(
                r.labels(),
                args.scoring.tie_policy,
                &sv,
                &net,
                Some(&sweep),
                Robustness::default(),
            )
            .to_json()
        }
    };
    emit(args.out.as_deref(), &text)?;
    if let Some(path) = &args.durations {
        emit(Some(path), &durations_csv(r.labels(), &sweep))?;
    }
    summary(format!(
        "standard {}, {} exemplars, k={k} (optimal)",
        r.labels()[standard(&sv)],
        sweep.count(k)
    ));
    Ok(())
}

fn bootstrap(args: &BootstrapArgs) -> Outcome {
    let seed = args.seed.expect("clap enforces --seed");
    let r = load_relation(&args.input.input, args.input.labels)?;
    let rep = bootstrap_standards(&r, args.bootstraps, seed)?;
    let mut text = serde_json::to_string_pretty(&rep).expect("report serializes");
    text.push('\n');
    emit(args.out.as_deref(), &text)?;
    summary(format!(
        "mode standard {} ({:.1}% of {} bootstraps), {:.1}% never selected",
        r.labels()[rep.mode_object()],
        100.0 * rep.mode_frequency(),
        rep.bootstraps(),
        100.0 * rep.never_selected_fraction()
    ));
    Ok(())
}

fn outliers(args: &OutlierArgs) -> Outcome {
    let seed = args.seed.expect("clap enforces --seed");
    let points = load_points(&args.input, args.labels)?;
    let config = OutlierConfig {
        step: args.step,
        cap_percent: args.cap_percent,
        bootstraps: args.bootstraps,
        exclusion: match args.exclusion {
            ExclusionArg::Rect => Exclusion::OutsideRectangle,
            ExclusionArg::Both => Exclusion::BothCoordinates,
        },
        ..OutlierConfig::default()
    };
    let rep = outlier_experiment(&points, args.mode, seed, &config)?;
    let mut text = serde_json::to_string_pretty(&rep).expect("report serializes");
    text.push('\n');
    emit(args.out.as_deref(), &text)?;
    summary(format!(
        "{} outliers: standard kept for {}% of n",
        rep.mode, rep.tolerance_percent
    ));
    Ok(())
}

fn relation_text(r: &RelationMatrix) -> String {
    let mut buf = Vec::new();
    r.write_csv(&mut buf, true).expect("writing to memory");
    String::from_utf8(buf).expect("labels are UTF-8")
}

fn coauthor_tables(co: &CoauthorRelation) -> (String, String) {
    let labels = co.labels();
    let mut affinity = String::from("label");
    for l in labels {
        let _ = write!(affinity, ",{}", quote(l));
    }
    affinity.push('\n');
    for (l, row) in labels.iter().zip(co.affinity_rows()) {
        affinity.push_str(&quote(l));
        for v in row {
            let _ = write!(affinity, ",{v}");
        }
        affinity.push('\n');
    }
    let mut graph = String::new();
    for (x, l) in labels.iter().enumerate() {
        let names: Vec<&str> = co.adjacency.neighbors(x).iter().map(|&y| labels[y].as_str()).collect();
        if names.is_empty() {
            let _ = writeln!(graph, "{l}:");
        } else {
            let _ = writeln!(graph, "{l}: {}", names.join(","));
        }
    }
    (affinity, graph)
}

fn relation(cmd: RelationCommand) -> Outcome {
    match cmd {
        RelationCommand::Euclid { points, labels, out } => {
            let r = euclidean_relation(&load_points(&points, labels)?)?;
            emit(out.as_deref(), &relation_text(&r))?;
            summary(format!("euclidean relation over {} points", r.len()));
        }
        RelationCommand::Hausdorff { images, out } => {
            let images = images.iter().map(|p| load_pbm(p)).collect::<Result<Vec<_>, _>>()?;
            let r = hausdorff_relation(&images)?;
            emit(out.as_deref(), &relation_text(&r))?;
            summary(format!(
                "hausdorff relation over {} images ({})",
                r.len(),
                if r.is_symmetric() { "symmetric" } else { "asymmetric" }
            ));
        }
        RelationCommand::Coauthor {
            publications,
            out,
            affinity,
            graph_out,
        } => {
            let co = coauthor_relation(&load_publications(&publications)?)?;
            emit(out.as_deref(), &relation_text(&co.relation))?;
            let (aff, graph) = coauthor_tables(&co);
            if let Some(path) = affinity {
                emit(Some(&path), &aff)?;
            }
            if let Some(path) = graph_out {
                emit(Some(&path), &graph)?;
            }
            summary(format!("co-author relation over {} authors", co.labels().len()));
        }
    }
    Ok(())
}
