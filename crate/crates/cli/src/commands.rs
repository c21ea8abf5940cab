use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use grnf::experiments::{run_accuracy_vs_m, AccuracySettings, Classifier};
use grnf::generators::{delaunay_classification, sbm_generate, DelaunayTask, SbmParams};
use grnf::io::{parse_graph_json, read_corpus, write_corpus, write_graph_json, LabeledGraph};
use grnf::maps::Normalization;
use grnf::metrics::{
    convergence_diagnostics, distance_estimate, embedding_dim_for, gram_matrix, BoundKind,
    ConvergenceSettings,
};
use grnf::{
    build_grnf, build_weighted_grnf, Activation, DistributionConfig, Graph, GrnfError, GrnfMap,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::args::*;

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    GrnfError::InvalidArgument(msg.into()).into()
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn write_graphs(out: &OutputArgs, records: &[LabeledGraph]) -> Result<()> {
    if !out.per_graph {
        return write_file(&out.out, &write_corpus(records));
    }
    fs::create_dir_all(&out.out).with_context(|| format!("creating {}", out.out.display()))?;
    let mut labels = String::new();
    for (i, r) in records.iter().enumerate() {
        write_file(
            &out.out.join(format!("graph_{i:05}.json")),
            &write_graph_json(&r.graph),
        )?;
        writeln!(labels, "{}", r.label).expect("writing to a string");
    }
    write_file(&out.out.join("labels.txt"), &labels)
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path)
        .map_err(|e| GrnfError::MissingFile(format!("{}: {e}", path.display())))?;
    Ok(parse_graph_json(&text)?)
}

fn labelled(graphs: Vec<Graph>, labels: impl IntoIterator<Item = i64>) -> Vec<LabeledGraph> {
    graphs
        .into_iter()
        .zip(labels)
        .map(|(graph, label)| LabeledGraph { graph, label })
        .collect()
}

pub fn gen(cmd: GenCommand) -> Result<()> {
    match cmd {
        GenCommand::Sbm(a) => {
            let params = SbmParams {
                n: a.n,
                blocks: a.blocks,
                p_in: a.p_in,
                p_out: a.p_out,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let graphs = sbm_generate(&params, a.count, &mut rng)?;
            write_graphs(&a.output, &labelled(graphs, std::iter::repeat(a.label)))
        }
        GenCommand::Delaunay(a) => {
            let mut task = DelaunayTask::new(a.classes, a.seeds_per_class);
            task.params.points_per_graph = a.points;
            task.params.noise_sigma = a.noise;
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let (graphs, labels) = delaunay_classification(&task, a.count, &mut rng)?;
            write_graphs(&a.output, &labelled(graphs, labels))
        }
    }
}

fn config(d: &DistArgs, channels: usize) -> DistributionConfig {
    let act = |a: ActivationArg| match a {
        ActivationArg::Sigmoid => Activation::Sigmoid,
        ActivationArg::Tanh => Activation::Tanh,
        ActivationArg::Relu => Activation::Relu,
    };
    DistributionConfig {
        lambda: d.lambda,
        k_max: d.kmax,
        sigma: d.sigma,
        activation_e: act(d.activation_e),
        activation_i: act(d.activation_i),
        normalization: match d.norm {
            NormArg::Mean => Normalization::Mean,
            NormArg::Sum => Normalization::Sum,
        },
        channels,
    }
}

/// Channel count covering every graph.
fn channels<'a>(graphs: impl IntoIterator<Item = &'a Graph>) -> usize {
    graphs.into_iter().map(Graph::channels).max().unwrap_or(1)
}

fn corpus(path: &Path) -> Result<(Vec<Graph>, Vec<i64>)> {
    let records = read_corpus(path)?;
    if records.is_empty() {
        return Err(invalid(format!("{} holds no graphs", path.display())));
    }
    Ok(records.into_iter().map(|r| (r.graph, r.label)).unzip())
}

fn push_row(out: &mut String, head: &str, values: &[f64]) {
    out.push_str(head);
    for v in values {
        write!(out, ",{v}").expect("writing to a string");
    }
    out.push('\n');
}

pub fn embed(a: EmbedArgs) -> Result<()> {
    let (graphs, labels) = corpus(&a.input)?;
    let target = config(&a.dist, channels(&graphs));
    let map = if a.weighted {
        let proposal = DistributionConfig {
            sigma: a.proposal_sigma.expect("required by clap"),
            lambda: a.proposal_lambda.unwrap_or(target.lambda),
            ..target.clone()
        };
        build_weighted_grnf(a.m, &target, &proposal, a.seed)?
    } else {
        if a.proposal_sigma.is_some() || a.proposal_lambda.is_some() {
            return Err(invalid("proposal options need --weighted"));
        }
        build_grnf(a.m, &target, a.seed)?
    };
    let z = map.embed_many(&graphs)?;
    let mut out = String::from("index,label");
    for j in 0..a.m {
        write!(out, ",z_{j}").expect("writing to a string");
    }
    out.push('\n');
    for (i, (row, label)) in z.iter().zip(&labels).enumerate() {
        push_row(&mut out, &format!("{i},{label}"), row);
    }
    write_file(&a.out, &out)?;
    if let Some(path) = &a.save_map {
        map.save(path)?;
    }
    Ok(())
}

pub fn dim(a: DimArgs) -> Result<()> {
    let kind = match a.kind {
        BoundArg::Distance => BoundKind::Distance,
        BoundArg::Kernel => BoundKind::Kernel,
    };
    println!("{}", embedding_dim_for(a.epsilon, a.delta, kind)?);
    Ok(())
}

pub fn distance(a: DistanceArgs) -> Result<()> {
    let map = GrnfMap::load(&a.map)?;
    let (g1, g2) = (read_graph(&a.g1)?, read_graph(&a.g2)?);
    let d = distance_estimate(&map.embed(&g1)?, &map.embed(&g2)?)?;
    println!("M,distance,squared_distance");
    println!("{},{},{}", d.m, d.value, d.squared);
    Ok(())
}

pub fn gram(a: GramArgs) -> Result<()> {
    let map = GrnfMap::load(&a.map)?;
    let (graphs, _) = corpus(&a.input)?;
    let gram = gram_matrix(&map, &graphs)?;
    let mut out = String::from("id");
    for id in gram.ids() {
        write!(out, ",{id}").expect("writing to a string");
    }
    out.push('\n');
    for (id, row) in gram.ids().iter().zip(gram.rows()) {
        push_row(&mut out, id, row);
    }
    write_file(&a.out, &out)
}

pub fn experiment(cmd: ExperimentCommand) -> Result<()> {
    match cmd {
        ExperimentCommand::Convergence(a) => {
            let (g1, g2) = (read_graph(&a.g1)?, read_graph(&a.g2)?);
            let settings = ConvergenceSettings {
                m_grid: a.mgrid,
                reference_m: a.ref_m,
                trials: a.trials,
                seed: a.seed,
                epsilon: a.epsilon,
                config: config(&a.dist, channels([&g1, &g2])),
            };
            let table = convergence_diagnostics(&g1, &g2, &settings)?;
            log::info!(
                "reference squared distance {}, epsilon {}",
                table.reference_distance,
                table.epsilon
            );
            write_file(&a.out, &table.to_csv())
        }
        ExperimentCommand::Accuracy(a) => {
            let (graphs, labels) = corpus(&a.input)?;
            let classifier = match a.classifier {
                ClassifierArg::Knn => Classifier::Knn { k: a.k },
                ClassifierArg::Ridge => Classifier::Ridge {
                    lambda: a.ridge_lambda,
                },
            };
            let settings = AccuracySettings {
                m_grid: a.mgrid,
                reference_m: (a.ref_m > 0).then_some(a.ref_m),
                reps: a.reps,
                seed: a.seed,
                split: a.split,
                classifier,
                config: config(&a.dist, channels(&graphs)),
            };
            let table = run_accuracy_vs_m(&graphs, &labels, &settings)?;
            write_file(&a.out, &table.to_csv())
        }
    }
}
