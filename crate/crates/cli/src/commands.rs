//! Implementations of the four subcommands.
//!
//! Each command that writes files also writes a `key=value` manifest next
//! to them; re-running a command with the flags recorded in a manifest
//! reproduces every output byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use matbp::datagen::{sample_training_set, MixtureConfig};
use matbp::rng::NormalSource;
use matbp::{
    chain_rule_gradient, finite_difference_gradient, forward as forward_pass, full_gradient,
    gradient_descent, init_weights, DiffScheme, FiniteDiffConfig, ForwardTrace, NetworkSpec,
    TrainConfig, TrainMode, Vector,
};

use crate::fmtio::{
    dataset_from_csv, dataset_to_csv, dims_to_string, fmt_f64, weights_from_text, weights_to_text,
    write_manifest, write_text,
};
use crate::{
    parse_dims, parse_vector, resolve_seed, ForwardArgs, GradcheckArgs, SampleDataArgs, TraceFormat,
    TrainArgs,
};

pub fn sample_data(args: SampleDataArgs) -> Result<u8, String> {
    let seed = resolve_seed(args.seed)?;
    let mu0 = parse_pair(&args.mu0, "--mu0")?;
    let mu1 = parse_pair(&args.mu1, "--mu1")?;
    let cfg = MixtureConfig::new(args.n, mu0, mu1, args.sigma_scale, seed)
        .map_err(|e| e.to_string())?;
    let set = sample_training_set(&cfg);

    let out = PathBuf::from(&args.out);
    write_text(&out, &dataset_to_csv(&set))?;
    write_manifest(
        &manifest_path(&out),
        &[
            ("command", "sample-data".into()),
            ("n", args.n.to_string()),
            ("seed", seed.to_string()),
            ("mu0", format!("{},{}", fmt_f64(mu0[0]), fmt_f64(mu0[1]))),
            ("mu1", format!("{},{}", fmt_f64(mu1[0]), fmt_f64(mu1[1]))),
            ("sigma_scale", fmt_f64(args.sigma_scale)),
            ("out", args.out.clone()),
        ],
    )?;
    println!("wrote {} exemplars to {}", args.n, args.out);
    Ok(0)
}

pub fn gradcheck(args: GradcheckArgs) -> Result<u8, String> {
    let seed = resolve_seed(args.seed)?;
    let spec = args.network.build_spec()?;
    let kind = args.network.cost.to_kind();
    let fd_cfg = FiniteDiffConfig::new(args.epsilon, DiffScheme::Central).map_err(|e| e.to_string())?;

    // Rectifier derivatives are discontinuous at zero; resample the seeded
    // configuration until every potential is clear of the kink band, so the
    // difference quotient compares against a locally smooth function.
    let needs_kink_margin = matches!(
        spec.activation(),
        matbp::ActivationKind::ReLU | matbp::ActivationKind::LeakyReLU { .. }
    );
    let mut attempt: u64 = 0;
    let (weights_vec, x, y) = loop {
        let trial_seed = seed.wrapping_add(attempt);
        let wv = init_weights(&spec, trial_seed);
        let mut src = NormalSource::new(trial_seed ^ 0x5eed_da7a);
        let x = Vector::from_fn(spec.input_dim(), |_| src.next_normal());
        let y = Vector::from_fn(spec.output_dim(), |_| src.next_uniform());
        let weights = wv.unflatten();
        let trace = forward_pass(&spec, &weights, &x).map_err(|e| e.to_string())?;
        let clear = !needs_kink_margin
            || (1..=spec.layer_count())
                .all(|l| trace.potential(l).iter().all(|&z| z.abs() >= 1e-3));
        if clear {
            if attempt > 0 {
                println!("note: resampled {attempt} time(s) to keep potentials away from rectifier kinks");
            }
            break (weights, x, y);
        }
        attempt += 1;
        if attempt >= 1000 {
            return Err("could not find a kink-free configuration after 1000 resamples".into());
        }
    };

    let bp = full_gradient(&spec, &weights_vec, kind, &x, &y).map_err(|e| e.to_string())?;
    let fd = finite_difference_gradient(&spec, &weights_vec, kind, &x, &y, &fd_cfg)
        .map_err(|e| e.to_string())?;

    println!(
        "gradcheck: dims={} activation={} cost={} seed={seed}",
        dims_to_string(spec.dims()),
        args.network.activation.name(),
        args.network.cost.name()
    );

    let mut max_chain_err: f64 = 0.0;
    let mut max_fd_err: f64 = 0.0;
    for l in 1..=spec.layer_count() {
        let chain =
            chain_rule_gradient(&spec, &weights_vec, kind, &x, &y, l).map_err(|e| e.to_string())?;
        let bp_block = Vector::from_slice(bp.layer_block(l));
        let fd_block = Vector::from_slice(fd.layer_block(l));
        let chain_err = bp_block.max_abs_diff(&chain);
        let fd_err = bp_block.max_abs_diff(&fd_block);
        max_chain_err = max_chain_err.max(chain_err);
        max_fd_err = max_fd_err.max(fd_err);
        println!("layer {l}: |bp - chain| = {chain_err:.3e}   |bp - fd| = {fd_err:.3e}");
    }
    println!(
        "global : |bp - chain| = {max_chain_err:.3e}   |bp - fd| = {max_fd_err:.3e}   (tolerances {:.1e}, {:.1e})",
        args.bp_tol, args.fd_tol
    );

    if max_chain_err <= args.bp_tol && max_fd_err <= args.fd_tol {
        println!("result : PASS");
        Ok(0)
    } else {
        println!("result : FAIL");
        Ok(1)
    }
}

pub fn train(args: TrainArgs) -> Result<u8, String> {
    let seed = resolve_seed(args.seed)?;
    let spec = args.network.build_spec()?;
    let kind = args.network.cost.to_kind();

    let raw = fs::read_to_string(&args.data)
        .map_err(|e| format!("cannot read {}: {e}", args.data))?;
    let set = dataset_from_csv(&raw, &spec)?;

    let subset_seed = seed.wrapping_add(1);
    let mode = match args.batch_size {
        None => TrainMode::Batch,
        Some(batch_size) => TrainMode::Stochastic { batch_size, rng_seed: subset_seed },
    };
    let cfg = TrainConfig::new(args.alpha, args.iters, mode, true).map_err(|e| e.to_string())?;

    let init = init_weights(&spec, seed);
    let (final_weights, record) =
        gradient_descent(&init, kind, &set, &cfg).map_err(|e| e.to_string())?;

    let p = spec.param_count();
    let prefix = &args.out_prefix;
    let metrics_path = PathBuf::from(format!("{prefix}_metrics.csv"));
    let displacement_path = PathBuf::from(format!("{prefix}_displacement.csv"));
    let gradient_path = PathBuf::from(format!("{prefix}_gradient.csv"));
    let weights_path = PathBuf::from(format!("{prefix}_weights.txt"));

    let mut metrics = String::from("iter,cost,grad_norm,accuracy\n");
    let mut displacement = format!("iter,{}\n", wide_header("d", p));
    let mut gradient = format!("iter,{}\n", wide_header("g", p));
    for (j, row) in record.iter().enumerate() {
        writeln!(
            metrics,
            "{j},{},{},{}",
            fmt_f64(row.cost),
            fmt_f64(row.gradient_norm),
            fmt_f64(row.accuracy)
        )
        .unwrap();
        writeln!(displacement, "{j},{}", wide_row(row.displacement.as_slice())).unwrap();
        writeln!(gradient, "{j},{}", wide_row(row.gradient.as_slice())).unwrap();
    }

    write_text(&metrics_path, &metrics)?;
    write_text(&displacement_path, &displacement)?;
    write_text(&gradient_path, &gradient)?;
    write_text(&weights_path, &weights_to_text(&final_weights))?;

    let batch_entry = match args.batch_size {
        None => "full".to_string(),
        Some(b) => b.to_string(),
    };
    write_manifest(
        &PathBuf::from(format!("{prefix}.manifest")),
        &[
            ("command", "train".into()),
            ("data", args.data.clone()),
            ("dims", dims_to_string(spec.dims())),
            ("activation", args.network.activation.name().into()),
            ("cost", args.network.cost.name().into()),
            ("alpha", fmt_f64(args.alpha)),
            ("iterations", args.iters.to_string()),
            ("batch_size", batch_entry),
            ("seed", seed.to_string()),
            ("subset_seed", subset_seed.to_string()),
            ("metrics", metrics_path.display().to_string()),
            ("displacement", displacement_path.display().to_string()),
            ("gradient", gradient_path.display().to_string()),
            ("weights", weights_path.display().to_string()),
        ],
    )?;

    let last = record.record(record.len() - 1);
    println!(
        "trained {} iterations on {} exemplars: cost {} -> {}, accuracy {} -> {}",
        args.iters,
        set.len(),
        fmt_f64(record.record(0).cost),
        fmt_f64(last.cost),
        record.record(0).accuracy,
        last.accuracy
    );
    println!(
        "wrote {} {} {} {}",
        metrics_path.display(),
        displacement_path.display(),
        gradient_path.display(),
        weights_path.display()
    );
    Ok(0)
}

pub fn forward(args: ForwardArgs) -> Result<u8, String> {
    let dims = parse_dims(&args.dims)?;
    let spec = NetworkSpec::new(dims, args.activation.to_kind(args.leaky_slope))
        .map_err(|e| e.to_string())?;
    let x = Vector::from_vec(parse_vector(&args.x, "--x")?);

    let seed = resolve_seed(args.seed)?;
    let (weights, weight_source) = match &args.weights {
        Some(path) => {
            let raw =
                fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
            (weights_from_text(&raw, &spec)?, path.clone())
        }
        None => (init_weights(&spec, seed), format!("seed:{seed}")),
    };

    let trace =
        forward_pass(&spec, &weights.unflatten(), &x).map_err(|e| e.to_string())?;
    let rendered = match args.format {
        TraceFormat::Text => render_trace_text(&spec, &trace),
        TraceFormat::Csv => render_trace_csv(&trace),
    };

    match &args.out {
        None => print!("{rendered}"),
        Some(out) => {
            let out_path = PathBuf::from(out);
            write_text(&out_path, &rendered)?;
            write_manifest(
                &manifest_path(&out_path),
                &[
                    ("command", "forward".into()),
                    ("dims", dims_to_string(spec.dims())),
                    ("activation", args.activation.name().into()),
                    ("x", args.x.clone()),
                    ("weights", weight_source),
                    ("format", format!("{:?}", args.format).to_lowercase()),
                    ("out", out.clone()),
                ],
            )?;
            println!("wrote trace to {out}");
        }
    }
    Ok(0)
}

/// Augmented activations feed every hidden potential, so layers below the
/// output print with the trailing constant 1.
fn render_trace_text(spec: &NetworkSpec, trace: &ForwardTrace) -> String {
    let k = trace.layer_count();
    let mut out = format!("forward trace: dims={}\n", dims_to_string(spec.dims()));
    writeln!(out, "layer 0  a+ = {}", bracketed(&trace.activation(0).augment())).unwrap();
    for l in 1..=k {
        writeln!(out, "layer {l}  z  = {}", bracketed(trace.potential(l))).unwrap();
        if l < k {
            writeln!(out, "layer {l}  a+ = {}", bracketed(&trace.activation(l).augment())).unwrap();
        } else {
            writeln!(out, "layer {l}  a  = {}", bracketed(trace.activation(l))).unwrap();
        }
    }
    out
}

fn render_trace_csv(trace: &ForwardTrace) -> String {
    let k = trace.layer_count();
    let mut out = String::from("quantity,layer,index,value\n");
    let mut push = |name: &str, layer: usize, v: &Vector| {
        for i in 0..v.dim() {
            writeln!(out, "{name},{layer},{},{}", i + 1, fmt_f64(v[i])).unwrap();
        }
    };
    push("a_aug", 0, &trace.activation(0).augment());
    for l in 1..=k {
        push("z", l, trace.potential(l));
        if l < k {
            push("a_aug", l, &trace.activation(l).augment());
        } else {
            push("a", l, trace.activation(l));
        }
    }
    out
}

fn bracketed(v: &Vector) -> String {
    let parts: Vec<String> = v.iter().map(|&e| fmt_f64(e)).collect();
    format!("[ {} ]", parts.join("  "))
}

fn wide_header(prefix: &str, p: usize) -> String {
    (1..=p).map(|i| format!("{prefix}{i}")).collect::<Vec<_>>().join(",")
}

fn wide_row(values: &[f64]) -> String {
    values.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(",")
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest");
    PathBuf::from(name)
}

fn parse_pair(raw: &str, what: &str) -> Result<[f64; 2], String> {
    let values = parse_vector(raw, what)?;
    if values.len() != 2 {
        return Err(format!("{what} must have exactly 2 components"));
    }
    Ok([values[0], values[1]])
}
