use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;

use doa_core::bench::{by_name, cart_pole_closed_loop, Benchmark};
use doa_core::brs::{check_safe_attraction, grid_section, simulate, GridSpec};
use doa_core::fmt::float17;
use doa_core::initroa::{build_initial_roa, check_box_in_safe_set, default_epsilon, BoxCheck};
use doa_core::interval::HyperRect;
use doa_core::linalg::Matrix;

use crate::args::{CheckArgs, InitialRoaArgs, SectionArgs, SimulateArgs};
use crate::certfile::{to_json_string, CertificateFile};
use crate::config::{parse_float_list, parse_points, RunConfig};
use crate::error::CliError;

fn resolve_system(
    name: Option<String>,
    gain: Option<Vec<f64>>,
) -> Result<(String, Option<Vec<f64>>, Benchmark), CliError> {
    let name = name.ok_or_else(|| CliError::usage("--system is required"))?;
    match gain {
        Some(gain) => {
            if name != "cart_pole" {
                return Err(CliError::usage("--gain only applies to cart_pole"));
            }
            let bench = cart_pole_closed_loop(Some(Matrix::row_vector(&gain)))?;
            Ok((name, Some(gain), bench))
        }
        None => Ok((name.clone(), None, by_name(&name)?)),
    }
}

/// Q from a flat list: n entries for a diagonal, n*n row-major for full.
fn parse_q(values: Vec<f64>, n: usize) -> Result<Matrix, CliError> {
    if values.len() == n {
        Ok(Matrix::diag(&values))
    } else if values.len() == n * n {
        Ok(Matrix::try_new(n, n, values)?)
    } else {
        Err(CliError::usage(format!(
            "--q needs {n} (diagonal) or {} (full) values, got {}",
            n * n,
            values.len()
        )))
    }
}

fn gain_from(flag: Option<String>, config: Option<Vec<f64>>) -> Result<Option<Vec<f64>>, CliError> {
    match flag {
        Some(text) => Ok(Some(parse_float_list(&text, "--gain")?)),
        None => Ok(config),
    }
}

pub fn cmd_initial_roa(args: InitialRoaArgs) -> Result<(), CliError> {
    let config = RunConfig::load(args.common.config.as_deref())?;
    let gain = gain_from(args.gain, config.gain)?;
    let (name, gain, bench) = resolve_system(args.system.or(config.system), gain)?;
    let n = bench.system.dim();

    let q = match args
        .q
        .map(|t| parse_float_list(&t, "--q"))
        .transpose()?
        .or(config.q)
    {
        Some(values) => parse_q(values, n)?,
        None => Matrix::identity(n),
    };
    let region = match args
        .b
        .map(|t| parse_float_list(&t, "--b"))
        .transpose()?
        .or(config.b)
    {
        Some(radii) => HyperRect::new(radii)?,
        None => bench.region.clone(),
    };
    let epsilon = match args.epsilon.or(config.epsilon) {
        Some(e) => e,
        None => default_epsilon(&q)?,
    };
    let depth = args.depth.or(config.depth).unwrap_or(0);
    let out = args
        .out
        .or(config.out)
        .unwrap_or_else(|| PathBuf::from(format!("{name}.doa.json")));

    match check_box_in_safe_set(&bench.safe_set, &region)? {
        BoxCheck::VerifiedAtVertices => {}
        BoxCheck::Skipped => eprintln!(
            "warning: safe-set function is not convex; containment of the box was not verified"
        ),
    }

    let report = build_initial_roa(bench.system.as_ref(), &region, &q, epsilon)?;
    println!("c       = {}", float17(report.c));
    println!(
        "c1      = {}",
        if report.c1.is_finite() {
            float17(report.c1)
        } else {
            "unconstrained".to_string()
        }
    );
    println!("c2      = {}", float17(report.c2));
    println!("lmin(P) = {}", float17(report.lambda_min_p));
    println!(
        "binding = {}",
        match report.binding {
            doa_core::initroa::BindingConstraint::Decrease => "decrease",
            doa_core::initroa::BindingConstraint::Containment => "containment",
        }
    );

    let file = CertificateFile::new(&name, gain, depth, &bench.safe_set, &report)?;
    file.save(&out)?;
    println!("wrote {}", out.display());
    Ok(())
}

#[derive(Serialize)]
struct Verdict<'a> {
    point: &'a [f64],
    value: Option<f64>,
    divergent: bool,
    member: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    depth: Option<Option<usize>>,
}

pub fn cmd_check(args: CheckArgs) -> Result<(), CliError> {
    let config = RunConfig::load(args.common.config.as_deref())?;
    let cert_path = args
        .cert
        .or(config.cert)
        .ok_or_else(|| CliError::usage("certificate file argument is required"))?;
    let file = CertificateFile::load(&cert_path)?;
    let cert = file.certificate(args.depth.or(config.depth))?;
    let dim = cert.system().dim();

    let spec = args
        .points
        .or(config.points)
        .ok_or_else(|| CliError::usage("--points is required"))?;
    let points = parse_points(&spec, dim)?;
    let depth_scan = args.depth_scan.or(config.depth_scan);

    let mut sink: Box<dyn Write> = match args.out.or(config.out) {
        Some(path) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(&path)
                .map_err(|e| CliError::io(format!("cannot create {}: {e}", path.display())))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    };

    for point in &points {
        let value = cert.eval_vk(point)?;
        let divergent = value.is_infinite();
        let depth = match depth_scan {
            Some(k_max) => Some(cert.certificate_depth(point, k_max)?),
            None => None,
        };
        let verdict = Verdict {
            point,
            value: (!divergent).then_some(value),
            divergent,
            member: value <= 1.0,
            depth,
        };
        let line = to_json_string(&verdict)?;
        writeln!(sink, "{line}").map_err(CliError::io)?;
    }
    sink.flush().map_err(CliError::io)?;
    Ok(())
}

pub fn cmd_section(args: SectionArgs) -> Result<(), CliError> {
    let config = RunConfig::load(args.common.config.as_deref())?;
    let cert_path = args
        .cert
        .or(config.cert)
        .ok_or_else(|| CliError::usage("certificate file argument is required"))?;
    let file = CertificateFile::load(&cert_path)?;
    let cert = file.certificate(args.depth.or(config.depth))?;
    let dim = cert.system().dim();

    let axes = args
        .axes
        .or(config.axes)
        .ok_or_else(|| CliError::usage("--axes is required"))?;
    let range = args
        .range
        .or(config.range)
        .ok_or_else(|| CliError::usage("--range is required"))?;
    let res = args
        .res
        .or(config.res)
        .ok_or_else(|| CliError::usage("--res is required"))?;
    if axes.len() != 2 || range.len() != 4 || res.len() != 2 {
        return Err(CliError::usage("--axes takes 2 values, --range 4, --res 2"));
    }
    let fixed = match args
        .fixed
        .map(|t| parse_float_list(&t, "--fixed"))
        .transpose()?
        .or(config.fixed)
    {
        Some(values) => {
            if values.len() != dim {
                return Err(CliError::usage(format!(
                    "--fixed needs {dim} values, got {}",
                    values.len()
                )));
            }
            values
        }
        None => vec![0.0; dim],
    };
    let out = args
        .out
        .or(config.out)
        .ok_or_else(|| CliError::usage("--out is required"))?;

    let spec = GridSpec {
        axes: (axes[0], axes[1]),
        fixed,
        ranges: ((range[0], range[1]), (range[2], range[3])),
        resolution: (res[0], res[1]),
    };

    let grid = match section_threads()? {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| CliError::io(format!("thread pool: {e}")))?;
            pool.install(|| grid_section(&cert, &spec))?
        }
        None => grid_section(&cert, &spec)?,
    };

    let file = std::fs::File::create(&out)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", out.display())))?;
    let mut writer = std::io::BufWriter::new(file);
    grid.write_csv(&mut writer).map_err(CliError::io)?;
    writer.flush().map_err(CliError::io)?;
    println!("members: {} / {}", grid.member_count(), grid.values.len());
    println!("wrote {}", out.display());
    Ok(())
}

/// Section parallelism cap from `DOA_THREADS` (unset or 0 means automatic).
fn section_threads() -> Result<Option<usize>, CliError> {
    match std::env::var("DOA_THREADS") {
        Ok(text) => {
            let threads: usize = text
                .parse()
                .map_err(|_| CliError::usage(format!("DOA_THREADS: invalid value '{text}'")))?;
            Ok((threads > 0).then_some(threads))
        }
        Err(_) => Ok(None),
    }
}

pub fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let config = RunConfig::load(args.common.config.as_deref())?;
    let gain = gain_from(args.gain, config.gain)?;
    let (_, _, bench) = resolve_system(args.system.or(config.system), gain)?;
    let dim = bench.system.dim();

    let x0 = match args.x0 {
        Some(text) => parse_float_list(&text, "--x0")?,
        None => config
            .x0
            .ok_or_else(|| CliError::usage("--x0 is required"))?,
    };
    if x0.len() != dim {
        return Err(CliError::usage(format!(
            "--x0 needs {dim} coordinates, got {}",
            x0.len()
        )));
    }
    let steps = args.steps.or(config.steps).unwrap_or(400);
    let conv_tol = args.conv_tol.or(config.conv_tol).unwrap_or(1e-3);

    let traj = simulate(bench.system.as_ref(), &x0, steps)?;
    let verdict = check_safe_attraction(&traj, &bench.safe_set, conv_tol)?;

    if let Some(path) = args.out.or(config.out) {
        let file = std::fs::File::create(&path)
            .map_err(|e| CliError::io(format!("cannot create {}: {e}", path.display())))?;
        let mut writer = std::io::BufWriter::new(file);
        write!(writer, "step").map_err(CliError::io)?;
        for i in 1..=dim {
            write!(writer, ",x{i}").map_err(CliError::io)?;
        }
        writeln!(writer, ",theta").map_err(CliError::io)?;
        for (step, state) in traj.states().iter().enumerate() {
            write!(writer, "{step}").map_err(CliError::io)?;
            for value in state {
                write!(writer, ",{}", float17(*value)).map_err(CliError::io)?;
            }
            writeln!(writer, ",{}", float17(bench.safe_set.eval(state)?)).map_err(CliError::io)?;
        }
        writer.flush().map_err(CliError::io)?;
        println!("wrote {}", path.display());
    }

    println!(
        "safe={} attracted={} first_violation={} diverged={}",
        verdict.safe,
        verdict.attracted,
        verdict
            .first_violation
            .map_or("none".to_string(), |k| k.to_string()),
        traj.diverged_at()
            .map_or("none".to_string(), |k| k.to_string()),
    );
    Ok(())
}
