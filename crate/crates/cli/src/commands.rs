use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2};
use sfista_core::harness::{blur_psf, parse_suite, run_case, BlurKind, BlurLevel, BENCH_HEADER};
use sfista_core::image::{unvec, vec_of};
use sfista_core::imaging::{
    add_noise, generate_image, read_image, read_psf, relative_error, relative_residual, write_image,
    write_psf, ImageKind, NoiseKind, NoiseSpec,
};
use sfista_core::solvers::{
    choose_lambda_auto, estimate_lipschitz, fista_monitored, sfista_monitored, write_history_csv, Probe,
};
use sfista_core::{blur_direct, BoundaryCondition, Error, KronDecomposition, Psf, Result, SolveConfig};

use crate::outputs::Outputs;
use crate::{BenchArgs, BlurArgs, DecomposeArgs, GenImageArgs, GenPsfArgs, RestoreArgs};

const LIPSCHITZ_ITERS: usize = 30;

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T> {
    s.parse()
}

/// Attach the path to bare I/O errors so the diagnostic names the file.
fn at<T>(r: Result<T>, path: &Path) -> Result<T> {
    r.map_err(|e| match e {
        Error::Io(io) => Error::Argument(format!("{}: {io}", path.display())),
        other => other,
    })
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    at(fs::File::create(path).map(BufWriter::new).map_err(Error::from), path)
}

fn meta_path(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

fn read_meta(p: &Path) -> Result<HashMap<String, String>> {
    let path = meta_path(p);
    if !path.exists() {
        return Ok(HashMap::new());
    }
    let text = at(fs::read_to_string(&path).map_err(Error::from), &path)?;
    let mut map = HashMap::new();
    let mut offset = 0;
    for line in text.lines() {
        let t = line.trim();
        if !t.is_empty() && !t.starts_with('#') {
            let (k, v) = t.split_once('=').ok_or_else(|| Error::Format {
                offset,
                msg: format!("{}: expected key=value", path.display()),
            })?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        offset += line.len() + 1;
    }
    Ok(map)
}

fn parse_terms(s: &str, full: usize) -> Result<usize> {
    if s == "full" {
        return Ok(full);
    }
    match s.parse::<usize>() {
        Ok(k) if k >= 1 => Ok(k),
        _ => Err(Error::Argument(format!("-s expects a positive integer or `full`, got `{s}`"))),
    }
}

pub fn blur(a: BlurArgs) -> Result<()> {
    let bc: BoundaryCondition = parse(&a.bc)?;
    let noise = match a.noise.as_str() {
        "none" => None,
        k => Some(parse::<NoiseKind>(k)?),
    };
    if !(a.noise_level.is_finite() && a.noise_level >= 0.0) {
        return Err(Error::Argument(format!("--noise-level must be nonnegative, got {}", a.noise_level)));
    }
    let x = at(read_image(&a.image), &a.image)?;
    let psf = at(read_psf(&a.psf), &a.psf)?;
    let b = blur_direct(&psf, &x, bc).into_inner();
    let b = match noise {
        Some(kind) if a.noise_level > 0.0 => add_noise(
            &b,
            &NoiseSpec {
                kind,
                level: a.noise_level,
                seed: a.seed,
            },
        )?,
        _ => b,
    };

    let mut outs = Outputs::new();
    let out = outs.add(&a.out);
    at(write_image(&out, &b.into()), &out)?;
    let meta = outs.add(&meta_path(&a.out));
    let mut w = create(&meta)?;
    let noise_name = noise.map_or_else(|| "none".to_string(), |k| k.to_string());
    let text = format!(
        "image={}\npsf={}\nbc={bc}\nnoise={noise_name}\nnoise_level={}\nseed={}\n",
        a.image.display(),
        a.psf.display(),
        a.noise_level,
        a.seed
    );
    at(w.write_all(text.as_bytes()).and_then(|_| w.flush()).map_err(Error::from), &meta)?;
    outs.keep();
    Ok(())
}

pub fn decompose(a: DecomposeArgs) -> Result<()> {
    let bc: BoundaryCondition = parse(&a.bc)?;
    let psf = at(read_psf(&a.psf), &a.psf)?;
    let n = a.size.unwrap_or(psf.size());
    let dec = KronDecomposition::new(&psf, bc, (n, n))?;
    let s = parse_terms(&a.s, dec.numerical_rank())?;
    let op = dec.operator(s)?;

    let mut outs = Outputs::new();
    let report = outs.add(&a.report);
    let mut w = create(&report)?;
    let text = format!(
        "# bc={bc} psf={} size={n} rank={}\n# s={s} eps_s={:.17e}\n{}",
        psf.size(),
        dec.numerical_rank(),
        op.eps_s(),
        dec.report()
    );
    at(w.write_all(text.as_bytes()).and_then(|_| w.flush()).map_err(Error::from), &report)?;
    outs.keep();
    Ok(())
}

pub fn restore(a: RestoreArgs) -> Result<()> {
    let meta = read_meta(&a.blurred)?;
    let bc: BoundaryCondition = match (&a.bc, meta.get("bc")) {
        (Some(s), _) => parse(s)?,
        (None, Some(s)) => parse(s)?,
        (None, None) => BoundaryCondition::Reflective,
    };
    let sfista_method = match a.method.as_str() {
        "fista" => false,
        "sfista" => true,
        m => return Err(Error::Argument(format!("unknown method `{m}` (expected fista or sfista)"))),
    };
    if !(a.tol.is_finite() && a.tol >= 0.0) {
        return Err(Error::Argument(format!("--tol must be nonnegative, got {}", a.tol)));
    }
    let b = at(read_image(&a.blurred), &a.blurred)?.into_inner();
    let psf = at(read_psf(&a.psf), &a.psf)?;
    let truth = match &a.truth {
        Some(p) => {
            let t = at(read_image(p), p)?.into_inner();
            if t.dim() != b.dim() {
                return Err(Error::Argument(format!(
                    "truth is {:?} but the blurred image is {:?}",
                    t.dim(),
                    b.dim()
                )));
            }
            Some(t)
        }
        None => None,
    };
    let (m, n) = b.dim();

    let dec = KronDecomposition::new(&psf, bc, (m, n))?;
    let exact = dec.full_operator()?;
    let s = if sfista_method { parse_terms(&a.s, exact.s())? } else { exact.s() };
    let op = dec.operator(s)?;
    let lipschitz = match a.lipschitz {
        Some(l) => l,
        None => estimate_lipschitz(&exact, LIPSCHITZ_ITERS, a.seed)?.value,
    };
    let lambda = if a.lambda == "auto" {
        let level = match (a.noise_level, meta.get("noise_level")) {
            (Some(l), _) => l,
            (None, Some(v)) => v
                .parse()
                .map_err(|_| Error::Argument(format!("sidecar noise_level `{v}` is not a number")))?,
            (None, None) => {
                return Err(Error::Argument(
                    "--lambda auto needs --noise-level or a sidecar with noise_level".into(),
                ))
            }
        };
        choose_lambda_auto(&exact, b.view(), level, lipschitz)?.lambda
    } else {
        a.lambda
            .parse::<f64>()
            .map_err(|_| Error::Argument(format!("--lambda expects a number or `auto`, got `{}`", a.lambda)))?
    };
    let cfg = SolveConfig::new(lambda, lipschitz)?
        .max_iter(a.iters)
        .rel_tol(a.tol)
        .record_history(a.metrics_csv.is_some())
        .parallel(a.parallel);

    // eta and gamma per iterate, gamma against the exact blur of the data.
    let probe = |x: &Array2<f64>| -> Probe {
        let gamma = exact
            .apply(x.view())
            .ok()
            .and_then(|ax| relative_residual(ax.view(), b.view()).ok());
        let eta = truth.as_ref().and_then(|t| relative_error(x.view(), t.view()).ok());
        Probe { eta, gamma }
    };
    let (x, iterations, history, solve_ms) = if sfista_method {
        let run = sfista_monitored(&op, b.view(), &cfg, Array2::zeros((m, n)), &mut |x| probe(&x.to_owned()))?;
        (run.x, run.iterations, run.history, run.solve_ms)
    } else {
        let mut monitor = |v: ndarray::ArrayView1<f64>| match unvec(m, n, v) {
            Ok(x) => probe(&x),
            Err(_) => Probe::default(),
        };
        let run = fista_monitored(&exact, vec_of(&b).view(), &cfg, Array1::zeros(m * n), &mut monitor)?;
        (unvec(m, n, run.x.view())?, run.iterations, run.history, run.solve_ms)
    };

    let gamma = relative_residual(exact.apply(x.view())?.view(), b.view())?;
    let eta = truth.as_ref().map(|t| relative_error(x.view(), t.view())).transpose()?;

    let mut outs = Outputs::new();
    let out = outs.add(&a.out);
    at(write_image(&out, &x.into()), &out)?;
    if let Some(p) = &a.metrics_csv {
        let p = outs.add(p);
        let mut w = create(&p)?;
        at(write_history_csv(&mut w, &history).and_then(|_| w.flush().map_err(Error::from)), &p)?;
    }
    outs.keep();

    let eta = eta.map_or_else(|| "nan".to_string(), |e| format!("{e:.6e}"));
    println!(
        "method={} s={s} lambda={lambda:.6e} L={lipschitz:.6e} iters={iterations} eta={eta} gamma={gamma:.6e} ms={solve_ms:.3}",
        a.method
    );
    Ok(())
}

pub fn bench(a: BenchArgs) -> Result<()> {
    let text = at(fs::read_to_string(&a.suite).map_err(Error::from), &a.suite)?;
    let cases = parse_suite(&text)?;
    if cases.is_empty() {
        return Err(Error::Argument(format!("{}: no cases", a.suite.display())));
    }
    at(fs::create_dir_all(&a.out_dir).map_err(Error::from), &a.out_dir)?;

    let mut outs = Outputs::new();
    let all_path = outs.add(&a.out_dir.join("bench.csv"));
    let mut all = create(&all_path)?;
    let write = |w: &mut BufWriter<fs::File>, line: &str, p: &Path| {
        at(writeln!(w, "{line}").map_err(Error::from), p)
    };
    write(&mut all, BENCH_HEADER, &all_path)?;
    for case in &cases {
        let case_path = outs.add(&a.out_dir.join(format!("{}.csv", case.id)));
        let mut per = create(&case_path)?;
        write(&mut per, BENCH_HEADER, &case_path)?;
        for &seed in &case.seeds {
            for row in run_case(case, seed)? {
                let line = row.csv();
                write(&mut all, &line, &all_path)?;
                write(&mut per, &line, &case_path)?;
                println!("{line}");
            }
        }
        at(per.flush().map_err(Error::from), &case_path)?;
    }
    at(all.flush().map_err(Error::from), &all_path)?;
    outs.keep();
    Ok(())
}

pub fn gen_psf(a: GenPsfArgs) -> Result<()> {
    let psf = match (&a.level, a.image_size) {
        (Some(level), Some(n)) => {
            let kind: BlurKind = parse(&a.blur)?;
            let level: BlurLevel = parse(level)?;
            blur_psf(kind, level, n, a.seed)?
        }
        _ => match a.kind.as_str() {
            "delta" => Psf::delta(a.size)?,
            "gaussian" => Psf::gaussian(a.size, a.sigma)?,
            "disk" => Psf::disk(a.size, a.radius)?,
            "shake" => Psf::shake(a.size, a.steps, a.seed)?,
            k => {
                return Err(Error::Argument(format!(
                    "unknown PSF kind `{k}` (expected delta, gaussian, disk or shake)"
                )))
            }
        },
    };
    let mut outs = Outputs::new();
    let out = outs.add(&a.out);
    at(write_psf(&out, &psf), &out)?;
    outs.keep();
    Ok(())
}

pub fn gen_image(a: GenImageArgs) -> Result<()> {
    let kind: ImageKind = parse(&a.kind)?;
    let img = generate_image(kind, a.rows, a.cols, a.seed)?;
    let mut outs = Outputs::new();
    let out = outs.add(&a.out);
    at(write_image(&out, &img), &out)?;
    outs.keep();
    Ok(())
}
