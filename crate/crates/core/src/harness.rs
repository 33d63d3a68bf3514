//! Benchmark cases: scene, blur, noise and solver sweep described by one suite line.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use ndarray::Array2;

use crate::blur::blur_direct;
use crate::error::{Error, Result};
use crate::image::vec_of;
use crate::imaging::{add_noise, generate_image, relative_error, relative_residual, ImageKind, NoiseKind, NoiseSpec};
use crate::kronecker::KronDecomposition;
use crate::psf::{BoundaryCondition, Psf};
use crate::solvers::{choose_lambda_auto, estimate_lipschitz, fista, sfista, SolveConfig};

/// Power-iteration steps used for the shared Lipschitz estimate.
pub const LIPSCHITZ_ITERS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlurKind {
    Defocus,
    Shake,
}

impl FromStr for BlurKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "defocus" => Ok(BlurKind::Defocus),
            "shake" => Ok(BlurKind::Shake),
            other => Err(Error::arg(format!("unknown blur kind '{other}'"))),
        }
    }
}

impl fmt::Display for BlurKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlurKind::Defocus => "defocus",
            BlurKind::Shake => "shake",
        })
    }
}

/// Blur severity. On a 64x64 image: defocus radius 2/4/8 pixels, shake walks
/// of 10/30/80 steps; both scale linearly with the image size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlurLevel {
    Mild,
    Medium,
    Severe,
}

impl FromStr for BlurLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mild" => Ok(BlurLevel::Mild),
            "medium" => Ok(BlurLevel::Medium),
            "severe" => Ok(BlurLevel::Severe),
            other => Err(Error::arg(format!("unknown blur level '{other}'"))),
        }
    }
}

impl fmt::Display for BlurLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlurLevel::Mild => "mild",
            BlurLevel::Medium => "medium",
            BlurLevel::Severe => "severe",
        })
    }
}

impl BlurLevel {
    pub fn defocus_radius(self, size: usize) -> f64 {
        let base = match self {
            BlurLevel::Mild => 2.0,
            BlurLevel::Medium => 4.0,
            BlurLevel::Severe => 8.0,
        };
        base * size as f64 / 64.0
    }

    pub fn shake_steps(self, size: usize) -> usize {
        let base = match self {
            BlurLevel::Mild => 10.0,
            BlurLevel::Medium => 30.0,
            BlurLevel::Severe => 80.0,
        };
        ((base * size as f64 / 64.0).round() as usize).max(1)
    }
}

fn largest_odd_at_most(n: usize) -> usize {
    if n % 2 == 1 {
        n
    } else {
        n - 1
    }
}

/// PSF for a blur kind and level on `size x size` images.
pub fn blur_psf(kind: BlurKind, level: BlurLevel, size: usize, seed: u64) -> Result<Psf> {
    if size < 3 {
        return Err(Error::arg("images must be at least 3x3 to blur"));
    }
    let cap = largest_odd_at_most(size);
    match kind {
        BlurKind::Defocus => {
            let r = level.defocus_radius(size);
            let np = (2 * r.ceil() as usize + 1).min(cap);
            Psf::disk(np, r.min(((np - 1) / 2) as f64))
        }
        BlurKind::Shake => {
            let steps = level.shake_steps(size);
            let np = (2 * (2.0 * (steps as f64).sqrt()).ceil() as usize + 1).min(cap);
            Psf::shake(np, steps, seed)
        }
    }
}

/// Term count of a sweep entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terms {
    Count(usize),
    /// every numerically nonzero term
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaSpec {
    Fixed(f64),
    Auto,
}

/// One suite line, e.g.
/// `id=a image=pattern1 size=64 blur=defocus level=medium noise=gauss noise_level=0.01 s=1,3,5 iters=50 seeds=1,2`.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchCase {
    pub id: String,
    pub image: ImageKind,
    pub size: usize,
    pub blur: BlurKind,
    pub level: BlurLevel,
    pub bc: BoundaryCondition,
    /// `None` for noise-free data
    pub noise: Option<NoiseKind>,
    pub noise_level: f64,
    pub terms: Vec<Terms>,
    pub iters: usize,
    pub seeds: Vec<u64>,
    pub lambda: LambdaSpec,
}

impl BenchCase {
    /// Defaults for every optional key.
    pub fn new(id: impl Into<String>, image: ImageKind, blur: BlurKind, level: BlurLevel) -> Self {
        Self {
            id: id.into(),
            image,
            size: 64,
            blur,
            level,
            bc: BoundaryCondition::Reflective,
            noise: Some(NoiseKind::Gauss),
            noise_level: 0.01,
            terms: vec![Terms::Count(5)],
            iters: 50,
            seeds: vec![1],
            lambda: LambdaSpec::Auto,
        }
    }

    /// Parse `key=value` pairs; `line_no` names the case when `id` is absent.
    pub fn parse(line: &str, line_no: usize) -> Result<Self> {
        let mut image = None;
        let mut blur = None;
        let mut level = None;
        let mut case = BenchCase::new(format!("case{line_no}"), ImageKind::Pattern1, BlurKind::Defocus, BlurLevel::Medium);
        for pair in line.split_whitespace() {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::arg(format!("line {line_no}: expected key=value, found '{pair}'")))?;
            let bad = |what: &str| Error::arg(format!("line {line_no}: bad {what} '{value}'"));
            match key {
                "id" => case.id = value.to_string(),
                "image" => image = Some(value.parse()?),
                "size" => case.size = value.parse().map_err(|_| bad("size"))?,
                "blur" => blur = Some(value.parse()?),
                "level" => level = Some(value.parse()?),
                "bc" => case.bc = value.parse()?,
                "noise" => {
                    case.noise = if value == "none" { None } else { Some(value.parse()?) };
                }
                "noise_level" => case.noise_level = value.parse().map_err(|_| bad("noise level"))?,
                "s" => {
                    case.terms = value
                        .split(',')
                        .map(|t| match t {
                            "full" => Ok(Terms::Full),
                            t => t.parse().map(Terms::Count).map_err(|_| bad("term list")),
                        })
                        .collect::<Result<_>>()?;
                }
                "iters" => case.iters = value.parse().map_err(|_| bad("iteration count"))?,
                "seeds" => {
                    case.seeds = value
                        .split(',')
                        .map(|t| t.parse().map_err(|_| bad("seed list")))
                        .collect::<Result<_>>()?;
                }
                "lambda" => {
                    case.lambda = if value == "auto" {
                        LambdaSpec::Auto
                    } else {
                        LambdaSpec::Fixed(value.parse().map_err(|_| bad("lambda"))?)
                    };
                }
                other => return Err(Error::arg(format!("line {line_no}: unknown key '{other}'"))),
            }
        }
        case.image = image.ok_or_else(|| Error::arg(format!("line {line_no}: missing image=")))?;
        case.blur = blur.ok_or_else(|| Error::arg(format!("line {line_no}: missing blur=")))?;
        case.level = level.ok_or_else(|| Error::arg(format!("line {line_no}: missing level=")))?;
        case.validate()?;
        Ok(case)
    }

    pub fn validate(&self) -> Result<()> {
        if self.size < 8 {
            return Err(Error::arg(format!("case {}: size must be at least 8", self.id)));
        }
        if self.iters < 1 || self.seeds.is_empty() || self.terms.is_empty() {
            return Err(Error::arg(format!("case {}: iters, seeds and s must be non-empty", self.id)));
        }
        if !(self.noise_level.is_finite() && self.noise_level >= 0.0) {
            return Err(Error::arg(format!("case {}: noise level must be nonnegative", self.id)));
        }
        if let LambdaSpec::Fixed(l) = self.lambda {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::arg(format!("case {}: lambda must be positive", self.id)));
            }
        }
        Ok(())
    }
}

/// Parse a suite file: one case per line, `#` comments and blank lines ignored.
pub fn parse_suite(text: &str) -> Result<Vec<BenchCase>> {
    let mut cases = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if !line.is_empty() {
            cases.push(BenchCase::parse(line, i + 1)?);
        }
    }
    Ok(cases)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Fista,
    Sfista,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Fista => "fista",
            Method::Sfista => "sfista",
        })
    }
}

/// One CSV row of a bench run.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub case: String,
    pub seed: u64,
    pub method: Method,
    pub s: usize,
    pub iters: usize,
    pub lambda: f64,
    pub eta: f64,
    pub gamma: f64,
    pub ms: f64,
    pub setup_ms: f64,
    /// per-iteration time relative to the FISTA row of the same case and seed
    pub tratio: Option<f64>,
}

pub const BENCH_HEADER: &str = "case,seed,method,s,iters,lambda,eta,gamma,ms,setup_ms,tratio";

impl BenchRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{:.6e},{:.17e},{:.17e},{:.3},{:.3},{}",
            self.case,
            self.seed,
            self.method,
            self.s,
            self.iters,
            self.lambda,
            self.eta,
            self.gamma,
            self.ms,
            self.setup_ms,
            self.tratio.map(|t| format!("{t:.4}")).unwrap_or_default()
        )
    }
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Run FISTA on the exact operator and sFISTA for each term count, one seed.
///
/// Both methods share `L` (estimated on the exact operator) and `lambda`.
/// `gamma` is measured against the exact blur of the noisy data.
pub fn run_case(case: &BenchCase, seed: u64) -> Result<Vec<BenchRow>> {
    case.validate()?;
    let n = case.size;
    let x_true = generate_image(case.image, n, n, seed)?.into_inner();
    let psf = blur_psf(case.blur, case.level, n, seed)?;
    let b = blur_direct(&psf, &x_true.clone().into(), case.bc).into_inner();
    let bn = match case.noise {
        Some(kind) if case.noise_level > 0.0 => add_noise(
            &b,
            &NoiseSpec {
                kind,
                level: case.noise_level,
                seed,
            },
        )?,
        _ => b.clone(),
    };

    let t = Instant::now();
    let dec = KronDecomposition::new(&psf, case.bc, (n, n))?;
    let decomp_ms = ms_since(t);
    let t = Instant::now();
    let exact = dec.full_operator()?;
    let exact_ms = ms_since(t);

    let lipschitz = estimate_lipschitz(&exact, LIPSCHITZ_ITERS, seed)?.value;
    let lambda = match case.lambda {
        LambdaSpec::Fixed(l) => l,
        LambdaSpec::Auto => choose_lambda_auto(&exact, bn.view(), case.noise_level, lipschitz)?.lambda,
    };
    let cfg = SolveConfig::new(lambda, lipschitz)?.max_iter(case.iters);
    let quality = |x: &Array2<f64>| -> Result<(f64, f64)> {
        let ax = exact.apply(x.view())?;
        Ok((relative_error(x.view(), x_true.view())?, relative_residual(ax.view(), bn.view())?))
    };

    let mut rows = Vec::new();
    let run = fista(&exact, vec_of(&bn).view(), &cfg, ndarray::Array1::zeros(n * n))?;
    let x = crate::image::unvec(n, n, run.x.view())?;
    let (eta, gamma) = quality(&x)?;
    let fista_per_iter = run.solve_ms / run.iterations as f64;
    rows.push(BenchRow {
        case: case.id.clone(),
        seed,
        method: Method::Fista,
        s: exact.s(),
        iters: run.iterations,
        lambda,
        eta,
        gamma,
        ms: run.solve_ms,
        setup_ms: decomp_ms + exact_ms,
        tratio: None,
    });

    for terms in &case.terms {
        let s = match *terms {
            Terms::Count(s) => s,
            Terms::Full => exact.s(),
        };
        let t = Instant::now();
        let op = dec.operator(s)?;
        let setup_ms = decomp_ms + ms_since(t);
        let run = sfista(&op, bn.view(), &cfg, Array2::zeros((n, n)))?;
        let (eta, gamma) = quality(&run.x)?;
        let per_iter = run.solve_ms / run.iterations as f64;
        rows.push(BenchRow {
            case: case.id.clone(),
            seed,
            method: Method::Sfista,
            s,
            iters: run.iterations,
            lambda,
            eta,
            gamma,
            ms: run.solve_ms,
            setup_ms,
            tratio: Some(per_iter / fista_per_iter),
        });
    }
    Ok(rows)
}
