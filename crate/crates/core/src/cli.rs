//! Batch front end. Each command loads a curve config, applies `--set`
//! overrides and writes one artifact (CSV or a `key = value` text block).

use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use crate::autoconv::{
    angular_frame, default_fd_step, evaluate_grid, hessian_at_origin, origin_value, BoundaryCoords,
    ScanGrid, TripleConvolution, DEFAULT_QUAD_NODES,
};
use crate::curve::{CurveParams, RegimeReport};
use crate::error::{Error, Result};
use crate::extension::{constants_report, ratio_sweep, write_sweep_csv, NormGrid};
use crate::fmt::sig17;
use crate::oracle::{compare_models, CompareGrid, OracleConfig};
use crate::quad::linspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    CheckRegime,
    Surface,
    Hessian,
    OracleCompare,
    RatioSweep,
    Constants,
    Identities,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub command: Command,
    pub params_path: PathBuf,
    /// Standard output when `None`.
    pub output_path: Option<PathBuf>,
    /// Raw `key=value` overrides in command-line order.
    pub overrides: Vec<String>,
}

/// Tunables reachable through `--set`.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub quad_nodes: usize,
    pub grid: ScanGrid,
    pub fd_step: Option<f64>,
    pub oracle_width: Option<f64>,
    pub oracle_grid_n: usize,
    pub oracle_extrapolate: bool,
    pub compare_nx: usize,
    pub compare_ne: usize,
    pub compare_xi_frac: f64,
    pub compare_eps_lo: Option<f64>,
    pub compare_eps_hi: Option<f64>,
    /// Oracle evaluated for `a + a_shift` (negative control when nonzero).
    pub compare_a_shift: f64,
    pub sweep_deltas: Vec<f64>,
    pub norm: NormGrid,
    pub identity_samples: usize,
    /// 0 means the rayon default.
    pub threads: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            quad_nodes: DEFAULT_QUAD_NODES,
            grid: ScanGrid::new(41, 41),
            fd_step: None,
            oracle_width: None,
            oracle_grid_n: 2048,
            oracle_extrapolate: true,
            compare_nx: 5,
            compare_ne: 5,
            compare_xi_frac: 0.8,
            compare_eps_lo: None,
            compare_eps_hi: None,
            compare_a_shift: 0.0,
            sweep_deltas: vec![0.2, 0.1, 0.05],
            norm: NormGrid::default(),
            identity_samples: 10_000,
            threads: 0,
        }
    }
}

pub const OVERRIDE_KEYS: &[&str] = &[
    "quad.nodes",
    "grid.nx",
    "grid.ne",
    "grid.margin",
    "grid.eps_max",
    "fd.step",
    "oracle.width",
    "oracle.grid_n",
    "oracle.extrapolate",
    "compare.nx",
    "compare.ne",
    "compare.xi_frac",
    "compare.eps_lo",
    "compare.eps_hi",
    "compare.a_shift",
    "sweep.deltas",
    "norm.n",
    "norm.tol",
    "identities.samples",
    "threads",
];

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("--set {key}: cannot parse `{value}`")))
}

impl Settings {
    /// Applies one `key=value` override; unknown keys are an error.
    pub fn apply(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects key=value, got `{assignment}`")))?;
        let key = key.trim();
        match key {
            "quad.nodes" => self.quad_nodes = parse_num(key, value)?,
            "grid.nx" => self.grid.n_xi = parse_num(key, value)?,
            "grid.ne" => self.grid.n_eps = parse_num(key, value)?,
            "grid.margin" => self.grid.margin = parse_num(key, value)?,
            "grid.eps_max" => self.grid.eps_max = Some(parse_num(key, value)?),
            "fd.step" => self.fd_step = Some(parse_num(key, value)?),
            "oracle.width" => self.oracle_width = Some(parse_num(key, value)?),
            "oracle.grid_n" => self.oracle_grid_n = parse_num(key, value)?,
            "oracle.extrapolate" => self.oracle_extrapolate = parse_num(key, value)?,
            "compare.nx" => self.compare_nx = parse_num(key, value)?,
            "compare.ne" => self.compare_ne = parse_num(key, value)?,
            "compare.xi_frac" => self.compare_xi_frac = parse_num(key, value)?,
            "compare.eps_lo" => self.compare_eps_lo = Some(parse_num(key, value)?),
            "compare.eps_hi" => self.compare_eps_hi = Some(parse_num(key, value)?),
            "compare.a_shift" => self.compare_a_shift = parse_num(key, value)?,
            "sweep.deltas" => {
                self.sweep_deltas = if value.trim().is_empty() {
                    Vec::new()
                } else {
                    value
                        .split(',')
                        .map(|v| parse_num(key, v))
                        .collect::<Result<_>>()?
                }
            }
            "norm.n" => self.norm.n = parse_num(key, value)?,
            "norm.tol" => self.norm.tol = parse_num(key, value)?,
            "identities.samples" => self.identity_samples = parse_num(key, value)?,
            "threads" => self.threads = parse_num(key, value)?,
            _ => {
                return Err(Error::Config(format!(
                    "unknown override key `{key}` (known: {})",
                    OVERRIDE_KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    pub fn from_overrides(overrides: &[String]) -> Result<Self> {
        let mut s = Self::default();
        for o in overrides {
            s.apply(o)?;
        }
        // the norm grid shares the angular rule size
        s.norm.quad_nodes = s.quad_nodes;
        Ok(s)
    }
}

/// Process exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => 1,
        Error::Config(_) => 2,
        Error::MonotonicityViolated { .. } => 3,
        Error::NoConvergence { .. } => 4,
        Error::GridUnresolved { .. } => 5,
        Error::InvalidParameter { .. } => 6,
    }
}

/// Loads the config, runs the command on a pool of `threads` workers and
/// writes the artifact. Nothing is written if the command fails.
pub fn run(spec: &RunSpec) -> Result<()> {
    let settings = Settings::from_overrides(&spec.overrides)?;
    let params = CurveParams::load(&spec.params_path)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.threads)
        .build()
        .map_err(|e| Error::Config(format!("threads: {e}")))?;
    let mut buf = Vec::new();
    pool.install(|| execute(spec.command, &params, &settings, &mut buf))?;
    match &spec.output_path {
        Some(path) => {
            let mut w = BufWriter::new(
                File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
            );
            w.write_all(&buf)?;
            w.flush()?;
        }
        None => io::stdout().lock().write_all(&buf)?,
    }
    Ok(())
}

/// Runs `command` on the current rayon pool.
pub fn execute<W: Write>(
    command: Command,
    params: &CurveParams,
    settings: &Settings,
    out: &mut W,
) -> Result<()> {
    match command {
        Command::CheckRegime => check_regime(params, out),
        Command::Surface => {
            let model = TripleConvolution::new(params.clone())?;
            let grid = evaluate_grid(&model, &settings.grid, settings.quad_nodes)?;
            grid.write_csv(out)?;
            Ok(())
        }
        Command::Hessian => hessian(params, settings, out),
        Command::OracleCompare => oracle_compare(params, settings, out),
        Command::RatioSweep => {
            let model = TripleConvolution::new(params.clone())?;
            let rows = ratio_sweep(&model, &settings.sweep_deltas, &settings.norm)?;
            write_sweep_csv(&rows, out)?;
            Ok(())
        }
        Command::Constants => {
            let model = TripleConvolution::new(params.clone())?;
            let rep = constants_report(&model, &settings.grid, settings.quad_nodes)?;
            out.write_all(rep.to_text().as_bytes())?;
            Ok(())
        }
        Command::Identities => identities(params, settings, out),
    }
}

fn check_regime<W: Write>(params: &CurveParams, out: &mut W) -> Result<()> {
    let rep: RegimeReport = params.classify_regime();
    writeln!(
        out,
        "24a\u{2212}3\u{3bb}\u{b3} = {}",
        sig17(rep.kappa_s2_at_origin)
    )?;
    writeln!(out, "regime = {}", rep.regime)?;
    writeln!(out, "a = {}", sig17(rep.a_value))?;
    writeln!(out, "threshold_min = {}", sig17(rep.threshold_min))?;
    writeln!(out, "threshold_exist = {}", sig17(rep.threshold_exist))?;
    writeln!(
        out,
        "threshold_nonexist = {}",
        sig17(rep.threshold_nonexist)
    )?;
    writeln!(
        out,
        "curvature_min_at_origin = {}",
        rep.curvature_min_at_origin()
    )?;
    Ok(())
}

fn hessian<W: Write>(params: &CurveParams, settings: &Settings, out: &mut W) -> Result<()> {
    let model = TripleConvolution::new(params.clone())?;
    let step = settings
        .fd_step
        .unwrap_or_else(|| default_fd_step(params.r()));
    let rep = hessian_at_origin(&model, step, settings.quad_nodes)?;
    writeln!(out, "step = {}", sig17(rep.step))?;
    writeln!(out, "entry,closed_form,finite_difference,rel_err")?;
    let names = [["d2_xi", "mixed"], ["mixed", "d2_eps"]];
    for (i, j) in [(0, 0), (1, 1), (0, 1)] {
        let (c, f) = (rep.closed_form[i][j], rep.fd[i][j]);
        let rel = if c == 0.0 {
            f.abs()
        } else {
            ((f - c) / c).abs()
        };
        writeln!(
            out,
            "{},{},{},{}",
            names[i][j],
            sig17(c),
            sig17(f),
            sig17(rel)
        )?;
    }
    writeln!(
        out,
        "max_rel_diag_error = {}",
        sig17(rep.max_rel_diag_error())
    )?;
    writeln!(out, "is_strict_max = {}", rep.is_strict_max)?;
    Ok(())
}

fn oracle_compare<W: Write>(params: &CurveParams, settings: &Settings, out: &mut W) -> Result<()> {
    let model = TripleConvolution::new(params.clone())?;
    let r = params.r();
    let mut cfg = OracleConfig::default_for(params);
    if let Some(w) = settings.oracle_width {
        cfg.delta_width = w;
    }
    cfg.grid_n = settings.oracle_grid_n;
    cfg.extrapolate = settings.oracle_extrapolate;
    let grid = CompareGrid {
        n_xi: settings.compare_nx,
        n_eps: settings.compare_ne,
        xi_frac: settings.compare_xi_frac,
        eps_lo: settings.compare_eps_lo.unwrap_or(0.2 * r),
        eps_hi: settings.compare_eps_hi.unwrap_or(1.6 * r),
    };
    let oracle_params = params.with_a(params.a() + settings.compare_a_shift)?;
    let rep = compare_models(
        &model,
        &oracle_params,
        &grid.points(r),
        &cfg,
        settings.quad_nodes,
    )?;
    rep.write_csv(out)?;
    Ok(())
}

struct Check {
    name: &'static str,
    error: Option<f64>,
    tol: f64,
}

fn identities<W: Write>(params: &CurveParams, settings: &Settings, out: &mut W) -> Result<()> {
    let n = settings.identity_samples.max(1);
    let thetas = linspace(0.0, 2.0 * PI, n);
    let mut errs = [0.0f64; 4];
    for &t in &thetas {
        let f = angular_frame(t);
        let s3 = -(3.0 * t).sin() / 6f64.sqrt();
        let want = [0.0, 1.0, s3, 0.5];
        for (k, e) in errs.iter_mut().enumerate() {
            *e = e.max((f.power_sum(k as i32 + 1) - want[k]).abs());
        }
    }
    let mut checks = vec![
        Check {
            name: "alpha+beta+gamma=0",
            error: Some(errs[0]),
            tol: 1e-12,
        },
        Check {
            name: "sum_squares=1",
            error: Some(errs[1]),
            tol: 1e-12,
        },
        Check {
            name: "sum_cubes=-sin3t/sqrt6",
            error: Some(errs[2]),
            tol: 1e-12,
        },
        Check {
            name: "sum_fourth=1/2",
            error: Some(errs[3]),
            tol: 1e-12,
        },
    ];

    let model = TripleConvolution::new(params.clone())?;
    let (lambda, a) = (params.lambda(), params.a());
    // rho(v) at xi = 0 in closed form; needs phi = 0
    let rho_err = if params.has_phi() {
        None
    } else {
        let top = model.eps_max();
        let mut worst = 0.0f64;
        for i in 0..100 {
            let v = top * 10f64.powf(-6.0 + 6.0 * i as f64 / 99.0);
            let want = (4.0 * v * v / ((lambda * lambda + 8.0 * a * v * v).sqrt() + lambda)).sqrt();
            for &t in &[0.0, 0.7, 2.1, 4.4] {
                let got = model.solve_rho(0.0, t, v)?.rho;
                worst = worst.max(((got - want) / want).abs());
            }
        }
        Some(worst)
    };
    checks.push(Check {
        name: "rho_closed_form_xi0",
        error: rho_err,
        tol: 1e-10,
    });

    let r = params.r();
    let mut worst = 0.0f64;
    for xi in linspace(-r, r, 50) {
        let got = model.density_f(BoundaryCoords::new(xi, 0.0), settings.quad_nodes)?;
        let want = 2.0 * PI / 3f64.sqrt() / params.curvature(xi / 3.0);
        worst = worst.max(((got - want) / want).abs());
    }
    checks.push(Check {
        name: "boundary_density",
        error: Some(worst),
        tol: 1e-9,
    });
    let f00 = model.density_f(BoundaryCoords::origin(), settings.quad_nodes)?;
    let o = origin_value(lambda);
    checks.push(Check {
        name: "origin_value",
        error: Some(((f00 - o) / o).abs()),
        tol: 1e-10,
    });

    writeln!(out, "check,max_error,tol,status")?;
    for c in &checks {
        let (err, status) = match c.error {
            Some(e) if e <= c.tol => (sig17(e), "pass"),
            Some(e) => (sig17(e), "fail"),
            None => ("nan".to_string(), "skipped"),
        };
        writeln!(out, "{},{},{},{}", c.name, err, sig17(c.tol), status)?;
    }
    Ok(())
}
