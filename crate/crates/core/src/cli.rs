//! Command-line front end.
//!
//! Every subcommand produces a [`Report`]: JSON, CSV, an optional SVG plot
//! and a pass flag. Reports go to stdout unless `--quiet`, and to the output
//! directory (`--out` or `TRONQUEE_OUT`) when one is given. Timestamps live
//! only in the `.meta.json` sidecar so the data files are reproducible.

use std::f64::consts::PI;
use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::acceptance;
use crate::dynamics::wasow_check;
use crate::error::{Error, Result};
use crate::experiments::{
    build_tronquee, overlap_agreement, perturbation_decay, pole_scan, tritronquee_sweep_p3ii, Anchor, ExpOptions,
    GridSpec, Perturb, Rays, Seeder,
};
use crate::integrate::{integrate_with, make_arc, make_ray, Options, Path, Trajectory};
use crate::model::{branch, make_equation, p3ii_y_sector, sector, EquationSpec, Family, Param, RawParams, SectorKind};
use crate::scalar::{from_c64, Dd, Real, C64};
use crate::series::{compute_coefficients, residual_order, Backend};
use crate::svg::{Plot, Series};

pub const OUT_ENV: &str = "TRONQUEE_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "tronquee", version, about = "Tronquee solutions of P3 and P4")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// suppress stdout output
    #[arg(long, global = true)]
    pub quiet: bool,
    /// output directory (defaults to $TRONQUEE_OUT)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// Equation and branch selection shared by most subcommands.
#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct EqArgs {
    #[arg(long, default_value = "p3i")]
    pub family: String,
    /// branch index m (P4: case 1-4)
    #[arg(long, visible_alias = "case")]
    pub m: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub k0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub kinf: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendArg {
    Exact,
    F64,
    Dd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Existence,
    Uniqueness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Dopri,
    Taylor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionArg {
    F64,
    Dd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum ComponentArg {
    #[value(name = "u")]
    #[serde(rename = "u")]
    U,
    #[value(name = "U")]
    #[serde(rename = "U")]
    BigU,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficient table of a formal solution
    Coeffs {
        #[command(flatten)]
        eq: EqArgs,
        #[arg(long = "N", visible_alias = "n", default_value_t = 10)]
        n: usize,
        #[arg(long, value_enum, default_value = "exact")]
        backend: BackendArg,
    },
    /// Residual order of the truncated formal solution
    Residual {
        #[command(flatten)]
        eq: EqArgs,
        #[arg(long = "N", visible_alias = "n", default_value_t = 20)]
        n: usize,
    },
    /// Limit Jacobians and Wasow conditions over all branches
    Eigs {
        #[arg(long, default_value = "1/3", allow_hyphen_values = true)]
        k0: String,
        #[arg(long, default_value = "1/5", allow_hyphen_values = true)]
        kinf: String,
    },
    /// Integrate along a ray (or an arc) from given initial data
    Integrate {
        #[command(flatten)]
        eq: EqArgs,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, default_value_t = 10.0)]
        r0: f64,
        #[arg(long, default_value_t = 20.0)]
        r1: f64,
        /// integrate along |x| = r0 from theta to this argument instead
        #[arg(long, allow_hyphen_values = true)]
        arc_to: Option<f64>,
        /// initial u as "re,im"
        #[arg(long, allow_hyphen_values = true)]
        u0: String,
        /// initial U as "re,im"
        #[arg(long = "U0", visible_alias = "w0", allow_hyphen_values = true)]
        w0: String,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, value_enum, default_value = "dopri")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "f64")]
        precision: PrecisionArg,
    },
    /// Build a tronquee patch on a sector and check it against the series
    Tronquee {
        #[command(flatten)]
        eq: EqArgs,
        #[command(flatten)]
        sec: SectorArgs,
        #[arg(long, default_value_t = 25.0)]
        r0: f64,
        /// cap on the seeding truncation order
        #[arg(long = "N", visible_alias = "n", default_value_t = 60)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        rays: usize,
        /// innermost grid radius (default: reach of the seed accuracy)
        #[arg(long)]
        r_inner: Option<f64>,
        #[arg(long, default_value_t = 8)]
        radii: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        detuning: f64,
    },
    /// Decay rate of a small perturbation of the tronquee solution
    Perturb {
        #[command(flatten)]
        eq: EqArgs,
        /// ray argument (default: bisector of the k = 0 existence sector)
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        #[arg(long, default_value_t = 30.0)]
        r0: f64,
        #[arg(long, default_value_t = 1e-14)]
        eps: f64,
        #[arg(long, value_enum, default_value = "u")]
        component: ComponentArg,
        #[arg(long, default_value_t = 1e10)]
        amplification: f64,
    },
    /// Agreement of the tronquee solutions of two adjacent sectors
    Overlap {
        #[command(flatten)]
        eq: EqArgs,
        #[arg(long, default_value_t = 0)]
        k: i32,
        #[arg(long = "N", visible_alias = "n", default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 20.0)]
        r_probe: f64,
        #[arg(long, default_value_t = 40.0)]
        r0: f64,
        #[arg(long, default_value_t = 0.3)]
        widen: f64,
        #[arg(long, default_value_t = 0.25)]
        offset: f64,
    },
    /// Sweep the P3ii tritronquee solution around the plane minus a cut
    Sweep3ii {
        #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
        beta: String,
        #[arg(long, default_value_t = 0)]
        m: u32,
        #[arg(long, default_value_t = -PI, allow_hyphen_values = true)]
        cut: f64,
        #[arg(long, default_value_t = 30.0)]
        radius: f64,
        #[arg(long = "N", visible_alias = "n", default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 48)]
        nodes: usize,
        #[arg(long, default_value_t = 0.1)]
        margin: f64,
        #[arg(long, default_value_t = 12)]
        checkpoints: usize,
    },
    /// Pole scan of a detuned solution next to the tronquee reference
    Scan {
        #[command(flatten)]
        eq: EqArgs,
        #[command(flatten)]
        sec: SectorArgs,
        #[arg(long, default_value_t = 15.0)]
        r0: f64,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        detuning: f64,
        /// anchor argument (default: bisector)
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        /// comma-separated ray arguments
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        rays: String,
        /// comma-separated radii
        #[arg(long, default_value = "2,4,6,8,10,12,14")]
        radii: String,
    },
    /// Run the acceptance suite
    Selftest {
        #[arg(long, default_value_t = 20240611)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct SectorArgs {
    #[arg(long, default_value_t = 0)]
    pub k: i32,
    #[arg(long, value_enum, default_value = "existence")]
    pub kind: KindArg,
    /// P3ii only: take sectors from the y = x^(1/3) plane instead of the
    /// printed x-plane list
    #[arg(long)]
    pub y_sectors: bool,
}

impl SectorArgs {
    fn sector(&self, eq: &EquationSpec, m: u32) -> Result<crate::model::Sector> {
        if self.y_sectors && eq.family() == Family::P3ii {
            p3ii_y_sector(m, self.k, kind(self.kind), 0.0)
        } else {
            sector(eq, m, self.k, kind(self.kind), 0.0)
        }
    }
}

/// Flattened description of a run, echoed in every JSON output.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub family: Option<String>,
    pub m: Option<u32>,
    /// parameter names and their decimal/rational spellings
    pub params: Vec<(String, String)>,
    pub n: Option<usize>,
    pub backend: Option<String>,
    pub tolerance: Option<f64>,
    pub sector_k: Option<i32>,
    pub sector_kind: Option<String>,
    /// path or grid description
    pub geometry: Vec<(String, f64)>,
    pub output_dir: Option<PathBuf>,
    pub detuning: Option<f64>,
    pub seed: Option<u64>,
}

impl RunConfig {
    fn new(command: &str) -> Self {
        RunConfig { command: command.into(), ..Default::default() }
    }

    fn with_eq(mut self, e: &EqArgs) -> Self {
        self.family = Some(e.family.to_ascii_lowercase());
        self.m = e.m;
        for (k, v) in [("alpha", &e.alpha), ("beta", &e.beta), ("k0", &e.k0), ("kinf", &e.kinf)] {
            if let Some(v) = v {
                self.params.push((k.into(), v.clone()));
            }
        }
        self
    }

    fn geo(mut self, items: &[(&str, f64)]) -> Self {
        self.geometry.extend(items.iter().map(|(k, v)| (k.to_string(), *v)));
        self
    }

    /// Rebuild the equation from the stored parameter strings.
    pub fn equation(&self) -> Result<EquationSpec> {
        let family: Family = self.family.as_deref().unwrap_or("p3i").parse()?;
        let get = |k: &str| self.params.iter().find(|p| p.0 == k).map(|p| p.1.clone());
        let e = EqArgs {
            family: family.name().into(),
            m: self.m,
            alpha: get("alpha"),
            beta: get("beta"),
            k0: get("k0"),
            kinf: get("kinf"),
        };
        e.equation()
    }
}

impl EqArgs {
    pub fn equation(&self) -> Result<EquationSpec> {
        let family: Family = self.family.parse()?;
        let p = |s: &Option<String>| -> Result<Option<Param>> {
            s.as_deref().map(Param::parse).transpose()
        };
        let raw = match family {
            Family::P4 => RawParams {
                kappa0: Some(p(&self.k0)?.ok_or_else(|| usage("P4 needs --k0"))?),
                kappa_inf: Some(p(&self.kinf)?.ok_or_else(|| usage("P4 needs --kinf"))?),
                alpha: p(&self.alpha)?,
                beta: p(&self.beta)?,
                ..Default::default()
            },
            _ => RawParams {
                alpha: p(&self.alpha)?,
                beta: Some(p(&self.beta)?.ok_or_else(|| usage("P3 needs --beta"))?),
                kappa0: p(&self.k0)?,
                kappa_inf: p(&self.kinf)?,
                ..Default::default()
            },
        };
        if family == Family::P3i && raw.alpha.is_none() {
            return Err(usage("P3i needs --alpha"));
        }
        make_equation(family, raw)
    }

    pub fn m(&self) -> Result<u32> {
        let family: Family = self.family.parse()?;
        Ok(self.m.unwrap_or(*family.branch_range().start()))
    }
}

fn usage(msg: &str) -> Error {
    Error::Invalid(msg.into())
}

/// Output of one subcommand.
#[derive(Debug, Clone)]
pub struct Report {
    pub name: &'static str,
    pub json: Value,
    pub csv: String,
    pub svg: Option<String>,
    pub pass: bool,
}

impl Report {
    fn new(name: &'static str, config: &RunConfig, body: Value, csv: String, pass: bool) -> Self {
        let json = json!({ "config": config, "pass": pass, "result": body });
        Report { name, json, csv, svg: None, pass }
    }

    fn plot(mut self, p: Plot) -> Self {
        self.svg = Some(p.render());
        self
    }

    pub fn json_text(&self) -> String {
        serde_json::to_string_pretty(&self.json).expect("serializable report") + "\n"
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

fn csv_rows(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

fn parse_complex(s: &str) -> Result<C64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| usage(&format!("cannot parse {s:?} as re,im")));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(usage(&format!("cannot parse {s:?} as re,im"))),
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<f64>().map_err(|_| usage(&format!("bad number {t:?} in list"))))
        .collect()
}

fn kind(k: KindArg) -> SectorKind {
    match k {
        KindArg::Existence => SectorKind::Existence,
        KindArg::Uniqueness => SectorKind::Uniqueness,
    }
}

fn log10(v: f64) -> f64 {
    if v > 0.0 {
        v.log10()
    } else {
        f64::NAN
    }
}

fn cmd_coeffs(eq_args: &EqArgs, n: usize, backend: BackendArg) -> Result<Report> {
    let eq = eq_args.equation()?;
    let m = eq_args.m()?;
    let mut backend = match backend {
        BackendArg::Exact => Backend::Exact,
        BackendArg::F64 => Backend::F64,
        BackendArg::Dd => Backend::Dd,
    };
    if backend == Backend::Exact && !eq.is_exact() {
        eprintln!("warning: parameters are not exact rationals, using the f64 backend");
        backend = Backend::F64;
    }
    let cfg = RunConfig { n: Some(n), backend: Some(format!("{backend:?}").to_lowercase()), ..RunConfig::new("coeffs") }
        .with_eq(eq_args);
    let table = compute_coefficients(&eq, &branch(&eq, m)?, n, backend)?;
    let (a, b) = (table.a_c64(), table.big_a_c64());
    let csv = csv_rows(
        "n,re_a,im_a,re_A,im_A",
        (0..a.len()).map(|i| format!("{i},{:.17e},{:.17e},{:.17e},{:.17e}", a[i].re, a[i].im, b[i].re, b[i].im)),
    );
    let plot = Plot::new(&format!("coefficients, {}", table.branch.label()), "n", "log10 |c_n|")
        .with(Series::points("a_n", a.iter().enumerate().map(|(i, z)| (i as f64, log10(z.norm()))).collect()))
        .with(Series::points("A_n", b.iter().enumerate().map(|(i, z)| (i as f64, log10(z.norm()))).collect()));
    Ok(Report::new("coeffs", &cfg, table.to_json(), csv, true).plot(plot))
}

fn cmd_residual(eq_args: &EqArgs, n: usize) -> Result<Report> {
    let eq = eq_args.equation()?;
    let b = branch(&eq, eq_args.m()?)?;
    let cfg = RunConfig { n: Some(n), backend: Some("exact".into()), ..RunConfig::new("residual") }.with_eq(eq_args);
    let r = residual_order(&eq, &b, n)?;
    let pass = r.at_least(n as i64);
    let body = json!({ "branch": b.label(), "N": n, "residual_order": r, "trivial": b.trivial });
    let csv = csv_rows("branch,N,residual_order", [format!("{},{n},{r}", b.label())]);
    Ok(Report::new("residual", &cfg, body, csv, pass))
}

fn cmd_eigs(k0: &str, kinf: &str) -> Result<Report> {
    let cfg = RunConfig {
        params: vec![("k0".into(), k0.into()), ("kinf".into(), kinf.into())],
        ..RunConfig::new("eigs")
    };
    let p4 = make_equation(Family::P4, RawParams::p4(Param::parse(k0)?, Param::parse(kinf)?))?;
    let p3i = make_equation(Family::P3i, RawParams::p3(Param::ratio(1, 3), Param::ratio(-2, 5)))?;
    let p3ii = make_equation(Family::P3ii, RawParams::p3(Param::int(1), Param::ratio(1, 2)))?;
    let mut rows = vec![];
    for eq in [&p3i, &p3ii, &p4] {
        for m in eq.family().branch_range() {
            rows.push(wasow_check(eq, &branch(eq, m)?));
        }
    }
    let active: Vec<_> = rows.iter().filter(|r| !r.excluded).collect();
    let pass = !active.is_empty() && active.iter().all(|r| r.pass);
    let csv = csv_rows(
        "branch,excluded,re_l1,im_l1,re_l2,im_l2,deviation,nonzero,residual_order,pass",
        rows.iter().map(|r| {
            let e = r.eigenvalues.unwrap_or([C64::new(f64::NAN, f64::NAN); 2]);
            let ro = r.residual_order.map(|o| o.to_string()).unwrap_or_default();
            format!(
                "{},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.3e},{},{ro},{}",
                r.label, r.excluded, e[0].re, e[0].im, e[1].re, e[1].im, r.deviation, r.nonzero, r.pass
            )
        }),
    );
    Ok(Report::new("eigs", &cfg, to_value(&rows), csv, pass))
}

struct IntegrateArgs<'a> {
    eq: &'a EqArgs,
    theta: f64,
    r0: f64,
    r1: f64,
    arc_to: Option<f64>,
    u0: &'a str,
    w0: &'a str,
    tol: f64,
    method: MethodArg,
    precision: PrecisionArg,
}

fn trajectory_report<R: Real>(t: &Trajectory<R>, cfg: &RunConfig, title: &str) -> Report {
    let mut csv = Vec::new();
    t.write_csv(&mut csv).expect("write to memory");
    let body = json!({
        "status": t.status,
        "samples": t.samples,
        "max_err": t.max_err(),
    });
    let along: Vec<(f64, f64)> = t.samples.iter().map(|s| (s.t, s.u.norm())).collect();
    let along_w: Vec<(f64, f64)> = t.samples.iter().map(|s| (s.t, s.w.norm())).collect();
    let plot = Plot::new(title, "path parameter", "modulus")
        .with(Series::line("|u|", along))
        .with(Series::line("|U|", along_w));
    Report::new("integrate", cfg, body, String::from_utf8(csv).unwrap(), t.completed()).plot(plot)
}

fn cmd_integrate(a: IntegrateArgs) -> Result<Report> {
    let eq = a.eq.equation()?;
    let path: Path = match a.arc_to {
        Some(t1) => make_arc(a.r0, a.theta, t1)?,
        None => make_ray(a.theta, a.r0, a.r1)?,
    };
    let (u0, w0) = (parse_complex(a.u0)?, parse_complex(a.w0)?);
    let mut geo = vec![("theta", a.theta), ("r0", a.r0), ("r1", a.r1)];
    if let Some(t1) = a.arc_to {
        geo = vec![("r", a.r0), ("theta0", a.theta), ("theta1", t1)];
    }
    let cfg = RunConfig {
        tolerance: Some(a.tol),
        backend: Some(format!("{:?}", a.precision).to_lowercase()),
        ..RunConfig::new("integrate")
    }
    .with_eq(a.eq)
    .geo(&geo);
    let mut opts = match a.method {
        MethodArg::Dopri => Options::dopri(a.tol),
        MethodArg::Taylor => Options::taylor(a.tol, if a.precision == PrecisionArg::Dd { 30 } else { 20 }),
    };
    opts.max_step = (path.length() / 20.0).max(1e-3);
    let title = format!("{} along the path", eq.family());
    Ok(match a.precision {
        PrecisionArg::F64 => trajectory_report(&integrate_with::<f64>(&eq, &path, [u0, w0], &opts)?, &cfg, &title),
        PrecisionArg::Dd => {
            let init = [from_c64::<Dd>(u0), from_c64::<Dd>(w0)];
            trajectory_report(&integrate_with::<Dd>(&eq, &path, init, &opts)?, &cfg, &title)
        }
    })
}

struct TronqueeArgs<'a> {
    eq: &'a EqArgs,
    sec: &'a SectorArgs,
    r0: f64,
    n: usize,
    rays: usize,
    r_inner: Option<f64>,
    radii: usize,
    detuning: f64,
}

/// Grid points enter the validation when the expected deviation from the
/// series is below this; each must then stay within 100 times its expected
/// deviation.
const SERIES_TRUST: f64 = 1e-6;

fn cmd_tronquee(a: TronqueeArgs) -> Result<Report> {
    let eq = a.eq.equation()?;
    let m = a.eq.m()?;
    let o = ExpOptions::default();
    let seeder = Seeder::new(&eq, m, o.table_order)?;
    let sec = a.sec.sector(&eq, m)?;
    let theta = sec.bisector();
    let seed_err = seeder.seed(a.r0, theta, a.n).err_estimate;
    let r_inner = a.r_inner.unwrap_or_else(|| seeder.reach(a.r0, theta, seed_err, 1e-8));
    let grid = GridSpec::inward(a.rays, r_inner, a.r0, a.radii);
    let anchor = Anchor { detuning: a.detuning, ..Anchor::default() };
    let patch = build_tronquee(&seeder, &sec, a.r0, a.n, &grid, &anchor, &o)?;

    // compare with the optimally truncated series where both the series and
    // the anchor seed error, carried along the free mode, are small
    let e_anchor = seeder.mode_exponent(patch.anchor.r, patch.anchor.theta);
    // the seed is never better than the working precision
    let seed_err = patch.seed_error.max(o.tol);
    let carried = |r: f64, th: f64| match (e_anchor, seeder.mode_exponent(r, th)) {
        (Some(e0), Some(e)) => seed_err * (e - e0).abs().exp(),
        _ => seed_err,
    };
    let mut checked = 0;
    let mut violations = 0;
    let mut max_rel: f64 = 0.0;
    let mut rows = vec![];
    for g in &patch.grid {
        let Some(u) = g.u else { continue };
        let seed = seeder.seed(g.r, g.theta, usize::MAX);
        let s = crate::scalar::to_c64(seed.y[0]);
        let rel = (u - s).norm() / s.norm().max(1e-300);
        let expected = seed.err_estimate + carried(g.r, g.theta);
        let trusted = expected <= SERIES_TRUST;
        if trusted {
            checked += 1;
            max_rel = max_rel.max(rel);
            if rel > 100.0 * expected + 1e-12 {
                violations += 1;
            }
        }
        rows.push(format!(
            "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.3e},{:.3e},{}",
            g.ray, g.r, g.theta, u.re, u.im, s.re, s.im, rel, expected, trusted
        ));
    }
    // a detuned run is exploratory: only the integration itself must succeed
    let pass = if a.detuning != 0.0 {
        patch.incomplete.is_empty()
    } else {
        patch.pole_free && patch.incomplete.is_empty() && checked > 0 && violations == 0
    };
    let cfg = RunConfig {
        n: Some(a.n),
        backend: Some("dd".into()),
        tolerance: Some(o.tol),
        sector_k: Some(a.sec.k),
        sector_kind: Some(format!("{:?}", a.sec.kind).to_lowercase()),
        detuning: Some(a.detuning),
        ..RunConfig::new("tronquee")
    }
    .with_eq(a.eq)
    .geo(&[("r0", a.r0), ("r_inner", r_inner), ("rays", a.rays as f64), ("radii", a.radii as f64)]);
    let body = json!({
        "patch": patch,
        "validation": {
            "points_checked": checked,
            "series_trust": SERIES_TRUST,
            "violations": violations,
            "max_relative_error": max_rel,
        },
        "pole_free": patch.pole_free,
        "max_relative_error": max_rel,
    });
    let csv = csv_rows("ray,r,theta,re_u,im_u,re_series,im_series,relative_error,expected_error,trusted", rows);
    let mut plot = Plot::new(&format!("tronquee patch, {}", patch.branch), "|x|", "|u|");
    for (i, th) in patch.rays.iter().enumerate() {
        let pts: Vec<(f64, f64)> = patch.on_ray(i).filter_map(|g| g.u.map(|u| (g.r, u.norm()))).collect();
        plot = plot.with(Series::line(&format!("arg x = {th:.3}"), pts));
    }
    Ok(Report::new("tronquee", &cfg, body, csv, pass).plot(plot))
}

fn cmd_perturb(
    eq_args: &EqArgs,
    theta: Option<f64>,
    r0: f64,
    eps: f64,
    component: ComponentArg,
    amplification: f64,
) -> Result<Report> {
    let eq = eq_args.equation()?;
    let m = eq_args.m()?;
    let o = ExpOptions::default();
    let seeder = Seeder::new(&eq, m, o.table_order)?;
    let theta = match theta {
        Some(t) => t,
        None => sector(&eq, m, 0, SectorKind::Existence, 0.0)?.bisector(),
    };
    let comp = if component == ComponentArg::U { Perturb::U } else { Perturb::BigU };
    let r = perturbation_decay(&seeder, theta, r0, eps, comp, amplification, false, &o)?;
    let cfg = RunConfig { tolerance: Some(o.tol), ..RunConfig::new("perturb") }
        .with_eq(eq_args)
        .geo(&[("theta", theta), ("r0", r0), ("eps", eps), ("amplification", amplification)]);
    let csv = csv_rows(
        "r,log_delta,used_in_fit",
        r.radii.iter().zip(&r.log_delta).enumerate().map(|(i, (x, y))| format!("{x:.17e},{y:.17e},{}", i >= r.fit_start)),
    );
    let fit: Vec<(f64, f64)> = r.radii[r.fit_start..]
        .iter()
        .map(|x| (*x, r.offset + r.mu * seeder.mode_exponent(*x, theta).unwrap() + r.power * x.ln()))
        .collect();
    let plot = Plot::new(&format!("perturbation, {}", r.branch), "|x|", "log |du|")
        .with(Series::points("measured", r.radii.iter().copied().zip(r.log_delta.iter().copied()).collect()))
        .with(Series::line("fit", fit));
    let pass = r.relative_deviation <= 0.05;
    Ok(Report::new("perturb", &cfg, to_value(&r), csv, pass).plot(plot))
}

#[allow(clippy::too_many_arguments)]
fn cmd_overlap(eq_args: &EqArgs, k: i32, n: usize, r_probe: f64, r0: f64, widen: f64, offset: f64) -> Result<Report> {
    let eq = eq_args.equation()?;
    let o = ExpOptions::default();
    let seeder = Seeder::new(&eq, eq_args.m()?, o.table_order)?;
    let r = overlap_agreement(&seeder, k, n, r_probe, r0, widen, offset, None, &o)?;
    let cfg = RunConfig { n: Some(n), sector_k: Some(k), tolerance: Some(o.tol), ..RunConfig::new("overlap") }
        .with_eq(eq_args)
        .geo(&[("r_probe", r_probe), ("r0", r0), ("widen", widen), ("offset", offset)]);
    let csv = csv_rows(
        "r,difference",
        r.probe_radii.iter().zip(&r.differences).map(|(x, d)| format!("{x:.17e},{d:.6e}")),
    );
    let plot = Plot::new(&format!("overlap, {}", r.branch), "|x|", "log10 |du|")
        .with(Series::points("difference", r.probe_radii.iter().zip(&r.differences).map(|(x, d)| (*x, log10(*d))).collect()));
    let pass = r.both_pole_free && r.max_difference <= 1e-10 && r.separation >= 1e3;
    Ok(Report::new("overlap", &cfg, to_value(&r), csv, pass).plot(plot))
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    beta: &str,
    m: u32,
    cut: f64,
    radius: f64,
    n: usize,
    nodes: usize,
    margin: f64,
    checkpoints: usize,
) -> Result<Report> {
    let eq = make_equation(Family::P3ii, RawParams::p3(Param::int(1), Param::parse(beta)?))?;
    let o = ExpOptions::default();
    let seeder = Seeder::new(&eq, m, o.table_order)?;
    let r = tritronquee_sweep_p3ii(&seeder, cut, radius, n, nodes, margin, checkpoints, &o)?;
    let cfg = RunConfig {
        family: Some("p3ii".into()),
        m: Some(m),
        params: vec![("beta".into(), beta.into())],
        n: Some(n),
        tolerance: Some(o.tol),
        ..RunConfig::new("sweep3ii")
    }
    .geo(&[("cut", cut), ("radius", radius), ("nodes", nodes as f64), ("margin", margin)]);
    let csv = csv_rows(
        "theta,re_u,im_u,re_series,im_series,relative_deviation",
        r.checkpoints.iter().map(|c| {
            format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.3e}",
                c.theta, c.u.re, c.u.im, c.series.re, c.series.im, c.relative_deviation
            )
        }),
    );
    let plot = Plot::new("P3ii sweep: deviation from the series", "arg x", "log10 relative deviation")
        .with(Series::points("checkpoints", r.checkpoints.iter().map(|c| (c.theta, log10(c.relative_deviation))).collect()));
    let pass = r.pole_free && r.max_relative_deviation < 1e-3;
    Ok(Report::new("sweep3ii", &cfg, to_value(&r), csv, pass).plot(plot))
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan(
    eq_args: &EqArgs,
    sec: &SectorArgs,
    r0: f64,
    detuning: f64,
    theta: Option<f64>,
    rays: &str,
    radii: &str,
) -> Result<Report> {
    let eq = eq_args.equation()?;
    let m = eq_args.m()?;
    let o = ExpOptions::default();
    let seeder = Seeder::new(&eq, m, o.table_order)?;
    let s = sec.sector(&eq, m)?;
    let grid = GridSpec { rays: Rays::Angles(parse_list(rays)?), radii: parse_list(radii)? };
    let f = pole_scan(&seeder, &s, r0, theta, detuning, &grid, &o)?;
    let cfg = RunConfig {
        detuning: Some(detuning),
        sector_k: Some(sec.k),
        sector_kind: Some(format!("{:?}", sec.kind).to_lowercase()),
        tolerance: Some(o.tol),
        ..RunConfig::new("scan")
    }
    .with_eq(eq_args)
    .geo(&[("r0", r0)]);
    let csv = csv_rows(
        "ray,re_x,im_x,fit_quality,refinement_stable",
        f.poles.iter().map(|p| {
            let ray = p.ray.map(|r| r.to_string()).unwrap_or_else(|| "arc".into());
            format!("{ray},{:.17e},{:.17e},{:.3e},{}", p.x.re, p.x.im, p.fit_quality, p.refinement_stable)
        }),
    );
    let plot = Plot::new(&format!("poles of the detuned solution, {}", f.branch), "Re x", "Im x")
        .with(Series::points("poles", f.poles.iter().map(|p| (p.x.re, p.x.im)).collect()));
    Ok(Report::new("scan", &cfg, to_value(&f), csv, f.contrast).plot(plot))
}

fn cmd_selftest(seed: u64, quiet: bool) -> Report {
    let cfg = RunConfig { seed: Some(seed), ..RunConfig::new("selftest") };
    let results = acceptance::run_all(seed, None);
    if !quiet {
        for c in &results {
            eprintln!("{}", c.line());
        }
    }
    let pass = results.iter().all(|c| c.pass);
    let csv = csv_rows(
        "id,pass,seconds,budget_seconds,title,detail",
        results.iter().map(|c| {
            format!("{},{},{:.3},{},\"{}\",\"{}\"", c.id, c.pass, c.seconds, c.budget_seconds, c.title, c.detail.replace('"', "'"))
        }),
    );
    let mut r = Report::new("selftest", &cfg, to_value(&results), csv, pass);
    // runtimes vary between runs; keep them out of the reproducible file
    if let Some(arr) = r.json["result"].as_array_mut() {
        for c in arr {
            c.as_object_mut().map(|o| o.remove("seconds"));
        }
    }
    r
}

/// Dispatch a parsed command.
pub fn execute(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Coeffs { eq, n, backend } => cmd_coeffs(eq, *n, *backend),
        Command::Residual { eq, n } => cmd_residual(eq, *n),
        Command::Eigs { k0, kinf } => cmd_eigs(k0, kinf),
        Command::Integrate { eq, theta, r0, r1, arc_to, u0, w0, tol, method, precision } => cmd_integrate(IntegrateArgs {
            eq,
            theta: *theta,
            r0: *r0,
            r1: *r1,
            arc_to: *arc_to,
            u0,
            w0,
            tol: *tol,
            method: *method,
            precision: *precision,
        }),
        Command::Tronquee { eq, sec, r0, n, rays, r_inner, radii, detuning } => cmd_tronquee(TronqueeArgs {
            eq,
            sec,
            r0: *r0,
            n: *n,
            rays: *rays,
            r_inner: *r_inner,
            radii: *radii,
            detuning: *detuning,
        }),
        Command::Perturb { eq, theta, r0, eps, component, amplification } => {
            cmd_perturb(eq, *theta, *r0, *eps, *component, *amplification)
        }
        Command::Overlap { eq, k, n, r_probe, r0, widen, offset } => {
            cmd_overlap(eq, *k, *n, *r_probe, *r0, *widen, *offset)
        }
        Command::Sweep3ii { beta, m, cut, radius, n, nodes, margin, checkpoints } => {
            cmd_sweep(beta, *m, *cut, *radius, *n, *nodes, *margin, *checkpoints)
        }
        Command::Scan { eq, sec, r0, detuning, theta, rays, radii } => {
            cmd_scan(eq, sec, *r0, *detuning, *theta, rays, radii)
        }
        Command::Selftest { seed } => Ok(cmd_selftest(*seed, cli.quiet)),
    }
}

fn output_dir(cli: &Cli) -> Option<PathBuf> {
    cli.out.clone().or_else(|| std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
}

/// Write the data file, the plot and the timestamp sidecar.
pub fn write_outputs(dir: &FsPath, report: &Report, format: Format) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = vec![];
    let data = match format {
        Format::Json => (dir.join(format!("{}.json", report.name)), report.json_text()),
        Format::Csv => (dir.join(format!("{}.csv", report.name)), report.csv.clone()),
    };
    std::fs::write(&data.0, data.1)?;
    written.push(data.0);
    if let Some(svg) = &report.svg {
        let p = dir.join(format!("{}.svg", report.name));
        std::fs::write(&p, svg)?;
        written.push(p);
    }
    let now = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    let meta = json!({ "unix_time": now, "version": env!("CARGO_PKG_VERSION"), "files": written });
    let p = dir.join(format!("{}.meta.json", report.name));
    std::fs::write(&p, serde_json::to_string_pretty(&meta).unwrap() + "\n")?;
    written.push(p);
    Ok(written)
}

fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Invalid(_)
            | Error::BadParameter(_)
            | Error::NonCanonicalParams { .. }
            | Error::BadBranchIndex { .. }
            | Error::BadSectorIndex { .. }
            | Error::ExactBackendUnavailable
            | Error::SeedOutsideSector
            | Error::UnsupportedFamily(_)
    )
}

/// Run the command line `argv` (including the program name); returns the
/// exit code: 0 success, 1 failed check or numerical error, 2 usage error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return if is_usage_error(&e) { 2 } else { 1 };
        }
    };
    if !cli.quiet {
        use std::io::Write;
        let text = match cli.format {
            Format::Json => report.json_text(),
            Format::Csv => report.csv.clone(),
        };
        // a closed pipe is not an error worth reporting
        let _ = std::io::stdout().lock().write_all(text.as_bytes());
    }
    if let Some(dir) = output_dir(&cli) {
        if let Err(e) = write_outputs(&dir, &report, cli.format) {
            eprintln!("error: cannot write to {}: {e}", dir.display());
            return 1;
        }
    }
    if report.pass {
        0
    } else {
        if !cli.quiet {
            eprintln!("check failed");
        }
        1
    }
}
