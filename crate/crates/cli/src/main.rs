//! `hauptmodul`: runs the per-level pipeline stage by stage or end to end.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hauptmodul_core::exact::QSeries;
use hauptmodul_core::hauptmodul::{eisenstein_j_level1, is_known_level, level_fixture_path, load_level};
use hauptmodul_core::pipeline::{run_pipeline, verify_levels, Config, LevelReport, LevelSummary, Status};
use hauptmodul_core::schwarzian_ode::{assemble_and_solve, build_system, extend_series};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(name = "hauptmodul", version, about = "Hauptmoduln of genus-zero Fricke groups")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value = "fixtures")]
    fixtures: PathBuf,
    #[arg(long, default_value_t = 192)]
    precision_bits: usize,
    /// Matching tolerance for series values.
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, default_value = ".hauptmodul-cache")]
    cache_dir: PathBuf,
    #[arg(long)]
    no_cache: bool,
}

impl Common {
    fn config(&self) -> Config {
        Config {
            fixtures: self.fixtures.clone(),
            bits: self.precision_bits,
            tolerance: self.tolerance,
            ..Config::default()
        }
    }
}

#[derive(Args)]
struct LevelArgs {
    #[arg(long)]
    level: u32,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Cmd {
    /// q-expansion, extended by the differential equation when P, Q are known.
    Expand {
        #[command(flatten)]
        args: LevelArgs,
        #[arg(long, default_value_t = 40)]
        terms: usize,
    },
    /// Linear system and its solution P, Q, h.
    Solve(LevelArgs),
    /// Irreducible factors of h.
    Factor(LevelArgs),
    /// Elliptic point values matched to roots of h.
    Match(LevelArgs),
    /// Class-field table.
    Classfield(LevelArgs),
    /// Radical tower verification.
    Radicals(LevelArgs),
    /// Full pipeline report.
    Run(LevelArgs),
    /// Runs every level and summarizes failures.
    VerifyAll {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        workers: usize,
    },
    /// Renders a saved JSON report.
    Report {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut s = std::io::stdout().lock();
            s.write_all(body.as_bytes())?;
            if !body.ends_with('\n') {
                s.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn render<T: Serialize>(fmt: Format, value: &T, text: impl FnOnce() -> String) -> Result<String> {
    Ok(match fmt {
        Format::Json => serde_json::to_string_pretty(value)?,
        Format::Text => text(),
    })
}

fn check_level(n: u32) -> Result<()> {
    if !is_known_level(n) {
        bail!("{n} is not one of the 44 genus-zero levels");
    }
    Ok(())
}

/// Hash of the level, every fixture file it reads and the config.
fn cache_key(level: u32, cfg: &Config) -> Result<String> {
    let mut h = Sha256::new();
    h.update(level.to_le_bytes());
    h.update(serde_json::to_vec(cfg)?);
    let mut files = vec![level_fixture_path(&cfg.fixtures, level)];
    let towers = cfg.fixtures.join("towers");
    if let Ok(rd) = fs::read_dir(&towers) {
        let prefix = format!("{level:03}_");
        let mut t: Vec<PathBuf> = rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.file_name().and_then(|f| f.to_str()).is_some_and(|f| f.starts_with(&prefix)))
            .collect();
        t.sort();
        files.extend(t);
    }
    for f in files {
        h.update(f.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
        match fs::read(&f) {
            Ok(b) => {
                h.update((b.len() as u64).to_le_bytes());
                h.update(b);
            }
            Err(_) => h.update(b"<missing>"),
        }
    }
    Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

fn write_atomic(path: &Path, body: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        path.file_name().unwrap().to_string_lossy(),
        std::process::id()
    ));
    fs::write(&tmp, body)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Pipeline report, read from or written to the cache.
fn level_report(level: u32, common: &Common) -> Result<Option<LevelReport>> {
    check_level(level)?;
    let cfg = common.config();
    let started = Instant::now();
    let path = if common.no_cache {
        None
    } else {
        let key = cache_key(level, &cfg)?;
        Some(common.cache_dir.join(format!("{level:03}-{key}.json")))
    };
    if let Some(p) = &path {
        if let Ok(bytes) = fs::read(p) {
            if let Ok(r) = serde_json::from_slice::<LevelReport>(&bytes) {
                eprintln!("level {level}: cached report {}", p.display());
                return Ok(Some(r));
            }
        }
    }
    let Some(rep) = run_pipeline(level, &cfg)? else {
        return Ok(None);
    };
    if let Some(p) = &path {
        write_atomic(p, &serde_json::to_vec_pretty(&rep)?)?;
    }
    eprintln!("level {level}: pipeline took {:.2?}", started.elapsed());
    Ok(Some(rep))
}

fn require_report(level: u32, common: &Common) -> Result<LevelReport> {
    level_report(level, common)?.with_context(|| {
        format!("no fixture at {}", level_fixture_path(&common.fixtures, level).display())
    })
}

fn series_text(s: &QSeries) -> String {
    s.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| format!("{:>5}  {c}\n", s.min_exponent() + i as i64))
        .collect()
}

fn expand(args: &LevelArgs, terms: usize) -> Result<String> {
    let level = args.level;
    check_level(level)?;
    let c = &args.common;
    let series = if level == 1 {
        eisenstein_j_level1(terms)
    } else {
        let data = load_level(&c.fixtures, level)?.context("no fixture for this level")?;
        let j = data.q_expansion.context("fixture has no q-expansion")?;
        if (j.truncation() as usize) >= terms {
            j.truncate(terms as i64)
        } else {
            let (p, q) = match (&data.expected.p, &data.expected.q) {
                (Some(p), Some(q)) => (p.clone(), q.clone()),
                _ => {
                    let s = assemble_and_solve(&j, data.elliptic_points.len())?;
                    (s.p, s.q)
                }
            };
            extend_series(&j, &p, &q, terms as i64)?
        }
    };
    let coeffs: Vec<String> = series.coeffs().iter().map(|c| c.to_string()).collect();
    render(c.format, &serde_json::json!({"level": level, "min_exponent": series.min_exponent(), "coefficients": coeffs}), || {
        series_text(&series)
    })
}

fn solve(args: &LevelArgs) -> Result<String> {
    let level = args.level;
    check_level(level)?;
    let c = &args.common;
    let (j, points) = if level == 1 {
        (eisenstein_j_level1(16), 2)
    } else {
        let data = load_level(&c.fixtures, level)?.context("no fixture for this level")?;
        let n = data.elliptic_points.len();
        (data.q_expansion.context("fixture has no q-expansion")?, n)
    };
    let n = 2 * (points - 1);
    let (sys, _) = build_system(&j, n)?;
    let sol = assemble_and_solve(&j, points)?;
    let equations: Vec<String> = (0..sys.dim()).map(|r| sys.render(r)).collect();
    render(
        c.format,
        &serde_json::json!({"level": level, "n": n, "equations": equations, "P": sol.p, "Q": sol.q, "h": sol.h}),
        || {
            let mut s: String = equations.iter().map(|e| format!("{e} = 0\n")).collect();
            s += &format!("P(y) = {}\nQ(y) = {}\nh(y) = {}\n", sol.p, sol.q, sol.h);
            s
        },
    )
}

fn stage_view(level: u32, common: &Common, what: &str) -> Result<(String, bool)> {
    let rep = require_report(level, common)?;
    let ok = rep.ok();
    let body = match what {
        "factor" => render(common.format, &serde_json::json!({"level": level, "h": rep.h, "factors": rep.factors}), || {
            let mut s = format!("h(y) = {}\n", rep.h.as_ref().map_or("-".into(), |h| h.to_string()));
            for f in &rep.factors {
                s += &format!("  {f}\n");
            }
            s
        })?,
        "match" => render(common.format, &rep.points, || {
            rep.points
                .iter()
                .map(|p| {
                    format!(
                        "{:<28} ord {}  {} {}  -> factor {}  residual {}\n",
                        p.point,
                        p.order,
                        p.value.0,
                        p.value.1,
                        p.factor.map_or("-".into(), |f| f.to_string()),
                        p.residual.map_or("-".into(), |r| format!("{r:.1e}"))
                    )
                })
                .collect()
        })?,
        "classfield" => render(common.format, &(&rep.class_field, &rep.expected_rows), || {
            let mut s = String::new();
            for r in &rep.class_field.rows {
                s += &format!(
                    "{:>6} {:<24} {:>3}  {}\n",
                    r.discriminant, r.order_descriptor, r.class_number, r.generating_polynomial
                );
            }
            for m in &rep.class_field.integer_moduli {
                s += &format!("point {} (order {}): j = {}\n", m.point, m.order, m.value);
            }
            s
        })?,
        "radicals" => render(common.format, &rep.radicals, || {
            rep.radicals
                .iter()
                .map(|t| {
                    format!(
                        "{}: {} branches, {} distinct, max residual {:.1e}\n",
                        t.target, t.branch_count, t.distinct, t.max_residual
                    )
                })
                .collect()
        })?,
        _ => render(common.format, &rep, || rep.to_text())?,
    };
    let mut body = body;
    if !ok && what != "run" && common.format == Format::Text {
        for f in &rep.failures {
            body += &format!("FAILED {f}\n");
        }
    }
    Ok((body, ok))
}

fn verify_all(common: &Common, workers: usize) -> Result<(String, bool)> {
    let summary = verify_levels(workers, |n| match level_report(n, common) {
        Ok(Some(r)) => LevelSummary {
            level: n,
            status: if r.ok() { Status::Ok } else { Status::Failed },
            failures: r.failures,
        },
        Ok(None) => LevelSummary {
            level: n,
            status: Status::Skipped,
            failures: vec![],
        },
        Err(e) => LevelSummary {
            level: n,
            status: Status::Failed,
            failures: vec![format!("{e:#}")],
        },
    });
    let ok = summary.failures == 0;
    let body = render(common.format, &summary, || {
        let mut s = String::new();
        for l in &summary.levels {
            s += &format!("{:>4}  {}\n", l.level, format!("{:?}", l.status).to_lowercase());
            for f in &l.failures {
                s += &format!("        {f}\n");
            }
        }
        s += &format!(
            "{} levels, {} failed, {} skipped\n",
            summary.levels.len(),
            summary.failures,
            summary.skipped
        );
        s
    })?;
    Ok((body, ok))
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<bool> {
    let cli = Cli::parse();
    let (body, out, ok) = match &cli.cmd {
        Cmd::Expand { args, terms } => (expand(args, *terms)?, args.common.out.clone(), true),
        Cmd::Solve(a) => (solve(a)?, a.common.out.clone(), true),
        Cmd::Factor(a) | Cmd::Match(a) | Cmd::Classfield(a) | Cmd::Radicals(a) | Cmd::Run(a) => {
            let what = match &cli.cmd {
                Cmd::Factor(_) => "factor",
                Cmd::Match(_) => "match",
                Cmd::Classfield(_) => "classfield",
                Cmd::Radicals(_) => "radicals",
                _ => "run",
            };
            let (b, ok) = stage_view(a.level, &a.common, what)?;
            (b, a.common.out.clone(), ok)
        }
        Cmd::VerifyAll { common, workers } => {
            let (b, ok) = verify_all(common, *workers)?;
            (b, common.out.clone(), ok)
        }
        Cmd::Report { input, out, format } => {
            let bytes = fs::read(input).with_context(|| format!("reading {}", input.display()))?;
            let rep: LevelReport = serde_json::from_slice(&bytes).context("not a level report")?;
            let ok = rep.ok();
            (render(*format, &rep, || rep.to_text())?, out.clone(), ok)
        }
    };
    emit(out.as_deref(), &body)?;
    Ok(ok)
}
