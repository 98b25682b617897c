//! Command-line surface: the constant table, certified dimension brackets,
//! tail-condition checks, step-chain verification, and SVG figures.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use gasket::apollonian::{
    descartes_next, monotonicity_witness_h, word_matrix, Letter, Subsystem, Word,
};
use gasket::distortion::{composite_constants, per_map_distortion_h};
use gasket::interval::sqrt3;
use gasket::moebius::map_disk;
use gasket::pressure::{
    dim_bracket, dim_upper_bound_cofinite, EnumerationBudget, EnumerationMode,
};
use gasket::spectrum::{
    canonical_steps, check_tail_condition, report_to_csv, run_chain, Provider, SpectrumStep,
};
use gasket::{Disk, GasketError, RigorousScalar};

const EXIT_CERTIFIED_FAIL: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_PRECONDITION: i32 = 3;

/// Disk ceiling for figure rendering; past this an SVG stops being a figure.
const RENDER_DISK_CAP: u64 = 300_000;
const RENDER_MAX_ITERS: u32 = 4;

#[derive(Parser)]
#[command(name = "gasket", version, about = "certified Apollonian-gasket dimension bounds")]
struct Cli {
    /// Omit volatile fields (wall time) so repeated runs are byte-identical.
    #[arg(long, global = true)]
    no_meta: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the distortion-constant table with enclosure widths.
    Constants,
    /// Certified dimension bracket for a subsystem.
    Dim {
        /// Subsystem, e.g. "n in {3,4,5}", "n <= 26", "n != {1,2}", "all".
        spec: String,
        /// Cap on the block depth (default 8).
        #[arg(long)]
        depth: Option<u32>,
        /// Cap on enumerated words per block system.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Certified)]
        mode: ModeArg,
        /// Head truncation for cofinite subsystems.
        #[arg(long, default_value_t = 120)]
        truncation: u32,
        /// Write the JSON report here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check the discarded-letter tail condition at one exponent.
    Tail {
        t2: f64,
        k: f64,
        m_start: u32,
        /// Exact partial-sum terms for the direct check.
        #[arg(long, default_value_t = 10_000_000)]
        direct_limit: u32,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Verify every row of a dimension-spectrum step file.
    Chain {
        stepfile: PathBuf,
        #[arg(long, value_enum, default_value_t = ProviderArg::Assumed)]
        provider: ProviderArg,
        /// Word budget for recomputed bounds (computed/mixed providers).
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Render a subsystem's image disks as an SVG figure.
    Render {
        /// Subsystem, as for `dim`.
        spec: String,
        /// Word length to draw, cumulatively from length 1.
        #[arg(long)]
        iters: u32,
        #[arg(short, long)]
        output: PathBuf,
        /// Head truncation for cofinite subsystems.
        #[arg(long, default_value_t = 12)]
        truncation: u32,
        /// Also draw this many tangent chain circles with the two
        /// generating circles they rest on.
        #[arg(long, default_value_t = 0)]
        chain: u32,
    },
    /// Write the bundled step table or its verification report.
    Export {
        #[arg(long, value_enum, default_value_t = ExportWhat::Steps)]
        what: ExportWhat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum ModeArg {
    Certified,
    Exploratory,
}

#[derive(Copy, Clone, ValueEnum)]
enum ProviderArg {
    Assumed,
    Computed,
    Mixed,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Csv,
}

#[derive(Copy, Clone, ValueEnum)]
enum ExportWhat {
    /// The bundled 18-row step table as JSON.
    Steps,
    /// Verification report for the bundled table (JSON).
    Report,
    /// Same report flattened to CSV.
    Csv,
}

struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn classify(err: GasketError) -> Failure {
    let code = match err {
        GasketError::Parse(_) | GasketError::BudgetExceeded => EXIT_USAGE,
        _ => EXIT_PRECONDITION,
    };
    fail(code, format!("error: {err}"))
}

fn parse_spec(spec: &str) -> Result<Subsystem, Failure> {
    spec.parse::<Subsystem>().map_err(classify)
}

fn emit(path: &Option<PathBuf>, body: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, body)
            .map_err(|e| fail(EXIT_USAGE, format!("error: cannot write {}: {e}", p.display()))),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            let body = body.strip_suffix('\n').unwrap_or(body);
            // a closed pipe means the consumer has all it wants
            match writeln!(out, "{body}") {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
                r => r.map_err(|e| fail(EXIT_USAGE, format!("error: cannot write output: {e}"))),
            }
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("{}", f.message);
            f.code
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, Failure> {
    match cli.cmd {
        Cmd::Constants => cmd_constants(),
        Cmd::Dim {
            spec,
            depth,
            budget,
            mode,
            truncation,
            output,
        } => cmd_dim(&spec, depth, budget, mode, truncation, &output, cli.no_meta),
        Cmd::Tail {
            t2,
            k,
            m_start,
            direct_limit,
            format,
            output,
        } => cmd_tail(t2, k, m_start, direct_limit, format, &output, cli.no_meta),
        Cmd::Chain {
            stepfile,
            provider,
            budget,
            format,
            output,
        } => cmd_chain(&stepfile, provider, budget, format, &output, cli.no_meta),
        Cmd::Render {
            spec,
            iters,
            output,
            truncation,
            chain,
        } => cmd_render(&spec, iters, &output, truncation, chain),
        Cmd::Export { what, output } => cmd_export(what, &output),
    }
}

fn line(out: &mut String, label: &str, v: RigorousScalar) {
    let _ = writeln!(
        out,
        "{label:<12} {:.15}   [width {:.1e}]",
        v.midpoint(),
        v.width()
    );
}

fn cmd_constants() -> Result<i32, Failure> {
    let c = composite_constants().map_err(classify)?;
    let mut out = String::new();
    line(&mut out, "lambda", sqrt3());
    for n in 1..=22 {
        line(&mut out, &format!("h({n})"), per_map_distortion_h(n));
    }
    for n in 1..=2 {
        line(&mut out, &format!("H({n})"), monotonicity_witness_h(n));
    }
    line(&mut out, "K1", c.k1);
    line(&mut out, "koebe(n=1)", c.koebe_n1);
    line(&mut out, "koebe(n=2)", c.koebe_n2);
    line(&mut out, "koebe(n=3)", c.koebe_n3);
    let _ = writeln!(
        out,
        "K(all)       {:.15} certified <= 5.900319",
        c.k_all.upper
    );
    let _ = writeln!(
        out,
        "K(n>1)       {:.15} certified <= 5.03661",
        c.k_n_gt_1.upper
    );
    let _ = writeln!(
        out,
        "K(n>2)       {:.15} certified <= 4.3655",
        c.k_n_gt_2.upper
    );
    emit(&None, out.trim_end())?;
    Ok(0)
}

fn mode_of(m: ModeArg) -> EnumerationMode {
    match m {
        ModeArg::Certified => EnumerationMode::Certified,
        ModeArg::Exploratory => EnumerationMode::Exploratory,
    }
}

fn cmd_dim(
    spec: &str,
    depth: Option<u32>,
    budget_words: u64,
    mode: ModeArg,
    truncation: u32,
    output: &Option<PathBuf>,
    no_meta: bool,
) -> Result<i32, Failure> {
    let f = parse_spec(spec)?;
    let budget = EnumerationBudget {
        max_words: budget_words,
        max_depth: depth.unwrap_or(8),
        mode: mode_of(mode),
    };
    let start = Instant::now();
    let mut report = if f.is_finite() {
        let b = dim_bracket(&f, &budget).map_err(classify)?;
        let alphabet = 6 * f.members().expect("finite").len() as u64;
        let words: u64 = (0..b.depth_upper).try_fold(1u64, |acc, _| acc.checked_mul(alphabet))
            .unwrap_or(u64::MAX);
        serde_json::json!({
            "subsystem": f,
            "lower": b.lower,
            "upper": b.upper,
            "depth_lower": b.depth_lower,
            "depth_upper": b.depth_upper,
            "mode": mode_name(budget.mode),
            "words_enumerated": words,
        })
    } else {
        let est = dim_upper_bound_cofinite(&f, truncation, &budget).map_err(classify)?;
        serde_json::json!({
            "subsystem": f,
            "lower": serde_json::Value::Null,
            "upper": est.value,
            "depth_lower": serde_json::Value::Null,
            "depth_upper": est.depth,
            "mode": mode_name(budget.mode),
            "words_enumerated": 6 * est.depth as u64 + 3,
        })
    };
    if !no_meta {
        report["wall_time_s"] = serde_json::json!(round_ms(start.elapsed().as_secs_f64()));
    }
    emit(output, &pretty(&report))?;
    Ok(0)
}

fn mode_name(m: EnumerationMode) -> &'static str {
    match m {
        EnumerationMode::Certified => "certified",
        EnumerationMode::Exploratory => "exploratory",
    }
}

fn round_ms(s: f64) -> f64 {
    (s * 1000.0).round() / 1000.0
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("report serializes")
}

fn cmd_tail(
    t2: f64,
    k: f64,
    m_start: u32,
    direct_limit: u32,
    format: FormatArg,
    output: &Option<PathBuf>,
    no_meta: bool,
) -> Result<i32, Failure> {
    if m_start == 0 {
        return Err(fail(EXIT_USAGE, "error: M starts at 1"));
    }
    let start = Instant::now();
    let verdict = check_tail_condition(t2, k, m_start, direct_limit).map_err(classify)?;
    let body = match format {
        FormatArg::Json => {
            let mut v = serde_json::to_value(&verdict).expect("verdict serializes");
            v["t2"] = serde_json::json!(t2);
            v["K"] = serde_json::json!(k);
            if !no_meta {
                v["wall_time_s"] = serde_json::json!(round_ms(start.elapsed().as_secs_f64()));
            }
            pretty(&v)
        }
        _ => {
            let mut out = String::new();
            let n = verdict.n_closed_form.expect("closed form found");
            let _ = writeln!(
                out,
                "tail condition at t2 = {t2}, K = {k}, M >= {m_start}: {}",
                if verdict.passed { "PASS" } else { "FAIL" }
            );
            let _ = writeln!(out, "closed-form threshold N = {n}");
            match verdict.m_verified_to {
                Some(hi) => {
                    let _ = writeln!(
                        out,
                        "direct check M = {m_start}..{hi} with partial sums of {} terms",
                        verdict.direct_limit
                    );
                }
                None => {
                    let _ = writeln!(out, "no direct check needed: M starts past N");
                }
            }
            if let Some(m) = verdict.first_failure_m {
                let _ = writeln!(out, "first failing M = {m}");
            }
            if verdict.passed {
                let _ = writeln!(
                    out,
                    "certifies every exponent in ({}, {t2}]",
                    verdict.reusable_above
                );
            }
            out.trim_end().to_string()
        }
    };
    emit(output, &body)?;
    Ok(if verdict.passed { 0 } else { EXIT_CERTIFIED_FAIL })
}

fn provider_of(p: ProviderArg, budget_words: u64) -> Provider {
    let budget = EnumerationBudget {
        max_words: budget_words,
        max_depth: 8,
        mode: EnumerationMode::Certified,
    };
    match p {
        ProviderArg::Assumed => Provider::assumed(),
        ProviderArg::Computed => Provider::computed(budget),
        ProviderArg::Mixed => Provider::mixed(budget),
    }
}

fn cmd_chain(
    stepfile: &PathBuf,
    provider: ProviderArg,
    budget_words: u64,
    format: FormatArg,
    output: &Option<PathBuf>,
    no_meta: bool,
) -> Result<i32, Failure> {
    let raw = fs::read_to_string(stepfile)
        .map_err(|e| fail(EXIT_USAGE, format!("error: cannot read {}: {e}", stepfile.display())))?;
    let steps: Vec<SpectrumStep> = serde_json::from_str(&raw)
        .map_err(|e| fail(EXIT_USAGE, format!("error: malformed step file: {e}")))?;
    if steps.is_empty() {
        return Err(fail(EXIT_USAGE, "error: step file has no rows"));
    }
    let start = Instant::now();
    let report = run_chain(&steps, &provider_of(provider, budget_words));
    let body = match format {
        FormatArg::Json => {
            let mut v = serde_json::to_value(&report).expect("report serializes");
            if !no_meta {
                v["wall_time_s"] = serde_json::json!(round_ms(start.elapsed().as_secs_f64()));
            }
            pretty(&v)
        }
        FormatArg::Csv => report_to_csv(&report),
        FormatArg::Text => {
            let mut out = String::new();
            let mut passed = 0usize;
            for c in &report.certificates {
                if c.passed {
                    passed += 1;
                }
                let tail = if c.check_tail.passed {
                    match c.check_tail.n_closed_form {
                        Some(n) => format!("ok(N={n})"),
                        None => "ok".to_string(),
                    }
                } else if !c.check_tail.k_valid {
                    "bad K".to_string()
                } else {
                    match c.check_tail.first_failure_m {
                        Some(m) => format!("fails at M={m}"),
                        None => "fail".to_string(),
                    }
                };
                let _ = writeln!(
                    out,
                    "step {:>2}  F = {:<18} [{:.4}, {:.4}]  upper={} lower={} tail={}  {}",
                    c.step.index,
                    c.step.f.to_string(),
                    c.step.t1,
                    c.step.t2,
                    verdict_word(c.check_dim_upper.passed, c.check_dim_upper.assumed),
                    verdict_word(c.check_dim_lower.passed, c.check_dim_lower.assumed),
                    tail,
                    if c.passed { "PASS" } else { "FAIL" }
                );
            }
            let _ = writeln!(out, "{passed}/{} passed", report.certificates.len());
            for iv in &report.covered_union {
                let _ = writeln!(out, "covered: [{}, {}]", iv[0], iv[1]);
            }
            for g in &report.gaps {
                let _ = writeln!(out, "gap: ({}, {})", g[0], g[1]);
            }
            if report.assumes_mu_segment {
                let _ = writeln!(out, "plus the assumed segment [0, 1/2)");
            }
            if let Some(claim) = report.final_claim {
                let _ = writeln!(out, "claim: [{}, {}] within the dimension spectrum", claim[0], claim[1]);
            }
            out.trim_end().to_string()
        }
    };
    emit(output, &body)?;
    Ok(if report.all_passed { 0 } else { EXIT_CERTIFIED_FAIL })
}

fn verdict_word(passed: bool, assumed: bool) -> &'static str {
    match (passed, assumed) {
        (true, true) => "assumed",
        (true, false) => "ok",
        (false, _) => "FAIL",
    }
}

fn render_alphabet(f: &Subsystem, truncation: u32) -> Result<Vec<Letter>, Failure> {
    let members: Vec<u32> = match f {
        Subsystem::FiniteSet(_) => f.members().expect("finite"),
        Subsystem::Cofinite { excluded } => {
            if excluded.iter().any(|&n| n > truncation) {
                return Err(fail(
                    EXIT_USAGE,
                    "error: truncation must reach every excluded index",
                ));
            }
            (1..=truncation).filter(|n| !excluded.contains(n)).collect()
        }
    };
    Ok(members
        .iter()
        .flat_map(|&n| (1..=6).map(move |k| Letter::new(k, n)))
        .collect())
}

fn push_circle(out: &mut String, cx: f64, cy: f64, r: f64) {
    // SVG y grows downward; flip to keep the mathematical orientation
    let _ = writeln!(out, r#"    <circle cx="{cx:.9}" cy="{:.9}" r="{r:.9}"/>"#, -cy);
}

fn cmd_render(
    spec: &str,
    iters: u32,
    output: &PathBuf,
    truncation: u32,
    chain: u32,
) -> Result<i32, Failure> {
    if iters > RENDER_MAX_ITERS {
        return Err(fail(
            EXIT_USAGE,
            format!("error: at most {RENDER_MAX_ITERS} iterations render legibly"),
        ));
    }
    let f = parse_spec(spec)?;
    let alphabet = render_alphabet(&f, truncation)?;
    let a = alphabet.len() as u64;
    let mut total = 0u64;
    let mut level = 1u64;
    for _ in 0..iters {
        level = level.checked_mul(a).unwrap_or(u64::MAX);
        total = total.saturating_add(level);
        if total > RENDER_DISK_CAP {
            return Err(fail(EXIT_USAGE, "error: too many disks at this depth"));
        }
    }

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="-1.05 -1.05 2.1 2.1" width="720" height="720">"#
    );
    let _ = writeln!(svg, r##"  <g fill="none" stroke="#000" stroke-width="0.004">"##);
    push_circle(&mut svg, 0.0, 0.0, 1.0);
    for len in 1..=iters {
        let mut idx = vec![0usize; len as usize];
        loop {
            let word = Word::new(idx.iter().map(|&i| alphabet[i]).collect());
            let (m, _) = word_matrix(&word);
            let disk = map_disk(&m, &Disk::unit()).map_err(classify)?;
            push_circle(
                &mut svg,
                disk.center.re.midpoint(),
                disk.center.im.midpoint(),
                disk.radius.midpoint(),
            );
            // odometer over alphabet positions, most significant first
            let mut pos = idx.len();
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < alphabet.len() {
                    break;
                }
                idx[pos] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    let _ = writeln!(svg, "  </g>");

    if chain > 0 {
        let l = sqrt3();
        let _ = writeln!(svg, r##"  <g fill="none" stroke="#555" stroke-width="0.004">"##);
        // the two mutually tangent circles the chain rests on
        push_circle(&mut svg, 1.0, l.midpoint(), l.midpoint());
        push_circle(&mut svg, 1.0, -l.midpoint(), l.midpoint());
        let mut curv = RigorousScalar::point(2.0) + l;
        for _ in 0..chain {
            let r = RigorousScalar::point(1.0) / curv;
            let x = RigorousScalar::point(1.0) - ((l + r).sqr() - RigorousScalar::point(3.0)).sqrt();
            push_circle(&mut svg, x.midpoint(), 0.0, r.midpoint());
            curv = descartes_next(RigorousScalar::point(1.0) / l, RigorousScalar::point(1.0) / l, curv)
                .map_err(classify)?;
        }
        let _ = writeln!(svg, "  </g>");
    }
    let _ = writeln!(svg, "</svg>");

    fs::write(output, svg)
        .map_err(|e| fail(EXIT_USAGE, format!("error: cannot write {}: {e}", output.display())))?;
    Ok(0)
}

fn cmd_export(what: ExportWhat, output: &Option<PathBuf>) -> Result<i32, Failure> {
    let steps = canonical_steps();
    let body = match what {
        ExportWhat::Steps => {
            pretty(&serde_json::to_value(&steps).expect("steps serialize"))
        }
        ExportWhat::Report => {
            let report = run_chain(&steps, &Provider::assumed());
            pretty(&serde_json::to_value(&report).expect("report serializes"))
        }
        ExportWhat::Csv => report_to_csv(&run_chain(&steps, &Provider::assumed())),
    };
    emit(output, &body)?;
    Ok(0)
}
