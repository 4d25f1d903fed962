use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use conecalc::arith::{fmt_complex, fmt_rational, parse_complex, parse_complex_vector, parse_rational, CQ, Q};
use conecalc::fan::{build_relative_fan, EmbeddingConfig, RelativeFan, BUILTIN_CONFIGS};
use conecalc::indicator::{verify_identity_timed, IdentityContext, IdentityId, IdentityReport, SamplerConfig};
use conecalc::io::corpus::CorpusConfig;
use conecalc::io::json::{cone_from_json, fan_from_json, to_pretty, ConeJson};
use conecalc::io::suite::{run_suite, SuiteConfig};
use conecalc::io::svg::{emit_figure, fan_scene, FigureParams, DEFAULT_RESOLUTION};
use conecalc::period::{
    computed_c_values, eisenstein_correction_terms, period_monte_carlo, period_report, Character, ScalarReport,
    ToyFormData,
};
use conecalc::transforms::{
    is_regular, laplace_cone, laplace_gamma, laplace_gamma_symbolic, monte_carlo_cross_check, MeromorphicTransform,
    Poly,
};
use conecalc::{Cone, Error, RationalVector};

const SEED_VAR: &str = "CONECALC_SEED";

#[derive(Parser)]
#[command(name = "conecalc", version, about = "Exact cone truncation calculus")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, global = true, default_value_t = Output::Json)]
    output: Output,
    /// Add wall-clock times to reports.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Check a cone identity at sampled exact rational points.
    Verify {
        /// Identity name, or `all` for every single-cone identity.
        #[arg(long)]
        identity: String,
        /// Cone as JSON, inline or a file path.
        #[arg(long)]
        cone: Option<String>,
        /// Subdivision of the cone (fan JSON) for `gamma_fan_refinement`.
        #[arg(long)]
        cells: Option<String>,
        /// Embedding (built-in name or JSON file) for the relative identities.
        #[arg(long = "fan")]
        fan: Option<String>,
        /// Truncation point; repeat for several.
        #[arg(long = "T", allow_hyphen_values = true)]
        t: Vec<String>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 20)]
        max_coord: i64,
    },
    /// Laplace transform of a cone or of its Γ function.
    Transform {
        #[arg(long)]
        cone: String,
        /// Polynomial weight, e.g. `1 + x1*x2`.
        #[arg(long, default_value = "1")]
        q: String,
        /// Evaluation point, complex entries allowed: `-1, -2+i`.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// Transform Γ(C, ·, T) instead of C.
        #[arg(long)]
        gamma: bool,
        /// Truncation point for `--gamma`; symbolic in T when omitted.
        #[arg(long = "T", allow_hyphen_values = true)]
        t: Option<String>,
        /// Cross-check the value by Monte Carlo integration.
        #[arg(long)]
        mc: bool,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Relative fan of an embedding.
    Fan {
        /// Built-in name or embedding JSON file.
        #[arg(long)]
        config: String,
        #[arg(long = "emit-svg")]
        emit_svg: Option<PathBuf>,
        #[arg(long = "emit-json")]
        emit_json: Option<PathBuf>,
        /// Truncation point for the refinement panel of the SVG.
        #[arg(long = "T", allow_hyphen_values = true)]
        t: Option<String>,
        /// Points sampled by the partition check.
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Regularized period of a toy form.
    Period {
        #[arg(long)]
        config: String,
        /// Form JSON file (or inline JSON).
        #[arg(long)]
        form: String,
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<String>,
        #[arg(long = "Tprime", allow_hyphen_values = true)]
        t_prime: Option<String>,
        /// Include the truncated period as a function of T.
        #[arg(long)]
        expansion: bool,
        /// For integrable forms, compare with a Monte Carlo integral.
        #[arg(long = "check-integrability")]
        check_integrability: bool,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Correction terms and poles for a class of maximal cells.
    Eisenstein {
        #[arg(long)]
        config: String,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        /// JSON map from cell id to c_Q; computed values are used when omitted.
        #[arg(long)]
        cq: Option<String>,
        #[arg(long = "T", allow_hyphen_values = true)]
        t: String,
        /// Evaluate every term at this s.
        #[arg(long, allow_hyphen_values = true)]
        s: Option<String>,
    },
    /// Write one of the bundled figures as SVG.
    Figure {
        /// fig3, fig6, fig7 or fig8 (also: gamma, sigma).
        name: String,
        #[arg(long)]
        cone: Option<String>,
        #[arg(long = "T", allow_hyphen_values = true)]
        t: Option<String>,
        #[arg(long)]
        config: Option<String>,
        #[arg(long)]
        resolution: Option<usize>,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a bundled verification suite.
    Suite {
        #[arg(default_value = "acceptance")]
        name: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1_000_000)]
        mc_samples: usize,
        #[arg(long, default_value_t = 100)]
        forms: usize,
        #[arg(long, default_value_t = 54)]
        corpus_count: usize,
        #[arg(long)]
        corpus_seed: Option<u64>,
        /// Extra cones (fan JSON) appended to the random corpus.
        #[arg(long)]
        corpus: Option<String>,
        #[arg(long = "out-dir")]
        out_dir: Option<PathBuf>,
    },
}

/// Outcome of a command: what to print and the exit code.
struct Outcome {
    text: String,
    code: u8,
}

impl Outcome {
    fn json(v: &impl serde::Serialize, passed: bool) -> Self {
        Outcome { text: to_pretty(v), code: if passed { 0 } else { 1 } }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) => {
            print!("{}", o.text);
            ExitCode::from(o.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Inline JSON when it looks like JSON, otherwise a file path.
fn read_source(s: &str) -> Result<String, Error> {
    let t = s.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(s.to_string())
    } else {
        std::fs::read_to_string(s).map_err(|e| Error::Input(format!("cannot read {s}: {e}")))
    }
}

fn load_cone(s: &str) -> Result<Arc<Cone>, Error> {
    cone_from_json(&read_source(s)?).map(Arc::new)
}

fn load_config(s: &str) -> Result<EmbeddingConfig, Error> {
    if BUILTIN_CONFIGS.contains(&s) {
        EmbeddingConfig::builtin(s)
    } else {
        EmbeddingConfig::from_json(&read_source(s)?)
    }
}

fn load_fan(s: &str) -> Result<RelativeFan, Error> {
    build_relative_fan(&load_config(s)?)
}

fn vector(s: &str) -> Result<Vec<Q>, Error> {
    RationalVector::parse(s).map(|v| v.0)
}

fn vector_or_zero(s: Option<&String>, n: usize) -> Result<Vec<Q>, Error> {
    let v = match s {
        Some(s) => vector(s)?,
        None => vec![Q::from_integer(0.into()); n],
    };
    if v.len() != n {
        return Err(Error::Dimension { expected: n, got: v.len() });
    }
    Ok(v)
}

/// Explicit flag, then the environment, then the default.
fn seed(flag: Option<u64>, default: u64) -> Result<u64, Error> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| Error::Input(format!("{SEED_VAR}={v} is not an integer"))),
        Err(_) => Ok(default),
    }
}

fn strings(v: &[Q]) -> Vec<String> {
    v.iter().map(fmt_rational).collect()
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Verify { identity, cone, cells, fan, t, samples, seed: s, max_coord } => {
            let cfg = SamplerConfig { samples: *samples, max_coord: *max_coord, seed: seed(*s, 1)? };
            let ids: Vec<IdentityId> = if identity == "all" {
                IdentityId::CONE_IDS.to_vec()
            } else {
                vec![identity.parse()?]
            };
            let mut ctx = IdentityContext::default();
            if let Some(c) = cone {
                ctx.cone = Some(load_cone(c)?);
            }
            if let Some(f) = cells {
                ctx.fan = Some(fan_from_json(&read_source(f)?)?);
            }
            if let Some(f) = fan {
                ctx.relative = Some(Arc::new(load_fan(f)?));
            }
            ctx.ts = t.iter().map(|x| vector(x)).collect::<Result<_, _>>()?;
            let reports: Vec<IdentityReport> =
                ids.iter().map(|&id| verify_identity_timed(id, &ctx, &cfg, cli.timing)).collect::<Result<_, _>>()?;
            let passed = reports.iter().all(|r| r.passed);
            if reports.len() == 1 {
                Ok(Outcome::json(&reports[0], passed))
            } else {
                Ok(Outcome::json(&json!({ "passed": passed, "reports": reports }), passed))
            }
        }
        Command::Transform { cone, q, lambda, gamma, t, mc, samples, seed: s } => {
            let c = load_cone(cone)?;
            let n = c.ambient_dim();
            let weight = Poly::parse(q, n)?;
            let tv = t.as_deref().map(vector).transpose()?;
            let tr: MeromorphicTransform = match (gamma, &tv) {
                (false, _) => laplace_cone(&c, &weight)?,
                (true, Some(tv)) => laplace_gamma(&c, tv, &weight)?,
                (true, None) => laplace_gamma_symbolic(&c, &weight)?,
            };
            let mut out = json!({
                "cone": format!("{c}"),
                "q": q,
                "kind": if *gamma { "gamma" } else { "cone" },
                "transform": tr.to_string(),
            });
            let mut passed = true;
            if let Some(tv) = &tv {
                out["T"] = json!(strings(tv));
            }
            if let Some(l) = lambda {
                let lam: Vec<CQ> = parse_complex_vector(l)?;
                if lam.len() != n {
                    return Err(Error::Dimension { expected: n, got: lam.len() });
                }
                out["lambda"] = json!(lam.iter().map(fmt_complex).collect::<Vec<_>>());
                out["regular"] = json!(is_regular(&lam, &c)?);
                if *gamma && tv.is_none() {
                    out["expansion"] = json!(tr.to_polyexp(&lam)?.to_string());
                } else {
                    let v = tr.eval(&lam, None)?;
                    out["value"] = serde_json::to_value(ScalarReport::from(&v))?;
                    if *mc {
                        if *gamma {
                            return Err(Error::Input("--mc applies to cone transforms only".into()));
                        }
                        let est = monte_carlo_cross_check(&c, &weight, &lam, *samples, seed(*s, 1)?)?;
                        let err = est.relative_error(v.to_c64());
                        passed = err < 0.02 || est.agrees_with(v.to_c64(), 4.0);
                        out["monte_carlo"] = serde_json::to_value(&est)?;
                        out["relative_error"] = json!(err);
                        out["agrees"] = json!(passed);
                    }
                }
            } else if *mc {
                return Err(Error::Input("--mc needs --lambda".into()));
            }
            Ok(Outcome::json(&out, passed))
        }
        Command::Fan { config, emit_svg, emit_json, t, samples, seed: s } => {
            let f = load_fan(config)?;
            let tv = t.as_deref().map(vector).transpose()?;
            let svg = || -> Result<String, Error> { fan_scene(&f, tv.as_deref(), DEFAULT_RESOLUTION)?.render() };
            if let Some(p) = emit_svg {
                std::fs::write(p, svg()?)?;
            }
            let partition = f.check_partition(*samples, seed(*s, 9)?)?;
            let passed = partition.passed() && f.discrepancies.is_empty();
            let report = fan_report(&f, &partition)?;
            if let Some(p) = emit_json {
                std::fs::write(p, to_pretty(&report))?;
            }
            if cli.output == Output::Svg {
                return Ok(Outcome { text: svg()?, code: if passed { 0 } else { 1 } });
            }
            Ok(Outcome::json(&report, passed))
        }
        Command::Period { config, form, xi, t_prime, expansion, check_integrability, samples, seed: s } => {
            let f = load_fan(config)?;
            let n = f.dim();
            let form = ToyFormData::from_json(&read_source(form)?, &f)?;
            let xi = match xi {
                Some(x) => Character::new(parse_complex_vector(x)?),
                None => Character::zero(n),
            };
            let tp = vector_or_zero(t_prime.as_ref(), n)?;
            let rep = period_report(&f, &form, &xi, &tp, *expansion)?;
            let mut out = serde_json::to_value(&rep)?;
            let mut passed = rep.constant_term_matches != Some(false);
            if *check_integrability && rep.integrable {
                let exact = rep.value.as_ref().map(|v| (v.approx[0], v.approx[1])).unwrap_or((0.0, 0.0));
                let est = period_monte_carlo(&f, &form, &xi, &tp, *samples, seed(*s, 1)?)?;
                let err = est.relative_error(exact);
                let ok = err < 0.02 || est.agrees_with(exact, 4.0);
                passed &= ok;
                out["monte_carlo"] = serde_json::to_value(&est)?;
                out["relative_error"] = json!(err);
                out["agrees"] = json!(ok);
            }
            if !rep.regularity.regular {
                // the value is undefined; report the offending exponents
                print!("{}", to_pretty(&out));
                let off: Vec<(String, usize)> =
                    rep.regularity.offending.iter().map(|o| (o.cell.clone(), o.index)).collect();
                return Err(Error::Irregular(off));
            }
            for w in &rep.warnings {
                eprintln!("warning: {w}");
            }
            Ok(Outcome::json(&out, passed))
        }
        Command::Eisenstein { config, c, cq, t, s } => {
            let f = load_fan(config)?;
            let c = parse_rational(c)?;
            let tv = vector(t)?;
            let cqs = match cq {
                None => computed_c_values(&f)?,
                Some(src) => {
                    let raw: BTreeMap<String, Value> = serde_json::from_str(&read_source(src)?)?;
                    let mut m = BTreeMap::new();
                    for (id, v) in raw {
                        let x = match v {
                            Value::String(s) => parse_rational(&s)?,
                            Value::Number(n) => parse_rational(&n.to_string())?,
                            other => return Err(Error::Input(format!("c_Q for {id}: {other}"))),
                        };
                        m.insert(f.cell_by_id(&id)?.parabolic.clone(), x);
                    }
                    m
                }
            };
            let class: Vec<_> = cqs.keys().cloned().collect();
            let rep = eisenstein_correction_terms(&f, &class, &c, &cqs, &tv, &BTreeMap::new())?;
            let mut out = serde_json::to_value(&rep)?;
            if let Some(s) = s {
                let sv = parse_complex(s)?;
                let vals: Vec<Value> = rep
                    .terms
                    .iter()
                    .map(|term| match term.eval(&sv) {
                        Ok(v) => serde_json::to_value(ScalarReport::from(&v)).unwrap_or(Value::Null),
                        Err(e) => json!(e.to_string()),
                    })
                    .collect();
                out["s"] = json!(fmt_complex(&sv));
                out["values"] = Value::Array(vals);
            }
            Ok(Outcome::json(&out, true))
        }
        Command::Figure { name, cone, t, config, resolution, out } => {
            let params = FigureParams {
                cone: cone.as_deref().map(load_cone).transpose()?.map(|c| (*c).clone()),
                t: t.as_deref().map(vector).transpose()?,
                config: config.as_deref().map(load_config).transpose()?,
                resolution: *resolution,
            };
            let svg = emit_figure(name, &params)?;
            let text = if cli.output == Output::Json {
                to_pretty(&json!({ "figure": name, "svg": svg }))
            } else {
                svg
            };
            match out {
                Some(p) => {
                    std::fs::write(p, &text)?;
                    Ok(Outcome { text: String::new(), code: 0 })
                }
                None => Ok(Outcome { text, code: 0 }),
            }
        }
        Command::Suite { name, samples, seed: s, mc_samples, forms, corpus_count, corpus_seed, corpus, out_dir } => {
            let seed = seed(*s, 1)?;
            let extra = corpus.as_deref().map(|c| read_source(c).and_then(|j| fan_from_json(&j))).transpose()?;
            let cfg = SuiteConfig {
                suite: name.clone(),
                corpus: CorpusConfig {
                    count: *corpus_count,
                    seed: corpus_seed.or_else(|| std::env::var(SEED_VAR).ok().and_then(|v| v.parse().ok())).unwrap_or(2024),
                    ..CorpusConfig::default()
                },
                extra_cones: extra.unwrap_or_default(),
                samples: *samples,
                seed,
                mc_samples: *mc_samples,
                forms_per_fan: *forms,
                out_dir: out_dir.clone(),
                timing: cli.timing,
                ..SuiteConfig::default()
            };
            let (code, report) = run_suite(&cfg)?;
            Ok(Outcome { text: report.to_json(), code: code as u8 })
        }
    }
}

fn fan_report(f: &RelativeFan, partition: &conecalc::fan::PartitionReport) -> Result<Value, Error> {
    let mut cells = Vec::new();
    for c in f.cells() {
        let mut v = json!({
            "id": c.id(),
            "subgroup_parabolic": c.subgroup_parabolic.to_string(),
            "dim": c.cone.dim(),
            "maximal": c.is_maximal(),
            "epsilon": c.epsilon,
            "rho": strings(&c.rho),
            "witness": strings(&c.witness),
            "cone": serde_json::to_value(ConeJson::from_cone(&c.cone))?,
        });
        if c.is_maximal() {
            v["c_coefficient"] = serde_json::to_value(f.c_coefficient(&c.parabolic)?)?;
        }
        cells.push(v);
    }
    Ok(json!({
        "config": f.config.name,
        "dim": f.dim(),
        "cells": cells,
        "discrepancies": f.discrepancies,
        "partition": serde_json::to_value(partition)?,
    }))
}
