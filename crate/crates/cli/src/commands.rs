use std::fmt::Write as _;
use std::path::Path;

use cnz_core::analysis::{classify, maximal_monomials};
use cnz_core::bounds::{bounds_for, product_bound, BoundReport, BoundValue};
use cnz_core::oracle::{count_nonzeros_with, tightness_family, verify_bounds_with, CountOptions};
use cnz_core::pit::identity_test;
use cnz_core::puzzle::{exhaustive_search, local_search, PuzzleInstance};
use cnz_core::transform::{coefficient_via_grid, grid_values, trim};
use cnz_core::{parse_dag, parse_poly, ExponentVector, GridSpec, Polynomial, RingSpec, Variables};
use serde_json::{json, Value};

use crate::{Cli, CliError, Command, Format, PuzzleMode};

type Result<T> = std::result::Result<T, CliError>;

struct Loaded {
    poly: Polynomial,
    names: Vec<String>,
}

impl Loaded {
    fn render(&self, f: &Polynomial) -> String {
        f.render(Some(&self.names))
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn ring(cli: &Cli, default: &str) -> Result<RingSpec> {
    Ok(cli.ring.as_deref().unwrap_or(default).parse()?)
}

fn grid(cli: &Cli, ring: RingSpec) -> Result<GridSpec> {
    let path = cli
        .grid
        .as_ref()
        .ok_or_else(|| CliError::Usage("this command needs --grid".into()))?;
    Ok(GridSpec::parse(&read(path)?, ring)?)
}

/// Variables from `--vars`, else inferred from `text`. Indexed variables are
/// widened to `min_arity` so that a polynomial may omit trailing variables.
fn variables(cli: &Cli, text: &str, min_arity: usize) -> Result<Variables> {
    if let Some(v) = &cli.vars {
        return Ok(Variables::Named(v.clone()));
    }
    Ok(match Variables::infer(text)? {
        Variables::Indexed(n) => Variables::Indexed(n.max(min_arity)),
        Variables::Named(v) if v.is_empty() => Variables::Indexed(min_arity),
        named => named,
    })
}

fn load(cli: &Cli, path: &Path, ring: RingSpec, min_arity: usize) -> Result<Loaded> {
    let text = read(path)?;
    let vars = variables(cli, &text, min_arity)?;
    let poly = parse_poly(&text, &vars, ring)?;
    Ok(Loaded {
        poly,
        names: vars.names(),
    })
}

fn options(cli: &Cli) -> CountOptions {
    CountOptions {
        grid_limit: cli.limit_grid as u128,
        ..CountOptions::default()
    }
}

fn envelope(command: &str, fields: Value) -> Value {
    let mut out = json!({ "schema": 1, "command": command });
    if let (Value::Object(o), Value::Object(f)) = (&mut out, fields) {
        o.extend(f);
    }
    out
}

fn bound_value(v: &BoundValue) -> String {
    match v {
        BoundValue::Count(n) => n.to_string(),
        BoundValue::ZeroProbability(r) => format!("zero probability <= {r}"),
        BoundValue::ZeroDensity(x) => format!("zero density <= {x:.6}"),
        BoundValue::Exponent(r) => format!("exponent {r}"),
    }
}

fn bound_line(b: &BoundReport) -> String {
    let mut line = format!("{:<36} {}", b.name, bound_value(&b.value));
    if let Some(d) = &b.witness_d {
        let _ = write!(line, "  d={d}");
    }
    if let Some(e) = &b.witness_e {
        let _ = write!(line, " e={e}");
    }
    if !b.certified {
        line.push_str("  (uncertified)");
    }
    if b.asymptotic {
        line.push_str("  (asymptotic)");
    }
    line
}

fn grid_text(g: &GridSpec) -> String {
    g.sets()
        .iter()
        .map(|s| {
            let items: Vec<String> = s.iter().map(|x| x.to_string()).collect();
            format!("{{{}}}", items.join(","))
        })
        .collect::<Vec<_>>()
        .join(" x ")
}

fn puzzle_text(inst: &PuzzleInstance, count: usize) -> String {
    format!(
        "a = {:?}\nb = {:?}\nu = {:?}\nv = {:?}\nagreements: {count}\n\n{}",
        inst.a(),
        inst.b(),
        inst.u(),
        inst.v(),
        inst.render_tables()
    )
}

pub fn run(cli: &Cli) -> Result<String> {
    let (value, text) = match &cli.command {
        Command::Analyze { poly } => analyze(cli, poly)?,
        Command::Bounds { poly } => bounds(cli, poly)?,
        Command::Verify { poly, list_zeros } => verify(cli, poly, *list_zeros)?,
        Command::Trim { poly } => trim_cmd(cli, poly)?,
        Command::Coeff { poly, monomial } => coeff(cli, poly, monomial)?,
        Command::Pit {
            expr1,
            expr2,
            samples,
            trials,
        } => pit(cli, expr1, expr2, *samples, *trials)?,
        Command::Puzzle { mode } => puzzle(cli, mode)?,
        Command::Tightness { degrees } => tightness(cli, degrees)?,
    };
    Ok(match cli.format {
        Format::Json => serde_json::to_string_pretty(&value).expect("serializable"),
        Format::Text => text.trim_end().to_string(),
    })
}

fn analyze(cli: &Cli, path: &Path) -> Result<(Value, String)> {
    let ring = ring(cli, "int")?;
    let f = load(cli, path, ring, 0)?;
    let reports = classify(&f.poly)?;
    let maximal = maximal_monomials(&f.poly)?;
    let mut text = format!("polynomial: {}\nmaximal monomials:", f.render(&f.poly));
    for m in &maximal {
        let _ = write!(text, " {m}");
    }
    text.push('\n');
    for r in &reports {
        let _ = write!(text, "{:<22} d={}", r.condition.name(), r.witness_d);
        if let Some(e) = &r.witness_e {
            let _ = write!(text, " e={e}");
        }
        let _ = writeln!(text, " holds={}", r.holds);
    }
    let value = envelope(
        "analyze",
        json!({
            "ring": ring,
            "variables": f.names,
            "polynomial": f.render(&f.poly),
            "maximal_monomials": maximal,
            "reports": reports,
        }),
    );
    Ok((value, text))
}

fn bounds(cli: &Cli, path: &Path) -> Result<(Value, String)> {
    let ring = ring(cli, "int")?;
    let g = grid(cli, ring)?;
    let f = load(cli, path, ring, g.arity())?;
    let reports = bounds_for(&f.poly, &g)?;
    let mut text = format!(
        "polynomial: {}\ngrid: {}\n",
        f.render(&f.poly),
        grid_text(&g)
    );
    for b in &reports {
        let _ = writeln!(text, "{}", bound_line(b));
    }
    let value = envelope(
        "bounds",
        json!({
            "ring": ring,
            "variables": f.names,
            "polynomial": f.render(&f.poly),
            "grid": g,
            "bounds": reports,
        }),
    );
    Ok((value, text))
}

fn verify(cli: &Cli, path: &Path, list_zeros: bool) -> Result<(Value, String)> {
    let ring = ring(cli, "int")?;
    let g = grid(cli, ring)?;
    let f = load(cli, path, ring, g.arity())?;
    let mut rep = verify_bounds_with(&f.poly, &g, &options(cli))?;
    if !list_zeros {
        rep.zero_set = None;
    }
    let mut text = format!(
        "polynomial: {}\ngrid: {}\nnonzeros: {}\nzeros: {}\ngrid size: {}\n",
        f.render(&f.poly),
        grid_text(&g),
        rep.nonzero_count,
        rep.zero_count,
        rep.grid_size
    );
    for c in &rep.per_bound {
        let verdict = if c.sound { "sound" } else { "UNSOUND" };
        let _ = writeln!(
            text,
            "{}  {verdict} slack={}",
            bound_line(&c.bound),
            c.slack
        );
    }
    let _ = writeln!(text, "certified violations: {}", rep.certified_violations);
    if let Some(zs) = &rep.zero_set {
        text.push_str("zeros:\n");
        for z in zs {
            let pt: Vec<String> = z.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(text, "  ({})", pt.join(", "));
        }
    }
    let value = envelope(
        "verify",
        json!({
            "ring": ring,
            "variables": f.names,
            "polynomial": f.render(&f.poly),
            "grid": g,
            "report": rep,
        }),
    );
    Ok((value, text))
}

fn trim_cmd(cli: &Cli, path: &Path) -> Result<(Value, String)> {
    let ring = ring(cli, "int")?;
    let g = grid(cli, ring)?;
    let f = load(cli, path, ring, g.arity())?;
    let t = trim(&f.poly, &g)?;
    let partial = if t.is_zero() {
        vec![0; t.arity()]
    } else {
        t.degrees()?.partial
    };
    let text = format!(
        "polynomial: {}\ngrid: {}\ntrimmed: {}\n",
        f.render(&f.poly),
        grid_text(&g),
        f.render(&t)
    );
    let value = envelope(
        "trim",
        json!({
            "ring": ring,
            "variables": f.names,
            "polynomial": f.render(&f.poly),
            "grid": g,
            "trimmed": f.render(&t),
            "partial_degrees": partial,
        }),
    );
    Ok((value, text))
}

fn coeff(cli: &Cli, path: &Path, monomial: &[u32]) -> Result<(Value, String)> {
    let ring = ring(cli, "int")?;
    let g = grid(cli, ring)?;
    let f = load(cli, path, ring, g.arity())?;
    let d = ExponentVector::new(monomial.to_vec());
    let values = grid_values(&f.poly, &g)?;
    let via_grid = coefficient_via_grid(&values, &g, &d)?;
    let stored = f.poly.coefficient(&d);
    let maximal = !f.poly.is_zero() && maximal_monomials(&f.poly)?.contains(&d);
    let text = format!(
        "polynomial: {}\nmonomial: {d}\nfrom grid values: {via_grid}\nstored coefficient: {stored}\nmaximal: {maximal}\n",
        f.render(&f.poly)
    );
    let value = envelope(
        "coeff",
        json!({
            "ring": ring,
            "variables": f.names,
            "polynomial": f.render(&f.poly),
            "grid": g,
            "monomial": d,
            "coefficient_via_grid": via_grid,
            "stored_coefficient": stored,
            "maximal": maximal,
            "agrees": via_grid == stored,
        }),
    );
    Ok((value, text))
}

fn pit(cli: &Cli, e1: &str, e2: &str, samples: u64, trials: u64) -> Result<(Value, String)> {
    let ring = ring(cli, "fp:101")?;
    let vars = variables(cli, &format!("({e1}) + ({e2})"), 0)?;
    let g1 = parse_dag(e1, &vars, ring)?;
    let g2 = parse_dag(e2, &vars, ring)?;
    let verdict = identity_test(&g1, &g2, samples, trials, cli.seed)?;
    let outcome = match &verdict.outcome {
        cnz_core::pit::Outcome::NonzeroWitnessed {
            trial,
            point,
            value,
        } => {
            let pt: Vec<String> = point.iter().map(|x| x.to_string()).collect();
            format!(
                "different: trial {trial} at ({}) gives {value}",
                pt.join(", ")
            )
        }
        cnz_core::pit::Outcome::AllZero {
            trials,
            failure_bound,
        } => format!("all {trials} trials agree; failure probability <= {failure_bound}"),
    };
    let text = format!(
        "{outcome}\ndegree bound: {}\nsamples per variable: {}\nseed: {}\n",
        verdict.degree_bound_used, verdict.samples_per_var, verdict.seed
    );
    let value = envelope(
        "pit",
        json!({
            "ring": ring,
            "variables": vars.names(),
            "expr1": e1,
            "expr2": e2,
            "seed": cli.seed,
            "verdict": verdict,
        }),
    );
    Ok((value, text))
}

fn puzzle(cli: &Cli, mode: &PuzzleMode) -> Result<(Value, String)> {
    match *mode {
        PuzzleMode::Exhaustive { s, range, budget } => {
            let r = exhaustive_search(s, range, budget as u128)?;
            let text = format!(
                "{}\ncandidates examined: {}\n",
                puzzle_text(&r.best, r.count),
                r.candidates
            );
            let value = envelope(
                "puzzle",
                json!({
                    "mode": "exhaustive",
                    "s": s,
                    "range": range,
                    "result": r,
                    "tables": r.best.render_tables(),
                }),
            );
            Ok((value, text))
        }
        PuzzleMode::Local { s, budget, range } => {
            let r = local_search(s, budget, cli.seed, range)?;
            let mut text = puzzle_text(&r.best, r.count);
            let _ = write!(
                text,
                "\nseed: {}\nsteps: {}\nrestarts: {}\nimprovements:",
                r.seed, r.steps, r.restarts
            );
            for i in &r.history {
                let _ = write!(text, " {}@{}", i.count, i.step);
            }
            let value = envelope(
                "puzzle",
                json!({
                    "mode": "local",
                    "s": s,
                    "range": range,
                    "seed": cli.seed,
                    "result": r,
                    "tables": r.best.render_tables(),
                }),
            );
            Ok((value, text))
        }
    }
}

fn tightness(cli: &Cli, degrees: &[u32]) -> Result<(Value, String)> {
    let ring = ring(cli, "int")?;
    let g = grid(cli, ring)?;
    let d = ExponentVector::new(degrees.to_vec());
    let f = tightness_family(&g, &d, None)?;
    let names = variables(cli, "", g.arity())?.names();
    let counts = count_nonzeros_with(&f, &g, &options(cli))?;
    let bound = product_bound(&g.sizes(), degrees)?;
    let slack = counts.nonzeros as i128 - bound as i128;
    let rendered = f.render(Some(&names));
    let text = format!(
        "polynomial: {rendered}\ngrid: {}\nnonzeros: {}\nproduct bound: {bound}\nslack: {slack}\n",
        grid_text(&g),
        counts.nonzeros
    );
    let value = envelope(
        "tightness",
        json!({
            "ring": ring,
            "variables": names,
            "degrees": d,
            "grid": g,
            "polynomial": rendered,
            "nonzero_count": counts.nonzeros,
            "product_bound": bound,
            "slack": slack,
        }),
    );
    Ok((value, text))
}
