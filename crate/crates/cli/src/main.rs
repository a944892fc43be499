//! `rfqho`: tables, sampled states and the verification report.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rfqho_core::hermite::{specialized_rows, symbolic_rows};
use rfqho_core::operator::{
    compose_factorization, fourier_remainder, reverted_factorization, scaled_factorization, KOperator,
    OpExpr, SymbolTerm,
};
use rfqho_core::spectral::{excited_state, local_eigenvalue, sample_eigenvalue, sample_state};
use rfqho_core::transform::{
    inverse_fourier, linspace, nongaussianity_k, nongaussianity_x, Grid, QuadratureConfig,
};
use rfqho_core::validate::run_all;
use rfqho_core::{parse_rational, Rational};

const MAX_HERMITE_N: u32 = 20;

#[derive(Parser)]
#[command(name = "rfqho", version, about = "Riesz-Feller fractional oscillator toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Riesz-Feller Hermite factors H̃_0..H̃_n
    Hermite {
        #[arg(long)]
        n: u32,
        /// Specialize exponents at this α (p/q); symbolic otherwise
        #[arg(long, value_parser = rational)]
        alpha: Option<Rational>,
        #[command(flatten)]
        out: Output,
    },
    /// Sampled φ_n (k space) or ψ_n (x space)
    State {
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[arg(long, value_parser = rational)]
        alpha: Rational,
        #[arg(long, value_enum, default_value_t = Space::K)]
        space: Space,
        #[command(flatten)]
        grid: GridArg,
        #[command(flatten)]
        out: Output,
    },
    /// Local eigenvalue λ_n(k)
    Eigenvalue {
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[arg(long, value_parser = rational)]
        alpha: Rational,
        #[arg(long, value_parser = rational, default_value = "0")]
        theta: Rational,
        #[command(flatten)]
        grid: GridArg,
        #[command(flatten)]
        out: Output,
    },
    /// Non-Gaussianity η̃_α (k space) or η_α (x space)
    Nongauss {
        #[arg(long, value_parser = rational)]
        alpha: Rational,
        #[arg(long, value_enum, default_value_t = Space::K)]
        space: Space,
        #[command(flatten)]
        grid: GridArg,
        #[command(flatten)]
        out: Output,
    },
    /// Remainder operators of H_α = B_γ A_δ + ε_γδ
    Factorize {
        #[arg(long, value_parser = rational)]
        delta: Rational,
        #[arg(long, value_parser = rational)]
        gamma: Rational,
        #[arg(long, value_enum, default_value_t = Space::X)]
        space: Space,
        #[arg(long, value_parser = rational, default_value = "0")]
        theta: Rational,
        #[command(flatten)]
        out: Output,
    },
    /// Run every verification check; exit code 1 on any failure
    Validate {
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Space {
    K,
    X,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct GridArg {
    /// min:max:count
    #[arg(long, value_parser = grid_spec, default_value = "-5:5:501", allow_hyphen_values = true)]
    grid: (f64, f64, usize),
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn grid_spec(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [min, max, count] = parts.as_slice() else {
        return Err(format!("expected min:max:count, got '{s}'"));
    };
    let min: f64 = min.parse().map_err(|_| format!("bad grid minimum '{min}'"))?;
    let max: f64 = max.parse().map_err(|_| format!("bad grid maximum '{max}'"))?;
    let count: usize = count.parse().map_err(|_| format!("bad grid count '{count}'"))?;
    if !(min.is_finite() && max.is_finite()) || min >= max {
        return Err(format!("grid needs finite min < max, got {min}:{max}"));
    }
    if count < 2 {
        return Err(format!("grid needs at least 2 points, got {count}"));
    }
    Ok((min, max, count))
}

enum Failure {
    Usage(String),
    Validation(String),
}

impl From<rfqho_core::Error> for Failure {
    fn from(e: rfqho_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn grid_json(grid: &Grid) -> Value {
    json!({
        "axis": grid.axis().as_str(),
        "points": grid.points(),
        "re": grid.values().iter().map(|v| v.re).collect::<Vec<_>>(),
        "im": grid.values().iter().map(|v| v.im).collect::<Vec<_>>(),
    })
}

fn render_grid(grid: &Grid, format: Format) -> String {
    match format {
        Format::Csv => grid.to_csv(),
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&grid_json(grid)).expect("json")),
    }
}

fn points(grid: &GridArg) -> Vec<f64> {
    let (min, max, count) = grid.grid;
    linspace(min, max, count)
}

fn hermite(n: u32, alpha: Option<&Rational>, format: Format) -> Result<String, Failure> {
    if n > MAX_HERMITE_N {
        return Err(Failure::Usage(format!("--n must be at most {MAX_HERMITE_N}, got {n}")));
    }
    Ok(match (alpha, format) {
        (None, Format::Json) => {
            let rows: Vec<Value> = symbolic_rows(n)
                .into_iter()
                .map(|r| json!({"n": r.n, "display": r.terms.to_string(), "terms": r.terms}))
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&rows).expect("json"))
        }
        (Some(a), Format::Json) => {
            let rows: Vec<Value> = specialized_rows(n, a)
                .into_iter()
                .map(|r| json!({"n": r.n, "alpha": r.alpha, "terms": r.terms}))
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&rows).expect("json"))
        }
        (None, Format::Csv) => {
            let mut s = String::from("n,coeff,sgn,j,m\n");
            for r in symbolic_rows(n) {
                for t in r.terms.terms() {
                    s += &format!("{},{},{},{},{}\n", r.n, t.coeff, t.sgn, t.exponent.j, t.exponent.m);
                }
            }
            s
        }
        (Some(a), Format::Csv) => {
            let mut s = String::from("n,coeff,sgn,exponent\n");
            for r in specialized_rows(n, a) {
                for t in r.terms {
                    s += &format!("{},{},{},{}\n", r.n, t.coeff, t.sgn, t.exponent);
                }
            }
            s
        }
    })
}

fn state(n: u32, alpha: &Rational, space: Space, xs: &[f64], format: Format) -> Result<String, Failure> {
    let st = excited_state(n, alpha)?;
    let grid = match space {
        Space::K => sample_state(&st, xs),
        Space::X => inverse_fourier(&st, xs, &QuadratureConfig::default())?,
    };
    Ok(render_grid(&grid, format))
}

fn nongauss(alpha: &Rational, space: Space, xs: &[f64], format: Format) -> Result<String, Failure> {
    let grid = match space {
        Space::K => nongaussianity_k(alpha, xs)?,
        Space::X => nongaussianity_x(alpha, xs, &QuadratureConfig::default())?.grid,
    };
    Ok(render_grid(&grid, format))
}

fn op_rows(name: &str, op: &OpExpr) -> Vec<String> {
    op.words()
        .iter()
        .map(|w| format!("{name},{},{},{}", w.coeff, w.xpow, w.dorder))
        .collect()
}

fn symbol_json(t: &SymbolTerm) -> Value {
    json!({"re": t.re.to_string(), "im": t.im.to_string(), "sgn": t.sgn, "order": t.order.to_string()})
}

fn koperator_json(op: &KOperator) -> Value {
    json!({
        "display": op.to_string(),
        "theta": op.theta.to_string(),
        "multiplier": op.multiplier.iter().map(symbol_json).collect::<Vec<_>>(),
        "derivative": op.derivative.iter().map(symbol_json).collect::<Vec<_>>(),
    })
}

fn koperator_rows(name: &str, op: &KOperator) -> Vec<String> {
    let row = |kind: &str, t: &SymbolTerm| format!("{name},{kind},{},{},{},{}", t.re, t.im, t.sgn, t.order);
    op.multiplier
        .iter()
        .map(|t| row("multiplier", t))
        .chain(op.derivative.iter().map(|t| row("derivative", t)))
        .collect()
}

fn factorize(
    delta: &Rational,
    gamma: &Rational,
    space: Space,
    theta: &Rational,
    format: Format,
) -> Result<String, Failure> {
    let f = compose_factorization(delta, gamma)?;
    let equal = delta == gamma;
    match space {
        Space::X => {
            let reverted = reverted_factorization(delta, gamma)?;
            let scaled = if equal { Some(scaled_factorization(delta)?.2) } else { None };
            Ok(match format {
                Format::Json => {
                    let dump = |op: &OpExpr| json!({"display": op.to_string(), "words": op.to_json()});
                    let mut v = json!({
                        "delta": delta.to_string(),
                        "gamma": gamma.to_string(),
                        "alpha": f.alpha.to_string(),
                        "space": "x",
                        "hamiltonian": dump(&f.hamiltonian),
                        "epsilon_gamma_delta": dump(&f.remainder),
                        "epsilon_delta_gamma": dump(&reverted),
                    });
                    if let Some(eps) = &scaled {
                        v["epsilon_alpha"] = dump(eps);
                    }
                    format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
                }
                Format::Csv => {
                    let mut rows = vec!["operator,coeff,xpow,dorder".to_string()];
                    rows.extend(op_rows("epsilon_gamma_delta", &f.remainder));
                    rows.extend(op_rows("epsilon_delta_gamma", &reverted));
                    if let Some(eps) = &scaled {
                        rows.extend(op_rows("epsilon_alpha", eps));
                    }
                    rows.join("\n") + "\n"
                }
            })
        }
        Space::K => {
            let op = fourier_remainder(gamma, delta, theta)?;
            let scaled = equal.then(|| op.scale(&(Rational::from_integer(1.into()) / &f.alpha)));
            Ok(match format {
                Format::Json => {
                    let mut v = json!({
                        "delta": delta.to_string(),
                        "gamma": gamma.to_string(),
                        "alpha": f.alpha.to_string(),
                        "space": "k",
                        "epsilon_gamma_delta": koperator_json(&op),
                    });
                    if let Some(eps) = &scaled {
                        v["epsilon_alpha"] = koperator_json(eps);
                    }
                    format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
                }
                Format::Csv => {
                    let mut rows = vec!["operator,kind,re,im,sgn,order".to_string()];
                    rows.extend(koperator_rows("epsilon_gamma_delta", &op));
                    if let Some(eps) = &scaled {
                        rows.extend(koperator_rows("epsilon_alpha", eps));
                    }
                    rows.join("\n") + "\n"
                }
            })
        }
    }
}

fn validate(format: Format) -> Result<String, Failure> {
    let report = run_all();
    let text = match format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => {
            let mut s = String::from("id,status\n");
            for r in &report.results {
                let status = serde_json::to_value(r.status).expect("status");
                s += &format!("{},{}\n", r.id, status.as_str().unwrap_or_default());
            }
            s
        }
    };
    if report.passed() {
        Ok(text)
    } else {
        Err(Failure::Validation(text))
    }
}

fn emit(text: &str, out: &Output) -> io::Result<()> {
    match &out.out {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn dispatch(command: &Command) -> (Result<String, Failure>, &Output) {
    match command {
        Command::Hermite { n, alpha, out } => {
            (hermite(*n, alpha.as_ref(), out.format.unwrap_or(Format::Json)), out)
        }
        Command::State { n, alpha, space, grid, out } => {
            (state(*n, alpha, *space, &points(grid), out.format.unwrap_or(Format::Csv)), out)
        }
        Command::Eigenvalue { n, alpha, theta, grid, out } => {
            let result = local_eigenvalue(*n, alpha, theta)
                .map(|l| render_grid(&sample_eigenvalue(&l, &points(grid)), out.format.unwrap_or(Format::Csv)))
                .map_err(Failure::from);
            (result, out)
        }
        Command::Nongauss { alpha, space, grid, out } => {
            (nongauss(alpha, *space, &points(grid), out.format.unwrap_or(Format::Csv)), out)
        }
        Command::Factorize { delta, gamma, space, theta, out } => {
            (factorize(delta, gamma, *space, theta, out.format.unwrap_or(Format::Json)), out)
        }
        Command::Validate { out } => (validate(out.format.unwrap_or(Format::Json)), out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, out) = dispatch(&cli.command);
    let (text, code) = match result {
        Ok(text) => (text, ExitCode::SUCCESS),
        Err(Failure::Validation(text)) => (text, ExitCode::from(1)),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&text, out) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    code
}
