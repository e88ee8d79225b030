use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mahler::json::{operator_from_str, operator_to_value, poly_to_fragment, rational_to_string};
use mahler::newton::{lower_polygon, mu_nu, ramification_data, upper_polygon, PolygonEdge};
use mahler::normalize::{gcrd, normalize_l0, Normalized, OperatorFamily};
use mahler::poly::parse_rational;
use mahler::rational_solver::{
    bell_coons_test_with, rational_basis_with, transcendence_test_with, RationalFunction, TestMethod, Verdict,
};
use mahler::solver::{
    certify_puiseux, certify_series, polynomial_basis_with, puiseux_basis_all_with, puiseux_basis_with,
    series_basis_with, PuiseuxSeries, SolveOptions,
};
use mahler::{Error, Exec, MahlerOperator, Poly, Rational, Result};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "mahler", version, about = "Exact solutions of linear Mahler equations over Q")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Re-verify every solution before printing.
    #[arg(long, global = true)]
    certify: bool,
    /// Fail on a zero trailing coefficient instead of normalizing.
    #[arg(long, global = true)]
    no_auto_normalize: bool,
    /// Evaluate the engine on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Oracle {
    Rational,
    BellCoons,
}

#[derive(Subcommand)]
enum Command {
    /// Newton polygons, (nu, mu) and ramification data.
    Newton { file: String },
    /// Power-series solutions through x^order.
    Series {
        file: String,
        #[arg(long)]
        order: usize,
    },
    /// Polynomial solutions.
    Poly { file: String },
    /// Rational-function solutions.
    Rational { file: String },
    /// Puiseux-series solutions through exponent order.
    Puiseux {
        file: String,
        #[arg(long)]
        order: u64,
        #[arg(long)]
        ramification: Option<u64>,
    },
    /// Equivalent operator with nonzero trailing coefficient.
    Normalize { file: String },
    /// Greatest common right divisor of a family.
    Gcrd {
        #[arg(required = true)]
        files: Vec<String>,
    },
    /// Decide whether the series with the given prefix is rational.
    Transcendence {
        file: String,
        #[arg(long, value_delimiter = ',', required = true)]
        initial: Vec<String>,
        #[arg(long, value_enum, default_value_t = Oracle::Rational)]
        oracle: Oracle,
    },
}

struct Output {
    json: Value,
    text: String,
}

fn read_operator(path: &str) -> Result<MahlerOperator> {
    let mut s = String::new();
    let read = if path == "-" {
        std::io::stdin().read_to_string(&mut s).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|c| s = c)
    };
    read.map_err(|e| Error::Malformed(format!("{path}: {e}")))?;
    operator_from_str(&s)
}

fn q(r: &Rational) -> Value {
    Value::String(rational_to_string(r))
}

fn poly_json(p: &Poly) -> Value {
    json!(poly_to_fragment(p))
}

fn edge_json(e: &PolygonEdge) -> Value {
    json!({
        "left": [e.left.0, e.left.1],
        "right": [e.right.0, e.right.1],
        "slope": q(&e.slope),
        "admissible": e.admissible,
    })
}

fn x_power(e: &Rational) -> String {
    if e.is_integer() {
        format!("x^{e}")
    } else {
        format!("x^({e})")
    }
}

fn puiseux_text(s: &PuiseuxSeries) -> String {
    let mut out: Vec<String> = s.terms.iter().map(|(e, c)| format!("({c})*{}", x_power(e))).collect();
    out.push(format!("O({})", x_power(&s.truncation_order)));
    out.join(" + ")
}

fn invariant(what: &str) -> Error {
    Error::Invariant(format!("certification failed: {what}"))
}

fn series_like(kind: &str, ramification: u64, elements: &[PuiseuxSeries], certs: Option<Vec<Rational>>) -> Output {
    let docs: Vec<Value> = elements
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut d = json!({
                "terms": s.terms.iter().map(|(e, c)| json!([q(e), q(c)])).collect::<Vec<_>>(),
                "truncation_order": q(&s.truncation_order),
            });
            if let Some(c) = &certs {
                d["certificate"] = q(&c[i]);
            }
            d
        })
        .collect();
    let text = elements.iter().map(puiseux_text).collect::<Vec<_>>().join("\n");
    Output { json: json!({"kind": kind, "ramification": ramification, "elements": docs}), text }
}

fn rational_json(f: &RationalFunction) -> Value {
    json!({"numerator": poly_json(f.numerator()), "x_power": f.x_power(), "denominator": poly_json(f.denominator())})
}

fn normalized_output(n: &Normalized) -> Output {
    let mut doc = operator_to_value(&n.primitive);
    doc["content"] = poly_json(&n.content);
    Output { json: doc, text: format!("{}\ncontent: {}", n.primitive, n.content) }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

fn run(cli: &Cli) -> Result<Output> {
    let opts = SolveOptions {
        auto_normalize: !cli.no_auto_normalize,
        exec: if cli.sequential { Exec::Sequential } else { Exec::default() },
    };
    match &cli.command {
        Command::Newton { file } => {
            let l = read_operator(file)?;
            let lower = lower_polygon(&l)?;
            let upper = upper_polygon(&l)?;
            let (mu, nu) = match mu_nu(&l) {
                Ok((m, n)) => (q(&m), q(&n)),
                Err(_) => (Value::Null, Value::Null),
            };
            let (qs, n) = match ramification_data(&l) {
                Ok((qs, n)) => (json!(qs), json!(n)),
                Err(_) => (Value::Null, Value::Null),
            };
            let text = lower
                .iter()
                .map(|e| format!("lower {:?} -> {:?} slope {} admissible {}", e.left, e.right, e.slope, e.admissible))
                .chain(upper.iter().map(|e| format!("upper {:?} -> {:?} slope {}", e.left, e.right, e.slope)))
                .chain([format!("mu {mu} nu {nu} Q {qs} N {n}")])
                .collect::<Vec<_>>()
                .join("\n");
            let doc = json!({
                "kind": "newton",
                "lower": lower.iter().map(edge_json).collect::<Vec<_>>(),
                "upper": upper.iter().map(edge_json).collect::<Vec<_>>(),
                "nu": nu, "mu": mu, "Q": qs, "N": n,
            });
            Ok(Output { json: doc, text })
        }
        Command::Series { file, order } => {
            let l = read_operator(file)?;
            let basis = series_basis_with(&l, *order, &opts)?;
            let certs = if cli.certify {
                let target = if l.coeff(0).is_zero() { normalize_l0(&l)?.primitive } else { l.clone() };
                let v0 = target.coeff(0).valuation().unwrap_or(0);
                let want = Rational::from_integer((v0 + *order as u64).into());
                let mut cs = Vec::new();
                for s in &basis.elements {
                    let e = certify_series(&target, s)?;
                    if e < want {
                        return Err(invariant("series residual below the guaranteed order"));
                    }
                    cs.push(e);
                }
                Some(cs)
            } else {
                None
            };
            let elements: Vec<PuiseuxSeries> = basis.elements.iter().map(PuiseuxSeries::from_series).collect();
            Ok(series_like("series_basis", 1, &elements, certs))
        }
        Command::Poly { file } => {
            let l = read_operator(file)?;
            let basis = polynomial_basis_with(&l, &opts)?;
            if cli.certify {
                for p in &basis.elements {
                    if !l.apply_poly(p)?.is_zero() {
                        return Err(invariant("polynomial residual is nonzero"));
                    }
                }
            }
            let docs: Vec<Value> = basis
                .elements
                .iter()
                .map(|p| {
                    let mut d = json!({
                        "terms": p.terms().iter().map(|(e, c)| json!([e.to_string(), q(c)])).collect::<Vec<_>>(),
                        "truncation_order": Value::Null,
                    });
                    if cli.certify {
                        d["certificate"] = json!("exact");
                    }
                    d
                })
                .collect();
            let text = basis.elements.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("\n");
            Ok(Output { json: json!({"kind": "polynomial_basis", "ramification": 1, "elements": docs}), text })
        }
        Command::Rational { file } => {
            let l = read_operator(file)?;
            let basis = rational_basis_with(&l, &opts)?;
            let mut docs = Vec::new();
            for f in &basis.elements {
                let mut d = rational_json(f);
                if cli.certify {
                    if !f.solves(&l)? {
                        return Err(invariant("rational solution does not cancel the operator"));
                    }
                    d["certificate"] = json!("exact");
                }
                docs.push(d);
            }
            let text = basis.elements.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("\n");
            Ok(Output { json: json!({"kind": "rational_basis", "elements": docs}), text })
        }
        Command::Puiseux { file, order, ramification } => {
            let l = read_operator(file)?;
            let basis = match ramification {
                Some(n) => puiseux_basis_with(&l, *n, *order, &opts)?,
                None => puiseux_basis_all_with(&l, *order, &opts)?,
            };
            let n = ramification.unwrap_or_else(|| {
                basis.elements.iter().fold(1, |a, s| a / gcd_u64(a, s.ramification) * s.ramification)
            });
            let certs = if cli.certify {
                let mut cs = Vec::new();
                for s in &basis.elements {
                    let e = certify_puiseux(&l, s)?;
                    cs.push(e);
                }
                Some(cs)
            } else {
                None
            };
            Ok(series_like("puiseux_basis", n, &basis.elements, certs))
        }
        Command::Normalize { file } => {
            let l = read_operator(file)?;
            Ok(normalized_output(&normalize_l0(&l)?))
        }
        Command::Gcrd { files } => {
            let members = files.iter().map(|f| read_operator(f)).collect::<Result<Vec<_>>>()?;
            Ok(normalized_output(&gcrd(&OperatorFamily::new(members)?)?))
        }
        Command::Transcendence { file, initial, oracle } => {
            let l = read_operator(file)?;
            let prefix = initial.iter().map(|c| parse_rational(c.trim())).collect::<Result<Vec<_>>>()?;
            let v = match oracle {
                Oracle::Rational => transcendence_test_with(&l, &prefix, &opts)?,
                Oracle::BellCoons => bell_coons_test_with(&l, &prefix, &opts)?,
            };
            if cli.certify {
                if let Some(w) = &v.witness {
                    if !w.solves(&l)? {
                        return Err(invariant("witness does not cancel the operator"));
                    }
                }
            }
            let verdict = match v.verdict {
                Verdict::Rational => "rational",
                Verdict::Transcendental => "transcendental",
            };
            let method = match v.method {
                TestMethod::RationalBasis => "rational_basis",
                TestMethod::BellCoons => "bell_coons",
            };
            let text = match &v.witness {
                Some(w) => format!("{verdict} ({method}): {w}"),
                None => format!("{verdict} ({method})"),
            };
            let doc = json!({
                "kind": "transcendence",
                "verdict": verdict,
                "method": method,
                "witness": v.witness.as_ref().map(rational_json),
            });
            Ok(Output { json: doc, text })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Json => println!("{}", out.json),
                Format::Text => println!("{}", out.text),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            match cli.format {
                Format::Json => eprintln!("{}", json!({"error": e.code(), "message": e.to_string()})),
                Format::Text => eprintln!("error: {e}"),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
