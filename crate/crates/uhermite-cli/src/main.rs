use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use uhermite_cli::*;

use unitary_hermite::circleroots::{empirical_moment, find_roots, newton_girard_reference, EvalPrecision};
use unitary_hermite::curieweiss::{self as cw, CWParams};
use unitary_hermite::freenormal::{self, FreeNormalParams};
use unitary_hermite::heatflow;
use unitary_hermite::polycore::{unitary_hermite, RealPoly};
use unitary_hermite::verify::{self, Suite};
use unitary_hermite::Error;

#[derive(Parser)]
#[command(name = "uhermite", version, about = "Zeros of unitary Hermite polynomials and related computations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Out {
    /// Write here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Working decimal digits for the multiprecision evaluator (also UHERMITE_DIGITS).
    #[arg(long)]
    digits: Option<u32>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Angles of the zeros of H_n(z; σ²/n).
    Roots {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        sigma2: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Density of the free unitary normal law on a grid over its support.
    Density {
        #[arg(long)]
        sigma2: f64,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Empirical, Newton-Girard and limiting moments.
    Moments {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        sigma2: f64,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Lee-Yang zeros of the Curie-Weiss model with the limiting density.
    CwZeros {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        beta: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Curie-Weiss free energy and finite-n convergence.
    CwEnergy {
        #[arg(long)]
        beta: f64,
        /// Complex field, e.g. "0.3", "0.3+0.1i" or "-2i".
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        #[command(flatten)]
        out: Out,
    },
    /// Root trajectories of a real polynomial under the backward heat flow.
    Heatflow {
        /// JSON file {"coeffs": [c0, c1, ..., cn]}, ascending powers.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Run the acceptance checks; exit 0 iff all pass.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::Fast)]
        suite: SuiteArg,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Fast,
    Full,
}

enum Fail {
    Usage(String),
    Compute(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) => Fail::Usage(e.to_string()),
            _ => Fail::Compute(e.to_string()),
        }
    }
}

impl From<io::Error> for Fail {
    fn from(e: io::Error) -> Self {
        Fail::Compute(e.to_string())
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Fail> {
    Err(Fail::Usage(msg.into()))
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_complex(s: &str) -> Result<Complex64, Fail> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Fail::Usage(format!("cannot parse complex number {s:?}; expected re+imi"));
    if let Some(body) = t.strip_suffix('i') {
        // Split at the last sign that is not part of an exponent.
        let b = body.as_bytes();
        let cut = (1..b.len()).rev().find(|&i| (b[i] == b'+' || b[i] == b'-') && !matches!(b[i - 1], b'e' | b'E'));
        let (re, im) = match cut {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            x => x,
        };
        let re: f64 = re.parse().map_err(|_| bad())?;
        let im: f64 = im.parse().map_err(|_| bad())?;
        Ok(Complex64::new(re, im))
    } else {
        Ok(Complex64::new(t.parse().map_err(|_| bad())?, 0.0))
    }
}

fn precision(out: &Out) -> Result<EvalPrecision, Fail> {
    let p = EvalPrecision::from_env()?;
    match out.digits {
        Some(d) => Ok(EvalPrecision::new(d, p.escalation_factor, p.max_digits.max(d))?),
        None => Ok(p),
    }
}

fn emit<T: Serialize>(out: &Out, value: &T, csv: impl FnOnce() -> String) -> Result<(), Fail> {
    let text = match out.format {
        Format::Csv => csv(),
        Format::Json => serde_json::to_string_pretty(value).map_err(|e| Fail::Compute(e.to_string()))? + "\n",
    };
    match &out.output {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn positive(name: &str, x: f64) -> Result<(), Fail> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        usage(format!("--{name} must be positive, got {x}"))
    }
}

fn run(cli: Cli) -> Result<bool, Fail> {
    match cli.cmd {
        Cmd::Roots { n, sigma2, out } => {
            if n == 0 {
                return usage("--n must be at least 1");
            }
            if !(sigma2 >= 0.0) {
                return usage("--sigma2 must be nonnegative");
            }
            let prec = precision(&out)?;
            let m = find_roots(&unitary_hermite(n, sigma2 / n as f64)?, prec, 8)?;
            let r = RootsOut { n, sigma2, angles: m.angles, enclosure_width: m.enclosure_width };
            emit(&out, &r, || r.angles.iter().map(|&t| num(t) + "\n").collect())?;
        }
        Cmd::Density { sigma2, grid, out } => {
            positive("sigma2", sigma2)?;
            if grid < 2 {
                return usage("--grid must be at least 2");
            }
            let p = FreeNormalParams::new(sigma2)?;
            // Cosine-spaced nodes over the support, dense at the edge singularities.
            let m = freenormal::support_halfwidth(&p);
            let theta: Vec<f64> =
                (0..grid).map(|k| -m * (std::f64::consts::PI * k as f64 / (grid - 1) as f64).cos()).collect();
            let density = theta.iter().map(|&t| freenormal::density(&p, t)).collect::<Result<Vec<_>, _>>()?;
            let r = DensityOut { sigma2, theta, density };
            emit(&out, &r, || r.theta.iter().zip(&r.density).map(|(t, f)| format!("{},{}\n", num(*t), num(*f))).collect())?;
        }
        Cmd::Moments { n, sigma2, k, out } => {
            positive("sigma2", sigma2)?;
            if n == 0 || k == 0 || k > n {
                return usage("need 1 <= --k <= --n");
            }
            let prec = precision(&out)?;
            let m = find_roots(&unitary_hermite(n, sigma2 / n as f64)?, prec, 8)?;
            let ng = newton_girard_reference(n, sigma2, k)?;
            let p = FreeNormalParams::new(sigma2)?;
            let rows: Vec<MomentRow> = (1..=k)
                .map(|j| MomentRow {
                    k: j,
                    empirical: empirical_moment(&m, j as i64).re,
                    newton_girard: ng[j - 1],
                    limit: freenormal::moment(&p, j as i64),
                })
                .collect();
            let r = MomentsOut { n, sigma2, rows };
            emit(&out, &r, || {
                r.rows.iter().map(|x| format!("{},{},{},{}\n", x.k, num(x.empirical), num(x.newton_girard), num(x.limit))).collect()
            })?;
        }
        Cmd::CwZeros { n, beta, out } => {
            positive("beta", beta)?;
            if n == 0 {
                return usage("--n must be at least 1");
            }
            let y = cw::lee_yang_zeros(n, beta, precision(&out)?)?;
            let density = y.iter().map(|&v| cw::lee_yang_density(beta, v)).collect::<Result<Vec<_>, _>>()?;
            let r = CwZerosOut { n, beta, y, density };
            emit(&out, &r, || r.y.iter().zip(&r.density).map(|(y, f)| format!("{},{}\n", num(*y), num(*f))).collect())?;
        }
        Cmd::CwEnergy { beta, h, out } => {
            positive("beta", beta)?;
            let h = parse_complex(&h)?;
            if h.re == 0.0 {
                return usage("--h must have nonzero real part");
            }
            let p = CWParams::new(beta, h)?;
            let f = cw::free_energy(&p)?;
            let finite_n = [100usize, 200, 400, 800]
                .iter()
                .map(|&n| {
                    let l = cw::log_partition(n, &p)? / n as f64;
                    Ok(EnergyRow { n, re: l.re, im: l.im, error: (l - f).norm() })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let r = CwEnergyOut { beta, h: [h.re, h.im], free_energy: [f.re, f.im], finite_n };
            emit(&out, &r, || {
                let mut s = format!("inf,{},{},{}\n", num(f.re), num(f.im), num(0.0));
                for x in &r.finite_n {
                    s += &format!("{},{},{},{}\n", x.n, num(x.re), num(x.im), num(x.error));
                }
                s
            })?;
        }
        Cmd::Heatflow { input, s, steps, out } => {
            if !(s >= 0.0) || !s.is_finite() {
                return usage("--s must be nonnegative");
            }
            if steps == 0 {
                return usage("--steps must be at least 1");
            }
            let text = fs::read_to_string(&input).map_err(|e| Fail::Usage(format!("{}: {e}", input.display())))?;
            let inp: HeatflowIn =
                serde_json::from_str(&text).map_err(|e| Fail::Usage(format!("{}: {e}", input.display())))?;
            let p = RealPoly::from_f64(&inp.coeffs)?;
            let prec = precision(&out)?;
            let mut times = Vec::with_capacity(steps + 1);
            let mut roots = Vec::with_capacity(steps + 1);
            for i in 0..=steps {
                let t = s * i as f64 / steps as f64;
                let q = heatflow::backward_heat_algebraic(&p, t)?;
                roots.push(heatflow::real_roots_algebraic(&q, prec)?);
                times.push(t);
            }
            let r = HeatflowOut { times, roots };
            emit(&out, &r, || {
                let mut s = String::new();
                for (t, rs) in r.times.iter().zip(&r.roots) {
                    s += &num(*t);
                    for x in rs {
                        s += ",";
                        s += &num(*x);
                    }
                    s += "\n";
                }
                s
            })?;
        }
        Cmd::Verify { suite, format } => {
            let suite = if suite == SuiteArg::Full { Suite::Full } else { Suite::Fast };
            let mut reports = Vec::new();
            for id in 1..=12 {
                let r = verify::run_criterion(id, suite);
                if format == Format::Csv {
                    println!("{r}");
                }
                reports.push(r);
            }
            if format == Format::Json {
                println!("{}", serde_json::to_string_pretty(&reports).map_err(|e| Fail::Compute(e.to_string()))?);
            }
            return Ok(reports.iter().all(|r| r.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Fail::Compute(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        let c = |s: &str| parse_complex(s).ok().unwrap();
        assert_eq!(c("0.3"), Complex64::new(0.3, 0.0));
        assert_eq!(c("0.3+0.1i"), Complex64::new(0.3, 0.1));
        assert_eq!(c("-2i"), Complex64::new(0.0, -2.0));
        assert_eq!(c("1e-3-2.5e-1i"), Complex64::new(1e-3, -0.25));
        assert_eq!(c("1-i"), Complex64::new(1.0, -1.0));
        assert!(parse_complex("abc").is_err());
    }
}
