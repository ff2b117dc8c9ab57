use clap::{Args, Parser, Subcommand, ValueEnum};
use levelwidth::dipole::{self, DipoleMethod};
use levelwidth::dos::{self, ContourOptions, DampedOscillator};
use levelwidth::scaling::{self, DEFAULT_GRID, DEFAULT_LMAX};
use levelwidth::table::{Cell, Table};
use levelwidth::verify;
use levelwidth::widths::{self, BathKind, BathSpec};
use levelwidth::wkb::{self, Quantization};
use levelwidth::{Error, PotentialSpec};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser, Serialize)]
#[command(name = "levelwidth", version, about = "Level widths of bound states coupled to a dissipative bath")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit a single JSON document with the configuration and results.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Energy levels E_0..E_levels.
    Spectrum(SpectrumArgs),
    /// Dipole elements d_{n,n-l}.
    Dipoles(DipoleArgs),
    /// Golden-rule widths Γ_1..Γ_levels.
    Widths(WidthArgs),
    /// Universal prefactor c(α) of Γ_n ≈ c γ n.
    Prefactor(PrefactorArgs),
    /// c(α) over a grid of exponents.
    ScanAlpha(ScanArgs),
    /// Density of states of the damped harmonic oscillator (ħ = ω0 = 1).
    Dos(DosArgs),
    /// Run the reference checks; exit status 0 only if all pass.
    Verify,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Method {
    Exact,
    Semiclassical,
}

impl Method {
    fn dipole(self) -> DipoleMethod {
        match self {
            Method::Exact => DipoleMethod::Exact,
            Method::Semiclassical => DipoleMethod::Semiclassical,
        }
    }

    fn quantization(self) -> Quantization {
        match self {
            Method::Exact => Quantization::Exact,
            Method::Semiclassical => Quantization::Wkb,
        }
    }

    /// Exact for the solvable families, semiclassical otherwise.
    fn resolve(m: Option<Method>, p: &PotentialSpec) -> Method {
        m.unwrap_or(if p.is_analytic() { Method::Exact } else { Method::Semiclassical })
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Bath {
    Ohmic,
    Drude { omega_c: f64 },
    Power { s: f64 },
}

impl FromStr for Bath {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("bad number '{v}': {e}"));
        match s.split_once(':') {
            None if s == "ohmic" => Ok(Bath::Ohmic),
            Some(("drude", v)) => Ok(Bath::Drude { omega_c: num(v)? }),
            Some(("power", v)) => Ok(Bath::Power { s: num(v)? }),
            _ => Err(format!("unknown bath '{s}'; expected ohmic, drude:<wc> or power:<s>")),
        }
    }
}

impl Bath {
    fn spec(self, gamma: f64, mass: f64) -> levelwidth::Result<BathSpec> {
        let kind = match self {
            Bath::Ohmic => BathKind::Ohmic,
            Bath::Drude { omega_c } => BathKind::OhmicDrude { omega_c },
            Bath::Power { s } => BathKind::Power { s, prefactor: mass * gamma },
        };
        BathSpec::new(kind, gamma, mass)
    }
}

fn potential(s: &str) -> Result<PotentialSpec, String> {
    s.parse::<PotentialSpec>().map_err(|e| e.to_string())
}

#[derive(Args, Serialize)]
struct SpectrumArgs {
    #[arg(long, value_parser = potential)]
    potential: PotentialSpec,
    #[arg(long, default_value_t = 10)]
    levels: usize,
    #[arg(long, value_enum)]
    method: Option<Method>,
}

#[derive(Args, Serialize)]
struct DipoleArgs {
    #[arg(long, value_parser = potential)]
    potential: PotentialSpec,
    #[arg(long)]
    n: usize,
    /// Largest l; defaults to n.
    #[arg(long)]
    lmax: Option<usize>,
    #[arg(long, value_enum)]
    method: Option<Method>,
}

#[derive(Args, Serialize)]
struct WidthArgs {
    #[arg(long, value_parser = potential)]
    potential: PotentialSpec,
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 10)]
    levels: usize,
    #[arg(long, value_enum)]
    method: Option<Method>,
    #[arg(long, default_value = "ohmic")]
    bath: Bath,
    /// Truncate semiclassical tables at this l and extrapolate the rest.
    #[arg(long)]
    lmax: Option<usize>,
}

#[derive(Args, Serialize)]
struct PrefactorArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long)]
    wall: bool,
    #[arg(long, default_value_t = DEFAULT_LMAX)]
    lmax: usize,
}

#[derive(Args, Serialize)]
struct ScanArgs {
    /// Comma-separated exponents.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    grid: Option<Vec<f64>>,
    /// Put a wall at q = 0 for every α (always present for α < 0).
    #[arg(long)]
    wall: bool,
    #[arg(long, default_value_t = DEFAULT_LMAX)]
    lmax: usize,
}

#[derive(Args, Serialize)]
struct DosArgs {
    #[arg(long, default_value_t = 0.2)]
    gamma: f64,
    /// Must be drude:<wc>.
    #[arg(long, default_value = "drude:50")]
    bath: Bath,
    #[arg(long, default_value_t = 20.0)]
    emax: f64,
    #[arg(long, default_value_t = 0.05)]
    de: f64,
}

enum Failure {
    Library(Error),
    Checks,
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

fn header(t: &mut Table, name: &str, config: &impl Serialize) {
    t.comment(format!("levelwidth {name}"));
    t.comment(format!("args: {}", std::env::args().skip(1).collect::<Vec<_>>().join(" ")));
    t.comment(format!("config: {}", serde_json::to_string(config).expect("serialisable config")));
}

fn spectrum(a: &SpectrumArgs) -> Result<Table, Failure> {
    let m = Method::resolve(a.method, &a.potential);
    let s = wkb::quantize(&a.potential, a.levels, m.quantization())?;
    let mut t = Table::new(&["n", "E_n"]);
    header(&mut t, "spectrum", a);
    t.comment(format!("maslov offset: {:?}", s.nu));
    for &(n, e) in &s.levels {
        t.push(vec![n.into(), e.into()]);
    }
    Ok(t)
}

fn dipoles(a: &DipoleArgs) -> Result<Table, Failure> {
    let m = Method::resolve(a.method, &a.potential);
    let d = dipole::dipole_table(&a.potential, a.n, a.lmax.unwrap_or(a.n), m.dipole())?;
    let mut t = Table::new(&["l", "m", "d", "spacing"]);
    header(&mut t, "dipoles", a);
    t.comment(format!("E_n: {:?}", d.energy));
    for (&(l, v), &de) in d.entries.iter().zip(&d.spacings) {
        let m: Cell = if l <= a.n { (a.n - l).into() } else { (a.n as i64 - l as i64).into() };
        t.push(vec![l.into(), m, v.into(), de.into()]);
    }
    Ok(t)
}

fn width_rows(a: &WidthArgs) -> Result<Table, Failure> {
    let m = Method::resolve(a.method, &a.potential);
    let bath = a.bath.spec(a.gamma, a.potential.mass())?;
    let (levels, reports) = widths::width_series(&a.potential, &bath, a.levels, m.dipole(), a.lmax)?;
    let mut t = Table::new(&["n", "E_n", "Gamma_n", "Gamma_over_gamma_n"]);
    header(&mut t, "widths", a);
    for r in &reports {
        let e = levels.energy(r.n).ok_or(Error::Coverage(r.n))?;
        t.push(vec![r.n.into(), e.into(), r.gamma_n.into(), (r.gamma_n / (a.gamma * r.n as f64)).into()]);
    }
    Ok(t)
}

fn prefactor(a: &PrefactorArgs) -> Result<Table, Failure> {
    let r = scaling::width_prefactor(a.alpha, a.wall || a.alpha < 0.0, a.lmax)?;
    let mut t = Table::new(&["alpha", "c", "c_err"]);
    header(&mut t, "prefactor", a);
    t.comment(format!("c_raw: {:?}, S': {:?}, T': {:?}", r.c_raw, r.s_prime, r.t_prime));
    if let Some(fit) = r.tail {
        t.comment(format!("tail exponent: {:?}", fit.exponent()));
    }
    t.push(vec![a.alpha.into(), r.c.into(), r.c_err.into()]);
    Ok(t)
}

fn scan(a: &ScanArgs) -> Result<Table, Failure> {
    let grid = a.grid.clone().unwrap_or_else(|| DEFAULT_GRID.to_vec());
    let mut t = Table::new(&["alpha", "wall", "c", "c_err", "tail_exponent"]);
    header(&mut t, "scan-alpha", a);
    for r in scaling::scan_alpha(&grid, a.wall, a.lmax) {
        let r = r?;
        let p = r.tail.map_or(f64::NAN, |f| f.exponent());
        t.push(vec![r.alpha.into(), r.wall.into(), r.c.into(), r.c_err.into(), p.into()]);
    }
    Ok(t)
}

fn density(a: &DosArgs) -> Result<Table, Failure> {
    let Bath::Drude { omega_c } = a.bath else {
        return Err(Error::InvalidParameter("the density of states needs a drude:<wc> bath".into()).into());
    };
    if !(a.de > 0.0 && a.emax > a.de) {
        return Err(Error::InvalidParameter("need 0 < de < emax".into()).into());
    }
    let osc = DampedOscillator::new(1.0, a.gamma, omega_c)?;
    let grid: Vec<f64> = (1..).map(|i| i as f64 * a.de).take_while(|e| *e <= a.emax * (1.0 + 1e-12)).collect();
    let curve = dos::inverse_laplace_dos(&osc, &grid, ContourOptions::default())?;
    // Lorentzian comparison: exact oscillator levels with golden-rule widths.
    let ho = PotentialSpec::harmonic(1.0)?;
    let top = a.emax.ceil() as usize + 10;
    let levels = wkb::quantize(&ho, top, Quantization::Exact)?;
    let mut gammas = vec![0.0];
    for n in 1..=top {
        gammas.push(widths::ohmic_width(&levels, &dipole::exact_table(&ho, n, n)?, a.gamma, n)?.gamma_n);
    }
    let model = dos::lorentzian_dos(&levels, &gammas, &grid)?;
    let mut t = Table::new(&["E", "rho", "rho_error", "rho_lorentzian"]);
    header(&mut t, "dos", a);
    t.comment(format!("ground energy: {:?}", curve.ground_energy));
    for i in 0..grid.len() {
        t.push(vec![grid[i].into(), curve.rho[i].into(), curve.error[i].into(), model[i].into()]);
    }
    Ok(t)
}

fn run_verify() -> (Table, bool) {
    let outcomes = verify::run_all();
    let mut t = verify::to_table(&outcomes);
    t.comment("levelwidth verify");
    for o in &outcomes {
        let line = format!("criterion {:>2} {}: {}", o.id, if o.passed() { "PASS" } else { "FAIL" }, o.title);
        eprintln!("{line}");
        t.comment(line);
    }
    let ok = outcomes.iter().all(|o| o.passed());
    (t, ok)
}

fn to_json(cli: &Cli, t: &Table) -> String {
    let rows: Vec<serde_json::Value> = t
        .rows
        .iter()
        .map(|r| serde_json::Value::Object(t.columns.iter().cloned().zip(r.iter().map(|c| serde_json::to_value(c).expect("cell"))).collect()))
        .collect();
    let doc = serde_json::json!({ "config": cli, "notes": t.comments, "columns": t.columns, "results": rows });
    let mut s = serde_json::to_string_pretty(&doc).expect("json");
    s.push('\n');
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut all_passed = true;
    let result = match &cli.command {
        Command::Spectrum(a) => spectrum(a),
        Command::Dipoles(a) => dipoles(a),
        Command::Widths(a) => width_rows(a),
        Command::Prefactor(a) => prefactor(a),
        Command::ScanAlpha(a) => scan(a),
        Command::Dos(a) => density(a),
        Command::Verify => {
            let (t, ok) = run_verify();
            all_passed = ok;
            Ok(t)
        }
    };
    let result = result.and_then(|t| {
        let text = if cli.json { to_json(&cli, &t) } else { t.to_csv() };
        match &cli.out {
            Some(p) => std::fs::write(p, text).map_err(Failure::Io),
            None => {
                print!("{text}");
                Ok(())
            }
        }?;
        if all_passed {
            Ok(())
        } else {
            Err(Failure::Checks)
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Library(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
