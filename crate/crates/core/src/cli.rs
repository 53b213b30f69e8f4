//! Command line front end. Every subcommand produces a [`Table`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::equidist::{classify, convergence_report, truncate_decimal};
use crate::error::{Error, Result};
use crate::exact_formula::{xi_truncated, ExactContext};
use crate::goettsche::{gamma_direct, goettsche_expand, xi_exact, HodgeDiamond};
use crate::maass_trace::trace;
use crate::partitions::{
    check_ramanujan_congruences, eval_p_near_root, p_euler_product, p_recurrence, rademacher_p,
};
use crate::real::{MpFloat, Real};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Md,
}

#[derive(Parser, Debug)]
#[command(name = "hodge-circle", version, about = "Partition numbers and Hodge numbers of Hilbert schemes")]
pub struct Cli {
    #[arg(long, global = true, default_value_t = 192)]
    pub precision_bits: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Md)]
    pub format: Format,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// cp2, k3, abelian, enriques, or a JSON file {"h10":..,"h20":..,"h11":..}
    #[arg(long, global = true)]
    pub surface: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact p(n) by the pentagonal recurrence and the Euler product
    Partition {
        #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
        table: Vec<usize>,
        /// also check the Ramanujan congruences for n up to this bound
        #[arg(long)]
        congruences: Option<usize>,
    },
    /// Truncated Rademacher series
    Rademacher {
        #[arg(long, value_delimiter = ',')]
        n: Vec<u64>,
        /// number of terms; defaults to ceil(2 sqrt n)
        #[arg(long)]
        kmax: Option<u64>,
    },
    /// |P(q)| for q = zeta e^{-t} at the roots 1, -1, zeta_3, i
    PNearRoots {
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.3,0.1,0.01")]
        t: Vec<f64>,
    },
    /// Expansion of the Hodge generating series of Hilbert schemes
    Goettsche {
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// print the Hodge diamond of Hilb^d
        #[arg(long)]
        diamond: Option<usize>,
    },
    /// Truncated exact formula against the exact coefficients
    XiExact {
        #[arg(long)]
        r1: i64,
        #[arg(long)]
        l1: i64,
        #[arg(long)]
        r2: i64,
        #[arg(long)]
        l2: i64,
        #[arg(long, default_value_t = 75)]
        cutoff: i64,
        #[arg(long, default_value = "1..5")]
        n: String,
    },
    /// Signed Hodge number sums over residue classes
    Gamma {
        #[arg(long)]
        l1: i64,
        #[arg(long)]
        l2: i64,
        #[arg(long, default_value = "1..10")]
        n: String,
    },
    /// Proportions of the residue class sums
    Theta {
        #[arg(long)]
        l1: i64,
        #[arg(long)]
        l2: i64,
        #[arg(long, default_value = "5,10,15,20,25")]
        n: String,
    },
    /// Equidistribution verdict
    Classify {
        #[arg(long)]
        l1: i64,
        #[arg(long)]
        l2: i64,
    },
    /// p(n) from the trace of the weak Maass form over CM points
    MaassTrace {
        #[arg(long)]
        n: u64,
    },
}

/// A rendered result: every cell is already a string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub caption: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub meta: BTreeMap<String, String>,
}

impl Table {
    fn new(caption: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            caption: caption.into(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            meta: BTreeMap::new(),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("serializable") + "\n",
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns).expect("in-memory write");
                for r in &self.rows {
                    w.write_record(r).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
            }
            Format::Md => {
                let mut s = String::new();
                writeln!(s, "{}", self.caption).unwrap();
                for (k, v) in &self.meta {
                    writeln!(s, "{k}: {v}").unwrap();
                }
                writeln!(s).unwrap();
                writeln!(s, "| {} |", self.columns.join(" | ")).unwrap();
                writeln!(s, "|{}", "---|".repeat(self.columns.len())).unwrap();
                for r in &self.rows {
                    writeln!(s, "| {} |", r.join(" | ")).unwrap();
                }
                s
            }
        }
    }
}

/// Parse "1..5", "3", or "5,10,15".
pub fn parse_n_list(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Validation(format!("cannot parse n list {s:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

#[derive(Deserialize)]
struct SurfaceDescriptor {
    h10: u64,
    h20: u64,
    h11: u64,
    #[serde(default)]
    name: Option<String>,
}

/// Resolve an alias or a JSON file into a diamond and a display name.
pub fn parse_surface(spec: &str) -> Result<(HodgeDiamond, String)> {
    let named = match spec {
        "cp2" => Some(HodgeDiamond::cp2()),
        "k3" => Some(HodgeDiamond::k3()),
        "abelian" => Some(HodgeDiamond::abelian()),
        "enriques" => Some(HodgeDiamond::enriques()),
        _ => None,
    };
    if let Some(d) = named {
        return Ok((d, spec.to_string()));
    }
    let text = std::fs::read_to_string(Path::new(spec))
        .map_err(|e| Error::Validation(format!("surface {spec:?}: not an alias and not readable: {e}")))?;
    let desc: SurfaceDescriptor =
        serde_json::from_str(&text).map_err(|e| Error::Validation(format!("surface file {spec:?}: {e}")))?;
    let d = HodgeDiamond::from_triple(desc.h10, desc.h20, desc.h11);
    Ok((d, desc.name.unwrap_or_else(|| format!("({},{},{})", desc.h10, desc.h20, desc.h11))))
}

fn surface_of(cli: &Cli) -> Result<(HodgeDiamond, String)> {
    match &cli.surface {
        Some(s) => parse_surface(s),
        None => Err(Error::Validation("this subcommand needs --surface".into())),
    }
}

fn surface_meta(t: &mut Table, s: &HodgeDiamond, name: &str) {
    t.meta.insert("surface".into(), name.to_string());
    t.meta.insert("chi".into(), s.chi().to_string());
    t.meta.insert("sigma".into(), s.sigma().to_string());
}

fn positive(name: &str, v: i64) -> Result<()> {
    if v < 1 {
        return Err(Error::Validation(format!("{name} must be positive")));
    }
    Ok(())
}

fn truncated_digits(x: &MpFloat) -> (String, String) {
    let scaled = (x.abs() * MpFloat::from_i64(10_000, x.prec())).floor();
    let digits = scaled.round_bigint().expect("finite").to_string();
    let digits = format!("{digits:0>5}");
    let (int, frac) = digits.split_at(digits.len() - 4);
    (int.to_string(), frac.to_string())
}

/// Mantissa truncated to 4 places and a decimal exponent.
pub fn sci_truncated(x: &MpFloat) -> String {
    if x.is_zero() {
        return "0.0000e0".into();
    }
    let prec = x.prec();
    let ten = MpFloat::from_i64(10, prec);
    let a = x.abs();
    let mut e = (a.ln() / ten.ln()).floor().to_f64() as i64;
    let mut m = a.clone() / ten.powr(&MpFloat::from_i64(e, prec));
    if m >= ten {
        m = m / ten.clone();
        e += 1;
    } else if m < MpFloat::from_i64(1, prec) {
        m = m * ten.clone();
        e -= 1;
    }
    let (int, frac) = truncated_digits(&m);
    let sign = if *x < MpFloat::from_i64(0, prec) { "-" } else { "" };
    format!("{sign}{int}.{frac}e{e}")
}

/// Fixed point truncated to 4 places; values within 2^(-prec/2) of an integer print as that integer.
pub fn fixed_truncated(x: &MpFloat) -> String {
    let prec = x.prec();
    let r = MpFloat::from_bigint(&x.round_bigint().expect("finite"), prec);
    let x = &if (x.clone() - r.clone()).abs() < MpFloat::epsilon(prec / 2, prec) { r } else { x.clone() };
    let (int, frac) = truncated_digits(x);
    let zero = int == "0" && frac == "0000";
    let sign = if *x < MpFloat::from_i64(0, x.prec()) && !zero { "-" } else { "" };
    format!("{sign}{int}.{frac}")
}

fn execute(cli: &Cli) -> Result<Table> {
    let prec = cli.precision_bits;
    if prec < 64 {
        return Err(Error::Validation("--precision-bits must be at least 64".into()));
    }
    match &cli.command {
        Command::Partition { table, congruences } => {
            let n = table.iter().copied().max().unwrap_or(0);
            let rec = p_recurrence(n);
            let prod = p_euler_product(n);
            let mut t = Table::new("Partition numbers", &["n", "p(n)"]);
            for &m in table {
                if rec.get(m) != prod.get(m) {
                    return Err(Error::ConvergenceFailure(format!("recurrence and product disagree at {m}")));
                }
                t.rows.push(vec![m.to_string(), rec.get(m).to_string()]);
            }
            if let Some(b) = congruences {
                let v = check_ramanujan_congruences(*b);
                t.meta.insert("congruence_bound".into(), b.to_string());
                t.meta.insert("congruence_violations".into(), v.len().to_string());
            }
            Ok(t)
        }
        Command::Rademacher { n, kmax } => {
            let mut t = Table::new("Rademacher series", &["n", "K", "value", "rounded", "tail_bound"]);
            for &m in n {
                if m < 1 {
                    return Err(Error::Validation("n must be positive".into()));
                }
                let k = kmax.unwrap_or_else(|| (2.0 * (m as f64).sqrt()).ceil() as u64);
                let bits = prec.max(crate::partitions::rademacher_bits(m));
                let r = rademacher_p::<MpFloat>(m, k, bits)?;
                t.rows.push(vec![
                    m.to_string(),
                    k.to_string(),
                    fixed_truncated(&r.value),
                    r.rounded.to_string(),
                    format!("{:.3e}", r.tail_bound),
                ]);
            }
            Ok(t)
        }
        Command::PNearRoots { t: ts } => {
            let roots = [(0i64, 1i64, "1"), (1, 2, "-1"), (1, 3, "zeta_3"), (1, 4, "+-i")];
            let mut cols = vec!["t"];
            cols.extend(roots.iter().map(|r| r.2));
            let mut t = Table::new("|P(zeta e^{-t})|", &cols);
            for &x in ts {
                if !(x > 0.0) {
                    return Err(Error::Validation("t must be positive".into()));
                }
                let tr = MpFloat::from_f64_prec(x, prec);
                let mut row = vec![x.to_string()];
                for &(h, k, _) in &roots {
                    row.push(sci_truncated(&eval_p_near_root::<MpFloat>(h, k, &tr, prec)?));
                }
                t.rows.push(row);
            }
            Ok(t)
        }
        Command::Goettsche { n, diamond } => {
            let (s, name) = surface_of(cli)?;
            let top = (*n).max(diamond.unwrap_or(0));
            let table = goettsche_expand(&s, top);
            if let Some(d) = diamond {
                let h = table.hodge_numbers(*d)?;
                let cols: Vec<String> = std::iter::once("s\\t".to_string())
                    .chain((0..=2 * d).map(|i| i.to_string()))
                    .collect();
                let mut t = Table::new(format!("Hodge diamond of Hilb^{d}"), &[]);
                t.columns = cols;
                for (i, row) in h.iter().enumerate() {
                    t.rows.push(std::iter::once(i.to_string()).chain(row.iter().map(|c| c.to_string())).collect());
                }
                surface_meta(&mut t, &s, &name);
                return Ok(t);
            }
            let mut t = Table::new("Hodge generating series", &["n", "coefficient", "euler"]);
            surface_meta(&mut t, &s, &name);
            for i in 0..=*n {
                let e = table.entry(i)?;
                t.rows.push(vec![i.to_string(), e.to_string(), e.at_one().to_string()]);
            }
            Ok(t)
        }
        Command::XiExact { r1, l1, r2, l2, cutoff, n } => {
            let (s, name) = surface_of(cli)?;
            positive("l1", *l1)?;
            positive("l2", *l2)?;
            positive("cutoff", *cutoff)?;
            let ns = parse_n_list(n)?;
            if ns.contains(&0) {
                return Err(Error::Validation("n must be positive".into()));
            }
            let ctx = ExactContext::new(&s, *r1, *l1, *r2, *l2)?;
            let top = ns.iter().copied().max().unwrap_or(1);
            let exact = xi_exact::<MpFloat>(&goettsche_expand(&s, top), *r1, *l1, *r2, *l2, prec);
            let mut t = Table::new(
                format!("Exact formula truncated at N = {cutoff}"),
                &["n", "truncated", "exact"],
            );
            surface_meta(&mut t, &s, &name);
            t.meta.insert("specialization".into(), format!("({r1},{l1},{r2},{l2})"));
            t.meta.insert("weight".into(), ctx.g.to_string());
            for &m in &ns {
                let v = xi_truncated::<MpFloat>(&ctx, m as i64, *cutoff, prec)?.value;
                let e = exact.coeff(m);
                t.rows.push(vec![m.to_string(), fixed_truncated(&v.re), fixed_truncated(&e.re)]);
            }
            Ok(t)
        }
        Command::Gamma { l1, l2, n } => {
            let (s, name) = surface_of(cli)?;
            positive("l1", *l1)?;
            positive("l2", *l2)?;
            let ns = parse_n_list(n)?;
            let table = goettsche_expand(&s, ns.iter().copied().max().unwrap_or(0));
            let mut cols = vec!["r1,r2".to_string()];
            cols.extend(ns.iter().map(|m| m.to_string()));
            let mut t = Table::new(format!("gamma(r1, {l1}, r2, {l2}; n)"), &[]);
            t.columns = cols;
            surface_meta(&mut t, &s, &name);
            for a in 0..*l1 {
                for b in 0..*l2 {
                    let mut row = vec![format!("{a},{b}")];
                    for &m in &ns {
                        row.push(gamma_direct(&table, a, *l1, b, *l2, m)?.to_string());
                    }
                    t.rows.push(row);
                }
            }
            Ok(t)
        }
        Command::Theta { l1, l2, n } => {
            let (s, name) = surface_of(cli)?;
            positive("l1", *l1)?;
            positive("l2", *l2)?;
            let ns = parse_n_list(n)?;
            let table = goettsche_expand(&s, ns.iter().copied().max().unwrap_or(0));
            let rep = convergence_report(&table, *l1, *l2, &ns)?;
            let mut cols = vec!["r1,r2".to_string()];
            cols.extend(ns.iter().map(|m| m.to_string()));
            let mut t = Table::new(format!("Theta^(r1,r2)_({l1},{l2})(n)"), &[]);
            t.columns = cols;
            surface_meta(&mut t, &s, &name);
            let cell = |v: &Option<num_rational::BigRational>| match v {
                None => "undefined".to_string(),
                Some(q) if q.is_zero() => "0".to_string(),
                Some(q) => truncate_decimal(q, 4),
            };
            for row in &rep.rows {
                let mut r = vec![format!("{},{}", row.r1, row.r2)];
                r.extend(row.values.iter().map(cell));
                t.rows.push(r);
            }
            let mut dev = vec!["max deviation".to_string()];
            dev.extend(rep.max_deviation.iter().map(cell));
            t.rows.push(dev);
            Ok(t)
        }
        Command::Classify { l1, l2 } => {
            let (s, name) = surface_of(cli)?;
            let v = classify(&s, *l1, *l2)?;
            let mut t = Table::new(format!("Equidistribution for (l1, l2) = ({l1}, {l2})"), &["field", "value"]);
            surface_meta(&mut t, &s, &name);
            let res: Vec<String> = v.residues.iter().map(|(a, b)| format!("({a},{b})")).collect();
            let cases: Vec<String> = v.cases.iter().map(|c| c.to_string()).collect();
            t.rows.push(vec!["equidistributed".into(), v.equidistributed.to_string()]);
            t.rows.push(vec!["case".into(), v.case_label()]);
            t.rows.push(vec!["all_cases".into(), cases.join(" ")]);
            t.rows.push(vec!["residues".into(), res.join(" ")]);
            t.rows.push(vec![
                "lambda_min_witness".into(),
                v.lambda_min_witness.map(|(a, b)| format!("({a},{b})")).unwrap_or_else(|| "none".into()),
            ]);
            t.rows.push(vec!["case7_criteria_disagree".into(), v.case7_criteria_disagree.to_string()]);
            Ok(t)
        }
        Command::MaassTrace { n } => {
            if *n < 1 {
                return Err(Error::Validation("n must be positive".into()));
            }
            let r = trace::<MpFloat>(*n, prec)?;
            let mut t = Table::new(format!("Maass form trace, n = {n}"), &["form", "re", "im"]);
            for (f, v) in r.forms.iter().zip(&r.values) {
                t.rows.push(vec![format!("[{},{},{}]", f.a, f.b, f.c), fixed_truncated(&v.re), fixed_truncated(&v.im)]);
            }
            t.meta.insert("trace".into(), fixed_truncated(&r.trace.re));
            t.meta.insert("p(n)".into(), fixed_truncated(&r.partition_value));
            let nearest = r.partition_value.round_bigint().expect("finite");
            let dist = (r.partition_value.clone() - MpFloat::from_bigint(&nearest, prec)).abs();
            t.meta.insert("nearest_integer".into(), nearest.to_string());
            t.meta.insert("distance".into(), sci_truncated(&dist));
            Ok(t)
        }
    }
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numeric() {
        3
    } else {
        2
    }
}

/// Run with the given arguments (program name first); returns (exit code, stdout, stderr).
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.to_string();
            return if code == 0 { (0, text, String::new()) } else { (2, String::new(), text) };
        }
    };
    let work = || match execute(&cli) {
        Ok(t) => (0, t.render(cli.format), String::new()),
        Err(e) => (exit_code(&e), String::new(), format!("error: {e}\n")),
    };
    match cli.threads {
        Some(0) => (2, String::new(), "error: --threads must be positive\n".into()),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(work),
            Err(e) => (2, String::new(), format!("error: {e}\n")),
        },
        None => work(),
    }
}
