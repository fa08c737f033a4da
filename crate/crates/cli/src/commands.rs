use anderson_core::extension::{artin_schreier_frobenius, residue_symbol_at_prime};
use anderson_core::fq::Fq;
use anderson_core::group::{AbelianGroup, GroupRing};
use anderson_core::io::{self, series_to_json, Codec, ModuleData};
use anderson_core::lattice::deformed_ring;
use anderson_core::lvalues::{deformed_euler_product, euler_product, monic_sum, specialize_series, trivial_weight, EulerConfig, LocalFactor};
use anderson_core::poly::{poly_a, PolyRing, Var};
use anderson_core::series::{SeriesRing, ThetaSeries};
use anderson_core::Ring;
use anyhow::{Context, Result};
use serde_json::{json, Value};

use crate::config::{Format, RunConfig, UsageError, ZMode, SCHEMA_VERSION};
use crate::render::{csv, group_series_text, poly_text, poly_to_json, series_text};

/// A finished command: every format is prepared, `ok` drives the exit code.
pub struct Output {
    pub json: Value,
    pub text: String,
    pub csv: String,
    pub ok: bool,
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.json).expect("serializable") + "\n",
            Format::Text => self.text.clone(),
            Format::Csv => self.csv.clone(),
        }
    }
}

pub fn header(command: &str, cfg: &RunConfig) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    m.insert("config".into(), cfg.to_json());
    m
}

fn field(q: u64) -> Result<Fq> {
    Fq::with_order(q).map_err(|e| UsageError(e.to_string()).into())
}

fn z_value(f: &Fq, v: u64) -> Result<u32> {
    if v >= f.order() {
        return Err(UsageError(format!("z = {v} is not an element of F_{}", f.order())).into());
    }
    Ok(v as u32)
}

/// `Σ_{a monic, deg a ≤ D} z^{deg a}/a` through `θ^{-N}`.
pub fn zeta(cfg: &RunConfig) -> Result<Output> {
    let f = field(cfg.q.unwrap_or(2))?;
    let n = cfg.precision_or(10);
    let d = cfg.max_deg_or(n.max(1) as usize);
    let w = trivial_weight(&f, true);
    let sum = monic_sum(&w, d, n);
    let fz = PolyRing::new(f.clone(), Var::Z);
    let sz = SeriesRing::new(fz.clone(), n);
    let sf = SeriesRing::new(f.clone(), n);
    let zser = SeriesRing::new(w.ring.clone(), n).map(&sum, &sz, |c| c[0].clone());
    let at = |v: u32| sz.map(&zser, &sf, |p| fz.eval(p, &v));

    let mut out = header("zeta", cfg);
    out.insert("field".into(), json!({"q": f.order()}));
    out.insert("max_deg".into(), json!(d));
    out.insert("precision".into(), json!(n));
    let mut text = format!("zeta over F_{}[θ], monic a of degree ≤ {d}, through θ^-{n}\n", f.order());
    let mut rows = vec![];
    match cfg.z {
        Some(ZMode::Poly) => {
            out.insert("series".into(), series_to_json(&sz, &zser));
            let sums: Vec<ThetaSeries<u32>> = (0..=d).map(|k| sz.map(&zser, &sf, |p| fz.coeff(p, k))).collect();
            out.insert("degree_sums".into(), Value::Array(sums.iter().map(|x| series_to_json(&sf, x)).collect()));
            text += &format!("series (z symbolic): {}\n", series_text(&sz, &zser));
            for (k, x) in sums.iter().enumerate() {
                text += &format!("  degree {k}: {}\n", series_text(&sf, x));
            }
            rows.extend(coefficient_rows(&sz, &zser, n));
        }
        mode => {
            let v = match mode {
                Some(ZMode::Eval(v)) => z_value(&f, v)?,
                _ => 1,
            };
            let x = at(v);
            out.insert("z".into(), json!(v));
            out.insert("series".into(), series_to_json(&sf, &x));
            text += &format!("series (z = {v}): {}\n", series_text(&sf, &x));
            rows.extend(coefficient_rows(&sf, &x, n));
        }
    }
    Ok(Output { json: Value::Object(out), text, csv: csv(&["exponent", "coefficient"], &rows), ok: true })
}

fn coefficient_rows<R: Ring>(s: &SeriesRing<R>, x: &ThetaSeries<R::Elem>, n: i64) -> Vec<Vec<String>> {
    (-n..=x.lead.max(0)).rev().map(|e| vec![e.to_string(), s.base.format(&s.coeff(x, e))]).collect()
}

/// The module named by `--preset` or `--module-file` (default `carlitz-A`).
pub fn load_module(cfg: &RunConfig) -> Result<ModuleData> {
    let data = match &cfg.module_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let data = io::parse_spec(&path.display().to_string(), &text)?;
            if let Some(q) = cfg.q {
                if q != data.module.field.order() {
                    return Err(UsageError(format!("--q {q} disagrees with q = {} in the module file", data.module.field.order())).into());
                }
            }
            data
        }
        None => {
            let name = cfg.preset.as_deref().unwrap_or("carlitz-A");
            if !io::PRESETS.contains(&name) {
                return Err(UsageError(format!("unknown preset `{name}` (known: {})", io::PRESETS.join(", "))).into());
            }
            let q = cfg.q.unwrap_or(if name == "carlitz-A" { 2 } else { 3 });
            io::preset(name, q)?
        }
    };
    if let Some(spec) = &cfg.group {
        let g = AbelianGroup::parse(spec, data.module.field.p())?;
        if g.factors() != data.lattice.group.factors() {
            return Err(UsageError(format!("--group {spec} differs from the lattice group {}", data.lattice.group.spec())).into());
        }
    }
    Ok(data)
}

/// Residue symbol and Frobenius shift of a prime, when the module carries them.
fn labels(data: &ModuleData, prime: &[u32]) -> (String, String) {
    let a = poly_a(&data.module.field);
    let symbol = data
        .symbol_radicand
        .as_ref()
        .map(|(b, m)| residue_symbol_at_prime(&a, b, prime, *m).to_string())
        .unwrap_or_default();
    let alg = &data.lattice.alg;
    let frob = if alg.artin_schreier.is_some() {
        artin_schreier_frobenius(alg, prime).map(|h| format!("({h})")).unwrap_or_default()
    } else {
        String::new()
    };
    (symbol, frob)
}

fn factor_json<R: Codec>(r: &R, data: &ModuleData, lf: &LocalFactor<R::Elem>) -> Value {
    let a = poly_a(&data.module.field);
    let (symbol, frob) = labels(data, &lf.prime);
    json!({
        "prime": a.format(&lf.prime),
        "lie": poly_to_json(r, &lf.lie),
        "full": poly_to_json(r, &lf.full),
        "symbol": symbol,
        "frobenius": frob,
    })
}

fn factor_row<R: Ring>(r: &R, data: &ModuleData, lf: &LocalFactor<R::Elem>) -> Vec<String> {
    let a = poly_a(&data.module.field);
    let (symbol, frob) = labels(data, &lf.prime);
    vec![a.format(&lf.prime), poly_text(r, &lf.lie), poly_text(r, &lf.full), symbol, frob]
}

const FACTOR_COLUMNS: [&str; 5] = ["prime", "|Lie|", "|E|", "symbol", "frobenius"];

/// The plain and the `z`-deformed Euler products of a module.
pub fn lfun(cfg: &RunConfig) -> Result<Output> {
    let data = load_module(cfg)?;
    let (e, m) = (&data.module, &data.lattice);
    let f = e.field.clone();
    let n = cfg.precision_or(8);
    let d = cfg.max_deg_or(n as usize);
    let mut ec = EulerConfig::new(d, n);
    ec.keep_factors = true;
    let plain = euler_product(e, m, &ec)?;
    let deformed = deformed_euler_product(e, m, &ec)?;
    let ring = GroupRing::new(f.clone(), m.group.clone());
    let zr = deformed_ring(&ring);
    let s = SeriesRing::new(ring.clone(), n);
    let sz = SeriesRing::new(zr.clone(), n);
    let a = poly_a(&f);

    let mut out = header("lfun", cfg);
    out.insert("module".into(), json!({"name": data.name, "q": f.order(), "group": m.group.spec(), "dimension": e.dim, "rank": m.rank()}));
    out.insert("max_deg".into(), json!(d));
    out.insert("precision".into(), json!(n));
    out.insert("plain".into(), series_to_json(&s, &plain.series));
    let mut text = format!(
        "L-series of {} over F_{}[θ][{}], primes of degree ≤ {d}, through θ^-{n}\nplain:\n{}\n",
        data.name,
        f.order(),
        m.group.spec(),
        group_series_text(&s, &plain.series)
    );
    let rows: Vec<Vec<String>>;
    match cfg.z {
        Some(ZMode::Eval(v)) => {
            let v = z_value(&f, v)?;
            let at = specialize_series(&zr, &deformed.series, v);
            out.insert("deformed".into(), json!({"z": v, "series": series_to_json(&s, &at)}));
            text += &format!("deformed at z = {v}:\n{}\n", group_series_text(&s, &at));
            let spec = |lf: &LocalFactor<Vec<Vec<u32>>>| LocalFactor {
                prime: lf.prime.clone(),
                lie: lf.lie.iter().map(|c| c.iter().map(|p| zr.base.eval(p, &v)).collect()).collect(),
                full: lf.full.iter().map(|c| c.iter().map(|p| zr.base.eval(p, &v)).collect()).collect(),
            };
            let fs: Vec<_> = deformed.factors.iter().map(spec).collect();
            out.insert("factors".into(), Value::Array(fs.iter().map(|lf| factor_json(&ring, &data, lf)).collect()));
            rows = fs.iter().map(|lf| factor_row(&ring, &data, lf)).collect();
        }
        _ => {
            out.insert("deformed".into(), json!({"z": "poly", "series": series_to_json(&sz, &deformed.series)}));
            text += &format!("deformed (z symbolic):\n{}\n", group_series_text(&sz, &deformed.series));
            if cfg.z == Some(ZMode::Poly) {
                out.insert("factors".into(), Value::Array(deformed.factors.iter().map(|lf| factor_json(&zr, &data, lf)).collect()));
                rows = deformed.factors.iter().map(|lf| factor_row(&zr, &data, lf)).collect();
            } else {
                out.insert("factors".into(), Value::Array(plain.factors.iter().map(|lf| factor_json(&ring, &data, lf)).collect()));
                rows = plain.factors.iter().map(|lf| factor_row(&ring, &data, lf)).collect();
            }
        }
    }
    let excluded: Vec<String> = plain.excluded.iter().map(|v| a.format(v)).collect();
    if !excluded.is_empty() {
        text += &format!("excluded primes: {}\n", excluded.join(", "));
    }
    out.insert("excluded_primes".into(), json!(excluded));
    Ok(Output { json: Value::Object(out), text, csv: csv(&FACTOR_COLUMNS, &rows), ok: true })
}
