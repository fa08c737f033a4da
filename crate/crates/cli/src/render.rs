use anderson_core::group::GroupRing;
use anderson_core::io::Codec;
use anderson_core::series::{SeriesRing, ThetaSeries};
use anderson_core::Ring;
use serde_json::{json, Value};

fn theta_power(e: i64) -> String {
    match e {
        0 => String::new(),
        1 => "θ".into(),
        _ => format!("θ^{e}"),
    }
}

fn term(coeff: String, e: i64) -> String {
    let t = theta_power(e);
    match (coeff.as_str(), t.is_empty()) {
        (c, true) => c.to_string(),
        ("1", false) => t,
        (c, false) if c.contains(' ') => format!("({c})·{t}"),
        (c, false) => format!("{c}·{t}"),
    }
}

fn error_term(x: &ThetaSeries<impl Clone>) -> Option<String> {
    (!x.is_exact()).then(|| format!("O({})", theta_power(-x.prec - 1)))
}

/// `c_0 + c_1·θ^-1 + … + O(θ^{-N-1})`.
pub fn series_text<R: Ring>(s: &SeriesRing<R>, x: &ThetaSeries<R::Elem>) -> String {
    let x = s.canonical(x.clone());
    let mut terms: Vec<String> = x
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !s.base.is_zero(c))
        .map(|(i, c)| term(s.base.format(c), x.lead - i as i64))
        .collect();
    terms.extend(error_term(&x));
    if terms.is_empty() {
        terms.push("0".into());
    }
    terms.join(" + ")
}

/// One line per group element `g` with a nonzero component: `g · (expansion)`.
pub fn group_series_text<R: Ring>(s: &SeriesRing<GroupRing<R>>, x: &ThetaSeries<Vec<R::Elem>>) -> String {
    let g = &s.base.group;
    let comp = SeriesRing::new(s.base.base.clone(), s.default_prec);
    let lines: Vec<String> = (0..s.base.order())
        .filter_map(|h| {
            let part = s.map(x, &comp, |c| c[h].clone());
            let part = comp.canonical(part);
            (!part.coeffs.is_empty() || h == 0).then(|| format!("  {} · ({})", g.format_element(h), series_text(&comp, &part)))
        })
        .collect();
    lines.join("\n")
}

/// Coefficients of `θ^e`, `lead ≥ e ≥ −n`, at which two series differ.
pub fn series_mismatches<R: Codec>(s: &SeriesRing<R>, expected: &ThetaSeries<R::Elem>, actual: &ThetaSeries<R::Elem>, n: i64) -> Vec<Value> {
    let top = expected.lead.max(actual.lead).max(0);
    (-n..=top)
        .rev()
        .filter_map(|e| {
            let (a, b) = (s.coeff(expected, e), s.coeff(actual, e));
            (a != b).then(|| json!({"at": format!("theta^{e}"), "expected": s.base.encode(&a), "actual": s.base.encode(&b)}))
        })
        .collect()
}

/// Coefficients of `θ^i` at which two polynomials differ.
pub fn poly_mismatches<R: Codec>(r: &R, expected: &[R::Elem], actual: &[R::Elem]) -> Vec<Value> {
    let n = expected.len().max(actual.len());
    (0..n)
        .filter_map(|i| {
            let a = expected.get(i).cloned().unwrap_or_else(|| r.zero());
            let b = actual.get(i).cloned().unwrap_or_else(|| r.zero());
            (a != b).then(|| json!({"at": format!("theta^{i}"), "expected": r.encode(&a), "actual": r.encode(&b)}))
        })
        .collect()
}

/// A polynomial in `θ` with coefficients in `r`, ascending.
pub fn poly_to_json<R: Codec>(r: &R, p: &[R::Elem]) -> Value {
    Value::Array(p.iter().map(|c| r.encode(c)).collect())
}

pub fn poly_text<R: Ring>(r: &R, p: &[R::Elem]) -> String {
    let terms: Vec<String> = p
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| !r.is_zero(c))
        .map(|(i, c)| term(r.format(c), i as i64))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// RFC 4180 CSV with a header row.
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(header).expect("write to memory");
    for r in rows {
        w.write_record(r).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 input")
}
