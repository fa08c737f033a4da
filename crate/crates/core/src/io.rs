//! JSON encodings of ring elements and series, the expression language used
//! by TOML module and lattice files, and the shipped presets.

use std::sync::Arc;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::anderson::{carlitz, AndersonModule};
use crate::error::{Error, Result};
use crate::extension::ExtensionAlgebra;
use crate::fq::Fq;
use crate::group::{AbelianGroup, GroupRing};
use crate::lattice::Lattice;
use crate::matrix::Matrix;
use crate::poly::{poly_a, PolyA, PolyRing};
use crate::ratfunc::RatFunc;
use crate::ring::Ring;
use crate::series::{SeriesRing, ThetaSeries, EXACT};

/// Rings whose elements have a JSON form.
pub trait Codec: Ring {
    fn encode(&self, a: &Self::Elem) -> Value;
    fn decode(&self, v: &Value) -> Result<Self::Elem>;
}

impl Codec for Fq {
    /// Prime fields use residues; larger fields use the base-`p` code of the
    /// digit vector in the power basis of the generator `g`.
    fn encode(&self, a: &u32) -> Value {
        json!(a)
    }

    fn decode(&self, v: &Value) -> Result<u32> {
        let n = v.as_u64().ok_or_else(|| Error::Parse(format!("field element must be a non-negative integer, got {v}")))?;
        if n >= self.order() {
            return Err(Error::Parse(format!("field element {n} out of range for F_{}", self.order())));
        }
        Ok(n as u32)
    }
}

impl<R: Codec> Codec for PolyRing<R> {
    fn encode(&self, a: &Self::Elem) -> Value {
        let coeffs: Map<String, Value> = a
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.base.is_zero(c))
            .map(|(i, c)| (i.to_string(), self.base.encode(c)))
            .collect();
        json!({"ring": "poly", "var": self.var.name(), "coeffs": coeffs})
    }

    fn decode(&self, v: &Value) -> Result<Self::Elem> {
        expect_tag(v, "poly")?;
        if v.get("var").and_then(Value::as_str) != Some(self.var.name()) {
            return Err(Error::Parse(format!("polynomial variable must be `{}`", self.var.name())));
        }
        let mut out = vec![];
        for (k, c) in coeff_map(v)? {
            let i: usize = k.parse().map_err(|_| Error::Parse(format!("polynomial exponent `{k}`")))?;
            if out.len() <= i {
                out.resize(i + 1, self.base.zero());
            }
            out[i] = self.base.decode(c)?;
        }
        Ok(self.normalize(out))
    }
}

impl<R: Codec> Codec for GroupRing<R> {
    fn encode(&self, a: &Self::Elem) -> Value {
        let coeffs: Map<String, Value> = a
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.base.is_zero(c))
            .map(|(g, c)| (self.group.element_key(g), self.base.encode(c)))
            .collect();
        json!({"ring": "group", "group": self.group.spec(), "coeffs": coeffs})
    }

    fn decode(&self, v: &Value) -> Result<Self::Elem> {
        expect_tag(v, "group")?;
        let spec = v.get("group").and_then(Value::as_str).unwrap_or_default();
        let g = AbelianGroup::parse(spec, self.group.characteristic())?;
        if g.factors() != self.group.factors() {
            return Err(Error::Parse(format!("group `{spec}` differs from `{}`", self.group.spec())));
        }
        let mut out = vec![self.base.zero(); self.order()];
        for (k, c) in coeff_map(v)? {
            out[self.group.parse_element_key(k)?] = self.base.decode(c)?;
        }
        Ok(out)
    }
}

fn expect_tag(v: &Value, tag: &str) -> Result<()> {
    match v.get("ring").and_then(Value::as_str) {
        Some(t) if t == tag => Ok(()),
        _ => Err(Error::Parse(format!("expected an element tagged \"ring\": \"{tag}\", got {v}"))),
    }
}

fn coeff_map(v: &Value) -> Result<&Map<String, Value>> {
    v.get("coeffs").and_then(Value::as_object).ok_or_else(|| Error::Parse("missing \"coeffs\" map".into()))
}

/// `{"var":"theta^-1","lead":d,"precision":N,"coeffs":[…]}`: `coeffs[i]` is the
/// coefficient of `θ^{d−i}`, and every coefficient of `θ^e` with `e ≥ −N` is
/// known. Exact series carry `"precision": null`.
pub fn series_to_json<R: Codec>(s: &SeriesRing<R>, x: &ThetaSeries<R::Elem>) -> Value {
    let x = s.canonical(x.clone());
    json!({
        "var": "theta^-1",
        "lead": x.lead,
        "precision": if x.is_exact() { Value::Null } else { json!(x.prec) },
        "coeffs": x.coeffs.iter().map(|c| s.base.encode(c)).collect::<Vec<_>>(),
    })
}

pub fn series_from_json<R: Codec>(s: &SeriesRing<R>, v: &Value) -> Result<ThetaSeries<R::Elem>> {
    if v.get("var").and_then(Value::as_str) != Some("theta^-1") {
        return Err(Error::Parse("series must have \"var\": \"theta^-1\"".into()));
    }
    let lead = v.get("lead").and_then(Value::as_i64).ok_or_else(|| Error::Parse("series needs an integer \"lead\"".into()))?;
    let prec = match v.get("precision") {
        Some(Value::Null) => EXACT,
        Some(p) => p.as_i64().ok_or_else(|| Error::Parse("series \"precision\" must be an integer".into()))?,
        None => return Err(Error::Parse("series needs \"precision\"".into())),
    };
    let coeffs = v
        .get("coeffs")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("series needs a \"coeffs\" array".into()))?
        .iter()
        .map(|c| s.base.decode(c))
        .collect::<Result<Vec<_>>>()?;
    Ok(s.from_coeffs(lead, coeffs, prec))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    Theta,
    Alpha,
    Delta,
    /// The generator of `F_q` over `F_p`.
    Gen,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(i64),
    Sym(Symbol),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(i64),
    Sym(Symbol),
    Op(char),
}

fn greek(c: char) -> Option<Symbol> {
    match c {
        'θ' => Some(Symbol::Theta),
        'α' => Some(Symbol::Alpha),
        'δ' => Some(Symbol::Delta),
        _ => None,
    }
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let mut out = vec![];
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Token::Int(text.parse().map_err(|e| Error::Parse(format!("integer `{text}`: {e}")))?));
        } else if let Some(sym) = greek(c) {
            out.push(Token::Sym(sym));
            i += 1;
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphabetic() {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let sym = match word.as_str() {
                "theta" => Symbol::Theta,
                "alpha" => Symbol::Alpha,
                "delta" => Symbol::Delta,
                "g" => Symbol::Gen,
                _ => return Err(Error::Parse(format!("unknown symbol `{word}` in `{s}`"))),
            };
            out.push(Token::Sym(sym));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}` in `{s}`")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut e = if self.eat('-') { Expr::Neg(Box::new(self.product()?)) } else { self.product()? };
        loop {
            if self.eat('+') {
                e = Expr::Add(Box::new(e), Box::new(self.product()?));
            } else if self.eat('-') {
                e = Expr::Sub(Box::new(e), Box::new(self.product()?));
            } else {
                return Ok(e);
            }
        }
    }

    // juxtaposition multiplies: `2theta`, `theta alpha`
    fn product(&mut self) -> Result<Expr> {
        let mut e = self.power()?;
        loop {
            if self.eat('*') {
                e = Expr::Mul(Box::new(e), Box::new(self.power()?));
            } else if self.eat('/') {
                e = Expr::Div(Box::new(e), Box::new(self.power()?));
            } else if matches!(self.peek(), Some(Token::Int(_) | Token::Sym(_) | Token::Op('('))) {
                e = Expr::Mul(Box::new(e), Box::new(self.power()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let (sign, paren) = (if self.eat('-') { -1 } else { 1 }, self.eat('('));
        let sign = if paren && self.eat('-') { -sign } else { sign };
        let n = match self.peek() {
            Some(Token::Int(n)) => *n,
            other => return Err(Error::Parse(format!("exponent must be an integer, got {other:?}"))),
        };
        self.pos += 1;
        if paren && !self.eat(')') {
            return Err(Error::Parse("unclosed exponent".into()));
        }
        Ok(Expr::Pow(Box::new(base), sign * n))
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Token::Int(n)) => {
                self.pos += 1;
                Ok(Expr::Int(n))
            }
            Some(Token::Sym(s)) => {
                self.pos += 1;
                Ok(Expr::Sym(s))
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(Error::Parse("unbalanced parentheses".into()));
                }
                Ok(e)
            }
            other => Err(Error::Parse(format!("unexpected {other:?}"))),
        }
    }
}

pub fn parse_expr(s: &str) -> Result<Expr> {
    let mut p = Parser { tokens: tokenize(s)?, pos: 0 };
    if p.tokens.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let e = p.sum()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Parse(format!("trailing input in `{s}`")));
    }
    Ok(e)
}

/// Evaluates in `r`, resolving symbols with `atom` and division with `inv`.
pub fn eval_expr<R: Ring>(
    r: &R,
    e: &Expr,
    atom: &dyn Fn(Symbol) -> Result<R::Elem>,
    inv: &dyn Fn(&R::Elem) -> Option<R::Elem>,
) -> Result<R::Elem> {
    let ev = |x: &Expr| eval_expr(r, x, atom, inv);
    let invert = |x: &R::Elem| inv(x).ok_or_else(|| Error::Parse(format!("cannot divide by {}", r.format(x))));
    Ok(match e {
        Expr::Int(n) => r.from_int(*n),
        Expr::Sym(s) => atom(*s)?,
        Expr::Add(a, b) => r.add(&ev(a)?, &ev(b)?),
        Expr::Sub(a, b) => r.sub(&ev(a)?, &ev(b)?),
        Expr::Mul(a, b) => r.mul(&ev(a)?, &ev(b)?),
        Expr::Div(a, b) => r.mul(&ev(a)?, &invert(&ev(b)?)?),
        Expr::Neg(a) => r.neg(&ev(a)?),
        Expr::Pow(a, n) if *n >= 0 => r.pow(&ev(a)?, *n as u64),
        Expr::Pow(a, n) => r.pow(&invert(&ev(a)?)?, n.unsigned_abs()),
    })
}

fn field_generator(f: &Fq) -> u32 {
    if f.degree() == 1 {
        1
    } else {
        f.from_digits(&[0, 1])
    }
}

/// A polynomial in `θ` over `F_q`, e.g. `"theta^2 + 2*theta + g"`.
pub fn parse_theta_poly(f: &Fq, s: &str) -> Result<Vec<u32>> {
    let a = poly_a(f);
    let atom = |sym: Symbol| match sym {
        Symbol::Theta => Ok(vec![0, 1]),
        Symbol::Gen => Ok(a.constant(field_generator(f))),
        other => Err(Error::Parse(format!("{other:?} is not allowed in a θ-polynomial"))),
    };
    eval_expr(&a, &parse_expr(s)?, &atom, &|x| a.unit_inverse(x))
}

/// An element of `k[α, δ]`; division only by nonzero elements of `k`.
pub fn parse_algebra_elem(alg: &ExtensionAlgebra, s: &str) -> Result<Vec<RatFunc>> {
    let f = alg.fq();
    let atom = |sym: Symbol| match sym {
        Symbol::Theta => Ok(alg.theta()),
        Symbol::Gen => Ok(alg.embed(alg.k.from_poly(vec![field_generator(f)]))),
        Symbol::Alpha if alg.artin_schreier.is_some() => Ok(alg.alpha()),
        Symbol::Delta if alg.kummer.is_some() => Ok(alg.delta()),
        other => Err(Error::Parse(format!("{other:?} is not a generator of this algebra"))),
    };
    let inv = |x: &Vec<RatFunc>| alg.as_scalar(x).and_then(|c| alg.k.unit_inverse(&c)).map(|c| alg.embed(c));
    eval_expr(alg, &parse_expr(s)?, &atom, &inv)
}

fn parse_ratfunc(f: &Fq, s: &str) -> Result<RatFunc> {
    let alg = ExtensionAlgebra::new(f, None, None)?;
    Ok(parse_algebra_elem(&alg, s)?[0].clone())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    q: u64,
    module: Option<ModuleSection>,
    extension: Option<ExtensionSection>,
    lattice: Option<LatticeSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleSection {
    dimension: usize,
    r: usize,
    matrices: Vec<Vec<Vec<String>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtensionSection {
    artin_schreier: Option<String>,
    kummer_degree: Option<usize>,
    kummer_radicand: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeSection {
    group: Option<String>,
    generators: Vec<Vec<String>>,
}

/// A t-module together with the lattice it acts on.
#[derive(Clone, Debug)]
pub struct ModuleData {
    pub name: String,
    pub module: AndersonModule,
    pub lattice: Lattice,
    /// The Kummer radicand whose residue symbols label the local factors.
    pub symbol_radicand: Option<(Vec<u32>, u64)>,
}

/// Reads a TOML file with `q`, an optional `[module]` (Carlitz when absent),
/// an optional `[extension]` and an optional `[lattice]` (`A^n` when absent).
///
/// ```toml
/// q = 3
/// [module]
/// dimension = 1
/// r = 1
/// matrices = [[["theta"]], [["1"]]]
/// ```
pub fn parse_spec(name: &str, text: &str) -> Result<ModuleData> {
    let spec: SpecFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let f = Fq::with_order(spec.q)?;
    let a = poly_a(&f);
    let module = match &spec.module {
        None => carlitz(&f),
        Some(m) => {
            if m.matrices.len() != m.r + 1 {
                return Err(Error::Parse(format!("r = {} needs {} matrices, found {}", m.r, m.r + 1, m.matrices.len())));
            }
            let mats = m.matrices.iter().map(|rows| parse_matrix(&a, rows, m.dimension)).collect::<Result<Vec<_>>>()?;
            AndersonModule::new(&f, mats)?
        }
    };
    let (alg, radicand) = match &spec.extension {
        None => (ExtensionAlgebra::new(&f, None, None)?, None),
        Some(x) => {
            let c = x.artin_schreier.as_deref().map(|s| parse_ratfunc(&f, s)).transpose()?;
            let kummer = match (x.kummer_degree, &x.kummer_radicand) {
                (Some(m), Some(d)) => Some((m, parse_ratfunc(&f, d)?)),
                (None, None) => None,
                _ => return Err(Error::Parse("kummer_degree and kummer_radicand go together".into())),
            };
            let radicand = match &kummer {
                Some((m, d)) if d.den == vec![1] => Some((d.num.clone(), *m as u64)),
                _ => None,
            };
            (ExtensionAlgebra::new(&f, c, kummer)?, radicand)
        }
    };
    let lattice = match &spec.lattice {
        None => Lattice::standard(&f, module.dim)?,
        Some(l) => {
            let group = Arc::new(AbelianGroup::parse(l.group.as_deref().unwrap_or("1"), f.p())?);
            let gens = l
                .generators
                .iter()
                .map(|g| g.iter().map(|s| parse_algebra_elem(&alg, s)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Lattice::from_generators(&alg, group, gens)?
        }
    };
    if lattice.dim != module.dim {
        return Err(Error::DimensionMismatch(format!("lattice lives in L^{} but the module has dimension {}", lattice.dim, module.dim)));
    }
    Ok(ModuleData { name: name.into(), module, lattice, symbol_radicand: radicand })
}

fn parse_matrix(a: &PolyA, rows: &[Vec<String>], n: usize) -> Result<Matrix<Vec<u32>>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse(format!("each matrix must be {n} × {n}")));
    }
    let entries = rows
        .iter()
        .map(|r| r.iter().map(|s| parse_theta_poly(&a.base, s)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_rows(entries))
}

pub const PRESETS: [&str; 3] = ["carlitz-A", "artin-schreier", "artin-schreier-trace"];

/// The twisted lattice of the Artin–Schreier example as a module file.
pub fn artin_schreier_toml(p: u64) -> String {
    format!(
        "q = {p}\n\n[extension]\nartin_schreier = \"1/theta\"\nkummer_degree = {m}\nkummer_radicand = \"1 + theta^{m}\"\n\n\
         [lattice]\ngroup = \"Z/{p}\"\ngenerators = [[\"theta * alpha^{m} * delta\"]]\n",
        m = p - 1
    )
}

/// The trace lattice `θAδ` of the same example, without the group.
pub fn artin_schreier_trace_toml(p: u64) -> String {
    format!(
        "q = {p}\n\n[extension]\nartin_schreier = \"1/theta\"\nkummer_degree = {m}\nkummer_radicand = \"1 + theta^{m}\"\n\n\
         [lattice]\ngenerators = [[\"theta * delta\"]]\n",
        m = p - 1
    )
}

/// `carlitz-A` takes the field order `q`; the Artin–Schreier presets take the prime `p`.
pub fn preset(name: &str, q: u64) -> Result<ModuleData> {
    match name {
        "carlitz-A" => parse_spec(name, &format!("q = {q}\n")),
        "artin-schreier" => parse_spec(name, &artin_schreier_toml(q)),
        "artin-schreier-trace" => parse_spec(name, &artin_schreier_trace_toml(q)),
        _ => Err(Error::InvalidArgument(format!("unknown preset `{name}` (known: {})", PRESETS.join(", ")))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_artin_schreier;
    use crate::poly::Var;

    #[test]
    fn expressions() {
        let f = Fq::prime(3).unwrap();
        assert_eq!(parse_theta_poly(&f, "theta^2 + 2*theta + 1").unwrap(), vec![1, 2, 1]);
        assert_eq!(parse_theta_poly(&f, "(θ+1)^2").unwrap(), vec![1, 2, 1]);
        assert_eq!(parse_theta_poly(&f, "-θ - 4").unwrap(), vec![2, 2]);
        assert_eq!(parse_theta_poly(&f, "2θ").unwrap(), vec![0, 2]);
        assert_eq!(parse_theta_poly(&f, "0").unwrap(), Vec::<u32>::new());
        assert!(parse_theta_poly(&f, "1/theta").is_err());
        assert!(parse_theta_poly(&f, "alpha").is_err());
        assert!(parse_theta_poly(&f, "(theta").is_err());
        assert!(parse_theta_poly(&f, "").is_err());
        let f4 = Fq::with_order(4).unwrap();
        let g = parse_theta_poly(&f4, "g*theta + g^3").unwrap();
        assert_eq!(g, vec![1, f4.from_digits(&[0, 1])]);
    }

    #[test]
    fn preset_matches_builder() {
        for p in [3, 5] {
            let data = build_artin_schreier(p).unwrap();
            let m = preset("artin-schreier", p).unwrap();
            assert_eq!(m.lattice.basis, data.twisted.basis);
            assert_eq!(m.symbol_radicand, Some((data.kummer_radicand.clone(), p - 1)));
            let n = preset("artin-schreier-trace", p).unwrap();
            assert_eq!(n.lattice.basis, data.trace_lattice.basis);
        }
        assert!(preset("nope", 3).is_err());
    }

    #[test]
    fn module_file() {
        let text = "q = 2\n[module]\ndimension = 2\nr = 1\nmatrices = [[[\"theta\", \"1\"], [\"0\", \"theta\"]], [[\"0\", \"0\"], [\"1\", \"0\"]]]\n";
        let m = parse_spec("file", text).unwrap();
        assert_eq!(m.module.dim, 2);
        assert_eq!(m.lattice.rank(), 2);
        let bad = "q = 2\n[module]\ndimension = 1\nr = 2\nmatrices = [[[\"theta\"]], [[\"1\"]]]\n";
        assert!(parse_spec("file", bad).is_err());
        let not_t = "q = 3\n[module]\ndimension = 1\nr = 1\nmatrices = [[[\"theta + 1\"]], [[\"1\"]]]\n";
        assert!(matches!(parse_spec("file", not_t), Err(Error::NotTModule)));
    }

    #[test]
    fn json_round_trip() {
        let alg = ExtensionAlgebra::artin_schreier_example(3, true).unwrap();
        assert!(parse_algebra_elem(&alg, "θα²").is_err());
        let x = parse_algebra_elem(&alg, "θα^2δ/(θ+1)").unwrap();
        let y = parse_algebra_elem(&alg, "theta * alpha^2 * delta * (theta + 1)^-1").unwrap();
        assert_eq!(x, y);
        assert!(parse_algebra_elem(&alg, "1/alpha").is_err());
        let f = Fq::prime(3).unwrap();
        let g = Arc::new(AbelianGroup::parse("Z/3", 3).unwrap());
        let zr = GroupRing::new(PolyRing::new(f.clone(), Var::Z), g);
        let s = SeriesRing::new(zr.clone(), 5);
        let x = s.from_coeffs(0, vec![zr.one(), vec![vec![0, 1], vec![], vec![2]]], 5);
        let v = series_to_json(&s, &x);
        assert_eq!(v["var"], "theta^-1");
        assert_eq!(v["coeffs"][1]["coeffs"]["(0)"]["coeffs"]["1"], 1);
        assert_eq!(series_from_json(&s, &v).unwrap(), s.canonical(x));
        let exact = s.one();
        assert_eq!(series_to_json(&s, &exact)["precision"], Value::Null);
        assert_eq!(series_from_json(&s, &series_to_json(&s, &exact)).unwrap(), exact);
    }
}
