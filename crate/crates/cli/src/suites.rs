//! Named verification suites. Every check computes both sides independently
//! and records the exact coefficients where they disagree.

use std::sync::Arc;

use anderson_core::anderson::{carlitz, AndersonModule};
use anderson_core::extension::{artin_schreier_frobenius, residue_symbol_at_prime, ExtensionAlgebra};
use anderson_core::fq::Fq;
use anderson_core::group::{monic_representative, AbelianGroup, GroupRing};
use anderson_core::lattice::{build_artin_schreier, deformed_ring, reduce_action, FiniteThetaModule, Lattice};
use anderson_core::lvalues::*;
use anderson_core::matrix::Matrix;
use anderson_core::nuclear::*;
use anderson_core::poly::{irreducibles_by_degree, poly_a};
use anderson_core::series::{SeriesRing, ThetaSeries};
use anderson_core::Ring;
use anyhow::Result;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::commands::{header, Output};
use crate::config::{RunConfig, UsageError, ZMode};
use crate::render::{csv, poly_mismatches, series_mismatches};

pub const SUITES: [&str; 6] = ["carlitz-zeta", "artin-schreier", "detg-bridge", "nuclear-props", "lattice-index", "z-deform"];

const TRIALS: usize = 100;

pub struct Check {
    pub name: String,
    pub params: Value,
    pub mismatches: Vec<Value>,
    pub error: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.error.is_none()
    }

    fn to_json(&self) -> Value {
        let mut v = json!({"name": self.name, "passed": self.passed(), "params": self.params});
        if !self.mismatches.is_empty() {
            v["mismatches"] = Value::Array(self.mismatches.clone());
        }
        if let Some(e) = &self.error {
            v["error"] = json!(e);
        }
        v
    }
}

/// Runs `body`; an error becomes a failed check carrying its message.
fn attempt(name: &str, params: Value, body: impl FnOnce() -> anderson_core::Result<Vec<Value>>) -> Check {
    match body() {
        Ok(mismatches) => Check { name: name.into(), params, mismatches, error: None },
        Err(e) => Check { name: name.into(), params, mismatches: vec![], error: Some(e.to_string()) },
    }
}

pub fn run(suite: &str, cfg: &RunConfig) -> Result<Output> {
    let checks = match suite {
        "carlitz-zeta" => carlitz_zeta(cfg),
        "artin-schreier" => artin_schreier(cfg),
        "detg-bridge" => detg_bridge(cfg)?,
        "nuclear-props" => nuclear_props(cfg),
        "lattice-index" => lattice_index_laws(cfg)?,
        "z-deform" => z_deform(cfg)?,
        _ => return Err(UsageError(format!("unknown suite `{suite}` (known: {})", SUITES.join(", "))).into()),
    };
    let ok = checks.iter().all(Check::passed);
    let mut out = header("verify", cfg);
    out.insert("suite".into(), json!(suite));
    out.insert("passed".into(), json!(ok));
    out.insert("checks".into(), Value::Array(checks.iter().map(Check::to_json).collect()));
    let mut text = format!("suite {suite}: {}\n", if ok { "PASS" } else { "FAIL" });
    let mut rows = vec![];
    for c in &checks {
        text += &format!("  {} {} {}\n", if c.passed() { "PASS" } else { "FAIL" }, c.name, c.params);
        for m in c.mismatches.iter().take(20) {
            text += &format!("      mismatch {m}\n");
        }
        if let Some(e) = &c.error {
            text += &format!("      error: {e}\n");
        }
        rows.push(vec![
            c.name.clone(),
            c.passed().to_string(),
            c.params.to_string(),
            c.mismatches.len().to_string(),
            c.error.clone().unwrap_or_default(),
        ]);
    }
    Ok(Output { json: Value::Object(out), text, csv: csv(&["check", "passed", "params", "mismatches", "error"], &rows), ok })
}

fn trivial(f: &Fq) -> GroupRing<Fq> {
    GroupRing::new(f.clone(), Arc::new(AbelianGroup::trivial(f.p())))
}

fn zeta_series(f: &Fq, d: usize, n: i64) -> ThetaSeries<Vec<u32>> {
    let w = trivial_weight(f, false);
    specialize_series(&w.ring, &monic_sum(&w, d, n), 1)
}

fn carlitz_zeta(cfg: &RunConfig) -> Vec<Check> {
    let n = cfg.precision_or(6);
    let d = cfg.max_deg_or(n.max(1) as usize);
    let mut checks = vec![];
    for q in cfg.q.map_or(vec![2, 3], |q| vec![q]) {
        let params = json!({"q": q, "precision": n, "max_deg": d});
        checks.push(attempt("euler-product-equals-monic-sum", params.clone(), || {
            let f = Fq::with_order(q)?;
            let l = euler_product(&carlitz(&f), &Lattice::standard(&f, 1)?, &EulerConfig::new(d, n))?;
            let s = SeriesRing::new(trivial(&f), n);
            Ok(series_mismatches(&s, &zeta_series(&f, d, n), &l.series, n))
        }));
        checks.push(attempt("zeta-is-a-unit", params.clone(), || {
            let f = Fq::with_order(q)?;
            let fs = SeriesRing::new(f.clone(), n);
            let zeta = SeriesRing::new(trivial(&f), n).map(&zeta_series(&f, d, n), &fs, |c| c[0]);
            let basis = Matrix::from_rows(vec![vec![fs.one()]]);
            let r = verify_unit(&carlitz(&f), &basis, &[zeta], n)?;
            Ok(if r.member {
                vec![]
            } else {
                vec![json!({"at": "exp residual", "expected": "member of A", "actual": {"candidate": r.candidate, "residual_valuation": r.residual_valuation}})]
            })
        }));
        checks.push(attempt("stabilization", json!({"q": q, "precision": n, "max_deg": [d, d + 5]}), || {
            let f = Fq::with_order(q)?;
            let (e, m) = (carlitz(&f), Lattice::standard(&f, 1)?);
            let a = euler_product(&e, &m, &EulerConfig::new(d, n))?;
            let b = euler_product(&e, &m, &EulerConfig::new(d + 5, n))?;
            Ok(series_mismatches(&SeriesRing::new(trivial(&f), n), &a.series, &b.series, n))
        }));
    }
    checks
}

/// `P·1_G − z^{deg P}·sym·σ_h`, or `P − sym` over the trivial group, as a
/// polynomial over `F_p[z][G]` (`deformed`) or `F_p[G]`.
fn closed_factor(ring: &GroupRing<Fq>, prime: &[u32], sym: u32, h: u64, deformed: bool) -> (Vec<Vec<Vec<u32>>>, Vec<Vec<u32>>) {
    let zr = deformed_ring(ring);
    let g = &ring.group;
    let shift = if g.order() == 1 { g.identity() } else { g.index(&[h]) };
    let deg = prime.len() - 1;
    let mut z = vec![];
    let mut plain = vec![];
    for (i, c) in prime.iter().enumerate() {
        let mut pz = zr.term(zr.base.constant(*c), g.identity());
        let mut pp = ring.term(*c, g.identity());
        if i == 0 {
            pz = zr.sub(&pz, &zr.term(zr.base.monomial(sym, if deformed { deg } else { 0 }), shift));
            pp = ring.sub(&pp, &ring.term(sym, shift));
        }
        z.push(pz);
        plain.push(pp);
    }
    (z, plain)
}

fn unramified_primes(data: &anderson_core::lattice::ArtinSchreierData, d: usize) -> Vec<Vec<u32>> {
    let a = poly_a(data.alg.fq());
    irreducibles_by_degree(&a, d)
        .into_iter()
        .flatten()
        .filter(|v| v.len() > 1 && v != &vec![0, 1] && !a.divides(v, &data.kummer_radicand))
        .collect()
}

fn symbol_and_shift(data: &anderson_core::lattice::ArtinSchreierData, v: &[u32]) -> anderson_core::Result<(u32, u64)> {
    let a = poly_a(data.alg.fq());
    Ok((residue_symbol_at_prime(&a, &data.kummer_radicand, v, data.p - 1), artin_schreier_frobenius(&data.alg, v)?))
}

fn artin_schreier(cfg: &RunConfig) -> Vec<Check> {
    let p = cfg.q.unwrap_or(3);
    let n = cfg.precision_or(6);
    let d = cfg.max_deg_or(3);
    let unit_precision = n.max(25);
    let data = match build_artin_schreier(p) {
        Ok(x) => x,
        Err(e) => return vec![attempt("artin-schreier-data", json!({"p": p}), || Err(e))],
    };
    let f = data.alg.fq().clone();
    let e = carlitz(&f);
    let a = poly_a(&f);
    let ring = GroupRing::new(f.clone(), data.twisted.group.clone());
    let flat = trivial(&f);
    let primes = unramified_primes(&data, d);
    let mut checks = vec![];

    checks.push(attempt("local-factors", json!({"p": p, "max_deg": d, "primes": primes.len()}), || {
        let mut mm = vec![];
        for v in &primes {
            let (sym, h) = symbol_and_shift(&data, v)?;
            let lf = local_factor(&e, &data.twisted, v, true)?;
            let (_, expected) = closed_factor(&ring, v, sym, h, false);
            let lie: Vec<Vec<u32>> = v.iter().map(|c| ring.term(*c, 0)).collect();
            for (what, exp, act) in [("full", &expected, &lf.full), ("lie", &lie, &lf.lie)] {
                for m in poly_mismatches(&ring, exp, act) {
                    mm.push(json!({"prime": a.format(v), "part": what, "mismatch": m}));
                }
            }
        }
        Ok(mm)
    }));
    checks.push(attempt("ramified-factor", json!({"p": p, "prime": "θ"}), || {
        let lf = local_factor(&e, &data.twisted, &[0, 1], true)?;
        let expected = vec![ring.trace_element(), ring.one()];
        Ok(poly_mismatches(&ring, &expected, &lf.full))
    }));
    checks.push(attempt("trace-identity", json!({"p": p}), || {
        let alg = ExtensionAlgebra::artin_schreier_example(p, false)?;
        let x = alg.mul(&alg.theta(), &alg.pow(&alg.alpha(), p - 1));
        let (tr, expected) = (alg.trace(&x), alg.neg(&alg.theta()));
        Ok(if tr == expected { vec![] } else { vec![json!({"at": "Tr", "expected": alg.format(&expected), "actual": alg.format(&tr)})] })
    }));
    checks.push(attempt("deformed-factors", json!({"p": p, "max_deg": d}), || deformed_factor_mismatches(&data, &e, &ring, &primes)));
    checks.push(attempt("trace-lattice-factors", json!({"p": p, "max_deg": d}), || {
        let mut mm = vec![];
        for v in &primes {
            let (sym, _) = symbol_and_shift(&data, v)?;
            let lf = local_factor(&e, &data.trace_lattice, v, false)?;
            let (_, expected) = closed_factor(&flat, v, sym, 0, false);
            for m in poly_mismatches(&flat, &expected, &lf.full) {
                mm.push(json!({"prime": a.format(v), "mismatch": m}));
            }
        }
        Ok(mm)
    }));
    checks.push(attempt("trace-lattice-unit", json!({"p": p, "precision": unit_precision}), || {
        let extra = 2;
        let w = symbol_weight(p, SymbolWeightOptions { artin: false, with_z: false, coprime_to_theta: true })?;
        let sum = monic_sum(&w, (unit_precision + extra) as usize, unit_precision + extra);
        let fs = SeriesRing::new(f.clone(), unit_precision + extra);
        let l = SeriesRing::new(w.ring.clone(), unit_precision + extra).map(&sum, &fs, |c| c[0].first().copied().unwrap_or(0));
        let gen = fs.shift(&kummer_root_series(&f, unit_precision + extra), 1);
        let x = fs.mul(&l, &gen);
        let r = verify_unit(&e, &Matrix::from_rows(vec![vec![gen]]), &[x], unit_precision)?;
        Ok(if r.member {
            vec![]
        } else {
            vec![json!({"at": "exp residual", "expected": "member of θAδ", "actual": {"candidate": r.candidate, "residual_valuation": r.residual_valuation}})]
        })
    }));
    checks.push(attempt("closed-form-l-series", json!({"p": p, "precision": n, "max_deg": n}), || {
        let l = deformed_euler_product(&e, &data.twisted, &EulerConfig::new(n as usize, n))?;
        let w = symbol_weight(p, SymbolWeightOptions { artin: true, with_z: true, coprime_to_theta: true })?;
        let sum = monic_sum(&w, n as usize, n);
        let s = SeriesRing::new(w.ring.clone(), n);
        let z_tr = vec![vec![0, 1]; w.ring.order()];
        let ramified = s.sub(&s.one(), &s.monomial(z_tr, -1));
        let closed = s.truncate(&s.mul(&ramified, &sum), n);
        Ok(series_mismatches(&s, &closed, &l.series, n))
    }));
    checks
}

fn deformed_factor_mismatches(
    data: &anderson_core::lattice::ArtinSchreierData,
    e: &AndersonModule,
    ring: &GroupRing<Fq>,
    primes: &[Vec<u32>],
) -> anderson_core::Result<Vec<Value>> {
    let a = poly_a(data.alg.fq());
    let zr = deformed_ring(ring);
    let mut mm = vec![];
    for v in primes {
        let (sym, h) = symbol_and_shift(data, v)?;
        let lf = deformed_local_factor(e, &data.twisted, v, true)?;
        let (expected, _) = closed_factor(ring, v, sym, h, true);
        for m in poly_mismatches(&zr, &expected, &lf.full) {
            mm.push(json!({"prime": a.format(v), "mismatch": m}));
        }
        // z = 1 gives the plain factor, z = 0 gives |Lie| = |E|
        let plain = local_factor(e, &data.twisted, v, true)?;
        let at = |c: u32, x: &[Vec<Vec<u32>>]| -> Vec<Vec<u32>> { x.iter().map(|g| g.iter().map(|p| zr.base.eval(p, &c)).collect()).collect() };
        for m in poly_mismatches(ring, &plain.full, &at(1, &lf.full)) {
            mm.push(json!({"prime": a.format(v), "at_z": 1, "mismatch": m}));
        }
        for m in poly_mismatches(ring, &at(0, &lf.lie), &at(0, &lf.full)) {
            mm.push(json!({"prime": a.format(v), "at_z": 0, "mismatch": m}));
        }
    }
    let lf = deformed_local_factor(e, &data.twisted, &[0, 1], true)?;
    let z_tr: Vec<Vec<u32>> = vec![vec![0, 1]; ring.order()];
    for m in poly_mismatches(&zr, &[z_tr, zr.one()], &lf.full) {
        mm.push(json!({"prime": "θ", "mismatch": m}));
    }
    Ok(mm)
}

const BRIDGE_GROUPS: [(&str, u64); 8] =
    [("Z/2", 2), ("Z/2", 3), ("Z/3", 3), ("Z/3", 2), ("Z/4", 2), ("Z/4", 3), ("Z/2 x Z/2", 2), ("Z/2 x Z/2", 3)];

fn trial_groups(cfg: &RunConfig) -> Result<Vec<(String, u64)>> {
    match &cfg.group {
        Some(spec) => {
            let p = cfg.q.unwrap_or(2);
            Fq::prime(p).map_err(|e| UsageError(e.to_string()))?;
            AbelianGroup::parse(spec, p).map_err(|e| UsageError(e.to_string()))?;
            Ok(vec![(spec.clone(), p)])
        }
        None => Ok(BRIDGE_GROUPS.iter().map(|(s, p)| (s.to_string(), *p)).collect()),
    }
}

fn random_series(rng: &mut ChaCha8Rng, s: &SeriesRing<GroupRing<Fq>>, lead: i64) -> ThetaSeries<Vec<u32>> {
    let q = s.base.base.order() as u32;
    let len = (lead + s.default_prec + 1) as usize;
    let coeffs = (0..len).map(|_| (0..s.base.order()).map(|_| rng.gen_range(0..q)).collect()).collect();
    s.from_coeffs(lead, coeffs, s.default_prec)
}

fn random_basis(rng: &mut ChaCha8Rng, s: &SeriesRing<GroupRing<Fq>>, r: usize) -> Matrix<ThetaSeries<Vec<u32>>> {
    Matrix::from_fn(r, r, |_, _| {
        let lead = rng.gen_range(0..=2);
        random_series(rng, s, lead)
    })
}

/// `[Λ1 : Λ2]` for random lattices, retrying until the determinants are units.
fn random_index_pair(
    rng: &mut ChaCha8Rng,
    s: &SeriesRing<GroupRing<Fq>>,
    r: usize,
) -> Option<(Matrix<ThetaSeries<Vec<u32>>>, Matrix<ThetaSeries<Vec<u32>>>, ThetaSeries<Vec<u32>>)> {
    for _ in 0..20 {
        let (b1, b2) = (random_basis(rng, s, r), random_basis(rng, s, r));
        if let Ok(idx) = lattice_index(s, &b1, &b2) {
            return Some((b1, b2, idx));
        }
    }
    None
}

fn detg_bridge(cfg: &RunConfig) -> Result<Vec<Check>> {
    let groups = trial_groups(cfg)?;
    let n = cfg.precision_or(12);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut fitting = vec![];
    let mut index = vec![];
    let mut index_trials = 0;
    let mut min_compared = n;
    for t in 0..TRIALS {
        let (spec, p) = &groups[t % groups.len()];
        let f = Fq::prime(*p)?;
        let g = Arc::new(AbelianGroup::parse(spec, *p)?);
        let ring = GroupRing::new(f.clone(), g.clone());
        let rank = rng.gen_range(1..=4);
        let action = Matrix::from_fn(rank, rank, |_, _| (0..ring.order()).map(|_| rng.gen_range(0..*p as u32)).collect::<Vec<u32>>());
        let module = FiniteThetaModule { ring: ring.clone(), rank, parts: vec![action], modulus: None };
        let a = poly_a(&f);
        let ag = GroupRing::new(a.clone(), g.clone());
        let fit = fitting_monic_of(&module);
        let as_ag: Vec<Vec<u32>> = (0..ring.order()).map(|h| a.normalize(fit.iter().map(|c| c[h]).collect())).collect();
        let lhs = ag.det_g(&as_ag);
        let rhs: Vec<u32> = fitting_monic_of(&forget_group(&module)).iter().map(|c| c[0]).collect();
        for m in poly_mismatches(&f, &rhs, &lhs) {
            fitting.push(json!({"trial": t, "group": spec, "p": p, "rank": rank, "mismatch": m}));
        }

        let r = rng.gen_range(1..=2);
        // the restricted determinant loses more precision than the G-side one,
        // so both run at a working precision above the compared one
        let w = 3 * n;
        let s = SeriesRing::new(ring.clone(), w);
        if let Some((b1, b2, idx)) = random_index_pair(&mut rng, &s, r) {
            index_trials += 1;
            let lhs = det_g_series(&s, &idx);
            let st = SeriesRing::new(trivial(&f), w);
            let flat = |b: &Matrix<ThetaSeries<Vec<u32>>>| restrict_series_matrix(&s, b).map(|x| SeriesRing::new(f.clone(), w).map(x, &st, |c| vec![*c]));
            match lattice_index(&st, &flat(&b1), &flat(&b2)) {
                Ok(rhs) => {
                    let rhs = st.map(&rhs, &SeriesRing::new(f.clone(), w), |c| c[0]);
                    let prec = lhs.prec.min(rhs.prec).min(n);
                    min_compared = min_compared.min(prec);
                    let fs = SeriesRing::new(f.clone(), w);
                    for m in series_mismatches(&fs, &fs.truncate(&rhs, prec), &fs.truncate(&lhs, prec), prec) {
                        index.push(json!({"trial": t, "group": spec, "p": p, "rank": r, "precision": prec, "mismatch": m}));
                    }
                }
                Err(e) => index.push(json!({"trial": t, "group": spec, "p": p, "rank": r, "error": e.to_string()})),
            }
        }
    }
    let params = |extra: Value| json!({"trials": TRIALS, "seed": cfg.seed, "groups": groups, "detail": extra});
    Ok(vec![
        Check { name: "det-g-of-fitting-monic".into(), params: params(json!({"max_rank": 4})), mismatches: fitting, error: None },
        Check {
            name: "det-g-of-lattice-index".into(),
            params: params(json!({"max_rank": 2, "precision": n, "index_trials": index_trials, "min_compared_precision": min_compared})),
            mismatches: index,
            error: None,
        },
    ])
}

fn lattice_index_laws(cfg: &RunConfig) -> Result<Vec<Check>> {
    let groups = trial_groups(cfg)?;
    let n = cfg.precision_or(12);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut transitivity, mut idempotence, mut certificate) = (vec![], vec![], vec![]);
    for t in 0..TRIALS {
        let (spec, p) = &groups[t % groups.len()];
        let f = Fq::prime(*p)?;
        let g = Arc::new(AbelianGroup::parse(spec, *p)?);
        let ring = GroupRing::new(f.clone(), g.clone());
        let s = SeriesRing::new(ring.clone(), n);
        let r = rng.gen_range(1..=2);
        let trial = json!({"trial": t, "group": spec, "p": p, "rank": r});
        let bases: Vec<_> = (0..3).map(|_| random_basis(&mut rng, &s, r)).collect();
        let idx = |i: usize, j: usize| lattice_index(&s, &bases[i], &bases[j]);
        if let (Ok(i01), Ok(i12), Ok(i02)) = (idx(0, 1), idx(1, 2), idx(0, 2)) {
            let prod = s.mul(&i01, &i12);
            let prec = prod.prec.min(i02.prec);
            for m in series_mismatches(&s, &s.truncate(&i02, prec), &s.truncate(&prod, prec), prec) {
                transitivity.push(json!({"trial": trial, "precision": prec, "mismatch": m}));
            }
        }

        let lead = rng.gen_range(0..=3);
        let x = random_series(&mut rng, &s, lead);
        let Ok(dec) = monic_representative(&s, &x) else { continue };
        match monic_representative(&s, &dec.plus) {
            Ok(again) => {
                let prec = again.plus.prec.min(dec.plus.prec);
                for m in series_mismatches(&s, &s.truncate(&dec.plus, prec), &s.truncate(&again.plus, prec), prec) {
                    idempotence.push(json!({"trial": trial, "mismatch": m}));
                }
            }
            Err(e) => idempotence.push(json!({"trial": trial, "error": e.to_string()})),
        }
        // f = f⁺·u with u a unit of A[G]
        let u = s.from_poly(&dec.unit);
        let back = s.mul(&dec.plus, &u);
        let prec = back.prec.min(x.prec);
        for m in series_mismatches(&s, &s.truncate(&x, prec), &s.truncate(&back, prec), prec) {
            certificate.push(json!({"trial": trial, "mismatch": m}));
        }
        let a = poly_a(&f);
        let ag = GroupRing::new(a.clone(), g.clone());
        let u_ag: Vec<Vec<u32>> = (0..ring.order()).map(|h| a.normalize(dec.unit.iter().map(|c| c[h]).collect())).collect();
        match ag.unit_inverse(&u_ag) {
            Some(v) if ag.mul(&u_ag, &v) == ag.one() => {}
            _ => certificate.push(json!({"trial": trial, "at": "unit", "actual": format!("{u_ag:?}"), "expected": "a unit of A[G]"})),
        }
    }
    let params = json!({"trials": TRIALS, "seed": cfg.seed, "precision": n, "groups": groups});
    Ok(vec![
        Check { name: "index-transitivity".into(), params: params.clone(), mismatches: transitivity, error: None },
        Check { name: "monic-representative-idempotent".into(), params: params.clone(), mismatches: idempotence, error: None },
        Check { name: "monic-representative-unit-certificate".into(), params, mismatches: certificate, error: None },
    ])
}

fn nuclear_props(cfg: &RunConfig) -> Vec<Check> {
    let order = cfg.precision_or(4).max(1) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = vec![];

    checks.push(attempt("ratio-operator-carlitz", json!({"q": [2, 3], "order": order}), || {
        let mut mm = vec![];
        for q in [2u64, 3] {
            let f = Fq::prime(q)?;
            let a = poly_a(&f);
            let op = ratio_operator(&carlitz(&f), &Lattice::standard(&f, 1)?, order)?;
            for r in 1..order {
                // −τθ^{r−1} = −θ^{q(r−1)}τ
                let expected = vec![vec![], a.neg(&a.pow(&vec![0, 1], q * (r as u64 - 1)))];
                let actual: Vec<Vec<u32>> = op.terms.get(r - 1).map_or(vec![], |t| t.coeffs.iter().map(|c| c.get(0, 0).clone()).collect());
                if actual != expected {
                    mm.push(json!({"q": q, "r": r, "expected": format!("{expected:?}"), "actual": format!("{actual:?}")}));
                }
            }
        }
        Ok(mm)
    }));

    let localization = [("carlitz", 3u64, vec![0u32, 1], 3usize), ("carlitz", 2, vec![1, 1], order.min(4)), ("twisted", 3, vec![1, 1], 2)];
    for (kind, p, prime, n) in localization {
        checks.push(attempt("localization", json!({"lattice": kind, "p": p, "prime": prime_label(p, &prime), "order": n}), || {
            let (e, m) = preset_pair(kind, p)?;
            Ok(check_localization(&e, &m, &prime, n)?
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.holds)
                .map(|(i, c)| json!({"depth": i + 1, "expected": format!("{:?}", c.rhs), "actual": format!("{:?}", c.lhs)}))
                .collect())
        }));
    }

    for (kind, p) in [("carlitz", 2u64), ("carlitz", 3), ("twisted", 2), ("twisted", 3)] {
        for trial in 0..3 {
            let n = rng.gen_range(2..=order.max(2));
            let power = rng.gen_range(1..=3);
            let seed: u64 = rng.gen();
            let params = json!({"lattice": kind, "p": p, "trial": trial, "order": n, "power": power, "trial_seed": seed});
            checks.push(attempt("calculus", params, || {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let (_, m) = preset_pair(kind, p)?;
                let primes: Vec<Vec<u32>> = irreducibles_by_degree(&poly_a(m.alg.fq()), 2).into_iter().flatten().filter(|v| v.len() > 1).collect();
                let prime = primes[rng.gen_range(0..primes.len())].clone();
                let tower = QuotientTower::new(&m, &prime, 3)?;
                let mut mm = vec![];
                if !tower.check_admissible()? {
                    mm.push(json!({"law": "admissible", "prime": prime_label(p, &prime)}));
                }
                let (phi, psi) = (random_operator(&mut rng, &m, n), random_operator(&mut rng, &m, n));
                let c = check_multiplicativity(&tower, &phi, &psi)?;
                if !c.holds {
                    mm.push(json!({"law": "multiplicativity", "prime": prime_label(p, &prime), "expected": format!("{:?}", c.rhs), "actual": format!("{:?}", c.lhs)}));
                }
                let a_op = random_twisted(&mut rng, &m, 1, true);
                let phi_t = random_twisted(&mut rng, &m, 2, false);
                let c = check_commutation(&tower, &a_op, &phi_t, power, n)?;
                if !c.holds {
                    mm.push(json!({"law": "commutation", "prime": prime_label(p, &prime), "expected": format!("{:?}", c.rhs), "actual": format!("{:?}", c.lhs)}));
                }
                let d = tower.det_mod_zn(&phi)?;
                for i in d.nucleus.max(1)..=tower.depth {
                    let layer = tower.det_at_layer(&phi, i)?;
                    if layer != d.value {
                        mm.push(json!({"law": "nucleus-independence", "layer": i, "expected": format!("{:?}", d.value), "actual": format!("{layer:?}")}));
                    }
                }
                Ok(mm)
            }));
        }
    }

    for (kind, p, prime) in [("carlitz", 3u64, vec![0u32, 1]), ("twisted", 3, vec![1, 1]), ("twisted", 2, vec![1, 1])] {
        checks.push(attempt("reverse-charpoly-bridge", json!({"lattice": kind, "p": p, "prime": prime_label(p, &prime), "depth": 3}), || {
            let (e, m) = preset_pair(kind, p)?;
            let mats = m.action_matrices(&e)?;
            let a = poly_a(m.alg.fq());
            let mut mm = vec![];
            for i in 1..=3 {
                let (lie, full) = reduce_action(&m, &mats, &a.pow(&prime, i))?;
                for (what, n) in [("lie", &lie), ("full", &full)] {
                    let (rev, cp) = reverse_charpoly_bridge(&n.ring, &n.theta_action());
                    if rev != cp {
                        mm.push(json!({"layer": i, "part": what, "expected": format!("{cp:?}"), "actual": format!("{rev:?}")}));
                    }
                    let (rev, cp) = reverse_charpoly_bridge(&n.ring.base, &n.restrict());
                    if rev != cp {
                        mm.push(json!({"layer": i, "part": what, "over": "F_p", "expected": format!("{cp:?}"), "actual": format!("{rev:?}")}));
                    }
                }
            }
            Ok(mm)
        }));
    }

    for (kind, p, n) in [("carlitz", 3u64, 4usize), ("twisted", 3, 3)] {
        checks.push(attempt("trace-formula-instance", json!({"lattice": kind, "p": p, "order": n, "max_deg": [n, n + 1]}), || {
            let (e, m) = preset_pair(kind, p)?;
            let f = m.alg.fq().clone();
            let prec = n as i64 - 1;
            let zr = deformed_ring(&GroupRing::new(f.clone(), m.group.clone()));
            let s = SeriesRing::new(zr.clone(), prec);
            let partials = euler_determinant(&e.z_deform(), &m, n + 1, n)?;
            let at: Vec<_> = partials.iter().map(|v| at_inverse_theta(&zr, v, n)).collect();
            let mut mm = series_mismatches(&s, &at[n - 1], &at[n], prec);
            let l = deformed_euler_product(&e, &m, &EulerConfig::new(n + 1, prec))?;
            let product = s.truncate(&s.mul(&l.series, &at[n]), prec);
            mm.extend(series_mismatches(&s, &s.truncate(&s.one(), prec), &product, prec));
            Ok(mm)
        }));
    }
    checks
}

fn prime_label(p: u64, v: &Vec<u32>) -> String {
    Fq::prime(p).map(|f| poly_a(&f).format(v)).unwrap_or_else(|_| format!("{v:?}"))
}

fn preset_pair(kind: &str, p: u64) -> anderson_core::Result<(AndersonModule, Lattice)> {
    if kind == "twisted" {
        let data = build_artin_schreier(p)?;
        Ok((carlitz(data.alg.fq()), data.twisted))
    } else {
        let f = Fq::prime(p)?;
        Ok((carlitz(&f), Lattice::standard(&f, 1)?))
    }
}

fn z_deform(cfg: &RunConfig) -> Result<Vec<Check>> {
    let p = cfg.q.unwrap_or(3);
    let d = cfg.max_deg_or(3);
    let n = cfg.precision_or(4);
    let data = build_artin_schreier(p).map_err(|e| UsageError(e.to_string()))?;
    let f = data.alg.fq().clone();
    let e = carlitz(&f);
    let ring = GroupRing::new(f.clone(), data.twisted.group.clone());
    let zr = deformed_ring(&ring);
    let primes = unramified_primes(&data, d);
    let values: Vec<u32> = match cfg.z {
        Some(ZMode::Eval(v)) if v < p => vec![v as u32],
        Some(ZMode::Eval(v)) => return Err(UsageError(format!("z = {v} is not an element of F_{p}")).into()),
        _ => (0..p as u32).collect(),
    };
    let mut checks = vec![attempt("deformed-factors", json!({"p": p, "max_deg": d}), || deformed_factor_mismatches(&data, &e, &ring, &primes))];

    let cfg_l = EulerConfig::new(d.max(n as usize), n);
    let lparams = json!({"p": p, "precision": n, "max_deg": cfg_l.max_degree});
    checks.push(attempt("specialization", lparams.clone(), || {
        let deformed = deformed_euler_product(&e, &data.twisted, &cfg_l)?;
        let s = SeriesRing::new(ring.clone(), n);
        let mut mm = vec![];
        for &v in &values {
            let plain = euler_product(&e.specialize(v), &data.twisted, &cfg_l)?;
            for m in series_mismatches(&s, &plain.series, &specialize_series(&zr, &deformed.series, v), n) {
                mm.push(json!({"z": v, "mismatch": m}));
            }
        }
        let sz = SeriesRing::new(zr.clone(), n);
        for k in 0..=n {
            let c = sz.coeff(&deformed.series, -k);
            if c.iter().any(|poly| poly.len() > k as usize + 1) {
                mm.push(json!({"at": format!("theta^-{k}"), "expected": format!("z-degree ≤ {k}"), "actual": format!("{c:?}")}));
            }
        }
        Ok(mm)
    }));
    checks.push(attempt("carlitz-z-zeta", json!({"q": p, "precision": n, "max_deg": n}), || {
        let w = trivial_weight(&f, true);
        let sum = monic_sum(&w, n as usize, n);
        let l = deformed_euler_product(&e, &Lattice::standard(&f, 1)?, &EulerConfig::new(n as usize, n))?;
        Ok(series_mismatches(&SeriesRing::new(w.ring.clone(), n), &sum, &l.series, n))
    }));
    Ok(checks)
}
