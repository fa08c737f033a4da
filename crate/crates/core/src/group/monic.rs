//! Monic representatives in `F_p((θ⁻¹))[G]`.
//!
//! Per character block the coefficient ring `F_p(χ)[H]` is local, and every
//! invertible `f` factors uniquely as `f = f⁺ · u` with `u` a unit of the
//! polynomial ring and `f⁺ ∈ θ^n (1 + θ⁻¹ F_p(χ)[H][[θ⁻¹]])`. We extract it by
//! repeatedly normalizing the `θ^n` coefficient to the block identity and
//! dividing by `e + T`, where `T` is the part above `θ^n`. `T` has nilpotent
//! coefficients, so `(e + T)⁻¹` is a finite geometric sum and the process
//! terminates once the nilpotent filtration is exhausted.
//!
//! Precision is not assumed: every division by a polynomial of positive
//! degree consumes that many digits, and the series arithmetic reports what
//! survives.

use crate::error::{Error, Result};
use crate::fq::Fq;
use crate::group::characters::Characters;
use crate::group::GroupRing;
use crate::ring::Ring;
use crate::series::{SeriesRing, ThetaSeries, EXACT};

const MAX_ROUNDS: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct MonicDecomposition {
    pub plus: ThetaSeries<Vec<u32>>,
    /// The polynomial unit `u` with `f = f⁺ · u`, little-endian in `θ`.
    pub unit: Vec<Vec<u32>>,
    /// Per block, the exponent `n` of the leading unit coefficient.
    pub degrees: Vec<i64>,
}

fn lowest_exponent<E>(f: &ThetaSeries<E>) -> i64 {
    if f.prec == EXACT {
        f.lead - f.coeffs.len() as i64 + 1
    } else {
        -f.prec
    }
}

fn positive_part(s: &SeriesRing<GroupRing<Fq>>, g: &ThetaSeries<Vec<u32>>, n: i64) -> ThetaSeries<Vec<u32>> {
    if g.coeffs.is_empty() || g.lead <= n {
        return s.zero();
    }
    let coeffs: Vec<_> = (n + 1..=g.lead).rev().map(|e| s.coeff(g, e)).collect();
    s.from_coeffs(g.lead - n, coeffs, EXACT)
}

fn to_poly(s: &SeriesRing<GroupRing<Fq>>, u: &ThetaSeries<Vec<u32>>) -> Vec<Vec<u32>> {
    s.polynomial_part(u)
}

pub fn monic_representative(s: &SeriesRing<GroupRing<Fq>>, f: &ThetaSeries<Vec<u32>>) -> Result<MonicDecomposition> {
    let chars = Characters::new(&s.base)?;
    let order: Vec<usize> = (0..chars.blocks.len()).collect();
    monic_with_order(s, &chars, f, &order)
}

/// Same as [`monic_representative`] with the blocks processed in the given order.
pub fn monic_with_order(
    s: &SeriesRing<GroupRing<Fq>>,
    chars: &Characters,
    f: &ThetaSeries<Vec<u32>>,
    order: &[usize],
) -> Result<MonicDecomposition> {
    let r = &s.base;
    let mut plus = s.zero();
    let mut unit = s.zero();
    let mut degrees = vec![0i64; chars.blocks.len()];
    for &k in order {
        let e = &chars.blocks[k].idempotent;
        let mut g = s.scale(f, e);
        let low = lowest_exponent(&g);
        let n = (low..=g.lead.max(low))
            .rev()
            .find(|&x| chars.is_block_unit(k, &s.coeff(&g, x)))
            .ok_or_else(|| Error::NotInvertible { block: chars.describe(k) })?;
        degrees[k] = n;
        let mut u = s.scalar(e.clone());
        let mut done = false;
        for _ in 0..MAX_ROUNDS {
            let c = s.coeff(&g, n);
            let top = positive_part(s, &g, n);
            if c == *e && s.is_zero(&top) {
                done = true;
                break;
            }
            if g.prec != EXACT && g.prec < -n {
                return Err(Error::Precision {
                    precision: g.prec,
                    reason: format!("monic extraction in block {} exhausted the available digits", chars.describe(k)),
                });
            }
            if c != *e {
                let ci = chars
                    .block_inverse(k, &c)
                    .ok_or_else(|| Error::NotInvertible { block: chars.describe(k) })?;
                g = s.scale(&g, &ci);
                u = s.scale(&u, &c);
                continue;
            }
            // divide by e + T, T = part above θ^n shifted down to start at θ^1
            let t = top;
            let mut w_inv = s.scalar(e.clone());
            let mut term = s.scalar(e.clone());
            let minus_t = s.neg(&t);
            for _ in 0..=r.order() {
                term = s.mul(&term, &minus_t);
                if s.is_zero(&term) {
                    break;
                }
                w_inv = s.add(&w_inv, &term);
            }
            if !s.is_zero(&term) {
                return Err(Error::InvalidArgument("part above the leading unit is not nilpotent".into()));
            }
            let w = s.add(&s.scalar(e.clone()), &t);
            g = s.mul(&g, &w_inv);
            u = s.mul(&u, &w);
        }
        if !done {
            return Err(Error::Convergence { achieved: MAX_ROUNDS as i64, target: 0 });
        }
        plus = s.add(&plus, &g);
        unit = s.add(&unit, &u);
    }
    Ok(MonicDecomposition { plus, unit: to_poly(s, &unit), degrees })
}

/// Membership in `ℓ((θ⁻¹))[G]⁺`: in every block the top coefficient is the
/// block identity.
pub fn is_block_monic(s: &SeriesRing<GroupRing<Fq>>, chars: &Characters, f: &ThetaSeries<Vec<u32>>) -> bool {
    chars.blocks.iter().all(|b| {
        let g = s.scale(f, &b.idempotent);
        !g.coeffs.is_empty() && g.coeffs[0] == b.idempotent
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::AbelianGroup;
    use std::sync::Arc;

    fn sring(p: u64, spec: &str) -> SeriesRing<GroupRing<Fq>> {
        let f = Fq::prime(p).unwrap();
        SeriesRing::new(GroupRing::new(f, Arc::new(AbelianGroup::parse(spec, p).unwrap())), 20)
    }

    #[test]
    fn unit_times_theta() {
        let s = sring(2, "Z/2");
        let r = &s.base;
        // θ·σ
        let f = s.monomial(r.basis(1), 1);
        let d = monic_representative(&s, &f).unwrap();
        assert_eq!(d.plus, s.monomial(r.one(), 1));
        assert_eq!(d.unit, vec![r.basis(1)]);
    }

    #[test]
    fn nilpotent_perturbation_is_already_monic() {
        let s = sring(2, "Z/2");
        let r = &s.base;
        // θ + (σ - 1)
        let f = s.from_poly(&[vec![1, 1], r.one()]);
        let d = monic_representative(&s, &f).unwrap();
        assert_eq!(d.plus, f);
        let again = monic_representative(&s, &d.plus).unwrap();
        assert_eq!(again.plus, d.plus);
    }

    #[test]
    fn trace_perturbation_over_f3() {
        let s = sring(3, "Z/3");
        let r = &s.base;
        let f = s.from_poly(&[r.trace_element(), r.one()]);
        let d = monic_representative(&s, &f).unwrap();
        assert_eq!(d.plus, f);
    }

    #[test]
    fn nilpotent_top_is_divided_out() {
        let s = sring(2, "Z/2");
        let r = &s.base;
        let chars = Characters::new(r).unwrap();
        // (σ+1)θ^2 + θ + σ  : top coefficient is nilpotent
        let f = s.from_poly(&[r.basis(1), r.one(), vec![1, 1]]);
        let d = monic_representative(&s, &f).unwrap();
        assert_eq!(d.degrees, vec![1]);
        assert!(is_block_monic(&s, &chars, &d.plus));
        let prod = s.mul(&d.plus, &s.from_poly(&d.unit));
        assert!(s.agree_to(&prod, &f, prod.prec.min(10)));
    }

    #[test]
    fn non_invertible_names_block() {
        let s = sring(3, "Z/2");
        let r = &s.base;
        let chars = Characters::new(r).unwrap();
        let e = chars.blocks[1].idempotent.clone();
        let f = s.from_poly(&[e.clone(), e]);
        match monic_representative(&s, &f) {
            Err(Error::NotInvertible { block }) => assert!(block.contains("chi")),
            other => panic!("expected NotInvertible, got {other:?}"),
        }
    }
}
