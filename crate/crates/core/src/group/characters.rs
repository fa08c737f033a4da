//! Characters of the prime-to-`p` part `Δ` and the idempotent decomposition
//! `F_p[G] = ⊕ e_χ F_p[G]`, each block isomorphic to `F_p(χ)[H]`.
//!
//! All characters take values in one splitting field `F_{p^f}`, where `f` is
//! the order of `p` modulo the exponent of `Δ`. A block is a Frobenius orbit
//! `{ψ, ψ^p, ψ^{p^2}, …}` and its residue field `F_p(χ)` has degree equal to
//! the orbit length.

use crate::error::{Error, Result};
use crate::fq::Fq;
use crate::group::GroupRing;
use crate::ring::{Field, Ring};

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CharacterBlock {
    /// Exponent vectors `k` of the characters `δ ↦ Π ζ_{m_i}^{k_i δ_i}` in the orbit.
    pub orbit: Vec<Vec<u64>>,
    /// `[F_p(χ) : F_p]`.
    pub degree: usize,
    pub idempotent: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct Characters {
    pub ring: GroupRing<Fq>,
    /// Splitting field `F_{p^f}`.
    pub field: Fq,
    roots: Vec<u32>,
    pub blocks: Vec<CharacterBlock>,
}

impl Characters {
    pub fn new(ring: &GroupRing<Fq>) -> Result<Self> {
        if !ring.base.is_prime_field() {
            return Err(Error::InvalidArgument(
                "character decomposition is implemented for prime-field coefficients".into(),
            ));
        }
        let g = &ring.group;
        let p = ring.base.p();
        let ms = g.delta_factors();
        let exponent = ms.iter().fold(1u64, |a, &m| a / gcd(a, m) * m);
        let mut f = 1u32;
        let mut pw = p % exponent.max(1);
        while exponent > 1 && pw != 1 {
            pw = pw * p % exponent;
            f += 1;
        }
        let field = Fq::new(p, f)?;
        let prim = field.primitive_element();
        let roots: Vec<u32> = ms.iter().map(|&m| field.pow(&prim, (field.order() - 1) / m)).collect();

        // enumerate characters and group them into p-power orbits
        let n_chars: u64 = ms.iter().product();
        let to_vec = |mut i: u64| -> Vec<u64> {
            let mut v = vec![0; ms.len()];
            for k in (0..ms.len()).rev() {
                v[k] = i % ms[k];
                i /= ms[k];
            }
            v
        };
        let mut seen = vec![false; n_chars as usize];
        let index_of = |v: &[u64]| v.iter().zip(&ms).fold(0u64, |a, (x, m)| a * m + x) as usize;
        let mut orbits = vec![];
        for i in 0..n_chars {
            if seen[i as usize] {
                continue;
            }
            let mut orbit = vec![];
            let mut cur = to_vec(i);
            while !seen[index_of(&cur)] {
                seen[index_of(&cur)] = true;
                orbit.push(cur.clone());
                cur = cur.iter().zip(&ms).map(|(k, m)| k * p % m).collect();
            }
            orbits.push(orbit);
        }

        let mut chars = Characters { ring: ring.clone(), field, roots, blocks: vec![] };
        let delta_order = g.delta_order() as u64;
        let inv_delta = ring.base.inv(&ring.base.from_i64(delta_order as i64)).expect("p does not divide |Δ|");
        let delta_elems: Vec<Vec<u64>> = (0..delta_order).map(&to_vec).collect();
        for orbit in orbits {
            let mut e = ring.zero();
            for d in &delta_elems {
                let s = orbit
                    .iter()
                    .fold(chars.field.zero(), |acc, k| chars.field.add(&acc, &chars.character_value(k, d)));
                let s = chars.field.to_prime(s).expect("orbit sums of character values lie in F_p") as u32;
                let dinv = g.inverse(g.delta_element(d));
                e[dinv] = ring.base.mul(&s, &inv_delta);
            }
            chars.blocks.push(CharacterBlock { degree: orbit.len(), orbit, idempotent: e });
        }
        Ok(chars)
    }

    /// `ψ_k(δ)` in the splitting field.
    fn character_value(&self, k: &[u64], delta: &[u64]) -> u32 {
        let f = &self.field;
        k.iter()
            .zip(delta)
            .zip(&self.roots)
            .fold(f.one(), |acc, ((ki, di), z)| f.mul(&acc, &f.pow(z, ki * di)))
    }

    /// Image of `x` under `F_p[G] → F_p(χ)`: augmentation on `H`, the block's
    /// representative character on `Δ`. Nonzero exactly when `e_χ x` is a unit
    /// of the block.
    pub fn residue(&self, block: usize, x: &[u32]) -> u32 {
        let f = &self.field;
        let k = &self.blocks[block].orbit[0];
        let g = &self.ring.group;
        x.iter().enumerate().fold(f.zero(), |acc, (h, c)| {
            if *c == 0 {
                acc
            } else {
                f.add(&acc, &f.mul(c, &self.character_value(k, &g.delta_part(h))))
            }
        })
    }

    pub fn is_block_unit(&self, block: usize, x: &[u32]) -> bool {
        self.residue(block, x) != 0
    }

    /// Inverse of `e_χ x` inside `e_χ F_p[G]`.
    pub fn block_inverse(&self, block: usize, x: &[u32]) -> Option<Vec<u32>> {
        let r = &self.ring;
        let e = &self.blocks[block].idempotent;
        let lifted = r.add(&r.mul(e, &x.to_vec()), &r.sub(&r.one(), e));
        r.unit_inverse(&lifted).map(|y| r.mul(e, &y))
    }

    pub fn describe(&self, block: usize) -> String {
        let b = &self.blocks[block];
        format!(
            "chi{:?} (orbit size {}, residue field F_{}^{})",
            b.orbit[0],
            b.degree,
            self.ring.base.p(),
            b.degree
        )
    }
}

pub fn idempotent_decomposition(ring: &GroupRing<Fq>) -> Result<Vec<CharacterBlock>> {
    Ok(Characters::new(ring)?.blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::AbelianGroup;
    use std::sync::Arc;

    fn ring(p: u64, spec: &str) -> GroupRing<Fq> {
        GroupRing::new(Fq::prime(p).unwrap(), Arc::new(AbelianGroup::parse(spec, p).unwrap()))
    }

    fn check_system(r: &GroupRing<Fq>, blocks: &[CharacterBlock]) {
        let sum = blocks.iter().fold(r.zero(), |a, b| r.add(&a, &b.idempotent));
        assert_eq!(sum, r.one());
        for (i, a) in blocks.iter().enumerate() {
            assert_eq!(r.mul(&a.idempotent, &a.idempotent), a.idempotent);
            for b in &blocks[i + 1..] {
                assert!(r.is_zero(&r.mul(&a.idempotent, &b.idempotent)));
            }
        }
    }

    #[test]
    fn cyclic_p_group_has_one_block() {
        let r = ring(3, "Z/3");
        let b = idempotent_decomposition(&r).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].idempotent, r.one());
    }

    #[test]
    fn z2_over_f3() {
        let r = ring(3, "Z/2");
        let b = idempotent_decomposition(&r).unwrap();
        check_system(&r, &b);
        let mut es: Vec<_> = b.iter().map(|x| x.idempotent.clone()).collect();
        es.sort();
        // (1 - σ)/2 = 2 + σ and (1 + σ)/2 = 2 + 2σ
        assert_eq!(es, vec![vec![2, 1], vec![2, 2]]);
    }

    #[test]
    fn z3_over_f2_has_f4_block() {
        let r = ring(2, "Z/3");
        let b = idempotent_decomposition(&r).unwrap();
        check_system(&r, &b);
        let mut degrees: Vec<_> = b.iter().map(|x| x.degree).collect();
        degrees.sort();
        assert_eq!(degrees, vec![1, 2]);
    }

    #[test]
    fn mixed_groups_are_complete() {
        for (p, spec) in [(3, "Z/6"), (2, "Z/2 x Z/6"), (5, "Z/4"), (2, "Z/7"), (3, "Z/2 x Z/2")] {
            let r = ring(p, spec);
            let b = idempotent_decomposition(&r).unwrap();
            check_system(&r, &b);
            let total: usize = b.iter().map(|x| x.degree).sum();
            assert_eq!(total, r.group.delta_order());
        }
    }

    #[test]
    fn residue_is_a_ring_map() {
        let r = ring(2, "Z/2 x Z/3");
        let c = Characters::new(&r).unwrap();
        let x = vec![1, 0, 1, 1, 0, 0];
        let y = vec![0, 1, 1, 0, 1, 1];
        for k in 0..c.blocks.len() {
            assert_eq!(c.residue(k, &r.mul(&x, &y)), c.field.mul(&c.residue(k, &x), &c.residue(k, &y)));
        }
    }
}
