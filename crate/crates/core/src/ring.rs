//! The commutative-ring abstraction every other module is generic over.
//!
//! Rings are *parent objects*: a value implementing [`Ring`] carries whatever
//! context is needed (the modulus of a finite field, the group of a group
//! ring, the working precision of a series ring) and performs arithmetic on
//! plain element values of type [`Ring::Elem`]. Elements are always kept in a
//! canonical form so that `==` on elements is mathematical equality.

use std::fmt::Debug;

pub trait Ring: Clone + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// Image of an integer under the canonical map `Z -> R`.
    fn from_int(&self, n: i64) -> Self::Elem;

    /// Multiplicative inverse, when `a` is a unit and the ring can find it.
    fn unit_inverse(&self, a: &Self::Elem) -> Option<Self::Elem>;

    /// `r`-fold q-power Frobenius twist.
    ///
    /// Acts as `x -> x^q` on the theta side only: it fixes `F_q`, the
    /// deformation variable `z` and group elements pointwise.
    fn frobenius(&self, a: &Self::Elem, r: u32) -> Self::Elem;

    /// The order `q` of the constant field `F_q`.
    fn field_order(&self) -> u64;

    fn characteristic(&self) -> u64;

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn sum<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }

    /// Human-readable rendering used by the text output and diagnostics.
    fn format(&self, a: &Self::Elem) -> String {
        format!("{a:?}")
    }
}

/// Rings in which every nonzero element is invertible.
pub trait Field: Ring {
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        if self.is_zero(a) {
            None
        } else {
            self.unit_inverse(a)
        }
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }
}
