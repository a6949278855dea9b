use std::fmt;

use super::{gfp, Elem, Field, FieldElement};

/// Fields at most this large keep an explicit membership bitset; larger ones
/// test membership through the Frobenius fixed-point predicate.
const BITSET_LIMIT: u32 = 10_000;

/// The unique subfield of degree `e` inside a field of degree `d` (e | d).
#[derive(Clone)]
pub struct SubfieldHandle {
    field: Field,
    degree: u32,
    order: u32,
    generator: Elem,
    members: Option<Vec<u64>>,
    // L-coordinates: K has L-basis {1, x, …, x^{d/e−1}} and L has GF(ℓ)-basis
    // {1, θ, …, θ^{e−1}}. `to_flat` maps a K element's digit vector to the
    // GF(ℓ)-coordinates with respect to the product basis {θ^a x^b}.
    to_flat: Vec<Vec<u32>>,
    product_basis: Vec<Elem>,
}

impl PartialEq for SubfieldHandle {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.degree == other.degree
    }
}

impl Eq for SubfieldHandle {}

impl fmt::Debug for SubfieldHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) ⊆ {:?}", self.field.characteristic(), self.degree, self.field)
    }
}

impl SubfieldHandle {
    pub(super) fn build(field: &Field, degree: u32) -> SubfieldHandle {
        let p = field.characteristic();
        let q = field.order();
        let order = p.pow(degree);
        // θ generates L^× as a multiplicative group.
        let generator = if degree == field.degree() {
            field.primitive_element()
        } else {
            field.pow(field.primitive_element(), ((q - 1) / (order - 1)) as u64)
        };
        let members = (q <= BITSET_LIMIT).then(|| {
            let mut bits = vec![0u64; (q as usize).div_ceil(64)];
            bits[0] |= 1;
            let mut cur = Elem::ONE;
            for _ in 0..order - 1 {
                bits[cur.index() / 64] |= 1 << (cur.index() % 64);
                cur = field.mul(cur, generator);
            }
            bits
        });
        let rel = field.degree() / degree;
        let mut product_basis = Vec::with_capacity(field.degree() as usize);
        let x = if field.degree() == 1 {
            Elem::ONE
        } else {
            field.generator()
        };
        let mut xb = Elem::ONE;
        for _ in 0..rel {
            let mut ta = Elem::ONE;
            for _ in 0..degree {
                product_basis.push(field.mul(ta, xb));
                ta = field.mul(ta, generator);
            }
            xb = field.mul(xb, x);
        }
        // Columns are digit vectors of the product basis; invert that matrix.
        let d = field.degree() as usize;
        let cols: Vec<Vec<u32>> = product_basis.iter().map(|&b| field.coeffs(b)).collect();
        let m: Vec<Vec<u32>> = (0..d).map(|i| (0..d).map(|j| cols[j][i]).collect()).collect();
        let to_flat = gfp::inverse(&m, p).expect("θ^a x^b is a GF(ℓ)-basis of K");
        SubfieldHandle {
            field: field.clone(),
            degree,
            order,
            generator,
            members,
            to_flat,
            product_basis,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// [K : L].
    pub fn relative_degree(&self) -> u32 {
        self.field.degree() / self.degree
    }

    pub fn is_full(&self) -> bool {
        self.degree == self.field.degree()
    }

    /// A multiplicative generator θ of L^×.
    pub fn generator(&self) -> Elem {
        self.generator
    }

    /// The GF(ℓ)-basis {1, θ, …, θ^{e−1}} of L.
    pub fn basis(&self) -> &[Elem] {
        &self.product_basis[..self.degree as usize]
    }

    #[inline]
    pub fn contains(&self, a: Elem) -> bool {
        match &self.members {
            Some(bits) => bits[a.index() / 64] >> (a.index() % 64) & 1 == 1,
            None => self.field.pow(a, self.order as u64) == a,
        }
    }

    pub fn elements(&self) -> Vec<Elem> {
        let mut out = vec![Elem::ZERO];
        let mut cur = Elem::ONE;
        for _ in 0..self.order - 1 {
            out.push(cur);
            cur = self.field.mul(cur, self.generator);
        }
        out.sort();
        out
    }

    pub fn nonzero_elements(&self) -> Vec<Elem> {
        let mut v = self.elements();
        v.remove(0);
        v
    }

    /// Coordinates of `a` over L with respect to {1, x, …, x^{d/e−1}}.
    pub fn l_coordinates(&self, a: Elem) -> Vec<Elem> {
        let k = &self.field;
        let digits = k.coeffs(a);
        let flat: Vec<u32> = self
            .to_flat
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&digits)
                    .fold(0u32, |acc, (r, c)| (acc + r * c) % k.characteristic())
            })
            .collect();
        let e = self.degree as usize;
        flat.chunks(e)
            .map(|chunk| {
                chunk
                    .iter()
                    .zip(self.basis())
                    .fold(Elem::ZERO, |acc, (&c, &t)| k.add(acc, k.mul(k.from_int(c as i64), t)))
            })
            .collect()
    }

    /// Inverse of [`SubfieldHandle::l_coordinates`].
    pub fn from_l_coordinates(&self, coords: &[Elem]) -> Elem {
        let k = &self.field;
        let x = if k.degree() == 1 { Elem::ONE } else { k.generator() };
        let mut xb = Elem::ONE;
        let mut acc = Elem::ZERO;
        for &c in coords {
            acc = k.add(acc, k.mul(c, xb));
            xb = k.mul(xb, x);
        }
        acc
    }
}

/// Membership test for a checked element.
pub fn in_subfield(a: &FieldElement, l: &SubfieldHandle) -> bool {
    l.contains(a.value())
}

pub fn subfields(k: &Field) -> Vec<SubfieldHandle> {
    k.subfields().to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    #[test]
    fn divisor_lattice() {
        let k = make_field(5, 4).unwrap();
        let degs: Vec<u32> = k.subfields().iter().map(|s| s.degree()).collect();
        assert_eq!(degs, vec![1, 2, 4]);
        let k = make_field(5, 1).unwrap();
        assert_eq!(k.subfields().len(), 1);
    }

    #[test]
    fn prime_subfield_of_gf25_is_frobenius_fixed() {
        let k = make_field(5, 2).unwrap();
        let l = k.subfield(1).unwrap();
        let fixed: Vec<Elem> = k.elements().filter(|&a| k.frobenius(a) == a).collect();
        assert_eq!(fixed, l.elements());
        assert_eq!(fixed.len(), 5);
    }

    #[test]
    fn generator_is_not_in_prime_subfield() {
        let k = make_field(5, 2).unwrap();
        let x = FieldElement::new(&k, &[0, 1]).unwrap();
        assert!(!in_subfield(&x, k.subfield(1).unwrap()));
        assert!(in_subfield(&x, k.subfield(2).unwrap()));
        assert!(in_subfield(&k.element(Elem::ZERO), k.subfield(1).unwrap()));
    }

    #[test]
    fn subfields_are_closed_and_sized() {
        for (p, d) in [(5, 2), (7, 2), (5, 4), (3, 6), (2, 6), (7, 4)] {
            let k = make_field(p, d).unwrap();
            for l in k.subfields() {
                let els = l.elements();
                assert_eq!(els.len() as u32, p.pow(l.degree()));
                for &a in els.iter().take(60) {
                    assert!(l.contains(k.neg(a)));
                    if let Some(i) = k.inv(a) {
                        assert!(l.contains(i));
                    }
                    for &b in els.iter().take(60) {
                        assert!(l.contains(k.add(a, b)));
                        assert!(l.contains(k.mul(a, b)));
                    }
                }
                assert_eq!(k.elements().filter(|&a| l.contains(a)).count(), els.len());
            }
        }
    }

    #[test]
    fn l_coordinates_roundtrip() {
        for (p, d) in [(5, 2), (5, 4), (7, 2), (2, 6)] {
            let k = make_field(p, d).unwrap();
            for l in k.subfields() {
                for a in k.elements().step_by(7) {
                    let c = l.l_coordinates(a);
                    assert_eq!(c.len() as u32, l.relative_degree());
                    assert!(c.iter().all(|&t| l.contains(t)));
                    assert_eq!(l.from_l_coordinates(&c), a);
                }
            }
        }
    }
}
