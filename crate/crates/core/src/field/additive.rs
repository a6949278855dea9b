use super::{gfp, Elem, Field, SubfieldHandle};

/// A GF(ℓ)-subspace of K (an additive subgroup), kept as the reduced
/// row-echelon basis of its digit vectors so equal groups compare equal.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdditiveSubgroup {
    basis: Vec<Elem>,
}

impl AdditiveSubgroup {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn span(k: &Field, gens: impl IntoIterator<Item = Elem>) -> Self {
        let mut s = Self::zero();
        for g in gens {
            s.insert(k, g);
        }
        s
    }

    /// The subfield L as an additive group.
    pub fn of_subfield(l: &SubfieldHandle) -> Self {
        Self::span(l.field(), l.basis().iter().copied())
    }

    pub fn basis(&self) -> &[Elem] {
        &self.basis
    }

    /// GF(ℓ)-dimension.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn size(&self, k: &Field) -> u64 {
        (k.characteristic() as u64).pow(self.rank() as u32)
    }

    fn rows(&self, k: &Field) -> (Vec<Vec<u32>>, Vec<usize>) {
        let rows: Vec<Vec<u32>> = self.basis.iter().map(|&b| k.coeffs(b)).collect();
        let pivots = rows
            .iter()
            .map(|r| r.iter().position(|&c| c != 0).expect("nonzero basis row"))
            .collect();
        (rows, pivots)
    }

    pub fn contains(&self, k: &Field, a: Elem) -> bool {
        if a.is_zero() {
            return true;
        }
        let (rows, pivots) = self.rows(k);
        let mut v = k.coeffs(a);
        gfp::reduce(&mut v, &rows, &pivots, k.characteristic());
        v.iter().all(|&c| c == 0)
    }

    /// Adds `a` to the span; returns whether the group grew.
    pub fn insert(&mut self, k: &Field, a: Elem) -> bool {
        if self.contains(k, a) {
            return false;
        }
        let (mut rows, _) = self.rows(k);
        rows.push(k.coeffs(a));
        gfp::rref(&mut rows, k.characteristic());
        self.basis = rows.iter().map(|r| k.from_coeffs(r).expect("digits in range")).collect();
        true
    }

    /// Adds every element of `other`; returns whether the group grew.
    pub fn absorb(&mut self, k: &Field, other: &AdditiveSubgroup) -> bool {
        let mut grew = false;
        for &b in &other.basis {
            grew |= self.insert(k, b);
        }
        grew
    }

    pub fn is_subgroup_of(&self, k: &Field, other: &AdditiveSubgroup) -> bool {
        self.basis.iter().all(|&b| other.contains(k, b))
    }

    /// c · P.
    pub fn scaled(&self, k: &Field, c: Elem) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::span(k, self.basis.iter().map(|&b| k.mul(c, b)))
    }

    /// All ℓ^rank elements, ascending.
    pub fn elements(&self, k: &Field) -> Vec<Elem> {
        let mut out = vec![Elem::ZERO];
        for &b in &self.basis {
            let mut next = Vec::with_capacity(out.len() * k.characteristic() as usize);
            let mut m = Elem::ZERO;
            for _ in 0..k.characteristic() {
                next.extend(out.iter().map(|&x| k.add(x, m)));
                m = k.add(m, b);
            }
            out = next;
        }
        out.sort();
        out
    }

    /// If P = κ·L for some κ ∈ K^×, returns the canonical such κ: P's first
    /// basis element (any nonzero member works; this choice is deterministic).
    pub fn subfield_multiple(&self, l: &SubfieldHandle) -> Option<Elem> {
        let k = l.field();
        if self.rank() != l.degree() as usize {
            return None;
        }
        let kappa = self.basis[0];
        let inv = k.inv(kappa)?;
        self.basis
            .iter()
            .all(|&b| l.contains(k.mul(b, inv)))
            .then_some(kappa)
    }

    /// P = L exactly.
    pub fn equals_subfield(&self, l: &SubfieldHandle) -> bool {
        self.rank() == l.degree() as usize && self.basis.iter().all(|&b| l.contains(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    #[test]
    fn span_and_membership() {
        let k = make_field(5, 2).unwrap();
        let mut p = AdditiveSubgroup::zero();
        assert!(p.insert(&k, Elem::ONE));
        assert!(!p.insert(&k, k.from_int(3)));
        assert_eq!(p.rank(), 1);
        assert_eq!(p.elements(&k), k.subfield(1).unwrap().elements());
        assert!(p.equals_subfield(k.subfield(1).unwrap()));
        let x = k.generator();
        assert!(!p.contains(&k, x));
        p.insert(&k, x);
        assert_eq!(p.size(&k), 25);
    }

    #[test]
    fn canonical_form_ignores_generator_order() {
        let k = make_field(7, 2).unwrap();
        let x = k.generator();
        let a = AdditiveSubgroup::span(&k, [k.add(x, Elem::ONE), k.from_int(2)]);
        let b = AdditiveSubgroup::span(&k, [Elem::ONE, x]);
        assert_eq!(a, b);
    }

    #[test]
    fn scaled_subfield_is_recognised() {
        let k = make_field(5, 2).unwrap();
        let l = k.subfield(1).unwrap();
        let x = k.generator();
        let p = AdditiveSubgroup::of_subfield(l).scaled(&k, x);
        let kappa = p.subfield_multiple(l).unwrap();
        assert!(l.contains(k.div(kappa, x).unwrap()));
        assert!(!p.equals_subfield(l));
        // P_{2v} = 4·P_v over GF(5)
        let p1 = AdditiveSubgroup::of_subfield(l);
        assert_eq!(p1.scaled(&k, k.from_int(4)), p1);
    }
}
