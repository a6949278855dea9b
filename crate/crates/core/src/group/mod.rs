//! Finitely generated subgroups of GSp(V): closure, transvection census,
//! subspace orbits, and transvection saturation.

mod closure;
mod saturation;

pub use closure::{closure_of, ell_part, ClosureResult};
pub(crate) use saturation::plane_group;
pub use saturation::{
    certify_structure, is_stable, Centre, Provenance, SaturationData, SaturationError, StructureCertificate,
};

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::field::{AdditiveSubgroup, Elem, Field};
use crate::linalg::{Matrix, Subspace, Vector};
use crate::symplectic::{SymplecticError, SymplecticSpace, Transvection};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("closure was capped; the element set is incomplete")]
    CappedClosure,
    #[error("orbit exceeds the cap of {0} subspaces")]
    CapExceeded(usize),
    #[error("generator {index} is not a symplectic similitude")]
    NotSimilitude { index: usize },
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
}

/// G = ⟨generators⟩ ≤ GSp(V).
#[derive(Debug, Clone)]
pub struct GroupSpec {
    space: SymplecticSpace,
    generators: Vec<Matrix>,
    multipliers: Vec<Elem>,
}

impl GroupSpec {
    pub fn new(space: SymplecticSpace, generators: Vec<Matrix>) -> Result<Self, GroupError> {
        let multipliers = generators
            .iter()
            .enumerate()
            .map(|(index, g)| {
                space
                    .multiplier(g)
                    .map_err(|_| GroupError::NotSimilitude { index })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GroupSpec {
            space,
            generators,
            multipliers,
        })
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn field(&self) -> &Field {
        self.space.field()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    pub fn multipliers(&self) -> &[Elem] {
        &self.multipliers
    }

    /// A G A⁻¹ (same space).
    pub fn conjugated(&self, a: &Matrix) -> Result<GroupSpec, GroupError> {
        let k = self.field();
        let ainv = a.inverse(k).map_err(SymplecticError::from)?;
        let gens = self
            .generators
            .iter()
            .map(|g| a.mul(k, g).mul(k, &ainv))
            .collect();
        GroupSpec::new(self.space.clone(), gens)
    }

    /// Nontrivial transvections among the generators, canonical.
    pub fn transvection_generators(&self) -> Vec<Transvection> {
        self.generators
            .iter()
            .filter_map(|g| self.space.detect_transvection(g).ok())
            .filter(|t| !t.is_trivial())
            .collect()
    }

    /// The subgroup of K^× generated by the generators' multipliers.
    pub fn multiplier_subgroup(&self) -> Vec<Elem> {
        let k = self.field();
        let mut seen = vec![Elem::ONE];
        let mut i = 0;
        while i < seen.len() {
            for &m in &self.multipliers {
                let x = k.mul(seen[i], m);
                if !seen.contains(&x) {
                    seen.push(x);
                }
            }
            i += 1;
        }
        seen.sort();
        seen
    }

    pub fn closure(&self, cap: usize) -> ClosureResult {
        closure_of(self.field(), self.dim(), &self.generators, cap, false)
    }
}

/// Quick rank-one test for A − I before the full transvection check.
fn rank_one_minus_identity(n: usize, a: &[Elem], k: &Field) -> bool {
    let entry = |i: usize, j: usize| {
        let x = a[i * n + j];
        if i == j {
            k.sub(x, Elem::ONE)
        } else {
            x
        }
    };
    let Some((r0, c0)) = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| !entry(i, j).is_zero())
    else {
        return false;
    };
    let piv = k.inv(entry(r0, c0)).unwrap();
    // every row is a multiple of row r0
    (0..n).all(|i| {
        let f = k.mul(entry(i, c0), piv);
        (0..n).all(|j| entry(i, j) == k.mul(f, entry(r0, j)))
    })
}

/// All nontrivial symplectic transvections of an uncapped closure, sorted.
pub fn transvection_census(
    space: &SymplecticSpace,
    c: &ClosureResult,
) -> Result<Vec<Transvection>, GroupError> {
    if c.capped() {
        return Err(GroupError::CappedClosure);
    }
    let k = space.field();
    let n = space.dim();
    let mut out: Vec<Transvection> = c
        .iter()
        .filter(|a| rank_one_minus_identity(n, a, k))
        .filter_map(|a| {
            space
                .detect_transvection(&Matrix::from_flat(n, n, a.to_vec()))
                .ok()
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Census grouped by centre: canonical direction ↦ parameter group.
pub fn census_by_centre(k: &Field, census: &[Transvection]) -> BTreeMap<Vector, AdditiveSubgroup> {
    let mut map: BTreeMap<Vector, AdditiveSubgroup> = BTreeMap::new();
    for t in census {
        if let Transvection::Nontrivial {
            direction,
            parameter,
        } = t
        {
            map.entry(direction.clone()).or_default().insert(k, *parameter);
        }
    }
    map
}

/// P_u(G) from a census, for any nonzero u on the line (P_{cu} = c⁻² P_u).
pub fn param_group(k: &Field, census: &[Transvection], u: &[Elem]) -> AdditiveSubgroup {
    let Some((m, c)) = crate::linalg::monic(k, u) else {
        return AdditiveSubgroup::zero();
    };
    let p = AdditiveSubgroup::span(
        k,
        census
            .iter()
            .filter(|t| t.direction() == Some(&m))
            .map(|t| t.parameter()),
    );
    p.scaled(k, k.inv(k.mul(c, c)).unwrap())
}

/// Orbit of S under ⟨generators⟩, canonical representatives in BFS order.
pub fn subspace_orbit(g: &GroupSpec, s: &Subspace, cap: usize) -> Result<Vec<Subspace>, GroupError> {
    let k = g.field();
    let mut seen: HashMap<Subspace, ()> = HashMap::new();
    let mut order = vec![s.clone()];
    seen.insert(s.clone(), ());
    let mut queue = VecDeque::from([s.clone()]);
    while let Some(cur) = queue.pop_front() {
        for a in g.generators() {
            let img = cur.image(k, a);
            if seen.contains_key(&img) {
                continue;
            }
            if order.len() >= cap {
                return Err(GroupError::CapExceeded(cap));
            }
            seen.insert(img.clone(), ());
            order.push(img.clone());
            queue.push_back(img);
        }
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn sp2(k: &Field) -> GroupSpec {
        let s = SymplecticSpace::standard(k, 2).unwrap();
        let gens = vec![
            s.transvection_matrix(&[Elem::ONE, Elem::ZERO], Elem::ONE),
            s.transvection_matrix(&[Elem::ZERO, Elem::ONE], Elem::ONE),
        ];
        GroupSpec::new(s, gens).unwrap()
    }

    #[test]
    fn census_of_sp2_gf5() {
        let k = make_field(5, 1).unwrap();
        let g = sp2(&k);
        let c = g.closure(1_000_000);
        let census = transvection_census(g.space(), &c).unwrap();
        assert_eq!(census.len(), 24);
        assert_eq!(census_by_centre(&k, &census).len(), 6);
    }

    #[test]
    fn census_of_cyclic_group() {
        let k = make_field(5, 1).unwrap();
        let s = SymplecticSpace::standard(&k, 2).unwrap();
        let v = vec![Elem::ONE, k.from_int(2)];
        let g = GroupSpec::new(s.clone(), vec![s.transvection_matrix(&v, Elem::ONE)]).unwrap();
        let census = transvection_census(&s, &g.closure(100)).unwrap();
        assert_eq!(census.len(), 4);
        assert!(census.iter().all(|t| t.direction() == Some(&v)));
        let id = GroupSpec::new(s.clone(), vec![Matrix::identity(2)]).unwrap();
        assert!(transvection_census(&s, &id.closure(10)).unwrap().is_empty());
    }

    #[test]
    fn parameter_groups() {
        let k = make_field(5, 2).unwrap();
        let s = SymplecticSpace::standard(&k, 2).unwrap();
        let v = vec![Elem::ONE, Elem::ZERO];
        let g = GroupSpec::new(s.clone(), vec![s.transvection_matrix(&v, Elem::ONE)]).unwrap();
        let census = transvection_census(&s, &g.closure(100)).unwrap();
        let p = param_group(&k, &census, &v);
        assert!(p.equals_subfield(k.subfield(1).unwrap()));
        let two_v: Vector = v.iter().map(|&x| k.mul(k.from_int(2), x)).collect();
        assert_eq!(param_group(&k, &census, &two_v), p.scaled(&k, k.from_int(4)));
        assert!(param_group(&k, &census, &[Elem::ZERO, Elem::ONE]).is_zero());
    }

    #[test]
    fn orbits() {
        let k = make_field(5, 1).unwrap();
        let g = sp2(&k);
        let e1 = Subspace::line(&k, &[Elem::ONE, Elem::ZERO]);
        assert_eq!(subspace_orbit(&g, &e1, 100).unwrap().len(), 6);
        assert!(matches!(subspace_orbit(&g, &e1, 3), Err(GroupError::CapExceeded(3))));
        let s4 = SymplecticSpace::standard(&k, 4).unwrap();
        let mut swap = Matrix::zero(4, 4);
        for (i, j) in [(0, 1), (1, 0), (2, 3), (3, 2)] {
            swap.set(i, j, Elem::ONE);
        }
        let g = GroupSpec::new(s4, vec![swap]).unwrap();
        let h = Subspace::span(&k, 4, &[vec![Elem::ONE, Elem::ZERO, Elem::ZERO, Elem::ZERO], vec![Elem::ZERO, Elem::ZERO, Elem::ONE, Elem::ZERO]]).unwrap();
        assert_eq!(subspace_orbit(&g, &h, 10).unwrap().len(), 2);
        let full = Subspace::full(4);
        assert_eq!(subspace_orbit(&g, &full, 10).unwrap(), vec![full]);
    }

    #[test]
    fn multiplier_subgroup_of_scalars() {
        let k = make_field(7, 1).unwrap();
        let s = SymplecticSpace::standard(&k, 2).unwrap();
        let g = GroupSpec::new(s, vec![Matrix::scalar(2, k.from_int(3))]).unwrap();
        // 3² = 2 has order 3 mod 7
        assert_eq!(g.multiplier_subgroup().len(), 3);
    }
}
