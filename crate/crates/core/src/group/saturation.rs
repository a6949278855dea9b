//! Discovering the transvections of G from its generators.
//!
//! Three rules are iterated to a fixed point:
//!
//! * orbit: conjugating T_v[λ] by a generator g with multiplier α gives
//!   T_{gv}[λ/α];
//! * addition: each parameter group P_v is kept as a GF(ℓ)-span, so it is
//!   closed under T_v[μ] T_v[λ] = T_v[μ + λ];
//! * plane: for centres u₁, u₂ with ⟨u₁, u₂⟩ ≠ 0 the stored transvections
//!   with centre in H = ⟨u₁, u₂⟩ restrict to a subgroup of Sp(H); every
//!   transvection of that (fully enumerated) subgroup is the restriction of a
//!   transvection of G with the same centre and parameter.
//!
//! The first three rules never combine distinct orthogonal centres, yet
//! T_u[λ] T_v[μ] T_{u+v}[ν] can be a transvection when ⟨u, v⟩ = 0. A fourth,
//! isotropic rule covers this: transvections centred in a totally isotropic
//! plane W commute, T_x[λ] ↦ λ·xxᵀ is an isomorphism onto an additive group
//! of symmetric forms on W, and the rank-one members of the GF(ℓ)-span are
//! exactly the transvections of the generated group.
//!
//! The plane rule is expensive, so before each plane pass the centres are
//! split into components of the non-orthogonality graph and each component is
//! tested for being exactly the transvection set of an L-structure
//! ([`certify_structure`]). Such a component is provably closed under the
//! plane rule and is skipped.

use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::{Hash, Hasher};

use rustc_hash::{FxHashMap, FxHasher};

use super::{closure_of, transvection_census, ClosureResult, GroupSpec};
use crate::field::{gfp, AdditiveSubgroup, Elem, Field};
use crate::linalg::{dot, monic, vec_scale, BasisCoordinates, Matrix, Subspace, Vector};
use crate::symplectic::{SymplecticSpace, Transvection};

/// How a centre was first discovered.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    Seed,
    Orbit { source: Vector, generator: usize },
    Plane { u1: Vector, u2: Vector },
    Isotropic { u1: Vector, u2: Vector },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Centre {
    pub direction: Vector,
    pub params: AdditiveSubgroup,
    pub origin: Provenance,
}

impl Centre {
    /// rk_v: the GF(ℓ)-dimension of P_v.
    pub fn rank(&self) -> usize {
        self.params.rank()
    }
}

/// The discovered centre set L(G) with parameter groups P_v(G), keyed by the
/// monic direction of each line.
#[derive(Clone)]
pub struct SaturationData {
    space: SymplecticSpace,
    centres: Vec<Centre>,
    index: FxHashMap<Vector, usize>,
    firings: usize,
    planes_enumerated: usize,
    certified: bool,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum SaturationError {
    #[error("no nontrivial seed transvection")]
    NoSeed,
    #[error("saturation budget of {budget} rule firings exceeded")]
    BudgetExceeded {
        budget: usize,
        partial: Box<SaturationData>,
    },
}

impl std::fmt::Debug for SaturationData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SaturationData")
            .field("centres", &self.centres.len())
            .field("transvections", &self.transvection_count())
            .field("firings", &self.firings)
            .field("planes_enumerated", &self.planes_enumerated)
            .finish()
    }
}

impl SaturationData {
    pub fn new(space: SymplecticSpace) -> Self {
        SaturationData {
            space,
            centres: Vec::new(),
            index: FxHashMap::default(),
            firings: 0,
            planes_enumerated: 0,
            certified: false,
        }
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn field(&self) -> &Field {
        self.space.field()
    }

    pub fn len(&self) -> usize {
        self.centres.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centres.is_empty()
    }

    /// Productive rule firings so far.
    pub fn firings(&self) -> usize {
        self.firings
    }

    pub fn planes_enumerated(&self) -> usize {
        self.planes_enumerated
    }

    /// Whether the final state was closed by the structure certificate rather
    /// than an unproductive plane pass.
    pub fn certified(&self) -> bool {
        self.certified
    }

    /// Centres in canonical (lexicographic direction) order.
    pub fn centres(&self) -> Vec<&Centre> {
        let mut v: Vec<&Centre> = self.centres.iter().collect();
        v.sort_by(|a, b| a.direction.cmp(&b.direction));
        v
    }

    pub fn centre(&self, direction: &[Elem]) -> Option<&Centre> {
        let (m, _) = monic(self.field(), direction)?;
        self.index.get(&m).map(|&i| &self.centres[i])
    }

    pub fn is_centre(&self, v: &[Elem]) -> bool {
        self.centre(v).is_some()
    }

    /// P_u for any nonzero u (P_{cu} = c⁻² P_u); zero if ⟨u⟩ is not a centre.
    pub fn params(&self, u: &[Elem]) -> AdditiveSubgroup {
        let k = self.field();
        let Some((m, c)) = monic(k, u) else {
            return AdditiveSubgroup::zero();
        };
        match self.index.get(&m) {
            Some(&i) => self.centres[i].params.scaled(k, k.inv(k.mul(c, c)).unwrap()),
            None => AdditiveSubgroup::zero(),
        }
    }

    /// Number of nontrivial transvections represented.
    pub fn transvection_count(&self) -> u64 {
        let k = self.field();
        self.centres.iter().map(|c| c.params.size(k) - 1).sum()
    }

    /// All nontrivial transvections, canonical and sorted.
    pub fn transvections(&self) -> Vec<Transvection> {
        let k = self.field();
        let mut out = Vec::new();
        for c in self.centres() {
            for p in c.params.elements(k) {
                if !p.is_zero() {
                    out.push(Transvection::Nontrivial {
                        direction: c.direction.clone(),
                        parameter: p,
                    });
                }
            }
        }
        out.sort();
        out
    }

    /// ⟨L(G)⟩_K.
    pub fn span(&self) -> Subspace {
        let k = self.field();
        let n = self.space.dim();
        let mut s = Subspace::zero(n);
        for c in &self.centres {
            if !s.contains(k, &c.direction) {
                s = s.sum(k, &Subspace::line(k, &c.direction)).unwrap();
                if s.is_full() {
                    break;
                }
            }
        }
        s
    }

    /// Merge T_v[p] for p in `params` into the data; returns (index, grew).
    fn add(&mut self, v: &[Elem], params: &AdditiveSubgroup, origin: impl FnOnce() -> Provenance) -> (usize, bool) {
        let k = self.space.field().clone();
        let (m, c) = monic(&k, v).expect("centre directions are nonzero");
        let scaled = params.scaled(&k, k.mul(c, c));
        match self.index.get(&m) {
            Some(&i) => {
                let grew = self.centres[i].params.absorb(&k, &scaled);
                (i, grew)
            }
            None => {
                let i = self.centres.len();
                self.index.insert(m.clone(), i);
                self.centres.push(Centre {
                    direction: m,
                    params: scaled,
                    origin: origin(),
                });
                (i, true)
            }
        }
    }

    /// Insert a single transvection; used for seeds and by tests.
    pub fn insert(&mut self, t: &Transvection, origin: Provenance) -> bool {
        let Transvection::Nontrivial {
            direction,
            parameter,
        } = t
        else {
            return false;
        };
        let p = AdditiveSubgroup::span(self.field(), [*parameter]);
        self.add(direction, &p, || origin).1
    }

    /// The data for A G A⁻¹ where A has multiplier α: centres move to A·v and
    /// parameters to λ/α.
    pub fn conjugated(&self, a: &Matrix, alpha: Elem) -> SaturationData {
        let k = self.field().clone();
        let ainv = k.inv(alpha).expect("multiplier is nonzero");
        let canon = |v: &Vector| monic(&k, &a.mul_vec(&k, v)).unwrap().0;
        let mut out = SaturationData::new(self.space.clone());
        for c in &self.centres {
            let origin = match &c.origin {
                Provenance::Seed => Provenance::Seed,
                Provenance::Orbit { source, generator } => Provenance::Orbit {
                    source: canon(source),
                    generator: *generator,
                },
                Provenance::Plane { u1, u2 } => Provenance::Plane {
                    u1: canon(u1),
                    u2: canon(u2),
                },
                Provenance::Isotropic { u1, u2 } => Provenance::Isotropic {
                    u1: canon(u1),
                    u2: canon(u2),
                },
            };
            let av = a.mul_vec(&k, &c.direction);
            out.add(&av, &c.params.scaled(&k, ainv), || origin);
        }
        out.firings = self.firings;
        out.planes_enumerated = self.planes_enumerated;
        out.certified = self.certified;
        out
    }

    /// Stored centres on the K-plane ⟨u₁, u₂⟩, in canonical order.
    pub fn centres_in_plane(&self, u1: &[Elem], u2: &[Elem]) -> Vec<&Centre> {
        self.plane_indices(u1, u2).into_iter().map(|i| &self.centres[i]).collect()
    }

    fn plane_indices(&self, u1: &[Elem], u2: &[Elem]) -> Vec<usize> {
        let k = self.field();
        let mut out = Vec::new();
        if let Some(&i) = self.index.get(&monic(k, u2).unwrap().0) {
            out.push(i);
        }
        for t in k.elements() {
            let v: Vector = u1.iter().zip(u2).map(|(&a, &b)| k.add(a, k.mul(t, b))).collect();
            if let Some(&i) = self.index.get(&monic(k, &v).unwrap().0) {
                out.push(i);
            }
        }
        out.sort_by(|&a, &b| self.centres[a].direction.cmp(&self.centres[b].direction));
        out
    }
}

/// Proof that a set of centres is exactly the transvection set of an
/// L-structure W_L on W: every centre has a representative in W_L with
/// parameter group κL, and every L-line of W_L is a centre.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureCertificate {
    pub subfield_degree: u32,
    pub kappa: Elem,
    /// K-basis of W lying in W_L; pairings lie in κ⁻¹L.
    pub basis: Vec<Vector>,
}

/// Checks whether `members` (direction, P) with span `w` form the complete
/// transvection set of an L-structure. The first member is the anchor.
pub fn certify_structure(
    space: &SymplecticSpace,
    members: &[(&Vector, &AdditiveSubgroup)],
    w: &Subspace,
) -> Option<StructureCertificate> {
    let k = space.field();
    let (anchor, pa) = *members.first()?;
    if !space.is_nondegenerate(w) {
        return None;
    }
    let rank = pa.rank() as u32;
    if rank == 0 || k.degree() % rank != 0 {
        return None;
    }
    let l = k.subfield(rank).ok()?;
    let kappa = pa.subfield_multiple(l)?;
    let m = w.dim();
    let lines = (l.order() as u128).pow(m as u32) / (l.order() as u128 - 1);
    if members.len() as u128 != lines {
        return None;
    }

    // Scale centres nonorthogonal to the anchor into W_L and pick a basis.
    let mut basis = vec![anchor.clone()];
    let mut span = Subspace::line(k, anchor);
    let ja = space.gram().mul_vec(k, anchor);
    for (v, _) in &members[1..] {
        if basis.len() == m {
            break;
        }
        // ⟨a, v⟩ = −⟨v, a⟩ = −v·(Ja)
        let av = k.neg(dot(k, v, &ja));
        if av.is_zero() || span.contains(k, v) {
            continue;
        }
        let s = k.inv(k.mul(kappa, av)).unwrap();
        let sv = vec_scale(k, s, v);
        span = span.sum(k, &Subspace::line(k, &sv)).unwrap();
        basis.push(sv);
    }
    if basis.len() != m {
        return None;
    }
    for (i, b) in basis.iter().enumerate() {
        for c in &basis[i + 1..] {
            if !l.contains(k.mul(kappa, space.form(b, c))) {
                return None;
            }
        }
    }
    let coords = BasisCoordinates::new(k, &basis)?;
    let kinv = k.inv(kappa).unwrap();
    for (v, p) in members {
        let x = coords.coords(k, v)?;
        let lead = *x.iter().find(|c| !c.is_zero())?;
        let c = k.inv(lead).unwrap();
        if !x.iter().all(|&xi| l.contains(k.mul(c, xi))) {
            return None;
        }
        // P_{cv} = c⁻² P_v must be κL
        let scale = k.inv(k.mul(c, c)).unwrap();
        if p.rank() != l.degree() as usize
            || !p.basis().iter().all(|&b| l.contains(k.mul(kinv, k.mul(scale, b))))
        {
            return None;
        }
    }
    Some(StructureCertificate {
        subfield_degree: l.degree(),
        kappa,
        basis,
    })
}

/// Split the centres into components of the non-orthogonality graph.
fn components(data: &SaturationData) -> Vec<(Vec<usize>, Subspace)> {
    let k = data.field();
    let space = &data.space;
    let mut rest: Vec<usize> = (0..data.centres.len()).collect();
    rest.sort_by(|&a, &b| data.centres[a].direction.cmp(&data.centres[b].direction));
    let mut out = Vec::new();
    while !rest.is_empty() {
        let first = rest.remove(0);
        let mut comp = vec![first];
        let mut span = Subspace::line(k, &data.centres[first].direction);
        loop {
            let jw: Vec<Vector> = span.basis().iter().map(|b| space.gram().mul_vec(k, b)).collect();
            let (join, stay): (Vec<usize>, Vec<usize>) = rest.iter().partition(|&&i| {
                let v = &data.centres[i].direction;
                jw.iter().any(|x| !dot(k, v, x).is_zero())
            });
            rest = stay;
            if join.is_empty() {
                break;
            }
            for &i in &join {
                let v = &data.centres[i].direction;
                if !span.contains(k, v) {
                    span = span.sum(k, &Subspace::line(k, v)).unwrap();
                }
            }
            comp.extend(join);
        }
        comp.sort_by(|&a, &b| data.centres[a].direction.cmp(&data.centres[b].direction));
        out.push((comp, span));
    }
    out
}

fn certify_members(data: &SaturationData, idx: &[usize], w: &Subspace) -> bool {
    let members: Vec<(&Vector, &AdditiveSubgroup)> = idx
        .iter()
        .map(|&i| (&data.centres[i].direction, &data.centres[i].params))
        .collect();
    certify_structure(&data.space, &members, w).is_some()
}

fn fingerprint(data: &SaturationData, idx: &[usize]) -> u64 {
    let mut h = FxHasher::default();
    for &i in idx {
        data.centres[i].direction.hash(&mut h);
        data.centres[i].params.hash(&mut h);
    }
    h.finish()
}

/// The subgroup of Sp(H) generated by the restrictions of the given stored
/// transvections with centre in H = ⟨u₁, u₂⟩, in coordinates (u₁, u₂) with
/// Gram matrix [[0, ω], [−ω, 0]], ω = ⟨u₁, u₂⟩.
pub(crate) fn plane_group(
    space: &SymplecticSpace,
    u1: &[Elem],
    u2: &[Elem],
    members: &[(&Vector, &AdditiveSubgroup)],
) -> (SymplecticSpace, ClosureResult) {
    let k = space.field();
    let omega = space.form(u1, u2);
    let gram = Matrix::from_rows(&[vec![Elem::ZERO, omega], vec![k.neg(omega), Elem::ZERO]]).unwrap();
    let plane = SymplecticSpace::with_gram(k, gram).expect("nonorthogonal pair");
    let oinv = k.inv(omega).unwrap();
    let mut gens: Vec<Matrix> = Vec::new();
    let q = k.order() as usize;
    let cap = q * (q * q - 1) + 1;
    let mut group = closure_of(k, 2, &gens, cap, false);
    for (v, p) in members {
        let coords = [k.mul(space.form(v, u2), oinv), k.mul(space.form(u1, v), oinv)];
        for &b in p.basis() {
            let t = plane.transvection_matrix(&coords, b);
            // a generator already in the group cannot enlarge it
            if !group.contains(&t) {
                gens.push(t);
                group = closure_of(k, 2, &gens, cap, false);
            }
        }
    }
    (plane, group)
}

/// Transvections of [`plane_group`], mapped back to V.
fn plane_group_transvections(
    space: &SymplecticSpace,
    u1: &[Elem],
    u2: &[Elem],
    members: &[(&Vector, &AdditiveSubgroup)],
) -> Vec<(Vector, Elem)> {
    let k = space.field();
    let (plane, group) = plane_group(space, u1, u2, members);
    let census = transvection_census(&plane, &group).expect("plane groups embed in SL2(K)");
    census
        .into_iter()
        .filter_map(|t| match t {
            Transvection::Nontrivial {
                direction,
                parameter,
            } => {
                let v: Vector = u1
                    .iter()
                    .zip(u2)
                    .map(|(&a, &b)| k.add(k.mul(direction[0], a), k.mul(direction[1], b)))
                    .collect();
                Some((v, parameter))
            }
            Transvection::Trivial => None,
        })
        .collect()
}

struct Saturator<'a> {
    g: &'a GroupSpec,
    data: SaturationData,
    budget: usize,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
    fingerprints: HashMap<Subspace, u64>,
}

impl Saturator<'_> {
    fn enqueue(&mut self, i: usize) {
        if self.queued.len() <= i {
            self.queued.resize(i + 1, false);
        }
        if !self.queued[i] {
            self.queued[i] = true;
            self.queue.push_back(i);
        }
    }

    fn fire(&mut self) -> Result<(), SaturationError> {
        self.data.firings += 1;
        if self.data.firings > self.budget {
            return Err(SaturationError::BudgetExceeded {
                budget: self.budget,
                partial: Box::new(self.data.clone()),
            });
        }
        Ok(())
    }

    /// Orbit and addition rules to a fixed point.
    fn orbit_fixpoint(&mut self) -> Result<(), SaturationError> {
        let k = self.data.field().clone();
        while let Some(i) = self.queue.pop_front() {
            self.queued[i] = false;
            let src = self.data.centres[i].direction.clone();
            let p = self.data.centres[i].params.clone();
            for (gi, (a, &alpha)) in self.g.generators().iter().zip(self.g.multipliers()).enumerate() {
                let av = a.mul_vec(&k, &src);
                let scaled = p.scaled(&k, k.inv(alpha).unwrap());
                let (j, grew) = self.data.add(&av, &scaled, || Provenance::Orbit {
                    source: src.clone(),
                    generator: gi,
                });
                if grew {
                    self.fire()?;
                    self.enqueue(j);
                }
            }
        }
        Ok(())
    }

    /// One pass of the plane rule over the uncertified components; returns
    /// whether anything was added.
    fn plane_pass(&mut self, comps: &[(Vec<usize>, Subspace)]) -> Result<bool, SaturationError> {
        let k = self.data.field().clone();
        let mut done: HashSet<Subspace> = HashSet::new();
        let mut changed = false;
        for (comp, _) in comps {
            for (a, &i) in comp.iter().enumerate() {
                let ui = self.data.centres[i].direction.clone();
                let jui = self.data.space.gram().mul_vec(&k, &ui);
                for &j in &comp[a + 1..] {
                    let uj = self.data.centres[j].direction.clone();
                    if dot(&k, &uj, &jui).is_zero() {
                        continue;
                    }
                    let key = Subspace::span(&k, ui.len(), &[ui.clone(), uj.clone()]).unwrap();
                    if !done.insert(key.clone()) {
                        continue;
                    }
                    let inside = self.data.plane_indices(&ui, &uj);
                    let fp = fingerprint(&self.data, &inside);
                    if self.fingerprints.get(&key) == Some(&fp) {
                        continue;
                    }
                    if certify_members(&self.data, &inside, &key) {
                        self.fingerprints.insert(key, fp);
                        continue;
                    }
                    let found = {
                        let members: Vec<(&Vector, &AdditiveSubgroup)> = inside
                            .iter()
                            .map(|&c| (&self.data.centres[c].direction, &self.data.centres[c].params))
                            .collect();
                        plane_group_transvections(&self.data.space, &ui, &uj, &members)
                    };
                    self.data.planes_enumerated += 1;
                    for (v, lam) in found {
                        let p = AdditiveSubgroup::span(&k, [lam]);
                        let (c, grew) = self.data.add(&v, &p, || Provenance::Plane {
                            u1: ui.clone(),
                            u2: uj.clone(),
                        });
                        if grew {
                            changed = true;
                            self.fire()?;
                            self.enqueue(c);
                        }
                    }
                    let inside = self.data.plane_indices(&ui, &uj);
                    let fp = fingerprint(&self.data, &inside);
                    self.fingerprints.insert(key, fp);
                }
            }
        }
        Ok(changed)
    }

    /// One pass of the isotropic rule over totally isotropic planes spanned by
    /// pairs of `loose` centres; returns whether anything was added.
    fn isotropic_pass(&mut self, loose: &[usize]) -> Result<bool, SaturationError> {
        let k = self.data.field().clone();
        let mut done: HashSet<Subspace> = HashSet::new();
        let mut changed = false;
        for (a, &i) in loose.iter().enumerate() {
            let ui = self.data.centres[i].direction.clone();
            let jui = self.data.space.gram().mul_vec(&k, &ui);
            for &j in &loose[a + 1..] {
                let uj = self.data.centres[j].direction.clone();
                if !dot(&k, &uj, &jui).is_zero() {
                    continue;
                }
                let key = Subspace::span(&k, ui.len(), &[ui.clone(), uj.clone()]).unwrap();
                if !done.insert(key.clone()) {
                    continue;
                }
                let inside = self.data.plane_indices(&ui, &uj);
                // two orthogonal lines alone only give rank-two products
                if inside.len() < 3 {
                    continue;
                }
                let fp = fingerprint(&self.data, &inside);
                if self.fingerprints.get(&key) == Some(&fp) {
                    continue;
                }
                let found = isotropic_plane_transvections(&self.data, &ui, &uj);
                self.data.planes_enumerated += 1;
                for (v, p) in found {
                    let (c, grew) = self.data.add(&v, &p, || Provenance::Isotropic {
                        u1: ui.clone(),
                        u2: uj.clone(),
                    });
                    if grew {
                        changed = true;
                        self.fire()?;
                        self.enqueue(c);
                    }
                }
                let inside = self.data.plane_indices(&ui, &uj);
                let fp = fingerprint(&self.data, &inside);
                self.fingerprints.insert(key, fp);
            }
        }
        Ok(changed)
    }
}

/// Lines (0, 1) and (1, t) of a plane, as coefficient pairs.
fn plane_lines(k: &Field) -> Vec<(Elem, Elem)> {
    std::iter::once((Elem::ZERO, Elem::ONE))
        .chain(k.elements().map(|t| (Elem::ONE, t)))
        .collect()
}

/// For a totally isotropic plane W = ⟨u₁, u₂⟩: every line x = a·u₁ + b·u₂ of
/// W with the full parameter group {c : c·xxᵀ ∈ S}, where S is the GF(ℓ)-span
/// of the forms λ·yyᵀ of the stored transvections centred in W. Forms are
/// written in the (a², ab, b²) coordinates of Sym²(W).
fn isotropic_plane_transvections(data: &SaturationData, u1: &[Elem], u2: &[Elem]) -> Vec<(Vector, AdditiveSubgroup)> {
    let k = data.field();
    let p = k.characteristic();
    let line_vec = |a: Elem, b: Elem| -> Vector {
        u1.iter()
            .zip(u2)
            .map(|(&x, &y)| k.add(k.mul(a, x), k.mul(b, y)))
            .collect()
    };
    let digits = |lam: Elem, a: Elem, b: Elem| -> Vec<u32> {
        [k.mul(a, a), k.mul(a, b), k.mul(b, b)]
            .into_iter()
            .flat_map(|q| k.coeffs(k.mul(lam, q)))
            .collect()
    };
    let lines = plane_lines(k);
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for &(a, b) in &lines {
        let v = line_vec(a, b);
        let (m, c) = monic(k, &v).unwrap();
        let Some(&i) = data.index.get(&m) else {
            continue;
        };
        // T_m[β] = T_v[β / c²] when v = c·m
        let c2 = k.mul(c, c);
        for &beta in data.centres[i].params.basis() {
            rows.push(digits(k.div(beta, c2).unwrap(), a, b));
        }
    }
    let pivots = gfp::rref(&mut rows, p);
    let basis: Vec<Elem> = (0..k.degree())
        .map(|j| {
            let mut e = vec![0; k.degree() as usize];
            e[j as usize] = 1;
            k.from_coeffs(&e).unwrap()
        })
        .collect();
    let mut out = Vec::new();
    for &(a, b) in &lines {
        // solve Σ c_j (ε_j q) ∈ S for (c_j) over GF(ℓ)
        let residues: Vec<Vec<u32>> = basis
            .iter()
            .map(|&e| {
                let mut r = digits(e, a, b);
                gfp::reduce(&mut r, &rows, &pivots, p);
                r
            })
            .collect();
        let params: Vec<Elem> = gfp::kernel(&residues, p)
            .into_iter()
            .map(|c| {
                basis
                    .iter()
                    .zip(&c)
                    .fold(Elem::ZERO, |acc, (&e, &x)| k.add(acc, k.mul(e, k.from_int(x as i64))))
            })
            .collect();
        if !params.is_empty() {
            out.push((line_vec(a, b), AdditiveSubgroup::span(k, params)));
        }
    }
    out
}

impl GroupSpec {
    /// Least fixed point of the orbit, addition and plane rules starting from
    /// the transvections among the generators plus `seeds`. `budget` bounds
    /// the number of productive rule firings.
    pub fn saturate(&self, seeds: &[Transvection], budget: usize) -> Result<SaturationData, SaturationError> {
        let mut data = SaturationData::new(self.space().clone());
        for t in self.transvection_generators().iter().chain(seeds) {
            data.insert(t, Provenance::Seed);
        }
        if data.is_empty() {
            return Err(SaturationError::NoSeed);
        }
        let mut s = Saturator {
            g: self,
            data,
            budget,
            queue: VecDeque::new(),
            queued: Vec::new(),
            fingerprints: HashMap::new(),
        };
        for i in 0..s.data.centres.len() {
            s.enqueue(i);
        }
        loop {
            s.orbit_fixpoint()?;
            let uncertified: Vec<(Vec<usize>, Subspace)> = components(&s.data)
                .into_iter()
                .filter(|(c, w)| !certify_members(&s.data, c, w))
                .collect();
            let open: Vec<(Vec<usize>, Subspace)> =
                uncertified.iter().filter(|(c, _)| c.len() > 1).cloned().collect();
            if !open.is_empty() && s.plane_pass(&open)? {
                continue;
            }
            // only once the plane rule is exhausted: certified components are
            // transvection sets of symplectic groups, which the rule cannot grow
            let mut loose: Vec<usize> = uncertified.into_iter().flat_map(|(c, _)| c).collect();
            loose.sort_by(|&a, &b| s.data.centres[a].direction.cmp(&s.data.centres[b].direction));
            if !s.isotropic_pass(&loose)? {
                s.data.certified = open.is_empty();
                break;
            }
        }
        Ok(s.data)
    }
}

/// Whether g(L) ⊆ L for every stored centre and generator.
pub fn is_stable(data: &SaturationData, g: &GroupSpec) -> bool {
    let k = g.field();
    data.centres.iter().all(|c| {
        g.generators()
            .iter()
            .all(|a| data.is_centre(&a.mul_vec(k, &c.direction)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use crate::group::{census_by_centre, transvection_census};

    fn vecs(k: &Field, xs: &[i64]) -> Vector {
        xs.iter().map(|&x| k.from_int(x)).collect()
    }

    fn check_against_closure(g: &GroupSpec) -> SaturationData {
        let k = g.field();
        let data = g.saturate(&[], 1_000_000).unwrap();
        let c = g.closure(1_000_000);
        assert!(!c.capped());
        let census = transvection_census(g.space(), &c).unwrap();
        assert_eq!(data.transvections(), census);
        let by = census_by_centre(k, &census);
        assert_eq!(by.len(), data.len());
        assert!(is_stable(&data, g));
        data
    }

    #[test]
    fn single_seed_uses_addition_only() {
        let k = make_field(5, 1).unwrap();
        let s = SymplecticSpace::standard(&k, 2).unwrap();
        let v = vecs(&k, &[1, 0]);
        let g = GroupSpec::new(s.clone(), vec![s.transvection_matrix(&v, Elem::ONE)]).unwrap();
        let d = g.saturate(&[], 100).unwrap();
        assert_eq!(d.len(), 1);
        assert!(d.params(&v).equals_subfield(k.subfield(1).unwrap()));
        assert_eq!(d.planes_enumerated(), 0);
    }

    #[test]
    fn sp2_gf5_from_two_seeds() {
        let k = make_field(5, 1).unwrap();
        let s = SymplecticSpace::standard(&k, 2).unwrap();
        let g = GroupSpec::new(
            s.clone(),
            vec![
                s.transvection_matrix(&vecs(&k, &[1, 0]), Elem::ONE),
                s.transvection_matrix(&vecs(&k, &[0, 1]), Elem::ONE),
            ],
        )
        .unwrap();
        let d = check_against_closure(&g);
        assert_eq!(d.len(), 6);
        assert!(d.certified());
    }

    #[test]
    fn orthogonal_seeds_stay_separate() {
        let k = make_field(5, 1).unwrap();
        let s = SymplecticSpace::standard(&k, 4).unwrap();
        let g = GroupSpec::new(
            s.clone(),
            vec![
                s.transvection_matrix(&vecs(&k, &[1, 0, 0, 0]), Elem::ONE),
                s.transvection_matrix(&vecs(&k, &[0, 1, 0, 0]), Elem::ONE),
            ],
        )
        .unwrap();
        let d = check_against_closure(&g);
        assert_eq!(d.len(), 2);
        assert_eq!(d.planes_enumerated(), 0);
    }

    #[test]
    fn isotropic_rule_combines_orthogonal_centres() {
        // e₁, e₂, e₁+e₂ commute; their products hold more transvections
        let k = make_field(5, 1).unwrap();
        let s = SymplecticSpace::standard(&k, 4).unwrap();
        let g = GroupSpec::new(
            s.clone(),
            vec![
                s.transvection_matrix(&vecs(&k, &[1, 0, 0, 0]), Elem::ONE),
                s.transvection_matrix(&vecs(&k, &[0, 1, 0, 0]), Elem::ONE),
                s.transvection_matrix(&vecs(&k, &[1, 1, 0, 0]), Elem::ONE),
            ],
        )
        .unwrap();
        let d = check_against_closure(&g);
        assert!(d.len() > 3);
        // non-monic combinations over an extension field
        let k = make_field(5, 2).unwrap();
        let s = SymplecticSpace::standard(&k, 4).unwrap();
        let x = k.generator();
        let w = k.primitive_element();
        let g = GroupSpec::new(
            s.clone(),
            vec![
                s.transvection_matrix(&vecs(&k, &[1, 0, 0, 0]), Elem::ONE),
                s.transvection_matrix(&vecs(&k, &[1, 0, 0, 0]), x),
                s.transvection_matrix(&vecs(&k, &[0, 1, 0, 0]), Elem::ONE),
                s.transvection_matrix(&vecs(&k, &[0, 1, 0, 0]), x),
                // leading coefficient w with w⁴ ∉ GF(5), so rescaling errors show
                s.transvection_matrix(&[w, Elem::ONE, Elem::ZERO, Elem::ZERO], k.from_int(4)),
            ],
        )
        .unwrap();
        check_against_closure(&g);
    }

    #[test]
    fn plane_rule_fills_a_subfield_plane() {
        // Two transvections whose orbit rule alone misses centres.
        let k = make_field(5, 2).unwrap();
        let s = SymplecticSpace::standard(&k, 2).unwrap();
        let x = k.generator();
        let g = GroupSpec::new(
            s.clone(),
            vec![
                s.transvection_matrix(&vecs(&k, &[1, 0]), x),
                s.transvection_matrix(&[Elem::ONE, x], k.from_int(2)),
            ],
        )
        .unwrap();
        check_against_closure(&g);
    }

    #[test]
    fn budget_exhaustion_returns_partial_data() {
        let k = make_field(5, 1).unwrap();
        let s = SymplecticSpace::standard(&k, 2).unwrap();
        let g = GroupSpec::new(
            s.clone(),
            vec![
                s.transvection_matrix(&vecs(&k, &[1, 0]), Elem::ONE),
                s.transvection_matrix(&vecs(&k, &[0, 1]), Elem::ONE),
            ],
        )
        .unwrap();
        match g.saturate(&[], 1) {
            Err(SaturationError::BudgetExceeded { partial, .. }) => assert!(partial.len() >= 2),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn certificate_for_subfield_line_set() {
        let k = make_field(5, 2).unwrap();
        let s = SymplecticSpace::standard(&k, 2).unwrap();
        let l = k.subfield(1).unwrap();
        let pl = AdditiveSubgroup::of_subfield(l);
        let mut dirs: Vec<Vector> = vec![vecs(&k, &[0, 1])];
        for t in 0..5 {
            dirs.push(vecs(&k, &[1, t]));
        }
        let members: Vec<(&Vector, &AdditiveSubgroup)> = dirs.iter().map(|d| (d, &pl)).collect();
        let cert = certify_structure(&s, &members, &Subspace::full(2)).unwrap();
        assert_eq!(cert.subfield_degree, 1);
        // dropping a line breaks completeness
        assert!(certify_structure(&s, &members[..5], &Subspace::full(2)).is_none());
    }
}
