//! Rational structures: L-spans inside V on which the form takes values in a
//! subfield L, and the machinery that grows one from a plane to a maximal
//! (L, G)-rational subspace.
//!
//! Every step checks its conclusion against the saturation data instead of
//! trusting it; a failed conclusion means the saturation missed transvections
//! and is reported as [`RationalityError::SaturationIncomplete`].

use crate::field::{Elem, SubfieldHandle};
use crate::group::{ell_part, plane_group, GroupSpec, SaturationData};
use crate::linalg::{self, is_zero_vec, monic, vec_scale, vec_sub, BasisCoordinates, Matrix, Subspace, Vector};
use crate::symplectic::{frame_matrix, SymplecticSpace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RationalityError {
    #[error("the two centres are orthogonal")]
    NotNonorthogonal,
    #[error("the given lines are not stored centres")]
    NotCentres,
    #[error("no diagonal conjugator makes the plane rational")]
    SearchExhausted,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("the structures are not linked")]
    NotLinked,
    #[error("the structures are not orthogonal")]
    NotOrthogonal,
    #[error("the centres do not span V")]
    SpanDeficient,
    #[error("saturation incomplete: {0}")]
    SaturationIncomplete(String),
}

fn violated(msg: &str) -> RationalityError {
    RationalityError::HypothesisViolated(msg.to_string())
}

fn incomplete(msg: &str) -> RationalityError {
    RationalityError::SaturationIncomplete(msg.to_string())
}

/// W_L: the L-span of K-vectors, stored in L-echelon form (reduced
/// row-echelon form of the L-coordinate rows), so equal L-spans compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalStructure {
    subfield: SubfieldHandle,
    n: usize,
    basis: Vec<Vector>,
}

impl RationalStructure {
    pub fn new(l: &SubfieldHandle, n: usize, basis: &[Vector]) -> Self {
        RationalStructure {
            subfield: l.clone(),
            n,
            basis: l_echelon(l, n, basis),
        }
    }

    pub fn zero(l: &SubfieldHandle, n: usize) -> Self {
        Self::new(l, n, &[])
    }

    pub fn subfield(&self) -> &SubfieldHandle {
        &self.subfield
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    /// dim_L W_L.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// W_K.
    pub fn k_span(&self) -> Subspace {
        Subspace::span(self.subfield.field(), self.n, &self.basis).expect("uniform length")
    }

    /// Number of L-lines, (|L|^m − 1)/(|L| − 1).
    pub fn line_count(&self) -> u128 {
        let q = self.subfield.order() as u128;
        (q.pow(self.dim() as u32) - 1) / (q - 1)
    }

    /// K-coordinates of v in the stored basis, when they all lie in L.
    pub fn l_coords(&self, v: &[Elem]) -> Option<Vector> {
        let k = self.subfield.field();
        let x = BasisCoordinates::new(k, &self.basis)?.coords(k, v)?;
        x.iter().all(|&c| self.subfield.contains(c)).then_some(x)
    }

    pub fn contains(&self, v: &[Elem]) -> bool {
        self.l_coords(v).is_some()
    }

    /// A scalar c with c·v ∈ W_L (c = 1 when v already lies in W_L).
    pub fn normalizer(&self, v: &[Elem]) -> Option<Elem> {
        let k = self.subfield.field();
        let x = BasisCoordinates::new(k, &self.basis)?.coords(k, v)?;
        if x.iter().all(|&c| self.subfield.contains(c)) {
            return (!is_zero_vec(&x)).then_some(Elem::ONE);
        }
        let c = k.inv(*x.iter().find(|c| !c.is_zero())?).unwrap();
        x.iter().all(|&xi| self.subfield.contains(k.mul(c, xi))).then_some(c)
    }

    /// W_L ⊕ U_L (basis union, re-canonicalised).
    pub fn direct_sum(&self, other: &RationalStructure) -> Self {
        let mut b = self.basis.clone();
        b.extend(other.basis.iter().cloned());
        Self::new(&self.subfield, self.n, &b)
    }

    /// A · W_L.
    pub fn image(&self, a: &Matrix) -> Self {
        let k = self.subfield.field();
        let b: Vec<Vector> = self.basis.iter().map(|v| a.mul_vec(k, v)).collect();
        Self::new(&self.subfield, self.n, &b)
    }

    /// Both defining conditions: the basis is K-independent and all pairings
    /// take values in L.
    pub fn is_l_rational(&self, space: &SymplecticSpace) -> bool {
        let independent = self.k_span().dim() == self.dim();
        independent
            && self.basis.iter().all(|b| {
                self.basis
                    .iter()
                    .all(|c| self.subfield.contains(space.form(b, c)))
            })
    }
}

fn l_echelon(l: &SubfieldHandle, n: usize, basis: &[Vector]) -> Vec<Vector> {
    let k = l.field();
    if basis.is_empty() {
        return Vec::new();
    }
    let r = l.relative_degree() as usize;
    let rows: Vec<Vector> = basis
        .iter()
        .map(|v| v.iter().flat_map(|&x| l.l_coordinates(x)).collect())
        .collect();
    let (m, rank) = linalg::rref(k, &Matrix::from_rows(&rows).expect("uniform length"));
    (0..rank)
        .map(|i| {
            let row = m.row(i);
            (0..n).map(|j| l.from_l_coordinates(&row[j * r..(j + 1) * r])).collect()
        })
        .collect()
}

/// Whether the listed centres (all of the stored centres inside W_K) are
/// exactly the L-lines of W_L, each with parameter group L.
fn matches_structure<'a>(
    w: &RationalStructure,
    d: &SaturationData,
    inside: impl Iterator<Item = &'a Vector>,
) -> bool {
    let k = w.subfield.field();
    let mut count: u128 = 0;
    for v in inside {
        let Some(c) = w.normalizer(v) else {
            return false;
        };
        if !d.params(&vec_scale(k, c, v)).equals_subfield(&w.subfield) {
            return false;
        }
        count += 1;
    }
    count == w.line_count()
}

pub fn is_l_rational(w: &RationalStructure, space: &SymplecticSpace) -> bool {
    w.is_l_rational(space)
}

/// (L, G)-rationality: W_L is L-rational and (v, λ) ↦ T_v[λ] is a bijection
/// from (W_L∖0 × L)/L^× onto the stored transvections with centre in W_K.
pub fn is_lg_rational(w: &RationalStructure, d: &SaturationData) -> bool {
    if !w.is_l_rational(d.space()) {
        return false;
    }
    let k = w.subfield.field();
    match w.dim() {
        0 => true,
        1 => d
            .centre(&w.basis[0])
            .is_some_and(|c| matches_structure(w, d, std::iter::once(&c.direction))),
        2 => {
            let inside = d.centres_in_plane(&w.basis[0], &w.basis[1]);
            matches_structure(w, d, inside.iter().map(|c| &c.direction))
        }
        _ => {
            let span = w.k_span();
            let all = d.centres();
            matches_structure(
                w,
                d,
                all.iter()
                    .map(|c| &c.direction)
                    .filter(|v| span.contains(k, v)),
            )
        }
    }
}

/// Output of [`find_rational_plane`]: replacing G by A G A⁻¹ makes
/// `structure` (in the new coordinates) an (L, G)-rational plane.
#[derive(Debug, Clone)]
pub struct RationalPlane {
    pub conjugator: Matrix,
    pub multiplier: Elem,
    pub structure: RationalStructure,
    /// |Sylow-ℓ| of the plane group, equal to |L|.
    pub sylow_order: u64,
    pub plane_group_order: usize,
}

/// Given nonorthogonal centres U₁, U₂, find L and a similitude A fixing both
/// lines such that ⟨u₁, u₂⟩_L is (L, AGA⁻¹)-rational with u₁•u₂ = 1.
///
/// L is read off the ℓ-Sylow order of the enumerated plane group. A acts as
/// u₁ ↦ a₁u₁, u₂ ↦ a₂u₂ and, on a symplectic frame (e′, f′) of the
/// complement, as e′ ↦ e′, f′ ↦ a₁a₂ f′, which keeps the multiplier uniform.
/// Transported parameters on ⟨u₁⟩ scale by a₁/a₂ only, so the lexicographic
/// search over (a₁, a₂) accepts at a₁ = 1 whenever it accepts at all.
pub fn find_rational_plane(
    d: &SaturationData,
    u1: &[Elem],
    u2: &[Elem],
) -> Result<RationalPlane, RationalityError> {
    let space = d.space();
    let k = space.field();
    let n = space.dim();
    if !d.is_centre(u1) || !d.is_centre(u2) {
        return Err(RationalityError::NotCentres);
    }
    let (u1, _) = monic(k, u1).ok_or(RationalityError::NotCentres)?;
    let omega = space.form(&u1, u2);
    if omega.is_zero() {
        return Err(RationalityError::NotNonorthogonal);
    }
    let u2 = vec_scale(k, k.inv(omega).unwrap(), u2);

    let inside = d.centres_in_plane(&u1, &u2);
    let members: Vec<_> = inside.iter().map(|c| (&c.direction, &c.params)).collect();
    let (_, group) = plane_group(space, &u1, &u2, &members);
    let sylow = ell_part(group.order() as u64, k.characteristic());
    let l = k
        .subfield_of_order(sylow)
        .ok_or_else(|| incomplete("plane group Sylow order is not a subfield order"))?;
    if d.params(&u1).size(k) != sylow {
        return Err(incomplete("parameter group order differs from the plane group Sylow order"));
    }

    // Plane coordinates of each member: v = x u₁ + y u₂.
    let coords: Vec<(Elem, Elem)> = inside
        .iter()
        .map(|c| (space.form(&c.direction, &u2), space.form(&u1, &c.direction)))
        .collect();
    let target = RationalStructure::new(l, n, &[u1.clone(), u2.clone()]);
    let a1 = Elem::ONE;
    for a2 in k.nonzero_elements() {
        let alpha = k.mul(a1, a2);
        let ainv = k.inv(alpha).unwrap();
        let ok = {
            let mut count: u128 = 0;
            let mut good = true;
            for (c, &(x, y)) in inside.iter().zip(&coords) {
                let av: Vector = u1
                    .iter()
                    .zip(&u2)
                    .map(|(&p, &q)| k.add(k.mul(k.mul(x, a1), p), k.mul(k.mul(y, a2), q)))
                    .collect();
                let Some(s) = target.normalizer(&av) else {
                    good = false;
                    break;
                };
                // P_{s·Av} = s⁻² · P_v / α
                let p = c.params.scaled(k, k.mul(ainv, k.inv(k.mul(s, s)).unwrap()));
                if !p.equals_subfield(l) {
                    good = false;
                    break;
                }
                count += 1;
            }
            good && count == target.line_count()
        };
        if !ok {
            continue;
        }
        let h = Subspace::span(k, n, &[u1.clone(), u2.clone()]).unwrap();
        let mut pairs = vec![(u1.clone(), u2.clone())];
        pairs.extend(
            space
                .symplectic_basis(&space.perp(&h))
                .map_err(|_| violated("degenerate plane"))?,
        );
        let frame = frame_matrix(&pairs);
        let g = n / 2;
        let mut diag = vec![Elem::ONE; n];
        diag[0] = a1;
        for f in diag.iter_mut().skip(g) {
            *f = alpha;
        }
        diag[g] = a2;
        let a = frame
            .mul(k, &Matrix::diagonal(&diag))
            .mul(k, &frame.inverse(k).expect("frame is a basis"));
        debug_assert_eq!(space.multiplier(&a), Ok(alpha));
        return Ok(RationalPlane {
            conjugator: a,
            multiplier: alpha,
            structure: target,
            sylow_order: sylow,
            plane_group_order: group.order(),
        });
    }
    Err(RationalityError::SearchExhausted)
}

fn check_split(
    space: &SymplecticSpace,
    hk: &Subspace,
    h: &[Elem],
    w: &[Elem],
) -> Result<(), RationalityError> {
    let k = space.field();
    if is_zero_vec(h) || !hk.contains(k, h) {
        return Err(violated("h must be a nonzero vector of H_K"));
    }
    if !space.perp(hk).contains(k, w) {
        return Err(violated("w must lie in H_K^⊥"));
    }
    Ok(())
}

/// For h ∈ H_L, w ∈ H_K^⊥ with ⟨h + w⟩ a centre and h₁ ∈ H_L∖0, checks that
/// ⟨h₁ + w⟩_L is an (L, G)-rational line and returns h₁ + w.
pub fn translate_line(
    hs: &RationalStructure,
    d: &SaturationData,
    h: &[Elem],
    w: &[Elem],
    h1: &[Elem],
) -> Result<Vector, RationalityError> {
    let space = d.space();
    let k = space.field();
    let hk = hs.k_span();
    if !hs.contains(h) || is_zero_vec(h) {
        return Err(violated("h must be a nonzero vector of H_L"));
    }
    if !hs.contains(h1) || is_zero_vec(h1) {
        return Err(violated("h1 must be a nonzero vector of H_L"));
    }
    if !space.perp(&hk).contains(k, w) {
        return Err(violated("w must lie in H_K^⊥"));
    }
    let v = linalg::vec_add(k, h, w);
    if !d.is_centre(&v) {
        return Err(violated("h + w must be a centre"));
    }
    let t = linalg::vec_add(k, h1, w);
    if !d.params(&t).equals_subfield(hs.subfield()) {
        return Err(incomplete("translated line is not (L,G)-rational"));
    }
    Ok(t)
}

/// For a centre ⟨h + w⟩ with h ∈ H_K∖0 and w ∈ H_K^⊥: confirms ⟨h⟩ is a
/// centre and returns μ with μh ∈ H_L.
pub fn rationalize_line(
    hs: &RationalStructure,
    d: &SaturationData,
    h: &[Elem],
    w: &[Elem],
) -> Result<Elem, RationalityError> {
    let space = d.space();
    let k = space.field();
    let hk = hs.k_span();
    check_split(space, &hk, h, w)?;
    let v = linalg::vec_add(k, h, w);
    if !d.is_centre(&v) {
        return Err(violated("h + w must be a centre"));
    }
    // ⟨h⟩ = H_K ∩ (⟨h + w⟩ ⊕ ⟨w⟩) when w ≠ 0
    if !is_zero_vec(w) {
        let pair = Subspace::span(k, space.dim(), &[v, w.to_vec()]).unwrap();
        let line = hk.intersect(k, &pair).map_err(|_| violated("dimension mismatch"))?;
        if line != Subspace::line(k, h) {
            return Err(violated("h is not the H_K-component of the centre"));
        }
    }
    if !d.is_centre(h) {
        return Err(incomplete("the H_K-component of a centre is not a centre"));
    }
    hs.normalizer(h)
        .ok_or_else(|| incomplete("the H_K-component of a centre is not on an L-line of H_L"))
}

/// With h ∈ H_L and w•w̃ ∈ L^×, confirms h̃ ∈ H_L and returns its
/// L-coordinates.
pub fn rigid_scalar(
    hs: &RationalStructure,
    d: &SaturationData,
    (h, w): (&[Elem], &[Elem]),
    (ht, wt): (&[Elem], &[Elem]),
) -> Result<Vector, RationalityError> {
    let space = d.space();
    let k = space.field();
    let hk = hs.k_span();
    check_split(space, &hk, h, w)?;
    check_split(space, &hk, ht, wt)?;
    if !hs.contains(h) {
        return Err(violated("h must lie in H_L"));
    }
    let s = space.form(w, wt);
    if s.is_zero() || !hs.subfield().contains(s) {
        return Err(violated("w • w̃ must lie in L^×"));
    }
    if !d.is_centre(&linalg::vec_add(k, h, w)) || !d.is_centre(&linalg::vec_add(k, ht, wt)) {
        return Err(violated("h + w and h̃ + w̃ must be centres"));
    }
    hs.l_coords(ht).ok_or_else(|| violated("h̃ is not in H_L"))
}

/// A link between orthogonal structures: h ∈ H_L, w ∈ I_L (both nonzero)
/// with ⟨h + w⟩ a centre.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkWitness {
    pub h: Vector,
    pub w: Vector,
}

/// Plane ⟨αw, βw̃⟩_L built from two link pairs.
#[derive(Debug, Clone)]
pub struct OrthogonalPlane {
    pub alpha: Elem,
    pub beta: Elem,
    pub plane: RationalStructure,
    pub link: LinkWitness,
}

/// From centres h + w and h̃ + w̃ (h, h̃ ∈ H_K∖0; w, w̃ ∈ H_K^⊥; w•w̃ ≠ 0)
/// builds the (L, G)-rational plane ⟨αw, βw̃⟩_L linked to H_L.
pub fn build_orthogonal_plane(
    hs: &RationalStructure,
    d: &SaturationData,
    (h, w): (&[Elem], &[Elem]),
    (ht, wt): (&[Elem], &[Elem]),
) -> Result<OrthogonalPlane, RationalityError> {
    let space = d.space();
    let k = space.field();
    let hk = hs.k_span();
    check_split(space, &hk, h, w)?;
    check_split(space, &hk, ht, wt)?;
    if space.form(w, wt).is_zero() {
        return Err(violated("w • w̃ must be nonzero"));
    }
    let alpha = rationalize_line(hs, d, h, w)?;
    let mu = rationalize_line(hs, d, ht, wt)?;
    let (h, w) = (vec_scale(k, alpha, h), vec_scale(k, alpha, w));
    let (ht, wt) = (vec_scale(k, mu, ht), vec_scale(k, mu, wt));
    let s = space.form(&w, &wt);
    if !hs.subfield().contains(s) {
        return Err(incomplete("rationalised link pairs do not pair into L"));
    }
    let sinv = k.inv(s).unwrap();
    let beta = k.mul(mu, sinv);
    let (ht, wt) = (vec_scale(k, sinv, &ht), vec_scale(k, sinv, &wt));
    rigid_scalar(hs, d, (&h, &w), (&ht, &wt)).map_err(|e| match e {
        RationalityError::HypothesisViolated(m) => RationalityError::SaturationIncomplete(m),
        other => other,
    })?;
    let plane = RationalStructure::new(hs.subfield(), space.dim(), &[w.clone(), wt]);
    if !is_lg_rational(&plane, d) {
        return Err(incomplete("orthogonal plane is not (L,G)-rational"));
    }
    Ok(OrthogonalPlane {
        alpha,
        beta,
        plane,
        link: LinkWitness { h, w },
    })
}

fn orthogonal(space: &SymplecticSpace, a: &RationalStructure, b: &RationalStructure) -> bool {
    a.basis()
        .iter()
        .all(|x| b.basis().iter().all(|y| space.form(x, y).is_zero()))
}

/// Searches the centres (canonical order) for one splitting as h + w with
/// nonzero h ∈ H_L, w ∈ I_L after rescaling.
pub fn linked(
    hs: &RationalStructure,
    is: &RationalStructure,
    d: &SaturationData,
) -> Result<Option<LinkWitness>, RationalityError> {
    let space = d.space();
    let k = space.field();
    if !orthogonal(space, hs, is) {
        return Err(RationalityError::NotOrthogonal);
    }
    if hs.is_zero() || is.is_zero() {
        return Ok(None);
    }
    let mut basis = hs.basis().to_vec();
    basis.extend(is.basis().iter().cloned());
    let Some(coords) = BasisCoordinates::new(k, &basis) else {
        return Err(violated("H_K and I_K must intersect trivially"));
    };
    let m = hs.dim();
    let l = hs.subfield();
    for c in d.centres() {
        let Some(x) = coords.coords(k, &c.direction) else {
            continue;
        };
        let (xh, xw) = x.split_at(m);
        if is_zero_vec(xh) || is_zero_vec(xw) {
            continue;
        }
        let s = k.inv(*xh.iter().find(|c| !c.is_zero()).unwrap()).unwrap();
        if x.iter().all(|&xi| l.contains(k.mul(s, xi))) {
            let v = vec_scale(k, s, &c.direction);
            let h = BasisCoordinates::new(k, hs.basis())
                .unwrap()
                .combine(k, &vec_scale(k, s, xh));
            return Ok(Some(LinkWitness {
                w: vec_sub(k, &v, &h),
                h,
            }));
        }
    }
    Ok(None)
}

/// H_L ⊕ I_L for orthogonal, linked (L, G)-rational structures.
pub fn merge(
    hs: &RationalStructure,
    is: &RationalStructure,
    d: &SaturationData,
) -> Result<RationalStructure, RationalityError> {
    let space = d.space();
    if !orthogonal(space, hs, is) {
        return Err(RationalityError::NotOrthogonal);
    }
    if is.is_zero() {
        return Ok(hs.clone());
    }
    if hs.is_zero() {
        return Ok(is.clone());
    }
    if linked(hs, is, d)?.is_none() {
        return Err(RationalityError::NotLinked);
    }
    let sum = hs.direct_sum(is);
    if !is_lg_rational(&sum, d) {
        return Err(incomplete("merged structure is not (L,G)-rational"));
    }
    Ok(sum)
}

/// One absorption step of [`extend_to_maximal`].
#[derive(Debug, Clone)]
pub struct ExtensionStep {
    pub centre: Vector,
    pub partner: Vector,
    pub plane: RationalStructure,
    pub link: LinkWitness,
}

#[derive(Debug, Clone)]
pub struct Extension {
    pub structure: RationalStructure,
    pub steps: Vec<ExtensionStep>,
}

/// Grows an (L, G)-rational H_L until every centre lies in I_K ∪ I_K^⊥.
/// Requires ⟨L(G)⟩_K = V.
pub fn extend_to_maximal(
    hs: &RationalStructure,
    d: &SaturationData,
    g: &GroupSpec,
) -> Result<Extension, RationalityError> {
    let space = d.space();
    let k = space.field();
    if !d.span().is_full() {
        return Err(RationalityError::SpanDeficient);
    }
    if !is_lg_rational(hs, d) {
        return Err(violated("starting structure must be (L,G)-rational"));
    }
    let _ = g;
    let centres = d.centres();
    let mut cur = hs.clone();
    let mut steps = Vec::new();
    loop {
        let ik = cur.k_span();
        let perp = space.perp(&ik);
        let Some(v) = centres
            .iter()
            .map(|c| &c.direction)
            .find(|v| !ik.contains(k, v) && !perp.contains(k, v))
        else {
            return Ok(Extension {
                structure: cur,
                steps,
            });
        };
        let pairs = space
            .symplectic_basis_from(cur.basis().to_vec())
            .map_err(|_| incomplete("rational structure became degenerate"))?;
        let h = space.project(&pairs, v);
        let w = vec_sub(k, v, &h);
        let vt = centres
            .iter()
            .map(|c| &c.direction)
            .find(|x| !space.form(x, &w).is_zero())
            .ok_or_else(|| incomplete("no centre pairs with the orthogonal component"))?
            .clone();
        let mut ht = space.project(&pairs, &vt);
        let mut wt = vec_sub(k, &vt, &ht);
        if is_zero_vec(&ht) {
            // ṽ ⊥ I_K: move v by T_ṽ[p] ∈ G to a centre h + w + c·ṽ.
            let p = d.params(&vt).basis()[0];
            let image = space.transvection_matrix(&vt, p).mul_vec(k, v);
            if !d.is_centre(&image) {
                return Err(incomplete("transvection image of a centre is not stored"));
            }
            ht = h.clone();
            wt = vec_sub(k, &image, &h);
        }
        let op = build_orthogonal_plane(&cur, d, (&h, &w), (&ht, &wt))?;
        let next = merge(&cur, &op.plane, d)?;
        if next.dim() != cur.dim() + 2 {
            return Err(incomplete("extension step did not grow the structure"));
        }
        steps.push(ExtensionStep {
            centre: v.clone(),
            partner: vt,
            plane: op.plane,
            link: op.link,
        });
        cur = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, Field};
    use crate::group::GroupSpec;
    use crate::linalg::unit_vector;

    fn v(k: &Field, xs: &[i64]) -> Vector {
        xs.iter().map(|&x| k.from_int(x)).collect()
    }

    /// Standard Sp_n(L) generators.
    fn sp_gens(k: &Field, s: &SymplecticSpace, l: &SubfieldHandle) -> Vec<Matrix> {
        let n = s.dim();
        let g = n / 2;
        let mut out = vec![];
        for i in 0..g {
            for &b in l.basis() {
                out.push(s.transvection_matrix(&unit_vector(n, i), b));
                out.push(s.transvection_matrix(&unit_vector(n, g + i), b));
            }
            out.push(s.transvection_matrix(&linalg::vec_add(k, &unit_vector(n, i), &unit_vector(n, g + i)), Elem::ONE));
            if i + 1 < g {
                out.push(s.transvection_matrix(&linalg::vec_add(k, &unit_vector(n, i), &unit_vector(n, i + 1)), Elem::ONE));
            }
        }
        out
    }

    fn saturated(p: u32, d: u32, n: usize, e: u32) -> (GroupSpec, SaturationData) {
        let k = make_field(p, d).unwrap();
        let s = SymplecticSpace::standard(&k, n).unwrap();
        let g = GroupSpec::new(s.clone(), sp_gens(&k, &s, k.subfield(e).unwrap())).unwrap();
        let data = g.saturate(&[], 1_000_000).unwrap();
        (g, data)
    }

    #[test]
    fn l_rationality_examples() {
        let k = make_field(5, 2).unwrap();
        let s = SymplecticSpace::standard(&k, 2).unwrap();
        let l = k.subfield(1).unwrap();
        let w = RationalStructure::new(l, 2, &[v(&k, &[1, 0]), v(&k, &[0, 1])]);
        assert!(is_l_rational(&w, &s));
        let x = k.generator();
        let bad = RationalStructure::new(l, 2, &[vec![x, Elem::ZERO], v(&k, &[0, 1])]);
        assert!(!is_l_rational(&bad, &s));
        let line = RationalStructure::new(k.full_subfield(), 2, &[vec![Elem::ONE, x]]);
        assert!(is_l_rational(&line, &s));
    }

    #[test]
    fn l_echelon_is_canonical() {
        let k = make_field(5, 2).unwrap();
        let l = k.subfield(1).unwrap();
        let a = RationalStructure::new(l, 2, &[v(&k, &[1, 0]), v(&k, &[0, 1])]);
        let b = RationalStructure::new(l, 2, &[v(&k, &[2, 3]), v(&k, &[1, 1])]);
        assert_eq!(a, b);
        let c = RationalStructure::new(l, 2, &[vec![k.generator(), Elem::ZERO], v(&k, &[0, 1])]);
        assert_ne!(a, c);
    }

    #[test]
    fn lg_rational_lines() {
        let (_, d) = saturated(5, 2, 2, 1);
        let k = make_field(5, 2).unwrap();
        let l = k.subfield(1).unwrap();
        assert!(is_lg_rational(&RationalStructure::new(l, 2, &[v(&k, &[1, 0])]), &d));
        assert!(is_lg_rational(&RationalStructure::new(l, 2, &[v(&k, &[1, 0]), v(&k, &[0, 1])]), &d));
        // same line over the full field: P is strictly smaller than K
        let kk = k.full_subfield();
        assert!(!is_lg_rational(&RationalStructure::new(kk, 2, &[v(&k, &[1, 0])]), &d));
    }

    #[test]
    fn rational_plane_already_rational() {
        let (_, d) = saturated(5, 1, 2, 1);
        let k = make_field(5, 1).unwrap();
        let rp = find_rational_plane(&d, &v(&k, &[1, 0]), &v(&k, &[0, 1])).unwrap();
        assert!(rp.conjugator.is_identity());
        assert_eq!(rp.structure.subfield().degree(), 1);
        assert_eq!(rp.sylow_order, 5);
    }

    #[test]
    fn rational_plane_full_field() {
        let (_, d) = saturated(5, 2, 2, 2);
        let k = make_field(5, 2).unwrap();
        let rp = find_rational_plane(&d, &v(&k, &[1, 0]), &v(&k, &[0, 1])).unwrap();
        assert!(rp.conjugator.is_identity());
        assert_eq!(rp.structure.subfield().degree(), 2);
        assert_eq!(rp.sylow_order, 25);
    }

    #[test]
    fn rational_plane_undoes_diagonal_distortion() {
        let k = make_field(5, 2).unwrap();
        let s = SymplecticSpace::standard(&k, 2).unwrap();
        let x = k.generator();
        let dg = Matrix::diagonal(&[x, Elem::ONE]);
        let base = GroupSpec::new(s.clone(), sp_gens(&k, &s, k.subfield(1).unwrap())).unwrap();
        let g = base.conjugated(&dg).unwrap();
        let d = g.saturate(&[], 1_000_000).unwrap();
        let rp = find_rational_plane(&d, &v(&k, &[1, 0]), &v(&k, &[0, 1])).unwrap();
        assert_eq!(rp.structure.subfield().degree(), 1);
        let g2 = g.conjugated(&rp.conjugator).unwrap();
        let d2 = g2.saturate(&[], 1_000_000).unwrap();
        assert!(is_lg_rational(&rp.structure, &d2));
        assert!(is_lg_rational(&rp.structure, &d.conjugated(&rp.conjugator, rp.multiplier)));
    }

    #[test]
    fn plane_search_errors() {
        let (_, d) = saturated(5, 1, 4, 1);
        let k = make_field(5, 1).unwrap();
        let e1 = v(&k, &[1, 0, 0, 0]);
        assert_eq!(
            find_rational_plane(&d, &e1, &v(&k, &[0, 1, 0, 0])).unwrap_err(),
            RationalityError::NotNonorthogonal
        );
    }

    #[test]
    fn translation_and_orthogonal_plane_in_sp4() {
        let (_, d) = saturated(5, 1, 4, 1);
        let k = make_field(5, 1).unwrap();
        let l = k.subfield(1).unwrap();
        let hs = RationalStructure::new(l, 4, &[v(&k, &[1, 0, 0, 0]), v(&k, &[0, 0, 1, 0])]);
        let w = v(&k, &[0, 1, 0, 1]);
        let t = translate_line(&hs, &d, &v(&k, &[1, 0, 0, 0]), &w, &v(&k, &[0, 0, 1, 0])).unwrap();
        assert_eq!(t, v(&k, &[0, 1, 1, 1]));
        let op = build_orthogonal_plane(
            &hs,
            &d,
            (&v(&k, &[1, 0, 0, 0]), &v(&k, &[0, 1, 0, 0])),
            (&v(&k, &[0, 0, 1, 0]), &v(&k, &[0, 0, 0, 1])),
        )
        .unwrap();
        assert_eq!((op.alpha, op.beta), (Elem::ONE, Elem::ONE));
        assert_eq!(op.plane, RationalStructure::new(l, 4, &[v(&k, &[0, 1, 0, 0]), v(&k, &[0, 0, 0, 1])]));
        let err = build_orthogonal_plane(
            &hs,
            &d,
            (&v(&k, &[1, 0, 0, 0]), &v(&k, &[0, 1, 0, 0])),
            (&v(&k, &[0, 0, 1, 0]), &v(&k, &[0, 1, 0, 0])),
        );
        assert!(matches!(err, Err(RationalityError::HypothesisViolated(_))));
    }

    #[test]
    fn rationalize_examples() {
        let (_, d) = saturated(5, 2, 2, 1);
        let k = make_field(5, 2).unwrap();
        let l = k.subfield(1).unwrap();
        let hs = RationalStructure::new(l, 2, &[v(&k, &[1, 0]), v(&k, &[0, 1])]);
        let zero = v(&k, &[0, 0]);
        assert_eq!(rationalize_line(&hs, &d, &v(&k, &[1, 0]), &zero), Ok(Elem::ONE));
        // 2e₁ already lies in H_L; a non-L multiple needs a rescaling into L
        let x = k.generator();
        let mu = rationalize_line(&hs, &d, &[x, Elem::ZERO], &zero).unwrap();
        assert!(l.contains(k.mul(mu, x)));
    }

    #[test]
    fn rigidity() {
        let (_, d) = saturated(5, 2, 4, 1);
        let k = make_field(5, 2).unwrap();
        let l = k.subfield(1).unwrap();
        let hs = RationalStructure::new(l, 4, &[v(&k, &[1, 0, 0, 0]), v(&k, &[0, 0, 1, 0])]);
        let c = rigid_scalar(
            &hs,
            &d,
            (&v(&k, &[1, 0, 0, 0]), &v(&k, &[0, 1, 0, 0])),
            (&v(&k, &[0, 0, 1, 0]), &v(&k, &[0, 0, 0, 1])),
        )
        .unwrap();
        assert!(c.iter().all(|&x| l.contains(x)));
        let x = k.generator();
        let err = rigid_scalar(
            &hs,
            &d,
            (&v(&k, &[1, 0, 0, 0]), &v(&k, &[0, 1, 0, 0])),
            (&[Elem::ZERO, Elem::ZERO, x, Elem::ZERO], &v(&k, &[0, 0, 0, 1])),
        );
        assert!(matches!(err, Err(RationalityError::HypothesisViolated(_))));
    }

    #[test]
    fn merge_and_extension_in_sp4() {
        let (g, d) = saturated(5, 1, 4, 1);
        let k = make_field(5, 1).unwrap();
        let l = k.subfield(1).unwrap();
        let h = RationalStructure::new(l, 4, &[v(&k, &[1, 0, 0, 0]), v(&k, &[0, 0, 1, 0])]);
        let i = RationalStructure::new(l, 4, &[v(&k, &[0, 1, 0, 0]), v(&k, &[0, 0, 0, 1])]);
        assert!(linked(&h, &i, &d).unwrap().is_some());
        let m = merge(&h, &i, &d).unwrap();
        assert_eq!(m.dim(), 4);
        assert!(is_lg_rational(&m, &d));
        assert_eq!(merge(&h, &RationalStructure::zero(l, 4), &d).unwrap(), h);
        let ext = extend_to_maximal(&h, &d, &g).unwrap();
        assert!(ext.structure.k_span().is_full());
        assert_eq!(d.len(), 156);
    }

    #[test]
    fn unlinked_blocks() {
        let k = make_field(5, 1).unwrap();
        let s = SymplecticSpace::standard(&k, 4).unwrap();
        let mut gens = vec![];
        for i in 0..2 {
            gens.push(s.transvection_matrix(&unit_vector(4, i), Elem::ONE));
            gens.push(s.transvection_matrix(&unit_vector(4, 2 + i), Elem::ONE));
        }
        let g = GroupSpec::new(s, gens).unwrap();
        let d = g.saturate(&[], 100_000).unwrap();
        let l = k.subfield(1).unwrap();
        let h = RationalStructure::new(l, 4, &[v(&k, &[1, 0, 0, 0]), v(&k, &[0, 0, 1, 0])]);
        let i = RationalStructure::new(l, 4, &[v(&k, &[0, 1, 0, 0]), v(&k, &[0, 0, 0, 1])]);
        assert_eq!(linked(&h, &i, &d).unwrap(), None);
        assert_eq!(merge(&h, &i, &d).unwrap_err(), RationalityError::NotLinked);
        let ext = extend_to_maximal(&h, &d, &g).unwrap();
        assert_eq!(ext.structure, h);
    }
}
