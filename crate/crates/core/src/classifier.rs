//! The classification driver and an independent witness checker.
//!
//! Control flow: saturate; a proper span of centres is an invariant subspace;
//! otherwise conjugate a nonorthogonal centre pair into an (L, G)-rational
//! plane, extend it to a maximal rational structure I, and either I_K = V
//! (the transvections form a conjugate of Sp_n(L)) or the G-translates of
//! I_K are mutually orthogonal blocks.

use std::collections::VecDeque;

use crate::field::{Elem, SubfieldHandle};
use crate::group::{
    census_by_centre, subspace_orbit, transvection_census, GroupSpec, SaturationData, SaturationError,
};
use crate::linalg::{self, monic, unit_vector, Matrix, Subspace, Vector};
use crate::rationality::{self, RationalityError};
use crate::symplectic::{frame_matrix, SymplecticSpace, Transvection};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    /// Largest group enumerated element by element.
    pub closure_cap: usize,
    /// Productive saturation rule firings.
    pub saturation_budget: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            closure_cap: 1_000_000,
            saturation_budget: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassifyError {
    #[error("characteristic {0} is below 5")]
    CharTooSmall(u32),
    #[error("G contains no nontrivial symplectic transvection")]
    NoTransvection,
    #[error("saturation incomplete: {reason} ({centres} centres after {firings} firings)")]
    SaturationIncomplete {
        reason: String,
        centres: usize,
        firings: usize,
    },
    #[error("internal invariant violated: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A proper nonzero subspace stabilised by every generator.
    Reducible { subspace: Subspace },
    /// Mutually orthogonal nondegenerate blocks summing to V. `permutations[g][i]`
    /// is the block that generator g sends block i to; `transitivity[i]` is a
    /// generator word (applied right to left) taking block 0 to block i.
    Imprimitive {
        blocks: Vec<Subspace>,
        permutations: Vec<Vec<usize>>,
        transitivity: Vec<Vec<usize>>,
    },
    /// The transvections of G are exactly B T_x[λ] B⁻¹ for x ∈ L^n∖0,
    /// λ ∈ L^×, with T_x the transvections of the standard space.
    FullSymplectic { subfield_degree: u32, conjugator: Matrix },
}

impl Witness {
    pub fn case_tag(&self) -> &'static str {
        match self {
            Witness::Reducible { .. } => "reducible",
            Witness::Imprimitive { .. } => "imprimitive",
            Witness::FullSymplectic { .. } => "full_symplectic",
        }
    }
}

/// What the driver saw on the way to the witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostics {
    pub centres: usize,
    pub transvections: u64,
    pub firings: usize,
    pub planes_enumerated: usize,
    pub certified: bool,
    /// Starting plane (monic u₁, u₂) in the input coordinates.
    pub plane: Option<(Vector, Vector)>,
    pub plane_group_order: Option<usize>,
    /// Conjugator A applied before extension, and its multiplier.
    pub rationalizer: Option<(Matrix, Elem)>,
    pub extension_steps: usize,
    pub structure_dim: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ClassificationResult {
    pub witness: Witness,
    /// ⟨m(g)⟩ ⊆ K^× over the generators, sorted.
    pub multiplier_subgroup: Vec<Elem>,
    pub diagnostics: Diagnostics,
    pub saturation: SaturationData,
}

fn incomplete(reason: impl Into<String>, d: &SaturationData) -> ClassifyError {
    ClassifyError::SaturationIncomplete {
        reason: reason.into(),
        centres: d.len(),
        firings: d.firings(),
    }
}

fn from_rationality(e: RationalityError, d: &SaturationData) -> ClassifyError {
    incomplete(e.to_string(), d)
}

pub fn classify(g: &GroupSpec, budgets: &Budgets) -> Result<ClassificationResult, ClassifyError> {
    let k = g.field();
    let space = g.space();
    let n = g.dim();
    if k.characteristic() < 5 {
        return Err(ClassifyError::CharTooSmall(k.characteristic()));
    }
    let d = match g.saturate(&[], budgets.saturation_budget) {
        Ok(d) => d,
        Err(SaturationError::NoSeed) => return Err(ClassifyError::NoTransvection),
        Err(SaturationError::BudgetExceeded { budget, partial }) => {
            return Err(incomplete(format!("saturation budget {budget} exhausted"), &partial))
        }
    };
    let mut diag = Diagnostics {
        centres: d.len(),
        transvections: d.transvection_count(),
        firings: d.firings(),
        planes_enumerated: d.planes_enumerated(),
        certified: d.certified(),
        plane: None,
        plane_group_order: None,
        rationalizer: None,
        extension_steps: 0,
        structure_dim: None,
    };
    let done = |witness, diag, d| ClassificationResult {
        witness,
        multiplier_subgroup: g.multiplier_subgroup(),
        diagnostics: diag,
        saturation: d,
    };

    let span = d.span();
    if !span.is_full() {
        return Ok(done(Witness::Reducible { subspace: span }, diag, d));
    }

    let centres = d.centres();
    let pair = centres.iter().enumerate().find_map(|(i, a)| {
        centres[i + 1..]
            .iter()
            .find(|b| !space.form(&a.direction, &b.direction).is_zero())
            .map(|b| (a.direction.clone(), b.direction.clone()))
    });
    let Some((u1, u2)) = pair else {
        return Err(ClassifyError::Inconsistent(
            "centres span V but are pairwise orthogonal".into(),
        ));
    };
    let rp = rationality::find_rational_plane(&d, &u1, &u2).map_err(|e| from_rationality(e, &d))?;
    diag.plane = Some((u1, u2));
    diag.plane_group_order = Some(rp.plane_group_order);
    let a = rp.conjugator.clone();
    let ainv = a.inverse(k).expect("similitude");
    let g2 = g
        .conjugated(&a)
        .map_err(|e| ClassifyError::Inconsistent(e.to_string()))?;
    let d2 = d.conjugated(&a, rp.multiplier);
    if !a.is_identity() {
        diag.rationalizer = Some((a.clone(), rp.multiplier));
    }
    let ext = rationality::extend_to_maximal(&rp.structure, &d2, &g2).map_err(|e| from_rationality(e, &d))?;
    diag.extension_steps = ext.steps.len();
    diag.structure_dim = Some(ext.structure.dim());
    let ik = ext.structure.k_span();

    if ik.is_full() {
        let pairs = space
            .symplectic_basis_from(ext.structure.basis().to_vec())
            .map_err(|e| ClassifyError::Inconsistent(e.to_string()))?;
        let c = frame_matrix(&pairs);
        let b = ainv.mul(k, &c);
        let witness = Witness::FullSymplectic {
            subfield_degree: ext.structure.subfield().degree(),
            conjugator: b,
        };
        return Ok(done(witness, diag, d));
    }

    let orbit = subspace_orbit(&g2, &ik, n).map_err(|e| incomplete(e.to_string(), &d))?;
    for (i, x) in orbit.iter().enumerate() {
        for y in &orbit[i + 1..] {
            if !space.perp(x).contains_subspace(k, y) {
                return Err(incomplete("translates of the maximal structure are not orthogonal", &d));
            }
        }
    }
    let blocks: Vec<Subspace> = orbit.iter().map(|s| s.image(k, &ainv)).collect();
    let sum = blocks
        .iter()
        .fold(Subspace::zero(n), |acc, b| acc.sum(k, b).unwrap());
    if !sum.is_full() {
        return Ok(done(Witness::Reducible { subspace: sum }, diag, d));
    }
    let (permutations, transitivity) = block_action(g, &blocks)
        .ok_or_else(|| ClassifyError::Inconsistent("generators do not act transitively on the blocks".into()))?;
    Ok(done(
        Witness::Imprimitive {
            blocks,
            permutations,
            transitivity,
        },
        diag,
        d,
    ))
}

/// Per-generator block permutations and, by BFS from block 0, a word taking
/// block 0 to each block. `None` if some generator does not permute the
/// blocks or the action is intransitive.
fn block_action(g: &GroupSpec, blocks: &[Subspace]) -> Option<(Vec<Vec<usize>>, Vec<Vec<usize>>)> {
    let k = g.field();
    let mut perms = Vec::new();
    for a in g.generators() {
        let mut p = Vec::with_capacity(blocks.len());
        for b in blocks {
            let img = b.image(k, a);
            p.push(blocks.iter().position(|c| *c == img)?);
        }
        let mut seen = p.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != blocks.len() {
            return None;
        }
        perms.push(p);
    }
    let mut words: Vec<Option<Vec<usize>>> = vec![None; blocks.len()];
    words[0] = Some(Vec::new());
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (gi, p) in perms.iter().enumerate() {
            let j = p[i];
            if words[j].is_none() {
                let mut w = vec![gi];
                w.extend(words[i].as_ref().unwrap());
                words[j] = Some(w);
                queue.push_back(j);
            }
        }
    }
    let words: Option<Vec<Vec<usize>>> = words.into_iter().collect();
    Some((perms, words?))
}

/// The standard generators of Sp_n(L) on the standard space:
/// T_{eᵢ}[β], T_{fᵢ}[β] (β over a GF(ℓ)-basis of L), T_{eᵢ+fᵢ}[1] and
/// T_{eᵢ+eᵢ₊₁}[1].
pub fn standard_generators(space: &SymplecticSpace, l: &SubfieldHandle) -> Vec<Transvection> {
    let k = space.field();
    let n = space.dim();
    let g = n / 2;
    let mut out = Vec::new();
    for i in 0..g {
        for &b in l.basis() {
            out.push(space.make_transvection(&unit_vector(n, i), b).unwrap());
            out.push(space.make_transvection(&unit_vector(n, g + i), b).unwrap());
        }
        let ef = linalg::vec_add(k, &unit_vector(n, i), &unit_vector(n, g + i));
        out.push(space.make_transvection(&ef, Elem::ONE).unwrap());
        if i + 1 < g {
            let ee = linalg::vec_add(k, &unit_vector(n, i), &unit_vector(n, i + 1));
            out.push(space.make_transvection(&ee, Elem::ONE).unwrap());
        }
    }
    out
}

/// Re-checks a witness against G from scratch; no classifier state is used.
pub fn verify_witness(g: &GroupSpec, w: &Witness, budgets: &Budgets) -> bool {
    match w {
        Witness::Reducible { subspace } => verify_reducible(g, subspace),
        Witness::Imprimitive {
            blocks,
            permutations,
            transitivity,
        } => verify_imprimitive(g, blocks, permutations, transitivity),
        Witness::FullSymplectic {
            subfield_degree,
            conjugator,
        } => verify_full(g, *subfield_degree, conjugator, budgets),
    }
}

fn verify_reducible(g: &GroupSpec, s: &Subspace) -> bool {
    let k = g.field();
    s.ambient() == g.dim()
        && !s.is_zero()
        && !s.is_full()
        && g.generators().iter().all(|a| s.image(k, a) == *s)
}

fn verify_imprimitive(g: &GroupSpec, blocks: &[Subspace], perms: &[Vec<usize>], words: &[Vec<usize>]) -> bool {
    let k = g.field();
    let space = g.space();
    let n = g.dim();
    let h = blocks.len();
    if h < 2 || blocks.iter().any(|b| b.ambient() != n) {
        return false;
    }
    let m = blocks[0].dim();
    if m == 0 || m >= n || blocks.iter().any(|b| b.dim() != m || !space.is_nondegenerate(b)) {
        return false;
    }
    for (i, x) in blocks.iter().enumerate() {
        for y in &blocks[i + 1..] {
            if !space.perp(x).contains_subspace(k, y) {
                return false;
            }
        }
    }
    let sum = blocks.iter().fold(Subspace::zero(n), |acc, b| acc.sum(k, b).unwrap());
    if !sum.is_full() || perms.len() != g.generators().len() {
        return false;
    }
    for (a, p) in g.generators().iter().zip(perms) {
        if p.len() != h || blocks.iter().zip(p).any(|(b, &j)| j >= h || b.image(k, a) != blocks[j]) {
            return false;
        }
    }
    // transitivity: each word carries block 0 onto its block
    words.len() == h
        && words.iter().enumerate().all(|(i, w)| {
            let mut cur = 0usize;
            for &gi in w.iter().rev() {
                match perms.get(gi) {
                    Some(p) => cur = p[cur],
                    None => return false,
                }
            }
            cur == i
        })
}

/// |Sp_n(GF(q))|, or `None` on overflow.
pub fn sp_order(q: u64, n: usize) -> Option<u128> {
    let q = q as u128;
    let h = (n / 2) as u32;
    let mut o = q.checked_pow(h * h)?;
    for i in 1..=h {
        o = o.checked_mul(q.checked_pow(2 * i)? - 1)?;
    }
    Some(o)
}

fn verify_full(g: &GroupSpec, degree: u32, b: &Matrix, budgets: &Budgets) -> bool {
    let k = g.field();
    let space = g.space();
    let n = g.dim();
    let Ok(l) = k.subfield(degree) else {
        return false;
    };
    if b.rows() != n || b.cols() != n {
        return false;
    }
    let Ok(binv) = b.inverse(k) else {
        return false;
    };
    let std = SymplecticSpace::standard(k, n).unwrap();
    // B must carry the standard form to a multiple β of the form on V
    let gram = b.transpose().mul(k, space.gram()).mul(k, b);
    let Some(beta) = gram.scalar_ratio(k, std.gram()) else {
        return false;
    };
    let Ok(d) = g.saturate(&[], budgets.saturation_budget) else {
        return false;
    };
    // every conjugated standard generator is in G
    for t in standard_generators(&std, l) {
        let m = b.mul(k, &t.matrix(&std)).mul(k, &binv);
        let Ok(Transvection::Nontrivial { direction, parameter }) = space.detect_transvection(&m) else {
            return false;
        };
        if !d.params(&direction).contains(k, parameter) {
            return false;
        }
    }
    // every transvection of G is conjugated from L^n: P_{Bx} = β⁻¹L for x ∈ L^n
    let binv_beta = k.inv(beta).unwrap();
    let expected = crate::field::AdditiveSubgroup::of_subfield(l).scaled(k, binv_beta);
    for c in d.centres() {
        let x = binv.mul_vec(k, &c.direction);
        let Some((xm, _)) = monic(k, &x) else {
            return false;
        };
        if !xm.iter().all(|&e| l.contains(e)) {
            return false;
        }
        let v = b.mul_vec(k, &xm);
        if d.params(&v) != expected {
            return false;
        }
    }
    let q = l.order() as u64;
    let lines = (q.pow(n as u32) - 1) / (q - 1);
    if d.len() as u64 != lines || d.transvection_count() != q.pow(n as u32) - 1 {
        return false;
    }
    // exact census comparison when the whole group fits; G ⊇ B Sp_n(L) B⁻¹
    // was checked above, so a too-large Sp_n(L) would only hit the cap
    if sp_order(q, n).map_or(true, |o| o > budgets.closure_cap as u128) {
        return true;
    }
    let closure = g.closure(budgets.closure_cap);
    if !closure.capped() {
        let Ok(census) = transvection_census(space, &closure) else {
            return false;
        };
        let by_centre = census_by_centre(k, &census);
        if by_centre.len() as u64 != lines {
            return false;
        }
        for (dir, p) in &by_centre {
            let x = binv.mul_vec(k, dir);
            let Some((xm, _)) = monic(k, &x) else {
                return false;
            };
            if !xm.iter().all(|&e| l.contains(e)) || *p != d.params(dir) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn group(k: &crate::field::Field, n: usize, ts: &[(Vector, Elem)], extra: &[Matrix]) -> GroupSpec {
        let s = SymplecticSpace::standard(k, n).unwrap();
        let mut gens: Vec<Matrix> = ts.iter().map(|(v, l)| s.transvection_matrix(v, *l)).collect();
        gens.extend(extra.iter().cloned());
        GroupSpec::new(s, gens).unwrap()
    }

    #[test]
    fn symplectic_orders() {
        assert_eq!(sp_order(5, 2), Some(120));
        assert_eq!(sp_order(5, 4), Some(9_360_000));
        assert_eq!(sp_order(3, 6), Some(9_170_703_360));
    }

    fn v(k: &crate::field::Field, xs: &[i64]) -> Vector {
        xs.iter().map(|&x| k.from_int(x)).collect()
    }

    #[test]
    fn sp2_gf5_is_full() {
        let k = make_field(5, 1).unwrap();
        let one = Elem::ONE;
        let g = group(&k, 2, &[(v(&k, &[1, 0]), one), (v(&k, &[0, 1]), one), (v(&k, &[1, 1]), one)], &[]);
        let r = classify(&g, &Budgets::default()).unwrap();
        match &r.witness {
            Witness::FullSymplectic { subfield_degree, conjugator } => {
                assert_eq!(*subfield_degree, 1);
                assert!(conjugator.is_identity());
            }
            other => panic!("{other:?}"),
        }
        assert!(verify_witness(&g, &r.witness, &Budgets::default()));
        assert_eq!(g.closure(1000).order(), 120);
    }

    #[test]
    fn isotropic_span_is_reducible() {
        let k = make_field(5, 1).unwrap();
        let g = group(&k, 4, &[(v(&k, &[1, 0, 0, 0]), Elem::ONE), (v(&k, &[0, 1, 0, 0]), Elem::ONE)], &[]);
        let r = classify(&g, &Budgets::default()).unwrap();
        assert_eq!(r.witness.case_tag(), "reducible");
        assert!(verify_witness(&g, &r.witness, &Budgets::default()));
        assert!(!verify_witness(&g, &Witness::Reducible { subspace: Subspace::full(4) }, &Budgets::default()));
    }

    #[test]
    fn block_swap_is_imprimitive() {
        let k = make_field(5, 1).unwrap();
        let one = Elem::ONE;
        let mut swap = Matrix::zero(4, 4);
        for (i, j) in [(0, 1), (1, 0), (2, 3), (3, 2)] {
            swap.set(i, j, one);
        }
        let g = group(
            &k,
            4,
            &[
                (v(&k, &[1, 0, 0, 0]), one),
                (v(&k, &[0, 0, 1, 0]), one),
                (v(&k, &[0, 1, 0, 0]), one),
                (v(&k, &[0, 0, 0, 1]), one),
            ],
            &[swap],
        );
        let r = classify(&g, &Budgets::default()).unwrap();
        let Witness::Imprimitive { blocks, .. } = &r.witness else {
            panic!("{:?}", r.witness);
        };
        assert_eq!((blocks.len(), blocks[0].dim()), (2, 2));
        assert!(verify_witness(&g, &r.witness, &Budgets::default()));
        // a degenerate block is rejected
        let bad = Witness::Imprimitive {
            blocks: vec![
                Subspace::span(&k, 4, &[v(&k, &[1, 0, 0, 0]), v(&k, &[0, 1, 0, 0])]).unwrap(),
                Subspace::span(&k, 4, &[v(&k, &[0, 0, 1, 0]), v(&k, &[0, 0, 0, 1])]).unwrap(),
            ],
            permutations: vec![vec![0, 1]; 5],
            transitivity: vec![vec![], vec![4]],
        };
        assert!(!verify_witness(&g, &bad, &Budgets::default()));
    }

    #[test]
    fn errors() {
        let k = make_field(3, 1).unwrap();
        let g = group(&k, 2, &[(vec![Elem::ONE, Elem::ZERO], Elem::ONE)], &[]);
        assert_eq!(classify(&g, &Budgets::default()).unwrap_err(), ClassifyError::CharTooSmall(3));
        let k = make_field(5, 1).unwrap();
        let g = group(&k, 2, &[], &[Matrix::scalar(2, k.from_int(2))]);
        assert_eq!(classify(&g, &Budgets::default()).unwrap_err(), ClassifyError::NoTransvection);
        let g = group(&k, 2, &[(v(&k, &[1, 0]), Elem::ONE), (v(&k, &[0, 1]), Elem::ONE)], &[]);
        let tight = Budgets {
            saturation_budget: 1,
            ..Budgets::default()
        };
        assert!(matches!(classify(&g, &tight), Err(ClassifyError::SaturationIncomplete { .. })));
    }
}
