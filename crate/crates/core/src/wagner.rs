//! Wagner's three-dimensional lemma, made constructive.
//!
//! In a 3-dimensional K-space (no form), let G = ⟨T₁, T₂, T₃⟩ be generated by
//! transvections fixing a line U pointwise, with distinct centres U₁, U₂, U₃,
//! U ⊄ U₁ ⊕ U₂ and U ≠ U₃. Then (U₁ ⊕ U₂) ∩ (U ⊕ U₃) is the centre of a
//! transvection of G. [`wagner_word`] produces it as an explicit word:
//! δ₁,ᵢ ∈ ⟨T₁, Tᵢ⟩ acts as −1 on U₁ ⊕ Uᵢ and fixes U, T = δ₁,₂δ₁,₃ is a
//! transvection with centre U, and T^k T₃ T^{−k} with k = 2⁻¹ mod ℓ is the
//! required element.

use rand::Rng;

use crate::field::{Elem, Field};
use crate::group::closure_of;
use crate::linalg::{is_zero_vec, kernel, monic, Matrix, Subspace, Vector};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WagnerError {
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("plane group enumeration exceeded {0} elements")]
    BudgetExceeded(usize),
}

fn violated(msg: &str) -> WagnerError {
    WagnerError::HypothesisViolated(msg.to_string())
}

/// Three transvections of K³ and the line U they fix pointwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WagnerInstance {
    pub field: Field,
    pub transvections: [Matrix; 3],
    pub u: Vector,
}

/// A validated instance: centres, with T₁/T₂ interchanged if needed so that
/// U₃ ⊄ U₁ ⊕ U. `order[i]` is the input index of the i-th transvection.
struct Normalized {
    k: Field,
    t: [Matrix; 3],
    c: [Vector; 3],
    u: Vector,
    order: [usize; 3],
}

/// Centre of a GL₃ transvection: rank(M − I) = 1 and (M − I)² = 0.
pub fn gl_transvection_centre(k: &Field, m: &Matrix) -> Option<Vector> {
    let n = m.rows();
    let d = m.sub(k, &Matrix::identity(n));
    if d.rank(k) != 1 || !d.mul(k, &d).as_slice().iter().all(|x| x.is_zero()) {
        return None;
    }
    let col = d.columns().into_iter().find(|c| !is_zero_vec(c))?;
    monic(k, &col).map(|(v, _)| v)
}

fn span(k: &Field, vs: &[&Vector]) -> Subspace {
    Subspace::span(k, 3, &vs.iter().map(|v| (*v).clone()).collect::<Vec<_>>()).unwrap()
}

impl WagnerInstance {
    pub fn new(field: &Field, transvections: [Matrix; 3], u: Vector) -> Self {
        WagnerInstance {
            field: field.clone(),
            transvections,
            u,
        }
    }

    pub fn centres(&self) -> Result<[Vector; 3], WagnerError> {
        let k = &self.field;
        let mut out: [Vector; 3] = Default::default();
        for (i, t) in self.transvections.iter().enumerate() {
            if t.rows() != 3 || t.cols() != 3 {
                return Err(violated("matrices must be 3×3"));
            }
            out[i] = gl_transvection_centre(k, t)
                .ok_or_else(|| WagnerError::HypothesisViolated(format!("T{} is not a transvection", i + 1)))?;
        }
        Ok(out)
    }

    fn normalize(&self) -> Result<Normalized, WagnerError> {
        let k = &self.field;
        if k.characteristic() < 5 {
            return Err(violated("characteristic must be at least 5"));
        }
        if self.u.len() != 3 || is_zero_vec(&self.u) {
            return Err(violated("U must be a nonzero vector of K³"));
        }
        let (u, _) = monic(k, &self.u).unwrap();
        let c = self.centres()?;
        for (i, t) in self.transvections.iter().enumerate() {
            if t.mul_vec(k, &u) != u {
                return Err(WagnerError::HypothesisViolated(format!("T{} does not fix U pointwise", i + 1)));
            }
        }
        if c[0] == c[1] || c[0] == c[2] || c[1] == c[2] {
            return Err(violated("centres must be distinct"));
        }
        if span(k, &[&c[0], &c[1]]).contains(k, &u) {
            return Err(violated("U lies in U1 ⊕ U2"));
        }
        if c[2] == u {
            return Err(violated("U3 equals U"));
        }
        // axis of Tᵢ is ker(Tᵢ − I); it must be Uᵢ ⊕ U
        for (i, t) in self.transvections.iter().enumerate() {
            let d = t.sub(k, &Matrix::identity(3));
            let axis = Subspace::span(k, 3, &kernel(k, &d)).unwrap();
            if axis != span(k, &[&c[i], &u]) {
                return Err(WagnerError::HypothesisViolated(format!("axis of T{} is not U{} ⊕ U", i + 1, i + 1)));
            }
        }
        let [t1, t2, t3] = self.transvections.clone();
        let [c1, c2, c3] = c;
        Ok(if span(k, &[&c1, &u]).contains(k, &c3) {
            Normalized {
                k: k.clone(),
                t: [t2, t1, t3],
                c: [c2, c1, c3],
                u,
                order: [1, 0, 2],
            }
        } else {
            Normalized {
                k: k.clone(),
                t: [t1, t2, t3],
                c: [c1, c2, c3],
                u,
                order: [0, 1, 2],
            }
        })
    }
}

/// (U₁ ⊕ U₂) ∩ (U ⊕ U₃), as a monic vector.
pub fn wagner_line(inst: &WagnerInstance) -> Result<Vector, WagnerError> {
    let nz = inst.normalize()?;
    let k = &nz.k;
    let a = span(k, &[&nz.c[0], &nz.c[1]]);
    let b = span(k, &[&nz.u, &nz.c[2]]);
    let line = a.intersect(k, &b).unwrap();
    if line.dim() != 1 {
        return Err(violated("intersection is not a line"));
    }
    Ok(line.line_vector().unwrap().clone())
}

/// A word over {T₁, T₂, T₃}: (input index, exponent) runs, read left to
/// right as a matrix product.
pub type Word = Vec<(usize, u32)>;

pub fn evaluate_word(inst: &WagnerInstance, word: &[(usize, u32)]) -> Matrix {
    let k = &inst.field;
    word.iter().fold(Matrix::identity(3), |acc, &(i, e)| {
        acc.mul(k, &inst.transvections[i].pow(k, e as u64))
    })
}

fn push(word: &mut Word, g: usize, e: u32) {
    if e == 0 {
        return;
    }
    match word.last_mut() {
        Some((h, f)) if *h == g => *f += e,
        _ => word.push((g, e)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WagnerResult {
    pub line: Vector,
    pub word: Word,
    pub matrix: Matrix,
    /// k with T^k the unit translation (2k ≡ 1 mod ℓ); 0 in the degenerate
    /// case U₃ ⊆ U₁ ⊕ U₂, where T₃ itself is returned.
    pub k: u32,
    pub delta_words: [Word; 2],
}

/// The element of ⟨T₁, Tᵢ⟩ acting as −1 on U₁ ⊕ Uᵢ and fixing U, with its
/// word in input indices.
fn delta(nz: &Normalized, i: usize, budget: usize) -> Result<(Matrix, Word), WagnerError> {
    let k = &nz.k;
    let frame = Matrix::from_columns(&[nz.c[0].clone(), nz.c[i].clone(), nz.u.clone()]).unwrap();
    let minus = k.neg(Elem::ONE);
    let target = frame
        .mul(k, &Matrix::diagonal(&[minus, minus, Elem::ONE]))
        .mul(k, &frame.inverse(k).map_err(|_| violated("U lies in U1 ⊕ Ui"))?);
    let gens = [nz.t[0].clone(), nz.t[i].clone()];
    let cl = closure_of(k, 3, &gens, budget, true);
    if cl.capped() {
        return Err(WagnerError::BudgetExceeded(budget));
    }
    let idx = cl
        .index_of(&target)
        .ok_or_else(|| violated("plane group does not contain −1"))?;
    let local = [nz.order[0], nz.order[i]];
    let mut w = Word::new();
    for g in cl.word(idx).unwrap() {
        push(&mut w, local[g], 1);
    }
    Ok((target, w))
}

pub fn wagner_word(inst: &WagnerInstance, budget: usize) -> Result<WagnerResult, WagnerError> {
    let nz = inst.normalize()?;
    let k = &nz.k;
    let line = wagner_line(inst)?;
    let ell = k.characteristic();
    if span(k, &[&nz.c[0], &nz.c[1]]).contains(k, &nz.c[2]) {
        let word = vec![(nz.order[2], 1)];
        return finish(inst, line, word, 0, [Word::new(), Word::new()]);
    }
    let (_, w12) = delta(&nz, 1, budget)?;
    let (_, w13) = delta(&nz, 2, budget)?;
    let half = (ell + 1) / 2; // 2⁻¹ mod ℓ
    let mut word = Word::new();
    let mut t_word = w12.clone();
    for &(g, e) in &w13 {
        push(&mut t_word, g, e);
    }
    for _ in 0..half {
        for &(g, e) in &t_word {
            push(&mut word, g, e);
        }
    }
    push(&mut word, nz.order[2], 1);
    for _ in 0..ell - half {
        for &(g, e) in &t_word {
            push(&mut word, g, e);
        }
    }
    finish(inst, line, word, half, [w12, w13])
}

fn finish(
    inst: &WagnerInstance,
    line: Vector,
    word: Word,
    k: u32,
    delta_words: [Word; 2],
) -> Result<WagnerResult, WagnerError> {
    let f = &inst.field;
    let matrix = evaluate_word(inst, &word);
    let (u, _) = monic(f, &inst.u).unwrap();
    if gl_transvection_centre(f, &matrix).as_ref() != Some(&line) || matrix.mul_vec(f, &u) != u {
        return Err(violated("constructed element is not a transvection on the predicted line"));
    }
    Ok(WagnerResult {
        line,
        word,
        matrix,
        k,
        delta_words,
    })
}

/// I + λ·c·φᵀ with φ spanning the annihilator of ⟨c, u⟩.
pub fn gl_transvection(k: &Field, c: &[Elem], u: &[Elem], lambda: Elem) -> Option<Matrix> {
    let m = Matrix::from_rows(&[c.to_vec(), u.to_vec()]).ok()?;
    let ann = kernel(k, &m);
    if ann.len() != 1 {
        return None;
    }
    let phi = &ann[0];
    let mut t = Matrix::identity(3);
    for i in 0..3 {
        for j in 0..3 {
            let x = k.add(t.get(i, j), k.mul(lambda, k.mul(c[i], phi[j])));
            t.set(i, j, x);
        }
    }
    Some(t)
}

/// Rejection-sampled valid instance.
pub fn random_instance<R: Rng + ?Sized>(k: &Field, rng: &mut R) -> WagnerInstance {
    let rv = |rng: &mut R| -> Vector { (0..3).map(|_| k.random(rng)).collect() };
    loop {
        let u = rv(rng);
        let cs = [rv(rng), rv(rng), rv(rng)];
        if is_zero_vec(&u) || cs.iter().any(|c| is_zero_vec(c)) {
            continue;
        }
        let ts: Option<Vec<Matrix>> = cs
            .iter()
            .map(|c| gl_transvection(k, c, &u, k.random_nonzero(rng)))
            .collect();
        let Some(ts) = ts else { continue };
        let inst = WagnerInstance::new(k, [ts[0].clone(), ts[1].clone(), ts[2].clone()], u);
        if inst.normalize().is_ok() {
            return inst;
        }
    }
}

/// Does ⟨T₁, T₂, T₃⟩ contain a transvection with centre `line`? Exhaustive;
/// `None` when the closure exceeds the cap.
pub fn closure_has_centre(inst: &WagnerInstance, line: &[Elem], cap: usize) -> Option<bool> {
    let k = &inst.field;
    let cl = closure_of(k, 3, &inst.transvections, cap, false);
    if cl.capped() {
        return None;
    }
    let found = cl.iter().any(|a| {
        let m = Matrix::from_flat(3, 3, a.to_vec());
        gl_transvection_centre(k, &m).as_deref() == Some(line)
    });
    Some(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(k: &Field, xs: &[i64]) -> Vector {
        xs.iter().map(|&x| k.from_int(x)).collect()
    }

    fn canonical(k: &Field, u3: &[i64]) -> WagnerInstance {
        let u = v(k, &[0, 0, 1]);
        let one = Elem::ONE;
        let ts = [
            gl_transvection(k, &v(k, &[1, 0, 0]), &u, one).unwrap(),
            gl_transvection(k, &v(k, &[0, 1, 0]), &u, one).unwrap(),
            gl_transvection(k, &v(k, u3), &u, one).unwrap(),
        ];
        WagnerInstance::new(k, ts, u)
    }

    #[test]
    fn line_examples() {
        let k = make_field(5, 1).unwrap();
        assert_eq!(wagner_line(&canonical(&k, &[2, 1, -1])).unwrap(), v(&k, &[1, 3, 0]));
        assert_eq!(wagner_line(&canonical(&k, &[0, 1, -1])).unwrap(), v(&k, &[0, 1, 0]));
        let bad = WagnerInstance::new(
            &k,
            canonical(&k, &[2, 1, -1]).transvections,
            v(&k, &[1, 1, 0]),
        );
        assert!(matches!(wagner_line(&bad), Err(WagnerError::HypothesisViolated(_))));
    }

    #[test]
    fn word_on_canonical_instance() {
        let k = make_field(5, 1).unwrap();
        let inst = canonical(&k, &[2, 1, -1]);
        let r = wagner_word(&inst, 1_000_000).unwrap();
        assert_eq!(r.k, 3);
        assert_eq!(r.line, v(&k, &[1, 3, 0]));
        assert_eq!(gl_transvection_centre(&k, &r.matrix), Some(r.line.clone()));
        assert_eq!(closure_has_centre(&inst, &r.line, 1_000_000), Some(true));
    }

    #[test]
    fn degenerate_third_centre() {
        let k = make_field(5, 1).unwrap();
        let inst = canonical(&k, &[1, 1, 0]);
        let r = wagner_word(&inst, 1_000_000).unwrap();
        assert_eq!(r.word, vec![(2, 1)]);
        assert_eq!(r.line, v(&k, &[1, 1, 0]));
    }

    #[test]
    fn swap_normalization() {
        let k = make_field(7, 1).unwrap();
        // U₃ ⊆ U₁ ⊕ U forces the interchange
        let inst = canonical(&k, &[1, 0, 1]);
        let r = wagner_word(&inst, 1_000_000).unwrap();
        assert_eq!(r.line, v(&k, &[1, 0, 0]));
    }

    #[test]
    fn random_instances_gf7() {
        let k = make_field(7, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let inst = random_instance(&k, &mut rng);
            let r = wagner_word(&inst, 1_000_000).unwrap();
            assert_eq!(r.line, wagner_line(&inst).unwrap());
        }
    }
}
