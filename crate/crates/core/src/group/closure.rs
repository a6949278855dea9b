//! Breadth-first enumeration of finite matrix groups.

use std::hash::{Hash, Hasher};

use hashbrown::HashTable;
use rustc_hash::FxHasher;

use crate::field::{Elem, Field};
use crate::linalg::{mul_into, Matrix};

const ROOT: u32 = u32::MAX;

fn hash_slice(s: &[Elem]) -> u64 {
    let mut h = FxHasher::default();
    s.hash(&mut h);
    h.finish()
}

/// Elements of ⟨generators⟩ in BFS order (identity first), stored in a flat
/// arena of n×n row-major blocks with a hash index over their entries.
pub struct ClosureResult {
    n: usize,
    arena: Vec<Elem>,
    index: HashTable<u32>,
    capped: bool,
    parents: Option<Vec<(u32, u32)>>,
}

impl std::fmt::Debug for ClosureResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClosureResult")
            .field("order", &self.order())
            .field("capped", &self.capped)
            .finish()
    }
}

impl ClosureResult {
    /// Number of elements found (the group order when not capped).
    pub fn order(&self) -> usize {
        self.arena.len() / (self.n * self.n)
    }

    pub fn capped(&self) -> bool {
        self.capped
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn raw(&self, i: usize) -> &[Elem] {
        let s = self.n * self.n;
        &self.arena[i * s..(i + 1) * s]
    }

    pub fn element(&self, i: usize) -> Matrix {
        Matrix::from_flat(self.n, self.n, self.raw(i).to_vec())
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Elem]> {
        self.arena.chunks(self.n * self.n)
    }

    pub fn index_of(&self, m: &Matrix) -> Option<usize> {
        if m.rows() != self.n || m.cols() != self.n {
            return None;
        }
        let s = m.as_slice();
        self.index
            .find(hash_slice(s), |&i| self.raw(i as usize) == s)
            .map(|&i| i as usize)
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        self.index_of(m).is_some()
    }

    /// Generator indices (g₁, …, g_r) with element i = g₁ ⋯ g_r, when words
    /// were recorded.
    pub fn word(&self, i: usize) -> Option<Vec<usize>> {
        let parents = self.parents.as_ref()?;
        let mut out = Vec::new();
        let mut cur = i as u32;
        while parents[cur as usize].0 != ROOT {
            let (p, g) = parents[cur as usize];
            out.push(g as usize);
            cur = p;
        }
        Some(out)
    }

    /// Largest power of ℓ dividing the order.
    pub fn sylow_order(&self, ell: u32) -> Result<u64, super::GroupError> {
        if self.capped {
            return Err(super::GroupError::CappedClosure);
        }
        Ok(ell_part(self.order() as u64, ell))
    }
}

pub fn ell_part(mut order: u64, ell: u32) -> u64 {
    let mut p = 1;
    while order % ell as u64 == 0 {
        order /= ell as u64;
        p *= ell as u64;
    }
    p
}

/// BFS over left multiplication by the generators. `capped` is set (and the
/// search stops) as soon as more than `cap` elements would be needed.
pub fn closure_of(k: &Field, n: usize, gens: &[Matrix], cap: usize, words: bool) -> ClosureResult {
    let s = n * n;
    let mut res = ClosureResult {
        n,
        arena: Vec::with_capacity(s * cap.min(1 << 16)),
        index: HashTable::new(),
        capped: false,
        parents: words.then(Vec::new),
    };
    let id = Matrix::identity(n);
    res.arena.extend_from_slice(id.as_slice());
    res.index.insert_unique(hash_slice(id.as_slice()), 0, |_| 0);
    if let Some(p) = res.parents.as_mut() {
        p.push((ROOT, 0));
    }
    if cap == 0 {
        res.capped = true;
        return res;
    }
    let mut scratch = vec![Elem::ZERO; s];
    let mut head = 0usize;
    while head < res.order() {
        for (gi, g) in gens.iter().enumerate() {
            mul_into(k, g.as_slice(), &res.arena[head * s..(head + 1) * s], n, n, n, &mut scratch);
            let h = hash_slice(&scratch);
            let arena = &res.arena;
            if res
                .index
                .find(h, |&i| &arena[i as usize * s..(i as usize + 1) * s] == scratch.as_slice())
                .is_some()
            {
                continue;
            }
            if res.order() >= cap {
                res.capped = true;
                return res;
            }
            let idx = res.order() as u32;
            res.arena.extend_from_slice(&scratch);
            let arena = &res.arena;
            res.index.insert_unique(h, idx, |&i| {
                hash_slice(&arena[i as usize * s..(i as usize + 1) * s])
            });
            if let Some(p) = res.parents.as_mut() {
                p.push((head as u32, gi as u32));
            }
        }
        head += 1;
    }
    res
}
