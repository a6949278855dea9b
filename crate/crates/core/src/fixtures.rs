//! Seeded test instances with known classification, built by named recipes.
//!
//! Each [`Recipe`] constructs generators whose case is known by construction;
//! [`generate_instance`] picks the default recipe for a case and conjugates
//! the result by a random similitude.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classifier::standard_generators;
use crate::field::{Elem, Field, FieldError, SubfieldHandle};
use crate::group::{GroupError, GroupSpec};
use crate::linalg::{self, unit_vector, Matrix, Vector};
use crate::symplectic::SymplecticSpace;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FixtureError {
    #[error("inconsistent parameters: {0}")]
    InconsistentParameters(String),
    #[error("unknown recipe {0:?}")]
    UnknownRecipe(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

fn inconsistent(msg: impl Into<String>) -> FixtureError {
    FixtureError::InconsistentParameters(msg.into())
}

#[derive(Debug, Clone)]
pub struct FixtureParams {
    pub field: Field,
    pub n: usize,
    /// Degree of L over GF(ℓ).
    pub subfield_degree: u32,
    /// Block dimension for imprimitive recipes.
    pub block_dim: usize,
}

impl FixtureParams {
    pub fn new(field: &Field, n: usize, subfield_degree: u32) -> Self {
        FixtureParams {
            field: field.clone(),
            n,
            subfield_degree,
            block_dim: 2,
        }
    }

    fn subfield(&self) -> Result<&SubfieldHandle, FixtureError> {
        Ok(self.field.subfield(self.subfield_degree)?)
    }

    fn space(&self) -> Result<SymplecticSpace, FixtureError> {
        SymplecticSpace::standard(&self.field, self.n).map_err(|e| inconsistent(e.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub group: GroupSpec,
    pub recipe: String,
    /// 1 reducible, 2 imprimitive, 3 conjugate of Sp_n(L).
    pub case: u8,
    pub subfield_degree: u32,
    /// Similitude the recipe output was conjugated by, if any.
    pub conjugator: Option<Matrix>,
    pub log: Vec<String>,
}

pub trait Recipe: Send + Sync {
    fn name(&self) -> &'static str;
    fn case(&self) -> u8;
    fn description(&self) -> &'static str;
    /// Generators in the standard space, before any random conjugation.
    fn build(&self, p: &FixtureParams, rng: &mut ChaCha8Rng) -> Result<Vec<Matrix>, FixtureError>;
}

fn standard_matrices(space: &SymplecticSpace, l: &SubfieldHandle) -> Vec<Matrix> {
    standard_generators(space, l).iter().map(|t| t.matrix(space)).collect()
}

fn diag_similitude(n: usize, alpha: Elem) -> Matrix {
    let g = n / 2;
    let d: Vec<Elem> = (0..n).map(|i| if i < g { Elem::ONE } else { alpha }).collect();
    Matrix::diagonal(&d)
}

/// Transvections with random directions in the Lagrangian ⟨e₁, …, e_g⟩ and
/// random parameters in L, plus diag(1, …, 1, α, …, α).
struct IsotropicSpan;

impl Recipe for IsotropicSpan {
    fn name(&self) -> &'static str {
        "isotropic-span"
    }
    fn case(&self) -> u8 {
        1
    }
    fn description(&self) -> &'static str {
        "transvections centred in a Lagrangian subspace plus a diagonal similitude"
    }
    fn build(&self, p: &FixtureParams, rng: &mut ChaCha8Rng) -> Result<Vec<Matrix>, FixtureError> {
        let space = p.space()?;
        let k = &p.field;
        let l = p.subfield()?;
        let g = p.n / 2;
        let lel = l.nonzero_elements();
        let mut out = Vec::new();
        while out.len() < g + 1 {
            let mut v = vec![Elem::ZERO; p.n];
            for x in v.iter_mut().take(g) {
                *x = k.random(rng);
            }
            if linalg::is_zero_vec(&v) {
                continue;
            }
            out.push(space.transvection_matrix(&v, lel[rng.gen_range(0..lel.len())]));
        }
        out.push(diag_similitude(p.n, k.random_nonzero(rng)));
        Ok(out)
    }
}

/// Sp₂(L) on the hyperbolic plane ⟨e₁, f₁⟩, trivial on its complement.
struct FixedPlane;

impl Recipe for FixedPlane {
    fn name(&self) -> &'static str {
        "fixed-plane"
    }
    fn case(&self) -> u8 {
        1
    }
    fn description(&self) -> &'static str {
        "Sp_2(L) on one hyperbolic plane, identity on the complement"
    }
    fn build(&self, p: &FixtureParams, _rng: &mut ChaCha8Rng) -> Result<Vec<Matrix>, FixtureError> {
        if p.n < 4 {
            return Err(inconsistent("a proper nondegenerate block needs n ≥ 4"));
        }
        let space = p.space()?;
        let k = &p.field;
        let l = p.subfield()?;
        let g = p.n / 2;
        let (e, f) = (unit_vector(p.n, 0), unit_vector(p.n, g));
        let mut out = Vec::new();
        for &b in l.basis() {
            out.push(space.transvection_matrix(&e, b));
            out.push(space.transvection_matrix(&f, b));
        }
        out.push(space.transvection_matrix(&linalg::vec_add(k, &e, &f), Elem::ONE));
        Ok(out)
    }
}

/// Sp_m(L) on the first of n/m orthogonal blocks plus a similitude cycling
/// the blocks.
struct BlockCycle;

impl Recipe for BlockCycle {
    fn name(&self) -> &'static str {
        "block-cycle"
    }
    fn case(&self) -> u8 {
        2
    }
    fn description(&self) -> &'static str {
        "Sp_m(L) on one block plus a block-cycling permutation"
    }
    fn build(&self, p: &FixtureParams, _rng: &mut ChaCha8Rng) -> Result<Vec<Matrix>, FixtureError> {
        let (n, m) = (p.n, p.block_dim);
        if m == 0 || m % 2 != 0 || m >= n || n % m != 0 {
            return Err(inconsistent(format!(
                "blocks of dimension {m} do not give a proper even decomposition of dimension {n}"
            )));
        }
        let space = p.space()?;
        let k = &p.field;
        let l = p.subfield()?;
        let (g, h, gm) = (n / 2, n / m, m / 2);
        // block j = ⟨e_{j·gm + i}, f_{j·gm + i} : i < gm⟩
        let embed = |x: &[Elem]| -> Vector {
            let mut v = vec![Elem::ZERO; n];
            for i in 0..gm {
                v[i] = x[i];
                v[g + i] = x[gm + i];
            }
            v
        };
        let block_space = SymplecticSpace::standard(k, m).unwrap();
        let mut out: Vec<Matrix> = standard_generators(&block_space, l)
            .iter()
            .map(|t| space.transvection_matrix(&embed(t.direction().unwrap()), t.parameter()))
            .collect();
        let mut cycle = Matrix::zero(n, n);
        for i in 0..g {
            let j = (i + gm) % g;
            cycle.set(j, i, Elem::ONE);
            cycle.set(g + j, g + i, Elem::ONE);
        }
        debug_assert!(h >= 2);
        out.push(cycle);
        Ok(out)
    }
}

/// The standard transvection generators of Sp_n(L).
struct StandardSp;

impl Recipe for StandardSp {
    fn name(&self) -> &'static str {
        "standard-sp"
    }
    fn case(&self) -> u8 {
        3
    }
    fn description(&self) -> &'static str {
        "standard transvection generators of Sp_n(L)"
    }
    fn build(&self, p: &FixtureParams, _rng: &mut ChaCha8Rng) -> Result<Vec<Matrix>, FixtureError> {
        Ok(standard_matrices(&p.space()?, p.subfield()?))
    }
}

/// Sp_n(L) together with diag(1, …, 1, α, …, α) for random α ∈ L^×, which
/// normalises it.
struct SpWithSimilitude;

impl Recipe for SpWithSimilitude {
    fn name(&self) -> &'static str {
        "sp-with-similitude"
    }
    fn case(&self) -> u8 {
        3
    }
    fn description(&self) -> &'static str {
        "Sp_n(L) plus a diagonal similitude with multiplier in L"
    }
    fn build(&self, p: &FixtureParams, rng: &mut ChaCha8Rng) -> Result<Vec<Matrix>, FixtureError> {
        let l = p.subfield()?;
        let mut out = standard_matrices(&p.space()?, l);
        let lel = l.nonzero_elements();
        out.push(diag_similitude(p.n, lel[rng.gen_range(0..lel.len())]));
        Ok(out)
    }
}

pub struct RecipeRegistry {
    recipes: Vec<Box<dyn Recipe>>,
}

impl Default for RecipeRegistry {
    fn default() -> Self {
        let mut r = RecipeRegistry { recipes: Vec::new() };
        r.register(Box::new(IsotropicSpan));
        r.register(Box::new(FixedPlane));
        r.register(Box::new(BlockCycle));
        r.register(Box::new(StandardSp));
        r.register(Box::new(SpWithSimilitude));
        r
    }
}

impl RecipeRegistry {
    pub fn register(&mut self, recipe: Box<dyn Recipe>) {
        self.recipes.retain(|r| r.name() != recipe.name());
        self.recipes.push(recipe);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Recipe> {
        self.recipes.iter().find(|r| r.name() == name).map(|r| r.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.recipes.iter().map(|r| r.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Recipe> {
        self.recipes.iter().map(|r| r.as_ref())
    }

    /// The first registered recipe for a case.
    pub fn default_for(&self, case: u8) -> Option<&dyn Recipe> {
        self.iter().find(|r| r.case() == case)
    }

    /// Runs a recipe; with `conjugate`, the output is replaced by A G A⁻¹
    /// for a random similitude A.
    pub fn build(
        &self,
        name: &str,
        p: &FixtureParams,
        seed: u64,
        conjugate: bool,
    ) -> Result<Fixture, FixtureError> {
        let recipe = self
            .get(name)
            .ok_or_else(|| FixtureError::UnknownRecipe(name.to_string()))?;
        if p.field.characteristic() < 5 {
            return Err(inconsistent("characteristic must be at least 5"));
        }
        if p.n == 0 || p.n % 2 != 0 {
            return Err(inconsistent(format!("dimension {} is not a positive even number", p.n)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens = recipe.build(p, &mut rng)?;
        let space = p.space()?;
        let mut log = vec![format!(
            "recipe {} over GF({}^{}), n = {}, L = GF({}^{}), seed {}: {} generators",
            recipe.name(),
            p.field.characteristic(),
            p.field.degree(),
            p.n,
            p.field.characteristic(),
            p.subfield_degree,
            seed,
            gens.len()
        )];
        let mut group = GroupSpec::new(space.clone(), gens)?;
        let mut conjugator = None;
        if conjugate {
            let a = random_similitude(&space, &mut rng);
            log.push(format!(
                "conjugated by a random similitude with multiplier {:?} (coefficients)",
                p.field.coeffs(space.multiplier(&a).unwrap())
            ));
            group = group.conjugated(&a)?;
            conjugator = Some(a);
        }
        Ok(Fixture {
            group,
            recipe: recipe.name().to_string(),
            case: recipe.case(),
            subfield_degree: p.subfield_degree,
            conjugator,
            log,
        })
    }
}

/// A product of 2n random transvections over K and diag(1, …, 1, α, …, α).
pub fn random_similitude<R: Rng + ?Sized>(space: &SymplecticSpace, rng: &mut R) -> Matrix {
    let k = space.field();
    let n = space.dim();
    let mut a = diag_similitude(n, k.random_nonzero(rng));
    for _ in 0..2 * n {
        let v: Vector = (0..n).map(|_| k.random(rng)).collect();
        if linalg::is_zero_vec(&v) {
            continue;
        }
        a = space.transvection_matrix(&v, k.random_nonzero(rng)).mul(k, &a);
    }
    a
}

/// Default recipe for `case`, conjugated by a random similitude.
pub fn generate_instance(case: u8, k: &Field, n: usize, l_degree: u32, seed: u64) -> Result<Fixture, FixtureError> {
    let reg = RecipeRegistry::default();
    let recipe = reg
        .default_for(case)
        .ok_or_else(|| inconsistent(format!("no case {case}")))?;
    reg.build(recipe.name(), &FixtureParams::new(k, n, l_degree), seed, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    #[test]
    fn registry_lookup() {
        let reg = RecipeRegistry::default();
        assert_eq!(
            reg.names(),
            ["isotropic-span", "fixed-plane", "block-cycle", "standard-sp", "sp-with-similitude"]
        );
        assert_eq!(reg.default_for(2).unwrap().name(), "block-cycle");
        let k = make_field(5, 1).unwrap();
        assert!(matches!(
            reg.build("nope", &FixtureParams::new(&k, 2, 1), 0, false),
            Err(FixtureError::UnknownRecipe(_))
        ));
    }

    #[test]
    fn case3_over_gf25() {
        let k = make_field(5, 2).unwrap();
        let reg = RecipeRegistry::default();
        let f = reg.build("standard-sp", &FixtureParams::new(&k, 2, 1), 7, false).unwrap();
        // T_{e₁}[1], T_{f₁}[1], T_{e₁+f₁}[1]
        assert_eq!(f.group.generators().len(), 3);
        let c = generate_instance(3, &k, 2, 1, 7).unwrap();
        assert!(c.conjugator.is_some());
        assert_eq!(c.group.generators().len(), 3);
    }

    #[test]
    fn case2_needs_room() {
        let k = make_field(5, 1).unwrap();
        assert!(matches!(
            generate_instance(2, &k, 2, 1, 0),
            Err(FixtureError::InconsistentParameters(_))
        ));
        let f = generate_instance(2, &k, 4, 1, 0).unwrap();
        assert_eq!(f.case, 2);
    }

    #[test]
    fn case1_span_is_isotropic() {
        let k = make_field(7, 1).unwrap();
        let reg = RecipeRegistry::default();
        let f = reg.build("isotropic-span", &FixtureParams::new(&k, 4, 1), 3, false).unwrap();
        let s = f.group.space();
        for t in f.group.transvection_generators() {
            let v = t.direction().unwrap();
            assert!(v[2].is_zero() && v[3].is_zero());
            assert!(s.form(v, &unit_vector(4, 0)).is_zero());
        }
    }

    #[test]
    fn similitudes_are_similitudes() {
        let k = make_field(7, 2).unwrap();
        let s = SymplecticSpace::standard(&k, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            assert!(s.multiplier(&random_similitude(&s, &mut rng)).is_ok());
        }
    }

    #[test]
    fn deterministic() {
        let k = make_field(7, 2).unwrap();
        let a = generate_instance(3, &k, 4, 1, 11).unwrap();
        let b = generate_instance(3, &k, 4, 1, 11).unwrap();
        assert_eq!(a.group.generators(), b.group.generators());
    }
}
