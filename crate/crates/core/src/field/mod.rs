//! Exact arithmetic in GF(ℓ^d).
//!
//! A [`Field`] is a cheap, shareable handle; its elements are stored as
//! [`Elem`], the integer `Σ cᵢ ℓⁱ` of the ascending coefficient vector
//! `(c₀, …, c_{d−1})` with respect to the generator `x` of `GF(ℓ)[x]/(f)`.
//! Kernels (matrices, closures) work on raw `Elem`s with the field passed
//! alongside; [`FieldElement`] pairs a value with its owner for the checked
//! public API.

mod additive;
pub(crate) mod gfp;
mod subfield;

pub use additive::AdditiveSubgroup;
pub use subfield::{in_subfield, subfields, SubfieldHandle};

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

/// Fields up to this order get full addition and multiplication tables.
const TABLE_LIMIT: u32 = 1024;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("GF({0}^{1}) exceeds the supported maximum of {MAX_ORDER} elements")]
    TooLarge(u32, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("{sub} does not divide the extension degree {degree}")]
    NotADivisor { sub: u32, degree: u32 },
    #[error("invalid element literal {0:?}")]
    InvalidLiteral(Vec<u32>),
}

/// Raw field element: the base-ℓ integer encoding of its coefficient vector.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Elem(pub u16);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct FieldData {
    characteristic: u32,
    degree: u32,
    order: u32,
    modulus: Vec<u32>,
    powers: Vec<u32>,
    add_table: Option<Vec<u16>>,
    mul_table: Option<Vec<u16>>,
    neg: Vec<u16>,
    exp: Vec<u16>,
    log: Vec<u32>,
    primitive: Elem,
    subfields: OnceLock<Vec<SubfieldHandle>>,
}

/// Handle to GF(ℓ^d) with a fixed modulus.
#[derive(Clone)]
pub struct Field(Arc<FieldData>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.characteristic == other.0.characteristic
                && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 1 {
            write!(f, "GF({})", self.characteristic())
        } else {
            write!(f, "GF({}^{})", self.characteristic(), self.degree())
        }
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2u32;
    while i * i <= n {
        if n % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut i = 2;
    while i * i <= n {
        if n % i == 0 {
            out.push(i);
            while n % i == 0 {
                n /= i;
            }
        }
        i += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Remainder of `a` modulo the monic polynomial `m` over GF(p), ascending coefficients.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = r.pop().unwrap();
        if lead != 0 {
            let shift = r.len() - dm;
            for (i, &c) in m[..dm].iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p - lead) * c % p) % p;
            }
        }
    }
    r
}

fn monic_from_index(mut t: u32, degree: u32, p: u32) -> Vec<u32> {
    let mut poly = Vec::with_capacity(degree as usize + 1);
    for _ in 0..degree {
        poly.push(t % p);
        t /= p;
    }
    poly.push(1);
    poly
}

/// Exhaustive irreducibility test: no monic factor of degree ≤ d/2.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let d = poly.len() as u32 - 1;
    for k in 1..=d / 2 {
        for t in 0..p.pow(k) {
            let f = monic_from_index(t, k, p);
            if poly_rem(poly, &f, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// The smallest monic irreducible polynomial of degree `d`, ordering candidates
/// by the base-p integer of their lower coefficients (constant term least
/// significant). For p = 5, d = 2 this gives x² + 2.
fn smallest_irreducible(p: u32, d: u32) -> Vec<u32> {
    (0..p.pow(d))
        .map(|t| monic_from_index(t, d, p))
        .find(|f| is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree")
}

struct Builder {
    p: u32,
    d: u32,
    modulus: Vec<u32>,
    powers: Vec<u32>,
}

impl Builder {
    fn digits(&self, a: u32) -> Vec<u32> {
        let mut a = a;
        (0..self.d)
            .map(|_| {
                let c = a % self.p;
                a /= self.p;
                c
            })
            .collect()
    }

    fn encode(&self, digits: &[u32]) -> u32 {
        digits.iter().zip(&self.powers).map(|(c, w)| c * w).sum()
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        let (da, db) = (self.digits(a), self.digits(b));
        let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.encode(&s)
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u32; 2 * self.d as usize];
        for (i, x) in da.iter().enumerate() {
            for (j, y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        let mut r = poly_rem(&prod, &self.modulus, self.p);
        r.resize(self.d as usize, 0);
        self.encode(&r)
    }

    fn pow(&self, a: u32, mut e: u64) -> u32 {
        let (mut base, mut acc) = (a, 1u32);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn build(self) -> FieldData {
        let q = self.p.pow(self.d);
        let group = q - 1;
        let factors = prime_factors(group);
        let primitive = (1..q)
            .find(|&g| factors.iter().all(|&r| self.pow(g, (group / r) as u64) != 1))
            .expect("multiplicative group is cyclic");
        let mut exp = Vec::with_capacity(2 * group as usize);
        let mut log = vec![0u32; q as usize];
        let mut cur = 1u32;
        for i in 0..group {
            exp.push(cur as u16);
            log[cur as usize] = i;
            cur = self.mul(cur, primitive);
        }
        for i in 0..group as usize {
            exp.push(exp[i]);
        }
        let neg: Vec<u16> = (0..q)
            .map(|a| {
                let d: Vec<u32> = self.digits(a).iter().map(|&c| (self.p - c) % self.p).collect();
                self.encode(&d) as u16
            })
            .collect();
        let (add_table, mul_table) = if q <= TABLE_LIMIT {
            let mut add = Vec::with_capacity((q * q) as usize);
            let mut mul = Vec::with_capacity((q * q) as usize);
            for a in 0..q {
                for b in 0..q {
                    add.push(self.add(a, b) as u16);
                    mul.push(if a == 0 || b == 0 {
                        0
                    } else {
                        exp[(log[a as usize] + log[b as usize]) as usize]
                    });
                }
            }
            (Some(add), Some(mul))
        } else {
            (None, None)
        };
        FieldData {
            characteristic: self.p,
            degree: self.d,
            order: q,
            modulus: self.modulus,
            powers: self.powers,
            add_table,
            mul_table,
            neg,
            exp,
            log,
            primitive: Elem(primitive as u16),
            subfields: OnceLock::new(),
        }
    }
}

fn registry() -> &'static Mutex<HashMap<(u32, u32), Field>> {
    static REG: OnceLock<Mutex<HashMap<(u32, u32), Field>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

/// GF(ℓ^d) with the smallest monic irreducible modulus (see
/// [`is_irreducible`]). Repeated calls return the same handle.
pub fn make_field(characteristic: u32, degree: u32) -> Result<Field, FieldError> {
    if !is_prime(characteristic) {
        return Err(FieldError::NotPrime(characteristic));
    }
    if degree == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let too_large = || FieldError::TooLarge(characteristic, degree);
    let order = characteristic.checked_pow(degree).ok_or_else(too_large)?;
    if order > MAX_ORDER {
        return Err(too_large());
    }
    let mut reg = registry().lock().unwrap_or_else(|e| e.into_inner());
    if let Some(f) = reg.get(&(characteristic, degree)) {
        return Ok(f.clone());
    }
    let modulus = smallest_irreducible(characteristic, degree);
    let powers = (0..degree).map(|i| characteristic.pow(i)).collect();
    let field = Field(Arc::new(
        Builder {
            p: characteristic,
            d: degree,
            modulus,
            powers,
        }
        .build(),
    ));
    reg.insert((characteristic, degree), field.clone());
    Ok(field)
}

impl Field {
    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.0.characteristic
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.0.degree
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.0.order
    }

    /// Ascending coefficients of the monic modulus (length d + 1).
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn primitive_element(&self) -> Elem {
        self.0.primitive
    }

    /// The class of `x` in GF(ℓ)[x]/(f).
    pub fn generator(&self) -> Elem {
        if self.degree() == 1 {
            // modulus is x itself
            Elem::ZERO
        } else {
            Elem(self.characteristic() as u16)
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.order()).map(|v| Elem(v as u16))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Elem> {
        (1..self.order()).map(|v| Elem(v as u16))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        Elem(rng.gen_range(0..self.order()) as u16)
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        Elem(rng.gen_range(1..self.order()) as u16)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.characteristic() as i64) as u16)
    }

    /// Element from ascending coefficients; shorter lists are zero-padded.
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Elem, FieldError> {
        if coeffs.len() > self.degree() as usize
            || coeffs.iter().any(|&c| c >= self.characteristic())
        {
            return Err(FieldError::InvalidLiteral(coeffs.to_vec()));
        }
        Ok(Elem(
            coeffs.iter().zip(&self.0.powers).map(|(c, w)| c * w).sum::<u32>() as u16,
        ))
    }

    /// Ascending coefficients, always of length d.
    pub fn coeffs(&self, a: Elem) -> Vec<u32> {
        let p = self.characteristic();
        let mut v = a.0 as u32;
        (0..self.degree())
            .map(|_| {
                let c = v % p;
                v /= p;
                c
            })
            .collect()
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let d = &self.0;
        if let Some(t) = &d.add_table {
            return Elem(t[a.index() * d.order as usize + b.index()]);
        }
        if d.degree == 1 {
            return Elem(((a.0 as u32 + b.0 as u32) % d.characteristic) as u16);
        }
        let p = d.characteristic;
        let (mut x, mut y, mut r) = (a.0 as u32, b.0 as u32, 0u32);
        for w in &d.powers {
            r += ((x % p + y % p) % p) * w;
            x /= p;
            y /= p;
        }
        Elem(r as u16)
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.0.neg[a.index()])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        let d = &self.0;
        if let Some(t) = &d.mul_table {
            return Elem(t[a.index() * d.order as usize + b.index()]);
        }
        if a.is_zero() || b.is_zero() {
            return Elem::ZERO;
        }
        Elem(d.exp[(d.log[a.index()] + d.log[b.index()]) as usize])
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a.is_zero() {
            return None;
        }
        let d = &self.0;
        let n = d.order - 1;
        Some(Elem(d.exp[((n - d.log[a.index()]) % n) as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, FieldError> {
        let bi = self.inv(b).ok_or(FieldError::DivisionByZero)?;
        Ok(self.mul(a, bi))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.is_zero() {
            return Elem::ZERO;
        }
        let d = &self.0;
        let n = (d.order - 1) as u64;
        Elem(d.exp[((d.log[a.index()] as u64 * (e % n)) % n) as usize])
    }

    /// Discrete logarithm to the base [`Field::primitive_element`].
    pub fn log(&self, a: Elem) -> Option<u32> {
        (!a.is_zero()).then(|| self.0.log[a.index()])
    }

    pub fn exp(&self, k: u32) -> Elem {
        Elem(self.0.exp[(k % (self.order() - 1)) as usize])
    }

    /// The Frobenius map a ↦ a^ℓ.
    pub fn frobenius(&self, a: Elem) -> Elem {
        self.pow(a, self.characteristic() as u64)
    }

    pub fn is_square(&self, a: Elem) -> bool {
        a.is_zero() || self.characteristic() == 2 || self.0.log[a.index()] % 2 == 0
    }

    /// One subfield handle per divisor of the degree, ascending.
    pub fn subfields(&self) -> &[SubfieldHandle] {
        self.0.subfields.get_or_init(|| {
            (1..=self.degree())
                .filter(|e| self.degree() % e == 0)
                .map(|e| SubfieldHandle::build(self, e))
                .collect()
        })
    }

    pub fn subfield(&self, degree: u32) -> Result<&SubfieldHandle, FieldError> {
        self.subfields()
            .iter()
            .find(|s| s.degree() == degree)
            .ok_or(FieldError::NotADivisor {
                sub: degree,
                degree: self.degree(),
            })
    }

    /// The subfield with exactly `order` elements, if any.
    pub fn subfield_of_order(&self, order: u64) -> Option<&SubfieldHandle> {
        self.subfields().iter().find(|s| s.order() as u64 == order)
    }

    pub fn prime_subfield(&self) -> &SubfieldHandle {
        &self.subfields()[0]
    }

    pub fn full_subfield(&self) -> &SubfieldHandle {
        self.subfields().last().expect("degree ≥ 1")
    }

    pub fn element(&self, value: Elem) -> FieldElement {
        FieldElement {
            field: self.clone(),
            value,
        }
    }
}

/// A field element together with its owner.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    value: Elem,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.field.coeffs(self.value))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl FieldElement {
    pub fn new(field: &Field, coeffs: &[u32]) -> Result<Self, FieldError> {
        Ok(field.element(field.from_coeffs(coeffs)?))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn value(&self) -> Elem {
        self.value
    }

    pub fn coeffs(&self) -> Vec<u32> {
        self.field.coeffs(self.value)
    }

    pub fn inverse(&self) -> Result<Self, FieldError> {
        let v = self.field.inv(self.value).ok_or(FieldError::DivisionByZero)?;
        Ok(self.field.element(v))
    }
}

/// Checked arithmetic; operands from different fields are rejected.
pub fn arith(a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement, FieldError> {
    if a.field != b.field {
        return Err(FieldError::FieldMismatch);
    }
    let k = &a.field;
    let v = match op {
        ArithOp::Add => k.add(a.value, b.value),
        ArithOp::Sub => k.sub(a.value, b.value),
        ArithOp::Mul => k.mul(a.value, b.value),
        ArithOp::Div => k.div(a.value, b.value)?,
    };
    Ok(k.element(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(k: &Field, c: &[u32]) -> FieldElement {
        FieldElement::new(k, c).unwrap()
    }

    #[test]
    fn prime_field_modulus_is_x() {
        let k = make_field(5, 1).unwrap();
        assert_eq!(k.order(), 5);
        assert_eq!(k.modulus(), &[0, 1]);
    }

    #[test]
    fn gf25_modulus_is_x2_plus_2() {
        let k = make_field(5, 2).unwrap();
        assert_eq!(k.modulus(), &[2, 0, 1]);
        // every smaller candidate has a root in GF(5)
        for t in 0..2 {
            let f = [t, 0, 1];
            assert!((0..5u32).any(|r| (r * r + t) % 5 == 0), "{f:?}");
        }
    }

    #[test]
    fn composite_characteristic_rejected() {
        assert_eq!(make_field(4, 2).unwrap_err(), FieldError::NotPrime(4));
        assert_eq!(make_field(1, 1).unwrap_err(), FieldError::NotPrime(1));
        assert!(matches!(make_field(5, 0), Err(FieldError::ZeroDegree)));
        assert!(matches!(make_field(7, 6), Err(FieldError::TooLarge(7, 6))));
    }

    #[test]
    fn small_prime_arithmetic() {
        let k = make_field(5, 1).unwrap();
        let s = arith(&el(&k, &[3]), &el(&k, &[4]), ArithOp::Add).unwrap();
        assert_eq!(s.coeffs(), vec![2]);
        assert_eq!(el(&k, &[2]).inverse().unwrap().coeffs(), vec![3]);
        let err = arith(&el(&k, &[2]), &el(&k, &[0]), ArithOp::Div).unwrap_err();
        assert_eq!(err, FieldError::DivisionByZero);
    }

    #[test]
    fn x_squared_in_gf25() {
        let k = make_field(5, 2).unwrap();
        let x = el(&k, &[0, 1]);
        let sq = arith(&x, &x, ArithOp::Mul).unwrap();
        assert_eq!(sq.coeffs(), vec![3, 0]);
    }

    #[test]
    fn cross_field_is_an_error() {
        let a = make_field(5, 1).unwrap();
        let b = make_field(7, 1).unwrap();
        let err = arith(&el(&a, &[1]), &el(&b, &[1]), ArithOp::Mul).unwrap_err();
        assert_eq!(err, FieldError::FieldMismatch);
    }

    #[test]
    fn prime_fields_match_integer_arithmetic() {
        for p in [2u32, 3, 5, 7] {
            let k = make_field(p, 1).unwrap();
            for a in 0..p {
                for b in 0..p {
                    let (x, y) = (Elem(a as u16), Elem(b as u16));
                    assert_eq!(k.add(x, y).0 as u32, (a + b) % p);
                    assert_eq!(k.sub(x, y).0 as u32, (a + p - b) % p);
                    assert_eq!(k.mul(x, y).0 as u32, (a * b) % p);
                    if b != 0 {
                        assert_eq!((k.div(x, y).unwrap().0 as u32 * b) % p, a);
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_has_order_dividing_degree() {
        for (p, d) in [(5, 2), (5, 4), (7, 2), (7, 4), (3, 3), (2, 8)] {
            let k = make_field(p, d).unwrap();
            for a in k.elements() {
                let mut b = a;
                for _ in 0..d {
                    b = k.frobenius(b);
                }
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn table_and_log_paths_agree() {
        // GF(3^7) is beyond the table limit; compare against schoolbook products.
        let k = make_field(3, 7).unwrap();
        let b = Builder {
            p: 3,
            d: 7,
            modulus: k.modulus().to_vec(),
            powers: (0..7).map(|i| 3u32.pow(i)).collect(),
        };
        for a in (0..k.order()).step_by(37) {
            for c in (0..k.order()).step_by(53) {
                let (x, y) = (Elem(a as u16), Elem(c as u16));
                assert_eq!(k.mul(x, y).0 as u32, b.mul(a, c));
                assert_eq!(k.add(x, y).0 as u32, b.add(a, c));
            }
        }
    }

    #[test]
    fn make_field_is_deterministic() {
        let a = make_field(7, 2).unwrap();
        let b = make_field(7, 2).unwrap();
        assert_eq!(a.modulus(), b.modulus());
        assert_eq!(a.modulus(), smallest_irreducible(7, 2).as_slice());
    }
}
