//! The local function algebra of a chart: supercommutative Laurent
//! polynomials in even coordinates tensored with an exterior algebra in odd
//! coordinates, plus ring homomorphisms between charts (transition maps).

use crate::scalar::{FieldSpec, Scalar};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Coordinate system of one chart: `n` even names, `m` odd names, and the
/// subset of even coordinates that may carry negative exponents (the overlap
/// localization).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChartSignature {
    pub even_names: Vec<String>,
    pub odd_names: Vec<String>,
    pub inverted: BTreeSet<usize>,
}

impl ChartSignature {
    pub fn new<S: Into<String>>(even: Vec<S>, odd: Vec<S>) -> Arc<Self> {
        let even_names: Vec<String> = even.into_iter().map(Into::into).collect();
        let odd_names: Vec<String> = odd.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for n in even_names.iter().chain(odd_names.iter()) {
            assert!(seen.insert(n.clone()), "duplicate coordinate name {n}");
        }
        Arc::new(ChartSignature {
            even_names,
            odd_names,
            inverted: BTreeSet::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.even_names.len()
    }

    pub fn m(&self) -> usize {
        self.odd_names.len()
    }

    /// Same chart with additional even coordinates invertible.
    pub fn localized(self: &Arc<Self>, extra: impl IntoIterator<Item = usize>) -> Arc<Self> {
        let mut sig = (**self).clone();
        sig.inverted.extend(extra);
        assert!(sig.inverted.iter().all(|&i| i < sig.even_names.len()));
        Arc::new(sig)
    }

    pub fn allows(&self, mono: &SuperMonomial) -> bool {
        mono.even_exps.len() == self.n()
            && mono.odd_mask >> self.m() == 0
            && mono
                .even_exps
                .iter()
                .enumerate()
                .all(|(i, &e)| e >= 0 || self.inverted.contains(&i))
    }

    pub fn even_index(&self, name: &str) -> Option<usize> {
        self.even_names.iter().position(|n| n == name)
    }

    pub fn odd_index(&self, name: &str) -> Option<usize> {
        self.odd_names.iter().position(|n| n == name)
    }

    /// The purely even signature underlying this one.
    pub fn bosonized(&self) -> Arc<ChartSignature> {
        Arc::new(ChartSignature {
            even_names: self.even_names.clone(),
            odd_names: Vec::new(),
            inverted: self.inverted.clone(),
        })
    }
}

/// Koszul sign for merging two ascending odd-index words; `None` if they
/// share an index (θ² = 0).
pub fn odd_merge_sign(a: u32, b: u32) -> Option<i32> {
    if a & b != 0 {
        return None;
    }
    let mut inversions = 0u32;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        inversions += (a >> (j + 1)).count_ones();
        bb &= bb - 1;
    }
    Some(if inversions % 2 == 0 { 1 } else { -1 })
}

/// A monomial: integer exponents on even coordinates (negative only where
/// inverted) and an ascending subset of odd coordinates as a bitmask.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SuperMonomial {
    pub even_exps: Vec<i32>,
    pub odd_mask: u32,
}

impl SuperMonomial {
    pub fn one(n: usize) -> Self {
        SuperMonomial {
            even_exps: vec![0; n],
            odd_mask: 0,
        }
    }

    pub fn parity(&self) -> u8 {
        (self.odd_mask.count_ones() % 2) as u8
    }

    pub fn odd_degree(&self) -> u32 {
        self.odd_mask.count_ones()
    }

    /// Product with the supercommutative sign; `None` if an odd index repeats.
    pub fn mul(&self, other: &SuperMonomial) -> Option<(SuperMonomial, i32)> {
        let sign = odd_merge_sign(self.odd_mask, other.odd_mask)?;
        let even_exps = self
            .even_exps
            .iter()
            .zip(&other.even_exps)
            .map(|(a, b)| a + b)
            .collect();
        Some((
            SuperMonomial {
                even_exps,
                odd_mask: self.odd_mask | other.odd_mask,
            },
            sign,
        ))
    }
}

/// A finite sum of monomials with exact coefficients, attached to a chart.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SuperPolynomial {
    pub sig: Arc<ChartSignature>,
    pub field: FieldSpec,
    pub terms: BTreeMap<SuperMonomial, Scalar>,
}

impl SuperPolynomial {
    pub fn zero(sig: Arc<ChartSignature>, field: FieldSpec) -> Self {
        SuperPolynomial {
            sig,
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(sig: Arc<ChartSignature>, field: FieldSpec, c: Scalar) -> Self {
        let mut p = Self::zero(sig, field);
        p.add_term(SuperMonomial::one(p.sig.n()), c);
        p
    }

    pub fn one(sig: Arc<ChartSignature>, field: FieldSpec) -> Self {
        let one = field.one();
        Self::constant(sig, field, one)
    }

    pub fn even_coordinate(sig: Arc<ChartSignature>, field: FieldSpec, i: usize) -> Self {
        let mut m = SuperMonomial::one(sig.n());
        m.even_exps[i] = 1;
        let mut p = Self::zero(sig, field);
        p.add_term(m, field.one());
        p
    }

    pub fn odd_coordinate(sig: Arc<ChartSignature>, field: FieldSpec, j: usize) -> Self {
        let m = SuperMonomial {
            even_exps: vec![0; sig.n()],
            odd_mask: 1 << j,
        };
        let mut p = Self::zero(sig, field);
        p.add_term(m, field.one());
        p
    }

    pub fn monomial(sig: Arc<ChartSignature>, field: FieldSpec, m: SuperMonomial, c: Scalar) -> Self {
        debug_assert!(sig.allows(&m), "monomial violates signature");
        let mut p = Self::zero(sig, field);
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: SuperMonomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        debug_assert!(self.sig.allows(&m), "monomial violates signature");
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &SuperPolynomial) -> SuperPolynomial {
        assert_eq!(*self.sig, *other.sig, "signature mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> SuperPolynomial {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &SuperPolynomial) -> SuperPolynomial {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> SuperPolynomial {
        let mut out = Self::zero(self.sig.clone(), self.field);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a.mul(c));
        }
        out
    }

    pub fn mul(&self, other: &SuperPolynomial) -> SuperPolynomial {
        assert_eq!(*self.sig, *other.sig, "signature mismatch");
        let mut out = Self::zero(self.sig.clone(), self.field);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, sign)) = ma.mul(mb) {
                    let mut c = ca.mul(cb);
                    if sign < 0 {
                        c = c.neg();
                    }
                    out.add_term(m, c);
                }
            }
        }
        out
    }

    /// `(even part, odd part)` by the number of odd factors mod 2.
    pub fn decompose_parity(&self) -> (SuperPolynomial, SuperPolynomial) {
        let mut even = Self::zero(self.sig.clone(), self.field);
        let mut odd = Self::zero(self.sig.clone(), self.field);
        for (m, c) in &self.terms {
            if m.parity() == 0 {
                even.add_term(m.clone(), c.clone());
            } else {
                odd.add_term(m.clone(), c.clone());
            }
        }
        (even, odd)
    }

    /// `Some(0)` or `Some(1)` when homogeneous, `None` otherwise.
    pub fn parity(&self) -> Option<u8> {
        let mut it = self.terms.keys().map(|m| m.parity());
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    /// All terms contain at least one odd factor.
    pub fn is_nilpotent(&self) -> bool {
        self.terms.keys().all(|m| m.odd_mask != 0)
    }

    /// Terms with no odd factor.
    pub fn body(&self) -> SuperPolynomial {
        let mut out = Self::zero(self.sig.clone(), self.field);
        for (m, c) in &self.terms {
            if m.odd_mask == 0 {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// Inverse of a unit `c·m·(1 + ν)` with `ν` nilpotent; the geometric
    /// series terminates by nilpotence. `None` when not a unit.
    pub fn invert(&self) -> Option<SuperPolynomial> {
        let body = self.body();
        if body.terms.len() != 1 {
            return None;
        }
        let (mono, coeff) = body.terms.iter().next().unwrap();
        // the body monomial must be invertible in the localization
        for (i, &e) in mono.even_exps.iter().enumerate() {
            if e != 0 && !self.sig.inverted.contains(&i) {
                return None;
            }
        }
        let mono_inv = SuperMonomial {
            even_exps: mono.even_exps.iter().map(|e| -e).collect(),
            odd_mask: 0,
        };
        let lead_inv = SuperPolynomial::monomial(
            self.sig.clone(),
            self.field,
            mono_inv,
            coeff.inverse()?,
        );
        // ν = u·lead_inv − 1, nilpotent
        let one = SuperPolynomial::one(self.sig.clone(), self.field);
        let nu = self.mul(&lead_inv).sub(&one);
        debug_assert!(nu.is_nilpotent());
        let mut sum = one.clone();
        let mut pow = one;
        let neg_nu = nu.neg();
        for _ in 0..=self.sig.m() {
            pow = pow.mul(&neg_nu);
            if pow.is_zero() {
                break;
            }
            sum = sum.add(&pow);
        }
        Some(sum.mul(&lead_inv))
    }

    pub fn pow(&self, e: i32) -> Option<SuperPolynomial> {
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut acc = SuperPolynomial::one(self.sig.clone(), self.field);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Some(acc)
    }

    /// Reduction mod the ideal of odd functions, re-expressed in the
    /// bosonized signature.
    pub fn bosonize(&self, target: &Arc<ChartSignature>) -> SuperPolynomial {
        let mut out = SuperPolynomial::zero(target.clone(), self.field);
        for (m, c) in &self.terms {
            if m.odd_mask == 0 {
                out.add_term(
                    SuperMonomial {
                        even_exps: m.even_exps.clone(),
                        odd_mask: 0,
                    },
                    c.clone(),
                );
            }
        }
        out
    }
}

impl fmt::Display for SuperPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::parse::write_polynomial(f, self)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RingError {
    #[error("image of inverted coordinate {0} is not a unit")]
    NotAUnit(String),
    #[error("ring map image has wrong parity for coordinate {0}")]
    ParityViolation(String),
    #[error("signature mismatch")]
    SignatureMismatch,
}

/// A parity-preserving ring homomorphism between chart algebras, given by
/// the images of the source coordinates.
#[derive(Clone, PartialEq, Debug)]
pub struct RingMap {
    pub source: Arc<ChartSignature>,
    pub target: Arc<ChartSignature>,
    pub field: FieldSpec,
    pub even_images: Vec<SuperPolynomial>,
    pub odd_images: Vec<SuperPolynomial>,
}

impl RingMap {
    pub fn identity(sig: Arc<ChartSignature>, field: FieldSpec) -> Self {
        RingMap {
            even_images: (0..sig.n())
                .map(|i| SuperPolynomial::even_coordinate(sig.clone(), field, i))
                .collect(),
            odd_images: (0..sig.m())
                .map(|j| SuperPolynomial::odd_coordinate(sig.clone(), field, j))
                .collect(),
            source: sig.clone(),
            target: sig,
            field,
        }
    }

    pub fn new(
        source: Arc<ChartSignature>,
        target: Arc<ChartSignature>,
        field: FieldSpec,
        even_images: Vec<SuperPolynomial>,
        odd_images: Vec<SuperPolynomial>,
    ) -> Result<Self, RingError> {
        let map = RingMap {
            source,
            target,
            field,
            even_images,
            odd_images,
        };
        map.validate()?;
        Ok(map)
    }

    pub fn validate(&self) -> Result<(), RingError> {
        for (i, img) in self.even_images.iter().enumerate() {
            if *img.sig != *self.target {
                return Err(RingError::SignatureMismatch);
            }
            if !img.is_zero() && img.parity() != Some(0) {
                return Err(RingError::ParityViolation(self.source.even_names[i].clone()));
            }
        }
        for (j, img) in self.odd_images.iter().enumerate() {
            if *img.sig != *self.target {
                return Err(RingError::SignatureMismatch);
            }
            if !img.is_zero() && img.parity() != Some(1) {
                return Err(RingError::ParityViolation(self.source.odd_names[j].clone()));
            }
        }
        for &i in &self.source.inverted {
            if self.even_images[i].invert().is_none() {
                return Err(RingError::NotAUnit(self.source.even_names[i].clone()));
            }
        }
        Ok(())
    }

    /// Same map with a localized source (and the unit condition rechecked).
    pub fn with_localized_source(
        &self,
        source: Arc<ChartSignature>,
    ) -> Result<RingMap, RingError> {
        debug_assert_eq!(source.even_names, self.source.even_names);
        debug_assert_eq!(source.odd_names, self.source.odd_names);
        RingMap::new(
            source,
            self.target.clone(),
            self.field,
            self.even_images.clone(),
            self.odd_images.clone(),
        )
    }

    /// Same map with a further-localized target signature.
    pub fn with_localized_target(&self, target: &Arc<ChartSignature>) -> RingMap {
        debug_assert_eq!(target.even_names, self.target.even_names);
        let relocate = |p: &SuperPolynomial| SuperPolynomial {
            sig: target.clone(),
            field: p.field,
            terms: p.terms.clone(),
        };
        RingMap {
            source: self.source.clone(),
            target: target.clone(),
            field: self.field,
            even_images: self.even_images.iter().map(relocate).collect(),
            odd_images: self.odd_images.iter().map(relocate).collect(),
        }
    }

    /// The ring-homomorphism image of `f`.
    pub fn substitute(&self, f: &SuperPolynomial) -> SuperPolynomial {
        let mut cache = Substituter::new(self);
        cache.substitute(f)
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &RingMap) -> RingMap {
        assert_eq!(*self.source, *other.target, "composition mismatch");
        RingMap {
            source: other.source.clone(),
            target: self.target.clone(),
            field: self.field,
            even_images: other.even_images.iter().map(|p| self.substitute(p)).collect(),
            odd_images: other.odd_images.iter().map(|p| self.substitute(p)).collect(),
        }
    }

    /// The induced map between bosonized charts.
    pub fn bosonize(
        &self,
        source: &Arc<ChartSignature>,
        target: &Arc<ChartSignature>,
    ) -> RingMap {
        RingMap {
            source: source.clone(),
            target: target.clone(),
            field: self.field,
            even_images: self
                .even_images
                .iter()
                .map(|p| p.bosonize(target))
                .collect(),
            odd_images: Vec::new(),
        }
    }
}

/// Substitution engine with cached powers of coordinate images.
pub struct Substituter {
    map: RingMap,
    even_pows: Vec<std::collections::HashMap<i32, SuperPolynomial>>,
}

impl Substituter {
    pub fn new(map: &RingMap) -> Self {
        Substituter {
            even_pows: vec![std::collections::HashMap::new(); map.source.n()],
            map: map.clone(),
        }
    }

    fn even_power(&mut self, i: usize, e: i32) -> SuperPolynomial {
        if let Some(p) = self.even_pows[i].get(&e) {
            return p.clone();
        }
        let p = self.map.even_images[i]
            .pow(e)
            .unwrap_or_else(|| panic!("image of {} is not a unit", self.map.source.even_names[i]));
        self.even_pows[i].insert(e, p.clone());
        p
    }

    pub fn substitute(&mut self, f: &SuperPolynomial) -> SuperPolynomial {
        assert_eq!(*f.sig, *self.map.source, "signature mismatch");
        let mut out = SuperPolynomial::zero(self.map.target.clone(), self.map.field);
        for (m, c) in &f.terms {
            let mut acc =
                SuperPolynomial::constant(self.map.target.clone(), self.map.field, c.clone());
            for (i, &e) in m.even_exps.iter().enumerate() {
                if e != 0 {
                    acc = acc.mul(&self.even_power(i, e));
                }
            }
            let mut mask = m.odd_mask;
            while mask != 0 {
                let j = mask.trailing_zeros() as usize;
                acc = acc.mul(&self.map.odd_images[j]);
                mask &= mask - 1;
            }
            out = out.add(&acc);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::Rational
    }

    fn sig_1_2() -> Arc<ChartSignature> {
        ChartSignature::new(vec!["z"], vec!["t1", "t2"])
    }

    #[test]
    fn multiply_examples() {
        let sig = sig_1_2();
        let z = SuperPolynomial::even_coordinate(sig.clone(), q(), 0);
        let t1 = SuperPolynomial::odd_coordinate(sig.clone(), q(), 0);
        let t2 = SuperPolynomial::odd_coordinate(sig.clone(), q(), 1);
        // (z + t1 t2) * t1 = z t1
        let f = z.add(&t1.mul(&t2));
        assert_eq!(f.mul(&t1), z.mul(&t1));
        // t2 * t1 = - t1 t2
        assert_eq!(t2.mul(&t1), t1.mul(&t2).neg());
        // (1 + t1 t2)(1 - t1 t2) = 1
        let one = SuperPolynomial::one(sig.clone(), q());
        let u = one.add(&t1.mul(&t2));
        let v = one.sub(&t1.mul(&t2));
        assert_eq!(u.mul(&v), one);
    }

    #[test]
    fn parity_decomposition() {
        let sig = sig_1_2();
        let z = SuperPolynomial::even_coordinate(sig.clone(), q(), 0);
        let t1 = SuperPolynomial::odd_coordinate(sig.clone(), q(), 0);
        let f = z.add(&t1);
        let (even, odd) = f.decompose_parity();
        assert_eq!(even, z);
        assert_eq!(odd, t1);
        let tt = t1.mul(&SuperPolynomial::odd_coordinate(sig.clone(), q(), 1));
        let (even, odd) = tt.decompose_parity();
        assert_eq!(even, tt);
        assert!(odd.is_zero());
    }

    #[test]
    fn unit_inverse() {
        let sig = ChartSignature::new(vec!["z"], vec!["t1", "t2"]).localized([0]);
        let z = SuperPolynomial::even_coordinate(sig.clone(), q(), 0);
        let t1 = SuperPolynomial::odd_coordinate(sig.clone(), q(), 0);
        let t2 = SuperPolynomial::odd_coordinate(sig.clone(), q(), 1);
        let u = z.add(&t1.mul(&t2));
        let inv = u.invert().unwrap();
        assert_eq!(u.mul(&inv), SuperPolynomial::one(sig.clone(), q()));
        // z + t1 is odd-inhomogeneous but still a unit; 1 + z is not
        let one = SuperPolynomial::one(sig.clone(), q());
        assert!(z.add(&t1).invert().is_some());
        assert!(one.add(&z).invert().is_none());
    }

    #[test]
    fn projective_superspace_substitution() {
        // ℙ^{1|1} transition: z ↦ 1/w, θ ↦ η/w
        let src = ChartSignature::new(vec!["z"], vec!["t"]);
        let tgt = ChartSignature::new(vec!["w"], vec!["e"]).localized([0]);
        let w_inv = SuperPolynomial::even_coordinate(tgt.clone(), q(), 0)
            .invert()
            .unwrap();
        let eta = SuperPolynomial::odd_coordinate(tgt.clone(), q(), 0);
        let map = RingMap::new(
            src.clone(),
            tgt.clone(),
            q(),
            vec![w_inv.clone()],
            vec![eta.mul(&w_inv)],
        )
        .unwrap();
        // z² ↦ w⁻²
        let z = SuperPolynomial::even_coordinate(src.clone(), q(), 0);
        assert_eq!(map.substitute(&z.mul(&z)), w_inv.mul(&w_inv));
        // zθ ↦ η·w⁻²
        let t = SuperPolynomial::odd_coordinate(src.clone(), q(), 0);
        assert_eq!(
            map.substitute(&z.mul(&t)),
            eta.mul(&w_inv).mul(&w_inv)
        );
    }

    #[test]
    fn glued_cocycle_automorphism() {
        // α(f) = f + v(f) with v = z⁻¹ t1t2 ∂_z: α(z) = z + z⁻¹ t1 t2
        let sig = ChartSignature::new(vec!["z"], vec!["t1", "t2"]).localized([0]);
        let z = SuperPolynomial::even_coordinate(sig.clone(), q(), 0);
        let t1 = SuperPolynomial::odd_coordinate(sig.clone(), q(), 0);
        let t2 = SuperPolynomial::odd_coordinate(sig.clone(), q(), 1);
        let zinv = z.invert().unwrap();
        let alpha = RingMap::new(
            sig.clone(),
            sig.clone(),
            q(),
            vec![z.add(&zinv.mul(&t1).mul(&t2))],
            vec![t1.clone(), t2.clone()],
        )
        .unwrap();
        assert_eq!(alpha.substitute(&z), z.add(&zinv.mul(&t1).mul(&t2)));
        // multiplicativity survives the nilpotent correction
        let f = z.mul(&z).add(&t1);
        let g = zinv.add(&t2);
        assert_eq!(
            alpha.substitute(&f.mul(&g)),
            alpha.substitute(&f).mul(&alpha.substitute(&g))
        );
    }

    #[test]
    fn identity_substitution() {
        let sig = sig_1_2().localized([0]);
        let id = RingMap::identity(sig.clone(), q());
        let z = SuperPolynomial::even_coordinate(sig.clone(), q(), 0);
        let t1 = SuperPolynomial::odd_coordinate(sig.clone(), q(), 0);
        let f = z.invert().unwrap().add(&t1.scale(&q().from_i64(3)));
        assert_eq!(id.substitute(&f), f);
    }

    #[test]
    fn nilpotency_of_odd_products() {
        let sig = sig_1_2();
        let t1 = SuperPolynomial::odd_coordinate(sig.clone(), q(), 0);
        let t2 = SuperPolynomial::odd_coordinate(sig.clone(), q(), 1);
        let nu = t1.add(&t2);
        // m+1 = 3 odd factors always vanish
        assert!(nu.mul(&nu).mul(&nu).is_zero());
    }
}
