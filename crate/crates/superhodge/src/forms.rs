//! The de Rham algebra on a single chart.
//!
//! Generators: functions, `dx` for even coordinates, `dθ` for odd ones.
//! Bidegrees `(cohomological degree, parity)`: `dx` is `(1, even)`, `dθ` is
//! `(1, odd)`, and two homogeneous elements commute up to
//! `(−1)^{deg·deg + par·par}`. Consequently the `dx` generate an exterior
//! part while the `dθ` generate a symmetric part, so the complex is
//! unbounded in degree as soon as there are odd coordinates. The de Rham
//! differential is even and satisfies `d(fg) = (df)g + (−1)^{deg f} f(dg)`.
//!
//! A monomial is stored in the canonical word order
//! `[even part]·[θ's ascending]·[dx's ascending]·[dθ multidegree]` with the
//! sorting sign absorbed into the coefficient.

use crate::ring::{odd_merge_sign, ChartSignature, RingMap, SuperMonomial, SuperPolynomial, Substituter};
use crate::scalar::{FieldSpec, Scalar};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Basis monomial of the form algebra.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FormMonomial {
    pub func: SuperMonomial,
    pub dx_mask: u32,
    pub dtheta: Vec<u16>,
}

impl FormMonomial {
    pub fn from_function(func: SuperMonomial, m: usize) -> Self {
        FormMonomial {
            func,
            dx_mask: 0,
            dtheta: vec![0; m],
        }
    }

    pub fn degree(&self) -> u32 {
        self.dx_mask.count_ones() + self.dtheta.iter().map(|&k| k as u32).sum::<u32>()
    }

    pub fn dtheta_degree(&self) -> u32 {
        self.dtheta.iter().map(|&k| k as u32).sum()
    }

    pub fn parity(&self) -> u8 {
        ((self.func.odd_degree() + self.dtheta_degree()) % 2) as u8
    }

    /// Total number of odd symbols (θ's plus dθ's); filtration level by the
    /// ideal of odd functions.
    pub fn odd_content(&self) -> u32 {
        self.func.odd_degree() + self.dtheta_degree()
    }

    /// Product with sign; `None` when a θ or dx repeats.
    pub fn wedge(&self, other: &FormMonomial) -> Option<(FormMonomial, i32)> {
        let theta_sign = odd_merge_sign(self.func.odd_mask, other.func.odd_mask)?;
        let dx_sign = odd_merge_sign(self.dx_mask, other.dx_mask)?;
        let mut sign = theta_sign * dx_sign;
        let dtheta_a = self.dtheta_degree();
        // θ's of `other` cross the dθ word of `self` (anticommute), dx's of
        // `other` likewise; everything else commutes.
        if (other.func.odd_degree() * dtheta_a) % 2 == 1 {
            sign = -sign;
        }
        if (other.dx_mask.count_ones() * dtheta_a) % 2 == 1 {
            sign = -sign;
        }
        let (func, fsign) = self.func.mul(&other.func)?;
        debug_assert_eq!(fsign, theta_sign);
        let dtheta = self
            .dtheta
            .iter()
            .zip(&other.dtheta)
            .map(|(a, b)| a + b)
            .collect();
        Some((
            FormMonomial {
                func,
                dx_mask: self.dx_mask | other.dx_mask,
                dtheta,
            },
            sign,
        ))
    }
}

/// A form on a chart: finite sum of [`FormMonomial`] with exact coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FormElement {
    pub sig: Arc<ChartSignature>,
    pub field: FieldSpec,
    pub terms: BTreeMap<FormMonomial, Scalar>,
}

impl FormElement {
    pub fn zero(sig: Arc<ChartSignature>, field: FieldSpec) -> Self {
        FormElement {
            sig,
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_polynomial(p: &SuperPolynomial) -> Self {
        let m = p.sig.m();
        let mut out = FormElement::zero(p.sig.clone(), p.field);
        for (mono, c) in &p.terms {
            out.add_term(FormMonomial::from_function(mono.clone(), m), c.clone());
        }
        out
    }

    pub fn monomial(sig: Arc<ChartSignature>, field: FieldSpec, m: FormMonomial, c: Scalar) -> Self {
        let mut out = FormElement::zero(sig, field);
        out.add_term(m, c);
        out
    }

    /// The 1-form `d(x_i)`.
    pub fn dx(sig: Arc<ChartSignature>, field: FieldSpec, i: usize) -> Self {
        let m = FormMonomial {
            func: SuperMonomial::one(sig.n()),
            dx_mask: 1 << i,
            dtheta: vec![0; sig.m()],
        };
        Self::monomial(sig, field, m, field.one())
    }

    /// The 1-form `d(θ_j)`.
    pub fn dtheta(sig: Arc<ChartSignature>, field: FieldSpec, j: usize) -> Self {
        let mut dtheta = vec![0; sig.m()];
        dtheta[j] = 1;
        let m = FormMonomial {
            func: SuperMonomial::one(sig.n()),
            dx_mask: 0,
            dtheta,
        };
        Self::monomial(sig, field, m, field.one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: FormMonomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
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

    pub fn add(&self, other: &FormElement) -> FormElement {
        assert_eq!(*self.sig, *other.sig, "signature mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> FormElement {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &FormElement) -> FormElement {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> FormElement {
        let mut out = FormElement::zero(self.sig.clone(), self.field);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a.mul(c));
        }
        out
    }

    pub fn wedge(&self, other: &FormElement) -> FormElement {
        assert_eq!(*self.sig, *other.sig, "signature mismatch");
        let mut out = FormElement::zero(self.sig.clone(), self.field);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, sign)) = ma.wedge(mb) {
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

    /// Cohomological degree when homogeneous.
    pub fn degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.degree());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn parity(&self) -> Option<u8> {
        let mut it = self.terms.keys().map(|m| m.parity());
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    /// De Rham differential: degree +1, parity preserved.
    pub fn d(&self) -> FormElement {
        let mut out = FormElement::zero(self.sig.clone(), self.field);
        for (m, c) in &self.terms {
            // even part: e·x^{e−1} dx, with dx entering the dx word from the left
            for (i, &e) in m.func.even_exps.iter().enumerate() {
                if e == 0 || m.dx_mask & (1 << i) != 0 {
                    continue; // exponent zero, or dx_i ∧ dx_i = 0
                }
                let mut func = m.func.clone();
                func.even_exps[i] -= 1;
                let crossings = (m.dx_mask & ((1u32 << i) - 1)).count_ones();
                let mut coeff = c.mul(&self.field.from_i64(e as i64));
                if crossings % 2 == 1 {
                    coeff = coeff.neg();
                }
                out.add_term(
                    FormMonomial {
                        func,
                        dx_mask: m.dx_mask | (1 << i),
                        dtheta: m.dtheta.clone(),
                    },
                    coeff,
                );
            }
            // odd part: θ_j ↦ dθ_j, moved right past later θ's and all dx's
            let mut mask = m.func.odd_mask;
            while mask != 0 {
                let j = mask.trailing_zeros();
                mask &= mask - 1;
                let later = (m.func.odd_mask >> (j + 1)).count_ones();
                let crossings = later + m.dx_mask.count_ones();
                let mut func = m.func.clone();
                func.odd_mask &= !(1 << j);
                let mut dtheta = m.dtheta.clone();
                dtheta[j as usize] += 1;
                let mut coeff = c.clone();
                if crossings % 2 == 1 {
                    coeff = coeff.neg();
                }
                out.add_term(
                    FormMonomial {
                        func,
                        dx_mask: m.dx_mask,
                        dtheta,
                    },
                    coeff,
                );
            }
        }
        out
    }

    /// Restriction of coefficients into a larger localization of the same chart.
    pub fn relocalize(&self, sig: Arc<ChartSignature>) -> FormElement {
        debug_assert_eq!(sig.even_names, self.sig.even_names);
        FormElement {
            sig,
            field: self.field,
            terms: self.terms.clone(),
        }
    }
}

impl fmt::Display for FormElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::parse::write_form(f, self)
    }
}

/// Pullback engine along a ring map, with the differentials of coordinate
/// images and the powers of even images cached.
pub struct FormPullback {
    map: RingMap,
    subst: Substituter,
    d_even: Vec<FormElement>,
    d_odd: Vec<FormElement>,
}

impl FormPullback {
    pub fn new(map: &RingMap) -> Self {
        let d_even = map
            .even_images
            .iter()
            .map(|p| FormElement::from_polynomial(p).d())
            .collect();
        let d_odd = map
            .odd_images
            .iter()
            .map(|p| FormElement::from_polynomial(p).d())
            .collect();
        FormPullback {
            subst: Substituter::new(map),
            map: map.clone(),
            d_even,
            d_odd,
        }
    }

    pub fn owned(map: RingMap) -> Self {
        Self::new(&map)
    }

    /// Algebra homomorphism commuting with `d`: functions substitute,
    /// `dx ↦ d(image)`, `dθ ↦ d(image)`.
    pub fn apply(&mut self, form: &FormElement) -> FormElement {
        assert_eq!(*form.sig, *self.map.source, "signature mismatch");
        let mut out = FormElement::zero(self.map.target.clone(), self.map.field);
        for (m, c) in &form.terms {
            let func = SuperPolynomial::monomial(
                form.sig.clone(),
                form.field,
                m.func.clone(),
                c.clone(),
            );
            let mut acc = FormElement::from_polynomial(&self.subst.substitute(&func));
            let mut dx = m.dx_mask;
            while dx != 0 {
                let i = dx.trailing_zeros() as usize;
                dx &= dx - 1;
                acc = acc.wedge(&self.d_even[i]);
            }
            for (j, &k) in m.dtheta.iter().enumerate() {
                for _ in 0..k {
                    acc = acc.wedge(&self.d_odd[j]);
                }
            }
            out = out.add(&acc);
        }
        out
    }
}

pub fn pullback_form(map: &RingMap, form: &FormElement) -> FormElement {
    FormPullback::new(map).apply(form)
}

#[derive(Debug, thiserror::Error)]
pub enum FormError {
    #[error("vector field coefficient for {0} has inconsistent parity")]
    VectorFieldParity(String),
    #[error("field does not act diagonally on monomial {0}")]
    NotDiagonal(String),
}

/// A vector field with a definite parity: `Σ aᵢ ∂xᵢ + Σ bⱼ ∂θⱼ` where the
/// `aᵢ` carry the field's parity and the `bⱼ` the opposite one.
#[derive(Clone, Debug)]
pub struct VectorField {
    pub sig: Arc<ChartSignature>,
    pub field: FieldSpec,
    pub parity: u8,
    pub even_coeffs: Vec<SuperPolynomial>,
    pub odd_coeffs: Vec<SuperPolynomial>,
}

impl VectorField {
    pub fn new(
        sig: Arc<ChartSignature>,
        field: FieldSpec,
        parity: u8,
        even_coeffs: Vec<SuperPolynomial>,
        odd_coeffs: Vec<SuperPolynomial>,
    ) -> Result<Self, FormError> {
        for (i, c) in even_coeffs.iter().enumerate() {
            if !c.is_zero() && c.parity() != Some(parity) {
                return Err(FormError::VectorFieldParity(sig.even_names[i].clone()));
            }
        }
        for (j, c) in odd_coeffs.iter().enumerate() {
            if !c.is_zero() && c.parity() != Some((parity + 1) % 2) {
                return Err(FormError::VectorFieldParity(sig.odd_names[j].clone()));
            }
        }
        Ok(VectorField {
            sig,
            field,
            parity,
            even_coeffs,
            odd_coeffs,
        })
    }

    /// The Euler field `Σ θⱼ ∂θⱼ` grading by odd weight.
    pub fn euler(sig: Arc<ChartSignature>, field: FieldSpec) -> Self {
        let even_coeffs = (0..sig.n())
            .map(|_| SuperPolynomial::zero(sig.clone(), field))
            .collect();
        let odd_coeffs = (0..sig.m())
            .map(|j| SuperPolynomial::odd_coordinate(sig.clone(), field, j))
            .collect();
        VectorField {
            sig,
            field,
            parity: 0,
            even_coeffs,
            odd_coeffs,
        }
    }

    /// The derivation applied to a function: `i_v(df)`.
    pub fn apply(&self, f: &SuperPolynomial) -> SuperPolynomial {
        let df = FormElement::from_polynomial(f).d();
        let contracted = contract(self, &df);
        let mut out = SuperPolynomial::zero(f.sig.clone(), f.field);
        for (m, c) in &contracted.terms {
            debug_assert_eq!(m.degree(), 0);
            out.add_term(m.func.clone(), c.clone());
        }
        out
    }
}

/// Contraction `i_v`: the bigraded antiderivation of degree −1 with
/// `i_v(dx_i) = v(x_i)`, `i_v(dθ_j) = v(θ_j)`, `i_v(f) = 0`.
pub fn contract(v: &VectorField, form: &FormElement) -> FormElement {
    assert_eq!(*v.sig, *form.sig, "signature mismatch");
    let sig = form.sig.clone();
    let field = form.field;
    let m_odd = sig.m();
    let mut out = FormElement::zero(sig.clone(), field);
    for (mono, coeff) in &form.terms {
        let theta_parity = (mono.func.odd_degree() % 2) as u8;
        // dx slots
        let mut dx = mono.dx_mask;
        while dx != 0 {
            let i = dx.trailing_zeros();
            dx &= dx - 1;
            if v.even_coeffs[i as usize].is_zero() {
                continue;
            }
            let deg_prefix = (mono.dx_mask & ((1u32 << i) - 1)).count_ones();
            let sign_neg = (deg_prefix + (v.parity as u32) * (theta_parity as u32)) % 2 == 1;
            let prefix = FormMonomial {
                func: mono.func.clone(),
                dx_mask: mono.dx_mask & ((1u32 << i) - 1),
                dtheta: vec![0; m_odd],
            };
            let suffix = FormMonomial {
                func: SuperMonomial::one(sig.n()),
                dx_mask: mono.dx_mask & !((1u32 << (i + 1)) - 1),
                dtheta: mono.dtheta.clone(),
            };
            let mut c = coeff.clone();
            if sign_neg {
                c = c.neg();
            }
            let piece = FormElement::monomial(sig.clone(), field, prefix, c)
                .wedge(&FormElement::from_polynomial(&v.even_coeffs[i as usize]))
                .wedge(&FormElement::monomial(sig.clone(), field, suffix, field.one()));
            out = out.add(&piece);
        }
        // dθ slots, one per multiplicity
        for j in 0..m_odd {
            let mult = mono.dtheta[j];
            if mult == 0 || v.odd_coeffs[j].is_zero() {
                continue;
            }
            let before: u32 = mono.dtheta[..j].iter().map(|&k| k as u32).sum();
            for t in 0..mult {
                let deg_prefix = mono.dx_mask.count_ones() + before + t as u32;
                let par_prefix = ((mono.func.odd_degree() + before + t as u32) % 2) as u8;
                let sign_neg =
                    (deg_prefix + (v.parity as u32) * (par_prefix as u32)) % 2 == 1;
                let mut prefix_dtheta = vec![0u16; m_odd];
                prefix_dtheta[..j].copy_from_slice(&mono.dtheta[..j]);
                prefix_dtheta[j] = t;
                let prefix = FormMonomial {
                    func: mono.func.clone(),
                    dx_mask: mono.dx_mask,
                    dtheta: prefix_dtheta,
                };
                let mut suffix_dtheta = vec![0u16; m_odd];
                suffix_dtheta[j] = mult - 1 - t;
                suffix_dtheta[j + 1..].copy_from_slice(&mono.dtheta[j + 1..]);
                let suffix = FormMonomial {
                    func: SuperMonomial::one(sig.n()),
                    dx_mask: 0,
                    dtheta: suffix_dtheta,
                };
                let mut c = coeff.clone();
                if sign_neg {
                    c = c.neg();
                }
                let piece = FormElement::monomial(sig.clone(), field, prefix, c)
                    .wedge(&FormElement::from_polynomial(&v.odd_coeffs[j]))
                    .wedge(&FormElement::monomial(sig.clone(), field, suffix, field.one()));
                out = out.add(&piece);
            }
        }
    }
    out
}

/// Lie derivative by Cartan's formula `L_v = d ∘ i_v + i_v ∘ d`.
pub fn lie_derivative(v: &VectorField, form: &FormElement) -> FormElement {
    contract(v, &form.d()).add(&contract(v, form).d())
}

/// Splits a form into eigencomponents of `L_ξ`; fails unless `ξ` acts
/// diagonally on every monomial.
pub fn weight_split(
    form: &FormElement,
    xi: &VectorField,
) -> Result<BTreeMap<i64, FormElement>, FormError> {
    let mut out: BTreeMap<i64, FormElement> = BTreeMap::new();
    for (mono, coeff) in &form.terms {
        let single = FormElement::monomial(form.sig.clone(), form.field, mono.clone(), coeff.clone());
        let image = lie_derivative(xi, &single);
        let weight = if image.is_zero() {
            0i64
        } else {
            if image.terms.len() != 1 {
                return Err(FormError::NotDiagonal(format!("{single}")));
            }
            let (im, ic) = image.terms.iter().next().unwrap();
            if im != mono {
                return Err(FormError::NotDiagonal(format!("{single}")));
            }
            let ratio = ic.div(coeff);
            scalar_to_integer(&ratio).ok_or_else(|| FormError::NotDiagonal(format!("{single}")))?
        };
        out.entry(weight)
            .or_insert_with(|| FormElement::zero(form.sig.clone(), form.field))
            .add_term(mono.clone(), coeff.clone());
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

fn scalar_to_integer(s: &Scalar) -> Option<i64> {
    match s {
        Scalar::Rational(r) => {
            use num_traits::ToPrimitive;
            r.is_integer().then(|| r.numer().to_i64())?
        }
        Scalar::ModP { value, .. } => Some(*value as i64),
    }
}

/// Per-coordinate exponent bounds defining a finite Laurent window.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExponentWindow {
    pub bounds: Vec<(i32, i32)>,
}

impl ExponentWindow {
    /// `[−n, n]` on inverted coordinates, `[0, n]` elsewhere.
    pub fn symmetric(sig: &ChartSignature, n: i32) -> Self {
        ExponentWindow {
            bounds: (0..sig.n())
                .map(|i| {
                    if sig.inverted.contains(&i) {
                        (-n, n)
                    } else {
                        (0, n)
                    }
                })
                .collect(),
        }
    }

    pub fn contains(&self, mono: &SuperMonomial) -> bool {
        mono.even_exps
            .iter()
            .zip(&self.bounds)
            .all(|(&e, &(lo, hi))| e >= lo && e <= hi)
    }
}

/// Deterministic, sorted, duplicate-free basis of the degree-`p` forms whose
/// even exponents lie in the window.
pub fn form_basis(sig: &Arc<ChartSignature>, p: u32, window: &ExponentWindow) -> Vec<FormMonomial> {
    let n = sig.n();
    let m = sig.m();
    let mut shapes: Vec<(u32, Vec<u16>)> = Vec::new();
    for dx_mask in 0..(1u32 << n) {
        let k = dx_mask.count_ones();
        if k > p {
            continue;
        }
        for dtheta in compositions(p - k, m) {
            shapes.push((dx_mask, dtheta));
        }
    }
    let mut funcs: Vec<SuperMonomial> = Vec::new();
    let mut exps = vec![0i32; n];
    enumerate_exponents(&mut exps, 0, window, &mut |e| {
        for odd_mask in 0..(1u32 << m) {
            funcs.push(SuperMonomial {
                even_exps: e.to_vec(),
                odd_mask,
            });
        }
    });
    let mut out: Vec<FormMonomial> = Vec::with_capacity(shapes.len() * funcs.len());
    for func in &funcs {
        for (dx_mask, dtheta) in &shapes {
            out.push(FormMonomial {
                func: func.clone(),
                dx_mask: *dx_mask,
                dtheta: dtheta.clone(),
            });
        }
    }
    out.sort();
    out.dedup();
    out
}

fn enumerate_exponents(
    exps: &mut Vec<i32>,
    i: usize,
    window: &ExponentWindow,
    f: &mut impl FnMut(&[i32]),
) {
    if i == exps.len() {
        f(exps);
        return;
    }
    let (lo, hi) = window.bounds[i];
    for e in lo..=hi {
        exps[i] = e;
        enumerate_exponents(exps, i + 1, window, f);
    }
}

/// All length-`m` vectors of nonnegative integers summing to `total`.
pub fn compositions(total: u32, m: usize) -> Vec<Vec<u16>> {
    if m == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, m - 1) {
            let mut v = vec![first as u16];
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::Rational
    }

    fn sig_1_2_loc() -> Arc<ChartSignature> {
        ChartSignature::new(vec!["z"], vec!["t1", "t2"]).localized([0])
    }

    #[test]
    fn wedge_sign_table() {
        let sig = ChartSignature::new(vec!["x", "y"], vec!["t1", "t2"]);
        let dx = FormElement::dx(sig.clone(), q(), 0);
        let dy = FormElement::dx(sig.clone(), q(), 1);
        let dt = FormElement::dtheta(sig.clone(), q(), 0);
        let du = FormElement::dtheta(sig.clone(), q(), 1);
        // dx ∧ dx = 0
        assert!(dx.wedge(&dx).is_zero());
        // dx anticommute
        assert_eq!(dx.wedge(&dy), dy.wedge(&dx).neg());
        // dθ ∧ dθ ≠ 0 and symmetric
        assert!(!dt.wedge(&dt).is_zero());
        assert_eq!(dt.wedge(&du), du.wedge(&dt));
        // dx ∧ dθ + dθ ∧ dx = 0
        assert!(dx.wedge(&dt).add(&dt.wedge(&dx)).is_zero());
        // θ and dθ anticommute
        let t1 = FormElement::from_polynomial(&SuperPolynomial::odd_coordinate(
            sig.clone(),
            q(),
            0,
        ));
        assert!(t1.wedge(&dt).add(&dt.wedge(&t1)).is_zero());
    }

    #[test]
    fn d_on_laurent() {
        let sig = sig_1_2_loc();
        let z = SuperPolynomial::even_coordinate(sig.clone(), q(), 0);
        let zinv = FormElement::from_polynomial(&z.invert().unwrap());
        // d(z⁻¹) = −z⁻² dz
        let d = zinv.d();
        assert_eq!(d.terms.len(), 1);
        let (m, c) = d.terms.iter().next().unwrap();
        assert_eq!(m.func.even_exps, vec![-2]);
        assert_eq!(m.dx_mask, 1);
        assert_eq!(c, &q().from_i64(-1));
    }

    #[test]
    fn d_theta_product() {
        let sig = sig_1_2_loc();
        let t1 = SuperPolynomial::odd_coordinate(sig.clone(), q(), 0);
        let t2 = SuperPolynomial::odd_coordinate(sig.clone(), q(), 1);
        let f = FormElement::from_polynomial(&t1.mul(&t2));
        // d(θ₁θ₂) = −θ₂dθ₁ + θ₁dθ₂
        let d = f.d();
        let t1f = FormElement::from_polynomial(&t1);
        let t2f = FormElement::from_polynomial(&t2);
        let dt1 = FormElement::dtheta(sig.clone(), q(), 0);
        let dt2 = FormElement::dtheta(sig.clone(), q(), 1);
        let expected = t2f.wedge(&dt1).neg().add(&t1f.wedge(&dt2));
        assert_eq!(d, expected);
        assert!(d.d().is_zero());
    }

    #[test]
    fn pullback_chain_rule() {
        // pullback of dz along z ↦ 1/w is −w⁻²dw
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
        let dz = FormElement::dx(src.clone(), q(), 0);
        let result = pullback_form(&map, &dz);
        let expected = FormElement::from_polynomial(&w_inv.mul(&w_inv))
            .wedge(&FormElement::dx(tgt.clone(), q(), 0))
            .neg();
        assert_eq!(result, expected);
        // pullback of dθ along θ ↦ η/w: w⁻¹dη − η·w⁻²dw
        let dt = FormElement::dtheta(src.clone(), q(), 0);
        let result = pullback_form(&map, &dt);
        let deta = FormElement::dtheta(tgt.clone(), q(), 0);
        let dw = FormElement::dx(tgt.clone(), q(), 0);
        let expected = FormElement::from_polynomial(&w_inv)
            .wedge(&deta)
            .sub(
                &FormElement::from_polynomial(&eta.mul(&w_inv).mul(&w_inv)).wedge(&dw),
            );
        assert_eq!(result, expected);
        // pullback along the identity is the identity
        let id = RingMap::identity(src.clone(), q());
        let f = dz.wedge(&dt).add(&FormElement::from_polynomial(
            &SuperPolynomial::even_coordinate(src.clone(), q(), 0),
        ));
        assert_eq!(pullback_form(&id, &f), f);
    }

    #[test]
    fn contraction_euler() {
        let sig = sig_1_2_loc();
        let xi = VectorField::euler(sig.clone(), q());
        let dt1 = FormElement::dtheta(sig.clone(), q(), 0);
        let t1 = FormElement::from_polynomial(&SuperPolynomial::odd_coordinate(sig.clone(), q(), 0));
        let t2 = FormElement::from_polynomial(&SuperPolynomial::odd_coordinate(sig.clone(), q(), 1));
        // i_ξ(dθ₁) = θ₁, i_ξ(dz) = 0
        assert_eq!(contract(&xi, &dt1), t1);
        assert!(contract(&xi, &FormElement::dx(sig.clone(), q(), 0)).is_zero());
        // i_ξ(θ₁dθ₂) = θ₁θ₂
        let dt2 = FormElement::dtheta(sig.clone(), q(), 1);
        assert_eq!(contract(&xi, &t1.wedge(&dt2)), t1.wedge(&t2));
    }

    #[test]
    fn lie_derivative_weights() {
        let sig = sig_1_2_loc();
        let xi = VectorField::euler(sig.clone(), q());
        let t1 = FormElement::from_polynomial(&SuperPolynomial::odd_coordinate(sig.clone(), q(), 0));
        let z = FormElement::from_polynomial(&SuperPolynomial::even_coordinate(sig.clone(), q(), 0));
        let dt2 = FormElement::dtheta(sig.clone(), q(), 1);
        // L_ξ(θ₁) = θ₁, L_ξ(z) = 0, L_ξ(θ₁dθ₂) = 2θ₁dθ₂
        assert_eq!(lie_derivative(&xi, &t1), t1);
        assert!(lie_derivative(&xi, &z).is_zero());
        let f = t1.wedge(&dt2);
        assert_eq!(lie_derivative(&xi, &f), f.scale(&q().from_i64(2)));
        // weight split: θ₁ + z → {0: z, 1: θ₁}
        let split = weight_split(&t1.add(&z), &xi).unwrap();
        assert_eq!(split.len(), 2);
        assert_eq!(split[&0], z);
        assert_eq!(split[&1], t1);
        // z·dz sits in weight 0
        let zdz = z.wedge(&FormElement::dx(sig.clone(), q(), 0));
        let split = weight_split(&zdz, &xi).unwrap();
        assert_eq!(split.len(), 1);
        assert!(split.contains_key(&0));
    }

    #[test]
    fn basis_counts() {
        // sig (1|1), p = 2, window 0..0: 4 monomials
        let sig = ChartSignature::new(vec!["z"], vec!["t"]);
        let w = ExponentWindow { bounds: vec![(0, 0)] };
        assert_eq!(form_basis(&sig, 2, &w).len(), 4);
        // p = 0: function monomials only
        assert_eq!(form_basis(&sig, 0, &w).len(), 2);
        // purely even (1|0), p = 2: empty
        let even = ChartSignature::new(vec!["z"], Vec::<&str>::new());
        assert!(form_basis(&even, 2, &w).is_empty());
    }

    #[test]
    fn cartan_homotopy_on_weight_pieces() {
        // (d i_ξ + i_ξ d)(η) = i·η for η of weight i, here up to weight 3
        let sig = sig_1_2_loc();
        let xi = VectorField::euler(sig.clone(), q());
        let w = ExponentWindow::symmetric(&sig, 1);
        for p in 0..=3u32 {
            for mono in form_basis(&sig, p, &w) {
                let f = FormElement::monomial(sig.clone(), q(), mono.clone(), q().one());
                let weight = (mono.func.odd_degree() + mono.dtheta_degree()) as i64;
                if weight > 3 {
                    continue;
                }
                let lhs = lie_derivative(&xi, &f);
                assert_eq!(lhs, f.scale(&q().from_i64(weight)), "monomial {f}");
            }
        }
    }
}
