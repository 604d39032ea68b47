//! Koszul complexes, the odd-content filtration of the form algebra, and the
//! twist operator on `V ⊗ Λ²V`.
//!
//! The weight-`k` Koszul complex of a `w`-dimensional space is
//! `Λᵏ → Λᵏ⁻¹⊗S¹ → … → Λ⁰⊗Sᵏ` with the contraction differential; its
//! positive-weight pieces are exact, which is what makes the kernel of the
//! reduction `Ω•_X → Ω•_{X₀}` acyclic chart by chart.

use crate::forms::{form_basis, ExponentWindow, FormElement, FormMonomial};
use crate::linalg::Matrix;
use crate::ring::ChartSignature;
use crate::scalar::FieldSpec;
use itertools::Itertools;
use std::collections::HashMap;
use std::sync::Arc;

/// The weight-`k` Koszul complex of a `w`-dimensional space: terms
/// `Λᵃ ⊗ S^{k−a}` for `a = k..0` with differentials `Λᵃ⊗Sᵇ → Λᵃ⁻¹⊗Sᵇ⁺¹`.
#[derive(Clone, Debug)]
pub struct KoszulComplex {
    pub dim: usize,
    pub weight: u32,
    /// Dimensions of the terms, from the top exterior power down to `S^k`.
    pub term_dims: Vec<usize>,
    /// `differentials[i]` maps term `i` to term `i+1`.
    pub differentials: Vec<Matrix>,
}

fn exterior_basis(w: usize, a: u32) -> Vec<Vec<usize>> {
    (0..w).combinations(a as usize).collect()
}

fn symmetric_basis(w: usize, b: u32) -> Vec<Vec<u16>> {
    crate::forms::compositions(b, w)
}

/// Builds the weight-`k` Koszul complex with the standard contraction
/// differential `e_{i₁}∧…∧e_{iₐ} ⊗ m ↦ Σ_t (−1)^{t−1}·(… ê_{iₜ} …) ⊗ e_{iₜ}·m`.
pub fn build_koszul(field: FieldSpec, w: usize, k: u32) -> KoszulComplex {
    let arange: Vec<u32> = (0..=k.min(w as u32)).rev().collect();
    let mut term_dims = Vec::new();
    let mut bases_ext = Vec::new();
    let mut bases_sym = Vec::new();
    for &a in &arange {
        let ext = exterior_basis(w, a);
        let sym = symmetric_basis(w, k - a);
        term_dims.push(ext.len() * sym.len());
        bases_ext.push(ext);
        bases_sym.push(sym);
    }
    let mut differentials = Vec::new();
    for t in 0..arange.len().saturating_sub(1) {
        let (src_ext, src_sym) = (&bases_ext[t], &bases_sym[t]);
        let (dst_ext, dst_sym) = (&bases_ext[t + 1], &bases_sym[t + 1]);
        let dst_ext_index: HashMap<&Vec<usize>, usize> =
            dst_ext.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let dst_sym_index: HashMap<&Vec<u16>, usize> =
            dst_sym.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut m = Matrix::zero(field, term_dims[t + 1], term_dims[t]);
        for (ei, ext) in src_ext.iter().enumerate() {
            for (si, sym) in src_sym.iter().enumerate() {
                let col = ei * src_sym.len() + si;
                for (pos, &v) in ext.iter().enumerate() {
                    let mut new_ext = ext.clone();
                    new_ext.remove(pos);
                    let mut new_sym = sym.clone();
                    new_sym[v] += 1;
                    let row =
                        dst_ext_index[&new_ext] * dst_sym.len() + dst_sym_index[&new_sym];
                    let sign = if pos % 2 == 0 { 1 } else { -1 };
                    m.add_to(row, col, &field.from_i64(sign));
                }
            }
        }
        differentials.push(m);
    }
    KoszulComplex {
        dim: w,
        weight: k,
        term_dims,
        differentials,
    }
}

impl KoszulComplex {
    pub fn differential_squares_to_zero(&self) -> bool {
        self.differentials
            .windows(2)
            .all(|w| w[1].compose(&w[0]).is_zero())
    }

    pub fn homology_dim(&self, i: usize) -> usize {
        let dim = self.term_dims[i];
        let rank_out = if i < self.differentials.len() {
            self.differentials[i].rank()
        } else {
            0
        };
        let rank_in = if i > 0 {
            self.differentials[i - 1].rank()
        } else {
            0
        };
        dim - rank_out - rank_in
    }
}

/// Whether the weight-`k` complex is exact (expected for every `k ≥ 1`).
pub fn weight_exactness(field: FieldSpec, w: usize, k: u32) -> bool {
    assert!(k >= 1, "weight 0 is the ground field");
    let complex = build_koszul(field, w, k);
    (0..complex.term_dims.len()).all(|i| complex.homology_dim(i) == 0)
}

/// Basis of `F^i ∩ Ω^p` on a single chart, where `F^i` is the ideal
/// generated by `(𝒩^i, 𝒩^{i−1}d𝒩, …, (d𝒩)^i)`. In the monomial model these
/// are exactly the monomials whose θ-count plus dθ-count is at least `i`.
#[derive(Clone, Debug)]
pub struct FiltrationPiece {
    pub sig: Arc<ChartSignature>,
    pub level: u32,
    pub degree: u32,
    pub basis: Vec<FormMonomial>,
    /// The graded piece `F^i/F^{i+1}`: monomials with odd content exactly `i`.
    pub graded_basis: Vec<FormMonomial>,
}

pub fn filtration_piece(
    sig: &Arc<ChartSignature>,
    level: u32,
    degree: u32,
    window: &ExponentWindow,
) -> FiltrationPiece {
    let all = form_basis(sig, degree, window);
    let basis: Vec<FormMonomial> = all
        .iter()
        .filter(|m| m.odd_content() >= level)
        .cloned()
        .collect();
    let graded_basis = basis
        .iter()
        .filter(|m| m.odd_content() == level)
        .cloned()
        .collect();
    FiltrationPiece {
        sig: sig.clone(),
        level,
        degree,
        basis,
        graded_basis,
    }
}

/// `d` preserves the filtration: every monomial of `d(m)` for `m ∈ F^i` has
/// odd content ≥ i (checked on the whole window basis).
pub fn filtration_d_stable(
    field: FieldSpec,
    sig: &Arc<ChartSignature>,
    level: u32,
    degree: u32,
    window: &ExponentWindow,
) -> bool {
    let piece = filtration_piece(sig, level, degree, window);
    piece.basis.iter().all(|m| {
        let f = FormElement::monomial(sig.clone(), field, m.clone(), field.one());
        f.d().terms.keys().all(|t| t.odd_content() >= level)
    })
}

/// Exactness of the graded piece `gr^i = F^i/F^{i+1}` for `i ≥ 1` on a single
/// chart. The induced differential preserves the x-weight grading (each even
/// coordinate counts 1 and so does its differential), so the check runs
/// weight by weight on complete finite subcomplexes, avoiding window-edge
/// effects.
pub fn graded_piece_exactness(
    field: FieldSpec,
    sig: &Arc<ChartSignature>,
    level: u32,
    window_n: i32,
) -> bool {
    assert!(level >= 1);
    assert!(
        sig.inverted.is_empty(),
        "graded-piece exactness is a single-chart (polynomial) check"
    );
    let window = ExponentWindow::symmetric(sig, window_n);
    // degree is bounded on gr^i: |dx| ≤ n and dθ-total ≤ i
    let p_max = sig.n() as u32 + level;
    let x_weight = |m: &FormMonomial| -> i32 {
        m.func.even_exps.iter().sum::<i32>() + m.dx_mask.count_ones() as i32
    };
    // induced differential: d followed by projection to odd content = level
    let d_bar = |m: &FormMonomial| -> Vec<(FormMonomial, crate::scalar::Scalar)> {
        let f = FormElement::monomial(sig.clone(), field, m.clone(), field.one());
        f.d()
            .terms
            .into_iter()
            .filter(|(t, _)| t.odd_content() == level)
            .collect()
    };
    for weight in 0..=window_n {
        let mut bases: Vec<Vec<FormMonomial>> = Vec::new();
        for p in 0..=p_max + 1 {
            let basis: Vec<FormMonomial> = filtration_piece(sig, level, p, &window)
                .graded_basis
                .into_iter()
                .filter(|m| x_weight(m) == weight)
                .collect();
            bases.push(basis);
        }
        let index: Vec<HashMap<FormMonomial, usize>> = bases
            .iter()
            .map(|b| b.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect())
            .collect();
        let mut mats: Vec<Matrix> = Vec::new();
        for p in 0..bases.len() - 1 {
            let mut m = Matrix::zero(field, bases[p + 1].len(), bases[p].len());
            for (col, mono) in bases[p].iter().enumerate() {
                for (t, c) in d_bar(mono) {
                    let row = *index[p + 1]
                        .get(&t)
                        .expect("graded differential left the weight block");
                    m.add_to(row, col, &c);
                }
            }
            mats.push(m);
        }
        for p in 0..bases.len() - 1 {
            let dim = bases[p].len();
            let rank_out = mats[p].rank();
            let rank_in = if p > 0 { mats[p - 1].rank() } else { 0 };
            if dim != rank_out + rank_in {
                return false;
            }
        }
    }
    true
}

fn pair_table(dim_v: usize) -> (Vec<(usize, usize)>, HashMap<(usize, usize), usize>) {
    let pairs: Vec<(usize, usize)> = (0..dim_v)
        .flat_map(|j| ((j + 1)..dim_v).map(move |k| (j, k)))
        .collect();
    let index = pairs.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    (pairs, index)
}

/// Index and sign of `e_i ⊗ (e_j ∧ e_k)` in the standard basis, `None` when
/// the wedge collapses.
fn basis_slot(
    pairs_len: usize,
    pair_index: &HashMap<(usize, usize), usize>,
    i: usize,
    j: usize,
    k: usize,
) -> Option<(usize, i64)> {
    match j.cmp(&k) {
        std::cmp::Ordering::Less => Some((i * pairs_len + pair_index[&(j, k)], 1)),
        std::cmp::Ordering::Greater => Some((i * pairs_len + pair_index[&(k, j)], -1)),
        std::cmp::Ordering::Equal => None,
    }
}

/// Matrix of `τ: v₁⊗(v₂∧v₃) ↦ v₃⊗(v₁∧v₂) − v₂⊗(v₁∧v₃)` on the standard
/// basis `e_i ⊗ (e_j ∧ e_k)`, `j < k`, of `V ⊗ Λ²V`.
pub fn tau_matrix(field: FieldSpec, dim_v: usize) -> Matrix {
    assert!(dim_v >= 2);
    let (pairs, pair_index) = pair_table(dim_v);
    let dim = dim_v * pairs.len();
    let mut m = Matrix::zero(field, dim, dim);
    for col in 0..dim {
        let i = col / pairs.len();
        let (j, k) = pairs[col % pairs.len()];
        // τ(e_i ⊗ e_j∧e_k) = e_k ⊗ (e_i∧e_j) − e_j ⊗ (e_i∧e_k)
        if let Some((row, sign)) = basis_slot(pairs.len(), &pair_index, k, i, j) {
            m.add_to(row, col, &field.from_i64(sign));
        }
        if let Some((row, sign)) = basis_slot(pairs.len(), &pair_index, j, i, k) {
            m.add_to(row, col, &field.from_i64(-sign));
        }
    }
    m
}

/// The cyclic symmetrization projector `π` with `τ = 3π − id`; requires
/// characteristic ≠ 3.
pub fn cyclic_projector(field: FieldSpec, dim_v: usize) -> Matrix {
    assert!(field.characteristic() != 3);
    let (pairs, pair_index) = pair_table(dim_v);
    let dim = dim_v * pairs.len();
    let third = field.from_fraction(1, 3);
    let mut m = Matrix::zero(field, dim, dim);
    for col in 0..dim {
        let i = col / pairs.len();
        let (j, k) = pairs[col % pairs.len()];
        // (1/3)(v₁⊗(v₂∧v₃) + v₂⊗(v₃∧v₁) + v₃⊗(v₁∧v₂))
        for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
            if let Some((row, sign)) = basis_slot(pairs.len(), &pair_index, a, b, c) {
                m.add_to(row, col, &third.mul(&field.from_i64(sign)));
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{axpy, scale};

    fn q() -> FieldSpec {
        FieldSpec::Rational
    }

    /// `m + c·id`
    fn shift(m: &Matrix, c: i64) -> Matrix {
        let mut out = m.clone();
        for j in 0..out.cols {
            out.add_to(j, j, &m.field.from_i64(c));
        }
        out
    }

    #[test]
    fn koszul_small_shapes() {
        // w = 1, k = 1: two one-dimensional terms, isomorphism between them
        let c = build_koszul(q(), 1, 1);
        assert_eq!(c.term_dims, vec![1, 1]);
        assert_eq!(c.differentials[0].rank(), 1);
        // w = 2, k = 2: dims (1, 4, 3)
        let c = build_koszul(q(), 2, 2);
        assert_eq!(c.term_dims, vec![1, 4, 3]);
        assert!(c.differential_squares_to_zero());
        // w = 0, k = 0: the field in one spot
        let c = build_koszul(q(), 0, 0);
        assert_eq!(c.term_dims, vec![1]);
    }

    #[test]
    fn koszul_exactness_sweep() {
        for w in 1..=4 {
            for k in 1..=5 {
                assert!(weight_exactness(q(), w, k), "w={w} k={k}");
            }
        }
    }

    #[test]
    fn filtration_bases_superpoint() {
        let sig = ChartSignature::new(Vec::<&str>::new(), vec!["t"]);
        let w = ExponentWindow::symmetric(&sig, 0);
        // F¹ ∩ Ω⁰ = span{θ}
        let p0 = filtration_piece(&sig, 1, 0, &w);
        assert_eq!(p0.basis.len(), 1);
        assert_eq!(p0.basis[0].func.odd_mask, 1);
        // F¹ ∩ Ω¹ = span{dθ, θdθ}
        let p1 = filtration_piece(&sig, 1, 1, &w);
        assert_eq!(p1.basis.len(), 2);
    }

    #[test]
    fn filtration_d_stability() {
        let sig = ChartSignature::new(vec!["z"], vec!["t1", "t2"]);
        let w = ExponentWindow::symmetric(&sig, 3);
        for level in 1..=2 {
            for p in 0..=3 {
                assert!(filtration_d_stable(q(), &sig, level, p, &w));
            }
        }
    }

    #[test]
    fn graded_pieces_exact() {
        let sig = ChartSignature::new(vec!["z"], vec!["t1", "t2"]);
        for level in 1..=3 {
            assert!(graded_piece_exactness(q(), &sig, level, 3), "level {level}");
        }
    }

    #[test]
    fn tau_dim3_spectrum() {
        let m = tau_matrix(q(), 3);
        assert_eq!(m.rows, 9);
        assert_eq!(m.rank(), 9);
        // (τ − 2)(τ + 1) = 0
        assert!(shift(&m, -2).compose(&shift(&m, 1)).is_zero());
        // τ = 3π − id as matrices
        let pi = cyclic_projector(q(), 3);
        let id = Matrix::identity(q(), 9);
        for col in 0..9 {
            let mut v = pi.columns[col].clone();
            scale(&mut v, &q().from_i64(3));
            axpy(&mut v, &q().from_i64(-1), &id.columns[col]);
            assert_eq!(v, m.columns[col]);
        }
    }

    #[test]
    fn tau_dim2_from_defining_formula() {
        // τ(e₁⊗(e₁∧e₂)) = e₂⊗(e₁∧e₁) − e₁⊗(e₁∧e₂) = −e₁⊗(e₁∧e₂), same for e₂
        let m = tau_matrix(q(), 2);
        assert_eq!(m.rows, 2);
        for col in 0..2 {
            assert_eq!(m.get(col, col), q().from_i64(-1));
        }
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn tau_mod5() {
        let f = FieldSpec::ModP(5);
        let m = tau_matrix(f, 3);
        assert_eq!(m.rank(), 9);
        assert!(shift(&m, -2).compose(&shift(&m, 1)).is_zero());
        let pi = cyclic_projector(f, 3);
        let id = Matrix::identity(f, 9);
        for col in 0..9 {
            let mut v = pi.columns[col].clone();
            scale(&mut v, &f.from_i64(3));
            axpy(&mut v, &f.from_i64(-1), &id.columns[col]);
            assert_eq!(v, m.columns[col]);
        }
    }
}
