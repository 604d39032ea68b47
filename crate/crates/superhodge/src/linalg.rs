//! Sparse exact linear algebra over [`Scalar`] fields.
//!
//! Everything downstream (Čech differentials, page subquotients, Koszul
//! complexes) reduces to rank / kernel / image / solve on sparse matrices.
//! The core algorithm is column reduction with memory: columns are combined
//! until every nonzero column has a distinct lowest row ("low"), and the
//! combinations are recorded so kernels and preimages come out for free.
//! All pivot choices are deterministic, so results never depend on thread
//! scheduling or hash iteration order.

use crate::scalar::{FieldSpec, Scalar};
use std::collections::HashMap;

/// Sparse vector: `(row, coefficient)` pairs sorted by row, no zeros.
pub type SparseVec = Vec<(u32, Scalar)>;

pub fn sparse_from_entries(field: FieldSpec, entries: &[(u32, i64)]) -> SparseVec {
    let mut v: SparseVec = entries
        .iter()
        .filter(|(_, c)| *c != 0)
        .map(|(r, c)| (*r, field.from_i64(*c)))
        .collect();
    v.sort_by_key(|(r, _)| *r);
    v
}

/// `dst += coeff * src`, keeping rows sorted and dropping zeros.
pub fn axpy(dst: &mut SparseVec, coeff: &Scalar, src: &SparseVec) {
    if coeff.is_zero() || src.is_empty() {
        return;
    }
    let mut out = SparseVec::with_capacity(dst.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < dst.len() && j < src.len() {
        match dst[i].0.cmp(&src[j].0) {
            std::cmp::Ordering::Less => {
                out.push(dst[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push((src[j].0, coeff.mul(&src[j].1)));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let c = dst[i].1.add(&coeff.mul(&src[j].1));
                if !c.is_zero() {
                    out.push((dst[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&dst[i..]);
    for (r, c) in &src[j..] {
        out.push((*r, coeff.mul(c)));
    }
    *dst = out;
}

pub fn scale(v: &mut SparseVec, coeff: &Scalar) {
    if coeff.is_zero() {
        v.clear();
        return;
    }
    if coeff.is_one() {
        return;
    }
    for (_, c) in v.iter_mut() {
        *c = c.mul(coeff);
    }
}

/// A sparse matrix stored by columns, all entries in one field.
#[derive(Clone, Debug)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub field: FieldSpec,
    pub columns: Vec<SparseVec>,
}

impl Matrix {
    pub fn zero(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            field,
            columns: vec![SparseVec::new(); cols],
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Matrix::zero(field, n, n);
        for j in 0..n {
            m.columns[j].push((j as u32, field.one()));
        }
        m
    }

    pub fn from_dense(field: FieldSpec, data: &[&[i64]]) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        let mut m = Matrix::zero(field, rows, cols);
        for (i, row) in data.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    m.columns[j].push((i as u32, field.from_i64(v)));
                }
            }
        }
        for col in &mut m.columns {
            col.sort_by_key(|(r, _)| *r);
        }
        m
    }

    pub fn set(&mut self, i: usize, j: usize, value: Scalar) {
        debug_assert!(i < self.rows && j < self.cols);
        let col = &mut self.columns[j];
        match col.binary_search_by_key(&(i as u32), |(r, _)| *r) {
            Ok(k) => {
                if value.is_zero() {
                    col.remove(k);
                } else {
                    col[k].1 = value;
                }
            }
            Err(k) => {
                if !value.is_zero() {
                    col.insert(k, (i as u32, value));
                }
            }
        }
    }

    pub fn add_to(&mut self, i: usize, j: usize, value: &Scalar) {
        if value.is_zero() {
            return;
        }
        let col = &mut self.columns[j];
        match col.binary_search_by_key(&(i as u32), |(r, _)| *r) {
            Ok(k) => {
                let c = col[k].1.add(value);
                if c.is_zero() {
                    col.remove(k);
                } else {
                    col[k].1 = c;
                }
            }
            Err(k) => col.insert(k, (i as u32, value.clone())),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.columns[j]
            .binary_search_by_key(&(i as u32), |(r, _)| *r)
            .map(|k| self.columns[j][k].1.clone())
            .unwrap_or_else(|_| self.field.zero())
    }

    /// Matrix-vector product on a sparse vector.
    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (j, c) in v {
            axpy(&mut out, c, &self.columns[*j as usize]);
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Matrix::zero(self.field, self.cols, self.rows);
        for (j, col) in self.columns.iter().enumerate() {
            for (i, c) in col {
                m.columns[*i as usize].push((j as u32, c.clone()));
            }
        }
        for col in &mut m.columns {
            col.sort_by_key(|(r, _)| *r);
        }
        m
    }

    pub fn compose(&self, inner: &Matrix) -> Matrix {
        assert_eq!(self.cols, inner.rows);
        assert_eq!(self.field, inner.field);
        Matrix {
            rows: self.rows,
            cols: inner.cols,
            field: self.field,
            columns: inner.columns.iter().map(|c| self.apply(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.len()).sum()
    }

    pub fn rank(&self) -> usize {
        Reduction::new(self).rank()
    }

    pub fn kernel_basis(&self) -> Vec<SparseVec> {
        Reduction::new(self).kernel_basis()
    }

    pub fn image_basis(&self) -> Vec<SparseVec> {
        Reduction::new(self).image_basis()
    }
}

/// Column reduction `R = A·V` with `V` recorded.
///
/// Each nonzero column of `R` has a distinct low row. Zero columns of `R`
/// give a kernel basis (the matching `V` columns); nonzero columns give an
/// echelonized image basis, and reducing a vector against them answers both
/// membership and preimage queries.
pub struct Reduction {
    pub field: FieldSpec,
    pub source_dim: usize,
    r_cols: Vec<SparseVec>,
    v_cols: Vec<SparseVec>,
    low_to_col: HashMap<u32, usize>,
    kernel_cols: Vec<usize>,
}

impl Reduction {
    pub fn new(matrix: &Matrix) -> Self {
        let mut red = Reduction {
            field: matrix.field,
            source_dim: matrix.cols,
            r_cols: Vec::with_capacity(matrix.cols),
            v_cols: Vec::with_capacity(matrix.cols),
            low_to_col: HashMap::new(),
            kernel_cols: Vec::new(),
        };
        for j in 0..matrix.cols {
            let mut r = matrix.columns[j].clone();
            let mut v: SparseVec = vec![(j as u32, matrix.field.one())];
            while let Some((low, coeff)) = r.last().cloned() {
                let Some(&j2) = red.low_to_col.get(&low) else {
                    break;
                };
                let pivot = red.r_cols[j2].last().unwrap().1.clone();
                let ratio = coeff.div(&pivot).neg();
                let (r2, v2) = (red.r_cols[j2].clone(), red.v_cols[j2].clone());
                axpy(&mut r, &ratio, &r2);
                axpy(&mut v, &ratio, &v2);
            }
            if let Some((low, _)) = r.last() {
                red.low_to_col.insert(*low, j);
            } else {
                red.kernel_cols.push(j);
            }
            red.r_cols.push(r);
            red.v_cols.push(v);
        }
        red
    }

    pub fn rank(&self) -> usize {
        self.source_dim - self.kernel_cols.len()
    }

    pub fn kernel_basis(&self) -> Vec<SparseVec> {
        self.kernel_cols.iter().map(|&j| self.v_cols[j].clone()).collect()
    }

    pub fn image_basis(&self) -> Vec<SparseVec> {
        (0..self.source_dim)
            .filter(|j| !self.r_cols[*j].is_empty())
            .map(|j| self.r_cols[j].clone())
            .collect()
    }

    /// Pivot rows of the echelonized image.
    pub fn pivot_rows(&self) -> Vec<u32> {
        let mut rows: Vec<u32> = self.low_to_col.keys().copied().collect();
        rows.sort_unstable();
        rows
    }

    /// Reduces `v` against the image columns in place; returns the
    /// combination coefficients `(column, coeff)` that were subtracted.
    pub fn reduce_vector(&self, v: &mut SparseVec) -> Vec<(usize, Scalar)> {
        let mut used = Vec::new();
        while let Some((low, coeff)) = v.last().cloned() {
            let Some(&j) = self.low_to_col.get(&low) else {
                break;
            };
            let pivot = self.r_cols[j].last().unwrap().1.clone();
            let ratio = coeff.div(&pivot);
            let neg = ratio.neg();
            let rc = self.r_cols[j].clone();
            axpy(v, &neg, &rc);
            used.push((j, ratio));
        }
        used
    }

    /// Any solution of `A x = b`, or `None` when inconsistent.
    pub fn solve(&self, b: &SparseVec) -> Option<SparseVec> {
        let mut residue = b.clone();
        let used = self.reduce_vector(&mut residue);
        if !residue.is_empty() {
            return None;
        }
        let mut x = SparseVec::new();
        for (j, coeff) in used {
            axpy(&mut x, &coeff, &self.v_cols[j]);
        }
        Some(x)
    }

    pub fn in_image(&self, b: &SparseVec) -> bool {
        let mut residue = b.clone();
        self.reduce_vector(&mut residue);
        residue.is_empty()
    }
}

/// An echelonized list of sparse columns with distinct lows, grown
/// incrementally. Used for spanning sets of subspaces.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    cols: Vec<SparseVec>,
    low_to_col: HashMap<u32, usize>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.cols
    }

    /// Reduces `v` in place; returns the coefficients against stored columns.
    pub fn reduce(&self, v: &mut SparseVec) -> Vec<(usize, Scalar)> {
        let mut used = Vec::new();
        while let Some((low, coeff)) = v.last().cloned() {
            let Some(&j) = self.low_to_col.get(&low) else {
                break;
            };
            let pivot = self.cols[j].last().unwrap().1.clone();
            let ratio = coeff.div(&pivot);
            let neg = ratio.neg();
            let rc = self.cols[j].clone();
            axpy(v, &neg, &rc);
            used.push((j, ratio));
        }
        used
    }

    /// Reduces and inserts; returns the new column's index if independent.
    pub fn insert(&mut self, mut v: SparseVec) -> Option<usize> {
        self.reduce(&mut v);
        let (low, _) = v.last()?.clone();
        let idx = self.cols.len();
        self.low_to_col.insert(low, idx);
        self.cols.push(v);
        Some(idx)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_empty()
    }
}

pub fn span_dim(field: FieldSpec, vectors: &[SparseVec]) -> usize {
    let _ = field;
    let mut ech = Echelon::new();
    for v in vectors {
        ech.insert(v.clone());
    }
    ech.len()
}

/// `dim span(Z) − dim span(B)` with the containment `B ⊆ span(Z)` checked.
pub fn subquotient_dim(
    field: FieldSpec,
    z: &[SparseVec],
    b: &[SparseVec],
) -> Result<usize, String> {
    let mut zech = Echelon::new();
    for v in z {
        zech.insert(v.clone());
    }
    let mut bech = Echelon::new();
    for v in b {
        if !zech.contains(v) {
            return Err("subquotient: boundary vector outside cycle span".into());
        }
        bech.insert(v.clone());
    }
    let _ = field;
    Ok(zech.len() - bech.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> FieldSpec {
        FieldSpec::Rational
    }

    #[test]
    fn rank_identity() {
        assert_eq!(Matrix::identity(q(), 3).rank(), 3);
    }

    #[test]
    fn rank_all_ones_f2() {
        let m = Matrix::from_dense(FieldSpec::ModP(2), &[&[1, 1], &[1, 1]]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn kernel_identity_and_zero() {
        assert!(Matrix::identity(q(), 4).kernel_basis().is_empty());
        let z = Matrix::zero(q(), 2, 3);
        assert_eq!(z.kernel_basis().len(), 3);
    }

    // d on Ω⁰ of the 0|1 superpoint: basis {1, θ} → {dθ, θdθ}, d(a+bθ) = b·dθ.
    #[test]
    fn superpoint_d0_kernel_is_constants() {
        let d = Matrix::from_dense(q(), &[&[0, 1], &[0, 0]]);
        let ker = d.kernel_basis();
        assert_eq!(ker.len(), 1);
        assert_eq!(ker[0], vec![(0, q().one())]);
    }

    #[test]
    fn image_basis_identity_and_zero() {
        assert_eq!(Matrix::identity(q(), 2).image_basis().len(), 2);
        assert!(Matrix::zero(q(), 3, 2).image_basis().is_empty());
    }

    /// Čech coboundary of 𝒪(−2) on ℙ¹ in a Laurent window, built by hand.
    ///
    /// C⁰ = {z^a: 0..N} ⊕ {w^b: 0..N}, C¹ = {z^c: −N..N}; the second chart
    /// restricts by w^b ↦ z^{−b−2} and images past the window are dropped.
    /// h⁰(𝒪(−2)) = 0 forces kernel 0, so the image dimension equals
    /// dim C⁰ minus the number of clipped columns.
    #[test]
    fn cech_coboundary_o_minus_2() {
        let n: i64 = 3;
        let c1_index = |c: i64| (c + n) as u32; // z^c for c in [−N, N]
        let mut m = Matrix::zero(q(), (2 * n + 1) as usize, (2 * n + 2) as usize);
        let mut clipped = 0usize;
        for a in 0..=n {
            m.set(c1_index(a) as usize, a as usize, q().from_i64(-1));
        }
        for b in 0..=n {
            let c = -b - 2;
            if c >= -n {
                m.set(c1_index(c) as usize, (n + 1 + b) as usize, q().one());
            } else {
                clipped += 1;
            }
        }
        let red = Reduction::new(&m);
        assert_eq!(clipped, 2);
        assert!(red
            .kernel_basis()
            .iter()
            .all(|v| v.iter().all(|(r, _)| *r >= (n + 1) as u32)));
        assert_eq!(red.rank(), (2 * n + 2) as usize - clipped);
        // H¹ = C¹/im has dimension 1, the class of z^{−1}dz-type monomials
        let mut h1 = 0;
        for c in -n..=n {
            let mut v: SparseVec = vec![(c1_index(c), q().one())];
            red.reduce_vector(&mut v);
            if !v.is_empty() {
                h1 += 1;
            }
        }
        assert_eq!(h1, 1);
    }

    /// Lifting a Čech 1-cochain of 𝒪 on ℙ¹ through the coboundary is
    /// inconsistent exactly when its class in H¹ is nonzero.
    #[test]
    fn solve_detects_nontrivial_class() {
        let n: i64 = 3;
        let c1_index = |c: i64| (c + n) as u32;
        let mut m = Matrix::zero(q(), (2 * n + 1) as usize, (2 * n + 2) as usize);
        for a in 0..=n {
            m.set(c1_index(a) as usize, a as usize, q().from_i64(-1));
        }
        for b in 0..=n {
            let c = -b;
            m.set(c1_index(c) as usize, (n + 1 + b) as usize, q().one());
        }
        let red = Reduction::new(&m);
        // H¹(𝒪) = 0: every cochain lifts
        let b: SparseVec = vec![(c1_index(2), q().one())];
        let x = red.solve(&b).expect("z^2 bounds");
        assert_eq!(m.apply(&x), b);
        // identity solve
        let id = Reduction::new(&Matrix::identity(q(), 3));
        let e0: SparseVec = vec![(0, q().one())];
        assert_eq!(id.solve(&e0).unwrap(), e0);
        // zero matrix, nonzero rhs
        let zred = Reduction::new(&Matrix::zero(q(), 2, 2));
        assert!(zred.solve(&e0).is_none());
    }

    #[test]
    fn subquotient_examples() {
        let e1: SparseVec = vec![(0, q().one())];
        let e2: SparseVec = vec![(1, q().one())];
        assert_eq!(
            subquotient_dim(q(), &[e1.clone(), e2.clone()], &[e1.clone()]).unwrap(),
            1
        );
        assert_eq!(
            subquotient_dim(q(), &[e1.clone(), e2.clone()], &[e1.clone(), e2.clone()]).unwrap(),
            0
        );
        let e3: SparseVec = vec![(2, q().one())];
        assert!(subquotient_dim(q(), &[e1], &[e3]).is_err());
    }

    proptest! {
        #[test]
        fn rank_equals_transpose_rank(entries in proptest::collection::vec((0usize..5, 0usize..6, -3i64..=3), 0..18)) {
            let mut m = Matrix::zero(q(), 5, 6);
            for (i, j, v) in entries {
                m.set(i, j, q().from_i64(v));
            }
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn rank_plus_nullity(entries in proptest::collection::vec((0usize..5, 0usize..6, -3i64..=3), 0..18)) {
            let mut m = Matrix::zero(q(), 5, 6);
            for (i, j, v) in entries {
                m.set(i, j, q().from_i64(v));
            }
            let red = Reduction::new(&m);
            prop_assert_eq!(red.rank() + red.kernel_basis().len(), 6);
            for k in red.kernel_basis() {
                prop_assert!(m.apply(&k).is_empty());
            }
        }

        #[test]
        fn rank_invariant_under_permutation(
            entries in proptest::collection::vec((0usize..5, 0usize..5, -3i64..=3), 0..15),
            rowperm in Just(()),
        ) {
            let _ = rowperm;
            let mut m = Matrix::zero(q(), 5, 5);
            for (i, j, v) in entries {
                m.set(i, j, q().from_i64(v));
            }
            // swap rows 0↔4 and columns 1↔3; rank must not change
            let mut p = Matrix::zero(q(), 5, 5);
            for (a, b) in [(0, 4), (4, 0), (1, 1), (2, 2), (3, 3)] {
                p.set(a, b, q().one());
            }
            let mut s = Matrix::zero(q(), 5, 5);
            for (a, b) in [(0, 0), (1, 3), (3, 1), (2, 2), (4, 4)] {
                s.set(a, b, q().one());
            }
            prop_assert_eq!(m.rank(), p.compose(&m).compose(&s).rank());
        }
    }
}
