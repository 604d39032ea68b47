//! The window-truncated Čech–de Rham bicomplex of an atlas.
//!
//! Cell `C^{p,q}` is the direct sum over size-`q+1` chart subsets `I` of the
//! degree-`p` forms on `U_I`, with even Laurent exponents confined to the
//! window. The vertical differential `δ` is the alternating sum of
//! restrictions, the horizontal one is `d`; the two commute, and the total
//! differential used downstream is `D = δ + (−1)^q d`.
//!
//! Windows are what make the cells finite-dimensional. A monomial whose
//! image escapes the window is dropped and the source column flagged;
//! matrix identities are asserted only on columns whose whole composition
//! stays inside ("interior"). Page-level soundness of a window is probed by
//! re-running at `N+1` and comparing.

use crate::atlas::{Atlas, AtlasError};
use crate::forms::{form_basis, ExponentWindow, FormElement, FormMonomial, FormPullback};
use crate::linalg::Matrix;
use crate::ring::ChartSignature;
use crate::scalar::FieldSpec;
use std::collections::HashMap;
use std::sync::Arc;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Basis of degree-`p` forms on one intersection, in the coordinates of its
/// least chart.
#[derive(Clone, Debug)]
pub struct SectionSpace {
    pub subset: Vec<usize>,
    pub degree: u32,
    pub sig: Arc<ChartSignature>,
    pub window: ExponentWindow,
    pub basis: Vec<FormMonomial>,
    pub index: HashMap<FormMonomial, usize>,
}

impl SectionSpace {
    pub fn new(atlas: &Atlas, subset: &[usize], degree: u32, window_n: i32) -> Self {
        let sig = atlas.section_signature(subset);
        let window = ExponentWindow::symmetric(&sig, window_n);
        let basis = form_basis(&sig, degree, &window);
        let index = basis
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        SectionSpace {
            subset: subset.to_vec(),
            degree,
            sig,
            window,
            basis,
            index,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// One bicomplex cell: the direct sum of section spaces over all
/// intersections of a fixed size.
#[derive(Clone, Debug)]
pub struct Cell {
    pub p: usize,
    pub q: usize,
    pub spaces: Vec<SectionSpace>,
    pub offsets: Vec<usize>,
    pub dim: usize,
    pub even_dim: usize,
    pub odd_dim: usize,
}

impl Cell {
    fn new(atlas: &Atlas, p: usize, q: usize, window_n: i32) -> Self {
        let spaces: Vec<SectionSpace> = atlas
            .intersections(q + 1)
            .into_iter()
            .map(|subset| SectionSpace::new(atlas, subset, p as u32, window_n))
            .collect();
        let mut offsets = Vec::with_capacity(spaces.len());
        let mut dim = 0;
        for s in &spaces {
            offsets.push(dim);
            dim += s.dim();
        }
        let even_dim = spaces
            .iter()
            .flat_map(|s| s.basis.iter())
            .filter(|m| m.parity() == 0)
            .count();
        Cell {
            p,
            q,
            spaces,
            offsets,
            dim,
            even_dim,
            odd_dim: dim - even_dim,
        }
    }

    pub fn locate(&self, idx: usize) -> (usize, usize) {
        let s = match self.offsets.binary_search(&idx) {
            Ok(k) => k,
            Err(k) => k - 1,
        };
        (s, idx - self.offsets[s])
    }

    pub fn parity_of(&self, idx: usize) -> u8 {
        let (s, local) = self.locate(idx);
        self.spaces[s].basis[local].parity()
    }

    pub fn monomial_at(&self, idx: usize) -> (&[usize], &FormMonomial) {
        let (s, local) = self.locate(idx);
        (&self.spaces[s].subset, &self.spaces[s].basis[local])
    }
}

/// A differential matrix with per-column escape flags: `escaped[j]` records
/// that some image monomial of basis vector `j` fell outside the window.
#[derive(Clone, Debug)]
pub struct FlaggedMatrix {
    pub matrix: Matrix,
    pub escaped: Vec<bool>,
}

/// The assembled bicomplex, together with the bicomplex of the bosonized
/// atlas and the cell-wise quotient onto it.
#[derive(Debug)]
pub struct Bicomplex {
    pub field: FieldSpec,
    pub p_max: usize,
    pub window_n: i32,
    pub q_max: usize,
    /// `cells[p][q]` for `p ≤ p_max + 1` (the last column is the guard).
    pub cells: Vec<Vec<Cell>>,
    /// `d[p][q]: C^{p,q} → C^{p+1,q}` for `p ≤ p_max`.
    pub d: Vec<Vec<FlaggedMatrix>>,
    /// `delta[p][q]: C^{p,q} → C^{p,q+1}` for `q < q_max`.
    pub delta: Vec<Vec<FlaggedMatrix>>,
    /// Bosonization bicomplex (`None` on the bosonization itself).
    pub boson: Option<Box<Bicomplex>>,
    /// `quotient[p][q][i]`: index in the even cell for monomials with no odd
    /// content, `None` for monomials killed by the reduction.
    pub quotient: Vec<Vec<Vec<Option<usize>>>>,
}

#[derive(Debug, thiserror::Error)]
pub enum CechError {
    #[error("atlas validation failed: {0:?}")]
    InvalidAtlas(Vec<String>),
    #[error("{0}")]
    Atlas(#[from] AtlasError),
}

impl Bicomplex {
    pub fn cell(&self, p: usize, q: usize) -> &Cell {
        &self.cells[p][q]
    }

    pub fn columns(&self) -> usize {
        self.cells.len()
    }

    /// Assembles the bicomplex with computed columns `p ≤ p_max` plus one
    /// guard column, and the parallel even bicomplex with its quotient.
    pub fn assemble(atlas: &Atlas, p_max: usize, window_n: i32) -> Result<Bicomplex, CechError> {
        let report = atlas.validate();
        if !report.passed() {
            return Err(CechError::InvalidAtlas(report.failures));
        }
        let mut bx = Self::assemble_raw(atlas, p_max, window_n)?;
        let even = atlas.bosonize();
        let ebx = Self::assemble_raw(&even, p_max, window_n)?;
        bx.quotient = quotient_maps(&bx, &ebx);
        bx.boson = Some(Box::new(ebx));
        Ok(bx)
    }

    fn assemble_raw(atlas: &Atlas, p_max: usize, window_n: i32) -> Result<Bicomplex, CechError> {
        let q_max = atlas.q_max();
        let columns = p_max + 2;
        let cell_jobs: Vec<(usize, usize)> = (0..columns)
            .flat_map(|p| (0..=q_max).map(move |q| (p, q)))
            .collect();
        #[cfg(feature = "parallel")]
        let cell_list: Vec<Cell> = cell_jobs
            .par_iter()
            .map(|&(p, q)| Cell::new(atlas, p, q, window_n))
            .collect();
        #[cfg(not(feature = "parallel"))]
        let cell_list: Vec<Cell> = cell_jobs
            .iter()
            .map(|&(p, q)| Cell::new(atlas, p, q, window_n))
            .collect();
        let mut cells: Vec<Vec<Cell>> = Vec::with_capacity(columns);
        let mut it = cell_list.into_iter();
        for _ in 0..columns {
            cells.push((0..=q_max).map(|_| it.next().unwrap()).collect());
        }

        let restrictions = restriction_pullbacks(atlas)?;

        let build_d = |p: usize, q: usize| -> FlaggedMatrix {
            build_d_matrix(atlas.field, &cells[p][q], &cells[p + 1][q])
        };
        let build_delta = |p: usize, q: usize| -> FlaggedMatrix {
            build_delta_matrix(atlas.field, &cells[p][q], &cells[p][q + 1], &restrictions)
        };

        let d_jobs: Vec<(usize, usize)> = (0..columns - 1)
            .flat_map(|p| (0..=q_max).map(move |q| (p, q)))
            .collect();
        let delta_jobs: Vec<(usize, usize)> = (0..columns)
            .flat_map(|p| (0..q_max).map(move |q| (p, q)))
            .collect();

        #[cfg(feature = "parallel")]
        let d_mats: Vec<FlaggedMatrix> = d_jobs.par_iter().map(|&(p, q)| build_d(p, q)).collect();
        #[cfg(not(feature = "parallel"))]
        let d_mats: Vec<FlaggedMatrix> = d_jobs.iter().map(|&(p, q)| build_d(p, q)).collect();

        #[cfg(feature = "parallel")]
        let delta_mats: Vec<FlaggedMatrix> = delta_jobs
            .par_iter()
            .map(|&(p, q)| build_delta(p, q))
            .collect();
        #[cfg(not(feature = "parallel"))]
        let delta_mats: Vec<FlaggedMatrix> = delta_jobs
            .iter()
            .map(|&(p, q)| build_delta(p, q))
            .collect();

        let mut d: Vec<Vec<FlaggedMatrix>> = Vec::new();
        let mut it = d_mats.into_iter();
        for _ in 0..columns - 1 {
            d.push((0..=q_max).map(|_| it.next().unwrap()).collect());
        }
        let mut delta: Vec<Vec<FlaggedMatrix>> = Vec::new();
        let mut it = delta_mats.into_iter();
        for _ in 0..columns {
            delta.push((0..q_max).map(|_| it.next().unwrap()).collect());
        }

        Ok(Bicomplex {
            field: atlas.field,
            p_max,
            window_n,
            q_max,
            cells,
            d,
            delta,
            boson: None,
            quotient: Vec::new(),
        })
    }

    pub fn d_matrix(&self, p: usize, q: usize) -> Option<&FlaggedMatrix> {
        self.d.get(p).and_then(|col| col.get(q))
    }

    pub fn delta_matrix(&self, p: usize, q: usize) -> Option<&FlaggedMatrix> {
        self.delta.get(p).and_then(|col| col.get(q))
    }

    /// Verifies `δ² = 0`, `d² = 0`, `dδ = δd`, parity block-diagonality and
    /// quotient compatibility on interior columns; returns failure messages.
    pub fn verify_identities(&self) -> Vec<String> {
        let mut failures = Vec::new();
        let columns = self.columns();
        for p in 0..columns {
            for q in 0..=self.q_max {
                let cell = self.cell(p, q);
                for (label, fm, dst) in [
                    ("d", self.d_matrix(p, q), (p + 1, q)),
                    ("delta", self.delta_matrix(p, q), (p, q + 1)),
                ] {
                    let Some(fm) = fm else { continue };
                    let dst = self.cell(dst.0, dst.1);
                    for (j, col) in fm.matrix.columns.iter().enumerate() {
                        let pj = cell.parity_of(j);
                        if col.iter().any(|(r, _)| dst.parity_of(*r as usize) != pj) {
                            failures.push(format!("{label} not parity-diagonal at ({p},{q})"));
                            break;
                        }
                    }
                }
                if q + 2 <= self.q_max {
                    let a = self.delta_matrix(p, q).unwrap();
                    let b = self.delta_matrix(p, q + 1).unwrap();
                    if let Some(j) = first_bad_composition(a, b, None) {
                        failures.push(format!("delta^2 != 0 at ({p},{q}) column {j}"));
                    }
                }
                if p + 2 < columns {
                    let a = self.d_matrix(p, q).unwrap();
                    let b = self.d_matrix(p + 1, q).unwrap();
                    if let Some(j) = first_bad_composition(a, b, None) {
                        failures.push(format!("d^2 != 0 at ({p},{q}) column {j}"));
                    }
                }
                if p + 1 < columns && q < self.q_max {
                    let dq = self.d_matrix(p, q).unwrap();
                    let delta_next = self.delta_matrix(p + 1, q).unwrap();
                    let delta_here = self.delta_matrix(p, q).unwrap();
                    let d_up = self.d_matrix(p, q + 1).unwrap();
                    if let Some(j) =
                        first_bad_composition(dq, delta_next, Some((delta_here, d_up)))
                    {
                        failures.push(format!("d.delta != delta.d at ({p},{q}) column {j}"));
                    }
                }
            }
        }
        if let Some(even) = &self.boson {
            failures.extend(self.verify_quotient(even));
        }
        failures
    }

    /// The quotient commutes with both differentials and is surjective
    /// cell-wise.
    fn verify_quotient(&self, even: &Bicomplex) -> Vec<String> {
        let mut failures = Vec::new();
        for p in 0..self.columns() {
            for q in 0..=self.q_max {
                let qm = &self.quotient[p][q];
                let hit: std::collections::BTreeSet<usize> =
                    qm.iter().flatten().copied().collect();
                if hit.len() != even.cell(p, q).dim {
                    failures.push(format!("quotient not surjective at ({p},{q})"));
                }
                if let (Some(dx), Some(de)) = (self.d_matrix(p, q), even.d_matrix(p, q)) {
                    if !quotient_commutes(dx, de, qm, &self.quotient[p + 1][q]) {
                        failures.push(format!("quotient does not commute with d at ({p},{q})"));
                    }
                }
                if q < self.q_max {
                    let dx = self.delta_matrix(p, q).unwrap();
                    let de = even.delta_matrix(p, q).unwrap();
                    if !quotient_commutes(dx, de, qm, &self.quotient[p][q + 1]) {
                        failures
                            .push(format!("quotient does not commute with delta at ({p},{q})"));
                    }
                }
            }
        }
        failures
    }

    pub fn total_cells(&self, n: usize) -> Vec<(usize, usize)> {
        (0..self.columns())
            .filter_map(|p| {
                let q = n.checked_sub(p)?;
                (q <= self.q_max).then_some((p, q))
            })
            .collect()
    }

    pub fn total_dim(&self, n: usize) -> usize {
        self.total_cells(n)
            .iter()
            .map(|&(p, q)| self.cell(p, q).dim)
            .sum()
    }

    /// `D = δ + (−1)^q d` from total degree `n` to `n + 1`.
    pub fn total_matrix(&self, n: usize) -> Matrix {
        let src_cells = self.total_cells(n);
        let dst_cells = self.total_cells(n + 1);
        let src_off = offsets(&src_cells, |&(p, q)| self.cell(p, q).dim);
        let dst_off = offsets(&dst_cells, |&(p, q)| self.cell(p, q).dim);
        let dst_pos: HashMap<(usize, usize), usize> = dst_cells
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, dst_off[i]))
            .collect();
        let rows: usize = dst_cells.iter().map(|&(p, q)| self.cell(p, q).dim).sum();
        let cols: usize = src_cells.iter().map(|&(p, q)| self.cell(p, q).dim).sum();
        let mut m = Matrix::zero(self.field, rows, cols);
        for (i, &(p, q)) in src_cells.iter().enumerate() {
            let base = src_off[i];
            if q < self.q_max {
                if let Some(&dbase) = dst_pos.get(&(p, q + 1)) {
                    let fm = self.delta_matrix(p, q).unwrap();
                    for (j, col) in fm.matrix.columns.iter().enumerate() {
                        for (r, c) in col {
                            m.add_to(dbase + *r as usize, base + j, c);
                        }
                    }
                }
            }
            if let (Some(&dbase), Some(fm)) = (dst_pos.get(&(p + 1, q)), self.d_matrix(p, q)) {
                let s = self.field.from_i64(if q % 2 == 0 { 1 } else { -1 });
                for (j, col) in fm.matrix.columns.iter().enumerate() {
                    for (r, c) in col {
                        m.add_to(dbase + *r as usize, base + j, &c.mul(&s));
                    }
                }
            }
        }
        m
    }
}

fn build_d_matrix(field: FieldSpec, src: &Cell, dst: &Cell) -> FlaggedMatrix {
    let mut m = Matrix::zero(field, dst.dim, src.dim);
    let mut escaped = vec![false; src.dim];
    for (si, space) in src.spaces.iter().enumerate() {
        let dst_space = &dst.spaces[si];
        for (local, mono) in space.basis.iter().enumerate() {
            let col = src.offsets[si] + local;
            let image =
                FormElement::monomial(space.sig.clone(), field, mono.clone(), field.one()).d();
            for (t, c) in &image.terms {
                match dst_space.index.get(t) {
                    Some(&row) => m.add_to(dst.offsets[si] + row, col, c),
                    None => escaped[col] = true,
                }
            }
        }
    }
    FlaggedMatrix { matrix: m, escaped }
}

fn build_delta_matrix(
    field: FieldSpec,
    src: &Cell,
    dst: &Cell,
    restrictions: &PullbackCache,
) -> FlaggedMatrix {
    let mut m = Matrix::zero(field, dst.dim, src.dim);
    let mut escaped = vec![false; src.dim];
    for (dj, dst_space) in dst.spaces.iter().enumerate() {
        for (t, face) in faces(&dst_space.subset).into_iter().enumerate() {
            let si = src
                .spaces
                .iter()
                .position(|s| s.subset == face)
                .expect("face missing from the intersection lattice");
            let src_space = &src.spaces[si];
            let sign = field.from_i64(if t % 2 == 0 { 1 } else { -1 });
            if src_space.subset[0] == dst_space.subset[0] {
                // same coordinates, wider localization: an index inclusion
                for (local, mono) in src_space.basis.iter().enumerate() {
                    let col = src.offsets[si] + local;
                    let row = dst_space
                        .index
                        .get(mono)
                        .expect("window inclusion failed");
                    m.add_to(dst.offsets[dj] + row, col, &sign);
                }
                continue;
            }
            let key = (src_space.subset.clone(), dst_space.subset.clone());
            let mut pb = restrictions[&key].lock().unwrap();
            for (local, mono) in src_space.basis.iter().enumerate() {
                let col = src.offsets[si] + local;
                let image = pb.apply(&FormElement::monomial(
                    src_space.sig.clone(),
                    field,
                    mono.clone(),
                    field.one(),
                ));
                for (tm, c) in &image.terms {
                    match dst_space.index.get(tm) {
                        Some(&row) => m.add_to(dst.offsets[dj] + row, col, &c.mul(&sign)),
                        None => escaped[col] = true,
                    }
                }
            }
        }
    }
    FlaggedMatrix { matrix: m, escaped }
}

fn offsets<T>(items: &[T], dim: impl Fn(&T) -> usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(items.len());
    let mut acc = 0;
    for it in items {
        out.push(acc);
        acc += dim(it);
    }
    out
}

/// `subset` minus its `t`-th element, for each `t` in order.
fn faces(subset: &[usize]) -> Vec<Vec<usize>> {
    (0..subset.len())
        .map(|t| {
            subset
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != t)
                .map(|(_, &v)| v)
                .collect()
        })
        .collect()
}

type PullbackCache = HashMap<(Vec<usize>, Vec<usize>), std::sync::Mutex<FormPullback>>;

/// One pullback engine per (face ⊂ intersection) pair that changes charts,
/// shared across all form degrees so the power caches pay off.
fn restriction_pullbacks(atlas: &Atlas) -> Result<PullbackCache, AtlasError> {
    let mut out = HashMap::new();
    for subset in &atlas.lattice {
        if subset.len() < 2 {
            continue;
        }
        for face in faces(subset) {
            if face[0] == subset[0] {
                continue;
            }
            let map = atlas.restriction(&face, subset)?;
            out.insert(
                (face.clone(), subset.clone()),
                std::sync::Mutex::new(FormPullback::owned(map)),
            );
        }
    }
    Ok(out)
}

/// Checks `b∘a = 0` (or `b∘a = b'∘a'`) on interior columns; returns the
/// first failing column.
fn first_bad_composition(
    a: &FlaggedMatrix,
    b: &FlaggedMatrix,
    other: Option<(&FlaggedMatrix, &FlaggedMatrix)>,
) -> Option<usize> {
    for j in 0..a.matrix.cols {
        if a.escaped[j]
            || a.matrix.columns[j]
                .iter()
                .any(|(r, _)| b.escaped[*r as usize])
        {
            continue;
        }
        let lhs = b.matrix.apply(&a.matrix.columns[j]);
        let rhs = match other {
            None => Vec::new(),
            Some((a2, b2)) => {
                if a2.escaped[j]
                    || a2.matrix.columns[j]
                        .iter()
                        .any(|(r, _)| b2.escaped[*r as usize])
                {
                    continue;
                }
                b2.matrix.apply(&a2.matrix.columns[j])
            }
        };
        if lhs != rhs {
            return Some(j);
        }
    }
    None
}

fn quotient_commutes(
    dx: &FlaggedMatrix,
    de: &FlaggedMatrix,
    q_src: &[Option<usize>],
    q_dst: &[Option<usize>],
) -> bool {
    for j in 0..q_src.len() {
        if dx.escaped[j] {
            continue;
        }
        let mut lhs: Vec<(u32, crate::scalar::Scalar)> = dx.matrix.columns[j]
            .iter()
            .filter_map(|(r, c)| q_dst[*r as usize].map(|rr| (rr as u32, c.clone())))
            .collect();
        lhs.sort_by_key(|(r, _)| *r);
        let rhs = match q_src[j] {
            Some(jj) => de.matrix.columns[jj].clone(),
            None => Vec::new(),
        };
        if lhs != rhs {
            return false;
        }
    }
    true
}

/// Cell-wise index maps `X → X₀`: a monomial with no odd content corresponds
/// to the same even monomial of the bosonization.
fn quotient_maps(bx: &Bicomplex, even: &Bicomplex) -> Vec<Vec<Vec<Option<usize>>>> {
    let mut out = Vec::new();
    for p in 0..bx.columns() {
        let mut col = Vec::new();
        for q in 0..=bx.q_max {
            let cell = bx.cell(p, q);
            let ecell = even.cell(p, q);
            let mut map = vec![None; cell.dim];
            for (si, space) in cell.spaces.iter().enumerate() {
                let espace = &ecell.spaces[si];
                debug_assert_eq!(space.subset, espace.subset);
                for (local, mono) in space.basis.iter().enumerate() {
                    if mono.odd_content() != 0 {
                        continue;
                    }
                    let emono = FormMonomial {
                        func: crate::ring::SuperMonomial {
                            even_exps: mono.func.even_exps.clone(),
                            odd_mask: 0,
                        },
                        dx_mask: mono.dx_mask,
                        dtheta: Vec::new(),
                    };
                    if let Some(&e) = espace.index.get(&emono) {
                        map[cell.offsets[si] + local] = Some(ecell.offsets[si] + e);
                    }
                }
            }
            col.push(map);
        }
        out.push(col);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::{projective_superspace, split_over_p1};

    fn q() -> FieldSpec {
        FieldSpec::Rational
    }

    #[test]
    fn overlap_sections_p1() {
        let a = projective_superspace(q(), 1, 0);
        let bx = Bicomplex::assemble(&a, 2, 2).unwrap();
        // overlap sections at p = 0: Laurent monomials z^{−2}..z² (5 of them)
        assert_eq!(bx.cell(0, 1).dim, 5);
        // two single charts at window 2: 1, z, z² each
        assert_eq!(bx.cell(0, 0).dim, 6);
    }

    #[test]
    fn superpoint_cells() {
        let a = projective_superspace(q(), 0, 1);
        let bx = Bicomplex::assemble(&a, 3, 0).unwrap();
        // q = 0 row only; Ω^p has basis {(dθ)^p, θ(dθ)^p}
        assert_eq!(bx.q_max, 0);
        for p in 0..=3 {
            assert_eq!(bx.cell(p, 0).dim, 2, "p={p}");
        }
        assert_eq!(bx.cell(1, 0).even_dim, 1);
        assert_eq!(bx.cell(1, 0).odd_dim, 1);
        // no localization anywhere: the total differential is exactly square-zero
        for n in 0..=2 {
            let comp = bx.total_matrix(n + 1).compose(&bx.total_matrix(n));
            assert!(comp.is_zero());
        }
    }

    #[test]
    fn p11_overlap_count_and_identities() {
        let a = projective_superspace(q(), 1, 1);
        let bx = Bicomplex::assemble(&a, 2, 1).unwrap();
        // {z⁻¹,1,z} × {1,θ} on the overlap at p = 0
        assert_eq!(bx.cell(0, 1).dim, 6);
        let failures = bx.verify_identities();
        assert!(failures.is_empty(), "{failures:?}");
    }

    #[test]
    fn identities_on_p1_and_split() {
        let a = projective_superspace(q(), 1, 0);
        let bx = Bicomplex::assemble(&a, 2, 3).unwrap();
        let failures = bx.verify_identities();
        assert!(failures.is_empty(), "{failures:?}");
        let s = split_over_p1(q(), &[-1, -3]);
        let bs = Bicomplex::assemble(&s, 3, 3).unwrap();
        let failures = bs.verify_identities();
        assert!(failures.is_empty(), "{failures:?}");
    }

    #[test]
    fn restriction_entries_p1() {
        let a = projective_superspace(q(), 1, 0);
        let bx = Bicomplex::assemble(&a, 1, 2).unwrap();
        let fm = bx.delta_matrix(0, 0).unwrap();
        let src = bx.cell(0, 0);
        let dst = bx.cell(0, 1);
        assert_eq!(fm.matrix.rows, dst.dim);
        assert_eq!(fm.matrix.cols, src.dim);
        // restriction of z from chart 0 hits z with a single entry
        let z_col = *src.spaces[0]
            .index
            .iter()
            .find(|(m, _)| m.func.even_exps == vec![1])
            .map(|(_, i)| i)
            .unwrap();
        assert_eq!(fm.matrix.columns[z_col].len(), 1);
        // restriction of w from chart 1 lands on z⁻¹
        let w_col = src.offsets[1]
            + *src.spaces[1]
                .index
                .iter()
                .find(|(m, _)| m.func.even_exps == vec![1])
                .map(|(_, i)| i)
                .unwrap();
        let col = &fm.matrix.columns[w_col];
        assert_eq!(col.len(), 1);
        let (row, c) = &col[0];
        let target_mono = &dst.spaces[0].basis[*row as usize];
        assert_eq!(target_mono.func.even_exps, vec![-1]);
        assert!(c.is_one() || c.neg().is_one());
    }

    #[test]
    fn quotient_to_bosonization() {
        let a = projective_superspace(q(), 1, 1);
        let bx = Bicomplex::assemble(&a, 3, 2).unwrap();
        let failures = bx.verify_identities();
        assert!(failures.is_empty(), "{failures:?}");
        // kernel of the quotient in column 0 is spanned by odd-content monomials
        let cell = bx.cell(0, 0);
        for idx in 0..cell.dim {
            let (_, mono) = cell.monomial_at(idx);
            let killed = bx.quotient[0][0][idx].is_none();
            assert_eq!(killed, mono.odd_content() != 0);
        }
    }
}
