//! Global supervariety descriptions: charts, overlap localizations and
//! transition ring maps, with symbolic validation, plus constructors for the
//! standard examples (projective superspaces, split bundles over ℙ¹ and
//! ℙ¹×ℙ¹, the supergrassmannian of 1|1-planes in 2|2-space, and nonsplit
//! gluings over ℙ¹ from an even cocycle).

use crate::parse::{parse_polynomial, ParseError};
use crate::ring::{ChartSignature, RingMap, SuperPolynomial};
use crate::scalar::FieldSpec;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

/// Overlap data for an unordered chart pair `i < j`.
#[derive(Clone, Debug)]
pub struct PairOverlap {
    /// Even coordinates of chart `i` invertible on the overlap.
    pub inv_first: BTreeSet<usize>,
    /// Even coordinates of chart `j` invertible on the overlap.
    pub inv_second: BTreeSet<usize>,
    /// Chart-`j` coordinates expressed in chart-`i` functions.
    pub to_first: RingMap,
    /// Chart-`i` coordinates expressed in chart-`j` functions.
    pub to_second: RingMap,
}

/// A supervariety presented by charts and transition maps.
#[derive(Clone, Debug)]
pub struct Atlas {
    pub name: String,
    pub field: FieldSpec,
    pub charts: Vec<Arc<ChartSignature>>,
    pub pairs: BTreeMap<(usize, usize), PairOverlap>,
    /// Sorted chart subsets (size ≥ 1) with nonempty intersection.
    pub lattice: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AtlasError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Ring(#[from] crate::ring::RingError),
    #[error("invalid gluing data: {0}")]
    Gluing(String),
}

impl Atlas {
    /// Even|odd dimension, shared by all charts.
    pub fn dimension(&self) -> (usize, usize) {
        (self.charts[0].n(), self.charts[0].m())
    }

    pub fn chart_count(&self) -> usize {
        self.charts.len()
    }

    /// Largest Čech row index: one less than the deepest intersection size.
    pub fn q_max(&self) -> usize {
        self.lattice.iter().map(|i| i.len()).max().unwrap_or(1) - 1
    }

    pub fn intersections(&self, size: usize) -> Vec<&Vec<usize>> {
        self.lattice.iter().filter(|i| i.len() == size).collect()
    }

    /// Inverted even coordinates of chart `min(I)` on the intersection `U_I`.
    pub fn intersection_inverted(&self, subset: &[usize]) -> BTreeSet<usize> {
        let m = subset[0];
        let mut inv = BTreeSet::new();
        for &k in &subset[1..] {
            inv.extend(self.pairs[&(m, k)].inv_first.iter().copied());
        }
        inv
    }

    /// Coordinates of `U_I`: chart `min(I)` localized on the overlap.
    pub fn section_signature(&self, subset: &[usize]) -> Arc<ChartSignature> {
        self.charts[subset[0]].localized(self.intersection_inverted(subset))
    }

    /// The ring map expressing `U_I`-sections in `U_J`-coordinates, for
    /// `I ⊆ J` (both sorted, in the lattice).
    pub fn restriction(&self, from: &[usize], to: &[usize]) -> Result<RingMap, AtlasError> {
        debug_assert!(from.iter().all(|i| to.contains(i)));
        let src_sig = self.section_signature(from);
        let dst_sig = self.section_signature(to);
        let (m_from, m_to) = (from[0], to[0]);
        if m_from == m_to {
            let id = RingMap::identity(dst_sig.clone(), self.field);
            return Ok(RingMap {
                source: src_sig,
                ..id
            });
        }
        // to[0] < from[0] since to ⊇ from
        let pair = &self.pairs[&(m_to, m_from)];
        let map = pair.to_first.with_localized_target(&dst_sig);
        Ok(map.with_localized_source(src_sig)?)
    }

    /// Checks mutual inverses, triple cocycles and dimension consistency.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let (n, m) = self.dimension();
        for (idx, sig) in self.charts.iter().enumerate() {
            if sig.n() != n || sig.m() != m {
                report
                    .failures
                    .push(format!("chart {idx} has dimension {}|{}", sig.n(), sig.m()));
            }
        }
        for (&(i, j), pair) in &self.pairs {
            if let Err(e) = pair.to_first.validate() {
                report.failures.push(format!("transition {j}->{i}: {e}"));
                continue;
            }
            if let Err(e) = pair.to_second.validate() {
                report.failures.push(format!("transition {i}->{j}: {e}"));
                continue;
            }
            // mutual inverses on the overlap
            let loc_j = self.charts[j].localized(pair.inv_second.iter().copied());
            let to_first_loc = match pair.to_first.with_localized_source(loc_j) {
                Ok(m) => m,
                Err(e) => {
                    report.failures.push(format!("transition {j}->{i}: {e}"));
                    continue;
                }
            };
            let round = to_first_loc.compose(&pair.to_second);
            if !is_identity_on_coordinates(&round) {
                report
                    .failures
                    .push(format!("transitions {i}<->{j} are not mutually inverse"));
            }
        }
        for triple in self.lattice.iter().filter(|s| s.len() == 3) {
            if let Err(msg) = self.check_triple(triple) {
                report.failures.push(msg);
            }
        }
        report
    }

    /// `φ_{ij} ∘ φ_{jk} = φ_{ik}` on the triple overlap.
    fn check_triple(&self, triple: &[usize]) -> Result<(), String> {
        let (i, j, k) = (triple[0], triple[1], triple[2]);
        let tri_sig = self.section_signature(triple);
        // middle chart localized at both overlaps
        let mid_inv: BTreeSet<usize> = self.pairs[&(i, j)]
            .inv_second
            .iter()
            .chain(self.pairs[&(j, k)].inv_first.iter())
            .copied()
            .collect();
        let mid_sig = self.charts[j].localized(mid_inv);
        let a = self.pairs[&(i, j)]
            .to_first
            .with_localized_target(&tri_sig)
            .with_localized_source(mid_sig.clone())
            .map_err(|e| format!("triple {triple:?}: {e}"))?;
        let b = self.pairs[&(j, k)].to_first.with_localized_target(&mid_sig);
        let composed = a.compose(&b);
        let direct = self.pairs[&(i, k)].to_first.with_localized_target(&tri_sig);
        if composed.even_images != direct.even_images
            || composed.odd_images != direct.odd_images
        {
            return Err(format!("cocycle fails on triple {triple:?}"));
        }
        Ok(())
    }

    /// The underlying even variety: odd coordinates killed everywhere.
    pub fn bosonize(&self) -> Atlas {
        let charts: Vec<Arc<ChartSignature>> =
            self.charts.iter().map(|s| s.bosonized()).collect();
        let pairs = self
            .pairs
            .iter()
            .map(|(&(i, j), pair)| {
                let src_first = pair.to_first.source.bosonized();
                let dst_first = pair.to_first.target.bosonized();
                let src_second = pair.to_second.source.bosonized();
                let dst_second = pair.to_second.target.bosonized();
                (
                    (i, j),
                    PairOverlap {
                        inv_first: pair.inv_first.clone(),
                        inv_second: pair.inv_second.clone(),
                        to_first: pair.to_first.bosonize(&src_first, &dst_first),
                        to_second: pair.to_second.bosonize(&src_second, &dst_second),
                    },
                )
            })
            .collect();
        Atlas {
            name: format!("{}_even", self.name),
            field: self.field,
            charts,
            pairs,
            lattice: self.lattice.clone(),
        }
    }
}

/// Every coordinate maps to itself (source and target may differ only by
/// localization).
fn is_identity_on_coordinates(map: &RingMap) -> bool {
    let tgt = &map.target;
    map.even_images
        .iter()
        .enumerate()
        .all(|(k, img)| {
            *img == SuperPolynomial::even_coordinate(tgt.clone(), map.field, k)
        })
        && map
            .odd_images
            .iter()
            .enumerate()
            .all(|(k, img)| {
                *img == SuperPolynomial::odd_coordinate(tgt.clone(), map.field, k)
            })
}

/// All nonempty subsets of `0..count`, sorted by size then lexicographically.
fn full_lattice(count: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u32..(1 << count))
        .map(|mask| (0..count).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    out.sort_by(|a: &Vec<usize>, b: &Vec<usize>| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

/// The standard atlas of ℙ^{n|m}; `n = 0` gives the 0|m superpoint.
pub fn projective_superspace(field: FieldSpec, n: usize, m: usize) -> Atlas {
    let odd_names: Vec<String> = (0..m).map(|l| format!("t{l}")).collect();
    let charts: Vec<Arc<ChartSignature>> = (0..=n)
        .map(|i| {
            let evens: Vec<String> = (0..=n).filter(|&g| g != i).map(|g| format!("x{g}")).collect();
            ChartSignature::new(evens, odd_names.clone())
        })
        .collect();
    let local_index = |chart: usize, global: usize| -> usize {
        (0..=n).filter(|&g| g != chart).position(|g| g == global).unwrap()
    };
    let mut pairs = BTreeMap::new();
    for i in 0..=n {
        for j in (i + 1)..=n {
            let build = |tgt_chart: usize, src_chart: usize| -> RingMap {
                let tgt = charts[tgt_chart].localized([local_index(tgt_chart, src_chart)]);
                let pivot =
                    SuperPolynomial::even_coordinate(tgt.clone(), field, local_index(tgt_chart, src_chart));
                let pivot_inv = pivot.invert().unwrap();
                let even_images = (0..=n)
                    .filter(|&g| g != src_chart)
                    .map(|g| {
                        if g == tgt_chart {
                            pivot_inv.clone()
                        } else {
                            SuperPolynomial::even_coordinate(
                                tgt.clone(),
                                field,
                                local_index(tgt_chart, g),
                            )
                            .mul(&pivot_inv)
                        }
                    })
                    .collect();
                let odd_images = (0..m)
                    .map(|l| {
                        SuperPolynomial::odd_coordinate(tgt.clone(), field, l).mul(&pivot_inv)
                    })
                    .collect();
                RingMap::new(charts[src_chart].clone(), tgt, field, even_images, odd_images)
                    .unwrap()
            };
            pairs.insert(
                (i, j),
                PairOverlap {
                    inv_first: BTreeSet::from([local_index(i, j)]),
                    inv_second: BTreeSet::from([local_index(j, i)]),
                    to_first: build(i, j),
                    to_second: build(j, i),
                },
            );
        }
    }
    Atlas {
        name: format!("P{n}_{m}"),
        field,
        charts,
        pairs,
        lattice: full_lattice(n + 1),
    }
}

/// Base curve/surface of a split or glued construction.
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
pub enum SplitBase {
    P1,
    P1xP1,
}

/// Split supervariety over ℙ¹: odd coordinates are frame coordinates of
/// `⊕ 𝒪(aⱼ)`, so the transition is `θ'ⱼ = z^{aⱼ}·θⱼ`.
pub fn split_over_p1(field: FieldSpec, twists: &[i32]) -> Atlas {
    let m = twists.len();
    let odd_names: Vec<String> = (0..m).map(|l| format!("t{l}")).collect();
    let chart0 = ChartSignature::new(vec!["z".to_string()], odd_names.clone());
    let chart1 = ChartSignature::new(vec!["w".to_string()], odd_names.clone());
    let build = |tgt: &Arc<ChartSignature>, src: &Arc<ChartSignature>| -> RingMap {
        let tgt_loc = tgt.localized([0]);
        let coord = SuperPolynomial::even_coordinate(tgt_loc.clone(), field, 0);
        let even_images = vec![coord.invert().unwrap()];
        let odd_images = (0..m)
            .map(|j| {
                SuperPolynomial::odd_coordinate(tgt_loc.clone(), field, j)
                    .mul(&coord.pow(twists[j]).unwrap())
            })
            .collect();
        RingMap::new(src.clone(), tgt_loc, field, even_images, odd_images).unwrap()
    };
    let pair = PairOverlap {
        inv_first: BTreeSet::from([0]),
        inv_second: BTreeSet::from([0]),
        to_first: build(&chart0, &chart1),
        to_second: build(&chart1, &chart0),
    };
    Atlas {
        name: format!("split_P1_{twists:?}"),
        field,
        charts: vec![chart0, chart1],
        pairs: BTreeMap::from([((0, 1), pair)]),
        lattice: full_lattice(2),
    }
}

/// Split supervariety over ℙ¹×ℙ¹ with twists `(aⱼ, bⱼ)` per odd coordinate.
/// Charts are indexed `2s + t` with affine cells `s` and `t` on the factors.
pub fn split_over_p1xp1(field: FieldSpec, twists: &[(i32, i32)]) -> Atlas {
    let m = twists.len();
    let odd_names: Vec<String> = (0..m).map(|l| format!("t{l}")).collect();
    let charts: Vec<Arc<ChartSignature>> = (0..4)
        .map(|c| {
            let (s, t) = (c / 2, c % 2);
            ChartSignature::new(vec![format!("x{s}"), format!("y{t}")], odd_names.clone())
        })
        .collect();
    let mut pairs = BTreeMap::new();
    for i in 0..4usize {
        for j in (i + 1)..4 {
            let (si, ti) = (i / 2, i % 2);
            let (sj, tj) = (j / 2, j % 2);
            let cross_x = si != sj;
            let cross_y = ti != tj;
            let inv: BTreeSet<usize> = match (cross_x, cross_y) {
                (true, false) => BTreeSet::from([0]),
                (false, true) => BTreeSet::from([1]),
                (true, true) => BTreeSet::from([0, 1]),
                (false, false) => unreachable!(),
            };
            let build = |tgt_chart: usize, src_chart: usize| -> RingMap {
                let tgt = charts[tgt_chart].localized(inv.iter().copied());
                let x = SuperPolynomial::even_coordinate(tgt.clone(), field, 0);
                let y = SuperPolynomial::even_coordinate(tgt.clone(), field, 1);
                let even_images = vec![
                    if cross_x { x.invert().unwrap() } else { x.clone() },
                    if cross_y { y.invert().unwrap() } else { y.clone() },
                ];
                let odd_images = (0..m)
                    .map(|l| {
                        let mut img = SuperPolynomial::odd_coordinate(tgt.clone(), field, l);
                        if cross_x {
                            img = img.mul(&x.pow(twists[l].0).unwrap());
                        }
                        if cross_y {
                            img = img.mul(&y.pow(twists[l].1).unwrap());
                        }
                        img
                    })
                    .collect();
                RingMap::new(charts[src_chart].clone(), tgt, field, even_images, odd_images)
                    .unwrap()
            };
            pairs.insert(
                (i, j),
                PairOverlap {
                    inv_first: inv.clone(),
                    inv_second: inv.clone(),
                    to_first: build(i, j),
                    to_second: build(j, i),
                },
            );
        }
    }
    Atlas {
        name: format!("split_P1xP1_{twists:?}"),
        field,
        charts,
        pairs,
        lattice: full_lattice(4),
    }
}

pub fn split(field: FieldSpec, base: SplitBase, twists_p1: &[i32], twists_p1xp1: &[(i32, i32)]) -> Atlas {
    match base {
        SplitBase::P1 => split_over_p1(field, twists_p1),
        SplitBase::P1xP1 => split_over_p1xp1(field, twists_p1xp1),
    }
}

/// The supergrassmannian of 1|1-subspaces of 2|2-space, on its four big
/// cells. Chart `2e + o` normalizes even column `e` and odd column `o` of
/// the coordinate matrix; the bosonization is the ℙ¹×ℙ¹ atlas and the odd
/// conormal data is two copies of 𝒪(−1,−1). The transitions acquire the
/// nilpotent corrections that make the variety nonsplit.
pub fn supergrassmannian_1122(field: FieldSpec) -> Atlas {
    let odd_names: Vec<String> = vec!["t0".into(), "t1".into()];
    let charts: Vec<Arc<ChartSignature>> = (0..4)
        .map(|c| {
            let (e, o) = (c / 2, c % 2);
            ChartSignature::new(vec![format!("x{e}"), format!("y{o}")], odd_names.clone())
        })
        .collect();

    // Crossing the even factor, target chart coordinates (x, y, t0, t1):
    //   x' = 1/x, y' = y + x⁻¹·t0t1, t0' = x⁻¹·t0, t1' = −x⁻¹·t1.
    let cross_e = |tgt: &Arc<ChartSignature>, src: &Arc<ChartSignature>| -> RingMap {
        let x = SuperPolynomial::even_coordinate(tgt.clone(), field, 0);
        let y = SuperPolynomial::even_coordinate(tgt.clone(), field, 1);
        let t0 = SuperPolynomial::odd_coordinate(tgt.clone(), field, 0);
        let t1 = SuperPolynomial::odd_coordinate(tgt.clone(), field, 1);
        let xinv = x.invert().unwrap();
        RingMap::new(
            src.clone(),
            tgt.clone(),
            field,
            vec![xinv.clone(), y.add(&xinv.mul(&t0).mul(&t1))],
            vec![xinv.mul(&t0), xinv.mul(&t1).neg()],
        )
        .unwrap()
    };
    // Crossing the odd factor:
    //   x' = x − y⁻¹·t0t1, y' = 1/y, t0' = −y⁻¹·t0, t1' = y⁻¹·t1.
    let cross_o = |tgt: &Arc<ChartSignature>, src: &Arc<ChartSignature>| -> RingMap {
        let x = SuperPolynomial::even_coordinate(tgt.clone(), field, 0);
        let y = SuperPolynomial::even_coordinate(tgt.clone(), field, 1);
        let t0 = SuperPolynomial::odd_coordinate(tgt.clone(), field, 0);
        let t1 = SuperPolynomial::odd_coordinate(tgt.clone(), field, 1);
        let yinv = y.invert().unwrap();
        RingMap::new(
            src.clone(),
            tgt.clone(),
            field,
            vec![x.sub(&yinv.mul(&t0).mul(&t1)), yinv.clone()],
            vec![yinv.mul(&t0).neg(), yinv.mul(&t1)],
        )
        .unwrap()
    };

    let mut pairs = BTreeMap::new();
    for i in 0..4usize {
        for j in (i + 1)..4 {
            let (ei, oi) = (i / 2, i % 2);
            let (ej, oj) = (j / 2, j % 2);
            let cross_x = ei != ej;
            let cross_y = oi != oj;
            let inv: BTreeSet<usize> = match (cross_x, cross_y) {
                (true, false) => BTreeSet::from([0]),
                (false, true) => BTreeSet::from([1]),
                (true, true) => BTreeSet::from([0, 1]),
                (false, false) => unreachable!(),
            };
            let build = |tgt_chart: usize, src_chart: usize| -> RingMap {
                let tgt_loc = charts[tgt_chart].localized(inv.iter().copied());
                match (cross_x, cross_y) {
                    (true, false) => cross_e(&tgt_loc, &charts[src_chart]),
                    (false, true) => cross_o(&tgt_loc, &charts[src_chart]),
                    (true, true) => {
                        // through the chart sharing the even cell with the target
                        let mid_chart = 2 * (tgt_chart / 2) + (src_chart % 2);
                        let mid_loc = charts[mid_chart].localized([0]);
                        let first = cross_o(&tgt_loc, &mid_loc);
                        let second = cross_e(&mid_loc, &charts[src_chart]);
                        first.compose(&second)
                    }
                    (false, false) => unreachable!(),
                }
            };
            pairs.insert(
                (i, j),
                PairOverlap {
                    inv_first: inv.clone(),
                    inv_second: inv.clone(),
                    to_first: build(i, j),
                    to_second: build(j, i),
                },
            );
        }
    }
    Atlas {
        name: "G_1122".into(),
        field,
        charts,
        pairs,
        lattice: full_lattice(4),
    }
}

/// An even gluing cocycle and (for odd rank 3) a first-order lift, defining
/// a possibly nonsplit supervariety over ℙ¹ by twisting the split
/// transition with the automorphism `α(f) = f + v(f)`, `α(θ) = θ + φ(θ)`.
///
/// `cocycle[(i, j)]` is the Laurent coefficient `P(z)` of `θᵢθⱼ·∂_z`;
/// `lift[j]` (rank 3 only) is the coefficient of `θ₀θ₁θ₂` in `φ(θⱼ)`.
/// All polynomials are in the chart-0 overlap coordinate `z`.
#[derive(Clone, Debug, Default, serde::Serialize, serde::Deserialize)]
pub struct GluingData {
    pub twists: Vec<i32>,
    pub cocycle: Vec<(usize, usize, String)>,
    #[serde(default)]
    pub lift: Vec<String>,
}

pub fn build_glued(field: FieldSpec, data: &GluingData) -> Result<Atlas, AtlasError> {
    let rank = data.twists.len();
    if rank < 2 || rank > 3 {
        return Err(AtlasError::Gluing(format!(
            "odd rank must be 2 or 3, got {rank}"
        )));
    }
    if rank == 2 && !data.lift.is_empty() {
        return Err(AtlasError::Gluing(
            "operator lift only applies to rank 3".into(),
        ));
    }
    let mut atlas = split_over_p1(field, &data.twists);
    let overlap = atlas.charts[0].localized([0]);

    // v = Σ P_{ij}(z)·θᵢθⱼ·∂_z as the correction to α(z)
    let z = SuperPolynomial::even_coordinate(overlap.clone(), field, 0);
    let mut v_of_z = SuperPolynomial::zero(overlap.clone(), field);
    for (i, j, text) in &data.cocycle {
        if *i >= *j || *j >= rank {
            return Err(AtlasError::Gluing(format!("bad cocycle index ({i},{j})")));
        }
        let coeff = parse_polynomial(&overlap, field, text)?;
        if !coeff.is_zero() && coeff.parity() != Some(0) {
            return Err(AtlasError::Gluing(format!(
                "cocycle coefficient ({i},{j}) must be even"
            )));
        }
        if coeff.terms.keys().any(|m| m.odd_mask != 0) {
            return Err(AtlasError::Gluing(format!(
                "cocycle coefficient ({i},{j}) must be a function of z only"
            )));
        }
        let ti = SuperPolynomial::odd_coordinate(overlap.clone(), field, *i);
        let tj = SuperPolynomial::odd_coordinate(overlap.clone(), field, *j);
        v_of_z = v_of_z.add(&coeff.mul(&ti).mul(&tj));
    }

    // φ(θ_j) = Q_j(z)·θ₀θ₁θ₂ for rank 3
    let mut phi_of_t: Vec<SuperPolynomial> = Vec::new();
    if rank == 3 {
        let mut top = SuperPolynomial::one(overlap.clone(), field);
        for j in 0..3 {
            top = top.mul(&SuperPolynomial::odd_coordinate(overlap.clone(), field, j));
        }
        for (j, text) in data.lift.iter().enumerate() {
            let q = parse_polynomial(&overlap, field, text)?;
            if q.terms.keys().any(|m| m.odd_mask != 0) {
                return Err(AtlasError::Gluing(format!(
                    "lift coefficient {j} must be a function of z only"
                )));
            }
            phi_of_t.push(q.mul(&top));
        }
        while phi_of_t.len() < 3 {
            phi_of_t.push(SuperPolynomial::zero(overlap.clone(), field));
        }
    } else {
        phi_of_t = (0..rank)
            .map(|_| SuperPolynomial::zero(overlap.clone(), field))
            .collect();
    }

    let alpha = RingMap::new(
        overlap.clone(),
        overlap.clone(),
        field,
        vec![z.add(&v_of_z)],
        (0..rank)
            .map(|j| {
                SuperPolynomial::odd_coordinate(overlap.clone(), field, j).add(&phi_of_t[j])
            })
            .collect(),
    )?;
    // α⁻¹ flips the corrections: the error terms vanish in Λ^{≥4}
    let alpha_inv = RingMap::new(
        overlap.clone(),
        overlap.clone(),
        field,
        vec![z.sub(&v_of_z)],
        (0..rank)
            .map(|j| {
                SuperPolynomial::odd_coordinate(overlap.clone(), field, j).sub(&phi_of_t[j])
            })
            .collect(),
    )?;
    {
        let round = alpha.compose(&alpha_inv);
        let id = RingMap::identity(overlap.clone(), field);
        if round.even_images != id.even_images || round.odd_images != id.odd_images {
            return Err(AtlasError::Gluing(
                "cocycle automorphism is not invertible to this order".into(),
            ));
        }
    }

    // twist the gluing: chart-1 coordinates land in α of the split image,
    // and the inverse leg is split⁻¹ ∘ α⁻¹
    let split_back = atlas_split_back(field, &data.twists, &atlas.charts[1].clone(), &overlap);
    let pair = atlas.pairs.get_mut(&(0, 1)).unwrap();
    pair.to_first = alpha.compose(&pair.to_first);
    pair.to_second = split_back.compose(&alpha_inv);
    atlas.name = format!("glued_P1_{:?}", data.twists);
    Ok(atlas)
}

/// The split transition from chart 0 into chart 1 (the inverse leg).
fn atlas_split_back(
    field: FieldSpec,
    twists: &[i32],
    chart1: &Arc<ChartSignature>,
    overlap0: &Arc<ChartSignature>,
) -> RingMap {
    let tgt = chart1.localized([0]);
    let w = SuperPolynomial::even_coordinate(tgt.clone(), field, 0);
    let even_images = vec![w.invert().unwrap()];
    let odd_images = (0..twists.len())
        .map(|j| {
            SuperPolynomial::odd_coordinate(tgt.clone(), field, j)
                .mul(&w.pow(twists[j]).unwrap())
        })
        .collect();
    RingMap {
        source: overlap0.clone(),
        target: tgt,
        field,
        even_images,
        odd_images,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::Rational
    }

    #[test]
    fn p1_atlas() {
        let a = projective_superspace(q(), 1, 0);
        assert_eq!(a.chart_count(), 2);
        assert!(a.validate().passed());
    }

    #[test]
    fn superpoint_single_chart() {
        let a = projective_superspace(q(), 0, 3);
        assert_eq!(a.chart_count(), 1);
        assert_eq!(a.dimension(), (0, 3));
        assert!(a.validate().passed());
    }

    #[test]
    fn p11_cocycle_and_bosonization() {
        let a = projective_superspace(q(), 1, 1);
        assert!(a.validate().passed());
        let b = a.bosonize();
        assert!(b.validate().passed());
        assert_eq!(b.dimension(), (1, 0));
    }

    #[test]
    fn p21_triples_validate() {
        let a = projective_superspace(q(), 2, 1);
        assert_eq!(a.chart_count(), 3);
        assert!(a.validate().passed());
    }

    #[test]
    fn split_p1_zero_twists_is_plain_p1() {
        let a = split_over_p1(q(), &[]);
        assert!(a.validate().passed());
        assert_eq!(a.dimension(), (1, 0));
    }

    #[test]
    fn split_p1xp1_gr_conormal() {
        let a = split_over_p1xp1(q(), &[(-1, -1), (-1, -1)]);
        assert!(a.validate().passed());
        assert_eq!(a.dimension(), (2, 2));
        assert_eq!(a.q_max(), 3);
    }

    #[test]
    fn grassmannian_validates_and_bosonizes() {
        let a = supergrassmannian_1122(q());
        assert_eq!(a.chart_count(), 4);
        let report = a.validate();
        assert!(report.passed(), "{:?}", report.failures);
        let b = a.bosonize();
        assert!(b.validate().passed());
        // bosonization agrees with the ℙ¹×ℙ¹ transitions chart by chart
        let p1xp1 = split_over_p1xp1(q(), &[]);
        for (key, pair) in &b.pairs {
            let expected = &p1xp1.pairs[key];
            assert_eq!(pair.to_first.even_images, expected.to_first.even_images);
        }
    }

    #[test]
    fn corrupted_transition_fails_validation() {
        let mut a = projective_superspace(q(), 1, 1);
        // corrupt θ' = θ/z into θ' = θ
        let pair = a.pairs.get_mut(&(0, 1)).unwrap();
        let tgt = pair.to_first.target.clone();
        pair.to_first.odd_images =
            vec![SuperPolynomial::odd_coordinate(tgt, q(), 0)];
        assert!(!a.validate().passed());
    }

    #[test]
    fn glued_rank2_nonsplit_validates() {
        let data = GluingData {
            twists: vec![-1, -3],
            cocycle: vec![(0, 1, "z^-1".into())],
            lift: vec![],
        };
        let a = build_glued(q(), &data).unwrap();
        let report = a.validate();
        assert!(report.passed(), "{:?}", report.failures);
    }

    #[test]
    fn glued_zero_cocycle_equals_split() {
        let data = GluingData {
            twists: vec![-1, -3],
            cocycle: vec![],
            lift: vec![],
        };
        let a = build_glued(q(), &data).unwrap();
        let s = split_over_p1(q(), &[-1, -3]);
        let pa = &a.pairs[&(0, 1)];
        let ps = &s.pairs[&(0, 1)];
        assert_eq!(pa.to_first.even_images, ps.to_first.even_images);
        assert_eq!(pa.to_first.odd_images, ps.to_first.odd_images);
        assert_eq!(pa.to_second.even_images, ps.to_second.even_images);
        assert_eq!(pa.to_second.odd_images, ps.to_second.odd_images);
    }

    #[test]
    fn glued_rank3_validates() {
        let data = GluingData {
            twists: vec![-1, -1, -1],
            cocycle: vec![(0, 1, "z^-1".into())],
            lift: vec!["0".into(), "z^-1".into(), "0".into()],
        };
        let a = build_glued(q(), &data).unwrap();
        let report = a.validate();
        assert!(report.passed(), "{:?}", report.failures);
        assert_eq!(a.dimension(), (1, 3));
    }

    #[test]
    fn restriction_maps_p1() {
        let a = projective_superspace(q(), 1, 0);
        // restriction of w ∈ 𝒪(U₁) to U₀∩U₁ in chart-0 coordinates is z⁻¹
        let map = a.restriction(&[1], &[0, 1]).unwrap();
        let w = SuperPolynomial::even_coordinate(a.charts[1].clone(), q(), 0);
        let img = map.substitute(&w);
        let overlap = a.section_signature(&[0, 1]);
        let z = SuperPolynomial::even_coordinate(overlap, q(), 0);
        assert_eq!(img, z.invert().unwrap());
        // restriction from U₀ is the identity on z
        let map0 = a.restriction(&[0], &[0, 1]).unwrap();
        let z0 = SuperPolynomial::even_coordinate(a.charts[0].clone(), q(), 0);
        let img0 = map0.substitute(&z0);
        assert_eq!(img0.terms, z0.terms);
    }
}
