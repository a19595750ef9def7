//! Truncated two-mode Fock space and the dense operator algebra on it.
//!
//! Basis states are occupation pairs `(n1, n2)` ordered lexicographically in
//! `(n1 + n2, n1)`. Both cutoff schemes produce downward-closed sets, so the
//! annihilation operators are represented exactly; creation operators drop
//! every transition that would leave the retained basis.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CohqError, Result};

pub type C64 = Complex64;

/// Largest basis we are willing to hold as dense complex matrices.
pub const MAX_DIM: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffScheme {
    /// Keep `n1 + n2 <= N`.
    TotalQuanta,
    /// Keep `n1 <= N` and `n2 <= N`.
    PerMode,
}

impl fmt::Display for CutoffScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutoffScheme::TotalQuanta => f.write_str("total"),
            CutoffScheme::PerMode => f.write_str("permode"),
        }
    }
}

impl std::str::FromStr for CutoffScheme {
    type Err = CohqError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "total" | "total_quanta" | "totalquanta" => Ok(CutoffScheme::TotalQuanta),
            "permode" | "per_mode" | "per-mode" => Ok(CutoffScheme::PerMode),
            other => Err(CohqError::config(
                "scheme",
                format!("unknown truncation scheme `{other}` (expected total|permode)"),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    One,
    Two,
}

/// Serialized form of a [`FockSpace`]; enough to rebuild it exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    pub scheme: CutoffScheme,
    pub cutoff: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(into = "SpaceDescriptor", try_from = "SpaceDescriptor")]
pub struct FockSpace {
    scheme: CutoffScheme,
    cutoff: usize,
    basis: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
}

impl FockSpace {
    pub fn new(scheme: CutoffScheme, cutoff: usize) -> Result<Self> {
        if cutoff == 0 {
            return Err(CohqError::config("cutoff", "cutoff must be at least 1"));
        }
        let n1 = cutoff
            .checked_add(1)
            .ok_or_else(|| CohqError::config("cutoff", "cutoff overflows"))?;
        let dim = match scheme {
            CutoffScheme::TotalQuanta => n1.checked_mul(cutoff + 2).map(|d| d / 2),
            CutoffScheme::PerMode => n1.checked_mul(n1),
        }
        .ok_or_else(|| CohqError::config("cutoff", "basis dimension overflows"))?;
        if dim > MAX_DIM {
            return Err(CohqError::config(
                "cutoff",
                format!("basis dimension {dim} exceeds the dense limit {MAX_DIM}"),
            ));
        }

        let mut basis = Vec::with_capacity(dim);
        let max_total = match scheme {
            CutoffScheme::TotalQuanta => cutoff,
            CutoffScheme::PerMode => 2 * cutoff,
        };
        for total in 0..=max_total {
            for a in 0..=total {
                let b = total - a;
                if scheme == CutoffScheme::PerMode && (a > cutoff || b > cutoff) {
                    continue;
                }
                basis.push((a, b));
            }
        }
        debug_assert_eq!(basis.len(), dim);
        let index = basis.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Ok(FockSpace {
            scheme,
            cutoff,
            basis,
            index,
        })
    }

    pub fn shared(scheme: CutoffScheme, cutoff: usize) -> Result<Arc<Self>> {
        Self::new(scheme, cutoff).map(Arc::new)
    }

    pub fn scheme(&self) -> CutoffScheme {
        self.scheme
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[(usize, usize)] {
        &self.basis
    }

    pub fn state(&self, i: usize) -> (usize, usize) {
        self.basis[i]
    }

    pub fn index_of(&self, n1: usize, n2: usize) -> Option<usize> {
        self.index.get(&(n1, n2)).copied()
    }

    pub fn contains(&self, n1: usize, n2: usize) -> bool {
        self.index.contains_key(&(n1, n2))
    }

    pub fn descriptor(&self) -> SpaceDescriptor {
        SpaceDescriptor {
            scheme: self.scheme,
            cutoff: self.cutoff,
            dim: self.dim(),
        }
    }

    /// Is `(n1, n2)` at least `margin` quanta below the cutoff?
    pub fn is_interior(&self, n1: usize, n2: usize, margin: usize) -> bool {
        if margin > self.cutoff {
            return false;
        }
        let limit = self.cutoff - margin;
        match self.scheme {
            CutoffScheme::TotalQuanta => n1 + n2 <= limit,
            CutoffScheme::PerMode => n1 <= limit && n2 <= limit,
        }
    }

    pub fn interior_indices(&self, margin: usize) -> Result<Vec<usize>> {
        self.check_margin(margin)?;
        Ok(self
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| self.is_interior(a, b, margin))
            .map(|(i, _)| i)
            .collect())
    }

    fn check_margin(&self, margin: usize) -> Result<()> {
        if margin > self.cutoff {
            return Err(CohqError::config(
                "margin",
                format!("margin {margin} exceeds the cutoff {}", self.cutoff),
            ));
        }
        Ok(())
    }

    pub fn same_as(&self, other: &FockSpace) -> bool {
        self.scheme == other.scheme && self.cutoff == other.cutoff
    }

    fn label(&self) -> String {
        format!("{}({})", self.scheme, self.cutoff)
    }
}

impl PartialEq for FockSpace {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl From<FockSpace> for SpaceDescriptor {
    fn from(space: FockSpace) -> Self {
        space.descriptor()
    }
}

impl TryFrom<SpaceDescriptor> for FockSpace {
    type Error = CohqError;

    fn try_from(d: SpaceDescriptor) -> Result<Self> {
        let space = FockSpace::new(d.scheme, d.cutoff)?;
        if space.dim() != d.dim {
            return Err(CohqError::config(
                "space.dim",
                format!("descriptor dim {} disagrees with enumeration {}", d.dim, space.dim()),
            ));
        }
        Ok(space)
    }
}

fn ensure_same(a: &FockSpace, b: &FockSpace) -> Result<()> {
    if a.same_as(b) {
        Ok(())
    } else {
        Err(CohqError::SpaceMismatch {
            left: a.label(),
            right: b.label(),
        })
    }
}

/// Dense operator over a [`FockSpace`] basis.
#[derive(Clone, Debug)]
pub struct LinOp {
    space: Arc<FockSpace>,
    matrix: DMatrix<C64>,
}

impl LinOp {
    pub fn from_matrix(space: Arc<FockSpace>, matrix: DMatrix<C64>) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(CohqError::Usage(format!(
                "matrix is {}x{}, space has dim {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(LinOp { space, matrix })
    }

    pub fn zeros(space: Arc<FockSpace>) -> Self {
        let d = space.dim();
        LinOp {
            space,
            matrix: DMatrix::zeros(d, d),
        }
    }

    pub fn identity(space: Arc<FockSpace>) -> Self {
        let d = space.dim();
        LinOp {
            space,
            matrix: DMatrix::identity(d, d),
        }
    }

    /// Diagonal operator with entry `f(n1, n2)` on each basis state.
    pub fn diagonal(space: Arc<FockSpace>, f: impl Fn(usize, usize) -> C64) -> Self {
        let d = space.dim();
        let mut matrix = DMatrix::zeros(d, d);
        for (i, &(a, b)) in space.basis().iter().enumerate() {
            matrix[(i, i)] = f(a, b);
        }
        LinOp { space, matrix }
    }

    /// Truncation of the normal-ordered monomial
    /// `(a1†)^c1 (a2†)^c2 a1^d1 a2^d2`, i.e. `create = [c1, c2]`,
    /// `annihilate = [d1, d2]`.
    ///
    /// For a downward-closed basis this equals the product of the truncated
    /// ladder matrices taken in the same order.
    pub fn normal_ordered(space: Arc<FockSpace>, create: [usize; 2], annihilate: [usize; 2]) -> Self {
        let d = space.dim();
        let mut matrix = DMatrix::zeros(d, d);
        for (col, &(n1, n2)) in space.basis().iter().enumerate() {
            if n1 < annihilate[0] || n2 < annihilate[1] {
                continue;
            }
            let m1 = n1 - annihilate[0] + create[0];
            let m2 = n2 - annihilate[1] + create[1];
            let Some(row) = space.index_of(m1, m2) else {
                continue;
            };
            let amp = ladder_factor(n1, annihilate[0], create[0]) * ladder_factor(n2, annihilate[1], create[1]);
            matrix[(row, col)] = C64::new(amp, 0.0);
        }
        LinOp { space, matrix }
    }

    /// Linear combination `Σ c_i · op_i` of operators on one space.
    pub fn combination(terms: &[(C64, &LinOp)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| CohqError::Usage("empty operator combination".into()))?;
        let mut out = LinOp::zeros(first.space.clone());
        for (c, op) in terms {
            ensure_same(&out.space, &op.space)?;
            out.matrix += &op.matrix * *c;
        }
        Ok(out)
    }

    pub fn space(&self) -> &Arc<FockSpace> {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn add(&self, other: &LinOp) -> Result<LinOp> {
        ensure_same(&self.space, &other.space)?;
        Ok(LinOp {
            space: self.space.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &LinOp) -> Result<LinOp> {
        ensure_same(&self.space, &other.space)?;
        Ok(LinOp {
            space: self.space.clone(),
            matrix: &self.matrix - &other.matrix,
        })
    }

    pub fn scale(&self, c: C64) -> LinOp {
        LinOp {
            space: self.space.clone(),
            matrix: &self.matrix * c,
        }
    }

    pub fn mul(&self, other: &LinOp) -> Result<LinOp> {
        ensure_same(&self.space, &other.space)?;
        Ok(LinOp {
            space: self.space.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn adjoint(&self) -> LinOp {
        LinOp {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// `AB − BA`
    pub fn commutator(&self, other: &LinOp) -> Result<LinOp> {
        ensure_same(&self.space, &other.space)?;
        Ok(LinOp {
            space: self.space.clone(),
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        })
    }

    pub fn apply(&self, ket: &Ket) -> Result<Ket> {
        ensure_same(&self.space, &ket.space)?;
        Ok(Ket {
            space: self.space.clone(),
            amplitudes: &self.matrix * &ket.amplitudes,
        })
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|c| (0..d).all(|r| r == c || self.matrix[(r, c)] == C64::new(0.0, 0.0)))
    }

    /// Largest absolute matrix entry.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation of `self − other`.
    pub fn max_abs_diff(&self, other: &LinOp) -> Result<f64> {
        ensure_same(&self.space, &other.space)?;
        Ok(self
            .matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `max ‖A e_v‖` over interior basis vectors `e_v`.
    ///
    /// This is the norm used for every "holds on interior vectors" check.
    pub fn interior_norm(&self, margin: usize) -> Result<f64> {
        let cols = if margin == 0 {
            (0..self.dim()).collect()
        } else {
            self.space.interior_indices(margin)?
        };
        Ok(cols
            .into_iter()
            .map(|c| self.matrix.column(c).norm())
            .fold(0.0, f64::max))
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint()).unwrap_or(f64::INFINITY)
    }
}

fn ladder_factor(n: usize, down: usize, up: usize) -> f64 {
    // sqrt(n!/(n-down)!) * sqrt((n-down+up)!/(n-down)!)
    let mut acc = 1.0_f64;
    for k in (n - down + 1)..=n {
        acc *= k as f64;
    }
    let base = n - down;
    for k in (base + 1)..=(base + up) {
        acc *= k as f64;
    }
    acc.sqrt()
}

pub fn make_space(scheme: CutoffScheme, cutoff: usize) -> Result<Arc<FockSpace>> {
    FockSpace::shared(scheme, cutoff)
}

pub fn annihilation(space: &Arc<FockSpace>, mode: Mode) -> LinOp {
    match mode {
        Mode::One => LinOp::normal_ordered(space.clone(), [0, 0], [1, 0]),
        Mode::Two => LinOp::normal_ordered(space.clone(), [0, 0], [0, 1]),
    }
}

pub fn creation(space: &Arc<FockSpace>, mode: Mode) -> LinOp {
    annihilation(space, mode).adjoint()
}

pub fn number(space: &Arc<FockSpace>, mode: Mode) -> LinOp {
    match mode {
        Mode::One => LinOp::diagonal(space.clone(), |a, _| C64::new(a as f64, 0.0)),
        Mode::Two => LinOp::diagonal(space.clone(), |_, b| C64::new(b as f64, 0.0)),
    }
}

/// Diagonal 0/1 projector onto basis states at least `margin` below the cutoff.
pub fn interior_projector(space: &Arc<FockSpace>, margin: usize) -> Result<LinOp> {
    space.check_margin(margin)?;
    Ok(LinOp::diagonal(space.clone(), |a, b| {
        if space.is_interior(a, b, margin) {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// Complex amplitude vector over a [`FockSpace`] basis.
#[derive(Clone, Debug)]
pub struct Ket {
    space: Arc<FockSpace>,
    amplitudes: DVector<C64>,
}

impl Ket {
    pub fn from_amplitudes(space: Arc<FockSpace>, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(CohqError::Usage(format!(
                "ket has {} amplitudes, space has dim {}",
                amplitudes.len(),
                space.dim()
            )));
        }
        Ok(Ket { space, amplitudes })
    }

    pub fn zeros(space: Arc<FockSpace>) -> Self {
        let d = space.dim();
        Ket {
            space,
            amplitudes: DVector::zeros(d),
        }
    }

    pub fn basis(space: &Arc<FockSpace>, n1: usize, n2: usize) -> Result<Self> {
        let i = space
            .index_of(n1, n2)
            .ok_or_else(|| CohqError::Usage(format!("|{n1},{n2}> is outside the truncated basis")))?;
        let mut k = Ket::zeros(space.clone());
        k.amplitudes[i] = C64::new(1.0, 0.0);
        Ok(k)
    }

    pub fn space(&self) -> &Arc<FockSpace> {
        &self.space
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, n1: usize, n2: usize) -> C64 {
        self.space
            .index_of(n1, n2)
            .map(|i| self.amplitudes[i])
            .unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(&self) -> Result<Ket> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(CohqError::ZeroNorm);
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, c: C64) -> Ket {
        Ket {
            space: self.space.clone(),
            amplitudes: &self.amplitudes * c,
        }
    }

    pub fn add(&self, other: &Ket) -> Result<Ket> {
        ensure_same(&self.space, &other.space)?;
        Ok(Ket {
            space: self.space.clone(),
            amplitudes: &self.amplitudes + &other.amplitudes,
        })
    }

    pub fn sub(&self, other: &Ket) -> Result<Ket> {
        ensure_same(&self.space, &other.space)?;
        Ok(Ket {
            space: self.space.clone(),
            amplitudes: &self.amplitudes - &other.amplitudes,
        })
    }
}

/// `⟨ψ|ψ'⟩`, conjugate-linear in the first argument.
pub fn inner(bra: &Ket, ket: &Ket) -> Result<C64> {
    ensure_same(&bra.space, &ket.space)?;
    Ok(bra.amplitudes.dotc(&ket.amplitudes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn dimensions_follow_the_scheme() {
        assert_eq!(FockSpace::new(CutoffScheme::TotalQuanta, 2).unwrap().dim(), 6);
        assert_eq!(FockSpace::new(CutoffScheme::PerMode, 3).unwrap().dim(), 16);
        for n in 1..12 {
            let t = FockSpace::new(CutoffScheme::TotalQuanta, n).unwrap();
            assert_eq!(t.dim(), (n + 1) * (n + 2) / 2);
            let p = FockSpace::new(CutoffScheme::PerMode, n).unwrap();
            assert_eq!(p.dim(), (n + 1) * (n + 1));
        }
    }

    #[test]
    fn basis_ordering_is_by_total_then_n1() {
        let s = FockSpace::new(CutoffScheme::TotalQuanta, 1).unwrap();
        assert_eq!(s.basis(), &[(0, 0), (0, 1), (1, 0)]);
        let p = FockSpace::new(CutoffScheme::PerMode, 3).unwrap();
        let keys: Vec<_> = p.basis().iter().map(|&(a, b)| (a + b, a)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(keys, sorted);
        for (i, &(a, b)) in p.basis().iter().enumerate() {
            assert_eq!(p.index_of(a, b), Some(i));
        }
    }

    #[test]
    fn zero_cutoff_and_huge_cutoff_are_config_errors() {
        assert!(matches!(
            FockSpace::new(CutoffScheme::PerMode, 0),
            Err(CohqError::Config { .. })
        ));
        assert!(matches!(
            FockSpace::new(CutoffScheme::PerMode, usize::MAX),
            Err(CohqError::Config { .. })
        ));
        assert!(matches!(
            FockSpace::new(CutoffScheme::PerMode, 500),
            Err(CohqError::Config { .. })
        ));
    }

    #[test]
    fn descriptor_roundtrip_keeps_indices() {
        let s = FockSpace::new(CutoffScheme::PerMode, 4).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"scheme":"per_mode","cutoff":4,"dim":25}"#);
        let back: FockSpace = serde_json::from_str(&json).unwrap();
        assert_eq!(back.basis(), s.basis());
        let bad = r#"{"scheme":"per_mode","cutoff":4,"dim":24}"#;
        assert!(serde_json::from_str::<FockSpace>(bad).is_err());
    }

    #[test]
    fn ladder_actions() {
        let s = make_space(CutoffScheme::TotalQuanta, 4).unwrap();
        let a1 = annihilation(&s, Mode::One);
        let a2 = annihilation(&s, Mode::Two);
        let out = a1.apply(&Ket::basis(&s, 2, 0).unwrap()).unwrap();
        let expected = Ket::basis(&s, 1, 0).unwrap().scale(c(2f64.sqrt(), 0.0));
        assert!(out.sub(&expected).unwrap().norm() < 1e-15);
        let vac = a2.apply(&Ket::basis(&s, 0, 0).unwrap()).unwrap();
        assert_eq!(vac.norm(), 0.0);
    }

    #[test]
    fn canonical_commutator_on_interior() {
        let s = make_space(CutoffScheme::PerMode, 6).unwrap();
        for mode in [Mode::One, Mode::Two] {
            let a = annihilation(&s, mode);
            let comm = a.commutator(&a.adjoint()).unwrap();
            let defect = comm.sub(&LinOp::identity(s.clone())).unwrap();
            assert!(defect.interior_norm(1).unwrap() <= 1e-13);
            // boundary rows are where truncation shows up
            assert!(defect.interior_norm(0).unwrap() > 1.0);
        }
    }

    #[test]
    fn number_operator_is_exact_diagonal() {
        let s = make_space(CutoffScheme::PerMode, 5).unwrap();
        let a1 = annihilation(&s, Mode::One);
        let n1 = a1.adjoint().mul(&a1).unwrap();
        assert!(n1.is_diagonal());
        assert!(n1.max_abs_diff(&number(&s, Mode::One)).unwrap() < 1e-14);
    }

    #[test]
    fn normal_ordered_matches_ladder_products() {
        let s = make_space(CutoffScheme::PerMode, 5).unwrap();
        let a1 = annihilation(&s, Mode::One);
        let a2 = annihilation(&s, Mode::Two);
        let c1 = a1.adjoint();
        let c2 = a2.adjoint();
        let prod = c1.mul(&c1).unwrap().mul(&c2).unwrap().mul(&a1).unwrap().mul(&a2).unwrap();
        let direct = LinOp::normal_ordered(s.clone(), [2, 1], [1, 1]);
        assert!(prod.max_abs_diff(&direct).unwrap() < 1e-12);
    }

    #[test]
    fn algebra_basics() {
        let s = make_space(CutoffScheme::TotalQuanta, 3).unwrap();
        let a = annihilation(&s, Mode::One).add(&creation(&s, Mode::Two)).unwrap();
        assert_eq!(a.commutator(&a).unwrap().max_abs(), 0.0);
        let v = Ket::basis(&s, 1, 0).unwrap();
        assert_eq!(inner(&v, &v).unwrap(), c(1.0, 0.0));
        let i = LinOp::identity(s.clone());
        let lhs = i.scale(c(0.0, 1.0)).adjoint();
        assert_eq!(lhs.max_abs_diff(&i.scale(c(0.0, -1.0))).unwrap(), 0.0);
        let z = Ket::basis(&s, 0, 1).unwrap().scale(c(0.0, 2.0));
        // conjugate-linear in the bra
        assert_eq!(inner(&z, &Ket::basis(&s, 0, 1).unwrap()).unwrap(), c(0.0, -2.0));
    }

    #[test]
    fn space_mismatch_is_a_usage_error() {
        let s1 = make_space(CutoffScheme::TotalQuanta, 3).unwrap();
        let s2 = make_space(CutoffScheme::PerMode, 3).unwrap();
        let r = LinOp::identity(s1).mul(&LinOp::identity(s2));
        assert!(matches!(r, Err(CohqError::SpaceMismatch { .. })));
    }

    #[test]
    fn interior_projector_examples() {
        let t = make_space(CutoffScheme::TotalQuanta, 2).unwrap();
        let vac = interior_projector(&t, 2).unwrap();
        let kept: Vec<_> = (0..t.dim()).filter(|&i| vac.matrix()[(i, i)].re == 1.0).collect();
        assert_eq!(kept, vec![t.index_of(0, 0).unwrap()]);
        assert!(matches!(interior_projector(&t, 3), Err(CohqError::Config { .. })));
        let t3 = make_space(CutoffScheme::TotalQuanta, 3).unwrap();
        let p = interior_projector(&t3, 2).unwrap();
        let kept: Vec<_> = (0..t3.dim()).filter(|&i| p.matrix()[(i, i)].re == 1.0).map(|i| t3.state(i)).collect();
        assert_eq!(kept, vec![(0, 0), (0, 1), (1, 0)]);
        let p0 = interior_projector(&t, 0).unwrap();
        assert_eq!(p0.max_abs_diff(&LinOp::identity(t.clone())).unwrap(), 0.0);
        let pm = make_space(CutoffScheme::PerMode, 3).unwrap();
        let p = interior_projector(&pm, 1).unwrap();
        let rank: f64 = (0..pm.dim()).map(|i| p.matrix()[(i, i)].re).sum();
        assert_eq!(rank, 9.0);
    }
}
