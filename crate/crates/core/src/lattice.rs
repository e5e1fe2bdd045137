//! Integral intersection lattices, homology classes and manifold models.
//!
//! A [`HomologyClass`] is a coefficient vector tied to the lattice it was
//! built over by a content-derived [`LatticeId`]. Pairing classes from two
//! different lattices is an error; there is no coercion between bases.

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of a lattice, derived from its basis labels and Gram matrix.
///
/// Two lattices built from the same data share an id, so a class computed in
/// `cp2_blowup(1)` pairs with one computed in `blow_up(cp2_blowup(0))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeId(pub u64);

/// Integer coefficient vector over the basis of one lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomologyClass {
    basis_ref: LatticeId,
    coeffs: Vec<i64>,
}

impl HomologyClass {
    pub fn basis_ref(&self) -> LatticeId {
        self.basis_ref
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Greatest common divisor of the coefficients (0 for the zero class).
    pub fn content(&self) -> i64 {
        self.coeffs.iter().fold(0i64, |g, &c| num_integer::gcd(g, c))
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    fn same_basis(&self, other: &Self) -> Result<()> {
        if self.basis_ref != other.basis_ref {
            return Err(Error::BasisMismatch { expected: self.basis_ref, found: other.basis_ref });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_basis(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.checked_add(*b).ok_or(Error::Overflow))
            .collect::<Result<_>>()?;
        Ok(Self { basis_ref: self.basis_ref, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1)?)
    }

    pub fn scale(&self, k: i64) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(|c| c.checked_mul(k).ok_or(Error::Overflow)).collect::<Result<_>>()?;
        Ok(Self { basis_ref: self.basis_ref, coeffs })
    }
}

/// Counts of positive, negative and zero eigenvalues of a symmetric form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Inertia {
    pub fn signature(&self) -> i64 {
        self.positive as i64 - self.negative as i64
    }
}

/// Named basis together with its Gram matrix of intersection numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionLattice {
    id: LatticeId,
    names: Vec<String>,
    gram: Vec<Vec<i64>>,
}

impl IntersectionLattice {
    /// Builds a lattice. Only the shape is checked here; symmetry and
    /// unimodularity are reported by [`validate_model`].
    pub fn new(names: Vec<String>, gram: Vec<Vec<i64>>) -> Result<Self> {
        let n = names.len();
        if gram.len() != n || gram.iter().any(|row| row.len() != n) {
            return Err(Error::MalformedLattice(format!("{n} basis labels but Gram matrix is not {n}x{n}")));
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(Error::MalformedLattice(format!("duplicate basis label `{a}`")));
            }
        }
        let mut h = DefaultHasher::new();
        names.hash(&mut h);
        gram.hash(&mut h);
        Ok(Self { id: LatticeId(h.finish()), names, gram })
    }

    /// Diagonal lattice with the given labels.
    pub fn diagonal(names: &[&str], diag: &[i64]) -> Result<Self> {
        let n = diag.len();
        let gram = (0..n).map(|i| (0..n).map(|j| if i == j { diag[i] } else { 0 }).collect()).collect();
        Self::new(names.iter().map(|s| s.to_string()).collect(), gram)
    }

    pub fn id(&self) -> LatticeId {
        self.id
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.names.iter().position(|n| n == label)
    }

    pub fn class(&self, coeffs: Vec<i64>) -> Result<HomologyClass> {
        if coeffs.len() != self.rank() {
            return Err(Error::RankMismatch { rank: self.rank(), found: coeffs.len() });
        }
        Ok(HomologyClass { basis_ref: self.id, coeffs })
    }

    pub fn zero(&self) -> HomologyClass {
        HomologyClass { basis_ref: self.id, coeffs: vec![0; self.rank()] }
    }

    pub fn basis_class(&self, i: usize) -> HomologyClass {
        let mut c = self.zero();
        c.coeffs[i] = 1;
        c
    }

    /// Class from `(label, coefficient)` terms; repeated labels accumulate.
    pub fn class_from_terms(&self, terms: &[(&str, i64)]) -> Result<HomologyClass> {
        let mut c = self.zero();
        for (label, k) in terms {
            let i = self.index_of(label).ok_or_else(|| Error::UnknownBasisLabel(label.to_string()))?;
            c.coeffs[i] += k;
        }
        Ok(c)
    }

    pub fn contains(&self, c: &HomologyClass) -> Result<()> {
        if c.basis_ref != self.id {
            return Err(Error::BasisMismatch { expected: self.id, found: c.basis_ref });
        }
        Ok(())
    }

    pub fn pair(&self, a: &HomologyClass, b: &HomologyClass) -> Result<i64> {
        self.contains(a)?;
        self.contains(b)?;
        let mut acc: i128 = 0;
        for (i, &ai) in a.coeffs.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            let row = &self.gram[i];
            let mut rowsum: i128 = 0;
            for (j, &bj) in b.coeffs.iter().enumerate() {
                rowsum += row[j] as i128 * bj as i128;
            }
            acc = acc.checked_add(ai as i128 * rowsum).ok_or(Error::Overflow)?;
        }
        i64::try_from(acc).map_err(|_| Error::Overflow)
    }

    pub fn square(&self, a: &HomologyClass) -> Result<i64> {
        self.pair(a, a)
    }

    /// Row vector `G·a`, so that `x·a = sum_i x_i (G·a)_i`.
    pub fn dual_row(&self, a: &HomologyClass) -> Result<Vec<i64>> {
        self.contains(a)?;
        self.gram
            .iter()
            .map(|row| {
                let s: i128 = row.iter().zip(&a.coeffs).map(|(g, c)| *g as i128 * *c as i128).sum();
                i64::try_from(s).map_err(|_| Error::Overflow)
            })
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.rank();
        (0..n).all(|i| (0..i).all(|j| self.gram[i][j] == self.gram[j][i]))
    }

    /// Indices whose basis vector has negative square and is orthogonal to
    /// every other basis vector. These form the diagonal negative-definite
    /// summand used for pruning and canonical ordering.
    pub fn diagonal_tail(&self) -> Vec<bool> {
        let n = self.rank();
        (0..n)
            .map(|i| self.gram[i][i] < 0 && (0..n).all(|j| j == i || (self.gram[i][j] == 0 && self.gram[j][i] == 0)))
            .collect()
    }

    /// Congruence diagonalisation over the rationals. Returns the diagonal
    /// entries; their product is the determinant and their signs give the
    /// inertia. `None` for a non-symmetric Gram matrix.
    fn rational_diagonal(&self) -> Option<Vec<BigRational>> {
        if !self.is_symmetric() {
            return None;
        }
        let n = self.rank();
        let mut m: Vec<Vec<BigRational>> =
            self.gram.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).collect();
        let mut diag = Vec::with_capacity(n);
        for k in 0..n {
            if m[k][k].is_zero() {
                if let Some(p) = (k + 1..n).find(|&p| !m[p][p].is_zero()) {
                    m.swap(k, p);
                    for row in m.iter_mut() {
                        row.swap(k, p);
                    }
                } else if let Some(p) = (k + 1..n).find(|&p| !m[k][p].is_zero()) {
                    // row/col k += row/col p makes the pivot 2*m[k][p] != 0
                    for j in 0..n {
                        let v = m[p][j].clone();
                        m[k][j] += v;
                    }
                    for i in 0..n {
                        let v = m[i][p].clone();
                        m[i][k] += v;
                    }
                }
            }
            let pivot = m[k][k].clone();
            if pivot.is_zero() {
                diag.push(pivot);
                continue;
            }
            for i in k + 1..n {
                if m[i][k].is_zero() {
                    continue;
                }
                let f = &m[i][k] / &pivot;
                for j in k..n {
                    let v = &f * &m[k][j];
                    m[i][j] -= v;
                }
                for r in m.iter_mut().skip(k) {
                    let v = &f * &r[k];
                    r[i] -= v;
                }
            }
            diag.push(pivot);
        }
        Some(diag)
    }

    pub fn inertia(&self) -> Option<Inertia> {
        let d = self.rational_diagonal()?;
        Some(Inertia {
            positive: d.iter().filter(|x| x.is_positive()).count(),
            negative: d.iter().filter(|x| x.is_negative()).count(),
            zero: d.iter().filter(|x| x.is_zero()).count(),
        })
    }

    pub fn determinant(&self) -> Option<BigInt> {
        let d = self.rational_diagonal()?;
        let p = d.iter().fold(BigRational::one(), |acc, x| acc * x);
        debug_assert!(p.is_integer());
        Some(p.to_integer())
    }

    /// Renders a class in basis labels, e.g. `3H - 2e1 - e2`.
    pub fn format_class(&self, c: &HomologyClass) -> String {
        let mut out = String::new();
        for (name, &k) in self.names.iter().zip(&c.coeffs) {
            if k == 0 {
                continue;
            }
            let mag = k.unsigned_abs();
            let term = if mag == 1 { name.clone() } else { format!("{mag}{name}") };
            if out.is_empty() {
                if k < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if k < 0 { " - " } else { " + " });
            }
            out.push_str(&term);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFlags {
    pub rational: bool,
    pub ruled: bool,
    /// The lattice is the full second homology of a closed manifold, so it
    /// must be unimodular and satisfy `K^2 = 2 chi + 3 sigma`.
    pub closed: bool,
    pub minimal_known: Option<bool>,
}

/// Lattice shadow of a closed symplectic 4-manifold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifoldModel {
    pub name: String,
    pub lattice: Arc<IntersectionLattice>,
    pub canonical: HomologyClass,
    pub euler: i64,
    pub signature: i64,
    pub flags: ModelFlags,
    /// Fiber class of a ruling, when the model carries one.
    pub fiber: Option<HomologyClass>,
}

impl ManifoldModel {
    pub fn new(
        name: impl Into<String>,
        lattice: IntersectionLattice,
        canonical: Vec<i64>,
        euler: i64,
        signature: i64,
        flags: ModelFlags,
    ) -> Result<Self> {
        let canonical = lattice.class(canonical)?;
        Ok(Self { name: name.into(), lattice: Arc::new(lattice), canonical, euler, signature, flags, fiber: None })
    }

    pub fn with_fiber(mut self, fiber: HomologyClass) -> Result<Self> {
        self.lattice.contains(&fiber)?;
        self.fiber = Some(fiber);
        Ok(self)
    }

    pub fn id(&self) -> LatticeId {
        self.lattice.id()
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn class(&self, coeffs: Vec<i64>) -> Result<HomologyClass> {
        self.lattice.class(coeffs)
    }

    pub fn class_from_terms(&self, terms: &[(&str, i64)]) -> Result<HomologyClass> {
        self.lattice.class_from_terms(terms)
    }

    pub fn pair(&self, a: &HomologyClass, b: &HomologyClass) -> Result<i64> {
        self.lattice.pair(a, b)
    }

    pub fn square(&self, a: &HomologyClass) -> Result<i64> {
        self.lattice.square(a)
    }

    pub fn canonical_pairing(&self, a: &HomologyClass) -> Result<i64> {
        self.lattice.pair(&self.canonical, a)
    }

    pub fn format_class(&self, c: &HomologyClass) -> String {
        self.lattice.format_class(c)
    }

    /// Neither rational nor ruled. Distinct exceptional spheres in such a
    /// manifold are disjoint.
    pub fn is_rational_or_ruled(&self) -> bool {
        self.flags.rational || self.flags.ruled
    }
}

/// Genus `1 + (A^2 + K.A)/2` of an embedded representative of `A`.
///
/// Returned as an exact rational; it is an integer iff `A^2 + K.A` is even.
pub fn adjunction_genus(m: &ManifoldModel, a: &HomologyClass) -> Result<Ratio<i64>> {
    let s = m.square(a)?;
    let k = m.canonical_pairing(a)?;
    Ok(Ratio::from_integer(1) + Ratio::new(s + k, 2))
}

/// Integral adjunction genus, or `None` if it is fractional or negative.
pub fn embedded_genus(m: &ManifoldModel, a: &HomologyClass) -> Result<Option<u32>> {
    let g = adjunction_genus(m, a)?;
    if !g.is_integer() || *g.numer() < 0 {
        return Ok(None);
    }
    Ok(u32::try_from(g.to_integer()).ok())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NotSymmetric {
        row: usize,
        col: usize,
    },
    NotUnimodular {
        determinant: String,
    },
    /// Signature recomputed from the Gram matrix disagrees with the stored one.
    SignatureMismatch {
        stored: i64,
        computed: i64,
    },
    /// `K^2 != 2 chi + 3 sigma` on a closed lattice.
    CanonicalRelation {
        k_squared: i64,
        expected: i64,
    },
    CanonicalOffLattice,
    FiberSquare {
        square: i64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotSymmetric { row, col } => {
                write!(f, "gram not symmetric (entry {row},{col})")
            }
            Violation::NotUnimodular { determinant } => {
                write!(f, "not unimodular (det = {determinant})")
            }
            Violation::SignatureMismatch { stored, computed } => {
                write!(f, "signature mismatch: stored {stored}, gram gives {computed}")
            }
            Violation::CanonicalRelation { k_squared, expected } => {
                write!(f, "K^2 = {k_squared} but 2chi + 3sigma = {expected}")
            }
            Violation::CanonicalOffLattice => write!(f, "canonical class not in model lattice"),
            Violation::FiberSquare { square } => write!(f, "fiber class has square {square}, expected 0"),
        }
    }
}

/// Checks every model invariant and returns all violations found.
///
/// Signature recomputation and `K^2 = 2 chi + 3 sigma` are only enforced on
/// closed lattices: a sublattice model stores the characteristic numbers of
/// the ambient manifold, not of the sublattice.
pub fn validate_model(m: &ManifoldModel) -> std::result::Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let l = &m.lattice;
    let n = l.rank();
    'outer: for i in 0..n {
        for j in 0..i {
            if l.gram()[i][j] != l.gram()[j][i] {
                out.push(Violation::NotSymmetric { row: i, col: j });
                break 'outer;
            }
        }
    }
    if l.contains(&m.canonical).is_err() {
        out.push(Violation::CanonicalOffLattice);
    }
    if let Some(f) = &m.fiber {
        if let Ok(s) = l.square(f) {
            if s != 0 {
                out.push(Violation::FiberSquare { square: s });
            }
        }
    }
    if m.flags.closed && l.is_symmetric() {
        if let Some(det) = l.determinant() {
            if det.abs() != BigInt::one() {
                out.push(Violation::NotUnimodular { determinant: det.to_string() });
            }
        }
        if let Some(inertia) = l.inertia() {
            let computed = inertia.signature();
            if computed != m.signature {
                out.push(Violation::SignatureMismatch { stored: m.signature, computed });
            }
        }
        if let Ok(k2) = l.square(&m.canonical) {
            let expected = 2 * m.euler + 3 * m.signature;
            if k2 != expected {
                out.push(Violation::CanonicalRelation { k_squared: k2, expected });
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// A manifold with a marked embedded symplectic surface `V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticPair {
    pub model: ManifoldModel,
    pub divisor: HomologyClass,
    pub divisor_genus: u32,
}

impl SymplecticPair {
    /// Checks that `divisor` lies in the model lattice and that its
    /// adjunction genus equals `divisor_genus`.
    pub fn new(model: ManifoldModel, divisor: HomologyClass, divisor_genus: u32) -> Result<Self> {
        model.lattice.contains(&divisor)?;
        let g = adjunction_genus(&model, &divisor)?;
        if g != Ratio::from_integer(divisor_genus as i64) {
            return Err(Error::InvalidPair(format!("adjunction genus of V is {g}, declared {divisor_genus}")));
        }
        Ok(Self { model, divisor, divisor_genus })
    }

    pub fn divisor_square(&self) -> i64 {
        self.model.square(&self.divisor).expect("divisor checked on construction")
    }

    pub fn divisor_pairing(&self, a: &HomologyClass) -> Result<i64> {
        self.model.pair(&self.divisor, a)
    }
}
