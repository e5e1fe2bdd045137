//! Dimension counts for absolute, relative and multilevel curves, and the
//! vanishing rules for purely relative invariants.
//!
//! Constraint degrees are real (doubled) degrees; the index `I(A, g)` and
//! the per-level indices are complex dimensions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{HomologyClass, ManifoldModel, SymplecticPair};
use crate::library::{completion_q, Completion};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct ContactVector {
    orders: Vec<i64>,
}

impl ContactVector {
    pub fn new(orders: Vec<i64>) -> Result<Self> {
        if orders.iter().any(|&s| s < 1) {
            return Err(Error::InvalidContact);
        }
        Ok(Self { orders })
    }

    pub fn orders(&self) -> &[i64] {
        &self.orders
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn total(&self) -> i64 {
        self.orders.iter().sum()
    }
}

impl TryFrom<Vec<i64>> for ContactVector {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ContactVector> for Vec<i64> {
    fn from(c: ContactVector) -> Self {
        c.orders
    }
}

/// `2(-K.A + (g - 1) + n)`: total degree the `n` insertions must carry.
pub fn absolute_constraint_degree(m: &ManifoldModel, a: &HomologyClass, genus: u32, insertions: u32) -> Result<i64> {
    let ka = m.canonical_pairing(a)?;
    Ok(2 * (-ka + i64::from(genus) - 1 + i64::from(insertions)))
}

/// `2(-K.A + (g - 1) + n + r - sum s_i)`, with `sum s_i = A.V` required.
pub fn relative_constraint_degree(
    p: &SymplecticPair,
    a: &HomologyClass,
    genus: u32,
    contacts: &ContactVector,
    insertions: u32,
) -> Result<i64> {
    let av = p.divisor_pairing(a)?;
    if contacts.total() != av {
        return Err(Error::ContactMismatch { total: contacts.total(), expected: av });
    }
    let ka = p.model.canonical_pairing(a)?;
    let r = contacts.len() as i64;
    Ok(2 * (-ka + i64::from(genus) - 1 + i64::from(insertions) + r - contacts.total()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VanishingRule {
    /// `(CP^2, H)`, `A = dH` with `d > 0`, genus 0.
    LineClass,
    /// `(K + V).A < g - 1`: the constraint degree exceeds what relative
    /// insertions can absorb.
    AdjointBound,
}

impl VanishingRule {
    pub fn tag(self) -> &'static str {
        match self {
            VanishingRule::LineClass => "line-class",
            VanishingRule::AdjointBound => "adjoint-bound",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "reason")]
pub enum VanishingVerdict {
    Vanishes(VanishingRule),
    /// No rule applies. This is not a claim that the invariant is nonzero.
    NotExcluded,
}

impl VanishingVerdict {
    pub fn vanishes(self) -> bool {
        matches!(self, VanishingVerdict::Vanishes(_))
    }
}

/// `(CP^2, H)` up to relabelling: rank one, form `[1]`, divisor the generator.
fn is_plane_with_line(p: &SymplecticPair) -> bool {
    let l = &p.model.lattice;
    l.rank() == 1 && l.gram()[0][0] == 1 && p.model.flags.rational && p.divisor.coeffs()[0].abs() == 1
}

pub fn purely_relative_vanishes(p: &SymplecticPair, a: &HomologyClass, genus: u32) -> Result<VanishingVerdict> {
    if genus == 0 && is_plane_with_line(p) {
        let d = a.coeffs()[0] * p.divisor.coeffs()[0];
        if d > 0 {
            return Ok(VanishingVerdict::Vanishes(VanishingRule::LineClass));
        }
    }
    let adjoint = p.model.canonical_pairing(a)? + p.divisor_pairing(a)?;
    if adjoint < i64::from(genus) - 1 {
        return Ok(VanishingVerdict::Vanishes(VanishingRule::AdjointBound));
    }
    Ok(VanishingVerdict::NotExcluded)
}

/// The level living in `X`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseLevel {
    pub class: HomologyClass,
    pub genus: i64,
    /// Contact points with `V_X`.
    pub contacts: i64,
}

/// A level living in the completion `Q = P(N + C)` of the normal bundle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpperLevel {
    pub class: HomologyClass,
    /// Arithmetic genus; may be negative for a disconnected level.
    pub genus: i64,
    pub contacts_zero: i64,
    pub contacts_infinity: i64,
}

/// Levels `C_0, .., C_m` of a degenerate curve. `C_0` lies in `X` and
/// meets `V_X`; `C_1` meets `V_0` in the first copy of `Q`, and so on up to
/// `C_m`, whose contacts with `V_infinity` are the contacts of the glued curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelDecomposition {
    pub base: BaseLevel,
    pub upper: Vec<UpperLevel>,
}

impl LevelDecomposition {
    pub fn single(class: HomologyClass, genus: i64, contacts: i64) -> Self {
        Self { base: BaseLevel { class, genus, contacts }, upper: Vec::new() }
    }

    /// Number of levels above the base.
    pub fn m(&self) -> usize {
        self.upper.len()
    }

    /// Contact count with `V` of the glued curve.
    pub fn outer_contacts(&self) -> i64 {
        self.upper.last().map_or(self.base.contacts, |l| l.contacts_infinity)
    }

    fn inner_contact_sum(&self) -> i64 {
        self.upper.iter().map(|l| l.contacts_zero).sum()
    }
}

/// The completion matching a sphere divisor with `V^2 = n`: `Q(n)`, where
/// `V_infinity^2 = n` and `V_0^2 = -n`.
pub fn completion_for(p: &SymplecticPair) -> Result<Completion> {
    if p.divisor_genus != 0 {
        return Err(Error::Precondition("level completions are modelled for sphere divisors only".into()));
    }
    Ok(completion_q(p.divisor_square()))
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedDecomposition(msg.into())
}

/// Checks lattices, non-negative contact counts and the matching
/// conditions between consecutive levels.
pub fn validate_decomposition(p: &SymplecticPair, q: &Completion, d: &LevelDecomposition) -> Result<()> {
    if p.model.lattice.contains(&d.base.class).is_err() {
        return Err(malformed("base level class is not in the lattice of X"));
    }
    if d.base.contacts < 0 {
        return Err(malformed("negative contact count at level 0"));
    }
    let mut below_class = p.divisor_pairing(&d.base.class)?;
    let mut below_contacts = d.base.contacts;
    for (i, level) in d.upper.iter().enumerate() {
        let i = i + 1;
        if q.model.lattice.contains(&level.class).is_err() {
            return Err(malformed(format!("level {i} class is not in the lattice of Q")));
        }
        if level.contacts_zero < 0 || level.contacts_infinity < 0 {
            return Err(malformed(format!("negative contact count at level {i}")));
        }
        if level.contacts_zero != below_contacts {
            return Err(malformed(format!(
                "level {i} has {} contacts with V_0, level {} has {below_contacts} above",
                level.contacts_zero,
                i - 1
            )));
        }
        let meets_zero = q.model.pair(&level.class, &q.zero_section)?;
        if meets_zero != below_class {
            return Err(malformed(format!(
                "level {i} meets V_0 {meets_zero} times, level {} meets it from below {below_class} times",
                i - 1
            )));
        }
        below_class = q.model.pair(&level.class, &q.infinity_section)?;
        below_contacts = level.contacts_infinity;
    }
    Ok(())
}

/// `g = sum g_i + sum_{i >= 1} r_{i0} - m`.
pub fn glued_genus(d: &LevelDecomposition) -> Result<i64> {
    let g = d.base.genus + d.upper.iter().map(|l| l.genus).sum::<i64>() + d.inner_contact_sum() - d.m() as i64;
    if g < 0 {
        return Err(malformed(format!("glued genus {g} is negative")));
    }
    Ok(g)
}

/// `[C_0] + (sum of section degrees of C_i) V`: fibers of `Q` project to
/// points and sections to `V`.
pub fn glued_class(p: &SymplecticPair, d: &LevelDecomposition) -> Result<HomologyClass> {
    let q = completion_for(p)?;
    validate_decomposition(p, &q, d)?;
    glued_class_in(p, &q, d)
}

fn glued_class_in(p: &SymplecticPair, q: &Completion, d: &LevelDecomposition) -> Result<HomologyClass> {
    let mut degree = 0i64;
    for l in &d.upper {
        degree = degree.checked_add(q.section_degree(&l.class)?).ok_or(Error::Overflow)?;
    }
    d.base.class.add(&p.divisor.scale(degree)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexBreakdown {
    pub glued_class: HomologyClass,
    pub glued_genus: i64,
    /// `I_0, I_1, .., I_m`.
    pub level_indices: Vec<i64>,
    /// `sum I_i - 2 sum_{i >= 1} r_{i0}`.
    pub level_sum: i64,
    /// `I(A, g) = -K.A + (g - 1) + r - A.V` of the glued curve.
    pub unglued_index: i64,
    /// `I(A, g) - m`, the dimension bound for the stratum.
    pub stratum_bound: i64,
    /// `I(A, g) - m - sum_{i >= 1} r_{i0}`, the telescoped level sum.
    pub closed_form: i64,
}

impl IndexBreakdown {
    pub fn value(&self) -> i64 {
        self.level_sum
    }
}

/// Index of a degenerate curve computed level by level and, independently,
/// from the glued data. The two agree; a disagreement is a bug.
pub fn multilevel_index_breakdown(p: &SymplecticPair, d: &LevelDecomposition) -> Result<IndexBreakdown> {
    let q = completion_for(p)?;
    validate_decomposition(p, &q, d)?;
    let xm = &p.model;
    let qm = &q.model;

    let c0 = &d.base.class;
    let mut level_indices =
        vec![-xm.canonical_pairing(c0)? + (d.base.genus - 1) + d.base.contacts - p.divisor_pairing(c0)?];
    for l in &d.upper {
        let c = &l.class;
        level_indices.push(
            -qm.canonical_pairing(c)? + (l.genus - 1) + l.contacts_zero - qm.pair(c, &q.zero_section)?
                + l.contacts_infinity
                - qm.pair(c, &q.infinity_section)?
                - 1,
        );
    }
    let level_sum = level_indices.iter().sum::<i64>() - 2 * d.inner_contact_sum();

    let a = glued_class_in(p, &q, d)?;
    let g = glued_genus(d)?;
    let r = d.outer_contacts();
    let unglued_index = -xm.canonical_pairing(&a)? + (g - 1) + r - p.divisor_pairing(&a)?;
    let m = d.m() as i64;
    let closed_form = unglued_index - m - d.inner_contact_sum();
    assert_eq!(closed_form, level_sum, "level sum disagrees with the glued closed form");
    Ok(IndexBreakdown {
        glued_class: a,
        glued_genus: g,
        level_indices,
        level_sum,
        unglued_index,
        stratum_bound: unglued_index - m,
        closed_form,
    })
}

pub fn multilevel_index(p: &SymplecticPair, d: &LevelDecomposition) -> Result<i64> {
    multilevel_index_breakdown(p, d).map(|b| b.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::CapKind;
    use crate::library::{cp2_blowup, StandardCap};
    use proptest::prelude::*;

    fn cap(kind: CapKind) -> SymplecticPair {
        StandardCap::new(kind).unwrap().pair
    }

    #[test]
    fn contact_vectors() {
        assert!(ContactVector::new(vec![1, 0]).is_err());
        let s = ContactVector::new(vec![2, 1]).unwrap();
        assert_eq!((s.len(), s.total()), (2, 3));
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, "[2,1]");
        assert!(serde_json::from_str::<ContactVector>("[0]").is_err());
    }

    #[test]
    fn absolute_degrees() {
        let m = cp2_blowup(1);
        let e = m.lattice.basis_class(1);
        assert_eq!(absolute_constraint_degree(&m, &e, 0, 0).unwrap(), 0);
        let p = cp2_blowup(0);
        assert_eq!(absolute_constraint_degree(&p, &p.class(vec![1]).unwrap(), 0, 2).unwrap(), 8);
        assert_eq!(absolute_constraint_degree(&p, &p.lattice.zero(), 1, 0).unwrap(), 0);
    }

    #[test]
    fn relative_degrees() {
        let conic = cap(CapKind::Cp2Conic);
        let h = conic.model.class(vec![1]).unwrap();
        let s11 = ContactVector::new(vec![1, 1]).unwrap();
        let s2 = ContactVector::new(vec![2]).unwrap();
        assert_eq!(relative_constraint_degree(&conic, &h, 0, &s11, 0).unwrap(), 4);
        assert_eq!(relative_constraint_degree(&conic, &h, 0, &s2, 0).unwrap(), 2);
        let line = cap(CapKind::Cp2Line);
        assert_eq!(
            relative_constraint_degree(&line, &h, 0, &s2, 0).unwrap_err(),
            Error::ContactMismatch { total: 2, expected: 1 }
        );
    }

    #[test]
    fn vanishing_examples() {
        let line = cap(CapKind::Cp2Line);
        let conic = cap(CapKind::Cp2Conic);
        let a = |d: i64| line.model.class(vec![d]).unwrap();
        assert_eq!(
            purely_relative_vanishes(&line, &a(3), 0).unwrap(),
            VanishingVerdict::Vanishes(VanishingRule::LineClass)
        );
        for d in 2..=5 {
            assert_eq!(
                purely_relative_vanishes(&conic, &a(d), 0).unwrap(),
                VanishingVerdict::Vanishes(VanishingRule::AdjointBound)
            );
        }
        assert_eq!(purely_relative_vanishes(&conic, &a(1), 0).unwrap(), VanishingVerdict::NotExcluded);
        for d in 1..=5 {
            assert!(purely_relative_vanishes(&conic, &a(d), 1).unwrap().vanishes());
        }
    }

    #[test]
    fn glued_genus_examples() {
        let p = cap(CapKind::Cp2Line);
        let q = completion_for(&p).unwrap();
        let two = |r: i64| LevelDecomposition {
            base: BaseLevel { class: p.model.lattice.zero(), genus: 0, contacts: r },
            upper: vec![UpperLevel { class: q.fiber(), genus: 0, contacts_zero: r, contacts_infinity: 0 }],
        };
        assert_eq!(glued_genus(&two(1)).unwrap(), 0);
        assert_eq!(glued_genus(&two(2)).unwrap(), 1);
        assert_eq!(glued_genus(&LevelDecomposition::single(p.model.lattice.zero(), 3, 0)).unwrap(), 3);
        let mut bad = two(0);
        bad.upper[0].genus = -1;
        assert!(glued_genus(&bad).is_err());
    }

    #[test]
    fn glued_class_examples() {
        let p = cap(CapKind::BundleSection { n: 1 });
        let q = completion_for(&p).unwrap();
        let c0 = p.model.lattice.zero();
        let fiber_level = LevelDecomposition {
            base: BaseLevel { class: c0.clone(), genus: 0, contacts: 0 },
            upper: vec![UpperLevel { class: q.model.lattice.zero(), genus: 0, contacts_zero: 0, contacts_infinity: 1 }],
        };
        assert_eq!(glued_class(&p, &fiber_level).unwrap(), c0);
        // level 1 = V_0 itself meets V_0 in -n points, so C_0 must meet V -n times
        let b = q.zero_section.clone();
        let n = p.divisor_square();
        let c0 = p.model.class_from_terms(&[("f", -n)]).unwrap();
        assert_eq!(p.divisor_pairing(&c0).unwrap(), q.model.pair(&b, &q.zero_section).unwrap());
        let section_level = LevelDecomposition {
            base: BaseLevel { class: c0.clone(), genus: 0, contacts: 0 },
            upper: vec![UpperLevel { class: b, genus: 0, contacts_zero: 0, contacts_infinity: 0 }],
        };
        assert_eq!(glued_class(&p, &section_level).unwrap(), c0.add(&p.divisor).unwrap());
        assert_eq!(glued_class(&p, &LevelDecomposition::single(c0.clone(), 0, 0)).unwrap(), c0);
    }

    #[test]
    fn single_level_index_is_unglued_index() {
        let p = cap(CapKind::Cp2Conic);
        let h = p.model.class(vec![1]).unwrap();
        let b = multilevel_index_breakdown(&p, &LevelDecomposition::single(h, 0, 2)).unwrap();
        assert_eq!(b.level_sum, 3 - 1 + 2 - 2);
        assert_eq!(b.level_sum, b.unglued_index);
        assert_eq!(b.stratum_bound, b.unglued_index);
    }

    #[test]
    fn exceptional_sphere_with_fiber_level_drops_index() {
        let m = cp2_blowup(2);
        let v = m.class(vec![1, -1, 0]).unwrap();
        let p = SymplecticPair::new(m.clone(), v, 0).unwrap();
        let q = completion_for(&p).unwrap();
        let e = m.lattice.basis_class(2);
        assert_eq!(p.divisor_pairing(&e).unwrap(), 0);
        let e1 = m.lattice.basis_class(1);
        assert_eq!(p.divisor_pairing(&e1).unwrap(), 1);
        let d = LevelDecomposition {
            base: BaseLevel { class: e1.clone(), genus: 0, contacts: 1 },
            upper: vec![UpperLevel { class: q.fiber(), genus: 0, contacts_zero: 1, contacts_infinity: 1 }],
        };
        let b = multilevel_index_breakdown(&p, &d).unwrap();
        assert_eq!(b.glued_class, e1);
        assert_eq!(b.unglued_index, 0);
        assert_eq!(b.level_sum, -2);
        assert!(b.level_sum < b.unglued_index);
    }

    #[test]
    fn matching_violations_are_rejected() {
        let p = cap(CapKind::Cp2Line);
        let q = completion_for(&p).unwrap();
        let h = p.model.class(vec![1]).unwrap();
        let d = LevelDecomposition {
            base: BaseLevel { class: h.clone(), genus: 0, contacts: 1 },
            upper: vec![UpperLevel { class: q.fiber(), genus: 0, contacts_zero: 2, contacts_infinity: 1 }],
        };
        assert!(matches!(multilevel_index(&p, &d), Err(Error::MalformedDecomposition(_))));
        let d = LevelDecomposition {
            base: BaseLevel { class: h.scale(2).unwrap(), genus: 0, contacts: 1 },
            upper: vec![UpperLevel { class: q.fiber(), genus: 0, contacts_zero: 1, contacts_infinity: 1 }],
        };
        assert!(matches!(multilevel_index(&p, &d), Err(Error::MalformedDecomposition(_))));
        let wrong_lattice = LevelDecomposition::single(q.fiber(), 0, 0);
        assert!(multilevel_index(&p, &wrong_lattice).is_err());
    }

    proptest! {
        #[test]
        fn degree_and_vanishing_agree(d in 1i64..6, g in 0u32..4, split in 0usize..4, which in 0usize..2) {
            // Purely relative: no absolute insertions, relative insertions of
            // degree at most 2 each, so a nonzero invariant needs degree <= 2r.
            let p = if which == 0 { cap(CapKind::Cp2Line) } else { cap(CapKind::Cp2Conic) };
            let a = p.model.class(vec![d]).unwrap();
            let av = p.divisor_pairing(&a).unwrap();
            let r = (split as i64 % av) + 1;
            let mut orders = vec![1i64; r as usize];
            orders[0] += av - r;
            let s = ContactVector::new(orders).unwrap();
            let degree = relative_constraint_degree(&p, &a, g, &s, 0).unwrap();
            let verdict = purely_relative_vanishes(&p, &a, g).unwrap();
            if verdict == VanishingVerdict::Vanishes(VanishingRule::AdjointBound) {
                prop_assert!(degree > 2 * r);
            }
            if degree > 2 * r {
                prop_assert!(verdict.vanishes());
            }
        }
    }
}
