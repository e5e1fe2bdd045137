//! Fiber sums along spheres: compatibility, how classes split, the
//! contributor analysis for the rational blow-down, and the minimality
//! decision.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::enumerate::{
    enumerate_classes, find_blowdown_witness_pairs, is_relatively_minimal, witness_search_exhaustive,
    RelativeMinimality, WitnessPair,
};
use crate::error::{Error, Result};
use crate::gw::{purely_relative_vanishes, relative_constraint_degree, ContactVector, VanishingVerdict};
use crate::lattice::{adjunction_genus, embedded_genus, HomologyClass, ManifoldModel, SymplecticPair};
use crate::library::{CapKind, StandardCap};

/// Box used when looking for a section or fiber of a rank-2 cap.
const CAP_SEARCH_BOUND: i64 = 8;

pub fn check_compatibility(px: &SymplecticPair, py: &SymplecticPair) -> Result<()> {
    let (x, y) = (px.divisor_square(), py.divisor_square());
    if x.checked_add(y) != Some(0) {
        return Err(Error::SquareMismatch { x, y });
    }
    if px.divisor_genus != py.divisor_genus {
        return Err(Error::GenusMismatch { x: px.divisor_genus, y: py.divisor_genus });
    }
    Ok(())
}

/// `A^2 = A_X^2 + A_Y^2`.
pub fn split_square(px: &SymplecticPair, py: &SymplecticPair, ax: &HomologyClass, ay: &HomologyClass) -> Result<i64> {
    px.model.square(ax)?.checked_add(py.model.square(ay)?).ok_or(Error::Overflow)
}

/// `K_M.A = (K_X + V_X).A_X + (K_Y + V_Y).A_Y`.
pub fn split_canonical(
    px: &SymplecticPair,
    py: &SymplecticPair,
    ax: &HomologyClass,
    ay: &HomologyClass,
) -> Result<i64> {
    let side = |p: &SymplecticPair, a: &HomologyClass| -> Result<i64> {
        p.model.canonical_pairing(a)?.checked_add(p.divisor_pairing(a)?).ok_or(Error::Overflow)
    };
    side(px, ax)?.checked_add(side(py, ay)?).ok_or(Error::Overflow)
}

/// `(chi, sigma)` of a sum along a surface of the given genus.
pub fn sum_characteristic_numbers_along(x: &ManifoldModel, y: &ManifoldModel, genus: u32) -> (i64, i64) {
    let chi_v = 2 - 2 * i64::from(genus);
    (x.euler + y.euler - 2 * chi_v, x.signature + y.signature)
}

/// `(chi, sigma)` of a sum along a sphere.
pub fn sum_characteristic_numbers(x: &ManifoldModel, y: &ManifoldModel) -> (i64, i64) {
    sum_characteristic_numbers_along(x, y, 0)
}

fn not_a_cap(msg: impl Into<String>) -> Error {
    Error::NotASphereCap(msg.into())
}

fn small_box(rank: usize) -> impl Iterator<Item = Vec<i64>> {
    let side = (2 * CAP_SEARCH_BOUND + 1) as u64;
    (0..side.pow(rank as u32)).map(move |mut idx| {
        (0..rank)
            .map(|_| {
                let v = (idx % side) as i64 - CAP_SEARCH_BOUND;
                idx /= side;
                v
            })
            .collect()
    })
}

/// Matches a pair against the four sphere caps by lattice data alone.
///
/// A genus-`g` divisor is never a sphere cap, including sections of
/// bundles over higher-genus bases.
pub fn classify_cap(py: &SymplecticPair) -> Result<CapKind> {
    if py.divisor_genus != 0 {
        return Err(not_a_cap(format!("divisor has genus {}", py.divisor_genus)));
    }
    let m = &py.model;
    let l = &m.lattice;
    let v = &py.divisor;
    if l.rank() == 1 {
        if l.gram()[0][0] != 1 || m.canonical.coeffs()[0].abs() != 3 {
            return Err(not_a_cap("rank-one lattice is not that of CP2"));
        }
        // orient so that H pairs to -3 with K
        let orient = -m.canonical.coeffs()[0].signum();
        return match orient * v.coeffs()[0] {
            1 => Ok(CapKind::Cp2Line),
            2 => Ok(CapKind::Cp2Conic),
            d => Err(not_a_cap(format!("divisor {d}H in CP2"))),
        };
    }
    if l.rank() != 2 || !l.is_symmetric() {
        return Err(not_a_cap(format!("rank {} lattice", l.rank())));
    }
    let det = l.determinant().map(|d| d.to_string());
    if det.as_deref() != Some("-1") {
        return Err(not_a_cap("rank-two lattice is not unimodular and indefinite"));
    }
    let vsq = py.divisor_square();
    let kv = m.canonical_pairing(v)?;
    let twisted = l.gram().iter().enumerate().any(|(i, row)| row[i] % 2 != 0);
    if vsq == 0 && kv == -2 {
        let section = small_box(2)
            .filter_map(|c| m.class(c).ok())
            .find(|s| m.pair(s, v).ok() == Some(1))
            .ok_or_else(|| not_a_cap("no section meets the fiber once"))?;
        let g = adjunction_genus(m, &section)?;
        if !g.is_integer() || g < 0.into() {
            return Err(not_a_cap("section has no integral genus"));
        }
        let genus = u32::try_from(g.to_integer()).map_err(|_| not_a_cap("base genus out of range"))?;
        return Ok(CapKind::BundleFiber { genus, twisted });
    }
    if vsq >= 0 {
        let k2 = m.square(&m.canonical)?;
        let has_fiber = small_box(2).filter_map(|c| m.class(c).ok()).any(|f| {
            m.square(&f).ok() == Some(0) && m.pair(&f, v).ok() == Some(1) && m.canonical_pairing(&f).ok() == Some(-2)
        });
        if has_fiber && k2 == 8 && twisted == (vsq % 2 != 0) {
            return Ok(CapKind::BundleSection { n: vsq });
        }
    }
    Err(not_a_cap(format!("rank-two pair with V^2 = {vsq}, K.V = {kv}")))
}

/// One connected piece of `A_X`, meeting `V` in one contact point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub class: HomologyClass,
    pub genus: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingRecord {
    pub a_x: HomologyClass,
    pub a_y: HomologyClass,
    pub contacts: ContactVector,
    pub components_x: Vec<Component>,
}

fn partitions(n: i64, max_part: i64) -> Vec<Vec<i64>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max_part)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn box_classes(m: &ManifoldModel, bound: i64) -> Vec<HomologyClass> {
    let side = (2 * bound + 1) as u64;
    let rank = m.rank();
    (0..side.pow(rank as u32))
        .map(|mut idx| {
            let c = (0..rank)
                .map(|_| {
                    let v = (idx % side) as i64 - bound;
                    idx /= side;
                    v
                })
                .collect();
            m.class(c).expect("rank matches")
        })
        .collect()
}

/// Cap-side classes that can carry a nonzero purely relative invariant:
/// connected embedded spheres (primitive, adjunction genus 0) meeting `V`
/// and not excluded by a vanishing rule.
fn cap_side_classes(py: &SymplecticPair, bound: i64) -> Result<Vec<HomologyClass>> {
    let mut out = Vec::new();
    for a in box_classes(&py.model, bound) {
        if !a.is_primitive() || py.divisor_pairing(&a)? < 1 {
            continue;
        }
        if embedded_genus(&py.model, &a)? != Some(0) {
            continue;
        }
        if purely_relative_vanishes(py, &a, 0)?.vanishes() {
            continue;
        }
        out.push(a);
    }
    Ok(out)
}

/// Splittings `(A_X, A_Y, s)` with `A_X^2 + A_Y^2 = target_square`.
///
/// The cap side is one connected embedded sphere; the `X` side is one
/// genus-0 component per contact point, the components pairwise
/// orthogonal, so the contact graph is a star and the glued curve is a
/// connected sphere. Component squares range over `[-bound, bound]`.
pub fn enumerate_splittings(
    px: &SymplecticPair,
    py: &SymplecticPair,
    target_square: i64,
    bound: i64,
) -> Result<Vec<SplittingRecord>> {
    check_compatibility(px, py)?;
    let xm = &px.model;
    let mut out = Vec::new();
    for ay in cap_side_classes(py, bound)? {
        let d = py.divisor_pairing(&ay)?;
        let x_square = target_square - py.model.square(&ay)?;
        for parts in partitions(d, d) {
            // candidate components per distinct contact order and square
            let mut per_order: Vec<(i64, Vec<(i64, HomologyClass)>)> = Vec::new();
            for &s in &parts {
                if per_order.iter().any(|(o, _)| *o == s) {
                    continue;
                }
                let mut list = Vec::new();
                for q in -bound..=bound {
                    for c in
                        enumerate_classes(xm, q, &[(xm.canonical.clone(), -2 - q), (px.divisor.clone(), s)], bound)?
                    {
                        list.push((q, c));
                    }
                }
                per_order.push((s, list));
            }
            let lists: Vec<&Vec<(i64, HomologyClass)>> =
                parts.iter().map(|s| &per_order.iter().find(|(o, _)| o == s).expect("filled above").1).collect();
            let mut chosen: Vec<usize> = Vec::new();
            combine(xm, &parts, &lists, x_square, &mut chosen, &mut |picked| {
                let comps: Vec<Component> =
                    picked.iter().zip(&lists).map(|(&i, l)| Component { class: l[i].1.clone(), genus: 0 }).collect();
                let mut a_x = xm.lattice.zero();
                for c in &comps {
                    a_x = a_x.add(&c.class)?;
                }
                out.push(SplittingRecord {
                    a_x,
                    a_y: ay.clone(),
                    contacts: ContactVector::new(parts.clone())?,
                    components_x: comps,
                });
                Ok(())
            })?;
        }
    }
    Ok(out)
}

fn combine(
    m: &ManifoldModel,
    parts: &[i64],
    lists: &[&Vec<(i64, HomologyClass)>],
    remaining: i64,
    chosen: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    let j = chosen.len();
    if j == parts.len() {
        return if remaining == 0 { emit(chosen) } else { Ok(()) };
    }
    // equal contact orders are unordered: keep indices non-decreasing
    let start = match chosen.last() {
        Some(&prev) if j > 0 && parts[j - 1] == parts[j] => prev + 1,
        _ => 0,
    };
    for i in start..lists[j].len() {
        let (q, c) = &lists[j][i];
        let mut disjoint = true;
        for (k, &pick) in chosen.iter().enumerate() {
            if m.pair(&lists[k][pick].1, c)? != 0 {
                disjoint = false;
                break;
            }
        }
        if !disjoint {
            continue;
        }
        chosen.push(i);
        combine(m, parts, lists, remaining - q, chosen, emit)?;
        chosen.pop();
    }
    Ok(())
}

/// Complex dimension of the stratum of an `X`-side component with a
/// single contact of order `s`: half the relative constraint degree,
/// i.e. what remains after the point insertion on `V` is imposed.
pub fn component_dimension(px: &SymplecticPair, c: &Component, order: i64) -> Result<i64> {
    Ok(relative_constraint_degree(px, &c.class, c.genus, &ContactVector::new(vec![order])?, 0)? / 2)
}

/// Splittings of an exceptional class (`A^2 = -1`, `K.A = -1`) in which
/// every `X`-side component has a stratum of nonnegative dimension.
pub fn contributing_splittings(px: &SymplecticPair, py: &SymplecticPair, bound: i64) -> Result<Vec<SplittingRecord>> {
    let mut out = Vec::new();
    for r in enumerate_splittings(px, py, -1, bound)? {
        if split_canonical(px, py, &r.a_x, &r.a_y)? != -1 {
            continue;
        }
        let mut ok = true;
        for (c, &s) in r.components_x.iter().zip(r.contacts.orders()) {
            if component_dimension(px, c, s)? < 0 {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(r);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapClassCheck {
    pub degree: i64,
    pub verdict: VanishingVerdict,
    pub embedded_genus: Option<u32>,
    pub primitive: bool,
    pub survives: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternCheck {
    pub contacts: ContactVector,
    pub constraint_degree: i64,
    /// The degree is exactly `2r`: every relative insertion is a point.
    pub point_insertions: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct XSideData {
    pub divisor_pairing: i64,
    pub square: i64,
    pub canonical_pairing: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingleContactCheck {
    /// `K.A_X` forced by adjunction for a connected embedded sphere.
    pub adjunction_canonical: i64,
    pub rejected: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSquaresCheck {
    pub squares: (i64, i64),
    pub dimensions: (i64, i64),
    pub survives: bool,
}

/// The rational blow-down contributor analysis, step by step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContributorAnalysis {
    pub cap_classes: Vec<CapClassCheck>,
    pub patterns: Vec<PatternCheck>,
    pub x_side: XSideData,
    pub single_contact: SingleContactCheck,
    pub component_squares: Vec<ComponentSquaresCheck>,
    /// Degenerate curves with `m >= 1` levels lie in strata of dimension
    /// at most `I(A, g) - m` and are not enumerated.
    pub multilevel_excluded: bool,
    pub configurations: Vec<WitnessPair>,
}

impl ContributorAnalysis {
    pub fn trace(&self) -> Vec<String> {
        let mut t = Vec::new();
        let surv: Vec<String> =
            self.cap_classes.iter().filter(|c| c.survives).map(|c| format!("{}H", c.degree)).collect();
        let gone: Vec<String> = self
            .cap_classes
            .iter()
            .filter(|c| !c.survives)
            .map(|c| match c.verdict {
                VanishingVerdict::Vanishes(rule) => format!("{}H vanishes ({})", c.degree, rule.tag()),
                VanishingVerdict::NotExcluded => format!("{}H not an embedded sphere", c.degree),
            })
            .collect();
        t.push(format!("cap classes: {} survive; {}", surv.join(", "), gone.join("; ")));
        for p in &self.patterns {
            t.push(format!(
                "contacts {:?}: constraint degree {}{}",
                p.contacts.orders(),
                p.constraint_degree,
                if p.point_insertions { " = 2r, point insertions" } else { "" }
            ));
        }
        t.push(format!(
            "X side: A_X.V = {}, A_X^2 = {}, K.A_X = {}",
            self.x_side.divisor_pairing, self.x_side.square, self.x_side.canonical_pairing
        ));
        t.push(format!(
            "one contact of order 2: a connected sphere needs K.A_X = {}, {}",
            self.single_contact.adjunction_canonical,
            if self.single_contact.rejected { "rejected" } else { "kept" }
        ));
        let kept: Vec<String> = self
            .component_squares
            .iter()
            .filter(|c| c.survives)
            .map(|c| format!("({}, {})", c.squares.0, c.squares.1))
            .collect();
        t.push(format!(
            "two contacts of order 1: {} square splittings scanned, dimension A_i^2 + 1 >= 0 keeps {}",
            self.component_squares.len(),
            kept.join(", ")
        ));
        if self.multilevel_excluded {
            t.push("degenerate multilevel curves lie in strata of dimension I(A,g) - m < I(A,g)".into());
        }
        t.push(format!("{} disjoint exceptional pair(s) meeting V once", self.configurations.len()));
        t
    }
}

/// Which configurations in `X` can glue with a line of `(CP^2, 2H)` to an
/// exceptional sphere in the rational blow-down of `V_X`.
pub fn rational_blowdown_contributors(px: &SymplecticPair, bound: i64) -> Result<ContributorAnalysis> {
    if px.divisor_genus != 0 || px.divisor_square() != -4 {
        return Err(Error::Precondition(format!(
            "rational blow-down needs a -4-sphere, got square {} genus {}",
            px.divisor_square(),
            px.divisor_genus
        )));
    }
    let cap = StandardCap::new(CapKind::Cp2Conic)?.pair;
    let cm = &cap.model;

    let mut cap_classes = Vec::new();
    for degree in 1..=bound.max(2) {
        let b = cm.class(vec![degree])?;
        let verdict = purely_relative_vanishes(&cap, &b, 0)?;
        let genus = embedded_genus(cm, &b)?;
        let primitive = b.is_primitive();
        cap_classes.push(CapClassCheck {
            degree,
            verdict,
            embedded_genus: genus,
            primitive,
            survives: !verdict.vanishes() && genus == Some(0) && primitive,
        });
    }
    let survivors: Vec<i64> = cap_classes.iter().filter(|c| c.survives).map(|c| c.degree).collect();
    if survivors != [1] {
        return Err(Error::Precondition(format!("unexpected cap classes {survivors:?}")));
    }
    let h = cm.class(vec![1])?;
    let contact_total = cap.divisor_pairing(&h)?;

    let mut patterns = Vec::new();
    for parts in partitions(contact_total, contact_total) {
        let s = ContactVector::new(parts)?;
        let degree = relative_constraint_degree(&cap, &h, 0, &s, 0)?;
        patterns.push(PatternCheck {
            point_insertions: degree == 2 * s.len() as i64,
            contacts: s,
            constraint_degree: degree,
        });
    }

    // invert the splitting formulas for an exceptional class A
    let x_square = -1 - cm.square(&h)?;
    let cap_side = cm.canonical_pairing(&h)? + cap.divisor_pairing(&h)?;
    let x_side = XSideData {
        divisor_pairing: contact_total,
        square: x_square,
        canonical_pairing: -1 - cap_side - contact_total,
    };

    let adjunction_canonical = -2 - x_side.square;
    let single_contact =
        SingleContactCheck { adjunction_canonical, rejected: adjunction_canonical != x_side.canonical_pairing };

    let mut component_squares = Vec::new();
    for q1 in -bound..=bound {
        let q2 = x_side.square - q1;
        if !(-bound..=bound).contains(&q2) || q1 > q2 {
            continue;
        }
        // sphere with one simple contact and a point insertion:
        // -K.A_i + (0 - 1) + 1 - 1 with K.A_i = -2 - A_i^2
        let dim = |q: i64| (2 + q) - 1;
        let dims = (dim(q1), dim(q2));
        component_squares.push(ComponentSquaresCheck {
            squares: (q1, q2),
            dimensions: dims,
            survives: dims.0 >= 0 && dims.1 >= 0,
        });
    }

    let configurations = find_blowdown_witness_pairs(px, bound)?;
    Ok(ContributorAnalysis {
        cap_classes,
        patterns,
        x_side,
        single_contact,
        component_squares,
        multilevel_excluded: true,
        configurations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Minimal,
    NotMinimal,
    ConditionallyMinimal,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Minimal => "Minimal",
            Verdict::NotMinimal => "NotMinimal",
            Verdict::ConditionallyMinimal => "ConditionallyMinimal",
            Verdict::Unknown => "Unknown",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    IffXMinimal,
    IffYMinimal,
}

impl Condition {
    pub fn tag(self) -> &'static str {
        match self {
            Condition::IffXMinimal => "iff X minimal",
            Condition::IffYMinimal => "iff Y minimal",
        }
    }
}

/// How much a witness pair proves about actual spheres.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairEvidence {
    /// `X` is neither rational nor ruled, so distinct exceptional spheres
    /// never meet and homological disjointness is geometric.
    Geometric,
    /// `X` is rational or ruled: the pair is a necessary condition only.
    HomologicalOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// An exceptional candidate disjoint from `V_X`.
    Disjoint { class: HomologyClass, label: String },
    /// Two disjoint exceptional candidates, each meeting `V_X` once.
    Pair { first: HomologyClass, second: HomologyClass, labels: [String; 2], evidence: PairEvidence },
}

/// Which rule of the decision fired.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// An exceptional sphere in `X \ V_X` survives into the sum.
    DisjointExceptional,
    /// Two exceptional spheres meeting a `-4`-sphere once glue with a line.
    RationalBlowdownPair,
    /// Blow-down of a relatively minimal `X`: no exceptional class can be glued.
    BlowdownOfRelativelyMinimal,
    /// Rational blow-down with no contributing configuration.
    RationalBlowdownNoContributor,
    /// Fiber sum of bundles with positive total base genus.
    PositiveGenusBundle,
    /// Fiber sum of two nontrivial bundles over the sphere.
    TwistedBundlePair,
    /// Summing with the trivial bundle in a fiber leaves the other side unchanged.
    TrivialBundleSummand,
    /// Summing with a bundle along a section gives back `X`.
    SectionSummand,
    /// No sound conclusion from bounded data.
    Undecided,
}

impl Rule {
    pub fn tag(self) -> &'static str {
        match self {
            Rule::DisjointExceptional => "disjoint-exceptional",
            Rule::RationalBlowdownPair => "rational-blowdown-pair",
            Rule::BlowdownOfRelativelyMinimal => "blowdown-of-relatively-minimal",
            Rule::RationalBlowdownNoContributor => "rational-blowdown-no-contributor",
            Rule::PositiveGenusBundle => "positive-genus-bundle",
            Rule::TwistedBundlePair => "twisted-bundle-pair",
            Rule::TrivialBundleSummand => "trivial-bundle-summand",
            Rule::SectionSummand => "section-summand",
            Rule::Undecided => "undecided",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalityVerdict {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub condition: Option<Condition>,
    pub case: CapKind,
    pub rule: Rule,
    pub trace: Vec<String>,
}

impl MinimalityVerdict {
    fn minimal(case: CapKind, rule: Rule, trace: Vec<String>) -> Self {
        Self { verdict: Verdict::Minimal, witness: None, condition: None, case, rule, trace }
    }

    fn not_minimal(case: CapKind, rule: Rule, witness: Witness, trace: Vec<String>) -> Self {
        Self { verdict: Verdict::NotMinimal, witness: Some(witness), condition: None, case, rule, trace }
    }

    fn conditional(case: CapKind, rule: Rule, condition: Condition, trace: Vec<String>) -> Self {
        Self { verdict: Verdict::ConditionallyMinimal, witness: None, condition: Some(condition), case, rule, trace }
    }

    fn unknown(case: CapKind, trace: Vec<String>) -> Self {
        Self { verdict: Verdict::Unknown, witness: None, condition: None, case, rule: Rule::Undecided, trace }
    }

    /// One-line summary, e.g. `NotMinimal, witness e1,e2`.
    pub fn summary(&self) -> String {
        match (&self.witness, self.condition) {
            (Some(Witness::Pair { labels, .. }), _) => format!("{}, witness {},{}", self.verdict, labels[0], labels[1]),
            (Some(Witness::Disjoint { label, .. }), _) => format!("{}, witness {}", self.verdict, label),
            (None, Some(c)) => format!("{}: {}", self.verdict, c.tag()),
            (None, None) => self.verdict.to_string(),
        }
    }
}

fn disjoint_witness(px: &SymplecticPair, rel: &RelativeMinimality) -> Option<Witness> {
    rel.witness().map(|e| Witness::Disjoint { class: e.clone(), label: px.model.format_class(e) })
}

fn describe_relative(rel: &RelativeMinimality) -> String {
    match rel {
        RelativeMinimality::Minimal { certificate } => format!("X relatively minimal: {certificate:?}"),
        RelativeMinimality::NotMinimal { .. } => "X not relatively minimal".into(),
        RelativeMinimality::Unknown { searched_bound } => {
            format!("no disjoint exceptional candidate within bound {searched_bound}, not certified beyond it")
        }
    }
}

/// Decides minimality of `X #_V Y`, classifying `Y` as a sphere cap.
pub fn decide_minimality(px: &SymplecticPair, py: &SymplecticPair, bound: i64) -> Result<MinimalityVerdict> {
    check_compatibility(px, py)?;
    let kind = classify_cap(py)?;
    decide_with_kind(px, kind, bound)
}

/// Decides minimality of `X #_V Y` for a standard cap `Y`.
pub fn decide_minimality_with_cap(px: &SymplecticPair, cap: &StandardCap, bound: i64) -> Result<MinimalityVerdict> {
    decide_minimality_as(px, &cap.pair, cap.kind, bound)
}

/// Decides minimality of `X #_V Y` with `Y` declared to be a cap of the
/// given kind rather than classified.
pub fn decide_minimality_as(
    px: &SymplecticPair,
    py: &SymplecticPair,
    kind: CapKind,
    bound: i64,
) -> Result<MinimalityVerdict> {
    check_compatibility(px, py)?;
    if kind.divisor_square() != py.divisor_square() {
        return Err(not_a_cap(format!("{kind:?} needs V^2 = {}, got {}", kind.divisor_square(), py.divisor_square())));
    }
    decide_with_kind(px, kind, bound)
}

fn decide_with_kind(px: &SymplecticPair, kind: CapKind, bound: i64) -> Result<MinimalityVerdict> {
    let mut trace = vec![format!("cap: {kind:?}")];
    if let CapKind::BundleSection { .. } = kind {
        trace.push("sum along a section of a bundle over the sphere is diffeomorphic to X".into());
        if let Some(known) = px.model.flags.minimal_known {
            trace.push(format!("X recorded as {}", if known { "minimal" } else { "not minimal" }));
        }
        return Ok(MinimalityVerdict::conditional(kind, Rule::SectionSummand, Condition::IffXMinimal, trace));
    }
    if let CapKind::Cp2Conic = kind {
        let analysis = rational_blowdown_contributors(px, bound)?;
        trace.extend(analysis.trace());
        if let Some(pair) = analysis.configurations.first() {
            let evidence =
                if px.model.is_rational_or_ruled() { PairEvidence::HomologicalOnly } else { PairEvidence::Geometric };
            let w = Witness::Pair {
                labels: [px.model.format_class(&pair.first), px.model.format_class(&pair.second)],
                first: pair.first.clone(),
                second: pair.second.clone(),
                evidence,
            };
            return Ok(MinimalityVerdict::not_minimal(kind, Rule::RationalBlowdownPair, w, trace));
        }
        let rel = is_relatively_minimal(px, bound)?;
        trace.push(describe_relative(&rel));
        if let Some(w) = disjoint_witness(px, &rel) {
            return Ok(MinimalityVerdict::not_minimal(kind, Rule::DisjointExceptional, w, trace));
        }
        let exhaustive = witness_search_exhaustive(px, bound);
        if matches!(rel, RelativeMinimality::Minimal { .. }) && exhaustive {
            trace.push("witness pair search is exhaustive".into());
            return Ok(MinimalityVerdict::minimal(kind, Rule::RationalBlowdownNoContributor, trace));
        }
        if !exhaustive {
            trace.push(format!("witness pair search not certified beyond bound {bound}"));
        }
        return Ok(MinimalityVerdict::unknown(kind, trace));
    }

    let rel = is_relatively_minimal(px, bound)?;
    trace.push(describe_relative(&rel));
    if let Some(w) = disjoint_witness(px, &rel) {
        return Ok(MinimalityVerdict::not_minimal(kind, Rule::DisjointExceptional, w, trace));
    }
    match kind {
        CapKind::Cp2Line => {
            if matches!(rel, RelativeMinimality::Minimal { .. }) {
                trace.push("every cap class dH vanishes (line-class)".into());
                Ok(MinimalityVerdict::minimal(kind, Rule::BlowdownOfRelativelyMinimal, trace))
            } else {
                Ok(MinimalityVerdict::unknown(kind, trace))
            }
        }
        CapKind::BundleFiber { genus, twisted } => {
            let x_kind = match classify_cap(px) {
                Ok(CapKind::BundleFiber { genus, twisted }) => (genus, twisted),
                _ => {
                    trace.push("X is not recognised as a sphere bundle with V_X a fiber".into());
                    return Ok(MinimalityVerdict::unknown(kind, trace));
                }
            };
            trace.push(format!("X: bundle over genus {} ({})", x_kind.0, if x_kind.1 { "twisted" } else { "trivial" }));
            if genus + x_kind.0 > 0 {
                trace.push(format!("sum is a bundle over genus {}", genus + x_kind.0));
                Ok(MinimalityVerdict::minimal(kind, Rule::PositiveGenusBundle, trace))
            } else if !twisted {
                trace.push("Y = S2xS2 in a fiber: sum is diffeomorphic to X".into());
                Ok(MinimalityVerdict::conditional(kind, Rule::TrivialBundleSummand, Condition::IffXMinimal, trace))
            } else if !x_kind.1 {
                trace.push("X = S2xS2 in a fiber: sum is diffeomorphic to Y".into());
                Ok(MinimalityVerdict::conditional(kind, Rule::TrivialBundleSummand, Condition::IffYMinimal, trace))
            } else {
                trace.push("both twisted: the sum has a section of square 2 and is S2xS2".into());
                Ok(MinimalityVerdict::minimal(kind, Rule::TwistedBundlePair, trace))
            }
        }
        CapKind::Cp2Conic | CapKind::BundleSection { .. } => unreachable!("handled above"),
    }
}
