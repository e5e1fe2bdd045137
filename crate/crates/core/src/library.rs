//! Standard manifolds, blow-up and blow-down, and the four sphere caps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{HomologyClass, IntersectionLattice, ManifoldModel, ModelFlags, SymplecticPair};

/// Largest coefficient allowed in the basis change found by [`blow_down`].
pub const BASIS_CHANGE_BOUND: i64 = 8;

/// `CP^2 # k (-CP^2)` with basis `H, e1, .., ek` and `K = -3H + sum e_i`.
pub fn cp2_blowup(k: usize) -> ManifoldModel {
    let mut names = vec!["H".to_string()];
    names.extend((1..=k).map(|i| format!("e{i}")));
    let mut diag = vec![-1i64; k + 1];
    diag[0] = 1;
    let n = k + 1;
    let gram = (0..n).map(|i| (0..n).map(|j| if i == j { diag[i] } else { 0 }).collect()).collect();
    let lattice = IntersectionLattice::new(names, gram).expect("well-formed");
    let mut canonical = vec![1i64; n];
    canonical[0] = -3;
    let name = if k == 0 { "CP2".to_string() } else { format!("CP2#{k}-CP2") };
    let flags = ModelFlags { rational: true, ruled: false, closed: true, minimal_known: Some(k == 0) };
    ManifoldModel::new(name, lattice, canonical, 3 + k as i64, 1 - k as i64, flags).expect("well-formed")
}

/// `S^2`-bundle over a genus-`g` surface, basis `{s, f}` with `s^2 = 0`
/// (product) or `s^2 = 1` (twisted), `f^2 = 0`, `s.f = 1`.
///
/// One-point blow-ups of the two bundles over a fixed base are
/// symplectomorphic; the models here stay distinct and only differ once
/// blown up by a change of basis.
pub fn s2_bundle(genus: u32, twisted: bool) -> ManifoldModel {
    let c = i64::from(twisted);
    let lattice =
        IntersectionLattice::new(vec!["s".into(), "f".into()], vec![vec![c, 1], vec![1, 0]]).expect("well-formed");
    let g = genus as i64;
    let canonical = vec![-2, 2 * g - 2 + c];
    let name = match (genus, twisted) {
        (0, false) => "S2xS2".to_string(),
        (0, true) => "CP2#-CP2".to_string(),
        (g, false) => format!("Sigma{g}xS2"),
        (g, true) => format!("Sigma{g}~xS2"),
    };
    let flags =
        ModelFlags { rational: genus == 0, ruled: true, closed: true, minimal_known: Some(!(genus == 0 && twisted)) };
    let m = ManifoldModel::new(name, lattice, canonical, 4 - 4 * g, 0, flags).expect("well-formed");
    let f = m.lattice.basis_class(1);
    m.with_fiber(f).expect("same lattice")
}

/// Projective completion `Q = P(N + C)` of the normal bundle of a sphere
/// with self-intersection `n`, together with its zero and infinity sections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    pub model: ManifoldModel,
    /// `V_0 = b`, square `-n`.
    pub zero_section: HomologyClass,
    /// `V_inf = b + n f`, square `n`.
    pub infinity_section: HomologyClass,
}

impl Completion {
    pub fn fiber(&self) -> HomologyClass {
        self.model.lattice.basis_class(1)
    }

    /// Coefficient of `b`: the multiple of `[V]` a class projects to.
    pub fn section_degree(&self, c: &HomologyClass) -> Result<i64> {
        self.model.lattice.contains(c)?;
        Ok(c.coeffs()[0])
    }
}

pub fn completion_q(n: i64) -> Completion {
    let lattice =
        IntersectionLattice::new(vec!["b".into(), "f".into()], vec![vec![-n, 1], vec![1, 0]]).expect("well-formed");
    let flags = ModelFlags { rational: true, ruled: true, closed: true, minimal_known: None };
    let model = ManifoldModel::new(format!("Q({n})"), lattice, vec![-2, -(n + 2)], 4, 0, flags).expect("well-formed");
    let f = model.lattice.basis_class(1);
    let model = model.with_fiber(f).expect("same lattice");
    let zero_section = model.class(vec![1, 0]).expect("rank 2");
    let infinity_section = model.class(vec![1, n]).expect("rank 2");
    Completion { model, zero_section, infinity_section }
}

fn next_exceptional_label(l: &IntersectionLattice) -> String {
    (1..).map(|i| format!("e{i}")).find(|name| l.index_of(name).is_none()).expect("unbounded")
}

/// Adds an orthogonal basis vector `e` with `e^2 = -1`; `K -> K + e`.
pub fn blow_up(m: &ManifoldModel) -> ManifoldModel {
    let old = &m.lattice;
    let n = old.rank();
    let mut names = old.names().to_vec();
    names.push(next_exceptional_label(old));
    let mut gram: Vec<Vec<i64>> = old
        .gram()
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.push(0);
            r
        })
        .collect();
    let mut last = vec![0; n + 1];
    last[n] = -1;
    gram.push(last);
    let lattice = IntersectionLattice::new(names, gram).expect("extends a valid lattice");
    let mut canonical = m.canonical.coeffs().to_vec();
    canonical.push(1);
    let flags = ModelFlags { minimal_known: Some(false), ..m.flags };
    let name = format!("{}#-CP2", m.name);
    let out = ManifoldModel::new(name, lattice, canonical, m.euler + 1, m.signature - 1, flags).expect("rank matches");
    match &m.fiber {
        Some(f) => {
            let mut c = f.coeffs().to_vec();
            c.push(0);
            let f = out.class(c).expect("rank matches");
            out.with_fiber(f).expect("same lattice")
        }
        None => out,
    }
}

/// Blows up `times` points in succession.
pub fn blow_up_n(m: &ManifoldModel, times: usize) -> ManifoldModel {
    (0..times).fold(m.clone(), |acc, _| blow_up(&acc))
}

/// Exceptional class of the most recent blow-up (the last basis vector).
pub fn latest_exceptional(m: &ManifoldModel) -> HomologyClass {
    m.lattice.basis_class(m.rank() - 1)
}

/// Transports a class into a model whose basis contains every label the
/// class uses, e.g. from `X` into a blow-up of `X`.
pub fn lift_class(from: &IntersectionLattice, to: &ManifoldModel, c: &HomologyClass) -> Result<HomologyClass> {
    from.contains(c)?;
    let mut out = vec![0i64; to.rank()];
    for (name, &k) in from.names().iter().zip(c.coeffs()) {
        if k == 0 {
            continue;
        }
        let j = to.lattice.index_of(name).ok_or_else(|| Error::UnknownBasisLabel(name.clone()))?;
        out[j] = k;
    }
    to.class(out)
}

/// Proper transform `A - m e` of `A` through a point of multiplicity `m`
/// blown up to `e`.
pub fn proper_transform(
    model: &ManifoldModel,
    a: &HomologyClass,
    e: &HomologyClass,
    mult: u32,
) -> Result<HomologyClass> {
    model.lattice.contains(a)?;
    model.lattice.contains(e)?;
    a.sub(&e.scale(mult as i64)?)
}

type Matrix = Vec<Vec<i64>>;

/// Unimodular `U` with `w U = (0, .., 0, ±1)` and its inverse, by column
/// operations. The first `n - 1` columns of `U` span `ker w`.
fn kernel_basis(w: &[i64]) -> Option<(Matrix, Matrix)> {
    let n = w.len();
    let ident = |n: usize| -> Vec<Vec<i64>> { (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect() };
    let mut v = w.to_vec();
    let mut u = ident(n);
    let mut uinv = ident(n);
    loop {
        let nonzero: Vec<usize> = (0..n).filter(|&i| v[i] != 0).collect();
        if nonzero.len() <= 1 {
            break;
        }
        let p = *nonzero.iter().min_by_key(|&&i| (v[i].unsigned_abs(), i)).unwrap();
        for &q in &nonzero {
            if q == p {
                continue;
            }
            let t = v[q].div_euclid(v[p]);
            if t == 0 {
                continue;
            }
            v[q] -= t * v[p];
            for row in u.iter_mut() {
                row[q] = row[q].checked_sub(t.checked_mul(row[p])?)?;
            }
            for j in 0..n {
                uinv[p][j] = uinv[p][j].checked_add(t.checked_mul(uinv[q][j])?)?;
            }
        }
    }
    let p = (0..n).find(|&i| v[i] != 0)?;
    if v[p].abs() != 1 {
        return None;
    }
    // move column p of U (row p of U^-1) to the end, keeping the others in order
    for row in u.iter_mut() {
        let c = row.remove(p);
        row.push(c);
    }
    let r = uinv.remove(p);
    uinv.push(r);
    Some((u, uinv))
}

/// Inverse of [`blow_up`]: restricts to the orthogonal complement of an
/// exceptional candidate `E` (`E^2 = -1`, `K.E = -1`).
///
/// If `E` is an orthogonal basis vector it is simply dropped. Otherwise an
/// integral basis of `E^perp` is built by unimodular column reduction of
/// `w = G E`; if that basis needs a coefficient larger than
/// [`BASIS_CHANGE_BOUND`] the call fails with `BasisChangeNotFound`. New
/// basis vectors are labelled by their expression in the old basis.
pub fn blow_down(m: &ManifoldModel, e: &HomologyClass) -> Result<ManifoldModel> {
    let l = &m.lattice;
    l.contains(e)?;
    let square = l.square(e)?;
    let canonical = m.canonical_pairing(e)?;
    if square != -1 || canonical != -1 {
        return Err(Error::NotExceptional { square, canonical });
    }
    let n = l.rank();
    let flags = ModelFlags { minimal_known: None, ..m.flags };
    let name = format!("{}/blowdown", m.name);

    let unit = (0..n).find(|&j| e.coeffs()[j] == 1 && e.coeffs().iter().enumerate().all(|(i, &c)| i == j || c == 0));
    if let Some(j) = unit.filter(|&j| (0..n).all(|i| i == j || (l.gram()[i][j] == 0 && l.gram()[j][i] == 0))) {
        let keep: Vec<usize> = (0..n).filter(|&i| i != j).collect();
        let names = keep.iter().map(|&i| l.names()[i].clone()).collect();
        let gram = keep.iter().map(|&i| keep.iter().map(|&k| l.gram()[i][k]).collect()).collect();
        let lattice = IntersectionLattice::new(names, gram)?;
        let k_new = m.canonical.sub(e)?;
        let kc = keep.iter().map(|&i| k_new.coeffs()[i]).collect();
        let mut out = ManifoldModel::new(name, lattice, kc, m.euler - 1, m.signature + 1, flags)?;
        if let Some(f) = m.fiber.as_ref().filter(|f| f.coeffs()[j] == 0) {
            let fc = keep.iter().map(|&i| f.coeffs()[i]).collect();
            let fiber = out.class(fc)?;
            out = out.with_fiber(fiber)?;
        }
        return Ok(out);
    }

    let w = l.dual_row(e)?;
    let (u, uinv) = kernel_basis(&w).ok_or(Error::BasisChangeNotFound { bound: BASIS_CHANGE_BOUND })?;
    let basis: Vec<HomologyClass> =
        (0..n - 1).map(|c| l.class((0..n).map(|r| u[r][c]).collect())).collect::<Result<_>>()?;
    if basis.iter().flat_map(|b| b.coeffs()).any(|c| c.abs() > BASIS_CHANGE_BOUND) {
        return Err(Error::BasisChangeNotFound { bound: BASIS_CHANGE_BOUND });
    }
    let coords = |x: &HomologyClass| -> Vec<i64> {
        (0..n - 1).map(|r| (0..n).map(|c| uinv[r][c] * x.coeffs()[c]).sum()).collect()
    };
    let names = basis.iter().map(|b| l.format_class(b).replace(' ', "")).collect();
    let gram = basis
        .iter()
        .map(|a| basis.iter().map(|b| l.pair(a, b)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let lattice = IntersectionLattice::new(names, gram)?;
    let k_new = m.canonical.sub(e)?;
    let mut out = ManifoldModel::new(name, lattice, coords(&k_new), m.euler - 1, m.signature + 1, flags)?;
    if let Some(f) = &m.fiber {
        if l.pair(f, e)? == 0 {
            let fc = coords(f);
            let fiber = out.class(fc)?;
            out = out.with_fiber(fiber)?;
        }
    }
    Ok(out)
}

/// Which of the four sphere-sum caps a pair `(Y, V_Y)` is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CapKind {
    /// `(CP^2, H)`: the ordinary blow-down.
    Cp2Line,
    /// `(CP^2, 2H)`: the rational blow-down of a `-4`-sphere.
    Cp2Conic,
    BundleFiber {
        genus: u32,
        twisted: bool,
    },
    /// `S^2`-bundle over `S^2` with a section of square `n`.
    BundleSection {
        n: i64,
    },
}

/// The four cap families, without parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CapFamily {
    Cp2Line,
    Cp2Conic,
    BundleFiber,
    BundleSection,
}

impl CapKind {
    pub fn family(&self) -> CapFamily {
        match self {
            CapKind::Cp2Line => CapFamily::Cp2Line,
            CapKind::Cp2Conic => CapFamily::Cp2Conic,
            CapKind::BundleFiber { .. } => CapFamily::BundleFiber,
            CapKind::BundleSection { .. } => CapFamily::BundleSection,
        }
    }

    pub fn divisor_square(&self) -> i64 {
        match self {
            CapKind::Cp2Line => 1,
            CapKind::Cp2Conic => 4,
            CapKind::BundleFiber { .. } => 0,
            CapKind::BundleSection { n } => *n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardCap {
    pub kind: CapKind,
    pub pair: SymplecticPair,
}

impl StandardCap {
    pub fn new(kind: CapKind) -> Result<Self> {
        let pair = match kind {
            CapKind::Cp2Line | CapKind::Cp2Conic => {
                let m = cp2_blowup(0);
                let d = if kind == CapKind::Cp2Line { 1 } else { 2 };
                let v = m.class(vec![d])?;
                SymplecticPair::new(m, v, 0)?
            }
            CapKind::BundleFiber { genus, twisted } => {
                let m = s2_bundle(genus, twisted);
                let v = m.lattice.basis_class(1);
                SymplecticPair::new(m, v, 0)?
            }
            CapKind::BundleSection { n } => {
                if n < 0 {
                    return Err(Error::NotASphereCap(format!("section square {n} < 0")));
                }
                let q = completion_q(n);
                SymplecticPair::new(q.model, q.infinity_section, 0)?
            }
        };
        Ok(Self { kind, pair })
    }
}

/// Instances of the four cap families: both lines in `CP^2`, fibers of both
/// bundles over bases of genus `0..=3`, and sections of square `0..=4`.
pub fn standard_caps() -> Vec<StandardCap> {
    let mut kinds = vec![CapKind::Cp2Line, CapKind::Cp2Conic];
    for genus in 0..=3 {
        for twisted in [false, true] {
            kinds.push(CapKind::BundleFiber { genus, twisted });
        }
    }
    kinds.extend((0..=4).map(|n| CapKind::BundleSection { n }));
    kinds.into_iter().map(|k| StandardCap::new(k).expect("standard cap")).collect()
}

/// Sublattice model of a Kummer surface blown up at two points of an
/// embedded `-2`-sphere `v`: basis `{v, e1, e2}`, `K = e1 + e2`, and
/// `V = v - e1 - e2` the `-4` proper transform. Characteristic numbers are
/// those of `K3 # 2(-CP^2)`.
pub fn kummer_two_point_blowup() -> SymplecticPair {
    let lattice = IntersectionLattice::diagonal(&["v", "e1", "e2"], &[-2, -1, -1]).expect("well-formed");
    let flags = ModelFlags { rational: false, ruled: false, closed: false, minimal_known: Some(false) };
    let m = ManifoldModel::new("Kummer#2-CP2", lattice, vec![0, 1, 1], 26, -18, flags).expect("well-formed");
    let v = m.class(vec![1, -1, -1]).expect("rank 3");
    SymplecticPair::new(m, v, 0).expect("genus 0")
}

/// `CP^2 # 10(-CP^2)` with the `-4`-sphere `3H - 2e1 - e2 - .. - e10`.
pub fn rational_minus4_cubic() -> SymplecticPair {
    let m = cp2_blowup(10);
    let mut c = vec![-1i64; 11];
    c[0] = 3;
    c[1] = -2;
    let v = m.class(c).expect("rank 11");
    SymplecticPair::new(m, v, 0).expect("genus 0")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{adjunction_genus, validate_model};
    use num_rational::Ratio;

    #[test]
    fn cp2_blowup_basics() {
        let m = cp2_blowup(0);
        assert_eq!(m.canonical.coeffs(), &[-3]);
        assert_eq!((m.euler, m.signature), (3, 1));
        let m = cp2_blowup(10);
        assert_eq!(m.rank(), 11);
        assert_eq!(m.signature, -9);
        let m = cp2_blowup(9);
        assert_eq!(m.square(&m.canonical).unwrap(), 0);
    }

    #[test]
    fn bundles() {
        let m = s2_bundle(0, false);
        assert_eq!(m.canonical.coeffs(), &[-2, -2]);
        let m = s2_bundle(1, false);
        let s = m.lattice.basis_class(0);
        assert_eq!(adjunction_genus(&m, &s).unwrap(), Ratio::from_integer(1));
        for g in 0..10 {
            for t in [false, true] {
                let m = s2_bundle(g, t);
                let f = m.fiber.clone().unwrap();
                assert_eq!(adjunction_genus(&m, &f).unwrap(), Ratio::from_integer(0));
                assert_eq!(m.canonical_pairing(&f).unwrap(), -2);
                let s = m.lattice.basis_class(0);
                assert_eq!(adjunction_genus(&m, &s).unwrap(), Ratio::from_integer(g as i64));
                assert_eq!(validate_model(&m), Ok(()));
            }
        }
    }

    #[test]
    fn completion_sections() {
        let q = completion_q(4);
        assert_eq!(q.model.square(&q.infinity_section).unwrap(), 4);
        for n in -6..=6 {
            let q = completion_q(n);
            assert_eq!(q.model.square(&q.zero_section).unwrap(), -n);
            assert_eq!(q.model.square(&q.infinity_section).unwrap(), n);
            assert_eq!(adjunction_genus(&q.model, &q.zero_section).unwrap(), Ratio::from_integer(0));
            assert_eq!(adjunction_genus(&q.model, &q.infinity_section).unwrap(), Ratio::from_integer(0));
            assert_eq!(q.model.pair(&q.zero_section, &q.infinity_section).unwrap(), 0);
            assert_eq!(validate_model(&q.model), Ok(()));
        }
        let q = completion_q(0);
        assert_eq!(q.zero_section, q.infinity_section);
    }

    #[test]
    fn blow_up_matches_constructor() {
        assert_eq!(blow_up(&cp2_blowup(0)).lattice, cp2_blowup(1).lattice);
        assert_eq!(blow_up(&cp2_blowup(0)).canonical, cp2_blowup(1).canonical);
        let m = cp2_blowup(3);
        let b = blow_up(&m);
        assert_eq!(b.square(&b.canonical).unwrap(), m.square(&m.canonical).unwrap() - 1);
        let e = latest_exceptional(&b);
        assert_eq!(adjunction_genus(&b, &e).unwrap(), Ratio::from_integer(0));
        assert_eq!(validate_model(&b), Ok(()));
    }

    #[test]
    fn blow_down_inverts_blow_up() {
        for m in [cp2_blowup(0), cp2_blowup(4), s2_bundle(2, true), completion_q(3).model] {
            let b = blow_up(&m);
            let d = blow_down(&b, &latest_exceptional(&b)).unwrap();
            assert_eq!(d.lattice, m.lattice);
            assert_eq!(d.canonical, m.canonical);
            assert_eq!((d.euler, d.signature), (m.euler, m.signature));
            assert_eq!(d.fiber, m.fiber);
        }
        let m = cp2_blowup(1);
        let d = blow_down(&m, &m.lattice.basis_class(1)).unwrap();
        assert_eq!(d.lattice, cp2_blowup(0).lattice);
    }

    #[test]
    fn blow_down_line_through_two_points_gives_even_form() {
        let m = cp2_blowup(2);
        let e = m.class(vec![1, -1, -1]).unwrap();
        let d = blow_down(&m, &e).unwrap();
        assert_eq!(d.rank(), 2);
        assert_eq!(d.lattice.gram(), &[vec![0, 1], vec![1, 0]]);
        assert_eq!(d.lattice.names(), &["-H+e1".to_string(), "-H+e2".to_string()]);
        assert_eq!((d.euler, d.signature), (4, 0));
        assert_eq!(d.square(&d.canonical).unwrap(), 8);
        assert_eq!(validate_model(&d), Ok(()));
    }

    #[test]
    fn blow_down_rejects_non_exceptional() {
        let m = s2_bundle(0, false);
        let err = blow_down(&m, &m.lattice.basis_class(1)).unwrap_err();
        assert_eq!(err, Error::NotExceptional { square: 0, canonical: -2 });
    }

    #[test]
    fn blow_down_through_basis_change() {
        let m = cp2_blowup(9);
        let e = m.class(vec![3, -2, -1, -1, -1, -1, -1, -1, 0, 0]).unwrap();
        let d = blow_down(&m, &e).unwrap();
        assert_eq!(d.rank(), 9);
        assert_eq!(d.square(&d.canonical).unwrap(), 1);
        assert_eq!(validate_model(&d), Ok(()));
    }

    #[test]
    fn blow_down_reports_large_basis_change() {
        // hyperbolic plane + <-1>, E = (12, 12, 17): 2*12*12 - 17^2 = -1.
        // E^perp has third coordinates in 12Z, so any basis needs a +-12.
        let l = IntersectionLattice::new(
            vec!["s".into(), "f".into(), "e".into()],
            vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, -1]],
        )
        .unwrap();
        let m = ManifoldModel::new("big", l, vec![7, 0, 5], 5, -1, ModelFlags::default()).unwrap();
        let e = m.class(vec![12, 12, 17]).unwrap();
        assert_eq!(m.square(&e).unwrap(), -1);
        assert_eq!(m.canonical_pairing(&e).unwrap(), -1);
        assert_eq!(blow_down(&m, &e).unwrap_err(), Error::BasisChangeNotFound { bound: BASIS_CHANGE_BOUND });
    }

    #[test]
    fn kernel_basis_is_unimodular_kernel() {
        let w = [6, 10, 15];
        let (u, uinv) = kernel_basis(&w).unwrap();
        for c in 0..2 {
            let s: i64 = (0..3).map(|r| w[r] * u[r][c]).sum();
            assert_eq!(s, 0);
        }
        for i in 0..3 {
            for j in 0..3 {
                let s: i64 = (0..3).map(|k| u[i][k] * uinv[k][j]).sum();
                assert_eq!(s, i64::from(i == j));
            }
        }
        assert!(kernel_basis(&[2, 4]).is_none());
    }

    #[test]
    fn proper_transform_chain() {
        // blow up a point, then three points on the exceptional sphere
        let x = blow_up(&cp2_blowup(0));
        let mut e1_class = latest_exceptional(&x);
        let mut cur = x.clone();
        for _ in 0..3 {
            let next = blow_up(&cur);
            let lifted = lift_class(&cur.lattice, &next, &e1_class).unwrap();
            let e = latest_exceptional(&next);
            let before = next.square(&lifted).unwrap();
            e1_class = proper_transform(&next, &lifted, &e, 1).unwrap();
            assert_eq!(next.square(&e1_class).unwrap(), before - 1);
            cur = next;
        }
        assert_eq!(cur.format_class(&e1_class), "e1 - e2 - e3 - e4");
        assert_eq!(cur.square(&e1_class).unwrap(), -4);
        assert_eq!(adjunction_genus(&cur, &e1_class).unwrap(), Ratio::from_integer(0));
        let orig = lift_class(&x.lattice, &cur, &latest_exceptional(&x)).unwrap();
        assert_eq!(cur.pair(&orig, &e1_class).unwrap(), -1);
        let z = proper_transform(&cur, &e1_class, &latest_exceptional(&cur), 0).unwrap();
        assert_eq!(z, e1_class);
    }

    #[test]
    fn proper_transform_kummer_sphere() {
        let base = IntersectionLattice::diagonal(&["v"], &[-2]).unwrap();
        let k3 = ManifoldModel::new("K3-part", base, vec![0], 24, -16, ModelFlags::default()).unwrap();
        let v0 = k3.lattice.basis_class(0);
        let x1 = blow_up(&k3);
        let v1 =
            proper_transform(&x1, &lift_class(&k3.lattice, &x1, &v0).unwrap(), &latest_exceptional(&x1), 1).unwrap();
        let x2 = blow_up(&x1);
        let v2 =
            proper_transform(&x2, &lift_class(&x1.lattice, &x2, &v1).unwrap(), &latest_exceptional(&x2), 1).unwrap();
        assert_eq!(x2.square(&v2).unwrap(), -4);
        for i in 1..=2 {
            assert_eq!(x2.pair(&x2.lattice.basis_class(i), &v2).unwrap(), 1);
        }
        let kummer = kummer_two_point_blowup();
        assert_eq!(x2.lattice.gram(), kummer.model.lattice.gram());
        assert_eq!(x2.canonical.coeffs(), kummer.model.canonical.coeffs());
        assert_eq!(v2.coeffs(), kummer.divisor.coeffs());
    }

    #[test]
    fn caps_cover_four_families() {
        let caps = standard_caps();
        let fams: std::collections::HashSet<_> = caps.iter().map(|c| c.kind.family()).collect();
        assert_eq!(fams.len(), 4);
        for c in &caps {
            assert_eq!(c.pair.divisor_square(), c.kind.divisor_square());
            assert_eq!(c.pair.divisor_genus, 0);
        }
        assert!(caps.iter().any(|c| c.kind == CapKind::Cp2Line && c.pair.divisor_square() == 1));
        assert!(caps.iter().any(|c| c.kind == CapKind::Cp2Conic && c.pair.divisor_square() == 4));
        assert!(caps.iter().any(|c| c.kind == CapKind::BundleFiber { genus: 1, twisted: false }));
    }

    #[test]
    fn shipped_pairs_are_consistent() {
        let k = kummer_two_point_blowup();
        assert_eq!(k.divisor_square(), -4);
        assert_eq!(k.model.square(&k.model.canonical).unwrap(), 2 * 26 + 3 * -18);
        let r = rational_minus4_cubic();
        assert_eq!(r.divisor_square(), -4);
        assert_eq!(validate_model(&r.model), Ok(()));
    }
}
