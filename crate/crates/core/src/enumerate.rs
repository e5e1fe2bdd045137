//! Bounded enumeration of lattice classes with prescribed square and
//! linear pairings, and the relative-minimality checks built on it.
//!
//! Coordinates split into a *head* (everything not in the diagonal
//! negative-definite summand) scanned exhaustively over the box, and a
//! *tail* of orthogonal negative basis vectors filled in by depth-first
//! search. In the tail the remaining square budget is fixed, which bounds
//! every coefficient, and each linear constraint is pruned by
//! Cauchy-Schwarz against that budget.
//!
//! Results are sorted canonically (see [`canonical_cmp`]) so that output
//! does not depend on how the parallel scan was scheduled.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{adjunction_genus, HomologyClass, IntersectionLattice, ManifoldModel, SymplecticPair};
use crate::library::{blow_up_n, cp2_blowup, s2_bundle};

pub const DEFAULT_BOUND: i64 = 4;

struct Search<'a> {
    gram: &'a [Vec<i64>],
    head: Vec<usize>,
    tail: Vec<usize>,
    /// `|G_ii|` for tail indices, in tail order.
    tail_weight: Vec<i128>,
    square: i128,
    rows: Vec<Vec<i64>>,
    targets: Vec<i128>,
    /// `suffix[k][j] = sum_{t >= j} l_{k,t}^2 / |d_t|` over tail positions,
    /// stored as (numerator, denominator).
    suffix: Vec<Vec<(i128, i128)>>,
    bound: i64,
}

impl<'a> Search<'a> {
    fn new(l: &'a IntersectionLattice, square: i64, rows: Vec<Vec<i64>>, targets: Vec<i64>, bound: i64) -> Self {
        let tail_mask = if l.is_symmetric() { l.diagonal_tail() } else { vec![false; l.rank()] };
        let head: Vec<usize> = (0..l.rank()).filter(|&i| !tail_mask[i]).collect();
        let tail: Vec<usize> = (0..l.rank()).filter(|&i| tail_mask[i]).collect();
        let tail_weight: Vec<i128> = tail.iter().map(|&i| -(l.gram()[i][i] as i128)).collect();
        let suffix = rows
            .iter()
            .map(|row| {
                let mut acc = vec![(0i128, 1i128); tail.len() + 1];
                for j in (0..tail.len()).rev() {
                    let (p, q) = acc[j + 1];
                    let l2 = (row[tail[j]] as i128).pow(2);
                    let w = tail_weight[j];
                    let (np, nq) = (p * w + l2 * q, q * w);
                    let g = num_integer::gcd(np, nq).max(1);
                    acc[j] = (np / g, nq / g);
                }
                acc
            })
            .collect();
        Self {
            gram: l.gram(),
            head,
            tail,
            tail_weight,
            square: square as i128,
            rows,
            targets: targets.into_iter().map(i128::from).collect(),
            suffix,
            bound,
        }
    }

    fn run(&self) -> Vec<Vec<i64>> {
        let side = (2 * self.bound + 1) as u64;
        let boxes = side.checked_pow(self.head.len() as u32).expect("search box too large");
        (0..boxes)
            .into_par_iter()
            .flat_map_iter(|index| {
                let mut coeffs = vec![0i64; self.head.len() + self.tail.len()];
                let mut rem = index;
                for &h in &self.head {
                    coeffs[h] = (rem % side) as i64 - self.bound;
                    rem /= side;
                }
                let mut out = Vec::new();
                self.complete_head(coeffs, &mut out);
                out
            })
            .collect()
    }

    fn complete_head(&self, mut coeffs: Vec<i64>, out: &mut Vec<Vec<i64>>) {
        let mut head_sq: i128 = 0;
        for &i in &self.head {
            for &j in &self.head {
                head_sq += coeffs[i] as i128 * self.gram[i][j] as i128 * coeffs[j] as i128;
            }
        }
        let budget = head_sq - self.square;
        if budget < 0 || (self.tail.is_empty() && budget != 0) {
            return;
        }
        let rem: Vec<i128> = self
            .rows
            .iter()
            .zip(&self.targets)
            .map(|(row, t)| t - self.head.iter().map(|&i| row[i] as i128 * coeffs[i] as i128).sum::<i128>())
            .collect();
        self.fill_tail(0, budget, rem, &mut coeffs, out);
    }

    fn fill_tail(&self, pos: usize, budget: i128, rem: Vec<i128>, coeffs: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if pos == self.tail.len() {
            if budget == 0 && rem.iter().all(|r| *r == 0) {
                out.push(coeffs.clone());
            }
            return;
        }
        for (k, r) in rem.iter().enumerate() {
            let (p, q) = self.suffix[k][pos];
            // r^2 <= (p/q) * budget
            if r * r * q > p * budget {
                return;
            }
        }
        let w = self.tail_weight[pos];
        let cmax = ((budget / w) as f64).sqrt().floor() as i64;
        let cmax = (cmax..=cmax + 1).rev().find(|c| (*c as i128).pow(2) * w <= budget).unwrap_or(0);
        let cmax = cmax.min(self.bound);
        let idx = self.tail[pos];
        for c in -cmax..=cmax {
            let c128 = c as i128;
            let next_rem = self.rows.iter().zip(&rem).map(|(row, r)| r - row[idx] as i128 * c128).collect();
            coeffs[idx] = c;
            self.fill_tail(pos + 1, budget - w * c128 * c128, next_rem, coeffs, out);
        }
        coeffs[idx] = 0;
    }
}

/// Canonical order: head coefficients by magnitude (positive before
/// negative), then tail coefficients sorted descending, then the tail support positions, then the raw vector.
///
/// Classes related by a permutation of the orthogonal `-1` basis vectors
/// are adjacent; among them the one supported on earlier indices comes first
/// (`e1` before `e2`, `H - e1 - e2` before `H - e7 - e8`).
pub fn canonical_cmp(l: &IntersectionLattice, a: &HomologyClass, b: &HomologyClass) -> Ordering {
    let mask = l.diagonal_tail();
    let key = |c: &HomologyClass| {
        let head: Vec<(i64, bool)> =
            (0..c.rank()).filter(|&i| !mask[i]).map(|i| (c.coeffs()[i].abs(), c.coeffs()[i] < 0)).collect();
        let mut tail: Vec<i64> = (0..c.rank()).filter(|&i| mask[i]).map(|i| c.coeffs()[i]).collect();
        tail.sort_unstable_by(|x, y| y.cmp(x));
        let support: Vec<usize> = (0..c.rank()).filter(|&i| mask[i] && c.coeffs()[i] != 0).collect();
        (head, tail, support)
    };
    key(a).cmp(&key(b)).then_with(|| a.coeffs().cmp(b.coeffs()))
}

pub fn canonical_sort(l: &IntersectionLattice, classes: &mut [HomologyClass]) {
    classes.sort_by(|a, b| canonical_cmp(l, a, b));
}

/// All classes `A` with `|A_i| <= bound`, `A^2 = square` and
/// `W_k . A = t_k` for every `(W_k, t_k)` in `constraints`.
pub fn enumerate_classes(
    m: &ManifoldModel,
    square: i64,
    constraints: &[(HomologyClass, i64)],
    bound: i64,
) -> Result<Vec<HomologyClass>> {
    let l = &m.lattice;
    let mut rows = Vec::with_capacity(constraints.len());
    let mut targets = Vec::with_capacity(constraints.len());
    for (w, t) in constraints {
        rows.push(l.dual_row(w)?);
        targets.push(*t);
    }
    let found = Search::new(l, square, rows, targets, bound.max(0)).run();
    let mut classes = found.into_iter().map(|c| l.class(c)).collect::<Result<Vec<_>>>()?;
    canonical_sort(l, &mut classes);
    Ok(classes)
}

/// Lattice-level exceptional candidates `E^2 = -1`, `K.E = -1` in the box.
///
/// Candidates are not checked for symplectic representability.
pub fn enumerate_exceptional_candidates(m: &ManifoldModel, bound: i64) -> Result<Vec<HomologyClass>> {
    enumerate_classes(m, -1, &[(m.canonical.clone(), -1)], bound)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereClassReport {
    pub class: HomologyClass,
    pub label: String,
    pub square: i64,
    pub genus: u32,
    pub canonical_pairing: i64,
}

/// Genus-0 classes of the given square in the box.
///
/// With `geometric` set, non-primitive classes are dropped and classes are
/// required to have positive degree where that is meaningful: the `H`
/// coefficient on a rational model with an `H` basis vector, or zero
/// pairing with the fiber on an irrationally ruled model (rational curves
/// there lie in fibers).
pub fn enumerate_sphere_classes(
    m: &ManifoldModel,
    square: i64,
    bound: i64,
    geometric: bool,
) -> Result<Vec<SphereClassReport>> {
    let canonical = -2 - square;
    let classes = enumerate_classes(m, square, &[(m.canonical.clone(), canonical)], bound)?;
    let h_index = m.lattice.index_of("H").filter(|&i| m.flags.rational && m.lattice.gram()[i][i] > 0);
    let mut out = Vec::new();
    for c in classes {
        if geometric {
            if !c.is_primitive() {
                continue;
            }
            if let Some(h) = h_index {
                if c.coeffs()[h] <= 0 {
                    continue;
                }
            } else if let (Some(f), false) = (&m.fiber, m.flags.rational) {
                if m.pair(f, &c)? != 0 {
                    continue;
                }
            }
        }
        debug_assert_eq!(adjunction_genus(m, &c)?, 0.into());
        out.push(SphereClassReport {
            label: m.format_class(&c),
            square,
            genus: 0,
            canonical_pairing: canonical,
            class: c,
        });
    }
    Ok(out)
}

/// `V = lambda K` over the rationals, returned as reduced `(num, den)`.
pub fn canonical_multiple(m: &ManifoldModel, v: &HomologyClass) -> Option<(i64, i64)> {
    let k = m.canonical.coeffs();
    let v = v.coeffs();
    let pivot = k.iter().position(|&x| x != 0)?;
    let (num, den) = (v[pivot], k[pivot]);
    if (0..k.len()).any(|i| v[i] as i128 * den as i128 != num as i128 * k[i] as i128) {
        return None;
    }
    let g = num_integer::gcd(num, den).max(1);
    let s = den.signum();
    Some((s * num / g, s * den / g))
}

fn isqrt_floor(x: &BigRational) -> i64 {
    if !x.is_positive() {
        return 0;
    }
    let approx = x.to_f64().unwrap_or(f64::MAX).sqrt().floor() as i64;
    let mut r = approx.max(0);
    let sq = |r: i64| BigRational::from_integer(BigInt::from(r) * BigInt::from(r));
    while sq(r) > *x {
        r -= 1;
    }
    while sq(r + 1) <= *x {
        r += 1;
    }
    r
}

fn inverse_diagonal(g: &[Vec<i64>]) -> Option<Vec<BigRational>> {
    let n = g.len();
    let q = |x: i64| BigRational::from_integer(BigInt::from(x));
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..2 * n).map(|j| if j < n { q(g[i][j]) } else { q(i64::from(j - n == i)) }).collect())
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        let piv = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x /= &piv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pr = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(pr) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n + i].clone()).collect())
}

/// A coefficient bound that provably contains every class with the given
/// square and canonical pairing, when one can be derived:
///
/// * negative-definite forms: `x_i^2 <= |A^2| * (-G)^{-1}_ii`;
/// * one positive basis vector orthogonal to a diagonal negative tail:
///   Cauchy-Schwarz on the tail turns the canonical constraint into a
///   quadratic inequality in the head coefficient, bounded when its leading
///   coefficient is positive (e.g. `CP^2 # k` for `k <= 8`).
///
/// `None` when neither applies.
pub fn certified_bound(m: &ManifoldModel, square: i64, canonical: i64) -> Option<i64> {
    let l = &m.lattice;
    let inertia = l.inertia()?;
    let n = l.rank();
    let q = |x: i64| BigRational::from_integer(BigInt::from(x));
    if inertia.negative == n {
        if square > 0 {
            return Some(0);
        }
        let neg: Vec<Vec<i64>> = l.gram().iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        let inv = inverse_diagonal(&neg)?;
        return inv.iter().map(|d| isqrt_floor(&(d * q(-square)))).max();
    }
    let tail = l.diagonal_tail();
    let head: Vec<usize> = (0..n).filter(|&i| !tail[i]).collect();
    if head.len() != 1 {
        return None;
    }
    let h = head[0];
    let d = l.gram()[h][h];
    if d <= 0 {
        return None;
    }
    let row = l.dual_row(&m.canonical).ok()?;
    let weight =
        (0..n).filter(|&i| tail[i]).fold(BigRational::zero(), |acc, i| acc + q(row[i] * row[i]) / q(-l.gram()[i][i]));
    let lh = q(row[h]);
    let t = q(canonical);
    let s = q(square);
    let dq = q(d);
    let alpha = &lh * &lh - &weight * &dq;
    if !alpha.is_positive() {
        return None;
    }
    // (t - lh a)^2 <= W (d a^2 - s) and d a^2 - s >= 0
    let feasible = |a: i64| {
        let a = q(a);
        let budget = &dq * &a * &a - &s;
        let lhs = (&t - &lh * &a) * (&t - &lh * &a);
        !budget.is_negative() && lhs <= &weight * &budget
    };
    let center = (&t * &lh / &alpha).to_f64()?;
    let disc = (&t * &lh) * (&t * &lh) - &alpha * (&t * &t + &weight * &s);
    let spread = if disc.is_negative() { 0.0 } else { (disc.to_f64()?).sqrt() / alpha.to_f64()? };
    let lo = (center - spread).floor() as i64 - 2;
    let hi = (center + spread).ceil() as i64 + 2;
    let mut best = 0i64;
    for a in lo..=hi {
        if !feasible(a) {
            continue;
        }
        best = best.max(a.abs());
        let budget = q(d * a * a - square);
        for i in (0..n).filter(|&i| tail[i]) {
            best = best.max(isqrt_floor(&(&budget / q(-l.gram()[i][i]))));
        }
    }
    Some(best)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MinimalityCertificate {
    /// `V = (num/den) K`, so `E.V = -num/den != 0` for every candidate.
    ProportionalToCanonical { num: i64, den: i64 },
    /// The search box contains every exceptional candidate.
    ExhaustiveSearch { required_bound: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelativeMinimality {
    Minimal { certificate: MinimalityCertificate },
    NotMinimal { witness: HomologyClass },
    Unknown { searched_bound: i64 },
}

impl RelativeMinimality {
    pub fn witness(&self) -> Option<&HomologyClass> {
        match self {
            RelativeMinimality::NotMinimal { witness } => Some(witness),
            _ => None,
        }
    }
}

/// Searches for an exceptional candidate disjoint from `V` (`E.V = 0`).
///
/// `Minimal` is only returned with a certificate that covers all
/// candidates, not just the box; otherwise a failed search is `Unknown`.
pub fn is_relatively_minimal(p: &SymplecticPair, bound: i64) -> Result<RelativeMinimality> {
    let m = &p.model;
    if let Some((num, den)) = canonical_multiple(m, &p.divisor).filter(|(num, _)| *num != 0) {
        return Ok(RelativeMinimality::Minimal {
            certificate: MinimalityCertificate::ProportionalToCanonical { num, den },
        });
    }
    let disjoint = enumerate_classes(m, -1, &[(m.canonical.clone(), -1), (p.divisor.clone(), 0)], bound)?;
    if let Some(witness) = disjoint.into_iter().next() {
        return Ok(RelativeMinimality::NotMinimal { witness });
    }
    match certified_bound(m, -1, -1) {
        Some(required_bound) if required_bound <= bound => {
            Ok(RelativeMinimality::Minimal { certificate: MinimalityCertificate::ExhaustiveSearch { required_bound } })
        }
        _ => Ok(RelativeMinimality::Unknown { searched_bound: bound }),
    }
}

/// Two exceptional candidates, ordered canonically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessPair {
    pub first: HomologyClass,
    pub second: HomologyClass,
}

/// Pairs of distinct exceptional candidates with `E_i.V = 1` and
/// `E_1.E_2 = 0`, for a `-4`-sphere `V`.
pub fn find_blowdown_witness_pairs(p: &SymplecticPair, bound: i64) -> Result<Vec<WitnessPair>> {
    if p.divisor_genus != 0 || p.divisor_square() != -4 {
        return Err(Error::Precondition(format!(
            "witness pairs need a -4-sphere, got square {} genus {}",
            p.divisor_square(),
            p.divisor_genus
        )));
    }
    let m = &p.model;
    let meeting_once = enumerate_classes(m, -1, &[(m.canonical.clone(), -1), (p.divisor.clone(), 1)], bound)?;
    let mut out = Vec::new();
    for (i, a) in meeting_once.iter().enumerate() {
        for b in &meeting_once[i + 1..] {
            if m.pair(a, b)? == 0 {
                out.push(WitnessPair { first: a.clone(), second: b.clone() });
            }
        }
    }
    Ok(out)
}

/// Whether every pair from [`find_blowdown_witness_pairs`] is inside the
/// box, independent of the bound.
pub fn witness_search_exhaustive(p: &SymplecticPair, bound: i64) -> bool {
    if let Some((num, den)) = canonical_multiple(&p.model, &p.divisor) {
        // E.V = -num/den for every candidate; a pair needs E.V = 1
        if num != -den {
            return true;
        }
    }
    matches!(certified_bound(&p.model, -1, -1), Some(b) if b <= bound)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalRow {
    /// Degree of the immersed sphere in `CP^2`.
    pub degree: i64,
    pub double_points: i64,
    pub blowups: usize,
    pub class: HomologyClass,
    pub label: String,
    pub square: i64,
    pub genus: i64,
}

impl RationalRow {
    pub fn model(&self) -> ManifoldModel {
        cp2_blowup(self.blowups)
    }

    pub fn pair(&self) -> Result<SymplecticPair> {
        SymplecticPair::new(self.model(), self.class.clone(), 0)
    }
}

fn double_points(a: i64) -> i64 {
    (a - 1) * (a - 2) / 2
}

/// Largest degree `a` for which a rational curve of degree `a` can be
/// blown up at all its nodes to a sphere of square at least `-4`
/// (`a^2 - 4 delta >= -4`).
pub fn nodal_degree_bound() -> i64 {
    // a^2 - 4 delta = -a^2 + 6a - 4 decreases for a >= 3, so the first
    // failure ends the range
    (1..).take_while(|&a| a * a - 4 * double_points(a) >= -4).last().unwrap_or(0)
}

/// `-4`-sphere classes `aH - 2(e_1..e_delta) - (e_{delta+1}..e_k)` obtained
/// by blowing up the nodes of a degree-`a` rational curve and then enough
/// further points on it.
pub fn reproduce_rational_table() -> Result<Vec<RationalRow>> {
    let mut rows = Vec::new();
    for a in 1..=nodal_degree_bound() {
        let delta = double_points(a);
        let k = a * a - 3 * delta + 4;
        let blowups =
            usize::try_from(k).map_err(|_| Error::Precondition(format!("negative blow-up count at a = {a}")))?;
        let m = cp2_blowup(blowups);
        let mut c = vec![-1i64; blowups + 1];
        c[0] = a;
        for x in c.iter_mut().skip(1).take(delta as usize) {
            *x = -2;
        }
        let class = m.class(c)?;
        let square = m.square(&class)?;
        let genus = adjunction_genus(&m, &class)?;
        if square != -4 || genus != 0.into() {
            return Err(Error::Precondition(format!("row a = {a} is not a -4-sphere")));
        }
        rows.push(RationalRow {
            degree: a,
            double_points: delta,
            blowups,
            label: m.format_class(&class),
            class,
            square,
            genus: genus.to_integer(),
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuledRow {
    /// `(a_1, .., a_4)` in `V = a f - sum a_i e_i`, `-1` entries first.
    pub signs: [i64; 4],
    pub fiber_coefficient: i64,
    pub class: HomologyClass,
    /// The class written as a blown-up exceptional sphere, e.g.
    /// `e1 - (f-e2) - e3 - e4`.
    pub label: String,
    /// Number of classes in the box related to this row by permuting `e_i`.
    pub family_size: usize,
}

fn ruled_label(negatives: usize) -> String {
    let mut s = if negatives == 0 { "(f-e1)".to_string() } else { "e1".to_string() };
    for i in 2..=4 {
        if i <= negatives {
            s.push_str(&format!(" - (f-e{i})"));
        } else {
            s.push_str(&format!(" - e{i}"));
        }
    }
    s
}

/// `-4`-spheres in `(Sigma_g x S^2) # 4(-CP^2)`, `g >= 1`, grouped into
/// sign families of the `e_i` coefficients.
pub fn reproduce_ruled_table(genus: u32) -> Result<Vec<RuledRow>> {
    if genus == 0 {
        return Err(Error::Precondition("ruled table needs an irrational base (genus >= 1)".into()));
    }
    let m = blow_up_n(&s2_bundle(genus, false), 4);
    let reports = enumerate_sphere_classes(&m, -4, DEFAULT_BOUND, true)?;
    let e_idx: Vec<usize> =
        (1..=4).map(|i| m.lattice.index_of(&format!("e{i}")).expect("blown up four times")).collect();
    let f_idx = m.lattice.index_of("f").expect("bundle basis");
    let mut rows: Vec<RuledRow> = Vec::new();
    for r in &reports {
        // sign convention of the table: a_i = -(coefficient of e_i)
        let mut signs: Vec<i64> = e_idx.iter().map(|&i| -r.class.coeffs()[i]).collect();
        signs.sort_unstable();
        if signs.iter().any(|s| s.abs() != 1) {
            continue;
        }
        let signs: [i64; 4] = signs.try_into().expect("four entries");
        if let Some(row) = rows.iter_mut().find(|row| row.signs == signs) {
            row.family_size += 1;
            continue;
        }
        let negatives = signs.iter().filter(|&&s| s < 0).count();
        let mut rep = vec![0i64; m.rank()];
        rep[f_idx] = r.class.coeffs()[f_idx];
        for (j, &i) in e_idx.iter().enumerate() {
            rep[i] = -signs[j];
        }
        rows.push(RuledRow {
            signs,
            fiber_coefficient: r.class.coeffs()[f_idx],
            class: m.class(rep)?,
            label: ruled_label(negatives),
            family_size: 1,
        });
    }
    rows.sort_by_key(|r| std::cmp::Reverse(r.fiber_coefficient));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::{kummer_two_point_blowup, rational_minus4_cubic};

    /// Full box scan without pruning.
    fn naive(m: &ManifoldModel, square: i64, constraints: &[(HomologyClass, i64)], bound: i64) -> Vec<HomologyClass> {
        let n = m.rank();
        let side = 2 * bound + 1;
        let total = (side as u64).pow(n as u32);
        let mut out = Vec::new();
        for idx in 0..total {
            let mut rem = idx;
            let c: Vec<i64> = (0..n)
                .map(|_| {
                    let v = (rem % side as u64) as i64 - bound;
                    rem /= side as u64;
                    v
                })
                .collect();
            let c = m.class(c).unwrap();
            if m.square(&c).unwrap() == square && constraints.iter().all(|(w, t)| m.pair(w, &c).unwrap() == *t) {
                out.push(c);
            }
        }
        canonical_sort(&m.lattice, &mut out);
        out
    }

    #[test]
    fn exceptional_in_two_point_blowup() {
        let m = cp2_blowup(2);
        let found = enumerate_exceptional_candidates(&m, 2).unwrap();
        let labels: Vec<String> = found.iter().map(|c| m.format_class(c)).collect();
        assert_eq!(labels, vec!["e1", "e2", "H - e1 - e2"]);
        assert_eq!(found, naive(&m, -1, &[(m.canonical.clone(), -1)], 2));
    }

    #[test]
    fn no_exceptional_in_cp2() {
        assert!(enumerate_exceptional_candidates(&cp2_blowup(0), 3).unwrap().is_empty());
    }

    #[test]
    fn cubic_with_node_in_cp2_blown_up_seven_times() {
        let m = cp2_blowup(8);
        let found = enumerate_exceptional_candidates(&m, 3).unwrap();
        let cubic = m.class(vec![3, -2, -1, -1, -1, -1, -1, -1, 0]).unwrap();
        assert!(found.contains(&cubic));
        // with e8 also subtracted the class has square -2, so it is no candidate
        let over = m.class(vec![3, -2, -1, -1, -1, -1, -1, -1, -1]).unwrap();
        assert_eq!(m.square(&over).unwrap(), -2);
        assert!(!found.contains(&over));
    }

    #[test]
    fn sphere_classes_match_exceptional_for_square_minus_one() {
        let m = cp2_blowup(4);
        let spheres: Vec<_> =
            enumerate_sphere_classes(&m, -1, 3, false).unwrap().into_iter().map(|r| r.class).collect();
        assert_eq!(spheres, enumerate_exceptional_candidates(&m, 3).unwrap());
    }

    #[test]
    fn minus_four_line_in_five_fold_blowup() {
        let m = cp2_blowup(5);
        let found = enumerate_sphere_classes(&m, -4, 4, true).unwrap();
        let line = m.class(vec![1, -1, -1, -1, -1, -1]).unwrap();
        assert!(found.iter().any(|r| r.class == line));
        for r in &found {
            assert_eq!(m.square(&r.class).unwrap(), -4);
            assert_eq!(adjunction_genus(&m, &r.class).unwrap(), 0.into());
            assert!(r.class.coeffs()[0] > 0);
        }
    }

    #[test]
    fn pruned_search_agrees_with_naive_scan() {
        let cases: Vec<(ManifoldModel, i64)> = vec![
            (cp2_blowup(3), 3),
            (cp2_blowup(5), 3),
            (cp2_blowup(7), 2),
            (blow_up_n(&s2_bundle(1, false), 3), 3),
            (blow_up_n(&s2_bundle(0, true), 2), 3),
            (kummer_two_point_blowup().model, 3),
            (crate::library::completion_q(3).model, 3),
        ];
        for (m, bound) in cases {
            for square in [-4, -2, -1, 0, 1] {
                let k = m.canonical.clone();
                let cons = [(k, -2 - square)];
                assert_eq!(
                    enumerate_classes(&m, square, &cons, bound).unwrap(),
                    naive(&m, square, &cons, bound),
                    "{} square {square}",
                    m.name
                );
            }
        }
    }

    #[test]
    fn certified_bounds() {
        assert_eq!(certified_bound(&cp2_blowup(1), -1, -1), Some(1));
        assert_eq!(certified_bound(&cp2_blowup(5), -1, -1), Some(2));
        assert_eq!(certified_bound(&cp2_blowup(9), -1, -1), None);
        assert_eq!(certified_bound(&kummer_two_point_blowup().model, -1, -1), Some(1));
        // the bound really covers everything: compare with a wider box
        for k in 1..=6 {
            let m = cp2_blowup(k);
            let b = certified_bound(&m, -1, -1).unwrap();
            assert_eq!(
                enumerate_exceptional_candidates(&m, b).unwrap(),
                enumerate_exceptional_candidates(&m, b + 3).unwrap()
            );
        }
    }

    #[test]
    fn relative_minimality_examples() {
        let m = cp2_blowup(8);
        let mut c = vec![-1i64; 9];
        c[0] = 2;
        let p = SymplecticPair::new(m.clone(), m.class(c).unwrap(), 0).unwrap();
        let w = is_relatively_minimal(&p, 4).unwrap();
        let witness = w.witness().unwrap();
        assert_eq!(m.format_class(witness), "H - e1 - e2");

        let m = cp2_blowup(10);
        let mut c = vec![-2i64; 11];
        c[0] = 6;
        let p = SymplecticPair::new(m.clone(), m.class(c).unwrap(), 0).unwrap();
        assert_eq!(
            is_relatively_minimal(&p, 4).unwrap(),
            RelativeMinimality::Minimal {
                certificate: MinimalityCertificate::ProportionalToCanonical { num: -2, den: 1 }
            }
        );
        for e in enumerate_exceptional_candidates(&m, 4).unwrap() {
            assert_eq!(m.pair(&e, &p.divisor).unwrap(), 2);
        }

        let m = cp2_blowup(1);
        let p = SymplecticPair::new(m.clone(), m.lattice.basis_class(1), 0).unwrap();
        assert_eq!(
            is_relatively_minimal(&p, 4).unwrap(),
            RelativeMinimality::Minimal { certificate: MinimalityCertificate::ExhaustiveSearch { required_bound: 1 } }
        );
    }

    #[test]
    fn bounded_search_without_certificate_is_unknown() {
        // CP2#9 with an honest -4 sphere H - e1 - .. - e5 but infinitely many
        // candidates: the search fails to find a disjoint one only if none
        // lies in the box, and must not claim minimality either way.
        let m = cp2_blowup(9);
        let v = m.class(vec![1, -1, -1, -1, -1, -1, 0, 0, 0, 0]).unwrap();
        let p = SymplecticPair::new(m, v, 0).unwrap();
        let r = is_relatively_minimal(&p, 4).unwrap();
        assert!(!matches!(r, RelativeMinimality::Minimal { .. }));
    }

    #[test]
    fn witness_pairs() {
        let k = kummer_two_point_blowup();
        let pairs = find_blowdown_witness_pairs(&k, 4).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(k.model.format_class(&pairs[0].first), "e1");
        assert_eq!(k.model.format_class(&pairs[0].second), "e2");
        assert!(witness_search_exhaustive(&k, 4));

        let r = rational_minus4_cubic();
        let pairs = find_blowdown_witness_pairs(&r, 4).unwrap();
        let e2 = r.model.lattice.basis_class(2);
        let e3 = r.model.lattice.basis_class(3);
        assert!(pairs.contains(&WitnessPair { first: e2, second: e3 }));
        assert_eq!(r.model.format_class(&pairs[0].first), "e2");

        let m = cp2_blowup(0);
        let fake = SymplecticPair { model: m.clone(), divisor: m.class(vec![2]).unwrap(), divisor_genus: 0 };
        assert!(find_blowdown_witness_pairs(&fake, 4).is_err());
    }

    #[test]
    fn rational_table_rows() {
        let rows = reproduce_rational_table().unwrap();
        assert_eq!(nodal_degree_bound(), 6);
        let got: Vec<(i64, i64, usize)> = rows.iter().map(|r| (r.degree, r.double_points, r.blowups)).collect();
        assert_eq!(got, vec![(1, 0, 5), (2, 0, 8), (3, 1, 10), (4, 3, 11), (5, 6, 11), (6, 10, 10)]);
        assert_eq!(rows[0].label, "H - e1 - e2 - e3 - e4 - e5");
        let last = &rows[5];
        let m = last.model();
        assert_eq!(last.class, m.canonical.scale(-2).unwrap());
    }

    #[test]
    fn ruled_table_rows() {
        for g in 1..=2 {
            let rows = reproduce_ruled_table(g).unwrap();
            let summary: Vec<([i64; 4], i64, &str, usize)> =
                rows.iter().map(|r| (r.signs, r.fiber_coefficient, r.label.as_str(), r.family_size)).collect();
            assert_eq!(
                summary,
                vec![
                    ([1, 1, 1, 1], 1, "(f-e1) - e2 - e3 - e4", 1),
                    ([-1, 1, 1, 1], 0, "e1 - e2 - e3 - e4", 4),
                    ([-1, -1, 1, 1], -1, "e1 - (f-e2) - e3 - e4", 6),
                    ([-1, -1, -1, 1], -2, "e1 - (f-e2) - (f-e3) - e4", 4),
                    ([-1, -1, -1, -1], -3, "e1 - (f-e2) - (f-e3) - (f-e4)", 1),
                ]
            );
        }
        assert!(reproduce_ruled_table(0).is_err());
    }
}
