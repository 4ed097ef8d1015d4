//! Exceptional objects `S_k[s]` as labels, their mutations, hom profiles and
//! the minimal-degree recursion that produces the chart inequalities.
//!
//! Shifts ride along mutations as `R_{F[q]}(E[p]) = (R_F E)[p]` and
//! `L_{E[p]}(F[q]) = (L_E F)[q]`; both follow from the defining triangles.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ksequence::{euler_form, kclass_of, KClass};

/// The object `S_index[shift]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExcLabel {
    pub index: i64,
    pub shift: i64,
}

impl ExcLabel {
    pub const fn new(index: i64, shift: i64) -> Self {
        Self { index, shift }
    }

    pub fn shifted(self, by: i64) -> Self {
        Self::new(self.index, self.shift + by)
    }

    pub fn class(&self, n: u32) -> KClass {
        kclass_of(n, self.index, self.shift)
    }

    /// For `n = 1`, `S_{k+3} = S_k[1]`, so the index is reduced to `{0, 1, 2}`.
    /// Other `n` have no such identification.
    pub fn canonical(self, n: u32) -> Self {
        if n == 1 {
            let q = self.index.div_euclid(3);
            Self::new(self.index.rem_euclid(3), self.shift + q)
        } else {
            self
        }
    }

    pub fn same_object(&self, other: &ExcLabel, n: u32) -> bool {
        self.canonical(n) == other.canonical(n)
    }
}

impl fmt::Display for ExcLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shift == 0 {
            write!(f, "S_{}", self.index)
        } else {
            write!(f, "S_{}[{}]", self.index, self.shift)
        }
    }
}

/// An ordered list of labels whose indices form a consecutive chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcCollection {
    items: Vec<ExcLabel>,
}

impl ExcCollection {
    pub fn new(items: Vec<ExcLabel>) -> Result<Self> {
        if items.len() < 2 {
            return Err(Error::Invalid(format!(
                "an exceptional collection needs at least two objects, got {}",
                items.len()
            )));
        }
        for pair in items.windows(2) {
            if pair[1].index != pair[0].index + 1 {
                return Err(Error::NotAdjacent {
                    a_index: pair[0].index,
                    b_index: pair[1].index,
                });
            }
        }
        Ok(Self { items })
    }

    pub fn pair(first: ExcLabel, second: ExcLabel) -> Result<Self> {
        Self::new(vec![first, second])
    }

    pub fn items(&self) -> &[ExcLabel] {
        &self.items
    }

    pub fn classes(&self, n: u32) -> Vec<KClass> {
        self.items.iter().map(|l| l.class(n)).collect()
    }
}

fn check_adjacent(a: &ExcLabel, b: &ExcLabel) -> Result<()> {
    if b.index == a.index + 1 {
        Ok(())
    } else {
        Err(Error::NotAdjacent {
            a_index: a.index,
            b_index: b.index,
        })
    }
}

/// `(E, F) -> (F, R_F E)`; on the chain `(S_{k-1}, S_k) -> (S_k, S_{k+1})`.
pub fn right_mutation_pair(pair: (ExcLabel, ExcLabel)) -> Result<(ExcLabel, ExcLabel)> {
    let (a, b) = pair;
    check_adjacent(&a, &b)?;
    Ok((b, ExcLabel::new(a.index + 2, a.shift)))
}

/// `(E, F) -> (L_E F, E)`; on the chain `(S_k, S_{k+1}) -> (S_{k-1}, S_k)`.
pub fn left_mutation_pair(pair: (ExcLabel, ExcLabel)) -> Result<(ExcLabel, ExcLabel)> {
    let (a, b) = pair;
    check_adjacent(&a, &b)?;
    Ok((ExcLabel::new(b.index - 2, b.shift), a))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Pairing used by class-level mutation: `chi(x, y) - chi(y, x)`.
///
/// On an exceptional pair `chi(F, E) = 0`, so this is `chi(E, F)`; unlike the
/// bare Euler form it also makes `L_i R_i = id` and the braid relations hold
/// for arbitrary class lists.
pub fn mutation_pairing(n: u32, x: &KClass, y: &KClass) -> BigInt {
    euler_form(n, x, y) - euler_form(n, y, x)
}

/// Mutates the slots `i, i+1` (1-based) of a class list.
///
/// Right: `(c_i, c_{i+1}) -> (c_{i+1}, <c_i, c_{i+1}> c_{i+1} - c_i)`.
/// Left: `(c_i, c_{i+1}) -> (<c_i, c_{i+1}> c_i - c_{i+1}, c_i)`.
pub fn class_mutation(side: Side, i: usize, cs: &[KClass], n: u32) -> Result<Vec<KClass>> {
    if i == 0 || i >= cs.len() {
        return Err(Error::Position { i, len: cs.len() });
    }
    let (x, y) = (&cs[i - 1], &cs[i]);
    let m = mutation_pairing(n, x, y);
    let (first, second) = match side {
        Side::Right => (y.clone(), &(&m * y) - x),
        Side::Left => (&(&m * x) - y, x.clone()),
    };
    let mut out = cs.to_vec();
    out[i - 1] = first;
    out[i] = second;
    Ok(out)
}

/// Graded degree with `+inf` for "no nonvanishing degree".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Degree {
    Finite(i64),
    Infinite,
}

impl Degree {
    pub fn is_finite(&self) -> bool {
        matches!(self, Degree::Finite(_))
    }

    pub fn finite(&self) -> Option<i64> {
        match self {
            Degree::Finite(d) => Some(*d),
            Degree::Infinite => None,
        }
    }
}

impl Ord for Degree {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Degree::Finite(a), Degree::Finite(b)) => a.cmp(b),
            (Degree::Finite(_), Degree::Infinite) => Ordering::Less,
            (Degree::Infinite, Degree::Finite(_)) => Ordering::Greater,
            (Degree::Infinite, Degree::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Degree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Degree {
    type Output = Degree;
    fn add(self, rhs: Degree) -> Degree {
        match (self, rhs) {
            (Degree::Finite(a), Degree::Finite(b)) => Degree::Finite(a + b),
            _ => Degree::Infinite,
        }
    }
}

impl Add<i64> for Degree {
    type Output = Degree;
    fn add(self, rhs: i64) -> Degree {
        self + Degree::Finite(rhs)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::Finite(d) => write!(f, "{d}"),
            Degree::Infinite => f.write_str("+inf"),
        }
    }
}

/// Lowest nonvanishing degree of `Hom^*(a, b)` and its dimension there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomProfile {
    pub degree: Degree,
    pub dim: u64,
}

/// Hom profile between two labelled exceptional objects.
///
/// For `i < j` the graded hom `Hom^*(S_i, S_j)` sits in degree 0 and
/// `Hom^*(S_j, S_i)` in degree 1, so both are read off the Euler form. For
/// `n = 1` the target is first moved into the window `[i, i+2]` using
/// `S_{k+3} = S_k[1]`.
pub fn hom_profile(n: u32, a: ExcLabel, b: ExcLabel) -> HomProfile {
    let (i, p) = (a.index, a.shift);
    let (mut j, mut q) = (b.index, b.shift);
    if n == 1 {
        let t = (j - i).div_euclid(3);
        j -= 3 * t;
        q += t;
    }
    let (base, dim) = match i.cmp(&j) {
        Ordering::Equal => (0, BigInt::from(1)),
        Ordering::Less => (0, euler_form(n, &kclass_of(n, i, 0), &kclass_of(n, j, 0))),
        Ordering::Greater => (1, -euler_form(n, &kclass_of(n, i, 0), &kclass_of(n, j, 0))),
    };
    if dim.is_zero() || dim.is_negative() {
        return HomProfile {
            degree: Degree::Infinite,
            dim: 0,
        };
    }
    // Hom^m(S_i[p], S_j[q]) = Hom^{m+q-p}(S_i, S_j)
    HomProfile {
        degree: Degree::Finite(base + p - q),
        dim: dim.to_u64().unwrap_or(u64::MAX),
    }
}

/// Shifts `(p, q)` making `(S_k[p], S_{k+1}[q])` Ext-exceptional:
/// `p = 2 - eps_0`, `q = -eps_1`.
pub fn ext_shift_choice(pair: (ExcLabel, ExcLabel), eps: [bool; 2]) -> Result<(i64, i64)> {
    check_adjacent(&pair.0, &pair.1)?;
    let p = 2 - i64::from(eps[0]);
    let q = -i64::from(eps[1]);
    Ok((p, q))
}

/// Why a pair fails to be Ext-exceptional.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtViolation {
    NotAdjacent,
    /// The forward hom is nonzero in a degree `<= 0`.
    ForwardDegree { degree: i64 },
    /// The backward hom is nonzero in a degree `<= 0`.
    BackwardDegree { degree: i64 },
}

impl fmt::Display for ExtViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtViolation::NotAdjacent => f.write_str("labels are not adjacent"),
            ExtViolation::ForwardDegree { degree } => {
                write!(f, "forward hom nonzero in degree {degree} <= 0")
            }
            ExtViolation::BackwardDegree { degree } => {
                write!(f, "backward hom nonzero in degree {degree} <= 0")
            }
        }
    }
}

/// Checks `Hom^{<=0}` vanishing in both directions; returns the forward hom
/// degree on success.
pub fn check_ext_exceptional(n: u32, pair: (ExcLabel, ExcLabel)) -> std::result::Result<Degree, ExtViolation> {
    let (a, b) = pair;
    if b.index != a.index + 1 {
        return Err(ExtViolation::NotAdjacent);
    }
    let forward = hom_profile(n, a, b).degree;
    if let Degree::Finite(d) = forward {
        if d <= 0 {
            return Err(ExtViolation::ForwardDegree { degree: d });
        }
    }
    if let Degree::Finite(d) = hom_profile(n, b, a).degree {
        if d <= 0 {
            return Err(ExtViolation::BackwardDegree { degree: d });
        }
    }
    Ok(forward)
}

/// `alpha_s = 0`, `alpha_i = min_{j>i} (k_{i,j} + alpha_j) - (s - i - 1)`.
///
/// `degrees` is keyed by 1-based `(i, j)` with `i < j <= s`; the returned
/// vector holds `alpha_1, ..., alpha_s`.
pub fn alpha_coeffs(degrees: &BTreeMap<(usize, usize), Degree>, s: usize) -> Result<Vec<Degree>> {
    if s < 2 {
        return Err(Error::Invalid(format!("collection length {s} < 2")));
    }
    let mut alpha = vec![Degree::Finite(0); s + 1];
    for i in (1..s).rev() {
        let mut best = Degree::Infinite;
        for j in i + 1..=s {
            let k = *degrees.get(&(i, j)).ok_or(Error::MissingDegree(i, j))?;
            best = best.min(k + alpha[j]);
        }
        alpha[i] = best + -((s - i - 1) as i64);
    }
    Ok(alpha.split_off(1))
}

/// Minimal hom degrees `k_{i,j}` of a labelled collection.
pub fn degree_table(n: u32, labels: &[ExcLabel]) -> BTreeMap<(usize, usize), Degree> {
    let mut table = BTreeMap::new();
    for (i, a) in labels.iter().enumerate() {
        for (j, b) in labels.iter().enumerate().skip(i + 1) {
            table.insert((i + 1, j + 1), hom_profile(n, *a, *b).degree);
        }
    }
    table
}

/// The chart relation `phi_first < phi_last + alpha_1` of a subcollection,
/// as the offset `alpha_1` (`None` when unconstrained).
pub fn chart_relation(n: u32, labels: &[ExcLabel]) -> Result<Option<i64>> {
    let alpha = alpha_coeffs(&degree_table(n, labels), labels.len())?;
    Ok(alpha[0].finite())
}
