//! Pairwise invariants of Stokes circles and the core diagram of an
//! irregular class.
//!
//! The rescaled multiplicities are the authoritative route:
//!
//! - `Btilde_II = k_0 (1 - 1/d_0) + sum_j k_j (1/lcm(d_0..d_{j-1}) -
//!   1/lcm(d_0..d_j)) - 1` over the exponents `k_j = n_j/d_j` of the
//!   circle, and `-1` for the tame circle;
//! - `Btilde_IJ` is the same sum over the exponents of the common part,
//!   plus `f/lcm(d_0..d_t)` for the fission exponent `f` (so `f - 1` when
//!   the common part is tame).
//!
//! Integer multiplicities are `B_II = r^2 Btilde_II + 1` and
//! `B_IJ = r r' Btilde_IJ`; debug builds cross-check them against the
//! independent gcd-chain formulas.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::puiseux::{ExponentialFactor, StokesCircle};
use crate::rational::{grid_above, Rational};

/// A finite multiset of distinct Stokes circles with positive
/// multiplicities, kept sorted by canonical representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrregularClass {
    entries: Vec<(StokesCircle, u32)>,
}

impl IrregularClass {
    /// Merges entries with equal circles by summing multiplicities.
    pub fn new(entries: impl IntoIterator<Item = (StokesCircle, u32)>) -> Result<Self> {
        let mut merged: Vec<(StokesCircle, u32)> = Vec::new();
        for (circle, mult) in entries {
            if mult == 0 {
                return Err(Error::ZeroMultiplicity);
            }
            match merged.iter_mut().find(|(c, _)| *c == circle) {
                Some((_, m)) => *m += mult,
                None => merged.push((circle, mult)),
            }
        }
        merged.sort_by(|(a, _), (b, _)| a.cmp(b));
        Ok(IrregularClass { entries: merged })
    }

    pub fn from_factors(
        factors: impl IntoIterator<Item = (ExponentialFactor, u32)>,
    ) -> Result<Self> {
        Self::new(factors.into_iter().map(|(q, m)| (StokesCircle::of(&q), m)))
    }

    pub fn entries(&self) -> &[(StokesCircle, u32)] {
        &self.entries
    }

    pub fn circles(&self) -> impl Iterator<Item = &StokesCircle> {
        self.entries.iter().map(|(c, _)| c)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_untwisted(&self) -> bool {
        self.circles().all(|c| c.is_untwisted())
    }
}

impl fmt::Display for IrregularClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, m) in &self.entries {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *m != 1 {
                write!(f, "{m}*")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// The deepest shared truncation of two circles and the slope data of
/// what is left over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommonPartData {
    pub common: StokesCircle,
    pub fission_exponent: Rational,
    pub cut: Rational,
}

/// Common part and fission exponent of two distinct circles.
///
/// Scans the grid `(1/lcm(r, r')) Z_{>0}` upward for the first cut at
/// which the truncated orbits agree. The truncation pair only changes when
/// the cut crosses an exponent of either factor, so the scan walks those
/// events and picks the smallest grid point of the first interval on which
/// the orbits coincide.
pub fn common_part(i: &StokesCircle, j: &StokesCircle) -> Result<CommonPartData> {
    if i == j {
        return Err(Error::EqualCircles);
    }
    let qi = i.rep();
    let qj = j.rep();
    let grid = i.ram().lcm(&j.ram());
    let events: BTreeSet<Rational> = qi
        .exponents_desc()
        .into_iter()
        .chain(qj.exponents_desc())
        .collect();
    let mut prev = Rational::zero();
    let mut cut = None;
    for e in &events {
        let ti = qi.truncate(e);
        let tj = qj.truncate(e);
        if ti.same_circle(&tj) {
            cut = Some(grid_above(&prev, grid));
            break;
        }
        prev = e.clone();
    }
    // beyond the last exponent both truncations are zero
    let cut = cut.unwrap_or_else(|| grid_above(&prev, grid));
    let common = StokesCircle::of(&qi.truncate(&cut));
    let fission_exponent = qi.below(&cut).slope().max(qj.below(&cut).slope());
    debug_assert!(fission_exponent.is_positive());
    debug_assert!(common.exponents().iter().all(|e| *e > fission_exponent));
    Ok(CommonPartData {
        common,
        fission_exponent,
        cut,
    })
}

/// Rescaled loop multiplicity of a circle (`-1` for the tame circle).
pub fn rescaled_loop(c: &StokesCircle) -> Rational {
    exponent_sum(c.exponents()).0 - Rational::one()
}

/// Rescaled edge multiplicity of two distinct circles.
pub fn rescaled_edge(i: &StokesCircle, j: &StokesCircle) -> Result<Rational> {
    Ok(rescaled_edge_from(&common_part(i, j)?))
}

/// Rescaled edge multiplicity from precomputed common-part data.
pub fn rescaled_edge_from(data: &CommonPartData) -> Rational {
    let (sum, lcm_last) = exponent_sum(data.common.exponents());
    sum + &data.fission_exponent / Rational::from_integer(lcm_last) - Rational::one()
}

/// `sum_j k_j (1/lcm(d_0..d_{j-1}) - 1/lcm(d_0..d_j))` with the empty lcm
/// equal to 1; also returns the final lcm.
fn exponent_sum(exponents: &[Rational]) -> (Rational, BigInt) {
    let mut total = Rational::zero();
    let mut lcm_prev = BigInt::one();
    for e in exponents {
        let lcm_next = lcm_prev.lcm(e.denom());
        total += e
            * (Rational::new(BigInt::one(), lcm_prev)
                - Rational::new(BigInt::one(), lcm_next.clone()));
        lcm_prev = lcm_next;
    }
    (total, lcm_prev)
}

/// Loop multiplicity `B_II`, by the gcd-chain formula
/// `sum_j m_j (gcd(r, m_0..m_{j-1}) - gcd(r, m_0..m_j)) - r^2 + 1`
/// (0 for the tame circle).
pub fn loop_multiplicity(c: &StokesCircle) -> i64 {
    if c.is_tame() {
        return 0;
    }
    let r = BigUint::from(c.ram());
    let mut total = BigInt::zero();
    let mut g = r.clone();
    for m in c.scaled_numerators() {
        let g_next = g.gcd(&m);
        total += BigInt::from(m) * BigInt::from(&g - &g_next);
        g = g_next;
    }
    total -= BigInt::from(&r * &r);
    total += 1;
    let value = total.to_i64().expect("loop multiplicity fits i64");
    debug_assert_eq!(
        Rational::from_integer(BigInt::from(value)),
        rescaled_loop(c) * Rational::from_integer(BigInt::from(c.ram() * c.ram()))
            + Rational::one(),
        "gcd-chain and rescaled routes disagree on a loop multiplicity"
    );
    value
}

/// Edge multiplicity `B_IJ = r r' Btilde_IJ`; always an integer.
pub fn edge_multiplicity(i: &StokesCircle, j: &StokesCircle) -> Result<i64> {
    let data = common_part(i, j)?;
    Ok(edge_multiplicity_from(i, j, &data))
}

pub fn edge_multiplicity_from(i: &StokesCircle, j: &StokesCircle, data: &CommonPartData) -> i64 {
    let scaled = rescaled_edge_from(data)
        * Rational::from_integer(BigInt::from(i.ram()) * BigInt::from(j.ram()));
    assert!(scaled.is_integer(), "edge multiplicity must be an integer");
    let value = scaled
        .to_integer()
        .to_i64()
        .expect("edge multiplicity fits i64");
    debug_assert_eq!(
        value,
        edge_multiplicity_gcd_check(i, j, data),
        "rescaled and gcd-chain routes disagree on an edge multiplicity"
    );
    value
}

/// Independent gcd-chain route for the edge multiplicity:
/// `sum_j m_j (gcd(r', m'_0..m'_{j-1}) - gcd(r', m'_0..m'_j)) +
/// s_d gcd(r', m'_0..m'_t) - r r'`, oriented so that the fission exponent
/// is realized on the unprimed side.
pub fn edge_multiplicity_gcd_check(
    i: &StokesCircle,
    j: &StokesCircle,
    data: &CommonPartData,
) -> i64 {
    let (a, b) = if i.rep().below(&data.cut).slope() >= j.rep().below(&data.cut).slope() {
        (i, j)
    } else {
        (j, i)
    };
    let r = BigUint::from(a.ram());
    let r_other = BigUint::from(b.ram());
    let mut total = BigInt::zero();
    let mut g = r_other.clone();
    for e in data.common.exponents() {
        let m = numer_over(e, a.ram());
        let m_other = numer_over(e, b.ram());
        let g_next = g.gcd(&m_other);
        total += BigInt::from(m) * BigInt::from(&g - &g_next);
        g = g_next;
    }
    let s_d = numer_over(&data.fission_exponent, a.ram());
    total += BigInt::from(s_d * &g);
    total -= BigInt::from(&r * &r_other);
    total.to_i64().expect("edge multiplicity fits i64")
}

fn numer_over(e: &Rational, ram: u64) -> BigUint {
    let scaled = e * Rational::from_integer(BigInt::from(ram));
    assert!(scaled.is_integer(), "exponent denominator must divide ram");
    scaled.to_integer().to_biguint().expect("positive exponent")
}

/// Edge multiplicity of two untwisted circles by direct coefficient
/// comparison: `deg(q - q') - 1`.
pub fn untwisted_edge_multiplicity(i: &StokesCircle, j: &StokesCircle) -> Result<i64> {
    if i == j {
        return Err(Error::EqualCircles);
    }
    if !i.is_untwisted() || !j.is_untwisted() {
        return Err(Error::TwistedTree("both circles must be untwisted".into()));
    }
    let diff = i.rep().sub(j.rep());
    let deg = diff.slope();
    debug_assert!(deg.is_integer());
    Ok(deg.to_integer().to_i64().expect("degree fits i64") - 1)
}

/// A vertex of a diagram: a display name plus the defining circle when the
/// diagram was built from an irregular class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub name: String,
    pub circle: Option<StokesCircle>,
}

/// A symmetric integer matrix with even diagonal, indexed by vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagram {
    vertices: Vec<Vertex>,
    b: Vec<Vec<i64>>,
    multiplicities: Option<Vec<u64>>,
}

impl Diagram {
    pub fn from_matrix(
        names: Option<Vec<String>>,
        b: Vec<Vec<i64>>,
        multiplicities: Option<Vec<u64>>,
    ) -> Result<Self> {
        let n = b.len();
        if b.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidDiagram("matrix is not square".into()));
        }
        for i in 0..n {
            if b[i][i] % 2 != 0 {
                return Err(Error::InvalidDiagram(format!(
                    "diagonal entry B[{i}][{i}] = {} is odd",
                    b[i][i]
                )));
            }
            for j in 0..i {
                if b[i][j] != b[j][i] {
                    return Err(Error::InvalidDiagram(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let names = match names {
            Some(names) => {
                if names.len() != n {
                    return Err(Error::InvalidDiagram("vertex/matrix size mismatch".into()));
                }
                names
            }
            None => (0..n).map(|i| i.to_string()).collect(),
        };
        if let Some(m) = &multiplicities {
            if m.len() != n {
                return Err(Error::InvalidDiagram(
                    "multiplicity/matrix size mismatch".into(),
                ));
            }
            if m.iter().any(|&x| x == 0) {
                return Err(Error::ZeroMultiplicity);
            }
        }
        Ok(Diagram {
            vertices: names
                .into_iter()
                .map(|name| Vertex { name, circle: None })
                .collect(),
            b,
            multiplicities,
        })
    }

    pub(crate) fn from_parts(
        vertices: Vec<Vertex>,
        b: Vec<Vec<i64>>,
        multiplicities: Option<Vec<u64>>,
    ) -> Self {
        Diagram {
            vertices,
            b,
            multiplicities,
        }
    }

    pub fn size(&self) -> usize {
        self.b.len()
    }

    pub fn b(&self) -> &[Vec<i64>] {
        &self.b
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.b[i][j]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn name(&self, i: usize) -> &str {
        &self.vertices[i].name
    }

    pub fn circle(&self, i: usize) -> Option<&StokesCircle> {
        self.vertices[i].circle.as_ref()
    }

    pub fn multiplicities(&self) -> Option<&[u64]> {
        self.multiplicities.as_deref()
    }

    /// The dimension vector: declared multiplicities, or all ones.
    pub fn multiplicity_vector(&self) -> Vec<u64> {
        self.multiplicities
            .clone()
            .unwrap_or_else(|| vec![1; self.size()])
    }

    /// A diagram is a graph when it has no loops and no negative edges.
    pub fn is_graph(&self) -> bool {
        (0..self.size())
            .all(|i| self.b[i][i] == 0 && (0..self.size()).all(|j| self.b[i][j] >= 0))
    }

    pub fn is_simply_laced(&self) -> bool {
        self.is_graph() && self.b.iter().all(|row| row.iter().all(|&x| x == 0 || x == 1))
    }
}

/// A diagram together with a positive integer `r_i` per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoratedDiagram {
    pub diagram: Diagram,
    pub r: Vec<u64>,
}

impl DecoratedDiagram {
    pub fn new(diagram: Diagram, r: Vec<u64>) -> Result<Self> {
        if r.len() != diagram.size() {
            return Err(Error::DimensionMismatch {
                got: r.len(),
                want: diagram.size(),
            });
        }
        if r.iter().any(|&x| x == 0) {
            return Err(Error::InvalidDiagram(
                "decoration entries must be >= 1".into(),
            ));
        }
        Ok(DecoratedDiagram { diagram, r })
    }
}

/// A diagram with rational multiplicities, obtained by rescaling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RescaledDiagram {
    vertices: Vec<Vertex>,
    btilde: Vec<Vec<Rational>>,
}

impl RescaledDiagram {
    pub fn size(&self) -> usize {
        self.btilde.len()
    }

    pub fn btilde(&self) -> &[Vec<Rational>] {
        &self.btilde
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.btilde[i][j]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }
}

/// Builds the core diagram of a nonempty irregular class: one vertex per
/// distinct circle in canonical order, loop/edge multiplicities, and the
/// ramification decoration.
pub fn build_diagram(theta: &IrregularClass) -> Result<DecoratedDiagram> {
    if theta.is_empty() {
        return Err(Error::EmptyClass);
    }
    let circles: Vec<&StokesCircle> = theta.circles().collect();
    let n = circles.len();
    let mut b = vec![vec![0i64; n]; n];
    for i in 0..n {
        b[i][i] = loop_multiplicity(circles[i]);
        for j in 0..i {
            let e = edge_multiplicity(circles[i], circles[j])?;
            b[i][j] = e;
            b[j][i] = e;
        }
    }
    let vertices: Vec<Vertex> = circles
        .iter()
        .map(|c| Vertex {
            name: c.to_string(),
            circle: Some((*c).clone()),
        })
        .collect();
    let r = circles.iter().map(|c| c.ram()).collect();
    let multiplicities = theta.entries().iter().map(|(_, m)| *m as u64).collect();
    Ok(DecoratedDiagram {
        diagram: Diagram {
            vertices,
            b,
            multiplicities: Some(multiplicities),
        },
        r,
    })
}

/// Applies `Btilde_ij = B_ij/(r_i r_j)` off the diagonal and
/// `Btilde_ii = (B_ii - 1)/r_i^2` on it.
pub fn rescale(d: &DecoratedDiagram) -> RescaledDiagram {
    let n = d.diagram.size();
    let btilde = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let rr = BigInt::from(d.r[i]) * BigInt::from(d.r[j]);
                    if i == j {
                        Rational::new(BigInt::from(d.diagram.entry(i, i) - 1), rr)
                    } else {
                        Rational::new(BigInt::from(d.diagram.entry(i, j)), rr)
                    }
                })
                .collect()
        })
        .collect();
    RescaledDiagram {
        vertices: d.diagram.vertices.clone(),
        btilde,
    }
}

/// `2 - d^T (2 Id - B) d`, the core contribution to the dimension of the
/// associated wild character variety.
pub fn cartan_dimension(diagram: &Diagram, d: &[u64]) -> Result<i64> {
    let n = diagram.size();
    if d.len() != n {
        return Err(Error::DimensionMismatch {
            got: d.len(),
            want: n,
        });
    }
    let mut quad = BigInt::zero();
    for i in 0..n {
        for j in 0..n {
            let c = if i == j {
                2 - diagram.entry(i, j)
            } else {
                -diagram.entry(i, j)
            };
            quad += BigInt::from(d[i]) * BigInt::from(d[j]) * BigInt::from(c);
        }
    }
    let dim = BigInt::from(2) - quad;
    dim.to_i64()
        .ok_or_else(|| Error::Overflow("dimension exceeds i64".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::Cyclotomic;
    use crate::rational::{rat, rat_int};

    fn mono(p: i64, q: i64) -> ExponentialFactor {
        ExponentialFactor::monomial(rat(p, q), Cyclotomic::one()).unwrap()
    }

    fn factor(terms: &[(i64, i64)]) -> ExponentialFactor {
        ExponentialFactor::new(terms.iter().map(|&(p, q)| (rat(p, q), Cyclotomic::one())))
            .unwrap()
    }

    fn circle(terms: &[(i64, i64)]) -> StokesCircle {
        StokesCircle::of(&factor(terms))
    }

    /// Literal ascending scan of the definition, used as the oracle for
    /// the event-driven implementation.
    fn common_part_brute(i: &StokesCircle, j: &StokesCircle, bound: &Rational) -> CommonPartData {
        let grid = num_integer::lcm(i.ram(), j.ram());
        let step = Rational::new(BigInt::one(), BigInt::from(grid));
        let mut cut = step.clone();
        loop {
            let ti = StokesCircle::of(&i.rep().truncate(&cut));
            let tj = StokesCircle::of(&j.rep().truncate(&cut));
            if ti == tj {
                let fission_exponent = i
                    .rep()
                    .below(&cut)
                    .slope()
                    .max(j.rep().below(&cut).slope());
                return CommonPartData {
                    common: ti,
                    fission_exponent,
                    cut,
                };
            }
            cut += &step;
            assert!(cut <= *bound, "scan exceeded its bound");
        }
    }

    #[test]
    fn loop_multiplicity_examples() {
        assert_eq!(loop_multiplicity(&circle(&[(5, 3)])), 2);
        assert_eq!(loop_multiplicity(&circle(&[(5, 2), (7, 3)])), 38);
        assert_eq!(loop_multiplicity(&circle(&[(3, 1)])), 0);
        assert_eq!(loop_multiplicity(&circle(&[(1, 2)])), -2);
        assert_eq!(loop_multiplicity(&StokesCircle::tame()), 0);
    }

    #[test]
    fn loop_monomial_special_case() {
        // (r - 1)(s - r - 1) against the general chain on coprime (s, r)
        for (s, r) in [(1i64, 2i64), (5, 3), (7, 3), (5, 4), (7, 6), (11, 4)] {
            assert_eq!(
                loop_multiplicity(&circle(&[(s, r)])),
                (r - 1) * (s - r - 1),
                "monomial z^{s}/{r}"
            );
        }
    }

    #[test]
    fn common_part_examples() {
        let data = common_part(&circle(&[(5, 3)]), &circle(&[(3, 2)])).unwrap();
        assert!(data.common.is_tame());
        assert_eq!(data.fission_exponent, rat(5, 3));

        let data = common_part(&circle(&[(5, 2), (7, 3)]), &circle(&[(5, 2), (5, 4)])).unwrap();
        assert_eq!(data.common, circle(&[(5, 2)]));
        assert_eq!(data.fission_exponent, rat(7, 3));
        let brute = common_part_brute(
            &circle(&[(5, 2), (7, 3)]),
            &circle(&[(5, 2), (5, 4)]),
            &rat_int(3),
        );
        assert_eq!(data, brute);

        // one different part is zero
        let data = common_part(
            &circle(&[(5, 2), (3, 2), (5, 4)]),
            &circle(&[(5, 2), (3, 2)]),
        )
        .unwrap();
        assert_eq!(data.common, circle(&[(5, 2), (3, 2)]));
        assert_eq!(data.fission_exponent, rat(5, 4));
    }

    #[test]
    fn common_part_rejects_equal_circles() {
        let c = circle(&[(5, 3)]);
        assert_eq!(common_part(&c, &c), Err(Error::EqualCircles));
    }

    #[test]
    fn common_part_matches_brute_scan() {
        let circles = [
            circle(&[(5, 3)]),
            circle(&[(3, 2)]),
            circle(&[(7, 3)]),
            circle(&[(5, 2), (7, 3)]),
            circle(&[(5, 2), (5, 4)]),
            circle(&[(5, 2)]),
            circle(&[(5, 2), (3, 2), (5, 4)]),
            circle(&[(5, 2), (3, 2)]),
            circle(&[(3, 1), (1, 1)]),
            circle(&[(1, 2)]),
        ];
        let bound = rat_int(4);
        for a in &circles {
            for b in &circles {
                if a == b {
                    continue;
                }
                assert_eq!(
                    common_part(a, b).unwrap(),
                    common_part_brute(a, b, &bound),
                    "pair <{a}>, <{b}>"
                );
            }
        }
    }

    #[test]
    fn rescaled_examples() {
        assert_eq!(rescaled_loop(&circle(&[(5, 3)])), rat(1, 9));
        assert_eq!(rescaled_loop(&circle(&[(3, 2)])), rat(-1, 4));
        assert_eq!(rescaled_loop(&circle(&[(5, 2), (7, 3)])), rat(37, 36));
        assert_eq!(rescaled_loop(&StokesCircle::tame()), rat_int(-1));

        assert_eq!(
            rescaled_edge(&circle(&[(5, 2), (7, 3)]), &circle(&[(5, 2), (5, 4)])).unwrap(),
            rat(17, 12)
        );
        assert_eq!(
            rescaled_edge(&circle(&[(5, 3)]), &circle(&[(3, 2)])).unwrap(),
            rat(2, 3)
        );
        // untwisted side: f - 1 with f = 3
        assert_eq!(
            rescaled_edge(&circle(&[(3, 1)]), &circle(&[(4, 3)])).unwrap(),
            rat_int(2)
        );
    }

    #[test]
    fn edge_multiplicity_examples() {
        assert_eq!(
            edge_multiplicity(&circle(&[(5, 3)]), &circle(&[(3, 2)])).unwrap(),
            4
        );
        assert_eq!(
            edge_multiplicity(&circle(&[(5, 2), (7, 3)]), &circle(&[(5, 2), (5, 4)])).unwrap(),
            34
        );
        assert_eq!(
            edge_multiplicity(&circle(&[(3, 1)]), &circle(&[(4, 3)])).unwrap(),
            6
        );
        assert_eq!(
            edge_multiplicity(&circle(&[(1, 2)]), &circle(&[(1, 3)])).unwrap(),
            -3
        );
    }

    #[test]
    fn edge_monomial_special_case() {
        // B = r'(s - r) for slope-ordered coprime monomials
        let pairs = [
            ((5i64, 3i64), (3i64, 2i64)),
            ((7, 2), (5, 3)),
            ((1, 2), (1, 3)),
        ];
        for ((s, r), (s2, r2)) in pairs {
            assert!(rat(s, r) >= rat(s2, r2));
            assert_eq!(
                edge_multiplicity(&circle(&[(s, r)]), &circle(&[(s2, r2)])).unwrap(),
                r2 * (s - r)
            );
        }
    }

    #[test]
    fn untwisted_edge_against_degree() {
        let a = StokesCircle::of(&factor(&[(3, 1), (1, 1)]));
        let b = StokesCircle::of(&factor(&[(3, 1)]).neg());
        let by_degree = untwisted_edge_multiplicity(&a, &b).unwrap();
        assert_eq!(by_degree, 2); // deg((z^3 + z) - (-z^3)) - 1
        assert_eq!(edge_multiplicity(&a, &b).unwrap(), by_degree);
    }

    #[test]
    fn build_example_diagram() {
        let theta =
            IrregularClass::from_factors([(mono(5, 3), 1), (mono(3, 2), 1), (mono(7, 3), 1)])
                .unwrap();
        let d = build_diagram(&theta).unwrap();
        // in the listed order I = <z^{5/3}>, J = <z^{3/2}>, K = <z^{7/3}>
        let idx = |c: &StokesCircle| {
            d.diagram
                .vertices()
                .iter()
                .position(|v| v.circle.as_ref() == Some(c))
                .unwrap()
        };
        let (i, j, k) = (
            idx(&circle(&[(5, 3)])),
            idx(&circle(&[(3, 2)])),
            idx(&circle(&[(7, 3)])),
        );
        let b = d.diagram.b();
        assert_eq!(
            [
                [b[i][i], b[i][j], b[i][k]],
                [b[j][i], b[j][j], b[j][k]],
                [b[k][i], b[k][j], b[k][k]],
            ],
            [[2, 4, 12], [4, 0, 8], [12, 8, 6]]
        );
        assert_eq!([d.r[i], d.r[j], d.r[k]], [3, 2, 3]);
    }

    #[test]
    fn build_triangle_graph() {
        let theta =
            IrregularClass::from_factors([(mono(3, 1), 1), (mono(4, 3), 1), (mono(3, 2), 1)])
                .unwrap();
        let d = build_diagram(&theta).unwrap();
        assert!(d.diagram.is_graph());
        let mut edges: Vec<i64> = (0..3)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .map(|(i, j)| d.diagram.entry(i, j))
            .collect();
        edges.sort();
        assert_eq!(edges, vec![3, 4, 6]);
    }

    #[test]
    fn duplicate_circles_merge() {
        // a factor and one of its conjugates define the same circle
        let q = mono(5, 3);
        let conj = q.galois_conjugate(1);
        let theta = IrregularClass::from_factors([(q, 1), (conj, 1)]).unwrap();
        assert_eq!(theta.len(), 1);
        assert_eq!(theta.entries()[0].1, 2);
        let d = build_diagram(&theta).unwrap();
        assert_eq!(d.diagram.b(), &[vec![2]]);
        assert_eq!(d.diagram.multiplicities(), Some(&[2u64][..]));
    }

    #[test]
    fn rescale_example_matrix() {
        let theta =
            IrregularClass::from_factors([(mono(5, 3), 1), (mono(3, 2), 1), (mono(7, 3), 1)])
                .unwrap();
        let d = build_diagram(&theta).unwrap();
        let resc = rescale(&d);
        let idx = |c: &StokesCircle| {
            d.diagram
                .vertices()
                .iter()
                .position(|v| v.circle.as_ref() == Some(c))
                .unwrap()
        };
        let (i, j, k) = (
            idx(&circle(&[(5, 3)])),
            idx(&circle(&[(3, 2)])),
            idx(&circle(&[(7, 3)])),
        );
        let expect = [
            [rat(1, 9), rat(2, 3), rat(4, 3)],
            [rat(2, 3), rat(-1, 4), rat(4, 3)],
            [rat(4, 3), rat(4, 3), rat(5, 9)],
        ];
        for (a, row) in [i, j, k].iter().enumerate() {
            for (b, col) in [i, j, k].iter().enumerate() {
                assert_eq!(resc.entry(*row, *col), &expect[a][b]);
            }
        }
    }

    #[test]
    fn rescale_unit_decoration() {
        let diagram = Diagram::from_matrix(None, vec![vec![0, 2], vec![2, 0]], None).unwrap();
        let d = DecoratedDiagram::new(diagram, vec![1, 1]).unwrap();
        let resc = rescale(&d);
        assert_eq!(resc.entry(0, 1), &rat_int(2));
        assert_eq!(resc.entry(0, 0), &rat_int(-1));
    }

    #[test]
    fn rescale_triangle_346() {
        // r = (1, 3, 2) from the ramifications of the realizing circles
        let diagram = Diagram::from_matrix(
            None,
            vec![vec![0, 6, 4], vec![6, 0, 3], vec![4, 3, 0]],
            None,
        )
        .unwrap();
        let d = DecoratedDiagram::new(diagram, vec![1, 3, 2]).unwrap();
        let resc = rescale(&d);
        assert_eq!(resc.entry(0, 1), &rat_int(2));
        assert_eq!(resc.entry(0, 2), &rat_int(2));
        assert_eq!(resc.entry(1, 2), &rat(1, 2));
    }

    #[test]
    fn cartan_dimension_examples() {
        let triangle = Diagram::from_matrix(
            None,
            vec![vec![0, 3, 4], vec![3, 0, 6], vec![4, 6, 0]],
            None,
        )
        .unwrap();
        assert_eq!(cartan_dimension(&triangle, &[1, 1, 1]).unwrap(), 22);

        let single = Diagram::from_matrix(None, vec![vec![0]], None).unwrap();
        assert_eq!(cartan_dimension(&single, &[1]).unwrap(), 0);

        let double = Diagram::from_matrix(None, vec![vec![0, 2], vec![2, 0]], None).unwrap();
        assert_eq!(cartan_dimension(&double, &[1, 1]).unwrap(), 2);

        assert!(matches!(
            cartan_dimension(&single, &[1, 1]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn diagram_validation() {
        assert!(Diagram::from_matrix(None, vec![vec![1]], None).is_err());
        assert!(Diagram::from_matrix(None, vec![vec![0, 1], vec![2, 0]], None).is_err());
        assert!(Diagram::from_matrix(None, vec![vec![0, 1]], None).is_err());
        let g = Diagram::from_matrix(None, vec![vec![0, 1], vec![1, 0]], None).unwrap();
        assert!(g.is_graph() && g.is_simply_laced());
        let loops = Diagram::from_matrix(None, vec![vec![2]], None).unwrap();
        assert!(!loops.is_graph());
    }

    #[test]
    fn second_example_matrix_both_triples() {
        let triple_a = [
            circle(&[(5, 2), (7, 3)]),
            circle(&[(5, 2), (5, 4)]),
            circle(&[(5, 2)]),
        ];
        let triple_b = [
            circle(&[(5, 2), (7, 3)]),
            circle(&[(5, 2), (3, 2), (5, 4)]),
            circle(&[(5, 2), (3, 2)]),
        ];
        let expect = [[38, 34, 17], [34, 10, 7], [17, 7, 2]];
        for circles in [&triple_a, &triple_b] {
            for i in 0..3 {
                assert_eq!(loop_multiplicity(&circles[i]), expect[i][i]);
                for j in 0..3 {
                    if i != j {
                        assert_eq!(
                            edge_multiplicity(&circles[i], &circles[j]).unwrap(),
                            expect[i][j]
                        );
                    }
                }
            }
        }
    }
}
