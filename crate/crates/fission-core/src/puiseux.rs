//! Exponential factors and their Galois orbits (Stokes circles).
//!
//! An exponential factor is a Puiseux polynomial `q = sum a_e z^e` with
//! strictly positive rational exponents and nonzero cyclotomic
//! coefficients. Its ramification `r` is the lcm of the exponent
//! denominators, and the Galois group acts through
//! `z^{1/r} -> zeta_r^k z^{1/r}`, multiplying the coefficient at exponent
//! `m/r` by `zeta_r^{km}`. A Stokes circle is the orbit of a factor; it is
//! represented by its orbit-minimal conjugate so that circle equality is
//! syntactic equality of representatives.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::cyclo::Cyclotomic;
use crate::error::{Error, Result};
use crate::rational::{format_rational, lcm_of_denoms, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ExponentialFactor {
    terms: BTreeMap<Rational, Cyclotomic>,
}

impl ExponentialFactor {
    /// Canonicalizes a term list: merges duplicate exponents by addition and
    /// drops zero coefficients. Every exponent must be strictly positive.
    pub fn new(terms: impl IntoIterator<Item = (Rational, Cyclotomic)>) -> Result<Self> {
        let mut map: BTreeMap<Rational, Cyclotomic> = BTreeMap::new();
        for (e, c) in terms {
            if !e.is_positive() {
                return Err(Error::NonPositiveExponent(format_rational(&e)));
            }
            let entry = map.entry(e).or_insert_with(Cyclotomic::zero);
            *entry = entry.add(&c);
        }
        map.retain(|_, c| !c.is_zero());
        let f = ExponentialFactor { terms: map };
        lcm_of_denoms(f.terms.keys())?;
        Ok(f)
    }

    pub fn zero() -> Self {
        ExponentialFactor::default()
    }

    pub fn monomial(exponent: Rational, coeff: Cyclotomic) -> Result<Self> {
        Self::new([(exponent, coeff)])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rational, &Cyclotomic)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exponent: &Rational) -> Option<&Cyclotomic> {
        self.terms.get(exponent)
    }

    /// lcm of the exponent denominators; 1 for the zero factor.
    pub fn ram(&self) -> u64 {
        lcm_of_denoms(self.terms.keys()).expect("validated at construction")
    }

    /// Largest exponent, or 0 for the zero factor.
    pub fn slope(&self) -> Rational {
        self.terms
            .keys()
            .next_back()
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn exponents_desc(&self) -> Vec<Rational> {
        self.terms.keys().rev().cloned().collect()
    }

    /// Keeps exactly the terms with exponent `>= k` (the truncation).
    pub fn truncate(&self, k: &Rational) -> Self {
        assert!(k.is_positive(), "truncation cut must be positive");
        ExponentialFactor {
            terms: self
                .terms
                .range(k.clone()..)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// The part removed by `truncate`: terms with exponent `< k`.
    pub fn below(&self, k: &Rational) -> Self {
        ExponentialFactor {
            terms: self
                .terms
                .range(..k.clone())
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(e.clone()).or_insert_with(Cyclotomic::zero);
            *entry = entry.add(c);
        }
        terms.retain(|_, c| !c.is_zero());
        ExponentialFactor { terms }
    }

    pub fn neg(&self) -> Self {
        ExponentialFactor {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Scales every coefficient by `c`.
    pub fn scale(&self, c: &Cyclotomic) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        ExponentialFactor {
            terms: self
                .terms
                .iter()
                .map(|(e, k)| (e.clone(), k.mul(c)))
                .collect(),
        }
    }

    /// Image under `z^{1/r} -> zeta_r^k z^{1/r}` where `r = self.ram()`.
    pub fn galois_conjugate(&self, k: u64) -> Self {
        let r = self.ram();
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let m = (e * Rational::from_integer(BigInt::from(r))).to_integer();
                let m = m.mod_floor(&BigInt::from(r));
                let m: u64 = (&m).try_into().expect("residue fits u64");
                let root =
                    Cyclotomic::root_of_unity(((k as u128 * m as u128) % r as u128) as i64, r);
                (e.clone(), c.mul(&root))
            })
            .collect();
        ExponentialFactor { terms }
    }

    /// The `r` distinct conjugates of the factor, `k = 0..r`.
    pub fn galois_conjugates(&self) -> Vec<Self> {
        let r = self.ram();
        let conjugates: Vec<Self> = (0..r).map(|k| self.galois_conjugate(k)).collect();
        debug_assert!(
            (0..conjugates.len())
                .all(|i| (i + 1..conjugates.len()).all(|j| conjugates[i] != conjugates[j])),
            "minimal ramification must yield distinct conjugates"
        );
        conjugates
    }

    /// True iff `other` is a Galois conjugate of `self`.
    pub fn same_circle(&self, other: &Self) -> bool {
        if !self.terms.keys().eq(other.terms.keys()) {
            return false;
        }
        self.galois_conjugates().iter().any(|c| c == other)
    }

    /// True when every coefficient lies in `Q(i)`, so the factor can be
    /// printed in the input grammar.
    pub fn is_gaussian(&self) -> bool {
        self.terms.values().all(|c| c.as_gaussian().is_some())
    }
}

impl Ord for ExponentialFactor {
    /// Lexicographic over the term list in decreasing exponent order; this
    /// is the order used to select orbit representatives.
    fn cmp(&self, other: &Self) -> Ordering {
        self.terms.iter().rev().cmp(other.terms.iter().rev())
    }
}

impl PartialOrd for ExponentialFactor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExponentialFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match c.as_gaussian() {
                Some((re, im)) if im.is_zero() => {
                    if !re.is_one() {
                        write!(f, "{}*", format_rational(&re))?;
                    }
                }
                Some((re, im)) if re.is_zero() => {
                    write!(f, "{}i*", format_rational(&im))?;
                }
                Some((re, im)) => {
                    let sign = if im.is_negative() { "-" } else { "+" };
                    write!(
                        f,
                        "({}{}{}i)*",
                        format_rational(&re),
                        sign,
                        format_rational(&im.abs())
                    )?;
                }
                None => write!(f, "({c})*")?,
            }
            write!(f, "z^({})", format_rational(e))?;
        }
        Ok(())
    }
}

/// A Stokes circle: the Galois orbit of an exponential factor, held by its
/// orbit-minimal representative together with the cached invariants.
#[derive(Debug, Clone)]
pub struct StokesCircle {
    rep: ExponentialFactor,
    ram: u64,
    irr: BigUint,
    slope: Rational,
    exponents: Vec<Rational>,
    levels: Vec<Rational>,
}

impl StokesCircle {
    /// Builds the circle of `q`: computes all conjugates, selects the
    /// minimal one, and derives ramification, irregularity, slope,
    /// exponents and levels (via the gcd chain).
    pub fn of(q: &ExponentialFactor) -> Self {
        let rep = q
            .galois_conjugates()
            .into_iter()
            .min()
            .expect("at least the identity conjugate");
        let ram = rep.ram();
        let slope = rep.slope();
        let exponents = rep.exponents_desc();
        let irr = scaled_numerator(&slope, ram);
        let mut levels = Vec::new();
        let mut g = BigUint::from(ram);
        for e in &exponents {
            let m = scaled_numerator(e, ram);
            let g_next = g.gcd(&m);
            if g_next < g {
                levels.push(e.clone());
            }
            g = g_next;
        }
        StokesCircle {
            rep,
            ram,
            irr,
            slope,
            exponents,
            levels,
        }
    }

    pub fn tame() -> Self {
        Self::of(&ExponentialFactor::zero())
    }

    pub fn rep(&self) -> &ExponentialFactor {
        &self.rep
    }

    pub fn ram(&self) -> u64 {
        self.ram
    }

    pub fn irr(&self) -> &BigUint {
        &self.irr
    }

    pub fn slope(&self) -> &Rational {
        &self.slope
    }

    /// Exponents in strictly decreasing order.
    pub fn exponents(&self) -> &[Rational] {
        &self.exponents
    }

    /// Levels: the exponents where the gcd chain strictly drops.
    pub fn levels(&self) -> &[Rational] {
        &self.levels
    }

    pub fn is_tame(&self) -> bool {
        self.rep.is_zero()
    }

    pub fn is_untwisted(&self) -> bool {
        self.ram == 1
    }

    /// Exponent numerators over the common denominator `ram`, in the order
    /// of `exponents()`.
    pub fn scaled_numerators(&self) -> Vec<BigUint> {
        self.exponents
            .iter()
            .map(|e| scaled_numerator(e, self.ram))
            .collect()
    }

    /// The minimal conjugate whose coefficients all lie in `Q(i)`, if one
    /// exists; used for rendering in the input grammar. Falls back to the
    /// canonical representative.
    pub fn display_rep(&self) -> ExponentialFactor {
        self.rep
            .galois_conjugates()
            .into_iter()
            .filter(|c| c.is_gaussian())
            .min()
            .unwrap_or_else(|| self.rep.clone())
    }
}

fn scaled_numerator(e: &Rational, ram: u64) -> BigUint {
    let m = (e * Rational::from_integer(BigInt::from(ram))).to_integer();
    m.to_biguint().expect("positive exponent")
}

impl PartialEq for StokesCircle {
    fn eq(&self, other: &Self) -> bool {
        self.rep == other.rep
    }
}

impl Eq for StokesCircle {}

impl std::hash::Hash for StokesCircle {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rep.hash(state);
    }
}

impl Ord for StokesCircle {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rep.cmp(&other.rep)
    }
}

impl PartialOrd for StokesCircle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for StokesCircle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.display_rep())
    }
}
