//! Complete positive semirings used as matrix coefficients.
//!
//! Three concrete carriers implement [`Semiring`]: [`Bool`], [`NatInf`] and
//! [`RatPos`]. The dynamic [`Scalar`] wraps them for the JSON and CLI surface.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemiringId {
    Bool,
    NatInf,
    RatPos,
}

impl SemiringId {
    pub const ALL: [SemiringId; 3] = [SemiringId::Bool, SemiringId::NatInf, SemiringId::RatPos];

    pub fn name(self) -> &'static str {
        match self {
            SemiringId::Bool => "bool",
            SemiringId::NatInf => "natinf",
            SemiringId::RatPos => "ratpos",
        }
    }
}

impl fmt::Display for SemiringId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SemiringId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bool" | "boolean" => Ok(SemiringId::Bool),
            "nat" | "natinf" => Ok(SemiringId::NatInf),
            "rat" | "ratpos" => Ok(SemiringId::RatPos),
            _ => Err(Error::Parse(format!("unknown semiring `{s}`"))),
        }
    }
}

/// A commutative semiring with absorbing zero in which every finite family
/// sums. `Zero`/`One` come from num-traits.
pub trait Semiring:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Eq
    + std::hash::Hash
    + Zero
    + One
    + Add<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + 'static
{
    const ID: SemiringId;

    /// Image of `k` under the unique semiring map from the naturals.
    fn from_nat(k: &BigUint) -> Self;

    /// Embeds `num/den`. Fails when the quotient is not an element.
    fn from_ratio(num: &BigUint, den: &BigUint) -> Result<Self>;

    fn encode(&self) -> String;

    /// Image in the nonnegative rationals with infinity.
    fn to_ratpos(&self) -> RatPos;

    fn decode(s: &str) -> Result<Self>;

    fn from_u64(k: u64) -> Self {
        Self::from_nat(&BigUint::from(k))
    }

    fn inv_factorial(n: u64) -> Result<Self> {
        Self::from_ratio(&BigUint::one(), &crate::multiset::factorial_u64(n))
    }

    fn sum_iter<I: IntoIterator<Item = Self>>(xs: I) -> Self {
        xs.into_iter().fold(Self::zero(), |acc, x| acc + x)
    }

    fn pow(&self, k: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }
}

// ---------------------------------------------------------------- BOOL

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bool(pub bool);

impl Add for Bool {
    type Output = Bool;
    fn add(self, o: Bool) -> Bool {
        Bool(self.0 || o.0)
    }
}

impl Mul for Bool {
    type Output = Bool;
    fn mul(self, o: Bool) -> Bool {
        Bool(self.0 && o.0)
    }
}

impl Zero for Bool {
    fn zero() -> Self {
        Bool(false)
    }
    fn is_zero(&self) -> bool {
        !self.0
    }
}

impl One for Bool {
    fn one() -> Self {
        Bool(true)
    }
}

impl fmt::Display for Bool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.0 { "1" } else { "0" })
    }
}

impl Semiring for Bool {
    const ID: SemiringId = SemiringId::Bool;

    fn from_nat(k: &BigUint) -> Self {
        Bool(!k.is_zero())
    }

    fn from_ratio(num: &BigUint, den: &BigUint) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::NoInverse(format!("{num}/0")));
        }
        Ok(Bool(!num.is_zero()))
    }

    fn encode(&self) -> String {
        self.to_string()
    }

    fn to_ratpos(&self) -> RatPos {
        RatPos::from_u64(self.0 as u64)
    }

    fn decode(s: &str) -> Result<Self> {
        match s.trim() {
            "0" => Ok(Bool(false)),
            "1" => Ok(Bool(true)),
            other => Err(Error::Parse(format!("bad boolean scalar `{other}`"))),
        }
    }
}

// ---------------------------------------------------------------- NATINF

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NatInf {
    Fin(BigUint),
    Inf,
}

impl Add for NatInf {
    type Output = NatInf;
    fn add(self, o: NatInf) -> NatInf {
        match (self, o) {
            (NatInf::Fin(a), NatInf::Fin(b)) => NatInf::Fin(a + b),
            _ => NatInf::Inf,
        }
    }
}

impl Mul for NatInf {
    type Output = NatInf;
    fn mul(self, o: NatInf) -> NatInf {
        if self.is_zero() || o.is_zero() {
            return NatInf::zero();
        }
        match (self, o) {
            (NatInf::Fin(a), NatInf::Fin(b)) => NatInf::Fin(a * b),
            _ => NatInf::Inf,
        }
    }
}

impl Zero for NatInf {
    fn zero() -> Self {
        NatInf::Fin(BigUint::zero())
    }
    fn is_zero(&self) -> bool {
        matches!(self, NatInf::Fin(a) if a.is_zero())
    }
}

impl One for NatInf {
    fn one() -> Self {
        NatInf::Fin(BigUint::one())
    }
}

impl fmt::Display for NatInf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NatInf::Fin(a) => write!(f, "{a}"),
            NatInf::Inf => f.write_str("inf"),
        }
    }
}

impl Semiring for NatInf {
    const ID: SemiringId = SemiringId::NatInf;

    fn from_nat(k: &BigUint) -> Self {
        NatInf::Fin(k.clone())
    }

    fn from_ratio(num: &BigUint, den: &BigUint) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::NoInverse(format!("{num}/0")));
        }
        let (q, r) = num.div_rem(den);
        if r.is_zero() {
            Ok(NatInf::Fin(q))
        } else {
            Err(Error::NoInverse(format!("{num}/{den} in natinf")))
        }
    }

    fn encode(&self) -> String {
        self.to_string()
    }

    fn to_ratpos(&self) -> RatPos {
        match self {
            NatInf::Fin(k) => RatPos::from_nat(k),
            NatInf::Inf => RatPos::Inf,
        }
    }

    fn decode(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "inf" {
            return Ok(NatInf::Inf);
        }
        BigUint::from_str(s)
            .map(NatInf::Fin)
            .map_err(|_| Error::Parse(format!("bad natinf scalar `{s}`")))
    }
}

// ---------------------------------------------------------------- RATPOS

/// Nonnegative rationals extended with infinity. `BigRational` keeps values
/// in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RatPos {
    Fin(BigRational),
    Inf,
}

impl RatPos {
    /// Builds a finite value; rejects negatives.
    pub fn new(q: BigRational) -> Result<RatPos> {
        if q.is_negative() {
            return Err(Error::Parse(format!("negative scalar {q}")));
        }
        Ok(RatPos::Fin(q))
    }

    pub fn ratio(num: u64, den: u64) -> RatPos {
        RatPos::Fin(BigRational::new(num.into(), den.into()))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            RatPos::Fin(q) => Some(q),
            RatPos::Inf => None,
        }
    }

    /// Denominator of a finite value, `None` for infinity.
    pub fn denominator(&self) -> Option<BigUint> {
        self.as_rational().and_then(|q| q.denom().to_biguint())
    }

    pub fn to_f64_lossy(&self) -> f64 {
        match self {
            RatPos::Fin(q) => q.to_f64().unwrap_or(f64::INFINITY),
            RatPos::Inf => f64::INFINITY,
        }
    }
}

impl Add for RatPos {
    type Output = RatPos;
    fn add(self, o: RatPos) -> RatPos {
        match (self, o) {
            (RatPos::Fin(a), RatPos::Fin(b)) => RatPos::Fin(a + b),
            _ => RatPos::Inf,
        }
    }
}

impl Mul for RatPos {
    type Output = RatPos;
    fn mul(self, o: RatPos) -> RatPos {
        if self.is_zero() || o.is_zero() {
            return RatPos::zero();
        }
        match (self, o) {
            (RatPos::Fin(a), RatPos::Fin(b)) => RatPos::Fin(a * b),
            _ => RatPos::Inf,
        }
    }
}

impl Zero for RatPos {
    fn zero() -> Self {
        RatPos::Fin(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        matches!(self, RatPos::Fin(a) if a.is_zero())
    }
}

impl One for RatPos {
    fn one() -> Self {
        RatPos::Fin(BigRational::one())
    }
}

impl fmt::Display for RatPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatPos::Fin(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            RatPos::Inf => f.write_str("inf"),
        }
    }
}

impl Semiring for RatPos {
    const ID: SemiringId = SemiringId::RatPos;

    fn from_nat(k: &BigUint) -> Self {
        RatPos::Fin(BigRational::from_integer(k.clone().into()))
    }

    fn from_ratio(num: &BigUint, den: &BigUint) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::NoInverse(format!("{num}/0")));
        }
        Ok(RatPos::Fin(BigRational::new(num.clone().into(), den.clone().into())))
    }

    fn encode(&self) -> String {
        self.to_string()
    }

    fn to_ratpos(&self) -> RatPos {
        self.clone()
    }

    /// Accepts `p/q`, a bare integer, or `inf`.
    fn decode(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "inf" {
            return Ok(RatPos::Inf);
        }
        let bad = || Error::Parse(format!("bad ratpos scalar `{s}`"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let n = BigUint::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigUint::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(RatPos::Fin(BigRational::new(n.into(), d.into())))
    }
}

// ---------------------------------------------------------------- dynamic

/// Semiring-tagged scalar for the serialization and CLI surface.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Bool(Bool),
    NatInf(NatInf),
    RatPos(RatPos),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Mul,
}

impl Scalar {
    pub fn semiring(&self) -> SemiringId {
        match self {
            Scalar::Bool(_) => SemiringId::Bool,
            Scalar::NatInf(_) => SemiringId::NatInf,
            Scalar::RatPos(_) => SemiringId::RatPos,
        }
    }

    pub fn zero(id: SemiringId) -> Scalar {
        Scalar::from_nat(id, 0)
    }

    pub fn one(id: SemiringId) -> Scalar {
        Scalar::from_nat(id, 1)
    }

    pub fn from_nat(id: SemiringId, k: u64) -> Scalar {
        match id {
            SemiringId::Bool => Scalar::Bool(Bool::from_u64(k)),
            SemiringId::NatInf => Scalar::NatInf(NatInf::from_u64(k)),
            SemiringId::RatPos => Scalar::RatPos(RatPos::from_u64(k)),
        }
    }

    pub fn inv_factorial(id: SemiringId, n: u64) -> Result<Scalar> {
        Ok(match id {
            SemiringId::Bool => Scalar::Bool(Bool::inv_factorial(n)?),
            SemiringId::NatInf => Scalar::NatInf(NatInf::inv_factorial(n)?),
            SemiringId::RatPos => Scalar::RatPos(RatPos::inv_factorial(n)?),
        })
    }

    pub fn combine(op: Op, x: &Scalar, y: &Scalar) -> Result<Scalar> {
        fn go<S: Semiring>(op: Op, a: &S, b: &S) -> S {
            match op {
                Op::Add => a.clone() + b.clone(),
                Op::Mul => a.clone() * b.clone(),
            }
        }
        Ok(match (x, y) {
            (Scalar::Bool(a), Scalar::Bool(b)) => Scalar::Bool(go(op, a, b)),
            (Scalar::NatInf(a), Scalar::NatInf(b)) => Scalar::NatInf(go(op, a, b)),
            (Scalar::RatPos(a), Scalar::RatPos(b)) => Scalar::RatPos(go(op, a, b)),
            _ => {
                return Err(Error::SemiringMismatch {
                    left: x.semiring(),
                    right: y.semiring(),
                })
            }
        })
    }

    /// Left fold of ADD. An empty family has no tag, so the caller names it.
    pub fn sum_family(id: SemiringId, xs: &[Scalar]) -> Result<Scalar> {
        xs.iter()
            .try_fold(Scalar::zero(id), |acc, x| Scalar::combine(Op::Add, &acc, x))
    }

    pub fn encode(&self) -> String {
        match self {
            Scalar::Bool(x) => x.encode(),
            Scalar::NatInf(x) => x.encode(),
            Scalar::RatPos(x) => x.encode(),
        }
    }

    pub fn decode(id: SemiringId, s: &str) -> Result<Scalar> {
        Ok(match id {
            SemiringId::Bool => Scalar::Bool(Bool::decode(s)?),
            SemiringId::NatInf => Scalar::NatInf(NatInf::decode(s)?),
            SemiringId::RatPos => Scalar::RatPos(RatPos::decode(s)?),
        })
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Bool(x) => x.is_zero(),
            Scalar::NatInf(x) => x.is_zero(),
            Scalar::RatPos(x) => x.is_zero(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

/// Conversion between a typed semiring value and the dynamic wrapper.
pub trait Tagged: Semiring {
    fn wrap(self) -> Scalar;
    fn unwrap(s: &Scalar) -> Result<Self>;
}

macro_rules! tagged {
    ($t:ident) => {
        impl Tagged for $t {
            fn wrap(self) -> Scalar {
                Scalar::$t(self)
            }
            fn unwrap(s: &Scalar) -> Result<Self> {
                match s {
                    Scalar::$t(x) => Ok(x.clone()),
                    other => Err(Error::SemiringMismatch {
                        left: Self::ID,
                        right: other.semiring(),
                    }),
                }
            }
        }
    };
}

tagged!(Bool);
tagged!(NatInf);
tagged!(RatPos);

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: u64, d: u64) -> RatPos {
        RatPos::ratio(n, d)
    }

    #[test]
    fn spec_examples() {
        let one = Scalar::one(SemiringId::Bool);
        assert_eq!(Scalar::combine(Op::Add, &one, &one).unwrap(), one);
        let inf = Scalar::NatInf(NatInf::Inf);
        let z = Scalar::zero(SemiringId::NatInf);
        assert_eq!(Scalar::combine(Op::Mul, &inf, &z).unwrap(), z);
        assert_eq!(r(1, 2) + r(1, 3), r(5, 6));
        assert!(matches!(
            Scalar::combine(Op::Add, &one, &z),
            Err(Error::SemiringMismatch { .. })
        ));
    }

    #[test]
    fn sum_family_examples() {
        let b = |x| Scalar::Bool(Bool(x));
        assert_eq!(
            Scalar::sum_family(SemiringId::Bool, &[b(true), b(false), b(true)]).unwrap(),
            b(true)
        );
        let q = |x: RatPos| Scalar::RatPos(x);
        assert_eq!(
            Scalar::sum_family(SemiringId::RatPos, &[q(r(1, 2)), q(r(1, 2)), q(RatPos::Inf)])
                .unwrap(),
            q(RatPos::Inf)
        );
        assert_eq!(
            Scalar::sum_family(SemiringId::NatInf, &[]).unwrap(),
            Scalar::zero(SemiringId::NatInf)
        );
    }

    #[test]
    fn embeddings() {
        assert_eq!(Bool::from_u64(7), Bool(true));
        assert_eq!(NatInf::from_u64(7).encode(), "7");
        assert_eq!(RatPos::from_u64(3).encode(), "3/1");
        assert_eq!(RatPos::inv_factorial(3).unwrap(), r(1, 6));
        assert_eq!(Bool::inv_factorial(5).unwrap(), Bool(true));
        assert!(matches!(NatInf::inv_factorial(2), Err(Error::NoInverse(_))));
        assert_eq!(NatInf::inv_factorial(1).unwrap(), NatInf::one());
    }

    #[test]
    fn text_round_trip() {
        for s in ["0/1", "5/6", "inf", "12/7"] {
            assert_eq!(RatPos::decode(s).unwrap().encode(), s);
        }
        assert_eq!(RatPos::decode("4/6").unwrap().encode(), "2/3");
        for s in ["0", "17", "inf"] {
            assert_eq!(NatInf::decode(s).unwrap().encode(), s);
        }
        assert!(RatPos::decode("-1/2").is_err());
        assert!(Bool::decode("2").is_err());
    }

    #[test]
    fn bool_laws_exhaustive() {
        let all = [Bool(false), Bool(true)];
        for &x in &all {
            for &y in &all {
                for &z in &all {
                    assert_eq!((x + y) + z, x + (y + z));
                    assert_eq!((x * y) * z, x * (y * z));
                    assert_eq!(x * (y + z), x * y + x * z);
                    assert_eq!(x + y, y + x);
                    assert_eq!(x * y, y * x);
                }
            }
        }
    }
}
