//! Curves, markings and Dehn twists.
//!
//! Exact combinatorics are available on the once-punctured torus, where an
//! essential simple closed curve is a slope `p/q` and intersection numbers
//! are determinants. Other signatures carry generator words and report
//! [`Error::Unsupported`] for combinatorial queries.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Topological type of a surface: genus and number of punctures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SurfaceSig {
    pub genus: u32,
    pub punctures: u32,
}

impl SurfaceSig {
    pub const ONCE_PUNCTURED_TORUS: SurfaceSig = SurfaceSig {
        genus: 1,
        punctures: 1,
    };

    pub fn new(genus: u32, punctures: u32) -> Result<Self> {
        let sig = Self { genus, punctures };
        if sig.complexity() < 1 {
            return Err(Error::InvalidParameter(format!(
                "surface of genus {genus} with {punctures} punctures has no moduli"
            )));
        }
        Ok(sig)
    }

    /// Number of curves in a pants decomposition, `3g − 3 + n`.
    pub fn complexity(&self) -> i64 {
        3 * self.genus as i64 - 3 + self.punctures as i64
    }

    pub fn is_once_punctured_torus(&self) -> bool {
        *self == Self::ONCE_PUNCTURED_TORUS
    }
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// A slope `p/q` on the once-punctured torus: the simple closed curve in
/// homology class `p·[X] + q·[Y]`, up to orientation.
///
/// Canonical form has `q > 0`, or `q = 0` and `p = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slope {
    p: i64,
    q: i64,
}

impl Slope {
    /// The pants curve of the Fenchel–Nielsen coordinates, `1/0`.
    pub const MERIDIAN: Slope = Slope { p: 1, q: 0 };
    /// The standard dual curve `0/1`.
    pub const LONGITUDE: Slope = Slope { p: 0, q: 1 };

    pub fn new(p: i64, q: i64) -> Result<Self> {
        if p == 0 && q == 0 {
            return Err(Error::InvalidCurve("0/0 is not a curve".into()));
        }
        if gcd(p, q) != 1 {
            return Err(Error::InvalidCurve(format!("{p}/{q} is not primitive")));
        }
        if p == i64::MIN || q == i64::MIN {
            return Err(Error::Overflow(format!("{p}/{q}")));
        }
        Ok(if q < 0 || (q == 0 && p < 0) {
            Slope { p: -p, q: -q }
        } else {
            Slope { p, q }
        })
    }

    fn from_wide(p: i128, q: i128) -> Result<Self> {
        let p = i64::try_from(p).map_err(|_| Error::Overflow(format!("slope numerator {p}")))?;
        let q = i64::try_from(q).map_err(|_| Error::Overflow(format!("slope denominator {q}")))?;
        Slope::new(p, q)
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    /// Algebraic pairing `⟨self, other⟩ = q_self·p_other − p_self·q_other`.
    /// Twisting `0/1` once along `1/0` gives `1/1` under this sign.
    pub fn pairing(&self, other: &Slope) -> i128 {
        self.q as i128 * other.p as i128 - self.p as i128 * other.q as i128
    }

    fn shell(&self) -> i64 {
        self.p.abs().max(self.q)
    }
}

/// Canonical slope order: by `max(|p|, q)`, then `q`, then `p`. Slopes of a
/// smaller enumeration box always come first.
impl Ord for Slope {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.shell(), self.q, self.p).cmp(&(other.shell(), other.q, other.p))
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Slope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (p, q) = s
            .trim()
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("slope {s:?} is not of the form p/q")))?;
        let p = p
            .trim()
            .parse::<i64>()
            .map_err(|e| Error::Parse(format!("slope {s:?}: {e}")))?;
        let q = q
            .trim()
            .parse::<i64>()
            .map_err(|e| Error::Parse(format!("slope {s:?}: {e}")))?;
        Slope::new(p, q)
    }
}

/// A freely and cyclically reduced word in the generators of the
/// fundamental group. Letter `k > 0` is generator `k`, `-k` its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorWord(Vec<i32>);

impl GeneratorWord {
    pub fn new(letters: Vec<i32>) -> Result<Self> {
        if letters.contains(&0) {
            return Err(Error::InvalidCurve("generator index 0 is not allowed".into()));
        }
        let mut out: Vec<i32> = Vec::with_capacity(letters.len());
        for l in letters {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        let mut lo = 0;
        let mut hi = out.len();
        while hi - lo >= 2 && out[lo] == -out[hi - 1] {
            lo += 1;
            hi -= 1;
        }
        let reduced = out[lo..hi].to_vec();
        if reduced.is_empty() {
            return Err(Error::InvalidCurve("word is trivial".into()));
        }
        Ok(Self(reduced))
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }
}

/// Isotopy class of an essential simple closed curve.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurveClass {
    /// A slope on the once-punctured torus.
    Slope(Slope),
    /// A generator word on a general surface.
    Word(GeneratorWord),
}

impl CurveClass {
    pub fn slope(p: i64, q: i64) -> Result<Self> {
        Slope::new(p, q).map(CurveClass::Slope)
    }

    pub fn as_slope(&self) -> Result<Slope> {
        match self {
            CurveClass::Slope(s) => Ok(*s),
            CurveClass::Word(_) => Err(Error::Unsupported(
                "curve combinatorics are only implemented on the once-punctured torus".into(),
            )),
        }
    }
}

impl From<Slope> for CurveClass {
    fn from(s: Slope) -> Self {
        CurveClass::Slope(s)
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveClass::Slope(s) => s.fmt(f),
            CurveClass::Word(w) => {
                let parts: Vec<String> = w.letters().iter().map(|l| l.to_string()).collect();
                write!(f, "<{}>", parts.join(" "))
            }
        }
    }
}

impl FromStr for CurveClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse::<Slope>().map(CurveClass::Slope)
    }
}

/// All canonical primitive slopes with `|p| <= n` and `0 <= q <= n`, in
/// canonical slope order.
pub fn enumerate_slopes(n: u32) -> Vec<CurveClass> {
    let n = n as i64;
    let mut out = Vec::new();
    for q in 0..=n {
        for p in -n..=n {
            if q == 0 && p != 1 {
                continue;
            }
            if gcd(p, q) == 1 {
                out.push(Slope { p, q });
            }
        }
    }
    out.sort();
    out.into_iter().map(CurveClass::Slope).collect()
}

/// Geometric intersection number. On the once-punctured torus this is
/// `|p₁q₂ − q₁p₂|`.
pub fn intersection_number(c1: &CurveClass, c2: &CurveClass) -> Result<u64> {
    let a = c1.as_slope()?;
    let b = c2.as_slope()?;
    u64::try_from(a.pairing(&b).unsigned_abs())
        .map_err(|_| Error::Overflow(format!("i({a}, {b})")))
}

/// Image of `c` under the `k`-th power of the Dehn twist along `along`:
/// `c ↦ c + k·⟨c, along⟩·along`, canonicalized.
pub fn dehn_twist(c: &CurveClass, along: &CurveClass, k: i64) -> Result<CurveClass> {
    let c = c.as_slope()?;
    let a = along.as_slope()?;
    let m = (k as i128)
        .checked_mul(c.pairing(&a))
        .ok_or_else(|| Error::Overflow(format!("twist count {k}")))?;
    let p = (c.p as i128)
        .checked_add(m.checked_mul(a.p as i128).ok_or_else(|| Error::Overflow("twist".into()))?)
        .ok_or_else(|| Error::Overflow("twist".into()))?;
    let q = (c.q as i128)
        .checked_add(m.checked_mul(a.q as i128).ok_or_else(|| Error::Overflow("twist".into()))?)
        .ok_or_else(|| Error::Overflow("twist".into()))?;
    Slope::from_wide(p, q).map(CurveClass::Slope)
}

/// A marking: a pants decomposition together with one dual curve per pants
/// curve.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Marking {
    pants: Vec<CurveClass>,
    duals: Vec<CurveClass>,
}

impl Marking {
    /// Validates disjointness of the pants curves, minimal intersection of
    /// each dual with its pants curve and disjointness from the others.
    /// Only slope markings can be validated; word markings are accepted
    /// as given.
    pub fn new(pants: Vec<CurveClass>, duals: Vec<CurveClass>) -> Result<Self> {
        if pants.is_empty() {
            return Err(Error::InvalidMarking("no pants curves".into()));
        }
        if pants.len() != duals.len() {
            return Err(Error::InvalidMarking(format!(
                "{} pants curves but {} duals",
                pants.len(),
                duals.len()
            )));
        }
        let all_slopes = pants
            .iter()
            .chain(duals.iter())
            .all(|c| matches!(c, CurveClass::Slope(_)));
        if all_slopes {
            for (i, a) in pants.iter().enumerate() {
                for b in &pants[i + 1..] {
                    if intersection_number(a, b)? != 0 || a == b {
                        return Err(Error::InvalidMarking(format!(
                            "pants curves {a} and {b} are not disjoint and distinct"
                        )));
                    }
                }
            }
            for (i, d) in duals.iter().enumerate() {
                for (j, a) in pants.iter().enumerate() {
                    let n = intersection_number(d, a)?;
                    if i == j && n != 1 {
                        return Err(Error::InvalidMarking(format!(
                            "dual {d} meets its pants curve {a} {n} times"
                        )));
                    }
                    if i != j && n != 0 {
                        return Err(Error::InvalidMarking(format!(
                            "dual {d} meets pants curve {a}"
                        )));
                    }
                }
            }
        }
        Ok(Self { pants, duals })
    }

    pub fn pants_curves(&self) -> &[CurveClass] {
        &self.pants
    }

    pub fn duals(&self) -> &[CurveClass] {
        &self.duals
    }

    /// Pants curves followed by duals.
    pub fn curves(&self) -> impl Iterator<Item = &CurveClass> {
        self.pants.iter().chain(self.duals.iter())
    }

    /// JSON form `[["p/q", ...], ["p/q", ...]]`: pants curves, then duals.
    pub fn to_json(&self) -> String {
        let enc = |v: &[CurveClass]| {
            serde_json::Value::Array(
                v.iter()
                    .map(|c| serde_json::Value::String(c.to_string()))
                    .collect(),
            )
        };
        serde_json::Value::Array(vec![enc(&self.pants), enc(&self.duals)]).to_string()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("marking: {e}")))?;
        let outer = v
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::Parse("marking must be a pair of lists".into()))?;
        let dec = |x: &serde_json::Value| -> Result<Vec<CurveClass>> {
            x.as_array()
                .ok_or_else(|| Error::Parse("marking entries must be lists".into()))?
                .iter()
                .map(|s| {
                    s.as_str()
                        .ok_or_else(|| Error::Parse("curves must be \"p/q\" strings".into()))?
                        .parse()
                })
                .collect()
        };
        Marking::new(dec(&outer[0])?, dec(&outer[1])?)
    }
}

/// Total number of intersections between the curves of two markings.
pub fn marking_intersection(m1: &Marking, m2: &Marking) -> Result<u64> {
    let mut total: u64 = 0;
    for a in m1.curves() {
        for b in m2.curves() {
            total = total
                .checked_add(intersection_number(a, b)?)
                .ok_or_else(|| Error::Overflow("marking intersection".into()))?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: i64, q: i64) -> CurveClass {
        CurveClass::slope(p, q).unwrap()
    }

    #[test]
    fn canonical_form() {
        assert_eq!(Slope::new(-2, -3).unwrap(), Slope::new(2, 3).unwrap());
        assert_eq!(Slope::new(-1, 0).unwrap(), Slope::MERIDIAN);
        assert!(Slope::new(2, 4).is_err());
        assert!(Slope::new(0, 0).is_err());
    }

    #[test]
    fn enumerate_unit_box() {
        let got = enumerate_slopes(1);
        let mut want = vec![s(1, 0), s(0, 1), s(1, 1), s(-1, 1)];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn enumerate_box_two_matches_gcd_filter() {
        let mut count = 0;
        for q in 0..=2i64 {
            for p in -2..=2i64 {
                if gcd(p, q) == 1 && (q > 0 || p == 1) {
                    count += 1;
                }
            }
        }
        assert_eq!(enumerate_slopes(2).len(), count);
    }

    #[test]
    fn intersection_examples() {
        assert_eq!(intersection_number(&s(1, 0), &s(0, 1)).unwrap(), 1);
        assert_eq!(intersection_number(&s(1, 0), &s(1, 0)).unwrap(), 0);
        assert_eq!(intersection_number(&s(2, 1), &s(3, 2)).unwrap(), 1);
    }

    #[test]
    fn words_are_unsupported() {
        let w = CurveClass::Word(GeneratorWord::new(vec![1, 2, -1, -2]).unwrap());
        assert!(matches!(
            intersection_number(&w, &s(1, 0)),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(dehn_twist(&w, &s(1, 0), 1), Err(Error::Unsupported(_))));
    }

    #[test]
    fn word_reduction() {
        let w = GeneratorWord::new(vec![2, 1, 1, -1, 3, -2]).unwrap();
        assert_eq!(w.letters(), &[1, 3]);
        assert!(GeneratorWord::new(vec![1, -1]).is_err());
    }

    #[test]
    fn twist_examples() {
        assert_eq!(dehn_twist(&s(0, 1), &s(1, 0), 1).unwrap(), s(1, 1));
        assert_eq!(dehn_twist(&s(0, 1), &s(1, 0), 0).unwrap(), s(0, 1));
        assert_eq!(dehn_twist(&s(0, 1), &s(1, 0), -1).unwrap(), s(-1, 1));
        assert_eq!(dehn_twist(&s(1, 0), &s(1, 0), 7).unwrap(), s(1, 0));
    }

    #[test]
    fn marking_examples() {
        let m = Marking::new(vec![s(1, 0)], vec![s(0, 1)]).unwrap();
        assert_eq!(marking_intersection(&m, &m).unwrap(), 2);
        let swapped = Marking::new(vec![s(0, 1)], vec![s(1, 0)]).unwrap();
        assert_eq!(marking_intersection(&m, &swapped).unwrap(), 2);
        let mut prev = 0;
        for k in 1..20 {
            let d = dehn_twist(&s(0, 1), &s(1, 0), k).unwrap();
            let mk = Marking::new(vec![s(1, 0)], vec![d]).unwrap();
            let i = marking_intersection(&m, &mk).unwrap();
            // i = 2 + k: linear growth in the twist count
            assert_eq!(i, 2 + k as u64);
            assert!(i > prev);
            prev = i;
        }
    }

    #[test]
    fn marking_rejects_bad_dual() {
        assert!(Marking::new(vec![s(1, 0)], vec![s(1, 2)]).is_err());
        assert!(Marking::new(vec![s(1, 0)], vec![]).is_err());
    }

    #[test]
    fn marking_json() {
        let m = Marking::new(vec![s(1, 0)], vec![s(-3, 1)]).unwrap();
        let text = m.to_json();
        assert_eq!(text, r#"[["1/0"],["-3/1"]]"#);
        assert_eq!(Marking::from_json(&text).unwrap(), m);
        assert!(Marking::from_json(r#"[["1/0"]]"#).is_err());
    }

    #[test]
    fn slope_parse() {
        assert_eq!("3/-2".parse::<Slope>().unwrap(), Slope::new(-3, 2).unwrap());
        assert!("3".parse::<Slope>().is_err());
        assert!("a/b".parse::<Slope>().is_err());
    }
}
