//! Fenchel–Nielsen points, their holonomy representations and geodesic
//! length functions on the once-punctured torus.
//!
//! The gluing used here: with `X` translating by `l` along the imaginary
//! axis and `D(s)` the translation by `s`,
//!
//! ```text
//! X    = diag(e^{l/2}, e^{-l/2})
//! Y(s) = D(-s) · [[coth(l/2), 1/sinh(l/2)], [1/sinh(l/2), coth(l/2)]]
//! ```
//!
//! so `tr X = 2 cosh(l/2)`, `tr [X, Y] = -2` and `Y(s + l) = X⁻¹ Y(s)`, i.e.
//! a full twist `s → s + l` acts on the representation exactly like the Dehn
//! twist along `1/0`.
//!
//! Slope words are built by the Euclidean algorithm on `(p, q)` using the
//! Nielsen moves `Y ↦ X^k Y` and `X ↦ Y^k X`. Every generator matrix and
//! every product is entrywise positive, so traces are computed without
//! cancellation in a log-scaled representation that cannot overflow.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hypkernel::{acosh_from_log, log_add_exp, log_cosh, Isometry, MARGULIS};
use crate::topology::{
    dehn_twist, intersection_number, CurveClass, Marking, Slope, SurfaceSig,
};

const LN_2: f64 = std::f64::consts::LN_2;

/// Length and twist of one pants curve. Twists are in length units, so
/// `twist → twist + length` is a full Dehn twist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FnCoord {
    pub length: f64,
    pub twist: f64,
}

/// A point of Teichmüller space in Fenchel–Nielsen coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct FnPoint {
    sig: SurfaceSig,
    coords: Vec<FnCoord>,
}

impl FnPoint {
    pub fn new(sig: SurfaceSig, coords: Vec<FnCoord>) -> Result<Self> {
        if coords.len() as i64 != sig.complexity() {
            return Err(Error::InvalidFn(format!(
                "{} coordinates given, surface needs {}",
                coords.len(),
                sig.complexity()
            )));
        }
        for c in &coords {
            if !(c.length > 0.0) || !c.length.is_finite() {
                return Err(Error::InvalidFn(format!("length {} is not positive", c.length)));
            }
            if !c.twist.is_finite() {
                return Err(Error::InvalidFn(format!("twist {} is not finite", c.twist)));
            }
        }
        Ok(Self { sig, coords })
    }

    /// A point on the once-punctured torus with pants curve `1/0`.
    pub fn torus(length: f64, twist: f64) -> Result<Self> {
        Self::new(
            SurfaceSig::ONCE_PUNCTURED_TORUS,
            vec![FnCoord { length, twist }],
        )
    }

    pub fn sig(&self) -> SurfaceSig {
        self.sig
    }

    pub fn coords(&self) -> &[FnCoord] {
        &self.coords
    }

    fn torus_coord(&self) -> Result<FnCoord> {
        if !self.sig.is_once_punctured_torus() {
            return Err(Error::Unsupported(format!(
                "holonomy for genus {} with {} punctures",
                self.sig.genus, self.sig.punctures
            )));
        }
        Ok(self.coords[0])
    }
}

/// `l=<float>,s=<float>` per pants curve, curves separated by `;`.
impl fmt::Display for FnPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coords
            .iter()
            .map(|c| format!("l={:e},s={:e}", c.length, c.twist))
            .collect();
        f.write_str(&parts.join(";"))
    }
}

/// Parses the torus form `l=<float>,s=<float>`. Multi-curve strings need a
/// signature and go through [`FnPoint::parse_with_sig`].
impl FromStr for FnPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FnPoint::parse_with_sig(s, SurfaceSig::ONCE_PUNCTURED_TORUS)
    }
}

impl FnPoint {
    pub fn parse_with_sig(s: &str, sig: SurfaceSig) -> Result<Self> {
        let mut coords = Vec::new();
        for chunk in s.split(';').map(str::trim).filter(|c| !c.is_empty()) {
            let mut length = None;
            let mut twist = None;
            for kv in chunk.split(',') {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("expected key=value in {chunk:?}")))?;
                let v: f64 = v
                    .trim()
                    .parse()
                    .map_err(|e| Error::Parse(format!("{kv:?}: {e}")))?;
                match k.trim() {
                    "l" => length = Some(v),
                    "s" => twist = Some(v),
                    other => return Err(Error::Parse(format!("unknown FN key {other:?}"))),
                }
            }
            match (length, twist) {
                (Some(length), Some(twist)) => coords.push(FnCoord { length, twist }),
                _ => return Err(Error::Parse(format!("{chunk:?} needs both l and s"))),
            }
        }
        FnPoint::new(sig, coords)
    }
}

/// A 2×2 matrix with nonnegative entries, stored entrywise as logarithms
/// (`-inf` for a zero entry). Every generator image in the chosen gluing is
/// nonnegative, so products never cancel and entries spanning hundreds of
/// orders of magnitude stay exact to rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LogMatrix {
    l: [[f64; 2]; 2],
}

impl LogMatrix {
    fn identity() -> Self {
        Self {
            l: [[0.0, f64::NEG_INFINITY], [f64::NEG_INFINITY, 0.0]],
        }
    }

    fn from_logs(l: [[f64; 2]; 2]) -> Self {
        Self { l }
    }

    fn mul(&self, o: &LogMatrix) -> LogMatrix {
        let a = &self.l;
        let b = &o.l;
        let e = |i: usize, j: usize| log_add_exp(a[i][0] + b[0][j], a[i][1] + b[1][j]);
        Self {
            l: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
        }
    }

    fn pow(&self, mut k: u64) -> LogMatrix {
        let mut base = *self;
        let mut acc = LogMatrix::identity();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `ln |trace|`.
    fn log_abs_trace(&self) -> f64 {
        log_add_exp(self.l[0][0], self.l[1][1])
    }

    fn to_isometry(&self) -> Result<Isometry> {
        let worst = self
            .l
            .iter()
            .flatten()
            .filter(|v| v.is_finite())
            .fold(0.0_f64, |acc, v| acc.max(v.abs()));
        if worst > 300.0 {
            return Err(Error::Overflow(format!(
                "matrix entries of size e^{worst} are not representable"
            )));
        }
        let e = |i: usize, j: usize| self.l[i][j].exp();
        Isometry::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }
}

/// Holonomy of a once-punctured torus: images of the generators `X`
/// (the slope `1/0`) and `Y` (the slope `0/1`).
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    sig: SurfaceSig,
    length: f64,
    x: LogMatrix,
    x_inv: LogMatrix,
    y: LogMatrix,
}

impl Representation {
    pub fn sig(&self) -> SurfaceSig {
        self.sig
    }

    /// Generator images as determinant-one matrices. Fails with
    /// [`Error::Overflow`] when the twist is too large for plain `f64`
    /// entries; lengths are still available through [`curve_length`].
    pub fn generators(&self) -> Result<Vec<Isometry>> {
        Ok(vec![self.x.to_isometry()?, self.y.to_isometry()?])
    }

    /// `tr (X Y X⁻¹ Y⁻¹)`.
    pub fn commutator_trace(&self) -> Result<f64> {
        let g = self.generators()?;
        Ok(g[0].commutator(&g[1]).trace())
    }

    fn slope_matrix(&self, slope: Slope) -> LogMatrix {
        let (mut a, mut p) = if slope.p() < 0 {
            (self.x_inv, slope.p().unsigned_abs())
        } else {
            (self.x, slope.p() as u64)
        };
        let mut b = self.y;
        let mut q = slope.q() as u64;
        loop {
            if q == 0 {
                return a;
            }
            if p == 0 {
                return b;
            }
            if p >= q {
                let k = p / q;
                b = a.pow(k).mul(&b);
                p -= k * q;
            } else {
                let k = q / p;
                a = b.pow(k).mul(&a);
                q -= k * p;
            }
        }
    }

    /// Image of the word representing `slope`, when representable.
    pub fn slope_isometry(&self, slope: Slope) -> Result<Isometry> {
        self.slope_matrix(slope).to_isometry()
    }
}

/// Realizes a Fenchel–Nielsen point as a representation of the free group
/// on `X`, `Y`.
pub fn build_representation(sigma: &FnPoint) -> Result<Representation> {
    let FnCoord { length: l, twist: s } = sigma.torus_coord()?;
    let h = 0.5 * l;
    let ninf = f64::NEG_INFINITY;
    let x = LogMatrix::from_logs([[h, ninf], [ninf, -h]]);
    let x_inv = LogMatrix::from_logs([[-h, ninf], [ninf, h]]);
    // Y(s) = D(-s) Y0, Y0 = coth(h) [[1, sech h], [sech h, 1]]
    let log_coth = if h < 20.0 {
        (1.0 / h.tanh()).ln()
    } else {
        (-(-2.0 * h).exp_m1()).recip().ln() + (-2.0 * h).exp().ln_1p()
    };
    let log_sech = -log_cosh(h);
    let top = log_coth - 0.5 * s;
    let bottom = log_coth + 0.5 * s;
    let y = LogMatrix::from_logs([[top, top + log_sech], [bottom + log_sech, bottom]]);
    Ok(Representation {
        sig: sigma.sig(),
        length: l,
        x,
        x_inv,
        y,
    })
}

/// Length of the closed geodesic in the class `c` at the point `sigma`.
pub fn curve_length(sigma: &FnPoint, c: &CurveClass) -> Result<f64> {
    let rep = build_representation(sigma)?;
    representation_length(&rep, c)
}

/// [`curve_length`] against a prebuilt representation.
pub fn representation_length(rep: &Representation, c: &CurveClass) -> Result<f64> {
    let slope = c.as_slope()?;
    if slope == Slope::MERIDIAN {
        return Ok(rep.length);
    }
    let m = rep.slope_matrix(slope);
    let lt = m.log_abs_trace();
    if !(lt > LN_2) {
        return Err(Error::NotHyperbolic { trace: lt.exp() });
    }
    Ok(2.0 * acosh_from_log(lt - LN_2))
}

/// Lengths of many curves at one point.
pub fn curve_lengths(sigma: &FnPoint, curves: &[CurveClass]) -> Result<Vec<f64>> {
    let rep = build_representation(sigma)?;
    curves
        .iter()
        .map(|c| representation_length(&rep, c))
        .collect()
}

/// Greedy short marking among `candidates`: the pants system by increasing
/// length, then for each pants curve the shortest candidate meeting it once
/// and missing the other pants curves. Ties go to the smaller slope in
/// canonical order.
pub fn short_marking(sigma: &FnPoint, candidates: &[CurveClass]) -> Result<Marking> {
    if candidates.is_empty() {
        return Err(Error::InsufficientCandidates);
    }
    let rep = build_representation(sigma)?;
    let mut ranked: Vec<(f64, &CurveClass)> = candidates
        .iter()
        .map(|c| representation_length(&rep, c).map(|l| (l, c)))
        .collect::<Result<_>>()?;
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)));

    let needed = sigma.sig().complexity() as usize;
    let mut pants: Vec<CurveClass> = Vec::with_capacity(needed);
    for (_, c) in &ranked {
        if pants.len() == needed {
            break;
        }
        let mut ok = true;
        for p in &pants {
            if *p == **c || intersection_number(p, c)? != 0 {
                ok = false;
                break;
            }
        }
        if ok {
            pants.push((*c).clone());
        }
    }
    if pants.len() < needed {
        return Err(Error::InsufficientCandidates);
    }

    let mut duals = Vec::with_capacity(needed);
    for (i, alpha) in pants.iter().enumerate() {
        let mut found = None;
        'cand: for (_, c) in &ranked {
            if intersection_number(c, alpha)? != 1 {
                continue;
            }
            for (j, other) in pants.iter().enumerate() {
                if j != i && intersection_number(c, other)? != 0 {
                    continue 'cand;
                }
            }
            found = Some((*c).clone());
            break;
        }
        duals.push(found.ok_or(Error::InsufficientCandidates)?);
    }
    Marking::new(pants, duals)
}

/// Candidates whose length at `sigma` is at most `eps`.
pub fn thin_curves(sigma: &FnPoint, eps: f64, candidates: &[CurveClass]) -> Result<Vec<CurveClass>> {
    if !(eps > 0.0) || eps > MARGULIS {
        return Err(Error::InvalidParameter(format!(
            "thin threshold {eps} must lie in (0, {MARGULIS}]"
        )));
    }
    let rep = build_representation(sigma)?;
    let mut out = Vec::new();
    for c in candidates {
        if representation_length(&rep, c)? <= eps {
            out.push(c.clone());
        }
    }
    Ok(out)
}

/// Integer `k` minimizing a convex function on `ℤ`, found by doubling
/// from `0` and then bisecting on the discrete slope.
fn convex_argmin<F>(mut f: F) -> Result<i64>
where
    F: FnMut(i64) -> Result<f64>,
{
    let f0 = f(0)?;
    let dir = if f(1)? < f0 {
        1
    } else if f(-1)? < f0 {
        -1
    } else {
        return Ok(0);
    };
    // bracket: f(dir*lo) > f(dir*(lo+1)) and f(dir*hi) <= f(dir*(hi+1))
    let mut lo: i64 = 0;
    let mut hi: i64 = 1;
    loop {
        if hi > (1i64 << 61) {
            return Err(Error::Overflow("twist search diverged".into()));
        }
        if f(dir * hi)? <= f(dir * (hi + 1))? {
            break;
        }
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if f(dir * mid)? > f(dir * (mid + 1))? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(dir * hi)
}

/// Shortest curve `u` and shortest curve `v` meeting it once, by twist
/// reduction: repeatedly replace the longer of the pair with the shortest
/// curve of its twist family along the shorter one. Length is convex along
/// twist families, so each reduction is an exact integer minimization.
pub fn systolic_basis(sigma: &FnPoint) -> Result<(CurveClass, CurveClass)> {
    let rep = build_representation(sigma)?;
    let len = |c: &CurveClass| representation_length(&rep, c);
    let mut u = CurveClass::Slope(Slope::MERIDIAN);
    let mut v = CurveClass::Slope(Slope::LONGITUDE);
    let mut lu = len(&u)?;
    let mut lv = len(&v)?;
    for _ in 0..200 {
        if lv < lu {
            std::mem::swap(&mut u, &mut v);
            std::mem::swap(&mut lu, &mut lv);
        }
        let k = convex_argmin(|k| len(&dehn_twist(&v, &u, k)?))?;
        if k == 0 {
            return Ok((u, v));
        }
        v = dehn_twist(&v, &u, k)?;
        lv = len(&v)?;
        if lv >= lu {
            return Ok((u, v));
        }
    }
    Err(Error::Degenerate("twist reduction did not converge".into()))
}
