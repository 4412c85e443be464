//! Regular annulus metrics in (twist, core length) coordinates and the
//! Lipschitz-type distance between them.
//!
//! A regular metric is the quotient of a closed neighbourhood of a geodesic
//! by a translation of length `l` along it; both boundary curves have length
//! `ε₀`, so the collar half-width is `d = arccosh(ε₀ / l)`. The arc with
//! winding `n` crosses from one boundary to the other with its feet offset by
//! `|n − t|·l` along the core, so its length is the Fermi distance between
//! `(d, 0)` and `(−d, |n − t|·l)`.

use crate::error::{Error, Result};
use crate::hypkernel::{collar_half_width, fermi_distance, HalfPlanePoint};
use crate::metrics::{Guarantee, MetricEstimate, Witness};

/// A point of the model space of regular annulus metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusPoint {
    twist: f64,
    core: f64,
    eps0: f64,
    half_width: f64,
}

impl AnnulusPoint {
    /// `twist` is dimensionless (a full Dehn twist adds one); `core` must be
    /// below the boundary length `eps0`.
    pub fn new(twist: f64, core: f64, eps0: f64) -> Result<Self> {
        if !twist.is_finite() {
            return Err(Error::InvalidParameter(format!("twist {twist} is not finite")));
        }
        let half_width = collar_half_width(core, eps0)?;
        Ok(Self {
            twist,
            core,
            eps0,
            half_width,
        })
    }

    pub fn twist(&self) -> f64 {
        self.twist
    }

    pub fn core(&self) -> f64 {
        self.core
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Coordinates `(t, 1/l)` in the upper half-plane.
    pub fn half_plane(&self) -> HalfPlanePoint {
        HalfPlanePoint {
            x: self.twist,
            y: 1.0 / self.core,
        }
    }

    /// Core length when `arc` is the core, otherwise the arc length.
    pub fn length(&self, arc: ArcClass) -> f64 {
        match arc {
            ArcClass::Core => self.core,
            ArcClass::Winding(n) => arc_length(self, n),
        }
    }
}

/// Elements of `C(A, ∂A)` used by the distance: the core curve and the
/// crossing arcs, indexed by winding relative to the twist-zero arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArcClass {
    Core,
    Winding(i64),
}

impl std::fmt::Display for ArcClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ArcClass::Core => f.write_str("core"),
            ArcClass::Winding(n) => write!(f, "arc[{n}]"),
        }
    }
}

/// Length of the crossing arc with winding `n`.
pub fn arc_length(rho: &AnnulusPoint, n: i64) -> f64 {
    let offset = (n as f64 - rho.twist).abs() * rho.core;
    fermi_distance(rho.half_width, -rho.half_width, offset)
}

fn same_space(a: &AnnulusPoint, b: &AnnulusPoint) -> Result<()> {
    if a.eps0 != b.eps0 {
        return Err(Error::MismatchedSpace(a.eps0, b.eps0));
    }
    Ok(())
}

fn abs_log_ratio(a: f64, b: f64) -> f64 {
    (a.ln() - b.ln()).abs()
}

/// Sup of `|log(l₁(β)/l₂(β))|` over windings in `[lo, hi]`, by exhaustive
/// enumeration.
fn enumerate_windings(r1: &AnnulusPoint, r2: &AnnulusPoint, lo: i64, hi: i64) -> (f64, i64) {
    let mut best = (f64::NEG_INFINITY, lo);
    for n in lo..=hi {
        let v = abs_log_ratio(arc_length(r1, n), arc_length(r2, n));
        if v > best.0 {
            best = (v, n);
        }
    }
    best
}

/// Range of one arc-length function over the windings `[lo, hi]`: arc length
/// is increasing in `|n − t|`, so extremes sit at the ends or at the twist.
fn length_range(r: &AnnulusPoint, lo: i64, hi: i64) -> (f64, f64) {
    let a = arc_length(r, lo);
    let b = arc_length(r, hi);
    let max = a.max(b);
    let min = if (lo as f64) <= r.twist && r.twist <= hi as f64 {
        2.0 * r.half_width
    } else {
        a.min(b)
    };
    (min, max)
}

const LEAF: i64 = 32;

/// Exact sup over windings `|n| <= cutoff` plus the core. Equivalent to
/// enumerating every winding: intervals are discarded only when the
/// monotonicity bound shows that none of their windings can beat the best
/// value found so far.
fn windings_sup(r1: &AnnulusPoint, r2: &AnnulusPoint, cutoff: i64) -> (f64, ArcClass) {
    let mut best = (abs_log_ratio(r1.core, r2.core), ArcClass::Core);
    let consider = |v: f64, n: i64, best: &mut (f64, ArcClass)| {
        if v > best.0 {
            *best = (v, ArcClass::Winding(n));
        }
    };
    // seed with the windings closest to each twist
    for t in [r1.twist, r2.twist] {
        let n = (t.round() as i64).clamp(-cutoff, cutoff);
        consider(
            abs_log_ratio(arc_length(r1, n), arc_length(r2, n)),
            n,
            &mut best,
        );
    }
    let mut stack = vec![(-cutoff, cutoff)];
    while let Some((lo, hi)) = stack.pop() {
        if hi - lo < LEAF {
            let (v, n) = enumerate_windings(r1, r2, lo, hi);
            consider(v, n, &mut best);
            continue;
        }
        let (min1, max1) = length_range(r1, lo, hi);
        let (min2, max2) = length_range(r2, lo, hi);
        let bound = (max1.ln() - min2.ln()).max(max2.ln() - min1.ln());
        // slack covers last-ulp non-monotonicity of the evaluated lengths
        if bound + 1e-13 < best.0 {
            continue;
        }
        let mid = lo + (hi - lo) / 2;
        stack.push((mid + 1, hi));
        stack.push((lo, mid));
    }
    best
}

/// `sup |log(l_{ρ₁}(β) / l_{ρ₂}(β))|` over the core and the arcs with
/// `|n| <= cutoff`. A lower bound for the untruncated distance.
pub fn dla_bruteforce(r1: &AnnulusPoint, r2: &AnnulusPoint, cutoff: u64) -> Result<MetricEstimate> {
    same_space(r1, r2)?;
    if cutoff == 0 {
        return Err(Error::InvalidParameter("winding cutoff must be at least 1".into()));
    }
    let cutoff = i64::try_from(cutoff)
        .map_err(|_| Error::Overflow(format!("winding cutoff {cutoff}")))?;
    let (value, arc) = windings_sup(r1, r2, cutoff);
    Ok(MetricEstimate::new(
        value,
        Guarantee::LowerBoundByTruncation,
        Witness::Arc(arc),
    ))
}

/// [`dla_bruteforce`] with the cutoff doubled, starting past both twists,
/// until the value changes by less than `1e-9`. Returns the estimate and the
/// final cutoff.
pub fn dla_bruteforce_adaptive(r1: &AnnulusPoint, r2: &AnnulusPoint) -> Result<(MetricEstimate, u64)> {
    let reach = r1.twist.abs().max(r2.twist.abs()).ceil();
    if reach > 4e18 {
        return Err(Error::Overflow(format!("twist {reach} out of winding range")));
    }
    let mut cutoff = (reach as u64 + 1).max(16);
    let mut prev = dla_bruteforce(r1, r2, cutoff)?;
    loop {
        let next_cutoff = cutoff
            .checked_mul(2)
            .filter(|c| *c < (1u64 << 62))
            .ok_or_else(|| Error::Overflow("winding cutoff".into()))?;
        let next = dla_bruteforce(r1, r2, next_cutoff)?;
        if (next.value - prev.value).abs() < 1e-9 {
            return Ok((next, next_cutoff));
        }
        prev = next;
        cutoff = next_cutoff;
    }
}

/// Which branch of the closed-form annulus estimate applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnnulusCase {
    /// `|Δt|·l₁ <= log(1/l₁)`: value `log(l₂/l₁)`.
    Shear,
    /// `|Δt|·l₁ > log(1/l₁)`: value `log(|Δt|·l₂ / log(1/l₁))`.
    Twist,
}

/// Closed-form estimate of the annulus distance, with `l₁ <= l₂` after
/// ordering the pair.
pub fn dla_estimate(r1: &AnnulusPoint, r2: &AnnulusPoint) -> Result<MetricEstimate> {
    same_space(r1, r2)?;
    let (a, b) = if r1.core <= r2.core { (r1, r2) } else { (r2, r1) };
    let (l1, l2) = (a.core, b.core);
    let dt = (a.twist - b.twist).abs();
    let log_inv = (1.0 / l1).ln();
    let (value, case) = if dt * l1 <= log_inv {
        ((l2 / l1).ln(), AnnulusCase::Shear)
    } else {
        ((dt * l2 / log_inv).ln(), AnnulusCase::Twist)
    };
    Ok(MetricEstimate::new(
        value,
        Guarantee::AdditiveConstantEstimate,
        Witness::Case(match case {
            AnnulusCase::Shear => "annulus-shear".into(),
            AnnulusCase::Twist => "annulus-twist".into(),
        }),
    ))
}

pub fn dla_case(r1: &AnnulusPoint, r2: &AnnulusPoint) -> AnnulusCase {
    let l1 = r1.core.min(r2.core);
    if (r1.twist - r2.twist).abs() * l1 <= (1.0 / l1).ln() {
        AnnulusCase::Shear
    } else {
        AnnulusCase::Twist
    }
}

/// Exact hyperbolic distance between `(t₁, 1/l₁)` and `(t₂, 1/l₂)`.
pub fn half_plane_distance(z1: HalfPlanePoint, z2: HalfPlanePoint) -> f64 {
    z1.distance(&z2)
}

/// Coarse form of [`half_plane_distance`]: `log(l₂/l₁)` when
/// `|Δt|·l₁ <= 1`, else `log(l₂/l₁) + 2 log(|Δt|·l₁)`, with `l = 1/y` and
/// `l₁ <= l₂`.
pub fn half_plane_estimate(z1: HalfPlanePoint, z2: HalfPlanePoint) -> f64 {
    let (l1, l2) = {
        let (a, b) = (1.0 / z1.y, 1.0 / z2.y);
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    };
    let dt = (z1.x - z2.x).abs();
    let base = (l2 / l1).ln();
    if dt * l1 <= 1.0 {
        base
    } else {
        base + 2.0 * (dt * l1).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const EPS0: f64 = 0.2;

    fn pt(t: f64, l: f64) -> AnnulusPoint {
        AnnulusPoint::new(t, l, EPS0).unwrap()
    }

    #[test]
    fn perpendicular_arc_is_twice_half_width() {
        let r = pt(0.0, 0.01);
        assert_abs_diff_eq!(arc_length(&r, 0), 2.0 * r.half_width(), epsilon = 1e-12);
        assert_eq!(r.length(ArcClass::Core), 0.01);
    }

    #[test]
    fn arc_length_monotone_in_offset() {
        let r = pt(0.3, 0.02);
        let mut prev = 0.0;
        for n in 0..200 {
            let v = arc_length(&r, n);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn bruteforce_basic_properties() {
        let a = pt(0.0, 1e-3);
        let b = pt(37.5, 1e-2);
        assert_eq!(dla_bruteforce(&a, &a, 50).unwrap().value, 0.0);
        assert_eq!(
            dla_bruteforce(&a, &b, 50).unwrap().value,
            dla_bruteforce(&b, &a, 50).unwrap().value
        );
        let mut prev = 0.0;
        for n in [1, 2, 4, 8, 16, 32, 64, 128] {
            let v = dla_bruteforce(&a, &b, n).unwrap().value;
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn pruned_search_equals_enumeration() {
        let pairs = [
            (pt(0.0, 1e-3), pt(0.0, 1e-2)),
            (pt(3.3, 0.04), pt(-700.2, 0.001)),
            (pt(1500.0, 1e-4), pt(-20.0, 1e-4)),
            (pt(0.5, 0.05), pt(0.5, 0.049)),
        ];
        for (a, b) in pairs {
            let cutoff = 4000;
            let (v, _) = enumerate_windings(&a, &b, -cutoff, cutoff);
            let v = v.max(abs_log_ratio(a.core, b.core));
            let got = dla_bruteforce(&a, &b, cutoff as u64).unwrap().value;
            assert_eq!(got, v);
        }
    }

    #[test]
    fn mismatched_space() {
        let a = pt(0.0, 0.01);
        let b = AnnulusPoint::new(0.0, 0.01, 0.15).unwrap();
        assert!(matches!(dla_bruteforce(&a, &b, 4), Err(Error::MismatchedSpace(..))));
        assert!(matches!(dla_estimate(&a, &b), Err(Error::MismatchedSpace(..))));
    }

    #[test]
    fn shear_pair_close_to_log_ratio() {
        let a = pt(0.0, 1e-3);
        let b = pt(0.0, 1e-2);
        let (v, _) = dla_bruteforce_adaptive(&a, &b).unwrap();
        assert!((v.value - 10f64.ln()).abs() < 1.0);
    }

    #[test]
    fn estimate_cases() {
        let a = pt(0.0, 0.01);
        assert_eq!(dla_estimate(&a, &a).unwrap().value, 0.0);
        let b = pt(1e6, 1e-4);
        let c = pt(0.0, 1e-4);
        assert_eq!(dla_case(&b, &c), AnnulusCase::Twist);
        let want = (100.0 / (1e4f64).ln()).ln();
        assert_abs_diff_eq!(dla_estimate(&b, &c).unwrap().value, want, epsilon = 1e-12);
    }

    #[test]
    fn half_plane_examples() {
        let z = pt(3.0, 0.01).half_plane();
        assert_eq!(half_plane_distance(z, z), 0.0);
        let w = pt(3.0, 0.001).half_plane();
        assert_abs_diff_eq!(half_plane_distance(z, w), 10f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(half_plane_estimate(z, w), 10f64.ln(), epsilon = 1e-12);
    }
}
