//! Hyperbolic-plane primitives: PSL(2,R) isometries, right-angled hexagons
//! and pentagons, collars and Fermi coordinates.
//!
//! Every quantity is an `f64`. Arguments above [`LOG_SPACE_THRESHOLD`] switch
//! to log-space evaluation so that `cosh` never overflows.

use crate::error::{Error, Result};

/// Arguments above this switch hyperbolic functions to log-space evaluation.
pub const LOG_SPACE_THRESHOLD: f64 = 600.0;

/// Tolerance on `|trace| - 2` separating hyperbolic from parabolic isometries.
pub const TRACE_TOLERANCE: f64 = 1e-10;

/// Margulis constant for surfaces (Yamada's value for embedded collars).
pub const MARGULIS: f64 = 0.2629;

const LN_2: f64 = std::f64::consts::LN_2;

/// `ln cosh x`, accurate for all finite `x`.
pub fn log_cosh(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 20.0 {
        ax.cosh().ln()
    } else {
        ax + (-2.0 * ax).exp().ln_1p() - LN_2
    }
}

/// `ln sinh x` for `x > 0`.
pub fn log_sinh(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 20.0 {
        x.sinh().ln()
    } else {
        x + (-(-2.0 * x).exp_m1()).ln() - LN_2
    }
}

/// `arccosh(e^ly)` for `ly >= 0`.
pub fn acosh_from_log(ly: f64) -> f64 {
    if ly < 20.0 {
        ly.exp().max(1.0).acosh()
    } else {
        ly + (1.0 + (1.0 - (-2.0 * ly).exp()).sqrt()).ln()
    }
}

/// `arcsinh(e^lx)`.
pub fn asinh_from_log(lx: f64) -> f64 {
    if lx < 20.0 {
        lx.exp().asinh()
    } else {
        lx + (1.0 + (1.0 + (-2.0 * lx).exp()).sqrt()).ln()
    }
}

/// `ln(e^a + e^b)`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Classification of a non-identity element of PSL(2,R) by its trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsometryKind {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// A point of the upper half-plane model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlanePoint {
    pub x: f64,
    pub y: f64,
}

impl HalfPlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "({x}, {y}) is not in the upper half-plane"
            )));
        }
        Ok(Self { x, y })
    }

    /// Hyperbolic distance, `2 asinh(|z - w| / (2 sqrt(y_z y_w)))`.
    pub fn distance(&self, other: &HalfPlanePoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let chord = dx.hypot(dy);
        if chord == 0.0 {
            return 0.0;
        }
        let l = chord.ln() - LN_2 - 0.5 * (self.y.ln() + other.y.ln());
        2.0 * asinh_from_log(l)
    }

    /// Point at signed offset `offset` from the imaginary axis, with its
    /// foot at axis position `along` (the foot is `i e^along`). Positive
    /// offsets lie to the left of the upward-oriented axis.
    pub fn from_fermi(offset: f64, along: f64) -> Self {
        let scale = along.exp();
        Self {
            x: -scale * offset.tanh(),
            y: scale / offset.cosh(),
        }
    }
}

/// An orientation-preserving isometry of the hyperbolic plane, stored as a
/// determinant-one real 2×2 matrix (defined up to sign).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    m: [[f64; 2]; 2],
}

impl Isometry {
    /// Builds an isometry from any matrix with positive determinant,
    /// rescaling it to determinant one.
    pub fn new(m: [[f64; 2]; 2]) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::Degenerate(format!(
                "matrix determinant {det} is not positive"
            )));
        }
        Ok(Self::rescaled(m, det))
    }

    fn rescaled(m: [[f64; 2]; 2], det: f64) -> Self {
        let s = det.sqrt().recip();
        Self {
            m: [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]],
        }
    }

    pub fn identity() -> Self {
        Self {
            m: [[1.0, 0.0], [0.0, 1.0]],
        }
    }

    /// Translation of length `len` along the imaginary axis.
    pub fn axial_translation(len: f64) -> Self {
        let h = 0.5 * len;
        Self {
            m: [[h.exp(), 0.0], [0.0, (-h).exp()]],
        }
    }

    pub fn entries(&self) -> [[f64; 2]; 2] {
        self.m
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    /// `self ∘ other`, renormalized to determinant one.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let a = &self.m;
        let b = &other.m;
        let m = [
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        Self::rescaled(m, det)
    }

    pub fn inverse(&self) -> Isometry {
        let m = &self.m;
        Isometry {
            m: [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]],
        }
    }

    /// `g · self · g⁻¹`.
    pub fn conjugate_by(&self, g: &Isometry) -> Isometry {
        g.compose(self).compose(&g.inverse())
    }

    /// `self · other · self⁻¹ · other⁻¹`.
    pub fn commutator(&self, other: &Isometry) -> Isometry {
        self.compose(other)
            .compose(&self.inverse())
            .compose(&other.inverse())
    }

    pub fn kind(&self) -> IsometryKind {
        let t = self.trace().abs();
        if t > 2.0 + TRACE_TOLERANCE {
            IsometryKind::Hyperbolic
        } else if t >= 2.0 - TRACE_TOLERANCE {
            IsometryKind::Parabolic
        } else {
            IsometryKind::Elliptic
        }
    }

    /// Möbius action on the upper half-plane.
    pub fn act(&self, z: HalfPlanePoint) -> HalfPlanePoint {
        let [[a, b], [c, d]] = self.m;
        // (a z + b) / (c z + d) with z = x + i y
        let nr = a * z.x + b;
        let ni = a * z.y;
        let dr = c * z.x + d;
        let di = c * z.y;
        let den = dr * dr + di * di;
        HalfPlanePoint {
            x: (nr * dr + ni * di) / den,
            y: (ni * dr - nr * di) / den,
        }
    }

    /// Fixed points on the real line of a hyperbolic isometry, as
    /// (repelling, attracting). `f64::INFINITY` stands for the point at ∞.
    pub fn fixed_points(&self) -> Result<(f64, f64)> {
        if self.kind() != IsometryKind::Hyperbolic {
            return Err(Error::NotHyperbolic {
                trace: self.trace().abs(),
            });
        }
        let [[a, b], [c, d]] = self.m;
        let disc = ((a + d) * (a + d) - 4.0).sqrt();
        if c == 0.0 {
            // diag-like: fixed points b/(d - a) and ∞
            let finite = b / (d - a);
            return Ok(if a.abs() > d.abs() {
                (finite, f64::INFINITY)
            } else {
                (f64::INFINITY, finite)
            });
        }
        let x1 = (a - d + disc) / (2.0 * c);
        let x2 = (a - d - disc) / (2.0 * c);
        // derivative at a fixed point is (c x + d)^-2
        if (c * x1 + d).abs() > 1.0 {
            Ok((x2, x1))
        } else {
            Ok((x1, x2))
        }
    }
}

/// Translation length of a hyperbolic isometry, `2 arccosh(|tr| / 2)`.
pub fn trace_length(m: &Isometry) -> Result<f64> {
    let t = m.trace().abs();
    if t <= 2.0 + TRACE_TOLERANCE {
        return Err(Error::NotHyperbolic { trace: t });
    }
    Ok(2.0 * (0.5 * t).acosh())
}

/// A solved right-angled hexagon: alternate sides `a`, `a_prime`, `c` and
/// the side `w` joining `a` to `a_prime` (opposite to `c`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexagonData {
    pub a: f64,
    pub a_prime: f64,
    pub w: f64,
    pub c: f64,
}

impl HexagonData {
    pub fn solve(a: f64, a_prime: f64, w: f64) -> Result<Self> {
        let c = hexagon_opposite(a, a_prime, w)?;
        Ok(Self { a, a_prime, w, c })
    }

    /// Relative residual of `cosh c + cosh a cosh a' = sinh a sinh a' cosh w`.
    pub fn residual(&self) -> f64 {
        let lhs = self.c.cosh() + self.a.cosh() * self.a_prime.cosh();
        let rhs = self.a.sinh() * self.a_prime.sinh() * self.w.cosh();
        (lhs - rhs).abs() / rhs.abs().max(1.0)
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
    }
    Ok(())
}

/// Third alternate side of a right-angled hexagon:
/// `cosh c = sinh a sinh a' cosh w − cosh a cosh a'`.
pub fn hexagon_opposite(a: f64, a_prime: f64, w: f64) -> Result<f64> {
    check_positive("a", a)?;
    check_positive("a'", a_prime)?;
    check_positive("w", w)?;
    if a.max(a_prime).max(w) <= LOG_SPACE_THRESHOLD {
        let main = a.sinh() * a_prime.sinh() * w.cosh();
        let arg = main - a.cosh() * a_prime.cosh();
        if arg < 1.0 {
            if 1.0 - arg <= 1e-12 * main.max(1.0) {
                return Ok(0.0);
            }
            return Err(Error::Degenerate(format!(
                "no right-angled hexagon with a={a}, a'={a_prime}, w={w} (cosh c = {arg})"
            )));
        }
        return Ok(arg.acosh());
    }
    let l_main = log_sinh(a) + log_sinh(a_prime) + log_cosh(w);
    let l_sub = log_cosh(a) + log_cosh(a_prime);
    if l_sub >= l_main {
        return Err(Error::Degenerate(format!(
            "no right-angled hexagon with a={a}, a'={a_prime}, w={w}"
        )));
    }
    let l_arg = l_main + (-(l_sub - l_main).exp()).ln_1p();
    if l_arg < 0.0 {
        return Err(Error::Degenerate(format!(
            "no right-angled hexagon with a={a}, a'={a_prime}, w={w}"
        )));
    }
    Ok(acosh_from_log(l_arg))
}

/// Side of a right-angled pentagon opposite to the vertex where sides `u`
/// and `a` meet: `cosh c = sinh u sinh a`.
pub fn pentagon_side(u: f64, a: f64) -> Result<f64> {
    check_positive("u", u)?;
    check_positive("a", a)?;
    let l_arg = log_sinh(u) + log_sinh(a);
    if l_arg < 0.0 {
        if l_arg > -1e-12 {
            return Ok(0.0);
        }
        return Err(Error::Degenerate(format!(
            "no right-angled pentagon with u={u}, a={a} (sinh u sinh a < 1)"
        )));
    }
    if u.max(a) <= LOG_SPACE_THRESHOLD {
        Ok((u.sinh() * a.sinh()).max(1.0).acosh())
    } else {
        Ok(acosh_from_log(l_arg))
    }
}

/// Inverse of [`pentagon_side`] in its first argument: the `u` with
/// `sinh u sinh a = cosh c`.
pub fn pentagon_adjacent(c: f64, a: f64) -> Result<f64> {
    check_positive("a", a)?;
    if !(c >= 0.0) {
        return Err(Error::InvalidParameter(format!("c = {c} must be non-negative")));
    }
    let lx = log_cosh(c) - log_sinh(a);
    Ok(asinh_from_log(lx))
}

/// Half-width of the collar about a geodesic of length `core` whose boundary
/// equidistant curves have length `boundary`: `core · cosh d = boundary`.
pub fn collar_half_width(core: f64, boundary: f64) -> Result<f64> {
    check_positive("core length", core)?;
    if core >= boundary {
        return Err(Error::CollarEmpty { core, boundary });
    }
    Ok((boundary / core).acosh())
}

/// Distance between two points given in Fermi coordinates about a geodesic:
/// signed offsets `d1`, `d2` (left of the oriented axis positive) and axis
/// displacement `du` between their feet.
///
/// Evaluated as `sinh²(D/2) = sinh²((d1−d2)/2) + cosh d1 cosh d2 sinh²(du/2)`,
/// which equals `cosh D = cosh d1 cosh d2 cosh du − sinh d1 sinh d2` and has
/// no cancellation.
pub fn fermi_distance(d1: f64, d2: f64, du: f64) -> f64 {
    let du = du.abs();
    let half_gap = 0.5 * (d1 - d2).abs();
    if d1.abs().max(d2.abs()).max(du) <= LOG_SPACE_THRESHOLD {
        let s = half_gap.sinh();
        let t = (0.5 * du).sinh();
        let v = s * s + d1.cosh() * d2.cosh() * t * t;
        return 2.0 * v.sqrt().asinh();
    }
    let l_gap = if half_gap > 0.0 {
        2.0 * log_sinh(half_gap)
    } else {
        f64::NEG_INFINITY
    };
    let l_twist = if du > 0.0 {
        log_cosh(d1) + log_cosh(d2) + 2.0 * log_sinh(0.5 * du)
    } else {
        f64::NEG_INFINITY
    };
    let lv = log_add_exp(l_gap, l_twist);
    if lv == f64::NEG_INFINITY {
        return 0.0;
    }
    2.0 * asinh_from_log(0.5 * lv)
}

/// How the arc sits relative to the thick component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArcToCurveCase {
    /// Endpoints on distinct boundary curves of lengths `core` and `core_other`.
    TwoBoundary { core: f64, core_other: f64, arc: f64 },
    /// Both endpoints on one boundary curve of length `core`; `foot` is the
    /// pentagon edge along that curve, in `[core/4, core/2]`.
    OneBoundary { core: f64, foot: f64, arc: f64 },
}

/// Whether the thick component containing the arc is a pair of pants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentKind {
    PairOfPants,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcToCurveBound {
    /// Length of the closed curve built from the arc.
    pub curve_length: f64,
    pub gap: f64,
    pub bound: f64,
}

/// Length of the closed curve obtained by replacing a perpendicular arc in a
/// thick component with the boundary of a regular neighbourhood of the arc
/// and the boundary curves it meets, and the additive gap between the two.
///
/// Two-boundary arcs go through a right-angled hexagon (gap `|ĉ/2 − b|`,
/// bound `2 ln(1/ε₀) + 4 ln 2`); one-boundary arcs through a right-angled
/// pentagon (gap `|ĉ/2 − b/2|`, bound `ln(1/ε₀) + 4 ln 2`).
pub fn arc_to_curve_bound(
    case: ArcToCurveCase,
    component: ComponentKind,
    eps0: f64,
) -> Result<ArcToCurveBound> {
    if component == ComponentKind::PairOfPants {
        return Err(Error::PantsCase);
    }
    check_positive("eps0", eps0)?;
    if eps0 >= MARGULIS {
        return Err(Error::InvalidParameter(format!(
            "eps0 = {eps0} must be below the Margulis constant"
        )));
    }
    let short_enough = |l: f64| -> Result<()> {
        check_positive("boundary length", l)?;
        if 2.0 * l >= eps0 {
            return Err(Error::InvalidParameter(format!(
                "boundary length {l} violates eps0/eps1 > 2"
            )));
        }
        Ok(())
    };
    let k = 4.0 * LN_2;
    match case {
        ArcToCurveCase::TwoBoundary {
            core,
            core_other,
            arc,
        } => {
            short_enough(core)?;
            short_enough(core_other)?;
            check_positive("arc length", arc)?;
            let d = collar_half_width(core, eps0)?;
            let d_other = collar_half_width(core_other, eps0)?;
            let c = hexagon_opposite(0.5 * core, 0.5 * core_other, arc + d + d_other)?;
            let gap = (c - arc).abs();
            let bound = 2.0 * (1.0 / eps0).ln() + k;
            if gap > bound {
                return Err(Error::BoundViolated { gap, bound });
            }
            Ok(ArcToCurveBound {
                curve_length: 2.0 * c,
                gap,
                bound,
            })
        }
        ArcToCurveCase::OneBoundary { core, foot, arc } => {
            short_enough(core)?;
            check_positive("arc length", arc)?;
            if foot < 0.25 * core || foot > 0.5 * core {
                return Err(Error::InvalidParameter(format!(
                    "pentagon foot {foot} outside [core/4, core/2]"
                )));
            }
            let d = collar_half_width(core, eps0)?;
            let c = pentagon_side(0.5 * arc + d, foot)?;
            let gap = (c - 0.5 * arc).abs();
            let bound = (1.0 / eps0).ln() + k;
            if gap > bound {
                return Err(Error::BoundViolated { gap, bound });
            }
            Ok(ArcToCurveBound {
                curve_length: 2.0 * c,
                gap,
                bound,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn diagonal_translation_length() {
        let e = std::f64::consts::E;
        let m = Isometry::new([[e, 0.0], [0.0, 1.0 / e]]).unwrap();
        assert_abs_diff_eq!(trace_length(&m).unwrap(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn identity_is_not_hyperbolic() {
        assert!(matches!(
            trace_length(&Isometry::identity()),
            Err(Error::NotHyperbolic { .. })
        ));
        assert_eq!(Isometry::identity().kind(), IsometryKind::Parabolic);
    }

    #[test]
    fn composition_keeps_unit_determinant() {
        let mut g = Isometry::new([[2.0, 1.0], [3.0, 2.5]]).unwrap();
        let h = Isometry::new([[1.1, -0.3], [0.7, 0.8]]).unwrap();
        for _ in 0..200 {
            g = g.compose(&h);
            assert!((g.det() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn classification_by_trace() {
        let rot = Isometry::new([[0.0, -1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(rot.kind(), IsometryKind::Elliptic);
        let par = Isometry::new([[1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert_eq!(par.kind(), IsometryKind::Parabolic);
        assert_eq!(Isometry::axial_translation(0.5).kind(), IsometryKind::Hyperbolic);
    }

    #[test]
    fn hexagon_boundary_case_gives_zero() {
        let (a, ap) = (0.7_f64, 0.4_f64);
        let w = ((1.0 + a.cosh() * ap.cosh()) / (a.sinh() * ap.sinh())).acosh();
        let c = hexagon_opposite(a, ap, w).unwrap();
        assert!(c < 1e-5, "c = {c}");
    }

    #[test]
    fn hexagon_thin_instance_residual() {
        let h = HexagonData::solve(0.05, 0.05, 10.0).unwrap();
        assert!(h.residual() <= 1e-9);
        assert!(h.c > 0.0);
    }

    #[test]
    fn hexagon_rejects_impossible_input() {
        assert!(matches!(
            hexagon_opposite(0.1, 0.1, 1.0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn hexagon_log_space_matches_direct_near_threshold() {
        let direct = hexagon_opposite(0.3, 0.2, 599.0).unwrap();
        let logged = hexagon_opposite(0.3, 0.2, 601.0).unwrap();
        assert_abs_diff_eq!(logged - direct, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn pentagon_boundary_case_and_residual() {
        let a = 0.3_f64;
        let u = (1.0 / a.sinh()).asinh();
        assert!(pentagon_side(u, a).unwrap() < 1e-6);
        let c = pentagon_side(5.0, 0.05).unwrap();
        let res = (c.cosh() - 5.0_f64.sinh() * 0.05_f64.sinh()).abs();
        assert!(res <= 1e-9 * c.cosh());
        assert!(pentagon_side(0.1, 0.1).is_err());
    }

    #[test]
    fn collar_examples() {
        let d = collar_half_width(0.05, 0.2).unwrap();
        assert_abs_diff_eq!(d, 4.0_f64.acosh(), epsilon = 1e-15);
        assert!(collar_half_width(0.2 - 1e-12, 0.2).unwrap() < 1e-5);
        assert!(matches!(
            collar_half_width(0.3, 0.2),
            Err(Error::CollarEmpty { .. })
        ));
    }

    #[test]
    fn fermi_trivial_cases() {
        assert_abs_diff_eq!(fermi_distance(0.0, 0.0, 1.7), 1.7, epsilon = 1e-14);
        assert_eq!(fermi_distance(0.8, 0.8, 0.0), 0.0);
        assert_abs_diff_eq!(fermi_distance(1.2, -1.2, 0.0), 2.4, epsilon = 1e-14);
    }

    #[test]
    fn fermi_log_space_is_continuous() {
        let below = fermi_distance(3.0, -3.0, 599.999);
        let above = fermi_distance(3.0, -3.0, 600.001);
        assert_abs_diff_eq!(above - below, 0.002, epsilon = 1e-9);
    }

    #[test]
    fn arc_to_curve_two_boundary() {
        let r = arc_to_curve_bound(
            ArcToCurveCase::TwoBoundary {
                core: 0.02,
                core_other: 0.02,
                arc: 30.0,
            },
            ComponentKind::Other,
            0.2,
        )
        .unwrap();
        assert!(r.gap <= 2.0 * 5.0_f64.ln() + 4.0 * LN_2);
        let d = collar_half_width(0.02, 0.2).unwrap();
        let c = hexagon_opposite(0.01, 0.01, 30.0 + 2.0 * d).unwrap();
        assert_eq!(r.curve_length, 2.0 * c);
    }

    #[test]
    fn arc_to_curve_one_boundary() {
        for foot in [0.005, 0.0075, 0.01] {
            let r = arc_to_curve_bound(
                ArcToCurveCase::OneBoundary {
                    core: 0.02,
                    foot,
                    arc: 40.0,
                },
                ComponentKind::Other,
                0.2,
            )
            .unwrap();
            assert!(r.gap <= 5.0_f64.ln() + 4.0 * LN_2);
        }
    }

    #[test]
    fn arc_to_curve_rejects_pants() {
        let case = ArcToCurveCase::TwoBoundary {
            core: 0.02,
            core_other: 0.02,
            arc: 30.0,
        };
        assert_eq!(
            arc_to_curve_bound(case, ComponentKind::PairOfPants, 0.2),
            Err(Error::PantsCase)
        );
    }
}
