//! The seventeen qualitative types of rotational surfaces in a class, the
//! atlas of types a class admits, and the halfspace predicate.

use serde::Serialize;

use crate::phase::{Component, End, GLimit, Membership, PhaseError, PhaseMap, PhasePoint};
use crate::profile::{bounded_height, LambdaSide, ProfileError};
use crate::wclass::{EndValue, TriState, WeingartenClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Label {
    Plane,
    Sphere,
    Cylinder,
    SpecialUnduloid,
    SpecialNodoid,
    SpecialCatenoidBounded,
    SpecialCatenoidUnbounded,
    Football,
    Bracelet,
    PinchedUnduloid,
    SingularUnduloid,
    PinchedNodoid,
    SingularNodoid,
    PinchedCatenoidBounded,
    PinchedCatenoidUnbounded,
    SingularCatenoidBounded,
    SingularCatenoidUnbounded,
}

impl Label {
    pub const ALL: [Label; 17] = [
        Label::Plane,
        Label::Sphere,
        Label::Cylinder,
        Label::SpecialUnduloid,
        Label::SpecialNodoid,
        Label::SpecialCatenoidBounded,
        Label::SpecialCatenoidUnbounded,
        Label::Football,
        Label::Bracelet,
        Label::PinchedUnduloid,
        Label::SingularUnduloid,
        Label::PinchedNodoid,
        Label::SingularNodoid,
        Label::PinchedCatenoidBounded,
        Label::PinchedCatenoidUnbounded,
        Label::SingularCatenoidBounded,
        Label::SingularCatenoidUnbounded,
    ];

    /// Name of the natural parameter, if the type comes in a family.
    pub fn parameter_name(self) -> Option<&'static str> {
        use Label::*;
        match self {
            Plane | Sphere | Cylinder => None,
            SpecialUnduloid | SpecialNodoid | SpecialCatenoidBounded | SpecialCatenoidUnbounded => Some("tau"),
            Football | PinchedUnduloid | PinchedNodoid | PinchedCatenoidBounded | PinchedCatenoidUnbounded => {
                Some("nu")
            }
            SingularUnduloid | SingularNodoid | SingularCatenoidBounded | SingularCatenoidUnbounded => Some("d"),
            Bracelet => Some("x0"),
        }
    }

    pub fn is_singular(self) -> bool {
        use Label::*;
        matches!(
            self,
            Football
                | Bracelet
                | PinchedUnduloid
                | SingularUnduloid
                | PinchedNodoid
                | SingularNodoid
                | PinchedCatenoidBounded
                | PinchedCatenoidUnbounded
                | SingularCatenoidBounded
                | SingularCatenoidUnbounded
        )
    }
}

/// A classified orbit: its type, the value of the family parameter and, for
/// catenoid types, the side of `lambda = 0` it lives on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceType {
    pub label: Label,
    pub parameter: Option<f64>,
    pub side: Option<LambdaSide>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TaxonomyError {
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("the bounded/unbounded height alternative is undetermined")]
    UndeterminedHeight,
    #[error("orbit does not reach the boundary on the side of its neck")]
    NoNeck,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    #[serde(rename = "G_inf")]
    pub g_inf: GLimit,
    #[serde(rename = "G_b")]
    pub g_b: GLimit,
    /// `g'(0)` when `0` lies in the domain of `g`.
    pub m: Option<f64>,
    pub alpha: f64,
    pub b: EndValue,
    pub uniformly_elliptic: TriState,
}

pub fn diagnostics(pm: &PhaseMap<'_>) -> Result<Diagnostics, TaxonomyError> {
    let class = pm.class();
    let m = if class.alpha() <= 0.0 {
        class.g_prime(0.0).ok().filter(|m| m.is_finite())
    } else {
        None
    };
    Ok(Diagnostics {
        g_inf: pm.g_limit(End::PlusInfinity)?,
        g_b: pm.g_limit(End::AtB)?,
        m,
        alpha: class.alpha(),
        b: class.b(),
        uniformly_elliptic: class.is_uniformly_elliptic(),
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

fn side_of(comp: Component) -> LambdaSide {
    match comp {
        Component::Upper => LambdaSide::LambdaPositive,
        Component::Lower => LambdaSide::LambdaNegative,
    }
}

fn height_split(class: &WeingartenClass, side: LambdaSide, bounded: Label, unbounded: Label) -> Result<Label, TaxonomyError> {
    match bounded_height(class, side)? {
        TriState::Yes => Ok(bounded),
        TriState::No => Ok(unbounded),
        TriState::Undetermined => Err(TaxonomyError::UndeterminedHeight),
    }
}

/// Necksize: the smallest radius along a regular orbit, reached at its
/// boundary point of largest `lambda` (upper component) or smallest
/// `lambda` (lower component).
pub fn necksize(pm: &PhaseMap<'_>, start: &PhasePoint) -> Result<f64, TaxonomyError> {
    let (below, above) = pm.gamma_crossings(start)?;
    let lam = match pm.component(start.lambda)? {
        Component::Upper => above,
        Component::Lower => below,
    };
    lam.map(|l| 1.0 / l.abs()).ok_or(TaxonomyError::NoNeck)
}

/// Type of the rotational surface generated by the orbit through `start`.
pub fn classify_orbit(class: &WeingartenClass, start: &PhasePoint) -> Result<SurfaceType, TaxonomyError> {
    classify_orbit_with(&PhaseMap::new(class), start)
}

pub fn classify_orbit_with(pm: &PhaseMap<'_>, start: &PhasePoint) -> Result<SurfaceType, TaxonomyError> {
    let class = pm.class();
    let alpha = class.alpha();
    let plain = |label| SurfaceType {
        label,
        parameter: None,
        side: None,
    };
    if start.x <= 0.0 || (start.lambda * start.x).powi(2) > 1.0 + 1e-12 {
        return Err(PhaseError::OutsideRegion {
            x: start.x,
            lambda: start.lambda,
        }
        .into());
    }
    if close(start.lambda, alpha) {
        return Ok(plain(if alpha == 0.0 { Label::Plane } else { Label::Sphere }));
    }
    if let Some(rho) = pm.rho()? {
        if close(start.lambda, rho) && close(start.x * rho.abs(), 1.0) {
            return Ok(plain(Label::Cylinder));
        }
    }
    let comp = pm.component(start.lambda)?;
    let b = class.b();
    let with = |label, parameter: f64, side| SurfaceType {
        label,
        parameter: Some(parameter),
        side,
    };

    if b.is_finite() && b.value() >= 0.0 {
        return Ok(match comp {
            Component::Upper => with(Label::Football, pm.limit_angle(start)?.abs(), None),
            Component::Lower => with(Label::Bracelet, pm.x_at_b(start.x, start.lambda)?, None),
        });
    }

    let membership = pm.sing_membership(start)?;
    if alpha == 0.0 {
        let side = side_of(comp);
        return Ok(match membership {
            Membership::SingPlus => {
                let l = height_split(class, side, Label::PinchedCatenoidBounded, Label::PinchedCatenoidUnbounded)?;
                with(l, pm.limit_angle(start)?.abs(), Some(side))
            }
            Membership::SingMinus if !b.is_finite() => {
                let l = height_split(class, side, Label::PinchedCatenoidBounded, Label::PinchedCatenoidUnbounded)?;
                with(l, pm.limit_angle(start)?.abs(), Some(side))
            }
            Membership::SingMinus => {
                let l = height_split(class, side, Label::SingularCatenoidBounded, Label::SingularCatenoidUnbounded)?;
                with(l, pm.x_at_b(start.x, start.lambda)?, Some(side))
            }
            Membership::Regular => {
                let l = height_split(class, side, Label::SpecialCatenoidBounded, Label::SpecialCatenoidUnbounded)?;
                with(l, necksize(pm, start)?, Some(side))
            }
        });
    }

    // alpha != 0 and b < 0: the component around the cylinder value carries
    // the unduloids.
    let unduloid = unduloid_component(alpha) == comp;
    let (special, pinched, singular) = if unduloid {
        (Label::SpecialUnduloid, Label::PinchedUnduloid, Label::SingularUnduloid)
    } else {
        (Label::SpecialNodoid, Label::PinchedNodoid, Label::SingularNodoid)
    };
    Ok(match membership {
        Membership::SingPlus => with(pinched, pm.limit_angle(start)?.abs(), None),
        Membership::SingMinus if !b.is_finite() => with(pinched, pm.limit_angle(start)?.abs(), None),
        Membership::SingMinus => with(singular, pm.x_at_b(start.x, start.lambda)?, None),
        Membership::Regular => with(special, necksize(pm, start)?, None),
    })
}

/// Component containing the cylinder value `rho` when `alpha != 0`.
fn unduloid_component(alpha: f64) -> Component {
    if alpha > 0.0 {
        Component::Upper
    } else {
        Component::Lower
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamRange {
    pub name: &'static str,
    pub lo: f64,
    /// `None` for `+inf`.
    pub hi: Option<f64>,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl ParamRange {
    fn open(name: &'static str, lo: f64, hi: Option<f64>) -> Self {
        ParamRange {
            name,
            lo,
            hi,
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        let above = if self.lo_closed { v >= self.lo } else { v > self.lo };
        let below = match self.hi {
            None => true,
            Some(h) if self.hi_closed => v <= h,
            Some(h) => v < h,
        };
        above && below
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Existence {
    Exists,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AtlasEntry {
    pub label: Label,
    pub range: Option<ParamRange>,
    pub side: Option<LambdaSide>,
    pub existence: Existence,
}

/// Qualitative data of a class from which its atlas follows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtlasInputs {
    pub alpha: f64,
    pub b: EndValue,
    /// `1/|rho|` for the cylinder, when `alpha != 0` and `b < 0`.
    pub cylinder_radius: Option<f64>,
    pub g_inf: GLimit,
    pub g_b: GLimit,
    pub bounded_pos: TriState,
    pub bounded_neg: TriState,
}

fn finiteness(l: GLimit) -> Option<Existence> {
    match l {
        GLimit::Finite { .. } => Some(Existence::Exists),
        GLimit::Infinite => None,
        GLimit::Undetermined => Some(Existence::Undetermined),
    }
}

/// Pure decision table behind [`atlas`].
pub fn atlas_from(inp: &AtlasInputs) -> Vec<AtlasEntry> {
    let mut out = Vec::new();
    let mut push = |label, range, side, existence| {
        out.push(AtlasEntry {
            label,
            range,
            side,
            existence,
        })
    };
    let sure = Existence::Exists;
    let nu = ParamRange::open("nu", 0.0, Some(1.0));
    let b = inp.b.value();
    let inv_abs_b = if b.is_finite() && b != 0.0 { Some(1.0 / b.abs()) } else { None };

    if inp.b.is_finite() && b >= 0.0 {
        push(Label::Sphere, None, None, sure);
        push(Label::Football, Some(nu), None, sure);
        push(Label::Bracelet, Some(ParamRange::open("x0", 0.0, inv_abs_b)), None, sure);
        return out;
    }

    let d_range = inv_abs_b.map(|h| ParamRange {
        name: "d",
        lo: 0.0,
        hi: Some(h),
        lo_closed: false,
        hi_closed: true,
    });

    if inp.alpha == 0.0 {
        push(Label::Plane, None, None, sure);
        let tau = ParamRange::open("tau", 0.0, None);
        for (side, bounded) in [
            (LambdaSide::LambdaPositive, inp.bounded_pos),
            (LambdaSide::LambdaNegative, inp.bounded_neg),
        ] {
            let pick = |yes, no| match bounded {
                TriState::Yes => (yes, sure),
                TriState::No => (no, sure),
                TriState::Undetermined => (no, Existence::Undetermined),
            };
            let (l, e) = pick(Label::SpecialCatenoidBounded, Label::SpecialCatenoidUnbounded);
            push(l, Some(tau), Some(side), e);
            let end_limit = match side {
                LambdaSide::LambdaPositive => Some(inp.g_inf),
                LambdaSide::LambdaNegative if !inp.b.is_finite() => Some(inp.g_b),
                LambdaSide::LambdaNegative => None,
            };
            match end_limit {
                Some(lim) => {
                    if let Some(e2) = finiteness(lim) {
                        let (l, e) = pick(Label::PinchedCatenoidBounded, Label::PinchedCatenoidUnbounded);
                        push(l, Some(nu), Some(side), worst(e, e2));
                    }
                }
                None => {
                    let (l, e) = pick(Label::SingularCatenoidBounded, Label::SingularCatenoidUnbounded);
                    push(l, d_range, Some(side), e);
                }
            }
        }
        return out;
    }

    push(Label::Sphere, None, None, sure);
    push(Label::Cylinder, None, None, sure);
    let rho_inv = inp.cylinder_radius.unwrap_or(f64::NAN);
    let minus_inv_b = if b.is_finite() { -1.0 / b } else { 0.0 };
    let (und_range, nod_range) = if inp.alpha > 0.0 {
        (
            ParamRange::open("tau", 0.0, Some(rho_inv)),
            ParamRange::open("tau", minus_inv_b, None),
        )
    } else {
        (
            ParamRange::open("tau", minus_inv_b, Some(rho_inv)),
            ParamRange::open("tau", 0.0, None),
        )
    };
    push(Label::SpecialUnduloid, Some(und_range), None, sure);
    push(Label::SpecialNodoid, Some(nod_range), None, sure);
    let upper_unduloid = unduloid_component(inp.alpha) == Component::Upper;
    let (up_pinched, low_pinched, low_singular) = if upper_unduloid {
        (Label::PinchedUnduloid, Label::PinchedNodoid, Label::SingularNodoid)
    } else {
        (Label::PinchedNodoid, Label::PinchedUnduloid, Label::SingularUnduloid)
    };
    if let Some(e) = finiteness(inp.g_inf) {
        push(up_pinched, Some(nu), None, e);
    }
    if inp.b.is_finite() {
        push(low_singular, d_range, None, sure);
    } else if let Some(e) = finiteness(inp.g_b) {
        push(low_pinched, Some(nu), None, e);
    }
    out
}

fn worst(a: Existence, b: Existence) -> Existence {
    if a == Existence::Exists && b == Existence::Exists {
        Existence::Exists
    } else {
        Existence::Undetermined
    }
}

/// Every type of rotational surface the class admits, with parameter ranges.
pub fn atlas(class: &WeingartenClass) -> Result<Vec<AtlasEntry>, TaxonomyError> {
    let pm = PhaseMap::new(class);
    let (bounded_pos, bounded_neg) = if class.alpha() == 0.0 {
        (
            bounded_height(class, LambdaSide::LambdaPositive)?,
            bounded_height(class, LambdaSide::LambdaNegative)?,
        )
    } else {
        (TriState::Undetermined, TriState::Undetermined)
    };
    let b = class.b();
    let needs_limits = !(b.is_finite() && b.value() >= 0.0);
    let (g_inf, g_b) = if needs_limits {
        (pm.g_limit(End::PlusInfinity)?, pm.g_limit(End::AtB)?)
    } else {
        (GLimit::Undetermined, GLimit::Undetermined)
    };
    let cylinder_radius = pm.cylinder_point()?.map(|p| p.x);
    Ok(atlas_from(&AtlasInputs {
        alpha: class.alpha(),
        b,
        cylinder_radius,
        g_inf,
        g_b,
        bounded_pos,
        bounded_neg,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NecessaryFailure {
    G0Nonzero,
    SlopeNotMinusOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Witness {
    /// First non-vanishing derivative of `g` at `0` beyond the first.
    FiniteOrder { order: usize },
    /// Constant sign of `t + g(t)` on `(0, eps]`; `0` when it vanishes.
    SignCondition { sign: i8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HalfspaceVerdict {
    HoldsSufficient { witness: Witness },
    FailsNecessary { reason: NecessaryFailure },
    Undetermined,
}

/// Whether properly immersed surfaces of the class contained in a halfspace
/// must be planes.
pub fn halfspace_verdict(class: &WeingartenClass) -> HalfspaceVerdict {
    if class.alpha().abs() > 1e-10 {
        return HalfspaceVerdict::FailsNecessary {
            reason: NecessaryFailure::G0Nonzero,
        };
    }
    let Ok(m) = class.g_prime(0.0) else {
        return HalfspaceVerdict::Undetermined;
    };
    if (m + 1.0).abs() > 1e-9 {
        return HalfspaceVerdict::FailsNecessary {
            reason: NecessaryFailure::SlopeNotMinusOne,
        };
    }
    if let Some(g) = class.g_expr() {
        let mut d = g.differentiate();
        for order in 2..=8 {
            d = d.differentiate();
            match d.eval_at(0.0) {
                Ok(v) if v.is_finite() && v.abs() > 1e-6 => {
                    return HalfspaceVerdict::HoldsSufficient {
                        witness: Witness::FiniteOrder { order },
                    }
                }
                Ok(v) if v.is_finite() => {}
                _ => break,
            }
        }
    }
    let eps = 1e-3;
    let (mut pos, mut neg) = (false, false);
    for i in 1..=64 {
        let t = eps * i as f64 / 64.0;
        let Ok(g) = class.g(t) else {
            return HalfspaceVerdict::Undetermined;
        };
        let v = t + g;
        if v.abs() <= 4.0 * f64::EPSILON * t {
            continue;
        }
        if v > 0.0 {
            pos = true;
        } else {
            neg = true;
        }
    }
    match (pos, neg) {
        (true, true) => HalfspaceVerdict::Undetermined,
        (p, n) => HalfspaceVerdict::HoldsSufficient {
            witness: Witness::SignCondition {
                sign: p as i8 - n as i8,
            },
        },
    }
}
