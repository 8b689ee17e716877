//! Canonical equation families, parameters, branches and sectors.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::ExactScalar;
use crate::scalar::{Field, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// P_III with gamma = 1, delta = -1.
    P3i,
    /// P_III with alpha = 1, gamma = 0, delta = -1.
    P3ii,
    /// P_IV written through (kappa_0, kappa_inf).
    P4,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::P3i => "p3i",
            Family::P3ii => "p3ii",
            Family::P4 => "p4",
        }
    }

    /// Valid branch indices.
    pub fn branch_range(self) -> std::ops::RangeInclusive<u32> {
        match self {
            Family::P3i => 0..=3,
            Family::P3ii => 0..=2,
            Family::P4 => 1..=4,
        }
    }

    pub fn sector_k_range(self) -> std::ops::RangeInclusive<i32> {
        match self {
            Family::P3i => 0..=1,
            Family::P3ii | Family::P4 => 0..=3,
        }
    }

    pub fn all() -> [Family; 3] {
        [Family::P3i, Family::P3ii, Family::P4]
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "p3i" | "p3-i" | "piii-i" => Ok(Family::P3i),
            "p3ii" | "p3-ii" | "piii-ii" => Ok(Family::P3ii),
            "p4" | "piv" => Ok(Family::P4),
            _ => Err(Error::Invalid(format!("unknown family {s:?}"))),
        }
    }
}

/// A parameter value: exact Gaussian rational when available, otherwise a
/// plain complex float.
#[derive(Clone, PartialEq)]
pub enum Param {
    Exact(ExactScalar),
    Float(C64),
}

impl fmt::Debug for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Exact(e) => write!(f, "{e}"),
            Param::Float(z) => write!(f, "{z}"),
        }
    }
}

impl Param {
    pub fn int(n: i64) -> Param {
        Param::Exact(ExactScalar::from_ratio(n, 1))
    }

    pub fn ratio(n: i64, d: i64) -> Param {
        Param::Exact(ExactScalar::from_ratio(n, d))
    }

    pub fn to_c64(&self) -> C64 {
        match self {
            Param::Exact(e) => e.to_complex64(),
            Param::Float(z) => *z,
        }
    }

    pub fn exact(&self) -> Option<&ExactScalar> {
        match self {
            Param::Exact(e) => Some(e),
            Param::Float(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Param::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Param::Exact(e) => e.is_zero(),
            Param::Float(z) => *z == C64::new(0.0, 0.0),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Param::Exact(_) => true,
            Param::Float(z) => z.re.is_finite() && z.im.is_finite(),
        }
    }

    /// Convert into any recurrence backend; `None` only when a float value
    /// is requested in the exact field.
    pub fn to_field<S: Field>(&self) -> Option<S> {
        match self {
            Param::Exact(e) => Some(S::from_exact(e)),
            Param::Float(z) => S::from_c64(*z),
        }
    }

    fn combine(
        &self,
        other: &Param,
        exact: impl Fn(&ExactScalar, &ExactScalar) -> ExactScalar,
        float: impl Fn(C64, C64) -> C64,
    ) -> Param {
        match (self, other) {
            (Param::Exact(a), Param::Exact(b)) => Param::Exact(exact(a, b)),
            _ => Param::Float(float(self.to_c64(), other.to_c64())),
        }
    }

    pub fn add(&self, o: &Param) -> Param {
        self.combine(o, |a, b| a + b, |a, b| a + b)
    }

    pub fn sub(&self, o: &Param) -> Param {
        self.combine(o, |a, b| a - b, |a, b| a - b)
    }

    pub fn mul(&self, o: &Param) -> Param {
        self.combine(o, |a, b| a * b, |a, b| a * b)
    }

    pub fn neg(&self) -> Param {
        Param::int(0).sub(self)
    }

    /// Exact decimal/rational strings parse exactly; anything else that
    /// parses as a float falls back to the floating representation.
    pub fn parse(s: &str) -> Result<Param> {
        match s.parse::<ExactScalar>() {
            Ok(e) => Ok(Param::Exact(e)),
            Err(_) => match s.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(Param::Float(C64::new(v, 0.0))),
                _ => Err(Error::BadParameter(s.to_string())),
            },
        }
    }

    pub fn export_strings(&self) -> [String; 2] {
        match self {
            Param::Exact(e) => e.export_strings(),
            Param::Float(z) => [format!("{:e}", z.re), format!("{:e}", z.im)],
        }
    }
}

impl From<ExactScalar> for Param {
    fn from(e: ExactScalar) -> Self {
        Param::Exact(e)
    }
}

/// Raw user-supplied parameters before canonical checks.
#[derive(Debug, Clone, Default)]
pub struct RawParams {
    pub alpha: Option<Param>,
    pub beta: Option<Param>,
    pub gamma: Option<Param>,
    pub delta: Option<Param>,
    pub kappa0: Option<Param>,
    pub kappa_inf: Option<Param>,
}

impl RawParams {
    pub fn p3(alpha: Param, beta: Param) -> Self {
        RawParams { alpha: Some(alpha), beta: Some(beta), ..Default::default() }
    }

    pub fn p4(kappa0: Param, kappa_inf: Param) -> Self {
        RawParams { kappa0: Some(kappa0), kappa_inf: Some(kappa_inf), ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamSet {
    P3 { alpha: Param, beta: Param },
    P4 { kappa0: Param, kappa_inf: Param },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquationSpec {
    family: Family,
    params: ParamSet,
}

impl EquationSpec {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    /// alpha of the second-order equation (derived for P4).
    pub fn alpha(&self) -> Param {
        match (&self.params, self.family) {
            (_, Family::P3ii) => Param::int(1),
            (ParamSet::P3 { alpha, .. }, _) => alpha.clone(),
            (ParamSet::P4 { kappa0, kappa_inf }, _) => {
                // alpha = -kappa0 + 2 kappa_inf + 1
                kappa_inf.add(kappa_inf).sub(kappa0).add(&Param::int(1))
            }
        }
    }

    /// beta of the second-order equation (derived for P4).
    pub fn beta(&self) -> Param {
        match &self.params {
            ParamSet::P3 { beta, .. } => beta.clone(),
            ParamSet::P4 { kappa0, .. } => Param::int(-2).mul(&kappa0.mul(kappa0)),
        }
    }

    pub fn gamma(&self) -> Option<Param> {
        match self.family {
            Family::P3i => Some(Param::int(1)),
            Family::P3ii => Some(Param::int(0)),
            Family::P4 => None,
        }
    }

    pub fn delta(&self) -> Option<Param> {
        match self.family {
            Family::P3i | Family::P3ii => Some(Param::int(-1)),
            Family::P4 => None,
        }
    }

    pub fn kappa0(&self) -> Option<Param> {
        match &self.params {
            ParamSet::P4 { kappa0, .. } => Some(kappa0.clone()),
            _ => None,
        }
    }

    pub fn kappa_inf(&self) -> Option<Param> {
        match &self.params {
            ParamSet::P4 { kappa_inf, .. } => Some(kappa_inf.clone()),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        match &self.params {
            ParamSet::P3 { alpha, beta } => alpha.is_exact() && beta.is_exact(),
            ParamSet::P4 { kappa0, kappa_inf } => kappa0.is_exact() && kappa_inf.is_exact(),
        }
    }

    /// The two free parameters in storage order: (alpha, beta) or
    /// (kappa0, kappa_inf).
    pub fn free_params(&self) -> [(&'static str, Param); 2] {
        match &self.params {
            ParamSet::P3 { alpha, beta } => [("alpha", alpha.clone()), ("beta", beta.clone())],
            ParamSet::P4 { kappa0, kappa_inf } => {
                [("kappa0", kappa0.clone()), ("kappa_inf", kappa_inf.clone())]
            }
        }
    }
}

pub fn make_equation(family: Family, raw: RawParams) -> Result<EquationSpec> {
    let nc = |detail: &str| Error::NonCanonicalParams { family: family.name(), detail: detail.to_string() };
    let all = [&raw.alpha, &raw.beta, &raw.gamma, &raw.delta, &raw.kappa0, &raw.kappa_inf];
    if all.iter().any(|p| p.as_ref().is_some_and(|p| !p.is_finite())) {
        return Err(Error::Invalid("parameters must be finite".into()));
    }
    let check_fixed = |given: &Option<Param>, want: i64, name: &str| -> Result<()> {
        match given {
            Some(p) if (p.to_c64() - C64::new(want as f64, 0.0)).norm() != 0.0 => {
                Err(nc(&format!("{name} must be {want}")))
            }
            _ => Ok(()),
        }
    };
    match family {
        Family::P3i | Family::P3ii => {
            if raw.kappa0.is_some() || raw.kappa_inf.is_some() {
                return Err(nc("kappa parameters belong to P4"));
            }
            let gamma = if family == Family::P3i { 1 } else { 0 };
            check_fixed(&raw.gamma, gamma, "gamma")?;
            check_fixed(&raw.delta, -1, "delta")?;
            let alpha = if family == Family::P3ii {
                check_fixed(&raw.alpha, 1, "alpha")?;
                Param::int(1)
            } else {
                raw.alpha.clone().unwrap_or(Param::int(0))
            };
            let beta = raw.beta.clone().unwrap_or(Param::int(0));
            Ok(EquationSpec { family, params: ParamSet::P3 { alpha, beta } })
        }
        Family::P4 => {
            if raw.alpha.is_some() || raw.beta.is_some() || raw.gamma.is_some() || raw.delta.is_some() {
                return Err(nc("P4 is parametrised by kappa0 and kappa_inf"));
            }
            let (Some(kappa0), Some(kappa_inf)) = (raw.kappa0.clone(), raw.kappa_inf.clone()) else {
                return Err(nc("P4 needs both kappa0 and kappa_inf"));
            };
            Ok(EquationSpec { family, params: ParamSet::P4 { kappa0, kappa_inf } })
        }
    }
}

/// Leading data of one formal solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub family: Family,
    pub m: u32,
    pub a0: Param,
    pub big_a0: Param,
    /// exponent of x multiplying the u-series
    pub p_u: Rational64,
    /// exponent of x multiplying the U-series
    pub p_big_u: Rational64,
    /// exponent decrement between consecutive terms
    pub step: Rational64,
    /// a0 or A0 vanishes: the corresponding series is identically zero
    pub trivial: bool,
}

impl Branch {
    pub fn step_f64(&self) -> f64 {
        *self.step.numer() as f64 / *self.step.denom() as f64
    }

    pub fn p_u_f64(&self) -> f64 {
        *self.p_u.numer() as f64 / *self.p_u.denom() as f64
    }

    pub fn label(&self) -> String {
        match self.family {
            Family::P4 => format!("p4 case {}", self.m),
            f => format!("{f} m={}", self.m),
        }
    }
}

pub fn branch(eq: &EquationSpec, m: u32) -> Result<Branch> {
    let family = eq.family();
    if !family.branch_range().contains(&m) {
        return Err(Error::BadBranchIndex { family: family.name(), m });
    }
    let r = |n: i64, d: i64| Rational64::new(n, d);
    let (a0, big_a0, p_u, p_big_u, step) = match family {
        Family::P3i => {
            let a0 = ExactScalar::root_of_unity_12(3 * m as i64);
            let big_a0 = -(&a0 * &a0);
            (Param::Exact(a0), Param::Exact(big_a0), r(0, 1), r(0, 1), r(1, 1))
        }
        Family::P3ii => {
            let a0 = ExactScalar::root_of_unity_12(4 * m as i64);
            let big_a0 = -a0.clone();
            (Param::Exact(a0), Param::Exact(big_a0), r(1, 3), r(-2, 3), r(2, 3))
        }
        Family::P4 => {
            let k0 = eq.kappa0().expect("P4 spec carries kappa0");
            let kinf = eq.kappa_inf().expect("P4 spec carries kappa_inf");
            let half = Param::ratio(1, 2);
            match m {
                1 => (Param::ratio(-2, 3), Param::ratio(1, 3), r(1, 1), r(1, 1), r(2, 1)),
                2 => (Param::int(-2), half.mul(&kinf).neg(), r(1, 1), r(-1, 1), r(2, 1)),
                3 => (k0, Param::int(1), r(-1, 1), r(1, 1), r(2, 1)),
                _ => (k0.neg(), half.mul(&kinf), r(-1, 1), r(-1, 1), r(2, 1)),
            }
        }
    };
    let trivial = a0.is_zero() || big_a0.is_zero();
    Ok(Branch { family, m, a0, big_a0, p_u, p_big_u, step, trivial })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorKind {
    /// S: existence of the one-parameter family
    Existence,
    /// Omega: uniqueness
    Uniqueness,
}

/// Angular region `theta_lo < arg x < theta_hi`, `|x| > r_min` on the
/// universal cover of the punctured plane. Angles are kept as rational
/// multiples of pi.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub lo_over_pi: (i64, i64),
    pub hi_over_pi: (i64, i64),
    pub r_min: f64,
    pub kind: SectorKind,
}

/// A point with an unreduced argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackedPoint {
    pub r: f64,
    pub theta: f64,
}

impl TrackedPoint {
    pub fn new(r: f64, theta: f64) -> Self {
        TrackedPoint { r, theta }
    }

    pub fn to_c64(self) -> C64 {
        C64::from_polar(self.r, self.theta)
    }
}

fn pi_times(q: Rational64) -> f64 {
    *q.numer() as f64 / *q.denom() as f64 * std::f64::consts::PI
}

impl Sector {
    fn from_ratios(lo: Rational64, hi: Rational64, r_min: f64, kind: SectorKind) -> Self {
        Sector {
            lo_over_pi: (*lo.numer(), *lo.denom()),
            hi_over_pi: (*hi.numer(), *hi.denom()),
            r_min,
            kind,
        }
    }

    pub fn lo_ratio(&self) -> Rational64 {
        Rational64::new(self.lo_over_pi.0, self.lo_over_pi.1)
    }

    pub fn hi_ratio(&self) -> Rational64 {
        Rational64::new(self.hi_over_pi.0, self.hi_over_pi.1)
    }

    pub fn theta_lo(&self) -> f64 {
        pi_times(self.lo_ratio())
    }

    pub fn theta_hi(&self) -> f64 {
        pi_times(self.hi_ratio())
    }

    pub fn span(&self) -> f64 {
        pi_times(self.hi_ratio() - self.lo_ratio())
    }

    pub fn bisector(&self) -> f64 {
        pi_times((self.lo_ratio() + self.hi_ratio()) / 2)
    }

    pub fn contains(&self, x: TrackedPoint) -> bool {
        self.r_min < x.r && self.theta_lo() < x.theta && x.theta < self.theta_hi()
    }

    /// Interval inclusion of the angular ranges on the cover.
    pub fn covers(&self, other: &Sector) -> bool {
        self.lo_ratio() <= other.lo_ratio() && other.hi_ratio() <= self.hi_ratio()
    }

    /// Inclusion after shifting `other` by some multiple of 2 pi; meaningful
    /// for single-valued equations.
    pub fn covers_mod_2pi(&self, other: &Sector) -> bool {
        (-4..=4).any(|j| {
            let shift = Rational64::from_integer(2 * j);
            self.lo_ratio() <= other.lo_ratio() + shift && other.hi_ratio() + shift <= self.hi_ratio()
        })
    }

    /// Same sector with `margin` radians removed from both edges.
    pub fn interior_range(&self, margin: f64) -> (f64, f64) {
        (self.theta_lo() + margin, self.theta_hi() - margin)
    }
}

pub fn sector(eq: &EquationSpec, m: u32, k: i32, kind: SectorKind, r_min: f64) -> Result<Sector> {
    let family = eq.family();
    if !family.branch_range().contains(&m) {
        return Err(Error::BadBranchIndex { family: family.name(), m });
    }
    if !family.sector_k_range().contains(&k) {
        return Err(Error::BadSectorIndex { family: family.name(), m, k });
    }
    if !(r_min >= 0.0) {
        return Err(Error::Invalid("r_min must be non-negative".into()));
    }
    let q = |n: i64, d: i64| Rational64::new(n, d);
    let kk = k as i64;
    let kq = Rational64::from_integer(kk);
    let (lo, hi) = match (family, kind) {
        (Family::P3i, SectorKind::Existence) => match m {
            0 | 2 => (q(-1, 2) + kq, q(1, 2) + kq),
            _ => (kq, kq + 1),
        },
        (Family::P3i, SectorKind::Uniqueness) => match m {
            0 | 2 => (q(-1, 2) + kq, q(3, 2) + kq),
            _ => (kq, kq + 2),
        },
        (Family::P3ii, _) => {
            let half_k = kq / 2;
            let (lo, hi) = match m {
                0 | 2 => (q(-3, 4) - half_k, q(3, 4) - half_k),
                _ => (q(1, 4) - half_k, q(7, 4) - half_k),
            };
            match kind {
                SectorKind::Existence => (lo, hi),
                // the y = x^{1/3} uniqueness sector has angle pi, i.e. 3 pi in x,
                // and shares its lower edge with the existence sector
                SectorKind::Uniqueness => (lo, lo + 3),
            }
        }
        (Family::P4, SectorKind::Existence) => match m {
            1 => (kq / 2, q(1, 2) + kq / 2),
            _ => (q(-1, 4) + kq / 2, q(1, 4) + kq / 2),
        },
        (Family::P4, SectorKind::Uniqueness) => match m {
            1 => (kq, kq + 2),
            _ => (q(-3, 4) + kq, q(5, 4) + kq),
        },
    };
    Ok(Sector::from_ratios(lo, hi, r_min, kind))
}

/// P3ii sectors from the y = x^{1/3} plane of the existence proof:
/// `(m/3 - 1/4) pi + k pi/2 < arg y < (m/3 + 1/4) pi + k pi/2` for S and
/// upper edge `(m/3 + 3/4) pi + k pi/2` for Omega, with arguments tripled
/// into the x-plane. These differ from `sector` for m = 2 and for k > 0.
pub fn p3ii_y_sector(m: u32, k: i32, kind: SectorKind, r_min: f64) -> Result<Sector> {
    let family = Family::P3ii;
    if !family.branch_range().contains(&m) {
        return Err(Error::BadBranchIndex { family: family.name(), m });
    }
    if !family.sector_k_range().contains(&k) {
        return Err(Error::BadSectorIndex { family: family.name(), m, k });
    }
    if !(r_min >= 0.0) {
        return Err(Error::Invalid("r_min must be non-negative".into()));
    }
    let base = Rational64::from_integer(m as i64) + Rational64::new(3 * k as i64, 2);
    let lo = base - Rational64::new(3, 4);
    let hi = match kind {
        SectorKind::Existence => base + Rational64::new(3, 4),
        SectorKind::Uniqueness => base + Rational64::new(9, 4),
    };
    Ok(Sector::from_ratios(lo, hi, r_min, kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p4(k0: Param, kinf: Param) -> EquationSpec {
        make_equation(Family::P4, RawParams::p4(k0, kinf)).unwrap()
    }

    #[test]
    fn p4_derived_parameters() {
        let eq = p4(Param::int(1), Param::int(0));
        assert_eq!(eq.alpha(), Param::int(0));
        assert_eq!(eq.beta(), Param::int(-2));
        let eq = p4(Param::ratio(1, 3), Param::ratio(-1, 3));
        assert_eq!(eq.alpha(), Param::int(0));
        assert_eq!(eq.beta(), Param::ratio(-2, 9));
    }

    #[test]
    fn p3i_fixes_gamma_delta() {
        let eq = make_equation(Family::P3i, RawParams::p3(Param::int(0), Param::int(0))).unwrap();
        assert_eq!(eq.gamma(), Some(Param::int(1)));
        assert_eq!(eq.delta(), Some(Param::int(-1)));
        let bad = RawParams { gamma: Some(Param::int(2)), ..RawParams::p3(Param::int(0), Param::int(0)) };
        assert!(matches!(make_equation(Family::P3i, bad), Err(Error::NonCanonicalParams { .. })));
        let bad = RawParams { alpha: Some(Param::int(3)), ..Default::default() };
        assert!(matches!(make_equation(Family::P3ii, bad), Err(Error::NonCanonicalParams { .. })));
        let missing = RawParams { kappa0: Some(Param::int(1)), ..Default::default() };
        assert!(matches!(make_equation(Family::P4, missing), Err(Error::NonCanonicalParams { .. })));
    }

    #[test]
    fn leading_data() {
        let eq = make_equation(Family::P3i, RawParams::p3(Param::int(0), Param::int(0))).unwrap();
        let b = branch(&eq, 1).unwrap();
        assert_eq!(b.a0, Param::Exact(ExactScalar::i()));
        assert_eq!(b.big_a0, Param::int(1));
        assert!(matches!(branch(&eq, 4), Err(Error::BadBranchIndex { .. })));

        let eq = make_equation(Family::P3ii, RawParams::p3(Param::int(1), Param::int(0))).unwrap();
        let b = branch(&eq, 0).unwrap();
        assert_eq!((b.a0, b.big_a0), (Param::int(1), Param::int(-1)));

        let eq = p4(Param::int(0), Param::int(1));
        let b = branch(&eq, 3).unwrap();
        assert!(b.a0.is_zero());
        assert!(b.trivial);
        assert!(!branch(&eq, 1).unwrap().trivial);
    }

    #[test]
    fn printed_sectors() {
        let eq = make_equation(Family::P3i, RawParams::p3(Param::int(0), Param::int(0))).unwrap();
        let s = sector(&eq, 0, 0, SectorKind::Existence, 0.0).unwrap();
        assert_eq!((s.theta_lo(), s.theta_hi()), (-PI / 2.0, PI / 2.0));
        let o = sector(&eq, 0, 0, SectorKind::Uniqueness, 0.0).unwrap();
        assert_eq!((o.theta_lo(), o.theta_hi()), (-PI / 2.0, 3.0 * PI / 2.0));
        assert!(matches!(
            sector(&eq, 0, 2, SectorKind::Existence, 0.0),
            Err(Error::BadSectorIndex { .. })
        ));
        let eq4 = p4(Param::int(1), Param::int(1));
        let s = sector(&eq4, 1, 0, SectorKind::Existence, 0.0).unwrap();
        assert_eq!((s.theta_lo(), s.theta_hi()), (0.0, PI / 2.0));
    }

    #[test]
    fn y_plane_sectors_of_p3ii() {
        let eq = make_equation(Family::P3ii, RawParams::p3(Param::int(1), Param::int(0))).unwrap();
        // m = 0, 1 at k = 0 coincide with the printed x-plane sectors
        for m in 0..2 {
            let a = sector(&eq, m, 0, SectorKind::Existence, 0.0).unwrap();
            let b = p3ii_y_sector(m, 0, SectorKind::Existence, 0.0).unwrap();
            assert_eq!((a.lo_ratio(), a.hi_ratio()), (b.lo_ratio(), b.hi_ratio()));
        }
        let s = p3ii_y_sector(2, 0, SectorKind::Existence, 0.0).unwrap();
        assert_eq!((s.lo_ratio(), s.hi_ratio()), (Rational64::new(5, 4), Rational64::new(11, 4)));
        let o = p3ii_y_sector(0, 0, SectorKind::Uniqueness, 0.0).unwrap();
        assert!((o.span() - 3.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn containment_on_the_cover() {
        let eq4 = p4(Param::int(1), Param::int(1));
        let s = sector(&eq4, 1, 0, SectorKind::Existence, 5.0).unwrap();
        assert!(s.contains(TrackedPoint::new(10.0, PI / 4.0)));
        assert!(!s.contains(TrackedPoint::new(10.0, PI / 4.0 + 2.0 * PI)));
        assert!(!s.contains(TrackedPoint::new(3.0, PI / 4.0)));
    }
}
