//! First-order systems, Hamiltonians, the scalar second-order residual and
//! the limit Jacobians.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Branch, EquationSpec, Family, Param};
use crate::scalar::{Field, C64};
use crate::series::{residual_order, ResidualOrder};

fn lift<S: Field>(p: &Param) -> Result<S> {
    p.to_field::<S>().ok_or(Error::ExactBackendUnavailable)
}

fn c<S: Field>(n: i64) -> S {
    S::from_ratio(n, 1)
}

/// `(-delta)^{1/2}` on the principal branch.
fn principal_root<S: Field>(minus_delta: &S) -> Result<S> {
    if *minus_delta == S::one() {
        return Ok(S::one());
    }
    S::from_c64(minus_delta.to_c64().sqrt()).ok_or(Error::ExactBackendUnavailable)
}

/// Right-hand sides of the general P_III system
/// `x u' = (-delta)^{1/2} x + h u + x u^2 U`,
/// `x U' = alpha + gamma x u - (1 + h) U - x u U^2`, `h = 1 - beta (-delta)^{-1/2}`.
#[allow(clippy::too_many_arguments)]
pub fn rhs_general_p3<S: Field>(alpha: &S, beta: &S, gamma: &S, delta: &S, x: &S, u: &S, w: &S) -> Result<(S, S)> {
    if delta.is_zero() {
        return Err(Error::ZeroDelta);
    }
    if x.is_zero() {
        return Err(Error::ZeroX);
    }
    let root = principal_root(&-delta.clone())?;
    let h = S::one() - beta.clone() / root.clone();
    Ok(p3_rhs(alpha, gamma, &root, &h, x, u, w))
}

fn p3_rhs<S: Field>(alpha: &S, gamma: &S, root: &S, h: &S, x: &S, u: &S, w: &S) -> (S, S) {
    let (x, u, w) = (x.clone(), u.clone(), w.clone());
    let xu = x.clone() * u.clone();
    let du = (root.clone() * x.clone() + h.clone() * u.clone() + xu.clone() * u.clone() * w.clone()) / x.clone();
    let dw = (alpha.clone() + gamma.clone() * xu.clone() - (S::one() + h.clone()) * w.clone() - xu * w.clone() * w) / x;
    (du, dw)
}

/// A family's system with parameters lifted into one backend.
#[derive(Debug, Clone)]
pub struct System<S> {
    pub family: Family,
    pub(crate) alpha: S,
    pub(crate) beta: S,
    pub(crate) gamma: S,
    /// `(-delta)^{1/2}`
    pub(crate) root: S,
    pub(crate) h: S,
    pub(crate) k0: S,
    pub(crate) kinf: S,
}

impl<S: Field> System<S> {
    pub fn new(eq: &EquationSpec) -> Result<Self> {
        let zero = S::zero();
        let (gamma, root, h, k0, kinf) = match eq.family() {
            Family::P3i | Family::P3ii => {
                let beta: S = lift(&eq.beta())?;
                (lift(&eq.gamma().unwrap())?, S::one(), S::one() - beta, zero.clone(), zero.clone())
            }
            Family::P4 => (
                zero.clone(),
                zero.clone(),
                zero.clone(),
                lift(&eq.kappa0().unwrap())?,
                lift(&eq.kappa_inf().unwrap())?,
            ),
        };
        Ok(System { family: eq.family(), alpha: lift(&eq.alpha())?, beta: lift(&eq.beta())?, gamma, root, h, k0, kinf })
    }

    /// `(u', U')` without the `x = 0` check.
    pub fn eval(&self, x: &S, u: &S, w: &S) -> (S, S) {
        match self.family {
            Family::P3i | Family::P3ii => p3_rhs(&self.alpha, &self.gamma, &self.root, &self.h, x, u, w),
            Family::P4 => {
                let (x, u, w) = (x.clone(), u.clone(), w.clone());
                let two = c::<S>(2);
                let uw = u.clone() * w.clone();
                let du = c::<S>(4) * uw.clone() - u.clone() * u.clone() - two.clone() * x.clone() * u
                    - two.clone() * self.k0.clone();
                let dw = two.clone() * (uw - w.clone() * w.clone() + x * w) - self.kinf.clone();
                (du, dw)
            }
        }
    }

    pub fn rhs(&self, x: &S, u: &S, w: &S) -> Result<(S, S)> {
        if self.family != Family::P4 && x.is_zero() {
            return Err(Error::ZeroX);
        }
        Ok(self.eval(x, u, w))
    }

    /// `u''` by the chain rule through `(x, u, U)`.
    pub fn d2u(&self, x: &S, u: &S, w: &S) -> Result<S> {
        let (du, dw) = self.rhs(x, u, w)?;
        let (x, u, w) = (x.clone(), u.clone(), w.clone());
        let (fx, fu, fw) = match self.family {
            Family::P3i | Family::P3ii => {
                // u' = root + h u / x + u^2 U
                let fx = -(self.h.clone() * u.clone()) / (x.clone() * x.clone());
                let fu = self.h.clone() / x + c::<S>(2) * u.clone() * w;
                (fx, fu, u.clone() * u)
            }
            Family::P4 => {
                let fx = -(c::<S>(2) * u.clone());
                let fu = c::<S>(4) * w - c::<S>(2) * u.clone() - c::<S>(2) * x;
                (fx, fu, c::<S>(4) * u)
            }
        };
        Ok(fx + fu * du + fw * dw)
    }

    /// `u''` minus the right-hand side of the second-order equation.
    pub fn scalar_residual(&self, x: &S, u: &S, du: &S, d2u: &S) -> Result<S> {
        if u.is_zero() {
            return Err(Error::ZeroU);
        }
        let (x, u, du) = (x.clone(), u.clone(), du.clone());
        let rhs = match self.family {
            Family::P3i | Family::P3ii => {
                if x.is_zero() {
                    return Err(Error::ZeroX);
                }
                let delta = -(self.root.clone() * self.root.clone());
                du.clone() * du.clone() / u.clone() - du / x.clone()
                    + (self.alpha.clone() * u.clone() * u.clone() + self.beta.clone()) / x
                    + self.gamma.clone() * u.clone() * u.clone() * u.clone()
                    + delta / u
            }
            Family::P4 => {
                du.clone() * du / (c::<S>(2) * u.clone())
                    + S::from_ratio(3, 2) * u.clone() * u.clone() * u.clone()
                    + c::<S>(4) * x.clone() * u.clone() * u.clone()
                    + c::<S>(2) * (x.clone() * x - self.alpha.clone()) * u.clone()
                    + self.beta.clone() / u
            }
        };
        Ok(d2u.clone() - rhs)
    }

    /// Hamiltonian of P3i or P4.
    pub fn hamiltonian(&self, x: &S, u: &S, w: &S) -> Result<S> {
        let (x, u, w) = (x.clone(), u.clone(), w.clone());
        match self.family {
            Family::P3i => {
                if x.is_zero() {
                    return Err(Error::ZeroX);
                }
                let one_minus_beta = S::one() - self.beta.clone();
                let k = (c::<S>(2) + self.alpha.clone() - self.beta.clone()) / c(4);
                let xh = c::<S>(2) * u.clone() * u.clone() * w.clone() * w.clone()
                    - x.clone() * u.clone() * u.clone() * w.clone()
                    + one_minus_beta * u.clone() * w.clone()
                    + x.clone() * w
                    - k * x.clone() * u;
                Ok(xh / x)
            }
            Family::P4 => Ok(c::<S>(2) * u.clone() * w.clone() * w.clone()
                - (u.clone() * u.clone() + c::<S>(2) * x * u.clone() + c::<S>(2) * self.k0.clone()) * w
                + self.kinf.clone() * u),
            Family::P3ii => Err(Error::UnsupportedFamily("p3ii")),
        }
    }

    /// Hamilton's equations `(dH/dU, -dH/du)`: for P3i the alternative
    /// Hamiltonian system, for P4 the same system as [`System::rhs`].
    pub fn hamiltonian_rhs(&self, x: &S, u: &S, w: &S) -> Result<(S, S)> {
        match self.family {
            Family::P3i => {
                if x.is_zero() {
                    return Err(Error::ZeroX);
                }
                let (x, u, w) = (x.clone(), u.clone(), w.clone());
                let one_minus_beta = S::one() - self.beta.clone();
                let k = (c::<S>(2) + self.alpha.clone() - self.beta.clone()) / c(4);
                let du = (c::<S>(4) * u.clone() * u.clone() * w.clone() - x.clone() * u.clone() * u.clone()
                    + one_minus_beta * u.clone()
                    + x.clone())
                    / x.clone();
                let dw = (-(c::<S>(4) * u.clone() * w.clone() * w.clone())
                    + (c::<S>(2) * u * x.clone() + self.beta.clone() - S::one()) * w
                    + k * x.clone())
                    / x;
                Ok((du, dw))
            }
            Family::P4 => self.rhs(x, u, w),
            Family::P3ii => Err(Error::UnsupportedFamily("p3ii")),
        }
    }
}

pub fn rhs<S: Field>(eq: &EquationSpec, x: &S, u: &S, w: &S) -> Result<(S, S)> {
    System::<S>::new(eq)?.rhs(x, u, w)
}

pub fn hamiltonian<S: Field>(eq: &EquationSpec, x: &S, u: &S, w: &S) -> Result<S> {
    System::<S>::new(eq)?.hamiltonian(x, u, w)
}

pub fn scalar_residual<S: Field>(eq: &EquationSpec, x: &S, u: &S, du: &S, d2u: &S) -> Result<S> {
    System::<S>::new(eq)?.scalar_residual(x, u, du, d2u)
}

pub fn d2u_from_system<S: Field>(eq: &EquationSpec, x: &S, u: &S, w: &S) -> Result<S> {
    System::<S>::new(eq)?.d2u(x, u, w)
}

/// Phase function `phi` with perturbations behaving like `exp(lambda phi(x))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// phi = x
    X,
    /// phi = x^{2/3} / 2 on the tracked sheet
    TwoThirdsHalf,
    /// phi = x^2 / 2
    SquareHalf,
}

impl Phase {
    pub fn of(family: Family) -> Phase {
        match family {
            Family::P3i => Phase::X,
            Family::P3ii => Phase::TwoThirdsHalf,
            Family::P4 => Phase::SquareHalf,
        }
    }

    /// `phi(r e^{i theta})`.
    pub fn eval(self, r: f64, theta: f64) -> C64 {
        match self {
            Phase::X => C64::from_polar(r, theta),
            Phase::TwoThirdsHalf => C64::from_polar(r.powf(2.0 / 3.0) / 2.0, 2.0 * theta / 3.0),
            Phase::SquareHalf => C64::from_polar(r * r / 2.0, 2.0 * theta),
        }
    }

    /// `d phi / dr` along the ray of angle `theta`.
    pub fn radial_derivative(self, r: f64, theta: f64) -> C64 {
        match self {
            Phase::X => C64::from_polar(1.0, theta),
            Phase::TwoThirdsHalf => C64::from_polar(r.powf(-1.0 / 3.0) / 3.0, 2.0 * theta / 3.0),
            Phase::SquareHalf => C64::from_polar(r, 2.0 * theta),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct JacobianData {
    pub j: [[C64; 2]; 2],
    pub eigenvalues: [C64; 2],
    pub closed_form: [C64; 2],
    pub phase: Phase,
}

impl JacobianData {
    /// The eigenvalue whose mode decays fastest along the ray `theta` at
    /// radius `r`, i.e. the smaller `Re(lambda dphi/dr)`.
    pub fn decaying(&self, r: f64, theta: f64) -> C64 {
        let d = self.phase.radial_derivative(r, theta);
        let [a, b] = self.closed_form;
        if (a * d).re <= (b * d).re {
            a
        } else {
            b
        }
    }
}

/// Eigenvalues of a 2x2 complex matrix.
pub fn eig2(j: &[[C64; 2]; 2]) -> [C64; 2] {
    let half_tr = (j[0][0] + j[1][1]) / 2.0;
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = (half_tr * half_tr - det).sqrt();
    [half_tr + disc, half_tr - disc]
}

/// Limit Jacobian of the shifted system at the branch.
pub fn jacobian_limit(eq: &EquationSpec, branch: &Branch) -> Result<JacobianData> {
    if branch.trivial {
        return Err(Error::TrivialBranch);
    }
    let a0 = branch.a0.to_c64();
    let b0 = branch.big_a0.to_c64();
    let z = C64::new(0.0, 0.0);
    let r = |v: f64| C64::new(v, 0.0);
    let (j, closed) = match eq.family() {
        Family::P3i => {
            let l = 2.0 * C64::from_polar(1.0, -(branch.m as f64) * std::f64::consts::FRAC_PI_2);
            ([[2.0 * a0 * b0, a0 * a0], [z, -2.0 * a0 * b0]], [-l, l])
        }
        Family::P3ii => {
            let l = 3.0 * 3f64.sqrt() * C64::from_polar(1.0, -2.0 * branch.m as f64 * std::f64::consts::PI / 3.0);
            ([[6.0 * a0 * b0, 3.0 * a0 * a0], [-3.0 * b0 * b0, -6.0 * a0 * b0]], [l, -l])
        }
        Family::P4 => {
            let k0 = eq.kappa0().unwrap().to_c64();
            let kinf = eq.kappa_inf().unwrap().to_c64();
            match branch.m {
                1 => {
                    let l = C64::new(0.0, 2.0 * 3f64.sqrt() / 3.0);
                    ([[r(2.0 / 3.0), r(-8.0 / 3.0)], [r(2.0 / 3.0), r(-2.0 / 3.0)]], [l, -l])
                }
                2 => ([[r(2.0), z], [-kinf, r(-2.0)]], [r(2.0), r(-2.0)]),
                3 => ([[r(2.0), 4.0 * k0], [z, r(-2.0)]], [r(2.0), r(-2.0)]),
                _ => ([[r(-2.0), z], [z, r(2.0)]], [r(2.0), r(-2.0)]),
            }
        }
    };
    Ok(JacobianData { eigenvalues: eig2(&j), j, closed_form: closed, phase: Phase::of(eq.family()) })
}

/// Distance between two unordered eigenvalue pairs.
pub fn pair_distance(a: [C64; 2], b: [C64; 2]) -> f64 {
    let d1 = (a[0] - b[0]).norm().max((a[1] - b[1]).norm());
    let d2 = (a[0] - b[1]).norm().max((a[1] - b[0]).norm());
    d1.min(d2)
}

#[derive(Debug, Clone, Serialize)]
pub struct WasowReport {
    pub label: String,
    pub excluded: bool,
    pub eigenvalues: Option<[C64; 2]>,
    pub closed_form: Option<[C64; 2]>,
    pub deviation: f64,
    pub nonzero: bool,
    pub residual_order: Option<ResidualOrder>,
    pub pass: bool,
}

pub const EIG_TOL: f64 = 1e-12;

/// Condition 3 (nonzero eigenvalues matching the closed form) and
/// condition 4 (formal solution, witnessed by the residual order).
pub fn wasow_check(eq: &EquationSpec, branch: &Branch) -> WasowReport {
    let label = branch.label();
    let data = match jacobian_limit(eq, branch) {
        Ok(d) => d,
        Err(_) => {
            return WasowReport {
                label,
                excluded: true,
                eigenvalues: None,
                closed_form: None,
                deviation: 0.0,
                nonzero: false,
                residual_order: None,
                pass: false,
            }
        }
    };
    let r = residual_order(eq, branch, 10).ok();
    let mut rep = check_matrix(&label, &data.j, data.closed_form);
    rep.residual_order = r;
    rep.pass = rep.pass && r.is_some_and(|r| r.at_least(10));
    rep
}

/// Eigenvalue part of the check for an explicit matrix.
pub fn check_matrix(label: &str, j: &[[C64; 2]; 2], closed: [C64; 2]) -> WasowReport {
    let eig = eig2(j);
    let deviation = pair_distance(eig, closed);
    let nonzero = eig.iter().all(|l| l.norm() > EIG_TOL);
    WasowReport {
        label: label.to_string(),
        excluded: false,
        eigenvalues: Some(eig),
        closed_form: Some(closed),
        deviation,
        nonzero,
        residual_order: None,
        pass: nonzero && deviation <= EIG_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ExactScalar;
    use crate::model::{branch, make_equation, RawParams};

    fn q(n: i64, d: i64) -> ExactScalar {
        ExactScalar::from_ratio(n, d)
    }

    #[test]
    fn stationary_p3i_pair() {
        let eq = make_equation(Family::P3i, RawParams::p3(Param::int(1), Param::int(-1))).unwrap();
        let x = q(7, 3);
        // U = -1 - (1 - beta)/x
        let w = -(&q(1, 1) + &(&q(2, 1) / &x));
        let (du, _) = rhs(&eq, &x, &q(1, 1), &w).unwrap();
        assert!(du.is_zero());
        let d2u = d2u_from_system(&eq, &x, &q(1, 1), &w).unwrap();
        assert!(d2u.is_zero());
        assert!(scalar_residual(&eq, &x, &q(1, 1), &q(0, 1), &q(0, 1)).unwrap().is_zero());
    }

    #[test]
    fn p4_linear_solution() {
        let eq = make_equation(Family::P4, RawParams::p4(Param::int(1), Param::int(0))).unwrap();
        let x = q(5, 2);
        let u = -(&q(2, 1) * &x);
        let (du, dw) = rhs(&eq, &x, &u, &q(0, 1)).unwrap();
        assert_eq!((du, dw), (q(-2, 1), q(0, 1)));
        assert!(scalar_residual(&eq, &x, &u, &q(-2, 1), &q(0, 1)).unwrap().is_zero());
        assert!(d2u_from_system(&eq, &x, &u, &q(0, 1)).unwrap().is_zero());
    }

    #[test]
    fn p4_hamiltonian_values() {
        let eq = make_equation(Family::P4, RawParams::p4(Param::ratio(1, 3), Param::ratio(5, 7))).unwrap();
        assert_eq!(hamiltonian(&eq, &q(1, 1), &q(1, 1), &q(0, 1)).unwrap(), q(5, 7));
        // 2 - 1 - 2 k0 + kinf
        let want = &(&q(1, 1) - &q(2, 3)) + &q(5, 7);
        assert_eq!(hamiltonian(&eq, &q(0, 1), &q(1, 1), &q(1, 1)).unwrap(), want);
    }

    #[test]
    fn general_p3_specialises() {
        let eq = make_equation(Family::P3ii, RawParams::p3(Param::int(1), Param::ratio(2, 5))).unwrap();
        let (x, u, w) = (q(3, 2), q(-1, 4), q(5, 3));
        let lhs = rhs(&eq, &x, &u, &w).unwrap();
        let gen = rhs_general_p3(&q(1, 1), &q(2, 5), &q(0, 1), &q(-1, 1), &x, &u, &w).unwrap();
        assert_eq!(lhs, gen);
        assert!(matches!(rhs_general_p3(&q(1, 1), &q(0, 1), &q(0, 1), &q(0, 1), &x, &u, &w), Err(Error::ZeroDelta)));
        assert!(matches!(rhs(&eq, &q(0, 1), &u, &w), Err(Error::ZeroX)));
    }

    #[test]
    fn eigenvalues_match_closed_forms() {
        let p3i = make_equation(Family::P3i, RawParams::p3(Param::int(1), Param::int(2))).unwrap();
        let p3ii = make_equation(Family::P3ii, RawParams::p3(Param::int(1), Param::ratio(1, 2))).unwrap();
        let p4 = make_equation(Family::P4, RawParams::p4(Param::ratio(1, 2), Param::ratio(1, 3))).unwrap();
        for eq in [&p3i, &p3ii, &p4] {
            for m in eq.family().branch_range() {
                let b = branch(eq, m).unwrap();
                let rep = wasow_check(eq, &b);
                assert!(rep.pass, "{rep:?}");
                let d = jacobian_limit(eq, &b).unwrap();
                let tr = d.j[0][0] + d.j[1][1];
                assert!(tr.norm() < 1e-15);
            }
        }
        let b = branch(&p3i, 0).unwrap();
        let d = jacobian_limit(&p3i, &b).unwrap();
        assert!(pair_distance(d.eigenvalues, [C64::new(2.0, 0.0), C64::new(-2.0, 0.0)]) < 1e-15);
    }

    #[test]
    fn trivial_branch_is_excluded() {
        let eq = make_equation(Family::P4, RawParams::p4(Param::int(0), Param::int(1))).unwrap();
        let b = branch(&eq, 3).unwrap();
        assert!(matches!(jacobian_limit(&eq, &b), Err(Error::TrivialBranch)));
        assert!(wasow_check(&eq, &b).excluded);
    }

    #[test]
    fn corrupted_matrix_fails() {
        let j = [[C64::new(2.0, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(-2.1, 0.0)]];
        assert!(!check_matrix("bad", &j, [C64::new(2.0, 0.0), C64::new(-2.0, 0.0)]).pass);
    }
}
