//! Closed-form solution families and residual evaluators.
//!
//! Three equations are in play:
//!
//! * the fine Kolmogorov backward equation `u_t + x u_y = x^2 u_xx` in
//!   `(t, x, y)`;
//! * the free heat equation `θ_1 = θ_22` in `(z1, z2)`;
//! * heat equations with inverse-square potential
//!   `ϑ_1 = ϑ_22 - μ̃ z2^{-2} ϑ`.
//!
//! Solutions are jet-evaluable objects tagged with the PDE they claim to
//! solve; nothing is admitted on faith — every constructor's output is
//! meant to pass its residual test, and the residual is the arbiter
//! wherever a formula admits more than one reading.
//!
//! Residuals are reported raw and relative; the relative value divides by
//! the sum of the magnitudes of the individual PDE terms, with `0/0 = 0`.

use crate::jet::{Jet, JetError};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use num_traits::Float;

#[derive(Debug, Clone, PartialEq)]
pub enum SolError {
    Jet(JetError),
    /// Evaluation on or across a singular locus.
    Singular { locus: String, point: [f64; 3] },
    /// A constructor was handed a seed solving the wrong equation.
    SeedMismatch { expected: f64, got: f64 },
    /// Negative discriminant or otherwise unbuildable family member.
    BadFamily(String),
    /// Seed mini-language parse failure.
    Parse { pos: usize, msg: String },
}

impl fmt::Display for SolError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolError::Jet(e) => write!(f, "{e}"),
            SolError::Singular { locus, point } => {
                write!(f, "point {point:?} hits singular locus {locus}")
            }
            SolError::SeedMismatch { expected, got } => {
                write!(f, "seed potential coefficient {got} (need {expected})")
            }
            SolError::BadFamily(msg) => write!(f, "{msg}"),
            SolError::Parse { pos, msg } => write!(f, "seed parse error at {pos}: {msg}"),
        }
    }
}

impl From<JetError> for SolError {
    fn from(e: JetError) -> Self {
        SolError::Jet(e)
    }
}

type Eval2 = Arc<dyn Fn([f64; 2], usize) -> Result<Jet, SolError> + Send + Sync>;
type Adm2 = Arc<dyn Fn([f64; 2]) -> bool + Send + Sync>;
type Eval3 = Arc<dyn Fn([f64; 3], usize) -> Result<Jet, SolError> + Send + Sync>;
type Adm3 = Arc<dyn Fn([f64; 3]) -> bool + Send + Sync>;

/// A named jet-evaluable function of two plane variables.
#[derive(Clone)]
pub struct PlaneFn {
    pub name: String,
    eval: Eval2,
    admissible: Adm2,
}

impl fmt::Debug for PlaneFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlaneFn({})", self.name)
    }
}

impl PlaneFn {
    pub fn new(
        name: String,
        eval: impl Fn([f64; 2], usize) -> Result<Jet, SolError> + Send + Sync + 'static,
        admissible: impl Fn([f64; 2]) -> bool + Send + Sync + 'static,
    ) -> Self {
        PlaneFn { name, eval: Arc::new(eval), admissible: Arc::new(admissible) }
    }

    pub fn jet(&self, z: [f64; 2], order: usize) -> Result<Jet, SolError> {
        if !self.admissible(z) {
            return Err(SolError::Singular {
                locus: self.name.clone(),
                point: [z[0], z[1], 0.0],
            });
        }
        (self.eval)(z, order)
    }

    pub fn admissible(&self, z: [f64; 2]) -> bool {
        (self.admissible)(z)
    }

    pub fn scale(&self, c: f64) -> PlaneFn {
        let inner = self.clone();
        PlaneFn {
            name: format!("{c}*{}", self.name),
            eval: Arc::new(move |z, o| Ok(inner.jet(z, o)?.scale(c))),
            admissible: self.admissible.clone(),
        }
    }

    pub fn shift(&self, dz1: f64, dz2: f64) -> PlaneFn {
        let inner = self.clone();
        let inner_adm = self.clone();
        PlaneFn {
            name: format!("{}<<({dz1},{dz2})", self.name),
            eval: Arc::new(move |z, o| inner.jet([z[0] + dz1, z[1] + dz2], o)),
            admissible: Arc::new(move |z| inner_adm.admissible([z[0] + dz1, z[1] + dz2])),
        }
    }

    pub fn add(&self, rhs: &PlaneFn) -> PlaneFn {
        let (a, b) = (self.clone(), rhs.clone());
        let (aa, ba) = (self.clone(), rhs.clone());
        PlaneFn {
            name: format!("{}+{}", self.name, rhs.name),
            eval: Arc::new(move |z, o| Ok(a.jet(z, o)?.add(&b.jet(z, o)?))),
            admissible: Arc::new(move |z| aa.admissible(z) && ba.admissible(z)),
        }
    }
}

/// A verified-by-construction solution of the free heat equation.
#[derive(Debug, Clone)]
pub struct HeatSolution(pub PlaneFn);

/// A solution of `ϑ_1 = ϑ_22 - μ̃ z2^{-2} ϑ` with its potential coefficient.
#[derive(Debug, Clone)]
pub struct InvSqSolution {
    pub fn2: PlaneFn,
    pub mu_tilde: f64,
}

/// Sign-branch handling for families carrying `|x|` and `ε`.
///
/// `Plus`/`Minus` pin the formula to one sign of `x` (the expression solves
/// the equation only there); `SgnX` evaluates with `ε = sgn x` at each
/// point, gluing the two branch formulas into one object defined off
/// `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Eps {
    Plus,
    Minus,
    SgnX,
}

impl Eps {
    pub fn value(self, x: f64) -> f64 {
        match self {
            Eps::Plus => 1.0,
            Eps::Minus => -1.0,
            Eps::SgnX => x.signum(),
        }
    }

    pub fn admits(self, x: f64) -> bool {
        match self {
            Eps::Plus => x > 0.0,
            Eps::Minus => x < 0.0,
            Eps::SgnX => x != 0.0,
        }
    }
}

impl fmt::Display for Eps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Eps::Plus => write!(f, "+1"),
            Eps::Minus => write!(f, "-1"),
            Eps::SgnX => write!(f, "sgn(x)"),
        }
    }
}

/// Which equation a [`SolutionExpr`] claims to solve.
#[derive(Debug, Clone, PartialEq)]
pub enum PdeTag {
    Fine,
    Heat,
    InvSq(f64),
}

/// A named, parameterized, jet-evaluable function of `(t, x, y)` with its
/// claimed PDE and singular locus.
#[derive(Clone)]
pub struct SolutionExpr {
    pub name: String,
    pub pde: PdeTag,
    pub singular: String,
    pub provenance: String,
    eval: Eval3,
    admissible: Adm3,
}

impl fmt::Debug for SolutionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SolutionExpr({})", self.name)
    }
}

impl SolutionExpr {
    pub fn new(
        name: String,
        pde: PdeTag,
        singular: String,
        provenance: String,
        eval: impl Fn([f64; 3], usize) -> Result<Jet, SolError> + Send + Sync + 'static,
        admissible: impl Fn([f64; 3]) -> bool + Send + Sync + 'static,
    ) -> Self {
        SolutionExpr {
            name,
            pde,
            singular,
            provenance,
            eval: Arc::new(eval),
            admissible: Arc::new(admissible),
        }
    }

    pub fn jet(&self, p: [f64; 3], order: usize) -> Result<Jet, SolError> {
        if !self.admissible(p) {
            return Err(SolError::Singular { locus: self.singular.clone(), point: p });
        }
        (self.eval)(p, order)
    }

    pub fn value(&self, p: [f64; 3]) -> Result<f64, SolError> {
        Ok(self.jet(p, 2)?.value())
    }

    pub fn admissible(&self, p: [f64; 3]) -> bool {
        (self.admissible)(p)
    }

    pub fn scale(&self, c: f64) -> SolutionExpr {
        let inner = self.clone();
        SolutionExpr {
            name: format!("{c}*{}", self.name),
            pde: self.pde.clone(),
            singular: self.singular.clone(),
            provenance: self.provenance.clone(),
            eval: Arc::new(move |p, o| Ok((inner.eval)(p, o)?.scale(c))),
            admissible: self.admissible.clone(),
        }
    }

    /// Linear combination of two claims on the same PDE.
    pub fn combine(a: &SolutionExpr, ca: f64, b: &SolutionExpr, cb: f64) -> SolutionExpr {
        debug_assert_eq!(a.pde, b.pde);
        let (ai, bi) = (a.clone(), b.clone());
        let (aa, ba) = (a.clone(), b.clone());
        SolutionExpr {
            name: format!("{ca}*{} + {cb}*{}", a.name, b.name),
            pde: a.pde.clone(),
            singular: format!("{} | {}", a.singular, b.singular),
            provenance: "linear combination".to_string(),
            eval: Arc::new(move |p, o| {
                Ok(ai.jet(p, o)?.scale(ca).add(&bi.jet(p, o)?.scale(cb)))
            }),
            admissible: Arc::new(move |p| aa.admissible(p) && ba.admissible(p)),
        }
    }

    /// Residual of the claimed PDE at a point: `(raw, relative)`.
    pub fn residual(&self, p: [f64; 3]) -> Result<(f64, f64), SolError> {
        match self.pde {
            PdeTag::Fine => {
                let j = self.jet(p, 2)?;
                let ut = j.derivative([1, 0, 0])?;
                let uy = j.derivative([0, 0, 1])?;
                let uxx = j.derivative([0, 2, 0])?;
                let x = p[1];
                let terms = [ut, x * uy, -x * x * uxx];
                let noise = noise_floor(&j, 1.0 + x.abs() + x * x);
                Ok(rel_residual(&terms, noise))
            }
            PdeTag::Heat => {
                let j = self.jet(p, 2)?;
                let terms = [j.derivative([1, 0, 0])?, -j.derivative([0, 2, 0])?];
                Ok(rel_residual(&terms, noise_floor(&j, 3.0)))
            }
            PdeTag::InvSq(mu) => {
                let j = self.jet(p, 2)?;
                let z2 = p[1];
                let pot = mu / (z2 * z2);
                let terms = [
                    j.derivative([1, 0, 0])?,
                    -j.derivative([0, 2, 0])?,
                    pot * j.value(),
                ];
                Ok(rel_residual(&terms, noise_floor(&j, 3.0 + pot.abs())))
            }
        }
    }
}

/// Roundoff bound for PDE terms assembled from a jet's coefficients.
fn noise_floor(j: &Jet, term_weight: f64) -> f64 {
    64.0 * f64::EPSILON * j.coeff_norm1() * term_weight
}

/// Relative residual with the 0/0 convention: when every term is below the
/// roundoff floor of the evaluation, the point counts as exactly satisfied.
fn rel_residual(terms: &[f64], noise: f64) -> (f64, f64) {
    let raw: f64 = terms.iter().sum();
    let scale: f64 = terms.iter().map(|t| t.abs()).sum();
    let rel = if scale <= noise { 0.0 } else { raw / scale };
    (raw, rel)
}

/// Heat residual `θ_1 - θ_22` of a plane function, `(raw, relative)`.
pub fn residual_heat(theta: &HeatSolution, z: [f64; 2]) -> Result<(f64, f64), SolError> {
    let j = theta.0.jet(z, 2)?;
    let terms = [j.derivative([1, 0, 0])?, -j.derivative([0, 2, 0])?];
    Ok(rel_residual(&terms, noise_floor(&j, 3.0)))
}

/// Residual `ϑ_1 - ϑ_22 + μ̃ z2^{-2} ϑ` of an inverse-square claim.
pub fn residual_invsq(theta: &InvSqSolution, z: [f64; 2]) -> Result<(f64, f64), SolError> {
    let j = theta.fn2.jet(z, 2)?;
    let z2 = z[1];
    if z2 == 0.0 {
        return Err(SolError::Singular { locus: "z2 = 0".to_string(), point: [z[0], z2, 0.0] });
    }
    let pot = theta.mu_tilde / (z2 * z2);
    let terms = [
        j.derivative([1, 0, 0])?,
        -j.derivative([0, 2, 0])?,
        pot * j.value(),
    ];
    Ok(rel_residual(&terms, noise_floor(&j, 3.0 + pot.abs())))
}

// ---------------------------------------------------------------------------
// heat families
// ---------------------------------------------------------------------------

fn plane_vars(z: [f64; 2], order: usize) -> (Jet, Jet) {
    let v = Jet::vars(order.max(2), &z);
    (v[0].clone(), v[1].clone())
}

/// Gauss kernel `(z1+s0)^{-1/2} exp(-(z2-x0)^2 / (4(z1+s0)))`, admissible
/// where `z1 + s0 > 0`.
pub fn heat_kernel(s0: f64, x0: f64) -> HeatSolution {
    HeatSolution(PlaneFn::new(
        format!("kernel(s0={s0},x0={x0})"),
        move |z, order| {
            let (z1, z2) = plane_vars(z, order);
            let s = z1.add_scalar(s0);
            if s.value() <= 0.0 {
                return Err(SolError::Singular {
                    locus: format!("z1 + {s0} <= 0"),
                    point: [z[0], z[1], 0.0],
                });
            }
            let d = z2.add_scalar(-x0);
            let arg = d.mul(&d).neg().div(&s.scale(4.0))?;
            Ok(s.powf(-0.5)?.mul(&arg.exp()))
        },
        move |z| z[0] + s0 > 0.0,
    ))
}

/// Heat polynomial of degree `k`: `poly(2) = z2^2 + 2 z1`,
/// `poly(3) = z2^3 + 6 z1 z2`, ….
pub fn heat_poly(k: usize) -> HeatSolution {
    HeatSolution(PlaneFn::new(
        format!("poly({k})"),
        move |z, order| {
            let (z1, z2) = plane_vars(z, order);
            let mut acc = Jet::constant(2, order.max(2), 0.0).with_base(z1.base());
            let fact = |n: usize| (1..=n).fold(1.0, |a, b| a * b as f64);
            for j in 0..=k / 2 {
                let c = fact(k) / (fact(j) * fact(k - 2 * j));
                acc = acc.add(&z1.powi(j).mul(&z2.powi(k - 2 * j)).scale(c));
            }
            Ok(acc)
        },
        |_| true,
    ))
}

/// Exponential mode `exp(λ^2 z1 + λ z2)`.
pub fn heat_exp_mode(lambda: f64) -> HeatSolution {
    HeatSolution(PlaneFn::new(
        format!("expmode({lambda})"),
        move |z, order| {
            let (z1, z2) = plane_vars(z, order);
            Ok(z1.scale(lambda * lambda).add(&z2.scale(lambda)).exp())
        },
        |_| true,
    ))
}

// ---------------------------------------------------------------------------
// inverse-square families
// ---------------------------------------------------------------------------

/// Stationary power `ϑ = z2^p` with `p(p-1) = μ̃`, `p = (1 ± √(1+4μ̃))/2`.
pub fn stationary_power(mu_tilde: f64, plus_branch: bool) -> Result<InvSqSolution, SolError> {
    let disc = 1.0 + 4.0 * mu_tilde;
    if disc < 0.0 {
        return Err(SolError::BadFamily(format!(
            "negative discriminant 1 + 4*{mu_tilde} for stationary power"
        )));
    }
    let p = if plus_branch { (1.0 + disc.sqrt()) / 2.0 } else { (1.0 - disc.sqrt()) / 2.0 };
    Ok(InvSqSolution {
        fn2: PlaneFn::new(
            format!("power(mu~={mu_tilde},p={p})"),
            move |z, order| {
                let (_, z2) = plane_vars(z, order);
                Ok(z2.powf(p)?)
            },
            |z| z[1] > 0.0,
        ),
        mu_tilde,
    })
}

/// A free-heat solution viewed as the `μ̃ = 0` member of the family.
pub fn invsq_from_heat(theta: &HeatSolution) -> InvSqSolution {
    InvSqSolution { fn2: theta.0.clone(), mu_tilde: 0.0 }
}

/// The shipped seeds of the `μ̃ = -1/4` equation
/// `v_1 = v_22 + z2^{-2} v / 4`, used by the Darboux construction:
///
/// * 0: `√z2`
/// * 1: `√z2 · ln z2`
/// * 2: `√z2 · (z2^2 + 4 z1)`
/// * 3: `√z2 · (z1+1)^{-1} exp(-z2^2/(4(z1+1)))` (radial kernel)
pub fn quarter_seed(index: usize) -> Result<InvSqSolution, SolError> {
    let mu_tilde = -0.25;
    let fn2 = match index {
        0 => PlaneFn::new(
            "vseed(sqrt)".to_string(),
            |z, order| {
                let (_, z2) = plane_vars(z, order);
                Ok(z2.sqrt()?)
            },
            |z| z[1] > 0.0,
        ),
        1 => PlaneFn::new(
            "vseed(sqrt-log)".to_string(),
            |z, order| {
                let (_, z2) = plane_vars(z, order);
                Ok(z2.sqrt()?.mul(&z2.ln()?))
            },
            |z| z[1] > 0.0,
        ),
        2 => PlaneFn::new(
            "vseed(sqrt-radial2)".to_string(),
            |z, order| {
                let (z1, z2) = plane_vars(z, order);
                Ok(z2.sqrt()?.mul(&z2.mul(&z2).add(&z1.scale(4.0))))
            },
            |z| z[1] > 0.0,
        ),
        3 => PlaneFn::new(
            "vseed(sqrt-kernel2)".to_string(),
            |z, order| {
                let (z1, z2) = plane_vars(z, order);
                let s = z1.add_scalar(1.0);
                if s.value() <= 0.0 {
                    return Err(SolError::Singular {
                        locus: "z1 + 1 <= 0".to_string(),
                        point: [z[0], z[1], 0.0],
                    });
                }
                let arg = z2.mul(&z2).neg().div(&s.scale(4.0))?;
                Ok(z2.sqrt()?.mul(&s.recip()?).mul(&arg.exp()))
            },
            |z| z[1] > 0.0 && z[0] + 1.0 > 0.0,
        ),
        other => {
            return Err(SolError::BadFamily(format!("no shipped quarter seed #{other}")));
        }
    };
    Ok(InvSqSolution { fn2, mu_tilde })
}

/// Darboux transformation `w = v_2 - z2^{-1} v / 2` of a `μ̃ = -1/4` seed;
/// the image solves the `μ̃ = 3/4` equation.
pub fn darboux_from(v: &InvSqSolution) -> Result<InvSqSolution, SolError> {
    if (v.mu_tilde + 0.25).abs() > 1e-12 {
        return Err(SolError::SeedMismatch { expected: -0.25, got: v.mu_tilde });
    }
    let seed = v.fn2.clone();
    let adm = v.fn2.clone();
    Ok(InvSqSolution {
        fn2: PlaneFn::new(
            format!("darboux({})", v.fn2.name),
            move |z, order| {
                let vj = seed.jet(z, order + 1)?;
                let (_, z2) = plane_vars(z, order);
                let correction = vj.truncate(order).scale(0.5).div(&z2)?;
                Ok(vj.partial(1)?.truncate(order).sub(&correction))
            },
            move |z| z[1] != 0.0 && adm.admissible(z),
        ),
        mu_tilde: 0.75,
    })
}

// ---------------------------------------------------------------------------
// solutions of the fine equation
// ---------------------------------------------------------------------------

fn fine_vars(p: [f64; 3], order: usize) -> (Jet, Jet, Jet) {
    let v = Jet::vars(order.max(2), &p);
    (v[0].clone(), v[1].clone(), v[2].clone())
}

/// Constant solution `u = c`.
pub fn sol_const(c: f64) -> SolutionExpr {
    SolutionExpr::new(
        format!("const({c})"),
        PdeTag::Fine,
        "none".to_string(),
        "constants solve the equation".to_string(),
        move |p, order| Ok(Jet::constant(3, order.max(2), c).with_base(p)),
        |_| true,
    )
}

/// `u = x`, another elementary solution.
pub fn sol_x() -> SolutionExpr {
    SolutionExpr::new(
        "x".to_string(),
        PdeTag::Fine,
        "none".to_string(),
        "u = x has u_t = u_y = u_xx = 0".to_string(),
        |p, order| {
            let (_, x, _) = fine_vars(p, order);
            Ok(x)
        },
        |_| true,
    )
}

/// `u = y` — deliberately *not* a solution (residual `x`), kept as a
/// failure witness for the verification tooling.
pub fn witness_y() -> SolutionExpr {
    SolutionExpr::new(
        "witness-y".to_string(),
        PdeTag::Fine,
        "none".to_string(),
        "non-solution witness".to_string(),
        |p, order| {
            let (_, _, y) = fine_vars(p, order);
            Ok(y)
        },
        |_| true,
    )
}

/// First heat-parameterized family:
/// `u = e^{-3t/16} |x|^{1/4} θ(εy, 2√|x|)` with `ε = sgn x` on each branch.
pub fn sol_heat1(theta: &HeatSolution, eps: Eps) -> SolutionExpr {
    let th = theta.clone();
    let adm_th = theta.clone();
    SolutionExpr::new(
        format!("sol-heat1({}, eps={eps})", theta.0.name),
        PdeTag::Fine,
        "x = 0".to_string(),
        "heat solution pulled through the quarter-power map".to_string(),
        move |p, order| {
            let order = order.max(2);
            let (t, x, y) = fine_vars(p, order);
            let e = eps.value(p[1]);
            let ax = x.abs_branch()?;
            let pre = t.scale(-3.0 / 16.0).exp().mul(&ax.powf(0.25)?);
            let i1 = y.scale(e);
            let i2 = ax.sqrt()?.scale(2.0);
            let tj = th.0.jet([i1.value(), i2.value()], order)?;
            Ok(pre.mul(&Jet::compose2(&tj, [&i1, &i2])))
        },
        move |p| {
            eps.admits(p[1])
                && adm_th
                    .0
                    .admissible([eps.value(p[1]) * p[2], 2.0 * p[1].abs().sqrt()])
        },
    )
}

/// Second heat-parameterized family: `u = e^{-t/4} |x|^{1/2} θ(t, ln|x|)`.
pub fn sol_heat2(theta: &HeatSolution) -> SolutionExpr {
    let th = theta.clone();
    let adm_th = theta.clone();
    SolutionExpr::new(
        format!("sol-heat2({})", theta.0.name),
        PdeTag::Fine,
        "x = 0".to_string(),
        "heat solution pulled through the log map".to_string(),
        move |p, order| {
            let order = order.max(2);
            let (t, x, _) = fine_vars(p, order);
            let ax = x.abs_branch()?;
            let pre = t.scale(-0.25).exp().mul(&ax.sqrt()?);
            let i2 = ax.ln()?;
            let tj = th.0.jet([p[0], i2.value()], order)?;
            Ok(pre.mul(&Jet::compose2(&tj, [&t, &i2])))
        },
        move |p| p[1] != 0.0 && adm_th.0.admissible([p[0], p[1].abs().ln()]),
    )
}

/// Inverse-square-parameterized family:
/// `u = e^{μt} |x|^{1/4} ϑ(εy, 2√|x|)` with `ϑ` solving the potential
/// equation for `μ̃ = 4μ + 3/4`.
pub fn sol_invsq(mu: f64, theta: &InvSqSolution, eps: Eps) -> Result<SolutionExpr, SolError> {
    let expected = 4.0 * mu + 0.75;
    if (theta.mu_tilde - expected).abs() > 1e-12 {
        return Err(SolError::SeedMismatch { expected, got: theta.mu_tilde });
    }
    let th = theta.clone();
    let adm_th = theta.clone();
    Ok(SolutionExpr::new(
        format!("sol-invsq(mu={mu}, {}, eps={eps})", theta.fn2.name),
        PdeTag::Fine,
        "x = 0".to_string(),
        "inverse-square solution pulled through the quarter-power map".to_string(),
        move |p, order| {
            let order = order.max(2);
            let (t, x, y) = fine_vars(p, order);
            let e = eps.value(p[1]);
            let ax = x.abs_branch()?;
            let pre = t.scale(mu).exp().mul(&ax.powf(0.25)?);
            let i1 = y.scale(e);
            let i2 = ax.sqrt()?.scale(2.0);
            let tj = th.fn2.jet([i1.value(), i2.value()], order)?;
            Ok(pre.mul(&Jet::compose2(&tj, [&i1, &i2])))
        },
        move |p| {
            eps.admits(p[1])
                && adm_th
                    .fn2
                    .admissible([eps.value(p[1]) * p[2], 2.0 * p[1].abs().sqrt()])
        },
    ))
}

/// The coupled-system tuple behind the y-polynomial family:
/// `w̃^s = ε^s e^{(n-s-1) z2} (∏_{k=n-s}^{n-1} (2k ∂_2 + k^2)) θ`,
/// satisfying `w̃^s_1 = w̃^s_22 - ε e^{z2} w̃^{s+1}` with `w̃^n = 0`.
pub fn hn_tuple(n: usize, theta: &HeatSolution, eps_sign: f64) -> Result<Vec<PlaneFn>, SolError> {
    if n < 1 {
        return Err(SolError::BadFamily("n must be >= 1".to_string()));
    }
    let mut out = Vec::with_capacity(n);
    for s in 0..n {
        let th = theta.clone();
        let adm = theta.clone();
        out.push(PlaneFn::new(
            format!("w~{s}[n={n}]({})", theta.0.name),
            move |z, order| {
                let mut g = th.0.jet(z, order + s)?;
                for k in (n - s)..n {
                    let kf = k as f64;
                    let lower = g.truncate(g.order() - 1);
                    g = g.partial(1)?.scale(2.0 * kf).add(&lower.scale(kf * kf));
                }
                let (_, z2) = plane_vars(z, order);
                let pre = z2.scale((n - s - 1) as f64).exp();
                Ok(pre.mul(&g.truncate(order)).scale(eps_sign.powi(s as i32)))
            },
            move |z| adm.0.admissible(z),
        ));
    }
    Ok(out)
}

/// Residual of the coupled-system relation for slot `s`:
/// `w̃^s_1 - w̃^s_22 + ε e^{z2} w̃^{s+1}` (with `w̃^n = 0`).
pub fn hn_relation_residual(
    tuple: &[PlaneFn],
    eps_sign: f64,
    s: usize,
    z: [f64; 2],
) -> Result<(f64, f64), SolError> {
    let j = tuple[s].jet(z, 2)?;
    let next = if s + 1 < tuple.len() {
        tuple[s + 1].jet(z, 2)?.value()
    } else {
        0.0
    };
    let terms = [
        j.derivative([1, 0, 0])?,
        -j.derivative([0, 2, 0])?,
        eps_sign * z[1].exp() * next,
    ];
    Ok(rel_residual(&terms, noise_floor(&j, 3.0 + z[1].exp())))
}

/// The y-polynomial family built from the coupled system:
///
/// ```text
/// u = ε^{n-1} e^{-t/4} |x|^{n-1/2} Σ_{s=0}^{n-1} (y^s x^{-s} / s!)
///         (∏_{k=n-s}^{n-1} (2k x ∂_x + k^2)) θ(t, ln|x|),    ε = sgn x.
/// ```
///
/// Solves the fine equation and is annihilated by `∂_y^n` exactly.  The
/// `ε^{n-1}` prefactor normalizes the family so that it coincides pointwise
/// with the iterated `K` action on the log-map family on both sign
/// branches.
pub fn gen_solution1(n: usize, theta: &HeatSolution) -> Result<SolutionExpr, SolError> {
    if n < 1 {
        return Err(SolError::BadFamily("n must be >= 1".to_string()));
    }
    let th = theta.clone();
    let adm_th = theta.clone();
    Ok(SolutionExpr::new(
        format!("gensol1(n={n}, {})", theta.0.name),
        PdeTag::Fine,
        "x = 0".to_string(),
        "y-polynomial family from the heat-parameterized coupled system".to_string(),
        move |p, order| {
            let order = order.max(2);
            let (t, x, y) = fine_vars(p, order);
            let e = p[1].signum();
            let ax = x.abs_branch()?;
            let lnx = ax.ln()?;
            let tj = th.0.jet([p[0], lnx.value()], order + n - 1)?;
            let xr = x.recip()?;
            let mut acc = Jet::constant(3, order, 0.0).with_base(x.base());
            let mut fact = 1.0;
            for s in 0..n {
                if s > 0 {
                    fact *= s as f64;
                }
                let mut g = tj.clone();
                for k in (n - s)..n {
                    let kf = k as f64;
                    let lower = g.truncate(g.order() - 1);
                    g = g.partial(1)?.scale(2.0 * kf).add(&lower.scale(kf * kf));
                }
                let g3 = Jet::compose2(&g.truncate(order), [&t, &lnx]);
                let term = y.powi(s).mul(&xr.powi(s)).mul(&g3).scale(1.0 / fact);
                acc = acc.add(&term);
            }
            let pre = t
                .scale(-0.25)
                .exp()
                .mul(&ax.powf(n as f64 - 0.5)?)
                .scale(e.powi(n as i32 - 1));
            Ok(pre.mul(&acc))
        },
        move |p| p[1] != 0.0 && adm_th.0.admissible([p[0], p[1].abs().ln()]),
    ))
}

/// The time-linear family built on the Darboux pair: for a verified
/// `μ̃ = -1/4` seed `v`,
///
/// ```text
/// u = |x|^{1/4} ( t v_2(εy, 2√|x|) - (t/4 + 1) |x|^{-1/2} v(εy, 2√|x|) ).
/// ```
///
/// The Darboux image `v_2 - z2^{-1} v / 2` is the time coefficient, so `u`
/// pairs a `μ̃ = 3/4` solution with its preimage.
pub fn gen_solution2(v: &InvSqSolution, eps: Eps) -> Result<SolutionExpr, SolError> {
    if (v.mu_tilde + 0.25).abs() > 1e-12 {
        return Err(SolError::SeedMismatch { expected: -0.25, got: v.mu_tilde });
    }
    let seed = v.clone();
    let adm_seed = v.clone();
    Ok(SolutionExpr::new(
        format!("gensol2({}, eps={eps})", v.fn2.name),
        PdeTag::Fine,
        "x = 0".to_string(),
        "Darboux-paired time-linear family".to_string(),
        move |p, order| {
            let order = order.max(2);
            let (t, x, y) = fine_vars(p, order);
            let e = eps.value(p[1]);
            let ax = x.abs_branch()?;
            let i1 = y.scale(e);
            let i2 = ax.sqrt()?.scale(2.0);
            let z = [i1.value(), i2.value()];
            let vj = seed.fn2.jet(z, order + 1)?;
            let v2 = Jet::compose2(&vj.partial(1)?.truncate(order), [&i1, &i2]);
            let v0 = Jet::compose2(&vj.truncate(order), [&i1, &i2]);
            let quarter = ax.powf(0.25)?;
            let lhs = t.mul(&v2);
            let rhs = t.scale(0.25).add_scalar(1.0).mul(&ax.powf(-0.5)?).mul(&v0);
            Ok(quarter.mul(&lhs.sub(&rhs)))
        },
        move |p| {
            eps.admits(p[1])
                && adm_seed
                    .fn2
                    .admissible([eps.value(p[1]) * p[2], 2.0 * p[1].abs().sqrt()])
        },
    ))
}

// ---------------------------------------------------------------------------
// seed mini-language
// ---------------------------------------------------------------------------

/// A parsed seed: either a free-heat solution or an inverse-square one.
#[derive(Debug, Clone)]
pub enum Seed {
    Heat(HeatSolution),
    InvSq(InvSqSolution),
}

impl Seed {
    pub fn name(&self) -> &str {
        match self {
            Seed::Heat(h) => &h.0.name,
            Seed::InvSq(v) => &v.fn2.name,
        }
    }
}

/// Parses the seed grammar `name "(" [arg {"," arg}] ")"` with
/// `arg := ident "=" number | number`; names: `kernel`, `poly`, `expmode`,
/// `power`, `darboux`.
pub fn parse_seed(src: &str) -> Result<Seed, SolError> {
    let s = src.trim();
    let open = s.find('(').ok_or_else(|| SolError::Parse {
        pos: s.len(),
        msg: "expected `(`".to_string(),
    })?;
    if !s.ends_with(')') {
        return Err(SolError::Parse { pos: s.len(), msg: "expected `)`".to_string() });
    }
    let name = s[..open].trim();
    let body = &s[open + 1..s.len() - 1];
    let mut args: Vec<(Option<String>, f64)> = Vec::new();
    if !body.trim().is_empty() {
        for (i, part) in body.split(',').enumerate() {
            let part = part.trim();
            let (key, value) = match part.split_once('=') {
                Some((k, v)) => (Some(k.trim().to_string()), v.trim()),
                None => (None, part),
            };
            let v: f64 = value.parse().map_err(|_| SolError::Parse {
                pos: open + 1 + i,
                msg: format!("bad number `{value}`"),
            })?;
            args.push((key, v));
        }
    }
    let get = |key: &str, pos: usize, default: Option<f64>| -> Result<f64, SolError> {
        for (k, v) in &args {
            if k.as_deref() == Some(key) {
                return Ok(*v);
            }
        }
        if let Some((None, v)) = args.get(pos) {
            return Ok(*v);
        }
        default.ok_or_else(|| SolError::Parse {
            pos: open,
            msg: format!("missing argument `{key}`"),
        })
    };
    match name {
        "kernel" => Ok(Seed::Heat(heat_kernel(get("s0", 0, Some(1.0))?, get("x0", 1, Some(0.0))?))),
        "poly" => {
            let k = get("k", 0, None)?;
            if k < 0.0 || k != k.trunc() {
                return Err(SolError::Parse {
                    pos: open,
                    msg: format!("poly degree must be a nonnegative integer, got {k}"),
                });
            }
            Ok(Seed::Heat(heat_poly(k as usize)))
        }
        "expmode" => Ok(Seed::Heat(heat_exp_mode(get("lambda", 0, None)?))),
        "power" => {
            let mu = get("mu", 0, None)?;
            let branch = get("branch", 1, Some(1.0))?;
            Ok(Seed::InvSq(stationary_power(mu, branch >= 0.0)?))
        }
        "darboux" => {
            let idx = get("seed", 0, Some(1.0))?;
            let v = quarter_seed(idx as usize)?;
            Ok(Seed::InvSq(darboux_from(&v)?))
        }
        other => Err(SolError::Parse { pos: 0, msg: format!("unknown family `{other}`") }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PTS: [[f64; 3]; 6] = [
        [0.3, 0.7, -0.2],
        [-0.5, 1.9, 0.8],
        [0.1, 0.31, 0.95],
        [0.9, -0.45, -0.7],
        [-0.2, -1.4, 0.33],
        [0.65, -0.8, -0.9],
    ];

    fn assert_fine(u: &SolutionExpr, tol: f64) {
        let mut checked = 0;
        for p in PTS {
            if !u.admissible(p) {
                continue;
            }
            let (_, rel) = u.residual(p).unwrap();
            assert!(rel.abs() <= tol, "{} at {:?}: rel={rel}", u.name, p);
            checked += 1;
        }
        assert!(checked >= 3, "{}: too few admissible points", u.name);
    }

    #[test]
    fn trivial_solutions() {
        assert_eq!(sol_const(2.5).residual([0.1, 1.3, 0.2]).unwrap(), (0.0, 0.0));
        assert_eq!(sol_x().residual([0.1, 1.3, 0.2]).unwrap(), (0.0, 0.0));
        let (raw, rel) = witness_y().residual([0.0, 1.3, 0.0]).unwrap();
        assert!((raw - 1.3).abs() < 1e-14 && rel != 0.0);
    }

    #[test]
    fn heat_families_solve_heat() {
        for theta in [
            heat_kernel(1.0, 0.0),
            heat_poly(1),
            heat_poly(2),
            heat_poly(5),
            heat_exp_mode(0.8),
        ] {
            for z in [[0.5, 0.7], [0.1, -1.2], [1.4, 0.05]] {
                let (_, rel) = residual_heat(&theta, z).unwrap();
                assert!(rel.abs() < 1e-12, "{} at {z:?}", theta.0.name);
            }
        }
        // poly(2) residual is exactly zero: ∂1 = 2 and ∂22 = 2
        let (raw, _) = residual_heat(&heat_poly(2), [0.3, 0.9]).unwrap();
        assert_eq!(raw, 0.0);
    }

    #[test]
    fn invsq_families_solve_their_equation() {
        let p34 = stationary_power(0.75, true).unwrap();
        for z in [[0.2, 0.8], [-0.4, 1.7], [0.9, 0.33]] {
            let (raw, _) = residual_invsq(&p34, z).unwrap();
            assert!(raw.abs() < 1e-13);
        }
        // mu~ = 0 degenerates to the free heat linear solution z2
        let p0 = stationary_power(0.0, true).unwrap();
        let j = p0.fn2.jet([0.1, 1.3], 2).unwrap();
        assert!((j.value() - 1.3).abs() < 1e-14);
        assert!(stationary_power(-0.3, true).is_err());
        // every shipped quarter seed passes its residual test
        for idx in 0..4 {
            let v = quarter_seed(idx).unwrap();
            for z in [[0.2, 0.8], [0.6, 1.7], [-0.3, 0.5]] {
                let (_, rel) = residual_invsq(&v, z).unwrap();
                assert!(rel.abs() < 1e-11, "seed {idx} at {z:?} rel={rel}");
            }
        }
    }

    #[test]
    fn darboux_images_are_three_quarter_solutions() {
        // the sqrt seed maps to zero
        let zero = darboux_from(&quarter_seed(0).unwrap()).unwrap();
        assert!(zero.fn2.jet([0.4, 1.2], 3).unwrap().value().abs() < 1e-13);
        for idx in 1..4 {
            let w = darboux_from(&quarter_seed(idx).unwrap()).unwrap();
            assert_eq!(w.mu_tilde, 0.75);
            for z in [[0.2, 0.8], [0.6, 1.7]] {
                let (_, rel) = residual_invsq(&w, z).unwrap();
                assert!(rel.abs() < 1e-10, "darboux({idx}) at {z:?} rel={rel}");
            }
        }
        assert!(darboux_from(&stationary_power(0.75, true).unwrap()).is_err());
    }

    #[test]
    fn sol_heat1_passes_residuals_on_both_branches() {
        for theta in [heat_poly(1), heat_kernel(1.0, 0.0), heat_poly(0)] {
            let u = sol_heat1(&theta, Eps::SgnX);
            assert_fine(&u, 1e-10);
        }
        // fixed-branch members hold on their branch only
        let up = sol_heat1(&heat_kernel(1.0, 0.0), Eps::Plus);
        assert!(up.admissible([0.0, 0.5, 0.1]));
        assert!(!up.admissible([0.0, -0.5, 0.1]));
        assert_fine(&up, 1e-10);
    }

    #[test]
    fn sol_heat2_passes_residuals() {
        for theta in [heat_poly(0), heat_exp_mode(1.0), heat_poly(2), heat_kernel(1.0, 0.0)] {
            let u = sol_heat2(&theta);
            assert_fine(&u, 1e-9);
        }
    }

    #[test]
    fn sol_invsq_members() {
        // mu = 0: stationary power with mu~ = 3/4
        let u = sol_invsq(0.0, &stationary_power(0.75, true).unwrap(), Eps::SgnX).unwrap();
        assert_fine(&u, 1e-10);
        // mu = -3/16: mu~ = 0, heat-degenerate
        let u2 =
            sol_invsq(-3.0 / 16.0, &invsq_from_heat(&heat_kernel(1.0, 0.0)), Eps::SgnX).unwrap();
        assert_fine(&u2, 1e-9);
        // mu = 0.5: mu~ = 2.75
        let u3 = sol_invsq(0.5, &stationary_power(2.75, true).unwrap(), Eps::SgnX).unwrap();
        assert_fine(&u3, 1e-10);
        // mismatched coefficient is rejected
        assert!(matches!(
            sol_invsq(0.5, &stationary_power(0.75, true).unwrap(), Eps::SgnX),
            Err(SolError::SeedMismatch { .. })
        ));
    }

    #[test]
    fn hn_tuple_relations() {
        let theta = heat_poly(2);
        for eps in [1.0, -1.0] {
            let tuple = hn_tuple(2, &theta, eps).unwrap();
            for z in [[0.3, 0.4], [0.7, -0.6]] {
                for s in 0..2 {
                    let (_, rel) = hn_relation_residual(&tuple, eps, s, z).unwrap();
                    assert!(rel.abs() < 1e-10, "s={s} z={z:?} rel={rel}");
                }
            }
        }
        // n = 1 tuple is theta itself and closes with the heat equation
        let t1 = hn_tuple(1, &theta, 1.0).unwrap();
        assert_eq!(t1.len(), 1);
        let (_, rel) = hn_relation_residual(&t1, 1.0, 0, [0.2, 0.5]).unwrap();
        assert!(rel.abs() < 1e-12);
    }

    #[test]
    fn gen_solution1_solves_and_is_y_polynomial() {
        for (n, theta) in [(1, heat_poly(2)), (2, heat_kernel(1.0, 0.0)), (3, heat_poly(3))] {
            let u = gen_solution1(n, &theta).unwrap();
            assert_fine(&u, 1e-9);
            // annihilated by ∂_y^n exactly
            for p in PTS {
                if !u.admissible(p) {
                    continue;
                }
                let j = u.jet(p, n + 2).unwrap();
                let mut idx = [0usize; 3];
                idx[2] = n;
                assert_eq!(j.derivative(idx).unwrap(), 0.0, "n={n} at {p:?}");
            }
        }
        // n = 1 coincides with the log-map family
        let theta = heat_kernel(1.0, 0.0);
        let a = gen_solution1(1, &theta).unwrap();
        let b = sol_heat2(&theta);
        for p in PTS {
            let (va, vb) = (a.value(p).unwrap(), b.value(p).unwrap());
            assert!((va - vb).abs() < 1e-12 * (1.0 + vb.abs()));
        }
    }

    #[test]
    fn gen_solution2_members() {
        for idx in [0, 1, 2, 3] {
            let v = quarter_seed(idx).unwrap();
            let u = gen_solution2(&v, Eps::SgnX).unwrap();
            assert_fine(&u, 1e-9);
        }
        assert!(gen_solution2(&stationary_power(0.75, true).unwrap(), Eps::SgnX).is_err());
    }

    #[test]
    fn seed_language() {
        assert!(matches!(parse_seed("kernel(s0=1,x0=0)"), Ok(Seed::Heat(_))));
        assert!(matches!(parse_seed("poly(3)"), Ok(Seed::Heat(_))));
        assert!(matches!(parse_seed("expmode(lambda=-0.5)"), Ok(Seed::Heat(_))));
        assert!(matches!(parse_seed("power(0.75)"), Ok(Seed::InvSq(_))));
        assert!(matches!(parse_seed("darboux(1)"), Ok(Seed::InvSq(_))));
        assert!(parse_seed("poly(1.5)").is_err());
        assert!(parse_seed("spline(1)").is_err());
        assert!(parse_seed("poly").is_err());
    }

    #[test]
    fn linearity_of_residual() {
        let f = sol_heat2(&heat_poly(2));
        let g = sol_heat2(&heat_exp_mode(0.7));
        let combo = SolutionExpr::combine(&f, 2.0, &g, -3.0);
        for p in PTS {
            if !combo.admissible(p) {
                continue;
            }
            let rf = f.residual(p).unwrap().0;
            let rg = g.residual(p).unwrap().0;
            let rc = combo.residual(p).unwrap().0;
            assert!((rc - (2.0 * rf - 3.0 * rg)).abs() < 1e-11 * (1.0 + rc.abs()));
        }
    }
}
