//! Codimension-one Lie reductions and their canonical transformations.
//!
//! Each reduction case pairs invariant variables `z1, z2`, a multiplier
//! `A(t,x,y)` with ansatz `u = A · w(z1, z2)`, and a reduced equation
//! `R[w] = 0` such that the fine-equation residual of the lift factors as
//! `A · R[w]` pointwise:
//!
//! ```text
//! 1.1^μ      u = e^{μt} w(y, x)            z2 w_1 = z2^2 w_22 - μ w
//! 1.3^{1,μ}  u = e^{μt} w(t-y, x)          (1-z2) w_1 = z2^2 w_22 - μ w
//! 1.4^δ      u = e^{δy} w(t, x)            w_1 = z2^2 w_22 - δ z2 w
//! 1.5^{ν,μ}  u = |y|^μ w(t-ν ln|y|, x/y)   (1-νz2) w_1 = z2^2 w_22 + z2^2 w_2 - μ z2 w
//! 1.7^{ν,μ}  u = e^{μ atan y - xy/(y²+1)} w(t-ν atan y, x/(y²+1))
//!                                          (1-νz2) w_1 = z2^2 w_22 + z2(z2-μ) w
//! ```
//!
//! Every reduced equation maps to a heat equation with potential
//! `w~_1 = w~_22 + V(z~2) w~` by a change `z~1 = ±z1`, `z~2 = Z(z2)`,
//! `w~ = W(z1, z2) w` on a monotone branch of `Z`.  The potentials below
//! were re-derived from the transformation ansatz (`Z'^2 = ±a/z2^2`,
//! gauge condition on `W`, remainder collected on `w~`); the residual
//! machinery double-checks each branch, which pins down the sign of the
//! `1.3` potentials and the time reflection and `z2`-dependence of the
//! `1.7` ones.

use crate::jet::Jet;
use crate::lie::{EssVector, II, K, PT, PY};
use crate::solution::{PlaneFn, SolError, SolutionExpr};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseId {
    C11,
    C13,
    C14,
    C15,
    C17,
}

impl CaseId {
    pub fn label(&self) -> &'static str {
        match self {
            CaseId::C11 => "1.1",
            CaseId::C13 => "1.3",
            CaseId::C14 => "1.4",
            CaseId::C15 => "1.5",
            CaseId::C17 => "1.7",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReductionError {
    UnknownCase(String),
    BadParam(String),
    OutOfBranch { z2: f64, lo: f64, hi: f64 },
    RootFind(String),
}

impl fmt::Display for ReductionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReductionError::UnknownCase(id) => write!(f, "unknown reduction case `{id}`"),
            ReductionError::BadParam(msg) => write!(f, "{msg}"),
            ReductionError::OutOfBranch { z2, lo, hi } => {
                write!(f, "z2 = {z2} outside branch ({lo}, {hi})")
            }
            ReductionError::RootFind(msg) => write!(f, "inversion failed: {msg}"),
        }
    }
}

/// One instantiated reduction case.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionCase {
    pub id: CaseId,
    pub mu: f64,
    pub nu: f64,
    pub delta: f64,
}

impl fmt::Display for ReductionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.id {
            CaseId::C11 | CaseId::C13 => write!(f, "{}:mu={}", self.id.label(), self.mu),
            CaseId::C14 => write!(f, "{}:delta={}", self.id.label(), self.delta),
            CaseId::C15 | CaseId::C17 => {
                write!(f, "{}:nu={},mu={}", self.id.label(), self.nu, self.mu)
            }
        }
    }
}

pub fn case_11(mu: f64) -> ReductionCase {
    ReductionCase { id: CaseId::C11, mu, nu: 0.0, delta: 0.0 }
}

pub fn case_13(mu: f64) -> ReductionCase {
    ReductionCase { id: CaseId::C13, mu, nu: 0.0, delta: 0.0 }
}

pub fn case_14(delta: f64) -> Result<ReductionCase, ReductionError> {
    if delta != 0.0 && delta != 1.0 {
        return Err(ReductionError::BadParam(format!("delta must be 0 or 1, got {delta}")));
    }
    Ok(ReductionCase { id: CaseId::C14, mu: 0.0, nu: 0.0, delta })
}

pub fn case_15(nu: f64, mu: f64) -> Result<ReductionCase, ReductionError> {
    validate_nu_mu(nu, mu)?;
    Ok(ReductionCase { id: CaseId::C15, mu, nu, delta: 0.0 })
}

pub fn case_17(nu: f64, mu: f64) -> Result<ReductionCase, ReductionError> {
    validate_nu_mu(nu, mu)?;
    Ok(ReductionCase { id: CaseId::C17, mu, nu, delta: 0.0 })
}

fn validate_nu_mu(nu: f64, mu: f64) -> Result<(), ReductionError> {
    if nu < 0.0 {
        return Err(ReductionError::BadParam(format!("nu must be >= 0, got {nu}")));
    }
    if nu == 0.0 && mu < 0.0 {
        return Err(ReductionError::BadParam(format!(
            "mu must be >= 0 when nu = 0, got {mu}"
        )));
    }
    Ok(())
}

/// Parses `1.1:mu=-0.1875`, `1.4:delta=0`, `1.5:nu=1,mu=0.5` (values may
/// also be given positionally).
pub fn parse_case(id: &str) -> Result<ReductionCase, ReductionError> {
    let (case_str, params) = match id.split_once(':') {
        Some((c, p)) => (c, p),
        None => (id, ""),
    };
    let mut values: Vec<(Option<&str>, f64)> = Vec::new();
    if !params.trim().is_empty() {
        for part in params.split(',') {
            let part = part.trim();
            let (key, value) = match part.split_once('=') {
                Some((k, v)) => (Some(k.trim()), v.trim()),
                None => (None, part),
            };
            let v: f64 = value
                .parse()
                .map_err(|_| ReductionError::BadParam(format!("bad number `{value}`")))?;
            values.push((key, v));
        }
    }
    let get = |key: &str, pos: usize, default: Option<f64>| -> Result<f64, ReductionError> {
        for (k, v) in &values {
            if *k == Some(key) {
                return Ok(*v);
            }
        }
        if let Some((None, v)) = values.get(pos) {
            return Ok(*v);
        }
        default.ok_or_else(|| ReductionError::BadParam(format!("missing parameter `{key}`")))
    };
    match case_str.trim() {
        "1.1" => Ok(case_11(get("mu", 0, None)?)),
        "1.3" => Ok(case_13(get("mu", 0, None)?)),
        "1.4" => case_14(get("delta", 0, None)?),
        "1.5" => case_15(get("nu", 0, None)?, get("mu", 1, Some(0.0))?),
        "1.7" => case_17(get("nu", 0, None)?, get("mu", 1, Some(0.0))?),
        other => Err(ReductionError::UnknownCase(other.to_string())),
    }
}

impl ReductionCase {
    /// Generator of the symmetry subalgebra this case reduces by.
    pub fn generator(&self) -> EssVector<f64> {
        let mut v = EssVector::zero();
        match self.id {
            CaseId::C11 => {
                v.0[PT] = 1.0;
                v.0[II] = self.mu;
            }
            CaseId::C13 => {
                v.0[PY] = 1.0;
                v.0[PT] = 1.0;
                v.0[II] = self.mu;
            }
            CaseId::C14 => {
                v.0[PY] = 1.0;
                v.0[II] = self.delta;
            }
            CaseId::C15 => {
                v.0[crate::lie::D] = 1.0;
                v.0[PT] = self.nu;
                v.0[II] = self.mu;
            }
            CaseId::C17 => {
                v.0[PY] = 1.0;
                v.0[K] = 1.0;
                v.0[PT] = self.nu;
                v.0[II] = self.mu;
            }
        }
        v
    }

    /// Catalog label of the linked subalgebra (the merged `1.5` family
    /// covers both the `s1.5` and `s1.6` columns).
    pub fn subalgebra_label(&self) -> String {
        match self.id {
            CaseId::C11 => format!("s1.1:mu={}", self.mu),
            CaseId::C13 => format!("s1.3:mu={}", self.mu),
            CaseId::C14 => format!("s1.4:delta={}", self.delta),
            CaseId::C15 => {
                if self.nu > 0.0 {
                    format!("s1.5:nu={},mu={}", self.nu, self.mu)
                } else {
                    format!("s1.6:nu={}", self.mu)
                }
            }
            CaseId::C17 => format!("s1.7:nu={},mu={}", self.nu, self.mu),
        }
    }

    /// Jets of the invariants `(z1, z2)` at a point.
    pub fn invariant_jets(&self, p: [f64; 3], order: usize) -> Result<(Jet, Jet), SolError> {
        let vars = Jet::vars(order.max(2), &p);
        let (t, x, y) = (&vars[0], &vars[1], &vars[2]);
        Ok(match self.id {
            CaseId::C11 => (y.clone(), x.clone()),
            CaseId::C13 => (t.sub(y), x.clone()),
            CaseId::C14 => (t.clone(), x.clone()),
            CaseId::C15 => (
                t.sub(&y.abs_branch()?.ln()?.scale(self.nu)),
                x.div(y)?,
            ),
            CaseId::C17 => {
                let den = y.mul(y).add_scalar(1.0);
                (t.sub(&y.atan().scale(self.nu)), x.div(&den)?)
            }
        })
    }

    /// Jet of the ansatz multiplier `A(t,x,y)`.
    pub fn multiplier_jet(&self, p: [f64; 3], order: usize) -> Result<Jet, SolError> {
        let vars = Jet::vars(order.max(2), &p);
        let (t, x, y) = (&vars[0], &vars[1], &vars[2]);
        Ok(match self.id {
            CaseId::C11 | CaseId::C13 => t.scale(self.mu).exp(),
            CaseId::C14 => y.scale(self.delta).exp(),
            CaseId::C15 => y.abs_branch()?.powf(self.mu)?,
            CaseId::C17 => {
                let den = y.mul(y).add_scalar(1.0);
                y.atan().scale(self.mu).sub(&x.mul(y).div(&den)?).exp()
            }
        })
    }

    /// Point values of the invariants.
    pub fn invariants(&self, p: [f64; 3]) -> Result<[f64; 2], SolError> {
        let (z1, z2) = self.invariant_jets(p, 2)?;
        Ok([z1.value(), z2.value()])
    }

    fn point_admissible(&self, p: [f64; 3]) -> bool {
        match self.id {
            CaseId::C15 => p[2] != 0.0 && p[1] != 0.0,
            _ => p[1] != 0.0,
        }
    }

    /// The ansatz `u = A · w(z1, z2)` as a fine-equation claim; if `w`
    /// satisfies the reduced equation, the lift passes the residual test.
    pub fn ansatz_lift(&self, w: &PlaneFn) -> SolutionExpr {
        let case = self.clone();
        let adm_case = self.clone();
        let w_in = w.clone();
        let w_adm = w.clone();
        SolutionExpr::new(
            format!("lift[{}]({})", self, w.name),
            crate::solution::PdeTag::Fine,
            format!("x = 0{}", if self.id == CaseId::C15 { ", y = 0" } else { "" }),
            "codimension-one invariant ansatz".to_string(),
            move |p, order| {
                let order = order.max(2);
                let (z1, z2) = case.invariant_jets(p, order)?;
                let a = case.multiplier_jet(p, order)?;
                let wj = w_in.jet([z1.value(), z2.value()], order)?;
                Ok(a.mul(&Jet::compose2(&wj, [&z1, &z2])))
            },
            move |p| {
                adm_case.point_admissible(p)
                    && adm_case
                        .invariants(p)
                        .map(|z| w_adm.admissible(z))
                        .unwrap_or(false)
            },
        )
    }

    /// Residual of the reduced equation at a plane point, `(raw, relative)`.
    pub fn reduced_residual(&self, w: &PlaneFn, z: [f64; 2]) -> Result<(f64, f64), SolError> {
        let j = w.jet(z, 2)?;
        let w0 = j.value();
        let w1 = j.derivative([1, 0, 0])?;
        let w2 = j.derivative([0, 1, 0])?;
        let w22 = j.derivative([0, 2, 0])?;
        let z2 = z[1];
        let (terms, weight): (Vec<f64>, f64) = match self.id {
            CaseId::C11 => (
                vec![z2 * w1, -z2 * z2 * w22, self.mu * w0],
                z2.abs() + z2 * z2 + self.mu.abs(),
            ),
            CaseId::C13 => (
                vec![(1.0 - z2) * w1, -z2 * z2 * w22, self.mu * w0],
                (1.0 - z2).abs() + z2 * z2 + self.mu.abs(),
            ),
            CaseId::C14 => (
                vec![w1, -z2 * z2 * w22, self.delta * z2 * w0],
                1.0 + z2 * z2 + (self.delta * z2).abs(),
            ),
            CaseId::C15 => (
                vec![
                    (1.0 - self.nu * z2) * w1,
                    -z2 * z2 * w22,
                    -z2 * z2 * w2,
                    self.mu * z2 * w0,
                ],
                (1.0 - self.nu * z2).abs() + 2.0 * z2 * z2 + (self.mu * z2).abs(),
            ),
            CaseId::C17 => (
                vec![
                    (1.0 - self.nu * z2) * w1,
                    -z2 * z2 * w22,
                    -z2 * (z2 - self.mu) * w0,
                ],
                (1.0 - self.nu * z2).abs() + z2 * z2 + (z2 * (z2 - self.mu)).abs(),
            ),
        };
        let raw: f64 = terms.iter().sum();
        let scale: f64 = terms.iter().map(|t| t.abs()).sum();
        let noise = 64.0 * f64::EPSILON * j.coeff_norm1() * (1.0 + weight);
        let rel = if scale <= noise { 0.0 } else { raw / scale };
        Ok((raw, rel))
    }

    /// Canonical-map branches of this case (instantiated parameters).
    pub fn branches(&self) -> Vec<CanonicalMap> {
        match self.id {
            CaseId::C11 => vec![CanonicalMap::new(self.clone(), Branch::Main)],
            CaseId::C13 => vec![
                CanonicalMap::new(self.clone(), Branch::Lo),
                CanonicalMap::new(self.clone(), Branch::Hi),
            ],
            CaseId::C14 => vec![CanonicalMap::new(self.clone(), Branch::Log)],
            CaseId::C15 | CaseId::C17 => {
                if self.nu > 0.0 {
                    vec![
                        CanonicalMap::new(self.clone(), Branch::Lo),
                        CanonicalMap::new(self.clone(), Branch::Hi),
                    ]
                } else {
                    vec![CanonicalMap::new(self.clone(), Branch::Log)]
                }
            }
        }
    }
}

/// The complete case list at representative parameters, with their
/// canonical branches.
pub fn case_table(mu: f64, nu: f64, delta: f64) -> Vec<(ReductionCase, Vec<CanonicalMap>)> {
    let abs_mu = mu.abs();
    let pos_nu = if nu > 0.0 { nu } else { 1.0 };
    let cases = vec![
        case_11(mu),
        case_13(mu),
        case_14(delta).expect("delta validated by caller"),
        case_15(pos_nu, mu).expect("nu > 0"),
        case_15(0.0, abs_mu).expect("mu >= 0 at nu = 0"),
        case_17(pos_nu, mu).expect("nu > 0"),
        case_17(0.0, abs_mu).expect("mu >= 0 at nu = 0"),
    ];
    cases
        .into_iter()
        .map(|c| {
            let b = c.branches();
            (c, b)
        })
        .collect()
}

/// Branch of a canonical transformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `z~2 = 2 √|z2|` (case 1.1).
    Main,
    /// `ν z2 < 1`: `z~2 = 2s + ln|(s-1)/(s+1)|`, `s = √(1-νz2)`.
    Lo,
    /// `ν z2 > 1`: `z~2 = 2s - 2 atan s`, `s = √(νz2-1)`, with `z~1 = -z1`.
    Hi,
    /// `z~2 = ln|z2|` (cases 1.4, 1.5 and 1.7 with ν = 0).
    Log,
}

impl Branch {
    pub fn name(&self) -> &'static str {
        match self {
            Branch::Main => "main",
            Branch::Lo => "lo",
            Branch::Hi => "hi",
            Branch::Log => "log",
        }
    }
}

/// A monotone branch of the point transformation taking a reduced equation
/// to `w~_1 = w~_22 + V(z~2) w~`.
#[derive(Debug, Clone)]
pub struct CanonicalMap {
    pub case: ReductionCase,
    pub branch: Branch,
    /// Default sampling interval of `z2` inside the branch.
    pub z2_domain: (f64, f64),
}

impl fmt::Display for CanonicalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.case, self.branch.name())
    }
}

impl CanonicalMap {
    pub fn new(case: ReductionCase, branch: Branch) -> Self {
        let nu = match case.id {
            CaseId::C13 => 1.0,
            _ if case.nu > 0.0 => case.nu,
            _ => 1.0,
        };
        let z2_domain = match branch {
            Branch::Main | Branch::Log => (0.15, 3.0),
            Branch::Lo => (0.03 / nu, 0.93 / nu),
            Branch::Hi => (1.07 / nu, 4.0 / nu),
        };
        CanonicalMap { case, branch, z2_domain }
    }

    /// The coefficient in `ν z2 ≶ 1` branch conditions: case `1.3` carries
    /// an implicit `ν = 1` in its reduced equation `(1 - z2) w_1 = …`.
    fn eff_nu(&self) -> f64 {
        match self.case.id {
            CaseId::C13 => 1.0,
            _ => self.case.nu,
        }
    }

    /// Sign `s` in `z~1 = s · z1` (for case 1.1 it is `sgn z2`).
    pub fn time_sign(&self, z2: f64) -> f64 {
        match (self.case.id, self.branch) {
            (CaseId::C11, _) => z2.signum(),
            (_, Branch::Hi) => -1.0,
            _ => 1.0,
        }
    }

    pub fn in_branch(&self, z2: f64) -> bool {
        let nu = self.eff_nu();
        match self.branch {
            Branch::Main | Branch::Log => z2 != 0.0,
            Branch::Lo => z2 != 0.0 && nu * z2 < 1.0,
            Branch::Hi => nu * z2 > 1.0,
        }
    }

    /// Jet of `z~2 = Z(z2)`.
    pub fn forward_jet(&self, z2: &Jet) -> Result<Jet, SolError> {
        Ok(match self.branch {
            Branch::Main => z2.abs_branch()?.sqrt()?.scale(2.0),
            Branch::Log => z2.abs_branch()?.ln()?,
            Branch::Lo => {
                let s = z2.scale(-self.eff_nu()).add_scalar(1.0).sqrt()?;
                let ratio = s.add_scalar(-1.0).abs_branch()?.ln()?.sub(&s.add_scalar(1.0).ln()?);
                s.scale(2.0).add(&ratio)
            }
            Branch::Hi => {
                let s = z2.scale(self.eff_nu()).add_scalar(-1.0).sqrt()?;
                s.scale(2.0).sub(&s.atan().scale(2.0))
            }
        })
    }

    pub fn forward(&self, z2: f64) -> Result<f64, SolError> {
        let j = Jet::var(1, 2, 0, z2).map_err(SolError::from)?;
        Ok(self.forward_jet(&j)?.value())
    }

    /// Jet of the weight `W(z1, z2)` with `w~ = W · w`.
    pub fn weight_jet(&self, z1: &Jet, z2: &Jet) -> Result<Jet, SolError> {
        let nu = self.case.nu;
        Ok(match (self.case.id, self.branch) {
            (CaseId::C11, _) => z2.abs_branch()?.powf(-0.25)?,
            (CaseId::C13, Branch::Lo) => {
                let s = z2.scale(-1.0).add_scalar(1.0);
                s.powf(0.25)?.mul(&z2.abs_branch()?.powf(-0.5)?)
            }
            (CaseId::C13, _) => {
                let s = z2.add_scalar(-1.0);
                s.powf(0.25)?.mul(&z2.powf(-0.5)?)
            }
            (CaseId::C14, _) => z1.scale(0.25).exp().mul(&z2.abs_branch()?.powf(-0.5)?),
            (CaseId::C15, Branch::Lo) => {
                let s = z2.scale(-nu).add_scalar(1.0);
                z2.scale(0.5)
                    .exp()
                    .mul(&z2.abs_branch()?.powf(-0.5)?)
                    .mul(&s.powf(0.25)?)
            }
            (CaseId::C15, Branch::Hi) => {
                let s = z2.scale(nu).add_scalar(-1.0);
                z2.scale(0.5).exp().mul(&z2.powf(-0.5)?).mul(&s.powf(0.25)?)
            }
            (CaseId::C15, _) => z1
                .scale(0.25)
                .add(&z2.scale(0.5))
                .exp()
                .mul(&z2.abs_branch()?.powf(-0.5)?),
            (CaseId::C17, Branch::Lo) => {
                let s = z2.scale(-nu).add_scalar(1.0);
                s.powf(0.25)?.mul(&z2.abs_branch()?.powf(-0.5)?)
            }
            (CaseId::C17, Branch::Hi) => {
                let s = z2.scale(nu).add_scalar(-1.0);
                s.powf(0.25)?.mul(&z2.powf(-0.5)?)
            }
            (CaseId::C17, _) => z1.scale(0.25).exp().mul(&z2.abs_branch()?.powf(-0.5)?),
        })
    }

    /// Jet of the potential `V` as a function of the source variable `z2`.
    pub fn potential_jet(&self, z2: &Jet) -> Result<Jet, SolError> {
        let mu = self.case.mu;
        let nu = self.case.nu;
        let bracket_sign = match self.branch {
            Branch::Lo => 1.0,
            Branch::Hi => -1.0,
            _ => 0.0,
        };
        Ok(match (self.case.id, self.branch) {
            // V = -(4μ + 3/4) / z~2^2 with z~2^2 = 4|z2|
            (CaseId::C11, _) => z2
                .abs_branch()?
                .recip()?
                .scale(-(4.0 * mu + 0.75) / 4.0),
            (CaseId::C13, _) => {
                // ±(1/16) [ (16μ+3)/q - 6/q^2 - 5/q^3 ],  q = z2 - 1
                let q = z2.add_scalar(-1.0).recip()?;
                let q2 = q.mul(&q);
                let q3 = q2.mul(&q);
                q.scale(16.0 * mu + 3.0)
                    .sub(&q2.scale(6.0))
                    .sub(&q3.scale(5.0))
                    .scale(bracket_sign / 16.0)
            }
            (CaseId::C14, _) => z2.scale(-self.case.delta),
            (CaseId::C15, Branch::Lo | Branch::Hi) => {
                // ±(1/16) [ (4z2^2 + 16μ z2 + 3)/q - 6/q^2 - 5/q^3 ], q = ν z2 - 1
                let q = z2.scale(nu).add_scalar(-1.0).recip()?;
                let q2 = q.mul(&q);
                let q3 = q2.mul(&q);
                let head = z2.mul(z2).scale(4.0).add(&z2.scale(16.0 * mu)).add_scalar(3.0);
                head.mul(&q)
                    .sub(&q2.scale(6.0))
                    .sub(&q3.scale(5.0))
                    .scale(bracket_sign / 16.0)
            }
            (CaseId::C15, _) => z2.mul(z2).scale(-0.25).sub(&z2.scale(mu)),
            (CaseId::C17, Branch::Lo | Branch::Hi) => {
                // ±(1/16) [ (16 z2 (μ - z2) + 3)/q - 6/q^2 - 5/q^3 ], q = ν z2 - 1
                let q = z2.scale(nu).add_scalar(-1.0).recip()?;
                let q2 = q.mul(&q);
                let q3 = q2.mul(&q);
                let head = z2.mul(&z2.scale(-1.0).add_scalar(mu)).scale(16.0).add_scalar(3.0);
                head.mul(&q)
                    .sub(&q2.scale(6.0))
                    .sub(&q3.scale(5.0))
                    .scale(bracket_sign / 16.0)
            }
            (CaseId::C17, _) => z2.mul(z2).sub(&z2.scale(mu)),
        })
    }

    pub fn potential(&self, z2: f64) -> Result<f64, SolError> {
        let j = Jet::var(1, 2, 0, z2).map_err(SolError::from)?;
        Ok(self.potential_jet(&j)?.value())
    }

    /// Numeric inverse `z2 = Z^{-1}(z~2)` on the branch: bisection bracket
    /// plus Newton polish to `|Z(z2) - z~2| ≤ 1e-12`.
    pub fn invert(&self, zt2: f64) -> Result<f64, ReductionError> {
        let f = |z2: f64| self.forward(z2).expect("in-branch evaluation");
        let (mut lo, mut hi) = self.z2_domain;
        // widen the bracket geometrically if needed
        for _ in 0..80 {
            let (flo, fhi) = (f(lo), f(hi));
            if (flo - zt2) * (fhi - zt2) <= 0.0 {
                break;
            }
            let span = hi - lo;
            let increasing = fhi > flo;
            if (increasing && zt2 < flo) || (!increasing && zt2 > flo) {
                lo = (lo - span).max(branch_floor(self));
            } else {
                hi += span;
                if let Some(cap) = branch_cap(self) {
                    hi = hi.min(cap);
                }
            }
        }
        let (mut lo, mut hi) = (lo, hi);
        if (f(lo) - zt2) * (f(hi) - zt2) > 0.0 {
            return Err(ReductionError::RootFind(format!(
                "no bracket for z~2 = {zt2} in ({lo}, {hi})"
            )));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(lo) - zt2) * (f(mid) - zt2) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-14 * (1.0 + hi.abs()) {
                break;
            }
        }
        let mut z2 = 0.5 * (lo + hi);
        // Newton polish using the jet derivative
        for _ in 0..6 {
            let j = Jet::var(1, 2, 0, z2).expect("jet var");
            let fw = self.forward_jet(&j).map_err(|e| ReductionError::RootFind(format!("{e}")))?;
            let err = fw.value() - zt2;
            let slope = fw.derivative([1, 0, 0]).expect("first derivative");
            if slope == 0.0 {
                break;
            }
            z2 -= err / slope;
        }
        let check = f(z2);
        if (check - zt2).abs() > 1e-12 * (1.0 + zt2.abs()) {
            return Err(ReductionError::RootFind(format!(
                "|Z(z2) - z~2| = {} at z2 = {z2}",
                (check - zt2).abs()
            )));
        }
        Ok(z2)
    }

    /// Jet of the inverse function at `z~2` (series inversion of the
    /// forward jet around the numeric root).
    fn inverse_jet(&self, zt2: f64, order: usize) -> Result<(f64, Vec<f64>), ReductionError> {
        let z20 = self.invert(zt2)?;
        let j = Jet::var(1, order.max(2), 0, z20).expect("jet var");
        let fw = self
            .forward_jet(&j)
            .map_err(|e| ReductionError::RootFind(format!("{e}")))?;
        let mut c = Vec::with_capacity(order + 1);
        for k in 0..=order.max(2) {
            c.push(fw.coeff([k, 0, 0]));
        }
        let inv = invert_series(&c, order.max(2));
        Ok((z20, inv))
    }

    /// Pull a canonical-form solution back to the reduced variables:
    /// `w(z1, z2) = w~(s z1, Z(z2)) / W(z1, z2)`.
    pub fn pull(&self, wt: &PlaneFn) -> PlaneFn {
        let map = self.clone();
        let adm_map = self.clone();
        let wt_in = wt.clone();
        let wt_adm = wt.clone();
        PlaneFn::new(
            format!("pull[{self}]({})", wt.name),
            move |z, order| {
                let order = order.max(2);
                if !map.in_branch(z[1]) {
                    return Err(SolError::Singular {
                        locus: format!("branch {}", map.branch.name()),
                        point: [z[0], z[1], 0.0],
                    });
                }
                let vars = Jet::vars(order, &z);
                let (z1, z2) = (&vars[0], &vars[1]);
                let s = map.time_sign(z[1]);
                let arg1 = z1.scale(s);
                let arg2 = map.forward_jet(z2)?;
                let wtj = wt_in.jet([arg1.value(), arg2.value()], order)?;
                let num = Jet::compose2(&wtj, [&arg1, &arg2]);
                let weight = map.weight_jet(z1, z2)?;
                num.div(&weight).map_err(SolError::from)
            },
            move |z| {
                if !adm_map.in_branch(z[1]) {
                    return false;
                }
                let s = adm_map.time_sign(z[1]);
                match adm_map.forward(z[1]) {
                    Ok(zt2) => wt_adm.admissible([s * z[0], zt2]),
                    Err(_) => false,
                }
            },
        )
    }

    /// Push a reduced-equation solution forward through the map:
    /// `w~(z~1, z~2) = W(s z~1, ζ(z~2)) · w(s z~1, ζ(z~2))`.
    pub fn push(&self, w: &PlaneFn) -> PlaneFn {
        let map = self.clone();
        let adm_map = self.clone();
        let w_in = w.clone();
        let w_adm = w.clone();
        PlaneFn::new(
            format!("push[{self}]({})", w.name),
            move |zt, order| {
                let order = order.max(2);
                let (z20, inv_series) = map
                    .inverse_jet(zt[1], order)
                    .map_err(|e| SolError::BadFamily(format!("{e}")))?;
                let vars = Jet::vars(order, &zt);
                let (zt1, zt2) = (&vars[0], &vars[1]);
                let zeta = zt2.compose_series(&inv_series[..=order]);
                let s = map.time_sign(z20);
                let z1 = zt1.scale(s);
                let wj = w_in.jet([z1.value(), z20], order)?;
                let inner = Jet::compose2(&wj, [&z1, &zeta]);
                let weight = map.weight_jet(&z1, &zeta)?;
                Ok(weight.mul(&inner))
            },
            move |zt| match adm_map.invert(zt[1]) {
                Ok(z20) => {
                    let s = adm_map.time_sign(z20);
                    w_adm.admissible([s * zt[0], z20])
                }
                Err(_) => false,
            },
        )
    }

    /// Residual of the mapped equation `w~_1 - w~_22 - V(z~2) w~` at a
    /// canonical point, with the potential evaluated through the numeric
    /// inverse.
    pub fn mapped_residual(&self, wt: &PlaneFn, zt: [f64; 2]) -> Result<(f64, f64), SolError> {
        let j = wt.jet(zt, 2)?;
        let z2 = self
            .invert(zt[1])
            .map_err(|e| SolError::BadFamily(format!("{e}")))?;
        let v = self.potential(z2)?;
        let terms = [
            j.derivative([1, 0, 0])?,
            -j.derivative([0, 2, 0])?,
            -v * j.value(),
        ];
        let raw: f64 = terms.iter().sum();
        let scale: f64 = terms.iter().map(|t| t.abs()).sum();
        let noise = 64.0 * f64::EPSILON * j.coeff_norm1() * (2.0 + v.abs());
        Ok((raw, if scale <= noise { 0.0 } else { raw / scale }))
    }

    /// Builds a local power-series solution (Cauchy germ) of the mapped
    /// equation at a canonical base point: the profile supplies the
    /// `z~1`-independent Taylor data and the equation fills in the time
    /// derivatives.  The germ satisfies the mapped equation to jet
    /// accuracy at its base point, which makes pulling it back a genuine
    /// end-to-end test of the branch data: a wrong potential breaks the
    /// fine-equation residual of the lift.
    pub fn germ(
        &self,
        z1_star: f64,
        z2_star: f64,
        profile: &[f64],
        order: usize,
    ) -> Result<PlaneFn, SolError> {
        if !self.in_branch(z2_star) {
            return Err(SolError::Singular {
                locus: format!("branch {}", self.branch.name()),
                point: [z1_star, z2_star, 0.0],
            });
        }
        let s = self.time_sign(z2_star);
        let zt_star = [s * z1_star, self.forward(z2_star)?];
        // potential coefficients in the canonical variable, to high order
        let wide = 2 * order;
        let (_, inv_series) = self
            .inverse_jet(zt_star[1], wide)
            .map_err(|e| SolError::BadFamily(format!("{e}")))?;
        let zt2_var = Jet::var(1, wide, 0, zt_star[1]).map_err(SolError::from)?;
        let zeta = zt2_var.compose_series(&inv_series);
        let vj = self.potential_jet(&zeta)?;
        let mut vc = Vec::with_capacity(wide + 1);
        for k in 0..=wide {
            vc.push(vj.coeff([k, 0, 0]));
        }
        // a[m][j]: monomial coefficients; recursion from
        // (m+1) a[m+1][j] = (j+1)(j+2) a[m][j+2] + Σ V_i a[m][j-i]
        let mut a = vec![vec![0.0f64; wide + 3]; order + 1];
        for j in 0..=wide {
            a[0][j] = if j < profile.len() { profile[j] } else { 0.0 };
        }
        for m in 0..order {
            for j in 0..=wide.saturating_sub(2 * (m + 1)) {
                let diffusion = ((j + 1) * (j + 2)) as f64 * a[m][j + 2];
                let mut source = 0.0;
                for i in 0..=j {
                    source += vc[i] * a[m][j - i];
                }
                a[m + 1][j] = (diffusion + source) / (m + 1) as f64;
            }
        }
        let mut jet = Jet::constant(2, order, 0.0).with_base([zt_star[0], zt_star[1], 0.0]);
        for m in 0..=order {
            for j in 0..=order - m {
                jet.set_coeff([m, j, 0], a[m][j]);
            }
        }
        let name = format!("germ[{self}]@({},{})", zt_star[0], zt_star[1]);
        let base = zt_star;
        Ok(PlaneFn::new(
            name,
            move |z, req_order| {
                if (z[0] - base[0]).abs() > 1e-9 || (z[1] - base[1]).abs() > 1e-9 {
                    return Err(SolError::Singular {
                        locus: "germ is local to its base point".to_string(),
                        point: [z[0], z[1], 0.0],
                    });
                }
                Ok(jet.truncate(req_order.min(jet.order())))
            },
            move |z| (z[0] - base[0]).abs() <= 1e-9 && (z[1] - base[1]).abs() <= 1e-9,
        ))
    }
}

fn branch_floor(map: &CanonicalMap) -> f64 {
    match map.branch {
        Branch::Main | Branch::Log | Branch::Lo => 1e-12,
        Branch::Hi => 1.0 / map.eff_nu() + 1e-12,
    }
}

fn branch_cap(map: &CanonicalMap) -> Option<f64> {
    match map.branch {
        Branch::Lo => Some(1.0 / map.eff_nu() - 1e-12),
        _ => None,
    }
}

/// Inverts a power series `f(h) = c1 h + c2 h^2 + …` (constant dropped):
/// returns `g` with `f(g(w)) = w` to the requested order, `g[0] = c[0]`
/// kept as the constant offset of the inverse.
fn invert_series(c: &[f64], order: usize) -> Vec<f64> {
    let mut g = vec![0.0; order + 1];
    g[0] = 0.0;
    if order >= 1 {
        g[1] = 1.0 / c[1];
    }
    let mut powers: Vec<Vec<f64>> = vec![vec![0.0; order + 1]; order + 1];
    powers[0][0] = 1.0;
    for k in 2..=order {
        // recompute powers of the partial inverse (g[k] still zero)
        for j in 1..=k {
            let (head, tail) = powers.split_at_mut(j);
            let dst = &mut tail[0];
            for v in dst.iter_mut() {
                *v = 0.0;
            }
            let prev = &head[j - 1];
            for (i, pv) in prev.iter().enumerate().take(order + 1) {
                if *pv == 0.0 {
                    continue;
                }
                for (l, gv) in g.iter().enumerate().take(order + 1 - i) {
                    if l == 0 {
                        continue;
                    }
                    dst[i + l] += pv * gv;
                }
            }
        }
        // coefficient of w^k in Σ_j c_j g(w)^j must vanish
        let mut acc = 0.0;
        for j in 2..=k {
            if j < c.len() {
                acc += c[j] * powers[j][k];
            }
        }
        g[k] = -acc / c[1];
    }
    g
}

/// Applies the realized generator vector field to a scalar expression of
/// `(t, x, y)` given as a jet: `ξ f_t + η f_x + φ f_y`.
pub fn directional_derivative(gen: &EssVector<f64>, f: &Jet, p: [f64; 3]) -> f64 {
    let [xi, eta, phi, _] = gen.vector_field_at(p);
    let ft = f.derivative([1, 0, 0]).unwrap_or(0.0);
    let fx = f.derivative([0, 1, 0]).unwrap_or(0.0);
    let fy = f.derivative([0, 0, 1]).unwrap_or(0.0);
    xi * ft + eta * fx + phi * fy
}
