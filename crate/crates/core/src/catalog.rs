//! Classified subalgebras of the essential algebra.
//!
//! The catalog lists the inequivalent proper subalgebras `s1.1 … s4.3` with
//! their parameter domains (`delta ∈ {0,1}`, `mu ∈ R`, `nu ≥ 0` or `> 0`
//! depending on the family).  Everything here runs over exact rationals:
//! bracket closure, normalizers, classifying invariants and the discrete
//! equivalence witnesses are rank computations that must not wobble.

use crate::lie::{pushforward_matrix, EssVec, EssVector, LieError, Mat2, II, PT};
use crate::linalg::{self, rat_int, Rat};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// A linear span of algebra vectors, expected to be bracket-closed.
#[derive(Debug, Clone)]
pub struct SubalgebraSpan {
    pub basis: Vec<EssVec>,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CatalogError {
    UnknownId(String),
    /// Parameter outside its declared domain.
    BadParam {
        family: String,
        param: &'static str,
        value: String,
    },
    WrongArity {
        family: String,
        expected: usize,
        got: usize,
    },
}

impl fmt::Display for CatalogError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogError::UnknownId(id) => write!(f, "unknown catalog id `{id}`"),
            CatalogError::BadParam { family, param, value } => {
                write!(f, "parameter {param}={value} outside domain for {family}")
            }
            CatalogError::WrongArity { family, expected, got } => {
                write!(f, "{family} takes {expected} parameter(s), got {got}")
            }
        }
    }
}

impl SubalgebraSpan {
    pub fn new(basis: Vec<EssVec>) -> Self {
        SubalgebraSpan { basis, label: None }
    }

    pub fn rows(&self) -> Vec<Vec<Rat>> {
        self.basis.iter().map(|v| v.0.to_vec()).collect()
    }

    pub fn dim(&self) -> usize {
        linalg::rank(&self.rows())
    }

    pub fn contains(&self, v: &EssVec) -> bool {
        linalg::in_span(&self.rows(), &v.0.to_vec())
    }

    pub fn span_eq(&self, other: &SubalgebraSpan) -> bool {
        linalg::span_eq(&self.rows(), &other.rows())
    }

    /// Closure under the bracket, checked exactly on all basis pairs.
    pub fn is_subalgebra(&self) -> bool {
        for a in &self.basis {
            for b in &self.basis {
                if !self.contains(&a.bracket(b)) {
                    return false;
                }
            }
        }
        true
    }
}

/// Normalizer `N(s) = {x : [x, b] ∈ s for all basis b of s}`, by exact
/// kernel computation over the rational structure constants.
pub fn normalizer(s: &SubalgebraSpan) -> Result<SubalgebraSpan, LieError> {
    if !s.is_subalgebra() {
        return Err(LieError::NotClosed);
    }
    let m = s.basis.len();
    let ncols = 5 + m * m; // unknowns: x, plus one coefficient column per (j, k)
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for (j, b) in s.basis.iter().enumerate() {
        // [x, b_j] - sum_k c_{jk} b_k = 0, five component equations
        for comp in 0..5 {
            let mut row = vec![Rat::zero(); ncols];
            for (xi, slot) in row.iter_mut().enumerate().take(5) {
                *slot = EssVec::basis(xi).bracket(b).0[comp].clone();
            }
            for (k, bk) in s.basis.iter().enumerate() {
                row[5 + j * m + k] = -bk.0[comp].clone();
            }
            rows.push(row);
        }
    }
    let kernel = linalg::kernel(&rows);
    let mut xs: Vec<Vec<Rat>> = kernel.into_iter().map(|v| v[..5].to_vec()).collect();
    let rank = linalg::rref(&mut xs);
    xs.truncate(rank);
    let basis = xs
        .into_iter()
        .filter(|r| r.iter().any(|c| !c.is_zero()))
        .map(|r| {
            EssVector([
                r[0].clone(),
                r[1].clone(),
                r[2].clone(),
                r[3].clone(),
                r[4].clone(),
            ])
        })
        .collect();
    Ok(SubalgebraSpan { basis, label: None })
}

/// Classifying invariants `(dim s, dim π_f s, dim s ∩ z, dim π_z s)`.
///
/// They satisfy `n = n̂ + ň` and `max(0, m − n̂) ≤ ň ≤ m ≤ 2`.
pub fn invariant_quadruple(
    s: &SubalgebraSpan,
) -> Result<(usize, usize, usize, usize), LieError> {
    if !s.is_subalgebra() {
        return Err(LieError::NotClosed);
    }
    let rows = s.rows();
    let n = linalg::rank(&rows);
    let levi: Vec<Vec<Rat>> = rows.iter().map(|r| r[..3].to_vec()).collect();
    let center: Vec<Vec<Rat>> = rows.iter().map(|r| r[3..].to_vec()).collect();
    let nhat = linalg::rank(&levi);
    let m = linalg::rank(&center);
    // s ∩ z is the kernel of the Levi projection restricted to s
    let ncheck = n - nhat;
    debug_assert!(ncheck <= m && m <= 2);
    Ok((n, nhat, ncheck, m))
}

/// Domain of a single family parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamDomain {
    Real,
    NonNeg,
    Pos,
    ZeroOne,
    ZeroOnly,
}

impl ParamDomain {
    pub fn admits(&self, v: &Rat) -> bool {
        match self {
            ParamDomain::Real => true,
            ParamDomain::NonNeg => !v.is_negative(),
            ParamDomain::Pos => v.is_positive(),
            ParamDomain::ZeroOne => v.is_zero() || v.is_one(),
            ParamDomain::ZeroOnly => v.is_zero(),
        }
    }
}

type Builder = fn(&[Rat]) -> Vec<EssVec>;

/// One parameterized family of the catalog.
#[derive(Clone)]
pub struct CatalogFamily {
    pub id: &'static str,
    pub dim: usize,
    pub params: &'static [(&'static str, ParamDomain)],
    builder: Builder,
}

impl fmt::Debug for CatalogFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CatalogFamily({})", self.id)
    }
}

impl CatalogFamily {
    pub fn instantiate(&self, params: &[Rat]) -> Result<SubalgebraSpan, CatalogError> {
        if params.len() != self.params.len() {
            return Err(CatalogError::WrongArity {
                family: self.id.to_string(),
                expected: self.params.len(),
                got: params.len(),
            });
        }
        for ((name, dom), value) in self.params.iter().zip(params) {
            if !dom.admits(value) {
                return Err(CatalogError::BadParam {
                    family: self.id.to_string(),
                    param: name,
                    value: format!("{value}"),
                });
            }
        }
        let basis = (self.builder)(params);
        let mut label = String::from(self.id);
        if !params.is_empty() {
            label.push(':');
            let parts: Vec<String> = self
                .params
                .iter()
                .zip(params)
                .map(|((name, _), v)| format!("{name}={v}"))
                .collect();
            label.push_str(&parts.join(","));
        }
        Ok(SubalgebraSpan { basis, label: Some(label) })
    }
}

fn v(py: i64, d: i64, k: i64, pt: i64, i: i64) -> EssVec {
    EssVector([rat_int(py), rat_int(d), rat_int(k), rat_int(pt), rat_int(i)])
}

fn with(base: EssVec, slot: usize, c: &Rat) -> EssVec {
    let mut out = base;
    out.0[slot] = c.clone();
    out
}

/// The parameterized list of inequivalent proper subalgebras, optionally
/// filtered by dimension.  The `s1.7` family appears twice: once with
/// `nu > 0, mu ∈ R` and once with `nu = 0, mu ≥ 0`.
pub fn catalog(dim_filter: Option<usize>) -> Vec<CatalogFamily> {
    use ParamDomain::*;
    let all: Vec<CatalogFamily> = vec![
        // 1D
        CatalogFamily {
            id: "s1.1",
            dim: 1,
            params: &[("mu", Real)],
            builder: |p| vec![with(v(0, 0, 0, 1, 0), II, &p[0])],
        },
        CatalogFamily { id: "s1.2", dim: 1, params: &[], builder: |_| vec![v(0, 0, 0, 0, 1)] },
        CatalogFamily {
            id: "s1.3",
            dim: 1,
            params: &[("mu", Real)],
            builder: |p| vec![with(v(1, 0, 0, 1, 0), II, &p[0])],
        },
        CatalogFamily {
            id: "s1.4",
            dim: 1,
            params: &[("delta", ZeroOne)],
            builder: |p| vec![with(v(1, 0, 0, 0, 0), II, &p[0])],
        },
        CatalogFamily {
            id: "s1.5",
            dim: 1,
            params: &[("nu", Pos), ("mu", Real)],
            builder: |p| vec![with(with(v(0, 1, 0, 0, 0), PT, &p[0]), II, &p[1])],
        },
        CatalogFamily {
            id: "s1.6",
            dim: 1,
            params: &[("nu", NonNeg)],
            builder: |p| vec![with(v(0, 1, 0, 0, 0), II, &p[0])],
        },
        CatalogFamily {
            id: "s1.7",
            dim: 1,
            params: &[("nu", Pos), ("mu", Real)],
            builder: |p| vec![with(with(v(1, 0, 1, 0, 0), PT, &p[0]), II, &p[1])],
        },
        CatalogFamily {
            id: "s1.7",
            dim: 1,
            params: &[("nu", ZeroOnly), ("mu", NonNeg)],
            builder: |p| vec![with(with(v(1, 0, 1, 0, 0), PT, &p[0]), II, &p[1])],
        },
        // 2D
        CatalogFamily {
            id: "s2.1",
            dim: 2,
            params: &[],
            builder: |_| vec![v(0, 0, 0, 1, 0), v(0, 0, 0, 0, 1)],
        },
        CatalogFamily {
            id: "s2.2",
            dim: 2,
            params: &[("delta", ZeroOne), ("mu", Real)],
            builder: |p| {
                vec![
                    with(v(1, 0, 0, 0, 0), II, &p[0]),
                    with(v(0, 0, 0, 1, 0), II, &p[1]),
                ]
            },
        },
        CatalogFamily {
            id: "s2.3",
            dim: 2,
            params: &[("delta", ZeroOne)],
            builder: |p| vec![with(v(1, 0, 0, 0, 0), PT, &p[0]), v(0, 0, 0, 0, 1)],
        },
        CatalogFamily {
            id: "s2.4",
            dim: 2,
            params: &[("nu", NonNeg), ("mu", Real)],
            builder: |p| {
                vec![
                    with(v(0, 1, 0, 0, 0), II, &p[0]),
                    with(v(0, 0, 0, 1, 0), II, &p[1]),
                ]
            },
        },
        CatalogFamily {
            id: "s2.5",
            dim: 2,
            params: &[("nu", NonNeg)],
            builder: |p| vec![with(v(0, 1, 0, 0, 0), PT, &p[0]), v(0, 0, 0, 0, 1)],
        },
        CatalogFamily {
            id: "s2.6",
            dim: 2,
            params: &[("nu", NonNeg), ("mu", Real)],
            builder: |p| {
                vec![
                    with(v(1, 0, 1, 0, 0), II, &p[0]),
                    with(v(0, 0, 0, 1, 0), II, &p[1]),
                ]
            },
        },
        CatalogFamily {
            id: "s2.7",
            dim: 2,
            params: &[("nu", NonNeg)],
            builder: |p| vec![with(v(1, 0, 1, 0, 0), PT, &p[0]), v(0, 0, 0, 0, 1)],
        },
        CatalogFamily {
            id: "s2.8",
            dim: 2,
            params: &[("nu", Pos), ("mu", Real)],
            builder: |p| {
                vec![
                    v(1, 0, 0, 0, 0),
                    with(with(v(0, 1, 0, 0, 0), PT, &p[0]), II, &p[1]),
                ]
            },
        },
        CatalogFamily {
            id: "s2.9",
            dim: 2,
            params: &[("nu", NonNeg)],
            builder: |p| vec![v(1, 0, 0, 0, 0), with(v(0, 1, 0, 0, 0), II, &p[0])],
        },
        // 3D
        CatalogFamily {
            id: "s3.1",
            dim: 3,
            params: &[],
            builder: |_| vec![v(1, 0, 0, 0, 0), v(0, 0, 0, 1, 0), v(0, 0, 0, 0, 1)],
        },
        CatalogFamily {
            id: "s3.2",
            dim: 3,
            params: &[],
            builder: |_| vec![v(0, 1, 0, 0, 0), v(0, 0, 0, 1, 0), v(0, 0, 0, 0, 1)],
        },
        CatalogFamily {
            id: "s3.3",
            dim: 3,
            params: &[],
            builder: |_| vec![v(1, 0, 1, 0, 0), v(0, 0, 0, 1, 0), v(0, 0, 0, 0, 1)],
        },
        CatalogFamily {
            id: "s3.4",
            dim: 3,
            params: &[("nu", NonNeg), ("mu", Real)],
            builder: |p| {
                vec![
                    v(1, 0, 0, 0, 0),
                    with(v(0, 1, 0, 0, 0), II, &p[0]),
                    with(v(0, 0, 0, 1, 0), II, &p[1]),
                ]
            },
        },
        CatalogFamily {
            id: "s3.5",
            dim: 3,
            params: &[("nu", NonNeg)],
            builder: |p| {
                vec![
                    v(1, 0, 0, 0, 0),
                    with(v(0, 1, 0, 0, 0), PT, &p[0]),
                    v(0, 0, 0, 0, 1),
                ]
            },
        },
        CatalogFamily {
            id: "s3.6",
            dim: 3,
            params: &[],
            builder: |_| vec![v(1, 0, 0, 0, 0), v(0, 1, 0, 0, 0), v(0, 0, 1, 0, 0)],
        },
        // 4D
        CatalogFamily {
            id: "s4.1",
            dim: 4,
            params: &[],
            builder: |_| {
                vec![
                    v(1, 0, 0, 0, 0),
                    v(0, 1, 0, 0, 0),
                    v(0, 0, 0, 1, 0),
                    v(0, 0, 0, 0, 1),
                ]
            },
        },
        CatalogFamily {
            id: "s4.2",
            dim: 4,
            params: &[("mu", Real)],
            builder: |p| {
                vec![
                    v(1, 0, 0, 0, 0),
                    v(0, 1, 0, 0, 0),
                    v(0, 0, 1, 0, 0),
                    with(v(0, 0, 0, 1, 0), II, &p[0]),
                ]
            },
        },
        CatalogFamily {
            id: "s4.3",
            dim: 4,
            params: &[],
            builder: |_| {
                vec![
                    v(1, 0, 0, 0, 0),
                    v(0, 1, 0, 0, 0),
                    v(0, 0, 1, 0, 0),
                    v(0, 0, 0, 0, 1),
                ]
            },
        },
    ];
    match dim_filter {
        Some(d) => all.into_iter().filter(|f| f.dim == d).collect(),
        None => all,
    }
}

/// Parses `p/q`, integers and plain decimals (optional exponent) into an
/// exact rational.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num.trim().parse().ok()?;
        let d: i64 = den.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Rat::new(BigInt::from(n), BigInt::from(d)));
    }
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mant.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mant, ""),
    };
    if frac_part.chars().any(|c| !c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = digits.parse().ok()?;
    let scale = frac_part.len() as i32 - exp;
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        Rat::new(n, ten.pow(scale as u32))
    } else {
        Rat::new(n * ten.pow((-scale) as u32), BigInt::one())
    })
}

/// Resolves a textual catalog id like `s1.5:nu=1,mu=0.5` or `s1.4:0`
/// (positional) to an instantiated span.
pub fn lookup(id: &str) -> Result<SubalgebraSpan, CatalogError> {
    let (family_id, param_str) = match id.split_once(':') {
        Some((f, p)) => (f, Some(p)),
        None => (id, None),
    };
    let families: Vec<CatalogFamily> = catalog(None)
        .into_iter()
        .filter(|f| f.id == family_id)
        .collect();
    if families.is_empty() {
        return Err(CatalogError::UnknownId(id.to_string()));
    }
    let mut last_err = None;
    for fam in &families {
        let params = match param_str {
            None => Vec::new(),
            Some(ps) => {
                let mut vals = Vec::new();
                for (pos, part) in ps.split(',').enumerate() {
                    let value = match part.split_once('=') {
                        Some((name, value)) => {
                            let Some(idx) = fam.params.iter().position(|(n, _)| *n == name.trim())
                            else {
                                last_err = Some(CatalogError::UnknownId(id.to_string()));
                                vals.clear();
                                break;
                            };
                            if idx != pos {
                                // keep declared order regardless of input order
                                while vals.len() <= idx {
                                    vals.push(None);
                                }
                            }
                            (idx, value)
                        }
                        None => (pos, part),
                    };
                    let Some(r) = parse_rat(value.1) else {
                        last_err = Some(CatalogError::UnknownId(id.to_string()));
                        vals.clear();
                        break;
                    };
                    while vals.len() <= value.0 {
                        vals.push(None);
                    }
                    vals[value.0] = Some(r);
                }
                let collected: Option<Vec<Rat>> = vals.into_iter().collect();
                match collected {
                    Some(c) => c,
                    None => continue,
                }
            }
        };
        match fam.instantiate(&params) {
            Ok(span) => return Ok(span),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| CatalogError::UnknownId(id.to_string())))
}

/// A discrete equivalence between two parameterized spans, realized by the
/// pushforward of a named group generator.
#[derive(Debug, Clone)]
pub struct Witness {
    pub generator: &'static str,
    pub matrix: Mat2<Rat>,
    pub source: SubalgebraSpan,
    pub target: SubalgebraSpan,
}

impl Witness {
    /// Pushes the source basis forward and compares spans exactly.
    pub fn verify(&self) -> bool {
        let mapped: Vec<EssVec> = self
            .source
            .basis
            .iter()
            .map(|b| pushforward_matrix(&self.matrix, b))
            .collect();
        SubalgebraSpan::new(mapped).span_eq(&self.target)
    }
}

fn jprime_matrix() -> Mat2<Rat> {
    [[rat_int(1), rat_int(0)], [rat_int(0), rat_int(-1)]]
}

fn identity_matrix() -> Mat2<Rat> {
    [[rat_int(1), rat_int(0)], [rat_int(0), rat_int(1)]]
}

/// The seven discrete equivalences that cut the inner-automorphism list
/// down to the group-inequivalent one.  Pair ids name the family whose
/// sign parameter the `J'` pushforward flips.
pub const WITNESS_IDS: [&str; 7] = [
    "s1.3", "s1.4", "s1.7", "s2.2", "s2.3", "s2.6", "s2.7",
];

/// Builds the witness for a pair id at the given parameter values.
///
/// Parameters refer to the *target* (catalog) member; the source is its
/// sign-flipped twin outside the catalog.  `"identity"` returns the trivial
/// self-witness of `s1.1` at the first parameter.
pub fn equivalence_witness(pair_id: &str, params: &[Rat]) -> Result<Witness, CatalogError> {
    let need = |n: usize| -> Result<(), CatalogError> {
        if params.len() != n {
            Err(CatalogError::WrongArity {
                family: pair_id.to_string(),
                expected: n,
                got: params.len(),
            })
        } else {
            Ok(())
        }
    };
    let jm = jprime_matrix();
    let w = match pair_id {
        "identity" => {
            need(1)?;
            let span = catalog(None)[0].instantiate(&params[..1])?;
            Witness {
                generator: "id",
                matrix: identity_matrix(),
                source: span.clone(),
                target: span,
            }
        }
        // s1.3^{-1,-mu} ~ s1.3^{1,mu}
        "s1.3" => {
            need(1)?;
            let mu = &params[0];
            Witness {
                generator: "J'",
                matrix: jm,
                source: SubalgebraSpan::new(vec![with(
                    with(v(1, 0, 0, -1, 0), II, &-mu.clone()),
                    PT,
                    &rat_int(-1),
                )]),
                target: SubalgebraSpan::new(vec![with(v(1, 0, 0, 1, 0), II, mu)]),
            }
        }
        // s1.4^{-1} ~ s1.4^{1}
        "s1.4" => {
            need(0)?;
            Witness {
                generator: "J'",
                matrix: jm,
                source: SubalgebraSpan::new(vec![v(1, 0, 0, 0, -1)]),
                target: SubalgebraSpan::new(vec![v(1, 0, 0, 0, 1)]),
            }
        }
        // s1.7^{-mu,-mu'} ~ s1.7^{mu,mu'}
        "s1.7" => {
            need(2)?;
            let (a, b) = (&params[0], &params[1]);
            Witness {
                generator: "J'",
                matrix: jm,
                source: SubalgebraSpan::new(vec![with(
                    with(v(1, 0, 1, 0, 0), PT, &-a.clone()),
                    II,
                    &-b.clone(),
                )]),
                target: SubalgebraSpan::new(vec![with(with(v(1, 0, 1, 0, 0), PT, a), II, b)]),
            }
        }
        // s2.2^{-1,mu} ~ s2.2^{1,mu}
        "s2.2" => {
            need(1)?;
            let mu = &params[0];
            Witness {
                generator: "J'",
                matrix: jm,
                source: SubalgebraSpan::new(vec![
                    v(1, 0, 0, 0, -1),
                    with(v(0, 0, 0, 1, 0), II, mu),
                ]),
                target: SubalgebraSpan::new(vec![
                    v(1, 0, 0, 0, 1),
                    with(v(0, 0, 0, 1, 0), II, mu),
                ]),
            }
        }
        // s2.3^{-1} ~ s2.3^{1}
        "s2.3" => {
            need(0)?;
            Witness {
                generator: "J'",
                matrix: jm,
                source: SubalgebraSpan::new(vec![v(1, 0, 0, -1, 0), v(0, 0, 0, 0, 1)]),
                target: SubalgebraSpan::new(vec![v(1, 0, 0, 1, 0), v(0, 0, 0, 0, 1)]),
            }
        }
        // s2.6^{-mu,mu'} ~ s2.6^{mu,mu'}
        "s2.6" => {
            need(2)?;
            let (a, b) = (&params[0], &params[1]);
            Witness {
                generator: "J'",
                matrix: jm,
                source: SubalgebraSpan::new(vec![
                    with(v(1, 0, 1, 0, 0), II, &-a.clone()),
                    with(v(0, 0, 0, 1, 0), II, b),
                ]),
                target: SubalgebraSpan::new(vec![
                    with(v(1, 0, 1, 0, 0), II, a),
                    with(v(0, 0, 0, 1, 0), II, b),
                ]),
            }
        }
        // s2.7^{-mu} ~ s2.7^{mu}
        "s2.7" => {
            need(1)?;
            let mu = &params[0];
            Witness {
                generator: "J'",
                matrix: jm,
                source: SubalgebraSpan::new(vec![
                    with(v(1, 0, 1, 0, 0), PT, &-mu.clone()),
                    v(0, 0, 0, 0, 1),
                ]),
                target: SubalgebraSpan::new(vec![
                    with(v(1, 0, 1, 0, 0), PT, mu),
                    v(0, 0, 0, 0, 1),
                ]),
            }
        }
        other => return Err(CatalogError::UnknownId(other.to_string())),
    };
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    #[test]
    fn one_dimensional_families_count() {
        assert_eq!(catalog(Some(1)).len(), 8);
        assert_eq!(catalog(Some(2)).len(), 9);
        assert_eq!(catalog(Some(3)).len(), 6);
        assert_eq!(catalog(Some(4)).len(), 3);
    }

    #[test]
    fn every_family_is_bracket_closed() {
        for fam in catalog(None) {
            let params: Vec<Rat> = fam
                .params
                .iter()
                .map(|(_, dom)| match dom {
                    ParamDomain::Real => rat(-3, 7),
                    ParamDomain::NonNeg => rat(2, 5),
                    ParamDomain::Pos => rat(3, 4),
                    ParamDomain::ZeroOne => rat_int(1),
                    ParamDomain::ZeroOnly => rat_int(0),
                })
                .collect();
            let span = fam.instantiate(&params).unwrap();
            assert!(span.is_subalgebra(), "family {} not closed", fam.id);
            assert_eq!(span.dim(), fam.dim);
        }
    }

    #[test]
    fn parameter_domains_enforced() {
        let s15 = catalog(None).into_iter().find(|f| f.id == "s1.5").unwrap();
        assert!(matches!(
            s15.instantiate(&[rat_int(-1), rat_int(0)]),
            Err(CatalogError::BadParam { param: "nu", .. })
        ));
        let s14 = catalog(None).into_iter().find(|f| f.id == "s1.4").unwrap();
        assert!(s14.instantiate(&[rat(1, 2)]).is_err());
    }

    #[test]
    fn lookup_by_label() {
        let span = lookup("s1.5:nu=1,mu=0.5").unwrap();
        assert_eq!(span.dim(), 1);
        assert_eq!(span.basis[0].0[PT], rat_int(1));
        assert_eq!(span.basis[0].0[II], rat(1, 2));
        // positional form and the nu = 0 variant of s1.7
        assert!(lookup("s1.4:0").is_ok());
        assert!(lookup("s1.7:nu=0,mu=2").is_ok());
        assert!(lookup("s1.7:nu=0,mu=-2").is_err());
        assert!(lookup("s9.9").is_err());
    }

    #[test]
    fn quadruples_of_named_spans() {
        // s2.1 = <P^t, I>
        let s21 = lookup("s2.1").unwrap();
        assert_eq!(invariant_quadruple(&s21).unwrap(), (2, 0, 2, 2));
        // s1.2 = <I>
        let s12 = lookup("s1.2").unwrap();
        assert_eq!(invariant_quadruple(&s12).unwrap(), (1, 0, 1, 1));
        // s3.6 = <P^y, D, K>
        let s36 = lookup("s3.6").unwrap();
        assert_eq!(invariant_quadruple(&s36).unwrap(), (3, 3, 0, 0));
    }

    #[test]
    fn quadruple_rejects_non_subalgebra() {
        // <D, P^y + K> is not closed: [D, P^y + K] = -P^y + K
        let bad = SubalgebraSpan::new(vec![v(0, 1, 0, 0, 0), v(1, 0, 1, 0, 0)]);
        assert!(invariant_quadruple(&bad).is_err());
        assert!(normalizer(&bad).is_err());
    }

    #[test]
    fn normalizers_match_reduction_list() {
        let full = SubalgebraSpan::new((0..5).map(EssVec::basis).collect());
        let n11 = normalizer(&lookup("s1.1:mu=0.25").unwrap()).unwrap();
        assert!(n11.span_eq(&full));

        let n140 = normalizer(&lookup("s1.4:0").unwrap()).unwrap();
        let expect = SubalgebraSpan::new(vec![
            v(1, 0, 0, 0, 0),
            v(0, 1, 0, 0, 0),
            v(0, 0, 0, 1, 0),
            v(0, 0, 0, 0, 1),
        ]);
        assert!(n140.span_eq(&expect));

        let n17 = normalizer(&lookup("s1.7:nu=1,mu=-0.5").unwrap()).unwrap();
        let expect = SubalgebraSpan::new(vec![
            v(1, 0, 1, 0, 0),
            v(0, 0, 0, 1, 0),
            v(0, 0, 0, 0, 1),
        ]);
        assert!(n17.span_eq(&expect));
    }

    #[test]
    fn witnesses_verify_exactly() {
        for id in WITNESS_IDS {
            let params: &[Rat] = match id {
                "s1.4" | "s2.3" => &[],
                "s1.7" | "s2.6" => &[rat(2, 3), rat(-1, 4)],
                _ => &[rat(5, 8)],
            };
            let w = equivalence_witness(id, params).unwrap();
            assert!(w.verify(), "witness {id} failed");
        }
        let idw = equivalence_witness("identity", &[rat(1, 3)]).unwrap();
        assert!(idw.verify());
    }

    #[test]
    fn parse_rat_forms() {
        assert_eq!(parse_rat("-0.1875").unwrap(), rat(-3, 16));
        assert_eq!(parse_rat("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rat("2").unwrap(), rat_int(2));
        assert_eq!(parse_rat("1e-2").unwrap(), rat(1, 100));
        assert_eq!(parse_rat("2.5e3").unwrap(), rat_int(2500));
        assert!(parse_rat("abc").is_none());
    }
}
