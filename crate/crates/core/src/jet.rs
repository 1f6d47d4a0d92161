//! Truncated multivariate Taylor (jet) arithmetic.
//!
//! A [`Jet`] holds the Taylor monomial coefficients of a smooth function at a
//! base point, up to a fixed total degree, in one to three variables.  Sums,
//! products and compositions of order-N jets are again order-N jets at the
//! same base point, so every derivative a residual evaluation needs comes out
//! exact to roundoff instead of through finite differences.
//!
//! Coefficients are stored densely in graded order: all monomials of total
//! degree 0, then degree 1, and so on.  The coefficient stored at a
//! multi-index `α` is the monomial coefficient `∂^α f(base) / α!`;
//! [`Jet::derivative`] multiplies the factorial back in.
//!
//! Requesting a derivative beyond the constructed order is a hard error,
//! never a silent zero.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_traits::Float;

/// Maximum supported truncation order.
pub const MAX_ORDER: usize = 24;

/// Default truncation order used by the solution and reduction machinery.
pub const DEFAULT_ORDER: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub enum JetError {
    /// Variable index out of range for the jet's arity.
    BadVar { var: usize, arity: usize },
    /// A derivative of total degree beyond the stored order was requested.
    OrderExceeded { requested: usize, order: usize },
    /// The constant term lies outside the domain of an elementary function.
    Domain { func: &'static str, value: f64 },
    /// Division by a jet whose constant term vanishes.
    ZeroDivision,
    /// Order or arity outside the supported range.
    BadShape { arity: usize, order: usize },
}

impl fmt::Display for JetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JetError::BadVar { var, arity } => {
                write!(f, "variable index {var} out of range for arity {arity}")
            }
            JetError::OrderExceeded { requested, order } => {
                write!(f, "derivative of degree {requested} exceeds jet order {order}")
            }
            JetError::Domain { func, value } => {
                write!(f, "{func} undefined at constant term {value}")
            }
            JetError::ZeroDivision => write!(f, "division by jet with zero constant term"),
            JetError::BadShape { arity, order } => {
                write!(f, "unsupported jet shape: arity {arity}, order {order}")
            }
        }
    }
}

fn binom3(n: usize) -> usize {
    // C(n+2, 3) monomials of total degree < n in three variables
    n * (n + 1) * (n + 2) / 6
}

/// Number of monomials of total degree <= order in `arity` variables.
pub fn coeff_count(arity: usize, order: usize) -> usize {
    match arity {
        1 => order + 1,
        2 => (order + 1) * (order + 2) / 2,
        3 => binom3(order + 1),
        _ => 0,
    }
}

/// Dense position of a multi-index in the graded coefficient layout.
fn index_of(arity: usize, exp: [usize; 3]) -> usize {
    let d = exp[0] + exp[1] + exp[2];
    match arity {
        1 => exp[0],
        2 => d * (d + 1) / 2 + exp[1],
        3 => {
            let r = d - exp[0];
            binom3(d) + r * (r + 1) / 2 + (r - exp[1])
        }
        _ => unreachable!(),
    }
}

/// Multi-indices of total degree <= order in graded layout order.
fn exponents(arity: usize, order: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(coeff_count(arity, order));
    for d in 0..=order {
        match arity {
            1 => out.push([d, 0, 0]),
            2 => {
                for i in (0..=d).rev() {
                    out.push([i, d - i, 0]);
                }
            }
            3 => {
                for i in (0..=d).rev() {
                    for j in (0..=d - i).rev() {
                        out.push([i, j, d - i - j]);
                    }
                }
            }
            _ => unreachable!(),
        }
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// A truncated Taylor expansion of a smooth function at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    arity: usize,
    order: usize,
    base: [f64; 3],
    coeffs: Vec<f64>,
}

impl Jet {
    fn check_shape(arity: usize, order: usize) -> Result<(), JetError> {
        if !(1..=3).contains(&arity) || order > MAX_ORDER {
            return Err(JetError::BadShape { arity, order });
        }
        Ok(())
    }

    /// Jet of the constant function `value`.
    pub fn constant(arity: usize, order: usize, value: f64) -> Self {
        Self::check_shape(arity, order).expect("jet shape");
        let mut coeffs = vec![0.0; coeff_count(arity, order)];
        coeffs[0] = value;
        Jet { arity, order, base: [0.0; 3], coeffs }
    }

    /// Jet of a coordinate function: constant term `value`, unit first-order
    /// coefficient in slot `var`, everything else zero.  Seeding requires
    /// order at least 2.
    pub fn var(arity: usize, order: usize, var: usize, value: f64) -> Result<Self, JetError> {
        Self::check_shape(arity, order)?;
        if order < 2 {
            return Err(JetError::BadShape { arity, order });
        }
        if var >= arity {
            return Err(JetError::BadVar { var, arity });
        }
        let mut base = [0.0; 3];
        base[var] = value;
        let mut coeffs = vec![0.0; coeff_count(arity, order)];
        coeffs[0] = value;
        let mut e = [0usize; 3];
        e[var] = 1;
        coeffs[index_of(arity, e)] = 1.0;
        Ok(Jet { arity, order, base, coeffs })
    }

    /// Coordinate jet at any order (order 0 keeps just the value).
    pub(crate) fn coord_any(arity: usize, order: usize, var: usize, value: f64) -> Jet {
        let mut j = Jet::constant(arity, order, value);
        let mut b = [0.0; 3];
        b[var] = value;
        j.base = b;
        if order >= 1 {
            let mut e = [0usize; 3];
            e[var] = 1;
            j.coeffs[index_of(arity, e)] = 1.0;
        }
        j
    }

    /// Seeds jets for all coordinates at the given base point.
    pub fn vars(order: usize, base: &[f64]) -> Vec<Jet> {
        let arity = base.len();
        let mut out = Vec::with_capacity(arity);
        for (i, &v) in base.iter().enumerate() {
            let mut j = Jet::var(arity, order, i, v).expect("valid var");
            j.base = {
                let mut b = [0.0; 3];
                b[..arity].copy_from_slice(base);
                b
            };
            out.push(j);
        }
        out
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Expansion point (unused slots are zero).
    pub fn base(&self) -> [f64; 3] {
        self.base
    }

    pub fn with_base(mut self, base: [f64; 3]) -> Self {
        self.base = base;
        self
    }

    /// Value of the function at the base point.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Overwrites one monomial coefficient (total degree must fit).
    pub fn set_coeff(&mut self, exp: [usize; 3], value: f64) {
        debug_assert!(exp[0] + exp[1] + exp[2] <= self.order);
        self.coeffs[index_of(self.arity, exp)] = value;
    }

    /// Sum of coefficient magnitudes; used as the roundoff scale of the jet.
    pub fn coeff_norm1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    /// Raw monomial coefficient at a multi-index (zero if beyond order).
    pub fn coeff(&self, exp: [usize; 3]) -> f64 {
        let d = exp[0] + exp[1] + exp[2];
        if d > self.order {
            return 0.0;
        }
        self.coeffs[index_of(self.arity, exp)]
    }

    fn coeff_mut(&mut self, exp: [usize; 3]) -> &mut f64 {
        &mut self.coeffs[index_of(self.arity, exp)]
    }

    /// Derivative `∂^α f(base) = coeffs[α] · α!`.
    pub fn derivative(&self, exp: [usize; 3]) -> Result<f64, JetError> {
        let d = exp[0] + exp[1] + exp[2];
        if d > self.order {
            return Err(JetError::OrderExceeded { requested: d, order: self.order });
        }
        let fact = factorial(exp[0]) * factorial(exp[1]) * factorial(exp[2]);
        Ok(self.coeffs[index_of(self.arity, exp)] * fact)
    }

    fn assert_compatible(&self, rhs: &Jet) {
        debug_assert_eq!(self.arity, rhs.arity, "jet arity mismatch");
        debug_assert_eq!(self.order, rhs.order, "jet order mismatch");
    }

    pub fn scale(&self, s: f64) -> Jet {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= s;
        }
        out
    }

    /// Jet of `∂f/∂var` at the same base point, one order lower.
    pub fn partial(&self, var: usize) -> Result<Jet, JetError> {
        if var >= self.arity {
            return Err(JetError::BadVar { var, arity: self.arity });
        }
        if self.order == 0 {
            return Err(JetError::OrderExceeded { requested: 1, order: 0 });
        }
        let order = self.order - 1;
        let mut out = Jet {
            arity: self.arity,
            order,
            base: self.base,
            coeffs: vec![0.0; coeff_count(self.arity, order)],
        };
        for exp in exponents(self.arity, order) {
            let mut src = exp;
            src[var] += 1;
            let c = self.coeffs[index_of(self.arity, src)] * src[var] as f64;
            *out.coeff_mut(exp) = c;
        }
        Ok(out)
    }

    /// Truncates to a lower order (used to align operands).
    pub fn truncate(&self, order: usize) -> Jet {
        assert!(order <= self.order);
        let n = coeff_count(self.arity, order);
        Jet {
            arity: self.arity,
            order,
            base: self.base,
            coeffs: self.coeffs[..n].to_vec(),
        }
    }

    pub fn add(&self, rhs: &Jet) -> Jet {
        self.assert_compatible(rhs);
        let mut out = self.clone();
        for (c, r) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            *c += r;
        }
        out
    }

    pub fn sub(&self, rhs: &Jet) -> Jet {
        self.assert_compatible(rhs);
        let mut out = self.clone();
        for (c, r) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            *c -= r;
        }
        out
    }

    pub fn neg(&self) -> Jet {
        self.scale(-1.0)
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, rhs: &Jet) -> Jet {
        self.assert_compatible(rhs);
        let exps = exponents(self.arity, self.order);
        let mut out = Jet {
            arity: self.arity,
            order: self.order,
            base: self.base,
            coeffs: vec![0.0; self.coeffs.len()],
        };
        for (p, ep) in exps.iter().enumerate() {
            let a = self.coeffs[p];
            if a == 0.0 {
                continue;
            }
            let dp = ep[0] + ep[1] + ep[2];
            for (q, eq) in exps.iter().enumerate() {
                let b = rhs.coeffs[q];
                if b == 0.0 {
                    continue;
                }
                if dp + eq[0] + eq[1] + eq[2] > self.order {
                    continue;
                }
                let sum = [ep[0] + eq[0], ep[1] + eq[1], ep[2] + eq[2]];
                out.coeffs[index_of(self.arity, sum)] += a * b;
            }
        }
        out
    }

    /// Integer power by repeated multiplication.
    pub fn powi(&self, n: usize) -> Jet {
        let mut acc = Jet::constant(self.arity, self.order, 1.0);
        acc.base = self.base;
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn div(&self, rhs: &Jet) -> Result<Jet, JetError> {
        Ok(self.mul(&rhs.recip()?))
    }

    /// Horner evaluation of a univariate Taylor series in `self - self.value()`.
    ///
    /// `series[k]` is the monomial coefficient of the outer function at the
    /// inner constant term, so this is exactly Taylor composition.
    pub fn compose_series(&self, series: &[f64]) -> Jet {
        let u = self.add_scalar(-self.value());
        let mut acc = Jet::constant(self.arity, self.order, series[series.len() - 1]);
        acc.base = self.base;
        for k in (0..series.len() - 1).rev() {
            acc = acc.mul(&u).add_scalar(series[k]);
        }
        acc
    }

    pub fn recip(&self) -> Result<Jet, JetError> {
        let c = self.value();
        if c == 0.0 {
            return Err(JetError::ZeroDivision);
        }
        let mut series = vec![0.0; self.order + 1];
        let mut t = 1.0 / c;
        for s in series.iter_mut() {
            *s = t;
            t *= -1.0 / c;
        }
        Ok(self.compose_series(&series))
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        let mut series = vec![0.0; self.order + 1];
        for (k, s) in series.iter_mut().enumerate() {
            *s = e / factorial(k);
        }
        self.compose_series(&series)
    }

    pub fn ln(&self) -> Result<Jet, JetError> {
        let c = self.value();
        if c <= 0.0 {
            return Err(JetError::Domain { func: "ln", value: c });
        }
        let mut series = vec![0.0; self.order + 1];
        series[0] = c.ln();
        let mut sign = 1.0;
        for (k, s) in series.iter_mut().enumerate().skip(1) {
            *s = sign / (k as f64 * c.powi(k as i32));
            sign = -sign;
        }
        Ok(self.compose_series(&series))
    }

    pub fn sqrt(&self) -> Result<Jet, JetError> {
        self.powf(0.5).map_err(|_| JetError::Domain { func: "sqrt", value: self.value() })
    }

    /// Real power `f^r`.  Integer exponents only need a nonzero constant
    /// term; fractional exponents require a positive one.
    pub fn powf(&self, r: f64) -> Result<Jet, JetError> {
        let c = self.value();
        let integral = r == r.trunc();
        if c <= 0.0 && !integral {
            return Err(JetError::Domain { func: "pow", value: c });
        }
        if c == 0.0 {
            return Err(JetError::Domain { func: "pow", value: c });
        }
        let mut series = vec![0.0; self.order + 1];
        series[0] = c.powf(r);
        for k in 1..=self.order {
            // b_k = b_{k-1} (r - k + 1) / (k c)
            series[k] = series[k - 1] * (r - (k - 1) as f64) / (k as f64 * c);
        }
        Ok(self.compose_series(&series))
    }

    pub fn sin(&self) -> Jet {
        self.sincos().0
    }

    pub fn cos(&self) -> Jet {
        self.sincos().1
    }

    fn sincos(&self) -> (Jet, Jet) {
        let c = self.value();
        let (s0, c0) = (c.sin(), c.cos());
        let mut sin_series = vec![0.0; self.order + 1];
        let mut cos_series = vec![0.0; self.order + 1];
        // k-th derivatives cycle through (sin, cos, -sin, -cos)
        let cycle = [s0, c0, -s0, -c0];
        for k in 0..=self.order {
            let f = factorial(k);
            sin_series[k] = cycle[k % 4] / f;
            cos_series[k] = cycle[(k + 1) % 4] / f;
        }
        (self.compose_series(&sin_series), self.compose_series(&cos_series))
    }

    pub fn atan(&self) -> Jet {
        let c = self.value();
        let mut series = vec![0.0; self.order + 1];
        series[0] = c.atan();
        if self.order >= 1 {
            // q(u) = 1/(1 + (c+u)^2) satisfies (1+c^2) q_k + 2c q_{k-1} + q_{k-2} = 0
            let w = 1.0 + c * c;
            let mut q = vec![0.0; self.order];
            q[0] = 1.0 / w;
            for k in 1..self.order {
                let prev2 = if k >= 2 { q[k - 2] } else { 0.0 };
                q[k] = -(2.0 * c * q[k - 1] + prev2) / w;
            }
            for k in 1..=self.order {
                series[k] = q[k - 1] / k as f64;
            }
        }
        self.compose_series(&series)
    }

    /// `|f|` on the branch of the base point: `sgn(f(base)) · f`.
    ///
    /// Points with vanishing constant term are a domain error; the branch
    /// convention matches how `|x|^p` enters the solution formulas away from
    /// the degeneracy locus `x = 0`.
    pub fn abs_branch(&self) -> Result<Jet, JetError> {
        let c = self.value();
        if c == 0.0 {
            return Err(JetError::Domain { func: "abs", value: c });
        }
        Ok(if c > 0.0 { self.clone() } else { self.neg() })
    }

    /// Three-variable analogue of [`Jet::compose2`].
    pub fn compose3(outer: &Jet, inner: [&Jet; 3]) -> Jet {
        debug_assert_eq!(outer.arity, 3);
        let order = outer
            .order
            .min(inner[0].order)
            .min(inner[1].order)
            .min(inner[2].order);
        let arity = inner[0].arity;
        let mut pows: Vec<Vec<Jet>> = Vec::with_capacity(3);
        for jet in inner {
            let p = jet.truncate(order).add_scalar(-jet.value());
            let mut list = Vec::with_capacity(order + 1);
            let mut one = Jet::constant(arity, order, 1.0);
            one.base = inner[0].base;
            list.push(one);
            for k in 1..=order {
                let next = list[k - 1].mul(&p);
                list.push(next);
            }
            pows.push(list);
        }
        let mut acc = Jet::constant(arity, order, 0.0);
        acc.base = inner[0].base;
        for exp in exponents(3, order) {
            let c = outer.coeff(exp);
            if c == 0.0 {
                continue;
            }
            let term = pows[0][exp[0]].mul(&pows[1][exp[1]]).mul(&pows[2][exp[2]]);
            acc = acc.add(&term.scale(c));
        }
        acc
    }

    /// Multivariate Taylor composition: evaluates a two-variable outer jet
    /// at inner jets sharing a base point.  The inner jets' constant terms
    /// must equal the outer jet's expansion point coordinates.
    pub fn compose2(outer: &Jet, inner: [&Jet; 2]) -> Jet {
        debug_assert_eq!(outer.arity, 2);
        inner[0].assert_compatible(inner[1]);
        let order = outer.order.min(inner[0].order);
        let i0 = inner[0].truncate(order);
        let i1 = inner[1].truncate(order);
        let arity = i0.arity;
        let p0 = i0.add_scalar(-i0.value());
        let p1 = i1.add_scalar(-i1.value());
        let mut pow0 = Vec::with_capacity(order + 1);
        let mut pow1 = Vec::with_capacity(order + 1);
        let mut one = Jet::constant(arity, order, 1.0);
        one.base = i0.base;
        pow0.push(one.clone());
        pow1.push(one);
        for k in 1..=order {
            pow0.push(pow0[k - 1].mul(&p0));
            pow1.push(pow1[k - 1].mul(&p1));
        }
        let mut acc = Jet::constant(arity, order, 0.0);
        acc.base = i0.base;
        for exp in exponents(2, order) {
            let c = outer.coeff(exp);
            if c == 0.0 {
                continue;
            }
            acc = acc.add(&pow0[exp[0]].mul(&pow1[exp[1]]).scale(c));
        }
        acc
    }
}

/// Named elementary functions applied through Taylor composition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elem {
    Exp,
    Ln,
    Sqrt,
    Pow(f64),
    Sin,
    Cos,
    Atan,
    Recip,
}

/// Applies an elementary function to a jet (coefficients agree with the
/// analytic derivatives to roundoff).
pub fn apply_elem(f: Elem, a: &Jet) -> Result<Jet, JetError> {
    match f {
        Elem::Exp => Ok(a.exp()),
        Elem::Ln => a.ln(),
        Elem::Sqrt => a.sqrt(),
        Elem::Pow(r) => a.powf(r),
        Elem::Sin => Ok(a.sin()),
        Elem::Cos => Ok(a.cos()),
        Elem::Atan => Ok(a.atan()),
        Elem::Recip => a.recip(),
    }
}
