//! Jet-level realization of the operator algebra.
//!
//! A [`ConcreteOperator`] is a linear combination of generator words acting
//! on jet-expanded functions of `(t, x, y)`:
//!
//! ```text
//! P^y f = ∂_y f
//! D   f = x ∂_x f + y ∂_y f
//! K   f = 2xy ∂_x f + y^2 ∂_y f + x f
//! P^t f = ∂_t f
//! ```
//!
//! `P^t` is not a generator of the abstract algebra (on solutions it is
//! represented by the Casimir); it exists here only for cross-checks,
//! together with the equation operator `L = P^t - D^2 + (P^y K + K P^y)/2`.
//!
//! Each generator application costs one jet order, so applying a degree-d
//! recipe to an order-N jet leaves an order N-d jet; asking for more is an
//! error, never a silent truncation.

use crate::jet::{Jet, JetError};
use crate::linalg::min_eigenvalue_symmetric;
use crate::ops::{OpError, OpMonomial, OpPoly};
use alloc::vec::Vec;
use num_traits::{Float, ToPrimitive};

/// Concrete generators, including the cross-check-only `P^t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CGen {
    K,
    Py,
    D,
    Pt,
}

/// Variable slots of the `(t, x, y)` jets.
pub const VT: usize = 0;
pub const VX: usize = 1;
pub const VY: usize = 2;

fn apply_gen(g: CGen, f: &Jet) -> Result<Jet, JetError> {
    let order = f.order();
    if order == 0 {
        return Err(JetError::OrderExceeded { requested: 1, order: 0 });
    }
    let out_order = order - 1;
    let base = f.base();
    let coord = |var: usize| Jet::coord_any(3, out_order, var, base[var]).with_base(base);
    match g {
        CGen::Py => f.partial(VY),
        CGen::Pt => f.partial(VT),
        CGen::D => {
            let fx = f.partial(VX)?;
            let fy = f.partial(VY)?;
            Ok(coord(VX).mul(&fx).add(&coord(VY).mul(&fy)))
        }
        CGen::K => {
            let fx = f.partial(VX)?;
            let fy = f.partial(VY)?;
            let x = coord(VX);
            let y = coord(VY);
            let drift = x.mul(&y).scale(2.0).mul(&fx).add(&y.mul(&y).mul(&fy));
            Ok(drift.add(&x.mul(&f.truncate(out_order))))
        }
    }
}

/// A composition recipe over the concrete generators.
#[derive(Debug, Clone)]
pub struct ConcreteOperator {
    terms: Vec<(f64, Vec<CGen>)>,
    degree: usize,
}

impl ConcreteOperator {
    pub fn new(terms: Vec<(f64, Vec<CGen>)>) -> Self {
        let degree = terms.iter().map(|(_, w)| w.len()).max().unwrap_or(0);
        ConcreteOperator { terms, degree }
    }

    pub fn identity() -> Self {
        Self::new(alloc::vec![(1.0, Vec::new())])
    }

    pub fn gen(g: CGen) -> Self {
        Self::new(alloc::vec![(1.0, alloc::vec![g])])
    }

    /// Maximum word length; one jet order is consumed per letter.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Applies the recipe to an order-N jet of a function of `(t, x, y)`,
    /// producing an order `N - degree` jet.
    pub fn apply(&self, f: &Jet) -> Result<Jet, JetError> {
        if f.order() < self.degree {
            return Err(JetError::OrderExceeded {
                requested: self.degree,
                order: f.order(),
            });
        }
        let out_order = f.order() - self.degree;
        let mut acc = Jet::constant(f.arity(), out_order, 0.0).with_base(f.base());
        for (c, word) in &self.terms {
            let mut g = f.clone();
            for gen in word.iter().rev() {
                g = apply_gen(*gen, &g)?;
            }
            acc = acc.add(&g.truncate(out_order).scale(*c));
        }
        Ok(acc)
    }

    /// Applies with an explicit output-order request; the input jet must
    /// carry at least `degree + out_order` orders.
    pub fn apply_expecting(&self, f: &Jet, out_order: usize) -> Result<Jet, JetError> {
        if f.order() < self.degree + out_order {
            return Err(JetError::OrderExceeded {
                requested: self.degree + out_order,
                order: f.order(),
            });
        }
        Ok(self.apply(&f.truncate(self.degree + out_order))?)
    }
}

/// Homomorphic realization of a PBW polynomial: `realize(p·q)` acts as
/// `realize(p) ∘ realize(q)` on smooth functions.
pub fn realize(p: &OpPoly) -> ConcreteOperator {
    let mut terms = Vec::new();
    for (m, c) in p.terms() {
        let mut word = Vec::with_capacity(m.degree() as usize);
        word.extend(core::iter::repeat(CGen::K).take(m.k as usize));
        word.extend(core::iter::repeat(CGen::Py).take(m.py as usize));
        word.extend(core::iter::repeat(CGen::D).take(m.d as usize));
        terms.push((c.to_f64().expect("rational fits f64"), word));
    }
    ConcreteOperator::new(terms)
}

/// The equation operator written through Lie-symmetry operators:
/// `L = P^t - D^2 + (P^y K + K P^y) / 2`, which acts as
/// `f -> f_t + x f_y - x^2 f_xx`.
pub fn fine_operator_via_symmetries() -> ConcreteOperator {
    ConcreteOperator::new(alloc::vec![
        (1.0, alloc::vec![CGen::Pt]),
        (-1.0, alloc::vec![CGen::D, CGen::D]),
        (0.5, alloc::vec![CGen::Py, CGen::K]),
        (0.5, alloc::vec![CGen::K, CGen::Py]),
    ])
}

/// Outcome of the PBW monomial independence probe.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceReport {
    pub max_degree: usize,
    pub monomials: usize,
    pub samples: usize,
    /// Smallest singular value of the column-normalized evaluation matrix.
    pub min_singular: f64,
    pub independent: bool,
}

/// Ordered monomials of total degree at most `max_degree`.
pub fn monomials_up_to(max_degree: usize) -> Vec<OpMonomial> {
    let mut out = Vec::new();
    let md = max_degree as u32;
    for deg in 0..=md {
        for k in (0..=deg).rev() {
            for py in (0..=deg - k).rev() {
                out.push(OpMonomial { k, py, d: deg - k - py });
            }
        }
    }
    out
}

fn unit_from_bits(state: &mut u64) -> f64 {
    let mut x = *state;
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    *state = x;
    (x >> 11) as f64 / (1u64 << 53) as f64
}

/// Evaluation matrix for the independence probe: row per sample, column per
/// monomial, entry `(Q^α e^{μx+νy}) / e^{μx+νy}` at a pseudo-random draw of
/// `(x, y, μ, ν)`.
pub fn independence_matrix(
    max_degree: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>, OpError> {
    if max_degree > 4 {
        return Err(OpError::BadDegree(max_degree));
    }
    let monomials = monomials_up_to(max_degree);
    if samples < monomials.len() {
        return Err(OpError::TooFewSamples { samples, monomials: monomials.len() });
    }
    let order = max_degree.max(2);
    let mut state = seed | 1;
    let mut rows = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x = 0.7 + unit_from_bits(&mut state);
        let y = -1.2 + 2.4 * unit_from_bits(&mut state);
        let mu = -1.5 + 3.0 * unit_from_bits(&mut state);
        let nu = -1.5 + 3.0 * unit_from_bits(&mut state);
        let jx = Jet::var(3, order, VX, x).unwrap().with_base([0.0, x, y]);
        let jy = Jet::var(3, order, VY, y).unwrap().with_base([0.0, x, y]);
        let f = jx.scale(mu).add(&jy.scale(nu)).exp();
        let f0 = f.value();
        let mut row = Vec::with_capacity(monomials.len());
        for m in &monomials {
            let op = realize(&OpPoly::monomial(*m));
            let truncated = f.truncate(m.degree() as usize);
            let v = op.apply(&truncated).expect("order budget").value();
            row.push(v / f0);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Smallest singular value after normalizing each column to unit length.
pub fn min_normalized_singular(rows: &[Vec<f64>]) -> f64 {
    let ncols = rows[0].len();
    let nrows = rows.len();
    let mut norms = alloc::vec![0.0; ncols];
    for row in rows {
        for (j, v) in row.iter().enumerate() {
            norms[j] += v * v;
        }
    }
    for n in &mut norms {
        *n = n.sqrt().max(1e-300);
    }
    let mut gram = alloc::vec![alloc::vec![0.0; ncols]; ncols];
    for i in 0..ncols {
        for j in 0..ncols {
            let mut dot = 0.0;
            for row in rows.iter().take(nrows) {
                dot += row[i] * row[j];
            }
            gram[i][j] = dot / (norms[i] * norms[j]);
        }
    }
    min_eigenvalue_symmetric(&gram).max(0.0).sqrt()
}

/// Certifies linear independence of the realized PBW monomials of degree
/// at most `max_degree` by sampling, with threshold `1e-8` on the smallest
/// normalized singular value.
pub fn symbol_independence_test(
    max_degree: usize,
    samples: usize,
    seed: u64,
) -> Result<IndependenceReport, OpError> {
    let rows = independence_matrix(max_degree, samples, seed)?;
    let monomials = rows[0].len();
    let min_singular = min_normalized_singular(&rows);
    Ok(IndependenceReport {
        max_degree,
        monomials,
        samples,
        min_singular,
        independent: min_singular > 1e-8,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::Gen;

    fn jet_at(order: usize, p: [f64; 3]) -> [Jet; 3] {
        let v = Jet::vars(order, &p);
        [v[0].clone(), v[1].clone(), v[2].clone()]
    }

    #[test]
    fn py_on_y_squared() {
        let [_, _, y] = jet_at(4, [0.3, 1.5, 2.0]);
        let f = y.mul(&y);
        let out = ConcreteOperator::gen(CGen::Py).apply(&f).unwrap();
        assert!((out.value() - 4.0).abs() < 1e-14); // 2y at y=2
    }

    #[test]
    fn k_on_constant_is_x() {
        let one = Jet::constant(3, 4, 1.0).with_base([0.7, -1.3, 0.4]);
        let out = ConcreteOperator::gen(CGen::K).apply(&one).unwrap();
        assert!((out.value() - -1.3).abs() < 1e-14);
    }

    #[test]
    fn euler_operator_on_degree_two_monomial() {
        // D(xy) = 2 xy
        let [_, x, y] = jet_at(4, [0.1, 2.0, 3.0]);
        let f = x.mul(&y);
        let out = ConcreteOperator::gen(CGen::D).apply(&f).unwrap();
        assert!((out.value() - 12.0).abs() < 1e-13);
    }

    #[test]
    fn order_budget_enforced() {
        let [_, x, _] = jet_at(2, [0.0, 1.0, 1.0]);
        let op = realize(&crate::ops::casimir());
        assert!(op.apply(&x).is_ok()); // degree 2 on order 2: value only
        let op3 = realize(&OpPoly::gen(Gen::D).pow(3));
        assert!(matches!(
            op3.apply(&x),
            Err(JetError::OrderExceeded { .. })
        ));
        assert!(op.apply_expecting(&x, 1).is_err());
    }

    #[test]
    fn fine_operator_matches_direct_derivatives() {
        // L f = f_t + x f_y - x^2 f_xx for f = exp(t + x + y) t-free mix
        let p = [0.4, 1.3, -0.8];
        let [t, x, y] = jet_at(5, p);
        let f = t.mul(&x).add(&x.mul(&y).mul(&y)).add(&x.exp());
        let lhs = fine_operator_via_symmetries().apply(&f).unwrap().value();
        let ft = f.derivative([1, 0, 0]).unwrap();
        let fy = f.derivative([0, 0, 1]).unwrap();
        let fxx = f.derivative([0, 2, 0]).unwrap();
        let rhs = ft + p[1] * fy - p[1] * p[1] * fxx;
        assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn realization_is_homomorphic_on_samples() {
        let p = OpPoly::gen(Gen::K).add(&OpPoly::gen(Gen::D).scale(&crate::linalg::rat(1, 2)));
        let q = OpPoly::gen(Gen::Py).mul(&OpPoly::gen(Gen::D));
        let pq = p.mul(&q);
        let pt = [0.2, 1.1, 0.5];
        let [t, x, y] = jet_at(6, pt);
        let f = x.mul(&y).mul(&t).add(&x.add(&y).exp());
        let lhs = realize(&pq).apply(&f).unwrap();
        let rhs = realize(&p).apply(&realize(&q).apply(&f).unwrap()).unwrap();
        assert!((lhs.value() - rhs.value()).abs() < 1e-10 * (1.0 + rhs.value().abs()));
    }

    #[test]
    fn independence_at_degree_zero_and_self_test() {
        let report = symbol_independence_test(0, 3, 7).unwrap();
        assert!(report.independent);
        assert_eq!(report.monomials, 1);

        // duplicated column must be reported dependent
        let mut rows = independence_matrix(2, 40, 11).unwrap();
        for row in &mut rows {
            let first = row[1];
            row.push(first);
        }
        assert!(min_normalized_singular(&rows) < 1e-10);
    }

    #[test]
    fn too_few_samples_is_an_error() {
        assert!(matches!(
            symbol_independence_test(3, 5, 1),
            Err(OpError::TooFewSamples { .. })
        ));
        assert!(symbol_independence_test(5, 500, 1).is_err());
    }
}
