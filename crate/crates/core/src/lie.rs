//! The essential Lie invariance algebra of `u_t + x u_y = x^2 u_xx`.
//!
//! Coefficient vectors live over the ordered basis `(P^y, D, K, P^t, I)` of
//! the five-dimensional algebra.  The nontrivial commutation relations are
//!
//! ```text
//! [P^y, D] = P^y,   [P^y, K] = 2 D,   [D, K] = K,
//! ```
//!
//! with `P^t` and `I` central, so the algebra splits as
//! `f ⊕ z` with `f = <P^y, D, K> ≅ sl(2, R)` and center `z = <P^t, I>`.
//!
//! All operations are generic over the scalar: exact `BigRational` for the
//! classification machinery, `f64` where group parameters enter.

use crate::linalg::Rat;
use core::fmt;
use core::ops::{Neg, Sub};
use num_traits::{One, Zero};

/// Scalars the algebra is defined over (`f64` or exact rationals).
pub trait Field:
    Clone + PartialEq + Zero + One + Neg<Output = Self> + Sub<Output = Self>
    + core::ops::Div<Output = Self>
{
}

impl Field for f64 {}
impl Field for Rat {}

/// Basis slots in the fixed order `(P^y, D, K, P^t, I)`.
pub const PY: usize = 0;
pub const D: usize = 1;
pub const K: usize = 2;
pub const PT: usize = 3;
pub const II: usize = 4;

pub const BASIS_NAMES: [&str; 5] = ["Py", "D", "K", "Pt", "I"];

/// Coefficient vector over the ordered basis `(P^y, D, K, P^t, I)`.
#[derive(Clone, PartialEq)]
pub struct EssVector<S>(pub [S; 5]);

/// Exact-rational coefficient vector.
pub type EssVec = EssVector<Rat>;

impl<S: fmt::Debug> fmt::Debug for EssVector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl<S: Field> EssVector<S> {
    pub fn zero() -> Self {
        EssVector(core::array::from_fn(|_| S::zero()))
    }

    pub fn basis(slot: usize) -> Self {
        let mut v = Self::zero();
        v.0[slot] = S::one();
        v
    }

    pub fn py() -> Self {
        Self::basis(PY)
    }
    pub fn d() -> Self {
        Self::basis(D)
    }
    pub fn k() -> Self {
        Self::basis(K)
    }
    pub fn pt() -> Self {
        Self::basis(PT)
    }
    pub fn ii() -> Self {
        Self::basis(II)
    }

    /// Iwasawa elements `Q^± = P^y ± K`.
    pub fn qpm(sign: i8) -> Self {
        let mut v = Self::py();
        v.0[K] = if sign >= 0 { S::one() } else { -S::one() };
        v
    }

    pub fn add(&self, rhs: &Self) -> Self {
        EssVector(core::array::from_fn(|i| self.0[i].clone() + rhs.0[i].clone()))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        EssVector(core::array::from_fn(|i| self.0[i].clone() - rhs.0[i].clone()))
    }

    pub fn scale(&self, s: &S) -> Self {
        EssVector(core::array::from_fn(|i| self.0[i].clone() * s.clone()))
    }

    pub fn neg(&self) -> Self {
        EssVector(core::array::from_fn(|i| -self.0[i].clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    /// Does the vector lie in the Levi factor `f = <P^y, D, K>`?
    pub fn in_levi(&self) -> bool {
        self.0[PT].is_zero() && self.0[II].is_zero()
    }

    /// Projection onto `f` (central components dropped).
    pub fn proj_levi(&self) -> Self {
        let mut v = self.clone();
        v.0[PT] = S::zero();
        v.0[II] = S::zero();
        v
    }

    /// Lie bracket from the structure-constant table; exact on exact input.
    pub fn bracket(&self, rhs: &Self) -> Self {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = Self::zero();
        // [P^y, D] = P^y
        out.0[PY] = a[PY].clone() * b[D].clone() - a[D].clone() * b[PY].clone();
        // [P^y, K] = 2 D
        let two_d = a[PY].clone() * b[K].clone() - a[K].clone() * b[PY].clone();
        out.0[D] = two_d.clone() + two_d;
        // [D, K] = K
        out.0[K] = a[D].clone() * b[K].clone() - a[K].clone() * b[D].clone();
        out
    }
}

/// 2x2 matrix over the scalar, row-major.
pub type Mat2<S> = [[S; 2]; 2];

pub fn mat2_mul<S: Field>(a: &Mat2<S>, b: &Mat2<S>) -> Mat2<S> {
    core::array::from_fn(|i| {
        core::array::from_fn(|j| {
            a[i][0].clone() * b[0][j].clone() + a[i][1].clone() * b[1][j].clone()
        })
    })
}

pub fn mat2_det<S: Field>(m: &Mat2<S>) -> S {
    m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone()
}

pub fn mat2_inv<S: Field>(m: &Mat2<S>) -> Mat2<S> {
    let det = mat2_det(m);
    [
        [m[1][1].clone() / det.clone(), -m[0][1].clone() / det.clone()],
        [-m[1][0].clone() / det.clone(), m[0][0].clone() / det],
    ]
}

pub fn mat2_commutator<S: Field>(a: &Mat2<S>, b: &Mat2<S>) -> Mat2<S> {
    let ab = mat2_mul(a, b);
    let ba = mat2_mul(b, a);
    core::array::from_fn(|i| core::array::from_fn(|j| ab[i][j].clone() - ba[i][j].clone()))
}

#[derive(Debug, Clone, PartialEq)]
pub enum LieError {
    /// `sl2_realize` was handed a vector with a central component.
    NotInLevi,
    /// A span operation was handed something that is not a subalgebra.
    NotClosed,
}

impl fmt::Display for LieError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieError::NotInLevi => write!(f, "vector has a nonzero central component"),
            LieError::NotClosed => write!(f, "span is not closed under the bracket"),
        }
    }
}

/// Matrix realization of the Levi factor, fixed project-wide:
///
/// ```text
/// P^y -> e = [[0,1],[0,0]],  D -> -h/2 = [[-1/2,0],[0,1/2]],  K -> -f = [[0,0],[-1,0]]
/// ```
///
/// This is a Lie algebra isomorphism onto trace-free 2x2 matrices.
pub fn sl2_realize<S: Field>(a: &EssVector<S>) -> Result<Mat2<S>, LieError> {
    if !a.in_levi() {
        return Err(LieError::NotInLevi);
    }
    let two = S::one() + S::one();
    let half_d = a.0[D].clone() / two;
    Ok([
        [-half_d.clone(), a.0[PY].clone()],
        [-a.0[K].clone(), half_d],
    ])
}

/// Inverse of [`sl2_realize`] on trace-free matrices.
pub fn sl2_unrealize<S: Field>(m: &Mat2<S>) -> EssVector<S> {
    let mut v = EssVector::zero();
    v.0[PY] = m[0][1].clone();
    v.0[D] = m[1][1].clone() + m[1][1].clone();
    v.0[K] = -m[1][0].clone();
    v
}

/// Pushforward of an algebra vector by a group element with Möbius matrix
/// `m` (the matrix of the y-action in Theorem-1 parameters).
///
/// Central components are untouched.  The Levi part transforms by
/// conjugation in the fixed realization after twisting the matrix by the
/// `diag(1,-1)` involution; the twist accounts for the orientation of the
/// Möbius parameterization relative to the realization and makes one
/// mechanism reproduce the closed-form actions of every generator,
/// including `Q^+` rotations and the discrete `J'`.  Conjugation kills the
/// overall sign, so the `±M` identification is invisible here.
pub fn pushforward_matrix<S: Field>(m: &Mat2<S>, a: &EssVector<S>) -> EssVector<S> {
    let twisted: Mat2<S> = [
        [m[0][0].clone(), -m[0][1].clone()],
        [-m[1][0].clone(), m[1][1].clone()],
    ];
    let x = sl2_realize(&a.proj_levi()).expect("levi projection");
    let conj = mat2_mul(&mat2_mul(&twisted, &x), &mat2_inv(&twisted));
    let mut out = sl2_unrealize(&conj);
    out.0[PT] = a.0[PT].clone();
    out.0[II] = a.0[II].clone();
    out
}

impl EssVector<f64> {
    /// Coefficients `(ξ, η, φ, χ)` of the realized vector field
    /// `ξ ∂_t + η ∂_x + φ ∂_y + χ u ∂_u` at a point `(t, x, y)`.
    pub fn vector_field_at(&self, p: [f64; 3]) -> [f64; 4] {
        let c = &self.0;
        let (_t, x, y) = (p[0], p[1], p[2]);
        [
            c[PT],
            c[D] * x + c[K] * 2.0 * x * y,
            c[PY] + c[D] * y + c[K] * y * y,
            -c[K] * x + c[II],
        ]
    }

    pub fn to_rat(&self, denom: i64) -> EssVec {
        // exact conversion helper for test vectors expressed over `1/denom`
        EssVector(core::array::from_fn(|i| {
            crate::linalg::rat((self.0[i] * denom as f64) as i64, denom)
        }))
    }
}

impl EssVec {
    pub fn to_f64(&self) -> EssVector<f64> {
        use num_traits::ToPrimitive;
        EssVector(core::array::from_fn(|i| self.0[i].to_f64().unwrap()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat_int;

    fn e(i: usize) -> EssVec {
        EssVec::basis(i)
    }

    #[test]
    fn bracket_table() {
        // [P^y, D] = P^y
        assert_eq!(e(PY).bracket(&e(D)), e(PY));
        // [P^y, K] = 2D
        assert_eq!(e(PY).bracket(&e(K)), e(D).scale(&rat_int(2)));
        // [D, K] = K
        assert_eq!(e(D).bracket(&e(K)), e(K));
        // center
        assert!(e(PT).bracket(&e(II)).is_zero());
        for i in 0..5 {
            assert!(e(i).bracket(&e(PT)).is_zero());
            assert!(e(i).bracket(&e(II)).is_zero());
        }
    }

    #[test]
    fn bracket_antisymmetry_and_self() {
        let a = EssVector([rat_int(3), rat_int(-1), rat_int(2), rat_int(5), rat_int(7)]);
        let b = EssVector([rat_int(1), rat_int(4), rat_int(-2), rat_int(0), rat_int(9)]);
        assert!(a.bracket(&a).is_zero());
        assert_eq!(a.bracket(&b), b.bracket(&a).neg());
    }

    #[test]
    fn jacobi_identity_on_basis() {
        for i in 0..5 {
            for j in 0..5 {
                for k in 0..5 {
                    let lhs = e(i)
                        .bracket(&e(j).bracket(&e(k)))
                        .add(&e(j).bracket(&e(k).bracket(&e(i))))
                        .add(&e(k).bracket(&e(i).bracket(&e(j))));
                    assert!(lhs.is_zero(), "jacobi failed at ({i},{j},{k})");
                }
            }
        }
    }

    #[test]
    fn realization_is_bracket_preserving() {
        let gens = [e(PY), e(D), e(K)];
        for a in &gens {
            for b in &gens {
                let lhs = sl2_realize(&a.bracket(b)).unwrap();
                let rhs = mat2_commutator(&sl2_realize(a).unwrap(), &sl2_realize(b).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn realization_round_trip() {
        let a = EssVector([rat_int(2), rat_int(-3), rat_int(5), rat_int(0), rat_int(0)]);
        assert_eq!(sl2_unrealize(&sl2_realize(&a).unwrap()), a);
        assert_eq!(sl2_realize(&EssVec::zero()).unwrap(), [
            [rat_int(0), rat_int(0)],
            [rat_int(0), rat_int(0)]
        ]);
        assert!(sl2_realize(&e(PT)).is_err());
    }

    #[test]
    fn matrix_images_match_fixed_choice() {
        use crate::linalg::rat;
        assert_eq!(
            sl2_realize(&e(PY)).unwrap(),
            [[rat_int(0), rat_int(1)], [rat_int(0), rat_int(0)]]
        );
        assert_eq!(
            sl2_realize(&e(K)).unwrap(),
            [[rat_int(0), rat_int(0)], [rat_int(-1), rat_int(0)]]
        );
        let d = sl2_realize(&e(D)).unwrap();
        assert_eq!(d[0][0], rat(-1, 2));
        assert_eq!(d[1][1], rat(1, 2));
    }

    #[test]
    fn pushforward_by_discrete_jprime() {
        // J' has Möbius matrix diag(1, -1): flips P^y and K, fixes D.
        let m: Mat2<Rat> = [[rat_int(1), rat_int(0)], [rat_int(0), rat_int(-1)]];
        assert_eq!(pushforward_matrix(&m, &e(PY)), e(PY).neg());
        assert_eq!(pushforward_matrix(&m, &e(K)), e(K).neg());
        assert_eq!(pushforward_matrix(&m, &e(D)), e(D));
        assert_eq!(pushforward_matrix(&m, &e(PT)), e(PT));
    }

    #[test]
    fn pushforward_sign_identification() {
        let m: Mat2<f64> = [[0.6, 0.5], [-0.8, 1.0]];
        let neg: Mat2<f64> = [[-0.6, -0.5], [0.8, -1.0]];
        let a = EssVector([1.0, -2.0, 0.5, 0.0, 3.0]);
        let p1 = pushforward_matrix(&m, &a);
        let p2 = pushforward_matrix(&neg, &a);
        for i in 0..5 {
            assert!((p1.0[i] - p2.0[i]).abs() < 1e-14);
        }
    }
}
