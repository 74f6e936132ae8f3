//! Local maximal functions, the two-sided Wiener amalgam norm and the
//! inequalities built on them, including the Schur-type operator norm bound
//! for matrices dominated by a group envelope.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::{relative_separation, IndexSet, Window};
use crate::group::FiniteGroup;
use crate::linalg::CMatrix;

/// A function on the group, one value per element.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupFunction {
    values: Vec<Complex64>,
}

impl GroupFunction {
    pub fn from_complex(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self {
            values: values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    /// `δ_x`.
    pub fn delta(group: &FiniteGroup, x: usize) -> Self {
        let mut v = vec![0.0; group.order()];
        v[x] = 1.0;
        Self::from_real(&v)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).sum()
    }

    /// `F^∨(x) = F(x⁻¹)`.
    pub fn involution(&self, group: &FiniteGroup) -> Self {
        Self::from_complex(group.elements().map(|x| self.values[group.inv(x)]).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `M^L F(x) = max_{z∈Q} |F(xz)|`
    Left,
    /// `M^R F(x) = max_{z∈Q} |F(zx)|`
    Right,
}

pub fn local_max(group: &FiniteGroup, f: &GroupFunction, q: &Window, side: Side) -> GroupFunction {
    let mags = f.magnitudes();
    let out: Vec<f64> = group
        .elements()
        .map(|x| {
            q.elements()
                .iter()
                .map(|&z| match side {
                    Side::Left => mags[group.mul(x, z)],
                    Side::Right => mags[group.mul(z, x)],
                })
                .fold(0.0, f64::max)
        })
        .collect();
    GroupFunction::from_real(&out)
}

/// `‖F‖_W = ‖M^L M^R F‖_{L¹}`.
pub fn wiener_norm(group: &FiniteGroup, f: &GroupFunction, q: &Window) -> f64 {
    let right = local_max(group, f, q, Side::Right);
    local_max(group, &right, q, Side::Left).l1_norm()
}

/// Counting-measure convolution `(F₁∗F₂)(x) = Σ_y F₁(y) F₂(y⁻¹x)`.
pub fn convolve(group: &FiniteGroup, f1: &GroupFunction, f2: &GroupFunction) -> GroupFunction {
    let mut out = vec![Complex64::new(0.0, 0.0); group.order()];
    for y in group.elements() {
        let a = f1.values[y];
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        // y⁻¹x = w  ⇔  x = yw
        for w in group.elements() {
            out[group.mul(y, w)] += a * f2.values[w];
        }
    }
    GroupFunction::from_complex(out)
}

/// Both sides of the restriction estimate
/// `Σ_{λ∈Λ∖K} |F(λ)|² ≤ (Rel(Λ)/#Q) Σ_{x∈K^cQ} |M^L F(x)|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestrictionCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl RestrictionCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12) + 1e-15
    }
}

pub fn restriction_check(
    group: &FiniteGroup,
    f: &GroupFunction,
    lambda: &IndexSet,
    k: &Window,
    q: &Window,
) -> RestrictionCheck {
    let mags = f.magnitudes();
    let lhs = lambda
        .elements()
        .iter()
        .filter(|&&l| !k.contains(l))
        .map(|&l| mags[l] * mags[l])
        .sum();
    let outside = k.set().complement();
    let region = crate::geometry::product_mask(group, outside.elements(), q.elements());
    let ml = local_max(group, f, q, Side::Left).magnitudes();
    let tail: f64 = region
        .iter()
        .zip(&ml)
        .filter(|(inside, _)| **inside)
        .map(|(_, m)| m * m)
        .sum();
    let rel = relative_separation(group, lambda, q) as f64;
    RestrictionCheck {
        lhs,
        rhs: rel / q.len() as f64 * tail,
    }
}

/// Pointwise check of `M^L(F₁∗F₂) ≤ |F₁| ∗ M^L F₂` and
/// `M^R(F₁∗F₂) ≤ M^R F₁ ∗ |F₂|`; violations are positive parts of lhs − rhs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub left_violation: f64,
    pub right_violation: f64,
}

impl DominationReport {
    pub fn max_violation(&self) -> f64 {
        self.left_violation.max(self.right_violation)
    }
}

pub fn convolution_domination_check(
    group: &FiniteGroup,
    f1: &GroupFunction,
    f2: &GroupFunction,
    q: &Window,
) -> DominationReport {
    let conv = convolve(group, f1, f2);
    let abs1 = GroupFunction::from_real(&f1.magnitudes());
    let abs2 = GroupFunction::from_real(&f2.magnitudes());

    let left_lhs = local_max(group, &conv, q, Side::Left).magnitudes();
    let left_rhs = convolve(group, &abs1, &local_max(group, f2, q, Side::Left)).magnitudes();
    let right_lhs = local_max(group, &conv, q, Side::Right).magnitudes();
    let right_rhs = convolve(group, &local_max(group, f1, q, Side::Right), &abs2).magnitudes();

    let worst = |lhs: &[f64], rhs: &[f64]| {
        lhs.iter()
            .zip(rhs)
            .map(|(a, b)| (a - b).max(0.0))
            .fold(0.0, f64::max)
    };
    DominationReport {
        left_violation: worst(&left_lhs, &left_rhs),
        right_violation: worst(&right_lhs, &right_rhs),
    }
}

/// Nonnegative group function dominating a Λ×Λ matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub values: Vec<f64>,
}

impl Envelope {
    pub fn as_function(&self) -> GroupFunction {
        GroupFunction::from_real(&self.values)
    }

    /// `Θ · 1_{U^c}`.
    pub fn outside(&self, u: &Window) -> Envelope {
        Envelope {
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(x, &v)| if u.contains(x) { 0.0 } else { v })
                .collect(),
        }
    }

    /// `min{Θ((λ')⁻¹λ), Θ(λ⁻¹λ')}`.
    pub fn pair_bound(&self, group: &FiniteGroup, l: usize, lp: usize) -> f64 {
        let a = self.values[group.mul(group.inv(lp), l)];
        let b = self.values[group.mul(group.inv(l), lp)];
        a.min(b)
    }
}

/// The smallest envelope with `|M_{λ,λ'}| ≤ min{Θ((λ')⁻¹λ), Θ(λ⁻¹λ')}`:
/// `Θ(x)` is the largest `|M_{λ,λ'}|` over pairs where either product equals `x`.
///
/// Rows and columns of `m` follow the sorted order of `lambda`.
pub fn matrix_envelope(group: &FiniteGroup, m: &CMatrix, lambda: &IndexSet) -> Envelope {
    let idx = lambda.elements();
    assert_eq!(m.nrows(), idx.len(), "matrix must be indexed by Λ");
    let mut values = vec![0.0f64; group.order()];
    for (i, &l) in idx.iter().enumerate() {
        for (j, &lp) in idx.iter().enumerate() {
            let v = m[(i, j)].norm();
            let x1 = group.mul(group.inv(lp), l);
            let x2 = group.mul(group.inv(l), lp);
            values[x1] = values[x1].max(v);
            values[x2] = values[x2].max(v);
        }
    }
    Envelope { values }
}

/// `(Rel(Λ)/#Q) ‖Θ‖_W`, an upper bound for the operator norm of any
/// Λ×Λ matrix dominated by `Θ`.
pub fn schur_norm_bound(group: &FiniteGroup, theta: &Envelope, lambda: &IndexSet, q: &Window) -> f64 {
    let rel = relative_separation(group, lambda, q) as f64;
    rel / q.len() as f64 * wiener_norm(group, &theta.as_function(), q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::box_window;
    use crate::group::make_cyclic_product;
    use crate::linalg::{c, hermitian_norm};
    use crate::rep::{gabor_rep, matrix_coefficient};

    #[test]
    fn local_max_examples() {
        let z4 = make_cyclic_product(&[4]).unwrap();
        let f = GroupFunction::from_complex(vec![c(0.0, -2.0), c(1.0, 0.0), c(0.0, 0.0), c(3.0, 4.0)]);
        let e = Window::identity(&z4);
        assert_eq!(local_max(&z4, &f, &e, Side::Left).magnitudes(), vec![2.0, 1.0, 0.0, 5.0]);

        let delta = GroupFunction::delta(&z4, 0);
        let full = Window::full(&z4);
        assert_eq!(local_max(&z4, &delta, &full, Side::Left).magnitudes(), vec![1.0; 4]);

        // x = 1, z = -1 reaches F(0), so the bump spreads to both neighbours.
        let q = box_window(&z4, 1).unwrap();
        assert_eq!(
            local_max(&z4, &delta, &q, Side::Left).magnitudes(),
            vec![1.0, 1.0, 0.0, 1.0]
        );
    }

    #[test]
    fn wiener_norm_examples() {
        let z6 = make_cyclic_product(&[6]).unwrap();
        let delta = GroupFunction::delta(&z6, 0);
        assert_eq!(wiener_norm(&z6, &delta, &Window::identity(&z6)), 1.0);
        assert_eq!(wiener_norm(&z6, &delta, &Window::full(&z6)), 6.0);
        let constant = GroupFunction::from_real(&[0.5; 6]);
        for q in [Window::identity(&z6), box_window(&z6, 1).unwrap(), Window::full(&z6)] {
            assert!((wiener_norm(&z6, &constant, &q) - 3.0).abs() < 1e-15);
        }
    }

    fn gabor_two_coefficients() -> (crate::rep::ProjectiveRep, GroupFunction) {
        let rep = gabor_rep(2).unwrap();
        let mut g = crate::linalg::CVector::zeros(2);
        g[0] = c(1.0, 0.0);
        let v = matrix_coefficient(&rep, &g, &g).unwrap().to_group_function();
        (rep, v)
    }

    #[test]
    fn restriction_examples() {
        let (rep, v) = gabor_two_coefficients();
        let group = rep.group();
        let full = IndexSet::full(group);
        let e = Window::identity(group);
        let whole = restriction_check(group, &v, &full, &Window::full(group), &e);
        assert_eq!((whole.lhs, whole.rhs), (0.0, 0.0));

        let empty = Window::new(group, []).unwrap();
        let none = restriction_check(group, &v, &full, &empty, &e);
        assert_eq!(none.lhs, 2.0);
        assert_eq!(none.rhs, 2.0);

        let r = restriction_check(group, &v, &full, &e, &e);
        assert_eq!((r.lhs, r.rhs), (1.0, 1.0));
        assert!(r.holds());
    }

    #[test]
    fn convolution_with_delta_is_dominated() {
        let z8 = make_cyclic_product(&[8]).unwrap();
        let f1 = GroupFunction::from_real(&[0.3, -1.0, 2.0, 0.0, 0.5, 0.0, 1.5, -0.2]);
        let delta = GroupFunction::delta(&z8, 0);
        assert_eq!(convolve(&z8, &f1, &delta), f1);
        let q = box_window(&z8, 1).unwrap();
        assert!(convolution_domination_check(&z8, &f1, &delta, &q).max_violation() <= 1e-12);
    }

    #[test]
    fn convolution_of_constants() {
        let z8 = make_cyclic_product(&[8]).unwrap();
        let one = GroupFunction::from_real(&[1.0; 8]);
        let q = box_window(&z8, 1).unwrap();
        let conv = convolve(&z8, &one, &one);
        assert!(conv.magnitudes().iter().all(|&v| v == 8.0));
        let r = convolution_domination_check(&z8, &one, &one, &q);
        assert_eq!(r.max_violation(), 0.0);
    }

    #[test]
    fn envelope_examples() {
        let (rep, v) = gabor_two_coefficients();
        let group = rep.group();
        let full = IndexSet::full(group);
        let id = CMatrix::identity(4, 4);
        assert_eq!(matrix_envelope(group, &id, &full).values, vec![1.0, 0.0, 0.0, 0.0]);
        let zero = CMatrix::zeros(4, 4);
        assert!(matrix_envelope(group, &zero, &full).values.iter().all(|&x| x == 0.0));

        let frame = crate::frame::Frame::from_vectors(
            full.elements().to_vec(),
            group.elements().map(|x| rep.act(x, &{
                let mut g = crate::linalg::CVector::zeros(2);
                g[0] = c(1.0, 0.0);
                g
            })).collect(),
        )
        .unwrap();
        let theta = matrix_envelope(group, &frame.gram(), &full);
        assert_eq!(theta.values, v.magnitudes());
    }

    #[test]
    fn schur_bound_examples() {
        let (rep, v) = gabor_two_coefficients();
        let group = rep.group();
        let full = IndexSet::full(group);
        let e = Window::identity(group);
        let delta = Envelope { values: vec![0.7, 0.0, 0.0, 0.0] };
        assert!((schur_norm_bound(group, &delta, &full, &e) - 0.7).abs() < 1e-15);
        let theta = Envelope { values: v.magnitudes() };
        assert_eq!(schur_norm_bound(group, &theta, &full, &e), 2.0);
        let zero = Envelope { values: vec![0.0; 4] };
        assert_eq!(schur_norm_bound(group, &zero, &full, &e), 0.0);

        let mut gram = CMatrix::zeros(4, 4);
        let vectors: Vec<_> = group
            .elements()
            .map(|x| rep.matrix(x).column(0).into_owned())
            .collect();
        for i in 0..4 {
            for j in 0..4 {
                gram[(i, j)] = crate::linalg::inner(&vectors[j], &vectors[i]);
            }
        }
        assert!((hermitian_norm(&gram) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn wiener_norm_is_monotone_in_q() {
        let z12 = make_cyclic_product(&[12]).unwrap();
        let f = GroupFunction::from_real(&[1.0, 0.2, 0.0, 0.3, 0.0, 0.0, 0.9, 0.0, 0.1, 0.0, 0.0, 0.4]);
        let mut prev = wiener_norm(&z12, &f, &Window::identity(&z12));
        assert!((prev - f.l1_norm()).abs() < 1e-15);
        for r in 1..7 {
            let next = wiener_norm(&z12, &f, &box_window(&z12, r).unwrap());
            assert!(next >= prev);
            prev = next;
        }
    }
}
