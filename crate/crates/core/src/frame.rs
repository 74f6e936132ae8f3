//! Coherent systems `π(Λ)g` and the frame operators attached to any finite
//! family of vectors: coefficient, reconstruction, frame and Gramian
//! operators, frame bounds and the canonical dual.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{IndexSet, Window};
use crate::group::FiniteGroup;
use crate::linalg::{c, inner, norm_sq, CMatrix, CVector, HermitianEigen};
use crate::rep::{formal_degree, ProjectiveRep, DEFAULT_PROBES};

/// A family is a frame when `A > RANK_TOL · B`.
pub const RANK_TOL: f64 = 1e-10;

/// Seed for the formal-degree probes of a coherent system.
const DEGREE_SEED: u64 = 0;

/// A finite family of vectors `(g_λ)`, labelled by group elements.
///
/// Columns of the stored matrix are the vectors, in label order.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    labels: Vec<usize>,
    vectors: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub is_frame: bool,
    /// Spectrum of the frame operator, ascending.
    pub eigenvalues: Vec<f64>,
}

/// Everything derived from a frame via its canonical dual.
#[derive(Debug, Clone)]
pub struct FrameAnalysis {
    pub labels: Vec<usize>,
    pub lower: f64,
    pub upper: f64,
    pub eigenvalues: Vec<f64>,
    /// `S⁻¹`.
    pub inverse_frame_operator: CMatrix,
    /// Columns `h_λ = S⁻¹ g_λ`.
    pub duals: CMatrix,
    /// `⟨g_λ, h_λ⟩`.
    pub pairings: Vec<f64>,
    /// `C C*`, entry `(λ, λ')` equal to `⟨g_λ', g_λ⟩`.
    pub gram: CMatrix,
    /// Extreme eigenvalues of `S⁻¹`, i.e. the dual frame bounds.
    pub dual_bounds: (f64, f64),
}

impl FrameAnalysis {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.duals.nrows()
    }

    pub fn pairing_sum(&self) -> f64 {
        self.pairings.iter().sum()
    }

    /// Position of a label in the analysis order.
    pub fn position(&self, label: usize) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    /// `C S⁻¹ C*`, entry `(λ, λ')` equal to `⟨g_λ', h_λ⟩`.
    pub fn dual_gram(&self, frame: &Frame) -> CMatrix {
        frame.vectors.adjoint() * &self.duals
    }
}

impl Frame {
    /// Labels must be strictly increasing so rows line up with sorted index sets.
    pub fn from_vectors(labels: Vec<usize>, vectors: Vec<CVector>) -> Result<Self> {
        if labels.len() != vectors.len() {
            return Err(Error::DimMismatch {
                expected: labels.len(),
                actual: vectors.len(),
            });
        }
        let dim = vectors.first().map_or(0, |v| v.len());
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimMismatch {
                expected: dim,
                actual: v.len(),
            });
        }
        let m = CMatrix::from_fn(dim, vectors.len(), |r, col| vectors[col][r]);
        Self::from_matrix(labels, m)
    }

    pub fn from_matrix(labels: Vec<usize>, vectors: CMatrix) -> Result<Self> {
        if labels.len() != vectors.ncols() {
            return Err(Error::DimMismatch {
                expected: labels.len(),
                actual: vectors.ncols(),
            });
        }
        if labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSet("frame labels must be strictly increasing".into()));
        }
        Ok(Self { labels, vectors })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> CVector {
        self.vectors.column(i).into_owned()
    }

    /// Row `λ` maps `f` to `⟨f, g_λ⟩`; the adjoint is the reconstruction operator.
    pub fn coefficient_matrix(&self) -> CMatrix {
        self.vectors.adjoint()
    }

    /// `S = C*C = Σ g_λ g_λ*`.
    pub fn frame_operator(&self) -> CMatrix {
        &self.vectors * self.vectors.adjoint()
    }

    pub fn gram(&self) -> CMatrix {
        self.vectors.adjoint() * &self.vectors
    }

    pub fn frame_bounds(&self) -> FrameBounds {
        let eig = HermitianEigen::new(&self.frame_operator());
        let lower = eig.min().max(0.0);
        let upper = eig.max().max(0.0);
        FrameBounds {
            lower,
            upper,
            is_frame: upper > 0.0 && lower > RANK_TOL * upper,
            eigenvalues: eig.values,
        }
    }

    pub fn analyze(&self) -> Result<FrameAnalysis> {
        let s = self.frame_operator();
        let eig = HermitianEigen::new(&s);
        let (lower, upper) = (eig.min().max(0.0), eig.max().max(0.0));
        if !(upper > 0.0 && lower > RANK_TOL * upper) {
            return Err(Error::NotAFrame { lower, upper });
        }
        let s_inv = eig.apply(|x| 1.0 / x);
        let duals = &s_inv * &self.vectors;
        let pairings = (0..self.len())
            .map(|i| inner(&self.vector(i), &duals.column(i).into_owned()).re)
            .collect();
        let dual_eig = HermitianEigen::new(&s_inv);
        Ok(FrameAnalysis {
            labels: self.labels.clone(),
            lower,
            upper,
            eigenvalues: eig.values,
            inverse_frame_operator: s_inv,
            duals,
            pairings,
            gram: self.gram(),
            dual_bounds: (dual_eig.min(), dual_eig.max()),
        })
    }

    /// `(S^{-1/2} g_λ)`, a Parseval frame with the same labels.
    pub fn parsevalize(&self) -> Result<Frame> {
        let eig = HermitianEigen::new(&self.frame_operator());
        let (lower, upper) = (eig.min().max(0.0), eig.max().max(0.0));
        if !(upper > 0.0 && lower > RANK_TOL * upper) {
            return Err(Error::NotAFrame { lower, upper });
        }
        let root_inv = eig.apply(|x| 1.0 / x.sqrt());
        Ok(Frame {
            labels: self.labels.clone(),
            vectors: root_inv * &self.vectors,
        })
    }

    pub fn scaled(&self, t: f64) -> Frame {
        Frame {
            labels: self.labels.clone(),
            vectors: self.vectors.map(|z| z * t),
        }
    }

    /// Subfamily of the vectors whose label satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Frame {
        let cols: Vec<usize> = (0..self.len()).filter(|&i| keep(self.labels[i])).collect();
        let vectors = CMatrix::from_fn(self.dim(), cols.len(), |r, j| self.vectors[(r, cols[j])]);
        Frame {
            labels: cols.iter().map(|&i| self.labels[i]).collect(),
            vectors,
        }
    }

    /// Transforms every vector by a fixed operator.
    pub fn map_vectors(&self, op: &CMatrix) -> Frame {
        Frame {
            labels: self.labels.clone(),
            vectors: op * &self.vectors,
        }
    }
}

/// The coherent system `π(Λ)g` together with the fixed neighbourhood `Q`.
#[derive(Debug, Clone)]
pub struct CoherentSystem {
    rep: Arc<ProjectiveRep>,
    g: CVector,
    lambda: IndexSet,
    q: Window,
    d_pi: f64,
}

impl CoherentSystem {
    /// Computes `d_π` from the orthogonality relations of `rep`.
    pub fn new(rep: Arc<ProjectiveRep>, g: CVector, lambda: IndexSet, q: Window) -> Result<Self> {
        let d_pi = formal_degree(&rep, DEFAULT_PROBES, DEGREE_SEED)?;
        Self::with_degree(rep, g, lambda, q, d_pi)
    }

    fn with_degree(
        rep: Arc<ProjectiveRep>,
        g: CVector,
        lambda: IndexSet,
        q: Window,
        d_pi: f64,
    ) -> Result<Self> {
        if g.len() != rep.dim() {
            return Err(Error::DimMismatch {
                expected: rep.dim(),
                actual: g.len(),
            });
        }
        if norm_sq(&g) == 0.0 {
            return Err(Error::InvalidConfig("generator g must be nonzero".into()));
        }
        if lambda.universe() != rep.group().order() || q.set().universe() != rep.group().order() {
            return Err(Error::InvalidSet("index set and Q must live in the representation's group".into()));
        }
        if lambda.is_empty() {
            return Err(Error::InvalidSet("index set must be nonempty".into()));
        }
        q.require_unit_neighborhood("Q")?;
        Ok(Self {
            rep,
            g,
            lambda,
            q,
            d_pi,
        })
    }

    pub fn rep(&self) -> &Arc<ProjectiveRep> {
        &self.rep
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.rep.group()
    }

    pub fn g(&self) -> &CVector {
        &self.g
    }

    pub fn lambda(&self) -> &IndexSet {
        &self.lambda
    }

    pub fn q(&self) -> &Window {
        &self.q
    }

    pub fn d_pi(&self) -> f64 {
        self.d_pi
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn g_norm_sq(&self) -> f64 {
        norm_sq(&self.g)
    }

    /// Same representation, index set and `Q` with a new generator.
    pub fn with_generator(&self, g: CVector) -> Result<Self> {
        Self::with_degree(self.rep.clone(), g, self.lambda.clone(), self.q.clone(), self.d_pi)
    }

    pub fn with_index_set(&self, lambda: IndexSet) -> Result<Self> {
        Self::with_degree(self.rep.clone(), self.g.clone(), lambda, self.q.clone(), self.d_pi)
    }

    pub fn scaled(&self, t: Complex64) -> Result<Self> {
        self.with_generator(self.g.map(|z| z * t))
    }

    /// The family `(π(λ)g)_{λ∈Λ}`.
    pub fn frame(&self) -> Frame {
        let vectors: Vec<CVector> = self
            .lambda
            .elements()
            .iter()
            .map(|&l| self.rep.act(l, &self.g))
            .collect();
        Frame::from_vectors(self.lambda.elements().to_vec(), vectors)
            .expect("labels come from a sorted index set")
    }

    pub fn coefficient_matrix(&self) -> CMatrix {
        self.frame().coefficient_matrix()
    }

    pub fn frame_operator(&self) -> CMatrix {
        self.frame().frame_operator()
    }

    pub fn frame_bounds(&self) -> FrameBounds {
        self.frame().frame_bounds()
    }

    pub fn analyze(&self) -> Result<FrameAnalysis> {
        self.frame().analyze()
    }

    pub fn parsevalize(&self) -> Result<Frame> {
        self.frame().parsevalize()
    }
}

/// Rescales `g` by `t = √(2/(A+B))` so the new bounds satisfy
/// `0 < A' ≤ B' < 2`.
pub fn rescale_to_subcritical(sys: &CoherentSystem) -> Result<(CoherentSystem, f64)> {
    let b = sys.frame_bounds();
    if !b.is_frame {
        return Err(Error::NotAFrame {
            lower: b.lower,
            upper: b.upper,
        });
    }
    let t = (2.0 / (b.lower + b.upper)).sqrt();
    Ok((sys.scaled(c(t, 0.0))?, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, random_unit_vector, seeded_rng};
    use crate::rep::gabor_rep;

    fn gabor_two(lambda: &[usize]) -> CoherentSystem {
        let rep = Arc::new(gabor_rep(2).unwrap());
        let group = rep.group().clone();
        let mut g = CVector::zeros(2);
        g[0] = c(1.0, 0.0);
        CoherentSystem::new(
            rep,
            g,
            IndexSet::new(&group, lambda.iter().copied()).unwrap(),
            Window::identity(&group),
        )
        .unwrap()
    }

    #[test]
    fn coefficient_matrix_rows() {
        let sys = gabor_two(&[0, 1, 2, 3]);
        let cm = sys.coefficient_matrix();
        let expected = [[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [0.0, -1.0]];
        for (r, row) in expected.iter().enumerate() {
            for (col, &v) in row.iter().enumerate() {
                assert_eq!(cm[(r, col)], c(v, 0.0));
            }
        }
        let single = gabor_two(&[0]).coefficient_matrix();
        assert_eq!(single.nrows(), 1);
        assert_eq!(single[(0, 0)], c(1.0, 0.0));
    }

    #[test]
    fn zero_generator_is_rejected() {
        let rep = Arc::new(gabor_rep(2).unwrap());
        let group = rep.group().clone();
        let err = CoherentSystem::new(
            rep,
            CVector::zeros(2),
            IndexSet::full(&group),
            Window::identity(&group),
        );
        assert!(matches!(err, Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn frame_operator_examples() {
        let full = gabor_two(&[0, 1, 2, 3]).frame_operator();
        assert!(max_abs_diff(&full, &CMatrix::identity(2, 2).map(|z| z * 2.0)) < 1e-15);
        let onb = gabor_two(&[0, 1]).frame_operator();
        assert!(max_abs_diff(&onb, &CMatrix::identity(2, 2)) < 1e-15);
        let one = gabor_two(&[0]).frame_operator();
        assert_eq!(one[(0, 0)], c(1.0, 0.0));
        assert_eq!(one[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn frame_bounds_examples() {
        let b = gabor_two(&[0, 1, 2, 3]).frame_bounds();
        assert!((b.lower - 2.0).abs() < 1e-14 && (b.upper - 2.0).abs() < 1e-14 && b.is_frame);
        let b = gabor_two(&[0]).frame_bounds();
        assert!(b.lower.abs() < 1e-15 && (b.upper - 1.0).abs() < 1e-15 && !b.is_frame);
        let b = gabor_two(&[0, 1]).frame_bounds();
        assert!((b.lower - 1.0).abs() < 1e-14 && (b.upper - 1.0).abs() < 1e-14 && b.is_frame);
    }

    #[test]
    fn analyze_tight_and_onb() {
        let a = gabor_two(&[0, 1, 2, 3]).analyze().unwrap();
        for p in &a.pairings {
            assert!((p - 0.5).abs() < 1e-14);
        }
        assert!((a.pairing_sum() - 2.0).abs() < 1e-14);
        assert!((a.dual_bounds.0 - 0.5).abs() < 1e-14 && (a.dual_bounds.1 - 0.5).abs() < 1e-14);

        let onb = gabor_two(&[0, 1]).analyze().unwrap();
        assert!(onb.pairings.iter().all(|p| (p - 1.0).abs() < 1e-14));
    }

    #[test]
    fn duplicated_vectors_are_not_a_frame() {
        assert!(matches!(
            gabor_two(&[0, 2]).analyze(),
            Err(Error::NotAFrame { .. })
        ));
    }

    #[test]
    fn parsevalize_examples() {
        let sys = gabor_two(&[0, 1, 2, 3]);
        let p = sys.parsevalize().unwrap();
        let scaled = sys.frame().scaled(1.0 / 2f64.sqrt());
        assert!(max_abs_diff(p.vectors(), scaled.vectors()) < 1e-14);
        let b = p.frame_bounds();
        assert!((b.lower - 1.0).abs() < 1e-12 && (b.upper - 1.0).abs() < 1e-12);

        let onb = gabor_two(&[0, 1]);
        assert!(max_abs_diff(onb.parsevalize().unwrap().vectors(), onb.frame().vectors()) < 1e-14);

        let mut rng = seeded_rng(4);
        let vectors: Vec<CVector> = (0..8).map(|_| random_unit_vector(&mut rng, 4)).collect();
        let frame = Frame::from_vectors((0..8).collect(), vectors).unwrap();
        let pf = frame.parsevalize().unwrap();
        let b = pf.frame_bounds();
        assert!((b.lower - 1.0).abs() < 1e-9 && (b.upper - 1.0).abs() < 1e-9);
        let before = frame.analyze().unwrap().pairings;
        let after = pf.analyze().unwrap().pairings;
        for (x, y) in before.iter().zip(&after) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn rescale_examples() {
        let (sys, t) = rescale_to_subcritical(&gabor_two(&[0, 1, 2, 3])).unwrap();
        assert!((t - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        let b = sys.frame_bounds();
        assert!((b.lower - 1.0).abs() < 1e-14 && (b.upper - 1.0).abs() < 1e-14);

        let (_, t) = rescale_to_subcritical(&gabor_two(&[0, 1])).unwrap();
        assert!((t - 1.0).abs() < 1e-15);
        assert!(rescale_to_subcritical(&gabor_two(&[0])).is_err());
    }

    #[test]
    fn rescale_of_unequal_bounds() {
        // vectors e0, e1, e1, e1 scaled so that S = diag(1, 3)
        let mut e0 = CVector::zeros(2);
        e0[0] = c(1.0, 0.0);
        let mut e1 = CVector::zeros(2);
        e1[1] = c(1.0, 0.0);
        let frame = Frame::from_vectors(vec![0, 1, 2, 3], vec![e0, e1.clone(), e1.clone(), e1]).unwrap();
        let b = frame.frame_bounds();
        assert_eq!((b.lower, b.upper), (1.0, 3.0));
        let t = (2.0 / (b.lower + b.upper)).sqrt();
        let b2 = frame.scaled(t).frame_bounds();
        assert!((b2.lower - 0.5).abs() < 1e-14 && (b2.upper - 1.5).abs() < 1e-14);
    }

    #[test]
    fn restrict_keeps_labels_sorted() {
        let sys = gabor_two(&[0, 1, 2, 3]);
        let sub = sys.frame().restrict(|l| l != 1);
        assert_eq!(sub.labels(), &[0, 2, 3]);
        assert_eq!(sub.vector(1), sys.frame().vector(2));
    }
}
