//! Projective unitary representations given by explicit matrices.
//!
//! The cocycle is always extracted from the matrices and verified, never
//! assumed: `π(xy) = σ(x,y) π(x) π(y)`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amalgam::{local_max, GroupFunction, Side};
use crate::error::{Error, Result};
use crate::geometry::Window;
use crate::group::{make_cyclic_product, make_heisenberg, FiniteGroup};
use crate::linalg::{
    c, frobenius, inner, norm_sq, random_hermitian, random_vector, root_of_unity, seeded_rng,
    unitarity_defect, CMatrix, CVector,
};

pub const UNITARY_TOL: f64 = 1e-10;
pub const COCYCLE_TOL: f64 = 1e-9;
pub const DEGREE_REL_TOL: f64 = 1e-9;
pub const DEFAULT_PROBES: usize = 8;

/// Below this value of `|tr(π(xy)(π(x)π(y))*)|/d` no phase relates the two
/// sides at all, and extraction fails outright instead of reporting a residual.
pub const STRUCTURAL_TRACE_FLOOR: f64 = 0.5;

/// Extracted cocycle `σ(x,y)`, row-major over pairs, with the worst residual
/// `max ‖π(xy) − σ(x,y)π(x)π(y)‖_F`.
#[derive(Debug, Clone, PartialEq)]
pub struct CocycleTable {
    order: usize,
    values: Vec<Complex64>,
    pub residual: f64,
}

impl CocycleTable {
    pub fn get(&self, x: usize, y: usize) -> Complex64 {
        self.values[x * self.order + y]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.residual <= tol
    }

    /// Largest deviation from `σ ≡ 1`.
    pub fn deviation_from_trivial(&self) -> f64 {
        self.values
            .iter()
            .map(|s| (s - c(1.0, 0.0)).norm())
            .fold(0.0, f64::max)
    }

    /// Largest violation of `σ(x,y)σ(xy,z) = σ(y,z)σ(x,yz)`.
    pub fn two_cocycle_defect(&self, group: &FiniteGroup) -> f64 {
        let mut worst: f64 = 0.0;
        for x in group.elements() {
            for y in group.elements() {
                let xy = group.mul(x, y);
                for z in group.elements() {
                    let lhs = self.get(x, y) * self.get(xy, z);
                    let rhs = self.get(y, z) * self.get(x, group.mul(y, z));
                    worst = worst.max((lhs - rhs).norm());
                }
            }
        }
        worst
    }
}

/// Extracts `σ(x,y) = tr(π(xy)(π(x)π(y))*)/d`, normalized to modulus one.
pub fn extract_cocycle(group: &FiniteGroup, matrices: &[CMatrix]) -> Result<CocycleTable> {
    let n = group.order();
    if matrices.len() != n {
        return Err(Error::DimMismatch {
            expected: n,
            actual: matrices.len(),
        });
    }
    let d = matrices[0].nrows();
    let mut values = Vec::with_capacity(n * n);
    let mut residual: f64 = 0.0;
    for x in 0..n {
        for y in 0..n {
            let prod = &matrices[x] * &matrices[y];
            let target = &matrices[group.mul(x, y)];
            let tr: Complex64 = target
                .iter()
                .zip(prod.iter())
                .map(|(a, b)| a * b.conj())
                .sum::<Complex64>()
                / d as f64;
            if tr.norm() < STRUCTURAL_TRACE_FLOOR {
                return Err(Error::NotProjective(format!(
                    "pi({x})pi({y}) is not a scalar multiple of pi(xy) (|tr|/d = {:.3e})",
                    tr.norm()
                )));
            }
            let sigma = tr / tr.norm();
            residual = residual.max(frobenius(&(target - prod.map(|z| z * sigma))));
            values.push(sigma);
        }
    }
    Ok(CocycleTable {
        order: n,
        values,
        residual,
    })
}

#[derive(Debug, Clone)]
pub struct ProjectiveRep {
    group: Arc<FiniteGroup>,
    dim: usize,
    matrices: Vec<CMatrix>,
    cocycle: CocycleTable,
    unitary_tol: f64,
}

impl ProjectiveRep {
    /// Validates unitarity, extracts the cocycle and checks `π(e)` is scalar.
    pub fn new(group: Arc<FiniteGroup>, matrices: Vec<CMatrix>) -> Result<Self> {
        Self::with_tolerance(group, matrices, UNITARY_TOL)
    }

    pub fn with_tolerance(
        group: Arc<FiniteGroup>,
        matrices: Vec<CMatrix>,
        unitary_tol: f64,
    ) -> Result<Self> {
        if matrices.len() != group.order() {
            return Err(Error::DimMismatch {
                expected: group.order(),
                actual: matrices.len(),
            });
        }
        let dim = matrices[0].nrows();
        if dim == 0 {
            return Err(Error::InvalidConfig("representation dimension must be positive".into()));
        }
        for m in &matrices {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    actual: m.nrows().max(m.ncols()),
                });
            }
        }
        for (element, m) in matrices.iter().enumerate() {
            let deviation = unitarity_defect(m);
            if deviation > unitary_tol {
                return Err(Error::NotUnitary { element, deviation });
            }
        }
        let cocycle = extract_cocycle(&group, &matrices)?;
        if !cocycle.is_valid(COCYCLE_TOL) {
            return Err(Error::NotProjective(format!(
                "cocycle residual {:.3e} exceeds {COCYCLE_TOL:e}",
                cocycle.residual
            )));
        }
        let pe = &matrices[group.identity()];
        let phase = pe[(0, 0)];
        let scalar = CMatrix::identity(dim, dim).map(|z| z * phase);
        if phase.norm() < 1.0 - unitary_tol || frobenius(&(pe - scalar)) > COCYCLE_TOL {
            return Err(Error::NotProjective(
                "pi(identity) is not a unimodular multiple of I".into(),
            ));
        }
        Ok(Self {
            group,
            dim,
            matrices,
            cocycle,
            unitary_tol,
        })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, x: usize) -> &CMatrix {
        &self.matrices[x]
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn cocycle(&self) -> &CocycleTable {
        &self.cocycle
    }

    pub fn unitary_tol(&self) -> f64 {
        self.unitary_tol
    }

    /// `π(x) v`.
    pub fn act(&self, x: usize, v: &CVector) -> CVector {
        &self.matrices[x] * v
    }

    /// `π ⊕ ρ` on the same group.
    pub fn direct_sum(&self, other: &ProjectiveRep) -> Result<Self> {
        let (d1, d2) = (self.dim, other.dim);
        let matrices = self
            .matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| {
                let mut m = CMatrix::zeros(d1 + d2, d1 + d2);
                m.view_mut((0, 0), (d1, d1)).copy_from(a);
                m.view_mut((d1, d1), (d2, d2)).copy_from(b);
                m
            })
            .collect();
        Self::new(self.group.clone(), matrices)
    }

    /// `x ↦ U π(x) U*` for a unitary `U`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        let matrices = self
            .matrices
            .iter()
            .map(|m| u * m * u.adjoint())
            .collect();
        Self::with_tolerance(self.group.clone(), matrices, self.unitary_tol)
    }
}

/// Finite time-frequency shifts on `C^N` indexed by `Z_N × Z_N`:
/// `π(k,l) = M_l T_k` with `(T_k f)(j) = f(j−k)` and
/// `(M_l f)(j) = e^{2πi lj/N} f(j)`.
pub fn gabor_rep(n: usize) -> Result<ProjectiveRep> {
    if !(1..=64).contains(&n) {
        return Err(Error::OrderTooLarge {
            order: n * n,
            cap: 64 * 64,
        });
    }
    let group = Arc::new(make_cyclic_product(&[n, n])?);
    let matrices = (0..n * n)
        .map(|x| {
            let (k, l) = (x % n, x / n);
            let mut m = CMatrix::zeros(n, n);
            for j in 0..n {
                m[(j, (j + n - k) % n)] = root_of_unity((l * j) as i64, n);
            }
            m
        })
        .collect();
    ProjectiveRep::new(group, matrices)
}

/// Schrödinger representation of the Heisenberg group over `Z_N` on `C^N`:
/// `π(a,b,c) f(j) = e^{2πi(c − bj)/N} f(j−a)`, a homomorphism for the law
/// `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')`.
pub fn heisenberg_schroedinger_rep(n: usize) -> Result<ProjectiveRep> {
    let group = Arc::new(make_heisenberg(n)?);
    let matrices = (0..n * n * n)
        .map(|x| {
            let (a, b, cc) = (x % n, (x / n) % n, x / (n * n));
            let mut m = CMatrix::zeros(n, n);
            for j in 0..n {
                m[(j, (j + n - a) % n)] = root_of_unity(cc as i64 - (b * j) as i64, n);
            }
            m
        })
        .collect();
    let rep = ProjectiveRep::new(group, matrices)?;
    let deviation = rep.cocycle().deviation_from_trivial();
    if deviation > COCYCLE_TOL {
        return Err(Error::NotHomomorphism { deviation });
    }
    Ok(rep)
}

/// The one-dimensional trivial representation.
pub fn trivial_rep(group: Arc<FiniteGroup>) -> Result<ProjectiveRep> {
    let matrices = vec![CMatrix::identity(1, 1); group.order()];
    ProjectiveRep::new(group, matrices)
}

#[derive(Debug, Clone)]
pub struct IrreducibilityReport {
    pub irreducible: bool,
    /// Largest `‖T_A − (tr T_A / d) I‖_F` over the trials.
    pub max_deviation: f64,
    /// A non-scalar element of the commutant when reducible.
    pub witness: Option<CMatrix>,
}

/// Averages random Hermitian `A` over the group,
/// `T_A = (1/#G) Σ π(x) A π(x)*`, and checks that `T_A` is scalar.
pub fn check_irreducible(rep: &ProjectiveRep, trials: usize, seed: u64) -> IrreducibilityReport {
    let d = rep.dim();
    let mut rng = seeded_rng(seed);
    let mut max_deviation: f64 = 0.0;
    let mut witness = None;
    for _ in 0..trials.max(1) {
        let a = random_hermitian(&mut rng, d);
        let mut t = CMatrix::zeros(d, d);
        for m in rep.matrices() {
            t += m * &a * m.adjoint();
        }
        t /= c(rep.group().order() as f64, 0.0);
        let mean = t.trace() / d as f64;
        let off = &t - CMatrix::identity(d, d).map(|z| z * mean);
        let dev = frobenius(&off);
        if dev > max_deviation {
            max_deviation = dev;
        }
        // scale-aware threshold: ‖A‖ is O(d) for the random Hermitian draw
        if dev > COCYCLE_TOL * frobenius(&a).max(1.0) && witness.is_none() {
            witness = Some(off);
        }
    }
    IrreducibilityReport {
        irreducible: witness.is_none(),
        max_deviation,
        witness,
    }
}

/// `V_g f(x) = ⟨f, π(x) g⟩` over the group.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFunction {
    pub values: Vec<Complex64>,
}

impl CoefficientFunction {
    pub fn l2_norm_sq(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    pub fn to_group_function(&self) -> GroupFunction {
        GroupFunction::from_complex(self.values.clone())
    }
}

pub fn matrix_coefficient(rep: &ProjectiveRep, f: &CVector, g: &CVector) -> Result<CoefficientFunction> {
    for v in [f, g] {
        if v.len() != rep.dim() {
            return Err(Error::DimMismatch {
                expected: rep.dim(),
                actual: v.len(),
            });
        }
    }
    let values = rep
        .matrices()
        .iter()
        .map(|m| inner(f, &(m * g)))
        .collect();
    Ok(CoefficientFunction { values })
}

/// `d_π` from `Σ_x |V_g g(x)|² = d_π⁻¹ ‖g‖⁴`, probed on random `g`.
pub fn formal_degree(rep: &ProjectiveRep, probes: usize, seed: u64) -> Result<f64> {
    let mut rng = seeded_rng(seed);
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for _ in 0..probes.max(1) {
        let g = random_vector(&mut rng, rep.dim());
        let v = matrix_coefficient(rep, &g, &g)?;
        let d = norm_sq(&g).powi(2) / v.l2_norm_sq();
        min = min.min(d);
        max = max.max(d);
    }
    if (max - min) > DEGREE_REL_TOL * max {
        return Err(Error::InconsistentDegree { min, max });
    }
    Ok(0.5 * (min + max))
}

/// Both inequalities used to show that `V_g g ∈ W^L(L¹)` forces `V_g g ∈
/// W^L(L²) ∩ W(L¹)`, with `C = d_π ‖g‖⁻²`:
///
/// * `‖M^L V_g g‖_2 ≤ C ‖V_g g‖_2 ‖M^L V_g g‖_1`
/// * `‖V_g g‖_W ≤ C ‖M^L V_g g‖_1²`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BSpaceReport {
    pub constant: f64,
    pub l2_lhs: f64,
    pub l2_rhs: f64,
    pub wiener_lhs: f64,
    pub wiener_rhs: f64,
    pub l2_holds: bool,
    pub wiener_holds: bool,
}

pub fn b_space_diagnostics(rep: &ProjectiveRep, g: &CVector, q: &Window) -> Result<BSpaceReport> {
    let gn = norm_sq(g);
    if gn == 0.0 {
        return Err(Error::InvalidConfig("generator must be nonzero".into()));
    }
    let group = rep.group();
    let d_pi = formal_degree(rep, DEFAULT_PROBES, 0)?;
    let constant = d_pi / gn;
    let v = matrix_coefficient(rep, g, g)?.to_group_function();
    let ml = local_max(group, &v, q, Side::Left);
    let ml_l1: f64 = ml.magnitudes().iter().sum();
    let ml_l2 = ml.magnitudes().iter().map(|x| x * x).sum::<f64>().sqrt();
    let v_l2 = v.magnitudes().iter().map(|x| x * x).sum::<f64>().sqrt();
    let wiener = crate::amalgam::wiener_norm(group, &v, q);
    let l2_rhs = constant * v_l2 * ml_l1;
    let wiener_rhs = constant * ml_l1 * ml_l1;
    let slack = |rhs: f64| rhs * (1.0 + 1e-12) + 1e-12;
    Ok(BSpaceReport {
        constant,
        l2_lhs: ml_l2,
        l2_rhs,
        wiener_lhs: wiener,
        wiener_rhs,
        l2_holds: ml_l2 <= slack(l2_rhs),
        wiener_holds: wiener <= slack(wiener_rhs),
    })
}
