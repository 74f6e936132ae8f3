//! Excess, removability certificates and the constructive removal of a
//! positive-density subset from an overcomplete coherent frame.

use serde::{Deserialize, Serialize};

use crate::amalgam::{matrix_envelope, schur_norm_bound, Envelope};
use crate::density::{beurling_density, frame_measure};
use crate::error::{Error, Result};
use crate::frame::{rescale_to_subcritical, CoherentSystem, Frame, FrameAnalysis, RANK_TOL};
use crate::geometry::{canonical_windows, is_u_dense, IndexSet, Window, WindowSequence};
use crate::group::FiniteGroup;
use crate::linalg::{spectral_norm, CMatrix, HermitianEigen};

/// `Γ` is removable when the certificate norm is below `1 − REMOVABLE_TOL`.
pub const REMOVABLE_TOL: f64 = 1e-9;
/// Frames with `M⁺ ≥ 1 − OVERCOMPLETE_TOL` are treated as exact.
pub const OVERCOMPLETE_TOL: f64 = 1e-9;
/// Allowed defect of `C(I − C*C) = (I − CC*)C`, relative to `max(1, B)²`.
pub const COMMUTATION_TOL: f64 = 1e-10;
/// Tolerance for membership in `Λ'` in the necessary-condition check.
pub const NECESSARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShrinkStrategy {
    #[default]
    DropLargestPairing,
    DropLargestRowSum,
}

/// `None` selects the automatic value: `α = (M⁺+1)/2`, `ε = (1−α)/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemovalConfig {
    pub alpha: Option<f64>,
    pub epsilon: Option<f64>,
    pub max_truncation_order: usize,
    pub shrink_strategy: ShrinkStrategy,
}

impl Default for RemovalConfig {
    fn default() -> Self {
        Self {
            alpha: None,
            epsilon: None,
            max_truncation_order: 256,
            shrink_strategy: ShrinkStrategy::default(),
        }
    }
}

/// `#Λ − dim`.
pub fn excess(analysis: &FrameAnalysis) -> usize {
    analysis.len().saturating_sub(analysis.dim())
}

/// `{λ : ⟨g_λ, h_λ⟩ < α}`.
pub fn lambda_alpha(group: &FiniteGroup, analysis: &FrameAnalysis, alpha: f64) -> Result<IndexSet> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let picked = analysis
        .labels
        .iter()
        .zip(&analysis.pairings)
        .filter(|(_, &p)| p < alpha)
        .map(|(&l, _)| l);
    IndexSet::new(group, picked)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcessCriterion {
    /// Largest pairing strictly below `1 − OVERCOMPLETE_TOL`.
    pub alpha_star: Option<f64>,
    /// Labels with pairing at most `alpha_star`.
    pub subset: Vec<usize>,
    pub mean_pairing: f64,
    /// `(1 − mean)/3`, the margin used by the counting argument.
    pub counting_epsilon: f64,
    /// `#Λ·ε/(1−ε)`; more pairings than this lie below `1 − ε`.
    pub counting_bound: f64,
    pub counting_actual: usize,
}

impl ExcessCriterion {
    pub fn counting_holds(&self) -> bool {
        self.counting_epsilon <= 0.0 || self.counting_actual as f64 > self.counting_bound
    }
}

pub fn infinite_excess_criterion(analysis: &FrameAnalysis) -> ExcessCriterion {
    let alpha_star = analysis
        .pairings
        .iter()
        .copied()
        .filter(|&p| p < 1.0 - OVERCOMPLETE_TOL)
        .fold(None, |acc: Option<f64>, p| Some(acc.map_or(p, |a| a.max(p))));
    let subset = match alpha_star {
        Some(a) => analysis
            .labels
            .iter()
            .zip(&analysis.pairings)
            .filter(|(_, &p)| p <= a)
            .map(|(&l, _)| l)
            .collect(),
        None => Vec::new(),
    };
    let n = analysis.len();
    let mean = analysis.pairing_sum() / n.max(1) as f64;
    let eps = ((1.0 - mean) / 3.0).max(0.0);
    let counting_bound = n as f64 * eps / (1.0 - eps);
    let counting_actual = analysis.pairings.iter().filter(|&&p| p <= 1.0 - eps).count();
    ExcessCriterion {
        alpha_star,
        subset,
        mean_pairing: mean,
        counting_epsilon: eps,
        counting_bound,
        counting_actual,
    }
}

fn subcritical(lower: f64, upper: f64) -> Result<f64> {
    if !(lower > 0.0 && lower <= upper && upper < 2.0) {
        return Err(Error::NotSubcritical { lower, upper });
    }
    Ok((1.0 - lower).max(upper - 1.0).max(0.0))
}

/// Smallest `N ≥ 0` with `r^{N+1}/(1−r)·B' ≤ ε`, `r = max(1−A', B'−1)`.
pub fn truncation_order(lower: f64, upper: f64, epsilon: f64) -> Result<usize> {
    let r = subcritical(lower, upper)?;
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidConfig(format!("epsilon must be positive, got {epsilon}")));
    }
    if r == 0.0 {
        return Ok(0);
    }
    let tail = |n: usize| r.powi(n as i32 + 1) / (1.0 - r) * upper;
    // start from the logarithmic estimate, then settle exactly
    let estimate = ((epsilon * (1.0 - r) / upper).ln() / r.ln() - 1.0).floor();
    let mut n = if estimate.is_finite() && estimate > 0.0 { estimate as usize } else { 0 };
    while n > 0 && tail(n - 1) <= epsilon {
        n -= 1;
    }
    while tail(n) > epsilon {
        n += 1;
    }
    Ok(n)
}

/// `M_N = Σ_{j≤N} (I − CC*)^j CC*` split into diagonal and off-diagonal parts.
#[derive(Debug, Clone)]
pub struct TruncationSplit {
    pub order: usize,
    pub m_n: CMatrix,
    pub d_n: CMatrix,
    pub r_n: CMatrix,
    /// `r = max(1−A, B−1)`.
    pub contraction: f64,
    /// `r^{N+1}/(1−r)·‖CC*‖`.
    pub tail_bound: f64,
    /// `‖C(I − C*C) − (I − CC*)C‖`.
    pub commutation_defect: f64,
}

/// Requires frame bounds inside `(0, 2)`.
pub fn neumann_truncation(frame: &Frame, order: usize) -> Result<TruncationSplit> {
    let bounds = frame.frame_bounds();
    let r = subcritical(bounds.lower, bounds.upper)?;
    let c = frame.coefficient_matrix();
    let gram = frame.gram();
    let n = gram.nrows();
    let id = CMatrix::identity(n, n);
    let step = &id - &gram;

    let mut term = gram.clone();
    let mut m_n = gram.clone();
    for _ in 0..order {
        term = &step * term;
        m_n += &term;
    }
    let d_n = CMatrix::from_diagonal(&m_n.diagonal());
    let r_n = &m_n - &d_n;

    let s = frame.frame_operator();
    let dim = s.nrows();
    let lhs = &c * (CMatrix::identity(dim, dim) - &s);
    let rhs = &step * &c;
    let commutation_defect = spectral_norm(&(lhs - rhs));
    let scale = bounds.upper.max(1.0).powi(2);
    if commutation_defect > COMMUTATION_TOL * scale {
        return Err(Error::InvalidConfig(format!(
            "Neumann commutation defect {commutation_defect:e} exceeds tolerance"
        )));
    }
    let tail_bound = if r == 0.0 {
        0.0
    } else {
        r.powi(order as i32 + 1) / (1.0 - r) * bounds.upper
    };
    Ok(TruncationSplit {
        order,
        m_n,
        d_n,
        r_n,
        contraction: r,
        tail_bound,
        commutation_defect,
    })
}

/// Greedy maximal family `Γ ⊆ Λ_α` with pairwise disjoint `γU₁`, scanned in
/// increasing element order.
pub fn select_packing(group: &FiniteGroup, lambda_alpha: &IndexSet, u1: &Window) -> Result<IndexSet> {
    if !u1.contains_identity() {
        return Err(Error::InvalidSet("packing window must contain the identity".into()));
    }
    let mut occupied = vec![false; group.order()];
    let mut picked = Vec::new();
    for &gamma in lambda_alpha.elements() {
        let cells: Vec<usize> = u1.elements().iter().map(|&u| group.mul(gamma, u)).collect();
        if cells.iter().any(|&x| occupied[x]) {
            continue;
        }
        for x in cells {
            occupied[x] = true;
        }
        picked.push(gamma);
    }
    IndexSet::new(group, picked)
}

/// Outcome of the certificate test for one `Γ`, with the eigensolve cross-check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub gamma: Vec<usize>,
    /// `‖C_Γ S⁻¹ C_Γ*‖`.
    pub norm: f64,
    pub is_removable: bool,
    /// Frame bounds of the family indexed by `Λ ∖ Γ`.
    pub reduced_bounds: (f64, f64),
    /// Whether `λ_min(S_{Λ∖Γ}) > RANK_TOL·B`.
    pub reduced_is_frame: bool,
}

impl CertificateCheck {
    pub fn agrees(&self) -> bool {
        self.is_removable == self.reduced_is_frame
    }
}

/// Certificate matrix `C_Γ S⁻¹ C_Γ*`, rows in the order of `gamma`.
pub fn certificate_matrix(frame: &Frame, analysis: &FrameAnalysis, gamma: &[usize]) -> Result<CMatrix> {
    let pos: Vec<usize> = gamma
        .iter()
        .map(|&l| analysis.position(l).ok_or(Error::GammaNotSubset(l)))
        .collect::<Result<_>>()?;
    let k = pos.len();
    Ok(CMatrix::from_fn(k, k, |i, j| {
        let gi = frame.vectors().column(pos[i]);
        let hj = analysis.duals.column(pos[j]);
        gi.dotc(&hj)
    }))
}

pub fn removal_certificate(frame: &Frame, analysis: &FrameAnalysis, gamma: &[usize]) -> Result<CertificateCheck> {
    let mut gamma = gamma.to_vec();
    gamma.sort_unstable();
    gamma.dedup();
    let k = certificate_matrix(frame, analysis, &gamma)?;
    let norm = if gamma.is_empty() {
        0.0
    } else {
        HermitianEigen::new(&k).max().max(0.0)
    };
    let reduced = frame.restrict(|l| gamma.binary_search(&l).is_err());
    let rb = reduced.frame_bounds();
    Ok(CertificateCheck {
        gamma,
        norm,
        is_removable: norm < 1.0 - REMOVABLE_TOL,
        reduced_bounds: (rb.lower, rb.upper),
        reduced_is_frame: rb.lower > RANK_TOL * analysis.upper,
    })
}

/// The three budget terms of the final estimate and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetTerms {
    /// Schur bound of the off-diagonal envelope outside `U₁`.
    pub schur_term: f64,
    /// `max_{γ∈Γ} ⟨g_γ, h_γ⟩`.
    pub max_pairing: f64,
    /// Neumann tail bound, counted once for `M_∞ − M_N` and once for `D_∞ − D_N`.
    pub tail_term: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShrinkStep {
    pub removed: usize,
    pub norm_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovalTrace {
    pub rescale_factor: f64,
    pub rescaled_bounds: (f64, f64),
    pub m_plus: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub alpha_auto: bool,
    pub epsilon_auto: bool,
    pub lambda_alpha: Vec<usize>,
    pub truncation_order: usize,
    pub contraction: f64,
    pub tail_bound: f64,
    pub commutation_defect: f64,
    pub u1: Vec<usize>,
    /// `(Rel/#Q)·‖Θ·1_{U₁ᶜ}‖_W` for the chosen `U₁`.
    pub envelope_tail_norm: f64,
    pub u2: Vec<usize>,
    pub packing: Vec<usize>,
    pub budget: BudgetTerms,
    pub unshrunk_norm: f64,
    pub shrink_steps: Vec<ShrinkStep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovalCertificate {
    pub gamma: Vec<usize>,
    pub certificate_norm: f64,
    pub is_removable: bool,
    pub reduced_bounds: (f64, f64),
    pub gamma_density: f64,
    pub trace: RemovalTrace,
}

impl RemovalCertificate {
    pub fn shrunk(&self) -> bool {
        !self.trace.shrink_steps.is_empty()
    }
}

/// Certificate plus the intermediate matrices, for audit output.
#[derive(Debug, Clone)]
pub struct RemovalRun {
    pub certificate: RemovalCertificate,
    pub split: TruncationSplit,
    pub envelope: Envelope,
    pub certificate_matrix: CMatrix,
}

pub fn remove_positive_density(
    sys: &CoherentSystem,
    windows: &WindowSequence,
    config: &RemovalConfig,
) -> Result<RemovalCertificate> {
    run_removal(sys, windows, config).map(|run| run.certificate)
}

pub fn run_removal(sys: &CoherentSystem, windows: &WindowSequence, config: &RemovalConfig) -> Result<RemovalRun> {
    let group = sys.group().clone();
    let lambda = sys.lambda();

    let (scaled, t) = rescale_to_subcritical(sys)?;
    let frame = scaled.frame();
    let analysis = frame.analyze()?;

    let m_plus = frame_measure(&group, &analysis, lambda, windows)?.m_plus;
    if m_plus >= 1.0 - OVERCOMPLETE_TOL {
        return Err(Error::NotOvercomplete { m_plus });
    }

    let alpha = config.alpha.unwrap_or((m_plus + 1.0) / 2.0);
    if !(alpha > 0.0 && alpha < 1.0) || alpha <= m_plus {
        return Err(Error::InvalidConfig(format!(
            "alpha must lie in (M+, 1) = ({m_plus}, 1), got {alpha}"
        )));
    }
    let epsilon = config.epsilon.unwrap_or((1.0 - alpha) / 4.0);
    if !(epsilon > 0.0 && epsilon < (1.0 - alpha) / 3.0) {
        return Err(Error::InvalidConfig(format!(
            "epsilon must lie in (0, (1-alpha)/3) = (0, {}), got {epsilon}",
            (1.0 - alpha) / 3.0
        )));
    }

    let lam_alpha = lambda_alpha(&group, &analysis, alpha)?;
    if lam_alpha.is_empty() {
        return Err(Error::InvalidConfig("no pairing lies below alpha".into()));
    }

    let order = truncation_order(analysis.lower, analysis.upper, epsilon)?;
    if order > config.max_truncation_order {
        return Err(Error::InvalidConfig(format!(
            "truncation order {order} exceeds the configured maximum {}",
            config.max_truncation_order
        )));
    }
    let split = neumann_truncation(&frame, order)?;

    let theta = matrix_envelope(&group, &split.m_n, lambda);
    let family = canonical_windows(&group);
    let (u1, envelope_tail_norm) = family
        .iter()
        .map(|u| (u, schur_norm_bound(&group, &theta.outside(u), &lam_alpha, sys.q())))
        .find(|(_, bound)| *bound <= epsilon)
        .map(|(u, b)| (u.clone(), b))
        .unwrap_or_else(|| (Window::full(&group), 0.0));
    let u2 = family
        .iter()
        .find(|u| is_u_dense(&group, &lam_alpha, u))
        .cloned()
        .unwrap_or_else(|| Window::full(&group));

    let packing = select_packing(&group, &lam_alpha, &u1)?;
    let max_pairing = packing
        .elements()
        .iter()
        .map(|&l| analysis.pairings[analysis.position(l).expect("Γ ⊆ Λ")])
        .fold(0.0, f64::max);
    let budget = BudgetTerms {
        schur_term: envelope_tail_norm,
        max_pairing,
        tail_term: split.tail_bound,
        total: envelope_tail_norm + max_pairing + 2.0 * split.tail_bound,
    };

    let mut gamma: Vec<usize> = packing.elements().to_vec();
    let mut check = removal_certificate(&frame, &analysis, &gamma)?;
    let unshrunk_norm = check.norm;
    let mut shrink_steps = Vec::new();
    while !(check.is_removable && check.reduced_is_frame) {
        if gamma.is_empty() {
            return Err(Error::PipelineExhausted);
        }
        let drop_at = shrink_target(&frame, &analysis, &gamma, config.shrink_strategy)?;
        let removed = gamma.remove(drop_at);
        if gamma.is_empty() {
            return Err(Error::PipelineExhausted);
        }
        check = removal_certificate(&frame, &analysis, &gamma)?;
        shrink_steps.push(ShrinkStep {
            removed,
            norm_after: check.norm,
        });
    }

    // report bounds for the caller's scaling, not the rescaled one
    let reduced_bounds = (check.reduced_bounds.0 / (t * t), check.reduced_bounds.1 / (t * t));
    let gamma_set = IndexSet::new(&group, gamma.iter().copied())?;
    let gamma_density = beurling_density(&group, &gamma_set, windows).d_minus;
    let certificate_matrix = certificate_matrix(&frame, &analysis, &gamma)?;

    Ok(RemovalRun {
        certificate: RemovalCertificate {
            gamma,
            certificate_norm: check.norm,
            is_removable: check.is_removable,
            reduced_bounds,
            gamma_density,
            trace: RemovalTrace {
                rescale_factor: t,
                rescaled_bounds: (analysis.lower, analysis.upper),
                m_plus,
                alpha,
                epsilon,
                alpha_auto: config.alpha.is_none(),
                epsilon_auto: config.epsilon.is_none(),
                lambda_alpha: lam_alpha.elements().to_vec(),
                truncation_order: order,
                contraction: split.contraction,
                tail_bound: split.tail_bound,
                commutation_defect: split.commutation_defect,
                u1: u1.elements().to_vec(),
                envelope_tail_norm,
                u2: u2.elements().to_vec(),
                packing: packing.elements().to_vec(),
                budget,
                unshrunk_norm,
                shrink_steps,
            },
        },
        split,
        envelope: theta,
        certificate_matrix,
    })
}

fn shrink_target(frame: &Frame, analysis: &FrameAnalysis, gamma: &[usize], strategy: ShrinkStrategy) -> Result<usize> {
    let scores: Vec<f64> = match strategy {
        ShrinkStrategy::DropLargestPairing => gamma
            .iter()
            .map(|&l| analysis.pairings[analysis.position(l).expect("Γ ⊆ Λ")])
            .collect(),
        ShrinkStrategy::DropLargestRowSum => {
            let k = certificate_matrix(frame, analysis, gamma)?;
            (0..k.nrows()).map(|i| k.row(i).iter().map(|z| z.norm()).sum()).collect()
        }
    };
    // first maximum, so ties resolve to the smallest label
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    Ok(best)
}

/// Both sides of `D⁻(Λ') ≤ (1/A)·D⁺(Λ)·(1 − d_π/D⁺(Λ))` and the
/// accompanying membership and density checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NecessaryConditionReport {
    pub d_pi: f64,
    pub d_plus: f64,
    /// Lower frame bound of the Parseval frame restricted to `Λ ∖ Γ`.
    pub reduced_lower: f64,
    pub lambda_prime: Vec<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub d_plus_exceeds_d_pi: bool,
    pub inequality_holds: bool,
    pub gamma_in_lambda_prime: bool,
}

impl NecessaryConditionReport {
    pub fn passed(&self) -> bool {
        self.d_plus_exceeds_d_pi && self.inequality_holds && self.gamma_in_lambda_prime
    }
}

pub fn necessary_condition_check(
    sys: &CoherentSystem,
    gamma: &IndexSet,
    windows: &WindowSequence,
) -> Result<NecessaryConditionReport> {
    let group = sys.group().clone();
    let frame = sys.frame();
    let analysis = frame.analyze()?;
    let check = removal_certificate(&frame, &analysis, gamma.elements())?;
    if !(check.is_removable && check.reduced_is_frame) {
        return Err(Error::GammaNotRemovable(format!("certificate norm {}", check.norm)));
    }
    let gamma_density = beurling_density(&group, gamma, windows).d_minus;
    if gamma.is_empty() || gamma_density <= 0.0 {
        return Err(Error::GammaNotRemovable("Γ has zero lower density".into()));
    }

    let parseval = frame.parsevalize()?;
    let reduced_lower = parseval.restrict(|l| !gamma.contains(l)).frame_bounds().lower;
    let pairings = parseval.analyze()?.pairings;
    let prime: Vec<usize> = analysis
        .labels
        .iter()
        .zip(&pairings)
        .filter(|(_, &p)| p <= 1.0 - reduced_lower + NECESSARY_TOL)
        .map(|(&l, _)| l)
        .collect();
    let prime_set = IndexSet::new(&group, prime.iter().copied())?;

    let d_pi = sys.d_pi();
    let d_plus = beurling_density(&group, sys.lambda(), windows).d_plus;
    let lhs = beurling_density(&group, &prime_set, windows).d_minus;
    let rhs = d_plus * (1.0 - d_pi / d_plus) / reduced_lower;
    Ok(NecessaryConditionReport {
        d_pi,
        d_plus,
        reduced_lower,
        lambda_prime: prime,
        lhs,
        rhs,
        d_plus_exceeds_d_pi: d_plus > d_pi,
        inequality_holds: lhs <= rhs + NECESSARY_TOL * rhs.abs().max(1.0),
        gamma_in_lambda_prime: gamma.is_subset(&prime_set),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::make_cyclic_product;
    use crate::linalg::{c, random_unit_vector, seeded_rng, CVector};
    use crate::rep::gabor_rep;
    use std::sync::Arc;

    fn gabor(n: usize, g: CVector, lambda: Option<&[usize]>) -> CoherentSystem {
        let rep = Arc::new(gabor_rep(n).unwrap());
        let group = rep.group().clone();
        let lambda = match lambda {
            Some(l) => IndexSet::new(&group, l.iter().copied()).unwrap(),
            None => IndexSet::full(&group),
        };
        CoherentSystem::new(rep, g, lambda, Window::identity(&group)).unwrap()
    }

    fn e0(n: usize) -> CVector {
        let mut g = CVector::zeros(n);
        g[0] = c(1.0, 0.0);
        g
    }

    fn basis_frame(cols: &[usize], dim: usize) -> Frame {
        let vectors = cols
            .iter()
            .map(|&k| {
                let mut v = CVector::zeros(dim);
                v[k] = c(1.0, 0.0);
                v
            })
            .collect();
        Frame::from_vectors((0..cols.len()).collect(), vectors).unwrap()
    }

    #[test]
    fn excess_examples() {
        assert_eq!(excess(&gabor(2, e0(2), None).analyze().unwrap()), 2);
        assert_eq!(excess(&gabor(2, e0(2), Some(&[0, 1])).analyze().unwrap()), 0);
        assert_eq!(excess(&basis_frame(&[0, 1, 1], 2).analyze().unwrap()), 1);
    }

    #[test]
    fn lambda_alpha_examples() {
        let sys = gabor(2, e0(2), None);
        let group = sys.group().clone();
        let a = sys.analyze().unwrap();
        assert_eq!(lambda_alpha(&group, &a, 0.75).unwrap().len(), 4);
        assert!(lambda_alpha(&group, &a, 0.25).unwrap().is_empty());
        let onb = gabor(2, e0(2), Some(&[0, 1])).analyze().unwrap();
        assert!(lambda_alpha(&group, &onb, 0.999).unwrap().is_empty());
    }

    #[test]
    fn excess_criterion_examples() {
        let tight = infinite_excess_criterion(&gabor(2, e0(2), None).analyze().unwrap());
        assert!((tight.alpha_star.unwrap() - 0.5).abs() < 1e-14);
        assert_eq!(tight.subset, vec![0, 1, 2, 3]);
        assert!(tight.counting_holds());

        let onb = infinite_excess_criterion(&gabor(2, e0(2), Some(&[0, 1])).analyze().unwrap());
        assert!(onb.alpha_star.is_none() && onb.subset.is_empty());

        // e0, e1, e1, e2: pairings 1, 1/2, 1/2, 1
        let mixed = basis_frame(&[0, 1, 1, 2], 3).analyze().unwrap();
        let crit = infinite_excess_criterion(&mixed);
        assert_eq!(crit.subset, vec![1, 2]);
        assert!((crit.alpha_star.unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn truncation_order_examples() {
        assert_eq!(truncation_order(1.0, 1.0, 0.01).unwrap(), 0);
        assert_eq!(truncation_order(0.5, 1.0, 0.1).unwrap(), 4);
        assert_eq!(truncation_order(0.5, 1.0, 100.0).unwrap(), 0);
        assert!(matches!(truncation_order(0.5, 2.0, 0.1), Err(Error::NotSubcritical { .. })));
        // minimality against a direct scan
        for &(a, b, e) in &[(0.3, 1.6, 0.01), (0.9, 1.05, 1e-6), (0.01, 1.0, 0.5)] {
            let n = truncation_order(a, b, e).unwrap();
            let r = f64::max(1.0 - a, b - 1.0);
            let tail = |k: i32| r.powi(k + 1) / (1.0 - r) * b;
            assert!(tail(n as i32) <= e);
            assert!(n == 0 || tail(n as i32 - 1) > e);
        }
    }

    #[test]
    fn neumann_parseval_and_tight_half() {
        let onb = gabor(2, e0(2), Some(&[0, 1])).frame();
        let s = neumann_truncation(&onb, 3).unwrap();
        assert_eq!(s.tail_bound, 0.0);
        assert!(crate::linalg::max_abs_diff(&s.m_n, &onb.gram()) < 1e-15);

        // e0/2 over the full group gives S = I/2, so r = 1/2
        let half = gabor(2, e0(2), None).frame().scaled(0.5);
        let a = half.analyze().unwrap();
        assert!((a.lower - 0.5).abs() < 1e-14);
        let s = neumann_truncation(&half, 1).unwrap();
        assert!((s.contraction - 0.5).abs() < 1e-14);
        let m_inf = a.dual_gram(&half);
        let err = spectral_norm(&(&m_inf - &s.m_n));
        assert!(err <= s.tail_bound + 1e-12);
        for i in 0..4 {
            assert!((m_inf[(i, i)].re - a.pairings[i]).abs() < 1e-13);
        }
        assert!(crate::linalg::max_abs_diff(&(&s.d_n + &s.r_n), &s.m_n) == 0.0);
        assert!(matches!(
            neumann_truncation(&gabor(2, e0(2), None).frame(), 1),
            Err(Error::NotSubcritical { .. })
        ));
    }

    #[test]
    fn packing_examples() {
        let g = make_cyclic_product(&[4, 4]).unwrap();
        let all = IndexSet::full(&g);
        assert_eq!(select_packing(&g, &all, &Window::identity(&g)).unwrap(), all);
        assert_eq!(select_packing(&g, &all, &Window::full(&g)).unwrap().elements(), &[0]);
        let square = Window::new(&g, [0, 1, 4, 5]).unwrap();
        let gamma = select_packing(&g, &all, &square).unwrap();
        assert_eq!(gamma.elements(), &[0, 2, 8, 10]);
        let sym = crate::geometry::box_window(&g, 1).unwrap();
        assert_eq!(select_packing(&g, &all, &sym).unwrap().len(), 1);
    }

    #[test]
    fn certificate_examples() {
        let sys = gabor(2, e0(2), None);
        let frame = sys.frame();
        let a = frame.analyze().unwrap();

        let empty = removal_certificate(&frame, &a, &[]).unwrap();
        assert_eq!(empty.norm, 0.0);
        assert!(empty.is_removable && empty.agrees());

        let one = removal_certificate(&frame, &a, &[0]).unwrap();
        assert!((one.norm - 0.5).abs() < 1e-14 && one.is_removable && one.reduced_bounds.0 > 0.0);

        // labels 0 and 2 are (0,0) and (0,1); both carry e0
        let pair = removal_certificate(&frame, &a, &[0, 2]).unwrap();
        assert!((pair.norm - 1.0).abs() < 1e-13 && !pair.is_removable);
        assert!(pair.reduced_bounds.0.abs() < 1e-13 && pair.agrees());

        let onb = gabor(2, e0(2), Some(&[0, 1]));
        let f = onb.frame();
        assert!(matches!(
            removal_certificate(&f, &f.analyze().unwrap(), &[3]),
            Err(Error::GammaNotSubset(3))
        ));
    }

    #[test]
    fn pipeline_gabor_two() {
        let sys = gabor(2, e0(2), None);
        let seq = WindowSequence::canonical(sys.group());
        let cert = remove_positive_density(&sys, &seq, &RemovalConfig::default()).unwrap();
        assert!((cert.trace.alpha - 0.75).abs() < 1e-14);
        assert!((cert.trace.epsilon - 1.0 / 16.0).abs() < 1e-14);
        assert!(cert.is_removable && !cert.gamma.is_empty() && cert.gamma_density > 0.0);
        assert!(cert.reduced_bounds.0 > 0.0);

        // oracle: Γ is removable exactly when the remaining vectors span
        let frame = sys.frame();
        let remaining = frame.restrict(|l| !cert.gamma.contains(&l));
        assert!(remaining.frame_bounds().is_frame);
        if !cert.shrunk() {
            assert!(cert.certificate_norm <= cert.trace.alpha + 3.0 * cert.trace.epsilon);
        }
    }

    #[test]
    fn pipeline_rejects_exact_frames() {
        let sys = gabor(2, e0(2), Some(&[0, 1]));
        let seq = WindowSequence::canonical(sys.group());
        assert!(matches!(
            remove_positive_density(&sys, &seq, &RemovalConfig::default()),
            Err(Error::NotOvercomplete { .. })
        ));
    }

    #[test]
    fn pipeline_gabor_four_random() {
        let g = random_unit_vector(&mut seeded_rng(11), 4);
        let sys = gabor(4, g, None);
        let seq = WindowSequence::canonical(sys.group());
        let cert = remove_positive_density(&sys, &seq, &RemovalConfig::default()).unwrap();
        assert!(!cert.gamma.is_empty());
        let frame = sys.frame();
        let check = removal_certificate(&frame, &frame.analyze().unwrap(), &cert.gamma).unwrap();
        assert!(check.agrees() && check.is_removable);
        assert!((check.norm - cert.certificate_norm).abs() < 1e-9);
    }

    #[test]
    fn pipeline_validates_config() {
        let sys = gabor(2, e0(2), None);
        let seq = WindowSequence::canonical(sys.group());
        let bad_alpha = RemovalConfig {
            alpha: Some(0.4),
            ..RemovalConfig::default()
        };
        assert!(matches!(remove_positive_density(&sys, &seq, &bad_alpha), Err(Error::InvalidConfig(_))));
        let bad_eps = RemovalConfig {
            epsilon: Some(0.2),
            ..RemovalConfig::default()
        };
        assert!(matches!(remove_positive_density(&sys, &seq, &bad_eps), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn necessary_condition_example() {
        let sys = gabor(2, e0(2), None);
        let seq = WindowSequence::full_group(sys.group());
        let gamma = IndexSet::new(sys.group(), [0]).unwrap();
        let r = necessary_condition_check(&sys, &gamma, &seq).unwrap();
        assert!(r.passed());
        assert!((r.d_plus - 1.0).abs() < 1e-14 && (r.d_pi - 0.5).abs() < 1e-12);

        let bad = IndexSet::new(sys.group(), [0, 2]).unwrap();
        assert!(matches!(
            necessary_condition_check(&sys, &bad, &seq),
            Err(Error::GammaNotRemovable(_))
        ));
    }
}
