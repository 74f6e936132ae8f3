//! Index sets, windows and the discrete geometry built on them: boxes and
//! word-metric balls, Følner defects, relative separation, density covers
//! and the packing bound.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupKind};
use crate::linalg::Rng;

/// A subset `Λ` of a finite group, stored sorted with a membership mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    elements: Vec<usize>,
    mask: Vec<bool>,
}

impl IndexSet {
    /// Rejects out-of-range and repeated elements.
    pub fn new(group: &FiniteGroup, elements: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = vec![false; group.order()];
        for x in elements {
            if x >= group.order() {
                return Err(Error::InvalidSet(format!(
                    "element {x} is outside a group of order {}",
                    group.order()
                )));
            }
            if mask[x] {
                return Err(Error::InvalidSet(format!("element {x} appears twice")));
            }
            mask[x] = true;
        }
        Ok(Self::from_mask(mask))
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        let elements = mask
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect();
        Self { elements, mask }
    }

    pub fn full(group: &FiniteGroup) -> Self {
        Self::from_mask(vec![true; group.order()])
    }

    pub fn empty(group: &FiniteGroup) -> Self {
        Self::from_mask(vec![false; group.order()])
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Order of the ambient group.
    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.mask.get(x).copied().unwrap_or(false)
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        Self::from_mask(
            self.mask
                .iter()
                .zip(&other.mask)
                .map(|(a, b)| *a || *b)
                .collect(),
        )
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        Self::from_mask(
            self.mask
                .iter()
                .enumerate()
                .map(|(i, &a)| a && !other.contains(i))
                .collect(),
        )
    }

    pub fn complement(&self) -> IndexSet {
        Self::from_mask(self.mask.iter().map(|b| !b).collect())
    }

    /// `size` distinct elements drawn uniformly.
    pub fn random(group: &FiniteGroup, size: usize, rng: &mut Rng) -> Result<IndexSet> {
        if size > group.order() {
            return Err(Error::InvalidSet(format!(
                "cannot draw {size} elements from a group of order {}",
                group.order()
            )));
        }
        Self::new(group, rand::seq::index::sample(rng, group.order(), size))
    }

    /// `xΛ`.
    pub fn translate_left(&self, group: &FiniteGroup, x: usize) -> IndexSet {
        let mut mask = vec![false; group.order()];
        for &l in &self.elements {
            mask[group.mul(x, l)] = true;
        }
        Self::from_mask(mask)
    }
}

/// A window (compact neighbourhood stand-in) with cached symmetry flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    set: IndexSet,
    symmetric: bool,
    contains_identity: bool,
}

impl Window {
    /// Sorts and deduplicates; rejects out-of-range elements.
    pub fn new(group: &FiniteGroup, elements: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = vec![false; group.order()];
        for x in elements {
            if x >= group.order() {
                return Err(Error::InvalidSet(format!(
                    "window element {x} is outside a group of order {}",
                    group.order()
                )));
            }
            mask[x] = true;
        }
        Ok(Self::from_mask(group, mask))
    }

    pub fn from_mask(group: &FiniteGroup, mask: Vec<bool>) -> Self {
        let set = IndexSet::from_mask(mask);
        let symmetric = set.elements().iter().all(|&x| set.contains(group.inv(x)));
        let contains_identity = set.contains(group.identity());
        Self {
            set,
            symmetric,
            contains_identity,
        }
    }

    /// `{e}`.
    pub fn identity(group: &FiniteGroup) -> Self {
        Self::from_mask(group, {
            let mut m = vec![false; group.order()];
            m[group.identity()] = true;
            m
        })
    }

    pub fn full(group: &FiniteGroup) -> Self {
        Self::from_mask(group, vec![true; group.order()])
    }

    pub fn set(&self) -> &IndexSet {
        &self.set
    }

    pub fn elements(&self) -> &[usize] {
        self.set.elements()
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.set.contains(x)
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn contains_identity(&self) -> bool {
        self.contains_identity
    }

    pub fn is_full(&self) -> bool {
        self.set.len() == self.set.universe()
    }

    pub fn is_subset(&self, other: &Window) -> bool {
        self.set.is_subset(&other.set)
    }

    /// Errors unless the window is a symmetric neighbourhood of the identity.
    pub fn require_unit_neighborhood(&self, role: &str) -> Result<()> {
        if !self.contains_identity {
            return Err(Error::InvalidSet(format!("{role} must contain the identity")));
        }
        if !self.symmetric {
            return Err(Error::InvalidSet(format!("{role} must be symmetric")));
        }
        Ok(())
    }
}

/// Nested windows `K_1 ⊆ K_2 ⊆ ... ⊆ K_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowSequence {
    windows: Vec<Window>,
}

impl WindowSequence {
    pub fn new(windows: Vec<Window>) -> Result<Self> {
        if windows.is_empty() {
            return Err(Error::InvalidSet("window sequence is empty".into()));
        }
        if windows.iter().any(Window::is_empty) {
            return Err(Error::InvalidSet("windows must be nonempty".into()));
        }
        if let Some(i) = windows.windows(2).position(|w| !w[0].is_subset(&w[1])) {
            return Err(Error::InvalidSet(format!(
                "window {i} is not contained in window {}",
                i + 1
            )));
        }
        Ok(Self { windows })
    }

    /// The canonical window family of the group, ending at the whole group.
    pub fn canonical(group: &FiniteGroup) -> Self {
        Self {
            windows: canonical_windows(group),
        }
    }

    /// The single window `G`.
    pub fn full_group(group: &FiniteGroup) -> Self {
        Self {
            windows: vec![Window::full(group)],
        }
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    pub fn last(&self) -> &Window {
        self.windows.last().expect("sequence is nonempty")
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }
}

/// `{ab : a ∈ A, b ∈ B}` as a mask.
pub fn product_mask(group: &FiniteGroup, a: &[usize], b: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; group.order()];
    for &x in a {
        for &y in b {
            mask[group.mul(x, y)] = true;
        }
    }
    mask
}

/// `#(Λ ∩ xK)`.
pub fn count_in_translate(group: &FiniteGroup, lambda: &IndexSet, x: usize, k: &Window) -> usize {
    k.elements()
        .iter()
        .filter(|&&z| lambda.contains(group.mul(x, z)))
        .count()
}

/// Box `{-r..r}^k` in a cyclic product; saturates at the whole group.
pub fn box_window(group: &FiniteGroup, radius: usize) -> Result<Window> {
    let GroupKind::CyclicProduct { moduli } = group.kind() else {
        return Err(Error::WrongGroupKind {
            expected: "cyclic product",
            label: group.label().to_string(),
        });
    };
    let mut mask = vec![false; group.order()];
    let spans: Vec<i64> = moduli.iter().map(|&m| (radius as i64).min(m as i64)).collect();
    let mut offsets: Vec<i64> = spans.iter().map(|s| -s).collect();
    loop {
        if let Some(x) = group.cyclic_element(&offsets) {
            mask[x] = true;
        }
        // odometer over {-r..r}^k, capped per axis at the modulus
        let mut axis = 0;
        loop {
            if axis == offsets.len() {
                return Ok(Window::from_mask(group, mask));
            }
            if offsets[axis] < spans[axis] {
                offsets[axis] += 1;
                break;
            }
            offsets[axis] = -spans[axis];
            axis += 1;
        }
    }
}

/// Ball of the word metric for the symmetrized generator set.
pub fn ball_window(group: &FiniteGroup, generators: &[usize], radius: usize) -> Window {
    let mut steps: Vec<usize> = generators
        .iter()
        .flat_map(|&s| [s, group.inv(s)])
        .filter(|&s| s < group.order())
        .collect();
    steps.sort_unstable();
    steps.dedup();

    let mut mask = vec![false; group.order()];
    mask[group.identity()] = true;
    let mut frontier = vec![group.identity()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for &x in &frontier {
            for &s in &steps {
                let y = group.mul(x, s);
                if !mask[y] {
                    mask[y] = true;
                    next.push(y);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Window::from_mask(group, mask)
}

/// Boxes for cyclic products, word-metric balls for everything else;
/// radius 0 upward, stopping at the first window equal to the whole group.
pub fn canonical_windows(group: &FiniteGroup) -> Vec<Window> {
    let gens = group.default_generators();
    let mut out: Vec<Window> = Vec::new();
    for radius in 0.. {
        let w = match box_window(group, radius) {
            Ok(w) => w,
            Err(_) => ball_window(group, &gens, radius),
        };
        let full = w.is_full();
        if out.last() != Some(&w) {
            out.push(w);
        }
        if full || radius > group.order() {
            break;
        }
    }
    if !out.last().is_some_and(Window::is_full) {
        out.push(Window::full(group));
    }
    out
}

/// `#(K_n K ∩ K_n^c K) / #K_n`.
pub fn folner_defect(group: &FiniteGroup, kn: &Window, k: &Window) -> Ratio<usize> {
    let inner = product_mask(group, kn.elements(), k.elements());
    let outside = kn.set().complement();
    let outer = product_mask(group, outside.elements(), k.elements());
    let boundary = inner.iter().zip(&outer).filter(|(a, b)| **a && **b).count();
    Ratio::new(boundary, kn.len().max(1))
}

/// Følner defect of every window of a sequence against `k`.
pub fn folner_profile(group: &FiniteGroup, windows: &WindowSequence, k: &Window) -> Vec<Ratio<usize>> {
    windows
        .windows()
        .iter()
        .map(|w| folner_defect(group, w, k))
        .collect()
}

/// `Rel(Λ) = max_x #(Λ ∩ xQ)`.
pub fn relative_separation(group: &FiniteGroup, lambda: &IndexSet, q: &Window) -> usize {
    if lambda.is_empty() {
        return 0;
    }
    group
        .elements()
        .map(|x| count_in_translate(group, lambda, x, q))
        .max()
        .unwrap_or(0)
}

/// Whether `G = ∪_{λ∈Λ} λU`.
pub fn is_u_dense(group: &FiniteGroup, lambda: &IndexSet, u: &Window) -> bool {
    let covered = product_mask(group, lambda.elements(), u.elements());
    covered.iter().all(|&b| b)
}

/// Both sides of `#(Λ ∩ U) ≤ Rel_K(Λ)·#(UK)/#K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PackingBound {
    pub count: usize,
    pub relative_separation: usize,
    pub product_size: usize,
    pub bound: Ratio<usize>,
}

impl PackingBound {
    pub fn holds(&self) -> bool {
        Ratio::from_integer(self.count) <= self.bound
    }
}

/// `Rel` is taken relative to `K`, which must be a symmetric unit neighbourhood.
pub fn packing_cover_bound(
    group: &FiniteGroup,
    lambda: &IndexSet,
    u: &Window,
    k: &Window,
) -> Result<PackingBound> {
    k.require_unit_neighborhood("K")?;
    let count = u.elements().iter().filter(|&&x| lambda.contains(x)).count();
    let rel = relative_separation(group, lambda, k);
    let product_size = product_mask(group, u.elements(), k.elements())
        .iter()
        .filter(|&&b| b)
        .count();
    Ok(PackingBound {
        count,
        relative_separation: rel,
        product_size,
        bound: Ratio::new(rel * product_size, k.len()),
    })
}
