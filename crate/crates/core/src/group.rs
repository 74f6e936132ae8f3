//! Finite groups given by explicit Cayley tables.
//!
//! Elements are the indices `0..order`. Haar measure is counting measure, so
//! the measure of any subset is its cardinality.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::seeded_rng;

/// Largest group order any constructor accepts.
pub const MAX_ORDER: usize = 4096;

/// Largest order for which associativity is checked on every triple.
pub const EXHAUSTIVE_ASSOCIATIVITY_LIMIT: usize = 256;

/// How a group was built; determines its canonical window family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GroupKind {
    /// `Z_{m_1} x ... x Z_{m_k}`, first coordinate varying fastest.
    CyclicProduct { moduli: Vec<usize> },
    /// Discrete Heisenberg group over `Z_n`, element `(a, b, c)` stored at
    /// `a + n*b + n^2*c`.
    Heisenberg { n: usize },
    Generic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGroup {
    order: usize,
    cayley: Vec<u32>,
    inverse: Vec<usize>,
    identity: usize,
    label: String,
    kind: GroupKind,
}

impl FiniteGroup {
    /// Builds a group from a square Cayley table.
    ///
    /// Only structural problems are rejected here (ragged or out-of-range
    /// table, no two-sided identity). Group axioms are checked separately by
    /// [`validate_group`], so a broken table can still be inspected.
    pub fn from_cayley(table: &[Vec<usize>], label: impl Into<String>) -> Result<Self> {
        let order = table.len();
        if order == 0 {
            return Err(Error::InvalidGroup("empty Cayley table".into()));
        }
        if order > MAX_ORDER {
            return Err(Error::OrderTooLarge {
                order,
                cap: MAX_ORDER,
            });
        }
        let mut cayley = Vec::with_capacity(order * order);
        for (r, row) in table.iter().enumerate() {
            if row.len() != order {
                return Err(Error::InvalidGroup(format!(
                    "row {r} has length {}, expected {order}",
                    row.len()
                )));
            }
            for (c, &v) in row.iter().enumerate() {
                if v >= order {
                    return Err(Error::InvalidGroup(format!(
                        "entry [{r}][{c}] = {v} is out of range"
                    )));
                }
                cayley.push(v as u32);
            }
        }
        Self::from_flat(order, cayley, label.into(), GroupKind::Generic)
    }

    fn from_flat(order: usize, cayley: Vec<u32>, label: String, kind: GroupKind) -> Result<Self> {
        let at = |x: usize, y: usize| cayley[x * order + y] as usize;
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or_else(|| Error::InvalidGroup("no two-sided identity element".into()))?;
        // Elements without a right inverse fall back to the identity; validation reports them.
        let inverse = (0..order)
            .map(|x| (0..order).find(|&y| at(x, y) == identity).unwrap_or(identity))
            .collect();
        Ok(Self {
            order,
            cayley,
            inverse,
            identity,
            label,
            kind,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.cayley[x * self.order + y] as usize
    }

    #[inline]
    pub fn inv(&self, x: usize) -> usize {
        self.inverse[x]
    }

    pub fn inverses(&self) -> &[usize] {
        &self.inverse
    }

    /// The Cayley table as nested rows.
    pub fn cayley_rows(&self) -> Vec<Vec<usize>> {
        self.cayley
            .chunks(self.order)
            .map(|row| row.iter().map(|&v| v as usize).collect())
            .collect()
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|x| self.elements().all(|y| self.mul(x, y) == self.mul(y, x)))
    }

    /// Elements commuting with every element.
    pub fn center(&self) -> Vec<usize> {
        self.elements()
            .filter(|&z| self.elements().all(|x| self.mul(z, x) == self.mul(x, z)))
            .collect()
    }

    /// Smallest `k >= 1` with `x^k = e`.
    pub fn element_order(&self, x: usize) -> usize {
        let mut acc = x;
        let mut k = 1;
        while acc != self.identity {
            acc = self.mul(acc, x);
            k += 1;
            if k > self.order {
                break;
            }
        }
        k
    }

    /// Coordinates of `x` in a cyclic product, first coordinate first.
    pub fn cyclic_coords(&self, x: usize) -> Option<Vec<usize>> {
        match &self.kind {
            GroupKind::CyclicProduct { moduli } => {
                let mut rest = x;
                Some(
                    moduli
                        .iter()
                        .map(|&m| {
                            let c = rest % m;
                            rest /= m;
                            c
                        })
                        .collect(),
                )
            }
            _ => None,
        }
    }

    /// Element index of a cyclic-product coordinate tuple (coordinates are reduced).
    pub fn cyclic_element(&self, coords: &[i64]) -> Option<usize> {
        match &self.kind {
            GroupKind::CyclicProduct { moduli } if moduli.len() == coords.len() => {
                let mut idx = 0;
                let mut stride = 1;
                for (&m, &c) in moduli.iter().zip(coords) {
                    idx += c.rem_euclid(m as i64) as usize * stride;
                    stride *= m;
                }
                Some(idx)
            }
            _ => None,
        }
    }

    /// Element index of `(a, b, c)` in a Heisenberg group.
    pub fn heisenberg_element(&self, a: i64, b: i64, c: i64) -> Option<usize> {
        match self.kind {
            GroupKind::Heisenberg { n } => {
                let r = |v: i64| v.rem_euclid(n as i64) as usize;
                Some(r(a) + n * r(b) + n * n * r(c))
            }
            _ => None,
        }
    }

    pub fn heisenberg_coords(&self, x: usize) -> Option<(usize, usize, usize)> {
        match self.kind {
            GroupKind::Heisenberg { n } => Some((x % n, (x / n) % n, x / (n * n))),
            _ => None,
        }
    }

    /// A generating set: the standard one for builtin kinds, otherwise chosen
    /// greedily in index order.
    pub fn default_generators(&self) -> Vec<usize> {
        match &self.kind {
            GroupKind::CyclicProduct { moduli } => (0..moduli.len())
                .map(|i| {
                    let mut c = vec![0i64; moduli.len()];
                    c[i] = 1;
                    self.cyclic_element(&c).unwrap_or(self.identity)
                })
                .collect(),
            GroupKind::Heisenberg { .. } => vec![
                self.heisenberg_element(1, 0, 0).unwrap_or(self.identity),
                self.heisenberg_element(0, 1, 0).unwrap_or(self.identity),
            ],
            GroupKind::Generic => {
                let mut gens = Vec::new();
                let mut reached = vec![false; self.order];
                reached[self.identity] = true;
                for x in self.elements() {
                    if !reached[x] {
                        gens.push(x);
                        reached = self.generated_mask(&gens);
                    }
                }
                gens
            }
        }
    }

    fn generated_mask(&self, gens: &[usize]) -> Vec<bool> {
        let mut reached = vec![false; self.order];
        reached[self.identity] = true;
        let mut frontier = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &s in gens {
                for y in [self.mul(x, s), self.mul(x, self.inv(s))] {
                    if !reached[y] {
                        reached[y] = true;
                        frontier.push(y);
                    }
                }
            }
        }
        reached
    }
}

/// Builds `Z_{m_1} x ... x Z_{m_k}` with componentwise addition.
pub fn make_cyclic_product(moduli: &[usize]) -> Result<FiniteGroup> {
    if moduli.is_empty() || moduli.contains(&0) {
        return Err(Error::InvalidGroup(
            "moduli must be a nonempty list of positive integers".into(),
        ));
    }
    let order = moduli
        .iter()
        .try_fold(1usize, |acc, &m| acc.checked_mul(m))
        .filter(|&o| o <= MAX_ORDER)
        .ok_or(Error::OrderTooLarge {
            order: moduli.iter().fold(1usize, |a, &m| a.saturating_mul(m)),
            cap: MAX_ORDER,
        })?;

    let coords = |mut x: usize| -> Vec<usize> {
        moduli
            .iter()
            .map(|&m| {
                let c = x % m;
                x /= m;
                c
            })
            .collect()
    };
    let index = |c: &[usize]| -> usize {
        let mut idx = 0;
        let mut stride = 1;
        for (&m, &v) in moduli.iter().zip(c) {
            idx += (v % m) * stride;
            stride *= m;
        }
        idx
    };

    let all: Vec<Vec<usize>> = (0..order).map(coords).collect();
    let mut cayley = Vec::with_capacity(order * order);
    for x in &all {
        for y in &all {
            let sum: Vec<usize> = x.iter().zip(y).map(|(a, b)| a + b).collect();
            cayley.push(index(&sum) as u32);
        }
    }
    let label = moduli
        .iter()
        .map(|m| format!("Z{m}"))
        .collect::<Vec<_>>()
        .join("x");
    FiniteGroup::from_flat(
        order,
        cayley,
        label,
        GroupKind::CyclicProduct {
            moduli: moduli.to_vec(),
        },
    )
}

/// Discrete Heisenberg group over `Z_n` with law
/// `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')`.
pub fn make_heisenberg(n: usize) -> Result<FiniteGroup> {
    if !(2..=16).contains(&n) {
        return Err(Error::OrderTooLarge {
            order: n.saturating_pow(3),
            cap: MAX_ORDER,
        });
    }
    let order = n * n * n;
    let mut cayley = Vec::with_capacity(order * order);
    for x in 0..order {
        let (a, b, c) = (x % n, (x / n) % n, x / (n * n));
        for y in 0..order {
            let (a2, b2, c2) = (y % n, (y / n) % n, y / (n * n));
            let (ra, rb, rc) = ((a + a2) % n, (b + b2) % n, (c + c2 + a * b2) % n);
            cayley.push((ra + n * rb + n * n * rc) as u32);
        }
    }
    FiniteGroup::from_flat(
        order,
        cayley,
        format!("Heisenberg({n})"),
        GroupKind::Heisenberg { n },
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "axiom")]
pub enum Violation {
    Identity { element: usize },
    Inverse { element: usize },
    Associativity { x: usize, y: usize, z: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Whether associativity was checked on every triple or sampled.
    pub exhaustive: bool,
    pub triples_checked: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the identity, inverse and associativity axioms.
///
/// Associativity is exhaustive up to order 256 and sampled (`10 n^2`
/// seeded triples) above. At most one associativity violation is reported.
pub fn validate_group(g: &FiniteGroup) -> ValidationReport {
    let n = g.order();
    let e = g.identity();
    let mut violations = Vec::new();
    for x in g.elements() {
        if g.mul(e, x) != x || g.mul(x, e) != x {
            violations.push(Violation::Identity { element: x });
        }
        if g.mul(x, g.inv(x)) != e {
            violations.push(Violation::Inverse { element: x });
        }
    }

    let assoc = |x: usize, y: usize, z: usize| g.mul(g.mul(x, y), z) == g.mul(x, g.mul(y, z));
    let exhaustive = n <= EXHAUSTIVE_ASSOCIATIVITY_LIMIT;
    let mut triples_checked = 0;
    if exhaustive {
        'outer: for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    triples_checked += 1;
                    if !assoc(x, y, z) {
                        violations.push(Violation::Associativity { x, y, z });
                        break 'outer;
                    }
                }
            }
        }
    } else {
        let mut rng = seeded_rng(0x6173_736f_6369_6174);
        for _ in 0..10 * n * n {
            let (x, y, z) = (
                rng.random_range(0..n),
                rng.random_range(0..n),
                rng.random_range(0..n),
            );
            triples_checked += 1;
            if !assoc(x, y, z) {
                violations.push(Violation::Associativity { x, y, z });
                break;
            }
        }
    }
    ValidationReport {
        violations,
        exhaustive,
        triples_checked,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn klein_four_is_self_inverse() {
        let g = make_cyclic_product(&[2, 2]).unwrap();
        assert_eq!(g.order(), 4);
        assert!(g.is_abelian());
        for x in g.elements() {
            assert_eq!(g.inv(x), x);
        }
    }

    #[test]
    fn trivial_group() {
        let g = make_cyclic_product(&[1]).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.identity(), 0);
        assert_eq!(g.mul(0, 0), 0);
    }

    #[test]
    fn z4_squared_element_order() {
        let g = make_cyclic_product(&[4, 4]).unwrap();
        assert_eq!(g.order(), 16);
        let x = g.cyclic_element(&[1, 0]).unwrap();
        assert_eq!(g.element_order(x), 4);
        assert_eq!(g.identity(), 0);
    }

    #[test]
    fn cyclic_product_cap() {
        assert!(matches!(
            make_cyclic_product(&[64, 65]),
            Err(Error::OrderTooLarge { .. })
        ));
        assert!(make_cyclic_product(&[64, 64]).is_ok());
        assert!(make_cyclic_product(&[0]).is_err());
    }

    #[test]
    fn heisenberg_two_multiplication() {
        let g = make_heisenberg(2).unwrap();
        assert_eq!(g.order(), 8);
        let x = g.heisenberg_element(1, 0, 0).unwrap();
        let y = g.heisenberg_element(0, 1, 0).unwrap();
        assert_eq!(g.heisenberg_coords(g.mul(x, y)), Some((1, 1, 1)));
        assert_eq!(g.heisenberg_coords(g.mul(y, x)), Some((1, 1, 0)));
        assert!(!g.is_abelian());
    }

    #[test]
    fn heisenberg_two_inverse_and_center() {
        let g = make_heisenberg(2).unwrap();
        let x = g.heisenberg_element(1, 1, 0).unwrap();
        assert_eq!(g.heisenberg_coords(g.inv(x)), Some((1, 1, 1)));
        let center = g.center();
        assert_eq!(center.len(), 2);
        for z in center {
            let (a, b, _) = g.heisenberg_coords(z).unwrap();
            assert_eq!((a, b), (0, 0));
        }
    }

    #[test]
    fn heisenberg_bounds() {
        assert!(make_heisenberg(1).is_err());
        assert!(make_heisenberg(17).is_err());
        assert_eq!(make_heisenberg(16).unwrap().order(), 4096);
    }

    #[test]
    fn valid_tables_pass_validation() {
        let z4 = make_cyclic_product(&[4]).unwrap();
        assert!(validate_group(&z4).is_valid());
        let h2 = make_heisenberg(2).unwrap();
        let report = validate_group(&h2);
        assert!(report.is_valid());
        assert!(report.exhaustive);
        assert_eq!(report.triples_checked, 512);
    }

    #[test]
    fn broken_associativity_is_reported() {
        let z4 = make_cyclic_product(&[4]).unwrap();
        let mut rows = z4.cayley_rows();
        rows[1].swap(2, 3);
        let broken = FiniteGroup::from_cayley(&rows, "broken").unwrap();
        let report = validate_group(&broken);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Associativity { .. })));
        if let Some(Violation::Associativity { x, y, z }) = report
            .violations
            .iter()
            .find(|v| matches!(v, Violation::Associativity { .. }))
        {
            let (x, y, z) = (*x, *y, *z);
            assert_ne!(
                broken.mul(broken.mul(x, y), z),
                broken.mul(x, broken.mul(y, z))
            );
        }
    }

    #[test]
    fn large_groups_use_sampling() {
        let g = make_cyclic_product(&[17, 17]).unwrap();
        let report = validate_group(&g);
        assert!(!report.exhaustive);
        assert!(report.triples_checked >= 10 * 289 * 289);
        assert!(report.is_valid());
    }

    #[test]
    fn ragged_table_is_rejected() {
        let rows = vec![vec![0, 1], vec![1]];
        assert!(matches!(
            FiniteGroup::from_cayley(&rows, "ragged"),
            Err(Error::InvalidGroup(msg)) if msg.contains("row 1")
        ));
    }

    #[test]
    fn generic_generators_generate() {
        let h = make_heisenberg(3).unwrap();
        let generic = FiniteGroup::from_cayley(&h.cayley_rows(), "copy").unwrap();
        let gens = generic.default_generators();
        assert!(generic.generated_mask(&gens).iter().all(|&b| b));
    }
}
