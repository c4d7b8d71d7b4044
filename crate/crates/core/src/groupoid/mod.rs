//! Exact finite groupoid algebra.
//!
//! Arrows are dense integer ids. Composition is stored as a partial table keyed by
//! `(g, f)`, read as "`f` then `g`", so that `source(g∘f) = source(f)` and
//! `target(g∘f) = target(g)`. Nothing in this module uses floating point.

mod build;
mod group;
pub mod interchange;
mod slice;
mod validate;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

pub use build::{random_groupoid, random_transitive_groupoid};
pub use group::{FiniteGroup, GroupTableError};
pub use slice::PrincipalSlice;
pub use validate::{ValidationReport, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjectId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArrowId(pub usize);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m{}", self.0)
    }
}

impl fmt::Display for ArrowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub id: ArrowId,
    pub source: ObjectId,
    pub target: ObjectId,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupoidError {
    #[error("arrow {0} is not registered")]
    UnknownArrow(ArrowId),
    #[error("object {0} is not registered")]
    UnknownObject(ObjectId),
    #[error("{g} ∘ {f} is not composable: target of {f} differs from source of {g}")]
    NotComposable { g: ArrowId, f: ArrowId },
    #[error("composition table has no entry for {g} ∘ {f}")]
    MissingProduct { g: ArrowId, f: ArrowId },
    #[error("no arrow from {from} to {to}")]
    NoArrow { from: ObjectId, to: ObjectId },
    #[error("arrow {0} is not in the structure group")]
    NotInGroup(ArrowId),
    #[error("arrow {0} is not in the principal slice")]
    NotInSlice(ArrowId),
    #[error("loops at {0} do not form a group under the composition table")]
    BrokenVertexGroup(ObjectId),
    #[error("right action on the slice at {0} is not free")]
    ActionNotFree(ObjectId),
    #[error("right action on the slice at {0} does not preserve fibres")]
    NotFibrePreserving(ObjectId),
    #[error("malformed groupoid: {0}")]
    Malformed(String),
}

/// A groupoid over a finite object set `{0, …, n−1}` with finitely many arrows.
///
/// Immutable after construction; every query takes `&self`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupoid {
    num_objects: usize,
    arrows: Vec<Arrow>,
    composition: HashMap<(ArrowId, ArrowId), ArrowId>,
    inverse: Vec<ArrowId>,
    identities: Vec<ArrowId>,
}

/// Connected components of the object set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbits {
    pub blocks: Vec<Vec<ObjectId>>,
    pub is_transitive: bool,
}

/// The loops at one object, closed under composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexGroup {
    pub object: ObjectId,
    pub identity: ArrowId,
    /// Sorted arrow ids.
    pub elements: Vec<ArrowId>,
}

impl VertexGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, z: ArrowId) -> bool {
        self.elements.binary_search(&z).is_ok()
    }
}

impl FiniteGroupoid {
    /// Assemble a groupoid from raw tables.
    ///
    /// Only structural consistency is checked here (dense ids, endpoints and table entries in
    /// range). The groupoid axioms are checked by [`FiniteGroupoid::validate_axioms`].
    pub fn from_parts(
        num_objects: usize,
        arrows: Vec<Arrow>,
        inverse: Vec<ArrowId>,
        identities: Vec<ArrowId>,
        composition: HashMap<(ArrowId, ArrowId), ArrowId>,
    ) -> Result<Self, GroupoidError> {
        if num_objects == 0 {
            return Err(GroupoidError::Malformed("object set is empty".into()));
        }
        let n = arrows.len();
        for (i, a) in arrows.iter().enumerate() {
            if a.id.0 != i {
                return Err(GroupoidError::Malformed(format!(
                    "arrow ids must be dense: position {i} holds {}",
                    a.id
                )));
            }
            if a.source.0 >= num_objects || a.target.0 >= num_objects {
                return Err(GroupoidError::Malformed(format!(
                    "arrow {} has an endpoint outside the object set",
                    a.id
                )));
            }
        }
        if inverse.len() != n {
            return Err(GroupoidError::Malformed(format!(
                "inverse map covers {} of {n} arrows",
                inverse.len()
            )));
        }
        if identities.len() != num_objects {
            return Err(GroupoidError::Malformed(format!(
                "identity map covers {} of {num_objects} objects",
                identities.len()
            )));
        }
        let in_range = |z: &ArrowId| z.0 < n;
        if let Some(z) = inverse.iter().chain(&identities).find(|z| !in_range(z)) {
            return Err(GroupoidError::UnknownArrow(*z));
        }
        for (&(g, f), r) in &composition {
            for z in [g, f, *r] {
                if !in_range(&z) {
                    return Err(GroupoidError::UnknownArrow(z));
                }
            }
        }
        Ok(FiniteGroupoid {
            num_objects,
            arrows,
            composition,
            inverse,
            identities,
        })
    }

    pub fn num_objects(&self) -> usize {
        self.num_objects
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjectId> {
        (0..self.num_objects).map(ObjectId)
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, z: ArrowId) -> Result<&Arrow, GroupoidError> {
        self.arrows.get(z.0).ok_or(GroupoidError::UnknownArrow(z))
    }

    pub fn source(&self, z: ArrowId) -> Result<ObjectId, GroupoidError> {
        self.arrow(z).map(|a| a.source)
    }

    pub fn target(&self, z: ArrowId) -> Result<ObjectId, GroupoidError> {
        self.arrow(z).map(|a| a.target)
    }

    /// Raw composition table entries, keyed by `(g, f)` for "`f` then `g`".
    pub fn composition_table(&self) -> &HashMap<(ArrowId, ArrowId), ArrowId> {
        &self.composition
    }

    fn check_object(&self, m: ObjectId) -> Result<(), GroupoidError> {
        if m.0 < self.num_objects {
            Ok(())
        } else {
            Err(GroupoidError::UnknownObject(m))
        }
    }

    /// `g ∘ f`: first `f`, then `g`.
    pub fn compose(&self, g: ArrowId, f: ArrowId) -> Result<ArrowId, GroupoidError> {
        let ga = self.arrow(g)?;
        let fa = self.arrow(f)?;
        if fa.target != ga.source {
            return Err(GroupoidError::NotComposable { g, f });
        }
        self.composition
            .get(&(g, f))
            .copied()
            .ok_or(GroupoidError::MissingProduct { g, f })
    }

    pub fn inverse(&self, z: ArrowId) -> Result<ArrowId, GroupoidError> {
        self.arrow(z)?;
        Ok(self.inverse[z.0])
    }

    /// The unit arrow at `m` (object inclusion).
    pub fn identity_at(&self, m: ObjectId) -> Result<ArrowId, GroupoidError> {
        self.check_object(m)?;
        Ok(self.identities[m.0])
    }

    /// All arrows from `m` to `n`, in id order.
    pub fn hom_set(&self, m: ObjectId, n: ObjectId) -> Result<Vec<ArrowId>, GroupoidError> {
        self.check_object(m)?;
        self.check_object(n)?;
        Ok(self
            .arrows
            .iter()
            .filter(|a| a.source == m && a.target == n)
            .map(|a| a.id)
            .collect())
    }

    /// All arrows with source `m`, in id order.
    pub fn arrows_from(&self, m: ObjectId) -> Result<Vec<ArrowId>, GroupoidError> {
        self.check_object(m)?;
        Ok(self
            .arrows
            .iter()
            .filter(|a| a.source == m)
            .map(|a| a.id)
            .collect())
    }

    /// Loops at `m`, checked to be a group under the restricted composition.
    pub fn vertex_group(&self, m: ObjectId) -> Result<VertexGroup, GroupoidError> {
        let elements = self.hom_set(m, m)?;
        let identity = self.identities[m.0];
        let broken = || GroupoidError::BrokenVertexGroup(m);
        if elements.binary_search(&identity).is_err() {
            return Err(broken());
        }
        let member = |z: ArrowId| elements.binary_search(&z).is_ok();
        for &a in &elements {
            if self.compose(a, identity).ok() != Some(a) || self.compose(identity, a).ok() != Some(a)
            {
                return Err(broken());
            }
            let inv = self.inverse[a.0];
            if !member(inv) || self.compose(inv, a).ok() != Some(identity) {
                return Err(broken());
            }
            for &b in &elements {
                let ab = self.compose(a, b).map_err(|_| broken())?;
                if !member(ab) {
                    return Err(broken());
                }
            }
        }
        for &a in &elements {
            for &b in &elements {
                let ab = self.compose(a, b).map_err(|_| broken())?;
                for &c in &elements {
                    let bc = self.compose(b, c).map_err(|_| broken())?;
                    if self.compose(ab, c).ok() != self.compose(a, bc).ok() {
                        return Err(broken());
                    }
                }
            }
        }
        Ok(VertexGroup {
            object: m,
            identity,
            elements,
        })
    }

    /// Partition of the objects into orbits (objects joined by some arrow).
    pub fn orbit_decomposition(&self) -> Orbits {
        let mut parent: Vec<usize> = (0..self.num_objects).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for a in &self.arrows {
            let (r1, r2) = (find(&mut parent, a.source.0), find(&mut parent, a.target.0));
            if r1 != r2 {
                parent[r1.max(r2)] = r1.min(r2);
            }
        }
        let mut blocks: Vec<Vec<ObjectId>> = Vec::new();
        let mut block_of_root: HashMap<usize, usize> = HashMap::new();
        for m in 0..self.num_objects {
            let root = find(&mut parent, m);
            let idx = *block_of_root.entry(root).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[idx].push(ObjectId(m));
        }
        let is_transitive = blocks.len() == 1;
        Orbits {
            blocks,
            is_transitive,
        }
    }

    /// An arrow `z: m → n` with `z G_m z⁻¹ = G_n`, checked exhaustively.
    pub fn vertex_conjugacy_witness(
        &self,
        m: ObjectId,
        n: ObjectId,
    ) -> Result<ArrowId, GroupoidError> {
        let candidates = self.hom_set(m, n)?;
        if candidates.is_empty() {
            return Err(GroupoidError::NoArrow { from: m, to: n });
        }
        let gm = self.vertex_group(m)?;
        let gn = self.vertex_group(n)?;
        for z in candidates {
            if self.conjugates_onto(z, &gm, &gn)? {
                return Ok(z);
            }
        }
        Err(GroupoidError::BrokenVertexGroup(n))
    }

    /// Whether `g ↦ z g z⁻¹` maps `from` bijectively onto `to`.
    pub fn conjugates_onto(
        &self,
        z: ArrowId,
        from: &VertexGroup,
        to: &VertexGroup,
    ) -> Result<bool, GroupoidError> {
        if from.order() != to.order() {
            return Ok(false);
        }
        let z_inv = self.inverse(z)?;
        let mut image = Vec::with_capacity(from.order());
        for &g in &from.elements {
            let zg = self.compose(z, g)?;
            image.push(self.compose(zg, z_inv)?);
        }
        image.sort_unstable();
        image.dedup();
        Ok(image == to.elements)
    }

    /// Relabel arrows and objects by permutations: arrow `i` becomes `arrow_perm[i]`,
    /// object `m` becomes `object_perm[m]`.
    pub fn relabeled(&self, arrow_perm: &[usize], object_perm: &[usize]) -> Self {
        let n = self.arrows.len();
        assert_eq!(arrow_perm.len(), n);
        assert_eq!(object_perm.len(), self.num_objects);
        let za = |z: ArrowId| ArrowId(arrow_perm[z.0]);
        let ob = |m: ObjectId| ObjectId(object_perm[m.0]);
        let mut arrows = vec![None; n];
        for a in &self.arrows {
            arrows[arrow_perm[a.id.0]] = Some(Arrow {
                id: za(a.id),
                source: ob(a.source),
                target: ob(a.target),
                label: a.label.clone(),
            });
        }
        let mut inverse = vec![ArrowId(0); n];
        for (i, inv) in self.inverse.iter().enumerate() {
            inverse[arrow_perm[i]] = za(*inv);
        }
        let mut identities = vec![ArrowId(0); self.num_objects];
        for (m, e) in self.identities.iter().enumerate() {
            identities[object_perm[m]] = za(*e);
        }
        let composition = self
            .composition
            .iter()
            .map(|(&(g, f), &r)| ((za(g), za(f)), za(r)))
            .collect();
        FiniteGroupoid {
            num_objects: self.num_objects,
            arrows: arrows.into_iter().map(|a| a.expect("permutation")).collect(),
            composition,
            inverse,
            identities,
        }
    }

    /// Copy of this groupoid with one composition entry overwritten (fault injection).
    pub fn with_product(&self, g: ArrowId, f: ArrowId, result: ArrowId) -> Self {
        let mut out = self.clone();
        out.composition.insert((g, f), result);
        out
    }

    pub(crate) fn identities(&self) -> &[ArrowId] {
        &self.identities
    }

    pub(crate) fn inverse_table(&self) -> &[ArrowId] {
        &self.inverse
    }
}
