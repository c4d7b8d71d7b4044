use std::collections::BTreeMap;

use super::{ArrowId, FiniteGroupoid, GroupoidError, ObjectId, VertexGroup};

/// All arrows issuing from a fixed origin, acted on from the right by the vertex group there.
///
/// The projection sends each arrow to its target; the fibre over `n` is the hom-set from the
/// origin to `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrincipalSlice {
    pub origin: ObjectId,
    /// Sorted arrow ids with source `origin`.
    pub arrows: Vec<ArrowId>,
    pub structure_group: VertexGroup,
    /// Arrows grouped by their target.
    pub fibres: BTreeMap<ObjectId, Vec<ArrowId>>,
    /// Set when the groupoid is not transitive, so the slice only covers the orbit of `origin`.
    pub orbit_only: bool,
}

impl PrincipalSlice {
    pub fn contains(&self, z: ArrowId) -> bool {
        self.arrows.binary_search(&z).is_ok()
    }

    /// Base point of a slice element.
    pub fn projection(&self, groupoid: &FiniteGroupoid, z: ArrowId) -> Result<ObjectId, GroupoidError> {
        if !self.contains(z) {
            return Err(GroupoidError::NotInSlice(z));
        }
        groupoid.target(z)
    }

    /// Whether `z ∘ g = z` forces `g` to be the identity for every element.
    pub fn is_free(&self, groupoid: &FiniteGroupoid) -> bool {
        self.arrows.iter().all(|&z| {
            self.structure_group.elements.iter().all(|&g| {
                g == self.structure_group.identity || groupoid.compose(z, g).ok() != Some(z)
            })
        })
    }

    /// Whether `z ∘ g` stays in the fibre of `z` for every element and every `g`.
    pub fn is_fibre_preserving(&self, groupoid: &FiniteGroupoid) -> bool {
        self.arrows.iter().all(|&z| {
            let fibre = groupoid.target(z).ok();
            self.structure_group.elements.iter().all(|&g| {
                groupoid
                    .compose(z, g)
                    .ok()
                    .filter(|zg| self.contains(*zg))
                    .and_then(|zg| groupoid.target(zg).ok())
                    == fibre
            })
        })
    }
}

impl FiniteGroupoid {
    /// Principal slice at `m`, with the free, fibre-preserving right action checked.
    pub fn principal_slice(&self, m: ObjectId) -> Result<PrincipalSlice, GroupoidError> {
        let arrows = self.arrows_from(m)?;
        let structure_group = self.vertex_group(m)?;
        let mut fibres: BTreeMap<ObjectId, Vec<ArrowId>> = BTreeMap::new();
        for &z in &arrows {
            fibres.entry(self.target(z)?).or_default().push(z);
        }
        let slice = PrincipalSlice {
            origin: m,
            arrows,
            structure_group,
            fibres,
            orbit_only: !self.orbit_decomposition().is_transitive,
        };
        if !slice.is_fibre_preserving(self) {
            return Err(GroupoidError::NotFibrePreserving(m));
        }
        if !slice.is_free(self) {
            return Err(GroupoidError::ActionNotFree(m));
        }
        Ok(slice)
    }

    /// Right action `R_g(z) = z ∘ g` of the structure group on a slice.
    pub fn right_action(
        &self,
        slice: &PrincipalSlice,
        g: ArrowId,
        z: ArrowId,
    ) -> Result<ArrowId, GroupoidError> {
        if !slice.structure_group.contains(g) {
            return Err(GroupoidError::NotInGroup(g));
        }
        if !slice.contains(z) {
            return Err(GroupoidError::NotInSlice(z));
        }
        self.compose(z, g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::FiniteGroup;

    #[test]
    fn pair_groupoid_slice() {
        let g = FiniteGroupoid::pair(4);
        let s = g.principal_slice(ObjectId(1)).unwrap();
        assert_eq!(s.arrows.len(), 4);
        assert_eq!(s.structure_group.order(), 1);
        assert!(!s.orbit_only);
    }

    #[test]
    fn trivial_groupoid_slice_counts() {
        let g = FiniteGroupoid::trivial(3, &FiniteGroup::cyclic(2));
        let s = g.principal_slice(ObjectId(0)).unwrap();
        assert_eq!(s.arrows.len(), 6);
        assert_eq!(s.fibres.len(), 3);
        assert!(s.fibres.values().all(|f| f.len() == 2));
    }

    #[test]
    fn action_axioms_on_d3_slice() {
        let g = FiniteGroupoid::trivial(2, &FiniteGroup::dihedral(3));
        let s = g.principal_slice(ObjectId(1)).unwrap();
        let e = s.structure_group.identity;
        for &z in &s.arrows {
            assert_eq!(g.right_action(&s, e, z).unwrap(), z);
            for &a in &s.structure_group.elements {
                let za = g.right_action(&s, a, z).unwrap();
                assert_eq!(g.target(za).unwrap(), g.target(z).unwrap());
                for &b in &s.structure_group.elements {
                    // R_a ∘ R_b = R_{b∘a}
                    let lhs = g.right_action(&s, a, g.right_action(&s, b, z).unwrap()).unwrap();
                    let ba = g.compose(b, a).unwrap();
                    assert_eq!(lhs, g.right_action(&s, ba, z).unwrap());
                }
            }
        }
    }

    #[test]
    fn right_action_errors() {
        let g = FiniteGroupoid::trivial(2, &FiniteGroup::cyclic(2));
        let s = g.principal_slice(ObjectId(0)).unwrap();
        let foreign = g.hom_set(ObjectId(1), ObjectId(0)).unwrap()[0];
        let e = s.structure_group.identity;
        assert_eq!(g.right_action(&s, foreign, s.arrows[0]), Err(GroupoidError::NotInGroup(foreign)));
        assert_eq!(g.right_action(&s, e, foreign), Err(GroupoidError::NotInSlice(foreign)));
    }

    #[test]
    fn non_transitive_slice_is_flagged() {
        let g = FiniteGroupoid::disjoint_union(&FiniteGroupoid::pair(2), &FiniteGroupoid::pair(3));
        let s = g.principal_slice(ObjectId(3)).unwrap();
        assert!(s.orbit_only);
        assert_eq!(s.arrows.len(), 3);
    }
}
