use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Arrow, ArrowId, FiniteGroup, FiniteGroupoid, ObjectId};

impl FiniteGroupoid {
    /// Pair groupoid `M × M`: exactly one arrow `(a, b)` from every `a` to every `b`.
    pub fn pair(num_objects: usize) -> Self {
        Self::trivial(num_objects, &FiniteGroup::trivial())
    }

    /// Trivial groupoid `M × G × M`; arrow `(m, g, n)` runs from `m` to `n` and
    /// `(n, b, p) ∘ (m, a, n) = (m, b·a, p)`.
    pub fn trivial(num_objects: usize, group: &FiniteGroup) -> Self {
        let k = num_objects;
        let order = group.order();
        let id = |m: usize, g: usize, n: usize| ArrowId((m * k + n) * order + g);
        let mut arrows = Vec::with_capacity(k * k * order);
        for m in 0..k {
            for n in 0..k {
                for g in 0..order {
                    arrows.push(Arrow {
                        id: id(m, g, n),
                        source: ObjectId(m),
                        target: ObjectId(n),
                        label: Some(format!("({m},{g},{n})")),
                    });
                }
            }
        }
        let mut inverse = vec![ArrowId(0); arrows.len()];
        let mut composition = HashMap::new();
        for m in 0..k {
            for n in 0..k {
                for a in 0..order {
                    inverse[id(m, a, n).0] = id(n, group.inv(a), m);
                    for p in 0..k {
                        for b in 0..order {
                            composition.insert((id(n, b, p), id(m, a, n)), id(m, group.mul(b, a), p));
                        }
                    }
                }
            }
        }
        let identities = (0..k).map(|m| id(m, group.identity(), m)).collect();
        Self::from_parts(k, arrows, inverse, identities, composition)
            .expect("trivial groupoid is well formed")
    }

    /// Totally intransitive groupoid: identities only.
    pub fn identities_only(num_objects: usize) -> Self {
        let arrows = (0..num_objects)
            .map(|m| Arrow {
                id: ArrowId(m),
                source: ObjectId(m),
                target: ObjectId(m),
                label: Some(format!("id{m}")),
            })
            .collect();
        let ids: Vec<ArrowId> = (0..num_objects).map(ArrowId).collect();
        let composition = ids.iter().map(|&e| ((e, e), e)).collect();
        Self::from_parts(num_objects, arrows, ids.clone(), ids, composition)
            .expect("identity groupoid is well formed")
    }

    /// Action groupoid of a finite group acting on `0..action[0].len()`; `action[g][s] = g·s`.
    /// Arrow `(g, s)` runs from `s` to `g·s` and `(h, g·s) ∘ (g, s) = (h·g, s)`.
    pub fn action(group: &FiniteGroup, action: &[Vec<usize>]) -> Self {
        let order = group.order();
        assert_eq!(action.len(), order, "one action row per group element");
        let set = action[0].len();
        let id = |g: usize, s: usize| ArrowId(g * set + s);
        let mut arrows = Vec::with_capacity(order * set);
        let mut inverse = Vec::with_capacity(order * set);
        for g in 0..order {
            for s in 0..set {
                arrows.push(Arrow {
                    id: id(g, s),
                    source: ObjectId(s),
                    target: ObjectId(action[g][s]),
                    label: Some(format!("({g},{s})")),
                });
                inverse.push(id(group.inv(g), action[g][s]));
            }
        }
        let mut composition = HashMap::new();
        for g in 0..order {
            for s in 0..set {
                let t = action[g][s];
                for h in 0..order {
                    composition.insert((id(h, t), id(g, s)), id(group.mul(h, g), s));
                }
            }
        }
        let identities = (0..set).map(|s| id(group.identity(), s)).collect();
        Self::from_parts(set, arrows, inverse, identities, composition)
            .expect("action groupoid is well formed")
    }

    /// Disjoint union; objects and arrows of `b` are shifted past those of `a`.
    pub fn disjoint_union(a: &Self, b: &Self) -> Self {
        let oa = a.num_objects();
        let na = a.num_arrows();
        let shift = |z: ArrowId| ArrowId(z.0 + na);
        let arrows = a
            .arrows()
            .iter()
            .cloned()
            .chain(b.arrows().iter().map(|x| Arrow {
                id: shift(x.id),
                source: ObjectId(x.source.0 + oa),
                target: ObjectId(x.target.0 + oa),
                label: x.label.clone(),
            }))
            .collect();
        let inverse = a
            .inverse_table()
            .iter()
            .copied()
            .chain(b.inverse_table().iter().map(|&z| shift(z)))
            .collect();
        let identities = a
            .identities()
            .iter()
            .copied()
            .chain(b.identities().iter().map(|&z| shift(z)))
            .collect();
        let composition = a
            .composition_table()
            .iter()
            .map(|(&k, &v)| (k, v))
            .chain(
                b.composition_table()
                    .iter()
                    .map(|(&(g, f), &r)| ((shift(g), shift(f)), shift(r))),
            )
            .collect();
        Self::from_parts(oa + b.num_objects(), arrows, inverse, identities, composition)
            .expect("union of well-formed groupoids")
    }
}

fn group_library() -> Vec<FiniteGroup> {
    vec![
        FiniteGroup::trivial(),
        FiniteGroup::cyclic(2),
        FiniteGroup::cyclic(3),
        FiniteGroup::cyclic(4),
        FiniteGroup::klein_four(),
        FiniteGroup::cyclic(5),
        FiniteGroup::dihedral(3),
        FiniteGroup::cyclic(6),
    ]
}

fn shuffle_labels(g: FiniteGroupoid, rng: &mut ChaCha8Rng) -> FiniteGroupoid {
    let mut arrow_perm: Vec<usize> = (0..g.num_arrows()).collect();
    arrow_perm.shuffle(rng);
    let mut object_perm: Vec<usize> = (0..g.num_objects()).collect();
    object_perm.shuffle(rng);
    g.relabeled(&arrow_perm, &object_perm)
}

/// Random groupoid with at most `max_arrows` arrows: a disjoint union of trivial groupoids
/// `M_i × G_i × M_i` over small groups, with arrow and object labels shuffled.
pub fn random_groupoid(seed: u64, max_arrows: usize) -> FiniteGroupoid {
    assert!(max_arrows >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let library = group_library();
    let mut budget = max_arrows;
    let mut result: Option<FiniteGroupoid> = None;
    while budget > 0 {
        let fits: Vec<&FiniteGroup> = library.iter().filter(|g| g.order() <= budget).collect();
        let group = fits[rng.random_range(0..fits.len())];
        let max_k = (1..).take_while(|k| k * k * group.order() <= budget).last().unwrap_or(1);
        let k = rng.random_range(1..=max_k);
        let block = FiniteGroupoid::trivial(k, group);
        budget -= block.num_arrows();
        result = Some(match result {
            None => block,
            Some(acc) => FiniteGroupoid::disjoint_union(&acc, &block),
        });
        if rng.random_bool(0.35) {
            break;
        }
    }
    shuffle_labels(result.expect("at least one block"), &mut rng)
}

/// Random transitive groupoid `M × G × M` with at most `max_arrows` arrows and shuffled labels.
pub fn random_transitive_groupoid(seed: u64, max_arrows: usize) -> FiniteGroupoid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let library = group_library();
    let fits: Vec<&FiniteGroup> = library.iter().filter(|g| g.order() <= max_arrows).collect();
    let group = fits[rng.random_range(0..fits.len())];
    let max_k = (1..).take_while(|k| k * k * group.order() <= max_arrows).last().unwrap_or(1);
    let k = rng.random_range(1..=max_k);
    shuffle_labels(FiniteGroupoid::trivial(k, group), &mut rng)
}
