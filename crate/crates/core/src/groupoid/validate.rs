use std::fmt;

use super::{ArrowId, FiniteGroupoid, ObjectId};

/// One failed groupoid axiom. Products are written `g ∘ f` ("`f` then `g`").
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The table holds a product for a pair whose endpoints do not match.
    NonComposableEntry { g: ArrowId, f: ArrowId },
    /// A composable pair has no table entry.
    MissingProduct { g: ArrowId, f: ArrowId },
    /// `source(g∘f) ≠ source(f)` or `target(g∘f) ≠ target(g)`.
    ProductEndpoints { g: ArrowId, f: ArrowId, product: ArrowId },
    /// `h ∘ (g ∘ f) ≠ (h ∘ g) ∘ f`.
    Associativity { h: ArrowId, g: ArrowId, f: ArrowId },
    /// The registered identity at an object is not a loop there.
    IdentityEndpoints { object: ObjectId, arrow: ArrowId },
    /// `id_target(z) ∘ z ≠ z`.
    LeftUnit { arrow: ArrowId },
    /// `z ∘ id_source(z) ≠ z`.
    RightUnit { arrow: ArrowId },
    /// The registered inverse does not swap endpoints.
    InverseEndpoints { arrow: ArrowId },
    /// `z⁻¹ ∘ z ≠ id_source(z)`.
    LeftInverse { arrow: ArrowId },
    /// `z ∘ z⁻¹ ≠ id_target(z)`.
    RightInverse { arrow: ArrowId },
    /// `(z⁻¹)⁻¹ ≠ z`.
    InverseNotInvolution { arrow: ArrowId },
}

impl fmt::Display for Violation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonComposableEntry { g, f } => {
                write!(out, "table defines {g} ∘ {f} but the pair is not composable")
            }
            Violation::MissingProduct { g, f } => write!(out, "missing product {g} ∘ {f}"),
            Violation::ProductEndpoints { g, f, product } => {
                write!(out, "{g} ∘ {f} = {product} has wrong endpoints")
            }
            Violation::Associativity { h, g, f } => {
                write!(out, "associativity fails on ({h}, {g}, {f})")
            }
            Violation::IdentityEndpoints { object, arrow } => {
                write!(out, "identity {arrow} at {object} is not a loop there")
            }
            Violation::LeftUnit { arrow } => write!(out, "left unit law fails for {arrow}"),
            Violation::RightUnit { arrow } => write!(out, "right unit law fails for {arrow}"),
            Violation::InverseEndpoints { arrow } => {
                write!(out, "inverse of {arrow} does not swap endpoints")
            }
            Violation::LeftInverse { arrow } => write!(out, "{arrow}⁻¹ ∘ {arrow} is not a unit"),
            Violation::RightInverse { arrow } => write!(out, "{arrow} ∘ {arrow}⁻¹ is not a unit"),
            Violation::InverseNotInvolution { arrow } => {
                write!(out, "inverse of the inverse of {arrow} is not {arrow}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl FiniteGroupoid {
    /// Exhaustively check composability, associativity, unit and inverse laws.
    /// Never fails; every violation found is listed.
    pub fn validate_axioms(&self) -> ValidationReport {
        let mut v = Vec::new();
        let arrows = self.arrows();

        let mut entries: Vec<_> = self.composition_table().iter().collect();
        entries.sort_unstable();
        for (&(g, f), &r) in entries {
            let (ga, fa, ra) = (&arrows[g.0], &arrows[f.0], &arrows[r.0]);
            if fa.target != ga.source {
                v.push(Violation::NonComposableEntry { g, f });
            } else if ra.source != fa.source || ra.target != ga.target {
                v.push(Violation::ProductEndpoints { g, f, product: r });
            }
        }

        // outgoing arrows per object, for walking composable chains
        let mut from: Vec<Vec<ArrowId>> = vec![Vec::new(); self.num_objects()];
        for a in arrows {
            from[a.source.0].push(a.id);
        }
        for f in arrows {
            for &g in &from[f.target.0] {
                if self.composition_table().get(&(g, f.id)).is_none() {
                    v.push(Violation::MissingProduct { g, f: f.id });
                }
            }
        }

        let lookup = |g: ArrowId, f: ArrowId| self.compose(g, f).ok();
        for f in arrows {
            for &g in &from[f.target.0] {
                let Some(gf) = lookup(g, f.id) else { continue };
                for &h in &from[arrows[g.0].target.0] {
                    let left = lookup(h, gf);
                    let right = lookup(h, g).and_then(|hg| lookup(hg, f.id));
                    if let (Some(l), Some(r)) = (left, right) {
                        if l != r {
                            v.push(Violation::Associativity { h, g, f: f.id });
                        }
                    }
                }
            }
        }

        for (m, &e) in self.identities().iter().enumerate() {
            let ea = &arrows[e.0];
            if ea.source.0 != m || ea.target.0 != m {
                v.push(Violation::IdentityEndpoints {
                    object: ObjectId(m),
                    arrow: e,
                });
            }
        }

        let ids = self.identities();
        let inv = self.inverse_table();
        for a in arrows {
            let z = a.id;
            if lookup(ids[a.target.0], z) != Some(z) {
                v.push(Violation::LeftUnit { arrow: z });
            }
            if lookup(z, ids[a.source.0]) != Some(z) {
                v.push(Violation::RightUnit { arrow: z });
            }
            let zi = inv[z.0];
            let zia = &arrows[zi.0];
            if zia.source != a.target || zia.target != a.source {
                v.push(Violation::InverseEndpoints { arrow: z });
            }
            if lookup(zi, z) != Some(ids[a.source.0]) {
                v.push(Violation::LeftInverse { arrow: z });
            }
            if lookup(z, zi) != Some(ids[a.target.0]) {
                v.push(Violation::RightInverse { arrow: z });
            }
            if inv[zi.0] != z {
                v.push(Violation::InverseNotInvolution { arrow: z });
            }
        }
        ValidationReport { violations: v }
    }
}
