//! Finite groups given by multiplication tables.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupTableError {
    #[error("group table is empty")]
    Empty,
    #[error("row {0} of the group table has the wrong length")]
    Ragged(usize),
    #[error("product {a}·{b} = {value} is out of range")]
    OutOfRange { a: usize, b: usize, value: usize },
    #[error("group table has no two-sided identity")]
    NoIdentity,
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error("associativity fails on ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
}

/// A finite group on the elements `0..order`, with `table[a][b] = a·b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Build a group from a full multiplication table, checking the group axioms.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self, GroupTableError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupTableError::Empty);
        }
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(GroupTableError::Ragged(a));
            }
            for (b, &value) in row.iter().enumerate() {
                if value >= n {
                    return Err(GroupTableError::OutOfRange { a, b, value });
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or(GroupTableError::NoIdentity)?;
        let mut inverse = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or(GroupTableError::NoInverse(a))?;
            inverse.push(inv);
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(GroupTableError::NotAssociative(a, b, c));
                    }
                }
            }
        }
        Ok(FiniteGroup {
            table,
            identity,
            inverse,
        })
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// Cyclic group Z_n under addition mod n.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "cyclic group needs a positive order");
        let table = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        Self::from_table(table).expect("cyclic table is a group")
    }

    /// Dihedral group of order `2n`; element `k + n·e` stands for `r^k s^e`.
    pub fn dihedral(n: usize) -> Self {
        assert!(n > 0, "dihedral group needs n > 0");
        let decode = |x: usize| (x % n, x / n);
        let table = (0..2 * n)
            .map(|x| {
                (0..2 * n)
                    .map(|y| {
                        let (a, e) = decode(x);
                        let (b, f) = decode(y);
                        let k = if e == 0 { (a + b) % n } else { (a + n - b) % n };
                        k + n * ((e + f) % 2)
                    })
                    .collect()
            })
            .collect();
        Self::from_table(table).expect("dihedral table is a group")
    }

    /// Klein four-group Z₂ × Z₂ (bitwise xor on 0..4).
    pub fn klein_four() -> Self {
        let table = (0..4)
            .map(|a| (0..4).map(|b| a ^ b).collect())
            .collect();
        Self::from_table(table).expect("klein table is a group")
    }

    /// Natural action of the dihedral group of order `2n` on the vertices of an `n`-gon;
    /// `action[g][v]` is the image of vertex `v`.
    pub fn dihedral_vertex_action(n: usize) -> Vec<Vec<usize>> {
        (0..2 * n)
            .map(|g| {
                let (k, e) = (g % n, g / n);
                (0..n)
                    .map(|v| if e == 0 { (k + v) % n } else { (k + n - v) % n })
                    .collect()
            })
            .collect()
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_groups_have_expected_orders() {
        assert_eq!(FiniteGroup::trivial().order(), 1);
        assert_eq!(FiniteGroup::cyclic(5).order(), 5);
        assert_eq!(FiniteGroup::dihedral(3).order(), 6);
        assert_eq!(FiniteGroup::klein_four().order(), 4);
    }

    #[test]
    fn dihedral_is_non_abelian() {
        let d3 = FiniteGroup::dihedral(3);
        let r = 1;
        let s = 3;
        assert_ne!(d3.mul(r, s), d3.mul(s, r));
        assert_eq!(d3.mul(s, s), d3.identity());
    }

    #[test]
    fn vertex_action_is_a_homomorphism() {
        let n = 4;
        let d = FiniteGroup::dihedral(n);
        let act = FiniteGroup::dihedral_vertex_action(n);
        for g in 0..d.order() {
            for h in 0..d.order() {
                for v in 0..n {
                    assert_eq!(act[d.mul(g, h)][v], act[g][act[h][v]]);
                }
            }
        }
    }

    #[test]
    fn bad_tables_rejected() {
        assert_eq!(FiniteGroup::from_table(vec![]), Err(GroupTableError::Empty));
        assert_eq!(
            FiniteGroup::from_table(vec![vec![0, 1], vec![1, 1]]),
            Err(GroupTableError::NoInverse(1))
        );
        assert!(FiniteGroup::from_table(vec![vec![0, 2], vec![1, 0]]).is_err());
    }
}
