//! Permutation groups given by generators, and finite groups given by a
//! multiplication table.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::models::Permutation;
use crate::moments::Rational;
use crate::transfer::Word;

/// Default bound on enumerated group orders.
pub const DEFAULT_GROUP_GUARD: usize = 1_000_000;

/// Bound on multiplication-table sizes.
pub const TABLE_GUARD: usize = 4096;

/// Breadth-first closure of `generators` under composition, starting from the identity.
pub fn generate_group(n: usize, generators: &[Permutation], size_guard: usize) -> Result<Vec<Permutation>> {
    if let Some(g) = generators.iter().find(|g| g.degree() != n) {
        return Err(Error::Dimension(format!("generator {g} acts on {} points, expected {n}", g.degree())));
    }
    let identity = Permutation::identity(n);
    let mut seen: HashSet<Permutation> = HashSet::from([identity.clone()]);
    let mut order = vec![identity.clone()];
    let mut queue = VecDeque::from([identity]);
    while let Some(g) = queue.pop_front() {
        for s in generators {
            let h = g.compose(s);
            if seen.insert(h.clone()) {
                if seen.len() > size_guard {
                    return Err(Error::SizeGuard { what: "group order", limit: size_guard });
                }
                order.push(h.clone());
                queue.push_back(h);
            }
        }
    }
    Ok(order)
}

/// An enumerated permutation group on `{1..n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationGroup {
    n: usize,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
}

impl PermutationGroup {
    pub fn generated_by(n: usize, generators: Vec<Permutation>, size_guard: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("a permutation group needs at least one point".into()));
        }
        let elements = generate_group(n, &generators, size_guard)?;
        Ok(PermutationGroup { n, generators, elements })
    }

    /// `S_n`, generated by `(1 2)` and the `n`-cycle.
    pub fn symmetric(n: usize) -> Result<Self> {
        let mut gens = Vec::new();
        if n >= 2 {
            let mut swap: Vec<usize> = (1..=n).collect();
            swap.swap(0, 1);
            gens.push(Permutation::from_images(&swap)?);
            let cycle: Vec<usize> = (1..=n).map(|j| j % n + 1).collect();
            gens.push(Permutation::from_images(&cycle)?);
        }
        Self::generated_by(n, gens, DEFAULT_GROUP_GUARD)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.elements.contains(g)
    }

    /// Burnside: `(1/|G|) Σ_g fix(g)^k`, the number of orbits on `{1..n}^k`.
    pub fn character_moment(&self, k: usize) -> Rational {
        let total: BigInt = self.elements.iter().map(|g| BigInt::from(g.fixed_points()).pow(k as u32)).sum();
        Rational::new(total, BigInt::from(self.order()))
    }

    /// `(1/|G|)·#{g : g(j_t) = i_t for all t}`.
    pub fn haar_monomial(&self, word: &Word) -> Result<Rational> {
        if word.pairs().iter().any(|&(i, j)| i > self.n || j > self.n) {
            return Err(Error::InvalidInput(format!("word {word} has letters outside 1..{}", self.n)));
        }
        let hits = self
            .elements
            .iter()
            .filter(|g| word.pairs().iter().all(|&(i, j)| g.apply(j - 1) == i - 1))
            .count();
        Ok(Rational::new(BigInt::from(hits), BigInt::from(self.order())))
    }
}

/// Orbits of the group generated by `generators` on `{1..n}^k`, by union-find
/// over tuples. Independent of the group enumeration.
pub fn orbit_count_direct(n: usize, generators: &[Permutation], k: usize, cap: usize) -> Result<usize> {
    let size = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(Error::SizeGuard { what: "tuple count n^k", limit: cap });
    }
    let size = size as usize;
    let mut parent: Vec<usize> = (0..size).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut digits = vec![0usize; k];
    for code in 0..size {
        let mut c = code;
        for slot in digits.iter_mut().rev() {
            *slot = c % n;
            c /= n;
        }
        for g in generators {
            let image = digits.iter().fold(0, |acc, &x| acc * n + g.apply(x));
            let (a, b) = (find(&mut parent, code), find(&mut parent, image));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    Ok((0..size).filter(|&x| find(&mut parent, x) == x).count())
}

/// A finite group by its multiplication table (`table[a][b] = a·b`, 0-based
/// elements) together with the elements used as generators of the dual model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    generators: Vec<usize>,
}

impl FiniteGroup {
    pub fn new(table: Vec<Vec<usize>>, generators: Vec<usize>) -> Result<Self> {
        let m = table.len();
        if m == 0 {
            return Err(Error::InvalidInput("empty multiplication table".into()));
        }
        if m > TABLE_GUARD {
            return Err(Error::SizeGuard { what: "multiplication table order", limit: TABLE_GUARD });
        }
        for (a, row) in table.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidInput(format!("table row {a} has length {}, expected {m}", row.len())));
            }
            let mut seen = vec![false; m];
            for &x in row {
                if x >= m || seen[x] {
                    return Err(Error::InvalidInput(format!("table row {a} is not a permutation of 0..{m}")));
                }
                seen[x] = true;
            }
        }
        for b in 0..m {
            let mut seen = vec![false; m];
            for row in &table {
                if seen[row[b]] {
                    return Err(Error::InvalidInput(format!("table column {b} repeats an element")));
                }
                seen[row[b]] = true;
            }
        }
        let identity = (0..m)
            .find(|&e| (0..m).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::InvalidInput("table has no identity element".into()))?;
        // the full check is cubic; tables past this size are trusted
        if m <= 256 {
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        if table[table[a][b]][c] != table[a][table[b][c]] {
                            return Err(Error::InvalidInput(format!("table is not associative at ({a},{b},{c})")));
                        }
                    }
                }
            }
        }
        if generators.is_empty() {
            return Err(Error::InvalidInput("at least one generator is required".into()));
        }
        if let Some(&g) = generators.iter().find(|&&g| g >= m) {
            return Err(Error::InvalidInput(format!("generator {g} is not an element of a group of order {m}")));
        }
        Ok(FiniteGroup { table, identity, generators })
    }

    /// Cayley table of `S_n` with elements in lexicographic order of their images.
    pub fn symmetric_table(n: usize) -> (Vec<Permutation>, Vec<Vec<usize>>) {
        let mut elements = PermutationGroup::symmetric(n).expect("small symmetric group").elements().to_vec();
        elements.sort();
        let index: HashMap<&Permutation, usize> = elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let table =
            elements.iter().map(|a| elements.iter().map(|b| index[&a.compose(b)]).collect()).collect();
        (elements, table)
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    /// Number of length-`k` generator words equal to the identity, by dynamic
    /// programming over the group.
    pub fn identity_word_count(&self, k: usize) -> BigUint {
        let m = self.order();
        let mut counts = vec![BigUint::zero(); m];
        counts[self.identity] = BigUint::one();
        for _ in 0..k {
            let mut next = vec![BigUint::zero(); m];
            for (x, c) in counts.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for &g in &self.generators {
                    next[self.table[x][g]] += c;
                }
            }
            counts = next;
        }
        counts.swap_remove(self.identity)
    }

    /// Haar value on `u_{i_1 j_1}···u_{i_k j_k}` for `u = diag(g_1, …, g_n)`:
    /// zero unless `i_t = j_t` for all `t`, otherwise `1` iff `g_{i_1}···g_{i_k} = e`.
    pub fn haar_monomial(&self, word: &Word) -> Result<Rational> {
        let n = self.generators.len();
        if word.pairs().iter().any(|&(i, j)| i > n || j > n) {
            return Err(Error::InvalidInput(format!("word {word} has letters outside 1..{n}")));
        }
        if word.pairs().iter().any(|&(i, j)| i != j) {
            return Ok(Rational::zero());
        }
        let product = word.pairs().iter().fold(self.identity, |acc, &(i, _)| self.mul(acc, self.generators[i - 1]));
        Ok(if product == self.identity { Rational::one() } else { Rational::zero() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(images: &[usize]) -> Permutation {
        Permutation::from_images(images).unwrap()
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn closures() {
        assert_eq!(generate_group(3, &[perm(&[2, 1, 3])], 100).unwrap().len(), 2);
        assert_eq!(generate_group(3, &[perm(&[2, 1, 3]), perm(&[2, 3, 1])], 100).unwrap().len(), 6);
        assert_eq!(generate_group(3, &[Permutation::identity(3)], 100).unwrap(), vec![Permutation::identity(3)]);
        assert_eq!(generate_group(3, &[], 100).unwrap().len(), 1);
        assert!(matches!(
            generate_group(4, &[perm(&[2, 1, 3, 4]), perm(&[2, 3, 4, 1])], 10),
            Err(Error::SizeGuard { .. })
        ));
        assert!(generate_group(4, &[perm(&[2, 1, 3])], 10).is_err());
    }

    #[test]
    fn burnside_values() {
        let s3 = PermutationGroup::symmetric(3).unwrap();
        let got: Vec<Rational> = (1..=4).map(|k| s3.character_moment(k)).collect();
        assert_eq!(got, vec![rat(1, 1), rat(2, 1), rat(5, 1), rat(14, 1)]);
        let z2 = PermutationGroup::generated_by(3, vec![perm(&[2, 1, 3])], 10).unwrap();
        assert_eq!(z2.character_moment(1), rat(2, 1));
        let trivial = PermutationGroup::generated_by(5, vec![], 10).unwrap();
        assert_eq!(trivial.character_moment(1), rat(5, 1));
    }

    #[test]
    fn haar_monomials() {
        let z2 = PermutationGroup::generated_by(3, vec![perm(&[2, 1, 3])], 10).unwrap();
        let w = |p: &[(usize, usize)]| Word::new(p.to_vec(), 3).unwrap();
        assert_eq!(z2.haar_monomial(&w(&[(1, 1)])).unwrap(), rat(1, 2));
        assert_eq!(z2.haar_monomial(&w(&[(3, 3)])).unwrap(), rat(1, 1));
        assert_eq!(z2.haar_monomial(&w(&[(1, 2), (2, 2)])).unwrap(), rat(0, 1));
    }

    #[test]
    fn direct_orbits() {
        let gens = [perm(&[2, 1, 3]), perm(&[2, 3, 1])];
        assert_eq!(orbit_count_direct(3, &gens, 3, 1000).unwrap(), 5);
        assert!(orbit_count_direct(3, &gens, 3, 10).is_err());
    }

    #[test]
    fn table_validation() {
        let z2 = vec![vec![0, 1], vec![1, 0]];
        let g = FiniteGroup::new(z2.clone(), vec![1]).unwrap();
        assert_eq!(g.identity(), 0);
        assert!(FiniteGroup::new(vec![vec![0, 1], vec![0, 1]], vec![1]).is_err());
        assert!(FiniteGroup::new(z2.clone(), vec![2]).is_err());
        assert!(FiniteGroup::new(z2, vec![]).is_err());
        // a·b = −a−b mod 3: a Latin square without identity
        assert!(FiniteGroup::new(vec![vec![0, 2, 1], vec![2, 1, 0], vec![1, 0, 2]], vec![0]).is_err());
        // loop with identity that is not associative
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(FiniteGroup::new(loop5, vec![1]).is_err());
    }

    #[test]
    fn z2_dual_counts() {
        let g = FiniteGroup::new(vec![vec![0, 1], vec![1, 0]], vec![1]).unwrap();
        for k in 0..8 {
            let expected = if k % 2 == 0 { 1u32 } else { 0 };
            assert_eq!(g.identity_word_count(k), BigUint::from(expected));
        }
    }

    #[test]
    fn symmetric_table_is_a_group() {
        let (elements, table) = FiniteGroup::symmetric_table(3);
        assert_eq!(elements.len(), 6);
        let g = FiniteGroup::new(table, vec![1]).unwrap();
        assert!(elements[g.identity()].is_identity());
    }
}
