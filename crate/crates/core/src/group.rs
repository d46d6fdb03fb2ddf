//! Finite groups given by generators, closed under composition by search.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::hash::Hash;

use crate::error::{Error, Result};

pub const DEFAULT_CAP: usize = 10_000;

/// A finite group stored as its full element list, closed under `compose`.
#[derive(Debug, Clone)]
pub struct FiniteGroup<T> {
    elements: Vec<T>,
    index: HashMap<T, usize>,
    /// `table[a][b]` is the index of `elements[a] ∘ elements[b]`.
    table: Vec<Vec<usize>>,
}

impl<T: Clone + Eq + Hash> FiniteGroup<T> {
    /// Closes `generators` under `compose`; element 0 is `identity`.
    pub fn generate<F>(identity: T, generators: &[T], compose: F, cap: usize) -> Result<Self>
    where
        F: Fn(&T, &T) -> T,
    {
        let mut elements = vec![identity.clone()];
        let mut index = HashMap::from([(identity, 0usize)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in generators {
                let h = compose(g, &elements[i]);
                if !index.contains_key(&h) {
                    if elements.len() >= cap {
                        return Err(Error::GroupCap { cap });
                    }
                    index.insert(h.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(h);
                }
            }
        }
        let n = elements.len();
        let mut table = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                let c = compose(&elements[a], &elements[b]);
                table[a][b] = *index
                    .get(&c)
                    .ok_or_else(|| Error::InvalidAction("generators do not close up".into()))?;
            }
        }
        Ok(FiniteGroup {
            elements,
            index,
            table,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[T] {
        &self.elements
    }

    pub fn index_of(&self, g: &T) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order())
            .find(|&b| self.table[a][b] == 0)
            .expect("every group element has an inverse")
    }

    fn close(&self, seed: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut set = seed.clone();
        set.insert(0);
        loop {
            let mut grown = set.clone();
            for &a in &set {
                for &b in &set {
                    grown.insert(self.table[a][b]);
                }
            }
            if grown.len() == set.len() {
                return set;
            }
            set = grown;
        }
    }

    /// Every subgroup, as sorted element-index sets ordered by size.
    pub fn subgroups(&self) -> Vec<Subgroup> {
        self.subgroups_within(&(0..self.order()).collect::<Vec<_>>())
    }

    /// Every subgroup contained in the subgroup with element indices `within`.
    pub fn subgroups_within(&self, within: &[usize]) -> Vec<Subgroup> {
        let cyclic: Vec<(usize, BTreeSet<usize>)> = within
            .iter()
            .map(|&g| (g, self.close(&BTreeSet::from([g]))))
            .collect();
        let mut found: BTreeSet<BTreeSet<usize>> = BTreeSet::from([BTreeSet::from([0])]);
        let mut frontier: Vec<BTreeSet<usize>> = found.iter().cloned().collect();
        while let Some(h) = frontier.pop() {
            for (g, c) in &cyclic {
                if h.contains(g) {
                    continue;
                }
                let joined = self.close(&h.union(c).copied().collect());
                if found.insert(joined.clone()) {
                    frontier.push(joined);
                }
            }
        }
        let mut subgroups: Vec<Subgroup> = found
            .into_iter()
            .map(|elements| {
                let mut generators = Vec::new();
                let mut span = BTreeSet::from([0]);
                for &g in &elements {
                    if !span.contains(&g) {
                        generators.push(g);
                        span = self.close(&generators.iter().copied().collect());
                    }
                }
                Subgroup {
                    elements: elements.into_iter().collect(),
                    generators,
                }
            })
            .collect();
        subgroups.sort_by(|a, b| {
            (a.elements.len(), &a.elements).cmp(&(b.elements.len(), &b.elements))
        });
        subgroups
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    pub elements: Vec<usize>,
    pub generators: Vec<usize>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// A permutation of `0..n`; `(a ∘ b)[i] = a[b[i]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn is_valid(&self) -> bool {
        let mut seen = vec![false; self.0.len()];
        self.0.iter().all(|&i| i < seen.len() && !std::mem::replace(&mut seen[i], true))
    }
}
