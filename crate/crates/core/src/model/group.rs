use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ModelError;

/// Orders above this are checked for associativity by sampling.
pub const EXHAUSTIVE_ASSOC_LIMIT: usize = 256;
pub const ASSOC_SAMPLES: usize = 10_000;
const ASSOC_SEED: u64 = 0x5eed_a550c;

/// A group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGroup {
    order: usize,
    mult: Vec<usize>,
    identity: usize,
    inv: Vec<usize>,
    element_names: Option<Vec<String>>,
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.mult.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub fn element_names(&self) -> Option<&[String]> {
        self.element_names.as_deref()
    }

    pub fn name_of(&self, g: usize) -> String {
        match &self.element_names {
            Some(n) => n[g].clone(),
            None => g.to_string(),
        }
    }

    /// Look up an element by display name or decimal index.
    pub fn parse_element(&self, s: &str) -> Option<usize> {
        if let Some(names) = &self.element_names {
            if let Some(i) = names.iter().position(|n| n == s) {
                return Some(i);
            }
        }
        s.parse::<usize>().ok().filter(|&i| i < self.order)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self, ModelError> {
        if names.len() != self.order {
            return Err(ModelError::BadNames {
                expected: self.order,
                found: names.len(),
            });
        }
        self.element_names = Some(names);
        Ok(self)
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut k = 1;
        let mut x = g;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn power(&self, g: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, g))
    }

    /// Validate `elements` as a subgroup.
    pub fn subgroup(&self, elements: &[usize]) -> Result<Subgroup, ModelError> {
        let mut member = vec![false; self.order];
        for &e in elements {
            if e >= self.order {
                return Err(ModelError::NotASubgroup(format!(
                    "element {e} out of range for order {}",
                    self.order
                )));
            }
            member[e] = true;
        }
        if !member[self.identity] {
            return Err(ModelError::NotASubgroup("missing the identity".into()));
        }
        let elems: Vec<usize> = (0..self.order).filter(|&g| member[g]).collect();
        for &a in &elems {
            if !member[self.inv(a)] {
                return Err(ModelError::NotASubgroup(format!(
                    "inverse of {} missing",
                    self.name_of(a)
                )));
            }
            for &b in &elems {
                if !member[self.mul(a, b)] {
                    return Err(ModelError::NotASubgroup(format!(
                        "{} * {} leaves the set",
                        self.name_of(a),
                        self.name_of(b)
                    )));
                }
            }
        }
        Ok(Subgroup { elements: elems, member })
    }

    /// Subgroup generated by `gens`.
    pub fn generated(&self, gens: &[usize]) -> Result<Subgroup, ModelError> {
        if let Some(&g) = gens.iter().find(|&&g| g >= self.order) {
            return Err(ModelError::NotASubgroup(format!("generator {g} out of range")));
        }
        let mut member = vec![false; self.order];
        member[self.identity] = true;
        let mut stack = vec![self.identity];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !member[y] {
                    member[y] = true;
                    stack.push(y);
                }
            }
        }
        let elems: Vec<usize> = (0..self.order).filter(|&g| member[g]).collect();
        Ok(Subgroup { elements: elems, member })
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        let mut member = vec![false; self.order];
        member[self.identity] = true;
        Subgroup {
            elements: vec![self.identity],
            member,
        }
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup {
            elements: (0..self.order).collect(),
            member: vec![true; self.order],
        }
    }

    /// Sort key for canonical representatives: the identity first, then by index.
    pub fn rep_key(&self, g: usize) -> (bool, usize) {
        (g != self.identity, g)
    }

    /// Canonical representative of the left coset gH.
    pub fn coset_rep(&self, g: usize, h: &Subgroup) -> usize {
        h.elements
            .iter()
            .map(|&x| self.mul(g, x))
            .min_by_key(|&x| self.rep_key(x))
            .expect("subgroups are nonempty")
    }

    /// Left transversal of H, ordered by representative.
    pub fn transversal(&self, h: &Subgroup) -> Vec<usize> {
        let mut reps: Vec<usize> = (0..self.order)
            .filter(|&g| self.coset_rep(g, h) == g)
            .collect();
        reps.sort_by_key(|&g| self.rep_key(g));
        reps
    }
}

/// Validate a raw multiplication table.
pub fn validate_group(table: &[Vec<usize>]) -> Result<FiniteGroup, ModelError> {
    let n = table.len();
    if n == 0 {
        return Err(ModelError::EmptyTable);
    }
    for (i, row) in table.iter().enumerate() {
        if row.len() != n {
            return Err(ModelError::NotSquare {
                row: i,
                len: row.len(),
                expected: n,
            });
        }
        for (j, &v) in row.iter().enumerate() {
            if v >= n {
                return Err(ModelError::NotClosed { a: i, b: j, value: v });
            }
        }
    }
    let identity = (0..n)
        .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
        .ok_or(ModelError::NoIdentity)?;
    let mut inv = vec![0; n];
    for g in 0..n {
        inv[g] = (0..n)
            .find(|&h| table[g][h] == identity && table[h][g] == identity)
            .ok_or(ModelError::NoInverse { element: g })?;
    }
    let mult: Vec<usize> = table.iter().flatten().copied().collect();
    let at = |a: usize, b: usize| mult[a * n + b];
    if n <= EXHAUSTIVE_ASSOC_LIMIT {
        for a in 0..n {
            for b in 0..n {
                let ab = at(a, b);
                for c in 0..n {
                    if at(ab, c) != at(a, at(b, c)) {
                        return Err(ModelError::NotAssociative { a, b, c });
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(ASSOC_SEED);
        for _ in 0..ASSOC_SAMPLES {
            let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            if at(at(a, b), c) != at(a, at(b, c)) {
                return Err(ModelError::NotAssociative { a, b, c });
            }
        }
    }
    Ok(FiniteGroup {
        order: n,
        mult,
        identity,
        inv,
        element_names: None,
    })
}

/// A verified subgroup of some finite group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    elements: Vec<usize>,
    member: Vec<bool>,
}

impl Subgroup {
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.member.get(g).copied().unwrap_or(false)
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&g| other.contains(g))
    }

    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        let member: Vec<bool> = self
            .member
            .iter()
            .zip(&other.member)
            .map(|(a, b)| *a && *b)
            .collect();
        let elements = (0..member.len()).filter(|&g| member[g]).collect();
        Subgroup { elements, member }
    }
}

/// An injective homomorphism between finite groups, stored as its image table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomorphism {
    image: Vec<usize>,
    preimage: Vec<Option<usize>>,
}

impl Monomorphism {
    pub fn new(source: &FiniteGroup, target: &FiniteGroup, image: Vec<usize>) -> Result<Self, ModelError> {
        if image.len() != source.order() {
            return Err(ModelError::NotAMonomorphism(format!(
                "image table has {} entries, source has order {}",
                image.len(),
                source.order()
            )));
        }
        if let Some(&x) = image.iter().find(|&&x| x >= target.order()) {
            return Err(ModelError::NotAMonomorphism(format!(
                "image entry {x} out of range for target order {}",
                target.order()
            )));
        }
        if image[source.identity()] != target.identity() {
            return Err(ModelError::NotAMonomorphism("identity not preserved".into()));
        }
        let mut preimage = vec![None; target.order()];
        for (g, &x) in image.iter().enumerate() {
            if let Some(h) = preimage[x] {
                return Err(ModelError::NotAMonomorphism(format!(
                    "elements {h} and {g} share the image {x}"
                )));
            }
            preimage[x] = Some(g);
        }
        for a in 0..source.order() {
            for b in 0..source.order() {
                if image[source.mul(a, b)] != target.mul(image[a], image[b]) {
                    return Err(ModelError::NotAMonomorphism(format!(
                        "product of {a} and {b} not preserved"
                    )));
                }
            }
        }
        Ok(Self { image, preimage })
    }

    pub fn identity_map(g: &FiniteGroup) -> Self {
        Self {
            image: (0..g.order()).collect(),
            preimage: (0..g.order()).map(Some).collect(),
        }
    }

    #[inline]
    pub fn apply(&self, g: usize) -> usize {
        self.image[g]
    }

    #[inline]
    pub fn preimage(&self, x: usize) -> Option<usize> {
        self.preimage[x]
    }

    pub fn image_table(&self) -> &[usize] {
        &self.image
    }

    pub fn image_subgroup(&self, target: &FiniteGroup) -> Subgroup {
        target
            .subgroup(&self.image)
            .expect("image of a homomorphism is a subgroup")
    }
}
