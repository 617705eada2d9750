//! Permutations of dart indices and the orbit / regularity primitives built on them.
//!
//! Convention used everywhere in this crate: permutations act on the right.
//! `compose(p, q)` applied to `a` is `q(p(a))`, i.e. "p then q".

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("image list is not a bijection on 0..{degree}: {reason}")]
    NotABijection { degree: usize, reason: String },
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("degree {0} does not fit in 32-bit dart indices")]
    TooLarge(usize),
}

/// A bijection on `0..degree`, stored as its image table.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u32>,
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{}", self)
    }
}

/// Cycle notation, fixed points omitted; the identity prints as `()`.
impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        let mut any = false;
        for c in cycles.iter().filter(|c| c.len() > 1) {
            any = true;
            write!(f, "(")?;
            for (i, p) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm {
            images: (0..degree as u32).collect(),
        }
    }

    /// Checks that `images` is a bijection on `0..images.len()`.
    pub fn from_images(images: Vec<u32>) -> Result<Perm, PermError> {
        let degree = images.len();
        if degree > u32::MAX as usize {
            return Err(PermError::TooLarge(degree));
        }
        let mut seen = vec![false; degree];
        for (i, &a) in images.iter().enumerate() {
            let a = a as usize;
            if a >= degree {
                return Err(PermError::NotABijection {
                    degree,
                    reason: format!("image of {i} is {a}"),
                });
            }
            if seen[a] {
                return Err(PermError::NotABijection {
                    degree,
                    reason: format!("{a} is hit twice"),
                });
            }
            seen[a] = true;
        }
        Ok(Perm { images })
    }

    pub fn from_usize_images(images: &[usize]) -> Result<Perm, PermError> {
        if images.iter().any(|&a| a > u32::MAX as usize) {
            return Err(PermError::TooLarge(images.len()));
        }
        Perm::from_images(images.iter().map(|&a| a as u32).collect())
    }

    /// Builds a permutation of the given degree from disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[&[u32]]) -> Result<Perm, PermError> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (i, &a) in cycle.iter().enumerate() {
                let b = cycle[(i + 1) % cycle.len()];
                for &p in [a, b].iter() {
                    if p as usize >= degree {
                        return Err(PermError::PointOutOfRange {
                            point: p as usize,
                            degree,
                        });
                    }
                }
                if touched[a as usize] {
                    return Err(PermError::NotABijection {
                        degree,
                        reason: format!("{a} appears in two cycles"),
                    });
                }
                touched[a as usize] = true;
                images[a as usize] = b;
            }
        }
        Perm::from_images(images)
    }

    /// Trusted constructor for internally generated tables.
    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Perm {
        debug_assert!(Perm::from_images(images.clone()).is_ok());
        Perm { images }
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, a: u32) -> u32 {
        self.images[a as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn into_images(self) -> Vec<u32> {
        self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &a)| i as u32 == a)
    }

    /// `self` then `other`.
    pub fn then(&self, other: &Perm) -> Result<Perm, PermError> {
        compose(self, other)
    }

    pub fn inverse(&self) -> Perm {
        inverse(self)
    }

    /// `self` applied `k` times; negative exponents use the inverse.
    pub fn pow(&self, k: i64) -> Perm {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let k = k.unsigned_abs();
        // Walk each cycle once instead of repeated squaring.
        let mut images = vec![0u32; self.degree()];
        for c in base.cycles() {
            let len = c.len() as u64;
            for (i, &p) in c.iter().enumerate() {
                let j = ((i as u64 + k % len) % len) as usize;
                images[p as usize] = c[j];
            }
        }
        Perm { images }
    }

    /// Disjoint cycles including fixed points, each starting at its least
    /// element, listed by that element.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut a = start as u32;
            while !seen[a as usize] {
                seen[a as usize] = true;
                cycle.push(a);
                a = self.images[a as usize];
            }
            out.push(cycle);
        }
        out
    }

    /// Cycle lengths in non-increasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    /// Order as lcm of cycle lengths, `None` on u64 overflow.
    pub fn checked_order(&self) -> Option<u64> {
        let mut seen = vec![false; self.degree()];
        let mut order: u64 = 1;
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut len: u64 = 0;
            let mut a = start;
            while !seen[a] {
                seen[a] = true;
                a = self.images[a] as usize;
                len += 1;
            }
            order = lcm_checked(order, len)?;
        }
        Some(order)
    }

    /// Panics if the order does not fit in u64, which needs degree in the hundreds.
    pub fn order(&self) -> u64 {
        self.checked_order().expect("permutation order overflows u64")
    }

    /// Even permutation test via cycle count.
    pub fn is_even(&self) -> bool {
        let cycles = self.cycles().len();
        (self.degree() - cycles).is_multiple_of(2)
    }

    /// `p^-1 self p` under the right-action convention: maps `a·p` to `a·self·p`.
    pub fn conjugate_by(&self, p: &Perm) -> Perm {
        let mut images = vec![0u32; self.degree()];
        for a in 0..self.degree() {
            images[p.apply(a as u32) as usize] = p.apply(self.apply(a as u32));
        }
        Perm { images }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn lcm_checked(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / gcd(a, b)).checked_mul(b)
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    lcm_checked(a, b).expect("lcm overflow")
}

/// `p` then `q`.
pub fn compose(p: &Perm, q: &Perm) -> Result<Perm, PermError> {
    if p.degree() != q.degree() {
        return Err(PermError::DegreeMismatch {
            left: p.degree(),
            right: q.degree(),
        });
    }
    Ok(Perm {
        images: p.images.iter().map(|&a| q.images[a as usize]).collect(),
    })
}

/// Composition of several permutations left to right. Panics on an empty list.
pub fn compose_all(perms: &[&Perm]) -> Result<Perm, PermError> {
    let mut acc = perms[0].clone();
    for p in &perms[1..] {
        acc = compose(&acc, p)?;
    }
    Ok(acc)
}

pub fn inverse(p: &Perm) -> Perm {
    let mut images = vec![0u32; p.degree()];
    for (i, &a) in p.images.iter().enumerate() {
        images[a as usize] = i as u32;
    }
    Perm { images }
}

pub fn element_order(p: &Perm) -> u64 {
    p.order()
}

/// One letter of a word over generators and their inverses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub generator: usize,
    pub inverse: bool,
}

impl Step {
    pub fn fwd(generator: usize) -> Step {
        Step {
            generator,
            inverse: false,
        }
    }

    pub fn inv(generator: usize) -> Step {
        Step {
            generator,
            inverse: true,
        }
    }

    pub fn reversed(self) -> Step {
        Step {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }
}

/// Generators together with their inverses, in breadth-first edge order
/// gen 0, gen 0⁻¹, gen 1, gen 1⁻¹, ...
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    edges: Vec<(Step, Perm)>,
    degree: usize,
}

impl GeneratorSet {
    pub fn new(gens: &[Perm]) -> Result<GeneratorSet, PermError> {
        let degree = gens.first().map(Perm::degree).unwrap_or(0);
        let mut edges = Vec::with_capacity(2 * gens.len());
        for (i, g) in gens.iter().enumerate() {
            if g.degree() != degree {
                return Err(PermError::DegreeMismatch {
                    left: degree,
                    right: g.degree(),
                });
            }
            edges.push((Step::fwd(i), g.clone()));
            edges.push((Step::inv(i), g.inverse()));
        }
        Ok(GeneratorSet { edges, degree })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generator_count(&self) -> usize {
        self.edges.len() / 2
    }

    pub fn step(&self, a: u32, s: Step) -> u32 {
        self.edges[2 * s.generator + s.inverse as usize].1.apply(a)
    }

    pub fn generator(&self, i: usize) -> &Perm {
        &self.edges[2 * i].1
    }

    pub fn edges(&self) -> impl Iterator<Item = (Step, &Perm)> {
        self.edges.iter().map(|(s, p)| (*s, p))
    }

    pub fn apply_word(&self, a: u32, word: &[Step]) -> u32 {
        word.iter().fold(a, |p, &s| self.step(p, s))
    }
}

/// Breadth-first orbit with a spanning tree of shortest words.
#[derive(Debug, Clone)]
pub struct Orbit {
    start: u32,
    members: Vec<u32>,
    // parent[p] = (predecessor, step) for members other than start
    parent: Vec<Option<(u32, Step)>>,
    in_orbit: Vec<bool>,
}

impl Orbit {
    pub fn start(&self) -> u32 {
        self.start
    }

    /// Members in discovery order; `members()[0]` is the start point.
    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a: u32) -> bool {
        self.in_orbit.get(a as usize).copied().unwrap_or(false)
    }

    pub fn parent(&self, a: u32) -> Option<(u32, Step)> {
        self.parent.get(a as usize).copied().flatten()
    }

    /// The spanning-tree word from the start point to `a`.
    pub fn word(&self, a: u32) -> Option<Vec<Step>> {
        if !self.contains(a) {
            return None;
        }
        let mut word = Vec::new();
        let mut p = a;
        while let Some((prev, s)) = self.parent[p as usize] {
            word.push(s);
            p = prev;
        }
        word.reverse();
        Some(word)
    }

    /// Sorted member list.
    pub fn sorted_members(&self) -> Vec<u32> {
        let mut m = self.members.clone();
        m.sort_unstable();
        m
    }
}

pub fn orbit(gens: &[Perm], start: u32) -> Result<Orbit, PermError> {
    let set = GeneratorSet::new(gens)?;
    orbit_of(&set, start)
}

pub fn orbit_of(gens: &GeneratorSet, start: u32) -> Result<Orbit, PermError> {
    let d = gens.degree();
    if start as usize >= d {
        return Err(PermError::PointOutOfRange {
            point: start as usize,
            degree: d,
        });
    }
    let mut in_orbit = vec![false; d];
    let mut parent = vec![None; d];
    let mut members = vec![start];
    in_orbit[start as usize] = true;
    let mut head = 0;
    while head < members.len() {
        let a = members[head];
        head += 1;
        for (s, g) in gens.edges() {
            let b = g.apply(a);
            if !in_orbit[b as usize] {
                in_orbit[b as usize] = true;
                parent[b as usize] = Some((a, s));
                members.push(b);
            }
        }
    }
    Ok(Orbit {
        start,
        members,
        parent,
        in_orbit,
    })
}

/// A nontrivial Schreier generator of the stabilizer of the start point.
///
/// With `t_p` the tree word reaching `p`, the element
/// `t_{tree_point} · generator · t_{tree_point·generator}⁻¹` fixes the start
/// point but sends `moved` to `image`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchreierWitness {
    pub tree_point: u32,
    pub generator: usize,
    pub moved: u32,
    pub image: u32,
}

impl fmt::Display for SchreierWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Schreier generator at tree point {} with generator {} moves {} to {}",
            self.tree_point, self.generator, self.moved, self.image
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Regularity {
    Regular,
    NotTransitive { orbit_size: usize },
    NotRegular(SchreierWitness),
}

/// Map commuting with every generator that sends the start of `tree` to
/// `target`, if one exists; otherwise the first Schreier generator that moves
/// `target`.
fn centralizer_element(gens: &GeneratorSet, tree: &Orbit, target: u32) -> Result<Vec<u32>, SchreierWitness> {
    let d = gens.degree();
    let mut phi = vec![0u32; d];
    phi[tree.start() as usize] = target;
    for &b in &tree.members()[1..] {
        let (p, s) = tree.parent(b).expect("tree member without parent");
        phi[b as usize] = gens.step(phi[p as usize], s);
    }
    for &b in tree.members() {
        for g in 0..gens.generator_count() {
            let bg = gens.generator(g).apply(b);
            let lhs = gens.generator(g).apply(phi[b as usize]);
            if phi[bg as usize] != lhs {
                // a·t_b·g differs from a·t_{bg}; pull back along t_{bg}.
                let word = tree.word(bg).expect("tree word");
                let mut image = lhs;
                for s in word.iter().rev() {
                    image = gens.step(image, s.reversed());
                }
                return Err(SchreierWitness {
                    tree_point: b,
                    generator: g,
                    moved: target,
                    image,
                });
            }
        }
    }
    Ok(phi)
}

/// Decides whether `⟨gens⟩` acts regularly on `0..degree`.
///
/// Transitivity comes from the orbit of 0. Triviality of the stabilizer is
/// decided through the centralizer: for each target `a` the propagation
/// `0 ↦ a` along the spanning tree is consistent on every edge exactly when
/// all Schreier generators fix `a`, and a transitive group is regular iff its
/// centralizer is transitive. Each consistent propagation at least doubles
/// the centralizer orbit, so only `log2(d)` propagations are needed.
pub fn regularity(gens: &[Perm]) -> Result<Regularity, PermError> {
    let set = GeneratorSet::new(gens)?;
    let d = set.degree();
    if d == 0 {
        return Ok(Regularity::NotTransitive { orbit_size: 0 });
    }
    let tree = orbit_of(&set, 0)?;
    if tree.len() != d {
        return Ok(Regularity::NotTransitive { orbit_size: tree.len() });
    }
    let mut central: Vec<Vec<u32>> = Vec::new();
    let mut reached = vec![false; d];
    reached[0] = true;
    let mut reached_list = vec![0u32];
    loop {
        let Some(target) = (0..d as u32).find(|&a| !reached[a as usize]) else {
            return Ok(Regularity::Regular);
        };
        match centralizer_element(&set, &tree, target) {
            Err(w) => return Ok(Regularity::NotRegular(w)),
            Ok(phi) => central.push(phi),
        }
        // Re-close the orbit of 0 under all centralizer elements found so far.
        let mut head = 0;
        while head < reached_list.len() {
            let a = reached_list[head];
            head += 1;
            for phi in &central {
                let b = phi[a as usize];
                if !reached[b as usize] {
                    reached[b as usize] = true;
                    reached_list.push(b);
                }
            }
        }
    }
}

pub fn is_regular_action(x: &Perm, y: &Perm) -> Result<bool, PermError> {
    Ok(regularity(&[x.clone(), y.clone()])? == Regularity::Regular)
}

/// Every nontrivial involution of degree `r`, in lexicographic order of images.
pub(crate) fn involutions(r: usize) -> Vec<Perm> {
    fn rec(images: &mut Vec<u32>, used: &mut Vec<bool>, i: usize, out: &mut Vec<Perm>) {
        let r = images.len();
        if i == r {
            out.push(Perm { images: images.clone() });
            return;
        }
        if used[i] {
            rec(images, used, i + 1, out);
            return;
        }
        // i fixed first keeps the output lexicographic.
        used[i] = true;
        images[i] = i as u32;
        rec(images, used, i + 1, out);
        for j in i + 1..r {
            if !used[j] {
                used[j] = true;
                images[i] = j as u32;
                images[j] = i as u32;
                rec(images, used, i + 1, out);
                images[j] = j as u32;
                used[j] = false;
            }
        }
        used[i] = false;
    }
    let mut out = Vec::new();
    let mut images: Vec<u32> = (0..r as u32).collect();
    let mut used = vec![false; r];
    rec(&mut images, &mut used, 0, &mut out);
    out.retain(|p| !p.is_identity());
    out
}
