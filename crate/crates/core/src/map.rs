//! Orientably-regular maps `Map(G; x, y)` in their regular dart representation.
//!
//! A map is a dart count `d` and two permutations of `0..d`: `x` rotates
//! darts around faces and `y` around vertices. `⟨x, y⟩` must act regularly,
//! so darts are in bijection with the elements of `G`, with dart 0 the
//! identity, and `xy` must be an involution.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::{self, compose, Perm, PermError, Regularity, SchreierWitness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("x and y have different degrees ({x} vs {y}) or do not match the dart count {darts}")]
    DegreeMismatch { darts: usize, x: usize, y: usize },
    #[error("a map needs at least one dart")]
    Empty,
    #[error("⟨x, y⟩ is not transitive: the orbit of dart 0 has {orbit_size} of {darts} darts")]
    NotTransitive { orbit_size: usize, darts: usize },
    #[error("⟨x, y⟩ does not act regularly: {0}")]
    NotRegular(SchreierWitness),
    #[error("xy has order {order}, expected 2")]
    EdgeWordNotInvolution { order: u64 },
    #[error("dart count {darts} is not divisible by {what} = {value}")]
    Indivisible {
        darts: usize,
        what: &'static str,
        value: u64,
    },
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("dart {dart} out of range for a map with {darts} darts")]
    DartOutOfRange { dart: usize, darts: usize },
    #[error("generated group has more than {limit} elements")]
    GroupTooLarge { limit: usize },
    #[error("malformed word: {0}")]
    BadWord(String),
}

/// Spherical, euclidean or hyperbolic according to `1/m + 1/n` vs `1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Spherical,
    Euclidean,
    Hyperbolic,
}

/// Type `{m, n}`: faces of length `m`, vertices of valency `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MapType {
    pub m: u64,
    pub n: u64,
}

impl MapType {
    pub fn new(m: u64, n: u64) -> MapType {
        MapType { m, n }
    }

    pub fn geometry(&self) -> Geometry {
        // compare n + m against mn / 2 without fractions
        let lhs = 2 * (self.m + self.n);
        let rhs = self.m * self.n;
        match lhs.cmp(&rhs) {
            std::cmp::Ordering::Greater => Geometry::Spherical,
            std::cmp::Ordering::Equal => Geometry::Euclidean,
            std::cmp::Ordering::Less => Geometry::Hyperbolic,
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.geometry() == Geometry::Hyperbolic
    }

    pub fn dual(&self) -> MapType {
        MapType { m: self.n, n: self.m }
    }
}

impl fmt::Display for MapType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.m, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub vertices: u64,
    pub edges: u64,
    pub faces: u64,
    pub euler_characteristic: i64,
    pub genus: u64,
}

/// Dart map `src → tgt` fixing dart 0 and commuting with both generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedMorphism {
    phi: Vec<u32>,
}

impl RootedMorphism {
    pub(crate) fn from_images(phi: Vec<u32>) -> RootedMorphism {
        RootedMorphism { phi }
    }

    pub fn images(&self) -> &[u32] {
        &self.phi
    }

    pub fn apply(&self, dart: u32) -> u32 {
        self.phi[dart as usize]
    }

    pub fn source_darts(&self) -> usize {
        self.phi.len()
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.phi.len()];
        for &a in &self.phi {
            match seen.get_mut(a as usize) {
                Some(s) if !*s => *s = true,
                _ => return false,
            }
        }
        true
    }

    /// `self` then `other`; both must be composable as dart maps.
    pub fn then(&self, other: &RootedMorphism) -> RootedMorphism {
        RootedMorphism {
            phi: self.phi.iter().map(|&a| other.phi[a as usize]).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chirality {
    Reflexible,
    Chiral,
}

impl fmt::Display for Chirality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Chirality::Reflexible => "reflexible",
            Chirality::Chiral => "chiral",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChiralityReport {
    pub verdict: Chirality,
    /// Rooted morphism from the map to its mirror, present iff reflexible.
    pub witness: Option<RootedMorphism>,
}

/// A letter of a word in `x, x⁻¹, y, y⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    X,
    XInv,
    Y,
    YInv,
}

impl Letter {
    pub fn inverse(self) -> Letter {
        match self {
            Letter::X => Letter::XInv,
            Letter::XInv => Letter::X,
            Letter::Y => Letter::YInv,
            Letter::YInv => Letter::Y,
        }
    }
}

/// A group word, read left to right: the leftmost letter is applied first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(match l {
                Letter::X => "x",
                Letter::XInv => "x⁻¹",
                Letter::Y => "y",
                Letter::YInv => "y⁻¹",
            })?;
        }
        Ok(())
    }
}

/// Accepts `x`, `y`, their inverses as `x⁻¹`, `x^-1`, `x'` or `X`, with
/// optional whitespace; `ε` or the empty string is the empty word.
impl FromStr for Word {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Word, MapError> {
        let mut letters = Vec::new();
        let chars: Vec<char> = s.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            i += 1;
            let base = match c {
                c if c.is_whitespace() || c == 'ε' => continue,
                'x' => Letter::X,
                'y' => Letter::Y,
                'X' => Letter::XInv,
                'Y' => Letter::YInv,
                other => return Err(MapError::BadWord(format!("unexpected '{other}' in {s:?}"))),
            };
            let rest: String = chars[i..].iter().take(3).collect();
            let inverted = if rest.starts_with("⁻¹") {
                i += 2;
                true
            } else if rest.starts_with("^-1") {
                i += 3;
                true
            } else if rest.starts_with('\'') {
                i += 1;
                true
            } else {
                false
            };
            letters.push(if inverted { base.inverse() } else { base });
        }
        Ok(Word(letters))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OrientedMap {
    x: Perm,
    y: Perm,
    label: Option<String>,
}

impl OrientedMap {
    /// Checks every map invariant: equal degrees, regular action of
    /// `⟨x, y⟩`, `xy` an involution, and the divisibility of `d`.
    pub fn validate(d: usize, x: Perm, y: Perm) -> Result<OrientedMap, MapError> {
        if x.degree() != d || y.degree() != d {
            return Err(MapError::DegreeMismatch {
                darts: d,
                x: x.degree(),
                y: y.degree(),
            });
        }
        if d == 0 {
            return Err(MapError::Empty);
        }
        match perm::regularity(&[x.clone(), y.clone()])? {
            Regularity::Regular => {}
            Regularity::NotTransitive { orbit_size } => return Err(MapError::NotTransitive { orbit_size, darts: d }),
            Regularity::NotRegular(w) => return Err(MapError::NotRegular(w)),
        }
        Self::check_orders(&x, &y)?;
        Ok(OrientedMap { x, y, label: None })
    }

    /// For constructions whose regularity is guaranteed by how they were
    /// built (regular representations, pair orbits); still checks orders.
    pub(crate) fn from_regular_unchecked(x: Perm, y: Perm) -> Result<OrientedMap, MapError> {
        debug_assert_eq!(x.degree(), y.degree());
        Self::check_orders(&x, &y)?;
        Ok(OrientedMap { x, y, label: None })
    }

    fn check_orders(x: &Perm, y: &Perm) -> Result<(), MapError> {
        let d = x.degree();
        // regular action bounds every element order by d
        let t = compose(x, y)?;
        let ot = t.order();
        if ot != 2 {
            return Err(MapError::EdgeWordNotInvolution { order: ot });
        }
        for (what, value) in [("order(x)", x.order()), ("order(y)", y.order()), ("2", 2)] {
            if !(d as u64).is_multiple_of(value) {
                return Err(MapError::Indivisible { darts: d, what, value });
            }
        }
        Ok(())
    }

    pub fn from_images(x: Vec<u32>, y: Vec<u32>) -> Result<OrientedMap, MapError> {
        let d = x.len();
        OrientedMap::validate(d, Perm::from_images(x)?, Perm::from_images(y)?)
    }

    /// `Map(G; X, Y)` for the permutation group `G = ⟨X, Y⟩` on a small point
    /// set, realised as its regular representation. Darts are group elements
    /// in breadth-first order from the identity (edge order x, x⁻¹, y, y⁻¹);
    /// dart `g` is sent by `x` to `gX`.
    pub fn from_generating_pair(gx: &Perm, gy: &Perm, limit: usize) -> Result<OrientedMap, MapError> {
        let (x, y) = regular_representation(gx, gy, limit)?;
        OrientedMap::from_regular_unchecked(x, y)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> OrientedMap {
        self.label = Some(label.into());
        self
    }

    pub fn without_label(mut self) -> OrientedMap {
        self.label = None;
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn darts(&self) -> usize {
        self.x.degree()
    }

    pub fn x(&self) -> &Perm {
        &self.x
    }

    pub fn y(&self) -> &Perm {
        &self.y
    }

    pub fn map_type(&self) -> MapType {
        MapType {
            m: self.x.order(),
            n: self.y.order(),
        }
    }

    pub fn census(&self) -> Census {
        let t = self.map_type();
        let d = self.darts() as u64;
        let vertices = d / t.n;
        let edges = d / 2;
        let faces = d / t.m;
        let chi = vertices as i64 - edges as i64 + faces as i64;
        assert!(
            chi % 2 == 0 && chi <= 2,
            "Euler characteristic {chi} of a validated map must be even and at most 2"
        );
        Census {
            vertices,
            edges,
            faces,
            euler_characteristic: chi,
            genus: ((2 - chi) / 2) as u64,
        }
    }

    /// Same darts with `x` and `y` swapped.
    pub fn dual(&self) -> OrientedMap {
        OrientedMap {
            x: self.y.clone(),
            y: self.x.clone(),
            label: self.label.as_ref().map(|l| format!("dual({l})")),
        }
    }

    /// `Map(G; x⁻¹, y⁻¹)`.
    pub fn mirror(&self) -> OrientedMap {
        OrientedMap {
            x: self.x.inverse(),
            y: self.y.inverse(),
            label: self.label.as_ref().map(|l| format!("mirror({l})")),
        }
    }

    /// Componentwise equality of the generator tables, ignoring labels.
    pub fn same_darts_and_generators(&self, other: &OrientedMap) -> bool {
        self.x == other.x && self.y == other.y
    }

    pub fn step(&self, dart: u32, letter: Letter) -> u32 {
        match letter {
            Letter::X => self.x.apply(dart),
            Letter::Y => self.y.apply(dart),
            // inverse lookups are linear scans; callers needing many should
            // precompute via `inverse_generators`
            Letter::XInv => self.x.inverse().apply(dart),
            Letter::YInv => self.y.inverse().apply(dart),
        }
    }

    pub fn inverse_generators(&self) -> (Perm, Perm) {
        (self.x.inverse(), self.y.inverse())
    }

    /// Evaluates a word at a dart, leftmost letter first.
    pub fn word_apply(&self, word: &Word, dart: u32) -> Result<u32, MapError> {
        if dart as usize >= self.darts() {
            return Err(MapError::DartOutOfRange {
                dart: dart as usize,
                darts: self.darts(),
            });
        }
        let (xi, yi) = self.inverse_generators();
        Ok(word.letters().iter().fold(dart, |p, l| match l {
            Letter::X => self.x.apply(p),
            Letter::XInv => xi.apply(p),
            Letter::Y => self.y.apply(p),
            Letter::YInv => yi.apply(p),
        }))
    }

    /// The permutation of darts induced by right multiplication with a word.
    pub fn word_perm(&self, word: &Word) -> Perm {
        let (xi, yi) = self.inverse_generators();
        let mut acc = Perm::identity(self.darts());
        for l in word.letters() {
            let g = match l {
                Letter::X => &self.x,
                Letter::XInv => &xi,
                Letter::Y => &self.y,
                Letter::YInv => &yi,
            };
            acc = compose(&acc, g).expect("same degree");
        }
        acc
    }
}

/// Propagates `src_base ↦ tgt_base` along the four generator edges in
/// breadth-first order (x, x⁻¹, y, y⁻¹). `tgt_x`, `tgt_y` are the target
/// generators paired with `src.x`, `src.y`. Returns the dart map or `None`
/// at the first inconsistency.
pub(crate) fn propagate(src: &OrientedMap, tgt_x: &Perm, tgt_y: &Perm, tgt_base: u32) -> Option<Vec<u32>> {
    const UNSET: u32 = u32::MAX;
    let d = src.darts();
    let (sxi, syi) = src.inverse_generators();
    let (txi, tyi) = (tgt_x.inverse(), tgt_y.inverse());
    let edges: [(&Perm, &Perm); 4] = [(&src.x, tgt_x), (&sxi, &txi), (&src.y, tgt_y), (&syi, &tyi)];
    let mut phi = vec![UNSET; d];
    phi[0] = tgt_base;
    let mut queue = VecDeque::with_capacity(d);
    queue.push_back(0u32);
    while let Some(a) = queue.pop_front() {
        let fa = phi[a as usize];
        for (s, t) in edges.iter() {
            let b = s.apply(a);
            let fb = t.apply(fa);
            match phi[b as usize] {
                UNSET => {
                    phi[b as usize] = fb;
                    queue.push_back(b);
                }
                existing if existing != fb => return None,
                _ => {}
            }
        }
    }
    // src is transitive, so every dart was reached and every edge checked.
    debug_assert!(phi.iter().all(|&v| v != UNSET));
    Some(phi)
}

/// The unique rooted morphism `src → tgt` sending dart 0 to dart 0, if any.
/// Maps of different types never admit one.
pub fn rooted_morphism(src: &OrientedMap, tgt: &OrientedMap) -> Option<RootedMorphism> {
    if src.map_type() != tgt.map_type() || !src.darts().is_multiple_of(tgt.darts()) {
        return None;
    }
    propagate(src, &tgt.x, &tgt.y, 0).map(RootedMorphism::from_images)
}

/// `m2` smoothly covers `m1`: same type and a rooted epimorphism `m2 → m1`.
pub fn is_smooth_cover(m2: &OrientedMap, m1: &OrientedMap) -> bool {
    m2.map_type() == m1.map_type() && rooted_morphism(m2, m1).is_some()
}

/// Basepoint exhaustion: tries every image `q` of dart 0 in increasing order.
pub fn unrooted_isomorphism(m1: &OrientedMap, m2: &OrientedMap) -> Option<RootedMorphism> {
    if m1.darts() != m2.darts() {
        return None;
    }
    (0..m2.darts() as u32).find_map(|q| {
        propagate(m1, &m2.x, &m2.y, q)
            .map(RootedMorphism::from_images)
            .filter(RootedMorphism::is_bijective)
    })
}

pub fn unrooted_isomorphic(m1: &OrientedMap, m2: &OrientedMap) -> bool {
    unrooted_isomorphism(m1, m2).is_some()
}

/// Reflexible iff the rooted propagation into the mirror succeeds, i.e. some
/// automorphism of `G` inverts both `x` and `y`.
pub fn is_reflexible(m: &OrientedMap) -> ChiralityReport {
    let (xi, yi) = m.inverse_generators();
    match propagate(m, &xi, &yi, 0) {
        Some(phi) => ChiralityReport {
            verdict: Chirality::Reflexible,
            witness: Some(RootedMorphism::from_images(phi)),
        },
        None => ChiralityReport {
            verdict: Chirality::Chiral,
            witness: None,
        },
    }
}

/// The chirality verdict of the quadratic basepoint-exhaustion test.
pub fn chirality_by_exhaustion(m: &OrientedMap) -> Chirality {
    if unrooted_isomorphic(m, &m.mirror()) {
        Chirality::Reflexible
    } else {
        Chirality::Chiral
    }
}

/// Regular representation of `⟨gx, gy⟩ ≤ Sym(r)`; see
/// [`OrientedMap::from_generating_pair`].
pub(crate) fn regular_representation(gx: &Perm, gy: &Perm, limit: usize) -> Result<(Perm, Perm), MapError> {
    let r = gx.degree();
    if gy.degree() != r {
        return Err(PermError::DegreeMismatch {
            left: r,
            right: gy.degree(),
        }
        .into());
    }
    if r <= 16 {
        closure_packed(gx, gy, limit)
    } else {
        closure_generic(gx, gy, limit)
    }
}

fn pack(images: &[u32]) -> u64 {
    images
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, &a)| acc | (a as u64) << (4 * i))
}

/// `g` then `s`, both packed with 4 bits per point.
#[inline]
fn packed_then(g: u64, s: &[u32], r: usize) -> u64 {
    let mut out = 0u64;
    for i in 0..r {
        let gi = (g >> (4 * i)) & 0xF;
        out |= (s[gi as usize] as u64) << (4 * i);
    }
    out
}

fn closure_packed(gx: &Perm, gy: &Perm, limit: usize) -> Result<(Perm, Perm), MapError> {
    let r = gx.degree();
    let (gxi, gyi) = (gx.inverse(), gy.inverse());
    let gens = [gx.images(), gxi.images(), gy.images(), gyi.images()];
    let identity = pack(&(0..r as u32).collect::<Vec<_>>());
    let mut index: HashMap<u64, u32> = HashMap::new();
    let mut elements = vec![identity];
    index.insert(identity, 0);
    let mut x_img = Vec::new();
    let mut y_img = Vec::new();
    let mut head = 0;
    while head < elements.len() {
        let g = elements[head];
        head += 1;
        for (k, s) in gens.iter().enumerate() {
            let h = packed_then(g, s, r);
            let next = elements.len() as u32;
            let id = *index.entry(h).or_insert(next);
            if id == next {
                if elements.len() >= limit {
                    return Err(MapError::GroupTooLarge { limit });
                }
                elements.push(h);
            }
            match k {
                0 => x_img.push(id),
                2 => y_img.push(id),
                _ => {}
            }
        }
    }
    Ok((Perm::from_images_unchecked(x_img), Perm::from_images_unchecked(y_img)))
}

fn closure_generic(gx: &Perm, gy: &Perm, limit: usize) -> Result<(Perm, Perm), MapError> {
    let r = gx.degree();
    let (gxi, gyi) = (gx.inverse(), gy.inverse());
    let gens = [gx, &gxi, gy, &gyi];
    let mut index: HashMap<Perm, u32> = HashMap::new();
    let mut elements = vec![Perm::identity(r)];
    index.insert(Perm::identity(r), 0);
    let mut x_img = Vec::new();
    let mut y_img = Vec::new();
    let mut head = 0;
    while head < elements.len() {
        let g = elements[head].clone();
        head += 1;
        for (k, s) in gens.iter().enumerate() {
            let h = compose(&g, s)?;
            let next = elements.len() as u32;
            let id = match index.get(&h) {
                Some(&id) => id,
                None => {
                    if elements.len() >= limit {
                        return Err(MapError::GroupTooLarge { limit });
                    }
                    index.insert(h.clone(), next);
                    elements.push(h);
                    next
                }
            };
            match k {
                0 => x_img.push(id),
                2 => y_img.push(id),
                _ => {}
            }
        }
    }
    Ok((Perm::from_images_unchecked(x_img), Perm::from_images_unchecked(y_img)))
}

/// Order of `⟨gens⟩` by element closure, or `None` once it exceeds `limit`.
pub fn group_order(gens: &[Perm], limit: usize) -> Option<usize> {
    let r = gens.first()?.degree();
    let mut all: Vec<Perm> = gens.to_vec();
    all.extend(gens.iter().map(Perm::inverse));
    if r <= 16 {
        let packed: Vec<&[u32]> = all.iter().map(Perm::images).collect();
        let id = pack(&(0..r as u32).collect::<Vec<_>>());
        let mut seen = std::collections::HashSet::from([id]);
        let mut queue = vec![id];
        let mut head = 0;
        while head < queue.len() {
            let g = queue[head];
            head += 1;
            for s in &packed {
                let h = packed_then(g, s, r);
                if seen.insert(h) {
                    if seen.len() > limit {
                        return None;
                    }
                    queue.push(h);
                }
            }
        }
        Some(seen.len())
    } else {
        let mut seen = std::collections::HashSet::from([Perm::identity(r)]);
        let mut queue = vec![Perm::identity(r)];
        let mut head = 0;
        while head < queue.len() {
            let g = queue[head].clone();
            head += 1;
            for s in &all {
                let h = compose(&g, s).ok()?;
                if seen.insert(h.clone()) {
                    if seen.len() > limit {
                        return None;
                    }
                    queue.push(h);
                }
            }
        }
        Some(seen.len())
    }
}
