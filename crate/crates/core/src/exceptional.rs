//! Exceptional maps: maps whose group has the index-2 subgroup `H`, the image
//! of one of the three index-2 subgroups of the `(m, n, 2)` triangle group.
//!
//! * type A, `Γ(X, Y²)` (n even): `H = ⟨u, v⟩` with `u = y x y⁻¹`, `v = y²`;
//! * type B, `Γ(X², Y²)` (m, n even): `H = ⟨u, v, w⟩` with `u = x y⁻¹`,
//!   `v = y²`, `w = y x`;
//! * dual A, `Γ(X², Y)` (m even): type A applied to the dual map.
//!
//! `H` is stored as the set of darts `0·h`, `h ∈ H`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::map::{propagate, Letter, OrientedMap, RootedMorphism, Word};
use crate::perm::{self, compose, GeneratorSet, Perm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GammaType {
    A,
    B,
    #[serde(rename = "dualA")]
    DualA,
}

impl GammaType {
    pub const ALL: [GammaType; 3] = [GammaType::A, GammaType::B, GammaType::DualA];

    pub fn applies_to(self, m: u64, n: u64) -> bool {
        match self {
            GammaType::A => n.is_multiple_of(2),
            GammaType::B => m.is_multiple_of(2) && n.is_multiple_of(2),
            GammaType::DualA => m.is_multiple_of(2),
        }
    }
}

impl fmt::Display for GammaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GammaType::A => "A",
            GammaType::B => "B",
            GammaType::DualA => "dualA",
        })
    }
}

impl FromStr for GammaType {
    type Err = String;

    fn from_str(s: &str) -> Result<GammaType, String> {
        match s {
            "A" | "a" => Ok(GammaType::A),
            "B" | "b" => Ok(GammaType::B),
            "dualA" | "dual-A" | "DualA" | "duala" => Ok(GammaType::DualA),
            other => Err(format!("unknown Γ-type {other:?}; expected A, B or dualA")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExceptionalError {
    #[error("Γ-type {gamma_type} needs {needs}, but the map has type {{{m},{n}}}")]
    ParityViolation {
        gamma_type: GammaType,
        needs: &'static str,
        m: u64,
        n: u64,
    },
    #[error("map is not {0}-exceptional")]
    NotExceptional(GammaType),
    #[error("malformed θ: {0}")]
    MalformedTheta(String),
    #[error("H has index {index}, which is impossible for an even-word subgroup")]
    ImpossibleIndex { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionalReport {
    pub gamma_type: GammaType,
    pub exceptional: bool,
    /// Darts of `H`, in breadth-first discovery order from dart 0.
    pub h_orbit: Vec<u32>,
    pub index: usize,
    pub u: u32,
    pub v: u32,
    pub w: Option<u32>,
    pub presentation_ok: bool,
}

impl ExceptionalReport {
    pub fn h_order(&self) -> usize {
        self.h_orbit.len()
    }
}

/// The generator words of `H` and the words prescribed for their images
/// under θ, over the generators `(a, b)` of the map they are evaluated in:
/// `(x, y)` for types A and B, `(y, x)` of the original map for dual A.
struct Scheme {
    gens: Vec<Word>,
    theta: Vec<Word>,
}

fn w(s: &str) -> Word {
    s.parse().expect("static word")
}

fn scheme(t: GammaType) -> Scheme {
    match t {
        // u = y x y⁻¹, v = y²; uθ = v⁻¹u⁻¹v = y⁻¹x⁻¹y, vθ = v⁻¹
        GammaType::A | GammaType::DualA => Scheme {
            gens: vec![w("y x y⁻¹"), w("y y")],
            theta: vec![w("y⁻¹ y⁻¹ y x⁻¹ y⁻¹ y y"), w("y⁻¹ y⁻¹")],
        },
        // u = x y⁻¹, v = y², w = y x; uθ = wv, vθ = v⁻¹, wθ = uv
        GammaType::B => Scheme {
            gens: vec![w("x y⁻¹"), w("y y"), w("y x")],
            theta: vec![w("y x y y"), w("y⁻¹ y⁻¹"), w("x y⁻¹ y y")],
        },
    }
}

/// The map whose (x, y) play the roles of the words: the dual for dual A.
/// Darts are shared, so every dart-level result transfers unchanged.
fn working_map(m: &OrientedMap, t: GammaType) -> OrientedMap {
    match t {
        GammaType::DualA => m.dual(),
        _ => m.clone(),
    }
}

fn check_parity(m: &OrientedMap, t: GammaType) -> Result<(), ExceptionalError> {
    let ty = m.map_type();
    if t.applies_to(ty.m, ty.n) {
        Ok(())
    } else {
        Err(ExceptionalError::ParityViolation {
            gamma_type: t,
            needs: match t {
                GammaType::A => "n even",
                GammaType::B => "m and n even",
                GammaType::DualA => "m even",
            },
            m: ty.m,
            n: ty.n,
        })
    }
}

fn divides(order: u64, exponent: u64) -> bool {
    exponent.is_multiple_of(order)
}

pub fn exceptional_report(m: &OrientedMap, t: GammaType) -> Result<ExceptionalReport, ExceptionalError> {
    check_parity(m, t)?;
    let wm = working_map(m, t);
    let ty = wm.map_type();
    let sc = scheme(t);
    let gens: Vec<Perm> = sc.gens.iter().map(|g| wm.word_perm(g)).collect();
    let orbit = perm::orbit(&gens, 0).expect("generators share the map degree");
    let d = m.darts();
    if !d.is_multiple_of(orbit.len()) || !(1..=2).contains(&(d / orbit.len())) {
        return Err(ExceptionalError::ImpossibleIndex { index: d / orbit.len() });
    }
    let index = d / orbit.len();
    let ord = |p: &Perm| p.order();
    let presentation_ok = match t {
        GammaType::A | GammaType::DualA => {
            let uv = compose(&gens[0], &gens[1]).expect("same degree");
            divides(ord(&gens[0]), ty.m) && divides(ord(&gens[1]), ty.n / 2) && divides(ord(&uv), ty.m)
        }
        GammaType::B => {
            let uw = compose(&gens[0], &gens[2]).expect("same degree");
            let uv = compose(&gens[0], &gens[1]).expect("same degree");
            divides(ord(&uw), ty.m / 2)
                && divides(ord(&gens[1]), ty.n / 2)
                && divides(ord(&uv), 2)
                && divides(ord(&gens[2]), 2)
        }
    };
    Ok(ExceptionalReport {
        gamma_type: t,
        exceptional: index == 2,
        h_orbit: orbit.members().to_vec(),
        index,
        u: gens[0].apply(0),
        v: gens[1].apply(0),
        w: gens.get(2).map(|g| g.apply(0)),
        presentation_ok,
    })
}

/// An automorphism θ of `H` as a dart map on the `H`-orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theta {
    pub gamma_type: GammaType,
    /// Full-length table; darts outside `H` map to `u32::MAX`.
    images: Vec<u32>,
}

impl Theta {
    pub fn get(&self, dart: u32) -> Option<u32> {
        self.images.get(dart as usize).copied().filter(|&v| v != u32::MAX)
    }

    pub fn domain_size(&self) -> usize {
        self.images.iter().filter(|&&v| v != u32::MAX).count()
    }
}

/// Builds θ on `H` from the prescribed generator images by rooted
/// propagation over the `H`-orbit; `None` when the prescription is not a
/// well-defined bijective homomorphism.
pub fn try_theta(m: &OrientedMap, t: GammaType) -> Result<Option<Theta>, ExceptionalError> {
    let report = exceptional_report(m, t)?;
    if !report.exceptional {
        return Err(ExceptionalError::NotExceptional(t));
    }
    let wm = working_map(m, t);
    let sc = scheme(t);
    let gens: Vec<Perm> = sc.gens.iter().map(|g| wm.word_perm(g)).collect();
    let images: Vec<Perm> = sc.theta.iter().map(|g| wm.word_perm(g)).collect();
    let src = GeneratorSet::new(&gens).expect("same degree");
    let tgt = GeneratorSet::new(&images).expect("same degree");
    const UNSET: u32 = u32::MAX;
    let d = m.darts();
    let mut phi = vec![UNSET; d];
    phi[0] = 0;
    let mut queue = std::collections::VecDeque::from([0u32]);
    while let Some(a) = queue.pop_front() {
        let fa = phi[a as usize];
        for (s, g) in src.edges() {
            let b = g.apply(a);
            let fb = tgt.step(fa, s);
            match phi[b as usize] {
                UNSET => {
                    phi[b as usize] = fb;
                    queue.push_back(b);
                }
                existing if existing != fb => return Ok(None),
                _ => {}
            }
        }
    }
    // injective on H (and H-valued, since every image word lies in H)
    let in_h: Vec<bool> = {
        let mut v = vec![false; d];
        for &h in &report.h_orbit {
            v[h as usize] = true;
        }
        v
    };
    let mut hit = vec![false; d];
    for &h in &report.h_orbit {
        let img = phi[h as usize] as usize;
        if !in_h[img] || hit[img] {
            return Ok(None);
        }
        hit[img] = true;
    }
    Ok(Some(Theta {
        gamma_type: t,
        images: phi,
    }))
}

/// Extends θ to `G` by `(h y)θ = (hθ) y⁻¹` and checks that the result is an
/// automorphism inverting both generators, i.e. a rooted morphism
/// `M → mirror(M)`. For dual A the stem generator is `x`.
pub fn extend_theta(m: &OrientedMap, t: GammaType, theta: &Theta) -> Result<Option<RootedMorphism>, ExceptionalError> {
    if theta.gamma_type != t {
        return Err(ExceptionalError::MalformedTheta(format!(
            "θ was built for type {}, not {t}",
            theta.gamma_type
        )));
    }
    let d = m.darts();
    if theta.images.len() != d {
        return Err(ExceptionalError::MalformedTheta(format!(
            "θ has {} entries for a map with {d} darts",
            theta.images.len()
        )));
    }
    let wm = working_map(m, t);
    let stem = wm.y();
    let stem_inv = stem.inverse();
    let mut phi = theta.images.clone();
    for (p, slot) in phi.iter_mut().enumerate() {
        if *slot != u32::MAX {
            continue;
        }
        let h = stem_inv.apply(p as u32);
        let Some(h_img) = theta.get(h) else {
            return Err(ExceptionalError::MalformedTheta(format!(
                "dart {p} is neither in H nor in H·y"
            )));
        };
        *slot = stem_inv.apply(h_img);
    }
    let (xi, yi) = m.inverse_generators();
    let ok = (0..d as u32).all(|p| {
        phi[m.x().apply(p) as usize] == xi.apply(phi[p as usize])
            && phi[m.y().apply(p) as usize] == yi.apply(phi[p as usize])
    });
    let morphism = RootedMorphism::from_images(phi);
    Ok((ok && morphism.is_bijective()).then_some(morphism))
}

/// The full chain try θ then extend; `Ok(None)` if either stage fails.
pub fn theta_chain(m: &OrientedMap, t: GammaType) -> Result<Option<RootedMorphism>, ExceptionalError> {
    match try_theta(m, t)? {
        Some(theta) => extend_theta(m, t, &theta),
        None => Ok(None),
    }
}

/// The generator-inverting automorphism restricted to `H`, for comparison
/// with [`try_theta`]; built independently by propagation into the mirror.
pub fn restricted_inverting_automorphism(m: &OrientedMap, t: GammaType) -> Option<Vec<(u32, u32)>> {
    let (xi, yi) = m.inverse_generators();
    let tau = propagate(m, &xi, &yi, 0)?;
    let report = exceptional_report(m, t).ok()?;
    Some(report.h_orbit.iter().map(|&h| (h, tau[h as usize])).collect())
}

/// Parity of `Y` (and of `X`) letters in a word; the generator words of `H`
/// have even counts of every letter the subgroup type requires.
pub fn letter_parity(word: &Word) -> (usize, usize) {
    word.letters().iter().fold((0, 0), |(xs, ys), l| match l {
        Letter::X | Letter::XInv => (xs + 1, ys),
        Letter::Y | Letter::YInv => (xs, ys + 1),
    })
}

/// Generator words of `H` for a Γ-type, over the working map's (x, y).
pub fn generator_words(t: GammaType) -> Vec<Word> {
    scheme(t).gens
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{is_reflexible, Chirality};
    use crate::seed::{catalog_get, torus_map_44};

    #[test]
    fn parity_violation() {
        let tetra = catalog_get("tetrahedron").unwrap().map;
        assert!(matches!(
            exceptional_report(&tetra, GammaType::A),
            Err(ExceptionalError::ParityViolation { .. })
        ));
        assert!(matches!(
            exceptional_report(&tetra, GammaType::B),
            Err(ExceptionalError::ParityViolation { .. })
        ));
    }

    #[test]
    fn generator_words_have_even_letter_counts() {
        for g in generator_words(GammaType::A) {
            assert_eq!(letter_parity(&g).1 % 2, 0, "{g}");
        }
        for g in generator_words(GammaType::B) {
            let (xs, ys) = letter_parity(&g);
            assert_eq!((xs + ys) % 2, 0, "{g}");
        }
    }

    #[test]
    fn type_a_relation_uv_is_x_inverse() {
        let m = torus_map_44(1, 1).unwrap();
        let r = exceptional_report(&m, GammaType::A).unwrap();
        let u = m.word_perm(&"y x y⁻¹".parse().unwrap());
        let v = m.word_perm(&"y y".parse().unwrap());
        assert_eq!(v.apply(u.apply(0)), m.x().inverse().apply(0));
        assert_eq!(r.u, u.apply(0));
        assert!(r.presentation_ok);
    }

    #[test]
    fn non_exceptional_is_rejected_by_try_theta() {
        // cube {4,3}: n odd so only dual A applies.
        let cube = catalog_get("cube").unwrap().map;
        let r = exceptional_report(&cube, GammaType::DualA).unwrap();
        if !r.exceptional {
            assert_eq!(
                try_theta(&cube, GammaType::DualA),
                Err(ExceptionalError::NotExceptional(GammaType::DualA))
            );
        }
    }

    #[test]
    fn torus_chain_matches_chirality() {
        for (b, c) in [(1, 0), (1, 1), (2, 0), (2, 1), (3, 1), (2, 2)] {
            let m = torus_map_44(b, c).unwrap();
            let verdict = is_reflexible(&m).verdict;
            for t in GammaType::ALL {
                let r = exceptional_report(&m, t).unwrap();
                assert!(r.presentation_ok);
                if !r.exceptional {
                    continue;
                }
                let chain = theta_chain(&m, t).unwrap();
                if chain.is_some() {
                    assert_eq!(verdict, Chirality::Reflexible);
                }
                if verdict == Chirality::Reflexible {
                    assert!(try_theta(&m, t).unwrap().is_some(), "({b},{c}) {t}");
                    let ext = chain.expect("extension of a restricted reflection");
                    assert_eq!(Some(ext), is_reflexible(&m).witness);
                }
            }
        }
    }

    #[test]
    fn malformed_theta() {
        let m = torus_map_44(2, 0).unwrap();
        let th = try_theta(&m, GammaType::A).unwrap().unwrap();
        assert!(matches!(
            extend_theta(&m, GammaType::B, &th),
            Err(ExceptionalError::MalformedTheta(_))
        ));
        let other = torus_map_44(1, 0).unwrap();
        assert!(matches!(
            extend_theta(&other, GammaType::A, &th),
            Err(ExceptionalError::MalformedTheta(_))
        ));
    }
}
