//! Raw material for the cover pipeline: torus families, the named catalog,
//! and the search for chiral maps with symmetric or alternating groups.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::{parse_map_str, MapFileError};
use crate::map::{chirality_by_exhaustion, group_order, is_reflexible, Chirality, MapError, MapType, OrientedMap};
use crate::perm::{compose, involutions, orbit, Perm};

/// Largest `b² + c²` (resp. `b² + bc + c²`) accepted by the torus constructors.
pub const TORUS_NORM_LIMIT: u64 = 250_000;

/// Maps up to this many darts get the quadratic basepoint oracle as a second
/// opinion on chirality.
pub const ORACLE_DART_LIMIT: usize = 5000;

#[derive(Debug, Error)]
pub enum SeedError {
    #[error("torus parameters must not both be zero")]
    ZeroTorus,
    #[error("torus norm {norm} exceeds the limit {limit}")]
    TorusTooLarge { norm: u64, limit: u64 },
    #[error("unknown catalog entry {0:?}")]
    UnknownName(String),
    #[error("catalog entry {name}: recorded {field} {recorded} but recomputed {actual}")]
    PropertyDrift {
        name: String,
        field: &'static str,
        recorded: String,
        actual: String,
    },
    #[error("catalog entry {name}: {source}")]
    CatalogFile {
        name: String,
        #[source]
        source: MapFileError,
    },
    #[error("invalid search request: {0}")]
    InvalidRequest(String),
    #[error("type {0} is not hyperbolic")]
    NotHyperbolic(MapType),
    #[error("no chiral seed of type {map_type} with degree ≤ {r_max} after {examined} candidate pairs")]
    Exhausted {
        map_type: MapType,
        r_max: usize,
        examined: u64,
    },
    #[error(transparent)]
    Map(#[from] MapError),
}

// ---------------------------------------------------------------------------
// torus maps

/// Hermite basis `{(a, 0), (b, d)}` of a full-rank sublattice of `Z²`, used
/// to reduce points to canonical representatives in `[0, a) × [0, d)`.
#[derive(Debug, Clone, Copy)]
struct Lattice {
    a: i64,
    b: i64,
    d: i64,
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, s, t) = ext_gcd(b, a.rem_euclid(b));
        (g, t, s - (a.div_euclid(b)) * t)
    }
}

impl Lattice {
    fn from_basis(v1: (i64, i64), v2: (i64, i64)) -> Lattice {
        let det = (v1.0 * v2.1 - v1.1 * v2.0).abs();
        let (d, s, t) = ext_gcd(v1.1, v2.1);
        let a = det / d;
        let b = (s * v1.0 + t * v2.0).rem_euclid(a);
        Lattice { a, b, d }
    }

    fn index(&self) -> i64 {
        self.a * self.d
    }

    fn reduce(&self, p: (i64, i64)) -> (i64, i64) {
        let k = p.1.div_euclid(self.d);
        let q = p.1 - k * self.d;
        let x = (p.0 - k * self.b).rem_euclid(self.a);
        (x, q)
    }

    fn id(&self, p: (i64, i64)) -> u32 {
        let (x, q) = self.reduce(p);
        (q * self.a + x) as u32
    }
}

/// A regular map on the torus: vertices `Z²/Λ`, darts `(vertex, direction)`.
/// `y` turns the direction by one step, the edge involution `t` moves along
/// the direction and reverses it, and `x` is defined by `p·x = (p·t)·y⁻¹`.
fn torus_map(lattice: Lattice, directions: &[(i64, i64)]) -> Result<OrientedMap, SeedError> {
    let k = directions.len();
    let verts = lattice.index() as usize;
    let d = verts * k;
    let mut coords = vec![(0i64, 0i64); verts];
    for q in 0..lattice.d {
        for x in 0..lattice.a {
            coords[lattice.id((x, q)) as usize] = (x, q);
        }
    }
    let mut x = vec![0u32; d];
    let mut y = vec![0u32; d];
    for (v, &(px, py)) in coords.iter().enumerate() {
        for (dir, &(ex, ey)) in directions.iter().enumerate().take(k) {
            let dart = v * k + dir;
            y[dart] = (v * k + (dir + 1) % k) as u32;
            let w = lattice.id((px + ex, py + ey)) as usize;
            // t lands on (w, dir + k/2); then y⁻¹
            let back = (dir + k / 2 + k - 1) % k;
            x[dart] = (w * k + back) as u32;
        }
    }
    Ok(OrientedMap::from_images(x, y)?)
}

/// Type `{4,4}` torus map with lattice `⟨(b, c), (−c, b)⟩`, `4(b² + c²)` darts.
pub fn torus_map_44(b: u64, c: u64) -> Result<OrientedMap, SeedError> {
    if b == 0 && c == 0 {
        return Err(SeedError::ZeroTorus);
    }
    let norm = b * b + c * c;
    if norm > TORUS_NORM_LIMIT {
        return Err(SeedError::TorusTooLarge {
            norm,
            limit: TORUS_NORM_LIMIT,
        });
    }
    let (b, c) = (b as i64, c as i64);
    let lattice = Lattice::from_basis((b, c), (-c, b));
    let dirs = [(1, 0), (0, 1), (-1, 0), (0, -1)];
    Ok(torus_map(lattice, &dirs)?.with_label(format!("torus-44-{b}-{c}")))
}

/// Type `{3,6}` torus map on the triangular lattice with basis `1, ω`
/// (`ω` a primitive sixth root of unity), `Λ = ⟨(b, c), (−c, b + c)⟩`,
/// `6(b² + bc + c²)` darts.
pub fn torus_map_36(b: u64, c: u64) -> Result<OrientedMap, SeedError> {
    if b == 0 && c == 0 {
        return Err(SeedError::ZeroTorus);
    }
    let norm = b * b + b * c + c * c;
    if norm > TORUS_NORM_LIMIT {
        return Err(SeedError::TorusTooLarge {
            norm,
            limit: TORUS_NORM_LIMIT,
        });
    }
    let (b, c) = (b as i64, c as i64);
    let lattice = Lattice::from_basis((b, c), (-c, b + c));
    let dirs = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];
    Ok(torus_map(lattice, &dirs)?.with_label(format!("torus-36-{b}-{c}")))
}

// ---------------------------------------------------------------------------
// catalog

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RecordedProperties {
    #[serde(rename = "type")]
    pub map_type: (u64, u64),
    pub darts: usize,
    pub genus: u64,
    pub chirality: Chirality,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub file: String,
    pub provenance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generating_pair: Option<(Vec<u32>, Vec<u32>)>,
    pub expected: RecordedProperties,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub map: OrientedMap,
    pub provenance: String,
    pub generating_pair: Option<(Perm, Perm)>,
    pub expected: RecordedProperties,
}

const MANIFEST: &str = include_str!("../data/catalog/manifest.json");

fn catalog_file(file: &str) -> Option<&'static str> {
    Some(match file {
        "tetrahedron.json" => include_str!("../data/catalog/tetrahedron.json"),
        "cube.json" => include_str!("../data/catalog/cube.json"),
        "octahedron.json" => include_str!("../data/catalog/octahedron.json"),
        "dodecahedron.json" => include_str!("../data/catalog/dodecahedron.json"),
        "icosahedron.json" => include_str!("../data/catalog/icosahedron.json"),
        "klein-quartic.json" => include_str!("../data/catalog/klein-quartic.json"),
        "torus-44-1-0.json" => include_str!("../data/catalog/torus-44-1-0.json"),
        "torus-44-2-1.json" => include_str!("../data/catalog/torus-44-2-1.json"),
        "torus-36-1-1.json" => include_str!("../data/catalog/torus-36-1-1.json"),
        "torus-36-2-1.json" => include_str!("../data/catalog/torus-36-2-1.json"),
        "macbeath.json" => include_str!("../data/catalog/macbeath.json"),
        "s4xc2-46.json" => include_str!("../data/catalog/s4xc2-46.json"),
        "s5-56.json" => include_str!("../data/catalog/s5-56.json"),
        "s5-46.json" => include_str!("../data/catalog/s5-46.json"),
        _ => return None,
    })
}

pub fn catalog_manifest() -> Vec<ManifestEntry> {
    serde_json::from_str(MANIFEST).expect("shipped manifest is valid JSON")
}

pub fn catalog_names() -> Vec<String> {
    catalog_manifest().into_iter().map(|e| e.name).collect()
}

pub fn recompute_properties(map: &OrientedMap) -> RecordedProperties {
    let t = map.map_type();
    RecordedProperties {
        map_type: (t.m, t.n),
        darts: map.darts(),
        genus: map.census().genus,
        chirality: is_reflexible(map).verdict,
    }
}

/// Loads an entry, re-validates its map and re-checks every recorded property.
pub fn catalog_get(name: &str) -> Result<CatalogEntry, SeedError> {
    let entry = catalog_manifest()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| SeedError::UnknownName(name.to_string()))?;
    let text = catalog_file(&entry.file).ok_or_else(|| SeedError::UnknownName(name.to_string()))?;
    let map = parse_map_str(text).map_err(|source| SeedError::CatalogFile {
        name: name.to_string(),
        source,
    })?;
    let actual = recompute_properties(&map);
    let e = &entry.expected;
    let drift = |field: &'static str, recorded: String, actual: String| SeedError::PropertyDrift {
        name: name.to_string(),
        field,
        recorded,
        actual,
    };
    if e.map_type != actual.map_type {
        return Err(drift(
            "type",
            format!("{:?}", e.map_type),
            format!("{:?}", actual.map_type),
        ));
    }
    if e.darts != actual.darts {
        return Err(drift("darts", e.darts.to_string(), actual.darts.to_string()));
    }
    if e.genus != actual.genus {
        return Err(drift("genus", e.genus.to_string(), actual.genus.to_string()));
    }
    if e.chirality != actual.chirality {
        return Err(drift(
            "chirality",
            e.chirality.to_string(),
            actual.chirality.to_string(),
        ));
    }
    let generating_pair = match &entry.generating_pair {
        Some((gx, gy)) => Some((
            Perm::from_images(gx.clone()).map_err(MapError::from)?,
            Perm::from_images(gy.clone()).map_err(MapError::from)?,
        )),
        None => None,
    };
    Ok(CatalogEntry {
        name: entry.name,
        map,
        provenance: entry.provenance,
        generating_pair,
        expected: entry.expected,
    })
}

// ---------------------------------------------------------------------------
// generating pairs of symmetric and alternating groups

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupTag {
    Alternating,
    Symmetric,
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupTag::Alternating => "alternating",
            GroupTag::Symmetric => "symmetric",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingPair {
    pub degree: usize,
    pub x: Perm,
    pub y: Perm,
    pub group: GroupTag,
}

impl GeneratingPair {
    /// Canonical encoding; the stream is sorted by `(degree, encoding)`.
    pub fn encoding(&self) -> (Vec<u32>, Vec<u32>) {
        (self.x.images().to_vec(), self.y.images().to_vec())
    }
}

fn factorial(r: usize) -> u64 {
    (1..=r as u64).product()
}

/// Partitions of `r` into parts dividing `m` whose lcm is exactly `m`,
/// parts non-increasing; each yields one representative `x`.
fn cycle_types_of_order(r: usize, m: u64) -> Vec<Vec<usize>> {
    fn rec(rest: usize, max: usize, m: u64, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            let l = cur.iter().fold(1u64, |acc, &p| crate::perm::lcm(acc, p as u64));
            if l == m {
                out.push(cur.clone());
            }
            return;
        }
        for part in (1..=max.min(rest)).rev() {
            if m.is_multiple_of(part as u64) {
                cur.push(part);
                rec(rest - part, part, m, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(r, r, m, &mut Vec::new(), &mut out);
    out
}

fn representative(r: usize, cycle_type: &[usize]) -> Perm {
    let mut images: Vec<u32> = (0..r as u32).collect();
    let mut start = 0;
    for &len in cycle_type {
        for i in 0..len {
            images[start + i] = (start + (i + 1) % len) as u32;
        }
        start += len;
    }
    Perm::from_images_unchecked(images)
}

/// Calls `f` with every element of the centralizer of `x` until it returns
/// `false`. Centralizing elements permute equal-length cycles and rotate them.
fn for_each_centralizer_element(x: &Perm, mut f: impl FnMut(&Perm) -> bool) {
    let cycles = x.cycles();
    let r = x.degree();
    fn rec(
        i: usize,
        cycles: &[Vec<u32>],
        used: &mut Vec<bool>,
        images: &mut Vec<u32>,
        f: &mut dyn FnMut(&Perm) -> bool,
    ) -> bool {
        if i == cycles.len() {
            return f(&Perm::from_images_unchecked(images.clone()));
        }
        let src = &cycles[i];
        for j in 0..cycles.len() {
            if used[j] || cycles[j].len() != src.len() {
                continue;
            }
            used[j] = true;
            let tgt = &cycles[j];
            for shift in 0..tgt.len() {
                for (k, &p) in src.iter().enumerate() {
                    images[p as usize] = tgt[(k + shift) % tgt.len()];
                }
                if !rec(i + 1, cycles, used, images, f) {
                    used[j] = false;
                    return false;
                }
            }
            used[j] = false;
        }
        true
    }
    let mut used = vec![false; cycles.len()];
    let mut images: Vec<u32> = (0..r as u32).collect();
    rec(0, &cycles, &mut used, &mut images, &mut f);
}

/// `y` is the lexicographically least member of its class under
/// conjugation by the centralizer of `x`.
fn is_centralizer_canonical(x: &Perm, y: &Perm) -> bool {
    let mut canonical = true;
    for_each_centralizer_element(x, |c| {
        if y.conjugate_by(c) < *y {
            canonical = false;
        }
        canonical
    });
    canonical
}

fn is_transitive(x: &Perm, y: &Perm) -> bool {
    orbit(&[x.clone(), y.clone()], 0)
        .map(|o| o.len() == x.degree())
        .unwrap_or(false)
}

/// Atkinson's block test: transitive `⟨gens⟩` is primitive iff the minimal
/// block containing `{0, b}` is everything for every `b ≠ 0`.
fn is_primitive(gens: &[&Perm]) -> bool {
    let r = gens[0].degree();
    fn find(parent: &mut [usize], a: usize) -> usize {
        let mut a = a;
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    for b in 1..r {
        let mut parent: Vec<usize> = (0..r).collect();
        let mut pending = vec![(0usize, b)];
        let mut classes = r;
        while let Some((p, q)) = pending.pop() {
            let (rp, rq) = (find(&mut parent, p), find(&mut parent, q));
            if rp == rq {
                continue;
            }
            parent[rq] = rp;
            classes -= 1;
            for g in gens {
                pending.push((g.apply(p as u32) as usize, g.apply(q as u32) as usize));
            }
        }
        if classes > 1 {
            return false;
        }
    }
    true
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..p).take_while(|k| k * k <= p).all(|k| !p.is_multiple_of(k))
}

/// Searches a bounded set of group elements for one with a power that is a
/// single `p`-cycle, `p` prime and `p ≤ r − 3`. Together with primitivity
/// this certifies `A_r ≤ ⟨x, y⟩` (Jordan).
fn jordan_certificate(x: &Perm, y: &Perm) -> Option<(Perm, usize)> {
    let r = x.degree();
    if r < 5 {
        return None;
    }
    let primes: Vec<usize> = (2..=r - 3).filter(|&p| is_prime(p)).collect();
    let gens = [x.clone(), x.inverse(), y.clone(), y.inverse()];
    let mut seen = std::collections::HashSet::new();
    let mut queue = vec![Perm::identity(r)];
    seen.insert(Perm::identity(r));
    let mut head = 0;
    while head < queue.len() && head < 512 {
        let g = queue[head].clone();
        head += 1;
        let lens = g.cycle_type();
        for &p in &primes {
            let divisible: Vec<usize> = lens.iter().copied().filter(|l| l % p == 0).collect();
            // a longer cycle would power down to several p-cycles, not one
            if divisible == [p] {
                let others = lens
                    .iter()
                    .filter(|l| *l % p != 0)
                    .fold(1u64, |acc, &l| crate::perm::lcm(acc, l as u64));
                return Some((g.pow(others as i64), p));
            }
        }
        for s in &gens {
            let h = compose(&g, s).expect("same degree");
            if seen.insert(h.clone()) {
                queue.push(h);
            }
        }
    }
    None
}

/// Decides whether a transitive `⟨x, y⟩` is `A_r` or `S_r`.
/// Exact for `r ≤ 9` (certificate, else closure); for larger `r` only
/// certified groups are accepted.
fn identify_group(x: &Perm, y: &Perm) -> Option<GroupTag> {
    let r = x.degree();
    let tag = if x.is_even() && y.is_even() {
        GroupTag::Alternating
    } else {
        GroupTag::Symmetric
    };
    if !is_primitive(&[x, y]) {
        return None;
    }
    if jordan_certificate(x, y).is_some() {
        return Some(tag);
    }
    if r <= 9 {
        let target = match tag {
            GroupTag::Alternating => factorial(r) / 2,
            GroupTag::Symmetric => factorial(r),
        };
        let order = group_order(&[x.clone(), y.clone()], target as usize)?;
        return (order as u64 == target).then_some(tag);
    }
    None
}

/// All canonical generating pairs `(x, y)` of `A_r` / `S_r` with
/// `order(x) = m`, `order(y) = n`, `order(xy) = 2`, for one representative `x`.
fn pairs_for_representative(x: &Perm, m: u64, n: u64) -> Vec<GeneratingPair> {
    let r = x.degree();
    let xi = x.inverse();
    debug_assert_eq!(x.order(), m);
    let mut out: Vec<GeneratingPair> = involutions(r)
        .into_par_iter()
        .filter_map(|t| {
            // xy = t  ⟺  y = x⁻¹ t
            let y = compose(&xi, &t).expect("same degree");
            if y.order() != n || !is_transitive(x, &y) || !is_centralizer_canonical(x, &y) {
                return None;
            }
            let group = identify_group(x, &y)?;
            Some(GeneratingPair {
                degree: r,
                x: x.clone(),
                y,
                group,
            })
        })
        .collect();
    out.sort_by(|a, b| a.y.images().cmp(b.y.images()));
    out
}

/// Generating pairs of `A_r` or `S_r` of type `(m, n, 2)` on `r` points, one
/// `x` per cycle type and `y` up to conjugation by the centralizer of `x`,
/// in increasing canonical encoding. Lazily evaluated per representative.
pub fn enumerate_generating_pairs(r: usize, m: u64, n: u64) -> Result<impl Iterator<Item = GeneratingPair>, SeedError> {
    if r < 5 {
        return Err(SeedError::InvalidRequest(format!("degree {r} < 5")));
    }
    if r > 16 {
        return Err(SeedError::InvalidRequest(format!("degree {r} > 16 is not supported")));
    }
    if m < 3 || n < 3 {
        return Err(SeedError::InvalidRequest(format!(
            "type {{{m},{n}}}: both entries must be at least 3"
        )));
    }
    let mut reps: Vec<Perm> = cycle_types_of_order(r, m)
        .iter()
        .map(|ct| representative(r, ct))
        .collect();
    reps.sort();
    Ok(reps.into_iter().flat_map(move |x| pairs_for_representative(&x, m, n)))
}

/// Is there `σ ∈ S_r` with `σ⁻¹xσ = x⁻¹` and `σ⁻¹yσ = y⁻¹`? Such a σ gives a
/// generator-inverting automorphism, so the map is reflexible.
fn reflexible_by_conjugation(x: &Perm, y: &Perm) -> bool {
    let r = x.degree();
    let (xi, yi) = (x.inverse(), y.inverse());
    'target: for q in 0..r as u32 {
        let mut sigma = vec![u32::MAX; r];
        sigma[0] = q;
        let mut stack = vec![0u32];
        while let Some(a) = stack.pop() {
            let sa = sigma[a as usize];
            for (g, gi) in [(x, &xi), (y, &yi), (&xi, x), (&yi, y)] {
                let b = g.apply(a);
                let sb = gi.apply(sa);
                match sigma[b as usize] {
                    u32::MAX => {
                        sigma[b as usize] = sb;
                        stack.push(b);
                    }
                    v if v != sb => continue 'target,
                    _ => {}
                }
            }
        }
        if Perm::from_images(sigma).is_ok() {
            return true;
        }
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Generating pairs taken from the stream, summed over all degrees.
    pub max_candidates: u64,
    /// Degrees whose group order would exceed this are skipped.
    pub max_darts: usize,
}

impl SearchBudget {
    pub fn candidates(max_candidates: u64) -> SearchBudget {
        SearchBudget {
            max_candidates,
            max_darts: 2_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SeedResult {
    pub map: OrientedMap,
    pub degree: usize,
    pub group_tag: GroupTag,
    pub pair: GeneratingPair,
    /// 0-based position of the pair in the overall candidate stream.
    pub stream_position: u64,
    /// Whether the basepoint oracle also confirmed chirality (small maps only).
    pub oracle_confirmed: bool,
}

/// Chiral seeds of a hyperbolic type in stream order, within a budget.
pub struct ChiralSeeds {
    map_type: MapType,
    r_max: usize,
    budget: SearchBudget,
    degree: usize,
    stream: Option<Box<dyn Iterator<Item = GeneratingPair>>>,
    examined: u64,
}

impl ChiralSeeds {
    pub fn new(map_type: MapType, r_max: usize, budget: SearchBudget) -> Result<ChiralSeeds, SeedError> {
        if map_type.m < 3 || map_type.n < 3 {
            return Err(SeedError::InvalidRequest(format!(
                "type {map_type}: both entries must be at least 3"
            )));
        }
        if !map_type.is_hyperbolic() {
            return Err(SeedError::NotHyperbolic(map_type));
        }
        Ok(ChiralSeeds {
            map_type,
            r_max: r_max.min(16),
            budget,
            degree: 4,
            stream: None,
            examined: 0,
        })
    }

    pub fn examined(&self) -> u64 {
        self.examined
    }

    pub fn exhausted_error(&self) -> SeedError {
        SeedError::Exhausted {
            map_type: self.map_type,
            r_max: self.r_max,
            examined: self.examined,
        }
    }

    fn next_pair(&mut self) -> Option<GeneratingPair> {
        loop {
            if self.examined >= self.budget.max_candidates {
                return None;
            }
            if let Some(stream) = self.stream.as_mut() {
                if let Some(p) = stream.next() {
                    self.examined += 1;
                    return Some(p);
                }
            }
            self.degree += 1;
            if self.degree > self.r_max {
                return None;
            }
            if factorial(self.degree) / 2 > self.budget.max_darts as u64 {
                return None;
            }
            let t = self.map_type;
            self.stream = Some(Box::new(
                enumerate_generating_pairs(self.degree, t.m, t.n).expect("validated request"),
            ));
        }
    }
}

impl Iterator for ChiralSeeds {
    type Item = SeedResult;

    fn next(&mut self) -> Option<SeedResult> {
        while let Some(pair) = self.next_pair() {
            let position = self.examined - 1;
            if reflexible_by_conjugation(&pair.x, &pair.y) {
                continue;
            }
            let order = match pair.group {
                GroupTag::Alternating => factorial(pair.degree) / 2,
                GroupTag::Symmetric => factorial(pair.degree),
            };
            if order as usize > self.budget.max_darts {
                continue;
            }
            let map = match OrientedMap::from_generating_pair(&pair.x, &pair.y, order as usize) {
                Ok(m) => m,
                Err(_) => continue,
            };
            assert_eq!(map.darts() as u64, order, "group identification disagrees with closure");
            if is_reflexible(&map).verdict != Chirality::Chiral {
                continue;
            }
            let oracle_confirmed = if map.darts() <= ORACLE_DART_LIMIT {
                assert_eq!(chirality_by_exhaustion(&map), Chirality::Chiral);
                true
            } else {
                false
            };
            let t = self.map_type;
            let map = map.with_label(format!(
                "seed-{}-{}-{}{}-{}",
                t.m,
                t.n,
                match pair.group {
                    GroupTag::Alternating => "A",
                    GroupTag::Symmetric => "S",
                },
                pair.degree,
                position
            ));
            return Some(SeedResult {
                map,
                degree: pair.degree,
                group_tag: pair.group,
                pair,
                stream_position: position,
                oracle_confirmed,
            });
        }
        None
    }
}

/// First chiral seed of type `t`, trying degrees `5..=r_max` in order.
pub fn find_chiral_seed(t: MapType, r_max: usize, budget: SearchBudget) -> Result<SeedResult, SeedError> {
    let mut seeds = ChiralSeeds::new(t, r_max, budget)?;
    match seeds.next() {
        Some(s) => Ok(s),
        None => Err(seeds.exhausted_error()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::Geometry;

    #[test]
    fn lattice_reduction() {
        let l = Lattice::from_basis((2, 1), (-1, 2));
        assert_eq!(l.index(), 5);
        // both basis vectors reduce to the origin
        assert_eq!(l.reduce((2, 1)), (0, 0));
        assert_eq!(l.reduce((-1, 2)), (0, 0));
        let h = Lattice::from_basis((2, 1), (-1, 3));
        assert_eq!(h.index(), 7);
        assert_eq!(h.reduce((-1, 3)), (0, 0));
    }

    #[test]
    fn torus_44_small() {
        let m = torus_map_44(1, 0).unwrap();
        assert_eq!(m.darts(), 4);
        assert_eq!(m.map_type(), MapType::new(4, 4));
        assert_eq!(m.census().genus, 1);
        assert_eq!(m.x().order(), 4);
        // x iterated four times returns to the start
        let mut p = 0;
        for _ in 0..4 {
            p = m.x().apply(p);
        }
        assert_eq!(p, 0);
        assert_eq!(torus_map_44(2, 1).unwrap().darts(), 20);
        assert_eq!(torus_map_44(2, 2).unwrap().darts(), 32);
        assert!(matches!(torus_map_44(0, 0), Err(SeedError::ZeroTorus)));
        assert!(matches!(torus_map_44(1000, 0), Err(SeedError::TorusTooLarge { .. })));
    }

    #[test]
    fn torus_36_small() {
        let m = torus_map_36(1, 0).unwrap();
        assert_eq!(m.darts(), 6);
        assert_eq!(m.map_type(), MapType::new(3, 6));
        assert_eq!(m.map_type().geometry(), Geometry::Euclidean);
        assert_eq!(torus_map_36(2, 1).unwrap().darts(), 42);
        assert_eq!(m.dual().map_type(), MapType::new(6, 3));
    }

    #[test]
    fn cycle_types() {
        let mut t = cycle_types_of_order(5, 4);
        t.sort();
        assert_eq!(t, vec![vec![4, 1]]);
        let t6 = cycle_types_of_order(6, 6);
        assert!(t6.contains(&vec![6]) && t6.contains(&vec![3, 2, 1]) && t6.contains(&vec![3, 3 - 1, 1]));
    }

    #[test]
    fn centralizer_size() {
        let x = representative(7, &[3, 1, 1, 1, 1]);
        let mut count = 0;
        for_each_centralizer_element(&x, |c| {
            assert_eq!(compose(c, &x).unwrap(), compose(&x, c).unwrap());
            count += 1;
            true
        });
        assert_eq!(count, 3 * 24);
    }

    #[test]
    fn request_validation() {
        assert!(enumerate_generating_pairs(5, 2, 5).is_err());
        assert!(enumerate_generating_pairs(4, 3, 5).is_err());
        assert!(matches!(
            find_chiral_seed(MapType::new(4, 4), 6, SearchBudget::candidates(10)),
            Err(SeedError::NotHyperbolic(_))
        ));
    }

    #[test]
    fn odd_x_forces_symmetric() {
        for p in enumerate_generating_pairs(5, 4, 5).unwrap() {
            assert_eq!(p.group, GroupTag::Symmetric);
        }
    }

    #[test]
    fn primitivity() {
        let c5 = Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap();
        assert!(is_primitive(&[&c5]));
        let c6 = Perm::from_cycles(6, &[&[0, 1, 2, 3, 4, 5]]).unwrap();
        assert!(!is_primitive(&[&c6]));
    }
}
