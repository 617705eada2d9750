//! Brute-force oracles shared by the integration tests. Written against raw
//! image vectors so they do not reuse the library code they check.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use regmap::OrientedMap;

pub type Images = Vec<u32>;

/// `p` then `q` under the right action.
pub fn then(p: &[u32], q: &[u32]) -> Images {
    p.iter().map(|&a| q[a as usize]).collect()
}

pub fn invert(p: &[u32]) -> Images {
    let mut out = vec![0; p.len()];
    for (i, &a) in p.iter().enumerate() {
        out[a as usize] = i as u32;
    }
    out
}

pub fn identity(d: usize) -> Images {
    (0..d as u32).collect()
}

/// Order by repeated multiplication.
pub fn order_by_iteration(p: &[u32]) -> u64 {
    let id = identity(p.len());
    let mut q = p.to_vec();
    let mut k = 1;
    while q != id {
        q = then(&q, p);
        k += 1;
    }
    k
}

/// Every element of `⟨gens⟩`, stopping early once `cap` is exceeded.
pub fn closure(gens: &[Images], cap: usize) -> HashSet<Images> {
    let d = gens[0].len();
    let mut seen = HashSet::from([identity(d)]);
    let mut queue = VecDeque::from([identity(d)]);
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let h = then(&g, s);
            if seen.insert(h.clone()) {
                if seen.len() > cap {
                    return seen;
                }
                queue.push_back(h);
            }
        }
    }
    seen
}

pub fn images(m: &OrientedMap) -> (Images, Images) {
    (m.x().images().to_vec(), m.y().images().to_vec())
}

/// Size of the orbit of `(0, 0)` under the paired generators.
pub fn pair_orbit_size(a: &OrientedMap, b: &OrientedMap) -> usize {
    let (ax, ay) = images(a);
    let (bx, by) = images(b);
    let gens = [(ax, bx), (ay, by)];
    let mut seen = HashSet::from([(0u32, 0u32)]);
    let mut queue = VecDeque::from([(0u32, 0u32)]);
    while let Some((p, q)) = queue.pop_front() {
        for (g1, g2) in &gens {
            let next = (g1[p as usize], g2[q as usize]);
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    seen.len()
}

/// Tries `0 ↦ q` for every `q`, propagating `(gx1, gy1)` onto `(gx2, gy2)`.
pub fn exists_generator_map(gx1: &[u32], gy1: &[u32], gx2: &[u32], gy2: &[u32]) -> bool {
    let d = gx1.len();
    if gx2.len() != d {
        return false;
    }
    'base: for q in 0..d as u32 {
        let mut phi = vec![u32::MAX; d];
        phi[0] = q;
        let mut stack = vec![0u32];
        while let Some(p) = stack.pop() {
            for (s, t) in [(gx1, gx2), (gy1, gy2)] {
                let a = s[p as usize];
                let b = t[phi[p as usize] as usize];
                if phi[a as usize] == u32::MAX {
                    phi[a as usize] = b;
                    stack.push(a);
                } else if phi[a as usize] != b {
                    continue 'base;
                }
            }
        }
        let mut hit = vec![false; d];
        if phi
            .iter()
            .all(|&v| v != u32::MAX && !std::mem::replace(&mut hit[v as usize], true))
        {
            return true;
        }
    }
    false
}

/// Basepoint exhaustion: is there a dart bijection carrying `(x, y)` to `(x⁻¹, y⁻¹)`?
pub fn oracle_reflexible(m: &OrientedMap) -> bool {
    let (x, y) = images(m);
    exists_generator_map(&x, &y, &invert(&x), &invert(&y))
}

pub fn oracle_isomorphic(a: &OrientedMap, b: &OrientedMap) -> bool {
    let (ax, ay) = images(a);
    let (bx, by) = images(b);
    exists_generator_map(&ax, &ay, &bx, &by)
}

/// All permutations of `0..r` in lexicographic order.
pub fn all_perms(r: usize) -> Vec<Images> {
    fn rec(i: usize, p: &mut Images, out: &mut Vec<Images>) {
        if i == p.len() {
            out.push(p.clone());
            return;
        }
        for j in i..p.len() {
            p.swap(i, j);
            rec(i + 1, p, out);
            p.swap(i, j);
        }
    }
    let mut out = Vec::new();
    rec(0, &mut identity(r), &mut out);
    out.sort();
    out
}

pub fn is_even(p: &[u32]) -> bool {
    let mut seen = vec![false; p.len()];
    let mut transpositions = 0;
    for i in 0..p.len() {
        let mut j = i;
        let mut len = 0;
        while !seen[j] {
            seen[j] = true;
            j = p[j] as usize;
            len += 1;
        }
        if len > 0 {
            transpositions += len - 1;
        }
    }
    transpositions % 2 == 0
}

pub fn catalog_maps() -> Vec<OrientedMap> {
    regmap::seed::catalog_names()
        .iter()
        .map(|n| regmap::seed::catalog_get(n).unwrap().map)
        .collect()
}

/// Does `0 ↦ 0` extend to a generator-respecting map from `big` onto `small`?
pub fn oracle_covers(big: &OrientedMap, small: &OrientedMap) -> bool {
    let (bx, by) = images(big);
    let (sx, sy) = images(small);
    let mut phi = vec![u32::MAX; bx.len()];
    phi[0] = 0;
    let mut stack = vec![0u32];
    while let Some(p) = stack.pop() {
        for (s, t) in [(&bx, &sx), (&by, &sy)] {
            let a = s[p as usize];
            let b = t[phi[p as usize] as usize];
            if phi[a as usize] == u32::MAX {
                phi[a as usize] = b;
                stack.push(a);
            } else if phi[a as usize] != b {
                return false;
            }
        }
    }
    phi.iter().all(|&v| v != u32::MAX)
}
