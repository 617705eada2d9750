//! Parallel products `M1 || M2` and the index classification of the product
//! group inside `G1 × G2`.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exceptional::{exceptional_report, GammaType};
use crate::map::{MapType, OrientedMap};
use crate::perm::Perm;

/// Products whose full pair space exceeds this many darts are refused unless
/// explicitly allowed.
pub const DEFAULT_PRODUCT_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProductError {
    #[error("maps have different types {left} and {right}")]
    TypeMismatch { left: MapType, right: MapType },
    #[error("pair space {darts} exceeds the product limit {limit}")]
    TooLarge { darts: u64, limit: u64 },
    #[error("index-2 product violates the expected subdirect structure: {0}")]
    StructureViolation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "index")]
pub enum GoursatCase {
    DirectProduct,
    Index2Subproduct,
    Other(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoursatReport {
    pub order1: u64,
    pub order2: u64,
    pub order_product: u64,
    pub index: u64,
    pub case: GoursatCase,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_type: Option<GammaType>,
    /// `(|H1|, |H2|, |H|)` when the case is index 2.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_orders: Option<(u64, u64, u64)>,
}

pub fn parallel_product(m1: &OrientedMap, m2: &OrientedMap) -> Result<OrientedMap, ProductError> {
    parallel_product_with_limit(m1, m2, DEFAULT_PRODUCT_LIMIT)
}

/// Orbit of `(0, 0)` under `(x1, x2)` and `(y1, y2)`, re-indexed breadth
/// first (edge order x, x⁻¹, y, y⁻¹) with `(0, 0) ↦ 0`.
pub fn parallel_product_with_limit(
    m1: &OrientedMap,
    m2: &OrientedMap,
    limit: u64,
) -> Result<OrientedMap, ProductError> {
    let (t1, t2) = (m1.map_type(), m2.map_type());
    if t1 != t2 {
        return Err(ProductError::TypeMismatch { left: t1, right: t2 });
    }
    let (d1, d2) = (m1.darts() as u64, m2.darts() as u64);
    let space = d1 * d2;
    if space > limit {
        return Err(ProductError::TooLarge { darts: space, limit });
    }
    let (x1i, y1i) = m1.inverse_generators();
    let (x2i, y2i) = m2.inverse_generators();
    let edges: [(&Perm, &Perm); 4] = [(m1.x(), m2.x()), (&x1i, &x2i), (m1.y(), m2.y()), (&y1i, &y2i)];

    // dense index for moderate pair spaces, hash map beyond
    enum Index {
        Dense(Vec<u32>),
        Sparse(HashMap<u64, u32>),
    }
    impl Index {
        fn get_or_insert(&mut self, key: u64, next: u32) -> u32 {
            match self {
                Index::Dense(v) => {
                    let slot = &mut v[key as usize];
                    if *slot == u32::MAX {
                        *slot = next;
                    }
                    *slot
                }
                Index::Sparse(h) => *h.entry(key).or_insert(next),
            }
        }
    }
    let mut index = if space <= 50_000_000 {
        Index::Dense(vec![u32::MAX; space as usize])
    } else {
        Index::Sparse(HashMap::new())
    };
    index.get_or_insert(0, 0);
    let mut pairs: Vec<(u32, u32)> = vec![(0, 0)];
    let mut x_img = Vec::new();
    let mut y_img = Vec::new();
    let mut queue = VecDeque::from([0u32]);
    while let Some(i) = queue.pop_front() {
        let (a, b) = pairs[i as usize];
        for (k, (s1, s2)) in edges.iter().enumerate() {
            let (na, nb) = (s1.apply(a), s2.apply(b));
            let key = na as u64 * d2 + nb as u64;
            let next = pairs.len() as u32;
            let id = index.get_or_insert(key, next);
            if id == next {
                pairs.push((na, nb));
                queue.push_back(id);
            }
            match k {
                0 => x_img.push(id),
                2 => y_img.push(id),
                _ => {}
            }
        }
    }
    // The queue is processed in id order, so image tables line up with ids.
    let x = Perm::from_images_unchecked(x_img);
    let y = Perm::from_images_unchecked(y_img);
    let product =
        OrientedMap::from_regular_unchecked(x, y).expect("orbit of a product of regular actions is a regular map");
    let label = match (m1.label(), m2.label()) {
        (Some(a), Some(b)) => Some(format!("{a}||{b}")),
        _ => None,
    };
    Ok(match label {
        Some(l) => product.with_label(l),
        None => product,
    })
}

/// The dart pairs `(p1, p2)` of a product, in product dart order.
/// Recovered through the two projections.
pub fn product_pairs(product: &OrientedMap, m1: &OrientedMap, m2: &OrientedMap) -> Option<Vec<(u32, u32)>> {
    let p1 = crate::map::rooted_morphism(product, m1)?;
    let p2 = crate::map::rooted_morphism(product, m2)?;
    Some(p1.images().iter().zip(p2.images()).map(|(&a, &b)| (a, b)).collect())
}

pub fn goursat_classify(m1: &OrientedMap, m2: &OrientedMap) -> Result<GoursatReport, ProductError> {
    let product = parallel_product(m1, m2)?;
    goursat_classify_product(m1, m2, &product)
}

/// Classification against an already computed `product = m1 || m2`.
pub fn goursat_classify_product(
    m1: &OrientedMap,
    m2: &OrientedMap,
    product: &OrientedMap,
) -> Result<GoursatReport, ProductError> {
    let (t1, t2) = (m1.map_type(), m2.map_type());
    if t1 != t2 {
        return Err(ProductError::TypeMismatch { left: t1, right: t2 });
    }
    let order1 = m1.darts() as u64;
    let order2 = m2.darts() as u64;
    let order_product = product.darts() as u64;
    if !(order1 * order2).is_multiple_of(order_product) {
        return Err(ProductError::StructureViolation(format!(
            "product order {order_product} does not divide {order1}·{order2}"
        )));
    }
    let index = order1 * order2 / order_product;
    let case = match index {
        1 => GoursatCase::DirectProduct,
        2 => GoursatCase::Index2Subproduct,
        k => GoursatCase::Other(k),
    };
    let mut report = GoursatReport {
        order1,
        order2,
        order_product,
        index,
        case,
        gamma_type: None,
        h_orders: None,
    };
    if index == 2 {
        let (gamma, h) = index2_structure(m1, m2, product)?;
        report.gamma_type = Some(gamma);
        report.h_orders = Some(h);
    }
    Ok(report)
}

/// For an index-2 product, finds the Γ-type for which both factors and the
/// product are exceptional, and checks `|H| = |H1|·|H2|` and that the
/// product's `H`-orbit projects onto both factor `H`-orbits.
fn index2_structure(
    m1: &OrientedMap,
    m2: &OrientedMap,
    product: &OrientedMap,
) -> Result<(GammaType, (u64, u64, u64)), ProductError> {
    let t = m1.map_type();
    for gamma in GammaType::ALL {
        if !gamma.applies_to(t.m, t.n) {
            continue;
        }
        let reports = [m1, m2, product].map(|m| exceptional_report(m, gamma));
        let [Ok(r1), Ok(r2), Ok(r)] = reports else {
            continue;
        };
        if !(r1.exceptional && r2.exceptional && r.exceptional) {
            continue;
        }
        let (h1, h2, h) = (r1.h_order() as u64, r2.h_order() as u64, r.h_order() as u64);
        if h != h1 * h2 {
            return Err(ProductError::StructureViolation(format!(
                "|H| = {h} but |H1|·|H2| = {}",
                h1 * h2
            )));
        }
        let pairs = product_pairs(product, m1, m2)
            .ok_or_else(|| ProductError::StructureViolation("product does not project onto its factors".into()))?;
        let mut in_h1 = vec![false; m1.darts()];
        let mut in_h2 = vec![false; m2.darts()];
        for &p in &r1.h_orbit {
            in_h1[p as usize] = true;
        }
        for &p in &r2.h_orbit {
            in_h2[p as usize] = true;
        }
        let mut hit1 = vec![false; m1.darts()];
        let mut hit2 = vec![false; m2.darts()];
        for &p in &r.h_orbit {
            let (a, b) = pairs[p as usize];
            if !in_h1[a as usize] || !in_h2[b as usize] {
                return Err(ProductError::StructureViolation(format!(
                    "H-dart {p} projects outside H1 × H2"
                )));
            }
            hit1[a as usize] = true;
            hit2[b as usize] = true;
        }
        if hit1.iter().filter(|&&b| b).count() as u64 != h1 || hit2.iter().filter(|&&b| b).count() as u64 != h2 {
            return Err(ProductError::StructureViolation(
                "H does not project onto H1 and H2".into(),
            ));
        }
        return Ok((gamma, (h1, h2, h)));
    }
    Err(ProductError::StructureViolation(
        "no common Γ-type makes both factors and the product exceptional".into(),
    ))
}
