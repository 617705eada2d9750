//! Chiral smooth covers of hyperbolic regular maps.
//!
//! Given `M` of hyperbolic type `{m,n}`, take a chiral seed `M1` of the same
//! type whose group is `A_r` or `S_r`, a smooth cover `M2` of `M` whose group
//! order differs from the seed's, and form `M1 || M2`. The product is
//! verified to be of type `{m,n}`, to cover `M` smoothly, and to be chiral;
//! every check is recorded in a [`CoverCertificate`] that can be re-run from
//! the raw map data it carries.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::io::{self, MapFileError, MapStorage};
use crate::map::{
    chirality_by_exhaustion, is_reflexible, is_smooth_cover, unrooted_isomorphic, Chirality, MapType, OrientedMap,
};
use crate::perm::Perm;
use crate::product::{
    goursat_classify_product, parallel_product_with_limit, GoursatReport, ProductError, DEFAULT_PRODUCT_LIMIT,
};
use crate::seed::{ChiralSeeds, GroupTag, SearchBudget, SeedError, SeedResult, ORACLE_DART_LIMIT};

pub const METHOD: &str = "parallel product of a searched chiral seed with alternating or \
symmetric group and a smooth cover of the input whose group order differs from the seed's; \
finitely many covers are produced by varying seeds";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("type {0} is not hyperbolic")]
    NonHyperbolicType(MapType),
    #[error("no suitable cover base: every augmentation has the seed's order {0}")]
    NoSuitableBase(usize),
    #[error("seed search exhausted after {examined} candidate pairs ({anomalies} anomalies)")]
    Exhausted { examined: u64, anomalies: usize },
    #[error(transparent)]
    Seed(#[from] SeedError),
    #[error(transparent)]
    Product(#[from] ProductError),
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    File(#[from] MapFileError),
    #[error("certificate JSON does not match the schema: {0}")]
    Schema(String),
    #[error("verification failed: {0}")]
    Failed(String),
}

#[derive(Debug, Clone, Copy)]
pub struct CoverBounds {
    pub r_max: usize,
    pub budget: SearchBudget,
    pub product_limit: u64,
}

impl CoverBounds {
    pub fn new(r_max: usize, max_candidates: u64) -> CoverBounds {
        CoverBounds {
            r_max,
            budget: SearchBudget::candidates(max_candidates),
            product_limit: DEFAULT_PRODUCT_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(rename = "type")]
    pub map_type: MapType,
    pub darts: usize,
    pub genus: u64,
    pub chirality: Chirality,
}

impl MapSummary {
    pub fn of(m: &OrientedMap) -> MapSummary {
        MapSummary {
            label: m.label().map(str::to_string),
            map_type: m.map_type(),
            darts: m.darts(),
            genus: m.census().genus,
            chirality: is_reflexible(m).verdict,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub degree: usize,
    pub group_tag: GroupTag,
    pub stream_position: u64,
    /// The generating pair on `degree` points.
    pub pair_x: Vec<u32>,
    pub pair_y: Vec<u32>,
    pub oracle_confirmed: bool,
    pub map: MapSummary,
}

impl SeedSummary {
    fn of(seed: &SeedResult) -> SeedSummary {
        SeedSummary {
            degree: seed.degree,
            group_tag: seed.group_tag,
            stream_position: seed.stream_position,
            pair_x: seed.pair.x.images().to_vec(),
            pair_y: seed.pair.y.images().to_vec(),
            oracle_confirmed: seed.oracle_confirmed,
            map: MapSummary::of(&seed.map),
        }
    }
}

/// What the product has to satisfy, and what was checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verifications {
    pub same_type: bool,
    pub base_covers_input: bool,
    pub product_covers_input: bool,
    pub product_covers_seed: bool,
    pub product_covers_base: bool,
    pub product_chirality: Chirality,
    /// Basepoint-exhaustion verdict, only computed for small products.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_chirality: Option<Chirality>,
}

impl Verifications {
    pub fn all_passed(&self) -> bool {
        self.same_type
            && self.base_covers_input
            && self.product_covers_input
            && self.product_covers_seed
            && self.product_covers_base
            && self.product_chirality == Chirality::Chiral
            && self.oracle_chirality.is_none_or(|c| c == Chirality::Chiral)
    }
}

/// Hypotheses under which the product must be chiral.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofConditions {
    pub seed_chiral: bool,
    pub seed_group: GroupTag,
    pub seed_degree: usize,
    pub seed_order: usize,
    pub base_order: usize,
    pub orders_differ: bool,
}

/// A reflexible product under the hypotheses above; should never happen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Anomaly {
    pub seed_position: u64,
    pub conditions: ProofConditions,
    pub goursat: GoursatReport,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct CoverCertificate {
    pub input: OrientedMap,
    pub seed: SeedSummary,
    pub seed_map: OrientedMap,
    pub base: OrientedMap,
    /// Labels of the auxiliary maps multiplied into the input to form the base.
    pub base_construction: Vec<String>,
    pub product: OrientedMap,
    pub goursat: GoursatReport,
    pub conditions: ProofConditions,
    pub verifications: Verifications,
    pub anomalies: Vec<Anomaly>,
}

/// Returns `m` when its order differs from the seed's; otherwise multiplies
/// in auxiliary maps one at a time until it does.
pub fn choose_cover_base(
    m: &OrientedMap,
    seed: &OrientedMap,
    aux: &[OrientedMap],
) -> Result<(OrientedMap, Vec<String>), PipelineError> {
    choose_cover_base_with_limit(m, seed, aux, DEFAULT_PRODUCT_LIMIT)
}

fn choose_cover_base_with_limit(
    m: &OrientedMap,
    seed: &OrientedMap,
    aux: &[OrientedMap],
    limit: u64,
) -> Result<(OrientedMap, Vec<String>), PipelineError> {
    let mut base = m.clone();
    let mut used = Vec::new();
    for a in aux {
        if base.darts() != seed.darts() {
            break;
        }
        base = parallel_product_with_limit(&base, a, limit)?;
        used.push(a.label().unwrap_or("unlabelled").to_string());
    }
    if base.darts() == seed.darts() {
        return Err(PipelineError::NoSuitableBase(seed.darts()));
    }
    if used.is_empty() {
        return Ok((m.clone(), used));
    }
    let label = format!("{}||{}", m.label().unwrap_or("input"), used.join("||"));
    Ok((base.with_label(label), used))
}

fn verify_parts(
    input: &OrientedMap,
    seed_map: &OrientedMap,
    base: &OrientedMap,
    product: &OrientedMap,
) -> Verifications {
    let product_chirality = is_reflexible(product).verdict;
    let oracle_chirality = (product.darts() <= ORACLE_DART_LIMIT).then(|| chirality_by_exhaustion(product));
    Verifications {
        same_type: product.map_type() == input.map_type(),
        base_covers_input: is_smooth_cover(base, input),
        product_covers_input: is_smooth_cover(product, input),
        product_covers_seed: is_smooth_cover(product, seed_map),
        product_covers_base: is_smooth_cover(product, base),
        product_chirality,
        oracle_chirality,
    }
}

/// Tries to turn one seed into a certificate. `Ok(Err(anomaly))` when the
/// product is not chiral.
fn certify_with_seed(
    m: &OrientedMap,
    seed: &SeedResult,
    aux: &[OrientedMap],
    bounds: &CoverBounds,
) -> Result<Result<CoverCertificate, Anomaly>, PipelineError> {
    let (base, base_construction) = choose_cover_base_with_limit(m, &seed.map, aux, bounds.product_limit)?;
    let product = parallel_product_with_limit(&seed.map, &base, bounds.product_limit)?;
    let product = product.with_label(format!(
        "{}||{}",
        seed.map.label().unwrap_or("seed"),
        base.label().unwrap_or("base")
    ));
    let goursat = goursat_classify_product(&seed.map, &base, &product)?;
    let conditions = ProofConditions {
        seed_chiral: is_reflexible(&seed.map).verdict == Chirality::Chiral,
        seed_group: seed.group_tag,
        seed_degree: seed.degree,
        seed_order: seed.map.darts(),
        base_order: base.darts(),
        orders_differ: seed.map.darts() != base.darts(),
    };
    let verifications = verify_parts(m, &seed.map, &base, &product);
    if !verifications.all_passed() {
        return Ok(Err(Anomaly {
            seed_position: seed.stream_position,
            conditions,
            goursat,
            detail: format!("verification failed: {verifications:?}"),
        }));
    }
    Ok(Ok(CoverCertificate {
        input: m.clone(),
        seed: SeedSummary::of(seed),
        seed_map: seed.map.clone(),
        base,
        base_construction,
        product,
        goursat,
        conditions,
        verifications,
        anomalies: Vec::new(),
    }))
}

fn seeds_for(m: &OrientedMap, bounds: &CoverBounds) -> Result<ChiralSeeds, PipelineError> {
    let t = m.map_type();
    if !t.is_hyperbolic() {
        return Err(PipelineError::NonHyperbolicType(t));
    }
    Ok(ChiralSeeds::new(t, bounds.r_max, bounds.budget)?)
}

/// One verified chiral smooth cover of `m` of the same type.
pub fn chiral_cover(
    m: &OrientedMap,
    bounds: &CoverBounds,
    aux: &[OrientedMap],
) -> Result<CoverCertificate, PipelineError> {
    let mut seeds = seeds_for(m, bounds)?;
    let mut anomalies = Vec::new();
    for seed in seeds.by_ref() {
        match certify_with_seed(m, &seed, aux, bounds) {
            Ok(Ok(mut cert)) => {
                cert.anomalies = anomalies;
                return Ok(cert);
            }
            Ok(Err(anomaly)) => anomalies.push(anomaly),
            // a seed whose base cannot be formed or whose product is too big
            Err(PipelineError::NoSuitableBase(_)) | Err(PipelineError::Product(ProductError::TooLarge { .. })) => {
                continue
            }
            Err(e) => return Err(e),
        }
    }
    Err(PipelineError::Exhausted {
        examined: seeds.examined(),
        anomalies: anomalies.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "witness")]
pub enum NonIsomorphism {
    DistinctDartCounts { left: usize, right: usize },
    NoUnrootedIsomorphism { darts: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairWitness {
    pub left: usize,
    pub right: usize,
    #[serde(flatten)]
    pub witness: NonIsomorphism,
}

#[derive(Debug, Clone)]
pub struct CoverBatch {
    pub certificates: Vec<CoverCertificate>,
    pub witnesses: Vec<PairWitness>,
    /// Set when fewer than the requested number could be produced.
    pub exhausted: Option<String>,
    pub anomalies: Vec<Anomaly>,
}

fn non_isomorphism(a: &OrientedMap, b: &OrientedMap) -> Option<NonIsomorphism> {
    if a.darts() != b.darts() {
        Some(NonIsomorphism::DistinctDartCounts {
            left: a.darts(),
            right: b.darts(),
        })
    } else if !unrooted_isomorphic(a, b) {
        Some(NonIsomorphism::NoUnrootedIsomorphism { darts: a.darts() })
    } else {
        None
    }
}

/// Up to `k` certificates with pairwise non-isomorphic products, from
/// successive seeds of the stream.
pub fn many_chiral_covers(
    m: &OrientedMap,
    k: usize,
    bounds: &CoverBounds,
    aux: &[OrientedMap],
) -> Result<CoverBatch, PipelineError> {
    assert!(k >= 1, "at least one cover must be requested");
    let mut seeds = seeds_for(m, bounds)?;
    let mut batch = CoverBatch {
        certificates: Vec::new(),
        witnesses: Vec::new(),
        exhausted: None,
        anomalies: Vec::new(),
    };
    while batch.certificates.len() < k {
        let Some(seed) = seeds.next() else {
            batch.exhausted = Some(format!(
                "seed stream exhausted after {} candidate pairs with {} of {k} covers",
                seeds.examined(),
                batch.certificates.len()
            ));
            break;
        };
        let cert = match certify_with_seed(m, &seed, aux, bounds) {
            Ok(Ok(cert)) => cert,
            Ok(Err(anomaly)) => {
                batch.anomalies.push(anomaly);
                continue;
            }
            Err(PipelineError::NoSuitableBase(_)) | Err(PipelineError::Product(ProductError::TooLarge { .. })) => {
                continue
            }
            Err(e) => return Err(e),
        };
        let fresh: Option<Vec<NonIsomorphism>> = batch
            .certificates
            .iter()
            .map(|c| non_isomorphism(&c.product, &cert.product))
            .collect();
        let Some(fresh) = fresh else { continue };
        let right = batch.certificates.len();
        for (left, witness) in fresh.into_iter().enumerate() {
            batch.witnesses.push(PairWitness { left, right, witness });
        }
        batch.certificates.push(cert);
    }
    if batch.certificates.is_empty() {
        return Err(PipelineError::Exhausted {
            examined: seeds.examined(),
            anomalies: batch.anomalies.len(),
        });
    }
    for c in &mut batch.certificates {
        c.anomalies = batch.anomalies.clone();
    }
    Ok(batch)
}

/// Re-runs every check recorded in a certificate from its raw maps.
pub fn verify_certificate(cert: &CoverCertificate) -> Result<(), VerifyError> {
    let fail = |msg: String| Err(VerifyError::Failed(msg));
    // re-validate everything from scratch
    for (name, m) in [
        ("input", &cert.input),
        ("seed", &cert.seed_map),
        ("base", &cert.base),
        ("product", &cert.product),
    ] {
        OrientedMap::validate(m.darts(), m.x().clone(), m.y().clone())
            .map_err(|e| VerifyError::Failed(format!("{name} map does not validate: {e}")))?;
    }
    let t = cert.input.map_type();
    if !t.is_hyperbolic() {
        return fail(format!("input type {t} is not hyperbolic"));
    }
    for (name, m) in [
        ("seed", &cert.seed_map),
        ("base", &cert.base),
        ("product", &cert.product),
    ] {
        if m.map_type() != t {
            return fail(format!("{name} has type {}, input has {t}", m.map_type()));
        }
    }
    // the seed map is the regular representation of the recorded pair
    let gx = Perm::from_images(cert.seed.pair_x.clone()).map_err(|e| VerifyError::Failed(e.to_string()))?;
    let gy = Perm::from_images(cert.seed.pair_y.clone()).map_err(|e| VerifyError::Failed(e.to_string()))?;
    let rebuilt = OrientedMap::from_generating_pair(&gx, &gy, cert.seed_map.darts())
        .map_err(|e| VerifyError::Failed(format!("seed pair does not rebuild: {e}")))?;
    if !rebuilt.same_darts_and_generators(&cert.seed_map) {
        return fail("seed map differs from the regular representation of its pair".into());
    }
    let tag = if gx.is_even() && gy.is_even() {
        GroupTag::Alternating
    } else {
        GroupTag::Symmetric
    };
    let r = cert.seed.degree;
    let full: u64 = (1..=r as u64).product();
    let expected_order = match tag {
        GroupTag::Alternating => full / 2,
        GroupTag::Symmetric => full,
    };
    if tag != cert.seed.group_tag || cert.seed_map.darts() as u64 != expected_order {
        return fail(format!("seed group is not {} of degree {r}", cert.seed.group_tag));
    }
    if is_reflexible(&cert.seed_map).verdict != Chirality::Chiral {
        return fail("seed is not chiral".into());
    }
    let recomputed = parallel_product_with_limit(&cert.seed_map, &cert.base, u64::MAX)
        .map_err(|e| VerifyError::Failed(e.to_string()))?;
    if !recomputed.same_darts_and_generators(&cert.product) {
        return fail("product differs from the recomputed parallel product".into());
    }
    let v = verify_parts(&cert.input, &cert.seed_map, &cert.base, &cert.product);
    if !v.all_passed() {
        return fail(format!("re-run verifications failed: {v:?}"));
    }
    if v != cert.verifications {
        return fail("recorded verifications differ from the re-run".into());
    }
    let g = goursat_classify_product(&cert.seed_map, &cert.base, &cert.product)
        .map_err(|e| VerifyError::Failed(e.to_string()))?;
    if g != cert.goursat {
        return fail("recorded index classification differs from the re-run".into());
    }
    if !cert.conditions.orders_differ || cert.base.darts() == cert.seed_map.darts() {
        return fail("seed and base orders coincide".into());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// JSON documents

#[derive(Serialize, Deserialize)]
struct CertificateDoc {
    format: String,
    method: String,
    input: MapSummary,
    input_map: Value,
    seed: SeedSummary,
    seed_map: Value,
    base: MapSummary,
    base_construction: Vec<String>,
    base_map: Value,
    goursat: GoursatReport,
    product: MapSummary,
    product_map: Value,
    proof_conditions: ProofConditions,
    verifications: Verifications,
    anomalies: Vec<Anomaly>,
}

/// Serializes a certificate. With `MapStorage::External(path)` the product
/// map is written to `base_dir/path` and referenced by digest.
pub fn certificate_to_value(
    cert: &CoverCertificate,
    storage: &MapStorage,
    base_dir: &Path,
) -> Result<Value, MapFileError> {
    let product_map = match storage {
        MapStorage::Inline => io::map_to_value(&cert.product),
        MapStorage::External(rel) => {
            let text = io::emit_map_string(&cert.product);
            let path = base_dir.join(rel);
            std::fs::write(&path, &text).map_err(|source| MapFileError::Io {
                path: path.display().to_string(),
                source,
            })?;
            serde_json::json!({
                "file": rel.to_string_lossy(),
                "sha256": io::sha256_hex(text.as_bytes()),
                "darts": cert.product.darts(),
            })
        }
    };
    let doc = CertificateDoc {
        format: io::CERT_FORMAT.to_string(),
        method: METHOD.to_string(),
        input: MapSummary::of(&cert.input),
        input_map: io::map_to_value(&cert.input),
        seed: cert.seed.clone(),
        seed_map: io::map_to_value(&cert.seed_map),
        base: MapSummary::of(&cert.base),
        base_construction: cert.base_construction.clone(),
        base_map: io::map_to_value(&cert.base),
        goursat: cert.goursat.clone(),
        product: MapSummary::of(&cert.product),
        product_map,
        proof_conditions: cert.conditions.clone(),
        verifications: cert.verifications.clone(),
        anomalies: cert.anomalies.clone(),
    };
    Ok(serde_json::to_value(doc).expect("certificate serializes"))
}

pub fn certificate_from_value(v: &Value, base_dir: &Path) -> Result<CoverCertificate, VerifyError> {
    let doc: CertificateDoc = serde_json::from_value(v.clone()).map_err(|e| VerifyError::Schema(e.to_string()))?;
    if doc.format != io::CERT_FORMAT {
        return Err(VerifyError::Schema(format!("format is {:?}", doc.format)));
    }
    let input = io::map_from_value(&doc.input_map)?;
    let seed_map = io::map_from_value(&doc.seed_map)?;
    let base = io::map_from_value(&doc.base_map)?;
    let product = io::map_from_stored_value(&doc.product_map, base_dir)?;
    for (name, summary, m) in [
        ("input", &doc.input, &input),
        ("base", &doc.base, &base),
        ("product", &doc.product, &product),
        ("seed", &doc.seed.map, &seed_map),
    ] {
        if *summary != MapSummary::of(m) {
            return Err(VerifyError::Failed(format!("{name} summary does not match its map")));
        }
    }
    Ok(CoverCertificate {
        input,
        seed: doc.seed,
        seed_map,
        base,
        base_construction: doc.base_construction,
        product,
        goursat: doc.goursat,
        conditions: doc.proof_conditions,
        verifications: doc.verifications,
        anomalies: doc.anomalies,
    })
}

/// Pretty JSON text with a trailing newline; stable across runs.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}
