//! C ABI over `regmap`.
//!
//! Maps are opaque [`RegmapMap`] handles owned by the caller and released
//! with [`regmap_map_free`]. Every entry point returns a [`RegmapStatus`];
//! results come back through out-pointers, which are left untouched on
//! failure. The message of the most recent failure on the calling thread is
//! available from [`regmap_last_error`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use regmap::io::{emit_map_string, parse_map_str, MapFileError};
use regmap::map::{is_reflexible, is_smooth_cover, Chirality, MapError};
use regmap::product::{goursat_classify, parallel_product_with_limit, ProductError, DEFAULT_PRODUCT_LIMIT};
use regmap::seed::{catalog_get, torus_map_36, torus_map_44, SeedError};
use regmap::{OrientedMap, Perm, PermError};

/// Outcome of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegmapStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument is out of range or malformed (bad UTF-8, short buffer).
    InvalidArgument = 2,
    /// The arrays are not permutations of the same degree.
    NotPermutation = 3,
    /// `⟨x, y⟩` is not transitive on the darts.
    NotTransitive = 4,
    /// `⟨x, y⟩` is transitive but not regular.
    NotRegular = 5,
    /// Any other structural violation of the map axioms.
    InvalidMap = 6,
    /// JSON text could not be parsed as a map.
    Parse = 7,
    /// The two maps have different types.
    TypeMismatch = 8,
    /// The requested object would exceed a size limit.
    TooLarge = 9,
    /// No catalog entry has that name.
    NotFound = 10,
    /// A Rust panic was caught; this is a bug.
    Internal = 99,
}

/// An orientably-regular map. Opaque to C.
pub struct RegmapMap {
    inner: OrientedMap,
}

/// Vertex, edge and face counts of a map.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RegmapCensus {
    pub darts: u64,
    pub vertices: u64,
    pub edges: u64,
    pub faces: u64,
    pub euler_characteristic: i64,
    pub genus: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(RegmapStatus, String);

impl Failure {
    fn new(status: RegmapStatus, msg: impl Into<String>) -> Failure {
        Failure(status, msg.into())
    }
}

impl From<MapError> for Failure {
    fn from(e: MapError) -> Failure {
        let status = match e {
            MapError::NotTransitive { .. } => RegmapStatus::NotTransitive,
            MapError::NotRegular(_) => RegmapStatus::NotRegular,
            MapError::DegreeMismatch { .. } | MapError::Perm(_) => RegmapStatus::NotPermutation,
            MapError::GroupTooLarge { .. } => RegmapStatus::TooLarge,
            _ => RegmapStatus::InvalidMap,
        };
        Failure(status, e.to_string())
    }
}

impl From<PermError> for Failure {
    fn from(e: PermError) -> Failure {
        Failure(RegmapStatus::NotPermutation, e.to_string())
    }
}

impl From<ProductError> for Failure {
    fn from(e: ProductError) -> Failure {
        let status = match e {
            ProductError::TypeMismatch { .. } => RegmapStatus::TypeMismatch,
            ProductError::TooLarge { .. } => RegmapStatus::TooLarge,
            ProductError::StructureViolation(_) => RegmapStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

impl From<SeedError> for Failure {
    fn from(e: SeedError) -> Failure {
        let status = match e {
            SeedError::UnknownName(_) => RegmapStatus::NotFound,
            SeedError::ZeroTorus => RegmapStatus::InvalidArgument,
            SeedError::TorusTooLarge { .. } => RegmapStatus::TooLarge,
            SeedError::Map(e) => return e.into(),
            _ => RegmapStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

impl From<MapFileError> for Failure {
    fn from(e: MapFileError) -> Failure {
        match e {
            MapFileError::Validation(e) => e.into(),
            e => Failure(RegmapStatus::Parse, e.to_string()),
        }
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RegmapStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RegmapStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RegmapStatus::Internal
        }
    }
}

fn map_ref<'a>(p: *const RegmapMap) -> Result<&'a OrientedMap, Failure> {
    // SAFETY: non-null handles come from this library and are live per the API contract.
    unsafe { p.as_ref() }
        .map(|m| &m.inner)
        .ok_or_else(|| Failure::new(RegmapStatus::NullPointer, "null map handle"))
}

fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(RegmapStatus::NullPointer, "null out-pointer"));
    }
    // SAFETY: checked non-null; the caller provides writable storage for a T.
    unsafe { out.write(value) };
    Ok(())
}

fn check_out<T>(out: *mut T) -> Result<(), Failure> {
    if out.is_null() {
        Err(Failure::new(RegmapStatus::NullPointer, "null out-pointer"))
    } else {
        Ok(())
    }
}

fn boxed(m: OrientedMap) -> *mut RegmapMap {
    Box::into_raw(Box::new(RegmapMap { inner: m }))
}

fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(RegmapStatus::NullPointer, "null string"));
    }
    // SAFETY: non-null and nul-terminated per the API contract.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|e| Failure::new(RegmapStatus::InvalidArgument, format!("string is not UTF-8: {e}")))
}

fn slice_arg<'a>(p: *const u32, len: usize) -> Result<&'a [u32], Failure> {
    if p.is_null() {
        return Err(Failure::new(RegmapStatus::NullPointer, "null array"));
    }
    // SAFETY: the caller guarantees `len` readable elements at `p`.
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

/// Message of the last failure on this thread, or null if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn regmap_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static, nul-terminated name of a status code.
#[no_mangle]
pub extern "C" fn regmap_status_name(status: RegmapStatus) -> *const c_char {
    let s: &'static CStr = match status {
        RegmapStatus::Ok => c"ok",
        RegmapStatus::NullPointer => c"null pointer",
        RegmapStatus::InvalidArgument => c"invalid argument",
        RegmapStatus::NotPermutation => c"not a permutation",
        RegmapStatus::NotTransitive => c"not transitive",
        RegmapStatus::NotRegular => c"not regular",
        RegmapStatus::InvalidMap => c"invalid map",
        RegmapStatus::Parse => c"parse error",
        RegmapStatus::TypeMismatch => c"type mismatch",
        RegmapStatus::TooLarge => c"too large",
        RegmapStatus::NotFound => c"not found",
        RegmapStatus::Internal => c"internal error",
    };
    s.as_ptr()
}

/// Validates `darts`-element image arrays `x` and `y` (0-based) as a map.
///
/// # Safety
/// `x` and `y` must each point to `darts` readable `uint32_t`; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn regmap_map_from_arrays(
    darts: usize,
    x: *const u32,
    y: *const u32,
    out: *mut *mut RegmapMap,
) -> RegmapStatus {
    guard(|| {
        check_out(out)?;
        let x = Perm::from_images(slice_arg(x, darts)?.to_vec())?;
        let y = Perm::from_images(slice_arg(y, darts)?.to_vec())?;
        let m = OrientedMap::validate(darts, x, y)?;
        write_out(out, boxed(m))
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `map` must be null or a live handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn regmap_map_free(map: *mut RegmapMap) {
    if !map.is_null() {
        // SAFETY: ownership returns to Rust exactly once per the contract.
        drop(unsafe { Box::from_raw(map) });
    }
}

/// Independent copy of a handle.
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn regmap_map_clone(map: *const RegmapMap, out: *mut *mut RegmapMap) -> RegmapStatus {
    guard(|| {
        let m = map_ref(map)?.clone();
        write_out(out, boxed(m))
    })
}

/// Number of darts.
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn regmap_map_darts(map: *const RegmapMap, out: *mut usize) -> RegmapStatus {
    guard(|| write_out(out, map_ref(map)?.darts()))
}

/// Copies the images of `x` (`which == 0`) or `y` (`which == 1`) into `buf`,
/// which must hold at least as many entries as the map has darts.
///
/// # Safety
/// `map` must be a live handle and `buf` must have `len` writable entries.
#[no_mangle]
pub unsafe extern "C" fn regmap_map_generator(
    map: *const RegmapMap,
    which: u32,
    buf: *mut u32,
    len: usize,
) -> RegmapStatus {
    guard(|| {
        let m = map_ref(map)?;
        let g = match which {
            0 => m.x(),
            1 => m.y(),
            _ => {
                return Err(Failure::new(
                    RegmapStatus::InvalidArgument,
                    "generator must be 0 (x) or 1 (y)",
                ))
            }
        };
        check_out(buf)?;
        if len < m.darts() {
            return Err(Failure::new(
                RegmapStatus::InvalidArgument,
                format!("buffer holds {len} entries, map has {} darts", m.darts()),
            ));
        }
        // SAFETY: `buf` has at least `len >= darts` writable entries.
        unsafe { std::slice::from_raw_parts_mut(buf, m.darts()) }.copy_from_slice(g.images());
        Ok(())
    })
}

/// Type `{m, n}`: face length and valency.
///
/// # Safety
/// `map` must be a live handle; `m` and `n` must be writable.
#[no_mangle]
pub unsafe extern "C" fn regmap_map_type(map: *const RegmapMap, m: *mut u64, n: *mut u64) -> RegmapStatus {
    guard(|| {
        let t = map_ref(map)?.map_type();
        check_out(m)?;
        check_out(n)?;
        write_out(m, t.m)?;
        write_out(n, t.n)
    })
}

/// Dart, vertex, edge and face counts with Euler characteristic and genus.
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn regmap_map_census(map: *const RegmapMap, out: *mut RegmapCensus) -> RegmapStatus {
    guard(|| {
        let m = map_ref(map)?;
        let c = m.census();
        write_out(
            out,
            RegmapCensus {
                darts: m.darts() as u64,
                vertices: c.vertices,
                edges: c.edges,
                faces: c.faces,
                euler_characteristic: c.euler_characteristic,
                genus: c.genus,
            },
        )
    })
}

/// Whether the map admits an orientation-reversing automorphism.
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn regmap_map_is_reflexible(map: *const RegmapMap, out: *mut bool) -> RegmapStatus {
    guard(|| write_out(out, is_reflexible(map_ref(map)?).verdict == Chirality::Reflexible))
}

/// The dual map (generators swapped).
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn regmap_map_dual(map: *const RegmapMap, out: *mut *mut RegmapMap) -> RegmapStatus {
    guard(|| {
        let d = map_ref(map)?.dual();
        write_out(out, boxed(d))
    })
}

/// The mirror image (both generators inverted).
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn regmap_map_mirror(map: *const RegmapMap, out: *mut *mut RegmapMap) -> RegmapStatus {
    guard(|| {
        let d = map_ref(map)?.mirror();
        write_out(out, boxed(d))
    })
}

/// Parallel product of two maps of the same type. `limit` bounds the pair
/// space `darts(a) * darts(b)`; 0 selects the library default.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn regmap_parallel_product(
    a: *const RegmapMap,
    b: *const RegmapMap,
    limit: u64,
    out: *mut *mut RegmapMap,
) -> RegmapStatus {
    guard(|| {
        let (a, b) = (map_ref(a)?, map_ref(b)?);
        check_out(out)?;
        let limit = if limit == 0 { DEFAULT_PRODUCT_LIMIT } else { limit };
        let p = parallel_product_with_limit(a, b, limit)?;
        write_out(out, boxed(p))
    })
}

/// Index of the parallel product's group in the direct product.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn regmap_product_index(a: *const RegmapMap, b: *const RegmapMap, out: *mut u64) -> RegmapStatus {
    guard(|| {
        let (a, b) = (map_ref(a)?, map_ref(b)?);
        check_out(out)?;
        write_out(out, goursat_classify(a, b)?.index)
    })
}

/// Whether `big` is a smooth cover of `small`.
///
/// # Safety
/// Both must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn regmap_is_smooth_cover(
    big: *const RegmapMap,
    small: *const RegmapMap,
    out: *mut bool,
) -> RegmapStatus {
    guard(|| write_out(out, is_smooth_cover(map_ref(big)?, map_ref(small)?)))
}

/// The torus map `{4,4}_(b,c)` (`square == true`) or `{3,6}_(b,c)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn regmap_torus(square: bool, b: u64, c: u64, out: *mut *mut RegmapMap) -> RegmapStatus {
    guard(|| {
        check_out(out)?;
        let m = if square {
            torus_map_44(b, c)?
        } else {
            torus_map_36(b, c)?
        };
        write_out(out, boxed(m))
    })
}

/// A map from the built-in catalog by name.
///
/// # Safety
/// `name` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn regmap_catalog_get(name: *const c_char, out: *mut *mut RegmapMap) -> RegmapStatus {
    guard(|| {
        let name = str_arg(name)?;
        check_out(out)?;
        let entry = catalog_get(name)?;
        write_out(out, boxed(entry.map))
    })
}

/// Parses and validates a map from its JSON text.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn regmap_map_from_json(json: *const c_char, out: *mut *mut RegmapMap) -> RegmapStatus {
    guard(|| {
        let text = str_arg(json)?;
        check_out(out)?;
        let m = parse_map_str(text)?;
        write_out(out, boxed(m))
    })
}

/// Canonical JSON text of a map. Release with [`regmap_string_free`].
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn regmap_map_to_json(map: *const RegmapMap, out: *mut *mut c_char) -> RegmapStatus {
    guard(|| {
        let text = emit_map_string(map_ref(map)?);
        let c = CString::new(text).map_err(|e| Failure::new(RegmapStatus::Internal, e.to_string()))?;
        write_out(out, c.into_raw())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn regmap_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: the string was produced by `CString::into_raw` here.
        drop(unsafe { CString::from_raw(s) });
    }
}
