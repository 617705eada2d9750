use std::ffi::{CStr, CString};
use std::ptr;

use regmap_ffi::*;

fn last_error() -> String {
    let p = regmap_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn torus(square: bool, b: u64, c: u64) -> *mut RegmapMap {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { regmap_torus(square, b, c, &mut out) }, RegmapStatus::Ok);
    out
}

fn generators(m: *const RegmapMap) -> (Vec<u32>, Vec<u32>) {
    let mut d = 0usize;
    assert_eq!(unsafe { regmap_map_darts(m, &mut d) }, RegmapStatus::Ok);
    let (mut x, mut y) = (vec![0u32; d], vec![0u32; d]);
    unsafe {
        assert_eq!(regmap_map_generator(m, 0, x.as_mut_ptr(), d), RegmapStatus::Ok);
        assert_eq!(regmap_map_generator(m, 1, y.as_mut_ptr(), d), RegmapStatus::Ok);
    }
    (x, y)
}

#[test]
fn torus_handles_report_census_and_chirality() {
    let t = torus(true, 2, 1);
    let mut c = RegmapCensus::default();
    let mut refl = true;
    let (mut m, mut n) = (0, 0);
    unsafe {
        assert_eq!(regmap_map_census(t, &mut c), RegmapStatus::Ok);
        assert_eq!(regmap_map_is_reflexible(t, &mut refl), RegmapStatus::Ok);
        assert_eq!(regmap_map_type(t, &mut m, &mut n), RegmapStatus::Ok);
    }
    assert_eq!((c.darts, c.vertices, c.edges, c.faces, c.genus), (20, 5, 10, 5, 1));
    assert_eq!(c.euler_characteristic, 0);
    assert!(!refl);
    assert_eq!((m, n), (4, 4));
    unsafe { regmap_map_free(t) };
}

#[test]
fn arrays_round_trip_and_involutions() {
    let t = torus(false, 2, 1);
    let (x, y) = generators(t);
    let mut back = ptr::null_mut();
    let mut mirror = ptr::null_mut();
    let mut twice = ptr::null_mut();
    let mut dual = ptr::null_mut();
    let mut dual2 = ptr::null_mut();
    unsafe {
        assert_eq!(
            regmap_map_from_arrays(x.len(), x.as_ptr(), y.as_ptr(), &mut back),
            RegmapStatus::Ok
        );
        assert_eq!(regmap_map_mirror(t, &mut mirror), RegmapStatus::Ok);
        assert_eq!(regmap_map_mirror(mirror, &mut twice), RegmapStatus::Ok);
        assert_eq!(regmap_map_dual(t, &mut dual), RegmapStatus::Ok);
        assert_eq!(regmap_map_dual(dual, &mut dual2), RegmapStatus::Ok);
    }
    assert_eq!(generators(back), (x.clone(), y.clone()));
    assert_eq!(generators(twice), (x.clone(), y.clone()));
    assert_eq!(generators(dual2), (x.clone(), y.clone()));
    assert_eq!(generators(dual), (y, x));
    for h in [t, back, mirror, twice, dual, dual2] {
        unsafe { regmap_map_free(h) };
    }
}

#[test]
fn invalid_inputs_map_to_status_codes() {
    let mut out = ptr::null_mut();
    unsafe {
        // S3 on three points: transitive, not regular
        let (x, y) = ([1u32, 2, 0], [1u32, 0, 2]);
        assert_eq!(
            regmap_map_from_arrays(3, x.as_ptr(), y.as_ptr(), &mut out),
            RegmapStatus::NotRegular
        );
        assert!(out.is_null());
        assert!(last_error().contains("regular"));
        let (x, y) = ([1u32, 0, 2], [1u32, 0, 2]);
        assert_eq!(
            regmap_map_from_arrays(3, x.as_ptr(), y.as_ptr(), &mut out),
            RegmapStatus::NotTransitive
        );
        let (x, y) = ([0u32, 0, 2], [1u32, 0, 2]);
        assert_eq!(
            regmap_map_from_arrays(3, x.as_ptr(), y.as_ptr(), &mut out),
            RegmapStatus::NotPermutation
        );
        assert_eq!(
            regmap_map_from_arrays(3, ptr::null(), y.as_ptr(), &mut out),
            RegmapStatus::NullPointer
        );
        assert_eq!(
            regmap_map_from_arrays(3, x.as_ptr(), y.as_ptr(), ptr::null_mut()),
            RegmapStatus::NullPointer
        );
        assert_eq!(regmap_torus(true, 0, 0, &mut out), RegmapStatus::InvalidArgument);
        let name = CString::new("no-such-map").unwrap();
        assert_eq!(regmap_catalog_get(name.as_ptr(), &mut out), RegmapStatus::NotFound);
        let junk = CString::new("{\"format\":").unwrap();
        assert_eq!(regmap_map_from_json(junk.as_ptr(), &mut out), RegmapStatus::Parse);
        let mut d = 0usize;
        assert_eq!(regmap_map_darts(ptr::null(), &mut d), RegmapStatus::NullPointer);
        let t = torus(true, 1, 0);
        let mut buf = [0u32; 2];
        assert_eq!(
            regmap_map_generator(t, 0, buf.as_mut_ptr(), 2),
            RegmapStatus::InvalidArgument
        );
        assert_eq!(
            regmap_map_generator(t, 7, buf.as_mut_ptr(), 2),
            RegmapStatus::InvalidArgument
        );
        regmap_map_free(t);
        regmap_map_free(ptr::null_mut());
        regmap_string_free(ptr::null_mut());
    }
    assert!(out.is_null());
}

#[test]
fn products_covers_and_json() {
    let a = torus(true, 1, 0);
    let b = torus(true, 2, 1);
    let mut p = ptr::null_mut();
    let mut index = 0;
    let mut cov = (false, false, true);
    let mut json = ptr::null_mut();
    let mut parsed = ptr::null_mut();
    unsafe {
        assert_eq!(regmap_parallel_product(a, b, 0, &mut p), RegmapStatus::Ok);
        assert_eq!(regmap_product_index(a, b, &mut index), RegmapStatus::Ok);
        assert_eq!(regmap_is_smooth_cover(p, a, &mut cov.0), RegmapStatus::Ok);
        assert_eq!(regmap_is_smooth_cover(p, b, &mut cov.1), RegmapStatus::Ok);
        assert_eq!(regmap_is_smooth_cover(a, b, &mut cov.2), RegmapStatus::Ok);
        assert_eq!(
            regmap_parallel_product(a, b, 10, &mut ptr::null_mut()),
            RegmapStatus::TooLarge
        );
        let name = CString::new("tetrahedron").unwrap();
        let mut tet = ptr::null_mut();
        assert_eq!(regmap_catalog_get(name.as_ptr(), &mut tet), RegmapStatus::Ok);
        assert_eq!(
            regmap_parallel_product(a, tet, 0, &mut ptr::null_mut()),
            RegmapStatus::TypeMismatch
        );
        assert_eq!(regmap_map_to_json(p, &mut json), RegmapStatus::Ok);
        assert_eq!(regmap_map_from_json(json, &mut parsed), RegmapStatus::Ok);
        regmap_string_free(json);
        regmap_map_free(tet);
    }
    let mut d = 0;
    unsafe { regmap_map_darts(p, &mut d) };
    assert_eq!(d, 20);
    assert_eq!(index, 4);
    assert_eq!(cov, (true, true, false));
    assert_eq!(generators(parsed), generators(p));
    for h in [a, b, p, parsed] {
        unsafe { regmap_map_free(h) };
    }
}

#[test]
fn status_names_are_static() {
    let s = unsafe { CStr::from_ptr(regmap_status_name(RegmapStatus::TooLarge)) };
    assert_eq!(s.to_str().unwrap(), "too large");
}
