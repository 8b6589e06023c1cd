use std::ffi::CStr;
use std::ptr;

use charpoly_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(cp_last_error()) }.to_string_lossy().into_owned()
}

struct Handle(*mut CpEnsemble);

impl Handle {
    fn new(kind: CpEnsembleKind, dim: usize, source: Option<&[f64]>) -> Self {
        let mut h = ptr::null_mut();
        let src = source.map_or(ptr::null(), |s| s.as_ptr());
        let st = unsafe { cp_ensemble_new(kind as u32, dim, src, &mut h) };
        assert_eq!(st, CpStatus::Ok, "{}", last_error());
        Handle(h)
    }
}

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { cp_ensemble_free(self.0) };
    }
}

#[test]
fn n1_goe_pair_at_origin() {
    let h = Handle::new(CpEnsembleKind::Goe, 1, None);
    let mut out = CpComplex::default();
    let st = unsafe { cp_dual_correlator(h.0, [0.0, 0.0].as_ptr(), 2, CpDualMethod::Monomial as u32, &mut out) };
    assert_eq!(st, CpStatus::Ok);
    assert_eq!(out, CpComplex { re: 1.0, im: 0.0 });
    assert_eq!(last_error(), "");
}

#[test]
fn dual_matches_oracle_through_the_abi() {
    let h = Handle::new(CpEnsembleKind::Gue, 3, None);
    let l = [0.4, -0.9, 1.3];
    let (mut a, mut b, mut c) = (CpComplex::default(), CpComplex::default(), CpComplex::default());
    unsafe {
        assert_eq!(cp_dual_correlator(h.0, l.as_ptr(), 3, CpDualMethod::Monomial as u32, &mut a), CpStatus::Ok);
        assert_eq!(cp_dual_correlator(h.0, l.as_ptr(), 3, CpDualMethod::Quadrature as u32, &mut b), CpStatus::Ok);
        assert_eq!(cp_wick_oracle(h.0, l.as_ptr(), 3, &mut c), CpStatus::Ok);
    }
    for z in [b, c] {
        assert!((a.re - z.re).abs() + (a.im - z.im).abs() < 1e-10 * a.re.abs().max(1.0));
    }
}

#[test]
fn mc_reports_a_standard_error() {
    let h = Handle::new(CpEnsembleKind::Goe, 2, Some(&[0.3, -0.3]));
    let mut out = CpComplex::default();
    let mut se = 0.0;
    let st = unsafe { cp_mc_correlator(h.0, [0.5].as_ptr(), 1, 20_000, 9, &mut out, &mut se) };
    assert_eq!(st, CpStatus::Ok);
    assert!(se > 0.0 && se < 0.1);
    // null stderr pointer is allowed
    let st = unsafe { cp_mc_correlator(h.0, [0.5].as_ptr(), 1, 100, 9, &mut out, ptr::null_mut()) };
    assert_eq!(st, CpStatus::Ok);
}

#[test]
fn error_codes_and_messages() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { cp_ensemble_new(7, 2, ptr::null(), &mut h) }, CpStatus::InvalidArgument);
    assert!(h.is_null());
    assert!(last_error().contains("ensemble kind"));
    assert_eq!(unsafe { cp_ensemble_new(0, 0, ptr::null(), &mut h) }, CpStatus::InvalidArgument);
    assert_eq!(unsafe { cp_ensemble_new(0, 2, ptr::null(), ptr::null_mut()) }, CpStatus::NullPointer);

    let g = Handle::new(CpEnsembleKind::Goe, 2, None);
    let mut out = CpComplex::default();
    let five = [0.1, 0.2, 0.3, 0.4, 0.5];
    let st = unsafe { cp_dual_correlator(g.0, five.as_ptr(), 5, 0, &mut out) };
    assert_eq!(st, CpStatus::Budget);
    assert!(last_error().contains("budget"));
    let st = unsafe { cp_dual_correlator(g.0, five.as_ptr(), 3, 9, &mut out) };
    assert_eq!(st, CpStatus::InvalidArgument);
    let st = unsafe { cp_wick_oracle(ptr::null(), five.as_ptr(), 1, &mut out) };
    assert_eq!(st, CpStatus::NullPointer);
    let st = unsafe { cp_wick_oracle(g.0, ptr::null(), 2, &mut out) };
    assert_eq!(st, CpStatus::NullPointer);
    let st = unsafe { cp_dual_correlator(g.0, [0.1, 0.1, 0.2].as_ptr(), 3, 0, &mut out) };
    assert_eq!(st, CpStatus::Degenerate);
}

#[test]
fn pfaffian_of_a_block() {
    let z = |re: f64| CpComplex { re, im: 0.0 };
    let m = [z(0.0), z(2.5), z(-2.5), z(0.0)];
    let mut out = CpComplex::default();
    assert_eq!(unsafe { cp_pfaffian(m.as_ptr(), 2, &mut out) }, CpStatus::Ok);
    assert_eq!(out, z(2.5));
    let bad = [z(1.0), z(2.5), z(-2.5), z(0.0)];
    assert_eq!(unsafe { cp_pfaffian(bad.as_ptr(), 2, &mut out) }, CpStatus::InvalidArgument);
}

#[test]
fn constants_and_kernels() {
    let mut g = 0.0;
    assert_eq!(unsafe { cp_gamma_k(CpEnsembleKind::Goe as u32, 1, &mut g) }, CpStatus::Ok);
    assert_eq!(g, 1.0 / 6.0);
    assert_eq!(unsafe { cp_gamma_k(CpEnsembleKind::Gue as u32, 2, &mut g) }, CpStatus::Ok);
    assert_eq!(g, 1.0 / 12.0);
    assert_eq!(unsafe { cp_gamma_k(0, 0, &mut g) }, CpStatus::InvalidArgument);
    assert_eq!(unsafe { cp_gamma_k(0, 99, &mut g) }, CpStatus::Budget);
    assert!((cp_kernel_sine(std::f64::consts::PI)).abs() < 1e-16);
    assert!((cp_kernel_goe(1e-9) + 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn chi_matches_the_library() {
    let tau = [CpComplex { re: 0.7, im: 0.0 }, CpComplex { re: -1.1, im: 0.0 }, CpComplex { re: 2.0, im: 0.0 }];
    let mut out = CpComplex::default();
    assert_eq!(unsafe { cp_chi_eval(3, tau.as_ptr(), &mut out) }, CpStatus::Ok);
    let t = charpoly::hiz::TauTable::new(3, tau.iter().map(|z| num_complex::Complex64::new(z.re, z.im)).collect()).unwrap();
    let want = charpoly::hiz::chi_eval(3, &t).unwrap();
    assert_eq!((out.re, out.im), (want.re, want.im));
    assert_eq!(unsafe { cp_chi_eval(5, tau.as_ptr(), &mut out) }, CpStatus::InvalidArgument);
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(cp_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/charpoly.h")).unwrap();
    for name in [
        "cp_last_error",
        "cp_version",
        "cp_ensemble_new",
        "cp_ensemble_free",
        "cp_mc_correlator",
        "cp_wick_oracle",
        "cp_dual_correlator",
        "cp_pfaffian",
        "cp_gamma_k",
        "cp_kernel_goe",
        "cp_kernel_sine",
        "cp_chi_eval",
        "typedef struct CpEnsemble CpEnsemble;",
        "CP_STATUS_BUDGET = 4",
        "CP_ENSEMBLE_KIND_GUE = 1",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = std::env::temp_dir().join(format!("charpoly-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("probe.c");
    std::fs::write(
        &src,
        "#include \"charpoly.h\"\nint probe(void) {\n  CpEnsemble *h = 0;\n  CpComplex z;\n  double l[2] = {0.0, 0.0};\n  if (cp_ensemble_new(CP_ENSEMBLE_KIND_GOE, 1, 0, &h) != CP_STATUS_OK) return 1;\n  cp_dual_correlator(h, l, 2, CP_DUAL_METHOD_MONOMIAL, &z);\n  cp_ensemble_free(h);\n  return z.re == 1.0 ? 0 : 2;\n}\n",
    )
    .unwrap();
    let status = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .status()
        .unwrap();
    let _ = std::fs::remove_dir_all(&dir);
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if std::process::Command::new(cc).arg("--version").output().is_ok() {
            return Ok(cc);
        }
    }
    Err(())
}
