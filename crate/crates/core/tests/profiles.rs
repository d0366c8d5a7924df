//! Full lateral scans checked against frozen reference widths from an
//! independent scipy (DOP853) implementation.

use slap_core::analytic::{fwhm_cpt, fwhm_slap, k_of};
use slap_core::beams::{BeamDrive, OpticalGeometry, DEFAULT_DOUGHNUT_OFFSET};
use slap_core::lambda_system::{IntegratorConfig, LambdaMedium};
use slap_core::localization::{
    cpt_profile, effective_psf, fwhm_from_profile, scan_slap, SpatialGrid,
};
use slap_core::sted::{scan_sted, StedBeams, StedConfig, StedDye};
use slap_core::units::ghz_to_rad_per_ps;

fn gamma() -> f64 {
    ghz_to_rad_per_ps(6.36)
}

fn geom() -> OpticalGeometry {
    OpticalGeometry::new(490.0, 1.4).unwrap()
}

fn drive(r: f64) -> BeamDrive {
    BeamDrive::from_ratio(1.5 * gamma(), r, 100.0, 150.0).unwrap()
}

fn slap_fwhm(r: f64, grid: &SpatialGrid) -> f64 {
    let d = drive(r);
    let medium = LambdaMedium::symmetric(gamma()).unwrap();
    let profile = scan_slap(grid, &geom(), &d, &medium, &IntegratorConfig::for_drive(&d)).unwrap();
    fwhm_from_profile(&profile).unwrap().fwhm_nm
}

#[test]
fn slap_width_matches_reference() {
    // scipy reference on the same 1 nm grid
    let fwhm = slap_fwhm(50.0, &SpatialGrid::default_lateral());
    assert!((fwhm - 76.568_432).abs() < 0.01, "{fwhm}");
}

#[test]
fn slap_width_is_grid_converged() {
    let coarse = slap_fwhm(150.0, &SpatialGrid::uniform(-200.0, 200.0, 201).unwrap());
    let fine = slap_fwhm(150.0, &SpatialGrid::uniform(-200.0, 200.0, 801).unwrap());
    assert!((coarse - fine).abs() < 0.5, "{coarse} vs {fine}");
}

#[test]
fn slap_profile_is_even_and_narrows_with_r() {
    let grid = SpatialGrid::uniform(-150.0, 150.0, 61).unwrap();
    let medium = LambdaMedium::symmetric(gamma()).unwrap();
    let mut last = f64::INFINITY;
    for r in [10.0, 40.0, 160.0] {
        let d = drive(r);
        let p = scan_slap(
            &grid,
            &geom(),
            &d,
            &medium,
            &IntegratorConfig::for_drive(&d),
        )
        .unwrap();
        let v = p.values();
        for i in 0..v.len() / 2 {
            assert!((v[i] - v[v.len() - 1 - i]).abs() < 1e-6);
        }
        let w = fwhm_from_profile(&p).unwrap().fwhm_nm;
        assert!(w < last);
        last = w;
    }
}

#[test]
fn law_tracks_numerics_at_a_mid_ratio() {
    let k = k_of(1.5 * gamma(), 150.0, 20.0).unwrap();
    let law = fwhm_slap(&geom(), DEFAULT_DOUGHNUT_OFFSET, 150.0, k).unwrap();
    let numeric = slap_fwhm(150.0, &SpatialGrid::uniform(-150.0, 150.0, 301).unwrap());
    assert!((numeric / law - 1.0).abs() < 0.05, "{numeric} vs {law}");
}

#[test]
fn cpt_width_matches_exact_half_maximum() {
    // root of R [F(u,δ)+F(u,-δ)]^2 = F(u,0)^2 at R = 100, solved with brentq
    let exact_nm = 85.186_641_705;
    let grid = SpatialGrid::uniform(-400.0, 400.0, 1601).unwrap();
    let scan = cpt_profile(&grid, &drive(100.0), &geom()).unwrap();
    let fwhm = fwhm_from_profile(&scan.profile).unwrap().fwhm_nm;
    assert!((fwhm - exact_nm).abs() < 0.02, "{fwhm}");
    // the closed form overshoots the exact profile at this ratio
    let law = fwhm_cpt(&geom(), DEFAULT_DOUGHNUT_OFFSET, 100.0).unwrap();
    assert!(law > fwhm);
}

#[test]
fn effective_psf_is_narrower_than_population_profile() {
    let grid = SpatialGrid::uniform(-300.0, 300.0, 601).unwrap();
    let d = drive(50.0);
    let medium = LambdaMedium::symmetric(gamma()).unwrap();
    let p1 = scan_slap(
        &grid,
        &geom(),
        &d,
        &medium,
        &IntegratorConfig::for_drive(&d),
    )
    .unwrap();
    let psf = effective_psf(&p1, &geom()).unwrap();
    let w_p1 = fwhm_from_profile(&p1).unwrap().fwhm_nm;
    let w_psf = fwhm_from_profile(&psf).unwrap().fwhm_nm;
    assert!(w_psf < w_p1);
    assert_eq!(psf.peak(), 1.0);
}

#[test]
fn sted_widths_match_reference() {
    let grid = SpatialGrid::default_lateral();
    let dye = StedDye::rhodamine_b();
    let beams = StedBeams::default();
    let depleted = scan_sted(&grid, &dye, &beams, &StedConfig::for_beams(&beams)).unwrap();
    let w = fwhm_from_profile(&depleted).unwrap();
    assert!((w.fwhm_nm - 212.53).abs() < 0.1, "{}", w.fwhm_nm);
    assert!((w.peak_value - 0.851_68).abs() < 1e-4);

    // without depletion only the saturated excitation spot remains
    let off = StedBeams {
        h_d_peak: 0.0,
        ..beams
    };
    let plain = scan_sted(&grid, &dye, &off, &StedConfig::for_beams(&off)).unwrap();
    let w0 = fwhm_from_profile(&plain).unwrap().fwhm_nm;
    assert!((w0 - 287.03).abs() < 0.1, "{w0}");
}
