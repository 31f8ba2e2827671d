use lattice_wiretap::lattice::{Family, Lattice};
use lattice_wiretap::zeta::{
    divisor_sigma, epstein_zeta_d4, epstein_zeta_direct, epstein_zeta_family, epstein_zeta_z4, r4,
    riemann_zeta, select_resummation, shifted_zeta_d4_closed, shifted_zeta_direct,
    shifted_zeta_family, shifted_zeta_z4_closed, ClosedRange, Resummation, SeriesControl, ZetaMode,
};
use lattice_wiretap::Error;

// reference values computed independently at 30 digits
const ZETA_Z4_8: f64 = 8.099191046897264;
const ZETA_D4_8: f64 = 0.09417664008020075;

fn close(a: f64, b: f64, rel: f64) -> bool {
    ((a - b) / b).abs() <= rel
}

#[test]
fn riemann_zeta_values() {
    assert!(close(
        riemann_zeta(2.0).unwrap(),
        std::f64::consts::PI.powi(2) / 6.0,
        1e-14
    ));
    assert!(close(
        riemann_zeta(4.0).unwrap(),
        std::f64::consts::PI.powi(4) / 90.0,
        1e-14
    ));
    assert!(riemann_zeta(1.0).is_err());
}

#[test]
fn divisor_sums_and_four_squares() {
    assert_eq!(divisor_sigma(12).unwrap(), 28);
    assert_eq!(
        [r4(0), r4(1), r4(2), r4(3), r4(4), r4(5)],
        [1, 8, 24, 32, 24, 48]
    );
    assert_eq!(r4(8), 24);
    assert!(divisor_sigma(0).is_err());
}

#[test]
fn epstein_values_at_eight() {
    assert!(close(epstein_zeta_z4(8.0).unwrap(), ZETA_Z4_8, 1e-13));
    assert!(close(epstein_zeta_d4(8.0).unwrap(), ZETA_D4_8, 1e-13));
}

#[test]
fn epstein_direct_sum_brackets_the_closed_form() {
    let ctrl = SeriesControl {
        sum_radius_sq: 400.0,
        ..SeriesControl::default()
    };
    for (lat, s) in [(Lattice::integer(4), 6.0), (Lattice::d4(), 10.0)] {
        let direct = epstein_zeta_direct(&lat, s, &ctrl).unwrap();
        let closed = lattice_wiretap::zeta::epstein_zeta_closed(&lat, s).unwrap();
        assert!(
            direct.contains(closed, 1e-13 * closed),
            "{} s={s}",
            lat.label()
        );
    }
}

#[test]
fn epstein_needs_s_above_two() {
    let ctrl = SeriesControl::default();
    assert!(matches!(
        epstein_zeta_direct(&Lattice::integer(4), 2.0, &ctrl),
        Err(Error::Domain(_))
    ));
    assert!(epstein_zeta_z4(2.0).is_err());
}

#[test]
fn scaling_by_one_is_identity() {
    assert_eq!(
        epstein_zeta_family(Family::D4, 1.0, 8.0).unwrap(),
        epstein_zeta_d4(8.0).unwrap()
    );
    let mu = 2f64.powf(-0.25);
    assert!(close(
        epstein_zeta_family(Family::D4, mu, 8.0).unwrap(),
        16.0 * ZETA_D4_8,
        1e-13
    ));
}

#[test]
fn shifted_zeta_matches_direct_sum() {
    let ctrl = SeriesControl {
        sum_radius_sq: 600.0,
        ..SeriesControl::default()
    };
    for (family, lat) in [
        (Family::Z4, Lattice::integer(4)),
        (Family::D4, Lattice::d4()),
    ] {
        let direct = shifted_zeta_direct(&lat, 10.0, 0.5, &ctrl).unwrap().value;
        let v = shifted_zeta_family(family, 1.0, 10.0, 0.5, ZetaMode::Validated).unwrap();
        assert!(close(v, direct, 1e-9), "{family:?}: {v} vs {direct}");
    }
}

#[test]
fn printed_forms_at_a_equal_one() {
    let z = shifted_zeta_z4_closed(8.0, 1.0, ClosedRange::Narrow, ZetaMode::Approximate).unwrap();
    let want = 1.0 + 8.0 / 256.0 - 8.0 * 4f64.powi(-7) * 0.75f64.powi(8);
    assert!(close(z, want, 1e-14));
    let d = shifted_zeta_d4_closed(8.0, 1.0, ClosedRange::Narrow, ZetaMode::Approximate).unwrap();
    let want = 1.0 - 3.0 * 4f64.powi(-6) * 0.75f64.powi(8);
    assert!(close(d, want, 1e-14));
}

#[test]
fn shift_beyond_shell_cut_diverges() {
    assert!(matches!(
        shifted_zeta_z4_closed(8.0, 2.5, ClosedRange::Narrow, ZetaMode::Validated),
        Err(Error::SeriesDivergent { .. })
    ));
    assert!(shifted_zeta_z4_closed(8.0, 2.5, ClosedRange::Wide, ZetaMode::Validated).is_ok());
    assert!(shifted_zeta_d4_closed(8.0, 0.0, ClosedRange::Narrow, ZetaMode::Validated).is_err());
}

#[test]
fn negative_binomial_resummation_is_selected() {
    for (s, x) in [(8.0, 0.1), (10.0, 0.25), (12.0, 0.5)] {
        let check = select_resummation(s, x).unwrap();
        assert_eq!(check.selected, Resummation::NegativeBinomial);
        assert!(check.negative_binomial_error < check.one_minus_power_error);
    }
}

#[test]
fn mode_names() {
    assert_eq!("paper".parse::<ZetaMode>().unwrap(), ZetaMode::Approximate);
    assert_eq!(
        "validated".parse::<ZetaMode>().unwrap(),
        ZetaMode::Validated
    );
    assert_eq!(ZetaMode::Approximate.to_string(), "paper");
    assert!("exact".parse::<ZetaMode>().is_err());
}
