mod common;

use nch_core::{phi0, phi1, phi1_minus_phi2, phi2};
use rand::Rng;

fn ours(a: f64) -> [f64; 4] {
    [phi0(a).unwrap(), phi1(a).unwrap(), phi2(a).unwrap(), phi1_minus_phi2(a).unwrap()]
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

#[test]
fn matches_exact_rational_values_at_reference_points() {
    for a in [1e-8, 1e-4, 1e-2, 1.0, 10.0, 100.0] {
        let exact = common::exact_phi(a);
        let got = ours(a);
        for (k, (g, e)) in got.iter().zip(&exact).enumerate() {
            assert!(rel(*g, *e) <= 1e-13, "a = {a}, function {k}: {g} vs {e}");
        }
    }
}

#[test]
fn matches_exact_values_around_the_series_switches() {
    let mut rng = common::rng(11);
    for _ in 0..40 {
        let a = 10f64.powf(rng.random_range(-3.0..0.5));
        let exact = common::exact_phi(a);
        for (g, e) in ours(a).iter().zip(&exact) {
            assert!(rel(*g, *e) <= 1e-13, "a = {a}: {g} vs {e}");
        }
    }
}

#[test]
fn weighted_bounds_hold_for_random_arguments() {
    let mut rng = common::rng(7);
    for _ in 0..10_000 {
        let a = 10f64.powf(rng.random_range(-6.0..2.5));
        let [p0, p1, p2, d] = ours(a);
        let w = 1.0 + a;
        assert!(w * p0 > 0.0 && w * p0 < 1.0, "a = {a}");
        assert!(w * p1 > 1.0 && w * p1 < 2.0, "a = {a}");
        assert!(w * p2 > 0.5 && w * p2 < 1.0, "a = {a}");
        assert!(w * d > 0.0 && w * d < 1.0, "a = {a}");
    }
}

#[test]
fn damped_exponential_bound_for_random_arguments() {
    // 0 < (1 + a r) e^{-a r} < 1 for r = τ − s ∈ (0, 1].
    let mut rng = common::rng(8);
    for _ in 0..10_000 {
        let a = 10f64.powf(rng.random_range(-2.0..2.5));
        let tau: f64 = rng.random_range(1e-3..=1.0);
        let s = rng.random_range(0.0..tau);
        let r = tau - s;
        let v = (1.0 + a * r) * phi0(a * r).unwrap();
        if a * r > 1e-6 {
            assert!(v > 0.0 && v < 1.0, "a = {a}, r = {r}: {v}");
        }
    }
}

#[test]
fn monotone_decreasing_in_the_argument() {
    let mut prev = ours(0.0);
    let mut a = 1e-6;
    while a < 500.0 {
        let cur = ours(a);
        for k in 0..4 {
            assert!(cur[k] <= prev[k], "function {k} increased at a = {a}");
        }
        prev = cur;
        a *= 1.07;
    }
}
