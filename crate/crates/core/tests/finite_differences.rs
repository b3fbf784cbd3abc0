use adam3_core::diagnostics::{finite_diff_check, finite_diff_deviation};
use adam3_core::{BilinearGame, Point64, QuadraticGame, QuadraticGameParams};

fn pt(a: f64, b: f64) -> Point64 {
    Point64::new(vec![a, b], 1).unwrap()
}

/// F(θ, α) = θ⁴ + θ²α − α⁴, field (4θ³ + 2θα, −(θ² − 4α³)).
fn quartic_value(p: &Point64) -> f64 {
    let (t, a) = (p.values()[0], p.values()[1]);
    t.powi(4) + t * t * a - a.powi(4)
}

fn quartic_field(p: &Point64) -> Vec<f64> {
    let (t, a) = (p.values()[0], p.values()[1]);
    vec![4.0 * t.powi(3) + 2.0 * t * a, -(t * t - 4.0 * a.powi(3))]
}

#[test]
fn quartic_error_decays_quadratically() {
    let p = pt(1.3, -0.7);
    let hs = [1e-2, 1e-3, 1e-4];
    let devs: Vec<f64> = hs.iter().map(|&h| finite_diff_deviation(quartic_value, quartic_field, &p, h).unwrap()).collect();
    for w in devs.windows(2).zip(hs.windows(2)) {
        let (d, h) = w;
        let slope = (d[0] / d[1]).log10() / (h[0] / h[1]).log10();
        assert!((slope - 2.0).abs() < 0.3, "slope {slope} from {devs:?}");
    }
}

#[test]
fn closed_form_games_agree_with_differences() {
    let q = QuadraticGame::new(QuadraticGameParams::new(1010.0, 0.01).unwrap()).unwrap();
    let b = BilinearGame::new(-1.7).unwrap();
    for p in [pt(1.0, 1.0), pt(-167.8, -169.5), pt(40.0, -3.0)] {
        assert!(finite_diff_check(&q, &p, 1e-5).unwrap() < 1e-6);
        assert!(finite_diff_check(&b, &p, 1e-3).unwrap() < 1e-9);
    }
}
