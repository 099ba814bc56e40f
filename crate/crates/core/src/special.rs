//! Geometric constants of spheres and balls.

use statrs::function::gamma::gamma;
use std::f64::consts::PI;

/// Surface measure ℋ^{d−1}(𝕊^{d−1}) = d π^{d/2} / Γ(d/2 + 1).
pub fn sphere_area(d: usize) -> f64 {
    let d = d as f64;
    d * PI.powf(d / 2.0) / gamma(d / 2.0 + 1.0)
}

/// Lebesgue measure of the unit ball in ℝᵏ, π^{k/2} / Γ(k/2 + 1). `k = 0` gives 1.
pub fn ball_volume(k: usize) -> f64 {
    let k = k as f64;
    PI.powf(k / 2.0) / gamma(k / 2.0 + 1.0)
}

/// Constant c_{d,s} = Γ(d/2 + 1/2)√π / (4 s Γ(d/2 + 1)) scaling the nonlocal
/// perimeter functional and the nonlocal mean curvature.
pub fn perimeter_constant(d: usize, s: f64) -> f64 {
    let h = d as f64 / 2.0;
    gamma(h + 0.5) * PI.sqrt() / (4.0 * s * gamma(h + 1.0))
}

/// Same constant through ℋ^{d−1}(𝕊^{d−1}) / (4 d s |B^{d−1}|).
pub fn perimeter_constant_geometric(d: usize, s: f64) -> f64 {
    sphere_area(d) / (4.0 * d as f64 * s * ball_volume(d - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert!((sphere_area(1) - 2.0).abs() < 1e-14);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-13);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((ball_volume(0) - 1.0).abs() < 1e-14);
        assert!((ball_volume(1) - 2.0).abs() < 1e-14);
        assert!((ball_volume(2) - PI).abs() < 1e-13);
    }

    #[test]
    fn perimeter_constant_routes_agree() {
        // d = 2, s = 1/2: Γ(3/2)√π / (2 Γ(2)) = π/4
        assert!((perimeter_constant(2, 0.5) - PI / 4.0).abs() < 1e-12);
        for d in 1..=3 {
            for s in [0.1, 0.3, 0.5, 0.9] {
                let a = perimeter_constant(d, s);
                let b = perimeter_constant_geometric(d, s);
                assert!((a - b).abs() < 1e-12 * a, "d={d} s={s}");
            }
        }
    }
}
