//! Closed-form integrals of the Newtonian kernel over axis-aligned boxes.
//! They replace midpoint quadrature next to the evaluation point.

use crate::numerics::Vec3;

/// `c·ln(a + r)` for the corner terms, returning 0 whenever `c = 0`.
/// `ln(a + r)` is evaluated stably when `a < 0`.
fn clog(c: f64, a: f64, r: f64, rest2: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    let s = if a >= 0.0 { a + r } else { rest2 / (r - a) };
    if s <= 0.0 {
        0.0
    } else {
        c * s.ln()
    }
}

fn catan(c: f64, num: f64, den: f64) -> f64 {
    if c == 0.0 || den == 0.0 {
        0.0
    } else {
        c * (num / den).atan()
    }
}

/// Antiderivative of `1/r` in all three coordinates.
fn f_corner(x: f64, y: f64, z: f64) -> f64 {
    let r = (x * x + y * y + z * z).sqrt();
    clog(x * y, z, r, x * x + y * y) + clog(y * z, x, r, y * y + z * z) + clog(z * x, y, r, z * z + x * x)
        - 0.5 * catan(x * x, y * z, x * r)
        - 0.5 * catan(y * y, z * x, y * r)
        - 0.5 * catan(z * z, x * y, z * r)
}

/// Antiderivative of `1/r` in the second and third coordinates.
fn h_corner(x: f64, y: f64, z: f64) -> f64 {
    let r = (x * x + y * y + z * z).sqrt();
    clog(y, z, r, x * x + y * y) + clog(z, y, r, z * z + x * x) - catan(x, y * z, x * r)
}

fn corners(lo: &Vec3, hi: &Vec3, f: impl Fn([f64; 3]) -> f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                let sign = if (i + j + k) % 2 == 1 { 1.0 } else { -1.0 };
                let c = [
                    if i == 1 { hi.x } else { lo.x },
                    if j == 1 { hi.y } else { lo.y },
                    if k == 1 { hi.z } else { lo.z },
                ];
                // upper corners carry a plus sign: (+,+,+) has i+j+k = 3
                acc += sign * f(c);
            }
        }
    }
    acc
}

/// `∫_box 1/|ξ| dξ` for the box `[lo, hi]` in coordinates relative to the
/// evaluation point.
pub fn box_inverse_distance(lo: &Vec3, hi: &Vec3) -> f64 {
    corners(lo, hi, |c| f_corner(c[0], c[1], c[2]))
}

/// `∫_box ξ/|ξ|³ dξ` for the box `[lo, hi]` relative to the evaluation point.
pub fn box_inverse_square(lo: &Vec3, hi: &Vec3) -> Vec3 {
    let gx = corners(lo, hi, |c| h_corner(c[0], c[1], c[2]));
    let gy = corners(lo, hi, |c| h_corner(c[1], c[2], c[0]));
    let gz = corners(lo, hi, |c| h_corner(c[2], c[0], c[1]));
    -Vec3::new(gx, gy, gz)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute<F: Fn(&Vec3) -> f64>(lo: &Vec3, hi: &Vec3, n: usize, f: F) -> f64 {
        let d = (hi - lo) / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let p = lo + Vec3::new((i as f64 + 0.5) * d.x, (j as f64 + 0.5) * d.y, (k as f64 + 0.5) * d.z);
                    acc += f(&p);
                }
            }
        }
        acc * d.x * d.y * d.z
    }

    #[test]
    fn centred_unit_cube_constant() {
        let v = box_inverse_distance(&Vec3::repeat(-0.5), &Vec3::repeat(0.5));
        // eight octant boxes [0, 1/2]^3 touching the singular corner
        let oct = box_inverse_distance(&Vec3::zeros(), &Vec3::repeat(0.5));
        assert!((v - 8.0 * oct).abs() < 1e-13);
        // midpoint quadrature converges slowly at the singularity; compare
        // with a coarse tolerance and against the known value 2.38008
        let b = brute(&Vec3::repeat(-0.5), &Vec3::repeat(0.5), 80, |p| 1.0 / p.norm());
        assert!((v - b).abs() < 2e-3, "{v} vs {b}");
        assert!((v - 2.380_077_7).abs() < 1e-6, "{v}");
    }

    #[test]
    fn offset_boxes_match_quadrature() {
        let cases = [
            (Vec3::new(0.3, -0.2, 0.1), Vec3::new(1.1, 0.5, 0.9)),
            (Vec3::new(-2.0, -1.0, -3.0), Vec3::new(-1.0, 0.5, -2.2)),
            (Vec3::new(0.5, 0.5, -0.5), Vec3::new(1.5, 1.5, 0.5)),
        ];
        for (lo, hi) in cases {
            let b = brute(&lo, &hi, 120, |p| 1.0 / p.norm());
            let v = box_inverse_distance(&lo, &hi);
            assert!((v - b).abs() < 1e-4 * b.abs(), "{v} {b}");
            let g = box_inverse_square(&lo, &hi);
            for k in 0..3 {
                let bk = brute(&lo, &hi, 120, |p| p[k] / p.norm().powi(3));
                assert!((g[k] - bk).abs() < 2e-4 * bk.abs().max(0.1), "{k}: {} {bk}", g[k]);
            }
        }
    }

    #[test]
    fn centred_box_has_no_net_field() {
        let g = box_inverse_square(&Vec3::repeat(-0.5), &Vec3::repeat(0.5));
        assert!(g.norm() < 1e-14);
    }
}
