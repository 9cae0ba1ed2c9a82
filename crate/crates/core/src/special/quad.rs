//! Adaptive Gauss–Kronrod integration on finite and semi-infinite ranges.

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208980160149,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

const MAX_INTERVALS: usize = 400;
const MAX_SEGMENTS: usize = 120;

/// Tolerances for [`integrate`] and [`integrate_to_infinity`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-13,
            abs: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    for (i, (&x, &w)) in XGK[..10].iter().zip(&WGK[..10]).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        res_k += w * pair;
        if i % 2 == 1 {
            res_g += WG[i / 2] * pair;
        }
    }
    let value = res_k * half;
    let error = ((res_k - res_g) * half).abs();
    Piece { a, b, value, error }
}

/// Globally adaptive integration of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut pieces = vec![kronrod21(&f, a, b)];
    loop {
        let (value, error) = pieces
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if !value.is_finite() {
            return Err(Error::Convergence {
                what: "adaptive quadrature (non-finite integrand)",
                rel_change: f64::NAN,
            });
        }
        let target = tol.abs.max(tol.rel * value.abs());
        // Roundoff floor: once the error is at the level of f64 resolution we stop.
        if error <= target || error <= 64.0 * f64::EPSILON * value.abs() {
            return Ok(value);
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::Convergence {
                what: "adaptive quadrature",
                rel_change: error / value.abs(),
            });
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // Interval cannot be split further in f64.
            return Ok(value);
        }
        pieces.push(kronrod21(&f, p.a, mid));
        pieces.push(kronrod21(&f, mid, p.b));
    }
}

/// Integrates `f` over `[a, inf)` by adaptive integration on consecutive
/// segments of doubling width, starting at `width`. Stops once a segment adds
/// less than `1e-17` of the running total and the integrand is decaying.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    width: f64,
    tol: Tolerance,
) -> Result<f64> {
    let mut total: f64 = 0.0;
    let mut lo = a;
    let mut h = width;
    let mut quiet = 0;
    for _ in 0..MAX_SEGMENTS {
        let hi = lo + h;
        let seg_tol = Tolerance {
            rel: tol.rel,
            abs: tol.abs.max(0.1 * tol.rel * total.abs()),
        };
        let part = integrate(&f, lo, hi, seg_tol)?;
        total += part;
        let decaying = f(hi).abs() <= f(lo).abs();
        if part.abs() <= 1e-17 * total.abs() && decaying {
            quiet += 1;
            if quiet >= 2 {
                return Ok(total);
            }
        } else if total == 0.0 && part == 0.0 && decaying && lo > a {
            // Integrand vanished identically beyond the start.
            return Ok(0.0);
        } else {
            quiet = 0;
        }
        lo = hi;
        h *= 2.0;
    }
    Err(Error::Convergence {
        what: "semi-infinite quadrature",
        rel_change: f64::NAN,
    })
}
