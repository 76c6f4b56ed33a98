//! Bivariate Gaussian orthant probabilities and their iterated form.

use std::f64::consts::PI;

use libm::erfc;

use crate::error::{invalid, Result};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn poly(coef: &[f64], x: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Inverse standard normal CDF, Wichura's AS241 (PPND16); relative error about 1e-16.
#[allow(clippy::excessive_precision)] // coefficients as published
pub fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 8] = [
        3.387_132_872_796_366_608,
        1.331_416_678_917_843_774_5e2,
        1.971_590_950_306_551_442_7e3,
        1.373_169_376_550_946_112_5e4,
        4.592_195_393_154_987_145_7e4,
        6.726_577_092_700_870_085_3e4,
        3.343_057_558_358_812_810_5e4,
        2.509_080_928_730_122_672_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091_125_2e1,
        6.871_870_074_920_579_083e2,
        5.394_196_021_424_751_107_7e3,
        2.121_379_430_158_659_586_7e4,
        3.930_789_580_009_271_061e4,
        2.872_908_573_572_194_267_4e4,
        5.226_495_278_852_854_561e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_577_34,
        4.630_337_846_156_545_295_9,
        5.769_497_221_460_691_405_5,
        3.647_848_324_763_204_605_04,
        1.270_458_252_452_368_382_58,
        2.417_807_251_774_506_117_7e-1,
        2.272_384_498_926_918_458_33e-2,
        7.745_450_142_783_414_076_4e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_758_821_87,
        1.676_384_830_183_803_849_4,
        6.897_673_349_851_000_045_5e-1,
        1.481_039_764_274_800_745_9e-1,
        1.519_866_656_361_645_719_66e-2,
        5.475_938_084_995_344_946e-4,
        1.050_750_071_644_416_843_24e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103_777_2,
        5.463_784_911_164_114_369_9,
        1.784_826_539_917_291_335_8,
        2.965_605_718_285_048_912_3e-1,
        2.653_218_952_657_612_309_3e-2,
        1.242_660_947_388_078_438_6e-3,
        2.711_555_568_743_487_578_15e-5,
        2.010_334_399_292_288_132_65e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_879_376_9e-1,
        1.369_298_809_227_358_053_1e-1,
        1.487_536_129_085_061_485_25e-2,
        7.868_691_311_456_132_591e-4,
        1.846_318_317_510_054_681_8e-5,
        1.421_511_758_316_445_888_7e-7,
        2.044_263_103_389_939_785_64e-15,
    ];
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r.ln()).sqrt();
    let v = if r <= 5.0 {
        let r = r - 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -v
    } else {
        v
    }
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Absolute tolerance used for the correlation integral.
const QUAD_TOL: f64 = 1e-12;

/// `Pr[g₁ ≤ Φ⁻¹(μ₁) ∧ g₂ ≤ Φ⁻¹(μ₂)]` for standard Gaussians with correlation `ρ`.
/// Computed as `μ₁μ₂` plus the integral over `t ∈ [0, ρ]` of the bivariate density at
/// the corner point, which is the derivative of the orthant probability in `t`.
pub fn gamma2(rho: f64, mu1: f64, mu2: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(invalid(format!("correlation {rho} outside [-1, 1]")));
    }
    for mu in [mu1, mu2] {
        if !(0.0..=1.0).contains(&mu) {
            return Err(invalid(format!("bias {mu} outside [0, 1]")));
        }
    }
    if mu1 == 0.0 || mu2 == 0.0 {
        return Ok(0.0);
    }
    if mu1 == 1.0 {
        return Ok(mu2);
    }
    if mu2 == 1.0 {
        return Ok(mu1);
    }
    if rho == 1.0 {
        return Ok(mu1.min(mu2));
    }
    if rho == -1.0 {
        return Ok((mu1 + mu2 - 1.0).max(0.0));
    }
    let (a, b) = (normal_quantile(mu1), normal_quantile(mu2));
    let density = |t: f64| {
        let s = 1.0 - t * t;
        (-(a * a - 2.0 * t * a * b + b * b) / (2.0 * s)).exp() / (2.0 * PI * s.sqrt())
    };
    let integral = if rho == 0.0 { 0.0 } else { adaptive_simpson(&density, 0.0, rho, QUAD_TOL) };
    Ok((mu1 * mu2 + integral).clamp(0.0, mu1.min(mu2)))
}

/// Iterated stability `Γ(μ₁, Γ(μ₂, …, μ_r))`; a single bias is returned unchanged.
pub fn gaussian_stability(rho: f64, mus: &[f64]) -> Result<f64> {
    let (&last, rest) = mus.split_last().ok_or_else(|| invalid("need at least one bias"))?;
    if !(0.0..=1.0).contains(&last) {
        return Err(invalid(format!("bias {last} outside [0, 1]")));
    }
    rest.iter().rev().try_fold(last, |acc, &mu| gamma2(rho, mu, acc))
}
