//! Globally adaptive Gauss-Kronrod quadrature (21-point rule, QUADPACK QAG
//! style): bisect the segment with the largest error estimate until the
//! summed estimate meets the absolute tolerance.

use super::Tolerance;
use crate::error::{Error, Result};

// 21-point Kronrod abscissae (positive half), 10-point Gauss weights and
// 21-point Kronrod weights. Standard QUADPACK values.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// One 21-point Kronrod evaluation on [a, b] with a QUADPACK error estimate.
fn qk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * WGK[10];
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [0.0f64; 10];
    let mut fv2 = [0.0f64; 10];

    for j in 0..10 {
        let abscissa = half * XGK[j];
        let v1 = f(center - abscissa);
        let v2 = f(center + abscissa);
        fv1[j] = v1;
        fv2[j] = v2;
        let sum = v1 + v2;
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * sum;
        }
        res_kronrod += WGK[j] * sum;
        res_abs += WGK[j] * (v1.abs() + v2.abs());
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();

    let mut err = ((res_kronrod - res_gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * 1.0f64.min((200.0 * err / res_asc).powf(1.5));
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Integrate `f` over [lo, hi] to absolute accuracy `tol.abs_tol`.
///
/// Errors with [`Error::NonConvergence`] when the subdivision budget runs
/// out with the error estimate still above tolerance.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    tol: &Tolerance,
) -> Result<f64> {
    if !(lo < hi) {
        return Err(Error::Domain(format!(
            "integration interval must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain("integration bounds must be finite".into()));
    }

    let (value, error) = qk21(&f, lo, hi);
    let mut segments = vec![Segment {
        a: lo,
        b: hi,
        value,
        error,
    }];

    loop {
        let total_error: f64 = segments.iter().map(|s| s.error).sum();
        if total_error <= tol.abs_tol {
            break;
        }
        if segments.len() >= tol.max_subdivisions {
            return Err(Error::NonConvergence(format!(
                "quadrature error {total_error:.3e} above tolerance {:.3e} \
                 after {} subdivisions",
                tol.abs_tol,
                segments.len()
            )));
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("segment list is never empty");
        let Segment { a, b, .. } = segments.swap_remove(worst);
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            return Err(Error::NonConvergence(format!(
                "interval [{a}, {b}] cannot be subdivided further"
            )));
        }
        let (v1, e1) = qk21(&f, a, mid);
        let (v2, e2) = qk21(&f, mid, b);
        segments.push(Segment {
            a,
            b: mid,
            value: v1,
            error: e1,
        });
        segments.push(Segment {
            a: mid,
            b,
            value: v2,
            error: e2,
        });
    }

    // fixed summation order so the result does not depend on split history
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    Ok(super::compensated_sum(segments.iter().map(|s| s.value)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::normal_pdf;

    fn tol() -> Tolerance {
        Tolerance::new(1e-10, 400).unwrap()
    }

    #[test]
    fn constant_integrand() {
        let v = integrate_adaptive(|_| 1.0, 0.0, 1.0, &tol()).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn linear_integrand() {
        let v = integrate_adaptive(|x| x, 0.0, 2.0, &tol()).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
    }

    #[test]
    fn polynomials_up_to_degree_five() {
        // int_0^1 x^k dx = 1/(k+1)
        for k in 0..=5 {
            let v = integrate_adaptive(|x| x.powi(k), 0.0, 1.0, &tol()).unwrap();
            let want = 1.0 / (k as f64 + 1.0);
            assert!((v - want).abs() < 1e-12, "degree {k}");
        }
    }

    #[test]
    fn normal_density_mass() {
        let v = integrate_adaptive(normal_pdf, -8.0, 8.0, &tol()).unwrap();
        assert!((v - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn rejects_bad_interval() {
        assert!(integrate_adaptive(|x| x, 1.0, 1.0, &tol()).is_err());
        assert!(integrate_adaptive(|x| x, 2.0, 1.0, &tol()).is_err());
        assert!(integrate_adaptive(|x| x, 0.0, f64::INFINITY, &tol()).is_err());
    }

    #[test]
    fn reports_non_convergence() {
        let tight = Tolerance::new(1e-300, 3).unwrap();
        let r = integrate_adaptive(|x| (40.0 * x).sin().abs(), 0.0, 10.0, &tight);
        assert!(matches!(r, Err(Error::NonConvergence(_))));
    }
}
