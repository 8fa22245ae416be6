//! Quadrature rules used across the crate: Gauss-Legendre on segments,
//! symmetric rules on triangles, and a recursive adaptive Simpson scheme
//! for the radial integrals.

/// 4-point Gauss-Legendre nodes/weights on [-1, 1]; exact through degree 7.
pub const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_86),
    (-0.339_981_043_584_856_26, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_26, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_86),
];

/// 16-point Gauss-Legendre nodes/weights on [-1, 1]; exact through degree 31.
pub const GL16: [(f64, f64); 16] = [
    (-0.989_400_934_991_649_9, 0.027_152_459_411_754_096),
    (-0.944_575_023_073_232_6, 0.062_253_523_938_647_894),
    (-0.865_631_202_387_831_7, 0.095_158_511_682_492_78),
    (-0.755_404_408_355_003, 0.124_628_971_255_533_87),
    (-0.617_876_244_402_643_7, 0.149_595_988_816_576_73),
    (-0.458_016_777_657_227_4, 0.169_156_519_395_002_55),
    (-0.281_603_550_779_258_9, 0.182_603_415_044_923_59),
    (-0.095_012_509_837_637_44, 0.189_450_610_455_068_5),
    (0.095_012_509_837_637_44, 0.189_450_610_455_068_5),
    (0.281_603_550_779_258_9, 0.182_603_415_044_923_59),
    (0.458_016_777_657_227_4, 0.169_156_519_395_002_55),
    (0.617_876_244_402_643_7, 0.149_595_988_816_576_73),
    (0.755_404_408_355_003, 0.124_628_971_255_533_87),
    (0.865_631_202_387_831_7, 0.095_158_511_682_492_78),
    (0.944_575_023_073_232_6, 0.062_253_523_938_647_894),
    (0.989_400_934_991_649_9, 0.027_152_459_411_754_096),
];

/// Integrates `f` over [a, b] with 16-point Gauss-Legendre.
pub fn gl16_integrate(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for &(x, w) in GL16.iter() {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// 7-point symmetric triangle rule, exact through degree 5.
/// Entries are (barycentric coordinates, weight); weights sum to 1 and are
/// multiplied by the triangle area by callers.
pub const TRI7: [([f64; 3], f64); 7] = [
    ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
    (
        [
            0.470_142_064_105_115_1,
            0.470_142_064_105_115_1,
            0.059_715_871_789_769_8,
        ],
        0.132_394_152_788_506_2,
    ),
    (
        [
            0.470_142_064_105_115_1,
            0.059_715_871_789_769_8,
            0.470_142_064_105_115_1,
        ],
        0.132_394_152_788_506_2,
    ),
    (
        [
            0.059_715_871_789_769_8,
            0.470_142_064_105_115_1,
            0.470_142_064_105_115_1,
        ],
        0.132_394_152_788_506_2,
    ),
    (
        [
            0.101_286_507_323_456_34,
            0.101_286_507_323_456_34,
            0.797_426_985_353_087_3,
        ],
        0.125_939_180_544_827_14,
    ),
    (
        [
            0.101_286_507_323_456_34,
            0.797_426_985_353_087_3,
            0.101_286_507_323_456_34,
        ],
        0.125_939_180_544_827_14,
    ),
    (
        [
            0.797_426_985_353_087_3,
            0.101_286_507_323_456_34,
            0.101_286_507_323_456_34,
        ],
        0.125_939_180_544_827_14,
    ),
];

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}
