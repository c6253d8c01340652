use super::NumericsError;

// Gauss–Kronrod 7/15 abscissae and weights (non-negative half).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_SUBDIVISIONS: usize = 2000;

struct Piece {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Result<Piece, NumericsError> {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let sample = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(NumericsError::NonFiniteSample { at: x })
        }
    };
    let fc = sample(centre)?;
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = sample(centre - dx)? + sample(centre + dx)?;
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Ok(Piece { lo, hi, value: kron * half, error: ((kron - gauss) * half).abs() })
}

/// Adaptive Gauss–Kronrod quadrature of `f` over `[lo, hi]` with a global
/// absolute error target `tol`.
pub fn quadrature<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(NumericsError::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(NumericsError::InvalidArgument("integration bounds must be finite".into()));
    }
    if lo == hi {
        return Ok(0.0);
    }
    if lo > hi {
        return quadrature(f, hi, lo, tol).map(|v| -v);
    }

    let mut pieces = vec![kronrod(&f, lo, hi)?];
    loop {
        let total_err: f64 = pieces.iter().map(|p| p.error).sum();
        if total_err <= tol {
            return Ok(pieces.iter().map(|p| p.value).sum());
        }
        let worst =
            pieces.iter().enumerate().max_by(|a, b| a.1.error.total_cmp(&b.1.error)).map(|(i, _)| i).unwrap_or(0);
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.lo + p.hi);
        if pieces.len() + 2 > MAX_SUBDIVISIONS || mid <= p.lo || mid >= p.hi {
            return Err(NumericsError::ToleranceNotMet { lo, hi, tol, estimate: total_err });
        }
        pieces.push(kronrod(&f, p.lo, mid)?);
        pieces.push(kronrod(&f, mid, p.hi)?);
    }
}
