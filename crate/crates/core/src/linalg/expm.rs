use super::{Matrix, NormKind};
use crate::error::{Error, Result};

// [13/13] Padé coefficients of exp and the 1-norm threshold below which the
// approximant is accurate to double precision without scaling.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];
const THETA_13: f64 = 5.371_920_351_148_152;

/// Matrix exponential `e^M` by scaling and squaring with a fixed [13/13]
/// Padé approximant.
///
/// The scaling power `s` is the smallest non-negative integer with
/// `‖M‖₁ / 2^s ≤ θ₁₃`; the approximant of `M/2^s` is then squared `s` times.
pub fn expm(m: &Matrix) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::dim(format!(
            "matrix exponential needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::domain("matrix exponential of a non-finite matrix"));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Matrix::zeros(0, 0));
    }

    let norm = m.norm(NormKind::One);
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = m.scale(2f64.powi(-s));

    let b = &PADE13;
    let id = Matrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = a6.scale(b[13]).add(&a4.scale(b[11])).add(&a2.scale(b[9]));
    let u_tail = a6
        .scale(b[7])
        .add(&a4.scale(b[5]))
        .add(&a2.scale(b[3]))
        .add(&id.scale(b[1]));
    let u = &a * &(&a6 * &u_inner).add(&u_tail);

    let v_inner = a6.scale(b[12]).add(&a4.scale(b[10])).add(&a2.scale(b[8]));
    let v = (&a6 * &v_inner)
        .add(&a6.scale(b[6]))
        .add(&a4.scale(b[4]))
        .add(&a2.scale(b[2]))
        .add(&id.scale(b[0]));

    let mut r = v.sub(&u).solve(&v.add(&u))?;
    for _ in 0..s {
        r = &r * &r;
    }
    if !r.is_finite() {
        return Err(Error::domain("matrix exponential overflowed"));
    }
    Ok(r)
}
