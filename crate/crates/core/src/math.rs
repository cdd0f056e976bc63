use std::f64::consts::LN_2;

/// `½·log₂((1 + num) / (1 + den))`, evaluated through `ln_1p` so that tiny
/// signal-to-noise ratios keep full relative precision.
#[inline]
pub(crate) fn half_log2_ratio(num: f64, den: f64) -> f64 {
    0.5 * (num.ln_1p() - den.ln_1p()) / LN_2
}

/// Subsets of the bitmask `mask`, excluding the empty set, in increasing order.
pub(crate) fn nonempty_subsets(mask: u32) -> impl Iterator<Item = u32> {
    let mut sub: u32 = 0;
    std::iter::from_fn(move || {
        // next subset in increasing numeric order: (sub - mask) & mask
        sub = sub.wrapping_sub(mask) & mask;
        if sub == 0 {
            None
        } else {
            Some(sub)
        }
    })
}
