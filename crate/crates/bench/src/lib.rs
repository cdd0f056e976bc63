//! Benchmark fixtures shared by the criterion targets.

use mawt_core::ChannelParams;

/// Degraded game with `n` transmitters of decreasing power.
pub fn degraded_game(n: usize) -> ChannelParams {
    let gammas: Vec<f64> = (0..n)
        .map(|i| 2.0 - 1.5 * i as f64 / n.max(1) as f64)
        .collect();
    ChannelParams::degraded(gammas, 0.3, 0.1)
}

pub fn two_user_game() -> ChannelParams {
    ChannelParams::two_user([1.0, 0.4], [0.6, 0.8], 0.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_validate() {
        for n in [1, 4, 12] {
            let p = mawt_core::model::validate(degraded_game(n)).unwrap();
            assert!(p.gammas.iter().all(|&g| g > p.lambda));
        }
        mawt_core::model::validate(two_user_game()).unwrap();
    }
}
