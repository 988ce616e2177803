//! Small numeric helpers shared across modules.

/// `ceil(x)`, except values within 1e-9 (relative) of an integer snap to it.
///
/// `0.99 * 100.0` evaluates to `98.99999999999999` or `99.00000000000001`
/// depending on the operands; both must mean 99.
pub fn ceil_snapped(x: f64) -> f64 {
    let nearest = x.round();
    if (x - nearest).abs() <= 1e-9 * nearest.abs().max(1.0) {
        nearest
    } else {
        x.ceil()
    }
}

/// 0-based index of the nearest-rank `q`-quantile in a sorted list of `n`
/// values: element `ceil(q * n)` in 1-based order, clamped to `[1, n]`.
pub fn nearest_rank_index(n: usize, q: f64) -> usize {
    debug_assert!(n > 0);
    let rank = ceil_snapped(q * n as f64) as usize;
    rank.clamp(1, n) - 1
}

pub fn nearest_rank<T: Copy>(sorted: &[T], q: f64) -> Option<T> {
    (!sorted.is_empty()).then(|| sorted[nearest_rank_index(sorted.len(), q)])
}

/// Median; even lengths average the two central values.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Some(if sorted.len().is_multiple_of(2) {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    })
}

/// splitmix64 finalizer; the building block of seed derivation.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
