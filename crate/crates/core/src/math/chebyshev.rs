/// Chebyshev polynomial of the first kind `T_k(y)`, evaluated with the
/// three-term recurrence `T_k = 2y T_{k-1} - T_{k-2}`.
pub fn chebyshev_value(k: u32, y: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => y,
        _ => {
            let (mut prev, mut cur) = (1.0, y);
            for _ in 2..=k {
                let next = 2.0 * y * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}
