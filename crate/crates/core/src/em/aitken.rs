/// Aitken-accelerated stopping rule on three consecutive log-likelihoods.
///
/// With `a = (l2 - l1) / (l1 - l0)` the asymptotic estimate is
/// `l_inf = l1 + (l2 - l1) / (1 - a)`, and the sequence has converged when
/// `0 <= l_inf - l2 < eps`. A vanishing denominator falls back to
/// `|l2 - l1| < eps`.
pub fn aitken_converged(l_prev2: f64, l_prev: f64, l_curr: f64, eps: f64) -> bool {
    let step_prev = l_prev - l_prev2;
    let step_curr = l_curr - l_prev;
    if step_prev == 0.0 {
        return step_curr.abs() < eps;
    }
    let accel = step_curr / step_prev;
    if accel == 1.0 {
        return step_curr.abs() < eps;
    }
    let l_inf = l_prev + step_curr / (1.0 - accel);
    let gap = l_inf - l_curr;
    (0.0..eps).contains(&gap)
}
