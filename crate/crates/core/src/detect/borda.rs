use super::{Polarity, ScoreVector};
use crate::error::{Error, Result};

/// Points for one scorer: rank `r` (1-based, most suspicious first) earns
/// `n - r + 1`; units with equal suspicion share the mean of their points.
fn points(s: &ScoreVector) -> Vec<f64> {
    let n = s.scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s.suspicion(b).total_cmp(&s.suspicion(a)));
    let mut out = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && s.suspicion(order[end]) == s.suspicion(order[start]) {
            end += 1;
        }
        // ranks start+1..=end earn n-start ..= n-end+1
        let mean = (2 * n - start - end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            out[i] = mean;
        }
        start = end;
    }
    out
}

/// Sums Borda points of the first `n_top` scorers.
pub fn borda_count(scorers: &[ScoreVector], n_top: usize) -> Result<ScoreVector> {
    if n_top == 0 {
        return Err(Error::invalid("Borda count needs n_top >= 1"));
    }
    let members = &scorers[..n_top.min(scorers.len())];
    let first = members
        .first()
        .ok_or_else(|| Error::invalid("Borda count needs at least one scorer"))?;
    for s in &members[1..] {
        if s.uids != first.uids {
            return Err(Error::mismatch(format!(
                "scorers {} and {} cover different units",
                first.method, s.method
            )));
        }
    }
    let mut total = vec![0.0; first.uids.len()];
    for s in members {
        for (t, p) in total.iter_mut().zip(points(s)) {
            *t += p;
        }
    }
    ScoreVector::from_parts("BC", first.uids.clone(), total, Polarity::HighIsSuspicious)
}
