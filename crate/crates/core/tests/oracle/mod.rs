//! Independent reference computations. Nothing here calls into the crate's
//! algorithms; they are checked against these.

#![allow(dead_code)]

/// Sum of squared residuals.
pub fn sse(fitted: &[f64], y: &[f64]) -> f64 {
    fitted.iter().zip(y).map(|(f, v)| (f - v) * (f - v)).sum()
}

/// Least-squares non-decreasing fit by exhaustive search over every
/// partition of the distinct forecast values into consecutive blocks.
/// Exponential; keep the number of distinct forecasts small.
pub fn isotonic_brute_force(p: &[f64], y: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| p[a].partial_cmp(&p[b]).unwrap().then(a.cmp(&b)));
    // units of tied forecasts: (members, sum of y)
    let mut units: Vec<(Vec<usize>, f64)> = Vec::new();
    for &i in &order {
        match units.last_mut() {
            Some((members, sum)) if p[members[0]] == p[i] => {
                members.push(i);
                *sum += y[i];
            }
            _ => units.push((vec![i], y[i])),
        }
    }
    let k = units.len();
    assert!(k <= 16, "brute force over {k} units is too large");
    let mut best: Option<(f64, Vec<f64>)> = None;
    for cuts in 0u32..(1 << (k - 1)) {
        // bit j set: a block boundary after unit j
        let mut fitted = vec![0.0; p.len()];
        let mut means = Vec::new();
        let mut start = 0;
        for end in 1..=k {
            if end == k || cuts & (1 << (end - 1)) != 0 {
                let block = &units[start..end];
                let count: usize = block.iter().map(|(m, _)| m.len()).sum();
                let total: f64 = block.iter().map(|(_, s)| s).sum();
                let mean = total / count as f64;
                for (members, _) in block {
                    for &i in members {
                        fitted[i] = mean;
                    }
                }
                means.push(mean);
                start = end;
            }
        }
        if means.windows(2).any(|w| w[0] > w[1]) {
            continue;
        }
        let err = sse(&fitted, y);
        if best.as_ref().is_none_or(|(b, _)| err < *b) {
            best = Some((err, fitted));
        }
    }
    best.unwrap().1
}

/// C statistic by counting every (event, non-event) pair.
pub fn concordance_pairs(p: &[f64], x: &[f64]) -> f64 {
    let mut score = 0.0;
    let mut pairs = 0usize;
    for i in 0..p.len() {
        if x[i] != 1.0 {
            continue;
        }
        for j in 0..p.len() {
            if x[j] != 0.0 {
                continue;
            }
            pairs += 1;
            score += if p[i] > p[j] {
                1.0
            } else if p[i] == p[j] {
                0.5
            } else {
                0.0
            };
        }
    }
    score / pairs as f64
}

/// Murphy components grouping observations by distinct forecast value:
/// (REL, RES, UNC).
pub fn murphy_discrete(p: &[f64], x: &[f64]) -> (f64, f64, f64) {
    let n = p.len() as f64;
    let x_bar = x.iter().sum::<f64>() / n;
    let mut values: Vec<f64> = p.to_vec();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values.dedup();
    let (mut rel, mut res) = (0.0, 0.0);
    for v in values {
        let members: Vec<usize> = (0..p.len()).filter(|&i| p[i] == v).collect();
        let nk = members.len() as f64;
        let xk = members.iter().map(|&i| x[i]).sum::<f64>() / nk;
        rel += nk * (xk - v).powi(2);
        res += nk * (xk - x_bar).powi(2);
    }
    (rel / n, res / n, x_bar * (1.0 - x_bar))
}

/// Mean half-Brier score, plainly summed.
pub fn brier(p: &[f64], x: &[f64]) -> f64 {
    p.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / p.len() as f64
}
