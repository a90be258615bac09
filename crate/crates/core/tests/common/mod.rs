//! Brute-force oracles shared by the integration suites. Nothing here calls
//! into the estimators it is used to check.
#![allow(dead_code)]

/// Entropy in nats by enumerating each distinct symbol and counting it afresh.
pub fn enumerated_entropy<T: PartialEq>(symbols: &[T]) -> f64 {
    let n = symbols.len() as f64;
    let mut seen: Vec<&T> = Vec::new();
    let mut h = 0.0;
    for s in symbols {
        if seen.contains(&s) {
            continue;
        }
        seen.push(s);
        let c = symbols.iter().filter(|t| *t == s).count() as f64;
        h += (c / n) * (n / c).ln();
    }
    h
}

pub fn enumerated_mi<A: PartialEq + Copy, B: PartialEq + Copy>(a: &[A], b: &[B]) -> f64 {
    let pairs: Vec<(A, B)> = a.iter().copied().zip(b.iter().copied()).collect();
    enumerated_entropy(a) + enumerated_entropy(b) - enumerated_entropy(&pairs)
}

/// Direct O(N^2 m) window-pair enumeration.
pub fn naive_correlation_integral(s: &[f64], m: usize, eps: f64) -> f64 {
    let w = s.len() - m + 1;
    let mut close = 0u64;
    let mut total = 0u64;
    for a in 0..w {
        for b in a + 1..w {
            total += 1;
            if (0..m).all(|j| (s[a + j] - s[b + j]).abs() < eps) {
                close += 1;
            }
        }
    }
    close as f64 / total as f64
}

/// Plug-in MI of the 2x2 table of `(s_t, s_{t+d})`.
pub fn lagged_binary_mi(seq: &[u8], d: usize) -> f64 {
    let mut table = [[0f64; 2]; 2];
    for (&a, &b) in seq.iter().zip(&seq[d..]) {
        table[a as usize][b as usize] += 1.0;
    }
    let n = (seq.len() - d) as f64;
    let row = [table[0][0] + table[0][1], table[1][0] + table[1][1]];
    let col = [table[0][0] + table[1][0], table[0][1] + table[1][1]];
    let mut mi = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            if table[i][j] > 0.0 {
                mi += table[i][j] / n * (table[i][j] * n / (row[i] * col[j])).ln();
            }
        }
    }
    mi
}

/// Exact MI of the stationary symmetric flip chain at lag `d`, whose
/// lag-`d` agreement probability is `(1 + (1 - 2p)^d) / 2`.
pub fn chain_lag_mi(flip: f64, d: i32) -> f64 {
    let same = 0.5 * (1.0 + (1.0 - 2.0 * flip).powi(d));
    let diff = 1.0 - same;
    // joint cells: same/2 twice, diff/2 twice; marginals 1/2
    let term = |p: f64| if p > 0.0 { p * (p / 0.25).ln() } else { 0.0 };
    2.0 * term(same / 2.0) + 2.0 * term(diff / 2.0)
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
