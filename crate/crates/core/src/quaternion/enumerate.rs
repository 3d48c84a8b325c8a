//! Short vector enumeration for positive definite integral quaternary forms.
//!
//! Forms are given by an even integral Gram matrix `G`, representing
//! `q(x) = x^T G x / 2`. Floating point is only used to prune the search
//! tree; every reported value is recomputed exactly.

/// Even integral Gram matrix of a positive definite quaternary form.
pub type IntGram = [[i64; 4]; 4];

fn exact_value(g: &IntGram, x: &[i64; 4]) -> i128 {
    let mut s = 0i128;
    for r in 0..4 {
        for c in 0..4 {
            s += g[r][c] as i128 * x[r] as i128 * x[c] as i128;
        }
    }
    s / 2
}

fn transform(g0: &IntGram, t: &[[i64; 4]; 4]) -> IntGram {
    let mut out = [[0i64; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            let mut s = 0i128;
            for a in 0..4 {
                for b in 0..4 {
                    s += t[r][a] as i128 * g0[a][b] as i128 * t[c][b] as i128;
                }
            }
            out[r][c] = i64::try_from(s).expect("reduced Gram entries fit in i64");
        }
    }
    out
}

/// Gram-Schmidt data `(mu, |b*|^2)` computed from a Gram matrix.
fn gso(g: &IntGram) -> ([[f64; 4]; 4], [f64; 4]) {
    let mut mu = [[0f64; 4]; 4];
    let mut bstar = [0f64; 4];
    for i in 0..4 {
        for j in 0..i {
            let mut s = g[i][j] as f64;
            for k in 0..j {
                s -= mu[j][k] * mu[i][k] * bstar[k];
            }
            mu[i][j] = s / bstar[j];
        }
        let mut s = g[i][i] as f64;
        for k in 0..i {
            s -= mu[i][k] * mu[i][k] * bstar[k];
        }
        bstar[i] = s;
    }
    (mu, bstar)
}

/// LLL-reduce a Gram matrix. Returns the reduced Gram matrix and the
/// unimodular transform `T` (rows are new basis vectors in old coordinates),
/// so that `reduced = T G T^T`.
pub fn lll_reduce(g0: &IntGram) -> (IntGram, [[i64; 4]; 4]) {
    let mut t = [[0i64; 4]; 4];
    for (k, row) in t.iter_mut().enumerate() {
        row[k] = 1;
    }
    let mut g = *g0;
    let mut k = 1;
    let mut steps = 0;
    while k < 4 {
        steps += 1;
        assert!(steps < 100_000, "LLL failed to terminate");
        for j in (0..k).rev() {
            let (mu, _) = gso(&g);
            let r = mu[k][j].round();
            if r != 0.0 {
                let r = r as i64;
                for c in 0..4 {
                    t[k][c] -= r * t[j][c];
                }
                g = transform(g0, &t);
            }
        }
        let (mu, bstar) = gso(&g);
        if bstar[k] < (0.75 - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1] {
            t.swap(k, k - 1);
            g = transform(g0, &t);
            k = k.max(2) - 1;
        } else {
            k += 1;
        }
    }
    (g, t)
}

/// Calls `visit(x, q(x))` for every nonzero integer vector with
/// `q(x) <= bound`, in a deterministic order. Both `x` and `-x` are visited.
pub fn visit_short_vectors<F: FnMut(&[i64; 4], u64)>(g: &IntGram, bound: u64, mut visit: F) {
    // q(x) = sum_i qd[i] (x_i + sum_{j>i} qo[i][j] x_j)^2
    let mut qd = [0f64; 4];
    let mut qo = [[0f64; 4]; 4];
    let mut work = [[0f64; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            work[r][c] = g[r][c] as f64 / 2.0;
        }
    }
    for i in 0..4 {
        qd[i] = work[i][i];
        for j in i + 1..4 {
            qo[i][j] = work[i][j] / qd[i];
        }
        for r in i + 1..4 {
            for c in r..4 {
                work[r][c] -= qd[i] * qo[i][r] * qo[i][c];
                work[c][r] = work[r][c];
            }
        }
        assert!(qd[i] > 0.0, "form is not positive definite");
    }
    let slack = 1e-7 * (bound as f64 + 1.0);
    let mut x = [0i64; 4];
    search(
        g,
        &qd,
        &qo,
        3,
        bound as f64 + slack,
        bound,
        &mut x,
        &mut visit,
    );
}

#[allow(clippy::too_many_arguments)]
fn search<F: FnMut(&[i64; 4], u64)>(
    g: &IntGram,
    qd: &[f64; 4],
    qo: &[[f64; 4]; 4],
    level: usize,
    remaining: f64,
    bound: u64,
    x: &mut [i64; 4],
    visit: &mut F,
) {
    let center: f64 = -(level + 1..4)
        .map(|j| qo[level][j] * x[j] as f64)
        .sum::<f64>();
    let radius = (remaining.max(0.0) / qd[level]).sqrt();
    let lo = (center - radius - 1e-9).ceil() as i64;
    let hi = (center + radius + 1e-9).floor() as i64;
    for v in lo..=hi {
        x[level] = v;
        let d = v as f64 - center;
        let rest = remaining - qd[level] * d * d;
        if rest < -1e-7 * (bound as f64 + 1.0) {
            continue;
        }
        if level == 0 {
            if x.iter().all(|&c| c == 0) {
                continue;
            }
            let val = exact_value(g, x);
            if val > 0 && val <= bound as i128 {
                visit(x, val as u64);
            }
        } else {
            search(g, qd, qo, level - 1, rest, bound, x, visit);
        }
    }
    x[level] = 0;
}

/// `counts[m]` = number of nonzero vectors with `q(x) = m`, for `0 <= m <= max`.
pub fn theta_counts(g: &IntGram, max: u64) -> Vec<u64> {
    let (reduced, _) = lll_reduce(g);
    let mut counts = vec![0u64; max as usize + 1];
    visit_short_vectors(&reduced, max, |_, v| counts[v as usize] += 1);
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_counts(g: &IntGram, max: u64, box_size: i64) -> Vec<u64> {
        let mut counts = vec![0u64; max as usize + 1];
        let r = -box_size..=box_size;
        for a in r.clone() {
            for b in r.clone() {
                for c in r.clone() {
                    for d in r.clone() {
                        let x = [a, b, c, d];
                        if x == [0; 4] {
                            continue;
                        }
                        let v = exact_value(g, &x);
                        if v <= max as i128 {
                            counts[v as usize] += 1;
                        }
                    }
                }
            }
        }
        counts
    }

    #[test]
    fn sum_of_four_squares() {
        let g = [[2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2]];
        let c = theta_counts(&g, 10);
        // r_4(m) = 8 * sum of divisors not divisible by 4
        assert_eq!(c, vec![0, 8, 24, 32, 24, 48, 96, 64, 24, 104, 144]);
    }

    #[test]
    fn skewed_basis_matches_brute_force() {
        // Norm form of the Hurwitz-type order for N = 11 in a deliberately bad basis.
        let base = [[2, 1, 0, 1], [1, 2, 1, 0], [0, 1, 6, 3], [1, 0, 3, 6]];
        let t = [[1, 0, 0, 0], [3, 1, 0, 0], [-2, 5, 1, 0], [4, -1, 2, 1]];
        let skew = transform(&base, &t);
        let max = 12;
        let expected = brute_counts(&base, max, 8);
        assert_eq!(theta_counts(&base, max), expected);
        assert_eq!(theta_counts(&skew, max), expected);
        let (red, tt) = lll_reduce(&skew);
        assert_eq!(transform(&skew, &tt), red);
    }

    #[test]
    fn zero_bound_is_empty() {
        let g = [[2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2]];
        let mut n = 0;
        visit_short_vectors(&g, 0, |_, _| n += 1);
        assert_eq!(n, 0);
    }
}
