use super::sample::BivariateSample;
use crate::error::{domain, Error, Result};

/// A rank statistic together with whether the sample had ties. With ties
/// the value is still the formula applied to the "≤" ranks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub ties_present: bool,
}

fn require_n(s: &BivariateSample, min: usize) -> Result<usize> {
    let n = s.n();
    if n < min {
        return domain(format!("statistic needs at least {min} observations, got {n}"));
    }
    Ok(n)
}

/// Product-moment correlation, clamped to [−1, 1].
pub fn pearson_r(s: &BivariateSample) -> Result<f64> {
    let n = require_n(s, 2)? as f64;
    let mx = s.x().iter().sum::<f64>() / n;
    let my = s.y().iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in s.pairs() {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateSample(
            "a coordinate has zero variance".to_string(),
        ));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// `r(v_i) = #{j : v_j ≤ v_i}`.
pub fn ranks(v: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0u64; v.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && v[order[end]] == v[order[start]] {
            end += 1;
        }
        for &i in &order[start..end] {
            out[i] = end as u64;
        }
        start = end;
    }
    out
}

/// `12/(n³ − n)·Σ r(X_i)r(Y_i) − 3(n + 1)/(n − 1)` with an exact integer
/// numerator.
pub fn spearman_s(s: &BivariateSample) -> Result<Estimate> {
    let n = require_n(s, 2)? as i128;
    let rx = ranks(s.x());
    let ry = ranks(s.y());
    let cross: i128 = rx.iter().zip(&ry).map(|(&a, &b)| (a * b) as i128).sum();
    let num = 12 * cross - 3 * n * (n + 1) * (n + 1);
    Ok(Estimate {
        value: num as f64 / (n * n * n - n) as f64,
        ties_present: s.has_ties(),
    })
}

/// Counts pairs `i < j` with `v_i < v_j`, sorting `v` in place.
fn count_ascending_pairs(v: &mut [f64], buf: &mut Vec<f64>) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut count = count_ascending_pairs(&mut v[..mid], buf) + count_ascending_pairs(&mut v[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[i] < v[j] {
            buf.push(v[i]);
            i += 1;
        } else {
            // every left element already emitted is strictly smaller
            count += i as u64;
            buf.push(v[j]);
            j += 1;
        }
    }
    count += (n - j) as u64 * mid as u64;
    buf.extend_from_slice(&v[i..mid]);
    buf.extend_from_slice(&v[j..n]);
    v.copy_from_slice(buf);
    count
}

fn kendall_from_concordant(concordant: u64, n: usize) -> f64 {
    let pairs = (n as u64) * (n as u64 - 1) / 2;
    (2 * concordant as i128 - pairs as i128) as f64 / pairs as f64
}

/// Mean of `h_T = 2(J_ij + J_ji) − 1` over pairs, in O(n log n). Pairs tied
/// in either coordinate count as discordant, as the kernel does.
pub fn kendall_t(s: &BivariateSample) -> Result<Estimate> {
    let n = require_n(s, 2)?;
    let mut idx: Vec<usize> = (0..n).collect();
    let (x, y) = (s.x(), s.y());
    // x ascending, y descending within tied x so tied x never count
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[b].total_cmp(&y[a])));
    let mut ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let mut buf = Vec::with_capacity(n);
    let concordant = count_ascending_pairs(&mut ys, &mut buf);
    Ok(Estimate {
        value: kendall_from_concordant(concordant, n),
        ties_present: s.has_ties(),
    })
}

/// Direct O(n²) kernel sum.
pub fn kendall_t_brute(s: &BivariateSample) -> Result<Estimate> {
    let n = require_n(s, 2)?;
    let (x, y) = (s.x(), s.y());
    let mut concordant = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            let j_ij = x[j] < x[i] && y[j] < y[i];
            let j_ji = x[i] < x[j] && y[i] < y[j];
            concordant += (j_ij || j_ji) as u64;
        }
    }
    Ok(Estimate {
        value: kendall_from_concordant(concordant, n),
        ties_present: s.has_ties(),
    })
}

pub const USTAT_MAX_N: usize = 40;

type Point = (f64, f64);

fn k(vi: Point, vj: Point, vk: Point) -> i64 {
    (vj.0 < vi.0 && vk.1 < vi.1) as i64
}

fn h_s(a: Point, b: Point, c: Point) -> i64 {
    2 * (k(a, b, c) + k(a, c, b) + k(b, a, c) + k(b, c, a) + k(c, a, b) + k(c, b, a)) - 3
}

fn h_t(a: Point, b: Point) -> i64 {
    let j_ab = b.0 < a.0 && b.1 < a.1;
    let j_ba = a.0 < b.0 && a.1 < b.1;
    2 * (j_ab as i64 + j_ba as i64) - 1
}

/// The symmetric degree-3 kernel whose U-statistic is S for sample size `n`.
pub fn spearman_kernel(n: usize, a: Point, b: Point, c: Point) -> f64 {
    let n = n as f64;
    let tri = (h_t(a, b) + h_t(a, c) + h_t(b, c)) as f64;
    ((n - 2.0) * h_s(a, b, c) as f64 + tri) / (n + 1.0)
}

/// `(S from ranks, S as the U-statistic of the degree-3 kernel)` for
/// 3 ≤ n ≤ [`USTAT_MAX_N`].
pub fn spearman_ustat_identity(s: &BivariateSample) -> Result<(Estimate, f64)> {
    let n = require_n(s, 3)?;
    if n > USTAT_MAX_N {
        return domain(format!("triple sum limited to n <= {USTAT_MAX_N}, got {n}"));
    }
    let direct = spearman_s(s)?;
    let v: Vec<Point> = s.pairs().collect();
    let (mut sum_s, mut sum_t) = (0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            sum_t += (n as i64 - 2) * h_t(v[i], v[j]);
            for l in j + 1..n {
                sum_s += h_s(v[i], v[j], v[l]);
            }
        }
    }
    let triples = (n * (n - 1) * (n - 2) / 6) as i64;
    let num = (n as i64 - 2) * sum_s + sum_t;
    let ustat = num as f64 / ((n as i64 + 1) * triples) as f64;
    Ok((direct, ustat))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(p: &[(f64, f64)]) -> BivariateSample {
        BivariateSample::from_pairs(p).unwrap()
    }

    #[test]
    fn pearson_hand_values() {
        assert_eq!(pearson_r(&sample(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)])).unwrap(), 0.0);
        let lin = sample(&[(0.0, 1.0), (1.0, 3.0), (2.5, 6.0)]);
        assert!((pearson_r(&lin).unwrap() - 1.0).abs() < 1e-15);
        let flat = sample(&[(0.0, 1.0), (1.0, 1.0)]);
        assert!(matches!(pearson_r(&flat), Err(Error::DegenerateSample(_))));
    }

    #[test]
    fn ranks_use_le_counts() {
        assert_eq!(ranks(&[0.3, -1.0, 0.3, 2.0]), vec![3, 1, 3, 4]);
    }

    #[test]
    fn spearman_hand_value() {
        let s = sample(&[(1.0, 2.0), (2.0, 1.0), (3.0, 3.0)]);
        assert_eq!(spearman_s(&s).unwrap().value, 0.5);
    }

    #[test]
    fn kendall_hand_values() {
        let s = sample(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]);
        assert_eq!(kendall_t(&s).unwrap().value, 1.0);
        let s = sample(&[(1.0, 2.0), (2.0, 1.0), (3.0, 3.0)]);
        assert_eq!(kendall_t(&s).unwrap().value, 1.0 / 3.0);
    }

    #[test]
    fn ties_are_discordant_in_both_paths() {
        let s = sample(&[(1.0, 1.0), (1.0, 2.0), (2.0, 2.0), (3.0, 0.5), (3.0, 0.5)]);
        let fast = kendall_t(&s).unwrap();
        assert!(fast.ties_present);
        assert_eq!(fast, kendall_t_brute(&s).unwrap());
    }

    #[test]
    fn concordant_ustat() {
        let s = sample(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0), (4.0, 4.0)]);
        let (d, u) = spearman_ustat_identity(&s).unwrap();
        assert_eq!((d.value, u), (1.0, 1.0));
    }
}
