//! Two-sample distribution tests: Kolmogorov-Smirnov, Anderson-Darling and
//! the chi-squared homogeneity test for categorical variables.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Pooled-and-sorted view used by the ECDF walks.
fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// sup |F_a - F_b| over the pooled support; both inputs sorted.
fn ks_statistic_sorted(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut i = 0;
    let mut j = 0;
    let mut d: f64 = 0.0;
    while i < a.len() || j < b.len() {
        // next pooled value; consume every copy from both samples before
        // evaluating the gap, so ties are handled correctly
        let v = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => break,
        };
        while i < a.len() && a[i] == v {
            i += 1;
        }
        while j < b.len() && b[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Complement of the Kolmogorov distribution, Q(z) = P(D > z), evaluated
/// with the two power series of Numerical Recipes (Press et al. 2007).
fn kolmogorov_q(z: f64) -> f64 {
    if z <= 0.0 {
        return 1.0;
    }
    if z < 1.18 {
        let t = (-std::f64::consts::PI.powi(2) / (8.0 * z * z)).exp();
        let factor = (2.0 * std::f64::consts::PI).sqrt() / z;
        (1.0 - factor * (t + t.powi(9) + t.powi(25) + t.powi(49))).max(0.0)
    } else {
        let t = (-2.0 * z * z).exp();
        (2.0 * (t - t.powi(4) + t.powi(9))).clamp(0.0, 1.0)
    }
}

/// Exact p-value by enumerating every assignment of the pooled sample to
/// the two groups; feasible only for tiny samples.
fn ks_exact_p(pooled: &[f64], na: usize, d_obs: f64) -> f64 {
    let n = pooled.len();
    let mut chosen = vec![false; n];
    let mut hits = 0u64;
    let mut total = 0u64;

    fn recurse(
        pooled: &[f64],
        chosen: &mut Vec<bool>,
        start: usize,
        left: usize,
        d_obs: f64,
        hits: &mut u64,
        total: &mut u64,
    ) {
        if left == 0 {
            let mut a = Vec::with_capacity(chosen.iter().filter(|&&c| c).count());
            let mut b = Vec::with_capacity(pooled.len() - a.capacity());
            for (v, &c) in pooled.iter().zip(chosen.iter()) {
                if c {
                    a.push(*v);
                } else {
                    b.push(*v);
                }
            }
            *total += 1;
            if ks_statistic_sorted(&a, &b) >= d_obs - 1e-12 {
                *hits += 1;
            }
            return;
        }
        if pooled.len() - start < left {
            return;
        }
        for i in start..pooled.len() {
            chosen[i] = true;
            recurse(pooled, chosen, i + 1, left - 1, d_obs, hits, total);
            chosen[i] = false;
        }
    }
    recurse(pooled, &mut chosen, 0, na, d_obs, &mut hits, &mut total);
    hits as f64 / total as f64
}

/// Two-sample Kolmogorov-Smirnov test.
///
/// D = sup |F_a - F_b|. For pooled sizes up to 12 the p-value is exact by
/// enumerating all C(na+nb, na) group assignments of the pooled values;
/// otherwise it comes from the asymptotic Kolmogorov distribution at
/// z = sqrt(ne) * D with the effective size ne = na*nb/(na+nb).
pub fn ks_2sample(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("ks_2sample requires nonempty samples"));
    }
    let sa = sorted(a);
    let sb = sorted(b);
    let d = ks_statistic_sorted(&sa, &sb);

    let p = if a.len() + b.len() <= 12 {
        let mut pooled = sa.clone();
        pooled.extend_from_slice(&sb);
        pooled.sort_by(|x, y| x.partial_cmp(y).unwrap());
        ks_exact_p(&pooled, a.len(), d)
    } else {
        let ne = (a.len() * b.len()) as f64 / (a.len() + b.len()) as f64;
        kolmogorov_q(ne.sqrt() * d)
    };
    Ok((d, p.min(1.0)))
}

/// Significance levels of the Anderson-Darling critical-value table.
const AD_SIG: [f64; 7] = [0.25, 0.1, 0.05, 0.025, 0.01, 0.005, 0.001];

/// Critical values of the standardized two-sample statistic for k = 2
/// (m = k - 1 = 1): b0 + b1/sqrt(m) + b2/m from Scholz & Stephens (1987).
const AD_CRITICAL: [f64; 7] = [0.325, 1.226, 1.961, 2.718, 3.752, 4.592, 6.546];

/// Least-squares quadratic through (AD_CRITICAL, ln AD_SIG):
/// ln p = c2*T^2 + c1*T + c0. Evaluating it reproduces the interpolation
/// used by scipy.stats.anderson_ksamp.
const AD_LOGP_QUAD: [f64; 3] = [
    0.01819809457411147,
    -1.0082265644652515,
    -1.077770279820484,
];

/// Two-sample Anderson-Darling test (rank formulation, midrank ties).
///
/// Returns the standardized statistic T = (A2 - (k-1)) / sigma_N of Scholz
/// & Stephens (1987) and a p-value interpolated from their critical-value
/// table, capped to [0.001, 0.25]; identical samples report the upper cap.
pub fn ad_2sample(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("ad_2sample requires nonempty samples"));
    }
    let sa = sorted(a);
    let sb = sorted(b);
    let n_total = sa.len() + sb.len();
    let n = n_total as f64;

    let mut pooled = sa.clone();
    pooled.extend_from_slice(&sb);
    pooled.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut distinct = pooled.clone();
    distinct.dedup();

    // midrank statistic: see Scholz & Stephens (1987), eq. 7
    let count_before_mid = |sorted_xs: &[f64], v: f64| -> f64 {
        let below = sorted_xs.partition_point(|&x| x < v) as f64;
        let upto = sorted_xs.partition_point(|&x| x <= v) as f64;
        below + 0.5 * (upto - below)
    };
    let mut a2 = 0.0;
    for sample in [&sa, &sb] {
        let ni = sample.len() as f64;
        let mut inner = 0.0;
        for &z in &distinct {
            let lj = (pooled.partition_point(|&x| x <= z) - pooled.partition_point(|&x| x < z)) as f64;
            let maij = count_before_mid(sample, z);
            let baj = count_before_mid(&pooled, z);
            let denom = baj * (n - baj) - n * lj / 4.0;
            if denom > 0.0 {
                let num = n * maij - ni * baj;
                inner += lj / n * num * num / denom;
            }
        }
        a2 += inner / ni;
    }
    a2 *= (n - 1.0) / n;

    // variance of A2kN under H0 (k = 2)
    let k = 2.0;
    let h: f64 = (1..n_total).map(|i| 1.0 / i as f64).sum();
    let cap_h = 1.0 / sa.len() as f64 + 1.0 / sb.len() as f64;
    let mut g = 0.0;
    for i in 1..=n_total - 2 {
        for j in i + 1..=n_total - 1 {
            g += 1.0 / ((n_total - i) as f64 * j as f64);
        }
    }
    let coef_a = (4.0 * g - 6.0) * (k - 1.0) + (10.0 - 6.0 * g) * cap_h;
    let coef_b = (2.0 * g - 4.0) * k * k + 8.0 * h * k + (2.0 * g - 14.0 * h - 4.0) * cap_h
        - 8.0 * h
        + 4.0 * g
        - 6.0;
    let coef_c = (6.0 * h + 2.0 * g - 2.0) * k * k + (4.0 * h - 4.0 * g + 6.0) * k
        + (2.0 * h - 6.0) * cap_h
        + 4.0 * h;
    let coef_d = (2.0 * h + 6.0) * k * k - 4.0 * h * k;
    let variance = (coef_a * n.powi(3) + coef_b * n.powi(2) + coef_c * n + coef_d)
        / ((n - 1.0) * (n - 2.0) * (n - 3.0));
    if !(variance > 0.0) {
        return Err(Error::numeric("Anderson-Darling variance is not positive; samples too small"));
    }
    let t_stat = (a2 - (k - 1.0)) / variance.sqrt();

    let p = if t_stat < AD_CRITICAL[0] {
        AD_SIG[0]
    } else if t_stat > AD_CRITICAL[6] {
        AD_SIG[6]
    } else {
        (AD_LOGP_QUAD[0] * t_stat * t_stat + AD_LOGP_QUAD[1] * t_stat + AD_LOGP_QUAD[2]).exp()
    };
    Ok((t_stat, p.clamp(AD_SIG[6], AD_SIG[0])))
}

/// Two-sample chi-squared homogeneity test on categorical data.
///
/// Builds the 2 x k contingency table of category counts, takes expected
/// counts from the pooled proportions, drops categories with zero pooled
/// count, and refers the statistic to chi-squared with k_eff - 1 degrees of
/// freedom.
pub fn chi2_2sample(a: &[f64], b: &[f64], categories: &[f64]) -> Result<(f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("chi2_2sample requires nonempty samples"));
    }
    let find = |v: f64| -> Result<usize> {
        categories
            .iter()
            .position(|&c| {
                v == c || (v - c).abs() <= 1e-9 * c.abs().max(1.0)
            })
            .ok_or_else(|| Error::invalid(format!("value {v} not covered by the categories")))
    };
    let mut count_a = vec![0.0f64; categories.len()];
    let mut count_b = vec![0.0f64; categories.len()];
    for &v in a {
        count_a[find(v)?] += 1.0;
    }
    for &v in b {
        count_b[find(v)?] += 1.0;
    }

    let kept: Vec<usize> = (0..categories.len())
        .filter(|&j| count_a[j] + count_b[j] > 0.0)
        .collect();
    if kept.len() < 2 {
        return Err(Error::invalid(
            "chi2_2sample needs at least 2 categories with nonzero pooled count",
        ));
    }

    let na: f64 = a.len() as f64;
    let nb: f64 = b.len() as f64;
    let n = na + nb;
    let mut stat = 0.0;
    for &j in &kept {
        let pooled = (count_a[j] + count_b[j]) / n;
        let ea = na * pooled;
        let eb = nb * pooled;
        stat += (count_a[j] - ea).powi(2) / ea + (count_b[j] - eb).powi(2) / eb;
    }
    let dof = (kept.len() - 1) as f64;
    let dist = ChiSquared::new(dof).map_err(|e| Error::numeric(e.to_string()))?;
    let p = 1.0 - dist.cdf(stat);
    Ok((stat, p.clamp(0.0, 1.0)))
}
