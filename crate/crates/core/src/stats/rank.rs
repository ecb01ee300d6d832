//! Spearman rank correlation with tie-aware mid-ranks.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Mid-ranks (average rank for ties), 1-based.
fn midranks(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| xs[i].partial_cmp(&xs[j]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        // items i..=j share the average of ranks i+1..=j+1
        let avg = (i + 1 + j + 1) as f64 / 2.0;
        for k in i..=j {
            ranks[order[k]] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Heap's algorithm, invoking `visit` on every permutation of `items`.
fn for_each_permutation(items: &mut [f64], visit: &mut impl FnMut(&[f64])) {
    fn heap(k: usize, items: &mut [f64], visit: &mut impl FnMut(&[f64])) {
        if k <= 1 {
            visit(items);
            return;
        }
        for i in 0..k {
            heap(k - 1, items, visit);
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    heap(items.len(), items, visit);
}

/// Exact permutation tail counts of the rank correlation: fraction of
/// permutations of the y-ranks with |rho| at least the observed (two-sided)
/// and with rho at most the observed (lower one-tail).
pub(crate) fn exact_permutation_p(x_ranks: &[f64], y_ranks: &[f64], rho_obs: f64) -> (f64, f64) {
    let mut perm = y_ranks.to_vec();
    let mut total = 0u64;
    let mut two_sided = 0u64;
    let mut lower_tail = 0u64;
    for_each_permutation(&mut perm, &mut |p| {
        // constant x is rejected upstream; a permuted rank vector of >= 2
        // distinct values can never be constant
        let r = pearson(x_ranks, p).unwrap();
        total += 1;
        if r.abs() >= rho_obs.abs() - 1e-12 {
            two_sided += 1;
        }
        if r <= rho_obs + 1e-12 {
            lower_tail += 1;
        }
    });
    (two_sided as f64 / total as f64, lower_tail as f64 / total as f64)
}

/// Spearman rank correlation and two-sided p-value.
///
/// Ties get mid-ranks; rho is the Pearson correlation of the rank vectors.
/// For n <= 9 the p-value is exact, by enumerating all n! permutations of
/// the y-ranks; beyond that it uses the usual t approximation
/// t = rho * sqrt((n - 2) / (1 - rho^2)) with n - 2 degrees of freedom.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::shape(format!(
            "spearman needs equal lengths, got {} and {}",
            n,
            y.len()
        )));
    }
    if n < 3 {
        return Err(Error::invalid("spearman needs at least 3 observations"));
    }
    let rx = midranks(x);
    let ry = midranks(y);
    let rho = pearson(&rx, &ry)
        .ok_or_else(|| Error::numeric("spearman undefined for constant input"))?;

    let p = if n <= 9 {
        exact_permutation_p(&rx, &ry, rho).0
    } else if rho.abs() >= 1.0 {
        0.0
    } else {
        let t = rho * ((n as f64 - 2.0) / (1.0 - rho * rho)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, n as f64 - 2.0)
            .map_err(|e| Error::numeric(e.to_string()))?;
        2.0 * (1.0 - dist.cdf(t.abs()))
    };
    Ok((rho, p.min(1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_antitone_is_minus_one() {
        let (rho, _) = spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap();
        assert!((rho + 1.0).abs() < 1e-12);
    }

    #[test]
    fn classic_d_squared_formula_case() {
        // x = [1,2,3,4], y = [1,3,2,4]: sum d^2 = 2, rho = 1 - 12/60 = 0.8
        let (rho, _) = spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((rho - 0.8).abs() < 1e-12);
    }

    #[test]
    fn exact_permutation_tails_for_n3() {
        let rx = midranks(&[1.0, 2.0, 3.0]);
        let ry = midranks(&[3.0, 2.0, 1.0]);
        let rho = pearson(&rx, &ry).unwrap();
        let (two_sided, lower) = exact_permutation_p(&rx, &ry, rho);
        // of the 6 rank permutations exactly one is the full reversal
        assert!((lower - 1.0 / 6.0).abs() < 1e-12);
        // ...and the identity also reaches |rho| = 1
        assert!((two_sided - 2.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn exact_permutation_matches_brute_force_for_n5() {
        // frozen from brute-force enumeration of all 120 permutations
        let (rho, p) = spearman(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 1.0, 4.0, 3.0, 5.0]).unwrap();
        assert!((rho - 0.8).abs() < 1e-12);
        assert!((p - 16.0 / 120.0).abs() < 1e-12);
    }

    #[test]
    fn brute_force_formula_on_untied_cases_up_to_8() {
        // against 1 - 6*sum(d^2)/(n(n^2-1)), valid without ties
        let cases: [(&[f64], &[f64]); 4] = [
            (&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], &[2.0, 3.0, 1.0, 5.0, 6.0, 4.0]),
            (&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0], &[7.0, 1.0, 5.0, 2.0, 6.0, 3.0, 4.0]),
            (
                &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0],
                &[3.0, 1.0, 4.0, 2.0, 7.0, 5.0, 8.0, 6.0],
            ),
            (&[5.0, 1.0, 4.0, 2.0, 3.0], &[10.0, 2.0, 9.0, 1.0, 7.0]),
        ];
        for (x, y) in cases {
            let (rho, _) = spearman(x, y).unwrap();
            let rx = midranks(x);
            let ry = midranks(y);
            let n = x.len() as f64;
            let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b) * (a - b)).sum();
            let formula = 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
            assert!((rho - formula).abs() < 1e-12, "mismatch on {x:?} vs {y:?}");
        }
    }

    #[test]
    fn t_approximation_matches_reference_for_n12() {
        // reference values computed with scipy.stats.spearmanr
        let x = [3.1, 1.2, 5.5, 2.2, 9.4, 7.7, 0.3, 4.4, 6.1, 8.8, 2.9, 5.0];
        let y = [1.0, 2.5, 0.7, 3.3, 0.1, 0.4, 5.0, 1.1, 0.9, 0.2, 2.0, 1.4];
        let (rho, p) = spearman(&x, &y).unwrap();
        assert!((rho - (-0.9580419580419581)).abs() < 1e-12);
        assert!((p - 9.5435818268384e-07).abs() < 1e-12);
    }

    #[test]
    fn ties_use_midranks() {
        // reference values computed with scipy.stats.spearmanr
        let x = [1.0, 2.0, 2.0, 3.0, 4.0, 5.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
        let y = [2.0, 1.0, 3.0, 3.0, 5.0, 4.0, 7.0, 6.0, 8.0, 8.0, 9.0, 11.0];
        let (rho, p) = spearman(&x, &y).unwrap();
        assert!((rho - 0.959507042253521).abs() < 1e-12);
        assert!((p - 8.009588155358653e-07).abs() < 1e-12);
    }

    #[test]
    fn constant_input_is_an_error() {
        assert!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(spearman(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(spearman(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }
}
