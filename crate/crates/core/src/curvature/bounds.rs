//! Closed-form bounds and expectations for literal–clause graphs.
//!
//! Literal degrees of a random instance are modeled as zero-truncated
//! Poisson with rate `lambda = alpha * k / 2`; clause degrees equal `k`.

use statrs::function::gamma::ln_gamma;

pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Lower bound shared by ORC and BFC on a bipartite edge:
/// 0 if either endpoint is a leaf, else `2/d_i + 2/d_j - 2`.
///
/// Equal to `-2 max(0, 1 - 1/d_i - 1/d_j)` for all `d_i, d_j >= 1`.
pub fn lower_bound(d_i: usize, d_j: usize) -> f64 {
    assert!(d_i >= 1 && d_j >= 1, "degrees of edge endpoints are positive");
    if d_i.min(d_j) == 1 {
        0.0
    } else {
        2.0 / d_i as f64 + 2.0 / d_j as f64 - 2.0
    }
}

/// `-2 max(0, 1 - 1/d_i - 1/d_j)`, the ORC lower bound in its original form.
pub fn orc_lower_bound(d_i: usize, d_j: usize) -> f64 {
    -2.0 * (1.0 - 1.0 / d_i as f64 - 1.0 / d_j as f64).max(0.0)
}

/// Upper bound on the BFC of a literal–clause edge with literal degree
/// `d_i`, clause width `k` and `m` clauses.
pub fn upper_bound(d_i: usize, k: usize, m: usize) -> f64 {
    assert!(d_i >= 1 && k >= 1 && m >= 1);
    let gamma_cap = (k - 1).max(m - 1).max(1) as f64;
    2.0 / d_i as f64 + 2.0 / k as f64 - 2.0 + (d_i + k - 2) as f64 / (gamma_cap * d_i.max(k) as f64)
}

/// Large-density limit of the mean BFC: `2/k - 2`.
pub fn bfc_limit(k: usize) -> f64 {
    assert!(k >= 1);
    2.0 / k as f64 - 2.0
}

/// Mean of the zero-truncated Poisson literal degree: `lambda / (1 - e^-lambda)`.
pub fn expected_literal_degree(alpha: f64, k: usize) -> f64 {
    let lambda = alpha * k as f64 / 2.0;
    if lambda == 0.0 {
        return 1.0;
    }
    lambda / -(-lambda).exp_m1()
}

/// `E[f(d_i, k)]` for `d_i` zero-truncated Poisson, `f` the lower bound.
/// This is the per-literal average.
pub fn expected_lower_bound(alpha: f64, k: usize, tail_tol: f64) -> f64 {
    let lambda = alpha * k as f64 / 2.0;
    ztp_sum(lambda, tail_tol, |h, p| p * lower_bound(h, k))
}

/// Edge-weighted version of [`expected_lower_bound`]: a uniformly random
/// edge sees its literal endpoint's degree size-biased, `h P*(h) / E[d_i]`.
pub fn expected_edge_lower_bound(alpha: f64, k: usize, tail_tol: f64) -> f64 {
    let lambda = alpha * k as f64 / 2.0;
    ztp_sum(lambda, tail_tol, |h, p| h as f64 * p * lower_bound(h, k)) / expected_literal_degree(alpha, k)
}

/// Sums `term(h, P*(h))` over the zero-truncated Poisson support, walking out
/// from the mode and stopping once a geometric bound on the remaining tail
/// mass drops below `tail_tol`.
fn ztp_sum(lambda: f64, tail_tol: f64, term: impl Fn(usize, f64) -> f64) -> f64 {
    assert!(lambda > 0.0 && tail_tol > 0.0);
    let mode = (lambda.floor() as usize).max(1);
    let log_norm = (-(-lambda).exp_m1()).ln();
    let log_p = |h: usize| h as f64 * lambda.ln() - lambda - ln_gamma(h as f64 + 1.0) - log_norm;

    let p_mode = log_p(mode).exp();
    let mut total = term(mode, p_mode);

    // Upward: ratio p(h+1)/p(h) = lambda/(h+1).
    let mut p = p_mode;
    let mut h = mode;
    loop {
        p *= lambda / (h + 1) as f64;
        h += 1;
        total += term(h, p);
        let r = lambda / (h + 1) as f64;
        if r < 1.0 && p * r / (1.0 - r) < tail_tol {
            break;
        }
    }

    // Downward: ratio p(h-1)/p(h) = h/lambda.
    let mut p = p_mode;
    let mut h = mode;
    while h > 1 {
        p *= h as f64 / lambda;
        h -= 1;
        total += term(h, p);
        let r = (h - 1) as f64 / lambda;
        if r < 1.0 && p * r / (1.0 - r) < tail_tol {
            break;
        }
    }
    total
}
