//! Frank–Wolfe routines over the probability simplex.

/// Result of minimizing ‖Σ w_i x_i − b‖² over the weight simplex.
#[derive(Clone, Debug)]
pub struct LeastSquaresFit {
    pub weights: Vec<f64>,
    /// Objective value wᵀGw − 2cᵀw + ‖b‖² as tracked by the iteration.
    pub objective: f64,
    /// Final Frank–Wolfe duality gap (upper bound on objective − optimum).
    pub gap: f64,
    pub iterations: usize,
}

/// Away-step Frank–Wolfe with exact line search for the quadratic
/// f(w) = wᵀ G w − 2 cᵀ w + b_norm_sqr on the simplex.
///
/// `gram[i][j]` = ⟨x_i, x_j⟩ and `linear[i]` = ⟨x_i, b⟩. The iteration starts
/// at the vertex with the smallest single-vertex objective and stops when the
/// duality gap drops below `gap_tol` or the objective below `objective_tol`.
pub fn simplex_least_squares(
    gram: &[Vec<f64>],
    linear: &[f64],
    b_norm_sqr: f64,
    max_iter: usize,
    gap_tol: f64,
    objective_tol: f64,
) -> LeastSquaresFit {
    let n = linear.len();
    assert!(n > 0 && gram.len() == n);

    let start = (0..n)
        .min_by(|&i, &j| {
            let fi = gram[i][i] - 2.0 * linear[i];
            let fj = gram[j][j] - 2.0 * linear[j];
            fi.total_cmp(&fj)
        })
        .unwrap();
    let mut w = vec![0.0; n];
    w[start] = 1.0;
    // gw = G w
    let mut gw: Vec<f64> = (0..n).map(|i| gram[i][start]).collect();
    let mut wgw = gram[start][start];
    let mut cw = linear[start];

    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    for it in 0..max_iter {
        iterations = it;
        let objective = wgw - 2.0 * cw + b_norm_sqr;
        // ∇f = 2(Gw − c)
        let grad: Vec<f64> = (0..n).map(|i| 2.0 * (gw[i] - linear[i])).collect();
        let grad_w: f64 = grad.iter().zip(&w).map(|(g, x)| g * x).sum();
        let s = (0..n).min_by(|&i, &j| grad[i].total_cmp(&grad[j])).unwrap();
        let away = (0..n)
            .filter(|&i| w[i] > 0.0)
            .max_by(|&i, &j| grad[i].total_cmp(&grad[j]))
            .unwrap();
        let gap_fw = grad_w - grad[s];
        let gap_away = grad[away] - grad_w;
        gap = gap_fw;
        if gap_fw <= gap_tol || objective <= objective_tol {
            break;
        }

        let (toward, gamma_max, sign) = if gap_fw >= gap_away || w[away] >= 1.0 {
            (s, 1.0, 1.0)
        } else {
            (away, w[away] / (1.0 - w[away]), -1.0)
        };
        // Direction d = sign·(e_toward − w).
        // dᵀGd = G_tt − 2(Gw)_t + wᵀGw (sign squared away).
        let dgd = gram[toward][toward] - 2.0 * gw[toward] + wgw;
        let gd = sign * (grad[toward] - grad_w);
        if dgd <= 0.0 {
            break;
        }
        let gamma = (-gd / (2.0 * dgd)).clamp(0.0, gamma_max);
        if gamma == 0.0 {
            break;
        }
        // w ← w + γ·sign·(e_t − w) = (1 − γ·sign)w + γ·sign·e_t
        let a = 1.0 - gamma * sign;
        let bcoef = gamma * sign;
        for x in w.iter_mut() {
            *x *= a;
        }
        w[toward] += bcoef;
        if sign < 0.0 && gamma >= gamma_max {
            w[toward] = 0.0;
        }
        for x in w.iter_mut() {
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        for i in 0..n {
            gw[i] = a * gw[i] + bcoef * gram[i][toward];
        }
        wgw = w.iter().zip(&gw).map(|(x, g)| x * g).sum();
        cw = w.iter().zip(linear).map(|(x, c)| x * c).sum();
    }
    let sum: f64 = w.iter().sum();
    for x in w.iter_mut() {
        *x /= sum;
    }
    let objective = wgw - 2.0 * cw + b_norm_sqr;
    LeastSquaresFit {
        weights: w,
        objective: objective.max(0.0),
        gap,
        iterations,
    }
}

/// Standard open-loop step size 2/(k+2).
pub fn open_loop_step(k: usize) -> f64 {
    2.0 / (k as f64 + 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram_of(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
        points
            .iter()
            .map(|a| points.iter().map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum()).collect())
            .collect()
    }

    #[test]
    fn interior_point_recovered() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let b = [0.2, 0.3];
        let g = gram_of(&pts);
        let c: Vec<f64> = pts.iter().map(|p| p[0] * b[0] + p[1] * b[1]).collect();
        let fit = simplex_least_squares(&g, &c, 0.13, 10_000, 1e-15, 1e-20);
        assert!(fit.objective < 1e-14);
        assert!((fit.weights[1] - 0.2).abs() < 1e-7);
        assert!((fit.weights[2] - 0.3).abs() < 1e-7);
    }

    #[test]
    fn exterior_point_projects_to_facet() {
        let pts = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let g = gram_of(&pts);
        // b = (1, 1)
        let c = vec![1.0, 1.0];
        let fit = simplex_least_squares(&g, &c, 2.0, 10_000, 1e-14, 0.0);
        // Closest point (1/2, 1/2), squared distance 1/2.
        assert!((fit.objective - 0.5).abs() < 1e-12);
    }
}
