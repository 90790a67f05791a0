//! Derivative-free minimization: a deterministic grid scan that seeds
//! Nelder–Mead simplex refinements.

/// Options for [`nelder_mead`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    /// Stop once `f_max − f_min` over the simplex falls below this.
    pub f_tol: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            f_tol: 1e-8,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Standard Nelder–Mead (reflection 1, expansion 2, contraction ½, shrink ½).
///
/// After the simplex first collapses it is rebuilt once around the best
/// vertex; a premature collapse on a ridge is common otherwise. The
/// iteration budget is shared between both runs.
pub fn nelder_mead<F>(f: F, x0: &[f64], opts: &NelderMeadOptions) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        f(x)
    };
    let mut iterations = 0;
    let mut start = x0.to_vec();
    let mut best = (start.clone(), eval(&start));
    let mut converged = false;
    for _ in 0..2 {
        let (x, v, iters, ok) = simplex_run(
            &mut eval,
            &start,
            opts.initial_step,
            opts.f_tol,
            opts.max_iterations.saturating_sub(iterations),
        );
        iterations += iters;
        converged = ok;
        if v <= best.1 {
            best = (x, v);
        }
        if !ok {
            break;
        }
        start = best.0.clone();
    }
    Minimum {
        x: best.0,
        value: best.1,
        iterations,
        evaluations,
        converged,
    }
}

fn simplex_run<F>(
    eval: &mut F,
    x0: &[f64],
    step: f64,
    f_tol: f64,
    budget: usize,
) -> (Vec<f64>, f64, usize, bool)
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x);
        simplex.push((x, v));
    }

    let mut iterations = 0;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        if spread <= f_tol {
            let (x, v) = simplex.swap_remove(0);
            return (x, v, iterations, true);
        }
        if iterations >= budget {
            let (x, v) = simplex.swap_remove(0);
            return (x, v, iterations, false);
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let along = |t: f64, worst: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(worst)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let worst = simplex[n].0.clone();
        let f_worst = simplex[n].1;
        let f_second = simplex[n - 1].1;
        let f_best = simplex[0].1;

        let reflected = along(1.0, &worst);
        let f_r = eval(&reflected);
        if f_r < f_best {
            let expanded = along(2.0, &worst);
            let f_e = eval(&expanded);
            simplex[n] = if f_e < f_r { (expanded, f_e) } else { (reflected, f_r) };
            continue;
        }
        if f_r < f_second {
            simplex[n] = (reflected, f_r);
            continue;
        }
        let (contracted, f_c) = if f_r < f_worst {
            let c = along(0.5, &worst);
            let v = eval(&c);
            (c, v)
        } else {
            let c = along(-0.5, &worst);
            let v = eval(&c);
            (c, v)
        };
        if f_c < f_worst.min(f_r) {
            simplex[n] = (contracted, f_c);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            for (x, b) in vertex.0.iter_mut().zip(&best) {
                *x = b + 0.5 * (*x - b);
            }
            vertex.1 = eval(&vertex.0);
        }
    }
}

/// Evaluates `f` on the tensor grid of `points` values per dimension over
/// `[lo, hi)` and returns the `keep` best grid points, best first.
///
/// Ties keep scan order (first dimension most significant), so the result
/// is deterministic.
pub fn grid_scan<F>(
    f: F,
    dims: usize,
    points: usize,
    lo: f64,
    hi: f64,
    keep: usize,
) -> Vec<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> f64,
{
    let step = (hi - lo) / points as f64;
    let total = points.pow(dims as u32);
    let mut scored: Vec<(usize, f64)> = Vec::with_capacity(total);
    let mut x = vec![0.0; dims];
    for idx in 0..total {
        let mut rem = idx;
        for d in (0..dims).rev() {
            x[d] = lo + step * (rem % points) as f64;
            rem /= points;
        }
        scored.push((idx, f(&x)));
    }
    scored.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    scored
        .into_iter()
        .take(keep)
        .map(|(idx, v)| {
            let mut rem = idx;
            let mut x = vec![0.0; dims];
            for d in (0..dims).rev() {
                x[d] = lo + step * (rem % points) as f64;
                rem /= points;
            }
            (x, v)
        })
        .collect()
}
