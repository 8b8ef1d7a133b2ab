//! Small derivative-free 2-D minimizer (Nelder–Mead) used for local
//! refinement after coarse grid searches.

/// Minimizes `f` starting from `x0` with initial simplex scale `scale`.
/// Returns the best point and value. Deterministic.
pub fn nelder_mead_2d<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    x0: (f64, f64),
    scale: f64,
    max_iters: usize,
    tol: f64,
) -> ((f64, f64), f64) {
    let mut pts = [
        x0,
        (x0.0 + scale, x0.1),
        (x0.0, x0.1 + scale),
    ];
    let mut vals = [f(pts[0].0, pts[0].1), f(pts[1].0, pts[1].1), f(pts[2].0, pts[2].1)];

    let order = |pts: &mut [(f64, f64); 3], vals: &mut [f64; 3]| {
        // insertion sort by value
        for i in 1..3 {
            let mut j = i;
            while j > 0 && vals[j] < vals[j - 1] {
                vals.swap(j, j - 1);
                pts.swap(j, j - 1);
                j -= 1;
            }
        }
    };

    order(&mut pts, &mut vals);
    for _ in 0..max_iters {
        if (vals[2] - vals[0]).abs() < tol {
            break;
        }
        let centroid = (
            (pts[0].0 + pts[1].0) / 2.0,
            (pts[0].1 + pts[1].1) / 2.0,
        );
        let refl = (2.0 * centroid.0 - pts[2].0, 2.0 * centroid.1 - pts[2].1);
        let f_refl = f(refl.0, refl.1);
        if f_refl < vals[0] {
            let exp = (
                centroid.0 + 2.0 * (refl.0 - centroid.0),
                centroid.1 + 2.0 * (refl.1 - centroid.1),
            );
            let f_exp = f(exp.0, exp.1);
            if f_exp < f_refl {
                pts[2] = exp;
                vals[2] = f_exp;
            } else {
                pts[2] = refl;
                vals[2] = f_refl;
            }
        } else if f_refl < vals[1] {
            pts[2] = refl;
            vals[2] = f_refl;
        } else {
            let contr = (
                centroid.0 + 0.5 * (pts[2].0 - centroid.0),
                centroid.1 + 0.5 * (pts[2].1 - centroid.1),
            );
            let f_contr = f(contr.0, contr.1);
            if f_contr < vals[2] {
                pts[2] = contr;
                vals[2] = f_contr;
            } else {
                // shrink toward the best vertex
                for i in 1..3 {
                    pts[i] = (
                        pts[0].0 + 0.5 * (pts[i].0 - pts[0].0),
                        pts[0].1 + 0.5 * (pts[i].1 - pts[0].1),
                    );
                    vals[i] = f(pts[i].0, pts[i].1);
                }
            }
        }
        order(&mut pts, &mut vals);
    }
    (pts[0], vals[0])
}
