//! Adaptive quadrature used as an independent oracle for the closed-form
//! energies. 1-D Gauss–Kronrod (G7, K15) with interval bisection, nested in
//! polar coordinates for integrals over disks and annuli.

/// Kronrod-15 abscissae on [0,1] half-interval (symmetric).
const XK: [f64; 8] = [
    0.0,
    0.207784955007898,
    0.405845151377397,
    0.586087235467691,
    0.741531185599394,
    0.864864423359769,
    0.949107912342759,
    0.991455371120813,
];
const WK: [f64; 8] = [
    0.209482141084728,
    0.204432940075298,
    0.190350578064785,
    0.169004726639267,
    0.140653259715525,
    0.104790010322250,
    0.063092092629979,
    0.022935322010529,
];
/// Gauss-7 weights matching the odd Kronrod nodes (XK[0], XK[2], XK[4], XK[6]).
const WG: [f64; 4] = [
    0.417959183673469,
    0.381830050505119,
    0.279705391489277,
    0.129484966168870,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let mut fk = 0.0;
    let mut fg = 0.0;
    for k in 0..8 {
        let (lo, hi) = (f(c - hw * XK[k]), f(c + hw * XK[k]));
        let pair = if k == 0 { lo } else { lo + hi };
        fk += WK[k] * pair;
        if k % 2 == 0 {
            fg += WG[k / 2] * pair;
        }
    }
    let ik = fk * hw;
    let ig = fg * hw;
    (ik, (ik - ig).abs())
}

/// Adaptive 1-D integral of `f` over [a,b] to absolute tolerance `tol`.
/// Seeds with eight uniform panels so narrow peaks between coarse nodes are
/// not silently missed.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let span = (b - a).abs().max(1e-300);
    let mut stack = Vec::with_capacity(64);
    let seeds = 8;
    for k in 0..seeds {
        let lo = a + (b - a) * k as f64 / seeds as f64;
        let hi = a + (b - a) * (k + 1) as f64 / seeds as f64;
        let (est, err) = gk15(&f, lo, hi);
        stack.push((lo, hi, est, err));
    }
    let mut total = 0.0;
    let mut budget = 20_000;
    while let Some((lo, hi, est, err)) = stack.pop() {
        let width = hi - lo;
        if err < tol * width / span || width < 1e-13 * span || budget == 0 {
            total += est;
            continue;
        }
        budget -= 1;
        let mid = 0.5 * (lo + hi);
        let l = gk15(&f, lo, mid);
        let r = gk15(&f, mid, hi);
        stack.push((lo, mid, l.0, l.1));
        stack.push((mid, hi, r.0, r.1));
    }
    total
}

/// Integral of a density over the annulus r in [r_lo, r_hi] around `center`,
/// in polar coordinates. `r_lo = 0` gives the full disk of radius `r_hi`.
pub fn integrate_annulus<F>(density: F, center: [f64; 2], r_lo: f64, r_hi: f64, tol: f64) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let two_pi = 2.0 * std::f64::consts::PI;
    integrate(
        |r| {
            r * integrate(
                |t| density(center[0] + r * t.cos(), center[1] + r * t.sin()),
                0.0,
                two_pi,
                tol,
            )
        },
        r_lo,
        r_hi,
        tol,
    )
}
