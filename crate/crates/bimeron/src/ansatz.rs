//! Analytic trial fields and their closed-form energies.
//!
//! The bimeron prototype is the stereographic image of f(z) = c(z-a)/(z+a),
//! a vortex at z = a and an antivortex at z = -a. A radial cut-off makes the
//! field constant outside a finite disk so it satisfies the in-plane
//! Dirichlet condition; the cut-off profile is built from
//! g(s) = ln(1+s^2) blended to a constant, with the blend chosen so the
//! derivative envelope 0 <= g' <= 2s/(s^2+1) and concavity bounds hold.

use crate::error::{BimeronError, Result};
use crate::quad::integrate_annulus;

pub const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Parameters of the bimeron prototype and its cut-off modification.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct AnsatzParams {
    /// vortex half-separation (> 0)
    pub a: f64,
    /// cut-off radius; the field is exactly the prototype for |z - z0| <= r_cut
    /// and exactly constant for |z - z0| >= 2 r_cut
    pub r_cut: f64,
    /// boundary phase angle, c = e^{i c_phase}
    pub c_phase: f64,
    /// center offset
    pub z0: [f64; 2],
}

impl AnsatzParams {
    pub fn new(a: f64, r_cut: f64, c_phase: f64, z0: [f64; 2]) -> Result<Self> {
        if !(a > 0.0) {
            return Err(BimeronError::InvalidParameter(format!("a = {a} must be > 0")));
        }
        if !(r_cut > 0.0) || r_cut >= 0.5 {
            return Err(BimeronError::InvalidParameter(format!(
                "r_cut = {r_cut} must lie in (0, 1/2)"
            )));
        }
        if !(0.0..2.0 * std::f64::consts::PI).contains(&c_phase) {
            return Err(BimeronError::InvalidParameter(format!(
                "c_phase = {c_phase} must lie in [0, 2 pi)"
            )));
        }
        Ok(AnsatzParams { a, r_cut, c_phase, z0 })
    }
}

// ---------------------------------------------------------------------------
// cut-off profile
// ---------------------------------------------------------------------------

const LN5: f64 = 1.6094379124341003;
/// g on [2,4] is the quintic Hermite interpolant of
/// (g, g', g'') = (ln 5, 4/5, -6/25) at s=2 and (ln 5 + 18/25, 0, 0) at s=4;
/// its top coefficient vanishes, leaving a quartic in t = (s-2)/2.
const G_CONST: f64 = LN5 + 0.72;

/// Cut-off scalar profile g(s): ln(1+s^2) for s <= 2, constant for s >= 4.
pub fn g(s: f64) -> f64 {
    if s <= 2.0 {
        (1.0 + s * s).ln()
    } else if s >= 4.0 {
        G_CONST
    } else {
        let t = (s - 2.0) / 2.0;
        LN5 + t * (1.6 + t * (-0.48 + t * (-0.96 + t * 0.56)))
    }
}

pub fn g_prime(s: f64) -> f64 {
    if s <= 2.0 {
        2.0 * s / (1.0 + s * s)
    } else if s >= 4.0 {
        0.0
    } else {
        let t = (s - 2.0) / 2.0;
        0.5 * (1.6 + t * (-0.96 + t * (-2.88 + t * 2.24)))
    }
}

pub fn g_double_prime(s: f64) -> f64 {
    if s <= 2.0 {
        let d = 1.0 + s * s;
        2.0 * (1.0 - s * s) / (d * d)
    } else if s >= 4.0 {
        0.0
    } else {
        let t = (s - 2.0) / 2.0;
        0.25 * (-0.96 + t * (-5.76 + t * 6.72))
    }
}

/// Radius function r(s) = g'(s) / (1 - sgn(s^2-1) sqrt(1 - g'(s)^2)).
/// Identically s on [0,2]; diverges as s -> 4.
pub fn radius(s: f64) -> f64 {
    if s <= 2.0 {
        s
    } else if s >= 4.0 {
        f64::INFINITY
    } else {
        let gp = g_prime(s);
        (1.0 + (1.0 - gp * gp).max(0.0).sqrt()) / gp
    }
}

/// 1 / r(s); zero for s >= 4. Numerically stable where r blows up.
pub fn inv_radius(s: f64) -> f64 {
    if s <= 0.0 {
        f64::INFINITY
    } else if s <= 2.0 {
        1.0 / s
    } else if s >= 4.0 {
        0.0
    } else {
        let gp = g_prime(s);
        gp / (1.0 + (1.0 - gp * gp).max(0.0).sqrt())
    }
}

// ---------------------------------------------------------------------------
// pointwise maps
// ---------------------------------------------------------------------------

/// Inverse stereographic map Phi(y) = (2y, |y|^2 - 1) / (|y|^2 + 1).
pub fn stereographic(y: [f64; 2]) -> [f64; 3] {
    let r2 = y[0] * y[0] + y[1] * y[1];
    let den = r2 + 1.0;
    [2.0 * y[0] / den, 2.0 * y[1] / den, (r2 - 1.0) / den]
}

/// Phi(N/D) for complex N, D in homogeneous form; smooth through D = 0.
#[inline]
fn phi_of_ratio(n_re: f64, n_im: f64, d_re: f64, d_im: f64) -> [f64; 3] {
    let n2 = n_re * n_re + n_im * n_im;
    let d2 = d_re * d_re + d_im * d_im;
    let den = n2 + d2;
    // N * conj(D)
    let p_re = n_re * d_re + n_im * d_im;
    let p_im = n_im * d_re - n_re * d_im;
    [2.0 * p_re / den, 2.0 * p_im / den, (n2 - d2) / den]
}

/// Bimeron prototype Phi(e^{i c_phase} (w-a)/(w+a)) with w = z - z0.
/// Continuous everywhere; the pole w = -a maps to the north pole.
pub fn bimeron_prototype_map(x: f64, y: f64, p: &AnsatzParams) -> [f64; 3] {
    let wx = x - p.z0[0];
    let wy = y - p.z0[1];
    let (c, s) = (p.c_phase.cos(), p.c_phase.sin());
    // N = e^{i phase} (w - a), D = w + a
    let nx = wx - p.a;
    let n_re = c * nx - s * wy;
    let n_im = s * nx + c * wy;
    phi_of_ratio(n_re, n_im, wx + p.a, wy)
}

/// Modified (cut-off) field: prototype for |z-z0| <= r_cut, exactly
/// (cos c_phase, sin c_phase, 0) for |z-z0| >= 2 r_cut, smooth in between.
pub fn cutoff_field_map(x: f64, y: f64, p: &AnsatzParams) -> [f64; 3] {
    let wx = x - p.z0[0];
    let wy = y - p.z0[1];
    let s = (wx * wx + wy * wy).sqrt();
    if s <= p.r_cut {
        return bimeron_prototype_map(x, y, p);
    }
    if s >= 2.0 * p.r_cut {
        return [p.c_phase.cos(), p.c_phase.sin(), 0.0];
    }
    let f = cutoff_f_transition(wx, wy, s, p);
    let (c, sn) = (p.c_phase.cos(), p.c_phase.sin());
    let n_re = c * f.0 - sn * f.1;
    let n_im = sn * f.0 + c * f.1;
    phi_of_ratio(n_re, n_im, f.2, f.3)
}

/// (N_re, N_im, D_re, D_im) of f = (zhat - a/r)(zhat + a/r)^-1 in the
/// transition annulus, with r the rescaled radius function.
#[inline]
fn cutoff_f_transition(wx: f64, wy: f64, s: f64, p: &AnsatzParams) -> (f64, f64, f64, f64) {
    // r_scaled(s) = (r_cut/2) r(2 s / r_cut): identity up to r_cut, infinite at 2 r_cut
    let ir = (2.0 / p.r_cut) * inv_radius(2.0 * s / p.r_cut);
    let zx = wx / s;
    let zy = wy / s;
    (zx - p.a * ir, zy, zx + p.a * ir, zy)
}

/// Complex value of f_{R,a}(z) (phase applied), used by the density oracle.
pub fn cutoff_f(x: f64, y: f64, p: &AnsatzParams) -> (f64, f64) {
    let wx = x - p.z0[0];
    let wy = y - p.z0[1];
    let s = (wx * wx + wy * wy).sqrt();
    let (n_re, n_im, d_re, d_im) = if s <= p.r_cut {
        (wx - p.a, wy, wx + p.a, wy)
    } else if s >= 2.0 * p.r_cut {
        (1.0, 0.0, 1.0, 0.0)
    } else {
        cutoff_f_transition(wx, wy, s, p)
    };
    let d2 = d_re * d_re + d_im * d_im;
    let q_re = (n_re * d_re + n_im * d_im) / d2;
    let q_im = (n_im * d_re - n_re * d_im) / d2;
    let (c, sn) = (p.c_phase.cos(), p.c_phase.sin());
    (c * q_re - sn * q_im, sn * q_re + c * q_im)
}

// ---------------------------------------------------------------------------
// closed forms
// ---------------------------------------------------------------------------

#[inline]
fn inv_eps_of(eps: f64) -> Result<f64> {
    if eps.is_infinite() && eps > 0.0 {
        Ok(0.0)
    } else if eps > 0.0 {
        Ok(1.0 / eps)
    } else {
        Err(BimeronError::InvalidParameter(format!("eps = {eps} must be > 0")))
    }
}

/// Energy of the (uncut) prototype with c = 1 on the concentric disk D_R:
/// 4 pi (1 - lambda a / 2 eps) R^2/(R^2+a^2)
///   + pi (a/eps)^2 (ln((R^2+a^2)/a^2) - R^2/(R^2+a^2)).
/// `eps = f64::INFINITY` selects the pure-Dirichlet limit.
pub fn disk_energy_closed_form(r: f64, a: f64, lambda: f64, eps: f64) -> Result<f64> {
    if !(r > 0.0) || !(a > 0.0) {
        return Err(BimeronError::InvalidParameter(format!(
            "R = {r}, a = {a} must be > 0"
        )));
    }
    let ie = inv_eps_of(eps)?;
    let s = r * r / (r * r + a * a);
    let ai = a * ie;
    Ok(FOUR_PI * (1.0 - 0.5 * lambda * ai) * s
        + std::f64::consts::PI * ai * ai * (((r * r + a * a) / (a * a)).ln() - s))
}

/// Dirichlet energy of the harmonic bimeron on the offset disk D_r(z0):
/// I(r, z0) = 2 pi (1 + (r^2 - z0^2 - a^2)/sqrt((a^2+(r-z0)^2)(a^2+(r+z0)^2))).
pub fn offset_disk_energy(r: f64, z0_mag: f64, a: f64) -> Result<f64> {
    if !(r > 0.0) || !(a > 0.0) || z0_mag < 0.0 {
        return Err(BimeronError::InvalidParameter(format!(
            "r = {r}, a = {a} must be > 0 and z0 = {z0_mag} >= 0"
        )));
    }
    let num = r * r - z0_mag * z0_mag - a * a;
    let d1 = a * a + (r - z0_mag) * (r - z0_mag);
    let d2 = a * a + (r + z0_mag) * (r + z0_mag);
    Ok(2.0 * std::f64::consts::PI * (1.0 + num / (d1 * d2).sqrt()))
}

/// Optimal trial parametrization in the almost-conformal regime:
/// a/eps = lambda/(2 |ln lambda|), bound = 4 pi (1 - lambda^2/(8 |ln lambda|)).
pub fn optimal_upper_bound(lambda: f64) -> Result<(f64, f64)> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(BimeronError::InvalidLambda(lambda));
    }
    let l = lambda.ln().abs();
    Ok((lambda / (2.0 * l), FOUR_PI * (1.0 - lambda * lambda / (8.0 * l))))
}

// ---------------------------------------------------------------------------
// densities (for the quadrature oracle) and the annulus energy
// ---------------------------------------------------------------------------

/// Reduced energy density of the uncut prototype f = (z-a)/(z+a) in
/// homogeneous form: smooth through the pole at z = -a.
pub fn prototype_reduced_density(x: f64, y: f64, a: f64, lambda: f64, eps: f64) -> f64 {
    let ie = if eps.is_infinite() { 0.0 } else { 1.0 / eps };
    let n_re = x - a;
    let d_re = x + a;
    let n2 = n_re * n_re + y * y;
    let d2 = d_re * d_re + y * y;
    let den = (n2 + d2) * (n2 + d2);
    // f' = 2a/D^2, so Re(f')/(1+|f|^2)^2 = 2a Re(conj(D)^2)/den
    let db2_re = d_re * d_re - y * y;
    16.0 * a * a / den - 4.0 * lambda * ie * 2.0 * a * db2_re / den
        + 0.5 * ie * ie * (n2 - d2) * (n2 - d2) / den
}

/// Reduced energy density of the cut-off field, with derivatives of f taken
/// by central differences on the analytic map (step 1e-6).
pub fn cutoff_reduced_density(x: f64, y: f64, p: &AnsatzParams, lambda: f64, eps: f64) -> f64 {
    let ie = if eps.is_infinite() { 0.0 } else { 1.0 / eps };
    let d = 1e-6;
    let f0 = cutoff_f(x, y, p);
    let fxp = cutoff_f(x + d, y, p);
    let fxm = cutoff_f(x - d, y, p);
    let fyp = cutoff_f(x, y + d, p);
    let fym = cutoff_f(x, y - d, p);
    let fx = ((fxp.0 - fxm.0) / (2.0 * d), (fxp.1 - fxm.1) / (2.0 * d));
    let fy = ((fyp.0 - fym.0) / (2.0 * d), (fyp.1 - fym.1) / (2.0 * d));
    let u2 = f0.0 * f0.0 + f0.1 * f0.1;
    let den = (u2 + 1.0) * (u2 + 1.0);
    let grad2 = fx.0 * fx.0 + fx.1 * fx.1 + fy.0 * fy.0 + fy.1 * fy.1;
    let div = fx.0 + fy.1;
    2.0 * grad2 / den - 2.0 * lambda * ie * div / den
        + 0.5 * ie * ie * (u2 - 1.0) * (u2 - 1.0) / den
}

/// Energy of the cut-off field on the transition annulus r_cut <= |z-z0| <= 2 r_cut,
/// by adaptive quadrature of the reduced density.
pub fn annulus_energy(p: &AnsatzParams, lambda: f64, eps: f64, tol: f64) -> f64 {
    integrate_annulus(
        |x, y| cutoff_reduced_density(x, y, p, lambda, eps),
        p.z0,
        p.r_cut,
        2.0 * p.r_cut,
        tol,
    )
}

/// Total analytic energy of the cut-off trial field (closed form on the inner
/// disk plus quadrature on the annulus); valid for c_phase = 0.
pub fn cutoff_total_energy(p: &AnsatzParams, lambda: f64, eps: f64, tol: f64) -> Result<f64> {
    Ok(disk_energy_closed_form(p.r_cut, p.a, lambda, eps)? + annulus_energy(p, lambda, eps, tol))
}

// ---------------------------------------------------------------------------
// annulus bound check (empirical constants of the cut-off construction)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct AnnulusReport {
    /// max over samples of |grad m|^2 |x|^4 / a^2
    pub c_grad: f64,
    /// max over samples of m3^2 |x|^2 / a^2
    pub c_m3: f64,
    pub samples: usize,
}

/// Empirical constants for the annulus decay bounds
/// |grad m|^2 <= C a^2/|x|^4 and m3^2 <= C a^2/|x|^2 on D_{2R} \ D_R.
/// Gradients by central differences on the analytic map.
pub fn annulus_bound_check(p: &AnsatzParams, samples: &[[f64; 2]]) -> Result<AnnulusReport> {
    let mut c_grad = 0.0f64;
    let mut c_m3 = 0.0f64;
    let d = 1e-7;
    for &pt in samples {
        let wx = pt[0] - p.z0[0];
        let wy = pt[1] - p.z0[1];
        let s = (wx * wx + wy * wy).sqrt();
        if s < p.r_cut || s > 2.0 * p.r_cut {
            return Err(BimeronError::OutOfAnnulus(s, p.r_cut, 2.0 * p.r_cut));
        }
        let m = cutoff_field_map(pt[0], pt[1], p);
        let mxp = cutoff_field_map(pt[0] + d, pt[1], p);
        let mxm = cutoff_field_map(pt[0] - d, pt[1], p);
        let myp = cutoff_field_map(pt[0], pt[1] + d, p);
        let mym = cutoff_field_map(pt[0], pt[1] - d, p);
        let mut grad2 = 0.0;
        for k in 0..3 {
            let gx = (mxp[k] - mxm[k]) / (2.0 * d);
            let gy = (myp[k] - mym[k]) / (2.0 * d);
            grad2 += gx * gx + gy * gy;
        }
        let s2 = s * s;
        c_grad = c_grad.max(grad2 * s2 * s2 / (p.a * p.a));
        c_m3 = c_m3.max(m[2] * m[2] * s2 / (p.a * p.a));
    }
    Ok(AnnulusReport {
        c_grad,
        c_m3,
        samples: samples.len(),
    })
}

/// Deterministic ring sampling of the annulus, for the bound check.
pub fn annulus_samples(p: &AnsatzParams, count: usize) -> Vec<[f64; 2]> {
    let rings = 16;
    let per_ring = count.div_ceil(rings);
    let mut out = Vec::with_capacity(rings * per_ring);
    for ir in 0..rings {
        // keep strictly inside [R, 2R]
        let s = p.r_cut * (1.0 + (ir as f64 + 0.5) / rings as f64);
        for k in 0..per_ring {
            let t = 2.0 * std::f64::consts::PI * k as f64 / per_ring as f64 + 0.1;
            out.push([p.z0[0] + s * t.cos(), p.z0[1] + s * t.sin()]);
        }
    }
    out
}
