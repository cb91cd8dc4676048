//! The `alpha`-approximate spectral norm
//! `||f||_{1,alpha} = min { ||p||_1 : |p(x) - f(x)| <= alpha for all x }`.
//!
//! Writing `p^(S) = c+_S - c-_S` gives the linear program
//!
//! ```text
//! minimize  sum_S (c+_S + c-_S)
//! subject to f(x) - alpha <= sum_S (c+_S - c-_S) chi_S(x) <= f(x) + alpha,  c+, c- >= 0
//! ```
//!
//! We hand its dual to the simplex solver because the dual has a feasible
//! origin; the optimal witness is read back from the dual's shadow prices.

pub mod simplex;

use crate::error::{Error, Result};
use crate::f2::check_dim;
use crate::fourier::{chi, BooleanFunction, RealFunction};

/// Largest dimension accepted by [`approx_spectral_norm`].
pub const MAX_LP_DIM: usize = 6;

/// Slack used when checking pointwise approximation.
pub const APPROX_TOL: f64 = 1e-9;

// Coefficients below this are solver noise and are dropped from witnesses.
const COEFF_EPS: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct ApproxNormResult {
    /// `||f||_{1,alpha}`.
    pub value: f64,
    /// An optimal approximating function.
    pub witness: RealFunction,
    pub alpha: f64,
}

impl ApproxNormResult {
    /// `ceil(||f||_{1,alpha})`, see [`norm_ceiling`].
    pub fn ceiling(&self) -> u64 {
        norm_ceiling(self.value)
    }
}

/// Ceiling of an LP value that may carry solver noise around integers.
/// Never below 1.
pub fn norm_ceiling(value: f64) -> u64 {
    ((value - APPROX_TOL).ceil().max(1.0)) as u64
}

pub fn approx_spectral_norm(f: &BooleanFunction, alpha: f64) -> Result<ApproxNormResult> {
    let n = f.n();
    check_dim("approximate spectral norm", n, MAX_LP_DIM)?;
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "alpha = {alpha} outside [0, 1)"
        )));
    }
    let size = 1usize << n;

    // Dual variables: z_x (lower bounds) then y_x (upper bounds).
    // Rows: S+ then S-, bounding |sum_x chi_S(x)(z_x - y_x)| by 1.
    let mut a = Vec::with_capacity(2 * size);
    for sign in [1.0, -1.0] {
        for s in 0..size as u32 {
            let mut row = vec![0.0; 2 * size];
            for x in 0..size {
                let c = sign * chi(s, x as u32) as f64;
                row[x] = c;
                row[size + x] = -c;
            }
            a.push(row);
        }
    }
    let mut c = vec![0.0; 2 * size];
    for x in 0..size {
        let fx = f.value(x as u32) as f64;
        c[x] = fx - alpha;
        c[size + x] = -fx - alpha;
    }
    let lp = simplex::StandardLp {
        a,
        b: vec![1.0; 2 * size],
        c,
    };
    let sol = simplex::maximize(&lp)?;

    let coeffs = (0..size).filter_map(|s| {
        let v = sol.dual[s] - sol.dual[size + s];
        (v.abs() > COEFF_EPS).then_some((s as u32, v))
    });
    let witness = RealFunction::new(n, coeffs)?;
    if !verify_approximation(&witness, f, alpha) {
        return Err(Error::Solver(format!(
            "witness violates the approximation bound (max error {})",
            max_deviation(&witness, f)
        )));
    }
    Ok(ApproxNormResult {
        value: sol.objective,
        witness,
        alpha,
    })
}

/// `max_x |p(x) - f(x)|`.
pub fn max_deviation(p: &RealFunction, f: &BooleanFunction) -> f64 {
    p.evaluate_all()
        .iter()
        .zip(f.table())
        .map(|(pv, &fv)| (pv - fv as f64).abs())
        .fold(0.0, f64::max)
}

/// Whether `p` approximates `f` to within `alpha` at every point.
pub fn verify_approximation(p: &RealFunction, f: &BooleanFunction, alpha: f64) -> bool {
    p.n() == f.n() && max_deviation(p, f) <= alpha + APPROX_TOL
}
