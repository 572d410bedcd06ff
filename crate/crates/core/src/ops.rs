//! Pointwise coefficients of the Heckman–Opdam Laplacian and finite-difference
//! application of the operator and of the Dunkl–Cherednik directional
//! operators.
//!
//! The simulated semigroup is generated by ½𝓛, so the diffusion drift is
//! b(x) = ½ Σ_{α>0} k_α coth(⟨α,x⟩/2) α and the reflection jump intensity is
//! ½ c_α(x) with c_α(x) = k_α |α|² / (4 sinh²(⟨α,x⟩/2)). The finite-difference
//! operators evaluate the *full* 𝓛 and T_ξ (no ½), matching the operator
//! definitions; only the process carries the generator factor.

use crate::error::{Error, Result};
use crate::linalg::{self, dot, Point};
use crate::rootsys::{
    radial_decompose, rho, ChamberDecomposition, MultiplicityFunction, RootSystem, WeylGroup,
};

/// A root system with its Weyl group, multiplicity function, and ρ, bundled
/// because every downstream formula needs all four. Immutable after
/// construction and safe to share across threads.
#[derive(Clone, Debug)]
pub struct Model {
    pub system: RootSystem,
    pub weyl: WeylGroup,
    pub k: MultiplicityFunction,
    pub rho: Point,
}

impl Model {
    pub fn new(system: RootSystem, k: MultiplicityFunction) -> Result<Self> {
        let weyl = WeylGroup::generate(&system)?;
        let rho = rho(&system, &k);
        Ok(Model { system, weyl, k, rho })
    }

    pub fn rank(&self) -> usize {
        self.system.rank
    }

    pub fn n_positive(&self) -> usize {
        self.system.n_positive
    }

    pub fn decompose(&self, x: &[f64]) -> ChamberDecomposition {
        radial_decompose(&self.system, &self.weyl, x)
    }

    fn wall_check(&self, x: &[f64]) -> Result<()> {
        let scale = 1.0 + linalg::norm(x);
        for a in 0..self.system.n_positive {
            let pair = self.system.pairing(a, x);
            if pair.abs() <= 1e-12 * scale {
                return Err(Error::WallInput { root: a, pairing: pair });
            }
        }
        Ok(())
    }

    /// Drift of the ½L-diffusion: ½ Σ_{α>0} k_α coth(⟨α,x⟩/2) α.
    ///
    /// The formula is global and W-equivariant; x may lie in any open chamber
    /// copy, but not on a wall.
    pub fn drift(&self, x: &[f64]) -> Result<Point> {
        self.wall_check(x)?;
        Ok(self.drift_raw(x))
    }

    /// Drift without the wall rejection, for the steppers: trajectories at
    /// k near 1/2 legitimately visit wall distances far below any fixed
    /// rejection threshold, where coth stays finite in f64. Pairings are
    /// clamped away from exact zero so no infinity can propagate.
    pub fn drift_raw(&self, x: &[f64]) -> Point {
        let mut b = linalg::zeros(self.system.rank);
        for a in 0..self.system.n_positive {
            let pair = clamp_zero(self.system.pairing(a, x));
            let coth = 1.0 / (0.5 * pair).tanh();
            let ka = self.k.value(&self.system, a);
            linalg::axpy(&mut b, 0.5 * ka * coth, &self.system.roots[a]);
        }
        b
    }

    /// c_α(x) = k_α |α|² / (4 sinh²(⟨α,x⟩/2)) for a positive root index.
    pub fn c_alpha(&self, a: usize, x: &[f64]) -> Result<f64> {
        let pair = self.system.pairing(a, x);
        let scale = 1.0 + linalg::norm(x);
        if pair.abs() <= 1e-12 * scale {
            return Err(Error::WallInput { root: a, pairing: pair });
        }
        Ok(self.c_alpha_raw(a, x))
    }

    /// c_α without the wall rejection (diverging smoothly as x approaches
    /// the wall); counterpart of [`Model::drift_raw`] for the simulators.
    pub fn c_alpha_raw(&self, a: usize, x: &[f64]) -> f64 {
        let pair = clamp_zero(self.system.pairing(a, x));
        let s = (0.5 * pair).sinh();
        let ka = self.k.value(&self.system, a);
        // sinh² overflows to inf for |pair| ≳ 2840; the rate then underflows
        // to an exact 0, which is the right limit.
        ka * self.system.norm2[a] / (4.0 * s * s)
    }

    /// Jump intensity of the simulated process: ½ c_α(x).
    pub fn jump_rate(&self, a: usize, x: &[f64]) -> Result<f64> {
        Ok(0.5 * self.c_alpha(a, x)?)
    }

    /// Σ_{α>0} ½ c_α(x).
    pub fn total_jump_rate(&self, x: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for a in 0..self.system.n_positive {
            total += self.jump_rate(a, x)?;
        }
        Ok(total)
    }
}

/// Keep a pairing away from exact floating zero (a measure-zero event) so
/// 1/tanh and 1/sinh² stay finite.
fn clamp_zero(pair: f64) -> f64 {
    if pair == 0.0 {
        1e-300
    } else {
        pair
    }
}

/// A deterministic scalar field on the ambient space, with an advisory
/// smoothness hint (number of continuous derivatives the caller vouches for).
pub struct ScalarField<'a> {
    eval: Box<dyn Fn(&[f64]) -> f64 + Sync + 'a>,
    pub smoothness_hint: u32,
}

impl<'a> ScalarField<'a> {
    pub fn new(f: impl Fn(&[f64]) -> f64 + Sync + 'a) -> Self {
        ScalarField { eval: Box::new(f), smoothness_hint: 4 }
    }

    pub fn with_smoothness(mut self, hint: u32) -> Self {
        self.smoothness_hint = hint;
        self
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }
}

/// Central-difference gradient, step h per coordinate.
fn gradient_fd(f: &ScalarField, x: &[f64], h: f64) -> Point {
    let n = x.len();
    let mut g = linalg::zeros(n);
    let mut xp = linalg::point_from(x);
    for i in 0..n {
        xp[i] = x[i] + h;
        let fp = f.eval(&xp);
        xp[i] = x[i] - h;
        let fm = f.eval(&xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

/// Central-difference Laplacian Δf(x).
fn laplacian_fd_raw(f: &ScalarField, x: &[f64], h: f64) -> f64 {
    let n = x.len();
    let fx = f.eval(x);
    let mut acc = 0.0;
    let mut xp = linalg::point_from(x);
    for i in 0..n {
        xp[i] = x[i] + h;
        let fp = f.eval(&xp);
        xp[i] = x[i] - h;
        let fm = f.eval(&xp);
        xp[i] = x[i];
        acc += (fp - 2.0 * fx + fm) / (h * h);
    }
    acc
}

/// Finite-difference 𝓛f(x): Δf + Σ k_α coth(⟨α,x⟩/2) ∂_α f − Σ c_α {f(x) − f(r_α x)}.
///
/// Difference terms use exact reflected points; only the smooth parts are
/// differenced, so the error is O(h²) for C⁴ functions.
pub fn apply_laplacian_fd(m: &Model, f: &ScalarField, x: &[f64], h: f64) -> Result<f64> {
    let radial = apply_radial_laplacian_fd(m, f, x, h)?;
    let fx = f.eval(x);
    let mut jump = 0.0;
    for a in 0..m.system.n_positive {
        let c = m.c_alpha(a, x)?;
        let rx = m.system.reflect_index(a, x);
        jump += c * (fx - f.eval(&rx));
    }
    Ok(radial - jump)
}

/// Finite-difference Lf(x) = Δf + Σ k_α coth(⟨α,x⟩/2) ∂_α f, the W-invariant
/// restriction (no reflection terms).
pub fn apply_radial_laplacian_fd(m: &Model, f: &ScalarField, x: &[f64], h: f64) -> Result<f64> {
    // Reuses the drift accumulation: Σ k coth(⟨α,x⟩/2) α = 2 b(x).
    let b = m.drift(x)?;
    let grad = gradient_fd(f, x, h);
    Ok(laplacian_fd_raw(f, x, h) + 2.0 * dot(&b, &grad))
}

/// Finite-difference Dunkl–Cherednik operator
/// T_ξ f(x) = ∂_ξ f + Σ k_α ⟨α,ξ⟩ (1 − e^{−⟨α,x⟩})⁻¹ {f(x) − f(r_α x)} − ⟨ρ,ξ⟩ f(x).
pub fn apply_cherednik_fd(
    m: &Model,
    xi: &[f64],
    f: &ScalarField,
    x: &[f64],
    h: f64,
) -> Result<f64> {
    m.wall_check(x)?;
    let grad = gradient_fd(f, x, h);
    let fx = f.eval(x);
    let mut acc = dot(&grad, xi) - dot(&m.rho, xi) * fx;
    for a in 0..m.system.n_positive {
        let pair = m.system.pairing(a, x);
        let ka = m.k.value(&m.system, a);
        let coef = ka * dot(&m.system.roots[a], xi) / (1.0 - (-pair).exp());
        let rx = m.system.reflect_index(a, x);
        acc += coef * (fx - f.eval(&rx));
    }
    Ok(acc)
}

/// Σ_i T_{ξ_i}(T_{ξ_i} f)(x) − |ρ|² f(x) over an orthonormal basis ξ_i, by
/// nested finite differences. Converges to 𝓛f(x) at order h².
pub fn cherednik_square_sum_fd(m: &Model, f: &ScalarField, x: &[f64], h: f64) -> Result<f64> {
    let n = m.rank();
    let mut acc = -linalg::norm2(&m.rho) * f.eval(x);
    for i in 0..n {
        let mut xi = linalg::zeros(n);
        xi[i] = 1.0;
        let xi_inner = xi.clone();
        let inner = ScalarField::new(move |y: &[f64]| {
            apply_cherednik_fd(m, &xi_inner, f, y, h).expect("inner Cherednik eval")
        });
        acc += apply_cherednik_fd(m, &xi, &inner, x, h)?;
    }
    Ok(acc)
}
