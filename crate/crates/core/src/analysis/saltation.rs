//! Largest Lyapunov exponent of the continuous PWL flow via tangent dynamics
//! with saltation matrices.
//!
//! The reference orbit is the same fixed-step RK4 orbit used everywhere else.
//! A tangent vector is carried along it:
//!
//! - between events it evolves under the Jacobian of the active piece (or of
//!   the Filippov sliding field while the orbit is confined to an attracting
//!   plane);
//! - when the orbit crosses a switching surface `n . x = d` it is multiplied
//!   by the saltation matrix `S = I + (F_arr - F_dep) n^T / (n . F_dep)`;
//! - when the orbit enters sliding on a plane, the same formula with
//!   `F_arr` the sliding field removes the normal component.
//!
//! Unlike a two-orbit estimate, this does not depend on a separation scale,
//! which matters here: at separations below the per-step displacement the two
//! RK4 orbits share every dispatch decision and the switching never shows up.

use crate::error::{Error, Result};
use crate::integrator::{check_bound, rk4_step, IntegrationConfig};
use crate::linalg::{Mat3, Vec3};
use crate::pwl::{Clause, PwlSystem};

/// A switching surface `normal . x = offset` with unit normal.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Surface {
    normal: Vec3,
    offset: f64,
}

impl Surface {
    fn new(normal: Vec3, offset: f64) -> Self {
        let len = normal.norm();
        Surface {
            normal: normal.scale(1.0 / len),
            offset: offset / len,
        }
    }

    fn residual(&self, x: &Vec3) -> f64 {
        self.normal.dot(x) - self.offset
    }

    fn project(&self, x: &Vec3) -> Vec3 {
        *x - self.normal.scale(self.residual(x))
    }

    fn same_as(&self, other: &Surface) -> bool {
        let tol = 1e-12;
        ((self.normal - other.normal).norm() < tol && (self.offset - other.offset).abs() < tol)
            || ((self.normal + other.normal).norm() < tol
                && (self.offset + other.offset).abs() < tol)
    }
}

/// Every distinct surface any guard refers to.
fn surfaces_of(sys: &PwlSystem) -> Vec<Surface> {
    let mut out: Vec<Surface> = Vec::new();
    let mut add = |s: Surface| {
        if !out.iter().any(|o| o.same_as(&s)) {
            out.push(s);
        }
    };
    for piece in sys.pieces() {
        for clause in &piece.guard.clauses {
            match *clause {
                Clause::Plane { plane, .. } => {
                    let p = &sys.planes()[plane];
                    add(Surface::new(p.normal(), p.offset()));
                }
                Clause::Coord { axis, value, .. } => {
                    let mut e = [0.0; 3];
                    e[axis] = 1.0;
                    add(Surface::new(Vec3::from(e), value));
                }
            }
        }
    }
    out
}

/// Affine field `A x + b` of one piece.
#[derive(Clone, Copy, Debug)]
struct Affine {
    a: Mat3,
    b: Vec3,
}

impl Affine {
    fn eval(&self, x: &Vec3) -> Vec3 {
        self.a.mul_vec(x) + self.b
    }
}

struct Flow<'a> {
    sys: &'a PwlSystem,
    surfaces: Vec<Surface>,
}

const NUDGE: f64 = 1e-9;

impl<'a> Flow<'a> {
    /// Piece governing the point `x` displaced by `NUDGE` along each
    /// `(unit normal, sign)` pair.
    fn piece_near(&self, x: &Vec3, nudges: &[(Vec3, f64)]) -> Result<Affine> {
        let eps = NUDGE * (1.0 + x.max_abs());
        let mut y = *x;
        for (n, s) in nudges {
            y += n.scale(s * eps);
        }
        let idx = self
            .sys
            .piece_index_at(&y)
            .ok_or(Error::NoMatchingRegion { point: y })?;
        let p = &self.sys.pieces()[idx];
        Ok(Affine {
            a: p.a_matrix,
            b: p.b_vector,
        })
    }

    /// Sides of `sigma` at `p` (which lies on `sigma`), with extra nudges.
    fn sides(&self, sigma: &Surface, p: &Vec3, extra: &[(Vec3, f64)]) -> Result<(Affine, Affine)> {
        let mut nudges = extra.to_vec();
        nudges.push((sigma.normal, -1.0));
        let below = self.piece_near(p, &nudges)?;
        *nudges.last_mut().unwrap() = (sigma.normal, 1.0);
        let above = self.piece_near(p, &nudges)?;
        Ok((below, above))
    }

    /// Filippov sliding field on `sigma` at `p`, with its Jacobian, if the
    /// plane attracts from both sides there.
    fn sliding(
        &self,
        sigma: &Surface,
        p: &Vec3,
        extra: &[(Vec3, f64)],
    ) -> Result<Option<(Vec3, Mat3)>> {
        let (lo, hi) = self.sides(sigma, p, extra)?;
        let n = sigma.normal;
        let (f_lo, f_hi) = (lo.eval(p), hi.eval(p));
        let a = n.dot(&f_lo);
        let c = n.dot(&f_hi);
        if !(a > 0.0 && c < 0.0) {
            return Ok(None);
        }
        let b = a - c;
        let alpha = a / b;
        let jump = f_hi - f_lo;
        let field = f_lo + jump.scale(alpha);
        let g_lo = lo.a.transpose().mul_vec(&n);
        let g_hi = hi.a.transpose().mul_vec(&n);
        let grad_alpha = (g_lo.scale(b) - (g_lo - g_hi).scale(a)).scale(1.0 / (b * b));
        let jac = lo.a + alpha * (hi.a - lo.a) + Mat3::outer(&jump, &grad_alpha);
        Ok(Some((field, jac)))
    }

    /// Surface the orbit is sliding on at `x`, if any: `x` lies within one
    /// step's normal travel of an attracting plane.
    fn sliding_surface(&self, x: &Vec3, h: f64) -> Result<Option<usize>> {
        for (i, s) in self.surfaces.iter().enumerate() {
            let r = s.residual(x);
            let p = s.project(x);
            let (lo, hi) = self.sides(s, &p, &[])?;
            let speed = s
                .normal
                .dot(&lo.eval(&p))
                .abs()
                .max(s.normal.dot(&hi.eval(&p)).abs());
            if r.abs() <= h * speed && self.sliding(s, &p, &[])?.is_some() {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// Effective field at `p` on the given side of `tau`, accounting for
    /// sliding on `sigma`.
    fn effective_field(
        &self,
        p: &Vec3,
        tau: &Surface,
        side: f64,
        sigma: Option<&Surface>,
    ) -> Result<Vec3> {
        let nudge = [(tau.normal, side)];
        if let Some(sigma) = sigma {
            let q = sigma.project(p);
            if let Some((f, _)) = self.sliding(sigma, &q, &nudge)? {
                return Ok(f);
            }
        }
        Ok(self.piece_near(p, &nudge)?.eval(p))
    }
}

fn saltation(delta: Vec3, f_dep: Vec3, f_arr: Vec3, n: &Vec3) -> Vec3 {
    let denom = n.dot(&f_dep);
    if denom == 0.0 {
        return delta;
    }
    delta + (f_arr - f_dep).scale(n.dot(&delta) / denom)
}

/// RK4 step of the linear tangent flow `d' = J d`.
fn rk4_linear(j: &Mat3, d: &Vec3, h: f64) -> Vec3 {
    let k1 = j.mul_vec(d);
    let k2 = j.mul_vec(&(*d + k1.scale(0.5 * h)));
    let k3 = j.mul_vec(&(*d + k2.scale(0.5 * h)));
    let k4 = j.mul_vec(&(*d + k3.scale(h)));
    *d + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0)
}

/// LLE of the flow (nats per unit time) over `cfg.duration` after discarding
/// `transient` time units.
pub fn lle_saltation(sys: &PwlSystem, cfg: &IntegrationConfig, transient: f64) -> Result<f64> {
    cfg.validate()?;
    if !(transient >= 0.0) {
        return Err(Error::InvalidConfig("transient must be nonnegative".into()));
    }
    let flow = Flow {
        sys,
        surfaces: surfaces_of(sys),
    };
    let h = cfg.step;
    let bound = cfg.divergence_bound;
    let mut x = cfg.initial_state;
    let transient_steps = (transient / h).round() as usize;
    for i in 1..=transient_steps {
        x = rk4_step(sys, &x, h)?;
        check_bound(&x, i as f64 * h, bound)?;
    }

    let mut sliding = flow.sliding_surface(&x, h)?;
    let mut delta = Vec3::new(1.0, 1.0, 1.0).scale(1.0 / 3f64.sqrt());
    if let Some(s) = sliding {
        let n = flow.surfaces[s].normal;
        delta = delta - n.scale(n.dot(&delta));
        delta = delta.scale(1.0 / delta.norm());
    }

    let steps = cfg.steps();
    let mut log_sum = 0.0;
    for i in 1..=steps {
        let x_next = rk4_step(sys, &x, h)?;
        check_bound(&x_next, (transient_steps + i) as f64 * h, bound)?;

        // Smooth part of the step.
        let jac = match sliding {
            Some(s) => {
                let sigma = &flow.surfaces[s];
                match flow.sliding(sigma, &sigma.project(&x), &[])? {
                    Some((_, j)) => j,
                    None => flow.piece_near(&x, &[])?.a,
                }
            }
            None => flow.piece_near(&x, &[])?.a,
        };
        delta = rk4_linear(&jac, &delta, h);
        if let Some(s) = sliding {
            let n = flow.surfaces[s].normal;
            delta = delta - n.scale(n.dot(&delta));
        }

        let next_sliding = flow.sliding_surface(&x_next, h)?;

        // Transversal crossings, in order along the step.
        let mut crossings: Vec<(f64, usize)> = flow
            .surfaces
            .iter()
            .enumerate()
            .filter(|&(k, _)| Some(k) != sliding && Some(k) != next_sliding)
            .filter_map(|(k, s)| {
                let (r0, r1) = (s.residual(&x), s.residual(&x_next));
                ((r0 < 0.0) != (r1 < 0.0) && r0 != r1).then(|| (r0 / (r0 - r1), k))
            })
            .collect();
        crossings.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (frac, k) in crossings {
            let tau = flow.surfaces[k];
            let xc = x + (x_next - x).scale(frac);
            let dep_side = if tau.residual(&x) < 0.0 { -1.0 } else { 1.0 };
            let sigma = sliding.map(|s| &flow.surfaces[s]);
            let f_dep = flow.effective_field(&xc, &tau, dep_side, sigma)?;
            let sigma_after = next_sliding.map(|s| &flow.surfaces[s]);
            let f_arr = flow.effective_field(&xc, &tau, -dep_side, sigma_after)?;
            delta = saltation(delta, f_dep, f_arr, &tau.normal);
        }

        // Entering a sliding mode.
        if let Some(s) = next_sliding {
            if sliding != Some(s) {
                let sigma = flow.surfaces[s];
                let p = sigma.project(&x_next);
                let approach = if sigma.residual(&x) < 0.0 { -1.0 } else { 1.0 };
                let f_off = flow.piece_near(&p, &[(sigma.normal, approach)])?.eval(&p);
                if let Some((f_s, _)) = flow.sliding(&sigma, &p, &[])? {
                    delta = saltation(delta, f_off, f_s, &sigma.normal);
                }
                let n = sigma.normal;
                delta = delta - n.scale(n.dot(&delta));
            }
        }
        sliding = next_sliding;
        x = x_next;

        let d = delta.norm();
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidConfig(
                "tangent vector collapsed; the orbit may be stuck on a surface intersection".into(),
            ));
        }
        log_sum += d.ln();
        delta = delta.scale(1.0 / d);
    }
    Ok(log_sum / (steps as f64 * h))
}
