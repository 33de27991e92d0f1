//! Co-oriented 3D contact sub-Riemannian structures on a coordinate chart.
//!
//! A structure is the kernel distribution `D = ker ω` of a 1-form together
//! with an orthonormal horizontal frame `(F1, F2)` that defines the metric.
//! The form is kept in the normalization where `dω` restricted to `D` equals
//! the metric area form, i.e. `dω(F1, F2) = 1`; [`ContactEvaluator::validate`]
//! gates every structure (built-in or scene-supplied) on that condition, on
//! `ω(Fi) = 0`, and on the contact condition `ω ∧ dω ≠ 0`.

use crate::expr::{ExprError, ExprSet, Order, Program};
use crate::geom::{decompose_against_frame, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

pub const TOL_KERNEL: f64 = 1e-10;
pub const TOL_NORMALIZATION: f64 = 1e-8;
pub const TOL_CONTACT: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum ContactError {
    #[error("unknown builtin structure `{0}`")]
    UnknownBuiltin(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("empty sample list")]
    EmptySamples,
    #[error("horizontal frame is degenerate at ({0}, {1}, {2})")]
    FrameDegenerate(f64, f64, f64),
    #[error("point ({0}, {1}, {2}) outside the chart domain")]
    OutsideDomain(f64, f64, f64),
    #[error("domain error while evaluating structure: {0}")]
    Eval(String),
}

/// Contact structure on a 3D coordinate chart.
#[derive(Debug, Clone)]
pub struct ContactStructure {
    pub name: String,
    pub coords: [String; 3],
    /// ω = Σ ω_i dx_i, three roots.
    pub omega: ExprSet,
    /// F1 then F2, six roots.
    pub frame: ExprSet,
    /// Open lower bounds per coordinate (e.g. r > 0 in the cylindrical chart,
    /// which excludes the axis; surface charts covering the axis handle the
    /// limit in their own parameter domain).
    pub lower_bounds: [Option<f64>; 3],
    /// Box used for random validation sampling.
    pub sample_box: [[f64; 2]; 3],
    /// Whether chart coordinates carry the Euclidean structure (true for the
    /// Heisenberg chart). Controls 3D rendering and bump displacement
    /// semantics.
    pub cartesian: bool,
}

impl ContactStructure {
    pub fn builtin(name: &str) -> Result<ContactStructure, ContactError> {
        match name {
            "heisenberg" => Ok(ContactStructure {
                name: name.into(),
                coords: ["x".into(), "y".into(), "z".into()],
                omega: ExprSet::parse_all(&["-y/2", "x/2", "1"])?,
                frame: ExprSet::parse_all(&["1", "0", "y/2", "0", "1", "-x/2"])?,
                lower_bounds: [None, None, None],
                sample_box: [[-2.0, 2.0], [-2.0, 2.0], [-2.0, 2.0]],
                cartesian: true,
            }),
            // Cylindrical-chart structure containing the overtwisted disk.
            // The frame spans ker(cos r dz + r sin r dθ); the form is scaled
            // by r/(r + sin r cos r) so that dω(F1,F2) = 1, which leaves it
            // untouched at r = π/2 and r = π.
            "overtwisted_cyl" => Ok(ContactStructure {
                name: name.into(),
                coords: ["r".into(), "th".into(), "z".into()],
                omega: ExprSet::parse_all(&[
                    "0",
                    "r^2*sin(r)/(r + sin(r)*cos(r))",
                    "r*cos(r)/(r + sin(r)*cos(r))",
                ])?,
                frame: ExprSet::parse_all(&["1", "0", "0", "0", "cos(r)/r", "-sin(r)"])?,
                lower_bounds: [Some(0.0), None, None],
                sample_box: [
                    [0.1, 3.0 * std::f64::consts::PI],
                    [0.0, 2.0 * std::f64::consts::PI],
                    [-3.0, 3.0],
                ],
                cartesian: false,
            }),
            other => Err(ContactError::UnknownBuiltin(other.into())),
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn custom(
        name: String,
        coords: [String; 3],
        omega_src: [&str; 3],
        frame1_src: [&str; 3],
        frame2_src: [&str; 3],
        sample_box: Option<[[f64; 2]; 3]>,
        cartesian: bool,
    ) -> Result<ContactStructure, ContactError> {
        let omega = ExprSet::parse_all(&omega_src)?;
        let frame = ExprSet::parse_all(&[
            frame1_src[0],
            frame1_src[1],
            frame1_src[2],
            frame2_src[0],
            frame2_src[1],
            frame2_src[2],
        ])?;
        Ok(ContactStructure {
            name,
            coords,
            omega,
            frame,
            lower_bounds: [None, None, None],
            sample_box: sample_box.unwrap_or([[-2.0, 2.0], [-2.0, 2.0], [-2.0, 2.0]]),
            cartesian,
        })
    }

    pub fn in_domain(&self, p: Vec3) -> bool {
        let a = p.to_array();
        for k in 0..3 {
            if let Some(lo) = self.lower_bounds[k] {
                if a[k] <= lo {
                    return false;
                }
            }
        }
        true
    }

    /// Compile the per-worker evaluator; `params` are scene parameters
    /// referenced by custom structure expressions.
    pub fn evaluator(&self, params: &[(&str, f64)]) -> Result<ContactEvaluator, ContactError> {
        let coord_names: Vec<&str> = self.coords.iter().map(|s| s.as_str()).collect();
        let omega = Program::compile(&self.omega, &coord_names, params)?;
        let frame = Program::compile(&self.frame, &coord_names, params)?;
        Ok(ContactEvaluator {
            structure: self.clone(),
            omega,
            frame,
        })
    }
}

/// Compiled evaluator; owns scratch space, cheap to clone per worker.
#[derive(Debug, Clone)]
pub struct ContactEvaluator {
    pub structure: ContactStructure,
    omega: Program,
    frame: Program,
}

/// Jet of the contact form at a point: coefficients plus their first
/// derivatives in chart coordinates.
#[derive(Debug, Clone, Copy)]
pub struct OmegaJet {
    pub w: [f64; 3],
    /// dw[i][k] = ∂ω_i/∂x_k
    pub dw: [[f64; 3]; 3],
}

impl OmegaJet {
    /// dω coefficients: B[k][l] = ∂_k ω_l − ∂_l ω_k.
    pub fn curl(&self) -> [[f64; 3]; 3] {
        let mut b = [[0.0; 3]; 3];
        for k in 0..3 {
            for l in 0..3 {
                b[k][l] = self.dw[l][k] - self.dw[k][l];
            }
        }
        b
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub samples: usize,
    pub max_omega_frame: f64,
    pub min_contact_coeff: f64,
    pub max_normalization_err: f64,
    pub kernel_ok: bool,
    pub contact_ok: bool,
    pub normalization_ok: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.kernel_ok && self.contact_ok && self.normalization_ok
    }
}

impl ContactEvaluator {
    fn err(e: crate::expr::EvalError) -> ContactError {
        ContactError::Eval(e.to_string())
    }

    /// Coefficients (ω_1, ω_2, ω_3) at `p`.
    pub fn omega_at(&mut self, p: Vec3) -> Result<[f64; 3], ContactError> {
        let slab = self
            .omega
            .eval(&p.to_array(), Order::Value)
            .map_err(Self::err)?;
        Ok([slab.value(0), slab.value(1), slab.value(2)])
    }

    pub fn omega_jet(&mut self, p: Vec3) -> Result<OmegaJet, ContactError> {
        let slab = self
            .omega
            .eval(&p.to_array(), Order::Grad)
            .map_err(Self::err)?;
        let mut w = [0.0; 3];
        let mut dw = [[0.0; 3]; 3];
        for i in 0..3 {
            w[i] = slab.value(i);
            for k in 0..3 {
                dw[i][k] = slab.grad(i, k);
            }
        }
        Ok(OmegaJet { w, dw })
    }

    pub fn frame_at(&mut self, p: Vec3) -> Result<(Vec3, Vec3), ContactError> {
        let slab = self
            .frame
            .eval(&p.to_array(), Order::Value)
            .map_err(Self::err)?;
        Ok((
            Vec3::new(slab.value(0), slab.value(1), slab.value(2)),
            Vec3::new(slab.value(3), slab.value(4), slab.value(5)),
        ))
    }

    /// dω(F1, F2) at `p`; equals 1 for a normalized structure.
    pub fn d_omega_pair(&mut self, p: Vec3) -> Result<f64, ContactError> {
        let jet = self.omega_jet(p)?;
        let (f1, f2) = self.frame_at(p)?;
        Ok(eval_two_form(&jet.curl(), f1, f2))
    }

    /// Coefficient of ω ∧ dω against dx1∧dx2∧dx3; nonvanishing is the
    /// contact condition.
    pub fn contact_coeff(&mut self, p: Vec3) -> Result<f64, ContactError> {
        let jet = self.omega_jet(p)?;
        let b = jet.curl();
        Ok(jet.w[0] * b[1][2] - jet.w[1] * b[0][2] + jet.w[2] * b[0][1])
    }

    /// Decompose a tangent vector against the horizontal frame: returns the
    /// metric length sqrt(c1² + c2²) of the horizontal part and the norm of
    /// the non-horizontal residual. A residual near zero certifies that the
    /// direction is admissible.
    pub fn horizontal_length(&mut self, p: Vec3, v: Vec3) -> Result<(f64, f64), ContactError> {
        let (f1, f2) = self.frame_at(p)?;
        let (c1, c2, res) = decompose_against_frame(v, f1, f2)
            .ok_or(ContactError::FrameDegenerate(p.x, p.y, p.z))?;
        Ok(((c1 * c1 + c2 * c2).sqrt(), res))
    }

    /// Validate kernel, contact, and normalization conditions on explicit
    /// sample points.
    pub fn validate_at(&mut self, samples: &[Vec3]) -> Result<ValidationReport, ContactError> {
        if samples.is_empty() {
            return Err(ContactError::EmptySamples);
        }
        let mut max_kernel = 0.0f64;
        let mut min_contact = f64::INFINITY;
        let mut max_norm = 0.0f64;
        for &p in samples {
            let jet = self.omega_jet(p)?;
            let (f1, f2) = self.frame_at(p)?;
            let w = Vec3::from_array(jet.w);
            max_kernel = max_kernel.max(w.dot(f1).abs()).max(w.dot(f2).abs());
            let b = jet.curl();
            max_norm = max_norm.max((eval_two_form(&b, f1, f2) - 1.0).abs());
            let c = jet.w[0] * b[1][2] - jet.w[1] * b[0][2] + jet.w[2] * b[0][1];
            min_contact = min_contact.min(c.abs());
        }
        Ok(ValidationReport {
            samples: samples.len(),
            max_omega_frame: max_kernel,
            min_contact_coeff: min_contact,
            max_normalization_err: max_norm,
            kernel_ok: max_kernel < TOL_KERNEL,
            contact_ok: min_contact > TOL_CONTACT,
            normalization_ok: max_norm < TOL_NORMALIZATION,
        })
    }

    /// Validate on `n` random points drawn from the structure's sample box.
    pub fn validate(&mut self, n: usize, seed: u64) -> Result<ValidationReport, ContactError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = self.structure.sample_box;
        let samples: Vec<Vec3> = (0..n)
            .map(|_| {
                Vec3::new(
                    rng.gen_range(b[0][0]..b[0][1]),
                    rng.gen_range(b[1][0]..b[1][1]),
                    rng.gen_range(b[2][0]..b[2][1]),
                )
            })
            .collect();
        self.validate_at(&samples)
    }
}

fn eval_two_form(b: &[[f64; 3]; 3], u: Vec3, v: Vec3) -> f64 {
    let u = u.to_array();
    let v = v.to_array();
    let mut s = 0.0;
    for k in 0..3 {
        for l in (k + 1)..3 {
            s += b[k][l] * (u[k] * v[l] - u[l] * v[k]);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn heis() -> ContactEvaluator {
        ContactStructure::builtin("heisenberg")
            .unwrap()
            .evaluator(&[])
            .unwrap()
    }

    fn ot() -> ContactEvaluator {
        ContactStructure::builtin("overtwisted_cyl")
            .unwrap()
            .evaluator(&[])
            .unwrap()
    }

    #[test]
    fn heisenberg_form_values() {
        let mut cs = heis();
        assert_eq!(
            cs.omega_at(Vec3::new(0.0, 0.0, 0.0)).unwrap(),
            [0.0, 0.0, 1.0]
        );
        assert_eq!(
            cs.omega_at(Vec3::new(1.0, 2.0, 3.0)).unwrap(),
            [-1.0, 0.5, 1.0]
        );
        for z in [-5.0, 0.0, 17.5] {
            assert_eq!(
                cs.omega_at(Vec3::new(0.0, 0.0, z)).unwrap(),
                [0.0, 0.0, 1.0]
            );
        }
    }

    #[test]
    fn overtwisted_form_values() {
        let mut cs = ot();
        // at r = π/2 the scaling factor is exactly 1: ω = (0, π/2, 0)
        let w = cs.omega_at(Vec3::new(PI / 2.0, 0.0, 0.0)).unwrap();
        assert!((w[0]).abs() < 1e-15);
        assert!((w[1] - PI / 2.0).abs() < 1e-12);
        assert!(w[2].abs() < 1e-12);
        // kernel condition at r = π and at random points
        for r in [PI, 0.3, 1.7, 5.9] {
            let p = Vec3::new(r, 1.0, 0.5);
            let w = Vec3::from_array(cs.omega_at(p).unwrap());
            let (f1, f2) = cs.frame_at(p).unwrap();
            assert!(w.dot(f1).abs() < 1e-12, "omega(F1) at r={r}");
            assert!(w.dot(f2).abs() < 1e-12, "omega(F2) at r={r}");
        }
    }

    #[test]
    fn heisenberg_validates() {
        let mut cs = heis();
        let rep = cs.validate(1000, 42).unwrap();
        assert!(rep.passed(), "{rep:?}");
        // dω = dx∧dy exactly: coefficient of ω∧dω is 1 everywhere
        assert!((rep.min_contact_coeff - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overtwisted_validates_and_matches_closed_form() {
        let mut cs = ot();
        let rep = cs.validate(1000, 7).unwrap();
        assert!(rep.passed(), "{rep:?}");
        // closed form: coefficient of ω∧dω is r²/(r + sin r cos r)
        for r in [0.2, 1.0, PI, 7.0] {
            let c = cs.contact_coeff(Vec3::new(r, 0.7, -1.0)).unwrap();
            let oracle = r * r / (r + r.sin() * r.cos());
            assert!(
                (c - oracle).abs() < 1e-10 * oracle.abs().max(1.0),
                "r={r}: {c} vs {oracle}"
            );
        }
    }

    #[test]
    fn integrable_form_fails_validation() {
        // ω = dz with flat frame: dω = 0, so both the contact condition and
        // the normalization fail.
        let cs = ContactStructure::custom(
            "integrable".into(),
            ["x".into(), "y".into(), "z".into()],
            ["0", "0", "1"],
            ["1", "0", "0"],
            ["0", "1", "0"],
            None,
            true,
        )
        .unwrap();
        let mut ev = cs.evaluator(&[]).unwrap();
        let rep = ev.validate(200, 3).unwrap();
        assert!(rep.kernel_ok);
        assert!(!rep.contact_ok);
        assert!(!rep.normalization_ok);
        assert_eq!(rep.min_contact_coeff, 0.0);
    }

    #[test]
    fn horizontal_length_examples() {
        let mut cs = heis();
        let o = Vec3::new(0.0, 0.0, 0.0);
        let (len, res) = cs.horizontal_length(o, Vec3::new(1.0, 0.0, 0.0)).unwrap();
        assert!((len - 1.0).abs() < 1e-14 && res < 1e-14);

        // 3 F1 + 4 F2 has length 5 anywhere by orthonormality
        let p = Vec3::new(0.4, -1.1, 2.0);
        let (f1, f2) = cs.frame_at(p).unwrap();
        let v = f1.scale(3.0).add(f2.scale(4.0));
        let (len, res) = cs.horizontal_length(p, v).unwrap();
        assert!((len - 5.0).abs() < 1e-12 && res < 1e-12);

        // vertical direction at the origin: residual 1, length 0
        let (len, res) = cs.horizontal_length(o, Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert!(len.abs() < 1e-14);
        assert!((res - 1.0).abs() < 1e-14);
    }

    #[test]
    fn horizontal_length_homogeneous() {
        let mut cs = heis();
        let p = Vec3::new(0.3, 0.9, -0.4);
        let v = Vec3::new(0.8, -0.2, 0.5);
        let (len1, _) = cs.horizontal_length(p, v).unwrap();
        for lam in [-3.0, 0.5, 7.25] {
            let (len, _) = cs.horizontal_length(p, v.scale(lam)).unwrap();
            assert!((len - lam.abs() * len1).abs() < 1e-12 * len1.max(1.0));
        }
    }

    #[test]
    fn frame_degenerate_near_axis() {
        let mut cs = ot();
        let p = Vec3::new(1e-13, 0.0, 0.0);
        assert!(matches!(
            cs.horizontal_length(p, Vec3::new(0.0, 1.0, 0.0)),
            Err(ContactError::FrameDegenerate(..))
        ));
    }

    #[test]
    fn kernel_identity_many_points() {
        for name in ["heisenberg", "overtwisted_cyl"] {
            let mut cs = ContactStructure::builtin(name)
                .unwrap()
                .evaluator(&[])
                .unwrap();
            let rep = cs.validate(10_000, 99).unwrap();
            assert!(rep.max_omega_frame < 1e-10, "{name}: {rep:?}");
            assert!(rep.max_normalization_err < 1e-8, "{name}: {rep:?}");
        }
    }

    #[test]
    fn empty_sample_list_rejected() {
        let mut cs = heis();
        assert!(matches!(
            cs.validate_at(&[]),
            Err(ContactError::EmptySamples)
        ));
    }
}
