//! Rigid-link ribbon with bend/twist springs at the joints.
//!
//! Half of the assembled clip is modelled: the arm runs from the core centre
//! (origin, clamped through an elastic root joint) to the pinned apex, which
//! must land on the mirror plane `x = 0`. Link frames are `(d1, d2, d3)`
//! with `d3` the tangent, `d2` the sheet normal and `d1` the in-plane width
//! direction. The state is the relative rotation vector of every joint,
//! expressed in the frame of the link it drives.
//!
//! Internally lengths are scaled by the span `l` and energies by `EI_η/l`.

use std::io::{self, Write};

use nalgebra::{Matrix3, Rotation3, Vector3};

use crate::error::{HcmError, Result};
use crate::model::{derive_lengths, section_properties, Material, RibbonGeometry, TorsionMode};

use super::lbfgs::{minimize, LbfgsOptions};

pub const MIN_LINKS: usize = 20;

/// Penalty stiffnesses of the continuation, in units of `EI_η/l³`.
pub const PENALTY_STAGES: [f64; 5] = [1e3, 1e4, 1e5, 1e6, 1e7];

/// Out-of-plane seed displacement at mid-span, in units of `l`.
const SEED_AMPLITUDE: f64 = 1e-3;

/// Mid-span deflections below this (in units of `l`) count as flat.
const FLAT_TOLERANCE: f64 = 1e-6;

const GTOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct DiscreteRibbon {
    n_links: usize,
    span: f64,
    ei_eta: f64,
    /// Link lengths, m. Each arm is split evenly so the kink sits exactly
    /// at `L1`.
    lengths: Vec<f64>,
    k_bend_out: Vec<f64>,
    k_bend_in: Vec<f64>,
    k_twist: Vec<f64>,
    rest_kink_index: usize,
    rest_kink_angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

/// A joint-rotation state together with its node positions (m) and frames.
#[derive(Debug, Clone)]
pub struct RibbonConfig {
    pub omega: Vec<f64>,
    pub nodes: Vec<Vector3<f64>>,
    pub frames: Vec<Matrix3<f64>>,
}

impl RibbonConfig {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "node_index,x_m,y_m,z_m")?;
        for (i, p) in self.nodes.iter().enumerate() {
            writeln!(w, "{},{},{},{}", i, p.x, p.y, p.z)?;
        }
        Ok(())
    }

    /// Signed angle of the last link's tangent out of the blank plane.
    pub fn psi_tip(&self) -> f64 {
        let e3 = self.frames[self.frames.len() - 1].column(2).into_owned();
        e3.z.clamp(-1.0, 1.0).asin()
    }

    /// Distance between the apex and its mirror image.
    pub fn gap(&self) -> f64 {
        2.0 * self.nodes[self.nodes.len() - 1].x.abs()
    }

    /// Reflection through the blank plane.
    pub fn mirrored(&self, ribbon: &DiscreteRibbon) -> RibbonConfig {
        let omega: Vec<f64> = self
            .omega
            .chunks(3)
            .flat_map(|w| [-w[0], w[1], -w[2]])
            .collect();
        ribbon.config(&omega)
    }
}

#[derive(Debug, Clone)]
pub struct Equilibrium {
    pub config: RibbonConfig,
    /// Spring energy, J (penalty terms excluded).
    pub energy: f64,
    pub psi_tip: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after each accepted step of the final continuation stage.
    pub history: Vec<f64>,
}

pub fn build_discrete(geom: &RibbonGeometry, mat: &Material, n_links: usize) -> Result<DiscreteRibbon> {
    build_discrete_with(geom, mat, n_links, TorsionMode::default())
}

pub fn build_discrete_with(
    geom: &RibbonGeometry,
    mat: &Material,
    n_links: usize,
    torsion: TorsionMode,
) -> Result<DiscreteRibbon> {
    if n_links < MIN_LINKS {
        return Err(HcmError::TooCoarse { n_links });
    }
    geom.validate()?;
    mat.validate()?;
    let arms = derive_lengths(geom);
    let sec = section_properties(geom, mat, torsion);
    let kink = ((n_links as f64 * geom.l1() / arms.l).round() as usize).clamp(1, n_links - 1);
    let lengths: Vec<f64> = (0..n_links)
        .map(|j| if j < kink { geom.l1() / kink as f64 } else { arms.l2 / (n_links - kink) as f64 })
        .collect();
    let per = |stiff: f64| lengths.iter().map(|ds| stiff / ds).collect::<Vec<f64>>();
    Ok(DiscreteRibbon {
        n_links,
        span: arms.l,
        ei_eta: sec.ei_eta(mat),
        k_bend_out: per(sec.ei_eta(mat)),
        k_bend_in: per(sec.ei_in(mat)),
        k_twist: per(sec.gj()),
        lengths,
        rest_kink_index: kink,
        rest_kink_angle: -(std::f64::consts::FRAC_PI_2 - geom.theta()),
    })
}

fn hat(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

fn exp_so3(w: &Vector3<f64>) -> Matrix3<f64> {
    Rotation3::new(*w).into_inner()
}

/// Right Jacobian of the exponential map.
fn right_jacobian(w: &Vector3<f64>) -> Matrix3<f64> {
    let th = w.norm();
    let wh = hat(w);
    let w2 = wh * wh;
    let (a, b) = if th < 1e-6 {
        (0.5 - th * th / 24.0, 1.0 / 6.0 - th * th / 120.0)
    } else {
        ((1.0 - th.cos()) / (th * th), (th - th.sin()) / (th * th * th))
    };
    Matrix3::identity() - a * wh + b * w2
}

fn clamp_frame() -> Matrix3<f64> {
    // columns d1 = y, d2 = z, d3 = x
    Matrix3::new(0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0)
}

struct Penalty {
    gap: f64,
    psi: Option<f64>,
}

impl DiscreteRibbon {
    pub fn n_links(&self) -> usize {
        self.n_links
    }

    pub fn link_lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn rest_length(&self) -> f64 {
        self.lengths.iter().sum()
    }

    /// One root joint plus one between every pair of links.
    pub fn n_joints(&self) -> usize {
        self.n_links
    }

    /// Joint `j` carries the stiffness of link `j`, the one it drives.
    pub fn k_bend_out(&self) -> &[f64] {
        &self.k_bend_out
    }

    pub fn k_bend_in(&self) -> &[f64] {
        &self.k_bend_in
    }

    pub fn k_twist(&self) -> &[f64] {
        &self.k_twist
    }

    pub fn rest_kink_index(&self) -> usize {
        self.rest_kink_index
    }

    pub fn rest_kink_angle(&self) -> f64 {
        self.rest_kink_angle
    }

    /// Rest rotation (about the sheet normal) built into each joint.
    pub fn rest_joint_angles(&self) -> Vec<f64> {
        (0..self.n_joints()).map(|j| if j == self.rest_kink_index { self.rest_kink_angle } else { 0.0 }).collect()
    }

    /// `EI_η / l`, the energy unit of the internal objective.
    pub fn energy_unit(&self) -> f64 {
        self.ei_eta / self.span
    }

    /// Per-dof stiffness in units of `EI_η/l`, laid out like the state.
    fn unit_stiffness(&self) -> Vec<f64> {
        let u = self.span / self.ei_eta;
        (0..self.n_links)
            .flat_map(|j| [self.k_bend_out[j] * u, self.k_bend_in[j] * u, self.k_twist[j] * u])
            .collect()
    }

    /// Frames and dimensionless node positions.
    fn kinematics(&self, omega: &[f64]) -> (Vec<Matrix3<f64>>, Vec<Vector3<f64>>) {
        let n = self.n_links;
        let kink = exp_so3(&Vector3::new(0.0, self.rest_kink_angle, 0.0));
        let mut frames = Vec::with_capacity(n);
        let mut nodes = Vec::with_capacity(n + 1);
        let mut f = clamp_frame();
        let mut p = Vector3::zeros();
        nodes.push(p);
        for j in 0..n {
            let w = Vector3::new(omega[3 * j], omega[3 * j + 1], omega[3 * j + 2]);
            if j == self.rest_kink_index {
                f *= kink;
            }
            f *= exp_so3(&w);
            frames.push(f);
            p += self.lengths[j] / self.span * f.column(2);
            nodes.push(p);
        }
        (frames, nodes)
    }

    pub fn config(&self, omega: &[f64]) -> RibbonConfig {
        let (frames, nodes) = self.kinematics(omega);
        RibbonConfig { omega: omega.to_vec(), nodes: nodes.iter().map(|p| p * self.span).collect(), frames }
    }

    pub fn rest_config(&self) -> RibbonConfig {
        self.config(&vec![0.0; 3 * self.n_joints()])
    }

    /// Spring energy, J.
    pub fn spring_energy(&self, omega: &[f64]) -> f64 {
        let k = self.unit_stiffness();
        let e: f64 = omega.iter().zip(&k).map(|(w, k)| 0.5 * k * w * w).sum();
        e * self.energy_unit()
    }

    fn objective(&self, omega: &[f64], grad: &mut [f64], pen: &Penalty) -> f64 {
        let k = self.unit_stiffness();
        let (frames, nodes) = self.kinematics(omega);
        let n = self.n_links;
        let tip = nodes[n];
        let mut f = 0.0;
        for (i, w) in omega.iter().enumerate() {
            f += 0.5 * k[i] * w * w;
            grad[i] = k[i] * w;
        }
        f += 0.5 * pen.gap * tip.x * tip.x;
        let c = Vector3::new(pen.gap * tip.x, 0.0, 0.0);
        let e3 = frames[n - 1].column(2).into_owned();
        let s = e3.z;
        let psi_dir = e3.cross(&Vector3::z());
        if let Some(kp) = pen.psi {
            f += 0.5 * kp * s * s;
        }
        for j in 0..n {
            let w = Vector3::new(omega[3 * j], omega[3 * j + 1], omega[3 * j + 2]);
            let m = frames[j] * right_jacobian(&w);
            let r = tip - nodes[j];
            let mut world = r.cross(&c);
            if let Some(kp) = pen.psi {
                world += kp * s * psi_dir;
            }
            let g = m.transpose() * world;
            grad[3 * j] += g.x;
            grad[3 * j + 1] += g.y;
            grad[3 * j + 2] += g.z;
        }
        f
    }

    /// Dimensionless objective of a penalty stage; exposed for gradient checks.
    pub fn stage_objective(&self, omega: &[f64], grad: &mut [f64], gap_penalty: f64, psi_penalty: Option<f64>) -> f64 {
        self.objective(omega, grad, &Penalty { gap: gap_penalty, psi: psi_penalty })
    }

    /// Uniform out-of-plane bend putting the mid-span node at `±SEED_AMPLITUDE·l`.
    fn seed(&self, side: Side) -> Vec<f64> {
        let mut omega = vec![0.0; 3 * self.n_joints()];
        let probe = 1e-6;
        for j in 0..self.n_joints() {
            omega[3 * j] = probe;
        }
        let z = self.kinematics(&omega).1[self.n_links / 2].z;
        let scale = side.sign() * SEED_AMPLITUDE / z;
        omega.iter_mut().for_each(|w| *w *= scale);
        omega
    }

    fn mid_deflection(&self, omega: &[f64]) -> f64 {
        self.kinematics(omega).1[self.n_links / 2].z
    }

    fn relax(&self, seed: Vec<f64>, psi_constrained: bool) -> Result<Equilibrium> {
        let k = self.unit_stiffness();
        let scale: Vec<f64> = k.iter().map(|k| k.sqrt()).collect();
        let mut z: Vec<f64> = seed.iter().zip(&scale).map(|(w, s)| w * s).collect();
        let mut omega = vec![0.0; seed.len()];
        let mut iterations = 0;
        let mut last = None;
        for &kp in &PENALTY_STAGES {
            let pen = Penalty { gap: kp, psi: psi_constrained.then_some(kp) };
            let fg = |zz: &[f64], g: &mut [f64]| {
                let om: Vec<f64> = zz.iter().zip(&scale).map(|(z, s)| z / s).collect();
                let f = self.objective(&om, g, &pen);
                g.iter_mut().zip(&scale).for_each(|(g, s)| *g /= s);
                f
            };
            let m = minimize(fg, &z, &LbfgsOptions { gtol: GTOL, ..Default::default() });
            iterations += m.iterations;
            z = m.x.clone();
            last = Some(m);
        }
        let m = last.expect("at least one stage");
        if !m.converged {
            return Err(HcmError::NoConvergence { iterations });
        }
        omega.iter_mut().zip(z.iter().zip(&scale)).for_each(|(w, (z, s))| *w = z / s);
        let config = self.config(&omega);
        Ok(Equilibrium {
            energy: self.spring_energy(&omega),
            psi_tip: config.psi_tip(),
            config,
            iterations,
            converged: true,
            history: m.history,
        })
    }
}

/// Local minimum on the requested side of the blank plane.
pub fn find_equilibrium(ribbon: &DiscreteRibbon, side: Side) -> Result<Equilibrium> {
    let eq = ribbon.relax(ribbon.seed(side), false)?;
    let z = ribbon.mid_deflection(&eq.config.omega);
    if z.abs() > FLAT_TOLERANCE && z.signum() != side.sign() {
        return Err(HcmError::FellToOppositeSide { psi_tip: eq.psi_tip });
    }
    Ok(eq)
}

/// Minimum restricted to a level apex (`ψ_tip = 0`): the transition state.
/// Started from the perturbed seed and from the flat blank; the lower of the
/// converged results is kept.
pub fn find_saddle(ribbon: &DiscreteRibbon) -> Result<Equilibrium> {
    let seeds = [ribbon.seed(Side::Plus), vec![0.0; 3 * ribbon.n_joints()]];
    let mut best: Option<Equilibrium> = None;
    let mut failure = None;
    for seed in seeds {
        match ribbon.relax(seed, true) {
            Ok(eq) => {
                if best.as_ref().is_none_or(|b| eq.energy < b.energy) {
                    best = Some(eq);
                }
            }
            Err(e) => failure = Some(e),
        }
    }
    best.ok_or_else(|| failure.unwrap_or(HcmError::NoConvergence { iterations: 0 }))
}
