//! Quasi-static contact resolution.
//!
//! The body has no inertia: its twist is the total wrench scaled by the
//! mobility `diag(I / D_f, I / D_o)`. Contact forces are found with projected
//! Gauss-Seidel over 3x3 blocks. Each block first tries sticking (zero
//! tangential velocity, normal velocity closing the gap in one step) and
//! falls back to Coulomb sliding when the stick force leaves the cone.

use compliant_core::so3::rotation_exp;
use compliant_core::Pose;
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::env::{Contact, ContactSource, Environment};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Wrench {
    pub force: Vector3<f64>,
    pub torque: Vector3<f64>,
}

impl Wrench {
    pub fn new(force: Vector3<f64>, torque: Vector3<f64>) -> Self {
        Wrench { force, torque }
    }

    pub fn scale(&self, c: f64) -> Wrench {
        Wrench::new(self.force * c, self.torque * c)
    }
}

impl std::ops::Add for Wrench {
    type Output = Wrench;
    fn add(self, o: Wrench) -> Wrench {
        Wrench::new(self.force + o.force, self.torque + o.torque)
    }
}

/// Linear velocity of the reference point and angular velocity, both world.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Twist {
    pub v: Vector3<f64>,
    pub w: Vector3<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub dt: f64,
    pub damping_trans: f64,
    pub damping_rot: f64,
    /// Pairs closer than this are handed to the solver.
    pub margin: f64,
    pub max_sweeps: usize,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            dt: 0.005,
            damping_trans: 100.0,
            damping_rot: 10.0,
            margin: 2e-3,
            max_sweeps: 200,
        }
    }
}

/// Pose plus the contacts that carried force in the last step.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyState {
    pub pose: Pose,
    pub contact_set: Vec<ContactSource>,
}

impl BodyState {
    pub fn new(pose: Pose) -> Self {
        BodyState {
            pose,
            contact_set: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContactSolution {
    /// Net contact wrench about the reference point: what the sensor reads.
    pub wrench: Wrench,
    pub twist: Twist,
    pub forces: Vec<(Contact, Vector3<f64>)>,
}

fn skew(r: &Vector3<f64>) -> Matrix3<f64> {
    r.cross_matrix()
}

/// Resolves contact forces for the given applied wrench (about the
/// reference point `origin`).
pub fn solve_contacts(
    origin: &Vector3<f64>,
    applied: &Wrench,
    contacts: &[Contact],
    params: &SimParams,
) -> ContactSolution {
    let (inv_f, inv_o) = (1.0 / params.damping_trans, 1.0 / params.damping_rot);
    let v0 = applied.force * inv_f;
    let w0 = applied.torque * inv_o;
    let arms: Vec<Vector3<f64>> = contacts.iter().map(|c| c.point - origin).collect();
    let block = |i: usize, j: usize| -> Matrix3<f64> {
        Matrix3::identity() * inv_f - skew(&arms[i]) * skew(&arms[j]) * inv_o
    };
    let n = contacts.len();
    let a: Vec<Vec<Matrix3<f64>>> = (0..n).map(|i| (0..n).map(|j| block(i, j)).collect()).collect();
    let free: Vec<Vector3<f64>> = arms.iter().map(|r| v0 + w0.cross(r)).collect();
    let mut f = vec![Vector3::zeros(); n];

    for _ in 0..params.max_sweeps.max(1) {
        let mut change: f64 = 0.0;
        let mut scale: f64 = 1e-12;
        for i in 0..n {
            let mut rest = free[i];
            for j in 0..n {
                if j != i {
                    rest += a[i][j] * f[j];
                }
            }
            let c = &contacts[i];
            let target = -c.gap / params.dt;
            let fi = local_solve(&a[i][i], &rest, &c.normal, c.mu, target);
            change = change.max((fi - f[i]).norm());
            scale = scale.max(fi.norm());
            f[i] = fi;
        }
        if n <= 1 || change <= 1e-13 * scale {
            break;
        }
    }

    let mut wrench = Wrench::default();
    for (r, fi) in arms.iter().zip(&f) {
        wrench.force += fi;
        wrench.torque += r.cross(fi);
    }
    let total = *applied + wrench;
    ContactSolution {
        wrench,
        twist: Twist {
            v: total.force * inv_f,
            w: total.torque * inv_o,
        },
        forces: contacts.iter().copied().zip(f).collect(),
    }
}

/// Force for one contact with everything else frozen. `rest` is the contact
/// point velocity without this contact's own force.
fn local_solve(a: &Matrix3<f64>, rest: &Vector3<f64>, n: &Vector3<f64>, mu: f64, target: f64) -> Vector3<f64> {
    let an = a * n;
    let lambda0 = (target - n.dot(rest)) / n.dot(&an);
    if !(lambda0 > 0.0) {
        return Vector3::zeros();
    }
    if let Some(inv) = a.try_inverse() {
        let stick = inv * (n * target - rest);
        let fn_ = stick.dot(n);
        let ft = stick - n * fn_;
        if fn_ > 0.0 && ft.norm() <= mu * fn_ * (1.0 + 1e-12) {
            return stick;
        }
        if mu > 0.0 && fn_ > 0.0 && ft.norm() > 0.0 {
            return slide(a, rest, n, mu, target, ft / ft.norm(), lambda0);
        }
    }
    if mu > 0.0 {
        // stick force pointed out of the half-space; slide against the free tangential motion
        let ut = rest - n * n.dot(rest);
        if ut.norm() > 0.0 {
            return slide(a, rest, n, mu, target, -ut / ut.norm(), lambda0);
        }
    }
    n * lambda0
}

fn slide(
    a: &Matrix3<f64>,
    rest: &Vector3<f64>,
    n: &Vector3<f64>,
    mu: f64,
    target: f64,
    mut s: Vector3<f64>,
    lambda0: f64,
) -> Vector3<f64> {
    let mut f = n * lambda0;
    for _ in 0..30 {
        let dir = n + s * mu;
        let denom = n.dot(&(a * dir));
        if !(denom > 1e-300) {
            return n * lambda0;
        }
        let lambda = (target - n.dot(rest)) / denom;
        if !(lambda > 0.0) {
            return n * lambda0;
        }
        f = dir * lambda;
        let u = rest + a * f;
        let ut = u - n * n.dot(&u);
        let m = ut.norm();
        if m <= 1e-15 {
            break;
        }
        let next = -ut / m;
        if (next - s).norm() < 1e-13 {
            break;
        }
        s = (s + next).normalize();
    }
    f
}

/// Environment wrench at the current pose for an applied wrench.
pub fn contact_wrench(state: &BodyState, applied: &Wrench, env: &Environment, params: &SimParams) -> Wrench {
    let contacts = env.contacts(&state.pose, params.margin);
    solve_contacts(&state.pose.position, applied, &contacts, params).wrench
}

/// One quasi-static step under the applied wrench.
pub fn advance(
    env: &Environment,
    state: &BodyState,
    applied: &Wrench,
    params: &SimParams,
) -> (BodyState, ContactSolution) {
    let contacts = env.contacts(&state.pose, params.margin);
    let sol = solve_contacts(&state.pose.position, applied, &contacts, params);
    let mut pose = Pose::new(
        state.pose.position + sol.twist.v * params.dt,
        rotation_exp(&(sol.twist.w * params.dt)) * state.pose.orientation,
    );
    depenetrate(env, &mut pose);
    let contact_set = sol
        .forces
        .iter()
        .filter(|(_, f)| f.norm() > 0.0)
        .map(|(c, _)| c.source)
        .collect();
    (BodyState { pose, contact_set }, sol)
}

/// Translates the body out of any solid it penetrates.
pub fn depenetrate(env: &Environment, pose: &mut Pose) {
    for _ in 0..100 {
        let worst = env
            .contacts(pose, 0.0)
            .into_iter()
            .min_by(|a, b| a.gap.total_cmp(&b.gap));
        match worst {
            Some(c) => pose.position += c.normal * (-c.gap + 1e-12),
            None => return,
        }
    }
}
