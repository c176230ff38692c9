//! Top-down pick-and-place folds.
//!
//! A fold is a five-phase gripper path: descend to just above the pick
//! point, descend onto the cloth and pinch, lift, carry horizontally to
//! above the place point, then lower and open. Grasped particles ride
//! rigidly with the gripper from the pinch until the release, after which
//! the cloth is settled.

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cloth::{self, ClothSpec, ClothState, GridSpec, Scratch};

/// Picks closer than this to their place point are rejected.
pub const MIN_SEPARATION: f64 = 0.005;

/// Vertical band below the highest candidate that a pinch can reach.
pub const PINCH_BAND: f64 = 0.006;

/// Height above its layer floor beyond which a particle counts as lifted.
const LIFT_DETECT: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FoldError {
    #[error("invalid fold action: {0}")]
    InvalidAction(String),
    #[error("invalid fold params: {0}")]
    InvalidParams(String),
    #[error("nothing grasped: the pick point misses the cloth")]
    NothingGrasped,
}

/// One pick point and one place point in workspace coordinates (meters).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldAction {
    pub pick: Vector2<f64>,
    pub place: Vector2<f64>,
}

impl FoldAction {
    pub fn new(pick: Vector2<f64>, place: Vector2<f64>) -> Self {
        Self { pick, place }
    }

    /// Checks separation and, when given, containment in the workspace.
    pub fn validate(&self, workspace: Option<&GridSpec>) -> Result<(), FoldError> {
        if !(self.pick.iter().chain(self.place.iter()).all(|v| v.is_finite())) {
            return Err(FoldError::InvalidAction("non-finite coordinate".into()));
        }
        if (self.pick - self.place).norm() < MIN_SEPARATION {
            return Err(FoldError::InvalidAction(format!(
                "pick and place closer than {} m",
                MIN_SEPARATION
            )));
        }
        if let Some(ws) = workspace {
            if !ws.contains(self.pick) || !ws.contains(self.place) {
                return Err(FoldError::InvalidAction("point outside the workspace".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FoldParams {
    /// Height above the cloth top at which the approach phase stops.
    pub approach_clearance: f64,
    /// Gripper height above the ground at which the cloth is let go.
    pub release_height: f64,
    /// Carry height of the horizontal transfer phase.
    pub lift_height: f64,
    pub pinch_radius: f64,
    pub gripper_speed: f64,
    pub frame_interval: f64,
    pub settle_tol: f64,
    pub settle_max_steps: usize,
}

impl Default for FoldParams {
    fn default() -> Self {
        Self {
            approach_clearance: 0.040,
            release_height: 0.020,
            lift_height: 0.05,
            pinch_radius: 0.015,
            gripper_speed: 0.25,
            frame_interval: 1.0 / 30.0,
            settle_tol: cloth::DEFAULT_SETTLE_TOL,
            settle_max_steps: 2000,
        }
    }
}

impl FoldParams {
    pub fn validate(&self) -> Result<(), FoldError> {
        let positive = [
            ("approach_clearance", self.approach_clearance),
            ("release_height", self.release_height),
            ("lift_height", self.lift_height),
            ("pinch_radius", self.pinch_radius),
            ("gripper_speed", self.gripper_speed),
            ("frame_interval", self.frame_interval),
            ("settle_tol", self.settle_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(FoldError::InvalidParams(format!("{name} must be positive")));
            }
        }
        if self.release_height >= self.lift_height {
            return Err(FoldError::InvalidParams("release_height must be below lift_height".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gripper {
    Open,
    Closed,
}

/// One straight segment of the gripper path. `gripper` is the jaw state at
/// the end of the segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub id: u8,
    pub start: Vector3<f64>,
    pub end: Vector3<f64>,
    pub gripper: Gripper,
}

impl Phase {
    pub fn length(&self) -> f64 {
        (self.end - self.start).norm()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub phases: Vec<Phase>,
    pub speed: f64,
    pub duration: f64,
}

impl Trajectory {
    pub fn phase(&self, id: u8) -> &Phase {
        &self.phases[id as usize - 1]
    }

    /// Time at which phase `id` ends.
    pub fn phase_end_time(&self, id: u8) -> f64 {
        self.phases[..id as usize].iter().map(|p| p.length()).sum::<f64>() / self.speed
    }

    /// Gripper position at time `t`, clamped to the path ends.
    pub fn position_at(&self, t: f64) -> Vector3<f64> {
        let mut remaining = t.max(0.0) * self.speed;
        for p in &self.phases {
            let len = p.length();
            if remaining <= len {
                if len == 0.0 {
                    return p.end;
                }
                return p.start + (p.end - p.start) * (remaining / len);
            }
            remaining -= len;
        }
        self.phases.last().map(|p| p.end).unwrap_or_else(Vector3::zeros)
    }
}

/// Builds the five-phase gripper path for `action` over a cloth whose top
/// surface at the pick point is at `cloth_top_z`.
pub fn plan_fold(action: &FoldAction, cloth_top_z: f64, params: &FoldParams) -> Result<Trajectory, FoldError> {
    action.validate(None)?;
    params.validate()?;
    let at = |p: Vector2<f64>, z: f64| Vector3::new(p.x, p.y, z);
    let home = at(action.pick, params.lift_height);
    let approach = at(action.pick, cloth_top_z + params.approach_clearance);
    let pinch = at(action.pick, cloth_top_z);
    let lifted = at(action.pick, params.lift_height);
    let carried = at(action.place, params.lift_height);
    let release = at(action.place, params.release_height);
    let phases = vec![
        Phase {
            id: 1,
            start: home,
            end: approach,
            gripper: Gripper::Open,
        },
        Phase {
            id: 2,
            start: approach,
            end: pinch,
            gripper: Gripper::Closed,
        },
        Phase {
            id: 3,
            start: pinch,
            end: lifted,
            gripper: Gripper::Closed,
        },
        Phase {
            id: 4,
            start: lifted,
            end: carried,
            gripper: Gripper::Closed,
        },
        Phase {
            id: 5,
            start: carried,
            end: release,
            gripper: Gripper::Open,
        },
    ];
    let duration = phases.iter().map(|p| p.length()).sum::<f64>() / params.gripper_speed;
    Ok(Trajectory {
        phases,
        speed: params.gripper_speed,
        duration,
    })
}

/// Particles within `pinch_radius` (horizontally) of `pick` that lie in the
/// top band of the stack under the pick point.
pub fn grasp_particles(state: &ClothState, pick: Vector2<f64>, pinch_radius: f64) -> Result<Vec<usize>, FoldError> {
    assert!(pinch_radius > 0.0, "pinch_radius must be positive");
    let r2 = pinch_radius * pinch_radius;
    let candidates: Vec<usize> = (0..state.len())
        .filter(|&i| {
            let p = state.positions[i];
            let (dx, dy) = (p.x - pick.x, p.y - pick.y);
            dx * dx + dy * dy <= r2
        })
        .collect();
    let top = candidates
        .iter()
        .map(|&i| state.positions[i].z)
        .fold(f64::NEG_INFINITY, f64::max);
    let grasped: Vec<usize> = candidates
        .into_iter()
        .filter(|&i| state.positions[i].z >= top - PINCH_BAND)
        .collect();
    if grasped.is_empty() {
        Err(FoldError::NothingGrasped)
    } else {
        Ok(grasped)
    }
}

#[derive(Debug, Clone)]
pub struct FoldResult {
    pub final_state: ClothState,
    /// Snapshots every `frame_interval` of simulated time; the last one is
    /// `final_state`.
    pub frames: Vec<ClothState>,
    pub grasped_count: usize,
    pub settled: bool,
    /// Substeps spent settling after the release.
    pub settle_steps: usize,
}

/// Runs one fold on a copy of `state`.
pub fn execute_fold(
    state: &ClothState,
    spec: &ClothSpec,
    action: &FoldAction,
    params: &FoldParams,
) -> Result<FoldResult, FoldError> {
    params.validate()?;
    action.validate(None)?;
    let grasped = grasp_particles(state, action.pick, params.pinch_radius)?;
    let top_z = grasped
        .iter()
        .map(|&i| state.positions[i].z)
        .fold(f64::NEG_INFINITY, f64::max);
    let traj = plan_fold(action, top_z, params)?;
    let t_pinch = traj.phase_end_time(2);
    let pinch_point = traj.phase(2).end;

    let mut st = state.clone();
    let t0 = st.sim_time;
    let dt = spec.timestep;
    let mut frames = vec![st.clone()];
    let mut next_frame = t0 + params.frame_interval;
    let mut record = |st: &ClothState, frames: &mut Vec<ClothState>| {
        if st.sim_time >= next_frame {
            frames.push(st.clone());
            while next_frame <= st.sim_time {
                next_frame += params.frame_interval;
            }
        }
    };

    let offsets: Vec<(usize, Vector3<f64>)> = grasped.iter().map(|&i| (i, state.positions[i] - pinch_point)).collect();
    let mut lifted = vec![false; st.len()];
    let mut scratch = Scratch::new(&st, spec);
    let steps = (traj.duration / dt).ceil() as usize;
    let mut holding = false;
    for k in 1..=steps {
        let t = (k as f64 * dt).min(traj.duration);
        if !holding && t >= t_pinch {
            holding = true;
        }
        if holding {
            let g = traj.position_at(t);
            for &(i, off) in &offsets {
                st.pinned.insert(i, g + off);
            }
        }
        cloth::substep(&mut st, spec, &mut scratch);
        for (i, p) in st.positions.iter().enumerate() {
            let floor = spec.thickness * (1.0 + st.layers[i] as f64);
            if p.z > floor + LIFT_DETECT {
                lifted[i] = true;
            }
        }
        record(&st, &mut frames);
    }
    st.release_all();

    // stack released cloth one layer above everything below it
    let new_layer = st.folds_applied + 1;
    let new_floor = spec.thickness * (1.0 + new_layer as f64);
    for i in 0..st.len() {
        if lifted[i] && st.positions[i].z > new_floor {
            st.layers[i] = st.layers[i].max(new_layer);
        }
    }
    st.folds_applied += 1;

    let (settle_steps, settled) = cloth::settle_with(&mut st, spec, params.settle_tol, params.settle_max_steps, |s| {
        record(s, &mut frames)
    });
    if frames.last().map(|f| f.sim_time) != Some(st.sim_time) {
        frames.push(st.clone());
    }
    Ok(FoldResult {
        final_state: st,
        frames,
        grasped_count: grasped.len(),
        settled,
        settle_steps,
    })
}

/// Applies `actions` in order, each on the settled result of the previous
/// one. A pick that misses the cloth leaves the cloth untouched.
pub fn execute_sequence(
    state: &ClothState,
    spec: &ClothSpec,
    actions: &[FoldAction],
    params: &FoldParams,
) -> Result<ClothState, FoldError> {
    let mut st = state.clone();
    for a in actions {
        match execute_fold(&st, spec, a, params) {
            Ok(r) => st = r.final_state,
            Err(FoldError::NothingGrasped) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(st)
}
