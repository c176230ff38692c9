//! Particle-grid cloth integrated with position-based dynamics.
//!
//! Each substep predicts positions from velocities, projects the distance
//! constraints with Gauss-Seidel sweeps in a fixed order, resolves ground
//! contact and friction, then derives velocities from the position change.
//! All arithmetic is plain IEEE `f64` add/mul/div/sqrt so a given input
//! always produces the same bits.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mask::Mask;

/// Maximum depth a particle may sit below the ground plane.
pub const PENETRATION_TOLERANCE: f64 = 1e-3;

/// Default speed threshold used by [`settle`].
pub const DEFAULT_SETTLE_TOL: f64 = 0.005;

/// Consecutive quiet substeps required before [`settle`] reports convergence.
const QUIET_STEPS: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClothError {
    #[error("invalid cloth spec: {0}")]
    InvalidSpec(String),
    #[error("invalid grid spec: {0}")]
    InvalidGrid(String),
}

/// Physical and numerical parameters of a square cloth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClothSpec {
    /// Edge length of the square cloth in meters.
    pub side_length: f64,
    /// Particles per side.
    pub resolution: usize,
    pub mass_per_particle: f64,
    pub structural_stiffness: f64,
    pub shear_stiffness: f64,
    pub bend_stiffness: f64,
    /// Coulomb coefficient applied against the ground.
    pub ground_friction: f64,
    /// Gravitational acceleration magnitude, acting along -z.
    pub gravity: f64,
    pub timestep: f64,
    pub solver_iterations: u32,
    /// Cloth thickness; particle centers rest this far above the ground.
    pub thickness: f64,
    /// Linear velocity damping rate in 1/s.
    pub damping: f64,
}

impl Default for ClothSpec {
    fn default() -> Self {
        Self {
            side_length: 0.30,
            resolution: 25,
            mass_per_particle: 0.001,
            structural_stiffness: 1.0,
            shear_stiffness: 0.9,
            bend_stiffness: 0.2,
            ground_friction: 0.8,
            gravity: 9.81,
            timestep: 1.0 / 120.0,
            solver_iterations: 10,
            thickness: 0.002,
            damping: 1.0,
        }
    }
}

impl ClothSpec {
    pub fn validate(&self) -> Result<(), ClothError> {
        let bad = |msg: &str| Err(ClothError::InvalidSpec(msg.to_string()));
        if self.resolution < 2 {
            return bad("resolution must be at least 2");
        }
        if !(self.side_length > 0.0 && self.side_length.is_finite()) {
            return bad("side_length must be positive");
        }
        if !(self.timestep > 0.0 && self.timestep.is_finite()) {
            return bad("timestep must be positive");
        }
        if !(self.mass_per_particle > 0.0 && self.mass_per_particle.is_finite()) {
            return bad("mass_per_particle must be positive");
        }
        if self.solver_iterations == 0 {
            return bad("solver_iterations must be at least 1");
        }
        for (name, k) in [
            ("structural_stiffness", self.structural_stiffness),
            ("shear_stiffness", self.shear_stiffness),
            ("bend_stiffness", self.bend_stiffness),
        ] {
            if !(0.0..=1.0).contains(&k) {
                return Err(ClothError::InvalidSpec(format!("{name} must lie in [0, 1]")));
            }
        }
        if !(self.ground_friction >= 0.0 && self.ground_friction.is_finite()) {
            return bad("ground_friction must be non-negative");
        }
        if !self.gravity.is_finite() {
            return bad("gravity must be finite");
        }
        if !(self.thickness >= 0.0 && self.thickness.is_finite()) {
            return bad("thickness must be non-negative");
        }
        if !(self.damping >= 0.0 && self.damping * self.timestep <= 1.0) {
            return bad("damping must lie in [0, 1/timestep]");
        }
        Ok(())
    }

    /// Rest distance between 4-neighbors.
    pub fn spacing(&self) -> f64 {
        self.side_length / (self.resolution - 1) as f64
    }
}

/// Rasterization target: a square workspace sampled by a square pixel grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub workspace_side: f64,
    pub pixels_per_side: usize,
    /// South-west corner of the workspace (minimum x and y).
    pub origin: [f64; 2],
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            workspace_side: 0.5,
            pixels_per_side: 256,
            origin: [0.0, 0.0],
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), ClothError> {
        if self.pixels_per_side < 8 {
            return Err(ClothError::InvalidGrid("pixels_per_side must be at least 8".into()));
        }
        if !(self.workspace_side > 0.0 && self.workspace_side.is_finite()) {
            return Err(ClothError::InvalidGrid("workspace_side must be positive".into()));
        }
        Ok(())
    }

    pub fn center(&self) -> Vector2<f64> {
        let h = self.workspace_side / 2.0;
        Vector2::new(self.origin[0] + h, self.origin[1] + h)
    }

    pub fn pixel_size(&self) -> f64 {
        self.workspace_side / self.pixels_per_side as f64
    }

    pub fn contains(&self, p: Vector2<f64>) -> bool {
        let (x0, y0) = (self.origin[0], self.origin[1]);
        p.x >= x0 && p.x <= x0 + self.workspace_side && p.y >= y0 && p.y <= y0 + self.workspace_side
    }

    /// Nearest point of the workspace square.
    pub fn clamp(&self, p: Vector2<f64>) -> Vector2<f64> {
        let (x0, y0) = (self.origin[0], self.origin[1]);
        let clamp = |v: f64, lo: f64| {
            if v.is_nan() {
                lo
            } else {
                v.clamp(lo, lo + self.workspace_side)
            }
        };
        Vector2::new(clamp(p.x, x0), clamp(p.y, y0))
    }

    /// Workspace coordinates of the center of pixel (`col`, `row`); row 0 is
    /// the north (maximum y) edge.
    pub fn pixel_center(&self, col: usize, row: usize) -> Vector2<f64> {
        let s = self.pixel_size();
        Vector2::new(
            self.origin[0] + (col as f64 + 0.5) * s,
            self.origin[1] + self.workspace_side - (row as f64 + 0.5) * s,
        )
    }

    /// Maps normalized cloth coordinates in [0,1]² onto the workspace for a
    /// cloth of `side` meters centered on the workspace.
    pub fn cloth_point(&self, side: f64, normalized: [f64; 2]) -> Vector2<f64> {
        let c = self.center();
        Vector2::new(
            c.x - side / 2.0 + normalized[0] * side,
            c.y - side / 2.0 + normalized[1] * side,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    Structural,
    Shear,
    Bend,
}

/// A distance constraint between two particles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceConstraint {
    pub a: usize,
    pub b: usize,
    pub rest: f64,
    pub kind: ConstraintKind,
}

/// Immutable connectivity shared by every state of one cloth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    /// Particles per side; zero for ad-hoc particle sets.
    pub resolution: usize,
    pub constraints: Vec<DistanceConstraint>,
    pub triangles: Vec<[usize; 3]>,
}

impl Topology {
    pub fn count(&self, kind: ConstraintKind) -> usize {
        self.constraints.iter().filter(|c| c.kind == kind).count()
    }
}

/// The simulated cloth.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClothState {
    pub positions: Vec<Vector3<f64>>,
    pub velocities: Vec<Vector3<f64>>,
    pub topology: Arc<Topology>,
    /// Kinematic targets of grasped particles.
    pub pinned: BTreeMap<usize, Vector3<f64>>,
    /// Stacking layer per particle; layer `k` rests `k` thicknesses higher.
    pub layers: Vec<u32>,
    /// Completed folds, used to assign layers to released cloth.
    pub folds_applied: u32,
    pub sim_time: f64,
}

impl ClothState {
    /// Free particles with no constraints, for single-particle test rigs.
    pub fn from_particles(positions: Vec<Vector3<f64>>) -> Self {
        let n = positions.len();
        Self {
            positions,
            velocities: vec![Vector3::zeros(); n],
            topology: Arc::new(Topology {
                resolution: 0,
                constraints: Vec::new(),
                triangles: Vec::new(),
            }),
            pinned: BTreeMap::new(),
            layers: vec![0; n],
            folds_applied: 0,
            sim_time: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn resolution(&self) -> usize {
        self.topology.resolution
    }

    pub fn max_speed(&self) -> f64 {
        self.velocities.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn min_z(&self) -> f64 {
        self.positions.iter().map(|p| p.z).fold(f64::INFINITY, f64::min)
    }

    pub fn max_z(&self) -> f64 {
        self.positions.iter().map(|p| p.z).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Bitwise equality of every dynamic field.
    pub fn bit_eq(&self, other: &Self) -> bool {
        fn vecs_eq(a: &[Vector3<f64>], b: &[Vector3<f64>]) -> bool {
            a.len() == b.len()
                && a.iter()
                    .zip(b)
                    .all(|(u, v)| u.iter().zip(v.iter()).all(|(x, y)| x.to_bits() == y.to_bits()))
        }
        vecs_eq(&self.positions, &other.positions)
            && vecs_eq(&self.velocities, &other.velocities)
            && self.sim_time.to_bits() == other.sim_time.to_bits()
            && self.layers == other.layers
            && self.folds_applied == other.folds_applied
            && self.pinned.len() == other.pinned.len()
            && self.pinned.iter().zip(&other.pinned).all(|((i, p), (j, q))| {
                i == j && p.iter().zip(q.iter()).all(|(x, y)| x.to_bits() == y.to_bits())
            })
            && self.topology == other.topology
    }

    /// Ground height of a particle's center given its layer.
    #[inline]
    fn floor(&self, spec: &ClothSpec, i: usize) -> f64 {
        spec.thickness * (1.0 + self.layers[i] as f64)
    }

    pub fn pin(&mut self, index: usize, target: Vector3<f64>) {
        assert!(index < self.positions.len(), "pin index out of range");
        self.pinned.insert(index, target);
    }

    pub fn release_all(&mut self) {
        self.pinned.clear();
    }
}

/// Lays a flat cloth on the ground, centered on `center`.
pub fn create_cloth(spec: &ClothSpec, center: Vector2<f64>) -> Result<ClothState, ClothError> {
    spec.validate()?;
    let n = spec.resolution;
    let h = spec.spacing();
    let x0 = center.x - spec.side_length / 2.0;
    let y0 = center.y - spec.side_length / 2.0;
    let idx = |row: usize, col: usize| row * n + col;

    let mut positions = Vec::with_capacity(n * n);
    for row in 0..n {
        for col in 0..n {
            positions.push(Vector3::new(x0 + col as f64 * h, y0 + row as f64 * h, spec.thickness));
        }
    }

    // Constraints are stored in solve order: batches of particle-disjoint
    // constraints, each batch in ascending particle index. Structural
    // edges go last so they hold best at the end of each iteration.
    let mut constraints = Vec::new();
    let mut add = |a: usize, b: usize, kind: ConstraintKind| {
        let rest = (positions[a] - positions[b]).norm();
        constraints.push(DistanceConstraint { a, b, rest, kind });
    };
    // (row step, col step, kind)
    let families: [(isize, isize, ConstraintKind); 6] = [
        (0, 2, ConstraintKind::Bend),
        (2, 0, ConstraintKind::Bend),
        (1, 1, ConstraintKind::Shear),
        (1, -1, ConstraintKind::Shear),
        (0, 1, ConstraintKind::Structural),
        (1, 0, ConstraintKind::Structural),
    ];
    for (dr, dc, kind) in families {
        // edges whose start index along the family axis is congruent modulo
        // twice the edge span share no particle
        let span = dr.max(dc.abs()) as usize;
        let classes = 2 * span;
        for class in 0..classes {
            for row in 0..n {
                for col in 0..n {
                    let along = if dr == 0 { col } else { row };
                    if along % classes != class {
                        continue;
                    }
                    let (r2, c2) = (row as isize + dr, col as isize + dc);
                    if r2 < 0 || c2 < 0 || r2 >= n as isize || c2 >= n as isize {
                        continue;
                    }
                    add(idx(row, col), idx(r2 as usize, c2 as usize), kind);
                }
            }
        }
    }

    let mut triangles = Vec::with_capacity(2 * (n - 1) * (n - 1));
    for row in 0..n - 1 {
        for col in 0..n - 1 {
            let (a, b, c, d) = (idx(row, col), idx(row, col + 1), idx(row + 1, col), idx(row + 1, col + 1));
            triangles.push([a, b, d]);
            triangles.push([a, d, c]);
        }
    }

    Ok(ClothState {
        velocities: vec![Vector3::zeros(); positions.len()],
        layers: vec![0; positions.len()],
        positions,
        topology: Arc::new(Topology {
            resolution: n,
            constraints,
            triangles,
        }),
        pinned: BTreeMap::new(),
        folds_applied: 0,
        sim_time: 0.0,
    })
}

/// Advances the cloth by `substeps` fixed timesteps.
pub fn step_sim(state: &ClothState, spec: &ClothSpec, substeps: usize) -> ClothState {
    let mut next = state.clone();
    let mut scratch = Scratch::new(state, spec);
    for _ in 0..substeps {
        substep(&mut next, spec, &mut scratch);
    }
    next
}

/// In-place variant of [`step_sim`] for hot loops.
pub fn step_in_place(state: &mut ClothState, spec: &ClothSpec, substeps: usize) {
    let mut scratch = Scratch::new(state, spec);
    for _ in 0..substeps {
        substep(state, spec, &mut scratch);
    }
}

pub(crate) struct Scratch {
    predicted: Vec<[f64; 3]>,
    inv_mass: Vec<f64>,
    free_z: Vec<f64>,
    links: Vec<Link>,
    /// Per-link correction shares for the two endpoints, stiffness included.
    shares: Vec<[f64; 2]>,
}

/// Solver-side copy of a constraint with its stiffness resolved.
#[derive(Clone, Copy)]
struct Link {
    a: u32,
    b: u32,
    rest: f64,
    stiffness: f64,
}

impl Scratch {
    pub(crate) fn new(state: &ClothState, spec: &ClothSpec) -> Self {
        let n = state.len();
        let links: Vec<Link> = state
            .topology
            .constraints
            .iter()
            .map(|c| Link {
                a: c.a as u32,
                b: c.b as u32,
                rest: c.rest,
                stiffness: match c.kind {
                    ConstraintKind::Structural => spec.structural_stiffness,
                    ConstraintKind::Shear => spec.shear_stiffness,
                    ConstraintKind::Bend => spec.bend_stiffness,
                },
            })
            .filter(|l| l.stiffness > 0.0)
            .collect();
        Self {
            predicted: vec![[0.0; 3]; n],
            inv_mass: vec![0.0; n],
            free_z: vec![0.0; n],
            shares: vec![[0.0; 2]; links.len()],
            links,
        }
    }
}

pub(crate) fn substep(state: &mut ClothState, spec: &ClothSpec, scratch: &mut Scratch) {
    let dt = spec.timestep;
    let n = state.len();
    let gravity = Vector3::new(0.0, 0.0, -spec.gravity);
    let w_free = 1.0 / spec.mass_per_particle;
    let keep = 1.0 - spec.damping * dt;
    let Scratch {
        predicted,
        inv_mass,
        free_z,
        links,
        shares,
    } = scratch;
    debug_assert_eq!(predicted.len(), n);

    for i in 0..n {
        if let Some(target) = state.pinned.get(&i) {
            predicted[i] = [target.x, target.y, target.z];
            inv_mass[i] = 0.0;
        } else {
            let v = state.velocities[i] * keep + gravity * dt;
            let p = state.positions[i] + v * dt;
            predicted[i] = [p.x, p.y, p.z];
            inv_mass[i] = w_free;
        }
        free_z[i] = predicted[i][2];
    }

    for (l, share) in links.iter().zip(shares.iter_mut()) {
        let (wa, wb) = (inv_mass[l.a as usize], inv_mass[l.b as usize]);
        let wsum = wa + wb;
        *share = if wsum == 0.0 {
            [0.0, 0.0]
        } else {
            [l.stiffness * wa / wsum, l.stiffness * wb / wsum]
        };
    }

    for _ in 0..spec.solver_iterations {
        project(state, spec, links, shares, predicted, inv_mass);
    }

    // Position-level Coulomb friction for particles touching the ground.
    let mu = spec.ground_friction;
    for i in 0..n {
        if inv_mass[i] == 0.0 {
            continue;
        }
        let floor = state.floor(spec, i);
        if predicted[i][2] > floor {
            continue;
        }
        let normal_push = floor - free_z[i];
        if normal_push <= 0.0 {
            continue;
        }
        let x = state.positions[i];
        let slip = Vector2::new(predicted[i][0] - x.x, predicted[i][1] - x.y);
        let slip_len = slip.norm();
        let limit = mu * normal_push;
        if slip_len <= limit {
            predicted[i][0] = x.x;
            predicted[i][1] = x.y;
        } else {
            let scale = limit / slip_len;
            predicted[i][0] -= slip.x * scale;
            predicted[i][1] -= slip.y * scale;
        }
    }

    project(state, spec, links, shares, predicted, inv_mass);

    for i in 0..n {
        let p = Vector3::from(predicted[i]);
        state.velocities[i] = (p - state.positions[i]) / dt;
        state.positions[i] = p;
        debug_assert!(p.iter().all(|v| v.is_finite()), "non-finite particle {i}");
    }
    state.sim_time += dt;
}

fn project(
    state: &ClothState,
    spec: &ClothSpec,
    links: &[Link],
    shares: &[[f64; 2]],
    predicted: &mut [[f64; 3]],
    inv_mass: &[f64],
) {
    let n = state.len();
    for (l, &[ka, kb]) in links.iter().zip(shares) {
        let (ia, ib) = (l.a as usize, l.b as usize);
        let (pa, pb) = (predicted[ia], predicted[ib]);
        let (dx, dy, dz) = (pa[0] - pb[0], pa[1] - pb[1], pa[2] - pb[2]);
        let dist = (dx * dx + dy * dy + dz * dz).sqrt();
        if dist < 1e-12 {
            continue;
        }
        let s = (dist - l.rest) / dist;
        let (sa, sb) = (ka * s, kb * s);
        predicted[ia] = [pa[0] - dx * sa, pa[1] - dy * sa, pa[2] - dz * sa];
        predicted[ib] = [pb[0] + dx * sb, pb[1] + dy * sb, pb[2] + dz * sb];
    }
    for i in 0..n {
        if inv_mass[i] == 0.0 {
            continue;
        }
        let floor = state.floor(spec, i);
        if predicted[i][2] < floor {
            predicted[i][2] = floor;
        }
    }
}

/// Outcome of [`settle`].
#[derive(Debug, Clone)]
pub struct Settled {
    pub state: ClothState,
    pub steps_used: usize,
    pub converged: bool,
}

/// Steps until the fastest particle stays below `velocity_tol` for five
/// consecutive substeps, or `max_steps` is exhausted.
pub fn settle(state: &ClothState, spec: &ClothSpec, velocity_tol: f64, max_steps: usize) -> Settled {
    let mut st = state.clone();
    let (steps_used, converged) = settle_with(&mut st, spec, velocity_tol, max_steps, |_| {});
    Settled {
        state: st,
        steps_used,
        converged,
    }
}

/// Settles in place, invoking `on_step` after every substep.
pub(crate) fn settle_with(
    state: &mut ClothState,
    spec: &ClothSpec,
    velocity_tol: f64,
    max_steps: usize,
    mut on_step: impl FnMut(&ClothState),
) -> (usize, bool) {
    assert!(velocity_tol > 0.0, "velocity_tol must be positive");
    let mut scratch = Scratch::new(state, spec);
    let mut quiet = 0;
    for step in 1..=max_steps {
        substep(state, spec, &mut scratch);
        on_step(state);
        let tol2 = velocity_tol * velocity_tol;
        if state.velocities.iter().all(|v| v.norm_squared() < tol2) {
            quiet += 1;
            if quiet >= QUIET_STEPS {
                return (step, true);
            }
        } else {
            quiet = 0;
        }
    }
    (max_steps, false)
}

/// Top-down occupancy: a pixel is set iff the vertical projection of some
/// mesh triangle covers its center (edges inclusive).
pub fn rasterize_topdown(state: &ClothState, grid: &GridSpec) -> Mask {
    let n = grid.pixels_per_side;
    let mut mask = Mask::new(n, n);
    let s = grid.pixel_size();
    let top = grid.origin[1] + grid.workspace_side;
    // continuous pixel coordinates: u grows east, v grows south
    let to_uv = |p: &Vector3<f64>| ((p.x - grid.origin[0]) / s, (top - p.y) / s);

    for tri in &state.topology.triangles {
        let [a, b, c] = tri.map(|i| to_uv(&state.positions[i]));
        let area = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
        if area == 0.0 {
            continue;
        }
        let umin = a.0.min(b.0).min(c.0);
        let umax = a.0.max(b.0).max(c.0);
        let vmin = a.1.min(b.1).min(c.1);
        let vmax = a.1.max(b.1).max(c.1);
        // pixel k has its center at k + 0.5
        let c0 = pixel_lo(umin, n);
        let c1 = pixel_hi(umax, n);
        let r0 = pixel_lo(vmin, n);
        let r1 = pixel_hi(vmax, n);
        let sign = area.signum();
        for row in r0..r1 {
            let pv = row as f64 + 0.5;
            for col in c0..c1 {
                let pu = col as f64 + 0.5;
                let e0 = sign * ((b.0 - a.0) * (pv - a.1) - (b.1 - a.1) * (pu - a.0));
                let e1 = sign * ((c.0 - b.0) * (pv - b.1) - (c.1 - b.1) * (pu - b.0));
                let e2 = sign * ((a.0 - c.0) * (pv - c.1) - (a.1 - c.1) * (pu - c.0));
                if e0 >= 0.0 && e1 >= 0.0 && e2 >= 0.0 {
                    mask.set(col, row, true);
                }
            }
        }
    }
    mask
}

/// First pixel whose center is >= `lo`.
fn pixel_lo(lo: f64, n: usize) -> usize {
    let k = (lo - 0.5).ceil();
    if k <= 0.0 {
        0
    } else {
        (k as usize).min(n)
    }
}

/// One past the last pixel whose center is <= `hi`.
fn pixel_hi(hi: f64, n: usize) -> usize {
    let k = (hi - 0.5).floor() + 1.0;
    if k <= 0.0 {
        0
    } else {
        (k as usize).min(n)
    }
}
