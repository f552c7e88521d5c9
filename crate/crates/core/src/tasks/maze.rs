//! Point-robot maze navigation with a linear controller. The second
//! objective (negative distance to goal per step, with a bonus inside the
//! goal region) is deceptive: the snake layout forces the robot to first
//! move away from the goal.

use rand_chacha::ChaCha8Rng;

use crate::error::CoreError;
use crate::model::{
    DescriptorData, DescriptorLayout, EvaluationResult, FeatureVector, FitnessVector, Genome,
    Interval,
};
use crate::scalar::Scalar;
use crate::tasks::{Task, TaskSpec};

pub const EPISODE_LEN: usize = 100;
pub const GOAL_RADIUS: Scalar = 0.12;
pub const GOAL_BONUS: Scalar = 5.0;
const STEP_SIZE: Scalar = 0.02;
const GENOME_DIM: usize = 10;
const IMAGE_SIDE: usize = 8;

const DEFAULT_LAYOUT: &str = include_str!("../../data/snake_maze.txt");

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: [Scalar; 2],
    pub b: [Scalar; 2],
}

/// Arena description: wall segments plus start and goal on the unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct MazeWorld {
    walls: Vec<Segment>,
    start: [Scalar; 2],
    goal: [Scalar; 2],
}

impl MazeWorld {
    pub fn new(
        walls: Vec<Segment>,
        start: [Scalar; 2],
        goal: [Scalar; 2],
    ) -> Result<Self, CoreError> {
        let inside = |p: [Scalar; 2]| p.iter().all(|v| (0.0..=1.0).contains(v));
        if !inside(start) || !inside(goal) {
            return Err(CoreError::invalid("maze start/goal outside the unit arena"));
        }
        for w in &walls {
            for p in [start, goal] {
                if point_segment_distance(p, w) < 1e-9 {
                    return Err(CoreError::invalid("maze start/goal lies on a wall"));
                }
            }
        }
        Ok(Self { walls, start, goal })
    }

    /// The built-in three-corridor snake layout.
    pub fn snake() -> Self {
        Self::parse(DEFAULT_LAYOUT).expect("built-in maze layout is valid")
    }

    /// Parses the plain-text layout format: `start x y` and `goal x y`
    /// lines plus one `x1 y1 x2 y2` line per wall segment. Blank lines and
    /// `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, CoreError> {
        let mut walls = Vec::new();
        let mut start = None;
        let mut goal = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let first = tokens.next().unwrap();
            let nums: Result<Vec<Scalar>, _> = tokens.map(str::parse::<Scalar>).collect();
            let nums = nums
                .map_err(|e| CoreError::parse(format!("maze line {}: {e}", lineno + 1)))?;
            match first {
                "start" | "goal" => {
                    if nums.len() != 2 {
                        return Err(CoreError::parse(format!(
                            "maze line {}: expected two coordinates",
                            lineno + 1
                        )));
                    }
                    let p = [nums[0], nums[1]];
                    if first == "start" {
                        start = Some(p);
                    } else {
                        goal = Some(p);
                    }
                }
                _ => {
                    let lead: Scalar = first
                        .parse()
                        .map_err(|e| CoreError::parse(format!("maze line {}: {e}", lineno + 1)))?;
                    if nums.len() != 3 {
                        return Err(CoreError::parse(format!(
                            "maze line {}: wall needs four coordinates",
                            lineno + 1
                        )));
                    }
                    walls.push(Segment {
                        a: [lead, nums[0]],
                        b: [nums[1], nums[2]],
                    });
                }
            }
        }
        let start = start.ok_or_else(|| CoreError::parse("maze layout missing start"))?;
        let goal = goal.ok_or_else(|| CoreError::parse("maze layout missing goal"))?;
        Self::new(walls, start, goal)
    }

    pub fn walls(&self) -> &[Segment] {
        &self.walls
    }

    pub fn start(&self) -> [Scalar; 2] {
        self.start
    }

    pub fn goal(&self) -> [Scalar; 2] {
        self.goal
    }

    /// Advances the robot by one step, stopping just short of the first wall
    /// the motion segment would cross.
    fn step(&self, pos: [Scalar; 2], action: [Scalar; 2]) -> [Scalar; 2] {
        let delta = [STEP_SIZE * action[0], STEP_SIZE * action[1]];
        if delta[0] == 0.0 && delta[1] == 0.0 {
            return pos;
        }
        let mut t_hit = 1.0;
        for wall in &self.walls {
            if let Some(t) = motion_hits_wall(pos, delta, wall) {
                t_hit = t_hit.min(t);
            }
        }
        let t = (t_hit - 1e-9).max(0.0);
        [pos[0] + t * delta[0], pos[1] + t * delta[1]]
    }
}

/// Parameter of the earliest crossing of the motion segment `p + t*delta`
/// (`t` in [0,1]) with a wall, if any.
fn motion_hits_wall(p: [Scalar; 2], delta: [Scalar; 2], wall: &Segment) -> Option<Scalar> {
    let s = [wall.b[0] - wall.a[0], wall.b[1] - wall.a[1]];
    let denom = cross(delta, s);
    if denom.abs() < 1e-15 {
        return None;
    }
    let diff = [wall.a[0] - p[0], wall.a[1] - p[1]];
    let t = cross(diff, s) / denom;
    let u = cross(diff, delta) / denom;
    ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)).then_some(t)
}

fn cross(a: [Scalar; 2], b: [Scalar; 2]) -> Scalar {
    a[0] * b[1] - a[1] * b[0]
}

fn point_segment_distance(p: [Scalar; 2], seg: &Segment) -> Scalar {
    let d = [seg.b[0] - seg.a[0], seg.b[1] - seg.a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - seg.a[0]) * d[0] + (p[1] - seg.a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    };
    let c = [seg.a[0] + t * d[0], seg.a[1] + t * d[1]];
    ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt()
}

/// Bilinear splat of a position onto an 8x8 single-channel image, flattened
/// row-major. Weights sum to one and vary continuously with the position.
fn occupancy_image(pos: [Scalar; 2]) -> Vec<Scalar> {
    let mut image = vec![0.0; IMAGE_SIDE * IMAGE_SIDE];
    let px = pos[0].clamp(0.0, 1.0) * (IMAGE_SIDE - 1) as Scalar;
    let py = pos[1].clamp(0.0, 1.0) * (IMAGE_SIDE - 1) as Scalar;
    let x0 = (px.floor() as usize).min(IMAGE_SIDE - 1);
    let y0 = (py.floor() as usize).min(IMAGE_SIDE - 1);
    let x1 = (x0 + 1).min(IMAGE_SIDE - 1);
    let y1 = (y0 + 1).min(IMAGE_SIDE - 1);
    let fx = px - x0 as Scalar;
    let fy = py - y0 as Scalar;
    image[y0 * IMAGE_SIDE + x0] += (1.0 - fx) * (1.0 - fy);
    image[y0 * IMAGE_SIDE + x1] += fx * (1.0 - fy);
    image[y1 * IMAGE_SIDE + x0] += (1.0 - fx) * fy;
    image[y1 * IMAGE_SIDE + x1] += fx * fy;
    image
}

/// Maze navigation task. The genome is a linear controller
/// `a = clip(W s + b)` over the state `s = (position, position - goal)`,
/// with `W` row-major in the first eight genes and `b` in the last two.
pub struct MazeTask {
    world: MazeWorld,
    spec: TaskSpec,
}

impl MazeTask {
    pub fn snake() -> Self {
        Self::with_world(MazeWorld::snake())
    }

    pub fn with_world(world: MazeWorld) -> Self {
        let t = EPISODE_LEN as Scalar;
        let max_energy = t * (2.0 as Scalar).sqrt();
        let max_distance_sum = t * (2.0 as Scalar).sqrt();
        let max_bonus_sum = t * GOAL_BONUS;
        Self {
            world,
            spec: TaskSpec {
                name: "maze",
                genome_dim: GENOME_DIM,
                objective_count: 2,
                feature_dim: 2,
                genome_bounds: vec![Interval::new(-1.0, 1.0); GENOME_DIM],
                feature_bounds: vec![Interval::new(0.0, 1.0); 2],
                reference_point: vec![
                    TaskSpec::reference_component(-max_energy, 0.0),
                    TaskSpec::reference_component(-max_distance_sum, max_bonus_sum),
                ],
                episode_len: Some(EPISODE_LEN),
                noise_scale: 0.0,
            },
        }
    }

    pub fn world(&self) -> &MazeWorld {
        &self.world
    }

    /// Full rollout, returning the per-step positions after each move. Used
    /// by tests to check the collision invariant.
    pub fn rollout(&self, genome: &Genome) -> Result<Vec<[Scalar; 2]>, CoreError> {
        if genome.len() != GENOME_DIM {
            return Err(CoreError::DimensionMismatch {
                expected: GENOME_DIM,
                got: genome.len(),
            });
        }
        let w = genome.values();
        let goal = self.world.goal;
        let mut pos = self.world.start;
        let mut positions = Vec::with_capacity(EPISODE_LEN);
        for _ in 0..EPISODE_LEN {
            let action = controller_action(w, pos, goal);
            pos = self.world.step(pos, action);
            positions.push(pos);
        }
        Ok(positions)
    }
}

fn controller_action(w: &[Scalar], pos: [Scalar; 2], goal: [Scalar; 2]) -> [Scalar; 2] {
    let state = [pos[0], pos[1], pos[0] - goal[0], pos[1] - goal[1]];
    let mut action = [0.0; 2];
    for (i, a) in action.iter_mut().enumerate() {
        let mut acc = w[8 + i];
        for (j, s) in state.iter().enumerate() {
            acc += w[i * 4 + j] * s;
        }
        *a = acc.clamp(-1.0, 1.0);
    }
    action
}

impl Task for MazeTask {
    fn spec(&self) -> &TaskSpec {
        &self.spec
    }

    fn evaluate(
        &self,
        genome: &Genome,
        _rng: &mut ChaCha8Rng,
    ) -> Result<EvaluationResult, CoreError> {
        if genome.len() != GENOME_DIM {
            return Err(CoreError::DimensionMismatch {
                expected: GENOME_DIM,
                got: genome.len(),
            });
        }
        let w = genome.values();
        let goal = self.world.goal;
        let mut pos = self.world.start;
        let mut energy = 0.0;
        let mut reward = 0.0;
        for _ in 0..EPISODE_LEN {
            let action = controller_action(w, pos, goal);
            energy += (action[0] * action[0] + action[1] * action[1]).sqrt();
            pos = self.world.step(pos, action);
            let dist = ((pos[0] - goal[0]).powi(2) + (pos[1] - goal[1]).powi(2)).sqrt();
            reward += if dist > GOAL_RADIUS { -dist } else { GOAL_BONUS };
        }
        Ok(EvaluationResult {
            fitness: FitnessVector::new(vec![-energy, reward])?,
            descriptor: DescriptorData::new(
                1,
                IMAGE_SIDE * IMAGE_SIDE,
                occupancy_image(pos),
                DescriptorLayout::OccupancyImage,
            )?,
            hand_feature: FeatureVector::new(pos.to_vec())?,
        })
    }
}
