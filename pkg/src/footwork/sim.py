"""Reduced-order physics playground: a 10-joint biped, a ball, and two goals.

The model keeps only what the control stack needs:

- The torso is a 6-DOF rigid body carrying nearly all of the robot's mass;
  its inertia is treated as a world-aligned diagonal (the torso is squat
  enough that orientation-dependent inertia is below the model's noise
  floor).
- Legs are massless kinematic chains. Joints are independent second-order
  servos driven by PD torque; forward kinematics places knee, toe, and heel
  contact points whose ground reactions act on the torso. The normal force
  a leg can transmit is capped in proportion to servo stiffness, so with
  servos off the legs cannot hold the body up.
- Ground contact is a spring-damper normal force with Coulomb-clamped
  viscous friction. The torso itself contacts the ground as a sphere.
- The ball integrates with gravity, ground restitution, rolling resistance,
  and reflecting field walls; crossing a goal plane inside the mouth ends
  the episode. Foot or torso proximity transfers an impulse along the
  relative velocity.

Everything is straight float64 numpy stepped by semi-implicit Euler at a
fixed dt, so trajectories are bit-reproducible from (config, seed, actions).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import observation, rotation
from .arbiter import Network, PostureFeatures, features_from_up_axis
from .curriculum import Wrench
from .gait import (
    NUM_JOINTS,
    GaitProfile,
    JointTargets,
    PhaseClock,
    advance,
    phase_encoding,
    superpose,
)
from .rewards import (
    BsknRewardInputs,
    FrnRewardInputs,
    RewardBreakdown,
    RewardCoefficients,
    bskn_reward,
    frn_reward,
)


class Scenario(enum.Enum):
    STANDING_CENTER = "standing_center"
    FALLEN_SUPINE = "fallen_supine"
    FALLEN_PRONE = "fallen_prone"
    CORNER_BALL = "corner_ball"
    RANDOM = "random"


class Event(enum.Enum):
    FELL = "fell"
    RECOVERED = "recovered"
    BALL_KICKED = "ball_kicked"
    GOAL_SCORED = "goal_scored"
    OUT_OF_BOUNDS = "out_of_bounds"


class SimulationUnstable(RuntimeError):
    """Integration produced a non-finite state; the offending step was rejected."""


@dataclass
class EnvConfig:
    """Physical constants, field geometry, and episode bookkeeping."""

    dt: float = 0.01
    gravity: float = 9.81

    # torso rigid body
    torso_mass: float = 2.8
    torso_inertia: tuple[float, float, float] = (0.012, 0.016, 0.010)
    torso_contact_radius: float = 0.07

    # leg geometry (hip offsets from torso center, segment lengths)
    hip_offset_y: float = 0.06
    hip_offset_z: float = -0.07
    thigh_length: float = 0.14
    shank_length: float = 0.14
    foot_drop: float = 0.05
    toe_offset: float = 0.06
    heel_offset: float = 0.05

    # joint servos
    kp: float = 60.0
    kd: float = 1.2
    joint_inertia: float = 0.01
    joint_limit: float = 1.57
    # newtons of leg-transmitted ground force per unit of kp
    leg_force_per_gain: float = 5.0

    # ground contact
    contact_stiffness: float = 4000.0
    contact_damping: float = 60.0
    friction_mu: float = 0.8
    friction_viscous: float = 40.0
    angular_damping: float = 0.02

    # ball
    ball_radius: float = 0.06
    ball_mass: float = 0.10
    ball_restitution: float = 0.5
    ball_rest_speed: float = 0.05
    rolling_resistance: float = 0.8
    wall_restitution: float = 0.6
    kick_restitution: float = 0.6
    foot_contact_radius: float = 0.04
    kick_speed_threshold: float = 0.1

    # field (x along length, goals at x = +-field_length/2)
    field_length: float = 6.0
    field_width: float = 4.0
    goal_width: float = 1.0
    goal_sign: int = 1  # which x goal the robot attacks
    goal_distance_max: float | None = None

    standing_height: float = 0.40
    scenario: Scenario = Scenario.STANDING_CENTER
    seed: int = 0
    max_episode_seconds: float = 10.0
    opponent_position: tuple[float, float, float] | None = None

    def __post_init__(self) -> None:
        if self.dt <= 0.0:
            raise ValueError("dt must be > 0")
        if self.kp < 0.0 or self.kd < 0.0 or self.joint_inertia <= 0.0:
            raise ValueError("servo gains must be >= 0 and joint_inertia > 0")
        if isinstance(self.scenario, str):
            self.scenario = Scenario(self.scenario)
        if self.goal_distance_max is None:
            self.goal_distance_max = math.hypot(self.field_length, self.field_width)

    @property
    def half_length(self) -> float:
        return self.field_length / 2.0

    @property
    def half_width(self) -> float:
        return self.field_width / 2.0

    def goal_center(self, sign: int | None = None) -> np.ndarray:
        s = self.goal_sign if sign is None else sign
        return np.array([s * self.half_length, 0.0, 0.0])

    @property
    def max_episode_frames(self) -> int:
        return int(round(self.max_episode_seconds / self.dt))

    @property
    def leg_force_limit(self) -> float:
        return self.leg_force_per_gain * self.kp


@dataclass
class RobotState:
    position: np.ndarray
    orientation: np.ndarray  # unit quaternion, w x y z
    linear_velocity: np.ndarray
    angular_velocity: np.ndarray
    joint_angles: np.ndarray
    joint_velocities: np.ndarray

    def copy(self) -> "RobotState":
        return RobotState(
            self.position.copy(),
            self.orientation.copy(),
            self.linear_velocity.copy(),
            self.angular_velocity.copy(),
            self.joint_angles.copy(),
            self.joint_velocities.copy(),
        )

    @property
    def up_axis(self) -> np.ndarray:
        return rotation.up_axis(self.orientation)

    @property
    def height(self) -> float:
        return float(self.position[2])


@dataclass
class WorldState:
    robot: RobotState
    ball_position: np.ndarray
    ball_velocity: np.ndarray
    opponent_position: np.ndarray | None = None
    frame: int = 0

    def copy(self) -> "WorldState":
        return WorldState(
            robot=self.robot.copy(),
            ball_position=self.ball_position.copy(),
            ball_velocity=self.ball_velocity.copy(),
            opponent_position=None
            if self.opponent_position is None
            else self.opponent_position.copy(),
            frame=self.frame,
        )


@dataclass(frozen=True)
class StepResult:
    observation: np.ndarray | None
    reward: RewardBreakdown
    terminated: bool
    truncated: bool
    events: frozenset[Event]
    posture: PostureFeatures
    frn_inputs: FrnRewardInputs
    bskn_inputs: BsknRewardInputs


# ---------------------------------------------------------------------------
# forward kinematics
# ---------------------------------------------------------------------------

# body-frame contact points per leg: knee, toe, heel
POINTS_PER_LEG = 3


def leg_contact_points_body(config: EnvConfig, joint_angles: np.ndarray) -> np.ndarray:
    """Contact points of both legs in the torso frame, shape (6, 3).

    Row order: left knee, left toe, left heel, right knee, right toe,
    right heel. Hip pitch, knee, and ankle all rotate about the local y
    axis, so segment directions reduce to sin/cos of accumulated pitch
    rotated by the hip yaw/roll frame.
    """
    q = np.asarray(joint_angles, dtype=float).reshape(2, 5)
    yaw, roll = q[:, 0], q[:, 1]
    pitch1 = q[:, 2]
    pitch2 = pitch1 + q[:, 3]
    pitch3 = pitch2 + q[:, 4]

    cy, sy = np.cos(yaw), np.sin(yaw)
    cr, sr = np.cos(roll), np.sin(roll)
    # columns of Rz(yaw) @ Rx(roll) that matter for vectors in the xz plane
    col_x = np.stack([cy, sy, np.zeros(2)], axis=1)
    col_z = np.stack([sr * sy, -sr * cy, cr], axis=1)

    def direction(pitch: np.ndarray) -> np.ndarray:
        return np.sin(pitch)[:, None] * col_x + np.cos(pitch)[:, None] * col_z

    hips = np.array(
        [
            [0.0, config.hip_offset_y, config.hip_offset_z],
            [0.0, -config.hip_offset_y, config.hip_offset_z],
        ]
    )
    knee = hips - config.thigh_length * direction(pitch1)
    ankle = knee - config.shank_length * direction(pitch2)
    d3 = direction(pitch3)
    fwd3 = np.cos(pitch3)[:, None] * col_x - np.sin(pitch3)[:, None] * col_z
    sole = ankle - config.foot_drop * d3
    toe = sole + config.toe_offset * fwd3
    heel = sole - config.heel_offset * fwd3

    return np.concatenate(
        [np.stack([knee[i], toe[i], heel[i]]) for i in (0, 1)], axis=0
    )


def standing_torso_height(config: EnvConfig, joint_angles: np.ndarray) -> float:
    """Torso height that rests the lowest leg point exactly on the ground."""
    points = leg_contact_points_body(config, joint_angles)
    return -float(np.min(points[:, 2]))


# ---------------------------------------------------------------------------
# dynamics
# ---------------------------------------------------------------------------


def _ground_force(
    point: np.ndarray,
    velocity: np.ndarray,
    config: EnvConfig,
    force_cap: float | None,
) -> np.ndarray | None:
    penetration = -point[2]
    if penetration <= 0.0:
        return None
    normal = config.contact_stiffness * penetration - config.contact_damping * velocity[2]
    if normal <= 0.0:
        return None
    if force_cap is not None:
        normal = min(normal, force_cap)
    tangent = velocity[:2]
    speed = math.hypot(tangent[0], tangent[1])
    if speed > 1e-9:
        friction_mag = min(config.friction_mu * normal, config.friction_viscous * speed)
        fx, fy = -friction_mag * tangent[0] / speed, -friction_mag * tangent[1] / speed
    else:
        fx = fy = 0.0
    return np.array([fx, fy, normal])


def _integrate_robot(
    robot: RobotState,
    targets: JointTargets,
    assist: Wrench,
    config: EnvConfig,
) -> tuple[RobotState, np.ndarray, np.ndarray]:
    """One semi-implicit Euler step of the torso + servo chains.

    Returns the new robot state plus the world-frame foot-cluster points and
    velocities of the *pre-step* pose (used for ball kicks, which are
    resolved against the state that produced the contact forces).
    """
    dt = config.dt
    q, qd = robot.joint_angles, robot.joint_velocities

    # contact geometry from the current pose; joint-rate term via an FK
    # finite difference (exact enough at servo speeds, keeps FK single-path)
    rot = rotation.to_matrix(robot.orientation)
    pts_body = leg_contact_points_body(config, q)
    pts_body_next = leg_contact_points_body(config, q + qd * dt)
    pts_world = robot.position + pts_body @ rot.T
    arm = pts_world - robot.position
    vel_joints = (pts_body_next - pts_body) @ rot.T / dt
    vel_pts = (
        robot.linear_velocity + np.cross(robot.angular_velocity, arm) + vel_joints
    )

    force = config.torso_mass * np.array([0.0, 0.0, -config.gravity]) + assist.force
    torque = assist.torque - config.angular_damping * robot.angular_velocity

    leg_cap = config.leg_force_limit
    for i in range(pts_world.shape[0]):
        f = _ground_force(pts_world[i], vel_pts[i], config, leg_cap)
        if f is not None:
            force += f
            torque += np.cross(arm[i], f)

    # torso sphere resting contact (lowest point straight down in world)
    sphere_arm = np.array([0.0, 0.0, -config.torso_contact_radius])
    sphere_pt = robot.position + sphere_arm
    sphere_vel = robot.linear_velocity + np.cross(robot.angular_velocity, sphere_arm)
    f = _ground_force(sphere_pt, sphere_vel, config, None)
    if f is not None:
        force += f
        torque += np.cross(sphere_arm, f)

    lin_vel = robot.linear_velocity + dt * force / config.torso_mass
    ang_vel = robot.angular_velocity + dt * torque / np.asarray(config.torso_inertia)
    position = robot.position + dt * lin_vel
    orientation = rotation.integrate_angular_velocity(robot.orientation, ang_vel, dt)

    # independent second-order joint servos
    acc = (config.kp * (targets.angles - q) - config.kd * qd) / config.joint_inertia
    joint_vel = qd + dt * acc
    joint_angles = q + dt * joint_vel
    hit_limit = np.abs(joint_angles) > config.joint_limit
    joint_angles = np.clip(joint_angles, -config.joint_limit, config.joint_limit)
    joint_vel = np.where(hit_limit, 0.0, joint_vel)

    new_robot = RobotState(
        position=position,
        orientation=orientation,
        linear_velocity=lin_vel,
        angular_velocity=ang_vel,
        joint_angles=joint_angles,
        joint_velocities=joint_vel,
    )
    # toe/heel rows double as kick points
    foot_rows = [1, 2, 4, 5]
    return new_robot, pts_world[foot_rows], vel_pts[foot_rows]


def _integrate_ball(
    ball_pos: np.ndarray,
    ball_vel: np.ndarray,
    kickers: list[tuple[np.ndarray, np.ndarray, float]],
    config: EnvConfig,
) -> tuple[np.ndarray, np.ndarray, bool, int | None]:
    """Ball step: kicks, gravity, ground, rolling resistance, walls, goals.

    ``kickers`` are (point, velocity, contact_radius) triples. Returns the
    new position/velocity, whether a kick impulse fired, and the goal sign
    crossed this step (None if no goal).
    """
    dt = config.dt
    pos = ball_pos.copy()
    vel = ball_vel.copy()
    kicked = False

    for point, point_vel, radius in kickers:
        offset = pos - point
        dist = float(np.linalg.norm(offset))
        reach = config.ball_radius + radius
        if dist >= reach or dist < 1e-9:
            continue
        normal = offset / dist
        approach = float(np.dot(point_vel - vel, normal))
        pos = pos + (reach - dist) * normal
        if approach > 0.0:
            vel = vel + (1.0 + config.kick_restitution) * approach * normal
            if approach > config.kick_speed_threshold:
                kicked = True

    vel = vel + dt * np.array([0.0, 0.0, -config.gravity])
    on_ground = pos[2] <= config.ball_radius + 1e-6
    if on_ground:
        decay = max(0.0, 1.0 - config.rolling_resistance * dt)
        vel[0] *= decay
        vel[1] *= decay
    pos = pos + dt * vel

    if pos[2] < config.ball_radius:
        pos[2] = config.ball_radius
        if vel[2] < 0.0:
            bounce = -config.ball_restitution * vel[2]
            vel[2] = bounce if bounce > config.ball_rest_speed else 0.0

    goal_crossed: int | None = None
    half_w = config.goal_width / 2.0
    for sign in (1, -1):
        plane = sign * config.half_length
        if sign * pos[0] >= sign * plane:
            if abs(pos[1]) <= half_w:
                pos[0] = plane
                goal_crossed = sign
            else:
                pos[0] = 2.0 * plane - pos[0]
                vel[0] = -config.wall_restitution * vel[0]
    for sign in (1, -1):
        wall = sign * config.half_width
        if sign * pos[1] >= sign * wall:
            pos[1] = 2.0 * wall - pos[1]
            vel[1] = -config.wall_restitution * vel[1]

    return pos, vel, kicked, goal_crossed


def posture_of(robot: RobotState) -> PostureFeatures:
    return features_from_up_axis(robot.up_axis, robot.height)


def _reward_inputs(
    world: WorldState, residual: np.ndarray, config: EnvConfig
) -> tuple[FrnRewardInputs, BsknRewardInputs]:
    robot = world.robot
    up_dot = float(np.clip(robot.up_axis[2], -1.0, 1.0))
    heading = rotation.yaw(robot.orientation)
    forward = float(
        robot.linear_velocity[0] * math.cos(heading)
        + robot.linear_velocity[1] * math.sin(heading)
    )
    goal = config.goal_center()
    d_goal = float(math.hypot(*(goal[:2] - robot.position[:2])))
    pitch, roll = rotation.pitch_roll(robot.orientation)
    return (
        FrnRewardInputs(up_dot=up_dot, actions=residual),
        BsknRewardInputs(
            forward_speed=forward,
            goal_distance=d_goal,
            goal_distance_max=config.goal_distance_max,
            pitch_deg=math.degrees(pitch),
            roll_deg=math.degrees(roll),
            actions=residual,
        ),
    )


def _check_finite(world: WorldState, frame: int) -> None:
    robot = world.robot
    values = np.concatenate(
        [
            robot.position,
            robot.orientation,
            robot.linear_velocity,
            robot.angular_velocity,
            robot.joint_angles,
            robot.joint_velocities,
            world.ball_position,
            world.ball_velocity,
        ]
    )
    if not np.all(np.isfinite(values)):
        raise SimulationUnstable(
            f"non-finite state after frame {frame}; step rejected"
        )


def step_world(
    world: WorldState,
    targets: JointTargets,
    config: EnvConfig,
    assist: Wrench | None = None,
    residual: np.ndarray | None = None,
    coefficients: RewardCoefficients | None = None,
    reward_mode: Network = Network.BSKN,
) -> tuple[WorldState, StepResult]:
    """Advance the world by one dt. Pure: the input world is not modified.

    ``residual`` is the squashed policy output for this frame; it feeds the
    action-magnitude reward terms and is echoed into the observation slots
    for the next frame by the env wrapper. The returned StepResult carries
    no observation (the wrapper fills it in, since the gait clock lives
    there).
    """
    assist = assist or Wrench.zero()
    residual = np.zeros(NUM_JOINTS) if residual is None else np.asarray(residual, float)
    coefficients = coefficients or RewardCoefficients()

    new_robot, foot_pts, foot_vels = _integrate_robot(
        world.robot, targets, assist, config
    )

    kickers = [(foot_pts[i], foot_vels[i], config.foot_contact_radius) for i in range(4)]
    kickers.append(
        (
            world.robot.position,
            world.robot.linear_velocity,
            config.torso_contact_radius,
        )
    )
    ball_pos, ball_vel, kicked, goal_crossed = _integrate_ball(
        world.ball_position, world.ball_velocity, kickers, config
    )

    new_world = WorldState(
        robot=new_robot,
        ball_position=ball_pos,
        ball_velocity=ball_vel,
        opponent_position=None
        if world.opponent_position is None
        else world.opponent_position.copy(),
        frame=world.frame + 1,
    )
    _check_finite(new_world, new_world.frame)

    events = set()
    if kicked:
        events.add(Event.BALL_KICKED)
    if goal_crossed is not None and goal_crossed == config.goal_sign:
        events.add(Event.GOAL_SCORED)
    if (
        abs(new_robot.position[0]) > config.half_length
        or abs(new_robot.position[1]) > config.half_width
    ):
        events.add(Event.OUT_OF_BOUNDS)
    terminated = Event.GOAL_SCORED in events or Event.OUT_OF_BOUNDS in events

    frn_in, bskn_in = _reward_inputs(new_world, residual, config)
    if reward_mode is Network.FRN:
        reward = frn_reward(frn_in)
    else:
        reward = bskn_reward(bskn_in, coefficients)

    result = StepResult(
        observation=None,
        reward=reward,
        terminated=terminated,
        truncated=False,
        events=frozenset(events),
        posture=posture_of(new_robot),
        frn_inputs=frn_in,
        bskn_inputs=bskn_in,
    )
    return new_world, result


def knockdown(world: WorldState, impulse: np.ndarray, config: EnvConfig) -> WorldState:
    """Apply a COM impulse (N*s) to the torso; used to trigger recovery trials."""
    impulse = np.asarray(impulse, dtype=float)
    if not np.all(np.isfinite(impulse)):
        raise ValueError("impulse must be finite")
    out = world.copy()
    out.robot.linear_velocity = out.robot.linear_velocity + impulse / config.torso_mass
    return out


def detect_events(
    before: WorldState,
    after: WorldState,
    config: EnvConfig,
    switch: tuple[Network, Network] | None = None,
) -> set[Event]:
    """Frame-pair events: goal crossings, robot out of bounds, and arbiter
    switches mapped to fall/recovery."""
    events: set[Event] = set()
    half_w = config.goal_width / 2.0
    plane = config.goal_sign * config.half_length
    bx0, bx1 = before.ball_position[0], after.ball_position[0]
    if (
        config.goal_sign * bx0 < config.goal_sign * plane
        and config.goal_sign * bx1 >= config.goal_sign * plane - 1e-12
        and abs(after.ball_position[1]) <= half_w
    ):
        events.add(Event.GOAL_SCORED)
    pos = after.robot.position
    if abs(pos[0]) > config.half_length or abs(pos[1]) > config.half_width:
        events.add(Event.OUT_OF_BOUNDS)
    if switch is not None:
        came_from, went_to = switch
        if came_from is Network.BSKN and went_to is Network.FRN:
            events.add(Event.FELL)
        elif came_from is Network.FRN and went_to is Network.BSKN:
            events.add(Event.RECOVERED)
    return events


# ---------------------------------------------------------------------------
# observation
# ---------------------------------------------------------------------------


def observe(
    world: WorldState,
    clock: PhaseClock,
    prev_residual: np.ndarray,
    config: EnvConfig,
) -> np.ndarray:
    """Fill the 58-slot observation for the current world state."""
    robot = world.robot
    obs = np.zeros(observation.OBS_DIM)
    obs[observation.JOINT_ANGLES] = robot.joint_angles
    obs[observation.JOINT_VELOCITIES] = robot.joint_velocities
    obs[observation.PREV_RESIDUAL] = prev_residual
    obs[observation.TORSO_UP] = robot.up_axis

    to_local = rotation.yaw_aligned_inverse(robot.orientation)
    obs[observation.TORSO_ANG_VEL] = to_local @ robot.angular_velocity
    obs[observation.TORSO_LIN_VEL] = to_local @ robot.linear_velocity
    obs[observation.TORSO_HEIGHT] = robot.height
    obs[observation.PHASE] = phase_encoding(clock)

    goal = config.goal_center()
    obs[observation.BALL_POS] = to_local @ (world.ball_position - robot.position)
    obs[observation.BALL_VEL] = to_local @ world.ball_velocity
    obs[observation.GOAL_POS] = to_local @ (goal - robot.position)
    if world.opponent_position is not None:
        obs[observation.OPPONENT_POS] = to_local @ (
            world.opponent_position - robot.position
        )
    obs[observation.BALL_TO_GOAL] = to_local @ (goal - world.ball_position)
    d_goal = float(math.hypot(*(goal[:2] - robot.position[:2])))
    obs[observation.GOAL_DISTANCE] = d_goal / config.goal_distance_max
    return obs


# ---------------------------------------------------------------------------
# scenario resets
# ---------------------------------------------------------------------------


def _rest_on_ground(robot: RobotState, config: EnvConfig) -> None:
    """Shift the torso vertically so the lowest contact point touches z=0."""
    points = leg_contact_points_body(config, robot.joint_angles)
    world_pts = robot.position + points @ rotation.to_matrix(robot.orientation).T
    lowest = min(
        float(np.min(world_pts[:, 2])),
        robot.position[2] - config.torso_contact_radius,
    )
    robot.position = robot.position + np.array([0.0, 0.0, -lowest])


def make_world(
    config: EnvConfig,
    scenario: Scenario,
    rng: np.random.Generator,
    posture: np.ndarray,
) -> WorldState:
    """Deterministic initial world for a scenario (given the rng state)."""
    robot = RobotState(
        position=np.array([0.0, 0.0, 0.0]),
        orientation=rotation.IDENTITY.copy(),
        linear_velocity=np.zeros(3),
        angular_velocity=np.zeros(3),
        joint_angles=posture.copy(),
        joint_velocities=np.zeros(10),
    )
    ball = np.array([1.0, 0.0, config.ball_radius])

    if scenario is Scenario.STANDING_CENTER:
        robot.position[2] = standing_torso_height(config, posture)
        ball[0] = config.goal_sign * 1.0
    elif scenario in (Scenario.FALLEN_SUPINE, Scenario.FALLEN_PRONE):
        sign = -1.0 if scenario is Scenario.FALLEN_SUPINE else 1.0
        pitch = sign * math.radians(100.0)
        yaw = rng.uniform(-math.pi, math.pi)
        robot.orientation = rotation.multiply(
            rotation.from_axis_angle(np.array([0.0, 0.0, 1.0]), yaw),
            rotation.from_axis_angle(np.array([0.0, 1.0, 0.0]), pitch),
        )
        jitter = rng.uniform(-0.3, 0.3, size=NUM_JOINTS)
        robot.joint_angles = np.clip(
            posture + jitter, -config.joint_limit, config.joint_limit
        )
        _rest_on_ground(robot, config)
        ball = np.array([config.goal_sign * 2.0, 1.0, config.ball_radius])
    elif scenario is Scenario.CORNER_BALL:
        robot.position[2] = standing_torso_height(config, posture)
        ball = np.array(
            [
                config.goal_sign * (config.half_length - 0.3),
                config.half_width - 0.3,
                config.ball_radius,
            ]
        )
    elif scenario is Scenario.RANDOM:
        robot.position[0] = rng.uniform(-config.half_length + 1.0, config.half_length - 1.0)
        robot.position[1] = rng.uniform(-config.half_width + 1.0, config.half_width - 1.0)
        robot.position[2] = standing_torso_height(config, posture)
        yaw = rng.uniform(-math.pi, math.pi)
        robot.orientation = rotation.from_axis_angle(np.array([0.0, 0.0, 1.0]), yaw)
        ball = np.array(
            [
                rng.uniform(-config.half_length + 0.5, config.half_length - 0.5),
                rng.uniform(-config.half_width + 0.5, config.half_width - 0.5),
                config.ball_radius,
            ]
        )
    else:
        raise ValueError(f"unknown scenario {scenario!r}")

    opponent = (
        None
        if config.opponent_position is None
        else np.asarray(config.opponent_position, dtype=float)
    )
    return WorldState(
        robot=robot, ball_position=ball, ball_velocity=np.zeros(3), opponent_position=opponent
    )


# ---------------------------------------------------------------------------
# energy accounting (diagnostics and tests)
# ---------------------------------------------------------------------------


def mechanical_energy(world: WorldState, config: EnvConfig) -> float:
    """Torso + ball kinetic and potential energy plus stored contact-spring
    energy. Joint servo DOFs carry no mass, so they do not contribute."""
    robot = world.robot
    inertia = np.asarray(config.torso_inertia)
    energy = 0.5 * config.torso_mass * float(np.dot(robot.linear_velocity, robot.linear_velocity))
    energy += 0.5 * float(np.dot(inertia * robot.angular_velocity, robot.angular_velocity))
    energy += config.torso_mass * config.gravity * robot.height
    energy += 0.5 * config.ball_mass * float(np.dot(world.ball_velocity, world.ball_velocity))
    energy += config.ball_mass * config.gravity * float(world.ball_position[2])

    pts = leg_contact_points_body(config, robot.joint_angles)
    world_pts = robot.position + pts @ rotation.to_matrix(robot.orientation).T
    for z in world_pts[:, 2]:
        if z < 0.0:
            energy += 0.5 * config.contact_stiffness * z * z
    sphere_z = robot.position[2] - config.torso_contact_radius
    if sphere_z < 0.0:
        energy += 0.5 * config.contact_stiffness * sphere_z * sphere_z
    return energy


# ---------------------------------------------------------------------------
# stateful wrapper
# ---------------------------------------------------------------------------


class SoccerEnv:
    """Owns one world, one gait clock, and one seeded RNG.

    ``step`` takes explicit joint targets; ``step_residual`` is the everyday
    path that superposes a squashed policy residual onto the feedforward
    gait, advances the clock, and assembles the observation.
    """

    def __init__(
        self,
        config: EnvConfig,
        gait: GaitProfile | None = None,
        coefficients: RewardCoefficients | None = None,
        reward_mode: Network = Network.BSKN,
        half_period: int | None = None,
    ):
        self.config = config
        self.gait = gait or GaitProfile.default()
        self.coefficients = coefficients or RewardCoefficients()
        self.reward_mode = reward_mode
        self._half_period = half_period or PhaseClock.initial().half_period
        self.rng = np.random.default_rng(config.seed)
        self.clock = PhaseClock.initial(self._half_period)
        self.prev_residual = np.zeros(NUM_JOINTS)
        self.world: WorldState | None = None
        self._frames_this_episode = 0

    def reset(self, scenario: Scenario | None = None) -> WorldState:
        scenario = scenario or self.config.scenario
        self.world = make_world(self.config, scenario, self.rng, self.gait.base_offset)
        self.clock = PhaseClock.initial(self._half_period)
        self.prev_residual = np.zeros(NUM_JOINTS)
        self._frames_this_episode = 0
        return self.world.copy()

    def load_world(self, world: WorldState) -> None:
        """Install an externally built world (replay, tests)."""
        self.world = world.copy()
        self._frames_this_episode = 0

    def observe(self) -> np.ndarray:
        return observe(self.world, self.clock, self.prev_residual, self.config)

    def step(
        self,
        targets: JointTargets,
        assist: Wrench | None = None,
        residual: np.ndarray | None = None,
    ) -> tuple[WorldState, StepResult]:
        if self.world is None:
            raise RuntimeError("reset() must be called before step()")
        new_world, result = step_world(
            self.world,
            targets,
            self.config,
            assist=assist,
            residual=residual,
            coefficients=self.coefficients,
            reward_mode=self.reward_mode,
        )
        self.world = new_world
        self.clock = advance(self.clock)
        if residual is not None:
            self.prev_residual = np.asarray(residual, dtype=float).copy()
        self._frames_this_episode += 1
        truncated = self._frames_this_episode >= self.config.max_episode_frames
        obs = self.observe()
        result = replace(
            result,
            observation=obs,
            truncated=truncated and not result.terminated,
        )
        return new_world.copy(), result

    def step_residual(
        self, residual: np.ndarray, assist: Wrench | None = None
    ) -> tuple[WorldState, StepResult]:
        targets = superpose(self.gait, self.clock, residual)
        return self.step(targets, assist=assist, residual=residual)

    def knockdown(self, impulse: np.ndarray) -> None:
        self.world = knockdown(self.world, impulse, self.config)
