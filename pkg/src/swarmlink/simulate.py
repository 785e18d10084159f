"""Closed-loop desk-scale simulators: single-UAV position hold and
multi-UAV leader-follower formation flight.

The formation simulator advances every follower in lockstep per tick: the
kinematic leader pose is updated, follower targets are recomputed from the
role tree, and each follower applies one movement-layer command followed
by one dynamics step.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import ControlInput, PidGains, UavParams, UavState, step_state
from .formation import Pose, RoleGraph, formation_targets, movement_step

__all__ = [
    "simulate_position_hold",
    "FormationTrace",
    "simulate_formation",
    "straight_line_leader",
]


def simulate_position_hold(initial: UavState, target: Pose, gains: PidGains,
                           params: UavParams, dt: float, duration: float):
    """Fly one UAV toward a fixed pose target.

    Returns ``(times, positions)`` with positions of shape (n, 3).
    """
    n_steps = int(round(duration / dt))
    state = initial
    times = np.arange(n_steps + 1) * dt
    positions = np.empty((n_steps + 1, 3))
    positions[0] = state.position
    for k in range(n_steps):
        control = movement_step(state, target, gains, params, dt)
        state = step_state(state, control, params, dt)
        positions[k + 1] = state.position
    return times, positions


def straight_line_leader(start, velocity, heading: float = 0.0):
    """Leader path factory: constant-velocity straight line."""
    start = np.asarray(start, dtype=float)
    velocity = np.asarray(velocity, dtype=float)

    def path(t: float) -> Pose:
        return Pose(position=start + velocity * t, heading=heading)

    return path


@dataclass
class FormationTrace:
    """Per-tick poses of the leader and every follower."""

    times: np.ndarray
    leader_positions: np.ndarray            # (n, 3)
    follower_positions: dict[str, np.ndarray]

    def offset_error(self, follower: str, target_offsets: np.ndarray):
        """Norm of (follower - leader - expected offset) per tick."""
        gap = (self.follower_positions[follower] - self.leader_positions
               - np.asarray(target_offsets, dtype=float))
        return np.linalg.norm(gap, axis=1)


def simulate_formation(leader_path, roles: RoleGraph,
                       initial_states: dict[str, UavState],
                       gains: PidGains, params: UavParams,
                       dt: float, duration: float) -> FormationTrace:
    """Run a leader-follower formation scenario.

    ``leader_path`` maps time to the root Pose; ``initial_states`` holds
    one UavState per follower id in the role graph.
    """
    followers = roles.topological_followers()
    missing = [f for f in followers if f not in initial_states]
    if missing:
        raise ValueError(f"missing initial states for {missing}")
    n_steps = int(round(duration / dt))
    times = np.arange(n_steps + 1) * dt
    states = dict(initial_states)
    leader_positions = np.empty((n_steps + 1, 3))
    follower_positions = {f: np.empty((n_steps + 1, 3)) for f in followers}
    leader_positions[0] = leader_path(0.0).position
    for f in followers:
        follower_positions[f][0] = states[f].position
    for k in range(n_steps):
        t = times[k]
        leader_pose = leader_path(t)
        poses = {roles.root_id: leader_pose}
        for f in followers:
            poses[f] = Pose(position=states[f].position,
                            heading=float(states[f].euler[0]))
        targets = formation_targets(poses, roles)
        for f in followers:
            control = movement_step(states[f], targets[f], gains, params, dt)
            states[f] = step_state(states[f], control, params, dt)
            follower_positions[f][k + 1] = states[f].position
        leader_positions[k + 1] = leader_path(times[k + 1]).position
    return FormationTrace(times=times, leader_positions=leader_positions,
                          follower_positions=follower_positions)
