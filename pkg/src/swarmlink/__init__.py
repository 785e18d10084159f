"""swarmlink: deterministic swarm-UAV flight, RF link and network
simulation toolkit."""

from . import (channel, dynamics, formation, linkbudget, network, simulate,
               swarm_opt, wind)

__all__ = [
    "channel",
    "dynamics",
    "formation",
    "linkbudget",
    "network",
    "simulate",
    "swarm_opt",
    "wind",
]

__version__ = "0.1.0"
