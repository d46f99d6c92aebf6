"""Command space, gait clock, swing planner, rewards and loss stack for a
humanoid whole-body locomotion controller, at desk scale."""

__version__ = "0.1.0"
