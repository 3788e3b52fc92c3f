"""Lattice paths with catastrophes: exact series, kernel-method asymptotics,
limit laws, a bijection with 1-horizontal Dyck paths and exact samplers."""

from .model import DYCK, MOTZKIN, CatastrophePolicy, Catastrophe, Jump, JumpSet, Path, path_statistics, validate_path

__version__ = "0.1.0"

__all__ = [
    "DYCK",
    "MOTZKIN",
    "CatastrophePolicy",
    "Catastrophe",
    "Jump",
    "JumpSet",
    "Path",
    "path_statistics",
    "validate_path",
]
