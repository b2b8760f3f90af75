"""Choquet integration against dyadic Hausdorff content and capacitary operator calculus."""

__version__ = "0.1.0"
