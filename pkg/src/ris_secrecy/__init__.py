"""Joint RIS placement and passive beamforming for secrecy-rate maximisation.

Modules: ``geometry`` (scene, LOS and feasibility), ``channel`` (Rician
channels and rates), ``placement`` (two-tier search and grid oracle), ``sdp``
(Hermitian linear algebra and the interior-point solver), ``beamforming``
(Charnes-Cooper SDP, SROCR, spectral analysis) and ``harness`` (schemes,
Monte-Carlo sweeps, CSV/gnuplot output).
"""
from ._kernels import BACKEND
from .beamforming import BeamformingResult, SrocrParams, optimize_beamforming, srocr_solve
from .channel import ChannelSet, FadingParams, LinkBudget, draw_channels, secrecy_rate
from .geometry import Scene, placement_feasible
from .placement import (PlacementGrid, PlacementResult, brute_force_placement, outer_optimize,
                        predict_complexity)
from .sdp import SdpProblem, SdpSolution, solve_sdp

__version__ = "0.1.0"

__all__ = ["BACKEND", "BeamformingResult", "SrocrParams", "optimize_beamforming", "srocr_solve",
           "ChannelSet", "FadingParams", "LinkBudget", "draw_channels", "secrecy_rate", "Scene",
           "placement_feasible", "PlacementGrid", "PlacementResult", "brute_force_placement",
           "outer_optimize", "predict_complexity", "SdpProblem", "SdpSolution", "solve_sdp"]
