"""Exact adversarial guesswork of qubit classical-quantum channels."""

__version__ = "0.1.0"

from .channels import HsicFamily, generate_hsic, load_channel, save_channel
from .estimator import GuessworkSolver
from .model import CostFunction, Effect, NumberingMeasurement, QubitCqChannel, validate_channel
from .oracle import brute_force_norm, random_channel
from .score import build_optimal_measurement, e_norm, guesswork_of_numbering_measurement, guesswork_value
from .sim import covariantize_measurement, max_over_priors, simulate_game
from .solver import Regime, SolveResult, solve
from .symmetry import detect_symmetries

__all__ = [
    "CostFunction", "Effect", "GuessworkSolver", "HsicFamily", "NumberingMeasurement", "QubitCqChannel",
    "Regime", "SolveResult", "brute_force_norm", "build_optimal_measurement", "covariantize_measurement",
    "detect_symmetries", "e_norm", "generate_hsic", "guesswork_of_numbering_measurement", "guesswork_value",
    "load_channel", "max_over_priors", "random_channel", "save_channel", "simulate_game", "solve",
    "validate_channel",
]
