"""Grid path planning by compiling the grid to spin energies and solving with parallel QAOA circuits."""

from .energy import local_energies, path_energy, total_connectivity_energy
from .errors import QGPError
from .grid import GridMap, build_grid, load_grid, paper_grid, uniform_grid
from .hamiltonian import DiagonalHamiltonian, QubitLayout, eigenvalue, eigenvalue_table, ket, lower
from .optimizer import OptimizerConfig, OptimizationTrace, gradient, optimize
from .oracle import OracleResult, optimal_path, shortest_path_crosscheck
from .pipeline import (
    SolveReport,
    apply_filter,
    compile_problem,
    decode,
    merge,
    normalize,
    solve_parallel,
    solve_serial,
)
from .polynomial import SpinPolynomial, SpinVar
from .qaoa import QaoaParams, exact_probabilities, run_circuit, sample

__version__ = "0.1.0"

__all__ = [
    "DiagonalHamiltonian",
    "GridMap",
    "OptimizationTrace",
    "OptimizerConfig",
    "OracleResult",
    "QGPError",
    "QaoaParams",
    "QubitLayout",
    "SolveReport",
    "SpinPolynomial",
    "SpinVar",
    "apply_filter",
    "build_grid",
    "compile_problem",
    "decode",
    "eigenvalue",
    "eigenvalue_table",
    "exact_probabilities",
    "gradient",
    "ket",
    "load_grid",
    "local_energies",
    "lower",
    "merge",
    "normalize",
    "optimal_path",
    "optimize",
    "paper_grid",
    "path_energy",
    "run_circuit",
    "sample",
    "shortest_path_crosscheck",
    "solve_parallel",
    "solve_serial",
    "total_connectivity_energy",
    "uniform_grid",
]
