"""Hermitian linear algebra and the structured SDP solver."""
from .linalg import (HermitianMatrix, complex_embedding, eigh, full_spectrum, hermitize,
                     jacobi_eigh, max_eigpair)
from .solver import SdpProblem, SdpSolution, dump_problem, load_problem, solve_sdp

__all__ = ["HermitianMatrix", "complex_embedding", "eigh", "full_spectrum", "hermitize",
           "jacobi_eigh", "max_eigpair", "SdpProblem", "SdpSolution", "dump_problem",
           "load_problem", "solve_sdp"]
