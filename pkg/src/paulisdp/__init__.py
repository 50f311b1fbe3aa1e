"""Goemans-Williamson SDP relaxations of Pauli-sparse QUBOs, solved by
Hamiltonian Updates over Gibbs states, with randomized rounding and
certification utilities."""

from .gibbs import BackendConfig, GibbsParams
from .hu import HUPolicy, SolveReport, gw_binary_search, gw_to_ugw, hu_feasibility
from .instances import Instance, KroneckerSpec, load_instance, save_instance
from .paulis import ConstraintSet, DiagonalGroup, PauliOperator, PauliString

__all__ = [
    "BackendConfig",
    "ConstraintSet",
    "DiagonalGroup",
    "GibbsParams",
    "HUPolicy",
    "Instance",
    "KroneckerSpec",
    "PauliOperator",
    "PauliString",
    "SolveReport",
    "gw_binary_search",
    "gw_to_ugw",
    "hu_feasibility",
    "load_instance",
    "save_instance",
]
