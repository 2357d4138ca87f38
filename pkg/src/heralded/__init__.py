"""Heralded non-Gaussian states from two squeezed vacua, a beam splitter and a photon-number detector."""

from .scheme import (
    ImpossibleOutcome,
    SchemeParams,
    db_to_nepers,
    herald_probability,
    nepers_to_db,
    normalization,
    output_wavefunction,
)
from .phase_space import WignerGrid, wigner_at, wigner_grid, wigner_negativity
from .entanglement import EntanglementReport, entanglement_degree, separability_boundary
from .targets import TargetState, fidelity_cat_closed, fidelity_numeric, fidelity_scat_closed, target_wavefunction

__all__ = [
    "EntanglementReport",
    "ImpossibleOutcome",
    "SchemeParams",
    "TargetState",
    "WignerGrid",
    "db_to_nepers",
    "entanglement_degree",
    "fidelity_cat_closed",
    "fidelity_numeric",
    "fidelity_scat_closed",
    "herald_probability",
    "nepers_to_db",
    "normalization",
    "output_wavefunction",
    "separability_boundary",
    "target_wavefunction",
    "wigner_at",
    "wigner_grid",
    "wigner_negativity",
]
