"""Phase-locked pulse-pair control of electronic coherence in multiphoton ionization."""
from .errors import SimulationWarning, ValidationError
from .fields import (FrequencyGrid, SpectralField, TemporalField, synthesize_spectrum,
                     to_freq, to_time)
from .masks import (CompositeMask, ConstantMask, PulsePairMask, TaylorPhaseMask,
                    WindowMask, apply_mask)
from .molecule import (CoordinateGrid, ElectronicState, MoleculeModel, PotentialCurve,
                       validate_model)

__all__ = [
    "SimulationWarning", "ValidationError", "FrequencyGrid", "SpectralField",
    "TemporalField", "synthesize_spectrum", "to_freq", "to_time", "CompositeMask",
    "ConstantMask", "PulsePairMask", "TaylorPhaseMask", "WindowMask", "apply_mask",
    "CoordinateGrid", "ElectronicState", "MoleculeModel", "PotentialCurve",
    "validate_model",
]
__version__ = "0.1.0"
