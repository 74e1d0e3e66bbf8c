"""Protocol-level experiments: coupling calibration, trajectory tomography,
robustness scans, the round-trip conditional-phase gate, Ramsey phase
readout, and interleaved randomized benchmarking."""

from .calibration import CalibrationResult, calibrate_effective_coupling
from .trajectory import TrajectoryResult, trajectory
from .robustness import RobustnessGrid, robustness_scan
from .cz import (CZResult, CZTrims, calibrate_cz_trims, cz_gate,
                 ramsey_conditional_phase)
from .clifford import CliffordElement, generate_clifford, clifford_unitaries
from .rb import (RBResult, run_rb, fit_exponential, interleaved_error_rate,
                 IdealModel, DepolarizingModel, LindbladModel)

__all__ = [
    "CalibrationResult", "calibrate_effective_coupling",
    "TrajectoryResult", "trajectory",
    "RobustnessGrid", "robustness_scan",
    "CZResult", "CZTrims", "calibrate_cz_trims", "cz_gate",
    "ramsey_conditional_phase",
    "CliffordElement", "generate_clifford", "clifford_unitaries",
    "RBResult", "run_rb", "fit_exponential", "interleaved_error_rate",
    "IdealModel", "DepolarizingModel", "LindbladModel",
]
