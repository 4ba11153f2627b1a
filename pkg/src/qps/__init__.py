"""Amplitude-based quantum Poisson solver for the 1D Dirichlet problem."""

from .builder import (
    QpsConfig,
    QpsSolution,
    build_bc,
    build_flag,
    build_inversion_parallel,
    build_inversion_serial,
    build_qps,
    solve,
    standard_registers,
)
from .circuit import (
    Circuit,
    CostModel,
    DEFAULT_COST_MODEL,
    Gate,
    QubitRegister,
    ResourceReport,
    adjoint,
    append,
    compose,
    count_resources,
    depth,
    serialize_circuit,
)
from .identities import (
    AngleSequence,
    OddFactorization,
    inversion_angles,
    inversion_value,
    odd_factor,
    odd_layer_residual,
    sine_formula_residual,
)
from .poisson import (
    EigenPair,
    PoissonProblem,
    TridiagonalSystem,
    discretize,
    eigenpair,
    eigenvalue,
    solve_classical,
    spectral_solve,
    truncation_study,
)
from .simulator import (
    PostselectResult,
    StateVector,
    apply,
    extract_register,
    fidelity,
    inject_register,
    postselect,
)

__version__ = "0.1.0"
