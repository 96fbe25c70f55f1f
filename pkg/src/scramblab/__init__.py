"""Numerical laboratory for multi-parameter information storage in
scrambled qudit registers: Haar ensembles, write/scramble encodings,
Fisher-metric isometry diagnostics and shell typicality."""

__version__ = "0.1.0"

from .encoding import (ComponentSet, EncoderSpec, Generator, OverlapStats,
                       capsule_overlap, capsule_state, cross_schmidt_overlaps,
                       encode, extract_components, gram_residual,
                       overlap_factorization, schmidt_uniformity, write_operator)
from .fisher import (FisherMetric, IsometryReport, TangentFrame,
                     derivative_states, isometry_report, qfi_metric,
                     qfi_metric_direct, reparameterize_check)
from .haar import (MomentEstimate, UnitaryMatrix, haar_sample,
                   haar_sample_subspace, moment2_exact, moment4_exact,
                   moment_mc)
from .states import (DensityMatrix, PureState, SchmidtDecomposition,
                     apply_global, apply_local, entropy, make_basis_state,
                     overlap, reduced_density, schmidt)
from .tolerances import DEFAULT, Tolerances
from .typicality import (GibbsComparison, HamiltonianSpec, MESShell,
                         build_hamiltonian, estimate_beta, gibbs_state,
                         mes_sample, mes_shell, typicality_report)
