"""Equivariant linear maps between tensor power spaces, applied via diagram factorization."""

from .category import DiagramSum, ScaledDiagram, compose, permutation_diagram, tensor
from .errors import EquitensorError
from .fastmult import OpCounter, apply_weight_matrix, factor, matrix_mult, permute, planar_mult, predicted_counts
from .functor import (
    DenseTensor,
    EquivariantMatrix,
    Family,
    GroupSpec,
    chi_matrix,
    functor_matrix,
    group_action,
    phi_matrix,
    psi_matrix,
    sample_group_element,
    theta_matrix,
)
from .setpartition import (
    Diagram,
    Kind,
    Permutation,
    SetPartition,
    enumerate_brauer_diagrams,
    enumerate_brauer_grood_diagrams,
    enumerate_partition_diagrams,
    is_algorithmically_planar,
    make_brauer,
    make_brauer_grood,
    make_partition,
)
from .weightmatrix import WeightMatrix, init_weights, materialize, spanning_set

__version__ = "0.1.0"
