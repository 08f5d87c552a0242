"""Exact combinatorics of planar-map counting.

The package verifies, at desk scale and in exact arithmetic, a family of
identities tying together four pictures of the same numbers: brute-force
enumeration of half-edge permutation pairs, closed even-degree counting
formulas, leading coefficients of trace-power cumulants of random matrices,
and weighted counts of sign-decorated factorizations of a long cycle
(equivalently, labeled mobiles).  The bridge between the pictures is a
forest-interpolation identity for joint cumulants of Gaussian polynomial
families, implemented with exact tree-measure integration.
"""

from .perms import (CycleCutting, NumericalPartition, Permutation,
                    cycle_cuttings, partitions_of)
from .partitions import (SetPartition, join_bonds, joint_cumulant, moebius,
                         pair_partitions, set_partitions)
from .polynomials import (CovarianceSpec, RationalPolynomial, d_edge, d_gamma,
                          gaussian_expectation, natural, partial_sym)
from .bkar import (BondSet, LinearForest, bkar_check, enumerate_trees,
                   integrate_interpolation, linear_forest_of,
                   sample_interpolation)
from .maps import (cumulant_polynomial, enumerate_maps, map_count,
                   rooted_map_count, thooft_leading, tutte)
from .gjpairs import (antiderivative, enumerate_dmotz, enumerate_gj,
                      enumerate_gjdm, main_theorem_check)
from .trees import Mobile, PlanarTree, color_tree, mobile, snip, sv_tree, unsnip
from .gue import (build_fh, maintool_check, mc_cumulant, motzkin_assignments,
                  refined_expansion_check, sample_tridiagonal)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
