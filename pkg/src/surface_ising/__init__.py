"""Exact Ising partition functions on surface-embedded graphs.

The high-temperature expansion of the Ising partition function of a graph
drawn in a closed surface (orientable or not) is computed from Pfaffians of
signed, i-twisted adjacency matrices of the terminal graph, summed over
2^b1 orientation variants, together with brute-force oracles over the cycle
space and the Arf/Brown invariant machinery backing the formulas.
"""

from .embedding import (
    Edge,
    EmbeddedGraph,
    Vertex,
    crossing_vector,
    dump_json,
    load_json,
    normalize,
    omega_edge,
    validate,
)
from .homology import (
    QuadraticEnhancement,
    QuadraticForm,
    SurfaceSignature,
    arf,
    brown,
    dual_flip_vector,
    enumerate_enhancements,
    enumerate_forms,
    loop_class,
    reference_enhancement,
    reference_form,
)
from .generators import (
    flower,
    klein_lattice,
    planar_grid,
    random_instance,
    rp2_wheel,
    torus_lattice,
)
from .orientation import check_good, construct_good, variant, variant_for_enhancement
from .partition import (
    PartitionResult,
    boltzmann,
    dimer_class_sums,
    epsilon_0,
    z_bruteforce,
    z_general,
    z_per_class,
    z_practical,
    z_q,
)
from .pfaffian import build_adjacency, matching_sign, pfaffian_exact, pfaffian_numeric
from .ring import GaussianRational, Poly
from .terminal import TerminalGraph, build_terminal

__all__ = [
    "Edge",
    "EmbeddedGraph",
    "GaussianRational",
    "PartitionResult",
    "Poly",
    "QuadraticEnhancement",
    "QuadraticForm",
    "SurfaceSignature",
    "TerminalGraph",
    "Vertex",
    "arf",
    "boltzmann",
    "brown",
    "build_adjacency",
    "build_terminal",
    "check_good",
    "construct_good",
    "crossing_vector",
    "dimer_class_sums",
    "dual_flip_vector",
    "dump_json",
    "enumerate_enhancements",
    "enumerate_forms",
    "epsilon_0",
    "flower",
    "klein_lattice",
    "load_json",
    "loop_class",
    "matching_sign",
    "normalize",
    "omega_edge",
    "pfaffian_exact",
    "pfaffian_numeric",
    "planar_grid",
    "random_instance",
    "reference_enhancement",
    "reference_form",
    "rp2_wheel",
    "torus_lattice",
    "validate",
    "variant",
    "variant_for_enhancement",
    "z_bruteforce",
    "z_general",
    "z_per_class",
    "z_practical",
    "z_q",
]

__version__ = "0.1.0"
