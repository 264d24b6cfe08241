import random

import pytest

from surface_ising.embedding import crossing_vector, omega_edge, validate
from surface_ising.generators import (
    add_inner_loop,
    attach_pendant,
    delete_edge,
    flower,
    klein_lattice,
    planar_grid,
    random_instance,
    rp2_wheel,
    subdivide_edge,
    torus_lattice,
)
from surface_ising.homology import SurfaceSignature


def test_torus_1x1_is_reference_instance():
    g = torus_lattice(1, 1)
    assert len(g.vertices) == 1 and len(g.edges) == 2
    assert validate(g) == []
    assert crossing_vector(g, g.edges[0]) == 1  # horizontal loop through pair a
    assert crossing_vector(g, g.edges[1]) == 2


def test_torus_2x2_counts():
    g = torus_lattice(2, 2)
    assert len(g.vertices) == 4 and len(g.edges) == 8
    assert sum(1 for e in g.edges if e.crossings) == 4
    assert validate(g) == []


def test_klein_1x1_reference():
    g = klein_lattice(1, 1)
    assert len(g.vertices) == 1 and len(g.edges) == 2
    assert omega_edge(g, g.edges[0]) == 1
    assert validate(g) == []


def test_lattice_dimensions_validate():
    for m in range(1, 4):
        for n in range(1, 4):
            assert validate(torus_lattice(m, n)) == []
            assert validate(klein_lattice(m, n)) == []
            assert validate(planar_grid(m, n)) == []
    with pytest.raises(ValueError):
        torus_lattice(0, 1)


def test_rp2_wheel_validates():
    for m, n in [(2, 1), (4, 1), (4, 2), (6, 3), (8, 2)]:
        g = rp2_wheel(m, n)
        assert validate(g) == []
    with pytest.raises(ValueError):
        rp2_wheel(5, 1)
    with pytest.raises(ValueError):
        rp2_wheel(4, 3)


def test_flower_all_signatures():
    for sig in [SurfaceSignature("orientable", 1), SurfaceSignature("orientable", 2),
                SurfaceSignature("klein", 0), SurfaceSignature("klein", 1),
                SurfaceSignature("rp2", 0), SurfaceSignature("rp2", 1)]:
        passes = list(range(sig.b1)) + [0]
        g = flower(sig, passes)
        assert validate(g) == []
        assert len(g.edges) == len(passes)


def test_ops_preserve_validity():
    g = torus_lattice(2, 1)
    g = subdivide_edge(g, 0)
    assert validate(g) == []
    g = attach_pendant(g, 0, 1)
    assert validate(g) == []
    g = add_inner_loop(g, 0, 0)
    assert validate(g) == []
    g = delete_edge(g, 1)
    assert validate(g) == []


def test_random_instances_validate():
    rng = random.Random(8)
    for trial in range(40):
        sig = [SurfaceSignature("orientable", 1), SurfaceSignature("orientable", 2),
               SurfaceSignature("klein", 1), SurfaceSignature("rp2", 1)][trial % 4]
        g = random_instance(sig, rng, max_edges=8, symbolic=trial % 2 == 0)
        assert validate(g) == []
        assert 1 <= len(g.edges) <= 8
