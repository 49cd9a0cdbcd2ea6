"""Backend selection and raw kernel behaviour."""

import pytest

from twobridge import kernels
from twobridge.markoff import MarkoffEvaluation
from twobridge.mcshane import boundary_edge_sets
from twobridge.slopes import Slope


def test_backend_names():
    assert kernels.get_kernel("python").BACKEND == "python"
    if kernels.compiled_kernel is not None:
        assert kernels.get_kernel("compiled").BACKEND == "compiled"
    assert kernels.BACKEND in ("python", "compiled")


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_kernel("fortran")


def _raw_explore(kernel, ev, edge, eps=1e-8, max_depth=120):
    out = kernels.CellOutcome()
    u, v = edge.s1, edge.s2
    kernel.explore(out, u.num, u.den, ev.phi(u), v.num, v.den, ev.phi(v),
                   ev.phi(edge.s0), 0, eps, max_depth)
    return out


def test_raw_outcome_parity(evaluation_for):
    if kernels.compiled_kernel is None:
        pytest.skip("compiled kernel not built")
    r = Slope(5, 17)
    ev = evaluation_for(r)
    edges = boundary_edge_sets(r)
    for edge in edges.e1 + edges.e2:
        a = _raw_explore(kernels.get_kernel("python"), ev, edge)
        b = _raw_explore(kernels.get_kernel("compiled"), ev, edge)
        assert a.nodes == b.nodes
        assert abs(a.total - b.total) <= 1e-13
        assert abs(a.tail - b.tail) <= 1e-13
        assert [c[:2] for c in a.census] == [c[:2] for c in b.census]
        assert len(a.deferred) == len(b.deferred)


def test_parabolic_cells_are_deferred():
    ev = MarkoffEvaluation(Slope(2, 5), complex(0.8660254037844387, -0.5))
    edges = boundary_edge_sets(Slope(2, 5))
    out = _raw_explore(kernels.get_kernel("python"), ev, edges.e1[0])
    kinds = {item[0] for item in out.deferred}
    assert kernels.DEFER_MEDIANT in kinds  # the 1/5 parabolic fan


def test_elliptic_abort():
    ev = MarkoffEvaluation(Slope(2, 5), 1.5 + 0j)  # real trace: elliptic loops
    edges = boundary_edge_sets(Slope(2, 5))
    out = _raw_explore(kernels.get_kernel("python"), ev, edges.e1[0])
    assert out.elliptic is not None
