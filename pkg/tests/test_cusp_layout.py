"""Zigzag layout, folds, longitude path and SVG output."""

import xml.dom.minidom

import pytest

from twobridge.cusp_layout import (
    LayoutNotGeometricError,
    check_simply_folded,
    layout_cusp,
    render_svg,
)
from twobridge.markoff import MarkoffEvaluation
from twobridge.mcshane import DirectedFareyEdge, boundary_edge_sets, finite_edge_sums, psi
from twobridge.slopes import Slope, continued_fraction, evaluate_cf, opposite_vertex

S25 = Slope(2, 5)
CASES = [(2, 5), (3, 7), (3, 8), (5, 17), (7, 17), (5, 12), (4, 13)]


@pytest.fixture(scope="module")
def layouts(evaluation_for):
    return {rs: layout_cusp(Slope(*rs), evaluation_for(Slope(*rs)))
            for rs in CASES}


class TestLayout:
    def test_differences_are_psi(self, layouts, evaluation_for):
        """Every consecutive vertex difference equals the complex
        probability of its dual directed edge."""
        for rs, layout in layouts.items():
            ev = evaluation_for(Slope(*rs))
            chain = ev.chain
            for line in layout.lines:
                tri = chain.triangles[line.triangle_index - 1]
                for j in range(3):
                    s1, s2 = line.slope_at(j), line.slope_at(j + 1)
                    s0 = line.slope_at(j + 2)
                    edge = DirectedFareyEdge(
                        s1=s1, s2=s2, s0=s0,
                        s3=opposite_vertex(s1, s2, s0),
                        head_index=line.triangle_index - 1,
                        head_triangle=tri,
                    )
                    diff = line.point(j + 1) - line.point(j)
                    assert abs(diff - psi(edge, ev)) <= 1e-9

    def test_period_translation(self, layouts):
        for layout in layouts.values():
            for line in layout.lines:
                assert abs(line.point(3) - line.point(0) - 1) < 1e-12
                assert abs(line.point(7) - line.point(1) - 2) < 1e-12

    def test_adjacent_lines_share_two_points(self, layouts):
        for layout in layouts.values():
            for a, b in zip(layout.lines, layout.lines[1:]):
                shared = 0
                for ja in range(3):
                    pa = a.point(ja)
                    for jb in range(3):
                        diff = pa - b.point(jb)
                        if abs(diff - round(diff.real)) < 1e-9 and \
                                a.slope_at(ja) == b.slope_at(jb):
                            shared += 1
                assert shared == 2

    def test_longitude_displacement(self, layouts, evaluation_for):
        for rs, layout in layouts.items():
            r = Slope(*rs)
            s1, _ = finite_edge_sums(r, evaluation_for(r))
            assert abs(layout.lambda_half - s1) <= 1e-9
            edges = boundary_edge_sets(r)
            assert len(layout.longitude_path) == len(edges.e1) + 1

    def test_longitude_on_layout(self, layouts):
        """Path vertices coincide with laid-out vertex instances mod the
        meridian translation."""
        for layout in layouts.values():
            by_index = {line.triangle_index: line for line in layout.lines}
            for s, p in zip(layout.longitude_slopes, layout.longitude_path):
                hit = False
                for line in layout.lines:
                    for j in range(3):
                        if line.slope_at(j) == s:
                            diff = p - line.point(j)
                            if abs(diff - round(diff.real)) < 1e-9:
                                hit = True
                assert hit, (s, p)


class TestFolds:
    def test_fold_slopes(self, layouts):
        for rs, layout in layouts.items():
            r = Slope(*rs)
            assert layout.fold_minus.fold_slope == Slope(1, 2)
            cf = continued_fraction(r)
            expected = evaluate_cf(tuple(cf.coefficients[:-1])
                                   + (cf.coefficients[-1] - 2,))
            assert layout.fold_plus.fold_slope == expected

    def test_fold_residuals(self, layouts):
        for rs, layout in layouts.items():
            report = check_simply_folded(layout, Slope(*rs))
            assert report["ok"]
            assert layout.fold_minus.residual <= 1e-9
            assert layout.fold_plus.residual <= 1e-9

    def test_strip_containment(self, layouts):
        for rs, layout in layouts.items():
            lo = min(layout.l_minus, layout.l_plus) - 1e-9
            hi = max(layout.l_minus, layout.l_plus) + 1e-9
            for line in layout.lines:
                for p in line.points:
                    assert lo <= p.imag <= hi

    def test_rotation_centers_at_midpoints(self, layouts):
        for layout in layouts.values():
            for fold in (layout.fold_minus, layout.fold_plus):
                c1, c2 = fold.rotation_centers
                # centers sit on the horizontal line, half a period apart
                assert abs(c1.imag - fold.level) <= 1e-9
                assert abs(c2.imag - fold.level) <= 1e-9
                assert abs((c2 - c1).real - 0.5) <= 1e-9

    def test_non_geometric_root_fails_fold(self):
        bad = MarkoffEvaluation(S25, 1.1 + 0.6j)
        layout = layout_cusp(S25, bad)
        with pytest.raises(LayoutNotGeometricError):
            check_simply_folded(layout, S25)
        assert max(layout.fold_minus.residual,
                   layout.fold_plus.residual) >= 1e-3


class TestSvg:
    def test_deterministic(self, layouts):
        layout = layouts[(5, 17)]
        assert render_svg(layout) == render_svg(layout)

    def test_well_formed_and_complete(self, layouts):
        layout = layouts[(5, 17)]
        svg = render_svg(layout)
        xml.dom.minidom.parseString(svg)
        # c - 2 = 5 zigzag polylines plus the longitude
        assert svg.count("<polyline") == 6

    def test_default_viewport(self, layouts):
        svg = render_svg(layouts[(2, 5)], {})
        assert 'width="800" height="600"' in svg
