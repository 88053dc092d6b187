"""Unit tests for SVG rendering."""

import xml.etree.ElementTree as ET

import pytest

from mtplan.benchmark import obstacle_runs, render_svg, render_svg_text
from mtplan.benchmark.render import COLORS
from mtplan.forest import Forest, Tree, TreeKind
from mtplan.kinodynamics import State
from mtplan.workspace import OccupancyGrid

SVG = "{http://www.w3.org/2000/svg}"


def _parse(text):
    return ET.fromstring(text.encode("utf-8"))


class TestObstacleRuns:

    @pytest.mark.unit
    def test_runs_per_row(self):
        grid = OccupancyGrid.from_rows(["##..#", ".....", "#####"])
        assert obstacle_runs(grid) == [(0, 0, 2), (4, 0, 1), (0, 2, 5)]

    @pytest.mark.unit
    def test_empty_grid(self, open_grid):
        assert obstacle_runs(open_grid) == []


class TestRenderSvg:

    @pytest.mark.unit
    def test_map_only(self):
        grid = OccupancyGrid.from_rows(["#..", "...", "..#"])
        root = _parse(render_svg_text(grid))
        assert root.tag == f"{SVG}svg"
        assert (root.get("width"), root.get("height")) == ("3", "3")
        assert root.find(f"{SVG}g[@id='forest']") is None
        assert root.find(f"{SVG}polyline") is None
        obstacles = root.findall(f".//{SVG}rect[@class='obstacle']")
        assert [(r.get("x"), r.get("y"), r.get("width")) for r in obstacles] == [("0", "0", "1"), ("2", "2", "1")]

    @pytest.mark.unit
    def test_single_rooted_edge(self, open_grid):
        tree = Tree(State.at((10.0, 20.0)), TreeKind.ROOTED)
        tree.add_node(State.at((12.5, 20.0)), 0)
        root = _parse(render_svg_text(open_grid, Forest(tree)))
        lines = root.findall(f".//{SVG}line")
        assert len(lines) == 1
        line = lines[0]
        assert line.get("class") == "rooted"
        assert line.get("stroke") == COLORS["rooted"] == "#ff8c00"
        assert (line.get("x1"), line.get("y1"), line.get("x2"), line.get("y2")) == (
            "10.000", "20.000", "12.500", "20.000",
        )

    @pytest.mark.unit
    def test_heuristic_edges_trajectory_and_markers(self, open_grid):
        rooted = Tree(State.at((10.0, 20.0)), TreeKind.ROOTED)
        rooted.add_node(State.at((12.0, 20.0)), 0)
        forest = Forest(rooted)
        other = Tree(State.at((50.0, 50.0)), TreeKind.HEURISTIC)
        other.add_node(State.at((55.0, 50.0)), 0)
        other.add_node(State.at((55.0, 55.0)), 1)
        forest.add_tree(other)

        text = render_svg_text(open_grid, forest, rooted.nodes, start=(10.0, 20.0), goal=(90.0, 40.0))
        root = _parse(text)
        kinds = [line.get("class") for line in root.findall(f".//{SVG}line")]
        assert kinds == ["rooted", "heuristic", "heuristic"]
        polyline = root.find(f"{SVG}polyline[@id='trajectory']")
        assert polyline.get("points") == "10.000,20.000 12.000,20.000"
        assert polyline.get("stroke") == "#e00000"
        assert root.find(f"{SVG}circle[@id='start']").get("fill") == "#e00000"
        assert root.find(f"{SVG}circle[@id='goal']").get("fill") == "#00a000"

    @pytest.mark.unit
    def test_single_state_trajectory_is_not_drawn(self, open_grid):
        root = _parse(render_svg_text(open_grid, trajectory=[State.at((5.0, 5.0))]))
        assert root.find(f"{SVG}polyline") is None

    @pytest.mark.unit
    def test_deterministic(self, wall_grid):
        tree = Tree(State.at((10.0, 20.0)), TreeKind.ROOTED)
        tree.add_node(State.at((11.0, 21.0)), 0)
        assert render_svg_text(wall_grid, Forest(tree)) == render_svg_text(wall_grid, Forest(tree))

    @pytest.mark.unit
    def test_write_file(self, tmp_path, wall_grid):
        path = render_svg(wall_grid, None, [], tmp_path / "out" / "wall.svg")
        text = path.read_text(encoding="utf-8")
        assert text.startswith('<?xml version="1.0"')
        assert len(_parse(text).findall(f".//{SVG}rect[@class='obstacle']")) == 80 - 10
