import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gridseg.deterministic import funl  # noqa: E402
from gridseg.grid_core import GridSpec  # noqa: E402

SQRT2, SQRT3 = math.sqrt(2), math.sqrt(3)

# a = b, a^2/b^2 in {2, 3}, rational and irrational aspect ratios, a < b
MATRIX_GRIDS = [
    GridSpec(a, b) for a in (1.0, 1.35, SQRT2, 5.0) for b in (1.0, 1.5, 3.0)
] + [GridSpec(SQRT3, 1.0), GridSpec(1.0, SQRT2), GridSpec(10.0, 3.0)]


def matrix_lengths(grid, n_uniform=200, offset=1e-9):
    """Uniform lengths on (0, 20*max(a, b)] plus every breakpoint +/- offset."""
    top = 20 * max(grid.a, grid.b)
    lengths = [top * (k + 1) / n_uniform for k in range(n_uniform)]
    T = 4
    while True:
        bp = funl(T, grid)
        if bp > top:
            break
        lengths += [bp - offset, bp + offset]
        T += 1
    return [x for x in lengths if 0 < x <= top]


@pytest.fixture(params=MATRIX_GRIDS, ids=lambda g: f"a={g.a:.4g},b={g.b:.4g}")
def matrix_grid(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(acceptance.RESULTS):
        terminalreporter.write_line(acceptance.RESULTS[cid])
