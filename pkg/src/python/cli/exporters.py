# src/python/cli/exporters.py

from pathlib import Path
import io
import logging
import numpy as np
import pandas as pd

from src.python.spectral.periodic_field import grid_nodes, is_power_of_two
from src.python.solver.cauchy_solver import SurfacePatch
from src.python.radial.radial_solutions import RadialProfile
from src.python.analysis.null_curve import LimitNullCurve
from src.python.graph.graph_reconstruction import GraphGrid
from src.python.utilities.errors import ConelikeError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'
SURFACE_COLUMNS = ['u', 'v', 'x', 'y', 'z']


class ExportError(ConelikeError):
    code = 'io_error'


def _to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')


def export_csv(patch: SurfacePatch) -> str:
    """Surface CSV u,v,x,y,z, one row per node, v-major (all u for v_0 first)."""
    levels, n = patch.levels, patch.n
    u = np.tile(patch.u, levels)
    v = np.repeat(patch.v_levels, n)
    xyz = patch.psi.reshape(levels * n, 3)
    frame = pd.DataFrame({'u': u, 'v': v, 'x': xyz[:, 0], 'y': xyz[:, 1], 'z': xyz[:, 2]},
                         columns=SURFACE_COLUMNS)
    return _to_csv(frame)


def export_profile_csv(profile: RadialProfile) -> str:
    return _to_csv(pd.DataFrame({'v': profile.v_grid, 'f': profile.f, 'h': profile.h}))


def export_graph_csv(gg: GraphGrid) -> str:
    rows, n = gg.x.shape
    frame = pd.DataFrame({
        'u': np.tile(grid_nodes(n), rows),
        'v': np.repeat(gg.v_levels if gg.v_levels is not None else np.arange(rows, dtype=float), n),
    })
    for name in ('x', 'y', 'z', 'p', 'q', 'r', 's', 't'):
        frame[name] = getattr(gg, name).reshape(-1)
    return _to_csv(frame)


def export_null_curve_csv(curve: LimitNullCurve) -> str:
    return _to_csv(pd.DataFrame({
        'u': curve.A.nodes, 'A': curve.A.samples,
        'b1': curve.b[:, 0], 'b2': curve.b[:, 1], 'b3': curve.b[:, 2]
    }))


def export_obj(patch: SurfacePatch) -> str:
    """
    Wavefront OBJ: vertices row-major (v outer, u inner), 1-based quad faces,
    the periodic seam closed by wrapping u.
    """
    levels, n = patch.levels, patch.n
    out = io.StringIO()
    for x, y, z in patch.psi.reshape(levels * n, 3):
        out.write(f"v {FLOAT_FORMAT % x} {FLOAT_FORMAT % y} {FLOAT_FORMAT % z}\n")
    for k in range(levels - 1):
        for j in range(n):
            j_next = (j + 1) % n
            a = k * n + j + 1
            b = k * n + j_next + 1
            c = (k + 1) * n + j_next + 1
            d = (k + 1) * n + j + 1
            out.write(f"f {a} {b} {c} {d}\n")
    return out.getvalue()


def write_artifact(path: Path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
    except OSError as e:
        logger.error(f"Failed to write {path}: {str(e)}")
        raise ExportError(f"Cannot write {path}: {str(e)}")
    logger.info(f"Wrote {path}")
    return path


def load_surface_csv(path) -> SurfacePatch:
    """
    Read a surface CSV written by export_csv. The u grid must be uniform with a
    power-of-two size and the v levels uniform from 0. ψ_v is not stored, so
    analyses rebuild it by finite differences.
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, float_precision='round_trip')
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ExportError(f"Cannot read surface CSV {path}: {str(e)}")
    if list(frame.columns) != SURFACE_COLUMNS:
        raise ExportError(f"{path}: expected columns {','.join(SURFACE_COLUMNS)}", code='bad_surface_csv')

    v_levels = pd.unique(frame['v'].to_numpy())
    levels = len(v_levels)
    if levels == 0 or len(frame) % levels:
        raise ExportError(f"{path}: rows do not form a grid", code='bad_surface_csv')
    n = len(frame) // levels
    if not is_power_of_two(n) or n < 8:
        raise ExportError(f"{path}: {n} nodes per row is not a power of two >= 8", code='bad_surface_csv')
    u = frame['u'].to_numpy().reshape(levels, n)
    if np.max(np.abs(u - grid_nodes(n)[None, :])) > 1e-12:
        raise ExportError(f"{path}: u grid is not uniform", code='bad_surface_csv')

    psi = frame[['x', 'y', 'z']].to_numpy().reshape(levels, n, 3)
    try:
        patch = SurfacePatch(v_levels=np.asarray(v_levels, dtype=float), psi=psi)
        patch.dv  # raises on nonuniform levels
    except ConelikeError as e:
        raise ExportError(f"{path}: {str(e)}", code='bad_surface_csv')
    logger.info(f"Loaded surface {path} with {levels} rows of {n} nodes")
    return patch
