"""
CSV emission through pandas with round-trip exact float formatting.
"""

import logging
import sys
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import pandas as pd

from ..solitons import SolitonSpec, SystemParams, phi_profile, secondary_profiles
from ..spectral import Grid

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def frame(rows: Iterable[dict], columns: Optional[Sequence[str]] = None) -> pd.DataFrame:
    df = pd.DataFrame(list(rows))
    if columns is not None:
        df = df.reindex(columns=list(columns))
    return df


def write_csv(df: pd.DataFrame, path: Union[str, Path, None], footer: Optional[str] = None) -> Optional[Path]:
    """Write to path, or to stdout when path is None or '-'.

    A footer is appended as a '# ' comment line after the table.
    """
    trailer = f"# {footer}\n" if footer else ""
    if path is None or str(path) == "-":
        df.to_csv(sys.stdout, index=False, float_format=FLOAT_FORMAT)
        sys.stdout.write(trailer)
        return None
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    if trailer:
        with path.open("a") as handle:
            handle.write(trailer)
    logger.info("wrote %s (%d rows)", path, len(df))
    return path


def profile_frame(spec: SolitonSpec, params: SystemParams, grid: Grid) -> pd.DataFrame:
    phi = phi_profile(spec, params, grid)
    psi, varphi, rho_profile = secondary_profiles(spec, params, grid)
    return pd.DataFrame({
        'x': grid.x,
        'phi': phi,
        'psi': psi,
        'varphi': varphi,
        're_rho': rho_profile.real,
        'im_rho': rho_profile.imag,
    })


CONSERVED_COLUMNS: List[str] = ['t', 'energy', 'momentum1', 'momentum2',
                                'energy_drift', 'momentum1_drift', 'momentum2_drift']
SPECTRUM_COLUMNS: List[str] = ['eigenindex', 'eigenvalue', 'residual']
MODULATION_COLUMNS: List[str] = ['t', 'j', 'omega_t', 'x_t', 'gamma_t', 'residual_norm', 'eps_xnorm']
CONSTRUCTION_COLUMNS: List[str] = ['t', 'x_err', 'bound', 'E', 'Q1', 'Q2',
                                   'env_omega32', 'env_3root', 'drift', 'q2_local_drift',
                                   'S', 'dS_dt', 'omega_offset']
SUMMARY_COLUMNS: List[str] = ['n', 'Tn', 't_sharp', 'envelope_const', 'fitted_rate', 'action_const',
                              'omega_rate', 'max_drift', 'valid']
