"""CSV and JSON writers with stable headers and full-precision, locale-independent numbers."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .analysis import EpEstimate, FitResult
from .bandtheory import BandSpectrum, quasienergies
from .dynamics import Trajectory, corrected_site, corrected_total
from .spectra import PhaseDiagram

CSV_SCHEMA_VERSION = "1"

SPECTRUM_HEADER = ("param", "re_lambda", "im_lambda", "re_E", "im_E", "band", "method")
PHASE_DIAGRAM_HEADER = ("theta1_pi", "theta2_pi", "max_im_E", "method")
TRAJECTORY_HEADER = ("t", "P_total", "P_site", "survival", "cum_loss")
SITE_DUMP_HEADER = ("t", "x", "prob_c0", "prob_c1")
GBZ_HEADER = ("region", "radius", "p", "re_beta", "im_beta")


def fmt(value) -> str:
    """Shortest round-tripping text for a number; empty for None/NaN."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    x = float(value)
    if math.isnan(x):
        return ""
    return repr(x)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def write_json(path: Path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def band_spectrum_rows(spectrum: BandSpectrum) -> list[tuple]:
    energies = spectrum.energies
    rows = []
    for band in range(spectrum.lam.shape[1]):
        for p, lam, e in zip(spectrum.param, spectrum.lam[:, band], energies[:, band]):
            rows.append((p, lam.real, lam.imag, e.real, e.imag, band, spectrum.method))
    return rows


def realspace_rows(lam: np.ndarray, method: str = "realspace") -> list[tuple]:
    """Rows for real-space eigenvalues sorted by (Re E, Im E); ``band`` is the sorted index."""
    energies = quasienergies(lam)
    order = np.lexsort((energies.imag, energies.real))
    return [(None, lam[i].real, lam[i].imag, energies[i].real, energies[i].imag, n, method)
            for n, i in enumerate(order)]


def phase_diagram_rows(pd: PhaseDiagram) -> list[tuple]:
    return [(a, b, pd.values[i, j], pd.method.value)
            for i, a in enumerate(pd.theta1_pi) for j, b in enumerate(pd.theta2_pi)]


def trajectory_rows(traj: Trajectory, site: int | None = None) -> list[tuple]:
    total = corrected_total(traj)
    local = corrected_site(traj, site) if site is not None else [None] * len(total)
    return list(zip(traj.times, total, local, traj.survival, traj.cumulative_loss))


def site_dump_rows(traj: Trajectory) -> list[tuple]:
    return [(t, x, traj.site_probs[t, i, 0], traj.site_probs[t, i, 1])
            for t in traj.times for i, x in enumerate(traj.positions)]


def ep_report(est: EpEstimate) -> dict:
    return est.to_dict()


def fit_report(fit: FitResult) -> dict:
    return fit.to_dict()
