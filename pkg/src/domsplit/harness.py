"""Energy scans and perturbation experiments.

The scan sweeps a grid of energies over one operator and compares two
independent judgments at each: the spectral prediction (outside the
computed spectrum cover means a splitting should exist) and the
certifier's verdict on the transfer cocycle.  Disagreements inside the
uncertainty band around band edges, or with razor-thin domination
margins, are tallied as marginal; anything else is a hard disagreement
and a red flag.

Perturbation experiments re-certify a window after bumping every
factor by an exactly sized random matrix, probing the advertised
stability radius from inside.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .certifier import DegenerateCocycle, certify, certify_operator
from .jacobi import SpectrumApprox, dist_to_spectrum, operator_from_json, operator_to_json, spectrum
from .mat2 import MatSequence, op_norm

__all__ = [
    "SCAN_COLUMNS",
    "trial_rng",
    "ScanReport",
    "johnson_scan",
    "PerturbReport",
    "perturb_sequence",
    "perturbation_experiment",
]

SCAN_COLUMNS = [
    "E_re",
    "E_im",
    "delta_spec",
    "ds_status",
    "condition_failed",
    "N",
    "domination_margin",
    "delta_sep",
    "m_N",
    "epsilon",
]


def trial_rng(seed, k):
    """Generator for trial k: counter-based stream splitting, so any
    subset of trials reproduces identically in any order or process."""
    return np.random.Generator(np.random.Philox(key=int(seed)).jumped(int(k)))


def _edge_distance(E, segments):
    E = complex(E)
    best = math.inf
    for lo, hi in segments:
        best = min(best, math.hypot(E.real - lo, E.imag), math.hypot(E.real - hi, E.imag))
    return best


def _scan_one(op, sp, E, kw):
    row = {"E_re": float(E.real), "E_im": float(E.imag)}
    row["delta_spec"] = dist_to_spectrum(sp, E)
    try:
        cert = certify_operator(op, E, **kw)
    except DegenerateCocycle:
        row.update(
            ds_status="degenerate",
            condition_failed=None,
            N=None,
            domination_margin=None,
            delta_sep=None,
            m_N=None,
            epsilon=None,
        )
        return row
    row["ds_status"] = cert.verdict
    row["condition_failed"] = cert.failed_condition
    row["N"] = cert.N
    row["domination_margin"] = cert.domination_margin
    row["delta_sep"] = cert.delta_sep
    row["m_N"] = cert.norm_floor_value
    row["epsilon"] = cert.epsilon
    return row


def _scan_chunk(payload):
    op_data, segments, resolution, energies, kw = payload
    op = operator_from_json(op_data)
    sp = SpectrumApprox(
        sizes=[],
        per_size={},
        merged=np.array([]),
        segments=[tuple(s) for s in segments],
        resolution=resolution,
        intervals=[],
    )
    return [_scan_one(op, sp, complex(re, im), kw) for re, im in energies]


@dataclass
class ScanReport:
    """Per-energy rows plus the prediction-vs-certificate tally."""

    rows: list
    resolution: float
    marginal_margin: float
    agree: list = field(default_factory=list)
    marginal: list = field(default_factory=list)
    hard_disagreements: list = field(default_factory=list)

    @property
    def n_total(self):
        return len(self.rows)

    @property
    def n_agree(self):
        return sum(self.agree)

    @property
    def n_marginal(self):
        return sum(self.marginal)

    def summary(self):
        return (
            f"{self.n_total} energies: {self.n_agree} agree, "
            f"{self.n_total - self.n_agree} disagree "
            f"({self.n_marginal} marginal, "
            f"{len(self.hard_disagreements)} hard)"
        )

    def to_csv(self, path):
        with open(path, "w", newline="") as f:
            w = csv.DictWriter(f, fieldnames=SCAN_COLUMNS)
            w.writeheader()
            for row in self.rows:
                w.writerow({k: ("" if row[k] is None else row[k]) for k in SCAN_COLUMNS})

    def to_json(self, path=None):
        doc = {
            "resolution": self.resolution,
            "marginal_margin": self.marginal_margin,
            "summary": self.summary(),
            "rows": self.rows,
            "agree": self.agree,
            "marginal": self.marginal,
            "hard_disagreements": [[z.real, z.imag] for z in self.hard_disagreements],
        }
        if path is None:
            return doc
        with open(path, "w") as f:
            json.dump(doc, f, indent=1)
            f.write("\n")
        return doc


def johnson_scan(
    op,
    energies,
    jobs=1,
    spectrum_sizes=(200, 400, 800),
    marginal_margin=0.05,
    **certify_kw,
):
    """Compare spectral prediction and certificates over an energy grid.

    An energy predicts a splitting iff it lies strictly outside the
    spectrum cover.  Disagreements are excused as marginal when the
    band-edge distance is within twice the grid step (or twice the
    cover resolution, whichever is larger), when the domination margin
    is under marginal_margin, or when the verdict is itself marginal.
    jobs > 1 distributes energies across processes.
    """
    sp = spectrum(op, sizes=spectrum_sizes)
    Es = [complex(e) for e in np.atleast_1d(np.asarray(energies, dtype=complex))]
    pairs = [(e.real, e.imag) for e in Es]
    re_parts = np.unique([e.real for e in Es])
    h_grid = float(np.min(np.diff(re_parts))) if len(re_parts) > 1 else 0.0
    if jobs <= 1:
        rows = [_scan_one(op, sp, e, certify_kw) for e in Es]
    else:
        data = operator_to_json(op)
        n_chunks = max(1, min(len(pairs), jobs * 3))
        bounds = np.linspace(0, len(pairs), n_chunks + 1, dtype=int)
        payloads = [
            (data, sp.segments, sp.resolution, pairs[a:b], certify_kw)
            for a, b in zip(bounds[:-1], bounds[1:])
            if b > a
        ]
        rows = []
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            for chunk in ex.map(_scan_chunk, payloads):
                rows.extend(chunk)
    report = ScanReport(
        rows=rows, resolution=sp.resolution, marginal_margin=marginal_margin
    )
    band = max(2.0 * h_grid, 2.0 * sp.resolution)
    for row in rows:
        E = complex(row["E_re"], row["E_im"])
        predicted = row["delta_spec"] > 0.0
        certified = row["ds_status"] in ("verified", "marginal")
        agree = predicted == certified
        edge = _edge_distance(E, sp.segments)
        margin = row["domination_margin"]
        excused = (
            edge < band
            or (margin is not None and margin < marginal_margin)
            or row["ds_status"] in ("marginal", "degenerate")
        )
        report.agree.append(agree)
        report.marginal.append(not agree and excused)
        if not agree and not excused:
            report.hard_disagreements.append(E)
    return report


def perturb_sequence(seq, size, rng):
    """Add an independent random bump of exact operator norm `size` to
    every factor."""
    n = len(seq)
    g = (rng.standard_normal((n, 2, 2)) + 1j * rng.standard_normal((n, 2, 2)))
    g *= (float(size) / op_norm(g))[:, None, None]
    return MatSequence(seq.j_lo, seq.values + g)


@dataclass
class PerturbReport:
    size: float
    trials: int
    n_ok: int
    failed_trials: list

    @property
    def all_ok(self):
        return self.n_ok == self.trials

    def to_json(self):
        return {
            "size": self.size,
            "trials": self.trials,
            "n_ok": self.n_ok,
            "failed_trials": self.failed_trials,
        }


def perturbation_experiment(seq, size, trials=100, seed=0, **certify_kw):
    """Re-certify `trials` independently perturbed copies of a window.

    Each factor of each copy moves by exactly `size` in operator norm,
    the worst case the stability radius speaks about.  Failed trial
    indices are recorded with their broken condition.
    """
    n_ok = 0
    failed = []
    for t in range(int(trials)):
        pert = perturb_sequence(seq, size, trial_rng(seed, t))
        cert = certify(pert, **certify_kw)
        if cert.verdict != "failed":
            n_ok += 1
        else:
            failed.append((t, cert.failed_condition))
    return PerturbReport(
        size=float(size), trials=int(trials), n_ok=n_ok, failed_trials=failed
    )
