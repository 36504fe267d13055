"""Scan and perturbation drivers: determinism, bookkeeping, reports."""

import json
from pathlib import Path

import numpy as np
import pytest

from domsplit import JacobiOperator, certify, cocycle_map
from domsplit.harness import (
    SCAN_COLUMNS,
    johnson_scan,
    perturb_sequence,
    perturbation_experiment,
    trial_rng,
)
from domsplit.mat2 import op_norm

GOLDEN = Path(__file__).parent / "data" / "golden_free_chain.csv"
SCAN_SIZES = (100, 150, 199)


# ------------------------------------------------------------ rng streams


def test_trial_rng_reproducible():
    a = trial_rng(7, 3).standard_normal(5)
    b = trial_rng(7, 3).standard_normal(5)
    assert np.array_equal(a, b)


def test_trial_rng_streams_are_independent():
    a = trial_rng(7, 3).standard_normal(5)
    b = trial_rng(7, 4).standard_normal(5)
    c = trial_rng(8, 3).standard_normal(5)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_trial_rng_order_free():
    # drawing trial 9 never depends on whether trial 2 ran first
    first = trial_rng(1, 9).standard_normal(4)
    trial_rng(1, 2).standard_normal(100)
    again = trial_rng(1, 9).standard_normal(4)
    assert np.array_equal(first, again)


# ---------------------------------------------------------- perturbations


def test_perturb_sequence_exact_norm(free_seq):
    rng = np.random.default_rng(5)
    before = free_seq.values.copy()
    bumped = perturb_sequence(free_seq, 0.125, rng)
    assert bumped.j_lo == free_seq.j_lo
    diffs = bumped.values - free_seq.values
    norms = op_norm(diffs)
    assert np.max(np.abs(norms - 0.125)) < 1e-12
    # the input is untouched
    assert np.array_equal(free_seq.values, before)


def test_perturb_zero_size(free_seq):
    rng = np.random.default_rng(5)
    same = perturb_sequence(free_seq, 0.0, rng)
    assert np.array_equal(same.values, free_seq.values)


def test_perturbation_experiment_within_budget(free_op, free_seq):
    from domsplit import certify_operator

    eps = certify_operator(free_op, 3.0).epsilon
    rep = perturbation_experiment(free_seq, 0.9 * eps, trials=20, seed=3)
    assert rep.all_ok
    assert rep.n_ok == 20
    assert rep.failed_trials == []


def test_perturbation_experiment_reports_failures(free_op):
    # in-band energy: the transfer cocycle is elliptic, and small bumps
    # cannot create a splitting
    seq = cocycle_map(free_op, 1.0)
    rep = perturbation_experiment(seq, 0.01, trials=10, seed=3)
    assert not rep.all_ok
    assert rep.n_ok < 10
    for t, cond in rep.failed_trials:
        assert cond in (1, 2, 3, 4)
    doc = rep.to_json()
    json.dumps(doc)
    assert doc["trials"] == 10


def test_perturbation_experiment_deterministic(free_seq):
    a = perturbation_experiment(free_seq, 0.5, trials=8, seed=11)
    b = perturbation_experiment(free_seq, 0.5, trials=8, seed=11)
    assert a.n_ok == b.n_ok
    assert a.failed_trials == b.failed_trials


# ------------------------------------------------------------------ scans


def test_scan_free_chain(free_op):
    rep = johnson_scan(free_op, np.linspace(-4, 4, 41), spectrum_sizes=SCAN_SIZES)
    assert rep.n_total == 41
    assert rep.hard_disagreements == []
    # the only excused rows sit at the band edges
    marg = [rep.rows[i]["E_re"] for i in range(41) if rep.marginal[i]]
    assert set(marg) == {-2.0, 2.0}
    for row in rep.rows:
        assert set(row) == set(SCAN_COLUMNS)
        inside = abs(row["E_re"]) < 2.0
        if inside:
            assert row["delta_spec"] == 0.0
            assert row["ds_status"] == "failed"
    # outside the band the spectral distance grows strictly
    right = [r["delta_spec"] for r in rep.rows if r["E_re"] >= 2.0]
    assert all(x < y for x, y in zip(right, right[1:]))


def test_scan_parallel_matches_serial(free_op):
    Es = np.linspace(-3, 3, 13)
    serial = johnson_scan(free_op, Es, jobs=1, spectrum_sizes=SCAN_SIZES)
    parallel = johnson_scan(free_op, Es, jobs=3, spectrum_sizes=SCAN_SIZES)
    assert json.dumps(serial.to_json(), sort_keys=True) == json.dumps(
        parallel.to_json(), sort_keys=True
    )


def test_scan_complex_energies(free_op):
    rep = johnson_scan(free_op, [2.5 + 0.5j, 0.0 + 1.0j], spectrum_sizes=SCAN_SIZES)
    assert rep.n_total == 2
    assert rep.n_agree == 2
    assert rep.rows[1]["delta_spec"] > 0.9


def test_scan_csv_roundtrip(free_op, tmp_path):
    rep = johnson_scan(free_op, [3.0, 0.0], spectrum_sizes=SCAN_SIZES)
    out = tmp_path / "scan.csv"
    rep.to_csv(out)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == ",".join(SCAN_COLUMNS)
    assert len(lines) == 3
    # failed row leaves the unmeasured cells empty
    cells = dict(zip(SCAN_COLUMNS, lines[2].split(",")))
    assert cells["ds_status"] == "failed"
    assert cells["epsilon"] == ""


def test_scan_empty_grid(free_op, tmp_path):
    rep = johnson_scan(free_op, [], spectrum_sizes=SCAN_SIZES)
    assert rep.n_total == 0
    assert rep.summary().startswith("0 energies")
    out = tmp_path / "empty.csv"
    rep.to_csv(out)
    lines = out.read_text().splitlines()
    assert lines == [",".join(SCAN_COLUMNS)]


def test_scan_json_payload(free_op):
    rep = johnson_scan(free_op, [3.0], spectrum_sizes=SCAN_SIZES)
    doc = rep.to_json()
    assert doc["summary"] == rep.summary()
    assert doc["rows"][0]["ds_status"] == "verified"
    json.dumps(doc)


def test_golden_scan_fixture(free_op, tmp_path):
    # committed reference output: any byte change is a behavior change
    rep = johnson_scan(free_op, np.linspace(-4, 4, 41), spectrum_sizes=SCAN_SIZES)
    out = tmp_path / "fresh.csv"
    rep.to_csv(out)
    assert out.read_bytes() == GOLDEN.read_bytes()
