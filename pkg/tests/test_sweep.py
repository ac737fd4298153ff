import csv
import itertools
import json

import pytest

from burstfec.channel import ChannelSpec, CodeSpec, SchemeSpec
from burstfec.sweep import (
    CSV_COLUMNS,
    DepthCandidate,
    ResultRow,
    SweepSpec,
    emit_results,
    feasible_pairs,
    normalized_goodput,
    optimize_depth,
    residual_correlation,
    run_sweep,
    throughput,
)

CODE_63_57 = CodeSpec(n=63, k=57, l=1)
SMALL_CODE = CodeSpec(n=6, k=3, l=1)


def small_spec(**overrides):
    base = dict(
        bers=(0.001, 0.01),
        nacfs=(0.0, 0.5),
        codes=(SMALL_CODE,),
        pairs=(SchemeSpec(depth=2, blocks=2), SchemeSpec(depth=4, blocks=1)),
        models=("model3",),
        budget=None,
        packets=2_000,
        seed=3,
    )
    base.update(overrides)
    return SweepSpec(**base)


# ----------------------------------------------------------------------
# grid walking
# ----------------------------------------------------------------------


def test_row_count_and_nesting_order():
    spec = small_spec(models=("model1", "mc"))
    rows = run_sweep(spec)
    assert len(rows) == spec.rows == 2 * 2 * 1 * 2 * 2
    expected = [
        (pair.depth, nacf, ber, model)
        for pair in spec.pairs
        for nacf in spec.nacfs
        for ber in spec.bers
        for model in spec.models
    ]
    got = [(r.scheme.depth, r.nacf, r.ber, r.model) for r in rows]
    assert got == expected


def test_row_field_population_by_kind():
    rows = run_sweep(small_spec(models=("model2", "mc"), bers=(0.01,), nacfs=(0.5,)))
    analytic = [r for r in rows if r.model == "model2"]
    mc = [r for r in rows if r.model == "mc"]
    for row in analytic:
        assert row.p is not None and row.throughput is not None
        assert row.p_hat is None and row.seed is None
    for row in mc:
        assert row.p is None
        assert row.p_hat is not None and row.ci_lo is not None and row.ci_hi is not None
        assert row.seed is not None and row.throughput is not None


def test_on_row_callback_sees_every_row_in_order():
    spec = small_spec()
    seen = []
    rows = run_sweep(spec, on_row=seen.append)
    assert seen == rows


def test_uncorrelated_models_agree_with_baseline():
    spec = small_spec(
        models=("model1", "model2", "model3", "baseline"), nacfs=(0.0,), bers=(0.02,)
    )
    rows = run_sweep(spec)
    for scheme in spec.pairs:
        point = {r.model: r.p for r in rows if r.scheme == scheme}
        for model in ("model1", "model2", "model3"):
            assert point[model] == pytest.approx(point["baseline"], abs=1e-10)


def test_relative_error_is_against_matching_mc_estimate():
    rows = run_sweep(
        small_spec(models=("model1", "model3", "mc"), bers=(0.02,), nacfs=(0.6,))
    )
    by_point = {}
    for row in rows:
        by_point.setdefault(row.scheme, []).append(row)
    for group in by_point.values():
        (mc_row,) = [r for r in group if r.model == "mc"]
        assert mc_row.p_hat > 0.0
        for row in group:
            if row.model == "mc":
                assert row.rel_err is None
            else:
                assert row.rel_err == pytest.approx(
                    (row.p - mc_row.p_hat) / mc_row.p_hat, rel=1e-12
                )


def test_mc_row_seeds_differ_between_rows_and_reproduce():
    spec = small_spec(models=("mc",))
    first = run_sweep(spec)
    second = run_sweep(spec)
    seeds = [r.seed for r in first]
    assert len(set(seeds)) == len(seeds)
    assert [(r.seed, r.p_hat, r.ci_lo, r.ci_hi) for r in first] == [
        (r.seed, r.p_hat, r.ci_lo, r.ci_hi) for r in second
    ]
    reseeded = run_sweep(small_spec(models=("mc",), seed=4))
    assert [r.seed for r in reseeded] != seeds


def test_budget_mismatch_marks_row_infeasible():
    spec = SweepSpec(
        bers=(0.01,),
        nacfs=(0.5,),
        codes=(CODE_63_57,),
        pairs=(SchemeSpec(depth=4, blocks=4), SchemeSpec(depth=5, blocks=5)),
        models=("model3", "mc"),
        budget=1008,
        packets=500,
        seed=1,
    )
    rows = run_sweep(spec)
    good = [r for r in rows if r.scheme.depth == 4]
    bad = [r for r in rows if r.scheme.depth == 5]
    assert all(r.note is None for r in good)
    for row in bad:
        assert row.note.startswith("infeasible:")
        assert row.p is None and row.p_hat is None and row.seed is None
        record = dict(zip(CSV_COLUMNS, row.csv_record()))
        assert record["p"] == "" and record["p_hat"] == "" and record["seed"] == ""
        assert record["residual_corr"] != ""  # grid geometry is still known


def test_model_failure_is_reported_on_the_row(monkeypatch):
    def boom(*args, **kwargs):
        raise RuntimeError("synthetic failure")

    monkeypatch.setattr("burstfec.sweep.evaluate_models", boom)
    rows = run_sweep(small_spec(bers=(0.01,), nacfs=(0.5,)))
    assert len(rows) == 2
    for row in rows:
        assert row.note == "error: synthetic failure"
        assert row.p is None


def test_spec_validation():
    with pytest.raises(ValueError, match="non-empty"):
        small_spec(bers=())
    with pytest.raises(ValueError, match="unknown models"):
        small_spec(models=("model3", "modelx"))


# ----------------------------------------------------------------------
# derived quantities
# ----------------------------------------------------------------------


def test_throughput_values():
    code = CodeSpec(n=63, k=45, l=3)
    scheme = SchemeSpec(depth=16, blocks=1)
    assert throughput(code, scheme, 0.0) == pytest.approx(720.0, abs=1e-12)
    assert throughput(code, scheme, 0.1) == pytest.approx(648.0, abs=1e-12)
    assert throughput(code, scheme, 1.0) == 0.0
    with pytest.raises(ValueError):
        throughput(code, scheme, 1.5)


def test_normalized_goodput_values():
    assert normalized_goodput(CODE_63_57, 0.25) == pytest.approx(
        (57 / 63) * 0.75, abs=1e-12
    )
    with pytest.raises(ValueError):
        normalized_goodput(CODE_63_57, -0.1)


def test_residual_correlation_values():
    # 0.9**16 is exactly 9**16 / 10**16 = 0.1853020188851841
    assert residual_correlation(0.9, 16) == pytest.approx(0.1853020188851841, abs=1e-15)
    assert residual_correlation(0.6, 8) == pytest.approx(0.01679616, abs=1e-15)
    assert residual_correlation(0.0, 5) == 0.0
    assert residual_correlation(0.5, 1) == 0.5
    with pytest.raises(ValueError):
        residual_correlation(1.0, 4)
    with pytest.raises(ValueError):
        residual_correlation(0.5, 0)


# ----------------------------------------------------------------------
# depth optimization
# ----------------------------------------------------------------------


def test_feasible_pairs_for_standard_budget():
    pairs = feasible_pairs(1008, 63)
    assert [(p.depth, p.blocks) for p in pairs] == [
        (1, 16), (2, 8), (4, 4), (8, 2), (16, 1),
    ]
    assert feasible_pairs(1000, 63) == []
    with pytest.raises(ValueError):
        feasible_pairs(0, 63)


def test_optimizer_prefers_deep_interleaving_on_bursty_channel():
    ranked = optimize_depth(
        1008, CodeSpec(n=63, k=45, l=3), ChannelSpec(ber=0.01, nacf=0.9)
    )
    assert ranked[0].scheme.depth == 16
    errors = [c.packet_error for c in ranked]
    assert errors == sorted(errors)


def test_optimizer_breaks_uncorrelated_ties_toward_small_depth():
    ranked = optimize_depth(
        1008, CodeSpec(n=63, k=45, l=3), ChannelSpec(ber=0.01, nacf=0.0)
    )
    assert [c.scheme.depth for c in ranked] == [1, 2, 4, 8, 16]
    rounded = {f"{c.packet_error:.9e}" for c in ranked}
    assert len(rounded) == 1  # genuine tie, broken by depth alone


def test_optimizer_decorrelation_flag():
    ranked = optimize_depth(
        1008, CodeSpec(n=63, k=45, l=3), ChannelSpec(ber=0.01, nacf=0.3)
    )
    by_depth = {c.scheme.depth: c for c in ranked}
    assert not by_depth[1].decorrelated  # residual 0.3
    assert not by_depth[2].decorrelated  # residual 0.09
    assert by_depth[4].residual_corr == pytest.approx(0.0081, abs=1e-15)
    assert by_depth[4].decorrelated  # below the 0.01 default threshold
    assert by_depth[16].decorrelated


def test_optimizer_rejections():
    with pytest.raises(ValueError, match="model"):
        optimize_depth(1008, CODE_63_57, ChannelSpec(ber=0.01, nacf=0.5), model="mc")
    with pytest.raises(ValueError, match="feasible"):
        optimize_depth(1000, CODE_63_57, ChannelSpec(ber=0.01, nacf=0.5))


# ----------------------------------------------------------------------
# emission
# ----------------------------------------------------------------------


def test_emit_header_only_for_empty_rows(tmp_path):
    out = tmp_path / "empty.csv"
    written = emit_results([], out)
    assert written == [out]
    assert out.read_text() == ",".join(CSV_COLUMNS) + "\n"


def test_emitted_csv_round_trips_and_is_deterministic(tmp_path):
    spec = small_spec(models=("model3", "mc"), bers=(0.01,), nacfs=(0.5,))
    rows = run_sweep(spec)
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_results(rows, first)
    emit_results(run_sweep(spec), second)
    assert first.read_bytes() == second.read_bytes()

    with open(first, newline="") as handle:
        parsed = list(csv.DictReader(handle))
    assert len(parsed) == len(rows)
    for record, row in zip(parsed, rows):
        assert record["model"] == row.model
        assert int(record["n"]) == row.code.n
        if row.p is not None:
            assert float(record["p"]) == pytest.approx(row.p, rel=1e-11)
        if row.p_hat is not None:
            assert float(record["p_hat"]) == pytest.approx(row.p_hat, rel=1e-11)


def test_report_embeds_config_and_notes(tmp_path):
    rows = [
        ResultRow(
            model="model3", ber=0.01, nacf=0.5,
            code=SMALL_CODE, scheme=SchemeSpec(depth=2, blocks=2),
            p=0.125, throughput=10.5, residual_corr=0.25,
        ),
        ResultRow(
            model="mc", ber=0.01, nacf=0.5,
            code=SMALL_CODE, scheme=SchemeSpec(depth=5, blocks=5),
            note="infeasible: depth*blocks*n = 150 != budget 24",
        ),
    ]
    config = {"packets": 2000, "seed": 3}
    csv_path, report_path = tmp_path / "r.csv", tmp_path / "r.json"
    written = emit_results(rows, csv_path, report_path, config=config)
    assert written == [csv_path, report_path]

    report = json.loads(report_path.read_text())
    assert report["config"] == config
    assert report["generator"] == "philox"
    assert len(report["rows"]) == 2
    assert report["rows"][0]["p"] == "0.125"
    assert "note" not in report["rows"][0]
    assert report["rows"][1]["note"].startswith("infeasible:")


def test_csv_uses_twelve_significant_digits(tmp_path):
    row = ResultRow(
        model="model1", ber=1 / 3, nacf=0.5,
        code=SMALL_CODE, scheme=SchemeSpec(depth=2, blocks=2),
        p=2 / 3,
    )
    record = dict(zip(CSV_COLUMNS, row.csv_record()))
    assert record["p_E"] == "0.333333333333"
    assert record["p"] == "0.666666666667"
