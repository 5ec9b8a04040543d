import json
import os

import pytest

from ait.cli import main
from ait.dyadic import Dyadic
from ait.harness import (
    DistortionSpec,
    default_predicate_family,
    default_prefix_free_family,
    default_set_family,
    distortion_ball,
    exp_clopen,
    exp_distortion,
    exp_info_with_set,
    exp_predicate,
    exp_set_probability,
    s_n_set,
)


@pytest.fixture(scope="module")
def small_families():
    return {
        "sets": default_set_family(12),
        "pfs": default_prefix_free_family(8),
        "preds": default_predicate_family(12),
    }


def test_set_probability_report(fixture_cfg, small_families):
    rep = exp_set_probability(small_families["sets"], fixture_cfg, include_s_n=True)
    assert rep.passed
    names = {r["name"] for r in rep.rows}
    assert any(n.endswith(".floor") for n in names)
    assert any(n.startswith("S_4.") for n in names)
    # every assertion row is an exact comparison that actually ran
    assert all(r["pass"] is not None for r in rep.rows if r["kind"] == "assert")


def test_info_with_set_report(fixture_cfg, small_families):
    rep = exp_info_with_set(small_families["sets"], fixture_cfg)
    assert rep.passed
    assert any(n["name"].endswith("tau_semimeasure") for n in rep.rows)


def test_distortion_hamming_radius_one(fixture_cfg):
    spec = DistortionSpec("hamming-equal-length", Dyadic(1))
    assert distortion_ball("0000", spec) == ["0000"]
    rep = exp_distortion("0000", spec, fixture_cfg)
    assert rep.passed
    k_row = [r for r in rep.rows if r["name"] == "codeword.k"][0]
    assert k_row["lhs"] == 10


def test_distortion_hamming_radius_two(fixture_cfg):
    spec = DistortionSpec("hamming-equal-length", Dyadic(2))
    ball = distortion_ball("0000", spec)
    assert sorted(ball) == ["0000", "0001", "0010", "0100", "1000"]
    rep = exp_distortion("0000", spec, fixture_cfg)
    assert rep.passed
    # brute-force check of the chosen codeword
    from ait.complexity import k_t

    best = min(ball, key=lambda x: (k_t(x, "", fixture_cfg).value, len(x), x))
    row = [r for r in rep.rows if r["name"] == "codeword.exists"][0]
    assert row["lhs"] == best


def test_distortion_prefix_kind(fixture_cfg):
    spec = DistortionSpec("prefix-disagreement", Dyadic(3))
    ball = distortion_ball("01", spec)
    # within tree distance 3 of "01": its prefixes, itself, and children
    assert "01" in ball and "0" in ball and "010" in ball and "0100" in ball
    assert "11" not in ball  # distance 4
    rep = exp_distortion("01", spec, fixture_cfg)
    assert rep.passed


def test_distortion_radius_larger_than_everything(fixture_cfg):
    spec = DistortionSpec("hamming-equal-length", Dyadic(5))
    ball = distortion_ball("000", spec)
    assert len(ball) == 8  # the whole length class
    rep = exp_distortion("000", spec, fixture_cfg)
    assert rep.passed


def test_clopen_report(fixture_cfg):
    rep = exp_clopen(cfg=fixture_cfg)
    assert rep.passed
    names = [r["name"] for r in rep.rows]
    assert any(n.endswith("threshold_oracle") for n in names)
    assert any(n.endswith("b_for_bb") for n in names)


def test_predicate_report(fixture_cfg, small_families):
    rep = exp_predicate(small_families["preds"], fixture_cfg)
    assert rep.passed
    worked = [r for r in rep.rows if r["name"] == "worked.cylinder"][0]
    assert worked["pass"] is True


def test_report_rows_schema(fixture_cfg, small_families):
    rep = exp_predicate(small_families["preds"][:3], fixture_cfg)
    for line in rep.to_jsonl().splitlines():
        row = json.loads(line)
        assert set(row) == {"experiment", "name", "kind", "lhs", "rhs", "pass"}
        assert row["kind"] in ("assert", "measure")
        if row["kind"] == "measure":
            assert row["pass"] is None


def test_report_determinism(fixture_cfg, small_families):
    a = exp_set_probability(small_families["sets"], fixture_cfg).to_jsonl()
    b = exp_set_probability(small_families["sets"], fixture_cfg).to_jsonl()
    assert a == b


def test_s_n_fixture(fixture_cfg):
    # at desk scale the machine constants dominate: k >= n for everything short
    for n in range(1, 5):
        assert len(s_n_set(n, fixture_cfg)) == 1 << n


# ---------------------------------------------------------------------------
# CLI surfaces
# ---------------------------------------------------------------------------

def test_cli_k(capsys):
    assert main(["k", "0101"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["value"] == 10 and out["witness"].startswith("0")


def test_cli_k_empty_token(capsys):
    assert main(["k", "-"]) == 0
    assert json.loads(capsys.readouterr().out)["value"] == 2


def test_cli_m_and_omega(capsys):
    assert main(["m", "0"]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["value"] == "87/2^10" and row["witness"] is None
    assert main(["omega"]) == 0
    assert capsys.readouterr().out.strip() == "14585/2^14"


def test_cli_border(capsys):
    assert main(["border"]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["border"] == "1110001111100"
    assert row["length"] == 13
    assert row["k"] is None  # the proxy border is unreachable at these bounds
    gap = Dyadic.parse(row["omega"]) - Dyadic.parse(row["omega_hat"])
    assert gap <= Dyadic(1, len(row["border"]))


def test_cli_mset_km(tmp_path, capsys):
    path = tmp_path / "set.txt"
    path.write_text("0000\n0101\n")
    assert main(["mset", str(path)]) == 0
    capsys.readouterr()
    assert main(["km", str(path)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["value"] <= 10


def test_cli_mb(capsys):
    assert main(["mb", "--prefix", "0", "--target", "0"]) == 0
    assert capsys.readouterr().out.strip() == "1/2^4"


def test_cli_deficiency(tmp_path, capsys):
    path = tmp_path / "w.txt"
    path.write_text("00\t1/2^2\n01\t3/2^2\n")
    assert main(["deficiency", "--element", "00", "--measure", str(path)]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["floor_neg_log_weight"] == 2


def test_cli_stoch(capsys):
    assert main(["--max-len", "24", "stoch", "--element", "-",
                 "--max-v-len", "20", "--fuel-v", "256"]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["value"] == 11


def test_cli_hitvec(tmp_path, capsys):
    from ait.codec import encode_string_set

    sets = tmp_path / "q.txt"
    sets.write_text(
        f"{encode_string_set(['0'])}\t1/2^1\n{encode_string_set(['1'])}\t1/2^1\n"
    )
    meas = tmp_path / "m.txt"
    meas.write_text("0\t1/2^1\n1\t1/2^1\n")
    assert main(["hitvec", "--sets", str(sets), "--measure", str(meas),
                 "-i", "1", "-c", "1", "-d", "1"]) == 0
    row = json.loads(capsys.readouterr().out)
    assert len(row["elements"]) == 4 and row["score"] == "0/1"


def test_cli_nu(tmp_path, capsys):
    from ait.monotone import uniform_table

    path = tmp_path / "theta.tsv"
    path.write_text(uniform_table(3).serialize())
    assert main(["nu", "apply", str(path), "0000"]) == 0
    assert capsys.readouterr().out.strip() == "00"
    assert main(["nu", "preimage", str(path), "0", "4"]) == 0
    assert capsys.readouterr().out.strip() == "8"
    assert main(["nu", "build", str(path)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload[0]["N"] == 1


def test_cli_predicate(tmp_path, capsys):
    path = tmp_path / "pred.tsv"
    path.write_text("2\t0\n4\t0\n")
    assert main(["predicate", "complete", str(path)]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["output"][1] == "0" and row["output"][3] == "0"


def test_cli_machine_enumerate_cache(tmp_path, capsys):
    rc = main(["--max-len", "10", "--fuel", "512",
               "--cache", str(tmp_path), "machine", "enumerate"])
    assert rc == 0
    first = capsys.readouterr().out
    rc = main(["--max-len", "10", "--fuel", "512",
               "--cache", str(tmp_path), "machine", "enumerate"])
    assert rc == 0
    assert capsys.readouterr().out == first
    assert any(p.startswith("enum_") for p in os.listdir(tmp_path))


def test_cli_flags_accepted_after_subcommand(capsys):
    # the documented grammar puts the resource flags after the subcommand
    assert main(["omega", "--max-len", "10", "--fuel", "512"]) == 0
    trailing = capsys.readouterr().out
    assert main(["--max-len", "10", "--fuel", "512", "omega"]) == 0
    leading = capsys.readouterr().out
    assert trailing == leading
    assert main(["machine", "enumerate", "--max-len", "8", "--fuel", "256"]) == 0
    assert capsys.readouterr().out.startswith("00\t")


def test_cli_config_file(tmp_path, capsys):
    cfgfile = tmp_path / "ait.cfg"
    cfgfile.write_text("max_len=10\nfuel=512\n")
    assert main(["--config", str(cfgfile), "omega"]) == 0
    small_omega = capsys.readouterr().out.strip()
    assert small_omega != "14585/2^14"
    assert Dyadic.parse(small_omega) <= Dyadic.one()


def test_cli_experiment_single(tmp_path, capsys):
    out = tmp_path / "rep.jsonl"
    assert main(["experiment", "predicate", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert all(json.loads(l)["experiment"] == "predicate" for l in lines)


def test_cli_seedless_flag(capsys):
    assert main(["--seedless", "k", "0"]) == 0


def test_rewrite_frozen_updates_constants(tmp_path):
    from ait.cli import _rewrite_frozen

    stub = tmp_path / "frozen_stub.py"
    stub.write_text('FROZEN = {\n    "c_machine": 1,\n    "c_chain": 19,\n}\n')
    _rewrite_frozen({"c_chain": 23}, str(stub))
    assert '"c_chain": 23' in stub.read_text()
    assert '"c_machine": 1' in stub.read_text()
