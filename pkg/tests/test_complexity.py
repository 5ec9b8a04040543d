import pytest

from ait.codec import all_strings_upto, encode_self_delim
from ait.complexity import (
    InformationUndefined,
    chain_rule_report,
    coding_direction_holds,
    halting_proxy,
    info_with_halting,
    k_t,
    km_t,
    m_set,
    m_t,
    mutual_info_t,
    output_stats,
    pair_aux,
    reachable_outputs,
)
from ait.dyadic import Dyadic, ceil_neg_log2, dyadic_sum
from ait.frozen import CHAIN, FROZEN
from ait.machine import MachineConfig, run


def test_witness_reproduces_target(fixture_cfg):
    for x in ("", "0", "0101", "10110010"):
        result = k_t(x, "", fixture_cfg)
        assert result.is_finite and len(result.witness) == result.value
        out = run(result.witness, "", fixture_cfg.fuel)
        assert out.halted and out.output == x


def test_literal_budget(fixture_cfg):
    for y in all_strings_upto(6):
        k = k_t(y, "", fixture_cfg)
        assert k.value <= 2 * len(y) + 1 + FROZEN["c_machine"]


def test_k_infinite_beyond_reach(fixture_cfg):
    # length-7 strings are a reachability hole at these bounds unless periodic
    assert not k_t("0101101", "", fixture_cfg).is_finite


def test_k_antitone_in_fuel(fixture_cfg, double_fuel_cfg):
    corpus = ["", "0", "11", "0000", "0" * 27, "0" * 3125]
    for x in corpus:
        a = k_t(x, "", fixture_cfg)
        b = k_t(x, "", double_fuel_cfg)
        if a.is_finite:
            assert b.is_finite and b.value <= a.value
    # the separating string: reachable only at doubled fuel
    assert not k_t("0" * 3125, "", fixture_cfg).is_finite
    assert k_t("0" * 3125, "", double_fuel_cfg).value == 13


def test_m_monotone_in_fuel(fixture_cfg, double_fuel_cfg):
    for x in ("", "0", "0000", "0" * 27):
        assert m_t(x, "", fixture_cfg) <= m_t(x, "", double_fuel_cfg)


def test_m_lower_bounded_by_shortest_witness(fixture_cfg):
    for x in ("", "0", "0101"):
        k = k_t(x, "", fixture_cfg)
        assert m_t(x, "", fixture_cfg) >= Dyadic(1, k.value)


def test_m_partition(fixture_cfg, enumeration):
    total = dyadic_sum(m_t(x, "", fixture_cfg) for x in reachable_outputs(fixture_cfg))
    from ait.machine import kraft_sum

    assert total == kraft_sum(enumeration)
    assert total <= Dyadic.one()


def test_coding_direction_exhaustive(fixture_cfg):
    assert coding_direction_holds(fixture_cfg)


def test_m_set_linearity(fixture_cfg):
    assert m_set([], "", fixture_cfg) == Dyadic.zero()
    assert m_set(["0"], "", fixture_cfg) == m_t("0", "", fixture_cfg)
    union = m_set(["0", "1"], "", fixture_cfg)
    assert union == m_t("0", "", fixture_cfg) + m_t("1", "", fixture_cfg)


def test_m_set_floor(fixture_cfg):
    for members in (["0"], ["0", "1"], ["00", "11"], ["0000", "0101"]):
        mass = m_set(members, "", fixture_cfg)
        best = min(k_t(x, "", fixture_cfg).value for x in members)
        assert ceil_neg_log2(mass) <= best


def test_km_examples(fixture_cfg):
    # every output extends the empty string, so the cheapest program wins
    assert km_t([""], fixture_cfg).value == 2
    # prefix witnesses are cheaper than exact witnesses
    for members in (["0000"], ["01", "10"], ["111"]):
        km = km_t(members, fixture_cfg)
        best = min(k_t(x, "", fixture_cfg).value for x in members)
        assert km.value <= best
        out = run(km.witness, "", fixture_cfg.fuel)
        assert any(out.output.startswith(x) for x in members)


def test_km_mixed_length_prefix_set(fixture_cfg):
    from ait.codec import PrefixFreeSet
    from ait.machine import run

    members = PrefixFreeSet(["0", "10", "110"])
    km = km_t(members, fixture_cfg)
    # the empty output extends no member, so the cheapest witness is the
    # shortest program emitting a qualifying first bit
    assert km.value == 4
    out = run(km.witness, "", fixture_cfg.fuel)
    assert any(out.output.startswith(x) for x in members)


def test_km_union_never_worse(fixture_cfg):
    a, b = ["00"], ["11"]
    assert km_t(a + b, fixture_cfg).value <= min(
        km_t(a, fixture_cfg).value, km_t(b, fixture_cfg).value
    )


def test_km_rejects_empty(fixture_cfg):
    with pytest.raises(ValueError):
        km_t([], fixture_cfg)


def test_km_matches_enumeration_oracle(fixture_cfg, enumeration):
    # dual route: the prefix-set witness search against a scan of the full
    # enumeration
    families = [["0000"], ["01", "10"], [""], ["111"], ["0", "10", "110"],
                ["10110010"], ["0101010"]]
    for members in families:
        km = km_t(members, fixture_cfg)
        candidates = [len(r.program) for r in enumeration
                      if any(r.output.startswith(x) for x in members)]
        if candidates:
            assert km.is_finite and km.value == min(candidates)
        else:
            assert not km.is_finite


def test_km_antitone_in_fuel(fixture_cfg, double_fuel_cfg):
    for members in (["0000"], ["01", "10"], ["0" * 100]):
        small = km_t(members, fixture_cfg)
        large = km_t(members, double_fuel_cfg)
        if small.is_finite:
            assert large.is_finite and large.value <= small.value
    # a prefix set reachable only at doubled fuel
    assert not km_t(["0" * 300], fixture_cfg).is_finite
    assert km_t(["0" * 300], double_fuel_cfg).value == 13


def test_conditional_copy(fixture_cfg):
    for x in ("0110", "111111", "10"):
        cond = k_t(x, x, fixture_cfg)
        assert cond.value <= FROZEN["c_copy"]


def test_mutual_info(fixture_cfg):
    # I(x; x) = k(x) - k(x|x) is large for incompressible strings
    x = "0110"
    self_info = mutual_info_t(x, x, fixture_cfg)
    assert self_info == k_t(x, "", fixture_cfg).value - k_t(x, x, fixture_cfg).value
    # empty condition changes nothing: identical machine behavior
    assert mutual_info_t(x, "", fixture_cfg) == 0
    with pytest.raises(InformationUndefined):
        mutual_info_t("0101101", "", fixture_cfg)


def test_halting_proxy_shape(fixture_cfg, enumeration):
    proxy = halting_proxy(fixture_cfg)
    L = fixture_cfg.max_program_len
    assert len(proxy.bits) == (1 << (L + 1)) - 1
    strings = list(all_strings_upto(L))
    idx = {s: i for i, s in enumerate(strings)}
    # a known halting fixture program reads 1
    assert proxy.bits[idx["00"]] == "1"
    assert proxy.bits[idx[""]] == "0"
    # extensions of halting programs halt too
    assert proxy.bits[idx["0000"]] == "1"
    # spot-check against direct runs
    for s in ("0", "11111", "110", "0100", "1110111"):
        expect = "1" if run(s, "", fixture_cfg.fuel).halted else "0"
        assert proxy.bits[idx[s]] == expect


def test_halting_proxy_fuel_monotone(fixture_cfg, double_fuel_cfg):
    a = halting_proxy(fixture_cfg).bits
    b = halting_proxy(double_fuel_cfg).bits
    assert len(a) == len(b)
    assert all(x <= y for x, y in zip(a, b))  # bitwise domination
    assert a != b  # the fuel boundary is visible


def test_info_with_halting_nonnegative_for_proxy_prefix(fixture_cfg):
    # a prefix of the halting sequence is cheap given the halting sequence
    proxy = halting_proxy(fixture_cfg)
    x = proxy.bits[:7]
    gain = info_with_halting(x, fixture_cfg)
    assert gain is None or gain >= 0


def test_chain_rule_degenerate_pairs():
    rep = chain_rule_report("01011", "", CHAIN)
    assert rep.gap is not None and rep.gap <= FROZEN["c_chain"]
    rep = chain_rule_report("101", "101", CHAIN)
    assert rep.gap is not None and rep.gap <= FROZEN["c_chain"]


def test_chain_rule_sample_within_frozen_constant():
    # a deterministic slice of the calibration corpus
    corpus = [("0", "1"), ("01", "10"), ("110", "01"), ("0101", "1010"),
              ("11111", "00000"), ("10011", "1101"), ("", "01101")]
    for x, y in corpus:
        rep = chain_rule_report(x, y, CHAIN)
        assert rep.gap is not None
        assert rep.gap <= FROZEN["c_chain"]
        assert rep.k_pair.value == k_t(encode_self_delim(x) + encode_self_delim(y),
                                       "", CHAIN).value


def test_pair_aux_convention():
    assert pair_aux("01", "1") == "11001" + "101"
