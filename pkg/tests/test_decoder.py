"""Decoder-layer tests: bias/expected-count formulas, the success bet,
syndrome decoding against full scans, and the assembled double-RLPN loop
on planted instances."""

import itertools
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualattack import codes as C
from dualattack import decoder as D
from dualattack.errors import DomainError, EmptySamples
from dualattack.fourier import CandidateSet, bits_to_index
from dualattack.samples import AuxCode


def _good_partition(code, s, rng):
    for _ in range(200):
        part = C.Partition.random(code.n, s, rng)
        try:
            return part, C.systematic_form(code, part)
        except C.RankDeficient:
            continue
    raise AssertionError("no full-rank partition found")


def test_p_succ_frozen():
    assert D.p_succ(60, 28, 8, 8) == Fraction(comb(52, 24), comb(60, 32))
    # all error positions on P forces u = t and a size constraint
    assert D.p_succ(10, 10, 3, 0) == 1
    assert D.p_succ(10, 4, 3, 5) == 0        # u > t
    assert D.p_succ(10, 2, 6, 1) == 0        # t - u does not fit in s


@given(st.integers(2, 14).flatmap(
    lambda n: st.tuples(st.just(n), st.integers(1, n - 1), st.integers(0, n))))
@settings(max_examples=60, deadline=None)
def test_p_succ_total_mass(nst):
    # |e_N| is hypergeometric, so the exact masses sum to one
    n, s, t = nst
    assert sum(D.p_succ(n, s, t, u) for u in range(t + 1)) == 1


def test_delta_frozen_point():
    p = D.DoubleRlpnParams(s=28, u=8, w=5, k_aux=20, t_aux=2)
    be = D.delta(p, 60, 30, 8)
    assert be.delta == Fraction(336, 201376)
    assert be.htilde_expected == Fraction(comb(32, 5) * comb(28, 2), 2 ** 10)


def test_delta_no_noise_is_one():
    p = D.DoubleRlpnParams(s=4, u=0, w=3, k_aux=2, t_aux=0)
    be = D.delta(p, 12, 6, 0)
    assert be.delta == 1
    assert be.htilde_expected == Fraction(comb(8, 3), 2 ** 4)


def test_delta_sign_kept():
    # K_2^(10)(5) = 10 - 25 + 10 = -5, so the bias is -5/45
    p = D.DoubleRlpnParams(s=10, u=5, w=2, k_aux=1, t_aux=0)
    be = D.delta(p, 20, 10, 5)
    assert be.delta == Fraction(-1, 9)
    code = C.random_code(20, 10, seed=3)
    inst = C.DecodingInstance.plant(code, 5, seed=3)
    with pytest.raises(DomainError):
        D.double_rlpn(inst, p)


def test_constraint_report():
    p = D.DoubleRlpnParams(s=28, u=8, w=5, k_aux=20, t_aux=2)
    be = D.delta(p, 60, 30, 8)
    rep = be.constraint_report(60, 2.0)
    assert rep["satisfied"] == (rep["log2_pairs"] >= rep["log2_required"])
    assert rep["log2_pairs"] == pytest.approx(
        np.log2(float(be.htilde_expected)))
    assert not D.BiasEstimate(0, 100).constraint_report(60, 2.0)["satisfied"]


def test_params_validation():
    with pytest.raises(DomainError):
        D.DoubleRlpnParams(s=0, u=1, w=2, k_aux=1, t_aux=1)
    p = D.DoubleRlpnParams(s=8, u=2, w=3, k_aux=4, t_aux=1)
    p.validate(20, 10, 4)
    for n, k, t in [(20, 6, 4),   # s > k
                    (20, 10, 1),  # u > t
                    (9, 9, 2),    # w > n - s
                    (20, 10, 12)]:  # t - u > s fails the split
        with pytest.raises(DomainError):
            p.validate(n, k, t)
    with pytest.raises(DomainError):
        D.DoubleRlpnParams(s=4, u=1, w=2, k_aux=5, t_aux=1).validate(20, 10, 2)
    with pytest.raises(DomainError):
        D.DoubleRlpnParams(s=4, u=1, w=2, k_aux=2, t_aux=5).validate(20, 10, 2)


def test_default_n_iter():
    assert D.default_n_iter(Fraction(1, 3)) == 24
    assert D.default_n_iter(1) == 8
    assert D.default_n_iter(0.369) == 22
    with pytest.raises(DomainError):
        D.default_n_iter(0)


def _scan_decode(parity, syndrome, t):
    nrows, ncols = parity.shape
    out = []
    for sup in itertools.combinations(range(ncols), t):
        e = np.zeros(ncols, np.uint8)
        e[list(sup)] = 1
        if np.array_equal(C.gf2_matmul(e.reshape(1, -1), parity.T)[0],
                          syndrome):
            out.append(e)
    return out


def test_syndrome_decode_weight_zero():
    h = np.eye(4, dtype=np.uint8)
    sols = D.syndrome_decode_all(h, np.zeros(4, np.uint8), 0)
    assert len(sols) == 1 and not sols[0].any()
    assert D.syndrome_decode_all(h, np.array([1, 0, 0, 0], np.uint8), 0) == []


def test_syndrome_decode_identity_parity():
    # with H = Id the syndrome itself is the only candidate
    h = np.eye(6, dtype=np.uint8)
    s = np.array([1, 0, 1, 1, 0, 0], np.uint8)
    sols = D.syndrome_decode_all(h, s, 3)
    assert len(sols) == 1 and np.array_equal(sols[0], s)
    assert D.syndrome_decode_all(h, s, 2) == []


def test_syndrome_decode_matches_scan():
    for seed in range(4):
        rng = np.random.default_rng(seed)
        parity = rng.integers(0, 2, size=(8, 12), dtype=np.uint8)
        syndrome = rng.integers(0, 2, size=8, dtype=np.uint8)
        for t in range(5):
            got = D.syndrome_decode_all(parity, syndrome, t)
            want = _scan_decode(parity, syndrome, t)
            assert len(got) == len(want)
            for a, b in zip(got, want):
                assert np.array_equal(a, b)


def test_birthday_matches_exhaustive():
    for seed in range(6):
        rng = np.random.default_rng(100 + seed)
        parity = rng.integers(0, 2, size=(9, 15), dtype=np.uint8)
        syndrome = rng.integers(0, 2, size=9, dtype=np.uint8)
        for t in range(5):
            a = D.syndrome_decode_all(parity, syndrome, t)
            b = D._birthday_decode(parity, syndrome, t, max_hits=1 << 20)
            assert len(a) == len(b)
            for x, y in zip(a, b):
                assert np.array_equal(x, y)


def test_syndrome_decode_rejects_bad_lengths():
    h = np.eye(4, dtype=np.uint8)
    with pytest.raises(DomainError):
        D.syndrome_decode_all(h, np.zeros(3, np.uint8), 1)
    assert D.syndrome_decode_all(h, np.zeros(4, np.uint8), 9) == []


def _planted_split(n, k, s, u, t, seed):
    """Code, partition and a planted y whose error puts exactly u
    positions on the N side."""
    rng = np.random.default_rng(seed)
    code = C.random_code(n, k, seed=seed)
    part, sf = _good_partition(code, s, rng)
    e = np.zeros(n, np.uint8)
    pp = rng.choice(part.ppos, size=t - u, replace=False)
    np_ = rng.choice(part.npos, size=u, replace=False)
    e[pp] = 1
    e[np_] = 1
    msg = rng.integers(0, 2, size=k, dtype=np.uint8)
    y = code.encode(msg) ^ e
    return code, part, sf, e, y


def test_solve_subproblem_planted():
    for seed in range(5):
        code, part, sf, e, y = _planted_split(24, 12, 10, 2, 3, seed)
        ep, en = part.split(e)
        got = D.solve_subproblem(code, part, y, ep, 2, sf=sf)
        assert got is not None and int(got.sum()) == 2
        # any returned word must solve the same shortened-code equations
        yp, yn = part.split(y)
        shift = C.gf2_matmul((yp ^ ep).reshape(1, -1), sf.r)[0]
        hn = C.gf2_nullspace(sf.rprime)
        resid = C.gf2_matmul((yn ^ shift ^ got).reshape(1, -1), hn.T)[0]
        assert not resid.any()


def test_solve_subproblem_weight_zero():
    code, part, sf, e, y = _planted_split(18, 9, 8, 0, 2, 11)
    ep, _ = part.split(e)
    got = D.solve_subproblem(code, part, y, ep, 0, sf=sf)
    assert got is not None and not got.any()
    # flip one N-side bit of y so y' leaves the shortened code
    bad = y.copy()
    bad[part.npos[0]] ^= 1
    assert D.solve_subproblem(code, part, bad, ep, 0, sf=sf) is None


def test_solve_subproblem_random_v_mostly_absent():
    code, part, sf, e, y = _planted_split(24, 12, 10, 2, 3, 17)
    rng = np.random.default_rng(99)
    hits = 0
    for _ in range(200):
        v = rng.integers(0, 2, size=part.s, dtype=np.uint8)
        if D.solve_subproblem(code, part, y, v, 2, sf=sf) is not None:
            hits += 1
    # about C(14,2) 2^(12-24) of the v draws should decode
    assert hits < 20


def _true_candidate(aux, e, part):
    ep, _ = part.split(e)
    x = C.gf2_matmul(ep.reshape(1, -1), aux.code.generator.T)[0]
    return bits_to_index(x)


def test_recover_e_planted():
    for seed in range(5):
        code, part, sf, e, y = _planted_split(24, 12, 10, 2, 3, 40 + seed)
        aux = AuxCode.random(10, 5, 1, seed=40 + seed)
        idx = _true_candidate(aux, e, part)
        cs = CandidateSet(5, 0.0, [(idx, 1.0)])
        got = D.recover_e([cs], [aux.code.generator], part, y, code, 3, 2,
                          sf=sf)
        assert got is not None
        assert int(got.sum()) == 3 and code.contains(y ^ got)


def test_recover_e_empty_and_false():
    code, part, sf, e, y = _planted_split(24, 12, 10, 2, 3, 77)
    aux = AuxCode.random(10, 5, 1, seed=77)
    assert D.recover_e([CandidateSet(5, 0.0, [])], [aux.code.generator],
                       part, y, code, 3, 2, sf=sf) is None
    idx = _true_candidate(aux, e, part)
    wrong = (idx + 1) % 32
    cs = CandidateSet(5, 0.0, [(wrong, 1.0)])
    got = D.recover_e([cs], [aux.code.generator], part, y, code, 3, 2, sf=sf)
    if got is not None:
        # a false candidate can still stumble on a valid coset word;
        # the contract only promises a verified answer
        assert int(got.sum()) == 3 and code.contains(y ^ got)


def test_recover_e_tuple_budget():
    code, part, sf, e, y = _planted_split(24, 12, 10, 2, 3, 78)
    aux = AuxCode.random(10, 5, 1, seed=78)
    cs = CandidateSet(5, 0.0, [(i, 1.0) for i in range(32)])
    with pytest.raises(C.BudgetExceeded):
        D.recover_e([cs, cs, cs, cs], [aux.code.generator] * 4, part, y,
                    code, 3, 2, sf=sf, max_tuples=1000)


def test_double_rlpn_weight_zero():
    code = C.random_code(16, 8, seed=5)
    p = D.DoubleRlpnParams(s=6, u=0, w=2, k_aux=3, t_aux=1)
    y = code.encode(np.ones(8, np.uint8))
    inst = C.DecodingInstance(code, y, 0)
    out = D.double_rlpn(inst, p)
    assert out is not None and not out.any()
    bad = y.copy()
    bad[0] ^= 1
    assert D.double_rlpn(C.DecodingInstance(code, bad, 0), p) is None


def test_double_rlpn_planted():
    p = D.DoubleRlpnParams(s=10, u=2, w=4, k_aux=5, t_aux=1, seed=7)
    found = 0
    for seed in range(6):
        code = C.random_code(24, 12, seed=300 + seed)
        inst = C.DecodingInstance.plant(code, 3, seed=300 + seed)
        e = D.double_rlpn(inst, p)
        if e is not None:
            found += 1
            assert int(e.sum()) == 3
            assert code.contains(inst.y ^ e)
    assert found >= 4


def test_double_rlpn_soundness_no_solution():
    # choose a y whose coset holds no weight-2 word at all, then demand None
    code = C.random_code(12, 5, seed=21)
    hist = None
    y = None
    for trial in range(300):
        rng = np.random.default_rng([500, trial])
        cand = rng.integers(0, 2, size=12, dtype=np.uint8)
        hist = C.coset_weight_enumerator(code, cand)
        if hist[2] == 0 and hist[0] == 0 and hist[1] == 0:
            y = cand
            break
    assert y is not None, "no suitable coset in 300 draws"
    p = D.DoubleRlpnParams(s=4, u=1, w=2, k_aux=2, t_aux=1, seed=9)
    inst = C.DecodingInstance(code, y, 2)
    assert D.double_rlpn(inst, p) is None


def test_trial_count_geometric():
    """Mean trials-to-success should track 1/p_succ within a factor two."""
    p = D.DoubleRlpnParams(s=10, u=2, w=4, k_aux=5, t_aux=1, seed=13)
    ps = float(D.p_succ(24, 10, 3, 2))
    used = []
    for seed in range(50):
        code = C.random_code(24, 12, seed=600 + seed)
        inst = C.DecodingInstance.plant(code, 3, seed=600 + seed)
        stats = {}
        e = D.double_rlpn(inst, p, stats=stats)
        if e is not None:
            used.append(stats["trials_used"])
    assert len(used) >= 40
    mean = sum(used) / len(used)
    assert 0.5 / ps <= mean <= 2.0 / ps


def test_stacked_false_decode_rate():
    """Random stacked aux syndromes decode at weight t-u about
    C(s, t-u) / 2^(N_aux k_aux) times."""
    s, k_aux, tu = 12, 4, 2
    for n_aux in (1, 2):
        rng = np.random.default_rng([42, n_aux])
        counts = []
        for trial in range(300):
            gens = [AuxCode.random(s, k_aux, 1, seed=[7, n_aux, trial, j])
                    .code.generator for j in range(n_aux)]
            stacked = np.concatenate(gens)
            synd = rng.integers(0, 2, size=n_aux * k_aux, dtype=np.uint8)
            counts.append(len(D.syndrome_decode_all(stacked, synd, tu)))
        expect = comb(s, tu) / 2 ** (n_aux * k_aux)
        mean = sum(counts) / len(counts)
        assert expect / 8 <= mean <= expect * 8
