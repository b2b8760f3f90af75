import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from capacitary.bmo import bmo_norm
from capacitary.content import ContentParams
from capacitary.lattice import Cube, DyadicCube, GridFunction, build_root
from capacitary.verify import (CHECKS, CheckConfig, ConfigError, config_from_mapping, desk_config,
                               estimate_operator_norm, fourier_witness, gen_functions, get_check, maximize_ratio,
                               read_config_file, run_check, run_suite, summary_csv)
from capacitary.verify.checks import CHECK_IDS, estimate_operator_norm_on
from capacitary.verify.config import parse_value
from capacitary.verify.generators import (GeneratorError, KINDS, draw, packing_constant, packing_subfamily,
                                          random_disjoint_family, random_packing_family, render_symbol,
                                          witness_cubes)
from capacitary.verify.harness import profile_config
from capacitary.verify.report import CheckReport, ClaimResult, ratio, ratio_curve_tsv, refinement_ratio
from capacitary.operators import ExponentPair, RieszParams

# --- config ------------------------------------------------------------------------------


def test_config_defaults_and_validation():
    cfg = CheckConfig()
    assert cfg.refinement == (cfg.L, cfg.L + 1)
    assert CheckConfig(levels=(4, 6)).refinement == (4, 6)
    for bad in (dict(n=4), dict(L=0), dict(beta=1.5), dict(samples=0), dict(seed=-1), dict(stability=0.5)):
        with pytest.raises(ConfigError):
            CheckConfig(**bad)
    pair = CheckConfig(alpha=0.25, beta=0.6, p=2.0).exponents()
    assert 1 / pair.p - 1 / pair.q == pytest.approx(0.25 / 0.6, rel=1e-14)
    with pytest.raises(ConfigError):
        CheckConfig(alpha=0.25, beta=0.6, p=2.0, q=3.0).exponents()
    with pytest.raises(ConfigError):
        CheckConfig(alpha=0.25, beta=0.6, p=3.0).exponents()
    with pytest.raises(ConfigError):
        CheckConfig(alpha=0.25, beta=0.6).require_endpoint()
    CheckConfig(alpha=0.5, beta=0.75).require_endpoint()


def test_parse_values():
    assert parse_value("L", " 7 ") == 7
    assert parse_value("beta", "1.25") == 1.25
    assert parse_value("s", "1.5, 2") == (1.5, 2.0)
    assert parse_value("b_kinds", "bmo-log,constant") == ("bmo-log", "constant")
    assert parse_value("levels", "5,7") == (5, 7) and parse_value("levels", "none") is None
    assert parse_value("q", "None") is None and parse_value("q", "4") == 4.0
    assert parse_value("young", "t^2") == "t^2"
    with pytest.raises(ConfigError):
        parse_value("colour", "red")
    with pytest.raises(ConfigError):
        config_from_mapping(CheckConfig(), {"nope": 1})


def test_config_file(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("# a comment\nbeta = 0.8\n\ndiag-samples = 2  # trailing\nb_kinds = constant\n")
    vals = read_config_file(p)
    assert vals == {"beta": "0.8", "diag_samples": "2", "b_kinds": "constant"}
    cfg = config_from_mapping(CheckConfig(), vals)
    assert (cfg.beta, cfg.diag_samples, cfg.b_kinds) == (0.8, 2, ("constant",))
    p.write_text("beta 0.8\n")
    with pytest.raises(ConfigError):
        read_config_file(p)
    p.write_text("gamma = 1\n")
    with pytest.raises(ConfigError):
        read_config_file(p)


@given(st.integers(0, 2**20), st.integers(0, 50))
def test_rng_streams(seed, idx):
    a = CheckConfig(check_id="x", seed=seed, L=4).rng(idx, "s").uniform(size=3)
    b = CheckConfig(check_id="x", seed=seed, L=9).rng(idx, "s").uniform(size=3)
    c = CheckConfig(check_id="x", seed=seed, L=4).rng(idx, "t").uniform(size=3)
    assert np.array_equal(a, b) and not np.array_equal(a, c)


# --- report ------------------------------------------------------------------------------

def test_ratio_conventions():
    assert ratio(0.0, 0.0) == 0.0 and ratio(1.0, 0.0) == math.inf and ratio(3.0, 2.0) == 1.5
    assert refinement_ratio(0.0, 0.0) == 1.0 and refinement_ratio(0.0, 1.0) == math.inf
    assert refinement_ratio(2.0, 3.0) == 1.5


def claim(kind, ratios, **kw):
    return ClaimResult("c", kind, "", list(range(len(ratios))), ratios, **kw)


def test_claim_pass_rules():
    assert claim("bound", [[1.0, 1.9], [2.0]], bound=2.0).passed
    assert not claim("bound", [[2.1]], bound=2.0).passed
    assert claim("bound", [[2.0 + 1e-13]], bound=2.0, rtol=1e-12).passed
    assert not claim("bound", [[0.5], [1.5]], bound=2.0).passed  # growth 3 > 2
    assert claim("stable", [[1.0], [1.99]]).passed
    assert not claim("stable", [[1.0, math.inf], [1.0]]).passed
    assert not claim("stable", [[1.0], [2.5]]).passed
    assert claim("stable", [[0.0], [0.0]]).passed
    assert claim("exact", [[1.0, 1 + 1e-13]], value=1.0, rtol=1e-12).passed
    assert not claim("exact", [[1.1]], value=1.0, rtol=1e-12).passed
    assert claim("diagnostic", [[math.inf]]).passed is None
    with pytest.raises(ValueError):
        claim("vibes", [[1.0]])


def test_report_serialization(tmp_path):
    rep = CheckReport("demo", {"a": 1}, [claim("stable", [[1.0, math.inf]]), claim("diagnostic", [[2.0]])],
                      0.5, "now")
    d = json.loads(rep.to_json())
    assert d["passed"] is False and d["ratios"] == [1.0, "inf"] and d["timestamp"]["started"] == "now"
    assert "timestamp" not in json.loads(rep.to_json(include_timestamp=False))
    assert rep.summary_line().startswith("FAIL demo")
    lines = summary_csv([rep]).splitlines()
    assert lines[0] == "check_id,claim,kind,c_emp_coarse,c_emp_fine,refinement_ratio,bound,passed"
    assert len(lines) == 3
    tsv = ratio_curve_tsv(rep.claims[0]).splitlines()
    assert tsv[0].startswith("#") and all(len(x.split("\t")) == 3 for x in tsv[1:])


# --- generators --------------------------------------------------------------------------

def test_draw_kinds():
    rng = np.random.default_rng(0)
    r = build_root(1, 6)
    for kind in ("bmo-log", "random-step-bmo", "indicator", "constant"):
        draw(kind, 1, rng, "b").render(r)
    with pytest.raises(GeneratorError):
        draw("fourier-witness", 1, rng)
    with pytest.raises(GeneratorError):
        draw("noise", 1, rng)


@pytest.mark.parametrize("kind", ["bmo-log", "random-step-bmo", "indicator"])
@pytest.mark.parametrize("n,beta", [(1, 0.6), (2, 1.4)])
def test_symbols_normalized(kind, n, beta):
    r = build_root(n, 5 if n == 1 else 4)
    p = ContentParams(beta)
    b = render_symbol(draw(kind, n, np.random.default_rng(3), "b"), r, p)
    assert bmo_norm(b, p) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("kind", ["bump", "indicator", "constant", "random-step"])
def test_inputs_central(kind):
    for n, L in ((1, 6), (2, 4)):
        r = build_root(n, L)
        f = draw(kind, n, np.random.default_rng(5), "f").render(r).values
        x = (np.arange(r.per_axis) + 0.5) / r.per_axis
        outside = (x < 0.25) | (x >= 0.75)
        assert f.any() and np.all(f >= 0)
        for ax in range(n):
            assert not np.take(f, np.flatnonzero(outside), axis=ax).any()


def test_gen_functions():
    cfg = CheckConfig(n=1, L=5, beta=0.8, samples=3)
    for kind in KINDS:
        pairs = gen_functions(kind, cfg)
        assert len(pairs) == (2 * 5 if kind == "fourier-witness" else 3)
    a = gen_functions("bmo-log", cfg, seed=4)
    b = gen_functions("bmo-log", cfg, seed=4)
    assert all(np.array_equal(x[0].values, y[0].values) and np.array_equal(x[1].values, y[1].values)
               for x, y in zip(a, b))
    with pytest.raises(GeneratorError):
        gen_functions("bmo-log", cfg, seed=-1)


def test_fourier_witness_geometry():
    r = build_root(2, 5)
    b = GridFunction(r, np.random.default_rng(1).standard_normal(r.shape))
    fw = fourier_witness(b, DyadicCube(3, (1, 0)), kmax=1)
    assert fw.Q == Cube((4, 0), 4) and fw.P == Cube((4, 0), 16)
    assert fw.PR == Cube((12, 8), 8)
    assert fw.c_Q == pytest.approx(b.values[fw.PR.slices()].mean(), rel=1e-14)
    assert len(fw.tests) == 9
    k0 = [t for t in fw.tests if t[0] == (0, 0)][0]
    chi = np.zeros(r.shape)
    chi[fw.PR.slices()] = 1
    assert np.array_equal(k0[1].values, chi) and not k0[2].values.any()
    for _, re, im in fw.tests:
        assert np.allclose(np.hypot(re.values, im.values), chi, atol=1e-15)
    with pytest.raises(GeneratorError):
        fourier_witness(b, DyadicCube(2, (3, 3)))
    for Q in witness_cubes(r, 2, 4):
        assert Cube(Q.lo, 4 * Q.size).inside(r)


@given(st.integers(0, 2**31), st.sampled_from([0.5, 1.0, 1.5]))
def test_packing_families(seed, beta):
    r = build_root(2, 5)
    rng = np.random.default_rng(seed)
    fam = random_packing_family(r, rng, beta)
    assert packing_constant(fam, r, beta) <= 2.0
    disjoint = random_disjoint_family(r, rng)
    sel = packing_subfamily(r, disjoint, ContentParams(beta))
    assert set(sel.selected) <= set(disjoint)


def test_packing_constant_examples():
    r = build_root(1, 3)
    kids = [DyadicCube(1, (0,)), DyadicCube(1, (1,))]
    assert packing_constant(kids, r, 1.0) == 1.0
    assert packing_constant(kids, r, 0.5) == pytest.approx(2 * 0.5**0.5, rel=1e-15)
    assert packing_constant([], r, 1.0) == 0.0


# --- registry and harness ------------------------------------------------------------------

def test_registry():
    assert len(CHECK_IDS) == 23 and set(CHECK_IDS) == set(CHECKS)
    for cid in CHECK_IDS:
        cfg = desk_config(cid)
        spec = get_check(cid)
        if spec.validate:
            spec.validate(cfg)
    with pytest.raises(ConfigError):
        get_check("nonexistent")
    with pytest.raises(ConfigError):
        run_check("strong_type", desk_config("strong_type").with_(alpha=0.7))
    with pytest.raises(ConfigError):
        run_check("modular_weak", desk_config("modular_weak").with_(beta=0.4))


def test_homogeneity_identity():
    rep = run_check("choquet_homogeneity", desk_config("choquet_homogeneity", samples=30, L=5))
    assert rep.passed and rep.c_emp == 1.0 and set(rep.ratios) == {1.0}


def test_constant_symbol_gives_zero():
    cfg = desk_config("strong_type", L=5, samples=4, b_kinds=("constant",))
    rep = run_check("strong_type", cfg)
    assert rep.passed and all(x == 0.0 for r in rep.primary.ratios for x in r)


def test_run_check_deterministic():
    cfg = desk_config("jn_p", L=5, samples=3, seed=2)
    a, b = run_check("jn_p", cfg), run_check("jn_p", cfg)
    assert a.to_json(include_timestamp=False) == b.to_json(include_timestamp=False)
    assert a.primary.levels == [5, 6] and a.config["seed"] == 2


def test_operator_norm_estimates():
    cfg = CheckConfig(n=1, L=6, alpha=0.25, beta=0.6, p=2.0)
    r = build_root(1, 6)
    pair = cfg.exponents()
    b = render_symbol(draw("random-step-bmo", 1, np.random.default_rng(2), "b"), r, ContentParams(0.6))
    assert estimate_operator_norm(GridFunction(r, np.full(r.shape, 3.0)), pair, cfg) <= 1e-10
    N1 = estimate_operator_norm(b, pair, cfg)
    N2 = estimate_operator_norm(GridFunction(r, 2 * b.values), pair, cfg)
    assert N1 > 0 and N2 == pytest.approx(2 * N1, rel=1e-9)
    with pytest.raises(ConfigError):
        estimate_operator_norm(b, pair, cfg, random_f=0, witness=False)
    assert estimate_operator_norm_on(b, [], pair, ContentParams(0.6), RieszParams(0.25)) == 0.0
    assert isinstance(pair, ExponentPair)


def test_profiles_and_suite():
    smoke = profile_config("exp_bmo", "smoke", 3)
    assert smoke.samples <= 4 and smoke.seed == 3 and smoke.L < desk_config("exp_bmo").L
    with pytest.raises(ConfigError):
        profile_config("exp_bmo", "huge", 0)
    reps = run_suite("smoke", 1, checks=["choquet_homogeneity", "bmo_shift"])
    assert [r.check_id for r in reps] == ["choquet_homogeneity", "bmo_shift"] and all(r.passed for r in reps)
    best = maximize_ratio("choquet_homogeneity", desk_config("choquet_homogeneity", samples=5, L=4), rounds=2)
    assert best["c_emp"] == 1.0 and best["seed"] == 0
